//! Budgeted brute-force searches. These are deliberately plain depth-first
//! enumerations with only verdict-preserving cuts, so they can serve as
//! independent ground truth for the polynomial solvers. Budgets are counted
//! in node expansions (recursive calls); a `Decided` answer is exact, and
//! running out of budget is an ordinary outcome, not an error.

use crate::instances::{KVisitsInstance, Schedule, VarKVisitsInstance};
use crate::pm::{PmMatching, PmTriple, PositionMatchingInstance};
use crate::reductions::{In3dmInstance, In3dmMatching, Rn3dmInstance, Rn3dmMatching};

/// A node-expansion allowance for one oracle run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    max_nodes: u64,
}

impl SearchBudget {
    pub const DEFAULT_NODES: u64 = 10_000_000;

    pub fn new(max_nodes: u64) -> Self {
        Self { max_nodes }
    }

    pub fn unlimited() -> Self {
        Self { max_nodes: u64::MAX }
    }

    pub fn max_nodes(&self) -> u64 {
        self.max_nodes
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self::new(Self::DEFAULT_NODES)
    }
}

struct Meter {
    left: u64,
    spent: u64,
}

impl Meter {
    fn new(budget: SearchBudget) -> Self {
        Self { left: budget.max_nodes, spent: 0 }
    }

    /// Accounts one expansion; false once the allowance is gone.
    fn tick(&mut self) -> bool {
        if self.left == 0 {
            return false;
        }
        self.left -= 1;
        self.spent += 1;
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Feasible(Schedule),
    Infeasible,
    BudgetExhausted,
}

impl OracleOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, OracleOutcome::Feasible(_))
    }

    pub fn schedule(&self) -> Option<&Schedule> {
        match self {
            OracleOutcome::Feasible(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationOutcome {
    /// Every feasible schedule was passed to the visitor.
    Complete,
    /// The visitor asked to stop early.
    Stopped,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PmOracleOutcome {
    Feasible(PmMatching),
    Infeasible,
    BudgetExhausted,
}

impl PmOracleOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, PmOracleOutcome::Feasible(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rn3dmOracleOutcome {
    Feasible(Rn3dmMatching),
    Infeasible,
    BudgetExhausted,
}

impl Rn3dmOracleOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Rn3dmOracleOutcome::Feasible(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum In3dmOracleOutcome {
    Feasible(In3dmMatching),
    Infeasible,
    BudgetExhausted,
}

impl In3dmOracleOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, In3dmOracleOutcome::Feasible(_))
    }
}

/// Decides a k-Visits instance by depth-first search. Positions are filled
/// left to right; at each step the unfinished node with the earliest next
/// deadline is tried first (any order is correct, this one finds feasible
/// schedules quickly).
pub fn oracle_kvisits(instance: &KVisitsInstance, budget: SearchBudget) -> OracleOutcome {
    // A k-Visits instance is exactly a Var-k instance whose rows repeat one
    // deadline.
    let rows = instance
        .deadlines()
        .iter()
        .map(|&d| vec![d; instance.k()])
        .collect();
    let var = VarKVisitsInstance::new(rows, instance.k()).expect("validated instance");
    oracle_var_kvisits(&var, budget)
}

/// Decides a Var-k-Visits instance by depth-first search.
pub fn oracle_var_kvisits(instance: &VarKVisitsInstance, budget: SearchBudget) -> OracleOutcome {
    let mut search = VarKSearch::new(instance, budget);
    match search.decide(1) {
        Step::Found => OracleOutcome::Feasible(Schedule::new(search.path)),
        Step::Exhausted => OracleOutcome::Infeasible,
        Step::OutOfBudget => OracleOutcome::BudgetExhausted,
    }
}

/// Enumerates every feasible schedule of a k-Visits instance in lexicographic
/// order, invoking `visit` on each; `visit` returns `false` to stop early.
pub fn oracle_enumerate_kvisits(
    instance: &KVisitsInstance,
    budget: SearchBudget,
    visit: &mut dyn FnMut(&Schedule) -> bool,
) -> EnumerationOutcome {
    let rows = instance
        .deadlines()
        .iter()
        .map(|&d| vec![d; instance.k()])
        .collect();
    let var = VarKVisitsInstance::new(rows, instance.k()).expect("validated instance");
    let mut search = VarKSearch::new(&var, budget);
    match search.enumerate(1, visit) {
        Step::Found => EnumerationOutcome::Stopped,
        Step::Exhausted => EnumerationOutcome::Complete,
        Step::OutOfBudget => EnumerationOutcome::BudgetExhausted,
    }
}

enum Step {
    /// Decision: a schedule was found. Enumeration: the visitor stopped us.
    Found,
    /// The subtree was searched completely without the above.
    Exhausted,
    OutOfBudget,
}

struct VarKSearch<'a> {
    instance: &'a VarKVisitsInstance,
    len: usize,
    count: Vec<usize>,
    last: Vec<i64>,
    path: Vec<usize>,
    meter: Meter,
}

impl<'a> VarKSearch<'a> {
    fn new(instance: &'a VarKVisitsInstance, budget: SearchBudget) -> Self {
        let n = instance.n();
        Self {
            instance,
            len: n * instance.k(),
            count: vec![0; n],
            last: vec![0; n],
            path: Vec::with_capacity(n * instance.k()),
            meter: Meter::new(budget),
        }
    }

    /// Next deadline of an unfinished node: its pending occurrence must
    /// happen at most this late.
    fn next_deadline(&self, node: usize) -> i64 {
        self.last[node - 1] + self.instance.deadline(node, self.count[node - 1] + 1)
    }

    /// Unfinished nodes sorted by next deadline (ties by index), or `None`
    /// when some prefix of them cannot fit before its deadlines: `j` nodes
    /// due within fewer than `j` remaining slots is a Hall-type
    /// contradiction, so the whole subtree is infeasible.
    fn viable_candidates(&self, position: i64) -> Option<Vec<usize>> {
        let mut cands: Vec<(i64, usize)> = (1..=self.instance.n())
            .filter(|&v| self.count[v - 1] < self.instance.k())
            .map(|v| (self.next_deadline(v), v))
            .collect();
        cands.sort_unstable();
        for (j, &(nd, _)) in cands.iter().enumerate() {
            if nd < position + j as i64 {
                return None;
            }
        }
        Some(cands.into_iter().map(|(_, v)| v).collect())
    }

    fn place(&mut self, node: usize, position: i64) {
        self.count[node - 1] += 1;
        self.last[node - 1] = position;
        self.path.push(node);
    }

    fn unplace(&mut self, node: usize, previous_last: i64) {
        self.count[node - 1] -= 1;
        self.last[node - 1] = previous_last;
        self.path.pop();
    }

    fn decide(&mut self, position: i64) -> Step {
        if !self.meter.tick() {
            return Step::OutOfBudget;
        }
        if position > self.len as i64 {
            return Step::Found;
        }
        let Some(cands) = self.viable_candidates(position) else {
            return Step::Exhausted;
        };
        for node in cands {
            let prev = self.last[node - 1];
            self.place(node, position);
            match self.decide(position + 1) {
                Step::Exhausted => self.unplace(node, prev),
                done => return done,
            }
        }
        Step::Exhausted
    }

    fn enumerate(&mut self, position: i64, visit: &mut dyn FnMut(&Schedule) -> bool) -> Step {
        if !self.meter.tick() {
            return Step::OutOfBudget;
        }
        if position > self.len as i64 {
            let schedule = Schedule::new(self.path.clone());
            return if visit(&schedule) { Step::Exhausted } else { Step::Found };
        }
        let Some(mut cands) = self.viable_candidates(position) else {
            return Step::Exhausted;
        };
        cands.sort_unstable(); // lexicographic output order
        for node in cands {
            let prev = self.last[node - 1];
            self.place(node, position);
            match self.enumerate(position + 1, visit) {
                Step::Exhausted => self.unplace(node, prev),
                done => return done,
            }
        }
        Step::Exhausted
    }
}

/// Decides a Position Matching instance by enumerating assignments of
/// deadlines to positions (equal deadline values are interchangeable, so
/// only the first unused copy of a value is branched on) and settling the
/// target side by sorted domination at each complete assignment.
pub fn oracle_pm(instance: &PositionMatchingInstance, budget: SearchBudget) -> PmOracleOutcome {
    let n = instance.n();
    let mut used = vec![false; n];
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut meter = Meter::new(budget);

    fn rec(
        inst: &PositionMatchingInstance,
        used: &mut [bool],
        chosen: &mut Vec<usize>,
        meter: &mut Meter,
    ) -> Option<Step> {
        if !meter.tick() {
            return Some(Step::OutOfBudget);
        }
        let pos = chosen.len();
        if pos == inst.n() {
            let mut pairs: Vec<(i64, usize, usize)> = chosen
                .iter()
                .enumerate()
                .map(|(a_index, &d_index)| (inst.deadlines()[d_index] + inst.positions()[a_index], d_index, a_index))
                .collect();
            pairs.sort_unstable();
            let dominated = pairs.iter().zip(inst.targets()).all(|(p, &t)| p.0 >= t);
            return dominated.then_some(Step::Found);
        }
        let a = inst.positions()[pos];
        let mut previous_value = None;
        for d_index in 0..inst.n() {
            let d = inst.deadlines()[d_index];
            if used[d_index] || d < a || previous_value == Some(d) {
                continue;
            }
            previous_value = Some(d);
            used[d_index] = true;
            chosen.push(d_index);
            if let Some(done) = rec(inst, used, chosen, meter) {
                return Some(done);
            }
            chosen.pop();
            used[d_index] = false;
        }
        None
    }

    match rec(instance, &mut used, &mut chosen, &mut meter) {
        Some(Step::Found) => {
            let mut pairs: Vec<(i64, usize, usize)> = chosen
                .iter()
                .enumerate()
                .map(|(a_index, &d_index)| {
                    (instance.deadlines()[d_index] + instance.positions()[a_index], d_index, a_index)
                })
                .collect();
            pairs.sort_unstable();
            let triples = pairs
                .into_iter()
                .enumerate()
                .map(|(t_index, (_, d_index, a_index))| PmTriple { d_index, a_index, t_index })
                .collect();
            PmOracleOutcome::Feasible(PmMatching { triples })
        }
        Some(Step::OutOfBudget) => PmOracleOutcome::BudgetExhausted,
        Some(Step::Exhausted) | None => PmOracleOutcome::Infeasible,
    }
}

/// Decides a restricted numerical three-dimensional matching instance by
/// trying every pairing of `B = [n]` and `C = [n]` values onto the elements
/// of `A`, requiring `a + b + c = sigma` per triple.
pub fn oracle_rn3dm(instance: &Rn3dmInstance, budget: SearchBudget) -> Rn3dmOracleOutcome {
    let n = instance.n();
    let sigma = instance.sigma();
    let a = instance.a();
    let mut used_b = vec![false; n];
    let mut used_c = vec![false; n];
    let mut triples: Vec<(usize, i64, i64)> = Vec::with_capacity(n);
    let mut meter = Meter::new(budget);

    fn rec(
        a: &[i64],
        sigma: i64,
        used_b: &mut [bool],
        used_c: &mut [bool],
        triples: &mut Vec<(usize, i64, i64)>,
        meter: &mut Meter,
    ) -> Option<Step> {
        if !meter.tick() {
            return Some(Step::OutOfBudget);
        }
        let i = triples.len();
        if i == a.len() {
            return Some(Step::Found);
        }
        let n = a.len();
        for b in 1..=n as i64 {
            if used_b[b as usize - 1] {
                continue;
            }
            for c in 1..=n as i64 {
                if used_c[c as usize - 1] || a[i] + b + c != sigma {
                    continue;
                }
                used_b[b as usize - 1] = true;
                used_c[c as usize - 1] = true;
                triples.push((i, b, c));
                if let Some(done) = rec(a, sigma, used_b, used_c, triples, meter) {
                    return Some(done);
                }
                triples.pop();
                used_b[b as usize - 1] = false;
                used_c[c as usize - 1] = false;
            }
        }
        None
    }

    match rec(a, sigma, &mut used_b, &mut used_c, &mut triples, &mut meter) {
        Some(Step::Found) => Rn3dmOracleOutcome::Feasible(Rn3dmMatching { triples }),
        Some(Step::OutOfBudget) => Rn3dmOracleOutcome::BudgetExhausted,
        _ => Rn3dmOracleOutcome::Infeasible,
    }
}

/// Decides an inequality numerical three-dimensional matching instance:
/// every `a` is paired with one `b` in `[n]` and one target, requiring
/// `a + b >= t` per triple.
pub fn oracle_in3dm(instance: &In3dmInstance, budget: SearchBudget) -> In3dmOracleOutcome {
    let n = instance.n();
    let a = instance.a();
    let t = instance.t();
    let mut used_b = vec![false; n];
    let mut used_t = vec![false; n];
    let mut triples: Vec<(usize, i64, usize)> = Vec::with_capacity(n);
    let mut meter = Meter::new(budget);

    fn rec(
        a: &[i64],
        t: &[i64],
        used_b: &mut [bool],
        used_t: &mut [bool],
        triples: &mut Vec<(usize, i64, usize)>,
        meter: &mut Meter,
    ) -> Option<Step> {
        if !meter.tick() {
            return Some(Step::OutOfBudget);
        }
        let i = triples.len();
        if i == a.len() {
            return Some(Step::Found);
        }
        for b in 1..=a.len() as i64 {
            if used_b[b as usize - 1] {
                continue;
            }
            for t_index in 0..t.len() {
                if used_t[t_index] || a[i] + b < t[t_index] {
                    continue;
                }
                used_b[b as usize - 1] = true;
                used_t[t_index] = true;
                triples.push((i, b, t_index));
                if let Some(done) = rec(a, t, used_b, used_t, triples, meter) {
                    return Some(done);
                }
                triples.pop();
                used_b[b as usize - 1] = false;
                used_t[t_index] = false;
            }
        }
        None
    }

    match rec(a, t, &mut used_b, &mut used_t, &mut triples, &mut meter) {
        Some(Step::Found) => In3dmOracleOutcome::Feasible(In3dmMatching { triples }),
        Some(Step::OutOfBudget) => In3dmOracleOutcome::BudgetExhausted,
        _ => In3dmOracleOutcome::Infeasible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{verify_kvisits, verify_var_kvisits};

    fn inst(d: &[i64], k: usize) -> KVisitsInstance {
        KVisitsInstance::new(d.to_vec(), k).unwrap()
    }

    #[test]
    fn decides_small_two_visit_instances() {
        let out = oracle_kvisits(&inst(&[2, 2], 2), SearchBudget::default());
        let schedule = out.schedule().expect("feasible");
        assert!(verify_kvisits(&inst(&[2, 2], 2), schedule).ok());

        assert_eq!(oracle_kvisits(&inst(&[2, 2, 4, 4], 2), SearchBudget::default()), OracleOutcome::Infeasible);
        assert_eq!(oracle_kvisits(&inst(&[2, 2, 4, 4], 2), SearchBudget::new(3)), OracleOutcome::BudgetExhausted);
    }

    #[test]
    fn enumeration_is_exact_and_lexicographic() {
        let instance = inst(&[2, 2], 2);
        let mut found = Vec::new();
        let outcome = oracle_enumerate_kvisits(&instance, SearchBudget::default(), &mut |s| {
            found.push(s.entries().to_vec());
            true
        });
        assert_eq!(outcome, EnumerationOutcome::Complete);
        assert_eq!(found, vec![vec![1, 2, 1, 2], vec![2, 1, 2, 1]]);

        let mut count = 0;
        let outcome = oracle_enumerate_kvisits(&instance, SearchBudget::default(), &mut |_| {
            count += 1;
            false
        });
        assert_eq!(outcome, EnumerationOutcome::Stopped);
        assert_eq!(count, 1);
    }

    #[test]
    fn var_k_oracle_respects_occurrence_deadlines() {
        let var = VarKVisitsInstance::new(vec![vec![1, 4], vec![2, 4]], 2).unwrap();
        let out = oracle_var_kvisits(&var, SearchBudget::default());
        let schedule = out.schedule().expect("feasible");
        assert!(verify_var_kvisits(&var, schedule).ok());

        let var = VarKVisitsInstance::new(vec![vec![1, 1], vec![2, 2]], 2).unwrap();
        assert_eq!(oracle_var_kvisits(&var, SearchBudget::default()), OracleOutcome::Infeasible);
    }

    #[test]
    fn pm_oracle_matches_worked_example() {
        let instance = PositionMatchingInstance::new(
            vec![6, 7, 8, 8, 15, 15],
            vec![5, 6, 7, 8, 14, 15],
            vec![12, 13, 14, 15, 20, 28],
        )
        .unwrap();
        let out = oracle_pm(&instance, SearchBudget::default());
        match out {
            PmOracleOutcome::Feasible(m) => {
                assert!(crate::pm::verify_matching(&instance, &m).ok());
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn n3dm_oracles_decide_tiny_instances() {
        let rn = Rn3dmInstance::new(vec![2, 2], 5).unwrap();
        let out = oracle_rn3dm(&rn, SearchBudget::default());
        match out {
            Rn3dmOracleOutcome::Feasible(m) => {
                let mut bs: Vec<i64> = m.triples.iter().map(|t| t.1).collect();
                let mut cs: Vec<i64> = m.triples.iter().map(|t| t.2).collect();
                bs.sort_unstable();
                cs.sort_unstable();
                assert_eq!(bs, vec![1, 2]);
                assert_eq!(cs, vec![1, 2]);
                for &(i, b, c) in &m.triples {
                    assert_eq!(rn.a()[i] + b + c, 5);
                }
            }
            other => panic!("expected feasible, got {other:?}"),
        }

        // {1,5} with sigma 6: the element 1 needs b + c = 5 > 4.
        let rn = Rn3dmInstance::new(vec![1, 5], 6).unwrap();
        assert!(!oracle_rn3dm(&rn, SearchBudget::default()).is_feasible());

        let in3 = In3dmInstance::new(vec![2, 2], vec![3, 4]).unwrap();
        assert!(oracle_in3dm(&in3, SearchBudget::default()).is_feasible());
        let in3 = In3dmInstance::new(vec![2, 2], vec![3, 7]).unwrap();
        assert!(!oracle_in3dm(&in3, SearchBudget::default()).is_feasible());
    }
}
