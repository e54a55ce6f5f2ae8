//! The Position Matching kernel.
//!
//! An instance is a triple `(D, A, T)` where `D` is a non-decreasing sequence
//! of deadlines, `A` is its discretized sequence (re-validated, never
//! trusted) and `T` is a set of distinct target positions. A solution matches
//! every `d` with one position `a` and one target `t` such that `d >= a` and
//! `d + a >= t`. In the two-visit solver, `a` is the primary position a
//! deadline is placed at, `d + a` its induced deadline and `t` the gap its
//! secondary visit must cover.
//!
//! Four solvers are provided: three near-linear ones for the structured
//! cases that arise per cluster (all deadlines distinct, all equal, exactly
//! two values) and an exhaustive one, [`solve_exact`], that is exponential
//! only in the instance size — which, per cluster, is the natural
//! fixed-parameter budget.

use crate::verify::{Verdict, Violation, ViolationReason};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PmError {
    #[error("instance must contain at least one triple slot")]
    Empty,
    #[error("D, A and T must have one length, got {d}/{a}/{t}")]
    SizeMismatch { d: usize, a: usize, t: usize },
    #[error("value {value} must be positive")]
    NonPositiveValue { value: i64 },
    #[error("deadlines must be non-decreasing (position {position})")]
    DeadlinesNotSorted { position: usize },
    #[error("A is not the discretized sequence of D (first mismatch at index {index}: got {got}, expected {expected})")]
    NotDiscretizedSequence { index: usize, got: i64, expected: i64 },
    #[error("targets contain {value} more than once")]
    DuplicateTargets { value: i64 },
    #[error("solver requires pairwise distinct deadlines")]
    PreconditionNotDistinct,
    #[error("solver requires all deadlines equal")]
    PreconditionNotSingleValue,
    #[error("solver requires exactly two distinct deadline values")]
    PreconditionNotTwoValues,
}

/// A validated Position Matching instance. Targets are stored sorted
/// ascending; `D` and `A` keep their (sorted) input order, index-aligned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionMatchingInstance {
    deadlines: Vec<i64>,
    positions: Vec<i64>,
    targets: Vec<i64>,
}

impl PositionMatchingInstance {
    pub fn new(deadlines: Vec<i64>, positions: Vec<i64>, mut targets: Vec<i64>) -> Result<Self, PmError> {
        if deadlines.is_empty() {
            return Err(PmError::Empty);
        }
        if deadlines.len() != positions.len() || deadlines.len() != targets.len() {
            return Err(PmError::SizeMismatch {
                d: deadlines.len(),
                a: positions.len(),
                t: targets.len(),
            });
        }
        for &v in deadlines.iter().chain(positions.iter()).chain(targets.iter()) {
            if v <= 0 {
                return Err(PmError::NonPositiveValue { value: v });
            }
        }
        if let Some(i) = (1..deadlines.len()).find(|&i| deadlines[i] < deadlines[i - 1]) {
            return Err(PmError::DeadlinesNotSorted { position: i + 1 });
        }
        // A is recomputed from D rather than trusted.
        let mut expected = deadlines.clone();
        for i in (0..deadlines.len().saturating_sub(1)).rev() {
            expected[i] = (expected[i + 1] - 1).min(deadlines[i]);
        }
        if let Some(i) = (0..positions.len()).find(|&i| positions[i] != expected[i]) {
            return Err(PmError::NotDiscretizedSequence {
                index: i,
                got: positions[i],
                expected: expected[i],
            });
        }
        targets.sort_unstable();
        if let Some(w) = targets.windows(2).find(|w| w[0] == w[1]) {
            return Err(PmError::DuplicateTargets { value: w[0] });
        }
        Ok(Self { deadlines, positions, targets })
    }

    pub fn n(&self) -> usize {
        self.deadlines.len()
    }

    pub fn deadlines(&self) -> &[i64] {
        &self.deadlines
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    /// Targets, sorted ascending.
    pub fn targets(&self) -> &[i64] {
        &self.targets
    }
}

/// One matched triple, as 0-based indices into `D`, `A` and the (sorted)
/// target list of the instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PmTriple {
    pub d_index: usize,
    pub a_index: usize,
    pub t_index: usize,
}

/// A claimed solution: one triple per index of the instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmMatching {
    pub triples: Vec<PmTriple>,
}

impl PmMatching {
    /// The matched sums `d + a`, sorted ascending.
    pub fn sorted_sums(&self, instance: &PositionMatchingInstance) -> Vec<i64> {
        let mut sums: Vec<i64> = self
            .triples
            .iter()
            .map(|t| instance.deadlines()[t.d_index] + instance.positions()[t.a_index])
            .collect();
        sums.sort_unstable();
        sums
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PmOutcome {
    Feasible(PmMatching),
    Infeasible,
}

impl PmOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, PmOutcome::Feasible(_))
    }

    pub fn matching(&self) -> Option<&PmMatching> {
        match self {
            PmOutcome::Feasible(m) => Some(m),
            PmOutcome::Infeasible => None,
        }
    }
}

/// Checks a claimed matching: it must use every `d`, `a` and `t` index
/// exactly once, and each triple must satisfy `d >= a` and `d + a >= t`.
///
/// The verdict reuses the schedule-violation record with this reading:
/// `BadLength` — wrong triple count; `IndexOutOfRange` — a triple index out
/// of bounds (`node` carries it 1-based); `WrongVisitCount` — an index used
/// more than once (`node` is 1-based, `occurrence_index` the use count);
/// `DeadlineExceeded` — a violated constraint, scanned in ascending order of
/// the matched position. For `d < a` the record holds
/// `occurrence_index = 1`, `position = a`, `allowed_by = d`; for
/// `d + a < t` it holds `occurrence_index = 2`, `position = t`,
/// `allowed_by = d + a`.
pub fn verify_matching(instance: &PositionMatchingInstance, matching: &PmMatching) -> Verdict {
    let n = instance.n();
    if matching.triples.len() != n {
        return Verdict::flag(Violation {
            reason: ViolationReason::BadLength,
            node: 0,
            occurrence_index: 0,
            position: matching.triples.len() as i64,
            allowed_by: n as i64,
        });
    }
    let projections: [fn(&PmTriple) -> usize; 3] =
        [|t| t.d_index, |t| t.a_index, |t| t.t_index];
    for project in projections {
        let mut counts = vec![0usize; n];
        let mut out_of_bounds = None;
        for t in &matching.triples {
            let idx = project(t);
            if idx >= n {
                out_of_bounds.get_or_insert(idx);
            } else {
                counts[idx] += 1;
            }
        }
        if let Some(idx) = out_of_bounds {
            return Verdict::flag(Violation {
                reason: ViolationReason::IndexOutOfRange,
                node: idx + 1,
                occurrence_index: 0,
                position: 0,
                allowed_by: n as i64,
            });
        }
        if let Some(idx) = counts.iter().position(|&c| c > 1) {
            return Verdict::flag(Violation {
                reason: ViolationReason::WrongVisitCount,
                node: idx + 1,
                occurrence_index: counts[idx],
                position: 0,
                allowed_by: 1,
            });
        }
    }
    let mut order: Vec<&PmTriple> = matching.triples.iter().collect();
    order.sort_by_key(|t| instance.positions()[t.a_index]);
    for t in order {
        let d = instance.deadlines()[t.d_index];
        let a = instance.positions()[t.a_index];
        let target = instance.targets()[t.t_index];
        if d < a {
            return Verdict::flag(Violation {
                reason: ViolationReason::DeadlineExceeded,
                node: t.d_index + 1,
                occurrence_index: 1,
                position: a,
                allowed_by: d,
            });
        }
        if d + a < target {
            return Verdict::flag(Violation {
                reason: ViolationReason::DeadlineExceeded,
                node: t.d_index + 1,
                occurrence_index: 2,
                position: target,
                allowed_by: d + a,
            });
        }
    }
    Verdict::clean()
}

/// `sums` can cover `targets` (both sorted ascending, equal length) exactly
/// when they dominate pointwise. Sufficiency is the standard exchange
/// argument; necessity because any perfect `>=`-matching sorted by target
/// yields such a pointwise witness.
fn sorted_domination(sums: &[i64], targets: &[i64]) -> bool {
    debug_assert_eq!(sums.len(), targets.len());
    sums.iter().zip(targets).all(|(s, t)| s >= t)
}

/// Pairs `(sum, d_index, a_index)` with the sorted targets: the j-th
/// smallest sum takes the j-th smallest target, ties on sums broken by
/// deadline index then position index. Returns `None` when domination (and
/// hence any assignment) fails.
fn assign_targets(mut pairs: Vec<(i64, usize, usize)>, targets: &[i64]) -> Option<PmMatching> {
    pairs.sort_unstable();
    let sums: Vec<i64> = pairs.iter().map(|p| p.0).collect();
    if !sorted_domination(&sums, targets) {
        return None;
    }
    Some(PmMatching {
        triples: pairs
            .into_iter()
            .enumerate()
            .map(|(t_index, (_, d_index, a_index))| PmTriple { d_index, a_index, t_index })
            .collect(),
    })
}

/// Solver for pairwise distinct deadlines. `D` strictly increasing forces
/// `A = D` and the identity placement (the smallest deadline can only take
/// the smallest position, and so on), so feasibility is exactly the sums
/// `2*d_i` dominating the sorted targets.
pub fn solve_distinct(instance: &PositionMatchingInstance) -> Result<PmOutcome, PmError> {
    let d = instance.deadlines();
    if d.windows(2).any(|w| w[0] == w[1]) {
        return Err(PmError::PreconditionNotDistinct);
    }
    debug_assert_eq!(d, instance.positions());
    let pairs = d.iter().enumerate().map(|(i, &v)| (2 * v, i, i)).collect();
    Ok(match assign_targets(pairs, instance.targets()) {
        Some(m) => PmOutcome::Feasible(m),
        None => PmOutcome::Infeasible,
    })
}

/// Solver for a single repeated deadline value `x`: every pairing of copies
/// with positions yields the same sum multiset `{x + a_i}`, so only
/// domination against the targets matters.
pub fn solve_single_value(instance: &PositionMatchingInstance) -> Result<PmOutcome, PmError> {
    let d = instance.deadlines();
    if d.windows(2).any(|w| w[0] != w[1]) {
        return Err(PmError::PreconditionNotSingleValue);
    }
    let x = d[0];
    let pairs = instance.positions().iter().enumerate().map(|(i, &a)| (x + a, i, i)).collect();
    Ok(match assign_targets(pairs, instance.targets()) {
        Some(m) => PmOutcome::Feasible(m),
        None => PmOutcome::Infeasible,
    })
}

/// Solver for exactly two distinct deadline values `x < y` (`m` copies of
/// `x`). Two shapes arise:
///
/// * `A` breaks into two clusters at the value boundary. The `n - m`
///   positions of the upper cluster all exceed `x`, so the `y`-copies are
///   forced onto them and each side reduces to the single-value case, the
///   lower one taking the `m` smallest targets (every lower-cluster sum is
///   below every upper-cluster sum).
/// * `A` is one consecutive run. Positions are scanned ascending. While both
///   values remain, the smallest unmatched target `t` is compared against
///   `x + a`: if it fits, `(x, a, t)` is matched — `x + a` is the least sum
///   any remaining pair can produce, so giving `t` the cheapest pair is
///   safe. Otherwise `a` is useless to every `x`-copy and must carry a `y`;
///   it takes the *largest* still-unmatched target `<= y + a` (safe by an
///   exchange argument; located with a monotone pointer plus
///   path-compressed skips over consumed entries). If even `y + a` misses
///   the smallest open target, or an `x`-copy survives past position `x`,
///   the instance is infeasible. Once one value class runs out the rest is
///   a single-value tail.
pub fn solve_two_values(instance: &PositionMatchingInstance) -> Result<PmOutcome, PmError> {
    let d = instance.deadlines();
    let a = instance.positions();
    let t = instance.targets();
    let n = instance.n();
    let x = d[0];
    let y = d[n - 1];
    if x == y {
        return Err(PmError::PreconditionNotTwoValues);
    }
    let m = d.iter().take_while(|&&v| v == x).count();
    if d[m..].iter().any(|&v| v != y) {
        return Err(PmError::PreconditionNotTwoValues);
    }

    if a[m] != a[m - 1] + 1 {
        // Two clusters: solve both single-value halves independently.
        let lower = single_value_tail(x, 0, a, 0..m, &collect_indices(m), t);
        let upper = single_value_tail(y, m, a, m..n, &(m..n).collect::<Vec<_>>(), t);
        return Ok(match (lower, upper) {
            (Some(mut lo), Some(mut up)) => {
                lo.append(&mut up);
                PmOutcome::Feasible(PmMatching { triples: lo })
            }
            _ => PmOutcome::Infeasible,
        });
    }

    // Single consecutive run.
    let mut used_t = vec![false; n];
    // down[j] skips toward the nearest unconsumed index <= j (path-compressed).
    let mut down: Vec<usize> = (0..n).collect();
    let mut lo = 0usize; // smallest unconsumed target index
    let mut hi_count = 0usize; // #targets with value <= y + a (monotone in a)
    let mut xi = 0usize;
    let mut yi = 0usize;
    let mut triples = Vec::with_capacity(n);
    for pos in 0..n {
        while lo < n && used_t[lo] {
            lo += 1;
        }
        let x_left = m - xi;
        let y_left = (n - m) - yi;
        if x_left == 0 || y_left == 0 {
            let (v, d_off) = if x_left == 0 { (y, m + yi) } else { (x, xi) };
            let rest: Vec<usize> = (lo..n).filter(|&j| !used_t[j]).collect();
            debug_assert_eq!(rest.len(), n - pos);
            match single_value_tail(v, d_off, a, pos..n, &rest, t) {
                Some(mut tail) => {
                    triples.append(&mut tail);
                    return Ok(PmOutcome::Feasible(PmMatching { triples }));
                }
                None => return Ok(PmOutcome::Infeasible),
            }
        }
        let av = a[pos];
        if av > x {
            // Remaining positions only grow; the surviving x-copies can
            // never be placed.
            return Ok(PmOutcome::Infeasible);
        }
        if x + av >= t[lo] {
            triples.push(PmTriple { d_index: xi, a_index: pos, t_index: lo });
            xi += 1;
            consume(&mut used_t, &mut down, lo);
        } else {
            if y + av < t[lo] {
                // This position cannot satisfy any open target.
                return Ok(PmOutcome::Infeasible);
            }
            while hi_count < n && t[hi_count] <= y + av {
                hi_count += 1;
            }
            let j = resolve_down(&used_t, &mut down, hi_count - 1);
            debug_assert!(j >= lo && !used_t[j] && t[j] <= y + av);
            triples.push(PmTriple { d_index: m + yi, a_index: pos, t_index: j });
            yi += 1;
            consume(&mut used_t, &mut down, j);
        }
    }
    Ok(PmOutcome::Feasible(PmMatching { triples }))
}

fn collect_indices(m: usize) -> Vec<usize> {
    (0..m).collect()
}

fn consume(used: &mut [bool], down: &mut [usize], j: usize) {
    used[j] = true;
    down[j] = j.saturating_sub(1);
}

fn resolve_down(used: &[bool], down: &mut [usize], start: usize) -> usize {
    let mut j = start;
    while used[j] {
        j = down[j];
    }
    // Path compression: everything on the walk now points at the answer.
    let mut w = start;
    while used[w] {
        let next = down[w];
        down[w] = j;
        w = next;
    }
    j
}

/// Matches value `v` (copies `d_off..`) with positions `a[a_range]` against
/// the target indices in `t_indices` (ascending), by identity: sums and
/// targets are both ascending. `None` when a pair breaks `d >= a` or
/// domination fails.
fn single_value_tail(
    v: i64,
    d_off: usize,
    a: &[i64],
    a_range: std::ops::Range<usize>,
    t_indices: &[usize],
    t: &[i64],
) -> Option<Vec<PmTriple>> {
    debug_assert_eq!(a_range.len(), t_indices.len());
    let mut out = Vec::with_capacity(t_indices.len());
    for (i, (a_index, &t_index)) in a_range.zip(t_indices).enumerate() {
        let av = a[a_index];
        if v < av || v + av < t[t_index] {
            return None;
        }
        out.push(PmTriple { d_index: d_off + i, a_index, t_index });
    }
    Some(out)
}

/// Exhaustive solver: assigns deadlines to positions `a_1 < a_2 < ...` in
/// order by depth-first search, then settles targets by sorted domination.
///
/// Search-space controls, all verdict-preserving:
/// * equal deadline values are interchangeable — only the first unused copy
///   of each distinct value is branched on;
/// * a deadline below the current position can never be placed later, so
///   such a branch dies immediately;
/// * a partial assignment is cut as soon as its sums, sorted, fail to
///   dominate the equally many smallest targets (adding further sums only
///   pushes order statistics down, so the defect cannot heal).
pub fn solve_exact(instance: &PositionMatchingInstance) -> PmOutcome {
    let d = instance.deadlines();
    let a = instance.positions();
    let t = instance.targets();
    let n = instance.n();

    // Distinct value classes of D: (value, first index, copies).
    let mut classes: Vec<(i64, usize, usize)> = Vec::new();
    for (i, &v) in d.iter().enumerate() {
        match classes.last_mut() {
            Some(c) if c.0 == v => c.2 += 1,
            _ => classes.push((v, i, 1)),
        }
    }
    let mut used = vec![0usize; classes.len()];
    let mut chosen: Vec<usize> = Vec::with_capacity(n); // class index per position
    let mut sums: Vec<i64> = Vec::with_capacity(n); // kept sorted
    let mut pos = 0usize;
    let mut next_class = 0usize;
    loop {
        let mut placed = false;
        // If the smallest unused value already trails the current position,
        // it can never be matched: no candidate at this frame survives.
        let dead = classes
            .iter()
            .zip(&used)
            .find(|(c, &u)| u < c.2)
            .is_some_and(|(c, _)| c.0 < a[pos]);
        if !dead {
            while next_class < classes.len() {
                let (value, _, copies) = classes[next_class];
                if used[next_class] < copies && value >= a[pos] {
                    let sum = value + a[pos];
                    let rank = sums.partition_point(|&s| s <= sum);
                    sums.insert(rank, sum);
                    if sorted_domination(&sums, &t[..sums.len()]) {
                        used[next_class] += 1;
                        chosen.push(next_class);
                        placed = true;
                        break;
                    }
                    sums.remove(rank);
                }
                next_class += 1;
            }
        }
        if placed {
            pos += 1;
            if pos == n {
                return PmOutcome::Feasible(matching_from_classes(&classes, &chosen, a, t));
            }
            next_class = 0;
        } else {
            if pos == 0 {
                return PmOutcome::Infeasible;
            }
            pos -= 1;
            let ci = chosen.pop().expect("one chosen class per placed position");
            used[ci] -= 1;
            let sum = classes[ci].0 + a[pos];
            let rank = sums.partition_point(|&s| s < sum);
            debug_assert_eq!(sums[rank], sum);
            sums.remove(rank);
            next_class = ci + 1;
        }
    }
}

fn matching_from_classes(
    classes: &[(i64, usize, usize)],
    chosen: &[usize],
    a: &[i64],
    t: &[i64],
) -> PmMatching {
    let mut taken = vec![0usize; classes.len()];
    let mut pairs = Vec::with_capacity(chosen.len());
    for (a_index, &ci) in chosen.iter().enumerate() {
        let (value, first, _) = classes[ci];
        let d_index = first + taken[ci];
        taken[ci] += 1;
        pairs.push((value + a[a_index], d_index, a_index));
    }
    assign_targets(pairs, t).expect("domination held at every step of the search")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::KVisitsInstance;
    use proptest::prelude::*;

    fn pm(d: &[i64], t: &[i64]) -> PositionMatchingInstance {
        let inst = KVisitsInstance::new(d.to_vec(), 2).unwrap();
        PositionMatchingInstance::new(d.to_vec(), inst.discretize().values().to_vec(), t.to_vec())
            .unwrap()
    }

    #[test]
    fn validation_recomputes_discretized_sequence() {
        let ok = PositionMatchingInstance::new(
            vec![6, 7, 8, 8, 15, 15],
            vec![5, 6, 7, 8, 14, 15],
            vec![12, 13, 14, 15, 20, 28],
        );
        assert!(ok.is_ok());

        let bad = PositionMatchingInstance::new(
            vec![6, 7, 8, 8, 15, 15],
            vec![5, 6, 7, 8, 14, 14],
            vec![12, 13, 14, 15, 20, 28],
        );
        assert_eq!(
            bad.unwrap_err(),
            PmError::NotDiscretizedSequence { index: 5, got: 14, expected: 15 }
        );

        let dup = PositionMatchingInstance::new(vec![5, 5, 9], vec![4, 5, 9], vec![5, 5, 9]);
        assert_eq!(dup.unwrap_err(), PmError::DuplicateTargets { value: 5 });

        let sizes = PositionMatchingInstance::new(vec![2, 3], vec![2, 3], vec![4]);
        assert_eq!(sizes.unwrap_err(), PmError::SizeMismatch { d: 2, a: 2, t: 1 });
    }

    #[test]
    fn verify_matching_accepts_worked_example() {
        let inst = pm(&[6, 7, 8, 8, 15, 15], &[12, 13, 14, 15, 20, 28]);
        // Pairs (6,6),(8,5),(7,7),(8,8),(15,14),(15,15): sums 12,13,14,16,29,30.
        let pairs = vec![(12i64, 0usize, 1usize), (13, 2, 0), (14, 1, 2), (16, 3, 3), (29, 4, 4), (30, 5, 5)];
        let matching = assign_targets(pairs, inst.targets()).unwrap();
        assert!(verify_matching(&inst, &matching).ok());
        assert_eq!(matching.sorted_sums(&inst), vec![12, 13, 14, 16, 29, 30]);
    }

    #[test]
    fn verify_matching_flags_defects() {
        let inst = pm(&[2, 4], &[3, 6]);
        // d=2 on position 4 violates d >= a.
        let m = PmMatching {
            triples: vec![
                PmTriple { d_index: 0, a_index: 1, t_index: 0 },
                PmTriple { d_index: 1, a_index: 0, t_index: 1 },
            ],
        };
        let v = verify_matching(&inst, &m);
        let viol = *v.violation().unwrap();
        assert_eq!(viol.reason, ViolationReason::DeadlineExceeded);
        assert_eq!((viol.position, viol.allowed_by), (4, 2));

        // Reusing a target index is not a perfect matching.
        let m = PmMatching {
            triples: vec![
                PmTriple { d_index: 0, a_index: 0, t_index: 1 },
                PmTriple { d_index: 1, a_index: 1, t_index: 1 },
            ],
        };
        assert_eq!(verify_matching(&inst, &m).violation().unwrap().reason, ViolationReason::WrongVisitCount);
    }

    #[test]
    fn distinct_solver_uses_identity_placement() {
        let inst = pm(&[22, 23], &[21, 24]);
        let out = solve_distinct(&inst).unwrap();
        assert!(out.is_feasible());
        assert!(verify_matching(&inst, out.matching().unwrap()).ok());

        // 2*2=4 cannot reach target 5 once 3 takes the smaller one.
        let inst = pm(&[2, 3], &[5, 6]);
        assert_eq!(solve_distinct(&inst).unwrap(), PmOutcome::Infeasible);

        assert_eq!(solve_distinct(&pm(&[4, 4], &[1, 2])), Err(PmError::PreconditionNotDistinct));
    }

    #[test]
    fn single_value_solver_checks_domination_only() {
        let inst = pm(&[11, 11], &[9, 12]);
        assert!(solve_single_value(&inst).unwrap().is_feasible());

        let inst = pm(&[11, 11], &[22, 23]);
        assert_eq!(solve_single_value(&inst).unwrap(), PmOutcome::Infeasible);

        assert_eq!(solve_single_value(&pm(&[2, 3], &[1, 2])), Err(PmError::PreconditionNotSingleValue));
    }

    #[test]
    fn two_values_single_run_examples() {
        // x-copies die at position 3 > 2 after both y-copies are spent.
        let inst = pm(&[2, 2, 4, 4], &[5, 6, 7, 8]);
        assert_eq!(solve_two_values(&inst).unwrap(), PmOutcome::Infeasible);

        let inst = pm(&[2, 2, 4, 4], &[3, 4, 5, 6]);
        let out = solve_two_values(&inst).unwrap();
        assert!(out.is_feasible());
        assert!(verify_matching(&inst, out.matching().unwrap()).ok());

        // The y-branch must pick the largest reachable target, not the
        // smallest. D = <4,4,6,6,6>, A = <2,3,4,5,6>, T = {6,8,9,11,12}:
        // after x takes 6 at position 2, the y at position 3 reaches both
        // 8 and 9 and must claim 9 — the last x-copy (sums at most 8) is
        // the only other cover for 8, while nothing else but a y can reach
        // 9 this early. Claiming 8 instead strands that x-copy.
        let inst = pm(&[4, 4, 6, 6, 6], &[6, 8, 9, 11, 12]);
        let out = solve_two_values(&inst).unwrap();
        assert!(out.is_feasible(), "largest-satisfied-target rule");
        assert!(verify_matching(&inst, out.matching().unwrap()).ok());

        // The sole x-position (7) cannot reach the smallest target.
        let inst = pm(&[7, 10, 10, 10], &[15, 16, 17, 18]);
        assert_eq!(solve_two_values(&inst).unwrap(), PmOutcome::Infeasible);
    }

    #[test]
    fn two_values_split_clusters() {
        // D = <2,2,8,8> discretizes to <1,2,7,8>: two runs.
        let inst = pm(&[2, 2, 8, 8], &[3, 4, 10, 16]);
        let out = solve_two_values(&inst).unwrap();
        assert!(out.is_feasible());
        assert!(verify_matching(&inst, out.matching().unwrap()).ok());

        let inst = pm(&[2, 2, 8, 8], &[3, 5, 10, 16]);
        assert_eq!(solve_two_values(&inst).unwrap(), PmOutcome::Infeasible);

        assert_eq!(solve_two_values(&pm(&[4, 4], &[1, 2])), Err(PmError::PreconditionNotTwoValues));
        assert_eq!(solve_two_values(&pm(&[2, 3, 9], &[1, 2, 3])), Err(PmError::PreconditionNotTwoValues));
    }

    #[test]
    fn exact_solver_reproduces_worked_sums() {
        let inst = pm(&[6, 7, 8, 8, 15, 15], &[12, 13, 14, 15, 20, 28]);
        let out = solve_exact(&inst);
        let matching = out.matching().expect("worked example is feasible");
        assert!(verify_matching(&inst, matching).ok());
        assert_eq!(matching.sorted_sums(&inst), vec![12, 13, 14, 16, 29, 30]);

        assert_eq!(solve_exact(&pm(&[2, 2, 4, 4], &[5, 6, 7, 8])), PmOutcome::Infeasible);
    }

    /// Brute-force reference for the domination lemma: try every bijection.
    fn bijection_matching_exists(sums: &[i64], targets: &[i64]) -> bool {
        fn rec(sums: &[i64], targets: &[i64], used: &mut [bool], i: usize) -> bool {
            if i == targets.len() {
                return true;
            }
            (0..sums.len()).any(|j| {
                if used[j] || sums[j] < targets[i] {
                    return false;
                }
                used[j] = true;
                let ok = rec(sums, targets, used, i + 1);
                used[j] = false;
                ok
            })
        }
        rec(sums, targets, &mut vec![false; sums.len()], 0)
    }

    proptest! {
        #[test]
        fn domination_matches_bijection_search(
            mut sums in proptest::collection::vec(1i64..40, 1..=7),
            mut targets in proptest::collection::vec(1i64..40, 1..=7),
        ) {
            let n = sums.len().min(targets.len());
            sums.truncate(n);
            targets.truncate(n);
            sums.sort_unstable();
            targets.sort_unstable();
            prop_assert_eq!(sorted_domination(&sums, &targets), bijection_matching_exists(&sums, &targets));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]
        #[test]
        fn specialized_solvers_agree_with_exact(
            seed_values in proptest::collection::vec(1i64..14, 1..=8),
            shape in 0usize..3,
            t_raw in proptest::collection::vec(1i64..40, 8),
        ) {
            let n = seed_values.len();
            // Derive a deadline multiset of the requested shape.
            let mut d: Vec<i64> = match shape {
                0 => {
                    // Offset by n so the discretized run stays positive.
                    let v = seed_values[0] + n as i64;
                    vec![v; n]
                }
                1 => {
                    let x = seed_values[0].min(10);
                    let y = x + 1 + seed_values.last().unwrap() % 4;
                    seed_values.iter().enumerate().map(|(i, _)| if i < 1 + n / 2 { x } else { y }).collect()
                }
                _ => {
                    let mut v: Vec<i64> = seed_values.iter().scan(0i64, |acc, &s| {
                        *acc += s;
                        Some(*acc)
                    }).collect();
                    v.dedup();
                    v
                }
            };
            d.sort_unstable();
            let n = d.len();
            let inst = KVisitsInstance::new(d.clone(), 2).unwrap();
            let a = inst.discretize().values().to_vec();
            prop_assume!(a[0] >= 1);
            let mut t: Vec<i64> = t_raw.into_iter().take(n).collect();
            prop_assume!(t.len() == n);
            t.sort_unstable();
            t.dedup();
            prop_assume!(t.len() == n);
            let inst = PositionMatchingInstance::new(d.clone(), a, t).unwrap();

            let special = match shape {
                0 => solve_single_value(&inst).unwrap(),
                1 => {
                    if d[0] == d[n - 1] { return Ok(()); }
                    solve_two_values(&inst).unwrap()
                }
                _ => solve_distinct(&inst).unwrap(),
            };
            let exact = solve_exact(&inst);
            prop_assert_eq!(special.is_feasible(), exact.is_feasible());
            if let Some(m) = special.matching() {
                prop_assert!(verify_matching(&inst, m).ok());
            }
            if let Some(m) = exact.matching() {
                prop_assert!(verify_matching(&inst, m).ok());
            }
        }
    }
}
