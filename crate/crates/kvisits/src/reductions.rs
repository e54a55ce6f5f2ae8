//! Instance transformers connecting numerical three-dimensional matching,
//! position matching, and visit scheduling.
//!
//! The chain runs: balanced matching with a common triple sum (`Rn3dmInstance`)
//! → matching against explicit targets with an inequality (`In3dmInstance`)
//! → normalization into a fixed value range → `PositionMatchingInstance`
//! padded with interchangeable dummies → a 2-visits instance whose schedule
//! structure simulates the matching → per-occurrence deadline instances and
//! threshold pinwheel instances. Every step preserves the yes/no verdict;
//! where the underlying argument is constructive, a solution map is provided
//! alongside the instance map.

use crate::instances::{InstanceError, KVisitsInstance, Schedule, VarKVisitsInstance};
use crate::pm::{PmMatching, PmTriple, PositionMatchingInstance};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("instance must be non-empty")]
    EmptyInput,
    #[error("value {value} at index {index} must be positive")]
    NonPositiveValue { index: usize, value: i64 },
    #[error("element sum {total} does not balance: size {n} and triple sum {sigma} require {expected}")]
    UnbalancedSum { total: i64, n: usize, sigma: i64, expected: i64 },
    #[error("triple sum {sigma} must exceed the size {n} for targets to stay positive")]
    NonPositiveTarget { sigma: i64, n: usize },
    #[error("value spread {spread} exceeds the normalizable limit {limit} for size {n}")]
    RangeTooWide { spread: i64, limit: i64, n: usize },
    #[error("targets must be distinct; {value} repeats")]
    DuplicateTargets { value: i64 },
    #[error("instance is not normalized: {detail}")]
    PreconditionNotNormalized { detail: String },
    #[error("positions must be consecutive integers; index {index} holds {got}, expected {expected}")]
    PreconditionNotConsecutive { index: usize, got: i64, expected: i64 },
    #[error("every target must exceed every position; target {target} <= position {position}")]
    PreconditionTargetsNotAboveA { target: i64, position: i64 },
}

/// Matching instance with elements `A`, both coordinate sets `[n]`, and one
/// triple sum: a solution picks for every element one value from each `[n]`
/// (each value used once) so that every triple sums to `sigma`.
///
/// The balance identity `sum(A) + n(n+1) = n * sigma` is necessary for
/// feasibility and is required at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rn3dmInstance {
    a: Vec<i64>,
    sigma: i64,
}

impl Rn3dmInstance {
    pub fn new(mut a: Vec<i64>, sigma: i64) -> Result<Self, ReductionError> {
        if a.is_empty() {
            return Err(ReductionError::EmptyInput);
        }
        a.sort_unstable();
        if let Some(index) = a.iter().position(|&v| v < 1) {
            return Err(ReductionError::NonPositiveValue { index, value: a[index] });
        }
        let n = a.len();
        let total: i64 = a.iter().sum();
        let expected = n as i64 * sigma - (n as i64) * (n as i64 + 1);
        if total != expected {
            return Err(ReductionError::UnbalancedSum { total, n, sigma, expected });
        }
        Ok(Self { a, sigma })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn sigma(&self) -> i64 {
        self.sigma
    }
}

/// A solution to an [`Rn3dmInstance`]: `(element index, b, c)` triples where
/// the `b`s and `c`s each form a permutation of `[n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rn3dmMatching {
    pub triples: Vec<(usize, i64, i64)>,
}

/// Matching instance with elements `A`, one coordinate set `[n]`, and
/// explicit targets `T`: a solution pairs every element with one `b` in `[n]`
/// and one target (each used once) so that `a + b >= t` per triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct In3dmInstance {
    a: Vec<i64>,
    t: Vec<i64>,
}

impl In3dmInstance {
    pub fn new(mut a: Vec<i64>, mut t: Vec<i64>) -> Result<Self, ReductionError> {
        if a.is_empty() || a.len() != t.len() {
            return Err(ReductionError::EmptyInput);
        }
        a.sort_unstable();
        t.sort_unstable();
        for (index, &v) in a.iter().chain(t.iter()).enumerate() {
            if v < 1 {
                return Err(ReductionError::NonPositiveValue { index: index % a.len(), value: v });
            }
        }
        Ok(Self { a, t })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn t(&self) -> &[i64] {
        &self.t
    }
}

/// A solution to an [`In3dmInstance`]: `(element index, b, target index)`
/// triples where the `b`s form a permutation of `[n]` and every target index
/// appears once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct In3dmMatching {
    pub triples: Vec<(usize, i64, usize)>,
}

/// Infinite-schedule instance family emitted for external study: node `i`
/// runs at deadline `d1[i]` until its `thresholds[i]`-th occurrence, then at
/// `d2[i]`. No solver or verifier is provided here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdPinwheelInstance {
    d1: Vec<i64>,
    d2: Vec<i64>,
    thresholds: Vec<i64>,
}

impl ThresholdPinwheelInstance {
    pub fn new(d1: Vec<i64>, d2: Vec<i64>, thresholds: Vec<i64>) -> Result<Self, ReductionError> {
        if d1.is_empty() || d1.len() != d2.len() || d1.len() != thresholds.len() {
            return Err(ReductionError::EmptyInput);
        }
        for (index, &v) in d1.iter().chain(d2.iter()).chain(thresholds.iter()).enumerate() {
            if v < 1 {
                return Err(ReductionError::NonPositiveValue { index: index % d1.len(), value: v });
            }
        }
        Ok(Self { d1, d2, thresholds })
    }

    pub fn n(&self) -> usize {
        self.d1.len()
    }

    pub fn d1(&self) -> &[i64] {
        &self.d1
    }

    pub fn d2(&self) -> &[i64] {
        &self.d2
    }

    pub fn thresholds(&self) -> &[i64] {
        &self.thresholds
    }
}

/// Verdict shortcut available only at the balanced entry point: every triple
/// of a solution sums to exactly `sigma` with both free coordinates in
/// `[n]`, so all elements of a feasible instance lie in a window of width
/// `2n - 2`. A wider instance is infeasible outright — resolving it here is
/// what lets the downstream normalization assume the window. (The analogous
/// claim is false for inequality matching, where oversized elements merely
/// overshoot; there a wide spread is a precondition failure, not a verdict.)
pub fn rn3dm_trivially_infeasible(src: &Rn3dmInstance) -> bool {
    let n = src.n() as i64;
    src.a()[src.n() - 1] - src.a()[0] > 2 * n - 2
}

/// Replaces the second `[n]` coordinate by targets `T = {sigma - i : i in [n]}`:
/// a triple `(a, b, c)` sums to `sigma` exactly when `a + b` reaches the
/// target `sigma - c`, and equal totals on both sides force every inequality
/// tight, so the verdicts coincide.
///
/// The balance identity makes `sigma <= n` impossible for a constructed
/// instance, so the error is defensive only.
pub fn rn3dm_to_in3dm(src: &Rn3dmInstance) -> Result<In3dmInstance, ReductionError> {
    let n = src.n() as i64;
    if src.sigma() <= n {
        return Err(ReductionError::NonPositiveTarget { sigma: src.sigma(), n: src.n() });
    }
    let targets: Vec<i64> = (1..=n).map(|i| src.sigma() - i).collect();
    In3dmInstance::new(src.a().to_vec(), targets)
}

/// Forward solution map of [`rn3dm_to_in3dm`]: `(a, b, c)` becomes
/// `(a, b, sigma - c)`.
pub fn in3dm_matching_from_rn3dm(src: &Rn3dmInstance, matching: &Rn3dmMatching) -> In3dmMatching {
    let n = src.n();
    let triples = matching
        .triples
        .iter()
        .map(|&(a_index, b, c)| {
            // Targets sorted ascending are sigma-n .. sigma-1, so sigma-c
            // sits at index n-c.
            (a_index, b, n - c as usize)
        })
        .collect();
    In3dmMatching { triples }
}

/// Backward solution map of [`rn3dm_to_in3dm`]: valid because equal totals
/// force `a + b = t` in every triple of a solution, pinning `c = sigma - t`.
/// Returns `None` if the matching has a slack triple (impossible for a
/// solution of the mapped instance, defensive otherwise).
pub fn rn3dm_matching_from_in3dm(
    src: &Rn3dmInstance,
    matching: &In3dmMatching,
) -> Option<Rn3dmMatching> {
    let n = src.n();
    let mut triples = Vec::with_capacity(n);
    for &(a_index, b, t_index) in &matching.triples {
        let t = src.sigma() - (n - t_index) as i64;
        if src.a()[a_index] + b != t {
            return None;
        }
        let c = (n - t_index) as i64;
        triples.push((a_index, b, c));
    }
    Some(Rn3dmMatching { triples })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeOutcome {
    Normalized(In3dmInstance),
    /// Some target exceeds the largest achievable pair sum.
    TrivialNo,
    /// Small-target elimination consumed the whole instance; what remains is
    /// the empty (feasible) instance.
    TrivialYes,
}

/// Whether an instance satisfies the value-range contract assumed by
/// [`in3dm_to_pm`]: smallest element exactly `n`, elements below `3n`,
/// targets below `4n` and distinct.
pub fn is_normalized_in3dm(src: &In3dmInstance) -> bool {
    let n = src.n() as i64;
    src.a().first() == Some(&n)
        && src.a().last().is_some_and(|&m| m < 3 * n)
        && src.t().last().is_some_and(|&m| m < 4 * n)
        && src.t().windows(2).all(|w| w[0] < w[1])
}

/// Rewrites an instance into the range contract of [`is_normalized_in3dm`]
/// without changing its verdict.
///
/// Three moves, each verdict-preserving: a target no larger than the
/// smallest element is satisfiable by any pair, so it can be matched with
/// the smallest element and `b = 1` outright (dropping them and shifting the
/// remaining coordinate set down decrements every remaining target); a
/// target larger than `max(A) + n` is unsatisfiable outright; adding one
/// constant to every element and target changes nothing. The value-spread
/// precondition `max(A) - min(A) <= 2n - 2` is re-checked as eliminations
/// shrink `n`.
pub fn in3dm_normalize(src: &In3dmInstance) -> Result<NormalizeOutcome, ReductionError> {
    if let Some(w) = src.t().windows(2).find(|w| w[0] == w[1]) {
        return Err(ReductionError::DuplicateTargets { value: w[0] });
    }
    let mut a = src.a().to_vec();
    let mut t = src.t().to_vec();

    loop {
        let n = a.len() as i64;
        let spread = a[a.len() - 1] - a[0];
        let limit = 2 * n - 2;
        if spread > limit {
            return Err(ReductionError::RangeTooWide { spread, limit, n: a.len() });
        }
        // Smallest target first; both are sorted, so position 0 decides.
        if t[0] > a[0] {
            break;
        }
        a.remove(0);
        t.remove(0);
        if a.is_empty() {
            return Ok(NormalizeOutcome::TrivialYes);
        }
        for target in &mut t {
            *target -= 1;
        }
    }

    let n = a.len() as i64;
    if t[n as usize - 1] > a[n as usize - 1] + n {
        return Ok(NormalizeOutcome::TrivialNo);
    }

    let shift = n - a[0];
    for v in &mut a {
        *v += shift;
    }
    for v in &mut t {
        *v += shift;
    }
    let out = In3dmInstance::new(a, t)?;
    debug_assert!(is_normalized_in3dm(&out));
    Ok(NormalizeOutcome::Normalized(out))
}

/// Encodes a normalized matching instance as position matching. The real
/// elements keep their values and compete for positions `1..=n`; `3n` copies
/// of the value `4n` fill positions `n+1..=4n` and are absorbed by fresh
/// targets `5n+1..=8n`, which only those copies can meet. The position
/// sequence `1..=4n` is exactly what discretizing the padded deadline vector
/// produces; this is asserted mechanically by instance validation.
pub fn in3dm_to_pm(src: &In3dmInstance) -> Result<PositionMatchingInstance, ReductionError> {
    if !is_normalized_in3dm(src) {
        return Err(ReductionError::PreconditionNotNormalized {
            detail: format!("A = {:?}, T = {:?}", src.a(), src.t()),
        });
    }
    let n = src.n() as i64;
    let mut deadlines = src.a().to_vec();
    deadlines.extend(std::iter::repeat(4 * n).take(3 * src.n()));
    let positions: Vec<i64> = (1..=4 * n).collect();
    let mut targets = src.t().to_vec();
    targets.extend(5 * n + 1..=8 * n);
    let out = PositionMatchingInstance::new(deadlines, positions, targets)
        .expect("padded deadlines discretize to 1..=4n for a normalized instance");
    debug_assert_eq!(out.n(), 4 * src.n());
    Ok(out)
}

/// Forward solution map of [`in3dm_to_pm`]: real triples carry over with
/// `b` read as a position; dummy copies take the remaining positions and the
/// fresh targets in ascending lockstep (position `n+1+j` with target
/// `5n+1+j`, met with equality).
pub fn lift_in3dm_matching(src: &In3dmInstance, matching: &In3dmMatching) -> PmMatching {
    let n = src.n();
    let mut triples: Vec<PmTriple> = matching
        .triples
        .iter()
        .map(|&(a_index, b, t_index)| PmTriple {
            d_index: a_index,
            a_index: b as usize - 1,
            t_index,
        })
        .collect();
    for j in 0..3 * n {
        triples.push(PmTriple { d_index: n + j, a_index: n + j, t_index: n + j });
    }
    PmMatching { triples }
}

/// Adds `c` to every deadline and position and `2c` to every target: sums
/// `d + a` shift by exactly `2c`, so the verdict is unchanged, and the
/// position sequence stays the discretization of the deadlines.
pub fn pm_shift(src: &PositionMatchingInstance, c: i64) -> PositionMatchingInstance {
    assert!(c > 0, "shift must be positive");
    let deadlines = src.deadlines().iter().map(|&d| d + c).collect();
    let positions = src.positions().iter().map(|&a| a + c).collect();
    let targets = src.targets().iter().map(|&t| t + 2 * c).collect();
    PositionMatchingInstance::new(deadlines, positions, targets)
        .expect("shifting preserves every structural invariant")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PmToTwoVisitsOutcome {
    Reduced(KVisitsInstance),
    /// The largest target lies beyond twice the largest position, which no
    /// second visit can reach.
    TrivialNo,
}

/// Encodes a position matching instance as a 2-visits instance with the same
/// verdict, provided the positions are consecutive and every target exceeds
/// every position (shift first otherwise).
///
/// Short odd deadlines `1, 3, ..., a_1 - 2` pin nodes onto every odd slot
/// below `a_1` (their second visits fill the even slots); the original
/// deadlines follow, their first visits landing on `a_1..=a_n`; filler
/// deadlines cover `[a_n+1, 2a_n]` except the targets. The only free slots
/// are then the targets themselves plus the tail beyond `2a_n`, so a
/// schedule exists exactly when the matching does. If `a_1` is even, the
/// whole instance is first shifted by 1 to make it odd.
pub fn pm_to_two_visits(
    src: &PositionMatchingInstance,
) -> Result<PmToTwoVisitsOutcome, ReductionError> {
    for (index, w) in src.positions().windows(2).enumerate() {
        if w[1] != w[0] + 1 {
            return Err(ReductionError::PreconditionNotConsecutive {
                index: index + 1,
                got: w[1],
                expected: w[0] + 1,
            });
        }
    }
    let max_position = src.positions()[src.n() - 1];
    let min_target = src.targets()[0];
    if min_target <= max_position {
        return Err(ReductionError::PreconditionTargetsNotAboveA {
            target: min_target,
            position: max_position,
        });
    }

    let shifted;
    let src = if src.positions()[0] % 2 == 0 {
        shifted = pm_shift(src, 1);
        &shifted
    } else {
        src
    };

    let a_1 = src.positions()[0];
    let a_n = src.positions()[src.n() - 1];
    let t_max = src.targets()[src.n() - 1];
    if t_max > 2 * a_n {
        return Ok(PmToTwoVisitsOutcome::TrivialNo);
    }

    let mut deadlines: Vec<i64> = (1..a_1).step_by(2).collect();
    let short = deadlines.len();
    deadlines.extend_from_slice(src.deadlines());
    let mut next_target = 0usize;
    for value in a_n + 1..=2 * a_n {
        if src.targets().get(next_target) == Some(&value) {
            next_target += 1;
        } else {
            deadlines.push(value);
        }
    }
    debug_assert_eq!(next_target, src.n(), "every target lies in (a_n, 2a_n]");
    debug_assert_eq!(deadlines.len() as i64, (a_1 - 1) / 2 + a_n);
    debug_assert_eq!(short as i64, (a_1 - 1) / 2);

    let instance = KVisitsInstance::new(deadlines, 2)
        .expect("constructed deadlines are positive and non-empty");
    Ok(PmToTwoVisitsOutcome::Reduced(instance))
}

/// Turns a 2-visits instance into a per-occurrence-deadline instance with
/// `k_target` visits per node: the first two occurrences keep the node's
/// deadline, later ones get the slack deadline `3n`. The slack is wide
/// enough that appending full passes of `1..=n` always satisfies it, and
/// tight enough that the first two occurrences still have to solve the
/// original instance.
pub fn two_visits_to_var_k(src: &KVisitsInstance, k_target: usize) -> VarKVisitsInstance {
    assert_eq!(src.k(), 2, "source must be a 2-visits instance");
    assert!(k_target >= 2, "target visit count must be at least 2");
    let slack = 3 * src.n() as i64;
    let rows: Vec<Vec<i64>> = src
        .deadlines()
        .iter()
        .map(|&d| {
            let mut row = vec![d, d];
            row.extend(std::iter::repeat(slack).take(k_target - 2));
            row
        })
        .collect();
    VarKVisitsInstance::new(rows, k_target).expect("rows are positive with uniform length")
}

/// Forward schedule map of [`two_visits_to_var_k`]: a feasible 2-visits
/// schedule followed by `k_target - 2` passes of `1..=n`.
pub fn extend_schedule_for_var_k(schedule: &Schedule, n: usize, k_target: usize) -> Schedule {
    assert!(k_target >= 2);
    let mut entries = schedule.entries().to_vec();
    for _ in 2..k_target {
        entries.extend(1..=n);
    }
    Schedule::new(entries)
}

/// Rewrites a 2-visits instance as a threshold pinwheel instance: each node
/// keeps its deadline until its second occurrence and relaxes to `3n`
/// afterwards. Emitted for external study; no solver exists here.
pub fn two_visits_to_threshold_pws(src: &KVisitsInstance) -> ThresholdPinwheelInstance {
    assert_eq!(src.k(), 2, "source must be a 2-visits instance");
    let n = src.n() as i64;
    ThresholdPinwheelInstance::new(
        src.deadlines().to_vec(),
        vec![3 * n; src.n()],
        vec![2; src.n()],
    )
    .expect("all emitted values are positive")
}

/// Convenience for errors from instance constructors used inside reductions.
impl From<InstanceError> for ReductionError {
    fn from(e: InstanceError) -> Self {
        ReductionError::PreconditionNotNormalized { detail: e.to_string() }
    }
}
