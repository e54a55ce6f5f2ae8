//! Exact polynomial-time deciders for one and two visits per node.
//!
//! The two-visits pipeline: repeatedly split off the largest deadline while
//! it exceeds twice the remaining instance size (such nodes can be appended
//! as back-to-back pairs after everything else); discretize the rest; reject
//! if any discretized position is non-positive; split the discretized
//! positions into clusters of consecutive integers; and solve one position
//! matching per cluster, feeding cluster `j` the `|C_j|` smallest free slots
//! not claimed by earlier clusters. Each cluster's matching chooses which
//! node sits on which discretized (first-visit) position and which free slot
//! its second visit takes; second visits are ordered by induced deadline.
//! Every produced schedule is re-verified before it is returned.

use crate::instances::{
    ClusterDecomposition, ClusterSpan, DiscretizedSequence, KVisitsInstance, Schedule,
};
use crate::pm::{PmError, PmMatching, PmOutcome, PositionMatchingInstance};
use crate::verify::verify_kvisits;

/// Which specialized matching routine handled a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmSolverKind {
    SingleValue,
    TwoValues,
    Distinct,
    Exact,
}

/// Per-cluster record of how the pipeline dispatched and what it concluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterTrace {
    pub span: ClusterSpan,
    pub solver: PmSolverKind,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfeasibleReason {
    /// Discretization drove some first-visit position to zero or below;
    /// `node` is the first (1-based) node whose position is non-positive.
    NonPositiveDiscretized { node: usize },
    /// The matching for this cluster (0-based, in left-to-right order) has
    /// no solution.
    ClusterPmInfeasible { cluster: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveVerdict {
    Feasible,
    Infeasible(InfeasibleReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub verdict: SolveVerdict,
    pub schedule: Option<Schedule>,
    pub trace: Vec<ClusterTrace>,
}

impl SolveResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self.verdict, SolveVerdict::Feasible)
    }

    fn infeasible(reason: InfeasibleReason, trace: Vec<ClusterTrace>) -> Self {
        Self { verdict: SolveVerdict::Infeasible(reason), schedule: None, trace }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    /// A schedule the pipeline believed correct failed re-verification, or a
    /// cluster matching violated an invariant the pipeline relies on. Always
    /// a bug, never a property of the input.
    #[error("internal invariant violated: {detail}")]
    InternalInvariantViolation { detail: String },
}

fn internal(detail: impl Into<String>) -> SolverError {
    SolverError::InternalInvariantViolation { detail: detail.into() }
}

/// Decides a 1-visit instance: feasible exactly when discretization keeps
/// every position positive, in which case visiting nodes in deadline order
/// at positions `1..=n` works.
pub fn solve_one_visit(instance: &KVisitsInstance) -> Result<SolveResult, SolverError> {
    assert_eq!(instance.k(), 1, "one-visit solver requires k = 1");
    let disc = instance.discretize();
    if let Some(node) = first_non_positive(&disc) {
        return Ok(SolveResult::infeasible(
            InfeasibleReason::NonPositiveDiscretized { node },
            Vec::new(),
        ));
    }
    let schedule = Schedule::new((1..=instance.n()).collect());
    check_schedule(instance, &schedule)?;
    Ok(SolveResult { verdict: SolveVerdict::Feasible, schedule: Some(schedule), trace: Vec::new() })
}

/// Decides a 2-visits instance and constructs a schedule when feasible.
pub fn solve_two_visits(instance: &KVisitsInstance) -> Result<SolveResult, SolverError> {
    assert_eq!(instance.k(), 2, "two-visits solver requires k = 2");
    let (core, trimmed) = instance.trim_large_deadlines();

    let Some(core) = core else {
        // Everything was split off: pairs of back-to-back visits suffice.
        let schedule = appended_schedule(Vec::new(), &trimmed);
        check_schedule(instance, &schedule)?;
        return Ok(SolveResult {
            verdict: SolveVerdict::Feasible,
            schedule: Some(schedule),
            trace: Vec::new(),
        });
    };

    let disc = core.discretize();
    if let Some(node) = first_non_positive(&disc) {
        return Ok(SolveResult::infeasible(
            InfeasibleReason::NonPositiveDiscretized { node },
            Vec::new(),
        ));
    }
    let decomposition = disc
        .decompose()
        .map_err(|e| internal(format!("positive discretized sequence failed to decompose: {e}")))?;

    let mut trace = Vec::with_capacity(decomposition.clusters().len());
    let mut matchings = Vec::with_capacity(decomposition.clusters().len());
    let mut gap_offset = 0usize;
    for (index, span) in decomposition.clusters().iter().enumerate() {
        let pm = cluster_matching_instance(&core, &disc, &decomposition, span, gap_offset)
            .map_err(|e| internal(format!("cluster {index} produced an invalid matching instance: {e}")))?;
        gap_offset += span.size();
        let kind = dispatch_kind(pm.deadlines());
        let outcome = match kind {
            PmSolverKind::SingleValue => crate::pm::solve_single_value(&pm),
            PmSolverKind::TwoValues => crate::pm::solve_two_values(&pm),
            PmSolverKind::Distinct => crate::pm::solve_distinct(&pm),
            PmSolverKind::Exact => Ok(crate::pm::solve_exact(&pm)),
        }
        .map_err(|e| internal(format!("cluster {index} dispatch violated a precondition: {e}")))?;
        match outcome {
            PmOutcome::Feasible(matching) => {
                trace.push(ClusterTrace { span: *span, solver: kind, feasible: true });
                matchings.push(matching);
            }
            PmOutcome::Infeasible => {
                trace.push(ClusterTrace { span: *span, solver: kind, feasible: false });
                return Ok(SolveResult::infeasible(
                    InfeasibleReason::ClusterPmInfeasible { cluster: index },
                    trace,
                ));
            }
        }
    }

    let schedule = reconstruct_schedule(&core, &disc, &decomposition, &matchings, &trimmed)
        .ok_or_else(|| internal("cluster matchings did not assemble into a schedule"))?;
    check_schedule(instance, &schedule)?;
    Ok(SolveResult { verdict: SolveVerdict::Feasible, schedule: Some(schedule), trace })
}

fn first_non_positive(disc: &DiscretizedSequence) -> Option<usize> {
    disc.values().iter().position(|&v| v < 1).map(|i| i + 1)
}

fn check_schedule(instance: &KVisitsInstance, schedule: &Schedule) -> Result<(), SolverError> {
    let verdict = verify_kvisits(instance, schedule);
    if verdict.ok() {
        Ok(())
    } else {
        Err(internal(format!(
            "constructed schedule fails verification: {:?}",
            verdict.violation()
        )))
    }
}

/// Builds the matching instance for one cluster: deadlines and discretized
/// positions restricted to the cluster's nodes, targets the next `|span|`
/// free slots in ascending order.
fn cluster_matching_instance(
    core: &KVisitsInstance,
    disc: &DiscretizedSequence,
    decomposition: &ClusterDecomposition,
    span: &ClusterSpan,
    gap_offset: usize,
) -> Result<PositionMatchingInstance, PmError> {
    let deadlines = core.deadlines()[span.start..=span.end].to_vec();
    let positions = disc.values()[span.start..=span.end].to_vec();
    let targets = decomposition.gaps()[gap_offset..gap_offset + span.size()].to_vec();
    PositionMatchingInstance::new(deadlines, positions, targets)
}

fn dispatch_kind(deadlines: &[i64]) -> PmSolverKind {
    let n = deadlines.len();
    let mut distinct = 1;
    for w in deadlines.windows(2) {
        if w[0] != w[1] {
            distinct += 1;
        }
    }
    if distinct == 1 {
        PmSolverKind::SingleValue
    } else if distinct == 2 {
        PmSolverKind::TwoValues
    } else if distinct == n {
        PmSolverKind::Distinct
    } else {
        PmSolverKind::Exact
    }
}

/// Assembles the full schedule from per-cluster matchings, then appends the
/// split-off large-deadline nodes as consecutive pairs in reverse removal
/// order (so the node removed first — the largest deadline — comes last).
///
/// First visits sit on the discretized positions. Second visits take the
/// cluster's free slots in ascending order, handed out to nodes sorted by
/// induced deadline (first-visit position plus own deadline), ties by node
/// index. Returns `None` if any slot would be used twice or left empty.
pub fn reconstruct_schedule(
    core: &KVisitsInstance,
    disc: &DiscretizedSequence,
    decomposition: &ClusterDecomposition,
    matchings: &[PmMatching],
    trimmed: &[usize],
) -> Option<Schedule> {
    let core_len = 2 * core.n();
    let total_len = core_len + 2 * trimmed.len();
    let mut entries = vec![0usize; total_len];

    let place = |position: i64, node: usize, entries: &mut Vec<usize>| -> bool {
        let idx = position as usize - 1;
        if entries[idx] != 0 {
            return false;
        }
        entries[idx] = node;
        true
    };

    if matchings.len() != decomposition.clusters().len() {
        return None;
    }
    let mut gap_offset = 0usize;
    for (span, matching) in decomposition.clusters().iter().zip(matchings) {
        let gaps = &decomposition.gaps()[gap_offset..gap_offset + span.size()];
        gap_offset += span.size();

        let mut second_visits: Vec<(i64, usize)> = Vec::with_capacity(span.size());
        for triple in &matching.triples {
            let node = span.start + triple.d_index + 1;
            let first = disc.values()[span.start + triple.a_index];
            if !place(first, node, &mut entries) {
                return None;
            }
            second_visits.push((first + core.deadline(node), node));
        }
        second_visits.sort_unstable();
        for (&slot, &(_, node)) in gaps.iter().zip(&second_visits) {
            if !place(slot, node, &mut entries) {
                return None;
            }
        }
    }

    let appended = appended_schedule(entries[..core_len].to_vec(), trimmed);
    if appended.entries().iter().any(|&e| e == 0) {
        return None;
    }
    Some(appended)
}

/// Appends each split-off node as two consecutive visits after `prefix`,
/// in reverse removal order.
fn appended_schedule(mut prefix: Vec<usize>, trimmed: &[usize]) -> Schedule {
    for &node in trimmed.iter().rev() {
        prefix.push(node);
        prefix.push(node);
    }
    Schedule::new(prefix)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(d: &[i64], k: usize) -> KVisitsInstance {
        KVisitsInstance::new(d.to_vec(), k).unwrap()
    }

    #[test]
    fn one_visit_matches_discretization_sign() {
        let result = solve_one_visit(&inst(&[1, 2, 3], 1)).unwrap();
        assert!(result.is_feasible());
        assert_eq!(result.schedule.unwrap().entries(), &[1, 2, 3]);

        let result = solve_one_visit(&inst(&[1, 1], 1)).unwrap();
        assert_eq!(
            result.verdict,
            SolveVerdict::Infeasible(InfeasibleReason::NonPositiveDiscretized { node: 1 })
        );
    }

    #[test]
    fn two_visits_solves_tight_pair() {
        let result = solve_two_visits(&inst(&[2, 2], 2)).unwrap();
        assert!(result.is_feasible());
        assert_eq!(result.schedule.unwrap().entries(), &[1, 2, 1, 2]);
    }

    #[test]
    fn two_visits_rejects_overloaded_instance() {
        let result = solve_two_visits(&inst(&[2, 2, 4, 4], 2)).unwrap();
        assert_eq!(
            result.verdict,
            SolveVerdict::Infeasible(InfeasibleReason::ClusterPmInfeasible { cluster: 0 })
        );
        assert_eq!(result.trace.len(), 1);
        assert_eq!(result.trace[0].solver, PmSolverKind::TwoValues);
        assert!(!result.trace[0].feasible);
    }

    #[test]
    fn two_visits_rejects_non_positive_discretization() {
        let result = solve_two_visits(&inst(&[1, 1], 2)).unwrap();
        assert_eq!(
            result.verdict,
            SolveVerdict::Infeasible(InfeasibleReason::NonPositiveDiscretized { node: 1 })
        );
    }

    #[test]
    fn two_visits_handles_single_node() {
        let result = solve_two_visits(&inst(&[1], 2)).unwrap();
        assert!(result.is_feasible());
        assert_eq!(result.schedule.unwrap().entries(), &[1, 1]);
    }

    #[test]
    fn trimmed_nodes_are_appended_as_pairs() {
        // 20 and 30 exceed twice the size at their removal; the remaining
        // core is itself emptied by the rule (5 > 2 * 1), so the whole
        // schedule is back-to-back pairs in reverse removal order.
        let result = solve_two_visits(&inst(&[5, 20, 30], 2)).unwrap();
        assert!(result.is_feasible());
        assert_eq!(result.schedule.unwrap().entries(), &[1, 1, 2, 2, 3, 3]);

        let result = solve_two_visits(&inst(&[2, 3, 9], 2)).unwrap();
        assert!(result.is_feasible());
        let schedule = result.schedule.unwrap();
        assert_eq!(&schedule.entries()[4..], &[3, 3]);
    }

    #[test]
    fn seven_node_worked_example_is_feasible() {
        let result = solve_two_visits(&inst(&[6, 8, 8, 8, 11, 11, 14], 2)).unwrap();
        assert!(result.is_feasible());
    }

    #[test]
    fn twelve_node_worked_example_matches_cluster_dispatch() {
        let result = solve_two_visits(&inst(&[4, 5, 6, 7, 8, 8, 10, 10, 11, 15, 22, 23], 2)).unwrap();
        assert!(result.is_feasible());
        let kinds: Vec<PmSolverKind> = result.trace.iter().map(|t| t.solver).collect();
        // The last cluster has two nodes with distinct deadlines 22, 23; the
        // two-values routine is dispatched before the all-distinct one.
        assert_eq!(
            kinds,
            vec![PmSolverKind::Exact, PmSolverKind::SingleValue, PmSolverKind::TwoValues]
        );
        let spans: Vec<(usize, usize)> =
            result.trace.iter().map(|t| (t.span.start, t.span.end)).collect();
        assert_eq!(spans, vec![(0, 8), (9, 9), (10, 11)]);
    }

    #[test]
    fn solver_is_deterministic() {
        let instance = inst(&[6, 8, 8, 8, 11, 11, 14], 2);
        let a = solve_two_visits(&instance).unwrap();
        let b = solve_two_visits(&instance).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn visits_split_into_discretized_and_free_positions() {
        // Every node gets exactly one visit on a discretized position and
        // one on a free slot (free slots may precede: slots 1-4 here hold
        // second visits of the 5..8 cluster's nodes).
        let instance = inst(&[6, 8, 8, 8, 11, 11, 14], 2);
        let result = solve_two_visits(&instance).unwrap();
        let schedule = result.schedule.unwrap();
        let positions = schedule.visit_positions(instance.n());
        let disc = [5i64, 6, 7, 8, 10, 11, 14];
        let free = [1i64, 2, 3, 4, 9, 12, 13];
        let mut on_disc = Vec::new();
        let mut on_free = Vec::new();
        for pair in &positions {
            assert_eq!(pair.len(), 2);
            let (p0, p1) = (pair[0] as i64, pair[1] as i64);
            if disc.contains(&p0) {
                on_disc.push(p0);
                on_free.push(p1);
            } else {
                on_disc.push(p1);
                on_free.push(p0);
            }
        }
        on_disc.sort_unstable();
        on_free.sort_unstable();
        assert_eq!(on_disc, disc);
        assert_eq!(on_free, free);
    }
}
