//! Schedule verifiers. Everything else in the crate — solvers, oracles,
//! reductions — is ultimately judged against these checks, so they are kept
//! direct: scan the schedule once and report the earliest violation.

use crate::instances::{KVisitsInstance, Schedule, VarKVisitsInstance};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("nodes {first} and {second} share primary position {position}")]
    DuplicatePosition { first: usize, second: usize, position: i64 },
    #[error("expected one primary position per node ({expected}), got {got}")]
    WrongPositionCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationReason {
    /// A visit landed more than the allowed distance after the previous one
    /// (or after position 0 for a first visit).
    DeadlineExceeded,
    /// A node was visited more often than its visit count allows.
    WrongVisitCount,
    /// The schedule length is not `n * k`.
    BadLength,
    /// An entry is not a node index in `1..=n`.
    IndexOutOfRange,
}

/// The earliest defect in a schedule, located by position (the verifier
/// scans left to right, so at most one entry can offend first; remaining
/// field semantics depend on `reason` and are documented on [`Verdict`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub reason: ViolationReason,
    /// Offending node (the out-of-range value itself for `IndexOutOfRange`,
    /// 0 for `BadLength`).
    pub node: usize,
    /// 1-based occurrence index of the offending visit (0 when not tied to
    /// a visit).
    pub occurrence_index: usize,
    /// 1-based schedule position of the offending entry; the actual length
    /// for `BadLength`.
    pub position: i64,
    /// Latest position the visit was allowed at; the expected length for
    /// `BadLength`; `n` for `IndexOutOfRange`; the visit count for
    /// `WrongVisitCount`.
    pub allowed_by: i64,
}

/// Outcome of a verification: either clean or carrying the earliest
/// violation. `ok()` holds exactly when no violation is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    violation: Option<Violation>,
}

impl Verdict {
    pub(crate) fn clean() -> Self {
        Verdict { violation: None }
    }

    pub(crate) fn flag(v: Violation) -> Self {
        Verdict { violation: Some(v) }
    }

    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }

    pub fn violation(&self) -> Option<&Violation> {
        self.violation.as_ref()
    }
}

/// Checks a schedule against a k-Visits instance: length `n*k`, every node
/// exactly `k` times, every visit within its deadline of the previous one
/// (position 0 for first visits).
pub fn verify_kvisits(instance: &KVisitsInstance, schedule: &Schedule) -> Verdict {
    verify_with(
        instance.n(),
        instance.k(),
        |node, _occurrence| instance.deadline(node),
        schedule,
    )
}

/// Checks a schedule against a Var-k-Visits instance; identical to
/// [`verify_kvisits`] except that the allowed distance depends on the
/// occurrence index.
pub fn verify_var_kvisits(instance: &VarKVisitsInstance, schedule: &Schedule) -> Verdict {
    verify_with(
        instance.n(),
        instance.k(),
        |node, occurrence| instance.deadline(node, occurrence),
        schedule,
    )
}

fn verify_with(
    n: usize,
    k: usize,
    deadline: impl Fn(usize, usize) -> i64,
    schedule: &Schedule,
) -> Verdict {
    let expected = n * k;
    if schedule.len() != expected {
        return Verdict::flag(Violation {
            reason: ViolationReason::BadLength,
            node: 0,
            occurrence_index: 0,
            position: schedule.len() as i64,
            allowed_by: expected as i64,
        });
    }
    let mut count = vec![0usize; n];
    let mut last = vec![0i64; n];
    for (idx, &node) in schedule.entries().iter().enumerate() {
        let position = idx as i64 + 1;
        if node < 1 || node > n {
            return Verdict::flag(Violation {
                reason: ViolationReason::IndexOutOfRange,
                node,
                occurrence_index: 0,
                position,
                allowed_by: n as i64,
            });
        }
        if count[node - 1] == k {
            return Verdict::flag(Violation {
                reason: ViolationReason::WrongVisitCount,
                node,
                occurrence_index: k + 1,
                position,
                allowed_by: k as i64,
            });
        }
        let occurrence = count[node - 1] + 1;
        let latest = last[node - 1] + deadline(node, occurrence);
        if position > latest {
            return Verdict::flag(Violation {
                reason: ViolationReason::DeadlineExceeded,
                node,
                occurrence_index: occurrence,
                position,
                allowed_by: latest,
            });
        }
        count[node - 1] = occurrence;
        last[node - 1] = position;
    }
    // Length n*k with no node over k implies every count is exactly k.
    Verdict::clean()
}

/// The induced deadline of a node whose primary visit sits at position `t`:
/// its secondary visit is due by `d + t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InducedDeadline {
    pub node: usize,
    pub primary_position: i64,
    pub value: i64,
}

/// Induced deadlines for a two-visit instance given one primary position per
/// node (`positions[i]` belongs to node `i+1`). Positions must be pairwise
/// distinct.
pub fn induced_deadlines(
    instance: &KVisitsInstance,
    positions: &[i64],
) -> Result<Vec<InducedDeadline>, VerifyError> {
    if positions.len() != instance.n() {
        return Err(VerifyError::WrongPositionCount { expected: instance.n(), got: positions.len() });
    }
    let mut seen: Vec<(i64, usize)> = positions.iter().copied().zip(1..).collect();
    seen.sort_unstable();
    for w in seen.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(VerifyError::DuplicatePosition {
                first: w[0].1.min(w[1].1),
                second: w[0].1.max(w[1].1),
                position: w[0].0,
            });
        }
    }
    Ok(positions
        .iter()
        .enumerate()
        .map(|(i, &t)| InducedDeadline {
            node: i + 1,
            primary_position: t,
            value: instance.deadline(i + 1) + t,
        })
        .collect())
}
