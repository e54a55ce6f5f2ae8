//! Instance types and the structural analysis they support: deadline
//! normalisation, the discretized sequence, oversized-deadline trimming,
//! the cluster/gap decomposition and exact density accounting.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance must contain at least one deadline")]
    EmptyInput,
    #[error("deadline {value} at node {node} is not positive")]
    NonPositiveDeadline { node: usize, value: i64 },
    #[error("discretized value {value} at node {node} is not positive")]
    NonPositiveDiscretizedValue { node: usize, value: i64 },
    #[error("discretized value {value} at node {node} exceeds the horizon {horizon}")]
    ValueExceedsHorizon { node: usize, value: i64, horizon: i64 },
    #[error("row {row} has {got} deadlines, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
}

/// A k-Visits instance: deadlines sorted non-decreasingly plus the visit
/// count `k`. Node `i` (1-based) owns deadline `deadlines()[i-1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KVisitsInstance {
    deadlines: Vec<i64>,
    k: usize,
}

impl KVisitsInstance {
    /// Builds an instance from an arbitrary multiset of deadlines, sorting
    /// them non-decreasingly. Multiplicities are preserved; only the order
    /// is normalised, so feasibility is unaffected.
    pub fn new(mut deadlines: Vec<i64>, k: usize) -> Result<Self, InstanceError> {
        if deadlines.is_empty() {
            return Err(InstanceError::EmptyInput);
        }
        if let Some(pos) = deadlines.iter().position(|&d| d <= 0) {
            return Err(InstanceError::NonPositiveDeadline {
                node: pos + 1,
                value: deadlines[pos],
            });
        }
        deadlines.sort_unstable();
        Ok(Self { deadlines, k })
    }

    pub fn n(&self) -> usize {
        self.deadlines.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn deadlines(&self) -> &[i64] {
        &self.deadlines
    }

    /// Deadline of 1-based node `i`.
    pub fn deadline(&self, node: usize) -> i64 {
        self.deadlines[node - 1]
    }

    /// The discretized sequence `a`: `a_n = d_n` and, walking right to left,
    /// `a_i = min(a_{i+1} - 1, d_i)`. It is strictly increasing, bounded
    /// above by the deadlines pointwise, and is the canonical choice of
    /// pairwise-distinct first-visit positions. Values may be zero or
    /// negative; that signals infeasibility and is reported by the solvers,
    /// not here.
    pub fn discretize(&self) -> DiscretizedSequence {
        let d = &self.deadlines;
        let mut values = d.clone();
        for i in (0..d.len().saturating_sub(1)).rev() {
            values[i] = (values[i + 1] - 1).min(d[i]);
        }
        DiscretizedSequence {
            values,
            deadlines: d.clone(),
        }
    }

    /// Removes deadlines that exceed twice the current instance size, largest
    /// first, repeating until none is oversized (each removal shrinks the
    /// horizon, so the check re-applies). A node removed this way can never
    /// expire within the schedule and its two visits go at the very end, so
    /// feasibility is unchanged.
    ///
    /// Returns the trimmed core (`None` when every node was removed — a
    /// trivially feasible situation) and the removed 1-based node indices in
    /// removal order. Only meaningful for `k = 2`.
    pub fn trim_large_deadlines(&self) -> (Option<KVisitsInstance>, Vec<usize>) {
        assert_eq!(self.k, 2, "trimming targets the two-visit horizon 2n");
        let mut core = self.deadlines.clone();
        let mut trimmed = Vec::new();
        while let Some(&max) = core.last() {
            if max > 2 * core.len() as i64 {
                trimmed.push(core.len());
                core.pop();
            } else {
                break;
            }
        }
        let core = if core.is_empty() {
            None
        } else {
            Some(KVisitsInstance { deadlines: core, k: 2 })
        };
        (core, trimmed)
    }

    /// Exact density `sum(1/d_i)` as an arbitrary-precision rational. No
    /// floating point is involved, so threshold comparisons (e.g. against
    /// 5/6) are exact.
    pub fn density(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for &d in &self.deadlines {
            acc += BigRational::new(BigInt::from(1), BigInt::from(d));
        }
        acc
    }

    /// Whether the density exceeds 5/6, the boundary below which two-visit
    /// instances are always feasible.
    pub fn density_exceeds_five_sixths(&self) -> bool {
        self.density() > BigRational::new(BigInt::from(5), BigInt::from(6))
    }
}

/// The discretized sequence of an instance, kept alongside the deadlines it
/// was computed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscretizedSequence {
    values: Vec<i64>,
    deadlines: Vec<i64>,
}

impl DiscretizedSequence {
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn deadlines(&self) -> &[i64] {
        &self.deadlines
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when every value is at least 1, i.e. the values form valid
    /// schedule positions.
    pub fn all_positive(&self) -> bool {
        self.values.first().is_none_or(|&v| v >= 1)
    }

    /// Splits the sequence into clusters (maximal runs of consecutive
    /// values) and lists the gaps: positions of the two-visit horizon
    /// `[1, 2n]` not covered by any value.
    ///
    /// Requires every value to lie in `[1, 2n]`; the trimming and
    /// positivity stages of the solver establish exactly that.
    pub fn decompose(&self) -> Result<ClusterDecomposition, InstanceError> {
        let n = self.values.len();
        let horizon = 2 * n as i64;
        for (i, &v) in self.values.iter().enumerate() {
            if v < 1 {
                return Err(InstanceError::NonPositiveDiscretizedValue { node: i + 1, value: v });
            }
            if v > horizon {
                return Err(InstanceError::ValueExceedsHorizon { node: i + 1, value: v, horizon });
            }
        }
        let mut clusters = Vec::new();
        let mut start = 0;
        for i in 1..n {
            if self.values[i] != self.values[i - 1] + 1 {
                clusters.push(ClusterSpan { start, end: i - 1 });
                start = i;
            }
        }
        if n > 0 {
            clusters.push(ClusterSpan { start, end: n - 1 });
        }
        // The values are strictly increasing, so a single merge pass lists
        // the uncovered positions.
        let mut gaps = Vec::with_capacity(n);
        let mut next = 0;
        for p in 1..=horizon {
            if next < n && self.values[next] == p {
                next += 1;
            } else {
                gaps.push(p);
            }
        }
        Ok(ClusterDecomposition { clusters, gaps, horizon })
    }
}

/// A maximal run of consecutive discretized values, as a 0-based inclusive
/// index range into the sequence (node `start+1` through node `end+1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterSpan {
    pub start: usize,
    pub end: usize,
}

impl ClusterSpan {
    /// Number of nodes in the cluster (always at least 1).
    pub fn size(&self) -> usize {
        self.end - self.start + 1
    }
}

/// Cluster/gap decomposition of a discretized sequence over the horizon
/// `[1, 2n]`. Clusters are ordered left to right; gaps are ascending and
/// there are exactly `n` of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterDecomposition {
    clusters: Vec<ClusterSpan>,
    gaps: Vec<i64>,
    horizon: i64,
}

impl ClusterDecomposition {
    pub fn clusters(&self) -> &[ClusterSpan] {
        &self.clusters
    }

    pub fn gaps(&self) -> &[i64] {
        &self.gaps
    }

    pub fn horizon(&self) -> i64 {
        self.horizon
    }
}

/// A schedule: 1-based node indices, one per position `1..=len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    entries: Vec<usize>,
}

impl Schedule {
    pub fn new(entries: Vec<usize>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Positions (1-based, ascending) at which each of the `n` nodes is
    /// visited. Entries outside `1..=n` are ignored; the verifier reports
    /// them separately.
    pub fn visit_positions(&self, n: usize) -> Vec<Vec<usize>> {
        let mut visits = vec![Vec::new(); n];
        for (idx, &node) in self.entries.iter().enumerate() {
            if (1..=n).contains(&node) {
                visits[node - 1].push(idx + 1);
            }
        }
        visits
    }
}

/// A Var-k-Visits instance: every node has its own vector of `k` deadlines,
/// one per occurrence. `deadline(i, j)` bounds the distance of the j-th
/// occurrence of node `i` from the (j-1)-th (from position 0 when `j = 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarKVisitsInstance {
    rows: Vec<Vec<i64>>,
    k: usize,
}

impl VarKVisitsInstance {
    pub fn new(rows: Vec<Vec<i64>>, k: usize) -> Result<Self, InstanceError> {
        if rows.is_empty() {
            return Err(InstanceError::EmptyInput);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(InstanceError::RaggedRow { row: i + 1, got: row.len(), expected: k });
            }
            if let Some(pos) = row.iter().position(|&d| d <= 0) {
                return Err(InstanceError::NonPositiveDeadline { node: i + 1, value: row[pos] });
            }
        }
        Ok(Self { rows, k })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Deadline of the `occurrence`-th visit (1-based) of 1-based `node`.
    pub fn deadline(&self, node: usize, occurrence: usize) -> i64 {
        self.rows[node - 1][occurrence - 1]
    }
}
