//! Exact decision and construction solvers for the *k-Visits* scheduling
//! family.
//!
//! An instance is a multiset of positive integer deadlines `d_1 <= ... <= d_n`
//! together with a visit count `k`. A feasible schedule is a sequence of `n*k`
//! node indices (positions are 1-based, `1..=n*k`) in which every node `i`
//! appears exactly `k` times and consecutive appearances of `i` are at most
//! `d_i` positions apart, the first one being at most `d_i` positions from the
//! beginning (position 0).
//!
//! The crate is organised around a small set of building blocks:
//!
//! * [`instances`] — instance types, the discretized sequence, the
//!   cluster/gap decomposition and exact density accounting.
//! * [`verify`] — schedule verifiers. These are the trust anchor for every
//!   solver and oracle in the crate.
//! * [`pm`] — the Position Matching kernel used by the two-visit solver,
//!   with fast special-case solvers and an exact search fallback.
//! * [`solver`] — polynomial decision/construction procedures for `k = 1`
//!   and `k = 2`.
//! * [`oracle`] — budgeted brute-force searches, used as independent ground
//!   truth in tests and exposed for small instances of any `k`.
//! * [`reductions`] — executable reductions between numerical
//!   three-dimensional matching problems, Position Matching, 2-Visits and
//!   its generalisations.
//! * [`formats`] — plain-text instance/schedule formats shared by the CLI
//!   and the test corpus.
//! * [`generator`] — seeded random instance generators.

pub mod formats;
pub mod generator;
pub mod instances;
pub mod oracle;
pub mod pm;
pub mod reductions;
pub mod solver;
pub mod verify;

pub use instances::{ClusterDecomposition, DiscretizedSequence, KVisitsInstance, Schedule, VarKVisitsInstance};
pub use oracle::SearchBudget;
pub use pm::{PmMatching, PositionMatchingInstance};
pub use solver::{solve_one_visit, solve_two_visits, SolveResult};
pub use verify::{verify_kvisits, verify_var_kvisits, Verdict};
