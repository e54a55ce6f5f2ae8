//! Python bindings for the visit-scheduling solvers. Instances cross the
//! boundary as plain lists and tuples rather than wrapped objects: every
//! function takes a deadline list (plus `k` where it matters) and returns
//! built-in Python types, so the module is usable from a REPL without any
//! class ceremony. Invalid instances raise `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use kvisits::instances::{KVisitsInstance, Schedule, VarKVisitsInstance};
use kvisits::oracle::{oracle_kvisits as oracle_kv, OracleOutcome, SearchBudget};
use kvisits::pm::PositionMatchingInstance;
use kvisits::reductions::{
    in3dm_normalize, in3dm_to_pm, pm_shift, pm_to_two_visits, rn3dm_to_in3dm,
    rn3dm_trivially_infeasible, two_visits_to_threshold_pws, two_visits_to_var_k as to_var_k,
    NormalizeOutcome, PmToTwoVisitsOutcome, Rn3dmInstance,
};
use kvisits::solver::{
    solve_one_visit as solve_1v, solve_two_visits as solve_2v, InfeasibleReason, PmSolverKind,
    SolveResult, SolveVerdict,
};
use kvisits::verify::{
    verify_kvisits as verify_kv, verify_var_kvisits as verify_var_kv, Verdict, ViolationReason,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn solver_kind_name(kind: PmSolverKind) -> &'static str {
    match kind {
        PmSolverKind::SingleValue => "single-value",
        PmSolverKind::TwoValues => "two-values",
        PmSolverKind::Distinct => "distinct",
        PmSolverKind::Exact => "exact",
    }
}

fn violation_slug(reason: ViolationReason) -> &'static str {
    match reason {
        ViolationReason::DeadlineExceeded => "deadline-exceeded",
        ViolationReason::WrongVisitCount => "wrong-visit-count",
        ViolationReason::BadLength => "bad-length",
        ViolationReason::IndexOutOfRange => "index-out-of-range",
    }
}

fn instance(deadlines: Vec<i64>, k: usize) -> PyResult<KVisitsInstance> {
    KVisitsInstance::new(deadlines, k).map_err(value_err)
}

/// `(feasible, schedule, reason, trace)`; trace rows are
/// `(first_node, last_node, solver, feasible)` with 1-based node indices.
type PySolveResult = (bool, Option<Vec<usize>>, Option<String>, Vec<(usize, usize, String, bool)>);

fn solve_result_to_py(result: SolveResult) -> PySolveResult {
    let feasible = result.is_feasible();
    let schedule = result.schedule.map(|s| s.entries().to_vec());
    let reason = match result.verdict {
        SolveVerdict::Feasible => None,
        SolveVerdict::Infeasible(InfeasibleReason::NonPositiveDiscretized { node }) => {
            Some(format!("non-positive-discretized: node {node}"))
        }
        SolveVerdict::Infeasible(InfeasibleReason::ClusterPmInfeasible { cluster }) => {
            Some(format!("cluster-matching-infeasible: cluster {}", cluster + 1))
        }
    };
    let trace = result
        .trace
        .iter()
        .map(|t| {
            (t.span.start + 1, t.span.end + 1, solver_kind_name(t.solver).to_string(), t.feasible)
        })
        .collect();
    (feasible, schedule, reason, trace)
}

/// Largest stable positions: `a_n = d_n`, `a_i = min(a_{i+1} - 1, d_i)`.
#[pyfunction]
fn discretize(deadlines: Vec<i64>) -> PyResult<Vec<i64>> {
    Ok(instance(deadlines, 2)?.discretize().values().to_vec())
}

/// Exact density `sum(1/d_i)` as a `(numerator, denominator)` string pair.
#[pyfunction]
fn density(deadlines: Vec<i64>) -> PyResult<(String, String)> {
    let d = instance(deadlines, 2)?.density();
    Ok((d.numer().to_string(), d.denom().to_string()))
}

/// Clusters of the discretized sequence as `(first_value, last_value, size)`
/// rows, plus the gap positions. Requires a positive discretized sequence.
#[pyfunction]
fn decompose(deadlines: Vec<i64>) -> PyResult<(Vec<(i64, i64, usize)>, Vec<i64>)> {
    let inst = instance(deadlines, 2)?;
    let disc = inst.discretize();
    let dec = disc.decompose().map_err(value_err)?;
    let clusters = dec
        .clusters()
        .iter()
        .map(|c| (disc.values()[c.start], disc.values()[c.end], c.size()))
        .collect();
    Ok((clusters, dec.gaps().to_vec()))
}

#[pyfunction]
fn solve_one_visit(deadlines: Vec<i64>) -> PyResult<PySolveResult> {
    let inst = instance(deadlines, 1)?;
    Ok(solve_result_to_py(solve_1v(&inst).map_err(value_err)?))
}

#[pyfunction]
fn solve_two_visits(deadlines: Vec<i64>) -> PyResult<PySolveResult> {
    let inst = instance(deadlines, 2)?;
    Ok(solve_result_to_py(solve_2v(&inst).map_err(value_err)?))
}

fn verdict_to_py(verdict: Verdict) -> Option<(String, usize, usize, i64, i64)> {
    verdict.violation().map(|v| {
        (violation_slug(v.reason).to_string(), v.node, v.occurrence_index, v.position, v.allowed_by)
    })
}

/// `None` when the schedule is valid; otherwise the earliest violation as
/// `(reason, node, occurrence, position, allowed_by)`.
#[pyfunction]
fn verify_kvisits(
    deadlines: Vec<i64>,
    k: usize,
    schedule: Vec<usize>,
) -> PyResult<Option<(String, usize, usize, i64, i64)>> {
    let inst = instance(deadlines, k)?;
    Ok(verdict_to_py(verify_kv(&inst, &Schedule::new(schedule))))
}

/// Decides whether deadline/position pairs can cover the targets
/// (positions are derived from the deadlines). Returns
/// `(feasible, matching)` with matched triples as `(deadline, position,
/// target)` values.
#[pyfunction]
fn solve_position_matching(
    deadlines: Vec<i64>,
    targets: Vec<i64>,
) -> PyResult<(bool, Option<Vec<(i64, i64, i64)>>)> {
    let positions = instance(deadlines.clone(), 2)?.discretize().values().to_vec();
    let pm = PositionMatchingInstance::new(deadlines, positions, targets).map_err(value_err)?;
    let outcome = kvisits::pm::solve_exact(&pm);
    let matching = outcome.matching().map(|m| {
        m.triples
            .iter()
            .map(|t| (pm.deadlines()[t.d_index], pm.positions()[t.a_index], pm.targets()[t.t_index]))
            .collect()
    });
    Ok((outcome.is_feasible(), matching))
}

/// Exhaustive-search ground truth. Returns `("feasible", schedule)`,
/// `("infeasible", None)` or `("budget-exhausted", None)`.
#[pyfunction]
#[pyo3(signature = (deadlines, k, max_nodes=None))]
fn oracle_kvisits(
    deadlines: Vec<i64>,
    k: usize,
    max_nodes: Option<u64>,
) -> PyResult<(String, Option<Vec<usize>>)> {
    let inst = instance(deadlines, k)?;
    let budget = max_nodes.map_or_else(SearchBudget::default, SearchBudget::new);
    Ok(match oracle_kv(&inst, budget) {
        OracleOutcome::Feasible(s) => ("feasible".into(), Some(s.entries().to_vec())),
        OracleOutcome::Infeasible => ("infeasible".into(), None),
        OracleOutcome::BudgetExhausted => ("budget-exhausted".into(), None),
    })
}

/// Runs the full balanced-matching-to-scheduling chain. Returns a status
/// and, when the chain reaches the scheduling stage, the deadline list of
/// the produced 2-visits instance.
#[pyfunction]
fn rn3dm_to_two_visits(a: Vec<i64>, sigma: i64) -> PyResult<(String, Option<Vec<i64>>)> {
    let source = Rn3dmInstance::new(a, sigma).map_err(value_err)?;
    if rn3dm_trivially_infeasible(&source) {
        return Ok(("infeasible-at-entry".into(), None));
    }
    let in3dm = rn3dm_to_in3dm(&source).map_err(value_err)?;
    let normalized = match in3dm_normalize(&in3dm).map_err(value_err)? {
        NormalizeOutcome::TrivialYes => return Ok(("feasible-at-normalize".into(), None)),
        NormalizeOutcome::TrivialNo => return Ok(("infeasible-at-normalize".into(), None)),
        NormalizeOutcome::Normalized(out) => out,
    };
    let pm = in3dm_to_pm(&normalized).map_err(value_err)?;
    let last = *pm.positions().last().unwrap();
    let cleared = if pm.targets()[0] > last {
        pm
    } else {
        pm_shift(&pm, last.max(last + 1 - pm.targets()[0]))
    };
    match pm_to_two_visits(&cleared).map_err(value_err)? {
        PmToTwoVisitsOutcome::Reduced(inst) => {
            Ok(("reduced".into(), Some(inst.deadlines().to_vec())))
        }
        PmToTwoVisitsOutcome::TrivialNo => Ok(("infeasible-at-encoding".into(), None)),
    }
}

/// Per-occurrence deadline rows that force `k_target` visits to behave like
/// the source 2-visits instance.
#[pyfunction]
fn two_visits_to_var_k(deadlines: Vec<i64>, k_target: usize) -> PyResult<Vec<Vec<i64>>> {
    if k_target < 2 {
        return Err(value_err("k_target must be at least 2"));
    }
    let inst = instance(deadlines, 2)?;
    Ok(to_var_k(&inst, k_target).rows().to_vec())
}

/// Validates a schedule against per-occurrence deadline rows; same return
/// shape as `verify_kvisits`.
#[pyfunction]
fn verify_var_kvisits(
    rows: Vec<Vec<i64>>,
    k: usize,
    schedule: Vec<usize>,
) -> PyResult<Option<(String, usize, usize, i64, i64)>> {
    let inst = VarKVisitsInstance::new(rows, k).map_err(value_err)?;
    Ok(verdict_to_py(verify_var_kv(&inst, &Schedule::new(schedule))))
}

/// Two-deadline-with-threshold rows `(d1, d2, t)` equivalent to the source
/// 2-visits instance under perpetual scheduling.
#[pyfunction]
fn two_visits_to_threshold_pinwheel(
    deadlines: Vec<i64>,
) -> PyResult<(Vec<i64>, Vec<i64>, Vec<i64>)> {
    let inst = instance(deadlines, 2)?;
    let out = two_visits_to_threshold_pws(&inst);
    Ok((out.d1().to_vec(), out.d2().to_vec(), out.thresholds().to_vec()))
}

#[pymodule]
fn kvisits_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(discretize, m)?)?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(solve_one_visit, m)?)?;
    m.add_function(wrap_pyfunction!(solve_two_visits, m)?)?;
    m.add_function(wrap_pyfunction!(verify_kvisits, m)?)?;
    m.add_function(wrap_pyfunction!(solve_position_matching, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_kvisits, m)?)?;
    m.add_function(wrap_pyfunction!(rn3dm_to_two_visits, m)?)?;
    m.add_function(wrap_pyfunction!(two_visits_to_var_k, m)?)?;
    m.add_function(wrap_pyfunction!(verify_var_kvisits, m)?)?;
    m.add_function(wrap_pyfunction!(two_visits_to_threshold_pinwheel, m)?)?;
    Ok(())
}
