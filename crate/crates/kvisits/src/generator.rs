//! Seeded random instance generators for test corpora and benchmarks.
//!
//! All generators take an explicit RNG so corpora are reproducible
//! bit-for-bit from a seed. None of them guarantee feasibility unless the
//! function name says so; label instances with an oracle when ground truth
//! is needed.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::instances::KVisitsInstance;
use crate::pm::PositionMatchingInstance;
use crate::reductions::Rn3dmInstance;

/// Uniform random deadlines in `[1, max_deadline]`, sorted.
pub fn gen_kvisits(n: usize, k: usize, max_deadline: i64, rng: &mut impl Rng) -> KVisitsInstance {
    assert!(n >= 1 && max_deadline >= 1);
    let deadlines: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=max_deadline)).collect();
    KVisitsInstance::new(deadlines, k).expect("positive deadlines")
}

/// Strictly increasing deadlines `d_i = i + r_i` with `r` a sorted sample
/// from `[1, n]`: deadlines are distinct, bounded by `2n`, and discretize to
/// themselves, which keeps large instances on the all-distinct solving path.
pub fn gen_distinct_kvisits(n: usize, k: usize, rng: &mut impl Rng) -> KVisitsInstance {
    assert!(n >= 1);
    let mut offsets: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=n as i64)).collect();
    offsets.sort_unstable();
    let deadlines: Vec<i64> = offsets
        .iter()
        .enumerate()
        .map(|(i, &r)| i as i64 + 1 + r)
        .collect();
    KVisitsInstance::new(deadlines, k).expect("positive deadlines")
}

/// Random position matching instance: deadlines sampled from `[n, max(2n,
/// max_deadline)]` so the discretized sequence is always positive, targets a
/// uniform distinct sample from the plausible range `(a_1, d_n + a_n]`.
pub fn gen_pm(n: usize, max_deadline: i64, rng: &mut impl Rng) -> PositionMatchingInstance {
    assert!(n >= 1);
    let lo = n as i64;
    let hi = max_deadline.max(2 * n as i64);
    let mut deadlines: Vec<i64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    deadlines.sort_unstable();

    let probe = KVisitsInstance::new(deadlines.clone(), 2).expect("positive deadlines");
    let positions = probe.discretize().values().to_vec();
    debug_assert!(positions[0] >= 1, "deadlines >= n keep the sequence positive");

    let t_lo = positions[0] + 1;
    let t_hi = deadlines[n - 1] + positions[n - 1];
    let mut targets = std::collections::BTreeSet::new();
    while targets.len() < n {
        targets.insert(rng.gen_range(t_lo..=t_hi));
    }
    PositionMatchingInstance::new(deadlines, positions, targets.into_iter().collect())
        .expect("positions recomputed from deadlines")
}

/// Feasible-by-construction balanced matching instance: two random
/// permutations `b, c` of `[n]` and a triple sum `sigma` define
/// `a_i = sigma - b_i - c_i`; resamples until every element lands in
/// `[1, max_value]`.
pub fn gen_rn3dm_yes(n: usize, max_value: i64, rng: &mut impl Rng) -> Rn3dmInstance {
    assert!(n >= 1 && max_value >= 1);
    let sigma_lo = n as i64 + 3;
    let sigma_hi = sigma_lo.max(max_value + 2);
    for _ in 0..100_000 {
        let sigma = rng.gen_range(sigma_lo..=sigma_hi);
        let mut b: Vec<i64> = (1..=n as i64).collect();
        let mut c: Vec<i64> = (1..=n as i64).collect();
        b.shuffle(rng);
        c.shuffle(rng);
        let a: Vec<i64> = (0..n).map(|i| sigma - b[i] - c[i]).collect();
        if a.iter().all(|&v| (1..=max_value).contains(&v)) {
            return Rn3dmInstance::new(a, sigma).expect("construction balances the sum");
        }
    }
    panic!("no feasible instance shape within [1, {max_value}] for n = {n}");
}

/// Oracle-labeling corpus candidate: a feasible-by-construction instance,
/// half the time perturbed by moving one unit between two elements (which
/// keeps the balance identity but usually breaks feasibility). The caller
/// decides the true label with an oracle.
pub fn gen_rn3dm_candidate(n: usize, max_value: i64, rng: &mut impl Rng) -> Rn3dmInstance {
    let base = gen_rn3dm_yes(n, max_value, rng);
    if n < 2 || rng.gen_bool(0.5) {
        return base;
    }
    for _ in 0..100 {
        let mut a = base.a().to_vec();
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        a[i] += 1;
        a[j] -= 1;
        if a.iter().all(|&v| (1..=max_value).contains(&v)) {
            return Rn3dmInstance::new(a, base.sigma()).expect("perturbation preserves the sum");
        }
    }
    base
}
