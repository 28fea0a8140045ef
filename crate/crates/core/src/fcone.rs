//! F-nef scans, the four-part counterexample check, non-boundary
//! certificates and the rank certificate for extremal rays of the F-nef cone.

use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;
use rayon::prelude::*;
use serde::Serialize;

use crate::biplane::{verify_biplane, Biplane};
use crate::curves::{
    build_cp, check_relations, pair_dense, pair_divisor_functional, pushforward_fcurve,
    CurveFunctional, Pushforward,
};
use crate::error::{Error, Result};
use crate::modrank::ModpRank;
use crate::picard::{
    build_d0, build_dp, build_dp_prime, canonical_k, pullback_forgetful, reduce_canonical,
    relation_system, DivisorClass, RelationSystem,
};
use crate::setcore::{
    canonical_generator, enumerate_fcurves, rgs_prefixes, FCurve, FCurves, MarkingSet, SubsetMask,
};

/// Two primes just below `2^31`.
pub const DEFAULT_PRIMES: [u64; 2] = [2_147_483_647, 2_147_483_629];

const PREFIX_LEN: usize = 7;

/// Folds every F-curve on `n` markings in parallel. The stream is split by
/// restricted-growth prefix and one accumulator per prefix is returned in
/// enumeration order, so combining them left to right is schedule-free.
pub fn par_scan<A, I, F>(n: usize, init: I, step: F) -> Result<Vec<A>>
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, &FCurve) + Sync,
{
    let prefixes = rgs_prefixes(n, PREFIX_LEN)?;
    Ok(prefixes
        .par_iter()
        .map(|p| {
            let mut acc = init();
            for c in FCurves::with_prefix(n, p) {
                step(&mut acc, &c);
            }
            acc
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FNefReport {
    pub n: usize,
    pub curves_scanned: u64,
    pub min_value: i64,
    /// First minimizer in enumeration order.
    pub argmin: FCurve,
    pub zero_count: u64,
    pub nonnegative: bool,
}

#[derive(Clone, Copy)]
struct ScanAcc {
    count: u64,
    min: i64,
    argmin: Option<FCurve>,
    zeros: u64,
}

pub fn fnef_check(d: &DivisorClass) -> FNefReport {
    let n = d.n();
    let dense = d.dense();
    let parts = par_scan(
        n,
        || ScanAcc { count: 0, min: i64::MAX, argmin: None, zeros: 0 },
        |acc, c| {
            let v = pair_dense(&dense, c);
            acc.count += 1;
            if v == 0 {
                acc.zeros += 1;
            }
            if v < acc.min {
                acc.min = v;
                acc.argmin = Some(*c);
            }
        },
    )
    .expect("divisor classes carry a valid n");
    let mut total = ScanAcc { count: 0, min: i64::MAX, argmin: None, zeros: 0 };
    for p in parts {
        total.count += p.count;
        total.zeros += p.zeros;
        if p.min < total.min {
            total.min = p.min;
            total.argmin = p.argmin;
        }
    }
    FNefReport {
        n,
        curves_scanned: total.count,
        min_value: total.min,
        argmin: total.argmin.expect("n >= 4 has at least one F-curve"),
        zero_count: total.zeros,
        nonnegative: total.min >= 0,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub a_fnef: FNefReport,
    pub b_boundary_min: i64,
    pub c_k_pairing: i64,
    pub d_dp_pairing: i64,
    pub verdict: bool,
}

/// (a) `D_P` is F-nef, (b) `C_P` is nonnegative on boundary divisors,
/// (c) `K·C_P ≥ 0`, (d) `D_P·C_P < 0`.
pub fn verify_counterexample(b: &Biplane) -> Result<CounterexampleReport> {
    verify_biplane(b)?;
    let dp = build_dp(b)?;
    let cp = build_cp(b)?;
    let a = fnef_check(&dp);
    let b_min = cp.boundary_min();
    let c = pair_divisor_functional(&canonical_k(12)?, &cp)?;
    let d = pair_divisor_functional(&dp, &cp)?;
    let verdict = a.nonnegative && b_min >= 0 && c >= 0 && d < 0;
    Ok(CounterexampleReport { a_fnef: a, b_boundary_min: b_min, c_k_pairing: c, d_dp_pairing: d, verdict })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Certified,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonBoundaryCertificate {
    pub functional_boundary_min: i64,
    pub pairing: i64,
    pub k_pairing: i64,
    /// Not numerically an effective sum of boundary divisors.
    pub not_boundary: Verdict,
    /// Not `cK + E` with `c ≥ 0` and `E` an effective boundary sum.
    pub not_k_plus_boundary: Verdict,
}

/// A relation-compatible curve class that is nonnegative on every boundary
/// divisor but negative on `d` shows `d` is not an effective boundary sum.
pub fn certify_not_boundary(d: &DivisorClass, f: &CurveFunctional) -> Result<NonBoundaryCertificate> {
    let check = check_relations(f);
    if !check.ok {
        return Err(Error::InvalidInput(format!(
            "curve functional violates relation {:?}",
            check.first_violation
        )));
    }
    let bmin = f.boundary_min();
    let pairing = pair_divisor_functional(d, f)?;
    let k_pairing = pair_divisor_functional(&canonical_k(d.n())?, f)?;
    let nb = bmin >= 0 && pairing < 0;
    let verdict = |ok: bool| if ok { Verdict::Certified } else { Verdict::Inconclusive };
    Ok(NonBoundaryCertificate {
        functional_boundary_min: bmin,
        pairing,
        k_pairing,
        not_boundary: verdict(nb),
        not_k_plus_boundary: verdict(nb && k_pairing >= 0),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub reduced_equal: bool,
    pub pairing_mismatches: u64,
    pub curves_compared: u64,
}

/// Compares `D_P` with `D_0 - D'_P` both in reduced coordinates and by
/// pairing with every F-curve.
pub fn verify_decomposition(b: &Biplane) -> Result<DecompositionReport> {
    let dp = build_dp(b)?;
    let diff = &build_d0(12)? - &build_dp_prime(b)?;
    let reduced_equal = reduce_canonical(&dp)? == reduce_canonical(&diff)?;
    let (x, y) = (dp.dense(), diff.dense());
    let parts = par_scan(12, || (0u64, 0u64), |acc, c| {
        acc.0 += 1;
        if pair_dense(&x, c) != pair_dense(&y, c) {
            acc.1 += 1;
        }
    })?;
    let (curves_compared, pairing_mismatches) =
        parts.into_iter().fold((0, 0), |a, p| (a.0 + p.0, a.1 + p.1));
    Ok(DecompositionReport { reduced_equal, pairing_mismatches, curves_compared })
}

/// Degree of `D_0` on an F-curve of `M̄_{0,12}` from its block sizes:
/// zero once a block has six or more markings, otherwise
/// `min(smallest block, 6 - largest block)`.
pub fn d0_closed_form(c: &FCurve) -> i64 {
    let sizes = c.block_sizes();
    let max = *sizes.iter().max().unwrap() as i64;
    let min = *sizes.iter().min().unwrap() as i64;
    if max >= 6 {
        0
    } else {
        min.min(6 - max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimeRank {
    pub prime: u64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtremalityReport {
    pub n: usize,
    pub ambient_dim: usize,
    pub zero_set_size: u64,
    pub rank_mod_p: Vec<PrimeRank>,
    pub certified_extremal: bool,
}

/// Intersection numbers of `c` with the non-pivot generators, which
/// determine the curve class on the quotient by the relations.
fn reduced_row(sys: &RelationSystem, c: &FCurve) -> Vec<(usize, i64)> {
    let n = c.n();
    let unions = c.pair_unions().into_iter().map(|s| (s, 1));
    let blocks = c.blocks().into_iter().map(|s| (s, -1));
    unions
        .chain(blocks)
        .filter_map(|(s, v)| {
            let key = canonical_generator(s, n).expect("proper nonempty block union");
            sys.free_slot(key).map(|slot| (slot, v))
        })
        .collect()
}

/// Rank mod each prime of the reduced rows of the curves accepted by `keep`.
fn rank_of_curves<K>(n: usize, primes: &[u64], keep: K) -> Result<Vec<PrimeRank>>
where
    K: Fn(&FCurve) -> bool + Sync,
{
    let sys = relation_system(n)?;
    let dim = sys.ambient_dim();
    for &p in primes {
        ModpRank::new(p, 0)?;
    }
    primes
        .par_iter()
        .map(|&p| {
            let mut elim = ModpRank::new(p, dim)?;
            for c in enumerate_fcurves(n)? {
                if keep(&c) {
                    elim.insert(&reduced_row(&sys, &c));
                }
            }
            Ok(PrimeRank { prime: p, rank: elim.rank() })
        })
        .collect()
}

/// Rank of the span of all F-curve classes, mod each prime.
pub fn fcurve_span_rank(n: usize, primes: &[u64]) -> Result<Vec<PrimeRank>> {
    rank_of_curves(n, primes, |_| true)
}

/// Certifies that an F-nef `d` spans an extremal ray: the F-curves it
/// annihilates must have rank `ambient_dim - 1`. Ranks mod p never exceed
/// the rational rank, which is at most `ambient_dim - 1` because `d` is a
/// nonzero solution, so hitting that value for any prime is exact.
pub fn extremality_rank(d: &DivisorClass, primes: &[u64]) -> Result<ExtremalityReport> {
    if primes.is_empty() {
        return Err(Error::InvalidInput("at least one prime is required".into()));
    }
    let n = d.n();
    let scan = fnef_check(d);
    if !scan.nonnegative {
        return Err(Error::NotFNef { curve: scan.argmin.to_string(), value: scan.min_value });
    }
    let dim = relation_system(n)?.ambient_dim();
    let dense = d.dense();
    let rank_mod_p = rank_of_curves(n, primes, |c| pair_dense(&dense, c) == 0)?;
    let certified_extremal = dim > 0 && rank_mod_p.iter().any(|r| r.rank + 1 == dim);
    Ok(ExtremalityReport {
        n,
        ambient_dim: dim,
        zero_set_size: scan.zero_count,
        rank_mod_p,
        certified_extremal,
    })
}

/// Counts F-curves `c` on `n + 1` markings where `π^*d · c ≠ d · π_*c`,
/// contracted curves pairing to zero. `d` must be boundary-only.
pub fn projection_formula_mismatches<I>(d: &DivisorClass, curves: I) -> Result<u64>
where
    I: IntoIterator<Item = FCurve>,
{
    let up = pullback_forgetful(d)?;
    let (low, high) = (d.dense(), up.dense());
    let mut bad = 0;
    for c in curves {
        if c.n() != up.n() {
            return Err(Error::InvalidInput(format!("curve {c} is not on {} markings", up.n())));
        }
        let lhs = pair_dense(&high, &c);
        let rhs = match pushforward_fcurve(&c)? {
            Pushforward::Contracted => 0,
            Pushforward::Curve(down) => pair_dense(&low, &down),
        };
        if lhs != rhs {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Uniformly random F-curves from a seeded generator (rejection sampling
/// over surjective labellings).
pub fn sample_fcurves(n: usize, count: usize, seed: u64) -> Result<Vec<FCurve>> {
    MarkingSet::new(n)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut blocks = [SubsetMask::EMPTY; 4];
        for i in 1..=n {
            let b = rng.gen_range(0..4);
            blocks[b] = blocks[b].with(i);
        }
        if blocks.iter().all(|b| !b.is_empty()) {
            out.push(FCurve::new(blocks, n)?);
        }
    }
    Ok(out)
}
