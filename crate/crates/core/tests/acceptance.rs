//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs as a plain binary (`harness = false`) so the lines always
//! reach the terminal.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use fnef::biplane::{automorphism_group_order, build_biplane_qr, verify_biplane};
use fnef::curves::{
    build_cp, check_relations, pair_dense, pair_divisor_fcurve, pair_divisor_functional,
    CurveFunctional,
};
use fnef::fcone::{
    extremality_rank, fcurve_span_rank, fnef_check, par_scan, projection_formula_mismatches,
    sample_fcurves, verify_counterexample, verify_decomposition, DEFAULT_PRIMES,
};
use fnef::picard::{
    build_d0, build_dp, eliminate_psi, pullback_forgetful, reduce_canonical, relation_row,
    relation_system, DivisorClass,
};
use fnef::setcore::{
    count_fcurves, enumerate_fcurves, FCurve, GeneratorKey, SubsetMask,
};
use num_rational::BigRational;
use num_traits::Zero;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:.2?}, limit {limit:?}"))
}

/// Exact rank over the rationals by dense elimination.
fn exact_rank(rows: &[Vec<i64>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut mat: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..mat.len()).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(rank, p);
        for r in rank + 1..mat.len() {
            if mat[r][col].is_zero() {
                continue;
            }
            let f = &mat[r][col] / &mat[rank][col];
            for c in col..ncols {
                let t = &f * &mat[rank][c];
                mat[r][c] -= t;
            }
        }
        rank += 1;
    }
    rank
}

/// Value of a generator on a curve, read off the blocks directly: +1 for a
/// union of two blocks, -1 for a single block, 0 otherwise.
fn oracle_generator_value(side: SubsetMask, c: &FCurve, n: usize) -> i64 {
    let comp = side.complement(n);
    let b = c.blocks();
    let mut union_hit = false;
    for i in 0..4 {
        for j in i + 1..4 {
            let u = b[i].union(b[j]);
            union_hit |= u == side || u == comp;
        }
    }
    let block_hit = b.iter().any(|x| *x == side || *x == comp);
    match (union_hit, block_hit) {
        (true, false) => 1,
        (false, true) => -1,
        (false, false) => 0,
        (true, true) => panic!("cases overlap for {{{side}}} on {c}"),
    }
}

fn ac1_fcurve_count() -> Outcome {
    let t = Instant::now();
    let count = count_fcurves(12).map_err(|e| e.to_string())?;
    ensure(count == 611_501, format!("count_fcurves(12) = {count}"))?;
    let mut seen = HashSet::with_capacity(count as usize);
    for c in enumerate_fcurves(12).unwrap() {
        let key = c.blocks().iter().fold(0u64, |acc, b| acc << 16 | b.bits() as u64);
        ensure(seen.insert(key), format!("duplicate curve {c}"))?;
    }
    ensure(seen.len() as u64 == count, format!("enumerated {} curves", seen.len()))?;
    within(t, Duration::from_secs(5))?;
    Ok(format!("S(12,4) = {count}, {} distinct enumerated in {:.2?}", seen.len(), t.elapsed()))
}

fn ac2_biplane() -> Outcome {
    let t = Instant::now();
    let b = build_biplane_qr();
    let r = verify_biplane(&b).map_err(|e| e.to_string())?;
    ensure(
        (r.pair_replication, r.point_replication, r.block_intersections_ok) == (2, 5, true),
        format!("design report {r:?}"),
    )?;
    let order = automorphism_group_order(&b);
    ensure(order == 660, format!("automorphism order {order}"))?;
    within(t, Duration::from_secs(60))?;
    Ok(format!("(λ, r) = (2, 5), |Aut| = {order} in {:.2?}", t.elapsed()))
}

fn ac3_counterexample() -> Outcome {
    let t = Instant::now();
    let b = build_biplane_qr();
    let rep = verify_counterexample(&b).map_err(|e| e.to_string())?;
    ensure(rep.a_fnef.curves_scanned == 611_501, "scan did not cover every F-curve")?;
    ensure(rep.a_fnef.min_value == 0 && rep.a_fnef.nonnegative, format!("(a) min {}", rep.a_fnef.min_value))?;
    let cp = build_cp(&b).unwrap();
    let values_ok = GeneratorKey::all(12)
        .filter(|k| !k.is_psi(12))
        .all(|k| matches!(cp.value(k), 0 | 1));
    ensure(values_ok && rep.b_boundary_min == 0, "(b) boundary values outside {0,1}")?;
    ensure(rep.c_k_pairing == 13, format!("(c) K·C_P = {}", rep.c_k_pairing))?;
    ensure(rep.d_dp_pairing == -1, format!("(d) D_P·C_P = {}", rep.d_dp_pairing))?;
    ensure(rep.verdict, "verdict false")?;
    within(t, Duration::from_secs(30))?;
    Ok(format!(
        "min D_P·C = 0 over 611501 curves ({} zeros), C_P boundary ∈ {{0,1}}, K·C_P = 13, D_P·C_P = -1 in {:.2?}",
        rep.a_fnef.zero_count,
        t.elapsed()
    ))
}

fn ac4_decomposition() -> Outcome {
    let rep = verify_decomposition(&build_biplane_qr()).map_err(|e| e.to_string())?;
    ensure(rep.reduced_equal, "reduced coordinates differ")?;
    ensure(rep.curves_compared == 611_501, format!("compared {} curves", rep.curves_compared))?;
    ensure(rep.pairing_mismatches == 0, format!("{} pairing mismatches", rep.pairing_mismatches))?;
    Ok("reduce(D_P) = reduce(D_0 - D'_P); identical pairings on all 611501 curves".into())
}

fn ac5_d0_formula() -> Outcome {
    let d0 = build_d0(12).unwrap().dense();
    let parts = par_scan(12, || (0u64, 0u64), |acc, c| {
        let s = c.block_sizes();
        let (lo, hi) = (*s.iter().min().unwrap() as i64, *s.iter().max().unwrap() as i64);
        let closed = if hi >= 6 { 0 } else { lo.min(6 - hi) };
        acc.0 += 1;
        if pair_dense(&d0, c) != closed {
            acc.1 += 1;
        }
    })
    .unwrap();
    let (total, bad) = parts.iter().fold((0, 0), |a, p| (a.0 + p.0, a.1 + p.1));
    ensure(total == 611_501 && bad == 0, format!("{bad} mismatches over {total} curves"))?;
    Ok(format!("closed form matches the expansion on {total} curves"))
}

fn ac6_dimensions() -> Outcome {
    let sys = relation_system(12).map_err(|e| e.to_string())?;
    ensure(sys.rank() == 66, format!("relation rank {} at n=12", sys.rank()))?;
    ensure(sys.ambient_dim() == 1981, format!("ambient dim {}", sys.ambient_dim()))?;
    let ranks = fcurve_span_rank(12, &DEFAULT_PRIMES).map_err(|e| e.to_string())?;
    ensure(DEFAULT_PRIMES[0] != DEFAULT_PRIMES[1], "primes must differ")?;
    ensure(ranks.iter().all(|r| r.rank == 1981), format!("F-curve span ranks {ranks:?}"))?;

    let n = 5;
    let small = relation_system(n).unwrap();
    let width = (1 << (n - 1)) - 1;
    let dense = |d: &DivisorClass| -> Vec<i64> {
        let mut v = vec![0; width];
        for (k, c) in d.terms() {
            v[k.index() - 1] = c;
        }
        v
    };
    let rel_rows: Vec<Vec<i64>> = small.rows().iter().map(dense).collect();
    let rel_rank = exact_rank(&rel_rows);
    let curve_rows: Vec<Vec<i64>> = enumerate_fcurves(n)
        .unwrap()
        .map(|c| {
            let f = CurveFunctional::from_fcurve(&c);
            GeneratorKey::all(n).map(|k| f.value(k)).collect()
        })
        .collect();
    let curve_rank = exact_rank(&curve_rows);
    let modp = fcurve_span_rank(n, &DEFAULT_PRIMES).unwrap();
    ensure(
        (small.rank(), rel_rank, small.ambient_dim(), curve_rank) == (10, 10, 5, 5)
            && modp.iter().all(|r| r.rank == 5),
        format!(
            "n=5: relation rank {}/{rel_rank}, dim {}, curve rank {curve_rank}, mod p {modp:?}",
            small.rank(),
            small.ambient_dim()
        ),
    )?;
    Ok(format!(
        "n=12: relations 66, dim 1981, F-curve rank 1981 mod {:?}; n=5: 10, 5, 5 (exact)",
        DEFAULT_PRIMES
    ))
}

fn ac7_extremality() -> Outcome {
    let t = Instant::now();
    let dp = build_dp(&build_biplane_qr()).unwrap();
    let rep = extremality_rank(&dp, &DEFAULT_PRIMES).map_err(|e| e.to_string())?;
    ensure(rep.ambient_dim == 1981, format!("ambient dim {}", rep.ambient_dim))?;
    ensure(rep.rank_mod_p.len() == 2, "expected two primes")?;
    ensure(
        rep.rank_mod_p.iter().all(|r| r.rank == 1980),
        format!("ranks {:?}", rep.rank_mod_p),
    )?;
    ensure(rep.certified_extremal, "not certified")?;
    within(t, Duration::from_secs(600))?;
    Ok(format!(
        "{} zero curves, rank 1980 of 1981 mod both primes in {:.2?}",
        rep.zero_set_size,
        t.elapsed()
    ))
}

fn ac8_pullback() -> Outcome {
    let dp = build_dp(&build_biplane_qr()).unwrap();
    let boundary = eliminate_psi(&dp).map_err(|e| e.to_string())?;
    ensure(
        reduce_canonical(&boundary).unwrap() == reduce_canonical(&dp).unwrap(),
        "psi elimination changed the class",
    )?;
    let up = pullback_forgetful(&boundary).map_err(|e| e.to_string())?;
    let rep = fnef_check(&up);
    let s13 = count_fcurves(13).unwrap();
    let enumerated = enumerate_fcurves(13).unwrap().count() as u64;
    ensure(s13 == enumerated && rep.curves_scanned == s13, format!("S(13,4) {s13} vs {enumerated}"))?;
    ensure(rep.nonnegative, format!("π*D_P pairs {} with {}", rep.min_value, rep.argmin))?;

    let mut exhaustive = 0;
    for key in GeneratorKey::all(6).filter(|k| !k.is_psi(6)) {
        let d = DivisorClass::delta(key.side(), 6).unwrap();
        let bad = projection_formula_mismatches(&d, enumerate_fcurves(7).unwrap()).unwrap();
        ensure(bad == 0, format!("projection formula fails for Δ{{{key}}} at 6→7"))?;
        exhaustive += 1;
    }
    let samples = sample_fcurves(13, 100_000, 0x5eed).unwrap();
    let bad = projection_formula_mismatches(&boundary, samples).unwrap();
    ensure(bad == 0, format!("{bad} projection mismatches at 12→13"))?;
    Ok(format!(
        "π*D_P F-nef on all {s13} curves (min {}); projection formula on {exhaustive} generators at 6→7 and 10^5 samples at 12→13",
        rep.min_value
    ))
}

fn ac9_properties() -> Outcome {
    let b = build_biplane_qr();
    let dp = build_dp(&b).unwrap();
    let cp = build_cp(&b).unwrap();

    // relation invariance
    let base = fnef_check(&dp);
    let mut shifted = dp.clone();
    for (i, j, k) in [(1, 2, 3), (4, 12, -2), (7, 9, 5)] {
        shifted = &shifted + &(&relation_row(i, j, 12).unwrap() * k);
    }
    let moved = fnef_check(&shifted);
    ensure(
        (base.min_value, base.zero_count, base.argmin) == (moved.min_value, moved.zero_count, moved.argmin),
        "F-nef scan changed under relations",
    )?;
    ensure(
        pair_divisor_functional(&shifted, &cp).unwrap() == -1,
        "C_P pairing changed under relations",
    )?;
    for c in sample_fcurves(12, 2000, 7).unwrap() {
        ensure(
            pair_divisor_fcurve(&dp, &c).unwrap() == pair_divisor_fcurve(&shifted, &c).unwrap(),
            format!("pairing changed on {c}"),
        )?;
    }

    // relation compatibility and case exclusivity, exhaustive for n ≤ 7
    let mut curves = 0;
    for n in 4..=7 {
        for c in enumerate_fcurves(n).unwrap() {
            let f = CurveFunctional::from_fcurve(&c);
            ensure(check_relations(&f).ok, format!("{c} violates a relation"))?;
            for key in GeneratorKey::all(n) {
                let want = oracle_generator_value(key.side(), &c, n);
                ensure(f.value(key) == want, format!("{c} on {{{key}}}"))?;
            }
            curves += 1;
        }
    }

    // schedule independence
    let mut reports = Vec::new();
    for threads in [1, 2, 4, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        reports.push(pool.install(|| fnef_check(&dp)));
    }
    ensure(reports.windows(2).all(|w| w[0] == w[1]), "scan depends on worker count")?;
    Ok(format!(
        "relation invariance, {curves} curves checked for n ≤ 7, identical scans on 1/2/4/8 workers"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("AC1 F-curve count", ac1_fcurve_count),
        ("AC2 biplane", ac2_biplane),
        ("AC3 counterexample", ac3_counterexample),
        ("AC4 decomposition", ac4_decomposition),
        ("AC5 D_0 closed form", ac5_d0_formula),
        ("AC6 dimensions", ac6_dimensions),
        ("AC7 extremality", ac7_extremality),
        ("AC8 pullback", ac8_pullback),
        ("AC9 properties", ac9_properties),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let res = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match res {
            Ok(detail) => println!("PASS  {name}: {detail} [{:.2?}]", t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why} [{:.2?}]", t.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
