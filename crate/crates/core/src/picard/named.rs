//! The canonical divisor and the divisors built from a biplane on `M̄_{0,12}`.

use super::DivisorClass;
use crate::biplane::{Biplane, POINTS};
use crate::error::{Error, Result};
use crate::setcore::{GeneratorKey, SubsetMask};

const N: usize = 12;

/// `K = -Σ Δ_{{i}} - 2 Σ Δ_{S,T}`.
pub fn canonical_k(n: usize) -> Result<DivisorClass> {
    let mut k = DivisorClass::zero(n)?;
    for key in GeneratorKey::all(n) {
        k.add_term(key, if key.is_psi(n) { -1 } else { -2 });
    }
    Ok(k)
}

/// `E_S = Δ_{S ∪ {n}}`, keyed by `{1..n-1} \ S`.
pub fn e_class(s: SubsetMask, n: usize) -> Result<DivisorClass> {
    DivisorClass::delta(s.with(n), n)
}

fn check_twelve(n: usize) -> Result<()> {
    if n != N {
        return Err(Error::Unsupported(format!("this divisor is only defined for n = {N}, not {n}")));
    }
    Ok(())
}

/// `-5E_∅ - 4ΣE_i - 3ΣE_{ij} - 2ΣE_{ijk} - ΣE_{ijkl}` over subsets of `[11]`.
pub fn build_d0(n: usize) -> Result<DivisorClass> {
    check_twelve(n)?;
    let ground = SubsetMask::full(POINTS);
    let terms = ground
        .subsets()
        .filter(|s| s.len() <= 4)
        .map(|s| (s.with(N), s.len() as i64 - 5));
    DivisorClass::from_terms(N, terms)
}

/// `Σ_{B∈P} (Δ_B + Σ_{i∉B} Δ_{B∪{i}})` with `i` over `{1..12} \ B`; the
/// `i = 12` term is `E_B`.
pub fn build_dp_prime(b: &Biplane) -> Result<DivisorClass> {
    let mut terms = Vec::new();
    for &blk in b.blocks() {
        terms.push((blk, 1));
        for i in SubsetMask::full(N).difference(blk).iter() {
            terms.push((blk.with(i), 1));
        }
    }
    DivisorClass::from_terms(N, terms)
}

/// `D_0 - ΣE_S` over the 5- and 6-subsets of `[11]` that equal or are
/// disjoint from some block.
pub fn build_dp(b: &Biplane) -> Result<DivisorClass> {
    let mut d = build_d0(N)?;
    let ground = SubsetMask::full(POINTS);
    for s in ground.subsets().filter(|s| s.len() == 5 || s.len() == 6) {
        if b.blocks().iter().any(|&blk| blk == s || blk.is_disjoint(s)) {
            d = &d - &e_class(s, N)?;
        }
    }
    Ok(d)
}
