//! Intersection numbers of generators with F-curves, curve classes given by
//! their values on all generators, and pushforward along forgetful maps.
//!
//! For an F-curve with blocks `A1..A4` and a generator `Δ_S`:
//!
//! * `+1` when `S` or its complement is a union of two blocks,
//! * `-1` when `S` or its complement is a single block,
//! * `0` otherwise.
//!
//! Up to complement there are exactly three two-block unions (`A1∪Aj`) and
//! four single blocks, so a divisor pairs with a curve in seven lookups.

use serde::Serialize;

use crate::biplane::Biplane;
use crate::error::{Error, Result};
use crate::picard::{DenseDivisor, DivisorClass};
use crate::setcore::{
    canonical_side, FCurve, GeneratorKey, GeneratorKind, MarkingSet, SubsetMask,
};

pub fn pair_generator_fcurve(g: GeneratorKey, c: &FCurve) -> Result<i64> {
    let n = c.n();
    GeneratorKey::new(g.side(), n)?;
    let s = g.side();
    if c.pair_unions().iter().any(|u| canonical_side(*u, n) == s) {
        Ok(1)
    } else if c.blocks().iter().any(|b| canonical_side(*b, n) == s) {
        Ok(-1)
    } else {
        Ok(0)
    }
}

pub fn pair_divisor_fcurve(d: &DivisorClass, c: &FCurve) -> Result<i64> {
    d.same_n(c.n())?;
    Ok(pair_dense(&d.dense(), c))
}

/// Scan-loop pairing against a dense coefficient table.
#[inline(always)]
pub fn pair_dense(d: &DenseDivisor, c: &FCurve) -> i64 {
    debug_assert_eq!(d.n(), c.n());
    let [a, b, x, y] = c.blocks();
    d.at(a.union(b)) + d.at(a.union(x)) + d.at(a.union(y)) - d.at(a) - d.at(b) - d.at(x) - d.at(y)
}

/// A curve class given by its intersection numbers with every generator.
/// Meaningful on divisor classes only when [`check_relations`] passes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurveFunctional {
    n: usize,
    values: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub ok: bool,
    /// First pair `(i, j)` whose relation sum is nonzero, with that sum.
    pub first_violation: Option<(usize, usize, i64)>,
}

impl CurveFunctional {
    pub fn zero(n: usize) -> Result<Self> {
        let ms = MarkingSet::new(n)?;
        Ok(CurveFunctional { n, values: vec![0; ms.table_len()] })
    }

    /// The intersection numbers of an F-curve with all generators.
    pub fn from_fcurve(c: &FCurve) -> Self {
        let n = c.n();
        let mut f = CurveFunctional::zero(n).expect("curve has a valid n");
        for u in c.pair_unions() {
            f.values[canonical_side(u, n).bits() as usize] = 1;
        }
        for b in c.blocks() {
            f.values[canonical_side(b, n).bits() as usize] = -1;
        }
        f
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, key: GeneratorKey) -> i64 {
        self.values[key.index()]
    }

    pub fn set(&mut self, key: GeneratorKey, v: i64) {
        self.values[key.index()] = v;
    }

    /// Value on `Δ_{{i}} = -ψ_i`.
    pub fn psi(&self, marking: usize) -> Result<i64> {
        Ok(self.value(GeneratorKey::psi(marking, self.n)?))
    }

    pub fn set_psi(&mut self, marking: usize, v: i64) -> Result<()> {
        let k = GeneratorKey::psi(marking, self.n)?;
        self.set(k, v);
        Ok(())
    }

    /// `(key, value)` over boundary keys with nonzero value, ascending.
    pub fn boundary_values(&self) -> impl Iterator<Item = (GeneratorKey, i64)> + '_ {
        GeneratorKey::all(self.n)
            .filter(|k| !k.is_psi(self.n))
            .map(|k| (k, self.value(k)))
            .filter(|(_, v)| *v != 0)
    }

    /// Smallest value over all boundary keys (zeros included).
    pub fn boundary_min(&self) -> i64 {
        GeneratorKey::all(self.n)
            .filter(|k| matches!(k.kind(self.n), GeneratorKind::Boundary))
            .map(|k| self.value(k))
            .min()
            .unwrap_or(0)
    }
}

/// `C_P`: value 1 on the eleven blocks, 0 on other boundary keys, `-2` on
/// `-ψ_12` and `-3` on `-ψ_i` for `i ≤ 11`.
pub fn build_cp(b: &Biplane) -> Result<CurveFunctional> {
    const N: usize = 12;
    let mut f = CurveFunctional::zero(N)?;
    for &blk in b.blocks() {
        f.set(GeneratorKey::new(blk, N)?, 1);
    }
    for i in 1..N {
        f.set_psi(i, -3)?;
    }
    f.set_psi(N, -2)?;
    Ok(f)
}

/// For every `i < j`, sums `f` over all `S` with `i ∈ S`, `j ∉ S`.
pub fn check_relations(f: &CurveFunctional) -> RelationCheck {
    let n = f.n;
    for i in 1..=n {
        for j in i + 1..=n {
            let rest = SubsetMask::full(n).without(i).without(j);
            let sum: i64 = rest
                .subsets()
                .map(|t| f.values[canonical_side(t.with(i), n).bits() as usize])
                .sum();
            if sum != 0 {
                return RelationCheck { ok: false, first_violation: Some((i, j, sum)) };
            }
        }
    }
    RelationCheck { ok: true, first_violation: None }
}

pub fn pair_divisor_functional(d: &DivisorClass, f: &CurveFunctional) -> Result<i64> {
    d.same_n(f.n)?;
    Ok(d.terms().map(|(k, c)| c * f.value(k)).sum())
}

/// Image of an F-curve under the map forgetting its last marking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pushforward {
    /// The curve had `{n+1}` as a block and is collapsed to a point.
    Contracted,
    Curve(FCurve),
}

pub fn pushforward_fcurve(c: &FCurve) -> Result<Pushforward> {
    let up = c.n();
    let n = up - 1;
    if n < 4 {
        return Err(Error::InvalidInput(format!("cannot forget a marking from n = {up}")));
    }
    let last = SubsetMask::singleton(up);
    if c.blocks().contains(&last) {
        return Ok(Pushforward::Contracted);
    }
    let blocks = c.blocks().map(|b| b.difference(last));
    Ok(Pushforward::Curve(FCurve::new(blocks, n)?))
}
