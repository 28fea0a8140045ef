//! Divisor classes as integer combinations of the generators `Δ_S`.

mod named;
mod relations;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use named::{build_d0, build_dp, build_dp_prime, canonical_k, e_class};
pub use relations::{reduce_canonical, relation_row, relation_system, ReducedClass, RelationSystem};

use crate::error::{Error, Result};
use crate::setcore::{
    canonical_generator, canonical_side, GeneratorKey, MarkingSet, SubsetMask,
};

/// A divisor class on `M̄_{0,n}`, stored sparsely by canonical key. Zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct DivisorClass {
    n: usize,
    coeffs: BTreeMap<GeneratorKey, i64>,
}

impl DivisorClass {
    pub fn zero(n: usize) -> Result<Self> {
        MarkingSet::new(n)?;
        Ok(DivisorClass { n, coeffs: BTreeMap::new() })
    }

    /// Sums terms given by arbitrary sides; each side is canonicalized.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SubsetMask, i64)>,
    {
        let mut d = DivisorClass::zero(n)?;
        for (s, c) in terms {
            d.add_term(canonical_generator(s, n)?, c);
        }
        Ok(d)
    }

    /// `Δ_S` as a single-term class.
    pub fn delta(s: SubsetMask, n: usize) -> Result<Self> {
        DivisorClass::from_terms(n, [(s, 1)])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, key: GeneratorKey, c: i64) {
        if c == 0 {
            return;
        }
        let slot = self.coeffs.entry(key).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.coeffs.remove(&key);
        }
    }

    pub fn coeff(&self, key: GeneratorKey) -> i64 {
        self.coeffs.get(&key).copied().unwrap_or(0)
    }

    /// Coefficient of `Δ_S` for any side `S` (canonicalized first).
    pub fn coeff_of(&self, s: SubsetMask) -> Result<i64> {
        Ok(self.coeff(canonical_generator(s, self.n)?))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Terms in ascending key order.
    pub fn terms(&self) -> impl Iterator<Item = (GeneratorKey, i64)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, *c))
    }

    pub fn is_boundary_only(&self) -> bool {
        self.coeffs.keys().all(|k| !k.is_psi(self.n))
    }

    pub fn dense(&self) -> DenseDivisor {
        DenseDivisor::new(self)
    }

    pub(crate) fn same_n(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::InvalidInput(format!(
                "marking counts differ: {} vs {n}",
                self.n
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &DivisorClass, sign: i64) -> DivisorClass {
        assert_eq!(self.n, other.n, "adding classes on different moduli spaces");
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, sign * c);
        }
        out
    }

    /// `π^*` along the map forgetting marking `n + 1`:
    /// `Δ_{S,S^c} ↦ Δ_{S∪{n+1},S^c} + Δ_{S,S^c∪{n+1}}`.
    pub fn pullback_forgetful(&self) -> Result<DivisorClass> {
        pullback_forgetful(self)
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DivisorClass(n={}; ", self.n)?;
        for (i, (k, c)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c:+}Δ{{{k}}}")?;
        }
        f.write_str(")")
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, 1)
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, -1)
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        self * -1
    }
}

impl Mul<i64> for &DivisorClass {
    type Output = DivisorClass;
    fn mul(self, k: i64) -> DivisorClass {
        let mut out = DivisorClass { n: self.n, coeffs: BTreeMap::new() };
        for (key, c) in self.terms() {
            out.add_term(key, c * k);
        }
        out
    }
}

/// Coefficient table indexed by key bits, for constant-time lookups during
/// F-curve scans.
#[derive(Clone, Debug)]
pub struct DenseDivisor {
    n: usize,
    table: Vec<i64>,
}

impl DenseDivisor {
    fn new(d: &DivisorClass) -> Self {
        let mut table = vec![0; 1 << (d.n - 1)];
        for (k, c) in d.terms() {
            table[k.index()] = c;
        }
        DenseDivisor { n: d.n, table }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficient of `Δ_s`; `s` must be a proper nonempty subset.
    #[inline(always)]
    pub fn at(&self, s: SubsetMask) -> i64 {
        self.table[canonical_side(s, self.n).bits() as usize]
    }
}

/// See [`DivisorClass::pullback_forgetful`]. Refuses ψ-type generators,
/// whose pullback is not a pure boundary splitting.
pub fn pullback_forgetful(d: &DivisorClass) -> Result<DivisorClass> {
    let n = d.n;
    let up = n + 1;
    MarkingSet::new(up)?;
    let mut out = DivisorClass::zero(up)?;
    for (k, c) in d.terms() {
        if k.is_psi(n) {
            return Err(Error::RequiresBoundaryForm(k.to_string()));
        }
        let s = k.side();
        // canonical keys at n+1: S itself, and the complement of S ∪ {n+1}
        out.add_term(canonical_generator(s, up)?, c);
        out.add_term(canonical_generator(s.with(up), up)?, c);
    }
    Ok(out)
}

/// Rewrites `d` on boundary generators only by adding rational multiples of
/// relation rows. For each `-ψ_m` term, `½(r(m,j) + r(m,k) - r(j,k))` has
/// coefficient 1 on `Δ_{{m}}`, no other ψ-type entries, and even integer
/// entries before halving.
pub fn eliminate_psi(d: &DivisorClass) -> Result<DivisorClass> {
    let n = d.n;
    let mut out = d.clone();
    for (k, c) in d.terms() {
        let crate::setcore::GeneratorKind::Psi(m) = k.kind(n) else {
            continue;
        };
        let mut others = (1..=n).filter(|&x| x != m);
        let (j, l) = (others.next().unwrap(), others.next().unwrap());
        let comb = &(&relation_row(m, j, n)? + &relation_row(m, l, n)?) - &relation_row(j, l, n)?;
        debug_assert_eq!(comb.coeff(k), 2);
        let mut half = DivisorClass::zero(n)?;
        for (key, v) in comb.terms() {
            if v % 2 != 0 {
                return Err(Error::InvalidInput(format!(
                    "relation combination for psi_{m} is not even at {{{key}}}"
                )));
            }
            half.add_term(key, v / 2);
        }
        out = &out - &(&half * c);
    }
    debug_assert!(out.is_boundary_only());
    Ok(out)
}
