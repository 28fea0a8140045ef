//! The relation rows `Σ_{i∈S, j∉S} Δ_S = 0` and reduction of divisor classes
//! to canonical coordinates modulo their span.

use std::ops::{Add, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::DivisorClass;
use crate::error::{Error, Result};
use crate::setcore::{canonical_generator, GeneratorKey, MarkingSet, SubsetMask, MAX_MARKINGS};

/// `Σ Δ_S` over all `S` with `i ∈ S`, `j ∉ S`. As a keyed vector this is
/// symmetric in `i` and `j`.
pub fn relation_row(i: usize, j: usize, n: usize) -> Result<DivisorClass> {
    MarkingSet::new(n)?;
    if i == j || !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(Error::InvalidInput(format!("relation row needs distinct markings in 1..={n}, got ({i}, {j})")));
    }
    let free = SubsetMask::full(n).without(i).without(j);
    let mut d = DivisorClass::zero(n)?;
    for t in free.subsets() {
        d.add_term(canonical_generator(t.with(i), n)?, 1);
    }
    Ok(d)
}

/// Row-reduced form of the `C(n,2)` relation rows over the rationals, with
/// pivots chosen lexicographically by key bits. Built once per `n` and
/// shared.
#[derive(Debug)]
pub struct RelationSystem {
    n: usize,
    rows: Vec<DivisorClass>,
    pivots: Vec<GeneratorKey>,
    /// Nonzero entries of each reduced row at non-pivot keys.
    reduced: Vec<Vec<(usize, BigRational)>>,
    free: Vec<GeneratorKey>,
    /// Position in `free` for each key index, `u32::MAX` for pivots.
    slot: Vec<u32>,
}

impl RelationSystem {
    fn build(n: usize) -> Result<Self> {
        let ms = MarkingSet::new(n)?;
        let mut rows = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                rows.push(relation_row(i, j, n)?);
            }
        }

        // dense rows; column c is key index c + 1
        let ncols = ms.generator_count();
        let mut mat: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| {
                let mut v = vec![BigRational::zero(); ncols];
                for (k, c) in r.terms() {
                    v[k.index() - 1] = BigRational::from_integer(BigInt::from(c));
                }
                v
            })
            .collect();

        let mut pivot_cols = Vec::new();
        let mut rank = 0;
        for col in 0..ncols {
            if rank == mat.len() {
                break;
            }
            let Some(r) = (rank..mat.len()).find(|&r| !mat[r][col].is_zero()) else {
                continue;
            };
            mat.swap(rank, r);
            let inv = mat[rank][col].recip();
            if !inv.is_one() {
                for x in mat[rank].iter_mut() {
                    if !x.is_zero() {
                        *x *= &inv;
                    }
                }
            }
            let support: Vec<usize> = (col..ncols).filter(|&c| !mat[rank][c].is_zero()).collect();
            let pivot_row = std::mem::take(&mut mat[rank]);
            for (other, row) in mat.iter_mut().enumerate() {
                if other == rank || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for &c in &support {
                    row[c] -= &f * &pivot_row[c];
                }
            }
            mat[rank] = pivot_row;
            pivot_cols.push(col);
            rank += 1;
        }
        mat.truncate(rank);

        let mut slot = vec![u32::MAX; ncols + 1];
        let mut free = Vec::with_capacity(ncols - rank);
        let mut is_pivot = vec![false; ncols];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        for c in 0..ncols {
            if !is_pivot[c] {
                slot[c + 1] = free.len() as u32;
                free.push(GeneratorKey::from_index(c + 1));
            }
        }
        let reduced = mat
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .enumerate()
                    .filter(|(c, x)| !is_pivot[*c] && !x.is_zero())
                    .map(|(c, x)| (slot[c + 1] as usize, x))
                    .collect()
            })
            .collect();
        let pivots = pivot_cols.iter().map(|&c| GeneratorKey::from_index(c + 1)).collect();
        Ok(RelationSystem { n, rows, pivots, reduced, free, slot })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The relation rows in order `(1,2), (1,3), ..., (n-1,n)`.
    pub fn rows(&self) -> &[DivisorClass] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_keys(&self) -> &[GeneratorKey] {
        &self.pivots
    }

    /// Non-pivot keys, ascending; a basis of the class group.
    pub fn free_keys(&self) -> &[GeneratorKey] {
        &self.free
    }

    /// Dimension of the quotient, `2^(n-1) - 1 - rank`.
    pub fn ambient_dim(&self) -> usize {
        self.free.len()
    }

    /// Coordinate position of a non-pivot key.
    #[inline]
    pub fn free_slot(&self, key: GeneratorKey) -> Option<usize> {
        let s = self.slot[key.index()];
        (s != u32::MAX).then_some(s as usize)
    }

    /// True when every reduced entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.reduced.iter().flatten().all(|(_, x)| x.is_integer())
    }

    pub fn reduce(&self, d: &DivisorClass) -> Result<ReducedClass> {
        d.same_n(self.n)?;
        let mut coords = vec![BigRational::zero(); self.free.len()];
        let mut pivot_coeff = vec![0i64; self.slot.len()];
        for (k, c) in d.terms() {
            match self.free_slot(k) {
                Some(s) => coords[s] += BigRational::from_integer(BigInt::from(c)),
                None => pivot_coeff[k.index()] = c,
            }
        }
        for (p, row) in self.pivots.iter().zip(&self.reduced) {
            let c = pivot_coeff[p.index()];
            if c == 0 {
                continue;
            }
            let c = BigRational::from_integer(BigInt::from(c));
            for (s, x) in row {
                coords[*s] -= &c * x;
            }
        }
        Ok(ReducedClass { n: self.n, coords })
    }
}

/// The shared relation system for `n`, computed on first use.
pub fn relation_system(n: usize) -> Result<Arc<RelationSystem>> {
    static CACHE: [OnceLock<Arc<RelationSystem>>; MAX_MARKINGS + 1] =
        [const { OnceLock::new() }; MAX_MARKINGS + 1];
    MarkingSet::new(n)?;
    if let Some(sys) = CACHE[n].get() {
        return Ok(sys.clone());
    }
    let sys = Arc::new(RelationSystem::build(n)?);
    Ok(CACHE[n].get_or_init(|| sys).clone())
}

/// Coordinates of a class over the non-pivot generators. Two classes are
/// numerically equivalent iff their reductions agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedClass {
    n: usize,
    coords: Vec<BigRational>,
}

impl ReducedClass {
    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn zip(&self, other: &ReducedClass, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> ReducedClass {
        assert_eq!(self.n, other.n);
        ReducedClass {
            n: self.n,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl Add for &ReducedClass {
    type Output = ReducedClass;
    fn add(self, rhs: &ReducedClass) -> ReducedClass {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &ReducedClass {
    type Output = ReducedClass;
    fn sub(self, rhs: &ReducedClass) -> ReducedClass {
        self.zip(rhs, |a, b| a - b)
    }
}

pub fn reduce_canonical(d: &DivisorClass) -> Result<ReducedClass> {
    relation_system(d.n())?.reduce(d)
}
