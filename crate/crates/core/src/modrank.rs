//! Incremental rank of sparse integer rows modulo a word-sized prime.
//!
//! The basis is kept in reduced row echelon form, so reducing a new row only
//! touches the basis rows named by its own pivot-column entries. Rows are
//! stored densely but all arithmetic runs over the shrinking list of
//! non-pivot columns; near full rank a dependent row costs a handful of
//! operations.

use crate::error::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

#[derive(Debug, Clone)]
pub struct ModpRank {
    p: u64,
    dim: usize,
    pivot_of: Vec<u32>,
    rows: Vec<Vec<u32>>,
    free: Vec<usize>,
    scratch: Vec<u64>,
}

impl ModpRank {
    /// `p` must be a prime below `2^32`.
    pub fn new(p: u64, dim: usize) -> Result<Self> {
        if p >= 1 << 32 || !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not a prime below 2^32")));
        }
        Ok(ModpRank {
            p,
            dim,
            pivot_of: vec![u32::MAX; dim],
            rows: Vec::new(),
            free: (0..dim).collect(),
            scratch: vec![0; dim],
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn lift(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    /// Adds a sparse row of `(column, value)` entries; returns whether the
    /// rank grew.
    pub fn insert(&mut self, entries: &[(usize, i64)]) -> bool {
        let p = self.p;
        if self.free.is_empty() {
            return false;
        }
        let mut w = std::mem::take(&mut self.scratch);
        for &(c, v) in entries {
            assert!(c < self.dim, "column {c} out of range");
            w[c] = (w[c] + self.lift(v)) % p;
        }
        for &(c, _) in entries {
            let r = self.pivot_of[c];
            if r == u32::MAX || w[c] == 0 {
                continue;
            }
            let f = p - w[c];
            let row = &self.rows[r as usize];
            for &q in &self.free {
                w[q] = (w[q] + f * row[q] as u64) % p;
            }
            w[c] = 0;
        }

        let lead = self.free.iter().position(|&q| w[q] != 0);
        let Some(pos) = lead else {
            for &(c, _) in entries {
                w[c] = 0;
            }
            self.scratch = w;
            return false;
        };

        let col = self.free[pos];
        let inv = pow_mod(w[col], p - 2, p);
        let mut new_row = vec![0u32; self.dim];
        for &q in &self.free {
            if w[q] != 0 {
                new_row[q] = (w[q] * inv % p) as u32;
            }
        }
        self.free.remove(pos);
        for row in self.rows.iter_mut() {
            let g = row[col] as u64;
            if g == 0 {
                continue;
            }
            let f = p - g;
            for &q in &self.free {
                let x = new_row[q];
                if x != 0 {
                    row[q] = ((row[q] as u64 + f * x as u64) % p) as u32;
                }
            }
            row[col] = 0;
        }
        self.pivot_of[col] = self.rows.len() as u32;
        self.rows.push(new_row);

        w.iter_mut().for_each(|x| *x = 0);
        self.scratch = w;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};

    fn exact_rank(rows: &[Vec<(usize, i64)>], dim: usize) -> usize {
        let mut mat: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| {
                let mut v = vec![BigRational::zero(); dim];
                for &(c, x) in r {
                    v[c] += BigRational::from_integer(x.into());
                }
                v
            })
            .collect();
        let mut rank = 0;
        for col in 0..dim {
            if let Some(r) = (rank..mat.len()).find(|&r| !mat[r][col].is_zero()) {
                mat.swap(rank, r);
                for other in rank + 1..mat.len() {
                    let f = &mat[other][col] / &mat[rank][col];
                    for c in 0..dim {
                        let t = &f * &mat[rank][c];
                        mat[other][c] -= t;
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn primes() {
        assert!(is_prime(2_147_483_647));
        assert!(is_prime(2_147_483_629));
        assert!(!is_prime(2_147_483_649));
        assert!(!is_prime(1));
        assert!(ModpRank::new(15, 3).is_err());
        assert!(ModpRank::new(4_294_967_311, 3).is_err());
    }

    #[test]
    fn small_ranks() {
        let mut e = ModpRank::new(7, 3).unwrap();
        assert!(e.insert(&[(0, 1), (1, 1)]));
        assert!(!e.insert(&[(0, 2), (1, 2)]));
        assert!(e.insert(&[(1, 1), (2, 1)]));
        assert!(!e.insert(&[(0, 1), (2, -1)]));
        assert!(e.insert(&[(2, 3)]));
        assert_eq!(e.rank(), 3);
        assert!(!e.insert(&[(0, 5)]));
    }

    #[test]
    fn rank_drops_only_for_small_primes() {
        // det = 7 over the integers
        let rows = vec![vec![(0, 3), (1, 1)], vec![(0, 1), (1, 5)]];
        let rank = |p| {
            let mut e = ModpRank::new(p, 2).unwrap();
            rows.iter().for_each(|r| {
                e.insert(r);
            });
            e.rank()
        };
        assert_eq!(rank(7), 1);
        assert_eq!(rank(2_147_483_647), 2);
    }

    #[test]
    fn random_sparse_rows_match_exact_rank() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..40 {
            let dim = rng.gen_range(1..14);
            let nrows = rng.gen_range(0..20);
            let rows: Vec<Vec<(usize, i64)>> = (0..nrows)
                .map(|_| {
                    (0..rng.gen_range(0..5))
                        .map(|_| (rng.gen_range(0..dim), rng.gen_range(-2..=2)))
                        .collect()
                })
                .collect();
            let mut e = ModpRank::new(2_147_483_629, dim).unwrap();
            for r in &rows {
                e.insert(r);
            }
            assert_eq!(e.rank(), exact_rank(&rows, dim));
        }
    }
}
