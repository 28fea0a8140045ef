//! The (11,5,2) biplane: eleven 5-subsets of `{1..11}` such that every pair of
//! points lies in exactly two blocks and every two blocks meet in exactly two
//! points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::setcore::SubsetMask;

pub const POINTS: usize = 11;
pub const BLOCK_SIZE: usize = 5;

/// Nonzero quadratic residues mod 11.
pub const QR_BASE_BLOCK: [usize; 5] = [1, 3, 4, 5, 9];

/// Eleven blocks of size five over `{1..11}`, sorted by their ascending
/// element lists. Only the shape is checked on construction; see
/// [`verify_biplane`] for the design axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Biplane {
    blocks: Vec<SubsetMask>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignReport {
    pub pair_replication: usize,
    pub block_intersections_ok: bool,
    pub point_replication: usize,
}

impl Biplane {
    pub fn new(mut blocks: Vec<SubsetMask>) -> Result<Self> {
        if blocks.len() != POINTS {
            return Err(Error::MalformedDesign(format!(
                "expected {POINTS} blocks, found {}",
                blocks.len()
            )));
        }
        let ground = SubsetMask::full(POINTS);
        for b in &blocks {
            if b.len() != BLOCK_SIZE || !b.is_subset(ground) {
                return Err(Error::MalformedDesign(format!(
                    "block {{{b}}} is not a {BLOCK_SIZE}-subset of 1..={POINTS}"
                )));
            }
        }
        blocks.sort_by_key(|b| b.iter().collect::<Vec<_>>());
        Ok(Biplane { blocks })
    }

    pub fn blocks(&self) -> &[SubsetMask] {
        &self.blocks
    }

    pub fn contains_block(&self, s: SubsetMask) -> bool {
        self.blocks.contains(&s)
    }
}

/// `{1,3,4,5,9} + t (mod 11)`, using representatives `1..=11`.
pub fn qr_block(t: usize) -> SubsetMask {
    SubsetMask::from_markings(QR_BASE_BLOCK.iter().map(|&x| (x + t - 1) % POINTS + 1))
        .expect("markings lie in 1..=11")
}

pub fn build_biplane_qr() -> Biplane {
    Biplane::new((0..POINTS).map(qr_block).collect()).expect("translates have the right shape")
}

/// Checks both 2-design axioms and the point replication they imply.
/// Fails with the first witness found.
pub fn verify_biplane(b: &Biplane) -> Result<DesignReport> {
    for i in 1..=POINTS {
        for j in i + 1..=POINTS {
            let pair = SubsetMask::from_markings([i, j])?;
            let count = b.blocks.iter().filter(|blk| pair.is_subset(**blk)).count();
            if count != 2 {
                return Err(Error::DesignViolation {
                    axiom: "pair replication",
                    witness: format!("points {{{pair}}} lie in {count} blocks"),
                });
            }
        }
    }
    for (x, bx) in b.blocks.iter().enumerate() {
        for by in &b.blocks[x + 1..] {
            let meet = bx.intersection(*by).len();
            if meet != 2 {
                return Err(Error::DesignViolation {
                    axiom: "block intersection",
                    witness: format!("blocks {{{bx}}} and {{{by}}} meet in {meet} points"),
                });
            }
        }
    }
    for p in 1..=POINTS {
        let r = b.blocks.iter().filter(|blk| blk.contains(p)).count();
        if r != 5 {
            return Err(Error::DesignViolation {
                axiom: "point replication",
                witness: format!("point {p} lies in {r} blocks"),
            });
        }
    }
    Ok(DesignReport { pair_replication: 2, block_intersections_ok: true, point_replication: 5 })
}

/// A permutation of `{1..11}`; entry `i` is the image of point `i + 1`.
pub type PointMap = [u8; POINTS];

fn image(map: &[u8], s: SubsetMask) -> SubsetMask {
    let mut bits = 0u16;
    for p in s.iter() {
        bits |= 1 << (map[p - 1] - 1);
    }
    SubsetMask::from_bits(bits)
}

/// Depth-first search over point images. A partial map survives only while
/// the image of every block's already-mapped part fits inside some block.
fn search(b: &Biplane, map: &mut Vec<u8>, used: u16, visit: &mut dyn FnMut(&[u8])) {
    let k = map.len();
    if k == POINTS {
        visit(map);
        return;
    }
    let point = k + 1;
    let assigned = SubsetMask::full(point);
    for target in 1..=POINTS as u8 {
        if used & (1 << (target - 1)) != 0 {
            continue;
        }
        map.push(target);
        let extends = b.blocks.iter().filter(|blk| blk.contains(point)).all(|blk| {
            let img = image(map, blk.intersection(assigned));
            b.blocks.iter().any(|c| img.is_subset(*c))
        });
        if extends {
            search(b, map, used | (1 << (target - 1)), visit);
        }
        map.pop();
    }
}

/// Every point permutation that maps the block set onto itself.
pub fn automorphisms(b: &Biplane) -> Vec<PointMap> {
    let mut out = Vec::new();
    let mut map = Vec::with_capacity(POINTS);
    search(b, &mut map, 0, &mut |m| {
        if b.blocks.iter().all(|blk| b.contains_block(image(m, *blk))) {
            out.push(m.try_into().unwrap());
        }
    });
    out
}

pub fn automorphism_group_order(b: &Biplane) -> u64 {
    let mut count = 0u64;
    let mut map = Vec::with_capacity(POINTS);
    search(b, &mut map, 0, &mut |m| {
        if b.blocks.iter().all(|blk| b.contains_block(image(m, *blk))) {
            count += 1;
        }
    });
    count
}

/// Applies a point map to a block.
pub fn map_block(map: &PointMap, s: SubsetMask) -> SubsetMask {
    image(map, s)
}
