//! Subset masks over the marking set `{1..n}`, canonical generator keys, and
//! the enumeration of F-curves as set partitions into four blocks.
//!
//! Marking `i` lives in bit `i - 1` of a [`SubsetMask`]. A generator of the
//! Picard group is named by the side of its marking partition that omits the
//! last marking `n`, so every key is a nonempty subset of `{1..n-1}` and its
//! bits double as an index into dense coefficient tables of length
//! `2^(n-1)`.
//!
//! F-curves are produced in lexicographic order of their restricted growth
//! strings. The order is fixed so that parallel scans can split the stream by
//! prefix and still report the first minimizer deterministically.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MIN_MARKINGS: usize = 4;
pub const MAX_MARKINGS: usize = 16;

/// A validated marking count `n`, naming the markings `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MarkingSet(u8);

impl MarkingSet {
    pub fn new(n: usize) -> Result<Self> {
        if (MIN_MARKINGS..=MAX_MARKINGS).contains(&n) {
            Ok(MarkingSet(n as u8))
        } else {
            Err(Error::MarkingCount(n))
        }
    }

    #[inline]
    pub fn n(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn full(self) -> SubsetMask {
        SubsetMask::full(self.n())
    }

    /// Number of generator keys, `2^(n-1) - 1`.
    #[inline]
    pub fn generator_count(self) -> usize {
        (1usize << (self.n() - 1)) - 1
    }

    /// Length of a dense table indexed by key bits (slot 0 is unused).
    #[inline]
    pub fn table_len(self) -> usize {
        1usize << (self.n() - 1)
    }
}

/// A subset of `{1..16}`; bit `i - 1` holds marking `i`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask(u16);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    #[inline]
    pub const fn from_bits(bits: u16) -> Self {
        SubsetMask(bits)
    }

    #[inline]
    pub const fn bits(self) -> u16 {
        self.0
    }

    /// `{1..n}`.
    #[inline]
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_MARKINGS);
        SubsetMask(((1u32 << n) - 1) as u16)
    }

    #[inline]
    pub fn singleton(marking: usize) -> Self {
        debug_assert!((1..=MAX_MARKINGS).contains(&marking));
        SubsetMask(1 << (marking - 1))
    }

    /// Builds a mask from marking numbers; rejects markings outside `1..=16`.
    pub fn from_markings<I: IntoIterator<Item = usize>>(markings: I) -> Result<Self> {
        let mut bits = 0u16;
        for m in markings {
            if !(1..=MAX_MARKINGS).contains(&m) {
                return Err(Error::InvalidInput(format!("marking {m} out of range")));
            }
            bits |= 1 << (m - 1);
        }
        Ok(SubsetMask(bits))
    }

    #[inline]
    pub fn contains(self, marking: usize) -> bool {
        marking >= 1 && marking <= MAX_MARKINGS && self.0 & (1 << (marking - 1)) != 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn union(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & !other.0)
    }

    #[inline]
    pub fn is_subset(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_disjoint(self, other: SubsetMask) -> bool {
        self.0 & other.0 == 0
    }

    /// Complement inside `{1..n}`.
    #[inline]
    pub fn complement(self, n: usize) -> SubsetMask {
        SubsetMask(SubsetMask::full(n).0 & !self.0)
    }

    #[inline]
    pub fn with(self, marking: usize) -> SubsetMask {
        self.union(SubsetMask::singleton(marking))
    }

    #[inline]
    pub fn without(self, marking: usize) -> SubsetMask {
        self.difference(SubsetMask::singleton(marking))
    }

    pub fn min_marking(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn max_marking(self) -> Option<usize> {
        (self.0 != 0).then(|| 16 - self.0.leading_zeros() as usize)
    }

    /// Markings in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i + 1)
        })
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = SubsetMask> {
        let full = self.0;
        let mut cur: Option<u16> = Some(0);
        std::iter::from_fn(move || {
            let out = cur?;
            cur = if out == full { None } else { Some((out.wrapping_sub(full)) & full) };
            Some(SubsetMask(out))
        })
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// Comma-separated ascending markings, e.g. `1,3,4,5,9`.
impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for m in self.iter() {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for SubsetMask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(SubsetMask::EMPTY);
        }
        let mut mask = SubsetMask::EMPTY;
        for part in s.split(',') {
            let m: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad marking {part:?} in subset {s:?}")))?;
            let single = SubsetMask::from_markings([m])?;
            if !mask.is_disjoint(single) {
                return Err(Error::InvalidInput(format!("marking {m} repeated in subset {s:?}")));
            }
            mask = mask.union(single);
        }
        Ok(mask)
    }
}

impl Serialize for SubsetMask {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SubsetMask {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// What a generator key stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// `Δ_{{i}} = -ψ_i`.
    Psi(usize),
    /// A boundary divisor `Δ_{S,S^c}` with both sides of size at least two.
    Boundary,
}

/// Canonical name of a Picard generator: the side not containing marking `n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorKey(SubsetMask);

impl GeneratorKey {
    /// Wraps a side that is already canonical for `n`.
    pub fn new(side: SubsetMask, n: usize) -> Result<Self> {
        let ms = MarkingSet::new(n)?;
        if side.is_empty() || !side.is_subset(ms.full().without(n)) {
            return Err(Error::InvalidGenerator { subset: side.to_string(), n });
        }
        Ok(GeneratorKey(side))
    }

    /// Rebuilds a key from its table index. The caller guarantees validity.
    #[inline]
    pub(crate) fn from_index(index: usize) -> Self {
        debug_assert!(index > 0 && index < 1 << (MAX_MARKINGS - 1));
        GeneratorKey(SubsetMask(index as u16))
    }

    #[inline]
    pub fn side(self) -> SubsetMask {
        self.0
    }

    /// Index into dense tables of length `2^(n-1)`.
    #[inline]
    pub fn index(self) -> usize {
        self.0 .0 as usize
    }

    pub fn kind(self, n: usize) -> GeneratorKind {
        let len = self.0.len();
        if len == 1 {
            GeneratorKind::Psi(self.0.min_marking().unwrap())
        } else if len == n - 1 {
            GeneratorKind::Psi(n)
        } else {
            GeneratorKind::Boundary
        }
    }

    #[inline]
    pub fn is_psi(self, n: usize) -> bool {
        matches!(self.kind(n), GeneratorKind::Psi(_))
    }

    /// The key of `Δ_{{i}} = -ψ_i`.
    pub fn psi(marking: usize, n: usize) -> Result<Self> {
        if !(1..=n).contains(&marking) {
            return Err(Error::InvalidInput(format!("marking {marking} not in 1..={n}")));
        }
        canonical_generator(SubsetMask::singleton(marking), n)
    }

    /// Every key for `n`, ascending by bits.
    pub fn all(n: usize) -> impl Iterator<Item = GeneratorKey> {
        (1usize..1 << (n - 1)).map(GeneratorKey::from_index)
    }
}

impl fmt::Debug for GeneratorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Key{{{}}}", self.0)
    }
}

impl fmt::Display for GeneratorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The side of `{s, s^c}` that omits marking `n`.
pub fn canonical_generator(s: SubsetMask, n: usize) -> Result<GeneratorKey> {
    let ms = MarkingSet::new(n)?;
    let full = ms.full();
    if s.is_empty() || s == full || !s.is_subset(full) {
        return Err(Error::InvalidGenerator { subset: s.to_string(), n });
    }
    Ok(GeneratorKey(canonical_side(s, n)))
}

/// Unchecked canonicalization for hot loops.
#[inline(always)]
pub(crate) fn canonical_side(s: SubsetMask, n: usize) -> SubsetMask {
    let top = 1u16 << (n - 1);
    if s.0 & top != 0 {
        SubsetMask(!s.0 & (top - 1))
    } else {
        s
    }
}

/// Partition of `{1..n}` into four nonempty blocks, stored by smallest element.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FCurve {
    n: u8,
    blocks: [SubsetMask; 4],
}

impl FCurve {
    /// Validates a partition given in any block order.
    pub fn new(mut blocks: [SubsetMask; 4], n: usize) -> Result<Self> {
        let ms = MarkingSet::new(n)?;
        let mut seen = SubsetMask::EMPTY;
        for b in blocks {
            if b.is_empty() || !b.is_disjoint(seen) {
                return Err(Error::InvalidInput(format!(
                    "blocks {blocks:?} are not four disjoint nonempty sets"
                )));
            }
            seen = seen.union(b);
        }
        if seen != ms.full() {
            return Err(Error::InvalidInput(format!(
                "blocks {blocks:?} do not cover 1..={n}"
            )));
        }
        blocks.sort_by_key(|b| b.bits().trailing_zeros());
        Ok(FCurve { n: n as u8, blocks })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn blocks(&self) -> [SubsetMask; 4] {
        self.blocks
    }

    pub fn block_sizes(&self) -> [usize; 4] {
        self.blocks.map(SubsetMask::len)
    }

    /// The three distinct unions of two blocks, up to complement:
    /// `A1∪A2`, `A1∪A3`, `A1∪A4`.
    #[inline]
    pub fn pair_unions(&self) -> [SubsetMask; 3] {
        let [a, b, c, d] = self.blocks;
        [a.union(b), a.union(c), a.union(d)]
    }

    fn check(&self) -> bool {
        let mut seen = SubsetMask::EMPTY;
        for w in self.blocks.windows(2) {
            if w[0].bits().trailing_zeros() >= w[1].bits().trailing_zeros() {
                return false;
            }
        }
        for b in self.blocks {
            if b.is_empty() || !b.is_disjoint(seen) {
                return false;
            }
            seen = seen.union(b);
        }
        seen == SubsetMask::full(self.n())
    }
}

impl fmt::Debug for FCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FCurve({self})")
    }
}

/// Blocks joined by `|`, e.g. `1|2|3|4,5,6,7,8,9,10,11,12`.
impl fmt::Display for FCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.blocks;
        write!(f, "{a}|{b}|{c}|{d}")
    }
}

impl FromStr for FCurve {
    type Err = Error;

    /// Parses the `|`-separated form; `n` is taken as the largest marking.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split('|').collect();
        if parts.len() != 4 {
            return Err(Error::InvalidInput(format!("F-curve {s:?} needs exactly four blocks")));
        }
        let mut blocks = [SubsetMask::EMPTY; 4];
        for (slot, part) in blocks.iter_mut().zip(&parts) {
            *slot = part.parse()?;
        }
        let all = blocks.iter().fold(SubsetMask::EMPTY, |acc, b| acc.union(*b));
        let n = all.max_marking().unwrap_or(0);
        FCurve::new(blocks, n)
    }
}

impl Serialize for FCurve {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FCurve {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

const BLOCKS: u8 = 4;

/// Stream of all F-curves on `n` markings (or those sharing a fixed prefix
/// of the restricted growth string), in lexicographic RGS order.
#[derive(Clone, Debug)]
pub struct FCurves {
    n: usize,
    fixed: usize,
    rgs: [u8; MAX_MARKINGS],
    started: bool,
    done: bool,
}

/// A frozen leading segment of a restricted growth string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgsPrefix(Vec<u8>);

impl FCurves {
    fn from_prefix(n: usize, prefix: &[u8]) -> Self {
        let mut rgs = [0u8; MAX_MARKINGS];
        rgs[..prefix.len()].copy_from_slice(prefix);
        FCurves { n, fixed: prefix.len(), rgs, started: false, done: false }
    }

    /// Curves whose restricted growth string begins with `prefix`.
    pub fn with_prefix(n: usize, prefix: &RgsPrefix) -> Self {
        FCurves::from_prefix(n, &prefix.0)
    }

    /// Fills positions `from..n` with the smallest completion, given that
    /// `used` labels already appear. Returns false when none exists.
    fn fill_min(&mut self, from: usize, used: u8) -> bool {
        let need = (BLOCKS - used) as usize;
        if need > self.n - from {
            return false;
        }
        let split = self.n - need;
        self.rgs[from..split].fill(0);
        for (k, slot) in self.rgs[split..self.n].iter_mut().enumerate() {
            *slot = used + k as u8;
        }
        true
    }

    fn used_before(&self, end: usize) -> u8 {
        self.rgs[..end].iter().copied().max().map_or(0, |m| m + 1)
    }

    fn advance(&mut self) -> bool {
        let mut pmax = [0u8; MAX_MARKINGS + 1];
        let mut running = 0u8;
        for i in 0..self.n {
            pmax[i] = running;
            running = running.max(self.rgs[i] + 1);
        }
        for i in (self.fixed.max(1)..self.n).rev() {
            let used = pmax[i];
            let v = self.rgs[i] + 1;
            if v <= used && v < BLOCKS {
                self.rgs[i] = v;
                if self.fill_min(i + 1, used.max(v + 1)) {
                    return true;
                }
            }
        }
        false
    }

    fn current(&self) -> FCurve {
        let mut blocks = [SubsetMask::EMPTY; 4];
        for i in 0..self.n {
            blocks[self.rgs[i] as usize].0 |= 1 << i;
        }
        let c = FCurve { n: self.n as u8, blocks };
        debug_assert!(c.check(), "enumerated partition violates the cover invariant: {c:?}");
        c
    }
}

impl Iterator for FCurves {
    type Item = FCurve;

    fn next(&mut self) -> Option<FCurve> {
        if self.done {
            return None;
        }
        let ok = if !self.started {
            self.started = true;
            let from = self.fixed.max(1);
            let used = self.used_before(from);
            self.fill_min(from, used)
        } else {
            self.advance()
        };
        if ok {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}

/// All partitions of `{1..n}` into four nonempty blocks, each exactly once.
pub fn enumerate_fcurves(n: usize) -> Result<FCurves> {
    MarkingSet::new(n)?;
    Ok(FCurves::from_prefix(n, &[0]))
}

/// Stirling number of the second kind `S(n, 4)`.
pub fn count_fcurves(n: usize) -> Result<u64> {
    MarkingSet::new(n)?;
    Ok(stirling2(n, BLOCKS as usize))
}

/// `S(m, k)` via `S(m,k) = S(m-1,k-1) + k·S(m-1,k)`.
pub fn stirling2(m: usize, k: usize) -> u64 {
    let mut row = vec![0u64; k + 1];
    row[0] = 1;
    for _ in 0..m {
        for j in (1..=k).rev() {
            row[j] = row[j - 1] + j as u64 * row[j];
        }
        row[0] = 0;
    }
    row[k]
}

/// Every valid RGS prefix of length `len` (clamped to `n`), in order.
/// Concatenating `FCurves::with_prefix` over these reproduces
/// `enumerate_fcurves(n)` exactly.
pub fn rgs_prefixes(n: usize, len: usize) -> Result<Vec<RgsPrefix>> {
    MarkingSet::new(n)?;
    let len = len.clamp(1, n);
    let mut out = Vec::new();
    let mut cur = vec![0u8];
    fn rec(n: usize, len: usize, cur: &mut Vec<u8>, out: &mut Vec<RgsPrefix>) {
        let used = cur.iter().copied().max().unwrap() + 1;
        if (BLOCKS - used) as usize > n - cur.len() {
            return;
        }
        if cur.len() == len {
            out.push(RgsPrefix(cur.clone()));
            return;
        }
        for v in 0..=used.min(BLOCKS - 1) {
            cur.push(v);
            rec(n, len, cur, out);
            cur.pop();
        }
    }
    rec(n, len, &mut cur, &mut out);
    Ok(out)
}
