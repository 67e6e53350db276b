//! Subsets of a small ground set `[n] = {1, …, n}` and strictly increasing
//! chains of them.
//!
//! A [`Subset`] is a 64-bit mask (element `e` ↔ bit `e − 1`), so the ground
//! set may hold at most 62 elements — far beyond anything the rest of the
//! crate builds. The canonical order everywhere is by cardinality first and
//! lexicographic element order second; enumeration, witnesses, and dump
//! formats all follow it.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Largest element any subset may contain.
pub const MAX_ELEMENT: u32 = 62;

/// A subset of `{1, …, 62}`, stored as a bit mask.
#[derive(Copy, Clone, PartialEq, Eq, Hash)]
pub struct Subset(u64);

impl Subset {
    /// The empty set.
    pub const EMPTY: Subset = Subset(0);

    /// Build from explicit elements (each in `1..=62`).
    ///
    /// # Panics
    /// Panics on an out-of-range element; use [`Subset::parse_key`] for
    /// untrusted input.
    pub fn from_elems(elems: &[u32]) -> Subset {
        let mut mask = 0u64;
        for &e in elems {
            assert!(
                (1..=MAX_ELEMENT).contains(&e),
                "element {e} outside 1..={MAX_ELEMENT}"
            );
            mask |= 1 << (e - 1);
        }
        Subset(mask)
    }

    /// Build from a raw mask (bit `e − 1` ↔ element `e`).
    pub fn from_mask(mask: u64) -> Subset {
        assert!(
            mask >> MAX_ELEMENT == 0,
            "mask uses an element beyond {MAX_ELEMENT}"
        );
        Subset(mask)
    }

    /// The underlying bit mask.
    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn card(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: u32) -> bool {
        (1..=MAX_ELEMENT).contains(&e) && self.0 >> (e - 1) & 1 == 1
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    /// The set with one element added.
    pub fn insert(self, e: u32) -> Subset {
        assert!((1..=MAX_ELEMENT).contains(&e), "element {e} out of range");
        Subset(self.0 | 1 << (e - 1))
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & other.0 == self.0
    }

    pub fn is_proper_subset_of(self, other: Subset) -> bool {
        self.is_subset_of(other) && self.0 != other.0
    }

    pub fn min_elem(self) -> Option<u32> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() + 1)
    }

    pub fn max_elem(self) -> Option<u32> {
        (!self.is_empty()).then(|| 64 - self.0.leading_zeros())
    }

    /// Ascending elements.
    pub fn iter(self) -> impl Iterator<Item = u32> {
        let mask = self.0;
        (0..MAX_ELEMENT)
            .filter(move |b| mask >> b & 1 == 1)
            .map(|b| b + 1)
    }

    /// Complement within the ground set `[ground]`.
    pub fn complement(self, ground: u32) -> Subset {
        assert!(ground <= MAX_ELEMENT, "ground set too large");
        let full = if ground == 0 { 0 } else { (1u64 << ground) - 1 };
        debug_assert!(self.0 & !full == 0, "subset leaves the ground set");
        Subset(!self.0 & full)
    }

    /// Machine-readable key: ascending elements joined by commas, e.g. `1,3`.
    pub fn key(self) -> String {
        self.iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parse a [`Subset::key`] string: nonempty, strictly ascending elements
    /// in `1..=62`.
    pub fn parse_key(s: &str) -> Result<Subset, SubsetParseError> {
        let mut mask = 0u64;
        let mut prev = 0u32;
        if s.is_empty() {
            return Err(SubsetParseError::Empty);
        }
        for part in s.split(',') {
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(SubsetParseError::Malformed(s.to_string()));
            }
            let e: u32 = part
                .parse()
                .map_err(|_| SubsetParseError::Malformed(s.to_string()))?;
            if !(1..=MAX_ELEMENT).contains(&e) {
                return Err(SubsetParseError::OutOfRange(e));
            }
            if e <= prev {
                return Err(SubsetParseError::NotAscending(s.to_string()));
            }
            prev = e;
            mask |= 1 << (e - 1);
        }
        Ok(Subset(mask))
    }
}

/// Errors from [`Subset::parse_key`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubsetParseError {
    #[error("empty subset key")]
    Empty,
    #[error("malformed subset key {0:?}")]
    Malformed(String),
    #[error("element {0} outside 1..=62")]
    OutOfRange(u32),
    #[error("subset key {0:?} not strictly ascending")]
    NotAscending(String),
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        // Cardinality first; equal cardinalities compare their ascending
        // element lists lexicographically, decided by the lowest differing
        // bit (the set holding it has the smaller next element).
        self.card().cmp(&other.card()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 >> diff.trailing_zeros() & 1 == 1 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All nonempty subsets of `[n]` in canonical order.
pub fn nonempty_subsets(n: u32) -> Vec<Subset> {
    assert!(n <= MAX_ELEMENT, "ground set too large");
    let mut out: Vec<Subset> = (1..(1u64 << n)).map(Subset).collect();
    out.sort_unstable();
    out
}

/// All nonempty proper subsets of `[n]` in canonical order.
pub fn nontrivial_subsets(n: u32) -> Vec<Subset> {
    let full = (1u64 << n) - 1;
    let mut out: Vec<Subset> = (1..full).map(Subset).collect();
    out.sort_unstable();
    out
}

/// A strictly increasing chain of subsets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chain {
    sets: Vec<Subset>,
}

/// Errors from [`Chain::new`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("a chain must contain at least one set")]
    Empty,
    #[error("chain not strictly increasing at position {at}")]
    NotIncreasing { at: usize },
}

impl Chain {
    /// Validate that the sets strictly increase under inclusion.
    pub fn new(sets: Vec<Subset>) -> Result<Chain, ChainError> {
        if sets.is_empty() {
            return Err(ChainError::Empty);
        }
        for at in 1..sets.len() {
            if !sets[at - 1].is_proper_subset_of(sets[at]) {
                return Err(ChainError::NotIncreasing { at });
            }
        }
        Ok(Chain { sets })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by construction
    }

    pub fn first(&self) -> Subset {
        self.sets[0]
    }

    pub fn last(&self) -> Subset {
        *self.sets.last().expect("chains are nonempty")
    }

    pub fn sets(&self) -> &[Subset] {
        &self.sets
    }

    pub fn iter(&self) -> impl Iterator<Item = Subset> + '_ {
        self.sets.iter().copied()
    }

    pub fn contains_set(&self, s: Subset) -> bool {
        self.sets.contains(&s)
    }

    /// True when every set of `self` appears in `other`.
    pub fn is_subchain_of(&self, other: &Chain) -> bool {
        // Both are ascending, so a single merge pass suffices.
        let mut it = other.sets.iter();
        self.sets.iter().all(|s| it.any(|o| o == s))
    }

    /// Complement every set within `[ground]`; reversing restores inclusion
    /// order, so the result is again a chain.
    pub fn complement(&self, ground: u32) -> Chain {
        let sets: Vec<Subset> = self
            .sets
            .iter()
            .rev()
            .map(|s| s.complement(ground))
            .collect();
        Chain::new(sets).expect("complement of a chain is a chain")
    }
}

impl Ord for Chain {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.sets.cmp(&other.sets))
    }
}

impl PartialOrd for Chain {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.sets.iter().enumerate() {
            if i > 0 {
                write!(f, "<")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Errors from [`parse_chain`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainParseError {
    #[error("malformed chain segment {0:?}: expected {{e1,e2,…}}")]
    Malformed(String),
    #[error(transparent)]
    Subset(#[from] SubsetParseError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Parse the display form `{1}<{1,2}` back into a chain.
pub fn parse_chain(s: &str) -> Result<Chain, ChainParseError> {
    let mut sets = Vec::new();
    for part in s.split('<') {
        let part = part.trim();
        let inner = part
            .strip_prefix('{')
            .and_then(|p| p.strip_suffix('}'))
            .ok_or_else(|| ChainParseError::Malformed(part.to_string()))?;
        sets.push(Subset::parse_key(inner)?);
    }
    Ok(Chain::new(sets)?)
}
