//! Colorings of the nonempty-subset lattice under the disjointness
//! constraint, chain color counts, and an exhaustive lower-bound search.
//!
//! A valid coloring gives disjoint sets distinct colors; the p-generalized
//! rule forbids `p` distinct same-colored sets with empty common
//! intersection. The quantity of interest is the largest number of distinct
//! colors along a maximal chain `{a_1} ⊂ {a_1,a_2} ⊂ … ⊂ [n]`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::caps::Caps;
use crate::subsets::{nonempty_subsets, Chain, Subset};

/// Largest ground set for which a dense coloring table is sensible.
pub const MAX_COLORING_N: u32 = 25;

/// A total coloring of the nonempty subsets of `[n]`.
#[derive(Clone, PartialEq, Eq)]
pub struct KneserColoring {
    n: u32,
    /// Color of the subset with mask `m` at index `m − 1`.
    colors: Vec<u32>,
}

impl std::fmt::Debug for KneserColoring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map()
            .entries(
                nonempty_subsets(self.n)
                    .iter()
                    .map(|s| (s.to_string(), self.color(*s))),
            )
            .finish()
    }
}

/// Errors from coloring constructors and the search.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum KneserError {
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("ground set size {n} exceeds the cap {cap}")]
    CapExceeded { n: u32, cap: u32 },
    #[error("bad coloring map: {0}")]
    BadColoringMap(String),
}

impl KneserColoring {
    /// Build a coloring by evaluating `f` on every nonempty subset.
    pub fn from_fn(n: u32, mut f: impl FnMut(Subset) -> u32) -> KneserColoring {
        assert!(
            (1..=MAX_COLORING_N).contains(&n),
            "ground set size {n} out of range"
        );
        let colors = (1..(1u64 << n)).map(|m| f(Subset::from_mask(m))).collect();
        KneserColoring { n, colors }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Color of a nonempty subset of `[n]`.
    pub fn color(&self, s: Subset) -> u32 {
        assert!(
            !s.is_empty() && s.mask() < 1 << self.n,
            "subset outside the coloring"
        );
        self.colors[(s.mask() - 1) as usize]
    }

    /// Number of distinct colors used.
    pub fn colors_used(&self) -> u32 {
        self.colors.iter().collect::<BTreeSet<_>>().len() as u32
    }

    /// Serialize as a map from canonical subset keys to colors.
    pub fn to_map(&self) -> BTreeMap<String, u32> {
        nonempty_subsets(self.n)
            .into_iter()
            .map(|s| (s.key(), self.color(s)))
            .collect()
    }

    /// Rebuild from [`KneserColoring::to_map`] output; every nonempty subset
    /// of `[n]` must appear exactly once.
    pub fn from_map(n: u32, map: &BTreeMap<String, u32>) -> Result<KneserColoring, KneserError> {
        if !(1..=MAX_COLORING_N).contains(&n) {
            return Err(KneserError::BadParameter(format!("n={n}")));
        }
        let mut colors = vec![None; (1usize << n) - 1];
        for (key, &color) in map {
            let s = Subset::parse_key(key)
                .map_err(|e| KneserError::BadColoringMap(format!("key {key:?}: {e}")))?;
            if s.mask() >= 1 << n {
                return Err(KneserError::BadColoringMap(format!(
                    "key {key:?} leaves the ground set [{n}]"
                )));
            }
            colors[(s.mask() - 1) as usize] = Some(color);
        }
        if map.len() != colors.len() {
            return Err(KneserError::BadColoringMap(format!(
                "expected {} entries, found {}",
                colors.len(),
                map.len()
            )));
        }
        let colors = colors
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    KneserError::BadColoringMap(format!(
                        "missing subset {}",
                        Subset::from_mask(i as u64 + 1)
                    ))
                })
            })
            .collect::<Result<Vec<u32>, _>>()?;
        Ok(KneserColoring { n, colors })
    }
}

/// A family of same-colored sets witnessing an invalid coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KneserViolation {
    pub sets: Vec<Subset>,
    pub color: u32,
}

/// The sharp construction: sets of at most half the ground size take their
/// minimum element as color, everything larger shares color 0.
pub fn sharp_kneser_coloring(n: u32) -> KneserColoring {
    KneserColoring::from_fn(n, |s| {
        if 2 * s.card() <= n {
            s.min_elem().unwrap()
        } else {
            0
        }
    })
}

/// The p-generalized construction: color `min(A)` while `|A|·p ≤ n·(p−1)`.
pub fn p_kneser_coloring(n: u32, p: u32) -> Result<KneserColoring, KneserError> {
    if !(2..=n).contains(&p) {
        return Err(KneserError::BadParameter(format!("p={p} outside 2..={n}")));
    }
    Ok(KneserColoring::from_fn(n, move |s| {
        if s.card() * p <= n * (p - 1) {
            s.min_elem().unwrap()
        } else {
            0
        }
    }))
}

/// Check that disjoint sets always receive distinct colors; the witness is
/// the canonically first same-colored disjoint pair.
pub fn verify_kneser(c: &KneserColoring) -> Result<(), KneserViolation> {
    let sets = nonempty_subsets(c.n());
    for (i, &a) in sets.iter().enumerate() {
        for &b in &sets[i + 1..] {
            if a.is_disjoint(b) && c.color(a) == c.color(b) {
                return Err(KneserViolation {
                    sets: vec![a, b],
                    color: c.color(a),
                });
            }
        }
    }
    Ok(())
}

/// Check the p-generalized rule: no `p` distinct same-colored sets may have
/// an empty common intersection.
///
/// For each color class this takes a breadth-first walk over achievable
/// intersection masks; because intersections only shrink, a strictly
/// shrinking step can never reuse an earlier set, so the walk computes the
/// minimum number of distinct sets reaching the empty intersection.
pub fn verify_p_kneser(c: &KneserColoring, p: u32) -> Result<(), KneserViolation> {
    assert!(p >= 2, "p must be at least 2");
    let mut classes: BTreeMap<u32, Vec<Subset>> = BTreeMap::new();
    for s in nonempty_subsets(c.n()) {
        classes.entry(c.color(s)).or_default().push(s);
    }
    for (&color, class) in &classes {
        if (class.len() as u64) < p as u64 {
            continue;
        }
        if let Some(mut family) = min_family_with_empty_intersection(class, p as usize) {
            // Pad with canonically smallest unused members up to exactly p.
            for &s in class.iter() {
                if family.len() == p as usize {
                    break;
                }
                if !family.contains(&s) {
                    family.push(s);
                }
            }
            family.sort_unstable();
            return Err(KneserViolation {
                sets: family,
                color,
            });
        }
    }
    Ok(())
}

/// Smallest family (of size ≤ `limit`) from `class` whose intersection is
/// empty, or `None` when every family of that size intersects.
fn min_family_with_empty_intersection(class: &[Subset], limit: usize) -> Option<Vec<Subset>> {
    // Breadth-first over intersection masks; parents reconstruct the family.
    let mut seen: BTreeMap<u64, (u64, Subset)> = BTreeMap::new(); // mask -> (parent, via)
    let mut queue: VecDeque<(u64, usize)> = VecDeque::new();
    for &s in class {
        if let Entry::Vacant(e) = seen.entry(s.mask()) {
            e.insert((s.mask(), s));
            queue.push_back((s.mask(), 1));
        }
    }
    while let Some((mask, depth)) = queue.pop_front() {
        if mask == 0 {
            let mut family = Vec::new();
            let mut m = 0u64;
            loop {
                let &(parent, via) = seen.get(&m).expect("walk recorded a parent");
                family.push(via);
                if parent == m {
                    break;
                }
                m = parent;
            }
            return Some(family);
        }
        if depth == limit {
            continue;
        }
        for &t in class {
            let next = mask & t.mask();
            if next != mask && !seen.contains_key(&next) {
                seen.insert(next, (mask, t));
                queue.push_back((next, depth + 1));
            }
        }
    }
    None
}

/// Maximum number of distinct colors along a maximal chain, with the
/// canonically first chain attaining it.
pub fn max_chain_colors(c: &KneserColoring) -> (u32, Chain) {
    let n = c.n();
    let mut best: u32 = 0;
    let mut witness: Option<Chain> = None;
    let mut perm: Vec<u32> = (1..=n).collect();
    loop {
        // Distinct colors along the prefix chain of this permutation.
        let mut mask = 0u64;
        let mut colors: Vec<u32> = Vec::with_capacity(n as usize);
        let mut sets: Vec<Subset> = Vec::with_capacity(n as usize);
        for &e in &perm {
            mask |= 1 << (e - 1);
            let s = Subset::from_mask(mask);
            let col = c.color(s);
            if !colors.contains(&col) {
                colors.push(col);
            }
            sets.push(s);
        }
        if colors.len() as u32 > best {
            best = colors.len() as u32;
            witness = Some(Chain::new(sets).expect("prefix sets form a chain"));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    (best, witness.expect("at least one maximal chain exists"))
}

/// Advance to the lexicographically next permutation; false after the last.
fn next_permutation(perm: &mut [u32]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Verdict of the exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchVerdict {
    /// A valid coloring with at most `k` colors on every maximal chain.
    Feasible(KneserColoring),
    /// No such coloring exists (exhaustively certified).
    Infeasible,
    /// The node budget ran out before a definitive answer.
    BudgetExceeded,
}

/// Search result plus the deterministic node count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub verdict: SearchVerdict,
    pub nodes: u64,
}

struct Search {
    sets: Vec<Subset>,
    k: u32,
    budget: u64,
    nodes: u64,
    /// Chain index -> member set indices, and the inverse incidence.
    set_chains: Vec<Vec<u32>>,
    /// Per chain: occurrences of each color and the distinct-color count.
    chain_color_count: Vec<Vec<u16>>,
    chain_distinct: Vec<u32>,
    /// Assigned set indices per color, for the disjointness check.
    by_color: Vec<Vec<usize>>,
    assignment: Vec<u32>,
}

impl Search {
    fn run(&mut self, i: usize, used: usize) -> SearchVerdict {
        if i == self.sets.len() {
            let n = self.sets.last().unwrap().card();
            let colors = self.assignment.clone();
            // Assignment order is canonical, not mask order; re-key by mask.
            let mut by_mask = vec![0u32; colors.len()];
            for (j, s) in self.sets.iter().enumerate() {
                by_mask[(s.mask() - 1) as usize] = colors[j];
            }
            return SearchVerdict::Feasible(KneserColoring { n, colors: by_mask });
        }
        let s = self.sets[i];
        for color in 0..=used.min(self.by_color.len() - 1) {
            self.nodes += 1;
            if self.nodes > self.budget {
                return SearchVerdict::BudgetExceeded;
            }
            if !self.admissible(i, s, color as u32) {
                continue;
            }
            self.apply(i, color as u32);
            let next_used = used.max(color + 1);
            match self.run(i + 1, next_used) {
                SearchVerdict::Infeasible => self.undo(i, color as u32),
                done => return done,
            }
        }
        SearchVerdict::Infeasible
    }

    fn admissible(&self, i: usize, s: Subset, color: u32) -> bool {
        if self.by_color[color as usize]
            .iter()
            .any(|&j| self.sets[j].is_disjoint(s))
        {
            return false;
        }
        self.set_chains[i].iter().all(|&ch| {
            self.chain_color_count[ch as usize][color as usize] > 0
                || self.chain_distinct[ch as usize] < self.k
        })
    }

    fn apply(&mut self, i: usize, color: u32) {
        self.assignment[i] = color;
        self.by_color[color as usize].push(i);
        for &ch in &self.set_chains[i] {
            let cnt = &mut self.chain_color_count[ch as usize][color as usize];
            if *cnt == 0 {
                self.chain_distinct[ch as usize] += 1;
            }
            *cnt += 1;
        }
    }

    fn undo(&mut self, i: usize, color: u32) {
        self.by_color[color as usize].pop();
        for &ch in &self.set_chains[i] {
            let cnt = &mut self.chain_color_count[ch as usize][color as usize];
            *cnt -= 1;
            if *cnt == 0 {
                self.chain_distinct[ch as usize] -= 1;
            }
        }
    }
}

/// Exhaustively decide whether some valid coloring keeps every maximal
/// chain at `k` or fewer distinct colors.
///
/// The search assigns colors to subsets in canonical order, introduces new
/// colors in first-use order (breaking color symmetry), and counts every
/// attempted assignment as one node against `budget`; the node count is
/// deterministic, so budget exhaustion is reproducible.
pub fn search_min_chain_colors(
    n: u32,
    k: u32,
    budget: u64,
    caps: &Caps,
) -> Result<SearchOutcome, KneserError> {
    if n == 0 {
        return Err(KneserError::BadParameter("n=0".into()));
    }
    if n > caps.kneser_search_n {
        return Err(KneserError::CapExceeded {
            n,
            cap: caps.kneser_search_n,
        });
    }
    if k == 0 {
        return Err(KneserError::BadParameter("k=0".into()));
    }
    let sets = nonempty_subsets(n);
    let index_of: BTreeMap<u64, usize> = sets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.mask(), i))
        .collect();

    // Enumerate the n! maximal chains and the incidence lists.
    let mut set_chains: Vec<Vec<u32>> = vec![Vec::new(); sets.len()];
    let mut chain_count: u32 = 0;
    let mut perm: Vec<u32> = (1..=n).collect();
    loop {
        let mut mask = 0u64;
        for &e in &perm {
            mask |= 1 << (e - 1);
            set_chains[index_of[&mask]].push(chain_count);
        }
        chain_count += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }

    let len = sets.len();
    let mut search = Search {
        sets,
        k,
        budget,
        nodes: 0,
        set_chains,
        chain_color_count: vec![vec![0; len]; chain_count as usize],
        chain_distinct: vec![0; chain_count as usize],
        by_color: vec![Vec::new(); len],
        assignment: vec![0; len],
    };
    let verdict = search.run(0, 0);
    Ok(SearchOutcome {
        verdict,
        nodes: search.nodes,
    })
}
