//! Covers of the subdivided sphere and the exact antipodal scan.
//!
//! A cover assigns each cell of a [`QComplex`] to a family of labeled sets.
//! Membership is constant on open cells, so sets are stored as boolean
//! matrices indexed by (dimension, cell). Two constructions are provided: a
//! family of `d+3` closed sets whose overlap degree is the score threshold
//! `t(d)`, and a mixed family of open and closed sets pushing the overlap
//! down to `⌈t/2⌉`. Both are antipodally free: no set contains a point
//! together with its complement image. Freedom is certified exactly by
//! computing, for every open cell, the full list of cells its involuted
//! interior meets.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::caps::Caps;
use crate::ratio::{ratio, Ratio};
use crate::simplicial::{evaluate_h, QComplex, SimplicialError};
use crate::subsets::{nonempty_subsets, Chain, Subset};

/// Whether a family is made of closed stars only or mixes open and closed
/// sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverKind {
    Closed,
    Mixed,
}

/// Topological flavor of a single set of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    Open,
    Closed,
}

/// One labeled set: a union of open cells given by a membership matrix.
#[derive(Debug, Clone)]
pub struct CoverSet {
    label: String,
    kind: SetKind,
    membership: Vec<Vec<bool>>,
}

impl CoverSet {
    pub fn new(label: String, kind: SetKind, membership: Vec<Vec<bool>>) -> CoverSet {
        CoverSet {
            label,
            kind,
            membership,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn contains(&self, dim: usize, idx: usize) -> bool {
        self.membership[dim][idx]
    }

    /// Number of member cells.
    pub fn size(&self) -> u64 {
        self.membership
            .iter()
            .map(|row| row.iter().filter(|&&b| b).count() as u64)
            .sum()
    }

    pub fn membership_matrix(&self) -> Vec<Vec<bool>> {
        self.membership.clone()
    }
}

/// A family of sets over a fixed subdivided sphere.
pub struct Cover {
    complex: QComplex,
    kind: CoverKind,
    sets: Vec<CoverSet>,
}

/// A cell no set of the family contains.
#[derive(Debug, Error)]
#[error("uncovered cell at dim {dim} index {idx}")]
pub struct UncoveredCell {
    pub dim: usize,
    pub idx: usize,
}

/// A set containing both a cell and a cell its involuted interior meets.
#[derive(Debug)]
pub struct AntipodalViolation {
    pub set: usize,
    pub cell: (usize, usize),
    pub image: (usize, usize),
}

#[derive(Debug, Error)]
pub enum CoverError {
    #[error("bad cover shape: {0}")]
    BadShape(String),
    #[error(transparent)]
    Uncovered(#[from] UncoveredCell),
    #[error("unsupported cover kind: {0}")]
    UnsupportedKind(String),
    #[error("geometric mismatch for set {set} at cell ({},{}): stored {stored}, geometric {geometric}", cell.0, cell.1)]
    GeometricMismatch {
        set: usize,
        cell: (usize, usize),
        stored: bool,
        geometric: bool,
    },
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
}

impl Cover {
    /// Assemble a cover from a complex and membership matrices, validating
    /// that every matrix matches the complex shape.
    pub fn from_parts(
        complex: QComplex,
        kind: CoverKind,
        sets: Vec<CoverSet>,
    ) -> Result<Cover, CoverError> {
        for set in &sets {
            if set.membership.len() != complex.max_dim() + 1 {
                return Err(CoverError::BadShape(format!(
                    "set {} has {} dimensions, complex has {}",
                    set.label,
                    set.membership.len(),
                    complex.max_dim() + 1
                )));
            }
            for (dim, row) in set.membership.iter().enumerate() {
                if row.len() != complex.simplices(dim).len() {
                    return Err(CoverError::BadShape(format!(
                        "set {} has {} cells in dim {dim}, complex has {}",
                        set.label,
                        row.len(),
                        complex.simplices(dim).len()
                    )));
                }
            }
        }
        Ok(Cover {
            complex,
            kind,
            sets,
        })
    }

    pub fn complex(&self) -> &QComplex {
        &self.complex
    }

    pub fn kind(&self) -> CoverKind {
        self.kind
    }

    pub fn sets(&self) -> &[CoverSet] {
        &self.sets
    }

    pub fn d(&self) -> usize {
        self.complex.d()
    }
}

/// The shortest chain of a cell's flag, which determines membership in both
/// constructions.
fn root_chain(q: &QComplex, dim: usize, idx: usize) -> &Chain {
    let id = q.cell(dim, idx).vertex_ids()[0];
    &q.vertices()[id as usize]
}

/// Build a membership matrix from a predicate on cells.
fn matrix_by(q: &QComplex, pred: impl Fn(usize, usize) -> bool) -> Vec<Vec<bool>> {
    (0..=q.max_dim())
        .map(|dim| {
            (0..q.simplices(dim).len())
                .map(|idx| pred(dim, idx))
                .collect()
        })
        .collect()
}

/// The closed family `A_1, …, A_{d+2}, A_+`: a cell belongs to `A_i` when
/// its root chain holds a light set through `i`, and to `A_+` when the root
/// chain holds a heavy set. Overlap degree is exactly `t(d)`.
pub fn build_closed_cover(d: usize, caps: &Caps) -> Result<Cover, CoverError> {
    let q = QComplex::build(d, caps)?;
    let t = q.t();
    let mut sets = Vec::new();
    for i in 1..=q.ground() {
        let m = matrix_by(&q, |dim, idx| {
            root_chain(&q, dim, idx)
                .iter()
                .any(|s| s.contains(i) && s.card() < t)
        });
        sets.push(CoverSet::new(format!("A_{i}"), SetKind::Closed, m));
    }
    let m = matrix_by(&q, |dim, idx| {
        root_chain(&q, dim, idx).iter().any(|s| s.card() >= t)
    });
    sets.push(CoverSet::new("A_+".to_string(), SetKind::Closed, m));
    Cover::from_parts(q, CoverKind::Closed, sets)
}

/// The mixed family: open sets `F'_T` for small sets `T` (cells all of whose
/// root sets are small, witnessed by a small chain through `T` in the flag),
/// closed sets `F_T` for the middle cardinalities, and the closed `A_+`.
/// Overlap degree drops to `⌈t/2⌉`.
pub fn build_mixed_cover(d: usize, caps: &Caps) -> Result<Cover, CoverError> {
    let q = QComplex::build(d, caps)?;
    let t = q.t();
    let s = t.div_ceil(2);
    let low = |c: &Chain| c.iter().all(|x| x.card() <= s);
    let mut sets = Vec::new();
    for small in nonempty_subsets(q.ground())
        .iter()
        .filter(|x| x.card() <= s)
    {
        let m = matrix_by(&q, |dim, idx| {
            let cell = q.cell(dim, idx);
            cell.vertex_ids().iter().any(|&id| {
                let v = &q.vertices()[id as usize];
                low(v) && v.contains_set(*small)
            })
        });
        sets.push(CoverSet::new(format!("F'_{small}"), SetKind::Open, m));
    }
    for mid in nonempty_subsets(q.ground())
        .iter()
        .filter(|x| x.card() > s && x.card() < t)
    {
        let m = matrix_by(&q, |dim, idx| root_chain(&q, dim, idx).contains_set(*mid));
        sets.push(CoverSet::new(format!("F_{mid}"), SetKind::Closed, m));
    }
    let m = matrix_by(&q, |dim, idx| {
        root_chain(&q, dim, idx).iter().any(|x| x.card() >= t)
    });
    sets.push(CoverSet::new("A_+".to_string(), SetKind::Closed, m));
    Cover::from_parts(q, CoverKind::Mixed, sets)
}

/// Check that every cell lies in at least one set.
pub fn verify_cover(c: &Cover) -> Result<(), UncoveredCell> {
    let q = c.complex();
    for dim in 0..=q.max_dim() {
        for idx in 0..q.simplices(dim).len() {
            if !c.sets().iter().any(|s| s.contains(dim, idx)) {
                return Err(UncoveredCell { dim, idx });
            }
        }
    }
    Ok(())
}

/// Per-cell membership counts: the maximum, the first cell attaining it, and
/// whether every cell is covered.
fn depth_scan(c: &Cover) -> (u32, (usize, usize), bool) {
    let q = c.complex();
    let mut max = 0u32;
    let mut witness = (0usize, 0usize);
    let mut covered = true;
    let mut first = true;
    for dim in 0..=q.max_dim() {
        let depths: Vec<u32> = (0..q.simplices(dim).len())
            .into_par_iter()
            .map(|idx| c.sets().iter().filter(|s| s.contains(dim, idx)).count() as u32)
            .collect();
        for (idx, depth) in depths.into_iter().enumerate() {
            if depth == 0 {
                covered = false;
            }
            if first || depth > max {
                max = depth;
                witness = (dim, idx);
                first = false;
            }
        }
    }
    (max, witness, covered)
}

/// The overlap degree: the maximum number of sets meeting at one cell, with
/// the first cell attaining it. Errors when the family is not a cover.
pub fn overlap_degree(c: &Cover) -> Result<(u32, (usize, usize)), CoverError> {
    verify_cover(c)?;
    let (max, witness, _) = depth_scan(c);
    Ok((max, witness))
}

/// Exact antipodal reach precomputed for every cell of the complex.
fn reach_table(q: &QComplex) -> Vec<Vec<Vec<(usize, usize)>>> {
    (0..=q.max_dim())
        .map(|dim| {
            (0..q.simplices(dim).len())
                .into_par_iter()
                .map(|idx| antipodal_reach(q, (dim, idx)))
                .collect()
        })
        .collect()
}

/// Check that no set contains a cell together with a cell reached by the
/// involution of its interior.
pub fn verify_antipodal_free(c: &Cover) -> Result<(), AntipodalViolation> {
    let q = c.complex();
    let reach = reach_table(q);
    for (set_idx, set) in c.sets().iter().enumerate() {
        for (dim, row) in reach.iter().enumerate() {
            for (idx, images) in row.iter().enumerate() {
                if !set.contains(dim, idx) {
                    continue;
                }
                for &(d2, i2) in images {
                    if set.contains(d2, i2) {
                        return Err(AntipodalViolation {
                            set: set_idx,
                            cell: (dim, idx),
                            image: (d2, i2),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// All cells met by the complement involution of a cell's relative interior,
/// sorted.
///
/// A point interior to the cell has scores `w(T)·λ_T` constant on each step
/// of the flag and strictly separated across steps. Its involuted image has
/// scores rescaled by `w(νT)/w(T) ∈ {1/2, 1, 2}`, and the image cell is the
/// flag of upper level sets of those rescaled scores. Every weak ordering of
/// the rescaled scores is tried; each is a system of exact difference
/// constraints on the log-scores of the flag steps, feasible over the
/// rationals exactly when its constraint graph has no positive (or zero but
/// strict) cycle.
pub fn antipodal_reach(q: &QComplex, cell: (usize, usize)) -> Vec<(usize, usize)> {
    let (dim, idx) = cell;
    let flag = q.cell(dim, idx);
    let chains: Vec<&Chain> = flag
        .vertex_ids()
        .iter()
        .map(|&id| &q.vertices()[id as usize])
        .collect();
    let top = *chains.last().expect("cells are nonempty flags");
    let sets: Vec<Subset> = top.sets().to_vec();
    let steps = chains.len();
    // The flag step introducing each set of the top chain.
    let block: Vec<usize> = sets
        .iter()
        .map(|s| {
            chains
                .iter()
                .position(|c| c.contains_set(*s))
                .expect("top holds all sets")
        })
        .collect();
    let t = q.t();
    let log_w = |s: Subset| if s.card() < t { 0i32 } else { -1i32 };
    // Log of the score rescaling under involution.
    let shift: Vec<i32> = sets
        .iter()
        .map(|s| log_w(s.complement(q.ground())) - log_w(*s))
        .collect();

    let mut images: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut parts: Vec<Vec<usize>> = Vec::new();
    enumerate_weak_orders(sets.len(), &mut parts, &mut |parts| {
        if !order_feasible(steps, &block, &shift, parts) {
            return;
        }
        // The image flag: complements of the prefix unions.
        let mut prefix: Vec<Subset> = Vec::new();
        let mut image_chains: Vec<Chain> = Vec::new();
        for part in parts {
            for &i in part {
                prefix.push(sets[i].complement(q.ground()));
            }
            let mut sorted = prefix.clone();
            sorted.sort_unstable();
            image_chains.push(Chain::new(sorted).expect("prefixes of a chain are chains"));
        }
        let id = q
            .cell_id_of_chains(&image_chains)
            .expect("image flag exists in the complex");
        images.insert(id);
    });
    images.into_iter().collect()
}

/// Visit every ordered set partition of `0..n`, item by item: each item
/// joins an existing class or opens a new one at any rank.
fn enumerate_weak_orders(
    n: usize,
    parts: &mut Vec<Vec<usize>>,
    visit: &mut impl FnMut(&[Vec<usize>]),
) {
    fn step(
        item: usize,
        n: usize,
        parts: &mut Vec<Vec<usize>>,
        visit: &mut impl FnMut(&[Vec<usize>]),
    ) {
        if item == n {
            visit(parts);
            return;
        }
        for p in 0..parts.len() {
            parts[p].push(item);
            step(item + 1, n, parts, visit);
            parts[p].pop();
        }
        for p in 0..=parts.len() {
            parts.insert(p, vec![item]);
            step(item + 1, n, parts, visit);
            parts.remove(p);
        }
    }
    step(0, n, parts, visit);
}

/// Decide whether some interior point realizes the given weak order of
/// rescaled scores: difference constraints on the per-step log-scores, with
/// infeasibility exactly when a cycle of combined weight positive — or zero
/// yet strict — exists.
fn order_feasible(steps: usize, block: &[usize], shift: &[i32], parts: &[Vec<usize>]) -> bool {
    // bound[u][v] = best known lower bound on y_u − y_v, with strictness.
    let mut bound: Vec<Vec<Option<(i32, bool)>>> = vec![vec![None; steps]; steps];
    let add = |b: &mut Vec<Vec<Option<(i32, bool)>>>, u: usize, v: usize, c: i32, s: bool| {
        let better = match b[u][v] {
            None => true,
            Some((c0, s0)) => c > c0 || (c == c0 && s && !s0),
        };
        if better {
            b[u][v] = Some((c, s));
        }
    };
    // Interior structure: strictly decreasing step scores.
    for j in 0..steps.saturating_sub(1) {
        add(&mut bound, j, j + 1, 0, true);
    }
    // Equal rescaled scores within a class.
    for part in parts {
        for w in part.windows(2) {
            let (a, b) = (w[0], w[1]);
            add(&mut bound, block[a], block[b], shift[b] - shift[a], false);
            add(&mut bound, block[b], block[a], shift[a] - shift[b], false);
        }
    }
    // Strictly decreasing rescaled scores across consecutive classes.
    for w in parts.windows(2) {
        let (a, b) = (w[0][0], w[1][0]);
        add(&mut bound, block[a], block[b], shift[b] - shift[a], true);
    }
    for m in 0..steps {
        for u in 0..steps {
            for v in 0..steps {
                if let (Some(x), Some(y)) = (bound[u][m], bound[m][v]) {
                    add(&mut bound, u, v, x.0 + y.0, x.1 || y.1);
                }
            }
        }
    }
    (0..steps).all(|u| match bound[u][u] {
        Some((c, s)) => c < 0 || (c == 0 && !s),
        None => true,
    })
}

/// Cross-validate a closed family against its geometric definition: sweep
/// the barycenter plus seeded random interior points of every cell, compute
/// membership from the score argmax, and compare with the stored matrix.
pub fn cross_check_geometric(c: &Cover, trials: u32, seed: u64) -> Result<(), CoverError> {
    if c.kind() != CoverKind::Closed {
        return Err(CoverError::UnsupportedKind(
            "geometric membership is defined for closed families only".to_string(),
        ));
    }
    let q = c.complex();
    let ground = q.ground();
    if c.sets().len() != ground as usize + 1 {
        return Err(CoverError::BadShape(format!(
            "expected {} sets for the closed family, found {}",
            ground + 1,
            c.sets().len()
        )));
    }
    let t = q.t();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for dim in 0..=q.max_dim() {
        for idx in 0..q.simplices(dim).len() {
            let mut points = vec![q.barycenter(dim, idx)];
            for _ in 0..trials {
                let raw: Vec<i64> = (0..=dim).map(|_| rng.gen_range(1..=40)).collect();
                let total: i64 = raw.iter().sum();
                let weights: Vec<Ratio> = raw.iter().map(|&w| ratio(w, total)).collect();
                points.push(q.realize_convex(dim, idx, &weights)?);
            }
            for x in &points {
                let (_, argmax) = evaluate_h(x, t);
                for (set_idx, set) in c.sets().iter().enumerate() {
                    let geometric = if set_idx < ground as usize {
                        let i = set_idx as u32 + 1;
                        argmax.iter().any(|s| s.contains(i) && s.card() < t)
                    } else {
                        argmax.iter().any(|s| s.card() >= t)
                    };
                    if geometric != set.contains(dim, idx) {
                        return Err(CoverError::GeometricMismatch {
                            set: set_idx,
                            cell: (dim, idx),
                            stored: set.contains(dim, idx),
                            geometric,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Summary of a family: its shape, overlap degree with witness, and the
/// antipodal check.
#[derive(Debug, Serialize)]
pub struct CoverReport {
    pub d: usize,
    pub kind: String,
    pub set_count: usize,
    pub cover: bool,
    pub overlap_degree: u32,
    pub witness: String,
    pub antipodal_free: bool,
    pub simplex_counts: Vec<u64>,
}

pub fn cover_report(c: &Cover) -> Result<CoverReport, CoverError> {
    let (max, witness, covered) = depth_scan(c);
    let antipodal_free = verify_antipodal_free(c).is_ok();
    Ok(CoverReport {
        d: c.d(),
        kind: match c.kind() {
            CoverKind::Closed => "closed".to_string(),
            CoverKind::Mixed => "mixed".to_string(),
        },
        set_count: c.sets().len(),
        cover: covered,
        overlap_degree: max,
        witness: c.complex().cell_string(witness.0, witness.1),
        antipodal_free,
        simplex_counts: c.complex().f_vector(),
    })
}
