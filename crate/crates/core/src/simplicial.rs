//! The two sphere models: the complex of subset chains and its barycentric
//! subdivision, realized with weighted coordinates.
//!
//! [`BComplex`] has the nontrivial subsets of `[d+2]` as vertices and the
//! strictly increasing chains as simplices; complementation `T ↦ [d+2]∖T` is
//! a fixed-simplex-free involution. [`QComplex`] subdivides it once more:
//! its vertices are chains, realized as exact convex combinations weighted
//! so that the score function `T ↦ w(T)·λ_T` is constant on each chain's
//! realization, and its simplices are flags of chains. The score structure
//! lets every point be located in its unique carrying cell exactly.

use std::collections::HashMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::caps::Caps;
use crate::ratio::{format_ratio, ratio, Ratio};
use crate::subsets::{nontrivial_subsets, Chain, Subset};

/// Errors from complex construction and point geometry.
#[derive(Debug, Error)]
pub enum SimplicialError {
    #[error("dimension {dim} exceeds the cap {cap}")]
    CapExceeded { dim: usize, cap: usize },
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("not carried by the complex: {0}")]
    NotInComplex(String),
    #[error("involution fixes the simplex {0}")]
    FixedSimplex(String),
    #[error("invalid convex weights: {0}")]
    InvalidWeights(String),
}

/// The score threshold: sets of this cardinality or more get weight 1/2.
pub fn t_threshold(d: usize) -> u32 {
    (d as u32 + 3).div_ceil(2)
}

/// Weight of a subset under threshold `t`: 1 below the threshold, 1/2 at or
/// above it.
pub fn weight(set: Subset, t: u32) -> Ratio {
    if set.card() < t {
        Ratio::one()
    } else {
        ratio(1, 2)
    }
}

/// A point of the realized sphere: an exact convex combination of subset
/// coordinates whose support is a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpherePoint {
    coords: std::collections::BTreeMap<Subset, Ratio>,
}

impl SpherePoint {
    /// Validate coordinates: non-negative, summing to one, with a chain as
    /// support. Zero coordinates are dropped; duplicate keys accumulate.
    pub fn new(coords: Vec<(Subset, Ratio)>) -> Result<SpherePoint, SimplicialError> {
        let mut map: std::collections::BTreeMap<Subset, Ratio> = std::collections::BTreeMap::new();
        for (s, c) in coords {
            *map.entry(s).or_insert_with(Ratio::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        let mut sum = Ratio::zero();
        for (s, c) in &map {
            if c < &Ratio::zero() {
                return Err(SimplicialError::InvalidPoint(format!(
                    "negative coordinate at {s}"
                )));
            }
            sum += c;
        }
        if !sum.is_one() {
            return Err(SimplicialError::InvalidPoint(format!(
                "coordinates sum to {}, not 1",
                format_ratio(&sum)
            )));
        }
        let keys: Vec<Subset> = map.keys().copied().collect();
        for w in keys.windows(2) {
            if !w[0].is_proper_subset_of(w[1]) {
                return Err(SimplicialError::InvalidPoint(format!(
                    "support is not a chain: {} ⊄ {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(SpherePoint { coords: map })
    }

    /// The coordinate at `s` (zero off the support).
    pub fn coord(&self, s: Subset) -> Ratio {
        self.coords.get(&s).cloned().unwrap_or_else(Ratio::zero)
    }

    pub fn coords(&self) -> &std::collections::BTreeMap<Subset, Ratio> {
        &self.coords
    }

    /// The support, in inclusion order.
    pub fn support_chain(&self) -> Chain {
        Chain::new(self.coords.keys().copied().collect()).expect("support is a validated chain")
    }

    /// Complement every coordinate within `[ground]`.
    fn involute(&self, ground: u32) -> SpherePoint {
        let coords = self
            .coords
            .iter()
            .map(|(s, c)| (s.complement(ground), c.clone()))
            .collect();
        SpherePoint::new(coords).expect("involution preserves point validity")
    }
}

/// The maximal score `max_T w(T)·λ_T(x)` together with every attaining set
/// (ascending).
pub fn evaluate_h(x: &SpherePoint, t: u32) -> (Ratio, Vec<Subset>) {
    let mut best: Option<Ratio> = None;
    let mut arg: Vec<Subset> = Vec::new();
    for (s, c) in x.coords() {
        let score = weight(*s, t) * c;
        match &best {
            Some(b) if *b > score => {}
            Some(b) if *b == score => arg.push(*s),
            _ => {
                best = Some(score);
                arg = vec![*s];
            }
        }
    }
    (best.expect("points have nonempty support"), arg)
}

/// All chains of nontrivial subsets of `[ground]`, bucketed by length.
fn chains_by_length(ground: u32) -> Vec<Vec<Chain>> {
    let subsets = nontrivial_subsets(ground);
    // supersets[i]: indices of proper supersets of subsets[i].
    let supersets: Vec<Vec<usize>> = subsets
        .iter()
        .map(|s| {
            subsets
                .iter()
                .enumerate()
                .filter(|(_, t)| s.is_proper_subset_of(**t))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let mut buckets: Vec<Vec<Chain>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn extend(
        at: usize,
        subsets: &[Subset],
        supersets: &[Vec<usize>],
        stack: &mut Vec<usize>,
        buckets: &mut Vec<Vec<Chain>>,
    ) {
        stack.push(at);
        let chain = Chain::new(stack.iter().map(|&i| subsets[i]).collect())
            .expect("stack holds an increasing chain");
        if buckets.len() < stack.len() {
            buckets.push(Vec::new());
        }
        buckets[stack.len() - 1].push(chain);
        for &next in &supersets[at] {
            extend(next, subsets, supersets, stack, buckets);
        }
        stack.pop();
    }
    for i in 0..subsets.len() {
        extend(i, &subsets, &supersets, &mut stack, &mut buckets);
    }
    for bucket in &mut buckets {
        bucket.sort_unstable();
    }
    buckets
}

/// The chain complex on ground set `[d+2]`: vertices are nontrivial subsets,
/// simplices are strictly increasing chains.
pub struct BComplex {
    d: usize,
    ground: u32,
    vertices: Vec<Subset>,
    simplices: Vec<Vec<Chain>>,
}

impl BComplex {
    pub fn build(d: usize, caps: &Caps) -> Result<BComplex, SimplicialError> {
        if d > caps.b_dim {
            return Err(SimplicialError::CapExceeded {
                dim: d,
                cap: caps.b_dim,
            });
        }
        let ground = d as u32 + 2;
        Ok(BComplex {
            d,
            ground,
            vertices: nontrivial_subsets(ground),
            simplices: chains_by_length(ground),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ground(&self) -> u32 {
        self.ground
    }

    pub fn vertices(&self) -> &[Subset] {
        &self.vertices
    }

    /// Simplices of the given dimension, canonically sorted.
    pub fn simplices(&self, dim: usize) -> &[Chain] {
        &self.simplices[dim]
    }

    pub fn max_dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn f_vector(&self) -> Vec<u64> {
        self.simplices.iter().map(|b| b.len() as u64).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let c = b.len() as i64;
                if i % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }

    /// The complementation involution on simplices.
    pub fn involute_simplex(&self, simplex: &Chain) -> Chain {
        simplex.complement(self.ground)
    }

    /// The complementation involution extended linearly to points.
    pub fn involute_point(&self, x: &SpherePoint) -> SpherePoint {
        x.involute(self.ground)
    }

    /// Check that complementation maps simplices to simplices with no fixed
    /// simplex.
    pub fn verify_involution_free(&self) -> Result<(), SimplicialError> {
        for bucket in &self.simplices {
            for simplex in bucket {
                let image = self.involute_simplex(simplex);
                if &image == simplex {
                    return Err(SimplicialError::FixedSimplex(simplex.to_string()));
                }
                if bucket.binary_search(&image).is_err() {
                    return Err(SimplicialError::NotInComplex(image.to_string()));
                }
            }
        }
        Ok(())
    }

    /// Canonical text dump (stable format).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("B d={} ground={}\n", self.d, self.ground));
        out.push_str(&format!("vertices {}\n", self.vertices.len()));
        for v in &self.vertices {
            out.push_str(&format!("{v}\n"));
        }
        for (dim, bucket) in self.simplices.iter().enumerate() {
            out.push_str(&format!("simplices dim={} count={}\n", dim, bucket.len()));
            for c in bucket {
                out.push_str(&format!("{c}\n"));
            }
        }
        out
    }
}

/// A simplex of the subdivided complex: an ascending list of vertex ids
/// forming a flag of chains.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QSimplex {
    ids: Vec<u32>,
}

impl QSimplex {
    pub fn vertex_ids(&self) -> &[u32] {
        &self.ids
    }
}

/// The barycentric subdivision of [`BComplex`]: vertices are chains (with
/// exact weighted realizations), simplices are flags of chains.
pub struct QComplex {
    d: usize,
    ground: u32,
    t: u32,
    vertices: Vec<Chain>,
    vertex_index: HashMap<Chain, u32>,
    realizations: Vec<SpherePoint>,
    simplices: Vec<Vec<QSimplex>>,
    cell_index: Vec<HashMap<Vec<u32>, usize>>,
}

impl QComplex {
    pub fn build(d: usize, caps: &Caps) -> Result<QComplex, SimplicialError> {
        if d > caps.q_dim {
            return Err(SimplicialError::CapExceeded {
                dim: d,
                cap: caps.q_dim,
            });
        }
        let ground = d as u32 + 2;
        let t = t_threshold(d);

        let mut vertices: Vec<Chain> = chains_by_length(ground).into_iter().flatten().collect();
        vertices.sort_unstable();
        let vertex_index: HashMap<Chain, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u32))
            .collect();
        let realizations: Vec<SpherePoint> = vertices.iter().map(|c| realize_chain(c, t)).collect();

        // Flags of chains, collected at their top vertex. Proper subchains
        // have strictly fewer sets, hence smaller ids, so processing vertices
        // in canonical order sees every extension source before its targets.
        let mut flags_at: Vec<Vec<Vec<u32>>> = Vec::with_capacity(vertices.len());
        let mut simplices: Vec<Vec<QSimplex>> = vec![Vec::new(); d + 1];
        for (id, chain) in vertices.iter().enumerate() {
            let mut flags: Vec<Vec<u32>> = vec![vec![id as u32]];
            let sets = chain.sets();
            for mask in 1..(1u64 << sets.len()) - 1 {
                let sub: Vec<Subset> = sets
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, s)| *s)
                    .collect();
                let sub = Chain::new(sub).expect("subset of a chain is a chain");
                let sub_id = vertex_index[&sub] as usize;
                for flag in &flags_at[sub_id] {
                    if flag.len() <= d {
                        let mut extended = flag.clone();
                        extended.push(id as u32);
                        flags.push(extended);
                    }
                }
            }
            for flag in &flags {
                simplices[flag.len() - 1].push(QSimplex { ids: flag.clone() });
            }
            flags_at.push(flags);
        }
        for bucket in &mut simplices {
            bucket.sort_unstable();
        }
        let cell_index = simplices
            .iter()
            .map(|bucket| {
                bucket
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.ids.clone(), i))
                    .collect()
            })
            .collect();

        Ok(QComplex {
            d,
            ground,
            t,
            vertices,
            vertex_index,
            realizations,
            simplices,
            cell_index,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ground(&self) -> u32 {
        self.ground
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn vertices(&self) -> &[Chain] {
        &self.vertices
    }

    pub fn vertex_id(&self, chain: &Chain) -> Option<u32> {
        self.vertex_index.get(chain).copied()
    }

    /// The exact coordinates of a subdivision vertex.
    pub fn realize_vertex(&self, id: u32) -> &SpherePoint {
        &self.realizations[id as usize]
    }

    pub fn max_dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn simplices(&self, dim: usize) -> &[QSimplex] {
        &self.simplices[dim]
    }

    pub fn cell(&self, dim: usize, idx: usize) -> &QSimplex {
        &self.simplices[dim][idx]
    }

    pub fn cell_id(&self, cell: &QSimplex) -> Option<(usize, usize)> {
        let dim = cell.ids.len().checked_sub(1)?;
        Some((dim, *self.cell_index.get(dim)?.get(&cell.ids)?))
    }

    /// The cell spanned by the given chains, if all exist and form a flag.
    pub fn cell_id_of_chains(&self, chains: &[Chain]) -> Option<(usize, usize)> {
        let mut ids: Vec<u32> = chains
            .iter()
            .map(|c| self.vertex_index.get(c).copied())
            .collect::<Option<_>>()?;
        ids.sort_unstable();
        let dim = ids.len().checked_sub(1)?;
        Some((dim, *self.cell_index[dim].get(&ids)?))
    }

    /// Bracketed display of a cell: `[{1} ; {1}<{1,2}]`.
    pub fn cell_string(&self, dim: usize, idx: usize) -> String {
        let parts: Vec<String> = self.simplices[dim][idx]
            .ids
            .iter()
            .map(|&id| self.vertices[id as usize].to_string())
            .collect();
        format!("[{}]", parts.join(" ; "))
    }

    pub fn f_vector(&self) -> Vec<u64> {
        self.simplices.iter().map(|b| b.len() as u64).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let c = b.len() as i64;
                if i % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }

    /// Exact convex combination of a cell's vertex realizations.
    pub fn realize_convex(
        &self,
        dim: usize,
        idx: usize,
        weights: &[Ratio],
    ) -> Result<SpherePoint, SimplicialError> {
        let cell = &self.simplices[dim][idx];
        if weights.len() != cell.ids.len() {
            return Err(SimplicialError::InvalidWeights(format!(
                "{} weights for a {}-vertex cell",
                weights.len(),
                cell.ids.len()
            )));
        }
        let mut coords: Vec<(Subset, Ratio)> = Vec::new();
        for (w, &id) in weights.iter().zip(&cell.ids) {
            if w < &Ratio::zero() {
                return Err(SimplicialError::InvalidWeights("negative weight".into()));
            }
            for (s, c) in self.realizations[id as usize].coords() {
                coords.push((*s, w * c));
            }
        }
        SpherePoint::new(coords)
    }

    /// The barycenter of a cell (equal convex weights).
    pub fn barycenter(&self, dim: usize, idx: usize) -> SpherePoint {
        let k = self.simplices[dim][idx].ids.len() as i64;
        let weights = vec![ratio(1, k); k as usize];
        self.realize_convex(dim, idx, &weights)
            .expect("barycenter weights are valid")
    }

    /// Locate the unique cell whose relative interior contains `x`.
    ///
    /// The scores `w(T)·λ_T(x)` of a point inside a realized flag are
    /// constant on each flag step and strictly separated across steps, so
    /// the flag of upper level sets of the score function recovers the cell.
    pub fn cell_of_point(&self, x: &SpherePoint) -> Result<(usize, usize), SimplicialError> {
        let mut scored: Vec<(Ratio, Subset)> = x
            .coords()
            .iter()
            .map(|(s, c)| (weight(*s, self.t) * c, *s))
            .collect();
        scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut ids: Vec<u32> = Vec::new();
        let mut level: Vec<Subset> = Vec::new();
        let mut i = 0;
        while i < scored.len() {
            let mut j = i;
            while j < scored.len() && scored[j].0 == scored[i].0 {
                level.push(scored[j].1);
                j += 1;
            }
            level.sort_unstable();
            let chain = Chain::new(level.clone()).map_err(|_| {
                SimplicialError::NotInComplex("score level set is not a chain".into())
            })?;
            let id = self.vertex_index.get(&chain).ok_or_else(|| {
                SimplicialError::NotInComplex(format!("no vertex for chain {chain}"))
            })?;
            ids.push(*id);
            i = j;
        }
        ids.sort_unstable();
        let dim = ids.len() - 1;
        let idx = self
            .cell_index
            .get(dim)
            .and_then(|m| m.get(&ids))
            .ok_or_else(|| SimplicialError::NotInComplex("no cell for the score flag".into()))?;
        Ok((dim, *idx))
    }

    /// The complementation involution on cells.
    pub fn involute_cell(&self, dim: usize, idx: usize) -> (usize, usize) {
        let mut ids: Vec<u32> = self.simplices[dim][idx]
            .ids
            .iter()
            .map(|&id| self.vertex_index[&self.vertices[id as usize].complement(self.ground)])
            .collect();
        ids.sort_unstable();
        let i = self.cell_index[dim][&ids];
        (dim, i)
    }

    /// The complementation involution extended linearly to points.
    pub fn involute_point(&self, x: &SpherePoint) -> SpherePoint {
        x.involute(self.ground)
    }

    /// Check that complementation is a fixed-cell-free automorphism.
    pub fn verify_involution_free(&self) -> Result<(), SimplicialError> {
        for dim in 0..=self.max_dim() {
            for idx in 0..self.simplices[dim].len() {
                let (idim, iidx) = self.involute_cell(dim, idx);
                if (idim, iidx) == (dim, idx) {
                    return Err(SimplicialError::FixedSimplex(self.cell_string(dim, idx)));
                }
                if self.involute_cell(idim, iidx) != (dim, idx) {
                    return Err(SimplicialError::NotInComplex(format!(
                        "involution not involutive at {}",
                        self.cell_string(dim, idx)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Canonical text dump (stable format).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "Q d={} ground={} t={}\n",
            self.d, self.ground, self.t
        ));
        out.push_str(&format!("vertices {}\n", self.vertices.len()));
        for (v, x) in self.vertices.iter().zip(&self.realizations) {
            let coords: Vec<String> = x
                .coords()
                .iter()
                .map(|(s, c)| format!("{s}:{}", format_ratio(c)))
                .collect();
            out.push_str(&format!("{v} = {}\n", coords.join(" ")));
        }
        for (dim, bucket) in self.simplices.iter().enumerate() {
            out.push_str(&format!("simplices dim={} count={}\n", dim, bucket.len()));
            for idx in 0..bucket.len() {
                out.push_str(&self.cell_string(dim, idx));
                out.push('\n');
            }
        }
        out
    }
}

/// Realize a chain vertex: coordinates `c/w(T)` with `c` normalizing the sum
/// to one, so the score `w(T)·λ_T` is the same for every set of the chain.
fn realize_chain(chain: &Chain, t: u32) -> SpherePoint {
    let inv_sum: Ratio = chain.iter().map(|s| weight(s, t).recip()).sum();
    let c = inv_sum.recip();
    let coords = chain.iter().map(|s| (s, &c / weight(s, t))).collect();
    SpherePoint::new(coords).expect("chain realization is a valid point")
}
