//! Sign patterns, signed correlation, and the exact interpolation constant.
//!
//! A pattern is a square ±1 matrix, typically cut out of a concept class by
//! choosing hypotheses (rows) and domain points (columns) whose restriction
//! is invertible. For a full-rank pattern `R`, every sign vector `ȳ` solves
//! `Σ_i α_i·R_i = ȳ` exactly; the interpolation constant is
//! `γ = min_ȳ 1/‖α(ȳ)‖₁`. Duality makes `γ` the exact optimum of the game
//! "pick a distribution `q` on the columns and signs `ȳ`, then read off the
//! best row correlation": every `(q, ȳ)` has some row with `|corr| ≥ γ`, and
//! a witness below any `γ′ > γ` exists. The checker probes exactly those
//! dual witnesses plus seeded random distributions.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::learning::{ConceptClass, ExampleDistribution, Hypothesis};
use crate::ratio::{ratio, Ratio};

#[derive(Debug, Error)]
pub enum GammaError {
    #[error("bad pattern matrix: {0}")]
    BadMatrix(String),
    #[error("pattern matrix is singular")]
    Singular,
}

/// A square matrix with entries ±1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMatrix {
    rows: Vec<Vec<i8>>,
}

impl PatternMatrix {
    pub fn new(rows: Vec<Vec<i8>>) -> Result<PatternMatrix, GammaError> {
        if rows.is_empty() {
            return Err(GammaError::BadMatrix("empty matrix".to_string()));
        }
        let n = rows.len();
        for row in &rows {
            if row.len() != n {
                return Err(GammaError::BadMatrix(format!(
                    "row of length {} in a {n}-row matrix",
                    row.len()
                )));
            }
            if row.iter().any(|&x| x != 1 && x != -1) {
                return Err(GammaError::BadMatrix("entries must be ±1".to_string()));
            }
        }
        Ok(PatternMatrix { rows })
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.rows
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }
}

/// Signed correlation `E[±1]`: the mass where the hypothesis agrees with the
/// label minus the mass where it errs. Equals `1 − 2·loss`.
pub fn corr(q: &ExampleDistribution, h: &Hypothesis) -> Ratio {
    q.atoms()
        .iter()
        .map(|(&(x, y), p)| if h.labels[x] == y { p.clone() } else { -p })
        .sum()
}

/// Greedily select `r` hypotheses and `r` domain points whose ±1 restriction
/// is invertible, scanning indices in ascending order. Returns the chosen
/// hypothesis indices, point indices, and the pattern, or `None` when the
/// full sign matrix has rank below `r`.
///
/// The greedy step is complete: an invertible minor of a matrix of larger
/// rank always extends by one row and one column.
pub fn find_independent_pattern(
    class: &ConceptClass,
    r: usize,
) -> Option<(Vec<usize>, Vec<usize>, PatternMatrix)> {
    if r == 0 {
        return None;
    }
    let entry = |i: usize, j: usize| -> i8 {
        if class.hypotheses()[i].labels[j] {
            1
        } else {
            -1
        }
    };
    let mut hyps: Vec<usize> = Vec::new();
    let mut points: Vec<usize> = Vec::new();
    while hyps.len() < r {
        let mut extended = false;
        'search: for i in 0..class.hypotheses().len() {
            if hyps.contains(&i) {
                continue;
            }
            for j in 0..class.domain_size() {
                if points.contains(&j) {
                    continue;
                }
                hyps.push(i);
                points.push(j);
                let minor: Vec<Vec<Ratio>> = hyps
                    .iter()
                    .map(|&a| {
                        points
                            .iter()
                            .map(|&b| ratio(entry(a, b) as i64, 1))
                            .collect()
                    })
                    .collect();
                if is_invertible(minor) {
                    extended = true;
                    break 'search;
                }
                hyps.pop();
                points.pop();
            }
        }
        if !extended {
            return None;
        }
    }
    let rows: Vec<Vec<i8>> = hyps
        .iter()
        .map(|&a| points.iter().map(|&b| entry(a, b)).collect())
        .collect();
    Some((hyps, points, PatternMatrix { rows }))
}

/// The exact interpolation constant of a full-rank pattern, with the sign
/// vector attaining it (first in enumeration order) and the solving
/// coefficients `Σ_i α_i·R_i = ȳ`.
#[derive(Debug, Clone)]
pub struct GammaResult {
    pub gamma: Ratio,
    pub argmin_labels: Vec<i8>,
    pub alpha: Vec<Ratio>,
}

/// Sign vectors in enumeration order: bit `i` of `b` clear means `+1`.
fn sign_vector(b: u64, d: usize) -> Vec<i8> {
    (0..d)
        .map(|i| if b >> i & 1 == 0 { 1 } else { -1 })
        .collect()
}

pub fn gamma_interpolation(p: &PatternMatrix) -> Result<GammaResult, GammaError> {
    let d = p.size();
    // Solving Σ_i α_i·R[i][j] = ȳ_j means inverting the transpose.
    let transpose: Vec<Vec<Ratio>> = (0..d)
        .map(|j| (0..d).map(|i| ratio(p.rows[i][j] as i64, 1)).collect())
        .collect();
    let inv = invert(&transpose).ok_or(GammaError::Singular)?;
    let mut best: Option<(Ratio, Vec<i8>, Vec<Ratio>)> = None;
    for b in 0..1u64 << d {
        let labels = sign_vector(b, d);
        let y: Vec<Ratio> = labels.iter().map(|&s| ratio(s as i64, 1)).collect();
        let alpha = mat_vec(&inv, &y);
        let norm: Ratio = alpha.iter().map(|a| a.abs()).sum();
        let gamma = norm.recip();
        if best.as_ref().map_or(true, |(g, _, _)| gamma < *g) {
            best = Some((gamma, labels, alpha));
        }
    }
    let (gamma, argmin_labels, alpha) = best.expect("patterns are nonempty");
    Ok(GammaResult {
        gamma,
        argmin_labels,
        alpha,
    })
}

/// A tested pair (column distribution, signs) whose best row correlation
/// falls below the claimed constant.
#[derive(Debug, Clone)]
pub struct GammaViolation {
    pub labels: Vec<i8>,
    pub q: Vec<Ratio>,
    pub max_corr: Ratio,
}

/// Check `max_i |Σ_j q_j·R_ij·ȳ_j| ≥ γ′` over all sign vectors for every
/// probed `q`: the uniform distribution, the exact dual witnesses
/// `q ∝ |R⁻¹ȳ|`, and `trials` seeded random distributions. At the true
/// constant the check always passes; above it the dual witnesses expose a
/// violation deterministically.
pub fn check_gamma_realizable(
    p: &PatternMatrix,
    gamma_prime: &Ratio,
    trials: u32,
    seed: u64,
) -> Result<(), GammaViolation> {
    let d = p.size();
    let mut candidates: Vec<Vec<Ratio>> = vec![vec![ratio(1, d as i64); d]];
    let as_ratio: Vec<Vec<Ratio>> = p
        .rows
        .iter()
        .map(|r| r.iter().map(|&x| ratio(x as i64, 1)).collect())
        .collect();
    if let Some(inv) = invert(&as_ratio) {
        for b in 0..1u64 << d {
            let y: Vec<Ratio> = sign_vector(b, d)
                .iter()
                .map(|&s| ratio(s as i64, 1))
                .collect();
            let r = mat_vec(&inv, &y);
            let norm: Ratio = r.iter().map(|x| x.abs()).sum();
            if !norm.is_zero() {
                candidates.push(r.iter().map(|x| x.abs() / &norm).collect());
            }
        }
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let raw: Vec<i64> = (0..d).map(|_| rng.gen_range(1..=100)).collect();
        let total: i64 = raw.iter().sum();
        candidates.push(raw.iter().map(|&x| ratio(x, total)).collect());
    }
    for q in &candidates {
        for b in 0..1u64 << d {
            let labels = sign_vector(b, d);
            let mut max_corr = Ratio::zero();
            for row in &p.rows {
                let c: Ratio = (0..d)
                    .map(|j| &q[j] * ratio((row[j] * labels[j]) as i64, 1))
                    .sum();
                let c = c.abs();
                if c > max_corr {
                    max_corr = c;
                }
            }
            if &max_corr < gamma_prime {
                return Err(GammaViolation {
                    labels,
                    q: q.clone(),
                    max_corr,
                });
            }
        }
    }
    Ok(())
}

/// Exact Gauss–Jordan inverse; `None` when singular.
fn invert(a: &[Vec<Ratio>]) -> Option<Vec<Vec<Ratio>>> {
    let n = a.len();
    let mut m: Vec<Vec<Ratio>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Ratio::one() } else { Ratio::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            let scaled = &*x / &p;
            *x = scaled;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            let pivot_row = m[col].clone();
            for (cell, p) in m[r].iter_mut().zip(&pivot_row) {
                *cell -= &f * p;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

fn mat_vec(m: &[Vec<Ratio>], v: &[Ratio]) -> Vec<Ratio> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Exact singularity test by forward elimination.
fn is_invertible(mut m: Vec<Vec<Ratio>>) -> bool {
    let n = m.len();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return false;
        };
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            let pivot_tail = m[col][col..].to_vec();
            for (cell, pv) in m[r][col..].iter_mut().zip(&pivot_tail) {
                *cell -= &f * pv;
            }
        }
    }
    true
}
