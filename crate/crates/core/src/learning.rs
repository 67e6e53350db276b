//! Finite concept classes, chain-structured example distributions, the
//! majority-or-consistent learner, and the replication experiment harness.
//!
//! A distribution built on a chain `A_1 ⊂ … ⊂ A_k` places mass `λ_i/2` on
//! the point of the cube indexed by `A_i` with label 1 and mass `λ_i/2` on
//! the point indexed by its complement with label 0. Complementing the chain
//! flips every hypothesis's loss: `L_D(h) + L_{νD}(h) = 1`. The experiment
//! harness replays a sampling-plus-learning trial many times and reports how
//! concentrated the output hypothesis is.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::caps::Caps;
use crate::ratio::{format_ratio, ratio, ratio_to_f64, Ratio};
use crate::subsets::{nonempty_subsets, Chain, Subset};

#[derive(Debug, Error)]
pub enum LearningError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("class size {m} exceeds the cap {cap}")]
    CapExceeded { m: u32, cap: u32 },
    #[error("duplicate hypothesis in class")]
    DuplicateHypothesis,
    #[error("bad distribution: {0}")]
    BadDistribution(String),
    #[error("empty sample")]
    EmptySample,
    #[error("no hypothesis is consistent with the sample")]
    NoConsistentHypothesis,
    #[error("distribution is not realizable by the class")]
    NotRealizable,
    #[error("bad embedding: {0}")]
    BadEmbedding(String),
}

/// A binary hypothesis over an indexed finite domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypothesis {
    pub labels: Vec<bool>,
}

impl Hypothesis {
    pub fn new(labels: Vec<bool>) -> Hypothesis {
        Hypothesis { labels }
    }

    /// The labels as a 0/1 string in domain order.
    pub fn label_string(&self) -> String {
        self.labels
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// A named finite concept class: domain point names plus hypotheses.
///
/// Domain points on which every hypothesis agrees are indistinguishable to
/// learning, so construction keeps only the first of each identical column.
#[derive(Debug, Clone)]
pub struct ConceptClass {
    name: String,
    domain: Vec<String>,
    hypotheses: Vec<Hypothesis>,
}

impl ConceptClass {
    pub fn new(
        name: String,
        domain: Vec<String>,
        hypotheses: Vec<Hypothesis>,
    ) -> Result<ConceptClass, LearningError> {
        if domain.is_empty() || hypotheses.is_empty() {
            return Err(LearningError::BadParameter(
                "classes need a nonempty domain and at least one hypothesis".to_string(),
            ));
        }
        for h in &hypotheses {
            if h.labels.len() != domain.len() {
                return Err(LearningError::BadParameter(format!(
                    "hypothesis has {} labels over a domain of {}",
                    h.labels.len(),
                    domain.len()
                )));
            }
        }
        let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
        let mut keep: Vec<usize> = Vec::new();
        for x in 0..domain.len() {
            let column: Vec<bool> = hypotheses.iter().map(|h| h.labels[x]).collect();
            if seen.insert(column) {
                keep.push(x);
            }
        }
        let domain: Vec<String> = keep.iter().map(|&x| domain[x].clone()).collect();
        let hypotheses: Vec<Hypothesis> = hypotheses
            .iter()
            .map(|h| Hypothesis::new(keep.iter().map(|&x| h.labels[x]).collect()))
            .collect();
        for (i, h) in hypotheses.iter().enumerate() {
            if hypotheses[..i].contains(h) {
                return Err(LearningError::DuplicateHypothesis);
            }
        }
        Ok(ConceptClass {
            name,
            domain,
            hypotheses,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }
}

/// The class of coordinate projections over the `m`-cube: point `u` is the
/// bitstring `x` with `x_i = (u >> (i−1)) & 1`, and `h_i` reads bit `i`.
pub fn projection_class(m: u32, caps: &Caps) -> Result<ConceptClass, LearningError> {
    check_class_size(m, caps)?;
    let size = 1usize << m;
    let domain: Vec<String> = (0..size).map(|u| cube_point_name(u, m)).collect();
    let hypotheses: Vec<Hypothesis> = (1..=m)
        .map(|i| Hypothesis::new((0..size).map(|u| u >> (i - 1) & 1 == 1).collect()))
        .collect();
    ConceptClass::new(format!("projection:{m}"), domain, hypotheses)
}

/// The class of all subsets of `{1, …, m}`: one hypothesis per subset, the
/// empty set first, the rest in canonical order.
pub fn powerset_class(m: u32, caps: &Caps) -> Result<ConceptClass, LearningError> {
    check_class_size(m, caps)?;
    let domain: Vec<String> = (1..=m).map(|i| i.to_string()).collect();
    let mut hypotheses = vec![Hypothesis::new(vec![false; m as usize])];
    for s in nonempty_subsets(m) {
        hypotheses.push(Hypothesis::new((1..=m).map(|i| s.contains(i)).collect()));
    }
    ConceptClass::new(format!("powerset:{m}"), domain, hypotheses)
}

fn check_class_size(m: u32, caps: &Caps) -> Result<(), LearningError> {
    if m == 0 {
        return Err(LearningError::BadParameter(
            "m must be at least 1".to_string(),
        ));
    }
    if m > caps.class_m {
        return Err(LearningError::CapExceeded {
            m,
            cap: caps.class_m,
        });
    }
    Ok(())
}

fn cube_point_name(u: usize, m: u32) -> String {
    (1..=m)
        .map(|i| if u >> (i - 1) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// The pointwise majority vote of a class, ties resolved to 1.
pub fn majority_vote(class: &ConceptClass) -> Hypothesis {
    let total = class.hypotheses().len();
    let labels = (0..class.domain_size())
        .map(|x| 2 * class.hypotheses().iter().filter(|h| h.labels[x]).count() >= total)
        .collect();
    Hypothesis::new(labels)
}

/// A distribution over labeled examples `(x, y)` with exact atom masses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleDistribution {
    domain_size: usize,
    atoms: BTreeMap<(usize, bool), Ratio>,
}

impl ExampleDistribution {
    pub fn new(
        domain_size: usize,
        atoms: Vec<((usize, bool), Ratio)>,
    ) -> Result<ExampleDistribution, LearningError> {
        let mut map: BTreeMap<(usize, bool), Ratio> = BTreeMap::new();
        for (key, p) in atoms {
            *map.entry(key).or_insert_with(Ratio::zero) += p;
        }
        map.retain(|_, p| !p.is_zero());
        let mut sum = Ratio::zero();
        for (&(x, _), p) in &map {
            if x >= domain_size {
                return Err(LearningError::BadDistribution(format!(
                    "atom at {x} outside a domain of {domain_size}"
                )));
            }
            if p < &Ratio::zero() {
                return Err(LearningError::BadDistribution("negative mass".to_string()));
            }
            sum += p;
        }
        if !sum.is_one() {
            return Err(LearningError::BadDistribution(format!(
                "total mass {}, not 1",
                format_ratio(&sum)
            )));
        }
        Ok(ExampleDistribution {
            domain_size,
            atoms: map,
        })
    }

    /// All mass on a single labeled point.
    pub fn point_mass(domain_size: usize, x: usize, y: bool) -> ExampleDistribution {
        ExampleDistribution::new(domain_size, vec![((x, y), Ratio::one())])
            .expect("a point mass is a valid distribution")
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn atoms(&self) -> &BTreeMap<(usize, bool), Ratio> {
        &self.atoms
    }

    pub fn prob(&self, x: usize, y: bool) -> Ratio {
        self.atoms.get(&(x, y)).cloned().unwrap_or_else(Ratio::zero)
    }
}

/// A chain-structured distribution over the projection domain of `[m]`.
#[derive(Debug, Clone)]
pub struct ChainDistribution {
    m: u32,
    chain: Chain,
    weights: Vec<Ratio>,
    dist: ExampleDistribution,
}

/// Build the distribution of a chain `A_1 ⊂ … ⊂ A_k` of nontrivial subsets
/// of `[m]` with positive weights summing to one: mass `λ_i/2` on
/// `(x(A_i), 1)` and `λ_i/2` on `(x([m]∖A_i), 0)`.
pub fn chain_distribution(
    m: u32,
    chain: Chain,
    weights: Vec<Ratio>,
    caps: &Caps,
) -> Result<ChainDistribution, LearningError> {
    check_class_size(m, caps)?;
    for s in chain.iter() {
        if s.max_elem().unwrap_or(0) > m || s.card() >= m {
            return Err(LearningError::BadDistribution(format!(
                "{s} is not a nontrivial subset of [{m}]"
            )));
        }
    }
    if weights.len() != chain.len() {
        return Err(LearningError::BadDistribution(format!(
            "{} weights for a chain of {}",
            weights.len(),
            chain.len()
        )));
    }
    if weights.iter().any(|w| w <= &Ratio::zero()) {
        return Err(LearningError::BadDistribution(
            "weights must be positive".to_string(),
        ));
    }
    if !weights.iter().sum::<Ratio>().is_one() {
        return Err(LearningError::BadDistribution(
            "weights must sum to 1".to_string(),
        ));
    }
    let half = ratio(1, 2);
    let mut atoms = Vec::new();
    for (s, w) in chain.iter().zip(&weights) {
        atoms.push(((s.mask() as usize, true), w * &half));
        atoms.push(((s.complement(m).mask() as usize, false), w * &half));
    }
    let dist = ExampleDistribution::new(1 << m, atoms)?;
    Ok(ChainDistribution {
        m,
        chain,
        weights,
        dist,
    })
}

impl ChainDistribution {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn weights(&self) -> &[Ratio] {
        &self.weights
    }

    pub fn distribution(&self) -> ExampleDistribution {
        self.dist.clone()
    }

    /// The complemented chain with reversed weights.
    pub fn involute(&self) -> ChainDistribution {
        let chain = self.chain.complement(self.m);
        let weights: Vec<Ratio> = self.weights.iter().rev().cloned().collect();
        chain_distribution(
            self.m,
            chain,
            weights,
            &Caps {
                class_m: self.m,
                ..Caps::default()
            },
        )
        .expect("the involuted chain stays valid")
    }

    /// Canonical text form: `chain:{{1}<{1,2}};(1/2,1/2)`.
    pub fn spec_string(&self) -> String {
        let weights: Vec<String> = self.weights.iter().map(format_ratio).collect();
        format!("chain:{{{}}};({})", self.chain, weights.join(","))
    }
}

/// A deterministic suite of random chain distributions for one `m`.
pub fn chain_suite(
    m: u32,
    count: usize,
    seed: u64,
    caps: &Caps,
) -> Result<Vec<ChainDistribution>, LearningError> {
    check_class_size(m, caps)?;
    if m < 2 {
        return Err(LearningError::BadParameter(
            "chains need nontrivial subsets, so m must be at least 2".to_string(),
        ));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut perm: Vec<u32> = (1..=m).collect();
        perm.shuffle(&mut rng);
        let sizes: Vec<usize> = loop {
            let s: Vec<usize> = (1..m as usize).filter(|_| rng.gen::<bool>()).collect();
            if !s.is_empty() {
                break s;
            }
        };
        let sets: Vec<Subset> = sizes
            .iter()
            .map(|&k| Subset::from_elems(&perm[..k]))
            .collect();
        let chain = Chain::new(sets).expect("nested prefixes form a chain");
        let raw: Vec<i64> = (0..sizes.len()).map(|_| rng.gen_range(1..=20)).collect();
        let total: i64 = raw.iter().sum();
        let weights: Vec<Ratio> = raw.iter().map(|&w| ratio(w, total)).collect();
        out.push(chain_distribution(m, chain, weights, caps)?);
    }
    Ok(out)
}

/// Exact population loss `Pr[h(x) ≠ y]`.
pub fn population_loss(d: &ExampleDistribution, h: &Hypothesis) -> Ratio {
    d.atoms()
        .iter()
        .filter(|(&(x, y), _)| h.labels[x] != y)
        .map(|(_, p)| p.clone())
        .sum()
}

/// Total variation distance between two distributions on the same domain.
pub fn tv_distance(a: &ExampleDistribution, b: &ExampleDistribution) -> Ratio {
    let keys: BTreeSet<(usize, bool)> = a.atoms().keys().chain(b.atoms().keys()).copied().collect();
    let sum: Ratio = keys
        .into_iter()
        .map(|(x, y)| (a.prob(x, y) - b.prob(x, y)).abs())
        .sum();
    sum / ratio(2, 1)
}

/// Whether some hypothesis of the class has zero population loss.
pub fn is_realizable(d: &ExampleDistribution, class: &ConceptClass) -> bool {
    d.domain_size() == class.domain_size()
        && class
            .hypotheses()
            .iter()
            .any(|h| population_loss(d, h).is_zero())
}

/// The signed embedding: coordinate `x` carries `Pr[(x,1)] − Pr[(x,0)]`.
/// Distributions giving one point both labels do not embed.
pub fn theta_embed(d: &ExampleDistribution) -> Result<Vec<Ratio>, LearningError> {
    let mut v = vec![Ratio::zero(); d.domain_size()];
    for (x, slot) in v.iter_mut().enumerate() {
        let (pt, pf) = (d.prob(x, true), d.prob(x, false));
        if !pt.is_zero() && !pf.is_zero() {
            return Err(LearningError::BadEmbedding(format!(
                "point {x} carries both labels"
            )));
        }
        *slot = pt - pf;
    }
    Ok(v)
}

/// Invert the signed embedding: positive coordinates become label-1 atoms,
/// negative ones label-0 atoms.
pub fn theta_invert(v: &[Ratio]) -> Result<ExampleDistribution, LearningError> {
    let mut atoms = Vec::new();
    for (x, c) in v.iter().enumerate() {
        if c > &Ratio::zero() {
            atoms.push(((x, true), c.clone()));
        } else if c < &Ratio::zero() {
            atoms.push(((x, false), -c));
        }
    }
    ExampleDistribution::new(v.len(), atoms)
}

/// A multiset of labeled examples stored as exact counts.
#[derive(Debug, Clone)]
pub struct LabeledSample {
    counts: BTreeMap<(usize, bool), u64>,
    total: u64,
}

impl LabeledSample {
    pub fn from_pairs(pairs: Vec<(usize, bool)>) -> LabeledSample {
        let mut counts: BTreeMap<(usize, bool), u64> = BTreeMap::new();
        for key in pairs {
            *counts.entry(key).or_insert(0) += 1;
        }
        let total = counts.values().sum();
        LabeledSample { counts, total }
    }

    pub fn from_counts(counts: BTreeMap<(usize, bool), u64>) -> LabeledSample {
        let mut counts = counts;
        counts.retain(|_, &mut c| c > 0);
        let total = counts.values().sum();
        LabeledSample { counts, total }
    }

    pub fn counts(&self) -> &BTreeMap<(usize, bool), u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Exact empirical loss of a hypothesis on a sample.
pub fn empirical_loss(s: &LabeledSample, h: &Hypothesis) -> Result<Ratio, LearningError> {
    if s.total() == 0 {
        return Err(LearningError::EmptySample);
    }
    let wrong: u64 = s
        .counts()
        .iter()
        .filter(|(&(x, y), _)| h.labels[x] != y)
        .map(|(_, &c)| c)
        .sum();
    Ok(ratio(wrong as i64, s.total() as i64))
}

/// Draw an i.i.d. sample of size `n` as exact counts: one conditional
/// binomial per atom in canonical order, the last atom absorbing the
/// remainder.
pub fn draw_sample(d: &ExampleDistribution, n: u64, rng: &mut impl Rng) -> LabeledSample {
    let mut counts: BTreeMap<(usize, bool), u64> = BTreeMap::new();
    let mut remaining = n;
    let mut rem_mass = Ratio::one();
    let atoms: Vec<(&(usize, bool), &Ratio)> = d.atoms().iter().collect();
    for (i, (&key, p)) in atoms.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let k = if i + 1 == atoms.len() {
            remaining
        } else {
            let conditional = ratio_to_f64(&(*p / &rem_mass)).clamp(0.0, 1.0);
            Binomial::new(remaining, conditional)
                .expect("valid binomial")
                .sample(rng)
        };
        if k > 0 {
            counts.insert(key, k);
        }
        remaining -= k;
        rem_mass -= *p;
    }
    LabeledSample::from_counts(counts)
}

/// Sample size sufficient for all empirical losses to sit within `e` of
/// their population values except with probability `δ`, over a domain of
/// `m_dom` points: `⌈(2·m_dom·ln 2 + ln(1/δ)) / (2e²)⌉`.
pub fn sample_size_for(e: &Ratio, delta: &Ratio, m_dom: u64) -> Result<u64, LearningError> {
    if e <= &Ratio::zero() || e >= &Ratio::one() {
        return Err(LearningError::BadParameter(
            "e must lie in (0,1)".to_string(),
        ));
    }
    if delta <= &Ratio::zero() || delta >= &Ratio::one() {
        return Err(LearningError::BadParameter(
            "delta must lie in (0,1)".to_string(),
        ));
    }
    let ef = ratio_to_f64(e);
    let df = ratio_to_f64(delta);
    let n = (2.0 * m_dom as f64 * std::f64::consts::LN_2 + (1.0 / df).ln()) / (2.0 * ef * ef);
    Ok(n.ceil() as u64)
}

/// Which branch the learner took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerChoice {
    /// The majority vote was within tolerance of the sample.
    Majority,
    /// Fallback: the lowest-index hypothesis with zero empirical loss.
    Consistent(usize),
}

/// The learner: keep the majority vote when its empirical loss is at most
/// `(2·M + 2)·e` over a domain of `M` points, otherwise fall back to the
/// first hypothesis consistent with the sample.
pub fn learner(
    class: &ConceptClass,
    sample: &LabeledSample,
    e: &Ratio,
) -> Result<(LearnerChoice, Hypothesis), LearningError> {
    let maj = majority_vote(class);
    let loss = empirical_loss(sample, &maj)?;
    let threshold = ratio(2 * class.domain_size() as i64 + 2, 1) * e;
    if loss <= threshold {
        return Ok((LearnerChoice::Majority, maj));
    }
    match class.hypotheses().iter().position(|h| {
        empirical_loss(sample, h)
            .map(|l| l.is_zero())
            .unwrap_or(false)
    }) {
        Some(i) => Ok((LearnerChoice::Consistent(i), class.hypotheses()[i].clone())),
        None => Err(LearningError::NoConsistentHypothesis),
    }
}

/// Parameters of one replication experiment.
#[derive(Debug, Clone)]
pub struct ReplicationConfig {
    pub e: Ratio,
    pub delta: Ratio,
    pub n: u64,
    pub trials: u32,
    pub seed: u64,
}

/// Outcome of a replication experiment: output frequencies, the shortest
/// high-probability list, and exact population losses of the outputs.
#[derive(Debug, Serialize)]
pub struct ReplicationReport {
    pub class: String,
    pub m: u32,
    pub dist: String,
    pub e: String,
    pub n: u64,
    pub trials: u32,
    pub seed: u64,
    pub delta: String,
    pub frequencies: BTreeMap<String, String>,
    pub list: Vec<String>,
    pub list_size: usize,
    pub losses: BTreeMap<String, String>,
    pub max_frequency: String,
    pub fallback_trials: u32,
}

/// Run `trials` independent draw-and-learn rounds and aggregate the outputs.
///
/// Each trial seeds its own generator from the base seed and the trial
/// index, so the report does not depend on thread count.
pub fn replication_experiment(
    class: &ConceptClass,
    d: &ExampleDistribution,
    dist_spec: &str,
    cfg: &ReplicationConfig,
) -> Result<ReplicationReport, LearningError> {
    if d.domain_size() != class.domain_size() {
        return Err(LearningError::BadDistribution(format!(
            "distribution over {} points, class over {}",
            d.domain_size(),
            class.domain_size()
        )));
    }
    if !is_realizable(d, class) {
        return Err(LearningError::NotRealizable);
    }
    if cfg.trials == 0 || cfg.n == 0 {
        return Err(LearningError::BadParameter(
            "trials and n must be positive".to_string(),
        ));
    }
    let outcomes: Vec<(LearnerChoice, Hypothesis)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let stream = cfg
                .seed
                .wrapping_add((trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut rng = ChaCha12Rng::seed_from_u64(stream);
            let sample = draw_sample(d, cfg.n, &mut rng);
            learner(class, &sample, &cfg.e)
        })
        .collect::<Result<_, _>>()?;

    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    let mut by_label: BTreeMap<String, Hypothesis> = BTreeMap::new();
    let mut fallback_trials = 0u32;
    for (choice, h) in outcomes {
        let label = h.label_string();
        *counts.entry(label.clone()).or_insert(0) += 1;
        by_label.entry(label).or_insert(h);
        if matches!(choice, LearnerChoice::Consistent(_)) {
            fallback_trials += 1;
        }
    }

    let mut ordered: Vec<(&String, u32)> = counts.iter().map(|(l, &c)| (l, c)).collect();
    ordered.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let need = (Ratio::one() - &cfg.delta) * ratio(cfg.trials as i64, 1);
    let mut list: Vec<String> = Vec::new();
    let mut cum = 0u32;
    for (label, count) in &ordered {
        if ratio(cum as i64, 1) >= need {
            break;
        }
        list.push((*label).clone());
        cum += count;
    }

    let frequencies: BTreeMap<String, String> = counts
        .iter()
        .map(|(l, c)| (l.clone(), format!("{c}/{}", cfg.trials)))
        .collect();
    let losses: BTreeMap<String, String> = by_label
        .iter()
        .map(|(l, h)| (l.clone(), format_ratio(&population_loss(d, h))))
        .collect();
    let max_frequency = format!(
        "{}/{}",
        ordered.first().map(|x| x.1).unwrap_or(0),
        cfg.trials
    );

    Ok(ReplicationReport {
        class: class.name().to_string(),
        m: class.hypotheses().len() as u32,
        dist: dist_spec.to_string(),
        e: format_ratio(&cfg.e),
        n: cfg.n,
        trials: cfg.trials,
        seed: cfg.seed,
        delta: format_ratio(&cfg.delta),
        frequencies,
        list_size: list.len(),
        list,
        losses,
        max_frequency,
        fallback_trials,
    })
}
