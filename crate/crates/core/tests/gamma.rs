//! Tests for correlation, independent sign patterns, and the interpolation
//! constant γ, with the 3×3 case frozen from hand elimination.

use bu_lab_core::caps::Caps;
use bu_lab_core::gamma::{
    check_gamma_realizable, corr, find_independent_pattern, gamma_interpolation, PatternMatrix,
};
use bu_lab_core::learning::{powerset_class, projection_class, ExampleDistribution, Hypothesis};
use bu_lab_core::ratio::{ratio, Ratio};
use num_traits::{One, Zero};

fn pm(rows: &[&[i8]]) -> PatternMatrix {
    PatternMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).expect("valid matrix")
}

// ---------- corr ----------

#[test]
fn corr_examples() {
    let q = ExampleDistribution::point_mass(2, 0, true);
    assert_eq!(corr(&q, &Hypothesis::new(vec![true, false])), Ratio::one());
    assert_eq!(
        corr(&q, &Hypothesis::new(vec![false, false])),
        -Ratio::one()
    );
    // Loss 1/4 ⇒ correlation 1/2.
    let q = ExampleDistribution::new(2, vec![((0, true), ratio(3, 4)), ((1, false), ratio(1, 4))])
        .unwrap();
    assert_eq!(corr(&q, &Hypothesis::new(vec![true, true])), ratio(1, 2));
}

// ---------- pattern matrices ----------

#[test]
fn pattern_matrix_validation() {
    assert!(PatternMatrix::new(vec![vec![1, -1], vec![-1, 1]]).is_ok());
    assert!(PatternMatrix::new(vec![vec![1, 0], vec![-1, 1]]).is_err());
    assert!(PatternMatrix::new(vec![vec![1, -1]]).is_err()); // not square
    assert!(PatternMatrix::new(vec![]).is_err());
}

#[test]
fn find_pattern_in_small_classes() {
    let caps = Caps::default();
    let c = powerset_class(2, &caps).unwrap();
    let (hyps, points, p) = find_independent_pattern(&c, 2).unwrap();
    assert_eq!(hyps.len(), 2);
    assert_eq!(points.len(), 2);
    for (i, &h) in hyps.iter().enumerate() {
        for (j, &x) in points.iter().enumerate() {
            let want = if c.hypotheses()[h].labels[x] { 1 } else { -1 };
            assert_eq!(p.rows()[i][j], want);
        }
    }
    assert!(
        gamma_interpolation(&p).is_ok(),
        "returned pattern is full rank"
    );

    // A single hypothesis has pattern rank one.
    let single = bu_lab_core::learning::ConceptClass::new(
        "one".into(),
        vec!["a".into(), "b".into()],
        vec![Hypothesis::new(vec![true, false])],
    )
    .unwrap();
    assert!(find_independent_pattern(&single, 2).is_none());
    assert!(find_independent_pattern(&single, 1).is_some());
}

#[test]
fn find_pattern_in_projection_classes() {
    let caps = Caps::default();
    for m in 2..=4u32 {
        let c = projection_class(m, &caps).unwrap();
        let (hyps, points, p) =
            find_independent_pattern(&c, m as usize).unwrap_or_else(|| panic!("m={m}"));
        assert_eq!(hyps.len(), m as usize);
        assert_eq!(points.len(), m as usize);
        let g = gamma_interpolation(&p).unwrap();
        assert!(g.gamma > Ratio::zero());
        // Deterministic.
        let again = find_independent_pattern(&c, m as usize).unwrap();
        assert_eq!((hyps, points, p), again);
        // No pattern can exceed the number of hypotheses.
        assert!(find_independent_pattern(&c, m as usize + 1).is_none());
    }
}

// ---------- γ interpolation ----------

#[test]
fn gamma_small_cases() {
    assert!(gamma_interpolation(&pm(&[&[1]])).unwrap().gamma.is_one());
    assert!(gamma_interpolation(&pm(&[&[1, 1], &[1, -1]]))
        .unwrap()
        .gamma
        .is_one());
    assert!(gamma_interpolation(&pm(&[&[1, 1], &[1, 1]])).is_err());
}

#[test]
fn gamma_three_by_three() {
    let p = pm(&[&[1, 1, 1], &[1, 1, -1], &[1, -1, 1]]);
    let g = gamma_interpolation(&p).unwrap();
    assert_eq!(g.gamma, ratio(1, 3));
    assert_eq!(g.argmin_labels, vec![-1, 1, 1]);
    assert_eq!(g.alpha, vec![ratio(1, 1), ratio(-1, 1), ratio(-1, 1)]);
    // The reported coefficients do solve Σ αᵢ·rowᵢ = ȳ.
    for j in 0..3 {
        let got: Ratio = (0..3)
            .map(|i| g.alpha[i].clone() * ratio(p.rows()[i][j] as i64, 1))
            .sum();
        assert_eq!(got, ratio(g.argmin_labels[j] as i64, 1));
    }
}

#[test]
fn gamma_positive_on_random_full_rank_matrices() {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(17);
    let mut found = 0;
    while found < 10 {
        let d = rng.gen_range(1..=4usize);
        let rows: Vec<Vec<i8>> = (0..d)
            .map(|_| {
                (0..d)
                    .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
                    .collect()
            })
            .collect();
        let p = PatternMatrix::new(rows).unwrap();
        if let Ok(g) = gamma_interpolation(&p) {
            assert!(g.gamma > Ratio::zero());
            assert!(g.gamma <= Ratio::one());
            found += 1;
        }
    }
}

// ---------- realizability check ----------

#[test]
fn gamma_check_passes_at_gamma() {
    let p = pm(&[&[1, 1, 1], &[1, 1, -1], &[1, -1, 1]]);
    check_gamma_realizable(&p, &ratio(1, 3), 10_000, 0).unwrap();
    // The one-dimensional case at its exact γ.
    check_gamma_realizable(&pm(&[&[1]]), &Ratio::one(), 100, 0).unwrap();
}

#[test]
fn gamma_check_fails_above_gamma() {
    let p = pm(&[&[1, 1, 1], &[1, 1, -1], &[1, -1, 1]]);
    for bump in [ratio(1, 100), ratio(1, 1000)] {
        let gamma_prime = ratio(1, 3) + &bump;
        let v = check_gamma_realizable(&p, &gamma_prime, 10_000, 0).unwrap_err();
        // The witness is a genuine distribution …
        let total: Ratio = v.q.iter().cloned().sum();
        assert!(total.is_one());
        assert!(v.q.iter().all(|x| x >= &Ratio::zero()));
        // … whose best signed-row correlation really is below the bar.
        let mut best = -Ratio::one();
        for i in 0..3 {
            let c: Ratio = (0..3)
                .map(|j| v.q[j].clone() * ratio((p.rows()[i][j] * v.labels[j]) as i64, 1))
                .sum();
            let c = if c < Ratio::zero() { -c } else { c };
            if c > best {
                best = c;
            }
        }
        assert_eq!(best, v.max_corr);
        assert!(v.max_corr < gamma_prime);
        assert!(v.max_corr >= ratio(1, 3), "γ itself is still realizable");
    }
}

#[test]
fn gamma_check_examples_d2() {
    let p = pm(&[&[1, 1], &[1, -1]]);
    check_gamma_realizable(&p, &Ratio::one(), 1_000, 5).unwrap();
    assert!(check_gamma_realizable(&p, &(Ratio::one() + ratio(1, 100)), 1_000, 5).is_err());
}
