//! Tests for the two sphere complexes.
//!
//! Face counts are checked against independent oracles implemented here with
//! plain bitmask dynamic programming (chains of subsets, then chains of
//! chains), plus a handful of frozen small tables and hand-evaluated examples.

use bu_lab_core::caps::Caps;
use bu_lab_core::ratio::{ratio, Ratio};
use bu_lab_core::simplicial::{evaluate_h, t_threshold, weight, BComplex, QComplex, SpherePoint};
use bu_lab_core::subsets::{Chain, Subset};
use num_traits::{One, Zero};

fn ss(elems: &[u32]) -> Subset {
    Subset::from_elems(elems)
}

fn ch(sets: &[&[u32]]) -> Chain {
    Chain::new(sets.iter().map(|s| ss(s)).collect()).expect("valid chain")
}

// ---------- independent counting oracles ----------

/// Number of chains of each length over the nontrivial subsets of [n],
/// computed by dynamic programming on bit masks.
fn oracle_chain_counts(n: u32) -> Vec<u64> {
    let full: u64 = (1 << n) - 1;
    let masks: Vec<u64> = (1..full).collect(); // nontrivial: nonempty proper
    let mut by_len: Vec<u64> = Vec::new();
    // f[mask] = number of chains of the current length ending at `mask`.
    let mut f: Vec<u64> = vec![1; masks.len()];
    loop {
        let total: u64 = f.iter().sum();
        if total == 0 {
            break;
        }
        by_len.push(total);
        let mut next = vec![0u64; masks.len()];
        for (i, &m) in masks.iter().enumerate() {
            // Sum f over proper nonempty submasks of m.
            let mut sub = (m - 1) & m;
            while sub != 0 {
                next[i] += f[(sub - 1) as usize];
                sub = (sub - 1) & m;
            }
        }
        f = next;
    }
    by_len
}

/// All chains over the nontrivial subsets of [n], each encoded as a bitmask
/// over subset indices (subset mask m ↦ bit m−1).
fn oracle_all_chains(n: u32) -> Vec<u64> {
    let full: u64 = (1 << n) - 1;
    let mut out = Vec::new();
    fn extend(n_full: u64, last: u64, bits: u64, out: &mut Vec<u64>) {
        out.push(bits);
        for next in (last + 1)..n_full {
            if next & last == last {
                extend(n_full, next, bits | (1 << (next - 1)), out);
            }
        }
    }
    for first in 1..full {
        extend(full, first, 1 << (first - 1), &mut out);
    }
    out
}

/// Number of chains-of-chains of each length (flags in the face poset of the
/// first subdivision), computed by DP over the chain set.
fn oracle_flag_counts(n: u32) -> Vec<u64> {
    let chains = oracle_all_chains(n);
    let mut by_len = Vec::new();
    let mut f: Vec<u64> = vec![1; chains.len()];
    loop {
        let total: u64 = f.iter().sum();
        if total == 0 {
            break;
        }
        by_len.push(total);
        let mut next = vec![0u64; chains.len()];
        for (i, &ci) in chains.iter().enumerate() {
            for (j, &cj) in chains.iter().enumerate() {
                if cj != ci && cj & ci == cj {
                    next[i] += f[j];
                }
            }
        }
        f = next;
    }
    by_len
}

// ---------- first subdivision ----------

#[test]
fn b_counts_match_oracle() {
    for d in 0..=5usize {
        let b = BComplex::build(d, &Caps::default()).unwrap();
        assert_eq!(b.f_vector(), oracle_chain_counts(d as u32 + 2), "d={d}");
    }
}

#[test]
fn b_frozen_small_tables() {
    let caps = Caps::default();
    assert_eq!(BComplex::build(0, &caps).unwrap().f_vector(), vec![2]);
    assert_eq!(BComplex::build(1, &caps).unwrap().f_vector(), vec![6, 6]);
    assert_eq!(
        BComplex::build(2, &caps).unwrap().f_vector(),
        vec![14, 36, 24]
    );
    assert_eq!(
        BComplex::build(3, &caps).unwrap().f_vector(),
        vec![30, 150, 240, 120]
    );
}

#[test]
fn b_structural_invariants() {
    for d in 0..=5usize {
        let b = BComplex::build(d, &Caps::default()).unwrap();
        let f = b.f_vector();
        assert_eq!(f[0], (1u64 << (d + 2)) - 2, "vertex count at d={d}");
        assert_eq!(f.len(), d + 1, "top dimension at d={d}");
        let facets: u64 = (2..=(d as u64 + 2)).product();
        assert_eq!(f[d], facets, "facet count at d={d}");
        let chi_want = 1 + if d % 2 == 0 { 1 } else { -1 };
        assert_eq!(b.euler_characteristic(), chi_want, "Euler char at d={d}");
    }
}

#[test]
fn b_simplices_are_sorted_canonically() {
    let b = BComplex::build(2, &Caps::default()).unwrap();
    for dim in 0..=2 {
        let cells = b.simplices(dim);
        for w in cells.windows(2) {
            assert!(w[0] < w[1], "dimension {dim} not strictly sorted");
        }
    }
    // Frozen: the first few edges of the d=2 complex in canonical order.
    let edges: Vec<String> = b
        .simplices(1)
        .iter()
        .take(3)
        .map(|c| c.to_string())
        .collect();
    assert_eq!(edges, vec!["{1}<{1,2}", "{1}<{1,3}", "{1}<{1,4}"]);
}

#[test]
fn b_involution_examples_and_freedom() {
    let b = BComplex::build(1, &Caps::default()).unwrap();
    assert_eq!(b.involute_simplex(&ch(&[&[1]])), ch(&[&[2, 3]]));
    assert_eq!(
        b.involute_simplex(&ch(&[&[1], &[1, 2]])),
        ch(&[&[3], &[2, 3]])
    );
    for d in 0..=5usize {
        let b = BComplex::build(d, &Caps::default()).unwrap();
        b.verify_involution_free()
            .unwrap_or_else(|e| panic!("d={d}: {e}"));
    }
}

#[test]
fn b_cap_is_enforced_and_raisable() {
    assert!(BComplex::build(6, &Caps::default()).is_err());
    let raised = Caps {
        b_dim: 6,
        ..Caps::default()
    };
    let b = BComplex::build(6, &raised).unwrap();
    assert_eq!(b.f_vector()[0], 254);
    assert_eq!(b.euler_characteristic(), 2);
}

// ---------- weights and the score function ----------

#[test]
fn t_threshold_values() {
    assert_eq!(t_threshold(0), 2);
    assert_eq!(t_threshold(1), 2);
    assert_eq!(t_threshold(2), 3);
    assert_eq!(t_threshold(3), 3);
    assert_eq!(t_threshold(4), 4);
}

#[test]
fn weight_rule() {
    assert_eq!(weight(ss(&[1]), 2), Ratio::one());
    assert_eq!(weight(ss(&[1, 2]), 2), ratio(1, 2));
    assert_eq!(weight(ss(&[1, 2]), 3), Ratio::one()); // |T| = t−1 boundary
    assert_eq!(weight(ss(&[1, 2, 3]), 3), ratio(1, 2));
}

#[test]
fn evaluate_h_examples() {
    // A vertex point: single coordinate 1.
    let x = SpherePoint::new(vec![(ss(&[1]), Ratio::one())]).unwrap();
    let (v, arg) = evaluate_h(&x, 2);
    assert_eq!(v, Ratio::one());
    assert_eq!(arg, vec![ss(&[1])]);

    // (2/5)·{1} + (3/5)·{1,2} at t=2: max is 2/5 on {1}.
    let x = SpherePoint::new(vec![(ss(&[1]), ratio(2, 5)), (ss(&[1, 2]), ratio(3, 5))]).unwrap();
    let (v, arg) = evaluate_h(&x, 2);
    assert_eq!(v, ratio(2, 5));
    assert_eq!(arg, vec![ss(&[1])]);

    // (1/3)·{1} + (2/3)·{1,2}: exact tie.
    let x = SpherePoint::new(vec![(ss(&[1]), ratio(1, 3)), (ss(&[1, 2]), ratio(2, 3))]).unwrap();
    let (v, arg) = evaluate_h(&x, 2);
    assert_eq!(v, ratio(1, 3));
    assert_eq!(arg, vec![ss(&[1]), ss(&[1, 2])]);
}

#[test]
fn sphere_point_validation() {
    // Support must be a chain.
    assert!(SpherePoint::new(vec![(ss(&[1]), ratio(1, 2)), (ss(&[2]), ratio(1, 2))]).is_err());
    // Coordinates must sum to one.
    assert!(SpherePoint::new(vec![(ss(&[1]), ratio(1, 2))]).is_err());
    // Coordinates must be non-negative.
    assert!(SpherePoint::new(vec![(ss(&[1]), ratio(3, 2)), (ss(&[1, 2]), ratio(-1, 2))]).is_err());
    // Zero coordinates are dropped from the support.
    let x = SpherePoint::new(vec![(ss(&[1]), Ratio::one()), (ss(&[1, 2]), Ratio::zero())]).unwrap();
    assert_eq!(x.support_chain(), ch(&[&[1]]));
}

// ---------- second subdivision ----------

#[test]
fn q_counts_match_oracle() {
    for d in 0..=3usize {
        let q = QComplex::build(d, &Caps::default()).unwrap();
        assert_eq!(q.f_vector(), oracle_flag_counts(d as u32 + 2), "d={d}");
    }
}

#[test]
fn q_frozen_tables() {
    let caps = Caps::default();
    assert_eq!(QComplex::build(0, &caps).unwrap().f_vector(), vec![2]);
    assert_eq!(QComplex::build(1, &caps).unwrap().f_vector(), vec![12, 12]);
    assert_eq!(
        QComplex::build(2, &caps).unwrap().f_vector(),
        vec![74, 216, 144]
    );
    assert_eq!(
        QComplex::build(3, &caps).unwrap().f_vector(),
        vec![540, 3420, 5760, 2880]
    );
}

#[test]
fn q_euler_characteristic() {
    for d in 0..=3usize {
        let q = QComplex::build(d, &Caps::default()).unwrap();
        let chi_want = 1 + if d % 2 == 0 { 1 } else { -1 };
        assert_eq!(q.euler_characteristic(), chi_want, "d={d}");
    }
}

#[test]
fn q_cap_is_enforced() {
    assert!(QComplex::build(5, &Caps::default()).is_err());
}

#[test]
fn q_vertex_realizations() {
    let q = QComplex::build(1, &Caps::default()).unwrap();
    // A single-set chain realizes at the corresponding subdivision vertex.
    let id = q.vertex_id(&ch(&[&[1]])).unwrap();
    let x = q.realize_vertex(id);
    assert_eq!(x.coord(ss(&[1])), Ratio::one());

    // A two-set chain splits 1/3 : 2/3 under the t=2 weights.
    let id = q.vertex_id(&ch(&[&[1], &[1, 2]])).unwrap();
    let x = q.realize_vertex(id);
    assert_eq!(x.coord(ss(&[1])), ratio(1, 3));
    assert_eq!(x.coord(ss(&[1, 2])), ratio(2, 3));
}

#[test]
fn q_realization_coefficients_positive_and_normalized() {
    for d in 0..=3usize {
        let q = QComplex::build(d, &Caps::default()).unwrap();
        for id in 0..q.vertices().len() {
            let x = q.realize_vertex(id as u32);
            let mut sum = Ratio::zero();
            for c in x.coords().values() {
                assert!(c > &Ratio::zero(), "non-positive coefficient at d={d}");
                sum += c;
            }
            assert!(sum.is_one());
            assert_eq!(
                &x.support_chain(),
                &q.vertices()[id],
                "support must be the chain itself"
            );
        }
    }
}

#[test]
fn q_involution_is_free_and_maps_cells() {
    for d in 0..=3usize {
        let q = QComplex::build(d, &Caps::default()).unwrap();
        q.verify_involution_free()
            .unwrap_or_else(|e| panic!("d={d}: {e}"));
    }
    let q = QComplex::build(1, &Caps::default()).unwrap();
    let v = q.cell_id_of_chains(&[ch(&[&[1], &[1, 2]])]).unwrap();
    let img = q.involute_cell(v.0, v.1);
    assert_eq!(img, q.cell_id_of_chains(&[ch(&[&[3], &[2, 3]])]).unwrap());
}

#[test]
fn involute_point_examples() {
    let b = BComplex::build(1, &Caps::default()).unwrap();
    // Midpoint of edge ({1},{1,2}) maps to the midpoint of ({3},{2,3}).
    let x = SpherePoint::new(vec![(ss(&[1]), ratio(1, 2)), (ss(&[1, 2]), ratio(1, 2))]).unwrap();
    let y = b.involute_point(&x);
    assert_eq!(y.coord(ss(&[3])), ratio(1, 2));
    assert_eq!(y.coord(ss(&[2, 3])), ratio(1, 2));
    assert_eq!(b.involute_point(&y), x);
}

#[test]
fn involute_point_is_involution_on_barycenters() {
    let q = QComplex::build(2, &Caps::default()).unwrap();
    for dim in 0..=q.max_dim() {
        for idx in 0..q.simplices(dim).len() {
            let x = q.barycenter(dim, idx);
            assert_eq!(q.involute_point(&q.involute_point(&x)), x);
        }
    }
}

#[test]
fn barycenter_support_is_top_chain() {
    let q = QComplex::build(2, &Caps::default()).unwrap();
    for dim in 0..=q.max_dim() {
        for idx in 0..q.simplices(dim).len() {
            let cell = q.cell(dim, idx);
            let top = *cell.vertex_ids().last().unwrap();
            let x = q.barycenter(dim, idx);
            assert_eq!(
                &x.support_chain(),
                &q.vertices()[top as usize],
                "support chain must equal the largest vertex-chain"
            );
        }
    }
}

#[test]
fn cell_of_point_recovers_barycenter_cells() {
    for d in 0..=2usize {
        let q = QComplex::build(d, &Caps::default()).unwrap();
        for dim in 0..=q.max_dim() {
            for idx in 0..q.simplices(dim).len() {
                let x = q.barycenter(dim, idx);
                assert_eq!(q.cell_of_point(&x).unwrap(), (dim, idx), "d={d}");
            }
        }
    }
}

#[test]
fn cell_of_point_recovers_random_interior_points() {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(7);
    let q = QComplex::build(2, &Caps::default()).unwrap();
    for _ in 0..200 {
        let dim = rng.gen_range(0..=q.max_dim());
        let idx = rng.gen_range(0..q.simplices(dim).len());
        // Random positive rational convex weights.
        let raw: Vec<i64> = (0..=dim).map(|_| rng.gen_range(1..50)).collect();
        let total: i64 = raw.iter().sum();
        let weights: Vec<Ratio> = raw.iter().map(|&w| ratio(w, total)).collect();
        let x = q.realize_convex(dim, idx, &weights).unwrap();
        assert_eq!(q.cell_of_point(&x).unwrap(), (dim, idx));
    }
}

#[test]
fn cell_of_point_rejects_foreign_points() {
    let q = QComplex::build(1, &Caps::default()).unwrap();
    // Support outside the ground set.
    let x = SpherePoint::new(vec![(ss(&[4]), Ratio::one())]).unwrap();
    assert!(q.cell_of_point(&x).is_err());
}
