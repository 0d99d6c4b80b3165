mod common;

use approx::assert_abs_diff_eq;
use common::*;
use kemeny_core::embedding::{moore_penrose_defect, squared_vertex_distances};
use kemeny_core::simplex::total_squared_facet_distance;
use kemeny_core::*;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Pipeline {
    chain: MarkovChain,
    pi: StationaryDistribution,
    bundle: EmbeddingBundle,
    h: HittingTimeMatrix,
    c: CommuteTimeMatrix,
}

fn pipeline(chain: MarkovChain) -> Pipeline {
    let pi = stationary_distribution(&chain).unwrap();
    let bundle = EmbeddingBundle::build(&chain, &pi).unwrap();
    let h = hitting_times(&chain, &pi, &bundle.l_dagger).unwrap();
    let c = commute_times(&h);
    Pipeline { chain, pi, bundle, h, c }
}

fn delta(n: usize, x: usize) -> DVector<f64> {
    let mut d = DVector::zeros(n);
    d[x] = 1.0;
    d
}

#[test]
fn stationary_distributions() {
    let a = pipeline(chain_a());
    assert_eq!(a.pi.len(), 3);
    for (x, want) in [0.4, 0.3, 0.3].into_iter().enumerate() {
        assert_abs_diff_eq!(a.pi[x], want, epsilon = 1e-12);
    }
    let b = pipeline(chain_b());
    for x in 0..3 {
        assert_abs_diff_eq!(b.pi[x], 1.0 / 3.0, epsilon = 1e-12);
    }
    assert!(check_admissible(&a.chain, &a.pi).is_admissible());
}

#[test]
fn hitting_times_match_first_step_oracle() {
    let b = pipeline(chain_b());
    let oracle = hitting_times_first_step(b.chain.transition_matrix());
    for x in 0..3 {
        for y in 0..3 {
            let want = if x == y { 0.0 } else { 2.0 };
            assert_abs_diff_eq!(oracle[(x, y)], want, epsilon = 1e-12);
            assert_abs_diff_eq!(b.h.matrix()[(x, y)], want, epsilon = 1e-12);
        }
    }

    let a = pipeline(chain_a());
    let h = a.h.matrix();
    assert_abs_diff_eq!(h[(0, 1)] + h[(1, 0)], 3.75, epsilon = 1e-12);
    assert!(h.diagonal().iter().all(|&d| d == 0.0));

    for (_, chain) in suite().take(40) {
        let p = pipeline(chain);
        let oracle = hitting_times_first_step(p.chain.transition_matrix());
        assert!((p.h.matrix() - oracle).amax() < TOL_CROSS);
        assert!(p.h.residual() < TOL_SOLVE);
        assert!(p.h.matrix().diagonal().iter().all(|&d| d == 0.0));
    }
}

#[test]
fn commute_times_from_both_routes() {
    let a = pipeline(chain_a());
    let c = a.c.matrix();
    assert_abs_diff_eq!(c[(0, 1)], 3.75, epsilon = 1e-12);
    assert_abs_diff_eq!(c[(0, 2)], 3.75, epsilon = 1e-12);
    assert_abs_diff_eq!(c[(1, 2)], 5.0, epsilon = 1e-12);
    assert_eq!(c, &c.transpose());
    assert!((a.bundle.commute_times().matrix() - c).amax() < TOL_CROSS);

    let b = pipeline(chain_b());
    for x in 0..3 {
        for y in 0..3 {
            let want = if x == y { 0.0 } else { 4.0 };
            assert_abs_diff_eq!(b.c.matrix()[(x, y)], want, epsilon = 1e-12);
            assert_abs_diff_eq!(b.bundle.commute_times().matrix()[(x, y)], want, epsilon = 1e-12);
        }
    }

    for (_, chain) in suite().take(60) {
        let p = pipeline(chain);
        assert!((p.bundle.commute_times().matrix() - p.c.matrix()).amax() < TOL_CROSS);
    }
}

#[test]
fn laplacian_entries() {
    let a = pipeline(chain_a());
    let want = DMatrix::from_row_slice(3, 3, &[0.4, -0.2, -0.2, -0.2, 0.3, -0.1, -0.2, -0.1, 0.3]);
    let l = a.bundle.laplacian.matrix();
    assert!((l - want).amax() < 1e-15);
    assert!((l * DVector::from_element(3, 1.0)).amax() <= 1e-16);
    assert_eq!(l, &l.transpose());
}

#[test]
fn pseudoinverse_identities() {
    let a = pipeline(chain_a());
    let d = delta(3, 1) - delta(3, 0);
    assert_abs_diff_eq!(d.dot(&(&a.bundle.l_dagger * &d)), 3.75, epsilon = 1e-12);

    for (_, chain) in suite().take(60) {
        let p = pipeline(chain);
        let l = p.bundle.laplacian.matrix();
        let pinv = &p.bundle.l_dagger;
        let scale = pinv.amax().max(1.0);
        assert!(moore_penrose_defect(l, pinv) / scale < TOL_SOLVE);
        assert!((pinv * DVector::from_element(p.chain.len(), 1.0)).amax() < TOL_SOLVE * scale);
        assert_eq!(pinv, &pinv.transpose());
        assert!((p.bundle.v.tr_mul(&p.bundle.v) - pinv).amax() < TOL_SOLVE * scale);
        assert_eq!(p.bundle.eigen.rank, p.chain.len() - 1);
        assert!(p.bundle.eigen.eigenvalues.iter().all(|&e| e >= 0.0));
        assert!(kemeny_core::embedding::affinely_independent(&p.bundle.v));
    }
}

#[test]
fn gram_factor_is_canonical() {
    let a = pipeline(chain_a());
    let v = gram_factor(&a.bundle.l_dagger).unwrap();
    assert_eq!(v, a.bundle.v);
    let d = squared_vertex_distances(&v);
    assert_abs_diff_eq!(d[(0, 1)], 3.75, epsilon = 1e-12);
    assert_abs_diff_eq!(d[(0, 2)], 3.75, epsilon = 1e-12);
    assert_abs_diff_eq!(d[(1, 2)], 5.0, epsilon = 1e-12);
    // Descending eigenvalues, first significant entry of each eigenvector positive.
    let e = &a.bundle.eigen.eigenvalues;
    assert!(e[0] >= e[1] && e[1] > e[2]);
    for k in 0..2 {
        let row = v.row(k);
        let first = row.iter().find(|x| x.abs() > 1e-8 * row.amax()).unwrap();
        assert!(*first > 0.0);
    }
}

#[test]
fn coords_to_point_cases() {
    let a = pipeline(chain_a());
    for x in 0..3 {
        let p = coords_to_point(&a.bundle.v, &BarycentricVector::vertex(3, x).unwrap()).unwrap();
        assert_eq!(p, a.bundle.vertex(x));
    }
    let b = pipeline(chain_b());
    let origin = coords_to_point(&b.bundle.v, &BarycentricVector::centroid(3)).unwrap();
    assert!(origin.amax() < 1e-12);

    let circ = circumcenter(&a.c).unwrap();
    let gamma = coords_to_point(&a.bundle.v, &circ.gamma_hat).unwrap();
    for x in 0..3 {
        assert_abs_diff_eq!((&gamma - a.bundle.vertex(x)).norm_squared(), 1.40625, epsilon = 1e-12);
    }
    assert!(matches!(
        coords_to_point(&a.bundle.v, &BarycentricVector::centroid(4)),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn circumcenter_matches_triangle_formulas() {
    let a = pipeline(chain_a());
    let c = a.c.matrix();
    let (r2, gamma) = triangle_circumcenter(c[(1, 2)], c[(0, 2)], c[(0, 1)]);
    assert_abs_diff_eq!(r2, 1.40625, epsilon = 1e-12);
    let circ = circumcenter(&a.c).unwrap();
    assert_abs_diff_eq!(circ.r_squared, r2, epsilon = 1e-12);
    assert_abs_diff_eq!(circ.radius(), 1.1859, epsilon = 5e-5);
    for x in 0..3 {
        assert_abs_diff_eq!(circ.gamma_hat[x], gamma[x], epsilon = 1e-12);
    }
    assert_abs_diff_eq!(gamma[0], 0.25, epsilon = 1e-12);
    assert_abs_diff_eq!(gamma[1], 0.375, epsilon = 1e-12);
    assert!(circ.residual < TOL_SOLVE);

    let b = pipeline(chain_b());
    let circ = circumcenter(&b.c).unwrap();
    assert_abs_diff_eq!(circ.r_squared, 4.0 / 3.0, epsilon = 1e-12);
    for x in 0..3 {
        assert_abs_diff_eq!(circ.gamma_hat[x], 1.0 / 3.0, epsilon = 1e-12);
    }
}

#[test]
fn circumcenter_is_equidistant_on_suite() {
    for (_, chain) in suite().take(60) {
        let p = pipeline(chain);
        let n = p.chain.len();
        let circ = circumcenter(&p.c).unwrap();
        for x in 0..n {
            let vx = BarycentricVector::vertex(n, x).unwrap();
            let d = squared_distance_qf(&p.c, &vx, &circ.gamma_hat).unwrap();
            assert!((d - circ.r_squared).abs() < TOL_CROSS);
        }
    }
}

#[test]
fn center_distance_of_example() {
    let a = pipeline(chain_a());
    let gamma = BarycentricVector::from_slice(&[0.25, 0.375, 0.375]).unwrap();
    let ell = BarycentricVector::from(&a.pi);
    let d2 = squared_distance_qf(&a.c, &gamma, &ell).unwrap();
    assert_abs_diff_eq!(d2, 0.05625, epsilon = 1e-12);
    assert_abs_diff_eq!(d2.sqrt(), 0.2372, epsilon = 5e-5);
}

#[test]
fn facet_distance_matches_hyperplane_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for (_, chain) in suite().take(40) {
        let p = pipeline(chain);
        let n = p.chain.len();
        for _ in 0..10 {
            let coords = BarycentricVector::new(random_coords(n, 0.5, &mut rng)).unwrap();
            let point = coords_to_point(&p.bundle.v, &coords).unwrap();
            for x in 0..n {
                let others: Vec<usize> = (0..n).filter(|&y| y != x).collect();
                let facet = p.bundle.v.select_columns(&others);
                let oracle = distance_to_affine_hull(&point, &facet);
                let formula = facet_distance(&coords, &p.pi, x).unwrap();
                assert!(
                    (oracle - formula).abs() < TOL_CROSS,
                    "state {x}: oracle {oracle} formula {formula}"
                );
            }
        }
    }
}

#[test]
fn lemoine_point_examples() {
    let a = pipeline(chain_a());
    let ell = lemoine(&a.pi).unwrap();
    assert_eq!(ell.ell_hat.to_vec(), a.pi.to_vec());
    let total = total_squared_facet_distance(&ell.ell_hat, &a.pi).unwrap();
    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-15);

    let b = pipeline(chain_b());
    let ell = lemoine(&b.pi).unwrap();
    let circ = circumcenter(&b.c).unwrap();
    assert!((ell.ell_hat.as_vector() - circ.gamma_hat.as_vector()).amax() < 1e-12);

    for (_, chain) in suite().take(60) {
        let p = pipeline(chain);
        assert!((lemoine(&p.pi).unwrap().facet_total - 1.0).abs() < TOL_CROSS);
    }
}

#[test]
fn kemeny_routes_on_examples() {
    let a = pipeline(chain_a());
    let per_state = kemeny_per_state(&a.h, &a.pi).unwrap();
    for k in per_state.iter() {
        assert_abs_diff_eq!(*k, 1.35, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(kemeny_commute(&a.c, &a.pi).unwrap(), 1.35, epsilon = 1e-12);
    let circ = circumcenter(&a.c).unwrap();
    let ell = lemoine(&a.pi).unwrap();
    assert_abs_diff_eq!(kemeny_geometric(&circ, &ell, &a.c).unwrap(), 1.35, epsilon = 1e-12);

    let b = pipeline(chain_b());
    for k in kemeny_per_state(&b.h, &b.pi).unwrap().iter() {
        assert_abs_diff_eq!(*k, 4.0 / 3.0, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(kemeny_commute(&b.c, &b.pi).unwrap(), 4.0 / 3.0, epsilon = 1e-12);
    let circ = circumcenter(&b.c).unwrap();
    let ell = lemoine(&b.pi).unwrap();
    assert_abs_diff_eq!(kemeny_geometric(&circ, &ell, &b.c).unwrap(), 4.0 / 3.0, epsilon = 1e-12);
}

/// Non-unit eigenvalues of a 3×3 stochastic matrix from its characteristic
/// polynomial: after factoring out λ = 1 the remaining roots solve
/// `λ² − (tr − 1)λ + det = 0`.
fn deflated_eigenvalues(p: &DMatrix<f64>) -> (f64, f64) {
    let tr = p.trace();
    let det = p[(0, 0)] * (p[(1, 1)] * p[(2, 2)] - p[(1, 2)] * p[(2, 1)])
        - p[(0, 1)] * (p[(1, 0)] * p[(2, 2)] - p[(1, 2)] * p[(2, 0)])
        + p[(0, 2)] * (p[(1, 0)] * p[(2, 1)] - p[(1, 1)] * p[(2, 0)]);
    let b = tr - 1.0;
    let disc = (b * b - 4.0 * det).sqrt();
    ((b + disc) / 2.0, (b - disc) / 2.0)
}

#[test]
fn spectral_route_matches_characteristic_polynomial() {
    for (chain, want_k) in [(chain_a(), 1.35), (chain_b(), 4.0 / 3.0)] {
        let pi = stationary_distribution(&chain).unwrap();
        let spectrum = kemeny_spectral(&chain, &pi).unwrap();
        let (l2, l3) = deflated_eigenvalues(chain.transition_matrix());
        assert_abs_diff_eq!(spectrum.eigenvalues[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spectrum.eigenvalues[1], l2, epsilon = 1e-12);
        assert_abs_diff_eq!(spectrum.eigenvalues[2], l3, epsilon = 1e-12);
        assert_abs_diff_eq!(spectrum.kemeny, 1.0 / (1.0 - l2) + 1.0 / (1.0 - l3), epsilon = 1e-12);
        assert_abs_diff_eq!(spectrum.kemeny, want_k, epsilon = 1e-12);
    }
    let (l2, l3) = deflated_eigenvalues(chain_a().transition_matrix());
    assert_abs_diff_eq!(l2, -1.0 / 3.0, epsilon = 1e-15);
    assert_abs_diff_eq!(l3, -2.0 / 3.0, epsilon = 1e-15);
}

#[test]
fn full_report_on_seeded_eight_state_chain() {
    let chain = kemeny_core::generate::suite_chain(8, 0, 8..=8);
    assert_eq!(chain.len(), 8);
    let a = full_report(&chain).unwrap();
    assert!(a.kemeny.spread < TOL_CROSS);
    assert!(a.kemeny.agreement < TOL_CROSS);
    assert!(a.kemeny.values().all(|k| k > 0.0));
    assert!(a.geometry.r_squared >= a.kemeny.commute);
}

#[test]
fn full_report_rejections_name_the_condition() {
    assert_eq!(full_report(&path_chain()).unwrap_err(), Error::Inadmissible(Condition::Aperiodic));
    assert_eq!(full_report(&two_cycles()).unwrap_err(), Error::Inadmissible(Condition::Irreducible));
    for seed in 0..10 {
        assert_eq!(
            full_report(&random_non_reversible(4, seed)).unwrap_err(),
            Error::Inadmissible(Condition::Reversible)
        );
    }
}
