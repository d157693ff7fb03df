mod common;

use common::*;
use msnr_core::channel::Snr;
use msnr_core::eval::align;
use msnr_core::harness::{demo_pipeline, DemoConfig};
use msnr_core::linalg::{generalized_eigen, Matrix, SymMatrix};
use msnr_core::msnr::*;
use msnr_core::SignalMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ma(l: usize) -> MovingAverageSpec {
    MovingAverageSpec::new(l).unwrap()
}

/// Direct evaluation of the shrinking causal window.
fn naive_moving_average(x: &[f64], l: usize) -> Vec<f64> {
    (0..x.len())
        .map(|n| {
            let w = l.min(n + 1);
            (0..w).map(|j| x[n - j]).sum::<f64>() / w as f64
        })
        .collect()
}

fn naive_gram(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a[0].len() as f64;
    a.iter()
        .map(|u| a.iter().map(|v| u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>() / n).collect())
        .collect()
}

fn db(v: f64, u: f64) -> f64 {
    10.0 * (v / u).log10()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moving_average_matches_direct_sum(
        x in proptest::collection::vec(-10.0f64..10.0, 2..200),
        l in 2usize..40,
    ) {
        prop_assume!(l <= x.len());
        let got = moving_average(&SignalMatrix::single(x.clone()).unwrap(), ma(l)).unwrap();
        for (g, w) in got.channel(0).iter().zip(naive_moving_average(&x, l)) {
            prop_assert!((g - w).abs() <= 1e-12 * (1.0 + w.abs()));
        }
    }

    #[test]
    fn correlation_matrices_match_direct_products(
        chans in (1usize..4).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, 50), n)),
        l in 2usize..20,
    ) {
        let x = SignalMatrix::from_channels(chans.clone()).unwrap();
        let (c, cbar) = correlation_matrices(&x, ma(l)).unwrap();
        let diffs: Vec<Vec<f64>> = chans
            .iter()
            .map(|ch| naive_moving_average(ch, l).iter().zip(ch).map(|(m, v)| m - v).collect())
            .collect();
        let (c0, cb0) = (naive_gram(&chans), naive_gram(&diffs));
        for i in 0..chans.len() {
            for j in 0..chans.len() {
                prop_assert!((c[(i, j)] - c0[i][j]).abs() <= 1e-12 * (1.0 + c0[i][j].abs()));
                prop_assert!((cbar[(i, j)] - cb0[i][j]).abs() <= 1e-12 * (1.0 + cb0[i][j].abs()));
                prop_assert_eq!(c[(i, j)], c[(j, i)]);
            }
        }
        // Gram matrices are positive semidefinite
        for _ in 0..5 {
            let v: Vec<f64> = (0..chans.len()).map(|k| (k as f64 + 0.5).sin()).collect();
            prop_assert!(c.quadratic_form(&v) >= -1e-12 && cbar.quadratic_form(&v) >= -1e-12);
        }
    }

    #[test]
    fn objective_invariant_under_row_scaling(
        seed in any::<u64>(),
        d in proptest::collection::vec(prop_oneof![-100.0f64..-0.01, 0.01f64..100.0], 3),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_spd(3, 0.1, &mut rng);
        let cbar = random_spd(3, 0.1, &mut rng);
        let w = random_matrix(3, &mut rng);
        let dw = Matrix::diagonal(&d).matmul(&w).unwrap();
        let a = objective(&w, &c, &cbar).unwrap();
        let b = objective(&dw, &c, &cbar).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
}

#[test]
fn moving_average_hand_example_against_direct_sum() {
    assert_eq!(naive_moving_average(&[1.0, 2.0, 3.0, 4.0, 5.0], 3), vec![1.0, 1.5, 2.0, 3.0, 4.0]);
}

fn central_difference(w: &Matrix<f64>, c: &SymMatrix<f64>, cbar: &SymMatrix<f64>, h: f64) -> Matrix<f64> {
    let mut g = Matrix::zeros(w.rows(), w.cols());
    for i in 0..w.rows() {
        for k in 0..w.cols() {
            let row_obj = |delta: f64| {
                let mut v = w.row(i).to_vec();
                v[k] += delta;
                db(quad(c, &v), quad(cbar, &v))
            };
            g[(i, k)] = (row_obj(h) - row_obj(-h)) / (2.0 * h);
        }
    }
    g
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in [2, 3, 4] {
        for _ in 0..15 {
            let c = random_spd(n, 0.1, &mut rng);
            let cbar = random_spd(n, 0.1, &mut rng);
            let w = random_matrix(n, &mut rng);
            let g = objective_gradient(&w, &c, &cbar).unwrap();
            let fd = central_difference(&w, &c, &cbar, 1e-6);
            let diff = Matrix::from_fn(n, n, |i, j| g[(i, j)] - fd[(i, j)]).frobenius_norm();
            assert!(diff <= 1e-5 * g.frobenius_norm(), "n={n}: rel {}", diff / g.frobenius_norm());
        }
    }
}

#[test]
fn gradient_homogeneous_of_degree_minus_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = random_spd(3, 0.1, &mut rng);
    let cbar = random_spd(3, 0.1, &mut rng);
    let w = random_matrix(3, &mut rng);
    let g = objective_gradient(&w, &c, &cbar).unwrap();
    for alpha in [0.1, 3.0, -2.0] {
        let ga = objective_gradient(&w.scale(alpha), &c, &cbar).unwrap();
        for (a, b) in g.as_slice().iter().zip(ga.as_slice()) {
            assert!((a / alpha - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}

#[test]
fn eigenvectors_are_stationary_and_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in [2, 3, 5] {
        let c = random_spd(n, 0.1, &mut rng);
        let cbar = random_spd(n, 0.1, &mut rng);
        let r = generalized_eigen(&c, &cbar).unwrap();
        let g = objective_gradient(&r.eigenvectors, &c, &cbar).unwrap();
        for i in 0..n {
            let norm: f64 = g.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(norm <= 1e-8, "row {i}: {norm}");
        }
        let f = objective(&r.eigenvectors, &c, &cbar).unwrap();
        for (fi, l) in f.iter().zip(&r.eigenvalues) {
            assert!((fi - 10.0 * l.log10()).abs() <= 1e-9);
        }
    }
}

fn demo_mixture(snr: Snr) -> (SignalMatrix<f64>, SignalMatrix<f64>) {
    let run = demo_pipeline(&DemoConfig { seed: 1, snr, ma_length: 7 }).unwrap();
    (run.sources, run.mixtures)
}

#[test]
fn rows_maximize_constrained_rayleigh_ratio() {
    let (_, x) = demo_mixture(Snr::Db(30.0));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // a 3-channel mixture exercises a non-trivial constraint set
    let extra: Vec<f64> = (0..x.n_samples()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let x3 = SignalMatrix::from_channels(vec![x.channel(0).to_vec(), x.channel(1).to_vec(), extra]).unwrap();
    for x in [x, x3] {
        let sol = solve_demixing(&x, ma(7)).unwrap();
        let (c, cbar) = correlation_matrices(&x, ma(7)).unwrap();
        let n = x.n_channels();
        for i in 0..n {
            for _ in 0..10_000 {
                let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                for j in 0..i {
                    let wj = sol.demixing.row(j);
                    let p = cbar.bilinear_form(wj, &v);
                    v.iter_mut().zip(wj).for_each(|(a, b)| *a -= p * b);
                }
                assert!(rayleigh(&c, &cbar, &v) <= sol.eigenvalues[i] + 1e-6);
            }
        }
    }
}

#[test]
fn solution_is_stationary_and_consistent() {
    let (_, x) = demo_mixture(Snr::Db(30.0));
    let sol = solve_demixing(&x, ma(7)).unwrap();
    let (c, cbar) = correlation_matrices(&x, ma(7)).unwrap();
    let g = objective_gradient(&sol.demixing, &c, &cbar).unwrap();
    assert!(g.max_abs() <= 1e-8 * c.frobenius_norm());
    for (f, l) in sol.objective_db.iter().zip(&sol.eigenvalues) {
        assert!((f - 10.0 * l.log10()).abs() <= 1e-9);
    }
    assert!(sol.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    assert!(!sol.ridge_applied);
}

#[test]
fn normalization_does_not_change_directions() {
    let (_, x) = demo_mixture(Snr::Db(20.0));
    let (c, cbar) = correlation_matrices(&x, ma(7)).unwrap();
    let big_n = x.n_samples() as f64;
    let a = generalized_eigen(&c, &cbar).unwrap();
    let b = generalized_eigen(&c.scale(big_n), &cbar.scale(big_n)).unwrap();
    for k in 0..2 {
        let ua = a.eigenvectors.row(k);
        let ub = b.eigenvectors.row(k);
        let (na, nb) = (quad(&SymMatrix::identity(2), ua).sqrt(), quad(&SymMatrix::identity(2), ub).sqrt());
        let dot: f64 = ua.iter().zip(ub).map(|(p, q)| p * q).sum::<f64>() / (na * nb);
        assert!((dot.abs() - 1.0).abs() < 1e-12);
        assert!((a.eigenvalues[k] - b.eigenvalues[k]).abs() < 1e-9 * a.eigenvalues[k]);
    }
}

#[test]
fn angular_grid_reaches_top_eigenvalue() {
    let (_, x) = demo_mixture(Snr::Noiseless);
    let sol = solve_demixing(&x, ma(7)).unwrap();
    let (c, cbar) = correlation_matrices(&x, ma(7)).unwrap();
    let steps = 100_000;
    let best = (0..steps)
        .map(|k| {
            let t = std::f64::consts::PI * k as f64 / steps as f64;
            let v = [t.cos(), t.sin()];
            db(quad(&c, &v), quad(&cbar, &v))
        })
        .fold(f64::MIN, f64::max);
    let top = 10.0 * sol.eigenvalues[0].log10();
    assert!(best <= top + 1e-9);
    assert!(top - best <= 1e-3, "{top} vs {best}");
}

#[test]
fn unmixed_sources_are_relabeled() {
    let n = 2000;
    let smooth: Vec<f64> = (0..n).map(|k| (k as f64 * 0.01).sin()).collect();
    let medium: Vec<f64> = (0..n).map(|k| (k as f64 * 0.3).cos()).collect();
    let x = SignalMatrix::from_channels(vec![smooth, medium]).unwrap();
    let sol = solve_demixing(&x, ma(7)).unwrap();
    let y = apply_demixing(&sol.demixing, &x).unwrap();
    let rep = align(&x, &y).unwrap();
    assert!(rep.per_source_corr.iter().all(|&c| c >= 0.99), "{:?}", rep.per_source_corr);
}

#[test]
fn demo_mixture_noiseless_separates() {
    let (s, x) = demo_mixture(Snr::Noiseless);
    let sol = solve_demixing(&x, ma(7)).unwrap();
    let rep = align(&s, &apply_demixing(&sol.demixing, &x).unwrap()).unwrap();
    assert!(rep.per_source_corr.iter().all(|&c| c >= 0.99), "{:?}", rep.per_source_corr);
}

#[test]
fn pipeline_output_equals_manual_composition() {
    let run = demo_pipeline(&DemoConfig::default()).unwrap();
    let sol = solve_demixing(&run.mixtures, ma(7)).unwrap();
    assert_eq!(sol, run.solution);
    assert_eq!(apply_demixing(&sol.demixing, &run.mixtures).unwrap(), run.separated);
}

#[test]
fn ridge_rescues_single_flat_channel() {
    let varying: Vec<f64> = (0..200).map(|k| (k as f64 * 0.2).sin()).collect();
    let x = SignalMatrix::from_channels(vec![varying, vec![1.0; 200]]).unwrap();
    let sol = solve_demixing(&x, ma(5)).unwrap();
    assert!(sol.ridge_applied);
    let flat = SignalMatrix::from_channels(vec![vec![1.0; 200], vec![-1.0; 200]]).unwrap();
    assert!(solve_demixing(&flat, ma(5)).is_err());
}
