use msnr_core::channel::{add_awgn, mix, ChannelSpec, Snr};
use msnr_core::eval::{align, corrcoef};
use msnr_core::io::{load_signals, read_signals, store_signals, write_signals};
use msnr_core::linalg::Matrix;
use msnr_core::{Error, SignalMatrix};
use proptest::prelude::*;

fn signal_strategy(n: usize, len: usize) -> impl Strategy<Value = SignalMatrix<f64>> {
    proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, len), n)
        .prop_map(|c| SignalMatrix::from_channels(c).unwrap())
}

#[test]
fn mixed_noise_has_aat_structure() {
    let n = 100_000;
    let s = SignalMatrix::from_channels(vec![vec![1.0; n], vec![1.0; n]]).unwrap();
    let a = Matrix::from_rows(&[vec![0.4684, 0.1952], vec![0.7384, 0.5483]]).unwrap();
    let noisy = mix(&ChannelSpec::new(a.clone(), Snr::Db(0.0), 42).unwrap(), &s).unwrap();
    let clean = mix(&ChannelSpec::new(a.clone(), Snr::Noiseless, 0).unwrap(), &s).unwrap();
    let noise: Vec<Vec<f64>> = (0..2)
        .map(|i| noisy.channel(i).iter().zip(clean.channel(i)).map(|(p, q)| p - q).collect())
        .collect();
    let cov = |i: usize, j: usize| noise[i].iter().zip(&noise[j]).map(|(p, q)| p * q).sum::<f64>() / n as f64;
    let aat = a.matmul(&a.transpose()).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let want = aat[(i, j)];
            assert!((cov(i, j) - want).abs() <= 0.05 * want, "({i},{j}) {} vs {want}", cov(i, j));
        }
    }
    let rho = cov(0, 1) / (cov(0, 0) * cov(1, 1)).sqrt();
    let rho_want = aat[(0, 1)] / (aat[(0, 0)] * aat[(1, 1)]).sqrt();
    assert!((rho - rho_want).abs() <= 0.05 * rho_want);
}

#[test]
fn store_load_roundtrip_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let x = SignalMatrix::from_channels(vec![vec![0.1, 1.0 / 3.0, -1e-17], vec![2.0, f64::MAX, f64::MIN_POSITIVE]]).unwrap();
    store_signals(&x, &path).unwrap();
    assert_eq!(load_signals::<f64>(&path).unwrap(), x);
    assert!(matches!(load_signals::<f64>(dir.path().join("missing.csv")), Err(Error::Io { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn noiseless_mixing_is_linear(s1 in signal_strategy(3, 30), s2 in signal_strategy(3, 30),
                                  a in proptest::collection::vec(-2.0f64..2.0, 9)) {
        let m = Matrix::from_rows(&[a[0..3].to_vec(), a[3..6].to_vec(), a[6..9].to_vec()]).unwrap();
        let spec = ChannelSpec::new(m, Snr::Noiseless, 0).unwrap();
        let lhs = mix(&spec, &s1.add(&s2).unwrap()).unwrap();
        let rhs = mix(&spec, &s1).unwrap().add(&mix(&spec, &s2).unwrap()).unwrap();
        for (p, q) in lhs.as_slice().iter().zip(rhs.as_slice()) {
            prop_assert!((p - q).abs() <= 1e-12 * (1.0 + p.abs()));
        }
    }

    #[test]
    fn awgn_reproducible(s in signal_strategy(2, 20), seed in any::<u64>(), db in -10.0f64..50.0) {
        prop_assume!(s.channel_powers().iter().all(|&p| p > 0.0));
        prop_assert_eq!(add_awgn(&s, Snr::Db(db), seed).unwrap(), add_awgn(&s, Snr::Db(db), seed).unwrap());
    }

    #[test]
    fn corrcoef_symmetric_and_affine(a in proptest::collection::vec(-5.0f64..5.0, 3..100),
                                     seed in any::<u64>(),
                                     alpha in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0],
                                     beta in -10.0f64..10.0) {
        let b: Vec<f64> = a.iter().enumerate().map(|(i, v)| (v * 1.3 + (seed.wrapping_add(i as u64) % 17) as f64).sin()).collect();
        let (Ok(r), Ok(r2)) = (corrcoef(&a, &b), corrcoef(&b, &a)) else { return Ok(()); };
        prop_assert_eq!(r, r2);
        let bt: Vec<f64> = b.iter().map(|v| alpha * v + beta).collect();
        let rt = corrcoef(&a, &bt).unwrap();
        prop_assert!((rt - alpha.signum() * r).abs() <= 1e-12);
    }

    #[test]
    fn align_invariant_under_permutation_and_scaling(
        s in signal_strategy(3, 64),
        y in signal_strategy(3, 64),
        perm in Just(vec![0usize, 1, 2]).prop_shuffle(),
        d in proptest::collection::vec(prop_oneof![-10.0f64..-0.1, 0.1f64..10.0], 3),
    ) {
        let Ok(base) = align(&s, &y) else { return Ok(()); };
        let p = Matrix::from_fn(3, 3, |i, j| if perm[i] == j { d[i] } else { 0.0 });
        let y2 = y.transform(&p).unwrap();
        let moved = align(&s, &y2).unwrap();
        prop_assert!((base.mean_corr - moved.mean_corr).abs() <= 1e-12);
        prop_assert!(moved.assignment.iter().all(|&j| j < 3));
        let mut sorted = moved.assignment.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, vec![0, 1, 2]);
        for (i, &j) in moved.assignment.iter().enumerate() {
            prop_assert_eq!(moved.per_source_corr[i], moved.corr_matrix[(i, j)].abs());
        }
        prop_assert!(moved.corr_matrix.as_slice().iter().all(|v| v.abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn csv_roundtrip_lossless(x in (1usize..5, 1usize..40).prop_flat_map(|(n, len)| {
        proptest::collection::vec(proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), len), n)
    })) {
        let x = SignalMatrix::from_channels(x).unwrap();
        let mut buf = Vec::new();
        write_signals(&x, &mut buf).unwrap();
        prop_assert_eq!(read_signals::<f64, _>(buf.as_slice()).unwrap(), x);
    }
}
