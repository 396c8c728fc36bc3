use std::collections::BTreeSet;

use kisin_core::algebra::{EpsilonModel, Field, Mat, PolyRing, PolySeries, RamRing};
use kisin_core::kisin::UTKisinModule;
use kisin_core::phigamma::{
    default_tau_precision, kernel_oracle, kernel_solve, tau_shape_check, tropical_forced_zeros, tropical_from_matrix,
    KernelConfig, TauMatrix,
};
use kisin_core::shape::closed_set_from_weights;
use kisin_core::Error;
use rand::SeedableRng;

fn template(k: &Field, t: &[u32]) -> Mat<PolySeries> {
    let polys = PolyRing::new(k.clone());
    Mat::from_fn(t.len(), |i, j| if i == j { polys.monomial(k.one(), t[i] as usize) } else { polys.zero() })
}

#[test]
fn block_diagonal_tau_lies_in_b_c() {
    let k = Field::prime(5).unwrap();
    for t in [vec![2, 0, 4], vec![0, 3], vec![5, 1, 0]] {
        let m = UTKisinModule::new(k.clone(), template(&k, &t), *t.iter().max().unwrap()).unwrap();
        let ring = RamRing::with_default_epsilon(k.clone(), default_tau_precision(5, m.height())).unwrap();
        let tau = TauMatrix::block_diagonal(&ring, &t).unwrap();
        let verdict = tau_shape_check(&ring, &m, &tau).unwrap();
        assert!(verdict.holds(), "t = {t:?}");
    }
}

#[test]
fn kernel_samples_lie_in_b_c() {
    let k = Field::prime(3).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for t in [vec![0, 2, 1], vec![1, 0, 3], vec![0, 3]] {
        let f = template(&k, &t);
        let m = UTKisinModule::new(k.clone(), f.clone(), *t.iter().max().unwrap()).unwrap();
        let n = 200;
        let ring = RamRing::with_default_epsilon(k.clone(), n).unwrap();
        let system = kernel_solve(&ring, &f, &KernelConfig::default()).unwrap();
        for _ in 0..4 {
            let tau = system.sample(&mut rng).unwrap();
            assert!(tau_shape_check(&ring, &m, &tau).unwrap().holds(), "t = {t:?}");
        }
    }
}

#[test]
fn nonzero_entry_outside_b_c_is_reported() {
    let k = Field::prime(5).unwrap();
    let t = [2, 0];
    let m = UTKisinModule::new(k.clone(), template(&k, &t), 2).unwrap();
    let ring = RamRing::with_default_epsilon(k.clone(), 100).unwrap();
    let mut entries = TauMatrix::block_diagonal(&ring, &t).unwrap().entries().clone();
    entries.set(0, 1, ring.x_pow(3));
    // such data cannot satisfy the identity, so the check refuses it up front
    let err = tau_shape_check(&ring, &m, &TauMatrix::new(entries)).unwrap_err();
    assert!(matches!(err, Error::PreconditionFailed(_)));
}

#[test]
fn engines_match_closed_set_complement() {
    for p in [3u32, 5] {
        let k = Field::prime(p).unwrap();
        let ring = RamRing::with_default_epsilon(k.clone(), 8).unwrap();
        for t in [vec![0, 1], vec![p, 0], vec![1, 0, 2], vec![2, 1, 0]] {
            let expected = closed_set_from_weights(&t).unwrap().complement();
            let trop = tropical_forced_zeros(&t, &BTreeSet::new(), p, 1).unwrap();
            let kern = kernel_oracle(&ring, &template(&k, &t), &KernelConfig::default()).unwrap();
            assert_eq!(trop.forced_zero_positions, expected);
            assert_eq!(kern.forced_zero_positions, expected);
            assert_eq!(tropical_from_matrix(&template(&k, &t), p).unwrap().forced_zero_positions, expected);
        }
    }
}

#[test]
fn epsilon_model_does_not_change_the_pattern() {
    let k = Field::prime(5).unwrap();
    let t = [3, 0, 1];
    let reports: Vec<_> = EpsilonModel::variants()
        .into_iter()
        .map(|eps| {
            let ring = RamRing::new(k.clone(), 8, eps).unwrap();
            kernel_oracle(&ring, &template(&k, &t), &KernelConfig::default()).unwrap().forced_zero_positions
        })
        .collect();
    assert!(reports.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn kernel_refuses_large_dimension() {
    let k = Field::prime(5).unwrap();
    let ring = RamRing::with_default_epsilon(k.clone(), 8).unwrap();
    let err = kernel_oracle(&ring, &template(&k, &[0, 1, 2, 3]), &KernelConfig::default()).unwrap_err();
    assert_eq!(err, Error::DimensionTooLarge(4, 3));
}
