use kisin_core::algebra::{Field, FieldElem, FieldParams, Mat, PolyRing, RamRing, RamSeries, Valuation, WittRing, ZpInt};
use kisin_core::kisin::RankOneKisin;
use kisin_core::lift::{char_of_rank1, genericity_check, ModPChar, PsiModel};
use kisin_core::phigamma::{check_consistency, rank1_tau, TauMatrix};
use proptest::prelude::*;

fn f25() -> Field {
    Field::new(FieldParams::first_irreducible(5, 2).unwrap())
}

fn elem(k: &Field, n: u32) -> FieldElem {
    k.elements().nth((n % k.size()) as usize).unwrap()
}

fn series(ring: &RamRing, coeffs: &[u32]) -> RamSeries {
    let k = ring.field();
    ring.series(coeffs.iter().map(|&c| elem(k, c)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let k = f25();
        let (a, b, c) = (elem(&k, a), elem(&k, b), elem(&k, c));
        prop_assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
        prop_assert_eq!(k.mul(k.mul(a, b), c), k.mul(a, k.mul(b, c)));
        prop_assert_eq!(k.add(a, k.neg(a)), k.zero());
        prop_assert_eq!(k.frobenius(k.mul(a, b)), k.mul(k.frobenius(a), k.frobenius(b)));
        if !a.is_zero() {
            prop_assert_eq!(k.mul(a, k.inv(a).unwrap()), k.one());
            prop_assert_eq!(k.pow(a, 24), k.one());
        }
    }

    #[test]
    fn valuation_is_additive_and_scaled_by_phi(
        a in prop::collection::vec(0u32..25, 1..8),
        b in prop::collection::vec(0u32..25, 1..8),
    ) {
        let ring = RamRing::with_default_epsilon(f25(), 64).unwrap();
        let (a, b) = (series(&ring, &a), series(&ring, &b));
        prop_assume!(!a.is_zero_known() && !b.is_zero_known());
        let (va, vb) = (ring.valuation(&a).unwrap(), ring.valuation(&b).unwrap());
        prop_assert_eq!(ring.valuation(&ring.mul(&a, &b)).unwrap(), va + vb);
        prop_assert_eq!(ring.valuation(&ring.phi(&a)).unwrap(), va.scale(5));
        prop_assert!(va != Valuation::Infinite);
    }

    #[test]
    fn tau_is_a_ring_homomorphism(
        a in prop::collection::vec(0u32..25, 1..12),
        b in prop::collection::vec(0u32..25, 1..12),
    ) {
        let ring = RamRing::with_default_epsilon(f25(), 80).unwrap();
        let (a, b) = (series(&ring, &a), series(&ring, &b));
        let prod = ring.tau(&ring.mul(&a, &b));
        prop_assert!(ring.compare(&prod, &ring.mul(&ring.tau(&a), &ring.tau(&b))).is_equal());
        let sum = ring.tau(&ring.add(&a, &b));
        prop_assert!(ring.compare(&sum, &ring.add(&ring.tau(&a), &ring.tau(&b))).is_equal());
        // epsilon has F_p coefficients, so phi(epsilon) = epsilon^p
        prop_assert!(ring.compare(&ring.phi(&ring.tau(&a)), &ring.tau(&ring.phi(&a))).is_equal());
    }

    #[test]
    fn zp_powers_compose(alpha in 0i64..200, beta in 0i64..200, z in prop::collection::vec(0u32..5, 1..6)) {
        let ring = RamRing::with_default_epsilon(Field::prime(5).unwrap(), 60).unwrap();
        let z = ring.mul(&ring.x_pow(1), &series(&ring, &z));
        let pa = ring.unit_pow_zp(&z, &ZpInt::from_int(5, alpha)).unwrap();
        let pb = ring.unit_pow_zp(&z, &ZpInt::from_int(5, beta)).unwrap();
        let pab = ring.unit_pow_zp(&z, &ZpInt::from_int(5, alpha + beta)).unwrap();
        prop_assert!(ring.compare(&ring.mul(&pa, &pb), &pab).is_equal());
        let direct = ring.pow(&ring.add(&ring.one(), &z), alpha as u64);
        prop_assert!(ring.compare(&pa, &direct).is_equal());
    }

    #[test]
    fn rational_roots(num in 1i64..20, den in prop::sample::select(vec![2i64, 3, 4, 6, 7]), z in prop::collection::vec(0u32..5, 1..6)) {
        let ring = RamRing::with_default_epsilon(Field::prime(5).unwrap(), 60).unwrap();
        let z = ring.mul(&ring.x_pow(1), &series(&ring, &z));
        let root = ring.unit_pow_zp(&z, &ZpInt::from_rational(5, num, den).unwrap()).unwrap();
        let lhs = ring.pow(&root, den as u64);
        let rhs = ring.pow(&ring.add(&ring.one(), &z), num as u64);
        prop_assert!(ring.compare(&lhs, &rhs).is_equal());
    }

    #[test]
    fn character_group_law(m1 in 1u32..25, m2 in 1u32..25, m3 in 1u32..25, s1 in 0u32..4, s2 in 0u32..4, s3 in 0u32..4) {
        let k = f25();
        let c = |m, s| ModPChar { mu: elem(&k, m), s };
        let (a, b, cc) = (c(m1, s1), c(m2, s2), c(m3, s3));
        prop_assert_eq!(a.mul(&k, &b).mul(&k, &cc), a.mul(&k, &b.mul(&k, &cc)));
        prop_assert_eq!(a.mul(&k, &ModPChar::identity()), a);
        prop_assert_eq!(a.mul(&k, &a.inv(&k).unwrap()), ModPChar::identity());
        prop_assert_eq!(a.mul(&k, &b), b.mul(&k, &a));
    }

    #[test]
    fn genericity_is_order_independent(
        data in prop::collection::vec((0u32..6, 1u32..5), 1..5),
        rot in 0usize..5,
    ) {
        let k = Field::prime(5).unwrap();
        let chars: Vec<_> = data
            .iter()
            .map(|&(t, a)| char_of_rank1(&k, &RankOneKisin::new(t, k.from_int(a as i64)).unwrap(), PsiModel::default()))
            .collect();
        let mut moved = chars.clone();
        moved.rotate_left(rot % chars.len());
        moved.reverse();
        prop_assert_eq!(genericity_check(&k, &chars).generic, genericity_check(&k, &moved).generic);
    }

    #[test]
    fn reduction_is_a_ring_map(a in any::<u32>(), b in any::<u32>(), seed in any::<u64>()) {
        use rand::SeedableRng;
        use kisin_core::algebra::CoeffRing;
        let k = f25();
        let witt = WittRing::new(k.clone(), 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (elem(&k, a), elem(&k, b));
        let (la, lb) = (witt.random_lift(a, &mut rng), witt.random_lift(b, &mut rng));
        prop_assert_eq!(witt.reduce_mod_p(&witt.mul(&la, &lb)), k.mul(a, b));
        prop_assert_eq!(witt.reduce_mod_p(&witt.add(&la, &lb)), k.add(a, b));
        let (ta, tb) = (witt.teichmuller(a), witt.teichmuller(b));
        prop_assert_eq!(witt.mul(&ta, &tb), witt.teichmuller(k.mul(a, b)));
    }

    #[test]
    fn rank1_data_is_consistent(t in 0u32..6, a in 1i64..5) {
        let k = Field::prime(5).unwrap();
        let ring = RamRing::with_default_epsilon(k.clone(), 120).unwrap();
        let polys = PolyRing::new(k.clone());
        let a_phi = Mat::from_flat(1, vec![polys.monomial(k.from_int(a), t as usize)]).unwrap();
        let tau = TauMatrix::new(Mat::from_flat(1, vec![rank1_tau(&ring, t).unwrap()]).unwrap());
        prop_assert!(check_consistency(&ring, &a_phi, &tau).unwrap().is_verified());
    }
}
