use poissonlin::linalg::{self, CMat};
use poissonlin::measures::{l1_distance, Histogram};
use poissonlin::rng::stream;
use poissonlin::thompson::{random_feasible_instance, weyl_necessary, Mode};
use poissonlin::{
    dressing_left, e_inverse, e_map, factor_k_star, factor_star_k, hyperbolic_duflo, modular_tau,
    modular_tau_direct, ChamberPoint, GroupElement, HermitianElement, Involution, UnitaryElement,
};
use proptest::prelude::*;

fn unitary(seed: u64, r: usize) -> UnitaryElement {
    UnitaryElement::new(linalg::haar_unitary(&mut stream(seed, 7), r)).unwrap()
}

fn hermitian(seed: u64, r: usize, s: f64) -> HermitianElement {
    HermitianElement::new(linalg::random_hermitian(&mut stream(seed, 3), r).scale(s)).unwrap()
}

fn rel(a: &CMat, b: &CMat) -> f64 {
    linalg::frobenius(&(a - b)) / linalg::frobenius(b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorizations_reconstruct(seed in any::<u64>(), r in 1usize..=5) {
        let m = linalg::ginibre(&mut stream(seed, 0), r);
        let g = GroupElement::new(m.clone()).unwrap();
        let (l, k) = factor_star_k(&g).unwrap();
        prop_assert!(rel(&(l.matrix() * k.matrix()), &m) < 1e-12);
        let (k2, l2) = factor_k_star(&g).unwrap();
        prop_assert!(rel(&(k2.matrix() * l2.matrix()), &m) < 1e-12);
        let shape_ok = l.matrix().iter().enumerate().all(|(idx, z)| {
            let (i, j) = (idx % r, idx / r);
            if i < j { z.norm() == 0.0 } else if i == j { z.im == 0.0 && z.re > 0.0 } else { true }
        });
        prop_assert!(shape_ok);
    }

    #[test]
    fn dressing_is_a_left_action(seed in any::<u64>(), r in 1usize..=4) {
        let l = e_map(&hermitian(seed, r, 0.8));
        let (a, b) = (unitary(seed, r), unitary(seed.wrapping_add(1), r));
        let ab = a.mul(&b);
        let lhs = dressing_left(&ab, &l).unwrap();
        let rhs = dressing_left(&a, &dressing_left(&b, &l).unwrap()).unwrap();
        prop_assert!(rel(lhs.matrix(), rhs.matrix()) < 1e-12);
    }

    #[test]
    fn e_is_equivariant_and_invertible(seed in any::<u64>(), r in 1usize..=4, s in 0.05f64..1.5) {
        let mu = hermitian(seed, r, s);
        let k = unitary(seed, r);
        let lhs = e_map(&mu.conjugate_by(k.matrix()));
        let rhs = dressing_left(&k, &e_map(&mu)).unwrap();
        prop_assert!(rel(lhs.matrix(), rhs.matrix()) < 1e-10);
        prop_assert!(linalg::max_abs(&(e_inverse(&e_map(&mu)).matrix() - mu.matrix())) < 1e-10 * (1.0 + s));
    }

    #[test]
    fn radial_label_is_dressing_invariant(seed in any::<u64>(), r in 1usize..=4) {
        let l = e_map(&hermitian(seed, r, 1.0));
        let moved = dressing_left(&unitary(seed, r), &l).unwrap();
        prop_assert!(moved.radial_label().max_distance(&l.radial_label()) < 1e-10);
    }

    #[test]
    fn involutions_square_to_identity(seed in any::<u64>(), r in 1usize..=4) {
        let g = linalg::ginibre(&mut stream(seed, 0), r);
        for s in [Involution::Real, Involution::Twisted] {
            let twice = s.apply_matrix(&s.apply_matrix(&g).unwrap()).unwrap();
            prop_assert!(rel(&twice, &g) < 1e-12);
        }
    }

    #[test]
    fn duflo_factor_properties(v in proptest::collection::vec(-3.0f64..3.0, 1..=4), shift in -2.0f64..2.0) {
        let lambda = ChamberPoint::from_unsorted(v);
        let j = hyperbolic_duflo(&lambda);
        prop_assert!(j >= 1.0);
        let shifted = ChamberPoint::from_unsorted(lambda.values().iter().map(|x| x + shift).collect());
        prop_assert!((hyperbolic_duflo(&shifted) - j).abs() <= 1e-12 * j);
        prop_assert!((hyperbolic_duflo(&lambda.negated_reversed()) - j).abs() <= 1e-12 * j);
    }

    #[test]
    fn modular_function_matches_adjoint_determinant(seed in any::<u64>(), r in 1usize..=4) {
        let l = e_map(&hermitian(seed, r, 0.8));
        let a = modular_tau(&l);
        prop_assert!((a - modular_tau_direct(&l)).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn feasible_instances_pass_the_screen(seed in any::<u64>(), r in 1usize..=4, n in 2usize..=5, m in 0usize..6) {
        let (p, _) = random_feasible_instance(r, n, Mode::ALL[m], seed);
        prop_assert!(weyl_necessary(&p).passed);
    }

    #[test]
    fn l1_distance_is_a_symmetric_bounded_metric(
        a in proptest::collection::btree_map(0u32..20, 0.0f64..1.0, 1..10),
        b in proptest::collection::btree_map(0u32..20, 0.0f64..1.0, 1..10),
    ) {
        let norm = |m: std::collections::BTreeMap<u32, f64>| -> Histogram {
            let s: f64 = m.values().sum::<f64>().max(1e-300);
            m.into_iter().map(|(k, v)| (vec![k], v / s)).collect()
        };
        let (p, q) = (norm(a), norm(b));
        let d = l1_distance(&p, &q);
        prop_assert!((0.0..=2.0 + 1e-12).contains(&d));
        prop_assert_eq!(d, l1_distance(&q, &p));
        prop_assert_eq!(l1_distance(&p, &p), 0.0);
    }
}
