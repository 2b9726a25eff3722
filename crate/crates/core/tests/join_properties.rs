use num_traits::{One, Signed};
use proptest::prelude::*;
use sasaki_core::admissible::solve_extremal;
use sasaki_core::arith::{gcd, int, rat, sign};
use sasaki_core::join::{
    admissible_data_for_ray, admissible_data_unit_s, classify_ray, contact_invariants, fiber_quotient,
    relative_fano_indices, validate_join, BaseGeometry, RayClass, RayVector, WeightVector,
};
use sasaki_core::Error;

fn join_strategy() -> impl Strategy<Value = sasaki_core::join::JoinSpec> {
    (1u64..=6, 1u64..=30, 1u64..=12, 1u64..=12, 0usize..4).prop_filter_map("valid join", |(l1, l2, a, b, base)| {
        let base = [BaseGeometry::cp1(), BaseGeometry::cp2(), BaseGeometry::k3(), BaseGeometry::riemann_surface(3)][base].clone();
        validate_join(base, l1, l2, (a.max(b), a.min(b))).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn quotient_signs(join in join_strategy(), v1 in 1u64..40, v2 in 1u64..40) {
        prop_assume!(gcd(v1, v2) == 1 && join.w.w1 * v2 != join.w.w2 * v1);
        let fq = fiber_quotient(&join, &RayVector::quasi_regular(v1, v2).unwrap()).unwrap();
        prop_assert!(fq.r.abs() < num_rational::BigRational::one() && fq.r != int(0));
        prop_assert_eq!(sign(&fq.r), fq.q.signum() as i8);
        prop_assert_eq!(fq.n.signum(), fq.q.signum());
        prop_assert_eq!(fq.m1, v1 * fq.m);
    }

    #[test]
    fn unit_s_is_rescaled_orbifold_data(join in join_strategy(), v1 in 1u64..25, v2 in 1u64..25) {
        prop_assume!(gcd(v1, v2) == 1 && join.w.w1 * v2 != join.w.w2 * v1);
        let v = RayVector::quasi_regular(v1, v2).unwrap();
        let s = int(fiber_quotient(&join, &v).unwrap().s as i64);
        let true_data = admissible_data_for_ray(&join, &v).unwrap();
        let unit = admissible_data_unit_s(&join, &v).unwrap();
        prop_assert_eq!(unit.rescaled(&s), true_data.clone());
        let a = solve_extremal(&true_data).unwrap();
        let b = solve_extremal(&unit).unwrap();
        prop_assert_eq!(a.alpha, &b.alpha * &s);
        prop_assert_eq!(a.beta, &b.beta * &s);
    }

    #[test]
    fn unit_s_homogeneity(join in join_strategy(), v1 in 1u64..25, v2 in 1u64..25, lambda in 2i64..7) {
        prop_assume!(gcd(v1, v2) == 1 && join.w.w1 * v2 != join.w.w2 * v1);
        let v = RayVector::quasi_regular(v1, v2).unwrap();
        let big = RayVector::real(&v.v1 * int(lambda), &v.v2 * int(lambda)).unwrap();
        let a = admissible_data_unit_s(&join, &v).unwrap();
        let b = admissible_data_unit_s(&join, &big).unwrap();
        prop_assert_eq!(&b.m1, &(&a.m1 * int(lambda)));
        prop_assert_eq!(&b.m2, &(&a.m2 * int(lambda)));
        prop_assert_eq!(&b.s_nn, &(&a.s_nn / int(lambda)));
        prop_assert_eq!(solve_extremal(&b).unwrap().alpha, solve_extremal(&a).unwrap().alpha / int(lambda));
    }

    #[test]
    fn relative_indices_coprime(index in 1u64..10, a in 1u64..40, b in 1u64..40) {
        prop_assume!(gcd(a, b) == 1);
        let w = WeightVector::new(a.max(b), a.min(b)).unwrap();
        let (l1, l2) = relative_fano_indices(index, &w);
        prop_assert_eq!(gcd(l1, l2), 1);
        prop_assert_eq!(l1 * w.norm(), l2 * index);
    }
}

#[test]
fn validation_order_names_first_violation() {
    let cp1 = BaseGeometry::cp1;
    assert!(matches!(validate_join(cp1(), 0, 1, (2, 1)), Err(Error::NonPositive { name: "l1" })));
    assert!(matches!(validate_join(cp1(), 1, 1, (4, 2)), Err(Error::WeightsNotCoprime { gcd: 2, .. })));
    assert!(matches!(validate_join(cp1(), 1, 1, (1, 3)), Err(Error::WeightsUnordered { .. })));
    assert!(matches!(validate_join(cp1(), 1, 3, (3, 1)), Err(Error::AdmissibilityGcdFailure { gcd: 3, .. })));
}

#[test]
fn worked_quotients() {
    let j = validate_join(BaseGeometry::cp1(), 1, 2, (3, 1)).unwrap();
    let fq = fiber_quotient(&j, &RayVector::quasi_regular(1, 1).unwrap()).unwrap();
    assert_eq!((fq.q, fq.s, fq.m1, fq.m2, fq.n), (2, 2, 1, 1, 1));
    assert_eq!(fq.r, rat(1, 2));
    assert_eq!(classify_ray(&j, &RayVector::quasi_regular(1, 1).unwrap()).unwrap(), RayClass::Regular);
    assert!(matches!(
        fiber_quotient(&j, &RayVector::quasi_regular(3, 1).unwrap()),
        Err(Error::DegenerateRay { .. })
    ));
}

#[test]
fn chern_examples() {
    let c = |base: BaseGeometry, l1, l2, w| contact_invariants(&validate_join(base, l1, l2, w).unwrap()).unwrap();
    let a = c(BaseGeometry::cp1(), 1, 1, (7, 1));
    assert_eq!((a.c1_coefficient, a.w2_class), (-6, 0));
    let b = c(BaseGeometry::k3(), 1, 1, (2, 1));
    assert_eq!((b.c1_coefficient, b.w2_class), (-3, 1));
    for l2 in [1u64, 11, 13, 17, 59] {
        for (l1, w) in [(1, (5, 3)), (1, (7, 1))] {
            assert_eq!(c(BaseGeometry::cp1(), l1, l2, w).c1_coefficient, 2 * l2 as i64 - 8);
        }
    }
}
