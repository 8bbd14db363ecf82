mod common;

use common::*;
use g2nu::catalog::{builtin, builtin_names, parse_spec, serialize_spec};
use g2nu::g2clifford::{eigenspace_dims, Spinor};
use g2nu::nu::compute_nu;
use g2nu::oracle::verify_fixed_points;
use g2nu::nu::group_of;
use num_complex::Complex;
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Q> {
    (-30i64..=30, 1i64..=12).prop_map(|(p, d)| q(p, d))
}

fn vec7() -> impl Strategy<Value = [Q; 7]> {
    proptest::array::uniform7(rat())
}

fn spinor() -> impl Strategy<Value = Spinor<Q>> {
    (rat(), vec7()).prop_map(|(s, v)| Spinor::new(s, v))
}

fn cspinor() -> impl Strategy<Value = Spinor<Complex<Q>>> {
    (spinor(), spinor()).prop_map(|(re, im)| {
        let a = re.to_array();
        let b = im.to_array();
        Spinor::from_array(std::array::from_fn(|i| Complex::new(a[i], b[i])))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn clifford_relation_holds(u in vec7(), s in spinor()) {
        prop_assert!(clifford_relation(&u, &s));
    }

    #[test]
    fn clifford_action_is_skew_hermitian(u in vec7(), s in cspinor(), t in cspinor()) {
        prop_assert!(skew_hermitian(&u, &s, &t));
    }

    #[test]
    fn half_spinor_spaces_have_dimension_four(u in proptest::array::uniform7(-5.0f64..5.0)) {
        prop_assume!(u.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        prop_assert_eq!(eigenspace_dims(&u), (4, 4));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sawtooth_is_odd_and_periodic(p in -500i64..=500, d in 1i64..=60, k in -20i64..=20) {
        prop_assert!(sawtooth_laws(q(p, d), k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn betti_one_survives_conjugation(
        ex in proptest::sample::select(FULL_EXAMPLES.to_vec()),
        ops in proptest::collection::vec((0usize..7, 0usize..7, -2i64..=2), 0..6),
        shift in proptest::collection::vec((0i64..12, 1i64..=12), 7),
    ) {
        let p = elementary_product(&ops);
        let t = shift.into_iter().map(|(a, b)| q(a, b)).collect();
        prop_assert_eq!(conjugated_betti(ex, p, t), Ok(()));
    }
}

#[test]
fn fixed_points_match_grid_search() {
    for name in ["ex07", "ex09"] {
        let group = group_of(&builtin(name).unwrap()).unwrap();
        let rep = verify_fixed_points(&group, 24);
        assert!(rep.passed, "{name}: {rep:?}");
        assert_eq!(rep.instances, group.order());
    }
}

#[test]
fn catalog_round_trips() {
    for name in builtin_names() {
        let spec = builtin(name).unwrap();
        let text = serialize_spec(&spec);
        assert_eq!(serialize_spec(&parse_spec(&text).unwrap()), text, "{name}");
    }
}

#[test]
fn nu_lies_in_range_with_integral_eta_combination() {
    for name in builtin_names() {
        let res = compute_nu(&builtin(name).unwrap()).unwrap();
        assert!((0..res.modulus).contains(&res.nu_value), "{name}");
        let x = res.eta_sign.exact.unwrap() * 3 - res.eta_dirac.exact.unwrap() * 24;
        assert!(x.is_integer(), "{name}");
    }
}
