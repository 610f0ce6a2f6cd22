mod common;

use gvc_core::diffop::{apply_lambda_pow, coord_change, lambda_of, normalize_phi};
use gvc_core::dsl::parse_poly;
use gvc_core::gvc::{
    certify, check_conclusion, check_hypothesis, classify_kernel, eq1_residual, eq2_value,
    kernel_element, lemma23_check, Route,
};
use gvc_core::{Monomial, PhiSpec, Polynomial, Ring};
use num_traits::Zero;
use proptest::prelude::*;

fn univariate(var: usize, max_deg: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-9i64..=9, 0..=(max_deg as usize + 1)).prop_map(move |cs| {
        Polynomial::from_terms(
            &Ring::xy(),
            cs.into_iter().enumerate().map(|(k, c)| {
                let mut e = [0, 0];
                e[var] = k as u32;
                (Monomial::new(&e), common::q(c))
            }),
        )
    })
}

fn arb_phi_q0_zero(max_deg: usize) -> impl Strategy<Value = PhiSpec> {
    prop::collection::vec(-5i64..=5, 0..=max_deg).prop_map(|cs| {
        let mut coeffs = vec![common::q(0)];
        coeffs.extend(cs.into_iter().map(common::q));
        PhiSpec::from_coeffs(coeffs)
    })
}

fn arb_order_two_phi() -> impl Strategy<Value = PhiSpec> {
    (
        2u32..=3,
        prop::sample::select(vec![-2i64, -1, 1, 3]),
        -3i64..=3,
    )
        .prop_map(|(r, lead, next)| {
            let mut coeffs = vec![common::q(0); r as usize];
            coeffs.push(common::q(lead));
            coeffs.push(common::q(next));
            PhiSpec::from_coeffs(coeffs)
        })
}

fn xy(s: &str) -> Polynomial {
    parse_poly(s, &Ring::xy()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_soundness(phi in arb_phi_q0_zero(5), f in univariate(0, 5), g in univariate(1, 5)) {
        let p = kernel_element(&phi, &f, &g).unwrap();
        prop_assert!(lambda_of(&phi).apply(&p).unwrap().is_zero());
    }

    #[test]
    fn kernel_round_trip(phi in arb_phi_q0_zero(5), f in univariate(0, 5), g in univariate(1, 5)) {
        let p = kernel_element(&phi, &f, &g).unwrap();
        let k = classify_kernel(&phi, &p).unwrap();
        let a0 = Polynomial::constant(&Ring::xy(), f.constant_term());
        prop_assert_eq!(k.f, &f - &a0);
        prop_assert_eq!(k.g, &g + &a0);
    }

    #[test]
    fn certificate_bounds_hold_on_theorem_family(
        phi in arb_order_two_phi(),
        a1 in -3i64..=3,
        g in univariate(1, 3),
        a in 0u32..=2,
        b in 0u32..=3,
    ) {
        let r = phi.order().finite().unwrap();
        let g = g.filter_terms(|m, _| m.exponent(1) <= r);
        let p = &Polynomial::term(&Ring::xy(), &[1, 0], common::q(a1)) + &g;
        let h = Polynomial::term(&Ring::xy(), &[a, b], common::q(1));
        let cert = certify(&phi, &p, &h, 2).unwrap();
        prop_assert!(cert.samples.iter().all(|s| s.vanished));
        prop_assert!(u64::from(cert.m_star) <= u64::from(b) + u64::from(a) * u64::from(r) + 1);
        let report = check_conclusion(&phi, &p, &h, cert.m_star + 2).unwrap();
        prop_assert!(report.empirical_threshold <= cert.m_star);
    }

    #[test]
    fn normalization_transport(phi in arb_phi_q0_zero(4), p in univariate(0, 2), g in univariate(1, 3), mix in -2i64..=2) {
        let p = &(&p + &g) + &Polynomial::term(&Ring::xy(), &[1, 1], common::q(mix));
        let (np, c) = normalize_phi(&phi).unwrap();
        let before = check_hypothesis(&phi, &p, 4).unwrap();
        let after = check_hypothesis(&np, &coord_change(&p, &c).unwrap(), 4).unwrap();
        let pattern = |r: &gvc_core::VanishReport| r.entries.iter().map(|e| e.vanished).collect::<Vec<_>>();
        prop_assert_eq!(pattern(&before), pattern(&after));
    }

    #[test]
    fn eq1_closed_form_agrees_with_direct_expansion(
        phi in arb_order_two_phi(),
        f in univariate(0, 3),
        g in univariate(1, 5),
    ) {
        let f = f.filter_terms(|m, _| !m.is_constant());
        let res = eq1_residual(&phi, &f, &g).unwrap();
        prop_assert!(res.residual.is_zero(), "residual {}", res.residual);
    }
}

#[test]
fn lemma23_contrapositive_d_equals_three() {
    let phi = PhiSpec::monomial(2);
    let p = kernel_element(&phi, &xy("0"), &xy("y^3")).unwrap();
    assert!(lambda_of(&phi).apply(&p).unwrap().is_zero());
    let l2 = apply_lambda_pow(&phi, 2, &p.pow(2)).unwrap();
    assert!(!l2.is_zero());
    let rep = lemma23_check(&phi, &p).unwrap();
    assert!(!rep.premises_hold());
    assert!(rep.conclusion.is_err());
}

#[test]
fn lemma23_forms_with_low_degree_g_pass() {
    // g of degree <= r with a linear f satisfies both the premises and the conclusion
    for r in 2..=4u32 {
        let phi = PhiSpec::monomial(r);
        for d in 0..=r {
            let g = Polynomial::term(&Ring::xy(), &[0, d], common::q(2));
            let p = kernel_element(&phi, &xy("3*x"), &g).unwrap();
            let rep = lemma23_check(&phi, &p).unwrap();
            assert!(rep.premises_hold(), "r={r} d={d}");
            assert!(rep.conclusion_holds(), "r={r} d={d}");
        }
        // d in (r, 2r] never satisfies Lambda^2(P^2) = 0
        for d in r + 1..=2 * r {
            let g = Polynomial::term(&Ring::xy(), &[0, d], common::q(1));
            let p = kernel_element(&phi, &xy("0"), &g).unwrap();
            let rep = lemma23_check(&phi, &p).unwrap();
            assert!(!rep.lambda2_p2.is_zero(), "r={r} d={d}");
        }
    }
}

#[test]
fn lemma23_boundary_probe_x_squared() {
    // P = x^2 satisfies both premises while f = x^2 is not linear
    let rep = lemma23_check(&PhiSpec::monomial(2), &xy("x^2")).unwrap();
    assert!(rep.lambda_p.is_zero());
    assert!(rep.lambda2_p2.is_zero());
    assert!(!rep.conclusion_holds());
    let k = rep.decomposition.unwrap();
    assert_eq!((k.f, k.g), (xy("x^2"), xy("0")));
    // the vanishing conclusion still holds with the flat-in-y threshold
    let cert = certify(&PhiSpec::monomial(2), &xy("x^2"), &xy("x*y^2 + y"), 4).unwrap();
    assert_eq!(cert.route, Route::FlatInY);
    assert_eq!(cert.m_star, 1 + (1 + 2 * 2));
}

#[test]
fn eq2_zero_only_at_one() {
    assert!(eq2_value(1).is_zero());
    for r in 2..=10 {
        assert!(!eq2_value(r).is_zero(), "r = {r}");
    }
}

#[test]
fn degenerate_phi_after_normalization() {
    // Phi = 2t normalizes to 0; x^2 + y and x + y^3 (in new coordinates) are both certified
    let phi = PhiSpec::from_coeffs([common::q(0), common::q(2)]);
    let (np, c) = normalize_phi(&phi).unwrap();
    assert!(np.is_zero());
    for pn in ["x^2 + y", "x + y^3", "5*x + 1", "x^3 - 2*y"] {
        let p = coord_change(&xy(pn), &-c.clone()).unwrap();
        for qn in ["y", "x*y^2", "x^3", "x^2*y^2 + 1"] {
            let cert = certify(&phi, &p, &xy(qn), 3).unwrap();
            let rep = check_conclusion(&phi, &p, &xy(qn), cert.m_star + 3).unwrap();
            assert!(rep.empirical_threshold <= cert.m_star, "{pn} / {qn}");
        }
    }
}
