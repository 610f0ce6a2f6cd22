//! Acceptance gate. Runs every criterion with exact arithmetic and prints one
//! PASS/FAIL line each; exits nonzero if any criterion fails.
//!
//! Run with `cargo test -p gvc-core --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{q, random_phi_q0_zero, random_univariate, random_xy, Dense};
use gvc_core::diffop::{
    apply_lambda_pow, coord_change, exp_shift, lambda_of, normalize_phi, DiffOperator, Sign,
};
use gvc_core::dsl::{format_operator, format_poly, parse_operator, parse_poly, DslError};
use gvc_core::gvc::{
    check_hypothesis, counterexample_search, eq2_leading_difference, eq2_value, kernel_element,
    SearchConfig,
};
use gvc_core::{Monomial, PhiSpec, Polynomial, Ring};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x6776_6332;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn within(limit: Duration, elapsed: Duration) -> bool {
    elapsed <= limit
}

// 1. `Lambda(kernel_element(Phi, f, g)) = 0` on 200 random instances, <= 5 s.
fn kernel_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = Instant::now();
    let mut failures = 0;
    for _ in 0..200 {
        let (dp, df, dg) = (
            rng.gen_range(1..=6),
            rng.gen_range(0..=6),
            rng.gen_range(0..=6),
        );
        let phi = random_phi_q0_zero(&mut rng, dp, 9);
        let f = random_univariate(&mut rng, 0, df, 9);
        let g = random_univariate(&mut rng, 1, dg, 9);
        let p = kernel_element(&phi, &f, &g).expect("q0 = 0");
        if !lambda_of(&phi).apply(&p).unwrap().is_zero() {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        failures == 0 && within(Duration::from_secs(5), elapsed),
        format!("200 instances, {failures} nonzero, {elapsed:.2?} (limit 5s)"),
    )
}

// 2. `DxDy exp(-xPhi) p = exp(-xPhi) Lambda p` on 200 random pairs.
fn conjugation_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let dxdy = DiffOperator::dx().op_mul(&DiffOperator::dy()).unwrap();
    let mut failures = 0;
    for _ in 0..200 {
        let (dp, dx, dy) = (
            rng.gen_range(1..=6),
            rng.gen_range(0..=5),
            rng.gen_range(0..=7),
        );
        let phi = random_phi_q0_zero(&mut rng, dp, 9);
        let p = random_xy(&mut rng, dx, dy, 9, 0.4);
        let lhs = dxdy
            .apply(&exp_shift(&phi, Sign::Minus, &p).unwrap())
            .unwrap();
        let rhs = exp_shift(&phi, Sign::Minus, &lambda_of(&phi).apply(&p).unwrap()).unwrap();
        if lhs != rhs {
            failures += 1;
        }
    }
    Outcome::new(failures == 0, format!("200 pairs, {failures} mismatches"))
}

// 3. Theorem family: `Lambda^m((a1 x + g)^m x^a y^b) = 0` for
// `m in (b + ar, b + ar + 5]` and `Lambda^m(P^m) = 0` for `m = 1..10`.
fn theorem_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let ring = Ring::xy();
    let start = Instant::now();
    let mut instances = 0;
    let mut failures = Vec::new();
    for r in [2u32, 3] {
        let phi = PhiSpec::monomial(r);
        let mut gs = vec![Polynomial::zero(&ring)];
        for d in 0..=r {
            gs.push(Polynomial::term(&ring, &[0, d], q(1)));
        }
        for _ in 0..3 {
            gs.push(random_univariate(&mut rng, 1, r, 9));
        }
        for a1 in [-2i64, 0, 1, 3] {
            for g in &gs {
                let p = &Polynomial::term(&ring, &[1, 0], q(a1)) + g;
                let mut power = Polynomial::one(&ring);
                for m in 1..=10 {
                    power = &power * &p;
                    if !apply_lambda_pow(&phi, m, &power).unwrap().is_zero() {
                        failures.push(format!("hyp r={r} P={p} m={m}"));
                    }
                }
                for a in 0..=3u32 {
                    for b in 0..=3u32 {
                        instances += 1;
                        let h = Polynomial::term(&ring, &[a, b], q(1));
                        let bound = b + a * r;
                        let mut power = p.pow(bound);
                        for m in bound + 1..=bound + 5 {
                            power = &power * &p;
                            let v = apply_lambda_pow(&phi, m, &(&power * &h)).unwrap();
                            if !v.is_zero() {
                                failures.push(format!("r={r} P={p} h={h} m={m}"));
                            }
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        failures.is_empty() && within(Duration::from_secs(60), elapsed),
        format!(
            "{instances} (r, P, a, b) instances, {} failures{}, {elapsed:.2?} (limit 60s)",
            failures.len(),
            failures
                .first()
                .map(|f| format!(" e.g. {f}"))
                .unwrap_or_default()
        ),
    )
}

// 4. `Phi = t^2`, `P = y^3 + 6xy`: `Lambda P = 0`, `Lambda^2(P^2) = 288`.
fn lemma23_witness() -> Outcome {
    let phi = PhiSpec::monomial(2);
    let p = parse_poly("y^3 + 6*x*y", &Ring::xy()).unwrap();
    let coeffs = common::phi_coeffs(&phi);
    let oracle = Dense::from_poly(&p).pow(2).lambda_n(&coeffs, 2);
    let oracle_ok = oracle == Dense::mono(0, 0, 288);
    let lambda_p = lambda_of(&phi).apply(&p).unwrap();
    let l2 = apply_lambda_pow(&phi, 2, &p.pow(2)).unwrap();
    let expected = Polynomial::from_int(&Ring::xy(), 288);
    Outcome::new(
        oracle_ok && lambda_p.is_zero() && l2 == expected,
        format!("Lambda P = {lambda_p}, Lambda^2(P^2) = {l2}, dense oracle agrees: {oracle_ok}"),
    )
}

// 5. `eq2(2) = 36864 = 4!4!64`, `eq2(1) = 0`, `eq2(r) != 0` for `r = 2..10`,
// and `(4r)!r!r! - 6(3r)!(2r)!r! < 0` for `r = 2..10`.
fn equation_two() -> Outcome {
    let value_ok =
        eq2_value(2) == BigInt::from(36864) && eq2_value(2) == BigInt::from(24 * 24 * 64);
    let zero_ok = eq2_value(1).is_zero();
    let nonzero_ok = (2..=10).all(|r| !eq2_value(r).is_zero());
    let positive: Vec<u32> = (2..=10)
        .filter(|&r| !eq2_leading_difference(r).is_negative())
        .collect();
    let sign_ok = positive.is_empty();
    let mut detail = format!(
        "eq2(2)=36864: {value_ok}, eq2(1)=0: {zero_ok}, eq2(2..10)!=0: {nonzero_ok}, \
         leading difference < 0 on 2..10: {sign_ok}"
    );
    if !sign_ok {
        detail.push_str(&format!(
            " (not negative for r = {positive:?}; e.g. r=3 gives {})",
            eq2_leading_difference(3)
        ));
    }
    Outcome::new(value_ok && zero_ok && nonzero_ok && sign_ok, detail)
}

// 6. Vanish/fail pattern of `Lambda^m(P^m)`, `m = 1..6`, is unchanged by
// normalization, on 100 random `(Phi, P)` with `q0 = 0`, `q1 != 0`.
fn normalization_transport() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let ring = Ring::xy();
    let mut failures = 0;
    let mut patterns_with_vanishing = 0;
    for i in 0..100 {
        let mut phi_coeffs = vec![q(0), q([-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)])];
        for _ in 0..rng.gen_range(0..=3) {
            phi_coeffs.push(q(rng.gen_range(-4..=4)));
        }
        let phi = PhiSpec::from_coeffs(phi_coeffs);
        let (np, c) = normalize_phi(&phi).unwrap();
        // even instances: kernel-family polynomials pulled back to the original
        // coordinates; odd instances: unstructured polynomials
        let p = if i % 2 == 0 {
            let r = np.order().finite().unwrap_or(3).min(3);
            let g = random_univariate(&mut rng, 1, r, 5);
            let pn = &Polynomial::term(&ring, &[1, 0], q(rng.gen_range(-3..=3))) + &g;
            coord_change(&pn, &-c.clone()).unwrap()
        } else {
            random_xy(&mut rng, 2, 3, 5, 0.35)
        };
        let before = check_hypothesis(&phi, &p, 6).unwrap();
        let after = check_hypothesis(&np, &coord_change(&p, &c).unwrap(), 6).unwrap();
        let pat =
            |r: &gvc_core::VanishReport| r.entries.iter().map(|e| e.vanished).collect::<Vec<_>>();
        if pat(&before) != pat(&after) {
            failures += 1;
        }
        if before.entries.iter().any(|e| e.vanished) {
            patterns_with_vanishing += 1;
        }
    }
    Outcome::new(
        failures == 0,
        format!("100 instances ({patterns_with_vanishing} with some vanishing m), {failures} pattern mismatches"),
    )
}

// 7. `check_hypothesis(t^2, x + y^2, 30)` within 10 s.
fn performance() -> Outcome {
    let phi = PhiSpec::monomial(2);
    let p = parse_poly("x + y^2", &Ring::xy()).unwrap();
    let start = Instant::now();
    let report = check_hypothesis(&phi, &p, 30).unwrap();
    let elapsed = start.elapsed();
    Outcome::new(
        report.all_vanish() && within(Duration::from_secs(10), elapsed),
        format!(
            "m_max = 30, all vanish: {}, {elapsed:.2?} (limit 10s)",
            report.all_vanish()
        ),
    )
}

fn random_rational_poly<R: Rng>(rng: &mut R, ring: &Ring) -> Polynomial {
    let n = rng.gen_range(0..10);
    Polynomial::from_terms(
        ring,
        (0..n)
            .map(|_| {
                let m = Monomial::new(&[rng.gen_range(0..9), rng.gen_range(0..9)]);
                let c = common::qq(rng.gen_range(-500..=500), rng.gen_range(1..=40));
                (m, c)
            })
            .collect::<Vec<_>>(),
    )
}

// 8. `parse(format(p)) = p` on 500 polynomials and 100 operators; every
// grammar-error fixture yields a positioned syntax error.
fn parser_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let xy = Ring::xy();
    let poly_failures = (0..500)
        .filter(|_| {
            let p = random_rational_poly(&mut rng, &xy);
            parse_poly(&format_poly(&p), &xy).as_ref() != Ok(&p)
        })
        .count();
    let op_failures = (0..100)
        .filter(|_| {
            let op =
                DiffOperator::from_symbol(random_rational_poly(&mut rng, &Ring::dxdy())).unwrap();
            parse_operator(&format_operator(&op)).as_ref() != Ok(&op)
        })
        .count();

    let fixtures = include_str!("fixtures/syntax_errors.txt");
    let mut fixture_count = 0;
    let mut fixture_failures = Vec::new();
    for line in fixtures
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
    {
        let Some((expr, tag)) = line.split_once("# @") else {
            continue;
        };
        fixture_count += 1;
        let want: usize = tag.trim().parse().expect("fixture position");
        match parse_poly(expr.trim(), &xy) {
            Err(DslError::Syntax(e)) if e.position == want => {}
            other => fixture_failures.push(format!("{:?} -> {:?}", expr.trim(), other)),
        }
    }
    Outcome::new(
        poly_failures == 0 && op_failures == 0 && fixture_failures.is_empty(),
        format!(
            "500 polynomials ({poly_failures} bad), 100 operators ({op_failures} bad), \
             {fixture_count} error fixtures ({} bad)",
            fixture_failures.len()
        ),
    )
}

// 9. Exhaustive search over `(2, 2)` boxes with pool `{-1, 0, 1}` finds nothing.
fn micro_search() -> Outcome {
    let config = SearchConfig {
        max_deg_x: 2,
        max_deg_y: 2,
        pool: vec![-1, 0, 1],
        m_max: 6,
        sample: None,
    };
    let start = Instant::now();
    let out = counterexample_search(&PhiSpec::monomial(2), &config).unwrap();
    Outcome::new(
        out.hits.is_empty(),
        format!(
            "{} candidates, {} pass the hypothesis through m=6, {} failures, {:.2?}",
            out.examined,
            out.hypothesis_passed,
            out.hits.len(),
            start.elapsed()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("kernel soundness", kernel_soundness),
        ("conjugation identity", conjugation_identity),
        ("theorem bound", theorem_bound),
        ("contrapositive witness", lemma23_witness),
        ("factorial identity", equation_two),
        ("normalization transport", normalization_transport),
        ("performance contract", performance),
        ("parser round-trip", parser_round_trip),
        ("exhaustive micro-search", micro_search),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failed += 1;
        }
        println!("[{tag}] criterion {}: {name}: {}", i + 1, outcome.detail);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
