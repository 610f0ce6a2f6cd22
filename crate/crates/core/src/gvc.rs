//! Vanishing checks for `Lambda = (Dx - Phi(Dy)) * Dy` on `K[x, y]`.
//!
//! The entry points are:
//!
//! * [`check_hypothesis`] / [`check_conclusion`]: exact finite-range checks of
//!   `Lambda^m(P^m) = 0` and `Lambda^m(P^m Q) = 0`.
//! * [`kernel_element`] / [`classify_kernel`]: the kernel of `Lambda` as the
//!   image of `f(x) + g(y)` under `exp(x Phi(Dy))`.
//! * [`lemma23_check`]: the shape constraint `P = a1 x + g(y)`, `deg g <= o(Phi)`
//!   that follows from `Lambda P = Lambda^2(P^2) = 0`.
//! * [`certify`]: normalizes `Phi`, reads off the shape of `P` and emits the
//!   explicit threshold beyond which `Lambda^m(P^m Q)` vanishes.
//! * [`eq1_residual`], [`eq2_value`], [`counterexample_search`]: coefficient
//!   identity oracles and a brute-force search.

use std::borrow::Cow;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::diffop::{
    apply_lambda_pow, coord_change, exp_shift, lambda_of, normalize_phi, DiffOpError, PhiSpec, Sign,
};
use crate::poly::{Coefficient, Degree, Monomial, Order, PolyError, Polynomial, Ring};
use crate::serde_util;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GvcError {
    #[error(transparent)]
    DiffOp(#[from] DiffOpError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{what} must be a polynomial in {var} alone")]
    NotUnivariate {
        what: &'static str,
        var: &'static str,
    },
    #[error("P is not in the kernel of Lambda: Lambda(P) = {witness}")]
    NotInKernel { witness: Polynomial },
    #[error("Lambda^{m}(P^{m}) != 0, witness term {witness}")]
    HypothesisViolated { m: u32, witness: Polynomial },
    #[error("P does not have the form a1*x + g(y): {violation}{}", lambda2_p2_suffix(.lambda2_p2))]
    FormViolated {
        violation: FormViolation,
        lambda2_p2: Option<Polynomial>,
    },
    #[error("Phi(0) != 0 and Lambda(P) = 0 but P is not in K[x]")]
    NormalizationFailed,
    #[error("Lambda^{m}(P^{m} Q) != 0 at or beyond the threshold, witness term {witness}")]
    BoundViolated { m: u32, witness: Polynomial },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("f must have zero constant term, got {0}")]
    NonzeroConstantTerm(Coefficient),
}

fn lambda2_p2_suffix(w: &Option<Polynomial>) -> String {
    match w {
        Some(t) => format!("; Lambda^2(P^2) has term {t}"),
        None => String::new(),
    }
}

impl GvcError {
    pub fn is_not_locally_nilpotent(&self) -> bool {
        matches!(
            self,
            GvcError::DiffOp(DiffOpError::NotLocallyNilpotent { .. })
        )
    }
}

/// Why a polynomial fails the `a1 x + g(y)`, `deg g <= r` shape.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FormViolation {
    #[error("mixed term {witness}")]
    MixedTerm {
        #[serde(serialize_with = "serde_util::poly")]
        witness: Polynomial,
    },
    #[error("x-part {f} is not linear")]
    NonlinearX {
        #[serde(serialize_with = "serde_util::poly")]
        f: Polynomial,
    },
    #[error("deg g = {d} exceeds o(Phi) = {r}")]
    DegreeExceedsOrder {
        d: u32,
        #[serde(serialize_with = "serde_util::order")]
        r: Order,
    },
}

fn xy_ring() -> Ring {
    Ring::xy()
}

fn require_xy(p: &Polynomial) -> Result<(), GvcError> {
    let ring = xy_ring();
    if p.ring() == &ring {
        Ok(())
    } else {
        Err(PolyError::RingMismatch {
            left: p.ring().clone(),
            right: ring,
        }
        .into())
    }
}

fn single_term(m: Monomial, c: Coefficient) -> Polynomial {
    Polynomial::from_terms(&xy_ring(), [(m, c)])
}

/// Least nonzero term in the canonical order, as a one-term polynomial.
fn witness_of(p: &Polynomial) -> Option<Polynomial> {
    p.least_term()
        .map(|(m, c)| Polynomial::from_terms(p.ring(), [(m, c)]))
}

/// Outcome of one `m` in a vanishing check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VanishEntry {
    pub m: u32,
    pub vanished: bool,
    /// Least nonzero term of the result when it did not vanish.
    #[serde(
        serialize_with = "serde_util::opt_poly",
        skip_serializing_if = "Option::is_none"
    )]
    pub witness: Option<Polynomial>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VanishReport {
    pub m_max: u32,
    pub entries: Vec<VanishEntry>,
    pub first_failure: Option<u32>,
    /// Least `m0` such that every checked `m >= m0` vanished; `m_max + 1`
    /// when `m_max` itself fails.
    pub empirical_threshold: u32,
}

impl VanishReport {
    fn from_entries(m_max: u32, entries: Vec<VanishEntry>) -> Self {
        let first_failure = entries.iter().find(|e| !e.vanished).map(|e| e.m);
        let empirical_threshold = entries
            .iter()
            .rev()
            .find(|e| !e.vanished)
            .map_or(1, |e| e.m + 1);
        VanishReport {
            m_max,
            entries,
            first_failure,
            empirical_threshold,
        }
    }

    pub fn all_vanish(&self) -> bool {
        self.first_failure.is_none()
    }

    /// True when `Lambda^{m_max}` vanished, i.e. the tail of the range is clean.
    pub fn vanishes_at_end(&self) -> bool {
        self.empirical_threshold <= self.m_max
    }

    pub fn entry(&self, m: u32) -> Option<&VanishEntry> {
        self.entries.iter().find(|e| e.m == m)
    }
}

fn entry_for(m: u32, value: &Polynomial) -> VanishEntry {
    VanishEntry {
        m,
        vanished: value.is_zero(),
        witness: witness_of(value),
    }
}

/// `Lambda^m(P^m)` for `m = 1..=m_max`.
pub fn check_hypothesis(
    phi: &PhiSpec,
    p: &Polynomial,
    m_max: u32,
) -> Result<VanishReport, GvcError> {
    check_conclusion(phi, p, &Polynomial::one(&xy_ring()), m_max)
}

/// `Lambda^m(P^m Q)` for `m = 1..=m_max`, reusing `P^m = P^{m-1} P`.
pub fn check_conclusion(
    phi: &PhiSpec,
    p: &Polynomial,
    q: &Polynomial,
    m_max: u32,
) -> Result<VanishReport, GvcError> {
    require_xy(p)?;
    require_xy(q)?;
    if m_max == 0 {
        return Err(GvcError::PreconditionViolated(
            "m_max must be at least 1".into(),
        ));
    }
    let mut power = Polynomial::one(&xy_ring());
    let mut entries = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        power = &power * p;
        let target: Cow<'_, Polynomial> = if q.is_one() {
            Cow::Borrowed(&power)
        } else {
            Cow::Owned(&power * q)
        };
        let value = apply_lambda_pow(phi, m, &target)?;
        entries.push(entry_for(m, &value));
    }
    Ok(VanishReport::from_entries(m_max, entries))
}

/// Same report as [`check_conclusion`], with each `m` computed independently
/// on the rayon pool.
pub fn check_conclusion_parallel(
    phi: &PhiSpec,
    p: &Polynomial,
    q: &Polynomial,
    m_max: u32,
) -> Result<VanishReport, GvcError> {
    require_xy(p)?;
    require_xy(q)?;
    if m_max == 0 {
        return Err(GvcError::PreconditionViolated(
            "m_max must be at least 1".into(),
        ));
    }
    let entries = (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let target = &p.pow(m) * q;
            apply_lambda_pow(phi, m, &target).map(|v| entry_for(m, &v))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VanishReport::from_entries(m_max, entries))
}

/// `P = f(x) + g(y)` with the constant term carried by `g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelDecomposition {
    #[serde(serialize_with = "serde_util::poly")]
    pub f: Polynomial,
    #[serde(serialize_with = "serde_util::poly")]
    pub g: Polynomial,
}

/// Splits a polynomial without mixed terms into `f(x) + g(y)`, `f(0) = 0`.
/// Returns the least mixed term otherwise.
fn split_separated(w: &Polynomial) -> Result<KernelDecomposition, Polynomial> {
    if let Some((m, c)) = w
        .terms()
        .find(|(m, _)| m.exponent(0) >= 1 && m.exponent(1) >= 1)
    {
        return Err(single_term(m.clone(), c.clone()));
    }
    let f = w.filter_terms(|m, _| m.exponent(0) >= 1);
    let g = w.filter_terms(|m, _| m.exponent(0) == 0);
    Ok(KernelDecomposition { f, g })
}

/// `P = exp(x Phi(Dy)) (f(x) + g(y))`, which always satisfies `Lambda P = 0`.
pub fn kernel_element(
    phi: &PhiSpec,
    f: &Polynomial,
    g: &Polynomial,
) -> Result<Polynomial, GvcError> {
    require_xy(f)?;
    require_xy(g)?;
    if f.degree("y")? > Degree::Finite(0) {
        return Err(GvcError::NotUnivariate {
            what: "f",
            var: "x",
        });
    }
    if g.degree("x")? > Degree::Finite(0) {
        return Err(GvcError::NotUnivariate {
            what: "g",
            var: "y",
        });
    }
    Ok(exp_shift(phi, Sign::Plus, &(f + g))?)
}

/// Inverts [`kernel_element`]: `exp(-x Phi(Dy)) P` must have no mixed terms.
pub fn classify_kernel(phi: &PhiSpec, p: &Polynomial) -> Result<KernelDecomposition, GvcError> {
    require_xy(p)?;
    let w = exp_shift(phi, Sign::Minus, p)?;
    split_separated(&w).map_err(|_| GvcError::NotInKernel {
        witness: lambda_of(phi).apply(p).expect("xy ring"),
    })
}

/// `P = a1 x + g(y)` read directly off `P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearForm {
    #[serde(serialize_with = "serde_util::rational")]
    pub a1: Coefficient,
    #[serde(serialize_with = "serde_util::poly")]
    pub g: Polynomial,
    #[serde(serialize_with = "serde_util::degree")]
    pub d: Degree,
}

fn linear_form(p: &Polynomial, r: Order) -> Result<LinearForm, FormViolation> {
    let split = split_separated(p).map_err(|witness| FormViolation::MixedTerm { witness })?;
    if split.f.degree_in_x() > Degree::Finite(1) {
        return Err(FormViolation::NonlinearX { f: split.f });
    }
    let d = split.g.degree_in_y();
    if let (Degree::Finite(d), Order::Finite(r)) = (d, r) {
        if d > r {
            return Err(FormViolation::DegreeExceedsOrder {
                d,
                r: Order::Finite(r),
            });
        }
    }
    Ok(LinearForm {
        a1: split.f.coeff_of(&[1, 0]),
        g: split.g,
        d,
    })
}

trait XyDegrees {
    fn degree_in_x(&self) -> Degree;
    fn degree_in_y(&self) -> Degree;
}

impl XyDegrees for Polynomial {
    fn degree_in_x(&self) -> Degree {
        self.degree("x").expect("xy ring")
    }
    fn degree_in_y(&self) -> Degree {
        self.degree("y").expect("xy ring")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma23Report {
    #[serde(serialize_with = "serde_util::order")]
    pub r: Order,
    #[serde(serialize_with = "serde_util::poly")]
    pub lambda_p: Polynomial,
    #[serde(serialize_with = "serde_util::poly")]
    pub lambda2_p2: Polynomial,
    /// `exp(-x Phi(Dy)) P` split as `f + g`, when `P` is in the kernel.
    pub decomposition: Option<KernelDecomposition>,
    pub conclusion: Result<LinearForm, FormViolation>,
}

impl Lemma23Report {
    pub fn premises_hold(&self) -> bool {
        self.lambda_p.is_zero() && self.lambda2_p2.is_zero()
    }

    pub fn conclusion_holds(&self) -> bool {
        self.conclusion.is_ok()
    }

    /// Premises imply conclusion on this instance.
    pub fn consistent(&self) -> bool {
        !self.premises_hold() || self.conclusion_holds()
    }
}

/// Computes `Lambda P` and `Lambda^2(P^2)` and checks whether `P` has the
/// shape `a1 x + g(y)` with `deg g <= o(Phi)`. Both sides are reported
/// independently; nothing is assumed about which way the instance falls.
pub fn lemma23_check(phi: &PhiSpec, p: &Polynomial) -> Result<Lemma23Report, GvcError> {
    require_xy(p)?;
    let r = phi.order();
    if r < Order::Finite(2) {
        return Err(GvcError::PreconditionViolated(format!(
            "lemma check needs o(Phi) >= 2, got {r}"
        )));
    }
    let lambda_p = apply_lambda_pow(phi, 1, p)?;
    let lambda2_p2 = apply_lambda_pow(phi, 2, &p.pow(2))?;
    let decomposition = if lambda_p.is_zero() {
        Some(classify_kernel(phi, p)?)
    } else {
        None
    };
    Ok(Lemma23Report {
        r,
        lambda_p,
        lambda2_p2,
        decomposition,
        conclusion: linear_form(p, r),
    })
}

/// Which argument backs the threshold in a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `P = 0`; everything vanishes from `m = 1`.
    ZeroPolynomial,
    /// `Phi(0) != 0`, so `Lambda P = 0` forces `P` into `K[x]`; threshold `b`.
    ConstantTerm,
    /// Normalized `P = a1 x + g(y)`, `deg g <= r`; threshold `b + a r`
    /// (`b + a deg g` when the normalized `Phi` is zero).
    LinearInX,
    /// Normalized `P = f(x) + g(y)` with `deg g <= 1` and `deg f = e >= 2`;
    /// threshold `a + e b`.
    FlatInY,
}

/// For the monomial `x^a y^b` of the normalized `Q`: vanishing holds for
/// every `m > threshold`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonomialBound {
    pub a: u32,
    pub b: u32,
    pub threshold: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GvcCertificate {
    #[serde(serialize_with = "serde_util::phi")]
    pub phi: PhiSpec,
    #[serde(serialize_with = "serde_util::rational")]
    pub c: Coefficient,
    #[serde(serialize_with = "serde_util::phi")]
    pub phi_normalized: PhiSpec,
    #[serde(serialize_with = "serde_util::opt_rational")]
    pub a1: Option<Coefficient>,
    #[serde(serialize_with = "serde_util::poly")]
    pub g: Polynomial,
    #[serde(serialize_with = "serde_util::degree")]
    pub d: Degree,
    #[serde(serialize_with = "serde_util::order")]
    pub r: Order,
    pub m_star: u32,
    pub samples: Vec<VanishEntry>,
    pub route: Route,
    #[serde(serialize_with = "serde_util::poly")]
    pub f: Polynomial,
    #[serde(serialize_with = "serde_util::poly")]
    pub p_normalized: Polynomial,
    #[serde(serialize_with = "serde_util::poly")]
    pub q_normalized: Polynomial,
    pub bounds: Vec<MonomialBound>,
}

/// Shape data for `P` after normalization, enough to bound any `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub route: Route,
    pub c: Coefficient,
    pub phi_normalized: PhiSpec,
    pub p_normalized: Polynomial,
    pub a1: Option<Coefficient>,
    pub f: Polynomial,
    pub g: Polynomial,
    pub d: Degree,
    pub r: Order,
}

impl Shape {
    /// Vanishing holds for all `m > threshold(a, b)` on `x^a y^b` (normalized
    /// coordinates).
    pub fn threshold(&self, a: u32, b: u32) -> u64 {
        let (a, b) = (u64::from(a), u64::from(b));
        match self.route {
            Route::ZeroPolynomial => 0,
            Route::ConstantTerm => b,
            Route::LinearInX => match self.r {
                Order::Finite(r) => b + a * u64::from(r),
                Order::PosInfinity => b + a * u64::from(self.d.finite().unwrap_or(0)),
            },
            Route::FlatInY => {
                let e = self.f.degree_in_x().finite().unwrap_or(0);
                a + u64::from(e) * b
            }
        }
    }

    /// Per-monomial bounds for `Q` (given in original coordinates) and the
    /// overall `m* = 1 + max threshold`.
    pub fn bounds_for(
        &self,
        q: &Polynomial,
    ) -> Result<(Polynomial, Vec<MonomialBound>, u32), GvcError> {
        let qn = coord_change(q, &self.c)?;
        let bounds: Vec<MonomialBound> = qn
            .terms()
            .rev()
            .map(|(m, _)| {
                let (a, b) = (m.exponent(0), m.exponent(1));
                MonomialBound {
                    a,
                    b,
                    threshold: self.threshold(a, b),
                }
            })
            .collect();
        let top = bounds.iter().map(|b| b.threshold).max().unwrap_or(0);
        let m_star = u32::try_from(top + 1)
            .map_err(|_| GvcError::PreconditionViolated("threshold exceeds u32".into()))?;
        Ok((qn, bounds, m_star))
    }
}

fn lambda2_p2_witness(phi: &PhiSpec, p: &Polynomial) -> Result<Option<Polynomial>, GvcError> {
    Ok(witness_of(&apply_lambda_pow(phi, 2, &p.pow(2))?))
}

/// Normalizes `Phi` and determines which route bounds the vanishing for `P`.
/// Requires `Lambda P = 0`.
pub fn shape_of(phi: &PhiSpec, p: &Polynomial) -> Result<Shape, GvcError> {
    require_xy(p)?;
    let lambda_p = apply_lambda_pow(phi, 1, p)?;
    if let Some(witness) = witness_of(&lambda_p) {
        return Err(GvcError::HypothesisViolated { m: 1, witness });
    }
    let zero = Polynomial::zero(&xy_ring());

    if p.is_zero() {
        return Ok(Shape {
            route: Route::ZeroPolynomial,
            c: Coefficient::zero(),
            phi_normalized: phi.clone(),
            p_normalized: zero.clone(),
            a1: Some(Coefficient::zero()),
            f: zero.clone(),
            g: zero,
            d: Degree::NegInfinity,
            r: phi.order(),
        });
    }

    if !phi.q0().is_zero() {
        if p.degree_in_y() > Degree::Finite(0) {
            return Err(GvcError::NormalizationFailed);
        }
        let constant = p.filter_terms(|m, _| m.is_constant());
        return Ok(Shape {
            route: Route::ConstantTerm,
            c: Coefficient::zero(),
            phi_normalized: phi.clone(),
            p_normalized: p.clone(),
            a1: None,
            f: p - &constant,
            d: constant.degree_in_y(),
            g: constant,
            r: phi.order(),
        });
    }

    let (phi_n, c) = normalize_phi(phi)?;
    let pn = coord_change(p, &c)?;
    let r = phi_n.order();
    match linear_form(&pn, r) {
        Ok(form) => Ok(Shape {
            route: Route::LinearInX,
            c,
            phi_normalized: phi_n,
            f: Polynomial::term(&xy_ring(), &[1, 0], form.a1.clone()),
            a1: Some(form.a1),
            p_normalized: pn,
            g: form.g,
            d: form.d,
            r,
        }),
        Err(FormViolation::NonlinearX { f }) => {
            let g = &pn - &f;
            if g.degree_in_y() <= Degree::Finite(1) {
                Ok(Shape {
                    route: Route::FlatInY,
                    c,
                    phi_normalized: phi_n,
                    p_normalized: pn,
                    a1: None,
                    f,
                    d: g.degree_in_y(),
                    g,
                    r,
                })
            } else {
                Err(GvcError::FormViolated {
                    violation: FormViolation::NonlinearX { f },
                    lambda2_p2: lambda2_p2_witness(phi, p)?,
                })
            }
        }
        Err(violation) => Err(GvcError::FormViolated {
            violation,
            lambda2_p2: lambda2_p2_witness(phi, p)?,
        }),
    }
}

/// Builds a certificate that `Lambda^m(P^m Q) = 0` for all `m >= m_star`,
/// then recomputes the vanishing for `m = m_star ..= m_star + m_verify`.
pub fn certify(
    phi: &PhiSpec,
    p: &Polynomial,
    q: &Polynomial,
    m_verify: u32,
) -> Result<GvcCertificate, GvcError> {
    require_xy(q)?;
    let shape = shape_of(phi, p)?;
    let (q_normalized, bounds, m_star) = shape.bounds_for(q)?;

    let mut samples = Vec::with_capacity(m_verify as usize + 1);
    let mut power = p.pow(m_star);
    for m in m_star..=m_star + m_verify {
        if m > m_star {
            power = &power * p;
        }
        let value = apply_lambda_pow(phi, m, &(&power * q))?;
        let entry = entry_for(m, &value);
        if let Some(witness) = entry.witness.clone() {
            return Err(GvcError::BoundViolated { m, witness });
        }
        samples.push(entry);
    }

    let Shape {
        route,
        c,
        phi_normalized,
        p_normalized,
        a1,
        f,
        g,
        d,
        r,
    } = shape;
    Ok(GvcCertificate {
        phi: phi.clone(),
        c,
        phi_normalized,
        a1,
        g,
        d,
        r,
        m_star,
        samples,
        route,
        f,
        p_normalized,
        q_normalized,
        bounds,
    })
}

/// Both sides of the `x = 0` slice of `Lambda^2(P^2)` for
/// `P = exp(x Phi(Dy))(f + g)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Eq1Residual {
    /// Recomputed from scratch.
    #[serde(serialize_with = "serde_util::poly")]
    pub direct: Polynomial,
    /// The closed-form combination of `g`, `Phi(g)`, `a1`, `a2`.
    #[serde(serialize_with = "serde_util::poly")]
    pub transcribed: Polynomial,
    #[serde(serialize_with = "serde_util::poly")]
    pub residual: Polynomial,
}

/// Evaluates the closed-form expression for the `x = 0` slice of
/// `Lambda^2(P^2)` and compares it with direct computation. A nonzero
/// residual is a finding about the closed form, not an error.
pub fn eq1_residual(
    phi: &PhiSpec,
    f: &Polynomial,
    g: &Polynomial,
) -> Result<Eq1Residual, GvcError> {
    let p = kernel_element(phi, f, g)?;
    let a0 = f.constant_term();
    if !a0.is_zero() {
        return Err(GvcError::NonzeroConstantTerm(a0));
    }
    let zero = Polynomial::zero(&xy_ring());
    let direct = apply_lambda_pow(phi, 2, &p.pow(2))?.substitute("x", &zero)?;

    let a1 = f.coeff_of(&[1, 0]);
    let a2 = f.coeff_of(&[2, 0]);
    let d2 = |u: &Polynomial| u.derivative(&[0, 2]);
    let ph = |u: &Polynomial| phi.apply_at_dy(u);
    let int = |n: i64| Coefficient::from_integer(n.into());

    let phi_g = ph(g);
    let phi2_g = ph(&phi_g);
    let terms = [
        ph(&ph(&d2(&g.pow(2)))),
        ph(&d2(g)).scale(&(int(-4) * &a1)),
        ph(&d2(&(g * &phi_g))).scale(&int(-4)),
        d2(&phi_g.pow(2)).scale(&int(2)),
        d2(g).scale(&(int(4) * &a2)),
        d2(&phi_g).scale(&(int(4) * &a1)),
        d2(&(g * &phi2_g)).scale(&int(2)),
    ];
    let transcribed = terms.iter().fold(zero, |acc, t| &acc + t);
    let residual = &direct - &transcribed;
    Ok(Eq1Residual {
        direct,
        transcribed,
        residual,
    })
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `(4r)! r! r! - 6 (3r)! (2r)! r! + 6 ((2r)!)^3`, exactly.
pub fn eq2_value(r: u32) -> BigInt {
    let f2 = factorial(2 * r);
    eq2_leading_difference(r) + BigInt::from(6) * &f2 * &f2 * &f2
}

/// The first two terms of [`eq2_value`]: `(4r)! r! r! - 6 (3r)! (2r)! r!`.
pub fn eq2_leading_difference(r: u32) -> BigInt {
    let fr = factorial(r);
    factorial(4 * r) * &fr * &fr - BigInt::from(6) * factorial(3 * r) * factorial(2 * r) * &fr
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_deg_x: u32,
    pub max_deg_y: u32,
    pub pool: Vec<i64>,
    pub m_max: u32,
    /// `Some((count, seed))` samples candidates instead of enumerating.
    pub sample: Option<(usize, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchHit {
    /// `Lambda^m(P^m Q) != 0` for some `m` above the bound.
    BeyondBound {
        #[serde(serialize_with = "serde_util::poly")]
        p: Polynomial,
        #[serde(serialize_with = "serde_util::poly")]
        q: Polynomial,
        m: u32,
        bound: u32,
    },
    /// The hypothesis held through `m_max` but no bound could be derived.
    Uncertified {
        #[serde(serialize_with = "serde_util::poly")]
        p: Polynomial,
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub examined: usize,
    pub hypothesis_passed: usize,
    pub hits: Vec<SearchHit>,
}

fn candidate_from_digits(digits: impl Iterator<Item = i64>, monomials: &[Monomial]) -> Polynomial {
    Polynomial::from_terms(
        &xy_ring(),
        monomials
            .iter()
            .cloned()
            .zip(digits.map(|d| Coefficient::from_integer(d.into()))),
    )
}

fn hypothesis_holds(phi: &PhiSpec, p: &Polynomial, m_max: u32) -> Result<bool, GvcError> {
    let mut power = Polynomial::one(&xy_ring());
    for m in 1..=m_max {
        power = &power * p;
        if !apply_lambda_pow(phi, m, &power)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn examine(
    phi: &PhiSpec,
    p: &Polynomial,
    basis: &[Polynomial],
    m_max: u32,
) -> Result<Option<Vec<SearchHit>>, GvcError> {
    if !hypothesis_holds(phi, p, m_max)? {
        return Ok(None);
    }
    let shape = match shape_of(phi, p) {
        Ok(s) => s,
        Err(e) => {
            return Ok(Some(vec![SearchHit::Uncertified {
                p: p.clone(),
                error: e.to_string(),
            }]))
        }
    };
    let mut hits = Vec::new();
    for q in basis {
        let (_, _, m_star) = shape.bounds_for(q)?;
        let report = check_conclusion(phi, p, q, m_max)?;
        if let Some(bad) = report.entries.iter().find(|e| !e.vanished && e.m >= m_star) {
            hits.push(SearchHit::BeyondBound {
                p: p.clone(),
                q: q.clone(),
                m: bad.m,
                bound: m_star - 1,
            });
        }
    }
    Ok(Some(hits))
}

/// Enumerates (or samples) `P` with coefficients from `pool` on the monomials
/// `x^i y^j`, `i <= max_deg_x`, `j <= max_deg_y`. Every `P` passing the
/// hypothesis through `m_max` is checked against each monomial `Q` in the
/// same box; any failure at or above the derived threshold is a hit.
pub fn counterexample_search(
    phi: &PhiSpec,
    config: &SearchConfig,
) -> Result<SearchOutcome, GvcError> {
    if config.pool.is_empty() {
        return Err(GvcError::PreconditionViolated(
            "empty coefficient pool".into(),
        ));
    }
    if config.m_max == 0 {
        return Err(GvcError::PreconditionViolated(
            "m_max must be at least 1".into(),
        ));
    }
    let ring = xy_ring();
    let mut monomials = Vec::new();
    for i in 0..=config.max_deg_x {
        for j in 0..=config.max_deg_y {
            monomials.push(Monomial::new(&[i, j]));
        }
    }
    let basis: Vec<Polynomial> = monomials
        .iter()
        .map(|m| Polynomial::from_terms(&ring, [(m.clone(), Coefficient::one())]))
        .collect();

    let pool = &config.pool;
    let candidates: Vec<Polynomial> = match config.sample {
        Some((count, seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let digits: Vec<i64> = (0..monomials.len())
                        .map(|_| pool[rng.gen_range(0..pool.len())])
                        .collect();
                    candidate_from_digits(digits.into_iter(), &monomials)
                })
                .collect()
        }
        None => {
            let base = pool.len() as u128;
            let total = base
                .checked_pow(monomials.len() as u32)
                .filter(|&t| t <= 50_000_000)
                .ok_or_else(|| {
                    GvcError::PreconditionViolated("search space too large to enumerate".into())
                })?;
            (0..total)
                .map(|mut index| {
                    let digits = (0..monomials.len()).map(move |_| {
                        let d = pool[(index % base) as usize];
                        index /= base;
                        d
                    });
                    candidate_from_digits(digits, &monomials)
                })
                .collect()
        }
    };

    let results = candidates
        .par_iter()
        .map(|p| examine(phi, p, &basis, config.m_max))
        .collect::<Result<Vec<_>, _>>()?;

    let examined = results.len();
    let hypothesis_passed = results.iter().filter(|r| r.is_some()).count();
    let hits = results.into_iter().flatten().flatten().collect();
    Ok(SearchOutcome {
        examined,
        hypothesis_passed,
        hits,
    })
}
