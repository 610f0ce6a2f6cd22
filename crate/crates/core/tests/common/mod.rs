//! Test-only helpers: a naive dense bivariate polynomial used as an
//! independent oracle, and seeded random generators.

#![allow(dead_code)]

use std::collections::BTreeMap;

use gvc_core::{Coefficient, Monomial, PhiSpec, Polynomial, Ring};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

/// Bivariate polynomial as a plain map `(i, j) -> c` for `c x^i y^j`.
/// Shares no code with `gvc_core::poly`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dense(pub BTreeMap<(u32, u32), Coefficient>);

impl Dense {
    pub fn zero() -> Self {
        Dense::default()
    }

    pub fn mono(i: u32, j: u32, c: i64) -> Self {
        let mut d = Dense::zero();
        d.push(i, j, Coefficient::from_integer(c.into()));
        d
    }

    fn push(&mut self, i: u32, j: u32, c: Coefficient) {
        let e = self.0.entry((i, j)).or_insert_with(Coefficient::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&(i, j));
        }
    }

    pub fn add(&self, o: &Dense) -> Dense {
        let mut r = self.clone();
        for (&(i, j), c) in &o.0 {
            r.push(i, j, c.clone());
        }
        r
    }

    pub fn scale(&self, c: &Coefficient) -> Dense {
        let mut r = Dense::zero();
        for (&(i, j), v) in &self.0 {
            r.push(i, j, v * c);
        }
        r
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let mut r = Dense::zero();
        for (&(i, j), a) in &self.0 {
            for (&(k, l), b) in &o.0 {
                r.push(i + k, j + l, a * b);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Dense {
        (0..k).fold(Dense::mono(0, 0, 1), |acc, _| acc.mul(self))
    }

    /// One derivative in x, by the power rule.
    pub fn dx(&self) -> Dense {
        let mut r = Dense::zero();
        for (&(i, j), c) in &self.0 {
            if i > 0 {
                r.push(i - 1, j, c * Coefficient::from_integer(i.into()));
            }
        }
        r
    }

    pub fn dy(&self) -> Dense {
        let mut r = Dense::zero();
        for (&(i, j), c) in &self.0 {
            if j > 0 {
                r.push(i, j - 1, c * Coefficient::from_integer(j.into()));
            }
        }
        r
    }

    pub fn dy_n(&self, n: u32) -> Dense {
        (0..n).fold(self.clone(), |acc, _| acc.dy())
    }

    /// `Phi(Dy)` with `phi[k] = q_k`.
    pub fn phi_dy(&self, phi: &[Coefficient]) -> Dense {
        let mut r = Dense::zero();
        for (k, q) in phi.iter().enumerate() {
            r = r.add(&self.dy_n(k as u32).scale(q));
        }
        r
    }

    /// One application of `(Dx - Phi(Dy)) Dy`.
    pub fn lambda(&self, phi: &[Coefficient]) -> Dense {
        let u = self.dy();
        u.dx().add(&u.phi_dy(phi).scale(&-Coefficient::one()))
    }

    pub fn lambda_n(&self, phi: &[Coefficient], m: u32) -> Dense {
        (0..m).fold(self.clone(), |acc, _| acc.lambda(phi))
    }

    pub fn to_poly(&self) -> Polynomial {
        Polynomial::from_terms(
            &Ring::xy(),
            self.0
                .iter()
                .map(|(&(i, j), c)| (Monomial::new(&[i, j]), c.clone())),
        )
    }

    pub fn from_poly(p: &Polynomial) -> Dense {
        let mut d = Dense::zero();
        for (m, c) in p.terms() {
            d.push(m.exponent(0), m.exponent(1), c.clone());
        }
        d
    }
}

pub fn q(n: i64) -> Coefficient {
    Coefficient::from_integer(n.into())
}

pub fn qq(n: i64, d: i64) -> Coefficient {
    Coefficient::new(BigInt::from(n), BigInt::from(d))
}

pub fn phi_coeffs(phi: &PhiSpec) -> Vec<Coefficient> {
    match phi.degree().finite() {
        None => vec![],
        Some(s) => (0..=s).map(|k| phi.coefficient(k)).collect(),
    }
}

/// Random polynomial in `(x, y)` with `deg_x <= dx`, `deg_y <= dy`, about
/// `density` of the box filled, integer coefficients in `[-c, c]`.
pub fn random_xy<R: Rng>(rng: &mut R, dx: u32, dy: u32, c: i64, density: f64) -> Polynomial {
    let mut terms = Vec::new();
    for i in 0..=dx {
        for j in 0..=dy {
            if rng.gen_bool(density) {
                terms.push((Monomial::new(&[i, j]), q(rng.gen_range(-c..=c))));
            }
        }
    }
    Polynomial::from_terms(&Ring::xy(), terms)
}

/// Random univariate polynomial in `var` (index 0 = x, 1 = y) of degree <= deg.
pub fn random_univariate<R: Rng>(rng: &mut R, var: usize, deg: u32, c: i64) -> Polynomial {
    let terms = (0..=deg).map(|k| {
        let mut e = [0, 0];
        e[var] = k;
        (Monomial::new(&e), q(rng.gen_range(-c..=c)))
    });
    Polynomial::from_terms(&Ring::xy(), terms.collect::<Vec<_>>())
}

/// Random `Phi` with `q0 = 0` and degree <= deg.
pub fn random_phi_q0_zero<R: Rng>(rng: &mut R, deg: u32, c: i64) -> PhiSpec {
    let mut coeffs = vec![q(0)];
    coeffs.extend((1..=deg).map(|_| q(rng.gen_range(-c..=c))));
    PhiSpec::from_coeffs(coeffs)
}
