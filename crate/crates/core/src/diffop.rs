//! Constant-coefficient differential operators on `K[x, y]`.
//!
//! An operator is stored as its symbol, a polynomial in `Dx, Dy`. Because the
//! coefficients are scalars, composition is just multiplication of symbols.
//! This module also hosts the operator `Lambda = (Dx - Phi(Dy)) * Dy`, the
//! exponential shift `exp(x * Phi(Dy))` and the linear coordinate change
//! that removes the linear term of `Phi`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::{Coefficient, Degree, Monomial, Order, PolyError, Polynomial, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffOpError {
    #[error("operator symbols [{symbols}] do not act on ring [{ring}]")]
    SymbolMismatch { symbols: Ring, ring: Ring },
    #[error("Phi has nonzero constant term {q0}; exp(x*Phi(Dy)) does not preserve polynomials")]
    NotLocallyNilpotent { q0: Coefficient },
    #[error("Phi has nonzero constant term {q0}; normalization needs q0 = 0")]
    Q0NotZero { q0: Coefficient },
    #[error("Phi must be a polynomial in t, got ring [{0}]")]
    NotUnivariate(Ring),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The univariate polynomial `Phi(t) = q0 + q1 t + ... + qs t^s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhiSpec {
    phi: Polynomial,
}

impl PhiSpec {
    pub fn new(phi: Polynomial) -> Result<Self, DiffOpError> {
        if phi.ring() != &Ring::t() {
            return Err(DiffOpError::NotUnivariate(phi.ring().clone()));
        }
        Ok(PhiSpec { phi })
    }

    /// `Phi` from its coefficient list `[q0, q1, ...]`.
    pub fn from_coeffs<I>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = Coefficient>,
    {
        let ring = Ring::t();
        let phi = Polynomial::from_terms(
            &ring,
            coeffs
                .into_iter()
                .enumerate()
                .map(|(k, c)| (Monomial::new(&[k as u32]), c)),
        );
        PhiSpec { phi }
    }

    /// `Phi(t) = t^k`
    pub fn monomial(k: u32) -> Self {
        PhiSpec {
            phi: Polynomial::term(&Ring::t(), &[k], Coefficient::one()),
        }
    }

    pub fn zero() -> Self {
        PhiSpec {
            phi: Polynomial::zero(&Ring::t()),
        }
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.phi
    }

    pub fn is_zero(&self) -> bool {
        self.phi.is_zero()
    }

    /// `q_k`
    pub fn coefficient(&self, k: u32) -> Coefficient {
        self.phi.coeff_of(&[k])
    }

    pub fn q0(&self) -> Coefficient {
        self.coefficient(0)
    }

    /// `o(Phi)`, recomputed from the polynomial each call.
    pub fn order(&self) -> Order {
        self.phi.order("t").expect("t ring")
    }

    pub fn degree(&self) -> Degree {
        self.phi.degree("t").expect("t ring")
    }

    fn require_nilpotent(&self) -> Result<(), DiffOpError> {
        let q0 = self.q0();
        if q0.is_zero() {
            Ok(())
        } else {
            Err(DiffOpError::NotLocallyNilpotent { q0 })
        }
    }

    /// `Phi(Dy)` applied to a polynomial in `(x, y)`.
    pub fn apply_at_dy(&self, p: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero(p.ring());
        for (m, q) in self.phi.terms() {
            let k = m.exponent(0);
            acc = &acc + &p.derivative(&[0, k]).scale(q);
        }
        acc
    }
}

impl fmt::Display for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.phi.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiffOperator {
    symbol: Polynomial,
}

fn symbol_ring_for(ring: &Ring) -> Ring {
    Ring::new(ring.names().iter().map(|n| format!("D{n}")))
}

impl DiffOperator {
    /// Wraps a symbol polynomial; its variables must be named `D<var>`.
    pub fn from_symbol(symbol: Polynomial) -> Result<Self, DiffOpError> {
        if symbol
            .ring()
            .names()
            .iter()
            .any(|n| !n.starts_with('D') || n.len() < 2)
        {
            return Err(DiffOpError::SymbolMismatch {
                symbols: symbol.ring().clone(),
                ring: symbol.ring().clone(),
            });
        }
        Ok(DiffOperator { symbol })
    }

    pub fn identity() -> Self {
        DiffOperator {
            symbol: Polynomial::one(&Ring::dxdy()),
        }
    }

    pub fn dx() -> Self {
        DiffOperator {
            symbol: Polynomial::var(&Ring::dxdy(), "Dx").expect("Dx"),
        }
    }

    pub fn dy() -> Self {
        DiffOperator {
            symbol: Polynomial::var(&Ring::dxdy(), "Dy").expect("Dy"),
        }
    }

    pub fn symbol(&self) -> &Polynomial {
        &self.symbol
    }

    pub fn is_zero(&self) -> bool {
        self.symbol.is_zero()
    }

    /// Linear action: each symbol term `c * Dx^i * Dy^j` contributes
    /// `c * d^i/dx^i d^j/dy^j p`.
    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial, DiffOpError> {
        if self.symbol.ring() != &symbol_ring_for(p.ring()) {
            return Err(DiffOpError::SymbolMismatch {
                symbols: self.symbol.ring().clone(),
                ring: p.ring().clone(),
            });
        }
        let mut acc = Polynomial::zero(p.ring());
        for (m, c) in self.symbol.terms() {
            acc = &acc + &p.derivative(m.exponents()).scale(c);
        }
        Ok(acc)
    }

    /// Composition; equal to the product of symbols.
    pub fn op_mul(&self, other: &DiffOperator) -> Result<DiffOperator, DiffOpError> {
        Ok(DiffOperator {
            symbol: self.symbol.mul(&other.symbol)?,
        })
    }

    pub fn op_pow(&self, m: u32) -> DiffOperator {
        DiffOperator {
            symbol: self.symbol.pow(m),
        }
    }

    pub fn op_add(&self, other: &DiffOperator) -> Result<DiffOperator, DiffOpError> {
        Ok(DiffOperator {
            symbol: self.symbol.add(&other.symbol)?,
        })
    }

    pub fn op_sub(&self, other: &DiffOperator) -> Result<DiffOperator, DiffOpError> {
        Ok(DiffOperator {
            symbol: self.symbol.sub(&other.symbol)?,
        })
    }

    pub fn scale(&self, c: &Coefficient) -> DiffOperator {
        DiffOperator {
            symbol: self.symbol.scale(c),
        }
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.symbol.fmt(f)
    }
}

/// `Phi(Dy)` as an operator symbol.
pub fn phi_at_dy(phi: &PhiSpec) -> DiffOperator {
    let ring = Ring::dxdy();
    let symbol = Polynomial::from_terms(
        &ring,
        phi.polynomial()
            .terms()
            .map(|(m, c)| (Monomial::new(&[0, m.exponent(0)]), c.clone())),
    );
    DiffOperator { symbol }
}

/// `Lambda = (Dx - Phi(Dy)) * Dy`.
pub fn lambda_of(phi: &PhiSpec) -> DiffOperator {
    let inner = DiffOperator::dx()
        .op_sub(&phi_at_dy(phi))
        .expect("same symbol ring");
    inner.op_mul(&DiffOperator::dy()).expect("same symbol ring")
}

fn require_xy(p: &Polynomial) -> Result<(), DiffOpError> {
    let xy = Ring::xy();
    if p.ring() == &xy {
        Ok(())
    } else {
        Err(PolyError::RingMismatch {
            left: p.ring().clone(),
            right: xy,
        }
        .into())
    }
}

/// `Lambda^m (p)` computed as `(Dx - Phi(Dy))^m` applied after `Dy^m`.
///
/// Differentiating in `y` first discards every term of `y`-degree below `m`,
/// and the `m` factors of `Dx - Phi(Dy)` are then applied one at a time so
/// the operator power is never expanded. Stops early once the running value
/// is zero.
pub fn apply_lambda_pow(phi: &PhiSpec, m: u32, p: &Polynomial) -> Result<Polynomial, DiffOpError> {
    require_xy(p)?;
    let mut cur = p.derivative(&[0, m]);
    for _ in 0..m {
        if cur.is_zero() {
            break;
        }
        let dx = cur.derivative(&[1, 0]);
        cur = &dx - &phi.apply_at_dy(&cur);
    }
    Ok(cur)
}

/// Sign of the exponent in `exp(sign * x * Phi(Dy))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `exp(sign * x * Phi(Dy)) p = sum_k (sign*x)^k Phi(Dy)^k p / k!`.
///
/// Needs `q0 = 0`, so that each application of `Phi(Dy)` drops the
/// `y`-degree by at least `r = o(Phi)` and the sum stops after
/// `floor(deg_y p / r)` terms.
pub fn exp_shift(phi: &PhiSpec, sign: Sign, p: &Polynomial) -> Result<Polynomial, DiffOpError> {
    phi.require_nilpotent()?;
    require_xy(p)?;
    let r = match phi.order() {
        Order::PosInfinity => return Ok(p.clone()),
        Order::Finite(r) => r,
    };
    let last = match p.degree_in(1) {
        Degree::NegInfinity => return Ok(p.clone()),
        Degree::Finite(d) => d / r,
    };

    let mut acc = p.clone();
    let mut cur = p.clone();
    let mut factorial = BigInt::one();
    for k in 1..=last {
        cur = phi.apply_at_dy(&cur);
        if cur.is_zero() {
            break;
        }
        factorial *= k;
        let mut c = Coefficient::new(BigInt::one(), factorial.clone());
        if sign == Sign::Minus && k % 2 == 1 {
            c = -c;
        }
        acc = &acc + &cur.shift(&[k, 0]).scale(&c);
    }
    Ok(acc)
}

/// Removes the linear term of `Phi`: returns `(Phi', c)` with `c = -q1` and
/// `Phi'(t) = Phi(t) + c t`, so `o(Phi') >= 2` or `Phi' = 0`.
///
/// With `sigma_c(p) = p(x, y + c x)` (see [`coord_change`]) this satisfies
/// `Lambda_{Phi'}(sigma_c p) = sigma_c(Lambda_Phi p)`.
pub fn normalize_phi(phi: &PhiSpec) -> Result<(PhiSpec, Coefficient), DiffOpError> {
    let q0 = phi.q0();
    if !q0.is_zero() {
        return Err(DiffOpError::Q0NotZero { q0 });
    }
    let c = -phi.coefficient(1);
    let linear = Polynomial::term(&Ring::t(), &[1], c.clone());
    let normalized = PhiSpec {
        phi: phi.polynomial() + &linear,
    };
    Ok((normalized, c))
}

/// `sigma_c(p) = p(x, y + c x)`; inverse is `sigma_{-c}`.
pub fn coord_change(p: &Polynomial, c: &Coefficient) -> Result<Polynomial, DiffOpError> {
    require_xy(p)?;
    if c.is_zero() {
        return Ok(p.clone());
    }
    let ring = p.ring();
    let y = Polynomial::var(ring, "y")?;
    let x = Polynomial::var(ring, "x")?;
    let image = &y + &x.scale(c);
    Ok(p.substitute("y", &image)?)
}
