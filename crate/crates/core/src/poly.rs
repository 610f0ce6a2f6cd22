//! Exact sparse multivariate polynomials over the rationals.
//!
//! A [`Polynomial`] lives in a [`Ring`], an ordered list of variable names.
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`] under graded
//! lexicographic order, and zero coefficients are never stored, so two
//! polynomials are equal exactly when their term maps are equal.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;
use thiserror::Error;

/// Exact rational coefficient. `BigRational` keeps itself reduced with a
/// positive denominator, and zero is always `0/1`.
pub type Coefficient = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("ring mismatch: [{left}] vs [{right}]")]
    RingMismatch { left: Ring, right: Ring },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

/// Ordered list of variable names shared by all polynomials of a ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ring(Arc<[String]>);

impl Ring {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ring(names.into_iter().map(Into::into).collect())
    }

    /// The `(x, y)` ring the vanishing engine works in.
    pub fn xy() -> Self {
        Ring::new(["x", "y"])
    }

    /// The univariate ring `t` used for `Phi`.
    pub fn t() -> Self {
        Ring::new(["t"])
    }

    /// Symbol ring `(Dx, Dy)` for constant-coefficient operators on `(x, y)`.
    pub fn dxdy() -> Self {
        Ring::new(["Dx", "Dy"])
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    fn require(&self, name: &str) -> Result<usize, PolyError> {
        self.index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    fn check_same(&self, other: &Ring) -> Result<(), PolyError> {
        if self == other {
            Ok(())
        } else {
            Err(PolyError::RingMismatch {
                left: self.clone(),
                right: other.clone(),
            })
        }
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring{:?}", &*self.0)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join(", "))
    }
}

/// Exponent vector, one entry per ring variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn new(exponents: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exponents))
    }

    pub fn constant(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0[var]
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Graded lexicographic: total degree first, ties broken by comparing
/// exponents variable by variable in ring order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree in one variable; the zero polynomial has degree `NegInfinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, rhs: Degree) -> Degree {
        match (self, rhs) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::NegInfinity,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(d) => write!(f, "{d}"),
            Degree::NegInfinity => f.write_str("-inf"),
        }
    }
}

/// Order (least exponent) in one variable; the zero polynomial has order
/// `PosInfinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u32),
    PosInfinity,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(r) => Some(r),
            Order::PosInfinity => None,
        }
    }
}

impl Add for Order {
    type Output = Order;
    fn add(self, rhs: Order) -> Order {
        match (self, rhs) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a + b),
            _ => Order::PosInfinity,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(r) => write!(f, "{r}"),
            Order::PosInfinity => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    ring: Ring,
    terms: BTreeMap<Monomial, Coefficient>,
}

/// `e (e-1) ... (e-k+1)`
pub(crate) fn falling_factorial(e: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= e - i;
    }
    acc
}

fn accumulate(terms: &mut BTreeMap<Monomial, Coefficient>, mono: Monomial, c: Coefficient) {
    use std::collections::btree_map::Entry;
    match terms.entry(mono) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl Polynomial {
    pub fn zero(ring: &Ring) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, Coefficient::one())
    }

    pub fn constant(ring: &Ring, c: Coefficient) -> Self {
        Self::from_terms(ring, [(Monomial::constant(ring.len()), c)])
    }

    pub fn from_int(ring: &Ring, n: i64) -> Self {
        Self::constant(ring, Coefficient::from_integer(n.into()))
    }

    /// The polynomial consisting of the single variable `name`.
    pub fn var(ring: &Ring, name: &str) -> Result<Self, PolyError> {
        let idx = ring.require(name)?;
        let mut exps = vec![0; ring.len()];
        exps[idx] = 1;
        Ok(Self::term(ring, &exps, Coefficient::one()))
    }

    pub fn term(ring: &Ring, exponents: &[u32], c: Coefficient) -> Self {
        assert_eq!(exponents.len(), ring.len(), "exponent vector length");
        Self::from_terms(ring, [(Monomial::new(exponents), c)])
    }

    /// Builds a polynomial from arbitrary (possibly repeated, possibly zero)
    /// terms; the result is canonical.
    pub fn from_terms<I>(ring: &Ring, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Coefficient)>,
    {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.0.len(), ring.len(), "monomial arity");
            accumulate(&mut map, m, c);
        }
        Polynomial {
            ring: ring.clone(),
            terms: map,
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_constant() && c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Coefficient {
        self.terms.get(m).cloned().unwrap_or_else(Coefficient::zero)
    }

    /// Coefficient of the monomial with the given exponent vector.
    pub fn coeff_of(&self, exponents: &[u32]) -> Coefficient {
        self.coeff(&Monomial::new(exponents))
    }

    pub fn constant_term(&self) -> Coefficient {
        self.coeff(&Monomial::constant(self.ring.len()))
    }

    /// Least term in the canonical order, if any.
    pub fn least_term(&self) -> Option<(Monomial, Coefficient)> {
        self.terms
            .iter()
            .next()
            .map(|(m, c)| (m.clone(), c.clone()))
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ring.check_same(&other.ring)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), c.clone());
        }
        Ok(Polynomial {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ring.check_same(&other.ring)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), -c.clone());
        }
        Ok(Polynomial {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ring.check_same(&other.ring)?;
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                accumulate(&mut terms, ma.mul(mb), ca * cb);
            }
        }
        Ok(Polynomial {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn scale(&self, c: &Coefficient) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the monomial with the given exponents.
    pub fn shift(&self, exponents: &[u32]) -> Polynomial {
        let m = Monomial::new(exponents);
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.mul(&m), v.clone()))
                .collect(),
        }
    }

    /// Binary exponentiation; `pow(p, 0) = 1`.
    pub fn pow(&self, mut k: u32) -> Polynomial {
        let mut result = Polynomial::one(&self.ring);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// k-th formal partial derivative in `var`.
    pub fn partial(&self, var: &str, k: u32) -> Result<Polynomial, PolyError> {
        let idx = self.ring.require(var)?;
        let mut orders = vec![0; self.ring.len()];
        orders[idx] = k;
        Ok(self.derivative(&orders))
    }

    /// Mixed partial derivative with `orders[i]` derivatives in variable `i`.
    pub fn derivative(&self, orders: &[u32]) -> Polynomial {
        assert_eq!(orders.len(), self.ring.len(), "derivative arity");
        let mut terms = BTreeMap::new();
        'terms: for (m, c) in &self.terms {
            let mut factor = BigInt::one();
            let mut exps = SmallVec::<[u32; 4]>::with_capacity(orders.len());
            for (&e, &k) in m.0.iter().zip(orders) {
                if e < k {
                    continue 'terms;
                }
                if k > 0 {
                    factor *= falling_factorial(e, k);
                }
                exps.push(e - k);
            }
            // distinct input monomials map to distinct outputs
            terms.insert(Monomial(exps), c * Coefficient::from_integer(factor));
        }
        Polynomial {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn degree(&self, var: &str) -> Result<Degree, PolyError> {
        let idx = self.ring.require(var)?;
        Ok(self.degree_in(idx))
    }

    pub(crate) fn degree_in(&self, idx: usize) -> Degree {
        self.terms
            .keys()
            .map(|m| m.0[idx])
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    pub fn order(&self, var: &str) -> Result<Order, PolyError> {
        let idx = self.ring.require(var)?;
        Ok(self
            .terms
            .keys()
            .map(|m| m.0[idx])
            .min()
            .map_or(Order::PosInfinity, Order::Finite))
    }

    pub fn total_degree(&self) -> Degree {
        self.terms
            .keys()
            .map(|m| m.total_degree() as u32)
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    /// Formal substitution `var -> value`, expanded.
    pub fn substitute(&self, var: &str, value: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ring.check_same(&value.ring)?;
        let idx = self.ring.require(var)?;

        // group by the exponent of `var`, with that exponent cleared
        let mut groups: BTreeMap<u32, Vec<(Monomial, Coefficient)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            let e = std::mem::replace(&mut rest.0[idx], 0);
            groups.entry(e).or_default().push((rest, c.clone()));
        }

        let mut result = Polynomial::zero(&self.ring);
        let mut power = Polynomial::one(&self.ring);
        let mut current = 0;
        for (e, rest) in groups {
            while current < e {
                power = &power * value;
                current += 1;
            }
            let cofactor = Polynomial::from_terms(&self.ring, rest);
            result = &result + &(&cofactor * &power);
        }
        Ok(result)
    }

    /// Evaluates at a rational point given in ring order.
    pub fn eval(&self, point: &[Coefficient]) -> Coefficient {
        assert_eq!(point.len(), self.ring.len(), "evaluation point arity");
        let mut acc = Coefficient::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                v *= num_traits::pow(x.clone(), e as usize);
            }
            acc += v;
        }
        acc
    }

    /// Re-labels the polynomial into another ring of the same arity.
    pub fn with_ring(&self, ring: &Ring) -> Polynomial {
        assert_eq!(ring.len(), self.ring.len(), "ring arity");
        Polynomial {
            ring: ring.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Keeps only the terms satisfying the predicate.
    pub fn filter_terms<F>(&self, mut keep: F) -> Polynomial
    where
        F: FnMut(&Monomial, &Coefficient) -> bool,
    {
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, c)| keep(m, c))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

// Operator forms panic on ring mismatch; use the named methods for a `Result`.

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        Polynomial::add(self, rhs).expect("polynomial ring mismatch")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        Polynomial::sub(self, rhs).expect("polynomial ring mismatch")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        Polynomial::mul(self, rhs).expect("polynomial ring mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, ring: &Ring, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (name, &e) in ring.names().iter().zip(&m.0) {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(name)?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Canonical text form: graded-lex descending, explicit `*` and `^`,
/// rationals as `a/b`, `0` for the zero polynomial.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.is_constant() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write_monomial(f, &self.ring, m)?;
            }
        }
        Ok(())
    }
}
