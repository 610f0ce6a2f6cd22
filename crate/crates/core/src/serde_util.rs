//! Serializers for the JSON report format: polynomials as canonical text,
//! rationals as `"num/den"`, infinite degrees/orders as `"-inf"`/`"inf"`.

use serde::Serializer;

use crate::diffop::PhiSpec;
use crate::poly::{Coefficient, Degree, Order, Polynomial};

pub fn rational_text(c: &Coefficient) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

pub fn rational<S: Serializer>(c: &Coefficient, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_text(c))
}

pub fn opt_rational<S: Serializer>(c: &Option<Coefficient>, s: S) -> Result<S::Ok, S::Error> {
    match c {
        Some(c) => rational(c, s),
        None => s.serialize_none(),
    }
}

pub fn poly<S: Serializer>(p: &Polynomial, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(p)
}

pub fn opt_poly<S: Serializer>(p: &Option<Polynomial>, s: S) -> Result<S::Ok, S::Error> {
    match p {
        Some(p) => poly(p, s),
        None => s.serialize_none(),
    }
}

pub fn phi<S: Serializer>(p: &PhiSpec, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(p)
}

pub fn degree<S: Serializer>(d: &Degree, s: S) -> Result<S::Ok, S::Error> {
    match d {
        Degree::Finite(d) => s.serialize_u32(*d),
        Degree::NegInfinity => s.serialize_str("-inf"),
    }
}

pub fn order<S: Serializer>(r: &Order, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Order::Finite(r) => s.serialize_u32(*r),
        Order::PosInfinity => s.serialize_str("inf"),
    }
}
