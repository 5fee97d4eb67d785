//! Numbers used throughout: exact field elements or precision-tagged balls.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::algebraic::AlgebraicReal;
use super::ball::Ball;
use super::field::{Elem, NumberField};
use crate::error::{Error, Result};

/// Working precision used when exact arithmetic must fall back to balls.
pub const FALLBACK_PRECISION: u32 = 256;

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Elem),
    Approx(Ball),
}

impl Scalar {
    pub fn rational(q: BigRational) -> Scalar {
        Scalar::Exact(Elem::rational(q))
    }

    pub fn ratio(n: i64, d: i64) -> Scalar {
        Scalar::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::Exact(Elem::from_int(n))
    }

    pub fn zero() -> Scalar {
        Scalar::int(0)
    }

    pub fn one() -> Scalar {
        Scalar::int(1)
    }

    /// Exact scalar for an algebraic real: a rational, or the generator of its own field.
    pub fn from_algebraic(a: &AlgebraicReal) -> Scalar {
        match a.as_rational() {
            Some(q) => Scalar::rational(q),
            None => Scalar::Exact(Elem::gen(&NumberField::new(a.clone()))),
        }
    }

    pub fn from_f64(x: f64, prec: u32) -> Scalar {
        Scalar::Approx(Ball::from_f64(x, prec))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_elem(&self) -> Option<&Elem> {
        match self {
            Scalar::Exact(e) => Some(e),
            Scalar::Approx(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.as_elem().and_then(Elem::as_rational)
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.as_elem().and_then(Elem::field)
    }

    fn prec_hint(&self) -> u32 {
        match self {
            Scalar::Exact(_) => FALLBACK_PRECISION,
            Scalar::Approx(b) => b.prec(),
        }
    }

    pub fn to_ball(&self, prec: u32) -> Ball {
        match self {
            Scalar::Exact(e) => e.to_ball(prec),
            Scalar::Approx(b) => b.clone(),
        }
    }

    /// Drop to ball arithmetic at `prec` bits.
    pub fn approx(&self, prec: u32) -> Scalar {
        Scalar::Approx(self.to_ball(prec).with_prec(prec))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(e) => e.to_f64(),
            Scalar::Approx(b) => b.to_f64(),
        }
    }

    fn binary(
        &self,
        o: &Scalar,
        exact: impl Fn(&Elem, &Elem) -> Option<Elem>,
        ball: impl Fn(&Ball, &Ball) -> Ball,
    ) -> Scalar {
        if let (Scalar::Exact(a), Scalar::Exact(b)) = (self, o) {
            if let Some(c) = exact(a, b) {
                return Scalar::Exact(c);
            }
        }
        let p = self.prec_hint().min(o.prec_hint());
        Scalar::Approx(ball(&self.to_ball(p), &o.to_ball(p)))
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        self.binary(o, Elem::add, Ball::add)
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.binary(o, Elem::sub, Ball::sub)
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        self.binary(o, Elem::mul, Ball::mul)
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(e) => Scalar::Exact(e.neg()),
            Scalar::Approx(b) => Scalar::Approx(b.neg()),
        }
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar> {
        if o.sign()? == Ordering::Equal {
            return Err(Error::DivisionByZero);
        }
        if let (Scalar::Exact(a), Scalar::Exact(b)) = (self, o) {
            if let Some(c) = a.div(b) {
                return Ok(Scalar::Exact(c));
            }
        }
        let p = self.prec_hint().min(o.prec_hint());
        Ok(Scalar::Approx(self.to_ball(p).div(&o.to_ball(p))?))
    }

    pub fn inv(&self) -> Result<Scalar> {
        Scalar::one().div(self)
    }

    pub fn pow(&self, e: i64) -> Result<Scalar> {
        if let Scalar::Exact(a) = self {
            if let Some(c) = a.pow(e) {
                return Ok(Scalar::Exact(c));
            }
        }
        let mut acc = Scalar::one();
        let base = if e < 0 { self.inv()? } else { self.clone() };
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn sign(&self) -> Result<Ordering> {
        match self {
            Scalar::Exact(e) => e.sign(),
            Scalar::Approx(b) => b.sign(),
        }
    }

    pub fn cmp_to(&self, o: &Scalar) -> Result<Ordering> {
        if let (Scalar::Exact(a), Scalar::Exact(b)) = (self, o) {
            if let Some(d) = a.sub(b) {
                return d.sign();
            }
            // Different generators: compare at increasing precision.
            let mut prec = 128;
            loop {
                if let Ok(s) = a.to_ball(prec).cmp_ball(&b.to_ball(prec)) {
                    return Ok(s);
                }
                if prec >= 8192 {
                    return Err(Error::Undecidable { bits: prec });
                }
                prec *= 2;
            }
        }
        self.sub(o).sign()
    }

    pub fn lt(&self, o: &Scalar) -> Result<bool> {
        Ok(self.cmp_to(o)? == Ordering::Less)
    }

    pub fn le(&self, o: &Scalar) -> Result<bool> {
        Ok(self.cmp_to(o)? != Ordering::Greater)
    }

    /// Exact structural equality (both exact and equal as field elements).
    pub fn exact_eq(&self, o: &Scalar) -> bool {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(e) => write!(f, "{e}"),
            Scalar::Approx(b) => write!(f, "{b}"),
        }
    }
}

impl From<Elem> for Scalar {
    fn from(e: Elem) -> Scalar {
        Scalar::Exact(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::algebraic::root_of;

    #[test]
    fn golden_identity_is_zero() {
        let g = Scalar::from_algebraic(&root_of(&[-1, -1, 1], (1, 1), (2, 1)).unwrap());
        let e = g.mul(&g).sub(&g).sub(&Scalar::one());
        assert_eq!(e.sign().unwrap(), Ordering::Equal);
    }

    #[test]
    fn quartic_identity_is_zero() {
        let b = Scalar::from_algebraic(&root_of(&[-1, -1, -1, 0, 1], (1, 1), (2, 1)).unwrap());
        let b2 = b.mul(&b);
        let e = b2.mul(&b2).sub(&b2).sub(&b).sub(&Scalar::one());
        assert_eq!(e.sign().unwrap(), Ordering::Equal);
    }

    #[test]
    fn mixed_fields_fall_back_to_balls() {
        let g = Scalar::from_algebraic(&root_of(&[-1, -1, 1], (1, 1), (2, 1)).unwrap());
        let b = Scalar::from_algebraic(&root_of(&[-1, -1, -1, 0, 1], (1, 1), (2, 1)).unwrap());
        assert_eq!(g.cmp_to(&b).unwrap(), Ordering::Greater);
        assert!(!g.sub(&b).is_exact());
    }

    #[test]
    fn approx_near_zero_is_undecidable() {
        let x = Scalar::from_f64(1e-30, 64);
        assert!(matches!(x.sign(), Err(Error::Undecidable { .. })));
        assert!(Scalar::int(1).div(&Scalar::zero()).is_err());
    }
}
