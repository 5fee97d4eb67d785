//! Fixed-point midpoint-radius arithmetic with rigorous error bounds.
//!
//! A ball `{mid, rad, prec}` encloses the real interval
//! `[(mid − rad)·2^-prec, (mid + rad)·2^-prec]`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    mid: BigInt,
    rad: BigInt,
    prec: u32,
}

impl Ball {
    pub fn from_rational(q: &BigRational, prec: u32) -> Ball {
        let scaled = q.numer() << prec;
        let (quo, rem) = scaled.div_mod_floor(q.denom());
        let rad = if rem.is_zero() { BigInt::zero() } else { BigInt::one() };
        Ball { mid: quo, rad, prec }
    }

    pub fn from_int(n: i64, prec: u32) -> Ball {
        Ball { mid: BigInt::from(n) << prec, rad: BigInt::zero(), prec }
    }

    /// Ball covering the closed rational interval [lo, hi].
    pub fn from_interval(lo: &BigRational, hi: &BigRational, prec: u32) -> Ball {
        let a = Ball::from_rational(lo, prec);
        let b = Ball::from_rational(hi, prec);
        let lo_i = &a.mid - &a.rad;
        let hi_i = &b.mid + &b.rad;
        let sum = &lo_i + &hi_i;
        let mid = sum.div_floor(&BigInt::from(2));
        let rad = (&hi_i - &mid).max(&mid - &lo_i) + 1;
        Ball { mid, rad, prec }
    }

    pub fn from_f64(x: f64, prec: u32) -> Ball {
        let q = BigRational::from_float(x).unwrap_or_else(BigRational::zero);
        Ball::from_rational(&q, prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn mid(&self) -> &BigInt {
        &self.mid
    }

    pub fn rad(&self) -> &BigInt {
        &self.rad
    }

    /// Radius as a real number: rad·2^-prec.
    pub fn radius_f64(&self) -> f64 {
        scaled_to_f64(&self.rad, self.prec)
    }

    pub fn to_f64(&self) -> f64 {
        scaled_to_f64(&self.mid, self.prec)
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(&self.mid - &self.rad, BigInt::one() << self.prec)
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(&self.mid + &self.rad, BigInt::one() << self.prec)
    }

    pub fn with_prec(&self, prec: u32) -> Ball {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let d = prec - self.prec;
                Ball { mid: &self.mid << d, rad: &self.rad << d, prec }
            }
            Ordering::Less => {
                let d = self.prec - prec;
                let mid = self.mid.div_floor(&(BigInt::one() << d));
                let rad = (&self.rad >> d) + 2;
                Ball { mid, rad, prec }
            }
        }
    }

    fn align(a: &Ball, b: &Ball) -> (Ball, Ball) {
        let p = a.prec.max(b.prec);
        (a.with_prec(p), b.with_prec(p))
    }

    pub fn add(&self, o: &Ball) -> Ball {
        let (a, b) = Ball::align(self, o);
        Ball { mid: a.mid + b.mid, rad: a.rad + b.rad, prec: a.prec }
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        let (a, b) = Ball::align(self, o);
        Ball { mid: a.mid - b.mid, rad: a.rad + b.rad, prec: a.prec }
    }

    pub fn neg(&self) -> Ball {
        Ball { mid: -&self.mid, rad: self.rad.clone(), prec: self.prec }
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        let (a, b) = Ball::align(self, o);
        let p = a.prec;
        let prod = &a.mid * &b.mid;
        let mid = prod.div_floor(&(BigInt::one() << p));
        let err = a.mid.abs() * &b.rad + b.mid.abs() * &a.rad + &a.rad * &b.rad;
        let rad = (err >> p) + 2;
        Ball { mid, rad, prec: p }
    }

    pub fn mul_int(&self, k: &BigInt) -> Ball {
        Ball { mid: &self.mid * k, rad: &self.rad * k.abs(), prec: self.prec }
    }

    pub fn div(&self, o: &Ball) -> Result<Ball> {
        let (a, b) = Ball::align(self, o);
        let p = a.prec;
        let bm = b.mid.abs();
        if bm <= b.rad {
            return Err(Error::Undecidable { bits: p });
        }
        let mid = (&a.mid << p).div_floor(&b.mid);
        let num = (&a.rad * &bm + a.mid.abs() * &b.rad) << p;
        let den = (&bm - &b.rad) * &bm;
        let rad = num.div_ceil(&den) + 1;
        Ok(Ball { mid, rad, prec: p })
    }

    pub fn sign(&self) -> Result<Ordering> {
        if self.mid > self.rad {
            Ok(Ordering::Greater)
        } else if -&self.mid > self.rad {
            Ok(Ordering::Less)
        } else if self.mid.is_zero() && self.rad.is_zero() {
            Ok(Ordering::Equal)
        } else {
            Err(Error::Undecidable { bits: self.prec })
        }
    }

    pub fn cmp_ball(&self, o: &Ball) -> Result<Ordering> {
        self.sub(o).sign()
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }
}

fn scaled_to_f64(x: &BigInt, prec: u32) -> f64 {
    let bits = x.bits() as i64;
    if bits <= 1000 {
        let v = x.to_f64().unwrap_or(0.0);
        return v * 2f64.powi(-(prec as i32));
    }
    let drop = (bits - 900) as u32;
    let v = (x >> drop).to_f64().unwrap_or(0.0);
    v * 2f64.powi(drop as i32 - prec as i32)
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e} ± {:.3e}", self.to_f64(), self.radius_f64())
    }
}
