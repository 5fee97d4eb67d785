//! Real algebraic numbers as a squarefree integer polynomial plus an open
//! rational isolating interval.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::ball::Ball;
use super::minpoly;
use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct AlgebraicReal {
    poly: Poly,
    lo: BigRational,
    hi: BigRational,
    minimal: bool,
}

fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

/// Midpoint snapped to a short dyadic rational inside (lo, hi).
fn split_point(lo: &BigRational, hi: &BigRational) -> BigRational {
    let width = hi - lo;
    let mid = (lo + hi) / two();
    // Round mid to a dyadic with denominator about 8/width so bit sizes stay small.
    let mut k: u32 = 0;
    let mut scale = BigRational::one();
    while scale.clone() * &width < BigRational::from_integer(BigInt::from(8)) && k < 4096 {
        scale *= two();
        k += 1;
    }
    let scaled = (&mid * &scale).round();
    let cand = scaled / scale;
    if &cand > lo && &cand < hi {
        cand
    } else {
        mid
    }
}

impl AlgebraicReal {
    /// An exact rational as an algebraic number.
    pub fn from_rational(r: &BigRational) -> AlgebraicReal {
        let eps = BigRational::new(BigInt::one(), BigInt::from(1u64 << 20)) / r.denom().clone();
        AlgebraicReal { poly: Poly::linear_for(r), lo: r - &eps, hi: r + &eps, minimal: true }
    }

    /// Build from parts; checks that (lo, hi) isolates exactly one root.
    pub fn from_parts(poly: &Poly, lo: BigRational, hi: BigRational) -> Result<AlgebraicReal> {
        let sf = poly.squarefree();
        if sf.count_roots_open(&lo, &hi) != 1 {
            return Err(Error::NoRoot { lo: lo.to_string(), hi: hi.to_string() });
        }
        let mut x = max_real_root_in(&sf, &lo, &hi)?;
        x.minimize();
        Ok(x)
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    /// Whether `poly` is certified to be the minimal polynomial.
    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.poly.degree() == 1 {
            let c = self.poly.coeffs();
            Some(BigRational::new(-c[0].clone(), c[1].clone()))
        } else {
            None
        }
    }

    /// Replace the polynomial by the minimal polynomial when it can be found.
    pub fn minimize(&mut self) {
        if self.minimal {
            return;
        }
        let (m, certified) = minpoly::reduce(&self.poly, &self.lo, &self.hi);
        self.poly = m;
        self.minimal = certified;
        if let Some(r) = self.as_rational() {
            *self = AlgebraicReal::from_rational(&r);
        }
    }

    pub fn minimized(mut self) -> AlgebraicReal {
        self.minimize();
        self
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn refine(&self, width: &BigRational) -> AlgebraicReal {
        assert!(width.is_positive());
        let mut x = self.clone();
        if let Some(r) = x.as_rational() {
            let half = width / BigRational::from_integer(BigInt::from(4));
            x.lo = &r - &half;
            x.hi = &r + &half;
            return x;
        }
        let slo = x.poly.sign_at(&x.lo);
        while x.width() > *width {
            let m = split_point(&x.lo, &x.hi);
            let sm = x.poly.sign_at(&m);
            if sm == Ordering::Equal {
                // A rational root of a non-minimal polynomial: the isolated root is m.
                return AlgebraicReal::from_rational(&m).refine(width);
            }
            if sm == slo {
                x.lo = m;
            } else {
                x.hi = m;
            }
        }
        x
    }

    /// Refine until the interval is narrower than 2^-bits.
    pub fn refine_bits(&self, bits: u32) -> AlgebraicReal {
        let w = BigRational::new(BigInt::one(), BigInt::one() << bits);
        if self.width() <= w {
            return self.clone();
        }
        self.refine(&w)
    }

    pub fn to_ball(&self, prec: u32) -> Ball {
        let x = self.refine_bits(prec + 2);
        Ball::from_interval(&x.lo, &x.hi, prec)
    }

    pub fn to_f64(&self) -> f64 {
        if let Some(r) = self.as_rational() {
            return r.to_f64().unwrap_or(f64::NAN);
        }
        let x = self.refine_bits(60);
        ((&x.lo + &x.hi) / two()).to_f64().unwrap_or(f64::NAN)
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        if let Some(r) = self.as_rational() {
            return r.cmp(q);
        }
        if self.poly.sign_at(q) == Ordering::Equal && &self.lo < q && q < &self.hi {
            return Ordering::Equal;
        }
        let mut x = self.clone();
        loop {
            if q <= &x.lo {
                return Ordering::Greater;
            }
            if q >= &x.hi {
                return Ordering::Less;
            }
            let w = x.width() / two();
            x = x.refine(&w);
        }
    }

    /// Exact equality of two algebraic numbers.
    pub fn eq_exact(&self, other: &AlgebraicReal) -> bool {
        let lo = if self.lo > other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi < other.hi { self.hi.clone() } else { other.hi.clone() };
        if lo >= hi {
            return false;
        }
        let g = self.poly.gcd(&other.poly);
        if g.degree() == 0 {
            return false;
        }
        // Both numbers are the unique roots of their polynomials inside their
        // intervals; they coincide iff the common factor has a root in the overlap
        // that is a root of both, i.e. a root of g there.
        let sf = g.squarefree();
        let count = sf.count_roots_open(&lo, &hi);
        if count == 0 {
            return false;
        }
        // g's root in the overlap is a root of self.poly in self's interval, hence equals self;
        // likewise for other.
        true
    }

    pub fn cmp_exact(&self, other: &AlgebraicReal) -> Ordering {
        if self.eq_exact(other) {
            return Ordering::Equal;
        }
        let mut a = self.clone();
        let mut b = other.clone();
        loop {
            if a.hi <= b.lo {
                return Ordering::Less;
            }
            if b.hi <= a.lo {
                return Ordering::Greater;
            }
            let wa = a.width() / two();
            let wb = b.width() / two();
            a = a.refine(&wa);
            b = b.refine(&wb);
        }
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "root of {} in ({}, {}) ≈ {:.12}", self.poly, self.lo, self.hi, self.to_f64())
    }
}

/// Largest real root of `p` inside the open interval (lo, hi).
pub fn max_real_root_in(p: &Poly, lo: &BigRational, hi: &BigRational) -> Result<AlgebraicReal> {
    if p.is_zero() {
        return Err(Error::NoRoot { lo: lo.to_string(), hi: hi.to_string() });
    }
    let f = p.squarefree();
    let seq = f.sturm_sequence();
    let count = |a: &BigRational, b: &BigRational| super::poly::count_with_sequence(&seq, a, b);
    if lo >= hi || count(lo, hi) == 0 {
        return Err(Error::NoRoot { lo: lo.to_string(), hi: hi.to_string() });
    }
    let mut a = lo.clone();
    let mut b = hi.clone();
    loop {
        let n = count(&a, &b);
        debug_assert!(n >= 1);
        if n == 1 && f.sign_at(&a) != Ordering::Equal && f.sign_at(&b) != Ordering::Equal {
            return Ok(AlgebraicReal { poly: f, lo: a, hi: b, minimal: false });
        }
        let m = split_point(&a, &b);
        let above = count(&m, &b);
        if f.sign_at(&m) == Ordering::Equal && above == 0 {
            return Ok(AlgebraicReal::from_rational(&m));
        }
        if above >= 1 {
            a = m;
        } else {
            b = m;
        }
    }
}

/// Parse-friendly constructor: `poly` coefficients constant first.
pub fn root_of(coeffs: &[i64], lo: (i64, i64), hi: (i64, i64)) -> Result<AlgebraicReal> {
    let p = Poly::from_i64(coeffs);
    let lo = BigRational::new(lo.0.into(), lo.1.into());
    let hi = BigRational::new(hi.0.into(), hi.1.into());
    Ok(max_real_root_in(&p, &lo, &hi)?.minimized())
}

/// Absolute value helper used by callers that need |x| as an f64 bound.
pub fn abs_f64(x: &AlgebraicReal) -> f64 {
    x.to_f64().abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn refine_reducible_polynomial_onto_rational_root() {
        // (x + 3)(x − 1): the split point of (−8, 8) lands on the root 1.
        let r = max_real_root_in(
            &Poly::from_i64(&[-3, 2, 1]),
            &BigRational::from_integer((-8).into()),
            &BigRational::from_integer(8.into()),
        )
        .unwrap();
        let fine = r.refine(&BigRational::new(1.into(), (1 << 20).into()));
        assert_eq!(fine.as_rational(), Some(BigRational::one()));
    }

    #[test]
    fn golden_mean() {
        let g = root_of(&[-1, -1, 1], (1, 1), (2, 1)).unwrap();
        assert!((g.to_f64() - 1.618_033_988_749_895).abs() < 1e-15);
        let r = g.refine(&q(1, 1_000_000_000_000));
        assert!(r.width() <= q(1, 1_000_000_000_000));
        assert!(r.lo() < &q(1_618_033_988_749_895, 1_000_000_000_000_000));
        assert!(r.hi() > &q(1_618_033_988_749_894, 1_000_000_000_000_000));
    }

    #[test]
    fn quartic_and_rational_roots() {
        let b = root_of(&[-1, -1, -1, 0, 1], (1, 1), (2, 1)).unwrap();
        assert!((b.to_f64() - 1.4656).abs() < 1e-4);
        assert_eq!(b.poly(), &Poly::from_i64(&[-1, 0, -1, 1]));
        let two = root_of(&[2, -3, 1], (0, 1), (3, 1)).unwrap();
        assert_eq!(two.as_rational(), Some(q(2, 1)));
        let one = root_of(&[-1, 1], (0, 1), (2, 1)).unwrap();
        let r = one.refine(&q(1, 1_000_000));
        assert!(r.lo() < &q(1, 1) && r.hi() > &q(1, 1));
        assert!(root_of(&[1, 0, 1], (0, 1), (2, 1)).is_err());
    }

    #[test]
    fn refine_is_idempotent_at_fixed_width() {
        let g = root_of(&[-1, -1, 1], (1, 1), (2, 1)).unwrap();
        let w = q(1, 1 << 30);
        let a = g.refine(&w);
        let b = a.refine(&w);
        assert_eq!(a.lo(), b.lo());
        assert_eq!(a.hi(), b.hi());
    }

    #[test]
    fn equality_and_order() {
        let g = root_of(&[-1, -1, 1], (1, 1), (2, 1)).unwrap();
        let g2 = root_of(&[1, 0, -3, 0, 1], (3, 2), (2, 1)).unwrap(); // (x²-x-1)(x²+x-1)
        assert!(g.eq_exact(&g2));
        let b = root_of(&[-1, -1, -1, 0, 1], (1, 1), (2, 1)).unwrap();
        assert_eq!(b.cmp_exact(&g), Ordering::Less);
        assert_eq!(g.cmp_rational(&q(8, 5)), Ordering::Greater);
    }
}
