//! Exact arithmetic in Q(g) for a real algebraic generator g, with elements
//! stored as rational polynomials reduced modulo the minimal polynomial.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::algebraic::AlgebraicReal;
use super::ball::Ball;
use super::poly::Poly;
use crate::error::{Error, Result};

/// Highest precision tried before a sign is declared undecidable.
const MAX_SIGN_BITS: u32 = 16384;

pub struct NumberField {
    gen: AlgebraicReal,
    /// Monic modulus, constant term first.
    modulus: Vec<BigRational>,
    cache: Mutex<FieldCache>,
}

struct FieldCache {
    gen: AlgebraicReal,
    powers: HashMap<u32, Arc<Vec<Ball>>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[b]/({})", self.gen.poly())
    }
}

impl NumberField {
    /// The field generated by `gen`. The generator should have degree ≥ 2.
    pub fn new(gen: AlgebraicReal) -> Arc<NumberField> {
        let gen = gen.minimized();
        let c = gen.poly().coeffs();
        let lc = BigRational::from_integer(gen.poly().lc());
        let modulus = c.iter().map(|a| BigRational::from_integer(a.clone()) / &lc).collect();
        Arc::new(NumberField {
            cache: Mutex::new(FieldCache { gen: gen.clone(), powers: HashMap::new() }),
            gen,
            modulus,
        })
    }

    pub fn gen(&self) -> &AlgebraicReal {
        &self.gen
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Same generator, possibly built independently.
    pub fn same_as(&self, other: &NumberField) -> bool {
        std::ptr::eq(self, other) || (self.gen.poly() == other.gen.poly() && self.gen.eq_exact(&other.gen))
    }

    /// Balls for g^0..g^(d-1) at working precision `prec`.
    fn powers(&self, prec: u32) -> Arc<Vec<Ball>> {
        let mut cache = self.cache.lock().expect("field cache poisoned");
        if let Some(p) = cache.powers.get(&prec) {
            return p.clone();
        }
        let wp = prec + 4 * self.degree() as u32 + 8;
        cache.gen = cache.gen.refine_bits(wp + 4);
        let g = Ball::from_interval(cache.gen.lo(), cache.gen.hi(), wp);
        let mut pw = vec![Ball::from_int(1, wp)];
        for i in 1..self.degree() {
            let next = pw[i - 1].mul(&g);
            pw.push(next);
        }
        let pw = Arc::new(pw);
        cache.powers.insert(prec, pw.clone());
        pw
    }

    fn reduce(&self, mut c: Vec<BigRational>) -> Vec<BigRational> {
        let d = self.degree();
        while c.len() > d {
            let top = c.pop().unwrap();
            if !top.is_zero() {
                let base = c.len() - d;
                for (i, m) in self.modulus[..d].iter().enumerate() {
                    c[base + i] -= &top * m;
                }
            }
        }
        trim(&mut c);
        c
    }
}

fn trim(c: &mut Vec<BigRational>) {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigRational> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            match b.get(i) {
                Some(y) => x - y,
                None => x,
            }
        })
        .collect();
    trim(&mut out);
    out
}

/// Quotient and remainder over Q.
fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    let lb = &b[db];
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let f = r.last().unwrap() / lb;
        for (i, y) in b.iter().enumerate() {
            r[k + i] -= &f * y;
        }
        q[k] = f;
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

/// Element of Q or of a number field Q(g).
#[derive(Clone)]
pub struct Elem {
    field: Option<Arc<NumberField>>,
    c: Vec<BigRational>,
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Elem {
    pub fn rational(q: BigRational) -> Elem {
        let mut c = vec![q];
        trim(&mut c);
        Elem { field: None, c }
    }

    pub fn from_int(n: i64) -> Elem {
        Elem::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Elem {
        Elem { field: None, c: Vec::new() }
    }

    pub fn one() -> Elem {
        Elem::from_int(1)
    }

    pub fn gen(field: &Arc<NumberField>) -> Elem {
        Elem::from_coeffs(field, vec![BigRational::zero(), BigRational::one()])
    }

    /// Σ c_i g^i, reduced.
    pub fn from_coeffs(field: &Arc<NumberField>, c: Vec<BigRational>) -> Elem {
        Elem { c: field.reduce(c), field: Some(field.clone()) }.normalized()
    }

    fn normalized(mut self) -> Elem {
        trim(&mut self.c);
        if self.c.len() <= 1 {
            self.field = None;
        }
        self
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.field.as_ref()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.c.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.c[0].clone()),
            _ => None,
        }
    }

    /// Common field of two elements, `Err(())` when the generators differ.
    fn join(&self, o: &Elem) -> std::result::Result<Option<Arc<NumberField>>, ()> {
        match (&self.field, &o.field) {
            (None, None) => Ok(None),
            (Some(f), None) | (None, Some(f)) => Ok(Some(f.clone())),
            (Some(f), Some(g)) => {
                if f.same_as(g) {
                    Ok(Some(f.clone()))
                } else {
                    Err(())
                }
            }
        }
    }

    /// Whether arithmetic between the two stays exact.
    pub fn compatible(&self, o: &Elem) -> bool {
        self.join(o).is_ok()
    }

    pub fn add(&self, o: &Elem) -> Option<Elem> {
        let field = self.join(o).ok()?;
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                let a = self.c.get(i).cloned().unwrap_or_else(BigRational::zero);
                match o.c.get(i) {
                    Some(b) => a + b,
                    None => a,
                }
            })
            .collect();
        Some(Elem { field, c }.normalized())
    }

    pub fn neg(&self) -> Elem {
        Elem { field: self.field.clone(), c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, o: &Elem) -> Option<Elem> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Elem) -> Option<Elem> {
        let field = self.join(o).ok()?;
        let prod = poly_mul(&self.c, &o.c);
        let c = match &field {
            Some(f) => f.reduce(prod),
            None => prod,
        };
        Some(Elem { field, c }.normalized())
    }

    pub fn scale(&self, q: &BigRational) -> Elem {
        Elem { field: self.field.clone(), c: self.c.iter().map(|x| x * q).collect() }.normalized()
    }

    /// Multiplicative inverse; `None` for zero or a zero divisor of a
    /// non-certified modulus.
    pub fn inv(&self) -> Option<Elem> {
        if self.is_zero() {
            return None;
        }
        let Some(f) = &self.field else {
            return Some(Elem::rational(self.c[0].recip()));
        };
        // Extended Euclid: find s with s·a ≡ 1 mod m.
        let mut r0 = f.modulus.clone();
        let mut r1 = self.c.clone();
        let mut s0: Vec<BigRational> = Vec::new();
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while r1.len() > 1 {
            let (q, r) = poly_divmod(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r1.is_empty() {
            return None;
        }
        let k = r1[0].recip();
        let c = s1.iter().map(|x| x * &k).collect();
        Some(Elem::from_coeffs(f, c))
    }

    pub fn div(&self, o: &Elem) -> Option<Elem> {
        self.mul(&o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Option<Elem> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Elem::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b)?;
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b)?;
            }
        }
        Some(acc)
    }

    /// Enclosure at roughly `prec` bits.
    pub fn to_ball(&self, prec: u32) -> Ball {
        match &self.field {
            None => Ball::from_rational(&self.as_rational().unwrap(), prec),
            Some(f) => {
                let pw = f.powers(prec);
                let wp = pw[0].prec();
                let mut acc = Ball::from_int(0, wp);
                for (ci, gi) in self.c.iter().zip(pw.iter()) {
                    if !ci.is_zero() {
                        acc = acc.add(&Ball::from_rational(ci, wp).mul(gi));
                    }
                }
                acc
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.as_rational() {
            Some(q) => q.to_f64().unwrap_or(f64::NAN),
            None => self.to_ball(80).to_f64(),
        }
    }

    fn coeff_bits(&self) -> u64 {
        self.c.iter().map(|q| q.numer().bits().max(q.denom().bits())).max().unwrap_or(0)
    }

    /// Exact sign.
    pub fn sign(&self) -> Result<Ordering> {
        if let Some(q) = self.as_rational() {
            return Ok(q.cmp(&BigRational::zero()));
        }
        let f = self.field.as_ref().unwrap();
        let mut prec = (64 + 2 * self.coeff_bits() as u32).max(64);
        let mut checked_root = false;
        loop {
            if let Ok(s) = self.to_ball(prec).sign() {
                return Ok(s);
            }
            if !checked_root && (!f.gen.is_minimal() || prec >= 1024) {
                checked_root = true;
                if self.vanishes_at_gen() {
                    return Ok(Ordering::Equal);
                }
            }
            if prec >= MAX_SIGN_BITS {
                return Err(Error::Undecidable { bits: prec });
            }
            prec *= 2;
        }
    }

    /// Whether the polynomial c(x) has g as a root (only possible when the
    /// modulus is not the minimal polynomial).
    fn vanishes_at_gen(&self) -> bool {
        let f = self.field.as_ref().unwrap();
        let den = self.c.iter().fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()));
        let ints: Vec<BigInt> =
            self.c.iter().map(|q| (q * BigRational::from_integer(den.clone())).to_integer()).collect();
        let p = Poly::new(ints);
        let g = p.gcd(f.gen.poly());
        g.degree() > 0 && g.squarefree().count_roots_open(f.gen.lo(), f.gen.hi()) > 0
    }

    pub fn cmp_exact(&self, o: &Elem) -> Result<Ordering> {
        self.sub(o).ok_or(Error::Undecidable { bits: 0 })?.sign()
    }
}

impl PartialEq for Elem {
    fn eq(&self, o: &Elem) -> bool {
        self.c == o.c && self.compatible(o)
    }
}

impl Eq for Elem {}

impl Hash for Elem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

fn fmt_coeff(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Elem {
    /// Polynomial in `b`, the field generator, lowest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, q) in self.c.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let neg = q.is_negative();
            let a = q.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "b".to_string(),
                _ => format!("b^{i}"),
            };
            if i == 0 {
                write!(f, "{}", fmt_coeff(&a))?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", fmt_coeff(&a))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::algebraic::root_of;

    fn golden() -> Arc<NumberField> {
        NumberField::new(root_of(&[-1, -1, 1], (1, 1), (2, 1)).unwrap())
    }

    #[test]
    fn defining_relation_vanishes() {
        let f = golden();
        let g = Elem::gen(&f);
        let e = g.mul(&g).unwrap().sub(&g).unwrap().sub(&Elem::one()).unwrap();
        assert!(e.is_zero());
        assert_eq!(e.sign().unwrap(), Ordering::Equal);
    }

    #[test]
    fn inverse_and_powers() {
        let f = golden();
        let g = Elem::gen(&f);
        let gi = g.inv().unwrap();
        // 1/G = G − 1
        assert_eq!(gi, g.sub(&Elem::one()).unwrap());
        let g4 = g.pow(4).unwrap();
        // G^4 = 3G + 2
        assert_eq!(g4.coeffs(), &[BigRational::from_integer(2.into()), BigRational::from_integer(3.into())]);
        assert_eq!(g.pow(-2).unwrap().mul(&g.pow(2).unwrap()).unwrap(), Elem::one());
    }

    #[test]
    fn quartic_alpha_is_positive() {
        let b = root_of(&[-1, -1, -1, 0, 1], (1, 1), (2, 1)).unwrap();
        let f = NumberField::new(b);
        let beta = Elem::gen(&f);
        let b2 = beta.mul(&beta).unwrap();
        let alpha = Elem::one().sub(&b2.div(&beta.add(&Elem::one()).unwrap()).unwrap()).unwrap();
        assert_eq!(alpha.sign().unwrap(), Ordering::Greater);
        assert!((alpha.to_f64() - 0.1288).abs() < 5e-4);
    }

    #[test]
    fn quintic_sign_against_rational() {
        let b = root_of(&[1, 1, -2, -1, -1, 1], (1, 1), (2, 1)).unwrap();
        let f = NumberField::new(b.clone());
        let d = Elem::gen(&f).sub(&Elem::rational(BigRational::new(9.into(), 5.into()))).unwrap();
        let expected = b.cmp_rational(&BigRational::new(9.into(), 5.into()));
        assert_eq!(d.sign().unwrap(), expected);
    }

    #[test]
    fn display_polynomial_form() {
        let f = golden();
        let e =
            Elem::from_coeffs(&f, vec![BigRational::new(1.into(), 2.into()), BigRational::from_integer((-3).into())]);
        assert_eq!(e.to_string(), "1/2 - 3*b");
    }
}
