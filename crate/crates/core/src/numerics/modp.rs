//! Irreducibility certificates from factor degrees modulo primes.
//!
//! A factor over ℚ of degree d reduces mod p to a product of irreducible
//! factors whose degrees sum to d. Intersecting the possible subset sums over
//! several good primes rules out every proper degree for most irreducible
//! polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::poly::Poly;

type Fp = Vec<u64>;

fn trim(a: &mut Fp) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn reduce_coeffs(f: &Poly, p: u64) -> Fp {
    let pb = BigInt::from(p);
    let mut a: Fp = f.coeffs().iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
    trim(&mut a);
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * a as u128 % p as u128) as u64;
        }
        a = (a as u128 * a as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn rem(a: &Fp, b: &Fp, p: u64) -> Fp {
    let mut r = a.clone();
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    while r.len() > db {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let k = (lead as u128 * inv as u128 % p as u128) as u64;
            let shift = r.len() - 1 - db;
            for (i, &bi) in b.iter().enumerate() {
                let sub = (k as u128 * bi as u128 % p as u128) as u64;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    trim(&mut r);
    r
}

fn quot(a: &Fp, b: &Fp, p: u64) -> Fp {
    let mut r = a.clone();
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    let mut q = vec![0u64; a.len().saturating_sub(db)];
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        let k = (lead as u128 * inv as u128 % p as u128) as u64;
        q[shift] = k;
        for (i, &bi) in b.iter().enumerate() {
            let sub = (k as u128 * bi as u128 % p as u128) as u64;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r.pop();
    }
    trim(&mut q);
    q
}

fn mul_mod(a: &Fp, b: &Fp, m: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![0u128; a.len() + b.len() - 1];
    let pp = p as u128;
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + x as u128 * y as u128) % pp;
        }
    }
    let mut c: Fp = c.into_iter().map(|x| x as u64).collect();
    trim(&mut c);
    rem(&c, m, p)
}

fn gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn derivative(a: &Fp, p: u64) -> Fp {
    let mut d: Fp = a.iter().enumerate().skip(1).map(|(i, &c)| (c as u128 * i as u128 % p as u128) as u64).collect();
    trim(&mut d);
    d
}

/// Degrees of the irreducible factors of a squarefree f mod p (distinct
/// degree factorization); `None` if p is a bad prime for f.
fn factor_degrees(f: &Poly, p: u64) -> Option<Vec<usize>> {
    let fp = reduce_coeffs(f, p);
    if fp.len() != f.degree() + 1 {
        return None;
    }
    if gcd(&fp, &derivative(&fp, p), p).len() != 1 {
        return None;
    }
    let mut rest = fp;
    let mut degrees = Vec::new();
    let x: Fp = vec![0, 1];
    let mut h = rem(&x, &rest, p);
    let mut i = 0usize;
    while rest.len() > 2 * (i + 1) {
        i += 1;
        // h = x^{p^i} mod rest
        let mut acc: Fp = vec![1];
        let mut base = h.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, &rest, p);
            }
            base = mul_mod(&base, &base, &rest, p);
            e >>= 1;
        }
        h = acc;
        let mut hx = h.clone();
        hx.resize(hx.len().max(2), 0);
        hx[1] = (hx[1] + p - 1) % p;
        trim(&mut hx);
        let g = gcd(&rest, &hx, p);
        let dg = g.len() - 1;
        if dg > 0 {
            degrees.extend(std::iter::repeat_n(i, dg / i));
            rest = quot(&rest, &g, p);
            h = rem(&h, &rest, p);
        }
    }
    if rest.len() > 1 {
        degrees.push(rest.len() - 1);
    }
    Some(degrees)
}

fn subset_sums(degrees: &[usize], n: usize) -> Vec<bool> {
    let mut s = vec![false; n + 1];
    s[0] = true;
    for &d in degrees {
        for k in (d..=n).rev() {
            if s[k - d] {
                s[k] = true;
            }
        }
    }
    s
}

const PRIMES: [u64; 40] = [
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311, 313,
];

/// True only when f (squarefree, primitive, degree ≥ 2) is certainly
/// irreducible over ℚ.
pub fn irreducible_by_degree_sieve(f: &Poly) -> bool {
    let n = f.degree();
    if n < 2 || f.coeffs()[0].is_zero() {
        return n == 1;
    }
    let mut possible = vec![true; n + 1];
    for &p in &PRIMES {
        let Some(degrees) = factor_degrees(f, p) else { continue };
        let sums = subset_sums(&degrees, n);
        for (k, ok) in possible.iter_mut().enumerate() {
            *ok &= sums[k];
        }
        if (1..n).all(|k| !possible[k]) {
            return true;
        }
    }
    false
}
