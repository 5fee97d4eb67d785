//! Minimal polynomial of a real root, by recombining approximate complex
//! roots into exact integer factors.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::modp::irreducible_by_degree_sieve;
use super::poly::Poly;

/// Root groups (a real root, or a conjugate pair) beyond this count are not searched.
const MAX_UNITS: usize = 24;

/// Approximate complex roots by Aberth iteration.
pub fn complex_roots(p: &Poly) -> Vec<Complex64> {
    let n = p.degree();
    if n == 0 {
        return Vec::new();
    }
    let c: Vec<Complex64> = p.to_f64_coeffs().into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    let lc = c[n];
    let monic: Vec<Complex64> = c.iter().map(|&x| x / lc).collect();
    let bound = 1.0 + monic[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let radius = bound.clamp(1e-3, 1e6) * 0.5 + 0.5;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut v = monic[n];
        let mut d = Complex64::zero();
        for k in (0..n).rev() {
            d = d * x + v;
            v = v * x + monic[k];
        }
        (v, d)
    };
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, d) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let mut s = Complex64::zero();
            for j in 0..n {
                if j != i {
                    s += Complex64::one() / (z[i] - z[j]);
                }
            }
            let w = ratio / (Complex64::one() - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// A real root or a conjugate pair, grouped so factors stay real.
struct Unit {
    roots: Vec<Complex64>,
}

fn group_units(roots: &[Complex64]) -> Vec<Unit> {
    let tol = 1e-7;
    let mut used = vec![false; roots.len()];
    let mut units = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let r = roots[i];
        if r.im.abs() <= tol * r.norm().max(1.0) {
            units.push(Unit { roots: vec![Complex64::new(r.re, 0.0)] });
            continue;
        }
        let conj = r.conj();
        let partner = (0..roots.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (roots[a] - conj).norm().total_cmp(&(roots[b] - conj).norm()));
        match partner {
            Some(j) => {
                used[j] = true;
                units.push(Unit { roots: vec![r, conj] });
            }
            None => units.push(Unit { roots: vec![r] }),
        }
    }
    units
}

/// Multiply out ∏(x − r), returning real coefficients constant first.
fn expand(roots: &[Complex64]) -> Vec<f64> {
    let mut c = vec![Complex64::one()];
    for &r in roots {
        let mut next = vec![Complex64::zero(); c.len() + 1];
        for (k, &a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        c = next;
    }
    c.into_iter().map(|z| z.re).collect()
}

fn round_to_poly(c: &[f64], scale: f64) -> Option<Poly> {
    let mut out = Vec::with_capacity(c.len());
    for &x in c {
        let y = x * scale;
        let r = y.round();
        if !r.is_finite() || (y - r).abs() > 1e-4 * (1.0 + y.abs()).sqrt() {
            return None;
        }
        out.push(BigInt::from(r as i128));
    }
    Some(Poly::new(out))
}

fn small_divisors(n: &BigInt) -> Vec<f64> {
    let n = n.abs();
    let Some(v) = n.to_u64() else { return vec![1.0] };
    if v > 1_000_000 {
        return vec![1.0, v as f64];
    }
    (1..=v).filter(|d| v % d == 0).map(|d| d as f64).collect()
}

fn has_root_in(p: &Poly, lo: &BigRational, hi: &BigRational) -> bool {
    p.degree() > 0 && p.count_roots_open(lo, hi) > 0
}

/// Try to split `f` into a proper factor pair; return the factor that keeps the root.
fn split_once(f: &Poly, lo: &BigRational, hi: &BigRational) -> Result<Option<Poly>, ()> {
    let roots = complex_roots(f);
    let units = group_units(&roots);
    let k = units.len();
    if k <= 1 {
        return Ok(None);
    }
    if k > MAX_UNITS {
        return Err(());
    }
    let scales = small_divisors(&f.lc());
    let mut subset: Vec<usize> = Vec::new();
    for size in 1..=k / 2 {
        subset.clear();
        subset.extend(0..size);
        loop {
            let rs: Vec<Complex64> = subset.iter().flat_map(|&i| units[i].roots.iter().copied()).collect();
            let c = expand(&rs);
            // First coefficient as a cheap filter before full rounding.
            for &s in &scales {
                let t = c[c.len() - 2] * s;
                if (t - t.round()).abs() > 1e-4 * (1.0 + t.abs()).sqrt() {
                    continue;
                }
                if let Some(g) = round_to_poly(&c, s) {
                    if g.degree() == 0 {
                        continue;
                    }
                    if let Some(h) = f.div_exact(&g) {
                        if h.degree() == 0 {
                            continue;
                        }
                        let keep = if has_root_in(&g, lo, hi) { g } else { h };
                        return Ok(Some(keep.primitive()));
                    }
                }
            }
            if !next_combination(&mut subset, k) {
                break;
            }
        }
    }
    Ok(None)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Strip cyclotomic factors x^m − 1 suggested by roots on the unit circle.
fn strip_cyclotomic(f: &Poly, lo: &BigRational, hi: &BigRational) -> Poly {
    let roots = complex_roots(f);
    let mut orders: Vec<usize> = roots
        .iter()
        .filter(|r| (r.norm() - 1.0).abs() < 1e-6)
        .filter_map(|r| {
            let a = r.arg().abs();
            if a < 1e-9 {
                return Some(1);
            }
            let m = (2.0 * std::f64::consts::PI / a).round();
            (m >= 1.0 && m <= 4.0 * f.degree() as f64 + 4.0).then_some(m as usize)
        })
        .collect();
    orders.sort_unstable();
    orders.dedup();
    let mut g = f.clone();
    for m in orders {
        // Rotations by k/m for every k share x^m' − 1 with m' a multiple; try m and 2m.
        for mm in [m, 2 * m] {
            let mut cyc = vec![BigInt::zero(); mm + 1];
            cyc[0] = BigInt::from(-1);
            cyc[mm] = BigInt::one();
            let common = g.gcd(&Poly::new(cyc));
            if common.degree() > 0 && !has_root_in(&common, lo, hi) {
                if let Some(q) = g.div_exact(&common) {
                    g = q.primitive();
                }
            }
        }
    }
    g
}

/// Remove factors x and x^m − 1 by exact division (none of them has a root
/// in an interval avoiding 0 and ±1).
fn strip_trivial(f: &Poly, lo: &BigRational, hi: &BigRational) -> Poly {
    let mut g = f.clone();
    let x = Poly::monomial(1);
    while g.degree() > 0 && g.coeffs()[0].is_zero() {
        g = g.div_exact(&x).expect("x divides");
    }
    let mut m = 1;
    while m <= 2 * g.degree() + 2 {
        let mut cyc = vec![BigInt::zero(); m + 1];
        cyc[0] = BigInt::from(-1);
        cyc[m] = BigInt::one();
        let common = g.gcd(&Poly::new(cyc));
        if common.degree() > 0 && !has_root_in(&common, lo, hi) {
            if let Some(q) = g.div_exact(&common) {
                g = q.primitive();
                continue;
            }
        }
        m += 1;
    }
    g
}

/// The smallest factor of `p` found that keeps the root in (lo, hi), and
/// whether it is certified irreducible.
pub fn reduce(p: &Poly, lo: &BigRational, hi: &BigRational) -> (Poly, bool) {
    let mut f = p.squarefree().primitive();
    if f.degree() <= 1 {
        return (f, true);
    }
    f = strip_cyclotomic(&f, lo, hi);
    f = strip_trivial(&f, lo, hi);
    loop {
        if f.degree() <= 1 || irreducible_by_degree_sieve(&f) {
            return (f, true);
        }
        match split_once(&f, lo, hi) {
            Ok(Some(g)) => f = g,
            Ok(None) => return (f, true),
            Err(()) => return (f, false),
        }
    }
}

/// Minimal polynomial of the unique root of `p` in (lo, hi), or `None` when the
/// search cannot certify irreducibility.
pub fn minimal_polynomial(p: &Poly, lo: &BigRational, hi: &BigRational) -> Option<Poly> {
    match reduce(p, lo, hi) {
        (f, true) => Some(f),
        (_, false) => None,
    }
}
