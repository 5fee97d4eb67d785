//! The maps T±_{β,α}, orbits, the expansions τ± and the projection π.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{AlgebraicReal, Elem, Scalar};
use crate::words::{EPWord, FiniteWord};

/// Which one-sided map: `Upper` emits 0 iff x < p, `Lower` iff x ≤ p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Upper,
    Lower,
}

impl Variant {
    pub fn opposite(self) -> Variant {
        match self {
            Variant::Upper => Variant::Lower,
            Variant::Lower => Variant::Upper,
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "upper" | "+" => Ok(Variant::Upper),
            "lower" | "-" => Ok(Variant::Lower),
            _ => Err(Error::Parse(format!("variant must be upper or lower, got {s:?}"))),
        }
    }
}

/// A point (β, α) of the parameter region with cached p = (1−α)/β.
#[derive(Clone, Debug)]
pub struct Params {
    beta: Scalar,
    alpha: Scalar,
    p: Scalar,
    beta_real: Option<AlgebraicReal>,
}

impl Params {
    /// Checked constructor: 1 < β < 2 and 0 ≤ α ≤ 2 − β.
    pub fn new(beta: Scalar, alpha: Scalar) -> Result<Params> {
        let one = Scalar::one();
        let two = Scalar::int(2);
        if !one.lt(&beta)? || !beta.lt(&two)? {
            return Err(Error::InvalidParams(format!("beta = {:.6} must lie in (1, 2)", beta.to_f64())));
        }
        if alpha.lt(&Scalar::zero())? || two.sub(&beta).lt(&alpha)? {
            return Err(Error::InvalidParams(format!(
                "alpha = {:.6} must lie in [0, 2 - beta] = [0, {:.6}]",
                alpha.to_f64(),
                2.0 - beta.to_f64()
            )));
        }
        let p = one.sub(&alpha).div(&beta)?;
        let beta_real = match &beta {
            Scalar::Exact(e) => match (e.as_rational(), e.field()) {
                (Some(q), _) => Some(AlgebraicReal::from_rational(&q)),
                (None, Some(f)) if *e == Elem::gen(f) => Some(f.gen().clone()),
                _ => None,
            },
            Scalar::Approx(_) => None,
        };
        Ok(Params { beta, alpha, p, beta_real })
    }

    /// Exact parameters from an algebraic β and an α given in terms of β.
    pub fn exact(beta: &AlgebraicReal, alpha: impl FnOnce(&Scalar) -> Result<Scalar>) -> Result<Params> {
        let b = Scalar::from_algebraic(beta);
        let a = alpha(&b)?;
        Params::new(b, a)
    }

    /// The greedy map (β, 0).
    pub fn greedy(beta: &AlgebraicReal) -> Result<Params> {
        Params::exact(beta, |_| Ok(Scalar::zero()))
    }

    pub fn beta(&self) -> &Scalar {
        &self.beta
    }

    pub fn alpha(&self) -> &Scalar {
        &self.alpha
    }

    pub fn p(&self) -> &Scalar {
        &self.p
    }

    /// β as an algebraic real, when β is exact.
    pub fn beta_real(&self) -> Option<&AlgebraicReal> {
        self.beta_real.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.beta.is_exact() && self.alpha.is_exact()
    }

    /// Same parameters with α replaced.
    pub fn with_alpha(&self, alpha: Scalar) -> Result<Params> {
        Params::new(self.beta.clone(), alpha)
    }

    /// Ball-arithmetic copy at `prec` bits.
    pub fn approx(&self, prec: u32) -> Params {
        let beta = self.beta.approx(prec);
        let alpha = self.alpha.approx(prec);
        let p = Scalar::one().sub(&alpha).div(&beta).unwrap_or_else(|_| self.p.approx(prec));
        Params { beta, alpha, p, beta_real: None }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "beta ≈ {:.10}, alpha ≈ {:.10}", self.beta.to_f64(), self.alpha.to_f64())
    }
}

pub fn critical_point(params: &Params) -> Scalar {
    params.p().clone()
}

/// Letter emitted at x by the given one-sided map.
pub fn letter_at(params: &Params, x: &Scalar, variant: Variant) -> Result<u8> {
    let c = x.cmp_to(params.p())?;
    Ok(match (variant, c) {
        (_, std::cmp::Ordering::Less) => 0,
        (Variant::Lower, std::cmp::Ordering::Equal) => 0,
        _ => 1,
    })
}

/// One step given the letter: βx + α − letter.
pub fn step(params: &Params, x: &Scalar, letter: u8) -> Scalar {
    let y = params.beta().mul(x).add(params.alpha());
    if letter == 1 {
        y.sub(&Scalar::one())
    } else {
        y
    }
}

pub fn apply_map(params: &Params, x: &Scalar, variant: Variant) -> Result<Scalar> {
    let a = letter_at(params, x, variant)?;
    Ok(step(params, x, a))
}

/// A finite orbit with its letters; `cycle = (entry, length)` when a revisit was seen.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub variant: Variant,
    pub points: Vec<Scalar>,
    pub letters: FiniteWord,
    pub cycle: Option<(usize, usize)>,
    /// True when `cycle` is only a guess from the letter pattern (ball arithmetic).
    pub probable: bool,
}

pub fn orbit(params: &Params, x: &Scalar, variant: Variant, max_steps: usize) -> Result<Orbit> {
    let exact = params.is_exact() && x.is_exact();
    let mut seen: HashMap<Elem, usize> = HashMap::new();
    let mut points = vec![x.clone()];
    let mut letters = FiniteWord::empty();
    let mut cur = x.clone();
    for n in 0..max_steps {
        if exact {
            let e = cur.as_elem().unwrap().clone();
            if let Some(&m) = seen.get(&e) {
                points.pop();
                return Ok(Orbit { variant, points, letters, cycle: Some((m, n - m)), probable: false });
            }
            seen.insert(e, n);
        }
        let a = letter_at(params, &cur, variant)?;
        letters.push(a);
        cur = step(params, &cur, a);
        points.push(cur.clone());
    }
    let cycle = if exact { None } else { probable_period(letters.letters()) };
    Ok(Orbit { variant, points, letters, cycle, probable: cycle.is_some() })
}

/// Smallest eventual period visible in the second half of a prefix.
pub fn probable_period(w: &[u8]) -> Option<(usize, usize)> {
    let n = w.len();
    if n < 8 {
        return None;
    }
    for q in 1..=n / 4 {
        let tail = n / 2;
        if (tail..n - q).all(|i| w[i] == w[i + q]) {
            let mut start = tail;
            while start > 0 && w[start - 1] == w[start - 1 + q] {
                start -= 1;
            }
            return Some((start, q));
        }
    }
    None
}

/// Result of an expansion: a certified word, or a prefix from ball arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expansion {
    Exact(EPWord),
    Prefix { prefix: FiniteWord, probable_period: Option<(usize, usize)> },
}

impl Expansion {
    pub fn word(&self) -> Option<&EPWord> {
        match self {
            Expansion::Exact(w) => Some(w),
            Expansion::Prefix { .. } => None,
        }
    }

    pub fn letters(&self, n: usize) -> FiniteWord {
        match self {
            Expansion::Exact(w) => w.prefix(n),
            Expansion::Prefix { prefix, .. } => prefix.prefix(n.min(prefix.len())),
        }
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expansion::Exact(w) => write!(f, "{w}"),
            Expansion::Prefix { prefix, .. } => write!(f, "{prefix}..."),
        }
    }
}

/// τ±(x). Exact inputs must close up within `max_steps`.
pub fn expansion(params: &Params, x: &Scalar, variant: Variant, max_steps: usize) -> Result<Expansion> {
    let o = orbit(params, x, variant, max_steps)?;
    if !o.probable {
        if let Some((m, q)) = o.cycle {
            let l = o.letters.letters();
            return Ok(Expansion::Exact(EPWord::new(&l[..m], &l[m..m + q])));
        }
        if params.is_exact() && x.is_exact() {
            return Err(Error::NoPeriodWithinBudget { steps: max_steps, prefix: o.letters });
        }
    }
    Ok(Expansion::Prefix { prefix: o.letters, probable_period: o.cycle })
}

/// τ±(x) as a certified word.
pub fn expansion_word(params: &Params, x: &Scalar, variant: Variant, max_steps: usize) -> Result<EPWord> {
    match expansion(params, x, variant, max_steps)? {
        Expansion::Exact(w) => Ok(w),
        Expansion::Prefix { prefix, .. } => Err(Error::NoPeriodWithinBudget { steps: max_steps, prefix }),
    }
}

/// Σ_{k=1}^{n} w_k β^{-k} by Horner in β⁻¹.
fn finite_sum(binv: &Scalar, w: &[u8]) -> Scalar {
    let mut acc = Scalar::zero();
    for &b in w.iter().rev() {
        acc = acc.add(&Scalar::int(b as i64)).mul(binv);
    }
    acc
}

/// π(w) = α/(1−β) + Σ w_k β^{-k}, in closed form.
pub fn project_pi(params: &Params, w: &EPWord) -> Result<Scalar> {
    let beta = params.beta();
    let binv = beta.inv()?;
    let a = w.pre().len();
    let q = w.period().len() as i64;
    let pre = finite_sum(&binv, w.pre());
    let per = finite_sum(&binv, w.period());
    let geom = Scalar::one().sub(&binv.pow(q)?);
    let tail = binv.pow(a as i64)?.mul(&per.div(&geom)?);
    let offset = params.alpha().div(&Scalar::one().sub(beta))?;
    Ok(offset.add(&pre).add(&tail))
}

/// π of a finite word read as w·0^∞.
pub fn project_prefix(params: &Params, w: &[u8]) -> Result<Scalar> {
    let binv = params.beta().inv()?;
    let offset = params.alpha().div(&Scalar::one().sub(params.beta()))?;
    Ok(offset.add(&finite_sum(&binv, w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::algebraic::root_of;

    fn golden() -> Params {
        Params::greedy(&root_of(&[-1, -1, 1], (1, 1), (2, 1)).unwrap()).unwrap()
    }

    fn quartic() -> Params {
        let b = root_of(&[-1, -1, -1, 0, 1], (1, 1), (2, 1)).unwrap();
        Params::exact(&b, |b| Ok(Scalar::one().sub(&b.mul(b).div(&b.add(&Scalar::one()))?))).unwrap()
    }

    fn w(s: &str) -> EPWord {
        s.parse().unwrap()
    }

    #[test]
    fn golden_map_values() {
        let g = golden();
        let one = Scalar::one();
        let y = apply_map(&g, &one, Variant::Upper).unwrap();
        assert!(y.exact_eq(&g.beta().sub(&one)));
        assert_eq!(apply_map(&g, &Scalar::zero(), Variant::Upper).unwrap().sign().unwrap(), std::cmp::Ordering::Equal);
        assert!(critical_point(&g).exact_eq(&g.beta().inv().unwrap()));
    }

    #[test]
    fn quartic_one_maps_to_p() {
        let q = quartic();
        let y = apply_map(&q, &Scalar::one(), Variant::Upper).unwrap();
        assert!(y.exact_eq(q.p()));
    }

    #[test]
    fn expansions_of_worked_examples() {
        let q = quartic();
        assert_eq!(expansion_word(&q, &Scalar::zero(), Variant::Upper, 100).unwrap(), w("(0001)"));
        assert_eq!(expansion_word(&q, &Scalar::one(), Variant::Lower, 100).unwrap(), w("(10)"));
        let quintic = Params::greedy(&root_of(&[1, 1, -2, -1, -1, 1], (1, 1), (2, 1)).unwrap()).unwrap();
        assert_eq!(expansion_word(&quintic, &Scalar::one(), Variant::Lower, 100).unwrap(), w("11(100)"));
        assert_eq!(expansion_word(&golden(), &Scalar::one(), Variant::Lower, 100).unwrap(), w("(10)"));
    }

    #[test]
    fn projection_examples() {
        let g = golden();
        assert!(project_pi(&g, &w("(10)")).unwrap().exact_eq(&Scalar::one()));
        let q = quartic();
        let lhs = project_pi(&q, &w("00(10)")).unwrap();
        let (b, a) = (q.beta(), q.alpha());
        let rhs = Scalar::one().sub(a).sub(&b.mul(a)).div(&b.mul(b)).unwrap();
        assert!(lhs.exact_eq(&rhs));
        let zero = project_pi(&q, &w("0*")).unwrap();
        assert!(zero.exact_eq(&a.div(&Scalar::one().sub(b)).unwrap()));
    }

    #[test]
    fn boundary_critical_point() {
        let b = root_of(&[-1, -1, 1], (1, 1), (2, 1)).unwrap();
        let p = Params::exact(&b, |b| Ok(Scalar::int(2).sub(b))).unwrap();
        let expect = p.beta().sub(&Scalar::one()).div(p.beta()).unwrap();
        assert!(critical_point(&p).exact_eq(&expect));
    }

    #[test]
    fn invalid_params_rejected() {
        let r = Params::new(Scalar::ratio(3, 2), Scalar::ratio(7, 10));
        assert!(matches!(r, Err(Error::InvalidParams(_))));
        assert!(Params::new(Scalar::int(2), Scalar::zero()).is_err());
    }

    #[test]
    fn exact_rational_start_without_period_reports_budget() {
        let p = Params::new(Scalar::ratio(3, 2), Scalar::zero()).unwrap();
        let r = expansion(&p, &Scalar::ratio(1, 3), Variant::Upper, 30);
        assert!(matches!(r, Err(Error::NoPeriodWithinBudget { steps: 30, .. })));
    }

    #[test]
    fn float_mode_gives_flagged_prefix() {
        let g = golden();
        let x = Scalar::ratio(1, 2);
        let exact = expansion_word(&g, &x, Variant::Upper, 500).unwrap();
        let ga = g.approx(256);
        match expansion(&ga, &x.approx(256), Variant::Upper, 60).unwrap() {
            Expansion::Prefix { prefix, .. } => assert_eq!(prefix, exact.prefix(60)),
            Expansion::Exact(_) => panic!("float mode must not certify"),
        }
        // The golden orbit of 1 lands on p, which balls cannot decide.
        let r = expansion(&ga, &Scalar::one().approx(256), Variant::Lower, 10);
        assert!(matches!(r, Err(Error::Undecidable { .. })));
    }
}
