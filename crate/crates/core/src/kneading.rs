//! Kneading invariants, admissibility, validity of kneading pairs, and
//! recovery of (β, α) from symbolic data.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itinerary::{expansion, expansion_word, project_pi, Params, Variant};
use crate::language::{omega_minus_bounds, omega_plus_bounds, shifts_within, Automaton};
use crate::numerics::{max_real_root_in, AlgebraicReal, Poly, Scalar};
use crate::words::{EPWord, FiniteWord};

/// Step budget for exact orbit closure.
pub const DEFAULT_MAX_STEPS: usize = 4096;

/// ω = τ⁻(p) (starts with 0) and ν = τ⁺(p) (starts with 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KneadingPair {
    pub lower: EPWord,
    pub upper: EPWord,
}

impl KneadingPair {
    pub fn new(lower: EPWord, upper: EPWord) -> KneadingPair {
        KneadingPair { lower, upper }
    }

    /// τ⁻(1) = σω.
    pub fn tau_minus_one(&self) -> EPWord {
        self.lower.shift(1)
    }

    /// τ⁺(0) = σν.
    pub fn tau_plus_zero(&self) -> EPWord {
        self.upper.shift(1)
    }

    pub fn is_periodic(&self) -> bool {
        self.lower.is_periodic() && self.upper.is_periodic()
    }
}

impl fmt::Display for KneadingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lower {} upper {}", self.lower, self.upper)
    }
}

/// (τ⁻(p), τ⁺(p)) = (0·τ⁻(1), 1·τ⁺(0)).
pub fn kneading_invariants(params: &Params) -> Result<KneadingPair> {
    kneading_invariants_with(params, DEFAULT_MAX_STEPS)
}

pub fn kneading_invariants_with(params: &Params, max_steps: usize) -> Result<KneadingPair> {
    let one = expansion_word(params, &Scalar::one(), Variant::Lower, max_steps)?;
    let zero = expansion_word(params, &Scalar::zero(), Variant::Upper, max_steps)?;
    Ok(KneadingPair { lower: one.prepend(&[0]), upper: zero.prepend(&[1]) })
}

/// First n letters of one kneading invariant; works in both backends.
pub fn kneading_prefix(params: &Params, side: Variant, n: usize) -> Result<FiniteWord> {
    if n == 0 {
        return Ok(FiniteWord::empty());
    }
    let (x, head) = match side {
        Variant::Lower => (Scalar::one(), 0u8),
        Variant::Upper => (Scalar::zero(), 1u8),
    };
    let e = match expansion(params, &x, side, n - 1) {
        Ok(e) => e.letters(n - 1),
        Err(Error::NoPeriodWithinBudget { prefix, .. }) => prefix,
        Err(e) => return Err(e),
    };
    let mut letters = vec![head];
    letters.extend_from_slice(e.letters());
    Ok(FiniteWord::new(letters))
}

pub fn in_omega_plus(w: &EPWord, pair: &KneadingPair) -> bool {
    shifts_within(w, &omega_plus_bounds(&pair.lower, &pair.upper))
}

pub fn in_omega_minus(w: &EPWord, pair: &KneadingPair) -> bool {
    shifts_within(w, &omega_minus_bounds(&pair.lower, &pair.upper))
}

/// The four conditions characterising kneading pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "COND1")]
    Cond1,
    #[serde(rename = "COND2")]
    Cond2,
    #[serde(rename = "COND3")]
    Cond3,
    #[serde(rename = "COND4")]
    Cond4,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            Condition::Cond1 => 1,
            Condition::Cond2 => 2,
            Condition::Cond3 => 3,
            Condition::Cond4 => 4,
        };
        write!(f, "COND{n}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Validity {
    Valid,
    Invalid(Condition),
}

impl Validity {
    pub fn is_valid(self) -> bool {
        self == Validity::Valid
    }
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Validity::Valid => write!(f, "VALID"),
            Validity::Invalid(c) => write!(f, "INVALID({c})"),
        }
    }
}

/// Block length bound used for the renormalisation condition.
pub fn cond4_bound(lower: &EPWord, upper: &EPWord) -> usize {
    lower.orbit_len() + upper.orbit_len()
}

/// Canonical index of letter position i.
fn canon(w: &EPWord, i: usize) -> usize {
    let (a, q) = w.smallest_period();
    if i < a {
        i
    } else {
        a + (i - a) % q
    }
}

/// Whether `w` factors as an infinite concatenation of `xi` (read when the
/// next letter is 0) and `zeta` (read when it is 1).
fn parses_into(w: &EPWord, xi: &[u8], zeta: &[u8]) -> bool {
    let mut seen = vec![false; w.orbit_len()];
    let mut pos = 0usize;
    loop {
        let c = canon(w, pos);
        if seen[c] {
            return true;
        }
        seen[c] = true;
        let block = if w.letter(c) == 0 { xi } else { zeta };
        if !block.iter().enumerate().all(|(j, &b)| w.letter(c + j) == b) {
            return false;
        }
        pos = c + block.len();
    }
}

/// A block pair (ξ, ζ) witnessing failure of the renormalisation condition,
/// searched with block lengths in [3, bound].
pub fn cond4_witness(lower: &EPWord, upper: &EPWord, bound: usize) -> Option<(FiniteWord, FiniteWord)> {
    if lower.cmp_prefix(&[0, 1]).is_ne() || upper.cmp_prefix(&[1, 0]).is_ne() {
        return None;
    }
    for lx in 3..=bound {
        let xi = lower.prefix(lx);
        for lz in 3..=bound {
            let zeta = upper.prefix(lz);
            if !parses_into(lower, xi.letters(), zeta.letters()) || !parses_into(upper, xi.letters(), zeta.letters()) {
                continue;
            }
            let xw = EPWord::periodic(xi.letters());
            let zw = EPWord::periodic(zeta.letters());
            if &xw == lower && &zw == upper {
                continue;
            }
            let sub = KneadingPair::new(xw.clone(), zw.clone());
            if in_omega_minus(&xw, &sub) && in_omega_plus(&zw, &sub) {
                return Some((xi, zeta));
            }
        }
    }
    None
}

/// Checks the four validity conditions in order.
pub fn validate_kneading_pair(lower: &EPWord, upper: &EPWord) -> Result<Validity> {
    if lower.letter(0) != 0 || upper.letter(0) != 1 {
        return Ok(Validity::Invalid(Condition::Cond1));
    }
    let ordered = upper.shift(1) <= *lower && lower <= upper && *upper <= lower.shift(1);
    let pair = KneadingPair::new(lower.clone(), upper.clone());
    if !ordered || !in_omega_minus(lower, &pair) || !in_omega_plus(upper, &pair) {
        return Ok(Validity::Invalid(Condition::Cond2));
    }
    let a = Automaton::omega_plus(lower, upper)?;
    if !a.has_positive_entropy() {
        return Ok(Validity::Invalid(Condition::Cond3));
    }
    if cond4_witness(lower, upper, cond4_bound(lower, upper)).is_some() {
        return Ok(Validity::Invalid(Condition::Cond4));
    }
    Ok(Validity::Valid)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum SftStatus {
    Sft,
    NotSft,
    /// The kneading orbits did not close up within the budget.
    Indeterminate,
}

/// Finite type iff both kneading invariants are purely periodic.
pub fn is_sft(params: &Params) -> Result<SftStatus> {
    match kneading_invariants(params) {
        Ok(k) => Ok(if k.is_periodic() { SftStatus::Sft } else { SftStatus::NotSft }),
        Err(Error::NoPeriodWithinBudget { .. }) => Ok(SftStatus::Indeterminate),
        Err(e) => Err(e),
    }
}

/// (N, D) with Σ w_k z^{-k} = N(z)/D(z), D = z^a (z^q − 1).
pub fn series_fraction(w: &EPWord) -> (Poly, Poly) {
    let (a, q) = w.smallest_period();
    let mono = |k: usize, b: u8| if b == 1 { Poly::monomial(k) } else { Poly::zero() };
    let mut pre = Poly::zero();
    for (k, &b) in w.pre().iter().enumerate() {
        pre = &pre + &mono(a - 1 - k, b);
    }
    let mut per = Poly::zero();
    for (j, &b) in w.period().iter().enumerate() {
        per = &per + &mono(q - 1 - j, b);
    }
    let zq1 = &Poly::monomial(q) - &Poly::from_i64(&[1]);
    let n = &(&pre * &zq1) + &per;
    let d = &Poly::monomial(a) * &zq1;
    (n, d)
}

fn unit_interval() -> (BigRational, BigRational) {
    (BigRational::one(), BigRational::from_integer(BigInt::from(2)))
}

/// The β ∈ (1,2) whose quasi-greedy expansion of 1 is `w`.
pub fn solve_parry_beta(w: &EPWord) -> Result<AlgebraicReal> {
    let shifts = w.shifts();
    if let Some(m) = (1..shifts.len()).find(|&m| shifts[m] > *w) {
        return Err(Error::NotAdmissible(format!("shift {m} of {w} exceeds the word")));
    }
    if w.period() == [0] {
        return Err(Error::NotAdmissible(format!("{w} ends in 0^inf")));
    }
    let (n, d) = series_fraction(w);
    let (lo, hi) = unit_interval();
    Ok(max_real_root_in(&(&n - &d), &lo, &hi)?.minimized())
}

/// The polynomial whose maximal root in (1,2) is β for the pair.
pub fn pair_polynomial(lower: &EPWord, upper: &EPWord) -> Poly {
    let (nw, dw) = series_fraction(lower);
    let (nv, dv) = series_fraction(upper);
    &(&nw * &dv) - &(&nv * &dw)
}

/// Recover (β, α) from a kneading pair; the result is checked by
/// recomputing its kneading invariants.
pub fn system_from_kneading_pair(lower: &EPWord, upper: &EPWord) -> Result<Params> {
    let poly = pair_polynomial(lower, upper);
    let (lo, hi) = unit_interval();
    let beta = max_real_root_in(&poly, &lo, &hi)?.minimized();
    let params = params_from_beta(&beta, upper)?;
    let back = kneading_invariants(&params).map_err(|e| Error::RoundtripMismatch(e.to_string()))?;
    if back.lower != *lower || back.upper != *upper {
        return Err(Error::RoundtripMismatch(format!(
            "pair ({lower}, {upper}) gave parameters with kneading ({}, {})",
            back.lower, back.upper
        )));
    }
    Ok(params)
}

/// α from π(ν) = p, i.e. α = (1 − β)(1 − β·Σ ν_k β^{-k}).
fn params_from_beta(beta: &AlgebraicReal, upper: &EPWord) -> Result<Params> {
    let greedy = Params::greedy(beta)?;
    let b = greedy.beta().clone();
    let s = project_pi(&greedy, upper)?;
    let one = Scalar::one();
    let alpha = one.sub(&b).mul(&one.sub(&b.mul(&s)));
    Params::new(b, alpha).map_err(|e| Error::RoundtripMismatch(e.to_string()))
}

/// Bisection in α for a target kneading invariant on the chosen side.
/// Returns α whose kneading word agrees with `target` on the first K
/// letters, 2^{1−K} ≤ tol, and whose bracket is narrower than tol.
pub fn search_alpha(beta: &AlgebraicReal, target: &EPWord, side: Variant, tol: &BigRational) -> Result<Scalar> {
    if *tol <= BigRational::from_integer(0.into()) {
        return Err(Error::InvalidParams("tolerance must be positive".into()));
    }
    let mut k = 1usize;
    while BigRational::new(BigInt::one(), BigInt::one() << (k - 1)) > *tol {
        k += 1;
    }
    let long = 4 * k + 16;
    let greedy = Params::greedy(beta)?;
    let top = Scalar::int(2).sub(greedy.beta());
    let at = |s: &BigRational| -> Result<Scalar> { Ok(top.mul(&Scalar::rational(s.clone()))) };
    let word_at = |alpha: &Scalar, n: usize| -> Result<FiniteWord> {
        kneading_prefix(&greedy.with_alpha(alpha.clone())?, side, n)
    };
    let want_k = target.prefix(k);
    let want_long = target.prefix(long);
    let zero = BigRational::from_integer(0.into());
    let one = BigRational::one();
    let w0 = word_at(&at(&zero)?, long)?;
    let w1 = word_at(&at(&one)?, long)?;
    if w0 == want_long || w0.prefix(k) == want_k && target.cmp_prefix(w0.letters()).is_le() {
        return at(&zero);
    }
    if w1 == want_long || w1.prefix(k) == want_k && target.cmp_prefix(w1.letters()).is_ge() {
        return at(&one);
    }
    if target.cmp_prefix(w0.letters()).is_lt() || target.cmp_prefix(w1.letters()).is_gt() {
        return Err(Error::TargetOutOfRange(format!("{target} lies outside the kneading range of this beta")));
    }
    let (mut lo, mut hi) = (zero, one);
    let two = BigRational::from_integer(2.into());
    let tol_ratio = tol / BigRational::from_integer(2.into());
    for _ in 0..400 {
        let mid = (&lo + &hi) / &two;
        let a = at(&mid)?;
        let w = word_at(&a, long)?;
        match target.cmp_prefix(w.letters()) {
            std::cmp::Ordering::Equal => return Ok(a),
            std::cmp::Ordering::Greater => lo = mid,
            std::cmp::Ordering::Less => hi = mid,
        }
        // Scaled bracket (hi − lo)(2 − β) ≤ tol once hi − lo ≤ tol/2.
        if &hi - &lo <= tol_ratio {
            for s in [&hi, &lo] {
                let a = at(s)?;
                if word_at(&a, k)? == want_k {
                    return Ok(a);
                }
            }
        }
    }
    Err(Error::TargetOutOfRange(format!("no parameter matched {target} within the iteration cap")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::algebraic::root_of;

    fn w(s: &str) -> EPWord {
        s.parse().unwrap()
    }

    fn quartic_beta() -> AlgebraicReal {
        root_of(&[-1, -1, -1, 0, 1], (1, 1), (2, 1)).unwrap()
    }

    fn quintic_beta() -> AlgebraicReal {
        root_of(&[1, 1, -2, -1, -1, 1], (1, 1), (2, 1)).unwrap()
    }

    fn golden_beta() -> AlgebraicReal {
        root_of(&[-1, -1, 1], (1, 1), (2, 1)).unwrap()
    }

    fn quartic() -> Params {
        Params::exact(&quartic_beta(), |b| Ok(Scalar::one().sub(&b.mul(b).div(&b.add(&Scalar::one()))?))).unwrap()
    }

    #[test]
    fn invariants_of_examples() {
        let k = kneading_invariants(&quartic()).unwrap();
        assert_eq!(k.lower, w("0(10)"));
        assert_eq!(k.upper, w("1(0001)"));
        let g = kneading_invariants(&Params::greedy(&golden_beta()).unwrap()).unwrap();
        assert_eq!(g, KneadingPair::new(w("0(10)"), w("1(0)")));
        let q = kneading_invariants(&Params::greedy(&quintic_beta()).unwrap()).unwrap();
        assert_eq!(q.lower, w("011(100)"));
    }

    #[test]
    fn omega_membership() {
        let g = KneadingPair::new(w("(01)"), w("1(0)"));
        assert!(in_omega_plus(&w("(0)"), &g));
        assert!(!in_omega_plus(&w("(1)"), &g));
        let q = KneadingPair::new(w("(01)"), w("(1000)"));
        assert!(in_omega_plus(&w("(0001)"), &q));
    }

    #[test]
    fn validity_examples() {
        assert_eq!(validate_kneading_pair(&w("0(10)"), &w("1(0001)")).unwrap(), Validity::Valid);
        assert_eq!(
            validate_kneading_pair(&w("011(100)"), &w("100(011)")).unwrap(),
            Validity::Invalid(Condition::Cond4)
        );
        assert_eq!(validate_kneading_pair(&w("1(0001)"), &w("0(10)")).unwrap(), Validity::Invalid(Condition::Cond1));
        let (xi, zeta) = cond4_witness(&w("011(100)"), &w("100(011)"), 12).unwrap();
        assert_eq!(xi.to_string(), "011");
        assert_eq!(zeta.to_string(), "100");
        // The rotation pair needs σν ≺ ω strictly.
        assert_eq!(validate_kneading_pair(&w("(01)"), &w("(10)")).unwrap(), Validity::Invalid(Condition::Cond2));
    }

    /// Blocks of any length up to a generous bound find the same witnesses
    /// as the default bound.
    #[test]
    fn cond4_bound_agrees_with_brute_force() {
        let words: Vec<EPWord> =
            ["(01)", "0(10)", "011(100)", "(011)", "(001)", "0(110)", "01(100)", "(0101101)", "0(1001)"]
                .iter()
                .map(|s| w(s))
                .collect();
        let uppers: Vec<EPWord> =
            ["1(0)", "(1000)", "100(011)", "(100)", "(110)", "1(001)", "10(011)", "(1010010)", "(10)"]
                .iter()
                .map(|s| w(s))
                .collect();
        for lo in &words {
            for up in &uppers {
                let b = cond4_bound(lo, up);
                assert_eq!(cond4_witness(lo, up, b).is_some(), cond4_witness(lo, up, 3 * b + 8).is_some(), "{lo} {up}");
            }
        }
    }

    #[test]
    fn sft_status() {
        assert_eq!(is_sft(&quartic()).unwrap(), SftStatus::Sft);
        assert_eq!(is_sft(&Params::greedy(&quintic_beta()).unwrap()).unwrap(), SftStatus::NotSft);
        assert_eq!(is_sft(&Params::greedy(&golden_beta()).unwrap()).unwrap(), SftStatus::NotSft);
    }

    #[test]
    fn parry_roots() {
        let g = solve_parry_beta(&w("(10)")).unwrap();
        assert!(g.eq_exact(&golden_beta()));
        let q = solve_parry_beta(&w("11(100)")).unwrap();
        assert_eq!(q.poly(), &Poly::from_i64(&[1, 1, -2, -1, -1, 1]));
        // 1 = z⁻¹ + z⁻⁵ + … gives z⁴ − z³ − 1.
        let r = solve_parry_beta(&w("(1000)")).unwrap();
        assert_eq!(r.poly(), &Poly::from_i64(&[-1, 0, 0, -1, 1]));
        assert!(matches!(solve_parry_beta(&w("(01)")), Err(Error::NotAdmissible(_))));
        assert!(matches!(solve_parry_beta(&w("1(0)")), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn recover_quartic_and_golden() {
        let p = system_from_kneading_pair(&w("0(10)"), &w("1(0001)")).unwrap();
        assert!((p.beta().to_f64() - 1.4656).abs() < 5e-4);
        assert!((p.alpha().to_f64() - 0.1288).abs() < 5e-4);
        assert!(
            p.alpha().exact_eq(quartic().alpha()) || (p.alpha().to_f64() - quartic().alpha().to_f64()).abs() < 1e-15
        );
        let g = system_from_kneading_pair(&w("0(10)"), &w("1(0)")).unwrap();
        assert!((g.beta().to_f64() - 1.618_033_988_749_895).abs() < 1e-12);
        assert_eq!(g.alpha().sign().unwrap(), std::cmp::Ordering::Equal);
        assert!(matches!(system_from_kneading_pair(&w("011(100)"), &w("100(011)")), Err(Error::RoundtripMismatch(_))));
    }

    #[test]
    fn alpha_search() {
        let tol = BigRational::new(1.into(), 1_000_000.into());
        let a = search_alpha(&quartic_beta(), &w("1(0001)"), Variant::Upper, &tol).unwrap();
        assert!((a.to_f64() - quartic().alpha().to_f64()).abs() < 1e-6);
        let z = search_alpha(&golden_beta(), &w("0(10)"), Variant::Lower, &tol).unwrap();
        assert!(z.to_f64().abs() < 1e-6);
        assert!(matches!(
            search_alpha(&golden_beta(), &w("(0)"), Variant::Lower, &tol),
            Err(Error::TargetOutOfRange(_))
        ));
    }
}
