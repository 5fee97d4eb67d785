//! The greedy base u(β, α), the hole parameter, the conjugacy π̃, the sets
//! A_β and B_β, ρ, and finite-type approximation sequences.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::itinerary::{expansion, project_pi, project_prefix, Expansion, Params, Variant};
use crate::kneading::{
    in_omega_minus, in_omega_plus, kneading_invariants, solve_parry_beta, system_from_kneading_pair,
    validate_kneading_pair, KneadingPair, Validity, DEFAULT_MAX_STEPS,
};
use crate::language::{Automaton, Bound};
use crate::numerics::{AlgebraicReal, Scalar};
use crate::words::EPWord;

/// The greedy system with a hole conjugate to an intermediate map.
#[derive(Clone, Debug)]
pub struct GreedyHoleSystem {
    pub beta_prime: AlgebraicReal,
    pub greedy: Params,
    /// t = π_{β′,0}(τ⁺(0)).
    pub hole_t: Scalar,
    /// τ⁺_{β,α}(0), which is also τ⁺_{β′,0}(t).
    pub hole_word: EPWord,
    pub source: Params,
}

/// τ⁻_{β,α}(1) as a certified word.
pub fn tau_minus_one(params: &Params) -> Result<EPWord> {
    Ok(kneading_invariants(params)?.tau_minus_one())
}

/// u(β, α): the β′ with τ⁻_{β′,0}(1) = τ⁻_{β,α}(1).
pub fn greedy_base(params: &Params) -> Result<AlgebraicReal> {
    solve_parry_beta(&tau_minus_one(params)?)
}

pub fn to_hole_system(params: &Params) -> Result<GreedyHoleSystem> {
    let k = kneading_invariants(params)?;
    let beta_prime = solve_parry_beta(&k.tau_minus_one())?;
    let greedy = Params::greedy(&beta_prime)?;
    let hole_word = k.tau_plus_zero();
    let hole_t = project_pi(&greedy, &hole_word)?;
    Ok(GreedyHoleSystem { beta_prime, greedy, hole_t, hole_word, source: params.clone() })
}

/// Letters needed so that a truncated projection is within 2^-bits.
fn letters_for(beta: f64, bits: u32) -> usize {
    ((bits as f64 + 2.0) * std::f64::consts::LN_2 / beta.ln()).ceil() as usize + 2
}

impl GreedyHoleSystem {
    /// π̃(x) = π_{β′,0}(τ^±_{β,α}(x)). Exact when the expansion closes up,
    /// otherwise a truncated sum accurate to about 2^-prec.
    pub fn conjugacy_image(&self, x: &Scalar, variant: Variant, prec: u32) -> Result<Scalar> {
        let n = letters_for(self.beta_prime.to_f64(), prec);
        match expansion(&self.source, x, variant, n.max(DEFAULT_MAX_STEPS)) {
            Ok(Expansion::Exact(w)) => project_pi(&self.greedy, &w),
            Ok(Expansion::Prefix { prefix, .. }) | Err(Error::NoPeriodWithinBudget { prefix, .. }) => {
                project_prefix(&self.greedy.approx(prec), prefix.letters())
            }
            Err(e) => Err(e),
        }
    }

    /// |T^n_{β′,0}(π̃(x)) − π̃(T^n_{β,α}(x))| computed from one long expansion
    /// of x in ball arithmetic.
    pub fn equivariance_residual(&self, x: &Scalar, n: usize, prec: u32) -> Result<f64> {
        let src = self.source.approx(prec);
        let extra = letters_for(self.beta_prime.to_f64(), prec / 2);
        let len = n + extra;
        let letters = match expansion(&src, &x.approx(prec), Variant::Upper, len)? {
            Expansion::Exact(w) => w.prefix(len),
            Expansion::Prefix { prefix, .. } => prefix,
        };
        let g = self.greedy.approx(prec);
        let image = project_prefix(&g, letters.letters())?;
        let mut y = image;
        for _ in 0..n {
            y = crate::itinerary::apply_map(&g, &y, Variant::Upper)?;
        }
        let direct = project_prefix(&g, &letters.letters()[n..])?;
        Ok(y.sub(&direct).to_f64().abs())
    }
}

/// ρ = min over shifts of π_{β,0}(σⁿ τ⁻_{β,0}(1)); π is monotone, so the
/// lexicographically least shift attains it.
pub fn rho_word(beta: &AlgebraicReal) -> Result<EPWord> {
    let q = tau_minus_one(&Params::greedy(beta)?)?;
    Ok(q.shifts().into_iter().min().expect("nonempty orbit"))
}

pub fn rho_inf(beta: &AlgebraicReal) -> Result<Scalar> {
    project_pi(&Params::greedy(beta)?, &rho_word(beta)?)
}

/// ξ ⪯ σⁿξ ≺ `upper_bound` for all n.
pub fn in_e_plus_word(xi: &EPWord, upper_bound: &EPWord) -> bool {
    xi.shifts().iter().all(|s| s >= xi && s < upper_bound)
}

/// Survivor shift {ω : t_word ⪯ σⁿω ≺ τ⁻(1)} as an automaton.
pub fn survivor_automaton(t_word: &EPWord, tau_minus_one: &EPWord) -> Result<Automaton> {
    Automaton::new(vec![Bound::upper_open(t_word.clone(), tau_minus_one.clone())])
}

#[derive(Clone, Debug, Serialize)]
pub struct BReport {
    pub in_e_plus: bool,
    pub below_rho: bool,
    pub positive_entropy: bool,
}

impl BReport {
    pub fn member(&self) -> bool {
        self.in_e_plus && self.below_rho && self.positive_entropy
    }
}

/// B_β membership: ξ ∈ 𝓔⁺, π(ξ) ≤ ρ, and the survivor set above ξ still
/// has positive entropy.
pub fn membership_b(beta: &AlgebraicReal, xi: &EPWord) -> Result<BReport> {
    let greedy = Params::greedy(beta)?;
    let q = tau_minus_one(&greedy)?;
    let in_e_plus = in_e_plus_word(xi, &q);
    let rho = rho_inf(beta)?;
    let below_rho = project_pi(&greedy, xi)?.cmp_to(&rho)? != Ordering::Greater;
    let positive_entropy = survivor_automaton(xi, &q)?.has_positive_entropy();
    Ok(BReport { in_e_plus, below_rho, positive_entropy })
}

/// A_β membership: (0·τ⁻_β(1), 1·ξ) is a kneading pair.
pub fn membership_a(beta: &AlgebraicReal, xi: &EPWord) -> Result<Validity> {
    let q = tau_minus_one(&Params::greedy(beta)?)?;
    validate_kneading_pair(&q.prepend(&[0]), &xi.prepend(&[1]))
}

/// One member of a finite-type approximation sequence.
#[derive(Clone, Debug)]
pub struct ApproxStep {
    pub params: Params,
    pub pair: KneadingPair,
    /// Common prefix length with the source kneading words (minimum of both).
    pub agreement: usize,
    pub contained: bool,
}

impl ApproxStep {
    /// Hausdorff distance bound 2^{1−k} for k-letter agreement.
    pub fn distance_exponent(&self) -> i64 {
        1 - self.agreement.min(i64::MAX as usize) as i64
    }
}

/// Interval nesting [σν′, ω′] ⊆ [σν, ω] and [ν′, σω′] ⊆ [ν, σω], plus
/// the kneading words of the candidate lying in the source shift.
pub fn contained_in(candidate: &KneadingPair, source: &KneadingPair) -> bool {
    let nested = source.tau_plus_zero() <= candidate.tau_plus_zero()
        && candidate.lower <= source.lower
        && source.upper <= candidate.upper
        && candidate.tau_minus_one() <= source.tau_minus_one();
    nested && in_omega_minus(&candidate.lower, source) && in_omega_plus(&candidate.upper, source)
}

fn agreement(a: &EPWord, b: &EPWord) -> usize {
    a.agreement(b)
}

fn periodic_candidates(w: &EPWord, n: usize, fill: u8) -> Vec<EPWord> {
    let head = w.prefix(n);
    let mut alt = w.prefix(n - 1).into_vec();
    alt.push(fill);
    vec![EPWord::periodic(head.letters()), EPWord::periodic(&alt)]
}

/// Finite-type parameters whose kneading words agree with the source's on
/// at least 5k+5 letters for k = 1..=n, each symbolically contained in the
/// source shift.
pub fn sft_approx_sequence(params: &Params, n: usize) -> Result<Vec<ApproxStep>> {
    sft_approx_sequence_with(params, n, |k| 5 * k + 5, 40)
}

pub fn sft_approx_sequence_with(
    params: &Params,
    n: usize,
    target: impl Fn(usize) -> usize,
    max_extra: usize,
) -> Result<Vec<ApproxStep>> {
    let source = kneading_invariants(params)?;
    if source.is_periodic() {
        let step = ApproxStep { params: params.clone(), pair: source.clone(), agreement: usize::MAX, contained: true };
        return Ok(vec![step; n]);
    }
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let want = target(k);
        let mut found = None;
        'search: for len in want..=want + max_extra {
            for lower in periodic_candidates(&source.lower, len, 0) {
                for upper in periodic_candidates(&source.upper, len, 1) {
                    let cand = KneadingPair::new(lower.clone(), upper);
                    let agree = agreement(&cand.lower, &source.lower).min(agreement(&cand.upper, &source.upper));
                    if agree < want || !contained_in(&cand, &source) {
                        continue;
                    }
                    if validate_kneading_pair(&cand.lower, &cand.upper)? != Validity::Valid {
                        continue;
                    }
                    match system_from_kneading_pair(&cand.lower, &cand.upper) {
                        Ok(p) => {
                            found = Some(ApproxStep { params: p, pair: cand, agreement: agree, contained: true });
                            break 'search;
                        }
                        Err(Error::RoundtripMismatch(_)) | Err(Error::NoRoot { .. }) => continue,
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        out.push(found.ok_or_else(|| {
            Error::SearchExhausted(format!("no finite-type pair agreeing on {want} letters within {max_extra} extra"))
        })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::algebraic::root_of;

    fn w(s: &str) -> EPWord {
        s.parse().unwrap()
    }

    fn golden() -> AlgebraicReal {
        root_of(&[-1, -1, 1], (1, 1), (2, 1)).unwrap()
    }

    fn quintic() -> AlgebraicReal {
        root_of(&[1, 1, -2, -1, -1, 1], (1, 1), (2, 1)).unwrap()
    }

    fn quartic() -> Params {
        let b = root_of(&[-1, -1, -1, 0, 1], (1, 1), (2, 1)).unwrap();
        Params::exact(&b, |b| Ok(Scalar::one().sub(&b.mul(b).div(&b.add(&Scalar::one()))?))).unwrap()
    }

    #[test]
    fn greedy_bases() {
        assert!(greedy_base(&quartic()).unwrap().eq_exact(&golden()));
        let q = quintic();
        assert!(greedy_base(&Params::greedy(&q).unwrap()).unwrap().eq_exact(&q));
    }

    #[test]
    fn quartic_hole() {
        let h = to_hole_system(&quartic()).unwrap();
        assert_eq!(h.hole_word, w("(0001)"));
        // 1/(3G+1) in the golden field.
        let g = Scalar::from_algebraic(&golden());
        let expect = Scalar::one().div(&g.mul(&Scalar::int(3)).add(&Scalar::one())).unwrap();
        assert_eq!(h.hole_t.cmp_to(&expect).unwrap(), Ordering::Equal);
        assert!((h.hole_t.to_f64() - 0.170_820_393_249_936_9).abs() < 1e-12);
        let zero = h.conjugacy_image(&Scalar::zero(), Variant::Upper, 128).unwrap();
        assert!(zero.exact_eq(&h.hole_t));
        let g0 = to_hole_system(&Params::greedy(&quintic()).unwrap()).unwrap();
        assert_eq!(g0.hole_t.sign().unwrap(), Ordering::Equal);
    }

    #[test]
    fn equivariance_quartic() {
        let h = to_hole_system(&quartic()).unwrap();
        for (num, den) in [(1, 3), (2, 7), (5, 11), (9, 10)] {
            let r = h.equivariance_residual(&Scalar::ratio(num, den), 50, 256).unwrap();
            assert!(r < 1e-9, "x={num}/{den} residual {r}");
        }
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho_word(&quintic()).unwrap(), w("(001)"));
        assert_eq!(rho_word(&golden()).unwrap(), w("(01)"));
        // π_G((01)^∞) = 1/(G²−1) = 1/G.
        let r = rho_inf(&golden()).unwrap();
        assert!((r.to_f64() - 0.618_033_988_749_894_8).abs() < 1e-12);
    }

    #[test]
    fn counterexample_sets() {
        let q = quintic();
        let xi = w("00(011)");
        assert!(membership_b(&q, &xi).unwrap().member());
        assert_eq!(membership_a(&q, &xi).unwrap(), Validity::Invalid(crate::kneading::Condition::Cond4));
        let z = w("(0)");
        assert!(membership_b(&q, &z).unwrap().member());
        assert_eq!(membership_a(&q, &z).unwrap(), Validity::Valid);
    }

    #[test]
    fn sft_source_repeats() {
        let s = sft_approx_sequence(&quartic(), 2).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s[0].params.beta().exact_eq(quartic().beta()));
    }
}
