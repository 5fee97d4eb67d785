//! Survivor sets of the open system with hole [0, t): membership, word
//! counts, the bifurcation set E⁺, the critical hole and the dimension
//! function η computed two ways.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::itinerary::{expansion, orbit, project_pi, Expansion, Params, Variant};
use crate::kneading::{kneading_invariants, system_from_kneading_pair, KneadingPair};
use crate::language::{Automaton, Bound, Semantics};
use crate::numerics::{max_real_root_in, AlgebraicReal, Poly, Scalar};
use crate::par::par_map;
use crate::words::{EPWord, FiniteWord};

/// Search budgets for survivor computations.
#[derive(Clone, Debug)]
pub struct SurvivorConfig {
    /// Longest gap word ξ (first escape time) searched when locating t*.
    pub lyndon_bound: usize,
    /// Prefix length of τ⁺(t) used as a lower bound when τ⁺(t) does not close.
    pub prefix_len: usize,
    /// Depth of the counting estimate.
    pub depth: usize,
    /// Bisection steps for the critical hole fallback.
    pub bisection_steps: usize,
}

impl Default for SurvivorConfig {
    fn default() -> Self {
        SurvivorConfig { lyndon_bound: 64, prefix_len: 64, depth: 30, bisection_steps: 40 }
    }
}

/// Membership of t in E⁺.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EPlus {
    /// Certified by an exact word all of whose shifts stay in [word, τ⁻(1)].
    Yes {
        witness: EPWord,
    },
    /// T^step(t) < t.
    No {
        step: usize,
    },
    Unknown {
        depth: usize,
    },
}

impl fmt::Display for EPlus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EPlus::Yes { .. } => write!(f, "YES"),
            EPlus::No { step } => write!(f, "NO({step})"),
            EPlus::Unknown { depth } => write!(f, "UNKNOWN({depth})"),
        }
    }
}

/// A hole [0, t) with its upper expansion.
#[derive(Clone, Debug)]
pub struct HoleSpec {
    pub params: Params,
    pub t: Scalar,
    pub t_word: Expansion,
    pub in_e_plus: EPlus,
}

impl HoleSpec {
    /// The hole whose upper expansion is `w`, t = π(w).
    pub fn from_word(params: &Params, w: &EPWord) -> Result<HoleSpec> {
        let t = project_pi(params, w)?;
        let q = kneading_invariants(params)?.tau_minus_one();
        let in_e_plus = if in_e_plus_closed(w, &q) {
            EPlus::Yes { witness: w.clone() }
        } else {
            let step = (1..=w.orbit_len()).find(|&n| w.shift(n) < *w).unwrap_or(0);
            EPlus::No { step }
        };
        Ok(HoleSpec { params: params.clone(), t, t_word: Expansion::Exact(w.clone()), in_e_plus })
    }

    /// τ⁺(t) as an exact lower bound: the word itself, or prefix·0^∞.
    pub fn lower_word(&self) -> EPWord {
        match &self.t_word {
            Expansion::Exact(w) => w.clone(),
            Expansion::Prefix { prefix, .. } => EPWord::new(prefix.letters(), &[0]),
        }
    }
}

/// ξ ⪯ σⁿξ ⪯ q for every n.
fn in_e_plus_closed(xi: &EPWord, q: &EPWord) -> bool {
    xi.shifts().iter().all(|s| s >= xi && s <= q)
}

fn check_t(t: &Scalar) -> Result<()> {
    if t.sign()? == Ordering::Less || t.cmp_to(&Scalar::one())? != Ordering::Less {
        return Err(Error::InvalidParams(format!("hole parameter {t} outside [0, 1)")));
    }
    Ok(())
}

/// Decide t ∈ E⁺ to the given depth. The upper orbit is checked first; if it
/// escapes, an exact lower expansion that never drops below itself still
/// certifies t (this is how the golden critical hole G⁻² qualifies).
pub fn in_bifurcation_set(params: &Params, t: &Scalar, depth: usize) -> Result<HoleSpec> {
    check_t(t)?;
    let q = kneading_invariants(params)?.tau_minus_one();
    let o = orbit(params, t, Variant::Upper, depth)?;
    let t_word = match o.cycle {
        Some((m, len)) if !o.probable => {
            let l = o.letters.letters();
            Expansion::Exact(EPWord::new(&l[..m], &l[m..m + len]))
        }
        _ => Expansion::Prefix { prefix: o.letters.clone(), probable_period: o.cycle },
    };
    let mut escape = None;
    for (n, x) in o.points.iter().enumerate().skip(1) {
        if x.lt(t)? {
            escape = Some(n);
            break;
        }
    }
    let in_e_plus = match (escape, &t_word) {
        (None, Expansion::Exact(w)) => EPlus::Yes { witness: w.clone() },
        (None, Expansion::Prefix { .. }) => EPlus::Unknown { depth },
        (Some(step), _) => match expansion(params, t, Variant::Lower, depth) {
            Ok(Expansion::Exact(w)) if in_e_plus_closed(&w, &q) => EPlus::Yes { witness: w },
            _ => EPlus::No { step },
        },
    };
    Ok(HoleSpec { params: params.clone(), t: t.clone(), t_word, in_e_plus })
}

/// ω ∈ 𝓚⁺(t): τ⁺(t) ⪯ σⁿω ≺ τ⁻(1) for all n.
pub fn survivor_member(hole: &HoleSpec, w: &EPWord) -> Result<bool> {
    let q = kneading_invariants(&hole.params)?.tau_minus_one();
    let lo = hole.lower_word();
    Ok(w.shifts().iter().all(|s| *s >= lo && *s < q))
}

/// Follower automaton of 𝓚⁺ for the lower bound `lo`; the bound is raised
/// to τ⁺(0) when a truncated prefix falls below it.
pub fn survivor_automaton(pair: &KneadingPair, lo: &EPWord) -> Result<Automaton> {
    let z = pair.tau_plus_zero();
    let lo = if *lo < z { z } else { lo.clone() };
    Automaton::new(vec![Bound::upper_open(lo, pair.tau_minus_one())])
}

/// |𝓚⁺(t)|_n by path counting in the follower automaton.
pub fn count_survivor_words(hole: &HoleSpec, n: usize) -> Result<u128> {
    let pair = kneading_invariants(&hole.params)?;
    Ok(survivor_automaton(&pair, &hole.lower_word())?.count(n, Semantics::Exact))
}

/// Prefix counts (|𝓚⁰(t)|_k, |𝓚⁺(t)|_k) where 𝓚⁰ = 𝓚 \ 𝓚⁺ collects the
/// words that land exactly on τ⁺(0) after surviving. Explicit enumeration;
/// intended for k ≤ 16.
pub fn k_zero_counts(hole: &HoleSpec, k: usize) -> Result<(u128, u128)> {
    let lo = match &hole.t_word {
        Expansion::Exact(w) => w.clone(),
        Expansion::Prefix { .. } => return Err(Error::InvalidParams("the 𝓚⁰ count needs an exact hole word".into())),
    };
    let pair = kneading_invariants(&hole.params)?;
    let z = pair.tau_plus_zero();
    let q = pair.tau_minus_one();
    let a = Automaton::new(vec![Bound::upper_open(lo.clone(), q.clone())])?;
    let k_plus = a.count(k, Semantics::Exact);
    let tail_ok = (1..=z.orbit_len()).all(|j| {
        let s = z.shift(j);
        s == z || (s >= lo && s < q)
    });
    if !tail_ok {
        return Ok((0, k_plus));
    }
    let good: Vec<bool> = (0..a.num_states()).map(|s| a.survives_tail(s, &z)).collect();
    let ok = a.coreach(&good);
    let zl = z.prefix(k);
    let mut words: HashSet<Vec<u8>> = HashSet::new();
    for bits in 0u64..(1u64 << k) {
        let u: Vec<u8> = (0..k).map(|i| ((bits >> (k - 1 - i)) & 1) as u8).collect();
        // The landing time is at least k.
        if a.state_after(&u).is_some_and(|s| ok[s]) {
            words.insert(u);
            continue;
        }
        // The landing time j < k: u = v · τ⁺(0)|_{k−j}.
        let hit = (0..k).any(|j| u[j..] == zl.letters()[..k - j] && a.state_after(&u[..j]).is_some_and(|s| good[s]));
        if hit {
            words.insert(u);
        }
    }
    Ok((words.len() as u128, k_plus))
}

/// The survivor plateau containing t: 𝓚⁺(t) = 𝓚⁺(t*) where the word of t*
/// is the least element of 𝓚⁺(t).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plateau {
    /// τ⁺(t*); `None` when the survivor set is empty.
    pub word: Option<EPWord>,
    /// The word ξ = τ⁺(t)|_N read up to the first escape time N.
    pub gap: Option<FiniteWord>,
    pub positive_entropy: bool,
}

impl Plateau {
    /// Identifier used in sweep tables.
    pub fn id(&self) -> String {
        match &self.word {
            Some(w) => w.to_string(),
            None => "EMPTY".into(),
        }
    }
}

/// Locate t* = inf{s ∈ E⁺ : s ≥ t}. If T^N(t) < t first at N, then
/// ξ0^∞ ⪯ τ⁺(t) ≺ ξ^∞ for ξ = τ⁺(t)|_N, and every element of 𝓚⁺(ξ0^∞) has
/// all shifts above its least element m ⪰ ξ^∞, so the three survivor sets
/// coincide and τ⁺(t*) = m.
pub fn plateau(params: &Params, t: &Scalar, cfg: &SurvivorConfig) -> Result<Plateau> {
    check_t(t)?;
    let pair = kneading_invariants(params)?;
    let o = orbit(params, t, Variant::Upper, cfg.lyndon_bound)?;
    let mut escape = None;
    for (n, x) in o.points.iter().enumerate().skip(1) {
        if x.lt(t)? {
            escape = Some(n);
            break;
        }
    }
    let (lo, gap) = match (escape, o.cycle) {
        (Some(n), _) => {
            let xi = o.letters.prefix(n);
            (EPWord::new(xi.letters(), &[0]), Some(xi))
        }
        (None, Some((m, len))) if !o.probable => {
            let l = o.letters.letters();
            (EPWord::new(&l[..m], &l[m..m + len]), None)
        }
        _ => return Err(Error::EPlusSearchExhausted { bound: cfg.lyndon_bound }),
    };
    let a = survivor_automaton(&pair, &lo)?;
    let word = a.least_word(Semantics::Exact);
    Ok(Plateau { word, gap, positive_entropy: a.has_positive_entropy() })
}

/// Method A result.
#[derive(Clone, Debug)]
pub struct EtaKneading {
    pub eta: f64,
    pub plateau: Plateau,
    /// (β″, α″) whose kneading pair is (0·τ⁻(1), 1·τ⁺(t*)).
    pub system: Option<Params>,
}

impl EtaKneading {
    pub fn beta2(&self) -> Option<&AlgebraicReal> {
        self.system.as_ref().and_then(Params::beta_real)
    }
}

fn ln_beta(params: &Params) -> f64 {
    params.beta().to_f64().ln()
}

/// η for a located plateau: 1 at t* = 0, 0 without entropy, otherwise
/// log β″ / log β.
pub fn eta_for_plateau(params: &Params, plateau: Plateau) -> Result<EtaKneading> {
    let pair = kneading_invariants(params)?;
    let m = match (&plateau.word, plateau.positive_entropy) {
        (Some(m), true) => m.clone(),
        _ => return Ok(EtaKneading { eta: 0.0, plateau, system: None }),
    };
    if m == pair.tau_plus_zero() {
        return Ok(EtaKneading { eta: 1.0, plateau, system: Some(params.clone()) });
    }
    let system = system_from_kneading_pair(&pair.lower, &m.prepend(&[1]))?;
    let eta = ln_beta(&system) / ln_beta(params);
    Ok(EtaKneading { eta, plateau, system: Some(system) })
}

/// η(t) by the kneading method.
pub fn eta_kneading(params: &Params, t: &Scalar, cfg: &SurvivorConfig) -> Result<EtaKneading> {
    eta_for_plateau(params, plateau(params, t, cfg)?)
}

/// η(t) = dim_H K⁺(t), method A.
pub fn eta(params: &Params, t: &Scalar) -> Result<f64> {
    Ok(eta_kneading(params, t, &SurvivorConfig::default())?.eta)
}

/// Lower bound word for counting: τ⁺(t) when it closes, else its prefix
/// followed by 0^∞.
fn counting_lower(params: &Params, t: &Scalar, prefix_len: usize) -> Result<EPWord> {
    let o = orbit(params, t, Variant::Upper, prefix_len)?;
    Ok(match o.cycle {
        Some((m, len)) if !o.probable => {
            let l = o.letters.letters();
            EPWord::new(&l[..m], &l[m..m + len])
        }
        _ => EPWord::new(o.letters.letters(), &[0]),
    })
}

/// Least monic polynomial P (constant first) with P(A)·f₀ = 0, found from the
/// vectors f_k = A^k f₀ by exact elimination; `None` if its degree exceeds
/// the number of vectors supplied minus one.
pub fn krylov_polynomial(vectors: &[Vec<u128>]) -> Option<Vec<BigRational>> {
    struct Row {
        pivot: usize,
        r: Vec<BigRational>,
        e: Vec<BigRational>,
    }
    let mut basis: Vec<Row> = Vec::new();
    for (l, f) in vectors.iter().enumerate() {
        let mut r: Vec<BigRational> = f.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
        let mut e = vec![BigRational::zero(); l + 1];
        e[l] = BigRational::one();
        for b in &basis {
            if r[b.pivot].is_zero() {
                continue;
            }
            let k = &r[b.pivot] / &b.r[b.pivot];
            for (x, y) in r.iter_mut().zip(&b.r) {
                *x -= &k * y;
            }
            for (x, y) in e.iter_mut().zip(&b.e) {
                *x -= &k * y;
            }
        }
        match r.iter().position(|x| !x.is_zero()) {
            None => return Some(e),
            Some(pivot) => basis.push(Row { pivot, r, e }),
        }
    }
    None
}

/// Growth rate of the follower counts: the largest real root of the Krylov
/// polynomial, or `None` when depth does not determine it.
pub fn follower_growth(follower: &[Vec<u128>]) -> Option<f64> {
    let e = krylov_polynomial(follower)?;
    let den = e.iter().fold(BigInt::one(), |acc, q| num_integer::Integer::lcm(&acc, q.denom()));
    let poly = Poly::new(e.iter().map(|q| (q * BigRational::from_integer(den.clone())).to_integer()).collect());
    let one = BigRational::one();
    let top = BigRational::from_integer(BigInt::from(3));
    Some(max_real_root_in(&poly, &one, &top).map_or(1.0, |r| r.to_f64()))
}

/// η(t) by counting survivor words to the given depth: log of the growth
/// rate of the word counts, divided by log β. The follower counts of every
/// automaton state up to `depth` determine the growth rate exactly when they
/// span at most `depth` dimensions; otherwise per-component path-count
/// ratios at `depth` are used.
pub fn eta_counting(params: &Params, t: &Scalar, depth: usize, cfg: &SurvivorConfig) -> Result<f64> {
    check_t(t)?;
    let pair = kneading_invariants(params)?;
    let a = survivor_automaton(&pair, &counting_lower(params, t, cfg.prefix_len)?)?;
    let h = match follower_growth(&a.follower_counts(depth, Semantics::Exact)) {
        Some(g) if g > 1.0 => g.ln(),
        Some(_) => 0.0,
        None => a.entropy_estimate(depth, Semantics::Exact),
    };
    Ok(h / ln_beta(params))
}

/// Naive counting estimate log|𝓚⁺(t)|_n / (n log β).
pub fn eta_counting_naive(params: &Params, t: &Scalar, depth: usize, cfg: &SurvivorConfig) -> Result<f64> {
    check_t(t)?;
    let pair = kneading_invariants(params)?;
    let a = survivor_automaton(&pair, &counting_lower(params, t, cfg.prefix_len)?)?;
    Ok(a.entropy_naive(depth, Semantics::Exact) / ln_beta(params))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HoleMethod {
    /// π(00(10)^∞), valid when τ⁻(1) = (10)^∞.
    ClosedForm,
    Bisection,
}

#[derive(Clone, Debug)]
pub struct CriticalHole {
    pub t: Scalar,
    pub method: HoleMethod,
}

/// The critical hole t_c: η > 0 on [0, t_c) and η = 0 on [t_c, 1).
pub fn critical_hole(params: &Params) -> Result<CriticalHole> {
    let pair = kneading_invariants(params)?;
    if pair.tau_minus_one() == EPWord::periodic(&[1, 0]) {
        let t = project_pi(params, &EPWord::new(&[0, 0], &[1, 0]))?;
        return Ok(CriticalHole { t, method: HoleMethod::ClosedForm });
    }
    critical_hole_bisection(params, &SurvivorConfig::default())
}

/// Bisection on positivity of survivor entropy.
pub fn critical_hole_bisection(params: &Params, cfg: &SurvivorConfig) -> Result<CriticalHole> {
    let pair = kneading_invariants(params)?;
    let positive = |t: &BigRational| -> Result<bool> {
        let lo = counting_lower(params, &Scalar::rational(t.clone()), cfg.prefix_len)?;
        Ok(survivor_automaton(&pair, &lo)?.has_positive_entropy())
    };
    let mut lo = BigRational::zero();
    let mut hi = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    for _ in 0..cfg.bisection_steps {
        let mid = (&lo + &hi) / &two;
        if positive(&mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalHole { t: Scalar::rational((lo + hi) / two), method: HoleMethod::Bisection })
}

/// One row of a dimension sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub t: BigRational,
    pub eta_kneading: Option<f64>,
    pub eta_counting: Option<f64>,
    pub beta2_minpoly: Option<String>,
    pub alpha2: Option<f64>,
    pub plateau: String,
}

pub const SWEEP_HEADER: &str = "t,eta_kneading,eta_counting,beta2_minpoly,alpha2,plateau";

/// Sample points t_i = t_max · i/(samples − 1).
pub fn sweep_points(samples: usize, t_max: &BigRational) -> Vec<BigRational> {
    let d = BigInt::from(samples.max(2) - 1);
    (0..samples).map(|i| t_max * BigRational::new(BigInt::from(i), d.clone())).collect()
}

/// η by both methods on an evenly spaced grid of [0, t_max]. Per-sample
/// errors are recorded in the row and the sweep continues.
pub fn dimension_sweep(
    params: &Params,
    samples: usize,
    t_max: &BigRational,
    cfg: &SurvivorConfig,
) -> Result<Vec<SweepRow>> {
    if samples < 2 {
        return Err(Error::InvalidParams("a sweep needs at least 2 samples".into()));
    }
    kneading_invariants(params)?;
    let ts = sweep_points(samples, t_max);
    let plateaus = par_map(&ts, |t| plateau(params, &Scalar::rational(t.clone()), cfg));
    // Solve each distinct plateau once.
    let mut distinct: Vec<Plateau> = Vec::new();
    for p in plateaus.iter().flatten() {
        if !distinct.contains(p) {
            distinct.push(p.clone());
        }
    }
    let solved = par_map(&distinct, |p| eta_for_plateau(params, p.clone()));
    let by_plateau: HashMap<String, &Result<EtaKneading>> =
        distinct.iter().map(Plateau::id).zip(solved.iter()).collect();
    let counting = par_map(&ts, |t| eta_counting(params, &Scalar::rational(t.clone()), cfg.depth, cfg));
    let mut rows = Vec::with_capacity(samples);
    for ((t, p), c) in ts.into_iter().zip(plateaus).zip(counting) {
        let mut row = SweepRow {
            t,
            eta_kneading: None,
            eta_counting: c.ok(),
            beta2_minpoly: None,
            alpha2: None,
            plateau: String::new(),
        };
        match p {
            Err(e) => row.plateau = format!("ERR:{}", e.code()),
            Ok(p) => match by_plateau[&p.id()] {
                Err(e) => row.plateau = format!("ERR:{}", e.code()),
                Ok(k) => {
                    row.eta_kneading = Some(k.eta);
                    if let Some(s) = &k.system {
                        row.beta2_minpoly = s.beta_real().map(|b| b.poly().to_string());
                        row.alpha2 = Some(s.alpha().to_f64());
                    }
                    row.plateau = p.id();
                }
            },
        }
        rows.push(row);
    }
    Ok(rows)
}

fn fmt_opt(x: Option<f64>, places: usize) -> String {
    x.map_or(String::new(), |v| format!("{v:.places$}"))
}

fn fmt_rational(q: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10).pow(places as u32);
    let n = (q * BigRational::from_integer(scale.clone())).round().to_integer();
    let (sign, n) = if n < BigInt::zero() { ("-", -n) } else { ("", n) };
    let int = &n / &scale;
    let frac = (&n % &scale).to_string();
    format!("{sign}{int}.{}{frac}", "0".repeat(places - frac.len()))
}

/// CSV with the fixed header; floats at fixed decimal places so output is
/// byte-stable.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_rational(&r.t, 10),
            fmt_opt(r.eta_kneading, 9),
            fmt_opt(r.eta_counting, 9),
            r.beta2_minpoly.clone().unwrap_or_default(),
            fmt_opt(r.alpha2, 12),
            r.plateau
        ));
    }
    out
}
