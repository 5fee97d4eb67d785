//! Finite-depth certificates for the geometric condition H_{x,γ}: cylinder
//! length bounds, the ratio decay and the separation of comparable pairs.
//!
//! Words are over the cell alphabet of the Markov partition. For a system
//! whose dominant component has cyclic period n > 1 the same checks run for
//! T^n on each cyclic class, with blocks of n cells as letters.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::itinerary::{expansion_word, orbit, Params, Variant};
use crate::numerics::Scalar;
use crate::par::par_map;
use crate::sft::{compile_markov, SftSystem, Transitivity};
use crate::words::EPWord;

/// Shifts i* < i ≤ i* + DISTANCE_WINDOW are checked for the separation condition.
pub const DISTANCE_WINDOW: usize = 3;
/// Orbit budget for the cell itinerary of x.
pub const ITINERARY_STEPS: usize = 4096;

const F64_MARGIN: f64 = 1e-9;

/// Eventually periodic word over cell indices. An empty period means only
/// the prefix `pre` is known.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellWord {
    pub pre: Vec<usize>,
    pub per: Vec<usize>,
}

impl CellWord {
    pub fn get(&self, i: usize) -> Option<usize> {
        if i < self.pre.len() {
            Some(self.pre[i])
        } else if self.per.is_empty() {
            None
        } else {
            Some(self.per[(i - self.pre.len()) % self.per.len()])
        }
    }

    pub fn prefix(&self, n: usize) -> Option<Vec<usize>> {
        (0..n).map(|i| self.get(i)).collect()
    }

    pub fn is_exact(&self) -> bool {
        !self.per.is_empty()
    }

    pub fn is_periodic(&self) -> bool {
        self.pre.is_empty() && !self.per.is_empty()
    }

    pub fn shift(&self, k: usize) -> CellWord {
        if k <= self.pre.len() {
            return CellWord { pre: self.pre[k..].to_vec(), per: self.per.clone() };
        }
        if self.per.is_empty() {
            return CellWord { pre: Vec::new(), per: Vec::new() };
        }
        let r = (k - self.pre.len()) % self.per.len();
        let mut per = self.per[r..].to_vec();
        per.extend_from_slice(&self.per[..r]);
        CellWord { pre: Vec::new(), per }
    }

    /// Length of the common prefix of σ^k ω and ω; `None` when they agree
    /// forever or the known prefix runs out first.
    pub fn self_agreement(&self, k: usize) -> Option<usize> {
        let bound = if self.is_exact() { self.pre.len() + k + self.per.len() } else { usize::MAX };
        let mut j = 0;
        loop {
            if j >= bound {
                return None;
            }
            match (self.get(k + j), self.get(j)) {
                (Some(a), Some(b)) if a == b => j += 1,
                (Some(_), Some(_)) => return Some(j),
                _ => return None,
            }
        }
    }
}

impl std::fmt::Display for CellWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[usize]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
        if self.per.is_empty() {
            write!(f, "{} …", join(&self.pre))
        } else if self.pre.is_empty() {
            write!(f, "({})", join(&self.per))
        } else {
            write!(f, "{} ({})", join(&self.pre), join(&self.per))
        }
    }
}

/// Index of the cell [a_i, a_{i+1}) containing x (the last cell is closed).
pub fn cell_of(s: &SftSystem, x: &Scalar) -> Result<usize> {
    let n = s.num_cells();
    if x.lt(&s.points[0])? || s.points[n].lt(x)? {
        return Err(Error::InvalidParams(format!("{} lies outside [0,1]", x.to_f64())));
    }
    let (mut lo, mut hi) = (0usize, n);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if x.lt(&s.points[mid])? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// Symbolic representation of x with respect to the partition, following
/// the upper map.
pub fn cell_itinerary(s: &SftSystem, x: &Scalar, max_steps: usize) -> Result<CellWord> {
    let o = orbit(&s.params, x, Variant::Upper, max_steps)?;
    let cells = o.points.iter().map(|p| cell_of(s, p)).collect::<Result<Vec<_>>>()?;
    for (c, &b) in cells.iter().zip(o.letters.letters()) {
        if s.letters[*c] != b {
            return Err(Error::MarkovViolation(format!(
                "cell {c} carries letter {} but the orbit reads {b}",
                s.letters[*c]
            )));
        }
    }
    match o.cycle {
        Some((entry, len)) if !o.probable => {
            Ok(CellWord { pre: cells[..entry].to_vec(), per: cells[entry..entry + len].to_vec() })
        }
        _ => Ok(CellWord { pre: cells, per: Vec::new() }),
    }
}

pub fn mixing_time(s: &SftSystem) -> Result<usize> {
    s.mixing_time()
}

/// Exact interval with a float shadow for quick filtering.
#[derive(Clone, Debug)]
struct Iv {
    lo: Scalar,
    hi: Scalar,
    len: Scalar,
    lo_f: f64,
    hi_f: f64,
    len_f: f64,
}

impl Iv {
    fn new((lo, hi): (Scalar, Scalar)) -> Iv {
        let len = hi.sub(&lo);
        Iv { lo_f: lo.to_f64(), hi_f: hi.to_f64(), len_f: len.to_f64(), lo, hi, len }
    }
}

/// a ≥ b, deciding by floats unless they are too close to call.
fn ge(a: &Scalar, af: f64, b: &Scalar, bf: f64) -> Result<bool> {
    let scale = af.abs().max(bf.abs()).max(1e-300);
    if (af - bf) / scale > F64_MARGIN {
        Ok(true)
    } else if (bf - af) / scale > F64_MARGIN {
        Ok(false)
    } else {
        b.le(a)
    }
}

/// Distance between two intervals (0 when they touch or overlap).
fn distance(a: &Iv, b: &Iv) -> Result<(Scalar, f64)> {
    let (first, second) = if a.lo_f <= b.lo_f { (a, b) } else { (b, a) };
    let gap_f = second.lo_f - first.hi_f;
    if gap_f > F64_MARGIN {
        return Ok((second.lo.sub(&first.hi), gap_f));
    }
    if gap_f < -F64_MARGIN {
        return Ok((Scalar::zero(), 0.0));
    }
    // Too close for floats: decide both orientations exactly.
    let g1 = b.lo.sub(&a.hi);
    let g2 = a.lo.sub(&b.hi);
    for g in [g1, g2] {
        if g.sign()? == Ordering::Greater {
            let f = g.to_f64();
            return Ok((g, f));
        }
    }
    Ok((Scalar::zero(), 0.0))
}

/// Letters of T^step: admissible cell words of length `step`, starting in a
/// fixed cyclic class and staying inside the allowed cells.
#[derive(Clone, Debug)]
struct Geometry<'a> {
    s: &'a SftSystem,
    step: usize,
    allowed: Vec<bool>,
    starts: Vec<bool>,
    beta_step: Scalar,
    rho: Scalar,
}

impl<'a> Geometry<'a> {
    fn new(s: &'a SftSystem, step: usize, allowed: Vec<bool>, starts: Vec<bool>) -> Result<Geometry<'a>> {
        let mut g =
            Geometry { s, step, allowed, starts, beta_step: s.params.beta().pow(step as i64)?, rho: Scalar::zero() };
        let mut rho: Option<Scalar> = None;
        for w in g.words(1) {
            let len = Iv::new(s.cylinder(&w)?).len;
            if rho.as_ref().map_or(Ok(true), |r| len.lt(r))? {
                rho = Some(len);
            }
        }
        g.rho = rho.ok_or(Error::NotTransitive)?;
        Ok(g)
    }

    fn can_follow(&self, a: usize, b: usize) -> bool {
        self.allowed[b] && self.s.adjacency[a][b] == 1
    }

    /// All words of `blocks` letters of T^step.
    fn words(&self, blocks: usize) -> Vec<Vec<usize>> {
        let n = blocks * self.step;
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> =
            (0..self.s.num_cells()).filter(|&c| self.starts[c] && self.allowed[c]).map(|c| vec![c]).collect();
        while let Some(w) = stack.pop() {
            if w.len() == n {
                out.push(w);
                continue;
            }
            let last = *w.last().unwrap();
            for c in (0..self.s.num_cells()).rev() {
                if self.can_follow(last, c) {
                    let mut v = w.clone();
                    v.push(c);
                    stack.push(v);
                }
            }
        }
        out
    }

    fn all_words(&self, depth: usize) -> Vec<Vec<usize>> {
        (1..=depth).flat_map(|k| self.words(k)).collect()
    }

    fn admissible(&self, w: &[usize]) -> bool {
        w.iter().all(|&c| self.allowed[c]) && self.s.is_admissible(w)
    }

    fn concat(&self, u: &[usize], tail: &[usize]) -> Option<Vec<usize>> {
        let mut w = u.to_vec();
        w.extend_from_slice(tail);
        self.admissible(&w).then_some(w)
    }

    fn cylinder(&self, w: &[usize]) -> Result<Iv> {
        Ok(Iv::new(self.s.cylinder(w)?))
    }

    /// Least j with every class-to-class block path of length j present.
    fn mixing_time(&self) -> Result<usize> {
        let k = self.s.num_cells();
        let class: Vec<usize> = (0..k).filter(|&c| self.starts[c] && self.allowed[c]).collect();
        let mut reach = vec![vec![false; k]; k];
        for &a in &class {
            let mut cur = vec![false; k];
            cur[a] = true;
            for _ in 0..self.step {
                let mut next = vec![false; k];
                for i in (0..k).filter(|&i| cur[i]) {
                    for j in 0..k {
                        if self.can_follow(i, j) {
                            next[j] = true;
                        }
                    }
                }
                cur = next;
            }
            reach[a] = cur;
        }
        let mut p: Vec<Vec<bool>> = class.iter().map(|&a| class.iter().map(|&b| reach[a][b]).collect()).collect();
        let base = p.clone();
        let n = class.len();
        for m in 1..=(n * n + 1) {
            if p.iter().all(|r| r.iter().all(|&x| x)) {
                return Ok(m);
            }
            let mut q = vec![vec![false; n]; n];
            for i in 0..n {
                for l in (0..n).filter(|&l| p[i][l]) {
                    for j in 0..n {
                        q[i][j] |= base[l][j];
                    }
                }
            }
            p = q;
        }
        Err(Error::NotTransitive)
    }

    /// The letter of σ^{k·step} ω at block position j, as a cell slice.
    fn block(&self, omega: &CellWord, j: usize) -> Option<Vec<usize>> {
        (j * self.step..(j + 1) * self.step).map(|i| omega.get(i)).collect()
    }

    fn block_agreement(&self, omega: &CellWord, k: usize) -> Option<usize> {
        let mut j = 0;
        let bound = if omega.is_exact() {
            (omega.pre.len() + omega.per.len()) / self.step + k + omega.per.len() + 2
        } else {
            usize::MAX
        };
        while j < bound {
            match (self.block(omega, k + j), self.block(omega, j)) {
                (Some(a), Some(b)) if a == b => j += 1,
                (Some(_), Some(_)) => return Some(j),
                _ => return None,
            }
        }
        None
    }

    /// Block-level period of a purely periodic ω.
    fn block_period(&self, omega: &CellWord) -> Option<usize> {
        if !omega.is_periodic() {
            return None;
        }
        let p = omega.per.len();
        let g = num_integer::gcd(p, self.step);
        Some(p / g)
    }
}

/// ⌈log(4/(γρ)) / log β_step⌉ with β_step = β^step.
fn comparability_window(gamma: &BigRational, rho: f64, beta_step: f64) -> usize {
    let g = gamma.to_f64().unwrap_or(0.5);
    let k = ((4.0 / (g * rho)).ln() / beta_step.ln()).ceil();
    if k.is_finite() && k > 0.0 {
        k as usize
    } else {
        0
    }
}

fn agreement_bound(g: &Geometry, omega: &CellWord, k0: usize) -> Result<usize> {
    let shifts: Vec<usize> = match g.block_period(omega) {
        Some(p) => (1..p).collect(),
        None if omega.is_exact() => {
            let window = omega.pre.len().div_ceil(g.step) + omega.per.len();
            (1..=k0.max(window)).collect()
        }
        None => (1..=k0).collect(),
    };
    let mut big_m = 0;
    for k in shifts {
        let a = g.block_agreement(omega, k).ok_or_else(|| Error::NoPeriodWithinBudget {
            steps: ITINERARY_STEPS,
            prefix: crate::words::FiniteWord::empty(),
        })?;
        big_m = big_m.max(a);
    }
    Ok(big_m)
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub i: usize,
    pub extendable: usize,
    pub sup_ratio: f64,
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub depth: usize,
    pub rows: Vec<RatioRow>,
    pub nonincreasing: bool,
    pub pass: bool,
}

fn ratio_condition(g: &Geometry, omega: &CellWord, depth: usize) -> Result<RatioReport> {
    let us = g.all_words(depth);
    let parents = us.iter().map(|u| g.cylinder(u)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut sups: Vec<Scalar> = Vec::new();
    let bscale = g.beta_step.inv()?;
    for i in 0..=depth {
        let tail = omega
            .prefix(i * g.step)
            .ok_or(Error::NoPeriodWithinBudget { steps: ITINERARY_STEPS, prefix: crate::words::FiniteWord::empty() })?;
        let mut sup: Option<Scalar> = None;
        let mut count = 0;
        for (u, iu) in us.iter().zip(&parents) {
            let Some(w) = g.concat(u, &tail) else { continue };
            count += 1;
            let r = g.cylinder(&w)?.len.div(&iu.len)?;
            if sup.as_ref().map_or(Ok(true), |s| s.lt(&r))? {
                sup = Some(r);
            }
        }
        let sup = sup.unwrap_or_else(Scalar::zero);
        let bound = bscale.pow(i as i64)?.div(&g.rho)?;
        rows.push(RatioRow {
            i,
            extendable: count,
            sup_ratio: sup.to_f64(),
            bound: bound.to_f64(),
            within_bound: sup.le(&bound)?,
        });
        sups.push(sup);
    }
    let mut nonincreasing = true;
    for w in sups.windows(2) {
        nonincreasing &= w[1].le(&w[0])?;
    }
    let pass = nonincreasing && rows.iter().all(|r| r.within_bound);
    Ok(RatioReport { depth, rows, nonincreasing, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    pub gamma: String,
    pub depth: usize,
    pub k0: usize,
    pub mixing_time_m: usize,
    #[serde(rename = "M")]
    pub big_m: usize,
    pub i_star: usize,
    pub c: f64,
    pub i_values: Vec<usize>,
    pub pairs_checked: usize,
    pub prefix_pairs: usize,
    pub zero_distance: usize,
    /// min dist(I(νω|_i), I(ηω|_i)) / dist(I(ν), I(η)) over separated pairs.
    pub worst_ratio: Option<f64>,
    /// min dist(I(νω|_i), I(ηω|_i)) / min(|I(ν)|, |I(η)|) over separated pairs.
    pub worst_length_ratio: Option<f64>,
    pub violations: usize,
    pub pass: bool,
}

#[derive(Default)]
struct PairTally {
    pairs: usize,
    prefix_pairs: usize,
    zero: usize,
    worst_ratio: Option<f64>,
    worst_length: Option<f64>,
    violations: usize,
}

impl PairTally {
    fn merge(mut self, o: PairTally) -> PairTally {
        let min = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        self.pairs += o.pairs;
        self.prefix_pairs += o.prefix_pairs;
        self.zero += o.zero;
        self.worst_ratio = min(self.worst_ratio, o.worst_ratio);
        self.worst_length = min(self.worst_length, o.worst_length);
        self.violations += o.violations;
        self
    }
}

struct Extended {
    word: Vec<usize>,
    parent: Iv,
    child: Iv,
}

fn comparable(a: &Iv, b: &Iv, gamma: &Scalar, gamma_f: f64) -> Result<bool> {
    let four = Scalar::int(4);
    // γ|I(a)| ≤ 4|I(b)| and γ|I(b)| ≤ 4|I(a)|
    let ga = gamma.mul(&a.len);
    let gb = gamma.mul(&b.len);
    Ok(ge(&four.mul(&b.len), 4.0 * b.len_f, &ga, gamma_f * a.len_f)?
        && ge(&four.mul(&a.len), 4.0 * a.len_f, &gb, gamma_f * b.len_f)?)
}

fn check_pairs(items: &[Extended], first: usize, gamma: &Scalar, c: &Scalar) -> Result<PairTally> {
    let gamma_f = gamma.to_f64();
    let c_f = c.to_f64();
    let mut t = PairTally::default();
    for a in items.iter().filter(|e| e.word[0] == first) {
        for b in items {
            // Each unordered pair once: order by (first cell, word).
            if (b.word[0], &b.word) <= (a.word[0], &a.word) {
                continue;
            }
            if !comparable(&a.parent, &b.parent, gamma, gamma_f)? {
                continue;
            }
            t.pairs += 1;
            if a.word.starts_with(&b.word) || b.word.starts_with(&a.word) {
                t.prefix_pairs += 1;
            }
            let (d, d_f) = distance(&a.child, &b.child)?;
            if d_f == 0.0 && d.sign()? != Ordering::Greater {
                t.zero += 1;
                continue;
            }
            let (pd, pd_f) = distance(&a.parent, &b.parent)?;
            let ok_printed = ge(&d, d_f, &c.mul(&pd), c_f * pd_f)?;
            let (small, small_f) = if a.parent.len_f <= b.parent.len_f {
                (&a.parent.len, a.parent.len_f)
            } else {
                (&b.parent.len, b.parent.len_f)
            };
            let ok_length = ge(&d, d_f, &c.mul(small), c_f * small_f)?;
            if !(ok_printed && ok_length) {
                t.violations += 1;
            }
            if pd_f > 0.0 {
                let r = d_f / pd_f;
                t.worst_ratio = Some(t.worst_ratio.map_or(r, |w| w.min(r)));
            }
            let r = d_f / small_f;
            t.worst_length = Some(t.worst_length.map_or(r, |w| w.min(r)));
        }
    }
    Ok(t)
}

struct Constants {
    m: usize,
    k0: usize,
    big_m: usize,
    i_star: usize,
    c: Scalar,
}

fn constants(g: &Geometry, omega: &CellWord, gamma: &BigRational) -> Result<Constants> {
    let m = g.mixing_time()?;
    let k0 = comparability_window(gamma, g.rho.to_f64(), g.beta_step.to_f64());
    let big_m = agreement_bound(g, omega, k0)?;
    let c = g.rho.mul(&g.beta_step.pow(-(m as i64 + 1))?);
    Ok(Constants { m, k0, big_m, i_star: k0 + m + big_m, c })
}

fn distance_condition(
    g: &Geometry,
    omega: &CellWord,
    gamma: &BigRational,
    depth: usize,
) -> Result<(DistanceReport, Constants)> {
    let k = constants(g, omega, gamma)?;
    let gamma_s = Scalar::rational(gamma.clone());
    let words = g.all_words(depth);
    let i_values: Vec<usize> = (k.i_star + 1..=k.i_star + DISTANCE_WINDOW).collect();
    let mut tally = PairTally::default();
    for &i in &i_values {
        let tail = omega
            .prefix(i * g.step)
            .ok_or(Error::NoPeriodWithinBudget { steps: ITINERARY_STEPS, prefix: crate::words::FiniteWord::empty() })?;
        let extended: Vec<Option<Extended>> = par_map(&words, |w| {
            let full = g.concat(w, &tail)?;
            Some(Extended { word: w.clone(), parent: g.cylinder(w).ok()?, child: g.cylinder(&full).ok()? })
        });
        let items: Vec<Extended> = extended.into_iter().flatten().collect();
        let firsts: Vec<usize> = (0..g.s.num_cells()).filter(|&c| g.starts[c] && g.allowed[c]).collect();
        let parts = par_map(&firsts, |&f| check_pairs(&items, f, &gamma_s, &k.c));
        for p in parts {
            tally = tally.merge(p?);
        }
    }
    let report = DistanceReport {
        gamma: gamma.to_string(),
        depth,
        k0: k.k0,
        mixing_time_m: k.m,
        big_m: k.big_m,
        i_star: k.i_star,
        c: k.c.to_f64(),
        i_values,
        pairs_checked: tally.pairs,
        prefix_pairs: tally.prefix_pairs,
        zero_distance: tally.zero,
        worst_ratio: tally.worst_ratio,
        worst_length_ratio: tally.worst_length,
        violations: tally.violations,
        pass: tally.violations == 0,
    };
    Ok((report, k))
}

fn whole(s: &SftSystem) -> Result<Geometry<'_>> {
    let n = s.num_cells();
    Geometry::new(s, 1, vec![true; n], vec![true; n])
}

/// sup over extendable u (|u| ≤ depth) of |I(uω|_i)|/|I(u)| for i ≤ depth,
/// against the decay bound β^{−i}/ρ.
pub fn check_ratio_condition(s: &SftSystem, omega: &CellWord, depth: usize) -> Result<RatioReport> {
    ratio_condition(&whole(s)?, omega, depth)
}

/// Exhaustive separation check over γ/4-comparable ω|_i-extendable pairs of
/// length ≤ depth, for i* < i ≤ i* + DISTANCE_WINDOW.
pub fn check_distance_condition(
    s: &SftSystem,
    omega: &CellWord,
    gamma: &BigRational,
    depth: usize,
) -> Result<DistanceReport> {
    if s.transitivity_report()? != Transitivity::Transitive {
        return Err(Error::NotTransitive);
    }
    validate_gamma(gamma)?;
    Ok(distance_condition(&whole(s)?, omega, gamma, depth)?.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthReport {
    pub depth: usize,
    pub words: usize,
    pub violations: usize,
    /// min and max of |I(ν)|·β^{|ν|}; the bounds require ρ ≤ · ≤ 1.
    pub min_scaled: f64,
    pub max_scaled: f64,
    pub rho: f64,
    pub pass: bool,
}

/// ρβ^{−|ν|} ≤ |I(ν)| ≤ β^{−|ν|} for every admissible cell word, exactly.
pub fn check_cylinder_lengths(s: &SftSystem, depth: usize) -> Result<LengthReport> {
    let n = s.num_cells();
    let rho = (0..n).map(|i| s.cell_length(i)).try_fold(None::<Scalar>, |acc, l| -> Result<Option<Scalar>> {
        Ok(match acc {
            Some(a) if a.le(&l)? => Some(a),
            _ => Some(l),
        })
    })?;
    let rho = rho.ok_or(Error::NotTransitive)?;
    let g = whole(s)?;
    let words = g.all_words(depth);
    let checks = par_map(&words, |w| -> Result<(bool, f64)> {
        let len = g.cylinder(w)?.len;
        let scaled = len.mul(&s.params.beta().pow(w.len() as i64)?);
        let ok = rho.le(&scaled)? && scaled.le(&Scalar::one())?;
        Ok((ok, scaled.to_f64()))
    });
    let (mut violations, mut lo, mut hi) = (0, f64::INFINITY, f64::NEG_INFINITY);
    for c in checks {
        let (ok, v) = c?;
        violations += usize::from(!ok);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(LengthReport {
        depth,
        words: words.len(),
        violations,
        min_scaled: lo,
        max_scaled: hi,
        rho: rho.to_f64(),
        pass: violations == 0,
    })
}

fn validate_gamma(gamma: &BigRational) -> Result<()> {
    crate::input::unit_open(gamma, "γ")
}

/// Finite-depth evidence for H_{x,γ} for one piece: T itself when the
/// system is transitive, T^step on one cyclic class otherwise.
#[derive(Clone, Debug)]
pub struct WinningCertificate {
    pub system: SftSystem,
    pub x_word: EPWord,
    pub cells: CellWord,
    pub step: usize,
    pub class: Vec<usize>,
    pub depth: usize,
    pub mixing_time_m: usize,
    pub k0: usize,
    pub big_m: usize,
    pub i_star: usize,
    pub rho: Scalar,
    pub c: Scalar,
    pub ratio: RatioReport,
    pub distance: DistanceReport,
    pub ratio_bound_checked: bool,
    pub distance_condition_checked: bool,
}

impl WinningCertificate {
    pub fn passed(&self) -> bool {
        self.ratio_bound_checked && self.distance_condition_checked
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PieceSummary {
    /// m such that this piece certifies T^m(ξ).
    pub orbit_index: usize,
    pub point: f64,
    pub step: usize,
    pub class: Vec<usize>,
    pub cell_word: String,
    pub x_word: String,
    pub mixing_time_m: usize,
    pub k0: usize,
    #[serde(rename = "M")]
    pub big_m: usize,
    pub i_star: usize,
    pub rho: f64,
    pub c: f64,
    pub ratio_bound_checked: bool,
    pub distance_condition_checked: bool,
    pub ratio: RatioReport,
    pub distance: DistanceReport,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WinningSummary {
    pub beta: f64,
    pub alpha: f64,
    pub xi: f64,
    pub gamma: String,
    pub depth: usize,
    pub transitivity: Transitivity,
    pub cells: usize,
    pub pieces: Vec<PieceSummary>,
    pub certified: bool,
    pub cylinder_lengths: LengthReport,
    #[serde(skip)]
    pub certificates: Vec<WinningCertificate>,
}

fn certify(g: &Geometry, x: &Scalar, omega: CellWord, gamma: &BigRational, depth: usize) -> Result<WinningCertificate> {
    let s = g.s;
    let ratio = ratio_condition(g, &omega, depth)?;
    let (distance, k) = distance_condition(g, &omega, gamma, depth)?;
    let x_word = expansion_word(&s.params, x, Variant::Upper, ITINERARY_STEPS).unwrap_or_else(|_| EPWord::constant(0));
    Ok(WinningCertificate {
        system: s.clone(),
        x_word,
        step: g.step,
        class: (0..s.num_cells()).filter(|&c| g.starts[c] && g.allowed[c]).collect(),
        depth,
        mixing_time_m: k.m,
        k0: k.k0,
        big_m: k.big_m,
        i_star: k.i_star,
        rho: g.rho.clone(),
        c: k.c,
        ratio_bound_checked: ratio.pass,
        distance_condition_checked: distance.pass,
        ratio,
        distance,
        cells: omega,
    })
}

fn summarize(cert: &WinningCertificate, orbit_index: usize, point: f64, x_word_known: bool) -> PieceSummary {
    PieceSummary {
        orbit_index,
        point,
        step: cert.step,
        class: cert.class.clone(),
        cell_word: cert.cells.to_string(),
        x_word: if x_word_known { cert.x_word.to_string() } else { String::from("?") },
        mixing_time_m: cert.mixing_time_m,
        k0: cert.k0,
        big_m: cert.big_m,
        i_star: cert.i_star,
        rho: cert.rho.to_f64(),
        c: cert.c.to_f64(),
        ratio_bound_checked: cert.ratio_bound_checked,
        distance_condition_checked: cert.distance_condition_checked,
        ratio: cert.ratio.clone(),
        distance: cert.distance.clone(),
        certified: cert.passed(),
    }
}

/// Cyclic classes of a strongly connected node set with the given period.
fn cyclic_classes(s: &SftSystem, nodes: &[usize], period: usize) -> Vec<usize> {
    let k = s.num_cells();
    let mut level = vec![usize::MAX; k];
    let inside: Vec<bool> = (0..k).map(|c| nodes.contains(&c)).collect();
    let mut queue = std::collections::VecDeque::from([nodes[0]]);
    level[nodes[0]] = 0;
    while let Some(v) = queue.pop_front() {
        for w in 0..k {
            if inside[w] && s.adjacency[v][w] == 1 && level[w] == usize::MAX {
                level[w] = (level[v] + 1) % period;
                queue.push_back(w);
            }
        }
    }
    level
}

/// H_{ξ,γ} certificate at finite depth. Non-transitive systems are split
/// into the cyclic classes of the dominant component and T^n is certified
/// at each of T^0(ξ), …, T^{n−1}(ξ).
pub fn winning_report(params: &Params, xi: &Scalar, gamma: &BigRational, depth: usize) -> Result<WinningSummary> {
    validate_gamma(gamma)?;
    let s = compile_markov(params)?;
    let omega = cell_itinerary(&s, xi, ITINERARY_STEPS)?;
    let transitivity = s.transitivity_report()?;
    let x_known = expansion_word(params, xi, Variant::Upper, ITINERARY_STEPS).is_ok();
    let mut certificates = Vec::new();
    let mut pieces = Vec::new();
    match &transitivity {
        Transitivity::Transitive => {
            let g = whole(&s)?;
            let cert = certify(&g, xi, omega, gamma, depth)?;
            pieces.push(summarize(&cert, 0, xi.to_f64(), x_known));
            certificates.push(cert);
        }
        Transitivity::NotTransitive { period, dominant_cells, .. } => {
            if *period == 0 || dominant_cells.is_empty() {
                return Err(Error::NotTransitive);
            }
            let level = cyclic_classes(&s, dominant_cells, *period);
            let allowed: Vec<bool> = (0..s.num_cells()).map(|c| dominant_cells.contains(&c)).collect();
            let mut x = xi.clone();
            for m in 0..*period {
                let shifted = omega.shift(m);
                let first = shifted.get(0).ok_or(Error::NotTransitive)?;
                if !allowed[first] {
                    return Err(Error::NotTransitive);
                }
                let starts: Vec<bool> = (0..s.num_cells()).map(|c| allowed[c] && level[c] == level[first]).collect();
                let g = Geometry::new(&s, *period, allowed.clone(), starts)?;
                let cert = certify(&g, &x, shifted, gamma, depth)?;
                let xk = expansion_word(params, &x, Variant::Upper, ITINERARY_STEPS).is_ok();
                pieces.push(summarize(&cert, m, x.to_f64(), xk));
                certificates.push(cert);
                x = crate::itinerary::apply_map(params, &x, Variant::Upper)?;
            }
        }
    }
    let cylinder_lengths = check_cylinder_lengths(&s, depth)?;
    Ok(WinningSummary {
        beta: params.beta().to_f64(),
        alpha: params.alpha().to_f64(),
        xi: xi.to_f64(),
        gamma: gamma.to_string(),
        depth,
        transitivity,
        cells: s.num_cells(),
        certified: pieces.iter().all(|p| p.certified) && cylinder_lengths.pass,
        cylinder_lengths,
        pieces,
        certificates,
    })
}

/// Parse a γ given as a fraction or decimal.
pub fn parse_gamma(s: &str) -> Result<BigRational> {
    let q = crate::input::parse_rational(s)?;
    validate_gamma(&q)?;
    Ok(q)
}
