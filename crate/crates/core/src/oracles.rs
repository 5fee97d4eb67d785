//! Independent cross-checks: exhaustive language enumeration by exact
//! interval subdivision, box counting of survivor sets and Monte Carlo
//! escape rates. Nothing here reuses the automaton or kneading machinery.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::itinerary::Params;
use crate::numerics::Scalar;
use crate::par::par_map;
use crate::words::FiniteWord;

/// Largest word length accepted by the exhaustive enumeration.
pub const MAX_ENUMERATION_LENGTH: usize = 20;
/// Largest grid accepted by box counting.
pub const MAX_GRID: usize = 1 << 20;
/// Samples per shard in `escape_fraction`; shard i uses ChaCha stream i.
pub const SHARD_SIZE: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EnumerationMethod {
    IntervalSubdivision,
    OrbitSampling,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnumerationReport {
    pub n: usize,
    pub words: BTreeSet<FiniteWord>,
    pub method: EnumerationMethod,
}

impl EnumerationReport {
    pub fn count(&self) -> usize {
        self.words.len()
    }
}

/// [lo, hi) or [lo, hi]; lo is always included.
#[derive(Clone, Debug)]
struct Piece {
    lo: Scalar,
    hi: Scalar,
    hi_closed: bool,
}

/// All length-n prefixes of upper itineraries of points of [0,1), by
/// following the exact image of every cylinder under the two branches.
/// Lower itineraries add no new prefixes: each is a left limit of upper ones.
pub fn brute_force_language(params: &Params, n: usize) -> Result<EnumerationReport> {
    let n = n.min(MAX_ENUMERATION_LENGTH);
    let p = params.p().clone();
    let beta = params.beta().clone();
    let alpha = params.alpha().clone();
    let image = |x: &Scalar, d: i64| beta.mul(x).add(&alpha).sub(&Scalar::int(d));
    let mut words = BTreeSet::new();
    let mut stack = vec![(Piece { lo: Scalar::zero(), hi: Scalar::one(), hi_closed: false }, Vec::<u8>::new())];
    while let Some((piece, w)) = stack.pop() {
        if w.len() == n {
            words.insert(FiniteWord::new(w));
            continue;
        }
        // x < p
        if piece.lo.lt(&p)? {
            let (hi, hi_closed) = if piece.hi.le(&p)? {
                (piece.hi.clone(), piece.hi_closed && piece.hi.lt(&p)?)
            } else {
                (p.clone(), false)
            };
            let mut v = w.clone();
            v.push(0);
            stack.push((Piece { lo: image(&piece.lo, 0), hi: image(&hi, 0), hi_closed }, v));
        }
        // x ≥ p
        if p.lt(&piece.hi)? || (piece.hi_closed && p.le(&piece.hi)?) {
            let lo = if p.lt(&piece.lo)? { piece.lo.clone() } else { p.clone() };
            let mut v = w.clone();
            v.push(1);
            stack.push((Piece { lo: image(&lo, 1), hi: image(&piece.hi, 1), hi_closed: piece.hi_closed }, v));
        }
    }
    Ok(EnumerationReport { n, words, method: EnumerationMethod::IntervalSubdivision })
}

fn float_step(beta: f64, alpha: f64, p: f64, x: f64) -> f64 {
    let d = if x < p { 0.0 } else { 1.0 };
    (beta * x + alpha - d).clamp(0.0, 1.0)
}

fn floats(params: &Params) -> (f64, f64, f64) {
    (params.beta().to_f64(), params.alpha().to_f64(), params.p().to_f64())
}

/// Length-n itinerary prefixes of uniformly sampled points (float map).
pub fn sampled_language(params: &Params, n: usize, samples: usize, seed: u64) -> EnumerationReport {
    let (beta, alpha, p) = floats(params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words = BTreeSet::new();
    for _ in 0..samples {
        let mut x: f64 = rng.random();
        let mut w = Vec::with_capacity(n);
        for _ in 0..n {
            w.push(u8::from(x >= p));
            x = float_step(beta, alpha, p, x);
        }
        words.insert(FiniteWord::new(w));
    }
    EnumerationReport { n, words, method: EnumerationMethod::OrbitSampling }
}

/// Intervals of points whose first `steps` iterates avoid [0, t), kept as
/// [lo, hi] in the original coordinate together with the affine image
/// y = scale·x + offset of the current iterate.
fn survivor_intervals(params: &Params, t: f64, steps: usize) -> Vec<(f64, f64)> {
    let (beta, alpha, p) = floats(params);
    // (x_lo, x_hi, scale, offset)
    let mut pieces = vec![(0.0f64, 1.0f64, 1.0f64, 0.0f64)];
    for _ in 0..=steps {
        let mut next = Vec::with_capacity(pieces.len() * 2);
        for &(xl, xh, s, o) in &pieces {
            let (yl, yh) = (s * xl + o, s * xh + o);
            let yl = yl.max(t);
            if yl > yh {
                continue;
            }
            let back = |y: f64| (y - o) / s;
            for (a, b, d) in [(yl, yh.min(p), 0.0), (yl.max(p), yh, 1.0)] {
                if a <= b && (d == 1.0 || a < p) {
                    next.push((back(a), back(b), beta * s, beta * o + alpha - d));
                }
            }
        }
        pieces = next;
        if pieces.is_empty() {
            break;
        }
    }
    pieces.into_iter().map(|(a, b, _, _)| (a, b)).collect()
}

/// Number of boxes of side 1/grid meeting each interval set.
fn occupied(intervals: &[(f64, f64)], grid: usize) -> usize {
    let mut hit = vec![false; grid];
    for &(a, b) in intervals {
        let i = ((a * grid as f64).floor() as usize).min(grid - 1);
        let j = ((b * grid as f64).floor() as usize).min(grid - 1);
        for h in &mut hit[i..=j] {
            *h = true;
        }
    }
    hit.iter().filter(|&&h| h).count()
}

/// Boxes of side 1/grid meeting the points whose first `steps` iterates
/// avoid [0, t).
pub fn box_count(params: &Params, t: &Scalar, grid: usize, steps: usize) -> usize {
    occupied(&survivor_intervals(params, t.to_f64(), steps), grid.clamp(2, MAX_GRID))
}

/// Dyadic scales below `grid` used for the slope fit.
pub const BOX_SCALES: u32 = 6;

/// Box-counting estimate of dim K⁺(t): the least-squares slope of log N
/// against log grid over the dyadic grids grid/2^BOX_SCALES, …, grid.
pub fn box_counting_dim(params: &Params, t: &Scalar, grid: usize, steps: usize) -> f64 {
    let grid = grid.clamp(2, MAX_GRID);
    let intervals = survivor_intervals(params, t.to_f64(), steps);
    let pts: Vec<(f64, f64)> = (0..=BOX_SCALES)
        .map(|k| grid >> k)
        .filter(|&g| g >= 2)
        .map(|g| ((g as f64).ln(), (occupied(&intervals, g).max(1) as f64).ln()))
        .collect();
    if pts.len() < 2 {
        let (x, y) = pts[0];
        return y / x;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy / sxx).max(0.0)
}

/// Fraction of uniform samples whose orbit meets [0, t) within `steps`
/// iterates. Shard i draws its points from ChaCha8 stream i of `seed`.
pub fn escape_fraction(params: &Params, t: &Scalar, samples: usize, steps: usize, seed: u64) -> f64 {
    if samples == 0 {
        return 0.0;
    }
    let (beta, alpha, p) = floats(params);
    let t = t.to_f64();
    let shards: Vec<usize> = (0..samples.div_ceil(SHARD_SIZE)).collect();
    let escaped: usize = par_map(&shards, |&i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let count = SHARD_SIZE.min(samples - i * SHARD_SIZE);
        (0..count)
            .filter(|_| {
                let mut x: f64 = rng.random();
                for _ in 0..steps {
                    if x < t {
                        return true;
                    }
                    x = float_step(beta, alpha, p, x);
                }
                false
            })
            .count()
    })
    .into_iter()
    .sum();
    escaped as f64 / samples as f64
}
