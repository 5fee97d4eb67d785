//! Markov partitions of finite-type intermediate β-transformations: cells,
//! adjacency, exact characteristic polynomial, entropy, transitivity and
//! cylinder intervals.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::components;
use crate::itinerary::{project_pi, Params};
use crate::kneading::{kneading_invariants, KneadingPair};
use crate::numerics::{max_real_root_in, AlgebraicReal, Poly, Scalar};

#[derive(Clone, Debug)]
pub struct SftSystem {
    pub params: Params,
    pub pair: KneadingPair,
    /// Ordered partition points 0 = a₁ < … < a_n = 1.
    pub points: Vec<Scalar>,
    /// χ: the branch letter of each cell.
    pub letters: Vec<u8>,
    pub adjacency: Vec<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Transitivity {
    Transitive,
    NotTransitive {
        /// Cyclic period of the dominant component.
        period: usize,
        strongly_connected: bool,
        dominant_cells: Vec<usize>,
    },
}

/// Compile a finite-type system (both kneading invariants purely periodic).
pub fn compile(params: &Params) -> Result<SftSystem> {
    let pair = kneading_invariants(params)?;
    if !pair.is_periodic() {
        return Err(Error::NotSft(format!("kneading invariants {pair} are not purely periodic")));
    }
    build(params, pair)
}

/// Compile any system whose kneading invariants are eventually periodic;
/// the partition is still Markov though the {0,1}-shift need not be of
/// finite type.
pub fn compile_markov(params: &Params) -> Result<SftSystem> {
    let pair = kneading_invariants(params).map_err(|e| match e {
        Error::NoPeriodWithinBudget { .. } => Error::NotSft(e.to_string()),
        e => e,
    })?;
    build(params, pair)
}

fn build(params: &Params, pair: KneadingPair) -> Result<SftSystem> {
    if !params.is_exact() {
        return Err(Error::NotSft("compilation needs exact parameters".into()));
    }
    let mut points: Vec<Scalar> = Vec::new();
    for w in pair.lower.shifts().iter().chain(pair.upper.shifts().iter()) {
        let x = project_pi(params, w)?;
        if !points.iter().any(|y| y.exact_eq(&x)) {
            points.push(x);
        }
    }
    for end in [Scalar::zero(), Scalar::one()] {
        if !points.iter().any(|y| y.exact_eq(&end)) {
            points.push(end);
        }
    }
    let mut err = None;
    points.sort_by(|a, b| {
        a.cmp_to(b).unwrap_or_else(|e| {
            err = Some(e);
            Ordering::Equal
        })
    });
    if let Some(e) = err {
        return Err(e);
    }
    let p = params.p();
    let n = points.len() - 1;
    let mut letters = Vec::with_capacity(n);
    for i in 0..n {
        letters.push(if points[i + 1].cmp_to(p)? != Ordering::Greater { 0 } else { 1 });
    }
    let beta = params.beta();
    let alpha = params.alpha();
    let find = |x: &Scalar| points.iter().position(|y| y.exact_eq(x));
    let mut adjacency = vec![vec![0u8; n]; n];
    for i in 0..n {
        let shift = alpha.sub(&Scalar::int(letters[i] as i64));
        let lo = beta.mul(&points[i]).add(&shift);
        let hi = beta.mul(&points[i + 1]).add(&shift);
        let (Some(l), Some(h)) = (find(&lo), find(&hi)) else {
            return Err(Error::MarkovViolation(format!(
                "image of cell {i} has endpoints {:.6}, {:.6} outside the partition",
                lo.to_f64(),
                hi.to_f64()
            )));
        };
        for row in adjacency[i].iter_mut().take(h).skip(l) {
            *row = 1;
        }
    }
    Ok(SftSystem { params: params.clone(), pair, points, letters, adjacency })
}

/// Characteristic polynomial det(xI − A) by Faddeev–LeVerrier over ℤ.
pub fn characteristic_polynomial(a: &[Vec<u8>]) -> Poly {
    let n = a.len();
    let am: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1} I
        let mut next = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigInt::zero();
                for l in 0..n {
                    if !am[i][l].is_zero() {
                        s += &m[l][j];
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &c[n - k + 1];
        }
        m = next;
        let mut tr = BigInt::zero();
        for i in 0..n {
            for l in 0..n {
                if !am[i][l].is_zero() {
                    tr += &m[l][i];
                }
            }
        }
        c[n - k] = -tr / BigInt::from(k);
    }
    Poly::new(c)
}

/// Largest real eigenvalue of a nonnegative integer matrix, if positive.
pub fn perron_root(a: &[Vec<u8>]) -> Result<Option<AlgebraicReal>> {
    let cp = characteristic_polynomial(a);
    let lo = BigRational::new(1.into(), 2.into());
    let hi = BigRational::from_integer(BigInt::from(a.len() as i64 + 1));
    match max_real_root_in(&cp, &lo, &hi) {
        Ok(r) => Ok(Some(r.minimized())),
        Err(Error::NoRoot { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn submatrix(a: &[Vec<u8>], nodes: &[usize]) -> Vec<Vec<u8>> {
    nodes.iter().map(|&i| nodes.iter().map(|&j| a[i][j]).collect()).collect()
}

fn adjacency_lists(a: &[Vec<u8>]) -> Vec<Vec<usize>> {
    a.iter().map(|r| r.iter().enumerate().filter(|(_, &x)| x > 0).map(|(j, _)| j).collect()).collect()
}

impl SftSystem {
    pub fn num_cells(&self) -> usize {
        self.letters.len()
    }

    pub fn cell(&self, i: usize) -> (&Scalar, &Scalar) {
        (&self.points[i], &self.points[i + 1])
    }

    pub fn cell_length(&self, i: usize) -> Scalar {
        self.points[i + 1].sub(&self.points[i])
    }

    pub fn characteristic_polynomial(&self) -> Poly {
        characteristic_polynomial(&self.adjacency)
    }

    pub fn perron_root(&self) -> Result<Option<AlgebraicReal>> {
        perron_root(&self.adjacency)
    }

    /// log λ for the Perron root λ.
    pub fn entropy(&self) -> Result<f64> {
        Ok(self.perron_root()?.map_or(f64::NEG_INFINITY, |r| r.to_f64().ln()))
    }

    /// The minimal polynomial of β divides the characteristic polynomial and
    /// the Perron root equals β.
    pub fn perron_root_is_beta(&self) -> Result<bool> {
        let Some(beta) = self.params.beta_real() else { return Ok(false) };
        let divides = self.characteristic_polynomial().div_exact(&beta.poly().primitive()).is_some();
        let equal = self.perron_root()?.is_some_and(|r| r.eq_exact(beta));
        Ok(divides && equal)
    }

    pub fn transitivity_report(&self) -> Result<Transitivity> {
        let adj = adjacency_lists(&self.adjacency);
        let (_, comps) = components(&adj);
        let strongly_connected = comps.len() == 1;
        let mut best: Option<(f64, usize)> = None;
        for (ci, c) in comps.iter().enumerate() {
            if !c.is_cyclic() {
                continue;
            }
            let r = perron_root(&submatrix(&self.adjacency, &c.nodes))?.map_or(0.0, |r| r.to_f64());
            if best.is_none_or(|(b, _)| r > b + 1e-12) {
                best = Some((r, ci));
            }
        }
        let Some((_, d)) = best else {
            return Ok(Transitivity::NotTransitive { period: 0, strongly_connected, dominant_cells: Vec::new() });
        };
        let dom = &comps[d];
        if strongly_connected && dom.period == 1 {
            Ok(Transitivity::Transitive)
        } else {
            Ok(Transitivity::NotTransitive {
                period: dom.period,
                strongly_connected,
                dominant_cells: dom.nodes.clone(),
            })
        }
    }

    pub fn is_admissible(&self, cells: &[usize]) -> bool {
        cells.iter().all(|&c| c < self.num_cells()) && cells.windows(2).all(|w| self.adjacency[w[0]][w[1]] == 1)
    }

    /// I(ν) = {x ∈ I(ν₁) : T^{k−1}(x) ∈ I(ν_k)} via inverse branches.
    pub fn cylinder(&self, cells: &[usize]) -> Result<(Scalar, Scalar)> {
        if cells.is_empty() || !self.is_admissible(cells) {
            return Err(Error::NotAdmissible(format!("cell word {cells:?}")));
        }
        let last = *cells.last().unwrap();
        let (mut lo, mut hi) = (self.points[last].clone(), self.points[last + 1].clone());
        let binv = self.params.beta().inv()?;
        for &c in cells[..cells.len() - 1].iter().rev() {
            let shift = Scalar::int(self.letters[c] as i64).sub(self.params.alpha());
            lo = lo.add(&shift).mul(&binv);
            hi = hi.add(&shift).mul(&binv);
        }
        Ok((lo, hi))
    }

    /// Number of admissible cell words of each length 1..=n.
    pub fn word_counts(&self, n: usize) -> Vec<u128> {
        let k = self.num_cells();
        let mut v = vec![1u128; k];
        let mut out = Vec::with_capacity(n);
        for len in 1..=n {
            out.push(v.iter().sum());
            if len == n {
                break;
            }
            let mut nv = vec![0u128; k];
            for i in 0..k {
                for j in 0..k {
                    if self.adjacency[i][j] == 1 {
                        nv[j] += v[i];
                    }
                }
            }
            v = nv;
        }
        out
    }

    /// Least m with A^m strictly positive.
    pub fn mixing_time(&self) -> Result<usize> {
        if self.transitivity_report()? != Transitivity::Transitive {
            return Err(Error::NotTransitive);
        }
        let k = self.num_cells();
        let a: Vec<Vec<bool>> = self.adjacency.iter().map(|r| r.iter().map(|&x| x == 1).collect()).collect();
        let mut p = a.clone();
        for m in 1..=(k * k + 1) {
            if p.iter().all(|r| r.iter().all(|&x| x)) {
                return Ok(m);
            }
            let mut np = vec![vec![false; k]; k];
            for i in 0..k {
                for l in 0..k {
                    if p[i][l] {
                        for j in 0..k {
                            np[i][j] |= a[l][j];
                        }
                    }
                }
            }
            p = np;
        }
        Err(Error::NotTransitive)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph sft {\n");
        for i in 0..self.num_cells() {
            let _ = writeln!(
                s,
                "  c{i} [label=\"{i}: [{:.6}, {:.6}{} chi={}\"];",
                self.points[i].to_f64(),
                self.points[i + 1].to_f64(),
                if i + 1 == self.num_cells() { "]" } else { ")" },
                self.letters[i]
            );
        }
        for (i, row) in self.adjacency.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x == 1 {
                    let _ = writeln!(s, "  c{i} -> c{j};");
                }
            }
        }
        s.push_str("}\n");
        s
    }

    /// Adjacency as CSV with a header row of cell indices.
    pub fn to_csv(&self) -> String {
        let n = self.num_cells();
        let mut s = String::from("cell");
        for j in 0..n {
            let _ = write!(s, ",{j}");
        }
        s.push('\n');
        for (i, row) in self.adjacency.iter().enumerate() {
            let _ = write!(s, "{i}");
            for x in row {
                let _ = write!(s, ",{x}");
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::algebraic::root_of;

    fn quartic() -> Params {
        let b = root_of(&[-1, -1, -1, 0, 1], (1, 1), (2, 1)).unwrap();
        Params::exact(&b, |b| Ok(Scalar::one().sub(&b.mul(b).div(&b.add(&Scalar::one()))?))).unwrap()
    }

    fn sqrt2_toy() -> Params {
        let b = root_of(&[-2, 0, 1], (1, 1), (2, 1)).unwrap();
        Params::exact(&b, |b| Ok(Scalar::one().sub(&b.div(&Scalar::int(2))?))).unwrap()
    }

    #[test]
    fn charpoly_small() {
        assert_eq!(characteristic_polynomial(&[vec![1, 1], vec![1, 0]]), Poly::from_i64(&[-1, -1, 1]));
        assert_eq!(characteristic_polynomial(&[vec![1, 1], vec![1, 1]]), Poly::from_i64(&[0, -2, 1]));
        let g = perron_root(&[vec![1, 1], vec![1, 0]]).unwrap().unwrap();
        assert!((g.to_f64().ln() - 0.481_211_825_059_603_4).abs() < 1e-12);
        assert!((perron_root(&[vec![1, 1], vec![1, 1]]).unwrap().unwrap().to_f64() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn quartic_system() {
        let s = compile(&quartic()).unwrap();
        assert!(s.perron_root_is_beta().unwrap());
        assert!((s.entropy().unwrap() - 1.4656f64.ln()).abs() < 1e-4);
        assert_eq!(s.transitivity_report().unwrap(), Transitivity::Transitive);
        for row in &s.adjacency {
            assert!(row.contains(&1));
        }
        for i in 0..s.num_cells() {
            let (lo, hi) = s.cylinder(&[i]).unwrap();
            assert!(lo.exact_eq(&s.points[i]) && hi.exact_eq(&s.points[i + 1]));
        }
        let m = s.mixing_time().unwrap();
        assert!(m >= 1 && m <= s.num_cells().pow(2));
    }

    #[test]
    fn golden_markov() {
        let g = root_of(&[-1, -1, 1], (1, 1), (2, 1)).unwrap();
        let p = Params::greedy(&g).unwrap();
        assert!(matches!(compile(&p), Err(Error::NotSft(_))));
        let s = compile_markov(&p).unwrap();
        assert_eq!(s.adjacency, vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(s.mixing_time().unwrap(), 2);
    }

    #[test]
    fn toy_has_period_two() {
        let s = compile_markov(&sqrt2_toy()).unwrap();
        match s.transitivity_report().unwrap() {
            Transitivity::NotTransitive { period, strongly_connected, .. } => {
                assert_eq!(period, 2);
                assert!(strongly_connected);
            }
            t => panic!("{t:?}"),
        }
        assert!(matches!(s.mixing_time(), Err(Error::NotTransitive)));
    }

    #[test]
    fn cylinder_length_identity() {
        let s = compile(&quartic()).unwrap();
        let binv = s.params.beta().inv().unwrap();
        let word = |len: usize| {
            let mut w = vec![0usize];
            while w.len() < len {
                let last = *w.last().unwrap();
                let next = (0..s.num_cells()).rev().find(|&j| s.adjacency[last][j] == 1).unwrap();
                w.push(next);
            }
            w
        };
        for len in 1..8 {
            let w = word(len);
            let (lo, hi) = s.cylinder(&w).unwrap();
            let expect = s.cell_length(*w.last().unwrap()).mul(&binv.pow(len as i64 - 1).unwrap());
            assert!(hi.sub(&lo).exact_eq(&expect));
        }
    }
}
