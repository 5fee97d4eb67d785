//! Follower automaton for shift spaces cut out by lexicographic bounds:
//! X = {ξ : every σⁿ(ξ) lies in one of finitely many intervals [L_i, U_i]}
//! with each endpoint strict or not.
//!
//! A state records, for every still-undecided shift of the word read so far,
//! which intervals remain possible and where the shift is tied with each
//! endpoint. Finite prefixes are tracked with closed bounds; strict
//! endpoints are enforced at infinity by inspecting the starts that stay
//! pending forever on a cycle, which makes prefix counts exact.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{components, Component};
use crate::words::EPWord;

/// Default bound on the number of automaton states.
pub const DEFAULT_STATE_CAP: usize = 1 << 18;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub lo: EPWord,
    pub hi: EPWord,
    pub lo_strict: bool,
    pub hi_strict: bool,
}

impl Bound {
    pub fn closed(lo: EPWord, hi: EPWord) -> Bound {
        Bound { lo, hi, lo_strict: false, hi_strict: false }
    }

    /// [lo, hi)
    pub fn upper_open(lo: EPWord, hi: EPWord) -> Bound {
        Bound { lo, hi, lo_strict: false, hi_strict: true }
    }

    /// (lo, hi]
    pub fn lower_open(lo: EPWord, hi: EPWord) -> Bound {
        Bound { lo, hi, lo_strict: true, hi_strict: false }
    }

    /// Exact membership of an infinite word.
    pub fn contains(&self, w: &EPWord) -> bool {
        let lo = w.cmp(&self.lo);
        let hi = w.cmp(&self.hi);
        let lo_ok = if self.lo_strict { lo.is_gt() } else { lo.is_ge() };
        let hi_ok = if self.hi_strict { hi.is_lt() } else { hi.is_le() };
        lo_ok && hi_ok
    }

    fn nonempty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => !self.lo_strict && !self.hi_strict,
            std::cmp::Ordering::Greater => false,
        }
    }
}

/// Exact membership: every shift of `w` lies in some bound.
pub fn shifts_within(w: &EPWord, bounds: &[Bound]) -> bool {
    w.shifts().iter().all(|s| bounds.iter().any(|b| b.contains(s)))
}

/// Which prefix language to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Semantics {
    /// Prefixes of the closed-bound shift.
    Closed,
    /// Prefixes of the shift with the given strict endpoints.
    Exact,
}

type Tie = Option<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Entry {
    iv: u16,
    lo: Tie,
    hi: Tie,
}

type Start = Vec<Entry>;
type State = Vec<Start>;

enum Outcome {
    Satisfied,
    Dead,
    Pending(Start),
}

#[derive(Clone, Debug)]
pub struct Automaton {
    bounds: Vec<Bound>,
    states: Vec<State>,
    next: Vec<[Option<usize>; 2]>,
    comp_of: Vec<usize>,
    comps: Vec<Component>,
    live_closed: Vec<bool>,
    live_exact: Vec<bool>,
}

fn advance(w: &EPWord, k: u32) -> u32 {
    let k = k + 1;
    if (k as usize) < w.orbit_len() {
        k
    } else {
        w.pre().len() as u32
    }
}

impl Automaton {
    pub fn new(bounds: Vec<Bound>) -> Result<Automaton> {
        Automaton::with_cap(bounds, DEFAULT_STATE_CAP)
    }

    pub fn with_cap(bounds: Vec<Bound>, cap: usize) -> Result<Automaton> {
        let bounds: Vec<Bound> = bounds.into_iter().filter(Bound::nonempty).collect();
        let mut a = Automaton {
            bounds,
            states: vec![Vec::new()],
            next: Vec::new(),
            comp_of: Vec::new(),
            comps: Vec::new(),
            live_closed: Vec::new(),
            live_exact: Vec::new(),
        };
        let mut index: HashMap<State, usize> = HashMap::new();
        index.insert(Vec::new(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            let mut row = [None, None];
            for letter in 0..2u8 {
                if let Some(t) = a.step_state(&a.states[s], letter, true) {
                    let id = match index.get(&t) {
                        Some(&id) => id,
                        None => {
                            if a.states.len() >= cap {
                                return Err(Error::SearchExhausted(format!(
                                    "follower automaton exceeded {cap} states"
                                )));
                            }
                            let id = a.states.len();
                            index.insert(t.clone(), id);
                            a.states.push(t);
                            queue.push_back(id);
                            id
                        }
                    };
                    row[letter as usize] = Some(id);
                }
            }
            if a.next.len() <= s {
                a.next.resize(s + 1, [None, None]);
            }
            a.next[s] = row;
        }
        a.next.resize(a.states.len(), [None, None]);
        a.analyse();
        Ok(a)
    }

    /// Closed-or-open intervals [σν, ω) ∪ [ν, σω) describing Ω⁺(ω, ν).
    pub fn omega_plus(lower: &EPWord, upper: &EPWord) -> Result<Automaton> {
        Automaton::new(omega_plus_bounds(lower, upper))
    }

    pub fn omega_minus(lower: &EPWord, upper: &EPWord) -> Result<Automaton> {
        Automaton::new(omega_minus_bounds(lower, upper))
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn init(&self) -> usize {
        0
    }

    pub fn successor(&self, s: usize, letter: u8) -> Option<usize> {
        self.next[s][letter as usize]
    }

    fn step_start(&self, start: &Start, letter: u8) -> Outcome {
        let mut out = Vec::with_capacity(start.len());
        for e in start {
            let b = &self.bounds[e.iv as usize];
            let lo = match e.lo {
                None => None,
                Some(k) => match letter.cmp(&b.lo.letter(k as usize)) {
                    std::cmp::Ordering::Greater => None,
                    std::cmp::Ordering::Equal => Some(advance(&b.lo, k)),
                    std::cmp::Ordering::Less => continue,
                },
            };
            let hi = match e.hi {
                None => None,
                Some(k) => match letter.cmp(&b.hi.letter(k as usize)) {
                    std::cmp::Ordering::Less => None,
                    std::cmp::Ordering::Equal => Some(advance(&b.hi, k)),
                    std::cmp::Ordering::Greater => continue,
                },
            };
            if lo.is_none() && hi.is_none() {
                return Outcome::Satisfied;
            }
            out.push(Entry { iv: e.iv, lo, hi });
        }
        if out.is_empty() {
            Outcome::Dead
        } else {
            Outcome::Pending(out)
        }
    }

    fn fresh_start(&self) -> Start {
        (0..self.bounds.len()).map(|i| Entry { iv: i as u16, lo: Some(0), hi: Some(0) }).collect()
    }

    fn step_state(&self, state: &State, letter: u8, add_new: bool) -> Option<State> {
        let fresh = add_new.then(|| self.fresh_start());
        let mut out: State = Vec::with_capacity(state.len() + 1);
        for start in state.iter().chain(fresh.iter()) {
            match self.step_start(start, letter) {
                Outcome::Satisfied => {}
                Outcome::Dead => return None,
                Outcome::Pending(s) => out.push(s),
            }
        }
        out.sort();
        out.dedup();
        Some(out)
    }

    /// Whether a start pending forever is acceptable at infinity.
    fn start_allowed_at_infinity(&self, start: &Start) -> bool {
        start.iter().any(|e| {
            let b = &self.bounds[e.iv as usize];
            !(e.lo.is_some() && b.lo_strict) && !(e.hi.is_some() && b.hi_strict)
        })
    }

    /// For a simple cycle through `q0`, whether the starts that persist
    /// forever are all acceptable.
    fn cycle_is_good(&self, q0: usize, comp: usize) -> bool {
        let mut tracked: Vec<Option<Start>> = self.states[q0].iter().cloned().map(Some).collect();
        let mut cur = q0;
        loop {
            let (letter, nxt) = (0..2u8)
                .find_map(|a| self.next[cur][a as usize].filter(|&t| self.comp_of[t] == comp).map(|t| (a, t)))
                .expect("simple cycle has an internal edge");
            for slot in tracked.iter_mut() {
                if let Some(s) = slot.take() {
                    *slot = match self.step_start(&s, letter) {
                        Outcome::Pending(p) => Some(p),
                        _ => None,
                    };
                }
            }
            cur = nxt;
            if cur == q0 {
                break;
            }
        }
        let base = &self.states[q0];
        let f: Vec<Option<usize>> =
            tracked.iter().map(|s| s.as_ref().and_then(|s| base.iter().position(|b| b == s))).collect();
        (0..base.len()).all(|j| {
            // j persists iff it lies on a cycle of f.
            let mut x = Some(j);
            for _ in 0..base.len() {
                x = x.and_then(|i| f[i]);
                if x == Some(j) {
                    return self.start_allowed_at_infinity(&base[j]);
                }
            }
            true
        })
    }

    fn analyse(&mut self) {
        let n = self.states.len();
        let adj: Vec<Vec<usize>> = self.next.iter().map(|r| r.iter().flatten().copied().collect()).collect();
        let (comp_of, comps) = components(&adj);
        let good: Vec<bool> = comps
            .iter()
            .enumerate()
            .map(|(c, comp)| {
                if comp.has_positive_entropy() {
                    true
                } else if comp.is_cyclic() {
                    self.comp_of = comp_of.clone();
                    self.cycle_is_good(comp.nodes[0], c)
                } else {
                    false
                }
            })
            .collect();
        // Components are numbered sinks first, so one pass in index order settles reachability.
        let mut comp_live_closed = vec![false; comps.len()];
        let mut comp_live_exact = vec![false; comps.len()];
        for c in 0..comps.len() {
            let mut lc = comps[c].is_cyclic();
            let mut le = good[c];
            for &v in &comps[c].nodes {
                for &w in &adj[v] {
                    let d = comp_of[w];
                    if d != c {
                        lc |= comp_live_closed[d];
                        le |= comp_live_exact[d];
                    }
                }
            }
            comp_live_closed[c] = lc;
            comp_live_exact[c] = le;
        }
        self.live_closed = (0..n).map(|v| comp_live_closed[comp_of[v]]).collect();
        self.live_exact = (0..n).map(|v| comp_live_exact[comp_of[v]]).collect();
        self.comp_of = comp_of;
        self.comps = comps;
    }

    fn live(&self, sem: Semantics) -> &[bool] {
        match sem {
            Semantics::Closed => &self.live_closed,
            Semantics::Exact => &self.live_exact,
        }
    }

    pub fn is_live(&self, s: usize, sem: Semantics) -> bool {
        self.live(sem)[s]
    }

    /// State reached after reading `w`, if no constraint has failed.
    pub fn state_after(&self, w: &[u8]) -> Option<usize> {
        w.iter().try_fold(0usize, |s, &a| self.next[s][a as usize])
    }

    /// Whether `w` is a prefix of some word of the shift.
    pub fn accepts_prefix(&self, w: &[u8], sem: Semantics) -> bool {
        self.state_after(w).is_some_and(|s| self.live(sem)[s])
    }

    /// Path counts from the initial state by length, restricted to live states.
    fn path_counts(&self, n: usize, sem: Semantics) -> Vec<Vec<u128>> {
        let live = self.live(sem);
        let mut dp = vec![0u128; self.states.len()];
        if live[0] {
            dp[0] = 1;
        }
        let mut all = vec![dp.clone()];
        for _ in 0..n {
            let mut nd = vec![0u128; self.states.len()];
            for (s, &c) in dp.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for t in self.next[s].iter().flatten() {
                    if live[*t] {
                        nd[*t] += c;
                    }
                }
            }
            dp = nd;
            all.push(dp.clone());
        }
        all
    }

    /// Number of words of length k in the language, k = 0..=n.
    pub fn counts(&self, n: usize, sem: Semantics) -> Vec<u128> {
        self.path_counts(n, sem).iter().map(|d| d.iter().sum()).collect()
    }

    /// Follower counts: `f[k][s]` is the number of words of length k readable
    /// from state s through live states (0 for dead s), k = 0..=n.
    pub fn follower_counts(&self, n: usize, sem: Semantics) -> Vec<Vec<u128>> {
        let live = self.live(sem);
        let mut f = vec![live.iter().map(|&l| l as u128).collect::<Vec<_>>()];
        for k in 1..=n {
            let prev = &f[k - 1];
            let row = (0..self.states.len())
                .map(|s| {
                    if !live[s] {
                        return 0;
                    }
                    self.next[s].iter().flatten().map(|&t| prev[t]).sum()
                })
                .collect();
            f.push(row);
        }
        f
    }

    pub fn count(&self, n: usize, sem: Semantics) -> u128 {
        self.counts(n, sem)[n]
    }

    /// Exact test for positive entropy: some component has more internal
    /// edges than nodes.
    pub fn has_positive_entropy(&self) -> bool {
        self.comps.iter().any(Component::has_positive_entropy)
    }

    /// Entropy estimate at depth n: for each live cyclic component C with
    /// period d, log of (S_C(n)/S_C(n−d))^{1/d} where S_C counts paths ending
    /// in C; the maximum over components.
    pub fn entropy_estimate(&self, n: usize, sem: Semantics) -> f64 {
        let paths = self.path_counts(n, sem);
        let live = self.live(sem);
        let mut best = 0.0f64;
        for c in &self.comps {
            if !c.is_cyclic() || !live[c.nodes[0]] || c.period == 0 || c.period > n {
                continue;
            }
            let s = |k: usize| -> u128 { c.nodes.iter().map(|&v| paths[k][v]).sum() };
            let (a, b) = (s(n), s(n - c.period));
            if a == 0 || b == 0 {
                continue;
            }
            let lam = ((a as f64) / (b as f64)).ln() / c.period as f64;
            best = best.max(lam);
        }
        best
    }

    /// Naive estimate log(count(n))/n.
    pub fn entropy_naive(&self, n: usize, sem: Semantics) -> f64 {
        let c = self.count(n, sem);
        if c == 0 || n == 0 {
            0.0
        } else {
            (c as f64).ln() / n as f64
        }
    }

    /// Perron root of the live part, by power iteration per component.
    pub fn spectral_radius(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (ci, c) in self.comps.iter().enumerate() {
            if !c.is_cyclic() {
                continue;
            }
            if !c.has_positive_entropy() {
                best = best.max(1.0);
                continue;
            }
            let pos: HashMap<usize, usize> = c.nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let mut v = vec![1.0f64; c.nodes.len()];
            let mut lam = 1.0;
            let d = c.period.max(1);
            for _ in 0..400 {
                let mut w = v.clone();
                for _ in 0..d {
                    let mut nw = vec![0.0f64; w.len()];
                    for (i, &node) in c.nodes.iter().enumerate() {
                        for t in self.next[node].iter().flatten() {
                            if self.comp_of[*t] == ci {
                                nw[pos[t]] += w[i];
                            }
                        }
                    }
                    w = nw;
                }
                let norm: f64 = w.iter().sum();
                let prev: f64 = v.iter().sum();
                lam = (norm / prev).powf(1.0 / d as f64);
                v = w.iter().map(|x| x / norm).collect();
            }
            best = best.max(lam);
        }
        best
    }

    /// Reading the infinite `tail` from state `s` without opening new starts,
    /// do all pending constraints hold?
    pub fn survives_tail(&self, s: usize, tail: &EPWord) -> bool {
        let mut state = self.states[s].clone();
        let mut pos = 0usize;
        let mut seen: HashMap<(State, usize), ()> = HashMap::new();
        loop {
            if state.is_empty() {
                return true;
            }
            if seen.insert((state.clone(), pos), ()).is_some() {
                return state.iter().all(|st| self.start_allowed_at_infinity(st));
            }
            match self.step_state(&state, tail.letter(pos), false) {
                None => return false,
                Some(t) => state = t,
            }
            pos = advance(tail, pos as u32) as usize;
        }
    }

    /// States from which a path (through non-failed states) reaches a state
    /// satisfying `good`.
    pub fn coreach(&self, good: &[bool]) -> Vec<bool> {
        let n = self.states.len();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (s, row) in self.next.iter().enumerate() {
            for t in row.iter().flatten() {
                rev[*t].push(s);
            }
        }
        let mut ok = good.to_vec();
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| good[s]).collect();
        while let Some(t) = queue.pop_front() {
            for &s in &rev[t] {
                if !ok[s] {
                    ok[s] = true;
                    queue.push_back(s);
                }
            }
        }
        ok
    }

    /// The lexicographically least infinite word of the language, following
    /// the 0-edge whenever it stays live. `None` when the language is empty
    /// or the limit word escapes an open endpoint.
    pub fn least_word(&self, sem: Semantics) -> Option<EPWord> {
        let live = self.live(sem);
        if !live[0] {
            return None;
        }
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut letters = Vec::new();
        let mut s = 0usize;
        loop {
            if let Some(&i) = seen.get(&s) {
                let w = EPWord::new(&letters[..i], &letters[i..]);
                return shifts_within(&w, &self.bounds).then_some(w);
            }
            seen.insert(s, letters.len());
            let (a, t) = match self.next[s][0].filter(|&t| live[t]) {
                Some(t) => (0u8, t),
                None => (1u8, self.next[s][1].filter(|&t| live[t])?),
            };
            letters.push(a);
            s = t;
        }
    }
}

/// [σν, ω) ∪ [ν, σω)
pub fn omega_plus_bounds(lower: &EPWord, upper: &EPWord) -> Vec<Bound> {
    vec![Bound::upper_open(upper.shift(1), lower.clone()), Bound::upper_open(upper.clone(), lower.shift(1))]
}

/// (σν, ω] ∪ (ν, σω]
pub fn omega_minus_bounds(lower: &EPWord, upper: &EPWord) -> Vec<Bound> {
    vec![Bound::lower_open(upper.shift(1), lower.clone()), Bound::lower_open(upper.clone(), lower.shift(1))]
}

/// [σν, ω] ∪ [ν, σω], the closure used for the language of Ω.
pub fn omega_closed_bounds(lower: &EPWord, upper: &EPWord) -> Vec<Bound> {
    vec![Bound::closed(upper.shift(1), lower.clone()), Bound::closed(upper.clone(), lower.shift(1))]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> EPWord {
        s.parse().unwrap()
    }

    /// Brute-force prefix language of a bound set: words u of length n such
    /// that some u·v·z^∞ with |v|,|z| small has all shifts inside.
    fn brute(bounds: &[Bound], n: usize, extra: usize) -> usize {
        let mut found = std::collections::HashSet::new();
        for len in n..=n + extra {
            for bits in 0..(1u32 << len) {
                let word: Vec<u8> = (0..len).map(|i| ((bits >> (len - 1 - i)) & 1) as u8).collect();
                for split in 0..len {
                    let e = EPWord::new(&word[..split], &word[split..]);
                    if shifts_within(&e, bounds) {
                        found.insert(word[..n].to_vec());
                    }
                }
            }
        }
        found.len()
    }

    #[test]
    fn golden_shift_counts_are_fibonacci() {
        // Greedy golden: ν = 1 0^∞, ω = 0 (10)^∞ = (01)^∞.
        let a = Automaton::new(omega_closed_bounds(&w("(01)"), &w("1(0)"))).unwrap();
        let c = a.counts(10, Semantics::Closed);
        assert_eq!(&c[1..], &[2, 3, 5, 8, 13, 21, 34, 55, 89, 144]);
        assert!(a.has_positive_entropy());
        assert!((a.spectral_radius() - 1.618_033_988_749_895).abs() < 1e-9);
    }

    #[test]
    fn exact_semantics_drop_strict_endpoints() {
        // Only (01)^∞ and (10)^∞ satisfy the closed bounds; the strict upper
        // endpoint removes both.
        let closed = Automaton::new(vec![Bound::closed(w("(01)"), w("(10)"))]).unwrap();
        let open = Automaton::new(vec![Bound::upper_open(w("(01)"), w("(10)"))]).unwrap();
        assert_eq!(closed.count(6, Semantics::Closed), 2);
        assert_eq!(open.count(6, Semantics::Exact), 0);
        assert!(!closed.has_positive_entropy());
    }

    #[test]
    fn counts_match_brute_force_on_small_bounds() {
        let cases = vec![
            omega_plus_bounds(&w("(01)"), &w("(1000)")),
            vec![Bound::upper_open(w("00(011)"), w("11(100)"))],
            vec![Bound::upper_open(w("(001)"), w("(110)"))],
            omega_minus_bounds(&w("0(110)"), &w("(100)")),
        ];
        for b in cases {
            let a = Automaton::new(b.clone()).unwrap();
            for n in 1..=7 {
                assert_eq!(a.count(n, Semantics::Exact) as usize, brute(&b, n, 6), "n={n} bounds={b:?}");
            }
        }
    }

    #[test]
    fn tail_survival() {
        let a = Automaton::new(vec![Bound::upper_open(w("(001)"), w("(110)"))]).unwrap();
        let s = a.state_after(&[1, 1]).unwrap();
        assert!(a.survives_tail(s, &w("(0)")));
        assert!(!a.survives_tail(s, &w("(1)")));
        // 11 followed by (011)^∞ ties the strict upper bound forever.
        assert!(!a.survives_tail(s, &w("(011)")));
        let c = Automaton::new(vec![Bound::closed(w("(001)"), w("(110)"))]).unwrap();
        assert!(c.survives_tail(c.state_after(&[1, 1]).unwrap(), &w("(011)")));
    }
}
