//! Finite and eventually periodic binary words.
//!
//! Text syntax: `11(100)` is 11(100)^∞, `0*` is 0^∞, `10*` is 1 0^∞.
//! A word without parentheses or star parses as a [`FiniteWord`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct FiniteWord(Vec<u8>);

impl FiniteWord {
    pub fn new(letters: Vec<u8>) -> Self {
        assert!(letters.iter().all(|&b| b <= 1), "letters must be 0 or 1");
        FiniteWord(letters)
    }

    pub fn empty() -> Self {
        FiniteWord(Vec::new())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, b: u8) {
        assert!(b <= 1);
        self.0.push(b);
    }

    pub fn prefix(&self, n: usize) -> FiniteWord {
        FiniteWord(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn concat(&self, other: &FiniteWord) -> FiniteWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FiniteWord(v)
    }

    /// `self^∞`.
    pub fn repeat_forever(&self) -> EPWord {
        EPWord::periodic(&self.0)
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for FiniteWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_bits(s.trim()).map(FiniteWord)
    }
}

impl From<FiniteWord> for String {
    fn from(w: FiniteWord) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for FiniteWord {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::Parse(format!("unexpected character {c:?} in word {s:?}"))),
        })
        .collect()
}

/// An eventually periodic word `pre · per^∞`, always held in canonical form:
/// the period is primitive and the preperiod is as short as possible.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct EPWord {
    pre: Vec<u8>,
    per: Vec<u8>,
}

impl EPWord {
    pub fn new(pre: &[u8], per: &[u8]) -> Self {
        assert!(!per.is_empty(), "period must be nonempty");
        assert!(pre.iter().chain(per).all(|&b| b <= 1), "letters must be 0 or 1");
        let mut per = primitive_root(per).to_vec();
        let mut pre = pre.to_vec();
        while let Some(&last) = pre.last() {
            if last != *per.last().unwrap() {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        EPWord { pre, per }
    }

    pub fn periodic(per: &[u8]) -> Self {
        EPWord::new(&[], per)
    }

    pub fn constant(b: u8) -> Self {
        EPWord::new(&[], &[b])
    }

    pub fn pre(&self) -> &[u8] {
        &self.pre
    }

    pub fn period(&self) -> &[u8] {
        &self.per
    }

    pub fn is_periodic(&self) -> bool {
        self.pre.is_empty()
    }

    /// Letter at 0-based index `i`.
    pub fn letter(&self, i: usize) -> u8 {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.per[(i - self.pre.len()) % self.per.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> FiniteWord {
        FiniteWord((0..n).map(|i| self.letter(i)).collect())
    }

    /// Number of distinct shifts: `|pre| + |per|`.
    pub fn orbit_len(&self) -> usize {
        self.pre.len() + self.per.len()
    }

    pub fn shift(&self, k: usize) -> EPWord {
        if k <= self.pre.len() {
            return EPWord { pre: self.pre[k..].to_vec(), per: self.per.clone() };
        }
        let r = (k - self.pre.len()) % self.per.len();
        let mut per = self.per.clone();
        per.rotate_left(r);
        EPWord { pre: Vec::new(), per }
    }

    /// All distinct shifts σ^k(w) for k = 0..|pre|+|per|.
    pub fn shifts(&self) -> Vec<EPWord> {
        (0..self.orbit_len()).map(|k| self.shift(k)).collect()
    }

    pub fn reflect(&self) -> EPWord {
        let flip = |v: &[u8]| v.iter().map(|b| 1 - b).collect::<Vec<_>>();
        EPWord::new(&flip(&self.pre), &flip(&self.per))
    }

    /// `u · self`.
    pub fn prepend(&self, u: &[u8]) -> EPWord {
        let mut pre = u.to_vec();
        pre.extend_from_slice(&self.pre);
        EPWord::new(&pre, &self.per)
    }

    pub fn smallest_period(&self) -> (usize, usize) {
        (self.pre.len(), self.per.len())
    }

    /// Index of the first differing letter, or `None` if the words are equal.
    pub fn first_difference(&self, other: &EPWord) -> Option<usize> {
        if self == other {
            return None;
        }
        let window = comparison_window(self, other);
        (0..window).find(|&i| self.letter(i) != other.letter(i))
    }

    /// Length of the longest common prefix (`usize::MAX` when equal).
    pub fn agreement(&self, other: &EPWord) -> usize {
        self.first_difference(other).unwrap_or(usize::MAX)
    }

    /// Compare against a finite word read as a prefix: `Less` means `self`
    /// is lexicographically below every infinite extension of `w`.
    pub fn cmp_prefix(&self, w: &[u8]) -> Ordering {
        for (i, &b) in w.iter().enumerate() {
            match self.letter(i).cmp(&b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

/// Number of letters that decides comparison of two canonical words.
pub fn comparison_window(a: &EPWord, b: &EPWord) -> usize {
    let (pa, qa) = a.smallest_period();
    let (pb, qb) = b.smallest_period();
    pa + pb + qa.lcm(&qb) + qa.max(qb)
}

pub fn lex_compare(a: &EPWord, b: &EPWord) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let window = comparison_window(a, b);
    for i in 0..window {
        match a.letter(i).cmp(&b.letter(i)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    // Canonical forms that agree on the window are equal.
    Ordering::Equal
}

impl Ord for EPWord {
    fn cmp(&self, other: &Self) -> Ordering {
        lex_compare(self, other)
    }
}

impl PartialOrd for EPWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn primitive_root(w: &[u8]) -> &[u8] {
    let n = w.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (d..n).all(|i| w[i] == w[i - d]) {
            return &w[..d];
        }
    }
    w
}

/// Lyndon test in the sense s^∞ ≺ σ^n(s^∞) for 0 < n < |s|.
pub fn is_lyndon(s: &FiniteWord) -> bool {
    let n = s.len();
    if n == 0 {
        return false;
    }
    let base = EPWord::periodic(s.letters());
    // A non-primitive s has a rotation equal to s^∞, so it fails; handle directly.
    if base.period().len() != n {
        return false;
    }
    (1..n).all(|k| base < base.shift(k))
}

/// Balanced test: the one-counts of equal-length factors differ by at most one.
pub fn is_balanced(a: &EPWord) -> bool {
    let (p, q) = a.smallest_period();
    let max_len = p + 2 * q;
    let starts = p + q;
    let total = starts + max_len;
    let mut prefix = vec![0usize; total + 1];
    for i in 0..total {
        prefix[i + 1] = prefix[i] + a.letter(i) as usize;
    }
    for len in 1..=max_len {
        let mut lo = usize::MAX;
        let mut hi = 0;
        for s in 0..starts {
            let c = prefix[s + len] - prefix[s];
            lo = lo.min(c);
            hi = hi.max(c);
        }
        if hi - lo > 1 {
            return false;
        }
    }
    true
}

impl fmt::Display for EPWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.pre {
            write!(f, "{b}")?;
        }
        write!(f, "(")?;
        for b in &self.per {
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for EPWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let s = s.strip_suffix("^inf").unwrap_or(&s);
        if let Some(body) = s.strip_suffix('*') {
            let bits = parse_bits(body)?;
            let (&last, pre) = bits.split_last().ok_or_else(|| Error::Parse("star needs a letter to repeat".into()))?;
            return Ok(EPWord::new(pre, &[last]));
        }
        let open = s.find('(').ok_or_else(|| Error::Parse(format!("{s:?} has no period; write pre(period) or x*")))?;
        let close = s.strip_suffix(')').ok_or_else(|| Error::Parse(format!("{s:?} must end with ')'")))?;
        let pre = parse_bits(&s[..open])?;
        let per = parse_bits(&close[open + 1..])?;
        if per.is_empty() {
            return Err(Error::Parse("empty period".into()));
        }
        Ok(EPWord::new(&pre, &per))
    }
}

impl From<EPWord> for String {
    fn from(w: EPWord) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for EPWord {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}
