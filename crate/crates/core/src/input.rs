//! Text forms for parameters: `poly:` / `rat:` / `dec:` for β, and rationals,
//! decimals or `expr:` rational expressions in b for α and other scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::itinerary::Params;
use crate::numerics::{max_real_root_in, AlgebraicReal, Poly, Scalar};

fn parse_err(what: &str, s: &str) -> Error {
    Error::Parse(format!("{what}: {s:?}"))
}

/// Integer, `p/q` or finite decimal (with optional exponent), read exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| parse_err("rational", s))?;
        let d: BigInt = d.trim().parse().map_err(|_| parse_err("rational", s))?;
        if d.is_zero() {
            return Err(parse_err("rational", s));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| parse_err("rational", s))?),
        None => (t, 0),
    };
    let (neg, body) = match mant.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(parse_err("rational", s));
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| parse_err("rational", s))?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

/// Comma separated integer coefficients, constant term first.
pub fn parse_poly(s: &str) -> Result<Poly> {
    let coeffs = s
        .split(',')
        .map(|c| c.trim().parse::<BigInt>().map_err(|_| parse_err("polynomial", s)))
        .collect::<Result<Vec<_>>>()?;
    let p = Poly::new(coeffs);
    if p.degree() == 0 || p.is_zero() {
        return Err(parse_err("polynomial of degree ≥ 1", s));
    }
    Ok(p)
}

/// A β given as text.
#[derive(Clone, Debug)]
pub enum BetaInput {
    Algebraic(AlgebraicReal),
    Float(f64),
}

impl BetaInput {
    pub fn scalar(&self, prec: u32) -> Scalar {
        match self {
            BetaInput::Algebraic(a) => Scalar::from_algebraic(a),
            BetaInput::Float(x) => Scalar::from_f64(*x, prec),
        }
    }
}

/// `poly:c0,c1,…[@lo,hi]` (largest root in (1,2) unless an interval is
/// given), `rat:p/q`, `dec:<float>`, or a bare rational.
pub fn parse_beta(s: &str) -> Result<BetaInput> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix("poly:") {
        let (coeffs, interval) = match rest.split_once('@') {
            Some((c, i)) => (c, Some(i)),
            None => (rest, None),
        };
        let p = parse_poly(coeffs)?;
        let (lo, hi) = match interval {
            Some(i) => {
                let (a, b) = i.split_once(',').ok_or_else(|| parse_err("interval lo,hi", i))?;
                (parse_rational(a)?, parse_rational(b)?)
            }
            None => (BigRational::from_integer(1.into()), BigRational::from_integer(2.into())),
        };
        let root = max_real_root_in(&p, &lo, &hi)?;
        if interval.is_some() && max_real_root_in(&p, &lo, root.lo()).is_ok() {
            return Err(Error::Parse(format!("interval {lo}..{hi} isolates more than one root")));
        }
        return Ok(BetaInput::Algebraic(root.minimized()));
    }
    if let Some(rest) = t.strip_prefix("rat:") {
        return Ok(BetaInput::Algebraic(AlgebraicReal::from_rational(&parse_rational(rest)?)));
    }
    if let Some(rest) = t.strip_prefix("dec:") {
        let x: f64 = rest.trim().parse().map_err(|_| parse_err("decimal", s))?;
        return Ok(BetaInput::Float(x));
    }
    Ok(BetaInput::Algebraic(AlgebraicReal::from_rational(&parse_rational(t)?)))
}

/// A scalar in terms of β: `expr:<expression in b>`, `dec:<float>`,
/// `rat:p/q` or a bare rational.
pub fn parse_scalar(s: &str, beta: &Scalar, prec: u32) -> Result<Scalar> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix("expr:") {
        return Expr::new(rest, beta).parse();
    }
    if let Some(rest) = t.strip_prefix("dec:") {
        let x: f64 = rest.trim().parse().map_err(|_| parse_err("decimal", s))?;
        return Ok(Scalar::from_f64(x, prec));
    }
    let body = t.strip_prefix("rat:").unwrap_or(t);
    let q = parse_rational(body)?;
    Ok(if beta.is_exact() { Scalar::rational(q) } else { Scalar::rational(q).approx(prec) })
}

/// Parameters from text. Floats anywhere switch both values to balls.
pub fn parse_params(beta: &str, alpha: &str, prec: u32) -> Result<Params> {
    let b = parse_beta(beta)?.scalar(prec);
    let a = parse_scalar(alpha, &b, prec)?;
    let (b, a) = if b.is_exact() && a.is_exact() { (b, a) } else { (b.approx(prec), a.approx(prec)) };
    Params::new(b, a)
}

/// Recursive-descent evaluator for + − * / ^ and parentheses over b.
struct Expr<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
    beta: &'a Scalar,
}

impl<'a> Expr<'a> {
    fn new(src: &'a str, beta: &'a Scalar) -> Expr<'a> {
        Expr { src, chars: src.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0, beta }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("expression {:?}: {msg} at position {}", self.src, self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Scalar> {
        let v = self.sum()?;
        if self.pos != self.chars.len() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(v)
    }

    fn sum(&mut self) -> Result<Scalar> {
        let mut v = self.product()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    v = v.add(&self.product()?);
                }
                '-' => {
                    self.pos += 1;
                    v = v.sub(&self.product()?);
                }
                _ => break,
            }
        }
        Ok(v)
    }

    fn product(&mut self) -> Result<Scalar> {
        let mut v = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    v = v.mul(&self.unary()?);
                }
                '/' => {
                    self.pos += 1;
                    v = v.div(&self.unary()?)?;
                }
                _ => break,
            }
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<Scalar> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Scalar> {
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = self.peek() == Some('-');
        if neg {
            self.pos += 1;
        }
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let e: i64 = self.chars[start..self.pos]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| self.err("integer exponent expected"))?;
        base.pow(if neg { -e } else { e })
    }

    fn atom(&mut self) -> Result<Scalar> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(self.err("missing ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some('b') => {
                self.pos += 1;
                Ok(self.beta.clone())
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                let q = parse_rational(&text)?;
                Ok(if self.beta.is_exact() {
                    Scalar::rational(q)
                } else {
                    Scalar::rational(q).approx(crate::numerics::DEFAULT_PRECISION)
                })
            }
            _ => Err(self.err("number, b or '(' expected")),
        }
    }
}

/// Reject a rational outside (0, 1).
pub fn unit_open(q: &BigRational, what: &str) -> Result<()> {
    if q.is_positive() && *q < BigRational::from_integer(1.into()) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{what} = {q} must lie in (0,1)")))
    }
}
