//! Integer and rational univariate polynomials, Sturm sequences.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

/// Integer polynomial, coefficients stored constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Parses "1,-3,1" (constant first).
    pub fn parse_coeffs(text: &str) -> Result<Self, AlgebraError> {
        let mut out = Vec::new();
        for part in text.split(',') {
            let part = part.trim();
            let c: BigInt = part
                .parse()
                .map_err(|_| AlgebraError::InvalidPolynomial(format!("bad coefficient '{part}'")))?;
            out.push(c);
        }
        Ok(Self::new(out))
    }

    /// Parses human notation such as "x^3 - x - 1" or "x^2-3x+1".
    pub fn parse_human(text: &str) -> Result<Self, AlgebraError> {
        let bad = |msg: &str| AlgebraError::InvalidPolynomial(format!("{msg} in '{text}'"));
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad("empty polynomial"));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in s.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !s[..i].ends_with('^') {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        let mut coeffs: Vec<BigInt> = Vec::new();
        for term in terms {
            let (sign, body) = match term.as_bytes().first() {
                Some(b'+') => (1, &term[1..]),
                Some(b'-') => (-1, &term[1..]),
                _ => (1, term),
            };
            if body.is_empty() {
                return Err(bad("dangling sign"));
            }
            let (coef, power) = match body.find('x') {
                None => (body.parse::<BigInt>().map_err(|_| bad("bad constant"))?, 0usize),
                Some(pos) => {
                    let c = body[..pos].trim_end_matches('*');
                    let coef = if c.is_empty() {
                        BigInt::one()
                    } else {
                        c.parse::<BigInt>().map_err(|_| bad("bad coefficient"))?
                    };
                    let rest = &body[pos + 1..];
                    let power = if rest.is_empty() {
                        1
                    } else if let Some(e) = rest.strip_prefix('^') {
                        e.parse::<usize>().map_err(|_| bad("bad exponent"))?
                    } else {
                        return Err(bad("unexpected text after x"));
                    };
                    (coef, power)
                }
            };
            if coeffs.len() <= power {
                coeffs.resize(power + 1, BigInt::zero());
            }
            coeffs[power] += coef * sign;
        }
        Ok(Self::new(coeffs))
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("nonempty")
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sign of p(m / 2^k) without building rationals.
    pub fn sign_at_dyadic(&self, m: &BigInt, k: u32) -> i32 {
        let d = self.degree();
        let mut acc = BigInt::zero();
        // Horner on the homogenised form Σ c_i m^i 2^{k(d-i)}
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * m + (c << (k as usize * (d - i)));
        }
        sign_int(&acc)
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    /// Comma-separated constant-first rendering.
    pub fn coeff_string(&self) -> String {
        self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn sign_int(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() && !(self.is_zero() && i == 0) {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Rational polynomial, constant term first, trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly {
    pub c: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        QPoly { c }
    }

    pub fn zero() -> Self {
        QPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        QPoly { c: vec![BigRational::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        let z = BigRational::zero();
        QPoly::new((0..n).map(|i| self.c.get(i).unwrap_or(&z) + o.c.get(i).unwrap_or(&z)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        let z = BigRational::zero();
        QPoly::new((0..n).map(|i| self.c.get(i).unwrap_or(&z) - o.c.get(i).unwrap_or(&z)).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn scale(&self, s: &BigRational) -> QPoly {
        QPoly::new(self.c.iter().map(|x| x * s).collect())
    }

    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.c.len() - 1;
        let mut r = self.c.clone();
        if r.len() < d.c.len() {
            return (QPoly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        let inv_lead = d.lead().recip();
        for k in (0..q.len()).rev() {
            let coef = &r[k + dd] * &inv_lead;
            if !coef.is_zero() {
                for (j, dc) in d.c.iter().enumerate() {
                    r[k + j] -= &coef * dc;
                }
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (QPoly::new(q), QPoly::new(r))
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.divrem(d).1
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    /// Returns (g, s, t) with s·a + t·b = g, g monic.
    pub fn ext_gcd(a: &QPoly, b: &QPoly) -> (QPoly, QPoly, QPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (QPoly::one(), QPoly::zero());
        let (mut t0, mut t1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lead().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, x)| x * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Converts to an integer polynomial if all coefficients are integers.
    pub fn to_int(&self) -> Option<IntPolynomial> {
        if self.is_zero() {
            return Some(IntPolynomial::new(vec![]));
        }
        let mut out = Vec::with_capacity(self.c.len());
        for x in &self.c {
            if !x.is_integer() {
                return None;
            }
            out.push(x.to_integer());
        }
        Some(IntPolynomial::new(out))
    }
}

/// Sturm sequence of a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct Sturm {
    seq: Vec<QPoly>,
}

impl Sturm {
    pub fn new(p: &QPoly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-BigRational::one()));
        }
        Sturm { seq }
    }

    fn changes<I: Iterator<Item = i32>>(signs: I) -> usize {
        let mut last = 0;
        let mut count = 0;
        for s in signs {
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn sign_q(x: &BigRational) -> i32 {
        if x.is_positive() {
            1
        } else if x.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn changes_at(&self, x: &BigRational) -> usize {
        Self::changes(self.seq.iter().map(|p| Self::sign_q(&p.eval(x))))
    }

    pub fn changes_at_pos_inf(&self) -> usize {
        Self::changes(self.seq.iter().map(|p| Self::sign_q(&p.lead())))
    }

    pub fn changes_at_neg_inf(&self) -> usize {
        Self::changes(self.seq.iter().map(|p| {
            let s = Self::sign_q(&p.lead());
            if p.degree().unwrap_or(0) % 2 == 1 {
                -s
            } else {
                s
            }
        }))
    }

    /// Number of distinct real roots in (a, b].
    pub fn count_in(&self, a: &BigRational, b: &BigRational) -> usize {
        self.changes_at(a).saturating_sub(self.changes_at(b))
    }

    /// Number of distinct real roots in (a, ∞).
    pub fn count_above(&self, a: &BigRational) -> usize {
        self.changes_at(a).saturating_sub(self.changes_at_pos_inf())
    }

    /// Number of distinct real roots in (−∞, b].
    pub fn count_below(&self, b: &BigRational) -> usize {
        self.changes_at_neg_inf().saturating_sub(self.changes_at(b))
    }
}

/// Cauchy bound: every root satisfies |x| < 1 + max|a_i| for monic input.
pub fn cauchy_bound(p: &IntPolynomial) -> BigInt {
    let lead = p.leading().abs();
    let m = p.coeffs()[..p.degree()].iter().map(|c| c.abs()).max().unwrap_or_else(BigInt::zero);
    m.div_ceil(&lead) + BigInt::one()
}

/// Integer divisors of |n| (n ≠ 0), positive only, ascending.
pub fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(x: &BigRational) -> f64 {
    let n = x.numer().to_f64().unwrap_or(f64::NAN);
    let d = x.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() && d != 0.0 {
        return n / d;
    }
    // very large parts: shift both down
    let bits = x.numer().bits().max(x.denom().bits()) as i64 - 1000;
    let shift = bits.max(0) as usize;
    let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_both_formats() {
        let a = IntPolynomial::parse_coeffs("1,-3,1").unwrap();
        let b = IntPolynomial::parse_human("x^2-3x+1").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "x^2 - 3x + 1");
        let c = IntPolynomial::parse_human("x^3 - x - 1").unwrap();
        assert_eq!(c.coeff_string(), "-1,-1,0,1");
        assert!(IntPolynomial::parse_human("x^2+").is_err());
        assert!(IntPolynomial::parse_coeffs("1,a").is_err());
    }

    #[test]
    fn dyadic_sign_matches_rational_eval() {
        let p = IntPolynomial::from_i64(&[1, -3, 1]);
        for m in -40i64..40 {
            let x = rat(m, 8);
            let v = p.to_qpoly().eval(&x);
            assert_eq!(p.sign_at_dyadic(&BigInt::from(m), 3), Sturm::sign_q(&v));
        }
    }

    #[test]
    fn sturm_counts_known_roots() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let p = IntPolynomial::from_i64(&[6, -7, 0, 1]).to_qpoly();
        let s = Sturm::new(&p);
        assert_eq!(s.count_in(&rat(0, 1), &rat(5, 2)), 2);
        assert_eq!(s.count_below(&rat(-1, 1)), 1);
        assert_eq!(s.count_above(&rat(3, 2)), 1);
    }

    #[test]
    fn ext_gcd_bezout() {
        let a = IntPolynomial::from_i64(&[-1, -1, 1]).to_qpoly();
        let b = IntPolynomial::from_i64(&[1, 1, 1]).to_qpoly();
        let (g, s, t) = QPoly::ext_gcd(&a, &b);
        assert_eq!(g, QPoly::one());
        assert_eq!(s.mul(&a).add(&t.mul(&b)), QPoly::one());
    }

    #[test]
    fn divisors() {
        let d: Vec<i64> = positive_divisors(&BigInt::from(12)).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(d, vec![1, 2, 3, 4, 6, 12]);
    }
}
