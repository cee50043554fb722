//! The β-transformation, greedy expansions, the kneading invariant, Fin(β) and Property (W).

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{in_z_inv_beta, AlgNum, PisotField, Sign};

pub const DEFAULT_CYCLE_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumerationError {
    #[error("value {0} outside [0, 1)")]
    OutOfRange(String),
    #[error("value {0} is negative")]
    Negative(String),
    #[error("no cycle found within {cap} iterations")]
    IterationBudgetExceeded { cap: usize },
    #[error("invalid interval: lo must be below hi")]
    InvalidInterval,
    #[error("{0} is not in Z[1/beta]")]
    NotInZInvBeta(String),
    #[error("malformed digit string '{0}'")]
    BadDigits(String),
}

/// A finite digit sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DigitWord(pub Vec<u32>);

impl DigitWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses "2,1,1" or "211".
    pub fn parse(text: &str) -> Result<DigitWord, NumerationError> {
        let t = text.trim();
        if t.is_empty() {
            return Ok(DigitWord(vec![]));
        }
        let bad = || NumerationError::BadDigits(text.to_string());
        if t.contains(',') {
            t.split(',').map(|s| s.trim().parse::<u32>().map_err(|_| bad())).collect::<Result<_, _>>().map(DigitWord)
        } else {
            t.chars().map(|c| c.to_digit(10).ok_or_else(bad)).collect::<Result<_, _>>().map(DigitWord)
        }
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&d| d < 10) {
            for d in &self.0 {
                write!(f, "{d}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// Renders "pre(period)"; an empty period renders as a finite word.
pub fn render_periodic(pre: &[u32], period: &[u32]) -> String {
    let wide = pre.iter().chain(period).any(|&d| d >= 10);
    let join = |w: &[u32]| {
        let v: Vec<String> = w.iter().map(|d| d.to_string()).collect();
        v.join(if wide { "," } else { "" })
    };
    if period.is_empty() {
        join(pre)
    } else {
        format!("{}({})", join(pre), join(period))
    }
}

/// Parses "pre(period)" back into its parts.
pub fn parse_periodic(text: &str) -> Result<(Vec<u32>, Vec<u32>), NumerationError> {
    let t = text.trim();
    match t.find('(') {
        None => Ok((DigitWord::parse(t)?.0, vec![])),
        Some(i) => {
            let inner = t[i + 1..].strip_suffix(')').ok_or_else(|| NumerationError::BadDigits(text.into()))?;
            let pre = DigitWord::parse(t[..i].trim_end_matches(','))?.0;
            let per = DigitWord::parse(inner)?.0;
            if per.is_empty() {
                return Err(NumerationError::BadDigits(text.into()));
            }
            Ok((pre, per))
        }
    }
}

/// The kneading invariant κ(1) = c₁…c_m (c_{m+1}…c_{m+p})^∞ with its orbit z¹ = 1, z², ….
#[derive(Clone, Debug)]
pub struct KneadingData {
    pub m: usize,
    pub p: usize,
    pub digits: DigitWord,
    pub orbit: Vec<AlgNum>,
    /// Greedy expansion d(1) when it is finite.
    pub greedy_finite: Option<DigitWord>,
}

impl KneadingData {
    /// n-th digit of the infinite stream, n ≥ 1.
    pub fn stream_digit(&self, n: usize) -> u32 {
        assert!(n >= 1);
        if n <= self.m {
            self.digits.0[n - 1]
        } else {
            self.digits.0[self.m + (n - self.m - 1) % self.p]
        }
    }

    pub fn is_simple_parry(&self) -> bool {
        self.greedy_finite.is_some()
    }

    pub fn render(&self) -> String {
        render_periodic(&self.digits.0[..self.m], &self.digits.0[self.m..])
    }

    /// Σ cᵢ β^{−i} over the infinite stream, summed in closed form.
    pub fn digit_value(&self, f: &PisotField) -> AlgNum {
        eventually_periodic_value(f, &self.digits.0[..self.m], &self.digits.0[self.m..])
    }
}

impl fmt::Display for KneadingData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Σ_{i≥1} x_i β^{−i} for x = pre (period)^∞.
pub fn eventually_periodic_value(f: &PisotField, pre: &[u32], period: &[u32]) -> AlgNum {
    let binv = f.beta().inv().expect("β ≠ 0");
    let word_value = |w: &[u32]| {
        let mut acc = f.zero();
        let mut pw = f.one();
        for &d in w {
            pw = &pw * &binv;
            acc = &acc + &pw.mul_int(&BigInt::from(d));
        }
        (acc, pw)
    };
    let (a, scale) = word_value(pre);
    if period.is_empty() {
        return a;
    }
    let (b, bp) = word_value(period);
    // b / (1 − β^{−p})
    let tail = b.checked_div(&(&f.one() - &bp)).expect("β^p ≠ 1");
    &a + &(&scale * &tail)
}

/// One step of T_β: x ↦ (⌊βx⌋, βx − ⌊βx⌋).
pub fn t_beta_step(f: &PisotField, x: &AlgNum) -> Result<(u32, AlgNum), NumerationError> {
    if x.sign() == Sign::Negative || x.cmp_value(&f.one()) != std::cmp::Ordering::Less {
        return Err(NumerationError::OutOfRange(x.render()));
    }
    Ok(t_beta_unchecked(f, x))
}

pub(crate) fn t_beta_unchecked(_f: &PisotField, x: &AlgNum) -> (u32, AlgNum) {
    let bx = x.mul_beta();
    let d = bx.floor();
    let next = &bx - &bx.field().from_int(d.clone());
    (d.to_u32().expect("digit fits in u32"), next)
}

pub fn kneading_of(f: &PisotField) -> Result<KneadingData, NumerationError> {
    kneading_with_cap(f, DEFAULT_CYCLE_CAP)
}

pub fn kneading_with_cap(f: &PisotField, cap: usize) -> Result<KneadingData, NumerationError> {
    let mut orbit = vec![f.one()];
    let mut digits = Vec::new();
    let mut seen: HashMap<AlgNum, usize> = HashMap::new();
    seen.insert(f.one(), 1);
    let mut z = f.one();
    for n in 1..=cap {
        let bz = z.mul_beta();
        let c = bz.floor();
        let next = &bz - &f.from_int(c.clone());
        digits.push(c.to_u32().expect("digit fits in u32"));
        if next.is_zero() {
            // simple Parry: quasi-greedy form (t₁…t_{n−1}(t_n − 1))^∞
            let greedy = DigitWord(digits.clone());
            let mut q = digits;
            *q.last_mut().expect("n ≥ 1") -= 1;
            let p = minimal_period(&q);
            q.truncate(p);
            orbit.truncate(p);
            return Ok(KneadingData { m: 0, p, digits: DigitWord(q), orbit, greedy_finite: Some(greedy) });
        }
        if let Some(&i) = seen.get(&next) {
            let m = i - 1;
            let p = n + 1 - i;
            return Ok(KneadingData { m, p, digits: DigitWord(digits), orbit, greedy_finite: None });
        }
        seen.insert(next.clone(), n + 1);
        orbit.push(next.clone());
        z = next;
    }
    Err(NumerationError::IterationBudgetExceeded { cap })
}

fn minimal_period(w: &[u32]) -> usize {
    let n = w.len();
    (1..=n).find(|&p| n % p == 0 && (p..n).all(|i| w[i] == w[i - p])).unwrap_or(n)
}

/// Fractional part of an expansion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fractional {
    Finite(DigitWord),
    EventuallyPeriodic { preperiod: DigitWord, period: DigitWord },
}

/// x = Σ_{i=−k}^{0} x_i β^{−i} + Σ_{i≥1} x_i β^{−i}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaExpansion {
    /// x_{−k}, …, x_0 (most significant first).
    pub integer_part_digits: DigitWord,
    pub fractional: Fractional,
}

impl BetaExpansion {
    pub fn is_finite(&self) -> bool {
        matches!(self.fractional, Fractional::Finite(_))
    }

    /// Exact value Σ x_i β^{−i}.
    pub fn value(&self, f: &PisotField) -> AlgNum {
        let mut int = f.zero();
        for &d in &self.integer_part_digits.0 {
            int = &int.mul_beta() + &f.from_int(d);
        }
        let frac = match &self.fractional {
            Fractional::Finite(w) => eventually_periodic_value(f, &w.0, &[]),
            Fractional::EventuallyPeriodic { preperiod, period } => eventually_periodic_value(f, &preperiod.0, &period.0),
        };
        &int + &frac
    }

    /// Digits x_1, x_2, … of the fractional part, n terms.
    pub fn fractional_digits(&self, n: usize) -> Vec<u32> {
        match &self.fractional {
            Fractional::Finite(w) => (0..n).map(|i| w.0.get(i).copied().unwrap_or(0)).collect(),
            Fractional::EventuallyPeriodic { preperiod, period } => (0..n)
                .map(|i| {
                    if i < preperiod.len() {
                        preperiod.0[i]
                    } else {
                        period.0[(i - preperiod.len()) % period.len()]
                    }
                })
                .collect(),
        }
    }

    pub fn render(&self) -> String {
        let frac = match &self.fractional {
            Fractional::Finite(w) => w.to_string(),
            Fractional::EventuallyPeriodic { preperiod, period } => render_periodic(&preperiod.0, &period.0),
        };
        if self.integer_part_digits.is_empty() {
            frac
        } else {
            format!("{}.{}", self.integer_part_digits, frac)
        }
    }
}

pub fn greedy_expansion(f: &PisotField, x: &AlgNum) -> Result<BetaExpansion, NumerationError> {
    greedy_expansion_with_cap(f, x, DEFAULT_CYCLE_CAP)
}

pub fn greedy_expansion_with_cap(f: &PisotField, x: &AlgNum, cap: usize) -> Result<BetaExpansion, NumerationError> {
    if x.sign() == Sign::Negative {
        return Err(NumerationError::Negative(x.render()));
    }
    // smallest K ≥ 0 with x < β^K
    let mut k = 0usize;
    let mut y = x.clone();
    let binv = f.beta().inv().expect("β ≠ 0");
    while y.cmp_value(&f.one()) != std::cmp::Ordering::Less {
        y = &y * &binv;
        k += 1;
    }
    let mut digits: Vec<u32> = Vec::new();
    let mut seen: HashMap<AlgNum, usize> = HashMap::new();
    let mut cur = y;
    for idx in 0..cap + k {
        if cur.is_zero() {
            let mut int: Vec<u32> = digits.iter().take(k).copied().collect();
            int.resize(k, 0);
            let frac: Vec<u32> = digits.iter().skip(k).copied().collect();
            return Ok(BetaExpansion {
                integer_part_digits: DigitWord(strip_leading_zeros(int)),
                fractional: Fractional::Finite(DigitWord(frac)),
            });
        }
        if let Some(&i) = seen.get(&cur) {
            let p = idx - i;
            let digit_at = |n: usize| if n < idx { digits[n] } else { digits[i + (n - i) % p] };
            let int: Vec<u32> = (0..k).map(digit_at).collect();
            let start = i.max(k);
            let pre: Vec<u32> = (k..start).map(digit_at).collect();
            let per: Vec<u32> = (start..start + p).map(digit_at).collect();
            return Ok(BetaExpansion {
                integer_part_digits: DigitWord(strip_leading_zeros(int)),
                fractional: Fractional::EventuallyPeriodic { preperiod: DigitWord(pre), period: DigitWord(per) },
            });
        }
        seen.insert(cur.clone(), idx);
        let (d, next) = t_beta_unchecked(f, &cur);
        digits.push(d);
        cur = next;
    }
    Err(NumerationError::IterationBudgetExceeded { cap })
}

fn strip_leading_zeros(mut v: Vec<u32>) -> Vec<u32> {
    let nz = v.iter().position(|&d| d != 0).unwrap_or(v.len());
    v.drain(..nz);
    v
}

/// Every suffix of `w` is lexicographically ≤ the stream of κ(1).
pub fn is_admissible(k: &KneadingData, w: &DigitWord) -> bool {
    let n = w.len();
    (0..n).all(|s| {
        for (j, &d) in w.0[s..].iter().enumerate() {
            let c = k.stream_digit(j + 1);
            if d < c {
                return true;
            }
            if d > c {
                return false;
            }
        }
        true
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FinMembership {
    Finite(BetaExpansion),
    Infinite(BetaExpansion),
}

impl FinMembership {
    pub fn is_finite(&self) -> bool {
        matches!(self, FinMembership::Finite(_))
    }

    pub fn expansion(&self) -> &BetaExpansion {
        match self {
            FinMembership::Finite(e) | FinMembership::Infinite(e) => e,
        }
    }
}

pub fn fin_membership(f: &PisotField, x: &AlgNum) -> Result<FinMembership, NumerationError> {
    let e = greedy_expansion(f, x)?;
    Ok(if e.is_finite() { FinMembership::Finite(e) } else { FinMembership::Infinite(e) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessResult {
    Witness { t: AlgNum, word: DigitWord, candidates: usize },
    NotFound { candidates: usize },
}

/// Searches t′ ∈ Fin(β) ∩ (lo, hi) with z + t′ ∈ Fin(β).
///
/// Candidates are admissible words d₁…d_n with d_n ≠ 0, by increasing n and then
/// lexicographically; each word in the interval counts against `budget`.
pub fn property_w_witness(
    f: &PisotField,
    k: &KneadingData,
    z: &AlgNum,
    lo: &BigRational,
    hi: &BigRational,
    budget: usize,
) -> Result<WitnessResult, NumerationError> {
    if lo >= hi {
        return Err(NumerationError::InvalidInterval);
    }
    if !in_z_inv_beta(z) {
        return Err(NumerationError::NotInZInvBeta(z.render()));
    }
    let lo_a = f.from_rational(lo);
    let hi_a = f.from_rational(hi);
    let max_digit = f.beta().floor().to_u32().expect("small digit");
    let binv = f.beta().inv().expect("β ≠ 0");
    let mut pows = vec![f.one()];
    let mut search = Search { f, k, z, lo: &lo_a, hi: &hi_a, max_digit, budget, candidates: 0, visited: 0, found: None };
    let mut len = 1;
    while search.candidates < budget && search.found.is_none() {
        while pows.len() <= len {
            let next = pows.last().expect("nonempty") * &binv;
            pows.push(next);
        }
        let mut word = Vec::with_capacity(len);
        search.dfs(&pows, len, &mut word, &f.zero(), &[])?;
        if search.visited > budget.saturating_mul(64).max(1 << 16) {
            break;
        }
        len += 1;
        if len > 4096 {
            break;
        }
    }
    Ok(match search.found {
        Some((t, word)) => WitnessResult::Witness { t, word, candidates: search.candidates },
        None => WitnessResult::NotFound { candidates: search.candidates },
    })
}

struct Search<'a> {
    f: &'a PisotField,
    k: &'a KneadingData,
    z: &'a AlgNum,
    lo: &'a AlgNum,
    hi: &'a AlgNum,
    max_digit: u32,
    budget: usize,
    candidates: usize,
    visited: usize,
    found: Option<(AlgNum, DigitWord)>,
}

impl Search<'_> {
    /// `tight` holds the suffix starts whose digits still equal a prefix of κ(1).
    fn dfs(
        &mut self,
        pows: &[AlgNum],
        len: usize,
        word: &mut Vec<u32>,
        value: &AlgNum,
        tight: &[usize],
    ) -> Result<(), NumerationError> {
        if self.found.is_some() || self.candidates >= self.budget {
            return Ok(());
        }
        self.visited += 1;
        let j = word.len();
        if j == len {
            if word.last().is_some_and(|&d| d != 0) && self.lo.lt(value) && value.lt(self.hi) {
                self.candidates += 1;
                let sum = self.z + value;
                if fin_membership(self.f, &sum)?.is_finite() && fin_membership(self.f, value)?.is_finite() {
                    self.found = Some((value.clone(), DigitWord(word.clone())));
                }
            }
            return Ok(());
        }
        for d in 0..=self.max_digit {
            // admissibility of all suffixes ending at position j
            let mut next_tight = Vec::with_capacity(tight.len() + 1);
            let mut ok = true;
            for &s in tight.iter().chain(std::iter::once(&j)) {
                let c = self.k.stream_digit(j - s + 1);
                if d > c {
                    ok = false;
                    break;
                }
                if d == c {
                    next_tight.push(s);
                }
            }
            if !ok {
                break;
            }
            let v = value + &pows[j + 1].mul_int(&BigInt::from(d));
            // completions lie in [v, v + β^{−(j+1)})
            if !v.lt(self.hi) {
                break;
            }
            let top = &v + &pows[j + 1];
            if !self.lo.lt(&top) {
                continue;
            }
            word.push(d);
            self.dfs(pows, len, word, &v, &next_tight)?;
            word.pop();
            if self.found.is_some() || self.candidates >= self.budget {
                break;
            }
        }
        Ok(())
    }
}

/// A two-sided digit sequence (x_i)_{i∈ℤ} whose two tails are eventually periodic.
///
/// `right_pre`/`right_period` give x₀, x₁, …; `left_pre`/`left_period` give x₋₁, x₋₂, ….
/// An empty period stands for zeros.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSidedDigits {
    pub left_pre: Vec<u32>,
    pub left_period: Vec<u32>,
    pub right_pre: Vec<u32>,
    pub right_period: Vec<u32>,
}

impl TwoSidedDigits {
    /// Digits x_{lo}…x_{lo+len−1} placed with x₀ at `zero`, all others zero.
    pub fn finite(digits: &[u32], zero: usize) -> Self {
        let mut left: Vec<u32> = digits[..zero.min(digits.len())].to_vec();
        left.reverse();
        TwoSidedDigits {
            left_pre: left,
            left_period: vec![],
            right_pre: digits[zero.min(digits.len())..].to_vec(),
            right_period: vec![],
        }
    }

    pub fn digit(&self, i: i64) -> u32 {
        fn tail(pre: &[u32], period: &[u32], k: usize) -> u32 {
            if k < pre.len() {
                pre[k]
            } else if period.is_empty() {
                0
            } else {
                period[(k - pre.len()) % period.len()]
            }
        }
        if i >= 0 {
            tail(&self.right_pre, &self.right_period, i as usize)
        } else {
            tail(&self.left_pre, &self.left_period, (-i - 1) as usize)
        }
    }

    pub fn window(&self, lo: i64, hi: i64) -> Vec<u32> {
        (lo..=hi).map(|i| self.digit(i)).collect()
    }

    /// The left shift σ: (σx)_i = x_{i+1}.
    pub fn shift(&self) -> Self {
        let mut left_pre = vec![self.digit(0)];
        left_pre.extend_from_slice(&self.left_pre);
        let (right_pre, right_period) = if !self.right_pre.is_empty() {
            (self.right_pre[1..].to_vec(), self.right_period.clone())
        } else if self.right_period.is_empty() {
            (vec![], vec![])
        } else {
            let mut p = self.right_period.clone();
            p.rotate_left(1);
            (vec![], p)
        };
        TwoSidedDigits { left_pre, left_period: self.left_period.clone(), right_pre, right_period }
    }

    /// The inverse shift: (σ⁻¹x)_i = x_{i−1}.
    pub fn unshift(&self) -> Self {
        let mut right_pre = vec![self.digit(-1)];
        right_pre.extend_from_slice(&self.right_pre);
        let (left_pre, left_period) = if !self.left_pre.is_empty() {
            (self.left_pre[1..].to_vec(), self.left_period.clone())
        } else if self.left_period.is_empty() {
            (vec![], vec![])
        } else {
            let mut p = self.left_period.clone();
            p.rotate_left(1);
            (vec![], p)
        };
        TwoSidedDigits { left_pre, left_period, right_pre, right_period: self.right_period.clone() }
    }

    /// Index range [lo, hi] beyond which both tails are purely periodic.
    pub fn periodic_span(&self) -> (i64, i64) {
        (-(self.left_pre.len() as i64) - 1, self.right_pre.len() as i64)
    }

    /// Checks every window of length `len` that covers the non-periodic core and one full
    /// period on each side.
    pub fn is_admissible(&self, k: &KneadingData, len: usize) -> bool {
        let (lo, hi) = self.periodic_span();
        let lo = lo - self.left_period.len() as i64 - 1;
        let hi = hi + self.right_period.len() as i64 + 1;
        (lo..=hi).all(|s| is_admissible(k, &DigitWord(self.window(s, s + len as i64 - 1))))
    }
}

#[cfg(test)]
mod tests;
