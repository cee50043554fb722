//! The β-substitution ψ_β, its abelianization and Perron data, and language checks.
//!
//! Letters are stored 0-based: letter `i` is the prototile τ_{i+1}. Rendering is 1-based.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::linalg::{alg_kernel_vector, char_poly, transpose, IntMatrix};
use crate::algebra::{verify_pisot, AlgNum, AlgebraError, IntPolynomial, PisotField, QPoly, Sign};
use crate::numeration::{kneading_of, parse_periodic, KneadingData};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubstitutionError {
    #[error("β is an integer; the tiling space is a circle and is not analyzed")]
    IntegerBeta,
    #[error("characteristic polynomial is not divisible by the minimal polynomial: {0}")]
    PerronMismatch(String),
    #[error("length identity fails for letter {letter}")]
    LengthMismatch { letter: usize },
    #[error("invalid rule: {0}")]
    InvalidRule(String),
}

/// The marked interval τ_index = [min, max] ⊂ [0, 1].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prototile {
    pub index: usize,
    pub min: AlgNum,
    pub max: AlgNum,
    pub length: AlgNum,
}

#[derive(Clone, Debug)]
pub struct SubstitutionRule {
    field: PisotField,
    kneading: KneadingData,
    prototiles: Vec<Prototile>,
    words: Vec<Vec<usize>>,
    /// `minus[j-1]` is the letter whose tile ends at z^j.
    minus: Vec<usize>,
    /// `plus[j-1]` is the letter whose tile starts at z^j (none for z¹ = 1).
    plus: Vec<Option<usize>>,
}

impl SubstitutionRule {
    pub fn field(&self) -> &PisotField {
        &self.field
    }

    pub fn kneading(&self) -> &KneadingData {
        &self.kneading
    }

    pub fn prototiles(&self) -> &[Prototile] {
        &self.prototiles
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn word(&self, letter: usize) -> &[usize] {
        &self.words[letter]
    }

    pub fn length(&self, letter: usize) -> &AlgNum {
        &self.prototiles[letter].length
    }

    pub fn lengths(&self) -> Vec<AlgNum> {
        self.prototiles.iter().map(|t| t.length.clone()).collect()
    }

    pub fn min_length(&self) -> &AlgNum {
        self.prototiles
            .iter()
            .map(|t| &t.length)
            .min_by(|a, b| a.cmp_value(b))
            .expect("at least one tile")
    }

    /// τ_-^j: the letter whose tile has max = z^j (j is 1-based along the orbit).
    pub fn tau_minus(&self, j: usize) -> usize {
        self.minus[j - 1]
    }

    /// τ_+^j: the letter whose tile has min = z^j.
    pub fn tau_plus(&self, j: usize) -> Option<usize> {
        self.plus[j - 1]
    }

    pub fn first_letter(&self, letter: usize) -> usize {
        self.words[letter][0]
    }

    pub fn last_letter(&self, letter: usize) -> usize {
        *self.words[letter].last().expect("nonempty word")
    }

    /// Letter of the tile with min ≤ x < max, for 0 ≤ x < 1.
    pub fn tile_of_point(&self, x: &AlgNum) -> usize {
        self.prototiles.iter().position(|t| x.lt(&t.max)).expect("0 ≤ x < 1")
    }

    pub fn apply(&self, word: &[usize]) -> Vec<usize> {
        word.iter().flat_map(|&c| self.words[c].iter().copied()).collect()
    }

    pub fn iterate(&self, letter: usize, n: usize) -> Vec<usize> {
        let mut w = vec![letter];
        for _ in 0..n {
            w = self.apply(&w);
        }
        w
    }

    pub fn render(&self) -> String {
        render_words(&self.words)
    }
}

impl fmt::Display for SubstitutionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn render_word(w: &[usize], wide: bool) -> String {
    let parts: Vec<String> = w.iter().map(|c| (c + 1).to_string()).collect();
    parts.join(if wide { "," } else { "" })
}

/// "1->121; 2->21"; letters are comma separated once the alphabet exceeds nine letters.
pub fn render_words(words: &[Vec<usize>]) -> String {
    let wide = words.len() > 9;
    words
        .iter()
        .enumerate()
        .map(|(i, w)| format!("{}->{}", i + 1, render_word(w, wide)))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Parses "1->12; 2->21" into 0-based words.
pub fn parse_rule(text: &str) -> Result<Vec<Vec<usize>>, SubstitutionError> {
    let bad = || SubstitutionError::InvalidRule(text.to_string());
    let mut words = Vec::new();
    for (i, part) in text.split(';').map(str::trim).filter(|s| !s.is_empty()).enumerate() {
        let (lhs, rhs) = part.split_once("->").ok_or_else(bad)?;
        if lhs.trim().parse::<usize>().map_err(|_| bad())? != i + 1 {
            return Err(bad());
        }
        let rhs = rhs.trim();
        let letters: Vec<usize> = if rhs.contains(',') {
            rhs.split(',').map(|s| s.trim().parse::<usize>().map_err(|_| bad())).collect::<Result<_, _>>()?
        } else {
            rhs.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect::<Result<_, _>>()?
        };
        if letters.is_empty() || letters.contains(&0) {
            return Err(bad());
        }
        words.push(letters.into_iter().map(|c| c - 1).collect::<Vec<_>>());
    }
    let n = words.len();
    if n == 0 || words.iter().flatten().any(|&c| c >= n) {
        return Err(bad());
    }
    Ok(words)
}

pub fn build_substitution(k: &KneadingData, f: &PisotField) -> Result<SubstitutionRule, SubstitutionError> {
    if f.degree() == 1 {
        return Err(SubstitutionError::IntegerBeta);
    }
    let mut points: Vec<AlgNum> = k.orbit.clone();
    points.push(f.zero());
    points.sort_by(|a, b| a.cmp_value(b));
    points.dedup();
    let prototiles: Vec<Prototile> = points
        .windows(2)
        .enumerate()
        .map(|(i, w)| Prototile { index: i + 1, min: w[0].clone(), max: w[1].clone(), length: &w[1] - &w[0] })
        .collect();
    let n = prototiles.len();
    let mut words = Vec::with_capacity(n);
    for tile in &prototiles {
        let a = tile.min.mul_beta();
        let b = tile.max.mul_beta();
        let mut word = Vec::new();
        let mut cut = a.floor();
        loop {
            let base = f.from_int(cut.clone());
            if !base.lt(&b) {
                break;
            }
            let lo = if a.lt(&base) { f.zero() } else { &a - &base };
            let top = f.from_int(cut.clone() + 1);
            let hi = if b.lt(&top) { &b - &base } else { f.one() };
            for (j, t) in prototiles.iter().enumerate() {
                if lo.lt(&t.max) && t.min.lt(&hi) {
                    word.push(j);
                }
            }
            cut += 1;
        }
        words.push(word);
    }
    for (i, w) in words.iter().enumerate() {
        let total = w.iter().fold(f.zero(), |acc, &c| &acc + &prototiles[c].length);
        if total != prototiles[i].length.mul_beta() {
            return Err(SubstitutionError::LengthMismatch { letter: i + 1 });
        }
    }
    let minus = k
        .orbit
        .iter()
        .map(|z| prototiles.iter().position(|t| &t.max == z).expect("orbit point is a breakpoint"))
        .collect();
    let plus = k.orbit.iter().map(|z| prototiles.iter().position(|t| &t.min == z)).collect();
    Ok(SubstitutionRule { field: f.clone(), kneading: k.clone(), prototiles, words, minus, plus })
}

/// a_ij = number of occurrences of letter j in ψ(i).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubstitutionMatrix {
    pub entries: Vec<Vec<u64>>,
}

impl SubstitutionMatrix {
    pub fn from_words(words: &[Vec<usize>]) -> Self {
        let n = words.len();
        let entries = words
            .iter()
            .map(|w| {
                let mut row = vec![0u64; n];
                for &c in w {
                    row[c] += 1;
                }
                row
            })
            .collect();
        SubstitutionMatrix { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn as_int(&self) -> IntMatrix {
        self.entries.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    /// The action M = Aᵀ on ℤⁿ: a tile of type i abelianizes to e_i and Ψ sends e_i to Σ_j a_ij e_j.
    pub fn abelianization(&self) -> IntMatrix {
        transpose(&self.as_int())
    }

    /// Wielandt test: some power A^k with k ≤ n² − 2n + 2 is strictly positive.
    pub fn is_primitive(&self) -> bool {
        let n = self.size();
        let base: Vec<Vec<bool>> = self.entries.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
        let mut cur = base.clone();
        let bound = (n * n).saturating_sub(2 * n) + 2;
        for _ in 0..bound {
            if cur.iter().all(|r| r.iter().all(|&x| x)) {
                return true;
            }
            cur = (0..n).map(|i| (0..n).map(|j| (0..n).any(|t| cur[i][t] && base[t][j])).collect()).collect();
        }
        cur.iter().all(|r| r.iter().all(|&x| x))
    }
}

/// Perron data of M = Aᵀ: l M = β l, M ω = β ω, ⟨l, ω⟩ = 1.
#[derive(Clone, Debug)]
pub struct PerronData {
    pub char_poly: IntPolynomial,
    pub q_factor: IntPolynomial,
    pub l: Vec<AlgNum>,
    pub omega: Vec<AlgNum>,
}

fn exact_quotient(p: &IntPolynomial, d: &IntPolynomial) -> Option<IntPolynomial> {
    let (q, r) = p.to_qpoly().divrem(&d.to_qpoly());
    if r.is_zero() {
        q.to_int()
    } else {
        None
    }
}

pub fn abelianize_and_perron(
    r: &SubstitutionRule,
    f: &PisotField,
) -> Result<(SubstitutionMatrix, PerronData, bool), SubstitutionError> {
    let a = SubstitutionMatrix::from_words(r.words());
    let cp = char_poly(&a.as_int());
    let q = exact_quotient(&cp, f.minpoly()).ok_or_else(|| SubstitutionError::PerronMismatch(cp.to_string()))?;
    let (g, _, _) = QPoly::ext_gcd(&f.minpoly().to_qpoly(), &q.to_qpoly());
    if g.degree() != Some(0) {
        return Err(SubstitutionError::PerronMismatch(format!("{cp} has β as a repeated root")));
    }
    let m = a.abelianization();
    let n = a.size();
    let beta = f.beta();
    let shifted: Vec<Vec<AlgNum>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { &f.from_int(m[i][j].clone()) - &beta } else { f.from_int(m[i][j].clone()) }).collect())
        .collect();
    let raw = alg_kernel_vector(f, &shifted).ok_or_else(|| SubstitutionError::PerronMismatch("β eigenspace is not a line".into()))?;
    let l = r.lengths();
    let dot = l.iter().zip(&raw).fold(f.zero(), |acc, (x, y)| &acc + &(x * y));
    let scale = dot.inv().map_err(|_| SubstitutionError::PerronMismatch("⟨l, ω⟩ = 0".into()))?;
    let omega: Vec<AlgNum> = raw.iter().map(|x| x * &scale).collect();
    if omega.iter().any(|x| x.sign() != Sign::Positive) {
        return Err(SubstitutionError::PerronMismatch("ω is not positive".into()));
    }
    let primitive = a.is_primitive();
    Ok((a, PerronData { char_poly: cp, q_factor: q, l, omega }, primitive))
}

/// Row vector times M and M times column vector, used to check the eigen-identities.
pub fn left_mul(v: &[AlgNum], m: &IntMatrix) -> Vec<AlgNum> {
    let n = m.len();
    (0..n)
        .map(|j| (0..n).fold(v[0].field().zero(), |acc, i| &acc + &v[i].mul_int(&m[i][j])))
        .collect()
}

pub fn right_mul(m: &IntMatrix, v: &[AlgNum]) -> Vec<AlgNum> {
    m.iter().map(|row| row.iter().zip(v).fold(v[0].field().zero(), |acc, (c, x)| &acc + &x.mul_int(c))).collect()
}

/// Outcome of one language property check; `offending` is the first violating factor (1-based letters).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub holds: bool,
    pub offending: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageReport {
    pub depth: usize,
    pub factors: Vec<String>,
    pub property1: PropertyOutcome,
    pub property2: PropertyOutcome,
    pub property3: PropertyOutcome,
}

impl LanguageReport {
    pub fn all_hold(&self) -> bool {
        self.property1.holds && self.property2.holds && self.property3.holds
    }
}

/// All two-letter factors of ψⁿ(i) for n ≤ depth and every letter i.
///
/// Factors of ψⁿ⁺¹(i) are the factors inside the words ψ(c), c a letter of ψⁿ(i), plus
/// (last ψ(a), first ψ(b)) for each factor ab of ψⁿ(i).
pub fn two_letter_factors(words: &[Vec<usize>], depth: usize) -> BTreeSet<(usize, usize)> {
    let mut all = BTreeSet::new();
    for start in 0..words.len() {
        let mut letters: BTreeSet<usize> = [start].into();
        let mut factors: BTreeSet<(usize, usize)> = BTreeSet::new();
        for _ in 0..depth {
            let mut nf = BTreeSet::new();
            let mut nl = BTreeSet::new();
            for &c in &letters {
                let w = &words[c];
                nl.extend(w.iter().copied());
                nf.extend(w.windows(2).map(|p| (p[0], p[1])));
            }
            for &(a, b) in &factors {
                nf.insert((*words[a].last().expect("nonempty"), words[b][0]));
            }
            letters = nl;
            factors = nf;
            all.extend(factors.iter().copied());
        }
    }
    all
}

fn factor_string(a: usize, b: usize) -> String {
    format!("{}{}", a + 1, b + 1)
}

pub fn verify_language_properties(words: &[Vec<usize>], depth: usize) -> LanguageReport {
    let fs = two_letter_factors(words, depth.max(1));
    // Property 1: ab with b ≠ 1 forces a = b − 1
    let p1 = fs.iter().find(|&&(a, b)| b != 0 && a + 1 != b);
    // Property 2: ab, ac with b ≠ c forces 1 ∈ {b, c}
    let mut p2 = None;
    'outer2: for &(a, b) in &fs {
        for &(a2, c) in fs.range((a, 0)..(a + 1, 0)) {
            if a2 == a && b < c && b != 0 && c != 0 {
                p2 = Some(format!("{},{}", factor_string(a, b), factor_string(a, c)));
                break 'outer2;
            }
        }
    }
    // Property 3: ac, bc with a ≠ b forces c = 1
    let mut p3 = None;
    'outer3: for &(a, c) in &fs {
        for &(b, c2) in &fs {
            if c2 == c && a < b && c != 0 {
                p3 = Some(format!("{},{}", factor_string(a, c), factor_string(b, c)));
                break 'outer3;
            }
        }
    }
    let outcome = |o: Option<String>| PropertyOutcome { holds: o.is_none(), offending: o };
    LanguageReport {
        depth,
        factors: fs.iter().map(|&(a, b)| factor_string(a, b)).collect(),
        property1: outcome(p1.map(|&(a, b)| factor_string(a, b))),
        property2: outcome(p2),
        property3: outcome(p3),
    }
}

/// P with P(β) = 0 whenever Σ cᵢ β^{−i} = 1 for the digits pre (period)^∞:
/// x^m (x^p − 1) − (x^p − 1) Σ_{i≤m} cᵢ x^{m−i} − Σ_{j≤p} c_{m+j} x^{p−j}.
pub fn kneading_polynomial(pre: &[u32], period: &[u32]) -> IntPolynomial {
    let m = pre.len();
    let p = period.len();
    let mut c = vec![BigInt::zero(); m + p + 1];
    if p == 0 {
        // finite expansion: x^m − Σ cᵢ x^{m−i}
        c[m] = BigInt::one();
        for (i, &d) in pre.iter().enumerate() {
            c[m - i - 1] -= BigInt::from(d);
        }
        return IntPolynomial::new(c);
    }
    c[m + p] += 1;
    c[m] -= 1;
    for (i, &d) in pre.iter().enumerate() {
        let e = m - i - 1;
        c[e + p] -= BigInt::from(d);
        c[e] += BigInt::from(d);
    }
    for (j, &d) in period.iter().enumerate() {
        c[p - j - 1] -= BigInt::from(d);
    }
    IntPolynomial::new(c)
}

/// Integer roots of a monic polynomial (with multiplicity) and the remaining cofactor.
pub fn split_integer_roots(p: &IntPolynomial) -> (Vec<BigInt>, IntPolynomial) {
    let mut rest = p.clone();
    let mut roots = Vec::new();
    loop {
        let c0 = rest.coeffs()[0].clone();
        let cand: Vec<BigInt> = if c0.is_zero() {
            vec![BigInt::zero()]
        } else {
            crate::algebra::poly::positive_divisors(&c0).into_iter().flat_map(|d| [d.clone(), -d]).collect()
        };
        let Some(r) = cand.into_iter().find(|r| rest.degree() > 0 && rest.eval_int(r).is_zero()) else { break };
        let lin = IntPolynomial::new(vec![-r.clone(), BigInt::one()]);
        rest = exact_quotient(&rest, &lin).expect("root divides");
        roots.push(r);
    }
    (roots, rest)
}

/// Cross-check of a claimed kneading sequence against a claimed rule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub claimed_kneading: String,
    pub claimed_rule: String,
    /// Polynomial forced on β by the claimed digits.
    pub kneading_polynomial: String,
    /// Outcome of Pisot verification of that polynomial.
    pub kneading_polynomial_verdict: String,
    /// Characteristic polynomial of the claimed rule's matrix.
    pub rule_char_poly: String,
    pub rule_integer_roots: Vec<String>,
    pub rule_cofactor: String,
    /// Kneading sequence and rule rebuilt from the Pisot factor of the rule's polynomial, when there is one.
    pub rebuilt_kneading: Option<String>,
    pub rebuilt_rule: Option<String>,
    pub consistent: bool,
}

pub const DISCREPANCY_KNEADING: &str = "22(01)";
pub const DISCREPANCY_RULE: &str = "1->12; 2->34; 3->2341; 4->23";

pub fn discrepancy_check(kneading_text: &str, rule_text: &str) -> Result<DiscrepancyReport, SubstitutionError> {
    let (pre, period) = parse_periodic(kneading_text).map_err(|e| SubstitutionError::InvalidRule(e.to_string()))?;
    let words = parse_rule(rule_text)?;
    let kp = kneading_polynomial(&pre, &period);
    let verdict = match verify_pisot(&kp) {
        Ok(f) => format!("Pisot, β ≈ {:.6}", f.beta_f64()),
        Err(e) => format!("rejected: {e}"),
    };
    let matrix = SubstitutionMatrix::from_words(&words);
    let cp = char_poly(&matrix.as_int());
    let (roots, cof) = split_integer_roots(&cp);
    let rebuilt = verify_pisot(&cof).ok().and_then(|f| {
        let k = kneading_of(&f).ok()?;
        let r = build_substitution(&k, &f).ok()?;
        Some((k.render(), r.render()))
    });
    let consistent = matches!(&rebuilt, Some((k, r)) if k == kneading_text && r == &render_words(&words))
        && verify_pisot(&kp).is_ok();
    Ok(DiscrepancyReport {
        claimed_kneading: kneading_text.to_string(),
        claimed_rule: render_words(&words),
        kneading_polynomial: kp.to_string(),
        kneading_polynomial_verdict: verdict,
        rule_char_poly: cp.to_string(),
        rule_integer_roots: roots.iter().map(ToString::to_string).collect(),
        rule_cofactor: cof.to_string(),
        rebuilt_kneading: rebuilt.as_ref().map(|r| r.0.clone()),
        rebuilt_rule: rebuilt.map(|r| r.1),
        consistent,
    })
}

/// Builds field, kneading data and rule from a polynomial in one step.
pub fn rule_from_polynomial(p: &IntPolynomial) -> Result<SubstitutionRule, RuleBuildError> {
    let f = verify_pisot(p)?;
    let k = kneading_of(&f)?;
    Ok(build_substitution(&k, &f)?)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuleBuildError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Numeration(#[from] crate::numeration::NumerationError),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
}

/// Rational helper for callers that need ⟨l, v⟩ with an integer vector.
pub fn length_pairing(l: &[AlgNum], v: &[BigRational]) -> AlgNum {
    l.iter().zip(v).fold(l[0].field().zero(), |acc, (x, c)| &acc + &x.mul_rational(c))
}

#[cfg(test)]
mod tests;
