//! Exact tilings of ℝ generated by ψ_β, the actions of Ψ_β and of translations, coincidence
//! scans, asymptotic pairs and digit itineraries.
//!
//! A [`SubstitutiveTiling`] is stored as a seed pair (a, b) and a translation s: the tiling is
//! …ψ^{nq}(a).ψ^{nq}(b)… with the dot at 0, shifted by s. Windows are produced by descending
//! through supertiles, so every tile offset is exact.

use std::collections::HashSet;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgNum, Sign};
use crate::numeration::{greedy_expansion, t_beta_unchecked, Fractional, TwoSidedDigits};
use crate::substitution::{two_letter_factors, SubstitutionRule};

pub const DEFAULT_BUDGET: usize = 60;
pub const DEFAULT_GRID: usize = 64;
const LEFT_TAIL_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TilingError {
    #[error("seed ({a}, {b}) is not fixed by the power {q} of the substitution")]
    NotFixed { a: usize, b: usize, q: usize },
    #[error("no type-1 tile in [-1, 0]")]
    NoTypeOneTile,
    #[error("itinerary identity fails at step {0}")]
    IdentityFailed(i64),
    #[error("left itinerary did not stabilize within {0} steps")]
    LeftTailCap(usize),
}

/// τ_letter + offset, with 0-based letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tile {
    pub letter: usize,
    pub offset: AlgNum,
}

impl Tile {
    pub fn start(&self, r: &SubstitutionRule) -> AlgNum {
        &r.prototiles()[self.letter].min + &self.offset
    }

    pub fn end(&self, r: &SubstitutionRule) -> AlgNum {
        &r.prototiles()[self.letter].max + &self.offset
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patch {
    pub tiles: Vec<Tile>,
}

impl Patch {
    pub fn letters(&self) -> Vec<usize> {
        self.tiles.iter().map(|t| t.letter).collect()
    }

    pub fn translate(&self, t: &AlgNum) -> Patch {
        Patch { tiles: self.tiles.iter().map(|x| Tile { letter: x.letter, offset: &x.offset - t }).collect() }
    }

    /// Consecutive supports share endpoints exactly.
    pub fn abuts(&self, r: &SubstitutionRule) -> bool {
        self.tiles.windows(2).all(|w| w[0].end(r) == w[1].start(r))
    }

    /// Ψ_β applied tile by tile: τ_c + t becomes ψ(c) laid out from β(min τ_c + t).
    pub fn substitute(&self, r: &SubstitutionRule) -> Patch {
        let mut tiles = Vec::new();
        for t in &self.tiles {
            let mut pos = t.start(r).mul_beta();
            for &c in r.word(t.letter) {
                tiles.push(Tile { letter: c, offset: &pos - &r.prototiles()[c].min });
                pos = &pos + r.length(c);
            }
        }
        Patch { tiles }
    }

    /// Tiles whose interior meets (lo, hi).
    pub fn clip(&self, r: &SubstitutionRule, lo: &AlgNum, hi: &AlgNum) -> Patch {
        Patch { tiles: self.tiles.iter().filter(|t| t.start(r).lt(hi) && lo.lt(&t.end(r))).cloned().collect() }
    }

    pub fn render(&self, r: &SubstitutionRule) -> Vec<String> {
        self.tiles.iter().map(|t| format!("{}:[{}, {}]", t.letter + 1, t.start(r), t.end(r))).collect()
    }
}

/// Shared rule data with memoized supertile lengths β^k ℓ_c.
#[derive(Debug)]
struct Engine {
    rule: Arc<SubstitutionRule>,
    scaled: RwLock<Vec<Vec<AlgNum>>>,
}

impl Engine {
    fn new(rule: Arc<SubstitutionRule>) -> Arc<Engine> {
        let base = rule.lengths();
        Arc::new(Engine { rule, scaled: RwLock::new(vec![base]) })
    }

    fn scaled(&self, k: usize, c: usize) -> AlgNum {
        {
            let g = self.scaled.read().expect("lock");
            if k < g.len() {
                return g[k][c].clone();
            }
        }
        let mut g = self.scaled.write().expect("lock");
        while g.len() <= k {
            let next = g.last().expect("level 0").iter().map(AlgNum::mul_beta).collect();
            g.push(next);
        }
        g[k][c].clone()
    }
}

/// The tiling …ψ^{nq}(left).ψ^{nq}(right)… + shift.
#[derive(Clone, Debug)]
pub struct SubstitutiveTiling {
    engine: Arc<Engine>,
    left: usize,
    right: usize,
    q: usize,
    shift: AlgNum,
}

impl PartialEq for SubstitutiveTiling {
    fn eq(&self, o: &Self) -> bool {
        self.left == o.left && self.right == o.right && self.shift == o.shift
    }
}

fn last_power(r: &SubstitutionRule, a: usize, k: usize) -> usize {
    (0..k).fold(a, |x, _| r.last_letter(x))
}

fn first_power(r: &SubstitutionRule, b: usize, k: usize) -> usize {
    (0..k).fold(b, |x, _| r.first_letter(x))
}

impl SubstitutiveTiling {
    pub fn new(rule: Arc<SubstitutionRule>, left: usize, right: usize, q: usize) -> Result<Self, TilingError> {
        let shift = rule.field().zero();
        Self::with_engine(Engine::new(rule), left, right, q, shift)
    }

    fn with_engine(engine: Arc<Engine>, left: usize, right: usize, q: usize, shift: AlgNum) -> Result<Self, TilingError> {
        let r = &engine.rule;
        if q == 0 || last_power(r, left, q) != left || first_power(r, right, q) != right {
            return Err(TilingError::NotFixed { a: left, b: right, q });
        }
        Ok(SubstitutiveTiling { engine, left, right, q, shift })
    }

    pub fn rule(&self) -> &SubstitutionRule {
        &self.engine.rule
    }

    pub fn seeds(&self) -> (usize, usize) {
        (self.left, self.right)
    }

    pub fn period(&self) -> usize {
        self.q
    }

    pub fn shift(&self) -> &AlgNum {
        &self.shift
    }

    /// T − t.
    pub fn translate(&self, t: &AlgNum) -> Self {
        SubstitutiveTiling { shift: &self.shift - t, ..self.clone() }
    }

    /// Ψ_β(T).
    pub fn substitute(&self) -> Self {
        let r = self.rule();
        SubstitutiveTiling {
            left: r.last_letter(self.left),
            right: r.first_letter(self.right),
            shift: self.shift.mul_beta(),
            ..self.clone()
        }
    }

    /// Ψ_β⁻¹(T).
    pub fn unsubstitute(&self) -> Self {
        let r = self.rule();
        let binv = r.field().beta().inv().expect("β ≠ 0");
        SubstitutiveTiling {
            left: last_power(r, self.left, self.q - 1),
            right: first_power(r, self.right, self.q - 1),
            shift: &self.shift * &binv,
            ..self.clone()
        }
    }

    /// Ψ_β^k(T) for any integer k.
    pub fn power(&self, k: i64) -> Self {
        let mut t = self.clone();
        let step = if k >= 0 { Self::substitute } else { Self::unsubstitute };
        for _ in 0..k.unsigned_abs() {
            t = step(&t);
        }
        t
    }

    /// Smallest multiple n of q with β^n ℓ_c > need.
    fn cover_level(&self, c: usize, need: &AlgNum) -> usize {
        let mut n = 0;
        while !need.lt(&self.engine.scaled(n, c)) {
            n += self.q;
        }
        n
    }

    fn descend(&self, letter: usize, start: AlgNum, level: usize, lo: &AlgNum, hi: &AlgNum, out: &mut Vec<Tile>) {
        let r = self.rule();
        if level == 0 {
            out.push(Tile { letter, offset: &start - &r.prototiles()[letter].min });
            return;
        }
        let mut pos = start;
        for &c in r.word(letter) {
            if !pos.lt(hi) {
                break;
            }
            let end = &pos + &self.engine.scaled(level - 1, c);
            if lo.lt(&end) {
                self.descend(c, pos.clone(), level - 1, lo, hi, out);
            }
            pos = end;
        }
    }

    /// Tiles whose interior meets (lo, hi), in order.
    pub fn window(&self, lo: &AlgNum, hi: &AlgNum) -> Patch {
        assert!(lo.lt(hi), "window needs lo < hi");
        let a = lo - &self.shift;
        let b = hi - &self.shift;
        let zero = self.rule().field().zero();
        let mut tiles = Vec::new();
        if a.sign() == Sign::Negative {
            let n = self.cover_level(self.left, &-&a);
            let start = -&self.engine.scaled(n, self.left);
            let top = if b.lt(&zero) { b.clone() } else { zero.clone() };
            self.descend(self.left, start, n, &a, &top, &mut tiles);
        }
        if b.sign() == Sign::Positive {
            let n = self.cover_level(self.right, &b);
            let bottom = if zero.lt(&a) { a.clone() } else { zero.clone() };
            self.descend(self.right, zero, n, &bottom, &b, &mut tiles);
        }
        Patch { tiles }.translate(&-&self.shift)
    }

    /// The tile τ_i + offset with min ≤ u < max.
    pub fn tile_at(&self, u: &AlgNum) -> Tile {
        let r = self.rule();
        let v = u - &self.shift;
        let (mut letter, mut pos, mut level) = if v.sign() == Sign::Negative {
            let n = self.cover_level(self.left, &-&v);
            (self.left, -&self.engine.scaled(n, self.left), n)
        } else {
            (self.right, r.field().zero(), self.cover_level(self.right, &v))
        };
        while level > 0 {
            let mut next = None;
            for &c in r.word(letter) {
                let end = &pos + &self.engine.scaled(level - 1, c);
                if v.lt(&end) {
                    next = Some(c);
                    break;
                }
                pos = end;
            }
            letter = next.expect("point inside its supertile");
            level -= 1;
        }
        Tile { letter, offset: &(&pos - &r.prototiles()[letter].min) + &self.shift }
    }

    /// g(T) ∈ [0, 1): the point of the prototile sitting at the origin, so Ψ acts as T_β on it.
    pub fn origin_point(&self) -> AlgNum {
        -&self.tile_at(&self.rule().field().zero()).offset
    }

    /// t_*(T) = sup{t ≤ 0 : τ₁ + t ∈ T}, found by scanning the window [−1, 0].
    pub fn t_star(&self) -> Result<AlgNum, TilingError> {
        let f = self.rule().field();
        let w = self.window(&f.from_int(-1), self.rule().min_length());
        w.tiles
            .iter()
            .filter(|t| t.letter == 0 && t.offset.sign() != Sign::Positive)
            .map(|t| t.offset.clone())
            .max_by(|a, b| a.cmp_value(b))
            .ok_or(TilingError::NoTypeOneTile)
    }

    /// x_i(T) = ⌊−β t_*(Ψ^i T)⌋ for i_lo ≤ i ≤ i_hi, with −t_*(Ψ T) = T_β(−t_*(T)) checked at
    /// every step.
    pub fn digit_itinerary(&self, i_lo: i64, i_hi: i64) -> Result<Vec<u32>, TilingError> {
        let f = self.rule().field().clone();
        let mut t = self.power(i_lo);
        let mut x = -&t.t_star()?;
        let mut out = Vec::new();
        for i in i_lo..=i_hi {
            let (d, next) = t_beta_unchecked(&f, &x);
            out.push(d);
            if i < i_hi {
                t = t.substitute();
                let y = -&t.t_star()?;
                if y != next {
                    return Err(TilingError::IdentityFailed(i + 1));
                }
                x = y;
            }
        }
        Ok(out)
    }

    /// The full sequence (x_i(T))_{i∈ℤ} in closed form.
    ///
    /// The right half is the greedy expansion of −t_*(T). On the left, the origin sits at
    /// β^{−j}·(−s) in seed coordinates of Ψ^{−j}(T), so the digits settle on a q-periodic
    /// pattern once that point is closer to the seed junction than any tile length.
    pub fn two_sided_itinerary(&self) -> Result<TwoSidedDigits, TilingError> {
        let r = self.rule();
        let f = r.field();
        let g = self.origin_point();
        let e = greedy_expansion(f, &g).expect("0 ≤ g < 1");
        let (right_pre, right_period) = match e.fractional {
            Fractional::Finite(w) => (w.0, vec![]),
            Fractional::EventuallyPeriodic { preperiod, period } => (preperiod.0, period.0),
        };

        let binv = f.beta().inv().expect("β ≠ 0");
        let lmin = r.min_length().clone();
        let mut seeds = SubstitutiveTiling { shift: f.zero(), ..self.clone() };
        let mut u = -&self.shift;
        let mut digits = Vec::new();
        let mut run = 0;
        for j in 1..=LEFT_TAIL_CAP {
            seeds = seeds.unsubstitute();
            u = &u * &binv;
            let tile = seeds.tile_at(&u);
            let d = t_beta_unchecked(f, &(&u - &tile.offset)).0;
            digits.push(d);
            let near = if u.sign() == Sign::Negative { (-&u).lt(&lmin) } else { u.lt(&lmin) };
            let settled = near && {
                let limit = if u.sign() == Sign::Negative {
                    let top = r.prototiles()[seeds.left].max.mul_beta();
                    let c = top.floor();
                    let c = if f.from_int(c.clone()) == top { c - 1 } else { c };
                    c
                } else {
                    r.prototiles()[seeds.right].min.mul_beta().floor()
                };
                limit == d.into()
            };
            run = if settled { run + 1 } else { 0 };
            if run == self.q {
                let start = j - self.q;
                return Ok(TwoSidedDigits {
                    left_pre: digits[..start].to_vec(),
                    left_period: digits[start..].to_vec(),
                    right_pre,
                    right_period,
                });
            }
        }
        Err(TilingError::LeftTailCap(LEFT_TAIL_CAP))
    }
}

/// A member of the canonical family with its display label.
#[derive(Clone, Debug)]
pub struct LabeledTiling {
    pub label: String,
    pub tiling: SubstitutiveTiling,
}

/// T_i, T_i^0 (i = 1..p) when m > 0; otherwise every Ψ^q-fixed tiling (a, b) at the origin with
/// ab in the language.
pub fn canonical_periodic_tilings(rule: &Arc<SubstitutionRule>) -> Vec<LabeledTiling> {
    let engine = Engine::new(rule.clone());
    let k = rule.kneading();
    let zero = rule.field().zero();
    let make = |label: String, a: usize, b: usize, q: usize| LabeledTiling {
        label,
        tiling: SubstitutiveTiling::with_engine(engine.clone(), a, b, q, zero.clone()).expect("canonical seed is fixed"),
    };
    let mut out = Vec::new();
    if k.m > 0 {
        for i in 1..=k.p {
            let j = k.m + i;
            let plus = rule.tau_plus(j).expect("z^j ≠ 1 on the cycle");
            out.push(make(format!("T_{i}"), rule.tau_minus(j), plus, k.p));
        }
        for i in 1..=k.p {
            out.push(make(format!("T_{i}^0"), rule.tau_minus(k.m + i), 0, k.p));
        }
        return out;
    }
    let n = rule.size();
    let cycle = |step: &dyn Fn(usize) -> usize, c: usize| -> Option<usize> {
        let mut x = c;
        for len in 1..=n {
            x = step(x);
            if x == c {
                return Some(len);
            }
        }
        None
    };
    let factors = two_letter_factors(rule.words(), n * n + 2);
    let lefts: Vec<(usize, usize)> = (0..n).filter_map(|a| cycle(&|x| rule.last_letter(x), a).map(|l| (a, l))).collect();
    let rights: Vec<(usize, usize)> = (0..n).filter_map(|b| cycle(&|x| rule.first_letter(x), b).map(|l| (b, l))).collect();
    for &(a, la) in &lefts {
        for &(b, lb) in &rights {
            if factors.contains(&(a, b)) {
                let q = num_integer::lcm(la, lb);
                out.push(make(format!("T({}|{})", a + 1, b + 1), a, b, q));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StableOutcome {
    Coincides(usize),
    Unknown,
}

/// Smallest k ≤ budget with Ψ^k(T − t) and Ψ^k(T′ − t) sharing the tile at 0.
pub fn stable_equiv_test(t1: &SubstitutiveTiling, t2: &SubstitutiveTiling, t: &AlgNum, budget: usize) -> StableOutcome {
    let f = t1.rule().field();
    let mut x = t1.translate(t).origin_point();
    let mut y = t2.translate(t).origin_point();
    for k in 0..=budget {
        if x == y {
            return StableOutcome::Coincides(k);
        }
        x = t_beta_unchecked(f, &x).1;
        y = t_beta_unchecked(f, &y).1;
    }
    StableOutcome::Unknown
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub grid: usize,
    pub budget: usize,
    pub coincided: usize,
    pub fraction: f64,
    pub max_steps: usize,
    /// Sample points without a coincidence, rendered exactly.
    pub failures: Vec<String>,
}

/// The sample points lo + (j + ½)(hi − lo)/N, j = 0..N−1.
pub fn grid_points(lo: &AlgNum, hi: &AlgNum, n: usize) -> Vec<AlgNum> {
    let f = lo.field();
    let width = hi - lo;
    (0..n).map(|j| lo + &(&width * &f.from_ratio(2 * j as i64 + 1, 2 * n as i64))).collect()
}

pub fn dense_stable_scan(
    t1: &SubstitutiveTiling,
    t2: &SubstitutiveTiling,
    lo: &AlgNum,
    hi: &AlgNum,
    grid: usize,
    budget: usize,
) -> ScanReport {
    assert!(grid >= 1, "grid must be positive");
    let pts = grid_points(lo, hi, grid);
    let outcomes: Vec<StableOutcome> = pts.par_iter().map(|t| stable_equiv_test(t1, t2, t, budget)).collect();
    let mut coincided = 0;
    let mut max_steps = 0;
    let mut failures = Vec::new();
    for (t, o) in pts.iter().zip(&outcomes) {
        match o {
            StableOutcome::Coincides(k) => {
                coincided += 1;
                max_steps = max_steps.max(*k);
            }
            StableOutcome::Unknown => failures.push(t.render()),
        }
    }
    ScanReport { grid, budget, coincided, fraction: coincided as f64 / grid as f64, max_steps, failures }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Certified,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCertificate {
    pub pair: [String; 2],
    /// Scanned intervals; each gets `grid` sample points.
    pub intervals: Vec<[String; 2]>,
    pub grid: usize,
    pub budget: usize,
    pub fraction: f64,
    pub max_steps: usize,
    pub failures: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub tilings: Vec<String>,
    pub grid: usize,
    pub budget: usize,
    pub pairs: Vec<PairCertificate>,
    pub verdict: Verdict,
}

/// Dense stable-equivalence scans on [0, 1] and [−1, 0] over every unordered pair of the canonical
/// family. The left window matters when every seed shares its right half (m = 0).
pub fn spectrum_certificate(rule: &Arc<SubstitutionRule>, grid: usize, budget: usize) -> CertificateReport {
    let fam = canonical_periodic_tilings(rule);
    let f = rule.field();
    let windows = [(f.zero(), f.one()), (f.from_int(-1), f.zero())];
    let mut pairs = Vec::new();
    for i in 0..fam.len() {
        for j in i + 1..fam.len() {
            let scans: Vec<ScanReport> =
                windows.iter().map(|(lo, hi)| dense_stable_scan(&fam[i].tiling, &fam[j].tiling, lo, hi, grid, budget)).collect();
            let coincided: usize = scans.iter().map(|s| s.coincided).sum();
            let failures: Vec<String> = scans.iter().flat_map(|s| s.failures.iter().cloned()).collect();
            let verdict = if failures.is_empty() { Verdict::Certified } else { Verdict::Inconclusive };
            pairs.push(PairCertificate {
                pair: [fam[i].label.clone(), fam[j].label.clone()],
                intervals: windows.iter().map(|(lo, hi)| [lo.render(), hi.render()]).collect(),
                grid,
                budget,
                fraction: coincided as f64 / (grid * windows.len()) as f64,
                max_steps: scans.iter().map(|s| s.max_steps).max().unwrap_or(0),
                failures,
                verdict,
            });
        }
    }
    let verdict = if pairs.iter().all(|p| p.verdict == Verdict::Certified) { Verdict::Certified } else { Verdict::Inconclusive };
    CertificateReport { tilings: fam.into_iter().map(|t| t.label).collect(), grid, budget, pairs, verdict }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AsymptoticOutcome {
    /// The tilings agree on every B₀ beyond t0 within the horizon.
    Asymptotic { t0: AlgNum },
    /// They still disagree at `witness` > horizon/2.
    Diverges { witness: AlgNum },
}

/// Compares the windows on [0, horizon]; t0 is the right end of the last tile not shared.
pub fn asymptotic_test(t1: &SubstitutiveTiling, t2: &SubstitutiveTiling, horizon: &AlgNum) -> AsymptoticOutcome {
    let r = t1.rule();
    let f = r.field();
    let zero = f.zero();
    let w1 = t1.window(&zero, horizon);
    let w2 = t2.window(&zero, horizon);
    let s1: HashSet<&Tile> = w1.tiles.iter().collect();
    let s2: HashSet<&Tile> = w2.tiles.iter().collect();
    let last = w1
        .tiles
        .iter()
        .filter(|t| !s2.contains(t))
        .chain(w2.tiles.iter().filter(|t| !s1.contains(t)))
        .map(|t| t.end(r))
        .max_by(|a, b| a.cmp_value(b));
    let half = horizon.mul_rational(&num_rational::BigRational::new(1.into(), 2.into()));
    match last {
        None => AsymptoticOutcome::Asymptotic { t0: zero },
        Some(t0) if half.lt(&t0) => AsymptoticOutcome::Diverges { witness: t0 },
        Some(t0) => AsymptoticOutcome::Asymptotic { t0 },
    }
}

#[cfg(test)]
mod tests;
