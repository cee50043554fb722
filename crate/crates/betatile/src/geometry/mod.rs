//! The Pisot splitting of the abelianization, the lattice Γ, the factor map π onto V/Γ and its
//! solenoid lift, the fundamental homoclinic point, the arithmetical coding and Rauzy clouds.
//!
//! Everything on V is written in Γ-coordinates, so V/Γ is the standard d-torus and reduction
//! mod Γ is taking fractional parts. Points of the torus carry exact values in ℚ(β).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::linalg::{
    int_apply_alg, int_det, int_identity, int_mul, lattice_basis, rat_inverse, rat_mul, rat_poly_at, rat_solve_alg, to_rat,
    IntMatrix, RatMatrix,
};
use crate::algebra::{AlgNum, IntPolynomial, PisotField, QPoly};
use crate::numeration::{eventually_periodic_value, is_admissible, DigitWord, KneadingData, TwoSidedDigits};
use crate::substitution::{PerronData, SubstitutionMatrix, SubstitutionRule};
use crate::tiling::{SubstitutiveTiling, TilingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("p_beta and q are not coprime (gcd {0})")]
    NotCoprime(String),
    #[error("the lattice Gamma has rank {rank}, expected {d}")]
    BadRank { rank: usize, d: usize },
    #[error("Gamma is not invariant under the substitution matrix")]
    NotInvariant,
    #[error("the Perron vector omega is not in V")]
    OmegaOutsideV,
    #[error("homoclinic determinant is {0}, not ±1")]
    NotFundamental(String),
    #[error("<l, g> = {0} is not in Z[beta]")]
    GammaUnstable(String),
    #[error("digit sequence is not admissible")]
    Inadmissible,
    #[error("prefixes are not periodic where the itinerary is")]
    PrefixMismatch,
    #[error(transparent)]
    Tiling(#[from] TilingError),
}

/// V = ker p_β(M) with projection π_V along W = ker q(M), for M the abelianization.
#[derive(Clone, Debug)]
pub struct SplittingData {
    field: PisotField,
    pub n: usize,
    pub d: usize,
    /// M = Aᵀ.
    pub matrix: IntMatrix,
    pub pi_v: RatMatrix,
    /// Basis vectors g_1..g_d of Γ = π_V(ℤⁿ), as rational vectors of length n.
    pub gamma_basis: Vec<Vec<BigRational>>,
    /// M restricted to V in Γ-coordinates.
    pub l_matrix: IntMatrix,
    pub l_vec: Vec<AlgNum>,
    pub omega: Vec<AlgNum>,
    pub omega_gamma: Vec<AlgNum>,
    /// ⟨l, g_k⟩ for each basis vector.
    pub lambda: Vec<AlgNum>,
    /// Γ-coordinates of π_V(e_i).
    pub unit_images: Vec<Vec<BigInt>>,
    /// Γ-coordinates of π_V(e_1 + … + e_n) = −e.
    pub u_gamma: Vec<BigInt>,
    pub q_factor: IntPolynomial,
    pub s1: QPoly,
    pub s2: QPoly,
    pivots: Vec<usize>,
    pivot_inv: RatMatrix,
}

fn lcm_denominators<'a>(xs: impl Iterator<Item = &'a BigRational>) -> BigInt {
    xs.fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn compute_splitting(
    a: &SubstitutionMatrix,
    f: &PisotField,
    perron: &PerronData,
) -> Result<SplittingData, GeometryError> {
    let m = a.abelianization();
    let n = m.len();
    let d = f.degree();
    let (g, s1, s2) = QPoly::ext_gcd(&f.minpoly().to_qpoly(), &perron.q_factor.to_qpoly());
    if g.degree() != Some(0) {
        return Err(GeometryError::NotCoprime(format!("{g:?}")));
    }
    let proj_poly = s2.mul(&perron.q_factor.to_qpoly());
    let pi_v = rat_poly_at(&proj_poly.c, &to_rat(&m));

    let den = lcm_denominators(pi_v.iter().flatten());
    let columns: Vec<Vec<BigInt>> =
        (0..n).map(|j| (0..n).map(|i| (&pi_v[i][j] * BigRational::from_integer(den.clone())).to_integer()).collect()).collect();
    let rows = lattice_basis(&columns);
    if rows.len() != d {
        return Err(GeometryError::BadRank { rank: rows.len(), d });
    }
    let gamma_basis: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|x| BigRational::new(x.clone(), den.clone())).collect()).collect();
    let pivots: Vec<usize> = rows.iter().map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero row")).collect();
    let sub: RatMatrix = (0..d).map(|r| (0..d).map(|k| gamma_basis[k][pivots[r]].clone()).collect()).collect();
    let pivot_inv = rat_inverse(&sub).expect("triangular with nonzero diagonal");

    let mut s = SplittingData {
        field: f.clone(),
        n,
        d,
        matrix: m.clone(),
        pi_v,
        gamma_basis,
        l_matrix: vec![],
        l_vec: perron.l.clone(),
        omega: perron.omega.clone(),
        omega_gamma: vec![],
        lambda: vec![],
        unit_images: vec![],
        u_gamma: vec![],
        q_factor: perron.q_factor.clone(),
        s1,
        s2,
        pivots,
        pivot_inv,
    };

    let mut l_cols = Vec::new();
    for g in &s.gamma_basis {
        let image: Vec<BigRational> =
            (0..n).map(|i| (0..n).fold(BigRational::zero(), |acc, j| acc + BigRational::from_integer(m[i][j].clone()) * &g[j])).collect();
        l_cols.push(s.integer_coords(&image).ok_or(GeometryError::NotInvariant)?);
    }
    s.l_matrix = (0..d).map(|i| (0..d).map(|k| l_cols[k][i].clone()).collect()).collect();

    s.omega_gamma = s.alg_coords(&perron.omega).ok_or(GeometryError::OmegaOutsideV)?;
    s.lambda = s.gamma_basis.iter().map(|g| pair_rat(&perron.l, g)).collect();
    s.unit_images = (0..n)
        .map(|i| {
            let col: Vec<BigRational> = (0..n).map(|r| s.pi_v[r][i].clone()).collect();
            s.integer_coords(&col).expect("π_V(e_i) ∈ Γ")
        })
        .collect();
    s.u_gamma = (0..d).map(|k| s.unit_images.iter().map(|v| &v[k]).sum()).collect();
    Ok(s)
}

fn pair_rat(l: &[AlgNum], v: &[BigRational]) -> AlgNum {
    l.iter().zip(v).fold(l[0].field().zero(), |acc, (x, c)| &acc + &x.mul_rational(c))
}

impl SplittingData {
    pub fn field(&self) -> &PisotField {
        &self.field
    }

    /// Γ-coordinates of a rational vector of V, `None` when it is not in V.
    pub fn rational_coords(&self, v: &[BigRational]) -> Option<Vec<BigRational>> {
        let rhs: Vec<BigRational> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let c: Vec<BigRational> =
            self.pivot_inv.iter().map(|row| row.iter().zip(&rhs).map(|(a, b)| a * b).sum()).collect();
        let back: Vec<BigRational> = (0..self.n)
            .map(|i| c.iter().zip(&self.gamma_basis).map(|(ck, g)| ck * &g[i]).sum())
            .collect();
        (back == v).then_some(c)
    }

    pub fn integer_coords(&self, v: &[BigRational]) -> Option<Vec<BigInt>> {
        let c = self.rational_coords(v)?;
        c.iter().all(|x| x.is_integer()).then(|| c.iter().map(|x| x.to_integer()).collect())
    }

    /// Γ-coordinates of a vector of V ⊗ ℚ(β).
    pub fn alg_coords(&self, v: &[AlgNum]) -> Option<Vec<AlgNum>> {
        let rhs: Vec<AlgNum> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let c = rat_solve_alg(&self.pivot_inv, &rhs);
        let back: Vec<AlgNum> = (0..self.n)
            .map(|i| c.iter().zip(&self.gamma_basis).fold(self.field.zero(), |acc, (ck, g)| &acc + &ck.mul_rational(&g[i])))
            .collect();
        (back == v).then_some(c)
    }

    /// ⟨l, v⟩ for v in Γ-coordinates.
    pub fn unstable_coefficient(&self, v: &[AlgNum]) -> AlgNum {
        v.iter().zip(&self.lambda).fold(self.field.zero(), |acc, (x, y)| &acc + &(x * y))
    }

    /// v − ⟨l, v⟩ω in Γ-coordinates.
    pub fn stable_part(&self, v: &[AlgNum]) -> Vec<AlgNum> {
        let c = self.unstable_coefficient(v);
        v.iter().zip(&self.omega_gamma).map(|(x, w)| x - &(&c * w)).collect()
    }

    pub fn apply_l(&self, v: &[AlgNum]) -> Vec<AlgNum> {
        int_apply_alg(&self.l_matrix, v)
    }

    fn lift(&self, v: &[BigInt]) -> Vec<AlgNum> {
        v.iter().map(|x| self.field.from_int(x.clone())).collect()
    }

    fn l_power(&self, k: usize) -> IntMatrix {
        (0..k).fold(int_identity(self.d), |acc, _| int_mul(&self.l_matrix, &acc))
    }

    /// Σ_{k≥start} L^k c_k for a q-periodic stream c_{start}, …, c_{start+q−1} of stable vectors.
    fn periodic_stable_sum(&self, start: usize, period: &[Vec<AlgNum>]) -> Vec<AlgNum> {
        let mut lr = int_identity(self.d);
        let mut folded = Vec::with_capacity(period.len());
        for c in period {
            folded.push(int_apply_alg(&lr, c));
            lr = int_mul(&self.l_matrix, &lr);
        }
        periodic_prefolded(self, start, &folded)
    }
}

fn add(a: &[AlgNum], b: &[AlgNum]) -> Vec<AlgNum> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn neg(a: &[AlgNum]) -> Vec<AlgNum> {
    a.iter().map(|x| -x).collect()
}

/// (⟨l, v⟩, π_V v − ⟨l, v⟩ω) for v ∈ ℚⁿ.
pub fn project_components(s: &SplittingData, v: &[BigRational]) -> (AlgNum, Vec<AlgNum>) {
    let vu = pair_rat(&s.l_vec, v);
    let pv: Vec<BigRational> = (0..s.n).map(|i| (0..s.n).map(|j| &s.pi_v[i][j] * &v[j]).sum()).collect();
    let vs = pv.iter().zip(&s.omega).map(|(x, w)| &s.field.from_rational(x) - &(&vu * w)).collect();
    (vu, vs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomoclinicCertificate {
    /// e = −π_V(e_1 + … + e_n) in ℝⁿ.
    pub e: Vec<String>,
    pub e_gamma: Vec<String>,
    pub determinant: String,
    /// ⟨l, g_k⟩ for the Γ basis, each in ℤ[β].
    pub gamma_unstable: Vec<String>,
}

pub fn fundamental_homoclinic(s: &SplittingData) -> Result<HomoclinicCertificate, GeometryError> {
    let e_gamma: Vec<BigInt> = s.u_gamma.iter().map(|x| -x).collect();
    let mut cols = vec![e_gamma.clone()];
    for _ in 1..s.d {
        let last = cols.last().expect("nonempty");
        cols.push(s.l_matrix.iter().map(|row| row.iter().zip(last).map(|(a, b)| a * b).sum()).collect());
    }
    let mat: IntMatrix = (0..s.d).map(|i| (0..s.d).map(|k| cols[k][i].clone()).collect()).collect();
    let det = int_det(&mat);
    if det.abs() != BigInt::one() {
        return Err(GeometryError::NotFundamental(det.to_string()));
    }
    if let Some(bad) = s.lambda.iter().find(|x| !x.has_integer_coords()) {
        return Err(GeometryError::GammaUnstable(bad.render()));
    }
    let e: Vec<String> = (0..s.n).map(|i| (-(0..s.n).map(|j| s.pi_v[i][j].clone()).sum::<BigRational>()).to_string()).collect();
    Ok(HomoclinicCertificate {
        e,
        e_gamma: e_gamma.iter().map(|x| x.to_string()).collect(),
        determinant: det.to_string(),
        gamma_unstable: s.lambda.iter().map(|x| x.render()).collect(),
    })
}

/// A point of V/Γ in Γ-coordinates, each in [0, 1) and exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusPoint {
    pub coords: Vec<AlgNum>,
}

impl TorusPoint {
    pub fn reduce(v: &[AlgNum]) -> Self {
        TorusPoint { coords: v.iter().map(AlgNum::fract).collect() }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(AlgNum::to_f64).collect()
    }

    /// Sup-norm distance on the torus, in floating point.
    pub fn distance(&self, o: &TorusPoint) -> f64 {
        self.coords
            .iter()
            .zip(&o.coords)
            .map(|(a, b)| {
                let x = (a - b).fract().to_f64();
                x.min(1.0 - x)
            })
            .fold(0.0, f64::max)
    }

    /// Exact test of sup-distance ≤ eps.
    pub fn within(&self, o: &TorusPoint, eps: &BigRational) -> bool {
        self.coords.iter().zip(&o.coords).all(|(a, b)| {
            let x = (a - b).fract();
            let f = x.field();
            let e = f.from_rational(eps);
            x.le(&e) || (&f.one() - &x).le(&e)
        })
    }
}

#[derive(Serialize)]
struct TorusJson {
    coords: Vec<f64>,
    exact: Vec<String>,
    width: f64,
}

impl Serialize for TorusPoint {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        TorusJson { coords: self.to_f64(), exact: self.coords.iter().map(AlgNum::render).collect(), width: 0.0 }.serialize(ser)
    }
}

/// (v_1, v_2, …) with L v_{j+1} = v_j.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolenoidPoint {
    pub levels: Vec<TorusPoint>,
}

impl SolenoidPoint {
    pub fn distance(&self, o: &SolenoidPoint) -> f64 {
        self.levels.iter().zip(&o.levels).map(|(a, b)| a.distance(b)).fold(0.0, f64::max)
    }

    pub fn levels_compatible(&self, s: &SplittingData) -> bool {
        self.levels.windows(2).all(|w| TorusPoint::reduce(&s.apply_l(&w[1].coords)) == w[0])
    }
}

/// p_i and a_i = p_i + L a_{i−1} in Γ-coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixRecord {
    pub index: i64,
    pub prefix: Vec<String>,
    pub vertex: Vec<String>,
    #[serde(skip)]
    pub prefix_int: Vec<BigInt>,
    #[serde(skip)]
    pub vertex_int: Vec<BigInt>,
}

/// p(T) = γ(t_*(T)) − γ(β t_*(Ψ⁻¹T)), read off the tiles between those two vertices. The lift
/// γ decreases by π_V(e_i) across a tile of type i.
pub fn prefix_of(t: &SubstitutiveTiling, s: &SplittingData) -> Result<Vec<BigInt>, GeometryError> {
    let a = t.unsubstitute().t_star()?.mul_beta();
    let b = t.t_star()?;
    let mut p = vec![BigInt::zero(); s.d];
    if a.lt(&b) {
        for tile in t.window(&a, &b).tiles {
            for (x, y) in p.iter_mut().zip(&s.unit_images[tile.letter]) {
                *x -= y;
            }
        }
    }
    Ok(p)
}

/// Records for i = lo..=hi with a_{lo−1} = 0.
pub fn prefix_chain(t: &SubstitutiveTiling, s: &SplittingData, lo: i64, hi: i64) -> Result<Vec<PrefixRecord>, GeometryError> {
    let mut a = vec![BigInt::zero(); s.d];
    let mut out = Vec::new();
    let mut ti = t.power(lo);
    for i in lo..=hi {
        let p = prefix_of(&ti, s)?;
        let la: Vec<BigInt> = s.l_matrix.iter().map(|row| row.iter().zip(&a).map(|(x, y)| x * y).sum()).collect();
        a = p.iter().zip(&la).map(|(x, y)| x + y).collect();
        out.push(PrefixRecord {
            index: i,
            prefix: p.iter().map(|x| x.to_string()).collect(),
            vertex: a.iter().map(|x| x.to_string()).collect(),
            prefix_int: p,
            vertex_int: a.clone(),
        });
        ti = ti.substitute();
    }
    Ok(out)
}

/// π(T) before reduction: the global shadow t_*(T)ω − Σ_{k≥0} (L^k p_{−k})^s, with the
/// q-periodic tail of prefixes summed in closed form.
pub fn shadow_point(t: &SubstitutiveTiling, s: &SplittingData) -> Result<Vec<AlgNum>, GeometryError> {
    let itinerary = t.two_sided_itinerary()?;
    let pre = itinerary.left_pre.len();
    let q = itinerary.left_period.len();
    let mut prefixes = Vec::with_capacity(pre + 2 * q);
    let mut tk = t.clone();
    for _ in 0..pre + 2 * q {
        prefixes.push(prefix_of(&tk, s)?);
        tk = tk.unsubstitute();
    }
    if (pre..pre + q).any(|k| prefixes[k] != prefixes[k + q]) {
        return Err(GeometryError::PrefixMismatch);
    }
    let mut stable = vec![s.field.zero(); s.d];
    let mut lk = int_identity(s.d);
    for p in &prefixes[..pre] {
        stable = add(&stable, &s.stable_part(&int_apply_alg(&lk, &s.lift(p))));
        lk = int_mul(&s.l_matrix, &lk);
    }
    let period: Vec<Vec<AlgNum>> = prefixes[pre..pre + q].iter().map(|p| s.stable_part(&s.lift(p))).collect();
    if q > 0 {
        stable = add(&stable, &s.periodic_stable_sum(pre, &period));
    }
    let ts = t.t_star()?;
    let unstable: Vec<AlgNum> = s.omega_gamma.iter().map(|w| &ts * w).collect();
    Ok(add(&unstable, &neg(&stable)))
}

pub fn shadow_factor_map(t: &SubstitutiveTiling, s: &SplittingData) -> Result<TorusPoint, GeometryError> {
    Ok(TorusPoint::reduce(&shadow_point(t, s)?))
}

/// π̂(T) with levels v_j = π(Ψ^{−(j−1)}T).
pub fn solenoid_map(t: &SubstitutiveTiling, s: &SplittingData, levels: usize) -> Result<SolenoidPoint, GeometryError> {
    let mut out = Vec::with_capacity(levels);
    let mut tj = t.clone();
    for _ in 0..levels {
        out.push(shadow_factor_map(&tj, s)?);
        tj = tj.unsubstitute();
    }
    Ok(SolenoidPoint { levels: out })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodeResult {
    pub point: SolenoidPoint,
    /// Bound on the neglected right tail in each coordinate (0 when exact).
    pub tail_bound: f64,
}

/// Level-one value h(y) = −(Σ_{i≥1} y_i β^{−i})ω + Σ_{j≥0} y_{−j} L^j(U − ω), before reduction.
/// With `depth`, only y_1, …, y_depth enter the first sum.
pub fn code_value(y: &TwoSidedDigits, s: &SplittingData, depth: Option<usize>) -> Vec<AlgNum> {
    let f = &s.field;
    let right = y.shift();
    let value = match depth {
        None => eventually_periodic_value(f, &right.right_pre, &right.right_period),
        Some(nd) => eventually_periodic_value(f, &right.window(0, nd as i64 - 1), &[]),
    };
    let mut left_pre = vec![y.digit(0)];
    left_pre.extend_from_slice(&y.left_pre);
    let u_s = s.stable_part(&s.lift(&s.u_gamma));
    let mut acc: Vec<AlgNum> = s.omega_gamma.iter().map(|w| -&(&value * w)).collect();
    let mut lu = u_s.clone();
    for &dgt in &left_pre {
        if dgt != 0 {
            acc = add(&acc, &lu.iter().map(|x| x.mul_int(&dgt.into())).collect::<Vec<_>>());
        }
        lu = s.apply_l(&lu);
    }
    if !y.left_period.is_empty() {
        let mut period = Vec::new();
        let mut lr = u_s;
        for &dgt in &y.left_period {
            period.push(lr.iter().map(|x| x.mul_int(&dgt.into())).collect());
            lr = s.apply_l(&lr);
        }
        acc = add(&acc, &periodic_prefolded(s, left_pre.len(), &period));
    }
    acc
}

/// Σ_{n≥0} L^{start+nq} (Σ_r c_r) where each c_r already carries its L^r.
fn periodic_prefolded(s: &SplittingData, start: usize, terms: &[Vec<AlgNum>]) -> Vec<AlgNum> {
    let q = terms.len();
    let sum = terms.iter().fold(vec![s.field.zero(); s.d], |a, c| add(&a, c));
    let lq = s.l_power(q);
    let mut i_minus = to_rat(&lq);
    for (i, row) in i_minus.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = if i == j { BigRational::one() - &*x } else { -x.clone() };
        }
    }
    let inv = rat_inverse(&i_minus).expect("1 is not an eigenvalue of L^q");
    int_apply_alg(&s.l_power(start), &rat_solve_alg(&inv, &sum))
}

fn tail_bound(s: &SplittingData, depth: Option<usize>) -> f64 {
    let Some(nd) = depth else { return 0.0 };
    let beta = s.field.beta_f64();
    let w = s.omega_gamma.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
    beta.floor() * beta.powi(-(nd as i32)) / (1.0 - 1.0 / beta) * w
}

/// Smallest truncation depth whose certified tail bound is at most `tolerance`.
pub fn depth_for_tolerance(s: &SplittingData, tolerance: f64) -> usize {
    (1..10_000).find(|&n| tail_bound(s, Some(n)) <= tolerance).unwrap_or(10_000)
}

/// h_ȳ at `levels` levels: level j is h(σ^{−(j−1)} y).
pub fn arithmetical_code(
    y: &TwoSidedDigits,
    k: &KneadingData,
    s: &SplittingData,
    levels: usize,
    depth: Option<usize>,
) -> Result<CodeResult, GeometryError> {
    let span = y.left_pre.len() + y.right_pre.len() + y.left_period.len() + y.right_period.len() + 2;
    if !y.is_admissible(k, span.max(8)) {
        return Err(GeometryError::Inadmissible);
    }
    let mut out = Vec::with_capacity(levels);
    let mut yj = y.clone();
    for _ in 0..levels {
        out.push(TorusPoint::reduce(&code_value(&yj, s, depth)));
        yj = yj.unshift();
    }
    Ok(CodeResult { point: SolenoidPoint { levels: out }, tail_bound: tail_bound(s, depth) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodingReport {
    pub levels: usize,
    pub depth: usize,
    pub tolerance: f64,
    pub tail_bound: f64,
    pub consistency_samples: usize,
    pub consistency_agreed: usize,
    pub max_deviation: f64,
    pub collision_samples: usize,
    pub collision_pairs: usize,
    pub min_separation: f64,
}

/// Random admissible digit word of the given length, drawn digit by digit.
pub fn random_admissible_word(k: &KneadingData, len: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let top = k.digits.0.iter().copied().max().unwrap_or(1);
    let mut w: Vec<u32> = Vec::with_capacity(len);
    while w.len() < len {
        let choices: Vec<u32> = (0..=top)
            .filter(|&c| {
                let mut x = w.clone();
                x.push(c);
                is_admissible(k, &DigitWord(x))
            })
            .collect();
        w.push(choices[rng.gen_range(0..choices.len())]);
    }
    w
}

/// (a) π̂(T) against h of the shifted itinerary on translated canonical tilings; (b) collisions of
/// h among distinct random admissible words.
#[allow(clippy::too_many_arguments)]
pub fn coding_consistency_and_injectivity(
    rule: &std::sync::Arc<SubstitutionRule>,
    s: &SplittingData,
    samples: usize,
    collision_samples: usize,
    tolerance: f64,
    levels: usize,
    depth: usize,
    seed: u64,
) -> Result<CodingReport, GeometryError> {
    let fam = crate::tiling::canonical_periodic_tilings(rule);
    let f = rule.field();
    let k = rule.kneading();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agreed = 0;
    let mut max_dev: f64 = 0.0;
    for i in 0..samples {
        let base = &fam[i % fam.len()].tiling;
        let t = f.from_ratio(rng.gen_range(-400i64..400), rng.gen_range(1i64..50));
        let tt = base.translate(&t);
        let pi_hat = solenoid_map(&tt, s, levels)?;
        let x = tt.two_sided_itinerary()?;
        let h = arithmetical_code(&x.unshift(), k, s, levels, Some(depth))?;
        let dev = pi_hat.distance(&h.point);
        max_dev = max_dev.max(dev);
        if dev <= tolerance {
            agreed += 1;
        }
    }

    let half = 12;
    let mut seen = std::collections::HashSet::new();
    let mut pts: Vec<Vec<f64>> = Vec::new();
    let mut guard = 0;
    while pts.len() < collision_samples && guard < collision_samples * 20 {
        guard += 1;
        let w = random_admissible_word(k, 2 * half, &mut rng);
        if !seen.insert(w.clone()) {
            continue;
        }
        let y = TwoSidedDigits::finite(&w, half);
        let mut v = Vec::new();
        let mut yj = y;
        for _ in 0..levels {
            v.extend(TorusPoint::reduce(&code_value(&yj, s, None)).to_f64());
            yj = yj.unshift();
        }
        pts.push(v);
    }
    let (pairs, min_sep) = close_pairs(&pts, tolerance);
    Ok(CodingReport {
        levels,
        depth,
        tolerance,
        tail_bound: tail_bound(s, Some(depth)),
        consistency_samples: samples,
        consistency_agreed: agreed,
        max_deviation: max_dev,
        collision_samples: pts.len(),
        collision_pairs: pairs,
        min_separation: min_sep,
    })
}

fn torus_gap(a: f64, b: f64) -> f64 {
    let x = (a - b).rem_euclid(1.0);
    x.min(1.0 - x)
}

/// Pairs within `eps` in every coordinate, by bucketing the first coordinate; also the smallest
/// sup-distance seen among neighbours in the bucket order.
fn close_pairs(pts: &[Vec<f64>], eps: f64) -> (usize, f64) {
    let cells = ((1.0 / eps.max(1e-12)).min(1e7)) as i64;
    let cell = |x: f64| ((x * cells as f64) as i64).rem_euclid(cells);
    let mut buckets: HashMap<i64, Vec<usize>> = HashMap::new();
    for (i, p) in pts.iter().enumerate() {
        buckets.entry(cell(p[0])).or_default().push(i);
    }
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| torus_gap(*x, *y)).fold(0.0, f64::max);
    let mut pairs = 0;
    for (i, p) in pts.iter().enumerate() {
        let c = cell(p[0]);
        for dc in [-1, 0, 1] {
            if let Some(b) = buckets.get(&(c + dc).rem_euclid(cells)) {
                pairs += b.iter().filter(|&&j| j > i && dist(p, &pts[j]) <= eps).count();
            }
        }
    }
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]));
    let min_sep = order.windows(2).map(|w| dist(&pts[w[0]], &pts[w[1]])).fold(f64::INFINITY, f64::min);
    (pairs, min_sep)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RauzyCloud {
    pub dimension: usize,
    pub points: Vec<Vec<f64>>,
    pub bound: f64,
}

fn to_f64_matrix(a: &RatMatrix) -> Vec<Vec<f64>> {
    a.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// π^s of the first n strand vertices of T to the right of its seed junction, in an orthonormal
/// basis of E^s, together with a bound on their norm.
pub fn rauzy_cloud(t: &SubstitutiveTiling, s: &SplittingData, count: usize) -> RauzyCloud {
    let n = s.n;
    let pi = to_f64_matrix(&s.pi_v);
    let l: Vec<f64> = s.l_vec.iter().map(AlgNum::to_f64).collect();
    let w: Vec<f64> = s.omega.iter().map(AlgNum::to_f64).collect();
    let stable = |v: &[f64]| -> Vec<f64> {
        let pv: Vec<f64> = (0..n).map(|i| (0..n).map(|j| pi[i][j] * v[j]).sum()).collect();
        let c: f64 = l.iter().zip(v).map(|(a, b)| a * b).sum();
        pv.iter().zip(&w).map(|(x, y)| x - c * y).collect()
    };
    let images: Vec<Vec<f64>> = (0..n).map(|i| stable(&(0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect::<Vec<_>>())).collect();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in &images {
        let mut u = v.clone();
        for b in &basis {
            let dot: f64 = u.iter().zip(b).map(|(x, y)| x * y).sum();
            u.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let nu = norm(&u);
        if nu > 1e-9 && basis.len() < s.d - 1 {
            basis.push(u.iter().map(|x| x / nu).collect());
        }
    }

    let mut points = Vec::with_capacity(count);
    if count > 0 {
        let r = t.rule();
        let lmax = r.lengths().iter().map(AlgNum::to_f64).fold(0.0, f64::max);
        let lo = t.shift().clone();
        let hi = &lo + &r.field().from_int((count as f64 * lmax).ceil() as i64 + 1);
        let tiles = t.window(&lo, &hi).tiles;
        let mut acc = vec![0.0; n];
        for tile in tiles.iter().take(count) {
            points.push(basis.iter().map(|b| b.iter().zip(&acc).map(|(x, y)| x * y).sum()).collect());
            acc.iter_mut().zip(&images[tile.letter]).for_each(|(a, b)| *a += b);
        }
    }

    // Dumont–Thomas: a prefix of ψ^N(b) abelianizes to Σ_j M^j ab(P_j), P_j proper prefixes of ψ(c)
    let m: Vec<Vec<f64>> = s.matrix.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect();
    let mut vecs: Vec<Vec<f64>> = Vec::new();
    for word in t.rule().words() {
        let mut acc = vec![0.0; n];
        for &c in &word[..word.len() - 1] {
            acc[c] += 1.0;
            vecs.push(stable(&acc));
        }
    }
    let mut bound = 0.0;
    for _ in 0..4000 {
        let top = vecs.iter().map(|v| norm(v)).fold(0.0, f64::max);
        bound += top;
        if top < 1e-16 {
            break;
        }
        vecs = vecs.iter().map(|v| stable(&(0..n).map(|i| (0..n).map(|j| m[i][j] * v[j]).sum()).collect::<Vec<_>>())).collect();
    }
    RauzyCloud { dimension: basis.len(), points, bound }
}

/// Checks π_V² = π_V and π_V M = M π_V exactly.
pub fn projection_identities(s: &SplittingData) -> (bool, bool) {
    let m = to_rat(&s.matrix);
    (rat_mul(&s.pi_v, &s.pi_v) == s.pi_v, rat_mul(&s.pi_v, &m) == rat_mul(&m, &s.pi_v))
}
