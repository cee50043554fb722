//! Certification that a monic integer polynomial is the minimal polynomial of a Pisot number.
//!
//! Real roots are counted with Sturm sequences. All conjugate moduli are bounded through
//! the Gershgorin inclusion for the matrix diag(z) − w·1ᵀ, whose characteristic polynomial is p
//! when w are the Weierstrass corrections of approximations z. The disks are evaluated in exact
//! rational complex arithmetic, so the only floating point is in producing the approximations.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::field::PisotField;
use super::poly::{cauchy_bound, positive_divisors, rat_to_f64, IntPolynomial, Sturm};
use super::AlgebraError;

pub const MAX_DEGREE: usize = 12;

/// Certified evidence that a polynomial is not Pisot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RootWitness {
    /// A real root in the open interval (lo, hi) whose modulus is at least 1.
    RealRoot { lo: String, hi: String },
    /// Some root has modulus at least `lower` (≥ 1), isolated in a Gershgorin disk.
    ComplexModulus { lower: String, center: (f64, f64) },
    /// The number of real roots greater than 1.
    RootsAboveOne { count: usize },
    /// The bounds could not be pushed below 1 − 2^{-20}.
    Uncertified { best_bound: String },
}

impl std::fmt::Display for RootWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RootWitness::RealRoot { lo, hi } => write!(f, "real root in ({lo}, {hi}) with modulus ≥ 1"),
            RootWitness::ComplexModulus { lower, center } => {
                write!(f, "conjugate near {:.6}{:+.6}i with modulus ≥ {lower}", center.0, center.1)
            }
            RootWitness::RootsAboveOne { count } => write!(f, "{count} real roots greater than 1 (need exactly 1)"),
            RootWitness::Uncertified { best_bound } => {
                write!(f, "conjugate modulus bound {best_bound} not below 1 - 2^-20")
            }
        }
    }
}

pub fn verify_pisot(p: &IntPolynomial) -> Result<PisotField, AlgebraError> {
    let d = p.degree();
    if d == 0 {
        return Err(AlgebraError::InvalidPolynomial("constant polynomial".into()));
    }
    if !p.is_monic() {
        return Err(AlgebraError::NotMonic);
    }
    if d > MAX_DEGREE {
        return Err(AlgebraError::DegreeTooLarge { degree: d });
    }
    if d == 1 {
        let beta = -&p.coeffs()[0];
        if beta > BigInt::one() {
            return Ok(PisotField::from_certified(p.clone(), (beta.clone(), beta), BigRational::zero()));
        }
        return Err(AlgebraError::NotPisot(RootWitness::RootsAboveOne { count: 0 }));
    }
    // a rational root of a monic integer polynomial is an integer dividing p(0)
    let c0 = &p.coeffs()[0];
    if c0.is_zero() {
        return Err(AlgebraError::NotIrreducible { factor: "x".into() });
    }
    for r in positive_divisors(c0) {
        for cand in [r.clone(), -r] {
            if p.eval_int(&cand).is_zero() {
                let factor = IntPolynomial::new(vec![-cand, BigInt::one()]);
                return Err(AlgebraError::NotIrreducible { factor: factor.to_string() });
            }
        }
    }
    let q = p.to_qpoly();
    let sturm = Sturm::new(&q);
    let one = BigRational::one();
    let above = sturm.count_above(&one);
    if above != 1 {
        if above >= 2 {
            let b = BigRational::from_integer(cauchy_bound(p));
            let (lo, hi) = isolate_second_from_top(&sturm, &one, &b);
            return Err(AlgebraError::NotPisot(RootWitness::RealRoot { lo: lo.to_string(), hi: hi.to_string() }));
        }
        return Err(AlgebraError::NotPisot(RootWitness::RootsAboveOne { count: 0 }));
    }
    let minus_one = -one.clone();
    if sturm.count_below(&minus_one) > 0 {
        let (lo, hi) = isolate_below_minus_one(p, &sturm);
        return Err(AlgebraError::NotPisot(RootWitness::RealRoot { lo: lo.to_string(), hi: hi.to_string() }));
    }
    // integer bracket around β
    let bound = cauchy_bound(p);
    let theta = certify_conjugates(p)?;
    // beyond this point p has one root outside the closed unit disk, none on it, and p(0) ≠ 0;
    // a monic factor avoiding β would have all roots inside the disk and a nonzero integer
    // constant term of modulus < 1, so p is irreducible
    Ok(PisotField::from_certified(p.clone(), (BigInt::one(), bound), theta))
}

fn isolate_second_from_top(s: &Sturm, lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
    // shrink [lo, hi] keeping at least two roots, then split off the smaller one
    let (mut a, mut b) = (lo.clone(), hi.clone());
    for _ in 0..200 {
        let mid = (&a + &b) / BigRational::from_integer(2.into());
        let right = s.count_in(&mid, &b);
        if right >= 2 {
            a = mid;
        } else if right == 1 {
            // the root in (a, mid] is one of at least two roots above 1
            let mut l = a.clone();
            let mut h = mid.clone();
            while s.count_in(&l, &h) > 1 {
                let m = (&l + &h) / BigRational::from_integer(2.into());
                if s.count_in(&l, &m) >= 1 {
                    h = m;
                } else {
                    l = m;
                }
            }
            return (l, h);
        } else {
            b = mid;
        }
    }
    (a, b)
}

fn isolate_below_minus_one(p: &IntPolynomial, s: &Sturm) -> (BigRational, BigRational) {
    // walk unit intervals (n-1, n] downward from −1
    let mut n = BigInt::from(-1);
    let limit = -cauchy_bound(p);
    while n > limit {
        let lo = BigRational::from_integer(&n - 1);
        let hi = BigRational::from_integer(n.clone());
        if s.count_in(&lo, &hi) > 0 {
            return (lo, hi);
        }
        n -= 1;
    }
    (BigRational::from_integer(limit), BigRational::from_integer(BigInt::from(-1)))
}

#[derive(Clone, Debug)]
struct CQ {
    re: BigRational,
    im: BigRational,
}

impl CQ {
    fn from_c64(z: Complex64, bits: u32) -> CQ {
        let s = 2f64.powi(bits.min(60) as i32);
        let q = |x: f64| {
            let m = (x * s).round();
            BigRational::new(BigInt::from(m as i128), BigInt::one() << bits.min(60) as usize)
        };
        CQ { re: q(z.re), im: q(z.im) }
    }
    fn sub(&self, o: &CQ) -> CQ {
        CQ { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn mul(&self, o: &CQ) -> CQ {
        CQ { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
    fn norm2(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
    fn div(&self, o: &CQ) -> CQ {
        let n = o.norm2();
        let conj = CQ { re: o.re.clone(), im: -o.im.clone() };
        let t = self.mul(&conj);
        CQ { re: t.re / &n, im: t.im / &n }
    }
    fn round(&self, bits: usize) -> CQ {
        let r = |x: &BigRational| {
            let s = BigRational::from_integer(BigInt::one() << bits);
            BigRational::new((x * &s).round().to_integer(), BigInt::one() << bits)
        };
        CQ { re: r(&self.re), im: r(&self.im) }
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

/// Rational u with u ≥ √q.
pub(crate) fn sqrt_upper(q: &BigRational) -> BigRational {
    let scale: usize = 80;
    let x = (q * BigRational::from_integer(BigInt::one() << (2 * scale))).floor().to_integer();
    let r = x.sqrt() + 1;
    BigRational::new(r, BigInt::one() << scale)
}

/// Rational u with u ≤ √q.
fn sqrt_lower(q: &BigRational) -> BigRational {
    let scale: usize = 80;
    let x = (q * BigRational::from_integer(BigInt::one() << (2 * scale))).floor().to_integer();
    BigRational::new(x.sqrt(), BigInt::one() << scale)
}

fn eval_cq(p: &IntPolynomial, z: &CQ) -> CQ {
    let mut acc = CQ { re: BigRational::zero(), im: BigRational::zero() };
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(z);
        acc.re += BigRational::from_integer(c.clone());
    }
    acc
}

fn durand_kerner(p: &IntPolynomial) -> Vec<Complex64> {
    let d = p.degree();
    let coeffs: Vec<f64> = p.coeffs().iter().map(|c| c.to_f64().unwrap_or(f64::MAX)).collect();
    let radius = 1.0 + coeffs[..d].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32) * (radius / 2.0).max(1.0)).collect();
    let eval = |x: Complex64| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c);
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..d {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(1e-12, 1e-12);
            }
            let w = eval(z[i]) / den;
            z[i] -= w;
            delta = delta.max(w.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

/// Weierstrass corrections w_i = p(z_i) / Π_{j≠i}(z_i − z_j).
fn corrections(p: &IntPolynomial, z: &[CQ]) -> Option<Vec<CQ>> {
    let mut out = Vec::with_capacity(z.len());
    for i in 0..z.len() {
        let mut den = CQ { re: BigRational::one(), im: BigRational::zero() };
        for j in 0..z.len() {
            if j != i {
                den = den.mul(&z[i].sub(&z[j]));
            }
        }
        if den.norm2().is_zero() {
            return None;
        }
        out.push(eval_cq(p, &z[i]).div(&den));
    }
    Some(out)
}

fn certify_conjugates(p: &IntPolynomial) -> Result<BigRational, AlgebraError> {
    let d = p.degree();
    let target = BigRational::one() - BigRational::new(BigInt::one(), BigInt::one() << 20usize);
    let nm1 = BigRational::from_integer(BigInt::from(d as i64 - 1));
    let approx = durand_kerner(p);
    let mut z: Vec<CQ> = approx.iter().map(|&c| CQ::from_c64(c, 52)).collect();
    let mut best = None;
    for round in 0..6 {
        let bits = 64usize << round;
        let Some(w) = corrections(p, &z) else {
            z = z.iter().enumerate().map(|(k, c)| {
                let mut c = c.clone();
                c.re += BigRational::new(BigInt::from(k as i64 + 1), BigInt::one() << bits);
                c
            }).collect();
            continue;
        };
        let centers: Vec<CQ> = z.iter().zip(&w).map(|(zi, wi)| zi.sub(wi)).collect();
        let radii: Vec<BigRational> = w.iter().map(|wi| &nm1 * sqrt_upper(&wi.norm2())).collect();
        // β is the center with the largest real part
        let ib = (0..d)
            .max_by(|&a, &b| centers[a].re.cmp(&centers[b].re))
            .expect("degree ≥ 2");
        let isolated = |i: usize| {
            (0..d).filter(|&j| j != i).all(|j| {
                let sep = centers[i].sub(&centers[j]).norm2();
                let r = &radii[i] + &radii[j];
                sep > &r * &r
            })
        };
        if isolated(ib) && centers[ib].re.clone() - &radii[ib] > BigRational::one() {
            let mut theta = BigRational::zero();
            for j in (0..d).filter(|&j| j != ib) {
                let m = sqrt_upper(&centers[j].norm2()) + &radii[j];
                // a disk lying outside the unit circle certifies a bad conjugate
                let inner = sqrt_lower(&centers[j].norm2()) - &radii[j];
                if inner >= BigRational::one() && isolated(j) {
                    let c = centers[j].to_c64();
                    return Err(AlgebraError::NotPisot(RootWitness::ComplexModulus {
                        lower: format!("{:.9}", rat_to_f64(&inner)),
                        center: (c.re, c.im),
                    }));
                }
                if m > theta {
                    theta = m;
                }
            }
            if theta < target {
                return Ok(round_up_dyadic(&theta, 64));
            }
            best = Some(theta);
        }
        // Newton-free refinement: one exact Weierstrass step, rounded to the working precision
        z = centers.iter().map(|c| c.round(bits * 2)).collect();
    }
    let best_bound = best.map(|b| format!("{:.9}", rat_to_f64(&b))).unwrap_or_else(|| "none".into());
    Err(AlgebraError::NotPisot(RootWitness::Uncertified { best_bound }))
}

fn round_up_dyadic(x: &BigRational, bits: usize) -> BigRational {
    let s = BigRational::from_integer(BigInt::one() << bits);
    BigRational::new((x * &s).ceil().to_integer(), BigInt::one() << bits)
}
