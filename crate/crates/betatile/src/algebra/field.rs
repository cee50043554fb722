//! Exact arithmetic in ℚ(β) for a verified Pisot number β.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{rat_to_f64, IntPolynomial, QPoly};
use super::AlgebraError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn from_i32(s: i32) -> Sign {
        match s.cmp(&0) {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }
}

/// β ∈ [lo, lo+1] / 2^bits.
#[derive(Clone, Debug)]
struct BetaBits {
    bits: u32,
    lo: BigInt,
}

#[derive(Debug)]
pub(crate) struct FieldCore {
    minpoly: IntPolynomial,
    /// minpoly coefficients a_0..a_{d-1}; x^d = −Σ a_j x^j
    low: Vec<BigInt>,
    d: usize,
    beta_bits: RwLock<BetaBits>,
    theta_max: BigRational,
    initial_enclosure: (BigRational, BigRational),
}

/// A certified Pisot number together with its field ℚ(β).
#[derive(Clone, Debug)]
pub struct PisotField {
    core: Arc<FieldCore>,
}

const INITIAL_BITS: u32 = 192;
const MAX_BITS: u32 = 1 << 20;

impl PisotField {
    /// Builds the field once all certificates have been checked.
    /// `lo_hi` is an integer bracket [lo, hi] with exactly one root, at which p changes sign from − to +.
    pub(crate) fn from_certified(
        minpoly: IntPolynomial,
        bracket: (BigInt, BigInt),
        theta_max: BigRational,
    ) -> PisotField {
        let d = minpoly.degree();
        let low = minpoly.coeffs()[..d].to_vec();
        let bits = if d == 1 {
            // β is the integer −a_0; store the exact value
            BetaBits { bits: 0, lo: -&low[0] }
        } else {
            let mut b = BetaBits { bits: 0, lo: bracket.0.clone() };
            // bracket has width ≥ 1; shrink to a unit interval first
            let mut hi = bracket.1.clone();
            while &hi - &b.lo > BigInt::one() {
                let mid: BigInt = (&b.lo + &hi) >> 1;
                if minpoly.sign_at_dyadic(&mid, 0) > 0 {
                    hi = mid;
                } else {
                    b.lo = mid;
                }
            }
            refine_bits(&minpoly, &mut b, INITIAL_BITS);
            b
        };
        let scale = BigRational::from_integer(BigInt::one() << bits.bits as usize);
        let lo_r = BigRational::from_integer(bits.lo.clone()) / &scale;
        let hi_r = if d == 1 { lo_r.clone() } else { BigRational::from_integer(&bits.lo + 1) / &scale };
        PisotField {
            core: Arc::new(FieldCore {
                minpoly,
                low,
                d,
                beta_bits: RwLock::new(bits),
                theta_max,
                initial_enclosure: (lo_r, hi_r),
            }),
        }
    }

    pub fn minpoly(&self) -> &IntPolynomial {
        &self.core.minpoly
    }

    pub fn degree(&self) -> usize {
        self.core.d
    }

    /// Rational interval [lo, hi] containing β.
    pub fn beta_enclosure(&self) -> (BigRational, BigRational) {
        self.core.initial_enclosure.clone()
    }

    /// Certified θ_max with |α| ≤ θ_max < 1 for every conjugate α ≠ β.
    pub fn conjugate_modulus_bound(&self) -> &BigRational {
        &self.core.theta_max
    }

    pub fn beta_f64(&self) -> f64 {
        let (lo, hi) = self.beta_enclosure();
        (rat_to_f64(&lo) + rat_to_f64(&hi)) / 2.0
    }

    pub fn same(&self, other: &PisotField) -> bool {
        Arc::ptr_eq(&self.core, &other.core)
    }

    pub fn zero(&self) -> AlgNum {
        self.from_int(0)
    }

    pub fn one(&self) -> AlgNum {
        self.from_int(1)
    }

    pub fn from_int<T: Into<BigInt>>(&self, n: T) -> AlgNum {
        self.from_rational(&BigRational::from_integer(n.into()))
    }

    pub fn from_rational(&self, q: &BigRational) -> AlgNum {
        let mut num = vec![BigInt::zero(); self.core.d];
        num[0] = q.numer().clone();
        AlgNum::normalized(self.clone(), num, q.denom().clone())
    }

    pub fn from_ratio(&self, n: i64, d: i64) -> AlgNum {
        self.from_rational(&BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// Element Σ c_i β^i; longer inputs are reduced.
    pub fn from_coords(&self, coords: &[BigRational]) -> AlgNum {
        let den = coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num: Vec<BigInt> = coords.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        self.reduce(num, den)
    }

    pub fn from_int_coords(&self, coords: &[i64]) -> AlgNum {
        self.reduce(coords.iter().map(|&c| BigInt::from(c)).collect(), BigInt::one())
    }

    pub fn beta(&self) -> AlgNum {
        self.from_int_coords(&[0, 1])
    }

    pub fn beta_pow(&self, k: i64) -> AlgNum {
        if k >= 0 {
            self.beta().pow(k as u32)
        } else {
            self.beta().inv().expect("β ≠ 0").pow((-k) as u32)
        }
    }

    fn reduce(&self, mut v: Vec<BigInt>, den: BigInt) -> AlgNum {
        let d = self.core.d;
        if v.len() > d {
            for i in (d..v.len()).rev() {
                let c = std::mem::take(&mut v[i]);
                if c.is_zero() {
                    continue;
                }
                for (j, a) in self.core.low.iter().enumerate() {
                    if !a.is_zero() {
                        v[i - d + j] -= &c * a;
                    }
                }
            }
            v.truncate(d);
        }
        v.resize(d, BigInt::zero());
        AlgNum::normalized(self.clone(), v, den)
    }

    fn current_bits(&self) -> BetaBits {
        self.core.beta_bits.read().expect("lock").clone()
    }

    fn refine_to(&self, bits: u32) -> BetaBits {
        {
            let b = self.core.beta_bits.read().expect("lock");
            if b.bits >= bits {
                return b.clone();
            }
        }
        let mut w = self.core.beta_bits.write().expect("lock");
        if w.bits < bits {
            refine_bits(&self.core.minpoly, &mut w, bits);
        }
        w.clone()
    }
}

fn refine_bits(p: &IntPolynomial, b: &mut BetaBits, target: u32) {
    while b.bits < target {
        let mid: BigInt = (&b.lo << 1usize) + 1;
        b.bits += 1;
        b.lo <<= 1usize;
        if p.sign_at_dyadic(&mid, b.bits) <= 0 {
            b.lo = mid;
        }
    }
}

/// An element of ℚ(β): (Σ num_i β^i) / den with den > 0 and gcd(num, den) = 1.
#[derive(Clone)]
pub struct AlgNum {
    field: PisotField,
    num: Vec<BigInt>,
    den: BigInt,
}

impl AlgNum {
    fn normalized(field: PisotField, mut num: Vec<BigInt>, mut den: BigInt) -> AlgNum {
        assert!(!den.is_zero(), "zero denominator");
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -&*c;
            }
        }
        let mut g = den.clone();
        for c in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if num.iter().all(|c| c.is_zero()) {
            den = BigInt::one();
        } else if !g.is_one() {
            for c in num.iter_mut() {
                *c = &*c / &g;
            }
            den /= &g;
        }
        AlgNum { field, num, den }
    }

    pub fn field(&self) -> &PisotField {
        &self.field
    }

    /// Rational coordinates in the power basis 1, β, …, β^{d−1}.
    pub fn coords(&self) -> Vec<BigRational> {
        self.num.iter().map(|c| BigRational::new(c.clone(), self.den.clone())).collect()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    /// Some(q) if the element is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(|c| c.is_zero()) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    pub fn has_integer_coords(&self) -> bool {
        self.den.is_one()
    }

    pub fn mul_int(&self, k: &BigInt) -> AlgNum {
        AlgNum::normalized(self.field.clone(), self.num.iter().map(|c| c * k).collect(), self.den.clone())
    }

    pub fn mul_rational(&self, q: &BigRational) -> AlgNum {
        AlgNum::normalized(
            self.field.clone(),
            self.num.iter().map(|c| c * q.numer()).collect(),
            &self.den * q.denom(),
        )
    }

    pub fn mul_beta(&self) -> AlgNum {
        let mut v = Vec::with_capacity(self.num.len() + 1);
        v.push(BigInt::zero());
        v.extend(self.num.iter().cloned());
        self.field.reduce(v, self.den.clone())
    }

    pub fn pow(&self, k: u32) -> AlgNum {
        let mut result = self.field.one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    pub fn inv(&self) -> Result<AlgNum, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(self.field.from_rational(&q.recip()));
        }
        let a = QPoly::new(self.coords());
        let p = self.field.core.minpoly.to_qpoly();
        let (g, s, _) = QPoly::ext_gcd(&a, &p);
        debug_assert_eq!(g, QPoly::one());
        let _ = g;
        Ok(self.field.from_coords(&s.c))
    }

    pub fn checked_div(&self, other: &AlgNum) -> Result<AlgNum, AlgebraError> {
        Ok(self * &other.inv()?)
    }

    /// Exact sign of the real value at β.
    pub fn sign(&self) -> Sign {
        if let Some(q) = self.as_rational() {
            return Sign::from_i32(if q.is_positive() {
                1
            } else if q.is_negative() {
                -1
            } else {
                0
            });
        }
        let mut bits = self.field.current_bits();
        loop {
            let (a, b) = eval_interval(&self.num, &bits);
            if a.is_positive() {
                return Sign::Positive;
            }
            if b.is_negative() {
                return Sign::Negative;
            }
            assert!(bits.bits < MAX_BITS, "sign refinement exceeded precision cap");
            bits = self.field.refine_to(bits.bits * 2);
        }
    }

    /// Certified enclosure [lo, hi] of the real value.
    pub fn enclosure(&self) -> (BigRational, BigRational) {
        if let Some(q) = self.as_rational() {
            return (q.clone(), q);
        }
        self.enclosure_at(&self.field.current_bits())
    }

    fn enclosure_at(&self, bits: &BetaBits) -> (BigRational, BigRational) {
        let (a, b) = eval_interval(&self.num, bits);
        let scale = (BigInt::one() << bits.bits as usize) * &self.den;
        (BigRational::new(a, scale.clone()), BigRational::new(b, scale))
    }

    /// Enclosure of width at most 2^{-bits}.
    pub fn enclosure_bits(&self, want: u32) -> (BigRational, BigRational) {
        if let Some(q) = self.as_rational() {
            return (q.clone(), q);
        }
        let target = BigRational::new(BigInt::one(), BigInt::one() << want as usize);
        let mut bits = self.field.current_bits();
        loop {
            let (lo, hi) = self.enclosure_at(&bits);
            if &hi - &lo <= target || bits.bits >= MAX_BITS {
                return (lo, hi);
            }
            bits = self.field.refine_to(bits.bits * 2);
        }
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.enclosure_bits(64);
        (rat_to_f64(&lo) + rat_to_f64(&hi)) / 2.0
    }

    /// The unique integer n with n ≤ a < n+1.
    pub fn floor(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.floor().to_integer();
        }
        let mut bits = self.field.current_bits();
        loop {
            let (lo, hi) = self.enclosure_at(&bits);
            let (fl, fh) = (lo.floor().to_integer(), hi.floor().to_integer());
            if fl == fh {
                // irrational, so the value is never an integer
                return fl;
            }
            if &fh - &fl == BigInt::one() {
                // decide against the single candidate integer
                let s = (self - &self.field.from_int(fh.clone())).sign();
                return if s == Sign::Negative { fl } else { fh };
            }
            bits = self.field.refine_to(bits.bits * 2);
        }
    }

    /// Exact comparison of real values.
    pub fn cmp_value(&self, other: &AlgNum) -> Ordering {
        match (self - other).sign() {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }

    pub fn lt(&self, other: &AlgNum) -> bool {
        self.cmp_value(other) == Ordering::Less
    }

    pub fn le(&self, other: &AlgNum) -> bool {
        self.cmp_value(other) != Ordering::Greater
    }

    pub fn fract(&self) -> AlgNum {
        self - &self.field.from_int(self.floor())
    }

    /// Rendering as Σ c_i β^i, e.g. "-2 + b" or "3/2 - 1/2*b^2".
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.coords().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let coef = if i > 0 && mag.is_one() {
                String::new()
            } else if i > 0 {
                format!("{mag}*")
            } else {
                format!("{mag}")
            };
            let mono = match i {
                0 => String::new(),
                1 => "b".to_string(),
                _ => format!("b^{i}"),
            };
            parts.push((c.is_negative(), format!("{coef}{mono}")));
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (neg, body)) in parts.iter().enumerate() {
            if k == 0 {
                if *neg {
                    s.push('-');
                }
            } else {
                s.push_str(if *neg { " - " } else { " + " });
            }
            s.push_str(body);
        }
        s
    }

    /// Comma-separated rational coordinates, constant first.
    pub fn coord_string(&self) -> String {
        self.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Interval Horner evaluation of Σ c_i β^i, scaled by 2^bits.
fn eval_interval(c: &[BigInt], bits: &BetaBits) -> (BigInt, BigInt) {
    let k = bits.bits as usize;
    let blo = &bits.lo;
    let bhi = if k == 0 { bits.lo.clone() } else { &bits.lo + 1 };
    let mut a = c[c.len() - 1].clone() << k;
    let mut b = a.clone();
    for ci in c[..c.len() - 1].iter().rev() {
        let (na, nb) = if !a.is_negative() {
            (&a * blo, &b * &bhi)
        } else if !b.is_positive() {
            (&a * &bhi, &b * blo)
        } else {
            (&a * &bhi, &b * &bhi)
        };
        a = floor_shift(&na, k) + (ci << k);
        b = ceil_shift(&nb, k) + (ci << k);
    }
    (a, b)
}

fn floor_shift(x: &BigInt, k: usize) -> BigInt {
    x >> k
}

fn ceil_shift(x: &BigInt, k: usize) -> BigInt {
    -((-x) >> k)
}

impl PartialEq for AlgNum {
    fn eq(&self, other: &Self) -> bool {
        self.den == other.den && self.num == other.num
    }
}

impl Eq for AlgNum {}

impl Hash for AlgNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for AlgNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgNum({} ≈ {:.6})", self.render(), self.to_f64())
    }
}

impl fmt::Display for AlgNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn add_sub(a: &AlgNum, b: &AlgNum, sub: bool) -> AlgNum {
    debug_assert!(a.field.same(&b.field), "mixing fields");
    let num = if a.den == b.den {
        a.num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| if sub { x - y } else { x + y })
            .collect::<Vec<_>>()
    } else {
        a.num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| {
                let (l, r) = (x * &b.den, y * &a.den);
                if sub {
                    l - r
                } else {
                    l + r
                }
            })
            .collect()
    };
    let den = if a.den == b.den { a.den.clone() } else { &a.den * &b.den };
    AlgNum::normalized(a.field.clone(), num, den)
}

impl Add for &AlgNum {
    type Output = AlgNum;
    fn add(self, rhs: &AlgNum) -> AlgNum {
        add_sub(self, rhs, false)
    }
}

impl Sub for &AlgNum {
    type Output = AlgNum;
    fn sub(self, rhs: &AlgNum) -> AlgNum {
        add_sub(self, rhs, true)
    }
}

impl Mul for &AlgNum {
    type Output = AlgNum;
    fn mul(self, rhs: &AlgNum) -> AlgNum {
        debug_assert!(self.field.same(&rhs.field), "mixing fields");
        let d = self.num.len();
        let mut v = vec![BigInt::zero(); 2 * d - 1];
        for (i, x) in self.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.num.iter().enumerate() {
                if !y.is_zero() {
                    v[i + j] += x * y;
                }
            }
        }
        self.field.reduce(v, &self.den * &rhs.den)
    }
}

impl Neg for &AlgNum {
    type Output = AlgNum;
    fn neg(self) -> AlgNum {
        AlgNum { field: self.field.clone(), num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for AlgNum {
            type Output = AlgNum;
            fn $m(self, rhs: AlgNum) -> AlgNum {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&AlgNum> for AlgNum {
            type Output = AlgNum;
            fn $m(self, rhs: &AlgNum) -> AlgNum {
                (&self).$m(rhs)
            }
        }
        impl $tr<AlgNum> for &AlgNum {
            type Output = AlgNum;
            fn $m(self, rhs: AlgNum) -> AlgNum {
                self.$m(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for AlgNum {
    type Output = AlgNum;
    fn neg(self) -> AlgNum {
        -&self
    }
}

/// Membership in ℤ[1/β].
pub fn in_z_inv_beta(a: &AlgNum) -> bool {
    if a.den.is_one() {
        return true;
    }
    let c0 = a.field.core.minpoly.coeffs()[0].abs();
    // every prime of the denominator must divide p(0)
    let mut rest = a.den.clone();
    loop {
        let g = rest.gcd(&c0);
        if g.is_one() {
            break;
        }
        while (&rest % &g).is_zero() {
            rest /= &g;
        }
    }
    if !rest.is_one() {
        return false;
    }
    let d = a.field.degree() as u64;
    let budget = d * (a.den.bits() + 1) + 2 * d + 4;
    let mut x = a.clone();
    for _ in 0..budget {
        if x.den.is_one() {
            return true;
        }
        x = x.mul_beta();
    }
    x.den.is_one()
}

/// Parses "p/q" or "a0,a1,..." (rational coordinates in the power basis).
pub fn parse_value(field: &PisotField, text: &str) -> Result<AlgNum, AlgebraError> {
    let parse_q = |s: &str| -> Result<BigRational, AlgebraError> {
        let s = s.trim();
        let bad = || AlgebraError::InvalidValue(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        } else {
            Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
        }
    };
    let coords = text.split(',').map(parse_q).collect::<Result<Vec<_>, _>>()?;
    Ok(field.from_coords(&coords))
}
