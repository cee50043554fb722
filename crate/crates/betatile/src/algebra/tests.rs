use super::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn golden() -> PisotField {
    static F: std::sync::OnceLock<PisotField> = std::sync::OnceLock::new();
    F.get_or_init(|| verify_pisot(&IntPolynomial::from_i64(&[1, -3, 1])).unwrap()).clone()
}

fn tribonacci() -> PisotField {
    static F: std::sync::OnceLock<PisotField> = std::sync::OnceLock::new();
    F.get_or_init(|| verify_pisot(&IntPolynomial::from_i64(&[-1, -1, -1, 1])).unwrap()).clone()
}

/// β to roughly 330 bits by Newton's method on rationals truncated to a fixed grid.
fn newton_beta(f: &PisotField) -> BigRational {
    let p = f.minpoly().to_qpoly();
    let dp = p.derivative();
    let scale = BigInt::one() << 400usize;
    let mut x = BigRational::from_float(f.beta_f64()).unwrap();
    for _ in 0..12 {
        x = &x - p.eval(&x) / dp.eval(&x);
        x = BigRational::new((&x * BigRational::from_integer(scale.clone())).round().to_integer(), scale.clone());
    }
    x
}

#[test]
fn spec_arithmetic_examples() {
    let f = golden();
    let b = f.beta();
    let two = f.from_int(2);
    assert_eq!(&(&b - &two) * &b, &b - &f.one());
    assert_eq!(b.inv().unwrap(), &f.from_int(3) - &b);
    let a = f.from_int_coords(&[5, -7]);
    assert!((&a - &a).is_zero());
    assert_eq!(alg_arithmetic(&a, &f.zero(), FieldOp::Div), Err(AlgebraError::DivisionByZero));
    assert_eq!(alg_arithmetic(&b, &b, FieldOp::Div).unwrap(), f.one());
}

#[test]
fn spec_sign_and_floor_examples() {
    let f = golden();
    let b = f.beta();
    assert_eq!(sign_of(&(&b - &f.from_int(2))), Sign::Positive);
    assert_eq!(sign_of(&f.zero()), Sign::Zero);
    assert_eq!(sign_of(&(&f.from_int(2) - &b)), Sign::Negative);
    assert_eq!(floor_of(&b), BigInt::from(2));
    assert_eq!(floor_of(&f.one()), BigInt::one());
    assert_eq!(floor_of(&(&b - &f.from_int(2))), BigInt::zero());
    assert_eq!(floor_of(&f.from_ratio(-1, 2)), BigInt::from(-1));
}

#[test]
fn spec_z_inv_beta_examples() {
    let f = golden();
    let b = f.beta();
    assert!(in_z_inv_beta(&(&b - &f.from_int(2))));
    assert!(!in_z_inv_beta(&f.from_ratio(1, 2)));
    assert!(in_z_inv_beta(&b.inv().unwrap()));
    // x^2 - 2x - 2 is not a unit: 1/2 lies in ℤ[1/β], 1/3 does not
    let g = verify_pisot(&IntPolynomial::from_i64(&[-2, -2, 1])).unwrap();
    assert!(in_z_inv_beta(&g.beta().inv().unwrap().pow(3)));
    assert!(!in_z_inv_beta(&g.from_ratio(1, 3)));
    assert!(in_z_inv_beta(&g.from_ratio(1, 2)));
}

#[test]
fn sign_matches_newton_oracle_on_samples() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for f in [golden(), tribonacci()] {
        let beta = newton_beta(&f);
        let eps = BigRational::new(BigInt::one(), BigInt::one() << 300usize);
        let d = f.degree();
        for _ in 0..500 {
            let coords: Vec<BigRational> = (0..d)
                .map(|_| BigRational::new(BigInt::from(rng.gen_range(-10_000i64..10_000)), BigInt::from(rng.gen_range(1i64..50))))
                .collect();
            let a = f.from_coords(&coords);
            let mut val = BigRational::zero();
            let mut pw = BigRational::one();
            for c in &coords {
                val += c * &pw;
                pw *= &beta;
            }
            if val.abs() < eps {
                continue;
            }
            let want = if val.is_positive() { Sign::Positive } else { Sign::Negative };
            assert_eq!(a.sign(), want);
        }
    }
}

#[test]
fn near_zero_elements_still_decided() {
    let f = golden();
    // (β-2)^40 ≈ 4.3e-9 while its conjugate is huge
    let x = (&f.beta() - &f.from_int(2)).pow(40);
    assert_eq!(x.sign(), Sign::Positive);
    assert_eq!((&x - &f.from_ratio(1, 1 << 26)).sign(), Sign::Negative);
    assert_eq!((&x - &f.from_ratio(1, 1 << 28)).sign(), Sign::Positive);
}

#[test]
fn enclosure_contains_value() {
    let f = tribonacci();
    let (lo, hi) = f.beta().enclosure_bits(100);
    let beta = newton_beta(&f);
    assert!(lo <= beta && beta <= hi);
    assert!(&hi - &lo <= BigRational::new(BigInt::one(), BigInt::one() << 100usize));
}

#[test]
fn parse_values() {
    let f = golden();
    assert_eq!(parse_value(&f, "1/2").unwrap(), f.from_ratio(1, 2));
    assert_eq!(parse_value(&f, "-2,1").unwrap(), &f.beta() - &f.from_int(2));
    assert!(parse_value(&f, "1/0").is_err());
    assert_eq!(f.beta().render(), "b");
    assert_eq!((&f.beta() - &f.from_int(2)).render(), "-2 + b");
}

fn arb_elem(f: PisotField) -> impl Strategy<Value = AlgNum> {
    let d = f.degree();
    proptest::collection::vec((-50i64..50, 1i64..20), d).prop_map(move |v| {
        let c: Vec<BigRational> = v.iter().map(|&(n, q)| BigRational::new(n.into(), q.into())).collect();
        f.from_coords(&c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in arb_elem(tribonacci()), b in arb_elem(tribonacci()), c in arb_elem(tribonacci())) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), a.field().one());
        }
    }

    #[test]
    fn floor_brackets_value(a in arb_elem(golden())) {
        let n = a.floor();
        let f = a.field().clone();
        let lower = &a - &f.from_int(n.clone());
        let upper = &f.from_int(n + 1) - &a;
        prop_assert!(lower.sign() != Sign::Negative);
        prop_assert_eq!(upper.sign(), Sign::Positive);
    }

    #[test]
    fn sign_is_antisymmetric(a in arb_elem(tribonacci())) {
        let s = a.sign();
        let t = (-&a).sign();
        prop_assert_eq!(s == Sign::Zero, t == Sign::Zero);
        prop_assert!(s == Sign::Zero || s != t);
    }
}

#[test]
fn pisot_invariants_hold_for_samples() {
    for c in [&[1i64, -3, 1][..], &[-1, -1, 1], &[-1, -1, -1, 1], &[-1, -1, 0, 1], &[-1, -1, -1, -1, 1]] {
        let p = IntPolynomial::from_i64(c);
        let f = verify_pisot(&p).unwrap();
        let s = Sturm::new(&p.to_qpoly());
        assert_eq!(s.count_above(&BigRational::one()), 1);
        // |product of roots| = |p(0)| < β
        let c0 = BigRational::from_integer(p.coeffs()[0].abs());
        assert!(c0 < f.beta_enclosure().0);
        assert!(f.conjugate_modulus_bound() < &BigRational::one());
    }
}
