use super::*;
use crate::algebra::linalg::int_det;
use proptest::prelude::*;

fn rule(c: &[i64]) -> SubstitutionRule {
    rule_from_polynomial(&IntPolynomial::from_i64(c)).unwrap()
}

const GOLDEN: &[i64] = &[1, -3, 1];
const TRIB: &[i64] = &[-1, -1, -1, 1];
const PLASTIC: &[i64] = &[-1, -1, 0, 1];
const PHI: &[i64] = &[-1, -1, 1];

/// Samples T_β in floating point across each tile and records the sequence of
/// (branch, tile) pairs it visits.
fn crossing_oracle(r: &SubstitutionRule) -> Vec<Vec<usize>> {
    let beta = r.field().beta_f64();
    let bounds: Vec<(f64, f64)> = r.prototiles().iter().map(|t| (t.min.to_f64(), t.max.to_f64())).collect();
    let samples = 20_000;
    bounds
        .iter()
        .map(|&(lo, hi)| {
            let mut out: Vec<(i64, usize)> = Vec::new();
            for s in 0..samples {
                let x = lo + (hi - lo) * (s as f64 + 0.5) / samples as f64;
                let y = beta * x;
                let branch = y.floor();
                let fr = y - branch;
                let tile = bounds.iter().position(|&(a, b)| a <= fr && fr < b).unwrap();
                if out.last() != Some(&(branch as i64, tile)) {
                    out.push((branch as i64, tile));
                }
            }
            out.into_iter().map(|(_, t)| t).collect()
        })
        .collect()
}

/// det(kI − A) at integer points k, to compare with the characteristic polynomial.
fn char_poly_samples(a: &IntMatrix) -> Vec<BigInt> {
    let n = a.len();
    (-3i64..=n as i64 + 3)
        .map(|k| {
            let m: IntMatrix = (0..n)
                .map(|i| (0..n).map(|j| if i == j { BigInt::from(k) - &a[i][j] } else { -a[i][j].clone() }).collect())
                .collect();
            int_det(&m)
        })
        .collect()
}

#[test]
fn golden_rule_and_tiles() {
    let r = rule(GOLDEN);
    let f = r.field().clone();
    assert_eq!(r.render(), "1->121; 2->21");
    let t = r.prototiles();
    assert_eq!(t.len(), 2);
    assert_eq!((t[0].min.clone(), t[0].max.clone()), (f.zero(), &f.beta() - &f.from_int(2)));
    assert_eq!((t[1].min.clone(), t[1].max.clone()), (&f.beta() - &f.from_int(2), f.one()));
    assert_eq!(r.tau_minus(1), 1);
    assert_eq!(r.tau_minus(2), 0);
    assert_eq!(r.tau_plus(2), Some(1));
    assert_eq!(r.tau_plus(1), None);
}

#[test]
fn derived_rules_match_crossing_oracle() {
    for c in [GOLDEN, TRIB, PLASTIC, PHI, &[-1, -2, -1, 1][..], &[-1, -1, -1, -1, 1]] {
        let r = rule(c);
        assert_eq!(r.words(), &crossing_oracle(&r)[..], "rule for {c:?}");
    }
    assert_eq!(rule(TRIB).render(), "1->123; 2->1; 3->2");
    let p = rule(PLASTIC);
    assert_eq!(p.size(), 5);
    assert_eq!((p.kneading().m, p.kneading().p), (0, 5));
}

#[test]
fn matrices_and_perron_data() {
    let r = rule(GOLDEN);
    let (a, pd, prim) = abelianize_and_perron(&r, r.field()).unwrap();
    assert_eq!(a.entries, vec![vec![2, 1], vec![1, 1]]);
    assert_eq!(pd.char_poly, IntPolynomial::from_i64(GOLDEN));
    assert_eq!(pd.q_factor, IntPolynomial::from_i64(&[1]));
    assert!(prim);

    let r = rule(TRIB);
    let (a, pd, prim) = abelianize_and_perron(&r, r.field()).unwrap();
    assert_eq!(a.entries, vec![vec![1, 1, 1], vec![1, 0, 0], vec![0, 1, 0]]);
    assert_eq!(pd.char_poly, IntPolynomial::from_i64(TRIB));
    assert!(prim);

    let r = rule(PLASTIC);
    let (_, pd, prim) = abelianize_and_perron(&r, r.field()).unwrap();
    assert_eq!(pd.q_factor.degree(), 2);
    assert!(prim);
}

#[test]
fn char_poly_matches_determinant_oracle() {
    for c in [GOLDEN, TRIB, PLASTIC, PHI, &[-1, -2, -1, 1][..]] {
        let r = rule(c);
        let (a, pd, _) = abelianize_and_perron(&r, r.field()).unwrap();
        let want = char_poly_samples(&a.as_int());
        let got: Vec<BigInt> = (-3i64..=a.size() as i64 + 3).map(|k| pd.char_poly.eval_int(&BigInt::from(k))).collect();
        assert_eq!(got, want);
        assert_eq!(pd.q_factor.mul(r.field().minpoly()), pd.char_poly);
    }
}

#[test]
fn exact_identities() {
    for c in [GOLDEN, TRIB, PLASTIC, PHI, &[-1, -2, -1, 1][..], &[-1, -1, -1, -1, 1]] {
        let r = rule(c);
        let f = r.field().clone();
        let l = r.lengths();
        assert_eq!(l.iter().fold(f.zero(), |a, x| &a + x), f.one());
        for i in 0..r.size() {
            let s = r.word(i).iter().fold(f.zero(), |a, &j| &a + r.length(j));
            assert_eq!(s, r.length(i).mul_beta());
        }
        let (a, pd, _) = abelianize_and_perron(&r, &f).unwrap();
        let m = a.abelianization();
        let beta = f.beta();
        let scaled = |v: &[AlgNum]| v.iter().map(|x| x * &beta).collect::<Vec<_>>();
        assert_eq!(left_mul(&pd.l, &m), scaled(&pd.l));
        assert_eq!(right_mul(&m, &pd.omega), scaled(&pd.omega));
        assert_eq!(pd.l.iter().zip(&pd.omega).fold(f.zero(), |a, (x, y)| &a + &(x * y)), f.one());
    }
}

#[test]
fn language_properties() {
    assert!(verify_language_properties(rule(GOLDEN).words(), 6).all_hold());
    let t = verify_language_properties(rule(TRIB).words(), 6);
    assert!(t.all_hold());
    assert_eq!(t.factors, vec!["11", "12", "21", "23", "31"]);
    for c in [PLASTIC, PHI, &[-1, -2, -1, 1][..]] {
        assert!(verify_language_properties(rule(c).words(), 6).all_hold());
    }
    let tm = verify_language_properties(&parse_rule("1->12; 2->21").unwrap(), 6);
    assert!(!tm.property1.holds);
    assert_eq!(tm.property1.offending.as_deref(), Some("22"));
    assert_eq!(tm.factors, vec!["11", "12", "21", "22"]);
}

#[test]
fn factor_closure_matches_brute_force() {
    let r = rule(PLASTIC);
    let fast = two_letter_factors(r.words(), 5);
    let mut slow = BTreeSet::new();
    for i in 0..r.size() {
        for n in 1..=5 {
            slow.extend(r.iterate(i, n).windows(2).map(|w| (w[0], w[1])));
        }
    }
    assert_eq!(fast, slow);
}

#[test]
fn kneading_polynomials() {
    assert_eq!(kneading_polynomial(&[2], &[1]), IntPolynomial::from_i64(GOLDEN));
    assert_eq!(kneading_polynomial(&[], &[1, 1, 0]), IntPolynomial::from_i64(TRIB));
    assert_eq!(kneading_polynomial(&[1, 1, 1], &[]), IntPolynomial::from_i64(TRIB));
    assert_eq!(kneading_polynomial(&[2, 2], &[0, 1]), IntPolynomial::from_i64(&[1, 2, -3, -2, 1]));
}

#[test]
fn stated_rule_discrepancy_is_reported() {
    let d = discrepancy_check(DISCREPANCY_KNEADING, DISCREPANCY_RULE).unwrap();
    assert_eq!(d.kneading_polynomial, "x^4 - 2x^3 - 3x^2 + 2x + 1");
    assert!(d.kneading_polynomial_verdict.starts_with("rejected"));
    // x(x+1)(x^2-3x+1) = x^4 - 2x^3 - 2x^2 + x
    assert_eq!(d.rule_char_poly, "x^4 - 2x^3 - 2x^2 + x");
    assert_eq!(d.rule_integer_roots, vec!["0", "-1"]);
    assert_eq!(d.rule_cofactor, "x^2 - 3x + 1");
    assert_eq!(d.rebuilt_kneading.as_deref(), Some("2(1)"));
    assert_eq!(d.rebuilt_rule.as_deref(), Some("1->121; 2->21"));
    assert!(!d.consistent);
    let ok = discrepancy_check("2(1)", "1->121; 2->21").unwrap();
    assert!(ok.consistent);
}

#[test]
fn integer_beta_refused() {
    let f = verify_pisot(&IntPolynomial::from_i64(&[-3, 1])).unwrap();
    let k = kneading_of(&f).unwrap();
    assert_eq!(build_substitution(&k, &f).unwrap_err(), SubstitutionError::IntegerBeta);
}

#[test]
fn rule_text_round_trip() {
    let w = parse_rule("1->12; 2->34; 3->2341; 4->23").unwrap();
    assert_eq!(render_words(&w), "1->12; 2->34; 3->2341; 4->23");
    assert!(parse_rule("1->15").is_err());
    assert!(parse_rule("2->1").is_err());
    let wide: Vec<Vec<usize>> = (0..10).map(|i| vec![(i + 1) % 10, 0]).collect();
    assert_eq!(parse_rule(&render_words(&wide)).unwrap(), wide);
}

fn arb_words() -> impl Strategy<Value = Vec<Vec<usize>>> {
    (2usize..5).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(0..n, 1..4), n))
}

proptest! {
    #[test]
    fn primitivity_matches_letter_set_iteration(words in arb_words()) {
        let n = words.len();
        let a = SubstitutionMatrix::from_words(&words);
        let bound = n * n - 2 * n + 2;
        let mut sets: Vec<BTreeSet<usize>> = (0..n).map(|i| [i].into()).collect();
        let mut full = false;
        for _ in 0..bound {
            sets = sets.iter().map(|s| s.iter().flat_map(|&c| words[c].iter().copied()).collect()).collect();
            if sets.iter().all(|s| s.len() == n) {
                full = true;
                break;
            }
        }
        prop_assert_eq!(a.is_primitive(), full);
    }
}
