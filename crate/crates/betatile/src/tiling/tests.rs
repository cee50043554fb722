use super::*;
use crate::algebra::IntPolynomial;
use crate::numeration::{is_admissible, kneading_of, DigitWord};
use crate::substitution::rule_from_polynomial;
use num_rational::BigRational;
use proptest::prelude::*;
use std::sync::{Mutex, OnceLock};

const GOLDEN: &[i64] = &[1, -3, 1];
const TRIB: &[i64] = &[-1, -1, -1, 1];
const PHI: &[i64] = &[-1, -1, 1];
const PLASTIC: &[i64] = &[-1, -1, 0, 1];
/// κ(1) = 2(01): non-simple Parry with p = 2.
const HEPT: &[i64] = &[1, -1, -2, 1];

fn rule(c: &'static [i64]) -> Arc<SubstitutionRule> {
    static CACHE: OnceLock<Mutex<Vec<(&'static [i64], Arc<SubstitutionRule>)>>> = OnceLock::new();
    let mut g = CACHE.get_or_init(Default::default).lock().unwrap();
    if let Some((_, r)) = g.iter().find(|(k, _)| *k == c) {
        return r.clone();
    }
    let r = Arc::new(rule_from_polynomial(&IntPolynomial::from_i64(c)).unwrap());
    g.push((c, r.clone()));
    r
}

fn family(c: &'static [i64]) -> Vec<LabeledTiling> {
    canonical_periodic_tilings(&rule(c))
}

fn pick(fam: &[LabeledTiling], label: &str) -> SubstitutiveTiling {
    fam.iter().find(|t| t.label == label).unwrap().tiling.clone()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Right half of a seed tiling by plain word iteration: (start, letter) of the first `n` tiles.
fn right_half_oracle(r: &SubstitutionRule, b: usize, q: usize, n: usize) -> Vec<(AlgNum, usize)> {
    let mut w = vec![b];
    while w.len() < n {
        for _ in 0..q {
            w = r.apply(&w);
        }
    }
    let mut pos = r.field().zero();
    w[..n]
        .iter()
        .map(|&c| {
            let here = pos.clone();
            pos = &pos + r.length(c);
            (here, c)
        })
        .collect()
}

#[test]
fn golden_family() {
    let fam = family(GOLDEN);
    let labels: Vec<&str> = fam.iter().map(|t| t.label.as_str()).collect();
    assert_eq!(labels, ["T_1", "T_1^0"]);
    let t1 = pick(&fam, "T_1");
    let t10 = pick(&fam, "T_1^0");
    assert_eq!(t1.seeds(), (0, 1));
    assert_eq!(t10.seeds(), (0, 0));
    assert_eq!(t1.substitute(), t1);
    assert_eq!(t10.substitute(), t10);
    assert_eq!(t1.power(-3), t1);
}

#[test]
fn family_sizes() {
    for c in [GOLDEN, HEPT] {
        let r = rule(c);
        assert_eq!(family(c).len(), 2 * r.kneading().p);
        for t in family(c) {
            assert_eq!(t.tiling.power(r.kneading().p as i64), t.tiling);
        }
    }
    let labels: Vec<String> = family(TRIB).into_iter().map(|t| t.label).collect();
    assert_eq!(labels, ["T(1|1)", "T(2|1)", "T(3|1)"]);
    assert_eq!(family(PHI).len(), 2);
    assert!(!family(PLASTIC).is_empty());
}

#[test]
fn unit_window_of_t10() {
    let r = rule(GOLDEN);
    let f = r.field().clone();
    let t10 = pick(&family(GOLDEN), "T_1^0");
    let w = t10.window(&f.zero(), &f.one());
    let b2 = &f.beta() - &f.from_int(2);
    let spans: Vec<(usize, AlgNum, AlgNum)> = w.tiles.iter().map(|t| (t.letter, t.start(&r), t.end(&r))).collect();
    assert_eq!(spans, vec![(0, f.zero(), b2.clone()), (1, b2, f.one())]);
    // β·ℓ₁ = ℓ₁ + ℓ₂ + ℓ₁ for ψ(1) = 121
    assert_eq!(r.length(0).mul_beta(), &(r.length(0) + r.length(1)) + r.length(0));
}

#[test]
fn windows_match_word_iteration() {
    for c in [GOLDEN, TRIB, HEPT, PLASTIC] {
        let r = rule(c);
        for t in family(c) {
            let (_, b) = t.tiling.seeds();
            let oracle = right_half_oracle(&r, b, t.tiling.period(), 40);
            let hi = &oracle[39].0 + r.length(oracle[39].1);
            let w = t.tiling.window(&r.field().zero(), &hi);
            let got: Vec<(AlgNum, usize)> = w.tiles.iter().map(|x| (x.start(&r), x.letter)).collect();
            assert_eq!(got, oracle, "{}", t.label);
        }
    }
}

#[test]
fn origin_point_and_t_star() {
    let fam = family(GOLDEN);
    let r = rule(GOLDEN);
    let f = r.field();
    let t10 = pick(&fam, "T_1^0");
    assert_eq!(t10.t_star().unwrap(), f.zero());
    assert_eq!(t10.digit_itinerary(0, 0).unwrap(), vec![0]);
    let t1 = pick(&fam, "T_1");
    assert_eq!(t1.t_star().unwrap(), -&(&f.beta() - &f.from_int(2)));
    for c in [GOLDEN, TRIB, HEPT] {
        for t in family(c) {
            for s in [q(1, 3), q(-7, 5), q(11, 4)] {
                let tt = t.tiling.translate(&t.tiling.rule().field().from_rational(&s));
                assert_eq!(tt.t_star().unwrap(), -&tt.origin_point());
            }
        }
    }
}

#[test]
fn stable_equivalence_examples() {
    let fam = family(GOLDEN);
    let f = rule(GOLDEN).field().clone();
    let (t1, t10) = (pick(&fam, "T_1"), pick(&fam, "T_1^0"));
    // both tilings carry τ₁ on [−(β−2), 0]
    let inside = -&(&f.beta() - &f.from_int(2)).mul_rational(&q(1, 2));
    assert_eq!(stable_equiv_test(&t1, &t10, &inside, 0), StableOutcome::Coincides(0));
    let t = (&f.beta() - &f.from_int(2)).mul_rational(&q(1, 2));
    let StableOutcome::Coincides(k) = stable_equiv_test(&t1, &t10, &t, 60) else { panic!("no coincidence") };
    assert!(k <= 60);
    // re-test the Ψ-iterates directly from windows
    for j in k..k + 3 {
        let a = t1.translate(&t).power(j as i64);
        let b = t10.translate(&t).power(j as i64);
        assert_eq!(a.tile_at(&f.zero()), b.tile_at(&f.zero()));
    }
    assert_eq!(stable_equiv_test(&t1, &t10, &f.zero(), 0), StableOutcome::Unknown);
    assert_eq!(stable_equiv_test(&t1, &t10, &f.zero(), 60), StableOutcome::Unknown);
}

#[test]
fn dense_scans() {
    let fam = family(GOLDEN);
    let f = rule(GOLDEN).field().clone();
    let (t1, t10) = (pick(&fam, "T_1"), pick(&fam, "T_1^0"));
    let s = dense_stable_scan(&t1, &t10, &f.zero(), &f.one(), 64, 60);
    assert_eq!(s.fraction, 1.0);
    assert!(s.failures.is_empty());
    let one = dense_stable_scan(&t1, &t10, &f.zero(), &f.one(), 1, 60);
    assert_eq!(one.grid, 1);
    assert!(one.coincided <= 1);
    let zero = dense_stable_scan(&t1, &t10, &f.zero(), &f.one(), 64, 0);
    assert!(zero.fraction < 1.0);
    assert_eq!(grid_points(&f.zero(), &f.one(), 2), vec![f.from_ratio(1, 4), f.from_ratio(3, 4)]);
}

#[test]
fn certificates() {
    for c in [GOLDEN, PHI] {
        let rep = spectrum_certificate(&rule(c), 32, 60);
        assert_eq!(rep.verdict, Verdict::Certified, "{c:?}");
    }
    let rep = spectrum_certificate(&rule(GOLDEN), 8, 0);
    assert_eq!(rep.verdict, Verdict::Inconclusive);
    let v = serde_json::to_value(&rep.pairs[0]).unwrap();
    for k in ["pair", "grid", "budget", "fraction", "failures", "verdict"] {
        assert!(v.get(k).is_some(), "{k}");
    }
    // m = 0: the right halves agree, so only the left window forces Ψ-iteration
    let rep = spectrum_certificate(&rule(TRIB), 16, 60);
    assert_eq!(rep.verdict, Verdict::Certified);
    assert!(rep.pairs.iter().all(|p| p.max_steps > 0 && p.intervals.len() == 2));
}

#[test]
fn asymptotic_pairs() {
    let r = rule(GOLDEN);
    let f = r.field().clone();
    let fam = family(GOLDEN);
    let (t1, t10) = (pick(&fam, "T_1"), pick(&fam, "T_1^0"));
    let horizon = r.min_length().mul_int(&100.into());
    let AsymptoticOutcome::Asymptotic { t0 } = asymptotic_test(&t10, &t1, &horizon) else { panic!("diverges") };
    // word oracle: last disagreement among the first 400 tiles
    let a = right_half_oracle(&r, 0, 1, 400);
    let b = right_half_oracle(&r, 1, 1, 400);
    let end = |(s, c): &(AlgNum, usize)| s + r.length(*c);
    let last = a
        .iter()
        .filter(|x| !b.contains(x))
        .chain(b.iter().filter(|x| !a.contains(x)))
        .map(end)
        .max_by(|x, y| x.cmp_value(y))
        .unwrap();
    assert_eq!(t0, last);
    assert_eq!(asymptotic_test(&t1, &t1, &horizon), AsymptoticOutcome::Asymptotic { t0: f.zero() });

    let r = rule(HEPT);
    let fam = family(HEPT);
    let horizon = r.min_length().mul_int(&100.into());
    let out = asymptotic_test(&pick(&fam, "T_1"), &pick(&fam, "T_2"), &horizon);
    assert!(matches!(out, AsymptoticOutcome::Diverges { .. }), "{out:?}");
}

#[test]
fn itineraries() {
    for c in [GOLDEN, TRIB, HEPT] {
        let r = rule(c);
        let k = kneading_of(r.field()).unwrap();
        for t in family(c) {
            for s in [q(0, 1), q(2, 7), q(-5, 3)] {
                let tt = t.tiling.translate(&r.field().from_rational(&s));
                let d = tt.digit_itinerary(-12, 12).unwrap();
                assert!(is_admissible(&k, &DigitWord(d.clone())), "{} {s}", t.label);
                let two = tt.two_sided_itinerary().unwrap();
                assert_eq!(two.window(-12, 12), d, "{} {s}", t.label);
                assert!(two.is_admissible(&k, 12));
            }
        }
    }
}

#[test]
fn allowed_patches() {
    let r = rule(TRIB);
    let f = r.field().clone();
    let words: Vec<Vec<usize>> = (0..r.size()).map(|c| r.iterate(c, 12)).collect();
    for t in family(TRIB) {
        let w = t.tiling.translate(&f.from_ratio(13, 3)).window(&f.from_int(-3), &f.from_int(3));
        let l = w.letters();
        assert!(words.iter().any(|x| x.windows(l.len()).any(|y| y == l)), "{}", t.label);
    }
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-200i64..200, 1i64..60).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn translation_and_substitution_commute_with_windows(t in rational(), lo in rational(), len in 1i64..40) {
        for c in [GOLDEN, TRIB] {
            let r = rule(c);
            let f = r.field().clone();
            for lt in family(c) {
                let tl = &lt.tiling;
                let t = f.from_rational(&t);
                let lo = f.from_rational(&lo);
                let hi = &lo + &f.from_ratio(len, 7);
                // window(T − t, lo, hi) = window(T, lo + t, hi + t) − t
                prop_assert_eq!(tl.translate(&t).window(&lo, &hi), tl.window(&(&lo + &t), &(&hi + &t)).translate(&t));
                let w = tl.window(&lo, &hi);
                prop_assert!(w.abuts(&r));
                // window(Ψ T, β lo, β hi) = Ψ(window(T, lo, hi))
                let (blo, bhi) = (lo.mul_beta(), hi.mul_beta());
                prop_assert_eq!(tl.substitute().window(&blo, &bhi), w.substitute(&r).clip(&r, &blo, &bhi));
                // Ψ(T − t) = Ψ(T) − βt
                prop_assert_eq!(tl.translate(&t).substitute().window(&lo, &hi), tl.substitute().translate(&t.mul_beta()).window(&lo, &hi));
            }
        }
    }
}
