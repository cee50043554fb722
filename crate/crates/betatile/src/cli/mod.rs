//! Command-line front end. Every subcommand writes one JSON document (CSV for `rauzy`) to stdout
//! or to `--out`.
//!
//! Exit codes: 0 success, 1 inconclusive certificate or exhausted search, 2 usage or input error.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::algebra::{parse_value, AlgNum, IntPolynomial, PisotField};
use crate::geometry::{
    arithmetical_code, coding_consistency_and_injectivity, compute_splitting, depth_for_tolerance, fundamental_homoclinic,
    rauzy_cloud, solenoid_map, CodingReport, SolenoidPoint, SplittingData,
};
use crate::numeration::{
    fin_membership, greedy_expansion, is_admissible, parse_periodic, property_w_witness, BetaExpansion, DigitWord, Fractional,
    TwoSidedDigits, WitnessResult,
};
use crate::substitution::{
    abelianize_and_perron, discrepancy_check, rule_from_polynomial, verify_language_properties, DiscrepancyReport,
    LanguageReport, SubstitutionRule, DISCREPANCY_KNEADING, DISCREPANCY_RULE,
};
use crate::tiling::{
    asymptotic_test, canonical_periodic_tilings, spectrum_certificate, AsymptoticOutcome, CertificateReport, LabeledTiling,
    Verdict, DEFAULT_BUDGET, DEFAULT_GRID,
};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Parser, Debug)]
#[command(name = "betatile", version, about = "β-substitutions of Pisot numbers: tilings, certificates and codings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Minimal polynomial coefficients, constant term first, e.g. 1,-3,1
    #[arg(long, allow_hyphen_values = true, conflicts_with = "poly")]
    pub coeffs: Option<String>,
    /// Minimal polynomial as text, e.g. "x^2 - 3x + 1"
    #[arg(long, allow_hyphen_values = true)]
    pub poly: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Write the output here instead of stdout
    #[arg(long)]
    pub out: Option<String>,
    /// Include wall-clock timings (makes output nondeterministic)
    #[arg(long)]
    pub timings: bool,
    /// Seed for every random choice
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Field, kneading invariant, substitution, matrix, Perron data and splitting
    Analyze {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Depth for the two-letter language checks
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Also run the spectrum certificate
        #[arg(long)]
        certify: bool,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Greedy β-expansion of a nonnegative element of ℚ(β)
    Expand {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Rational "p/q" or coordinates "a0,a1,…" in the basis 1, β, …
        #[arg(long, allow_hyphen_values = true)]
        value: String,
    },
    /// Decide membership in Fin(β)
    Fin {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        value: String,
    },
    /// Search t′ ∈ Fin(β) ∩ (lo, hi) with z + t′ ∈ Fin(β)
    PropertyW {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// z ∈ ℤ[1/β]
        #[arg(long, allow_hyphen_values = true)]
        value: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lo: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        hi: String,
        /// Maximum number of candidates examined
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Dense stable-equivalence scans over the canonical periodic tilings
    Spectrum {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Compare two canonical tilings on [0, horizon]
    Asymptotic {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Two tiling labels, e.g. "T_1^0,T_1"; defaults to the first two
        #[arg(long)]
        pair: Option<String>,
        /// Horizon as a multiple of the shortest tile length
        #[arg(long, default_value_t = 100)]
        horizon: u32,
    },
    /// Arithmetical coding of digits, or of the itinerary of a translated tiling
    Code {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Finite two-sided digits "x₋ₖ…x₋₁.x₀x₁…"
        #[arg(long)]
        digits: Option<String>,
        /// Canonical tiling label for the tiling route
        #[arg(long)]
        tiling: Option<String>,
        /// Translation t applied to the tiling
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        value: String,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Truncation depth of the right tail; exact closed form when omitted
        #[arg(long)]
        depth: Option<usize>,
        /// Run the consistency and collision experiment with this many samples
        #[arg(long)]
        samples: Option<usize>,
        /// Collision samples for the experiment
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Rauzy cloud as CSV
    Rauzy {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[arg(long)]
        tiling: Option<String>,
    },
    /// Cross-check a claimed kneading sequence against a claimed rule
    Discrepancy {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = DISCREPANCY_KNEADING)]
        kneading: String,
        #[arg(long, default_value = DISCREPANCY_RULE)]
        rule: String,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// An exact value with a floating approximation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exact {
    pub exact: String,
    pub approx: f64,
}

impl From<&AlgNum> for Exact {
    fn from(a: &AlgNum) -> Self {
        Exact { exact: a.render(), approx: a.to_f64() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldInfo {
    pub polynomial: String,
    pub coeffs: Vec<String>,
    pub degree: usize,
    pub beta: Exact,
    pub beta_enclosure: [String; 2],
    pub theta_max: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KneadingInfo {
    pub m: usize,
    pub p: usize,
    pub digits: String,
    pub greedy: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileInfo {
    pub index: usize,
    pub min: Exact,
    pub max: Exact,
    pub length: Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubstitutionInfo {
    pub words: String,
    pub prototiles: Vec<TileInfo>,
    pub primitive: bool,
    pub language: LanguageReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerronInfo {
    pub char_poly: String,
    pub q_factor: String,
    pub l: Vec<Exact>,
    pub omega: Vec<Exact>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingInfo {
    pub d: usize,
    pub pi_v: Vec<Vec<String>>,
    pub gamma_basis: Vec<Vec<String>>,
    pub l_matrix: Vec<Vec<String>>,
    pub homoclinic: Vec<String>,
    pub homoclinic_determinant: String,
    pub gamma_unstable: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: String,
    pub field: FieldInfo,
    pub kneading: KneadingInfo,
    pub substitution: SubstitutionInfo,
    /// a_ij = number of j in ψ(i).
    pub matrix: Vec<Vec<u64>>,
    pub perron: PerronInfo,
    pub splitting: SplittingInfo,
    pub certificates: Option<CertificateReport>,
    pub timings: Option<BTreeMap<String, f64>>,
    pub seed: u64,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

struct Clock {
    on: bool,
    start: Instant,
    marks: BTreeMap<String, f64>,
}

impl Clock {
    fn new(on: bool) -> Self {
        Clock { on, start: Instant::now(), marks: BTreeMap::new() }
    }

    fn mark(&mut self, name: &str) {
        if self.on {
            self.marks.insert(name.to_string(), self.start.elapsed().as_secs_f64());
            self.start = Instant::now();
        }
    }

    fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.on.then_some(self.marks)
    }
}

fn polynomial(args: &FieldArgs) -> CliResult<IntPolynomial> {
    match (&args.coeffs, &args.poly) {
        (Some(c), None) => Ok(IntPolynomial::parse_coeffs(c)?),
        (None, Some(p)) => Ok(IntPolynomial::parse_human(p)?),
        _ => Err(Failure("give exactly one of --coeffs or --poly".into())),
    }
}

fn rule_of(args: &FieldArgs) -> CliResult<Arc<SubstitutionRule>> {
    Ok(Arc::new(rule_from_polynomial(&polynomial(args)?)?))
}

fn field_of(args: &FieldArgs) -> CliResult<PisotField> {
    Ok(crate::algebra::verify_pisot(&polynomial(args)?)?)
}

fn parse_rational(text: &str) -> CliResult<BigRational> {
    let t = text.trim();
    let bad = || Failure(format!("invalid rational '{text}'"));
    match t.split_once('/') {
        Some((n, d)) => {
            let (n, d): (num_bigint::BigInt, num_bigint::BigInt) = (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?);
            if d == 0.into() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

fn splitting_of(rule: &SubstitutionRule) -> CliResult<(crate::substitution::SubstitutionMatrix, crate::substitution::PerronData, bool, SplittingData)> {
    let (a, pd, prim) = abelianize_and_perron(rule, rule.field())?;
    let s = compute_splitting(&a, rule.field(), &pd)?;
    Ok((a, pd, prim, s))
}

fn find_tiling(fam: &[LabeledTiling], label: Option<&str>, default: usize) -> CliResult<LabeledTiling> {
    match label {
        None => fam.get(default).cloned().ok_or_else(|| Failure("the canonical family is too small".into())),
        Some(l) => fam.iter().find(|t| t.label == l).cloned().ok_or_else(|| {
            let names: Vec<&str> = fam.iter().map(|t| t.label.as_str()).collect();
            Failure(format!("unknown tiling '{l}' (available: {})", names.join(", ")))
        }),
    }
}

fn rat_rows(m: &[Vec<BigRational>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

pub fn analysis_report(
    rule: &Arc<SubstitutionRule>,
    depth: usize,
    certify: Option<(usize, usize)>,
    seed: u64,
    timings: bool,
) -> Result<AnalysisReport, String> {
    let mut clock = Clock::new(timings);
    let f = rule.field();
    let k = rule.kneading();
    let (lo, hi) = f.beta_enclosure();
    let language = verify_language_properties(rule.words(), depth);
    clock.mark("language");
    let (a, pd, primitive, s) = splitting_of(rule).map_err(|e| e.0)?;
    let hom = fundamental_homoclinic(&s).map_err(|e| e.to_string())?;
    clock.mark("splitting");
    let certificates = certify.map(|(grid, budget)| spectrum_certificate(rule, grid, budget));
    clock.mark("certificates");
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION.into(),
        field: FieldInfo {
            polynomial: f.minpoly().to_string(),
            coeffs: f.minpoly().coeffs().iter().map(|c| c.to_string()).collect(),
            degree: f.degree(),
            beta: Exact::from(&f.beta()),
            beta_enclosure: [lo.to_string(), hi.to_string()],
            theta_max: f.conjugate_modulus_bound().to_string(),
        },
        kneading: KneadingInfo { m: k.m, p: k.p, digits: k.render(), greedy: k.greedy_finite.as_ref().map(|g| g.to_string()) },
        substitution: SubstitutionInfo {
            words: rule.render(),
            prototiles: rule
                .prototiles()
                .iter()
                .map(|t| TileInfo { index: t.index, min: (&t.min).into(), max: (&t.max).into(), length: (&t.length).into() })
                .collect(),
            primitive,
            language,
        },
        matrix: a.entries.clone(),
        perron: PerronInfo {
            char_poly: pd.char_poly.to_string(),
            q_factor: pd.q_factor.to_string(),
            l: pd.l.iter().map(Exact::from).collect(),
            omega: pd.omega.iter().map(Exact::from).collect(),
        },
        splitting: SplittingInfo {
            d: s.d,
            pi_v: rat_rows(&s.pi_v),
            gamma_basis: rat_rows(&s.gamma_basis),
            l_matrix: s.l_matrix.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            homoclinic: hom.e,
            homoclinic_determinant: hom.determinant,
            gamma_unstable: hom.gamma_unstable,
        },
        certificates,
        timings: clock.finish(),
        seed,
    })
}

#[derive(Serialize)]
struct ExpansionJson {
    schema_version: &'static str,
    value: Exact,
    expansion: String,
    integer_digits: String,
    fractional_preperiod: String,
    fractional_period: String,
    finite: bool,
    admissible_prefix: bool,
}

fn expansion_json(f: &PisotField, x: &AlgNum, e: &BetaExpansion) -> ExpansionJson {
    let k = crate::numeration::kneading_of(f).expect("kneading of a verified field");
    let (pre, per) = match &e.fractional {
        Fractional::Finite(w) => (w.clone(), DigitWord(vec![])),
        Fractional::EventuallyPeriodic { preperiod, period } => (preperiod.clone(), period.clone()),
    };
    let mut all = e.integer_part_digits.0.clone();
    all.extend(e.fractional_digits(pre.len() + 2 * per.len() + 4));
    ExpansionJson {
        schema_version: SCHEMA_VERSION,
        value: x.into(),
        expansion: e.render(),
        integer_digits: e.integer_part_digits.to_string(),
        fractional_preperiod: pre.to_string(),
        fractional_period: per.to_string(),
        finite: e.is_finite(),
        admissible_prefix: is_admissible(&k, &DigitWord(all)),
    }
}

#[derive(Serialize)]
struct WitnessJson {
    schema_version: &'static str,
    z: Exact,
    lo: String,
    hi: String,
    budget: usize,
    found: bool,
    candidates: usize,
    t: Option<Exact>,
    digits: Option<String>,
    sum_expansion: Option<String>,
}

#[derive(Serialize)]
struct SpectrumJson {
    schema_version: &'static str,
    polynomial: String,
    #[serde(flatten)]
    report: CertificateReport,
    timings: Option<BTreeMap<String, f64>>,
    seed: u64,
}

#[derive(Serialize)]
struct AsymptoticJson {
    schema_version: &'static str,
    pair: [String; 2],
    horizon: Exact,
    verdict: &'static str,
    t0: Option<Exact>,
    witness: Option<Exact>,
}

#[derive(Serialize)]
struct CodeJson {
    schema_version: &'static str,
    source: String,
    digits: Option<String>,
    levels: usize,
    depth: Option<usize>,
    tail_bound: f64,
    code: SolenoidPoint,
    factor_map: Option<SolenoidPoint>,
    agreement: Option<f64>,
}

#[derive(Serialize)]
struct CodingJson {
    schema_version: &'static str,
    seed: u64,
    #[serde(flatten)]
    report: CodingReport,
}

#[derive(Serialize)]
struct DiscrepancyJson {
    schema_version: &'static str,
    #[serde(flatten)]
    report: DiscrepancyReport,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

fn parse_two_sided(text: &str) -> CliResult<TwoSidedDigits> {
    let (left, right) = text.split_once('.').unwrap_or(("", text));
    let l = DigitWord::parse(left)?;
    let r = DigitWord::parse(right)?;
    let mut all = l.0.clone();
    all.extend(r.0);
    Ok(TwoSidedDigits::finite(&all, l.0.len()))
}

/// Runs one command; returns the exit code and the text destined for stdout.
fn execute(cmd: Command) -> CliResult<(i32, String, Option<String>)> {
    match cmd {
        Command::Analyze { field, common, depth, certify, grid, budget } => {
            let rule = rule_of(&field)?;
            let rep = analysis_report(&rule, depth, certify.then_some((grid, budget)), common.seed, common.timings).map_err(Failure)?;
            let code = match &rep.certificates {
                Some(c) if c.verdict == Verdict::Inconclusive => 1,
                _ => 0,
            };
            Ok((code, to_json(&rep), common.out))
        }
        Command::Expand { field, common, value } => {
            let f = field_of(&field)?;
            let x = parse_value(&f, &value)?;
            let e = greedy_expansion(&f, &x)?;
            Ok((0, to_json(&expansion_json(&f, &x, &e)), common.out))
        }
        Command::Fin { field, common, value } => {
            let f = field_of(&field)?;
            let x = parse_value(&f, &value)?;
            let m = fin_membership(&f, &x)?;
            Ok((0, to_json(&expansion_json(&f, &x, m.expansion())), common.out))
        }
        Command::PropertyW { field, common, value, lo, hi, budget } => {
            let f = field_of(&field)?;
            let k = crate::numeration::kneading_of(&f)?;
            let z = parse_value(&f, &value)?;
            let (l, h) = (parse_rational(&lo)?, parse_rational(&hi)?);
            let res = property_w_witness(&f, &k, &z, &l, &h, budget)?;
            let mut out = WitnessJson {
                schema_version: SCHEMA_VERSION,
                z: (&z).into(),
                lo: l.to_string(),
                hi: h.to_string(),
                budget,
                found: false,
                candidates: 0,
                t: None,
                digits: None,
                sum_expansion: None,
            };
            let code = match res {
                WitnessResult::Witness { t, word, candidates } => {
                    out.found = true;
                    out.candidates = candidates;
                    out.sum_expansion = Some(greedy_expansion(&f, &(&z + &t))?.render());
                    out.t = Some((&t).into());
                    out.digits = Some(word.to_string());
                    0
                }
                WitnessResult::NotFound { candidates } => {
                    out.candidates = candidates;
                    1
                }
            };
            Ok((code, to_json(&out), common.out))
        }
        Command::Spectrum { field, common, grid, budget } => {
            if grid == 0 {
                return Err(Failure("--grid must be at least 1".into()));
            }
            let mut clock = Clock::new(common.timings);
            let rule = rule_of(&field)?;
            clock.mark("construction");
            let report = spectrum_certificate(&rule, grid, budget);
            clock.mark("scan");
            let code = if report.verdict == Verdict::Certified { 0 } else { 1 };
            let out = SpectrumJson {
                schema_version: SCHEMA_VERSION,
                polynomial: rule.field().minpoly().to_string(),
                report,
                timings: clock.finish(),
                seed: common.seed,
            };
            Ok((code, to_json(&out), common.out))
        }
        Command::Asymptotic { field, common, pair, horizon } => {
            let rule = rule_of(&field)?;
            let fam = canonical_periodic_tilings(&rule);
            let (a, b) = match &pair {
                Some(p) => {
                    let (x, y) = p.split_once(',').ok_or_else(|| Failure("--pair needs two labels".into()))?;
                    (find_tiling(&fam, Some(x.trim()), 0)?, find_tiling(&fam, Some(y.trim()), 1)?)
                }
                None => (find_tiling(&fam, None, 0)?, find_tiling(&fam, None, 1)?),
            };
            let h = rule.min_length().mul_int(&horizon.into());
            let (verdict, t0, witness) = match asymptotic_test(&a.tiling, &b.tiling, &h) {
                AsymptoticOutcome::Asymptotic { t0 } => ("Asymptotic", Some((&t0).into()), None),
                AsymptoticOutcome::Diverges { witness } => ("Diverges", None, Some((&witness).into())),
            };
            let out = AsymptoticJson { schema_version: SCHEMA_VERSION, pair: [a.label, b.label], horizon: (&h).into(), verdict, t0, witness };
            Ok((0, to_json(&out), common.out))
        }
        Command::Code { field, common, digits, tiling, value, levels, depth, samples, points, tolerance } => {
            let rule = rule_of(&field)?;
            let (_, _, _, s) = splitting_of(&rule)?;
            if let Some(n) = samples {
                let d = depth.unwrap_or_else(|| depth_for_tolerance(&s, tolerance / 10.0));
                let rep = coding_consistency_and_injectivity(&rule, &s, n, points, tolerance, levels, d, common.seed)?;
                let code = if rep.consistency_agreed == rep.consistency_samples { 0 } else { 1 };
                return Ok((code, to_json(&CodingJson { schema_version: SCHEMA_VERSION, seed: common.seed, report: rep }), common.out));
            }
            let k = rule.kneading();
            let out = match digits {
                Some(text) => {
                    let y = parse_two_sided(&text)?;
                    let c = arithmetical_code(&y, k, &s, levels, depth)?;
                    CodeJson {
                        schema_version: SCHEMA_VERSION,
                        source: "digits".into(),
                        digits: Some(text),
                        levels,
                        depth,
                        tail_bound: c.tail_bound,
                        code: c.point,
                        factor_map: None,
                        agreement: None,
                    }
                }
                None => {
                    let fam = canonical_periodic_tilings(&rule);
                    let lt = find_tiling(&fam, tiling.as_deref(), 0)?;
                    let t = parse_value(rule.field(), &value)?;
                    let tt = lt.tiling.translate(&t);
                    let y = tt.two_sided_itinerary()?.unshift();
                    let c = arithmetical_code(&y, k, &s, levels, depth)?;
                    let pi_hat = solenoid_map(&tt, &s, levels)?;
                    let agreement = pi_hat.distance(&c.point);
                    CodeJson {
                        schema_version: SCHEMA_VERSION,
                        source: format!("{} - ({})", lt.label, t.render()),
                        digits: None,
                        levels,
                        depth,
                        tail_bound: c.tail_bound,
                        code: c.point,
                        factor_map: Some(pi_hat),
                        agreement: Some(agreement),
                    }
                }
            };
            Ok((0, to_json(&out), common.out))
        }
        Command::Rauzy { field, common, points, tiling } => {
            let rule = rule_of(&field)?;
            let (_, _, _, s) = splitting_of(&rule)?;
            let fam = canonical_periodic_tilings(&rule);
            let lt = find_tiling(&fam, tiling.as_deref(), 0)?;
            let cloud = rauzy_cloud(&lt.tiling, &s, points);
            let mut csv = String::new();
            for p in &cloud.points {
                let row: Vec<String> = p.iter().map(|x| format!("{x:.17e}")).collect();
                csv.push_str(&row.join(","));
                csv.push('\n');
            }
            Ok((0, csv, common.out))
        }
        Command::Discrepancy { common, kneading, rule } => {
            parse_periodic(&kneading)?;
            let report = discrepancy_check(&kneading, &rule)?;
            Ok((0, to_json(&DiscrepancyJson { schema_version: SCHEMA_VERSION, report }), common.out))
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome { code: 0, stdout: e.to_string(), stderr: String::new() },
                _ => {
                    let text = e.to_string();
                    let line = text.lines().next().unwrap_or("usage error").to_string();
                    Outcome { code: 2, stdout: String::new(), stderr: format!("{line}\n") }
                }
            };
        }
    };
    match execute(cli.command) {
        Ok((code, text, None)) => Outcome { code, stdout: text, stderr: String::new() },
        Ok((code, text, Some(path))) => match std::fs::write(&path, text) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
            Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: cannot write {path}: {e}\n") },
        },
        Err(Failure(msg)) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {}\n", msg.replace('\n', " ")) },
    }
}
