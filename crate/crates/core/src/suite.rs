//! Check suites behind the `verify` binary and the certificate document.

use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::error::Result;
use crate::gerstenhaber::{
    check_published_basis, published_basis, verify_gerstenhaber_relations, HClass,
};
use crate::homology::{homology, poincare_polynomial, slice};
use crate::model::{evaluate_pi, verify_bigraded_model, FreeChain, Generator, ModelSpec};
use crate::obstruction::{
    alpha, certificate, hom0_basis, lift_invariance_check, obstruction_verdict, partial_map, pi_dc,
    pi_dp, solve_for_gamma, target_dimension, verify_gamma, ObstructionCertificate, PiAssignment,
    Verdict, CANCELLED, PI_DC_PARTS, PI_DC_TERMS,
};
use crate::report::{CheckReport, FailureKind};
use crate::surjection::{
    check_differential_squares, check_operad_axioms, compose, differential, Chain,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_TRIALS: usize = 20;
pub const DEFAULT_SEED: u64 = 1;

const PUBLISHED: FailureKind = FailureKind::PublishedValueMismatch;
const INTERNAL: FailureKind = FailureKind::InternalInconsistency;

/// Published Poincaré polynomials of `S(k)`.
pub fn published_betti(arity: usize) -> Option<&'static [usize]> {
    match arity {
        2 => Some(&[1, 1]),
        3 => Some(&[1, 3, 2]),
        4 => Some(&[1, 6, 11, 6]),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub max_arity: usize,
    pub trials: usize,
    pub seed: u64,
    pub timings: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            max_arity: 4,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            timings: false,
        }
    }
}

/// The result of one `verify` command.
#[derive(Clone, Debug)]
pub struct SuiteRun {
    pub command: String,
    pub seed: Option<u64>,
    pub checks: Vec<CheckReport>,
    pub verdict: Option<Verdict>,
    pub certificate: Option<ObstructionCertificate>,
}

impl SuiteRun {
    fn new(command: impl Into<String>) -> Self {
        SuiteRun {
            command: command.into(),
            seed: None,
            checks: Vec::new(),
            verdict: None,
            certificate: None,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }

    /// The certificate as a JSON value with sorted keys.
    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("tool_version".into(), json!(TOOL_VERSION));
        doc.insert("command".into(), json!(self.command));
        doc.insert("seed".into(), json!(self.seed));
        doc.insert("checks".into(), json!(self.checks));
        if let Some(v) = self.verdict {
            doc.insert("verdict".into(), json!(v));
        }
        if let Some(c) = &self.certificate {
            doc.insert("certificate".into(), json!(c));
        }
        Value::Object(doc)
    }

    /// Canonical pretty JSON; identical runs give identical bytes.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status}  {:<40} {}\n", c.check_id, c.reference));
            if let Some(summary) = c.details.get("summary").and_then(Value::as_str) {
                out.push_str(&format!("      {summary}\n"));
            }
            if !c.passed() {
                for sub in failed_subchecks(c) {
                    out.push_str(&format!("      failed: {sub}\n"));
                }
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        out.push_str(&format!("{passed}/{} checks passed\n", self.checks.len()));
        if let Some(v) = self.verdict {
            out.push_str(&format!("verdict: {v}\n"));
        }
        out
    }
}

fn failed_subchecks(c: &CheckReport) -> Vec<String> {
    c.details
        .get("subchecks")
        .and_then(Value::as_array)
        .map(|subs| {
            subs.iter()
                .filter(|s| s.get("pass") == Some(&Value::Bool(false)))
                .map(|s| s.to_string())
                .collect()
        })
        .unwrap_or_default()
}

fn timed(timings: bool, f: impl FnOnce() -> CheckReport) -> CheckReport {
    let start = Instant::now();
    let mut report = f();
    if timings {
        report.duration_ms = Some(start.elapsed().as_millis() as u64);
    }
    report
}

fn internal_error(mut report: CheckReport, e: impl ToString) -> CheckReport {
    report.detail("error", e.to_string());
    report.fail(INTERNAL);
    report
}

/// The worked composition and differential examples.
pub fn check_examples() -> CheckReport {
    let mut report = CheckReport::new(
        "composition-examples",
        "worked examples of composition and of the differential in S",
    );
    let ch = |s: &str| Chain::parse(s).expect("valid cells");
    let cases = [
        (
            "2123 o2 121",
            compose(&ch("2123"), 2, &ch("121")),
            "212324+231324+232124",
        ),
        (
            "(121+212) o1 12",
            compose(&ch("121+212"), 1, &ch("12")),
            "1232+1312+3123",
        ),
        ("12 o1 12", compose(&ch("12"), 1, &ch("12")), "123"),
    ];
    for (name, got, expected) in cases {
        let got = got.map(|c| c.to_string()).unwrap_or_else(|e| e.to_string());
        report.subcheck(name, ch(expected).to_string(), got, PUBLISHED);
    }
    report.subcheck(
        "delta(12321)",
        ch("2321+1321+1231+1232").to_string(),
        differential(&ch("12321")).to_string(),
        PUBLISHED,
    );
    report
}

/// Betti numbers of `S(arity)` with an Euler characteristic cross-check.
pub fn check_homology(arity: usize) -> CheckReport {
    let mut report = CheckReport::new(
        format!("homology.arity-{arity}"),
        format!("Poincare polynomial of S({arity})"),
    );
    let betti = poincare_polynomial(arity);
    let cells: Vec<usize> = (0..arity).map(|j| slice(arity, j).rank()).collect();
    let euler = |v: &[usize]| -> i64 {
        v.iter()
            .enumerate()
            .map(|(j, &n)| if j % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    };
    report.detail("cells", &cells);
    report.detail("betti", &betti);
    report.subcheck(
        "Euler characteristic of cells = of homology",
        euler(&cells),
        euler(&betti),
        INTERNAL,
    );
    match published_betti(arity) {
        Some(expected) => {
            report.subcheck("betti numbers", expected.to_vec(), betti.clone(), PUBLISHED);
        }
        None => report.detail("published", "no published value; computed only"),
    }
    report.detail("summary", format!("betti {betti:?}"));
    report
}

/// Each published monomial basis checked against the computed homology.
pub fn check_published_bases() -> CheckReport {
    let mut report = CheckReport::new(
        "monomial-bases",
        "tables of Gerstenhaber monomials forming bases of H(S(k)), k <= 4",
    );
    let mut discrepancies = Vec::new();
    let mut entries = Vec::new();
    for arity in 2..=4 {
        for dim in 0..arity {
            if published_basis(arity, dim).is_empty() {
                continue;
            }
            let pb = check_published_basis(arity, dim);
            report.subcheck(
                &format!("computed basis of H_{dim}({arity}) has size betti"),
                pb.betti,
                pb.computed_basis.len(),
                INTERNAL,
            );
            if let Some(d) = &pb.discrepancy {
                discrepancies.push(format!("H_{dim}({arity}): {d}"));
            }
            entries.push(pb);
        }
    }
    report.detail("bases", &entries);
    report.detail("discrepancies", &discrepancies);
    report.detail(
        "summary",
        format!(
            "{} tables, {} with a listing discrepancy",
            entries.len(),
            discrepancies.len()
        ),
    );
    report
}

pub fn check_pi_compatibility(pi: &PiAssignment) -> CheckReport {
    let report = CheckReport::new(
        "obstruction.pi-compatibility",
        "pi(A) = 0 and pi(B) = 21312+23132+12131+31323 commute with the differentials",
    );
    let spec = pi.model();
    let run = || -> Result<CheckReport> {
        let mut report = report.clone();
        let d_a = evaluate_pi(&spec, spec.d(Generator::Associator))?;
        report.subcheck("pi(d(A)) = 0", true, d_a.is_zero(), PUBLISHED);
        report.subcheck(
            "delta(pi(A)) = pi(d(A))",
            d_a.to_string(),
            differential(&pi.pi_a).to_string(),
            PUBLISHED,
        );
        let d_b = evaluate_pi(&spec, spec.d(Generator::Poissonator))?;
        report.subcheck(
            "delta(pi(B)) = pi(d(B))",
            d_b.to_string(),
            differential(&pi.pi_b).to_string(),
            PUBLISHED,
        );
        report.detail("pi_d_B", d_b.to_string());
        Ok(report)
    };
    run().unwrap_or_else(|e| internal_error(report, e))
}

pub fn check_pi_dc(pi: &PiAssignment) -> CheckReport {
    let report = CheckReport::new(
        "obstruction.pi-dc",
        "pi d(C) is a sum of 24 generators once 313234 and 123242 cancel",
    );
    let run = || -> Result<CheckReport> {
        let mut report = report.clone();
        let spec = pi.model();
        let dc = pi_dc(pi)?;
        let mut expected: Vec<String> = PI_DC_TERMS.iter().map(|s| s.to_string()).collect();
        expected.sort();
        let got: Vec<String> = dc.terms().map(ToString::to_string).collect();
        report.subcheck("number of generators", 24, dc.len(), PUBLISHED);
        report.subcheck("generators", expected, got, PUBLISHED);
        report.subcheck(
            "delta(pi d(C)) = 0",
            true,
            differential(&dc).is_zero(),
            INTERNAL,
        );
        let mut multiset: Vec<String> = Vec::new();
        for (expr, published) in PI_DC_PARTS {
            let part = evaluate_pi(&spec, &FreeChain::parse(expr)?)?;
            let published = Chain::parse(published)?;
            report.subcheck(
                &format!("pi({expr})"),
                published.to_string(),
                part.to_string(),
                PUBLISHED,
            );
            multiset.extend(part.terms().map(ToString::to_string));
        }
        for cell in CANCELLED {
            let copies = multiset.iter().filter(|c| *c == cell).count();
            report.subcheck(
                &format!("{cell} occurs twice and cancels"),
                2,
                copies,
                PUBLISHED,
            );
        }
        report.detail("summary", format!("{} generators", dc.len()));
        Ok(report)
    };
    run().unwrap_or_else(|e| internal_error(report, e))
}

pub fn check_gamma() -> CheckReport {
    let mut report = CheckReport::new(
        "obstruction.gamma",
        "delta(gamma) = y + pi d(C) with y = 141232+414232+141323+414323",
    );
    report.subcheck(
        "delta(gamma) = y + pi d(C)",
        true,
        verify_gamma(),
        PUBLISHED,
    );
    match solve_for_gamma() {
        Ok(found) => {
            report.subcheck(
                "linear solve finds a bounding chain",
                true,
                found.is_some(),
                INTERNAL,
            );
            if let Some(c) = found {
                report.detail("solved_chain_terms", c.len());
            }
        }
        Err(e) => report = internal_error(report, e),
    }
    report
}

pub fn check_alpha(pi: &PiAssignment) -> CheckReport {
    let report = CheckReport::new(
        "obstruction.alpha",
        "alpha(P) = 0 and alpha(C) = [x1,x4][x2,x3], a nonzero class",
    );
    let run = || -> Result<CheckReport> {
        let mut report = report.clone();
        let a = alpha(pi)?;
        report.subcheck(
            "pi d(P) = 0 as a chain",
            true,
            pi_dp(pi)?.is_zero(),
            PUBLISHED,
        );
        report.subcheck("dim H_1(4)", 6, a.at_p.coords.len(), PUBLISHED);
        report.subcheck("dim H_2(4)", 11, a.at_c.coords.len(), PUBLISHED);
        report.subcheck(
            "alpha(C) = [x1,x4]*[x2,x3]",
            HClass::of_str("[x1,x4]*[x2,x3]").coords.to_bit_string(),
            a.at_c.coords.to_bit_string(),
            PUBLISHED,
        );
        report.subcheck("alpha(C) is nonzero", true, !a.at_c.is_zero(), PUBLISHED);
        report.detail("alpha_at_p", a.at_p.coords.to_bit_string());
        report.detail("alpha_at_c", a.at_c.coords.to_bit_string());
        Ok(report)
    };
    run().unwrap_or_else(|e| internal_error(report, e))
}

pub fn check_partial_images() -> CheckReport {
    let mut report = CheckReport::new(
        "obstruction.partial-images",
        "images of the five basis maps f1..f5 of Hom_0(W1(3), H(S(3)))",
    );
    let basis = hom0_basis();
    report.subcheck(
        "dim Hom_0(W1(3), H) = dim H_1(3) + dim H_2(3)",
        homology(3, 1).betti + homology(3, 2).betti,
        basis.len(),
        PUBLISHED,
    );
    report.subcheck("target dimension", 17, target_dimension(), PUBLISHED);
    let images: Vec<_> = basis.iter().map(partial_map).collect();
    let bits = |h: &HClass| h.coords.to_bit_string();
    let at_p = ["[x1,x2]*x3*x4", "[x1,x4]*x2*x3", "x1*x2*[x3,x4]"];
    for (j, expected) in at_p.iter().enumerate() {
        report.subcheck(
            &format!("d(f{})(P) = {expected}", j + 1),
            bits(&HClass::of_str(expected)),
            bits(&images[j].at_p),
            PUBLISHED,
        );
    }
    let mut span = crate::gf2::SpanBasis::new(6, 3);
    let independent = images[..3]
        .iter()
        .all(|img| span.insert(&img.at_p.coords).expect("6 bits"));
    report.subcheck(
        "d(f1)(P), d(f2)(P), d(f3)(P) independent",
        true,
        independent,
        PUBLISHED,
    );
    let c_image = &HClass::of_str("[x1,x4]*[x2,x3]") + &HClass::of_str("[x1,x2]*[x3,x4]");
    for (j, img) in images.iter().enumerate().skip(3) {
        report.subcheck(
            &format!("d(f{})(P) = 0", j + 1),
            true,
            img.at_p.is_zero(),
            PUBLISHED,
        );
        report.subcheck(
            &format!("d(f{})(C) = [x1,x4][x2,x3] + [x1,x2][x3,x4]", j + 1),
            bits(&c_image),
            bits(&img.at_c),
            PUBLISHED,
        );
    }
    let mut linear = true;
    for mask in 0u32..32 {
        let mut f = crate::obstruction::Hom0Element::zero();
        let mut sum = partial_map(&f);
        for (j, g) in basis.iter().enumerate() {
            if mask >> j & 1 == 1 {
                f = &f + g;
                sum = &sum + &images[j];
            }
        }
        linear &= partial_map(&f) == sum;
    }
    report.subcheck("linear on all 32 combinations", true, linear, INTERNAL);
    report.detail(
        "rows",
        images
            .iter()
            .map(|v| v.to_vector().to_bit_string())
            .collect::<Vec<_>>(),
    );
    report
}

pub fn check_verdict(pi: &PiAssignment) -> CheckReport {
    let report = CheckReport::new(
        "obstruction.verdict",
        "alpha is not in the image of the differential, so D2 is not formal as a planar operad",
    );
    match obstruction_verdict(pi) {
        Ok(o) => {
            let mut report = report;
            report.subcheck(
                "only A and B are level-1 generators of arity <= 4",
                true,
                o.only_level_one_generators_are_a_b,
                INTERNAL,
            );
            report.subcheck(
                "alpha outside span of images",
                false,
                o.alpha_in_span,
                PUBLISHED,
            );
            report.subcheck("verdict", Verdict::NotFormal, o.verdict, PUBLISHED);
            report.detail("span_rank", o.span_rank);
            report.detail("alpha", o.alpha.to_vector().to_bit_string());
            report.detail(
                "summary",
                format!("{}, image rank {} in dimension 17", o.verdict, o.span_rank),
            );
            report
        }
        Err(e) => internal_error(report, e),
    }
}

/// Operad axioms and `δ² = 0`.
pub fn run_axioms(opts: &SuiteOptions) -> SuiteRun {
    let mut run = SuiteRun::new(format!("axioms --max-arity {}", opts.max_arity));
    run.checks.push(timed(opts.timings, || {
        check_differential_squares(opts.max_arity)
    }));
    run.checks
        .push(timed(opts.timings, || check_operad_axioms(opts.max_arity)));
    run.checks.push(timed(opts.timings, check_examples));
    run
}

pub fn run_homology(arity: usize, opts: &SuiteOptions) -> SuiteRun {
    let mut run = SuiteRun::new(format!("homology {arity}"));
    run.checks
        .push(timed(opts.timings, || check_homology(arity)));
    run
}

pub fn run_model(opts: &SuiteOptions) -> SuiteRun {
    let mut run = SuiteRun::new("model");
    run.checks.push(timed(opts.timings, || {
        verify_bigraded_model(&ModelSpec::standard())
    }));
    run.checks
        .push(timed(opts.timings, verify_gerstenhaber_relations));
    run.checks.push(timed(opts.timings, check_published_bases));
    run
}

pub fn run_obstruction(opts: &SuiteOptions) -> SuiteRun {
    let mut run = SuiteRun::new(format!(
        "obstruction --trials {} --seed {}",
        opts.trials, opts.seed
    ));
    run.seed = Some(opts.seed);
    fill_obstruction(&mut run, opts);
    run
}

fn fill_obstruction(run: &mut SuiteRun, opts: &SuiteOptions) {
    let pi = PiAssignment::default();
    let t = opts.timings;
    run.checks.push(timed(t, || check_pi_compatibility(&pi)));
    run.checks.push(timed(t, || check_pi_dc(&pi)));
    run.checks.push(timed(t, check_gamma));
    run.checks.push(timed(t, || check_alpha(&pi)));
    run.checks.push(timed(t, check_partial_images));
    run.checks.push(timed(t, || check_verdict(&pi)));
    run.checks
        .push(timed(t, || lift_invariance_check(opts.trials, opts.seed)));
    match certificate(&pi) {
        Ok(c) => {
            run.verdict = Some(c.verdict);
            run.certificate = Some(c);
        }
        Err(e) => run.checks.push(internal_error(
            CheckReport::new("obstruction.certificate", "certificate"),
            e,
        )),
    }
}

/// `δ² = 0` up to arity 5, axioms, homology of `S(2..4)`, model, obstruction.
pub fn run_all(opts: &SuiteOptions) -> SuiteRun {
    let mut run = SuiteRun::new(format!(
        "all --max-arity {} --trials {} --seed {}",
        opts.max_arity, opts.trials, opts.seed
    ));
    run.seed = Some(opts.seed);
    let t = opts.timings;
    run.checks.push(timed(t, || {
        check_differential_squares(opts.max_arity.max(5))
    }));
    run.checks
        .push(timed(t, || check_operad_axioms(opts.max_arity)));
    run.checks.push(timed(t, check_examples));
    for arity in 2..=4 {
        run.checks.push(timed(t, || check_homology(arity)));
    }
    run.checks.extend(run_model(opts).checks);
    fill_obstruction(&mut run, opts);
    run
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_and_homology_pass() {
        assert!(check_examples().passed());
        for k in 2..=4 {
            assert!(check_homology(k).passed());
        }
    }

    #[test]
    fn homology_five_has_no_published_value() {
        let r = check_homology(5);
        assert!(r.passed());
        assert_eq!(r.details["betti"], json!([1, 10, 35, 50, 24]));
        assert!(r.details.get("published").is_some());
    }

    #[test]
    fn bases_flag_the_repeated_entry() {
        let r = check_published_bases();
        assert!(r.passed());
        assert_eq!(r.details["discrepancies"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn obstruction_run_is_deterministic() {
        let opts = SuiteOptions {
            trials: 3,
            ..Default::default()
        };
        let a = run_obstruction(&opts);
        assert!(a.all_passed(), "{}", a.to_text());
        assert_eq!(a.verdict, Some(Verdict::NotFormal));
        let b = run_obstruction(&opts);
        assert_eq!(a.to_json_string(), b.to_json_string());
        let reparsed: Value = serde_json::from_str(&a.to_json_string()).unwrap();
        let mut again = serde_json::to_string_pretty(&reparsed).unwrap();
        again.push('\n');
        assert_eq!(again, a.to_json_string());
    }

    #[test]
    fn timings_only_on_request() {
        let opts = SuiteOptions {
            timings: true,
            ..Default::default()
        };
        assert!(run_homology(3, &opts).checks[0].duration_ms.is_some());
        assert!(run_homology(3, &SuiteOptions::default()).checks[0]
            .duration_ms
            .is_none());
    }
}
