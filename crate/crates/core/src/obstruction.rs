//! The first obstruction to planar formality of `S` and the resulting verdict.
//!
//! Level-1 generators are sent to chains of `S` compatible with the model
//! differential. Evaluating `d(P)` and `d(C)` then yields cycles whose classes
//! form `α ∈ Hom₋₁(W², H)`. Formality would force `α` into the image of
//! `∂: Hom₀(W¹, H) → Hom₋₁(W², H)`; the engine decides this membership by an
//! exact span test in the 17-dimensional target `H₁(S(4)) ⊕ H₂(S(4))`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::gerstenhaber::{bracket_cycle, class_compose, product_cycle, HClass};
use crate::gf2::{solve, BitVector, SpanBasis};
use crate::homology::{homology, slice};
use crate::model::{evaluate_pi, FreeChain, Generator, ModelSpec, TreeMonomial};
use crate::report::{CheckReport, FailureKind};
use crate::surjection::{differential, Chain};

/// `π(B)` as published.
pub const DEFAULT_PI_B: &str = "21312+23132+12131+31323";

/// The cycle `πd(C)` for the default assignment: 24 cells.
pub const PI_DC_TERMS: [&str; 24] = [
    "312423", "314123", "341243", "131242", "131412", "412434", // B o1 m
    "231413", "214123", "234143", "241423", "123141", "414234", // B o2 m
    "213412", "234142", "231342", "121341", "341424", "313424", // B o3 m
    "213124", "231324", "121314", // m o1 B
    "132423", "134243", "142434", // m o2 B
];

/// Published images of the individual `B`-terms of `d(C)`.
pub const PI_DC_PARTS: [(&str, &str); 5] = [
    ("B o1 m", "312423+314123+341243+123242+131242+131412+412434"),
    ("B o2 m", "231413+214123+234143+241423+123141+414234"),
    ("B o3 m", "213412+234142+231342+121341+341424+313424+313234"),
    ("m o1 B", "213124+231324+121314+313234"),
    ("m o2 B", "132423+134243+123242+142434"),
];

/// The cells that occur twice among the parts and cancel.
pub const CANCELLED: [&str; 2] = ["313234", "123242"];

/// A cycle representing `[x1,x4][x2,x3]`.
pub const Y: &str = "141232+414232+141323+414323";

/// The bounding chain with `δ(γ) = y + πd(C)`.
pub const GAMMA: &str = "2314132+2341432+2131412+3414243+2131242+2141232+2313242+\
2414232+3141323+3414323+3132423+3134243+1213141+4142434";

/// Images in `S` of the generators of level `<= 1` that enter `d(P)` and `d(C)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiAssignment {
    pub product: Chain,
    pub bracket: Chain,
    pub pi_a: Chain,
    pub pi_b: Chain,
}

impl Default for PiAssignment {
    fn default() -> Self {
        PiAssignment {
            product: product_cycle(),
            bracket: bracket_cycle(),
            pi_a: Chain::zero(3, 1),
            pi_b: Chain::parse(DEFAULT_PI_B).expect("valid cells"),
        }
    }
}

impl PiAssignment {
    pub fn model(&self) -> ModelSpec {
        ModelSpec::standard()
            .with_pi(Generator::Product, self.product.clone())
            .with_pi(Generator::Bracket, self.bracket.clone())
            .with_pi(Generator::Associator, self.pi_a.clone())
            .with_pi(Generator::Poissonator, self.pi_b.clone())
    }

    /// Checks that `π` commutes with the differentials on `A` and `B` and
    /// that `m`, `b` go to cycles representing the product and bracket.
    pub fn validate(&self) -> Result<()> {
        let spec = self.model();
        let standard = ModelSpec::standard();
        for g in [Generator::Product, Generator::Bracket] {
            let rep = spec.pi(g).expect("assigned");
            let expected = HClass::from_cycle(standard.pi(g).expect("assigned"))?;
            if HClass::from_cycle(rep)? != expected {
                return Err(Error::NotACycle);
            }
        }
        for g in [Generator::Associator, Generator::Poissonator] {
            let lhs = differential(spec.pi(g).expect("assigned"));
            let rhs = evaluate_pi(&spec, spec.d(g))?;
            if lhs != rhs {
                return Err(Error::Parse(format!(
                    "delta(pi({g})) = {lhs} differs from pi(d{g}) = {rhs}"
                )));
            }
        }
        Ok(())
    }
}

/// An arity- and dimension-preserving map `W¹(≤4) → H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hom0Element {
    pub value_a: HClass,
    pub value_b: HClass,
}

impl Hom0Element {
    pub fn zero() -> Self {
        Hom0Element {
            value_a: HClass::zero(3, 1),
            value_b: HClass::zero(3, 2),
        }
    }
}

impl std::ops::Add for &Hom0Element {
    type Output = Hom0Element;

    fn add(self, rhs: &Hom0Element) -> Hom0Element {
        Hom0Element {
            value_a: &self.value_a + &rhs.value_a,
            value_b: &self.value_b + &rhs.value_b,
        }
    }
}

/// An element of `Hom₋₁(W²(≤4), H)`: the values at `P` and `C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionValue {
    pub at_p: HClass,
    pub at_c: HClass,
}

impl ObstructionValue {
    /// Concatenated coordinates `(at_p, at_c)`.
    pub fn to_vector(&self) -> BitVector {
        self.at_p.coords.concat(&self.at_c.coords)
    }

    pub fn is_zero(&self) -> bool {
        self.at_p.is_zero() && self.at_c.is_zero()
    }
}

impl std::ops::Add for &ObstructionValue {
    type Output = ObstructionValue;

    fn add(self, rhs: &ObstructionValue) -> ObstructionValue {
        ObstructionValue {
            at_p: &self.at_p + &rhs.at_p,
            at_c: &self.at_c + &rhs.at_c,
        }
    }
}

/// Dimension of `Hom₋₁(W²(≤4), H) = H₁(S(4)) ⊕ H₂(S(4))`.
pub fn target_dimension() -> usize {
    homology(4, 1).betti + homology(4, 2).betti
}

pub fn pi_dp(pi: &PiAssignment) -> Result<Chain> {
    let spec = pi.model();
    evaluate_pi(&spec, spec.d(Generator::Pentagonator))
}

pub fn pi_dc(pi: &PiAssignment) -> Result<Chain> {
    let spec = pi.model();
    evaluate_pi(&spec, spec.d(Generator::Coherence))
}

pub fn alpha(pi: &PiAssignment) -> Result<ObstructionValue> {
    Ok(ObstructionValue {
        at_p: HClass::from_cycle(&pi_dp(pi)?)?,
        at_c: HClass::from_cycle(&pi_dc(pi)?)?,
    })
}

pub fn y_cycle() -> Chain {
    Chain::parse(Y).expect("valid cells")
}

pub fn gamma_chain() -> Chain {
    Chain::parse(GAMMA).expect("valid cells")
}

pub fn gamma_holds(gamma: &Chain) -> Result<bool> {
    let target = y_cycle().try_add(&pi_dc(&PiAssignment::default())?)?;
    Ok(differential(gamma) == target)
}

/// `δ(γ) = y + πd(C)` for the published `γ`.
pub fn verify_gamma() -> bool {
    gamma_holds(&gamma_chain()).unwrap_or(false)
}

/// Independent route: some 3-chain bounds `y + πd(C)`, found by a linear solve.
pub fn solve_for_gamma() -> Result<Option<Chain>> {
    let target = y_cycle().try_add(&pi_dc(&PiAssignment::default())?)?;
    let top = slice(4, 3);
    let lower = slice(4, 2);
    let v = lower.vectorize(&target)?;
    solve(&top.boundary_matrix, &v)?
        .map(|x| top.chain(&x))
        .transpose()
}

/// The five maps spanning `Hom₀(W¹(3), H(S(3)))`.
pub fn hom0_basis() -> Vec<Hom0Element> {
    let on_a = ["[x1,x2]*x3", "[x1,x3]*x2", "x1*[x2,x3]"].map(HClass::of_str);
    let on_b = ["[[x1,x2],x3]", "[x1,[x2,x3]]"].map(HClass::of_str);
    let mut out: Vec<Hom0Element> = on_a
        .into_iter()
        .map(|value_a| Hom0Element {
            value_a,
            value_b: HClass::zero(3, 2),
        })
        .collect();
    out.extend(on_b.into_iter().map(|value_b| Hom0Element {
        value_a: HClass::zero(3, 1),
        value_b,
    }));
    out
}

fn hat_f_tree(f: &Hom0Element, t: &TreeMonomial) -> Result<HClass> {
    match t {
        TreeMonomial::Leaf => Ok(HClass::unit()),
        TreeMonomial::Node(g, children) => {
            let mut acc = match g {
                Generator::Product => HClass::of_str("x1*x2"),
                Generator::Bracket => HClass::of_str("[x1,x2]"),
                Generator::Associator => f.value_a.clone(),
                Generator::Poissonator => f.value_b.clone(),
                other => return Err(Error::PiUndefined(other.symbol())),
            };
            for (idx, child) in children.iter().enumerate().rev() {
                if *child != TreeMonomial::Leaf {
                    acc = class_compose(&acc, idx + 1, &hat_f_tree(f, child)?)?;
                }
            }
            Ok(acc)
        }
    }
}

/// Evaluates the operad map `f̂: F(W^{≤1}) → H` (extending `f` by `ρ`).
pub fn hat_f(f: &Hom0Element, c: &FreeChain) -> Result<HClass> {
    let mut acc = HClass::zero(c.arity, c.dimension);
    for t in c.terms() {
        acc = acc.try_add(&hat_f_tree(f, t)?)?;
    }
    Ok(acc)
}

/// `∂(f) = f̂ ∘ d` on `W²(≤4) = {P, C}`.
pub fn partial_map(f: &Hom0Element) -> ObstructionValue {
    let spec = ModelSpec::standard();
    ObstructionValue {
        at_p: hat_f(f, spec.d(Generator::Pentagonator)).expect("d(P) lies over W<=1"),
        at_c: hat_f(f, spec.d(Generator::Coherence)).expect("d(C) lies over W<=1"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "FORMAL_NOT_EXCLUDED")]
    FormalNotExcluded,
    #[serde(rename = "NOT_FORMAL")]
    NotFormal,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::FormalNotExcluded => "FORMAL_NOT_EXCLUDED",
            Verdict::NotFormal => "NOT_FORMAL",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ObstructionOutcome {
    pub alpha: ObstructionValue,
    pub images: Vec<ObstructionValue>,
    pub span_rank: usize,
    pub alpha_in_span: bool,
    pub only_level_one_generators_are_a_b: bool,
    pub verdict: Verdict,
}

impl ObstructionOutcome {
    pub fn image_rows(&self) -> Vec<String> {
        self.images
            .iter()
            .map(|v| v.to_vector().to_bit_string())
            .collect()
    }
}

fn image_span(images: &[ObstructionValue]) -> SpanBasis {
    let mut span = SpanBasis::new(target_dimension(), images.len());
    for v in images {
        span.insert(&v.to_vector()).expect("17-dimensional");
    }
    span
}

pub fn obstruction_verdict(pi: &PiAssignment) -> Result<ObstructionOutcome> {
    let alpha = alpha(pi)?;
    let images: Vec<ObstructionValue> = hom0_basis().iter().map(partial_map).collect();
    let span = image_span(&images);
    let alpha_in_span = span.contains(&alpha.to_vector())?;
    let level_one: Vec<Generator> = pi.model().generators_at_level(1, 4);
    Ok(ObstructionOutcome {
        alpha,
        span_rank: span.dim(),
        alpha_in_span,
        only_level_one_generators_are_a_b: level_one
            == vec![Generator::Associator, Generator::Poissonator],
        verdict: if alpha_in_span {
            Verdict::FormalNotExcluded
        } else {
            Verdict::NotFormal
        },
        images,
    })
}

/// Machine-readable record of the obstruction computation.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionCertificate {
    pub pi: serde_json::Value,
    pub pi_dc_terms: Vec<String>,
    pub pi_dc_count: usize,
    pub gamma_check: bool,
    pub gamma_solve_check: bool,
    pub alpha_at_p: String,
    pub alpha_at_c: String,
    pub alpha: String,
    pub partial_images: Vec<String>,
    pub span_rank: usize,
    pub target_dimension: usize,
    pub verdict: Verdict,
}

pub fn certificate(pi: &PiAssignment) -> Result<ObstructionCertificate> {
    let outcome = obstruction_verdict(pi)?;
    let dc = pi_dc(pi)?;
    Ok(ObstructionCertificate {
        pi: json!({
            "m": pi.product.to_string(),
            "b": pi.bracket.to_string(),
            "A": pi.pi_a.to_string(),
            "B": pi.pi_b.to_string(),
        }),
        pi_dc_terms: dc.terms().map(ToString::to_string).collect(),
        pi_dc_count: dc.len(),
        gamma_check: verify_gamma(),
        gamma_solve_check: solve_for_gamma()?.is_some(),
        alpha_at_p: outcome.alpha.at_p.coords.to_bit_string(),
        alpha_at_c: outcome.alpha.at_c.coords.to_bit_string(),
        alpha: outcome.alpha.to_vector().to_bit_string(),
        partial_images: outcome.image_rows(),
        span_rank: outcome.span_rank,
        target_dimension: target_dimension(),
        verdict: outcome.verdict,
    })
}

fn random_combination(rng: &mut ChaCha8Rng, vectors: &[BitVector], len: usize) -> BitVector {
    let mut out = BitVector::zeros(len);
    for v in vectors {
        if rng.random::<bool>() {
            out += v;
        }
    }
    out
}

fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(trial)
}

/// Draws a random valid assignment. With `vary_product` the product
/// representative may be replaced by a homologous cycle, in which case `A`
/// and `B` are re-solved.
pub fn random_assignment(rng: &mut ChaCha8Rng, vary_product: bool) -> Result<PiAssignment> {
    let mut pi = PiAssignment::default();
    if vary_product {
        let s12 = slice(2, 1);
        let w = random_combination(rng, &s12.boundary_matrix.columns(), 2);
        let shift = slice(2, 0).chain(&w)?;
        pi.product = pi.product.try_add(&shift)?;
    }
    let spec = pi.model();
    for (g, dim) in [(Generator::Associator, 1), (Generator::Poissonator, 2)] {
        let target = evaluate_pi(&spec, spec.d(g))?;
        let here = slice(3, dim);
        let below = slice(3, dim - 1);
        let particular = if g == Generator::Poissonator && !vary_product {
            here.vectorize(&pi.pi_b)?
        } else {
            solve(&here.boundary_matrix, &below.vectorize(&target)?)?.ok_or(Error::NotACycle)?
        };
        let cycles = &homology(3, dim).cycle_basis;
        let lift = &particular + &random_combination(rng, cycles, here.rank());
        let chain = here.chain(&lift)?;
        match g {
            Generator::Associator => pi.pi_a = chain,
            _ => pi.pi_b = chain,
        }
    }
    Ok(pi)
}

/// Recomputes `α` for random alternative lifts and checks that the verdict is
/// unchanged and that `α` moves only inside `Im ∂`.
pub fn lift_invariance_check(trials: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new(
        "obstruction.lift-invariance",
        "the first obstruction is independent of the chosen lifts",
    );
    let base = match obstruction_verdict(&PiAssignment::default()) {
        Ok(o) => o,
        Err(e) => {
            report.detail("error", e.to_string());
            report.fail(FailureKind::InternalInconsistency);
            return report;
        }
    };
    let span = image_span(&base.images);
    let default = PiAssignment::default();
    let mut passes = 0usize;
    let mut varied_product = 0usize;
    let mut failures = Vec::new();
    for trial in 0..trials as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, trial));
        let vary_product = rng.random::<bool>();
        let outcome = random_assignment(&mut rng, vary_product).and_then(|pi| {
            pi.validate()?;
            let o = obstruction_verdict(&pi)?;
            let shift = &o.alpha + &base.alpha;
            let shift_in_image = span.contains(&shift.to_vector())?;
            // With m, b fixed the shift is exactly ∂ of the lift differences.
            let exact = if pi.product == default.product {
                let f = Hom0Element {
                    value_a: HClass::from_cycle(&pi.pi_a.try_add(&default.pi_a)?)?,
                    value_b: HClass::from_cycle(&pi.pi_b.try_add(&default.pi_b)?)?,
                };
                partial_map(&f) == shift
            } else {
                true
            };
            Ok((
                o.verdict == base.verdict,
                shift_in_image,
                exact,
                pi.product != default.product,
            ))
        });
        match outcome {
            Ok((same, inside, exact, varied)) if same && inside && exact => {
                passes += 1;
                varied_product += usize::from(varied);
            }
            Ok((same, inside, exact, _)) => failures.push(json!({
                "trial": trial, "same_verdict": same, "shift_in_image": inside, "exact_shift": exact,
            })),
            Err(e) => failures.push(json!({"trial": trial, "error": e.to_string()})),
        }
    }
    report.detail("trials", trials);
    report.detail("seed", seed);
    report.detail("passes", passes);
    report.detail("trials_with_homologous_product", varied_product);
    if !failures.is_empty() {
        report.detail("failures", failures);
        report.fail(FailureKind::InternalInconsistency);
    }
    report
}
