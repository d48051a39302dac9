//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs as a plain binary (`harness = false`) so the summary is printed on
//! every `cargo test`, not only on failure.

use std::process::Command;
use std::time::{Duration, Instant};

use cacti_formality::gerstenhaber::{verify_gerstenhaber_relations, HClass};
use cacti_formality::homology::poincare_polynomial;
use cacti_formality::model::{evaluate_pi, verify_bigraded_model, FreeChain, Generator, ModelSpec};
use cacti_formality::obstruction::{
    alpha, gamma_chain, gamma_holds, hom0_basis, lift_invariance_check, obstruction_verdict,
    partial_map, pi_dc, solve_for_gamma, target_dimension, PiAssignment, Verdict, CANCELLED,
    PI_DC_PARTS, PI_DC_TERMS,
};
use cacti_formality::surjection::{
    check_differential_squares, check_operad_axioms, compose, differential, Chain,
};
use serde_json::Value;

type Outcome = Result<(), String>;

/// Name, check, and an optional runtime bound in seconds.
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn ensure(cond: bool, msg: impl Into<String>) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ch(s: &str) -> Chain {
    Chain::parse(s).expect("valid cells")
}

fn poincare() -> Outcome {
    for (k, want) in [(2, vec![1, 1]), (3, vec![1, 3, 2]), (4, vec![1, 6, 11, 6])] {
        let got = poincare_polynomial(k);
        ensure(got == want, format!("S({k}): {got:?} != {want:?}"))?;
    }
    Ok(())
}

fn delta_squared() -> Outcome {
    let r = check_differential_squares(5);
    ensure(r.passed(), r.details.to_string())
}

fn operad_axioms() -> Outcome {
    let r = check_operad_axioms(4);
    ensure(r.passed(), r.details.to_string())
}

fn composition_oracle() -> Outcome {
    let got = compose(&ch("2123"), 2, &ch("121")).map_err(|e| e.to_string())?;
    ensure(
        got == ch("212324+231324+232124"),
        format!("2123 o2 121 = {got}"),
    )?;
    let got = differential(&ch("12321"));
    ensure(
        got == ch("2321+1321+1231+1232"),
        format!("delta(12321) = {got}"),
    )
}

fn pi_compatibility() -> Outcome {
    let pi = PiAssignment::default();
    let spec = pi.model();
    let d_a = evaluate_pi(&spec, spec.d(Generator::Associator)).map_err(|e| e.to_string())?;
    ensure(d_a.is_zero(), format!("pi(d(A)) = {d_a}"))?;
    let d_b = evaluate_pi(&spec, spec.d(Generator::Poissonator)).map_err(|e| e.to_string())?;
    let delta_b = differential(&pi.pi_b);
    ensure(
        delta_b == d_b,
        format!("delta(pi(B)) = {delta_b}, pi(d(B)) = {d_b}"),
    )
}

fn pi_dc_list() -> Outcome {
    let pi = PiAssignment::default();
    let dc = pi_dc(&pi).map_err(|e| e.to_string())?;
    ensure(dc.len() == 24, format!("{} generators", dc.len()))?;
    let listed = PI_DC_TERMS.join("+");
    ensure(dc == ch(&listed), format!("pi d(C) = {dc}"))?;
    let spec = pi.model();
    let mut all_terms = Vec::new();
    for (expr, _) in PI_DC_PARTS {
        let part = evaluate_pi(&spec, &FreeChain::parse(expr).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        all_terms.extend(part.terms().map(ToString::to_string));
    }
    for cell in CANCELLED {
        let copies = all_terms.iter().filter(|t| *t == cell).count();
        ensure(copies == 2, format!("{cell} occurs {copies} times"))?;
        ensure(
            !dc.contains(&cell.parse().unwrap()),
            format!("{cell} survives"),
        )?;
    }
    ensure(
        all_terms.len() == 28,
        format!("{} terms before cancelling", all_terms.len()),
    )
}

fn gamma_certificate() -> Outcome {
    let gamma = gamma_chain();
    ensure(gamma.len() == 14, format!("{} terms in gamma", gamma.len()))?;
    ensure(
        gamma_holds(&gamma).map_err(|e| e.to_string())?,
        "delta(gamma) != y + pi d(C)",
    )?;
    let solved = solve_for_gamma().map_err(|e| e.to_string())?;
    ensure(solved.is_some(), "y + pi d(C) is not a boundary")?;
    let solved = solved.unwrap();
    ensure(
        gamma_holds(&solved).map_err(|e| e.to_string())?,
        "solved chain does not bound",
    )
}

fn alpha_values() -> Outcome {
    let a = alpha(&PiAssignment::default()).map_err(|e| e.to_string())?;
    ensure(a.at_p.is_zero(), "alpha(P) != 0")?;
    ensure(a.at_c.coords.len() == 11, "H_2(S(4)) is not 11-dimensional")?;
    ensure(
        a.at_c == HClass::of_str("[x1,x4]*[x2,x3]"),
        "alpha(C) != [x1,x4][x2,x3]",
    )?;
    ensure(!a.at_c.is_zero(), "alpha(C) = 0")
}

fn partial_images() -> Outcome {
    let images: Vec<_> = hom0_basis().iter().map(partial_map).collect();
    ensure(images.len() == 5, "Hom_0 is not 5-dimensional")?;
    ensure(target_dimension() == 17, "target is not 17-dimensional")?;
    let listed = ["[x1,x2]*x3*x4", "[x1,x4]*x2*x3", "x1*x2*[x3,x4]"];
    for (j, m) in listed.iter().enumerate() {
        ensure(
            images[j].at_p == HClass::of_str(m),
            format!("d(f{})(P) != {m}", j + 1),
        )?;
    }
    let p_rows: Vec<_> = images[..3].iter().map(|v| v.at_p.coords.clone()).collect();
    let independent = (1u32..8).all(|mask| {
        let mut acc = cacti_formality::BitVector::zeros(6);
        for (j, row) in p_rows.iter().enumerate() {
            if mask >> j & 1 == 1 {
                acc += row;
            }
        }
        !acc.is_zero()
    });
    ensure(independent, "d(f1..f3)(P) are dependent")?;
    let c = &HClass::of_str("[x1,x4]*[x2,x3]") + &HClass::of_str("[x1,x2]*[x3,x4]");
    for (j, img) in images.iter().enumerate().skip(3) {
        ensure(img.at_p.is_zero(), format!("d(f{})(P) != 0", j + 1))?;
        ensure(img.at_c == c, format!("d(f{})(C) mismatch", j + 1))?;
    }
    Ok(())
}

fn verdict_and_cli() -> Outcome {
    let o = obstruction_verdict(&PiAssignment::default()).map_err(|e| e.to_string())?;
    ensure(!o.alpha_in_span, "alpha lies in the image")?;
    ensure(
        o.verdict == Verdict::NotFormal,
        format!("verdict {}", o.verdict),
    )?;
    let status = Command::new(env!("CARGO_BIN_EXE_verify"))
        .arg("all")
        .output()
        .map_err(|e| e.to_string())?
        .status;
    ensure(
        status.code() == Some(0),
        format!("verify all exited with {status}"),
    )
}

fn bigraded_model() -> Outcome {
    let r = verify_bigraded_model(&ModelSpec::standard());
    let subs = r.details["subchecks"]
        .as_array()
        .cloned()
        .unwrap_or_default();
    let has = |name: &str| subs.iter().any(|s| s["check"] == name && s["pass"] == true);
    for name in [
        "rank d F(W1)_1(4)",
        "rank d F(W1)_2(4)",
        "rank d F(W1)_3(4)",
    ] {
        ensure(has(name), format!("missing or failing: {name}"))?;
    }
    ensure(r.passed(), r.details.to_string())
}

fn gerstenhaber() -> Outcome {
    let r = verify_gerstenhaber_relations();
    ensure(r.passed(), r.details.to_string())
}

fn lift_invariance() -> Outcome {
    let r = lift_invariance_check(50, 7);
    ensure(
        r.details["passes"] == 50,
        format!("passes: {}", r.details["passes"]),
    )?;
    ensure(r.passed(), r.details.to_string())
}

fn full_certificate() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_verify"))
            .args(["all", "--format", "json"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(
        a.status.code() == Some(0),
        "verify all --format json failed",
    )?;
    ensure(
        a.stdout == b.stdout,
        "certificate bytes differ between runs",
    )?;
    let doc: Value = serde_json::from_slice(&a.stdout).map_err(|e| e.to_string())?;
    ensure(doc["verdict"] == "NOT_FORMAL", "no NOT_FORMAL verdict")?;
    let mut again = serde_json::to_vec_pretty(&doc).map_err(|e| e.to_string())?;
    again.push(b'\n');
    ensure(again == a.stdout, "certificate does not round-trip")
}

fn main() {
    let criteria: [Criterion; 14] = [
        (
            "poincare polynomials of S(2), S(3), S(4)",
            poincare,
            Some(5),
        ),
        (
            "delta^2 = 0 on every cell of arity <= 5",
            delta_squared,
            Some(30),
        ),
        (
            "planar operad axioms, arity <= 4, dimension <= 2",
            operad_axioms,
            Some(30),
        ),
        (
            "composition and differential oracle",
            composition_oracle,
            None,
        ),
        ("pi commutes with d on A and B", pi_compatibility, None),
        ("pi d(C) is the 24-term list", pi_dc_list, None),
        (
            "gamma certificate and linear solve",
            gamma_certificate,
            None,
        ),
        (
            "alpha(P) = 0, alpha(C) = [x1,x4][x2,x3] != 0",
            alpha_values,
            None,
        ),
        (
            "images of f1..f5 under the differential",
            partial_images,
            None,
        ),
        (
            "verdict NOT_FORMAL, verify all exits 0",
            verdict_and_cli,
            None,
        ),
        (
            "bigraded model dimensions, ranks, kernels, cokernels",
            bigraded_model,
            None,
        ),
        ("Gerstenhaber relations on homology", gerstenhaber, None),
        (
            "lift invariance over 50 seeded trials",
            lift_invariance,
            Some(60),
        ),
        (
            "full run under 2 minutes, byte-stable JSON",
            full_certificate,
            Some(120),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check, bound)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if let Some(secs) = bound {
            if outcome.is_ok() && elapsed > Duration::from_secs(*secs) {
                outcome = Err(format!("took {elapsed:?}, bound {secs} s"));
            }
        }
        match outcome {
            Ok(()) => println!("[PASS] {:>2}. {name} ({} ms)", i + 1, elapsed.as_millis()),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {:>2}. {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
