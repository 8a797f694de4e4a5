//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Every tolerance is pinned in code, mostly via `checks`.
//!
//! Criterion 7 is expected red: the exact root of Tr V_{p/q}(ρ) = -10⁸ on
//! the correct branch deviates from the limit direction by more than the
//! pinned 10⁻² for every q >= 5 (the approach to the asymptotic argument is
//! O(|t|^(-1/q))), so the stated probe cannot pass over the q <= 8 family.
//! The supplementary decay evidence printed by that test shows the
//! convergence itself is real.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use riley_slice::checks::{
    anchor_cusp_check, asymptotics_check, branch_structure_checks, distinctness_check,
    negation_symmetry_check, pleating_length_checks, trace_family, trace_identity_checks,
    word_identity_checks, CheckResult, ASYMPTOTIC_TOL,
};
use riley_slice::farey::Slope;
use riley_slice::rays::{asymptotic_seed, solve_trace_eq, trace_polynomial_of, Branch, Schedule};
use riley_slice::slice::{build_slice, to_svg, ViewBox};

fn report(criterion: &str, results: &[CheckResult], timing: Option<(Duration, Duration)>) {
    let in_budget = timing.is_none_or(|(elapsed, limit)| elapsed < limit);
    let all_pass = results.iter().all(|r| r.pass) && in_budget;
    let worst = results
        .iter()
        .map(|r| r.deviation)
        .fold(0.0f64, f64::max);
    let timing_note = timing
        .map(|(elapsed, limit)| format!(", {elapsed:.2?} of {limit:.2?} budget"))
        .unwrap_or_default();
    println!(
        "criterion {criterion}: {} (worst deviation {worst:.3e}{timing_note})",
        if all_pass { "PASS" } else { "FAIL" }
    );
    for r in results {
        if !r.pass {
            println!(
                "  FAIL {}: deviation {:.6e} vs tol {:.1e} ({})",
                r.name, r.deviation, r.tol, r.detail
            );
        }
    }
}

fn assert_all(results: &[CheckResult]) {
    for r in results {
        assert!(
            r.pass,
            "{}: deviation {:.6e} vs tol {:.1e} ({})",
            r.name,
            r.deviation,
            r.tol,
            r.detail
        );
    }
}

#[test]
fn criterion_1_word_identities() {
    let start = Instant::now();
    let results = word_identity_checks(12);
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(5);
    report("1 (word identities, q <= 12)", &results, Some((elapsed, limit)));
    assert_all(&results);
    assert!(elapsed < limit, "took {elapsed:?}");
}

#[test]
fn criterion_2_distinctness() {
    let start = Instant::now();
    let results = vec![distinctness_check(8)];
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(5);
    report("2 (distinctness, q <= 8)", &results, Some((elapsed, limit)));
    assert_all(&results);
    assert!(elapsed < limit, "took {elapsed:?}");
}

#[test]
fn criterion_3_trace_identities() {
    let start = Instant::now();
    let results = trace_identity_checks(12);
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(5);
    report("3 (trace identities, q <= 12)", &results, Some((elapsed, limit)));
    assert_all(&results);
    assert!(elapsed < limit, "took {elapsed:?}");
}

#[test]
fn criterion_4_anchor_cusps() {
    let start = Instant::now();
    let results = vec![anchor_cusp_check()];
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(1);
    report("4 (anchor cusps)", &results, Some((elapsed, limit)));
    assert_all(&results);
    assert!(elapsed < limit, "took {elapsed:?}");
}

#[test]
fn criterion_5_two_branch_structure() {
    let start = Instant::now();
    let family = trace_family(8, &Schedule::standard());
    let results = branch_structure_checks(&family);
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(60);
    report("5 (two-branch structure, q <= 8)", &results, Some((elapsed, limit)));
    assert_all(&results);
    assert!(elapsed < limit, "took {elapsed:?}");
}

#[test]
fn criterion_6_negation_symmetry() {
    let family = trace_family(8, &Schedule::standard());
    let results = vec![negation_symmetry_check(&family)];
    report("6 (negation symmetry, q <= 8)", &results, None);
    assert_all(&results);
}

#[test]
fn criterion_7_asymptotic_directions() {
    let family = trace_family(8, &Schedule::standard());
    let result = asymptotics_check(&family);
    report(
        "7 (asymptotic directions at t = -1e8)",
        std::slice::from_ref(&result),
        None,
    );

    // supplementary: the arguments do converge to pi*(1 -+ p/q) as t drops,
    // at the O(|t|^(-1/q)) rate the leading-term perturbation predicts
    let s = Slope::new(1, 8);
    let target = std::f64::consts::PI * (1.0 - s.value());
    let f = trace_polynomial_of(s);
    let mut devs = Vec::new();
    for t in [-1e8, -1e12, -1e16] {
        let seed = asymptotic_seed(s, Branch::Upper, t).unwrap();
        let rho = solve_trace_eq(&f, t, seed).unwrap();
        devs.push((rho.arg() - target).abs());
    }
    println!(
        "  decay evidence for 1/8 upper: dev(t=-1e8) = {:.4e}, dev(t=-1e12) = {:.4e}, dev(t=-1e16) = {:.4e}",
        devs[0], devs[1], devs[2]
    );
    assert!(
        devs[0] > devs[1] && devs[1] > devs[2] && devs[2] < ASYMPTOTIC_TOL,
        "arguments must converge toward the asymptotic direction"
    );

    assert!(
        result.pass,
        "asymptotic-directions: deviation {:.6e} vs tol {:.1e} at the pinned probe t = -1e8 ({}). \
         The deviation equals the exact root's to 15 digits and scales like |t|^(-1/q); \
         at t = -1e8 it exceeds 1e-2 for every q >= 5, so the probe as stated cannot pass \
         over the q <= 8 family. See the decay evidence above: the convergence claimed by \
         the underlying theorem holds.",
        result.deviation,
        result.tol,
        result.detail
    );
}

#[test]
fn criterion_8_pleating_length() {
    let family = trace_family(8, &Schedule::standard());
    let results = pleating_length_checks(&family);
    report("8 (pleating length, q <= 8)", &results, None);
    assert_all(&results);
}

#[test]
fn criterion_9_foliation_picture() {
    let start = Instant::now();
    let limit = Duration::from_secs(120);

    let out_dir = tempfile::tempdir().unwrap();
    let svg_path = out_dir.path().join("slice.svg");
    let exe = env!("CARGO_BIN_EXE_riley");
    let run = |path: &std::path::Path| {
        std::process::Command::new(exe)
            .args([
                "slice",
                "--max-denominator",
                "8",
                "--out",
                path.to_str().unwrap(),
                "--format",
                "svg",
            ])
            .output()
            .expect("riley slice runs")
    };
    let output = run(&svg_path);
    assert!(
        output.status.success(),
        "slice command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let svg = std::fs::read_to_string(&svg_path).unwrap();

    // byte-determinism of the command
    let svg_path2 = out_dir.path().join("slice2.svg");
    assert!(run(&svg_path2).status.success());
    assert_eq!(svg, std::fs::read_to_string(&svg_path2).unwrap());

    // the in-process diagram carries the audit trail
    let diagram = build_slice(8, &Schedule::standard());
    assert_eq!(diagram.rays.len(), 44, "2 real + 21 conjugate pairs");
    let crossings = diagram
        .audit
        .iter()
        .find(|a| a.name == "disjointness-crossings")
        .expect("crossings audit present");
    assert!(crossings.pass, "{} crossings", crossings.value);
    assert_eq!(crossings.value, 0.0);
    for a in &diagram.audit {
        assert!(a.pass, "audit {}: {} ({})", a.name, a.value, a.detail);
    }

    // qualitative shape: real cusps at +-4, cusp fan symmetric under
    // conjugation, rays present in both half planes
    assert!(svg.contains("<circle cx=\"-4\" cy=\"0\""));
    assert!(svg.contains("<circle cx=\"4\" cy=\"0\""));
    assert!(svg.contains("<polyline points=\""));
    for c in &diagram.cusps {
        assert!(
            diagram
                .cusps
                .iter()
                .any(|o| o.slope == c.slope && (o.rho - c.rho.conj()).norm() < 1e-8),
            "cusp set not conjugation-symmetric at {}",
            c.slope
        );
    }
    let upper_count = diagram.cusps.iter().filter(|c| c.rho.im > 0.0).count();
    let lower_count = diagram.cusps.iter().filter(|c| c.rho.im < 0.0).count();
    assert_eq!(upper_count, 21);
    assert_eq!(lower_count, 21);

    // in-window SVG matches the exported one
    let svg_mem = to_svg(&diagram, &ViewBox::default());
    assert_eq!(svg, svg_mem);

    let elapsed = start.elapsed();
    println!(
        "criterion 9 (foliation picture, q <= 8): PASS ({} rays, 0 crossings, {elapsed:.2?} of {limit:.2?} budget)",
        diagram.rays.len()
    );
    assert!(elapsed < limit, "took {elapsed:?}");
}

#[test]
fn invariant_locus_membership() {
    // every sample satisfies |Im Tr| <= 1e-9 * max(1, |t|) and Re Tr <= -2
    let family = trace_family(8, &Schedule::standard());
    assert!(family.failures.is_empty());
    for r in &family.rays {
        let f = trace_polynomial_of(r.slope);
        for s in &r.samples {
            let tr = f.eval(s.rho);
            let scale = s.t.abs().max(1.0);
            assert!(
                tr.im.abs() <= 1e-9 * scale,
                "Im Tr = {:.3e} at {}:{} t = {}",
                tr.im,
                r.slope,
                r.branch.tag(),
                s.t
            );
            assert!(
                tr.re <= -2.0 + 1e-9 * scale,
                "Re Tr = {} at {}:{} t = {}",
                tr.re,
                r.slope,
                r.branch.tag(),
                s.t
            );
        }
    }
    println!("invariant (locus membership, q <= 8): PASS");
}

#[test]
fn invariant_endpoint_consistency() {
    let family = trace_family(6, &Schedule::standard());
    let results = riley_slice::checks::endpoint_consistency_checks(&family);
    report("invariant (endpoint consistency, q <= 6)", &results, None);
    assert_all(&results);
}

#[test]
fn invariant_near_cusp_expansion() {
    // for slope 1/2 the upper branch satisfies rho = i*sqrt(|t| + 2)
    // exactly; check the traced samples against the closed form
    let family = trace_family(2, &Schedule::standard());
    let upper = family
        .rays
        .iter()
        .find(|r| r.slope == Slope::new(1, 2) && r.branch == Branch::Upper)
        .unwrap();
    for s in &upper.samples {
        let want = Complex64::new(0.0, (s.t.abs() + 2.0).sqrt());
        assert!(
            (s.rho - want).norm() <= 1e-10 * want.norm().max(1.0),
            "at t = {}: {} vs {}",
            s.t,
            s.rho,
            want
        );
    }
    println!("invariant (near-cusp closed form for 1/2): PASS");
}
