//! Named verification suites over the whole construction: word identities,
//! trace identities, branch structure, symmetries, asymptotics, and
//! pleating length. Shared by the `check` subcommand and the acceptance
//! tests; every tolerance is pinned here.

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::farey::{farey_enumerate, Slope};
use crate::rays::{
    branches_for, cusp_root_deviation, pleating_length, point_for_length, trace_ray, Branch,
    RayPath, Schedule,
};
use crate::tracepoly::{letter_matrix, trace_polynomial, PolyMatrix};
use crate::words::{g_word_of_line, sign_changes, v_word, v_word_oracle, GGen, GWord, Word};

/// Exact checks report the number of failing cases in `deviation`; numeric
/// checks report the worst error measured against `tol`.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub deviation: f64,
    pub tol: f64,
    pub detail: String,
}

impl CheckResult {
    fn exact(name: &str, failures: usize, detail: String) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            pass: failures == 0,
            deviation: failures as f64,
            tol: 0.0,
            detail,
        }
    }

    fn bounded(name: &str, deviation: f64, tol: f64, detail: String) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            pass: deviation < tol,
            deviation,
            tol,
            detail,
        }
    }
}

pub const CONJ_TOL: f64 = 1e-8;
pub const NEG_TOL: f64 = 1e-8;
pub const ASYMPTOTIC_TOL: f64 = 1e-2;
pub const ANCHOR_TOL: f64 = 1e-9;
pub const ROUNDTRIP_TOL: f64 = 1e-9;
pub const ENDPOINT_TOL: f64 = 1e-8;
/// Newton residual 2e-12 at t = -2 amplifies through arccosh to ~3e-6.
pub const CUSP_LENGTH_TOL: f64 = 1e-5;

fn y_swapped(w: &GWord) -> GWord {
    Word::from_letters(
        w.letters()
            .iter()
            .map(|l| match l.gen {
                GGen::Y => l.inverse(),
                GGen::X => *l,
            })
            .collect(),
    )
}

/// Word identities over all canonical slopes with denominator <= q_max:
/// length 2q, class invariance under slope negation and shift by 2, the
/// Y-swap relation, oracle agreement, and the sign-change count.
pub fn word_identity_checks(q_max: u32) -> Vec<CheckResult> {
    let slopes = farey_enumerate(q_max);
    let mut fails = [0usize; 6];
    let mut first = vec![String::new(); 6];
    for &s in &slopes {
        let w = v_word(s);
        let cases: [bool; 6] = [
            w.len() as i64 == 2 * s.q(),
            w.i_equivalent(&g_word_of_line(Slope::new(-s.p(), s.q()), 0)),
            w.i_equivalent(&g_word_of_line(Slope::new(s.p() + 2 * s.q(), s.q()), 0)),
            y_swapped(&w).i_equivalent(&v_word(Slope::new(s.p() + s.q(), s.q()))),
            w.i_equivalent(&v_word_oracle(s)),
            sign_changes(&w).map(|n| n as i64) == Ok(2 * s.p()),
        ];
        for (i, ok) in cases.iter().enumerate() {
            if !ok {
                fails[i] += 1;
                if first[i].is_empty() {
                    first[i] = format!("first failure at {s}");
                }
            }
        }
    }
    let names = [
        "word-length-2q",
        "word-class-negation",
        "word-class-shift-by-2",
        "word-y-swap",
        "word-oracle-agreement",
        "word-sign-changes",
    ];
    names
        .iter()
        .zip(fails)
        .zip(first)
        .map(|((name, n), detail)| {
            let detail = if detail.is_empty() {
                format!("{} slopes, q <= {q_max}", slopes.len())
            } else {
                detail
            };
            CheckResult::exact(name, n, detail)
        })
        .collect()
}

/// Distinct canonical slopes give non-I-equivalent words.
pub fn distinctness_check(q_max: u32) -> CheckResult {
    let slopes = farey_enumerate(q_max);
    let words: Vec<GWord> = slopes.iter().map(|&s| v_word(s)).collect();
    let mut collisions = 0usize;
    let mut detail = String::new();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            if words[i] == words[j] {
                collisions += 1;
                if detail.is_empty() {
                    detail = format!("{} collides with {}", slopes[i], slopes[j]);
                }
            }
        }
    }
    if detail.is_empty() {
        detail = format!(
            "{} pairs compared, q <= {q_max}",
            words.len() * (words.len() - 1) / 2
        );
    }
    CheckResult::exact("word-distinctness", collisions, detail)
}

/// Exact polynomial identities: trace invariance under rotation/inversion,
/// equality across class representatives, the ρ ↦ -ρ composition law,
/// degree q, and leading coefficient (-1)^{p+q+1}.
pub fn trace_identity_checks(q_max: u32) -> Vec<CheckResult> {
    let slopes = farey_enumerate(q_max);
    let mut fails = [0usize; 5];
    let mut first = vec![String::new(); 5];
    for &s in &slopes {
        let w = v_word(s);
        let t = trace_polynomial(&w);

        // all cyclic rotations, regrouped through prefix/suffix products
        let mats: Vec<PolyMatrix> = w.letters().iter().map(|&l| letter_matrix(l)).collect();
        let n = mats.len();
        let mut prefix = vec![PolyMatrix::identity()];
        for m in &mats {
            prefix.push(prefix.last().unwrap().mul(m));
        }
        let mut suffix = vec![PolyMatrix::identity(); n + 1];
        for k in (0..n).rev() {
            suffix[k] = mats[k].mul(&suffix[k + 1]);
        }
        let rotations_ok = (0..n).all(|k| suffix[k].mul(&prefix[k]).trace() == t);
        let inversion_ok = trace_polynomial(&w.invert()) == t;

        let class_ok = trace_polynomial(&g_word_of_line(Slope::new(-s.p(), s.q()), 0)) == t
            && trace_polynomial(&g_word_of_line(Slope::new(s.p() + 2 * s.q(), s.q()), 0)) == t;

        let shifted = v_word(Slope::new(s.p() + s.q(), s.q()));
        let negation_ok = trace_polynomial(&shifted) == t.compose_neg();

        let degree_ok = t.degree() == Some(s.q() as usize);
        let want_leading = if (s.p() + s.q() + 1) % 2 == 0 {
            BigInt::from(1)
        } else {
            BigInt::from(-1)
        };
        let leading_ok = t.leading() == Some(&want_leading);

        let cases = [
            rotations_ok && inversion_ok,
            class_ok,
            negation_ok,
            degree_ok,
            leading_ok,
        ];
        for (i, ok) in cases.iter().enumerate() {
            if !ok {
                fails[i] += 1;
                if first[i].is_empty() {
                    first[i] = format!("first failure at {s}");
                }
            }
        }
    }
    let names = [
        "trace-rotation-inversion",
        "trace-class-representatives",
        "trace-negation-compose",
        "trace-degree-q",
        "trace-leading-coefficient",
    ];
    names
        .iter()
        .zip(fails)
        .zip(first)
        .map(|((name, n), detail)| {
            let detail = if detail.is_empty() {
                format!("{} slopes, q <= {q_max}", slopes.len())
            } else {
                detail
            };
            CheckResult::exact(name, n, detail)
        })
        .collect()
}

/// The three anchor cusps: -4, +4, and 2i.
pub fn anchor_cusp_check() -> CheckResult {
    let mut worst = 0.0f64;
    let mut detail = String::new();
    let anchors = [
        (Slope::new(0, 1), Branch::Real, Complex64::new(-4.0, 0.0)),
        (Slope::new(1, 1), Branch::Real, Complex64::new(4.0, 0.0)),
        (Slope::new(1, 2), Branch::Upper, Complex64::new(0.0, 2.0)),
    ];
    for (s, b, want) in anchors {
        match crate::rays::cusp(s, b) {
            Ok(c) => {
                let err = (c.rho - want).norm();
                if err > worst {
                    worst = err;
                    detail = format!("worst at {s}:{}", b.tag());
                }
            }
            Err(e) => {
                return CheckResult::bounded(
                    "anchor-cusps",
                    f64::INFINITY,
                    ANCHOR_TOL,
                    format!("trace failed at {s}: {e}"),
                )
            }
        }
    }
    CheckResult::bounded("anchor-cusps", worst, ANCHOR_TOL, detail)
}

/// Every branch of every canonical slope up to q_max, traced on one shared
/// schedule.
pub struct TracedFamily {
    pub q_max: u32,
    pub rays: Vec<RayPath>,
    pub failures: Vec<(Slope, Branch, String)>,
}

pub fn trace_family(q_max: u32, schedule: &Schedule) -> TracedFamily {
    let mut rays = Vec::new();
    let mut failures = Vec::new();
    for s in farey_enumerate(q_max) {
        for b in branches_for(s) {
            match trace_ray(s, b, schedule) {
                Ok(p) => rays.push(p),
                Err(e) => failures.push((s, b, e.to_string())),
            }
        }
    }
    TracedFamily {
        q_max,
        rays,
        failures,
    }
}

impl TracedFamily {
    fn find(&self, s: Slope, b: Branch) -> Option<&RayPath> {
        self.rays.iter().find(|r| r.slope == s && r.branch == b)
    }

    fn interior_slopes(&self) -> Vec<Slope> {
        farey_enumerate(self.q_max)
            .into_iter()
            .filter(|s| s.p() != 0 && s.p() != s.q())
            .collect()
    }
}

fn rel_dev(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(1.0)
}

/// Two-branch structure: every branch traced, upper = conj(lower) at every
/// scheduled t, conjugate cusp pairs off the real axis, real branches with
/// identically zero imaginary part.
pub fn branch_structure_checks(tr: &TracedFamily) -> Vec<CheckResult> {
    let mut out = Vec::new();

    let fail_detail = tr
        .failures
        .first()
        .map(|(s, b, e)| format!("{s}:{} failed: {e}", b.tag()))
        .unwrap_or_else(|| format!("{} rays traced", tr.rays.len()));
    out.push(CheckResult::exact(
        "branch-tracing",
        tr.failures.len(),
        fail_detail,
    ));

    let mut conj_worst = 0.0f64;
    let mut cusp_worst = 0.0f64;
    let mut nonreal_fails = 0usize;
    for s in tr.interior_slopes() {
        let (Some(u), Some(l)) = (tr.find(s, Branch::Upper), tr.find(s, Branch::Lower)) else {
            continue;
        };
        for (a, b) in u.samples.iter().zip(&l.samples) {
            conj_worst = conj_worst.max(rel_dev(a.rho, b.rho.conj()));
        }
        cusp_worst = cusp_worst.max(rel_dev(u.cusp, l.cusp.conj()));
        if u.cusp.im <= 0.0 {
            nonreal_fails += 1;
        }
    }
    out.push(CheckResult::bounded(
        "conjugation-symmetry",
        conj_worst,
        CONJ_TOL,
        "upper vs conjugated lower at every scheduled t".to_string(),
    ));
    out.push(CheckResult::bounded(
        "cusp-conjugate-pair",
        cusp_worst,
        CONJ_TOL,
        format!("{nonreal_fails} upper cusps off the open upper half plane"),
    ));
    if nonreal_fails > 0 {
        let last = out.last_mut().unwrap();
        last.pass = false;
    }

    let mut im_worst = 0.0f64;
    let mut real_count = 0usize;
    for r in &tr.rays {
        if r.branch == Branch::Real {
            real_count += 1;
            for s in &r.samples {
                im_worst = im_worst.max(s.rho.im.abs());
            }
        }
    }
    out.push(CheckResult {
        name: "real-branch-zero-im".to_string(),
        pass: im_worst == 0.0 && real_count == 2,
        deviation: im_worst,
        tol: 0.0,
        detail: format!("{real_count} real branches"),
    });
    out
}

/// Negation symmetry: the sample set of 1 - p/q equals the negated sample
/// set of p/q with branches swapped (real rays pair 0/1 with 1/1).
pub fn negation_symmetry_check(tr: &TracedFamily) -> CheckResult {
    let mut worst = 0.0f64;
    let mut detail = String::new();
    let mut track = |name: String, dev: f64| {
        if dev > worst {
            worst = dev;
            detail = name;
        }
    };
    if let (Some(a), Some(b)) = (
        tr.find(Slope::new(0, 1), Branch::Real),
        tr.find(Slope::new(1, 1), Branch::Real),
    ) {
        let dev = a
            .samples
            .iter()
            .zip(&b.samples)
            .map(|(x, y)| (x.rho + y.rho).norm() / x.rho.norm().max(1.0))
            .fold(0.0, f64::max);
        track("0/1~1/1".to_string(), dev);
    }
    for s in tr.interior_slopes() {
        let m = Slope::new(s.q() - s.p(), s.q());
        if s > m {
            continue;
        }
        for (b1, b2) in [(Branch::Upper, Branch::Lower), (Branch::Lower, Branch::Upper)] {
            let (Some(x), Some(y)) = (tr.find(m, b1), tr.find(s, b2)) else {
                continue;
            };
            let dev = x
                .samples
                .iter()
                .zip(&y.samples)
                .map(|(a, b)| (a.rho + b.rho).norm() / a.rho.norm().max(1.0))
                .fold(0.0, f64::max);
            track(format!("{s}~{m}"), dev);
        }
    }
    CheckResult::bounded(
        "negation-symmetry",
        worst,
        NEG_TOL,
        format!("worst pair {detail}"),
    )
}

fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * std::f64::consts::PI);
    d.min(2.0 * std::f64::consts::PI - d)
}

/// Branch arguments at the start of the schedule against the asymptotic
/// directions π(1 ∓ p/q).
pub fn asymptotics_check(tr: &TracedFamily) -> CheckResult {
    let pi = std::f64::consts::PI;
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for r in &tr.rays {
        let theta = match r.branch {
            Branch::Upper => pi * (1.0 - r.slope.value()),
            Branch::Lower => pi * (1.0 + r.slope.value()),
            Branch::Real => {
                if r.slope.p() == 0 {
                    pi
                } else {
                    0.0
                }
            }
        };
        let first = r.samples[0];
        let dev = angle_distance(first.rho.arg(), theta);
        if dev > worst {
            worst = dev;
            detail = format!("worst at {}:{} (t = {})", r.slope, r.branch.tag(), first.t);
        }
    }
    CheckResult::bounded("asymptotic-directions", worst, ASYMPTOTIC_TOL, detail)
}

/// Pleating length along every traced branch: strictly decreasing toward
/// the cusp, vanishing there, and inverted exactly by point_for_length.
pub fn pleating_length_checks(tr: &TracedFamily) -> Vec<CheckResult> {
    let mut monotone_fails = 0usize;
    let mut cusp_worst = 0.0f64;
    let mut cusp_tol = CUSP_LENGTH_TOL;
    let mut roundtrip_worst = 0.0f64;
    let mut detail = String::new();
    for r in &tr.rays {
        // the residual certified at the cusp degrades to the evaluation
        // noise floor for large q; L feels its square root
        let cs = crate::rays::trace_polynomial_of(r.slope).coeffs_f64();
        let rad = r.cusp.norm();
        let mag = cs.iter().rev().fold(0.0f64, |m, c| m * rad + c.abs());
        let floor = 8.0 * cs.len() as f64 * f64::EPSILON * (mag + 2.0);
        cusp_tol = cusp_tol.max(4.0 * floor.sqrt());
        let lengths: Vec<f64> = r
            .samples
            .iter()
            .map(|s| pleating_length(r.slope, s.rho).unwrap_or(f64::NAN))
            .collect();
        monotone_fails += lengths
            .windows(2)
            .filter(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Greater))
            .count();
        cusp_worst = cusp_worst.max(*lengths.last().unwrap());

        let n = r.samples.len();
        for i in 0..20 {
            let idx = i * (n - 2) / 19;
            let sample = r.samples[idx];
            let len = lengths[idx];
            match point_for_length(r.slope, r.branch, len) {
                Ok(back) => {
                    let dev = (back - sample.rho).norm() / sample.rho.norm().max(1.0);
                    if dev > roundtrip_worst {
                        roundtrip_worst = dev;
                        detail = format!("worst at {}:{} t = {}", r.slope, r.branch.tag(), sample.t);
                    }
                }
                Err(e) => {
                    roundtrip_worst = f64::INFINITY;
                    detail = format!("inversion failed at {}: {e}", r.slope);
                }
            }
        }
    }
    vec![
        CheckResult::exact(
            "pleating-monotone",
            monotone_fails,
            "strict decrease of L along every branch".to_string(),
        ),
        CheckResult::bounded(
            "pleating-cusp-limit",
            cusp_worst,
            cusp_tol,
            "L at the t = -2 sample".to_string(),
        ),
        CheckResult::bounded(
            "pleating-roundtrip",
            roundtrip_worst,
            ROUNDTRIP_TOL,
            if detail.is_empty() {
                "20 points per ray".to_string()
            } else {
                detail
            },
        ),
    ]
}

/// Cusps against the root set of Tr + 2, and stability of the cusp under a
/// much deeper continuation start.
pub fn endpoint_consistency_checks(tr: &TracedFamily) -> Vec<CheckResult> {
    let mut root_worst = 0.0f64;
    let mut root_detail = String::new();
    for s in farey_enumerate(tr.q_max) {
        match cusp_root_deviation(s) {
            Ok(d) => {
                if d > root_worst {
                    root_worst = d;
                    root_detail = format!("worst at {s}");
                }
            }
            Err(e) => {
                root_worst = f64::INFINITY;
                root_detail = format!("failed at {s}: {e}");
            }
        }
    }

    let deep = Schedule::new(-1e10, 16, 0.05).expect("deep schedule");
    let mut retrace_worst = 0.0f64;
    let mut retrace_detail = String::new();
    for r in &tr.rays {
        match trace_ray(r.slope, r.branch, &deep) {
            Ok(p) => {
                let d = (p.cusp - r.cusp).norm();
                if d > retrace_worst {
                    retrace_worst = d;
                    retrace_detail = format!("worst at {}:{}", r.slope, r.branch.tag());
                }
            }
            Err(e) => {
                retrace_worst = f64::INFINITY;
                retrace_detail = format!("failed at {}: {e}", r.slope);
            }
        }
    }
    vec![
        CheckResult::bounded("cusp-in-parabolic-roots", root_worst, ENDPOINT_TOL, root_detail),
        CheckResult::bounded("cusp-retrace-stability", retrace_worst, ENDPOINT_TOL, retrace_detail),
    ]
}

/// The full suite at one denominator bound, on the standard schedule.
pub fn run_all(q_max: u32) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.extend(word_identity_checks(q_max));
    out.push(distinctness_check(q_max));
    out.extend(trace_identity_checks(q_max));
    out.push(anchor_cusp_check());
    let tr = trace_family(q_max, &Schedule::standard());
    out.extend(branch_structure_checks(&tr));
    out.push(negation_symmetry_check(&tr));
    out.push(asymptotics_check(&tr));
    out.extend(pleating_length_checks(&tr));
    out.extend(endpoint_consistency_checks(&tr));
    out
}
