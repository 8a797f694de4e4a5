//! Numerical tracing of pleating-ray branches, cusp refinement, and
//! pleating length.
//!
//! A rational pleating ray is a connected component of the hyperbolic locus
//! `{ρ : Im Tr V_{p/q}(ρ) = 0, |Re Tr V_{p/q}(ρ)| > 2}` on the negative
//! side `Re Tr ≤ -2`. For `0 < p/q < 1` there are exactly two components:
//! an upper branch with asymptotic argument `π(1 - p/q)` and a lower branch
//! with `π(1 + p/q)`, complex conjugates of each other. The slopes 0/1 and
//! 1/1 each carry a single branch on the real axis.
//!
//! Tracing works by Newton continuation in the real trace parameter t from
//! far out (t ≪ 0) up to the cusp value t = -2, each solve seeded by the
//! previous point. The identification of the traced component as the
//! pleating ray rests on its asymptotic direction; no convex-hull geometry
//! is checked here.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::farey::Slope;
use crate::tracepoly::{horner, trace_polynomial, IntPoly};
use crate::words::v_word;

/// Relative residual tolerance for Newton solves, measured against
/// max(1, |t|).
pub const NEWTON_TOL: f64 = 1e-12;
/// Iteration budget for a single Newton solve.
pub const NEWTON_MAX_ITERS: usize = 60;
/// Budget for halving the continuation t-step when a solve jumps too far.
pub const STEP_MAX_HALVINGS: usize = 20;
/// Derivative-scaled continuity bound between consecutive samples.
pub const JUMP_FACTOR: f64 = 5.0;
pub const JUMP_ABS: f64 = 1e-6;
/// |Tr'| below this at the cusp flags a flat root.
pub const FLAT_DERIV_TOL: f64 = 1e-8;
/// Degrees beyond this warrant a double-precision conditioning warning.
pub const CONDITIONING_DEGREE: i64 = 48;

const T_CUSP: f64 = -2.0;
const NEAR_CUSP_START: f64 = -10.0;

#[derive(Debug, Error, Clone)]
pub enum RayError {
    #[error("newton did not converge after {iters} iterations (last iterate {last}, residual {residual:.3e})")]
    NonConvergence {
        iters: usize,
        last: Complex64,
        residual: f64,
    },
    #[error("derivative vanished at {at}")]
    FlatDerivative { at: Complex64 },
    #[error("branch switch detected between t={t_prev} and t={t}")]
    BranchSwitch { t_prev: f64, t: f64 },
    #[error("branch `{branch}` is not valid for slope {slope}")]
    InvalidBranch { slope: Slope, branch: Branch },
    #[error("point off ray: {0}")]
    OffRay(String),
    #[error("invalid schedule: {0}")]
    BadSchedule(String),
    #[error("root finder did not converge after {0} sweeps")]
    RootFinder(usize),
    #[error("pleating length must be positive")]
    NonPositiveLength,
}

/// Which connected component of the locus a path follows.
///
/// `Real` exists only for slopes 0/1 and 1/1. `Upper` lives in the upper
/// half plane (asymptotic argument `π(1 - p/q)`), `Lower` is its complex
/// conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Real,
    Upper,
    Lower,
}

impl Branch {
    pub fn tag(&self) -> &'static str {
        match self {
            Branch::Real => "real",
            Branch::Upper => "upper",
            Branch::Lower => "lower",
        }
    }

    pub fn from_tag(s: &str) -> Option<Branch> {
        match s {
            "real" => Some(Branch::Real),
            "upper" => Some(Branch::Upper),
            "lower" => Some(Branch::Lower),
            _ => None,
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// The branches carried by a canonical slope: one real branch at the ends
/// of the Farey range, an upper/lower pair strictly inside.
pub fn branches_for(s: Slope) -> Vec<Branch> {
    if s.p() == 0 || s.p() == s.q() {
        vec![Branch::Real]
    } else {
        vec![Branch::Upper, Branch::Lower]
    }
}

fn branch_valid(s: Slope, b: Branch) -> bool {
    branches_for(s).contains(&b)
}

/// Continuation schedule: trace values descending in |t| from `t_start` to
/// -2, geometric with `steps_per_decade` points per decade down to -10,
/// then uniform steps of `near_cusp_step`.
#[derive(Clone, Debug)]
pub struct Schedule {
    ts: Vec<f64>,
}

impl Schedule {
    /// The default schedule: t from -10⁸, 16 points per decade, 0.05 steps
    /// from -10 to -2.
    pub fn standard() -> Schedule {
        Schedule::new(-1e8, 16, 0.05).expect("standard schedule is valid")
    }

    pub fn new(t_start: f64, steps_per_decade: u32, near_cusp_step: f64) -> Result<Schedule, RayError> {
        if t_start.is_nan() || t_start > -1e3 {
            return Err(RayError::BadSchedule(format!(
                "t_start must be <= -1e3, got {t_start}"
            )));
        }
        if steps_per_decade < 4 {
            return Err(RayError::BadSchedule(format!(
                "steps_per_decade must be >= 4, got {steps_per_decade}"
            )));
        }
        if !(near_cusp_step > 0.0 && near_cusp_step <= 1.0) {
            return Err(RayError::BadSchedule(format!(
                "near_cusp_step must be in (0, 1], got {near_cusp_step}"
            )));
        }
        let mut ts = Vec::new();
        let decades = (t_start.abs() / NEAR_CUSP_START.abs()).log10();
        let n_geom = (decades * steps_per_decade as f64).round() as usize;
        for k in 0..n_geom {
            ts.push(-t_start.abs() * 10f64.powf(-(k as f64) / steps_per_decade as f64));
        }
        let span = T_CUSP - NEAR_CUSP_START;
        let n_lin = (span / near_cusp_step).round().max(1.0) as usize;
        for j in 0..=n_lin {
            ts.push(NEAR_CUSP_START + span * j as f64 / n_lin as f64);
        }
        debug_assert!(ts.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(*ts.last().unwrap(), T_CUSP);
        Ok(Schedule { ts })
    }

    pub fn t_values(&self) -> &[f64] {
        &self.ts
    }

    pub fn t_start(&self) -> f64 {
        self.ts[0]
    }
}

/// One continuation sample: the trace value t and the solved parameter ρ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RaySample {
    pub t: f64,
    pub rho: Complex64,
}

/// A traced branch: samples in increasing t ending at the cusp (t = -2).
#[derive(Clone, Debug, PartialEq)]
pub struct RayPath {
    pub slope: Slope,
    pub branch: Branch,
    pub samples: Vec<RaySample>,
    pub cusp: Complex64,
    pub cusp_flat: bool,
}

#[derive(Serialize, Deserialize)]
struct ComplexDto {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SampleDto {
    t: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct RayPathDto {
    slope: String,
    branch: String,
    cusp: ComplexDto,
    samples: Vec<SampleDto>,
}

impl Serialize for RayPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RayPathDto {
            slope: self.slope.to_string(),
            branch: self.branch.tag().to_string(),
            cusp: ComplexDto {
                re: self.cusp.re,
                im: self.cusp.im,
            },
            samples: self
                .samples
                .iter()
                .map(|s| SampleDto {
                    t: s.t,
                    re: s.rho.re,
                    im: s.rho.im,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RayPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = RayPathDto::deserialize(deserializer)?;
        let slope: Slope = dto.slope.parse().map_err(serde::de::Error::custom)?;
        let branch = Branch::from_tag(&dto.branch)
            .ok_or_else(|| serde::de::Error::custom(format!("bad branch `{}`", dto.branch)))?;
        let samples = dto
            .samples
            .iter()
            .map(|s| RaySample {
                t: s.t,
                rho: Complex64::new(s.re, s.im),
            })
            .collect();
        let cusp = Complex64::new(dto.cusp.re, dto.cusp.im);
        let cusp_flat = false;
        Ok(RayPath {
            slope,
            branch,
            samples,
            cusp,
            cusp_flat,
        })
    }
}

/// Prepared double-precision evaluator for one trace polynomial.
struct TraceFn {
    f: Vec<f64>,
    df: Vec<f64>,
    degree: usize,
    leading: f64,
}

impl TraceFn {
    fn new(poly: &IntPoly) -> TraceFn {
        let f = poly.coeffs_f64();
        let df: Vec<f64> = f
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i as f64)
            .collect();
        let degree = f.len() - 1;
        let leading = f[degree];
        TraceFn {
            f,
            df,
            degree,
            leading,
        }
    }

    fn for_slope(s: Slope) -> TraceFn {
        TraceFn::new(&trace_polynomial(&v_word(s)))
    }

    /// Value together with Σ|c_k|·|z|^k, the magnitude that scales the
    /// double-precision evaluation error.
    fn eval_with_mag(&self, z: Complex64) -> (Complex64, f64) {
        horner_with_mag(&self.f, z)
    }

    fn deriv(&self, z: Complex64) -> Complex64 {
        horner(&self.df, z)
    }
}

fn horner_with_mag(coeffs: &[f64], z: Complex64) -> (Complex64, f64) {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut mag = 0.0f64;
    let r = z.norm();
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
        mag = mag * r + c.abs();
    }
    (acc, mag)
}

/// Smallest residual double-precision Horner can certify for a polynomial
/// of this degree and term magnitude.
fn noise_floor(mag: f64, degree: usize) -> f64 {
    8.0 * (degree as f64 + 1.0) * f64::EPSILON * mag
}

/// Absolute slack for the continuity bound at ρ: iterates accepted at the
/// residual noise floor are only located to floor/|Tr'|, so continuity
/// cannot be demanded below that.
fn jump_slack(tf: &TraceFn, rho: Complex64, t: f64, deriv_norm: f64) -> f64 {
    let (_, mag) = tf.eval_with_mag(rho);
    let positional = 4.0 * noise_floor(mag + t.abs(), tf.degree) / deriv_norm.max(f64::MIN_POSITIVE);
    JUMP_ABS.max(positional)
}

fn seed_from(tf: &TraceFn, s: Slope, b: Branch, t: f64) -> Complex64 {
    let r = (t.abs() / tf.leading.abs()).powf(1.0 / tf.degree as f64);
    match b {
        // pure real construction keeps the imaginary part exactly zero
        Branch::Real => {
            if s.p() == 0 {
                Complex64::new(-r, 0.0)
            } else {
                Complex64::new(r, 0.0)
            }
        }
        Branch::Upper => {
            let theta = std::f64::consts::PI * (1.0 - s.value());
            Complex64::from_polar(r, theta)
        }
        // exact conjugate of the upper seed
        Branch::Lower => {
            let theta = std::f64::consts::PI * (1.0 - s.value());
            Complex64::from_polar(r, theta).conj()
        }
    }
}

fn branch_angle(s: Slope, b: Branch) -> f64 {
    let upper = std::f64::consts::PI * (1.0 - s.value());
    match b {
        Branch::Upper => upper,
        Branch::Lower => -upper,
        Branch::Real => {
            if s.p() == 0 {
                std::f64::consts::PI
            } else {
                0.0
            }
        }
    }
}

fn angle_distance(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = (a - b).rem_euclid(two_pi);
    d.min(two_pi - d)
}

/// Solve at the head of a continuation.
///
/// The asymptotic seed's angular error is roughly |c_{q-1}|/(q·|ρ|) while
/// the Newton basins of the q roots of Tr = t are ~π/q wide, so the direct
/// solve at t0 is only trusted when the estimated drift is at most a
/// quarter of the basin and the converged argument lands within half of
/// it. Otherwise the solve anchors at a t deep enough that the ratio is
/// provably small and walks back to t0 geometrically.
fn first_root(tf: &TraceFn, s: Slope, b: Branch, t0: f64, tol: f64) -> Result<Complex64, RayError> {
    let target = branch_angle(s, b);
    let q = tf.degree as f64;
    let basin = std::f64::consts::PI / q;
    let sub = if tf.degree >= 1 {
        (tf.f[tf.degree - 1] / tf.leading).abs()
    } else {
        0.0
    };

    let radius_at = |t: f64| (t.abs() / tf.leading.abs()).powf(1.0 / q);
    if sub / (q * radius_at(t0)) <= 0.25 * basin {
        match newton(tf, t0, seed_from(tf, s, b, t0), tol) {
            Ok(direct) if angle_distance(direct.arg(), target) <= 0.5 * basin => {
                return Ok(direct);
            }
            _ => {}
        }
    }

    // anchor where drift/basin <= 1/4 with a hard floor on the radius
    let radius = (2.6 * q).max(12.0).max(4.0 * sub / (std::f64::consts::PI));
    let t_deep = -(radius.powi(tf.degree as i32) * tf.leading.abs());
    if !t_deep.is_finite() || t_deep >= t0 {
        return Err(RayError::BranchSwitch { t_prev: t0, t: t0 });
    }
    let mut rho = newton(tf, t_deep, seed_from(tf, s, b, t_deep), tol)?;
    let decades = (t_deep.abs() / t0.abs()).log10();
    let n = (decades * 16.0).ceil().max(1.0) as usize;
    let mut t_prev = t_deep;
    for k in 1..n {
        let t = -10f64.powf(
            t_deep.abs().log10() + (t0.abs().log10() - t_deep.abs().log10()) * k as f64 / n as f64,
        );
        rho = advance(tf, rho, t_prev, t, tol, 0)?;
        t_prev = t;
    }
    advance(tf, rho, t_prev, t0, tol, 0)
}

/// Trace polynomial of the slope word, Tr V_{p/q}.
pub fn trace_polynomial_of(s: Slope) -> IntPoly {
    trace_polynomial(&v_word(s.canonicalize()))
}

/// Starting point for Newton at large |t|: modulus from the leading term of
/// the trace polynomial, argument from the branch's asymptotic direction.
pub fn asymptotic_seed(s: Slope, b: Branch, t: f64) -> Result<Complex64, RayError> {
    if !branch_valid(s, b) {
        return Err(RayError::InvalidBranch { slope: s, branch: b });
    }
    Ok(seed_from(&TraceFn::for_slope(s), s, b, t))
}

fn newton(tf: &TraceFn, t: f64, seed: Complex64, tol: f64) -> Result<Complex64, RayError> {
    let target = tol * t.abs().max(1.0);
    // a stagnated iterate is still accepted if its residual is within the
    // evaluation noise floor: beyond that double precision cannot certify
    // improvement
    let accept = |z: Complex64, r: Complex64, mag: f64| -> Result<Complex64, RayError> {
        if r.norm() <= target.max(noise_floor(mag + t.abs(), tf.degree)) {
            Ok(z)
        } else {
            Err(RayError::NonConvergence {
                iters: NEWTON_MAX_ITERS,
                last: z,
                residual: r.norm(),
            })
        }
    };
    let mut z = seed;
    let (v, mut mag) = tf.eval_with_mag(z);
    let mut r = v - t;
    for _ in 0..NEWTON_MAX_ITERS {
        if r.norm() <= target {
            return Ok(z);
        }
        let d = tf.deriv(z);
        if d.norm() == 0.0 {
            return Err(RayError::FlatDerivative { at: z });
        }
        let mut step = r / d;
        let mut halvings = 0;
        loop {
            let zn = z - step;
            let (vn, magn) = tf.eval_with_mag(zn);
            let rn = vn - t;
            if rn.norm() < r.norm() {
                z = zn;
                mag = magn;
                r = rn;
                break;
            }
            if halvings >= STEP_MAX_HALVINGS {
                return accept(z, r, mag);
            }
            step *= 0.5;
            halvings += 1;
        }
    }
    accept(z, r, mag)
}

/// Solve Tr(ρ) = t by safeguarded Newton from `seed`. The result satisfies
/// `|Tr(ρ) - t| <= 10⁻¹²·max(1, |t|)`.
pub fn solve_trace_eq(f: &IntPoly, t: f64, seed: Complex64) -> Result<Complex64, RayError> {
    newton(&TraceFn::new(f), t, seed, NEWTON_TOL)
}

/// One continuation move from (t_from, ρ) to t_to. The t-step is halved,
/// up to the budget, whenever the solve fails or the motion exceeds the
/// derivative-scaled continuity bound (or half the current modulus): a
/// basin hop at full step resolves into small on-branch moves, while a
/// true branch switch keeps violating the shrinking bound at every depth.
fn advance(
    tf: &TraceFn,
    rho: Complex64,
    t_from: f64,
    t_to: f64,
    tol: f64,
    depth: usize,
) -> Result<Complex64, RayError> {
    let attempt = newton(tf, t_to, rho, tol);
    if let Ok(sol) = attempt {
        let d = tf.deriv(rho).norm();
        let bound = (JUMP_FACTOR * (t_to - t_from).abs() / d + jump_slack(tf, rho, t_to, d))
            .min(0.5 * rho.norm());
        if (sol - rho).norm() <= bound {
            return Ok(sol);
        }
    }
    if depth >= STEP_MAX_HALVINGS {
        return match attempt {
            Ok(_) => Err(RayError::BranchSwitch {
                t_prev: t_from,
                t: t_to,
            }),
            Err(e) => Err(e),
        };
    }
    let t_mid = 0.5 * (t_from + t_to);
    let mid = advance(tf, rho, t_from, t_mid, tol, depth + 1)?;
    advance(tf, mid, t_mid, t_to, tol, depth + 1)
}

/// Trace one branch along the schedule by Newton continuation, ending with
/// the refined cusp at t = -2.
pub fn trace_ray(s: Slope, b: Branch, schedule: &Schedule) -> Result<RayPath, RayError> {
    trace_ray_with_tol(s, b, schedule, NEWTON_TOL)
}

pub fn trace_ray_with_tol(
    s: Slope,
    b: Branch,
    schedule: &Schedule,
    tol: f64,
) -> Result<RayPath, RayError> {
    if !branch_valid(s, b) {
        return Err(RayError::InvalidBranch { slope: s, branch: b });
    }
    let tf = TraceFn::for_slope(s);
    let ts = schedule.t_values();
    let mut samples = Vec::with_capacity(ts.len());

    let mut rho = first_root(&tf, s, b, ts[0], tol)?;
    samples.push(RaySample { t: ts[0], rho });

    for w in ts.windows(2) {
        let (t_prev, t) = (w[0], w[1]);
        let next = advance(&tf, rho, t_prev, t, tol, 0)?;
        // the recorded samples themselves must respect the continuity bound
        let d = tf.deriv(rho).norm();
        let bound = JUMP_FACTOR * (t - t_prev).abs() / d + jump_slack(&tf, rho, t, d);
        if (next - rho).norm() > bound {
            return Err(RayError::BranchSwitch { t_prev, t });
        }
        rho = next;
        samples.push(RaySample { t, rho });
    }

    let cusp = rho;
    let cusp_flat = tf.deriv(cusp).norm() < FLAT_DERIV_TOL;
    Ok(RayPath {
        slope: s,
        branch: b,
        samples,
        cusp,
        cusp_flat,
    })
}

/// A refined cusp point together with its flat-root flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CuspPoint {
    pub rho: Complex64,
    pub flat: bool,
}

/// The t = -2 terminus of the traced branch.
pub fn cusp(s: Slope, b: Branch) -> Result<CuspPoint, RayError> {
    cusp_with(s, b, &Schedule::standard())
}

pub fn cusp_with(s: Slope, b: Branch, schedule: &Schedule) -> Result<CuspPoint, RayError> {
    let path = trace_ray(s, b, schedule)?;
    Ok(CuspPoint {
        rho: path.cusp,
        flat: path.cusp_flat,
    })
}

/// All complex roots of Tr V_{p/q} + 2 by the Aberth–Ehrlich simultaneous
/// iteration, sorted by real then imaginary part.
///
/// Every cusp of the slope appears among these roots; roots that are not
/// cusp endpoints are reported unclassified rather than filtered.
pub fn all_parabolic_roots(s: Slope) -> Result<Vec<Complex64>, RayError> {
    let poly = trace_polynomial(&v_word(s.canonicalize())).add(&IntPoly::constant(2));
    aberth_roots(&poly.coeffs_f64())
}

fn aberth_roots(coeffs: &[f64]) -> Result<Vec<Complex64>, RayError> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let an = coeffs[n];
    let df: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as f64)
        .collect();

    // initial guesses on a circle of the Cauchy radius, offset off the axes
    let radius = 1.0 + coeffs[..n]
        .iter()
        .map(|c| (c / an).abs())
        .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            Complex64::from_polar(
                radius,
                2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4,
            )
        })
        .collect();

    const MAX_SWEEPS: usize = 300;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut max_move = 0.0f64;
        for k in 0..n {
            let fz = horner(coeffs, z[k]);
            let dz = horner(&df, z[k]);
            let newton_step = if dz.norm() == 0.0 {
                Complex64::new(1e-12, 1e-12)
            } else {
                fz / dz
            };
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    repulsion += 1.0 / (z[k] - z[j]);
                }
            }
            let denom = 1.0 - newton_step * repulsion;
            let w = if denom.norm() == 0.0 {
                newton_step
            } else {
                newton_step / denom
            };
            z[k] -= w;
            max_move = max_move.max(w.norm() / z[k].norm().max(1.0));
        }
        if max_move < 1e-13 {
            converged = true;
            break;
        }
    }
    // a stalled sweep is fine as long as every iterate sits at the
    // evaluation noise floor
    if !converged {
        let at_floor = z.iter().all(|&zk| {
            let (v, mag) = horner_with_mag(coeffs, zk);
            v.norm() <= noise_floor(mag, n)
        });
        if !at_floor {
            return Err(RayError::RootFinder(MAX_SWEEPS));
        }
    }
    let mut roots = z;
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(roots)
}

/// Distance from each cusp of `s` to the nearest root of Tr + 2; the
/// maximum over branches. Cross-validates the continuation endpoint against
/// the simultaneous root finder.
pub fn cusp_root_deviation(s: Slope) -> Result<f64, RayError> {
    let roots = all_parabolic_roots(s)?;
    let mut worst = 0.0f64;
    for b in branches_for(s) {
        let c = cusp(s, b)?.rho;
        let d = roots
            .iter()
            .map(|r| (r - c).norm())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    Ok(worst)
}

const ON_RAY_IM_TOL: f64 = 1e-8;
const ON_RAY_RE_SLACK: f64 = 1e-9;

/// Pleating length L = 2·arccosh(-Tr(ρ)/2) of a point on a traced branch.
/// Zero exactly at the cusp; errors if ρ is off the hyperbolic locus.
pub fn pleating_length(s: Slope, rho: Complex64) -> Result<f64, RayError> {
    let tr = trace_polynomial(&v_word(s.canonicalize())).eval(rho);
    let scale = tr.re.abs().max(1.0);
    if tr.im.abs() > ON_RAY_IM_TOL * scale {
        return Err(RayError::OffRay(format!(
            "Im Tr = {:.3e} at rho = {rho}",
            tr.im
        )));
    }
    if tr.re > T_CUSP + ON_RAY_RE_SLACK {
        return Err(RayError::OffRay(format!(
            "Re Tr = {} > -2 at rho = {rho}",
            tr.re
        )));
    }
    let x = (-tr.re / 2.0).max(1.0);
    Ok(2.0 * x.acosh())
}

/// The unique point on branch `b` with pleating length `len`: continuation
/// down to t = -2·cosh(len/2).
pub fn point_for_length(s: Slope, b: Branch, len: f64) -> Result<Complex64, RayError> {
    if len.is_nan() || len <= 0.0 {
        return Err(RayError::NonPositiveLength);
    }
    if !branch_valid(s, b) {
        return Err(RayError::InvalidBranch { slope: s, branch: b });
    }
    let t_target = -2.0 * (len / 2.0).cosh();
    let tf = TraceFn::for_slope(s);
    let schedule = Schedule::standard();
    let ts = schedule.t_values();
    if t_target <= ts[0] {
        // deeper than the whole schedule
        return first_root(&tf, s, b, t_target, NEWTON_TOL);
    }
    let mut rho = first_root(&tf, s, b, ts[0], NEWTON_TOL)?;
    let mut t_prev = ts[0];
    for &t in &ts[1..] {
        if t >= t_target {
            break;
        }
        rho = advance(&tf, rho, t_prev, t, NEWTON_TOL, 0)?;
        t_prev = t;
    }
    advance(&tf, rho, t_prev, t_target, NEWTON_TOL, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::Slope;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn schedule_shape() {
        let s = Schedule::standard();
        let ts = s.t_values();
        assert_eq!(ts[0], -1e8);
        assert_eq!(*ts.last().unwrap(), -2.0);
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
        // 7 decades at 16 points each, then 160 uniform steps
        assert_eq!(ts.len(), 112 + 161);
        assert!(ts.contains(&-6.0));
        assert!(Schedule::new(-100.0, 16, 0.05).is_err());
        assert!(Schedule::new(-1e8, 3, 0.05).is_err());
    }

    #[test]
    fn branches_by_slope() {
        assert_eq!(branches_for(Slope::new(0, 1)), vec![Branch::Real]);
        assert_eq!(branches_for(Slope::new(1, 1)), vec![Branch::Real]);
        assert_eq!(
            branches_for(Slope::new(1, 2)),
            vec![Branch::Upper, Branch::Lower]
        );
    }

    #[test]
    fn asymptotic_seed_examples() {
        let s = asymptotic_seed(Slope::new(1, 2), Branch::Upper, -1e8).unwrap();
        assert!((s - c(0.0, 1e4)).norm() < 1e-9 * 1e4);

        let s = asymptotic_seed(Slope::new(0, 1), Branch::Real, -1e8).unwrap();
        assert_eq!(s, c(-1e8, 0.0));

        let lower = asymptotic_seed(Slope::new(1, 2), Branch::Lower, -1e8).unwrap();
        let upper = asymptotic_seed(Slope::new(1, 2), Branch::Upper, -1e8).unwrap();
        assert_eq!(lower, upper.conj());

        assert!(asymptotic_seed(Slope::new(1, 2), Branch::Real, -1e8).is_err());
    }

    #[test]
    fn solve_trace_eq_examples() {
        let f = IntPoly::from_coeffs(vec![2, 1]); // ρ + 2
        let r = solve_trace_eq(&f, -2.0, c(-3.0, 0.0)).unwrap();
        assert!((r - c(-4.0, 0.0)).norm() < 1e-12);

        let f = IntPoly::from_coeffs(vec![2, -1]); // 2 - ρ
        let r = solve_trace_eq(&f, -6.0, c(7.0, 0.0)).unwrap();
        assert!((r - c(8.0, 0.0)).norm() < 1e-12);

        let f = IntPoly::from_coeffs(vec![2, 0, 1]); // ρ² + 2
        let r = solve_trace_eq(&f, -2.0, c(0.0, 1.9)).unwrap();
        assert!((r - c(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn trace_real_rays() {
        let sched = Schedule::standard();
        let path = trace_ray(Slope::new(0, 1), Branch::Real, &sched).unwrap();
        assert!((path.cusp - c(-4.0, 0.0)).norm() < 1e-10);
        assert!(path.samples.iter().all(|s| s.rho.im == 0.0));
        let at_minus_6 = path.samples.iter().find(|s| s.t == -6.0).unwrap();
        assert!((at_minus_6.rho - c(-8.0, 0.0)).norm() < 1e-10);

        let path = trace_ray(Slope::new(1, 1), Branch::Real, &sched).unwrap();
        assert!((path.cusp - c(4.0, 0.0)).norm() < 1e-10);
        assert!(path.samples.iter().all(|s| s.rho.im == 0.0 && s.rho.re >= 4.0));
    }

    #[test]
    fn trace_half_slope_upper() {
        let sched = Schedule::standard();
        let path = trace_ray(Slope::new(1, 2), Branch::Upper, &sched).unwrap();
        assert!((path.cusp - c(0.0, 2.0)).norm() < 1e-10);
        // near-cusp sample follows ρ = i·sqrt(|t| + 2): at t = -2.05,
        // ρ = i·sqrt(4.05)
        let near = path.samples.iter().find(|s| (s.t + 2.05).abs() < 1e-12).unwrap();
        assert!((near.rho - c(0.0, 4.05f64.sqrt())).norm() < 1e-10);
        assert!(path.samples.iter().all(|s| s.rho.im > 0.0));
    }

    #[test]
    fn invalid_branch_rejected() {
        let sched = Schedule::standard();
        assert!(matches!(
            trace_ray(Slope::new(1, 2), Branch::Real, &sched),
            Err(RayError::InvalidBranch { .. })
        ));
        assert!(matches!(
            trace_ray(Slope::new(0, 1), Branch::Upper, &sched),
            Err(RayError::InvalidBranch { .. })
        ));
    }

    #[test]
    fn cusp_examples() {
        assert!((cusp(Slope::new(0, 1), Branch::Real).unwrap().rho - c(-4.0, 0.0)).norm() < 1e-10);
        assert!((cusp(Slope::new(1, 1), Branch::Real).unwrap().rho - c(4.0, 0.0)).norm() < 1e-10);
        let u = cusp(Slope::new(1, 2), Branch::Upper).unwrap();
        assert!((u.rho - c(0.0, 2.0)).norm() < 1e-10);
        assert!(!u.flat);
    }

    #[test]
    fn parabolic_roots_examples() {
        let r = all_parabolic_roots(Slope::new(0, 1)).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(-4.0, 0.0)).norm() < 1e-10);

        let r = all_parabolic_roots(Slope::new(1, 1)).unwrap();
        assert!((r[0] - c(4.0, 0.0)).norm() < 1e-10);

        let r = all_parabolic_roots(Slope::new(1, 2)).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - c(0.0, -2.0)).norm() < 1e-9);
        assert!((r[1] - c(0.0, 2.0)).norm() < 1e-9);
    }

    #[test]
    fn parabolic_roots_one_third() {
        // Tr + 2 = -ρ³ - 2ρ² - ρ + 4 has roots 1 and (-3 ± i√7)/2; only the
        // conjugate pair are cusps
        let r = all_parabolic_roots(Slope::new(1, 3)).unwrap();
        assert_eq!(r.len(), 3);
        let expect = [
            c(-1.5, -(7f64.sqrt()) / 2.0),
            c(-1.5, 7f64.sqrt() / 2.0),
            c(1.0, 0.0),
        ];
        for (got, want) in r.iter().zip(expect) {
            assert!((got - want).norm() < 1e-9, "{got} vs {want}");
        }
        assert!(cusp_root_deviation(Slope::new(1, 3)).unwrap() < 1e-9);
    }

    #[test]
    fn pleating_length_examples() {
        let l = pleating_length(Slope::new(0, 1), c(-4.0, 0.0)).unwrap();
        assert_eq!(l, 0.0);
        let l = pleating_length(Slope::new(0, 1), c(-6.0, 0.0)).unwrap();
        assert!((l - 2.0 * 2.0f64.acosh()).abs() < 1e-12);
        assert!(pleating_length(Slope::new(0, 1), c(3.0, 2.0)).is_err());
    }

    #[test]
    fn point_for_length_examples() {
        let r = point_for_length(Slope::new(0, 1), Branch::Real, 2.0 * 2.0f64.acosh()).unwrap();
        assert!((r - c(-6.0, 0.0)).norm() < 1e-10);
        let r = point_for_length(Slope::new(1, 1), Branch::Real, 2.0 * 2.0f64.acosh()).unwrap();
        assert!((r - c(6.0, 0.0)).norm() < 1e-10);
        let r = point_for_length(Slope::new(1, 2), Branch::Upper, 1e-6).unwrap();
        assert!((r - c(0.0, 2.0)).norm() < 1e-9);
        assert!(matches!(
            point_for_length(Slope::new(1, 2), Branch::Upper, 0.0),
            Err(RayError::NonPositiveLength)
        ));
    }

    #[test]
    fn ray_path_serde_round_trip() {
        let sched = Schedule::new(-1e3, 4, 0.5).unwrap();
        let path = trace_ray(Slope::new(1, 2), Branch::Upper, &sched).unwrap();
        let json = serde_json::to_string(&path).unwrap();
        let back: RayPath = serde_json::from_str(&json).unwrap();
        assert_eq!(back.slope, path.slope);
        assert_eq!(back.branch, path.branch);
        assert_eq!(back.cusp, path.cusp);
        assert_eq!(back.samples, path.samples);
    }
}
