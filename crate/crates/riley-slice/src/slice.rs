//! Batch construction of the slice picture: all rays up to a denominator
//! bound, symmetry and disjointness audits, nearest-ray lookup, and CSV /
//! JSON / SVG exporters.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::farey::{farey_enumerate, Slope};
use crate::rays::{branches_for, trace_ray, Branch, RayPath, Schedule};

/// Relative tolerance for the symmetry audits.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// One named audit check with its measured value.
///
/// `value` is the deviation being bounded for symmetry checks, the crossing
/// count for the intersection check, and the minimum separation for the
/// distance check.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AuditEntry {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CuspRecord {
    pub slope: Slope,
    pub branch: Branch,
    pub rho: Complex64,
}

/// All rays and cusps with denominator at most `q_max`, plus audit results.
#[derive(Clone, Debug)]
pub struct SliceDiagram {
    pub q_max: u32,
    pub rays: Vec<RayPath>,
    pub cusps: Vec<CuspRecord>,
    pub audit: Vec<AuditEntry>,
}

#[derive(Serialize, Deserialize)]
struct CuspDto {
    slope: String,
    branch: String,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SliceDto {
    q_max: u32,
    rays: Vec<RayPath>,
    cusps: Vec<CuspDto>,
    audit: Vec<AuditEntry>,
}

impl Serialize for SliceDiagram {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SliceDto {
            q_max: self.q_max,
            rays: self.rays.clone(),
            cusps: self
                .cusps
                .iter()
                .map(|c| CuspDto {
                    slope: c.slope.to_string(),
                    branch: c.branch.tag().to_string(),
                    re: c.rho.re,
                    im: c.rho.im,
                })
                .collect(),
            audit: self.audit.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SliceDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = SliceDto::deserialize(deserializer)?;
        let cusps = dto
            .cusps
            .iter()
            .map(|c| {
                Ok(CuspRecord {
                    slope: c.slope.parse().map_err(serde::de::Error::custom)?,
                    branch: Branch::from_tag(&c.branch)
                        .ok_or_else(|| serde::de::Error::custom("bad branch"))?,
                    rho: Complex64::new(c.re, c.im),
                })
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        Ok(SliceDiagram {
            q_max: dto.q_max,
            rays: dto.rays,
            cusps,
            audit: dto.audit,
        })
    }
}

fn branch_rank(b: Branch) -> u8 {
    match b {
        Branch::Real => 0,
        Branch::Upper => 1,
        Branch::Lower => 2,
    }
}

/// Trace every branch of every canonical slope with denominator <= q_max
/// and run all audits. Ray failures are recorded as failing audit entries
/// and the build continues.
pub fn build_slice(q_max: u32, schedule: &Schedule) -> SliceDiagram {
    let mut rays = Vec::new();
    let mut audit = Vec::new();
    for s in farey_enumerate(q_max) {
        for b in branches_for(s) {
            match trace_ray(s, b, schedule) {
                Ok(path) => rays.push(path),
                Err(e) => audit.push(AuditEntry {
                    name: format!("trace:{s}:{}", b.tag()),
                    pass: false,
                    value: 0.0,
                    detail: e.to_string(),
                }),
            }
        }
    }
    rays.sort_by_key(|r| (r.slope.q(), r.slope.p(), branch_rank(r.branch)));
    let cusps = rays
        .iter()
        .map(|r| CuspRecord {
            slope: r.slope,
            branch: r.branch,
            rho: r.cusp,
        })
        .collect();
    let mut diagram = SliceDiagram {
        q_max,
        rays,
        cusps,
        audit,
    };
    let symmetry = symmetry_audit(&diagram);
    diagram.audit.extend(symmetry);
    let disjointness = disjointness_audit(&diagram);
    diagram.audit.extend(disjointness);
    diagram
}

fn find_ray(d: &SliceDiagram, s: Slope, b: Branch) -> Option<&RayPath> {
    d.rays.iter().find(|r| r.slope == s && r.branch == b)
}

/// Per-slope maximum deviations for the conjugation symmetry
/// (upper = conj(lower)) and the negation symmetry
/// (upper of 1 - p/q = -(lower of p/q)), plus zero-imaginary checks on the
/// real rays. All are relative to max(1, |ρ|); pass below 10⁻⁸.
pub fn symmetry_audit(d: &SliceDiagram) -> Vec<AuditEntry> {
    let mut out = Vec::new();

    for r in &d.rays {
        if r.branch == Branch::Real {
            let worst = r
                .samples
                .iter()
                .map(|s| s.rho.im.abs())
                .fold(0.0, f64::max);
            out.push(AuditEntry {
                name: format!("real:{}", r.slope),
                pass: worst == 0.0,
                value: worst,
                detail: "imaginary part along the real branch".to_string(),
            });
        }
    }

    let slopes: Vec<Slope> = farey_enumerate(d.q_max)
        .into_iter()
        .filter(|s| s.p() != 0 && s.p() != s.q())
        .collect();

    for &s in &slopes {
        let (Some(upper), Some(lower)) = (
            find_ray(d, s, Branch::Upper),
            find_ray(d, s, Branch::Lower),
        ) else {
            continue;
        };
        let worst = matched_deviation(upper, lower, |u, l| (u - l.conj()).norm());
        out.push(AuditEntry {
            name: format!("conj:{s}"),
            pass: worst < SYMMETRY_TOL,
            value: worst,
            detail: "upper branch vs conjugate of lower branch".to_string(),
        });
    }

    // negation pairs p/q <-> 1 - p/q with branches swapped; 0/1 <-> 1/1
    // pair their real branches
    let real_pair = (
        find_ray(d, Slope::new(0, 1), Branch::Real),
        find_ray(d, Slope::new(1, 1), Branch::Real),
    );
    if let (Some(a), Some(b)) = real_pair {
        let worst = matched_deviation(b, a, |x, y| (x + y).norm());
        out.push(AuditEntry {
            name: "neg:0/1~1/1".to_string(),
            pass: worst < SYMMETRY_TOL,
            value: worst,
            detail: "real ray of 1/1 vs negated real ray of 0/1".to_string(),
        });
    }
    for &s in &slopes {
        let m = Slope::new(s.q() - s.p(), s.q());
        if s > m {
            continue;
        }
        let (Some(m_upper), Some(s_lower)) = (
            find_ray(d, m, Branch::Upper),
            find_ray(d, s, Branch::Lower),
        ) else {
            continue;
        };
        let (Some(m_lower), Some(s_upper)) = (
            find_ray(d, m, Branch::Lower),
            find_ray(d, s, Branch::Upper),
        ) else {
            continue;
        };
        let w1 = matched_deviation(m_upper, s_lower, |x, y| (x + y).norm());
        let w2 = matched_deviation(m_lower, s_upper, |x, y| (x + y).norm());
        let worst = w1.max(w2);
        out.push(AuditEntry {
            name: format!("neg:{s}~{m}"),
            pass: worst < SYMMETRY_TOL,
            value: worst,
            detail: "branches of 1-p/q vs negated swapped branches of p/q".to_string(),
        });
    }
    out
}

fn matched_deviation(
    a: &RayPath,
    b: &RayPath,
    err: impl Fn(Complex64, Complex64) -> f64,
) -> f64 {
    a.samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| {
            debug_assert_eq!(x.t, y.t);
            err(x.rho, y.rho) / x.rho.norm().max(1.0)
        })
        .fold(0.0, f64::max)
}

// --- polyline geometry ----------------------------------------------------

#[derive(Clone, Copy)]
struct BBox {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl BBox {
    fn of(points: &[(f64, f64)]) -> BBox {
        let mut b = BBox {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for &(x, y) in points {
            b.x0 = b.x0.min(x);
            b.x1 = b.x1.max(x);
            b.y0 = b.y0.min(y);
            b.y1 = b.y1.max(y);
        }
        b
    }

    fn overlaps(&self, o: &BBox) -> bool {
        self.x0 <= o.x1 && o.x0 <= self.x1 && self.y0 <= o.y1 && o.y0 <= self.y1
    }

    fn distance(&self, o: &BBox) -> f64 {
        let dx = (o.x0 - self.x1).max(self.x0 - o.x1).max(0.0);
        let dy = (o.y0 - self.y1).max(self.y0 - o.y1).max(0.0);
        dx.hypot(dy)
    }
}

struct Chunks {
    points: Vec<(f64, f64)>,
    boxes: Vec<(BBox, usize, usize)>, // (bbox, first point, last point)
}

const CHUNK: usize = 32;

fn chunked(path: &RayPath) -> Chunks {
    let points: Vec<(f64, f64)> = path.samples.iter().map(|s| (s.rho.re, s.rho.im)).collect();
    let mut boxes = Vec::new();
    let mut i = 0;
    while i + 1 < points.len() {
        let j = (i + CHUNK).min(points.len() - 1);
        boxes.push((BBox::of(&points[i..=j]), i, j));
        i = j;
    }
    Chunks { points, boxes }
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn segments_intersect(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    // touching counts as a crossing
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn on_segment(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> bool {
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn segment_distance(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> f64 {
    if segments_intersect(p1, p2, q1, q2) {
        return 0.0;
    }
    point_segment_distance(p1, q1, q2)
        .min(point_segment_distance(p2, q1, q2))
        .min(point_segment_distance(q1, p1, p2))
        .min(point_segment_distance(q2, p1, p2))
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (abx, aby) = (b.0 - a.0, b.1 - a.1);
    let len2 = abx * abx + aby * aby;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * abx + (p.1 - a.1) * aby) / len2).clamp(0.0, 1.0)
    };
    (p.0 - (a.0 + t * abx)).hypot(p.1 - (a.1 + t * aby))
}

fn pair_crossings(a: &Chunks, b: &Chunks) -> usize {
    let mut count = 0;
    for &(ba, ia, ja) in &a.boxes {
        for &(bb, ib, jb) in &b.boxes {
            if !ba.overlaps(&bb) {
                continue;
            }
            for i in ia..ja {
                for j in ib..jb {
                    if segments_intersect(
                        a.points[i],
                        a.points[i + 1],
                        b.points[j],
                        b.points[j + 1],
                    ) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

fn pair_min_distance(a: &Chunks, b: &Chunks, mut best: f64) -> f64 {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (ka, &(ba, _, _)) in a.boxes.iter().enumerate() {
        for (kb, &(bb, _, _)) in b.boxes.iter().enumerate() {
            pairs.push((ba.distance(&bb), ka, kb));
        }
    }
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    for (lower_bound, ka, kb) in pairs {
        if lower_bound >= best {
            break;
        }
        let (_, ia, ja) = a.boxes[ka];
        let (_, ib, jb) = b.boxes[kb];
        for i in ia..ja {
            for j in ib..jb {
                let dist = segment_distance(
                    a.points[i],
                    a.points[i + 1],
                    b.points[j],
                    b.points[j + 1],
                );
                best = best.min(dist);
            }
        }
    }
    best
}

/// Crossing count over all ray pairs (must be zero) and the minimum
/// distance between polylines of rays with distinct canonical slopes.
pub fn disjointness_audit(d: &SliceDiagram) -> Vec<AuditEntry> {
    if d.rays.len() < 2 {
        return Vec::new();
    }
    let chunks: Vec<Chunks> = d.rays.iter().map(chunked).collect();
    let mut crossings = 0usize;
    let mut crossing_detail = String::new();
    let mut min_dist = f64::INFINITY;
    let mut min_pair = String::new();
    for i in 0..d.rays.len() {
        for j in i + 1..d.rays.len() {
            let n = pair_crossings(&chunks[i], &chunks[j]);
            if n > 0 && crossing_detail.is_empty() {
                crossing_detail = format!(
                    "{}:{} x {}:{}",
                    d.rays[i].slope,
                    d.rays[i].branch,
                    d.rays[j].slope,
                    d.rays[j].branch
                );
            }
            crossings += n;
            if d.rays[i].slope != d.rays[j].slope {
                let dist = pair_min_distance(&chunks[i], &chunks[j], min_dist);
                if dist < min_dist {
                    min_dist = dist;
                    min_pair = format!(
                        "{}:{} vs {}:{}",
                        d.rays[i].slope,
                        d.rays[i].branch,
                        d.rays[j].slope,
                        d.rays[j].branch
                    );
                }
            }
        }
    }
    vec![
        AuditEntry {
            name: "disjointness-crossings".to_string(),
            pass: crossings == 0,
            value: crossings as f64,
            detail: if crossing_detail.is_empty() {
                "polyline crossings over all ray pairs".to_string()
            } else {
                format!("first crossing pair {crossing_detail}")
            },
        },
        AuditEntry {
            name: "disjointness-min-distance".to_string(),
            pass: min_dist > 0.0,
            value: min_dist,
            detail: format!("closest distinct-slope pair {min_pair}"),
        },
    ]
}

/// The stored sample nearest to ρ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocateResult {
    pub slope: Slope,
    pub branch: Branch,
    pub t: f64,
    pub distance: f64,
}

/// Nearest ray sample across the whole diagram; `None` on an empty one.
pub fn locate(rho: Complex64, d: &SliceDiagram) -> Option<LocateResult> {
    let mut best: Option<LocateResult> = None;
    for r in &d.rays {
        for s in &r.samples {
            let dist = (s.rho - rho).norm();
            if best.as_ref().is_none_or(|b| dist < b.distance) {
                best = Some(LocateResult {
                    slope: r.slope,
                    branch: r.branch,
                    t: s.t,
                    distance: dist,
                });
            }
        }
    }
    best
}

// --- exporters -------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
    Svg,
}

/// Rectangular window in the ρ-plane for SVG export.
#[derive(Clone, Copy, Debug)]
pub struct ViewBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Default for ViewBox {
    fn default() -> Self {
        ViewBox {
            re_min: -5.0,
            re_max: 5.0,
            im_min: -5.0,
            im_max: 5.0,
        }
    }
}

// keeps -0.0 from leaking into text output
fn csv_num(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// CSV with one row per sample, grouped by ray.
pub fn to_csv(d: &SliceDiagram) -> String {
    let mut out = String::from("slope,branch,t,re,im\n");
    for r in &d.rays {
        for s in &r.samples {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.slope,
                r.branch.tag(),
                csv_num(s.t),
                csv_num(s.rho.re),
                csv_num(s.rho.im)
            ));
        }
    }
    out
}

/// CSV for a single ray, same header and row shape as the diagram export.
pub fn ray_to_csv(r: &RayPath) -> String {
    let mut out = String::from("slope,branch,t,re,im\n");
    for s in &r.samples {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.slope,
            r.branch.tag(),
            csv_num(s.t),
            csv_num(s.rho.re),
            csv_num(s.rho.im)
        ));
    }
    out
}

pub fn to_json(d: &SliceDiagram) -> String {
    serde_json::to_string_pretty(d).expect("diagram serializes")
}

/// Format with 9 significant digits, positional notation, trailing zeros
/// trimmed.
fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.8e}", x);
    let (mantissa, exp) = s.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("exponent parses");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp >= 8 {
        out.push_str(&digits);
        out.push_str(&"0".repeat((exp - 8) as usize));
    } else if exp >= 0 {
        let point = (exp + 1) as usize;
        out.push_str(&digits[..point]);
        let frac = digits[point..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    } else {
        out.push_str("0.");
        out.push_str(&"0".repeat((-exp - 1) as usize));
        out.push_str(digits.trim_end_matches('0'));
    }
    out
}

/// Liang–Barsky clip of one segment to the box; returns the clipped
/// endpoints if anything remains.
fn clip_segment(
    a: (f64, f64),
    b: (f64, f64),
    vb: &ViewBox,
) -> Option<((f64, f64), (f64, f64))> {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, q) in [
        (-dx, a.0 - vb.re_min),
        (dx, vb.re_max - a.0),
        (-dy, a.1 - vb.im_min),
        (dy, vb.im_max - a.1),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                if r > t1 {
                    return None;
                }
                t0 = t0.max(r);
            } else {
                if r < t0 {
                    return None;
                }
                t1 = t1.min(r);
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    Some((
        (a.0 + t0 * dx, a.1 + t0 * dy),
        (a.0 + t1 * dx, a.1 + t1 * dy),
    ))
}

/// Clip a polyline to the box, splitting it where it leaves and re-enters.
fn clip_polyline(points: &[(f64, f64)], vb: &ViewBox) -> Vec<Vec<(f64, f64)>> {
    let mut pieces: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    for w in points.windows(2) {
        match clip_segment(w[0], w[1], vb) {
            // a segment clipped to a single boundary point contributes
            // nothing
            Some((p, q)) if p != q => {
                if current.last() != Some(&p) {
                    if !current.is_empty() {
                        pieces.push(std::mem::take(&mut current));
                    }
                    current.push(p);
                }
                current.push(q);
            }
            _ => {
                if !current.is_empty() {
                    pieces.push(std::mem::take(&mut current));
                }
            }
        }
    }
    if !current.is_empty() {
        pieces.push(current);
    }
    pieces.retain(|p| p.len() >= 2);
    pieces
}

/// Standalone SVG: rays as polylines clipped to the view box, cusps as
/// filled circles of radius 0.03 user units, axes as hairlines. The y axis
/// points up. Byte-deterministic for fixed inputs.
pub fn to_svg(d: &SliceDiagram, vb: &ViewBox) -> String {
    let w = vb.re_max - vb.re_min;
    let h = vb.im_max - vb.im_min;
    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"720\" height=\"720\">\n",
        fmt_sig9(vb.re_min),
        fmt_sig9(-vb.im_max),
        fmt_sig9(w),
        fmt_sig9(h)
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"0\" x2=\"{}\" y2=\"0\" stroke=\"#999999\" stroke-width=\"{}\"/>\n",
        fmt_sig9(vb.re_min),
        fmt_sig9(vb.re_max),
        fmt_sig9(w / 2000.0)
    ));
    svg.push_str(&format!(
        "<line x1=\"0\" y1=\"{}\" x2=\"0\" y2=\"{}\" stroke=\"#999999\" stroke-width=\"{}\"/>\n",
        fmt_sig9(-vb.im_max),
        fmt_sig9(-vb.im_min),
        fmt_sig9(h / 2000.0)
    ));
    svg.push_str(&format!(
        "<g fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"{}\">\n",
        fmt_sig9(w / 800.0)
    ));
    for r in &d.rays {
        let points: Vec<(f64, f64)> = r.samples.iter().map(|s| (s.rho.re, s.rho.im)).collect();
        for piece in clip_polyline(&points, vb) {
            svg.push_str("<polyline points=\"");
            let mut first = true;
            for (x, y) in piece {
                if !first {
                    svg.push(' ');
                }
                first = false;
                svg.push_str(&fmt_sig9(x));
                svg.push(',');
                svg.push_str(&fmt_sig9(-y));
            }
            svg.push_str("\"/>\n");
        }
    }
    svg.push_str("</g>\n<g fill=\"#c23b22\">\n");
    for c in &d.cusps {
        if c.rho.re < vb.re_min
            || c.rho.re > vb.re_max
            || c.rho.im < vb.im_min
            || c.rho.im > vb.im_max
        {
            continue;
        }
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"0.03\"/>\n",
            fmt_sig9(c.rho.re),
            fmt_sig9(-c.rho.im)
        ));
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}

/// Write the diagram to `path` in the requested format.
pub fn export(
    d: &SliceDiagram,
    format: ExportFormat,
    path: &Path,
    viewbox: &ViewBox,
) -> std::io::Result<()> {
    let contents = match format {
        ExportFormat::Csv => to_csv(d),
        ExportFormat::Json => to_json(d),
        ExportFormat::Svg => to_svg(d, viewbox),
    };
    let mut file = std::fs::File::create(path)?;
    file.write_all(contents.as_bytes())
}
