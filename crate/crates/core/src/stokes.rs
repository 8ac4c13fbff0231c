//! Stokes geometry of `Pi(q)^2 = q^N + v q^M + lambda` in the complex
//! `q`-plane: turning points, level curves `Im int Pi dq = 0` traced from
//! each turning point, and their linkage to the `q -> +inf` direction.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;
use crate::quad::gauss10_nodes;
use crate::spectral::sector_theta;
use crate::trinomial::TrinomialMomentum;

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootKind {
    Inner,
    Outer,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    pub q: C64,
    pub multiplicity: usize,
    pub kind: RootKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub points: Vec<TurningPoint>,
    /// Inner and outer magnitude scales are too close to separate cleanly.
    pub ill_conditioned: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveEnd {
    /// Reached the clip radius; `sector` indexes the asymptotic direction
    /// `2 pi k / (N + 2)`.
    Infinity { sector: u32 },
    TurningPoint { index: usize },
    StepLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StokesCurve {
    pub anchor: usize,
    pub launch_angle: f64,
    pub samples: Vec<C64>,
    pub end: CurveEnd,
    pub linked_to_plus_infinity: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StokesDiagram {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "M")]
    pub m: u32,
    pub v: C64,
    pub lambda: C64,
    pub theta: f64,
    pub turning_points: Vec<TurningPoint>,
    pub curves: Vec<StokesCurve>,
    /// The curve leaving the degenerate origin along `arg q = -theta/(M+2)`
    /// (zero-energy case only).
    pub s_curve: Option<usize>,
    pub clip_radius: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct StokesOptions {
    /// Bound on `|Im int Pi|` along emitted curves.
    pub trace_tol: f64,
    /// Clip radius in units of `|v|^{1/(N-M)}`.
    pub clip_factor: f64,
    /// Step as a fraction of the distance to the nearest turning point.
    pub step_fraction: f64,
    pub max_steps: usize,
}

impl Default for StokesOptions {
    fn default() -> Self {
        StokesOptions { trace_tol: 1e-8, clip_factor: 4.0, step_fraction: 0.08, max_steps: 20000 }
    }
}

fn momentum(n: u32, m: u32, v: C64, lambda: C64) -> Result<TrinomialMomentum<f64>> {
    if v.norm() == 0.0 && lambda.norm() == 0.0 {
        return Err(Error::Domain("v and lambda cannot both vanish".into()));
    }
    TrinomialMomentum::new(n, m, 1.0, v, lambda)
}

fn outer_scale(n: u32, m: u32, v: C64, lambda: C64) -> f64 {
    if v.norm() > 0.0 {
        v.norm().powf(1.0 / (n - m) as f64)
    } else {
        lambda.norm().powf(1.0 / n as f64)
    }
}

/// All `N` roots of `q^N + v q^M + lambda`, clustered and classified by
/// magnitude against `(|lambda|/|v|)^{1/M}` (inner) and `|v|^{1/(N-M)}`
/// (outer).
pub fn turning_points(n: u32, m: u32, v: C64, lambda: C64) -> Result<TurningPoints> {
    let tm = momentum(n, m, v, lambda)?;
    let raw = poly::roots(&tm.coefficients())?;
    let outer = outer_scale(n, m, v, lambda);
    let merge = 1e-4 * outer;
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for r in raw {
        match clusters.iter_mut().find(|(c, _)| (*c - r).norm() < merge) {
            Some((c, k)) => {
                *c = (*c * *k as f64 + r) / (*k + 1) as f64;
                *k += 1;
            }
            None => clusters.push((r, 1)),
        }
    }
    let inner = if m > 0 && v.norm() > 0.0 && lambda.norm() > 0.0 {
        Some((lambda.norm() / v.norm()).powf(1.0 / m as f64))
    } else {
        None
    };
    let ill_conditioned = inner.map_or(false, |s| outer / s < 4.0);
    let points = clusters
        .into_iter()
        .map(|(q, k)| {
            let kind = if k > 1 {
                RootKind::Degenerate
            } else {
                match inner {
                    Some(s) if (q.norm() / s).ln().abs() < (q.norm() / outer).ln().abs() => RootKind::Inner,
                    _ => RootKind::Outer,
                }
            };
            TurningPoint { q, multiplicity: k, kind }
        })
        .collect();
    Ok(TurningPoints { points, ill_conditioned })
}

struct Field<'a> {
    coeffs: Vec<C64>,
    points: &'a [TurningPoint],
    nodes: Vec<(f64, f64)>,
}

impl Field<'_> {
    fn pi2(&self, q: C64) -> C64 {
        poly::eval(&self.coeffs, q)
    }

    /// Branch of `Pi` at `q` closest to `prev`.
    fn cont(&self, prev: C64, q: C64) -> C64 {
        let s = self.pi2(q).sqrt();
        if (s - prev).norm() <= (s + prev).norm() {
            s
        } else {
            -s
        }
    }

    fn nearest(&self, q: C64) -> (usize, f64) {
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, (p.q - q).norm()))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
    }

    /// `int Pi dq` on the segment `a -> b`, continuing the branch from
    /// `p_a`; returns the integral and `Pi(b)`.
    fn segment(&self, a: C64, b: C64, p_a: C64) -> (C64, C64) {
        let h = b - a;
        let mut p = p_a;
        let mut acc = C64::new(0.0, 0.0);
        for &(x, w) in &self.nodes {
            p = self.cont(p, a + h * (0.5 * (x + 1.0)));
            acc += p * w;
        }
        (acc * h * 0.5, self.cont(p, b))
    }

    /// `int Pi dq` from the root `c` to `b` with `q = c + (b - c) t^2`,
    /// which removes the square-root endpoint behaviour. `p_b` fixes the
    /// branch at `b`.
    fn from_root(&self, c: C64, b: C64, p_b: C64) -> C64 {
        let h = b - c;
        let mut p = p_b;
        let mut acc = C64::new(0.0, 0.0);
        for &(x, w) in self.nodes.iter().rev() {
            let t = 0.5 * (x + 1.0);
            p = self.cont(p, c + h * (t * t));
            acc += p * (2.0 * t) * w;
        }
        acc * h * 0.5
    }
}

fn sorted_nodes() -> Vec<(f64, f64)> {
    let mut v = gauss10_nodes().to_vec();
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    v
}

/// Local launch directions `arg(q - q_t)` of the level curves at a root of
/// multiplicity `k` where `Pi^2 ~ a (q - q_t)^k`.
fn launch_angles(a: C64, k: usize) -> Vec<f64> {
    let p = k as f64 / 2.0 + 1.0;
    (0..k + 2).map(|j| (j as f64 * PI - 0.5 * a.arg()) / p).collect()
}

fn local_coefficient(points: &[TurningPoint], i: usize) -> C64 {
    let c = points[i].q;
    points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .fold(C64::new(1.0, 0.0), |acc, (_, p)| acc * (c - p.q).powu(p.multiplicity as u32))
}

fn wrap_angle(x: f64) -> f64 {
    let t = x.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

fn trace_one(
    field: &Field,
    n: u32,
    anchor: usize,
    angle: f64,
    clip: f64,
    scale: f64,
    opts: &StokesOptions,
) -> Result<StokesCurve> {
    let c = field.points[anchor].q;
    let dir0 = C64::from_polar(1.0, angle);
    let eps = 1e-3 * scale;
    let hit = 1e-6 * clip;
    let newton_tol = 1e-3 * opts.trace_tol;
    // branch chosen so that Pi dq > 0 along the launch direction
    let mut q = c + dir0 * eps;
    let mut p = field.pi2(q).sqrt();
    if (p * dir0).re < 0.0 {
        p = -p;
    }
    let mut f = field.from_root(c, q, p);
    for _ in 0..6 {
        if f.im.abs() < newton_tol {
            break;
        }
        let dq = -C64::i() * f.im * p.conj() / p.norm_sqr();
        let q1 = q + dq;
        let p1 = field.cont(p, q1);
        q = q1;
        p = p1;
        f = field.from_root(c, q, p);
    }
    let mut samples = vec![c, q];
    let mut steps = 0;
    let end = loop {
        if q.norm() >= clip {
            let k = (q.arg() * (n as f64 + 2.0) / (2.0 * PI)).round() as i64;
            break CurveEnd::Infinity { sector: k.rem_euclid(n as i64 + 2) as u32 };
        }
        steps += 1;
        if steps > opts.max_steps {
            break CurveEnd::StepLimit;
        }
        let (near, d) = field.nearest(q);
        if near != anchor && d < hit {
            break CurveEnd::TurningPoint { index: near };
        }
        let h = (opts.step_fraction * d).min(0.05 * clip);
        if h < 1e-14 * clip {
            return Err(Error::StepCollapse { re: q.re, im: q.im });
        }
        let dir1 = p.conj() / p.norm();
        let qm = q + dir1 * (0.5 * h);
        let pm = field.cont(p, qm);
        let mut qn = q + pm.conj() / pm.norm() * h;
        let (mut g, mut pn) = field.segment(q, qn, p);
        for _ in 0..6 {
            let im = f.im + g.im;
            if im.abs() < newton_tol {
                break;
            }
            qn += -C64::i() * im * pn.conj() / pn.norm_sqr();
            let s = field.segment(q, qn, p);
            g = s.0;
            pn = s.1;
        }
        // a step that fails to advance means the curve runs into a root
        // the clustering did not resolve
        if (g.re) <= 0.0 {
            return Err(Error::StepCollapse { re: q.re, im: q.im });
        }
        f += g;
        q = qn;
        p = pn;
        samples.push(q);
    };
    let linked = matches!(end, CurveEnd::Infinity { sector: 0 });
    Ok(StokesCurve { anchor, launch_angle: angle, samples, end, linked_to_plus_infinity: linked })
}

fn clip_radius(n: u32, m: u32, v: C64, lambda: C64, opts: &StokesOptions) -> f64 {
    opts.clip_factor * outer_scale(n, m, v, lambda).max(lambda.norm().powf(1.0 / n as f64)).max(1.0)
}

struct Launch {
    anchor: usize,
    angle: f64,
    scale: f64,
}

fn launches(points: &[TurningPoint], clip: f64) -> Vec<Launch> {
    let mut out = Vec::new();
    for i in 0..points.len() {
        let scale = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| (p.q - points[i].q).norm())
            .fold(0.25 * clip, f64::min);
        let a = local_coefficient(points, i);
        for angle in launch_angles(a, points[i].multiplicity) {
            out.push(Launch { anchor: i, angle, scale });
        }
    }
    out
}

fn s_launch(points: &[TurningPoint], clip: f64, m: u32, theta: f64) -> Option<usize> {
    let origin = points.iter().position(|p| p.multiplicity == m as usize && p.q.norm() < 1e-9 * clip)?;
    let target = -theta / (m as f64 + 2.0);
    launches(points, clip)
        .iter()
        .enumerate()
        .filter(|(_, l)| l.anchor == origin)
        .min_by(|a, b| {
            let da = wrap_angle(a.1.angle - target).abs();
            let db = wrap_angle(b.1.angle - target).abs();
            da.partial_cmp(&db).unwrap()
        })
        .map(|(k, _)| k)
}

/// Traces every level curve from every turning point. A curve joining two
/// turning points is kept once, from the lower-indexed end.
pub fn trace_stokes_curves(n: u32, m: u32, v: C64, lambda: C64, opts: &StokesOptions) -> Result<StokesDiagram> {
    let tp = turning_points(n, m, v, lambda)?;
    let tm = momentum(n, m, v, lambda)?;
    let clip = clip_radius(n, m, v, lambda, opts);
    let field = Field { coeffs: tm.coefficients(), points: &tp.points, nodes: sorted_nodes() };
    let ls = launches(&tp.points, clip);
    let traced: Vec<StokesCurve> = ls
        .par_iter()
        .map(|l| trace_one(&field, n, l.anchor, l.angle, clip, l.scale, opts))
        .collect::<Result<_>>()?;
    let s_raw = if lambda.norm() == 0.0 { s_launch(&tp.points, clip, m, v.arg()) } else { None };
    // drop the reverse copy of each turning-point connection
    let mut keep = vec![true; traced.len()];
    for (i, c) in traced.iter().enumerate() {
        if let CurveEnd::TurningPoint { index } = c.end {
            if index > c.anchor {
                continue;
            }
            let tail = c.samples[c.samples.len() - 2];
            let back = (tail - tp.points[index].q).arg();
            let twin = traced.iter().enumerate().position(|(j, d)| {
                j != i && d.anchor == index && wrap_angle(d.launch_angle - back).abs() < 0.2
            });
            if twin.is_some() {
                keep[i] = false;
            }
        }
    }
    let mut s_curve = None;
    let mut curves = Vec::new();
    for (i, c) in traced.into_iter().enumerate() {
        if keep[i] {
            if Some(i) == s_raw {
                s_curve = Some(curves.len());
            }
            curves.push(c);
        }
    }
    Ok(StokesDiagram {
        n,
        m,
        v,
        lambda,
        theta: v.arg(),
        turning_points: tp.points,
        curves,
        s_curve,
        clip_radius: clip,
    })
}

/// Only the curve `S` of the zero-energy diagram.
fn trace_s(n: u32, m: u32, v: C64, opts: &StokesOptions) -> Result<StokesCurve> {
    let z = C64::new(0.0, 0.0);
    let tp = turning_points(n, m, v, z)?;
    let tm = momentum(n, m, v, z)?;
    let clip = clip_radius(n, m, v, z, opts);
    let field = Field { coeffs: tm.coefficients(), points: &tp.points, nodes: sorted_nodes() };
    let ls = launches(&tp.points, clip);
    let k = s_launch(&tp.points, clip, m, v.arg())
        .ok_or_else(|| Error::Domain("no degenerate origin: S needs lambda = 0 and M > 0".into()))?;
    trace_one(&field, n, ls[k].anchor, ls[k].angle, clip, ls[k].scale, opts)
}

/// Largest `|Im int_{q_t}^q Pi dq|` along each curve, re-integrated with
/// split ten-point Gauss rules between consecutive samples.
pub fn level_set_residuals(d: &StokesDiagram) -> Vec<f64> {
    let tm = TrinomialMomentum::new(d.n, d.m, 1.0, d.v, d.lambda).expect("diagram parameters");
    let nodes = sorted_nodes();
    let field = Field { coeffs: tm.coefficients(), points: &d.turning_points, nodes };
    d.curves
        .iter()
        .map(|c| {
            let s = &c.samples;
            let dir = s[1] - s[0];
            let mut p = field.pi2(s[1]).sqrt();
            if (p * dir).re < 0.0 {
                p = -p;
            }
            let mut f = field.from_root(s[0], s[1], p);
            let mut worst = f.im.abs();
            for w in s[1..].windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                let (g1, pm) = field.segment(w[0], mid, p);
                let (g2, pn) = field.segment(mid, w[1], pm);
                f += g1 + g2;
                p = pn;
                worst = worst.max(f.im.abs());
            }
            worst
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalAngle {
    pub theta: f64,
    pub closed_form: f64,
    /// Width of the final linked/unlinked bracket.
    pub bracket: f64,
    /// Set when `lambda != 0`: linkage is then judged on curves from inner
    /// turning points rather than on `S`.
    pub small_lambda: bool,
}

fn linked_at(n: u32, m: u32, modulus: f64, lambda: f64, theta: f64, opts: &StokesOptions) -> Result<bool> {
    let v = C64::from_polar(modulus, theta);
    if lambda == 0.0 {
        return Ok(trace_s(n, m, v, opts)?.linked_to_plus_infinity);
    }
    let d = trace_stokes_curves(n, m, v, C64::new(lambda, 0.0), opts)?;
    Ok(d.curves.iter().any(|c| d.turning_points[c.anchor].kind == RootKind::Inner && c.linked_to_plus_infinity))
}

/// Angle `arg v` at which `S` stops reaching `q = +inf`, bisected to
/// `1e-4` rad after a coarse scan of `[0, pi)`.
pub fn critical_angle(n: u32, m: u32, modulus: f64, lambda: f64) -> Result<CriticalAngle> {
    if m == 0 {
        return Err(Error::Domain("the transition needs M > 0".into()));
    }
    if !(modulus > 0.0) {
        return Err(Error::Domain("|v| must be positive".into()));
    }
    let opts = StokesOptions::default();
    let step = 0.05;
    let mut lo = 0.0;
    let mut hi = None;
    let mut t = step;
    while t < PI {
        if linked_at(n, m, modulus, lambda, t, &opts)? {
            lo = t;
        } else {
            hi = Some(t);
            break;
        }
        t += step;
    }
    let mut hi = hi.ok_or(Error::NoTransition)?;
    if !linked_at(n, m, modulus, lambda, lo, &opts)? {
        return Err(Error::NoTransition);
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if linked_at(n, m, modulus, lambda, mid, &opts)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalAngle {
        theta: 0.5 * (lo + hi),
        closed_form: sector_theta(n, m),
        bracket: hi - lo,
        small_lambda: lambda != 0.0,
    })
}

/// True when no curve meets or crosses the real axis, so the whole real
/// line sits in one region.
pub fn real_axis_in_one_region(d: &StokesDiagram) -> bool {
    let tiny = 1e-9 * d.clip_radius;
    d.curves.iter().all(|c| {
        let s = &c.samples;
        let sign = s.iter().map(|q| q.im).find(|x| x.abs() > tiny).map_or(0.0, f64::signum);
        sign != 0.0 && s.iter().all(|q| q.im * sign > tiny)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureParams {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "M")]
    pub m: u32,
    pub modulus: f64,
    /// `(label, theta, lambda)` per panel.
    pub panels: Vec<(String, f64, f64)>,
}

impl FigureParams {
    /// Six panels at `|v| = 5`: `(a)` `theta = 0`, `lambda = 0.5`;
    /// `(b)`-`(e)` `lambda = 0` across the transition; `(f)` past it with
    /// `lambda = 0.5`.
    pub fn figure_one(n: u32, m: u32) -> Self {
        let th = sector_theta(n, m);
        let panels = vec![
            ("a".to_string(), 0.0, 0.5),
            ("b".to_string(), 0.0, 0.0),
            ("c".to_string(), 0.5 * th, 0.0),
            ("d".to_string(), th - 0.15, 0.0),
            ("e".to_string(), th + 0.15, 0.0),
            ("f".to_string(), (th + 0.4).min(PI), 0.5),
        ];
        FigureParams { n, m, modulus: 5.0, panels }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEntry {
    pub file: String,
    pub anchor_index: usize,
    pub launch_angle: f64,
    pub linked: bool,
    pub end: CurveEnd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelManifest {
    pub panel: String,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "M")]
    pub m: u32,
    pub v: C64,
    pub lambda: C64,
    pub theta: f64,
    pub clip_radius: f64,
    pub turning_points: Vec<TurningPoint>,
    pub curves: Vec<CurveEntry>,
    pub s_curve: Option<usize>,
    pub s_linked: Option<bool>,
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn write_curve(path: &Path, samples: &[C64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["re_q", "im_q"]).map_err(io)?;
    for q in samples {
        w.serialize((q.re, q.im)).map_err(io)?;
    }
    w.flush().map_err(io)
}

fn read_curve(path: &Path) -> Result<Vec<C64>> {
    let mut r = csv::Reader::from_path(path).map_err(io)?;
    r.deserialize::<(f64, f64)>().map(|row| row.map(|(a, b)| C64::new(a, b)).map_err(io)).collect()
}

/// Writes one CSV per curve and a JSON manifest per panel into `dir`;
/// returns the manifest paths.
pub fn emit_figure_data(params: &FigureParams, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io)?;
    let opts = StokesOptions::default();
    let mut out = Vec::new();
    for (label, theta, lambda) in &params.panels {
        let v = C64::from_polar(params.modulus, *theta);
        let d = trace_stokes_curves(params.n, params.m, v, C64::new(*lambda, 0.0), &opts)?;
        let mut curves = Vec::new();
        for (i, c) in d.curves.iter().enumerate() {
            let file = format!("panel_{label}_curve_{i:03}.csv");
            write_curve(&dir.join(&file), &c.samples)?;
            curves.push(CurveEntry {
                file,
                anchor_index: c.anchor,
                launch_angle: c.launch_angle,
                linked: c.linked_to_plus_infinity,
                end: c.end,
            });
        }
        let man = PanelManifest {
            panel: label.clone(),
            n: d.n,
            m: d.m,
            v: d.v,
            lambda: d.lambda,
            theta: d.theta,
            clip_radius: d.clip_radius,
            turning_points: d.turning_points.clone(),
            s_linked: d.s_curve.map(|k| d.curves[k].linked_to_plus_infinity),
            s_curve: d.s_curve,
            curves,
        };
        let path = dir.join(format!("panel_{label}.json"));
        fs::write(&path, serde_json::to_string_pretty(&man).map_err(io)?).map_err(io)?;
        out.push(path);
    }
    Ok(out)
}

/// Rebuilds a diagram from a panel manifest and its curve files.
pub fn read_panel(manifest: &Path) -> Result<StokesDiagram> {
    let text = fs::read_to_string(manifest).map_err(io)?;
    let man: PanelManifest = serde_json::from_str(&text).map_err(io)?;
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let curves = man
        .curves
        .iter()
        .map(|e| {
            Ok(StokesCurve {
                anchor: e.anchor_index,
                launch_angle: e.launch_angle,
                samples: read_curve(&dir.join(&e.file))?,
                end: e.end,
                linked_to_plus_infinity: e.linked,
            })
        })
        .collect::<Result<_>>()?;
    Ok(StokesDiagram {
        n: man.n,
        m: man.m,
        v: man.v,
        lambda: man.lambda,
        theta: man.theta,
        turning_points: man.turning_points,
        curves,
        s_curve: man.s_curve,
        clip_radius: man.clip_radius,
    })
}
