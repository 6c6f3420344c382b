//! Okikiolu test certificates.
//!
//! A certificate is a pair of determinant-power test functions
//! `φ₁ = Δ^{-u}`, `φ₂ = Δ^{-v}` and a split `t` such that the two
//! Schur-type integrals
//!
//! ```text
//! I₁(y) = ∫ K(y,x)^{t p′} φ₁(x)^{p′} dμ(x)     = C₁ φ₂(y)^{p′}
//! I₂(x) = ∫ K(y,x)^{(1-t) q} φ₂(y)^q dν(y)   = C₂ φ₁(x)^q
//! ```
//!
//! hold with constants, which bounds the operator norm by `C₁^{1/p′} C₂^{1/q}`.
//! For fixed `t` every constraint on `(u, v)` is affine, and `v - u` is
//! tied to `t`, so the search is a one-dimensional scan over `t`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::on_axis;
use crate::cone::{ConeDescriptor, ConePoint, GeneralizedPower, TubePoint};
use crate::decision::{decide_s, sufficient_tplus_pure, SParams, VerdictStatus};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_cone_log, mixed_norm_power, ConeSample, QuadratureConfig, Symmetry};

/// Grid size of the `t` scan.
pub const T_GRID: usize = 64;
/// Relative tolerance of the closing exponent identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Floor of the ratio-constancy tolerance.
pub const RATIO_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    /// `S` with `1 < p ≤ q < ∞`.
    ConeS,
    /// `S` with `p = 1`, checked through the limit case of the test.
    #[serde(rename = "ConeS_p1")]
    ConeSP1,
    /// `T⁺` between unmixed spaces of the tube.
    TubeTplus,
}

/// Exponent of a test function: a scalar power of Δ, or a generalized
/// power when no scalar witness exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Witness {
    pub fn components(&self, rank: usize) -> Vec<f64> {
        match self {
            Witness::Scalar(a) => vec![*a; rank],
            Witness::Vector(v) => v.clone(),
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, Witness::Scalar(_))
    }

    fn from_components(c: Vec<f64>, scalar: bool) -> Witness {
        if scalar {
            Witness::Scalar(c[0])
        } else {
            Witness::Vector(c)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OkikioluCertificate {
    pub kind: CertificateKind,
    pub u: Witness,
    pub v: Witness,
    pub t: f64,
    pub omega: f64,
    /// Filled in by verification.
    #[serde(rename = "M1")]
    pub m1: Option<f64>,
    #[serde(rename = "M2")]
    pub m2: Option<f64>,
    /// Smallest distance of the witness to any of its constraints.
    pub slack: f64,
}

/// `at0 + slope · t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub at0: f64,
    pub slope: f64,
}

impl Affine {
    pub fn new(at0: f64, slope: f64) -> Self {
        Affine { at0, slope }
    }

    pub fn at(&self, t: f64) -> f64 {
        self.at0 + self.slope * t
    }
}

/// The constraint system of one witness component at fixed `t`:
/// `max(u_lower) < u < min(u_upper)`, the same for `v`, and `v - u = gap(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityWindow {
    pub t_interval: (f64, f64),
    pub u_lower: Vec<Affine>,
    pub u_upper: Vec<Affine>,
    pub v_lower: Vec<Affine>,
    pub v_upper: Vec<Affine>,
    pub gap: Affine,
}

fn bounds(lower: &[Affine], upper: &[Affine], t: f64) -> (f64, f64) {
    let lo = lower.iter().map(|a| a.at(t)).fold(f64::NEG_INFINITY, f64::max);
    let hi = upper.iter().map(|a| a.at(t)).fold(f64::INFINITY, f64::min);
    (lo, hi)
}

impl FeasibilityWindow {
    pub fn u_interval(&self, t: f64) -> (f64, f64) {
        bounds(&self.u_lower, &self.u_upper, t)
    }

    pub fn v_interval(&self, t: f64) -> (f64, f64) {
        bounds(&self.v_lower, &self.v_upper, t)
    }

    /// The midpoint witness at `t` and its slack (negative if infeasible).
    pub fn solve(&self, t: f64) -> (f64, f64, f64) {
        let d = self.gap.at(t);
        let (ul, uu) = self.u_interval(t);
        let (vl, vu) = self.v_interval(t);
        let (lo, hi) = (ul.max(vl - d), uu.min(vu - d));
        let u = 0.5 * (lo + hi);
        (u, u + d, self.slack(t, u, u + d))
    }

    /// Minimal distance of `(t, u, v)` to the constraints; the `t` bounds
    /// are measured in units of `v - u`.
    pub fn slack(&self, t: f64, u: f64, v: f64) -> f64 {
        let (ul, uu) = self.u_interval(t);
        let (vl, vu) = self.v_interval(t);
        let (t0, t1) = self.t_interval;
        let dt = (t - t0).min(t1 - t) * self.gap.slope.abs();
        (u - ul).min(uu - u).min(v - vl).min(vu - v).min(dt)
    }

    /// Brute-force check of the strict inequalities.
    pub fn contains(&self, t: f64, u: f64, v: f64) -> bool {
        let (ul, uu) = self.u_interval(t);
        let (vl, vu) = self.v_interval(t);
        t > self.t_interval.0 && t < self.t_interval.1 && ul < u && u < uu && vl < v && v < vu
    }
}

/// Which range of `t` to search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TRange {
    /// `0 < v - u < μ/q` (resp. `(μ + n/r)/q`), the choice made in the
    /// sufficiency proofs.
    Narrow,
    /// All of `0 < t < 1`.
    Full,
}

fn conj(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `1/p′`, zero at `p = 1`.
fn inv_conj(p: f64) -> f64 {
    1.0 - 1.0 / p
}

fn t_interval(range: TRange, gap: Affine) -> (f64, f64) {
    match range {
        // gap(t) > 0 with gap increasing in t; gap(1) is the upper end
        TRange::Narrow => ((-gap.at0 / gap.slope).max(0.0), 1.0),
        TRange::Full => (0.0, 1.0),
    }
}

/// Feasibility system for `S` with `1 < p ≤ q < ∞`. `component = None`
/// gives the scalar system; `Some(j)` the system of the `j`-th component
/// of a generalized-power witness (1-based).
pub fn window_s(cone: &ConeDescriptor, prm: &SParams, component: Option<usize>, range: TRange) -> FeasibilityWindow {
    let SParams { alpha, beta, gamma, nu, mu, p, q } = *prm;
    let nr = cone.n_over_r();
    let k = nr - 1.0;
    let r = cone.rank();
    let half_d = cone.structure_constant() / 2.0;
    let (lo_off, hi_off) = match component {
        None => (k, k),
        Some(j) => ((r - j) as f64 * half_d, (j - 1) as f64 * half_d),
    };
    let ip = inv_conj(p);
    let omega = -(nu * ip + mu / q);
    let b = beta - nu + nr;
    let g = b - gamma;
    let gap = Affine::new(-nu * ip, -omega);
    FeasibilityWindow {
        t_interval: t_interval(range, gap),
        u_lower: vec![Affine::new((nu + lo_off) * ip, g), Affine::new(-b, b)],
        u_upper: vec![Affine::new((nu - hi_off) * ip, b), Affine::new(-g, g)],
        v_lower: vec![Affine::new((mu + lo_off) / q - (gamma - alpha), gamma - alpha), Affine::new(0.0, -alpha)],
        v_upper: vec![Affine::new((mu - hi_off) / q + alpha, -alpha), Affine::new(0.0, gamma - alpha)],
        gap,
    }
}

/// Feasibility system for `S` with `p = 1`.
pub fn window_s_p1(cone: &ConeDescriptor, prm: &SParams) -> FeasibilityWindow {
    let SParams { alpha, beta, gamma, nu, mu, q, .. } = *prm;
    let nr = cone.n_over_r();
    let k = nr - 1.0;
    let b = beta - nu + nr;
    let g = b - gamma;
    FeasibilityWindow {
        t_interval: (0.0, 1.0),
        u_lower: vec![Affine::new(-b, b), Affine::new(0.0, g)],
        u_upper: vec![Affine::new(0.0, b), Affine::new(-g, g)],
        v_lower: vec![Affine::new(0.0, -alpha), Affine::new((mu + k) / q - (gamma - alpha), gamma - alpha)],
        v_upper: vec![Affine::new((mu - k) / q + alpha, -alpha), Affine::new(0.0, gamma - alpha)],
        gap: Affine::new(0.0, mu / q),
    }
}

/// Feasibility system for `T⁺` from `L^p_ν` to `L^q_μ` of the tube.
pub fn window_tplus(cone: &ConeDescriptor, prm: &SParams, range: TRange) -> FeasibilityWindow {
    let SParams { alpha, beta, nu, mu, p, q, .. } = *prm;
    let nr = cone.n_over_r();
    let k = nr - 1.0;
    let ip = inv_conj(p);
    let omega = -((nu + nr) * ip + (mu + nr) / q);
    let b = beta - nu + nr;
    let gap = Affine::new(-(nu + nr) * ip, -omega);
    FeasibilityWindow {
        t_interval: t_interval(range, gap),
        u_lower: vec![Affine::new(-b + k / q, b)],
        u_upper: vec![Affine::new((nu - k) * ip, b)],
        v_lower: vec![Affine::new(k * ip, -alpha)],
        v_upper: vec![Affine::new((mu - k) / q + alpha, -alpha)],
        gap,
    }
}

/// Best `(t, u, v, slack)` over the `t` grid for windows sharing `t`.
fn search(windows: &[FeasibilityWindow]) -> Option<(f64, Vec<f64>, Vec<f64>, f64)> {
    let (t0, t1) = windows[0].t_interval;
    if !(t1 > t0) {
        return None;
    }
    let mut best: Option<(f64, Vec<f64>, Vec<f64>, f64)> = None;
    for i in 0..T_GRID {
        let t = t0 + (i as f64 + 0.5) * (t1 - t0) / T_GRID as f64;
        let mut us = Vec::with_capacity(windows.len());
        let mut vs = Vec::with_capacity(windows.len());
        let mut slack = f64::INFINITY;
        for w in windows {
            let (u, v, s) = w.solve(t);
            us.push(u);
            vs.push(v);
            slack = slack.min(s);
        }
        if best.as_ref().is_none_or(|b| slack > b.3) {
            best = Some((t, us, vs, slack));
        }
    }
    best.filter(|b| b.3 > 0.0)
}

fn certificate(kind: CertificateKind, found: (f64, Vec<f64>, Vec<f64>, f64), scalar: bool, omega: f64) -> OkikioluCertificate {
    let (t, u, v, slack) = found;
    OkikioluCertificate {
        kind,
        u: Witness::from_components(u, scalar),
        v: Witness::from_components(v, scalar),
        t,
        omega,
        m1: None,
        m2: None,
        slack,
    }
}

/// Scalar witnesses with at least this slack are kept over vector ones:
/// the latter need the full three-dimensional rule to verify.
const SCALAR_SLACK: f64 = 0.01;

/// Picks the first candidate whose slack is within a factor 4 of the best,
/// so the proof's own choices win unless they are badly conditioned.
fn pick(cands: Vec<(Option<(f64, Vec<f64>, Vec<f64>, f64)>, bool)>) -> Option<((f64, Vec<f64>, Vec<f64>, f64), bool)> {
    let best = cands.iter().filter_map(|(c, _)| c.as_ref().map(|c| c.3)).fold(f64::NEG_INFINITY, f64::max);
    let good = |c: &(f64, Vec<f64>, Vec<f64>, f64), scalar: bool| c.3 >= 0.25 * best || (scalar && c.3 >= SCALAR_SLACK);
    cands.into_iter().find_map(|(c, scalar)| c.filter(|c| good(c, scalar)).map(|c| (c, scalar)))
}

/// Okikiolu witnesses for `S` under the hypotheses of the `q < ∞`
/// theorems. Scalar witnesses are tried first; on rank ≥ 2 cones a
/// generalized-power witness covers the cases where no scalar one exists.
pub fn find_certificate_s(cone: &ConeDescriptor, prm: &SParams) -> Result<OkikioluCertificate> {
    let verdict = decide_s(cone, prm);
    if verdict.status != VerdictStatus::Bounded || prm.q.is_infinite() {
        return Err(Error::Precondition(format!(
            "certificates need a Bounded verdict with q < inf, got {} ({})",
            verdict.status, verdict.theorem
        )));
    }
    if prm.p == 1.0 {
        let w = window_s_p1(cone, prm);
        let found = search(std::slice::from_ref(&w))
            .ok_or_else(|| Error::Infeasible(format!("p = 1 system empty for {prm:?}")))?;
        return Ok(certificate(CertificateKind::ConeSP1, found, true, -prm.mu / prm.q));
    }
    let r = cone.rank();
    let omega = -(prm.nu * inv_conj(prm.p) + prm.mu / prm.q);
    let scalar = |range| search(&[window_s(cone, prm, None, range)]);
    let vector = |range| {
        let ws: Vec<_> = (1..=r).map(|j| window_s(cone, prm, Some(j), range)).collect();
        search(&ws)
    };
    let mut cands = vec![(scalar(TRange::Narrow), true), (scalar(TRange::Full), true)];
    if r > 1 {
        cands.push((vector(TRange::Narrow), false));
        cands.push((vector(TRange::Full), false));
    }
    let (found, is_scalar) =
        pick(cands).ok_or_else(|| Error::Infeasible(format!("no witness for {prm:?} on {cone}")))?;
    Ok(certificate(CertificateKind::ConeS, found, is_scalar, omega))
}

/// Okikiolu witnesses for `T⁺` under the sufficient condition.
pub fn find_certificate_tplus(cone: &ConeDescriptor, prm: &SParams) -> Result<OkikioluCertificate> {
    let verdict = sufficient_tplus_pure(cone, prm);
    if verdict.status != VerdictStatus::SufficientOnlyBounded {
        return Err(Error::Precondition(format!("tube certificates need the sufficient condition, got {}", verdict.status)));
    }
    let nr = cone.n_over_r();
    let omega = -((prm.nu + nr) * inv_conj(prm.p) + (prm.mu + nr) / prm.q);
    let cands = vec![
        (search(&[window_tplus(cone, prm, TRange::Narrow)]), true),
        (search(&[window_tplus(cone, prm, TRange::Full)]), true),
    ];
    let (found, _) = pick(cands).ok_or_else(|| Error::Infeasible(format!("no tube witness for {prm:?}")))?;
    Ok(certificate(CertificateKind::TubeTplus, found, true, omega))
}

/// Residuals of the exponent identities that close the proofs, scaled by
/// the size of the terms involved. Each must vanish to [`IDENTITY_TOL`].
pub fn identity_residuals(cone: &ConeDescriptor, prm: &SParams, cert: &OkikioluCertificate) -> Vec<f64> {
    let SParams { alpha, beta, gamma, nu, mu, p, q } = *prm;
    let nr = cone.n_over_r();
    let r = cone.rank();
    let (u, v) = (cert.u.components(r), cert.v.components(r));
    let t = cert.t;
    let b = beta - nu + nr;
    let rel = |terms: &[f64], target: f64| {
        let sum: f64 = terms.iter().sum();
        let scale = terms.iter().fold(target.abs(), |m, x| m.max(x.abs())).max(1.0);
        (sum - target) / scale
    };
    let mut out = Vec::new();
    for j in 0..r {
        let (uj, vj) = (u[j], v[j]);
        match cert.kind {
            CertificateKind::ConeS => {
                let pp = conj(p);
                out.push(rel(&[t * pp * alpha, -t * pp * gamma, t * pp * b, -pp * uj, nu], -pp * vj));
                out.push(rel(&[(1.0 - t) * q * b, -(1.0 - t) * q * gamma, (1.0 - t) * q * alpha, -q * vj, mu], -q * uj));
                out.push(rel(&[t * cert.omega], -nu / pp + uj - vj));
            }
            CertificateKind::ConeSP1 => {
                out.push(rel(&[(1.0 - t) * q * b, -(1.0 - t) * q * gamma, (1.0 - t) * q * alpha, -q * vj, mu], -q * uj));
                out.push(rel(&[-uj, t * b, -gamma * t, vj, t * alpha], 0.0));
                out.push(rel(&[t * cert.omega], uj - vj));
            }
            CertificateKind::TubeTplus => {
                let pp = conj(p);
                let g = gamma + nr;
                out.push(rel(&[t * pp * alpha, -t * pp * g, t * pp * b, -pp * uj, nu, nr], -pp * vj));
                out.push(rel(&[(1.0 - t) * q * b, -(1.0 - t) * q * g, (1.0 - t) * q * alpha, -q * vj, mu, nr], -q * uj));
                out.push(rel(&[t * cert.omega], -(nu + nr) / pp + uj - vj));
            }
        }
    }
    out
}

/// Default verification points: the dilates `λe` for
/// `λ ∈ {1/4, 1/2, 1, 2, 4}` and three random points.
pub fn default_samples(cone: &ConeDescriptor) -> Vec<ConePoint> {
    let e = cone.identity();
    let mut out: Vec<ConePoint> = [0.25, 0.5, 1.0, 2.0, 4.0].iter().map(|&l| e.scaled(l)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xce57);
    out.extend((0..3).map(|_| cone.random_point(&mut rng)));
    out
}

/// Tube verification points: the same imaginary parts, with random real
/// parts on the random ones.
pub fn default_tube_samples(cone: &ConeDescriptor) -> Vec<TubePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7b5e);
    default_samples(cone)
        .into_iter()
        .enumerate()
        .map(|(i, y)| {
            let x = if i < 5 { vec![0.0; cone.dim()] } else { (0..cone.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect() };
            TubePoint::new(x, y)
        })
        .collect()
}

/// A Schur-type test problem on a cone: kernel and test functions given
/// in log form, source measure `Δ^{ν - n/r}(x) dx`, target measure
/// `Δ^{μ - n/r}(y) dy`.
pub struct OkikioluProblem<'k> {
    pub cone: ConeDescriptor,
    /// `ln K(y, x)` with `y` in the target and `x` in the source.
    pub ln_kernel: &'k (dyn Fn(&ConeSample<'_>, &ConeSample<'_>) -> f64 + Sync),
    pub ln_phi1: &'k (dyn Fn(&ConeSample<'_>) -> f64 + Sync),
    pub ln_phi2: &'k (dyn Fn(&ConeSample<'_>) -> f64 + Sync),
    pub t: f64,
    pub p: f64,
    pub q: f64,
    pub nu: f64,
    pub mu: f64,
    /// `Axial` promises the kernel and test functions are invariant under
    /// the automorphisms fixing `e`, so integrals at `λe` drop a dimension.
    pub symmetry: Symmetry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OkikioluReport {
    /// `C₁^{1/p′}`, or the sampled supremum `C₁` when `p = 1`.
    #[serde(rename = "M1")]
    pub m1: f64,
    /// `C₂^{1/q}`.
    #[serde(rename = "M2")]
    pub m2: f64,
    /// The implied norm bound `M₁ M₂`.
    pub bound: f64,
    /// `I₁(y)/φ₂(y)^{p′}` per sample (sup ratios when `p = 1`).
    pub ratios1: Vec<f64>,
    /// `I₂(x)/φ₁(x)^q` per sample.
    pub ratios2: Vec<f64>,
    /// Largest quadrature error estimate met.
    #[serde(with = "crate::real")]
    pub rel_err: f64,
}

impl OkikioluReport {
    /// `max/min - 1` over both ratio sets.
    pub fn spread(&self) -> f64 {
        spread(&self.ratios1).max(spread(&self.ratios2))
    }
}

fn spread(xs: &[f64]) -> f64 {
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if xs.is_empty() {
        0.0
    } else {
        hi / lo - 1.0
    }
}

/// Points `x` scanned for the supremum of the `p = 1` condition.
fn sup_grid(cone: &ConeDescriptor, samples: &[ConePoint]) -> Vec<ConePoint> {
    let e = cone.identity();
    let mut out: Vec<ConePoint> = (-60..=60).map(|k| e.scaled(2f64.powf(k as f64 / 2.0))).collect();
    for s in samples {
        out.extend((-20..=20).map(|k| s.scaled(2f64.powi(k))));
    }
    out
}

/// Numerically evaluates the two test conditions on the sample set. With
/// `p = 1` the first condition is the supremum form of the limit case.
/// Fails with the witness point when an integral diverges.
pub fn okikiolu_generic_check(prob: &OkikioluProblem<'_>, samples: &[ConePoint], cfg: &QuadratureConfig) -> Result<OkikioluReport> {
    let OkikioluProblem { cone, t, p, q, nu, mu, .. } = *prob;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Precondition(format!("t must lie in (0, 1], got {t}")));
    }
    if !(p >= 1.0 && q >= p && q.is_finite()) {
        return Err(Error::Precondition(format!("need 1 <= p <= q < inf, got p = {p}, q = {q}")));
    }
    let nr = cone.n_over_r();
    let mut rel_err: f64 = 0.0;
    let sym_at = |pt: &ConePoint| if prob.symmetry == Symmetry::Axial && on_axis(&cone, pt) { Symmetry::Axial } else { Symmetry::General };
    let points: Vec<ConeSample<'_>> = samples.iter().map(|s| ConeSample::at(&cone, s)).collect::<Result<_>>()?;

    let mut ratios1 = Vec::with_capacity(samples.len());
    if p == 1.0 {
        let grid: Vec<ConeSample<'_>> =
            sup_grid(&cone, samples).iter().map(|s| ConeSample::at(&cone, s)).collect::<Result<_>>()?;
        for y in &points {
            let sup = grid
                .iter()
                .map(|x| (prob.ln_phi1)(x) + t * (prob.ln_kernel)(y, x) - (prob.ln_phi2)(y))
                .fold(f64::NEG_INFINITY, f64::max);
            ratios1.push(sup.exp());
        }
    } else {
        let pp = conj(p);
        for (y, pt) in points.iter().zip(samples) {
            let est = integrate_cone_log(
                &cone,
                |x| t * pp * (prob.ln_kernel)(y, x) + pp * (prob.ln_phi1)(x) + (nu - nr) * x.ln_det(),
                sym_at(pt),
                cfg,
            )?;
            if est.diverging || !est.value.is_finite() {
                return Err(Error::CertificateCheck(format!("first integral diverges at y = {:?}", pt.coords())));
            }
            rel_err = rel_err.max(est.rel_err);
            ratios1.push((est.value.ln() - pp * (prob.ln_phi2)(y)).exp());
        }
    }
    let mut ratios2 = Vec::with_capacity(samples.len());
    for (x, pt) in points.iter().zip(samples) {
        let est = integrate_cone_log(
            &cone,
            |y| (1.0 - t) * q * (prob.ln_kernel)(y, x) + q * (prob.ln_phi2)(y) + (mu - nr) * y.ln_det(),
            sym_at(pt),
            cfg,
        )?;
        if est.diverging || !est.value.is_finite() {
            return Err(Error::CertificateCheck(format!("second integral diverges at x = {:?}", pt.coords())));
        }
        rel_err = rel_err.max(est.rel_err);
        ratios2.push((est.value.ln() - q * (prob.ln_phi1)(x)).exp());
    }
    let c1 = ratios1.iter().cloned().fold(0.0, f64::max);
    let c2 = ratios2.iter().cloned().fold(0.0, f64::max);
    let m1 = if p == 1.0 { c1 } else { c1.powf(1.0 / conj(p)) };
    let m2 = c2.powf(1.0 / q);
    Ok(OkikioluReport { m1, m2, bound: m1 * m2, ratios1, ratios2, rel_err })
}

fn ln_gpow(y: &ConeSample<'_>, s: &GeneralizedPower) -> f64 {
    y.ln_gpow(s)
}

fn neg(xs: &[f64]) -> GeneralizedPower {
    GeneralizedPower::new(xs.iter().map(|x| -x).collect())
}

fn constancy(report: &OkikioluReport, what: &str) -> Result<()> {
    let tol = RATIO_TOL.max(report.rel_err);
    let s = report.spread();
    if !(s <= tol) {
        return Err(Error::CertificateCheck(format!("{what}: ratio spread {s:.3e} exceeds {tol:.3e}")));
    }
    Ok(())
}

/// Checks that the certificate's integrals converge by the integral
/// lemma's criterion, before any quadrature.
fn check_convergence_s(cone: &ConeDescriptor, prm: &SParams, cert: &OkikioluCertificate) -> Result<()> {
    let SParams { alpha, beta, gamma, nu, mu, p, q } = *prm;
    let nr = cone.n_over_r();
    let r = cone.rank();
    let b = beta - nu + nr;
    let (u, v, t) = (cert.u.components(r), cert.v.components(r), cert.t);
    let ok = |s: f64, tv: Vec<f64>| {
        crate::analytic::lemma31_converges(&crate::analytic::Lemma31Query {
            cone: *cone,
            s: GeneralizedPower::scalar(s, r),
            t: GeneralizedPower::new(tv),
            v: None,
        })
    };
    if p > 1.0 {
        let pp = conj(p);
        if !ok(-t * pp * gamma, u.iter().map(|uj| t * pp * b - pp * uj + nu).collect()) {
            return Err(Error::CertificateCheck("first integral outside the convergence range".into()));
        }
    }
    if !ok(-(1.0 - t) * q * gamma, v.iter().map(|vj| (1.0 - t) * q * alpha - q * vj + mu).collect()) {
        return Err(Error::CertificateCheck("second integral outside the convergence range".into()));
    }
    Ok(())
}

/// Verifies an `S` certificate: the two integrals converge, their ratios
/// to the test functions are constant over `samples`, and the resulting
/// constants give `(M₁, M₂)`. Returns the certificate with `M1`, `M2`
/// filled in together with the raw report.
pub fn verify_certificate_s(
    cone: &ConeDescriptor,
    prm: &SParams,
    cert: &OkikioluCertificate,
    cfg: &QuadratureConfig,
    samples: &[ConePoint],
) -> Result<(OkikioluCertificate, OkikioluReport)> {
    if !matches!(cert.kind, CertificateKind::ConeS | CertificateKind::ConeSP1) {
        return Err(Error::Precondition("not a cone certificate".into()));
    }
    let worst = identity_residuals(cone, prm, cert).iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if !(worst <= IDENTITY_TOL) {
        return Err(Error::CertificateCheck(format!("exponent identities off by {worst:.2e}")));
    }
    check_convergence_s(cone, prm, cert)?;
    let SParams { alpha, beta, gamma, nu, mu, p, q } = *prm;
    let nr = cone.n_over_r();
    let r = cone.rank();
    let b = beta - nu + nr;
    let (u, v) = (neg(&cert.u.components(r)), neg(&cert.v.components(r)));
    let kernel = |y: &ConeSample<'_>, x: &ConeSample<'_>| alpha * y.ln_det() - gamma * y.ln_det_sum(x) + b * x.ln_det();
    let phi1 = |x: &ConeSample<'_>| ln_gpow(x, &u);
    let phi2 = |y: &ConeSample<'_>| ln_gpow(y, &v);
    let prob = OkikioluProblem {
        cone: *cone,
        ln_kernel: &kernel,
        ln_phi1: &phi1,
        ln_phi2: &phi2,
        t: cert.t,
        p,
        q,
        nu,
        mu,
        symmetry: if cert.u.is_scalar() { Symmetry::Axial } else { Symmetry::General },
    };
    let report = okikiolu_generic_check(&prob, samples, cfg)?;
    if p > 1.0 {
        constancy(&report, "S certificate")?;
    } else {
        let only2 = OkikioluReport { ratios1: vec![], ..report.clone() };
        constancy(&only2, "S certificate")?;
    }
    let done = OkikioluCertificate { m1: Some(report.m1), m2: Some(report.m2), ..cert.clone() };
    Ok((done, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderBound {
    /// `C` with `sup |Sg| ≤ C ‖g‖_{p,ν}`.
    pub constant: f64,
    /// The bound evaluated at each sample point.
    pub values: Vec<f64>,
    #[serde(with = "crate::real")]
    pub rel_err: f64,
}

/// The `L^∞` target case: by Hölder's inequality
/// `|Sg(y)| ≤ Δ^α(y) (∫ Δ^{-p′γ}(y+x) Δ^{p′(β-ν+n/r)+ν-n/r}(x) dx)^{1/p′} ‖g‖`,
/// and the right side does not depend on `y`.
pub fn holder_bound_s_infty(
    cone: &ConeDescriptor,
    prm: &SParams,
    cfg: &QuadratureConfig,
    samples: &[ConePoint],
) -> Result<HolderBound> {
    let verdict = decide_s(cone, prm);
    if verdict.status != VerdictStatus::Bounded || verdict.theorem != "2.3" {
        return Err(Error::Precondition(format!("needs a Bounded q = inf verdict, got {} ({})", verdict.status, verdict.theorem)));
    }
    let SParams { alpha, beta, gamma, nu, p, .. } = *prm;
    let nr = cone.n_over_r();
    let pp = conj(p);
    let query = crate::analytic::Lemma31Query::scalar(*cone, -pp * gamma, pp * (beta - nu + nr) + nu);
    if !crate::analytic::lemma31_converges(&query) {
        return Err(Error::Divergent("inner Hölder integral".into()));
    }
    let mut values = Vec::with_capacity(samples.len());
    let mut rel_err: f64 = 0.0;
    for y in samples {
        let est = crate::analytic::lemma31_integral(&query.clone().at(y.clone()), cfg)?;
        if est.diverging {
            return Err(Error::Divergent(format!("inner Hölder integral at {:?}", y.coords())));
        }
        rel_err = rel_err.max(est.rel_err);
        values.push((alpha * cone.determinant(y)?.ln() + est.value.ln() / pp).exp());
    }
    let s = spread(&values);
    let tol = RATIO_TOL.max(rel_err);
    if !(s <= tol) {
        return Err(Error::CertificateCheck(format!("Hölder bound varies by {s:.3e}")));
    }
    Ok(HolderBound { constant: values.iter().cloned().fold(0.0, f64::max), values, rel_err })
}

/// Exponents `(A, b)` of `J = ∫ |Δ^{-A}((z - w̄)/i)| Δ^{b - n/r}(Im w) dV(w)`
/// for the two tube conditions.
fn tube_exponents(cone: &ConeDescriptor, prm: &SParams, cert: &OkikioluCertificate) -> [(f64, f64); 2] {
    let SParams { alpha, beta, gamma, nu, mu, p, q } = *prm;
    let nr = cone.n_over_r();
    let pp = conj(p);
    let (u, v, t) = (cert.u.components(1)[0], cert.v.components(1)[0], cert.t);
    let b = beta - nu + nr;
    [
        (t * pp * (gamma + nr), t * pp * b - pp * u + nu),
        ((1.0 - t) * q * (gamma + nr), (1.0 - t) * q * alpha - q * v + mu),
    ]
}

/// Verifies a tube certificate through the two integrals `J₁`, `J₂` over
/// the tube. Needs `n ≤ 3`; practical on the half-plane.
pub fn verify_certificate_tplus(
    cone: &ConeDescriptor,
    prm: &SParams,
    cert: &OkikioluCertificate,
    cfg: &QuadratureConfig,
    samples: &[TubePoint],
) -> Result<(OkikioluCertificate, OkikioluReport)> {
    if cert.kind != CertificateKind::TubeTplus || !cert.u.is_scalar() {
        return Err(Error::Precondition("not a scalar tube certificate".into()));
    }
    let worst = identity_residuals(cone, prm, cert).iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if !(worst <= IDENTITY_TOL) {
        return Err(Error::CertificateCheck(format!("exponent identities off by {worst:.2e}")));
    }
    let nr = cone.n_over_r();
    let k = nr - 1.0;
    let exps = tube_exponents(cone, prm, cert);
    for (i, &(a, b)) in exps.iter().enumerate() {
        if !(b > k && b - a < -2.0 * nr + 1.0) {
            return Err(Error::CertificateCheck(format!("J{} outside the convergence range", i + 1)));
        }
    }
    let SParams { alpha, beta, nu, p, q, .. } = *prm;
    let pp = conj(p);
    let (u, v, t) = (cert.u.components(1)[0], cert.v.components(1)[0], cert.t);
    let weights = [t * pp * alpha, (1.0 - t) * q * (beta - nu + nr)];
    let phis = [pp * v, q * u];
    let mut ratios = [Vec::new(), Vec::new()];
    let mut rel_err: f64 = 0.0;
    for z in samples {
        let sym = if cone.dim() > 1 && on_axis(cone, &z.y) { Symmetry::Axial } else { Symmetry::General };
        let ln_det = cone.determinant(&z.y)?.ln();
        for i in 0..2 {
            let (a, b) = exps[i];
            let est = mixed_norm_power(cone, |w| -a * w.ln_abs_det_minus_conj(z), 1.0, 1.0, b, sym, cfg)?;
            if est.diverging || !est.value.is_finite() {
                return Err(Error::CertificateCheck(format!("J{} diverges at {:?}", i + 1, z)));
            }
            rel_err = rel_err.max(est.rel_err);
            ratios[i].push(((weights[i] + phis[i]) * ln_det + est.value.ln()).exp());
        }
    }
    let [ratios1, ratios2] = ratios;
    let c1 = ratios1.iter().cloned().fold(0.0, f64::max);
    let c2 = ratios2.iter().cloned().fold(0.0, f64::max);
    let (m1, m2) = (c1.powf(1.0 / pp), c2.powf(1.0 / q));
    let report = OkikioluReport { m1, m2, bound: m1 * m2, ratios1, ratios2, rel_err };
    let tol = 0.02f64.max(rel_err);
    if !(report.spread() <= tol) {
        return Err(Error::CertificateCheck(format!("tube ratio spread {:.3e} exceeds {tol:.3e}", report.spread())));
    }
    let done = OkikioluCertificate { m1: Some(m1), m2: Some(m2), ..cert.clone() };
    Ok((done, report))
}
