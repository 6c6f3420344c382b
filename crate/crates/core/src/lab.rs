//! Numerical experiments: `S` and `T⁺` applied to concrete functions,
//! empirical norm ratios, the necessity probes behind the sharp
//! conditions, and phase-diagram scans.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{lemma31_converges, on_axis, Lemma31Query};
use crate::cone::{ConeDescriptor, ConePoint, TubePoint};
use crate::decision::{decide_pplus_mixed, decide_s, decide_tplus_mixed, Criterion, SParams, TParams, Verdict, VerdictStatus};
use crate::error::{Error, Result};
use crate::par::map_collect;
use crate::quadrature::rules::gauss_legendre;
use crate::quadrature::{integrate_cone_log, BallNodes, BallRule, ConeSample, QuadratureConfig, Shift, Symmetry};

/// A nonnegative function on the cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// Indicator of a Euclidean ball (Frobenius on SPD) inside the cone.
    ConeBallIndicator { center: ConePoint, radius: f64 },
    /// `Δ^{-a}(x + shift)`.
    DetPower { a: f64, shift: ConePoint },
    /// `x ↦ base(R x)`.
    Dilate { base: Box<TestFunction>, r: f64 },
    /// Nonnegative combination. Balls in a mixture must be disjoint or equal.
    Mixture { parts: Vec<TestFunction>, weights: Vec<f64> },
}

/// One weighted building block after dilations are pushed down.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub weight: f64,
    pub kind: AtomKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AtomKind {
    Ball { center: ConePoint, radius: f64 },
    Power { a: f64, shift: ConePoint },
}

impl TestFunction {
    pub fn ball(center: ConePoint, radius: f64) -> Self {
        TestFunction::ConeBallIndicator { center, radius }
    }

    pub fn power(a: f64, shift: ConePoint) -> Self {
        TestFunction::DetPower { a, shift }
    }

    pub fn dilate(self, r: f64) -> Self {
        TestFunction::Dilate { base: Box::new(self), r }
    }

    pub fn mixture(parts: Vec<TestFunction>, weights: Vec<f64>) -> Self {
        TestFunction::Mixture { parts, weights }
    }

    /// Flattens to weighted atoms. `χ_B(c,ρ)(Rx) = χ_B(c/R,ρ/R)(x)` and
    /// `Δ^{-a}(Rx + s) = R^{-ra} Δ^{-a}(x + s/R)`.
    pub fn atoms(&self, cone: &ConeDescriptor) -> Result<Vec<Atom>> {
        let mut out = Vec::new();
        self.push_atoms(cone, 1.0, 1.0, &mut out)?;
        Ok(out)
    }

    fn push_atoms(&self, cone: &ConeDescriptor, weight: f64, dil: f64, out: &mut Vec<Atom>) -> Result<()> {
        match self {
            TestFunction::ConeBallIndicator { center, radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::Precondition("ball radius must be positive".into()));
                }
                out.push(Atom { weight, kind: AtomKind::Ball { center: center.scaled(1.0 / dil), radius: radius / dil } });
            }
            TestFunction::DetPower { a, shift } => {
                let w = weight * dil.powf(-(cone.rank() as f64) * a);
                out.push(Atom { weight: w, kind: AtomKind::Power { a: *a, shift: shift.scaled(1.0 / dil) } });
            }
            TestFunction::Dilate { base, r } => {
                if !(*r > 0.0 && r.is_finite()) {
                    return Err(Error::Precondition(format!("dilation factor must be positive, got {r}")));
                }
                base.push_atoms(cone, weight, dil * r, out)?;
            }
            TestFunction::Mixture { parts, weights } => {
                if parts.len() != weights.len() {
                    return Err(Error::Precondition("mixture needs one weight per part".into()));
                }
                for (part, w) in parts.iter().zip(weights) {
                    if !(*w >= 0.0 && w.is_finite()) {
                        return Err(Error::Precondition("mixture weights must be nonnegative".into()));
                    }
                    part.push_atoms(cone, weight * w, dil, out)?;
                }
            }
        }
        Ok(())
    }

    /// Pointwise value.
    pub fn eval(&self, cone: &ConeDescriptor, x: &ConePoint) -> Result<f64> {
        let det_sum = |s: &ConePoint| cone.determinant(&x.add(s));
        let mut acc = 0.0;
        for atom in self.atoms(cone)? {
            acc += atom.weight
                * match &atom.kind {
                    AtomKind::Ball { center, radius } => {
                        let d: Vec<f64> = x.coords().iter().zip(center.coords()).map(|(a, b)| a - b).collect();
                        if cone.norm(&d) < *radius {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    AtomKind::Power { a, shift } => det_sum(shift)?.powf(-a),
                };
        }
        Ok(acc)
    }
}

/// Atoms laid out for quadrature: ball rules built once, shifts with
/// their determinants.
struct Prepared<'c> {
    cone: &'c ConeDescriptor,
    balls: Vec<(f64, BallNodes)>,
    /// `(ln weight, a, shift)`.
    powers: Vec<(f64, f64, Shift)>,
    axial: bool,
}

impl<'c> Prepared<'c> {
    fn new(cone: &'c ConeDescriptor, g: &TestFunction, rule: BallRule) -> Result<Self> {
        let mut balls: Vec<(f64, ConePoint, f64)> = Vec::new();
        let mut powers = Vec::new();
        let mut axial = true;
        for atom in g.atoms(cone)? {
            if atom.weight == 0.0 {
                continue;
            }
            match atom.kind {
                AtomKind::Ball { center, radius } => {
                    axial &= on_axis(cone, &center);
                    if let Some(b) = balls.iter_mut().find(|b| b.1 == center && b.2 == radius) {
                        b.0 += atom.weight;
                        continue;
                    }
                    for (_, c, r) in &balls {
                        let d: Vec<f64> = c.coords().iter().zip(center.coords()).map(|(a, b)| a - b).collect();
                        if cone.norm(&d) < r + radius {
                            return Err(Error::Precondition("balls in a mixture must be disjoint".into()));
                        }
                    }
                    balls.push((atom.weight, center, radius));
                }
                AtomKind::Power { a, shift } => {
                    axial &= on_axis(cone, &shift);
                    powers.push((atom.weight.ln(), a, Shift::new(cone, &shift)?));
                }
            }
        }
        let balls = balls
            .into_iter()
            .map(|(w, c, r)| Ok((w, BallNodes::new(cone, &c, r, rule)?)))
            .collect::<Result<_>>()?;
        Ok(Prepared { cone, balls, powers, axial })
    }

    fn symmetry_at(&self, y: Option<&ConePoint>) -> Symmetry {
        if self.axial && y.is_none_or(|y| on_axis(self.cone, y)) {
            Symmetry::Axial
        } else {
            Symmetry::General
        }
    }

    /// ln of the smooth part `h`.
    fn ln_h(&self, x: &ConeSample<'_>) -> f64 {
        let terms: Vec<f64> = self.powers.iter().map(|(lw, a, s)| lw - a * x.ln_det_plus(s)).collect();
        log_sum_exp(&terms)
    }

    /// `∫ g^p Δ^{ν - n/r}`, using
    /// `∫ h^p + Σ_B ∫_B [(w_B + h)^p - h^p]` with `h` the smooth part.
    fn norm_power(&self, p: f64, nu: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let sh = nu - self.cone.n_over_r();
        let mut total = 0.0;
        if !self.powers.is_empty() {
            let est = integrate_cone_log(self.cone, |x| p * self.ln_h(x) + sh * x.ln_det(), self.symmetry_at(None), cfg)?;
            if est.diverging || !est.value.is_finite() {
                return Err(Error::Divergent(format!("test function is not in L^{p}_{nu}")));
            }
            total += est.value;
        }
        for (w, nodes) in &self.balls {
            total += nodes.sum(self.cone, |x| {
                let h = self.ln_h(x).exp();
                ((w + h).powf(p) - h.powf(p)) * (sh * x.ln_det()).exp()
            });
        }
        Ok(total)
    }

    fn ln_apply_s(&self, prm: &SParams, y: &ConeSample<'_>, cfg: &QuadratureConfig) -> Result<f64> {
        let SParams { alpha, beta, gamma, .. } = *prm;
        let ys = Shift::of(y);
        let mut acc = 0.0;
        for (w, nodes) in &self.balls {
            acc += w * nodes.sum(self.cone, |x| (-gamma * x.ln_det_plus(&ys) + beta * x.ln_det()).exp());
        }
        if !self.powers.is_empty() {
            let sym = self.symmetry_at(Some(&y.point()));
            for (lw, a, s) in &self.powers {
                // for y far out the integrand grows until x reaches y, which
                // the window heuristic reads as divergence; the exponents decide
                let nr = self.cone.n_over_r();
                let ok = lemma31_converges(&Lemma31Query::scalar(*self.cone, -a - gamma, beta + nr));
                let est = integrate_cone_log(
                    self.cone,
                    |x| lw - a * x.ln_det_plus(s) - gamma * x.ln_det_plus(&ys) + beta * x.ln_det(),
                    sym,
                    cfg,
                )?;
                if !ok || !est.value.is_finite() {
                    return Err(Error::Divergent("Sg(y) integral".into()));
                }
                acc += est.value;
            }
        }
        Ok(alpha * y.ln_det() + acc.ln())
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `Sg(y) = Δ^α(y) ∫ Δ^{-γ}(y + x) g(x) Δ^β(x) dx`.
pub fn apply_s(cone: &ConeDescriptor, prm: &SParams, g: &TestFunction, y: &ConePoint, cfg: &QuadratureConfig) -> Result<f64> {
    let prep = Prepared::new(cone, g, BallRule::default())?;
    Ok(prep.ln_apply_s(prm, &ConeSample::at(cone, y)?, cfg)?.exp())
}

/// `‖g‖_{p,ν}`.
pub fn norm_p(cone: &ConeDescriptor, g: &TestFunction, p: f64, nu: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(Prepared::new(cone, g, BallRule::default())?.norm_power(p, nu, cfg)?.powf(1.0 / p))
}

/// Dilates `2^{k/4} e`, `|k| ≤ 400`, scanned for suprema.
fn sup_points(cone: &ConeDescriptor) -> Vec<ConePoint> {
    let e = cone.identity();
    (-400..=400).map(|k| e.scaled(2f64.powf(k as f64 / 4.0))).collect()
}

/// `‖Sg‖_{q,μ}`; the supremum over dilates of `e` when `q = ∞`.
pub fn image_norm_s(cone: &ConeDescriptor, prm: &SParams, g: &TestFunction, cfg: &QuadratureConfig) -> Result<f64> {
    let prep = Prepared::new(cone, g, BallRule::default())?;
    image_norm_prepared(&prep, prm, cfg)
}

fn image_norm_prepared(prep: &Prepared<'_>, prm: &SParams, cfg: &QuadratureConfig) -> Result<f64> {
    let cone = prep.cone;
    let q = prm.q;
    if q.is_infinite() {
        let mut sup = f64::NEG_INFINITY;
        for y in sup_points(cone) {
            sup = sup.max(prep.ln_apply_s(prm, &ConeSample::at(cone, &y)?, cfg)?);
        }
        return Ok(sup.exp());
    }
    let sh = prm.mu - cone.n_over_r();
    let est = integrate_cone_log(
        cone,
        |y| match prep.ln_apply_s(prm, y, cfg) {
            Ok(l) => q * l + sh * y.ln_det(),
            Err(_) => f64::INFINITY,
        },
        prep.symmetry_at(None),
        cfg,
    )?;
    if est.diverging || !est.value.is_finite() {
        return Err(Error::Divergent(format!("Sg is not in L^{q}_{}", prm.mu)));
    }
    Ok(est.value.powf(1.0 / q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormPair {
    /// `‖g‖_{p,ν}`.
    pub input: f64,
    /// `‖Sg‖_{q,μ}`.
    pub output: f64,
}

impl NormPair {
    pub fn ratio(&self) -> f64 {
        self.output / self.input
    }
}

/// Both norms of `g ↦ Sg`.
pub fn norms_s(cone: &ConeDescriptor, prm: &SParams, g: &TestFunction, cfg: &QuadratureConfig) -> Result<NormPair> {
    let prep = Prepared::new(cone, g, BallRule::default())?;
    let input = prep.norm_power(prm.p, prm.nu, cfg)?.powf(1.0 / prm.p);
    let output = image_norm_prepared(&prep, prm, cfg)?;
    Ok(NormPair { input, output })
}

/// Exponent `e` with `‖S f_R‖/‖f_R‖ = R^e ‖Sf‖/‖f‖`, `f_R = f(R·)`:
/// `e = -n + r(γ - β - α - μ/q + ν/p)`, zero exactly under homogeneity.
pub fn scaling_exponent(cone: &ConeDescriptor, prm: &SParams) -> f64 {
    let SParams { alpha, beta, gamma, nu, mu, p, q } = *prm;
    -(cone.dim() as f64) + cone.rank() as f64 * (gamma - beta - alpha - mu / q + nu / p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationReport {
    pub radii: Vec<f64>,
    /// `ln(‖S f_R‖_{q,μ} / ‖f_R‖_{p,ν})`.
    pub ln_ratios: Vec<f64>,
    /// `ln ‖f_R‖_{p,ν}`.
    pub ln_input_norms: Vec<f64>,
    /// Fitted slope of the log ratio against `ln R`.
    pub slope: f64,
    /// Fitted slope of the input norm, `-rν/p` in theory.
    pub norm_slope: f64,
    /// What the scaling law predicts for `slope`.
    pub expected_slope: f64,
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Fits the growth of `‖S f_R‖/‖f_R‖` in `R`.
pub fn dilation_probe(cone: &ConeDescriptor, prm: &SParams, f: &TestFunction, rs: &[f64], cfg: &QuadratureConfig) -> Result<DilationReport> {
    if rs.len() < 2 {
        return Err(Error::Precondition("dilation probe needs at least two radii".into()));
    }
    let mut ln_ratios = Vec::with_capacity(rs.len());
    let mut ln_input_norms = Vec::with_capacity(rs.len());
    for &r in rs {
        let n = norms_s(cone, prm, &f.clone().dilate(r), cfg)?;
        ln_ratios.push(n.output.ln() - n.input.ln());
        ln_input_norms.push(n.input.ln());
    }
    let ln_r: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    Ok(DilationReport {
        radii: rs.to_vec(),
        slope: fit_slope(&ln_r, &ln_ratios),
        norm_slope: fit_slope(&ln_r, &ln_input_norms),
        expected_slope: scaling_exponent(cone, prm),
        ln_ratios,
        ln_input_norms,
    })
}

/// The probe function `χ_{B(e, 1/2)}`.
pub fn unit_ball(cone: &ConeDescriptor) -> TestFunction {
    TestFunction::ball(cone.identity(), 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// `∫ Δ^{a - n/r}(y) Δ^{-b}(y + e) dy < ∞`.
    Integral,
    /// `sup Δ^a(y) Δ^{-b}(y + e) < ∞`, the endpoint analog.
    Supremum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub kind: ProbeKind,
    pub a: f64,
    pub b: f64,
    pub converges: bool,
    /// Integral estimate, or the sampled supremum.
    #[serde(with = "crate::real")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessityReport {
    /// Membership of `S χ_{B(e,1)} ≍ Δ^α Δ^{-γ}(· + e)` in the target space.
    pub direct: ProbeOutcome,
    /// Membership of `S* χ_{B(e,1)}` in the dual of the source space.
    pub adjoint: ProbeOutcome,
}

impl NecessityReport {
    pub fn both_converge(&self) -> bool {
        self.direct.converges && self.adjoint.converges
    }
}

/// `∫ Δ^{a - n/r}(y) Δ^{-b}(y + e) dy`, with divergence detection.
pub fn probe_integral(cone: &ConeDescriptor, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<ProbeOutcome> {
    let e = Shift::identity(cone);
    let sh = a - cone.n_over_r();
    let est = integrate_cone_log(cone, |y| sh * y.ln_det() - b * y.ln_det_plus(&e), Symmetry::Axial, cfg)?;
    Ok(ProbeOutcome {
        kind: ProbeKind::Integral,
        a,
        b,
        converges: !est.diverging && est.value.is_finite(),
        value: est.value,
    })
}

/// `sup Δ^a(y) Δ^{-b}(y + e)` over dilates of `e`; unbounded when the far
/// ends exceed the central values by more than a factor 10.
pub fn probe_sup(cone: &ConeDescriptor, a: f64, b: f64) -> Result<ProbeOutcome> {
    let e = cone.identity();
    let vals: Vec<f64> = sup_points(cone)
        .iter()
        .map(|y| Ok(a * cone.determinant(y)?.ln() - b * cone.determinant(&y.add(&e))?.ln()))
        .collect::<Result<_>>()?;
    let mid = vals.len() / 2;
    let center = vals[mid - 8..=mid + 8].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let all = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(ProbeOutcome { kind: ProbeKind::Supremum, a, b, converges: all <= center + 10f64.ln(), value: all.exp() })
}

/// The two necessity integrals for `S`: the image of a ball indicator must
/// lie in `L^q_μ`, and the adjoint image in `L^{p′}_ν`'s dual weight.
pub fn necessity_probe_s(cone: &ConeDescriptor, prm: &SParams, cfg: &QuadratureConfig) -> Result<NecessityReport> {
    let SParams { alpha, beta, gamma, nu, mu, p, q } = *prm;
    let nr = cone.n_over_r();
    let direct = if q.is_finite() {
        probe_integral(cone, q * alpha + mu, q * gamma, cfg)?
    } else {
        probe_sup(cone, alpha, gamma)?
    };
    let adjoint = if p > 1.0 {
        let pp = p / (p - 1.0);
        probe_integral(cone, (beta - nu + nr) * pp + nu, pp * gamma, cfg)?
    } else {
        probe_sup(cone, beta - nu + nr, gamma)?
    };
    Ok(NecessityReport { direct, adjoint })
}

/// Largest `‖Sg‖/‖g‖` over a family; infinite if some image diverges.
pub fn norm_lower_bound(cone: &ConeDescriptor, prm: &SParams, family: &[TestFunction], cfg: &QuadratureConfig) -> Result<f64> {
    let mut best: f64 = 0.0;
    for g in family {
        match norms_s(cone, prm, g, cfg) {
            Ok(n) => best = best.max(n.ratio()),
            Err(Error::Divergent(_)) => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

/// Ball indicators at three scales, the family used by scans.
pub fn default_family(cone: &ConeDescriptor) -> Vec<TestFunction> {
    [0.5, 1.0, 2.0].iter().map(|&r| unit_ball(cone).dilate(r)).collect()
}

/// A random mixture of one to three disjoint balls centered on the axis,
/// optionally plus `Δ^{-a}(· + λe)`. Axial centers keep the norm
/// integrals cheap on rank-two cones.
pub fn random_test_function<R: Rng + ?Sized>(cone: &ConeDescriptor, rng: &mut R, power: Option<f64>) -> TestFunction {
    let e = cone.identity();
    let bd = cone.boundary_distance(&e).unwrap_or(0.5);
    let mut scales = vec![0.5, 1.0, 2.0, 4.0];
    let count = rng.gen_range(1..=3);
    let mut parts = Vec::new();
    let mut weights = Vec::new();
    for _ in 0..count {
        let lam = scales.remove(rng.gen_range(0..scales.len()));
        parts.push(TestFunction::ball(e.scaled(lam), lam * bd * rng.gen_range(0.1..0.3)));
        weights.push(rng.gen_range(0.2..2.0));
    }
    if let Some(a) = power {
        parts.push(TestFunction::power(a, e.scaled(rng.gen_range(0.5..2.0))));
        weights.push(rng.gen_range(0.2..2.0));
    }
    TestFunction::mixture(parts, weights)
}

/// Indicator of `{x + iy : |x_k - c_k| ≤ h, y ∈ B(c_y, ρ)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeBox {
    pub center: TubePoint,
    pub half_width: f64,
    pub radius: f64,
}

/// `T⁺f(z) = Δ^α(Im z) ∫ |Δ^{-γ-n/r}((z - w̄)/i)| f(w) Δ^β(Im w) dV(w)`
/// with the kernel constant set to 1.
pub fn apply_tplus(cone: &ConeDescriptor, prm: &TParams, f: &TubeBox, z: &TubePoint, rule: BallRule) -> Result<f64> {
    let n = cone.dim();
    if n > 3 {
        return Err(Error::Unsupported(format!("tube operators need n <= 3, got {n}")));
    }
    let TParams { alpha, beta, gamma, .. } = *prm;
    let nodes = BallNodes::new(cone, &f.center.y, f.radius, rule)?;
    let line: Vec<(f64, f64)> =
        gauss_legendre(2 * rule.radial).into_iter().map(|(t, w)| (f.half_width * t, f.half_width * w)).collect();
    let mut grid: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for k in 0..n {
        grid = grid
            .into_iter()
            .flat_map(|(x, w)| line.iter().map(move |&(t, wt)| {
                let mut x = x.clone();
                x.push(f.center.x[k] + t);
                (x, w * wt)
            }))
            .collect();
    }
    let power = gamma + cone.n_over_r();
    let y = z.y.coords();
    let failed = std::cell::RefCell::new(None);
    let total = nodes.sum(cone, |v| {
        let vc = v.coords();
        let mut acc = 0.0;
        for (u, wu) in &grid {
            let mut zk = Vec::with_capacity(n);
            for k in 0..n {
                zk.push(Complex64::new(y[k] + vc[k], -(z.x[k] - u[k])));
            }
            match cone.holomorphic_det(&zk) {
                Ok(d) => acc += wu * (-power * d.norm().ln()).exp(),
                Err(e) => *failed.borrow_mut() = Some(e),
            }
        }
        acc * (beta * v.ln_det()).exp()
    });
    if let Some(e) = failed.into_inner() {
        return Err(e);
    }
    Ok(cone.determinant(&z.y)?.powf(alpha) * total)
}

/// A scan axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Alpha,
    Beta,
    Gamma,
    Nu,
    Mu,
    P,
    Q,
    S,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::Alpha => "alpha",
            Axis::Beta => "beta",
            Axis::Gamma => "gamma",
            Axis::Nu => "nu",
            Axis::Mu => "mu",
            Axis::P => "p",
            Axis::Q => "q",
            Axis::S => "s",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "alpha" => Axis::Alpha,
            "beta" => Axis::Beta,
            "gamma" => Axis::Gamma,
            "nu" => Axis::Nu,
            "mu" => Axis::Mu,
            "p" => Axis::P,
            "q" => Axis::Q,
            "s" => Axis::S,
            other => return Err(Error::Parse(format!("unknown axis {other:?}"))),
        })
    }
}

/// Which decision a scan runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanOperator {
    S,
    /// `T⁺` between mixed-norm spaces.
    Tplus,
    /// The positive Bergman projection between mixed-norm spaces.
    Pplus,
}

impl FromStr for ScanOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "S" | "s" => Ok(ScanOperator::S),
            "T+" | "Tplus" | "tplus" => Ok(ScanOperator::Tplus),
            "P+" | "Pplus" | "pplus" => Ok(ScanOperator::Pplus),
            other => Err(Error::Parse(format!("unknown operator {other:?}"))),
        }
    }
}

/// A full parameter point; each operator reads the fields it needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub nu: f64,
    pub mu: f64,
    #[serde(with = "crate::real")]
    pub p: f64,
    #[serde(with = "crate::real")]
    pub q: f64,
    #[serde(with = "crate::real")]
    pub s: f64,
}

impl ScanPoint {
    pub fn set(&mut self, axis: Axis, v: f64) {
        *match axis {
            Axis::Alpha => &mut self.alpha,
            Axis::Beta => &mut self.beta,
            Axis::Gamma => &mut self.gamma,
            Axis::Nu => &mut self.nu,
            Axis::Mu => &mut self.mu,
            Axis::P => &mut self.p,
            Axis::Q => &mut self.q,
            Axis::S => &mut self.s,
        } = v;
    }

    pub fn s_params(&self) -> SParams {
        SParams { alpha: self.alpha, beta: self.beta, gamma: self.gamma, nu: self.nu, mu: self.mu, p: self.p, q: self.q }
    }

    pub fn t_params(&self) -> TParams {
        TParams {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            nu: self.nu,
            mu: self.mu,
            p: self.p,
            q: self.q,
            s: self.s,
        }
    }

    pub fn decide(&self, cone: &ConeDescriptor, op: ScanOperator) -> Verdict {
        match op {
            ScanOperator::S => decide_s(cone, &self.s_params()),
            ScanOperator::Tplus => decide_tplus_mixed(cone, &self.t_params()),
            ScanOperator::Pplus => decide_pplus_mixed(cone, self.nu, self.mu, self.p, self.q, self.s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub operator: ScanOperator,
    pub axes: [Axis; 2],
    pub grid1: Vec<f64>,
    pub grid2: Vec<f64>,
    /// `[i][j]` is the cell at `(grid1[i], grid2[j])`.
    pub statuses: Vec<Vec<VerdictStatus>>,
    pub violated: Vec<Vec<Vec<Criterion>>>,
    /// Norm lower bound when requested for `S`; infinite on divergence.
    #[serde(with = "opt_real_grid")]
    pub indicator: Vec<Vec<Option<f64>>>,
}

mod opt_real_grid {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::real::Real;

    pub fn serialize<S: Serializer>(g: &[Vec<Option<f64>>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Option<Real>>> = g.iter().map(|r| r.iter().map(|c| c.map(Real)).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Option<f64>>>, D::Error> {
        let rows: Vec<Vec<Option<Real>>> = Vec::deserialize(d)?;
        Ok(rows.into_iter().map(|r| r.into_iter().map(|c| c.map(|x| x.0)).collect()).collect())
    }
}

impl ScanReport {
    pub fn rows(&self) -> usize {
        self.grid1.len() * self.grid2.len()
    }

    /// `axis1,axis2,status,violated,indicator`, one row per cell with
    /// `axis1` outermost; violated conditions are `;`-separated.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["axis1", "axis2", "status", "violated", "indicator"]).map_err(io)?;
        for (i, a) in self.grid1.iter().enumerate() {
            for (j, b) in self.grid2.iter().enumerate() {
                let violated: Vec<&str> = self.violated[i][j].iter().map(|c| c.as_str()).collect();
                let ind = self.indicator[i][j].map(|x| x.to_string()).unwrap_or_default();
                w.write_record([a.to_string(), b.to_string(), self.statuses[i][j].to_string(), violated.join(";"), ind])
                    .map_err(io)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `n` evenly spaced values from `a` to `b`; `[a]` when `n = 1`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Decides every cell of a two-parameter grid. With `indicator` set and
/// operator `S`, each in-scope cell also gets the norm lower bound over
/// [`default_family`].
pub fn scan_phase_diagram(
    cone: &ConeDescriptor,
    op: ScanOperator,
    base: &ScanPoint,
    axes: [Axis; 2],
    grid1: &[f64],
    grid2: &[f64],
    indicator: Option<&QuadratureConfig>,
) -> Result<ScanReport> {
    if axes[0] == axes[1] {
        return Err(Error::Precondition("scan axes must differ".into()));
    }
    if grid1.is_empty() || grid2.is_empty() {
        return Err(Error::Precondition("scan grids must be nonempty".into()));
    }
    let cells: Vec<(usize, usize)> = (0..grid1.len()).flat_map(|i| (0..grid2.len()).map(move |j| (i, j))).collect();
    let family = default_family(cone);
    let results = map_collect(&cells, |&(i, j)| {
        let mut pt = *base;
        pt.set(axes[0], grid1[i]);
        pt.set(axes[1], grid2[j]);
        let v = pt.decide(cone, op);
        let ind = match (indicator, op) {
            (Some(cfg), ScanOperator::S) if v.status != VerdictStatus::ScopeError => {
                Some(norm_lower_bound(cone, &pt.s_params(), &family, cfg).unwrap_or(f64::NAN))
            }
            _ => None,
        };
        (v.status, v.violated, ind)
    });
    let mut statuses = vec![Vec::with_capacity(grid2.len()); grid1.len()];
    let mut violated = vec![Vec::with_capacity(grid2.len()); grid1.len()];
    let mut ind = vec![Vec::with_capacity(grid2.len()); grid1.len()];
    for ((i, _), (s, v, x)) in cells.iter().zip(results) {
        statuses[*i].push(s);
        violated[*i].push(v);
        ind[*i].push(x);
    }
    Ok(ScanReport { operator: op, axes, grid1: grid1.to_vec(), grid2: grid2.to_vec(), statuses, violated, indicator: ind })
}
