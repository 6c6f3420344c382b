//! Cone rules.
//!
//! Lorentz-type points are parametrized by null coordinates
//! `a = y₁ + ρ`, `b = y₁ - ρ = a w` with `w ∈ (0, 1)`, so that
//! `Δ(y) = a² w` exactly and the boundary `Δ = 0` is the edge `w → 0` of
//! the unit rule. `dy₁ dρ = (a/2) da dw`. SPD(2) goes through the linear
//! identification with Λ₃, which preserves Δ and has Jacobian 2.

use std::f64::consts::{LN_2, PI};

use super::rules::{self, Node};
use super::{mc, refine, Buckets, QuadratureConfig, QuadratureEstimate, Symmetry};
use crate::cone::{ConeDescriptor, ConeKind, ConePoint, GeneralizedPower};
use crate::error::{Error, Result};
use crate::par::map_collect;
use crate::special::ln_gamma;

pub(crate) const MAX_DIM: usize = 6;

/// A point fixed once and added to many quadrature nodes, e.g. the `v` in
/// `Δ(y + v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Shift {
    coords: Vec<f64>,
    det: f64,
}

impl Shift {
    pub fn new(cone: &ConeDescriptor, v: &ConePoint) -> Result<Shift> {
        if !cone.contains(v)? {
            return Err(Error::NotInCone);
        }
        Ok(Shift { coords: v.coords().to_vec(), det: cone.determinant(v)? })
    }

    /// Reuses the accurate determinant of a quadrature node.
    pub(crate) fn of(s: &ConeSample<'_>) -> Shift {
        Shift { coords: s.coords().to_vec(), det: s.det }
    }

    pub fn identity(cone: &ConeDescriptor) -> Shift {
        Shift { coords: cone.identity().coords().to_vec(), det: 1.0 }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn det(&self) -> f64 {
        self.det
    }
}

/// One quadrature node on the cone, with an accurate determinant.
#[derive(Debug, Clone)]
pub struct ConeSample<'a> {
    cone: &'a ConeDescriptor,
    buf: [f64; MAX_DIM],
    det: f64,
    ln_det: f64,
    /// Δ₁(y) when the rule knows it more accurately than the coordinates.
    minor1: Option<f64>,
}

impl<'a> ConeSample<'a> {
    pub(crate) fn new(cone: &'a ConeDescriptor, coords: &[f64], ln_det: f64) -> Self {
        let mut buf = [0.0; MAX_DIM];
        buf[..coords.len()].copy_from_slice(coords);
        ConeSample { cone, buf, det: ln_det.exp(), ln_det, minor1: None }
    }

    pub(crate) fn with_minor1(mut self, m: f64) -> Self {
        self.minor1 = Some(m);
        self
    }

    fn minor(&self, j: usize) -> f64 {
        match (j, self.minor1) {
            (1, Some(m)) => m,
            _ => self.cone.minor_raw(j, self.coords()),
        }
    }

    pub fn cone(&self) -> &ConeDescriptor {
        self.cone
    }

    pub fn coords(&self) -> &[f64] {
        &self.buf[..self.cone.dim()]
    }

    pub fn point(&self) -> ConePoint {
        ConePoint::new(self.coords().to_vec())
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn ln_det(&self) -> f64 {
        self.ln_det
    }

    /// ln Δ(y + v), free of the cancellation near the boundary.
    pub fn ln_det_plus(&self, v: &Shift) -> f64 {
        self.cone.det_of_sum(self.coords(), self.det, &v.coords, v.det).ln()
    }

    /// ln Δ(y + x) for two samples.
    pub fn ln_det_sum(&self, other: &ConeSample<'_>) -> f64 {
        self.cone.det_of_sum(self.coords(), self.det, other.coords(), other.det).ln()
    }

    /// A sample at an arbitrary point of the cone.
    pub fn at(cone: &'a ConeDescriptor, p: &ConePoint) -> Result<Self> {
        if !cone.contains(p)? {
            return Err(Error::NotInCone);
        }
        Ok(ConeSample::new(cone, p.coords(), cone.determinant(p)?.ln()))
    }

    /// ln Δ_j(y).
    pub fn ln_minor(&self, j: usize) -> f64 {
        if j == self.cone.rank() {
            self.ln_det
        } else {
            self.minor(j).ln()
        }
    }

    /// ln Δ^s(y).
    pub fn ln_gpow(&self, s: &GeneralizedPower) -> f64 {
        gpow(s, self.cone.rank(), |j| self.ln_minor(j))
    }

    /// ln Δ^s(y + v).
    pub fn ln_gpow_plus(&self, s: &GeneralizedPower, v: &Shift) -> f64 {
        let r = self.cone.rank();
        gpow(s, r, |j| {
            if j == r {
                self.ln_det_plus(v)
            } else if j == 1 {
                // the first minor is linear in y
                (self.minor(1) + self.cone.minor_raw(1, &v.coords)).ln()
            } else {
                let mut sum = [0.0; MAX_DIM];
                for (k, c) in sum.iter_mut().enumerate().take(self.cone.dim()) {
                    *c = self.buf[k] + v.coords[k];
                }
                self.cone.minor_raw(j, &sum[..self.cone.dim()]).ln()
            }
        })
    }
}

fn gpow(s: &GeneralizedPower, r: usize, ln_minor: impl Fn(usize) -> f64) -> f64 {
    let s = s.components();
    let mut acc = 0.0;
    for j in 1..=r {
        let next = if j < r { s[j] } else { 0.0 };
        let e = s[j - 1] - next;
        if e != 0.0 {
            acc += e * ln_minor(j);
        }
    }
    acc
}

/// `∫_Ω f(y) dy` for a real integrand.
pub fn integrate_cone<F>(cone: &ConeDescriptor, f: F, cfg: &QuadratureConfig) -> Result<QuadratureEstimate>
where
    F: Fn(&ConeSample<'_>) -> f64 + Sync + Send,
{
    run(cone, &|s: &ConeSample<'_>| {
        let v = f(s);
        (v.signum(), v.abs().ln())
    }, Symmetry::General, cfg)
}

/// `∫_Ω f(y) dy` for a nonnegative integrand given through `ln f`.
pub fn integrate_cone_log<F>(
    cone: &ConeDescriptor,
    ln_f: F,
    symmetry: Symmetry,
    cfg: &QuadratureConfig,
) -> Result<QuadratureEstimate>
where
    F: Fn(&ConeSample<'_>) -> f64 + Sync + Send,
{
    run(cone, &|s: &ConeSample<'_>| (1.0, ln_f(s)), symmetry, cfg)
}

pub(crate) type Eval<'f> = dyn Fn(&ConeSample<'_>) -> (f64, f64) + Sync + Send + 'f;

fn run(cone: &ConeDescriptor, f: &Eval<'_>, symmetry: Symmetry, cfg: &QuadratureConfig) -> Result<QuadratureEstimate> {
    cfg.validate()?;
    if cone.dim() > MAX_DIM {
        return Err(Error::Unsupported(format!("cone quadrature needs n <= {MAX_DIM}, got {}", cone.dim())));
    }
    let est = match (cone.kind(), symmetry) {
        (ConeKind::HalfLine, _) | (ConeKind::Spd(1), _) => refine(cfg, 1, |lv| half_line_level(cone, cfg, lv, f)),
        (ConeKind::Lorentz(_), Symmetry::Axial) | (ConeKind::Spd(2), Symmetry::Axial) => {
            refine(cfg, 2, |lv| axial_level(cone, cfg, lv, f))
        }
        (ConeKind::Lorentz(3), Symmetry::General) | (ConeKind::Spd(2), Symmetry::General) => {
            refine(cfg, 3, |lv| full_level(cone, cfg, lv, f))
        }
        _ => mc::integrate(cone, f, cfg)?,
    };
    Ok(est)
}

fn half_line_level(cone: &ConeDescriptor, cfg: &QuadratureConfig, level: u32, f: &Eval<'_>) -> Buckets {
    let l = cfg.truncation;
    let mut b = Buckets::default();
    for n in rules::half_line(cfg.map, level, cfg.lmax()) {
        let s = ConeSample::new(cone, &[n.t], n.ln_t);
        let (sign, ln_f) = f(&s);
        b.add(l, n.mag, sign, ln_f, n.ln_w);
    }
    b
}

/// ln |S^{k}|, the surface area of the unit sphere in ℝ^{k+1}.
pub(crate) fn ln_sphere_area(k: usize) -> f64 {
    let h = (k as f64 + 1.0) / 2.0;
    LN_2 + h * PI.ln() - ln_gamma(h)
}

/// Radial and boundary coordinates of one (a, w) node.
struct Null {
    y1: f64,
    rho: f64,
    ln_rho: f64,
    /// a w = y₁ - ρ.
    b: f64,
    ln_det: f64,
    ln_w: f64,
    mag: f64,
}

fn null(a: &Node, w: &Node) -> Null {
    let rho = 0.5 * a.t * w.comp;
    let b = a.t * w.t;
    Null {
        y1: b + rho,
        rho,
        ln_rho: a.ln_t + w.ln_comp - LN_2,
        b,
        ln_det: 2.0 * a.ln_t + w.ln_t,
        // (a/2) da dw
        ln_w: a.ln_w + w.ln_w + a.ln_t - LN_2,
        mag: a.ln_t.abs().max(-w.ln_t),
    }
}

fn axial_level(cone: &ConeDescriptor, cfg: &QuadratureConfig, level: u32, f: &Eval<'_>) -> Buckets {
    let lmax = cfg.lmax();
    let a_nodes = rules::half_line(cfg.map, level, lmax);
    let w_nodes = rules::unit(level, lmax);
    let l = cfg.truncation;
    let n = cone.dim();
    let parts = map_collect(&a_nodes, |a| {
        let mut b = Buckets::default();
        let mut coords = [0.0; MAX_DIM];
        for w in &w_nodes {
            let p = null(a, w);
            let ln_jac = match cone.kind() {
                ConeKind::Spd(_) => {
                    coords[0] = p.y1 + p.rho;
                    coords[1] = 0.0;
                    coords[2] = p.b;
                    LN_2 + (2.0 * PI).ln() + p.ln_rho
                }
                _ => {
                    coords[0] = p.y1;
                    coords[1] = p.rho;
                    ln_sphere_area(n - 2) + (n - 2) as f64 * p.ln_rho
                }
            };
            let s = ConeSample::new(cone, &coords[..n], p.ln_det);
            let (sign, ln_f) = f(&s);
            b.add(l, p.mag, sign, ln_f, p.ln_w + ln_jac);
        }
        b
    });
    Buckets::merge(&parts)
}

fn full_level(cone: &ConeDescriptor, cfg: &QuadratureConfig, level: u32, f: &Eval<'_>) -> Buckets {
    let lmax = cfg.lmax();
    let a_nodes = rules::half_line(cfg.map, level, lmax);
    let w_nodes = rules::unit(level, lmax);
    // (θ, (1 - cos θ, 1 + cos θ), ln dθ), the pair free of cancellation
    let thetas: Vec<(f64, (f64, f64), f64)> = rules::periodic(8 << level)
        .into_iter()
        .map(|(th, w)| {
            let (s, c) = (0.5 * th).sin_cos();
            (th, (2.0 * s * s, 2.0 * c * c), w.ln())
        })
        .collect();
    let is_spd = matches!(cone.kind(), ConeKind::Spd(_));
    let l = cfg.truncation;
    let parts = map_collect(&a_nodes, |a| {
        let mut b = Buckets::default();
        for w in &w_nodes {
            let p = null(a, w);
            let base = p.ln_w + p.ln_rho + if is_spd { LN_2 } else { 0.0 };
            for &(th, (one_minus, one_plus), ln_dth) in &thetas {
                let (sin, cos) = th.sin_cos();
                // Δ₁ = b + ρ(1 + cos θ) in both cases
                let coords = if is_spd {
                    // [y₁ + ρ cos θ, ρ sin θ, y₁ - ρ cos θ]
                    [p.b + p.rho * one_plus, p.rho * sin, p.b + p.rho * one_minus]
                } else {
                    [p.y1, p.rho * sin, p.rho * cos]
                };
                let s = ConeSample::new(cone, &coords, p.ln_det).with_minor1(p.b + p.rho * one_plus);
                let (sign, ln_f) = f(&s);
                b.add(l, p.mag, sign, ln_f, base + ln_dth);
            }
        }
        b
    });
    Buckets::merge(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn half_line_beta_integral() {
        let c = ConeDescriptor::half_line();
        let e = Shift::identity(&c);
        let est = integrate_cone_log(&c, |s| -2.0 * s.ln_det_plus(&e), Symmetry::General, &cfg()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-8, "{est:?}");
        assert!(est.converged && !est.diverging);
    }

    #[test]
    fn half_line_endpoint_divergence() {
        let c = ConeDescriptor::half_line();
        let e = Shift::identity(&c);
        let est = integrate_cone_log(&c, |s| -s.ln_det - s.ln_det_plus(&e), Symmetry::General, &cfg()).unwrap();
        assert!(est.diverging && !est.converged);
        let est = integrate_cone_log(&c, |s| -s.ln_det_plus(&e), Symmetry::General, &cfg()).unwrap();
        assert!(est.diverging);
    }

    #[test]
    fn value_integrand_matches_log_integrand() {
        let c = ConeDescriptor::half_line();
        let est = integrate_cone(&c, |s| (-s.coords()[0]).exp(), &cfg()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-9);
    }

    // Gindikin Beta value for Λ₃ with Δ = y₁² - |y'|²
    fn lorentz3_constant(s: f64, t: f64) -> f64 {
        let g = |x: f64| (2.0 * PI).sqrt() * gamma(x) * gamma(x - 0.5);
        g(t) * g(-s - t) / g(-s) / 2f64.powf(1.5)
    }

    #[test]
    fn lorentz3_full_and_axial_agree_with_gindikin() {
        let c = ConeDescriptor::lorentz(3).unwrap();
        let e = Shift::identity(&c);
        let (s, t) = (-2.0, 0.8);
        let f = |smp: &ConeSample<'_>| s * smp.ln_det_plus(&e) + (t - 1.5) * smp.ln_det;
        let exact = lorentz3_constant(s, t);
        let ax = integrate_cone_log(&c, f, Symmetry::Axial, &cfg()).unwrap();
        assert!((ax.value / exact - 1.0).abs() < 1e-6, "{ax:?} vs {exact}");
        let full = integrate_cone_log(&c, f, Symmetry::General, &cfg()).unwrap();
        assert!((full.value / exact - 1.0).abs() < 1e-4, "{full:?} vs {exact}");
    }

    #[test]
    fn spd2_is_twice_lorentz3() {
        let l = ConeDescriptor::lorentz(3).unwrap();
        let m = ConeDescriptor::spd(2).unwrap();
        let (s, t) = (-3.0, 1.0);
        let run = |c: &ConeDescriptor, sym| {
            let e = Shift::identity(c);
            integrate_cone_log(c, |smp| s * smp.ln_det_plus(&e) + (t - 1.5) * smp.ln_det, sym, &cfg())
                .unwrap()
                .value
        };
        let lv = run(&l, Symmetry::Axial);
        assert!((lv - PI / 6.0).abs() < 1e-6, "{lv}");
        assert!((run(&m, Symmetry::Axial) / lv - 2.0).abs() < 1e-6);
        assert!((run(&m, Symmetry::General) / lv - 2.0).abs() < 1e-4);
    }

    #[test]
    fn boundary_threshold_diverges() {
        let c = ConeDescriptor::lorentz(3).unwrap();
        let e = Shift::identity(&c);
        // t = 1/2 = (r-1)d/2 is exactly the Gindikin threshold
        let est = integrate_cone_log(&c, |s| -2.0 * s.ln_det_plus(&e) + (0.5 - 1.5) * s.ln_det, Symmetry::Axial, &cfg())
            .unwrap();
        assert!(est.diverging, "{est:?}");
    }

    #[test]
    fn sphere_areas() {
        assert!((ln_sphere_area(1).exp() - 2.0 * PI).abs() < 1e-12);
        assert!((ln_sphere_area(2).exp() - 4.0 * PI).abs() < 1e-12);
    }
}
