//! Iterated integrals over the tube `ℝⁿ + iΩ`: an inner tensor rule in the
//! real directions (`x = tan θ` per coordinate) nested inside a cone rule.
//! The inner rule sits at a fixed fine level while the outer rule refines,
//! so divergence and error estimates only see the cone variable.

use num_complex::Complex64;

use super::cone::{integrate_cone_log, ConeSample, MAX_DIM};
use super::rules::{self, Node};
use super::{QuadratureConfig, QuadratureEstimate, Symmetry};
use crate::cone::{ConeDescriptor, TubePoint};
use crate::error::{Error, Result};

/// A tube node `z = x + i y`.
pub struct TubeSample<'s, 'a> {
    pub x: &'s [f64],
    pub y: &'s ConeSample<'a>,
}

impl TubeSample<'_, '_> {
    /// ln |Δ((z - w̄)/i)|, where `(z - w̄)/i = (y + v) - i(x - u)` for
    /// `w = u + i v`.
    pub fn ln_abs_det_minus_conj(&self, w: &TubePoint) -> f64 {
        let cone = self.y.cone();
        let n = cone.dim();
        let y = self.y.coords();
        let v = w.y.coords();
        if n == 1 {
            return (y[0] + v[0]).hypot(self.x[0] - w.x[0]).ln();
        }
        let mut z = [Complex64::new(0.0, 0.0); MAX_DIM];
        for k in 0..n {
            z[k] = Complex64::new(y[k] + v[k], -(self.x[k] - w.x[k]));
        }
        cone.holomorphic_det(&z[..n]).map(|d| d.norm().ln()).unwrap_or(f64::NAN)
    }
}

/// `∫_Ω (∫_ℝⁿ f(x + iy)^p dx)^{q/p} Δ^{ν - n/r}(y) dy`, the `q`-th power of
/// the mixed norm of `L^{p,q}_ν`. `ln_f` returns `ln f`.
pub fn mixed_norm_power<F>(
    cone: &ConeDescriptor,
    ln_f: F,
    p: f64,
    q: f64,
    nu: f64,
    symmetry: Symmetry,
    cfg: &QuadratureConfig,
) -> Result<QuadratureEstimate>
where
    F: Fn(&TubeSample<'_, '_>) -> f64 + Sync + Send,
{
    let n = cone.dim();
    if n > 3 {
        return Err(Error::Unsupported(format!("tube quadrature needs n <= 3, got {n}")));
    }
    let shift = nu - cone.n_over_r();
    let inner_level = if n == 1 { cfg.levels + 1 } else { cfg.levels.saturating_sub(3) };
    let inner_lmax = if n == 1 { cfg.lmax() } else { 2.0 * cfg.truncation };
    let line = rules::real_line(inner_level, inner_lmax);
    let grid = tensor(&line, n);
    integrate_cone_log(
        cone,
        |s| {
            let mut acc = 0.0;
            let mut x = [0.0; MAX_DIM];
            for (idx, ln_w) in &grid {
                for (k, &i) in idx.iter().enumerate().take(n) {
                    x[k] = line[i].t;
                }
                let t = TubeSample { x: &x[..n], y: s };
                let lf = ln_f(&t);
                if lf != f64::NEG_INFINITY {
                    acc += (p * lf + ln_w).exp();
                }
            }
            (q / p) * acc.ln() + shift * s.ln_det()
        },
        symmetry,
        cfg,
    )
}

fn tensor(line: &[Node], n: usize) -> Vec<([usize; 3], f64)> {
    let mut out = vec![([0usize; 3], 0.0)];
    for k in 0..n {
        let mut next = Vec::with_capacity(out.len() * line.len());
        for (idx, w) in &out {
            for (i, node) in line.iter().enumerate() {
                let mut j = *idx;
                j[k] = i;
                next.push((j, w + node.ln_w));
            }
        }
        out = next;
    }
    out
}

/// `∫_𝒟 f dV` for a nonnegative integrand given through `ln f`.
pub fn integrate_tube_log<F>(cone: &ConeDescriptor, ln_f: F, symmetry: Symmetry, cfg: &QuadratureConfig) -> Result<QuadratureEstimate>
where
    F: Fn(&TubeSample<'_, '_>) -> f64 + Sync + Send,
{
    mixed_norm_power(cone, ln_f, 1.0, 1.0, cone.n_over_r(), symmetry, cfg)
}

/// `∫_𝒟 f dV` for a nonnegative integrand.
pub fn integrate_tube<F>(cone: &ConeDescriptor, f: F, cfg: &QuadratureConfig) -> Result<QuadratureEstimate>
where
    F: Fn(&TubeSample<'_, '_>) -> f64 + Sync + Send,
{
    integrate_tube_log(cone, |t| f(t).ln(), Symmetry::General, cfg)
}
