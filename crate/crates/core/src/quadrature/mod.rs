//! Deterministic quadrature over the cone Ω and the tube ℝⁿ + iΩ.
//!
//! All rules are double-exponential trapezoid rules in an auxiliary
//! variable, refined by halving the step. Integrands are evaluated in log
//! space: a node contributes `sign · exp(ln|f| + ln w)`, so huge Jacobians
//! far out on the cone never meet tiny integrand values in floating point.
//!
//! Every node also carries a log-magnitude `m` (how far it sits from the
//! bulk of the domain, in log scale). Contributions are bucketed by `m`
//! into windows `L, 2L, 4L, 8L, 16L` with `L = truncation`; the bucket
//! sums give the partial integrals over growing truncations that drive the
//! divergence test.

mod ball;
mod cone;
mod mc;
pub(crate) mod rules;
mod tube;

use serde::{Deserialize, Serialize};

pub use ball::{integrate_ball, BallRule};
pub(crate) use ball::BallNodes;
pub use cone::{integrate_cone, integrate_cone_log, ConeSample, Shift};
pub use tube::{integrate_tube, integrate_tube_log, mixed_norm_power, TubeSample};

use crate::par::pairwise_sum;

/// Substitution used for the radial half-line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// `y = exp((π/2) sinh τ)`.
    ExpSubstitution,
    /// `y = tan(π s / 2)` with tanh-sinh nodes in `s`.
    Compactify,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    /// Refinement levels of the two-dimensional rules. One-dimensional
    /// rules get two more, three-dimensional ones two fewer.
    pub levels: u32,
    pub map: MapKind,
    /// Width `L` of the first truncation window in log scale; the widest
    /// window is `16 L`.
    pub truncation: f64,
    pub target_rel_err: f64,
    /// Sample count of the Monte-Carlo fallback.
    pub mc_samples: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            levels: 5,
            map: MapKind::ExpSubstitution,
            truncation: 16.0,
            target_rel_err: 1e-7,
            mc_samples: 200_000,
        }
    }
}

impl QuadratureConfig {
    /// A cheap configuration for probes that only need a few digits.
    pub fn coarse() -> Self {
        QuadratureConfig { levels: 3, target_rel_err: 1e-4, ..Self::default() }
    }

    pub(crate) fn validate(&self) -> crate::Result<()> {
        if self.levels < 2 {
            return Err(crate::Error::Precondition("quadrature needs levels >= 2".into()));
        }
        if !(self.target_rel_err > 0.0) || !(self.truncation > 0.0) {
            return Err(crate::Error::Precondition(
                "target_rel_err and truncation must be positive".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn lmax(&self) -> f64 {
        self.truncation * WINDOW_SCALE[WINDOWS - 1]
    }

    /// Inclusive (first, last) refinement level for a rule of `dims`
    /// dimensions.
    pub(crate) fn level_range(&self, dims: usize) -> (u32, u32) {
        match dims {
            1 => (2, self.levels + 1),
            2 => (1, self.levels - 1),
            _ => (1, self.levels.saturating_sub(3).max(2)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    #[serde(with = "crate::real")]
    pub value: f64,
    /// Relative difference between the last two refinement levels.
    #[serde(with = "crate::real")]
    pub rel_err: f64,
    pub converged: bool,
    pub diverging: bool,
    /// Finest level evaluated.
    pub level: u32,
    pub evaluations: u64,
}

pub(crate) const WINDOWS: usize = 5;
const WINDOW_SCALE: [f64; WINDOWS] = [1.0, 2.0, 4.0, 8.0, 16.0];
const GROWTH: f64 = 1.5;

/// Per-window partial sums of one refinement level.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Buckets {
    pub sums: [f64; WINDOWS],
    pub bad: bool,
    pub evals: u64,
}

impl Buckets {
    #[inline]
    pub fn add(&mut self, l: f64, mag: f64, sign: f64, ln_f: f64, ln_w: f64) {
        self.evals += 1;
        if sign == 0.0 || ln_f == f64::NEG_INFINITY {
            return;
        }
        let c = sign * (ln_f + ln_w).exp();
        if !c.is_finite() {
            self.bad = true;
            return;
        }
        let k = WINDOW_SCALE.iter().position(|s| mag <= l * s).unwrap_or(WINDOWS - 1);
        self.sums[k] += c;
    }

    pub fn merge(parts: &[Buckets]) -> Buckets {
        let mut out = Buckets::default();
        for k in 0..WINDOWS {
            let col: Vec<f64> = parts.iter().map(|b| b.sums[k]).collect();
            out.sums[k] = pairwise_sum(&col);
        }
        out.bad = parts.iter().any(|b| b.bad);
        out.evals = parts.iter().map(|b| b.evals).sum();
        out
    }

    pub fn total(&self) -> f64 {
        self.sums.iter().sum()
    }

    /// Partial integrals over the growing windows.
    #[cfg(test)]
    pub fn partials(&self) -> [f64; WINDOWS] {
        let mut acc = 0.0;
        let mut out = [0.0; WINDOWS];
        for k in 0..WINDOWS {
            acc += self.sums[k];
            out[k] = acc;
        }
        out
    }

    /// Three successive window doublings whose increments each grow by at
    /// least 1.5×, or a non-finite contribution.
    pub fn diverging(&self) -> bool {
        if self.bad {
            return true;
        }
        let inc = &self.sums[1..];
        // noise floor relative to the innermost window, not the total: a
        // divergent total is dominated by its outermost increment
        let scale = self.sums[0].abs().max(f64::MIN_POSITIVE);
        if inc.iter().any(|d| !(*d > 1e-14 * scale)) {
            return false;
        }
        inc.windows(2).all(|w| w[1] >= GROWTH * w[0])
    }
}

/// Runs `eval` over successive levels until two agree to the target.
pub(crate) fn refine<E>(cfg: &QuadratureConfig, dims: usize, mut eval: E) -> QuadratureEstimate
where
    E: FnMut(u32) -> Buckets,
{
    let (first, last) = cfg.level_range(dims);
    let mut prev: Option<f64> = None;
    let mut evals = 0;
    let mut rel_err = f64::INFINITY;
    let mut level = first;
    let mut b = Buckets::default();
    while level <= last {
        b = eval(level);
        evals += b.evals;
        let value = b.total();
        if b.bad {
            break;
        }
        if let Some(p) = prev {
            let denom = value.abs().max(p.abs());
            rel_err = if denom == 0.0 { 0.0 } else { (value - p).abs() / denom };
            if rel_err <= cfg.target_rel_err {
                break;
            }
        }
        prev = Some(value);
        level += 1;
    }
    let level = level.min(last);
    let diverging = b.diverging();
    let value = if b.bad { f64::INFINITY } else { b.total() };
    QuadratureEstimate {
        value,
        rel_err,
        converged: !diverging && rel_err <= cfg.target_rel_err,
        diverging,
        level,
        evaluations: evals,
    }
}

/// Whether `∫ f` over the cone grows without bound under truncation.
/// `ln_f` returns `ln f(y)` for the nonnegative integrand `f`.
pub fn detect_divergence<F>(
    cone: &crate::ConeDescriptor,
    ln_f: F,
    symmetry: Symmetry,
    cfg: &QuadratureConfig,
) -> crate::Result<bool>
where
    F: Fn(&ConeSample<'_>) -> f64 + Sync + Send,
{
    Ok(integrate_cone_log(cone, ln_f, symmetry, cfg)?.diverging)
}

/// Symmetry the caller promises about an integrand, letting the cone rule
/// drop an angular dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    General,
    /// Depends on `y` only through the axial coordinate and the distance to
    /// the axis (Lorentz), or through the eigenvalues (SPD(2)).
    Axial,
}
