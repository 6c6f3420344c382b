//! One-dimensional double-exponential rules. Every rule is a trapezoid rule
//! in an auxiliary variable τ with step `h`; nodes carry log-weights so that
//! products of large Jacobians and tiny integrands never overflow.

use std::f64::consts::{FRAC_PI_2, PI};

use super::MapKind;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    /// Node position in the target interval.
    pub t: f64,
    /// ln t (half-line and unit rules).
    pub ln_t: f64,
    /// 1 - t (unit rule only).
    pub comp: f64,
    /// ln(1 - t) (unit rule only).
    pub ln_comp: f64,
    pub ln_w: f64,
    /// Log-scale distance from the "finite" part of the domain; windows
    /// of the divergence test are cut on this value.
    pub mag: f64,
}

pub(crate) fn step(level: u32) -> f64 {
    0.5f64.powi(level as i32 + 1)
}

fn tau_range(h: f64, t_max: f64) -> impl Iterator<Item = f64> {
    let k = (t_max / h).ceil() as i64 + 1;
    (-k..=k).map(move |i| i as f64 * h)
}

/// Nodes on (0, 1) from the tanh-sinh map, with both endpoint logs kept
/// accurate. `mag` is `max(-ln t, -ln(1-t))`.
pub(crate) fn unit(level: u32, lmax: f64) -> Vec<Node> {
    let h = step(level);
    let t_max = (lmax / PI).asinh() + 0.5;
    let mut out = Vec::new();
    for tau in tau_range(h, t_max) {
        let z = FRAC_PI_2 * tau.sinh();
        // t = 1/(1+e^{-2z}), 1-t = 1/(1+e^{2z})
        let ln_t = -(-2.0 * z).exp().ln_1p();
        let ln_comp = -(2.0 * z).exp().ln_1p();
        let mag = (-ln_t).max(-ln_comp);
        if !(mag <= lmax) {
            continue;
        }
        let ln_w = h.ln() + PI.ln() + tau.cosh().ln() + ln_t + ln_comp;
        out.push(Node { t: ln_t.exp(), ln_t, comp: ln_comp.exp(), ln_comp, ln_w, mag });
    }
    out
}

/// Nodes on (0, ∞).
pub(crate) fn half_line(map: MapKind, level: u32, lmax: f64) -> Vec<Node> {
    match map {
        MapKind::ExpSubstitution => exp_sinh(level, lmax),
        MapKind::Compactify => compactified(level, lmax),
    }
}

/// `y = exp((π/2) sinh τ)`.
fn exp_sinh(level: u32, lmax: f64) -> Vec<Node> {
    let h = step(level);
    let t_max = (lmax / FRAC_PI_2).asinh() + 0.5;
    let mut out = Vec::new();
    for tau in tau_range(h, t_max) {
        let x = FRAC_PI_2 * tau.sinh();
        if x.abs() > lmax {
            continue;
        }
        let ln_w = h.ln() + x + (FRAC_PI_2 * tau.cosh()).ln();
        out.push(Node { t: x.exp(), ln_t: x, comp: f64::NAN, ln_comp: f64::NAN, ln_w, mag: x.abs() });
    }
    out
}

/// `y = tan(π s / 2)` with tanh-sinh nodes in `s ∈ (0, 1)`.
fn compactified(level: u32, lmax: f64) -> Vec<Node> {
    let mut out = Vec::new();
    for s in unit(level, lmax + 2.0) {
        let y = if s.t <= 0.5 {
            (FRAC_PI_2 * s.t).tan()
        } else {
            1.0 / (FRAC_PI_2 * s.comp).tan()
        };
        let ln_y = y.ln();
        if !(ln_y.abs() <= lmax) {
            continue;
        }
        // dy/ds = (π/2)(1 + y²)
        let ln_1py2 = if ln_y > 0.0 { 2.0 * ln_y + (-2.0 * ln_y).exp().ln_1p() } else { (y * y).ln_1p() };
        let ln_w = s.ln_w + FRAC_PI_2.ln() + ln_1py2;
        out.push(Node { t: y, ln_t: ln_y, comp: f64::NAN, ln_comp: f64::NAN, ln_w, mag: ln_y.abs() });
    }
    out
}

/// Nodes on ℝ via `x = tan(π(s - 1/2))`, tanh-sinh in `s`.
/// `ln_t` holds ln|x|; `mag` is `max(0, ln|x|)`.
pub(crate) fn real_line(level: u32, lmax: f64) -> Vec<Node> {
    let mut out = Vec::new();
    for s in unit(level, lmax + 2.0) {
        let x = if s.t < 0.5 {
            -1.0 / (PI * s.t).tan()
        } else if s.t > 0.5 {
            1.0 / (PI * s.comp).tan()
        } else {
            0.0
        };
        let ln_abs = x.abs().ln();
        if ln_abs > lmax {
            continue;
        }
        let ln_1px2 = if ln_abs > 0.0 { 2.0 * ln_abs + (-2.0 * ln_abs).exp().ln_1p() } else { (x * x).ln_1p() };
        let ln_w = s.ln_w + PI.ln() + ln_1px2;
        out.push(Node { t: x, ln_t: ln_abs, comp: f64::NAN, ln_comp: f64::NAN, ln_w, mag: ln_abs.max(0.0) });
    }
    out
}

/// Tanh-sinh nodes on a finite interval `(a, b)`.
#[cfg(test)]
pub(crate) fn interval(a: f64, b: f64, level: u32) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    unit(level, 40.0)
        .into_iter()
        .map(|s| {
            let x = if s.t <= 0.5 { a + 2.0 * half * s.t } else { b - 2.0 * half * s.comp };
            (x, 2.0 * half * s.ln_w.exp())
        })
        .collect()
}

/// Equispaced trapezoid nodes on [0, 2π).
pub(crate) fn periodic(m: usize) -> Vec<(f64, f64)> {
    let w = 2.0 * PI / m as f64;
    (0..m).map(|k| (k as f64 * w, w)).collect()
}

/// Gauss-Legendre nodes and weights on (-1, 1), by Newton iteration on
/// the Legendre recurrence.
pub(crate) fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}
