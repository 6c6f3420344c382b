//! Exponent arithmetic for the two integral lemmas everything else rests on:
//!
//! ```text
//! ∫_Ω Δ^s(y + v) Δ^{t - n/r}(y) dy = C_{s,t} Δ^{s+t}(v)
//! ```
//!
//! which converges iff `t_j > (j - 1) d/2` and `s_j + t_j < -(r - j) d/2`
//! for every `j`, and the mixed-norm membership of `Δ^{-α}((z + it)/i)`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::cone::{ConeDescriptor, ConeKind, ConePoint, GeneralizedPower, TubePoint};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_cone_log, mixed_norm_power, QuadratureConfig, QuadratureEstimate, Shift, Symmetry};
use crate::special::ln_gamma;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma31Query {
    pub cone: ConeDescriptor,
    pub s: GeneralizedPower,
    pub t: GeneralizedPower,
    pub v: Option<ConePoint>,
}

impl Lemma31Query {
    pub fn new(cone: ConeDescriptor, s: GeneralizedPower, t: GeneralizedPower) -> Result<Self> {
        cone.check_power(&s)?;
        cone.check_power(&t)?;
        Ok(Lemma31Query { cone, s, t, v: None })
    }

    /// Scalar exponents `s = (a, …, a)`, `t = (b, …, b)`.
    pub fn scalar(cone: ConeDescriptor, s: f64, t: f64) -> Self {
        let r = cone.rank();
        Lemma31Query { cone, s: GeneralizedPower::scalar(s, r), t: GeneralizedPower::scalar(t, r), v: None }
    }

    pub fn at(mut self, v: ConePoint) -> Self {
        self.v = Some(v);
        self
    }
}

/// With `Δ^s` built from leading minors the `t` side is governed by the
/// minors already present near the boundary, so component `j` needs
/// `t_j > (j - 1) d/2` and `s_j + t_j < -(r - j) d/2`. The two orders agree
/// for scalar exponents.
pub fn lemma31_converges(q: &Lemma31Query) -> bool {
    let r = q.cone.rank();
    let d = q.cone.structure_constant();
    if q.s.len() != r || q.t.len() != r {
        return false;
    }
    let (s, t) = (q.s.components(), q.t.components());
    (1..=r).all(|j| {
        let tj = t[j - 1];
        let sj = s[j - 1];
        tj > (j - 1) as f64 * d / 2.0 && sj + tj < -((r - j) as f64) * d / 2.0
    })
}

/// The exponent `s + t` of `Δ(v)` in the closed form.
pub fn lemma31_closed_form_exponent(q: &Lemma31Query) -> Result<GeneralizedPower> {
    if !lemma31_converges(q) {
        return Err(Error::Divergent(format!("s = {:?}, t = {:?}", q.s.components(), q.t.components())));
    }
    Ok(q.s.plus(&q.t))
}

/// Numeric value of the integral at `v` (default `e`).
pub fn lemma31_integral(q: &Lemma31Query, cfg: &QuadratureConfig) -> Result<QuadratureEstimate> {
    let cone = q.cone;
    let (shift, at_identity) = match &q.v {
        Some(v) => (Shift::new(&cone, v)?, on_axis(&cone, v)),
        None => (Shift::identity(&cone), true),
    };
    let tn = GeneralizedPower::new(q.t.components().iter().map(|t| t - cone.n_over_r()).collect());
    let scalar = q.s.is_scalar() && q.t.is_scalar();
    let symmetry = if scalar && at_identity { Symmetry::Axial } else { Symmetry::General };
    let (s0, t0) = (q.s.components()[0], tn.components()[0]);
    if scalar {
        integrate_cone_log(&cone, |y| s0 * y.ln_det_plus(&shift) + t0 * y.ln_det(), symmetry, cfg)
    } else {
        let s = q.s.clone();
        integrate_cone_log(&cone, |y| y.ln_gpow_plus(&s, &shift) + y.ln_gpow(&tn), symmetry, cfg)
    }
}

/// Whether `v = λe` for some `λ > 0`.
pub(crate) fn on_axis(cone: &ConeDescriptor, v: &ConePoint) -> bool {
    let e = cone.identity();
    let lambda = v.coords()[0];
    lambda > 0.0 && *v == e.scaled(lambda)
}

type ConstKey = (String, Vec<u64>, Vec<u64>, u32, u64, u64, bool);

fn cache() -> &'static RwLock<HashMap<ConstKey, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<ConstKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `C_{s,t}`. Closed form on the half-line, quadrature at `v = e`
/// otherwise. Memoized per cone, exponents and configuration.
pub fn lemma31_constant(q: &Lemma31Query, cfg: &QuadratureConfig) -> Result<f64> {
    lemma31_closed_form_exponent(q)?;
    if q.cone.kind() == ConeKind::HalfLine {
        let (s, t) = (q.s.components()[0], q.t.components()[0]);
        return Ok((ln_gamma(t) + ln_gamma(-s - t) - ln_gamma(-s)).exp());
    }
    let bits = |g: &GeneralizedPower| g.components().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    let key = (
        q.cone.to_string(),
        bits(&q.s),
        bits(&q.t),
        cfg.levels,
        cfg.truncation.to_bits(),
        cfg.target_rel_err.to_bits(),
        cfg.map == crate::quadrature::MapKind::Compactify,
    );
    if let Some(v) = cache().read().ok().and_then(|m| m.get(&key).copied()) {
        return Ok(v);
    }
    let at_e = Lemma31Query { v: None, ..q.clone() };
    let est = lemma31_integral(&at_e, cfg)?;
    if !est.converged {
        return Err(Error::Quadrature(format!(
            "C_(s,t) estimate {} with rel_err {:.2e}{}",
            est.value,
            est.rel_err,
            if est.diverging { ", diverging" } else { "" }
        )));
    }
    if let Ok(mut m) = cache().write() {
        m.insert(key, est.value);
    }
    Ok(est.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma32Query {
    pub cone: ConeDescriptor,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub nu: f64,
    pub t: ConePoint,
}

/// Whether `Δ^{-α}((z + it)/i)` lies in `L^{p,q}_ν` of the tube.
pub fn lemma32_member(q: &Lemma32Query) -> bool {
    let nr = q.cone.n_over_r();
    let bound = ((2.0 * nr - 1.0) / q.p).max(nr / q.p + (q.nu + nr - 1.0) / q.q);
    q.nu > nr - 1.0 && q.alpha > bound
}

/// The exponent `-qα + nq/(rp) + ν` of `Δ(t)` in `‖f‖^q`.
pub fn lemma32_norm_exponent(q: &Lemma32Query) -> Result<f64> {
    if !lemma32_member(q) {
        return Err(Error::Divergent(format!("Δ^-α((z+it)/i) is not in L^(p,q)_ν for α = {}", q.alpha)));
    }
    Ok(-q.q * q.alpha + q.cone.n_over_r() * q.q / q.p + q.nu)
}

/// Numeric `‖Δ^{-α}((· + it)/i)‖^q` in `L^{p,q}_ν`, whatever the
/// membership predicate says (a divergent estimate is data).
pub fn lemma32_norm_power(q: &Lemma32Query, cfg: &QuadratureConfig) -> Result<QuadratureEstimate> {
    let n = q.cone.dim();
    let w = TubePoint::new(vec![0.0; n], q.t.clone());
    let alpha = q.alpha;
    let symmetry = if on_axis(&q.cone, &q.t) && n > 1 { Symmetry::Axial } else { Symmetry::General };
    mixed_norm_power(&q.cone, |z| -alpha * z.ln_abs_det_minus_conj(&w), q.p, q.q, q.nu, symmetry, cfg)
}
