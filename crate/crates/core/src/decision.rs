//! Boundedness verdicts from the sharp parameter inequalities.
//!
//! Each check returns a [`Verdict`] carrying the theorem that was applied,
//! the conditions that failed, and a signed margin per condition: for a
//! strict inequality `a < b` the margin is `b - a`, and for the homogeneity
//! equation it is the deviation `γ - γ₀` of `γ` from the value the
//! equation forces.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cone::ConeDescriptor;

/// Relative tolerance of the homogeneity equation.
pub const HOMOGENEITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub nu: f64,
    pub mu: f64,
    #[serde(with = "crate::real")]
    pub p: f64,
    #[serde(with = "crate::real")]
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TParams {
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

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictStatus {
    Bounded,
    Unbounded,
    /// Sufficient conditions hold; sharpness is not known.
    SufficientOnlyBounded,
    /// Neither boundedness nor unboundedness follows.
    Inconclusive,
    ScopeError,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VerdictStatus::Bounded => "Bounded",
            VerdictStatus::Unbounded => "Unbounded",
            VerdictStatus::SufficientOnlyBounded => "SufficientOnlyBounded",
            VerdictStatus::Inconclusive => "Inconclusive",
            VerdictStatus::ScopeError => "ScopeError",
        };
        f.write_str(s)
    }
}

/// Machine-readable condition identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// The standing hypotheses of the theorem.
    Scope,
    Homogeneity,
    NuLower,
    NuUpper,
    MuLower,
    MuUpper,
    GammaPositive,
    /// `p(α - n/r + 1) > -n/r + 1` in the `L^∞` target case.
    AlphaLower,
    /// `ν/q = μ/s` for the positive Bergman projection.
    WeightRatio,
    QLower,
    QUpper,
    /// `(γ + n/r) > (2n/r - 1) max(1/p, 1/p′)`.
    GammaWeight,
    SLower,
}

impl Criterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::Scope => "scope",
            Criterion::Homogeneity => "homogeneity",
            Criterion::NuLower => "nu_lower",
            Criterion::NuUpper => "nu_upper",
            Criterion::MuLower => "mu_lower",
            Criterion::MuUpper => "mu_upper",
            Criterion::GammaPositive => "gamma_positive",
            Criterion::AlphaLower => "alpha_lower",
            Criterion::WeightRatio => "weight_ratio",
            Criterion::QLower => "q_lower",
            Criterion::QUpper => "q_upper",
            Criterion::GammaWeight => "gamma_weight",
            Criterion::SLower => "s_lower",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    /// Theorem label, e.g. "2.1".
    pub theorem: String,
    pub violated: Vec<Criterion>,
    #[serde(with = "crate::real::map")]
    pub margins: BTreeMap<Criterion, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub fn margin(&self, c: Criterion) -> Option<f64> {
        self.margins.get(&c).copied()
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.status, VerdictStatus::Bounded | VerdictStatus::SufficientOnlyBounded)
    }

    fn scope(theorem: &str, margin: f64, note: impl Into<String>) -> Verdict {
        let mut margins = BTreeMap::new();
        if !margin.is_nan() {
            margins.insert(Criterion::Scope, margin);
        }
        Verdict {
            status: VerdictStatus::ScopeError,
            theorem: theorem.into(),
            violated: vec![Criterion::Scope],
            margins,
            note: Some(note.into()),
        }
    }
}

/// Accumulates conditions for one theorem.
struct Conditions {
    theorem: &'static str,
    margins: BTreeMap<Criterion, f64>,
    violated: Vec<Criterion>,
}

impl Conditions {
    fn new(theorem: &'static str) -> Self {
        Conditions { theorem, margins: BTreeMap::new(), violated: Vec::new() }
    }

    /// Strict `lhs < rhs`.
    fn less(&mut self, c: Criterion, lhs: f64, rhs: f64) -> &mut Self {
        let m = rhs - lhs;
        self.margins.insert(c, m);
        if !(lhs < rhs) {
            self.violated.push(c);
        }
        self
    }

    /// `value == target` up to the homogeneity tolerance.
    fn equal(&mut self, c: Criterion, value: f64, target: f64) -> &mut Self {
        self.margins.insert(c, value - target);
        let tol = HOMOGENEITY_TOL * 1f64.max(value.abs()).max(target.abs());
        if !((value - target).abs() <= tol) {
            self.violated.push(c);
        }
        self
    }

    fn finish(&mut self, holds: VerdictStatus, fails: VerdictStatus) -> Verdict {
        let status = if self.violated.is_empty() { holds } else { fails };
        Verdict {
            status,
            theorem: self.theorem.into(),
            violated: std::mem::take(&mut self.violated),
            margins: std::mem::take(&mut self.margins),
            note: None,
        }
    }
}

fn conj(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn finite_reals(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

fn exponent_ok(p: f64) -> bool {
    p >= 1.0 && !p.is_nan()
}

/// Boundedness of `S_{α,β,γ}` from `L^p_ν(Ω)` to `L^q_μ(Ω)`.
pub fn decide_s(cone: &ConeDescriptor, prm: &SParams) -> Verdict {
    let SParams { alpha, beta, gamma, nu, mu, p, q } = *prm;
    if !finite_reals(&[alpha, beta, gamma, nu, mu]) || !exponent_ok(p) || !exponent_ok(q) {
        return Verdict::scope("-", f64::NAN, "parameters must be real with p, q >= 1");
    }
    if p > q {
        return Verdict::scope("-", q - p, "the theorems cover p <= q only");
    }
    let nr = cone.n_over_r();
    let k = nr - 1.0;
    match (p == 1.0, p.is_infinite(), q.is_infinite()) {
        (_, true, _) => Verdict::scope("-", f64::NAN, "p = inf is not covered"),
        (true, _, true) => Verdict::scope("-", f64::NAN, "p = 1 with q = inf is not covered"),
        (true, _, false) => {
            if !(q > 1.0) {
                return Verdict::scope("2.2", q - 1.0, "p = 1 requires 1 < q < inf");
            }
            if !(mu > 0.0) {
                return Verdict::scope("2.2", mu, "p = 1 requires mu > 0");
            }
            Conditions::new("2.2")
                .equal(Criterion::Homogeneity, gamma, alpha + beta + nr - nu + mu / q)
                .less(Criterion::GammaPositive, 0.0, gamma)
                .less(Criterion::MuLower, k - q * alpha, mu)
                .less(Criterion::MuUpper, mu, q * (gamma - alpha) - k)
                .finish(VerdictStatus::Bounded, VerdictStatus::Unbounded)
        }
        (false, false, true) => Conditions::new("2.3")
            .equal(Criterion::Homogeneity, gamma, alpha + beta + nr - nu / p)
            .less(Criterion::NuUpper, nu, p * (beta + 1.0) + k)
            .less(Criterion::AlphaLower, -k, p * (alpha - k))
            .finish(VerdictStatus::Bounded, VerdictStatus::Unbounded),
        (false, false, false) => {
            let scope = nu / conj(p) + mu / q;
            if !(scope > 0.0) {
                return Verdict::scope("2.1", scope, "requires nu/p' + mu/q > 0");
            }
            Conditions::new("2.1")
                .less(Criterion::Scope, 0.0, scope)
                .equal(Criterion::Homogeneity, gamma, alpha + beta + nr - nu / p + mu / q)
                .less(Criterion::NuLower, p * (beta - gamma + 2.0 * nr - 1.0) - k, nu)
                .less(Criterion::NuUpper, nu, p * (beta + 1.0) + k)
                .less(Criterion::MuLower, k - q * alpha, mu)
                .less(Criterion::MuUpper, mu, q * (gamma - alpha) - k)
                .finish(VerdictStatus::Bounded, VerdictStatus::Unbounded)
        }
    }
}

/// Boundedness of `T⁺_{α,β,γ}` from `L^{p,q}_ν` to `L^{p,s}_μ` of the tube.
pub fn decide_tplus_mixed(cone: &ConeDescriptor, prm: &TParams) -> Verdict {
    let TParams { alpha, beta, gamma, nu, mu, p, q, s } = *prm;
    if !finite_reals(&[alpha, beta, gamma, nu, mu]) || !exponent_ok(p) || !exponent_ok(q) || !exponent_ok(s) {
        return Verdict::scope("-", f64::NAN, "parameters must be real with p, q, s >= 1");
    }
    if !(p > 1.0 && p.is_finite()) {
        return Verdict::scope("-", f64::NAN, "requires 1 < p < inf");
    }
    if q > s {
        return Verdict::scope("-", s - q, "the theorems cover q <= s only");
    }
    let nr = cone.n_over_r();
    let k = nr - 1.0;
    match (q == 1.0, q.is_infinite(), s.is_infinite()) {
        (_, true, _) => Verdict::scope("-", f64::NAN, "q = inf is not covered"),
        (true, _, true) => Verdict::scope("-", f64::NAN, "q = 1 with s = inf is not covered"),
        (true, _, false) => {
            if !(s > 1.0) {
                return Verdict::scope("2.5", s - 1.0, "q = 1 requires 1 < s < inf");
            }
            if !(mu > 0.0) {
                return Verdict::scope("2.5", mu, "q = 1 requires mu > 0");
            }
            Conditions::new("2.5")
                .equal(Criterion::Homogeneity, gamma, alpha + beta + nr - nu + mu / s)
                .less(Criterion::GammaPositive, 0.0, gamma)
                .less(Criterion::MuLower, k - s * alpha, mu)
                .less(Criterion::MuUpper, mu, s * (gamma - alpha) - k)
                .finish(VerdictStatus::Bounded, VerdictStatus::Unbounded)
        }
        (false, false, true) => Conditions::new("2.6")
            .equal(Criterion::Homogeneity, gamma, alpha + beta + nr - nu / q)
            .less(Criterion::NuUpper, nu, q * (beta + 1.0) + k)
            .less(Criterion::AlphaLower, -k, q * (alpha - k))
            .finish(VerdictStatus::Bounded, VerdictStatus::Unbounded),
        (false, false, false) => {
            // the standing hypothesis exactly as printed, with p′ and q
            let scope = nu / conj(p) + mu / q;
            if !(scope > 0.0) {
                return Verdict::scope("2.4", scope, "requires nu/p' + mu/q > 0");
            }
            Conditions::new("2.4")
                .less(Criterion::Scope, 0.0, scope)
                .equal(Criterion::Homogeneity, gamma, alpha + beta + nr - nu / q + mu / s)
                .less(Criterion::NuLower, q * (beta - gamma + 2.0 * nr - 1.0) - k, nu)
                .less(Criterion::NuUpper, nu, q * (beta + 1.0) + k)
                .less(Criterion::MuLower, k - s * alpha, mu)
                .less(Criterion::MuUpper, mu, s * (gamma - alpha) - k)
                .finish(VerdictStatus::Bounded, VerdictStatus::Unbounded)
        }
    }
}

/// The sufficient condition for `T⁺` from `L^p_ν` to `L^q_μ` of the tube.
/// Never reports `Unbounded`: failing conditions give `Inconclusive`.
pub fn sufficient_tplus_pure(cone: &ConeDescriptor, prm: &SParams) -> Verdict {
    let SParams { alpha, beta, gamma, nu, mu, p, q } = *prm;
    if !finite_reals(&[alpha, beta, gamma, nu, mu]) || !(p > 1.0) || !(p <= q) || !q.is_finite() {
        return Verdict::scope("2.7", f64::NAN, "requires 1 < p <= q < inf");
    }
    let nr = cone.n_over_r();
    let k = nr - 1.0;
    let pp = conj(p);
    let scope = (nu + nr) / pp + (mu + nr) / q;
    if !(scope > 0.0) {
        return Verdict::scope("2.7", scope, "requires (nu+n/r)/p' + (mu+n/r)/q > 0");
    }
    Conditions::new("2.7")
        .less(Criterion::Scope, 0.0, scope)
        .equal(Criterion::Homogeneity, gamma, alpha + beta + nr - (nu + nr) / p + (mu + nr) / q)
        .less(Criterion::NuUpper, nu, p * (beta + 1.0) + k * (1.0 - p / q))
        .less(Criterion::MuLower, -q * alpha + k * (1.0 + q / pp), mu)
        .finish(VerdictStatus::SufficientOnlyBounded, VerdictStatus::Inconclusive)
}

/// The positive Bergman projection `P⁺_ν` from `L^{p,q}_ν` to `L^{p,s}_μ`.
pub fn decide_pplus_mixed(cone: &ConeDescriptor, nu: f64, mu: f64, p: f64, q: f64, s: f64) -> Verdict {
    let nr = cone.n_over_r();
    let k = nr - 1.0;
    if !finite_reals(&[nu, mu]) || !(p > 1.0 && p.is_finite()) || !(q > 1.0 && q <= s && s.is_finite()) {
        return Verdict::scope("5.1", f64::NAN, "requires 1 < p < inf and 1 < q <= s < inf");
    }
    if !(nu > k && mu > k) {
        return Verdict::scope("5.1", nu.min(mu) - k, "requires nu, mu > n/r - 1");
    }
    let upper = if k == 0.0 { f64::INFINITY } else { 1.0 + nu / k };
    Conditions::new("5.1")
        .equal(Criterion::WeightRatio, nu / q, mu / s)
        .less(Criterion::QLower, 1.0 + k / mu, q)
        .less(Criterion::QUpper, q, upper)
        .finish(VerdictStatus::Bounded, VerdictStatus::Unbounded)
}

/// `x / (y)₊`, with the quotient `+∞` when the positive part vanishes.
fn over_positive_part(x: f64, y: f64) -> f64 {
    if y > 0.0 {
        x / y
    } else {
        f64::INFINITY
    }
}

/// `q̃_{ν,p} = (ν + n/r - 1) / (n/(r p′) - 1)₊`.
pub fn q_tilde(cone: &ConeDescriptor, nu: f64, p: f64) -> f64 {
    let nr = cone.n_over_r();
    over_positive_part(nu + nr - 1.0, nr / conj(p) - 1.0)
}

/// Necessary conditions for the Bergman projection `P_γ` from
/// `L^{p,q}_ν` to `L^{p,s}_μ`. Returns `Unbounded` when one fails and
/// `Inconclusive` otherwise.
pub fn necessary_offdiag_pgamma(cone: &ConeDescriptor, nu: f64, mu: f64, gamma: f64, p: f64, q: f64, s: f64) -> Verdict {
    if !finite_reals(&[nu, mu, gamma]) || !exponent_ok(p) || !exponent_ok(q) || !exponent_ok(s) {
        return Verdict::scope("5.4", f64::NAN, "parameters must be real with p, q, s >= 1");
    }
    let nr = cone.n_over_r();
    let k = nr - 1.0;
    let pp = conj(p);
    Conditions::new("5.4")
        .less(Criterion::MuLower, k, mu)
        .less(Criterion::GammaWeight, (2.0 * nr - 1.0) * (1.0 / p).max(1.0 / pp), gamma + nr)
        .less(Criterion::SLower, over_positive_part(mu + k, gamma + nr / pp), s)
        .less(Criterion::QLower, over_positive_part(nu - k, gamma - k), q)
        .less(Criterion::QUpper, q, q_tilde(cone, nu, p))
        .finish(VerdictStatus::Inconclusive, VerdictStatus::Unbounded)
}
