//! Importance-sampled Monte Carlo for cones without a tensor rule
//! (Λ_n with n > 3 and SPD(r) with r ≥ 3). Seeded, so still deterministic,
//! but only good to a percent or so.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cone::{ln_sphere_area, ConeSample, Eval, MAX_DIM};
use super::{QuadratureConfig, QuadratureEstimate};
use crate::cone::{random_unit, spd_index, ConeDescriptor, ConeKind};
use crate::error::{Error, Result};

const SEED: u64 = 0x0c0e_b0d5;
/// Scale of the logistic density used for log-radial variables.
const LOGISTIC: f64 = 2.0;
/// Exponent λ of the density λ w^{λ-1} near the cone boundary.
const BOUNDARY: f64 = 0.5;

fn logistic<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u: f64 = rng.gen_range(1e-12..1.0 - 1e-12);
    let x = LOGISTIC * (u / (1.0 - u)).ln();
    let e = (-x.abs() / LOGISTIC).exp();
    let ln_q = -x.abs() / LOGISTIC - LOGISTIC.ln() - 2.0 * e.ln_1p();
    (x, ln_q)
}

pub(crate) fn integrate(cone: &ConeDescriptor, f: &Eval<'_>, cfg: &QuadratureConfig) -> Result<QuadratureEstimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let n = cone.dim();
    let m = cfg.mc_samples.max(2);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..m {
        let (coords, ln_det, ln_jac) = match cone.kind() {
            ConeKind::Lorentz(_) => lorentz_sample(&mut rng, n),
            ConeKind::Spd(r) => spd_sample(&mut rng, r),
            ConeKind::HalfLine => return Err(Error::Unsupported("half-line has a tensor rule".into())),
        };
        let s = ConeSample::new(cone, &coords[..n], ln_det);
        let (sign, ln_f) = f(&s);
        let c = if ln_f == f64::NEG_INFINITY { 0.0 } else { sign * (ln_f + ln_jac).exp() };
        sum += c;
        sum2 += c * c;
    }
    let mean = sum / m as f64;
    let var = (sum2 / m as f64 - mean * mean).max(0.0);
    let rel_err = if mean == 0.0 { 0.0 } else { (var / m as f64).sqrt() / mean.abs() };
    Ok(QuadratureEstimate {
        value: mean,
        rel_err,
        converged: mean.is_finite() && rel_err <= cfg.target_rel_err.max(1e-2),
        diverging: !mean.is_finite(),
        level: 0,
        evaluations: m as u64,
    })
}

/// Returns (coords, ln Δ, ln(Jacobian / density)).
fn lorentz_sample<R: Rng>(rng: &mut R, n: usize) -> ([f64; MAX_DIM], f64, f64) {
    let (ln_a, ln_qa) = logistic(rng);
    let u: f64 = rng.gen_range(1e-300..1.0);
    // w = u^{1/λ} has density λ w^{λ-1}
    let ln_w = u.ln() / BOUNDARY;
    let w = ln_w.exp();
    let ln_qw = BOUNDARY.ln() + (BOUNDARY - 1.0) * ln_w;
    let a = ln_a.exp();
    let rho = 0.5 * a * (1.0 - w);
    let dir = random_unit(rng, n - 1);
    let mut c = [0.0; MAX_DIM];
    c[0] = a * w + rho;
    for (k, d) in dir.iter().enumerate() {
        c[k + 1] = rho * d;
    }
    let ln_rho = rho.ln();
    // dy = |S^{n-2}| ρ^{n-2} (a/2) da dw, da = a d(ln a); directions are
    // uniform so the sphere area cancels against their density
    let ln_jac = ln_sphere_area(n - 2) + (n - 2) as f64 * ln_rho + 2.0 * ln_a - std::f64::consts::LN_2;
    (c, 2.0 * ln_a + ln_w, ln_jac - ln_qa - ln_qw)
}

/// Y = L Lᵀ with lower-triangular L; dY = 2^r ∏ ℓ_ii^{r-i+1} dL.
fn spd_sample<R: Rng>(rng: &mut R, r: usize) -> ([f64; MAX_DIM], f64, f64) {
    let mut l = vec![0.0; r * r];
    let mut ln_jac = r as f64 * std::f64::consts::LN_2;
    let mut ln_det = 0.0;
    for i in 0..r {
        let (x, ln_q) = logistic(rng);
        l[i * r + i] = x.exp();
        // ℓ_ii^{r-i} (0-based i) times dℓ = ℓ dx
        ln_jac += (r - i + 1) as f64 * x - ln_q;
        ln_det += 2.0 * x;
        for j in 0..i {
            let t: f64 = rng.gen_range(-0.5..0.5) * std::f64::consts::PI;
            let v = t.tan();
            l[i * r + j] = v;
            ln_jac += (std::f64::consts::PI * (1.0 + v * v)).ln();
        }
    }
    let mut c = [0.0; MAX_DIM];
    for i in 0..r {
        for j in i..r {
            let mut s = 0.0;
            for k in 0..=i {
                s += l[i * r + k] * l[j * r + k];
            }
            c[spd_index(r, i, j)] = s;
        }
    }
    (c, ln_det, ln_jac)
}
