//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so each line shows up in `cargo test` output.

use std::time::Instant;

use conebound::analytic::{lemma31_integral, lemma32_norm_exponent, lemma32_norm_power, Lemma31Query, Lemma32Query};
use conebound::certificate::{
    default_samples, default_tube_samples, find_certificate_s, find_certificate_tplus, identity_residuals,
    okikiolu_generic_check, verify_certificate_s, verify_certificate_tplus, OkikioluProblem, Witness,
};
use conebound::decision::{decide_pplus_mixed, decide_s, decide_tplus_mixed, sufficient_tplus_pure};
use conebound::lab::{dilation_probe, necessity_probe_s, norms_s, random_test_function, unit_ball};
use conebound::quadrature::{ConeSample, Symmetry};
use conebound::special::ln_gamma;
use conebound::{ConeDescriptor, ConePoint, Criterion, QuadratureConfig, SParams, TParams, Verdict, VerdictStatus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn cones3() -> Vec<ConeDescriptor> {
    vec![ConeDescriptor::half_line(), ConeDescriptor::lorentz(3).unwrap(), ConeDescriptor::spd(2).unwrap()]
}

fn spread(xs: &[f64]) -> f64 {
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi / lo - 1.0
}

/// Every strict condition at least `m` away from its threshold, and no
/// homogeneity violation smaller than 0.1.
fn well_separated(v: &Verdict, m: f64) -> bool {
    v.margins.iter().all(|(c, x)| match c {
        Criterion::Homogeneity => x.abs() < 1e-9 || x.abs() >= 0.1,
        Criterion::Scope => *x >= m,
        _ => x.abs() >= m,
    })
}

fn homogeneous_gamma(cone: &ConeDescriptor, a: f64, b: f64, nu: f64, mu: f64, p: f64, q: f64) -> f64 {
    let mq = if q.is_finite() { mu / q } else { 0.0 };
    a + b + cone.n_over_r() - nu / p + mq
}

fn criterion1() -> Outcome {
    let cfg = QuadratureConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_spread: f64 = 0.0;
    let mut worst_gamma: f64 = 0.0;
    for cone in cones3() {
        let k = cone.n_over_r() - 1.0;
        for _ in 0..10 {
            let t = k + rng.gen_range(0.2..2.0);
            let s = -t - k - rng.gen_range(0.2..2.0);
            let q = Lemma31Query::scalar(cone, s, t);
            let mut ratios = Vec::new();
            for _ in 0..5 {
                let v = cone.random_point(&mut rng);
                let est = lemma31_integral(&q.clone().at(v.clone()), &cfg).map_err(|e| e.to_string())?;
                let det = cone.determinant(&v).map_err(|e| e.to_string())?;
                ratios.push(est.value / det.powf(s + t));
            }
            let sp = spread(&ratios);
            worst_spread = worst_spread.max(sp);
            if sp > 0.01 {
                return Err(format!("{cone} s={s:.3} t={t:.3}: spread {sp:.2e}"));
            }
            if cone.dim() == 1 {
                let exact = (ln_gamma(t) + ln_gamma(-s - t) - ln_gamma(-s)).exp();
                let rel = (ratios[0] / exact - 1.0).abs();
                worst_gamma = worst_gamma.max(rel);
                if rel > 1e-6 {
                    return Err(format!("half-line s={s:.3} t={t:.3}: {} vs {exact} ({rel:.2e})", ratios[0]));
                }
            }
        }
    }
    Ok(format!("worst spread {worst_spread:.2e}, worst Gamma-formula error {worst_gamma:.2e}"))
}

/// A random 1 < p ≤ q < ∞ tuple with every margin at least 0.05 whose
/// verdict is Bounded when `bounded`, Unbounded otherwise.
fn separated_tuple(cone: &ConeDescriptor, rng: &mut ChaCha8Rng, bounded: bool, homog_only: bool) -> (SParams, Verdict) {
    let k = cone.n_over_r() - 1.0;
    loop {
        let p = rng.gen_range(1.2..3.0);
        let q = rng.gen_range(p..4.0);
        let alpha = rng.gen_range(-0.5..1.5);
        let beta = rng.gen_range(-0.5..1.5);
        let nu = rng.gen_range(k - 0.5..k + 3.0);
        let mu = rng.gen_range(-0.5..3.0);
        let mut gamma = homogeneous_gamma(cone, alpha, beta, nu, mu, p, q);
        let violate = !bounded && (homog_only || rng.gen_bool(0.3));
        if violate {
            gamma += if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(0.1..1.0);
        }
        let prm = SParams { alpha, beta, gamma, nu, mu, p, q };
        let v = decide_s(cone, &prm);
        if v.theorem != "2.1" || !well_separated(&v, 0.05) {
            continue;
        }
        let want = if bounded { VerdictStatus::Bounded } else { VerdictStatus::Unbounded };
        if v.status != want {
            continue;
        }
        if homog_only && v.violated != [Criterion::Homogeneity] {
            continue;
        }
        return (prm, v);
    }
}

fn criterion2() -> Outcome {
    let cfg = QuadratureConfig::coarse();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut counts = Vec::new();
    for cone in cones3() {
        let f = unit_ball(&cone);
        let mut bounded = 0;
        for i in 0..200 {
            let (prm, v) = separated_tuple(&cone, &mut rng, i % 2 == 0, i % 6 == 1);
            let nec = necessity_probe_s(&cone, &prm, &cfg).map_err(|e| e.to_string())?;
            let mut slope = f64::NAN;
            let probe_bounded = nec.both_converge() && {
                let rep = dilation_probe(&cone, &prm, &f, &[0.5, 1.0, 2.0], &cfg).map_err(|e| format!("{cone} {prm:?}: {e}"))?;
                slope = rep.slope;
                slope.abs() <= 0.05
            };
            if probe_bounded != (v.status == VerdictStatus::Bounded) {
                return Err(format!("{cone} {prm:?}: verdict {} but probes {nec:?}, slope {slope}", v.status));
            }
            bounded += probe_bounded as usize;
        }
        counts.push(format!("{cone}: 200 agree ({bounded} bounded)"));
    }
    Ok(counts.join("; "))
}

/// A Bounded tuple for the cone operator, through the p > 1 or p = 1
/// theorem, with margins at least 0.05.
fn bounded_tuple(cone: &ConeDescriptor, rng: &mut ChaCha8Rng, p_one: bool) -> SParams {
    let k = cone.n_over_r() - 1.0;
    loop {
        let p: f64 = if p_one { 1.0 } else { rng.gen_range(1.2..3.0) };
        let q = rng.gen_range(p.max(1.2)..4.0);
        let alpha = rng.gen_range(-0.5..1.5);
        let beta = rng.gen_range(-0.5..1.5);
        let nu = rng.gen_range(k - 0.5..k + 3.0);
        let mu = rng.gen_range(0.05..3.0);
        let gamma = homogeneous_gamma(cone, alpha, beta, nu, mu, p, q);
        let prm = SParams { alpha, beta, gamma, nu, mu, p, q };
        let v = decide_s(cone, &prm);
        if v.status == VerdictStatus::Bounded && well_separated(&v, 0.05) {
            return prm;
        }
    }
}

fn criterion3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let h = ConeDescriptor::half_line();
    let l = ConeDescriptor::lorentz(3).unwrap();
    let mut worst_ratio: f64 = 0.0;
    let mut worst_spread: f64 = 0.0;
    let mut vector = 0;
    for i in 0..50 {
        let cone = if i % 2 == 0 { h } else { l };
        let cfg = if cone.dim() == 1 { QuadratureConfig::default() } else { QuadratureConfig::coarse() };
        let prm = bounded_tuple(&cone, &mut rng, i % 3 == 0);
        let cert = find_certificate_s(&cone, &prm).map_err(|e| format!("{cone} {prm:?}: {e}"))?;
        vector += !cert.u.is_scalar() as usize;
        let (done, rep) = verify_certificate_s(&cone, &prm, &cert, &cfg, &default_samples(&cone))
            .map_err(|e| format!("{cone} {prm:?}: {e}"))?;
        worst_spread = worst_spread.max(if prm.p == 1.0 { spread(&rep.ratios2) } else { rep.spread() });
        let bound = done.m1.unwrap() * done.m2.unwrap();
        let power = (cone.dim() == 1 && prm.nu > 0.05 && prm.beta > -0.9).then(|| (prm.nu + 1.0) / prm.p + 0.3);
        for _ in 0..20 {
            let g = random_test_function(&cone, &mut rng, power);
            let n = norms_s(&cone, &prm, &g, &QuadratureConfig::coarse()).map_err(|e| format!("{cone} {prm:?} {g:?}: {e}"))?;
            let r = n.ratio() / bound;
            worst_ratio = worst_ratio.max(r);
            if !(r <= 1.05) {
                return Err(format!("{cone} {prm:?}: ‖Sg‖/‖g‖ = {} exceeds M1·M2 = {bound}", n.ratio()));
            }
        }
    }
    Ok(format!(
        "50 certificates ({vector} generalized-power), worst ratio spread {worst_spread:.2e}, worst ‖Sg‖/(M1M2‖g‖) {worst_ratio:.3}"
    ))
}

fn criterion4() -> Outcome {
    let cfg = QuadratureConfig::default();
    let mut lines = Vec::new();
    for cone in [ConeDescriptor::half_line(), ConeDescriptor::lorentz(3).unwrap()] {
        let nr = cone.n_over_r();
        let k = nr - 1.0;
        let (p, q, alpha, beta) = (2.0, 3.0, 0.3, 0.4);
        let with = |nu: f64, mu: f64, q: f64| SParams {
            alpha,
            beta,
            gamma: homogeneous_gamma(&cone, alpha, beta, nu, mu, p, q),
            nu,
            mu,
            p,
            q,
        };
        let cases = [
            (Criterion::MuLower, with(k + 1.0, k - q * alpha, q), true),
            (Criterion::MuUpper, with(p * (beta + nr - k / q), 1.0, q), true),
            (Criterion::NuLower, with(k + 2.0, q * (k * (1.0 - 1.0 / p) - alpha), q), false),
            (Criterion::NuUpper, with(p * (beta + 1.0) + k, 1.0, q), false),
            (Criterion::AlphaLower, SParams { alpha: k - k / p, ..with(k + 1.0, 0.0, f64::INFINITY) }, false),
        ];
        for (crit, prm, direct) in cases {
            let prm = SParams { gamma: homogeneous_gamma(&cone, prm.alpha, prm.beta, prm.nu, prm.mu, p, prm.q), ..prm };
            let v = decide_s(&cone, &prm);
            let m = v.margin(crit).ok_or_else(|| format!("{crit:?} not evaluated for {prm:?}"))?;
            if m.abs() > 1e-9 {
                return Err(format!("{cone} {crit:?}: not at threshold (margin {m})"));
            }
            let rep = necessity_probe_s(&cone, &prm, &cfg).map_err(|e| e.to_string())?;
            let probe = if direct { &rep.direct } else { &rep.adjoint };
            if probe.converges {
                return Err(format!("{cone} {crit:?} at threshold: {} integral reported convergent", if direct { "direct" } else { "adjoint" }));
            }
        }
        lines.push(format!("{cone}: 5/5 diverge"));
    }
    Ok(lines.join("; "))
}

fn criterion5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let cones = [
        ConeDescriptor::half_line(),
        ConeDescriptor::lorentz(3).unwrap(),
        ConeDescriptor::lorentz(5).unwrap(),
        ConeDescriptor::spd(2).unwrap(),
        ConeDescriptor::spd(3).unwrap(),
    ];
    let mut tally = std::collections::BTreeMap::new();
    for i in 0..1000 {
        let cone = cones[i % cones.len()];
        let nr = cone.n_over_r();
        let k = nr - 1.0;
        let p = rng.gen_range(1.05..6.0);
        let q = rng.gen_range(1.05..6.0);
        let s = if rng.gen_bool(0.2) { q } else { rng.gen_range(q..8.0) };
        let nu = k + rng.gen_range(0.01..3.0);
        let mu = if i % 2 == 0 { nu * s / q } else { k + rng.gen_range(0.01..4.0) };
        let a = decide_pplus_mixed(&cone, nu, mu, p, q, s);
        let b = decide_tplus_mixed(&cone, &TParams { alpha: 0.0, beta: nu - nr, gamma: nu, nu, mu, p, q, s });
        if a.status != b.status {
            return Err(format!("{cone} nu={nu} mu={mu} p={p} q={q} s={s}: {} vs {}", a.status, b.status));
        }
        *tally.entry(a.status.to_string()).or_insert(0) += 1;
    }
    Ok(format!("1000 agree {tally:?}"))
}

fn criterion6() -> Outcome {
    let cone = ConeDescriptor::half_line();
    let cfg = QuadratureConfig::default();
    let sets = [(1.3, 2.0, 2.0, 1.0), (2.0, 1.5, 3.0, 0.5), (1.5, 3.0, 2.0, 2.0), (2.5, 2.0, 4.0, 1.5), (1.2, 4.0, 4.0, 0.3)];
    let ts = [0.5, 1.0, 2.0, 4.0];
    let mut worst: f64 = 0.0;
    for (alpha, p, q, nu) in sets {
        let query = |t: f64| Lemma32Query { cone, alpha, p, q, nu, t: ConePoint::new(vec![t]) };
        let expected = lemma32_norm_exponent(&query(1.0)).map_err(|e| e.to_string())?;
        let mut ys = Vec::new();
        for &t in &ts {
            let est = lemma32_norm_power(&query(t), &cfg).map_err(|e| e.to_string())?;
            ys.push(est.value.ln());
        }
        let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        let rel = (slope / expected - 1.0).abs();
        worst = worst.max(rel);
        if rel > 0.01 {
            return Err(format!("alpha={alpha} p={p} q={q} nu={nu}: slope {slope} vs {expected}"));
        }
    }
    Ok(format!("5 sets, worst relative slope error {worst:.2e}"))
}

fn criterion7() -> Outcome {
    let cone = ConeDescriptor::half_line();
    let cfg = QuadratureConfig::coarse();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst_spread: f64 = 0.0;
    let mut worst_id: f64 = 0.0;
    let mut done = 0;
    while done < 10 {
        let p = rng.gen_range(1.2..3.0);
        let q = rng.gen_range(p..4.0);
        let alpha = rng.gen_range(-0.5..1.5);
        let beta = rng.gen_range(-0.5..1.5);
        let nu = rng.gen_range(-0.5..3.0);
        let mu = rng.gen_range(-0.5..3.0);
        let gamma = alpha + beta + 1.0 - (nu + 1.0) / p + (mu + 1.0) / q;
        let prm = SParams { alpha, beta, gamma, nu, mu, p, q };
        let v = sufficient_tplus_pure(&cone, &prm);
        if v.status != VerdictStatus::SufficientOnlyBounded || !well_separated(&v, 0.05) {
            continue;
        }
        let cert = find_certificate_tplus(&cone, &prm).map_err(|e| format!("{prm:?}: {e}"))?;
        let id = identity_residuals(&cone, &prm, &cert).iter().fold(0.0f64, |m, r| m.max(r.abs()));
        worst_id = worst_id.max(id);
        if id > 1e-12 {
            return Err(format!("{prm:?}: identities off by {id:.2e}"));
        }
        let (_, rep) = verify_certificate_tplus(&cone, &prm, &cert, &cfg, &default_tube_samples(&cone))
            .map_err(|e| format!("{prm:?}: {e}"))?;
        worst_spread = worst_spread.max(rep.spread());
        done += 1;
    }
    Ok(format!("10 tube certificates, worst J-ratio spread {worst_spread:.2e}, worst identity residual {worst_id:.1e}"))
}

fn criterion8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let cfg = QuadratureConfig::coarse();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..12 {
        let cone = if i % 3 == 2 { ConeDescriptor::lorentz(3).unwrap() } else { ConeDescriptor::half_line() };
        let prm = bounded_tuple(&cone, &mut rng, true);
        let cert = find_certificate_s(&cone, &prm).map_err(|e| e.to_string())?;
        let (Witness::Scalar(u), Witness::Scalar(v)) = (&cert.u, &cert.v) else {
            return Err("p = 1 certificate should be scalar".into());
        };
        let (u, v) = (*u, *v);
        let b = prm.beta - prm.nu + cone.n_over_r();
        let (alpha, gamma) = (prm.alpha, prm.gamma);
        let kernel = move |y: &ConeSample<'_>, x: &ConeSample<'_>| alpha * y.ln_det() - gamma * y.ln_det_sum(x) + b * x.ln_det();
        let phi1 = move |x: &ConeSample<'_>| -u * x.ln_det();
        let phi2 = move |y: &ConeSample<'_>| -v * y.ln_det();
        let prob = OkikioluProblem {
            cone,
            ln_kernel: &kernel,
            ln_phi1: &phi1,
            ln_phi2: &phi2,
            t: cert.t,
            p: 1.0,
            q: prm.q,
            nu: prm.nu,
            mu: prm.mu,
            symmetry: Symmetry::Axial,
        };
        let rep = okikiolu_generic_check(&prob, &default_samples(&cone), &cfg).map_err(|e| e.to_string())?;
        let sup = rep.ratios1.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(sup);
        if !(sup <= 1.0 + 1e-9) {
            return Err(format!("{cone} {prm:?}: sup {sup}"));
        }
    }
    Ok(format!("12 constructions, largest sampled sup {worst:.12}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 integral lemma oracle", criterion1),
        ("2 decision/probe agreement", criterion2),
        ("3 certificate soundness", criterion3),
        ("4 sharpness at the boundary", criterion4),
        ("5 projection reduction", criterion5),
        ("6 mixed-norm exponent scaling", criterion6),
        ("7 tube certificates", criterion7),
        ("8 p = 1 supremum condition", criterion8),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.starts_with(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("criterion {name}: PASS ({secs:.1}s) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL ({secs:.1}s) {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
