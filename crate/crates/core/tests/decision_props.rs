use conebound::decision::*;
use conebound::*;
use proptest::prelude::*;

fn cones() -> Vec<ConeDescriptor> {
    vec![
        ConeDescriptor::half_line(),
        ConeDescriptor::lorentz(3).unwrap(),
        ConeDescriptor::lorentz(5).unwrap(),
        ConeDescriptor::spd(2).unwrap(),
        ConeDescriptor::spd(3).unwrap(),
    ]
}

fn homogeneous(cone: &ConeDescriptor, alpha: f64, beta: f64, nu: f64, mu: f64, p: f64, q: f64) -> SParams {
    let gamma = alpha + beta + cone.n_over_r() - nu / p + mu / q;
    SParams { alpha, beta, gamma, nu, mu, p, q }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pplus_is_tplus_with_bergman_exponents(
        ci in 0usize..5, dnu in 0.01f64..4.0, p in 1.01f64..5.0, dq in 0.0f64..4.0, ds in 0.0f64..4.0, ratio in prop::bool::ANY
    ) {
        // inside the projection's own hypotheses ν, μ > n/r - 1
        let cone = cones()[ci];
        let nu = cone.n_over_r() - 1.0 + dnu;
        let q = p + dq;
        let s = q + ds;
        let mu = if ratio { nu * s / q } else { nu * s / q + 0.3 };
        let pp = decide_pplus_mixed(&cone, nu, mu, p, q, s);
        let tp = decide_tplus_mixed(&cone, &TParams { alpha: 0.0, beta: nu - cone.n_over_r(), gamma: nu, nu, mu, p, q, s });
        prop_assert_eq!(pp.status, tp.status);
    }

    #[test]
    fn violated_criteria_have_nonpositive_margins(
        ci in 0usize..5, alpha in -1.0f64..2.0, beta in -1.0f64..2.0, nu in -1.0f64..4.0, mu in -1.0f64..4.0,
        p in 1.0f64..4.0, dq in 0.0f64..3.0, homog in prop::bool::ANY, dg in -1.0f64..1.0
    ) {
        let cone = cones()[ci];
        let mut prm = homogeneous(&cone, alpha, beta, nu, mu, p, p + dq);
        if !homog {
            prm.gamma += dg;
        }
        let v = decide_s(&cone, &prm);
        for (c, m) in &v.margins {
            if *c == Criterion::Homogeneity || *c == Criterion::Scope {
                continue;
            }
            prop_assert_eq!(v.violated.contains(c), *m <= 0.0, "{:?} margin {} in {:?}", c, m, v);
        }
        if v.status == VerdictStatus::Bounded {
            prop_assert!(v.violated.is_empty());
            prop_assert!(v.margins.values().all(|m| *m >= 0.0));
        }
    }

    #[test]
    fn diagonal_shift_keeps_gamma(
        ci in 0usize..5, alpha in -0.5f64..1.5, beta in -0.5f64..1.5, nu in 0.1f64..3.0, p in 1.1f64..4.0, c in -0.5f64..0.5
    ) {
        let cone = cones()[ci];
        let a = homogeneous(&cone, alpha, beta, nu, nu, p, p);
        prop_assert!((a.gamma - (alpha + beta + cone.n_over_r())).abs() < 1e-12);
        let b = homogeneous(&cone, alpha, beta, nu + c, nu + c, p, p);
        prop_assert!((a.gamma - b.gamma).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip(ci in 0usize..5, alpha in -1.0f64..2.0, nu in 0.0f64..3.0, p in 1.0f64..4.0, qinf in prop::bool::ANY) {
        let cone = cones()[ci];
        let q = if qinf { f64::INFINITY } else { p + 1.0 };
        let prm = homogeneous(&cone, alpha, 0.5, nu, 1.0, p, q);
        let v = decide_s(&cone, &prm);
        let back: Verdict = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        prop_assert_eq!(&back, &v);
        let back: SParams = serde_json::from_str(&serde_json::to_string(&prm).unwrap()).unwrap();
        prop_assert!(back.q == prm.q && back.gamma == prm.gamma);
    }
}

/// Crossing one threshold flips the verdict exactly where the margin
/// changes sign.
#[test]
fn margins_change_sign_with_the_verdict() {
    let cone = ConeDescriptor::lorentz(3).unwrap();
    let base = |mu: f64| homogeneous(&cone, 0.3, 0.4, 1.0, mu, 2.0, 3.0);
    let mut prev: Option<(bool, Vec<bool>)> = None;
    for i in 0..400 {
        let mu = -2.0 + 0.02 * i as f64;
        let v = decide_s(&cone, &base(mu));
        let signs: Vec<bool> =
            v.margins.iter().filter(|(c, _)| **c != Criterion::Homogeneity).map(|(_, m)| *m > 0.0).collect();
        let ok = v.status == VerdictStatus::Bounded;
        if let Some((pok, psigns)) = &prev {
            if *pok != ok {
                assert_ne!(psigns, &signs, "verdict flipped at mu = {mu} without a margin sign change");
            }
        }
        prev = Some((ok, signs));
    }
}

#[test]
fn half_line_diagonal_agrees_with_tplus_sufficiency() {
    let cone = ConeDescriptor::half_line();
    let mut agree = 0;
    for a in 0..8 {
        for b in 0..8 {
            for n in 0..6 {
                let prm = homogeneous(&cone, -0.35 + 0.3 * a as f64, -0.85 + 0.3 * b as f64, 0.15 + 0.5 * n as f64, 0.15 + 0.5 * n as f64, 2.0, 2.0);
                let s = decide_s(&cone, &prm);
                let t = sufficient_tplus_pure(&cone, &prm);
                if t.status == VerdictStatus::ScopeError {
                    continue;
                }
                assert_eq!(s.is_bounded(), t.is_bounded(), "{prm:?}: {s:?} vs {t:?}");
                agree += 1;
            }
        }
    }
    assert!(agree > 50);
}
