use conebound::decision::*;
use conebound::lab::*;
use conebound::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tuple(cone: &ConeDescriptor, alpha: f64, beta: f64, nu: f64, mu: f64, p: f64, q: f64) -> SParams {
    let gamma = alpha + beta + cone.n_over_r() - nu / p + mu / q;
    SParams { alpha, beta, gamma, nu, mu, p, q }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn apply_s_is_linear(seed in 0u64..1000, w1 in 0.1f64..3.0, w2 in 0.1f64..3.0, y in 0.1f64..5.0) {
        let cone = ConeDescriptor::half_line();
        let prm = tuple(&cone, 0.2, 0.5, 1.0, 1.0, 2.0, 2.0);
        let cfg = QuadratureConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_test_function(&cone, &mut rng, None);
        let g = TestFunction::power(2.0, cone.identity());
        let at = ConePoint::new(vec![y]);
        let mix = TestFunction::mixture(vec![f.clone(), g.clone()], vec![w1, w2]);
        let lhs = apply_s(&cone, &prm, &mix, &at, &cfg).unwrap();
        let rhs = w1 * apply_s(&cone, &prm, &f, &at, &cfg).unwrap() + w2 * apply_s(&cone, &prm, &g, &at, &cfg).unwrap();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-9, "{} vs {}", lhs, rhs);
    }
}

/// Away from the thresholds the probes agree with the verdict.
#[test]
fn probes_agree_with_decisions_on_the_half_line() {
    let cone = ConeDescriptor::half_line();
    let cfg = QuadratureConfig::coarse();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 40 {
        let prm = tuple(
            &cone,
            rand::Rng::gen_range(&mut rng, -1.0..2.0),
            rand::Rng::gen_range(&mut rng, -1.0..2.0),
            rand::Rng::gen_range(&mut rng, 0.0..3.0),
            rand::Rng::gen_range(&mut rng, 0.0..3.0),
            2.0,
            3.0,
        );
        let v = decide_s(&cone, &prm);
        if v.status == VerdictStatus::ScopeError || v.margins.iter().any(|(c, m)| *c != Criterion::Homogeneity && m.abs() < 0.1) {
            continue;
        }
        let probes = necessity_probe_s(&cone, &prm, &cfg).unwrap();
        assert_eq!(probes.both_converge(), v.status == VerdictStatus::Bounded, "{prm:?}: {probes:?} vs {v:?}");
        checked += 1;
    }
}

#[test]
fn scan_grid_shape_and_csv() {
    let cone = ConeDescriptor::lorentz(3).unwrap();
    let base = ScanPoint { alpha: 0.3, beta: 0.4, gamma: 2.0, nu: 1.0, mu: 1.0, p: 2.0, q: 3.0, s: 3.0 };
    let (g1, g2) = (linspace(0.5, 4.0, 7), linspace(-1.0, 3.0, 5));
    let rep = scan_phase_diagram(&cone, ScanOperator::S, &base, [Axis::Gamma, Axis::Mu], &g1, &g2, None).unwrap();
    assert_eq!(rep.rows(), 35);
    let csv = rep.to_csv().unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("axis1,axis2,status,violated,indicator"));
    assert_eq!(lines.count(), 35);
    // every cell matches a direct decision
    for (i, a) in g1.iter().enumerate() {
        for (j, b) in g2.iter().enumerate() {
            let mut pt = base;
            pt.set(Axis::Gamma, *a);
            pt.set(Axis::Mu, *b);
            assert_eq!(rep.statuses[i][j], decide_s(&cone, &pt.s_params()).status);
        }
    }
    let again = scan_phase_diagram(&cone, ScanOperator::S, &base, [Axis::Gamma, Axis::Mu], &g1, &g2, None).unwrap();
    assert_eq!(again.to_csv().unwrap(), csv);
}

#[test]
fn unbounded_tuples_have_unbounded_norm_ratios() {
    let cone = ConeDescriptor::half_line();
    let cfg = QuadratureConfig::default();
    // homogeneity broken by 0.5: the dilation slope is r·0.5 ≠ 0
    let mut prm = tuple(&cone, 0.3, 0.4, 1.0, 1.0, 2.0, 2.0);
    prm.gamma -= 0.5;
    let rep = dilation_probe(&cone, &prm, &unit_ball(&cone), &[0.25, 0.5, 1.0, 2.0, 4.0], &cfg).unwrap();
    assert!((rep.slope.abs() - 0.5).abs() < 0.02, "{rep:?}");
}
