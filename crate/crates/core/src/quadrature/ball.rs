//! Product Gauss rules on balls strictly inside the cone. The rule is built
//! in polar coordinates about the center, so the node set of `B(λc, λR)` is
//! exactly the λ-dilate of the node set of `B(c, R)`.

use serde::{Deserialize, Serialize};

use super::cone::{ConeSample, MAX_DIM};
use super::rules::gauss_legendre;
use crate::cone::{lorentz3_from_spd2, spd2_from_lorentz3, ConeDescriptor, ConeKind, ConePoint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallRule {
    pub radial: usize,
    pub polar: usize,
    pub azimuthal: usize,
}

impl Default for BallRule {
    fn default() -> Self {
        BallRule { radial: 6, polar: 6, azimuthal: 8 }
    }
}

impl BallRule {
    pub fn fine() -> Self {
        BallRule { radial: 12, polar: 12, azimuthal: 24 }
    }
}

/// Precomputed nodes `(coords, ln Δ, weight)` of a ball rule.
#[derive(Debug, Clone)]
pub(crate) struct BallNodes {
    pub nodes: Vec<([f64; MAX_DIM], f64, f64)>,
}

impl BallNodes {
    pub fn new(cone: &ConeDescriptor, center: &ConePoint, radius: f64, rule: BallRule) -> Result<BallNodes> {
        if !(radius > 0.0) || cone.boundary_distance(center)? < radius {
            return Err(Error::Precondition("ball must lie inside the cone".into()));
        }
        let c = center.coords();
        let mut nodes = Vec::new();
        match cone.kind() {
            ConeKind::HalfLine | ConeKind::Spd(1) => {
                for (x, w) in gauss_legendre(2 * rule.radial) {
                    let y = c[0] + radius * x;
                    let mut p = [0.0; MAX_DIM];
                    p[0] = y;
                    nodes.push((p, y.ln(), radius * w));
                }
            }
            ConeKind::Lorentz(3) | ConeKind::Spd(2) => {
                let spd = matches!(cone.kind(), ConeKind::Spd(_));
                // Frobenius radius R in SPD coordinates is radius R/√2 in Λ₃
                let (c3, r3, jac) = if spd {
                    (lorentz3_from_spd2(c), radius / std::f64::consts::SQRT_2, 2.0)
                } else {
                    ([c[0], c[1], c[2]], radius, 1.0)
                };
                let gr = gauss_legendre(rule.radial);
                let gu = gauss_legendre(rule.polar);
                let dpsi = 2.0 * std::f64::consts::PI / rule.azimuthal as f64;
                for &(xr, wr) in &gr {
                    let rr = 0.5 * r3 * (xr + 1.0);
                    let wrr = 0.5 * r3 * wr * rr * rr;
                    for &(u, wu) in &gu {
                        let s = (1.0 - u * u).sqrt();
                        for k in 0..rule.azimuthal {
                            let psi = (k as f64 + 0.5) * dpsi;
                            let y = [c3[0] + rr * u, c3[1] + rr * s * psi.cos(), c3[2] + rr * s * psi.sin()];
                            let det = y[0] * y[0] - y[1] * y[1] - y[2] * y[2];
                            let mut p = [0.0; MAX_DIM];
                            if spd {
                                p[..3].copy_from_slice(&spd2_from_lorentz3(&y));
                            } else {
                                p[..3].copy_from_slice(&y);
                            }
                            nodes.push((p, det.ln(), jac * wrr * wu * dpsi));
                        }
                    }
                }
            }
            _ => return Err(Error::Unsupported(format!("ball rules for {cone}"))),
        }
        Ok(BallNodes { nodes })
    }

    pub fn sum(&self, cone: &ConeDescriptor, f: impl Fn(&ConeSample<'_>) -> f64) -> f64 {
        let mut acc = 0.0;
        for (p, ln_det, w) in &self.nodes {
            let s = ConeSample::new(cone, &p[..cone.dim()], *ln_det);
            acc += w * f(&s);
        }
        acc
    }
}

/// `∫_{B(center, radius)} f(y) dy`, Frobenius balls on SPD(2).
pub fn integrate_ball<F>(cone: &ConeDescriptor, center: &ConePoint, radius: f64, f: F, rule: BallRule) -> Result<f64>
where
    F: Fn(&ConeSample<'_>) -> f64,
{
    Ok(BallNodes::new(cone, center, radius, rule)?.sum(cone, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        let l = ConeDescriptor::lorentz(3).unwrap();
        let v = integrate_ball(&l, &l.identity(), 0.5, |_| 1.0, BallRule::default()).unwrap();
        assert!((v - 4.0 / 3.0 * PI * 0.125).abs() < 1e-12);
        let h = ConeDescriptor::half_line();
        let v = integrate_ball(&h, &ConePoint::new(vec![2.0]), 0.5, |s| s.coords()[0], BallRule::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        // SPD(2): Frobenius ball of radius R in (y11, y12, y22) has volume
        // (4/3)πR³ / √2 since y12 counts twice in the norm
        let m = ConeDescriptor::spd(2).unwrap();
        let v = integrate_ball(&m, &m.identity(), 0.5, |_| 1.0, BallRule::default()).unwrap();
        assert!((v - 4.0 / 3.0 * PI * 0.125 / 2f64.sqrt()).abs() < 1e-12, "{v}");
    }

    #[test]
    fn ball_must_sit_inside() {
        let l = ConeDescriptor::lorentz(3).unwrap();
        assert!(integrate_ball(&l, &l.identity(), 0.8, |_| 1.0, BallRule::default()).is_err());
    }
}
