//! Jordan-algebra primitives for the three cone families: the half-line,
//! the Lorentz cone Λ_n and the cone of positive definite r×r matrices.
//!
//! Points are plain coordinate vectors. SPD points use the upper triangle in
//! row-major order, so `SPD(2)` points are `(y11, y12, y22)`.
//!
//! The Lorentz principal minors are taken in the frame where
//! `Δ₁(y) = y₁ + y_n` and `Δ₂ = Δ`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConeKind {
    HalfLine,
    /// Λ_n with ambient dimension `n ≥ 3`.
    Lorentz(usize),
    /// Positive definite `r × r` matrices.
    Spd(usize),
}

/// A symmetric cone together with its rank `r`, dimension `n` and
/// structure constant `d`, tied by `(r - 1) d / 2 = n / r - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ConeDescriptor {
    kind: ConeKind,
    n: usize,
    r: usize,
    d: f64,
}

impl ConeDescriptor {
    pub fn half_line() -> Self {
        ConeDescriptor { kind: ConeKind::HalfLine, n: 1, r: 1, d: 0.0 }
    }

    pub fn lorentz(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidCone(format!("Lorentz cone needs n >= 3, got {n}")));
        }
        Ok(ConeDescriptor { kind: ConeKind::Lorentz(n), n, r: 2, d: (n - 2) as f64 })
    }

    pub fn spd(r: usize) -> Result<Self> {
        if r < 1 {
            return Err(Error::InvalidCone("SPD cone needs r >= 1".into()));
        }
        Ok(ConeDescriptor { kind: ConeKind::Spd(r), n: r * (r + 1) / 2, r, d: 1.0 })
    }

    pub fn kind(&self) -> ConeKind {
        self.kind
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn structure_constant(&self) -> f64 {
        self.d
    }

    /// `n / r`.
    pub fn n_over_r(&self) -> f64 {
        self.n as f64 / self.r as f64
    }

    /// `n / r - 1`, which equals `(r - 1) d / 2`.
    pub fn gap(&self) -> f64 {
        self.n_over_r() - 1.0
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: len });
        }
        Ok(())
    }

    /// Strict membership in the open cone.
    pub fn contains(&self, p: &ConePoint) -> Result<bool> {
        self.check_dim(p.len())?;
        let y = p.coords();
        Ok(match self.kind {
            ConeKind::HalfLine => y[0] > 0.0,
            ConeKind::Lorentz(_) => y[0] > 0.0 && lorentz_form(y) > 0.0,
            ConeKind::Spd(r) => (1..=r).all(|j| spd_leading_minor(y, r, j) > 0.0),
        })
    }

    pub fn identity(&self) -> ConePoint {
        let mut e = vec![0.0; self.n];
        match self.kind {
            ConeKind::HalfLine | ConeKind::Lorentz(_) => e[0] = 1.0,
            ConeKind::Spd(r) => {
                for i in 0..r {
                    e[spd_index(r, i, i)] = 1.0;
                }
            }
        }
        ConePoint::new(e)
    }

    /// Δ(p). Defined for any point of the ambient space; positive on Ω.
    pub fn determinant(&self, p: &ConePoint) -> Result<f64> {
        self.check_dim(p.len())?;
        Ok(self.det_raw(p.coords()))
    }

    pub(crate) fn det_raw(&self, y: &[f64]) -> f64 {
        match self.kind {
            ConeKind::HalfLine => y[0],
            ConeKind::Lorentz(_) => lorentz_form(y),
            ConeKind::Spd(r) => spd_leading_minor(y, r, r),
        }
    }

    /// Δ_j(p), `1 <= j <= r`.
    pub fn principal_minor(&self, j: usize, p: &ConePoint) -> Result<f64> {
        self.check_dim(p.len())?;
        if j == 0 || j > self.r {
            return Err(Error::MinorIndex { j, rank: self.r });
        }
        Ok(self.minor_raw(j, p.coords()))
    }

    pub(crate) fn minor_raw(&self, j: usize, y: &[f64]) -> f64 {
        match self.kind {
            ConeKind::HalfLine => y[0],
            ConeKind::Lorentz(n) => {
                if j == 1 {
                    y[0] + y[n - 1]
                } else {
                    lorentz_form(y)
                }
            }
            ConeKind::Spd(r) => spd_leading_minor(y, r, j),
        }
    }

    /// Δ^s(p) = Δ₁^{s₁-s₂} ⋯ Δ_r^{s_r}.
    pub fn generalized_power(&self, s: &GeneralizedPower, p: &ConePoint) -> Result<f64> {
        self.check_power(s)?;
        if !self.contains(p)? {
            return Err(Error::NotInCone);
        }
        let y = p.coords();
        if s.is_scalar() {
            return Ok(self.det_raw(y).powf(s.s[0]));
        }
        let mut log = 0.0;
        for j in 1..=self.r {
            let next = if j < self.r { s.s[j] } else { 0.0 };
            let e = s.s[j - 1] - next;
            if e != 0.0 {
                log += e * self.minor_raw(j, y).ln();
            }
        }
        Ok(log.exp())
    }

    pub(crate) fn check_power(&self, s: &GeneralizedPower) -> Result<()> {
        if s.len() != self.r {
            return Err(Error::ExponentLength { got: s.len(), rank: self.r });
        }
        Ok(())
    }

    /// The holomorphic extension of Δ evaluated at a complex vector.
    pub fn holomorphic_det(&self, z: &[Complex64]) -> Result<Complex64> {
        self.check_dim(z.len())?;
        Ok(match self.kind {
            ConeKind::HalfLine => z[0],
            ConeKind::Lorentz(_) => z[0] * z[0] - z[1..].iter().map(|c| c * c).sum::<Complex64>(),
            ConeKind::Spd(r) => {
                let m = DMatrix::from_fn(r, r, |i, j| {
                    let (a, b) = if i <= j { (i, j) } else { (j, i) };
                    z[spd_index(r, a, b)]
                });
                m.determinant()
            }
        })
    }

    /// Δ(z / i) for a tube point `z = x + i y`. With `x = 0` this is Δ(y).
    pub fn complex_determinant(&self, z: &TubePoint) -> Result<Complex64> {
        self.check_dim(z.x.len())?;
        self.check_dim(z.y.len())?;
        // (x + i y) / i = y - i x
        let w: Vec<Complex64> = z
            .x
            .iter()
            .zip(z.y.coords())
            .map(|(&x, &y)| Complex64::new(y, -x))
            .collect();
        self.holomorphic_det(&w)
    }

    /// `Δ(y + v) - Δ(y) - Δ(v)` for cones of rank at most two, where Δ is
    /// at most quadratic. Lets callers rebuild `Δ(y + v)` without the
    /// cancellation that hits `Δ(y)` near the boundary.
    pub(crate) fn mixed_term(&self, y: &[f64], v: &[f64]) -> Option<f64> {
        match self.kind {
            ConeKind::HalfLine => Some(0.0),
            ConeKind::Lorentz(_) => {
                let tail: f64 = y[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum();
                Some(2.0 * (y[0] * v[0] - tail))
            }
            ConeKind::Spd(1) => Some(0.0),
            ConeKind::Spd(2) => Some(y[0] * v[2] + y[2] * v[0] - 2.0 * y[1] * v[1]),
            ConeKind::Spd(_) => None,
        }
    }

    /// Δ(y + v) given accurate values of Δ(y) and Δ(v).
    pub(crate) fn det_of_sum(&self, y: &[f64], det_y: f64, v: &[f64], det_v: f64) -> f64 {
        match self.mixed_term(y, v) {
            Some(m) => det_y + m + det_v,
            None => {
                let s: Vec<f64> = y.iter().zip(v).map(|(a, b)| a + b).collect();
                self.det_raw(&s)
            }
        }
    }

    /// Euclidean distance from `p` to the boundary of the cone, using the
    /// Frobenius norm for SPD matrices.
    pub fn boundary_distance(&self, p: &ConePoint) -> Result<f64> {
        self.check_dim(p.len())?;
        let y = p.coords();
        Ok(match self.kind {
            ConeKind::HalfLine => y[0],
            ConeKind::Lorentz(_) => {
                let rho = y[1..].iter().map(|c| c * c).sum::<f64>().sqrt();
                (y[0] - rho) / std::f64::consts::SQRT_2
            }
            ConeKind::Spd(r) => {
                let m = spd_matrix(y, r);
                m.symmetric_eigenvalues().min()
            }
        })
    }

    /// Euclidean norm of a point, Frobenius for SPD.
    pub fn norm(&self, y: &[f64]) -> f64 {
        match self.kind {
            ConeKind::Spd(r) => {
                let mut s = 0.0;
                for i in 0..r {
                    for j in i..r {
                        let c = y[spd_index(r, i, j)];
                        s += if i == j { c * c } else { 2.0 * c * c };
                    }
                }
                s.sqrt()
            }
            _ => y.iter().map(|c| c * c).sum::<f64>().sqrt(),
        }
    }

    /// A random point comfortably inside the cone: scale in `[e^-1, e]`
    /// and at most 70% of the way from the axis to the boundary.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> ConePoint {
        let scale = rng.gen_range(-1.0f64..1.0).exp();
        match self.kind {
            ConeKind::HalfLine => ConePoint::new(vec![scale]),
            ConeKind::Lorentz(n) => {
                let dir = random_unit(rng, n - 1);
                let rho = rng.gen_range(0.0..0.7) * scale;
                let mut y = vec![scale];
                y.extend(dir.iter().map(|c| c * rho));
                ConePoint::new(y)
            }
            ConeKind::Spd(r) => {
                // eigenvalues within a factor 5 of each other, random rotation
                let mut m = DMatrix::<f64>::zeros(r, r);
                for i in 0..r {
                    for j in 0..r {
                        m[(i, j)] = rng.gen_range(-1.0..1.0);
                    }
                }
                let q = m.qr().q();
                let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(r, |_, _| {
                    scale * rng.gen_range(0.2..1.0)
                }));
                let y = &q * lam * q.transpose();
                ConePoint::new(spd_vector(&y))
            }
        }
    }
}

impl fmt::Display for ConeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ConeKind::HalfLine => write!(f, "halfline"),
            ConeKind::Lorentz(n) => write!(f, "lorentz:{n}"),
            ConeKind::Spd(r) => write!(f, "spd:{r}"),
        }
    }
}

impl FromStr for ConeDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "halfline" {
            return Ok(Self::half_line());
        }
        let (family, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unknown cone '{s}'")))?;
        let k: usize = arg
            .parse()
            .map_err(|_| Error::Parse(format!("bad cone size '{arg}'")))?;
        match family {
            "lorentz" => Self::lorentz(k),
            "spd" => Self::spd(k),
            _ => Err(Error::Parse(format!("unknown cone family '{family}'"))),
        }
    }
}

impl TryFrom<String> for ConeDescriptor {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ConeDescriptor> for String {
    fn from(c: ConeDescriptor) -> String {
        c.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConePoint {
    coords: Vec<f64>,
}

impl ConePoint {
    pub fn new(coords: Vec<f64>) -> Self {
        ConePoint { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn scaled(&self, lambda: f64) -> ConePoint {
        ConePoint::new(self.coords.iter().map(|c| c * lambda).collect())
    }

    pub fn add(&self, other: &ConePoint) -> ConePoint {
        ConePoint::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<f64>> for ConePoint {
    fn from(v: Vec<f64>) -> Self {
        ConePoint::new(v)
    }
}

/// Vector exponent `(s₁, …, s_r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GeneralizedPower {
    s: Vec<f64>,
}

impl GeneralizedPower {
    pub fn new(s: Vec<f64>) -> Self {
        GeneralizedPower { s }
    }

    /// `(a, …, a)`; then `Δ^s = Δ^a`.
    pub fn scalar(a: f64, rank: usize) -> Self {
        GeneralizedPower { s: vec![a; rank] }
    }

    pub fn components(&self) -> &[f64] {
        &self.s
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn is_scalar(&self) -> bool {
        self.s.windows(2).all(|w| w[0] == w[1])
    }

    pub fn plus(&self, other: &GeneralizedPower) -> GeneralizedPower {
        GeneralizedPower::new(self.s.iter().zip(&other.s).map(|(a, b)| a + b).collect())
    }
}

/// `z = x + i y` in the tube domain `ℝⁿ + iΩ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubePoint {
    pub x: Vec<f64>,
    pub y: ConePoint,
}

impl TubePoint {
    pub fn new(x: Vec<f64>, y: ConePoint) -> Self {
        TubePoint { x, y }
    }

    /// The point `i·y`.
    pub fn imaginary(y: ConePoint) -> Self {
        TubePoint { x: vec![0.0; y.len()], y }
    }
}

fn lorentz_form(y: &[f64]) -> f64 {
    y[0] * y[0] - y[1..].iter().map(|c| c * c).sum::<f64>()
}

pub(crate) fn spd_index(r: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < r);
    i * r - (i * i.saturating_sub(1)) / 2 + j - i
}

fn spd_matrix(y: &[f64], r: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, r, |i, j| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        y[spd_index(r, a, b)]
    })
}

fn spd_vector(m: &DMatrix<f64>) -> Vec<f64> {
    let r = m.nrows();
    let mut v = Vec::with_capacity(r * (r + 1) / 2);
    for i in 0..r {
        for j in i..r {
            v.push(0.5 * (m[(i, j)] + m[(j, i)]));
        }
    }
    v
}

fn spd_leading_minor(y: &[f64], r: usize, j: usize) -> f64 {
    match (r, j) {
        (_, 1) => y[0],
        (2, 2) => y[0] * y[2] - y[1] * y[1],
        _ => spd_matrix(y, r).view((0, 0), (j, j)).clone_owned().determinant(),
    }
}

pub(crate) fn random_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Linear isomorphism Λ₃ → SPD(2): `(y₁, y₂, y₃) ↦ [[y₁+y₂, y₃], [y₃, y₁-y₂]]`.
/// It carries the Lorentz form onto the 2×2 determinant exactly and has
/// Jacobian 2 with respect to the coordinates `(y11, y12, y22)`.
pub fn spd2_from_lorentz3(y: &[f64]) -> [f64; 3] {
    [y[0] + y[1], y[2], y[0] - y[1]]
}

/// Inverse of [`spd2_from_lorentz3`].
pub fn lorentz3_from_spd2(m: &[f64]) -> [f64; 3] {
    [0.5 * (m[0] + m[2]), 0.5 * (m[0] - m[2]), m[1]]
}
