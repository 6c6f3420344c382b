//! Positive Bergman-type integral operators on symmetric cones and tube domains.
//!
//! The crate answers one question in several ways: for the cone operator
//!
//! ```text
//! S g(y) = Δ^α(y) ∫_Ω Δ^{-γ}(y + x) g(x) Δ^β(x) dx
//! ```
//!
//! and its tube counterpart `T⁺`, is the operator bounded between weighted
//! Lebesgue spaces? [`decision`] answers from the sharp parameter
//! inequalities, [`certificate`] builds and checks the Okikiolu/Schur test
//! witnesses that prove boundedness, and [`lab`] runs the numerical
//! necessity probes (dilation scaling, indicator test functions, adjoint
//! integrals). Everything numerical rests on [`quadrature`].

// `!(a < b)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod certificate;
pub mod cone;
pub mod decision;
pub mod lab;
pub mod quadrature;
pub mod special;

mod error;
mod par;
pub mod real;

pub use error::{Error, Result};

pub use analytic::{Lemma31Query, Lemma32Query};
pub use certificate::{CertificateKind, FeasibilityWindow, OkikioluCertificate};
pub use cone::{ConeDescriptor, ConeKind, ConePoint, GeneralizedPower, TubePoint};
pub use decision::{Criterion, SParams, TParams, Verdict, VerdictStatus};
pub use quadrature::{QuadratureConfig, QuadratureEstimate};
