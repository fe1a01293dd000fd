//! Numerical toolkit for boundary versions of the Schwarz lemma.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfn`]: log-gamma, Pochhammer symbols, `2F1` at `-1` and sphere constants.
//! * [`quadrature`]: adaptive Gauss–Kronrod integration used by every cap integral.
//! * [`envelope`]: spherical caps, the extremal envelopes `M_c^n` / `m_c^n` and the
//!   boundary-derivative constants `D_n(a)`, `C_m`, `s⁻(b)` and `d_n`.
//! * [`poisson`]: Poisson kernels on the unit ball, zonal and Monte-Carlo extensions,
//!   radial derivatives and the Laplace–Beltrami residual.
//! * [`hilbert_ball`]: Möbius automorphisms of the complex ball, adjoints and
//!   real-linear operator splitting.
//! * [`verify`]: extremal and random test maps plus the margin checks built on them.

// Reference constants keep their published digits; negated comparisons reject NaN.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod envelope;
pub mod error;
pub mod hilbert_ball;
pub mod poisson;
pub mod quadrature;
pub mod specfn;
pub mod verify;

pub use envelope::{CapSpec, KernelKind};
pub use error::{Error, Result};
pub use hilbert_ball::{CMatrix, CVector, MobiusParams, RealLinearMap};
pub use poisson::{BoundaryMap, McEstimate, ZonalBoundaryData};
pub use quadrature::QuadratureConfig;
pub use specfn::SpherePrefactors;
pub use verify::{ContactTestCase, MarginReport};

pub use num_complex::Complex64;
