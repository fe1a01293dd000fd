//! Operator algebra on the unit ball of `C^k`.
//!
//! Inner products are linear in the first slot: `⟨u, v⟩ = Σ uᵢ conj(vᵢ)`.
//!
//! # Real-linear maps
//!
//! Every real-linear `L: C^k → C^m` splits uniquely as `L(z) = Bz + C z̄` with
//! `B = (L − iL∘i)/2` complex-linear and `C z̄ = (L + iL∘i)/2 (z)` antilinear.
//! The adjoint with respect to the real inner product `Re⟨·,·⟩` then follows from
//!
//! ```text
//! Re⟨Bz + C z̄, w⟩ = Re⟨z, B†w⟩ + Re(w† C z̄)
//!                  = Re⟨z, B†w⟩ + Re(wᵀ C̄ z)      (Re ζ = Re ζ̄)
//!                  = Re⟨z, B†w + Cᵀ w̄⟩,
//! ```
//!
//! so `L*` has parts `(B†, Cᵀ)`. For complex-linear maps this is the hermitian adjoint.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Seed for the probe vectors used by [`split_real_linear`].
const PROBE_SEED: u64 = 0x5eed_1ab5;

/// `⟨u, v⟩ = Σ uᵢ conj(vᵢ)`.
pub fn inner(u: &CVector, v: &CVector) -> Complex64 {
    v.dotc(u)
}

/// Parameters of the automorphism `φ_ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusParams {
    xi: CVector,
    s: f64,
}

impl MobiusParams {
    pub fn new(xi: CVector) -> Result<Self> {
        let r2 = xi.norm_squared();
        if !(r2 < 1.0) {
            return Err(Error::domain(format!(
                "|xi| must be < 1, got {}",
                r2.sqrt()
            )));
        }
        if xi.is_empty() {
            return Err(Error::domain("xi must have dimension >= 1"));
        }
        Ok(Self {
            s: (1.0 - r2).sqrt(),
            xi,
        })
    }

    pub fn xi(&self) -> &CVector {
        &self.xi
    }

    /// `s_ξ = √(1 − |ξ|²)`.
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }
}

/// `A v = s v + ξ⟨v, ξ⟩ / (1 + s)`.
pub fn mobius_a(p: &MobiusParams) -> CMatrix {
    let k = p.dim();
    let rank_one = &p.xi * p.xi.adjoint();
    CMatrix::identity(k, k) * Complex64::from(p.s) + rank_one / Complex64::from(1.0 + p.s)
}

fn denominator(p: &MobiusParams, z: &CVector) -> Result<Complex64> {
    if z.len() != p.dim() {
        return Err(Error::domain(format!(
            "z has dimension {}, xi has {}",
            z.len(),
            p.dim()
        )));
    }
    let d = Complex64::from(1.0) - inner(z, &p.xi);
    if d.norm() < 1e-14 {
        return Err(Error::domain("1 - <z, xi> vanishes"));
    }
    Ok(d)
}

/// `φ_ξ(z) = A (ξ − z) / (1 − ⟨z, ξ⟩)`.
pub fn mobius_map(p: &MobiusParams, z: &CVector) -> Result<CVector> {
    let d = denominator(p, z)?;
    Ok(mobius_a(p) * (&p.xi - z) / d)
}

/// `Dφ_ξ(z) = A [ −Id/(1 − ⟨z, ξ⟩) + (ξ − z)⟨·, ξ⟩/(1 − ⟨z, ξ⟩)² ]`.
pub fn mobius_derivative(p: &MobiusParams, z: &CVector) -> Result<CMatrix> {
    let d = denominator(p, z)?;
    let k = p.dim();
    let bracket = CMatrix::identity(k, k) * (-d.inv()) + (&p.xi - z) * p.xi.adjoint() / (d * d);
    Ok(mobius_a(p) * bracket)
}

/// Conjugate transpose.
pub fn hermitian_adjoint(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// `L(z) = B z + C z̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLinearMap {
    linear: CMatrix,
    antilinear: CMatrix,
}

impl RealLinearMap {
    pub fn new(linear: CMatrix, antilinear: CMatrix) -> Result<Self> {
        if linear.shape() != antilinear.shape() {
            return Err(Error::domain(format!(
                "linear part {:?} and antilinear part {:?} differ in shape",
                linear.shape(),
                antilinear.shape()
            )));
        }
        Ok(Self { linear, antilinear })
    }

    pub fn complex_linear(b: CMatrix) -> Self {
        let zero = CMatrix::zeros(b.nrows(), b.ncols());
        Self {
            linear: b,
            antilinear: zero,
        }
    }

    pub fn antilinear(c: CMatrix) -> Self {
        let zero = CMatrix::zeros(c.nrows(), c.ncols());
        Self {
            linear: zero,
            antilinear: c,
        }
    }

    /// Coordinate-wise complex conjugation on `C^k`.
    pub fn conjugation(k: usize) -> Self {
        Self::antilinear(CMatrix::identity(k, k))
    }

    pub fn linear_part(&self) -> &CMatrix {
        &self.linear
    }

    pub fn antilinear_part(&self) -> &CMatrix {
        &self.antilinear
    }

    /// `(target dimension, source dimension)`.
    pub fn shape(&self) -> (usize, usize) {
        self.linear.shape()
    }

    pub fn apply(&self, z: &CVector) -> CVector {
        &self.linear * z + &self.antilinear * z.conjugate()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &RealLinearMap) -> Result<RealLinearMap> {
        if self.shape().1 != inner.shape().0 {
            return Err(Error::domain("incompatible shapes in composition"));
        }
        let b = &self.linear * &inner.linear + &self.antilinear * inner.antilinear.conjugate();
        let c = &self.linear * &inner.antilinear + &self.antilinear * inner.linear.conjugate();
        Ok(RealLinearMap {
            linear: b,
            antilinear: c,
        })
    }

    pub fn sum(&self, other: &RealLinearMap) -> Result<RealLinearMap> {
        RealLinearMap::new(
            &self.linear + &other.linear,
            &self.antilinear + &other.antilinear,
        )
    }

    pub fn is_complex_linear(&self, tol: f64) -> bool {
        self.antilinear.iter().all(|c| c.norm() <= tol)
    }

    pub fn is_antilinear(&self, tol: f64) -> bool {
        self.linear.iter().all(|c| c.norm() <= tol)
    }

    /// Largest entrywise difference over both parts.
    pub fn max_abs_diff(&self, other: &RealLinearMap) -> f64 {
        let d1 = (&self.linear - &other.linear)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        let d2 = (&self.antilinear - &other.antilinear)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        d1.max(d2)
    }
}

/// Adjoint with respect to `Re⟨·,·⟩`: parts `(B†, Cᵀ)`.
pub fn real_adjoint(l: &RealLinearMap) -> RealLinearMap {
    RealLinearMap {
        linear: l.linear.adjoint(),
        antilinear: l.antilinear.transpose(),
    }
}

/// Splits a real-linear action on `C^k` into complex-linear and antilinear parts.
///
/// Columns come from `B eⱼ = (L eⱼ − i L(i eⱼ))/2` and `C eⱼ = (L eⱼ + i L(i eⱼ))/2`.
/// The decomposition is then probed on pseudo-random vectors: reconstruction,
/// additivity and rational homogeneity must all hold or a contract error is raised.
pub fn split_real_linear<F>(l: F, k: usize) -> Result<(RealLinearMap, RealLinearMap)>
where
    F: Fn(&CVector) -> CVector,
{
    if k == 0 {
        return Err(Error::domain("source dimension must be >= 1"));
    }
    let mut e = CVector::zeros(k);
    e[0] = Complex64::from(1.0);
    let m = l(&e).len();
    let mut b = CMatrix::zeros(m, k);
    let mut c = CMatrix::zeros(m, k);
    for j in 0..k {
        let mut ej = CVector::zeros(k);
        ej[j] = Complex64::from(1.0);
        let le = l(&ej);
        let lie = l(&(&ej * I));
        if le.len() != m || lie.len() != m {
            return Err(Error::Contract(
                "operator output dimension is not constant".into(),
            ));
        }
        b.set_column(j, &((&le - &lie * I) * Complex64::from(0.5)));
        c.set_column(j, &((&le + &lie * I) * Complex64::from(0.5)));
    }
    let full = RealLinearMap::new(b.clone(), c.clone())?;

    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let close = |x: &CVector, y: &CVector| (x - y).norm() <= 1e-10 * (1.0 + x.norm().max(y.norm()));
    for _ in 0..8 {
        let z = random_cvector(&mut rng, k);
        let w = random_cvector(&mut rng, k);
        let q = f64::from(rng.random_range(-9i32..=9)) / f64::from(rng.random_range(1i32..=7));
        let lz = l(&z);
        if !close(&lz, &full.apply(&z)) {
            return Err(Error::Contract(
                "operator is not reproduced by its real-linear split".into(),
            ));
        }
        if !close(&l(&(&z + &w)), &(&lz + l(&w))) {
            return Err(Error::Contract("operator is not additive".into()));
        }
        if !close(&l(&(&z * Complex64::from(q))), &(&lz * Complex64::from(q))) {
            return Err(Error::Contract("operator is not real-homogeneous".into()));
        }
    }
    Ok((
        RealLinearMap::complex_linear(b),
        RealLinearMap::antilinear(c),
    ))
}

/// Residual `‖Dφ_ξ(z₀)† φ_ξ(z₀) − μ z₀‖` with `μ = (1 − |ξ|²) / |1 − ⟨z₀, ξ⟩|²`.
pub fn verify_dphi_adjoint_identity(p: &MobiusParams, z0: &CVector) -> Result<f64> {
    let d = denominator(p, z0)?;
    let mu = p.s * p.s / d.norm_sqr();
    let lhs = mobius_derivative(p, z0)?.adjoint() * mobius_map(p, z0)?;
    Ok((lhs - z0 * Complex64::from(mu)).norm())
}

/// Residual of the form valid on the whole ball:
/// `Dφ_ξ(z₀)† φ_ξ(z₀) = μ [z₀ − (1 − |z₀|²) ξ / conj(1 − ⟨z₀, ξ⟩)]`.
///
/// The correction term vanishes on the sphere, where this reduces to
/// [`verify_dphi_adjoint_identity`].
pub fn dphi_adjoint_interior_residual(p: &MobiusParams, z0: &CVector) -> Result<f64> {
    let d = denominator(p, z0)?;
    let mu = p.s * p.s / d.norm_sqr();
    let correction = p.xi() * (Complex64::from(1.0 - z0.norm_squared()) / d.conj());
    let lhs = mobius_derivative(p, z0)?.adjoint() * mobius_map(p, z0)?;
    Ok((lhs - (z0 - correction) * Complex64::from(mu)).norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryLambda {
    pub lambda: f64,
    pub alignment_residual: f64,
}

/// `λ = Re⟨Df·a, b⟩` together with `‖Df* b − λ a‖`.
pub fn boundary_lambda(df: &RealLinearMap, a: &CVector, b: &CVector) -> Result<BoundaryLambda> {
    let (m, k) = df.shape();
    if a.len() != k || b.len() != m {
        return Err(Error::domain(
            "a and b must match the operator's source and target dimensions",
        ));
    }
    for (name, v) in [("a", a), ("b", b)] {
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "{name} must be a unit vector, |{name}| = {}",
                v.norm()
            )));
        }
    }
    let dfa = df.apply(a);
    let lambda = inner(&dfa, b).re;
    let bound = dfa.norm();
    if lambda > bound + 1e-12 * bound.max(1.0) {
        return Err(Error::Contract(format!(
            "lambda {lambda} exceeds |Df a| = {bound}"
        )));
    }
    let residual = (real_adjoint(df).apply(b) - a * Complex64::from(lambda)).norm();
    Ok(BoundaryLambda {
        lambda,
        alignment_residual: residual,
    })
}

/// Standard complex Gaussian vector.
pub fn random_cvector<R: Rng>(rng: &mut R, k: usize) -> CVector {
    CVector::from_fn(k, |_, _| {
        Complex64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    })
}

pub fn random_cmatrix<R: Rng>(rng: &mut R, m: usize, k: usize) -> CMatrix {
    CMatrix::from_fn(m, k, |_, _| {
        Complex64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    })
}

/// Uniform point on the unit sphere of `C^k`.
pub fn random_unit<R: Rng>(rng: &mut R, k: usize) -> CVector {
    loop {
        let v = random_cvector(rng, k);
        let n = v.norm();
        if n > 1e-12 {
            return v / Complex64::from(n);
        }
    }
}

/// Uniform point in the ball of radius `radius` in `C^k` (real dimension `2k`).
pub fn random_in_ball<R: Rng>(rng: &mut R, k: usize, radius: f64) -> CVector {
    let u: f64 = rng.random();
    random_unit(rng, k) * Complex64::from(radius * u.powf(1.0 / (2 * k) as f64))
}

/// Random unitary matrix from the QR factorization of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, k: usize) -> CMatrix {
    let qr = random_cmatrix(rng, k, k).qr();
    let (q, r) = qr.unpack();
    // Fix column phases so the distribution is Haar.
    let phases = CMatrix::from_diagonal(&CVector::from_fn(k, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::from(1.0)
        }
    }));
    q * phases
}
