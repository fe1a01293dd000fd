//! Poisson integrals on the unit ball `Bⁿ`.
//!
//! Two kernels are supported, both normalized against the surface measure of
//! `S^{n−1}`:
//!
//! * harmonic: `(1 − |x|²) / |x − η|ⁿ`
//! * hyperbolic-harmonic: `(1 − |x|²)^{n−1} / |x − η|^{2(n−1)}`
//!
//! Boundary data that depend only on the angle to an axis reduce to a single
//! integral when evaluated on that axis. Everything else goes through Monte-Carlo
//! sampling of the sphere.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::envelope::{kernel_denominator, CapSpec, KernelKind};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, QuadratureConfig};
use crate::specfn::{sigma_area, sigma_star};

/// Samples per Monte-Carlo block; each block owns one generator stream.
pub const MC_BLOCK: usize = 4096;

/// Default step for [`radial_derivative_estimate`].
pub const DEFAULT_DERIVATIVE_STEP: f64 = 1e-3;

const UNIT_TOL: f64 = 1e-12;

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn check_interior(x: &[f64]) -> Result<f64> {
    let r2 = dot(x, x);
    if !(r2 < 1.0) || !r2.is_finite() {
        return Err(Error::domain(format!(
            "point must lie in the open unit ball, |x| = {}",
            r2.sqrt()
        )));
    }
    Ok(r2)
}

/// Poisson kernel `P(x, η)`, including the `1/σ_{n−1}` normalization.
pub fn poisson_kernel(kind: KernelKind, x: &[f64], eta: &[f64]) -> Result<f64> {
    let n = x.len();
    if n < 2 || eta.len() != n {
        return Err(Error::domain(format!(
            "poisson_kernel needs matching dimensions >= 2, got {} and {}",
            n,
            eta.len()
        )));
    }
    let r2 = check_interior(x)?;
    if (norm(eta) - 1.0).abs() > UNIT_TOL {
        return Err(Error::domain("eta must be a unit vector"));
    }
    Ok(normalized_kernel(kind, n, r2, x, eta) / sigma_area(n))
}

/// Kernel against the normalized measure `σ` (total mass one).
#[inline]
fn normalized_kernel(kind: KernelKind, n: usize, r2: f64, x: &[f64], eta: &[f64]) -> f64 {
    let d2: f64 = x.iter().zip(eta).map(|(a, b)| (a - b) * (a - b)).sum();
    match kind {
        KernelKind::Harmonic => (1.0 - r2) / d2.powf(n as f64 / 2.0),
        KernelKind::HyperbolicHarmonic => ((1.0 - r2) / d2).powi(n as i32 - 1),
    }
}

pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Boundary data on `S^{n−1}` depending only on the polar angle `φ ∈ [0, π]`
/// to a fixed unit axis.
#[derive(Clone)]
pub struct ZonalBoundaryData {
    n: usize,
    axis: Vec<f64>,
    profile: Profile,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for ZonalBoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZonalBoundaryData")
            .field("n", &self.n)
            .field("axis", &self.axis)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl ZonalBoundaryData {
    /// Wraps a profile, checking `|axis| = 1` and `|profile| <= 1` on a sample grid.
    pub fn new(n: usize, axis: Vec<f64>, profile: Profile) -> Result<Self> {
        Self::with_breakpoints(n, axis, profile, Vec::new())
    }

    /// As [`ZonalBoundaryData::new`], recording angles where the profile jumps so
    /// that quadrature can split there.
    pub fn with_breakpoints(
        n: usize,
        axis: Vec<f64>,
        profile: Profile,
        mut breakpoints: Vec<f64>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("dimension n must be >= 2, got {n}")));
        }
        if axis.len() != n {
            return Err(Error::domain(format!(
                "axis has length {}, expected {n}",
                axis.len()
            )));
        }
        if (norm(&axis) - 1.0).abs() > 1e-14 {
            return Err(Error::domain(format!(
                "axis must have unit norm, got {}",
                norm(&axis)
            )));
        }
        breakpoints.retain(|b| *b > 0.0 && *b < std::f64::consts::PI);
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let data = Self {
            n,
            axis,
            profile,
            breakpoints,
        };
        data.check_profile_range()?;
        Ok(data)
    }

    fn check_profile_range(&self) -> Result<()> {
        let pi = std::f64::consts::PI;
        let grid = (0..=256).map(|i| pi * i as f64 / 256.0);
        let around_breaks = self.breakpoints.iter().flat_map(|b| [b - 1e-9, b + 1e-9]);
        for phi in grid.chain(around_breaks) {
            let v = (self.profile)(phi.clamp(0.0, pi));
            if !(v.abs() <= 1.0) {
                return Err(Error::domain(format!(
                    "profile value {v} at φ = {phi} exceeds 1 in magnitude"
                )));
            }
        }
        Ok(())
    }

    /// Piecewise-constant profile: `values[i]` on `[breaks[i−1], breaks[i])`, with
    /// `breaks` strictly increasing inside `(0, π)` and one more value than breaks.
    pub fn step(n: usize, axis: Vec<f64>, breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::domain(
                "step profile needs exactly one more value than break",
            ));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("step breaks must be strictly increasing"));
        }
        let b = breaks.clone();
        let profile: Profile = Arc::new(move |phi: f64| {
            let idx = b.partition_point(|&x| x <= phi);
            values[idx]
        });
        Self::with_breakpoints(n, axis, profile, breaks)
    }

    /// `2χ_{S(c, axis)} − 1`, the extremal data for the envelope `M_c^n`.
    pub fn cap_indicator(axis: Vec<f64>, cap: &CapSpec) -> Result<Self> {
        let alpha = cap.alpha();
        if alpha <= 0.0 {
            return Self::constant(cap.n(), axis, -1.0);
        }
        if alpha >= std::f64::consts::PI {
            return Self::constant(cap.n(), axis, 1.0);
        }
        Self::step(cap.n(), axis, vec![alpha], vec![1.0, -1.0])
    }

    pub fn constant(n: usize, axis: Vec<f64>, value: f64) -> Result<Self> {
        Self::new(n, axis, Arc::new(move |_| value))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn profile_at(&self, phi: f64) -> f64 {
        (self.profile)(phi)
    }

    /// Same profile about a different (unit) axis.
    pub fn with_axis(&self, axis: Vec<f64>) -> Result<Self> {
        Self::with_breakpoints(self.n, axis, self.profile.clone(), self.breakpoints.clone())
    }

    /// Boundary value at the unit vector `eta`.
    pub fn eval(&self, eta: &[f64]) -> f64 {
        let cos = (dot(eta, &self.axis) / norm(eta)).clamp(-1.0, 1.0);
        (self.profile)(cos.acos())
    }

    /// Mean of the data over the normalized sphere measure.
    pub fn mean(&self, cfg: &QuadratureConfig) -> Result<f64> {
        let k = self.n as i32 - 2;
        let pi = std::f64::consts::PI;
        let integral = integrate_with_breaks(
            |t: f64| (self.profile)(t) * t.sin().powi(k),
            0.0,
            pi,
            &self.breakpoints,
            cfg,
        )?;
        Ok(sigma_star(self.n) * integral.value)
    }

    /// Scalar boundary map `η ↦ (profile(φ(η)))`.
    pub fn to_boundary_map(&self) -> BoundaryMap {
        let data = self.clone();
        BoundaryMap {
            n: self.n,
            m: 1,
            eval: Arc::new(move |eta: &[f64]| vec![data.eval(eta)]),
        }
    }
}

/// Value of the extension at the axial point `s · axis`, `s ∈ (−1, 1)`.
///
/// Negative `s` evaluates on the opposite half of the axis.
pub fn zonal_extension_at(
    kind: KernelKind,
    data: &ZonalBoundaryData,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(s > -1.0 && s < 1.0) {
        return Err(Error::domain(format!(
            "axial coordinate must lie in (-1, 1), got {s}"
        )));
    }
    let n = data.n;
    let (nu, mu) = kind.exponents(n);
    let k = n as i32 - 2;
    let integrand =
        |t: f64| (data.profile)(t) * t.sin().powi(k) / kernel_denominator(s, t).powf(mu);
    let integral =
        integrate_with_breaks(integrand, 0.0, std::f64::consts::PI, &data.breakpoints, cfg)?;
    Ok(sigma_star(n) * (1.0 - s * s).powf(nu) * integral.value)
}

/// Extension of zonal data at `r · axis`, `r ∈ [0, 1)`.
pub fn zonal_extension_on_axis(
    kind: KernelKind,
    data: &ZonalBoundaryData,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!("radius must lie in [0, 1), got {r}")));
    }
    zonal_extension_at(kind, data, r, cfg)
}

pub type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Boundary data `S^{n−1} → closed unit ball of R^m`.
#[derive(Clone)]
pub struct BoundaryMap {
    n: usize,
    m: usize,
    eval: MapFn,
}

impl fmt::Debug for BoundaryMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryMap")
            .field("n", &self.n)
            .field("m", &self.m)
            .finish_non_exhaustive()
    }
}

impl BoundaryMap {
    pub fn new(n: usize, m: usize, eval: MapFn) -> Result<Self> {
        if n < 2 || m < 1 {
            return Err(Error::domain(format!(
                "boundary map needs n >= 2 and m >= 1, got ({n}, {m})"
            )));
        }
        Ok(Self { n, m, eval })
    }

    pub fn constant(n: usize, value: Vec<f64>) -> Result<Self> {
        if norm(&value) > 1.0 {
            return Err(Error::domain(
                "constant boundary value must lie in the closed unit ball",
            ));
        }
        let m = value.len();
        Self::new(n, m, Arc::new(move |_| value.clone()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn eval(&self, eta: &[f64]) -> Vec<f64> {
        (self.eval)(eta)
    }

    /// `η ↦ (g(η) − g(−η)) / 2`; the Poisson extension of an odd map vanishes at 0.
    pub fn antisymmetrized(&self) -> Self {
        let inner = self.eval.clone();
        Self {
            n: self.n,
            m: self.m,
            eval: Arc::new(move |eta: &[f64]| {
                let neg: Vec<f64> = eta.iter().map(|v| -v).collect();
                let a = inner(eta);
                let b = inner(&neg);
                a.iter().zip(&b).map(|(p, q)| 0.5 * (p - q)).collect()
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub estimate: Vec<f64>,
    /// Per-component standard error of `estimate`.
    pub stderr: Vec<f64>,
    pub samples: usize,
}

impl McEstimate {
    /// Euclidean norm of the standard-error vector.
    pub fn stderr_norm(&self) -> f64 {
        norm(&self.stderr)
    }
}

#[derive(Debug, Clone)]
struct Moments {
    count: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(m: usize) -> Self {
        Self {
            count: 0.0,
            mean: vec![0.0; m],
            m2: vec![0.0; m],
        }
    }

    fn push(&mut self, y: &[f64]) {
        self.count += 1.0;
        for ((mu, m2), v) in self.mean.iter_mut().zip(&mut self.m2).zip(y) {
            let d = v - *mu;
            *mu += d / self.count;
            *m2 += d * (v - *mu);
        }
    }

    fn merge(mut self, other: &Moments) -> Self {
        let total = self.count + other.count;
        if other.count == 0.0 {
            return self;
        }
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * other.count / total;
            self.m2[i] += other.m2[i] + d * d * self.count * other.count / total;
        }
        self.count = total;
        self
    }
}

/// Uniform direction on `S^{n−1}` from normalized isotropic Gaussians.
pub(crate) fn sample_sphere<R: Rng>(rng: &mut R, n: usize, out: &mut [f64]) {
    loop {
        for v in out.iter_mut().take(n) {
            *v = rng.sample(StandardNormal);
        }
        let r = norm(&out[..n]);
        if r > 1e-300 {
            out.iter_mut().for_each(|v| *v /= r);
            return;
        }
    }
}

/// Generator for block `block` of the stream identified by `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Monte-Carlo Poisson extension `P[g](x)` with `samples` uniform sphere points.
///
/// Samples are drawn block-wise, block `b` from stream `b` of a ChaCha8 generator
/// seeded with `seed`, and block statistics are merged in block order, so the
/// result does not depend on how many threads run.
pub fn monte_carlo_extension(
    kind: KernelKind,
    g: &BoundaryMap,
    x: &[f64],
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let n = g.n;
    if x.len() != n {
        return Err(Error::domain(format!(
            "point has dimension {}, boundary map expects {n}",
            x.len()
        )));
    }
    let r2 = check_interior(x)?;
    if samples == 0 {
        return Err(Error::domain("samples must be >= 1"));
    }
    let blocks = samples.div_ceil(MC_BLOCK);
    let partial: Vec<Result<Moments>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b as u64);
            let count = MC_BLOCK.min(samples - b * MC_BLOCK);
            let mut mom = Moments::new(g.m);
            let mut eta = vec![0.0; n];
            let mut y = vec![0.0; g.m];
            for _ in 0..count {
                sample_sphere(&mut rng, n, &mut eta);
                let w = normalized_kernel(kind, n, r2, x, &eta);
                let val = (g.eval)(&eta);
                if val.len() != g.m || norm(&val) > 1.0 + 1e-12 {
                    return Err(Error::Contract(format!(
                        "boundary map returned a value outside the closed unit ball of R^{}",
                        g.m
                    )));
                }
                for (yi, vi) in y.iter_mut().zip(&val) {
                    *yi = w * vi;
                }
                mom.push(&y);
            }
            Ok(mom)
        })
        .collect();
    let mut total = Moments::new(g.m);
    for p in partial {
        total = total.merge(&p?);
    }
    let nf = total.count;
    let stderr = total
        .m2
        .iter()
        .map(|m2| {
            if nf > 1.0 {
                (m2 / (nf - 1.0) / nf).sqrt()
            } else {
                f64::INFINITY
            }
        })
        .collect();
    Ok(McEstimate {
        estimate: total.mean,
        stderr,
        samples,
    })
}

/// Scalar extension of zonal data at an arbitrary interior point.
///
/// Points on the data axis use the one-dimensional reduction; off-axis points fall
/// back to Monte Carlo with the configured sample count and seed.
#[derive(Debug, Clone)]
pub struct ZonalExtension {
    pub kind: KernelKind,
    pub data: ZonalBoundaryData,
    pub cfg: QuadratureConfig,
    pub mc_samples: usize,
    pub seed: u64,
}

impl ZonalExtension {
    pub fn new(kind: KernelKind, data: ZonalBoundaryData, cfg: QuadratureConfig) -> Self {
        Self {
            kind,
            data,
            cfg,
            mc_samples: 200_000,
            seed: 0,
        }
    }

    /// Axial coordinate of `x` when `x` lies on the axis line.
    pub fn axial_coordinate(&self, x: &[f64]) -> Option<f64> {
        let s = dot(x, &self.data.axis);
        let perp = x
            .iter()
            .zip(&self.data.axis)
            .map(|(xi, ai)| (xi - s * ai).powi(2))
            .sum::<f64>()
            .sqrt();
        (perp <= 1e-12 * norm(x).max(1.0)).then_some(s)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.data.n {
            return Err(Error::domain("point dimension does not match the data"));
        }
        check_interior(x)?;
        match self.axial_coordinate(x) {
            Some(s) => zonal_extension_at(self.kind, &self.data, s, &self.cfg),
            None => {
                let est = monte_carlo_extension(
                    self.kind,
                    &self.data.to_boundary_map(),
                    x,
                    self.mc_samples,
                    self.seed,
                )?;
                Ok(est.estimate[0])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadialDerivativeMethod {
    /// One-sided difference quotients at steps `8h, 4h, 2h, h` combined by three
    /// levels of Richardson extrapolation.
    #[default]
    OneSidedRichardson,
}

/// Estimates `lim_{r→1⁻} (h(1) − h(r)) / (1 − r)` with `h(1) = boundary_value`
/// supplied by the caller.
pub fn radial_derivative_estimate<H>(
    h: H,
    boundary_value: f64,
    method: RadialDerivativeMethod,
    base_step: f64,
) -> Result<f64>
where
    H: Fn(f64) -> Result<f64>,
{
    if !(base_step > 0.0 && base_step <= 0.125) {
        return Err(Error::domain(format!(
            "base step must lie in (0, 1/8], got {base_step}"
        )));
    }
    match method {
        RadialDerivativeMethod::OneSidedRichardson => {
            let mut table = [[0.0_f64; 4]; 4];
            for (j, row) in table.iter_mut().enumerate() {
                let delta = base_step * f64::from(1u32 << (3 - j));
                row[0] = (boundary_value - h(1.0 - delta)?) / delta;
            }
            for k in 1..4 {
                let f = f64::from(1u32 << k);
                for j in k..4 {
                    table[j][k] = (f * table[j][k - 1] - table[j - 1][k - 1]) / (f - 1.0);
                }
            }
            Ok(table[3][3])
        }
    }
}

fn check_stencil(n: usize, x: &[f64], step: f64) -> Result<()> {
    if x.len() != n {
        return Err(Error::domain(format!(
            "point has dimension {}, expected {n}",
            x.len()
        )));
    }
    if !(step > 0.0) || !(norm(x) + n as f64 * step < 1.0) {
        return Err(Error::domain(
            "finite-difference stencil leaves the unit ball",
        ));
    }
    Ok(())
}

/// Central-difference Laplacian and gradient at `x`.
fn central_differences<H>(h: &H, x: &[f64], step: f64) -> Result<(f64, Vec<f64>)>
where
    H: Fn(&[f64]) -> Result<f64>,
{
    let h0 = h(x)?;
    let mut lap = 0.0;
    let mut grad = vec![0.0; x.len()];
    let mut p = x.to_vec();
    for i in 0..x.len() {
        p[i] = x[i] + step;
        let hp = h(&p)?;
        p[i] = x[i] - step;
        let hm = h(&p)?;
        p[i] = x[i];
        lap += (hp - 2.0 * h0 + hm) / (step * step);
        grad[i] = (hp - hm) / (2.0 * step);
    }
    Ok((lap, grad))
}

/// Central-difference Euclidean Laplacian `Δh(x)`.
pub fn euclidean_laplacian<H>(h: H, n: usize, x: &[f64], step: f64) -> Result<f64>
where
    H: Fn(&[f64]) -> Result<f64>,
{
    check_stencil(n, x, step)?;
    Ok(central_differences(&h, x, step)?.0)
}

/// Central-difference value of
/// `Δ₀h = (1−|x|²)/4 · (Δh + 2(n−2)/(1−|x|²) ⟨x, ∇h⟩)`.
pub fn laplace_beltrami_residual<H>(h: H, n: usize, x: &[f64], step: f64) -> Result<f64>
where
    H: Fn(&[f64]) -> Result<f64>,
{
    check_stencil(n, x, step)?;
    let (lap, grad) = central_differences(&h, x, step)?;
    let r2 = dot(x, x);
    Ok(0.25 * (1.0 - r2) * lap + 0.5 * (n as f64 - 2.0) * dot(x, &grad))
}
