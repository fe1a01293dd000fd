//! Test maps with boundary contact and the margin checks run against them.
//!
//! Every check returns data rather than panicking: a [`MarginReport`] records the
//! measured quantity, the bound it is compared with and whether the difference
//! clears the tolerance.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::envelope::{
    boundary_derivative_harmonic, boundary_quotient, cap_angle_from_measure, envelope_lower,
    envelope_upper, hyperbolic_decay_coefficient, kalaj_constant, schwarz_planar_bound, CapSpec,
    KernelKind,
};
use crate::error::{Error, Result};
use crate::hilbert_ball::{
    boundary_lambda, inner, mobius_derivative, mobius_map, CMatrix, CVector, MobiusParams,
    RealLinearMap,
};
use crate::poisson::{
    block_rng, dot, monte_carlo_extension, norm, radial_derivative_estimate, sample_sphere,
    zonal_extension_at, BoundaryMap, RadialDerivativeMethod, ZonalBoundaryData, ZonalExtension,
    DEFAULT_DERIVATIVE_STEP,
};
use crate::quadrature::QuadratureConfig;

/// Slack on every one-sided boundary-derivative margin.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

/// Allowed deviation between a measured extremal derivative and its closed form.
pub const PLANAR_SHARPNESS_TOLERANCE: f64 = 1e-6;

/// Slack on the monotonicity of `V`.
pub const MONOTONE_SLACK: f64 = 1e-8;

/// Central-difference step for `V(r)`.
pub const V_STEP: f64 = 1e-4;

/// Number of standard errors a Monte-Carlo estimate may exceed its bound by.
pub const MC_SIGMAS: f64 = 4.0;

pub type Evaluator = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;

/// A map `f: Bⁿ → Bᵐ` with `f(0) = a0` and `f(r x0) → y0` as `r → 1`.
#[derive(Clone)]
pub struct ContactTestCase {
    pub id: String,
    pub n: usize,
    pub m: usize,
    pub f: Evaluator,
    pub x0: Vec<f64>,
    pub y0: Vec<f64>,
    pub a0: Vec<f64>,
    /// `⟨a0, y0⟩`.
    pub a: f64,
}

impl std::fmt::Debug for ContactTestCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContactTestCase")
            .field("id", &self.id)
            .field("n", &self.n)
            .field("m", &self.m)
            .field("x0", &self.x0)
            .field("y0", &self.y0)
            .field("a0", &self.a0)
            .field("a", &self.a)
            .finish_non_exhaustive()
    }
}

impl ContactTestCase {
    /// Evaluates `f(0)` and validates the contact data.
    pub fn new(
        id: impl Into<String>,
        n: usize,
        m: usize,
        f: Evaluator,
        x0: Vec<f64>,
        y0: Vec<f64>,
    ) -> Result<Self> {
        if x0.len() != n || y0.len() != m {
            return Err(Error::domain(
                "contact point or target has the wrong dimension",
            ));
        }
        for (name, v) in [("x0", &x0), ("y0", &y0)] {
            if (norm(v) - 1.0).abs() > 1e-12 {
                return Err(Error::domain(format!("{name} must be a unit vector")));
            }
        }
        let a0 = f(&vec![0.0; n])?;
        if a0.len() != m {
            return Err(Error::Contract(format!(
                "f returned {} components, expected {m}",
                a0.len()
            )));
        }
        let a = dot(&a0, &y0);
        if !(a > -1.0 && a < 1.0) {
            return Err(Error::domain(format!(
                "a = <f(0), y0> must lie in (-1, 1), got {a}"
            )));
        }
        Ok(Self {
            id: id.into(),
            n,
            m,
            f,
            x0,
            y0,
            a0,
            a,
        })
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        (self.f)(x)
    }

    /// `r ↦ ⟨f(r x0), y0⟩`.
    pub fn radial_component(&self, r: f64) -> Result<f64> {
        let x: Vec<f64> = self.x0.iter().map(|v| r * v).collect();
        Ok(dot(&self.eval(&x)?, &self.y0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginReport {
    pub case_id: String,
    pub lambda: f64,
    pub bound: f64,
    /// `lambda − bound`.
    pub margin: f64,
    pub tolerance: f64,
    /// `margin ≥ −tolerance`.
    pub pass: bool,
}

impl MarginReport {
    pub fn new(case_id: impl Into<String>, lambda: f64, bound: f64, tolerance: f64) -> Self {
        let margin = lambda - bound;
        Self {
            case_id: case_id.into(),
            lambda,
            bound,
            margin,
            tolerance,
            pass: margin >= -tolerance,
        }
    }
}

fn unit_e1(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    v
}

fn check_open_unit(name: &str, a: f64) -> Result<()> {
    if !(a > -1.0 && a < 1.0) {
        return Err(Error::domain(format!(
            "{name} must lie in (-1, 1), got {a}"
        )));
    }
    Ok(())
}

/// Cap of normalized measure `c ∈ [0, 1]`, using the empty and full caps at the ends.
pub fn cap_for_measure(n: usize, c: f64) -> Result<CapSpec> {
    if c <= 0.0 {
        CapSpec::empty(n)
    } else if c >= 1.0 {
        CapSpec::full(n)
    } else {
        cap_angle_from_measure(n, c)
    }
}

fn zonal_case(
    id: String,
    m: usize,
    data: ZonalBoundaryData,
    y0: Vec<f64>,
    cfg: &QuadratureConfig,
) -> Result<ContactTestCase> {
    let n = data.n();
    if m < 1 || y0.len() != m {
        return Err(Error::domain("target y0 must be a vector in R^m"));
    }
    let x0 = data.axis().to_vec();
    let u = ZonalExtension::new(KernelKind::Harmonic, data, *cfg);
    let target = y0.clone();
    let f: Evaluator = Arc::new(move |x: &[f64]| {
        let v = u.eval(x)?;
        Ok(target.iter().map(|t| v * t).collect())
    });
    ContactTestCase::new(id, n, m, f, x0, y0)
}

/// `f(x) = u(x) y0` with `u` the harmonic extension of `2χ_{S(c, e₁)} − 1`, `c = (1+a)/2`.
pub fn build_cap_extremal(
    n: usize,
    m: usize,
    a: f64,
    y0: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ContactTestCase> {
    build_cap_extremal_about(n, m, a, &unit_e1(n), y0, cfg)
}

/// [`build_cap_extremal`] with the cap centred on `axis` instead of `e₁`.
pub fn build_cap_extremal_about(
    n: usize,
    m: usize,
    a: f64,
    axis: &[f64],
    y0: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ContactTestCase> {
    if n < 2 || m < 2 {
        return Err(Error::domain(format!(
            "cap extremal needs n, m >= 2, got n = {n}, m = {m}"
        )));
    }
    check_open_unit("a", a)?;
    let cap = cap_angle_from_measure(n, 0.5 * (1.0 + a))?;
    let data = ZonalBoundaryData::cap_indicator(axis.to_vec(), &cap)?;
    zonal_case(
        format!("cap-extremal n={n} m={m} a={a}"),
        m,
        data,
        y0.to_vec(),
        cfg,
    )
}

/// Non-extremal data with the same mean `a`: `1` on the cap of angle `shrink · α`,
/// and the constant `(a − c_β)/(1 − c_β) > −1` on the rest of the sphere.
pub fn build_softened_cap(
    n: usize,
    m: usize,
    a: f64,
    shrink: f64,
    y0: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ContactTestCase> {
    if n < 2 || m < 1 {
        return Err(Error::domain("softened cap needs n >= 2 and m >= 1"));
    }
    check_open_unit("a", a)?;
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::domain(format!(
            "shrink factor must lie in (0, 1), got {shrink}"
        )));
    }
    let alpha = cap_angle_from_measure(n, 0.5 * (1.0 + a))?.alpha();
    let beta = shrink * alpha;
    let c_beta = crate::envelope::cap_measure(n, beta);
    let rest = (a - c_beta) / (1.0 - c_beta);
    let data = ZonalBoundaryData::step(n, unit_e1(n), vec![beta], vec![1.0, rest])?;
    zonal_case(
        format!("softened-cap n={n} m={m} a={a} shrink={shrink}"),
        m,
        data,
        y0.to_vec(),
        cfg,
    )
}

/// `f(x) = x` on `Bⁿ`, with contact `x0 = y0 = e₁`.
pub fn build_identity_case(n: usize) -> Result<ContactTestCase> {
    if n < 2 {
        return Err(Error::domain("identity case needs n >= 2"));
    }
    let f: Evaluator = Arc::new(|x: &[f64]| Ok(x.to_vec()));
    ContactTestCase::new(format!("identity n={n}"), n, n, f, unit_e1(n), unit_e1(n))
}

/// Compares `lim (1 − ⟨f(r x0), y0⟩)/(1 − r)` with `D_n(a)`.
pub fn check_boundary_bound(
    case: &ContactTestCase,
    cfg: &QuadratureConfig,
) -> Result<MarginReport> {
    let lambda = radial_derivative_estimate(
        |r| case.radial_component(r),
        1.0,
        RadialDerivativeMethod::OneSidedRichardson,
        DEFAULT_DERIVATIVE_STEP,
    )?;
    let bound = boundary_derivative_harmonic(case.n, case.a, cfg)?;
    Ok(MarginReport::new(
        case.id.clone(),
        lambda,
        bound,
        BOUNDARY_TOLERANCE,
    ))
}

/// Largest signed violation of `m_c^n(|x|) ≤ h(x) ≤ M_c^n(|x|)` over `±r · axis`,
/// `r` in `grid`, where `c = (1 + h(0))/2`.
///
/// A nonpositive result means the sandwich holds at every grid point.
pub fn check_envelope_sandwich(
    kind: KernelKind,
    data: &ZonalBoundaryData,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let n = data.n();
    let a = zonal_extension_at(kind, data, 0.0, cfg)?;
    let cap = cap_for_measure(n, 0.5 * (1.0 + a))?;
    let mut worst = f64::NEG_INFINITY;
    for &r in grid {
        let upper = envelope_upper(kind, &cap, r, cfg)?;
        let lower = envelope_lower(kind, &cap, r, cfg)?;
        for s in [r, -r] {
            let h = zonal_extension_at(kind, data, s, cfg)?;
            worst = worst.max(h - upper).max(lower - h);
        }
    }
    Ok(worst)
}

/// Piecewise-constant zonal profile with 1 to 5 jumps and values uniform in `[−1, 1]`.
pub fn random_step_profile<R: Rng>(
    rng: &mut R,
    n: usize,
    axis: Vec<f64>,
) -> Result<ZonalBoundaryData> {
    let jumps = rng.random_range(1..=5usize);
    let mut breaks: Vec<f64> = (0..jumps)
        .map(|_| rng.random_range(0.05..PI - 0.05))
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    let values = (0..=breaks.len())
        .map(|_| rng.random_range(-1.0..=1.0))
        .collect();
    ZonalBoundaryData::step(n, axis, breaks, values)
}

/// [`check_envelope_sandwich`] over `profiles` random step profiles; returns the
/// worst violation.
pub fn envelope_sandwich_sweep(
    kind: KernelKind,
    n: usize,
    profiles: usize,
    seed: u64,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..profiles {
        let mut rng = block_rng(seed, i as u64);
        let data = random_step_profile(&mut rng, n, unit_e1(n))?;
        worst = worst.max(check_envelope_sandwich(kind, &data, grid, cfg)?);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarBoundRow {
    pub b: f64,
    /// Radial derivative of the disc extremal at `1`, measured by quadrature.
    pub measured: f64,
    /// `s⁻(b)`.
    pub closed_form: f64,
    /// `(1 − b)/2`.
    pub weak_bound: f64,
    /// `|measured − closed_form| ≤ PLANAR_SHARPNESS_TOLERANCE`.
    pub sharp: bool,
    pub report: MarginReport,
}

/// Measures the boundary derivative of the disc extremal for each `b` and compares
/// it with `s⁻(b)`; the report's bound is the weaker `(1 − b)/2`.
pub fn check_planar_bound(b_values: &[f64], cfg: &QuadratureConfig) -> Result<Vec<PlanarBoundRow>> {
    b_values
        .iter()
        .map(|&b| {
            check_open_unit("b", b)?;
            let cap = cap_angle_from_measure(2, 0.5 * (1.0 + b))?;
            let data = ZonalBoundaryData::cap_indicator(unit_e1(2), &cap)?;
            // The jump sits at angle α from the contact point; steps stay well inside it.
            let step = DEFAULT_DERIVATIVE_STEP.min(cap.alpha() / 40.0);
            let measured = radial_derivative_estimate(
                |r| zonal_extension_at(KernelKind::Harmonic, &data, r, cfg),
                1.0,
                RadialDerivativeMethod::OneSidedRichardson,
                step,
            )?;
            let closed_form = schwarz_planar_bound(b)?;
            let weak_bound = 0.5 * (1.0 - b);
            Ok(PlanarBoundRow {
                b,
                measured,
                closed_form,
                weak_bound,
                sharp: (measured - closed_form).abs() <= PLANAR_SHARPNESS_TOLERANCE,
                report: MarginReport::new(format!("planar b={b}"), closed_form, weak_bound, 0.0),
            })
        })
        .collect()
}

/// Closed-form harmonic extension to the disc of `±1` data, `+1` on the arc
/// `|θ| < β = π(1+a)/2` around `1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarExtremal {
    beta: f64,
}

impl PlanarExtremal {
    pub fn new(a: f64) -> Result<Self> {
        check_open_unit("a", a)?;
        Ok(Self {
            beta: 0.5 * PI * (1.0 + a),
        })
    }

    /// `u(0)`.
    pub fn center_value(&self) -> f64 {
        2.0 * self.beta / PI - 1.0
    }

    /// `u(z) = (2/π) Arg[(e^{iβ} − z)/(e^{−iβ} − z) · e^{−2iβ}] + 2β/π − 1`.
    pub fn value(&self, z: Complex64) -> f64 {
        let p = Complex64::from_polar(1.0, self.beta);
        let q = p.conj();
        let ratio = (p - z) / (q - z) * Complex64::from_polar(1.0, -2.0 * self.beta);
        2.0 / PI * ratio.arg() + self.center_value()
    }

    /// Derivative `F'(z)` of the holomorphic `F` with `Re F = u`.
    pub fn holomorphic_derivative(&self, z: Complex64) -> Complex64 {
        let p = Complex64::from_polar(1.0, self.beta);
        let q = p.conj();
        Complex64::new(0.0, -2.0 / PI) * ((q - z).inv() - (p - z).inv())
    }
}

/// Pluriharmonic map `g(z) = u(⟨z, p⟩) w0` on the complex ball.
#[derive(Debug, Clone, PartialEq)]
pub struct PluriharmonicTestMap {
    pub planar: PlanarExtremal,
    pub p: CVector,
    pub w0: CVector,
}

impl PluriharmonicTestMap {
    pub fn new(a: f64, p: CVector, w0: CVector) -> Result<Self> {
        if p.len() != w0.len() {
            return Err(Error::domain("p and w0 must have the same dimension"));
        }
        for (name, v) in [("p", &p), ("w0", &w0)] {
            if (v.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::domain(format!("{name} must be a unit vector")));
            }
        }
        Ok(Self {
            planar: PlanarExtremal::new(a)?,
            p,
            w0,
        })
    }

    pub fn value(&self, z: &CVector) -> CVector {
        &self.w0 * Complex64::from(self.planar.value(inner(z, &self.p)))
    }

    /// `Dg(z) ζ = Re(F'(⟨z,p⟩) ⟨ζ,p⟩) w0`, split as `B = (F'/2) w0 p†`, `C = (conj F'/2) w0 pᵀ`.
    pub fn derivative(&self, z: &CVector) -> RealLinearMap {
        let fp = self.planar.holomorphic_derivative(inner(z, &self.p)) * 0.5;
        let b: CMatrix = &self.w0 * self.p.adjoint() * fp;
        let c: CMatrix = &self.w0 * self.p.transpose() * fp.conj();
        RealLinearMap::new(b, c).expect("parts share the shape of w0 p†")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MobiusReport {
    pub report: MarginReport,
    /// `‖Df(z0)* w0 − λμ z0‖`.
    pub alignment_residual: f64,
    /// `(1 − |ξ|²)/|1 − ⟨z0, ξ⟩|²`.
    pub mu: f64,
}

/// [`check_mobius_precomposition_with`] for `p = w0 = e₁`.
pub fn check_mobius_precomposition(k: usize, xi: &CVector, a: f64) -> Result<MobiusReport> {
    let mut e = CVector::zeros(k);
    if k == 0 {
        return Err(Error::domain("k must be >= 1"));
    }
    e[0] = Complex64::from(1.0);
    check_mobius_precomposition_with(xi, a, e.clone(), e)
}

/// Builds `f = g ∘ φ_ξ` with `g(z) = u(⟨z,p⟩) w0`, contact at `z0 = φ_ξ(p)` with value `w0`.
///
/// `Df(z0) = Dg(p) ∘ Dφ_ξ(z0)` by the chain rule; `λ` is `Re⟨Df(z0) z0, w0⟩ / μ` and the
/// bound is `s⁻(a)`, which is `2/π` when `f(ξ) = 0`.
pub fn check_mobius_precomposition_with(
    xi: &CVector,
    a: f64,
    p: CVector,
    w0: CVector,
) -> Result<MobiusReport> {
    let params = MobiusParams::new(xi.clone())?;
    if p.len() != params.dim() {
        return Err(Error::domain("p must lie in the same space as xi"));
    }
    let g = PluriharmonicTestMap::new(a, p, w0)?;
    let z0 = mobius_map(&params, &g.p)?;
    let dphi = RealLinearMap::complex_linear(mobius_derivative(&params, &z0)?);
    let df = g.derivative(&g.p).compose(&dphi)?;
    let d = Complex64::from(1.0) - inner(&z0, params.xi());
    let mu = params.s() * params.s() / d.norm_sqr();
    let z0_unit = &z0 / Complex64::from(z0.norm());
    let bl = boundary_lambda(&df, &z0_unit, &g.w0)?;
    let lambda = bl.lambda / mu;
    let bound = schwarz_planar_bound(a)?;
    Ok(MobiusReport {
        report: MarginReport::new(
            format!("mobius k={} a={a}", params.dim()),
            lambda,
            bound,
            BOUNDARY_TOLERANCE,
        ),
        alignment_residual: bl.alignment_residual,
        mu,
    })
}

/// The three families of random boundary maps used by [`check_kalaj_majorant`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapFamily {
    /// Nearest-centre assignment of random values in the closed unit ball.
    Voronoi,
    /// `sign⟨η, d⟩ w` for random unit `d`, `w`.
    HemisphereSign,
    /// `v/√(1 + |v|²)` with `v = Aη + b` random affine.
    SmoothSquashed,
}

impl MapFamily {
    pub const ALL: [MapFamily; 3] = [
        MapFamily::Voronoi,
        MapFamily::HemisphereSign,
        MapFamily::SmoothSquashed,
    ];
}

fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    sample_sphere(rng, n, &mut v);
    v
}

fn random_in_unit_ball<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    let u: f64 = rng.random();
    let r = u.powf(1.0 / m as f64);
    unit_vector(rng, m).into_iter().map(|v| r * v).collect()
}

/// A random boundary map `S^{n−1} → closed Bᵐ` from `family`.
pub fn random_boundary_map<R: Rng>(
    rng: &mut R,
    family: MapFamily,
    n: usize,
    m: usize,
) -> Result<BoundaryMap> {
    let eval: crate::poisson::MapFn = match family {
        MapFamily::Voronoi => {
            let cells = rng.random_range(2..=8usize);
            let centres: Vec<Vec<f64>> = (0..cells).map(|_| unit_vector(rng, n)).collect();
            let values: Vec<Vec<f64>> = (0..cells).map(|_| random_in_unit_ball(rng, m)).collect();
            Arc::new(move |eta: &[f64]| {
                let best = centres
                    .iter()
                    .enumerate()
                    .max_by(|x, y| dot(x.1, eta).total_cmp(&dot(y.1, eta)))
                    .map(|(i, _)| i)
                    .expect("at least two cells");
                values[best].clone()
            })
        }
        MapFamily::HemisphereSign => {
            let d = unit_vector(rng, n);
            let w = unit_vector(rng, m);
            Arc::new(move |eta: &[f64]| {
                let s = if dot(&d, eta) >= 0.0 { 1.0 } else { -1.0 };
                w.iter().map(|v| s * v).collect()
            })
        }
        MapFamily::SmoothSquashed => {
            let scale = rng.random_range(0.5..4.0);
            let a: Vec<f64> = (0..m * n)
                .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let b: Vec<f64> = (0..m)
                .map(|_| 0.5 * rng.sample::<f64, _>(StandardNormal))
                .collect();
            Arc::new(move |eta: &[f64]| {
                let v: Vec<f64> = (0..m)
                    .map(|i| b[i] + dot(&a[i * n..(i + 1) * n], eta))
                    .collect();
                let s = (1.0 + dot(&v, &v)).sqrt();
                v.into_iter().map(|x| x / s).collect()
            })
        }
    };
    BoundaryMap::new(n, m, eval)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorantSample {
    pub trial: usize,
    pub family: MapFamily,
    pub radius: f64,
    pub norm_estimate: f64,
    pub stderr: f64,
    pub majorant: f64,
    /// `|f(x)| − U(|x|N) − 4·stderr`.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorantSummary {
    /// Largest `excess` over all samples; nonpositive means no violation.
    pub max_violation: f64,
    pub samples: Vec<MajorantSample>,
}

/// Interior points per trial in [`check_kalaj_majorant`].
pub const MAJORANT_POINTS_PER_TRIAL: usize = 4;

/// Largest interior radius tested by [`check_kalaj_majorant`].
pub const MAJORANT_MAX_RADIUS: f64 = 0.8;

/// Tests `|f(x)| ≤ M_{1/2}^n(|x|)` for harmonic extensions of antisymmetrized random
/// boundary maps, cycling through [`MapFamily::ALL`].
pub fn check_kalaj_majorant(
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    mc_samples: usize,
    cfg: &QuadratureConfig,
) -> Result<MajorantSummary> {
    if trials < 1 {
        return Err(Error::domain("trials must be >= 1"));
    }
    if n < 2 || m < 1 {
        return Err(Error::domain("majorant check needs n >= 2 and m >= 1"));
    }
    let hemisphere = cap_angle_from_measure(n, 0.5)?;
    let mut samples = Vec::with_capacity(trials * MAJORANT_POINTS_PER_TRIAL);
    for trial in 0..trials {
        let family = MapFamily::ALL[trial % MapFamily::ALL.len()];
        let mut rng = block_rng(seed, trial as u64);
        let g = random_boundary_map(&mut rng, family, n, m)?.antisymmetrized();
        for j in 0..MAJORANT_POINTS_PER_TRIAL {
            let radius = MAJORANT_MAX_RADIUS * rng.random::<f64>().powf(1.0 / n as f64);
            let x: Vec<f64> = unit_vector(&mut rng, n)
                .into_iter()
                .map(|v| radius * v)
                .collect();
            let mc_seed =
                seed ^ ((trial as u64) << 20 | j as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            let est = monte_carlo_extension(KernelKind::Harmonic, &g, &x, mc_samples, mc_seed)?;
            let norm_estimate = norm(&est.estimate);
            let stderr = est.stderr_norm();
            let majorant = envelope_upper(KernelKind::Harmonic, &hemisphere, radius, cfg)?;
            samples.push(MajorantSample {
                trial,
                family,
                radius,
                norm_estimate,
                stderr,
                majorant,
                excess: norm_estimate - majorant - MC_SIGMAS * stderr,
            });
        }
    }
    let max_violation = samples
        .iter()
        .map(|s| s.excess)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(MajorantSummary {
        max_violation,
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfRow {
    pub r: f64,
    /// `(1 − M_c^n(r))/(1 − r)` for the hyperbolic kernel.
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfFit {
    pub n: usize,
    pub c: f64,
    pub rows: Vec<HopfRow>,
    /// Fitted exponent `s` in `T ≈ d εˢ e^{βε}`, `ε = 1 − r`.
    pub slope: f64,
    /// Fitted `d`.
    pub coefficient: f64,
    /// Fitted first-order correction `β`.
    pub correction: f64,
    /// `d_n` by quadrature.
    pub expected_coefficient: f64,
}

/// Radii `1 − 2^{−k}` for `k` in `k_min..=k_max`.
pub fn dyadic_radii(k_min: u32, k_max: u32) -> Vec<f64> {
    (k_min..=k_max)
        .map(|k| 1.0 - 0.5f64.powi(k as i32))
        .collect()
}

/// Fits `log T = log d + s log ε + β ε` to the hyperbolic boundary quotient.
///
/// The `β ε` column absorbs the first correction to the power law; without it the
/// fitted `d` is biased by several percent over any practical radius range.
pub fn hopf_failure_scan(
    n: usize,
    c: f64,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<HopfFit> {
    if n <= 2 {
        return Err(Error::domain(format!("Hopf scan needs n > 2, got {n}")));
    }
    if radii.len() < 3 {
        return Err(Error::domain("Hopf scan needs at least three radii"));
    }
    let cap = cap_angle_from_measure(n, c)?;
    let rows = radii
        .iter()
        .map(|&r| {
            Ok(HopfRow {
                r,
                quotient: boundary_quotient(KernelKind::HyperbolicHarmonic, &cap, r, cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let design = DMatrix::from_fn(rows.len(), 3, |i, j| {
        let eps = 1.0 - rows[i].r;
        match j {
            0 => 1.0,
            1 => eps.ln(),
            _ => eps,
        }
    });
    let rhs = DVector::from_iterator(rows.len(), rows.iter().map(|row| row.quotient.ln()));
    let sol = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Accuracy {
            context: format!("least-squares fit failed: {e}"),
            estimate: f64::NAN,
            error: f64::NAN,
        })?;
    Ok(HopfFit {
        n,
        c,
        rows,
        slope: sol[1],
        coefficient: sol[0].exp(),
        correction: sol[2],
        expected_coefficient: hyperbolic_decay_coefficient(n, c, cfg)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VMonotone {
    pub m: usize,
    pub rows: Vec<(f64, f64)>,
    pub monotone: bool,
    pub end_value: f64,
    /// `C_m`.
    pub limit: f64,
    pub pass: bool,
}

/// `V(r) = d/dr M_{1/2}^m(r)` by central differences of the hemisphere extension.
pub fn v_derivative(data: &ZonalBoundaryData, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let hi = zonal_extension_at(KernelKind::Harmonic, data, r + V_STEP, cfg)?;
    let lo = zonal_extension_at(KernelKind::Harmonic, data, r - V_STEP, cfg)?;
    Ok((hi - lo) / (2.0 * V_STEP))
}

/// Hemisphere data `χ_{S⁺} − χ_{S⁻}` on `S^{m−1}` about `e₁`.
pub fn hemisphere_data(m: usize) -> Result<ZonalBoundaryData> {
    ZonalBoundaryData::cap_indicator(unit_e1(m), &cap_angle_from_measure(m, 0.5)?)
}

/// Checks that `V` is nonincreasing along `radii` (sorted ascending, within
/// `[0, 1 − V_STEP)`) and that its last value is at least `C_m`.
pub fn check_v_monotone(m: usize, radii: &[f64], cfg: &QuadratureConfig) -> Result<VMonotone> {
    if m < 2 {
        return Err(Error::domain(format!("V needs m >= 2, got {m}")));
    }
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(
            "radii must be nonempty and strictly increasing",
        ));
    }
    if radii[0] < 0.0 || *radii.last().expect("nonempty") + V_STEP >= 1.0 {
        return Err(Error::domain("radii must lie in [0, 1 - step)"));
    }
    let data = hemisphere_data(m)?;
    let rows = radii
        .iter()
        .map(|&r| Ok((r, v_derivative(&data, r, cfg)?)))
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows.windows(2).all(|w| w[1].1 <= w[0].1 + MONOTONE_SLACK);
    let end_value = rows.last().expect("nonempty").1;
    let limit = kalaj_constant(m)?;
    Ok(VMonotone {
        m,
        monotone,
        end_value,
        limit,
        pass: monotone && end_value >= limit - 1e-6,
        rows,
    })
}
