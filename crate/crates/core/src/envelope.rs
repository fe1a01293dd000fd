//! Spherical caps, the extremal envelopes `M_c^n`, `m_c^n` and the boundary
//! derivative constants built from them.
//!
//! For a kernel with exponent pair `(ν, μ)` the upper envelope on the axis is
//!
//! ```text
//! M_c^n(r) = 2σ*(n) (1−r²)^ν ∫₀^{α(c)} sin^{n−2}t / (1 − 2r cos t + r²)^μ dt − 1
//! ```
//!
//! and the lower envelope integrates over `[π−α(c), π]` instead. Near the sphere the
//! upper envelope is evaluated through the boundary quotient
//! `T(r) = (1 − M_c^n(r)) / (1 − r)`, whose integral lives on the complementary arc
//! `[α(c), π]` where the integrand stays bounded.
//!
//! # Hyperbolic decay coefficient
//!
//! For the hyperbolic kernel `(ν, μ) = (n−1, n−1)` the quotient factors as
//! `T(r) = 2σ*(n) (1−r)^{n−2} (1+r)^{n−1} J(r)` with `J(r) = ∫_α^π Q(r,t) dt`.
//! As `r → 1⁻`, `1 − 2r cos t + r² → 4 sin²(t/2)`, so `J(r) → ∫_α^π q(t) dt` with
//! `q(t) = 4^{1−n} sin^{n−2}t / sin^{2(n−1)}(t/2)`, and `(1+r)^{n−1} → 2^{n−1}`.
//! Hence `T(r) ~ d_n (1−r)^{n−2}` with `d_n = 2^n σ*(n) ∫_α^π q(t) dt`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::specfn::{gauss_2f1_neg1, gauss_2f1_neg1_direct, log_gamma, sigma_star};

/// Radius above which the upper envelope switches to the boundary-quotient form.
pub const NEAR_BOUNDARY_RADIUS: f64 = 0.999;

/// Tolerance used when checking a `CapSpec`'s measure against its angle.
pub const CAP_CONSISTENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    Harmonic,
    HyperbolicHarmonic,
}

impl KernelKind {
    /// The exponent pair `(ν, μ)` in dimension `n`.
    pub fn exponents(self, n: usize) -> (f64, f64) {
        let nf = n as f64;
        match self {
            KernelKind::Harmonic => (1.0, nf / 2.0),
            KernelKind::HyperbolicHarmonic => (nf - 1.0, nf - 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Harmonic => "harmonic",
            KernelKind::HyperbolicHarmonic => "hyperbolic",
        }
    }
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harmonic" => Ok(KernelKind::Harmonic),
            "hyperbolic" | "hyperbolic-harmonic" => Ok(KernelKind::HyperbolicHarmonic),
            other => Err(Error::domain(format!("unknown kernel kind {other:?}"))),
        }
    }
}

/// A polar cap on `S^{n−1}` given by its normalized measure `c` and half-angle `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapSpec {
    n: usize,
    c: f64,
    alpha: f64,
}

impl CapSpec {
    /// Builds a cap from both parameters, checking `c = σ*(n) ∫₀^α sin^{n−2}`.
    pub fn new(n: usize, c: f64, alpha: f64) -> Result<Self> {
        check_dimension(n)?;
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::domain(format!(
                "cap measure must lie in (0, 1), got {c}"
            )));
        }
        if !(alpha > 0.0 && alpha < PI) {
            return Err(Error::domain(format!(
                "cap angle must lie in (0, π), got {alpha}"
            )));
        }
        let measure = cap_measure(n, alpha);
        if (measure - c).abs() > CAP_CONSISTENCY_TOL {
            return Err(Error::domain(format!(
                "cap angle {alpha} has measure {measure}, not {c}"
            )));
        }
        Ok(Self { n, c, alpha })
    }

    /// The whole sphere, `c = 1`, `α = π`.
    pub fn full(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self {
            n,
            c: 1.0,
            alpha: PI,
        })
    }

    /// The empty cap, `c = 0`, `α = 0`.
    pub fn empty(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self {
            n,
            c: 0.0,
            alpha: 0.0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn measure(&self) -> f64 {
        self.c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The cap of measure `1 − c`, i.e. the closure of the complement about `−x̃`.
    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            c: 1.0 - self.c,
            alpha: PI - self.alpha,
        }
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("dimension n must be >= 2, got {n}")));
    }
    Ok(())
}

/// `∫₀^α sin^k t dt` by the reduction formula.
fn sine_power_integral(k: usize, alpha: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    let mut even = alpha; // I_0
    let mut odd = 1.0 - c; // I_1
    if k == 0 {
        return even;
    }
    if k == 1 {
        return odd;
    }
    let mut result = 0.0;
    for j in 2..=k {
        let jf = j as f64;
        let prev = if j % 2 == 0 { even } else { odd };
        result = -s.powi(j as i32 - 1) * c / jf + (jf - 1.0) / jf * prev;
        if j % 2 == 0 {
            even = result;
        } else {
            odd = result;
        }
    }
    result
}

/// Normalized measure `σ*(n) ∫₀^α sin^{n−2}t dt` of the cap with half-angle `α`.
pub fn cap_measure(n: usize, alpha: f64) -> f64 {
    sigma_star(n) * sine_power_integral(n - 2, alpha)
}

/// Solves for the half-angle of the cap of measure `c`.
///
/// Bisection brackets the root, Newton steps (derivative `σ*(n) sin^{n−2}α`)
/// polish it; any Newton step that would leave the bracket falls back to bisection.
pub fn cap_angle_from_measure(n: usize, c: f64) -> Result<CapSpec> {
    check_dimension(n)?;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::domain(format!(
            "cap measure must lie in (0, 1), got {c}"
        )));
    }
    let s = sigma_star(n);
    let f = |a: f64| cap_measure(n, a) - c;
    let (mut lo, mut hi) = (0.0_f64, PI);
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut alpha = 0.5 * (lo + hi);
    for _ in 0..100 {
        let val = f(alpha);
        if val < 0.0 {
            lo = alpha;
        } else {
            hi = alpha;
        }
        let slope = s * alpha.sin().powi(n as i32 - 2);
        let mut next = alpha - val / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - alpha).abs();
        alpha = next;
        if step < 1e-15 || hi - lo < 1e-15 {
            break;
        }
    }
    Ok(CapSpec { n, c, alpha })
}

/// `1 − 2r cos t + r²` written as `(1−r)² + 4r sin²(t/2)` to keep relative accuracy
/// when both `r → 1` and `t → 0`. Valid for negative `r` as well.
#[inline]
pub(crate) fn kernel_denominator(r: f64, t: f64) -> f64 {
    let s = (0.5 * t).sin();
    (1.0 - r) * (1.0 - r) + 4.0 * r * s * s
}

fn check_radius(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!("radius must lie in [0, 1), got {r}")));
    }
    Ok(())
}

fn cap_integral(
    kind: KernelKind,
    n: usize,
    r: f64,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (_, mu) = kind.exponents(n);
    let k = n as i32 - 2;
    let integrand = |t: f64| t.sin().powi(k) / kernel_denominator(r, t).powf(mu);
    Ok(integrate(integrand, lo, hi, cfg)?.value)
}

/// Upper envelope `M_c^n(r)`.
pub fn envelope_upper(
    kind: KernelKind,
    cap: &CapSpec,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_radius(r)?;
    if r > NEAR_BOUNDARY_RADIUS {
        return Ok(1.0 - (1.0 - r) * boundary_quotient(kind, cap, r, cfg)?);
    }
    let n = cap.n;
    let (nu, _) = kind.exponents(n);
    let integral = cap_integral(kind, n, r, 0.0, cap.alpha, cfg)?;
    Ok(2.0 * sigma_star(n) * (1.0 - r * r).powf(nu) * integral - 1.0)
}

/// Upper envelope without the near-boundary rerouting; used to cross-check it.
pub fn envelope_upper_direct(
    kind: KernelKind,
    cap: &CapSpec,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_radius(r)?;
    let n = cap.n;
    let (nu, _) = kind.exponents(n);
    let integral = cap_integral(kind, n, r, 0.0, cap.alpha, cfg)?;
    Ok(2.0 * sigma_star(n) * (1.0 - r * r).powf(nu) * integral - 1.0)
}

/// Lower envelope `m_c^n(r)`.
pub fn envelope_lower(
    kind: KernelKind,
    cap: &CapSpec,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_radius(r)?;
    let n = cap.n;
    let (nu, _) = kind.exponents(n);
    let integral = cap_integral(kind, n, r, PI - cap.alpha, PI, cfg)?;
    Ok(2.0 * sigma_star(n) * (1.0 - r * r).powf(nu) * integral - 1.0)
}

/// Boundary quotient `T(r) = (1 − M_c^n(r)) / (1 − r)` in factored form,
/// `2σ*(n) (1+r)^ν (1−r)^{ν−1} ∫_α^π sin^{n−2}t / (1 − 2r cos t + r²)^μ dt`.
pub fn boundary_quotient(
    kind: KernelKind,
    cap: &CapSpec,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_radius(r)?;
    let n = cap.n;
    let (nu, _) = kind.exponents(n);
    let integral = cap_integral(kind, n, r, cap.alpha, PI, cfg)?;
    Ok(2.0 * sigma_star(n) * (1.0 + r).powf(nu) * (1.0 - r).powf(nu - 1.0) * integral)
}

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::domain(format!(
            "{name} must lie in (-1, 1), got {x}"
        )));
    }
    Ok(())
}

/// `D_n(a)`: radial derivative at `r = 1` of the harmonic envelope `M_c^n` with
/// `c = (1+a)/2`, from the limit formula
/// `2^{2−n} σ*(n) ∫_{α(c)}^π sin^{n−2}t / sin^n(t/2) dt`.
pub fn boundary_derivative_harmonic(n: usize, a: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_dimension(n)?;
    check_open_unit("a", a)?;
    let cap = cap_angle_from_measure(n, 0.5 * (1.0 + a))?;
    let k = n as i32 - 2;
    let ni = n as i32;
    let integrand = |t: f64| t.sin().powi(k) / (0.5 * t).sin().powi(ni);
    let integral = integrate(integrand, cap.alpha, PI, cfg)?.value;
    Ok(2f64.powi(2 - ni) * sigma_star(n) * integral)
}

fn kalaj_from_hypergeometric(m: usize, f: f64) -> Result<f64> {
    let mf = m as f64;
    let log_scale = log_gamma(mf + 1.0)?
        - 1.5 * mf * std::f64::consts::LN_2
        - log_gamma((1.0 + mf) / 2.0)?
        - log_gamma((3.0 + mf) / 2.0)?;
    Ok(log_scale.exp() * (1.0 + mf - (mf - 2.0) * f))
}

fn check_kalaj_dimension(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::domain(format!(
            "Heinz–Schwarz constant needs m >= 2, got {m}"
        )));
    }
    Ok(())
}

/// Heinz–Schwarz constant
/// `C_m = m! (1 + m − (m−2) ₂F₁[1/2, 1; (3+m)/2; −1]) / (2^{3m/2} Γ((1+m)/2) Γ((3+m)/2))`.
pub fn kalaj_constant(m: usize) -> Result<f64> {
    check_kalaj_dimension(m)?;
    let f = gauss_2f1_neg1(0.5, 1.0, (3.0 + m as f64) / 2.0)?;
    kalaj_from_hypergeometric(m, f)
}

/// [`kalaj_constant`] with the hypergeometric factor from direct alternating summation.
pub fn kalaj_constant_direct(m: usize, terms: usize) -> Result<f64> {
    check_kalaj_dimension(m)?;
    let f = gauss_2f1_neg1_direct(0.5, 1.0, (3.0 + m as f64) / 2.0, terms)?;
    kalaj_from_hypergeometric(m, f)
}

/// Planar boundary bound `s⁻(b) = (2/π) cot(π(1+b)/4)`.
pub fn schwarz_planar_bound(b: f64) -> Result<f64> {
    check_open_unit("b", b)?;
    Ok(2.0 / PI / (0.25 * PI * (1.0 + b)).tan())
}

/// Leading coefficient `d_n` of `T(r) ~ d_n (1−r)^{n−2}` for the hyperbolic envelope.
pub fn hyperbolic_decay_coefficient(n: usize, c: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if n <= 2 {
        return Err(Error::domain(format!(
            "hyperbolic decay coefficient needs n > 2, got {n}"
        )));
    }
    let cap = cap_angle_from_measure(n, c)?;
    let k = n as i32 - 2;
    let ni = n as i32;
    let scale = 4f64.powi(1 - ni);
    let integrand = |t: f64| scale * t.sin().powi(k) / (0.5 * t).sin().powi(2 * (ni - 1));
    let integral = integrate(integrand, cap.alpha, PI, cfg)?.value;
    Ok(2f64.powi(ni) * sigma_star(n) * integral)
}

/// Ratio `|bⁱ(x)| / λ(x) = 2(n−2)/(1−r²)` for the Laplace–Beltrami operator.
///
/// The principal part of `Δ₀` is a multiple of the identity, so `λ = 1` after
/// dividing out `(1−|x|²)/4`; the ratio is unbounded as `r → 1⁻` (infinite at `r = 1`),
/// which is why the Hopf boundary-point condition fails.
pub fn hopf_condition_ratio(n: usize, r: f64) -> f64 {
    2.0 * (n as f64 - 2.0) / (1.0 - r * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const KINDS: [KernelKind; 2] = [KernelKind::Harmonic, KernelKind::HyperbolicHarmonic];

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn exponent_pairs() {
        assert_eq!(KernelKind::Harmonic.exponents(5), (1.0, 2.5));
        assert_eq!(KernelKind::HyperbolicHarmonic.exponents(5), (4.0, 4.0));
    }

    #[test]
    fn cap_angle_closed_forms() {
        for c in [0.01, 0.2, 0.37, 0.5, 0.8, 0.99] {
            let cap2 = cap_angle_from_measure(2, c).unwrap();
            assert!((cap2.alpha() - PI * c).abs() < 1e-12);
            let cap3 = cap_angle_from_measure(3, c).unwrap();
            assert!((cap3.alpha() - (1.0 - 2.0 * c).acos()).abs() < 1e-12);
        }
        for n in 2..=9 {
            let cap = cap_angle_from_measure(n, 0.5).unwrap();
            assert!((cap.alpha() - PI / 2.0).abs() < 1e-12, "n={n}");
        }
        // 25-digit reference root.
        let cap5 = cap_angle_from_measure(5, 0.3).unwrap();
        assert!((cap5.alpha() - 1.293_782_006_016_943_761_2).abs() < 1e-12);
    }

    #[test]
    fn cap_measure_matches_quadrature() {
        let tight = QuadratureConfig::tight();
        for n in 2..=10 {
            for alpha in [0.1, 1.0, 2.0, 3.0] {
                let k = n as i32 - 2;
                let q = integrate(|t: f64| t.sin().powi(k), 0.0, alpha, &tight)
                    .unwrap()
                    .value;
                assert!(
                    (cap_measure(n, alpha) - sigma_star(n) * q).abs() < 1e-13,
                    "n={n} α={alpha}"
                );
            }
        }
    }

    #[test]
    fn cap_domain_errors() {
        for c in [0.0, 1.0, -0.1, 1.5] {
            assert!(matches!(
                cap_angle_from_measure(3, c),
                Err(Error::Domain(_))
            ));
        }
        assert!(cap_angle_from_measure(1, 0.5).is_err());
        assert!(CapSpec::new(3, 0.5, 1.0).is_err());
        assert!(CapSpec::new(3, 0.5, PI / 2.0).is_ok());
    }

    #[test]
    fn envelope_at_origin_is_affine_in_measure() {
        for kind in KINDS {
            for n in 2..=5 {
                for c in [0.1, 0.5, 0.75] {
                    let cap = cap_angle_from_measure(n, c).unwrap();
                    let up = envelope_upper(kind, &cap, 0.0, &cfg()).unwrap();
                    let lo = envelope_lower(kind, &cap, 0.0, &cfg()).unwrap();
                    assert!((up - (2.0 * c - 1.0)).abs() < 1e-11);
                    assert!((lo - (2.0 * c - 1.0)).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn full_cap_is_constant_one() {
        for kind in KINDS {
            let cap = CapSpec::full(3).unwrap();
            for r in [0.0, 0.5, 0.9, 0.9995] {
                let v = envelope_upper(kind, &cap, r, &cfg()).unwrap();
                assert!((v - 1.0).abs() < 1e-10, "{kind} r={r}: {v}");
            }
        }
    }

    #[test]
    fn envelope_reference_values() {
        // 25-digit quadrature of the defining integrals.
        let cap = cap_angle_from_measure(3, 0.5).unwrap();
        let v = envelope_upper(KernelKind::Harmonic, &cap, 0.9, &cfg()).unwrap();
        assert!((v - 0.954_193_458_014_487_122_29).abs() < 1e-10);

        let cap = cap_angle_from_measure(2, 0.25).unwrap();
        let v = envelope_lower(KernelKind::Harmonic, &cap, 0.5, &cfg()).unwrap();
        assert!((v + 0.825_306_813_226_184_140_11).abs() < 1e-10);

        let cap = cap_angle_from_measure(3, 0.3).unwrap();
        let v = envelope_upper(KernelKind::HyperbolicHarmonic, &cap, 0.7, &cfg()).unwrap();
        assert!((v - 0.864_516_129_032_258_013_85).abs() < 1e-10);

        let cap = cap_angle_from_measure(4, 0.7).unwrap();
        let v = envelope_upper(KernelKind::Harmonic, &cap, 0.6, &cfg()).unwrap();
        assert!((v - 0.908_590_555_644_349_759_14).abs() < 1e-10);
    }

    /// Planar arc oracle: `P[χ_arc](r) = (1/2π) ∫ (1−r²)/(1−2r cos θ+r²) dθ` over the arc
    /// has the closed form `(1/π)[atan((1+r)/(1−r) tan(θ/2))]` evaluated at the ends.
    #[test]
    fn planar_lower_envelope_matches_arc_closed_form() {
        let c = 0.25;
        let r = 0.5;
        let alpha = PI * c;
        let prim = |th: f64| ((1.0 + r) / (1.0 - r) * (0.5 * th).tan()).atan() / PI;
        // Arc [π−α, π]: primitive tends to 1/2 at θ = π.
        let mass = 0.5 - prim(PI - alpha);
        let oracle = 2.0 * (2.0 * mass) - 1.0; // both halves of the symmetric arc
        let cap = cap_angle_from_measure(2, c).unwrap();
        let v = envelope_lower(KernelKind::Harmonic, &cap, r, &cfg()).unwrap();
        assert!((v - oracle).abs() < 1e-12, "{v} vs {oracle}");
    }

    #[test]
    fn complementary_cap_identity() {
        for kind in KINDS {
            for n in [2, 3, 4] {
                for i in 1..20 {
                    let c = i as f64 / 20.0;
                    let cap = cap_angle_from_measure(n, c).unwrap();
                    let comp = cap_angle_from_measure(n, 1.0 - c).unwrap();
                    for j in 0..20 {
                        let r = j as f64 / 20.5;
                        let lo = envelope_lower(kind, &cap, r, &cfg()).unwrap();
                        let up = envelope_upper(kind, &comp, r, &cfg()).unwrap();
                        assert!((lo + up).abs() < 1e-9, "{kind} n={n} c={c} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn envelopes_ordered_and_bounded() {
        for kind in KINDS {
            for n in [2, 3, 5] {
                for c in [0.05, 0.3, 0.5, 0.9] {
                    let cap = cap_angle_from_measure(n, c).unwrap();
                    for r in [0.05, 0.4, 0.8, 0.99] {
                        let up = envelope_upper(kind, &cap, r, &cfg()).unwrap();
                        let lo = envelope_lower(kind, &cap, r, &cfg()).unwrap();
                        assert!(
                            -1.0 < lo && lo <= up && up < 1.0,
                            "{kind} n={n} c={c} r={r}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn upper_envelope_monotone_and_tends_to_one() {
        for kind in KINDS {
            for n in [2, 3, 4] {
                let cap = cap_angle_from_measure(n, 0.3).unwrap();
                let mut prev = f64::NEG_INFINITY;
                for j in 0..20 {
                    let v = envelope_upper(kind, &cap, j as f64 * 0.05, &cfg()).unwrap();
                    assert!(v >= prev - 1e-12);
                    prev = v;
                }
                let mut gap = f64::INFINITY;
                for k in 1..=6 {
                    let r = 1.0 - 10f64.powi(-k);
                    let g = 1.0 - envelope_upper(kind, &cap, r, &cfg()).unwrap();
                    assert!(g >= 0.0 && g < gap);
                    gap = g;
                }
                assert!(gap < 1e-5);
            }
        }
    }

    #[test]
    fn near_boundary_route_agrees_with_direct_form() {
        for kind in KINDS {
            let cap = cap_angle_from_measure(3, 0.4).unwrap();
            let r = 0.9992;
            let a = envelope_upper(kind, &cap, r, &cfg()).unwrap();
            let b = envelope_upper_direct(kind, &cap, r, &QuadratureConfig::tight()).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn planar_bound_examples() {
        assert_relative_eq!(
            schwarz_planar_bound(0.0).unwrap(),
            2.0 / PI,
            epsilon = 1e-15
        );
        for i in 1..50 {
            let b = -1.0 + 2.0 * i as f64 / 50.0;
            let s = schwarz_planar_bound(b).unwrap();
            let t = (b * PI / 4.0).tan();
            assert!((s - 2.0 / PI * (1.0 - t) / (1.0 + t)).abs() < 1e-13);
            assert!(s >= (1.0 - b) / 2.0);
            assert!(s > 0.0);
        }
        assert!(schwarz_planar_bound(1.0).is_err());
        assert!(schwarz_planar_bound(-1.0).is_err());
    }

    #[test]
    fn boundary_derivative_planar_closed_form() {
        assert!((boundary_derivative_harmonic(2, 0.0, &cfg()).unwrap() - 2.0 / PI).abs() < 1e-12);
        for i in 1..40 {
            let a = -0.95 + 1.9 * i as f64 / 40.0;
            let d = boundary_derivative_harmonic(2, a, &cfg()).unwrap();
            assert!(
                (d - schwarz_planar_bound(a).unwrap()).abs() < 1e-10,
                "a={a}"
            );
        }
    }

    #[test]
    fn boundary_derivative_reference_values() {
        let want = [
            (3, -0.5, 1.0),
            (3, 0.5, 0.154_700_538_379_251_529_02),
            (4, -0.5, 0.689_401_376_437_853_455_31),
            (4, 0.5, 0.094_332_520_408_100_222_398),
        ];
        for (n, a, v) in want {
            let d = boundary_derivative_harmonic(n, a, &cfg()).unwrap();
            assert!((d - v).abs() < 1e-10, "n={n} a={a}: {d}");
        }
    }

    #[test]
    fn cap_integral_and_hypergeometric_constants_agree() {
        let exact = [
            (2, std::f64::consts::FRAC_2_PI),
            (3, 0.414_213_562_373_095_048_80),
            (4, 0.273_239_544_735_162_686_15),
            (5, 0.181_980_515_339_463_859_80),
        ];
        for (n, v) in exact {
            let d = boundary_derivative_harmonic(n, 0.0, &cfg()).unwrap();
            let c = kalaj_constant(n).unwrap();
            assert!((d - c).abs() < 1e-8, "n={n}");
            assert!((c - v).abs() < 1e-12, "n={n}: {c}");
        }
        assert_relative_eq!(kalaj_constant(2).unwrap(), 2.0 / PI, epsilon = 1e-14);
        assert!(kalaj_constant(1).is_err());
    }

    #[test]
    fn direct_hypergeometric_route_for_heinz_constant() {
        for m in 2..=5 {
            let fast = kalaj_constant(m).unwrap();
            let slow = kalaj_constant_direct(m, 200_000).unwrap();
            assert!((fast - slow).abs() < 1e-10, "m={m}");
        }
    }

    #[test]
    fn boundary_derivative_decreasing_in_a() {
        for n in [2, 3, 4, 6] {
            let mut prev = f64::INFINITY;
            for i in 0..30 {
                let a = -0.9 + 1.8 * i as f64 / 29.0;
                let d = boundary_derivative_harmonic(n, a, &cfg()).unwrap();
                assert!(d < prev && d > 0.0);
                prev = d;
            }
        }
        assert!(boundary_derivative_harmonic(3, 1.0, &cfg()).is_err());
    }

    #[test]
    fn finite_difference_of_envelope_matches_limit_formula() {
        let tight = QuadratureConfig::tight();
        for n in [2, 3, 4] {
            for a in [-0.3, 0.0, 0.4] {
                let cap = cap_angle_from_measure(n, 0.5 * (1.0 + a)).unwrap();
                let h = 1e-5;
                let r = 1.0 - 1e-4;
                let fd = (envelope_upper(KernelKind::Harmonic, &cap, r + h, &tight).unwrap()
                    - envelope_upper(KernelKind::Harmonic, &cap, r - h, &tight).unwrap())
                    / (2.0 * h);
                let d = boundary_derivative_harmonic(n, a, &tight).unwrap();
                assert!(((fd - d) / d).abs() < 1e-3, "n={n} a={a}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn hyperbolic_one_sided_difference_vanishes() {
        for n in [3, 4] {
            let cap = cap_angle_from_measure(n, 0.5).unwrap();
            let mut prev = f64::INFINITY;
            for k in 4..=14 {
                let r = 1.0 - 2f64.powi(-k);
                let q = (1.0
                    - envelope_upper(KernelKind::HyperbolicHarmonic, &cap, r, &cfg()).unwrap())
                    / (1.0 - r);
                assert!(q < prev, "n={n} k={k}");
                prev = q;
            }
            assert!(prev < 1e-4);
        }
    }

    #[test]
    fn hyperbolic_decay_reference_values() {
        let c = cfg();
        assert!((hyperbolic_decay_coefficient(3, 0.5, &c).unwrap() - 0.5).abs() < 1e-10);
        assert!(
            (hyperbolic_decay_coefficient(4, 0.5, &c).unwrap() - 0.424_413_181_578_387_562_05)
                .abs()
                < 1e-10
        );
        assert!((hyperbolic_decay_coefficient(3, 0.25, &c).unwrap() - 1.5).abs() < 1e-10);
        assert!(hyperbolic_decay_coefficient(2, 0.5, &c).is_err());
    }

    #[test]
    fn hyperbolic_decay_decreasing_in_measure() {
        for n in [3, 4, 5] {
            let mut prev = f64::INFINITY;
            for i in 1..20 {
                let d = hyperbolic_decay_coefficient(n, i as f64 / 20.0, &cfg()).unwrap();
                assert!(d < prev);
                prev = d;
            }
        }
    }

    #[test]
    fn hopf_ratio_examples() {
        assert_eq!(hopf_condition_ratio(3, 0.0), 2.0);
        assert!((hopf_condition_ratio(4, 0.5) - 16.0 / 3.0).abs() < 1e-15);
        let mut prev = 0.0;
        for k in 1..12 {
            let v = hopf_condition_ratio(3, 1.0 - 2f64.powi(-k));
            assert!(v > prev);
            prev = v;
        }
        assert!(prev > 2000.0);
    }

    proptest! {
        #[test]
        fn cap_angle_increases_with_measure(n in 2usize..9, c1 in 0.001f64..0.998, dc in 1e-4f64..1e-3) {
            let c2 = (c1 + dc).min(0.9995);
            let a1 = cap_angle_from_measure(n, c1).unwrap();
            let a2 = cap_angle_from_measure(n, c2).unwrap();
            prop_assert!(a2.alpha() > a1.alpha());
            prop_assert!((cap_measure(n, a1.alpha()) - c1).abs() < 1e-12);
        }
    }
}
