//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Each panel is integrated with the 15-point Kronrod rule; the difference to the
//! embedded 7-point Gauss rule is the panel's error estimate. The panel with the
//! largest estimate is bisected until the summed estimate falls below
//! `max(abs_tol, rel_tol * |I|)` or the subdivision budget runs out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kronrod abscissae on `[0, 1]`; odd indices are shared with the Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and subdivision budget for every numeric integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let cfg = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// A configuration two orders of magnitude tighter, used where results are
    /// differenced (finite differences, derivative extrapolation).
    pub fn tight() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::domain(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::domain(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::Accuracy {
            context: format!("non-finite integrand on [{a}, {b}]"),
            estimate: value,
            error,
        });
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    integrate_with_breaks(f, a, b, &[], cfg)
}

/// Integrates `f` over `[a, b]`, starting from panels split at `breaks`.
///
/// Break points outside `(a, b)` are ignored. Discontinuities of the integrand
/// should be listed here; the adaptive loop would otherwise spend most of its
/// budget bisecting towards them.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
        });
    }
    if a > b {
        let est = integrate_with_breaks(f, b, a, breaks, cfg)?;
        return Ok(Estimate {
            value: -est.value,
            ..est
        });
    }

    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut nodes = Vec::with_capacity(cuts.len() + 2);
    nodes.push(a);
    nodes.extend(cuts);
    nodes.push(b);

    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for w in nodes.windows(2) {
        let p = gauss_kronrod(&f, w[0], w[1])?;
        value += p.value;
        error += p.error;
        heap.push(p);
    }

    let mut subdivisions = heap.len();
    while error > cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::Accuracy {
                context: format!(
                    "adaptive quadrature on [{a}, {b}] exhausted {subdivisions} subdivisions"
                ),
                estimate: value,
                error,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel width at machine resolution: nothing left to refine.
            return Err(Error::Accuracy {
                context: format!(
                    "panel [{}, {}] cannot be bisected further",
                    worst.a, worst.b
                ),
                estimate: value,
                error,
            });
        }
        let left = gauss_kronrod(&f, worst.a, mid)?;
        let right = gauss_kronrod(&f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }

    // Re-sum to shed the drift of the running update.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    Ok(Estimate {
        value,
        error,
        subdivisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn kronrod_weights_sum_to_interval_length() {
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert_relative_eq!(k, 2.0, epsilon = 1e-15);
        assert_relative_eq!(g, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn single_panel_is_exact_for_degree_22() {
        for deg in 0..=22 {
            let p = gauss_kronrod(&|x: f64| x.powi(deg), 0.0, 1.0).unwrap();
            assert_relative_eq!(p.value, 1.0 / (deg as f64 + 1.0), epsilon = 1e-14);
        }
    }

    #[test]
    fn smooth_and_peaked_integrands() {
        let cfg = QuadratureConfig::default();
        let e = integrate(f64::sin, 0.0, PI, &cfg).unwrap();
        assert_relative_eq!(e.value, 2.0, epsilon = 1e-12);

        // Poisson-type peak of width 1e-4 at the origin.
        let eps = 1e-4_f64;
        let e = integrate(|t: f64| eps / (eps * eps + t * t), 0.0, 1.0, &cfg).unwrap();
        assert_relative_eq!(e.value, (1.0 / eps).atan(), epsilon = 1e-10);
    }

    #[test]
    fn breaks_handle_jump() {
        let cfg = QuadratureConfig::default();
        let f = |t: f64| if t < 0.3 { 1.0 } else { -1.0 };
        let e = integrate_with_breaks(f, 0.0, 1.0, &[0.3], &cfg).unwrap();
        assert_relative_eq!(e.value, 0.3 - 0.7, epsilon = 1e-14);
        assert!(e.subdivisions <= 2);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let cfg = QuadratureConfig::default();
        let e = integrate(|x| x * x, 1.0, 0.0, &cfg).unwrap();
        assert_relative_eq!(e.value, -1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn budget_exhaustion_is_accuracy_error() {
        let cfg = QuadratureConfig::new(1e-14, 1e-14, 3).unwrap();
        let err = integrate(|x: f64| x.abs().sqrt().recip(), 1e-12, 1.0, &cfg).unwrap_err();
        assert!(err.is_accuracy());
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(QuadratureConfig::new(0.0, 1e-10, 10).is_err());
        assert!(QuadratureConfig::new(1e-10, -1.0, 10).is_err());
        assert!(QuadratureConfig::new(1e-10, 1e-10, 0).is_err());
    }
}
