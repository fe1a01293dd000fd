//! Special functions and sphere constants.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 5.242_187_5; // 671/128
const LANCZOS_C0: f64 = 0.999_999_999_999_997_092;
const LANCZOS_COEF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Hard cap on series terms for `2F1` evaluation.
pub const HYPERGEOMETRIC_MAX_TERMS: usize = 100_000;

/// `ln Γ(x)` for `x > 0` (14-term Lanczos approximation, `g = 671/128`).
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("log_gamma requires x > 0, got {x}")));
    }
    // Γ(1) = Γ(2) = 1 exactly; the approximation leaves ~1e-16 residue there.
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    // Shift small arguments up where the series is most accurate.
    if x < 1.0 {
        return Ok(log_gamma(x + 1.0)? - x.ln());
    }
    let tmp = x + LANCZOS_G;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut y = x;
    let mut ser = LANCZOS_C0;
    for c in LANCZOS_COEF {
        y += 1.0;
        ser += c / y;
    }
    Ok(tmp + (SQRT_2PI * ser / x).ln())
}

/// `Γ(x)` for `x > 0`, through [`log_gamma`].
pub fn gamma(x: f64) -> Result<f64> {
    log_gamma(x).map(f64::exp)
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a + j as f64))
}

fn check_hypergeometric_args(a: f64, b: f64, c: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(Error::domain("2F1 parameters must be finite"));
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::domain(format!(
            "2F1 lower parameter c = {c} is a non-positive integer"
        )));
    }
    if !(c - a - b > -1.0) {
        return Err(Error::domain(format!(
            "2F1[a,b;c;-1] diverges unless c - a - b > -1 (got {})",
            c - a - b
        )));
    }
    Ok(())
}

/// `₂F₁[a, b; c; −1]`.
///
/// The alternating series at `x = −1` converges too slowly to sum directly, so the
/// Pfaff transformation `F(a,b;c;x) = (1−x)^{−a} F(a, c−b; c; x/(x−1))` is applied,
/// which maps the argument to `1/2` and leaves a geometrically convergent series.
pub fn gauss_2f1_neg1(a: f64, b: f64, c: f64) -> Result<f64> {
    check_hypergeometric_args(a, b, c)?;
    if a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    let cb = c - b;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut small_in_row = 0;
    for k in 0..HYPERGEOMETRIC_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (cb + kf) / ((c + kf) * (kf + 1.0)) * 0.5;
        sum += term;
        if term == 0.0 {
            return Ok(2f64.powf(-a) * sum);
        }
        if term.abs() <= 1e-17 * sum.abs() {
            small_in_row += 1;
            if small_in_row >= 2 {
                return Ok(2f64.powf(-a) * sum);
            }
        } else {
            small_in_row = 0;
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(Error::Accuracy {
        context: format!(
            "2F1[{a},{b};{c};-1] did not converge in {HYPERGEOMETRIC_MAX_TERMS} terms"
        ),
        estimate: 2f64.powf(-a) * sum,
        error: term.abs(),
    })
}

/// Direct summation of the alternating series for `₂F₁[a, b; c; −1]`, returning the
/// mean of the last two partial sums.
///
/// This is the slow cross-check path for [`gauss_2f1_neg1`]; with `10⁶` terms it is
/// good to roughly `1e−12` for the parameters used in the Heinz–Schwarz constant.
pub fn gauss_2f1_neg1_direct(a: f64, b: f64, c: f64, terms: usize) -> Result<f64> {
    check_hypergeometric_args(a, b, c)?;
    let mut term = 1.0_f64;
    let mut prev = 0.0_f64;
    let mut sum = 1.0_f64;
    for k in 0..terms {
        let kf = k as f64;
        term *= -(a + kf) * (b + kf) / ((c + kf) * (kf + 1.0));
        prev = sum;
        sum += term;
    }
    Ok(0.5 * (sum + prev))
}

/// Geometric constants of the unit sphere `S^{n−1} ⊂ R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpherePrefactors {
    pub n: usize,
    /// Surface area `σ_{n−1} = 2π^{n/2} / Γ(n/2)`.
    pub sigma_area: f64,
    /// Ratio `σ_{n−2} / σ_{n−1} = Γ(n/2) / (√π Γ((n−1)/2))`.
    pub sigma_star: f64,
}

pub fn sphere_prefactors(n: usize) -> Result<SpherePrefactors> {
    if n < 2 {
        return Err(Error::domain(format!(
            "sphere dimension n must be >= 2, got {n}"
        )));
    }
    Ok(SpherePrefactors {
        n,
        sigma_area: sigma_area(n),
        sigma_star: sigma_star(n),
    })
}

/// Surface area of `S^{n−1}`; valid for `n >= 1`.
pub(crate) fn sigma_area(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * (h * PI.ln() - log_gamma(h).expect("n >= 1")).exp()
}

/// `σ_{n−2}/σ_{n−1}`; valid for `n >= 2`.
pub(crate) fn sigma_star(n: usize) -> f64 {
    let nf = n as f64;
    let lg = log_gamma(nf / 2.0).expect("n >= 2") - log_gamma((nf - 1.0) / 2.0).expect("n >= 2");
    lg.exp() / PI.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// `ln Γ` reference values (30-digit arithmetic).
    const LOG_GAMMA_REF: [(f64, f64); 11] = [
        (0.25, 1.288_022_524_698_077_457_4),
        (0.5, 0.572_364_942_924_700_087_07),
        (0.75, 0.203_280_951_431_295_371_48),
        (1.5, -0.120_782_237_635_245_222_35),
        (2.5, 0.284_682_870_472_919_159_63),
        (3.3, 0.987_098_577_894_734_404_06),
        (7.7, 7.926_541_356_269_004_778_9),
        (12.25, 18.115_669_505_710_892_619),
        (33.1, 81.906_241_085_677_235_264),
        (49.9, 144.175_646_053_750_332_98),
        (1.000_000_1, -5.772_155_829_918_507_097e-8),
    ];

    fn close_mixed(got: f64, want: f64, tol: f64) -> bool {
        (got - want).abs() <= tol * want.abs().max(1.0)
    }

    #[test]
    fn log_gamma_trivial_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_relative_eq!(log_gamma(0.5).unwrap(), PI.sqrt().ln(), epsilon = 1e-15);
        assert_relative_eq!(log_gamma(6.0).unwrap(), 120f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn log_gamma_reference_values() {
        for (x, want) in LOG_GAMMA_REF {
            let got = log_gamma(x).unwrap();
            assert!(
                close_mixed(got, want, 1e-13),
                "lnΓ({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn log_gamma_rejects_non_positive() {
        for x in [0.0, -1.0, -0.5, f64::NAN] {
            assert!(matches!(log_gamma(x), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(3.7, 0), 1.0);
        assert_eq!(pochhammer(1.0, 4), 24.0);
        assert_eq!(pochhammer(0.5, 2), 0.75);
    }

    #[test]
    fn hypergeometric_examples() {
        assert_eq!(gauss_2f1_neg1(0.0, 1.0, 1.5).unwrap(), 1.0);
        assert_relative_eq!(
            gauss_2f1_neg1(0.5, 1.0, 1.5).unwrap(),
            PI / 4.0,
            epsilon = 1e-14
        );
        // v₃ from 30-digit series evaluation.
        assert_relative_eq!(
            gauss_2f1_neg1(0.5, 1.0, 3.0).unwrap(),
            0.875_805_665_989_840_260_28,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            gauss_2f1_neg1(1.3, 0.7, 2.9).unwrap(),
            0.785_840_879_045_979_106_05,
            epsilon = 1e-13
        );
        assert_relative_eq!(
            gauss_2f1_neg1(-2.5, 1.5, 0.7).unwrap(),
            13.395_305_256_770_049_618,
            max_relative = 1e-13
        );
    }

    #[test]
    fn direct_alternating_sum_matches_arctan() {
        let v = gauss_2f1_neg1_direct(0.5, 1.0, 1.5, 1_000_000).unwrap();
        assert!((v - PI / 4.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn hypergeometric_domain_errors() {
        assert!(matches!(
            gauss_2f1_neg1(1.0, 1.0, 0.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            gauss_2f1_neg1(0.5, 1.0, -2.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn hypergeometric_iteration_cap() {
        // Huge parameters push the leading terms far above the 1/2-ratio tail.
        let err = gauss_2f1_neg1(1e9, 0.5, 1e9).unwrap_err();
        assert!(err.is_accuracy(), "{err}");
    }

    /// Euler's integral `Γ(c)/(Γ(b)Γ(c−b)) ∫₀¹ t^{b−1}(1−t)^{c−b−1}(1+t)^{−a} dt` with
    /// `b = 1`, after `t = 1 − s²` to remove the endpoint singularity, summed with
    /// composite Simpson on 10⁵ subintervals.
    fn euler_integral_b1(a: f64, c: f64) -> f64 {
        let e = c - 2.0; // exponent of s after substitution: 2s·s^{2(c−2)}
        let f = |s: f64| 2.0 * s * s.powf(2.0 * e) * (2.0 - s * s).powf(-a);
        let n = 100_000;
        let h = 1.0 / n as f64;
        let mut acc = f(0.0) + f(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(i as f64 * h);
        }
        let pref = (log_gamma(c).unwrap() - log_gamma(c - 1.0).unwrap()).exp();
        pref * acc * h / 3.0
    }

    #[test]
    fn hypergeometric_matches_euler_integral() {
        for c in [2.5, 3.5] {
            let series = gauss_2f1_neg1(0.5, 1.0, c).unwrap();
            let integral = euler_integral_b1(0.5, c);
            assert!(
                (series - integral).abs() < 1e-9,
                "c={c}: {series} vs {integral}"
            );
        }
    }

    #[test]
    fn sphere_prefactor_examples() {
        let p2 = sphere_prefactors(2).unwrap();
        assert_relative_eq!(p2.sigma_area, 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(p2.sigma_star, 1.0 / PI, epsilon = 1e-15);
        let p3 = sphere_prefactors(3).unwrap();
        assert_relative_eq!(p3.sigma_area, 4.0 * PI, epsilon = 1e-13);
        assert_relative_eq!(p3.sigma_star, 0.5, epsilon = 1e-15);
        let p4 = sphere_prefactors(4).unwrap();
        assert_relative_eq!(p4.sigma_area, 2.0 * PI * PI, epsilon = 1e-13);
        assert_relative_eq!(p4.sigma_star, 2.0 / PI, epsilon = 1e-15);
        assert!(sphere_prefactors(1).is_err());
    }

    #[test]
    fn sigma_star_links_consecutive_areas() {
        for n in 3..=10 {
            let p = sphere_prefactors(n).unwrap();
            let prev = sigma_area(n - 1);
            assert!((p.sigma_star * p.sigma_area - prev).abs() < 1e-12, "n={n}");
        }
    }

    proptest! {
        #[test]
        fn pochhammer_recurrence(a in -20i32..20, k in 0u32..12) {
            let a = a as f64 * 0.5;
            prop_assert_eq!(pochhammer(a, k + 1), pochhammer(a, k) * (a + k as f64));
        }

        #[test]
        fn log_gamma_recurrence(x in 0.5f64..49.0) {
            let lhs = log_gamma(x + 1.0).unwrap();
            let rhs = log_gamma(x).unwrap() + x.ln();
            prop_assert!((lhs - rhs).abs() <= 2e-13 * lhs.abs().max(1.0));
        }
    }
}
