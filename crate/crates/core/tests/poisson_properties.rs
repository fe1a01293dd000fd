use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use schwarz_core::envelope::{cap_angle_from_measure, envelope_upper};
use schwarz_core::poisson::{
    euclidean_laplacian, laplace_beltrami_residual, monte_carlo_extension, zonal_extension_at,
    ZonalExtension,
};
use schwarz_core::verify::random_step_profile;
use schwarz_core::{KernelKind, QuadratureConfig, ZonalBoundaryData};

const KINDS: [KernelKind; 2] = [KernelKind::Harmonic, KernelKind::HyperbolicHarmonic];

fn unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / s).collect()
}

fn interior(rng: &mut ChaCha8Rng, n: usize, max_r: f64) -> Vec<f64> {
    let r = max_r * rng.random::<f64>();
    unit(rng, n).into_iter().map(|x| r * x).collect()
}

#[test]
fn origin_value_is_mean_for_both_kernels() {
    let cfg = QuadratureConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 2..=5 {
        for _ in 0..5 {
            let axis = unit(&mut rng, n);
            let data = random_step_profile(&mut rng, n, axis).unwrap();
            let mean = data.mean(&cfg).unwrap();
            for kind in KINDS {
                let h0 = zonal_extension_at(kind, &data, 0.0, &cfg).unwrap();
                assert!((h0 - mean).abs() < 1e-10, "n={n} {kind}");
            }
        }
    }
}

/// With the data axis along `x`, the point lies on the axis and the 1-D reduction is exact.
#[test]
fn monte_carlo_agrees_with_zonal_reduction() {
    let cfg = QuadratureConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..20 {
        let n = 2 + i % 3;
        let kind = KINDS[i % 2];
        let x = interior(&mut rng, n, 0.8);
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let axis: Vec<f64> = x.iter().map(|v| v / r).collect();
        let data = random_step_profile(&mut rng, n, axis).unwrap();
        let exact = zonal_extension_at(kind, &data, r, &cfg).unwrap();
        let est =
            monte_carlo_extension(kind, &data.to_boundary_map(), &x, 100_000, i as u64).unwrap();
        assert!(
            (est.estimate[0] - exact).abs() <= 4.0 * est.stderr[0],
            "point {i}: {} vs {exact} ± {}",
            est.estimate[0],
            est.stderr[0]
        );
    }
}

/// Reusing the seed across the stencil makes the finite-difference Laplacian a
/// Monte-Carlo average of kernel Laplacians, each of which is `O(step²)`.
#[test]
fn extensions_satisfy_their_laplace_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 3;
    for trial in 0..4u64 {
        let axis = unit(&mut rng, n);
        let data = random_step_profile(&mut rng, n, axis).unwrap();
        let g = data.to_boundary_map();
        let x = interior(&mut rng, n, 0.5);
        let harmonic = |p: &[f64]| {
            Ok(monte_carlo_extension(KernelKind::Harmonic, &g, p, 20_000, trial)?.estimate[0])
        };
        let lap = euclidean_laplacian(harmonic, n, &x, 1e-3).unwrap();
        assert!(lap.abs() < 1e-3, "harmonic Laplacian {lap}");
        let hyperbolic = |p: &[f64]| {
            Ok(
                monte_carlo_extension(KernelKind::HyperbolicHarmonic, &g, p, 20_000, trial)?
                    .estimate[0],
            )
        };
        let lb = laplace_beltrami_residual(hyperbolic, n, &x, 1e-3).unwrap();
        assert!(lb.abs() < 1e-3, "Laplace–Beltrami residual {lb}");
    }
}

#[test]
fn extensions_preserve_range() {
    let cfg = QuadratureConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..30 {
        let n = rng.random_range(2..=5);
        let axis = unit(&mut rng, n);
        let data = random_step_profile(&mut rng, n, axis).unwrap();
        for kind in KINDS {
            for s in [-0.99, -0.6, 0.0, 0.3, 0.9, 0.999] {
                let h = zonal_extension_at(kind, &data, s, &cfg).unwrap();
                assert!(h.abs() <= 1.0 + 1e-12, "{h}");
            }
        }
    }
}

#[test]
fn off_axis_evaluation_falls_back_to_sampling() {
    let cfg = QuadratureConfig::default();
    let cap = cap_angle_from_measure(3, 0.4).unwrap();
    let data = ZonalBoundaryData::cap_indicator(vec![0.0, 0.0, 1.0], &cap).unwrap();
    let ext = ZonalExtension::new(KernelKind::Harmonic, data.clone(), cfg);
    let on_axis = ext.eval(&[0.0, 0.0, 0.5]).unwrap();
    assert!(
        (on_axis - envelope_upper(KernelKind::Harmonic, &cap, 0.5, &cfg).unwrap()).abs() < 1e-10
    );
    // Rotating the point about the axis leaves the value unchanged.
    let x = [0.3, 0.0, 0.4];
    let y = [0.0, 0.3, 0.4];
    let vx = monte_carlo_extension(
        KernelKind::Harmonic,
        &data.to_boundary_map(),
        &x,
        400_000,
        9,
    )
    .unwrap();
    let vy = monte_carlo_extension(
        KernelKind::Harmonic,
        &data.to_boundary_map(),
        &y,
        400_000,
        10,
    )
    .unwrap();
    assert!((vx.estimate[0] - vy.estimate[0]).abs() < 4.0 * (vx.stderr[0] + vy.stderr[0]));
}

#[test]
fn smooth_profile_extension_is_linear_for_cosine() {
    let cfg = QuadratureConfig::tight();
    for n in 2..=5 {
        let data = ZonalBoundaryData::new(
            n,
            {
                let mut e = vec![0.0; n];
                e[n - 1] = 1.0;
                e
            },
            Arc::new(f64::cos),
        )
        .unwrap();
        for r in [0.1, 0.5, 0.95] {
            let h = zonal_extension_at(KernelKind::Harmonic, &data, r, &cfg).unwrap();
            assert!((h - r).abs() < 1e-11, "n={n} r={r}: {h}");
        }
    }
}
