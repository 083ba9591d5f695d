use rand_distr::{Distribution, Normal};

use shaperlab_core::{simulate_response, SecondOrderParams};

use crate::dataset::{Dataset, DatasetMeta, Excitation};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Highest supported sample rate, Hz.
pub const MAX_RATE_HZ: f64 = 1000.0;

/// Simulated record of the plant starting at rest from zero, with i.i.d.
/// Gaussian sensor noise of standard deviation `noise_sigma` mm.
///
/// The record holds `round(duration * sample_rate)` samples.
pub fn generate_synthetic(
    p: &SecondOrderParams,
    excitation: Excitation,
    duration: f64,
    sample_rate: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<Dataset> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "duration must be positive, got {duration}"
        )));
    }
    if !(sample_rate > 0.0 && sample_rate <= MAX_RATE_HZ) {
        return Err(Error::InvalidArgument(format!(
            "sample rate must lie in (0, {MAX_RATE_HZ}] Hz, got {sample_rate}"
        )));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise sigma must be >= 0, got {noise_sigma}"
        )));
    }
    let n = ((duration * sample_rate).round() as usize).max(2);
    let dt = 1.0 / sample_rate;
    let command = excitation.sample(0.0, dt, n)?;
    let clean = simulate_response(p, &command, 0.0, 0.0)?;
    let series = if noise_sigma > 0.0 {
        let normal = Normal::new(0.0, noise_sigma).expect("sigma checked above");
        let mut rng = rng_from_seed(seed);
        let noisy = clean
            .samples()
            .iter()
            .map(|x| x + normal.sample(&mut rng))
            .collect();
        shaperlab_core::TimeSeries::new(clean.t0(), dt, noisy)?
    } else {
        clean
    };
    Ok(Dataset {
        series,
        meta: DatasetMeta {
            label: Some("synthetic".into()),
            excitation: Some(excitation),
            ..DatasetMeta::default()
        },
        ground_truth: Some(*p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use shaperlab_core::TimeSeries;

    fn plant() -> SecondOrderParams {
        SecondOrderParams::new(8.0, 0.05).unwrap()
    }

    #[test]
    fn noiseless_equals_simulation() {
        let ds = generate_synthetic(
            &plant(),
            Excitation::Step { level: 1.0 },
            4.0,
            100.0,
            0.0,
            1,
        )
        .unwrap();
        let u = TimeSeries::constant(0.0, 0.01, 1.0, 400).unwrap();
        let y = simulate_response(&plant(), &u, 0.0, 0.0).unwrap();
        assert_eq!(ds.series.samples(), y.samples());
        assert_eq!(ds.ground_truth, Some(plant()));
    }

    #[test]
    fn seeded_noise_repeats() {
        let a = generate_synthetic(
            &plant(),
            Excitation::Step { level: 1.0 },
            2.0,
            200.0,
            0.3,
            9,
        )
        .unwrap();
        let b = generate_synthetic(
            &plant(),
            Excitation::Step { level: 1.0 },
            2.0,
            200.0,
            0.3,
            9,
        )
        .unwrap();
        let c = generate_synthetic(
            &plant(),
            Excitation::Step { level: 1.0 },
            2.0,
            200.0,
            0.3,
            10,
        )
        .unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn noise_level() {
        let step = Excitation::Step { level: 1.0 };
        let noisy = generate_synthetic(&plant(), step, 10.0, 1000.0, 0.5, 3).unwrap();
        let clean = generate_synthetic(&plant(), step, 10.0, 1000.0, 0.0, 3).unwrap();
        assert_eq!(noisy.series.len(), 10_000);
        let d: Vec<f64> = noisy
            .series
            .samples()
            .iter()
            .zip(clean.series.samples())
            .map(|(a, b)| a - b)
            .collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (d.len() - 1) as f64;
        assert!((var.sqrt() / 0.5 - 1.0).abs() < 0.1, "std {}", var.sqrt());
    }

    #[test]
    fn rejects_bad_arguments() {
        let step = Excitation::Step { level: 1.0 };
        assert!(generate_synthetic(&plant(), step, 0.0, 100.0, 0.0, 0).is_err());
        assert!(generate_synthetic(&plant(), step, 1.0, 1500.0, 0.0, 0).is_err());
        assert!(generate_synthetic(&plant(), step, 1.0, 0.0, 0.0, 0).is_err());
        assert!(generate_synthetic(&plant(), step, 1.0, 100.0, -1.0, 0).is_err());
    }
}
