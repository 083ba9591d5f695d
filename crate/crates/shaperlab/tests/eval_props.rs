use std::sync::Arc;

use shaperlab::dataset::{Dataset, Excitation};
use shaperlab::eval::{run_comparison, ComparisonConfig, IdentifierChoice, Pipeline};
use shaperlab::protocol::ProtocolParams;
use shaperlab::synth::generate_synthetic;
use shaperlab_core::ident::{Identification, Identifier, Observation};
use shaperlab_core::{CommandSignal, Error, SecondOrderParams, ShaperKind};

fn plant() -> SecondOrderParams {
    SecondOrderParams::new(8.0, 0.05).unwrap()
}

fn record(seed: u64) -> Dataset {
    let mut ds = generate_synthetic(
        &plant(),
        Excitation::Step { level: 1.0 },
        6.0,
        100.0,
        0.01,
        seed,
    )
    .unwrap();
    ds.meta.label = Some(format!("S{seed}"));
    ds
}

fn fixed(name: &str, p: SecondOrderParams, k: Option<ShaperKind>) -> Pipeline {
    Pipeline::new(name, IdentifierChoice::Fixed(p), k)
}

fn cfg(seed: u64, jobs: usize) -> ComparisonConfig {
    ComparisonConfig {
        protocol: ProtocolParams::default(),
        seed,
        jobs,
        ..ComparisonConfig::default()
    }
}

#[test]
fn exact_design_beats_mistuned_in_every_trial() {
    let mistuned = SecondOrderParams::new(0.8 * 8.0, 0.05).unwrap();
    let methods = [
        fixed("exact", plant(), Some(ShaperKind::Zvd)),
        fixed("mistuned", mistuned, Some(ShaperKind::Zvd)),
        fixed("unshaped", plant(), None),
    ];
    let out = run_comparison(&methods, &[record(1)], &cfg(3, 2)).unwrap();
    let r = &out.report;
    let exact = r.result("exact", "S1").unwrap();
    let bad = r.result("mistuned", "S1").unwrap();
    let raw = r.result("unshaped", "S1").unwrap();
    assert_eq!(exact.trials.len(), 10);
    for (e, b) in exact.trials.iter().zip(&bad.trials) {
        let (e, b) = (e.metrics.unwrap(), b.metrics.unwrap());
        assert!(e.max_err < b.max_err && e.rmse < b.rmse && e.mean_err < b.mean_err);
    }
    let (shaped, raw) = (exact.aggregate.unwrap(), raw.aggregate.unwrap());
    assert!(raw.max_err.mean > 10.0 * shaped.max_err.mean);
    assert!(raw.rmse.mean > 10.0 * shaped.rmse.mean);
    assert!(raw.mean_err.mean > 10.0 * shaped.mean_err.mean);
    let w = &r.wilcoxon[0];
    assert_eq!((w.r_plus, w.pairs), (Some(55.0), 10));
}

#[test]
fn self_comparison_surfaces_zero_difference_error() {
    let methods = [fixed("only", plant(), Some(ShaperKind::Zv))];
    let out = run_comparison(&methods, &[record(2)], &cfg(1, 1)).unwrap();
    let w = &out.report.wilcoxon[0];
    assert!(w.error.as_deref().unwrap().contains("zero"), "{w:?}");
    assert!(w.r_plus.is_none());
}

/// Diverges whenever the first training observation falls on an odd sample.
struct Flaky;

impl Identifier for Flaky {
    fn identify(
        &self,
        obs: &[Observation],
        _: &CommandSignal,
    ) -> shaperlab_core::Result<Identification> {
        if (obs[0].t * 100.0).round() as i64 % 2 == 1 {
            return Err(Error::Diverged("flaky"));
        }
        Ok(Identification {
            params: SecondOrderParams::new(8.0, 0.05)?,
            convergence: None,
        })
    }
}

#[test]
fn failed_trials_are_recorded_and_reproducible() {
    let methods = [
        Pipeline::new(
            "flaky",
            IdentifierChoice::Custom(Arc::new(Flaky)),
            Some(ShaperKind::Zvd),
        ),
        Pipeline::new(
            "uzs",
            IdentifierChoice::Ukf {
                guess: Some(SecondOrderParams::new(6.0, 0.1).unwrap()),
                config: shaperlab_core::IdentifyConfig::with_sensor_noise(0.01).unwrap(),
            },
            Some(ShaperKind::Zvd),
        ),
    ];
    let data = [record(4), record(5)];
    let a = run_comparison(&methods, &data, &cfg(9, 1)).unwrap();
    let b = run_comparison(&methods, &data, &cfg(9, 4)).unwrap();
    assert_eq!(a.report.to_json().unwrap(), b.report.to_json().unwrap());
    assert_eq!(a.positions, b.positions);
    let flaky = &a.report.results[0];
    assert!(flaky.failed > 0 && flaky.failed < 10, "{}", flaky.failed);
    assert_eq!(flaky.aggregate.unwrap().trials, 10 - flaky.failed);
    assert!(flaky
        .trials
        .iter()
        .filter(|t| !t.ok)
        .all(|t| t.error.is_some() && t.metrics.is_none()));
    assert_eq!(a.report.wilcoxon.len(), 3);
}

#[test]
fn different_seeds_draw_different_splits() {
    let methods = [
        fixed("a", plant(), Some(ShaperKind::Zvd)),
        fixed("b", plant(), None),
    ];
    let a = run_comparison(&methods, &[record(6)], &cfg(1, 1)).unwrap();
    let b = run_comparison(&methods, &[record(6)], &cfg(2, 1)).unwrap();
    assert_ne!(a.report.to_json().unwrap(), b.report.to_json().unwrap());
}

#[test]
fn rejects_empty_inputs() {
    assert!(run_comparison(&[], &[record(1)], &cfg(0, 1)).is_err());
    assert!(run_comparison(&[fixed("a", plant(), None)], &[], &cfg(0, 1)).is_err());
}
