use proptest::prelude::*;
use shaperlab_core::dynamics::{
    insensitivity_bandwidth, residual_vibration_ratio, vibration_terms,
};
use shaperlab_core::shaper::k_factor;
use shaperlab_core::{design_shaper, ImpulseTrain, SecondOrderParams, ShaperKind};

fn kind() -> impl Strategy<Value = ShaperKind> {
    prop::sample::select(ShaperKind::ALL.to_vec())
}

fn params() -> impl Strategy<Value = SecondOrderParams> {
    (0.5f64..60.0, 0.0f64..0.5).prop_map(|(w, z)| SecondOrderParams::new(w, z).unwrap())
}

/// Residual amplitude ratio measured from the superposed free responses:
/// strip the decay envelope after the last impulse and take the peak of
/// what is left, relative to a single unit impulse at the same instant.
fn sampled_ratio(p: &SecondOrderParams, train: &ImpulseTrain) -> f64 {
    let (w, z) = (p.omega_n(), p.zeta());
    let wd = w * (1.0 - z * z).sqrt();
    let tn = train.duration();
    let period = 2.0 * std::f64::consts::PI / wd;
    let mut peak: f64 = 0.0;
    let n = 20_000;
    for k in 0..n {
        let t = tn + period * k as f64 / n as f64;
        let y: f64 = train
            .impulses()
            .iter()
            .map(|i| i.amplitude * (-z * w * (t - i.time)).exp() * (wd * (t - i.time)).sin())
            .sum();
        peak = peak.max((y * (z * w * (t - tn)).exp()).abs());
    }
    peak
}

proptest! {
    #[test]
    fn trains_are_normalized_and_ordered(k in kind(), p in params()) {
        let d = design_shaper(k, &p);
        let t = d.train();
        prop_assert_eq!(t.len(), k.impulse_count());
        prop_assert!((t.amplitudes().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert_eq!(t.impulses()[0].time, 0.0);
        prop_assert!(t.impulses().windows(2).all(|w| w[1].time > w[0].time));
        prop_assert!(t.amplitudes().all(|a| a > 0.0));
        let half = std::f64::consts::PI / p.omega_d();
        for (i, imp) in t.impulses().iter().enumerate() {
            prop_assert!((imp.time - i as f64 * half).abs() <= 1e-12 * half.max(1.0) * (i as f64 + 1.0));
        }
        prop_assert!((d.k_factor - k_factor(p.zeta())).abs() == 0.0);
    }

    #[test]
    fn zvd_third_impulse_at_twice_the_second(p in params()) {
        let d = design_shaper(ShaperKind::Zvd, &p);
        let t = d.train().impulses();
        prop_assert!((t[2].time - 2.0 * t[1].time).abs() <= 1e-12 * t[2].time);
    }

    #[test]
    fn designed_trains_null_residual_vibration(k in kind(), p in params()) {
        let v = residual_vibration_ratio(&p, design_shaper(k, &p).train());
        prop_assert!(v <= 1e-10, "V = {v}");
    }

    #[test]
    fn residual_ratio_matches_superposition_oracle(
        k in kind(),
        p in params(),
        ratio in 0.3f64..2.0,
    ) {
        let train = design_shaper(k, &p).into_train();
        let actual = p.scaled_frequency(ratio).unwrap();
        let v = residual_vibration_ratio(&actual, &train);
        let oracle = sampled_ratio(&actual, &train);
        prop_assert!((v - oracle).abs() <= 1e-6 * (1.0 + oracle), "{v} vs {oracle}");
        let terms = vibration_terms(&actual, &train);
        prop_assert!((terms.magnitude() * (-actual.zeta() * actual.omega_n() * train.duration()).exp() - v).abs() <= 1e-12);
    }

    #[test]
    fn derivative_shapers_are_flat_at_nominal(
        k in prop::sample::select(vec![ShaperKind::Zvd, ShaperKind::Zvdd]),
        p in params(),
    ) {
        let train = design_shaper(k, &p).into_train();
        let h = 1e-5 * p.omega_n();
        let v = |w: f64| residual_vibration_ratio(&SecondOrderParams::new(w, p.zeta()).unwrap(), &train);
        let d = (v(p.omega_n() + h) - v(p.omega_n() - h)) / (2.0 * h);
        prop_assert!(d.abs() <= 1e-6, "dV/dw = {d}");
    }

    #[test]
    fn more_robust_shapers_have_wider_bandwidth(w in 1.0f64..40.0, z in 0.0f64..0.3) {
        let p = SecondOrderParams::new(w, z).unwrap();
        let bw = |k| insensitivity_bandwidth(design_shaper(k, &p).train(), &p, 0.05);
        let (zv, zvd, zvdd) = (bw(ShaperKind::Zv), bw(ShaperKind::Zvd), bw(ShaperKind::Zvdd));
        prop_assert!(zv > 0.0 && zv < zvd && zvd < zvdd, "{zv} {zvd} {zvdd}");
    }

    #[test]
    fn identity_train_leaves_full_vibration(p in params()) {
        let v = residual_vibration_ratio(&p, &ImpulseTrain::identity());
        prop_assert!((v - 1.0).abs() <= 1e-15);
    }
}

#[test]
fn undamped_bandwidths_match_closed_form() {
    // ZV with zeta = 0: V(r) = |cos(pi r / 2)|, so V = 0.05 at r = 1 +- (1 - 2 acos(0.05)/pi).
    let p = SecondOrderParams::new(5.0, 0.0).unwrap();
    let zv = insensitivity_bandwidth(design_shaper(ShaperKind::Zv, &p).train(), &p, 0.05);
    let edge = 2.0 * 0.05f64.acos() / std::f64::consts::PI;
    assert!((zv - 2.0 * (1.0 - edge)).abs() < 1e-9, "{zv}");
    // ZVD with zeta = 0: V(r) = cos^2(pi r / 2).
    let zvd = insensitivity_bandwidth(design_shaper(ShaperKind::Zvd, &p).train(), &p, 0.05);
    let edge = 2.0 * 0.05f64.sqrt().acos() / std::f64::consts::PI;
    assert!((zvd - 2.0 * (1.0 - edge)).abs() < 1e-9, "{zvd}");
}
