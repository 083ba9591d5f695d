use proptest::prelude::*;
use shaperlab_core::{
    design_shaper, shape_command, simulate_response, Error, SecondOrderParams, ShaperKind,
    TimeSeries,
};

fn step_response(w: f64, z: f64, t: f64) -> f64 {
    let wd = w * (1.0 - z * z).sqrt();
    1.0 - (-z * w * t).exp() * ((wd * t).cos() + z / (1.0 - z * z).sqrt() * (wd * t).sin())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_matches_closed_form(w in 1.0f64..40.0, z in 0.0f64..0.9) {
        let p = SecondOrderParams::new(w, z).unwrap();
        let dt = 0.01;
        let u = TimeSeries::constant(0.0, dt, 1.0, 400).unwrap();
        let y = simulate_response(&p, &u, 0.0, 0.0).unwrap();
        for (k, (t, x)) in y.iter().enumerate() {
            prop_assert!((x - step_response(w, z, t)).abs() < 1e-4, "k={k} {x}");
        }
    }

    #[test]
    fn response_is_linear_in_input(
        w in 1.0f64..30.0,
        z in 0.0f64..0.6,
        u1 in prop::collection::vec(-2.0f64..2.0, 50),
        u2 in prop::collection::vec(-2.0f64..2.0, 50),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let p = SecondOrderParams::new(w, z).unwrap();
        let s = |v: Vec<f64>| TimeSeries::new(0.0, 0.01, v).unwrap();
        let mix: Vec<f64> = u1.iter().zip(&u2).map(|(x, y)| a * x + b * y).collect();
        let y1 = simulate_response(&p, &s(u1.clone()), 0.0, 0.0).unwrap();
        let y2 = simulate_response(&p, &s(u2.clone()), 0.0, 0.0).unwrap();
        let ym = simulate_response(&p, &s(mix), 0.0, 0.0).unwrap();
        for i in 0..ym.len() {
            let expect = a * y1.samples()[i] + b * y2.samples()[i];
            prop_assert!((ym.samples()[i] - expect).abs() < 1e-9 * (1.0 + expect.abs()));
        }
        let train = design_shaper(ShaperKind::Zvd, &p).into_train();
        let cm = shape_command(&s(u1.iter().zip(&u2).map(|(x, y)| a * x + b * y).collect()), &train);
        let c1 = shape_command(&s(u1), &train);
        let c2 = shape_command(&s(u2), &train);
        prop_assert_eq!(cm.len(), c1.len());
        for i in 0..cm.len() {
            let expect = a * c1.samples()[i] + b * c2.samples()[i];
            prop_assert!((cm.samples()[i] - expect).abs() < 1e-12 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn halving_the_sample_step_converges(w in 2.0f64..20.0, z in 0.0f64..0.5) {
        // Unit impulse approximated by a one-sample pulse of area 1.
        let p = SecondOrderParams::new(w, z).unwrap();
        let wd = w * (1.0 - z * z).sqrt();
        let exact = |t: f64| w * w / wd * (-z * w * t).exp() * (wd * t).sin();
        let err = |dt: f64| {
            let n = (2.0 / dt).round() as usize;
            let mut u = vec![0.0; n];
            u[0] = 1.0 / dt;
            let y = simulate_response(&p, &TimeSeries::new(0.0, dt, u).unwrap(), 0.0, 0.0).unwrap();
            y.iter().skip(1).map(|(t, x)| (x - exact(t - 0.5 * dt)).abs()).fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(0.004), err(0.002));
        prop_assert!(fine <= 0.5 * coarse, "{coarse} -> {fine}");
    }
}

#[test]
fn coarse_sampling_is_rejected() {
    let p = SecondOrderParams::new(100.0, 0.1).unwrap();
    let u = TimeSeries::constant(0.0, 0.01, 1.0, 10).unwrap();
    assert!(matches!(
        simulate_response(&p, &u, 0.0, 0.0),
        Err(Error::StepTooCoarse { .. })
    ));
}

#[test]
fn shaped_step_suppresses_residual_oscillation() {
    let p = SecondOrderParams::new(8.0, 0.05).unwrap();
    let dt = 1.0 / 200.0;
    let step = TimeSeries::constant(0.0, dt, 1.0, 2000).unwrap();
    let shaped = shape_command(&step, design_shaper(ShaperKind::Zvd, &p).train());
    let settle = shaped.len() - step.len();
    let tail = |s: &TimeSeries| {
        let y = simulate_response(&p, s, 0.0, 0.0).unwrap();
        y.samples()[settle..settle + 1000]
            .iter()
            .map(|x| (x - 1.0).abs())
            .fold(0.0, f64::max)
    };
    let (unshaped, zvd) = (tail(&step), tail(&shaped));
    assert!(zvd <= 0.01 * unshaped, "{zvd} vs {unshaped}");
}
