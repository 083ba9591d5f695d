//! On linear-Gaussian models the unscented filter must reproduce the Kalman filter.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use shaperlab_core::ukf::{generate_sigma_points, ukf_predict, ukf_update};
use shaperlab_core::{UkfConfig, UkfState};

struct Kalman {
    x: DVector<f64>,
    p: DMatrix<f64>,
}

impl Kalman {
    fn step(
        &mut self,
        f: &DMatrix<f64>,
        h: &DMatrix<f64>,
        q: &DMatrix<f64>,
        r: &DMatrix<f64>,
        z: &DVector<f64>,
    ) {
        let x = f * &self.x;
        let p = f * &self.p * f.transpose() + q;
        let s = h * &p * h.transpose() + r;
        let k = &p * h.transpose() * s.clone().try_inverse().unwrap();
        self.x = &x + &k * (z - h * &x);
        self.p = &p - &k * s * k.transpose();
    }
}

fn matrix(n: usize, m: usize, vals: &[f64]) -> DMatrix<f64> {
    DMatrix::from_iterator(n, m, vals.iter().copied().cycle().take(n * m))
}

fn spd(n: usize, vals: &[f64], floor: f64) -> DMatrix<f64> {
    let a = matrix(n, n, vals);
    &a * a.transpose() * 0.1 + DMatrix::identity(n, n) * floor
}

fn system() -> impl Strategy<Value = (usize, usize, Vec<f64>, u64)> {
    (1usize..=4).prop_flat_map(|n| {
        (
            Just(n),
            1usize..=n,
            prop::collection::vec(-1.0f64..1.0, 64),
            any::<u64>(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hundred_cycles_match_kalman((n, m, vals, seed) in system()) {
        let mut f = matrix(n, n, &vals[0..16]);
        let norm = f.norm();
        if norm > 0.0 {
            f *= 0.95 / norm;
        }
        f += DMatrix::identity(n, n) * 0.02;
        let h = matrix(m, n, &vals[16..32]) + DMatrix::identity(m, n);
        let q = spd(n, &vals[32..48], 1e-3);
        let r = spd(m, &vals[48..64], 1e-2);
        let cfg = UkfConfig::new(q.clone(), r.clone()).unwrap().with_spread(0.5, 2.0, 0.0).unwrap();

        let mut kf = Kalman { x: DVector::from_element(n, 0.3), p: DMatrix::identity(n, n) };
        let mut ukf = UkfState::new(kf.x.clone(), kf.p.clone()).unwrap();
        let mut truth = DVector::from_element(n, 1.0);
        let mut lcg = seed | 1;
        let mut noise = || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((lcg >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 0.2
        };
        for _ in 0..100 {
            truth = &f * truth + DVector::from_fn(n, |_, _| noise());
            let z = &h * &truth + DVector::from_fn(m, |_, _| noise());
            kf.step(&f, &h, &q, &r, &z);
            let (pred, sigma) = ukf_predict(&ukf, |x| &f * x, &cfg).unwrap();
            ukf = ukf_update(&pred, &sigma, |x| &h * x, &z, &cfg).unwrap().state;
            for (a, b) in ukf.mean.iter().zip(kf.x.iter()) {
                prop_assert!((a - b).abs() <= 1e-8, "mean {a} vs {b}");
            }
            for (a, b) in ukf.covariance.iter().zip(kf.p.iter()) {
                prop_assert!((a - b).abs() <= 1e-8, "cov {a} vs {b}");
            }
        }
    }

    #[test]
    fn sigma_points_reconstruct_moments(
        n in 1usize..=6,
        vals in prop::collection::vec(-1.0f64..1.0, 42),
        alpha in 0.05f64..1.0,
        kappa in 0.0f64..3.0,
    ) {
        let mean = DVector::from_iterator(n, vals[..n].iter().copied());
        let cov = spd(n, &vals[6..], 0.05);
        let cfg = UkfConfig::new(DMatrix::zeros(n, n), DMatrix::identity(1, 1))
            .unwrap()
            .with_spread(alpha, 2.0, kappa)
            .unwrap();
        let set = generate_sigma_points(&UkfState::new(mean.clone(), cov.clone()).unwrap(), &cfg).unwrap();
        prop_assert_eq!(set.points.len(), 2 * n + 1);
        let wsum: f64 = set.mean_weights.iter().sum();
        prop_assert!((wsum - 1.0).abs() < 1e-12);
        let m = set.weighted_mean();
        let mut c = DMatrix::zeros(n, n);
        for (p, w) in set.points.iter().zip(&set.cov_weights) {
            let d = p - &m;
            c += &d * d.transpose() * *w;
        }
        let scale = 1.0 / (alpha * alpha);
        for (a, b) in m.iter().zip(mean.iter()) {
            prop_assert!((a - b).abs() <= 1e-9 * scale);
        }
        // Identity reconstruction: the centre weight's beta term adds nothing
        // because the centre point is the mean.
        for (a, b) in c.iter().zip(cov.iter()) {
            prop_assert!((a - b).abs() <= 1e-9 * scale, "{a} vs {b}");
        }
    }
}
