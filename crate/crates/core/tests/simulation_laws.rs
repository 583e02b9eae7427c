use lipminor::levy::{simulate_path, simulate_side, JumpLaw, LevyModel, Side, SimConfig};
use lipminor::numeric::special::exp_cdf;
use lipminor::numeric::stats::{ks_statistic, Moments};

/// Expected gap between the continuous and the grid infimum of Brownian motion, per `σ√Δt`.
const GRID_OVERSHOOT: f64 = 0.5826;

fn increments(model: &LevyModel, windows: &[(f64, f64)], n: u64) -> Vec<Moments> {
    let mut acc = vec![Moments::default(); windows.len()];
    for i in 0..n {
        let path = simulate_path(model, &SimConfig::new(10.0, 0.01, 5, i)).unwrap();
        let at = |t: f64| path.values()[path.cell_index(t).unwrap()];
        for (m, &(a, b)) in acc.iter_mut().zip(windows) {
            m.push(at(b) - at(a));
        }
    }
    acc
}

#[test]
fn increments_are_stationary_across_disjoint_windows() {
    let windows = [(-8.0, -6.0), (-2.0, 0.0), (0.0, 2.0), (6.0, 8.0)];
    let models = [
        (LevyModel::brownian(2.0, 0.3), 0.3, 2.0),
        (
            LevyModel::compound_poisson(0.0, 0.2, 1.5, JumpLaw::TwoPoint { up: 1.0, down: -0.5, p_up: 0.4 }),
            0.2 + 1.5 * (0.4 - 0.3),
            1.5 * (0.4 + 0.6 * 0.25),
        ),
    ];
    for (model, mean_rate, var_rate) in models {
        for (m, &(a, b)) in increments(&model, &windows, 3000).iter().zip(&windows) {
            let len = b - a;
            let se = (var_rate * len / m.n as f64).sqrt();
            assert!((m.mean - mean_rate * len).abs() <= 4.0 * se, "[{a}, {b}]: mean {} vs {}", m.mean, mean_rate * len);
            let var_se = var_rate * len * (2.0 / m.n as f64).sqrt() * 2.0;
            assert!((m.variance() - var_rate * len).abs() <= 4.0 * var_se, "[{a}, {b}]: variance {}", m.variance());
        }
    }
}

#[test]
fn positive_side_infimum_is_exponential() {
    let (alpha, beta) = (0.15, 0.1);
    let rate = 2.0 * (alpha + beta);
    let (window, dt) = (40.0 / (alpha + beta), 2.5e-3);
    let model = LevyModel::brownian(1.0, beta);
    let mut samples = Vec::new();
    let mut replicate = 0;
    while samples.len() < 6000 {
        let path = simulate_side(&model, &SimConfig::new(window, dt, 17, replicate), Side::Positive).unwrap();
        replicate += 1;
        let (best, at) = path
            .values()
            .iter()
            .zip(path.times())
            .map(|(x, t)| (x + alpha * t, *t))
            .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
        if at <= 0.9 * window {
            samples.push(-best + GRID_OVERSHOOT * dt.sqrt());
        }
    }
    assert!(replicate < 6100, "{replicate} attempts");
    let ks = ks_statistic(&samples, |x| exp_cdf(x, rate));
    assert!(ks <= 0.025, "KS = {ks}");
}
