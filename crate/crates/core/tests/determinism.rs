use noisemoments::montecarlo::{run_replications, Statistic};
use noisemoments::simulator::simulate_path;
use noisemoments::{tuple, NoiseEstimator, NoiseRegime, SimulationConfig, TuningWindows};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn estimates_are_identical_across_thread_counts() {
    let cfg = SimulationConfig::reference_irregular(30_000, 5).rescaled_to(30_000);
    let path = simulate_path(&cfg).unwrap();
    let run = || {
        let est = NoiseEstimator::new(&path.series, TuningWindows::default());
        let mut bits = Vec::new();
        for lag in 0..6 {
            bits.push(est.r_hat(lag).unwrap().to_bits());
            bits.push(est.sigma_hat_cov(lag).unwrap().to_bits());
            bits.push(est.s_hat(lag.max(1)).unwrap().to_bits());
        }
        bits.push(est.u(&tuple![0, 1, 3]).unwrap().value.to_bits());
        bits.push(est.u_bar(&tuple![0, 2], &tuple![1]).unwrap().value.to_bits());
        bits
    };
    assert_eq!(in_pool(1, run), in_pool(8, run));
}

#[test]
fn monte_carlo_reports_are_identical_across_thread_counts() {
    let cfg = SimulationConfig::reference_regular(4_000, 17).rescaled_to(4_000);
    assert_eq!(cfg.regime, NoiseRegime::Scaled);
    let stats = [Statistic::Autocov { lag: 0 }, Statistic::Autocor { lag: 2 }];
    let run = || run_replications(&cfg, TuningWindows::default(), &stats, 16).unwrap();
    assert_eq!(in_pool(1, run), in_pool(8, run));
}

#[test]
fn paths_are_reproducible() {
    let cfg = SimulationConfig::reference_irregular(5_000, 3);
    let a = simulate_path(&cfg).unwrap();
    let b = in_pool(4, || simulate_path(&cfg).unwrap());
    assert_eq!(a, b);
}
