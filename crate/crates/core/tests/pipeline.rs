use noisemoments::inference::autocor_estimate;
use noisemoments::simulator::simulate_path;
use noisemoments::ticks::{read_ticks, write_ticks};
use noisemoments::{NoiseEstimator, NoiseRegime, SimulationConfig, TuningWindows};

fn round_trip(cfg: &SimulationConfig) {
    let path = simulate_path(cfg).unwrap();
    let mut buf = Vec::new();
    write_ticks(&path.series, &mut buf).unwrap();
    let back = read_ticks(buf.as_slice(), false).unwrap();
    assert_eq!(back.duplicates, 0);
    assert_eq!(back.series.times(), path.series.times());
    assert_eq!(back.series.values(), path.series.values());

    let mut series = back.series;
    if cfg.regime == NoiseRegime::Scaled {
        let delta = series.detect_grid().expect("grid survives the round trip");
        series = series.with_delta_n(delta).unwrap();
    }
    let w = TuningWindows::default();
    let a = NoiseEstimator::new(&path.series, w);
    let b = NoiseEstimator::new(&series, w);
    assert_eq!(a.n_index(), b.n_index());
    for lag in 0..5 {
        let ea = autocor_estimate(&a, lag, cfg.regime, 0.0, 0.95).unwrap();
        let eb = autocor_estimate(&b, lag, cfg.regime, 0.0, 0.95).unwrap();
        assert_eq!(ea, eb);
    }
}

#[test]
fn irregular_export_reingests_exactly() {
    round_trip(&SimulationConfig::reference_irregular(8_000, 1).rescaled_to(8_000));
}

#[test]
fn grid_export_reingests_exactly() {
    round_trip(&SimulationConfig::reference_regular(8_000, 2).rescaled_to(8_000));
}
