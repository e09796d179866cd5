use std::f64::consts::PI;

use vibron_qed::analytic::two_peak_frequencies;
use vibron_qed::diag::eigen_decompose;
use vibron_qed::dynamics::{self, evolve, find_peaks, fourier_spectrum, TimeGrid};
use vibron_qed::fock::{build_block, PhononBasis};
use vibron_qed::model::{DimensionlessModel, ModelParams};

fn reference() -> DimensionlessModel {
    DimensionlessModel::from_si(&ModelParams::reference()).unwrap()
}

#[test]
fn dominant_lines_sit_on_hybridized_transitions() {
    // Away from ω = 2√(m+1)g one line carries almost all the weight; it must
    // still be one of the two predicted transitions.
    for m in 0..2 {
        for k in 0..=6 {
            let omega = 1.5 + 0.25 * k as f64;
            let model = reference().with_trap(omega);
            let res = dynamics::run(m, &model, 60, &TimeGrid::default()).unwrap();
            let pred = two_peak_frequencies(m, &model);
            let top = res.peaks[0].height;
            for p in res.peaks.iter().filter(|p| p.height >= 0.2 * top) {
                let err = ((p.frequency - pred.omega_minus) / pred.omega_minus)
                    .abs()
                    .min(((p.frequency - pred.omega_plus) / pred.omega_plus).abs());
                assert!(err <= 0.05, "m={m} omega={omega}: peak {} vs {pred:?}", p.frequency);
            }
        }
    }
}

#[test]
fn population_is_insensitive_to_cutoff() {
    let grid = TimeGrid::default();
    for omega in [2.0, 10.0] {
        let model = reference().with_trap(omega);
        let run = |n| {
            let sys = eigen_decompose(&build_block(0, &model, PhononBasis::new(n).unwrap())).unwrap();
            evolve(&sys, &grid, 0.01).unwrap().population
        };
        let (a, b) = (run(60), run(120));
        let diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-6, "omega={omega}: {diff}");
    }
}

#[test]
fn population_stays_in_unit_interval() {
    let res = dynamics::run(1, &reference().with_trap(2.0), 60, &TimeGrid::default()).unwrap();
    assert!(res.population.iter().all(|p| (-1e-12..=1.0 + 1e-9).contains(p)));
    assert!(res.max_norm_error() <= 1e-9);
    assert!((res.population[0] - 1.0).abs() < 1e-12);
}

#[test]
fn two_tone_signal_gives_two_peaks() {
    let grid = TimeGrid::default();
    let signal: Vec<f64> = grid
        .times()
        .map(|t| 0.5 + 0.3 * (1.85 * t).cos() + 0.2 * (2.15 * t).cos())
        .collect();
    let spec = fourier_spectrum(&signal, &grid);
    assert!((spec.mean - 0.5).abs() < 1e-3);
    let peaks = find_peaks(&spec, 0.05);
    assert_eq!(peaks.len(), 2);
    assert!((peaks[0].frequency - 1.85).abs() < spec.resolution);
    assert!((peaks[1].frequency - 2.15).abs() < spec.resolution);
    assert!(spec.parseval_error() < 1e-6);
}

#[test]
fn default_grid_resolves_reference_dynamics() {
    let sys = eigen_decompose(&build_block(0, &reference(), PhononBasis::new(60).unwrap())).unwrap();
    let prop = dynamics::Propagator::new(&sys).unwrap();
    assert!(prop.max_relevant_frequency() <= TimeGrid::default().frequency_limit());
    assert!(TimeGrid::default().frequency_limit() - 10.0 < 1e-12);
    let coarse = TimeGrid::new(200.0 * PI, PI / 4.0).unwrap();
    assert!(evolve(&sys, &coarse, 0.01).is_err());
}
