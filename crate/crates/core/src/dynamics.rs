//! Spectral time evolution of `|m+1, 0, g⟩`, the g-branch population and
//! its Fourier spectrum.
//!
//! The state is propagated exactly in the eigenbasis of the sector block:
//! `ψ(t) = Σ_j e^{−iE_j t} ⟨v_j|ψ(0)⟩ v_j`. The observable `P(t)` is the
//! total weight on the `|m+1, n, g⟩` branch, summed over phonons. It starts
//! at one and reduces to `cos²(√(m+1) g t)` for a static emitter. Phonon
//! number projectors commute with the polaron transform and with the phase
//! rotation, so no back-transformation is needed.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::diag::{converged_eigensystem, EigenSystem};
use crate::error::{Error, Result};
use crate::fock::transformed_initial_state;
use crate::model::DimensionlessModel;

/// Eigenstates with `|⟨v_j|ψ(0)⟩|` below this are dropped from the propagator.
pub const PRUNE_AMPLITUDE: f64 = 1e-13;
/// Transitions contributing less than this amplitude to `P(t)` are ignored by
/// the sampling guard.
pub const RELEVANCE_THRESHOLD: f64 = 1e-3;
pub const DEFAULT_TMAX: f64 = 200.0 * PI;
pub const DEFAULT_DT: f64 = PI / 100.0;

/// Uniform sampling `t_i = i·dt`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_max: f64,
    pub dt: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::Domain(format!("time grid needs t_max > 0 and dt > 0 (got {t_max}, {dt})")));
        }
        let count = (t_max / dt + 1e-9).floor() as usize + 1;
        if count < 2 {
            return Err(Error::Domain(format!("dt = {dt} exceeds t_max = {t_max}")));
        }
        Ok(Self { t_max, dt, count })
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.time(i))
    }

    /// Largest transition frequency the grid samples adequately.
    pub fn frequency_limit(&self) -> f64 {
        PI / (10.0 * self.dt)
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self::new(DEFAULT_TMAX, DEFAULT_DT).expect("default grid is valid")
    }
}

/// A frequency present in `P(t)` with its amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub frequency: f64,
    pub amplitude: f64,
}

/// Pruned spectral propagator for one sector.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub m: usize,
    energies: Vec<f64>,
    coeffs: Vec<f64>,
    /// Kept eigenvectors (columns).
    vectors: DMatrix<f64>,
    g_dim: usize,
    /// Weight discarded by pruning.
    pub pruned_weight: f64,
    /// Initial-state weight near the phonon cutoff.
    pub initial_edge_weight: f64,
}

impl Propagator {
    /// Needs a converged eigensystem.
    pub fn new(sys: &EigenSystem) -> Result<Self> {
        match &sys.certificate {
            None => {
                return Err(Error::Dependency(format!(
                    "sector {} eigensystem has no truncation certificate",
                    sys.m
                )))
            }
            Some(c) if !c.is_converged() => {
                return Err(Error::Dependency(format!(
                    "sector {} eigensystem not converged at n_max = {} (max shift {:e})",
                    sys.m,
                    sys.n_max(),
                    c.max_shift_low
                )))
            }
            _ => {}
        }
        let init = transformed_initial_state(sys.m, sys.basis, &sys.model);
        let all = sys.vectors.transpose() * &init.vector;
        let keep: Vec<usize> = (0..all.len()).filter(|&j| all[j].abs() > PRUNE_AMPLITUDE).collect();
        let pruned_weight = (0..all.len())
            .filter(|j| !keep.contains(j))
            .map(|j| all[j] * all[j])
            .sum();
        let ceiling = sys.certificate.as_ref().map_or(f64::INFINITY, |c| c.ceiling);
        let unreliable: f64 = keep
            .iter()
            .filter(|&&j| sys.values[j] > ceiling)
            .map(|&j| all[j] * all[j])
            .sum();
        if unreliable > 1e-12 {
            return Err(Error::Dependency(format!(
                "initial state has weight {unreliable:e} on levels above the reliability ceiling; increase n_max"
            )));
        }
        Ok(Self {
            m: sys.m,
            energies: keep.iter().map(|&j| sys.values[j]).collect(),
            coeffs: keep.iter().map(|&j| all[j]).collect(),
            vectors: sys.vectors.select_columns(&keep),
            g_dim: sys.basis.dim(),
            pruned_weight,
            initial_edge_weight: init.edge_weight,
        })
    }

    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    /// Every frequency in `P(t)` whose amplitude reaches `threshold`,
    /// strongest first.
    pub fn transitions(&self, threshold: f64) -> Vec<Transition> {
        let vg = self.vectors.rows(0, self.g_dim);
        let overlap = vg.transpose() * vg;
        let j = self.levels();
        let mut out = Vec::new();
        for a in 0..j {
            for b in a + 1..j {
                let amp = 2.0 * (self.coeffs[a] * self.coeffs[b] * overlap[(a, b)]).abs();
                if amp >= threshold {
                    out.push(Transition {
                        frequency: (self.energies[b] - self.energies[a]).abs(),
                        amplitude: amp,
                    });
                }
            }
        }
        out.sort_by(|x, y| y.amplitude.total_cmp(&x.amplitude));
        out
    }

    pub fn max_relevant_frequency(&self) -> f64 {
        self.transitions(RELEVANCE_THRESHOLD)
            .iter()
            .map(|t| t.frequency)
            .fold(0.0, f64::max)
    }

    fn weights_at(&self, t: f64) -> DVector<Complex64> {
        DVector::from_iterator(
            self.levels(),
            self.energies
                .iter()
                .zip(&self.coeffs)
                .map(|(&e, &c)| Complex64::from_polar(c, -e * t)),
        )
    }

    /// The full state vector at time `t` (rotated frame).
    pub fn state_at(&self, t: f64) -> DVector<Complex64> {
        let w = self.weights_at(t);
        DVector::from_fn(self.vectors.nrows(), |i, _| {
            (0..self.levels()).map(|j| w[j] * self.vectors[(i, j)]).sum()
        })
    }

    /// `(P(t), ‖ψ(t)‖)`.
    pub fn sample(&self, t: f64) -> (f64, f64) {
        let psi = self.state_at(t);
        let p: f64 = psi.rows(0, self.g_dim).iter().map(|z| z.norm_sqr()).sum();
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        (p, n.sqrt())
    }

    /// Population and norm on a grid, after checking the grid resolves every
    /// relevant transition.
    pub fn evolve(&self, grid: &TimeGrid) -> Result<(Vec<f64>, Vec<f64>)> {
        let omega_max = self.max_relevant_frequency();
        if omega_max > grid.frequency_limit() {
            return Err(Error::NyquistGuard {
                dt: grid.dt,
                omega_max,
                limit: PI / (10.0 * omega_max),
            });
        }
        let (p, n) = grid.times().map(|t| self.sample(t)).unzip();
        Ok((p, n))
    }
}

/// Non-negative half of the discrete Fourier transform of `P(t) − ⟨P⟩`,
/// scaled to approximate `(2π)^{−1/2} ∫ P(t) e^{−iω₀t} dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Subtracted mean of the signal.
    pub mean: f64,
    /// `2π/t_max`.
    pub resolution: f64,
    /// Actual bin spacing `2π/(count·dt)`.
    pub spacing: f64,
    /// Time-domain power `dt·Σ(P − ⟨P⟩)²`.
    pub signal_power: f64,
    count: usize,
}

impl Spectrum {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// `Σ|f(ω_k)|² Δω` over all bins (negative frequencies by symmetry).
    pub fn spectral_power(&self) -> f64 {
        let n = self.count;
        let s: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(k, z)| {
                let mult = if k == 0 || (n % 2 == 0 && k == n / 2) { 1.0 } else { 2.0 };
                mult * z.norm_sqr()
            })
            .sum();
        s * self.spacing
    }

    /// Relative mismatch between spectral and time-domain power.
    pub fn parseval_error(&self) -> f64 {
        if self.signal_power == 0.0 {
            return self.spectral_power();
        }
        (self.spectral_power() - self.signal_power).abs() / self.signal_power
    }
}

pub fn fourier_spectrum(signal: &[f64], grid: &TimeGrid) -> Spectrum {
    let n = signal.len();
    let mean = signal.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = signal.iter().map(|&p| Complex64::new(p - mean, 0.0)).collect();
    let signal_power = grid.dt * buf.iter().map(|z| z.norm_sqr()).sum::<f64>();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = grid.dt / (2.0 * PI).sqrt();
    let spacing = 2.0 * PI / (n as f64 * grid.dt);
    let half = n / 2 + 1;
    Spectrum {
        omega: (0..half).map(|k| k as f64 * spacing).collect(),
        values: buf[..half].iter().map(|z| z * scale).collect(),
        mean,
        resolution: 2.0 * PI / grid.t_max,
        spacing,
        signal_power,
        count: n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub frequency: f64,
    pub height: f64,
    pub interpolated: bool,
}

/// Local maxima of `|f|` above `min_prominence` times the global maximum,
/// refined by a parabola through the three surrounding bins; highest first.
pub fn find_peaks(spectrum: &Spectrum, min_prominence: f64) -> Vec<Peak> {
    let mag = spectrum.magnitudes();
    let top = mag.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Vec::new();
    }
    let mut peaks = Vec::new();
    for k in 1..mag.len().saturating_sub(1) {
        let (a, b, c) = (mag[k - 1], mag[k], mag[k + 1]);
        if b < min_prominence * top || b < a || b <= c {
            continue;
        }
        let denom = a - 2.0 * b + c;
        let peak = if denom < 0.0 {
            let d = 0.5 * (a - c) / denom;
            Peak {
                frequency: spectrum.omega[k] + d * spectrum.spacing,
                height: b - 0.25 * (a - c) * d,
                interpolated: true,
            }
        } else {
            Peak {
                frequency: spectrum.omega[k],
                height: b,
                interpolated: false,
            }
        };
        peaks.push(peak);
    }
    peaks.sort_by(|x, y| y.height.total_cmp(&x.height));
    peaks
}

/// Mean spacing between successive maxima of `P(t)` that rise above one half.
pub fn estimate_period(population: &[f64], grid: &TimeGrid) -> Option<f64> {
    let mut maxima = Vec::new();
    for i in 1..population.len().saturating_sub(1) {
        let (a, b, c) = (population[i - 1], population[i], population[i + 1]);
        if b > 0.5 && b >= a && b > c {
            let denom = a - 2.0 * b + c;
            let d = if denom < 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            maxima.push(grid.time(i) + d * grid.dt);
        }
    }
    // t = 0 is a maximum too (P(0) = 1)
    if population.first().is_some_and(|&p| p > 0.5) {
        maxima.insert(0, 0.0);
    }
    if maxima.len() < 2 {
        return None;
    }
    Some((maxima[maxima.len() - 1] - maxima[0]) / (maxima.len() - 1) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsResult {
    pub m: usize,
    pub grid: TimeGrid,
    pub n_max: usize,
    pub population: Vec<f64>,
    pub norm: Vec<f64>,
    pub spectrum: Spectrum,
    pub peaks: Vec<Peak>,
}

impl DynamicsResult {
    pub fn max_norm_error(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn period(&self) -> Option<f64> {
        estimate_period(&self.population, &self.grid)
    }
}

/// Default relative threshold for reported peaks.
pub const DEFAULT_PROMINENCE: f64 = 0.01;

/// Propagates from an existing eigensystem.
pub fn evolve(sys: &EigenSystem, grid: &TimeGrid, min_prominence: f64) -> Result<DynamicsResult> {
    let prop = Propagator::new(sys)?;
    let (population, norm) = prop.evolve(grid)?;
    let spectrum = fourier_spectrum(&population, grid);
    let peaks = find_peaks(&spectrum, min_prominence);
    Ok(DynamicsResult {
        m: sys.m,
        grid: *grid,
        n_max: sys.n_max(),
        population,
        norm,
        spectrum,
        peaks,
    })
}

/// Diagonalizes sector `m` (doubling the cutoff up to three times until the
/// low levels converge) and propagates.
pub fn run(m: usize, model: &DimensionlessModel, n_max: usize, grid: &TimeGrid) -> Result<DynamicsResult> {
    let sys = converged_eigensystem(m, model, n_max, 3)?;
    evolve(&sys, grid, DEFAULT_PROMINENCE)
}
