//! Closed-form dressed states of the coupling-free part of the sector
//! Hamiltonian (optomechanical term dropped) and the two-level hybridization
//! that explains the split Rabi line in shallow traps.
//!
//! Energies are sector-relative like everywhere else in the crate.

use serde::{Deserialize, Serialize};

use crate::model::DimensionlessModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

/// `|ψ±^{(m,n)}⟩`, a superposition of `|m, n, e⟩` and `|m+1, n, g⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedLevel {
    pub m: usize,
    pub n: usize,
    pub branch: Branch,
    /// Relative to `(m+1)ω_a`.
    pub energy: f64,
    pub theta: f64,
    /// Amplitude on `|m, n, e⟩`.
    pub amp_e: f64,
    /// Amplitude on `|m+1, n, g⟩`.
    pub amp_g: f64,
}

/// Mixing angle, `tan θ = 2√(m+1) g / (Ω − ω_a − (2m+1)χ)`, in `(0, π)`.
pub fn mixing_angle(m: usize, model: &DimensionlessModel) -> f64 {
    let mf = m as f64;
    let c = 2.0 * (mf + 1.0).sqrt() * model.coupling;
    (c).atan2(model.detuning() - (2.0 * mf + 1.0) * model.chi)
}

pub fn dressed_energy(m: usize, n: usize, branch: Branch, model: &DimensionlessModel) -> f64 {
    let mf = m as f64;
    let centre = (mf * mf + mf + 0.5) * model.chi + 0.5 * model.detuning() + n as f64 * model.omega;
    let half = (mf + 0.5) * model.chi - 0.5 * model.detuning();
    let r = (half * half + (mf + 1.0) * model.coupling * model.coupling).sqrt();
    centre + branch.sign() * r
}

pub fn dressed_level(m: usize, n: usize, branch: Branch, model: &DimensionlessModel) -> DressedLevel {
    let theta = mixing_angle(m, model);
    let (s, c) = (0.5 * theta).sin_cos();
    let (amp_e, amp_g) = match branch {
        Branch::Plus => (c, s),
        Branch::Minus => (-s, c),
    };
    DressedLevel {
        m,
        n,
        branch,
        energy: dressed_energy(m, n, branch, model),
        theta,
        amp_e,
        amp_g,
    }
}

/// Intra-doublet splitting `2√(((m+½)χ)² + (m+1)g²)`, detuning-free form.
pub fn rabi_splitting(m: usize, model: &DimensionlessModel) -> f64 {
    let mf = m as f64;
    2.0 * (((mf + 0.5) * model.chi).powi(2) + (mf + 1.0) * model.coupling * model.coupling).sqrt()
}

/// `|⟨ψ₊^{(m,0)}| η a†a (b − b†) |ψ₋^{(m,1)}⟩|`, dressed states taken with
/// the Kerr term dropped.
///
/// With `a†a` equal to `m` on the e-component and `m+1` on the g-component
/// and `⟨0|(b − b†)|1⟩ = 1`, this is `η sin(θ/2) cos(θ/2) = (η/2) sin θ`.
pub fn transition_intensity(m: usize, model: &DimensionlessModel) -> f64 {
    let mf = m as f64;
    let kerr_free = model.with_chi(0.0);
    let plus = dressed_level(m, 0, Branch::Plus, &kerr_free);
    let minus = dressed_level(m, 1, Branch::Minus, &kerr_free);
    (model.eta * (mf * plus.amp_e * minus.amp_e + (mf + 1.0) * plus.amp_g * minus.amp_g)).abs()
}

/// Hybridization of `|ψ₊^{(m,0)}⟩` with `|ψ₋^{(m,1)}⟩` on resonance, Kerr
/// term neglected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPeakPrediction {
    pub m: usize,
    pub mu: f64,
    /// Hybrid energies, relative to `(m+1)ω_a`.
    pub e_plus: f64,
    pub e_minus: f64,
    /// Transition frequencies from `|ψ₋^{(m,0)}⟩`.
    pub omega_plus: f64,
    pub omega_minus: f64,
}

impl TwoPeakPrediction {
    pub fn separation(&self) -> f64 {
        self.omega_plus - self.omega_minus
    }

    pub fn centre(&self) -> f64 {
        0.5 * (self.omega_plus + self.omega_minus)
    }
}

pub fn two_peak_frequencies(m: usize, model: &DimensionlessModel) -> TwoPeakPrediction {
    two_peak_with_mu(m, model, transition_intensity(m, model))
}

/// Same as [`two_peak_frequencies`] with an explicit `μ`.
pub fn two_peak_with_mu(m: usize, model: &DimensionlessModel, mu: f64) -> TwoPeakPrediction {
    let rabi = (m as f64 + 1.0).sqrt() * model.coupling;
    let half_w = 0.5 * model.omega;
    let r = ((rabi - half_w).powi(2) + mu * mu).sqrt();
    TwoPeakPrediction {
        m,
        mu,
        e_plus: half_w + r,
        e_minus: half_w - r,
        omega_plus: rabi + half_w + r,
        omega_minus: rabi + half_w - r,
    }
}

/// Everything closed-form for one sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub m: usize,
    pub omega: f64,
    pub chi: f64,
    pub eta: f64,
    pub theta: f64,
    pub levels: Vec<DressedLevel>,
    pub rabi_splitting: f64,
    pub two_peak: TwoPeakPrediction,
}

pub fn report(m: usize, model: &DimensionlessModel, sidebands: usize) -> AnalyticReport {
    let levels = (0..sidebands)
        .flat_map(|n| [Branch::Minus, Branch::Plus].map(|b| dressed_level(m, n, b, model)))
        .collect();
    AnalyticReport {
        m,
        omega: model.omega,
        chi: model.chi,
        eta: model.eta,
        theta: mixing_angle(m, model),
        levels,
        rabi_splitting: rabi_splitting(m, model),
        two_peak: two_peak_frequencies(m, model),
    }
}
