//! Physical parameters, derived recoil constants and the dimensionless frame.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant (CODATA 2018), J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Above this ratio `g / min(ω_a, Ω)` the rotating-wave approximation is
/// questionable; we only warn.
const RWA_WARN_RATIO: f64 = 0.01;

/// SI inputs. All angular frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mass_kg: f64,
    /// Emitter transition frequency Ω.
    pub omega_emitter: f64,
    /// Cavity frequency ω_a.
    pub omega_cavity: f64,
    /// Trap frequency ω.
    pub omega_trap: f64,
    /// Photon wave vector k, 1/m.
    pub wavevector: f64,
    /// Emitter-cavity coupling g.
    pub coupling_g: f64,
    /// Optional wavelength λ, m. When set, `k·λ = 2π` is enforced.
    pub wavelength: Option<f64>,
}

impl ModelParams {
    /// Rydberg-atom reference set: Ω = ω_a = 10⁵ GHz, ω = 1 GHz,
    /// k = 10⁷ m⁻¹, M = 10⁻²⁷ kg, g = 100 MHz.
    pub fn reference() -> Self {
        Self {
            mass_kg: 1e-27,
            omega_emitter: 1e14,
            omega_cavity: 1e14,
            omega_trap: 1e9,
            wavevector: 1e7,
            coupling_g: 1e8,
            wavelength: None,
        }
    }

    /// Builds a parameter set from a wavelength instead of a wave vector.
    pub fn with_wavelength(mut self, lambda: f64) -> Result<Self> {
        positive("wavelength", lambda)?;
        self.wavevector = 2.0 * std::f64::consts::PI / lambda;
        self.wavelength = Some(lambda);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        positive("mass_kg", self.mass_kg)?;
        positive("omega_emitter", self.omega_emitter)?;
        positive("omega_cavity", self.omega_cavity)?;
        positive("omega_trap", self.omega_trap)?;
        positive("wavevector", self.wavevector)?;
        positive("coupling_g", self.coupling_g)?;
        if let Some(lambda) = self.wavelength {
            positive("wavelength", lambda)?;
            let product = self.wavevector * lambda;
            let two_pi = 2.0 * std::f64::consts::PI;
            if ((product - two_pi) / two_pi).abs() > 1e-12 {
                return Err(Error::InconsistentWavelength {
                    k: self.wavevector,
                    lambda,
                    product,
                });
            }
        }
        let ceiling = RWA_WARN_RATIO * self.omega_cavity.min(self.omega_emitter);
        if self.coupling_g > ceiling {
            log::warn!(
                "coupling g = {:e} exceeds {} x min(omega_a, Omega); rotating-wave approximation may fail",
                self.coupling_g,
                RWA_WARN_RATIO
            );
        }
        Ok(())
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

/// Recoil-induced constants (SI).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Oscillator length α = √(ħ / 2Mω), m.
    pub alpha: f64,
    /// Kerr strength χ = k²α²ω, rad/s.
    pub chi: f64,
    /// Optomechanical strength η = kαω, rad/s.
    pub eta: f64,
    /// Lamb-Dicke factor kα.
    pub lamb_dicke: f64,
}

/// Computes α, χ, η and kα. The Kerr strength is evaluated both as `k²α²ω`
/// and as the trap-independent `ħk²/2M`; the two must agree.
pub fn derive_constants(p: &ModelParams) -> Result<DerivedConstants> {
    p.validate()?;
    let alpha = (HBAR / (2.0 * p.mass_kg * p.omega_trap)).sqrt();
    let lamb_dicke = p.wavevector * alpha;
    let chi = lamb_dicke * lamb_dicke * p.omega_trap;
    let eta = lamb_dicke * p.omega_trap;
    let chi_recoil = HBAR * p.wavevector * p.wavevector / (2.0 * p.mass_kg);
    if chi_recoil > 0.0 && ((chi - chi_recoil) / chi_recoil).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "Kerr strength cross-check failed: k²α²ω = {chi:e}, ħk²/2M = {chi_recoil:e}"
        )));
    }
    Ok(DerivedConstants {
        alpha,
        chi,
        eta,
        lamb_dicke,
    })
}

/// SI scale kept so that a dimensionless model can be mapped back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiScale {
    /// The frequency unit, i.e. g in rad/s.
    pub unit: f64,
    pub mass_kg: f64,
    pub wavelength: Option<f64>,
}

/// Model in units ħ = 1, g = 1.
///
/// `chi` and `eta` are stored separately from `lamb_dicke` so that limiting
/// cases (η switched off with χ kept, or g = 0) can be built directly. The
/// physical model always satisfies `χ = kα²ω` and `η = kαω`; see
/// [`DimensionlessModel::is_recoil_consistent`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessModel {
    /// Trap frequency ω/g.
    pub omega: f64,
    /// Cavity frequency ω_a/g.
    pub omega_cavity: f64,
    /// Emitter frequency Ω/g.
    pub omega_emitter: f64,
    /// Emitter-cavity coupling, 1 unless a limit is being studied.
    pub coupling: f64,
    /// kα.
    pub lamb_dicke: f64,
    /// χ/g.
    pub chi: f64,
    /// η/g.
    pub eta: f64,
    pub si: Option<SiScale>,
}

pub fn to_dimensionless(p: &ModelParams, d: &DerivedConstants) -> Result<DimensionlessModel> {
    positive("coupling_g", p.coupling_g)?;
    let g = p.coupling_g;
    Ok(DimensionlessModel {
        omega: p.omega_trap / g,
        omega_cavity: p.omega_cavity / g,
        omega_emitter: p.omega_emitter / g,
        coupling: 1.0,
        lamb_dicke: d.lamb_dicke,
        chi: d.chi / g,
        eta: d.eta / g,
        si: Some(SiScale {
            unit: g,
            mass_kg: p.mass_kg,
            wavelength: p.wavelength,
        }),
    })
}

impl DimensionlessModel {
    /// Physical model from dimensionless inputs; χ and η follow from kα.
    pub fn new(omega: f64, omega_cavity: f64, omega_emitter: f64, lamb_dicke: f64) -> Self {
        Self {
            omega,
            omega_cavity,
            omega_emitter,
            coupling: 1.0,
            lamb_dicke,
            chi: lamb_dicke * lamb_dicke * omega,
            eta: lamb_dicke * omega,
            si: None,
        }
    }

    pub fn from_si(p: &ModelParams) -> Result<Self> {
        let d = derive_constants(p)?;
        to_dimensionless(p, &d)
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_chi(mut self, chi: f64) -> Self {
        self.chi = chi;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    /// Same SI constants with a different trap frequency (in units of g).
    /// kα scales as ω^(-1/2), so χ is unchanged and η ∝ √ω.
    pub fn with_trap(mut self, omega: f64) -> Self {
        let ld = self.lamb_dicke * (self.omega / omega).sqrt();
        self.omega = omega;
        self.lamb_dicke = ld;
        self.chi = ld * ld * omega;
        self.eta = ld * omega;
        self
    }

    /// Ω − ω_a.
    pub fn detuning(&self) -> f64 {
        self.omega_emitter - self.omega_cavity
    }

    /// Energy of `|m+1, 0, g⟩` without recoil terms; all sector energies are
    /// stored relative to it.
    pub fn sector_offset(&self, m: usize) -> f64 {
        (m as f64 + 1.0) * self.omega_cavity
    }

    pub fn absolute_energy(&self, m: usize, relative: f64) -> f64 {
        self.sector_offset(m) + relative
    }

    pub fn relative_energy(&self, m: usize, absolute: f64) -> f64 {
        absolute - self.sector_offset(m)
    }

    /// `χ·ω = η²` and `η = kα·ω`, the relations the G-function relies on.
    pub fn is_recoil_consistent(&self) -> bool {
        let eta = self.lamb_dicke * self.omega;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300);
        close(self.eta, eta) && close(self.chi * self.omega, self.eta * self.eta)
    }

    /// Maps back to SI. Needs the scale captured by [`to_dimensionless`].
    pub fn to_si(&self) -> Result<(ModelParams, DerivedConstants)> {
        let si = self
            .si
            .ok_or_else(|| Error::Dependency("model has no SI scale attached".into()))?;
        let g = si.unit;
        let omega_trap = self.omega * g;
        let chi = self.chi * g;
        let eta = self.eta * g;
        let alpha = (HBAR / (2.0 * si.mass_kg * omega_trap)).sqrt();
        let params = ModelParams {
            mass_kg: si.mass_kg,
            omega_emitter: self.omega_emitter * g,
            omega_cavity: self.omega_cavity * g,
            omega_trap,
            wavevector: self.lamb_dicke / alpha,
            coupling_g: self.coupling * g,
            wavelength: si.wavelength,
        };
        let derived = DerivedConstants {
            alpha,
            chi,
            eta,
            lamb_dicke: self.lamb_dicke,
        };
        Ok((params, derived))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn reference_constants() {
        let p = ModelParams::reference();
        let d = derive_constants(&p).unwrap();
        let chi_g = d.chi / p.coupling_g;
        let eta_g = d.eta / p.coupling_g;
        // quoted as χ ≈ 0.05 g and η ≈ g/√2
        assert!((chi_g - 0.05).abs() < 0.005, "chi/g = {chi_g}");
        assert!((eta_g - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.03, "eta/g = {eta_g}");
        let chi_direct = HBAR * 1e14 / (2.0 * 1e-27) / 1e8;
        assert!(rel(chi_g, chi_direct) < 1e-14);
        assert!((chi_g - 0.052_728_590_85).abs() < 1e-10);
        assert!((eta_g - 0.726_144_550_69).abs() < 1e-10);
    }

    #[test]
    fn kerr_identity() {
        for &(mass, trap, k) in &[(1e-27, 1e9, 1e7), (3e-26, 2.5e8, 4e6), (1e-25, 7e7, 1.2e7)] {
            let p = ModelParams {
                mass_kg: mass,
                omega_trap: trap,
                wavevector: k,
                ..ModelParams::reference()
            };
            let d = derive_constants(&p).unwrap();
            assert!(rel(d.chi * trap, d.eta * d.eta) < 1e-14);
            assert_eq!(d, derive_constants(&p).unwrap());
        }
    }

    #[test]
    fn doubling_mass() {
        let p = ModelParams::reference();
        let heavy = ModelParams {
            mass_kg: 2.0 * p.mass_kg,
            ..p
        };
        let a = derive_constants(&p).unwrap();
        let b = derive_constants(&heavy).unwrap();
        let chi_ratio = b.chi / a.chi;
        let eta_ratio = b.eta / a.eta;
        // direct formula: χ ∝ 1/M, η ∝ M^(-1/2)
        assert!((chi_ratio - 0.5).abs() < 1e-14);
        assert!((eta_ratio - 0.5_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn vanishing_wavevector() {
        let p = ModelParams {
            wavevector: 1e-300,
            ..ModelParams::reference()
        };
        let d = derive_constants(&p).unwrap();
        assert!(d.chi.abs() < 1e-300);
        assert!(d.eta.abs() < 1e-280);
    }

    #[test]
    fn rejects_non_positive() {
        let p = ModelParams {
            omega_trap: -1.0,
            ..ModelParams::reference()
        };
        assert!(matches!(
            derive_constants(&p),
            Err(Error::NonPositive { name: "omega_trap", .. })
        ));
        let p = ModelParams {
            mass_kg: 0.0,
            ..ModelParams::reference()
        };
        assert!(derive_constants(&p).is_err());
    }

    #[test]
    fn wavelength_consistency() {
        let lambda = 2.0 * std::f64::consts::PI / 1e7;
        let p = ModelParams::reference().with_wavelength(lambda).unwrap();
        assert!(rel(p.wavevector, 1e7) < 1e-12);
        let bad = ModelParams {
            wavelength: Some(1e-6),
            ..ModelParams::reference()
        };
        assert!(matches!(
            bad.validate(),
            Err(Error::InconsistentWavelength { .. })
        ));
    }

    #[test]
    fn dimensionless_values() {
        let m = DimensionlessModel::from_si(&ModelParams::reference()).unwrap();
        assert_eq!(m.omega, 10.0);
        assert_eq!(m.coupling, 1.0);
        assert_eq!(m.omega_cavity, 1e6);
        assert_eq!(m.omega_emitter, 1e6);
        assert!(m.is_recoil_consistent());
    }

    #[test]
    fn si_round_trip() {
        let p = ModelParams {
            mass_kg: 2.2e-25,
            omega_emitter: 3.1e14,
            omega_cavity: 2.9e14,
            omega_trap: 4.4e8,
            wavevector: 8.1e6,
            coupling_g: 7.5e7,
            wavelength: None,
        };
        let d = derive_constants(&p).unwrap();
        let dm = to_dimensionless(&p, &d).unwrap();
        let (p2, d2) = dm.to_si().unwrap();
        for (a, b) in [
            (p.mass_kg, p2.mass_kg),
            (p.omega_emitter, p2.omega_emitter),
            (p.omega_cavity, p2.omega_cavity),
            (p.omega_trap, p2.omega_trap),
            (p.wavevector, p2.wavevector),
            (p.coupling_g, p2.coupling_g),
            (d.alpha, d2.alpha),
            (d.chi, d2.chi),
            (d.eta, d2.eta),
            (d.lamb_dicke, d2.lamb_dicke),
        ] {
            assert!(rel(b, a) < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn trap_rescaling_keeps_kerr() {
        let m = DimensionlessModel::from_si(&ModelParams::reference()).unwrap();
        let shallow = m.with_trap(2.0);
        assert!(rel(shallow.chi, m.chi) < 1e-13);
        let direct = DimensionlessModel::from_si(&ModelParams {
            omega_trap: 2e8,
            ..ModelParams::reference()
        })
        .unwrap();
        assert!(rel(shallow.eta, direct.eta) < 1e-13);
        assert!(rel(shallow.lamb_dicke, direct.lamb_dicke) < 1e-13);
    }
}
