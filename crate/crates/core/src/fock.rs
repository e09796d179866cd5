//! Truncated phonon Fock space, sector block Hamiltonians and the polaron
//! displacement.
//!
//! A sector `m` is spanned by `|m+1, n, g⟩` and `|m, n, e⟩`, `n = 0..=n_max`,
//! stored branch-major: the first `n_max + 1` entries are the g-branch. The
//! Hamiltonian is written after the phase rotation `b → i b`, which makes the
//! optomechanical term `η a†a (b + b†)` real; phonon-number projectors are
//! unaffected by that rotation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::DimensionlessModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhononBasis {
    n_max: usize,
}

impl PhononBasis {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::Domain(format!("n_max must be >= 1 (got {n_max})")));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of phonon states, `n_max + 1`.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Dimension of a sector (both branches).
    pub fn sector_dim(&self) -> usize {
        2 * self.dim()
    }

    pub fn doubled(&self) -> Self {
        Self {
            n_max: 2 * self.n_max,
        }
    }

    /// `b + b†` on this basis.
    pub fn position(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| {
            if j == i + 1 {
                (j as f64).sqrt()
            } else if i == j + 1 {
                (i as f64).sqrt()
            } else {
                0.0
            }
        })
    }
}

/// Sector Hamiltonian in the rotated (real) frame, energies relative to
/// `(m+1)·ω_a`.
#[derive(Debug, Clone)]
pub struct BlockHamiltonian {
    pub m: usize,
    pub basis: PhononBasis,
    pub model: DimensionlessModel,
    pub matrix: DMatrix<f64>,
}

impl BlockHamiltonian {
    /// Absolute energy of the reference `(m+1)·ω_a`.
    pub fn offset(&self) -> f64 {
        self.model.sector_offset(self.m)
    }

    /// Index of `|m+1, n, g⟩`.
    pub fn g_index(&self, n: usize) -> usize {
        n
    }

    /// Index of `|m, n, e⟩`.
    pub fn e_index(&self, n: usize) -> usize {
        self.basis.dim() + n
    }

    /// Same sector rebuilt on a basis twice as large.
    pub fn doubled(&self) -> BlockHamiltonian {
        build_block(self.m, &self.model, self.basis.doubled())
    }
}

/// Builds the sector-`m` block
///
/// ```text
/// H11 = ω n + (m+1) η (b+b†) + (m+1)² χ
/// H22 = ω n + (Ω − ω_a) + m η (b+b†) + m² χ
/// H12 = √(m+1) g
/// ```
///
/// relative to `(m+1)·ω_a`.
pub fn build_block(m: usize, model: &DimensionlessModel, basis: PhononBasis) -> BlockHamiltonian {
    let d = basis.dim();
    let mf = m as f64;
    let p = mf + 1.0;
    let delta = model.detuning();
    let hop = model.coupling * p.sqrt();
    let mut h = DMatrix::zeros(2 * d, 2 * d);
    for n in 0..d {
        let nf = n as f64;
        h[(n, n)] = nf * model.omega + p * p * model.chi;
        h[(d + n, d + n)] = nf * model.omega + delta + mf * mf * model.chi;
        h[(n, d + n)] = hop;
        h[(d + n, n)] = hop;
        if n + 1 < d {
            let s = (nf + 1.0).sqrt();
            h[(n, n + 1)] = p * model.eta * s;
            h[(n + 1, n)] = p * model.eta * s;
            h[(d + n, d + n + 1)] = mf * model.eta * s;
            h[(d + n + 1, d + n)] = mf * model.eta * s;
        }
    }
    BlockHamiltonian {
        m,
        basis,
        model: *model,
        matrix: h,
    }
}

/// The same sector before the phase rotation, with the optomechanical term
/// `i η a†a (b − b†)`. Hermitian, complex; used to check that the rotation
/// leaves the spectrum unchanged.
pub fn build_block_unrotated(
    m: usize,
    model: &DimensionlessModel,
    basis: PhononBasis,
) -> DMatrix<Complex64> {
    let real = build_block(m, model, basis).matrix;
    let d = basis.dim();
    let mf = m as f64;
    let p = mf + 1.0;
    let mut h = real.map(|x| Complex64::new(x, 0.0));
    for n in 0..d.saturating_sub(1) {
        let s = (n as f64 + 1.0).sqrt();
        // ⟨n| i(b − b†) |n+1⟩ = i√(n+1)
        for (start, strength) in [(0, p * model.eta), (d, mf * model.eta)] {
            let (i, j) = (start + n, start + n + 1);
            h[(i, j)] = Complex64::new(0.0, strength * s);
            h[(j, i)] = Complex64::new(0.0, -strength * s);
        }
    }
    h
}

/// `exp(iθ(b + b†))` on the truncated basis, computed by exponentiating the
/// tridiagonal generator through its eigendecomposition.
#[derive(Debug, Clone)]
pub struct DisplacementMatrix {
    pub theta: f64,
    pub matrix: DMatrix<Complex64>,
    /// Weight of the displaced vacuum on the top five basis states.
    pub edge_weight: f64,
}

/// Edge weight above which a truncation warning is logged.
pub const EDGE_WEIGHT_WARN: f64 = 1e-8;

pub fn displacement_matrix(theta: f64, basis: PhononBasis) -> DisplacementMatrix {
    let x = basis.position();
    let eig = x.symmetric_eigen();
    let d = basis.dim();
    let phases = DVector::from_iterator(
        d,
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, theta * l)),
    );
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let scaled = DMatrix::from_fn(d, d, |i, j| v[(i, j)] * phases[j]);
    let matrix = &scaled * v.transpose();
    let edge_weight = (d.saturating_sub(5)..d)
        .map(|i| matrix[(i, 0)].norm_sqr())
        .sum::<f64>();
    if edge_weight > EDGE_WEIGHT_WARN {
        log::warn!(
            "displaced vacuum (theta = {theta}) has weight {edge_weight:e} near the truncation edge n_max = {}",
            basis.n_max()
        );
    }
    DisplacementMatrix {
        theta,
        matrix,
        edge_weight,
    }
}

/// `U|m+1, 0, g⟩` in the rotated frame: the g-branch holds the vacuum
/// displaced by `kα(m+1)`, the e-branch is empty.
///
/// The rotation `b → i b` maps phonon Fock state `|n⟩` to `iⁿ|n⟩`, which turns
/// the coherent state of amplitude `i kα(m+1)` into the real coherent state of
/// amplitude `−kα(m+1)`, the ground state of `H11` at `g = 0`.
#[derive(Debug, Clone)]
pub struct InitialState {
    pub vector: DVector<f64>,
    pub edge_weight: f64,
}

pub fn transformed_initial_state(
    m: usize,
    basis: PhononBasis,
    model: &DimensionlessModel,
) -> InitialState {
    let theta = model.lamb_dicke * (m as f64 + 1.0);
    let disp = displacement_matrix(theta, basis);
    let d = basis.dim();
    let mut v = DVector::zeros(2 * d);
    let mut phase = Complex64::new(1.0, 0.0);
    for n in 0..d {
        let c = disp.matrix[(n, 0)] * phase;
        debug_assert!(c.im.abs() <= 1e-12, "rotated displaced vacuum not real: {c}");
        v[n] = c.re;
        phase *= Complex64::i();
    }
    InitialState {
        vector: v,
        edge_weight: disp.edge_weight,
    }
}

/// `a†a + |e⟩⟨e|` restricted to sector `m`: `(m+1)` times the identity.
pub fn excitation_number_operator(basis: PhononBasis, m: usize) -> DMatrix<f64> {
    DMatrix::identity(basis.sector_dim(), basis.sector_dim()) * (m as f64 + 1.0)
}

/// Largest `|H_ij − H_ji|`.
pub fn asymmetry(h: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..h.nrows() {
        for j in 0..i {
            worst = worst.max((h[(i, j)] - h[(j, i)]).abs());
        }
    }
    worst
}
