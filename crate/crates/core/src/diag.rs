//! Dense diagonalization of the truncated sector block, used as an
//! independent oracle for the G-function roots and as the propagator for the
//! dynamics.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{asymmetry, build_block, BlockHamiltonian, PhononBasis};
use crate::gfun::SpectrumResult;
use crate::model::DimensionlessModel;

/// Eigenvalues that move by less than this under basis doubling are trusted.
pub const CONVERGENCE_SHIFT: f64 = 1e-8;
/// Number of low levels summarised in [`Certificate::max_shift_low`].
pub const CERTIFIED_LEVELS: usize = 10;
/// Default phonon cutoff.
pub const DEFAULT_NMAX: usize = 60;

/// Outcome of re-diagonalizing on a basis twice as large.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `|λ_k(N) − λ_k(2N)|` for every level of the smaller basis.
    pub shifts: Vec<f64>,
    /// Largest shift among the lowest [`CERTIFIED_LEVELS`] levels.
    pub max_shift_low: f64,
    /// Number of leading levels whose shift stays below [`CONVERGENCE_SHIFT`].
    pub reliable: usize,
    /// Highest reliable eigenvalue (sector-relative), `-inf` if none.
    pub ceiling: f64,
}

impl Certificate {
    pub fn is_converged(&self) -> bool {
        self.max_shift_low < CONVERGENCE_SHIFT
    }
}

/// Sorted eigenpairs of one sector block; energies sector-relative.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub m: usize,
    pub basis: PhononBasis,
    pub model: DimensionlessModel,
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<f64>,
    pub certificate: Option<Certificate>,
}

impl EigenSystem {
    pub fn n_max(&self) -> usize {
        self.basis.n_max()
    }

    pub fn absolute_values(&self) -> Vec<f64> {
        self.values.iter().map(|&e| self.model.absolute_energy(self.m, e)).collect()
    }

    /// Whether level `k` lies at or below the reliability ceiling.
    pub fn is_reliable(&self, k: usize) -> bool {
        self.certificate.as_ref().is_some_and(|c| k < c.reliable)
    }

    /// Largest `|V^T V − 1|`.
    pub fn orthogonality_error(&self) -> f64 {
        let v = &self.vectors;
        let gram = v.transpose() * v;
        let id = DMatrix::<f64>::identity(v.ncols(), v.ncols());
        (gram - id).amax()
    }

    /// Largest `‖H v − E v‖` over all pairs.
    pub fn max_residual(&self, h: &DMatrix<f64>) -> f64 {
        let hv = h * &self.vectors;
        (0..self.values.len())
            .map(|k| (hv.column(k) - self.vectors.column(k) * self.values[k]).norm())
            .fold(0.0, f64::max)
    }
}

fn solve(h: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let dim = h.nrows();
    let max_abs = h.amax();
    let asym = asymmetry(h);
    let fail = || Error::Eigensolver {
        dim,
        max_abs,
        asymmetry: asym,
    };
    if h.iter().any(|x| !x.is_finite()) || asym > 1e-13 * max_abs.max(1.0) {
        return Err(fail());
    }
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 1000 * dim.max(1)).ok_or_else(fail)?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Diagonalizes `h` and attaches a certificate from the doubled basis.
pub fn eigen_decompose(h: &BlockHamiltonian) -> Result<EigenSystem> {
    let mut sys = eigen_decompose_uncertified(h)?;
    let (big, _) = solve(&h.doubled().matrix)?;
    sys.certificate = Some(certify(&sys.values, &big));
    Ok(sys)
}

/// Diagonalizes `h` without the doubling check.
pub fn eigen_decompose_uncertified(h: &BlockHamiltonian) -> Result<EigenSystem> {
    let (values, vectors) = solve(&h.matrix)?;
    Ok(EigenSystem {
        m: h.m,
        basis: h.basis,
        model: h.model,
        values,
        vectors,
        certificate: None,
    })
}

fn certify(small: &[f64], big: &[f64]) -> Certificate {
    let shifts: Vec<f64> = small.iter().zip(big).map(|(a, b)| (a - b).abs()).collect();
    let max_shift_low = shifts.iter().take(CERTIFIED_LEVELS).copied().fold(0.0, f64::max);
    let reliable = shifts.iter().take_while(|&&s| s < CONVERGENCE_SHIFT).count();
    let ceiling = if reliable == 0 { f64::NEG_INFINITY } else { small[reliable - 1] };
    Certificate {
        shifts,
        max_shift_low,
        reliable,
        ceiling,
    }
}

/// Builds and diagonalizes sector `m`, doubling `n_max` (at most `max_doublings`
/// times) until the lowest levels are converged.
pub fn converged_eigensystem(
    m: usize,
    model: &DimensionlessModel,
    n_max: usize,
    max_doublings: usize,
) -> Result<EigenSystem> {
    let mut basis = PhononBasis::new(n_max)?;
    let mut tries = 0;
    loop {
        let sys = eigen_decompose(&build_block(m, model, basis))?;
        let ok = sys.certificate.as_ref().is_some_and(Certificate::is_converged);
        if ok || tries == max_doublings {
            if !ok {
                log::warn!("sector {m}: low levels not converged at n_max = {}", basis.n_max());
            }
            return Ok(sys);
        }
        basis = basis.doubled();
        tries += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub root: f64,
    pub eigenvalue: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub m: usize,
    pub tol: f64,
    pub ceiling: f64,
    pub matched: Vec<MatchedPair>,
    /// Roots with no eigenvalue partner (or a partner farther than `tol`).
    pub unmatched_roots: Vec<f64>,
    /// Closest pairings that missed `tol`.
    pub rejected: Vec<MatchedPair>,
    /// Reliable eigenvalues inside the window that no root claimed; a missed
    /// sign change (near-degenerate pair) shows up here.
    pub unmatched_eigenvalues: Vec<f64>,
    /// Unclaimed eigenvalues above the ceiling; informational only.
    pub above_ceiling: Vec<f64>,
    pub max_diff: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.unmatched_roots.is_empty()
            && self.unmatched_eigenvalues.is_empty()
            && self.matched.iter().all(|p| p.diff <= self.tol)
    }

    /// The worst pairing, rejected or not.
    pub fn worst(&self) -> Option<MatchedPair> {
        self.matched.iter().chain(&self.rejected).copied().max_by(|a, b| a.diff.total_cmp(&b.diff))
    }
}

/// Matches roots to eigenvalues greedily by distance.
///
/// Only eigenvalues inside `[window_lo, window_hi]` take part. Eigenvalues
/// above `ceiling` that stay unclaimed are listed separately and do not fail
/// the report. Roots above the ceiling still need a partner within `tol`.
pub fn match_levels(
    m: usize,
    roots: &[f64],
    eigenvalues: &[f64],
    window: (f64, f64),
    ceiling: f64,
    tol: f64,
) -> ValidationReport {
    let eig: Vec<f64> = eigenvalues
        .iter()
        .copied()
        .filter(|&e| e >= window.0 && e <= window.1)
        .collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(roots.len() * eig.len());
    for (i, r) in roots.iter().enumerate() {
        for (j, e) in eig.iter().enumerate() {
            pairs.push(((r - e).abs(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut root_used = vec![false; roots.len()];
    let mut eig_used = vec![false; eig.len()];
    let mut matched = Vec::new();
    let mut unmatched_roots = Vec::new();
    let mut rejected = Vec::new();
    for (d, i, j) in pairs {
        if root_used[i] || eig_used[j] {
            continue;
        }
        root_used[i] = true;
        eig_used[j] = true;
        if d <= tol {
            matched.push(MatchedPair {
                root: roots[i],
                eigenvalue: eig[j],
                diff: d,
            });
        } else {
            unmatched_roots.push(roots[i]);
            rejected.push(MatchedPair {
                root: roots[i],
                eigenvalue: eig[j],
                diff: d,
            });
            eig_used[j] = false;
        }
    }
    for (i, r) in roots.iter().enumerate() {
        if !root_used[i] {
            unmatched_roots.push(*r);
        }
    }
    let mut unmatched_eigenvalues = Vec::new();
    let mut above_ceiling = Vec::new();
    for (j, e) in eig.iter().enumerate() {
        if !eig_used[j] {
            if *e <= ceiling {
                unmatched_eigenvalues.push(*e);
            } else {
                above_ceiling.push(*e);
            }
        }
    }
    matched.sort_by(|a, b| a.root.total_cmp(&b.root));
    unmatched_roots.sort_by(f64::total_cmp);
    let max_diff = matched.iter().map(|p| p.diff).fold(0.0, f64::max);
    ValidationReport {
        m,
        tol,
        ceiling,
        matched,
        unmatched_roots,
        rejected,
        unmatched_eigenvalues,
        above_ceiling,
        max_diff,
    }
}

/// Validates G-function roots against an eigensystem of the same sector and
/// writes each root's partner into `roots`.
pub fn validate_roots(roots: &mut SpectrumResult, eig: &EigenSystem, tol: f64) -> Result<ValidationReport> {
    if roots.m != eig.m {
        return Err(Error::Domain(format!(
            "roots are for sector {} but the eigensystem is for sector {}",
            roots.m, eig.m
        )));
    }
    let ceiling = eig.certificate.as_ref().map_or(f64::INFINITY, |c| c.ceiling);
    let energies = roots.energies();
    let report = match_levels(
        roots.m,
        &energies,
        &eig.values,
        (roots.window.lo, roots.window.hi),
        ceiling,
        tol,
    );
    for rec in &mut roots.roots {
        rec.oracle = report
            .matched
            .iter()
            .find(|p| p.root == rec.energy)
            .map(|p| p.eigenvalue);
    }
    Ok(report)
}
