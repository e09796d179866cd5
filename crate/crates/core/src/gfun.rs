//! Exact sector spectrum from the zeros of a G-function.
//!
//! Each diagonal block of the sector Hamiltonian is a shifted oscillator, so
//! two displaced phonon frames diagonalise one block each:
//!
//! * frame B (`b = B − kα(m+1)`), "unprimed": the g-branch becomes
//!   `ω B†B − γ`, the e-branch `ω B†B − η(B + B†) + β`;
//! * frame A (`b = A − kα·m`), "primed": the g-branch becomes
//!   `ω A†A + η(A + A†) + β'`, the e-branch `ω A†A − γ'`.
//!
//! Expanding an eigenstate in the Fock states of either frame gives the
//! three-term recursion `n f_n = K_{n−1} f_{n−1} − f_{n−2}` with
//!
//! ```text
//! K_n = [(nω + β − E) − (m+1) g² / (nω − γ − E)] / (kα ω)
//! e_n = −√(m+1) g f_n / (nω − γ − E)
//! ```
//!
//! and the same with primes in frame A. `E` is an eigenvalue exactly when
//! the two expansions describe the same state. We test that by projecting
//! both on a common coherent state placed between the two frame centres: in
//! Bargmann variables the B-series is evaluated at `x_B = t·kα` and the
//! A-series at `x_A = (1 − t)·kα`,
//!
//! ```text
//! G_m(E) = Σ e_n x_B^n · Σ e'_n x_A^n − Σ f_n x_B^n · Σ f'_n x_A^n .
//! ```
//!
//! Each series has radius of convergence `kα` (the other frame's centre is a
//! singular point), so any `0 < t < 1` converges; `t = 1/2` converges like
//! `2^{−n}`. The zero set does not depend on `t`. Projecting on the bare
//! vacuum instead (`t = 1`, available for `m = 0` as [`EvalPoint::Vacuum`])
//! puts the B-series on its circle of convergence, where it only converges
//! or diverges like a power of `n`.
//!
//! Energies are sector-relative (see the crate docs): `−γ − E` becomes `−ε`,
//! `β − E` becomes `χ + δ − ε`, `−γ' − E` becomes `δ − ε` and `β' − E`
//! becomes `χ − ε`, with `δ = Ω − ω_a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DimensionlessModel;
use crate::scaled::Scaled;

/// Minimum distance from a pole at which `K_n` and `e_n` are evaluated.
pub const DEFAULT_POLE_EPS: f64 = 1e-9;
/// Relative tail tolerance of the series.
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_TERMS: usize = 5000;
/// Partial-sum length used for the (non-convergent) vacuum projection.
pub const DEFAULT_VACUUM_TERMS: usize = 20_000;
/// Grid points per trap period `ω` in the root scan.
pub const DEFAULT_GRID_DENSITY: usize = 400;
/// Bisection stops once the bracket is this narrow (units of ħg).
pub const ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    /// Frame B, displaced by `kα(m+1)`.
    Unprimed,
    /// Frame A, displaced by `kα·m`.
    Primed,
}

impl Frame {
    pub fn name(self) -> &'static str {
        match self {
            Frame::Unprimed => "unprimed",
            Frame::Primed => "primed",
        }
    }

    /// `(−γ, β)` relative to `(m+1)ω_a`: the pole offset and the constant of
    /// the displaced block.
    fn constants(self, model: &DimensionlessModel) -> (f64, f64) {
        let delta = model.detuning();
        match self {
            Frame::Unprimed => (0.0, model.chi + delta),
            Frame::Primed => (delta, model.chi),
        }
    }
}

fn check_model(model: &DimensionlessModel) -> Result<()> {
    if !(model.eta > 0.0) || !(model.omega > 0.0) {
        return Err(Error::Domain(format!(
            "G-function needs η > 0 and ω > 0 (η = {}, ω = {})",
            model.eta, model.omega
        )));
    }
    if !model.is_recoil_consistent() {
        return Err(Error::Domain(
            "G-function needs χ = kα²ω and η = kαω".into(),
        ));
    }
    Ok(())
}

/// `nω − γ − E` (relative form), with the pole-proximity check.
fn pole_denominator(
    n: usize,
    energy: f64,
    model: &DimensionlessModel,
    frame: Frame,
    pole_eps: f64,
) -> Result<f64> {
    let (shift, _) = frame.constants(model);
    let denom = n as f64 * model.omega + shift - energy;
    if denom.abs() < pole_eps {
        return Err(Error::PoleProximity {
            energy,
            n,
            frame: frame.name(),
            distance: denom.abs(),
        });
    }
    Ok(denom)
}

/// `K_n` at sector-relative energy `energy`.
pub fn k_coefficient(
    n: usize,
    m: usize,
    energy: f64,
    model: &DimensionlessModel,
    frame: Frame,
) -> Result<f64> {
    k_coefficient_eps(n, m, energy, model, frame, DEFAULT_POLE_EPS)
}

fn k_coefficient_eps(
    n: usize,
    m: usize,
    energy: f64,
    model: &DimensionlessModel,
    frame: Frame,
    pole_eps: f64,
) -> Result<f64> {
    let (_, beta) = frame.constants(model);
    let denom = pole_denominator(n, energy, model, frame, pole_eps)?;
    let c2 = (m as f64 + 1.0) * model.coupling * model.coupling;
    Ok(((n as f64 * model.omega + beta - energy) - c2 / denom) / model.eta)
}

/// Produces `(f_n, e_n)` one term at a time.
struct CoeffStream<'a> {
    model: &'a DimensionlessModel,
    frame: Frame,
    m: usize,
    energy: f64,
    pole_eps: f64,
    n: usize,
    prev: Scaled,
    prev2: Scaled,
}

impl<'a> CoeffStream<'a> {
    fn new(model: &'a DimensionlessModel, frame: Frame, m: usize, energy: f64, pole_eps: f64) -> Self {
        Self {
            model,
            frame,
            m,
            energy,
            pole_eps,
            n: 0,
            prev: Scaled::ZERO,
            prev2: Scaled::ZERO,
        }
    }

    fn next_term(&mut self) -> Result<(Scaled, Scaled)> {
        let n = self.n;
        let f = if n == 0 {
            Scaled::ONE
        } else {
            let k = k_coefficient_eps(n - 1, self.m, self.energy, self.model, self.frame, self.pole_eps)?;
            self.prev.mul_f64(k).sub(self.prev2).mul_f64(1.0 / n as f64)
        };
        let denom = pole_denominator(n, self.energy, self.model, self.frame, self.pole_eps)?;
        let e = f.mul_f64(-(self.m as f64 + 1.0).sqrt() * self.model.coupling / denom);
        self.prev2 = self.prev;
        self.prev = f;
        self.n += 1;
        Ok((f, e))
    }
}

/// The first `len` recursion coefficients of one frame, kept in scaled form.
#[derive(Debug, Clone)]
pub struct RecursionCoeffs {
    pub frame: Frame,
    pub m: usize,
    pub energy: f64,
    pub f: Vec<Scaled>,
    pub e: Vec<Scaled>,
}

impl RecursionCoeffs {
    pub fn compute(
        frame: Frame,
        m: usize,
        energy: f64,
        model: &DimensionlessModel,
        len: usize,
    ) -> Result<Self> {
        check_model(model)?;
        let mut stream = CoeffStream::new(model, frame, m, energy, DEFAULT_POLE_EPS);
        let mut f = Vec::with_capacity(len);
        let mut e = Vec::with_capacity(len);
        for _ in 0..len {
            let (fn_, en) = stream.next_term()?;
            f.push(fn_);
            e.push(en);
        }
        Ok(Self { frame, m, energy, f, e })
    }

    pub fn f_value(&self, n: usize) -> f64 {
        self.f[n].to_f64()
    }

    pub fn e_value(&self, n: usize) -> f64 {
        self.e[n].to_f64()
    }

    /// `log2 |f_n|`, finite even where `f_n` overflows `f64`.
    pub fn f_log2(&self, n: usize) -> f64 {
        self.f[n].log2_abs()
    }

    /// Relative residual of `n f_n = K_{n−1} f_{n−1} − f_{n−2}` at index `n`.
    pub fn recursion_residual(&self, n: usize, model: &DimensionlessModel) -> Result<f64> {
        assert!(n >= 2 && n < self.f.len());
        let k = k_coefficient(n - 1, self.m, self.energy, model, self.frame)?;
        let lhs = self.f[n].mul_f64(n as f64);
        let rhs = self.f[n - 1].mul_f64(k).sub(self.f[n - 2]);
        Ok(lhs.rel_diff(rhs))
    }
}

/// Σ e_n xⁿ and Σ f_n xⁿ for one frame.
#[derive(Debug, Clone, Copy)]
struct SeriesSums {
    e: f64,
    f: f64,
    tail_e: f64,
    tail_f: f64,
    terms: usize,
    converged: bool,
    abs_scale: f64,
}

fn sum_series(
    model: &DimensionlessModel,
    frame: Frame,
    m: usize,
    energy: f64,
    x: f64,
    opts: &GOptions,
    fixed_len: Option<usize>,
) -> Result<SeriesSums> {
    let mut stream = CoeffStream::new(model, frame, m, energy, opts.pole_eps);
    if x == 0.0 {
        let (f0, e0) = stream.next_term()?;
        return Ok(SeriesSums {
            e: e0.to_f64(),
            f: f0.to_f64(),
            tail_e: 0.0,
            tail_f: 0.0,
            terms: 1,
            converged: true,
            abs_scale: e0.to_f64().abs() + 1.0,
        });
    }
    let (shift, beta) = frame.constants(model);
    // beyond this index K_n grows linearly and the terms decay geometrically
    let onset = ((energy - shift).max(energy - beta).max(0.0) / model.omega).ceil() as usize + 3;
    let cap = fixed_len.unwrap_or(opts.max_terms);
    let xs = Scaled::new(x);
    let mut power = Scaled::ONE;
    let (mut se, mut sf, mut abs_scale) = (0.0, 0.0, 0.0);
    let mut last_mag = 0.0f64;
    let mut ratios = [1.0f64; 3];
    let (mut tail_e, mut tail_f) = (f64::INFINITY, f64::INFINITY);
    let mut terms = 0;
    let mut converged = false;
    while terms < cap {
        let (f, e) = stream.next_term()?;
        let tf = f.mul(power).to_f64();
        let te = e.mul(power).to_f64();
        power = power.mul(xs);
        se += te;
        sf += tf;
        abs_scale += tf.abs() + te.abs();
        terms += 1;
        let mag = tf.abs() + te.abs();
        if last_mag > 0.0 {
            ratios[terms % 3] = mag / last_mag;
        }
        last_mag = mag;
        if fixed_len.is_none() && terms > onset {
            let rho = ratios.iter().copied().fold(0.0, f64::max);
            if rho < 0.95 {
                let factor = rho / (1.0 - rho);
                tail_e = te.abs() * factor;
                tail_f = tf.abs() * factor;
                // relative to the sums, with a floor at the round-off level
                if tail_e + tail_f <= 0.5 * opts.tol * (se.abs() + sf.abs())
                    || tail_e + tail_f <= f64::EPSILON * abs_scale
                {
                    converged = true;
                    break;
                }
            }
        }
    }
    if fixed_len.is_some() {
        // terms fall off only like a power of n here: a partial sum, never
        // reported as converged, with a crude power-law remainder
        tail_e = last_mag * terms as f64;
        tail_f = tail_e;
        converged = false;
    }
    Ok(SeriesSums {
        e: se,
        f: sf,
        tail_e,
        tail_f,
        terms,
        converged,
        abs_scale,
    })
}

/// Where the two frame expansions are compared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EvalPoint {
    /// Halfway between the frame centres (`t = 1/2`).
    Midpoint,
    /// `x_B = t·kα`, `x_A = (1 − t)·kα`, `0 < t < 1`.
    Fraction(f64),
    /// Projection on the bare phonon vacuum, `m = 0` only. The A-series
    /// collapses to its first term and the B-series sits on its circle of
    /// convergence; evaluated as a fixed-length partial sum.
    Vacuum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GOptions {
    pub tol: f64,
    pub max_terms: usize,
    pub pole_eps: f64,
    pub point: EvalPoint,
    pub vacuum_terms: usize,
}

impl Default for GOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_terms: DEFAULT_MAX_TERMS,
            pole_eps: DEFAULT_POLE_EPS,
            point: EvalPoint::Midpoint,
            vacuum_terms: DEFAULT_VACUUM_TERMS,
        }
    }
}

impl GOptions {
    pub fn at(point: EvalPoint) -> Self {
        Self {
            point,
            ..Self::default()
        }
    }
}

/// One evaluation of `G_m(E)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GFunctionEval {
    /// Sector-relative energy.
    pub energy: f64,
    pub m: usize,
    pub value: f64,
    /// Longest of the four series.
    pub terms_used: usize,
    /// Bound on the truncation error of `value`.
    pub tail_estimate: f64,
    /// `(|Σe| + |Σf|)(|Σe'| + |Σf'|)`, the size of the products that cancel
    /// at a root; the tail criterion is relative to this.
    pub scale: f64,
    pub nearest_pole_distance: f64,
    pub converged: bool,
}

/// Distance from `energy` to the nearest pole of either frame.
pub fn nearest_pole_distance(energy: f64, model: &DimensionlessModel) -> f64 {
    let dist = |shift: f64| {
        let n = ((energy - shift) / model.omega).round().max(0.0);
        (energy - shift - n * model.omega).abs()
    };
    dist(0.0).min(dist(model.detuning()))
}

/// Evaluates `G_m` at the sector-relative energy `energy`.
pub fn g_function(m: usize, energy: f64, model: &DimensionlessModel, opts: &GOptions) -> Result<GFunctionEval> {
    check_model(model)?;
    let ld = model.lamb_dicke;
    let (xb, xa, fixed) = match opts.point {
        EvalPoint::Midpoint => (0.5 * ld, 0.5 * ld, None),
        EvalPoint::Fraction(t) => {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::Domain(format!("evaluation fraction must lie in (0, 1), got {t}")));
            }
            (t * ld, (1.0 - t) * ld, None)
        }
        EvalPoint::Vacuum => {
            if m != 0 {
                return Err(Error::Domain(
                    "vacuum projection is only defined for m = 0 (it lies outside both convergence disks otherwise)".into(),
                ));
            }
            (ld, 0.0, Some(opts.vacuum_terms))
        }
    };
    let b = sum_series(model, Frame::Unprimed, m, energy, xb, opts, fixed)?;
    let a = sum_series(model, Frame::Primed, m, energy, xa, opts, None)?;
    let value = b.e * a.e - b.f * a.f;
    let scale = (b.e.abs() + b.f.abs()) * (a.e.abs() + a.f.abs());
    let tail = b.tail_e * a.e.abs() + a.tail_e * b.e.abs() + b.tail_f * a.f.abs() + a.tail_f * b.f.abs();
    let converged = b.converged && a.converged;
    let eval = GFunctionEval {
        energy,
        m,
        value,
        terms_used: b.terms.max(a.terms),
        tail_estimate: tail,
        scale,
        nearest_pole_distance: nearest_pole_distance(energy, model),
        converged,
    };
    if !converged && fixed.is_none() {
        return Err(Error::Convergence {
            energy,
            terms: eval.terms_used,
            tail,
            scale: b.abs_scale.max(a.abs_scale),
        });
    }
    Ok(eval)
}

/// Poles `E = nω + (m+1)ω_a` inside a window, stored sector-relative (`nω`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    pub m: usize,
    pub poles: Vec<f64>,
    offset: f64,
}

impl PoleSet {
    pub fn absolute(&self) -> Vec<f64> {
        self.poles.iter().map(|p| p + self.offset).collect()
    }
}

/// Relative energy window `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("empty energy window [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// From absolute energies (units of ħg).
    pub fn from_absolute(m: usize, model: &DimensionlessModel, lo: f64, hi: f64) -> Result<Self> {
        Self::new(model.relative_energy(m, lo), model.relative_energy(m, hi))
    }
}

fn ladder(shift: f64, omega: f64, window: Window) -> Vec<f64> {
    let first = ((window.lo - shift) / omega).ceil().max(0.0) as usize;
    let mut out = Vec::new();
    let mut n = first;
    loop {
        let p = n as f64 * omega + shift;
        if p > window.hi {
            break;
        }
        if p >= window.lo {
            out.push(p);
        }
        n += 1;
    }
    out
}

pub fn pole_locations(m: usize, model: &DimensionlessModel, window: Window) -> PoleSet {
    PoleSet {
        m,
        poles: ladder(0.0, model.omega, window),
        offset: model.sector_offset(m),
    }
}

/// Poles of both frames (they coincide on resonance), sorted, deduplicated.
pub fn all_poles(model: &DimensionlessModel, window: Window) -> Vec<f64> {
    let mut p = ladder(0.0, model.omega, window);
    p.extend(ladder(model.detuning(), model.omega, window));
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub energy: f64,
    /// `None` when the energy is too close to a pole to evaluate.
    pub value: Option<f64>,
    pub near_pole: bool,
}

/// Fraction of `ω` within which a scan point is flagged as near a pole.
pub const NEAR_POLE_FRACTION: f64 = 1e-2;

/// Uniform scan of `G_m` over a window (inclusive endpoints).
pub fn scan(
    m: usize,
    model: &DimensionlessModel,
    window: Window,
    points: usize,
    opts: &GOptions,
) -> Result<Vec<ScanPoint>> {
    if points < 2 {
        return Err(Error::Domain("scan needs at least two points".into()));
    }
    let step = (window.hi - window.lo) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            let energy = window.lo + i as f64 * step;
            let near_pole = nearest_pole_distance(energy, model) < NEAR_POLE_FRACTION * model.omega;
            match g_function(m, energy, model, opts) {
                Ok(ev) => Ok(ScanPoint {
                    energy,
                    value: Some(ev.value),
                    near_pole,
                }),
                Err(Error::PoleProximity { .. }) => Ok(ScanPoint {
                    energy,
                    value: None,
                    near_pole: true,
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    /// Sector-relative energy.
    pub energy: f64,
    /// Number of poles (either frame) below the root.
    pub interval_index: usize,
    /// `|G_m(root)|`.
    pub residual: f64,
    /// Matched diagonalization eigenvalue, filled in by validation.
    pub oracle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub m: usize,
    pub window: Window,
    pub roots: Vec<RootRecord>,
}

impl SpectrumResult {
    pub fn energies(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.energy).collect()
    }
}

fn sign_of(m: usize, e: f64, model: &DimensionlessModel, opts: &GOptions) -> Result<f64> {
    Ok(g_function(m, e, model, opts)?.value)
}

/// Brackets sign changes of `G_m` between consecutive poles and refines them
/// by bisection to [`ROOT_TOL`].
///
/// Near-degenerate pairs closer than one grid step can be missed; that shows
/// up as an unmatched eigenvalue in [`crate::diag::validate_roots`].
pub fn find_roots(
    m: usize,
    model: &DimensionlessModel,
    window: Window,
    grid_density: usize,
    opts: &GOptions,
) -> Result<SpectrumResult> {
    check_model(model)?;
    if grid_density < 2 {
        return Err(Error::Domain("grid density must be at least 2 points per ω".into()));
    }
    let poles = all_poles(model, window);
    let gap = (10.0 * opts.pole_eps).max(1e-7);
    let mut edges = vec![(window.lo, poles.first() == Some(&window.lo))];
    edges.extend(poles.iter().filter(|&&p| p > window.lo && p < window.hi).map(|&p| (p, true)));
    edges.push((window.hi, poles.last() == Some(&window.hi)));

    let mut roots = Vec::new();
    for pair in edges.windows(2) {
        let (a, a_pole) = pair[0];
        let (b, b_pole) = pair[1];
        let lo = if a_pole { a + gap } else { a };
        let hi = if b_pole { b - gap } else { b };
        if hi <= lo {
            continue;
        }
        let n = (((hi - lo) / model.omega) * grid_density as f64).ceil().max(8.0) as usize;
        let step = (hi - lo) / n as f64;
        let mut prev_e = lo;
        let mut prev_v = sign_of(m, lo, model, opts)?;
        for i in 1..=n {
            let e = if i == n { hi } else { lo + i as f64 * step };
            let v = sign_of(m, e, model, opts)?;
            if prev_v == 0.0 {
                roots.push(prev_e);
            } else if v != 0.0 && (v > 0.0) != (prev_v > 0.0) {
                roots.push(bisect(m, model, opts, prev_e, prev_v, e)?);
            }
            prev_e = e;
            prev_v = v;
        }
        if prev_v == 0.0 {
            roots.push(prev_e);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < ROOT_TOL);
    let records = roots
        .into_iter()
        .map(|energy| {
            let residual = g_function(m, energy, model, opts)?.value.abs();
            let interval_index = poles.iter().filter(|&&p| p < energy).count()
                + ladder_below(model, window.lo);
            Ok(RootRecord {
                energy,
                interval_index,
                residual,
                oracle: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult {
        m,
        window,
        roots: records,
    })
}

/// Poles of either frame below `lo`, so that interval indices do not depend on
/// where the window starts.
fn ladder_below(model: &DimensionlessModel, lo: f64) -> usize {
    if lo <= 0.0 && lo <= model.detuning() {
        return 0;
    }
    let w = Window { lo: f64::min(0.0, model.detuning()), hi: lo };
    all_poles(model, w).iter().filter(|&&p| p < lo).count()
}

fn bisect(m: usize, model: &DimensionlessModel, opts: &GOptions, mut lo: f64, lo_v: f64, mut hi: f64) -> Result<f64> {
    let lo_pos = lo_v > 0.0;
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = sign_of(m, mid, model, opts)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if (v > 0.0) == lo_pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A lower bound on the sector spectrum: both displaced blocks are bounded
/// below by their constants, the coupling shifts by at most `√(m+1)g`.
pub fn spectrum_lower_bound(m: usize, model: &DimensionlessModel) -> f64 {
    model.detuning().min(0.0) - (m as f64 + 1.0).sqrt() * model.coupling.abs() - 1.0
}

/// The `count` lowest roots of sector `m`, widening the window one trap
/// period at a time.
pub fn lowest_roots(
    m: usize,
    model: &DimensionlessModel,
    count: usize,
    grid_density: usize,
    opts: &GOptions,
) -> Result<SpectrumResult> {
    let lo = spectrum_lower_bound(m, model);
    let mut hi = lo + model.omega;
    loop {
        let mut res = find_roots(m, model, Window::new(lo, hi)?, grid_density, opts)?;
        // stop half a period above the last wanted root so it is not cut by the window edge
        if res.roots.len() > count || (res.roots.len() == count && hi - res.roots[count - 1].energy > 0.5 * model.omega) {
            res.roots.truncate(count);
            res.window = Window::new(lo, res.roots.last().map_or(hi, |r| r.energy + 0.5 * model.omega))?;
            return Ok(res);
        }
        hi += model.omega;
        if hi - lo > 1e4 * model.omega.max(1.0) {
            return Err(Error::Domain(format!("could not find {count} roots in sector {m}")));
        }
    }
}
