use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use rayon::prelude::*;
use vibron_qed::analytic::{self, rabi_splitting};
use vibron_qed::diag::{self, eigen_decompose, validate_roots, ValidationReport};
use vibron_qed::dynamics::{self, TimeGrid, DEFAULT_DT, DEFAULT_PROMINENCE, DEFAULT_TMAX};
use vibron_qed::fock::{asymmetry, build_block, PhononBasis};
use vibron_qed::gfun::{
    self, all_poles, find_roots, lowest_roots, GOptions, SpectrumResult, Window, DEFAULT_GRID_DENSITY,
};
use vibron_qed::{report, DimensionlessModel};

use crate::config::Resolved;
use crate::output::write_atomic;
use crate::{OutArg, SectorArg};

/// Default scan window, relative to `(m+1)ω_a`.
const DEFAULT_WINDOW: (f64, f64) = (-2.0, 30.0);

fn sector(m: i64) -> Result<usize> {
    usize::try_from(m).with_context(|| format!("sector index m must be >= 0 (got {m})"))
}

fn window(m: usize, model: &DimensionlessModel, emin: Option<f64>, emax: Option<f64>) -> Result<Window> {
    let lo = emin.map_or(DEFAULT_WINDOW.0, |e| model.relative_energy(m, e));
    let hi = emax.map_or(DEFAULT_WINDOW.1, |e| model.relative_energy(m, e));
    if !(lo < hi) {
        bail!("empty energy window: --emin must be below --emax");
    }
    Ok(Window::new(lo, hi)?)
}

fn g_options(tol: Option<f64>) -> GOptions {
    let mut o = GOptions::default();
    if let Some(t) = tol {
        o.tol = t;
    }
    o
}

pub fn params(r: &Resolved) -> Result<bool> {
    print!("{}", report::render_params(&r.params, &r.derived, &r.model));
    Ok(true)
}

#[derive(Debug, Args)]
pub struct GscanArgs {
    #[command(flatten)]
    sector: SectorArg,
    /// Lower edge of the window, absolute energy in units of g
    #[arg(long)]
    emin: Option<f64>,
    /// Upper edge of the window, absolute energy in units of g
    #[arg(long)]
    emax: Option<f64>,
    /// Samples per trap period ω
    #[arg(long, default_value_t = DEFAULT_GRID_DENSITY)]
    grid_density: usize,
    /// Relative series tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    out: OutArg,
}

pub fn gscan(r: &Resolved, a: &GscanArgs) -> Result<bool> {
    let m = sector(a.sector.m)?;
    let model = &r.model;
    let w = window(m, model, a.emin, a.emax)?;
    let points = (((w.hi - w.lo) / model.omega) * a.grid_density as f64).ceil() as usize + 1;
    let scan = gfun::scan(m, model, w, points.max(2), &g_options(a.tol))?;
    let path = write_atomic(&a.out.out, &format!("gscan_m{m}.csv"), |f| report::write_scan(f, m, &scan, model))?;
    let poles = gfun::pole_locations(m, model, w);
    let crossings = scan
        .windows(2)
        .filter(|p| !p[0].near_pole && !p[1].near_pole)
        .filter(|p| matches!((p[0].value, p[1].value), (Some(x), Some(y)) if x * y < 0.0))
        .count();
    println!("sector {m}: {} points, {} poles, {crossings} sign changes away from poles", scan.len(), poles.poles.len());
    for p in poles.absolute() {
        println!("  pole at E/g = {p:.6}");
    }
    println!("wrote {}", path.display());
    Ok(true)
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    sector: SectorArg,
    /// Number of lowest levels (ignored when --emin/--emax are given)
    #[arg(long, default_value_t = 10)]
    levels: usize,
    #[arg(long)]
    emin: Option<f64>,
    #[arg(long)]
    emax: Option<f64>,
    /// Phonon cutoff of the diagonalization oracle
    #[arg(long, default_value_t = 120)]
    nmax: usize,
    /// Root-eigenvalue matching tolerance, units of g
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_DENSITY)]
    grid_density: usize,
    #[command(flatten)]
    out: OutArg,
}

fn roots_for(m: usize, model: &DimensionlessModel, a: &SpectrumArgs) -> Result<SpectrumResult> {
    let opts = GOptions::default();
    if a.emin.is_some() || a.emax.is_some() {
        Ok(find_roots(m, model, window(m, model, a.emin, a.emax)?, a.grid_density, &opts)?)
    } else {
        Ok(lowest_roots(m, model, a.levels, a.grid_density, &opts)?)
    }
}

pub fn spectrum(r: &Resolved, a: &SpectrumArgs) -> Result<bool> {
    let m = sector(a.sector.m)?;
    let model = &r.model;
    let mut roots = roots_for(m, model, a)?;
    let sys = eigen_decompose(&build_block(m, model, PhononBasis::new(a.nmax)?))?;
    let rep = validate_roots(&mut roots, &sys, a.tol)?;
    let dir = &a.out.out;
    let p1 = write_atomic(dir, &format!("roots_m{m}.csv"), |f| report::write_roots(f, &roots, model))?;
    let p2 = write_atomic(dir, &format!("eigenvalues_m{m}.csv"), |f| report::write_eigenvalues(f, &sys))?;

    println!("sector {m}: {} roots", roots.roots.len());
    for rec in &roots.roots {
        println!(
            "  E/g = {:.10}  (E - {}w_a = {:+.10})  |G| = {:.2e}",
            model.absolute_energy(m, rec.energy),
            m + 1,
            rec.energy,
            rec.residual
        );
    }
    print!("{}", report::render_validation(&rep, model));
    let e = roots.energies();
    let formula = rabi_splitting(m, model);
    for (n, pair) in e.chunks(2).take(2).enumerate() {
        if let [lo, hi] = pair {
            let exact = hi - lo;
            println!(
                "  sideband {n}: exact splitting {exact:.6}, formula {formula:.6}, |difference| {:.6}",
                (formula - exact).abs()
            );
        }
    }
    println!("wrote {} and {}", p1.display(), p2.display());
    Ok(rep.passed())
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[command(flatten)]
    sector: SectorArg,
    /// Phonon cutoff (doubled automatically until the low levels converge)
    #[arg(long, default_value_t = diag::DEFAULT_NMAX)]
    nmax: usize,
    /// Length of the run, units of 1/g
    #[arg(long, default_value_t = DEFAULT_TMAX)]
    tmax: f64,
    /// Time step, units of 1/g
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    /// Report peaks above this fraction of the largest
    #[arg(long, default_value_t = DEFAULT_PROMINENCE)]
    prominence: f64,
    #[command(flatten)]
    out: OutArg,
}

pub fn dynamics(r: &Resolved, a: &DynamicsArgs) -> Result<bool> {
    let m = sector(a.sector.m)?;
    let model = &r.model;
    let grid = TimeGrid::new(a.tmax, a.dt)?;
    let sys = diag::converged_eigensystem(m, model, a.nmax, 3)?;
    let res = dynamics::evolve(&sys, &grid, a.prominence)?;
    let dir = &a.out.out;
    let p1 = write_atomic(dir, &format!("timeseries_m{m}.csv"), |f| {
        report::write_time_series(f, &grid, &res.population, &res.norm)
    })?;
    let p2 = write_atomic(dir, &format!("fft_m{m}.csv"), |f| report::write_spectrum(f, &res.spectrum))?;
    let p3 = write_atomic(dir, &format!("peaks_m{m}.json"), |f| {
        f.write_all(report::peaks_json(&res.peaks).as_bytes())
    })?;

    println!("sector {m}, omega = {:.6} g, n_max = {}, {} samples", model.omega, res.n_max, grid.count);
    match res.period() {
        Some(t) => println!("  Rabi period {t:.6} / g  (pi/sqrt(m+1) = {:.6})", std::f64::consts::PI / (m as f64 + 1.0).sqrt()),
        None => println!("  no Rabi period found"),
    }
    println!(
        "  mean P = {:.6}, resolution {:.4} g, max |norm - 1| = {:.1e}, Parseval error {:.1e}",
        res.spectrum.mean,
        res.spectrum.resolution,
        res.max_norm_error(),
        res.spectrum.parseval_error()
    );
    let top = res.peaks.first().map_or(1.0, |p| p.height);
    for p in res.peaks.iter().take(6) {
        println!("  peak {:.5} g  height {:.4} ({:.1}%)", p.frequency, p.height, 100.0 * p.height / top);
    }
    let pred = analytic::two_peak_frequencies(m, model);
    println!(
        "  two-level prediction {:.5} / {:.5} g (mu = {:.5} g)",
        pred.omega_minus, pred.omega_plus, pred.mu
    );
    println!("wrote {}, {}, {}", p1.display(), p2.display(), p3.display());
    Ok(true)
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[command(flatten)]
    sector: SectorArg,
    /// Number of sidebands to list
    #[arg(long, default_value_t = 3)]
    sidebands: usize,
}

pub fn analytic(r: &Resolved, a: &AnalyticArgs) -> Result<bool> {
    let m = sector(a.sector.m)?;
    print!("{}", report::render_analytic(&analytic::report(m, &r.model, a.sidebands)));
    Ok(true)
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Sectors to check
    #[arg(long = "m", default_values_t = vec![0i64, 1], allow_negative_numbers = true)]
    sectors: Vec<i64>,
    /// Lowest levels compared per sector
    #[arg(long, default_value_t = 10)]
    levels: usize,
    #[arg(long, default_value_t = 120)]
    nmax: usize,
    /// Root-eigenvalue matching tolerance, units of g
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_TMAX)]
    tmax: f64,
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    /// Also write the root tables here
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Check {
    name: &'static str,
    value: f64,
    limit: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.value <= self.limit
    }
}

struct SectorOutcome {
    m: usize,
    roots: SpectrumResult,
    validation: ValidationReport,
    checks: Vec<Check>,
}

fn validate_sector(m: usize, model: &DimensionlessModel, a: &ValidateArgs) -> Result<SectorOutcome> {
    let mut roots = lowest_roots(m, model, a.levels, DEFAULT_GRID_DENSITY, &GOptions::default())?;
    let block = build_block(m, model, PhononBasis::new(a.nmax)?);
    let sys = eigen_decompose(&block)?;
    let validation = validate_roots(&mut roots, &sys, a.tol)?;
    let mut checks = vec![
        Check { name: "hermiticity", value: asymmetry(&block.matrix), limit: 1e-13 },
        Check {
            name: "doubling shift",
            value: sys.certificate.as_ref().map_or(f64::INFINITY, |c| c.max_shift_low),
            limit: 1e-8,
        },
        Check {
            name: "residual / |H|",
            value: sys.max_residual(&block.matrix) / block.matrix.norm(),
            limit: 1e-10,
        },
        Check { name: "orthogonality", value: sys.orthogonality_error(), limit: 1e-10 },
    ];
    let w = Window::new(roots.window.lo, roots.window.hi)?;
    let nearest = roots
        .energies()
        .iter()
        .map(|&e| gfun::nearest_pole_distance(e, model))
        .fold(f64::INFINITY, f64::min);
    let poles = all_poles(model, w).len();
    log::info!("sector {m}: {poles} poles in window, nearest root-pole distance {nearest:e}");
    checks.push(Check { name: "root-pole distance (inverted)", value: 1.0 / nearest, limit: 1e6 });

    let grid = TimeGrid::new(a.tmax, a.dt)?;
    let dyn_sys = diag::converged_eigensystem(m, model, diag::DEFAULT_NMAX, 3)?;
    let res = dynamics::evolve(&dyn_sys, &grid, DEFAULT_PROMINENCE)?;
    checks.push(Check { name: "norm conservation", value: res.max_norm_error(), limit: 1e-9 });
    checks.push(Check { name: "Parseval", value: res.spectrum.parseval_error(), limit: 1e-6 });

    let bare = model.with_eta(0.0);
    let static_sys = diag::eigen_decompose_uncertified(&build_block(m, &bare, PhononBasis::new(5)?))?;
    let mut expected: Vec<f64> = (0..=5)
        .flat_map(|n| [analytic::Branch::Minus, analytic::Branch::Plus].map(|b| analytic::dressed_energy(m, n, b, &bare)))
        .collect();
    expected.sort_by(f64::total_cmp);
    let dressed_err = static_sys
        .values
        .iter()
        .zip(&expected)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    checks.push(Check { name: "dressed energies", value: dressed_err, limit: 1e-10 });

    Ok(SectorOutcome { m, roots, validation, checks })
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("VIBRON_QED_THREADS") {
        let n: usize = v.parse().with_context(|| format!("VIBRON_QED_THREADS must be a positive integer (got {v:?})"))?;
        b = b.num_threads(n.max(1));
    }
    Ok(b.build()?)
}

pub fn validate(r: &Resolved, a: &ValidateArgs) -> Result<bool> {
    let sectors = a.sectors.iter().map(|&m| sector(m)).collect::<Result<Vec<_>>>()?;
    let model = &r.model;
    let outcomes = thread_pool()?.install(|| {
        sectors
            .par_iter()
            .map(|&m| validate_sector(m, model, a))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut all_ok = true;
    for o in &outcomes {
        print!("{}", report::render_validation(&o.validation, model));
        all_ok &= o.validation.passed();
        for c in &o.checks {
            let ok = c.passed();
            all_ok &= ok;
            println!(
                "  {} {:<30} {:.2e} (limit {:.0e})",
                if ok { "ok  " } else { "FAIL" },
                c.name,
                c.value,
                c.limit
            );
        }
        if let Some(dir) = &a.out {
            let m = o.m;
            write_atomic(dir, &format!("roots_m{m}.csv"), |f| report::write_roots(f, &o.roots, model))?;
        }
    }
    println!("{}", if all_ok { "validation passed" } else { "validation FAILED" });
    Ok(all_ok)
}
