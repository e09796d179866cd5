//! Plain-text output: CSV tables with a fixed number format and a few
//! human-readable summaries.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), fields are
//! separated by `,`, lines end in `\n`, and each table starts with a header
//! row, so identical inputs produce byte-identical files.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::analytic::AnalyticReport;
use crate::diag::{EigenSystem, ValidationReport};
use crate::dynamics::{Peak, Spectrum, TimeGrid};
use crate::gfun::{ScanPoint, SpectrumResult};
use crate::model::{DerivedConstants, DimensionlessModel, ModelParams};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// `m,interval_index,E_over_hg,residual,oracle_E,abs_diff`; energies absolute.
pub fn write_roots<W: Write + ?Sized>(w: &mut W, res: &SpectrumResult, model: &DimensionlessModel) -> io::Result<()> {
    writeln!(w, "m,interval_index,E_over_hg,residual,oracle_E,abs_diff")?;
    for r in &res.roots {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            res.m,
            r.interval_index,
            num(model.absolute_energy(res.m, r.energy)),
            num(r.residual),
            opt(r.oracle.map(|e| model.absolute_energy(res.m, e))),
            opt(r.oracle.map(|e| (e - r.energy).abs())),
        )?;
    }
    Ok(())
}

/// `E,G_value,is_near_pole`; energies absolute, `G_value` empty where the
/// point sits on a pole.
pub fn write_scan<W: Write + ?Sized>(w: &mut W, m: usize, points: &[ScanPoint], model: &DimensionlessModel) -> io::Result<()> {
    writeln!(w, "E,G_value,is_near_pole")?;
    for p in points {
        writeln!(
            w,
            "{},{},{}",
            num(model.absolute_energy(m, p.energy)),
            opt(p.value),
            p.near_pole
        )?;
    }
    Ok(())
}

/// `m,index,E_over_hg,converged`; `converged` marks levels below the
/// reliability ceiling.
pub fn write_eigenvalues<W: Write + ?Sized>(w: &mut W, sys: &EigenSystem) -> io::Result<()> {
    writeln!(w, "m,index,E_over_hg,converged")?;
    for (k, e) in sys.absolute_values().iter().enumerate() {
        writeln!(w, "{},{},{},{}", sys.m, k, num(*e), sys.is_reliable(k))?;
    }
    Ok(())
}

pub fn write_time_series<W: Write + ?Sized>(w: &mut W, grid: &TimeGrid, population: &[f64], norm: &[f64]) -> io::Result<()> {
    writeln!(w, "t,P,norm")?;
    for ((t, p), n) in grid.times().zip(population).zip(norm) {
        writeln!(w, "{},{},{}", num(t), num(*p), num(*n))?;
    }
    Ok(())
}

pub fn write_spectrum<W: Write + ?Sized>(w: &mut W, spectrum: &Spectrum) -> io::Result<()> {
    writeln!(w, "omega0,abs_f")?;
    for (om, f) in spectrum.omega.iter().zip(spectrum.magnitudes()) {
        writeln!(w, "{},{}", num(*om), num(f))?;
    }
    Ok(())
}

pub fn peaks_json(peaks: &[Peak]) -> String {
    let mut s = serde_json::to_string_pretty(peaks).expect("peaks serialize");
    s.push('\n');
    s
}

pub fn render_params(p: &ModelParams, d: &DerivedConstants, model: &DimensionlessModel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "SI parameters");
    let _ = writeln!(s, "  mass               {:e} kg", p.mass_kg);
    let _ = writeln!(s, "  wavevector k       {:e} 1/m", p.wavevector);
    let _ = writeln!(s, "  emitter Omega      {:e} rad/s", p.omega_emitter);
    let _ = writeln!(s, "  cavity omega_a     {:e} rad/s", p.omega_cavity);
    let _ = writeln!(s, "  trap omega         {:e} rad/s", p.omega_trap);
    let _ = writeln!(s, "  coupling g         {:e} rad/s", p.coupling_g);
    let _ = writeln!(s, "derived");
    let _ = writeln!(s, "  alpha              {:e} m", d.alpha);
    let _ = writeln!(s, "  k*alpha            {:.12}", d.lamb_dicke);
    let _ = writeln!(s, "  chi                {:e} rad/s", d.chi);
    let _ = writeln!(s, "  eta                {:e} rad/s", d.eta);
    let _ = writeln!(s, "units of g");
    let _ = writeln!(s, "  omega/g            {:.12}", model.omega);
    let _ = writeln!(s, "  omega_a/g          {:.6}", model.omega_cavity);
    let _ = writeln!(s, "  (Omega-omega_a)/g  {:.12}", model.detuning());
    let _ = writeln!(s, "  chi/g              {:.12}   (~0.05)", model.chi);
    let _ = writeln!(s, "  eta/g              {:.12}   (~1/sqrt(2) = {:.6})", model.eta, std::f64::consts::FRAC_1_SQRT_2);
    s
}

pub fn render_analytic(r: &AnalyticReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "sector m = {}", r.m);
    let _ = writeln!(s, "  omega/g = {:.6}  chi/g = {:.6}  eta/g = {:.6}", r.omega, r.chi, r.eta);
    let _ = writeln!(s, "  mixing angle theta = {:.12}", r.theta);
    let _ = writeln!(s, "  dressed levels (E - (m+1) omega_a, units of g)");
    let _ = writeln!(s, "    {:>3} {:>2} {:>20} {:>12} {:>12}", "n", "br", "E", "amp_e", "amp_g");
    for l in &r.levels {
        let _ = writeln!(
            s,
            "    {:>3} {:>2} {:>20.12} {:>12.8} {:>12.8}",
            l.n,
            l.branch.symbol(),
            l.energy,
            l.amp_e,
            l.amp_g
        );
    }
    let _ = writeln!(s, "  intra-doublet splitting (formula)  {:.12}", r.rabi_splitting);
    let tp = &r.two_peak;
    let _ = writeln!(s, "  transition intensity mu           {:.12}", tp.mu);
    let _ = writeln!(s, "  hybrid energies E+ / E-           {:.12} / {:.12}", tp.e_plus, tp.e_minus);
    let _ = writeln!(s, "  predicted peaks omega+ / omega-   {:.12} / {:.12}", tp.omega_plus, tp.omega_minus);
    let _ = writeln!(s, "  centre / half-separation          {:.12} / {:.12}", tp.centre(), 0.5 * tp.separation());
    s
}

pub fn render_validation(v: &ValidationReport, model: &DimensionlessModel) -> String {
    let mut s = String::new();
    let abs = |e: f64| model.absolute_energy(v.m, e);
    let _ = writeln!(
        s,
        "sector {}: {} matched, max |diff| = {:e} (tol {:e}), ceiling {}",
        v.m,
        v.matched.len(),
        v.max_diff,
        v.tol,
        if v.ceiling.is_finite() { format!("{:.10}", abs(v.ceiling)) } else { v.ceiling.to_string() }
    );
    if let Some(w) = v.worst() {
        let _ = writeln!(s, "  worst: root {:.10} vs eigenvalue {:.10} (|diff| {:e})", abs(w.root), abs(w.eigenvalue), w.diff);
    }
    for r in &v.unmatched_roots {
        let _ = writeln!(s, "  unmatched root {:.10}", abs(*r));
    }
    for e in &v.unmatched_eigenvalues {
        let _ = writeln!(s, "  unmatched eigenvalue below ceiling {:.10} (missed or double root)", abs(*e));
    }
    if !v.above_ceiling.is_empty() {
        let _ = writeln!(s, "  {} eigenvalue(s) above the ceiling ignored", v.above_ceiling.len());
    }
    let _ = writeln!(s, "  {}", if v.passed() { "PASS" } else { "FAIL" });
    s
}
