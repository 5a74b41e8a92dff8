use std::fs::OpenOptions;
use std::path::Path;

use rayon::prelude::*;

use super::grid::{Cell, SweepGrid};
use super::record::{emit_records, sort_records, RecordFormat, SweepRecord, VERSION};
use crate::bump::{build_witness, eta_moments, witness_convention_norm, BumpShape};
use crate::error::{Error, Result};
use crate::geometry::{bulk_subset, sample_labeled, Domain, SeparationStats};
use crate::interpolant::{convention_norm, fit_min_norm};
use crate::kernel::KernelConfig;
use crate::risk::{holder_certificate, mc_risk_and_norm};

/// Fraction of the radii kept in the certificate's bulk index set.
pub const CERTIFICATE_BULK: f64 = 0.5;

/// Witness bumps are C^∞ so their convention norm is finite in every odd d.
pub const WITNESS_SHAPE: BumpShape = BumpShape::Smooth;

fn empty_record(grid: &SweepGrid, hash: &str, cell: &Cell) -> SweepRecord {
    SweepRecord {
        d: cell.d,
        n: cell.n,
        c: cell.c,
        c_ratio: cell.c_ratio,
        seed: cell.seed,
        f0: grid.f0,
        m_test: grid.m_test,
        risk_mean: None,
        risk_se: None,
        l2_fhat_mean: None,
        l2_fhat_se: None,
        l2_f0: None,
        convention_norm_fhat: None,
        witness_norm: None,
        certificate: None,
        sum_rd: None,
        pavg_m1: None,
        pavg_1: None,
        pavg_d: None,
        jitter_used: None,
        condition_estimate: None,
        residual_max: None,
        grid_hash: hash.to_string(),
        version: VERSION.to_string(),
        error: String::new(),
    }
}

fn fill(record: &mut SweepRecord, grid: &SweepGrid, cell: &Cell) -> Result<()> {
    let Cell { d, n, c, seed, .. } = *cell;
    let sample = sample_labeled(n, d, grid.f0, seed)?;
    let cfg = KernelConfig::scaled(d, c)?;
    let model = fit_min_norm(&cfg, &sample)?;
    let domain = Domain::unit_ball(d)?;
    let (risk, l2) = mc_risk_and_norm(&model, grid.f0, &domain, grid.m_test, seed)?;

    let stats = SeparationStats::compute(&sample.points, true)?;
    let profile = eta_moments(WITNESS_SHAPE, d)?;
    let witness = build_witness(&sample, &stats.radii, grid.alpha_witness, &profile)?;
    let clean = sample.with_targets(sample.points.rows().map(|x| grid.f0.eval(x)).collect())?;
    let proxy = build_witness(&clean, &stats.radii, grid.alpha_witness, &profile)?;
    let bulk = bulk_subset(&stats.radii, CERTIFICATE_BULK)?;
    let cert = holder_certificate(&model, &sample, &stats, &bulk.indices, &proxy)?;
    let diag = model.diagnostics();

    record.risk_mean = Some(risk.mean);
    record.risk_se = Some(risk.std_error);
    record.l2_fhat_mean = Some(l2.mean);
    record.l2_fhat_se = Some(l2.std_error);
    record.l2_f0 = Some(grid.f0.l2_norm_sq_on_ball(d));
    record.convention_norm_fhat = Some(convention_norm(&model));
    record.witness_norm = Some(witness_convention_norm(&witness, &cfg)?);
    record.certificate = Some(cert.value);
    record.sum_rd = Some(stats.sum_rd);
    record.pavg_m1 = stats.power_average(-1);
    record.pavg_1 = stats.power_average(1);
    record.pavg_d = stats.power_average(d as i32);
    record.jitter_used = Some(diag.jitter_used);
    record.condition_estimate = Some(diag.condition_estimate);
    record.residual_max = Some(diag.residual_max);
    Ok(())
}

/// Compute one cell. Failures come back as an error row, never a panic.
pub fn run_cell(grid: &SweepGrid, hash: &str, cell: &Cell) -> SweepRecord {
    let mut record = empty_record(grid, hash, cell);
    if let Err(e) = fill(&mut record, grid, cell) {
        record = SweepRecord {
            error: e.to_string(),
            ..empty_record(grid, hash, cell)
        };
    }
    record
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(Error::param("jobs", "must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))
}

/// All cells of `grid` on `jobs` workers, in canonical order. Record content
/// does not depend on `jobs`.
pub fn run_sweep(grid: &SweepGrid, jobs: usize) -> Result<Vec<SweepRecord>> {
    grid.validate()?;
    let hash = grid.hash();
    let cells = grid.cells();
    let mut records: Vec<SweepRecord> =
        pool(jobs)?.install(|| cells.par_iter().map(|cell| run_cell(grid, &hash, cell)).collect());
    sort_records(&mut records);
    Ok(records)
}

/// Run the sweep and write it to `out` (.csv or .json). The sink is opened
/// before any compute so an unwritable path fails fast.
pub fn run_sweep_to(grid: &SweepGrid, out: &Path, jobs: usize) -> Result<Vec<SweepRecord>> {
    RecordFormat::from_path(out)?;
    OpenOptions::new()
        .write(true)
        .create(true)
        .truncate(true)
        .open(out)
        .map_err(|e| Error::io(out, e))?;
    let records = run_sweep(grid, jobs)?;
    emit_records(&records, out)?;
    Ok(records)
}
