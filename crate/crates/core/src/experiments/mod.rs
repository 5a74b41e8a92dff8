//! Parameter sweeps over (d, n, c, seed), their summaries, record files and
//! plots.

mod checks;
mod grid;
mod plot;
mod record;
mod summary;
mod sweep;

pub use checks::{ols_slope, power_average_slope, verification_suite, Check, SLOPE_SEEDS, SLOPE_SIZES, SLOPE_TOLERANCE};
pub use grid::{CRule, Cell, SweepGrid, CONFIG_KEYS};
pub use plot::{plot_risk_curves, render_risk_curves};
pub use record::{
    emit_csv, emit_json, emit_records, read_csv, read_json, read_records, sort_records, write_csv, RecordFormat,
    SweepRecord, VERSION,
};
pub use summary::{
    inconsistency_summary, spearman, spike_regime_summary, InconsistencySummary, MinRiskRow, SeedBand, SpikeRow,
    SpikeSummary,
};
pub use sweep::{run_cell, run_sweep, run_sweep_to, CERTIFICATE_BULK, WITNESS_SHAPE};
