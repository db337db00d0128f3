//! Configuration, experiment orchestration, and CSV/JSON output.

mod config;
mod run;
mod table;

pub use config::{
    parse_config, Command, ConstantsBlock, ExperimentConfig, FillKind, GridBlock, InitialState, NonlinearityBlock,
    PotentialBlock, PotentialKind, RunBlock, ShiftProfile, FORMAT_VERSION,
};
pub use run::{configured_out_dir, input_hash, run_experiment, run_sweep, RunManifest, MANIFEST_FILE};
pub use table::{
    emit_results, Cell, CotangentRow, EtaOptimumRow, EvolutionRow, ExactRow, MeasuresRow, SpectrumRow, StateRow,
    TableRow,
};
