//! End-to-end link chains, the Monte Carlo sweep engine and result files.

mod chain;
mod config;
mod emit;
mod seed;
mod sweep;

pub use chain::{run_chain, Chain};
pub use config::{
    parse_range, ChainConfig, ChainKind, ChannelConfig, CodeSpec, ConfigFile, GridConfig, Points,
    SweepConfig, XAxis,
};
pub use emit::{
    emit, parse_csv, parse_symbol_grid, read_csv, render_svg, write_records, Format, Series,
};
pub use seed::trial_seed;
pub use sweep::{run_sweep, run_sweep_with_threads, threads_from_env, THREADS_ENV};
