//! Run configuration, property suites and the commands behind the CLI.

mod commands;
mod config;
mod report;
pub mod sample;
mod verify;

pub use commands::{
    cmd_embed, cmd_enumerate, cmd_plotdata, write_enumeration_csv, write_text, EmbedRecord, EmbedSummary,
    EnumerationRow, PlotSeries, Selector,
};
pub use config::{PsiChoice, RunConfig, Tolerances};
pub use report::{Environment, PropertyResult, Report};
pub use verify::{cmd_verify, verify_with_flow};
