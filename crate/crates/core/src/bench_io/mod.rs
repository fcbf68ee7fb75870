//! Benchmark generators, the on-disk system format and CSV emission.

mod csv;
mod format;
mod gen;

pub use csv::{write_results_csv, SweepRow, SWEEP_HEADER};
pub use format::{parse_system, read_system, serialize_system, write_system, SystemFile};
pub use gen::{
    gen_msd, gen_paper_example, gen_rcl, paper_example_q_min, MsdParams, PaperExample, RclParams,
};
