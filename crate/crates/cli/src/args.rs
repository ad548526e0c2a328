use clap::{Parser, Subcommand, ValueEnum};

use crate::render::Format;

#[derive(Debug, Parser)]
#[command(name = "lamelab", version, about = "Lamé curves with bad reduction over p-adic fields")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Primitive triples classifying Lamé curves of order n over C.
    Triples {
        #[arg(long)]
        order: u64,
    },
    /// Types with bad reduction, per prime.
    Bad {
        #[arg(long)]
        order: u64,
        #[arg(long)]
        prime: Option<u64>,
        /// Sweep bound; defaults to max(50, 2n).
        #[arg(long)]
        pmax: Option<u64>,
    },
    /// Solve φ_τ(ρ) = 0 for one type.
    Solve {
        #[arg(long)]
        order: u64,
        #[arg(long)]
        prime: u64,
        #[arg(long = "b")]
        b: u64,
        /// Frobenius orbit of the primitive d-th root of unity.
        #[arg(long, default_value_t = 0)]
        zeta_index: usize,
        #[arg(long, env = "LAMELAB_PRECISION", value_parser = clap::value_parser!(u32).range(1..=400))]
        precision: Option<u32>,
    },
    /// The bad-reduction table for a range of orders.
    Table {
        #[arg(long)]
        min: u64,
        #[arg(long)]
        max: u64,
    },
    /// Solve every type and cross-check the results.
    Verify {
        #[arg(long)]
        order: u64,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, env = "LAMELAB_PRECISION", value_parser = clap::value_parser!(u32).range(1..=400))]
        precision: Option<u32>,
    },
    /// Exact q-expansions.
    Series {
        #[arg(long, value_enum)]
        kind: SeriesKind,
        /// Number of coefficients.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..=2000))]
        terms: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeriesKind {
    Delta,
    J,
    E4,
}
