use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pbisim::epsilon::Aggregation;
use pbisim::NormKind;

/// Exact and approximate bisimulation of probabilistic transition systems.
///
/// Exit status: 0 when the checked property holds, 1 when it does not,
/// 2 on malformed input, 3 when an exhaustive search exceeds its budget.
#[derive(Debug, Parser)]
#[command(name = "pbisim", version)]
pub struct Cli {
    /// Print the JSON report on standard output instead of a summary.
    #[arg(long, global = true)]
    pub json: bool,

    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether two systems are bisimilar.
    Bisim {
        /// First system file (`-` for standard input).
        p1: String,
        /// Second system file.
        p2: String,
        #[arg(long, default_value_t = pbisim::DEFAULT_TOL)]
        tol: f64,
    },
    /// Write the quotient of a system by a partition.
    Quotient {
        /// System file (`-` for standard input).
        system: String,
        /// Partition file with `block:` lines; its blocks must be lumpable.
        #[arg(long, value_name = "FILE", conflicts_with = "coarsest")]
        partition: Option<String>,
        /// Use the coarsest bisimulation (the default).
        #[arg(long)]
        coarsest: bool,
        #[arg(long, default_value_t = pbisim::DEFAULT_TOL)]
        tol: f64,
        /// Write the quotient here instead of standard output.
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Compute the approximate bisimilarity distance of two systems.
    Epsilon(EpsilonArgs),
    /// Check a simulation relation between two Kripke structures, or
    /// compute the largest one.
    SimCheck {
        /// Concrete structure.
        concrete: String,
        /// Abstract structure.
        #[arg(name = "abstract")]
        abs: String,
        /// Relation file with `concrete abstract` lines.
        #[arg(long, value_name = "FILE", conflicts_with = "largest")]
        relation: Option<String>,
        /// Compute the largest simulation (the default).
        #[arg(long)]
        largest: bool,
    },
    /// Verify a Galois connection and optionally whether its induced
    /// relation is a simulation basis for two Kripke structures.
    GaloisCheck {
        /// Galois connection file.
        galois: String,
        /// Concrete and abstract Kripke structures. Concrete state names
        /// must match the connection's concrete states and abstract state
        /// names its lattice elements.
        #[arg(long, num_args = 2, value_names = ["CONCRETE", "ABSTRACT"])]
        against: Option<Vec<String>>,
        /// Largest concrete carrier for powerset checks.
        #[arg(long, default_value_t = pbisim::galois::DEFAULT_POWERSET_CAP)]
        cap: usize,
    },
    /// Generate systems.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Args)]
pub struct EpsilonArgs {
    pub p1: String,
    pub p2: String,
    #[arg(long, default_value = "op-inf")]
    pub norm: NormKind,
    /// How per-action distances combine.
    #[arg(long, default_value = "max")]
    pub aggregation: Aggregation,
    /// Exhaustive enumeration (the default unless `--budget` is given).
    #[arg(long, conflicts_with_all = ["budget", "seed", "patience"])]
    pub exact: bool,
    /// Local search with this many evaluations; gives an upper bound.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Seed for local search.
    #[arg(long, requires = "budget")]
    pub seed: Option<u64>,
    /// Local-search evaluations without improvement before a restart.
    #[arg(long, requires = "budget")]
    pub patience: Option<u64>,
    /// Largest number of classification pairs an exhaustive run may visit.
    #[arg(long, default_value_t = pbisim::epsilon::DEFAULT_EXACT_BUDGET)]
    pub max_pairs: u64,
    /// Worker threads for exhaustive enumeration.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Only consider classifications lumpable on their own system.
    #[arg(long, conflicts_with = "budget")]
    pub lumpable_only: bool,
    #[arg(long, default_value_t = pbisim::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// A random system with dyadic probabilities.
    Random {
        #[arg(long)]
        states: usize,
        /// Comma-separated action names.
        #[arg(long, value_delimiter = ',', default_value = "a")]
        actions: Vec<String>,
        /// Probability that a (state, action) pair is enabled.
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// A system that lumps onto a given quotient.
    Planted {
        /// Quotient system file.
        quotient: String,
        /// Comma-separated number of copies of each quotient state.
        #[arg(long, value_delimiter = ',', required = true)]
        multiplicities: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
        /// Write the planted partition here.
        #[arg(long, value_name = "FILE")]
        truth: Option<PathBuf>,
    },
    /// Move a bounded amount of mass inside every enabled row.
    Perturb {
        system: String,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
}
