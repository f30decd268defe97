use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use davenport::cli::{
    cmd_bounds, cmd_check, cmd_compute, cmd_gn_domset, cmd_gn_expand, cmd_verify_table,
    resolve_cache_path, GlobalOpts,
};

/// Davenport constants of higher degree over Z_{n1} x ... x Z_{nb}.
#[derive(Parser)]
#[command(name = "davenport", version, about, max_term_width = 100)]
struct Cli {
    /// Emit a single JSON document instead of human-readable text
    #[arg(long, global = true)]
    json: bool,

    /// Result cache file (falls back to $DAVENPORT_CACHE)
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,

    /// Worker threads for the search
    #[arg(long, global = true, default_value_t = 1, value_name = "N")]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute D_m(ring) by certified exhaustive search
    Compute {
        /// Ring, written as "6" or "2x3x4"
        #[arg(long)]
        ring: String,
        /// Subset size m
        #[arg(long)]
        m: u64,
        /// Explicit search depth cap (required when no theorem cap applies)
        #[arg(long = "max-len", value_name = "LEN")]
        max_len: Option<u64>,
        /// Disable unit-permutation symmetry reduction
        #[arg(long = "no-symmetry")]
        no_symmetry: bool,
        /// Enumerate every maximum-length zero-free multiset
        #[arg(long = "all-witnesses")]
        all_witnesses: bool,
    },
    /// Show every applicable theorem-backed bound with its tag
    Bounds {
        /// Ring, written as "6" or "2x3x4"
        #[arg(long)]
        ring: String,
        /// Subset size m
        #[arg(long)]
        m: u64,
    },
    /// Decide whether a sequence is m-zero-free
    Check {
        /// Ring, written as "6" or "2x3x4"
        #[arg(long)]
        ring: String,
        /// Subset size m
        #[arg(long)]
        m: u64,
        /// Sequence: "1,1,4" for cyclic rings, "[1,0],[2,1]" for products
        #[arg(long)]
        seq: String,
    },
    /// Girard-Newton expansion utilities
    Gn {
        #[command(subcommand)]
        sub: GnCommand,
    },
    /// Recompute the built-in D_2 reference table and compare
    VerifyTable {
        /// Largest n to recompute (default 10, or 18 with --extended)
        #[arg(long = "max-n", value_name = "N")]
        max_n: Option<u64>,
        /// Include the slower rows with n > 10
        #[arg(long)]
        extended: bool,
    },
}

#[derive(Subcommand)]
enum GnCommand {
    /// Expand e_k in power sums p_1..p_k (k <= 20)
    Expand { k: u32 },
    /// Minimum dominating index set over that expansion (k <= 20)
    Domset { k: u32 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = GlobalOpts {
        json: cli.json,
        cache: resolve_cache_path(cli.cache),
        threads: cli.threads,
    };
    let code = match cli.command {
        Command::Compute {
            ring,
            m,
            max_len,
            no_symmetry,
            all_witnesses,
        } => cmd_compute(&ring, m, max_len, no_symmetry, all_witnesses, &g),
        Command::Bounds { ring, m } => cmd_bounds(&ring, m, &g),
        Command::Check { ring, m, seq } => cmd_check(&ring, m, &seq, &g),
        Command::Gn { sub } => match sub {
            GnCommand::Expand { k } => cmd_gn_expand(k, &g),
            GnCommand::Domset { k } => cmd_gn_domset(k, &g),
        },
        Command::VerifyTable { max_n, extended } => cmd_verify_table(max_n, extended, &g),
    };
    ExitCode::from(code as u8)
}
