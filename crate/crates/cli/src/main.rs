//! `contcalc`: derivatives, chain rules and fixed points of finite containers
//! from the command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad
//! input.

mod commands;
mod inputs;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use contcalc_core::Limits;

use commands::Opts;

#[derive(Parser)]
#[command(name = "contcalc", version, about = "Container calculus checks over finite groupoids")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the random catalog.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Depth bound for fixed points.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Size bound: largest bag for `check bag`, largest loaded groupoid otherwise.
    #[arg(long, global = true)]
    max_size: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Law {
    Sum,
    Leibniz,
    Adjunction,
    Chain,
    Mu,
    Bag,
}

#[derive(Subcommand)]
enum Command {
    /// Differentiate a signature or container file.
    Derive {
        /// Signature file or builtin (list, list2, tree, twisted).
        signature: String,
        #[arg(long)]
        index: Option<String>,
        /// Write the derivative here.
        #[arg(long)]
        out: Option<String>,
    },
    /// Check a law on the random catalog or on given files.
    Check {
        #[arg(value_enum)]
        law: Law,
        /// Catalog size.
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long)]
        lhs: Option<String>,
        #[arg(long)]
        rhs: Option<String>,
        #[arg(long)]
        index: Option<String>,
        #[arg(long)]
        counterexample: Option<String>,
        #[arg(long, default_value = "list")]
        signature: String,
    },
    /// Fixed point checks: In/Out, Rec and the μ-rule.
    Mu {
        #[arg(long, default_value = "list")]
        signature: String,
        #[arg(long)]
        index: Option<String>,
        /// all, in-out, rec or rule.
        #[arg(long, default_value = "all")]
        check: String,
    },
    /// Decompose a tree at a path and print the layers.
    Zipper {
        #[arg(long, default_value = "list")]
        signature: String,
        /// Tree literal such as `cons[cons[nil]]`.
        #[arg(long)]
        tree: String,
        /// Path literal such as `0.@0`.
        #[arg(long)]
        path: String,
        #[arg(long)]
        index: Option<String>,
    },
    /// Exhibit a failure of the strong chain rule (bz2 or twisted).
    Counterexample {
        #[arg(default_value = "bz2")]
        name: String,
    },
}

fn run(cli: &Cli) -> anyhow::Result<report::Report> {
    let mut limits = Limits::from_env();
    let bag = matches!(cli.command, Command::Check { law: Law::Bag, .. });
    if let (Some(n), false) = (cli.max_size, bag) {
        limits = limits.with_max_size(n);
    }
    let opts = Opts {
        seed: cli.seed,
        depth: cli.depth,
        max_size: cli.max_size,
        limits,
    };
    match &cli.command {
        Command::Derive { signature, index, out } => commands::derive(signature, index, out, &opts),
        Command::Check {
            law,
            count,
            lhs,
            rhs,
            index,
            counterexample,
            signature,
        } => match law {
            Law::Sum => commands::check_law("sum", &opts, *count, lhs, rhs, index),
            Law::Leibniz => commands::check_law("leibniz", &opts, *count, lhs, rhs, index),
            Law::Adjunction => commands::check_adjunction(&opts, *count),
            Law::Chain => commands::check_chain(&opts, *count, counterexample, lhs, rhs, index),
            Law::Mu => {
                let sig = inputs::signature(signature, &opts.limits)?;
                commands::mu("check mu", &sig, &opts, index, "all")
            }
            Law::Bag => commands::check_bag(&opts),
        },
        Command::Mu { signature, index, check } => {
            let sig = inputs::signature(signature, &opts.limits)?;
            commands::mu("mu", &sig, &opts, index, check)
        }
        Command::Zipper {
            signature,
            tree,
            path,
            index,
        } => {
            let sig = inputs::signature(signature, &opts.limits)?;
            commands::zipper(&sig, tree, path, index)
        }
        Command::Counterexample { name } => commands::counterexample(name, &opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rep) => {
            print!("{}", rep.render(cli.json));
            if rep.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
