mod commands;
mod random;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tucg::reductions::ReductionKind;
use tucg::{Error, ShiftMode};

#[derive(Parser)]
#[command(name = "tucg", version, about = "Exact solvers for totally unimodular congestion games")]
struct Cli {
    /// Print only the headline value instead of the full report.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Nash,
    Social,
}

impl From<ModeArg> for ShiftMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Nash => ShiftMode::Nash,
            ModeArg::Social => ShiftMode::Social,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum KindArg {
    PmNae2sat,
    PvcNae2sat,
    PmNae3satSocial,
}

impl From<KindArg> for ReductionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::PmNae2sat => ReductionKind::PmNae2sat,
            KindArg::PvcNae2sat => ReductionKind::PvcNae2sat,
            KindArg::PmNae3satSocial => ReductionKind::PmNae3satSocial,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Family {
    Interval,
    Digraph,
    Bipartite,
    Matroid,
}

#[derive(Subcommand)]
enum Command {
    /// Pure Nash equilibrium of a symmetric TU or matroid game.
    SolveNash {
        instance: PathBuf,
        /// Solve the maximum-cardinality variant under this shift.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Refuse instances whose constraint matrices are not TU.
        #[arg(long)]
        verify_tu: bool,
    },
    /// Social optimum of a symmetric TU or polymatroid game with weakly convex delays.
    SolveSocial {
        instance: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        verify_tu: bool,
    },
    /// Round-robin best-response dynamics.
    Dynamics {
        instance: PathBuf,
        /// Starting state; a feasible vertex per player when omitted.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Check whether a state is a pure Nash equilibrium.
    Verify {
        instance: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
    /// Exhaustive minimization of potential and social delay.
    Brute {
        instance: PathBuf,
        /// Also list every pure Nash equilibrium.
        #[arg(long)]
        all_nash: bool,
    },
    /// Build a hardness gadget game from a weighted SAT formula.
    GenReduction {
        formula: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Instance document destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the player/variable mapping.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Total unimodularity report for every player's constraint matrix.
    CheckTu { instance: PathBuf },
    /// Emit a random instance document.
    GenRandom {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "interval")]
        family: Family,
        #[arg(long, default_value_t = 2)]
        players: usize,
        #[arg(long, default_value_t = 4)]
        resources: usize,
        /// Give every player its own strategy space.
        #[arg(long)]
        asymmetric: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure categories, mapped onto exit codes.
pub enum Failure {
    Input(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Core(Error::Malformed(_)) => 1,
            Failure::Core(Error::Precondition(_) | Error::SizeCap(_)) => 2,
            Failure::Core(Error::Infeasible(_)) => 3,
            Failure::Core(Error::Invariant(_)) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let ctx = commands::Context { argv, quiet: cli.quiet };
    let result = match cli.command {
        Command::SolveNash {
            instance,
            mode,
            verify_tu,
        } => commands::solve(&ctx, &instance, false, mode.map(Into::into), verify_tu),
        Command::SolveSocial {
            instance,
            mode,
            verify_tu,
        } => commands::solve(&ctx, &instance, true, mode.map(Into::into), verify_tu),
        Command::Dynamics {
            instance,
            state,
            max_iters,
        } => commands::dynamics(&ctx, &instance, state.as_deref(), max_iters),
        Command::Verify { instance, state } => commands::verify(&ctx, &instance, &state),
        Command::Brute { instance, all_nash } => commands::brute(&ctx, &instance, all_nash),
        Command::GenReduction { formula, kind, out, map } => {
            commands::gen_reduction(&ctx, &formula, kind.into(), out.as_deref(), map.as_deref())
        }
        Command::CheckTu { instance } => commands::check_tu(&ctx, &instance),
        Command::GenRandom {
            seed,
            family,
            players,
            resources,
            asymmetric,
            out,
        } => random::generate(seed, family, players, resources, asymmetric)
            .map_err(Failure::from)
            .and_then(|doc| commands::emit(&doc, out.as_deref())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tucg: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
