use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flataff_cli::{exec, Command, CommandRequest, Options, Source};
use flataff::Strategy;

#[derive(Parser)]
#[command(name = "flataff", version, about = "Flat affine holonomy, Čech cohomology and obstruction ladders")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Built-in dataset name.
    #[arg(long, conflicts_with_all = ["input", "json"])]
    example: Option<String>,
    /// JSON input file (a payload or a dataset with a "payload" field).
    #[arg(long, alias = "nerve", conflicts_with = "json")]
    input: Option<PathBuf>,
    /// Inline JSON input.
    #[arg(long)]
    json: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    strategy: StrategyArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Sequential,
    Parallel,
    Auto,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check every relator maps to the identity.
    VerifyRep(Common),
    /// Invariants of the linear holonomy (or of the fiber module of a fibration).
    H0(Common),
    /// First cohomology of the linear holonomy (or of the fiber module).
    H1(Common),
    /// Radiance class of a representation, or radiance map of a fibration.
    Radiance(Common),
    /// Search gauge candidates for one mapping class A to class B.
    GaugeCheck(Common),
    /// Determinant test for a free abelian translation group.
    CompleteDet(Common),
    /// Validate fibration data.
    FibrationCheck(Common),
    /// Affinely-locally-trivial test (constant radiance map).
    AltCheck(Common),
    /// Action of ambient generators on fiber H¹.
    InducedAction {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        generator: Option<usize>,
    },
    /// Equivariance of the radiance map at sample points.
    Equivariance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        generator: Option<usize>,
    },
    /// Face closure and flatness of a nerve, system or ladder.
    CechValidate(Common),
    /// Čech cohomology dimensions (all degrees, or degree --k with a class basis).
    CechCohomology {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Solve δa = z.
    SolveCoboundary(Common),
    /// Defect cocycle of a gluing (or of one ladder level).
    Defect {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Run the obstruction ladder.
    Ladder(Common),
    /// Print a built-in dataset with its self-test.
    Example {
        /// Dataset name (alternatively --example NAME).
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn request(cmd: Cmd) -> (CommandRequest, Option<PathBuf>) {
    let mut opts = Options::default();
    let (command, common, name) = match cmd {
        Cmd::VerifyRep(c) => (Command::VerifyRep, c, None),
        Cmd::H0(c) => (Command::H0, c, None),
        Cmd::H1(c) => (Command::H1, c, None),
        Cmd::Radiance(c) => (Command::Radiance, c, None),
        Cmd::GaugeCheck(c) => (Command::GaugeCheck, c, None),
        Cmd::CompleteDet(c) => (Command::CompleteDet, c, None),
        Cmd::FibrationCheck(c) => (Command::FibrationCheck, c, None),
        Cmd::AltCheck(c) => (Command::AltCheck, c, None),
        Cmd::InducedAction { common, generator } => {
            opts.generator = generator;
            (Command::InducedAction, common, None)
        }
        Cmd::Equivariance { common, generator } => {
            opts.generator = generator;
            (Command::Equivariance, common, None)
        }
        Cmd::CechValidate(c) => (Command::CechValidate, c, None),
        Cmd::CechCohomology { common, k } => {
            opts.k = k;
            (Command::CechCohomology, common, None)
        }
        Cmd::SolveCoboundary(c) => (Command::SolveCoboundary, c, None),
        Cmd::Defect { common, level } => {
            opts.level = level;
            (Command::Defect, common, None)
        }
        Cmd::Ladder(c) => (Command::Ladder, c, None),
        Cmd::Example { name, common } => (Command::Example, common, name),
    };
    opts.strategy = match common.strategy {
        StrategyArg::Sequential => Strategy::Sequential,
        StrategyArg::Parallel => Strategy::Parallel,
        StrategyArg::Auto => Strategy::Auto,
    };
    let source = name
        .or(common.example)
        .map(Source::Example)
        .or(common.input.map(Source::Path))
        .or(common.json.map(Source::Inline));
    (CommandRequest { command, source, options: opts }, common.output)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (req, output) = request(cli.command);
    let out = exec(&req);
    if let Some(err) = out.report.get("error").and_then(|e| e.as_str()) {
        eprintln!("flataff {}: {err}", req.command.name());
    }
    let text = out.render();
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &text) {
                eprintln!("flataff: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(out.status.code() as u8)
}
