use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use cuspcount_core::count::{count, CountOptions, CountResult};
use cuspcount_core::factors::{
    elliptic_edge_factor, flat_cycle_factor, flat_vertex_factor, quad_factor, theta, FlatVertexCase,
};
use cuspcount_core::families::decompose_families;
use cuspcount_core::lattice::LatticeVector;
use cuspcount_core::oracle::kontsevich;
use cuspcount_core::output::{emit_csv, emit_json, emit_svg, emit_table};
use cuspcount_core::problem::{parse_polygon_spec, validate_instance, Mode, ProblemInstance};

#[derive(Parser)]
#[command(name = "cuspcount", version, about = "Exact counts of unicuspidal and nodal curves via lattice paths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count curves through generic points for a Newton polygon and genus.
    Count(CountArgs),
    /// Evaluate the local cusp factors.
    Factors {
        #[command(subcommand)]
        which: FactorCommand,
    },
    /// Split the maximal-genus cuspidal count on triangle:D by skipped lattice points.
    Decompose {
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Genus-zero plane curve count from the associativity recursion.
    #[command(hide = true)]
    Oracle {
        #[arg(long)]
        d: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args)]
struct CountArgs {
    /// `triangle:d`, `rect:a,b`, or `poly:(x,y),(x,y),...`
    #[arg(long)]
    polygon: String,
    #[arg(long)]
    genus: u64,
    #[arg(long, default_value = "cuspidal")]
    mode: Mode,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Omit individual contributions.
    #[arg(long)]
    total_only: bool,
    /// Write one SVG drawing per contribution into this directory.
    #[arg(long, value_name = "DIR")]
    emit_svg: Option<PathBuf>,
    #[arg(long, value_name = "K")]
    max_paths: Option<u128>,
    #[arg(long, value_name = "K")]
    max_subdivisions: Option<usize>,
    /// Adds a rational to the total before the integrality check.
    #[arg(long, hide = true, value_name = "P/Q")]
    perturb_total: Option<BigRational>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Upper,
    Middle,
    Lower,
}

#[derive(Subcommand)]
enum FactorCommand {
    /// Elliptic edge weights theta(1..=max).
    Theta {
        #[arg(long)]
        max: u32,
    },
    /// Quadrangle factor for two edge vectors given as `x,y`.
    Quad {
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        a: LatticeVector,
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        b: LatticeVector,
    },
    FlatVertex {
        #[arg(long)]
        m1: u64,
        #[arg(long)]
        m2: u64,
        #[arg(long, value_enum)]
        case: CaseArg,
    },
    EllipticEdge {
        #[arg(long)]
        m: u32,
    },
    FlatCycle {
        #[arg(long)]
        mu: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        m1: u64,
        #[arg(long)]
        m2: u64,
        #[arg(long)]
        special_even: bool,
    },
}

fn parse_vector(s: &str) -> Result<LatticeVector, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let x = x.trim().parse().map_err(|e| format!("{e}"))?;
    let y = y.trim().parse().map_err(|e| format!("{e}"))?;
    Ok(LatticeVector::new(x, y))
}

/// An error with the process status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self { code, error: error.into() }
    }
}

fn validation(e: impl Into<anyhow::Error>) -> Failure {
    Failure::new(2, e)
}

fn io(e: anyhow::Error) -> Failure {
    Failure::new(1, e)
}

fn instance(spec: &str, genus: u64, mode: Mode) -> Result<ProblemInstance, Failure> {
    let polygon = parse_polygon_spec(spec).map_err(validation)?;
    validate_instance(&polygon, genus, mode).map_err(validation)
}

fn run_count(instance: &ProblemInstance, options: &CountOptions) -> Result<CountResult, Failure> {
    count(instance, options).map_err(|e| Failure::new(e.exit_code() as u8, e))
}

fn write_svgs(dir: &Path, result: &CountResult) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (i, c) in result.contributions.iter().enumerate() {
        let svg = emit_svg(&result.instance.polygon, &c.subdivision, &c.path.points, c.marking.as_ref());
        let file = dir.join(format!("contribution-{i:04}.svg"));
        fs::write(&file, svg).with_context(|| format!("writing {}", file.display()))?;
    }
    Ok(())
}

fn cmd_count(args: CountArgs) -> Result<(), Failure> {
    let inst = instance(&args.polygon, args.genus, args.mode)?;
    let options = CountOptions {
        threads: args.threads,
        include_contributions: !args.total_only || args.emit_svg.is_some(),
        max_paths: args.max_paths,
        max_subdivisions: args.max_subdivisions,
        perturbation: args.perturb_total,
    };
    let mut result = run_count(&inst, &options)?;
    if let Some(dir) = &args.emit_svg {
        write_svgs(dir, &result).map_err(io)?;
    }
    if args.total_only {
        result.contributions.clear();
    }
    let text = match args.format {
        Format::Json => emit_json(&result) + "\n",
        Format::Csv => emit_csv(&result).map_err(|e| io(e.into()))?,
        Format::Table => emit_table(&result),
    };
    print!("{text}");
    Ok(())
}

fn cmd_factors(which: FactorCommand) -> Result<(), Failure> {
    let value = match which {
        FactorCommand::Theta { max } => {
            let rows = (1..=max)
                .map(|m| theta(m).map(|t| json!({"m": m, "theta": t})))
                .collect::<Result<Vec<_>, _>>()
                .map_err(validation)?;
            json!(rows)
        }
        FactorCommand::Quad { a, b } => json!(quad_factor(a, b).map_err(validation)?),
        FactorCommand::FlatVertex { m1, m2, case } => {
            let case = match case {
                CaseArg::Upper => FlatVertexCase::Upper,
                CaseArg::Middle => FlatVertexCase::Middle,
                CaseArg::Lower => FlatVertexCase::Lower,
            };
            json!(flat_vertex_factor(m1, m2, case).map_err(validation)?.to_string())
        }
        FactorCommand::EllipticEdge { m } => json!(elliptic_edge_factor(m).map_err(validation)?.to_string()),
        FactorCommand::FlatCycle { mu, m, m1, m2, special_even } => {
            json!(flat_cycle_factor(mu, m, m1, m2, special_even).map_err(validation)?.to_string())
        }
    };
    println!("{value}");
    Ok(())
}

fn cmd_decompose(d: u64, threads: usize) -> Result<(), Failure> {
    if d < 3 {
        return Err(validation(anyhow!("decomposition needs d >= 3")));
    }
    let pa = (d - 1) * (d - 2) / 2;
    let inst = instance(&format!("triangle:{d}"), pa - 1, Mode::Cuspidal)?;
    let result = run_count(&inst, &CountOptions { threads, ..Default::default() })?;
    let table = decompose_families(&result, d).map_err(|e| Failure::new(4, e))?;
    println!("{}", serde_json::to_string_pretty(&table).expect("table serializes"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Count(args) => cmd_count(args),
        Command::Factors { which } => cmd_factors(which),
        Command::Decompose { d, threads } => cmd_decompose(d, threads),
        Command::Oracle { d } => {
            if d == 0 {
                Err(validation(anyhow!("degree must be positive")))
            } else {
                println!("{}", kontsevich(d));
                Ok(())
            }
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
