//! `repvar`: dimension reports, sweeps, and construction/verification of
//! explicit representation points.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical unreliability
//! (unclear rank gap, residual above tolerance, disagreement), 4 solver
//! non-convergence.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use repvar::constructors::{deformation_point, ConstructionProblem};
use repvar::estimates::{epi_dimension_report, sweep, weil_dim_z1, write_csv, Grid};
use repvar::numerics::cocycle::cocycle_info;
use repvar::numerics::{
    commutant_dim, fixed_dim_numeric, invariants_dim_numeric, RepresentationPoint,
};
use repvar::{Error, FuchsianSignature, GroupDescriptor};

#[derive(Parser, Debug)]
#[command(
    name = "repvar",
    version,
    about = "Dimension estimates for representation varieties of Fuchsian groups in SO(p,q)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the Euler characteristic of a signature.
    Chi(SignatureArgs),
    /// Exact dimension report at one (p,q) or over a grid.
    Estimate(EstimateArgs),
    /// Check a representation file and compare its cocycle dimension with the count formula.
    Verify(VerifyArgs),
    /// Build a representation point from a problem file.
    Construct(ConstructArgs),
}

#[derive(Args, Debug, Clone)]
struct SignatureArgs {
    #[arg(long)]
    genus: u32,
    /// Comma-separated periods, e.g. 2,3,7.
    #[arg(long, value_delimiter = ',')]
    periods: Vec<u32>,
}

impl SignatureArgs {
    fn signature(&self) -> Result<FuchsianSignature, Error> {
        FuchsianSignature::new(self.genus, self.periods.clone())
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum VerifyFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    sig: SignatureArgs,
    #[arg(long, requires = "q", conflicts_with = "grid")]
    p: Option<usize>,
    #[arg(long, requires = "p")]
    q: Option<usize>,
    /// pmin:pmax:qmin:qmax, inclusive, points with p < q.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Representation point JSON file.
    #[arg(long)]
    rep: PathBuf,
    /// Expected genus; together with --periods it must match the file.
    #[arg(long)]
    genus: Option<u32>,
    #[arg(long, value_delimiter = ',', requires = "genus")]
    periods: Vec<u32>,
    /// Residual tolerance, overriding the one recorded in the file.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: VerifyFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    /// Construction problem JSON file.
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RankGap { .. } | Error::Residual { .. } | Error::Defective(_) => 3,
            Error::NoConvergence { .. } => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(format!("stdout: {e}"))),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn cmd_chi(args: &SignatureArgs) -> CmdResult {
    let sig = args.signature()?;
    println!("{}", sig.euler_char());
    Ok(())
}

fn cmd_estimate(args: &EstimateArgs) -> CmdResult {
    let sig = args.sig.signature()?;
    let out = args.out.as_deref();
    match (&args.grid, args.p, args.q) {
        (Some(grid), _, _) => {
            let grid = Grid::parse(grid)?;
            let result = sweep(&sig, &grid)?;
            for r in &result.reports {
                r.validate()?;
            }
            match args.format {
                Format::Json => emit(out, &to_json(&result)),
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&mut buf, &result.reports)?;
                    emit(out, &String::from_utf8(buf).expect("csv is utf-8"))?;
                    let s = &result.summary;
                    eprintln!(
                        "summary: points={} error_constant={} fit_holds={} inequality_true={} reduced_true={} verdicts_agree={}",
                        s.points, s.error_constant, s.fit_holds, s.inequality_true, s.reduced_true, s.verdicts_agree
                    );
                    Ok(())
                }
            }
        }
        (None, Some(p), Some(q)) => {
            let report = epi_dimension_report(&sig, p, q)?;
            report.validate()?;
            match args.format {
                Format::Json => emit(out, &to_json(&report)),
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&mut buf, std::slice::from_ref(&report))?;
                    emit(out, &String::from_utf8(buf).expect("csv is utf-8"))
                }
            }
        }
        _ => Err(Failure::input(
            "estimate needs either --p and --q or --grid",
        )),
    }
}

#[derive(Serialize)]
struct VerifyReport {
    signature: FuchsianSignature,
    p: usize,
    q: usize,
    tolerance: f64,
    max_residual: f64,
    fixed_dims: Vec<usize>,
    invariants_dim: usize,
    commutant_dim: usize,
    cocycle_dim: usize,
    /// Absent when no singular value was dropped (infinite ratio).
    cocycle_gap_ratio: Option<f64>,
    weil_z1: i64,
    agree: bool,
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let mut rep = RepresentationPoint::from_json(&read(&args.rep)?)?;
    if let Some(tol) = args.tol {
        rep = rep.with_tolerance(tol);
    }
    if let Some(genus) = args.genus {
        let expected = FuchsianSignature::new(genus, args.periods.clone())?;
        if &expected != rep.signature() {
            return Err(Failure::input(format!(
                "file holds a point for {}, not {expected}",
                rep.signature()
            )));
        }
    }
    rep.check()?;
    let space = rep.space();
    let sig = rep.signature().clone();
    let group = if space.q == 0 {
        GroupDescriptor::so(space.p)?
    } else {
        GroupDescriptor::so_pq(space.p, space.q)?
    };
    let fixed_dims = rep.images()[..sig.torsion_count()]
        .iter()
        .map(|s| fixed_dim_numeric(s, &space))
        .collect::<Result<Vec<_>, _>>()?;
    let invariants_dim = invariants_dim_numeric(&rep)?;
    let commutant = commutant_dim(&rep)?;
    let cocycle = cocycle_info(&rep)?;
    let weil = weil_dim_z1(&sig, &fixed_dims, invariants_dim, &group)?;
    let report = VerifyReport {
        signature: sig.clone(),
        p: space.p,
        q: space.q,
        tolerance: rep.tolerance(),
        max_residual: rep.residuals().max(),
        fixed_dims,
        invariants_dim,
        commutant_dim: commutant,
        cocycle_dim: cocycle.dim,
        cocycle_gap_ratio: cocycle
            .info
            .gap_ratio
            .is_finite()
            .then_some(cocycle.info.gap_ratio),
        weil_z1: weil,
        agree: cocycle.dim as i64 == weil,
    };
    let text = match args.format {
        VerifyFormat::Json => to_json(&report),
        VerifyFormat::Text => {
            let gap = report
                .cocycle_gap_ratio
                .map_or("inf".to_string(), |g| format!("{g:.3e}"));
            format!(
                "signature={} group={}\nmax_residual={:.3e} tolerance={:e}\nfixed_dims={:?}\ninvariants_dim={}\ncommutant_dim={}\ncocycle_dim={}, weil={}, {} (gap ratio {gap})\n",
                sig,
                group.label(),
                report.max_residual,
                report.tolerance,
                report.fixed_dims,
                report.invariants_dim,
                report.commutant_dim,
                report.cocycle_dim,
                report.weil_z1,
                if report.agree { "AGREE" } else { "DISAGREE" },
            )
        }
    };
    emit(args.out.as_deref(), &text)?;
    if report.agree {
        Ok(())
    } else {
        Err(Failure {
            code: 3,
            message: format!(
                "cocycle dimension {} differs from the count {}",
                report.cocycle_dim, report.weil_z1
            ),
        })
    }
}

fn cmd_construct(args: &ConstructArgs) -> CmdResult {
    let mut problem: ConstructionProblem = serde_json::from_str(&read(&args.problem)?)
        .map_err(|e| Failure::input(format!("problem file: {e}")))?;
    if let Some(seed) = args.seed {
        problem.seed = seed;
    }
    if let Some(tol) = args.tol {
        problem.tolerance = tol;
    }
    let built = deformation_point(&problem)?;
    let rep = &built.point;
    let alphabet = problem.signature.alphabet();
    let mut summary = format!(
        "constructed {} into SO({}) x SO({}) inside SO({},{})\n",
        problem.signature, problem.p, problem.q, problem.p, problem.q
    );
    for (i, s) in built.spectra_p.iter().enumerate() {
        summary += &format!(
            "spectrum {} on SO({}): {:?}\n",
            alphabet.name(i),
            problem.p,
            s.mult()
        );
    }
    for (i, s) in built.spectra_q.iter().enumerate() {
        summary += &format!(
            "spectrum {} on SO({}): {:?}\n",
            alphabet.name(i),
            problem.q,
            s.mult()
        );
    }
    let res = rep.residuals();
    let max = |v: &[f64]| v.iter().fold(0.0_f64, |a, &b| a.max(b));
    summary += &format!(
        "max residuals: relators {:.3e}, form {:.3e}, det {:.3e} (tolerance {:e})\n",
        max(&res.relators),
        max(&res.form),
        max(&res.det),
        rep.tolerance()
    );
    let json = rep.to_json() + "\n";
    match &args.out {
        Some(path) => {
            emit(Some(path), &json)?;
            summary += &format!("wrote {}\n", path.display());
            print!("{summary}");
        }
        None => {
            print!("{json}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn configure_threads() -> CmdResult {
    if let Ok(value) = std::env::var("REPVAR_THREADS") {
        let n: usize = value.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Failure::input(format!(
                "REPVAR_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::input(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Chi(args) => cmd_chi(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Construct(args) => cmd_construct(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
