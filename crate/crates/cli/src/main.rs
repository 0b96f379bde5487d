use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bohrlab::harness::{
    radius_table, run_campaign, run_sharpness_scan, write_table, CampaignConfig, OutputSpec, ParamGrid, ReportFormat,
    Suite,
};
use bohrlab::{solve_radius, FamilyKind, FamilyParams, PolyOrder, RootResult, DEFAULT_TOL};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Bohr operator toolkit: radius equations, verification campaigns and
/// sharpness scans.
#[derive(Parser)]
#[command(name = "bohrlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one radius equation.
    Solve(SolveArgs),
    /// Run a seeded verification campaign.
    Verify(VerifyArgs),
    /// Parameter scans.
    Scan {
        #[command(subcommand)]
        scan: ScanCommand,
    },
    /// Tabulate radii over a parameter grid.
    Table(TableArgs),
}

#[derive(Args)]
struct FamilyArgs {
    /// Coefficient-growth constant of the general family.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Domain parameter of the Ω_γ family.
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// ‖g'(0)‖ for the convex family; the disk radius of the quasi factor.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Polyanalytic order, or `inf`.
    #[arg(long, default_value = "2")]
    p: PolyOrder,
    /// Use the variant of the general equation without `k`.
    #[arg(long)]
    statement_form: bool,
}

impl FamilyArgs {
    fn params(&self) -> FamilyParams {
        FamilyParams {
            lambda: self.lambda,
            gamma: self.gamma,
            beta: self.beta,
            k: self.k,
            p: self.p,
            statement_form: self.statement_form,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// general_sc, omega_gamma, half_plane, convex_sub or starlike_sub.
    #[arg(long)]
    family: FamilyKind,
    #[command(flatten)]
    params: FamilyArgs,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    Algebra,
    Schwarz,
    Subordination,
    QuasiSubordination,
    VonNeumann,
    CoefficientBound,
    Polyanalytic,
    Composition,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    suite: SuiteName,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tol: Option<f64>,
    /// Report path; failed instances go to `<PATH>.failures/`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format; inferred from the extension of `--out` by default.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Comma-separated radii replacing the suite's default grid.
    #[arg(long, value_delimiter = ',')]
    r_grid: Option<Vec<f64>>,
    /// Allow radii beyond the suite's range.
    #[arg(long)]
    explore: bool,
    /// Radius family for the polyanalytic suite.
    #[arg(long, default_value = "general_sc")]
    family: FamilyKind,
    /// Bound M on the quasi-subordination factor.
    #[arg(long, default_value_t = 1.0)]
    bound: f64,
    #[command(flatten)]
    params: FamilyArgs,
}

#[derive(Subcommand)]
enum ScanCommand {
    /// M_r of the extremal Möbius map `(a + z)/(1 + a z)` around the
    /// threshold `1/(1 + 2a)`.
    Sharpness(SharpnessArgs),
}

#[derive(Args)]
struct SharpnessArgs {
    #[arg(long)]
    a: f64,
    #[arg(long, default_value_t = 0.3)]
    rmin: f64,
    #[arg(long, default_value_t = 0.4)]
    rmax: f64,
    #[arg(long, default_value_t = 101)]
    steps: usize,
    /// Write the scan to a file (CSV rows, or JSON by extension).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TableArgs {
    /// Comma-separated family tags, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    families: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<PolyOrder>>,
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Verify(args) => verify(args),
        Command::Scan {
            scan: ScanCommand::Sharpness(args),
        } => sharpness(args),
        Command::Table(args) => table(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn format_for(path: &Path, explicit: Option<FormatArg>) -> ReportFormat {
    explicit.map_or_else(|| ReportFormat::from_path(path), ReportFormat::from)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), |v| format!("{v:.15}"))
}

fn solve(args: SolveArgs) -> Result<bool> {
    let family = args.family.with_params(&args.params.params())?;
    let res: RootResult = solve_radius(&family, args.tol)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&res)?);
    } else {
        println!("family  {}", family.tag());
        println!("root    {}", opt(res.root));
        match res.bracket {
            Some(b) => println!("bracket [{:.15}, {:.15}]", b.lo, b.hi),
            None => println!("bracket none"),
        }
        println!("cap     {:.15}", res.cap);
        println!("radius  {:.15}", res.radius);
        println!("binding {}", res.binding());
    }
    Ok(true)
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let suite = match args.suite {
        SuiteName::Algebra => Suite::Algebra,
        SuiteName::Schwarz => Suite::Schwarz,
        SuiteName::Subordination => Suite::Subordination,
        SuiteName::QuasiSubordination => Suite::QuasiSubordination {
            bound: args.bound,
            beta: args.params.beta,
        },
        SuiteName::VonNeumann => Suite::VonNeumann,
        SuiteName::CoefficientBound => Suite::CoefficientBound,
        SuiteName::Polyanalytic => Suite::Polyanalytic {
            family: args.family.with_params(&args.params.params())?,
        },
        SuiteName::Composition => Suite::Composition,
    };
    let mut cfg = CampaignConfig::new(suite, args.trials, args.seed)?;
    if let Some(d) = args.dim {
        cfg.dim = d;
    }
    if let Some(n) = args.degree {
        cfg.degree = n;
    }
    if let Some(t) = args.tol {
        cfg.tolerance = t;
    }
    if let Some(grid) = args.r_grid {
        cfg.r_grid = grid;
    }
    cfg.explore = args.explore;
    if let Some(path) = &args.out {
        cfg.output = Some(OutputSpec::new(path, format_for(path, args.format)));
    } else if args.format.is_some() {
        bail!("--format needs --out");
    }

    let report = run_campaign(&cfg)?;
    if let Some(out) = &cfg.output {
        report
            .write(out)
            .with_context(|| format!("writing report to {}", out.path.display()))?;
    }
    let s = report.summary;
    println!(
        "{}: {} passed, {} failed, min margin {}, {:.2}s",
        report.suite,
        s.pass_count,
        s.fail_count,
        s.min_margin.map_or_else(|| "none".into(), |m| format!("{m:.3e}")),
        report.wall_time_secs
    );
    for t in report.failures() {
        let mut line = format!(
            "  trial {} (seed {}): margin {}",
            t.trial,
            t.instance_seed,
            t.worst_margin.map_or_else(|| "none".into(), |m| format!("{m:.3e}"))
        );
        if let Some(r) = t.worst_r {
            line.push_str(&format!(" at r = {r}"));
        }
        if let Some(e) = &t.error {
            line.push_str(&format!(", error: {e}"));
        }
        if let Some(f) = &t.instance_file {
            line.push_str(&format!(", instance {}", f.display()));
        }
        println!("{line}");
    }
    Ok(report.all_passed())
}

fn sharpness(args: SharpnessArgs) -> Result<bool> {
    let scan = run_sharpness_scan(args.a, args.rmin, args.rmax, args.steps)?;
    match &args.out {
        Some(path) if ReportFormat::from_path(path) == ReportFormat::Json => {
            std::fs::write(path, serde_json::to_string_pretty(&scan)? + "\n")?;
        }
        Some(path) => {
            let mut text = String::from("r,lo,hi,exceeds\n");
            for row in &scan.rows {
                text.push_str(&format!("{},{},{},{}\n", row.r, row.lo, row.hi, row.exceeds));
            }
            std::fs::write(path, text)?;
        }
        None if args.json => println!("{}", serde_json::to_string_pretty(&scan)?),
        None => {
            println!("r,lo,hi,exceeds");
            for row in &scan.rows {
                println!("{},{},{},{}", row.r, row.lo, row.hi, row.exceeds);
            }
        }
    }
    let summary = format!(
        "a = {}: first r with M_r > 1: {}; threshold {}; predicted 1/(1+2a) = {:.15}; {}",
        scan.a,
        scan.first_exceed.map_or_else(|| "none".into(), |r| r.to_string()),
        opt(scan.threshold),
        scan.predicted,
        if scan.pass { "match" } else { "MISMATCH" }
    );
    if args.json && args.out.is_none() {
        eprintln!("{summary}");
    } else {
        println!("{summary}");
    }
    Ok(scan.pass)
}

fn table(args: TableArgs) -> Result<bool> {
    let kinds: Vec<FamilyKind> = if args.families.iter().any(|f| f == "all") {
        FamilyKind::ALL.to_vec()
    } else {
        args.families
            .iter()
            .map(|f| f.parse())
            .collect::<std::result::Result<_, _>>()?
    };
    let mut grid = ParamGrid::default();
    if let Some(k) = args.k {
        grid.k = k;
    }
    if let Some(p) = args.p {
        grid.p = p;
    }
    if let Some(g) = args.gamma {
        grid.gamma = g;
    }
    if let Some(b) = args.beta {
        grid.beta = b;
    }
    if let Some(l) = args.lambda {
        grid.lambda = l;
    }
    let rows = radius_table(&grid.families(&kinds)?, args.tol)?;
    write_table(&rows, &args.out, format_for(&args.out, args.format))
        .with_context(|| format!("writing table to {}", args.out.display()))?;
    println!("{} rows written to {}", rows.len(), args.out.display());
    Ok(true)
}
