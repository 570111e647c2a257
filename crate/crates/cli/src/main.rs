//! `hllab` command-line driver.
//!
//! Exit codes: 0 success; 1 a verification check failed; 2 malformed input,
//! unknown suite or a critical/out-of-range weight; 3 a field that violates a
//! constraint (identically zero, not curl-free, or outside the annulus).

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hllab::field_lab::{quotient_grid, sharpness_study_with, SharpnessStudy};
use hllab::oracle_suite::{run_suite, AnnulusPotential, CartesianPotential, Suite, VerificationReport, DEFAULT_SEED};
use hllab::sharp_constants::{ConstantKind, SweepRow};
use hllab::weight_transforms::{PolarField, RadialProfile};
use hllab::{Error, ProblemKind, Weight};

#[derive(Parser, Debug)]
#[command(name = "hllab", version, about = "Sharp constants of curl-free Hardy and Rellich inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sharp constants at one weight.
    Constants(ConstantsArgs),
    /// Constants over a weight range.
    Sweep(SweepArgs),
    /// Quotients of the dilated test-field sequence and their extrapolated limit.
    Sharpness(SharpnessArgs),
    /// Quotient of a field or potential file against the sharp constant.
    Quotient(QuotientArgs),
    /// Run verification suites and emit the report JSON.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Hardy,
    Rellich,
}

impl Kind {
    fn problem(self) -> ProblemKind {
        match self {
            Kind::Hardy => ProblemKind::Hardy,
            Kind::Rellich => ProblemKind::Rellich,
        }
    }

    /// Constants reported for the kind: the Hardy family also carries the
    /// planar/divergence-free comparison constants.
    fn constants(self) -> &'static [ConstantKind] {
        match self {
            Kind::Hardy => &[ConstantKind::Hardy, ConstantKind::CostinMazya, ConstantKind::GhoussoubMoradifam],
            Kind::Rellich => &[ConstantKind::Rellich],
        }
    }
}

#[derive(Args, Debug)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_weight(s: &str) -> Result<Weight, Error> {
    s.parse()
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    /// Dimension N.
    #[arg(long = "N")]
    dimension: usize,
    /// Weight exponent, decimal or p/q.
    #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
    gamma: Weight,
    /// Restrict to one kind; all constants otherwise.
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long = "N")]
    dimension: usize,
    #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
    gamma_min: Weight,
    #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
    gamma_max: Weight,
    #[arg(long, value_parser = parse_weight)]
    step: Weight,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SharpnessArgs {
    #[arg(long = "N")]
    dimension: usize,
    #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
    gamma: Weight,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Angular mode of the test field; the minimizing mode by default.
    #[arg(long)]
    nu0: Option<usize>,
    /// Dilations, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
    n_list: Vec<f64>,
    /// Radial profile samples.
    #[arg(long, default_value_t = hllab::field_lab::REFERENCE_T_NODES)]
    resolution: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct QuotientArgs {
    /// JSON file: a polar field (`v_rho`, `v_theta1`), sampled Cartesian
    /// potential (`phi`) or annulus potential coefficients (`coefficients`).
    file: PathBuf,
    /// Dimension (polar fields only; potentials carry their own).
    #[arg(long = "N")]
    dimension: Option<usize>,
    #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
    gamma: Weight,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Cartesian step used to sample annulus potentials.
    #[arg(long, default_value_t = 0.02)]
    step: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run every suite.
    #[arg(long, conflicts_with = "suite")]
    all: bool,
    /// One of commutation, integral_identities, infimum, monotonicity, cartesian, all.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// `json` (default here) for the full reports, `csv` for a summary.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ZeroField | Error::CurlConstraintViolated { .. } | Error::Support(_) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, body)?,
        None => io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| fail(2, e.to_string()))?;
    for row in rows {
        w.write_record(&row).map_err(|e| fail(2, e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| fail(2, e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| fail(2, e.to_string()))
}

fn json_text<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| fail(2, e.to_string()))?;
    s.push('\n');
    Ok(s)
}

const SWEEP_HEADER: [&str; 7] = ["N", "gamma", "epsilon", "kind", "value", "argmin_nu", "branch"];

fn sweep_records(rows: &[SweepRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                r.dimension.to_string(),
                num(r.gamma),
                r.epsilon.map(num).unwrap_or_default(),
                r.kind.name().to_string(),
                r.value.map(num).unwrap_or_default(),
                r.argmin_nu.map(|n| n.to_string()).unwrap_or_default(),
                r.branch.clone(),
            ]
        })
        .collect()
}

fn write_rows(rows: &[SweepRow], output: &Output) -> Result<(), Failure> {
    let body = match output.format {
        Format::Csv => csv_text(&SWEEP_HEADER, sweep_records(rows))?,
        Format::Json => json_text(&rows)?,
    };
    emit(&output.out, &body)
}

fn cmd_constants(args: ConstantsArgs) -> Result<(), Failure> {
    let kinds: Vec<ConstantKind> = match args.kind {
        Some(k) => k.constants().to_vec(),
        None => ConstantKind::ALL.to_vec(),
    };
    let mut rows = Vec::new();
    for kind in kinds {
        match kind.compute(args.dimension, args.gamma.clone()) {
            Ok(r) => rows.push(SweepRow {
                dimension: args.dimension,
                gamma: args.gamma.value(),
                epsilon: Some(r.setup.epsilon),
                kind,
                value: Some(r.value),
                argmin_nu: r.argmin_nu,
                branch: r.branch.to_string(),
            }),
            // the divergence-free comparison constants are only defined on part of the range
            Err(Error::Domain(_)) if kind != ConstantKind::Hardy && kind != ConstantKind::Rellich => {}
            Err(e) => return Err(e.into()),
        }
    }
    write_rows(&rows, &args.output)
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let kinds: Vec<ConstantKind> = match args.kind {
        Some(k) => k.constants().to_vec(),
        None => ConstantKind::ALL.to_vec(),
    };
    let rows = hllab::sharp_constants::gamma_sweep(args.dimension, args.gamma_min, args.gamma_max, args.step, &kinds)?;
    write_rows(&rows, &args.output)
}

fn sharpness_body(study: &SharpnessStudy, format: Format) -> Result<String, Failure> {
    match format {
        Format::Csv => csv_text(
            &["n", "q_n", "limit_estimate", "target_constant", "relative_gap"],
            study.rows.iter().map(|r| {
                vec![num(r.n), num(r.q_n), num(r.limit_estimate), num(r.target_constant), num(r.relative_gap)]
            }),
        ),
        Format::Json => json_text(study),
    }
}

fn cmd_sharpness(args: SharpnessArgs) -> Result<(), Failure> {
    if args.resolution < 11 {
        return Err(fail(2, "resolution must be at least 11 samples"));
    }
    let study = sharpness_study_with(
        args.dimension,
        args.gamma,
        args.kind.problem(),
        &args.n_list,
        args.nu0,
        RadialProfile::bump(args.resolution),
    )?;
    emit(&args.output.out, &sharpness_body(&study, args.output.format)?)
}

fn cmd_quotient(args: QuotientArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.file).map_err(|e| fail(2, format!("{}: {e}", args.file.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| fail(2, format!("malformed JSON: {e}")))?;
    let kind = args.kind.problem();
    let (dimension, quotient) = if value.get("v_rho").is_some() {
        let field = PolarField::from_json(&text)?;
        let dimension = args.dimension.ok_or_else(|| fail(2, "--N is required for polar fields"))?;
        let setup = hllab::make_setup(dimension, args.gamma.clone(), kind)?;
        (dimension, quotient_grid(&field, &setup)?.value)
    } else if value.get("phi").is_some() {
        let p: CartesianPotential = serde_json::from_value(value).map_err(|e| fail(2, format!("malformed potential: {e}")))?;
        (p.dimension, hllab::oracle_suite::cartesian_quotient(&p, args.gamma.value(), kind)?)
    } else if value.get("coefficients").is_some() {
        let p: AnnulusPotential = serde_json::from_value(value).map_err(|e| fail(2, format!("malformed potential: {e}")))?;
        let sampled = p.sample(args.step)?;
        (p.dimension, hllab::oracle_suite::cartesian_quotient(&sampled, args.gamma.value(), kind)?)
    } else {
        return Err(fail(2, "file is neither a polar field nor a potential"));
    };
    if let Some(n) = args.dimension {
        if n != dimension {
            return Err(fail(2, format!("--N {n} does not match the file's dimension {dimension}")));
        }
    }
    let constant = match kind {
        ProblemKind::Hardy => hllab::sharp_constants::hardy_constant(dimension, args.gamma.clone())?,
        ProblemKind::Rellich => hllab::sharp_constants::rellich_constant(dimension, args.gamma.clone())?,
    }
    .value;
    let gap = if constant == 0.0 { quotient } else { (quotient - constant) / constant };
    let body = match args.output.format {
        Format::Csv => csv_text(&["N", "gamma", "kind", "quotient", "constant", "gap"], [vec![
            dimension.to_string(),
            num(args.gamma.value()),
            kind.name().to_string(),
            num(quotient),
            num(constant),
            num(gap),
        ]])?,
        Format::Json => json_text(&serde_json::json!({
            "N": dimension,
            "gamma": args.gamma.value(),
            "kind": kind.name(),
            "quotient": quotient,
            "constant": constant,
            "gap": gap,
        }))?,
    };
    emit(&args.output.out, &body)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let suite = match (args.all, args.suite.as_deref()) {
        (true, _) => Suite::All,
        (false, Some(name)) => name.parse::<Suite>()?,
        (false, None) => return Err(fail(2, "pass --all or --suite <name>")),
    };
    let reports: Vec<VerificationReport> = run_suite(suite, args.seed)?;
    let body = match args.format {
        Format::Json => json_text(&reports)?,
        Format::Csv => csv_text(
            &["check", "pass", "violations", "samples", "max_residual", "convergence_order"],
            reports.iter().map(|r| {
                vec![
                    r.check.clone(),
                    r.pass.to_string(),
                    r.violations.to_string(),
                    r.samples.to_string(),
                    r.residuals.iter().copied().reduce(f64::max).map(num).unwrap_or_default(),
                    r.convergence_order.map(num).unwrap_or_default(),
                ]
            }),
        )?,
    };
    emit(&args.out, &body)?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(fail(1, format!("{failed} of {} checks failed", reports.len())));
    }
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("HLLAB_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| fail(2, format!("HLLAB_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(fail(2, "HLLAB_THREADS must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| fail(2, e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match cli.command {
        Command::Constants(a) => cmd_constants(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Sharpness(a) => cmd_sharpness(a),
        Command::Quotient(a) => cmd_quotient(a),
        Command::Verify(a) => cmd_verify(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hllab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
