//! Command-line front end.
//!
//! Exit codes: `0` every check passed, `1` a mathematical or statistical check
//! failed (or output could not be written), `2` usage or configuration error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::densities::{
    beta_table, power_semicircle_cdf, power_semicircle_table, regularized_incomplete_beta,
    write_density_csv, PowerSemicircleParams,
};
use crate::error::Error;
use crate::exact::{format_rational, parse_rational, to_f64, Rational};
use crate::moments::{
    vandermonde_check, verify_theorem, BetaParams, DirichletParams, RwaSpec, DEFAULT_K_MAX,
};
use crate::sampling::{arcsin_rwa_batch, rwa_batch, RngStream, SampleBatch, WeightScheme};
use crate::stats::{histogram, ks_test, write_histogram_csv, DEFAULT_KS_ALPHA};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rwa",
    version,
    about = "Exact and Monte Carlo checks for randomly weighted averages of Beta variables"
)]
struct Cli {
    /// Flat `key = value` file whose entries act as flags; explicit flags win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare the composition-sum moments of Z with the Beta target exactly.
    VerifyMoments(VerifyArgs),
    /// Check the multinomial rising-factorial identity for a list of shapes.
    Vandermonde(VandermondeArgs),
    /// Draw a reproducible batch of Z (or a histogram of it).
    Simulate(SimulateArgs),
    /// Kolmogorov–Smirnov test of sampled Z against its closed-form law.
    KsTest(KsArgs),
    /// Tabulate x, pdf, cdf on an interior grid.
    DensityTable(DensityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// Uniform components, Dirichlet(2, ..., 2) weights.
    Corollary1,
    /// Arcsine components, Dirichlet(1, ..., 1) weights.
    Corollary2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Weights {
    Gamma,
    Spacings,
}

#[derive(Debug, Args)]
struct SpecArgs {
    #[arg(long, value_enum)]
    preset: Option<Preset>,

    /// Beta components as `n,m;n,m;...` with rational entries such as `1/2`.
    #[arg(long)]
    components: Option<String>,

    /// Dirichlet parameters `a1,a2,...`; defaults to `n_j + m_j`.
    #[arg(long = "alpha-weights")]
    alpha_weights: Option<String>,

    /// Number of components for presets.
    #[arg(long)]
    r: Option<usize>,

    /// Half-width of the symmetric support for the arcsine preset.
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct VerifyArgs {
    #[command(flatten)]
    spec: SpecArgs,

    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    kmax: usize,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct VandermondeArgs {
    /// Positive rational shapes `n1,n2,...`.
    #[arg(long, allow_hyphen_values = true)]
    shapes: Option<String>,

    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    kmax: usize,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct SimulateArgs {
    #[command(flatten)]
    spec: SpecArgs,

    #[arg(long)]
    n: usize,

    #[arg(long, default_value_t = 1)]
    seed: u64,

    #[arg(long, default_value_t = 0)]
    stream: u64,

    /// Weight sampler for the arcsine preset.
    #[arg(long, value_enum, default_value_t = Weights::Spacings)]
    weights: Weights,

    /// Emit a histogram with this many bins instead of raw values.
    #[arg(long)]
    bins: Option<usize>,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct KsArgs {
    #[command(flatten)]
    spec: SpecArgs,

    #[arg(long, default_value_t = 100_000)]
    n: usize,

    #[arg(long, default_value_t = 1)]
    seed: u64,

    #[arg(long, default_value_t = 0)]
    stream: u64,

    #[arg(long, default_value_t = DEFAULT_KS_ALPHA)]
    alpha: f64,

    #[arg(long, value_enum, default_value_t = Weights::Spacings)]
    weights: Weights,

    /// Override the reference law with `Beta(n, m)` (given as `n,m`),
    /// placed on the support of the sample.
    #[arg(long)]
    target: Option<String>,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct DensityArgs {
    /// Power semicircle shape λ.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,

    /// Component count; sets λ = (r - 1) / 2.
    #[arg(long)]
    r: Option<usize>,

    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    a: f64,

    /// A single Beta law `n,m` on (0, 1) instead of a power semicircle.
    #[arg(long)]
    components: Option<String>,

    /// Number of interior grid points.
    #[arg(long, alias = "bins", default_value_t = 101)]
    points: usize,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ContractViolation(_) | Error::Domain(_) | Error::Parse(_) => {
                Failure::Usage(e.to_string())
            }
            Error::Io(_) | Error::Json(_) => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CmdResult = std::result::Result<bool, Failure>;

/// Parses `args` (including the program name) and runs one subcommand.
/// Reports go to `stdout` unless `--out` is given; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::VerifyMoments(a) => cmd_verify_moments(a, stdout, stderr),
        Command::Vandermonde(a) => cmd_vandermonde(a, stdout, stderr),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::KsTest(a) => cmd_ks_test(a, stdout, stderr),
        Command::DensityTable(a) => cmd_density_table(a, stdout),
    };
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_CHECK_FAILED
        }
    }
}

/// Splices `--config` file entries in front of the subcommand's own flags so
/// that explicit flags, parsed later, override them.
fn expand_config(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path: Option<OsString> = None;
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let text = arg.to_string_lossy();
        if text == "--config" {
            path = Some(iter.next().ok_or("--config needs a path")?);
        } else if let Some(p) = text.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let body = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let mut injected = Vec::new();
    for (lineno, line) in body.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or_else(|| format!("config line {}: expected key = value", lineno + 1))?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim().trim_matches('"');
        if key.is_empty() {
            return Err(format!("config line {}: empty key", lineno + 1));
        }
        injected.push(OsString::from(format!("--{key}")));
        injected.push(OsString::from(value));
    }
    if rest.len() < 2 {
        return Ok(rest);
    }
    let mut out: Vec<OsString> = rest[..2].to_vec();
    out.extend(injected);
    out.extend(rest.into_iter().skip(2));
    Ok(out)
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_list(s: &str) -> std::result::Result<Vec<Rational>, Failure> {
    let items: Vec<&str> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    if items.is_empty() {
        return Err(usage(format!("empty list {s:?}")));
    }
    items
        .into_iter()
        .map(|t| parse_rational(t).map_err(Failure::from))
        .collect()
}

fn parse_beta(s: &str) -> std::result::Result<BetaParams, Failure> {
    let pair = parse_list(s)?;
    match pair.as_slice() {
        [n, m] => Ok(BetaParams::new(n.clone(), m.clone())?),
        _ => Err(usage(format!("expected a shape pair n,m, got {s:?}"))),
    }
}

fn parse_components(s: &str) -> std::result::Result<Vec<BetaParams>, Failure> {
    let parts: Vec<&str> = s
        .split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    if parts.is_empty() {
        return Err(usage("no components given"));
    }
    parts.into_iter().map(parse_beta).collect()
}

/// What a spec flag set resolves to: the moment-level spec, plus the
/// symmetric half-width when the arcsine preset asks for samples on (-a, a).
struct Resolved {
    spec: RwaSpec,
    arcsine: Option<(usize, f64)>,
    label: String,
}

fn positive_r(r: Option<usize>) -> std::result::Result<usize, Failure> {
    match r {
        Some(0) => Err(usage("--r must be at least 1")),
        Some(r) => Ok(r),
        None => Err(usage("--r is required with --preset")),
    }
}

fn check_a(a: f64) -> std::result::Result<f64, Failure> {
    if a > 0.0 && a.is_finite() {
        Ok(a)
    } else {
        Err(usage(format!("--a must be positive, got {a}")))
    }
}

fn resolve_spec(args: &SpecArgs) -> std::result::Result<Resolved, Failure> {
    if args.preset.is_some() && args.components.is_some() {
        return Err(usage("use either --preset or --components, not both"));
    }
    if let Some(a) = args.a {
        check_a(a)?;
    }
    let resolved = match (args.preset, &args.components) {
        (Some(Preset::Corollary1), _) => {
            let r = positive_r(args.r)?;
            Resolved {
                spec: RwaSpec::corollary1(r)?,
                arcsine: None,
                label: format!("corollary1 r={r}"),
            }
        }
        (Some(Preset::Corollary2), _) => {
            let r = positive_r(args.r)?;
            let a = args.a.unwrap_or(1.0);
            Resolved {
                spec: RwaSpec::corollary2(r)?,
                arcsine: Some((r, a)),
                label: format!("corollary2 r={r} a={a}"),
            }
        }
        (None, Some(text)) => {
            let components = parse_components(text)?;
            if let Some(r) = args.r {
                if r != components.len() {
                    return Err(usage(format!(
                        "--r {r} disagrees with {} components",
                        components.len()
                    )));
                }
            }
            let spec = match &args.alpha_weights {
                Some(w) => RwaSpec::new(components, DirichletParams::new(parse_list(w)?)?)?,
                None => RwaSpec::coupled(components)?,
            };
            let label = spec.describe();
            Resolved {
                spec,
                arcsine: None,
                label,
            }
        }
        (None, None) => {
            if args.r == Some(0) {
                return Err(usage("--r must be at least 1"));
            }
            return Err(usage("give --preset or --components"));
        }
    };
    if args.preset.is_some() && args.alpha_weights.is_some() {
        return Err(usage("--alpha-weights only applies to --components"));
    }
    Ok(resolved)
}

fn open_output<'a>(
    path: &Option<PathBuf>,
    stdout: &'a mut dyn Write,
) -> std::io::Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

fn write_json<T: Serialize>(value: &T, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_verify_moments(
    args: &VerifyArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let resolved = resolve_spec(&args.spec)?;
    if args.kmax == 0 {
        return Err(usage("--kmax must be positive"));
    }
    let report = verify_theorem(&resolved.spec, args.kmax)?;
    let target = resolved.spec.target();
    let mut out = open_output(&args.output.out, stdout)?;
    match args.output.format.unwrap_or(Format::Json) {
        Format::Json => write_json(&report, &mut *out)?,
        Format::Csv => {
            writeln!(out, "# spec: {}", resolved.label)?;
            writeln!(out, "# target: {target}")?;
            writeln!(out, "k,direct,closed_form,equal")?;
            for k in 0..=report.k_max {
                writeln!(
                    out,
                    "{k},{},{},{}",
                    format_rational(&report.direct[k]),
                    format_rational(&report.closed_form[k]),
                    report.equal[k]
                )?;
            }
        }
    }
    out.flush()?;
    writeln!(
        stderr,
        "{}: moments 0..={} vs {target}: {}",
        resolved.label,
        report.k_max,
        if report.overall_pass {
            "equal"
        } else {
            "MISMATCH"
        }
    )?;
    Ok(report.overall_pass)
}

#[derive(Debug, Serialize)]
struct VandermondeReport {
    shapes: Vec<String>,
    k_max: usize,
    holds: Vec<bool>,
    pass: bool,
}

fn cmd_vandermonde(
    args: &VandermondeArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let text = args
        .shapes
        .as_deref()
        .ok_or_else(|| usage("--shapes is required"))?;
    let shapes = parse_list(text)?;
    let holds = (0..=args.kmax)
        .map(|k| vandermonde_check(&shapes, k))
        .collect::<crate::Result<Vec<bool>>>()?;
    let pass = holds.iter().all(|&h| h);
    let report = VandermondeReport {
        shapes: shapes.iter().map(format_rational).collect(),
        k_max: args.kmax,
        holds,
        pass,
    };
    let mut out = open_output(&args.output.out, stdout)?;
    match args.output.format.unwrap_or(Format::Json) {
        Format::Json => write_json(&report, &mut *out)?,
        Format::Csv => {
            writeln!(out, "# shapes: {}", report.shapes.join(","))?;
            writeln!(out, "k,holds")?;
            for (k, h) in report.holds.iter().enumerate() {
                writeln!(out, "{k},{h}")?;
            }
        }
    }
    out.flush()?;
    writeln!(
        stderr,
        "identity for k <= {}: {}",
        args.kmax,
        if pass { "holds" } else { "FAILS" }
    )?;
    Ok(pass)
}

fn scheme(w: Weights) -> WeightScheme {
    match w {
        Weights::Gamma => WeightScheme::Gamma,
        Weights::Spacings => WeightScheme::Spacings,
    }
}

fn draw_batch(
    resolved: &Resolved,
    n: usize,
    stream: &RngStream,
    weights: Weights,
) -> std::result::Result<SampleBatch, Failure> {
    Ok(match resolved.arcsine {
        Some((r, a)) => arcsin_rwa_batch(r, a, scheme(weights), n, stream)?,
        None => rwa_batch(&resolved.spec, n, stream),
    })
}

fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> CmdResult {
    let resolved = resolve_spec(&args.spec)?;
    if args.n == 0 {
        return Err(usage("--n must be positive"));
    }
    if args.bins == Some(0) {
        return Err(usage("--bins must be positive"));
    }
    let stream = RngStream::new(args.seed, args.stream);
    let batch = draw_batch(&resolved, args.n, &stream, args.weights)?;
    let mut out = open_output(&args.output.out, stdout)?;
    let format = args.output.format.unwrap_or(Format::Csv);
    match (args.bins, format) {
        (None, Format::Csv) => batch.write_csv(&mut out)?,
        (None, Format::Json) => write_json(&batch, &mut *out)?,
        (Some(bins), _) => {
            let (lo, hi) = batch.support;
            let table = histogram(batch.values(), bins, lo, hi)?;
            match format {
                Format::Csv => write_histogram_csv(
                    &mut out,
                    &[
                        ("description", batch.description.clone()),
                        ("seed", batch.seed.to_string()),
                        ("stream_id", batch.stream_id.to_string()),
                        ("generator", batch.generator.clone()),
                        ("n", batch.n.to_string()),
                    ],
                    &table,
                )?,
                Format::Json => write_json(&table, &mut *out)?,
            }
        }
    }
    out.flush()?;
    Ok(true)
}

fn cmd_ks_test(args: &KsArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let resolved = resolve_spec(&args.spec)?;
    if args.n < 1000 {
        return Err(usage(format!("--n must be at least 1000, got {}", args.n)));
    }
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(usage(format!(
            "--alpha must lie in (0, 1), got {}",
            args.alpha
        )));
    }
    let override_target = args.target.as_deref().map(parse_beta).transpose()?;
    let stream = RngStream::new(args.seed, args.stream);
    let batch = draw_batch(&resolved, args.n, &stream, args.weights)?;
    let (lo, hi) = batch.support;

    let (result, target_label) = match (&override_target, resolved.arcsine) {
        (Some(t), _) => {
            let (n, m) = t.to_f64();
            let cdf = |x: f64| regularized_incomplete_beta(n, m, (x - lo) / (hi - lo));
            (ks_test(batch.values(), cdf, args.alpha)?, t.to_string())
        }
        (None, Some((r, a))) => {
            let ps = PowerSemicircleParams::from_component_count(r, a)?;
            let cdf = |x: f64| power_semicircle_cdf(&ps, x);
            (
                ks_test(batch.values(), cdf, args.alpha)?,
                format!("power semicircle lambda={} a={a}", ps.lambda()),
            )
        }
        (None, None) => {
            let target = resolved.spec.target();
            let (n, m) = (to_f64(target.n()), to_f64(target.m()));
            let cdf = |x: f64| regularized_incomplete_beta(n, m, x);
            (
                ks_test(batch.values(), cdf, args.alpha)?,
                target.to_string(),
            )
        }
    };
    let mut out = open_output(&args.output.out, stdout)?;
    write_json(&result, &mut *out)?;
    out.flush()?;
    writeln!(
        stderr,
        "{} vs {target_label}: D={} p={} ({})",
        resolved.label,
        result.statistic,
        result.p_value,
        if result.pass { "accept" } else { "REJECT" }
    )?;
    Ok(result.pass)
}

fn cmd_density_table(args: &DensityArgs, stdout: &mut dyn Write) -> CmdResult {
    if args.points == 0 {
        return Err(usage("--points must be positive"));
    }
    let (rows, meta) = if let Some(text) = &args.components {
        if args.lambda.is_some() || args.r.is_some() {
            return Err(usage("--components excludes --lambda and --r"));
        }
        let p = parse_beta(text)?;
        (beta_table(&p, args.points), vec![("family", p.to_string())])
    } else {
        let a = check_a(args.a)?;
        let ps = match (args.lambda, args.r) {
            (Some(_), Some(_)) => return Err(usage("give --lambda or --r, not both")),
            (Some(lambda), None) => PowerSemicircleParams::new(lambda, a)?,
            (None, Some(r)) => PowerSemicircleParams::from_component_count(r, a)?,
            (None, None) => return Err(usage("give --lambda, --r or --components")),
        };
        (
            power_semicircle_table(&ps, args.points),
            vec![(
                "family",
                format!("power semicircle lambda={} a={}", ps.lambda(), ps.a()),
            )],
        )
    };
    let mut out = open_output(&args.output.out, stdout)?;
    match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => write_density_csv(&mut out, &meta, &rows)?,
        Format::Json => write_json(&rows, &mut *out)?,
    }
    out.flush()?;
    Ok(true)
}
