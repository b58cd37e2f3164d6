use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use kakutani::cover::{
    build_rho, iterate_primitive, matrix_json, rule_json, substitution_matrix, verify_cover,
};
use kakutani::discrepancy::{
    discrepancy_scan, growth_fit, loglog_svg, Grid, ScanOptions, DEFAULT_EXHAUSTIVE_LIMIT,
};
use kakutani::engine::{
    delone_points, patch_csv, patch_svg, point_set_csv, FlowTime, KakutaniRule, TileRecord,
    DEFAULT_MAX_TILES,
};
use kakutani::params::{
    commensurability_residual, detect_commensurability, solve_alpha, AlphaParam, RatioClass,
};
use kakutani::spectral::{
    classify_alpha, classify_spreadness, classify_three_interval, f_alpha_poly,
    solomon_verdict_with, DEFAULT_CYCLOTOMIC_BOUND,
};
use kakutani::{Error, VERSION};

const DEFAULT_MAX_DENOMINATOR: u32 = 1000;
const DEFAULT_SURVEY_LIMIT: u32 = 40;
const EXIT_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "kakutani",
    version,
    about = "Kakutani substitution tilings of the line: generation and spreadness classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Output format; not every command supports every format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest patch that may be materialized.
    #[arg(long, global = true, env = "KAKUTANI_MAX_TILES", default_value_t = DEFAULT_MAX_TILES)]
    max_tiles: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spread / NotSpread / Boundary verdict; the exit code is 0, 1 or 2.
    Classify(ClassifyArgs),
    /// Verdicts for every coprime n > m up to --max-n, plus the lattice case.
    Survey(SurveyArgs),
    /// α with log α / log(1−α) = n/m.
    SolveAlpha(RatioArg),
    /// Tiles (or left endpoints) of a patch of the semi-flow.
    Generate(GenerateArgs),
    /// Substitution matrix, characteristic polynomial and eigenvalues.
    Spectrum(SpectrumArgs),
    /// Anchored discrepancy series over a window grid.
    Discrepancy(DiscrepancyArgs),
    /// Verdict for the three-interval rule with loop lengths n ≥ m ≥ k.
    ThreeInterval(ThreeIntervalArgs),
    /// Exact comparison of the semi-flow with the primitive cover.
    VerifyCover(VerifyCoverArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct RatioArg {
    /// Commensurable ratio n/m.
    #[arg(long, value_parser = parse_ratio)]
    ratio: (u32, u32),
}

#[derive(Args, Debug, Clone, Serialize)]
struct ParamArgs {
    /// Commensurable ratio n/m (exact).
    #[arg(long, value_parser = parse_ratio, conflicts_with = "alpha", required_unless_present = "alpha")]
    ratio: Option<(u32, u32)>,
    /// α in (0, 1); its ratio class is detected heuristically.
    #[arg(long)]
    alpha: Option<f64>,
    /// Largest denominator tried when detecting the ratio class of --alpha.
    #[arg(long, default_value_t = DEFAULT_MAX_DENOMINATOR)]
    max_denominator: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ClassifyArgs {
    #[command(flatten)]
    param: ParamArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SurveyArgs {
    #[arg(long, default_value_t = 12)]
    max_n: u32,
    /// Cap on --max-n.
    #[arg(long, env = "KAKUTANI_SURVEY_LIMIT", default_value_t = DEFAULT_SURVEY_LIMIT)]
    survey_limit: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GenerateArgs {
    #[command(flatten)]
    param: ParamArgs,
    /// Number of steps ℓ of length log(1/α)/n (needs a commensurable class).
    #[arg(long, conflicts_with = "t", required_unless_present = "t")]
    ell: Option<u32>,
    /// Flow time.
    #[arg(long)]
    t: Option<f64>,
    /// Place the support at [−offset·e^t, (1−offset)·e^t].
    #[arg(long, default_value_t = 0.5, conflicts_with = "anchored")]
    offset: f64,
    /// Start the support at 0 instead.
    #[arg(long)]
    anchored: bool,
    /// Label tiles by prototile, using the primitive cover (needs --ell).
    #[arg(long, requires = "ell")]
    labels: bool,
    /// Emit the left endpoints instead of the tiles.
    #[arg(long)]
    points: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    ratio: RatioArg,
    /// Largest j for which Φ_j is tried as an exact unit-circle factor.
    #[arg(long, default_value_t = DEFAULT_CYCLOTOMIC_BOUND)]
    cyclotomic_bound: u32,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum GridKind {
    Dyadic,
    Explicit,
}

#[derive(Args, Debug, Clone, Serialize)]
struct DiscrepancyArgs {
    #[command(flatten)]
    param: ParamArgs,
    /// Flow time of the scanned patch; defaults to log of the largest window.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, value_enum, default_value_t = GridKind::Dyadic)]
    grid: GridKind,
    #[arg(long, default_value_t = 4)]
    min_exp: u32,
    /// Defaults to the largest 2^e that fits in e^t.
    #[arg(long)]
    max_exp: Option<u32>,
    /// Comma-separated window sizes for --grid explicit.
    #[arg(long, value_delimiter = ',')]
    windows: Vec<f64>,
    /// Points scanned exhaustively before switching to sampled prefix counts.
    #[arg(long, env = "KAKUTANI_EXHAUSTIVE_LIMIT", default_value_t = DEFAULT_EXHAUSTIVE_LIMIT)]
    exhaustive_limit: u64,
    #[arg(long, default_value_t = 4096)]
    samples_per_window: u32,
    /// Also report discrepancy over all subintervals of each window.
    #[arg(long)]
    two_sided: bool,
    /// Attach the heuristic growth-model fit.
    #[arg(long)]
    fit: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ThreeIntervalArgs {
    /// Loop lengths n,m,k.
    #[arg(long, value_delimiter = ',', required = true)]
    lengths: Vec<u32>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct VerifyCoverArgs {
    #[command(flatten)]
    #[serde(flatten)]
    ratio: RatioArg,
    #[arg(long)]
    ell: u32,
}

fn parse_ratio(s: &str) -> Result<(u32, u32), String> {
    let (n, m) = s
        .split_once('/')
        .ok_or_else(|| format!("expected n/m, got {s:?}"))?;
    let n = n
        .trim()
        .parse()
        .map_err(|e| format!("bad n in {s:?}: {e}"))?;
    let m = m
        .trim()
        .parse()
        .map_err(|e| format!("bad m in {s:?}: {e}"))?;
    Ok((n, m))
}

enum Failure {
    Lib(Error),
    Usage(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(String, u8), Failure>;

/// Artifact framing: the version and the resolved config go into every output.
struct Frame {
    format: Format,
    config: Value,
}

impl Frame {
    fn header(&self) -> String {
        format!("{VERSION} config {}", self.config)
    }

    fn json(&self, result: Value) -> String {
        let doc = json!({ "version": VERSION, "config": self.config, "result": result });
        serde_json::to_string_pretty(&doc).unwrap() + "\n"
    }

    fn csv(&self, body: &str) -> String {
        format!("# {VERSION}\n# config {}\n{body}", self.config)
    }

    fn unsupported(&self, command: &str) -> Outcome {
        Err(Failure::Usage(format!(
            "{command} does not support --format {}",
            serde_json::to_value(self.format).unwrap().as_str().unwrap()
        )))
    }
}

fn resolve_class(p: &ParamArgs) -> Result<(f64, RatioClass), Failure> {
    match (p.ratio, p.alpha) {
        (Some((n, m)), _) => {
            let class = RatioClass::commensurable(n, m)?;
            let alpha = if (n, m) == (1, 1) {
                0.5
            } else {
                solve_alpha(n, m)?
            };
            Ok((alpha, class))
        }
        (None, Some(a)) => {
            let a = AlphaParam::normalized(a)?;
            let class = detect_commensurability(&a, p.max_denominator)?;
            Ok((a.value(), class))
        }
        (None, None) => Err(Failure::Usage(
            "one of --ratio or --alpha is required".into(),
        )),
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.10}")
}

fn run(cli: Cli) -> Outcome {
    let c = &cli.common;
    let frame = |command: &str, args: Value| Frame {
        format: c.format,
        config: json!({
            "command": command,
            "args": args,
            "format": c.format,
            "max_tiles": c.max_tiles,
        }),
    };
    match &cli.command {
        Command::Classify(a) => {
            let f = frame("classify", json!(a));
            let v = match (a.param.ratio, a.param.alpha) {
                (Some((n, m)), _) => classify_spreadness(&RatioClass::commensurable(n, m)?)?,
                (None, Some(x)) => classify_alpha(x, a.param.max_denominator)?,
                _ => unreachable!("clap enforces --ratio or --alpha"),
            };
            let code = v.verdict().exit_code() as u8;
            let body = match f.format {
                Format::Json => f.json(json!({
                    "verdict": v.verdict(),
                    "record": v.record(),
                    "cross_check": v.cross_check,
                    "class": v.class,
                    "spectral": v.spectral,
                })),
                Format::Csv => f.csv(&record_csv(&[v.record()])),
                Format::Svg => return f.unsupported("classify"),
            };
            Ok((body, code))
        }
        Command::Survey(a) => {
            let f = frame("survey", json!(a));
            if a.max_n == 0 || a.max_n > a.survey_limit {
                return Err(Failure::Usage(format!(
                    "--max-n must lie in 1..={}, got {}",
                    a.survey_limit, a.max_n
                )));
            }
            let mut rows = Vec::new();
            for n in 1..=a.max_n {
                for m in 1..=n {
                    if (n == 1 || m < n) && num_integer::gcd(n, m) == 1 {
                        rows.push(
                            classify_spreadness(&RatioClass::Commensurable { n, m })?.record(),
                        );
                    }
                }
            }
            let body = match f.format {
                Format::Json => f.json(json!({ "rows": rows })),
                Format::Csv => f.csv(&record_csv(&rows)),
                Format::Svg => return f.unsupported("survey"),
            };
            Ok((body, 0))
        }
        Command::SolveAlpha(a) => {
            let f = frame("solve-alpha", json!(a));
            let (n, m) = a.ratio;
            RatioClass::commensurable(n, m)?;
            let alpha = if (n, m) == (1, 1) {
                0.5
            } else {
                solve_alpha(n, m)?
            };
            let residual = commensurability_residual(alpha, n, m);
            let body = match f.format {
                Format::Json => {
                    f.json(json!({ "n": n, "m": m, "alpha": alpha, "residual": residual }))
                }
                Format::Csv => f.csv(&format!("n,m,alpha,residual\n{n},{m},{alpha},{residual}\n")),
                Format::Svg => return f.unsupported("solve-alpha"),
            };
            Ok((body, 0))
        }
        Command::Generate(a) => generate(&frame("generate", json!(a)), a, c.max_tiles),
        Command::Spectrum(a) => {
            let f = frame("spectrum", json!(a));
            let (n, m) = a.ratio.ratio;
            RatioClass::commensurable(n, m)?;
            let rule = build_rho(n, m)?;
            let mat = substitution_matrix(&rule);
            let report = solomon_verdict_with(&mat, a.cyclotomic_bound)?;
            let body = match f.format {
                Format::Json => f.json(json!({
                    "f_alpha": f_alpha_poly(n, m)?,
                    "rule": rule_json(&rule),
                    "matrix": matrix_json(&mat),
                    "report": report,
                })),
                Format::Csv => {
                    let mut s = String::from("re,im,modulus,residual\n");
                    for r in &report.roots {
                        writeln!(s, "{},{},{},{}", r.re, r.im, r.modulus, r.residual).unwrap();
                    }
                    f.csv(&s)
                }
                Format::Svg => return f.unsupported("spectrum"),
            };
            Ok((body, 0))
        }
        Command::Discrepancy(a) => discrepancy(&frame("discrepancy", json!(a)), a),
        Command::ThreeInterval(a) => {
            let f = frame("three-interval", json!(a));
            let [n, m, k] = a.lengths[..] else {
                return Err(Failure::Usage(
                    "--lengths takes exactly three values".into(),
                ));
            };
            let v = classify_three_interval(n, m, k)?;
            let code = v.verdict().exit_code() as u8;
            let body = match f.format {
                Format::Json => f.json(json!({ "verdict": v.verdict(), "report": v })),
                Format::Csv => f.csv(&format!(
                    "n,m,k,f,pv_family,solomon,verdict\n{n},{m},{k},{},{},{},{}\n",
                    v.f,
                    v.pv_family
                        .map(|p| serde_json::to_value(p).unwrap()["family"]
                            .as_str()
                            .unwrap()
                            .to_string())
                        .unwrap_or_default(),
                    v.spectral.solomon,
                    v.verdict()
                )),
                Format::Svg => return f.unsupported("three-interval"),
            };
            Ok((body, code))
        }
        Command::VerifyCover(a) => {
            let f = frame("verify-cover", json!(a));
            let (n, m) = a.ratio.ratio;
            let r = verify_cover(n, m, a.ell, c.max_tiles)?;
            let code = if r.agree { 0 } else { 1 };
            let body = match f.format {
                Format::Json => f.json(json!(r)),
                Format::Csv => f.csv(&format!(
                    "n,m,ell,flow_tiles,primitive_tiles,agree\n{n},{m},{},{},{},{}\n",
                    r.ell, r.flow_tiles, r.primitive_tiles, r.agree
                )),
                Format::Svg => return f.unsupported("verify-cover"),
            };
            Ok((body, code))
        }
    }
}

const RECORD_COLUMNS: [&str; 11] = [
    "n",
    "m",
    "r",
    "alpha",
    "lambda1",
    "lambda2_modulus",
    "unit_circle_factor",
    "ell",
    "solomon",
    "theorem_verdict",
    "reason",
];

fn record_csv(rows: &[Value]) -> String {
    let mut out = RECORD_COLUMNS.join(",") + "\n";
    for row in rows {
        let cells: Vec<String> = RECORD_COLUMNS
            .iter()
            .map(|k| match &row[*k] {
                Value::Null => String::new(),
                Value::Number(x) if x.is_f64() => fmt_f(x.as_f64().unwrap()),
                Value::String(s) => s.clone(),
                v => v.to_string(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn generate(f: &Frame, a: &GenerateArgs, max_tiles: u64) -> Outcome {
    let (alpha, class) = resolve_class(&a.param)?;
    let rule = KakutaniRule::from_class(alpha, &class)?;
    let time = match (a.ell, a.t) {
        (Some(l), _) => FlowTime::Steps(l),
        (None, Some(t)) => FlowTime::Real(t),
        _ => unreachable!("clap enforces --ell or --t"),
    };
    let mut patch = rule.patch(time, max_tiles)?;
    if !a.anchored {
        let off = a.offset;
        if !(off > 0.0 && off < 1.0) {
            return Err(Failure::Usage(format!(
                "--offset must lie in (0, 1), got {off}"
            )));
        }
        let shift = -off * patch.scale();
        patch = patch.with_origin(shift);
    }
    let mut records = patch.records();
    if a.labels {
        let RatioClass::Commensurable { n, m } = class else {
            return Err(Failure::Usage(
                "--labels needs a commensurable class".into(),
            ));
        };
        if (n, m) == (1, 1) {
            return Err(Failure::Usage(
                "--labels is not defined for the lattice case".into(),
            ));
        }
        let prim = iterate_primitive(&build_rho(n, m)?, a.ell.unwrap(), max_tiles)?;
        for (r, t) in records.iter_mut().zip(prim.tiles()) {
            r.label = Some(t.label);
        }
    }
    if a.points {
        let pts = delone_points(&patch);
        return Ok((
            match f.format {
                Format::Json => f.json(json!({ "window": pts.window(), "points": pts.points() })),
                Format::Csv => f.csv(&point_set_csv(&pts)),
                Format::Svg => {
                    let bars: Vec<TileRecord> = records
                        .iter()
                        .map(|r| TileRecord { label: None, ..*r })
                        .collect();
                    patch_svg(&bars, Some(&f.header()))
                }
            },
            0,
        ));
    }
    let body = match f.format {
        Format::Json => f.json(json!({
            "alpha": alpha,
            "class": class,
            "scale": patch.scale(),
            "support": patch.support(),
            "tiles": records,
        })),
        Format::Csv => f.csv(&patch_csv(&records)),
        Format::Svg => patch_svg(&records, Some(&f.header())),
    };
    Ok((body, 0))
}

fn discrepancy(f: &Frame, a: &DiscrepancyArgs) -> Outcome {
    let (alpha, class) = resolve_class(&a.param)?;
    let grid = match a.grid {
        GridKind::Dyadic => {
            let max_exp = match (a.max_exp, a.t) {
                (Some(e), _) => e,
                (None, Some(t)) if t > 0.0 => (t / std::f64::consts::LN_2 + 1e-9).floor() as u32,
                _ => {
                    return Err(Failure::Usage(
                        "--grid dyadic needs --t or --max-exp".into(),
                    ))
                }
            };
            Grid::Dyadic {
                min_exp: a.min_exp,
                max_exp,
            }
        }
        GridKind::Explicit => {
            if a.windows.is_empty() {
                return Err(Failure::Usage("--grid explicit needs --windows".into()));
            }
            Grid::Explicit {
                windows: a.windows.clone(),
            }
        }
    };
    let windows = grid.windows()?;
    let t = a.t.unwrap_or_else(|| windows.last().unwrap().ln());
    let opts = ScanOptions {
        exhaustive_limit: a.exhaustive_limit,
        samples_per_window: a.samples_per_window,
        two_sided: a.two_sided,
        ..ScanOptions::new(grid)
    };
    let series = discrepancy_scan(alpha, &class, t, &opts)?;
    let fit = if a.fit {
        Some(growth_fit(&series)?)
    } else {
        None
    };
    let body = match f.format {
        Format::Json => f.json(json!({ "series": series, "fit": fit })),
        Format::Csv => f.csv(&series.to_csv()),
        Format::Svg => loglog_svg(&series, Some(&f.header())),
    };
    Ok((body, 0))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(EXIT_ERROR),
            };
        }
    };
    let out = cli.common.out.clone();
    let (body, code) = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let written = match out {
        Some(p) => std::fs::write(p, body.as_bytes()),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(body.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {}", Failure::Io(e).message());
        return ExitCode::from(EXIT_ERROR);
    }
    ExitCode::from(code)
}

impl Failure {
    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Usage(s) => s.clone(),
            Failure::Io(e) => e.to_string(),
        }
    }
}
