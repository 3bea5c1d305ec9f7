//! Command-line front end: `check`, `reduce`, `integral`, `scan`, `conserve`.
//!
//! Exit codes: 0 success, 1 malformed input or other failure,
//! 2 resonance, 3 isolated singularity.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::algebra::{ParamScalar, Ring, Scalar};
use crate::diagnostics::scan::coordinate_f64;
use crate::diagnostics::{conservation_probe, scan, GridSpec, PointOutcome, ScanResult};
use crate::error::{Error, Result};
use crate::integral::{compute_first_integral, lie_derivative, verify_param_structure, FirstIntegral};
use crate::reduction::{reduce, Reduction, Verdict};
use crate::report;
use crate::system::{load_system, validate, AnySystem, SystemSpec};

pub const OUTPUT_DIR_ENV: &str = "FIRSTINT_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_RESONANCE: i32 = 2;
pub const EXIT_ISOLATED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "firstint", version, about = "Formal first integrals near nonisolated singularities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the spectrum and test nonisolatedness.
    Check(CommonArgs),
    /// Center curve, verdict and factored system.
    Reduce(CommonArgs),
    /// Formal first integral through degree N.
    Integral(IntegralArgs),
    /// Growth classification over a parameter grid.
    Scan(ScanArgs),
    /// Numerical conservation probe.
    Conserve(ConserveArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// System description (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Report path; defaults to $FIRSTINT_OUTPUT_DIR/<input stem>.<command>.json, else stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Override the truncation degree N.
    #[arg(long = "degree")]
    pub degree: Option<u32>,
    /// Override the coefficient ring (Q, Qi, Qt).
    #[arg(long)]
    pub ring: Option<Ring>,
}

#[derive(Debug, Clone, Args)]
pub struct IntegralArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Include wall-clock timing (makes reports run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Grid `t1=lo:hi:steps,t2=...` with exact endpoints.
    #[arg(long)]
    pub grid: String,
    /// Worker threads for grid points.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ConserveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Initial radii, comma separated; `10^x` is accepted.
    #[arg(long, value_delimiter = ',', default_values_t = ["10^-2".to_string(), "10^-2.5".to_string(), "10^-3".to_string()])]
    pub radii: Vec<String>,
    /// Integration horizon T.
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    /// Fixed step; defaults to T/2048.
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Check,
    Reduce,
    Integral,
    Scan,
    Conserve,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Check => "check",
            CommandKind::Reduce => "reduce",
            CommandKind::Integral => "integral",
            CommandKind::Scan => "scan",
            CommandKind::Conserve => "conserve",
        }
    }
}

/// Everything one invocation needs, independent of argument parsing.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub degree: Option<u32>,
    pub ring: Option<Ring>,
    pub grid: Option<String>,
    pub radii: Vec<f64>,
    pub horizon: f64,
    pub step: Option<f64>,
    pub jobs: usize,
    pub timing: bool,
}

fn parse_radius(s: &str) -> Result<f64> {
    let t = s.trim();
    let v = match t.strip_prefix("10^") {
        Some(e) => e.parse::<f64>().map(|e| 10f64.powf(e)),
        None => t.parse::<f64>(),
    }
    .map_err(|_| Error::parse("--radii", format!("`{t}` is not a number")))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::parse("--radii", format!("`{t}` must be positive")));
    }
    Ok(v)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let base = |command, c: CommonArgs| RunConfig {
            command,
            input: c.input,
            output: c.output,
            degree: c.degree,
            ring: c.ring,
            grid: None,
            radii: Vec::new(),
            horizon: 1.0,
            step: None,
            jobs: 1,
            timing: false,
        };
        let cfg = match cli.command {
            Command::Check(c) => base(CommandKind::Check, c),
            Command::Reduce(c) => base(CommandKind::Reduce, c),
            Command::Integral(a) => RunConfig {
                timing: a.timing,
                ..base(CommandKind::Integral, a.common)
            },
            Command::Scan(a) => RunConfig {
                grid: Some(a.grid),
                jobs: a.jobs.max(1),
                ..base(CommandKind::Scan, a.common)
            },
            Command::Conserve(a) => RunConfig {
                radii: a.radii.iter().map(|r| parse_radius(r)).collect::<Result<_>>()?,
                horizon: a.horizon,
                step: a.step,
                ..base(CommandKind::Conserve, a.common)
            },
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if self.input.as_os_str().is_empty() {
            return Err(Error::invalid("--input must not be empty"));
        }
        if self.output.as_ref().is_some_and(|p| p.as_os_str().is_empty()) {
            return Err(Error::invalid("--output must not be empty"));
        }
        if self.degree.is_some_and(|d| d < 2) {
            return Err(Error::invalid("--degree must be at least 2"));
        }
        Ok(())
    }

    /// Explicit `--output`, else the output directory from the environment,
    /// else `None` for standard output.
    pub fn output_path(&self) -> Option<PathBuf> {
        if let Some(p) = &self.output {
            return Some(p.clone());
        }
        let dir = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty())?;
        let stem = self
            .input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "report".into());
        Some(PathBuf::from(dir).join(format!("{stem}.{}.json", self.command.as_str())))
    }
}

/// Report plus optional CSV twin produced by one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub exit_code: i32,
    pub report: Value,
    pub csv: Option<String>,
    pub summary: String,
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::ResonanceViolation { .. } => EXIT_RESONANCE,
        Error::Isolated { .. } => EXIT_ISOLATED,
        _ => EXIT_FAILURE,
    }
}

fn error_object(e: &Error) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(e.kind()));
    obj.insert("message".into(), json!(e.to_string()));
    match e {
        Error::ResonanceViolation { witness } => {
            obj.insert("witness".into(), report::exponents(witness));
        }
        Error::Isolated { degree, witness } => {
            obj.insert("degree".into(), json!(degree));
            obj.insert("witness".into(), json!(witness));
        }
        Error::Parse { location, .. } => {
            obj.insert("location".into(), json!(location));
        }
        Error::NonVanishingOnCenter { degree } | Error::KernelComponentInRHS { degree } => {
            obj.insert("degree".into(), json!(degree));
        }
        _ => {}
    }
    Value::Object(obj)
}

/// Structured report for a failed run.
pub fn error_report(command: CommandKind, input: Option<&[u8]>, e: &Error) -> Value {
    let mut m = Map::new();
    m.insert("tool".into(), json!(report::TOOL));
    m.insert("version".into(), json!(report::VERSION));
    m.insert("command".into(), json!(command.as_str()));
    if let Some(bytes) = input {
        m.insert("input_sha256".into(), json!(report::sha256_hex(bytes)));
    }
    m.insert("error".into(), error_object(e));
    Value::Object(m)
}

struct Pipeline<'a, S: Scalar> {
    spec: &'a SystemSpec<S>,
    head: Map<String, Value>,
}

impl<'a, S: Scalar> Pipeline<'a, S> {
    fn new(cfg: &RunConfig, input: &[u8], spec: &'a SystemSpec<S>) -> Self {
        Self {
            spec,
            head: report::header(cfg.command.as_str(), input, S::RING, spec.truncation()),
        }
    }

    fn certify(&mut self) -> Result<()> {
        let cert = validate(self.spec)?;
        self.head.insert("certificate".into(), report::certificate(&cert));
        Ok(())
    }

    fn reduce(&mut self) -> Result<Reduction<S>> {
        self.certify()?;
        let red = reduce(self.spec)?;
        self.head.insert("verdict".into(), report::verdict(&red.verdict));
        Ok(red)
    }

    fn check(mut self) -> Result<RunOutput> {
        let red = self.reduce()?;
        let (exit_code, summary) = match &red.verdict {
            Verdict::NonIsolatedUpTo(n) => (EXIT_OK, format!("nonisolated through degree {n}")),
            Verdict::IsolatedAtDegree { degree, .. } => {
                (EXIT_ISOLATED, format!("isolated: f1 on the center curve is nonzero at degree {degree}"))
            }
        };
        Ok(RunOutput {
            exit_code,
            report: Value::Object(self.head),
            csv: None,
            summary,
        })
    }

    fn reduce_cmd(mut self) -> Result<RunOutput> {
        let red = self.reduce()?;
        self.head.insert(
            "phi".into(),
            Value::Array(red.curve.phi.iter().map(report::series).collect()),
        );
        let exit_code = match &red.factored {
            Some(fs) => {
                self.head.insert(
                    "F1".into(),
                    Value::Array(fs.f1().iter().map(report::series).collect()),
                );
                self.head.insert(
                    "F2".into(),
                    Value::Array(
                        fs.f2()
                            .iter()
                            .map(|row| Value::Array(row.iter().map(report::series).collect()))
                            .collect(),
                    ),
                );
                EXIT_OK
            }
            None => {
                self.head.insert("F1".into(), Value::Null);
                self.head.insert("F2".into(), Value::Null);
                EXIT_ISOLATED
            }
        };
        let summary = match &red.verdict {
            Verdict::NonIsolatedUpTo(n) => format!("reduced through degree {n}"),
            Verdict::IsolatedAtDegree { degree, .. } => format!("isolated at degree {degree}"),
        };
        Ok(RunOutput {
            exit_code,
            report: Value::Object(self.head),
            csv: None,
            summary,
        })
    }

    fn integral(&mut self, timing: bool) -> Result<(FirstIntegral<S>, crate::reduction::FactoredSystem<S>)> {
        let start = Instant::now();
        let red = self.reduce()?;
        red.verdict.clone().into_result()?;
        let fs = red.factored.expect("nonisolated verdict carries a factored system");
        let n = self.spec.truncation();
        let h = compute_first_integral(&fs, n)?;
        let elapsed = start.elapsed();

        let max_j = fs
            .f1()
            .iter()
            .chain(fs.f2().iter().flatten())
            .filter_map(|s| s.max_degree())
            .max()
            .unwrap_or(0);
        let up_to = n + max_j;
        let residual = lie_derivative(&h.components, &fs, up_to);
        if !residual.vanishes_through(n) {
            return Err(Error::invalid(format!(
                "internal check failed: X(H) is nonzero at degree {}",
                residual.first_nonzero().unwrap_or(0)
            )));
        }
        let per_degree: Map<String, Value> = residual
            .components
            .iter()
            .map(|(d, p)| (d.to_string(), json!(p.len())))
            .collect();
        self.head.insert(
            "residual".into(),
            json!({
                "vanishes_through": n,
                "checked_through": up_to,
                "first_nonzero_degree": residual.first_nonzero(),
                "nonzero_terms_by_degree": per_degree,
            }),
        );
        self.head.insert(
            "H".into(),
            json!({
                "literal": h.components.to_literal(),
                "components": h.components.components().map(report::homo).collect::<Vec<_>>(),
            }),
        );
        self.head.insert("small_divisors".into(), report::divisors(&h.divisors));
        if timing {
            self.head.insert("timing_ms".into(), report::float(elapsed.as_secs_f64() * 1e3));
        }
        Ok((h, fs))
    }

    fn finish_integral(self, h: &FirstIntegral<S>) -> RunOutput {
        let terms: usize = h.components.components().map(|c| c.len()).sum();
        RunOutput {
            exit_code: EXIT_OK,
            report: Value::Object(self.head),
            csv: None,
            summary: format!("first integral through degree {} with {terms} terms", h.truncation),
        }
    }
}

fn param_structure_json(h: &FirstIntegral<ParamScalar>) -> Value {
    let r = verify_param_structure(h);
    json!({
        "ok": r.ok(),
        "checked_coefficients": r.checked,
        "violations": r.violations.iter().map(|v| json!({
            "degree": v.degree,
            "monomial": report::exponents(&v.monomial),
            "coefficient": v.coefficient,
            "reason": v.reason,
        })).collect::<Vec<_>>(),
    })
}

fn scan_outputs(res: &ScanResult, params: usize) -> (Value, String) {
    let mut csv = String::new();
    let names: Vec<String> = (1..=params).map(|k| format!("t{k}")).collect();
    csv.push_str(&names.join(","));
    if params > 0 {
        csv.push(',');
    }
    csv.push_str("class,radius,min_divisor\n");
    let mut points = Vec::with_capacity(res.points.len());
    for p in &res.points {
        let coords: Vec<String> = p.t.iter().map(|q| report::format_float(coordinate_f64(q))).collect();
        let mut obj = Map::new();
        obj.insert("index".into(), json!(p.index));
        obj.insert("t".into(), json!(p.t.iter().map(|q| q.to_string()).collect::<Vec<_>>()));
        obj.insert(
            "t_float".into(),
            Value::Array(p.t.iter().map(|q| report::float(coordinate_f64(q))).collect()),
        );
        let (class, radius, min_div) = match &p.outcome {
            PointOutcome::Done { growth, min_divisor } => {
                obj.insert("status".into(), json!("ok"));
                obj.insert("class".into(), json!(growth.class.as_str()));
                obj.insert("radius".into(), report::opt_float(growth.radius));
                obj.insert("min_divisor".into(), report::opt_float(*min_divisor));
                obj.insert("slope".into(), report::opt_float(growth.slope));
                obj.insert("median_ratio".into(), report::opt_float(growth.median_ratio));
                obj.insert("window".into(), json!([growth.window.0, growth.window.1]));
                obj.insert(
                    "norms".into(),
                    Value::Array(growth.norms.iter().map(|(_, g)| report::float(*g)).collect()),
                );
                (
                    growth.class.as_str().to_string(),
                    growth.radius.map(report::format_float).unwrap_or_default(),
                    min_divisor.map(report::format_float).unwrap_or_default(),
                )
            }
            PointOutcome::Failed { kind, message } => {
                obj.insert("status".into(), json!("failed"));
                obj.insert("error".into(), json!({"kind": kind, "message": message}));
                ("failed".to_string(), String::new(), String::new())
            }
        };
        let mut row = coords;
        row.extend([class, radius, min_div]);
        csv.push_str(&row.join(","));
        csv.push('\n');
        points.push(Value::Object(obj));
    }
    let summary: Map<String, Value> = res
        .summary()
        .into_iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    (json!({"points": points, "summary": summary}), csv)
}

/// Run one configured command on already-read input bytes.
pub fn run_on_input(cfg: &RunConfig, input: &[u8]) -> Result<RunOutput> {
    let text = std::str::from_utf8(input).map_err(|e| Error::parse("input", e.to_string()))?;
    let system = load_system(text, cfg.ring, cfg.degree)?;
    match cfg.command {
        CommandKind::Check => match &system {
            AnySystem::Q(s) => Pipeline::new(cfg, input, s).check(),
            AnySystem::Qi(s) => Pipeline::new(cfg, input, s).check(),
            AnySystem::Qt(s) => Pipeline::new(cfg, input, s).check(),
        },
        CommandKind::Reduce => match &system {
            AnySystem::Q(s) => Pipeline::new(cfg, input, s).reduce_cmd(),
            AnySystem::Qi(s) => Pipeline::new(cfg, input, s).reduce_cmd(),
            AnySystem::Qt(s) => Pipeline::new(cfg, input, s).reduce_cmd(),
        },
        CommandKind::Integral => match &system {
            AnySystem::Q(s) => {
                let mut p = Pipeline::new(cfg, input, s);
                let (h, _) = p.integral(cfg.timing)?;
                Ok(p.finish_integral(&h))
            }
            AnySystem::Qi(s) => {
                let mut p = Pipeline::new(cfg, input, s);
                let (h, _) = p.integral(cfg.timing)?;
                Ok(p.finish_integral(&h))
            }
            AnySystem::Qt(s) => {
                let mut p = Pipeline::new(cfg, input, s);
                let (h, _) = p.integral(cfg.timing)?;
                p.head.insert("param_structure".into(), param_structure_json(&h));
                Ok(p.finish_integral(&h))
            }
        },
        CommandKind::Scan => {
            let AnySystem::Qt(family) = &system else {
                return Err(Error::invalid("scan needs a parametric system (ring Qt)"));
            };
            let grid_text = cfg
                .grid
                .as_deref()
                .ok_or_else(|| Error::invalid("scan needs --grid"))?;
            let grid = GridSpec::parse(grid_text)?;
            let mut p = Pipeline::new(cfg, input, family);
            p.reduce()?.verdict.into_result()?;
            let res = scan(family, &grid, cfg.jobs)?;
            let (body, csv) = scan_outputs(&res, family.params());
            p.head.insert(
                "grid".into(),
                Value::Array(
                    grid.axes
                        .iter()
                        .map(|a| json!({"param": a.param, "lo": a.lo.to_string(), "hi": a.hi.to_string(), "steps": a.steps}))
                        .collect(),
                ),
            );
            p.head.insert("scan".into(), body);
            let counts = res.summary();
            let summary = format!(
                "{} points: {} geometric, {} factorial-like, {} inconclusive, {} failed",
                res.points.len(),
                counts["geometric"],
                counts["factorial-like"],
                counts["inconclusive"],
                counts["failed"]
            );
            if res.all_failed() {
                return Err(Error::invalid(format!("every scan point failed; {summary}")));
            }
            Ok(RunOutput {
                exit_code: EXIT_OK,
                report: Value::Object(p.head),
                csv: Some(csv),
                summary,
            })
        }
        CommandKind::Conserve => {
            let AnySystem::Q(spec) = &system else {
                return Err(Error::invalid("conserve needs a rational system (ring Q)"));
            };
            let mut p = Pipeline::new(cfg, input, spec);
            let (h, fs) = p.integral(false)?;
            let probe = conservation_probe(&fs, &h, &cfg.radii, cfg.horizon, cfg.step, None)?;
            p.head.remove("H");
            p.head.remove("small_divisors");
            p.head.insert(
                "probe".into(),
                json!({
                    "horizon": report::float(cfg.horizon),
                    "step": report::float(probe.probes.first().map(|q| q.step).unwrap_or(cfg.horizon / 2048.0)),
                    "direction": probe.direction.iter().map(|x| report::float(*x)).collect::<Vec<_>>(),
                    "rows": probe.probes.iter().map(|q| json!({
                        "r": report::float(q.radius),
                        "drift": report::float(q.drift),
                    })).collect::<Vec<_>>(),
                    "slope": report::opt_float(probe.slope),
                    "fit_residual": report::opt_float(probe.fit_residual),
                    "target_slope": spec.truncation() + 1,
                }),
            );
            let summary = match probe.slope {
                Some(s) => format!("drift slope {s:.3} (target {})", spec.truncation() + 1),
                None => "drift slope undefined (zero drift)".to_string(),
            };
            Ok(RunOutput {
                exit_code: EXIT_OK,
                report: Value::Object(p.head),
                csv: None,
                summary,
            })
        }
    }
}

/// Write-temp-then-rename in the destination directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Run a configuration end to end, writing artifacts; returns the exit code.
pub fn execute(cfg: &RunConfig) -> i32 {
    let input = match std::fs::read(&cfg.input) {
        Ok(b) => b,
        Err(e) => {
            let err = Error::parse(cfg.input.display().to_string(), e.to_string());
            return emit_error(cfg, None, &err);
        }
    };
    match run_on_input(cfg, &input) {
        Ok(out) => match emit(cfg, &out) {
            Ok(()) => out.exit_code,
            Err(e) => emit_error(cfg, Some(&input), &e),
        },
        Err(e) => emit_error(cfg, Some(&input), &e),
    }
}

fn emit(cfg: &RunConfig, out: &RunOutput) -> Result<()> {
    let text = report::render(&out.report);
    match cfg.output_path() {
        Some(path) => {
            write_atomic(&path, &text)?;
            let mut written = vec![path.display().to_string()];
            if let Some(csv) = &out.csv {
                let csv_path = path.with_extension("csv");
                write_atomic(&csv_path, csv)?;
                written.push(csv_path.display().to_string());
            }
            println!("{}: {} [{}]", cfg.command.as_str(), out.summary, written.join(", "));
        }
        None => {
            print!("{text}");
            eprintln!("{}: {}", cfg.command.as_str(), out.summary);
        }
    }
    Ok(())
}

fn emit_error(cfg: &RunConfig, input: Option<&[u8]>, e: &Error) -> i32 {
    print!("{}", report::render(&error_report(cfg.command, input, e)));
    eprintln!("error: {e}");
    exit_code_for(e)
}

/// Parse arguments and run; the binary entry point.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match RunConfig::from_cli(cli) {
        Ok(cfg) => execute(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
