//! `harmap`: solve, evaluate and verify radial minimizers from the shell.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 no minimizer exists for
//! the configuration, 3 a verification check failed.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use harmap_core::field::{self, PolarGrid};
use harmap_core::metric::parse_metric;
use harmap_core::solver::{self, critical_constant, critical_inner_radius};
use harmap_core::verify::{self, SuiteOptions};
use harmap_core::{CheckRecord, Error, MinimizerProfile, ProblemSpec, RadialMetric, SolverConfig};

const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "harmap", version, about = "Energy-minimal radial harmonic maps between annuli")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the minimizer and print its summary.
    Solve(Flags),
    /// Print the critical constant and the critical inner radius.
    Critical(Flags),
    /// Sample the minimizer on a polar grid.
    Eval(Flags),
    /// Run the verification suite; exits 3 if any check fails.
    Verify(Flags),
    /// Solve along a ladder of domain radii.
    Sweep(Flags),
}

#[derive(Debug, Clone, Args)]
struct Flags {
    /// euclidean, inverse_r, sphere, hyperbolic or power:<a>
    #[arg(long)]
    metric: Option<String>,
    /// Target inner radius.
    #[arg(long)]
    q: Option<f64>,
    /// Target outer radius.
    #[arg(long = "Q")]
    big_q: Option<f64>,
    /// Domain inner radius (outer radius 1).
    #[arg(long)]
    r: Option<f64>,
    /// Tie tolerance on c; for `verify`, check tolerances scale with tol / 1e-9.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long = "grid_s", default_value_t = 32)]
    grid_s: usize,
    #[arg(long = "grid_t", default_value_t = 64)]
    grid_t: usize,
    #[arg(long = "r_min")]
    r_min: Option<f64>,
    #[arg(long = "r_max")]
    r_max: Option<f64>,
    #[arg(long = "r_steps")]
    r_steps: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

enum Failure {
    Usage(String),
    Infeasible { critical_r: Option<f64> },
    ChecksFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BelowCritical { critical_r, .. } => Failure::Infeasible { critical_r },
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

impl Flags {
    fn metric(&self) -> std::result::Result<RadialMetric, Failure> {
        let spec = self.metric.as_deref().ok_or_else(|| missing("--metric"))?;
        Ok(parse_metric(spec)?)
    }

    fn target(&self) -> std::result::Result<(RadialMetric, f64, f64), Failure> {
        let metric = self.metric()?;
        let q = self.q.ok_or_else(|| missing("--q"))?;
        let big_q = self.big_q.ok_or_else(|| missing("--Q"))?;
        metric.check_range(q, big_q)?;
        Ok((metric, q, big_q))
    }

    fn spec(&self) -> std::result::Result<ProblemSpec, Failure> {
        let (metric, q, big_q) = self.target()?;
        let r = self.r.ok_or_else(|| missing("--r"))?;
        Ok(ProblemSpec::new(metric, q, big_q, r)?)
    }

    fn config(&self) -> std::result::Result<SolverConfig, Failure> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Failure::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        Ok(SolverConfig {
            tol_c: self.tol,
            seed: self.seed,
            ..SolverConfig::default()
        })
    }

    fn grid(&self, r: f64) -> std::result::Result<PolarGrid, Failure> {
        Ok(PolarGrid::new(self.grid_s, self.grid_t, r)?)
    }
}

fn missing(flag: &str) -> Failure {
    Failure::Usage(format!("missing required flag {flag}"))
}

/// Sends output to `--out` or stdout.
struct Sink(Option<PathBuf>);

impl Sink {
    fn emit(&self, text: &str) -> CmdResult {
        match &self.0 {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}")))
            }
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> CmdResult {
        let mut text = serde_json::to_string_pretty(value).expect("summaries always serialize");
        text.push('\n');
        self.emit(&text)
    }
}

// Seventeen significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Serialize)]
struct Summary {
    c: f64,
    hopf_constant: f64,
    variational_constant: f64,
    classification: &'static str,
    modulus_domain: f64,
    modulus_target: f64,
    energy: f64,
    energy_lower_bound: f64,
    lipschitz_sup: f64,
    lonorm_inf: f64,
    #[serde(rename = "K")]
    k: f64,
    #[serde(rename = "K_prime")]
    k_prime: f64,
    critical_c: f64,
    critical_r: Option<f64>,
}

fn summarize(profile: &MinimizerProfile) -> std::result::Result<Summary, Failure> {
    let (metric, q, big_q) = (profile.metric(), profile.q(), profile.big_q());
    let (lipschitz_sup, lonorm_inf) = field::lipschitz_constant(profile);
    let (k, k_prime) = field::kk_constants(profile)?;
    Ok(Summary {
        c: profile.c,
        hopf_constant: field::hopf_constant(profile),
        variational_constant: profile.c,
        classification: profile.classification.as_str(),
        modulus_domain: profile.spec.modulus_domain(),
        modulus_target: profile.spec.modulus_target(),
        energy: field::energy(profile)?,
        energy_lower_bound: 2.0 * metric.area(q, big_q)?,
        lipschitz_sup,
        lonorm_inf,
        k,
        k_prime,
        critical_c: profile.critical_c,
        critical_r: critical_inner_radius(metric, q, big_q)?,
    })
}

const SUMMARY_HEADER: &str =
    "c,hopf_constant,classification,modulus_domain,modulus_target,energy,energy_lower_bound,lipschitz_sup,lonorm_inf,K,K_prime,critical_c,critical_r";

fn summary_csv(s: &Summary) -> String {
    let fields = [
        num(s.c),
        num(s.hopf_constant),
        s.classification.to_string(),
        num(s.modulus_domain),
        num(s.modulus_target),
        num(s.energy),
        num(s.energy_lower_bound),
        num(s.lipschitz_sup),
        num(s.lonorm_inf),
        num(s.k),
        num(s.k_prime),
        num(s.critical_c),
        s.critical_r.map(num).unwrap_or_default(),
    ];
    format!("{SUMMARY_HEADER}\n{}\n", fields.join(","))
}

fn cmd_solve(flags: &Flags, sink: &Sink) -> CmdResult {
    let spec = flags.spec()?;
    let profile = solver::solve(&spec, &flags.config()?)?;
    let summary = summarize(&profile)?;
    match flags.format.unwrap_or(Format::Json) {
        Format::Json => sink.json(&summary),
        Format::Csv => sink.emit(&summary_csv(&summary)),
    }
}

#[derive(Debug, Serialize)]
struct CriticalOut {
    critical_c: f64,
    critical_r: Option<f64>,
}

fn cmd_critical(flags: &Flags, sink: &Sink) -> CmdResult {
    let (metric, q, big_q) = flags.target()?;
    let out = CriticalOut {
        critical_c: critical_constant(&metric, q, big_q)?,
        critical_r: critical_inner_radius(&metric, q, big_q)?,
    };
    match flags.format.unwrap_or(Format::Json) {
        Format::Json => sink.json(&out),
        Format::Csv => sink.emit(&format!(
            "critical_c,critical_r\n{},{}\n",
            num(out.critical_c),
            out.critical_r.map(num).unwrap_or_default()
        )),
    }
}

const EVAL_HEADER: &str = "s,t,re_w,im_w,re_wz,im_wz,re_wzb,im_wzb,jac,opnorm,lonorm,re_hopf,im_hopf";

#[derive(Debug, Serialize)]
struct EvalRow {
    s: f64,
    t: f64,
    re_w: f64,
    im_w: f64,
    re_wz: f64,
    im_wz: f64,
    re_wzb: f64,
    im_wzb: f64,
    jac: f64,
    opnorm: f64,
    lonorm: f64,
    re_hopf: f64,
    im_hopf: f64,
}

fn cmd_eval(flags: &Flags, sink: &Sink) -> CmdResult {
    let spec = flags.spec()?;
    let grid = flags.grid(spec.r)?;
    let profile = solver::solve(&spec, &flags.config()?)?;
    let rows: Vec<EvalRow> = field::export_grid(&profile, &grid)?
        .into_iter()
        .map(|x| EvalRow {
            s: x.s,
            t: x.t,
            re_w: x.w.re,
            im_w: x.w.im,
            re_wz: x.wz.re,
            im_wz: x.wz.im,
            re_wzb: x.wzb.re,
            im_wzb: x.wzb.im,
            jac: x.jac,
            opnorm: x.opnorm,
            lonorm: x.lonorm,
            re_hopf: x.hopf.re,
            im_hopf: x.hopf.im,
        })
        .collect();
    match flags.format.unwrap_or(Format::Csv) {
        Format::Json => sink.json(&rows),
        Format::Csv => {
            let mut text = String::with_capacity(rows.len() * 300);
            text.push_str(EVAL_HEADER);
            text.push('\n');
            for x in &rows {
                let values = [
                    x.s, x.t, x.re_w, x.im_w, x.re_wz, x.im_wz, x.re_wzb, x.im_wzb, x.jac, x.opnorm, x.lonorm,
                    x.re_hopf, x.im_hopf,
                ];
                let line: Vec<String> = values.iter().map(|v| num(*v)).collect();
                let _ = writeln!(text, "{}", line.join(","));
            }
            sink.emit(&text)
        }
    }
}

#[derive(Debug, Serialize)]
struct VerifyOut<'a> {
    checks: &'a [CheckRecord],
    all_passed: bool,
}

fn cmd_verify(flags: &Flags, sink: &Sink) -> CmdResult {
    let spec = flags.spec()?;
    if !(flags.tol > 0.0 && flags.tol.is_finite()) {
        return Err(Failure::Usage(format!("--tol must be positive, got {}", flags.tol)));
    }
    // The solver keeps its default tie tolerance; --tol only rescales the
    // check tolerances here.
    let config = SolverConfig {
        seed: flags.seed,
        ..SolverConfig::default()
    };
    let options = SuiteOptions {
        grid_s: flags.grid_s,
        grid_t: flags.grid_t,
        tolerance_scale: flags.tol / DEFAULT_TOL,
        ..SuiteOptions::default()
    };
    flags.grid(spec.r)?;
    let profile = solver::solve(&spec, &config)?;
    let report = verify::profile_report(&profile, &config, &options)?;
    let all_passed = report.all_passed();
    match flags.format.unwrap_or(Format::Json) {
        Format::Json => sink.json(&VerifyOut {
            checks: &report.checks,
            all_passed,
        })?,
        Format::Csv => {
            let mut text = String::from("name,measured,tolerance,passed,detail\n");
            for c in &report.checks {
                let _ = writeln!(
                    text,
                    "{},{},{},{},\"{}\"",
                    c.name,
                    num(c.measured),
                    num(c.tolerance),
                    c.passed,
                    c.detail.replace('"', "\"\"")
                );
            }
            sink.emit(&text)?;
        }
    }
    if all_passed {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}

const SWEEP_HEADER: &str = "r,c,classification,energy,lipschitz_sup,lonorm_inf,mod_domain,mod_target";

#[derive(Debug, Serialize)]
struct SweepRow {
    r: f64,
    c: Option<f64>,
    classification: &'static str,
    energy: Option<f64>,
    lipschitz_sup: Option<f64>,
    lonorm_inf: Option<f64>,
    mod_domain: Option<f64>,
    mod_target: Option<f64>,
}

fn sweep_row(metric: &RadialMetric, q: f64, big_q: f64, r: f64, config: &SolverConfig) -> std::result::Result<SweepRow, Failure> {
    let spec = ProblemSpec::new(metric.clone(), q, big_q, r)?;
    match solver::solve(&spec, config) {
        Ok(profile) => {
            let (sup, inf) = field::lipschitz_constant(&profile);
            Ok(SweepRow {
                r,
                c: Some(profile.c),
                classification: profile.classification.as_str(),
                energy: Some(field::energy(&profile)?),
                lipschitz_sup: Some(sup),
                lonorm_inf: Some(inf),
                mod_domain: Some(spec.modulus_domain()),
                mod_target: Some(spec.modulus_target()),
            })
        }
        Err(Error::BelowCritical { .. }) => Ok(SweepRow {
            r,
            c: None,
            classification: "none",
            energy: None,
            lipschitz_sup: None,
            lonorm_inf: None,
            mod_domain: None,
            mod_target: None,
        }),
        Err(e) => Err(e.into()),
    }
}

fn cmd_sweep(flags: &Flags, sink: &Sink) -> CmdResult {
    let (metric, q, big_q) = flags.target()?;
    let r_min = flags.r_min.ok_or_else(|| missing("--r_min"))?;
    let r_max = flags.r_max.ok_or_else(|| missing("--r_max"))?;
    let steps = flags.r_steps.ok_or_else(|| missing("--r_steps"))?;
    if !(r_min > 0.0 && r_min < r_max && r_max < 1.0) || steps < 2 {
        return Err(Failure::Usage(format!(
            "sweep needs 0 < r_min < r_max < 1 and r_steps >= 2 (got {r_min}, {r_max}, {steps})"
        )));
    }
    let config = flags.config()?;
    let rows = (0..steps)
        .map(|i| {
            let r = if i + 1 == steps {
                r_max
            } else {
                r_min + (r_max - r_min) * i as f64 / (steps - 1) as f64
            };
            sweep_row(&metric, q, big_q, r, &config)
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    match flags.format.unwrap_or(Format::Csv) {
        Format::Json => sink.json(&rows),
        Format::Csv => {
            let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
            let mut text = format!("{SWEEP_HEADER}\n");
            for row in &rows {
                let _ = writeln!(
                    text,
                    "{},{},{},{},{},{},{},{}",
                    num(row.r),
                    opt(row.c),
                    row.classification,
                    opt(row.energy),
                    opt(row.lipschitz_sup),
                    opt(row.lonorm_inf),
                    opt(row.mod_domain),
                    opt(row.mod_target)
                );
            }
            sink.emit(&text)
        }
    }
}

#[derive(Serialize)]
struct InfeasibleOut {
    error: &'static str,
    critical_r: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (flags, run): (&Flags, fn(&Flags, &Sink) -> CmdResult) = match &cli.command {
        Command::Solve(f) => (f, cmd_solve),
        Command::Critical(f) => (f, cmd_critical),
        Command::Eval(f) => (f, cmd_eval),
        Command::Verify(f) => (f, cmd_verify),
        Command::Sweep(f) => (f, cmd_sweep),
    };
    let sink = Sink(flags.out.clone());
    match run(flags, &sink) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible { critical_r }) => {
            let _ = sink.json(&InfeasibleOut {
                error: "BelowCritical",
                critical_r,
            });
            eprintln!("error: no radial minimizer exists for this configuration");
            ExitCode::from(2)
        }
        Err(Failure::ChecksFailed) => {
            eprintln!("error: verification failed");
            ExitCode::from(3)
        }
    }
}
