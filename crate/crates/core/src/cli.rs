//! Command-line front end: counting, density curves, simulation, lattice
//! counts, real-zero probabilities and the acceptance suite.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::counting;
use crate::density;
use crate::error::{Error, Result};
use crate::heights::{PNorm, WeightedHeight};
use crate::lattice::{self, BoxRegion, LpBall};
use crate::mcsim::{self, Source};
use crate::numerics::{IntegrationOptions, RngStream};
use crate::region::Region;
use crate::verify::{self, Budget};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "ALGCONJ_THREADS";

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "algconj",
    version,
    about = "Conjugate algebraic numbers, zero densities and lattice counts"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Worker threads (default: $ALGCONJ_THREADS or all cores).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Flat `key = value` file mirroring the flags; command-line flags win.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Write runtime fields as 0 so reruns are byte-identical.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Φ(Q, B) and the convergence table against the limit.
    Count(CountArgs),
    /// ρ_{1,0} or ρ_{0,1} over a grid.
    Density(DensityArgs),
    /// Monte Carlo real-zero density histogram against theory.
    Simulate(SimulateArgs),
    /// λ(QA) and λ*(QA) for a cube or a weighted l_p ball.
    Lattice(LatticeArgs),
    /// Probability of exactly n − 2l real zeros, quadrature and Monte Carlo.
    ProbReal(ProbRealArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct HeightArgs {
    /// Degree.
    #[arg(long)]
    pub n: usize,
    /// Exponent p ≥ 1 or `inf`.
    #[arg(long, default_value = "inf")]
    pub p: String,
    /// `ones`, `bombieri` or a comma-separated list of n + 1 weights.
    #[arg(long, default_value = "ones")]
    pub weights: String,
}

impl HeightArgs {
    pub fn height(&self) -> Result<WeightedHeight> {
        let p: PNorm = self.p.parse().map_err(|e: Error| usage("p", e))?;
        if self.n < 1 {
            return Err(Error::Usage("--n: degree must be >= 1".into()));
        }
        let w = match self.weights.as_str() {
            "ones" => vec![1.0; self.n + 1],
            "bombieri" => crate::heights::bombieri_weights(self.n)?,
            list => {
                let w: Vec<f64> = list
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Usage(format!("--weights: {e}")))?;
                if w.len() != self.n + 1 {
                    return Err(Error::Usage(format!(
                        "--weights: expected {} values, got {}",
                        self.n + 1,
                        w.len()
                    )));
                }
                w
            }
        };
        WeightedHeight::new(w, p).map_err(|e| usage("weights", e))
    }
}

fn usage(field: &str, e: Error) -> Error {
    let msg = match e {
        Error::Usage(m) | Error::Domain(m) => m,
        other => other.to_string(),
    };
    Error::Usage(format!("--{field}: {msg}"))
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct IntegrationArgs {
    /// Evaluation budget per integral (command-specific default).
    #[arg(long)]
    pub budget: Option<usize>,
    /// Seed for quasi-random integration and simulation.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Absolute integration tolerance (command-specific default).
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Relative integration tolerance (command-specific default).
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

impl IntegrationArgs {
    fn options(&self) -> Result<IntegrationOptions> {
        self.options_with(1_000_000, 1e-9, 1e-7)
    }

    fn options_with(&self, budget: usize, abs_tol: f64, rel_tol: f64) -> Result<IntegrationOptions> {
        let budget = self.budget.unwrap_or(budget);
        let abs = self.abs_tol.unwrap_or(abs_tol);
        let rel = self.rel_tol.unwrap_or(rel_tol);
        if !(abs >= 0.0 && rel >= 0.0 && abs + rel > 0.0) {
            return Err(Error::Usage(
                "--abs-tol/--rel-tol: need non-negative values, not both zero".into(),
            ));
        }
        if budget == 0 {
            return Err(Error::Usage("--budget must be positive".into()));
        }
        let mut o = IntegrationOptions::default().with_budget(budget).with_tol(abs, rel);
        o.rng = RngStream::new(self.seed, 0);
        Ok(o)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CountArgs {
    #[command(flatten)]
    pub height: HeightArgs,
    /// Real slots of the region.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Complex slots of the region.
    #[arg(long, default_value_t = 0)]
    pub l: usize,
    /// One box: lo hi per real slot, then re_lo re_hi im_lo im_hi per complex
    /// slot. Repeat for a union.
    #[arg(long = "box", num_args = 1.., allow_negative_numbers = true, action = clap::ArgAction::Append)]
    pub boxes: Vec<f64>,
    /// A single height bound.
    #[arg(long = "Q", conflicts_with = "q_list")]
    pub q: Option<f64>,
    /// Ascending list of height bounds.
    #[arg(long = "Q-list", num_args = 1..)]
    pub q_list: Vec<f64>,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    /// Output file (stdout when absent).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    pub height: HeightArgs,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub l: usize,
    /// lo hi step for x (or Re z).
    #[arg(long, num_args = 3, allow_negative_numbers = true)]
    pub grid: Vec<f64>,
    /// lo hi step for Im z when l = 1.
    #[arg(long, num_args = 3, allow_negative_numbers = true)]
    pub im_grid: Vec<f64>,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum SourceArg {
    G,
    Ball,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub height: HeightArgs,
    #[arg(long, default_value_t = 100_000)]
    pub draws: u64,
    /// lo hi count for the histogram bins.
    #[arg(long, num_args = 3, allow_negative_numbers = true, default_values_t = [-3.0, 3.0, 20.0])]
    pub bins: Vec<f64>,
    #[arg(long, value_enum, default_value = "g")]
    pub source: SourceArg,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum Shape {
    /// [−half, half]^d.
    Cube,
    /// The unit ball of the weighted height.
    Ball,
}

#[derive(Debug, Args, Serialize)]
pub struct LatticeArgs {
    #[arg(long, value_enum, default_value = "cube")]
    pub shape: Shape,
    /// Dimension of the cube.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1.0)]
    pub half: f64,
    /// Degree of the ball (dimension n + 1).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "inf")]
    pub p: String,
    #[arg(long, default_value = "ones")]
    pub weights: String,
    #[arg(long = "Q")]
    pub q: f64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ProbRealArgs {
    #[command(flatten)]
    pub height: HeightArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub draws: u64,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Reduced budgets.
    #[arg(long)]
    pub quick: bool,
}

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_QUALITY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Outcome of a job that ran to completion.
struct Outcome {
    /// Whether every numerical result met its quality bar.
    quality_ok: bool,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Domain(_) | Error::Unsupported(_) | Error::Resource { .. } | Error::Io(_) => {
            EXIT_USAGE
        }
        Error::NonConvergence { .. } | Error::Evaluation(_) => EXIT_QUALITY,
    }
}

const COMMANDS: [&str; 6] = ["count", "density", "simulate", "lattice", "prob-real", "verify"];

/// Turn a flat `key = value` document into command-line tokens. The
/// `command` key names the subcommand; `true`/`false` values toggle flags.
pub fn config_tokens(text: &str) -> Result<(Option<String>, Vec<String>)> {
    let mut command = None;
    let mut tokens = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "command" {
            command = Some(value.to_string());
            continue;
        }
        let flag = match key.as_str() {
            "q" => "--Q".to_string(),
            "q-list" => "--Q-list".to_string(),
            other => format!("--{other}"),
        };
        match value {
            "true" => tokens.push(flag),
            "false" => {}
            v => {
                tokens.push(flag);
                tokens.extend(v.split_whitespace().map(str::to_string));
            }
        }
    }
    Ok((command, tokens))
}

/// Merge a config file into the raw arguments: the command line's own
/// subcommand (or the file's) comes first, then file tokens, then the
/// remaining command-line tokens so they take precedence.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let (path, consumed) = match args[pos].split_once('=') {
        Some((_, p)) => (p.to_string(), 1),
        None => (
            args.get(pos + 1)
                .cloned()
                .ok_or_else(|| Error::Usage("--config needs a path".into()))?,
            2,
        ),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Usage(format!("--config {path}: {e}")))?;
    let (file_cmd, file_tokens) = config_tokens(&text)?;
    let mut rest: Vec<String> = args[..pos].iter().chain(&args[pos + consumed..]).cloned().collect();
    let prog = rest.remove(0);
    let cli_cmd = rest.iter().position(|a| COMMANDS.contains(&a.as_str()));
    let (globals, cmd, after) = match cli_cmd {
        Some(i) => (rest[..i].to_vec(), rest[i].clone(), rest[i + 1..].to_vec()),
        None => (
            Vec::new(),
            file_cmd.ok_or_else(|| Error::Usage("no command given on the command line or in the config".into()))?,
            rest.clone(),
        ),
    };
    let mut out = vec![prog];
    out.extend(globals);
    out.push(cmd);
    out.extend(file_tokens);
    out.extend(after);
    Ok(out)
}

/// Parse, run and map the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let raw: Vec<String> = args
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let raw = match expand_config(raw) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(&raw) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli
        .threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(o) if o.quality_ok => EXIT_OK,
        Ok(_) => EXIT_QUALITY,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// SHA-256 of the canonical JSON form of the job.
pub fn config_hash(cli: &Cli) -> String {
    let json = serde_json::to_string(&cli.command).expect("job serialises");
    let digest = Sha256::digest(json.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn metadata_line(w: &mut dyn Write, cli: &Cli, runtime: f64) -> Result<()> {
    let runtime = if cli.no_timing { 0.0 } else { runtime };
    writeln!(w, "# config_hash={} runtime_s={runtime:.3}", config_hash(cli))?;
    Ok(())
}

fn build_region(k: usize, l: usize, values: &[f64]) -> Result<Region> {
    Region::from_flat(k, l, values).map_err(|e| usage("box", e))
}

fn grid_points(spec: &[f64], field: &str) -> Result<Vec<f64>> {
    let [lo, hi, step] = spec else {
        return Err(Error::Usage(format!("--{field}: expected lo hi step")));
    };
    if !(step > &0.0) || hi < lo {
        return Err(Error::Usage(format!("--{field}: need lo <= hi and step > 0")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| lo + step * i as f64).collect())
}

/// Validate and execute one job.
fn run(cli: &Cli) -> Result<Outcome> {
    let start = Instant::now();
    match &cli.command {
        Command::Count(a) => {
            let h = a.height.height()?;
            let region = build_region(a.k, a.l, &a.boxes)?;
            region.check_degree(h.n()).map_err(|e| usage("k", e))?;
            let qs = match (a.q, a.q_list.is_empty()) {
                (Some(q), _) => vec![q],
                (None, false) => a.q_list.clone(),
                (None, true) => return Err(Error::Usage("--Q or --Q-list is required".into())),
            };
            if qs.iter().any(|q| !(q > &0.0)) {
                return Err(Error::Usage("--Q: height bounds must be positive".into()));
            }
            let mut t = counting::convergence_table(&h, &region, &qs, &a.integration.options()?)?;
            if cli.no_timing {
                t.rows.iter_mut().for_each(|r| r.runtime_s = 0.0);
            }
            let mut w = open_out(&a.out)?;
            counting::write_table_csv(&t, &mut w)?;
            metadata_line(&mut w, cli, start.elapsed().as_secs_f64())?;
            w.flush()?;
            Ok(Outcome { quality_ok: true })
        }
        Command::Density(a) => {
            let h = a.height.height()?;
            let xs = grid_points(&a.grid, "grid")?;
            let grid: Vec<Vec<f64>> = match (a.k, a.l) {
                (1, 0) => xs.iter().map(|&x| vec![x]).collect(),
                (0, 1) => {
                    let ys = grid_points(&a.im_grid, "im-grid")?;
                    if ys.iter().any(|y| *y < 0.0) {
                        return Err(Error::Usage("--im-grid: imaginary parts must be >= 0".into()));
                    }
                    xs.iter().flat_map(|&x| ys.iter().map(move |&y| vec![x, y])).collect()
                }
                _ => {
                    return Err(Error::Usage(
                        "--k/--l: density curves need (k, l) = (1, 0) or (0, 1)".into(),
                    ))
                }
            };
            if a.k + 2 * a.l > h.n() {
                return Err(Error::Usage(format!("--k/--l: k + 2l exceeds n = {}", h.n())));
            }
            let rows = density::density_curve(&h, a.k, a.l, &grid, &a.integration.options()?)?;
            let mut w = open_out(&a.out)?;
            density::write_curve_csv(&rows, a.l == 1, &mut w)?;
            metadata_line(&mut w, cli, start.elapsed().as_secs_f64())?;
            w.flush()?;
            Ok(Outcome {
                quality_ok: rows.iter().all(|r| r.method != "quadrature-unconverged"),
            })
        }
        Command::Simulate(a) => {
            let h = a.height.height()?;
            let [lo, hi, count] = a.bins[..] else {
                return Err(Error::Usage("--bins: expected lo hi count".into()));
            };
            if count < 1.0 || count.fract() != 0.0 {
                return Err(Error::Usage("--bins: count must be a positive integer".into()));
            }
            let bins = mcsim::uniform_bins(lo, hi, count as usize).map_err(|e| usage("bins", e))?;
            if a.draws == 0 {
                return Err(Error::Usage("--draws must be positive".into()));
            }
            let source = match a.source {
                SourceArg::G => Source::G,
                SourceArg::Ball => Source::Ball,
            };
            let rng = RngStream::new(a.integration.seed, 1);
            let est = mcsim::empirical_real_density(&h, &bins, a.draws, &rng, source)?;
            let opts = a.integration.options_with(1_000_000, 1e-7, 1e-4)?;
            let theory = bins
                .iter()
                .map(|b| {
                    let r = density::integrate_over_region(&h, &Region::interval(b.lo, b.hi)?, &opts)?;
                    Ok((r.value / b.length(), r.error_estimate / b.length()))
                })
                .collect::<Result<Vec<_>>>()?;
            let rows = mcsim::histogram_rows(&est, &theory);
            // theory must be sharp next to the sampling noise
            let converged = rows.iter().all(|r| r.theory_err <= 0.1 * r.std_error.max(1e-12));
            let mut w = open_out(&a.out)?;
            mcsim::write_histogram_csv(&rows, &mut w)?;
            metadata_line(&mut w, cli, start.elapsed().as_secs_f64())?;
            w.flush()?;
            Ok(Outcome { quality_ok: converged })
        }
        Command::Lattice(a) => {
            if !(a.q > 0.0) {
                return Err(Error::Usage("--Q must be positive".into()));
            }
            let report = match a.shape {
                Shape::Cube => {
                    if a.d < 1 || !(a.half > 0.0) {
                        return Err(Error::Usage("--d/--half: need d >= 1 and half > 0".into()));
                    }
                    lattice_report(&BoxRegion::cube(a.d, a.half), a.q, (2.0 * a.half).powi(a.d as i32))?
                }
                Shape::Ball => {
                    let n =
                        a.n.ok_or_else(|| Error::Usage("--n is required for --shape ball".into()))?;
                    let h = HeightArgs {
                        n,
                        p: a.p.clone(),
                        weights: a.weights.clone(),
                    }
                    .height()?;
                    let vol = h.ball_volume();
                    lattice_report(&LpBall { height: h }, a.q, vol)?
                }
            };
            let mut w = open_out(&a.out)?;
            let runtime = if cli.no_timing {
                0.0
            } else {
                start.elapsed().as_secs_f64()
            };
            let json = serde_json::json!({
                "report": report,
                "config_hash": config_hash(cli),
                "runtime_s": runtime,
            });
            writeln!(w, "{}", serde_json::to_string_pretty(&json).expect("serialisable"))?;
            w.flush()?;
            Ok(Outcome {
                quality_ok: report.direct.zip(report.mobius).is_none_or(|(a, b)| a == b),
            })
        }
        Command::ProbReal(a) => {
            let h = a.height.height()?;
            let opts = a.integration.options_with(16_000_000, 1e-8, 1e-4)?;
            let rng = RngStream::new(a.integration.seed, 2);
            let mc = mcsim::empirical_real_count_dist(&h, a.draws, &rng, Source::G)?;
            let mut w = open_out(&a.out)?;
            writeln!(w, "l,real_zeros,probability,error,mc,mc_std_error")?;
            let mut total = 0.0;
            let mut converged = true;
            let n = h.n();
            for l in 0..=n / 2 {
                let r = density::prob_real_count(&h, l, &opts)?;
                converged &= r.converged;
                total += r.value;
                let e = mc[n - 2 * l];
                writeln!(
                    w,
                    "{l},{},{:.10},{:.3e},{:.6},{:.6}",
                    n - 2 * l,
                    r.value,
                    r.error_estimate,
                    e.estimate,
                    e.std_error
                )?;
            }
            writeln!(w, "# total_probability={total:.10}")?;
            metadata_line(&mut w, cli, start.elapsed().as_secs_f64())?;
            w.flush()?;
            Ok(Outcome { quality_ok: converged })
        }
        Command::Verify(a) => {
            let budget = if a.quick { Budget::Quick } else { Budget::Full };
            let mut ok = true;
            for f in [
                verify::a1,
                verify::a2,
                verify::a3,
                verify::a4,
                verify::a5,
                verify::a6,
                verify::a7,
                verify::a8,
                verify::a9,
            ] {
                let r = f(budget);
                println!("{}", r.line());
                ok &= r.passed;
            }
            Ok(Outcome { quality_ok: ok })
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
struct LatticeReport {
    q: f64,
    dim: usize,
    lambda: u64,
    lambda_star: u64,
    direct: Option<u64>,
    mobius: Option<u64>,
    lambda_over_qd: f64,
    lambda_star_over_qd: f64,
    volume: f64,
    coprime_limit: f64,
}

fn lattice_report<A: lattice::LatticeRegion>(a: &A, q: f64, volume: f64) -> Result<LatticeReport> {
    let d = a.dim();
    let lambda = lattice::count_integer_points(a, q)?;
    let mut c = lattice::count_coprime_points(a, q)?;
    if c.mobius.is_none() {
        c.mobius = Some(lattice::count_coprime_mobius(a, q)?);
    }
    let qd = q.powi(d as i32);
    let coprime_limit = if d >= 2 {
        volume / crate::numerics::zeta(d as u32)?
    } else {
        f64::NAN
    };
    Ok(LatticeReport {
        q,
        dim: d,
        lambda,
        lambda_star: c.count,
        direct: c.direct,
        mobius: c.mobius,
        lambda_over_qd: lambda as f64 / qd,
        lambda_star_over_qd: c.count as f64 / qd,
        volume,
        coprime_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(args)
    }

    #[test]
    fn spec_examples_parse() {
        let c = parse(&[
            "algconj",
            "count",
            "--n",
            "1",
            "--p",
            "inf",
            "--weights",
            "ones",
            "--k",
            "1",
            "--l",
            "0",
            "--box",
            "0",
            "1",
            "--Q",
            "100",
        ])
        .unwrap();
        let Command::Count(a) = &c.command else { panic!() };
        assert_eq!(a.boxes, vec![0.0, 1.0]);
        assert!(build_region(a.k, a.l, &a.boxes).is_ok());
        let c = parse(&[
            "algconj",
            "density",
            "--n",
            "2",
            "--p",
            "2",
            "--weights",
            "bombieri",
            "--k",
            "1",
            "--l",
            "0",
            "--grid",
            "-3",
            "3",
            "0.1",
        ])
        .unwrap();
        let Command::Density(a) = &c.command else { panic!() };
        assert_eq!(grid_points(&a.grid, "grid").unwrap().len(), 61);
        assert!(a.height.height().is_ok());
    }

    #[test]
    fn validation_errors_name_the_field() {
        let h = HeightArgs {
            n: 2,
            p: "0.5".into(),
            weights: "ones".into(),
        };
        let e = h.height().unwrap_err();
        assert!(matches!(&e, Error::Usage(m) if m.starts_with("--p")), "{e}");
        let h = HeightArgs {
            n: 2,
            p: "2".into(),
            weights: "1,0,1".into(),
        };
        assert!(matches!(h.height().unwrap_err(), Error::Usage(m) if m.starts_with("--weights")));
        let h = HeightArgs {
            n: 2,
            p: "2".into(),
            weights: "1,1".into(),
        };
        assert!(h.height().is_err());
        assert!(matches!(build_region(1, 0, &[1.0, 0.0]), Err(Error::Usage(m)) if m.starts_with("--box")));
        assert!(matches!(build_region(0, 1, &[0.0, 1.0]), Err(Error::Usage(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            main_with_args(["algconj", "count", "--n", "1", "--p", "0.5", "--box", "0", "1", "--Q", "5"]),
            2
        );
        assert_eq!(main_with_args(["algconj", "bogus"]), 2);
        assert_eq!(
            main_with_args(["algconj", "count", "--n", "1", "--k", "1", "--l", "1", "--box", "0", "1", "--Q", "5"]),
            2
        );
    }

    #[test]
    fn config_file_tokens() {
        let (cmd, t) =
            config_tokens("command = count\nn = 1\n# comment\np = inf\nbox = 0 1\nQ = 50\nno_timing = true\n").unwrap();
        assert_eq!(cmd.as_deref(), Some("count"));
        assert_eq!(
            t,
            ["--n", "1", "--p", "inf", "--box", "0", "1", "--Q", "50", "--no-timing"]
        );
        assert!(config_tokens("just words").is_err());
    }

    #[test]
    fn config_merges_with_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("job.conf");
        std::fs::write(&cfg, "command = count\nn = 1\nbox = 0 1\nQ = 10\n").unwrap();
        let args: Vec<String> = ["algconj", "--config", cfg.to_str().unwrap(), "--Q", "20"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let merged = expand_config(args).unwrap();
        let cli = Cli::try_parse_from(&merged).unwrap();
        let Command::Count(a) = cli.command else { panic!() };
        assert_eq!(a.q, Some(20.0));
        assert_eq!(a.height.n, 1);
        std::fs::write(&cfg, "command = count\nunknown_key = 3\n").unwrap();
        assert_eq!(main_with_args(["algconj", "--config", cfg.to_str().unwrap()]), 2);
    }

    #[test]
    fn hash_ignores_output_path() {
        let a = parse(&[
            "algconj", "count", "--n", "1", "--box", "0", "1", "--Q", "5", "--out", "a.csv",
        ])
        .unwrap();
        let b = parse(&["algconj", "count", "--n", "1", "--box", "0", "1", "--Q", "5"]).unwrap();
        let c = parse(&["algconj", "count", "--n", "1", "--box", "0", "1", "--Q", "6"]).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_ne!(config_hash(&a), config_hash(&c));
    }
}
