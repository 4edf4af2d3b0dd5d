//! Command line front end. Each subcommand calls one library routine and
//! prints its table as CSV or as a JSON envelope.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use flate2::write::GzEncoder;
use flate2::Compression;
use serde_json::{json, Map, Value};

use alpha_bridge::analytic::{
    asymptotic_bias, bias_curve, correct_mle, expected_mle, expected_mle_half, CorrectionStatus,
    QuadratureSpec,
};
use alpha_bridge::bayes::{posterior_from_likelihood, PriorKind, PriorSpec};
use alpha_bridge::bridge::{
    conditional_expectation, simulate, BridgeParams, Generator, SamplePath, TimeGrid,
};
use alpha_bridge::rng::RngSeed;
use alpha_bridge::stats::{mle_with_rule, LogLikelihood, QuadratureRule};
use alpha_bridge::study::{
    run_experiment, write_records_csv, write_summary_csv, ExperimentConfig, SummaryRow,
};
use alpha_bridge::{Error, Result};

#[derive(Parser)]
#[command(name = "alpha-bridge", version, about = "Estimation of the alpha-Brownian bridge scaling parameter")]
struct Cli {
    /// Output format for tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (directory for `experiment` and `figures`); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorArg {
    Exact,
    Euler,
}

impl From<GeneratorArg> for Generator {
    fn from(g: GeneratorArg) -> Self {
        match g {
            GeneratorArg::Exact => Generator::Exact,
            GeneratorArg::Euler => Generator::Euler,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Rectangle,
    Trapezoid,
}

impl From<RuleArg> for QuadratureRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Rectangle => QuadratureRule::Rectangle,
            RuleArg::Trapezoid => QuadratureRule::Trapezoid,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PriorArg {
    Jeffreys,
    Uniform,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path on a uniform grid over [0, T].
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "T", default_value_t = 0.8)]
        t: f64,
        /// Number of grid points, both endpoints included.
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = RngSeed::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long, value_enum, default_value_t = GeneratorArg::Exact)]
        generator: GeneratorArg,
    },
    /// Maximum likelihood estimate from a path CSV.
    Estimate {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = RuleArg::Rectangle)]
        rule: RuleArg,
    },
    /// Exact expectation of the MLE.
    #[command(allow_negative_numbers = true)]
    ExpectedMle {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        rel_tol: Option<f64>,
    },
    /// Expectation and bias of the MLE over an alpha grid.
    #[command(allow_negative_numbers = true)]
    BiasCurve {
        #[arg(long = "T")]
        t: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha_min: f64,
        #[arg(long, default_value_t = 10.0)]
        alpha_max: f64,
        #[arg(long, default_value_t = 0.1)]
        alpha_step: f64,
        #[arg(long)]
        rel_tol: Option<f64>,
    },
    /// Bias-corrected estimate for an observed MLE.
    #[command(allow_negative_numbers = true)]
    Correct {
        #[arg(long)]
        observed: f64,
        #[arg(long = "T")]
        t: f64,
    },
    /// Posterior mean and median; optional density table.
    Posterior {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = PriorArg::Jeffreys)]
        prior: PriorArg,
        /// Upper end of the prior support.
        #[arg(long)]
        upper: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = RuleArg::Rectangle)]
        rule: RuleArg,
        /// Write the normalized density as CSV `alpha,density`.
        #[arg(long)]
        density: Option<PathBuf>,
    },
    /// Monte Carlo study; writes summary.csv into --out (default `.`).
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        /// Also write records.csv.gz with one row per path.
        #[arg(long)]
        records: bool,
        /// Use 100,000 paths per alpha.
        #[arg(long)]
        full_scale: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// CSV data behind the figures; written into --out (default `.`).
    Figures {
        /// Figure numbers; all four when omitted.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        which: Vec<u8>,
        /// Paths per alpha for figure 4.
        #[arg(long, default_value_t = 10_000)]
        n_paths: usize,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = RngSeed::default().seed)]
        seed: u64,
    },
}

/// A table with a fixed column order; cells are JSON values so CSV and JSON
/// share one representation.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Value>) {
        self.rows.push(row);
    }

    fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell))?;
        }
        w.flush()?;
        Ok(())
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.clone()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        // f64 Display is the shortest representation that round-trips
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => x.to_string(),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

fn num(x: f64) -> Value {
    // NaN and infinities have no JSON number form
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(x.to_string()))
}

fn envelope(command: &str, config: &Value, rows: Value) -> Value {
    json!({ "schema": "v1", "command": command, "config": config, "rows": rows })
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(cli: &Cli, command: &str, config: &Value, table: &Table) -> Result<()> {
    let mut out = open_out(&cli.out)?;
    match cli.format {
        Format::Csv => table.write_csv(&mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &envelope(command, config, table.json_rows()))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn echo_config(command: &str, config: &Value) {
    eprintln!("{}", json!({ "command": command, "config": config }));
}

fn spec_with(rel_tol: Option<f64>) -> Result<QuadratureSpec> {
    let mut spec = QuadratureSpec::default();
    if let Some(r) = rel_tol {
        spec.rel_tol = r;
    }
    spec.validate()?;
    Ok(spec)
}

fn read_path(path: &Path) -> Result<SamplePath> {
    SamplePath::read_csv(BufReader::new(File::open(path)?), 1.0)
}

fn out_dir(cli: &Cli) -> Result<PathBuf> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        &Command::Simulate {
            alpha,
            t,
            n,
            seed,
            stream,
            generator,
        } => {
            let generator = Generator::from(generator);
            let config = json!({
                "alpha": alpha, "T": t, "n": n, "seed": seed, "stream": stream,
                "generator": generator,
            });
            echo_config("simulate", &config);
            let params = BridgeParams::new(alpha)?;
            let grid = TimeGrid::uniform(t, n)?;
            let path = simulate(generator, &params, &grid, RngSeed::new(seed, stream))?;
            match cli.format {
                Format::Csv => {
                    let mut out = open_out(&cli.out)?;
                    path.write_csv(&mut out)?;
                    out.flush()?;
                }
                Format::Json => {
                    let mut table = Table::new(&["t", "x"]);
                    for (&s, &x) in path.times().iter().zip(path.values()) {
                        table.push(vec![num(s), num(x)]);
                    }
                    emit(cli, "simulate", &config, &table)?;
                }
            }
        }
        Command::Estimate { path, rule } => {
            let rule = QuadratureRule::from(*rule);
            let config = json!({ "path": path, "rule": rule });
            echo_config("estimate", &config);
            let record = mle_with_rule(&read_path(path)?, rule)?.record();
            let value = serde_json::to_value(record)?;
            let mut out = open_out(&cli.out)?;
            let doc = match cli.format {
                Format::Csv => value,
                Format::Json => envelope("estimate", &config, Value::Array(vec![value])),
            };
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
            out.flush()?;
        }
        &Command::ExpectedMle { alpha, t, rel_tol } => {
            let spec = spec_with(rel_tol)?;
            let config = json!({ "alpha": alpha, "T": t, "quadrature": spec });
            echo_config("expected-mle", &config);
            let e = expected_mle(alpha, t, &spec)?;
            let mut table = Table::new(&["alpha", "T", "expectation", "bias"]);
            table.push(vec![num(alpha), num(t), num(e), num(e - alpha)]);
            emit(cli, "expected-mle", &config, &table)?;
        }
        &Command::BiasCurve {
            t,
            alpha_min,
            alpha_max,
            alpha_step,
            rel_tol,
        } => {
            if !(alpha_step > 0.0) || alpha_max < alpha_min {
                return Err(Error::InvalidConfig(
                    "need alpha-step > 0 and alpha-max >= alpha-min".into(),
                ));
            }
            let spec = spec_with(rel_tol)?;
            let config = json!({
                "T": t, "alpha_min": alpha_min, "alpha_max": alpha_max,
                "alpha_step": alpha_step, "quadrature": spec,
            });
            echo_config("bias-curve", &config);
            let steps = ((alpha_max - alpha_min) / alpha_step + 1e-9).floor() as usize;
            let alphas: Vec<f64> = (0..=steps).map(|i| alpha_min + i as f64 * alpha_step).collect();
            let curve = bias_curve(t, &alphas, &spec)?;
            let mut table = Table::new(&["alpha", "expectation", "bias"]);
            for ((&a, &e), &b) in alphas.iter().zip(&curve.expectations).zip(&curve.biases) {
                table.push(vec![num(a), num(e), num(b)]);
            }
            emit(cli, "bias-curve", &config, &table)?;
        }
        &Command::Correct { observed, t } => {
            let spec = QuadratureSpec::default();
            let config = json!({ "observed": observed, "T": t, "quadrature": spec });
            echo_config("correct", &config);
            let c = correct_mle(observed, t, &spec)?;
            let status = match c.status {
                CorrectionStatus::Interior => "interior",
                CorrectionStatus::ClampedAtZero => "clamped_at_zero",
            };
            let mut table = Table::new(&["alpha_cmle", "status"]);
            table.push(vec![num(c.alpha_cmle), json!(status)]);
            emit(cli, "correct", &config, &table)?;
        }
        Command::Posterior {
            path,
            prior,
            upper,
            tol,
            rule,
            density,
        } => {
            let sample = read_path(path)?;
            let t = sample.observation_end();
            let kind = match prior {
                PriorArg::Jeffreys => PriorKind::Jeffreys,
                PriorArg::Uniform => PriorKind::Uniform,
            };
            let upper = upper.unwrap_or(match kind {
                PriorKind::Jeffreys => PriorSpec::DEFAULT_JEFFREYS_UPPER,
                PriorKind::Uniform => PriorSpec::DEFAULT_UNIFORM_UPPER,
            });
            let spec = PriorSpec::new(kind, upper, t)?;
            let rule = QuadratureRule::from(*rule);
            let config = json!({ "path": path, "prior": spec, "tol": tol, "rule": rule });
            echo_config("posterior", &config);
            let ll = LogLikelihood::from_path(&sample, rule)?;
            let post = posterior_from_likelihood(&spec, &ll, *tol)?;
            if let Some(file) = density {
                let mut table = Table::new(&["alpha", "density"]);
                for (&a, &d) in post.nodes().iter().zip(post.density()) {
                    table.push(vec![num(a), num(d)]);
                }
                table.write_csv(BufWriter::new(File::create(file)?))?;
            }
            let value = serde_json::to_value(post.summary)?;
            let mut out = open_out(&cli.out)?;
            let doc = match cli.format {
                Format::Csv => value,
                Format::Json => envelope("posterior", &config, Value::Array(vec![value])),
            };
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
            out.flush()?;
        }
        Command::Experiment {
            config,
            workers,
            records,
            full_scale,
            seed,
        } => {
            let mut cfg = match config {
                Some(p) => ExperimentConfig::from_json(&fs::read_to_string(p)?)?,
                None => ExperimentConfig::default(),
            };
            if *full_scale {
                cfg.n_paths = ExperimentConfig::full_scale().n_paths;
            }
            if let Some(s) = seed {
                cfg.seed = *s;
            }
            cfg.validate()?;
            let cfg_json = serde_json::to_value(&cfg)?;
            echo_config("experiment", &cfg_json);
            let dir = out_dir(cli)?;
            let output = run_experiment(&cfg, *workers)?;
            if output.degenerate > 0 {
                eprintln!("excluded {} degenerate paths", output.degenerate);
            }
            write_summary_file(&output.rows, &dir.join("summary.csv"))?;
            if *records {
                let gz = GzEncoder::new(File::create(dir.join("records.csv.gz"))?, Compression::default());
                write_records_csv(&output.records, &cfg.estimators, gz)?;
            }
            if let Format::Json = cli.format {
                let rows = serde_json::to_value(&output.rows)?;
                println!("{}", serde_json::to_string_pretty(&envelope("experiment", &cfg_json, rows))?);
            }
        }
        Command::Figures {
            which,
            n_paths,
            workers,
            seed,
        } => {
            let which: Vec<u8> = if which.is_empty() { vec![1, 2, 3, 4] } else { which.clone() };
            let config = json!({ "which": which, "n_paths": n_paths, "seed": seed });
            echo_config("figures", &config);
            let dir = out_dir(cli)?;
            let mut written = Vec::new();
            for w in which {
                match w {
                    1 => figure1(&dir, *seed, &mut written)?,
                    2 => figure2(&dir, &mut written)?,
                    3 => figure3(&dir, &mut written)?,
                    _ => figure4(&dir, *n_paths, *seed, *workers, &mut written)?,
                }
            }
            for f in &written {
                eprintln!("wrote {}", f.display());
            }
            if let Format::Json = cli.format {
                let rows = written.iter().map(|p| json!({ "file": p })).collect();
                println!("{}", serde_json::to_string_pretty(&envelope("figures", &config, Value::Array(rows)))?);
            }
        }
    }
    Ok(())
}

fn write_summary_file(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    write_summary_csv(rows, &mut f)?;
    f.flush()?;
    Ok(())
}

fn save(table: &Table, path: PathBuf, written: &mut Vec<PathBuf>) -> Result<()> {
    let mut f = BufWriter::new(File::create(&path)?);
    table.write_csv(&mut f)?;
    f.flush()?;
    written.push(path);
    Ok(())
}

/// One standard bridge path observed up to t = 0.5, and the conditional mean
/// of the remaining path under several alphas.
fn figure1(dir: &Path, seed: u64, written: &mut Vec<PathBuf>) -> Result<()> {
    let now = 0.5;
    let grid = TimeGrid::uniform(now, 151)?;
    let path = simulate(Generator::Exact, &BridgeParams::new(1.0)?, &grid, RngSeed::new(seed, 0))?;
    let mut prefix = Table::new(&["t", "x"]);
    for (&s, &x) in path.times().iter().zip(path.values()) {
        prefix.push(vec![num(s), num(x)]);
    }
    save(&prefix, dir.join("fig1_path.csv"), written)?;

    let x_now = path.terminal();
    let mut curves = Table::new(&["alpha", "u", "expectation"]);
    for alpha in [0.0, 0.5, 1.0, 2.0, 5.0] {
        for i in 0..100 {
            let u = now + (1.0 - now) * i as f64 / 100.0;
            curves.push(vec![num(alpha), num(u), num(conditional_expectation(x_now, alpha, now, u)?)]);
        }
        // limit as u -> 1
        let end = if alpha > 0.0 { 0.0 } else { x_now };
        curves.push(vec![num(alpha), num(1.0), num(end)]);
    }
    save(&curves, dir.join("fig1_expectation.csv"), written)
}

fn figure2(dir: &Path, written: &mut Vec<PathBuf>) -> Result<()> {
    let spec = QuadratureSpec::default();
    let alphas: Vec<f64> = (0..=100).map(|i| i as f64 / 10.0).collect();
    for t in [0.7, 0.8, 0.9] {
        let curve = bias_curve(t, &alphas, &spec)?;
        let asym = asymptotic_bias(t)?;
        let mut table = Table::new(&["alpha", "expectation", "bias", "asymptotic_bias"]);
        for ((&a, &e), &b) in alphas.iter().zip(&curve.expectations).zip(&curve.biases) {
            table.push(vec![num(a), num(e), num(b), num(asym)]);
        }
        save(&table, dir.join(format!("fig2_T{t}.csv")), written)?;
    }
    Ok(())
}

fn figure3(dir: &Path, written: &mut Vec<PathBuf>) -> Result<()> {
    let mut table = Table::new(&["T", "expectation", "bias"]);
    for i in 1..=499 {
        let t = 0.5 + i as f64 / 1000.0;
        let e = expected_mle_half(t)?;
        table.push(vec![num(t), num(e), num(e - 0.5)]);
    }
    save(&table, dir.join("fig3.csv"), written)
}

fn figure4(
    dir: &Path,
    n_paths: usize,
    seed: u64,
    workers: Option<usize>,
    written: &mut Vec<PathBuf>,
) -> Result<()> {
    let cfg = ExperimentConfig {
        n_paths,
        seed,
        ..ExperimentConfig::default()
    };
    let out = run_experiment(&cfg, workers)?;
    let path = dir.join("fig4_summary.csv");
    write_summary_file(&out.rows, &path)?;
    written.push(path);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            if e.is_numerical() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
