use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gridspect::covariance::condition_number;
use gridspect::evaluation::{
    condition_diagnostics, covariance_sweep, plan_from_config, relative_frobenius_error, reports_to_csv,
    reports_to_markdown, run_benchmark, run_estimator, sweep_to_csv, sweep_trend, DataSettings, EstimatorKind,
    EstimatorSettings, Experiment, NetworkSource, Truncation,
};
use gridspect::grid_model::{build_admittance, check_constant_xr, make_constant_xr, NetworkSpec, XrCheck};
use gridspect::io::{
    file_kind, parse_config, parse_estimate, parse_network, parse_phasors, write_estimate, write_network,
    write_phasors, EstimateFile, FileKind,
};
use gridspect::linalg::{fro, ones};
use gridspect::scenario::{center, simulate, NoiseLevel, SimulationConfig};
use gridspect::Error;

const BUNDLED: [(&str, &str); 3] = [
    ("table1", include_str!("../../../configs/table1.cfg")),
    ("fig3", include_str!("../../../configs/fig3.cfg")),
    ("fig4", include_str!("../../../configs/fig4.cfg")),
];

#[derive(Parser)]
#[command(name = "gridspect", version, about = "Admittance-matrix identification from phasor measurements")]
struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a phasor dataset on a network.
    Generate(GenerateArgs),
    /// Estimate the admittance matrix from a phasor dataset.
    Estimate(EstimateArgs),
    /// Run a benchmark suite from a config file.
    Benchmark(BenchmarkArgs),
    /// Summarize a network, dataset or estimate file.
    Inspect(InspectArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Built-in network name or network file.
    #[arg(long, default_value = "radial33")]
    network: String,
    #[arg(long, default_value_t = 10_080)]
    samples: usize,
    /// Noise standard deviation as a percentage of the mean clean modulus.
    #[arg(long, conflicts_with_all = ["sigma_v", "sigma_i"])]
    noise_pct: Option<f64>,
    /// Absolute voltage noise standard deviation.
    #[arg(long, requires = "sigma_i")]
    sigma_v: Option<f64>,
    /// Absolute current noise standard deviation.
    #[arg(long, requires = "sigma_v")]
    sigma_i: Option<f64>,
    /// Standard deviation of the white current fluctuations.
    #[arg(long, default_value_t = 0.01)]
    current_sigma: f64,
    /// Standard deviation of the reference-voltage fluctuation.
    #[arg(long)]
    reference_sigma: Option<f64>,
    /// Use the constant-x/r version of the network.
    #[arg(long)]
    constant_xr: bool,
    /// Stem of the written `.phasors` and `.net` files.
    #[arg(long, default_value = "data")]
    name: String,
}

#[derive(Args)]
struct EstimateArgs {
    /// Phasor dataset file.
    data: PathBuf,
    /// `all` or a comma-separated list of ols, lasso, wiener, wcwf, map, cls.
    #[arg(long, default_value = "all")]
    estimator: String,
    /// Retained eigenpairs for wcwf: `n` or an integer.
    #[arg(long = "L", value_name = "n|INT", default_value = "n")]
    truncation: String,
    /// Project every estimate onto symmetric zero-row-sum matrices.
    #[arg(long)]
    postfilter: bool,
    /// True network (built-in name or file) used to score the estimates.
    #[arg(long)]
    truth: Option<String>,
    /// Ridge weight for map; derived from the noise levels when omitted.
    #[arg(long)]
    beta: Option<f64>,
    /// Lasso weight as a fraction of the weight that zeroes the estimate.
    #[arg(long)]
    alpha_ratio: Option<f64>,
    /// Iteration budget for map.
    #[arg(long)]
    map_max_iters: Option<usize>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Suite config file.
    #[arg(required_unless_present = "bundled")]
    config: Option<PathBuf>,
    /// Bundled config: table1, fig3 or fig4.
    #[arg(long, conflicts_with = "config")]
    bundled: Option<String>,
    /// Validate the config and list the planned runs without computing.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Args)]
struct InspectArgs {
    /// Network, phasor or estimate file, or a built-in network name.
    target: String,
    /// Retained eigenpairs for the truncated-basis condition number.
    #[arg(long = "L", value_name = "n|INT", default_value = "n")]
    truncation: String,
    /// True network used to score an estimate file.
    #[arg(long)]
    truth: Option<String>,
}

struct Failure {
    code: u8,
    message: String,
}

type Outcome<T> = Result<T, Failure>;

fn config_error(e: impl Display) -> Failure {
    Failure { code: 1, message: e.to_string() }
}

fn data_error(e: impl Display) -> Failure {
    Failure { code: 2, message: e.to_string() }
}

fn estimator_error(e: impl Display) -> Failure {
    Failure { code: 3, message: e.to_string() }
}

/// Missing files and bad settings are config errors; malformed contents
/// are data errors.
fn load_error(e: Error) -> Failure {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) => config_error(e),
        other => data_error(other),
    }
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let mut f = load_error(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

fn read_text(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Outcome<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| data_error(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| data_error(format!("cannot write {}: {e}", path.display())))
}

fn load_network(source: &str) -> Outcome<(String, NetworkSpec)> {
    NetworkSource::parse(source).load(Path::new(".")).map_err(load_error)
}

fn generate(args: &GenerateArgs, seed: u64, out: &Path) -> Outcome<()> {
    let (name, mut spec) = load_network(&args.network)?;
    if args.constant_xr {
        spec = make_constant_xr(&spec);
    }
    let mut data = DataSettings {
        samples: args.samples,
        current_sigma: args.current_sigma,
        ..DataSettings::default()
    };
    if let Some(s) = args.reference_sigma {
        data.operating_point.reference_sigma = s;
    }
    let mut sim: SimulationConfig = data
        .simulation_config(&spec, args.noise_pct.unwrap_or(0.01))
        .map_err(config_error)?;
    if let (Some(v), Some(i)) = (args.sigma_v, args.sigma_i) {
        sim.noise_v = NoiseLevel::Absolute(v);
        sim.noise_i = NoiseLevel::Absolute(i);
    }
    let y = build_admittance(&spec);
    let ds = simulate(&y, &sim, seed).map_err(config_error)?;

    let phasors = out.join(format!("{}.phasors", args.name));
    let network = out.join(format!("{}.net", args.name));
    write_text(&phasors, &write_phasors(&ds))?;
    write_text(&network, &write_network(&spec))?;
    println!(
        "generated {name}: n={} N={} sigma_v={:.3e} sigma_i={:.3e} seed={seed}",
        ds.n(),
        ds.samples(),
        ds.sigma_v,
        ds.sigma_i
    );
    println!("wrote {} and {}", phasors.display(), network.display());
    Ok(())
}

fn parse_estimators(s: &str) -> Outcome<Vec<EstimatorKind>> {
    if s.trim() == "all" {
        return Ok(EstimatorKind::ALL.to_vec());
    }
    s.split(',').map(|k| k.parse().map_err(config_error)).collect()
}

fn estimate(args: &EstimateArgs, out: &Path) -> Outcome<()> {
    let kinds = parse_estimators(&args.estimator)?;
    let truncation: Truncation = args.truncation.parse().map_err(config_error)?;
    let mut settings = EstimatorSettings {
        truncation,
        postfilter: args.postfilter,
        map_beta: args.beta,
        ..EstimatorSettings::default()
    };
    if let Some(r) = args.alpha_ratio {
        settings.lasso_alpha_ratio = r;
    }
    if let Some(m) = args.map_max_iters {
        settings.map_max_iters = m;
    }
    let ds = parse_phasors(&read_text(&args.data)?).map_err(with_path(&args.data))?;
    let truth = match &args.truth {
        None => None,
        Some(t) => {
            let (_, spec) = load_network(t)?;
            if spec.n() != ds.n() {
                return Err(config_error(format!("truth has {} buses, data has {}", spec.n(), ds.n())));
            }
            Some(build_admittance(&spec))
        }
    };
    let ds = center(&ds).map_err(data_error)?;

    let mut failures = 0;
    for &kind in &kinds {
        let run = match run_estimator(kind, &ds, &settings) {
            Ok(run) => run,
            Err(e) => {
                failures += 1;
                println!("{:<6} failed: {e}", kind.name());
                continue;
            }
        };
        let mut config = vec![("seed".to_string(), ds.seed.to_string())];
        match kind {
            EstimatorKind::Wcwf => config.push(("L".into(), truncation.resolve(ds.n()).to_string())),
            EstimatorKind::Lasso => config.push(("alpha_ratio".into(), format!("{:e}", settings.lasso_alpha_ratio))),
            EstimatorKind::MapLambda => config.push(("beta".into(), format!("{:e}", settings.map_config(&ds).beta))),
            _ => {}
        }
        config.push(("postfilter".into(), settings.postfilter.to_string()));
        config.push(("converged".into(), run.converged.to_string()));
        let path = out.join(format!("estimate-{}.txt", kind.name()));
        write_text(
            &path,
            &write_estimate(&EstimateFile {
                estimator: kind.name().to_string(),
                config,
                matrix: run.estimate.clone(),
            }),
        )?;
        let eps = match &truth {
            Some(y) => format!("{:.4e}", relative_frobenius_error(&run.estimate, y.matrix()).map_err(data_error)?),
            None => "-".to_string(),
        };
        println!(
            "{:<6} eps_F={eps} tau_s={:.4} converged={} file={}",
            kind.name(),
            run.wall_time,
            run.converged,
            path.display()
        );
    }
    if failures == kinds.len() {
        return Err(estimator_error(format!("all {failures} estimator runs failed")));
    }
    Ok(())
}

fn benchmark(args: &BenchmarkArgs, seed: u64, out: &Path) -> Outcome<()> {
    let (text, base) = match (&args.config, &args.bundled) {
        (Some(path), _) => (read_text(path)?, path.parent().unwrap_or(Path::new(".")).to_path_buf()),
        (None, Some(name)) => {
            let text = BUNDLED
                .iter()
                .find(|(k, _)| k == name)
                .map(|(_, t)| t.to_string())
                .ok_or_else(|| {
                    let names: Vec<&str> = BUNDLED.iter().map(|(k, _)| *k).collect();
                    config_error(format!("unknown bundled config {name:?}; available: {}", names.join(", ")))
                })?;
            (text, PathBuf::from("."))
        }
        (None, None) => return Err(config_error("a config file or --bundled is required")),
    };
    let cfg = parse_config(&text).map_err(config_error)?;
    let plan = plan_from_config(&cfg).map_err(config_error)?;

    match &plan.experiment {
        Experiment::Table(table) => {
            let bench = table.resolve(&base).map_err(load_error)?;
            let cells = bench.networks.len() * bench.noise_pct.len() * bench.estimators.len() * bench.replicates;
            if args.dry_run {
                let names: Vec<&str> = bench.networks.iter().map(|(n, _)| n.as_str()).collect();
                let kinds: Vec<&str> = bench.estimators.iter().map(|k| k.name()).collect();
                println!("table: networks {}", names.join(", "));
                println!("noise levels (%): {:?}", bench.noise_pct);
                println!("estimators: {}", kinds.join(", "));
                println!("{cells} runs, N={}, {} replicates", bench.data.samples, bench.replicates);
                println!("would write {}", out.join(&plan.csv).display());
                return Ok(());
            }
            let reports = run_benchmark(&bench, seed).map_err(estimator_error)?;
            let csv = out.join(&plan.csv);
            write_text(&csv, &reports_to_csv(&reports))?;
            println!("wrote {} ({} rows)", csv.display(), reports.len());
            let md = reports_to_markdown(&reports);
            if let Some(name) = &plan.markdown {
                let path = out.join(name);
                write_text(&path, &md)?;
                println!("wrote {}", path.display());
            }
            print!("{md}");
            let failed: Vec<String> = reports
                .iter()
                .filter_map(|r| r.error.as_ref().map(|e| format!("{} {} {}%: {e}", r.network, r.estimator.name(), r.noise_pct)))
                .collect();
            if !failed.is_empty() {
                return Err(estimator_error(format!("{} runs failed:\n  {}", failed.len(), failed.join("\n  "))));
            }
        }
        Experiment::Sweep(sweep) => {
            let sweep_cfg = sweep.resolve(&base).map_err(load_error)?;
            if args.dry_run {
                println!(
                    "sweep: n={} points={} N={} noise={}% correlation_length={}",
                    sweep_cfg.network.n(),
                    sweep_cfg.points,
                    sweep_cfg.samples,
                    sweep_cfg.noise_pct,
                    sweep_cfg.correlation_length
                );
                println!("would write {}", out.join(&plan.csv).display());
                return Ok(());
            }
            let points = covariance_sweep(&sweep_cfg, seed).map_err(estimator_error)?;
            let csv = out.join(&plan.csv);
            let text = sweep_to_csv(&points);
            write_text(&csv, &text)?;
            print!("{text}");
            println!("spearman(dist_W, eps_F constant x/r) = {:.3}", sweep_trend(&points));
            println!("wrote {}", csv.display());
        }
    }
    Ok(())
}

fn inspect_network(name: &str, spec: &NetworkSpec) -> Outcome<()> {
    let y = build_admittance(spec);
    println!("network {name}: n={} branches={} shunts={}", spec.n(), spec.branches().len(), spec.shunts().len());
    for w in spec.shunt_sign_warnings() {
        println!("warning: {w}");
    }
    match check_constant_xr(spec) {
        XrCheck::Constant { ratio } => println!("x/r: constant, g/b = {ratio:.6}"),
        XrCheck::Varying { offending, .. } => println!("x/r: varying, {} branches off the median ratio", offending.len()),
    }
    println!("normality residual: {:.3e}", y.normality_residual());
    if y.is_singular() {
        println!("admittance matrix: singular (no shunt path)");
    } else {
        println!("condition number of Y: {:.3e}", condition_number(y.matrix()).map_err(data_error)?);
    }
    Ok(())
}

fn inspect(args: &InspectArgs) -> Outcome<()> {
    let path = Path::new(&args.target);
    if !path.exists() {
        let (name, spec) = load_network(&args.target)?;
        return inspect_network(&name, &spec);
    }
    let text = read_text(path)?;
    match file_kind(&text) {
        Some(FileKind::Network) => {
            let spec = parse_network(&text).map_err(with_path(path))?;
            inspect_network(&args.target, &spec)
        }
        Some(FileKind::Phasors) => {
            let ds = parse_phasors(&text).map_err(with_path(path))?;
            let truncation: Truncation = args.truncation.parse().map_err(config_error)?;
            println!(
                "phasors: n={} N={} sigma_v={:.3e} sigma_i={:.3e} seed={} centered={}",
                ds.n(),
                ds.samples(),
                ds.sigma_v,
                ds.sigma_i,
                ds.seed,
                ds.centered
            );
            let d = condition_diagnostics(&center(&ds).map_err(data_error)?, truncation).map_err(data_error)?;
            println!("kappa(Sigma_V) = {:.3e}", d.kappa_sigma_v);
            println!("kappa(Sigma_I) = {:.3e}", d.kappa_sigma_i);
            match d.kappa_xvl {
                Some(k) => println!("kappa(X_VL^H X_VL), L={} = {k:.3e}", truncation.resolve(ds.n())),
                None => println!("kappa(X_VL^H X_VL): truncation invalid for n={}", ds.n()),
            }
            Ok(())
        }
        Some(FileKind::Estimate) => {
            let est = parse_estimate(&text).map_err(with_path(path))?;
            let a = &est.matrix;
            let scale = fro(a).max(f64::MIN_POSITIVE);
            println!("estimate: estimator={} n={}", est.estimator, a.nrows());
            for (k, v) in &est.config {
                println!("  {k} = {v}");
            }
            println!("symmetry residual: {:.3e}", fro(&(a - a.transpose())) / scale);
            println!("row-sum residual: {:.3e}", (a * ones(a.nrows())).norm() / scale);
            if let Some(t) = &args.truth {
                let (_, spec) = load_network(t)?;
                let y = build_admittance(&spec);
                println!("eps_F = {:.4e}", relative_frobenius_error(a, y.matrix()).map_err(config_error)?);
            }
            Ok(())
        }
        None => Err(data_error(format!("{}: not a gridspect network, phasor or estimate file", path.display()))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Generate(args) => generate(args, cli.seed, &cli.out),
        Command::Estimate(args) => estimate(args, &cli.out),
        Command::Benchmark(args) => benchmark(args, cli.seed, &cli.out),
        Command::Inspect(args) => inspect(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
