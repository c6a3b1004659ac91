use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ksvm::classify::{self, empirical_risks};
use ksvm::data::{
    gen_blobs, gen_waveform, read_dataset, write_csv, write_sparse, BlobSpec,
    RegressionDataset, WaveformSpec, RNG_ID,
};
use ksvm::experiment::{run_experiment, ExperimentConfig, ExperimentId};
use ksvm::multiclass;
use ksvm::regress::{self, epsilon_risk};
use ksvm::{train_ovo, train_svc, train_svr, KernelSpec, Model, SolverConfig, SvmError};

#[derive(Parser)]
#[command(name = "ksvm", version, about = "Kernel support vector machines")]
struct Cli {
    /// Master seed for generators and experiments
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Solver stopping tolerance on the maximal KKT violation
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Print solver diagnostics to stderr
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Train a model
    Train(TrainArgs),
    /// Predict one value per sample
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Write predictions here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report error rates, support vectors and risks of a model on a dataset
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// C used for the regularized risk when the model file does not carry it
        #[arg(long)]
        c: Option<f64>,
    },
    /// Run a replication study and check its acceptance bands
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum GenKind {
    /// Gaussian clouds with identity covariance
    Blobs {
        /// Class means, e.g. `0,0 10,10`
        #[arg(long, num_args = 2.., required = true, value_delimiter = ' ')]
        means: Vec<String>,
        /// Samples per class
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Three-class 21-dimensional waveforms
    Waveform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Task {
    Svc,
    Svr,
    Ovo,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, value_enum, default_value = "svc")]
    task: Task,
    #[arg(long)]
    data: PathBuf,
    /// Output model file
    #[arg(long)]
    model: PathBuf,
    /// `linear`, `poly:c=<r>,d=<i>` or `gauss:c=<r>`
    #[arg(long, default_value = "linear")]
    kernel: KernelSpec,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Tube half-width for regression
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_parser = parse_id)]
    id: ExperimentId,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    c: Option<f64>,
    /// Comma-separated C grid for c-sweep
    #[arg(long, value_delimiter = ',')]
    cs: Option<Vec<f64>>,
    #[arg(long)]
    kernel: Option<KernelSpec>,
    /// Also write the per-replication table here
    #[arg(long)]
    tsv: Option<PathBuf>,
}

fn parse_id(s: &str) -> Result<ExperimentId, String> {
    s.parse().map_err(|e: SvmError| e.to_string())
}

enum Failure {
    Usage(String),
    Solver(String),
    Band,
}

impl From<SvmError> for Failure {
    fn from(e: SvmError) -> Self {
        let solver = |e: &SvmError| matches!(e, SvmError::IterationLimit { .. } | SvmError::DegenerateFit);
        match &e {
            SvmError::Replication { source, .. } if solver(source) => Failure::Solver(e.to_string()),
            _ if solver(&e) => Failure::Solver(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn solver_config(tol: Option<f64>) -> SolverConfig {
    tol.map(SolverConfig::with_tolerance).unwrap_or_default()
}

fn parse_point(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("bad coordinate `{t}` in mean `{s}`")))
        })
        .collect()
}

fn write_data(path: &Path, data: &RegressionDataset) -> Result<(), SvmError> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        write_csv(path, data)
    } else {
        write_sparse(path, data)
    }
}

fn write_meta(path: &Path, line: String) -> Result<(), SvmError> {
    let mut meta = path.as_os_str().to_owned();
    meta.push(".meta");
    fs::write(meta, format!("{line} rng={RNG_ID}\n"))?;
    Ok(())
}

fn gen(kind: GenKind, seed: u64) -> Result<(), Failure> {
    match kind {
        GenKind::Blobs { means, n, out } => {
            let means = means.iter().map(|m| parse_point(m)).collect::<Result<Vec<_>, _>>()?;
            let spec = BlobSpec::new(means.clone(), n, seed);
            let data = gen_blobs(&spec)?.to_real();
            write_data(&out, &data)?;
            let ms: Vec<String> = means
                .iter()
                .map(|m| m.iter().map(f64::to_string).collect::<Vec<_>>().join(","))
                .collect();
            write_meta(&out, format!("gen blobs means={} n={n} seed={seed}", ms.join(" ")))?;
        }
        GenKind::Waveform { n, out } => {
            let data = gen_waveform(&WaveformSpec { n, seed })?.to_real();
            write_data(&out, &data)?;
            write_meta(&out, format!("gen waveform n={n} seed={seed}"))?;
        }
    }
    Ok(())
}

fn train(args: TrainArgs, tol: Option<f64>, verbose: bool) -> Result<(), Failure> {
    let data = read_dataset(&args.data)?;
    let config = solver_config(tol);
    let model: Model = match args.task {
        Task::Svc => train_svc(&data.into_labeled()?, &args.kernel, args.c, &config)?.into(),
        Task::Svr => train_svr(&data, &args.kernel, args.c, args.epsilon, &config)?.into(),
        Task::Ovo => train_ovo(&data.into_labeled()?, &args.kernel, args.c, &config)?.into(),
    };
    if verbose {
        let infos: Vec<_> = match &model {
            Model::Svc(m) => vec![m.info.clone()],
            Model::Svr(m) => vec![m.info.clone()],
            Model::Ovo(m) => m.pairs.iter().map(|p| p.model.info.clone()).collect(),
        };
        for i in infos.into_iter().flatten() {
            eprintln!(
                "n={} C={} tol={} iterations={} violation={:e} objective={}",
                i.n_samples, i.cost, i.tolerance, i.iterations, i.max_violation, i.objective
            );
        }
    }
    model.save(&args.model)?;
    Ok(())
}

fn predict(model: &Path, data: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let model = Model::load(model)?;
    let data = read_dataset(data)?;
    let mut text = String::new();
    for x in &data.samples {
        text.push_str(&model.predict(x)?.to_string());
        text.push('\n');
    }
    match out {
        Some(p) => fs::write(p, text).map_err(SvmError::from)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn eval(model: &Path, data: &Path, cost: Option<f64>) -> Result<(), Failure> {
    let model = Model::load(model)?;
    let data = read_dataset(data)?;
    let n = data.len();
    println!("samples {n}");
    match &model {
        Model::Svc(m) => {
            let labeled = data.into_labeled()?;
            println!("error {:.4}%", 100.0 * classify::error_rate(m, &labeled)?);
            println!("support_vectors {} ({:.2}% of samples)", m.n_support(), 100.0 * m.n_support() as f64 / n as f64);
            match empirical_risks(m, &labeled, cost) {
                Ok(r) => {
                    println!("hinge_risk {}", r.hinge);
                    println!("regularized_risk {} (mu {})", r.regularized, r.mu);
                }
                Err(_) => {
                    let mut h = 0.0;
                    for (x, &y) in labeled.samples.iter().zip(&labeled.targets) {
                        h += classify::hinge_loss(y as f64, classify::decision_value(m, x)?);
                    }
                    println!("hinge_risk {}", h / n as f64);
                }
            }
            if let Some(h) = m.hyperplane().filter(|h| h.weights.len() == 2) {
                println!("hyperplane {}x + {}y + {} = 0", h.weights[0], h.weights[1], h.bias);
                let a = h.scaled_to_weight(1);
                println!("normalized(y=1) {:.4}x + {:.4}y + {:.4} = 0", a[0], a[1], a[2]);
                let b = h.scaled_to_intercept();
                println!("normalized(const=-1) {:.4}x + {:.4}y - 1 = 0", b[0], b[1]);
            }
        }
        Model::Svr(m) => {
            let mut sq = 0.0;
            for (x, &y) in data.samples.iter().zip(&data.targets) {
                sq += (regress::predict_svr(m, x)? - y).powi(2);
            }
            println!("epsilon_risk {}", epsilon_risk(m, &data)?);
            println!("rmse {}", (sq / n as f64).sqrt());
            println!("support_vectors {} ({:.2}% of samples)", m.n_support(), 100.0 * m.n_support() as f64 / n as f64);
        }
        Model::Ovo(m) => {
            let labeled = data.into_labeled()?;
            println!("error {:.4}%", 100.0 * multiclass::error_rate(m, &labeled)?);
            println!("support_vectors {} ({:.2}% of samples)", m.n_support(), 100.0 * m.n_support() as f64 / n as f64);
        }
    }
    Ok(())
}

fn experiment(args: ExperimentArgs, seed: u64, tol: Option<f64>) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::new(args.id);
    cfg.seed = seed;
    if let Some(r) = args.reps {
        cfg.replications = r;
    }
    if let Some(t) = tol {
        cfg.solver.tolerance = t;
    }
    if let Some(c) = args.c {
        cfg.cost = c;
    }
    if let Some(cs) = args.cs {
        cfg.costs = cs;
    }
    if let Some(k) = args.kernel {
        cfg.kernel = k;
    }
    let report = run_experiment(&cfg)?;
    print!("{report}");
    if let Some(p) = args.tsv {
        fs::write(p, report.table()).map_err(SvmError::from)?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Band)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen { kind } => gen(kind, cli.seed),
        Command::Train(args) => train(args, cli.tol, cli.verbose),
        Command::Predict { model, data, out } => predict(&model, &data, out),
        Command::Eval { model, data, c } => eval(&model, &data, c),
        Command::Experiment(args) => experiment(args, cli.seed, cli.tol),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Band) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("solver failure: {msg}");
            ExitCode::from(3)
        }
    }
}
