//! `tropnn`: data generation, training, evaluation and init statistics.
//!
//! Every command that writes files also writes `<output>.manifest.json`
//! holding the full parsed command line; `tropnn replay` re-runs it.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use tropnn_core::eval::{accuracy, auc, roc_curve, roc_to_csv, ScoredLabels};
use tropnn_core::experiment::{coalescent_trial_on, summary_csv, CompareConfig};
use tropnn_core::init::{
    dtr_stats_standard, dtr_stats_unit_variance, monte_carlo_dtr, unit_variance_stddev, InitPolicy,
};
use tropnn_core::nn::{build_from_spec, predict_proba, train, ArchSpec, BuildOptions, InputKind, Loss, TrainConfig};
use tropnn_core::phylo::{cophenetic_vector, is_equidistant, is_ultrametric, pair_names, parse_newick_lines, to_newick};
use tropnn_core::simulate::{gaussian_translated, simulate_coalescent, CoalescentConfig, GaussianConfig, MeansPreset};
use tropnn_core::{Dataset, Model};

#[derive(Debug, Parser)]
#[command(name = "tropnn", version, about = "Tropical neural networks for phylogenetic data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Simulate a labelled dataset.
    #[command(subcommand)]
    Generate(Generate),
    /// Work with Newick tree files.
    #[command(subcommand)]
    Trees(Trees),
    /// Train a model with mini-batch SGD.
    Train(TrainArgs),
    /// Score a model on a labelled dataset.
    Eval(EvalArgs),
    /// Tropical versus ReLU comparisons.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Predicted and simulated statistics of the tropical distance at initialization.
    InitStats(InitStatsArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Generate {
    /// Two Gaussian classes shifted along the all-ones vector.
    Gaussian(GaussianArgs),
    /// Gene trees under two random species trees.
    Coalescent(CoalescentArgs),
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Trees {
    /// Turn equidistant trees into cophenetic-vector CSV rows.
    Vectorize(VectorizeArgs),
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Experiment {
    /// Train tropical and ReLU models of equal width and write both ROC curves.
    RocCompare(RocCompareArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum PresetArg {
    Small,
    Highdim,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum LossArg {
    Bce,
    Squared,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum InitArg {
    Fixed,
    UnitVariance,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
struct ManifestArg {
    /// Where to write the run manifest (default: next to the main output).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct GaussianArgs {
    #[arg(long)]
    dim: usize,
    /// Points per class.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trans_std: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "highdim")]
    means_preset: PresetArg,
    #[command(flatten)]
    #[serde(skip)]
    manifest: ManifestArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct CoalescentArgs {
    #[arg(long)]
    leaves: usize,
    #[arg(long)]
    ne: f64,
    /// Species depth over effective population size.
    #[arg(long)]
    ratio: f64,
    /// Gene trees per class.
    #[arg(long)]
    trees: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_prefix: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    manifest: ManifestArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct VectorizeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Class label (0 or 1) written to every row.
    #[arg(long)]
    label: Option<u8>,
    #[arg(long, default_value_t = tropnn_core::phylo::DEFAULT_TOL)]
    tol: f64,
    /// Multiply every distance by this factor, e.g. 1/Ne.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[command(flatten)]
    #[serde(skip)]
    manifest: ManifestArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    /// Layer list such as `trop:16,dense:1,sigmoid`, or `trop-logistic`.
    #[arg(long)]
    arch: String,
    #[arg(long)]
    epochs: usize,
    #[arg(long)]
    lr: f64,
    #[arg(long)]
    batch: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "bce")]
    loss: LossArg,
    /// Tropical weight scale.
    #[arg(long, value_enum, default_value = "fixed")]
    init: InitArg,
    /// Standard deviation for `--init fixed`.
    #[arg(long, default_value_t = tropnn_core::init::DEFAULT_STDDEV)]
    init_std: f64,
    #[command(flatten)]
    #[serde(skip)]
    manifest: ManifestArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Write the ROC curve here.
    #[arg(long)]
    roc: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[command(flatten)]
    #[serde(skip)]
    manifest: ManifestArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct RocCompareArgs {
    /// Rows of this file are class 0.
    #[arg(long)]
    data0: PathBuf,
    /// Rows of this file are class 1.
    #[arg(long)]
    data1: PathBuf,
    #[arg(long)]
    hidden: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_prefix: PathBuf,
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    #[arg(long, default_value_t = 8)]
    batch: usize,
    #[arg(long, default_value_t = 0.3)]
    test_fraction: f64,
    #[command(flatten)]
    #[serde(skip)]
    manifest: ManifestArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct InitStatsArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    /// `fixed` draws weights from N(0, 1); `unit-variance` rescales them so
    /// the distance has unit variance.
    #[arg(long, value_enum, default_value = "fixed")]
    sigma_w: InitArg,
    #[command(flatten)]
    #[serde(skip)]
    manifest: ManifestArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct ReplayArgs {
    manifest: PathBuf,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    tool: String,
    version: String,
    command: Command,
}

impl Manifest {
    fn new(command: &Command) -> Self {
        Manifest {
            tool: "tropnn".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.clone(),
        }
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn write_manifest(command: &Command, explicit: &ManifestArg, default: Option<&Path>) -> Result<()> {
    let path = match (&explicit.manifest, default) {
        (Some(p), _) => p.clone(),
        (None, Some(out)) => with_suffix(out, ".manifest.json"),
        (None, None) => return Ok(()),
    };
    let mut text = serde_json::to_string_pretty(&Manifest::new(command))?;
    text.push('\n');
    write_file(&path, text)
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    Ok(Dataset::load(path)?)
}

fn save_dataset(ds: &Dataset, path: &Path) -> Result<()> {
    Ok(ds.save(path)?)
}

fn run(command: &Command) -> Result<()> {
    match command {
        Command::Generate(Generate::Gaussian(a)) => {
            let preset = match a.means_preset {
                PresetArg::Small => MeansPreset::Small,
                PresetArg::Highdim => MeansPreset::Highdim,
            };
            let cfg = GaussianConfig::preset(preset, a.dim, a.n, a.trans_std, a.seed)?;
            save_dataset(&gaussian_translated(&cfg)?, &a.out)?;
            write_manifest(command, &a.manifest, Some(&a.out))
        }
        Command::Generate(Generate::Coalescent(a)) => {
            let cfg = CoalescentConfig {
                leaves: a.leaves,
                ne: a.ne,
                ratio: a.ratio,
                trees: a.trees,
                seed: a.seed,
            };
            let sample = simulate_coalescent(&cfg)?;
            for (k, trees) in sample.gene_trees.iter().enumerate() {
                let text: String = trees.iter().map(|t| to_newick(t) + "\n").collect();
                write_file(&with_suffix(&a.out_prefix, &format!("_class{k}.nwk")), text)?;
            }
            for (k, t) in sample.species.iter().enumerate() {
                write_file(&with_suffix(&a.out_prefix, &format!("_species{k}.nwk")), to_newick(t) + "\n")?;
            }
            save_dataset(&sample.dataset, &with_suffix(&a.out_prefix, ".csv"))?;
            write_manifest(command, &a.manifest, Some(&a.out_prefix))
        }
        Command::Trees(Trees::Vectorize(a)) => {
            vectorize(a)?;
            write_manifest(command, &a.manifest, Some(&a.out))
        }
        Command::Train(a) => {
            train_cmd(a)?;
            write_manifest(command, &a.manifest, Some(&a.out))
        }
        Command::Eval(a) => {
            print!("{}", eval_cmd(a)?);
            write_manifest(command, &a.manifest, a.roc.as_deref())
        }
        Command::Experiment(Experiment::RocCompare(a)) => {
            roc_compare(a)?;
            write_manifest(command, &a.manifest, Some(&a.out_prefix))
        }
        Command::InitStats(a) => {
            print!("{}", init_stats(a)?);
            write_manifest(command, &a.manifest, None)
        }
        Command::Replay(a) => {
            let text = fs::read_to_string(&a.manifest)
                .with_context(|| format!("cannot read manifest {}", a.manifest.display()))?;
            let manifest: Manifest = serde_json::from_str(&text)
                .with_context(|| format!("invalid manifest {}", a.manifest.display()))?;
            if matches!(manifest.command, Command::Replay(_)) {
                bail!("a manifest cannot replay another manifest");
            }
            run(&manifest.command)
        }
    }
}

fn vectorize(a: &VectorizeArgs) -> Result<()> {
    if a.label.is_some_and(|l| l > 1) {
        bail!("--label must be 0 or 1");
    }
    let text = fs::read_to_string(&a.input).with_context(|| format!("cannot read {}", a.input.display()))?;
    let trees = parse_newick_lines(&text).with_context(|| format!("in {}", a.input.display()))?;
    let mut labels: Option<Vec<String>> = None;
    let mut rows = Vec::with_capacity(trees.len());
    let mut skipped = 0usize;
    for (i, tree) in trees.iter().enumerate() {
        let u = cophenetic_vector(tree);
        if !(is_equidistant(tree, a.tol) && is_ultrametric(&u, a.tol)) {
            skipped += 1;
            continue;
        }
        match &labels {
            None => labels = Some(u.labels().to_vec()),
            Some(l) if l.as_slice() != u.labels() => {
                bail!("{}: tree {} has a different leaf set", a.input.display(), i + 1)
            }
            Some(_) => {}
        }
        rows.push(u.values().iter().map(|v| v * a.scale).collect());
    }
    if skipped > 0 {
        eprintln!("warning: skipped {skipped} of {} trees that are not equidistant", trees.len());
    }
    let Some(labels) = labels else {
        bail!("{}: no equidistant trees to vectorize", a.input.display());
    };
    let n = rows.len();
    let ds = Dataset::new(pair_names(&labels), rows, a.label.map(|l| vec![l; n]))?;
    save_dataset(&ds, &a.out)
}

fn train_cmd(a: &TrainArgs) -> Result<()> {
    let data = load_dataset(&a.data)?;
    let arch = ArchSpec::parse(&a.arch)?;
    let opts = BuildOptions {
        input: if arch.first_is_trop() { InputKind::Tropical } else { InputKind::Euclidean },
        init: match a.init {
            InitArg::Fixed => InitPolicy::Fixed(a.init_std),
            InitArg::UnitVariance => InitPolicy::UnitVariance,
        },
        seed: a.seed,
    };
    let model = build_from_spec(&arch, data.dim(), &opts)?;
    let cfg = TrainConfig {
        epochs: a.epochs,
        learning_rate: a.lr,
        batch_size: a.batch,
        seed: a.seed,
        loss: match a.loss {
            LossArg::Bce => Loss::BinaryCrossEntropy,
            LossArg::Squared => Loss::Squared,
        },
    };
    let (model, history) = train(&model, &data, &cfg)?;
    if let Some(last) = history.last() {
        eprintln!("final training loss {last}");
    }
    Ok(model.save(&a.out)?)
}

fn eval_cmd(a: &EvalArgs) -> Result<String> {
    let model = Model::load(&a.model)?;
    let data = load_dataset(&a.data)?;
    let scores = predict_proba(&model, data.features())?;
    let scored = ScoredLabels::new(scores, data.labels()?.to_vec())?;
    let acc = accuracy(&scored, a.threshold);
    let area = auc(&scored)?;
    if let Some(path) = &a.roc {
        write_file(path, roc_to_csv(&roc_curve(&scored)?))?;
    }
    Ok(format!("metric,value\naccuracy,{acc}\nauc,{area}\n"))
}

fn roc_compare(a: &RocCompareArgs) -> Result<()> {
    let d0 = load_dataset(&a.data0)?.relabel(0)?;
    let d1 = load_dataset(&a.data1)?.relabel(1)?;
    let data = d0.concat(&d1)?;
    let cfg = CompareConfig::new(
        a.hidden,
        TrainConfig {
            epochs: a.epochs,
            learning_rate: a.lr,
            batch_size: a.batch,
            seed: a.seed,
            loss: Loss::BinaryCrossEntropy,
        },
    );
    let result = coalescent_trial_on(&data, a.test_fraction, a.seed, &cfg)?;
    write_file(&with_suffix(&a.out_prefix, "_tropical_roc.csv"), roc_to_csv(&result.tropical.roc))?;
    write_file(&with_suffix(&a.out_prefix, "_relu_roc.csv"), roc_to_csv(&result.relu.roc))?;
    let summary = summary_csv(&result);
    write_file(&with_suffix(&a.out_prefix, "_summary.csv"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn init_stats(a: &InitStatsArgs) -> Result<String> {
    let (theory, sigma_w) = match a.sigma_w {
        InitArg::Fixed => (dtr_stats_standard(a.dim)?, 1.0),
        InitArg::UnitVariance => (dtr_stats_unit_variance(a.dim)?, unit_variance_stddev(a.dim)?),
    };
    let sim = monte_carlo_dtr(a.dim, a.samples, 1.0, sigma_w, a.seed)?;
    Ok(format!(
        "source,mean,std\ntheory,{},{}\nempirical,{},{}\n",
        theory.mean, theory.std, sim.mean, sim.std
    ))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
