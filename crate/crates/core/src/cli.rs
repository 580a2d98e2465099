//! Command-line interface: `embed`, `eval` and `bench`.
//!
//! Exit status is 0 on success, 1 on usage errors and 2 on data errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::eval::{euclidean_ranks, topological_ranks, true_nearest_neighbors, Items, Metric};
use crate::exec::Exec;
use crate::io::{self, Dataset, InputFormat};
use crate::layout::LayoutConfig;
use crate::pipeline::{bench_pipeline, run_pipeline, EmbedConfig, EmbedMetric, PipelineConfig, PipelineError, SyntheticSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "treeviz", version, about = "Lay out high-dimensional data as a minimum spanning tree")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full pipeline and write nodes.csv, edges.csv (and plot.svg).
    Embed(EmbedArgs),
    /// Rank reports for an input and a layout previously written by `embed`.
    Eval(EvalArgs),
    /// Time the pipeline on synthetic binary sets of increasing size.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    SparseBinary,
    DenseCsv,
    EdgeList,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::SparseBinary => InputFormat::SparseBinary,
            FormatArg::DenseCsv => InputFormat::DenseCsv,
            FormatArg::EdgeList => InputFormat::EdgeList,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Jaccard,
    WeightedJaccard,
    Euclidean,
}

#[derive(Debug, Args)]
struct Params {
    /// Number of hash functions.
    #[arg(long, default_value_t = 512)]
    d: usize,
    /// Number of prefix trees; must divide d.
    #[arg(long, default_value_t = 8)]
    l: usize,
    /// Neighbors per node in the k-NN graph.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Candidate multiplier of the k-NN query.
    #[arg(long, default_value_t = 10)]
    kc: usize,
    /// Point size of the layout.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Force iterations per level.
    #[arg(long, default_value_t = 200)]
    iterations: usize,
    /// Barnes-Hut opening criterion.
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Distance exponent of the repulsion; 1 is the classic inverse-distance law.
    #[arg(long, default_value_t = 2.0)]
    repulsion_exponent: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl Params {
    fn embed_config(&self, metric: EmbedMetric) -> EmbedConfig {
        EmbedConfig {
            d: self.d,
            l: self.l,
            k: self.k,
            kc: self.kc,
            seed: self.seed,
            metric,
            layout: LayoutConfig {
                p: self.p,
                iterations_per_level: self.iterations,
                theta: self.theta,
                repulsion_exponent: self.repulsion_exponent,
                seed: self.seed,
                ..LayoutConfig::default()
            },
        }
    }
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "sparse-binary")]
    input_format: FormatArg,
    #[arg(long, value_enum, default_value = "jaccard")]
    metric: MetricArg,
    #[command(flatten)]
    params: Params,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Also write plot.svg.
    #[arg(long)]
    svg: bool,
    /// Per-node metadata CSV with a header row, joined by row order.
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Metadata column used to color the SVG nodes.
    #[arg(long)]
    color_by: Option<String>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "sparse-binary")]
    input_format: FormatArg,
    #[arg(long, value_enum, default_value = "jaccard")]
    metric: MetricArg,
    /// Directory holding nodes.csv and edges.csv; rank histograms are written here.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated ascending item counts.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[command(flatten)]
    params: Params,
    /// Components per synthetic binary vector.
    #[arg(long, default_value_t = 128)]
    dim: u32,
    /// Probability that a component is set.
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Optional directory for bench.csv.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

fn synopsis() -> String {
    use clap::CommandFactory;
    Cli::command().render_usage().to_string()
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit status.
pub fn cli_entry<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let rendered = e.to_string();
            let reason: Vec<&str> = rendered
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            let _ = writeln!(err, "{}", reason.join(" "));
            let _ = writeln!(err, "{}", synopsis());
            return EXIT_USAGE;
        }
    };
    let exec = Exec::default();
    let result = match cli.command {
        Command::Embed(args) => run_embed(args, exec, out),
        Command::Eval(args) => run_eval(args, exec, out),
        Command::Bench(args) => run_bench(args, exec, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            let _ = writeln!(err, "{}", synopsis());
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_DATA
        }
    }
}

fn embed_metric(m: MetricArg) -> Result<EmbedMetric, Failure> {
    match m {
        MetricArg::Jaccard => Ok(EmbedMetric::Jaccard),
        MetricArg::WeightedJaccard => Ok(EmbedMetric::WeightedJaccard),
        MetricArg::Euclidean => Err(Failure::Usage("embed supports --metric jaccard or weighted-jaccard".into())),
    }
}

fn run_embed(args: EmbedArgs, exec: Exec, out: &mut dyn Write) -> Result<(), Failure> {
    let metric = embed_metric(args.metric)?;
    let format: InputFormat = args.input_format.into();
    if metric == EmbedMetric::WeightedJaccard && format == InputFormat::SparseBinary {
        return Err(Failure::Usage("--metric weighted-jaccard requires --input-format dense-csv".into()));
    }
    let config = PipelineConfig {
        input: args.input,
        format,
        embed: args.params.embed_config(metric),
        out_dir: args.out_dir,
        svg: args.svg,
        meta: args.meta,
        color_by: args.color_by,
    };
    let output = run_pipeline(&config, exec)?;
    let _ = writeln!(out, "n={} components={}", output.n, output.components);
    let _ = writeln!(out, "{}", output.timings.report());
    for f in &output.files {
        let _ = writeln!(out, "wrote {}", f.display());
    }
    Ok(())
}

fn run_eval(args: EvalArgs, exec: Exec, out: &mut dyn Write) -> Result<(), Failure> {
    let data = |e: io::IoError| Failure::Data(e.to_string());
    let dataset = io::parse_input(&args.input, args.input_format.into()).map_err(data)?;
    let metric = match args.metric {
        MetricArg::Jaccard => Metric::Jaccard,
        MetricArg::WeightedJaccard => Metric::WeightedJaccard,
        MetricArg::Euclidean => Metric::Euclidean,
    };
    let items = match &dataset {
        Dataset::Sets(s) => Items::Sets(s),
        Dataset::Vectors(v) => Items::Vectors(v),
        Dataset::Edges { .. } => return Err(Failure::Usage("eval needs sparse-binary or dense-csv input".into())),
    };
    let coords = io::read_nodes(&args.out_dir.join("nodes.csv")).map_err(data)?;
    let edges = io::read_edges(&args.out_dir.join("edges.csv")).map_err(data)?;
    let nn = true_nearest_neighbors(items, metric, exec).map_err(|e| match e {
        crate::eval::EvalError::MetricMismatch { .. } => Failure::Usage(e.to_string()),
        other => Failure::Data(other.to_string()),
    })?;
    if edges.iter().any(|e| e.u as usize >= nn.len() || e.v as usize >= nn.len()) {
        return Err(Failure::Data("edges.csv references nodes beyond the input".into()));
    }
    let topo = topological_ranks(nn.len(), &edges, &nn, exec).map_err(|e| Failure::Data(e.to_string()))?;
    let eucl = euclidean_ranks(&coords, &nn, exec).map_err(|e| Failure::Data(e.to_string()))?;
    let _ = writeln!(out, "{}", topo.summary("topological"));
    let _ = writeln!(out, "{}", eucl.summary("euclidean"));
    for (name, report) in [("topological_ranks.csv", &topo), ("euclidean_ranks.csv", &eucl)] {
        let path = io::write_atomic(&args.out_dir, name, report.histogram_csv().as_bytes()).map_err(data)?;
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok(())
}

fn run_bench(args: BenchArgs, exec: Exec, out: &mut dyn Write) -> Result<(), Failure> {
    if args.dim == 0 || !(0.0..=1.0).contains(&args.density) {
        return Err(Failure::Usage("--dim must be positive and --density within [0, 1]".into()));
    }
    let spec = SyntheticSpec {
        dim: args.dim,
        density: args.density,
        seed: args.params.seed,
    };
    let config = args.params.embed_config(EmbedMetric::Jaccard);
    let report = bench_pipeline(&args.sizes, &spec, &config, exec)?;
    for r in &report.records {
        let _ = writeln!(out, "n={} {}", r.n, r.timings.report());
    }
    let _ = writeln!(out, "slope={:.4}", report.slope);
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Data(e.to_string()))?;
        let path = io::write_atomic(dir, "bench.csv", report.csv().as_bytes()).map_err(|e| Failure::Data(e.to_string()))?;
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok(())
}
