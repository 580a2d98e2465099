//! End-to-end orchestration: hashing and indexing, k-NN graph, spanning
//! forest, layout.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::PathBuf;
use std::time::Instant;

use thiserror::Error;

use crate::eval::{log_log_slope, PhaseTimings};
use crate::exec::Exec;
use crate::forest::{ForestError, LshForest, LshForestConfig};
use crate::hashing::{Encoder, HashingConfig, HashingError, SignatureMatrix, SparseBinarySet};
use crate::io::{self, Dataset, InputFormat, IoError, Metadata, OutputOptions};
use crate::knng::{build_knn_graph, graph_from_edge_list, GraphError, KnnGraphConfig};
use crate::layout::{layout, LayoutConfig, LayoutResult};
use crate::mst::kruskal;
use crate::rng::StreamRng;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Hashing(#[from] HashingError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] IoError),
}

impl PipelineError {
    /// True for errors caused by the configuration rather than the data.
    pub fn is_usage(&self) -> bool {
        matches!(self, PipelineError::Config(_) | PipelineError::Forest(ForestError::ConfigMismatch { .. }))
    }
}

/// Similarity the signatures estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbedMetric {
    /// Set Jaccard; dense rows are reduced to their positive support.
    Jaccard,
    WeightedJaccard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedConfig {
    pub d: usize,
    pub l: usize,
    pub k: usize,
    pub kc: usize,
    pub seed: u64,
    pub metric: EmbedMetric,
    pub layout: LayoutConfig,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            d: 512,
            l: 8,
            k: 10,
            kc: 10,
            seed: 42,
            metric: EmbedMetric::Jaccard,
            layout: LayoutConfig::default(),
        }
    }
}

impl EmbedConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_string()));
        if self.d == 0 {
            return bad("d must be at least 1");
        }
        if self.l == 0 || self.d % self.l != 0 {
            return bad(&format!("l must divide d (d = {}, l = {})", self.d, self.l));
        }
        if self.k == 0 || self.kc == 0 {
            return bad("k and kc must be at least 1");
        }
        self.layout.validate().map_err(|m| PipelineError::Config(m.to_string()))
    }
}

/// Layout plus the wall time of each phase.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub result: LayoutResult,
    pub timings: PhaseTimings,
}

/// Phase I: signatures and LSH Forest.
pub fn index_dataset(dataset: &Dataset, config: &EmbedConfig, exec: Exec) -> Result<LshForest, PipelineError> {
    let signatures: SignatureMatrix = match (dataset, config.metric) {
        (Dataset::Sets(sets), EmbedMetric::Jaccard) => {
            Encoder::new(HashingConfig::binary(config.d, config.seed))?.encode_sets(sets, exec)?
        }
        (Dataset::Vectors(vecs), EmbedMetric::Jaccard) => {
            let sets: Vec<SparseBinarySet> = vecs.iter().map(|v| v.support()).collect();
            Encoder::new(HashingConfig::binary(config.d, config.seed))?.encode_sets(&sets, exec)?
        }
        (Dataset::Vectors(vecs), EmbedMetric::WeightedJaccard) => {
            let dim = vecs.first().map_or(0, |v| v.dim());
            Encoder::new(HashingConfig::weighted(config.d, dim, config.seed))?.encode_vectors(vecs, exec)?
        }
        (Dataset::Sets(_), EmbedMetric::WeightedJaccard) => {
            return Err(PipelineError::Config(
                "weighted-jaccard needs dense-csv input".to_string(),
            ))
        }
        (Dataset::Edges { .. }, _) => {
            return Err(PipelineError::Config("edge lists are not indexed".to_string()))
        }
    };
    Ok(LshForest::build(signatures, LshForestConfig { l: config.l }, exec)?)
}

/// Runs all phases; edge-list input skips hashing, indexing and the k-NN graph.
pub fn embed(dataset: &Dataset, config: &EmbedConfig, exec: Exec) -> Result<Embedding, PipelineError> {
    config.validate()?;
    let start = Instant::now();
    let mut timings = PhaseTimings::default();

    let graph = match dataset {
        Dataset::Edges { n, entries } => graph_from_edge_list(entries, *n)?,
        _ => {
            let t = Instant::now();
            let forest = index_dataset(dataset, config, exec)?;
            timings.index = t.elapsed();
            let t = Instant::now();
            let graph = build_knn_graph(
                &forest,
                KnnGraphConfig {
                    k: config.k,
                    kc: config.kc,
                },
                exec,
            )?;
            timings.knng = t.elapsed();
            graph
        }
    };

    let t = Instant::now();
    let forest = kruskal(&graph);
    timings.mst = t.elapsed();

    let t = Instant::now();
    let layout_config = LayoutConfig {
        seed: config.seed,
        ..config.layout.clone()
    };
    let result = layout(&forest, &layout_config, exec);
    timings.layout = t.elapsed();
    timings.total = start.elapsed();
    Ok(Embedding { result, timings })
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub embed: EmbedConfig,
    pub out_dir: PathBuf,
    pub svg: bool,
    pub meta: Option<PathBuf>,
    pub color_by: Option<String>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub files: Vec<PathBuf>,
    pub timings: PhaseTimings,
    pub n: usize,
    pub components: usize,
}

/// Reads the input, embeds it and writes `nodes.csv`, `edges.csv` and
/// optionally `plot.svg`.
pub fn run_pipeline(config: &PipelineConfig, exec: Exec) -> Result<PipelineOutput, PipelineError> {
    config.embed.validate()?;
    if config.color_by.is_some() && config.meta.is_none() {
        return Err(PipelineError::Config("--color-by requires --meta".to_string()));
    }
    let dataset = io::parse_input(&config.input, config.format)?;
    let metadata = config.meta.as_deref().map(Metadata::read).transpose()?;
    if let Some(m) = &metadata {
        if m.rows.len() != dataset.len() {
            return Err(IoError::MetadataLengthMismatch {
                expected: dataset.len(),
                found: m.rows.len(),
            }
            .into());
        }
    }
    let embedding = embed(&dataset, &config.embed, exec)?;
    let files = io::write_outputs(
        &embedding.result,
        &config.out_dir,
        &OutputOptions {
            metadata: metadata.as_ref(),
            color_by: config.color_by.as_deref(),
            svg: config.svg,
        },
    )?;
    let mut labels = embedding.result.component.clone();
    labels.sort_unstable();
    labels.dedup();
    Ok(PipelineOutput {
        files,
        timings: embedding.timings,
        n: embedding.result.n(),
        components: labels.len(),
    })
}

/// Seeded random binary sets: each of `dim` components is present with
/// probability `density`; empty draws keep one random component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub dim: u32,
    pub density: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            dim: 128,
            density: 0.5,
            seed: 7,
        }
    }
}

pub fn synthetic_sets(n: usize, spec: &SyntheticSpec) -> Vec<SparseBinarySet> {
    let mut rng = StreamRng::new(spec.seed);
    (0..n)
        .map(|_| {
            let mut elems: Vec<u32> = (0..spec.dim).filter(|_| rng.next_unit() < spec.density).collect();
            if elems.is_empty() {
                elems.push(rng.below(spec.dim as u64) as u32);
            }
            SparseBinarySet::new(elems).expect("ascending by construction")
        })
        .collect()
}

/// Hash of coordinates and tree edges, for comparing runs.
pub fn artifact_digest(result: &LayoutResult) -> u64 {
    let mut h = DefaultHasher::new();
    for c in &result.coords {
        c[0].to_bits().hash(&mut h);
        c[1].to_bits().hash(&mut h);
    }
    for e in &result.tree_edges {
        (e.u, e.v, e.w.to_bits()).hash(&mut h);
    }
    result.component.hash(&mut h);
    h.finish()
}

#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub n: usize,
    pub timings: PhaseTimings,
    pub digest: u64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    /// Least-squares slope of ln(total time) against ln(n).
    pub slope: f64,
}

impl BenchReport {
    pub fn csv(&self) -> String {
        let mut s = String::from("n,index_s,knng_s,mst_s,layout_s,total_s\n");
        for r in &self.records {
            let t = &r.timings;
            s.push_str(&format!(
                "{},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
                r.n,
                t.index.as_secs_f64(),
                t.knng.as_secs_f64(),
                t.mst.as_secs_f64(),
                t.layout.as_secs_f64(),
                t.total.as_secs_f64()
            ));
        }
        s
    }
}

/// Runs the full pipeline on synthetic data for each size and fits the
/// scaling exponent of the total time.
pub fn bench_pipeline(sizes: &[usize], spec: &SyntheticSpec, config: &EmbedConfig, exec: Exec) -> Result<BenchReport, PipelineError> {
    if sizes.len() < 2 {
        return Err(PipelineError::Config("bench needs at least two sizes".to_string()));
    }
    if sizes.windows(2).any(|w| w[0] > w[1]) || sizes[0] < 2 {
        return Err(PipelineError::Config("sizes must be ascending and at least 2".to_string()));
    }
    let mut records = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let data = Dataset::Sets(synthetic_sets(n, spec));
        let e = embed(&data, config, exec)?;
        records.push(BenchRecord {
            n,
            timings: e.timings,
            digest: artifact_digest(&e.result),
        });
    }
    let points: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.n as f64, r.timings.total.as_secs_f64().max(1e-9)))
        .collect();
    Ok(BenchReport {
        slope: log_log_slope(&points),
        records,
    })
}
