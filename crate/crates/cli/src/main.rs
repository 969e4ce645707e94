//! `regsaffron`: design, run and decode group tests.
//!
//! Exit status is 0 on success, 1 when `simulate --fail-above` trips, and 2
//! on bad usage or malformed input.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use regsaffron::analysis::optimize_constants;
use regsaffron::decoder::{peel_with, singleton_only_decode_with, BinRule, DecodeOptions};
use regsaffron::ecc::CodeSpec;
use regsaffron::encoder::{assemble_dense, measure, Measurements, NoiseModel, SchemeSpec};
use regsaffron::graph::{Backend, BinSizing, BipartiteGraph, GraphParams};
use regsaffron::harness::{run_sweep, write_csv, ExperimentConfig};
use regsaffron::perm::mix_seed;
use regsaffron::signature::SignatureParams;

#[derive(Parser)]
#[command(name = "regsaffron", version, about = "Non-adaptive group testing with regular sparse-graph codes")]
struct Cli {
    /// Seed for sampled graphs, signatures and noise. Overrides a config's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Peel,
    Robust,
    SingletonOnly,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimal left degree and bins per defective for each error floor.
    Optimize {
        #[arg(long, required = true, num_args = 1..)]
        epsilon: Vec<String>,
    },
    /// Run a Monte Carlo sweep described by a JSON config; emits CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Exit 1 if any point's unidentified fraction exceeds this.
        #[arg(long)]
        fail_above: Option<f64>,
    },
    /// Describe a scheme as JSON, or print its dense test matrix as CSV.
    GenScheme {
        #[arg(long)]
        items: u64,
        /// Bin count; raised to a divisor of N·ℓ under exact sizing.
        #[arg(long)]
        bins: u64,
        #[arg(long)]
        left_degree: u32,
        #[arg(long, default_value_t = 1)]
        sections: usize,
        /// identity, rep(t) or rs(n;k;gf2^m).
        #[arg(long, default_value = "identity")]
        code: CodeSpec,
        #[arg(long, value_enum, default_value = "explicit-permutation")]
        backend: BackendArg,
        #[arg(long, value_enum, default_value = "exact")]
        sizing: SizingArg,
        /// JSON array of bins, each a list of items by slot; fixes the graph.
        #[arg(long)]
        bin_lists: Option<PathBuf>,
        #[arg(long)]
        dense: bool,
    },
    /// Measure a defective set; writes the binary measurement container.
    Measure {
        #[arg(long)]
        scheme: PathBuf,
        /// Comma-separated item indices.
        #[arg(long, value_delimiter = ',')]
        defectives: Vec<u64>,
        /// BSC flip probability.
        #[arg(long)]
        noise_q: Option<f64>,
    },
    /// Decode a measurement container against a scheme; emits JSON.
    Decode {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        measurements: PathBuf,
        /// Defaults to robust peeling for coded schemes and plain peeling otherwise.
        #[arg(long, value_enum)]
        decoder: Option<DecoderArg>,
        #[arg(long)]
        max_pops: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    ExplicitPermutation,
    PseudorandomPermutation,
    LeftRegular,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::ExplicitPermutation => Backend::ExplicitPermutation,
            BackendArg::PseudorandomPermutation => Backend::PseudorandomPermutation,
            BackendArg::LeftRegular => Backend::LeftRegular,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SizingArg {
    Exact,
    Balanced,
}

impl From<SizingArg> for BinSizing {
    fn from(s: SizingArg) -> Self {
        match s {
            SizingArg::Exact => BinSizing::Exact,
            SizingArg::Balanced => BinSizing::Balanced,
        }
    }
}

/// Raised when a simulation crosses `--fail-above`.
#[derive(Debug)]
struct ThresholdExceeded(String);

impl std::fmt::Display for ThresholdExceeded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ThresholdExceeded {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ThresholdExceeded>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_scheme(path: &Path) -> Result<SchemeSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing scheme {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();
    match cli.cmd {
        Cmd::Optimize { epsilon } => {
            let mut w = output(out)?;
            writeln!(w, "epsilon,ell,c")?;
            for text in epsilon {
                let eps: f64 = text.parse().with_context(|| format!("bad epsilon `{text}`"))?;
                let (l, c) = optimize_constants(eps)?;
                writeln!(w, "{text},{l},{c:.2}")?;
            }
            w.flush()?;
        }
        Cmd::Simulate { config, fail_above } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = ExperimentConfig::from_json(&text).with_context(|| format!("config {}", config.display()))?;
            if let Some(s) = cli.seed {
                cfg.master_seed = s;
            }
            let rows = run_sweep(&cfg)?;
            let mut w = output(out)?;
            write_csv(&mut w, &rows)?;
            w.flush()?;
            if let Some(limit) = fail_above {
                if let Some(r) = rows.iter().find(|r| r.frac_unidentified > limit) {
                    return Err(ThresholdExceeded(format!(
                        "unidentified fraction {} exceeds {limit} (M = {})",
                        r.frac_unidentified, r.point.size.n_bins
                    ))
                    .into());
                }
            }
        }
        Cmd::GenScheme {
            items,
            bins,
            left_degree,
            sections,
            code,
            backend,
            sizing,
            bin_lists,
            dense,
        } => {
            let (graph, backend, lists) = match bin_lists {
                Some(path) => {
                    let text =
                        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    let lists: Vec<Vec<u64>> = serde_json::from_str(&text).context("parsing bin lists")?;
                    let g = BipartiteGraph::from_bin_lists(items, left_degree, &lists)?;
                    if g.n_bins() != bins {
                        bail!("--bins {bins} but the bin lists hold {}", g.n_bins());
                    }
                    (*g.params(), g.backend(), Some(lists))
                }
                None => {
                    let params = GraphParams::with_target_bins(items, left_degree, bins, sizing.into(), seed)?;
                    let backend = Backend::from(backend);
                    let g = BipartiteGraph::sample(params, backend)?;
                    // The baseline's realized degrees are only known after sampling.
                    let mut params = params;
                    params.right_degree = g.max_bin_degree();
                    (params, backend, None)
                }
            };
            let spec = SchemeSpec {
                graph,
                backend,
                bins: lists,
                signature: SignatureParams {
                    r: graph.right_degree,
                    sections,
                    code,
                    seed: mix_seed(seed, 1),
                },
            };
            let scheme = spec.build()?;
            let mut w = output(out)?;
            if dense {
                w.write_all(assemble_dense(&scheme)?.to_csv().as_bytes())?;
            } else {
                serde_json::to_writer_pretty(&mut w, &spec)?;
                writeln!(w)?;
            }
            w.flush()?;
        }
        Cmd::Measure {
            scheme,
            mut defectives,
            noise_q,
        } => {
            let scheme = read_scheme(&scheme)?.build()?;
            defectives.sort_unstable();
            defectives.dedup();
            let noise = match noise_q {
                Some(q) => NoiseModel::bsc(q, seed)?,
                None => NoiseModel::None,
            };
            let m = measure(&scheme, &defectives, noise)?;
            let mut w = output(out)?;
            m.write_to(&mut w)?;
            w.flush()?;
        }
        Cmd::Decode {
            scheme,
            measurements,
            decoder,
            max_pops,
        } => {
            let scheme = read_scheme(&scheme)?.build()?;
            let file = File::open(&measurements).with_context(|| format!("opening {}", measurements.display()))?;
            let meas = Measurements::read_from(BufReader::new(file))
                .with_context(|| format!("reading {}", measurements.display()))?;
            let rule = match decoder {
                Some(DecoderArg::Peel) => BinRule::NOISELESS,
                Some(DecoderArg::Robust) => BinRule::ROBUST,
                _ => BinRule::for_signature(scheme.signature()),
            };
            let res = match decoder {
                Some(DecoderArg::SingletonOnly) => singleton_only_decode_with(&scheme, &meas, rule)?,
                _ => peel_with(&scheme, &meas, DecodeOptions { rule, max_pops })?,
            };
            let mut w = output(out)?;
            serde_json::to_writer_pretty(&mut w, &res)?;
            writeln!(w)?;
            w.flush()?;
        }
    }
    Ok(())
}
