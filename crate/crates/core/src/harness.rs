//! Monte Carlo experiments.
//!
//! A config fixes the scheme family and a sweep axis. Every trial derives its
//! own seed from `(master_seed, trial_index)`, samples a fresh graph,
//! signature and defective set, and reports integer counts. Points aggregate
//! by summing counters, so results do not depend on scheduling.

use std::fmt;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{peeling_size, SchemeSize};
use crate::decoder::{peel, peel_robust, singleton_only_decode, DecodeResult};
use crate::ecc::CodeSpec;
use crate::encoder::{measure, NoiseModel, TestingScheme};
use crate::graph::{Backend, BinSizing, BipartiteGraph, GraphParams};
use crate::perm::mix_seed;
use crate::signature::{SignatureMatrix, SignatureParams};
use crate::{Error, Result};

pub const CSV_HEADER: &str =
    "variant,N,K,ell,s,M,r,m,q,code,e,trials,frac_unidentified,ci_low,ci_high,false_pos_rate,master_seed";

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    NoiselessPeel,
    SingletonOnly,
    RobustPeel,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::NoiselessPeel => "noiseless-peel",
            Variant::SingletonOnly => "singleton-only",
            Variant::RobustPeel => "robust-peel",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "kebab-case")]
pub enum Sweep {
    /// Bins per defective, `M = ⌈cK⌉` before sizing, with a fixed code.
    C { values: Vec<f64>, code: CodeSpec },
    /// Reed–Solomon redundancy: code `RS(k + 2e, k)` at fixed `c`.
    E {
        c: f64,
        values: Vec<usize>,
        k_sym: usize,
        field_bits: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub n_items: u64,
    pub n_defectives: u64,
    pub left_degree: u32,
    pub sections: usize,
    pub backend: Backend,
    pub bin_sizing: BinSizing,
    pub sweep: Sweep,
    /// BSC flip probability; `0` for noiseless measurements.
    pub noise_q: f64,
    pub trials: u64,
    pub master_seed: u64,
}

/// One fully resolved point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub variant: Variant,
    pub n_items: u64,
    pub n_defectives: u64,
    pub backend: Backend,
    pub bin_sizing: BinSizing,
    pub code: CodeSpec,
    /// RS redundancy `(n - k) / 2`, if the code is Reed–Solomon.
    pub e: Option<usize>,
    pub size: SchemeSize,
    pub noise_q: f64,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_defectives > self.n_items {
            return Err(Error::config(format!(
                "K = {} exceeds N = {}",
                self.n_defectives, self.n_items
            )));
        }
        if !(0.0..0.5).contains(&self.noise_q) {
            return Err(Error::config(format!("noise_q must lie in [0, 0.5) (got {})", self.noise_q)));
        }
        let empty = match &self.sweep {
            Sweep::C { values, .. } => values.is_empty(),
            Sweep::E { values, .. } => values.is_empty(),
        };
        if empty {
            return Err(Error::config("sweep axis has no values"));
        }
        if self.variant == Variant::RobustPeel {
            if self.noise_q <= 0.0 {
                return Err(Error::config("robust-peel needs noise_q > 0"));
            }
            if matches!(&self.sweep, Sweep::C { code, .. } if code.is_identity()) {
                return Err(Error::config("robust-peel needs an error-correcting code"));
            }
        }
        if self.variant == Variant::SingletonOnly && self.sections != 1 {
            return Err(Error::config("singleton-only uses exactly one section"));
        }
        self.points().map(|_| ())
    }

    /// Resolve the sweep into concrete points, in axis order.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        let k = self.n_defectives.max(1);
        let specs: Vec<(f64, CodeSpec)> = match &self.sweep {
            Sweep::C { values, code } => values.iter().map(|&c| (c, *code)).collect(),
            Sweep::E {
                c,
                values,
                k_sym,
                field_bits,
            } => values
                .iter()
                .map(|&e| {
                    (
                        *c,
                        CodeSpec::ReedSolomon {
                            n_sym: k_sym + 2 * e,
                            k_sym: *k_sym,
                            field_bits: *field_bits,
                        },
                    )
                })
                .collect(),
        };
        specs
            .into_iter()
            .map(|(c, code)| {
                let size = peeling_size(
                    self.n_items,
                    k,
                    self.left_degree,
                    c,
                    self.sections,
                    code,
                    self.bin_sizing,
                )?;
                Ok(SweepPoint {
                    variant: self.variant,
                    n_items: self.n_items,
                    n_defectives: self.n_defectives,
                    backend: self.backend,
                    bin_sizing: self.bin_sizing,
                    code,
                    e: match code {
                        CodeSpec::ReedSolomon { n_sym, k_sym, .. } => Some((n_sym - k_sym) / 2),
                        _ => None,
                    },
                    size,
                    noise_q: self.noise_q,
                    master_seed: self.master_seed,
                })
            })
            .collect()
    }
}

/// Reproducible part of a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub n_unidentified: u64,
    pub n_false_positives: u64,
    pub m: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub outcome: TrialOutcome,
    pub runtime: Duration,
}

impl SweepPoint {
    /// Seed of trial `index`.
    pub fn trial_seed(&self, index: u64) -> u64 {
        mix_seed(self.master_seed, index)
    }

    /// Sample the scheme used by a trial.
    pub fn scheme(&self, trial_seed: u64) -> Result<TestingScheme> {
        let s = &self.size;
        let gp = GraphParams::with_target_bins(
            self.n_items,
            s.left_degree,
            s.n_bins,
            self.bin_sizing,
            mix_seed(trial_seed, 0),
        )?;
        let graph = BipartiteGraph::sample(gp, self.backend)?;
        let sig = SignatureMatrix::build(SignatureParams {
            r: graph.max_bin_degree().max(2),
            sections: s.sections,
            code: self.code,
            seed: mix_seed(trial_seed, 1),
        })?;
        TestingScheme::new(graph, sig)
    }

    pub fn defectives(&self, trial_seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(trial_seed, 2));
        let mut x: Vec<u64> = sample(&mut rng, self.n_items as usize, self.n_defectives as usize)
            .into_iter()
            .map(|v| v as u64)
            .collect();
        x.sort_unstable();
        x
    }

    pub fn noise(&self, trial_seed: u64) -> Result<NoiseModel> {
        if self.noise_q > 0.0 {
            NoiseModel::bsc(self.noise_q, mix_seed(trial_seed, 3))
        } else {
            Ok(NoiseModel::None)
        }
    }

    pub fn decode(&self, scheme: &TestingScheme, meas: &crate::encoder::Measurements) -> Result<DecodeResult> {
        match self.variant {
            Variant::NoiselessPeel => peel(scheme, meas),
            Variant::RobustPeel => peel_robust(scheme, meas),
            Variant::SingletonOnly => singleton_only_decode(scheme, meas),
        }
    }
}

/// Run one trial at `point`.
pub fn run_trial(point: &SweepPoint, trial_index: u64) -> Result<TrialResult> {
    let start = Instant::now();
    let seed = point.trial_seed(trial_index);
    let scheme = point.scheme(seed)?;
    let m = scheme.n_tests();
    if point.n_defectives == 0 {
        return Ok(TrialResult {
            outcome: TrialOutcome {
                n_unidentified: 0,
                n_false_positives: 0,
                m,
            },
            runtime: start.elapsed(),
        });
    }
    let x = point.defectives(seed);
    let meas = measure(&scheme, &x, point.noise(seed)?)?;
    let res = point.decode(&scheme, &meas)?;
    let (missed, extra) = set_differences(&x, &res.recovered);
    Ok(TrialResult {
        outcome: TrialOutcome {
            n_unidentified: missed,
            n_false_positives: extra,
            m,
        },
        runtime: start.elapsed(),
    })
}

/// `(|a \ b|, |b \ a|)` for sorted, duplicate-free slices.
fn set_differences(a: &[u64], b: &[u64]) -> (u64, u64) {
    let (mut i, mut j, mut common) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (a.len() as u64 - common, b.len() as u64 - common)
}

/// Summed counters of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counters {
    pub trials: u64,
    pub unidentified: u64,
    pub false_positives: u64,
    /// Trials that missed at least one defective.
    pub failed_trials: u64,
    pub runtime_ns: u128,
}

impl Counters {
    fn of(t: &TrialResult) -> Self {
        Counters {
            trials: 1,
            unidentified: t.outcome.n_unidentified,
            false_positives: t.outcome.n_false_positives,
            failed_trials: (t.outcome.n_unidentified > 0) as u64,
            runtime_ns: t.runtime.as_nanos(),
        }
    }

    fn merge(self, o: Self) -> Self {
        Counters {
            trials: self.trials + o.trials,
            unidentified: self.unidentified + o.unidentified,
            false_positives: self.false_positives + o.false_positives,
            failed_trials: self.failed_trials + o.failed_trials,
            runtime_ns: self.runtime_ns + o.runtime_ns,
        }
    }
}

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

pub fn wilson95(successes: u64, n: u64) -> (f64, f64) {
    wilson_interval(successes, n, Z95)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub point: SweepPoint,
    pub counters: Counters,
    pub frac_unidentified: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// False positives per defective item.
    pub false_pos_rate: f64,
}

impl Aggregate {
    fn new(point: SweepPoint, counters: Counters) -> Self {
        let denom = counters.trials * point.n_defectives;
        let (ci_low, ci_high) = wilson95(counters.unidentified, denom);
        let ratio = |v: u64| if denom == 0 { 0.0 } else { v as f64 / denom as f64 };
        Aggregate {
            frac_unidentified: ratio(counters.unidentified),
            false_pos_rate: ratio(counters.false_positives),
            ci_low,
            ci_high,
            counters,
            point,
        }
    }

    pub fn mean_runtime(&self) -> Duration {
        if self.counters.trials == 0 {
            return Duration::ZERO;
        }
        Duration::from_nanos((self.counters.runtime_ns / self.counters.trials as u128) as u64)
    }

    pub fn csv_row(&self) -> String {
        let p = &self.point;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.variant,
            p.n_items,
            p.n_defectives,
            p.size.left_degree,
            p.size.sections,
            p.size.n_bins,
            p.size.r,
            p.size.m,
            p.noise_q,
            p.code,
            p.e.map(|e| e.to_string()).unwrap_or_default(),
            self.counters.trials,
            self.frac_unidentified,
            self.ci_low,
            self.ci_high,
            self.false_pos_rate,
            p.master_seed
        )
    }
}

/// Run `trials` trials at one point.
pub fn run_point(point: &SweepPoint, trials: u64) -> Result<Aggregate> {
    let counters = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(point, i).map(|t| Counters::of(&t)))
        .try_reduce(Counters::default, |a, b| Ok(a.merge(b)))?;
    Ok(Aggregate::new(point.clone(), counters))
}

/// One aggregate per axis point, in axis order; none when `trials` is zero.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<Aggregate>> {
    config.validate()?;
    if config.trials == 0 {
        return Ok(Vec::new());
    }
    config.points()?.iter().map(|p| run_point(p, config.trials)).collect()
}

/// Write the header and one row per aggregate.
pub fn write_csv<W: Write>(mut w: W, rows: &[Aggregate]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(variant: Variant, k: u64, trials: u64) -> ExperimentConfig {
        ExperimentConfig {
            variant,
            n_items: 1 << 12,
            n_defectives: k,
            left_degree: 3,
            sections: 2,
            backend: Backend::ExplicitPermutation,
            bin_sizing: BinSizing::Balanced,
            sweep: Sweep::C {
                values: vec![3.0, 6.0],
                code: CodeSpec::Identity,
            },
            noise_q: 0.0,
            trials,
            master_seed: 17,
        }
    }

    #[test]
    fn empty_defective_set() {
        let cfg = config(Variant::NoiselessPeel, 0, 4);
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert_eq!(r.counters.unidentified, 0);
            assert_eq!(r.counters.false_positives, 0);
            assert_eq!(r.frac_unidentified, 0.0);
        }
    }

    #[test]
    fn trials_replay_exactly() {
        let cfg = config(Variant::NoiselessPeel, 30, 1);
        let p = &cfg.points().unwrap()[0];
        for i in [0, 5, 99] {
            assert_eq!(run_trial(p, i).unwrap().outcome, run_trial(p, i).unwrap().outcome);
        }
    }

    #[test]
    fn sweep_rows_follow_axis_and_improve() {
        let cfg = config(Variant::NoiselessPeel, 40, 200);
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].point.size.n_bins < rows[1].point.size.n_bins);
        assert!(rows[0].frac_unidentified > rows[1].frac_unidentified);
        assert!(rows.iter().all(|r| r.ci_low <= r.frac_unidentified && r.frac_unidentified <= r.ci_high));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = config(Variant::NoiselessPeel, 40, 64);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a: Vec<_> = one.install(|| run_sweep(&cfg)).unwrap();
        let b: Vec<_> = four.install(|| run_sweep(&cfg)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.csv_row(), y.csv_row());
        }
    }

    #[test]
    fn singleton_only_recovers_subset_of_peeling() {
        let mut cfg = config(Variant::SingletonOnly, 40, 50);
        cfg.sections = 1;
        let so = run_sweep(&cfg).unwrap();
        cfg.variant = Variant::NoiselessPeel;
        let pl = run_sweep(&cfg).unwrap();
        for (a, b) in so.iter().zip(&pl) {
            assert!(a.counters.unidentified >= b.counters.unidentified);
        }
    }

    #[test]
    fn robust_variant_runs() {
        let mut cfg = config(Variant::RobustPeel, 20, 20);
        cfg.noise_q = 0.01;
        cfg.sweep = Sweep::E {
            c: 8.0,
            values: vec![0, 2],
            k_sym: 2,
            field_bits: 7,
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows[0].point.e, Some(0));
        assert_eq!(rows[1].point.code.to_string(), "rs(6;2;gf2^7)");
        assert!(rows[1].frac_unidentified <= rows[0].frac_unidentified);
    }

    #[test]
    fn config_validation() {
        let mut bad = config(Variant::RobustPeel, 10, 1);
        assert!(bad.validate().is_err());
        bad.noise_q = 0.02;
        assert!(bad.validate().is_err()); // identity code
        let mut empty = config(Variant::NoiselessPeel, 10, 1);
        empty.sweep = Sweep::C {
            values: vec![],
            code: CodeSpec::Identity,
        };
        assert!(empty.validate().is_err());
        assert!(config(Variant::SingletonOnly, 10, 1).validate().is_err());
        let mut big_k = config(Variant::NoiselessPeel, 10, 1);
        big_k.n_defectives = 1 << 13;
        assert!(big_k.validate().is_err());
    }

    #[test]
    fn json_round_trip_and_strictness() {
        let cfg = config(Variant::NoiselessPeel, 10, 3);
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
        let missing = text.replace("\"master_seed\": 17,", "").replace(",\n  \"master_seed\": 17", "");
        assert!(ExperimentConfig::from_json(&missing).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut cfg = config(Variant::NoiselessPeel, 10, 2);
        cfg.sweep = Sweep::C {
            values: vec![4.0],
            code: CodeSpec::Identity,
        };
        let rows = run_sweep(&cfg).unwrap();
        let mut out = Vec::new();
        write_csv(&mut out, &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1].split(',').count(), CSV_HEADER.split(',').count());
        assert!(lines[1].starts_with("noiseless-peel,4096,10,3,2,40,308,"));
        cfg.trials = 0;
        assert!(run_sweep(&cfg).unwrap().is_empty());
    }

    #[test]
    fn wilson_matches_reference() {
        // Reference values from the closed form evaluated independently.
        let (lo, hi) = wilson95(10, 100);
        assert!((lo - 0.055_229_2).abs() < 1e-6, "{lo}");
        assert!((hi - 0.174_365_7).abs() < 1e-6, "{hi}");
        assert_eq!(wilson95(0, 0), (0.0, 1.0));
        let (lo, _) = wilson95(0, 50);
        assert_eq!(lo, 0.0);
    }

    #[test]
    fn set_difference_counts() {
        assert_eq!(set_differences(&[1, 3, 5, 7], &[3, 4, 7]), (2, 1));
        assert_eq!(set_differences(&[], &[2]), (0, 1));
    }
}
