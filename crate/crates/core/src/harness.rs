//! Experiment runner: the two-source demo pipeline and the `(L, SNR)` sweep.
//!
//! Every random draw in a sweep cell comes from a ChaCha8 stream seeded with
//! [`cell_seed`], which depends only on the base seed and the cell's own
//! coordinates. Cells are therefore independent of grid size and execution
//! order, and a fixed config reproduces every output byte.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{self, ChannelSpec, Snr};
use crate::error::{Error, Result};
use crate::eval::{self, AlignmentReport};
use crate::io;
use crate::linalg::Matrix;
use crate::msnr::{self, DemixingSolution, MovingAverageSpec};
use crate::siggen::{self, BitVector, Modulation, ModulationSpec};
use crate::signal::SignalMatrix;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one sweep cell: `base`, `L`, the SNR value's bit pattern
/// (`u64::MAX` for noiseless) and the trial index, folded in that order
/// through `h ← splitmix64(h ⊕ v)` starting from `h = splitmix64(base)`.
pub fn cell_seed(base: u64, ma_length: usize, snr: Snr, trial: usize) -> u64 {
    let snr_key = match snr {
        Snr::Noiseless => u64::MAX,
        Snr::Db(db) => (db + 0.0).to_bits(),
    };
    [ma_length as u64, snr_key, trial as u64]
        .into_iter()
        .fold(splitmix64(base), |h, v| splitmix64(h ^ v))
}

/// One source stream: modulation and bit count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub modulation: Modulation,
    pub bits: usize,
    pub samples_per_symbol: usize,
    #[serde(default)]
    pub carrier_cycles: u32,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl SourceConfig {
    pub fn qpsk_default() -> Self {
        Self {
            modulation: Modulation::Qpsk,
            bits: 20,
            samples_per_symbol: 200,
            carrier_cycles: 4,
            amplitude: 1.0,
        }
    }

    pub fn ook_default() -> Self {
        Self {
            modulation: Modulation::Ook,
            bits: 20,
            samples_per_symbol: 100,
            carrier_cycles: 0,
            amplitude: 1.0,
        }
    }

    pub fn spec(&self) -> Result<ModulationSpec<f64>> {
        ModulationSpec::new(self.modulation, self.samples_per_symbol, self.carrier_cycles, self.amplitude)
    }

    pub fn n_samples(&self) -> Result<usize> {
        Ok(self.spec()?.output_len(self.bits))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MixingConfig {
    /// Same matrix for every trial.
    Fixed { matrix: Vec<Vec<f64>> },
    /// Fresh uniform(0,1) matrix per trial, condition number ≤ 100.
    Random,
}

/// Grid of `(L, SNR, trial)` cells and how each trial's data is generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_ma_lengths")]
    pub ma_lengths: Vec<usize>,
    #[serde(default = "default_snrs")]
    pub snr_db_values: Vec<Snr>,
    #[serde(default = "default_trials")]
    pub trials_per_cell: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_sources")]
    pub sources: Vec<SourceConfig>,
    #[serde(default = "default_mixing")]
    pub mixing: MixingConfig,
}

fn default_ma_lengths() -> Vec<usize> {
    (2..=100).collect()
}

fn default_snrs() -> Vec<Snr> {
    vec![Snr::Db(10.0), Snr::Db(20.0), Snr::Db(30.0), Snr::Db(40.0)]
}

fn default_trials() -> usize {
    30
}

fn default_sources() -> Vec<SourceConfig> {
    vec![SourceConfig::qpsk_default(), SourceConfig::ook_default()]
}

fn default_mixing() -> MixingConfig {
    MixingConfig::Random
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            ma_lengths: default_ma_lengths(),
            snr_db_values: default_snrs(),
            trials_per_cell: default_trials(),
            base_seed: 0,
            sources: default_sources(),
            mixing: default_mixing(),
        }
    }
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Samples per channel; fails unless every source yields the same length.
    pub fn n_samples(&self) -> Result<usize> {
        let lens = self
            .sources
            .iter()
            .map(SourceConfig::n_samples)
            .collect::<Result<Vec<_>>>()?;
        match lens.as_slice() {
            [] => Err(Error::invalid("at least one source is required")),
            [first, rest @ ..] if rest.iter().all(|l| l == first) && *first > 0 => Ok(*first),
            _ => Err(Error::invalid(format!("sources produce unequal or empty sample counts {lens:?}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ma_lengths.is_empty() || self.snr_db_values.is_empty() {
            return Err(Error::invalid("ma_lengths and snr_db_values must be non-empty"));
        }
        if self.trials_per_cell == 0 {
            return Err(Error::invalid("trials_per_cell must be at least 1"));
        }
        if self.sources.len() > eval::MAX_ALIGN_CHANNELS {
            return Err(Error::invalid(format!(
                "at most {} sources are supported",
                eval::MAX_ALIGN_CHANNELS
            )));
        }
        let n_samples = self.n_samples()?;
        for src in &self.sources {
            if src.modulation == Modulation::Qpsk && src.bits % 2 != 0 {
                return Err(Error::OddBitCount(src.bits));
            }
        }
        if let Some(&l) = self.ma_lengths.iter().find(|&&l| l < 2 || l > n_samples) {
            return Err(Error::invalid(format!("L = {l} outside [2, {n_samples}]")));
        }
        if let MixingConfig::Fixed { matrix } = &self.mixing {
            let m = Matrix::from_rows(matrix)?;
            if !m.is_square() || m.rows() != self.sources.len() {
                return Err(Error::dims(
                    format!("{0}x{0} mixing matrix", self.sources.len()),
                    format!("{}x{}", m.rows(), m.cols()),
                ));
            }
        }
        Ok(())
    }

    /// Grid cells in output order: `L` ascending, then SNR in listed order, then trial.
    pub fn cells(&self) -> Vec<(usize, usize, usize)> {
        let mut ls = self.ma_lengths.clone();
        ls.sort_unstable();
        let mut cells = Vec::with_capacity(ls.len() * self.snr_db_values.len() * self.trials_per_cell);
        for &l in &ls {
            for s in 0..self.snr_db_values.len() {
                for t in 0..self.trials_per_cell {
                    cells.push((l, s, t));
                }
            }
        }
        cells
    }
}

/// Quality figures of one successful trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    pub mean_corr: f64,
    pub per_source_corr: Vec<f64>,
    pub eig_gap: Option<f64>,
}

/// One row of the sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub ma_length: usize,
    pub snr: Snr,
    pub trial: usize,
    pub seed: u64,
    /// `Err` holds the failing stage's error code.
    pub outcome: std::result::Result<TrialMetrics, String>,
}

impl SweepRecord {
    pub fn status(&self) -> &str {
        match &self.outcome {
            Ok(_) => "ok",
            Err(code) => code,
        }
    }

    pub fn mean_corr(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|m| m.mean_corr)
    }
}

/// Everything produced by one pass through generate → mix → solve → apply → align.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub sources: SignalMatrix<f64>,
    pub mixtures: SignalMatrix<f64>,
    pub solution: DemixingSolution<f64>,
    pub separated: SignalMatrix<f64>,
    pub report: AlignmentReport<f64>,
}

impl PipelineRun {
    pub fn metrics(&self) -> TrialMetrics {
        TrialMetrics {
            mean_corr: self.report.mean_corr,
            per_source_corr: self.report.per_source_corr.clone(),
            eig_gap: self.solution.eigen_gap(),
        }
    }
}

/// Separates `mixtures` and scores the outputs against `sources`.
pub fn separate_and_score(
    sources: SignalMatrix<f64>,
    mixtures: SignalMatrix<f64>,
    ma: MovingAverageSpec,
) -> Result<PipelineRun> {
    let solution = msnr::solve_demixing(&mixtures, ma).map_err(|e| e.at_stage("separate"))?;
    let separated = msnr::apply_demixing(&solution.demixing, &mixtures).map_err(|e| e.at_stage("separate"))?;
    let report = eval::align(&sources, &separated).map_err(|e| e.at_stage("align"))?;
    Ok(PipelineRun {
        sources,
        mixtures,
        solution,
        separated,
        report,
    })
}

/// Runs one sweep cell with all randomness drawn from `seed`.
pub fn run_trial(spec: &SweepSpec, ma_length: usize, snr: Snr, seed: u64) -> Result<PipelineRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = Vec::with_capacity(spec.sources.len());
    for src in &spec.sources {
        let bits = siggen::random_bits(src.bits, rng.random()).map_err(|e| e.at_stage("generate"))?;
        let sig = siggen::modulate(&bits, &src.spec()?).map_err(|e| e.at_stage("generate"))?;
        parts.push(sig);
    }
    let sources = SignalMatrix::stack(&parts).map_err(|e| e.at_stage("generate"))?;
    let mixing = match &spec.mixing {
        MixingConfig::Fixed { matrix } => Matrix::from_rows(matrix)?,
        MixingConfig::Random => channel::random_mixing_matrix(spec.sources.len(), &mut rng),
    };
    let channel = ChannelSpec::new(mixing, snr, rng.random()).map_err(|e| e.at_stage("mix"))?;
    let mixtures = channel::mix(&channel, &sources).map_err(|e| e.at_stage("mix"))?;
    separate_and_score(sources, mixtures, MovingAverageSpec::new(ma_length)?)
}

/// Runs every cell (in parallel) and returns records in [`SweepSpec::cells`] order.
///
/// Algorithm failures become records with a non-`ok` status.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    Ok(spec
        .cells()
        .into_par_iter()
        .map(|(ma_length, snr_index, trial)| {
            let snr = spec.snr_db_values[snr_index];
            let seed = cell_seed(spec.base_seed, ma_length, snr, trial);
            let outcome = run_trial(spec, ma_length, snr, seed)
                .map(|run| run.metrics())
                .map_err(|e| {
                    log::debug!("L={ma_length} snr={snr} trial={trial}: {e}");
                    format!("error:{}", e.code())
                });
            SweepRecord {
                ma_length,
                snr,
                trial,
                seed,
                outcome,
            }
        })
        .collect())
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Header `L,snr_db,trial,seed,mean_corr,corr_0,…,corr_{n−1},eig_gap,status`.
pub fn sweep_header(n_sources: usize) -> Vec<String> {
    let mut h: Vec<String> = ["L", "snr_db", "trial", "seed", "mean_corr"].map(String::from).into();
    h.extend((0..n_sources).map(|i| format!("corr_{i}")));
    h.push("eig_gap".into());
    h.push("status".into());
    h
}

pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], n_sources: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(sweep_header(n_sources))?;
    for r in records {
        let mut row = vec![
            r.ma_length.to_string(),
            r.snr.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
        ];
        match &r.outcome {
            Ok(m) => {
                row.push(num(m.mean_corr));
                row.extend(m.per_source_corr.iter().map(|&c| num(c)));
                row.push(fmt_opt(m.eig_gap));
            }
            Err(_) => row.extend(std::iter::repeat_n(String::new(), n_sources + 2)),
        }
        row.push(r.status().to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn run_sweep_to_file(spec: &SweepSpec, path: impl AsRef<Path>) -> Result<Vec<SweepRecord>> {
    let path = path.as_ref();
    let records = run_sweep(spec)?;
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_sweep_csv(&records, spec.sources.len(), std::io::BufWriter::new(file))?;
    Ok(records)
}

/// Mean of `mean_corr` over successful records matching `filter`.
pub fn mean_over(records: &[SweepRecord], filter: impl Fn(&SweepRecord) -> bool) -> Option<f64> {
    let vals: Vec<f64> = records.iter().filter(|r| filter(r)).filter_map(SweepRecord::mean_corr).collect();
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Settings of the two-source demo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemoConfig {
    /// Noise seed.
    pub seed: u64,
    pub snr: Snr,
    pub ma_length: usize,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            snr: Snr::Db(30.0),
            ma_length: 7,
        }
    }
}

/// Demo sources: QPSK of the first demo stream stacked over OOK of the second.
pub fn demo_sources() -> Result<SignalMatrix<f64>> {
    let b1: BitVector = siggen::DEMO_BITS_QPSK.parse()?;
    let b2: BitVector = siggen::DEMO_BITS_OOK.parse()?;
    let s1 = siggen::modulate_qpsk(&b1, &ModulationSpec::default_qpsk())?;
    let s2 = siggen::modulate_ook(&b2, &ModulationSpec::default_ook())?;
    SignalMatrix::stack(&[s1, s2])
}

/// Demo pipeline without file output.
pub fn demo_pipeline(cfg: &DemoConfig) -> Result<PipelineRun> {
    let ma = MovingAverageSpec::new(cfg.ma_length)?;
    let sources = demo_sources().map_err(|e| e.at_stage("generate"))?;
    let channel = ChannelSpec::new(ChannelSpec::demo_matrix(), cfg.snr, cfg.seed).map_err(|e| e.at_stage("mix"))?;
    let mixtures = channel::mix(&channel, &sources).map_err(|e| e.at_stage("mix"))?;
    separate_and_score(sources, mixtures, ma)
}

/// Per-output diagnostics: `output,eigenvalue,objective_db,matched_source,abs_corr`.
///
/// The last two columns are empty when no reference sources are available.
pub fn write_output_report<W: Write>(
    solution: &DemixingSolution<f64>,
    alignment: Option<&AlignmentReport<f64>>,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["output", "eigenvalue", "objective_db", "matched_source", "abs_corr"])?;
    for (j, (lambda, db)) in solution.eigenvalues.iter().zip(&solution.objective_db).enumerate() {
        let matched = alignment.and_then(|a| a.assignment.iter().position(|&o| o == j));
        let corr = matched.and_then(|i| alignment.map(|a| a.per_source_corr[i]));
        w.write_record([
            j.to_string(),
            num(*lambda),
            num(*db),
            matched.map(|i| i.to_string()).unwrap_or_default(),
            fmt_opt(corr),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn write_demo_summary<W: Write>(cfg: &DemoConfig, run: &PipelineRun, out: W) -> Result<()> {
    let n = run.sources.n_channels();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["L", "snr_db", "seed", "mean_corr"].map(String::from).into();
    header.extend((0..n).map(|i| format!("corr_{i}")));
    header.push("eig_gap".into());
    w.write_record(&header)?;
    let m = run.metrics();
    let mut row = vec![
        cfg.ma_length.to_string(),
        cfg.snr.to_string(),
        cfg.seed.to_string(),
        num(m.mean_corr),
    ];
    row.extend(m.per_source_corr.iter().map(|&c| num(c)));
    row.push(fmt_opt(m.eig_gap));
    w.write_record(&row)?;
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// File names written by [`run_demo`].
pub const DEMO_FILES: [&str; 5] = ["sources.csv", "mixtures.csv", "separated.csv", "report.csv", "summary.csv"];

/// Runs the demo and writes its signals and reports into `out_dir`.
pub fn run_demo(cfg: &DemoConfig, out_dir: impl AsRef<Path>) -> Result<PipelineRun> {
    let dir = out_dir.as_ref();
    let run = demo_pipeline(cfg)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let create = |name: &str| {
        let p = dir.join(name);
        fs::File::create(&p)
            .map(std::io::BufWriter::new)
            .map_err(|e| Error::io(p, e))
    };
    let write = || -> Result<()> {
        io::write_signals(&run.sources, create(DEMO_FILES[0])?)?;
        io::write_signals(&run.mixtures, create(DEMO_FILES[1])?)?;
        io::write_signals(&run.separated, create(DEMO_FILES[2])?)?;
        write_output_report(&run.solution, Some(&run.report), create(DEMO_FILES[3])?)?;
        write_demo_summary(cfg, &run, create(DEMO_FILES[4])?)
    };
    write().map_err(|e| e.at_stage("write"))?;
    Ok(run)
}
