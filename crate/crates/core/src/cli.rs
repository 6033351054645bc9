//! Job files, CSV/JSON output and the command implementations behind the
//! `nftsoliton` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    asymptotic_reflection, filter_amplitude, reflection_deviation, semi_asymptotic_norming,
    ReflectionDeviation,
};
use crate::error::{NftError, Result};
use crate::forward::{
    default_omega_grid, find_eigenvalues, forward_fast, radiation_energy, refine_eigenvalue,
    NftSpectrum, ReflectionSample,
};
use crate::inverse::{invert_fast, invert_sequential, Signal};
use crate::poly::CausalPolynomial;
use crate::specfact::make_ub;
use crate::synthesis::{
    lambda_to_z, leading_phase, synthesize_ab, synthesize_with_factors, validate_pair,
    ScatteringPair, SpectrumSpec, Synthesis,
};

pub const SCHEMA_VERSION: &str = "1.0";

/// Largest `D` for which eigenvalues are located with the companion matrix;
/// above it the prescribed eigenvalues seed Newton iterations on `a(z)`.
pub const ROOT_SOLVE_MAX_D: usize = 1024;

const DEFAULT_BENCH_REPEATS: usize = 5;
const DEFAULT_SEQ_CUTOFF: usize = 1 << 14;

/// Contents of the `--spec` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub lambdas: Vec<[f64; 2]>,
    pub delta: f64,
    #[serde(rename = "D")]
    pub d: usize,
    pub omega_c: f64,
    /// Sample counts for `bench`; defaults to `2^9 ..= 2^14`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bench_sizes: Vec<usize>,
    /// `invert_sequential` is skipped above this `D`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench_seq_cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench_repeats: Option<usize>,
}

impl JobSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| NftError::InvalidInput(format!("spec: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn lambdas(&self) -> Vec<Complex64> {
        self.lambdas
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect()
    }

    /// Validated spectrum at the job's own `D`.
    pub fn spectrum(&self) -> Result<SpectrumSpec> {
        self.spectrum_at(self.d)
    }

    pub fn spectrum_at(&self, d: usize) -> Result<SpectrumSpec> {
        SpectrumSpec::new(self.lambdas(), self.delta, d, self.omega_c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Synthesize,
    Invert,
    Forward,
    Roundtrip,
    Asymptotics,
    Bench,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Synthesize => "synthesize",
            Command::Invert => "invert",
            Command::Forward => "forward",
            Command::Roundtrip => "roundtrip",
            Command::Asymptotics => "asymptotics",
            Command::Bench => "bench",
        }
    }
}

/// Runs one command, writing its files and `report.json` into `out`.
/// `input` names a pair CSV for `invert` or a signal CSV for `forward`; the
/// other commands ignore it.
pub fn run(
    cmd: Command,
    job: &JobSpec,
    out: &Path,
    input: Option<&Path>,
) -> Result<serde_json::Value> {
    fs::create_dir_all(out)?;
    match cmd {
        Command::Synthesize => emit(out, run_synthesize(job, out)?),
        Command::Invert => emit(out, run_invert(job, out, input)?),
        Command::Forward => emit(out, run_forward(job, out, input)?),
        Command::Roundtrip => emit(out, run_roundtrip(job, out)?),
        Command::Asymptotics => emit(out, run_asymptotics(job, out)?),
        Command::Bench => emit(out, run_bench(job, out)?),
    }
}

fn emit<T: Serialize>(out: &Path, report: T) -> Result<serde_json::Value> {
    let text = serde_json::to_string_pretty(&report).map_err(|e| NftError::Io(e.to_string()))?;
    fs::write(out.join("report.json"), text + "\n")?;
    serde_json::to_value(report).map_err(|e| NftError::Io(e.to_string()))
}

type Timings = BTreeMap<&'static str, f64>;

fn timed<T>(
    timings: &mut Timings,
    stage: &'static str,
    f: impl FnOnce() -> Result<T>,
) -> Result<T> {
    let start = Instant::now();
    let out = f().map_err(|e| e.in_stage(stage))?;
    timings.insert(stage, start.elapsed().as_secs_f64() * 1e3);
    Ok(out)
}

fn pair_of(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

// ---------------------------------------------------------------- CSV

pub fn write_signal_csv(path: &Path, signal: &Signal) -> Result<()> {
    let mut s = String::from("n,t,re_Q,im_Q\n");
    for (i, q) in signal.samples().iter().enumerate() {
        let n = i + 1;
        writeln!(s, "{n},{:.17e},{:.17e},{:.17e}", signal.time(n), q.re, q.im).unwrap();
    }
    Ok(fs::write(path, s)?)
}

pub fn write_pair_csv(path: &Path, pair: &ScatteringPair) -> Result<()> {
    let mut s = String::from("i,re_a,im_a,re_b,im_b\n");
    for i in 0..pair.len() {
        let (a, b) = (pair.a.coeff(i), pair.b.coeff(i));
        writeln!(
            s,
            "{i},{:.17e},{:.17e},{:.17e},{:.17e}",
            a.re, a.im, b.re, b.im
        )
        .unwrap();
    }
    Ok(fs::write(path, s)?)
}

fn write_reflection_csv(path: &Path, samples: &[ReflectionSample]) -> Result<()> {
    let mut s = String::from("omega,re_R,im_R,abs2_R,pole\n");
    for r in samples {
        match r.value {
            Some(v) => writeln!(
                s,
                "{:.17e},{:.17e},{:.17e},{:.17e},0",
                r.omega,
                v.re,
                v.im,
                v.norm_sqr()
            ),
            None => writeln!(s, "{:.17e},,,,1", r.omega),
        }
        .unwrap();
    }
    Ok(fs::write(path, s)?)
}

fn write_eigen_csv(path: &Path, spec: &NftSpectrum) -> Result<()> {
    let mut s = String::from("k,re_z,im_z,re_lambda,im_lambda,re_norming,im_norming\n");
    for (k, ((z, l), q)) in spec
        .eigen_z
        .iter()
        .zip(&spec.eigen_lambda)
        .zip(&spec.norming)
        .enumerate()
    {
        writeln!(
            s,
            "{k},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            z.re, z.im, l.re, l.im, q.re, q.im
        )
        .unwrap();
    }
    Ok(fs::write(path, s)?)
}

/// Data rows of a CSV file with the expected header, split into fields.
fn csv_rows(path: &Path, header: &str) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let first = lines.next().unwrap_or_default().trim();
    if first != header {
        return Err(NftError::InvalidInput(format!(
            "{}: expected header '{header}', found '{first}'",
            path.display()
        )));
    }
    let width = header.split(',').count();
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| {
                    NftError::InvalidInput(format!("{}:{}: {e}", path.display(), i + 2))
                })?;
            if fields.len() != width {
                return Err(NftError::InvalidInput(format!(
                    "{}:{}: expected {width} fields, found {}",
                    path.display(),
                    i + 2,
                    fields.len()
                )));
            }
            Ok(fields)
        })
        .collect()
}

pub fn read_signal_csv(path: &Path) -> Result<Signal> {
    let rows = csv_rows(path, "n,t,re_Q,im_Q")?;
    Signal::new(rows.iter().map(|r| Complex64::new(r[2], r[3])).collect())
}

pub fn read_pair_csv(path: &Path) -> Result<ScatteringPair> {
    let rows = csv_rows(path, "i,re_a,im_a,re_b,im_b")?;
    let a = CausalPolynomial::new(rows.iter().map(|r| Complex64::new(r[1], r[2])).collect())?;
    let b = CausalPolynomial::new(rows.iter().map(|r| Complex64::new(r[3], r[4])).collect())?;
    Ok(ScatteringPair::new(a, b))
}

// ---------------------------------------------------------------- reports

#[derive(Debug, Clone, Serialize)]
pub struct PairSummary {
    pub d: usize,
    pub a0: [f64; 2],
    pub unimodularity_residual: f64,
    pub truncation_tail_energy: f64,
}

impl PairSummary {
    fn of(pair: &ScatteringPair) -> Self {
        Self {
            d: pair.len(),
            a0: pair_of(pair.a.leading()),
            unimodularity_residual: pair.unimodularity_residual,
            truncation_tail_energy: pair.truncation_tail_energy,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthesizeReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub spec: JobSpec,
    pub pair: PairSummary,
    pub factor_residual: f64,
    pub phase: f64,
    pub energy_identity_residual: f64,
    pub timings_ms: Timings,
}

pub fn run_synthesize(job: &JobSpec, out: &Path) -> Result<SynthesizeReport> {
    let spec = job.spectrum()?;
    let mut timings = Timings::new();
    let syn = timed(&mut timings, "synthesis", || synthesize_ab(&spec))?;
    let (signal, _) = timed(&mut timings, "inversion", || invert_fast(&syn.pair))?;
    write_signal_csv(&out.join("signal.csv"), &signal)?;
    write_pair_csv(&out.join("pair.csv"), &syn.pair)?;
    Ok(SynthesizeReport {
        schema_version: SCHEMA_VERSION,
        command: "synthesize",
        spec: job.clone(),
        pair: PairSummary::of(&syn.pair),
        factor_residual: syn.factors.residual,
        phase: syn.phase,
        energy_identity_residual: signal.energy_identity_residual(syn.pair.a.leading().re),
        timings_ms: timings,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InvertReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub source: String,
    pub pair: PairSummary,
    pub a0_real_nonnegative: bool,
    pub energy_identity_residual: f64,
    pub timings_ms: Timings,
}

pub fn run_invert(job: &JobSpec, out: &Path, input: Option<&Path>) -> Result<InvertReport> {
    let mut timings = Timings::new();
    let (pair, source) = match input {
        Some(p) => (read_pair_csv(p)?, p.display().to_string()),
        None => {
            let spec = job.spectrum()?;
            let syn = timed(&mut timings, "synthesis", || synthesize_ab(&spec))?;
            (syn.pair, "synthesized".to_string())
        }
    };
    let (signal, _) = timed(&mut timings, "inversion", || invert_fast(&pair))?;
    write_signal_csv(&out.join("signal.csv"), &signal)?;
    let check = validate_pair(&pair, 1e-6);
    Ok(InvertReport {
        schema_version: SCHEMA_VERSION,
        command: "invert",
        source,
        pair: PairSummary::of(&pair),
        a0_real_nonnegative: check.a0_real_nonnegative,
        energy_identity_residual: signal.energy_identity_residual(pair.a.leading().re),
        timings_ms: timings,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenEntry {
    pub z: [f64; 2],
    pub lambda: [f64; 2],
    pub norming: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct ForwardReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub source: String,
    pub pair: PairSummary,
    pub root_method: &'static str,
    pub eigenvalues: Vec<EigenEntry>,
    pub radiation_energy: f64,
    pub poles: usize,
    pub timings_ms: Timings,
}

/// Eigenvalues of `pair`: companion matrix up to [`ROOT_SOLVE_MAX_D`],
/// Newton refinement of `seeds` beyond.
pub fn locate_eigenvalues(
    pair: &ScatteringPair,
    seeds: &[Complex64],
) -> Result<(Vec<Complex64>, &'static str)> {
    if pair.len() <= ROOT_SOLVE_MAX_D {
        return Ok((find_eigenvalues(&pair.a)?, "companion"));
    }
    let eps = pair.eps();
    let zs = seeds
        .iter()
        .map(|&l| Ok(refine_eigenvalue(&pair.a, lambda_to_z(l, eps)?)))
        .collect::<Result<_>>()?;
    Ok((zs, "newton-seeded"))
}

fn eigen_entries(spec: &NftSpectrum) -> Vec<EigenEntry> {
    spec.eigen_z
        .iter()
        .zip(&spec.eigen_lambda)
        .zip(&spec.norming)
        .map(|((&z, &l), &q)| EigenEntry {
            z: pair_of(z),
            lambda: pair_of(l),
            norming: pair_of(q),
        })
        .collect()
}

pub fn run_forward(job: &JobSpec, out: &Path, input: Option<&Path>) -> Result<ForwardReport> {
    let mut timings = Timings::new();
    let (signal, source) = match input {
        Some(p) => (read_signal_csv(p)?, p.display().to_string()),
        None => {
            let spec = job.spectrum()?;
            let syn = timed(&mut timings, "synthesis", || synthesize_ab(&spec))?;
            let (s, _) = timed(&mut timings, "inversion", || invert_fast(&syn.pair))?;
            (s, "synthesized".to_string())
        }
    };
    let pair = timed(&mut timings, "forward", || forward_fast(&signal))?;
    let (zs, root_method) = timed(&mut timings, "eigenvalues", || {
        locate_eigenvalues(&pair, &job.lambdas())
    })?;
    let spectrum = timed(&mut timings, "spectrum", || {
        NftSpectrum::with_eigenvalues(&pair, zs)
    })?;
    write_pair_csv(&out.join("pair.csv"), &pair)?;
    write_reflection_csv(&out.join("reflection.csv"), &spectrum.reflection)?;
    write_eigen_csv(&out.join("eigenvalues.csv"), &spectrum)?;
    Ok(ForwardReport {
        schema_version: SCHEMA_VERSION,
        command: "forward",
        source,
        pair: PairSummary::of(&pair),
        root_method,
        eigenvalues: eigen_entries(&spectrum),
        radiation_energy: radiation_energy(&spectrum.reflection),
        poles: spectrum
            .reflection
            .iter()
            .filter(|s| s.value.is_none())
            .count(),
        timings_ms: timings,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenPlacement {
    pub prescribed: Vec<[f64; 2]>,
    pub recovered: Vec<[f64; 2]>,
    /// Largest distance from a prescribed eigenvalue to its nearest
    /// recovered one; `None` when nothing was recovered.
    pub max_abs_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormingComparison {
    pub lambda: [f64; 2],
    pub measured: [f64; 2],
    pub predicted: [f64; 2],
    pub rel_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundtripReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub spec: JobSpec,
    pub synthesized: PairSummary,
    pub regenerated: PairSummary,
    pub fast_vs_sequential_max_rel: f64,
    pub energy_identity_residual: f64,
    pub root_method: &'static str,
    pub eigenvalues: EigenPlacement,
    pub norming: Vec<NormingComparison>,
    pub reflection: ReflectionDeviation,
    pub radiation_energy: f64,
    pub timings_ms: Timings,
}

/// Largest sample deviation relative to the largest reference sample.
pub fn max_relative_deviation(x: &Signal, reference: &Signal) -> f64 {
    let scale = reference
        .samples()
        .iter()
        .map(|q| q.norm())
        .fold(0.0, f64::max);
    let diff = x
        .samples()
        .iter()
        .zip(reference.samples())
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// For each prescribed eigenvalue, the distance to the nearest found one.
pub fn placement_errors(prescribed: &[Complex64], found: &[Complex64]) -> Vec<Option<f64>> {
    prescribed
        .iter()
        .map(|p| found.iter().map(|f| (f - p).norm()).min_by(f64::total_cmp))
        .collect()
}

/// Everything the roundtrip command measures, without touching the disk.
pub fn roundtrip(job: &JobSpec) -> Result<(RoundtripReport, Synthesis, Signal, NftSpectrum)> {
    let spec = job.spectrum()?;
    let mut timings = Timings::new();
    let syn = timed(&mut timings, "synthesis", || synthesize_ab(&spec))?;
    let (signal, _) = timed(&mut timings, "inversion", || invert_fast(&syn.pair))?;
    let reference = timed(&mut timings, "inversion_sequential", || {
        invert_sequential(&syn.pair)
    })?;
    let pair = timed(&mut timings, "forward", || forward_fast(&signal))?;
    let (zs, root_method) = timed(&mut timings, "eigenvalues", || {
        locate_eigenvalues(&pair, &spec.lambdas)
    })?;
    let spectrum = timed(&mut timings, "spectrum", || {
        NftSpectrum::with_eigenvalues(&pair, zs)
    })?;

    let errors = placement_errors(&spec.lambdas, &spectrum.eigen_lambda);
    let max_abs_error = errors.iter().try_fold(0.0f64, |m, e| e.map(|e| m.max(e)));
    let mut norming = Vec::new();
    for (k, &l) in spec.lambdas.iter().enumerate() {
        // the synthesized a carries the factor exp(i phase), which divides
        // the measured constant
        let predicted =
            semi_asymptotic_norming(&syn.factors.b, &syn.factors.u, &spec.lambdas, k, spec.eps())
                .map_err(|e| e.in_stage("prediction"))?
                * Complex64::from_polar(1.0, -syn.phase);
        // measured constant of the nearest recovered eigenvalue
        let nearest = spectrum
            .eigen_lambda
            .iter()
            .enumerate()
            .min_by(|x, y| (x.1 - l).norm().total_cmp(&(y.1 - l).norm()));
        if let Some((j, _)) = nearest {
            let measured = spectrum.norming[j];
            norming.push(NormingComparison {
                lambda: pair_of(l),
                measured: pair_of(measured),
                predicted: pair_of(predicted),
                rel_deviation: (measured - predicted).norm() / predicted.norm(),
            });
        }
    }
    let reflection = reflection_deviation(&spectrum.reflection, spec.delta, spec.omega_c)
        .map_err(|e| e.in_stage("prediction"))?;
    let report = RoundtripReport {
        schema_version: SCHEMA_VERSION,
        command: "roundtrip",
        spec: job.clone(),
        synthesized: PairSummary::of(&syn.pair),
        regenerated: PairSummary::of(&pair),
        fast_vs_sequential_max_rel: max_relative_deviation(&signal, &reference),
        energy_identity_residual: signal.energy_identity_residual(syn.pair.a.leading().re),
        root_method,
        eigenvalues: EigenPlacement {
            prescribed: spec.lambdas.iter().map(|&l| pair_of(l)).collect(),
            recovered: spectrum.eigen_lambda.iter().map(|&l| pair_of(l)).collect(),
            max_abs_error,
        },
        norming,
        reflection,
        radiation_energy: radiation_energy(&spectrum.reflection),
        timings_ms: timings,
    };
    Ok((report, syn, signal, spectrum))
}

pub fn run_roundtrip(job: &JobSpec, out: &Path) -> Result<RoundtripReport> {
    let (report, _, signal, spectrum) = roundtrip(job)?;
    write_signal_csv(&out.join("signal.csv"), &signal)?;
    write_reflection_csv(&out.join("reflection.csv"), &spectrum.reflection)?;
    write_eigen_csv(&out.join("eigenvalues.csv"), &spectrum)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct NormingPrediction {
    pub lambda: [f64; 2],
    pub predicted: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub spec: JobSpec,
    pub reflection_at_zero: f64,
    pub filter_amplitude_at_zero: f64,
    pub norming: Vec<NormingPrediction>,
    pub timings_ms: Timings,
}

pub fn run_asymptotics(job: &JobSpec, out: &Path) -> Result<AsymptoticsReport> {
    let spec = job.spectrum()?;
    let mut timings = Timings::new();
    let factors = timed(&mut timings, "filter_design", || make_ub(&spec.filter()?))?;
    let mut csv = String::from("omega,psi_amplitude,reflection_abs2\n");
    for omega in default_omega_grid(spec.d) {
        let r = asymptotic_reflection(omega, spec.delta, spec.omega_c)?;
        writeln!(
            csv,
            "{omega:.17e},{:.17e},{r:.17e}",
            filter_amplitude(omega, spec.omega_c)
        )
        .unwrap();
    }
    fs::write(out.join("asymptotics.csv"), csv)?;
    let norming = timed(&mut timings, "norming", || {
        let rotation = Complex64::from_polar(1.0, -leading_phase(&factors.u, &spec.z_roots()?));
        (0..spec.lambdas.len())
            .map(|k| {
                let q =
                    semi_asymptotic_norming(&factors.b, &factors.u, &spec.lambdas, k, spec.eps())?
                        * rotation;
                Ok(NormingPrediction {
                    lambda: pair_of(spec.lambdas[k]),
                    predicted: pair_of(q),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(AsymptoticsReport {
        schema_version: SCHEMA_VERSION,
        command: "asymptotics",
        spec: job.clone(),
        reflection_at_zero: asymptotic_reflection(0.0, spec.delta, spec.omega_c)?,
        filter_amplitude_at_zero: filter_amplitude(0.0, spec.omega_c),
        norming,
        timings_ms: timings,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub d: usize,
    pub invert_fast_ms: f64,
    pub invert_sequential_ms: Option<f64>,
    pub forward_fast_ms: f64,
}

impl BenchRow {
    pub fn per_sample_fast_us(&self) -> f64 {
        self.invert_fast_ms * 1e3 / self.d as f64
    }

    pub fn per_sample_sequential_us(&self) -> Option<f64> {
        self.invert_sequential_ms.map(|t| t * 1e3 / self.d as f64)
    }
}

/// Least-squares fit `t / D = intercept + slope * log2(D)^2`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Log2Fit {
    pub intercept_us: f64,
    pub slope_us: f64,
    pub r_squared: f64,
}

pub fn log2_squared_fit(rows: &[BenchRow]) -> Option<Log2Fit> {
    if rows.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.d as f64).log2().powi(2), r.per_sample_fast_us()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Some(Log2Fit {
        intercept_us: intercept,
        slope_us: slope,
        r_squared: if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub spec: JobSpec,
    pub repeats: usize,
    pub rows: Vec<BenchRow>,
    pub fast_per_sample_ratio: Option<f64>,
    pub sequential_per_sample_ratio: Option<f64>,
    pub fit: Option<Log2Fit>,
}

fn median_ms(repeats: usize, mut f: impl FnMut() -> Result<()>) -> Result<f64> {
    f()?; // warm-up
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        f()?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    times.sort_by(f64::total_cmp);
    Ok(times[times.len() / 2])
}

/// Times the inversions on pairs synthesized at each size. Filter design
/// and synthesis happen before the clock starts.
pub fn bench(job: &JobSpec) -> Result<BenchReport> {
    let sizes: Vec<usize> = if job.bench_sizes.is_empty() {
        (9..=14).map(|p| 1usize << p).collect()
    } else {
        job.bench_sizes.clone()
    };
    let repeats = job.bench_repeats.unwrap_or(DEFAULT_BENCH_REPEATS);
    let cutoff = job.bench_seq_cutoff.unwrap_or(DEFAULT_SEQ_CUTOFF);
    let mut rows = Vec::with_capacity(sizes.len());
    for &d in &sizes {
        let spec = job.spectrum_at(d)?;
        let factors = make_ub(&spec.filter()?)?;
        let pair = synthesize_with_factors(&spec, factors)?.pair;
        let invert_fast_ms = median_ms(repeats, || invert_fast(&pair).map(drop))?;
        let invert_sequential_ms = if d <= cutoff {
            Some(median_ms(repeats, || invert_sequential(&pair).map(drop))?)
        } else {
            None
        };
        let (signal, _) = invert_fast(&pair)?;
        let forward_fast_ms = median_ms(repeats, || forward_fast(&signal).map(drop))?;
        rows.push(BenchRow {
            d,
            invert_fast_ms,
            invert_sequential_ms,
            forward_fast_ms,
        });
    }
    let (first, last) = (rows.first(), rows.last());
    let fast_per_sample_ratio = first
        .zip(last)
        .map(|(f, l)| l.per_sample_fast_us() / f.per_sample_fast_us());
    let sequential_per_sample_ratio = first
        .zip(last)
        .and_then(|(f, l)| Some(l.per_sample_sequential_us()? / f.per_sample_sequential_us()?));
    let fit = log2_squared_fit(&rows);
    Ok(BenchReport {
        schema_version: SCHEMA_VERSION,
        command: "bench",
        spec: job.clone(),
        repeats,
        rows,
        fast_per_sample_ratio,
        sequential_per_sample_ratio,
        fit,
    })
}

pub fn run_bench(job: &JobSpec, out: &Path) -> Result<BenchReport> {
    let report = bench(job)?;
    let mut csv = String::from(
        "D,invert_fast_ms,invert_fast_us_per_sample,invert_sequential_ms,invert_sequential_us_per_sample,forward_fast_ms\n",
    );
    for r in &report.rows {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        writeln!(
            csv,
            "{},{:.6},{:.6},{},{},{:.6}",
            r.d,
            r.invert_fast_ms,
            r.per_sample_fast_us(),
            opt(r.invert_sequential_ms),
            opt(r.per_sample_sequential_us()),
            r.forward_fast_ms
        )
        .unwrap();
    }
    fs::write(out.join("bench.csv"), csv)?;
    Ok(report)
}
