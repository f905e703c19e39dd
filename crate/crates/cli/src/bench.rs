//! Scaling experiments: power compression and filling over grids, with
//! every trace written to disk and re-validated from the file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nilfill_core::compression::{checked_power, ChainContext};
use nilfill_core::filler::{build_filler, certify_afl_pair, corpus_generate, fill_with_report, AflCertificate};
use nilfill_core::{Metrics, Presentation, Word};

use crate::format::{parse_presentation, validate_trace, write_presentation, write_trace, Verdict};

pub const CSV_HEADER: [&str; 8] = ["c", "n", "op", "len_initial", "area", "fl", "height", "seconds"];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub c: u32,
    pub n: u64,
    pub op: String,
    pub len_initial: u64,
    pub area: u64,
    pub fl: u64,
    pub height: u64,
    pub seconds: f64,
}

impl BenchRecord {
    fn new(c: u32, n: u64, op: &str, len_initial: usize, m: Metrics, seconds: f64) -> Self {
        BenchRecord { c, n, op: op.to_string(), len_initial: len_initial as u64, area: m.area, fl: m.fl, height: m.height, seconds }
    }

    pub fn metrics(&self) -> Metrics {
        Metrics { area: self.area, fl: self.fl, height: self.height, final_length: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the log residuals.
    pub residual: f64,
    pub n_min: f64,
    pub n_max: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("need at least 4 points with strictly increasing n, got {0}")]
    InsufficientData(usize),
    #[error("log-log fit needs positive values")]
    NonPositive,
    #[error("trace {path} failed validation: {verdict}")]
    Validation { path: PathBuf, verdict: Verdict },
    #[error(transparent)]
    Core(#[from] nilfill_core::Error),
    #[error("{0}")]
    Format(#[from] crate::format::FormatError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Least squares line through `(log x, log y)`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<FitResult, BenchError> {
    if points.len() < 4 || points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(BenchError::InsufficientData(points.len()));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(BenchError::NonPositive);
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / k).sqrt();
    Ok(FitResult { slope, intercept, residual, n_min: points[0].0, n_max: points[points.len() - 1].0 })
}

/// Writes the trace (and the presentation, once) under `dir`, reads both
/// back and validates the file contents.
fn persist_and_validate(
    dir: &Path,
    pres_name: &str,
    p: &Presentation,
    trace_name: &str,
    t: &nilfill_core::PSequence,
    expected_final: Option<&Word>,
) -> Result<Metrics, BenchError> {
    fs::create_dir_all(dir)?;
    let pres_path = dir.join(pres_name);
    if !pres_path.exists() {
        fs::write(&pres_path, write_presentation(p))?;
    }
    let trace_path = dir.join(trace_name);
    fs::write(&trace_path, write_trace(p, t, pres_name))?;
    let p_read = parse_presentation(&fs::read_to_string(&pres_path)?)?;
    match validate_trace(&fs::read_to_string(&trace_path)?, &p_read, expected_final) {
        Verdict::Ok(m) => Ok(m),
        verdict => Err(BenchError::Validation { path: trace_path, verdict }),
    }
}

#[derive(Debug, Clone)]
pub struct CompressionBench {
    pub records: Vec<BenchRecord>,
    /// Area exponent; absent when fewer than 4 sizes or the area is zero.
    pub fit: Option<FitResult>,
    pub max_fl_ratio: f64,
    /// Max of (largest active suffix length) / n.
    pub max_working_fl_ratio: f64,
}

pub fn bench_compression(c: u32, ns: &[u64], dir: &Path) -> Result<CompressionBench, BenchError> {
    let ctx = ChainContext::standard(c as usize);
    let p = ctx.level_presentation(1);
    let mut records = Vec::new();
    let mut max_fl_ratio = 0f64;
    let mut max_working_fl_ratio = 0f64;
    for &n in ns {
        let start = Instant::now();
        let pc = ctx.power_compression(n)?;
        let seconds = start.elapsed().as_secs_f64();
        let target = ctx.compression_word(n, checked_power(n, c as usize)?)?;
        let m = persist_and_validate(
            dir,
            &format!("chain_c{c}.pres"),
            p,
            &format!("compression_c{c}_n{n}.trace"),
            &pc.sequence,
            Some(&target),
        )?;
        max_fl_ratio = max_fl_ratio.max(m.fl as f64 / n as f64);
        max_working_fl_ratio = max_working_fl_ratio.max(pc.working_fl as f64 / n as f64);
        records.push(BenchRecord::new(c, n, "compression", pc.sequence.initial.len(), m, seconds));
    }
    let points: Vec<(f64, f64)> = records.iter().map(|r| (r.n as f64, r.area as f64)).collect();
    let fit = if points.iter().all(|p| p.1 > 0.0) { fit_exponent(&points).ok() } else { None };
    Ok(CompressionBench { records, fit, max_fl_ratio, max_working_fl_ratio })
}

#[derive(Debug, Clone)]
pub struct FillBench {
    pub records: Vec<BenchRecord>,
    pub certificate: AflCertificate,
    /// Max of register exponent / (2 M Area of the recursive sequence).
    pub max_register_ratio: f64,
}

pub fn bench_fill(c: u32, m: u32, ns: &[usize], count: usize, seed: u64, dir: &Path) -> Result<FillBench, BenchError> {
    let fp = build_filler(c, m)?;
    let p = &fp.presentation;
    let mut records = Vec::new();
    let mut max_register_ratio = 0f64;
    for &n in ns {
        for (i, w) in corpus_generate(&fp, n, count, seed).iter().enumerate() {
            let start = Instant::now();
            let (seq, report) = fill_with_report(w, &fp)?;
            let seconds = start.elapsed().as_secs_f64();
            let metrics = persist_and_validate(
                dir,
                &format!("filler_c{c}_m{m}.pres"),
                p,
                &format!("fill_c{c}_m{m}_n{n}_{i}.trace"),
                &seq,
                None,
            )?;
            if report.register_bound > 0 {
                max_register_ratio = max_register_ratio.max(report.max_register as f64 / report.register_bound as f64);
            }
            records.push(BenchRecord::new(c, n as u64, "fill", w.len(), metrics, seconds));
        }
    }
    let results: Vec<(usize, Metrics)> = records.iter().map(|r| (r.len_initial as usize, r.metrics())).collect();
    let certificate = certify_afl_pair(&results, c);
    Ok(FillBench { records, certificate, max_register_ratio })
}

/// CSV with the fixed header; `timing = false` writes 0 seconds so reruns
/// are byte-identical.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W, timing: bool) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let seconds = if timing { format!("{:.6}", r.seconds) } else { String::from("0") };
        w.write_record([
            r.c.to_string(),
            r.n.to_string(),
            r.op.clone(),
            r.len_initial.to_string(),
            r.area.to_string(),
            r.fl.to_string(),
            r.height.to_string(),
            seconds,
        ])?;
    }
    w.flush()?;
    Ok(())
}
