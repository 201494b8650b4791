//! Batch orchestration: ingestion, the per-station decision flow, and
//! report emission.
//!
//! Per station the flow is: stationarity panel → (if stationary) the two
//! marginal Gaussianity tests combined by the dependent-case FDR → (if not
//! rejected) the random-projection test with parameters selected from the
//! marginal p-values. Decisions always use unrounded p-values; rounding to
//! three decimals is presentation-only.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use chrono::{DateTime, Datelike, Timelike};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fdr::by_adjust_with;
use crate::marginal::{epps, lobato_velasco, DEFAULT_EPPS_POINTS};
use crate::projection::{rp_test, select_rp_config, MarginalTest};
use crate::series::{RawRecord, TimeSeries};
use crate::stationarity::{stationarity_panel, PBound, StationarityPanel, TestOutcome};
use crate::stats::derive_seed;

/// Batch-run settings; every field mirrors a CLI flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Restrict each record to its first `n_max` stored time points.
    pub n_max: usize,
    pub alpha: f64,
    pub ljung_box_h: usize,
    pub master_seed: u64,
    pub rp_num_projections: usize,
    /// Clip adjusted FDR values at 1 instead of reporting them uncapped.
    pub cap_fdr: bool,
    /// Use the independent-case adjustment (c(m) = 1) instead of the
    /// dependent-case harmonic factor.
    pub fdr_independent: bool,
    pub epps_points: Vec<f64>,
    /// Per-station override of the projection parameters and marginal test.
    pub rp_overrides: BTreeMap<String, RpOverride>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpOverride {
    pub lambda1: f64,
    pub lambda2: f64,
    pub marginal_test: MarginalTest,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_max: 30_000,
            alpha: 0.05,
            ljung_box_h: 10,
            master_seed: 0,
            rp_num_projections: 1,
            cap_fdr: false,
            fdr_independent: false,
            epps_points: DEFAULT_EPPS_POINTS.to_vec(),
            rp_overrides: BTreeMap::new(),
        }
    }
}

/// Final classification of one station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Marginal stage rejected: the process is not Gaussian.
    NonGaussianMarginal,
    /// Random-projection stage rejected: the process is not Gaussian.
    NonGaussianRp,
    /// No stage produced evidence against Gaussianity.
    NotRejected,
    /// Whole studied window unobserved; station not analyzed.
    ExcludedAllMissing,
    /// Stationarity panel verdict was negative; Gaussianity not assessed.
    ExcludedNonStationary,
    /// A stage errored; see the error field.
    Failed,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::NonGaussianMarginal => "non_gaussian_marginal",
            Verdict::NonGaussianRp => "non_gaussian_rp",
            Verdict::NotRejected => "not_rejected",
            Verdict::ExcludedAllMissing => "excluded_all_missing",
            Verdict::ExcludedNonStationary => "excluded_non_stationary",
            Verdict::Failed => "failed",
        };
        f.write_str(s)
    }
}

/// Random-projection stage record: outcome plus the configuration and seed
/// that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpRecord {
    pub outcome: TestOutcome,
    pub lambda1: f64,
    pub lambda2: f64,
    pub marginal_test: MarginalTest,
    pub seed: u64,
}

/// Per-series end-to-end record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationReport {
    pub station_id: String,
    /// Stored samples inside the studied window, missing markers included.
    pub raw_length: usize,
    pub studied_n: usize,
    pub start_utc: i64,
    pub end_utc: i64,
    pub stationarity: Option<StationarityPanel>,
    pub epps: Option<TestOutcome>,
    pub lobato_velasco: Option<TestOutcome>,
    /// Combined FDR scalar of the two marginal p-values.
    pub fdr: Option<f64>,
    pub rp: Option<RpRecord>,
    pub verdict: Verdict,
    pub error: Option<String>,
}

impl StationReport {
    fn skeleton(series: &TimeSeries) -> Self {
        Self {
            station_id: series.station_id().to_string(),
            raw_length: series.raw_length(),
            studied_n: series.n(),
            start_utc: series.start_utc(),
            end_utc: series.end_utc(),
            stationarity: None,
            epps: None,
            lobato_velasco: None,
            fdr: None,
            rp: None,
            verdict: Verdict::Failed,
            error: None,
        }
    }

    /// Report for a station whose studied window held no observations.
    pub fn excluded_all_missing(station_id: &str, raw_length: usize) -> Self {
        Self {
            station_id: station_id.to_string(),
            raw_length,
            studied_n: 0,
            start_utc: 0,
            end_utc: 0,
            stationarity: None,
            epps: None,
            lobato_velasco: None,
            fdr: None,
            rp: None,
            verdict: Verdict::ExcludedAllMissing,
            error: None,
        }
    }

    /// Report for a station that could not be ingested at all.
    pub fn failed(station_id: &str, error: &Error) -> Self {
        Self {
            station_id: station_id.to_string(),
            raw_length: 0,
            studied_n: 0,
            start_utc: 0,
            end_utc: 0,
            stationarity: None,
            epps: None,
            lobato_velasco: None,
            fdr: None,
            rp: None,
            verdict: Verdict::Failed,
            error: Some(error.to_string()),
        }
    }
}

/// Run the full decision flow for one cleaned series. Stage errors are
/// recorded on the report; this function never panics on data.
pub fn analyze_station(series: &TimeSeries, cfg: &RunConfig) -> StationReport {
    let mut report = StationReport::skeleton(series);

    let panel = match stationarity_panel(series, cfg.ljung_box_h, cfg.alpha) {
        Ok(p) => p,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    let stationary = panel.verdict;
    report.stationarity = Some(panel);
    if !stationary {
        report.verdict = Verdict::ExcludedNonStationary;
        return report;
    }

    let epps_out = match epps(series, &cfg.epps_points) {
        Ok(o) => o,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    let lv_out = match lobato_velasco(series) {
        Ok(o) => o,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    let epps_p = epps_out.p_value;
    let lv_p = lv_out.p_value;
    report.epps = Some(epps_out);
    report.lobato_velasco = Some(lv_out);

    let fdr_res = match by_adjust_with(&[epps_p, lv_p], !cfg.fdr_independent, cfg.cap_fdr) {
        Ok(r) => r,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    report.fdr = Some(fdr_res.combined());
    if fdr_res.reject_at(cfg.alpha) {
        report.verdict = Verdict::NonGaussianMarginal;
        return report;
    }

    let mut rp_cfg = select_rp_config(epps_p, lv_p);
    if let Some(o) = cfg.rp_overrides.get(series.station_id()) {
        rp_cfg = crate::projection::RpConfig::new(o.lambda1, o.lambda2, o.marginal_test);
    }
    rp_cfg.num_projections = cfg.rp_num_projections;
    rp_cfg.epps_points = cfg.epps_points.clone();

    let seed = derive_seed(cfg.master_seed, &format!("station-{}", series.station_id()));
    let rp_out = match rp_test(series, &rp_cfg, seed) {
        Ok(o) => o,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    let rejected = rp_out.rejects(cfg.alpha);
    report.rp = Some(RpRecord {
        outcome: rp_out,
        lambda1: rp_cfg.lambda1,
        lambda2: rp_cfg.lambda2,
        marginal_test: rp_cfg.marginal_test,
        seed,
    });
    report.verdict = if rejected {
        Verdict::NonGaussianRp
    } else {
        Verdict::NotRejected
    };
    report
}

/// Analyze stations in parallel and return reports in descending station-id
/// order (the presentation order of the source tables). Deterministic for a
/// fixed config regardless of worker count.
pub fn analyze_batch(series: &[TimeSeries], cfg: &RunConfig) -> Vec<StationReport> {
    let mut reports: Vec<StationReport> =
        series.par_iter().map(|s| analyze_station(s, cfg)).collect();
    sort_reports(&mut reports);
    reports
}

/// Descending station-id order.
pub fn sort_reports(reports: &mut [StationReport]) {
    reports.sort_by(|a, b| b.station_id.cmp(&a.station_id));
}

/// Ingest and analyze a set of CSV files in parallel. Per-file problems
/// become reports (all-missing windows are excluded, other errors marked
/// failed); the batch itself always completes.
pub fn analyze_files(paths: &[std::path::PathBuf], cfg: &RunConfig) -> Vec<StationReport> {
    let mut reports: Vec<StationReport> = paths
        .par_iter()
        .map(|path| {
            let station = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("unknown")
                .to_string();
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return StationReport::failed(&station, &Error::Io(e)),
            };
            let raw = match parse_displacement_csv(&station, &text) {
                Ok(r) => r,
                Err(e) => return StationReport::failed(&station, &e),
            };
            let truncated = raw.truncate_to_first(cfg.n_max);
            let window_len = truncated.samples.len();
            match truncated.clean() {
                Ok(ts) => analyze_station(&ts, cfg),
                Err(Error::AllMissing { .. }) => {
                    StationReport::excluded_all_missing(&station, window_len)
                }
                Err(e) => StationReport::failed(&station, &e),
            }
        })
        .collect();
    sort_reports(&mut reports);
    reports
}

/// Parse one two-column CSV (`utc_seconds,displacement_m`, header optional,
/// empty field or `NaN` marks a missing value) into a raw record.
pub fn parse_displacement_csv(station_id: &str, text: &str) -> Result<RawRecord> {
    let mut samples = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.splitn(2, ',');
        let t_field = fields.next().unwrap_or("").trim();
        let v_field = fields.next().map(str::trim);
        let t: i64 = match t_field.parse() {
            Ok(t) => t,
            Err(_) if idx == 0 => continue, // header row
            Err(_) => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("invalid timestamp {t_field:?}"),
                })
            }
        };
        let v = match v_field {
            None => {
                return Err(Error::Parse {
                    line: lineno,
                    message: "missing value column".into(),
                })
            }
            Some("") => None,
            Some(s) if s.eq_ignore_ascii_case("nan") => None,
            Some(s) => match s.parse::<f64>() {
                Ok(x) if x.is_finite() => Some(x),
                Ok(_) => None,
                Err(_) => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("invalid displacement {s:?}"),
                    })
                }
            },
        };
        samples.push((t, v));
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(RawRecord::new(station_id, samples))
}

/// Read, truncate to the first `n_max` time points and clean one CSV file.
/// The station id is the file stem.
pub fn ingest_file(path: &Path, n_max: usize) -> Result<TimeSeries> {
    let station_id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("unknown")
        .to_string();
    let text = std::fs::read_to_string(path)?;
    let raw = parse_displacement_csv(&station_id, &text)?;
    raw.truncate_to_first(n_max).clean()
}

/// Minimal HTTP response surface needed by the fetch client.
#[derive(Debug, Clone)]
pub struct HttpResponse {
    pub status: u16,
    pub body: Vec<u8>,
}

/// Injected HTTP transport so tests can use canned responses.
pub trait HttpClient {
    fn get(&self, url: &str) -> Result<HttpResponse>;
}

/// Plain-HTTP client used by the CLI.
pub struct UreqClient;

impl HttpClient for UreqClient {
    fn get(&self, url: &str) -> Result<HttpResponse> {
        match ureq::get(url).call() {
            Ok(mut resp) => {
                let status = resp.status().as_u16();
                let body = resp
                    .body_mut()
                    .read_to_vec()
                    .map_err(|e| Error::Http(e.to_string()))?;
                Ok(HttpResponse { status, body })
            }
            Err(ureq::Error::StatusCode(code)) => Ok(HttpResponse {
                status: code,
                body: vec![],
            }),
            Err(e) => Err(Error::Http(e.to_string())),
        }
    }
}

/// Name of the displacement variable in the source archive.
pub const DISPLACEMENT_VARIABLE: &str = "xyzZDisplacement";

/// Fetch one station's displacement record from `{base_url}/{station}.csv`.
///
/// The response must be a CSV whose header names a time column
/// (`utc_seconds` or `time`) and the displacement variable
/// (`xyzZDisplacement`, or the export alias `displacement_m`). Values equal
/// to `fill_value` count as missing, as do empty fields and NaN.
pub fn fetch_station(
    station_id: &str,
    base_url: &str,
    client: &dyn HttpClient,
    fill_value: Option<f64>,
) -> Result<RawRecord> {
    let url = format!("{}/{}.csv", base_url.trim_end_matches('/'), station_id);
    let resp = client.get(&url)?;
    match resp.status {
        200 => {}
        404 => return Err(Error::UnknownStation(station_id.to_string())),
        s => return Err(Error::Http(format!("status {s} for {url}"))),
    }
    let text =
        String::from_utf8(resp.body).map_err(|e| Error::Http(format!("non-utf8 body: {e}")))?;

    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::EmptyInput)?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    let time_col = names
        .iter()
        .position(|n| n.eq_ignore_ascii_case("utc_seconds") || n.eq_ignore_ascii_case("time"))
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: "no time column".into(),
        })?;
    let value_col = names
        .iter()
        .position(|n| *n == DISPLACEMENT_VARIABLE || n.eq_ignore_ascii_case("displacement_m"))
        .ok_or_else(|| Error::MissingVariable(DISPLACEMENT_VARIABLE.to_string()))?;

    let mut samples = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() <= time_col.max(value_col) {
            return Err(Error::Parse {
                line: lineno,
                message: "short row".into(),
            });
        }
        let t: i64 = fields[time_col].parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("invalid timestamp {:?}", fields[time_col]),
        })?;
        let raw_v = fields[value_col];
        let v = if raw_v.is_empty() || raw_v.eq_ignore_ascii_case("nan") {
            None
        } else {
            let x: f64 = raw_v.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid displacement {raw_v:?}"),
            })?;
            match fill_value {
                Some(fill) if x == fill => None,
                _ if !x.is_finite() => None,
                _ => Some(x),
            }
        };
        samples.push((t, v));
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(RawRecord::new(station_id, samples))
}

/// Render UTC seconds as `Weekday Month DayOrdinal Year HH:MM:SS` in GMT.
pub fn format_utc(seconds: i64) -> String {
    let dt = DateTime::from_timestamp(seconds, 0).unwrap_or(DateTime::UNIX_EPOCH);
    let day = dt.day();
    let suffix = match day % 100 {
        11..=13 => "th",
        _ => match day % 10 {
            1 => "st",
            2 => "nd",
            3 => "rd",
            _ => "th",
        },
    };
    format!(
        "{} {} {}{} {} {:02}:{:02}:{:02}",
        dt.format("%A"),
        dt.format("%B"),
        day,
        suffix,
        dt.year(),
        dt.hour(),
        dt.minute(),
        dt.second()
    )
}

/// On-disk report document: the configuration that produced the reports,
/// then the reports themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub config: RunConfig,
    pub reports: Vec<StationReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

fn fmt_p(p: f64) -> String {
    format!("{p:.3}")
}

fn fmt_opt_p(p: Option<f64>) -> String {
    p.map(fmt_p).unwrap_or_default()
}

/// Bounded p-values render in the `<.01` / `>.1` style in Markdown tables.
fn fmt_bounded(outcome: &TestOutcome) -> String {
    match outcome.p_bound {
        PBound::Below(c) => format!("<{}", trim_zero(c)),
        PBound::Above(c) => format!(">{}", trim_zero(c)),
        PBound::Exact => fmt_p(outcome.p_value),
    }
}

fn trim_zero(c: f64) -> String {
    let s = format!("{c}");
    s.strip_prefix('0').map(str::to_string).unwrap_or(s)
}

/// Serialize reports. Ordering is fixed (descending station id), p-values
/// print to three decimals in CSV/Markdown, and the JSON form round-trips
/// with full precision.
pub fn emit_report(reports: &[StationReport], format: ReportFormat, cfg: &RunConfig) -> Vec<u8> {
    let mut ordered = reports.to_vec();
    sort_reports(&mut ordered);
    match format {
        ReportFormat::Json => {
            let doc = ReportDocument {
                config: cfg.clone(),
                reports: ordered,
            };
            let mut bytes = serde_json::to_vec_pretty(&doc).expect("report serialization");
            bytes.push(b'\n');
            bytes
        }
        ReportFormat::Csv => emit_csv(&ordered, cfg),
        ReportFormat::Markdown => emit_markdown(&ordered, cfg),
    }
}

/// Parse bytes produced by the JSON emitter.
pub fn parse_report_json(bytes: &[u8]) -> Result<ReportDocument> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

fn config_header(cfg: &RunConfig, comment: &str) -> String {
    let mut s = String::new();
    s.push_str(&format!("{comment} seed={}\n", cfg.master_seed));
    s.push_str(&format!("{comment} alpha={}\n", cfg.alpha));
    s.push_str(&format!("{comment} n_max={}\n", cfg.n_max));
    s.push_str(&format!("{comment} lb_h={}\n", cfg.ljung_box_h));
    s.push_str(&format!(
        "{comment} rp_projections={}\n",
        cfg.rp_num_projections
    ));
    s.push_str(&format!("{comment} cap_fdr={}\n", cfg.cap_fdr));
    s.push_str(&format!(
        "{comment} fdr_independent={}\n",
        cfg.fdr_independent
    ));
    s
}

fn panel_p(report: &StationReport, idx: usize) -> Option<f64> {
    report
        .stationarity
        .as_ref()
        .map(|p| p.outcomes[idx].p_value)
}

fn emit_csv(ordered: &[StationReport], cfg: &RunConfig) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(config_header(cfg, "#").as_bytes());
    writeln!(
        out,
        "station,raw_length,studied_n,start_utc,end_utc,adf_p,pp_p,lb_p,kpss_p,stationary,\
         epps_p,lv_p,fdr,rp_p,rp_lambda1,rp_lambda2,rp_test,rp_seed,verdict,threshold"
    )
    .unwrap();
    for r in ordered {
        let stationary = r
            .stationarity
            .as_ref()
            .map(|p| p.verdict.to_string())
            .unwrap_or_default();
        let (rp_p, rp_l1, rp_l2, rp_test_name, rp_seed) = match &r.rp {
            Some(rp) => (
                fmt_p(rp.outcome.p_value),
                format!("{}", rp.lambda1),
                format!("{}", rp.lambda2),
                rp.marginal_test.to_string(),
                rp.seed.to_string(),
            ),
            None => Default::default(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.station_id,
            r.raw_length,
            r.studied_n,
            r.start_utc,
            r.end_utc,
            fmt_opt_p(panel_p(r, 0)),
            fmt_opt_p(panel_p(r, 1)),
            fmt_opt_p(panel_p(r, 2)),
            fmt_opt_p(panel_p(r, 3)),
            stationary,
            fmt_opt_p(r.epps.as_ref().map(|o| o.p_value)),
            fmt_opt_p(r.lobato_velasco.as_ref().map(|o| o.p_value)),
            fmt_opt_p(r.fdr),
            rp_p,
            rp_l1,
            rp_l2,
            rp_test_name,
            rp_seed,
            r.verdict,
            fmt_p(cfg.alpha),
        )
        .unwrap();
    }
    out
}

fn emit_markdown(ordered: &[StationReport], cfg: &RunConfig) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(config_header(cfg, ">").as_bytes());
    writeln!(out, "\n## Stationarity panel\n").unwrap();
    writeln!(
        out,
        "| station | adf | phillips-perron | ljung-box | kpss | stationary |"
    )
    .unwrap();
    writeln!(out, "|---|---|---|---|---|---|").unwrap();
    for r in ordered {
        if let Some(panel) = &r.stationarity {
            writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} |",
                r.station_id,
                fmt_bounded(&panel.outcomes[0]),
                fmt_bounded(&panel.outcomes[1]),
                fmt_bounded(&panel.outcomes[2]),
                fmt_bounded(&panel.outcomes[3]),
                panel.verdict
            )
            .unwrap();
        }
    }

    writeln!(out, "\n## Marginal Gaussianity and FDR\n").unwrap();
    writeln!(out, "| station | epps | lobato-velasco | fdr |").unwrap();
    writeln!(out, "|---|---|---|---|").unwrap();
    for r in ordered {
        if let (Some(e), Some(l), Some(f)) = (&r.epps, &r.lobato_velasco, r.fdr) {
            let fdr_cell = if f < cfg.alpha {
                format!("**{}**", fmt_p(f))
            } else {
                fmt_p(f)
            };
            writeln!(
                out,
                "| {} | {} | {} | {} |",
                r.station_id,
                fmt_p(e.p_value),
                fmt_p(l.p_value),
                fdr_cell
            )
            .unwrap();
        }
    }

    writeln!(out, "\n## Random projection\n").unwrap();
    writeln!(
        out,
        "| station | p-value | lambda1 | lambda2 | test | seed |"
    )
    .unwrap();
    writeln!(out, "|---|---|---|---|---|---|").unwrap();
    for r in ordered {
        if let Some(rp) = &r.rp {
            let p = rp.outcome.p_value;
            let cell = if p < cfg.alpha {
                format!("**{}**", fmt_p(p))
            } else {
                fmt_p(p)
            };
            writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} |",
                r.station_id, cell, rp.lambda1, rp.lambda2, rp.marginal_test, rp.seed
            )
            .unwrap();
        }
    }

    writeln!(out, "\n## Verdicts\n").unwrap();
    writeln!(out, "| station | studied_n | verdict | error |").unwrap();
    writeln!(out, "|---|---|---|---|").unwrap();
    for r in ordered {
        writeln!(
            out,
            "| {} | {} | {} | {} |",
            r.station_id,
            r.studied_n,
            r.verdict,
            r.error.clone().unwrap_or_default()
        )
        .unwrap();
    }
    out
}
