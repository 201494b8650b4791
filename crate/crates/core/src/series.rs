//! Time-series container, cleaning/truncation of raw records, and the
//! moment/autocovariance estimators every test consumes.
//!
//! A [`RawRecord`] is what ingestion produces: timestamped samples where a
//! value may be a missing-value marker. [`RawRecord::truncate_to_first`]
//! restricts to the first `n_max` stored time points (missing markers
//! included, so the studied length after cleaning may be smaller), and
//! [`RawRecord::clean`] drops the markers and yields an immutable
//! [`TimeSeries`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

/// A timestamped record as stored at the source: values may be missing.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub station_id: String,
    /// `(utc_seconds, value)` pairs in storage order; `None` marks a missing value.
    pub samples: Vec<(i64, Option<f64>)>,
}

impl RawRecord {
    pub fn new(station_id: impl Into<String>, samples: Vec<(i64, Option<f64>)>) -> Self {
        Self {
            station_id: station_id.into(),
            samples,
        }
    }

    /// Keep the samples at the first `n_max` stored time points, missing
    /// markers included. Cleaning applies afterwards, so the studied length
    /// can end up below `n_max`.
    pub fn truncate_to_first(mut self, n_max: usize) -> Self {
        self.samples.sort_by_key(|(t, _)| *t);
        self.samples.truncate(n_max);
        self
    }

    /// Remove missing entries and freeze the record into a [`TimeSeries`].
    ///
    /// Errors with [`Error::AllMissing`] when nothing remains.
    pub fn clean(&self) -> Result<TimeSeries> {
        let raw_length = self.samples.len();
        if raw_length == 0 {
            return Err(Error::EmptyInput);
        }
        let mut timestamps = Vec::new();
        let mut values = Vec::new();
        for &(t, v) in &self.samples {
            match v {
                Some(x) if x.is_finite() => {
                    timestamps.push(t);
                    values.push(x);
                }
                _ => {}
            }
        }
        if values.is_empty() {
            return Err(Error::AllMissing {
                station: self.station_id.clone(),
            });
        }
        TimeSeries::new(self.station_id.clone(), timestamps, values, raw_length)
    }
}

/// Cleaned, immutable displacement series.
///
/// Invariants enforced at construction: timestamps strictly increasing, one
/// value per timestamp, no missing markers (non-finite values) remain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    station_id: String,
    timestamps: Vec<i64>,
    values: Vec<f64>,
    raw_length: usize,
}

impl TimeSeries {
    pub fn new(
        station_id: impl Into<String>,
        timestamps: Vec<i64>,
        values: Vec<f64>,
        raw_length: usize,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if timestamps.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} timestamps for {} values",
                timestamps.len(),
                values.len()
            )));
        }
        if timestamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "timestamps must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite value after cleaning".into(),
            ));
        }
        Ok(Self {
            station_id: station_id.into(),
            timestamps,
            values,
            raw_length,
        })
    }

    /// Convenience constructor for equally spaced data on a unit grid.
    pub fn from_values(station_id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let raw_length = values.len();
        let timestamps = (0..values.len() as i64).collect();
        Self::new(station_id, timestamps, values, raw_length)
    }

    pub fn station_id(&self) -> &str {
        &self.station_id
    }

    pub fn with_station_id(mut self, station_id: impl Into<String>) -> Self {
        self.station_id = station_id.into();
        self
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Length of the stored window before cleaning.
    pub fn raw_length(&self) -> usize {
        self.raw_length
    }

    /// Sample count after cleaning.
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn start_utc(&self) -> i64 {
        self.timestamps[0]
    }

    pub fn end_utc(&self) -> i64 {
        *self.timestamps.last().unwrap()
    }

    pub fn mean(&self) -> f64 {
        stats::mean(&self.values)
    }

    /// Sample variance with denominator `n`, the portmanteau-test convention
    /// used throughout the crate.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / self.n() as f64
    }

    /// First four moments from one pass over the cleaned series.
    pub fn moments(&self) -> Result<MomentSet> {
        self.require_n(2)?;
        let m = self.mean();
        let n = self.n() as f64;
        let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
        for &x in &self.values {
            let d = x - m;
            let d2 = d * d;
            s2 += d2;
            s3 += d2 * d;
            s4 += d2 * d2;
        }
        Ok(MomentSet {
            mean: m,
            variance: s2 / n,
            central_moment_3: s3 / n,
            central_moment_4: s4 / n,
        })
    }

    /// γ̂(k) = (1/n) Σ_{t=1}^{n−k} (x_t − x̄)(x_{t+k} − x̄).
    pub fn autocovariance(&self, lag: usize) -> Result<f64> {
        self.require_n(2)?;
        let n = self.n();
        if lag >= n {
            return Err(Error::LagTooLarge { lag, n });
        }
        let m = self.mean();
        let mut acc = 0.0;
        for t in 0..n - lag {
            acc += (self.values[t] - m) * (self.values[t + lag] - m);
        }
        Ok(acc / n as f64)
    }

    /// ρ̂(k) = γ̂(k)/γ̂(0), with ρ̂(0) = 1 exactly.
    pub fn autocorrelation(&self, lag: usize) -> Result<f64> {
        let g0 = self.autocovariance(0)?;
        if g0 <= 0.0 {
            return Err(Error::DegenerateSeries);
        }
        if lag == 0 {
            return Ok(1.0);
        }
        Ok(self.autocovariance(lag)? / g0)
    }

    /// All autocovariances γ̂(0..=max_lag). FFT-backed when the direct sum
    /// would be expensive; both paths agree to rounding.
    pub fn autocovariances(&self, max_lag: usize) -> Result<Vec<f64>> {
        self.require_n(2)?;
        let n = self.n();
        if max_lag >= n {
            return Err(Error::LagTooLarge { lag: max_lag, n });
        }
        if n * max_lag <= 1 << 18 {
            return (0..=max_lag).map(|k| self.autocovariance(k)).collect();
        }
        Ok(stats::autocovariances_fft(&self.values, max_lag))
    }

    fn require_n(&self, needed: usize) -> Result<()> {
        if self.n() < needed {
            return Err(Error::InsufficientData {
                needed,
                got: self.n(),
            });
        }
        Ok(())
    }
}

/// Mean, variance (denominator n) and third/fourth central moments of one
/// cleaned series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean: f64,
    pub variance: f64,
    pub central_moment_3: f64,
    pub central_moment_4: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alt_series() -> TimeSeries {
        TimeSeries::from_values("t", vec![1.0, -1.0, 1.0, -1.0]).unwrap()
    }

    #[test]
    fn clean_removes_missing_and_records_lengths() {
        let raw = RawRecord::new(
            "s",
            vec![
                (0, Some(1.0)),
                (1, None),
                (2, Some(2.0)),
                (3, Some(f64::NAN)),
            ],
        );
        let ts = raw.clean().unwrap();
        assert_eq!(ts.raw_length(), 4);
        assert_eq!(ts.n(), 2);
        assert_eq!(ts.values(), &[1.0, 2.0]);
        assert_eq!(ts.timestamps(), &[0, 2]);
    }

    #[test]
    fn clean_without_missing_keeps_full_length() {
        let raw = RawRecord::new("s", vec![(0, Some(1.0)), (1, Some(2.0))]);
        let ts = raw.clean().unwrap();
        assert_eq!(ts.n(), ts.raw_length());
    }

    #[test]
    fn clean_all_missing_errors() {
        let raw = RawRecord::new("092", vec![(0, None), (1, None)]);
        match raw.clean() {
            Err(Error::AllMissing { station }) => assert_eq!(station, "092"),
            other => panic!("expected AllMissing, got {other:?}"),
        }
    }

    #[test]
    fn clean_is_idempotent() {
        let raw = RawRecord::new("s", vec![(0, Some(1.0)), (1, None), (2, Some(3.0))]);
        let once = raw.clean().unwrap();
        let again = RawRecord::new(
            once.station_id(),
            once.timestamps()
                .iter()
                .zip(once.values())
                .map(|(&t, &v)| (t, Some(v)))
                .collect(),
        )
        .clean()
        .unwrap();
        assert_eq!(once.values(), again.values());
        assert_eq!(once.timestamps(), again.timestamps());
    }

    #[test]
    fn studied_length_mirrors_gappy_window() {
        // 30,000 stored points with 6,912 gaps leaves 23,088 studied samples.
        let samples: Vec<(i64, Option<f64>)> = (0..30_000)
            .map(|i| {
                (
                    i as i64,
                    if i < 6_912 {
                        None
                    } else {
                        Some(i as f64 % 7.0)
                    },
                )
            })
            .collect();
        let ts = RawRecord::new("433", samples).clean().unwrap();
        assert_eq!(ts.raw_length(), 30_000);
        assert_eq!(ts.n(), 23_088);
    }

    #[test]
    fn truncate_keeps_first_window() {
        let raw = RawRecord::new(
            "249",
            (0..40_000)
                .map(|i| (i as i64, Some(0.5 * i as f64)))
                .collect(),
        );
        let ts = raw.truncate_to_first(30_000).clean().unwrap();
        assert_eq!(ts.n(), 30_000);
        assert_eq!(ts.end_utc(), 29_999);
    }

    #[test]
    fn truncate_shorter_series_unchanged() {
        let raw = RawRecord::new("s", vec![(0, Some(1.0)), (1, Some(2.0))]);
        let ts = raw.clone().truncate_to_first(30_000).clean().unwrap();
        assert_eq!(ts.n(), 2);
        assert_eq!(raw.clean().unwrap(), ts);
    }

    #[test]
    fn truncate_to_single_sample() {
        let raw = RawRecord::new("s", vec![(0, Some(1.0)), (1, Some(2.0))]);
        let ts = raw.truncate_to_first(1).clean().unwrap();
        assert_eq!(ts.n(), 1);
        assert_eq!(ts.values(), &[1.0]);
    }

    #[test]
    fn autocovariance_hand_value() {
        let ts = alt_series();
        assert_eq!(ts.autocovariance(1).unwrap(), -0.75);
    }

    #[test]
    fn autocovariance_lag_zero_is_variance() {
        let ts = TimeSeries::from_values("t", vec![0.3, 1.2, -0.7, 2.4, 0.0]).unwrap();
        assert!((ts.autocovariance(0).unwrap() - ts.variance()).abs() < 1e-15);
    }

    #[test]
    fn autocovariance_constant_series_is_zero() {
        let ts = TimeSeries::from_values("t", vec![2.0; 8]).unwrap();
        assert_eq!(ts.autocovariance(1).unwrap(), 0.0);
    }

    #[test]
    fn autocovariance_lag_too_large() {
        let ts = alt_series();
        assert!(matches!(
            ts.autocovariance(4),
            Err(Error::LagTooLarge { .. })
        ));
    }

    #[test]
    fn autocorrelation_hand_value() {
        let ts = alt_series();
        assert_eq!(ts.autocorrelation(1).unwrap(), -0.75);
        assert_eq!(ts.autocorrelation(0).unwrap(), 1.0);
    }

    #[test]
    fn autocorrelation_degenerate() {
        let ts = TimeSeries::from_values("t", vec![5.0; 4]).unwrap();
        assert!(matches!(
            ts.autocorrelation(1),
            Err(Error::DegenerateSeries)
        ));
    }

    #[test]
    fn timestamps_must_increase() {
        assert!(TimeSeries::new("t", vec![0, 0], vec![1.0, 2.0], 2).is_err());
        assert!(TimeSeries::new("t", vec![1, 0], vec![1.0, 2.0], 2).is_err());
    }

    #[test]
    fn autocovariance_invariant_under_time_reversal() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(19);
        let values: Vec<f64> = (0..257).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let ts = TimeSeries::from_values("t", values.clone()).unwrap();
        let rev = TimeSeries::from_values("r", values.into_iter().rev().collect()).unwrap();
        for k in [0usize, 1, 2, 5, 17] {
            let a = ts.autocovariance(k).unwrap();
            let b = rev.autocovariance(k).unwrap();
            assert!(
                (a - b).abs() <= 1e-12 * (1.0 + a.abs()),
                "lag {k}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn autocorrelation_invariant_under_affine_maps() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(23);
        let values: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
        let ts = TimeSeries::from_values("t", values.clone()).unwrap();
        let mapped =
            TimeSeries::from_values("m", values.iter().map(|x| -7.25 * x + 3.0).collect()).unwrap();
        for k in 1..10 {
            let a = ts.autocorrelation(k).unwrap();
            let b = mapped.autocorrelation(k).unwrap();
            assert!((a - b).abs() <= 1e-12, "lag {k}: {a} vs {b}");
        }
    }

    #[test]
    fn fft_and_direct_autocovariances_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let values: Vec<f64> = (0..4096).map(|_| rng.random::<f64>() * 3.0 - 1.5).collect();
        let ts = TimeSeries::from_values("t", values).unwrap();
        let fft = stats::autocovariances_fft(ts.values(), 200);
        for (k, &g) in fft.iter().enumerate() {
            let direct = ts.autocovariance(k).unwrap();
            assert!(
                (g - direct).abs() <= 1e-10 * (1.0 + direct.abs()),
                "lag {k}: fft {g} vs direct {direct}"
            );
        }
    }
}
