//! Marginal Gaussianity tests valid under serial dependence.
//!
//! [`epps`] compares the empirical characteristic function of the
//! standardized series against the Gaussian characteristic function at a
//! small set of evaluation points, weighting by an estimate of the long-run
//! covariance of the moment functions and minimizing over mean and variance.
//! The minimized quadratic form is asymptotically chi-square with
//! 2·(points) − 2 degrees of freedom.
//!
//! [`lobato_velasco`] checks the third and fourth central moments against
//! their Gaussian values, standardized by long-run variances built from the
//! full sample autocovariance sums (no kernel truncation).

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::stationarity::{TestName, TestOutcome, NULL_MARGINAL_GAUSSIAN};
use crate::stats;

/// Default characteristic-function evaluation points on the standardized
/// scale.
pub const DEFAULT_EPPS_POINTS: [f64; 2] = [0.8, 1.6];

/// Epps characteristic-function test for marginal Gaussianity.
///
/// `eval_points` are taken on the standardized scale: the series is centered
/// and scaled by its sample standard deviation first, which makes the
/// p-value exactly invariant under `x -> a·x + b` with `a > 0`.
pub fn epps(series: &TimeSeries, eval_points: &[f64]) -> Result<TestOutcome> {
    let n = series.n();
    if eval_points.len() < 2 {
        return Err(Error::InvalidParameter(
            "epps needs at least two evaluation points".into(),
        ));
    }
    if eval_points.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        return Err(Error::InvalidParameter(
            "epps evaluation points must be positive and finite".into(),
        ));
    }
    let dim = 2 * eval_points.len();
    if n < 4 * dim {
        return Err(Error::InsufficientData {
            needed: 4 * dim,
            got: n,
        });
    }
    let var = series.variance();
    if var <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let m = series.mean();
    let sd = var.sqrt();
    let z: Vec<f64> = series.values().iter().map(|x| (x - m) / sd).collect();

    // moment functions: (cos t_j z, sin t_j z) stacked per evaluation point
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for &t in eval_points {
        cols.push(z.iter().map(|&v| (t * v).cos()).collect());
        cols.push(z.iter().map(|&v| (t * v).sin()).collect());
    }
    let empirical = DVector::from_iterator(dim, cols.iter().map(|c| stats::mean(c)));

    let bandwidth = stats::andrews_bartlett_bandwidth(&cols);
    let lrc = stats::bartlett_long_run_covariance(&cols, bandwidth);
    let chol = Cholesky::new(lrc).ok_or(Error::SingularCovariance)?;
    let weight: DMatrix<f64> = chol.inverse();

    // Gaussian characteristic function at the evaluation points for (μ, σ²)
    let model = |mu: f64, s2: f64| -> DVector<f64> {
        DVector::from_iterator(
            dim,
            eval_points.iter().flat_map(|&t| {
                let damp = (-0.5 * t * t * s2).exp();
                [damp * (t * mu).cos(), damp * (t * mu).sin()]
            }),
        )
    };
    let objective = |p: &[f64; 2]| -> f64 {
        let diff = &empirical - model(p[0], p[1].exp());
        n as f64 * (diff.transpose() * &weight * &diff)[(0, 0)]
    };

    // minimize over (μ, ln σ²) starting at the sample moments of z
    let (_, q_min) = stats::nelder_mead_2d(objective, [0.0, 0.0], 0.05, 500);
    let statistic = q_min.max(0.0);
    let df = dim - 2;
    let p = stats::chi_square_sf(statistic, df);
    Ok(TestOutcome::exact(
        TestName::Epps,
        statistic,
        p,
        NULL_MARGINAL_GAUSSIAN,
    ))
}

/// Long-run variance of a moment estimator as the full sum of powered sample
/// autocovariances: γ̂(0)^p + 2 Σ_{j≥1} γ̂(j)^p.
///
/// Falls back to a truncated sum with bandwidth floor(n^{1/3}) when the full
/// sum is nonpositive; errors only if the truncated sum is nonpositive too.
/// Returns the estimate and whether the fallback was used.
fn powered_autocovariance_sum(acvs: &[f64], power: i32, n: usize) -> Result<(f64, bool)> {
    let full: f64 =
        acvs[0].powi(power) + 2.0 * acvs[1..].iter().map(|g| g.powi(power)).sum::<f64>();
    if full > 0.0 {
        return Ok((full, false));
    }
    let bw = ((n as f64).powf(1.0 / 3.0).floor() as usize).min(acvs.len() - 1);
    let truncated: f64 =
        acvs[0].powi(power) + 2.0 * acvs[1..=bw].iter().map(|g| g.powi(power)).sum::<f64>();
    if truncated > 0.0 {
        return Ok((truncated, true));
    }
    Err(Error::NonpositiveLongRunVariance)
}

/// Lobato-Velasco skewness/kurtosis test for marginal Gaussianity:
/// G = n·[ μ̂₃²/(6·F̂₃) + (μ̂₄ − 3μ̂₂²)²/(24·F̂₄) ] against chi-square(2).
pub fn lobato_velasco(series: &TimeSeries) -> Result<TestOutcome> {
    let n = series.n();
    if n < 8 {
        return Err(Error::InsufficientData { needed: 8, got: n });
    }
    let mom = series.moments()?;
    if mom.variance <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let acvs = series.autocovariances(n - 1)?;
    let (f3, _) = powered_autocovariance_sum(&acvs, 3, n)?;
    let (f4, _) = powered_autocovariance_sum(&acvs, 4, n)?;

    let skew_term = mom.central_moment_3;
    let kurt_term = mom.central_moment_4 - 3.0 * mom.variance * mom.variance;
    let g = n as f64 * (skew_term * skew_term / (6.0 * f3) + kurt_term * kurt_term / (24.0 * f4));
    let p = stats::chi_square_sf(g, 2);
    Ok(TestOutcome::exact(
        TestName::LobatoVelasco,
        g,
        p,
        NULL_MARGINAL_GAUSSIAN,
    ))
}
