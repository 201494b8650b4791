//! Random-projection Gaussianity test: Dirichlet stick-breaking weights, the
//! projected process, and a marginal test applied to the projection.
//!
//! A random projection Y_t = Σ_i d_i X_{t−i} with Dirichlet weights is
//! Gaussian only if the process itself is, so applying a marginal test to Y
//! rejects process-level Gaussianity even against alternatives whose
//! one-dimensional marginals are exactly Gaussian.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fdr;
use crate::marginal::{epps, lobato_velasco, DEFAULT_EPPS_POINTS};
use crate::series::TimeSeries;
use crate::stationarity::{TestName, TestOutcome, NULL_PROCESS_GAUSSIAN};
use crate::stats::derive_seed;

/// Truncated stick-breaking weight sequence with its residual mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StickWeights {
    pub lambda1: f64,
    pub lambda2: f64,
    /// d_0..d_K, each the product of the remaining mass and a Beta(λ₁,λ₂) draw.
    pub weights: Vec<f64>,
    /// 1 − Σ weights; bounded by the truncation tolerance on success.
    pub residual_mass: f64,
    /// Seed of the beta-draw stream that produced the weights.
    pub seed: u64,
}

/// Which marginal test the projection feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarginalTest {
    Epps,
    LobatoVelasco,
}

impl std::fmt::Display for MarginalTest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MarginalTest::Epps => f.write_str("epps"),
            MarginalTest::LobatoVelasco => f.write_str("lobato-velasco"),
        }
    }
}

/// Configuration of one random-projection test run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub marginal_test: MarginalTest,
    /// Truncation tolerance for the residual stick mass.
    pub epsilon: f64,
    /// Cap on the number of weights drawn before giving up.
    pub k_max: usize,
    pub num_projections: usize,
    /// Evaluation points handed to the Epps test, standardized scale.
    pub epps_points: Vec<f64>,
}

impl RpConfig {
    pub fn new(lambda1: f64, lambda2: f64, marginal_test: MarginalTest) -> Self {
        let epsilon = 1e-10;
        Self {
            lambda1,
            lambda2,
            marginal_test,
            epsilon,
            k_max: default_k_max(lambda1, lambda2, epsilon),
            num_projections: 1,
            epps_points: DEFAULT_EPPS_POINTS.to_vec(),
        }
    }
}

/// Weight-count cap: three times the expected number of draws needed to push
/// the residual mass below `epsilon` (the residual shrinks by a factor of
/// λ₂/(λ₁+λ₂) per draw on average), never below 50.
pub fn default_k_max(lambda1: f64, lambda2: f64, epsilon: f64) -> usize {
    let expected_steps = (1.0 / epsilon).ln() * (lambda1 + lambda2) / lambda1;
    ((3.0 * expected_steps).ceil() as usize).max(50)
}

/// Run the stick-breaking recursion over a supplied stream of break
/// fractions in the unit interval. Stops at the first weight that leaves
/// residual mass below `epsilon`; errors if `k_max` fractions do not suffice.
pub fn stick_weights_from_fractions<I>(
    lambda1: f64,
    lambda2: f64,
    fractions: I,
    epsilon: f64,
    k_max: usize,
    seed: u64,
) -> Result<StickWeights>
where
    I: IntoIterator<Item = f64>,
{
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter("epsilon must be in (0,1)".into()));
    }
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be positive".into()));
    }
    let mut weights = Vec::new();
    let mut residual = 1.0_f64;
    for b in fractions.into_iter().take(k_max) {
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::InvalidParameter(format!(
                "break fraction {b} outside [0, 1]"
            )));
        }
        let d = (residual * b).min(residual);
        weights.push(d);
        residual -= d;
        if residual < epsilon {
            return Ok(StickWeights {
                lambda1,
                lambda2,
                weights,
                residual_mass: residual,
                seed,
            });
        }
    }
    Err(Error::TruncationFailure { residual, k_max })
}

/// Draw a truncated Dirichlet stick-breaking weight sequence with
/// independent Beta(λ₁, λ₂) break fractions from a seeded stream.
pub fn stick_breaking_weights(
    lambda1: f64,
    lambda2: f64,
    seed: u64,
    epsilon: f64,
    k_max: usize,
) -> Result<StickWeights> {
    if !(lambda1 > 0.0 && lambda2 > 0.0) {
        return Err(Error::InvalidParameter(
            "beta parameters must be positive".into(),
        ));
    }
    let beta = Beta::new(lambda1, lambda2)
        .map_err(|e| Error::InvalidParameter(format!("beta parameters: {e}")))?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let draws = std::iter::repeat_with(move || beta.sample(&mut rng));
    stick_weights_from_fractions(lambda1, lambda2, draws.take(k_max), epsilon, k_max, seed)
}

/// Projected process Y_t = Σ_{i=0..K} d_i·x_{t−i} for t = K+1..n, so the
/// output keeps only fully covered samples and has length n − K.
pub fn project(series: &TimeSeries, w: &StickWeights) -> Result<TimeSeries> {
    let k_plus_one = w.weights.len();
    let n = series.n();
    if n <= k_plus_one {
        return Err(Error::SeriesTooShort {
            needed: k_plus_one,
            got: n,
        });
    }
    let x = series.values();
    let k = k_plus_one - 1;
    let mut projected = Vec::with_capacity(n - k);
    for t in k..n {
        let mut acc = 0.0;
        for (i, d) in w.weights.iter().enumerate() {
            acc += d * x[t - i];
        }
        projected.push(acc);
    }
    TimeSeries::new(
        series.station_id(),
        series.timestamps()[k..].to_vec(),
        projected,
        n - k,
    )
}

/// Apply the configured marginal test to one already-projected series.
pub fn marginal_on_projection(
    projected: &TimeSeries,
    marginal: MarginalTest,
    epps_points: &[f64],
) -> Result<TestOutcome> {
    match marginal {
        MarginalTest::Epps => epps(projected, epps_points),
        MarginalTest::LobatoVelasco => lobato_velasco(projected),
    }
}

/// Random-projection Gaussianity test. Draws `num_projections` weight
/// sequences from streams derived from `seed`, projects, applies the
/// configured marginal test, and for multiple projections combines the
/// p-values with the dependent-case FDR adjustment (minimum adjusted value).
pub fn rp_test(series: &TimeSeries, cfg: &RpConfig, seed: u64) -> Result<TestOutcome> {
    if cfg.num_projections == 0 {
        return Err(Error::InvalidParameter(
            "num_projections must be at least 1".into(),
        ));
    }
    let mut outcomes = Vec::with_capacity(cfg.num_projections);
    for j in 0..cfg.num_projections {
        let stream = derive_seed(seed, &format!("projection-{j}"));
        let w = stick_breaking_weights(cfg.lambda1, cfg.lambda2, stream, cfg.epsilon, cfg.k_max)?;
        let y = project(series, &w)?;
        outcomes.push(marginal_on_projection(
            &y,
            cfg.marginal_test,
            &cfg.epps_points,
        )?);
    }
    if cfg.num_projections == 1 {
        let inner = &outcomes[0];
        return Ok(TestOutcome::exact(
            TestName::RandomProjection,
            inner.statistic,
            inner.p_value,
            NULL_PROCESS_GAUSSIAN,
        ));
    }
    let raw: Vec<f64> = outcomes.iter().map(|o| o.p_value).collect();
    let adjusted = fdr::by_adjust(&raw)?;
    let (best, combined) = adjusted
        .adjusted
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))
        .expect("nonempty");
    Ok(TestOutcome::exact(
        TestName::RandomProjection,
        outcomes[best].statistic,
        combined.min(1.0),
        NULL_PROCESS_GAUSSIAN,
    ))
}

/// Choose the random-projection configuration from the marginal-stage
/// p-values: a marginal p-value below 0.05 selects that test with the
/// similarity parameters (100, 1); otherwise the test with the smaller
/// p-value runs under (2, 7). Ties break to Lobato-Velasco.
pub fn select_rp_config(epps_p: f64, lv_p: f64) -> RpConfig {
    let marginal = if lv_p <= epps_p {
        MarginalTest::LobatoVelasco
    } else {
        MarginalTest::Epps
    };
    if epps_p.min(lv_p) < 0.05 {
        RpConfig::new(100.0, 1.0, marginal)
    } else {
        RpConfig::new(2.0, 7.0, marginal)
    }
}
