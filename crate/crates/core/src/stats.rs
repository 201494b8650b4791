//! Internal numeric helpers: chi-square tails, OLS, long-run variance
//! estimators, FFT autocovariances, seeding and a small Nelder-Mead.

use nalgebra::{Cholesky, DMatrix, DVector};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Upper-tail probability of the chi-square distribution with `df` degrees
/// of freedom.
pub(crate) fn chi_square_sf(x: f64, df: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("positive df");
    dist.sf(x).clamp(0.0, 1.0)
}

/// Biased-denominator autocovariances γ̂(0..=max_lag) via FFT.
pub(crate) fn autocovariances_fft(values: &[f64], max_lag: usize) -> Vec<f64> {
    let n = values.len();
    // zero-pad past n + max_lag so circular wrap-around cannot alias the lags we keep
    let m = (n + max_lag + 1).next_power_of_two();
    let xbar = mean(values);
    let mut buf: Vec<Complex<f64>> = Vec::with_capacity(m);
    buf.extend(values.iter().map(|&v| Complex::new(v - xbar, 0.0)));
    buf.resize(m, Complex::new(0.0, 0.0));

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(m).process(&mut buf);

    let scale = 1.0 / (m as f64 * n as f64);
    (0..=max_lag).map(|k| buf[k].re * scale).collect()
}

pub(crate) struct OlsFit {
    pub beta: DVector<f64>,
    pub residuals: DVector<f64>,
    /// Standard errors of the coefficients.
    pub se: DVector<f64>,
    /// Residual variance with denominator (rows − cols).
    pub s2: f64,
}

/// Ordinary least squares via the normal equations. Returns `None` when the
/// cross-product matrix is not positive definite (collinear regressors).
pub(crate) fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<OlsFit> {
    let rows = x.nrows();
    let cols = x.ncols();
    if rows <= cols {
        return None;
    }
    let xtx = x.transpose() * x;
    let xty = x.transpose() * y;
    let chol = Cholesky::new(xtx)?;
    let beta = chol.solve(&xty);
    let residuals = y - x * &beta;
    let s2 = residuals.dot(&residuals) / (rows - cols) as f64;
    let cov = chol.inverse() * s2;
    let se = DVector::from_iterator(cols, (0..cols).map(|i| cov[(i, i)].max(0.0).sqrt()));
    Some(OlsFit {
        beta,
        residuals,
        se,
        s2,
    })
}

/// Truncation point floor(4·(n/100)^{1/4}) used by the Phillips-Perron and
/// KPSS long-run variance estimates.
pub(crate) fn newey_west_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Bartlett-kernel long-run variance of a scalar sequence, autocovariances
/// with denominator n.
pub(crate) fn bartlett_long_run_variance(xs: &[f64], bandwidth: usize) -> f64 {
    let n = xs.len();
    let m = mean(xs);
    let centered: Vec<f64> = xs.iter().map(|x| x - m).collect();
    let gamma = |k: usize| -> f64 {
        centered[..n - k]
            .iter()
            .zip(&centered[k..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64
    };
    let mut lrv = gamma(0);
    for k in 1..=bandwidth.min(n - 1) {
        let w = 1.0 - k as f64 / (bandwidth as f64 + 1.0);
        lrv += 2.0 * w * gamma(k);
    }
    lrv
}

/// Bartlett-kernel long-run covariance matrix of a multivariate sequence
/// given as column vectors of equal length.
pub(crate) fn bartlett_long_run_covariance(cols: &[Vec<f64>], bandwidth: usize) -> DMatrix<f64> {
    let d = cols.len();
    let n = cols[0].len();
    let centered: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| {
            let m = mean(c);
            c.iter().map(|x| x - m).collect()
        })
        .collect();
    let gamma = |k: usize| -> DMatrix<f64> {
        let mut g = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let mut acc = 0.0;
                for t in 0..n - k {
                    acc += centered[a][t] * centered[b][t + k];
                }
                g[(a, b)] = acc / n as f64;
            }
        }
        g
    };
    let mut lrc = gamma(0);
    for k in 1..=bandwidth.min(n - 1) {
        let w = 1.0 - k as f64 / (bandwidth as f64 + 1.0);
        let gk = gamma(k);
        lrc += (&gk + gk.transpose()) * w;
    }
    // symmetrize against rounding
    (&lrc + lrc.transpose()) * 0.5
}

/// Andrews AR(1) plug-in bandwidth for the Bartlett kernel, pooled over the
/// component series. Adapts to serial dependence so the spectral estimate
/// stays consistent for strongly autocorrelated inputs.
pub(crate) fn andrews_bartlett_bandwidth(cols: &[Vec<f64>]) -> usize {
    let n = cols[0].len();
    let mut num = 0.0;
    let mut den = 0.0;
    for c in cols {
        let m = mean(c);
        let centered: Vec<f64> = c.iter().map(|x| x - m).collect();
        let g0 = centered.iter().map(|x| x * x).sum::<f64>() / n as f64;
        if g0 <= 0.0 {
            continue;
        }
        let g1 = centered[..n - 1]
            .iter()
            .zip(&centered[1..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64;
        let rho = (g1 / g0).clamp(-0.97, 0.97);
        let sigma2 = g0 * (1.0 - rho * rho);
        let s4 = sigma2 * sigma2;
        num += 4.0 * rho * rho * s4 / ((1.0 - rho).powi(6) * (1.0 + rho).powi(2));
        den += s4 / (1.0 - rho).powi(4);
    }
    if den <= 0.0 || num <= 0.0 {
        return 0;
    }
    let alpha1 = num / den;
    let st = 1.1447 * (alpha1 * n as f64).powf(1.0 / 3.0);
    (st.floor() as usize).min(n / 4)
}

/// Derive a child seed from a master seed and a textual label. FNV-1a over
/// the little-endian master bytes and the label, stable across platforms.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for b in master.to_le_bytes().into_iter().chain(label.bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(PRIME);
    }
    h
}

/// Minimize `f` over 2 parameters with Nelder-Mead. Deterministic; returns
/// the best point and value seen.
pub(crate) fn nelder_mead_2d<F: Fn(&[f64; 2]) -> f64>(
    f: F,
    start: [f64; 2],
    step: f64,
    max_iter: usize,
) -> ([f64; 2], f64) {
    let mut simplex = [
        start,
        [start[0] + step, start[1]],
        [start[0], start[1] + step],
    ];
    let mut values = simplex.map(|p| f(&p));

    for _ in 0..max_iter {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, mid, worst) = (order[0], order[1], order[2]);
        if (values[worst] - values[best]).abs() <= 1e-12 * (1.0 + values[best].abs()) {
            break;
        }
        let centroid = [
            (simplex[best][0] + simplex[mid][0]) / 2.0,
            (simplex[best][1] + simplex[mid][1]) / 2.0,
        ];
        let reflect = [
            centroid[0] + (centroid[0] - simplex[worst][0]),
            centroid[1] + (centroid[1] - simplex[worst][1]),
        ];
        let fr = f(&reflect);
        if fr < values[best] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - simplex[worst][0]),
                centroid[1] + 2.0 * (centroid[1] - simplex[worst][1]),
            ];
            let fe = f(&expand);
            if fe < fr {
                simplex[worst] = expand;
                values[worst] = fe;
            } else {
                simplex[worst] = reflect;
                values[worst] = fr;
            }
        } else if fr < values[mid] {
            simplex[worst] = reflect;
            values[worst] = fr;
        } else {
            let contract = [
                centroid[0] + 0.5 * (simplex[worst][0] - centroid[0]),
                centroid[1] + 0.5 * (simplex[worst][1] - centroid[1]),
            ];
            let fc = f(&contract);
            if fc < values[worst] {
                simplex[worst] = contract;
                values[worst] = fc;
            } else {
                for i in 0..3 {
                    if i != best {
                        simplex[i] = [
                            simplex[best][0] + 0.5 * (simplex[i][0] - simplex[best][0]),
                            simplex[best][1] + 0.5 * (simplex[i][1] - simplex[best][1]),
                        ];
                        values[i] = f(&simplex[i]);
                    }
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..3 {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best], values[best])
}

pub(crate) fn harmonic(m: usize) -> f64 {
    (1..=m).map(|j| 1.0 / j as f64).sum()
}
