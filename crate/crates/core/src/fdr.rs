//! False-discovery-rate combination of p-values under general dependence.
//!
//! The step-up adjustment multiplies by the harmonic factor
//! c(m) = Σ_{j=1..m} 1/j, which keeps the procedure valid for arbitrarily
//! dependent tests. Adjusted values are deliberately left uncapped so the
//! combined scalar can exceed 1; callers that want the conventional cap at 1
//! pass `cap = true` to [`by_adjust_with`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

/// Raw and adjusted p-values of one family of tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdrResult {
    pub raw: Vec<f64>,
    /// Adjusted values in input order; uncapped, may exceed 1.
    pub adjusted: Vec<f64>,
    pub m: usize,
    /// c(m) = Σ_{j=1..m} 1/j under dependence, 1 under independence.
    pub harmonic_factor: f64,
}

impl FdrResult {
    /// The per-family scalar: the adjusted value of the smallest raw
    /// p-value, which equals the minimum adjusted value.
    pub fn combined(&self) -> f64 {
        self.adjusted.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Rejection at level `alpha` (strictly below).
    pub fn reject_at(&self, alpha: f64) -> bool {
        self.combined() < alpha
    }
}

/// Dependent-case step-up adjustment, uncapped.
pub fn by_adjust(raw: &[f64]) -> Result<FdrResult> {
    by_adjust_with(raw, true, false)
}

/// Step-up adjustment with explicit variant switches: `dependent` applies the
/// harmonic factor c(m), `cap` clips adjusted values at 1.
pub fn by_adjust_with(raw: &[f64], dependent: bool, cap: bool) -> Result<FdrResult> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    for &p in raw {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::OutOfRange { value: p });
        }
    }
    let m = raw.len();
    let c = if dependent { stats::harmonic(m) } else { 1.0 };

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));

    // adjusted_(i) = min_{j ≥ i} p_(j)·m·c/j, computed as a running minimum
    // from the largest rank down
    let mut adjusted_sorted = vec![0.0; m];
    let mut running = f64::INFINITY;
    for i in (0..m).rev() {
        let rank = (i + 1) as f64;
        running = running.min(raw[order[i]] * m as f64 * c / rank);
        adjusted_sorted[i] = if cap { running.min(1.0) } else { running };
    }

    let mut adjusted = vec![0.0; m];
    for (i, &idx) in order.iter().enumerate() {
        adjusted[idx] = adjusted_sorted[i];
    }
    Ok(FdrResult {
        raw: raw.to_vec(),
        adjusted,
        m,
        harmonic_factor: c,
    })
}

/// True when the family rejects its null at `alpha`: minimum adjusted value
/// strictly below the level.
pub fn fdr_verdict(result: &FdrResult, alpha: f64) -> bool {
    result.reject_at(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(a: f64, b: f64) -> FdrResult {
        by_adjust(&[a, b]).unwrap()
    }

    #[test]
    fn harmonic_factor_is_three_halves_for_pairs() {
        assert_eq!(pair(0.3, 0.7).harmonic_factor, 1.5);
    }

    #[test]
    fn published_pair_examples() {
        // station 243
        let r = pair(0.063, 0.044);
        assert!((r.combined() - 0.0945).abs() < 1e-12);
        assert!((r.combined() - 0.095).abs() <= 0.001);
        // station 248
        let r = pair(0.524, 0.044);
        assert!((r.combined() - 0.132).abs() < 1e-12);
        // station 222, above 1 and reported uncapped
        let r = pair(0.821, 0.788);
        assert!((r.combined() - 1.2315).abs() < 1e-12);
        assert!((r.combined() - 1.231).abs() <= 0.001);
    }

    #[test]
    fn verdict_examples() {
        assert!(fdr_verdict(&pair(0.000, 0.000), 0.05));
        // adjusted 0.059-ish stays above the level
        let r = pair(0.020, 0.287);
        assert!((r.combined() - 0.06).abs() < 1e-12);
        assert!(!fdr_verdict(&r, 0.05));
        assert!(!fdr_verdict(&pair(1.0, 1.0), 0.05));
    }

    #[test]
    fn closed_form_for_pairs() {
        // combined = min(3·p_min, 1.5·p_max)
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(99);
        for _ in 0..10_000 {
            let a: f64 = rng.random();
            let b: f64 = rng.random();
            let r = pair(a, b);
            let closed = (3.0 * a.min(b)).min(1.5 * a.max(b));
            assert!((r.combined() - closed).abs() <= 1e-12, "({a},{b})");
        }
    }

    #[test]
    fn adjusted_dominates_raw() {
        let r = by_adjust(&[0.2, 0.01, 0.7, 0.4]).unwrap();
        for (raw, adj) in r.raw.iter().zip(&r.adjusted) {
            assert!(adj >= raw);
        }
    }

    #[test]
    fn cap_flag_clips_at_one() {
        let r = by_adjust_with(&[0.821, 0.788], true, true).unwrap();
        assert_eq!(r.combined(), 1.0);
    }

    #[test]
    fn independent_variant_drops_harmonic_factor() {
        let r = by_adjust_with(&[0.020, 0.287], false, false).unwrap();
        assert_eq!(r.harmonic_factor, 1.0);
        // min(2·0.020, 1·0.287) = 0.04 → rejected at .05 under the
        // less conservative rule
        assert!((r.combined() - 0.04).abs() < 1e-12);
        assert!(r.reject_at(0.05));
    }

    #[test]
    fn empty_and_out_of_range_inputs() {
        assert!(matches!(by_adjust(&[]), Err(Error::EmptyInput)));
        assert!(matches!(
            by_adjust(&[0.5, 1.2]),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(by_adjust(&[-0.1]), Err(Error::OutOfRange { .. })));
    }

    proptest! {
        #[test]
        fn monotone_in_each_raw_value(
            mut ps in proptest::collection::vec(0.0f64..=1.0, 2..8),
            idx in 0usize..8,
            bump in 0.0f64..0.5,
        ) {
            let idx = idx % ps.len();
            let before = by_adjust(&ps).unwrap();
            ps[idx] = (ps[idx] + bump).min(1.0);
            let after = by_adjust(&ps).unwrap();
            for (b, a) in before.adjusted.iter().zip(&after.adjusted) {
                prop_assert!(a + 1e-12 >= *b);
            }
        }

        #[test]
        fn permutation_equivariant(
            ps in proptest::collection::vec(0.0f64..=1.0, 2..8),
            rot in 0usize..8,
        ) {
            let r = by_adjust(&ps).unwrap();
            let k = rot % ps.len();
            let mut shuffled = ps.clone();
            shuffled.rotate_left(k);
            let s = by_adjust(&shuffled).unwrap();
            let mut expected = r.adjusted.clone();
            expected.rotate_left(k);
            for (e, got) in expected.iter().zip(&s.adjusted) {
                prop_assert!((e - got).abs() <= 1e-12);
            }
        }

        #[test]
        fn verdict_monotone_in_alpha(
            ps in proptest::collection::vec(0.0f64..=1.0, 1..6),
            alpha in 0.01f64..0.5,
            wider in 0.0f64..0.5,
        ) {
            let r = by_adjust(&ps).unwrap();
            if fdr_verdict(&r, alpha) {
                prop_assert!(fdr_verdict(&r, alpha + wider));
            }
        }
    }
}
