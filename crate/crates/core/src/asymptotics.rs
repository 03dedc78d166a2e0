//! Large-`N` limits of trace moments and empirical convergence scans.
//!
//! As `N → ∞` the traces `tr(w_1), .., tr(w_p)` of distinct cyclically reduced
//! words behave like independent `√j_i Z_i`, with `Z_i` standard complex
//! Gaussians and `j_i` the rotational symmetry count of `w_i`. Mixed moments
//! therefore tend to `Π α_i! j_i^{α_i}` when every `α_i = β_i`, and to zero
//! otherwise.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::moments::{exact_moment, MomentOptions};
use crate::rational::{self, ExactRational};
use crate::words::MomentSpec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermFactor {
    pub alpha_factorial: BigUint,
    pub symmetry_power: BigUint,
    pub symmetry: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymptoticPrediction {
    pub value: BigUint,
    pub balanced: bool,
    pub factors: Vec<TermFactor>,
}

impl AsymptoticPrediction {
    pub fn as_rational(&self) -> ExactRational {
        ExactRational::from_integer(self.value.clone().into())
    }

    /// JSON number when it fits in `u64`, decimal string otherwise.
    pub fn value_json(&self) -> serde_json::Value {
        match self.value.to_u64() {
            Some(v) => v.into(),
            None => self.value.to_string().into(),
        }
    }
}

/// `E|√j Z|^{2α} = α! j^α` for a standard complex Gaussian `Z`.
pub fn gaussian_reference_moment(j: u64, alpha: u32) -> BigUint {
    factorial(alpha) * num_traits::pow(BigUint::from(j), alpha as usize)
}

fn factorial(k: u32) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn predict(spec: &MomentSpec) -> AsymptoticPrediction {
    let balanced = spec.terms().iter().all(|t| t.alpha == t.beta);
    let factors: Vec<TermFactor> = spec
        .terms()
        .iter()
        .map(|t| {
            let j = t.word.symmetry_count().expect("spec words are nonempty");
            TermFactor {
                alpha_factorial: factorial(t.alpha),
                symmetry_power: num_traits::pow(BigUint::from(j), t.alpha as usize),
                symmetry: j,
            }
        })
        .collect();
    let value = if balanced {
        factors
            .iter()
            .fold(BigUint::one(), |acc, f| acc * &f.alpha_factorial * &f.symmetry_power)
    } else {
        BigUint::default()
    };
    AsymptoticPrediction {
        value,
        balanced,
        factors,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    #[serde(rename = "N")]
    pub dim: u64,
    pub exact_float: Option<f64>,
    pub abs_dev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub exact: Option<ExactRational>,
    #[serde(skip)]
    pub exact_dev: Option<ExactRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub predicted: AsymptoticPrediction,
    pub rows: Vec<ScanRow>,
    /// Deviations never increase with `N` over the rows that succeeded.
    pub non_increasing: bool,
    /// `|dev|·N` at every scanned `N` stays within twice its value at the
    /// smallest `N` (trivially true when every deviation is zero).
    pub scaled_bounded: bool,
    pub max_scaled_dev: f64,
}

impl ConvergenceReport {
    pub fn to_json(&self, spec: &str) -> serde_json::Value {
        serde_json::json!({
            "spec": spec,
            "predicted": self.predicted.value_json(),
            "rows": self.rows,
            "non_increasing": self.non_increasing,
            "scaled_bounded": self.scaled_bounded,
            "max_scaled_dev": self.max_scaled_dev,
        })
    }
}

/// Exact moments at each `N` compared with [`predict`]. Rows where the exact
/// computation fails carry the error message instead of values.
pub fn convergence_scan(
    spec: &MomentSpec,
    dims: &[u64],
    opts: &MomentOptions,
) -> ConvergenceReport {
    let predicted = predict(spec);
    let target = predicted.as_rational();
    let mut sorted = dims.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let rows: Vec<ScanRow> = sorted
        .iter()
        .map(|&dim| match exact_moment(spec, dim, opts) {
            Ok(m) => {
                let dev = num_traits::abs(&m.value - &target);
                ScanRow {
                    dim,
                    exact_float: Some(rational::to_f64(&m.value)),
                    abs_dev: Some(rational::to_f64(&dev)),
                    error: None,
                    exact: Some(m.value),
                    exact_dev: Some(dev),
                }
            }
            Err(e) => ScanRow {
                dim,
                exact_float: None,
                abs_dev: None,
                error: Some(e.to_string()),
                exact: None,
                exact_dev: None,
            },
        })
        .collect();

    let ok: Vec<(u64, &ExactRational)> = rows
        .iter()
        .filter_map(|r| r.exact_dev.as_ref().map(|d| (r.dim, d)))
        .collect();
    let non_increasing = ok.windows(2).all(|w| w[1].1 <= w[0].1);
    let scaled: Vec<ExactRational> = ok
        .iter()
        .map(|&(dim, d)| d * rational::int(dim as i64))
        .collect();
    let scaled_bounded = match scaled.first() {
        Some(first) => {
            let cap = first * rational::int(2);
            scaled.iter().all(|s| *s <= cap)
        }
        None => false,
    };
    let max_scaled_dev = scaled
        .iter()
        .map(rational::to_f64)
        .fold(0.0, f64::max);
    ConvergenceReport {
        predicted,
        rows,
        non_increasing,
        scaled_bounded,
        max_scaled_dev,
    }
}
