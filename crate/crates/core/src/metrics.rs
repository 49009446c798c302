//! Reconstruction error metrics.

use serde::{Deserialize, Serialize};

use crate::conduction::TemperatureField;
use crate::error::{Result, RodError};
use crate::model::Region;

const CONSTANT_SPREAD: f64 = 1e-12;

fn check(pred: &[f64], truth: &[f64]) -> Result<()> {
    if pred.is_empty() || pred.len() != truth.len() {
        return Err(RodError::domain(format!(
            "metric needs equal nonempty inputs (got {} and {})",
            pred.len(),
            truth.len()
        )));
    }
    Ok(())
}

/// Coefficient of determination `1 - SSE / SST`.
pub fn r_squared(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check(pred, truth)?;
    let mean = truth.iter().sum::<f64>() / truth.len() as f64;
    let sst: f64 = truth.iter().map(|t| (t - mean) * (t - mean)).sum();
    let (lo, hi) = truth
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    // spreads at roundoff level count as constant
    if !(hi - lo > CONSTANT_SPREAD * lo.abs().max(hi.abs())) || !(sst > 0.0) {
        return Err(RodError::UndefinedMetric("R^2 of a constant truth vector".into()));
    }
    let sse: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok(1.0 - sse / sst)
}

/// Relative Euclidean error `||pred - truth|| / ||truth||`.
pub fn nl2_norm(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check(pred, truth)?;
    let norm = truth.iter().map(|t| t * t).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(RodError::UndefinedMetric("NL2 of a zero-norm truth vector".into()));
    }
    let err = pred
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        .sqrt();
    Ok(err / norm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMetrics {
    pub nodes: usize,
    /// `None` when the truth is constant over the region.
    pub r_squared: Option<f64>,
    pub nl2: f64,
    /// [K]
    pub max_abs_error: f64,
    pub max_rel_error: f64,
}

impl RegionMetrics {
    pub fn compute(pred: &[f64], truth: &[f64]) -> Result<Self> {
        let r2 = match r_squared(pred, truth) {
            Ok(v) => Some(v),
            Err(RodError::UndefinedMetric(_)) => None,
            Err(e) => return Err(e),
        };
        let mut max_abs: f64 = 0.0;
        let mut max_rel: f64 = 0.0;
        for (p, t) in pred.iter().zip(truth) {
            let e = (p - t).abs();
            max_abs = max_abs.max(e);
            max_rel = max_rel.max(e / t.abs());
        }
        Ok(Self {
            nodes: pred.len(),
            r_squared: r2,
            nl2: nl2_norm(pred, truth)?,
            max_abs_error: max_abs,
            max_rel_error: max_rel,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub r_squared: f64,
    pub nl2: f64,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub fuel: RegionMetrics,
    pub cladding: RegionMetrics,
}

/// Whole-field and per-region metrics of `pred` against `truth` on the same mesh.
pub fn evaluate_fields(pred: &TemperatureField, truth: &TemperatureField) -> Result<MetricsReport> {
    if pred.mesh != truth.mesh {
        return Err(RodError::Structural("fields live on different meshes".into()));
    }
    let all = RegionMetrics::compute(&pred.values, &truth.values)?;
    let split = |region: Region| {
        let (p, t): (Vec<f64>, Vec<f64>) = pred
            .mesh
            .nodes()
            .zip(pred.values.iter().zip(&truth.values))
            .filter(|(n, _)| n.region == region)
            .map(|(_, (&p, &t))| (p, t))
            .unzip();
        RegionMetrics::compute(&p, &t)
    };
    Ok(MetricsReport {
        r_squared: r_squared(&pred.values, &truth.values)?,
        nl2: all.nl2,
        max_abs_error: all.max_abs_error,
        max_rel_error: all.max_rel_error,
        fuel: split(Region::Fuel)?,
        cladding: split(Region::Cladding)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn r_squared_examples() {
        let t = [1.0, 2.0, 4.0, 7.0];
        assert_eq!(r_squared(&t, &t).unwrap(), 1.0);
        assert_eq!(r_squared(&[3.5; 4], &t).unwrap(), 0.0);
        assert!(matches!(r_squared(&t, &[2.0; 4]), Err(RodError::UndefinedMetric(_))));
        assert!(r_squared(&[], &[]).is_err());
        let flat = [583.15, 583.15 + 1e-11, 583.15 - 2e-11];
        assert!(matches!(r_squared(&t[..3], &flat), Err(RodError::UndefinedMetric(_))));
    }

    #[test]
    fn r_squared_matches_spreadsheet_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p: Vec<f64> = (0..10).map(|_| rng.gen_range(500.0..900.0)).collect();
        let t: Vec<f64> = (0..10).map(|_| rng.gen_range(500.0..900.0)).collect();
        // column-wise: mean, deviations, squares, sums
        let mut mean = 0.0;
        for v in &t {
            mean += v;
        }
        mean /= 10.0;
        let mut sst = 0.0;
        let mut sse = 0.0;
        for k in 0..10 {
            sst += (t[k] - mean).powi(2);
            sse += (p[k] - t[k]).powi(2);
        }
        assert!((r_squared(&p, &t).unwrap() - (1.0 - sse / sst)).abs() < 1e-12);
    }

    #[test]
    fn nl2_examples() {
        let t = [600.0, 700.0, 1200.0];
        assert_eq!(nl2_norm(&t, &t).unwrap(), 0.0);
        let p: Vec<f64> = t.iter().map(|v| 1.01 * v).collect();
        assert!((nl2_norm(&p, &t).unwrap() - 0.01).abs() < 1e-12);
        assert!(matches!(nl2_norm(&[1.0], &[0.0]), Err(RodError::UndefinedMetric(_))));
    }
}
