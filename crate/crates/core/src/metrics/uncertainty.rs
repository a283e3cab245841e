use serde::{Deserialize, Serialize};

use super::MetricsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LuResult {
    pub k: usize,
    pub nlls: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (K - 1 denominator).
    pub std: f64,
    pub lu: f64,
}

/// Coefficient of variation of sequence NLLs across K linearizations.
pub fn linearization_uncertainty(nlls: &[f64]) -> Result<LuResult, MetricsError> {
    if nlls.len() < 2 {
        return Err(MetricsError::TooFew { need: 2, got: nlls.len() });
    }
    if let Some((index, &value)) = nlls.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x >= 0.0)) {
        return Err(MetricsError::BadValue { index, value });
    }
    let k = nlls.len() as f64;
    let mean = nlls.iter().sum::<f64>() / k;
    if mean == 0.0 {
        return Err(MetricsError::ZeroMean);
    }
    let var = nlls.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let std = var.sqrt();
    Ok(LuResult { k: nlls.len(), nlls: nlls.to_vec(), mean, std, lu: std / mean })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn closed_forms() {
        assert_eq!(linearization_uncertainty(&[2.0; 4]).unwrap().lu, 0.0);
        let r = linearization_uncertainty(&[1.0, 3.0]).unwrap();
        assert_eq!(r.mean, 2.0);
        assert!((r.std - 2f64.sqrt()).abs() < 1e-15);
        assert!((r.lu - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(linearization_uncertainty(&[1.0]), Err(MetricsError::TooFew { .. })));
        assert!(matches!(linearization_uncertainty(&[0.0, 0.0]), Err(MetricsError::ZeroMean)));
        assert!(matches!(linearization_uncertainty(&[1.0, -1.0]), Err(MetricsError::BadValue { index: 1, .. })));
        assert!(matches!(linearization_uncertainty(&[1.0, f64::NAN]), Err(MetricsError::BadValue { .. })));
    }

    #[test]
    fn scale_free() {
        let mut rng = stream(3, 0, 0);
        for _ in 0..200 {
            let xs: Vec<f64> = (0..rng.gen_range(2..40)).map(|_| rng.gen_range(1.0..100.0)).collect();
            let c = rng.gen_range(0.01..100.0);
            let scaled: Vec<f64> = xs.iter().map(|x| x * c).collect();
            let a = linearization_uncertainty(&xs).unwrap().lu;
            let b = linearization_uncertainty(&scaled).unwrap().lu;
            assert!((a - b).abs() < 1e-12);
        }
    }
}
