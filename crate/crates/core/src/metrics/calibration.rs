use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::codec::TokenType;
use crate::model::ScoredSequence;

pub const DEFAULT_BINS: usize = 15;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BinStats {
    pub count: usize,
    pub mean_confidence: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EceResult {
    pub bins: Vec<BinStats>,
    pub n: usize,
    pub ece: f64,
}

/// Bin `b` covers `(b/B, (b+1)/B]`; confidence 0 falls in the first bin.
fn bin_of(confidence: f64, bins: usize) -> usize {
    let scaled = confidence * bins as f64;
    // guard against 2/15 * 15 = 2.0000000000000004 pushing a boundary value up a bin
    let b = (scaled - 1e-9).ceil() as isize - 1;
    b.clamp(0, bins as isize - 1) as usize
}

/// ECE over (top-1 confidence, top-1 correct) records with equal-width bins.
pub fn expected_calibration_error(records: &[(f64, bool)], bins: usize) -> Result<EceResult, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::Empty);
    }
    if bins == 0 {
        return Err(MetricsError::TooFew { need: 1, got: 0 });
    }
    let mut conf = vec![0.0; bins];
    let mut hits = vec![0usize; bins];
    let mut count = vec![0usize; bins];
    for (index, &(c, ok)) in records.iter().enumerate() {
        if !(0.0..=1.0).contains(&c) {
            return Err(MetricsError::BadConfidence { index, value: c });
        }
        let b = bin_of(c, bins);
        conf[b] += c;
        hits[b] += usize::from(ok);
        count[b] += 1;
    }
    let n = records.len();
    let mut ece = 0.0;
    let stats = (0..bins)
        .map(|b| {
            if count[b] == 0 {
                return BinStats::default();
            }
            let mean_confidence = conf[b] / count[b] as f64;
            let accuracy = hits[b] as f64 / count[b] as f64;
            ece += count[b] as f64 / n as f64 * (accuracy - mean_confidence).abs();
            BinStats { count: count[b], mean_confidence, accuracy }
        })
        .collect();
    Ok(EceResult { bins: stats, n, ece })
}

pub fn ece_of_scored(scored: &[ScoredSequence], bins: usize) -> Result<EceResult, MetricsError> {
    let records: Vec<(f64, bool)> =
        scored.iter().flat_map(|s| s.per_token.iter().map(|t| (t.confidence, t.correct))).collect();
    expected_calibration_error(&records, bins)
}

/// ECE per target token type. Types with no tokens are absent.
pub fn ece_by_token_type(
    scored: &[ScoredSequence],
    bins: usize,
) -> Result<BTreeMap<TokenType, EceResult>, MetricsError> {
    let mut groups: BTreeMap<TokenType, Vec<(f64, bool)>> = BTreeMap::new();
    for s in scored {
        for t in &s.per_token {
            groups.entry(t.token_type).or_default().push((t.confidence, t.correct));
        }
    }
    groups.into_iter().map(|(ty, recs)| Ok((ty, expected_calibration_error(&recs, bins)?))).collect()
}
