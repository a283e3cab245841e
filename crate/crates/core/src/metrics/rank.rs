use super::MetricsError;

fn check_finite(xs: &[f64]) -> Result<(), MetricsError> {
    match xs.iter().enumerate().find(|(_, x)| !x.is_finite()) {
        Some((index, &value)) => Err(MetricsError::BadValue { index, value }),
        None => Ok(()),
    }
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn mid_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Mann-Whitney AUC: probability that a random positive outscores a random
/// negative, ties counting one half. Higher scores should mean positive.
pub fn roc_auc(scores: &[f64], positive: &[bool]) -> Result<f64, MetricsError> {
    if scores.len() != positive.len() {
        return Err(MetricsError::LengthMismatch(scores.len(), positive.len()));
    }
    check_finite(scores)?;
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(MetricsError::SingleClass);
    }
    let ranks = mid_ranks(scores);
    let rank_sum: f64 = ranks.iter().zip(positive).filter(|(_, &p)| p).map(|(r, _)| r).sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Spearman rank correlation (Pearson correlation of mid-ranks).
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, MetricsError> {
    if xs.len() != ys.len() {
        return Err(MetricsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(MetricsError::TooFew { need: 3, got: xs.len() });
    }
    check_finite(xs)?;
    check_finite(ys)?;
    let rx = mid_ranks(xs);
    let ry = mid_ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricsError::Constant);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn pairwise_auc(scores: &[f64], positive: &[bool]) -> f64 {
        let (mut wins, mut pairs) = (0.0, 0.0);
        for i in 0..scores.len() {
            for j in 0..scores.len() {
                if positive[i] && !positive[j] {
                    pairs += 1.0;
                    if scores[i] > scores[j] {
                        wins += 1.0;
                    } else if scores[i] == scores[j] {
                        wins += 0.5;
                    }
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn auc_examples() {
        assert_eq!(roc_auc(&[3.0, 4.0, 1.0, 0.0], &[true, true, false, false]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[1.0, 1.0], &[true, false]).unwrap(), 0.5);
        assert!(matches!(roc_auc(&[1.0, 2.0], &[true, true]), Err(MetricsError::SingleClass)));
        let mut rng = stream(0, 0, 0);
        let scores: Vec<f64> = (0..10_000).map(|_| rng.gen()).collect();
        let labels: Vec<bool> = (0..10_000).map(|_| rng.gen_bool(0.5)).collect();
        assert!((roc_auc(&scores, &labels).unwrap() - 0.5).abs() < 0.02);
    }

    #[test]
    fn auc_matches_pair_counting() {
        let mut rng = stream(1, 0, 0);
        for _ in 0..100 {
            let n = rng.gen_range(2..200);
            // coarse scores force ties
            let scores: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..8))).collect();
            let mut labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.4)).collect();
            labels[0] = true;
            labels[1] = false;
            assert!((roc_auc(&scores, &labels).unwrap() - pairwise_auc(&scores, &labels)).abs() < 1e-12);
        }
    }

    /// Rank by counting, then the textbook Pearson formula.
    fn naive_spearman(xs: &[f64], ys: &[f64]) -> f64 {
        let rank = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .map(|&a| {
                    let less = v.iter().filter(|&&b| b < a).count() as f64;
                    let equal = v.iter().filter(|&&b| b == a).count() as f64;
                    less + (equal + 1.0) / 2.0
                })
                .collect()
        };
        let (rx, ry) = (rank(xs), rank(ys));
        let n = xs.len() as f64;
        let sx: f64 = rx.iter().sum();
        let sy: f64 = ry.iter().sum();
        let sxy: f64 = rx.iter().zip(&ry).map(|(a, b)| a * b).sum();
        let sxx: f64 = rx.iter().map(|a| a * a).sum();
        let syy: f64 = ry.iter().map(|b| b * b).sum();
        (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
    }

    #[test]
    fn spearman_examples() {
        let xs = [1.0, 5.0, 2.0, 8.0];
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((spearman(&xs, &xs).unwrap() - 1.0).abs() < 1e-15);
        assert!((spearman(&xs, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(MetricsError::Constant)));
        assert!(matches!(spearman(&[1.0, 2.0], &[1.0, 2.0]), Err(MetricsError::TooFew { .. })));
    }

    #[test]
    fn spearman_matches_naive() {
        let mut rng = stream(2, 0, 0);
        for _ in 0..100 {
            let n = rng.gen_range(3..80);
            let xs: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..10))).collect();
            let ys: Vec<f64> = (0..n).map(|i| xs[i] * 0.5 + f64::from(rng.gen_range(0..6))).collect();
            if xs.iter().all(|&x| x == xs[0]) || ys.iter().all(|&y| y == ys[0]) {
                continue;
            }
            assert!((spearman(&xs, &ys).unwrap() - naive_spearman(&xs, &ys)).abs() < 1e-12);
        }
    }
}
