use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::graph::{canonical_certificate, CanonicalCertificate, LabeledGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VunResult {
    pub n_generated: usize,
    pub n_valid: usize,
    pub n_unique: usize,
    pub n_novel: usize,
    pub validity: f64,
    /// Distinct valid outputs over valid outputs.
    pub uniqueness: f64,
    /// Distinct valid outputs absent from training, over distinct valid outputs.
    pub novelty: f64,
    pub vun: f64,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn vun<F>(generated: &[LabeledGraph], training: &HashSet<CanonicalCertificate>, is_valid: F) -> VunResult
where
    F: Fn(&LabeledGraph) -> bool,
{
    let valid: Vec<&LabeledGraph> = generated.iter().filter(|g| is_valid(g)).collect();
    let unique: HashSet<CanonicalCertificate> = valid.iter().map(|g| canonical_certificate(g)).collect();
    let n_novel = unique.iter().filter(|c| !training.contains(*c)).count();
    let validity = ratio(valid.len(), generated.len());
    let uniqueness = ratio(unique.len(), valid.len());
    let novelty = ratio(n_novel, unique.len());
    VunResult {
        n_generated: generated.len(),
        n_valid: valid.len(),
        n_unique: unique.len(),
        n_novel,
        validity,
        uniqueness,
        novelty,
        vun: validity * uniqueness * novelty,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::testing::*;

    #[test]
    fn examples() {
        let g = path(3);
        let h = complete(3);
        let train: HashSet<_> = [canonical_certificate(&g)].into_iter().collect();
        let r = vun(&[g.clone(), g.clone(), h.clone()], &train, |_| true);
        assert_eq!(r.validity, 1.0);
        assert!((r.uniqueness - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.novelty, 0.5);
        assert_eq!(r.vun, r.validity * r.uniqueness * r.novelty);

        let r = vun(&[g.clone(), g.clone()], &train, |_| true);
        assert_eq!((r.uniqueness, r.novelty, r.vun), (0.5, 0.0, 0.0));

        let r = vun(&[path(4), complete(4), star(3)], &train, |_| true);
        assert_eq!(r.vun, 1.0);

        let r = vun(&[path(4), h], &HashSet::new(), |x| x.m() > 3);
        assert_eq!((r.validity, r.n_valid), (0.0, 0));
        assert_eq!(r.vun, 0.0);
    }
}
