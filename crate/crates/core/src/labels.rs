//! Soft labels, label smoothing and soft-target cross-entropy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower clamp applied to predicted probabilities before taking logs.
pub const LOG_FLOOR: f64 = 1e-12;

/// Index of a class in `[0, n_class)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassIndex(pub usize);

impl ClassIndex {
    pub fn get(self) -> usize {
        self.0
    }
}

/// Probability vector over classes. Serialized as a bare JSON array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SoftLabel(Vec<f64>);

impl SoftLabel {
    /// Checks non-negativity and that the components sum to 1 within 1e-9.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("soft label must have at least one class"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::domain("soft label components must be finite and >= 0"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("soft label sums to {sum}")));
        }
        Ok(SoftLabel(probs))
    }

    pub fn one_hot(y: ClassIndex, n_class: usize) -> Result<Self> {
        smooth_label(y, n_class, 0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn n_class(&self) -> usize {
        self.0.len()
    }

    /// Index of the largest component; ties go to the lowest index.
    pub fn argmax(&self) -> ClassIndex {
        ClassIndex(argmax(&self.0))
    }
}

/// First index of the maximum.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate().skip(1) {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}

/// `(1 - eps) * onehot(y) + eps / n_class`.
pub fn smooth_label(y: ClassIndex, n_class: usize, epsilon: f64) -> Result<SoftLabel> {
    if n_class < 2 {
        return Err(Error::domain(format!("n_class must be >= 2, got {n_class}")));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::domain(format!("epsilon {epsilon} outside [0, 1)")));
    }
    if y.0 >= n_class {
        return Err(Error::domain(format!("class {} out of range for {n_class} classes", y.0)));
    }
    let off = epsilon / n_class as f64;
    let mut probs = vec![off; n_class];
    probs[y.0] = (1.0 - epsilon) + off;
    Ok(SoftLabel(probs))
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// `-sum_c target_c * ln(clamp(pred_c))`.
pub fn soft_cross_entropy(pred: &[f64], target: &SoftLabel) -> Result<f64> {
    if pred.len() != target.n_class() {
        return Err(Error::domain(format!(
            "dimension mismatch: prediction has {} classes, target {}",
            pred.len(),
            target.n_class()
        )));
    }
    let loss = -pred
        .iter()
        .zip(target.probs())
        .map(|(p, t)| t * p.clamp(LOG_FLOOR, 1.0).ln())
        .sum::<f64>();
    Ok(loss.max(0.0))
}

/// Gradient of `soft_cross_entropy(softmax(logits), target)` w.r.t. the logits.
pub fn soft_ce_gradient(logits: &[f64], target: &SoftLabel) -> Result<Vec<f64>> {
    if logits.len() != target.n_class() {
        return Err(Error::domain(format!(
            "dimension mismatch: {} logits, target has {} classes",
            logits.len(),
            target.n_class()
        )));
    }
    Ok(softmax(logits)
        .into_iter()
        .zip(target.probs())
        .map(|(p, t)| p - t)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn smoothing_examples() {
        let l = smooth_label(ClassIndex(0), 2, 0.1).unwrap();
        assert!(close(l.probs(), &[0.95, 0.05], 1e-12));
        let l = smooth_label(ClassIndex(2), 5, 0.3).unwrap();
        assert!(close(l.probs(), &[0.06, 0.06, 0.76, 0.06, 0.06], 1e-12));
        for n in 2..7 {
            for y in 0..n {
                let l = smooth_label(ClassIndex(y), n, 0.0).unwrap();
                for c in 0..n {
                    assert_eq!(l.probs()[c], if c == y { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn smoothing_domain_errors() {
        assert!(smooth_label(ClassIndex(0), 1, 0.1).is_err());
        assert!(smooth_label(ClassIndex(0), 2, 1.0).is_err());
        assert!(smooth_label(ClassIndex(0), 2, -0.1).is_err());
        assert!(smooth_label(ClassIndex(2), 2, 0.1).is_err());
    }

    #[test]
    fn cross_entropy_examples() {
        let one = SoftLabel::one_hot(ClassIndex(1), 3).unwrap();
        assert!(soft_cross_entropy(one.probs(), &one).unwrap() <= 1e-11);
        let t = SoftLabel::one_hot(ClassIndex(0), 2).unwrap();
        let ce = soft_cross_entropy(&[0.5, 0.5], &t).unwrap();
        assert!((ce - std::f64::consts::LN_2).abs() < 1e-12);
        let t = SoftLabel::new(vec![0.95, 0.05]).unwrap();
        let expected = -(0.95 * 0.7f64.ln() + 0.05 * 0.3f64.ln());
        assert!((expected - 0.3990).abs() < 1e-4);
        assert!((soft_cross_entropy(&[0.7, 0.3], &t).unwrap() - expected).abs() < 1e-12);
        // zero probability is clamped, not infinite
        assert!(soft_cross_entropy(&[1.0, 0.0], &t).unwrap().is_finite());
        assert!(soft_cross_entropy(&[1.0], &t).is_err());
    }

    #[test]
    fn gradient_examples() {
        let t = SoftLabel::new(vec![0.5, 0.5]).unwrap();
        assert!(close(&soft_ce_gradient(&[0.0, 0.0], &t).unwrap(), &[0.0, 0.0], 1e-15));
        let logits = [0.3, -1.2, 2.0];
        let t = SoftLabel::new(softmax(&logits)).unwrap();
        assert!(soft_ce_gradient(&logits, &t).unwrap().iter().all(|g| g.abs() < 1e-12));
        assert!(soft_ce_gradient(&[1.0], &t).is_err());
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let logits = [1.0, 0.0];
        let t = SoftLabel::new(vec![0.95, 0.05]).unwrap();
        let g = soft_ce_gradient(&logits, &t).unwrap();
        let h = 1e-5;
        for k in 0..2 {
            let mut up = logits;
            let mut dn = logits;
            up[k] += h;
            dn[k] -= h;
            let fd = (soft_cross_entropy(&softmax(&up), &t).unwrap()
                - soft_cross_entropy(&softmax(&dn), &t).unwrap())
                / (2.0 * h);
            assert!(((g[k] - fd) / fd).abs() < 1e-4, "{k}: {} vs {fd}", g[k]);
        }
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.1, 0.7, 0.7]), 1);
    }

    proptest! {
        #[test]
        fn smoothing_is_valid_and_preserves_argmax(n in 2usize..12, y in 0usize..12, eps in 0.0f64..0.999) {
            let y = y % n;
            let l = smooth_label(ClassIndex(y), n, eps).unwrap();
            prop_assert!(SoftLabel::new(l.probs().to_vec()).is_ok());
            prop_assert_eq!(l.argmax(), ClassIndex(y));
        }

        #[test]
        fn gradient_sums_to_zero(logits in prop::collection::vec(-20.0f64..20.0, 2..8), y in 0usize..8, eps in 0.0f64..0.9) {
            let n = logits.len();
            let t = smooth_label(ClassIndex(y % n), n, eps).unwrap();
            let g = soft_ce_gradient(&logits, &t).unwrap();
            prop_assert!(g.iter().sum::<f64>().abs() < 1e-9);
        }
    }
}
