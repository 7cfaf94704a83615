//! The 12-scalar augmentation policy, its search space, and its application
//! to a training split.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::augment::{eda, EdaParams};
use crate::error::{Error, Result};
use crate::harness::dataset::LabeledText;
use crate::labels::{smooth_label, SoftLabel};
use crate::rng::{derive_seed, stream};
use crate::textops::{detokenize, tokenize, SynonymLexicon};

/// Upper bound on each suboperation magnitude.
pub const ALPHA_MAX: f64 = 0.5;
/// Upper bound on the original-data smoothing factor.
pub const EPS_ORI_MAX: f64 = 0.5;
/// Upper bound on the augmented-data smoothing factor.
pub const EPS_AUG_MAX: f64 = 0.9;

/// Augmentation probability, suboperation mix and magnitudes, copies per
/// example, and the two label-smoothing factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentationPolicy {
    pub p_aug: f64,
    pub p_sr: f64,
    pub p_ri: f64,
    pub p_rs: f64,
    pub p_rd: f64,
    pub alpha_sr: f64,
    pub alpha_ri: f64,
    pub alpha_rs: f64,
    pub alpha_rd: f64,
    pub n_aug: u32,
    pub eps_ori: f64,
    pub eps_aug: f64,
}

impl AugmentationPolicy {
    /// Plain training: no augmentation, hard labels.
    pub fn no_augmentation() -> Self {
        AugmentationPolicy {
            p_aug: 0.0,
            p_sr: 0.25,
            p_ri: 0.25,
            p_rs: 0.25,
            p_rd: 0.25,
            alpha_sr: 0.1,
            alpha_ri: 0.1,
            alpha_rs: 0.1,
            alpha_rd: 0.1,
            n_aug: 1,
            eps_ori: 0.0,
            eps_aug: 0.0,
        }
    }

    /// Every example augmented `n_aug` times with uniform EDA at magnitude `alpha`.
    pub fn fixed_eda(alpha: f64, n_aug: u32, eps_aug: f64) -> Self {
        AugmentationPolicy {
            p_aug: 1.0,
            alpha_sr: alpha,
            alpha_ri: alpha,
            alpha_rs: alpha,
            alpha_rd: alpha,
            n_aug,
            eps_aug,
            ..Self::no_augmentation()
        }
    }

    pub fn eda_params(&self) -> EdaParams {
        EdaParams {
            alpha_sr: self.alpha_sr,
            alpha_ri: self.alpha_ri,
            alpha_rs: self.alpha_rs,
            alpha_rd: self.alpha_rd,
            p_eda: [self.p_sr, self.p_ri, self.p_rs, self.p_rd],
        }
    }
}

/// One violated policy constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Returns every violated invariant; an empty list means the policy is valid.
pub fn validate_policy(p: &AugmentationPolicy) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut range = |field: &'static str, v: f64, lo: f64, hi: f64| {
        if !(v.is_finite() && lo <= v && v <= hi) {
            out.push(Violation {
                field,
                message: format!("{v} outside [{lo}, {hi}]"),
            });
        }
    };
    range("p_aug", p.p_aug, 0.0, 1.0);
    range("p_sr", p.p_sr, 0.0, 1.0);
    range("p_ri", p.p_ri, 0.0, 1.0);
    range("p_rs", p.p_rs, 0.0, 1.0);
    range("p_rd", p.p_rd, 0.0, 1.0);
    range("alpha_sr", p.alpha_sr, 0.0, ALPHA_MAX);
    range("alpha_ri", p.alpha_ri, 0.0, ALPHA_MAX);
    range("alpha_rs", p.alpha_rs, 0.0, ALPHA_MAX);
    range("alpha_rd", p.alpha_rd, 0.0, ALPHA_MAX);
    range("eps_ori", p.eps_ori, 0.0, EPS_ORI_MAX);
    range("eps_aug", p.eps_aug, 0.0, EPS_AUG_MAX);
    let sum = p.p_sr + p.p_ri + p.p_rs + p.p_rd;
    // NaN sums fail too
    if (sum - 1.0).abs().is_nan() || (sum - 1.0).abs() > 1e-9 {
        out.push(Violation {
            field: "p_sr+p_ri+p_rs+p_rd",
            message: format!("simplex sum = {sum}, expected 1"),
        });
    }
    if p.n_aug < 1 {
        out.push(Violation {
            field: "n_aug",
            message: "n_aug must be >= 1".into(),
        });
    }
    out
}

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Bounds { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.lo + rng.random::<f64>() * self.width()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Search ranges for every policy dimension.
///
/// The four suboperation probabilities are searched as unnormalized weights in
/// `weight` and normalized to the simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolicySpace {
    pub p_aug: Bounds,
    pub weight: Bounds,
    pub alpha_sr: Bounds,
    pub alpha_ri: Bounds,
    pub alpha_rs: Bounds,
    pub alpha_rd: Bounds,
    pub n_aug: Vec<u32>,
    pub eps_ori: Bounds,
    pub eps_aug: Bounds,
}

impl Default for PolicySpace {
    fn default() -> Self {
        let alpha = Bounds::new(0.01, 0.3);
        PolicySpace {
            p_aug: Bounds::new(0.1, 1.0),
            weight: Bounds::new(0.01, 1.0),
            alpha_sr: alpha,
            alpha_ri: alpha,
            alpha_rs: alpha,
            alpha_rd: alpha,
            n_aug: vec![1, 2, 4, 8],
            eps_ori: Bounds::new(0.0, 0.3),
            eps_aug: Bounds::new(0.0, 0.75),
        }
    }
}

impl PolicySpace {
    /// Continuous dimensions in a fixed order, with their legal outer range.
    pub fn continuous(&self) -> [(&'static str, Bounds, Bounds); 11] {
        let unit = Bounds::new(0.0, 1.0);
        let alpha = Bounds::new(0.0, ALPHA_MAX);
        [
            ("p_aug", self.p_aug, unit),
            ("w_sr", self.weight, Bounds::new(1e-9, 1.0)),
            ("w_ri", self.weight, Bounds::new(1e-9, 1.0)),
            ("w_rs", self.weight, Bounds::new(1e-9, 1.0)),
            ("w_rd", self.weight, Bounds::new(1e-9, 1.0)),
            ("alpha_sr", self.alpha_sr, alpha),
            ("alpha_ri", self.alpha_ri, alpha),
            ("alpha_rs", self.alpha_rs, alpha),
            ("alpha_rd", self.alpha_rd, alpha),
            ("eps_ori", self.eps_ori, Bounds::new(0.0, EPS_ORI_MAX)),
            ("eps_aug", self.eps_aug, Bounds::new(0.0, EPS_AUG_MAX)),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, b, legal) in self.continuous() {
            if !(b.lo.is_finite() && b.hi.is_finite() && b.lo < b.hi) {
                return Err(Error::domain(format!("dimension {name}: degenerate bounds [{}, {}]", b.lo, b.hi)));
            }
            if b.lo < legal.lo || b.hi > legal.hi {
                return Err(Error::domain(format!(
                    "dimension {name}: bounds [{}, {}] exceed legal range [{}, {}]",
                    b.lo, b.hi, legal.lo, legal.hi
                )));
            }
        }
        if self.n_aug.is_empty() {
            return Err(Error::domain("dimension n_aug: empty categorical set"));
        }
        if self.n_aug.contains(&0) {
            return Err(Error::domain("dimension n_aug: choices must be >= 1"));
        }
        Ok(())
    }
}

/// Draws a policy from the prior over `space`.
///
/// Draw order: p_aug, four simplex weights, four magnitudes, n_aug, eps_ori, eps_aug.
pub fn sample_policy<R: Rng + ?Sized>(space: &PolicySpace, rng: &mut R) -> AugmentationPolicy {
    let p_aug = space.p_aug.sample(rng);
    let w: [f64; 4] = std::array::from_fn(|_| space.weight.sample(rng));
    let [p_sr, p_ri, p_rs, p_rd] = normalize_weights(w);
    let alpha_sr = space.alpha_sr.sample(rng);
    let alpha_ri = space.alpha_ri.sample(rng);
    let alpha_rs = space.alpha_rs.sample(rng);
    let alpha_rd = space.alpha_rd.sample(rng);
    let n_aug = space.n_aug[rng.random_range(0..space.n_aug.len())];
    let eps_ori = space.eps_ori.sample(rng);
    let eps_aug = space.eps_aug.sample(rng);
    AugmentationPolicy {
        p_aug,
        p_sr,
        p_ri,
        p_rs,
        p_rd,
        alpha_sr,
        alpha_ri,
        alpha_rs,
        alpha_rd,
        n_aug,
        eps_ori,
        eps_aug,
    }
}

/// Scales positive weights onto the probability simplex.
pub fn normalize_weights(w: [f64; 4]) -> [f64; 4] {
    let sum: f64 = w.iter().sum();
    let mut p = w.map(|x| x / sum);
    // absorb round-off so the sum is 1 to machine precision
    let rest: f64 = p[..3].iter().sum();
    p[3] = (1.0 - rest).max(0.0);
    p
}

/// Where a training example came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "original")]
    Original,
    #[serde(rename = "eda-augmented")]
    EdaAugmented,
    #[serde(rename = "aeda-augmented")]
    AedaAugmented,
}

/// One (possibly augmented) training example with its soft target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedExample {
    pub text: String,
    pub soft_label: SoftLabel,
    pub provenance: Provenance,
    pub source_index: usize,
}

/// An example whose augmentation was skipped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AugmentWarning {
    pub source_index: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct AugmentOutput {
    pub examples: Vec<AugmentedExample>,
    pub warnings: Vec<AugmentWarning>,
}

/// Emits every original once (smoothed with `eps_ori`), then, for each
/// original selected with probability `p_aug`, `n_aug` EDA copies smoothed
/// with `eps_aug`, grouped by source index.
///
/// Each original draws from its own stream derived from one base draw on
/// `rng`, so shards of the input can be processed independently.
pub fn apply_policy<R: Rng + ?Sized>(
    data: &[LabeledText],
    n_class: usize,
    policy: &AugmentationPolicy,
    lex: &SynonymLexicon,
    rng: &mut R,
) -> Result<AugmentOutput> {
    if data.is_empty() {
        return Err(Error::domain("cannot augment an empty dataset"));
    }
    let violations = validate_policy(policy);
    if !violations.is_empty() {
        let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::domain(format!("invalid policy: {}", msg.join("; "))));
    }
    let params = policy.eda_params();
    let base = rng.random::<u64>();
    let mut out = AugmentOutput::default();
    let mut augmented = Vec::new();
    for (i, ex) in data.iter().enumerate() {
        out.examples.push(AugmentedExample {
            text: ex.text.clone(),
            soft_label: smooth_label(ex.label, n_class, policy.eps_ori)?,
            provenance: Provenance::Original,
            source_index: i,
        });
        let mut ex_rng = stream(derive_seed(base, i as u64));
        if !ex_rng.random_bool(policy.p_aug) {
            continue;
        }
        let seq = tokenize(&ex.text);
        if seq.is_empty() {
            out.warnings.push(AugmentWarning {
                source_index: i,
                message: "text is empty after tokenization; augmentation skipped".into(),
            });
            continue;
        }
        let label = smooth_label(ex.label, n_class, policy.eps_aug)?;
        for _ in 0..policy.n_aug {
            let x = eda(&seq, &params, lex, &mut ex_rng)?;
            augmented.push(AugmentedExample {
                text: detokenize(&x),
                soft_label: label.clone(),
                provenance: Provenance::EdaAugmented,
                source_index: i,
            });
        }
    }
    out.examples.extend(augmented);
    Ok(out)
}
