//! Sequential model-based policy search with a tree-structured Parzen
//! estimator (TPE).
//!
//! After `n_startup` prior draws, each suggestion splits the history into the
//! top `ceil(gamma * n)` trials (good) and the rest (bad), fits independent
//! per-dimension densities `l` (good) and `g` (bad), samples `n_candidates`
//! points from `l` and keeps the one maximizing `prod l(x) / g(x)`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::classifier::{train, TrainConfig};
use crate::error::{Error, Result};
use crate::harness::dataset::LabeledText;
use crate::policy::{apply_policy, normalize_weights, sample_policy, AugmentationPolicy, Bounds, PolicySpace};
use crate::rng::{derive_seed, stream, tags};
use crate::textops::SynonymLexicon;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub n_trials: usize,
    pub n_startup: usize,
    pub gamma: f64,
    pub n_candidates: usize,
    pub runs_per_trial: usize,
    pub seed: u64,
    /// Pins `eps_ori = eps_aug = 0`, i.e. searches only the EDA factors.
    pub fix_smoothing_to_zero: bool,
    /// Classifier settings used inside the objective.
    pub train: TrainConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            n_trials: 20,
            n_startup: 5,
            gamma: 0.25,
            n_candidates: 24,
            runs_per_trial: 3,
            seed: 0,
            fix_smoothing_to_zero: false,
            train: TrainConfig::default(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 || self.n_startup == 0 || self.n_candidates == 0 {
            return Err(Error::domain("n_trials, n_startup and n_candidates must be positive"));
        }
        // a budget of one trial is all startup
        if self.n_startup >= self.n_trials && self.n_trials > 1 {
            return Err(Error::domain("n_startup must be smaller than n_trials"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::domain("gamma must lie in (0, 1)"));
        }
        if self.runs_per_trial == 0 {
            return Err(Error::domain("runs_per_trial must be >= 1"));
        }
        self.train.validate()
    }
}

/// One completed trial of the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub seed: u64,
    pub policy: AugmentationPolicy,
    pub run_scores: Vec<f64>,
    /// Mean of `run_scores`.
    pub score: f64,
}

impl TrialRecord {
    pub fn new(trial_index: usize, seed: u64, policy: AugmentationPolicy, run_scores: Vec<f64>) -> Result<Self> {
        if run_scores.is_empty() {
            return Err(Error::domain("a trial needs at least one run score"));
        }
        let score = mean(&run_scores);
        Ok(TrialRecord {
            trial_index,
            seed,
            policy,
            run_scores,
            score,
        })
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Number of continuous coordinates in the TPE encoding.
const N_CONT: usize = 11;
const EPS_ORI_DIM: usize = 9;
const EPS_AUG_DIM: usize = 10;

/// A policy in TPE coordinates: 11 continuous values plus the n_aug choice index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    cont: [f64; N_CONT],
    cat: usize,
}

/// Maps a policy into search coordinates. Simplex weights are represented as
/// `p / max(p)`, the scale-free representative of the normalized mix.
fn encode(p: &AugmentationPolicy, space: &PolicySpace) -> Point {
    let probs = [p.p_sr, p.p_ri, p.p_rs, p.p_rd];
    let max = probs.iter().copied().fold(0.0, f64::max);
    let w = probs.map(|x| if max > 0.0 { x / max } else { 1.0 });
    let raw = [
        p.p_aug, w[0], w[1], w[2], w[3], p.alpha_sr, p.alpha_ri, p.alpha_rs, p.alpha_rd, p.eps_ori, p.eps_aug,
    ];
    let dims = space.continuous();
    let cont = std::array::from_fn(|i| raw[i].clamp(dims[i].1.lo, dims[i].1.hi));
    let cat = space
        .n_aug
        .iter()
        .enumerate()
        .min_by_key(|(_, &v)| (i64::from(v) - i64::from(p.n_aug)).unsigned_abs())
        .map(|(i, _)| i)
        .unwrap_or(0);
    Point { cont, cat }
}

fn decode(pt: &Point, space: &PolicySpace) -> AugmentationPolicy {
    let c = &pt.cont;
    let [p_sr, p_ri, p_rs, p_rd] = normalize_weights([c[1], c[2], c[3], c[4]]);
    AugmentationPolicy {
        p_aug: c[0],
        p_sr,
        p_ri,
        p_rs,
        p_rd,
        alpha_sr: c[5],
        alpha_ri: c[6],
        alpha_rs: c[7],
        alpha_rd: c[8],
        n_aug: space.n_aug[pt.cat],
        eps_ori: c[EPS_ORI_DIM],
        eps_aug: c[EPS_AUG_DIM],
    }
}

/// Equal-weight mixture of Gaussians truncated to `bounds` plus one uniform
/// prior component over `bounds`; uniform when fitted on nothing.
#[derive(Debug, Clone)]
pub struct ParzenEstimator {
    centers: Vec<f64>,
    bandwidth: f64,
    bounds: Bounds,
    /// Per-component truncation mass, `Phi((hi-mu)/h) - Phi((lo-mu)/h)`.
    mass: Vec<f64>,
}

impl ParzenEstimator {
    /// Bandwidth is Silverman's rule `1.06 * sd * n^(-1/5)`, floored at
    /// `range / min(100, n + 1)`: wide while few points exist, 1% of the
    /// range from 99 points on.
    pub fn fit(obs: &[f64], bounds: Bounds) -> Self {
        let floor = bounds.width() / (obs.len() as f64 + 1.0).min(100.0);
        let bandwidth = if obs.len() >= 2 {
            let m = mean(obs);
            let var = obs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (obs.len() - 1) as f64;
            (1.06 * var.sqrt() * (obs.len() as f64).powf(-0.2)).max(floor)
        } else {
            floor
        };
        let mass = obs
            .iter()
            .map(|mu| {
                (std_normal_cdf((bounds.hi - mu) / bandwidth) - std_normal_cdf((bounds.lo - mu) / bandwidth))
                    .max(1e-300)
            })
            .collect();
        ParzenEstimator {
            centers: obs.to_vec(),
            bandwidth,
            bounds,
            mass,
        }
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        let prior = -self.bounds.width().ln();
        if self.centers.is_empty() {
            return prior;
        }
        let h = self.bandwidth;
        let mut terms: Vec<f64> = self
            .centers
            .iter()
            .zip(&self.mass)
            .map(|(mu, z)| {
                let u = (x - mu) / h;
                -0.5 * u * u - (h * z * (2.0 * std::f64::consts::PI).sqrt()).ln()
            })
            .collect();
        terms.push(prior);
        log_sum_exp(&terms) - (terms.len() as f64).ln()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let b = self.bounds;
        let i = rng.random_range(0..=self.centers.len());
        if i == self.centers.len() {
            return b.lo + rng.random::<f64>() * b.width();
        }
        let mu = self.centers[i];
        let normal = Normal::new(mu, self.bandwidth).expect("positive bandwidth");
        for _ in 0..64 {
            let x = normal.sample(rng);
            if b.contains(x) {
                return x;
            }
        }
        mu.clamp(b.lo, b.hi)
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Add-one smoothed frequencies over `k` categories.
#[derive(Debug, Clone)]
pub struct CategoricalEstimator {
    probs: Vec<f64>,
}

impl CategoricalEstimator {
    pub fn fit(obs: &[usize], k: usize) -> Self {
        let mut counts = vec![1.0; k];
        for &o in obs {
            counts[o] += 1.0;
        }
        let total = (obs.len() + k) as f64;
        CategoricalEstimator {
            probs: counts.into_iter().map(|c| c / total).collect(),
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_pmf(&self, i: usize) -> f64 {
        self.probs[i].ln()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>();
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.probs.len() - 1
    }
}

fn clamp_smoothing(mut p: AugmentationPolicy, cfg: &SearchConfig) -> AugmentationPolicy {
    if cfg.fix_smoothing_to_zero {
        p.eps_ori = 0.0;
        p.eps_aug = 0.0;
    }
    p
}

/// Proposes the next policy to evaluate.
pub fn suggest<R: Rng + ?Sized>(
    history: &[TrialRecord],
    space: &PolicySpace,
    cfg: &SearchConfig,
    rng: &mut R,
) -> Result<AugmentationPolicy> {
    space.validate()?;
    if history.len() < cfg.n_startup {
        return Ok(clamp_smoothing(sample_policy(space, rng), cfg));
    }

    let mut ranked: Vec<&TrialRecord> = history.iter().collect();
    ranked.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.trial_index.cmp(&b.trial_index))
    });
    let n_good = ((cfg.gamma * ranked.len() as f64).ceil() as usize).clamp(1, ranked.len());
    let good: Vec<Point> = ranked[..n_good].iter().map(|t| encode(&t.policy, space)).collect();
    let bad: Vec<Point> = ranked[n_good..].iter().map(|t| encode(&t.policy, space)).collect();

    let dims = space.continuous();
    let column = |pts: &[Point], d: usize| pts.iter().map(|p| p.cont[d]).collect::<Vec<_>>();
    let l_cont: Vec<ParzenEstimator> = (0..N_CONT)
        .map(|d| ParzenEstimator::fit(&column(&good, d), dims[d].1))
        .collect();
    let g_cont: Vec<ParzenEstimator> = (0..N_CONT)
        .map(|d| ParzenEstimator::fit(&column(&bad, d), dims[d].1))
        .collect();
    let k = space.n_aug.len();
    let l_cat = CategoricalEstimator::fit(&good.iter().map(|p| p.cat).collect::<Vec<_>>(), k);
    let g_cat = CategoricalEstimator::fit(&bad.iter().map(|p| p.cat).collect::<Vec<_>>(), k);

    let active = |d: usize| !(cfg.fix_smoothing_to_zero && (d == EPS_ORI_DIM || d == EPS_AUG_DIM));
    let mut best: Option<(f64, Point)> = None;
    for _ in 0..cfg.n_candidates {
        let cont: [f64; N_CONT] = std::array::from_fn(|d| l_cont[d].sample(rng));
        let cat = l_cat.sample(rng);
        let mut ratio = l_cat.log_pmf(cat) - g_cat.log_pmf(cat);
        for d in (0..N_CONT).filter(|&d| active(d)) {
            ratio += l_cont[d].log_pdf(cont[d]) - g_cont[d].log_pdf(cont[d]);
        }
        if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
            best = Some((ratio, Point { cont, cat }));
        }
    }
    let (_, pt) = best.expect("n_candidates >= 1");
    Ok(clamp_smoothing(decode(&pt, space), cfg))
}

/// Train/validation data for the objective.
#[derive(Debug, Clone, Copy)]
pub struct SearchData<'a> {
    pub train: &'a [LabeledText],
    pub val: &'a [LabeledText],
    pub n_class: usize,
}

/// Seeds for run `r` of a trial: `(augmentation, training)`.
pub fn run_seeds(trial_seed: u64, r: usize) -> (u64, u64) {
    let run = derive_seed(trial_seed, r as u64);
    (derive_seed(run, tags::AUGMENT), derive_seed(run, tags::TRAIN))
}

/// Mean best-validation accuracy of `runs_per_trial` trainings on
/// policy-augmented data. Returns `(run_scores, score)`.
pub fn objective(
    policy: &AugmentationPolicy,
    data: SearchData<'_>,
    lex: &SynonymLexicon,
    cfg: &SearchConfig,
    trial_seed: u64,
) -> Result<(Vec<f64>, f64)> {
    let mut scores = Vec::with_capacity(cfg.runs_per_trial);
    for r in 0..cfg.runs_per_trial {
        let (aug_seed, train_seed) = run_seeds(trial_seed, r);
        let augmented = apply_policy(data.train, data.n_class, policy, lex, &mut stream(aug_seed))?;
        let outcome = train(&augmented.examples, data.val, &cfg.train, &mut stream(train_seed))?;
        scores.push(outcome.best_val_accuracy);
    }
    let score = mean(&scores);
    Ok((scores, score))
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: TrialRecord,
    pub trials: Vec<TrialRecord>,
}

fn trial_seed(cfg: &SearchConfig, index: usize) -> u64 {
    derive_seed(derive_seed(cfg.seed, tags::TRIAL), index as u64)
}

fn best_of(trials: &[TrialRecord]) -> TrialRecord {
    let mut best = &trials[0];
    for t in &trials[1..] {
        if t.score > best.score {
            best = t;
        }
    }
    best.clone()
}

/// Runs `n_trials` rounds of suggest → evaluate with a caller-supplied
/// objective `eval(policy, trial_seed) -> run_scores`.
///
/// `on_trial` sees every completed trial before the next one starts, so a
/// failing trial leaves the completed prefix persisted.
pub fn optimize_with<F, S>(space: &PolicySpace, cfg: &SearchConfig, mut eval: F, mut on_trial: S) -> Result<SearchOutcome>
where
    F: FnMut(&AugmentationPolicy, u64) -> Result<Vec<f64>>,
    S: FnMut(&TrialRecord) -> Result<()>,
{
    cfg.validate()?;
    space.validate()?;
    let mut rng = stream(derive_seed(cfg.seed, tags::SUGGEST));
    let mut trials: Vec<TrialRecord> = Vec::with_capacity(cfg.n_trials);
    for index in 0..cfg.n_trials {
        let policy = suggest(&trials, space, cfg, &mut rng)?;
        let seed = trial_seed(cfg, index);
        let scores = eval(&policy, seed)?;
        let rec = TrialRecord::new(index, seed, policy, scores)?;
        on_trial(&rec)?;
        trials.push(rec);
    }
    Ok(SearchOutcome {
        best: best_of(&trials),
        trials,
    })
}

/// Pure prior sampling with the same bookkeeping as [`optimize_with`].
pub fn random_search_with<F>(space: &PolicySpace, cfg: &SearchConfig, mut eval: F) -> Result<SearchOutcome>
where
    F: FnMut(&AugmentationPolicy, u64) -> Result<Vec<f64>>,
{
    cfg.validate()?;
    space.validate()?;
    let mut rng = stream(derive_seed(cfg.seed, tags::SUGGEST));
    let mut trials = Vec::with_capacity(cfg.n_trials);
    for index in 0..cfg.n_trials {
        let policy = clamp_smoothing(sample_policy(space, &mut rng), cfg);
        let seed = trial_seed(cfg, index);
        trials.push(TrialRecord::new(index, seed, policy, eval(&policy, seed)?)?);
    }
    Ok(SearchOutcome {
        best: best_of(&trials),
        trials,
    })
}

/// TPE search of augmentation policies against validation accuracy.
pub fn optimize<S>(
    data: SearchData<'_>,
    space: &PolicySpace,
    lex: &SynonymLexicon,
    cfg: &SearchConfig,
    on_trial: S,
) -> Result<SearchOutcome>
where
    S: FnMut(&TrialRecord) -> Result<()>,
{
    optimize_with(
        space,
        cfg,
        |p, seed| objective(p, data, lex, cfg, seed).map(|(runs, _)| runs),
        on_trial,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::validate_policy;

    fn synthetic(p: &AugmentationPolicy) -> f64 {
        -(p.p_aug - 0.6).powi(2) - (p.eps_aug - 0.2).powi(2)
    }

    #[test]
    fn startup_branch_samples_prior() {
        let cfg = SearchConfig::default();
        let p = suggest(&[], &PolicySpace::default(), &cfg, &mut stream(0)).unwrap();
        assert!(validate_policy(&p).is_empty());
    }

    #[test]
    fn ablation_clamp() {
        let cfg = SearchConfig { fix_smoothing_to_zero: true, ..Default::default() };
        let space = PolicySpace::default();
        let out = optimize_with(&space, &cfg, |p, _| Ok(vec![synthetic(p) + p.eps_ori]), |_| Ok(())).unwrap();
        for t in &out.trials {
            assert_eq!((t.policy.eps_ori, t.policy.eps_aug), (0.0, 0.0));
        }
    }

    #[test]
    fn every_suggestion_is_valid() {
        let cfg = SearchConfig { n_trials: 40, ..Default::default() };
        let out = optimize_with(&PolicySpace::default(), &cfg, |p, _| Ok(vec![synthetic(p)]), |_| Ok(())).unwrap();
        assert_eq!(out.trials.len(), 40);
        for (i, t) in out.trials.iter().enumerate() {
            assert_eq!(t.trial_index, i);
            assert!(validate_policy(&t.policy).is_empty(), "{:?}", validate_policy(&t.policy));
        }
        let max = out.trials.iter().map(|t| t.score).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(out.best.score, max);
    }

    #[test]
    fn single_trial_budget() {
        let cfg = SearchConfig { n_trials: 1, n_startup: 1, ..Default::default() };
        let out = optimize_with(&PolicySpace::default(), &cfg, |p, _| Ok(vec![synthetic(p)]), |_| Ok(())).unwrap();
        assert_eq!(out.trials.len(), 1);
        assert_eq!(out.best, out.trials[0]);
    }

    #[test]
    fn reproducible_logs() {
        let cfg = SearchConfig { seed: 42, ..Default::default() };
        let run = || optimize_with(&PolicySpace::default(), &cfg, |p, _| Ok(vec![synthetic(p)]), |_| Ok(())).unwrap().trials;
        assert_eq!(run(), run());
    }

    #[test]
    fn failure_keeps_completed_prefix() {
        let cfg = SearchConfig::default();
        let mut seen = Vec::new();
        let mut n = 0;
        let res = optimize_with(
            &PolicySpace::default(),
            &cfg,
            |p, _| {
                n += 1;
                if n == 4 {
                    Err(Error::Training { epoch: 1, message: "boom".into() })
                } else {
                    Ok(vec![synthetic(p)])
                }
            },
            |t| {
                seen.push(t.trial_index);
                Ok(())
            },
        );
        assert!(res.is_err());
        assert_eq!(seen, [0, 1, 2]);
    }

    #[test]
    fn parzen_density_integrates_to_one() {
        let b = Bounds::new(0.0, 1.0);
        for obs in [vec![], vec![0.02], vec![0.1, 0.5, 0.95]] {
            let est = ParzenEstimator::fit(&obs, b);
            let n = 20_000;
            let integral: f64 = (0..n)
                .map(|i| est.log_pdf((i as f64 + 0.5) / n as f64).exp() / n as f64)
                .sum();
            assert!((integral - 1.0).abs() < 1e-3, "{obs:?}: {integral}");
        }
    }

    #[test]
    fn bandwidth_floor_and_rule() {
        let b = Bounds::new(0.0, 2.0);
        assert_eq!(ParzenEstimator::fit(&[1.0], b).bandwidth(), 1.0);
        assert_eq!(ParzenEstimator::fit(&[1.0, 1.0, 1.0], b).bandwidth(), 0.5);
        assert_eq!(ParzenEstimator::fit(&[1.0; 200], b).bandwidth(), 0.02);
        let obs = [0.0, 2.0];
        let expected = 1.06 * 2f64.sqrt() * 2f64.powf(-0.2);
        assert!((ParzenEstimator::fit(&obs, b).bandwidth() - expected).abs() < 1e-12);
    }

    #[test]
    fn categorical_add_one() {
        let c = CategoricalEstimator::fit(&[0, 0, 2], 4);
        assert_eq!(c.probs(), [3.0 / 7.0, 1.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]);
    }

    #[test]
    fn encode_decode_roundtrip() {
        let space = PolicySpace::default();
        let mut rng = stream(3);
        for _ in 0..100 {
            let p = sample_policy(&space, &mut rng);
            let q = decode(&encode(&p, &space), &space);
            for (a, b) in [(p.p_sr, q.p_sr), (p.p_ri, q.p_ri), (p.p_rs, q.p_rs), (p.p_rd, q.p_rd), (p.p_aug, q.p_aug)] {
                assert!((a - b).abs() < 1e-12);
            }
            assert_eq!(p.n_aug, q.n_aug);
        }
    }

    #[test]
    fn trial_record_score_is_mean() {
        let t = TrialRecord::new(0, 1, AugmentationPolicy::no_augmentation(), vec![0.5, 0.7, 0.9]).unwrap();
        assert!((t.score - 0.7).abs() < 1e-12);
        assert!(TrialRecord::new(0, 1, AugmentationPolicy::no_augmentation(), vec![]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        assert!(SearchConfig { n_startup: 20, ..Default::default() }.validate().is_err());
        assert!(SearchConfig { gamma: 1.0, ..Default::default() }.validate().is_err());
        assert!(SearchConfig { runs_per_trial: 0, ..Default::default() }.validate().is_err());
    }
}
