//! Stratified low-resource subsampling and validation holdout.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::harness::dataset::{LabeledDataset, LabeledText};
use crate::rng::{derive_seed, stream, tags};

/// Per-class counts over `n_class` classes.
pub fn class_counts(rows: &[LabeledText], n_class: usize) -> Vec<usize> {
    let mut counts = vec![0; n_class];
    for r in rows {
        counts[r.label.0] += 1;
    }
    counts
}

/// Splits `n` into per-class quotas proportional to `counts`.
///
/// Largest-remainder rounding with ties to the lower class index; afterwards
/// every class with at least one example gets at least one slot when `n`
/// allows it, taken from the class holding the largest quota.
pub fn proportional_quotas(counts: &[usize], n: usize) -> Vec<usize> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return vec![0; counts.len()];
    }
    let mut quotas: Vec<usize> = counts.iter().map(|&c| c * n / total).collect();
    let assigned: usize = quotas.iter().sum();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    // remainder of c*n/total, compared exactly as integers
    order.sort_by(|&a, &b| ((counts[b] * n) % total).cmp(&((counts[a] * n) % total)).then(a.cmp(&b)));
    for &c in order.iter().take(n - assigned) {
        quotas[c] += 1;
    }
    let present = counts.iter().filter(|&&c| c > 0).count();
    if n >= present {
        for c in 0..counts.len() {
            if counts[c] > 0 && quotas[c] == 0 {
                let donor = (0..counts.len())
                    .filter(|&d| quotas[d] > 1)
                    .max_by(|&a, &b| quotas[a].cmp(&quotas[b]).then(b.cmp(&a)));
                if let Some(d) = donor {
                    quotas[d] -= 1;
                    quotas[c] += 1;
                }
            }
        }
    }
    quotas
}

fn pick_by_quota(rows: &[LabeledText], n_class: usize, quotas: &[usize], seed: u64) -> Vec<bool> {
    let mut rng = stream(seed);
    let mut chosen = vec![false; rows.len()];
    for (c, &quota) in quotas.iter().enumerate().take(n_class) {
        let mut idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].label.0 == c).collect();
        idx.shuffle(&mut rng);
        for &i in idx.iter().take(quota) {
            chosen[i] = true;
        }
    }
    chosen
}

/// Draws `n` training examples without replacement, stratified by class.
/// Val/test splits pass through unchanged; selected rows keep file order.
pub fn subsample(data: &LabeledDataset, n: usize, seed: u64) -> Result<LabeledDataset> {
    if n < data.n_class {
        return Err(Error::domain(format!(
            "cannot stratify: n = {n} is smaller than the number of classes ({})",
            data.n_class
        )));
    }
    if n > data.train.len() {
        return Err(Error::domain(format!(
            "cannot draw {n} examples from a train split of {}",
            data.train.len()
        )));
    }
    let counts = class_counts(&data.train, data.n_class);
    let quotas = proportional_quotas(&counts, n);
    let chosen = pick_by_quota(&data.train, data.n_class, &quotas, derive_seed(seed, tags::SUBSAMPLE));
    let train = data
        .train
        .iter()
        .zip(&chosen)
        .filter(|(_, &c)| c)
        .map(|(r, _)| r.clone())
        .collect();
    Ok(LabeledDataset {
        train,
        ..data.clone()
    })
}

/// Stratified holdout of `round(fraction * N)` rows. Every class keeps at
/// least one row on each side.
pub fn make_val_split(
    train: &[LabeledText],
    n_class: usize,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<LabeledText>, Vec<LabeledText>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::domain(format!("validation fraction {fraction} outside (0, 1)")));
    }
    let counts = class_counts(train, n_class);
    let present = counts.iter().filter(|&&c| c > 0).count();
    let n_val = (fraction * train.len() as f64 + 0.5).floor() as usize;
    if n_val < present {
        return Err(Error::domain(format!(
            "cannot stratify: {n_val} validation rows for {present} classes"
        )));
    }
    if let Some(c) = counts.iter().position(|&c| c == 1) {
        return Err(Error::domain(format!(
            "cannot stratify: class {c} has a single example"
        )));
    }
    if n_val > train.len() - present {
        return Err(Error::domain("cannot stratify: validation split would empty a class"));
    }
    let mut quotas = proportional_quotas(&counts, n_val);
    // leave at least one row of every class in train
    while let Some(c) = (0..n_class).find(|&c| counts[c] > 0 && quotas[c] >= counts[c]) {
        quotas[c] -= 1;
        let receiver = (0..n_class)
            .filter(|&d| counts[d] > quotas[d] + 1)
            .max_by(|&a, &b| (counts[a] - quotas[a]).cmp(&(counts[b] - quotas[b])).then(b.cmp(&a)))
            .expect("room exists since n_val <= N - present");
        quotas[receiver] += 1;
    }
    let chosen = pick_by_quota(train, n_class, &quotas, derive_seed(seed, tags::VAL_SPLIT));
    let (mut rest, mut val) = (Vec::new(), Vec::new());
    for (r, c) in train.iter().zip(chosen) {
        if c {
            val.push(r.clone());
        } else {
            rest.push(r.clone());
        }
    }
    Ok((rest, val))
}
