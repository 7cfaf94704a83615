//! EDA suboperations (SR, RI, RS, RD), the EDA dispatcher and AEDA.
//!
//! Every operation is a pure function of its inputs and the caller's random
//! stream. The number of operations applied by SR, RI and RS is
//! `n = max(1, round(alpha * L))` with round-half-up; RD deletes each token
//! independently with probability `alpha`.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textops::{is_stopword, SynonymLexicon, TokenSeq};

/// The six punctuation marks AEDA inserts.
pub const AEDA_PUNCTUATION: [&str; 6] = [".", ";", "?", ":", "!", ","];

/// One of the four EDA suboperations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubOpKind {
    #[serde(rename = "SR")]
    SynonymReplacement,
    #[serde(rename = "RI")]
    RandomInsertion,
    #[serde(rename = "RS")]
    RandomSwap,
    #[serde(rename = "RD")]
    RandomDeletion,
}

impl SubOpKind {
    pub const ALL: [SubOpKind; 4] = [
        SubOpKind::SynonymReplacement,
        SubOpKind::RandomInsertion,
        SubOpKind::RandomSwap,
        SubOpKind::RandomDeletion,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Magnitudes and selection distribution for [`eda`].
///
/// `p_eda` is ordered SR, RI, RS, RD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdaParams {
    pub alpha_sr: f64,
    pub alpha_ri: f64,
    pub alpha_rs: f64,
    pub alpha_rd: f64,
    pub p_eda: [f64; 4],
}

impl EdaParams {
    /// Equal selection probabilities and one magnitude for all suboperations.
    pub fn uniform(alpha: f64) -> Self {
        EdaParams {
            alpha_sr: alpha,
            alpha_ri: alpha,
            alpha_rs: alpha,
            alpha_rd: alpha,
            p_eda: [0.25; 4],
        }
    }

    pub fn alpha(&self, kind: SubOpKind) -> f64 {
        match kind {
            SubOpKind::SynonymReplacement => self.alpha_sr,
            SubOpKind::RandomInsertion => self.alpha_ri,
            SubOpKind::RandomSwap => self.alpha_rs,
            SubOpKind::RandomDeletion => self.alpha_rd,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for kind in SubOpKind::ALL {
            check_alpha(self.alpha(kind))?;
        }
        if self.p_eda.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::domain("p_eda components must be non-negative"));
        }
        let sum: f64 = self.p_eda.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("p_eda sums to {sum}, expected 1")));
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("magnitude {alpha} outside [0, 1]")));
    }
    Ok(())
}

fn check_input(seq: &TokenSeq) -> Result<()> {
    if seq.is_empty() {
        return Err(Error::domain("empty sentence"));
    }
    Ok(())
}

/// `max(1, round_half_up(alpha * len))`.
pub fn op_count(alpha: f64, len: usize) -> usize {
    ((alpha * len as f64 + 0.5).floor() as usize).max(1)
}

fn eligible(word: &str, lex: &SynonymLexicon) -> bool {
    !is_stopword(word) && !lex.synonyms(word).is_empty()
}

/// Replaces `n` distinct non-stopword positions that have synonyms.
pub fn synonym_replacement<R: Rng + ?Sized>(
    seq: &TokenSeq,
    alpha: f64,
    lex: &SynonymLexicon,
    rng: &mut R,
) -> Result<TokenSeq> {
    check_input(seq)?;
    check_alpha(alpha)?;
    let n = op_count(alpha, seq.len());
    let positions: Vec<usize> = (0..seq.len())
        .filter(|&i| eligible(&seq[i], lex))
        .collect();
    let mut out = seq.clone().into_inner();
    if positions.is_empty() {
        return Ok(TokenSeq::from_vec_unchecked(out));
    }
    let picks = index::sample(rng, positions.len(), n.min(positions.len()));
    for p in picks.iter() {
        let pos = positions[p];
        let syns = lex.synonyms(&seq[pos]);
        out[pos] = syns[rng.random_range(0..syns.len())].clone();
    }
    Ok(TokenSeq::from_vec_unchecked(out))
}

/// Inserts up to `n` synonyms of randomly chosen words at random positions.
///
/// Each insertion picks its source word from the current (already extended)
/// sentence; an insertion is skipped when no eligible source exists.
pub fn random_insertion<R: Rng + ?Sized>(
    seq: &TokenSeq,
    alpha: f64,
    lex: &SynonymLexicon,
    rng: &mut R,
) -> Result<TokenSeq> {
    check_input(seq)?;
    check_alpha(alpha)?;
    let n = op_count(alpha, seq.len());
    let mut out = seq.clone().into_inner();
    for _ in 0..n {
        let sources: Vec<usize> = (0..out.len()).filter(|&i| eligible(&out[i], lex)).collect();
        if sources.is_empty() {
            continue;
        }
        let src = sources[rng.random_range(0..sources.len())];
        let syns = lex.synonyms(&out[src]);
        let word = syns[rng.random_range(0..syns.len())].clone();
        let at = rng.random_range(0..=out.len());
        out.insert(at, word);
    }
    Ok(TokenSeq::from_vec_unchecked(out))
}

/// Swaps two distinct uniformly chosen positions, `n` times.
pub fn random_swap<R: Rng + ?Sized>(seq: &TokenSeq, alpha: f64, rng: &mut R) -> Result<TokenSeq> {
    check_input(seq)?;
    check_alpha(alpha)?;
    let mut out = seq.clone().into_inner();
    let len = out.len();
    if len < 2 {
        return Ok(TokenSeq::from_vec_unchecked(out));
    }
    for _ in 0..op_count(alpha, len) {
        let i = rng.random_range(0..len);
        let mut j = rng.random_range(0..len - 1);
        if j >= i {
            j += 1;
        }
        out.swap(i, j);
    }
    Ok(TokenSeq::from_vec_unchecked(out))
}

/// Deletes each token with probability `alpha`; keeps one random token if all would go.
pub fn random_deletion<R: Rng + ?Sized>(seq: &TokenSeq, alpha: f64, rng: &mut R) -> Result<TokenSeq> {
    check_input(seq)?;
    check_alpha(alpha)?;
    let kept: Vec<String> = seq
        .iter()
        .filter(|_| !rng.random_bool(alpha))
        .cloned()
        .collect();
    if kept.is_empty() {
        let keep = rng.random_range(0..seq.len());
        return Ok(TokenSeq::from_vec_unchecked(vec![seq[keep].clone()]));
    }
    Ok(TokenSeq::from_vec_unchecked(kept))
}

/// Samples a suboperation from `p`.
///
/// A degenerate (one-hot) distribution consumes no randomness, so `eda` with a
/// one-hot `p_eda` leaves the stream exactly where the suboperation expects it.
pub fn sample_subop<R: Rng + ?Sized>(p: &[f64; 4], rng: &mut R) -> SubOpKind {
    let positive: Vec<usize> = (0..4).filter(|&i| p[i] > 0.0).collect();
    if positive.len() == 1 {
        return SubOpKind::ALL[positive[0]];
    }
    let total: f64 = p.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in p.iter().enumerate() {
        acc += w;
        if u < acc {
            return SubOpKind::ALL[i];
        }
    }
    // float round-off at the top of the range
    SubOpKind::ALL[*positive.last().unwrap_or(&3)]
}

/// Applies one suboperation chosen from `params.p_eda`.
pub fn eda<R: Rng + ?Sized>(
    seq: &TokenSeq,
    params: &EdaParams,
    lex: &SynonymLexicon,
    rng: &mut R,
) -> Result<TokenSeq> {
    check_input(seq)?;
    params.validate()?;
    let kind = sample_subop(&params.p_eda, rng);
    apply_subop(kind, seq, params.alpha(kind), lex, rng)
}

pub fn apply_subop<R: Rng + ?Sized>(
    kind: SubOpKind,
    seq: &TokenSeq,
    alpha: f64,
    lex: &SynonymLexicon,
    rng: &mut R,
) -> Result<TokenSeq> {
    match kind {
        SubOpKind::SynonymReplacement => synonym_replacement(seq, alpha, lex, rng),
        SubOpKind::RandomInsertion => random_insertion(seq, alpha, lex, rng),
        SubOpKind::RandomSwap => random_swap(seq, alpha, rng),
        SubOpKind::RandomDeletion => random_deletion(seq, alpha, rng),
    }
}

/// AEDA: inserts `k ~ U[1, max(1, floor(L/3))]` punctuation marks.
pub fn aeda<R: Rng + ?Sized>(seq: &TokenSeq, rng: &mut R) -> Result<TokenSeq> {
    let (out, _) = aeda_with_positions(seq, rng)?;
    Ok(out)
}

/// Like [`aeda`], also returning the output indices of the inserted marks (ascending).
pub fn aeda_with_positions<R: Rng + ?Sized>(
    seq: &TokenSeq,
    rng: &mut R,
) -> Result<(TokenSeq, Vec<usize>)> {
    check_input(seq)?;
    let max_k = (seq.len() / 3).max(1);
    let k = rng.random_range(1..=max_k);
    let mut out: Vec<(bool, String)> = seq.iter().map(|t| (false, t.clone())).collect();
    for _ in 0..k {
        let mark = AEDA_PUNCTUATION[rng.random_range(0..AEDA_PUNCTUATION.len())];
        let at = rng.random_range(0..=out.len());
        out.insert(at, (true, mark.to_owned()));
    }
    let inserted = out
        .iter()
        .enumerate()
        .filter_map(|(i, (ins, _))| ins.then_some(i))
        .collect();
    let tokens = out.into_iter().map(|(_, t)| t).collect();
    Ok((TokenSeq::from_vec_unchecked(tokens), inserted))
}
