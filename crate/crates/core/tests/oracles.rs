//! Monte-Carlo and brute-force oracles for the derived reference values.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use autoaug::augment::{aeda_with_positions, random_insertion, random_swap, synonym_replacement, AEDA_PUNCTUATION};
use autoaug::classifier::{evaluate, LinearModel, N_BUCKETS};
use autoaug::harness::dataset::LabeledText;
use autoaug::harness::surrogate::generate;
use autoaug::labels::{soft_cross_entropy, ClassIndex, SoftLabel};
use autoaug::policy::{sample_policy, validate_policy, AugmentationPolicy, PolicySpace};
use autoaug::rng::stream;
use autoaug::search::{objective, suggest, SearchConfig, SearchData, TrialRecord};
use autoaug::textops::{SynonymLexicon, TokenSeq};

fn rich_lexicon(n: usize) -> SynonymLexicon {
    let src: String = (0..n).map(|i| format!("w{i}\ts{i}a,s{i}b,s{i}c\n")).collect();
    SynonymLexicon::from_reader(src.as_bytes()).unwrap()
}

fn words(n: usize) -> TokenSeq {
    TokenSeq::from_words((0..n).map(|i| format!("w{i}")))
}

#[test]
fn sr_ten_tokens_alpha_point_three_changes_three_positions() {
    let lex = rich_lexicon(10);
    let seq = words(10);
    for seed in 0..1000 {
        let out = synonym_replacement(&seq, 0.3, &lex, &mut stream(seed)).unwrap();
        let mut changed = 0;
        for (i, (a, b)) in seq.iter().zip(out.iter()).enumerate() {
            if a != b {
                changed += 1;
                assert!(b.starts_with(&format!("s{i}")), "{b} is not a synonym of {a}");
            }
        }
        assert_eq!(changed, 3, "seed {seed}");
    }
}

#[test]
fn ri_eight_tokens_quarter_alpha_gives_ten() {
    let lex = rich_lexicon(8);
    let seq = words(8);
    for seed in 0..1000 {
        let out = random_insertion(&seq, 0.25, &lex, &mut stream(seed)).unwrap();
        assert_eq!(out.len(), 10, "seed {seed}");
    }
}

#[test]
fn rs_twelve_tokens_keeps_multiset() {
    let seq = words(12);
    let mut want: Vec<String> = seq.tokens().to_vec();
    want.sort();
    for seed in 0..1000 {
        let mut got = random_swap(&seq, 0.2, &mut stream(seed)).unwrap().tokens().to_vec();
        got.sort();
        assert_eq!(got, want);
    }
}

#[test]
fn aeda_k_is_uniform_on_one_to_three() {
    let seq = words(9);
    let mut counts = [0usize; 4];
    for seed in 0..10_000 {
        let (out, pos) = aeda_with_positions(&seq, &mut stream(seed)).unwrap();
        assert!((1..=3).contains(&pos.len()));
        assert!(pos.iter().all(|&i| AEDA_PUNCTUATION.contains(&out[i].as_str())));
        counts[pos.len()] += 1;
    }
    for (k, &c) in counts.iter().enumerate().skip(1) {
        let f = c as f64 / 10_000.0;
        assert!((0.31..=0.36).contains(&f), "k={k} frequency {f}");
    }
}

#[test]
fn cross_entropy_matches_hand_arithmetic() {
    let target = SoftLabel::new(vec![0.95, 0.05]).unwrap();
    let got = soft_cross_entropy(&[0.7, 0.3], &target).unwrap();
    let want = -(0.95 * 0.7f64.ln() + 0.05 * 0.3f64.ln());
    assert!((got - want).abs() < 1e-12);
    assert!((got - 0.3990).abs() < 5e-5);
}

#[test]
fn prior_samples_are_valid_with_symmetric_simplex() {
    let space = PolicySpace::default();
    let mut rng = stream(11);
    let mut sums = [0.0; 4];
    for _ in 0..10_000 {
        let p = sample_policy(&space, &mut rng);
        assert!(validate_policy(&p).is_empty(), "{:?}", validate_policy(&p));
        for (s, x) in sums.iter_mut().zip([p.p_sr, p.p_ri, p.p_rs, p.p_rd]) {
            *s += x;
        }
    }
    for s in sums {
        let m = s / 10_000.0;
        assert!((0.23..=0.27).contains(&m), "simplex mean {m}");
    }
}

#[test]
fn random_weight_model_is_at_chance() {
    let mut data_rng = stream(99);
    let data: Vec<LabeledText> = (0..1000)
        .map(|i| {
            let text: Vec<String> = (0..8).map(|_| format!("t{}", data_rng.random_range(0..5000))).collect();
            LabeledText::new(text.join(" "), ClassIndex(i % 2))
        })
        .collect();
    let mut total = 0.0;
    for seed in 0..50 {
        let mut rng = stream(seed);
        let mut model = LinearModel::zeros(2);
        for c in 0..2 {
            for b in 0..N_BUCKETS as u32 {
                model.set_weight(c, b, StandardNormal.sample(&mut rng));
            }
        }
        total += evaluate(&model, &data).unwrap();
    }
    let mean = total / 50.0;
    assert!((0.46..=0.54).contains(&mean), "mean accuracy {mean}");
}

#[test]
fn tpe_concentrates_near_a_one_dimensional_optimum() {
    let space = PolicySpace::default();
    let cfg = SearchConfig::default();
    let mut rng = stream(21);
    let history: Vec<TrialRecord> = (0..30)
        .map(|i| {
            let p = sample_policy(&space, &mut rng);
            TrialRecord::new(i, i as u64, p, vec![-(p.p_aug - 0.7).powi(2)]).unwrap()
        })
        .collect();
    let mut picks: Vec<f64> = (0..200)
        .map(|s| suggest(&history, &space, &cfg, &mut stream(1000 + s)).unwrap().p_aug)
        .collect();
    picks.sort_by(f64::total_cmp);
    let median = (picks[99] + picks[100]) / 2.0;
    assert!((median - 0.7).abs() <= 0.15, "median p_aug {median}");
}

fn small_task() -> (Vec<LabeledText>, Vec<LabeledText>) {
    let rows: Vec<LabeledText> = generate(4, 60, 0)
        .into_iter()
        .map(|r| LabeledText::new(r.text, ClassIndex(usize::from(r.label == "negative"))))
        .collect();
    let (train, val) = rows.split_at(48);
    (train.to_vec(), val.to_vec())
}

#[test]
fn objective_is_deterministic_and_aggregates_runs() {
    let (train, val) = small_task();
    let data = SearchData {
        train: &train,
        val: &val,
        n_class: 2,
    };
    let lex = SynonymLexicon::bundled();
    let cfg = SearchConfig::default();
    let policy = sample_policy(&PolicySpace::default(), &mut stream(8));
    let a = objective(&policy, data, lex, &cfg, 77).unwrap();
    let b = objective(&policy, data, lex, &cfg, 77).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.0.len(), 3);
    assert!((a.1 - a.0.iter().sum::<f64>() / 3.0).abs() < 1e-15);
}

#[test]
fn zero_augmentation_probability_is_the_baseline() {
    let (train, val) = small_task();
    let data = SearchData {
        train: &train,
        val: &val,
        n_class: 2,
    };
    let lex = SynonymLexicon::bundled();
    let cfg = SearchConfig::default();
    let idle = AugmentationPolicy {
        p_aug: 0.0,
        eps_ori: 0.0,
        ..sample_policy(&PolicySpace::default(), &mut stream(2))
    };
    let base = objective(&AugmentationPolicy::no_augmentation(), data, lex, &cfg, 5).unwrap();
    assert_eq!(objective(&idle, data, lex, &cfg, 5).unwrap(), base);
}
