mod common;

use eventrl::policy::{distribution, log_prob, nucleus_distribution, nucleus_sample, DecodeSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DRAWS: usize = 100_000;

fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0
}

fn empirical(settings: DecodeSettings, seed: u64, cset: &eventrl::policy::CandidateSet, params: &eventrl::policy::PolicyParams) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0usize; cset.len()];
    for _ in 0..DRAWS {
        let s = nucleus_sample(params, cset, settings, &mut rng).unwrap();
        counts[s.index] += 1;
    }
    counts.into_iter().map(|c| c as f64 / DRAWS as f64).collect()
}

#[test]
fn nucleus_samples_follow_truncated_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for case in 0..10 {
        let n = rng.gen_range(3..12);
        let cset = common::random_cset(&mut rng, n, 4);
        let params = common::random_params(&mut rng, 4, 2.0);
        let settings = DecodeSettings {
            temperature: 0.5,
            top_p: 0.95,
        };
        let logits: Vec<f64> = cset.features().iter().map(|f| params.weights.dot(f)).collect();
        let target = common::reference_nucleus(&common::reference_softmax(&logits, 0.5), 0.95);
        let got = empirical(settings, case, &cset, &params);
        let tv = total_variation(&got, &target);
        assert!(tv < 0.01, "case {case}: tv {tv}");
        for (g, t) in got.iter().zip(&target) {
            if *t == 0.0 {
                assert_eq!(*g, 0.0, "sampled outside the nucleus");
            }
        }
    }
}

#[test]
fn top_p_one_is_full_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let cset = common::random_cset(&mut rng, 8, 4);
    let params = common::random_params(&mut rng, 4, 1.0);
    let settings = DecodeSettings {
        temperature: 0.7,
        top_p: 1.0,
    };
    let full = distribution(&params, &cset, 0.7).unwrap();
    assert_eq!(nucleus_distribution(&full, 1.0), full);
    let got = empirical(settings, 99, &cset, &params);
    assert!(total_variation(&got, &full) < 0.01);
}

#[test]
fn sampled_log_prob_is_untruncated() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let cset = common::random_cset(&mut rng, 6, 3);
    let params = common::random_params(&mut rng, 3, 1.0);
    let settings = DecodeSettings::default();
    for _ in 0..50 {
        let s = nucleus_sample(&params, &cset, settings, &mut rng).unwrap();
        let expected = log_prob(&params, &cset, s.index, settings.temperature).unwrap();
        assert!((s.log_prob - expected).abs() < 1e-12);
    }
}

#[test]
fn library_nucleus_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..500 {
        let n = rng.gen_range(1..10);
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let z: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|p| p / z).collect();
        let top_p = rng.gen_range(0.05..1.05);
        let a = nucleus_distribution(&probs, top_p);
        let b = common::reference_nucleus(&probs, top_p);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
