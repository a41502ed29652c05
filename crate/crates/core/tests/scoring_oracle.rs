mod common;

use eventrl::scoring::{score_corpus, score_sample, ArgumentMode, MatchCriteria, TriggerMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ALL_CRITERIA: [MatchCriteria; 4] = [
    MatchCriteria {
        trigger_mode: TriggerMode::TypeOnly,
        argument_mode: ArgumentMode::TypeAndRole,
    },
    MatchCriteria {
        trigger_mode: TriggerMode::TypeOnly,
        argument_mode: ArgumentMode::TypeRoleAndFiller,
    },
    MatchCriteria {
        trigger_mode: TriggerMode::TypeAndMention,
        argument_mode: ArgumentMode::TypeAndRole,
    },
    MatchCriteria::STRICT,
];

#[test]
fn matches_exhaustive_matching_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..2000 {
        let pred = common::random_events(&mut rng, 5);
        let gold = common::random_events(&mut rng, 5);
        for criteria in ALL_CRITERIA {
            let got = score_sample(&pred, &gold, criteria);
            let ((ttp, tp, tg), (atp, ap, ag)) = common::oracle_counts(&pred, &gold, criteria);
            assert_eq!(
                (got.trigger_counts.tp, got.trigger_counts.pred, got.trigger_counts.gold),
                (ttp, tp, tg)
            );
            assert_eq!(
                (got.argument_counts.tp, got.argument_counts.pred, got.argument_counts.gold),
                (atp, ap, ag)
            );
            assert!((got.trigger_f1 - common::oracle_f1(ttp, tp, tg)).abs() < 1e-9);
            assert!((got.argument_f1 - common::oracle_f1(atp, ap, ag)).abs() < 1e-9);
        }
    }
}

#[test]
fn corpus_score_is_micro_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pairs: Vec<_> = (0..50)
        .map(|_| (common::random_events(&mut rng, 4), common::random_events(&mut rng, 4)))
        .collect();
    let criteria = MatchCriteria::default();
    let got = score_corpus(pairs.iter().map(|(p, g)| (p, g)), criteria).unwrap();
    let (mut t, mut a) = ([0usize; 3], [0usize; 3]);
    for (p, g) in &pairs {
        let ((x, y, z), (u, v, w)) = common::oracle_counts(p, g, criteria);
        t = [t[0] + x, t[1] + y, t[2] + z];
        a = [a[0] + u, a[1] + v, a[2] + w];
    }
    assert!((got.trigger_f1 - common::oracle_f1(t[0], t[1], t[2])).abs() < 1e-9);
    assert!((got.argument_f1 - common::oracle_f1(a[0], a[1], a[2])).abs() < 1e-9);
}

#[test]
fn oracle_sanity() {
    assert_eq!(common::max_matching(&[1, 1, 2], &[1, 2, 2]), 2);
    assert_eq!(common::max_matching::<u8>(&[], &[1]), 0);
    assert_eq!(common::oracle_f1(0, 0, 0), 100.0);
    assert_eq!(common::oracle_f1(0, 3, 0), 0.0);
}
