use std::collections::BTreeSet;

use proptest::prelude::*;
use recmin::dataset::{read_ratings, split_candidate_test, split_users, ExperimentSplit};
use recmin::{Format, Rating, RatingsDataset, Scale, UserId};

fn rows() -> impl Strategy<Value = Vec<(String, String, f64, i64)>> {
    prop::collection::vec((1u32..40, 1u32..60, 1u32..=10, 0i64..1_000_000), 1..200).prop_map(|v| {
        v.into_iter()
            .map(|(u, i, r, ts)| (u.to_string(), i.to_string(), r as f64 * 0.5, ts))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn write_then_load_round_trips(rows in rows()) {
        let (ds, _) = RatingsDataset::from_raw(rows, Scale::movielens()).unwrap();
        for format in [Format::MovielensCsv, Format::Tsv, Format::Jsonl] {
            let mut buf = Vec::new();
            ds.write(&mut buf, format).unwrap();
            let (back, report) = read_ratings(buf.as_slice(), format, Scale::movielens(), "mem".as_ref()).unwrap();
            prop_assert_eq!(report.duplicates, 0);
            prop_assert_eq!(&back, &ds);
        }
    }

    #[test]
    fn pool_split_is_a_partition(rows in rows(), fraction in 0.05f64..0.95, seed in any::<u64>()) {
        let (ds, _) = RatingsDataset::from_raw(rows, Scale::movielens()).unwrap();
        for (_, profile) in ds.user_profiles() {
            if profile.len() < 2 {
                prop_assert!(split_candidate_test(profile, fraction, seed).is_err());
                continue;
            }
            let pools = split_candidate_test(profile, fraction, seed).unwrap();
            let cand: BTreeSet<_> = pools.candidate.iter().map(|r| r.item).collect();
            let test: BTreeSet<_> = pools.test.iter().map(|r| r.item).collect();
            prop_assert!(cand.is_disjoint(&test));
            prop_assert!(!cand.is_empty() && !test.is_empty());
            let mut union: Vec<Rating<f64>> = pools.full_profile();
            union.sort_by_key(|r| r.item);
            prop_assert_eq!(union.as_slice(), profile);
            prop_assert_eq!(&pools, &split_candidate_test(profile, fraction, seed).unwrap());
        }
    }

    #[test]
    fn user_split_is_a_partition(rows in rows(), seed in any::<u64>()) {
        let (ds, _) = RatingsDataset::from_raw(rows, Scale::movielens()).unwrap();
        prop_assume!(ds.num_users() >= 2);
        let a = split_users(&ds, 0.7, seed).unwrap();
        let mut all: Vec<UserId> = a.system.iter().chain(&a.minimizing).copied().collect();
        all.sort();
        prop_assert_eq!(all, ds.users());
        prop_assert!(!a.system.is_empty() && !a.minimizing.is_empty());
    }
}

fn dataset(users: u32, per_user: u32) -> RatingsDataset<f64> {
    let rows = (1..=users).flat_map(|u| {
        (1..=per_user).map(move |i| {
            (
                u.to_string(),
                i.to_string(),
                ((u + i) % 10 + 1) as f64 * 0.5,
                i as i64,
            )
        })
    });
    RatingsDataset::from_raw(rows, Scale::movielens())
        .unwrap()
        .0
}

#[test]
fn distinct_seeds_change_the_split() {
    let ds = dataset(25, 6);
    let differing = (0..5u64)
        .filter(|&s| {
            split_users(&ds, 0.7, 2 * s).unwrap() != split_users(&ds, 0.7, 2 * s + 1).unwrap()
        })
        .count();
    assert!(differing >= 1);
    let a = ExperimentSplit::new(&ds, 0.7, 0.7, 1).unwrap();
    let b = ExperimentSplit::new(&ds, 0.7, 0.7, 2).unwrap();
    assert_ne!(a.minimizing_users, b.minimizing_users);
}

#[test]
fn experiment_split_covers_every_rating() {
    let ds = dataset(30, 10);
    let split = ExperimentSplit::new(&ds, 0.7, 0.7, 9).unwrap();
    assert_eq!(split.system_users.len(), 21);
    assert_eq!(split.minimizing_users.len(), 9);
    let mut all: Vec<Rating<f64>> = split.system_ratings();
    for pools in split.minimizing_users.values() {
        assert_eq!((pools.candidate.len(), pools.test.len()), (7, 3));
        all.extend(pools.full_profile());
    }
    all.sort_by_key(|r| (r.user, r.item));
    assert_eq!(all.as_slice(), ds.ratings());
}

#[test]
fn f32_dataset_loads() {
    let text = "userId,movieId,rating,timestamp\n1,10,4.5,100\n1,11,3.0,101\n2,10,0.5,102\n";
    let (ds, _) = read_ratings::<f32, _>(
        text.as_bytes(),
        Format::MovielensCsv,
        Scale::movielens(),
        "x".as_ref(),
    )
    .unwrap();
    assert_eq!(ds.len(), 3);
    assert_eq!(ds.ratings()[0].value, 4.5f32);
}
