use recmin::svd::ParamClass;
use recmin::synth::{generate, SynthConfig};
use recmin::{ItemId, Profile, Rating, Scale, SvdConfig, SvdModel, UserId};

fn three_by_three() -> Vec<Rating<f64>> {
    (0..3u32)
        .flat_map(|u| {
            (0..3u32).map(move |i| Rating {
                user: UserId(u),
                item: ItemId(i),
                value: 1.0 + ((u * 3 + i * 7) % 9) as f64 * 0.5,
                timestamp: 0,
            })
        })
        .collect()
}

#[test]
fn analytic_gradient_matches_central_differences() {
    let ratings = three_by_three();
    for biased in [true, false] {
        let cfg = SvdConfig {
            factors: 3,
            epochs: 2,
            init_std: 0.4,
            regularization: 0.05,
            biased,
            seed: 2,
            ..SvdConfig::default()
        };
        let model = SvdModel::train(&ratings, Scale::movielens(), cfg).unwrap();
        let grad = model.loss_gradient(&ratings);
        for class in [
            ParamClass::UserBias,
            ParamClass::UserFactor,
            ParamClass::ItemBias,
            ParamClass::ItemFactor,
        ] {
            if !biased && matches!(class, ParamClass::UserBias | ParamClass::ItemBias) {
                continue;
            }
            for idx in 0..model.param_count(class) {
                let h = 1e-5;
                let up = model
                    .with_parameter_shift(class, idx, h)
                    .regularized_loss(&ratings);
                let down = model
                    .with_parameter_shift(class, idx, -h)
                    .regularized_loss(&ratings);
                let numeric = (up - down) / (2.0 * h);
                let analytic = grad.get(class, idx);
                let rel = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-8);
                assert!(
                    rel <= 1e-5,
                    "{class:?}[{idx}] biased={biased}: {analytic} vs {numeric}"
                );
            }
        }
    }
}

fn instance() -> Vec<Rating<f64>> {
    let cfg = SynthConfig {
        users: 120,
        items: 300,
        seed: 21,
        max_profile: 150,
        ..SynthConfig::default()
    };
    generate::<f64>(&cfg, Scale::movielens())
        .unwrap()
        .dataset
        .ratings()
        .to_vec()
}

#[test]
fn training_loss_mostly_decreases() {
    let ratings = instance();
    let cfg = SvdConfig::default();
    let (_, history) =
        SvdModel::train_with_history(&ratings, Scale::movielens(), cfg, true).unwrap();
    assert_eq!(history.len(), cfg.epochs);
    let decreasing = history.windows(2).filter(|w| w[1] <= w[0]).count();
    assert!(
        decreasing as f64 >= 0.9 * (history.len() - 1) as f64,
        "{history:?}"
    );
}

#[test]
fn fold_in_is_isolated() {
    let ratings = instance();
    let model = SvdModel::train(&ratings, Scale::movielens(), SvdConfig::default()).unwrap();
    let before = model.fingerprint();
    let a = Profile::from_pairs([(ItemId(0), 5.0), (ItemId(3), 1.0), (ItemId(8), 4.0)]);
    let b = Profile::from_pairs([(ItemId(1), 2.0), (ItemId(2), 4.5)]);
    let b_alone = model.fold_in(&b, 4);
    let _ = model.fold_in(&a, 3);
    let b_after = model.fold_in(&b, 4);
    assert_eq!(model.fingerprint(), before);
    assert_eq!(b_alone, b_after);
}

#[test]
fn snapshot_file_reproduces_predictions() {
    let ratings = instance();
    let model = SvdModel::train(
        &ratings,
        Scale::movielens(),
        SvdConfig {
            seed: 8,
            ..SvdConfig::default()
        },
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    model.save(&path).unwrap();
    let back = SvdModel::<f64>::load(&path).unwrap();
    assert_eq!(back.fingerprint(), model.fingerprint());
    let observed = Profile::from_pairs([(ItemId(2), 4.0), (ItemId(9), 2.0)]);
    let (u1, u2) = (model.fold_in(&observed, 1), back.fold_in(&observed, 1));
    for i in 0..50 {
        assert_eq!(
            model.predict(&u1, ItemId(i)).value.to_bits(),
            back.predict(&u2, ItemId(i)).value.to_bits()
        );
    }
}

#[test]
fn noiseless_data_is_fit_closely() {
    let cfg = SynthConfig {
        users: 60,
        items: 80,
        seed: 2,
        factors: 2,
        noise: 0.0,
        user_bias_std: 0.2,
        item_bias_std: 0.2,
        interaction_std: 0.3,
        min_profile: 60,
        max_profile: 80,
        quantize: false,
        ..SynthConfig::default()
    };
    let data = generate::<f64>(&cfg, Scale::movielens()).unwrap();
    let ratings = data.dataset.ratings();
    let svd = SvdConfig {
        factors: 2,
        epochs: 400,
        learning_rate: 0.01,
        regularization: 0.0,
        init_std: 0.1,
        biased: true,
        seed: 1,
    };
    let model = SvdModel::train(ratings, data.dataset.scale(), svd).unwrap();
    let se: f64 = ratings
        .iter()
        .map(|r| (model.score_trained(r.user, r.item).unwrap() - r.value).powi(2))
        .sum();
    let train_rmse = (se / ratings.len() as f64).sqrt();
    assert!(train_rmse < 0.02, "training rmse {train_rmse}");
}
