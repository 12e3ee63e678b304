use proptest::prelude::*;
use pumpnoise::features::FeatureMatrix;
use pumpnoise::modelselect::{
    cross_validate, cross_validate_folds, grid_search, kfold_split, CvConfig, GridSpec, Log2Range,
};
use pumpnoise::svm::{KernelSpec, TrainConfig};
use pumpnoise::Label;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn alternating(n: usize) -> Vec<Label> {
    (0..n)
        .map(|i| if i % 2 == 0 { Label::Positive } else { Label::Negative })
        .collect()
}

fn cv(k: usize, seed: u64) -> CvConfig {
    CvConfig {
        k,
        shuffle_seed: seed,
        stratified: true,
    }
}

/// Two Gaussian-ish blobs at `±sep` along the first axis.
fn blobs(n: usize, sep: f64, seed: u64) -> FeatureMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = alternating(n);
    let rows: Vec<Vec<f64>> = labels
        .iter()
        .map(|l| {
            let centre = sep * l.value() as f64;
            vec![centre + rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]
        })
        .collect();
    FeatureMatrix::from_rows(&rows).unwrap().with_labels(labels).unwrap()
}

proptest! {
    #[test]
    fn folds_partition_indices(
        bits in prop::collection::vec(any::<bool>(), 2..120),
        k in 2usize..12,
        seed in any::<u64>(),
        stratified in any::<bool>(),
    ) {
        let n = bits.len();
        prop_assume!(k <= n);
        let labels: Vec<Label> = bits.iter().map(|&b| if b { Label::Positive } else { Label::Negative }).collect();
        let cfg = CvConfig { k, shuffle_seed: seed, stratified };
        let folds = kfold_split(n, Some(&labels), &cfg).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        if stratified {
            let pos: Vec<usize> = folds
                .iter()
                .map(|f| f.iter().filter(|&&i| labels[i] == Label::Positive).count())
                .collect();
            prop_assert!(pos.iter().max().unwrap() - pos.iter().min().unwrap() <= 1);
        }
        prop_assert_eq!(kfold_split(n, Some(&labels), &cfg).unwrap(), folds);
    }
}

#[test]
fn ten_samples_five_folds() {
    let labels = alternating(10);
    for seed in 0..20 {
        let folds = kfold_split(10, Some(&labels), &cv(5, seed)).unwrap();
        for fold in &folds {
            assert_eq!(fold.len(), 2);
            assert_ne!(labels[fold[0]], labels[fold[1]]);
        }
    }
}

#[test]
fn eleven_samples_five_folds() {
    let mut sizes: Vec<usize> = kfold_split(11, Some(&alternating(11)), &cv(5, 3))
        .unwrap()
        .iter()
        .map(Vec::len)
        .collect();
    sizes.sort_unstable();
    assert_eq!(sizes, [2, 2, 2, 2, 3]);
}

#[test]
fn invalid_fold_counts() {
    let labels = alternating(4);
    assert!(kfold_split(4, Some(&labels), &cv(5, 0)).is_err());
    assert!(kfold_split(4, Some(&labels), &cv(1, 0)).is_err());
    assert!(kfold_split(4, Some(&labels), &cv(0, 0)).is_err());
    assert!(kfold_split(4, Some(&labels[..3]), &cv(2, 0)).is_err());
}

#[test]
fn pooled_accuracy_ignores_fold_order() {
    let data = blobs(60, 0.4, 7);
    let cfg = TrainConfig::new(1.0, KernelSpec::rbf(0.5));
    let folds = kfold_split(60, data.labels(), &cv(5, 1)).unwrap();
    let forward = cross_validate_folds(&data, &cfg, &folds).unwrap();
    let mut reversed = folds.clone();
    reversed.reverse();
    let backward = cross_validate_folds(&data, &cfg, &reversed).unwrap();
    assert_eq!(forward.correct, backward.correct);
    assert_eq!(forward.total, 60);
    assert_eq!(forward.accuracy(), backward.accuracy());
    let mut per_fold = backward.per_fold.clone();
    per_fold.reverse();
    assert_eq!(per_fold, forward.per_fold);
}

#[test]
fn random_labels_give_chance_accuracy() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 400;
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..5).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let labels: Vec<Label> = (0..n)
        .map(|_| if rng.random_bool(0.5) { Label::Positive } else { Label::Negative })
        .collect();
    let data = FeatureMatrix::from_rows(&rows).unwrap().with_labels(labels).unwrap();
    let report = cross_validate(&data, &TrainConfig::new(1.0, KernelSpec::rbf(0.5)), &cv(5, 0)).unwrap();
    assert!((report.accuracy() - 50.0).abs() <= 10.0, "accuracy {}", report.accuracy());
}

#[test]
fn separable_data_cross_validates_perfectly() {
    let data = blobs(50, 3.0, 2);
    let report = cross_validate(&data, &TrainConfig::new(1.0, KernelSpec::linear()), &cv(5, 0)).unwrap();
    assert_eq!(report.accuracy(), 100.0);
    assert_eq!(report.mean_fold_accuracy(), 100.0);
}

#[test]
fn single_cell_grid_matches_cross_validation() {
    let data = blobs(40, 0.5, 9);
    let grid = GridSpec {
        log2c: Log2Range::new(1.0, 1.0, 1.0).unwrap(),
        log2gamma: Log2Range::new(-1.0, -1.0, 1.0).unwrap(),
    };
    let base = TrainConfig::new(1.0, KernelSpec::rbf(1.0));
    let result = grid_search(&data, &base, &grid, &cv(4, 5)).unwrap();
    assert_eq!(result.cells.len(), 1);
    let direct = cross_validate(&data, &TrainConfig::new(2.0, KernelSpec::rbf(0.5)), &cv(4, 5)).unwrap();
    assert_eq!(result.best_cell().cv, direct);
    assert_eq!((result.best_cell().c, result.best_cell().gamma), (2.0, 0.5));
}

#[test]
fn ties_prefer_smallest_c_then_gamma() {
    let data = blobs(30, 4.0, 4);
    let grid = GridSpec {
        log2c: Log2Range::new(-1.0, 3.0, 2.0).unwrap(),
        log2gamma: Log2Range::new(-3.0, -1.0, 1.0).unwrap(),
    };
    let result = grid_search(&data, &TrainConfig::new(1.0, KernelSpec::rbf(1.0)), &grid, &cv(5, 0)).unwrap();
    assert_eq!(result.cells.len(), 9);
    assert!(result.cells.iter().all(|c| c.accuracy() == 100.0));
    assert_eq!((result.best_cell().log2c, result.best_cell().log2gamma), (-1.0, -3.0));
}

#[test]
fn default_grid_size_and_outputs() {
    let grid = GridSpec::default();
    assert_eq!(grid.log2c.exponents().len(), 11);
    assert_eq!(grid.log2gamma.exponents().len(), 10);
    assert_eq!("-5,15,2".parse::<Log2Range>().unwrap(), grid.log2c);
    assert!("1,0,1".parse::<Log2Range>().is_err());
    assert!("1,2".parse::<Log2Range>().is_err());

    let data = blobs(20, 2.0, 1);
    let small = GridSpec {
        log2c: Log2Range::new(0.0, 2.0, 2.0).unwrap(),
        log2gamma: Log2Range::new(-2.0, 0.0, 2.0).unwrap(),
    };
    let result = grid_search(&data, &TrainConfig::new(1.0, KernelSpec::rbf(1.0)), &small, &cv(5, 0)).unwrap();
    let mut csv = Vec::new();
    result.write_csv(&mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "C,gamma,accuracy");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1,0.25,"), "{}", lines[1]);
    let mut plot = Vec::new();
    result.write_gnuplot(&mut plot).unwrap();
    assert_eq!(String::from_utf8(plot).unwrap().split("\n\n").count(), 2);
}

#[test]
fn grid_is_deterministic() {
    let data = blobs(40, 0.3, 8);
    let grid = GridSpec {
        log2c: Log2Range::new(-1.0, 3.0, 2.0).unwrap(),
        log2gamma: Log2Range::new(-2.0, 2.0, 2.0).unwrap(),
    };
    let base = TrainConfig::new(1.0, KernelSpec::rbf(1.0));
    let a = grid_search(&data, &base, &grid, &cv(5, 3)).unwrap();
    let b = grid_search(&data, &base, &grid, &cv(5, 3)).unwrap();
    assert_eq!(a, b);
}
