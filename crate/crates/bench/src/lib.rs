//! Shared fixtures for the pipeline benchmarks.

use rfexplain::data::Dataset;
use rfexplain::forest::{train_forest, ForestModel, Task, TrainConfig};
use rfexplain::sim::{simulate_toy, ToyConfig};

pub fn toy_dataset(n: usize) -> Dataset {
    simulate_toy(&ToyConfig {
        n,
        seed: 42,
        ..Default::default()
    })
    .expect("toy simulation")
    .dataset
}

pub fn trained(dataset: &Dataset, n_tree: usize) -> ForestModel {
    train_forest(
        dataset,
        &TrainConfig {
            n_tree,
            seed: 42,
            ..TrainConfig::new(Task::Regression)
        },
    )
    .expect("training")
}
