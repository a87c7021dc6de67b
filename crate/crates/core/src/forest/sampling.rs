//! Bootstrap (and stratified) bag-count sampling.

use crate::error::{Error, Result};
use crate::rng::StreamRng;

use super::{ResolvedConfig, Task};

/// Draw one tree's bag: a count per training row summing to `sample_size`.
///
/// Unstratified draws are uniform over all rows (with or without
/// replacement). Stratified draws take the exact per-class counts, with
/// replacement within each class, iterating classes in label order.
pub fn bootstrap_sample(
    n_rows: usize,
    config: &ResolvedConfig,
    class_codes: Option<&[u32]>,
    rng: &mut StreamRng,
) -> Result<Vec<u32>> {
    let mut counts = vec![0u32; n_rows];
    match &config.stratify {
        Some(strata) => {
            if config.task == Task::Regression {
                return Err(Error::Config(
                    "stratified sampling is only defined for classification".into(),
                ));
            }
            let codes = class_codes
                .ok_or_else(|| Error::Config("stratified sampling requires class codes".into()))?;
            for (class, &want) in strata.iter().enumerate() {
                if want == 0 {
                    continue;
                }
                let members: Vec<u32> = (0..n_rows as u32)
                    .filter(|&i| codes[i as usize] as usize == class)
                    .collect();
                if members.is_empty() {
                    return Err(Error::Config(format!(
                        "stratify requests {want} draws of class {class} but no rows have it"
                    )));
                }
                for _ in 0..want {
                    counts[members[rng.next_index(members.len())] as usize] += 1;
                }
            }
        }
        None => {
            if config.replace {
                for _ in 0..config.sample_size {
                    counts[rng.next_index(n_rows)] += 1;
                }
            } else {
                for row in rng.draw_distinct(n_rows, config.sample_size) {
                    counts[row] += 1;
                }
            }
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(task: Task, n: usize) -> ResolvedConfig {
        ResolvedConfig {
            task,
            n_tree: 1,
            mtry: 1,
            sample_size: n,
            replace: true,
            stratify: None,
            min_node_size: 5,
            seed: 0,
            max_categorical_levels: 16,
        }
    }

    #[test]
    fn counts_sum_to_sample_size() {
        let mut cfg = config(Task::Regression, 100);
        cfg.sample_size = 100;
        let mut rng = StreamRng::for_stream(0, 0);
        let counts = bootstrap_sample(250, &cfg, None, &mut rng).unwrap();
        assert_eq!(counts.iter().map(|&c| c as u64).sum::<u64>(), 100);
    }

    #[test]
    fn without_replacement_is_distinct() {
        let mut cfg = config(Task::Regression, 40);
        cfg.replace = false;
        let mut rng = StreamRng::for_stream(7, 0);
        let counts = bootstrap_sample(60, &cfg, None, &mut rng).unwrap();
        assert!(counts.iter().all(|&c| c <= 1));
        assert_eq!(counts.iter().map(|&c| c as u64).sum::<u64>(), 40);
    }

    #[test]
    fn unique_row_fraction_matches_bootstrap_theory() {
        // With replacement and sample_size = N the expected unique fraction
        // is 1 - (1 - 1/N)^N ~ 0.632.
        let n = 1000;
        let cfg = config(Task::Regression, n);
        let mut unique = 0usize;
        let trees = 500;
        for j in 0..trees {
            let mut rng = StreamRng::for_stream(11, j);
            let counts = bootstrap_sample(n, &cfg, None, &mut rng).unwrap();
            unique += counts.iter().filter(|&&c| c > 0).count();
        }
        let fraction = unique as f64 / (n * trees as usize) as f64;
        assert!((fraction - 0.632).abs() <= 0.02, "fraction {fraction}");
    }

    #[test]
    fn stratified_counts_are_exact() {
        let mut cfg = config(Task::Classification, 100);
        cfg.stratify = Some(vec![50, 50]);
        cfg.sample_size = 100;
        let codes: Vec<u32> = (0..1000).map(|i| u32::from(i >= 900)).collect();
        let mut rng = StreamRng::for_stream(3, 0);
        let counts = bootstrap_sample(1000, &cfg, Some(&codes), &mut rng).unwrap();
        let class0: u64 = (0..900).map(|i| counts[i] as u64).sum();
        let class1: u64 = (900..1000).map(|i| counts[i] as u64).sum();
        assert_eq!(class0, 50);
        assert_eq!(class1, 50);
    }

    #[test]
    fn stratify_on_regression_is_rejected() {
        let mut cfg = config(Task::Regression, 10);
        cfg.stratify = Some(vec![5, 5]);
        let mut rng = StreamRng::for_stream(0, 0);
        assert!(bootstrap_sample(10, &cfg, None, &mut rng).is_err());
    }
}
