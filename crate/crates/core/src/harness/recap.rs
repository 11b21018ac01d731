use serde::{Deserialize, Serialize};

use super::config::AlgoId;
use super::runner::RunLog;

/// Mean and 95% normal-approximation half width (zero for fewer than two samples).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub ci95: f64,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self { mean: f64::NAN, ci95: 0.0 };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n < 2 {
            return Self { mean, ci95: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        Self {
            mean,
            ci95: 1.96 * var.sqrt() / (n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecapRow {
    pub scenario: String,
    pub env: String,
    pub algo: AlgoId,
    pub n_seeds: usize,
    /// Percent of reachable states visited by the end of the run.
    pub discovery: Stat,
    /// Percent of seeds whose final greedy policy is optimal.
    pub success: Stat,
    /// Over successful seeds only; absent when none succeeded.
    pub steps_to_learn: Option<Stat>,
}

/// One row per (scenario, env, algo), in order of first appearance. Seeds are
/// sorted before summing so the result does not depend on run order.
pub fn aggregate(runs: &[RunLog]) -> Vec<RecapRow> {
    let mut keys: Vec<(String, String, AlgoId)> = Vec::new();
    for r in runs {
        let k = (r.scenario.clone(), r.env.clone(), r.algo);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(scenario, env, algo)| {
            let mut group: Vec<&RunLog> = runs
                .iter()
                .filter(|r| r.scenario == scenario && r.env == env && r.algo == algo)
                .collect();
            group.sort_by_key(|r| r.seed);
            let col = |f: &dyn Fn(&RunLog) -> f64| group.iter().map(|r| f(r)).collect::<Vec<_>>();
            let learned: Vec<f64> = group.iter().filter_map(|r| r.steps_to_learn.map(|s| s as f64)).collect();
            RecapRow {
                n_seeds: group.len(),
                discovery: Stat::of(&col(&|r| 100.0 * r.final_discovery)),
                success: Stat::of(&col(&|r| if r.success { 100.0 } else { 0.0 })),
                steps_to_learn: (!learned.is_empty()).then(|| Stat::of(&learned)),
                scenario,
                env,
                algo,
            }
        })
        .collect()
}
