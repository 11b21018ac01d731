//! Predefined scenario sets.

use super::config::{AlgoId, HorizonMode, MemoryMode, ScenarioConfig};
use crate::error::{Error, Result};
use crate::learning::InitMode;

/// Environments of the main comparison.
pub const RECAP_ENVS: [&str; 6] = ["deep_sea:10", "taxi", "deep_grid", "toy", "prison", "wall"];

/// The four (init, horizon) scenarios, named `zero_short`, `zero_long`,
/// `optimistic_short` and `optimistic_long`.
pub const SCENARIOS: [(&str, InitMode, HorizonMode); 4] = [
    ("zero_short", InitMode::Zero, HorizonMode::Short),
    ("zero_long", InitMode::Zero, HorizonMode::Long),
    ("optimistic_short", InitMode::Optimistic, HorizonMode::Short),
    ("optimistic_long", InitMode::Optimistic, HorizonMode::Long),
];

pub fn scenario(name: &str) -> Result<(InitMode, HorizonMode)> {
    SCENARIOS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|&(_, i, h)| (i, h))
        .ok_or_else(|| Error::Config(format!("unknown scenario {name:?}")))
}

/// Scenario × algorithm × environment grid. Deep sea has a single horizon,
/// so only its short-horizon scenarios are included.
pub fn recap(envs: &[&str], n_seeds: u64) -> Result<Vec<ScenarioConfig>> {
    let mut out = Vec::new();
    for &(name, init, horizon) in &SCENARIOS {
        for env in envs {
            if env.starts_with("deep_sea") && horizon == HorizonMode::Long {
                continue;
            }
            for algo in AlgoId::ALL {
                out.push(
                    ScenarioConfig::new(env, algo, n_seeds)?
                        .with_name(name)
                        .with_init(init)
                        .with_horizon(horizon),
                );
            }
        }
    }
    Ok(out)
}

pub const GAMMA_W_SWEEP: [f64; 5] = [0.0, 0.3, 0.7, 0.9, 0.99999];

pub fn gamma_sweep(env: &str, values: &[f64], n_seeds: u64) -> Result<Vec<ScenarioConfig>> {
    let mut out = Vec::new();
    for &g in values {
        for algo in [AlgoId::WUcb, AlgoId::WCount] {
            out.push(
                ScenarioConfig::new(env, algo, n_seeds)?
                    .with_name(&format!("gamma_w={g}"))
                    .with_gamma_w(g),
            );
        }
    }
    Ok(out)
}

/// Infinite, finite and no memory. Ensembles need a memory and skip the last.
pub fn memory_ablation(env: &str, n_seeds: u64) -> Result<Vec<ScenarioConfig>> {
    let mut out = Vec::new();
    for (name, mode) in [
        ("memory_infinite", MemoryMode::Infinite),
        ("memory_finite", MemoryMode::Finite),
        ("memory_none", MemoryMode::None),
    ] {
        for algo in AlgoId::ALL {
            if mode == MemoryMode::None && algo.is_ensemble() {
                continue;
            }
            out.push(ScenarioConfig::new(env, algo, n_seeds)?.with_name(name).with_memory(mode));
        }
    }
    Ok(out)
}

/// Infinite-horizon chain without memory, tracking V^π at every step.
pub fn chain(n: usize, n_seeds: u64) -> Result<Vec<ScenarioConfig>> {
    let env = format!("chain:{n}");
    AlgoId::ALL
        .iter()
        .filter(|a| !a.is_ensemble())
        .map(|&algo| Ok(ScenarioConfig::new(&env, algo, n_seeds)?.with_name("chain")))
        .collect()
}

pub const STOCHASTIC_ENVS: [&str; 3] = ["stoch_toy", "stoch_prison", "stoch_deep_grid"];

pub fn stochastic(n_seeds: u64) -> Result<Vec<ScenarioConfig>> {
    let mut out = Vec::new();
    for env in STOCHASTIC_ENVS {
        for algo in AlgoId::ALL {
            out.push(ScenarioConfig::new(env, algo, n_seeds)?.with_name("stochastic"));
        }
    }
    Ok(out)
}

pub fn deep_sea_scaling(sizes: &[usize], algos: &[AlgoId], n_seeds: u64) -> Result<Vec<ScenarioConfig>> {
    let mut out = Vec::new();
    for &n in sizes {
        for &algo in algos {
            out.push(ScenarioConfig::new(&format!("deep_sea:{n}"), algo, n_seeds)?.with_name("scaling"));
        }
    }
    Ok(out)
}

/// Named bundle lookup for the command line.
pub fn bundle(name: &str, n_seeds: u64) -> Result<Vec<ScenarioConfig>> {
    match name {
        "recap" => recap(&RECAP_ENVS, n_seeds),
        "gamma_sweep" => gamma_sweep("toy", &GAMMA_W_SWEEP, n_seeds),
        "memory_ablation" => memory_ablation("toy", n_seeds),
        "chain" => chain(27, n_seeds),
        "stochastic" => stochastic(n_seeds),
        "deep_sea_scaling" => {
            let sizes: Vec<usize> = (5..=21).step_by(2).collect();
            deep_sea_scaling(&sizes, &AlgoId::ALL, n_seeds)
        }
        _ => Err(Error::Config(format!("unknown bundle {name:?}"))),
    }
}

pub const BUNDLES: [&str; 6] = ["recap", "gamma_sweep", "memory_ablation", "chain", "stochastic", "deep_sea_scaling"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recap_grid_size() {
        let cfgs = recap(&RECAP_ENVS, 1).unwrap();
        // 5 envs × 4 scenarios + deep sea × 2, times 9 algorithms
        assert_eq!(cfgs.len(), (5 * 4 + 2) * 9);
    }

    #[test]
    fn every_bundle_resolves() {
        for b in BUNDLES {
            for c in bundle(b, 1).unwrap() {
                c.resolve().unwrap();
            }
        }
    }
}
