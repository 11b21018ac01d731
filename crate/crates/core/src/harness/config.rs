use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::envs::make_env;
use crate::error::{Error, Result};
use crate::evaluation::eval_horizon;
use crate::exploration::{EnsembleConfig, ExplorationConfig, TableChoice};
use crate::learning::{Capacity, EpsilonSchedule, InitMode, LearnerConfig};
use crate::mdp::EnvModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgoId {
    Random,
    EpsGreedy,
    Ucb1,
    Bonus,
    Boot,
    BootTs,
    BootPrior,
    WUcb,
    WCount,
}

impl AlgoId {
    pub const ALL: [AlgoId; 9] = [
        AlgoId::Random,
        AlgoId::EpsGreedy,
        AlgoId::Ucb1,
        AlgoId::Bonus,
        AlgoId::Boot,
        AlgoId::BootTs,
        AlgoId::BootPrior,
        AlgoId::WUcb,
        AlgoId::WCount,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AlgoId::Random => "random",
            AlgoId::EpsGreedy => "eps_greedy",
            AlgoId::Ucb1 => "ucb1",
            AlgoId::Bonus => "bonus",
            AlgoId::Boot => "boot",
            AlgoId::BootTs => "boot_ts",
            AlgoId::BootPrior => "boot_prior",
            AlgoId::WUcb => "w_ucb",
            AlgoId::WCount => "w_count",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            AlgoId::Random => "uniform random actions",
            AlgoId::EpsGreedy => "epsilon-greedy with geometric decay",
            AlgoId::Ucb1 => "UCB1 on the behavior table",
            AlgoId::Bonus => "epsilon-greedy on a table trained with a count bonus",
            AlgoId::Boot => "bootstrapped ensemble, one table per episode",
            AlgoId::BootTs => "bootstrapped ensemble, one table per step",
            AlgoId::BootPrior => "bootstrapped ensemble with prior regularization",
            AlgoId::WUcb => "visitation value with UCB rewards",
            AlgoId::WCount => "visitation value with count rewards",
        }
    }

    pub fn is_ensemble(&self) -> bool {
        matches!(self, AlgoId::Boot | AlgoId::BootTs | AlgoId::BootPrior)
    }
}

impl fmt::Display for AlgoId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgoId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgoId::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown algo id {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonMode {
    Short,
    Long,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemoryMode {
    /// Every transition kept, one full sweep per step.
    Infinite,
    /// The last 20H transitions; ensembles use minibatches of 32.
    Finite,
    /// Update on the current transition only.
    None,
}

/// Hyperparameters; `None` picks the per-environment default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub eta: Option<f64>,
    pub gamma: f64,
    pub gamma_w: Option<f64>,
    pub kappa: Option<f64>,
    pub alpha: f64,
    pub eps0: f64,
    pub eps_end: f64,
    pub ensemble_size: usize,
    pub minibatch: usize,
    pub nu: f64,
    pub prison_success: Option<f64>,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            eta: None,
            gamma: 0.99,
            gamma_w: None,
            kappa: None,
            alpha: 0.1,
            eps0: 1.0,
            eps_end: 0.1,
            ensemble_size: 10,
            minibatch: 1024,
            nu: 0.1,
            prison_success: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Scenario label, e.g. `zero_short`.
    pub name: String,
    pub env: String,
    pub algo: AlgoId,
    pub init_mode: InitMode,
    pub horizon_mode: HorizonMode,
    pub memory_mode: MemoryMode,
    pub seeds: Vec<u64>,
    pub budget: usize,
    #[serde(default)]
    pub hyper: Hyperparams,
    /// Log V*(s_t) − V^π_t(s_t) every step and MSVE at checkpoints.
    #[serde(default)]
    pub track_values: bool,
    /// Extra heatmap checkpoints; the final step is always recorded.
    #[serde(default)]
    pub heatmap_steps: Vec<usize>,
}

pub const EVAL_EVERY: usize = 50;

/// Default step budget for an environment id.
pub fn default_budget(env: &str) -> Result<usize> {
    let base = env.split(':').next().unwrap_or(env);
    Ok(match base {
        "toy" => 5_000,
        "prison" => 20_000,
        "toy3" => 1_000,
        "deep_grid" => 10_000,
        "taxi" => 30_000,
        "wall" => 60_000,
        "deep_sea" => {
            let n = make_env(env)?.layout.map(|l| l.width).unwrap_or(10);
            (20.0 * (n as f64).powf(2.5)).ceil() as usize
        }
        "chain" => 200_000,
        "stoch_toy" => 10_000,
        "stoch_prison" => 30_000,
        "stoch_deep_grid" => 30_000,
        _ => return Err(Error::Config(format!("unknown env id {env:?}"))),
    })
}

impl ScenarioConfig {
    /// Zero init, short horizon, infinite memory, seeds 1..=n, default budget.
    pub fn new(env: &str, algo: AlgoId, n_seeds: u64) -> Result<Self> {
        let memory_mode = if env.starts_with("chain") {
            MemoryMode::None
        } else {
            MemoryMode::Infinite
        };
        Ok(Self {
            name: "zero_short".into(),
            env: env.to_string(),
            algo,
            init_mode: InitMode::Zero,
            horizon_mode: HorizonMode::Short,
            memory_mode,
            seeds: (1..=n_seeds).collect(),
            budget: default_budget(env)?,
            hyper: Hyperparams::default(),
            track_values: env.starts_with("chain"),
            heatmap_steps: Vec::new(),
        })
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_init(mut self, init: InitMode) -> Self {
        self.init_mode = init;
        self
    }

    pub fn with_horizon(mut self, horizon: HorizonMode) -> Self {
        self.horizon_mode = horizon;
        self
    }

    pub fn with_memory(mut self, memory: MemoryMode) -> Self {
        self.memory_mode = memory;
        self
    }

    pub fn with_seeds(mut self, seeds: impl IntoIterator<Item = u64>) -> Self {
        self.seeds = seeds.into_iter().collect();
        self
    }

    pub fn with_gamma_w(mut self, gamma_w: f64) -> Self {
        self.hyper.gamma_w = Some(gamma_w);
        self
    }

    pub fn run_id(&self, seed: u64) -> String {
        format!("{}/{}/{}/{}", self.name, self.env, self.algo, seed)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        if self.budget == 0 {
            return Err(Error::Config("budget must be positive".into()));
        }
        let mut env = make_env(&self.env)?;
        if let Some(p) = self.hyper.prison_success {
            let mut src = env
                .grid
                .clone()
                .ok_or_else(|| Error::Config(format!("{} has no prison cells", self.env)))?;
            src.prison_success = p;
            let (name, h_s, h_l) = (env.name.clone(), env.horizon_short, env.horizon_long);
            env = crate::envs::grid::build(&name, &src)?;
            env.horizon_short = h_s;
            env.horizon_long = h_l;
        }
        let horizon = match self.horizon_mode {
            HorizonMode::Short => env.horizon_short,
            HorizonMode::Long => env.horizon_long,
            HorizonMode::Fixed(h) => h,
        };
        if horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        env = env.with_horizon(horizon);
        if (self.hyper.gamma - env.gamma).abs() > 0.0 {
            env.gamma = self.hyper.gamma;
        }
        let stochastic = !env.is_deterministic();
        let eta = self.hyper.eta.unwrap_or(if stochastic { 0.1 } else { 0.5 });
        let gamma_w = self.hyper.gamma_w.unwrap_or(if self.env.starts_with("chain") {
            0.999
        } else if self.env.starts_with("stoch_") {
            0.9
        } else {
            0.99
        });
        let learner = LearnerConfig::new(eta, self.hyper.gamma, self.init_mode, env.r_max)?;
        let mut explore = ExplorationConfig::new(env.r_max, self.hyper.gamma, gamma_w)?;
        explore.alpha = self.hyper.alpha;
        if let Some(k) = self.hyper.kappa {
            explore.kappa = k;
        }
        explore.validate()?;
        let eps = EpsilonSchedule::new(self.hyper.eps0, self.hyper.eps_end, self.budget)?;
        let choice = match self.algo {
            AlgoId::BootTs => TableChoice::PerStep,
            _ => TableChoice::PerEpisode,
        };
        let nu = if self.algo == AlgoId::BootPrior { self.hyper.nu } else { 0.0 };
        let mut ensemble = EnsembleConfig::bootstrap(choice, nu);
        ensemble.b = self.hyper.ensemble_size;
        ensemble.minibatch = self.hyper.minibatch;
        let (capacity, minibatch) = match self.memory_mode {
            MemoryMode::Infinite => (Some(Capacity::Infinite), None),
            MemoryMode::Finite => (Some(Capacity::Bounded(20 * horizon)), Some(32)),
            MemoryMode::None => (None, None),
        };
        if self.algo.is_ensemble() && capacity.is_none() {
            return Err(Error::Config("bootstrapped ensembles need a replay memory".into()));
        }
        Ok(Resolved {
            eval_horizon: eval_horizon(horizon),
            env,
            learner,
            explore,
            eps,
            ensemble,
            capacity,
            minibatch,
        })
    }
}

/// A scenario with every default filled in.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub env: EnvModel,
    pub learner: LearnerConfig,
    pub explore: ExplorationConfig,
    pub eps: EpsilonSchedule,
    pub ensemble: EnsembleConfig,
    pub capacity: Option<Capacity>,
    pub minibatch: Option<usize>,
    pub eval_horizon: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algo_ids_round_trip() {
        for a in AlgoId::ALL {
            assert_eq!(a.as_str().parse::<AlgoId>().unwrap(), a);
        }
        assert!("ucb2".parse::<AlgoId>().is_err());
    }

    #[test]
    fn defaults_follow_environment() {
        let r = ScenarioConfig::new("stoch_toy", AlgoId::WUcb, 1).unwrap().resolve().unwrap();
        assert_eq!((r.learner.eta, r.explore.gamma_w, r.env.horizon), (0.1, 0.9, 15));
        let r = ScenarioConfig::new("chain:5", AlgoId::WUcb, 1).unwrap().resolve().unwrap();
        assert_eq!((r.learner.eta, r.explore.gamma_w, r.capacity), (0.1, 0.999, None));
        let r = ScenarioConfig::new("toy", AlgoId::WCount, 1)
            .unwrap()
            .with_horizon(HorizonMode::Long)
            .resolve()
            .unwrap();
        assert_eq!((r.learner.eta, r.explore.gamma_w, r.env.horizon, r.eval_horizon), (0.5, 0.99, 22, 25));
        assert!((r.explore.kappa - 100.0).abs() < 1e-9);
    }

    #[test]
    fn deep_sea_budget_scales() {
        assert_eq!(default_budget("deep_sea:5").unwrap(), 1119);
        assert!(default_budget("nowhere").is_err());
    }

    #[test]
    fn ensembles_need_memory() {
        let c = ScenarioConfig::new("toy", AlgoId::Boot, 1).unwrap().with_memory(MemoryMode::None);
        assert!(matches!(c.resolve(), Err(Error::Config(_))));
    }
}
