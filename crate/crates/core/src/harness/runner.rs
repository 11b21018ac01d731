use serde::{Deserialize, Serialize};

use super::config::{AlgoId, Resolved, ScenarioConfig, EVAL_EVERY};
use crate::error::{Error, Result};
use crate::evaluation::{
    count_suboptimal, exact_value, greedy_policy, greedy_return, msve, optimal_q, GreedyTracker, PolicyVector, VI_TOL,
};
use crate::exploration::{
    ensemble_act, ensemble_init, ensemble_update, select_eps_greedy, select_random, select_ucb1,
    select_w_count, select_w_ucb, w_ucb_reward, Ensemble, EnsembleConfig, ExplorationConfig, VisitCounter, WTable,
    WVariant,
};
use crate::learning::{
    epsilon_at, td_update, td_update_with_reward, EpsilonSchedule, InitMode, LearnerConfig, ReplayMemory, ValueTable,
};
use crate::mdp::{EnvModel, Transition};
use crate::rng::RngStream;

/// Tolerance for "achieves the optimal return" and for treating a value gap as zero.
pub const SUCCESS_TOL: f64 = 1e-6;
pub const GAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub step: usize,
    pub greedy_return: f64,
    pub states_discovered: usize,
    pub discovery_fraction: f64,
    pub msve: Option<f64>,
    /// V*(s_t) − V^π_t(s_t) ≤ 0 (up to solver noise) at the current state.
    pub optimal_at_state: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapSnapshot {
    pub step: usize,
    pub grid: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunLog {
    pub run_id: String,
    pub scenario: String,
    pub env: String,
    pub algo: AlgoId,
    pub seed: u64,
    pub budget: usize,
    pub episodes: usize,
    pub samples: Vec<MetricSample>,
    pub final_counts: VisitCounter,
    pub heatmaps: Vec<HeatmapSnapshot>,
    pub final_return: f64,
    pub optimal_return: f64,
    pub success: bool,
    pub final_discovery: f64,
    /// First checkpoint from which every later checkpoint is optimal.
    pub steps_to_learn: Option<usize>,
    /// V*(s_t) − V^π_t(s_t) for every step, when tracked.
    pub value_gaps: Option<Vec<f64>>,
    pub wall_clock_secs: f64,
}

impl PartialEq for RunLog {
    /// Wall-clock time is excluded.
    fn eq(&self, o: &Self) -> bool {
        self.run_id == o.run_id
            && self.scenario == o.scenario
            && self.env == o.env
            && self.algo == o.algo
            && self.seed == o.seed
            && self.budget == o.budget
            && self.episodes == o.episodes
            && self.samples == o.samples
            && self.final_counts == o.final_counts
            && self.heatmaps == o.heatmaps
            && self.final_return.to_bits() == o.final_return.to_bits()
            && self.optimal_return.to_bits() == o.optimal_return.to_bits()
            && self.success == o.success
            && self.final_discovery.to_bits() == o.final_discovery.to_bits()
            && self.steps_to_learn == o.steps_to_learn
            && self.value_gaps == o.value_gaps
    }
}

/// Exact optimal quantities of an environment.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub v_star: Vec<f64>,
    pub optimal_policy: PolicyVector,
    pub optimal_return: f64,
}

impl Oracle {
    pub fn new(env: &EnvModel, eval_horizon: usize) -> Result<Self> {
        let q = optimal_q(&env.exact, env.gamma, VI_TOL);
        // Ties among optimal actions are harmless; a fixed stream keeps this reproducible.
        let pi = greedy_policy(&q, &mut RngStream::new(0));
        let v_star = exact_value(&env.exact, &pi, env.gamma)?;
        let optimal_return = greedy_return(env, &pi, eval_horizon)?;
        Ok(Self {
            v_star,
            optimal_policy: pi,
            optimal_return,
        })
    }
}

/// Learner state for one run: tables, counts, memory and caches.
struct Agent {
    algo: AlgoId,
    learner: LearnerConfig,
    explore: ExplorationConfig,
    eps: EpsilonSchedule,
    q_pi: ValueTable,
    /// Separate behavior table; absent when it would always equal `q_pi`.
    q_beta: Option<ValueTable>,
    w: Option<WTable>,
    ensemble: Option<(Ensemble, EnsembleConfig)>,
    counter: VisitCounter,
    memory: Option<ReplayMemory>,
    /// Per-pair W_ucb reward (non-terminal form) or count bonus α/√n.
    cache: Vec<f64>,
}

impl Agent {
    fn new(algo: AlgoId, r: &Resolved, init_rng: &mut RngStream) -> Result<Self> {
        let (ns, na) = (r.env.n_states, r.env.n_actions);
        let separate_beta = match algo {
            AlgoId::Bonus => true,
            AlgoId::EpsGreedy | AlgoId::Ucb1 | AlgoId::WUcb | AlgoId::WCount => r.learner.init_mode == InitMode::Optimistic,
            _ => false,
        };
        let w = match algo {
            AlgoId::WUcb => Some(WTable::ucb(ns, na, &r.explore)?),
            AlgoId::WCount => Some(WTable::count(ns, na)),
            _ => None,
        };
        let ensemble = if algo.is_ensemble() {
            let tables = ensemble_init(&r.ensemble, &r.learner, ns, na, init_rng)?;
            Some((
                Ensemble {
                    tables,
                    choice: r.ensemble.table_choice,
                    current: 0,
                },
                r.ensemble.clone(),
            ))
        } else {
            None
        };
        let memory = match r.capacity {
            Some(c) => Some(ReplayMemory::new(c, r.minibatch)?),
            None => None,
        };
        Ok(Self {
            algo,
            learner: r.learner,
            explore: r.explore,
            eps: r.eps,
            q_pi: ValueTable::zeros(ns, na),
            q_beta: separate_beta.then(|| crate::learning::q_init(&r.learner, ns, na)),
            w,
            ensemble,
            counter: VisitCounter::new(ns, na),
            memory,
            cache: vec![0.0; ns * na],
        })
    }

    fn q_behavior(&self) -> &ValueTable {
        self.q_beta.as_ref().unwrap_or(&self.q_pi)
    }

    fn act(&mut self, s: usize, boundary: bool, i: usize, tie: &mut RngStream, strat: &mut RngStream) -> usize {
        let eps = epsilon_at(&self.eps, i);
        match self.algo {
            AlgoId::Random => select_random(self.q_pi.n_actions(), strat),
            AlgoId::EpsGreedy | AlgoId::Bonus => select_eps_greedy(self.q_behavior(), s, eps, strat),
            AlgoId::Ucb1 => select_ucb1(self.q_behavior(), &self.counter, s, &self.explore, tie),
            AlgoId::WUcb => select_w_ucb(self.q_behavior(), &self.w.as_ref().unwrap().table, s, &self.explore, tie),
            AlgoId::WCount => select_w_count(
                self.q_behavior(),
                &self.w.as_ref().unwrap().table,
                &self.counter,
                s,
                &self.explore,
                tie,
            ),
            AlgoId::Boot | AlgoId::BootTs | AlgoId::BootPrior => {
                let (ens, _) = self.ensemble.as_mut().unwrap();
                ensemble_act(ens, boundary, s, eps, strat)
            }
        }
    }

    fn observe(&mut self, tr: Transition, mb: &mut RngStream) -> Result<()> {
        let na = self.q_pi.n_actions();
        self.counter.increment(tr.s, tr.a);
        match self.algo {
            AlgoId::WUcb => {
                for a in 0..na {
                    if self.counter.count(tr.s, a) > 0 {
                        self.cache[tr.s * na + a] = w_ucb_reward(&self.counter, tr.s, a, false, &self.explore);
                    }
                }
            }
            AlgoId::Bonus => {
                self.cache[tr.s * na + tr.a] = self.explore.alpha / (self.counter.count(tr.s, tr.a) as f64).sqrt();
            }
            _ => {}
        }
        let current = [tr];
        let (first, second): (&[Transition], &[Transition]) = match self.memory.as_mut() {
            Some(m) => {
                m.push(tr);
                m.as_slices()
            }
            None => (&current, &[]),
        };
        let (eta, gamma) = (self.learner.eta, self.learner.gamma);
        let gw = self.explore.gamma_w;
        let scale = 1.0 / (1.0 - gw);
        let bonus_beta = self.algo == AlgoId::Bonus;
        let count_terminal = self.counter.max_count() as f64 * scale;
        let (q_pi, cache, counter) = (&mut self.q_pi, &self.cache, &self.counter);
        let mut q_beta = self.q_beta.as_mut();
        let mut w = self.w.as_mut();
        // One pass over memory; the tables do not read each other.
        for t in first.iter().chain(second) {
            let sa = t.s * na + t.a;
            td_update(q_pi, t, eta, gamma);
            if let Some(qb) = q_beta.as_deref_mut() {
                if bonus_beta {
                    td_update_with_reward(qb, t, t.r + cache[sa], eta, gamma);
                } else {
                    td_update(qb, t, eta, gamma);
                }
            }
            if let Some(w) = w.as_deref_mut() {
                let old = w.table.get(t.s, t.a);
                let target = match (w.variant, t.terminal) {
                    (WVariant::Ucb, true) => cache[sa] * scale,
                    (WVariant::Ucb, false) => cache[sa] + gw * w.table.max_row(t.s_next),
                    (WVariant::Count, true) => count_terminal,
                    (WVariant::Count, false) => counter.count(t.s, t.a) as f64 + gw * w.table.min_row(t.s_next),
                };
                w.table.set(t.s, t.a, old + eta * (target - old));
            }
        }
        if let Some((ens, cfg)) = self.ensemble.as_mut() {
            let mem = self.memory.as_ref().expect("ensembles always have a memory");
            ensemble_update(&mut ens.tables, mem, cfg, &self.learner, mb)?;
        }
        Ok(())
    }
}

/// Runs one scenario for one seed.
pub fn run_single(cfg: &ScenarioConfig, seed: u64) -> Result<RunLog> {
    let resolved = cfg.resolve()?;
    let oracle = Oracle::new(&resolved.env, resolved.eval_horizon)?;
    run_resolved(cfg, &resolved, &oracle, seed)
}

/// Runs with a precomputed resolution and oracle (shared across seeds).
pub fn run_resolved(cfg: &ScenarioConfig, r: &Resolved, oracle: &Oracle, seed: u64) -> Result<RunLog> {
    let elapsed = stopwatch();
    let env = &r.env;
    let root = RngStream::new(seed);
    let mut env_rng = root.substream("env");
    let mut tie = root.substream("tiebreak");
    let mut strat = root.substream("strategy");
    let mut mb = root.substream("minibatch");
    let mut eval_rng = root.substream("eval");
    let mut init_rng = root.substream("init");
    let mut agent = Agent::new(cfg.algo, r, &mut init_rng)?;

    let mut tracker = GreedyTracker::new(&agent.q_pi, &mut eval_rng);
    let mut v_pi = if cfg.track_values {
        exact_value(&env.exact, &tracker.policy, env.gamma)?
    } else {
        Vec::new()
    };
    let mut gaps = Vec::new();
    let mut samples = Vec::with_capacity(cfg.budget / EVAL_EVERY);
    let mut checkpoint_ok = Vec::with_capacity(cfg.budget / EVAL_EVERY);
    let mut heatmaps = Vec::new();
    let memoryless = agent.memory.is_none();

    let mut i = 0usize;
    let mut episodes = 0usize;
    while i < cfg.budget {
        let mut s = env.reset(&mut env_rng);
        episodes += 1;
        let mut boundary = true;
        let mut t_ep = 0usize;
        loop {
            if cfg.track_values {
                gaps.push(clean_gap(oracle.v_star[s] - v_pi[s]));
            }
            let a = agent.act(s, boundary, i, &mut tie, &mut strat);
            boundary = false;
            let tr = env.step(s, a, &mut env_rng)?;
            agent.observe(tr, &mut mb)?;
            i += 1;
            t_ep += 1;
            if cfg.track_values {
                let changed = if memoryless {
                    tracker.refresh_state(&agent.q_pi, tr.s, &mut eval_rng)
                } else {
                    tracker.refresh_all(&agent.q_pi, &mut eval_rng)
                };
                if changed {
                    v_pi = exact_value(&env.exact, &tracker.policy, env.gamma)?;
                }
            }
            if i % EVAL_EVERY == 0 {
                if !cfg.track_values && tracker.refresh_all(&agent.q_pi, &mut eval_rng) {
                    // policy changed; nothing cached to refresh
                }
                let ret = greedy_return(env, &tracker.policy, r.eval_horizon)?;
                let discovered = agent.counter.states_visited();
                let (m, flag) = if cfg.track_values {
                    let here = tr.s_next;
                    (
                        Some(msve(&oracle.v_star, &v_pi)?),
                        Some(clean_gap(oracle.v_star[here] - v_pi[here]) == 0.0),
                    )
                } else {
                    (None, None)
                };
                checkpoint_ok.push((i, (ret - oracle.optimal_return).abs() <= SUCCESS_TOL));
                samples.push(MetricSample {
                    step: i,
                    greedy_return: ret,
                    states_discovered: discovered,
                    discovery_fraction: crate::evaluation::discovery_fraction(&agent.counter, env),
                    msve: m,
                    optimal_at_state: flag,
                });
            }
            if i == cfg.budget || cfg.heatmap_steps.contains(&i) {
                heatmaps.push(HeatmapSnapshot {
                    step: i,
                    grid: crate::evaluation::visitation_heatmap(&agent.counter, env)?,
                });
            }
            if tr.terminal || t_ep >= env.horizon || i >= cfg.budget {
                break;
            }
            s = tr.s_next;
        }
    }

    if !cfg.track_values {
        tracker.refresh_all(&agent.q_pi, &mut eval_rng);
    }
    let final_return = greedy_return(env, &tracker.policy, r.eval_horizon)?;
    let success = (final_return - oracle.optimal_return).abs() <= SUCCESS_TOL;
    let steps_to_learn = if success {
        let first_bad_from_end = checkpoint_ok.iter().rposition(|&(_, ok)| !ok);
        match first_bad_from_end {
            None => checkpoint_ok.first().map(|&(step, _)| step).or(Some(cfg.budget)),
            Some(k) => checkpoint_ok.get(k + 1).map(|&(step, _)| step).or(Some(cfg.budget)),
        }
    } else {
        None
    };
    Ok(RunLog {
        run_id: cfg.run_id(seed),
        scenario: cfg.name.clone(),
        env: cfg.env.clone(),
        algo: cfg.algo,
        seed,
        budget: cfg.budget,
        episodes,
        samples,
        final_discovery: crate::evaluation::discovery_fraction(&agent.counter, env),
        final_counts: agent.counter,
        heatmaps,
        final_return,
        optimal_return: oracle.optimal_return,
        success,
        steps_to_learn,
        value_gaps: cfg.track_values.then_some(gaps),
        wall_clock_secs: elapsed(),
    })
}

/// Seconds since the call; always 0 in the browser, which has no monotonic clock in std.
#[cfg(not(target_arch = "wasm32"))]
fn stopwatch() -> impl Fn() -> f64 {
    let t = std::time::Instant::now();
    move || t.elapsed().as_secs_f64()
}

#[cfg(target_arch = "wasm32")]
fn stopwatch() -> impl Fn() -> f64 {
    || 0.0
}

fn clean_gap(g: f64) -> f64 {
    if g.abs() < GAP_TOL {
        0.0
    } else {
        g
    }
}

/// Runs every (scenario, seed) cell. Output order follows the input order,
/// independent of how cells are scheduled.
pub fn run_matrix(cfgs: &[ScenarioConfig]) -> Result<Vec<RunLog>> {
    let mut prepared = Vec::with_capacity(cfgs.len());
    for cfg in cfgs {
        let r = cfg.resolve().map_err(|e| cell_err(cfg, None, e))?;
        let oracle = Oracle::new(&r.env, r.eval_horizon).map_err(|e| cell_err(cfg, None, e))?;
        prepared.push((cfg, r, oracle));
    }
    let cells: Vec<(usize, u64)> = prepared
        .iter()
        .enumerate()
        .flat_map(|(k, (cfg, _, _))| cfg.seeds.iter().map(move |&s| (k, s)))
        .collect();
    let run = |&(k, seed): &(usize, u64)| {
        let (cfg, r, oracle) = &prepared[k];
        run_resolved(cfg, r, oracle, seed).map_err(|e| cell_err(cfg, Some(seed), e))
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cells.par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cells.iter().map(run).collect()
    }
}

/// Number of steps at which the greedy policy was more than `eps` below
/// optimal in the state the agent was in. Needs a run with value tracking.
pub fn sample_complexity(run: &RunLog, eps: f64) -> Result<usize> {
    let gaps = run
        .value_gaps
        .as_ref()
        .ok_or_else(|| Error::Usage(format!("{} was run without value tracking", run.run_id)))?;
    Ok(count_suboptimal(gaps, eps))
}

/// Serial variant of [`run_matrix`].
pub fn run_matrix_serial(cfgs: &[ScenarioConfig]) -> Result<Vec<RunLog>> {
    let mut out = Vec::new();
    for cfg in cfgs {
        let r = cfg.resolve().map_err(|e| cell_err(cfg, None, e))?;
        let oracle = Oracle::new(&r.env, r.eval_horizon).map_err(|e| cell_err(cfg, None, e))?;
        for &seed in &cfg.seeds {
            out.push(run_resolved(cfg, &r, &oracle, seed).map_err(|e| cell_err(cfg, Some(seed), e))?);
        }
    }
    Ok(out)
}

fn cell_err(cfg: &ScenarioConfig, seed: Option<u64>, e: Error) -> Error {
    let cell = match seed {
        Some(s) => cfg.run_id(s),
        None => format!("{}/{}/{}", cfg.name, cfg.env, cfg.algo),
    };
    Error::Cell {
        cell,
        source: Box::new(e),
    }
}
