//! Browser bindings: environment layouts, single runs and algorithm comparisons,
//! all returned as JSON strings.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use wexplore::envs::{make_env, CellKind};
use wexplore::harness::{aggregate, run_matrix, run_single, AlgoId, ScenarioConfig};

/// Environments offered by the page.
pub const ENVS: [&str; 8] = ["toy", "toy3", "prison", "wall", "deep_grid", "deep_sea:8", "chain:12", "taxi"];

/// Largest budget accepted from the page; runs happen on the UI thread.
pub const MAX_BUDGET: usize = 50_000;
pub const MAX_SEEDS: u64 = 10;

fn cell_name(kind: CellKind) -> &'static str {
    match kind {
        CellKind::Empty => "empty",
        CellKind::Wall => "wall",
        CellKind::Start => "start",
        CellKind::Prison => "prison",
        CellKind::Reward { .. } => "reward",
        CellKind::Penalty { .. } => "penalty",
    }
}

fn check_budget(budget: usize) -> Result<(), String> {
    if budget == 0 || budget > MAX_BUDGET {
        return Err(format!("budget must be in 1..={MAX_BUDGET}, got {budget}"));
    }
    Ok(())
}

pub fn environments_json() -> String {
    let algos: Vec<Value> = AlgoId::ALL
        .iter()
        .map(|a| json!({ "id": a.as_str(), "description": a.description() }))
        .collect();
    json!({ "envs": ENVS, "algos": algos, "max_budget": MAX_BUDGET, "max_seeds": MAX_SEEDS }).to_string()
}

/// Grid of cell kinds; non-map environments mark cells that hold a state as "empty".
pub fn layout_json(env: &str) -> Result<String, String> {
    let model = make_env(env).map_err(|e| e.to_string())?;
    let layout = model.layout.as_ref().ok_or_else(|| format!("{env} has no grid layout"))?;
    let mut cells = vec![vec!["wall"; layout.width]; layout.height];
    match &model.grid {
        Some(src) => {
            for (r, row) in cells.iter_mut().enumerate() {
                for (c, cell) in row.iter_mut().enumerate() {
                    *cell = cell_name(src.spec.cell(r, c));
                }
            }
        }
        None => {
            for &(r, c) in &layout.cell_of_state {
                cells[r][c] = "empty";
            }
        }
    }
    Ok(json!({
        "env": env,
        "width": layout.width,
        "height": layout.height,
        "cells": cells,
        "actions": model.action_names,
        "default_budget": wexplore::harness::default_budget(env).map_err(|e| e.to_string())?,
    })
    .to_string())
}

/// One seed: learning curve, final visitation heatmap and outcome.
pub fn run_json(env: &str, algo: &str, budget: usize, seed: u64) -> Result<String, String> {
    check_budget(budget)?;
    let algo: AlgoId = algo.parse().map_err(|e: wexplore::Error| e.to_string())?;
    let cfg = ScenarioConfig::new(env, algo, 1).map_err(|e| e.to_string())?.with_budget(budget);
    let run = run_single(&cfg, seed).map_err(|e| e.to_string())?;
    let curve: Vec<Value> = run
        .samples
        .iter()
        .map(|m| json!({ "step": m.step, "return": m.greedy_return, "discovery": m.discovery_fraction }))
        .collect();
    let heatmap = run.heatmaps.last().map(|h| h.grid.clone());
    Ok(json!({
        "env": env,
        "algo": algo.as_str(),
        "seed": seed,
        "curve": curve,
        "heatmap": heatmap,
        "final_return": run.final_return,
        "optimal_return": run.optimal_return,
        "success": run.success,
        "steps_to_learn": run.steps_to_learn,
        "discovery": run.final_discovery,
    })
    .to_string())
}

/// Every algorithm on one environment over seeds 1..=n_seeds.
pub fn compare_json(env: &str, budget: usize, n_seeds: u64) -> Result<String, String> {
    check_budget(budget)?;
    if n_seeds == 0 || n_seeds > MAX_SEEDS {
        return Err(format!("seeds must be in 1..={MAX_SEEDS}, got {n_seeds}"));
    }
    let cfgs = AlgoId::ALL
        .iter()
        .map(|&a| ScenarioConfig::new(env, a, n_seeds).map(|c| c.with_budget(budget)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let runs = run_matrix(&cfgs).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = aggregate(&runs)
        .iter()
        .map(|r| {
            json!({
                "algo": r.algo.as_str(),
                "success": r.success.mean,
                "success_ci95": r.success.ci95,
                "discovery": r.discovery.mean,
                "discovery_ci95": r.discovery.ci95,
                "steps_to_learn": r.steps_to_learn.map(|s| s.mean),
            })
        })
        .collect();
    Ok(json!({ "env": env, "budget": budget, "seeds": n_seeds, "rows": rows }).to_string())
}

#[wasm_bindgen]
pub fn environments() -> String {
    environments_json()
}

#[wasm_bindgen]
pub fn layout(env: &str) -> Result<String, JsError> {
    layout_json(env).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn run(env: &str, algo: &str, budget: usize, seed: u64) -> Result<String, JsError> {
    run_json(env, algo, budget, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn compare(env: &str, budget: usize, n_seeds: u64) -> Result<String, JsError> {
    compare_json(env, budget, n_seeds).map_err(|e| JsError::new(&e))
}
