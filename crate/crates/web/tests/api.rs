use serde_json::Value;
use wexplore_web::{compare_json, environments_json, layout_json, run_json, ENVS, MAX_BUDGET};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn every_listed_env_has_a_layout() {
    let list = parse(&environments_json());
    assert_eq!(list["envs"].as_array().unwrap().len(), ENVS.len());
    assert_eq!(list["algos"].as_array().unwrap().len(), 9);
    for env in ENVS {
        let l = parse(&layout_json(env).unwrap());
        let (w, h) = (l["width"].as_u64().unwrap() as usize, l["height"].as_u64().unwrap() as usize);
        let rows = l["cells"].as_array().unwrap();
        assert_eq!(rows.len(), h, "{env}");
        assert!(rows.iter().all(|r| r.as_array().unwrap().len() == w), "{env}");
    }
    let toy = parse(&layout_json("toy").unwrap());
    let flat: Vec<&str> = toy["cells"].as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap()).map(|c| c.as_str().unwrap()).collect();
    assert_eq!(flat.iter().filter(|&&c| c == "start").count(), 1);
    assert!(flat.contains(&"reward"));
}

#[test]
fn run_returns_curve_and_heatmap() {
    let out = parse(&run_json("toy", "w_ucb", 2_000, 1).unwrap());
    assert_eq!(out["curve"].as_array().unwrap().len(), 2_000 / wexplore::harness::EVAL_EVERY);
    assert_eq!(out["success"], Value::Bool(true));
    let visits: u64 = out["heatmap"].as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap()).map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(visits, 2_000);
    // same seed, same answer
    assert_eq!(run_json("toy", "w_ucb", 500, 3).unwrap(), run_json("toy", "w_ucb", 500, 3).unwrap());
}

#[test]
fn compare_covers_all_algorithms() {
    let out = parse(&compare_json("deep_sea:5", 600, 2).unwrap());
    let rows = out["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| (0.0..=100.0).contains(&r["success"].as_f64().unwrap())));
}

#[test]
fn bad_input_is_an_error_not_a_panic() {
    assert!(layout_json("nowhere").is_err());
    assert!(run_json("toy", "w_magic", 100, 1).is_err());
    assert!(run_json("toy", "w_ucb", 0, 1).is_err());
    assert!(run_json("toy", "w_ucb", MAX_BUDGET + 1, 1).is_err());
    assert!(compare_json("toy", 100, 0).is_err());
}
