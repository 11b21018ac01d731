use std::collections::{HashMap, VecDeque};

use wexplore::envs::chain::{BACKWARD, FORWARD, STAY};
use wexplore::envs::deep_sea::{BOMB, LEFT, RIGHT, TREASURE};
use wexplore::envs::*;
use wexplore::evaluation::{greedy_policy, greedy_return, optimal_q, VI_TOL};
use wexplore::{EnvModel, Episode, Error, RngStream};

const UP: usize = 0;
const DOWN: usize = 1;
const LEFT_G: usize = 2;
const RIGHT_G: usize = 3;

fn state_at(env: &EnvModel, cell: (usize, usize)) -> usize {
    env.layout.as_ref().unwrap().cell_of_state.iter().position(|&c| c == cell).unwrap()
}

fn cell_of(env: &EnvModel, s: usize) -> (usize, usize) {
    env.layout.as_ref().unwrap().cell_of_state[s]
}

/// |k − np| ≤ 3·sqrt(np(1−p)).
fn within_3_sigma(k: u64, n: u64, p: f64) -> bool {
    let mean = n as f64 * p;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    (k as f64 - mean).abs() <= 3.0 * sd.max(1e-12)
}

/// Samples (s, a) `n` times and checks every successor frequency against the
/// exact row.
fn check_row_by_sampling(env: &EnvModel, s: usize, a: usize, n: u64, rng: &mut RngStream) {
    let mut hits: HashMap<usize, u64> = HashMap::new();
    for _ in 0..n {
        *hits.entry(env.step(s, a, rng).unwrap().s_next).or_default() += 1;
    }
    let (targets, probs) = env.exact.row(s, a);
    for (&t, &p) in targets.iter().zip(probs) {
        let k = hits.get(&t).copied().unwrap_or(0);
        assert!(within_3_sigma(k, n, p), "{} ({s},{a})->{t}: {k}/{n} vs {p}", env.name);
    }
    assert!(hits.keys().all(|t| targets.contains(t)), "sampled outside support");
}

#[test]
fn toy_reset_is_fixed_start() {
    let env = make_env("toy").unwrap();
    let mut rng = RngStream::new(3);
    let start = state_at(&env, (4, 0));
    assert!((0..100).all(|_| env.reset(&mut rng) == start));
    let toy3 = make_env("toy3").unwrap();
    assert_eq!(toy3.reset(&mut rng), state_at(&toy3, (0, 0)));
}

#[test]
fn chain_starts_leftmost() {
    let env = make_chainworld(ChainSpec::new(5)).unwrap();
    let mut rng = RngStream::new(1);
    assert!((0..100).all(|_| env.reset(&mut rng) == 0));
}

#[test]
fn deep_sea_flag_is_fair() {
    let n = 4;
    let env = make_deep_sea(n).unwrap();
    let mut rng = RngStream::new(11);
    let resets = 10_000;
    let mut treasure = 0;
    for _ in 0..resets {
        let s = env.reset(&mut rng);
        if s == deep_sea_state(n, TREASURE, 0, 0) {
            treasure += 1;
        } else {
            assert_eq!(s, deep_sea_state(n, BOMB, 0, 0));
        }
    }
    let f = treasure as f64 / resets as f64;
    assert!((f - 0.5).abs() <= 0.01, "{f}");
}

#[test]
fn grid_bump_into_wall_stays_put() {
    let env = make_env("toy").unwrap();
    let mut rng = RngStream::new(0);
    // (3,1) is a wall; from (4,1) moving up bumps into it.
    let s = state_at(&env, (4, 1));
    let t = env.step(s, UP, &mut rng).unwrap();
    assert_eq!(t.s_next, s);
    assert_eq!(t.r, -0.01);
    assert!(!t.terminal);
    // the outer border behaves the same
    let corner = state_at(&env, (4, 0));
    assert_eq!(env.step(corner, LEFT_G, &mut rng).unwrap().s_next, corner);
}

#[test]
fn out_of_range_step_is_contract_error() {
    let env = make_env("toy").unwrap();
    let mut rng = RngStream::new(0);
    assert!(matches!(env.step(env.n_states, 0, &mut rng), Err(Error::Contract(_))));
    assert!(matches!(env.step(0, 4, &mut rng), Err(Error::Contract(_))));
}

#[test]
fn stepping_after_terminal_is_usage_error() {
    let env = make_env("toy").unwrap();
    let mut rng = RngStream::new(0);
    let mut ep = Episode::start(&env, &mut rng);
    for a in [RIGHT_G, RIGHT_G, RIGHT_G, RIGHT_G, UP, UP, UP, UP, UP] {
        ep.step(&env, a, &mut rng).unwrap();
    }
    assert!(ep.done);
    assert!(matches!(ep.step(&env, UP, &mut rng), Err(Error::Usage(_))));
}

#[test]
fn chain_forward_frequency() {
    let env = make_chainworld(ChainSpec::new(5)).unwrap();
    let mut rng = RngStream::new(5);
    let n = 100_000;
    let moved = (0..n).filter(|_| env.step(0, FORWARD, &mut rng).unwrap().s_next == 1).count();
    let f = moved as f64 / n as f64;
    assert!((f - 0.99).abs() <= 0.005, "{f}");
}

#[test]
fn chain_rewards_and_degenerate_p() {
    let n = 6;
    let env = make_chainworld(ChainSpec::new(n)).unwrap();
    assert_eq!(env.exact.reward(n - 1, STAY), 1.0);
    assert_eq!(env.exact.reward(0, STAY), 1e-8);
    assert_eq!(env.exact.reward(2, STAY), 0.0);
    assert!((0..n).all(|s| (0..3).all(|a| !env.exact.is_terminal(s, a))));
    let mut spec = ChainSpec::new(n);
    spec.p = 1.0;
    let det = make_chainworld(spec).unwrap();
    let mut rng = RngStream::new(0);
    for k in 0..n - 1 {
        for _ in 0..50 {
            assert_eq!(det.step(k, FORWARD, &mut rng).unwrap().s_next, k + 1);
        }
    }
    assert_eq!(det.step(n - 1, FORWARD, &mut rng).unwrap().s_next, n - 1);
    assert_eq!(det.step(0, BACKWARD, &mut rng).unwrap().s_next, 0);
}

#[test]
fn chain_is_ergodic_under_random_policy() {
    let env = make_chainworld(ChainSpec::new(27)).unwrap();
    for seed in 1..=50 {
        let mut rng = RngStream::new(seed);
        let mut seen = vec![false; 27];
        let mut s = env.reset(&mut rng);
        seen[s] = true;
        for _ in 0..100_000 {
            s = env.step(s, rng.below(3), &mut rng).unwrap().s_next;
            seen[s] = true;
        }
        assert!(seen.iter().all(|&v| v), "seed {seed}");
    }
}

#[test]
fn deep_sea_diagonal_cost() {
    let n = 7;
    let env = make_deep_sea(n).unwrap();
    let mut rng = RngStream::new(0);
    let t = env.step(deep_sea_state(n, TREASURE, 2, 2), RIGHT, &mut rng).unwrap();
    assert!((t.r + 0.01 / n as f64).abs() < 1e-15);
    assert_eq!(t.s_next, deep_sea_state(n, TREASURE, 3, 3));
    let t = env.step(deep_sea_state(n, TREASURE, 2, 2), LEFT, &mut rng).unwrap();
    assert_eq!(t.r, 0.0);
    assert_eq!(t.s_next, deep_sea_state(n, TREASURE, 3, 1));
    // left at the left edge descends without turning
    let t = env.step(deep_sea_state(n, BOMB, 3, 0), LEFT, &mut rng).unwrap();
    assert_eq!(t.s_next, deep_sea_state(n, BOMB, 4, 0));
}

#[test]
fn deep_sea_always_right_reaches_treasure_in_n_steps() {
    let n = 50;
    let env = make_deep_sea(n).unwrap();
    let mut rng = RngStream::new(0);
    let mut s = deep_sea_state(n, TREASURE, 0, 0);
    let mut total = 0.0;
    let mut steps = 0;
    loop {
        let t = env.step(s, RIGHT, &mut rng).unwrap();
        total += t.r;
        steps += 1;
        if t.terminal {
            break;
        }
        s = t.s_next;
    }
    assert_eq!(steps, n);
    assert!((total - (1.0 - 0.01)).abs() < 1e-12, "{total}");
}

#[test]
fn deep_sea_always_left_earns_nothing() {
    let n = 4;
    let env = make_deep_sea(n).unwrap();
    let mut rng = RngStream::new(0);
    for flag in [TREASURE, BOMB] {
        let mut s = deep_sea_state(n, flag, 0, 0);
        let mut total = 0.0;
        for step in 0..n {
            let t = env.step(s, LEFT, &mut rng).unwrap();
            total += t.r;
            assert_eq!(t.terminal, step == n - 1);
            s = t.s_next;
        }
        assert_eq!(total, 0.0);
    }
}

#[test]
fn deep_sea_random_policy_chest_probability() {
    for (n, episodes) in [(4, 100_000u64), (8, 100_000), (10, 100_000), (12, 200_000)] {
        let env = make_deep_sea(n).unwrap();
        let mut rng = RngStream::new(n as u64);
        let mut reached = 0;
        for _ in 0..episodes {
            let mut s = env.reset(&mut rng);
            loop {
                let t = env.step(s, rng.below(2), &mut rng).unwrap();
                if t.terminal {
                    if t.r.abs() > 0.5 {
                        reached += 1;
                    }
                    break;
                }
                s = t.s_next;
            }
        }
        let p = 0.5f64.powi(n as i32);
        assert!(within_3_sigma(reached, episodes, p), "N={n}: {reached}/{episodes}");
    }
}

#[test]
fn deep_sea_size_checks() {
    assert!(matches!(make_deep_sea(1), Err(Error::Config(_))));
    let env = make_deep_sea(5).unwrap();
    assert_eq!(env.n_states, 2 * 25);
    // lower triangle of both boards
    assert_eq!(env.n_reachable(), 2 * 15);
    assert_eq!(env.horizon, 5);
}

/// Independent parse of the taxi asset: walls, start, passengers, destination.
struct TaxiGeometry {
    h: usize,
    w: usize,
    wall: Vec<bool>,
    start: (usize, usize),
    passengers: Vec<(usize, usize)>,
    dest: (usize, usize),
}

fn taxi_geometry() -> TaxiGeometry {
    let rows: Vec<Vec<&str>> = TAXI_MAP_TEXT
        .lines()
        .filter(|l| !l.starts_with("//") && !l.contains('=') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().collect())
        .collect();
    let (h, w) = (rows.len(), rows[0].len());
    let mut g = TaxiGeometry { h, w, wall: vec![false; h * w], start: (0, 0), passengers: vec![], dest: (0, 0) };
    for (r, row) in rows.iter().enumerate() {
        for (c, t) in row.iter().enumerate() {
            match *t {
                "#" => g.wall[r * w + c] = true,
                "S" => g.start = (r, c),
                "T" => g.passengers.push((r, c)),
                "D" => g.dest = (r, c),
                _ => {}
            }
        }
    }
    g
}

const TAXI_MAP_TEXT: &str = include_str!("../assets/taxi.map");

fn grid_move(g: &TaxiGeometry, (r, c): (usize, usize), a: usize) -> (usize, usize) {
    let (nr, nc) = match a {
        UP if r > 0 => (r - 1, c),
        DOWN if r + 1 < g.h => (r + 1, c),
        LEFT_G if c > 0 => (r, c - 1),
        RIGHT_G if c + 1 < g.w => (r, c + 1),
        _ => (r, c),
    };
    if g.wall[nr * g.w + nc] {
        (r, c)
    } else {
        (nr, nc)
    }
}

/// Breadth-first search over (cell, pickup mask) to the destination with
/// `goal_mask` on board, never entering the destination early. Returns the moves.
fn taxi_bfs(g: &TaxiGeometry, goal_mask: usize, avoid_passengers: bool) -> Vec<usize> {
    let start = (g.start, 0usize);
    let mut prev: HashMap<((usize, usize), usize), (((usize, usize), usize), usize)> = HashMap::new();
    let mut q = VecDeque::from([start]);
    let mut seen = std::collections::HashSet::from([start]);
    while let Some((cell, mask)) = q.pop_front() {
        if cell == g.dest {
            if mask == goal_mask {
                let mut moves = Vec::new();
                let mut cur = (cell, mask);
                while cur != start {
                    let (p, a) = prev[&cur];
                    moves.push(a);
                    cur = p;
                }
                moves.reverse();
                return moves;
            }
            continue;
        }
        for a in 0..4 {
            let to = grid_move(g, cell, a);
            let mut m = mask;
            if let Some(i) = g.passengers.iter().position(|&p| p == to) {
                if avoid_passengers {
                    continue;
                }
                m |= 1 << i;
            }
            if seen.insert((to, m)) {
                prev.insert((to, m), ((cell, mask), a));
                q.push_back((to, m));
            }
        }
    }
    panic!("no path");
}

#[test]
fn taxi_optimal_delivery() {
    let env = make_taxi().unwrap();
    let g = taxi_geometry();
    let moves = taxi_bfs(&g, 0b111, false);
    assert_eq!(moves.len(), 28);
    let mut rng = RngStream::new(0);
    let mut ep = Episode::start(&env, &mut rng);
    let mut ret = 0.0;
    let mut disc = 1.0;
    for &a in moves.iter().chain(std::iter::once(&UP)) {
        let t = ep.step(&env, a, &mut rng).unwrap();
        ret += disc * t.r;
        disc *= env.gamma;
    }
    assert!(ep.done);
    assert_eq!(ep.t, 29);
    assert!((ret - 15.0 * 0.99f64.powi(28)).abs() < 1e-12);
    // and that is the optimum of the exact model
    let q = optimal_q(&env.exact, env.gamma, VI_TOL);
    let pi = greedy_policy(&q, &mut rng);
    let opt = greedy_return(&env, &pi, 37).unwrap();
    assert!((opt - 15.0 * 0.99f64.powi(28)).abs() < 1e-9);
}

#[test]
fn taxi_empty_ride_pays_nothing() {
    let env = make_taxi().unwrap();
    let g = taxi_geometry();
    let moves = taxi_bfs(&g, 0, true);
    let mut rng = RngStream::new(0);
    let mut ep = Episode::start(&env, &mut rng);
    for &a in &moves {
        let t = ep.step(&env, a, &mut rng).unwrap();
        assert_eq!(t.r, 0.0);
        assert!(!t.terminal);
    }
    let t = ep.step(&env, DOWN, &mut rng).unwrap();
    assert!(t.terminal);
    assert_eq!(t.r, 0.0);
}

#[test]
fn taxi_state_count_and_heatmap_marginal() {
    let env = make_taxi().unwrap();
    let g = taxi_geometry();
    let walls = g.wall.iter().filter(|&&w| w).count();
    assert_eq!(env.n_states, g.w * g.h * 8 - walls * 8);
    let layout = env.layout.as_ref().unwrap();
    for cell in 0..env.n_states / 8 {
        let pos = layout.cell_of_state[taxi_state(cell, 0)];
        assert!((0..8).all(|m| layout.cell_of_state[taxi_state(cell, m)] == pos));
    }
}

#[test]
fn deep_grid_always_right() {
    let env = make_deep_gridworld().unwrap();
    let mut rng = RngStream::new(0);
    let mut ep = Episode::start(&env, &mut rng);
    let mut last = None;
    while !ep.done {
        last = Some(ep.step(&env, RIGHT_G, &mut rng).unwrap());
    }
    let last = last.unwrap();
    assert_eq!(ep.t, 11);
    assert!(last.terminal);
    assert_eq!(last.r, 2.0);
    assert_eq!(cell_of(&env, last.s), (2, 10));
}

#[test]
fn deep_grid_corridor_only_from_the_left() {
    let env = make_deep_gridworld().unwrap();
    let mut rng = RngStream::new(0);
    for c in 1..11 {
        let above = state_at(&env, (1, c));
        let below = state_at(&env, (3, c));
        if !env.exact.is_terminal(above, DOWN) {
            assert_eq!(env.step(above, DOWN, &mut rng).unwrap().s_next, above);
        }
        if !env.exact.is_terminal(below, UP) {
            assert_eq!(env.step(below, UP, &mut rng).unwrap().s_next, below);
        }
        // leaving the corridor is allowed
        if c < 10 {
            let inside = state_at(&env, (2, c));
            assert_eq!(cell_of(&env, env.step(inside, UP, &mut rng).unwrap().s_next), (1, c));
            assert_eq!(cell_of(&env, env.step(inside, DOWN, &mut rng).unwrap().s_next), (3, c));
        }
    }
}

#[test]
fn deep_grid_distractor_ends_episode() {
    let env = make_deep_gridworld().unwrap();
    let mut rng = RngStream::new(0);
    let mut ep = Episode::start(&env, &mut rng);
    ep.step(&env, UP, &mut rng).unwrap();
    ep.step(&env, RIGHT_G, &mut rng).unwrap();
    let t = ep.step(&env, LEFT_G, &mut rng).unwrap();
    assert!(t.terminal && ep.done);
    assert_eq!(t.r, 1.0);
}

#[test]
fn toy_optimal_return() {
    let env = make_env("toy").unwrap();
    let g: f64 = 0.99;
    let expected = g.powi(8) - 0.01 * (0..=8).map(|t| g.powi(t)).sum::<f64>();
    let q = optimal_q(&env.exact, env.gamma, VI_TOL);
    let pi = greedy_policy(&q, &mut RngStream::new(0));
    let got = greedy_return(&env, &pi, 13).unwrap();
    assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
}

#[test]
fn prison_cell_rarely_releases() {
    let env = make_env("prison").unwrap();
    let spec = parse_map(PRISON_MAP).unwrap();
    let p = (0..spec.height)
        .flat_map(|r| (0..spec.width).map(move |c| (r, c)))
        .find(|&(r, c)| spec.cell(r, c) == CellKind::Prison)
        .unwrap();
    let s = state_at(&env, p);
    let mut rng = RngStream::new(9);
    let n = 1_000_000u64;
    let moved = (0..n).filter(|_| env.step(s, LEFT_G, &mut rng).unwrap().s_next != s).count() as u64;
    assert!(within_3_sigma(moved, n, DEFAULT_PRISON_SUCCESS), "{moved}");
}

#[test]
fn wall_optimal_path_is_135_steps() {
    let env = make_env("wall").unwrap();
    let q = optimal_q(&env.exact, env.gamma, VI_TOL);
    let pi = greedy_policy(&q, &mut RngStream::new(0));
    let mut rng = RngStream::new(0);
    let mut ep = Episode::start(&env, &mut rng);
    let mut last = None;
    while !ep.done {
        last = Some(ep.step(&env, pi.0[ep.state], &mut rng).unwrap());
    }
    assert_eq!(ep.t, 135);
    assert_eq!(last.unwrap().r, 10_000.0 - 0.01);
}

#[test]
fn horizon_table() {
    let expect = [
        ("taxi", 33, 66),
        ("deep_grid", 55, 110),
        ("toy", 11, 22),
        ("prison", 11, 22),
        ("wall", 330, 660),
        ("stoch_deep_grid", 55, 110),
        ("stoch_toy", 15, 30),
        ("stoch_prison", 25, 50),
    ];
    for (id, short, long) in expect {
        let env = make_env(id).unwrap();
        assert_eq!((env.horizon_short, env.horizon_long), (short, long), "{id}");
        assert_eq!(env.horizon, short, "{id}");
    }
}

#[test]
fn unknown_ids_are_config_errors() {
    for id in ["nope", "toy:3", "deep_sea:x", "chain:1"] {
        assert!(make_env(id).unwrap_err().is_config(), "{id}");
    }
}

#[test]
fn stochastic_identity_wrap() {
    let env = make_env("prison").unwrap();
    let wrap = StochasticWrapSpec { p_succeed: 1.0, p_stay: 0.0, p_random_adjacent: 0.0 };
    let same = stochasticize(&env, wrap).unwrap();
    assert_eq!(same.exact, env.exact);
    let bad = StochasticWrapSpec { p_succeed: 0.9, p_stay: 0.05, p_random_adjacent: 0.1 };
    assert!(matches!(stochasticize(&env, bad), Err(Error::Config(_))));
}

#[test]
fn stochastic_success_frequency() {
    let env = make_env("stoch_toy").unwrap();
    let s = state_at(&env, (2, 2));
    let target = state_at(&env, (2, 3));
    let mut rng = RngStream::new(4);
    let n = 100_000u64;
    let hit = (0..n).filter(|_| env.step(s, RIGHT_G, &mut rng).unwrap().s_next == target).count() as u64;
    // the target is also one of the random neighbours
    let base = make_env("toy").unwrap();
    let mut nbrs: Vec<usize> = (0..4).map(|a| base.exact.row(s, a).0[0]).filter(|&t| t != s).collect();
    nbrs.sort_unstable();
    nbrs.dedup();
    let p = 0.9 + 0.05 / nbrs.len() as f64;
    assert!(within_3_sigma(hit, n, p), "{hit}");
    assert!((env.exact.prob(s, RIGHT_G, target) - p).abs() < 1e-12);
}

#[test]
fn random_mass_collapses_on_single_neighbour() {
    // (0,0) in a corridor whose only free neighbour is (0,1)
    let spec = parse_map("S .\n# #\n").unwrap();
    let env = make_gridworld(&spec, DEFAULT_PRISON_SUCCESS).unwrap();
    let wrapped = stochasticize(&env, StochasticWrapSpec::default()).unwrap();
    let s = state_at(&wrapped, (0, 0));
    let n = state_at(&wrapped, (0, 1));
    // moving up bumps: target is s itself
    assert!((wrapped.exact.prob(s, UP, n) - 0.05).abs() < 1e-12);
    assert!((wrapped.exact.prob(s, UP, s) - 0.95).abs() < 1e-12);
    assert!((wrapped.exact.prob(s, RIGHT_G, n) - 0.95).abs() < 1e-12);
}

#[test]
fn sampling_matches_exact_rows() {
    let mut rng = RngStream::new(21);
    for id in ["stoch_toy", "stoch_prison", "stoch_deep_grid", "chain:5"] {
        let env = make_env(id).unwrap();
        for k in 0..4 {
            let s = (k * 7 + 3) % env.n_states;
            let a = k % env.n_actions;
            if env.exact.is_terminal(s, a) {
                continue;
            }
            check_row_by_sampling(&env, s, a, 100_000, &mut rng);
        }
    }
    let prison = make_env("prison").unwrap();
    let s = state_at(&prison, (2, 3));
    check_row_by_sampling(&prison, s, UP, 100_000, &mut rng);
}

#[test]
fn rewards_stay_in_declared_bounds() {
    let mut rng = RngStream::new(8);
    for id in ["toy", "prison", "wall", "taxi", "deep_grid", "deep_sea:6", "chain:7", "toy3", "stoch_prison"] {
        let env = make_env(id).unwrap();
        for _ in 0..200 {
            let mut ep = Episode::start(&env, &mut rng);
            let mut steps = 0;
            while !ep.done && steps < 400 {
                let t = ep.step(&env, rng.below(env.n_actions), &mut rng).unwrap();
                assert!(t.r >= env.r_min && t.r <= env.r_max, "{id}: {}", t.r);
                steps += 1;
            }
        }
    }
}

#[test]
fn exact_rows_sum_to_one() {
    for id in ["toy", "prison", "wall", "taxi", "deep_grid", "deep_sea:6", "chain:7", "toy3", "stoch_toy", "stoch_prison", "stoch_deep_grid"] {
        let env = make_env(id).unwrap();
        for s in 0..env.n_states {
            for a in 0..env.n_actions {
                let sum: f64 = env.exact.row(s, a).1.iter().sum();
                assert!((sum - 1.0).abs() <= 1e-12, "{id} ({s},{a})");
            }
        }
    }
}

#[test]
fn map_grammar_examples() {
    let spec = parse_map("S R:1").unwrap();
    assert_eq!((spec.width, spec.height), (2, 1));
    assert_eq!(spec.cell(0, 0), CellKind::Start);
    assert_eq!(spec.cell(0, 1), CellKind::Reward { value: 1.0, terminal: true });
    let spec = parse_map("S P").unwrap();
    assert_eq!(spec.cell(0, 1), CellKind::Prison);
    match parse_map("S . .\n. .\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_map("S Q"), Err(Error::Parse { line: 1, column: 3, .. })));
    assert!(matches!(parse_map("S S"), Err(Error::Parse { .. })));
}

#[test]
fn shipped_maps_round_trip() {
    for text in [TOY_MAP, PRISON_MAP, WALL_MAP, TOY3_MAP] {
        let spec = parse_map(text).unwrap();
        let rendered = render_map(&spec).unwrap();
        assert_eq!(parse_map(&rendered).unwrap(), spec);
        assert_eq!(render_map(&parse_map(&rendered).unwrap()).unwrap(), rendered);
    }
}
