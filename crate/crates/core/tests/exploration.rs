use wexplore::exploration::{
    ensemble_act, ensemble_init, pseudocount, select_eps_greedy, select_random, select_ucb1, select_w_ucb,
    w_count_update, w_ucb_update, Ensemble, EnsembleConfig, ExplorationConfig, TableChoice, VisitCounter, WTable,
};
use wexplore::learning::{InitMode, LearnerConfig, ValueTable};
use wexplore::{RngStream, Transition};

fn cfg(gamma_w: f64) -> ExplorationConfig {
    ExplorationConfig::new(1.0, 0.99, gamma_w).unwrap()
}

fn three_sigma(hits: usize, n: usize, p: f64) -> bool {
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    (hits as f64 - n as f64 * p).abs() <= 3.0 * sd
}

#[test]
fn random_selection_is_uniform_and_seeded() {
    let mut rng = RngStream::new(11);
    let mut freq = [0usize; 4];
    for _ in 0..10_000 {
        freq[select_random(4, &mut rng)] += 1;
    }
    assert!(freq.iter().all(|&f| (f as f64 / 1e4 - 0.25).abs() < 0.01), "{freq:?}");
    assert_eq!(select_random(1, &mut rng), 0);
    let (mut a, mut b) = (RngStream::new(3), RngStream::new(3));
    let xs: Vec<usize> = (0..100).map(|_| select_random(5, &mut a)).collect();
    let ys: Vec<usize> = (0..100).map(|_| select_random(5, &mut b)).collect();
    assert_eq!(xs, ys);
}

#[test]
fn eps_greedy_half() {
    let q = ValueTable::from_vec(1, 2, vec![1.0, 0.0]).unwrap();
    let mut rng = RngStream::new(12);
    let zeros = (0..10_000).filter(|_| select_eps_greedy(&q, 0, 0.5, &mut rng) == 0).count();
    assert!((zeros as f64 / 1e4 - 0.75).abs() < 0.02);
}

#[test]
fn ucb1_examples() {
    let mut c = cfg(0.99);
    let q = ValueTable::zeros(1, 2);
    let counter = VisitCounter::from_counts(1, 2, vec![1, 0]).unwrap();
    let mut rng = RngStream::new(0);
    assert_eq!(select_ucb1(&q, &counter, 0, &c, &mut rng), 1);

    // equal Q and counts: a fair tie
    let even = VisitCounter::from_counts(1, 3, vec![2, 2, 2]).unwrap();
    let q3 = ValueTable::zeros(1, 3);
    let mut freq = [0usize; 3];
    for _ in 0..9_000 {
        freq[select_ucb1(&q3, &even, 0, &c, &mut rng)] += 1;
    }
    assert!(freq.iter().all(|&f| three_sigma(f, 9_000, 1.0 / 3.0)), "{freq:?}");

    // a vanishing κ leaves the greedy choice
    c.kappa = 1e-300;
    let qg = ValueTable::from_vec(1, 2, vec![0.0, 0.5]).unwrap();
    let skew = VisitCounter::from_counts(1, 2, vec![1, 50]).unwrap();
    assert_eq!(select_ucb1(&qg, &skew, 0, &c, &mut rng), 1);
}

#[test]
fn w_ucb_prefers_larger_w_under_flat_q() {
    let c = cfg(0.9);
    let q = ValueTable::filled(1, 3, 4.0);
    let w = ValueTable::from_vec(1, 3, vec![1.0, 7.0, 2.0]).unwrap();
    assert_eq!(select_w_ucb(&q, &w, 0, &c, &mut RngStream::new(0)), 1);
}

/// One state, one action looping on itself with a fixed count n.
fn self_loop(n: u64) -> (VisitCounter, Transition) {
    (VisitCounter::from_counts(1, 1, vec![n]).unwrap(), Transition { s: 0, a: 0, r: 0.0, s_next: 0, terminal: false })
}

#[test]
fn w_ucb_self_loop_limit() {
    // uniform counts across two actions, both looping on the state
    let c = cfg(0.9);
    let counter = VisitCounter::from_counts(1, 2, vec![3, 3]).unwrap();
    let mut w = WTable::ucb(1, 2, &c).unwrap().table;
    for _ in 0..2_000 {
        for a in 0..2 {
            w_ucb_update(&mut w, &Transition { s: 0, a, r: 0.0, s_next: 0, terminal: false }, &counter, 0.5, &c);
        }
    }
    let limit = (2.0 * 7f64.ln() / 3.0).sqrt() / (1.0 - 0.9);
    assert!((w.get(0, 0) - limit).abs() < 1e-9 && (w.get(0, 1) - limit).abs() < 1e-9);
}

#[test]
fn w_count_self_loop_limit() {
    let (counter, t) = self_loop(4);
    let mut w = WTable::count(1, 1).table;
    for _ in 0..2_000 {
        w_count_update(&mut w, &t, &counter, 0.5, 0.9);
    }
    assert!((w.get(0, 0) - 40.0).abs() < 1e-9);
    assert!((pseudocount(&w, 0, 0, 0.9) - 4.0).abs() < 1e-10);

    // nothing counted, nothing accumulated
    let (zero, t) = self_loop(0);
    let mut w = WTable::count(1, 1).table;
    for _ in 0..10 {
        w_count_update(&mut w, &t, &zero, 0.5, 0.9);
    }
    assert_eq!(w.get(0, 0), 0.0);
}

fn learner() -> LearnerConfig {
    LearnerConfig::new(0.5, 0.99, InitMode::Zero, 1.0).unwrap()
}

#[test]
fn ensemble_noise_statistics() {
    let mut rng = RngStream::new(4);
    let c = EnsembleConfig::bootstrap(TableChoice::PerEpisode, 0.0);
    let tables = ensemble_init(&c, &learner(), 1_000, 10, &mut rng).unwrap();
    assert_eq!(tables.len(), 10);
    for i in 0..10 {
        for j in i + 1..10 {
            assert_ne!(tables[i], tables[j]);
        }
    }
    let all: Vec<f64> = tables.iter().flat_map(|t| t.as_slice().iter().copied()).collect();
    assert_eq!(all.len(), 100_000);
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    assert!(mean.abs() < 3.0 / (all.len() as f64).sqrt(), "{mean}");
}

#[test]
fn ensemble_table_choice() {
    let mut rng = RngStream::new(5);
    let tables = (0..10).map(|b| ValueTable::filled(2, 2, b as f64)).collect::<Vec<_>>();

    let mut single = Ensemble { tables: vec![ValueTable::zeros(2, 2)], choice: TableChoice::PerStep, current: 0 };
    for _ in 0..100 {
        ensemble_act(&mut single, false, 0, 0.1, &mut rng);
        assert_eq!(single.current, 0);
    }

    let mut ep = Ensemble { tables: tables.clone(), choice: TableChoice::PerEpisode, current: 0 };
    ensemble_act(&mut ep, true, 0, 0.1, &mut rng);
    let held = ep.current;
    for _ in 0..200 {
        ensemble_act(&mut ep, false, 1, 0.1, &mut rng);
        assert_eq!(ep.current, held);
    }

    let mut step = Ensemble { tables, choice: TableChoice::PerStep, current: 0 };
    let mut freq = [0usize; 10];
    for _ in 0..10_000 {
        ensemble_act(&mut step, false, 0, 0.0, &mut rng);
        freq[step.current] += 1;
    }
    assert!(freq.iter().all(|&f| three_sigma(f, 10_000, 0.1)), "{freq:?}");
}
