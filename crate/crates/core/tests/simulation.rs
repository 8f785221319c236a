mod common;

use common::*;
use mginf_polling::analytic::{polling_means, sojourn_phases};
use mginf_polling::optimizer::{optimal_order, Objective, TourState};
use mginf_polling::simulator::{run, single_cycle_throughput, SimConfig};
use mginf_polling::{Distribution, QuadratureConfig, QueueSpec, SystemSpec};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn mixed() -> SystemSpec {
    SystemSpec::new(vec![
        QueueSpec::new(0.6, Distribution::erlang(3, 4.0).unwrap(), det(1.2), exp(5.0)),
        QueueSpec::new(
            0.4,
            Distribution::hyperexponential(0.3, 0.8, 5.0).unwrap(),
            Distribution::mixed_erlang(0.4, 3, 2.0).unwrap(),
            det(0.3),
        ),
        QueueSpec::new(0.9, Distribution::discrete(vec![(0.2, 0.5), (0.9, 0.5)]).unwrap(), exp(1.3), det(0.1)),
    ])
    .unwrap()
}

fn sim(cycles: u64) -> SimConfig {
    SimConfig {
        measured_cycles: cycles,
        master_seed: 17,
        ..SimConfig::default()
    }
}

#[test]
fn completion_fractions_and_phases_match() {
    let sys = mixed();
    let r = run(&sys, &sim(30_000)).unwrap();
    let m = polling_means(&sys, &cfg()).unwrap();
    for i in 0..sys.len() {
        let p = r.completion_fraction(i);
        assert!(p.within(m.derived[i].completion_probability, 3.0), "p_{i}: {p:?}");
        let ph = sojourn_phases(&sys, i, &cfg()).unwrap();
        for (k, t) in [ph.served_on_arrival, ph.missed_on_arrival, ph.arrived_elsewhere].iter().enumerate() {
            let share = r.sojourn_phase_share(i, k);
            let mean = r.sojourn_phase_mean(i, k);
            assert!(share.within(t.probability, 3.0), "queue {i} phase {k} share {share:?} vs {}", t.probability);
            assert!(mean.within(t.conditional_mean, 3.0), "queue {i} phase {k} mean {mean:?} vs {}", t.conditional_mean);
        }
    }
}

#[test]
fn visit_end_means_follow_polling_means() {
    let sys = mixed();
    let r = run(&sys, &sim(30_000)).unwrap();
    let m = polling_means(&sys, &cfg()).unwrap();
    for i in 0..sys.len() {
        for j in 0..sys.len() {
            let x = r.polling_mean(i, j);
            let y = r.visit_end_mean(i, j);
            assert!(x.within(m.at_polling[i][j], 3.0), "X {i} {j}: {x:?} vs {}", m.at_polling[i][j]);
            assert!(y.within(m.at_visit_end[i][j], 3.0), "Y {i} {j}: {y:?} vs {}", m.at_visit_end[i][j]);
            if i != j {
                let gap = y.mean - x.mean;
                let want = sys.queue(j).arrival_rate * sys.queue(i).visit.mean();
                assert!((gap - want).abs() < 3.0 * (x.stderr + y.stderr), "{i} {j}: {gap} vs {want}");
            }
        }
    }
}

#[test]
fn longer_warmup_does_not_move_means() {
    let sys = base_system();
    let short = run(&sys, &sim(30_000)).unwrap();
    let long = run(&sys, &SimConfig { warmup_cycles: 2_000, master_seed: 18, ..sim(30_000) }).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let (a, b) = (short.polling_mean(i, j), long.polling_mean(i, j));
            let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
            assert!((a.mean - b.mean).abs() < 3.5 * se, "{i} {j}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn reversed_order_difference_has_index_sign() {
    let sys = SystemSpec::new(vec![
        QueueSpec::new(2.0, exp(2.0), exp(0.8), det(0.3)),
        QueueSpec::new(0.3, exp(1.0), exp(1.5), det(0.3)),
        QueueSpec::new(1.0, exp(1.5), det(1.0), det(0.3)),
    ])
    .unwrap();
    let state = TourState::serial(vec![1, 1, 1]);
    let best = optimal_order(&sys, &state, Objective::Max, &cfg()).unwrap().order;
    let mut worst = best.clone();
    worst.reverse();
    let n = 20_000;
    let a = single_cycle_throughput(&sys, &state, &best, n, 9).unwrap();
    let b = single_cycle_throughput(&sys, &state, &worst, n, 9).unwrap();
    assert!(a.mean > b.mean, "{a:?} vs {b:?}");
}

#[test]
fn empty_system_has_no_samples() {
    let sys = SystemSpec::new(vec![
        QueueSpec::new(0.0, exp(1.0), exp(1.0), det(0.25)),
        QueueSpec::new(0.0, exp(1.5), exp(1.5), det(0.25)),
    ])
    .unwrap();
    let r = run(&sys, &sim(1_000)).unwrap();
    assert_eq!(r.polling_mean(1, 0).mean, 0.0);
    assert_eq!(r.throughput().mean, 0.0);
    assert!(r.sojourn_mean(0).mean.is_nan());
    let csv = r.to_csv();
    assert!(csv.contains("all,S_1,NaN,NaN"));
}
