#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;

use mginf_polling::distributions::fit_two_moments;
use mginf_polling::{Distribution, QueueSpec, SystemSpec};
use rand::Rng;

pub fn exp(rate: f64) -> Distribution {
    Distribution::exponential(rate).unwrap()
}

pub fn det(value: f64) -> Distribution {
    Distribution::deterministic(value).unwrap()
}

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

/// Writes straight to stdout so the line shows even when output is captured.
pub fn report(line: &str) {
    let out = std::io::stdout();
    let mut lock = out.lock();
    let _ = writeln!(lock, "{line}");
    let _ = lock.flush();
}

pub fn base_system() -> SystemSpec {
    SystemSpec::new(vec![
        QueueSpec::new(0.8, exp(1.0), exp(1.0), det(0.25)),
        QueueSpec::new(0.5, exp(1.5), exp(1.5), det(0.25)),
    ])
    .unwrap()
}

/// A law with a mean drawn from `means` and a random shape.
pub fn random_law<R: Rng>(rng: &mut R, means: std::ops::Range<f64>) -> Distribution {
    let mean = rng.random_range(means);
    match rng.random_range(0..5) {
        0 => exp(1.0 / mean),
        1 => det(mean),
        2 => {
            let k = rng.random_range(2..5u32);
            Distribution::erlang(k, k as f64 / mean).unwrap()
        }
        3 => fit_two_moments(mean, rng.random_range(0.2..0.95)).unwrap(),
        _ => fit_two_moments(mean, rng.random_range(1.2..4.0)).unwrap(),
    }
}

/// `n` queues with random rates and laws; central-point laws when asked.
pub fn random_system<R: Rng>(rng: &mut R, n: usize, central: bool) -> SystemSpec {
    let queues = (0..n)
        .map(|_| {
            let lambda = rng.random_range(0.1..2.0);
            let service = random_law(rng, 0.2..2.0);
            let visit = random_law(rng, 0.2..2.0);
            let switch = random_law(rng, 0.05..1.0);
            let q = QueueSpec::new(lambda, service, visit, switch);
            if central {
                let a = random_law(rng, 0.05..1.0);
                let r = random_law(rng, 0.05..1.0);
                q.with_central_point(a, r)
            } else {
                q
            }
        })
        .collect();
    SystemSpec::new(queues).unwrap()
}

/// `n` queues whose service and visit times are exponential.
pub fn random_exponential_system<R: Rng>(rng: &mut R, n: usize) -> SystemSpec {
    let queues = (0..n)
        .map(|_| {
            let switch = if rng.random_bool(0.5) {
                det(rng.random_range(0.05..1.0))
            } else {
                exp(1.0 / rng.random_range(0.05..1.0))
            };
            QueueSpec::new(
                rng.random_range(0.1..2.0),
                exp(rng.random_range(0.3..3.0)),
                exp(rng.random_range(0.3..3.0)),
                switch,
            )
        })
        .collect();
    SystemSpec::new(queues).unwrap()
}
