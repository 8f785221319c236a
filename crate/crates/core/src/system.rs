use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};

/// One queue of the polling system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueSpec {
    pub arrival_rate: f64,
    pub service: Distribution,
    pub visit: Distribution,
    /// Switch-over time from this queue to the next one in the cycle.
    pub switch: Distribution,
    /// Travel time from the central point to this queue.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approach: Option<Distribution>,
    /// Travel time from this queue back to the central point.
    #[serde(default, rename = "return", skip_serializing_if = "Option::is_none")]
    pub return_trip: Option<Distribution>,
}

impl QueueSpec {
    pub fn new(arrival_rate: f64, service: Distribution, visit: Distribution, switch: Distribution) -> Self {
        Self {
            arrival_rate,
            service,
            visit,
            switch,
            approach: None,
            return_trip: None,
        }
    }

    pub fn with_central_point(mut self, approach: Distribution, return_trip: Distribution) -> Self {
        self.approach = Some(approach);
        self.return_trip = Some(return_trip);
        self
    }

    pub fn has_central_point(&self) -> bool {
        self.approach.is_some() && self.return_trip.is_some()
    }

    fn validate(&self, number: usize) -> Result<()> {
        let fail = |reason: String| Err(Error::Model { queue: number, reason });
        if !(self.arrival_rate.is_finite() && self.arrival_rate >= 0.0) {
            return fail(format!("arrival rate must be finite and >= 0, got {}", self.arrival_rate));
        }
        if self.service.mean() <= 0.0 {
            return fail("service law has all its mass at 0".into());
        }
        if self.visit.mean() <= 0.0 {
            return fail("visit law has all its mass at 0".into());
        }
        if self.approach.is_some() != self.return_trip.is_some() {
            return fail("central-point approach and return laws must be given together".into());
        }
        Ok(())
    }
}

/// Queues in their canonical cyclic visiting order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct SystemSpec {
    queues: Vec<QueueSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    queues: Vec<QueueSpec>,
}

impl TryFrom<RawSystem> for SystemSpec {
    type Error = Error;
    fn try_from(raw: RawSystem) -> Result<Self> {
        Self::new(raw.queues)
    }
}

impl From<SystemSpec> for RawSystem {
    fn from(s: SystemSpec) -> Self {
        RawSystem { queues: s.queues }
    }
}

impl SystemSpec {
    pub fn new(queues: Vec<QueueSpec>) -> Result<Self> {
        if queues.len() < 2 {
            return Err(Error::Domain(format!(
                "a polling system needs N >= 2 queues, got {}",
                queues.len()
            )));
        }
        for (i, q) in queues.iter().enumerate() {
            q.validate(i + 1)?;
        }
        let central = queues[0].has_central_point();
        if queues.iter().any(|q| q.has_central_point() != central) {
            return Err(Error::Domain(
                "central-point laws must be present on every queue or on none".into(),
            ));
        }
        Ok(Self { queues })
    }

    pub fn queues(&self) -> &[QueueSpec] {
        &self.queues
    }

    pub fn queue(&self, i: usize) -> &QueueSpec {
        &self.queues[i]
    }

    pub fn len(&self) -> usize {
        self.queues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queues.is_empty()
    }

    pub fn has_central_point(&self) -> bool {
        self.queues[0].has_central_point()
    }

    pub fn arrival_rates(&self) -> Vec<f64> {
        self.queues.iter().map(|q| q.arrival_rate).collect()
    }

    /// The same queues visited in `order` (a permutation of `0..N`).
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len() || order.iter().any(|&i| i >= self.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::Domain(format!("{order:?} is not a permutation of the queues")));
        }
        Self::new(order.iter().map(|&i| self.queues[i].clone()).collect())
    }

    /// Replaces queue `i`.
    pub fn with_queue(&self, i: usize, queue: QueueSpec) -> Result<Self> {
        let mut queues = self.queues.clone();
        queues[i] = queue;
        Self::new(queues)
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::Domain(format!("queue index {i} out of range for N = {}", self.len())))
        }
    }
}
