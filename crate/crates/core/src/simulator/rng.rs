//! Counter-based random streams.
//!
//! ChaCha is a counter-mode generator with a 64-bit stream selector, so every
//! (replication, queue, purpose) triple gets its own stream derived from one
//! master seed. No stream depends on how many others were consumed, which
//! keeps results identical whatever the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Arrivals = 0,
    Service = 1,
    Visit = 2,
    Switch = 3,
    Approach = 4,
    Return = 5,
}

pub fn stream(master_seed: u64, replication: u64, queue: usize, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    let id = (replication << 24) | ((queue as u64 & 0xFFFF) << 8) | purpose as u64;
    rng.set_stream(id);
    rng
}
