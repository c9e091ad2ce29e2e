//! Shared vocabulary for the bounded searches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Outcome of a bounded exhaustive search.
///
/// `Infeasible` means the whole space was explored; `Exhausted` means the
/// node budget ran out first. The two must never be conflated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Search<T> {
    Found(T),
    Infeasible,
    Exhausted,
}

impl<T> Search<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Search::Found(_))
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Search<U> {
        match self {
            Search::Found(t) => Search::Found(f(t)),
            Search::Infeasible => Search::Infeasible,
            Search::Exhausted => Search::Exhausted,
        }
    }
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Name of the generator behind [`rng`], recorded in output metadata.
pub const RNG_NAME: &str = "chacha8";

/// Seed and node budget for every search a construction may run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    pub budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { seed: DEFAULT_SEED, budget: DEFAULT_BUDGET }
    }
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
