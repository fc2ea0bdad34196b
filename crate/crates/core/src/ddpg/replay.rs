//! Bounded FIFO experience replay with uniform sampling.

use rand::seq::index;
use rand::Rng;

use super::networks::STATE_DIM;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: [f64; STATE_DIM],
    pub action: f64,
    pub reward: f64,
    pub next_state: [f64; STATE_DIM],
}

impl Transition {
    pub fn is_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.action)
            && self.reward.is_finite()
            && self.state.iter().chain(&self.next_state).all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    items: Vec<Transition>,
    capacity: usize,
    inserted: u64,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self { items: Vec::with_capacity(capacity.min(1 << 16)), capacity, inserted: 0 }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Total transitions ever pushed.
    pub fn inserted(&self) -> u64 {
        self.inserted
    }

    /// Append, overwriting the oldest entry once full.
    pub fn push(&mut self, t: Transition) {
        debug_assert!(t.is_valid(), "invalid transition {t:?}");
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            let slot = (self.inserted % self.capacity as u64) as usize;
            self.items[slot] = t;
        }
        self.inserted += 1;
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }

    /// Distinct uniformly chosen indices, or `None` below `batch` entries.
    pub fn sample_indices<R: Rng + ?Sized>(&self, batch: usize, rng: &mut R) -> Option<Vec<usize>> {
        if self.items.len() < batch {
            return None;
        }
        Some(index::sample(rng, self.items.len(), batch).into_vec())
    }

    pub fn sample<R: Rng + ?Sized>(&self, batch: usize, rng: &mut R) -> Option<Vec<&Transition>> {
        self.sample_indices(batch, rng).map(|idx| idx.into_iter().map(|i| &self.items[i]).collect())
    }
}
