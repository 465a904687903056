//! Experience storage: global ring buffer, local on-policy buffer and the
//! initial-state buffer, with the merge/reset protocol of the training loop.

use crate::error::{CoreError, Result};
use crate::rng::Rng;
use alloc::collections::VecDeque;
use alloc::vec::Vec;

/// One (s, a, s', r, done) experience. Rewards must be strictly positive
/// because the learner consumes log r.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionRecord {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub next_state: Vec<f64>,
    pub reward: f64,
    pub terminal: bool,
}

impl TransitionRecord {
    pub fn validate(&self) -> Result<()> {
        if !(self.reward > 0.0) || !self.reward.is_finite() {
            return Err(CoreError::NonPositiveReward(self.reward));
        }
        let finite = self.state.iter().chain(&self.action).chain(&self.next_state).all(|x| x.is_finite());
        if !finite {
            return Err(CoreError::NonFinite("TransitionRecord"));
        }
        Ok(())
    }

    /// Discriminator feature vector: raw concatenation [s; a; s'].
    pub fn features(&self) -> Vec<f64> {
        let mut f = Vec::with_capacity(self.state.len() + self.action.len() + self.next_state.len());
        f.extend_from_slice(&self.state);
        f.extend_from_slice(&self.action);
        f.extend_from_slice(&self.next_state);
        f
    }
}

/// Fixed-capacity FIFO over transition records.
#[derive(Clone, Debug)]
pub struct RingBuffer {
    data: VecDeque<TransitionRecord>,
    capacity: usize,
}

impl RingBuffer {
    pub fn new(capacity: usize) -> Self {
        RingBuffer { data: VecDeque::new(), capacity }
    }

    pub fn push(&mut self, record: TransitionRecord) -> Result<()> {
        record.validate()?;
        if self.data.len() == self.capacity {
            self.data.pop_front();
        }
        self.data.push_back(record);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, idx: usize) -> &TransitionRecord {
        &self.data[idx]
    }

    /// Uniform sample with replacement.
    pub fn sample(&self, rng: &mut Rng) -> Result<&TransitionRecord> {
        if self.data.is_empty() {
            return Err(CoreError::EmptyBuffer("ring buffer"));
        }
        Ok(&self.data[rng.index(self.data.len())])
    }
}

/// Global buffer D_G, local buffer D_L and initial-state buffer D_0.
#[derive(Clone, Debug)]
pub struct BufferSet {
    pub global: RingBuffer,
    pub local: Vec<TransitionRecord>,
    local_capacity: usize,
    pub initial_states: Vec<Vec<f64>>,
}

impl BufferSet {
    pub fn new(global_capacity: usize, local_capacity: usize) -> Self {
        BufferSet {
            global: RingBuffer::new(global_capacity),
            local: Vec::with_capacity(local_capacity),
            local_capacity,
            initial_states: Vec::new(),
        }
    }

    pub fn local_capacity(&self) -> usize {
        self.local_capacity
    }

    /// Adds a fresh on-policy record to D_L; returns true when D_L is full
    /// and a discriminator/agent refresh is due.
    pub fn push_local(&mut self, record: TransitionRecord) -> Result<bool> {
        record.validate()?;
        debug_assert!(self.local.len() < self.local_capacity);
        self.local.push(record);
        Ok(self.local.len() == self.local_capacity)
    }

    /// Adds a historical (e.g. source-domain) record directly to D_G.
    pub fn push_global(&mut self, record: TransitionRecord) -> Result<()> {
        self.global.push(record)
    }

    pub fn push_initial_state(&mut self, s0: Vec<f64>) {
        self.initial_states.push(s0);
    }

    /// D_G <- D_G u D_L, then D_L <- empty. Returns how many records moved.
    pub fn merge_local_into_global(&mut self) -> Result<usize> {
        let n = self.local.len();
        for record in self.local.drain(..) {
            if self.global.data.len() == self.global.capacity {
                self.global.data.pop_front();
            }
            self.global.data.push_back(record);
        }
        Ok(n)
    }

    /// Uniform initial-state sample with replacement.
    pub fn sample_initial_state(&self, rng: &mut Rng) -> Result<&Vec<f64>> {
        if self.initial_states.is_empty() {
            return Err(CoreError::EmptyBuffer("initial-state buffer"));
        }
        Ok(&self.initial_states[rng.index(self.initial_states.len())])
    }
}
