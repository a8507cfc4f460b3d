//! A small backtracking constraint engine: range domains, a trail,
//! a FIFO propagation queue and depth-first branch-and-bound search.

mod constraints;
mod search;
mod store;

pub use constraints::{LessEq, MaxOf, Negation, Sum};
pub use search::{
    Brancher, Decision, Objective, SearchLimits, SearchStats, SearchStatus, Sense,
};
pub use store::{BoolVar, IntDomain, IntVar, Mark, PropId, Store};

use crate::error::PropResult;

/// A variable a propagator wants to be woken up on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Watch {
    Int(IntVar),
    Bool(BoolVar),
}

impl From<IntVar> for Watch {
    fn from(v: IntVar) -> Self {
        Watch::Int(v)
    }
}

impl From<BoolVar> for Watch {
    fn from(b: BoolVar) -> Self {
        Watch::Bool(b)
    }
}

pub trait Propagator {
    /// Filter the domains. Any bound change re-enqueues every propagator
    /// watching the modified variable, including this one.
    fn propagate(&mut self, store: &mut Store) -> PropResult;

    /// Variables whose modification should schedule this propagator.
    fn watches(&self) -> Vec<Watch>;

    fn name(&self) -> &'static str {
        "propagator"
    }
}

/// Outcome of running the queue to a fixpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixpoint {
    Consistent,
    Failed,
}

#[derive(Default)]
pub struct Solver {
    store: Store,
    propagators: Vec<Box<dyn Propagator>>,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver")
            .field("ints", &self.store.num_ints())
            .field("bools", &self.store.num_bools())
            .field("propagators", &self.propagators.len())
            .finish()
    }
}

impl Solver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut Store {
        &mut self.store
    }

    /// Register a propagator, subscribe it to its watched variables and
    /// schedule it for the next fixpoint.
    pub fn post(&mut self, propagator: Box<dyn Propagator>) -> PropId {
        let id = self.store.register_propagator();
        for w in propagator.watches() {
            match w {
                Watch::Int(v) => self.store.watch_int(v, id),
                Watch::Bool(b) => self.store.watch_bool(b, id),
            }
        }
        self.propagators.push(propagator);
        self.store.enqueue(id);
        id
    }

    pub fn num_propagators(&self) -> usize {
        self.propagators.len()
    }

    /// Run a single propagator once, outside the queue. Whatever it
    /// schedules stays queued for the next fixpoint.
    pub fn run_propagator(&mut self, id: PropId) -> PropResult {
        self.propagators[id.0 as usize].propagate(&mut self.store)
    }

    pub fn propagate_to_fixpoint(&mut self) -> Fixpoint {
        while let Some(p) = self.store.dequeue() {
            if self.propagators[p.0 as usize]
                .propagate(&mut self.store)
                .is_err()
            {
                self.store.clear_queue();
                return Fixpoint::Failed;
            }
        }
        Fixpoint::Consistent
    }
}
