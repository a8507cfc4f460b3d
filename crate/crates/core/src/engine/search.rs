use std::time::{Duration, Instant};

use super::{Fixpoint, IntVar, Mark, Solver, Store};
use crate::error::PropResult;

/// One alternative at a search node. Applied to the store after the node
/// state has been restored; the fixpoint runs afterwards.
pub type Decision = Box<dyn FnOnce(&mut Store) -> PropResult>;

/// Node expansion. An empty list means every decision variable is fixed
/// and the current node is a solution.
pub trait Brancher {
    fn branch(&mut self, store: &Store) -> Vec<Decision>;
}

impl<F> Brancher for F
where
    F: FnMut(&Store) -> Vec<Decision>,
{
    fn branch(&mut self, store: &Store) -> Vec<Decision> {
        self(store)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Objective {
    pub var: IntVar,
    pub sense: Sense,
}

impl Objective {
    pub fn minimize(var: IntVar) -> Self {
        Self { var, sense: Sense::Minimize }
    }

    pub fn maximize(var: IntVar) -> Self {
        Self { var, sense: Sense::Maximize }
    }

    /// Strict improvement over `best`, the branch-and-bound cut.
    fn tighten(&self, store: &mut Store, best: i64) -> PropResult {
        match self.sense {
            Sense::Minimize => store.set_max(self.var, best - 1).map(|_| ()),
            Sense::Maximize => store.set_min(self.var, best + 1).map(|_| ()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchLimits {
    pub time_limit: Option<Duration>,
    pub stop_at_first: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    Optimal,
    Feasible,
    Infeasible,
    Timeout,
}

impl SearchStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchStatus::Optimal => "optimal",
            SearchStatus::Feasible => "feasible",
            SearchStatus::Infeasible => "infeasible",
            SearchStatus::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStats {
    /// Nodes whose state was propagated, the root included.
    pub nodes: u64,
    /// Alternatives whose propagation failed.
    pub backtracks: u64,
    pub solutions: u64,
    pub best_objective: Option<i64>,
    pub status: SearchStatus,
    pub elapsed: Duration,
}

struct Frame {
    mark: Mark,
    alternatives: std::vec::IntoIter<Decision>,
}

impl Solver {
    /// Depth-first search. With an objective, every solution installs a
    /// strict bound that applies to all nodes explored afterwards.
    ///
    /// `on_solution` sees the store at each solution, before any undo.
    pub fn solve(
        &mut self,
        brancher: &mut dyn Brancher,
        objective: Option<Objective>,
        limits: SearchLimits,
        on_solution: &mut dyn FnMut(&Store),
    ) -> SearchStats {
        let started = Instant::now();
        let mut nodes = 1u64;
        let mut backtracks = 0u64;
        let mut solutions = 0u64;
        let mut best: Option<i64> = None;
        let mut timed_out = false;
        let mut stopped = false;

        let out_of_time = |started: &Instant| {
            limits
                .time_limit
                .is_some_and(|limit| started.elapsed() >= limit)
        };

        let root_ok = self.propagate_to_fixpoint() == Fixpoint::Consistent;
        let mut stack: Vec<Frame> = Vec::new();

        if root_ok {
            'node: loop {
                if out_of_time(&started) {
                    timed_out = true;
                    break;
                }
                let alternatives = brancher.branch(self.store());
                if alternatives.is_empty() {
                    solutions += 1;
                    if let Some(obj) = objective {
                        // fixed by the time the brancher has nothing left
                        best = Some(self.store().min(obj.var));
                    }
                    on_solution(self.store());
                    if limits.stop_at_first {
                        stopped = true;
                        break;
                    }
                } else {
                    stack.push(Frame {
                        mark: self.store().save(),
                        alternatives: alternatives.into_iter(),
                    });
                }

                // Find the next alternative that survives propagation.
                loop {
                    let Some(frame) = stack.last_mut() else {
                        break 'node;
                    };
                    let mark = frame.mark;
                    let Some(decision) = frame.alternatives.next() else {
                        self.store_mut().restore(mark);
                        stack.pop();
                        continue;
                    };
                    self.store_mut().restore(mark);
                    if out_of_time(&started) {
                        timed_out = true;
                        break 'node;
                    }
                    nodes += 1;
                    let applied = match (objective, best) {
                        (Some(obj), Some(b)) => obj.tighten(self.store_mut(), b),
                        _ => Ok(()),
                    }
                    .and_then(|_| decision(self.store_mut()));
                    if applied.is_ok() && self.propagate_to_fixpoint() == Fixpoint::Consistent {
                        continue 'node;
                    }
                    self.store_mut().clear_queue();
                    backtracks += 1;
                }
            }
        }

        // leave the store at the root state
        if let Some(frame) = stack.first() {
            let mark = frame.mark;
            self.store_mut().restore(mark);
        }

        let status = if timed_out {
            if solutions > 0 {
                SearchStatus::Feasible
            } else {
                SearchStatus::Timeout
            }
        } else if solutions == 0 {
            SearchStatus::Infeasible
        } else if stopped || objective.is_none() {
            SearchStatus::Feasible
        } else {
            SearchStatus::Optimal
        };

        SearchStats {
            nodes,
            backtracks,
            solutions,
            best_objective: best,
            status,
            elapsed: started.elapsed(),
        }
    }
}
