//! Conditional time-interval variables `<start, duration, end, presence>`.
//!
//! Tightening an attribute of an optional interval past its other bound does
//! not fail: the interval becomes absent and the bound is discarded. Only
//! required intervals raise [`Inconsistency`].

use crate::engine::{BoolVar, IntVar, Propagator, Solver, Store, Watch};
use crate::error::{ModelError, PropResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntervalVar {
    pub start: IntVar,
    pub duration: IntVar,
    pub end: IntVar,
    pub presence: BoolVar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attr {
    Start,
    Duration,
    End,
}

/// Execution status, the three blocks of the task partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optional,
    Present,
    Absent,
}

impl Status {
    pub fn from_bool(value: Option<bool>) -> Self {
        match value {
            None => Status::Optional,
            Some(true) => Status::Present,
            Some(false) => Status::Absent,
        }
    }
}

impl IntervalVar {
    /// Create the four variables and attach the `s + d = e` propagator.
    /// Incompatible ranges are only detected at the next fixpoint.
    pub fn new(
        solver: &mut Solver,
        start: (i64, i64),
        duration: (i64, i64),
        end: (i64, i64),
        optional: bool,
    ) -> Result<Self, ModelError> {
        if duration.0 < 0 {
            return Err(ModelError::NegativeDuration(duration.0));
        }
        let store = solver.store_mut();
        let start = store.new_int(start.0, start.1)?;
        let duration = store.new_int(duration.0, duration.1)?;
        let end = store.new_int(end.0, end.1)?;
        let presence = if optional { store.new_bool() } else { store.new_bool_fixed(true) };
        let iv = IntervalVar { start, duration, end, presence };
        iv.attach(solver);
        Ok(iv)
    }

    /// Assemble an interval from existing variables (shared starts and
    /// statuses for step leaves) and attach its link propagator.
    pub fn from_parts(
        solver: &mut Solver,
        start: IntVar,
        duration: IntVar,
        end: IntVar,
        presence: BoolVar,
    ) -> Self {
        let iv = IntervalVar { start, duration, end, presence };
        iv.attach(solver);
        iv
    }

    fn attach(&self, solver: &mut Solver) {
        solver.post(Box::new(IntervalLink { iv: *self }));
    }

    pub fn var(&self, attr: Attr) -> IntVar {
        match attr {
            Attr::Start => self.start,
            Attr::Duration => self.duration,
            Attr::End => self.end,
        }
    }

    pub fn status(&self, store: &Store) -> Status {
        Status::from_bool(store.bool_value(self.presence))
    }

    pub fn is_absent(&self, store: &Store) -> bool {
        store.bool_value(self.presence) == Some(false)
    }

    pub fn is_present(&self, store: &Store) -> bool {
        store.bool_value(self.presence) == Some(true)
    }

    /// A fixed part `[s_max, e_min)` exists.
    pub fn has_fixed_part(&self, store: &Store) -> bool {
        store.max(self.start) < store.min(self.end)
    }

    pub fn set_min(&self, store: &mut Store, attr: Attr, bound: i64) -> PropResult<bool> {
        tighten_min(store, self.presence, self.var(attr), bound)
    }

    pub fn set_max(&self, store: &mut Store, attr: Attr, bound: i64) -> PropResult<bool> {
        tighten_max(store, self.presence, self.var(attr), bound)
    }

    pub fn set_present(&self, store: &mut Store) -> PropResult<bool> {
        store.set_bool(self.presence, true)
    }

    pub fn set_absent(&self, store: &mut Store) -> PropResult<bool> {
        store.set_bool(self.presence, false)
    }

    /// Bound consistency of `s + d = e` and `d >= 0`, iterated until stable.
    pub fn enforce_link(&self, store: &mut Store) -> PropResult {
        loop {
            if self.is_absent(store) {
                return Ok(());
            }
            let (s, d, e) = (store.domain(self.start), store.domain(self.duration), store.domain(self.end));
            let mut changed = false;
            changed |= self.set_min(store, Attr::Duration, 0)?;
            changed |= self.set_min(store, Attr::End, s.lo + d.lo)?;
            changed |= self.set_max(store, Attr::End, s.hi + d.hi)?;
            changed |= self.set_min(store, Attr::Start, e.lo - d.hi)?;
            changed |= self.set_max(store, Attr::Start, e.hi - d.lo)?;
            changed |= self.set_min(store, Attr::Duration, e.lo - s.hi)?;
            changed |= self.set_max(store, Attr::Duration, e.hi - s.lo)?;
            if !changed {
                return Ok(());
            }
        }
    }
}

/// `var >= bound` under the status `presence`: a wipe-out on an optional
/// interval sets it absent instead of failing.
pub fn tighten_min(store: &mut Store, presence: BoolVar, var: IntVar, bound: i64) -> PropResult<bool> {
    match store.bool_value(presence) {
        Some(false) => Ok(false),
        Some(true) => store.set_min(var, bound),
        None if bound > store.max(var) => store.set_bool(presence, false),
        None => store.set_min(var, bound),
    }
}

/// `var <= bound` under the status `presence`.
pub fn tighten_max(store: &mut Store, presence: BoolVar, var: IntVar, bound: i64) -> PropResult<bool> {
    match store.bool_value(presence) {
        Some(false) => Ok(false),
        Some(true) => store.set_max(var, bound),
        None if bound < store.min(var) => store.set_bool(presence, false),
        None => store.set_max(var, bound),
    }
}

struct IntervalLink {
    iv: IntervalVar,
}

impl Propagator for IntervalLink {
    fn propagate(&mut self, store: &mut Store) -> PropResult {
        self.iv.enforce_link(store)
    }

    fn watches(&self) -> Vec<Watch> {
        vec![
            self.iv.start.into(),
            self.iv.duration.into(),
            self.iv.end.into(),
            self.iv.presence.into(),
        ]
    }

    fn name(&self) -> &'static str {
        "interval-link"
    }
}

/// Split items by execution status into (optional, required, excluded).
pub fn status_partition<T: Copy>(
    store: &Store,
    items: &[T],
    interval_of: impl Fn(&T) -> IntervalVar,
) -> (Vec<T>, Vec<T>, Vec<T>) {
    let mut optional = Vec::new();
    let mut required = Vec::new();
    let mut excluded = Vec::new();
    for item in items {
        match interval_of(item).status(store) {
            Status::Optional => optional.push(*item),
            Status::Present => required.push(*item),
            Status::Absent => excluded.push(*item),
        }
    }
    (optional, required, excluded)
}
