//! Variable domains, the undo trail and the propagation queue.
//!
//! Integer variables carry range domains `[lo, hi]`; holes are never
//! created. Boolean variables are tri-state. Every modification pushes the
//! previous value on the trail so `restore(mark)` reinstates the exact
//! state that was current when `mark` was taken.

use std::collections::VecDeque;

use crate::error::{Inconsistency, ModelError, PropResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVar(pub(crate) u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolVar(pub(crate) u32);

impl IntVar {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl BoolVar {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropId(pub(crate) u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntDomain {
    pub lo: i64,
    pub hi: i64,
}

impl IntDomain {
    pub fn is_fixed(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

#[derive(Debug, Clone, Copy)]
enum TrailEntry {
    Int { var: u32, old: IntDomain },
    Bool { var: u32, old: Option<bool> },
}

/// Position in the trail returned by [`Store::save`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Mark(usize);

#[derive(Debug, Default)]
pub struct Store {
    ints: Vec<IntDomain>,
    bools: Vec<Option<bool>>,
    trail: Vec<TrailEntry>,
    int_watchers: Vec<Vec<PropId>>,
    bool_watchers: Vec<Vec<PropId>>,
    queue: VecDeque<PropId>,
    queued: Vec<bool>,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_int(&mut self, lo: i64, hi: i64) -> Result<IntVar, ModelError> {
        if lo > hi {
            return Err(ModelError::EmptyRange { lo, hi });
        }
        self.ints.push(IntDomain { lo, hi });
        self.int_watchers.push(Vec::new());
        Ok(IntVar(self.ints.len() as u32 - 1))
    }

    pub fn new_const(&mut self, v: i64) -> IntVar {
        self.new_int(v, v).expect("singleton range is never empty")
    }

    pub fn new_bool(&mut self) -> BoolVar {
        self.bools.push(None);
        self.bool_watchers.push(Vec::new());
        BoolVar(self.bools.len() as u32 - 1)
    }

    pub fn new_bool_fixed(&mut self, value: bool) -> BoolVar {
        self.bools.push(Some(value));
        self.bool_watchers.push(Vec::new());
        BoolVar(self.bools.len() as u32 - 1)
    }

    pub fn num_ints(&self) -> usize {
        self.ints.len()
    }

    pub fn num_bools(&self) -> usize {
        self.bools.len()
    }

    #[inline]
    pub fn domain(&self, v: IntVar) -> IntDomain {
        self.ints[v.index()]
    }

    #[inline]
    pub fn min(&self, v: IntVar) -> i64 {
        self.ints[v.index()].lo
    }

    #[inline]
    pub fn max(&self, v: IntVar) -> i64 {
        self.ints[v.index()].hi
    }

    #[inline]
    pub fn is_fixed(&self, v: IntVar) -> bool {
        self.ints[v.index()].is_fixed()
    }

    #[inline]
    pub fn bool_value(&self, b: BoolVar) -> Option<bool> {
        self.bools[b.index()]
    }

    /// `lo <- max(lo, b)`. Returns whether the bound moved.
    pub fn set_min(&mut self, v: IntVar, b: i64) -> PropResult<bool> {
        let dom = self.ints[v.index()];
        if b <= dom.lo {
            return Ok(false);
        }
        if b > dom.hi {
            return Err(Inconsistency);
        }
        self.trail.push(TrailEntry::Int { var: v.0, old: dom });
        self.ints[v.index()].lo = b;
        self.notify_int(v);
        Ok(true)
    }

    /// `hi <- min(hi, b)`. Returns whether the bound moved.
    pub fn set_max(&mut self, v: IntVar, b: i64) -> PropResult<bool> {
        let dom = self.ints[v.index()];
        if b >= dom.hi {
            return Ok(false);
        }
        if b < dom.lo {
            return Err(Inconsistency);
        }
        self.trail.push(TrailEntry::Int { var: v.0, old: dom });
        self.ints[v.index()].hi = b;
        self.notify_int(v);
        Ok(true)
    }

    pub fn fix(&mut self, v: IntVar, value: i64) -> PropResult<bool> {
        let dom = self.ints[v.index()];
        if !dom.contains(value) {
            return Err(Inconsistency);
        }
        if dom.is_fixed() {
            return Ok(false);
        }
        self.trail.push(TrailEntry::Int { var: v.0, old: dom });
        self.ints[v.index()] = IntDomain { lo: value, hi: value };
        self.notify_int(v);
        Ok(true)
    }

    pub fn set_bool(&mut self, b: BoolVar, value: bool) -> PropResult<bool> {
        match self.bools[b.index()] {
            Some(current) if current == value => Ok(false),
            Some(_) => Err(Inconsistency),
            None => {
                self.trail.push(TrailEntry::Bool { var: b.0, old: None });
                self.bools[b.index()] = Some(value);
                for &p in &self.bool_watchers[b.index()] {
                    if !self.queued[p.0 as usize] {
                        self.queued[p.0 as usize] = true;
                        self.queue.push_back(p);
                    }
                }
                Ok(true)
            }
        }
    }

    fn notify_int(&mut self, v: IntVar) {
        for &p in &self.int_watchers[v.index()] {
            if !self.queued[p.0 as usize] {
                self.queued[p.0 as usize] = true;
                self.queue.push_back(p);
            }
        }
    }

    pub fn save(&self) -> Mark {
        Mark(self.trail.len())
    }

    /// Undo every modification made since `mark` and drop pending work.
    pub fn restore(&mut self, mark: Mark) {
        while self.trail.len() > mark.0 {
            match self.trail.pop().expect("trail length checked") {
                TrailEntry::Int { var, old } => self.ints[var as usize] = old,
                TrailEntry::Bool { var, old } => self.bools[var as usize] = old,
            }
        }
        self.clear_queue();
    }

    pub(crate) fn register_propagator(&mut self) -> PropId {
        self.queued.push(false);
        PropId(self.queued.len() as u32 - 1)
    }

    pub(crate) fn watch_int(&mut self, v: IntVar, p: PropId) {
        let w = &mut self.int_watchers[v.index()];
        if !w.contains(&p) {
            w.push(p);
        }
    }

    pub(crate) fn watch_bool(&mut self, b: BoolVar, p: PropId) {
        let w = &mut self.bool_watchers[b.index()];
        if !w.contains(&p) {
            w.push(p);
        }
    }

    pub(crate) fn enqueue(&mut self, p: PropId) {
        if !self.queued[p.0 as usize] {
            self.queued[p.0 as usize] = true;
            self.queue.push_back(p);
        }
    }

    pub(crate) fn dequeue(&mut self) -> Option<PropId> {
        let p = self.queue.pop_front()?;
        self.queued[p.0 as usize] = false;
        Some(p)
    }

    pub(crate) fn clear_queue(&mut self) {
        for p in self.queue.drain(..) {
            self.queued[p.0 as usize] = false;
        }
    }

    /// Full copy of every domain, used by tests to compare states.
    pub fn snapshot(&self) -> (Vec<IntDomain>, Vec<Option<bool>>) {
        (self.ints.clone(), self.bools.clone())
    }
}
