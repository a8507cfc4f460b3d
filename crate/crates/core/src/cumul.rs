//! Cumulative-function expressions and the constraints posted on them.
//!
//! An expression is a sum of elementary functions (pulses and steps).
//! Flattening turns it into a list of [`CumulTask`]s, one per leaf, whose
//! heights carry the sign introduced by subtractions.

use std::ops::{Add, Neg, Sub};

use crate::engine::{IntVar, Negation, PropId, Solver};
use crate::error::ModelError;
use crate::interval::IntervalVar;
use crate::timetable::{CapacityRange, GeneralizedCumulative, RuleMode};

/// Height of an elementary function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Height {
    /// A fresh height variable over `[lo, hi]`, with `0 <= lo <= hi`.
    Range(i64, i64),
    /// An existing decision variable. Its domain may include negative
    /// values, which the constraint handles directly.
    Var(IntVar),
}

impl From<i64> for Height {
    fn from(h: i64) -> Self {
        Height::Range(h, h)
    }
}

impl From<(i64, i64)> for Height {
    fn from((lo, hi): (i64, i64)) -> Self {
        Height::Range(lo, hi)
    }
}

impl From<IntVar> for Height {
    fn from(v: IntVar) -> Self {
        Height::Var(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CumulExpr {
    /// The constant zero function.
    Zero,
    Pulse(IntervalVar, Height),
    StepAtStart(IntervalVar, Height),
    StepAtEnd(IntervalVar, Height),
    /// Height `h` from time `t` up to the horizon.
    Step(i64, i64),
    Plus(Box<CumulExpr>, Box<CumulExpr>),
    Minus(Box<CumulExpr>, Box<CumulExpr>),
}

pub fn pulse(iv: IntervalVar, h: impl Into<Height>) -> CumulExpr {
    CumulExpr::Pulse(iv, h.into())
}

pub fn step_at_start(iv: IntervalVar, h: impl Into<Height>) -> CumulExpr {
    CumulExpr::StepAtStart(iv, h.into())
}

pub fn step_at_end(iv: IntervalVar, h: impl Into<Height>) -> CumulExpr {
    CumulExpr::StepAtEnd(iv, h.into())
}

pub fn step(t: i64, h: i64) -> CumulExpr {
    CumulExpr::Step(t, h)
}

impl CumulExpr {
    /// Sum of all expressions as a balanced tree, `Zero` when empty.
    pub fn sum(items: impl IntoIterator<Item = CumulExpr>) -> CumulExpr {
        let mut level: Vec<CumulExpr> = items.into_iter().collect();
        if level.is_empty() {
            return CumulExpr::Zero;
        }
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            let mut it = level.into_iter();
            while let Some(a) = it.next() {
                next.push(match it.next() {
                    Some(b) => a + b,
                    None => a,
                });
            }
            level = next;
        }
        level.pop().unwrap()
    }

    /// Number of elementary functions.
    pub fn num_leaves(&self) -> usize {
        match self {
            CumulExpr::Zero => 0,
            CumulExpr::Plus(a, b) | CumulExpr::Minus(a, b) => a.num_leaves() + b.num_leaves(),
            _ => 1,
        }
    }
}

impl Add for CumulExpr {
    type Output = CumulExpr;
    fn add(self, rhs: CumulExpr) -> CumulExpr {
        CumulExpr::Plus(Box::new(self), Box::new(rhs))
    }
}

impl Sub for CumulExpr {
    type Output = CumulExpr;
    fn sub(self, rhs: CumulExpr) -> CumulExpr {
        CumulExpr::Minus(Box::new(self), Box::new(rhs))
    }
}

impl Neg for CumulExpr {
    type Output = CumulExpr;
    fn neg(self) -> CumulExpr {
        CumulExpr::Zero - self
    }
}

/// An interval with a signed height.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CumulTask {
    pub interval: IntervalVar,
    pub height: IntVar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelConfig {
    /// Exclusive upper time bound of every interval.
    pub horizon: i64,
    pub rules: RuleMode,
}

impl ModelConfig {
    pub fn new(horizon: i64) -> Self {
        Self { horizon, rules: RuleMode::Auto }
    }

    pub fn with_rules(mut self, rules: RuleMode) -> Self {
        self.rules = rules;
        self
    }
}

/// Flatten `expr` into cumulative tasks, creating the step intervals and
/// signed height variables it needs.
pub fn flatten(solver: &mut Solver, expr: &CumulExpr, config: &ModelConfig) -> Result<Vec<CumulTask>, ModelError> {
    let mut out = Vec::with_capacity(expr.num_leaves());
    flatten_into(solver, expr, 1, config.horizon, &mut out)?;
    Ok(out)
}

fn flatten_into(
    solver: &mut Solver,
    expr: &CumulExpr,
    sign: i64,
    horizon: i64,
    out: &mut Vec<CumulTask>,
) -> Result<(), ModelError> {
    match expr {
        CumulExpr::Zero => {}
        CumulExpr::Plus(a, b) => {
            flatten_into(solver, a, sign, horizon, out)?;
            flatten_into(solver, b, sign, horizon, out)?;
        }
        CumulExpr::Minus(a, b) => {
            flatten_into(solver, a, sign, horizon, out)?;
            flatten_into(solver, b, -sign, horizon, out)?;
        }
        CumulExpr::Pulse(iv, h) => {
            check_horizon(solver, iv, horizon)?;
            let height = signed_height(solver, *h, sign)?;
            out.push(CumulTask { interval: *iv, height });
        }
        CumulExpr::StepAtStart(iv, h) => {
            check_horizon(solver, iv, horizon)?;
            let interval = step_interval(solver, iv.start, iv.presence, horizon)?;
            let height = signed_height(solver, *h, sign)?;
            out.push(CumulTask { interval, height });
        }
        CumulExpr::StepAtEnd(iv, h) => {
            check_horizon(solver, iv, horizon)?;
            let interval = step_interval(solver, iv.end, iv.presence, horizon)?;
            let height = signed_height(solver, *h, sign)?;
            out.push(CumulTask { interval, height });
        }
        &CumulExpr::Step(t, h) => {
            if t > horizon {
                return Err(ModelError::BeyondHorizon { end_max: t, horizon });
            }
            if h < 0 {
                return Err(ModelError::BadHeight { lo: h, hi: h });
            }
            let store = solver.store_mut();
            let start = store.new_const(t);
            let duration = store.new_const(horizon - t);
            let end = store.new_const(horizon);
            let presence = store.new_bool_fixed(true);
            let interval = IntervalVar::from_parts(solver, start, duration, end, presence);
            let height = solver.store_mut().new_const(sign * h);
            out.push(CumulTask { interval, height });
        }
    }
    Ok(())
}

fn check_horizon(solver: &Solver, iv: &IntervalVar, horizon: i64) -> Result<(), ModelError> {
    let end_max = solver.store().max(iv.end);
    if end_max > horizon {
        return Err(ModelError::BeyondHorizon { end_max, horizon });
    }
    Ok(())
}

/// `[start, horizon)` sharing `start` and `presence` with its parent.
fn step_interval(
    solver: &mut Solver,
    start: IntVar,
    presence: crate::engine::BoolVar,
    horizon: i64,
) -> Result<IntervalVar, ModelError> {
    let store = solver.store_mut();
    let duration = store.new_int(0, horizon.max(0))?;
    let end = store.new_const(horizon);
    Ok(IntervalVar::from_parts(solver, start, duration, end, presence))
}

fn signed_height(solver: &mut Solver, h: Height, sign: i64) -> Result<IntVar, ModelError> {
    match h {
        Height::Range(lo, hi) => {
            if lo < 0 || lo > hi {
                return Err(ModelError::BadHeight { lo, hi });
            }
            if sign > 0 {
                Ok(solver.store_mut().new_int(lo, hi)?)
            } else {
                Ok(solver.store_mut().new_int(-hi, -lo)?)
            }
        }
        Height::Var(v) => {
            let (lo, hi) = (solver.store().min(v), solver.store().max(v));
            if sign > 0 {
                return Ok(v);
            }
            let neg = solver.store_mut().new_int(-hi, -lo)?;
            solver.post(Box::new(Negation::new(v, neg)));
            Ok(neg)
        }
    }
}

/// Bound used for the missing side of `le` and `ge`: no reachable profile
/// value exceeds it in absolute terms.
pub fn sentinel_capacity(solver: &Solver, tasks: &[CumulTask], horizon: i64) -> i64 {
    let max_abs = tasks
        .iter()
        .map(|t| {
            let d = solver.store().domain(t.height);
            d.lo.unsigned_abs().max(d.hi.unsigned_abs())
        })
        .max()
        .unwrap_or(0);
    let b = (horizon.max(1) as u64)
        .saturating_mul(max_abs)
        .saturating_mul(tasks.len() as u64)
        .min(1 << 50);
    (b as i64).max(1)
}

/// Enforce `lo <= f(t) <= hi` at every time a task of `f` executes, or at
/// every time of `[0, horizon)` when `everywhere` is set.
pub fn always_in(
    solver: &mut Solver,
    f: &CumulExpr,
    lo: i64,
    hi: i64,
    everywhere: bool,
    config: &ModelConfig,
) -> Result<PropId, ModelError> {
    let tasks = flatten(solver, f, config)?;
    post_cumulative(solver, tasks, lo, hi, true, everywhere, config)
}

/// `f(t) <= hi` wherever a task of `f` executes.
pub fn le(solver: &mut Solver, f: &CumulExpr, hi: i64, config: &ModelConfig) -> Result<PropId, ModelError> {
    let tasks = flatten(solver, f, config)?;
    let b = sentinel_capacity(solver, &tasks, config.horizon).max(hi.saturating_abs());
    post_cumulative(solver, tasks, -b, hi, false, false, config)
}

/// `f(t) >= lo` wherever a task of `f` executes.
pub fn ge(solver: &mut Solver, f: &CumulExpr, lo: i64, config: &ModelConfig) -> Result<PropId, ModelError> {
    let tasks = flatten(solver, f, config)?;
    let b = sentinel_capacity(solver, &tasks, config.horizon).max(lo.saturating_abs());
    post_cumulative(solver, tasks, lo, b, true, false, config)
}

fn post_cumulative(
    solver: &mut Solver,
    mut tasks: Vec<CumulTask>,
    lo: i64,
    hi: i64,
    lower_is_real: bool,
    everywhere: bool,
    config: &ModelConfig,
) -> Result<PropId, ModelError> {
    if lo > hi {
        return Err(ModelError::BadCapacity { lo, hi });
    }
    if everywhere {
        let store = solver.store_mut();
        let start = store.new_const(0);
        let duration = store.new_const(config.horizon);
        let end = store.new_const(config.horizon);
        let presence = store.new_bool_fixed(true);
        let height = store.new_const(0);
        let interval = IntervalVar::from_parts(solver, start, duration, end, presence);
        tasks.push(CumulTask { interval, height });
    }
    let prop = GeneralizedCumulative::new(tasks, CapacityRange::new(lo, hi), config.rules)
        .with_lower_bound_real(lower_is_real);
    Ok(solver.post(Box::new(prop)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Fixpoint;

    fn fixed(s: &mut Solver, start: i64, dur: i64) -> IntervalVar {
        IntervalVar::new(s, (start, start), (dur, dur), (start + dur, start + dur), false).unwrap()
    }

    fn heights(s: &Solver, tasks: &[CumulTask]) -> Vec<(i64, i64)> {
        tasks
            .iter()
            .map(|t| (s.store().min(t.height), s.store().max(t.height)))
            .collect()
    }

    #[test]
    fn flatten_signs() {
        let mut s = Solver::new();
        let cfg = ModelConfig::new(20);
        let a = fixed(&mut s, 0, 2);
        let b = fixed(&mut s, 1, 2);
        let c = fixed(&mut s, 2, 2);
        let f = step_at_start(a, 2) - (pulse(b, 1) + step_at_end(c, 1));
        let tasks = flatten(&mut s, &f, &cfg).unwrap();
        assert_eq!(heights(&s, &tasks), vec![(2, 2), (-1, -1), (-1, -1)]);
        assert_eq!(tasks[0].interval.start, a.start);
        assert_eq!(tasks[0].interval.presence, a.presence);
        assert_eq!(tasks[1].interval, b);
        assert_eq!(tasks[2].interval.start, c.end);
        assert_eq!(s.store().min(tasks[2].interval.end), 20);
    }

    #[test]
    fn flatten_minus_ranges() {
        let mut s = Solver::new();
        let cfg = ModelConfig::new(20);
        let x = fixed(&mut s, 0, 2);
        let y = fixed(&mut s, 1, 2);
        let tasks = flatten(&mut s, &(pulse(x, (1, 2)) - pulse(y, (1, 2))), &cfg).unwrap();
        assert_eq!(heights(&s, &tasks), vec![(1, 2), (-2, -1)]);
    }

    #[test]
    fn negative_leaf_height_rejected() {
        let mut s = Solver::new();
        let cfg = ModelConfig::new(20);
        let x = fixed(&mut s, 0, 2);
        assert!(flatten(&mut s, &pulse(x, (-1, 2)), &cfg).is_err());
    }

    #[test]
    fn step_parent_links() {
        let mut s = Solver::new();
        let cfg = ModelConfig::new(20);
        let x = IntervalVar::new(&mut s, (0, 10), (2, 2), (0, 12), true).unwrap();
        let tasks = flatten(&mut s, &step_at_start(x, 1), &cfg).unwrap();
        let xp = tasks[0].interval;
        s.store_mut().fix(x.start, 4).unwrap();
        assert_eq!(s.propagate_to_fixpoint(), Fixpoint::Consistent);
        assert_eq!(s.store().min(xp.start), 4);
        assert_eq!(s.store().min(xp.duration), 16);
        x.set_absent(s.store_mut()).unwrap();
        assert!(xp.is_absent(s.store()));
    }

    #[test]
    fn fixed_overload_fails() {
        let mut s = Solver::new();
        let cfg = ModelConfig::new(10);
        let x = fixed(&mut s, 2, 3);
        always_in(&mut s, &pulse(x, 3), 0, 2, false, &cfg).unwrap();
        assert_eq!(s.propagate_to_fixpoint(), Fixpoint::Failed);
    }

    #[test]
    fn empty_support_is_consistent() {
        let mut s = Solver::new();
        let cfg = ModelConfig::new(10);
        always_in(&mut s, &CumulExpr::Zero, 5, 10, false, &cfg).unwrap();
        assert_eq!(s.propagate_to_fixpoint(), Fixpoint::Consistent);
    }

    #[test]
    fn everywhere_enforces_empty_time() {
        let mut s = Solver::new();
        let cfg = ModelConfig::new(10);
        always_in(&mut s, &CumulExpr::Zero, 5, 10, true, &cfg).unwrap();
        assert_eq!(s.propagate_to_fixpoint(), Fixpoint::Failed);
    }

    #[test]
    fn reservoir_below_zero() {
        let mut s = Solver::new();
        let cfg = ModelConfig::new(20);
        let x = IntervalVar::new(&mut s, (0, 0), (1, 1), (1, 1), false).unwrap();
        ge(&mut s, &(step(0, 5) - step_at_start(x, 6)), 0, &cfg).unwrap();
        assert_eq!(s.propagate_to_fixpoint(), Fixpoint::Failed);
    }

    #[test]
    fn reservoir_not_yet_drained() {
        let mut s = Solver::new();
        let cfg = ModelConfig::new(20);
        let x = IntervalVar::new(&mut s, (0, 10), (1, 1), (1, 11), false).unwrap();
        ge(&mut s, &(step(0, 5) - step_at_start(x, 6)), 0, &cfg).unwrap();
        assert_eq!(s.propagate_to_fixpoint(), Fixpoint::Failed);
    }

    #[test]
    fn sentinel_is_overflow_safe() {
        let mut s = Solver::new();
        let x = fixed(&mut s, 0, 1);
        let h = s.store_mut().new_int(0, i64::MAX / 2).unwrap();
        let tasks = vec![CumulTask { interval: x, height: h }; 4];
        let b = sentinel_capacity(&s, &tasks, i64::MAX);
        assert!(b > 0);
    }
}
