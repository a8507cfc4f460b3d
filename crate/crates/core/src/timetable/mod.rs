//! Timetable filtering for the generalized cumulative constraint over
//! conditional tasks with possibly negative heights.

mod timeline;

pub use timeline::{initialize_timeline, CapacityRange, Overload, TaskState, TimePoint, Timeline};

use timeline::{build, CheckScope};

use crate::cumul::CumulTask;
use crate::engine::{Propagator, Store, Watch};
use crate::error::{Inconsistency, PropResult};
use crate::interval::{tighten_max, tighten_min, Attr, Status};

/// Which filtering rules may run besides Forbid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RuleMode {
    /// Enable each rule only when it can prune.
    #[default]
    Auto,
    All,
    ForbidOnly,
}

impl std::str::FromStr for RuleMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(RuleMode::Auto),
            "all" => Ok(RuleMode::All),
            "forbid-only" => Ok(RuleMode::ForbidOnly),
            other => Err(format!("unknown rule mode `{other}`")),
        }
    }
}

impl RuleMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RuleMode::Auto => "auto",
            RuleMode::All => "all",
            RuleMode::ForbidOnly => "forbid-only",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleFlags {
    pub mandatory: bool,
    pub height: bool,
    pub length: bool,
}

impl RuleFlags {
    pub fn any_extra(&self) -> bool {
        self.mandatory || self.height || self.length
    }
}

/// Rule selection over the non-absent tasks. `lower_is_real` is false when
/// the capacity minimum is only a sentinel.
pub fn select_rules(tasks: &[TaskState], lower_is_real: bool, mode: RuleMode) -> RuleFlags {
    match mode {
        RuleMode::All => RuleFlags { mandatory: true, height: true, length: true },
        RuleMode::ForbidOnly => RuleFlags { mandatory: false, height: false, length: false },
        RuleMode::Auto => {
            let live = || tasks.iter().filter(|t| t.status != Status::Absent);
            let negative = live().any(|t| t.c_min < 0);
            let positive = live().any(|t| t.c_max > 0);
            RuleFlags {
                mandatory: (negative && positive) || lower_is_real,
                height: live().any(|t| t.c_min != t.c_max),
                length: live().any(|t| t.d_min != t.d_max),
            }
        }
    }
}

/// Indices of the tasks worth keeping in the timeline: every unfixed
/// non-absent task and the fixed tasks meeting `[lo, hi)`, where `lo` is
/// the earliest start and `hi` the latest end of the unfixed tasks.
/// Returns `None` when no task is unfixed.
pub fn remove_fruitless_fixed_tasks(tasks: &[TaskState]) -> Option<(Vec<usize>, i64, i64)> {
    let unfixed = || {
        tasks
            .iter()
            .filter(|t| t.status != Status::Absent && !t.is_fixed())
    };
    let lo = unfixed().map(|t| t.s_min).min()?;
    let hi = unfixed().map(|t| t.e_max).max()?;
    let kept = tasks
        .iter()
        .enumerate()
        .filter(|(_, t)| t.status != Status::Absent)
        .filter(|(_, t)| !t.is_fixed() || (t.e_max > lo && t.s_min < hi))
        .map(|(i, _)| i)
        .collect();
    Some((kept, lo, hi))
}

/// The timetable propagator for `lo <= sum of executing heights <= hi`.
#[derive(Debug, Clone)]
pub struct GeneralizedCumulative {
    tasks: Vec<CumulTask>,
    cap: CapacityRange,
    mode: RuleMode,
    lower_is_real: bool,
}

impl GeneralizedCumulative {
    pub fn new(tasks: Vec<CumulTask>, cap: CapacityRange, mode: RuleMode) -> Self {
        Self { tasks, cap, mode, lower_is_real: true }
    }

    /// Mark the capacity minimum as a sentinel (or not), which disables
    /// the Mandatory rule for all-positive task sets in `Auto` mode.
    pub fn with_lower_bound_real(mut self, real: bool) -> Self {
        self.lower_is_real = real;
        self
    }

    pub fn tasks(&self) -> &[CumulTask] {
        &self.tasks
    }

    pub fn capacity(&self) -> CapacityRange {
        self.cap
    }
}

impl Propagator for GeneralizedCumulative {
    fn propagate(&mut self, store: &mut Store) -> PropResult {
        timetable_propagate(store, &self.tasks, self.cap, self.lower_is_real, self.mode)
    }

    fn watches(&self) -> Vec<Watch> {
        let mut w = Vec::with_capacity(self.tasks.len() * 5);
        for t in &self.tasks {
            let iv = t.interval;
            w.extend([
                Watch::Int(iv.start),
                Watch::Int(iv.duration),
                Watch::Int(iv.end),
                Watch::Bool(iv.presence),
                Watch::Int(t.height),
            ]);
        }
        w
    }

    fn name(&self) -> &'static str {
        "generalized-cumulative"
    }
}

/// One timetable pass: build the timeline from the current bounds, check
/// it, then filter every unfixed task against it.
pub fn timetable_propagate(
    store: &mut Store,
    tasks: &[CumulTask],
    cap: CapacityRange,
    lower_is_real: bool,
    mode: RuleMode,
) -> PropResult {
    for t in tasks {
        t.interval.enforce_link(store)?;
    }
    let states: Vec<TaskState> = tasks.iter().map(|t| TaskState::read(store, t)).collect();

    let Some((kept, lo, hi)) = remove_fruitless_fixed_tasks(&states) else {
        build(&states, cap, CheckScope::Everywhere).map_err(|_| Inconsistency)?;
        return Ok(());
    };

    let live = states.iter().filter(|t| t.status != Status::Absent).count();
    let timeline = if kept.len() < live {
        let fixed: Vec<TaskState> = states
            .iter()
            .filter(|t| t.status != Status::Absent && t.is_fixed())
            .copied()
            .collect();
        build(&fixed, cap, CheckScope::Outside(lo, hi)).map_err(|_| Inconsistency)?;
        let reduced: Vec<TaskState> = kept.iter().map(|&i| states[i]).collect();
        build(&reduced, cap, CheckScope::Within(lo, hi)).map_err(|_| Inconsistency)?
    } else {
        let reduced: Vec<TaskState> = kept.iter().map(|&i| states[i]).collect();
        build(&reduced, cap, CheckScope::Everywhere).map_err(|_| Inconsistency)?
    };

    let flags = select_rules(&states, lower_is_real, mode);
    for (k, &i) in kept.iter().enumerate() {
        let Some(entry) = timeline.start_min_point(k) else {
            continue;
        };
        let Some(exit) = timeline.end_max_point(k) else {
            continue;
        };
        let mut filter = TaskFilter {
            store: &mut *store,
            task: tasks[i],
            snap: states[i],
            tl: &timeline,
            cap,
            flags,
        };
        filter.run(entry, exit)?;
    }
    Ok(())
}

struct TaskFilter<'a> {
    store: &'a mut Store,
    task: CumulTask,
    /// Bounds when the timeline was built.
    snap: TaskState,
    tl: &'a Timeline,
    cap: CapacityRange,
    flags: RuleFlags,
}

impl TaskFilter<'_> {
    fn cur(&self) -> TaskState {
        TaskState::read(self.store, &self.task)
    }

    fn set_min(&mut self, attr: Attr, b: i64) -> PropResult {
        self.task.interval.set_min(self.store, attr, b).map(|_| ())
    }

    fn set_max(&mut self, attr: Attr, b: i64) -> PropResult {
        self.task.interval.set_max(self.store, attr, b).map(|_| ())
    }

    fn set_height_min(&mut self, b: i64) -> PropResult {
        tighten_min(self.store, self.task.interval.presence, self.task.height, b).map(|_| ())
    }

    fn set_height_max(&mut self, b: i64) -> PropResult {
        tighten_max(self.store, self.task.interval.presence, self.task.height, b).map(|_| ())
    }

    /// Forbid test: executing the task at `tp` violates the range.
    fn violates(&self, tp: &TimePoint, c: &TaskState) -> bool {
        tp.p_min + c.c_min.max(0) > self.cap.hi || tp.p_max + c.c_max.min(0) < self.cap.lo
    }

    fn check_if_mandatory(&mut self, idx: usize) -> PropResult {
        if !self.flags.mandatory {
            return Ok(());
        }
        let tp = *self.tl.point(idx);
        let Some(next) = self.tl.next_time(idx) else {
            return Ok(());
        };
        let c = self.cur();
        if c.status == Status::Absent || tp.n_fixed == 0 {
            return Ok(());
        }
        let without_min = tp.p_min - c.c_min.min(0);
        let without_max = tp.p_max - c.c_max.max(0);
        if !(without_min > self.cap.hi || without_max < self.cap.lo) {
            return Ok(());
        }
        self.task.interval.set_present(self.store)?;
        self.set_max(Attr::Start, tp.time)?;
        self.set_min(Attr::End, next)?;
        let deficit = self.cap.lo - without_max;
        let overload = self.cap.hi - without_min;
        if deficit > 0 {
            self.set_height_min(deficit)?;
        }
        if overload < 0 {
            self.set_height_max(overload)?;
        }
        Ok(())
    }

    fn run(&mut self, entry: usize, exit: usize) -> PropResult {
        let c = self.cur();
        if c.status == Status::Absent || c.is_fixed() {
            return Ok(());
        }
        // A zero-duration placement executes nowhere, so nothing can be
        // forbidden for it.
        let positive = c.d_min > 0;

        // Step 1: forward sweep from the earliest start.
        let mut f = Some(entry);
        while let Some(idx) = f {
            let c = self.cur();
            if c.status == Status::Absent {
                return Ok(());
            }
            let tp = *self.tl.point(idx);
            if tp.time >= c.s_max.min(c.e_min) {
                break;
            }
            let Some(next) = self.tl.next_time(idx) else {
                break;
            };
            if positive && self.violates(&tp, &c) {
                self.set_min(Attr::Start, next)?;
            } else {
                self.check_if_mandatory(idx)?;
            }
            f = self.tl.next(idx);
        }

        // Step 2: backward sweep from the latest end.
        let mut b = self.tl.prev(exit);
        while let Some(idx) = b {
            let c = self.cur();
            if c.status == Status::Absent {
                return Ok(());
            }
            let tp = *self.tl.point(idx);
            let next = self.tl.next_time(idx).expect("not the last point");
            if next <= c.s_max.max(c.e_min) {
                break;
            }
            if positive && self.violates(&tp, &c) {
                self.set_max(Attr::End, tp.time)?;
            } else {
                self.check_if_mandatory(idx)?;
            }
            b = self.tl.prev(idx);
        }

        if !self.flags.any_extra() {
            return Ok(());
        }
        let c = self.cur();
        if c.status == Status::Absent {
            return Ok(());
        }
        let Some(f) = f else {
            return Ok(());
        };
        if c.s_max < c.e_min {
            self.fixed_part_sweep(f)
        } else {
            self.free_sweep(f, positive)
        }
    }

    /// Step 3a: Mandatory and Height over the fixed part.
    fn fixed_part_sweep(&mut self, mut f: usize) -> PropResult {
        let snap_fixed_part = self.snap.status == Status::Present && self.snap.has_fixed_part();
        loop {
            let c = self.cur();
            if c.status == Status::Absent {
                return Ok(());
            }
            let tp = *self.tl.point(f);
            if tp.time >= c.e_min || self.tl.next(f).is_none() {
                return Ok(());
            }
            self.check_if_mandatory(f)?;
            let c = self.cur();
            if c.status == Status::Absent {
                return Ok(());
            }
            // the fixed part may have appeared after the forward sweep
            // stopped, leaving points before it
            let overlaps = self.tl.next_time(f).is_some_and(|next| next > c.s_max);
            if self.flags.height && overlaps {
                let mut lo = self.cap.lo - (tp.p_max - c.c_max.max(0));
                let mut hi = self.cap.hi - (tp.p_min - c.c_min.min(0));
                // the timeline holds this task's fixed-part contribution
                if snap_fixed_part && tp.time >= self.snap.s_max && tp.time < self.snap.e_min {
                    lo += c.c_max.min(0);
                    hi += c.c_min.max(0);
                }
                self.set_height_min(lo)?;
                self.set_height_max(hi)?;
            }
            f += 1;
        }
    }

    /// Step 3b: Mandatory, Length and Height for a task without fixed part.
    fn free_sweep(&mut self, f: usize, positive: bool) -> PropResult {
        let start = self.cur();
        let mut d_star = 0i64;
        let mut s_prime = start.s_min;
        let mut c_lo_star: Option<i64> = None;
        let mut c_hi_star: Option<i64> = None;
        let mut take = |tp: &TimePoint, c: &TaskState, cap: CapacityRange| {
            let lo = cap.lo - tp.p_max + c.c_max.max(0);
            let hi = cap.hi - tp.p_min + c.c_min.min(0);
            c_lo_star = Some(c_lo_star.map_or(lo, |v| v.min(lo)));
            c_hi_star = Some(c_hi_star.map_or(hi, |v| v.max(hi)));
        };
        if let Some(p) = self.tl.prev(f) {
            take(self.tl.point(p), &start, self.cap);
        }

        let mut idx = Some(f);
        while let Some(i) = idx {
            let c = self.cur();
            if c.status == Status::Absent {
                return Ok(());
            }
            let tp = *self.tl.point(i);
            if tp.time > c.s_max || tp.time >= c.e_max {
                break;
            }
            let Some(next) = self.tl.next_time(i) else {
                break;
            };
            d_star = d_star.max(tp.time - s_prime);
            if positive && self.violates(&tp, &c) {
                s_prime = next;
            } else {
                self.check_if_mandatory(i)?;
            }
            let c = self.cur();
            take(&tp, &c, self.cap);
            idx = self.tl.next(i);
        }

        let c = self.cur();
        if c.status == Status::Absent || !positive {
            return Ok(());
        }
        if self.flags.length {
            d_star = d_star.max(c.e_max - s_prime);
            self.set_max(Attr::Duration, d_star)?;
        }
        if self.flags.height {
            if let (Some(lo), Some(hi)) = (c_lo_star, c_hi_star) {
                self.set_height_min(lo)?;
                self.set_height_max(hi)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
