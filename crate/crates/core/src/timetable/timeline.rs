//! The timeline: time points carrying the minimum and maximum profile and
//! the number of overlapping fixed parts, built by sweeping over task
//! bound events.

use crate::cumul::CumulTask;
use crate::engine::Store;
use crate::interval::Status;

/// Capacity range `[lo, hi]` the summed heights must stay within.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapacityRange {
    pub lo: i64,
    pub hi: i64,
}

impl CapacityRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }
}

/// Bounds of one cumulative task, read from the store at a given moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskState {
    pub status: Status,
    pub s_min: i64,
    pub s_max: i64,
    pub d_min: i64,
    pub d_max: i64,
    pub e_min: i64,
    pub e_max: i64,
    pub c_min: i64,
    pub c_max: i64,
}

impl TaskState {
    pub fn read(store: &Store, task: &CumulTask) -> Self {
        let iv = task.interval;
        let (s, d, e, c) = (
            store.domain(iv.start),
            store.domain(iv.duration),
            store.domain(iv.end),
            store.domain(task.height),
        );
        TaskState {
            status: iv.status(store),
            s_min: s.lo,
            s_max: s.hi,
            d_min: d.lo,
            d_max: d.hi,
            e_min: e.lo,
            e_max: e.hi,
            c_min: c.lo,
            c_max: c.hi,
        }
    }

    pub fn has_fixed_part(&self) -> bool {
        self.s_max < self.e_min
    }

    /// Every attribute and the status are decided.
    pub fn is_fixed(&self) -> bool {
        self.status != Status::Optional
            && self.s_min == self.s_max
            && self.d_min == self.d_max
            && self.e_min == self.e_max
            && self.c_min == self.c_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimePoint {
    pub time: i64,
    pub p_min: i64,
    pub p_max: i64,
    pub n_fixed: u32,
}

/// Time points in increasing time order. Neighbours are the adjacent
/// entries; the list is never edited after construction.
#[derive(Debug, Clone, Default)]
pub struct Timeline {
    points: Vec<TimePoint>,
    start_min_tp: Vec<usize>,
    end_max_tp: Vec<usize>,
}

/// The profile range at `time` misses the capacity range while some task
/// surely executes there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overload {
    pub time: i64,
}

const NO_POINT: usize = usize::MAX;

impl Timeline {
    pub fn points(&self) -> &[TimePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn point(&self, idx: usize) -> &TimePoint {
        &self.points[idx]
    }

    #[inline]
    pub fn next(&self, idx: usize) -> Option<usize> {
        (idx + 1 < self.points.len()).then_some(idx + 1)
    }

    #[inline]
    pub fn prev(&self, idx: usize) -> Option<usize> {
        idx.checked_sub(1)
    }

    #[inline]
    pub fn next_time(&self, idx: usize) -> Option<i64> {
        self.points.get(idx + 1).map(|tp| tp.time)
    }

    /// Point at the earliest start of task `i`; `None` for absent tasks.
    pub fn start_min_point(&self, i: usize) -> Option<usize> {
        let p = self.start_min_tp[i];
        (p != NO_POINT).then_some(p)
    }

    /// Point at the latest end of task `i`; `None` for absent tasks.
    pub fn end_max_point(&self, i: usize) -> Option<usize> {
        let p = self.end_max_tp[i];
        (p != NO_POINT).then_some(p)
    }
}

/// Which completed time points are tested against the capacity range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CheckScope {
    Everywhere,
    /// Only points whose rectangle meets `[lo, hi)`.
    Within(i64, i64),
    /// Only points whose rectangle reaches outside `[lo, hi)`.
    Outside(i64, i64),
}

impl CheckScope {
    fn applies(&self, time: i64, next_time: i64) -> bool {
        match *self {
            CheckScope::Everywhere => true,
            CheckScope::Within(lo, hi) => time < hi && next_time > lo,
            CheckScope::Outside(lo, hi) => time < lo || next_time > hi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EventKind {
    StartMin,
    EndMax,
    StartMax,
    EndMin,
}

/// Build the timeline of the non-absent `tasks` and check every completed
/// time point: fail when `#fp > 0` and the profile range lies entirely
/// above or below `cap`.
pub fn initialize_timeline(tasks: &[TaskState], cap: CapacityRange) -> Result<Timeline, Overload> {
    build(tasks, cap, CheckScope::Everywhere)
}

pub(crate) fn build(tasks: &[TaskState], cap: CapacityRange, scope: CheckScope) -> Result<Timeline, Overload> {
    let mut events: Vec<(i64, EventKind, usize)> = Vec::with_capacity(tasks.len() * 4);
    for (i, t) in tasks.iter().enumerate() {
        if t.status == Status::Absent {
            continue;
        }
        events.push((t.s_min, EventKind::StartMin, i));
        events.push((t.e_max, EventKind::EndMax, i));
        if t.status == Status::Present && t.has_fixed_part() {
            events.push((t.s_max, EventKind::StartMax, i));
            events.push((t.e_min, EventKind::EndMin, i));
        }
    }
    events.sort_unstable_by_key(|e| e.0);

    let mut timeline = Timeline {
        points: Vec::with_capacity(events.len()),
        start_min_tp: vec![NO_POINT; tasks.len()],
        end_max_tp: vec![NO_POINT; tasks.len()],
    };
    let Some(first) = events.first() else {
        return Ok(timeline);
    };

    let violated = |tp: &TimePoint| tp.n_fixed > 0 && (tp.p_min > cap.hi || tp.p_max < cap.lo);

    let (mut p_min, mut p_max, mut n_fixed) = (0i64, 0i64, 0i64);
    timeline.points.push(TimePoint { time: first.0, p_min: 0, p_max: 0, n_fixed: 0 });
    for &(time, kind, i) in &events {
        let mut cur = timeline.points.len() - 1;
        if timeline.points[cur].time < time {
            let tp = &timeline.points[cur];
            if scope.applies(tp.time, time) && violated(tp) {
                return Err(Overload { time: tp.time });
            }
            timeline.points.push(TimePoint { time, p_min, p_max, n_fixed: n_fixed as u32 });
            cur += 1;
        }
        let t = &tasks[i];
        match kind {
            EventKind::StartMin => {
                p_min += t.c_min.min(0);
                p_max += t.c_max.max(0);
                timeline.start_min_tp[i] = cur;
            }
            EventKind::EndMax => {
                p_min -= t.c_min.min(0);
                p_max -= t.c_max.max(0);
                timeline.end_max_tp[i] = cur;
            }
            EventKind::StartMax => {
                p_min += t.c_min.max(0);
                p_max += t.c_max.min(0);
                n_fixed += 1;
            }
            EventKind::EndMin => {
                p_min -= t.c_min.max(0);
                p_max -= t.c_max.min(0);
                n_fixed -= 1;
            }
        }
        let tp = &mut timeline.points[cur];
        tp.p_min = p_min;
        tp.p_max = p_max;
        tp.n_fixed = n_fixed as u32;
    }
    let last = timeline.points.last().expect("at least one point");
    if scope.applies(last.time, i64::MAX) && violated(last) {
        return Err(Overload { time: last.time });
    }
    Ok(timeline)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn task(status: Status, s: (i64, i64), d: (i64, i64), e: (i64, i64), c: (i64, i64)) -> TaskState {
        TaskState {
            status,
            s_min: s.0,
            s_max: s.1,
            d_min: d.0,
            d_max: d.1,
            e_min: e.0,
            e_max: e.1,
            c_min: c.0,
            c_max: c.1,
        }
    }

    fn tuples(tl: &Timeline) -> Vec<(i64, i64, i64, u32)> {
        tl.points().iter().map(|p| (p.time, p.p_min, p.p_max, p.n_fixed)).collect()
    }

    #[test]
    fn single_fixed_task() {
        let t = task(Status::Present, (2, 2), (3, 3), (5, 5), (3, 3));
        let tl = initialize_timeline(&[t], CapacityRange::new(0, 10)).unwrap();
        assert_eq!(tuples(&tl), vec![(2, 3, 3, 1), (5, 0, 0, 0)]);
        assert_eq!(tl.start_min_point(0), Some(0));
        assert_eq!(tl.end_max_point(0), Some(1));
    }

    #[test]
    fn mixed_signs_below_minimum() {
        let a = task(Status::Present, (4, 4), (2, 2), (6, 6), (2, 2));
        let b = task(Status::Present, (4, 4), (2, 2), (6, 6), (-3, -3));
        let res = initialize_timeline(&[a, b], CapacityRange::new(0, 5));
        assert_eq!(res.unwrap_err(), Overload { time: 4 });
    }

    #[test]
    fn absent_tasks_are_skipped() {
        let a = task(Status::Absent, (0, 0), (2, 2), (2, 2), (9, 9));
        let tl = initialize_timeline(&[a], CapacityRange::new(0, 1)).unwrap();
        assert!(tl.is_empty());
        assert_eq!(tl.start_min_point(0), None);
    }

    #[test]
    fn no_check_without_fixed_parts() {
        // optional task overloads on its own, but nothing surely executes
        let a = task(Status::Optional, (0, 0), (2, 2), (2, 2), (9, 9));
        assert!(initialize_timeline(&[a], CapacityRange::new(0, 1)).is_ok());
    }

    #[test]
    fn scoped_checks() {
        let a = task(Status::Present, (0, 0), (2, 2), (2, 2), (9, 9));
        let cap = CapacityRange::new(0, 1);
        assert!(build(&[a], cap, CheckScope::Within(5, 10)).is_ok());
        assert!(build(&[a], cap, CheckScope::Within(1, 10)).is_err());
        assert!(build(&[a], cap, CheckScope::Outside(0, 2)).is_ok());
        assert!(build(&[a], cap, CheckScope::Outside(1, 2)).is_err());
    }
}
