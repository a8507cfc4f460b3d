use super::*;
use crate::engine::{Fixpoint, Solver};
use crate::interval::IntervalVar;

type R = (i64, i64);

fn task(s: &mut Solver, start: R, dur: R, end: R, c: R, optional: bool) -> CumulTask {
    let interval = IntervalVar::new(s, start, dur, end, optional).unwrap();
    let height = s.store_mut().new_int(c.0, c.1).unwrap();
    CumulTask { interval, height }
}

fn fixed(s: &mut Solver, start: i64, end: i64, c: i64) -> CumulTask {
    task(s, (start, start), (end - start, end - start), (end, end), (c, c), false)
}

fn bounds(s: &Solver, t: &CumulTask) -> [R; 4] {
    let st = s.store();
    let iv = t.interval;
    let r = |v| (st.min(v), st.max(v));
    [r(iv.start), r(iv.duration), r(iv.end), r(t.height)]
}

fn states(s: &Solver, tasks: &[CumulTask]) -> Vec<TaskState> {
    tasks.iter().map(|t| TaskState::read(s.store(), t)).collect()
}

/// The three-task instance with tasks A and B required and C optional.
fn three_tasks(s: &mut Solver) -> Vec<CumulTask> {
    vec![
        task(s, (0, 1), (3, 4), (3, 4), (1, 2), false),
        task(s, (2, 4), (3, 4), (5, 7), (2, 2), false),
        task(s, (3, 8), (1, 3), (4, 9), (-2, 1), true),
    ]
}

#[test]
fn timeline_of_three_tasks() {
    let mut s = Solver::new();
    let tasks = three_tasks(&mut s);
    let tl = initialize_timeline(&states(&s, &tasks), CapacityRange::new(0, 1)).unwrap();
    let got: Vec<_> = tl.points().iter().map(|p| (p.time, p.p_min, p.p_max, p.n_fixed)).collect();
    assert_eq!(
        got,
        vec![
            (0, 0, 2, 0),
            (1, 1, 2, 1),
            (2, 1, 4, 1),
            (3, -2, 5, 0),
            (4, 0, 3, 1),
            (5, -2, 3, 0),
            (7, -2, 1, 0),
            (9, 0, 0, 0),
        ]
    );
    assert_eq!(tl.point(tl.start_min_point(2).unwrap()).time, 3);
    assert_eq!(tl.point(tl.end_max_point(1).unwrap()).time, 7);
}

#[test]
fn timetabling_three_tasks() {
    let mut s = Solver::new();
    let tasks = three_tasks(&mut s);
    timetable_propagate(s.store_mut(), &tasks, CapacityRange::new(0, 1), true, RuleMode::Auto).unwrap();
    for t in &tasks {
        t.interval.enforce_link(s.store_mut()).unwrap();
    }
    let [a, b, c] = [&tasks[0], &tasks[1], &tasks[2]];
    assert_eq!(bounds(&s, a), [(0, 1), (3, 4), (3, 4), (1, 1)]);
    assert_eq!(bounds(&s, b), [(3, 4), (3, 4), (6, 7), (2, 2)]);
    assert!(c.interval.is_present(s.store()));
    assert_eq!(bounds(&s, c), [(3, 4), (1, 3), (5, 7), (-2, -1)]);
}

#[test]
fn check_if_mandatory_sets_presence_and_height() {
    let mut s = Solver::new();
    let tasks = three_tasks(&mut s);
    let snap = states(&s, &tasks);
    let tl = initialize_timeline(&snap, CapacityRange::new(0, 1)).unwrap();
    let idx = tl.points().iter().position(|p| p.time == 4).unwrap();
    let mut f = TaskFilter {
        store: s.store_mut(),
        task: tasks[2],
        snap: snap[2],
        tl: &tl,
        cap: CapacityRange::new(0, 1),
        flags: RuleFlags { mandatory: true, height: true, length: true },
    };
    f.check_if_mandatory(idx).unwrap();
    assert!(tasks[2].interval.is_present(s.store()));
    assert_eq!(s.store().max(tasks[2].interval.start), 4);
    assert_eq!(s.store().min(tasks[2].interval.end), 5);
    assert_eq!(s.store().max(tasks[2].height), -1);
}

#[test]
fn mandatory_needs_a_fixed_part() {
    let mut s = Solver::new();
    // point at 0 has no fixed part even though the profile can only be 5
    let tasks = vec![
        task(&mut s, (0, 1), (1, 1), (1, 2), (5, 5), true),
        task(&mut s, (0, 1), (1, 1), (1, 2), (-1, 0), true),
    ];
    let snap = states(&s, &tasks);
    let tl = initialize_timeline(&snap, CapacityRange::new(0, 3)).unwrap();
    let mut f = TaskFilter {
        store: s.store_mut(),
        task: tasks[1],
        snap: snap[1],
        tl: &tl,
        cap: CapacityRange::new(0, 3),
        flags: RuleFlags { mandatory: true, height: true, length: true },
    };
    f.check_if_mandatory(0).unwrap();
    assert_eq!(tasks[1].interval.status(s.store()), Status::Optional);
}

#[test]
fn height_over_minimum_overlapping_interval() {
    let mut s = Solver::new();
    let mut tasks = vec![
        fixed(&mut s, 4, 12, 2),
        fixed(&mut s, 6, 10, -1),
        task(&mut s, (0, 10), (6, 6), (6, 16), (1, 4), false),
    ];
    let cap = CapacityRange::new(-1000, 4);
    timetable_propagate(s.store_mut(), &tasks, cap, false, RuleMode::Auto).unwrap();
    assert_eq!(s.store().max(tasks[2].height), 3);

    let mut s = Solver::new();
    tasks = vec![
        fixed(&mut s, 4, 12, 2),
        task(&mut s, (0, 10), (6, 6), (6, 16), (1, 4), false),
    ];
    timetable_propagate(s.store_mut(), &tasks, cap, false, RuleMode::Auto).unwrap();
    assert_eq!(s.store().max(tasks[1].height), 2);
}

#[test]
fn length_of_longest_free_span() {
    let mut s = Solver::new();
    let tasks = vec![
        fixed(&mut s, 3, 6, 3),
        fixed(&mut s, 10, 14, 3),
        task(&mut s, (0, 14), (2, 16), (2, 16), (2, 2), false),
    ];
    let cap = CapacityRange::new(-1000, 4);
    timetable_propagate(s.store_mut(), &tasks, cap, false, RuleMode::Auto).unwrap();
    assert_eq!(s.store().max(tasks[2].interval.duration), 4);
}

#[test]
fn forbid_only_keeps_heights_and_lengths() {
    let mut s = Solver::new();
    let tasks = vec![
        fixed(&mut s, 3, 6, 3),
        fixed(&mut s, 10, 14, 3),
        task(&mut s, (0, 14), (2, 16), (2, 16), (2, 2), false),
    ];
    let cap = CapacityRange::new(-1000, 4);
    timetable_propagate(s.store_mut(), &tasks, cap, false, RuleMode::ForbidOnly).unwrap();
    assert_eq!(s.store().max(tasks[2].interval.duration), 16);
}

#[test]
fn fixed_overload_fails() {
    let mut s = Solver::new();
    let tasks = vec![fixed(&mut s, 4, 6, 2), fixed(&mut s, 4, 6, -3)];
    let res = timetable_propagate(s.store_mut(), &tasks, CapacityRange::new(0, 5), true, RuleMode::Auto);
    assert_eq!(res, Err(Inconsistency));
}

#[test]
fn forbid_pushes_start_and_end() {
    let mut s = Solver::new();
    let tasks = vec![
        fixed(&mut s, 0, 3, 2),
        fixed(&mut s, 8, 10, 2),
        task(&mut s, (0, 8), (2, 2), (2, 10), (1, 1), false),
    ];
    timetable_propagate(s.store_mut(), &tasks, CapacityRange::new(-100, 2), false, RuleMode::Auto).unwrap();
    assert_eq!(s.store().min(tasks[2].interval.start), 3);
    assert_eq!(s.store().max(tasks[2].interval.end), 8);
}

#[test]
fn forbid_on_optional_sets_absence() {
    let mut s = Solver::new();
    let tasks = vec![
        fixed(&mut s, 0, 10, 2),
        task(&mut s, (0, 8), (2, 2), (2, 10), (1, 1), true),
    ];
    timetable_propagate(s.store_mut(), &tasks, CapacityRange::new(-100, 2), false, RuleMode::Auto).unwrap();
    assert!(tasks[1].interval.is_absent(s.store()));
}

#[test]
fn zero_duration_is_not_forbidden() {
    let mut s = Solver::new();
    let tasks = vec![
        fixed(&mut s, 0, 10, 2),
        task(&mut s, (0, 8), (0, 2), (0, 10), (1, 1), false),
    ];
    timetable_propagate(s.store_mut(), &tasks, CapacityRange::new(-100, 2), false, RuleMode::Auto).unwrap();
    assert_eq!(s.store().min(tasks[1].interval.start), 0);
    assert_eq!(s.store().max(tasks[1].interval.end), 10);
}

#[test]
fn fruitless_removal_window() {
    let mut s = Solver::new();
    let tasks = vec![
        fixed(&mut s, 0, 2, 1),
        task(&mut s, (5, 8), (1, 1), (6, 9), (1, 1), false),
        fixed(&mut s, 7, 12, 1),
        fixed(&mut s, 9, 12, 1),
    ];
    let (kept, lo, hi) = remove_fruitless_fixed_tasks(&states(&s, &tasks)).unwrap();
    assert_eq!((lo, hi), (5, 9));
    assert_eq!(kept, vec![1, 2]);
}

#[test]
fn fruitless_removal_all_fixed() {
    let mut s = Solver::new();
    let tasks = vec![fixed(&mut s, 0, 2, 1), fixed(&mut s, 3, 4, 1)];
    assert!(remove_fruitless_fixed_tasks(&states(&s, &tasks)).is_none());
    let before = s.store().snapshot();
    timetable_propagate(s.store_mut(), &tasks, CapacityRange::new(0, 1), true, RuleMode::Auto).unwrap();
    assert_eq!(s.store().snapshot(), before);
}

#[test]
fn removed_fixed_tasks_are_still_checked() {
    let mut s = Solver::new();
    let tasks = vec![
        fixed(&mut s, 0, 2, 5),
        task(&mut s, (5, 8), (1, 1), (6, 9), (1, 1), false),
    ];
    let res = timetable_propagate(s.store_mut(), &tasks, CapacityRange::new(0, 3), true, RuleMode::Auto);
    assert_eq!(res, Err(Inconsistency));
}

#[test]
fn removal_does_not_invent_failures() {
    let mut s = Solver::new();
    // the consumer on [0, 5) lies outside the window and is removed; the
    // producer straddling the window must not be checked alone on [0, 5)
    let tasks = vec![
        fixed(&mut s, 0, 6, 3),
        fixed(&mut s, 0, 5, -1),
        task(&mut s, (5, 5), (1, 1), (6, 6), (-1, -1), true),
    ];
    let res = timetable_propagate(s.store_mut(), &tasks, CapacityRange::new(2, 2), true, RuleMode::Auto);
    assert_eq!(res, Ok(()));
    assert!(tasks[2].interval.is_present(s.store()));
}

#[test]
fn rule_selection() {
    let mut s = Solver::new();
    let positive = vec![fixed(&mut s, 0, 2, 1), fixed(&mut s, 1, 3, 2)];
    let flags = select_rules(&states(&s, &positive), false, RuleMode::Auto);
    assert_eq!(flags, RuleFlags { mandatory: false, height: false, length: false });

    let mixed = vec![
        task(&mut s, (0, 5), (1, 1), (1, 6), (2, 2), false),
        task(&mut s, (0, 5), (1, 3), (1, 8), (-2, -1), false),
    ];
    let flags = select_rules(&states(&s, &mixed), true, RuleMode::Auto);
    assert_eq!(flags, RuleFlags { mandatory: true, height: true, length: true });

    let flags = select_rules(&states(&s, &positive), false, RuleMode::All);
    assert!(flags.mandatory && flags.height && flags.length);
    let flags = select_rules(&states(&s, &mixed), true, RuleMode::ForbidOnly);
    assert!(!flags.any_extra());
}

#[test]
fn propagator_in_solver() {
    let mut s = Solver::new();
    let tasks = three_tasks(&mut s);
    let prop = GeneralizedCumulative::new(tasks.clone(), CapacityRange::new(0, 1), RuleMode::Auto);
    s.post(Box::new(prop));
    assert_eq!(s.propagate_to_fixpoint(), Fixpoint::Consistent);
    assert!(tasks[2].interval.is_present(s.store()));
    assert_eq!(s.store().max(tasks[2].height), -1);
}
