use gencumul_core::engine::{Brancher, Decision, IntVar, Store};
use gencumul_core::{Attr, IntervalVar, Status};

/// Fixes start times in declaration order: `s = s_min`, else `s >= s_min + 1`.
pub fn static_est_search(tasks: Vec<IntervalVar>) -> impl Brancher {
    move |store: &Store| -> Vec<Decision> {
        let Some(&task) = tasks
            .iter()
            .find(|t| t.status(store) != Status::Absent && !store.is_fixed(t.start))
        else {
            return Vec::new();
        };
        let est = store.min(task.start);
        vec![
            Box::new(move |st: &mut Store| task.set_max(st, Attr::Start, est).map(drop)),
            Box::new(move |st: &mut Store| task.set_min(st, Attr::Start, est + 1).map(drop)),
        ]
    }
}

/// Per task in declaration order, fixes presence to true, then height,
/// duration and end to their maximum. The right branch removes the value.
/// The start follows from the link once duration and end are fixed.
pub fn greedy_mesp_search(tasks: Vec<IntervalVar>, heights: Vec<IntVar>) -> impl Brancher {
    assert_eq!(tasks.len(), heights.len());
    move |store: &Store| -> Vec<Decision> {
        for (&task, &c) in tasks.iter().zip(&heights) {
            match task.status(store) {
                Status::Absent => continue,
                Status::Optional => {
                    return vec![
                        Box::new(move |st: &mut Store| task.set_present(st).map(drop)),
                        Box::new(move |st: &mut Store| task.set_absent(st).map(drop)),
                    ];
                }
                Status::Present => {}
            }
            if !store.is_fixed(c) {
                return max_or_below(c);
            }
            for var in [task.duration, task.end, task.start] {
                if !store.is_fixed(var) {
                    return max_or_below(var);
                }
            }
        }
        Vec::new()
    }
}

fn max_or_below(var: IntVar) -> Vec<Decision> {
    vec![
        Box::new(move |st: &mut Store| st.set_min(var, st.max(var)).map(drop)),
        Box::new(move |st: &mut Store| st.set_max(var, st.max(var) - 1).map(drop)),
    ]
}
