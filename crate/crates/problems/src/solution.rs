//! Solutions and their verification. Each check rebuilds the cumulative
//! functions of the model as fixed tasks and replays them through
//! [`check_assignment`], independently of the propagators.

use gencumul_core::dzn::{self, DznError, DznWriter};
use gencumul_core::engine::{IntVar, Store};
use gencumul_core::oracle::{check_assignment, FixedTask};
use gencumul_core::timetable::CapacityRange;
use gencumul_core::IntervalVar;
use thiserror::Error;

use crate::instance::{MespInstance, RcpspCprInstance, SmicInstance};

/// Values of every task, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub present: Vec<bool>,
    pub start: Vec<i64>,
    pub duration: Vec<i64>,
    pub height: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct Violation(pub String);

fn violation<T>(msg: impl Into<String>) -> Result<T, Violation> {
    Err(Violation(msg.into()))
}

/// Large enough to never bind on the one-sided constraints.
const UNBOUNDED: i64 = 1 << 50;

impl Schedule {
    /// Read the fixed values of the tasks at a solution.
    pub fn read(tasks: &[IntervalVar], heights: &[IntVar], store: &Store) -> Self {
        let present = tasks.iter().map(|t| t.is_present(store)).collect();
        let start = tasks.iter().map(|t| store.min(t.start)).collect();
        let duration = tasks.iter().map(|t| store.min(t.duration)).collect();
        let height = heights.iter().map(|&c| store.min(c)).collect();
        Self { present, start, duration, height }
    }

    pub fn len(&self) -> usize {
        self.start.len()
    }

    pub fn is_empty(&self) -> bool {
        self.start.is_empty()
    }

    pub fn to_dzn(&self) -> String {
        let present: Vec<i64> = self.present.iter().map(|&p| p as i64).collect();
        DznWriter::new()
            .ints("present", &present)
            .ints("start", &self.start)
            .ints("duration", &self.duration)
            .ints("height", &self.height)
            .finish()
    }

    /// Only `start` is required; missing tasks default to present and
    /// missing durations to the instance's.
    pub fn from_dzn(text: &str) -> Result<Self, DznError> {
        let data = dzn::parse(text)?;
        let start = data.ints("start")?;
        let opt = |key: &str| if data.contains(key) { data.ints(key) } else { Ok(Vec::new()) };
        let present = if data.contains("present") {
            data.ints("present")?.into_iter().map(|p| p != 0).collect()
        } else {
            vec![true; start.len()]
        };
        Ok(Self { present, start, duration: opt("duration")?, height: opt("height")? })
    }

    fn check_len(&self, n: usize) -> Result<(), Violation> {
        if self.start.len() != n || self.present.len() != n {
            return violation(format!("solution has {} tasks, instance has {n}", self.start.len()));
        }
        Ok(())
    }

    fn check_durations(&self, d: &[i64]) -> Result<(), Violation> {
        if !self.duration.is_empty() && self.duration != d {
            return violation("durations differ from the instance");
        }
        if let Some(i) = self.present.iter().position(|p| !p) {
            return violation(format!("task {} is required but absent", i + 1));
        }
        Ok(())
    }
}

fn profile_ok(tasks: &[FixedTask], lo: i64, hi: i64) -> bool {
    check_assignment(tasks, CapacityRange::new(lo, hi))
}

fn within_horizon(s: i64, d: i64, lo: i64, h: i64, i: usize) -> Result<(), Violation> {
    if s < lo || s + d > h {
        return violation(format!("task {} runs over [{s}, {}) outside [{lo}, {h})", i + 1, s + d));
    }
    Ok(())
}

/// Returns the makespan.
pub fn verify_rcpsp_cpr(inst: &RcpspCprInstance, sol: &Schedule) -> Result<i64, Violation> {
    let n = inst.n_tasks;
    sol.check_len(n)?;
    sol.check_durations(&inst.d)?;
    let h = inst.horizon();
    let s = &sol.start;
    let e: Vec<i64> = (0..n).map(|i| s[i] + inst.d[i]).collect();
    for i in 0..n {
        within_horizon(s[i], inst.d[i], 0, h, i)?;
        for &j in &inst.suc[i] {
            if e[i] > s[j] {
                return violation(format!("task {} ends at {} after successor {} starts at {}", i + 1, e[i], j + 1, s[j]));
            }
        }
    }
    for k in 0..inst.n_res {
        let tasks: Vec<FixedTask> = (0..n).map(|i| FixedTask::present(s[i], inst.d[i], inst.rr[k][i])).collect();
        if !profile_ok(&tasks, -UNBOUNDED, inst.rc[k]) {
            return violation(format!("renewable resource {} over capacity", k + 1));
        }
    }
    for u in 0..inst.n_cp_res {
        let mut tasks = vec![FixedTask::present(0, h, inst.rcp[u])];
        for i in 0..n {
            tasks.push(FixedTask::present(s[i], h - s[i], -inst.rr_c[u][i]));
            tasks.push(FixedTask::present(e[i], h - e[i], inst.rr_p[u][i]));
        }
        if !profile_ok(&tasks, 0, UNBOUNDED) {
            return violation(format!("reservoir {} drops below zero", u + 1));
        }
    }
    Ok(e.into_iter().max().unwrap_or(0))
}

/// Returns the makespan.
pub fn verify_smic(inst: &SmicInstance, sol: &Schedule) -> Result<i64, Violation> {
    let n = inst.n_jobs;
    sol.check_len(n)?;
    sol.check_durations(&inst.processing)?;
    let h = inst.horizon();
    let s = &sol.start;
    for (i, (&si, &p)) in s.iter().zip(&inst.processing).enumerate() {
        within_horizon(si, p, inst.release[i], h, i)?;
    }
    let busy: Vec<FixedTask> = (0..n).map(|i| FixedTask::present(s[i], inst.processing[i], 1)).collect();
    if !profile_ok(&busy, -UNBOUNDED, 1) {
        return violation("jobs overlap");
    }
    let mut level = vec![FixedTask::present(0, h, inst.init_inventory)];
    level.extend((0..n).map(|i| FixedTask::present(s[i], h - s[i], inst.delta(i))));
    if !profile_ok(&level, 0, inst.capa_inventory) {
        return violation(format!("inventory leaves [0, {}]", inst.capa_inventory));
    }
    Ok((0..n).map(|i| s[i] + inst.processing[i]).max().unwrap_or(0))
}

/// Returns the total positive energy.
pub fn verify_mesp(inst: &MespInstance, sol: &Schedule) -> Result<i64, Violation> {
    let n = inst.n_tasks;
    sol.check_len(n)?;
    if sol.duration.len() != n || sol.height.len() != n {
        return violation("a MESP solution needs a duration and a height per task");
    }
    let ml = inst.max_length;
    let mut tasks = Vec::with_capacity(n);
    let mut energy = 0;
    for i in 0..n {
        if !sol.present[i] {
            tasks.push(FixedTask::absent());
            continue;
        }
        let (s, d, c) = (sol.start[i], sol.duration[i], sol.height[i]);
        let sm = inst.start_min[i];
        if !(sm..sm + ml).contains(&s) || !(1..=ml).contains(&d) {
            return violation(format!("task {} placed at [{s}, {}) outside its window", i + 1, s + d));
        }
        if !(inst.height_min[i]..=inst.height_max[i]).contains(&c) {
            return violation(format!("task {} height {c} outside its range", i + 1));
        }
        energy += c.max(0) * d;
        tasks.push(FixedTask::present(s, d, c));
    }
    if !profile_ok(&tasks, -UNBOUNDED, inst.capa) {
        return violation("resource over capacity");
    }
    Ok(energy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(start: Vec<i64>) -> Schedule {
        Schedule { present: vec![true; start.len()], start, duration: Vec::new(), height: Vec::new() }
    }

    #[test]
    fn dzn_round_trip() {
        let s = Schedule { present: vec![true, false], start: vec![1, 2], duration: vec![3, 4], height: vec![-1, 5] };
        assert_eq!(Schedule::from_dzn(&s.to_dzn()).unwrap(), s);
        assert_eq!(Schedule::from_dzn("start = [4];").unwrap(), sched(vec![4]));
    }

    #[test]
    fn smic_checks() {
        let inst = SmicInstance {
            n_jobs: 2,
            init_inventory: 1,
            capa_inventory: 3,
            type_inventory: vec![0, 1],
            processing: vec![2, 2],
            release: vec![0, 0],
            inventory: vec![2, 2],
        };
        // producer first keeps the level in [0, 3]
        assert_eq!(verify_smic(&inst, &sched(vec![2, 0])), Ok(4));
        assert!(verify_smic(&inst, &sched(vec![0, 2])).unwrap_err().0.contains("inventory"));
        assert!(verify_smic(&inst, &sched(vec![1, 0])).unwrap_err().0.contains("overlap"));
    }

    #[test]
    fn rcpsp_reservoir_check() {
        let inst = RcpspCprInstance {
            n_res: 0,
            rc: vec![],
            n_cp_res: 1,
            rcp: vec![0],
            n_tasks: 2,
            d: vec![2, 1],
            rr: vec![],
            rr_c: vec![vec![0, 1]],
            rr_p: vec![vec![1, 0]],
            suc: vec![vec![], vec![]],
        };
        assert_eq!(verify_rcpsp_cpr(&inst, &sched(vec![0, 2])), Ok(3));
        assert!(verify_rcpsp_cpr(&inst, &sched(vec![0, 1])).is_err());
    }
}
