use gencumul_core::engine::{BoolVar, IntVar, LessEq, MaxOf, Objective, Propagator, Store, Sum, Watch};
use gencumul_core::{
    always_in, ge, le, pulse, step, step_at_end, step_at_start, CumulExpr, Height, IntervalVar, ModelConfig, ModelError,
    PropResult, RuleMode, Solver,
};

use crate::instance::{MespInstance, RcpspCprInstance, SmicInstance};

/// A posted model ready for search.
pub struct Model {
    pub solver: Solver,
    /// One interval per task, in declaration order.
    pub tasks: Vec<IntervalVar>,
    /// Height variables, MESP only.
    pub heights: Vec<IntVar>,
    pub objective: Objective,
    pub horizon: i64,
}

pub fn build_rcpsp_cpr(inst: &RcpspCprInstance, rules: RuleMode) -> Result<Model, ModelError> {
    inst.validate().map_err(|e| ModelError::Invalid(e.to_string()))?;
    let h = inst.horizon();
    let config = ModelConfig::new(h).with_rules(rules);
    let mut solver = Solver::new();
    let tasks = (0..inst.n_tasks)
        .map(|i| {
            let d = inst.d[i];
            IntervalVar::new(&mut solver, (0, h - d), (d, d), (d, h), false)
        })
        .collect::<Result<Vec<_>, _>>()?;

    for (i, succ) in inst.suc.iter().enumerate() {
        for &j in succ {
            solver.post(Box::new(LessEq::new(tasks[i].end, tasks[j].start, 0)));
        }
    }
    for k in 0..inst.n_res {
        let usage = CumulExpr::sum(
            (0..inst.n_tasks)
                .filter(|&i| inst.rr[k][i] > 0)
                .map(|i| pulse(tasks[i], inst.rr[k][i])),
        );
        le(&mut solver, &usage, inst.rc[k], &config)?;
    }
    for u in 0..inst.n_cp_res {
        let consumed = CumulExpr::sum(
            (0..inst.n_tasks)
                .filter(|&i| inst.rr_c[u][i] > 0)
                .map(|i| step_at_start(tasks[i], inst.rr_c[u][i])),
        );
        let produced = CumulExpr::sum(
            (0..inst.n_tasks)
                .filter(|&i| inst.rr_p[u][i] > 0)
                .map(|i| step_at_end(tasks[i], inst.rr_p[u][i])),
        );
        let level = step(0, inst.rcp[u]) - consumed + produced;
        ge(&mut solver, &level, 0, &config)?;
    }
    let makespan = makespan(&mut solver, &tasks, h)?;
    Ok(Model { solver, tasks, heights: Vec::new(), objective: Objective::minimize(makespan), horizon: h })
}

pub fn build_smic(inst: &SmicInstance, rules: RuleMode) -> Result<Model, ModelError> {
    inst.validate().map_err(|e| ModelError::Invalid(e.to_string()))?;
    let h = inst.horizon();
    let config = ModelConfig::new(h).with_rules(rules);
    let mut solver = Solver::new();
    let tasks = (0..inst.n_jobs)
        .map(|i| {
            let p = inst.processing[i];
            let r = inst.release[i];
            IntervalVar::new(&mut solver, (r, h - p), (p, p), (r + p, h), false)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut level = step(0, inst.init_inventory);
    for (i, &task) in tasks.iter().enumerate() {
        if inst.inventory[i] == 0 {
            continue;
        }
        let change = step_at_start(task, inst.inventory[i]);
        level = if inst.type_inventory[i] == 1 { level + change } else { level - change };
    }
    always_in(&mut solver, &level, 0, inst.capa_inventory, true, &config)?;
    let busy = CumulExpr::sum(tasks.iter().map(|&t| pulse(t, 1)));
    le(&mut solver, &busy, 1, &config)?;

    let makespan = makespan(&mut solver, &tasks, h)?;
    Ok(Model { solver, tasks, heights: Vec::new(), objective: Objective::minimize(makespan), horizon: h })
}

pub fn build_mesp(inst: &MespInstance, rules: RuleMode) -> Result<Model, ModelError> {
    inst.validate().map_err(|e| ModelError::Invalid(e.to_string()))?;
    let h = inst.horizon();
    let config = ModelConfig::new(h).with_rules(rules);
    let ml = inst.max_length;
    let mut solver = Solver::new();
    let mut tasks = Vec::with_capacity(inst.n_tasks);
    let mut heights = Vec::with_capacity(inst.n_tasks);
    let mut energies = Vec::with_capacity(inst.n_tasks);
    for i in 0..inst.n_tasks {
        let sm = inst.start_min[i];
        let task = IntervalVar::new(&mut solver, (sm, sm + ml - 1), (1, ml), (sm + 1, sm + 2 * ml - 1), true)?;
        let c = solver.store_mut().new_int(inst.height_min[i], inst.height_max[i])?;
        let e = solver.store_mut().new_int(0, inst.height_max[i].max(0) * ml)?;
        solver.post(Box::new(Energy { presence: task.presence, height: c, duration: task.duration, energy: e }));
        tasks.push(task);
        heights.push(c);
        energies.push(e);
    }
    let usage = CumulExpr::sum(tasks.iter().zip(&heights).map(|(&t, &c)| pulse(t, Height::Var(c))));
    le(&mut solver, &usage, inst.capa, &config)?;

    let upper: i64 = energies.iter().map(|&e| solver.store().max(e)).sum();
    let total = solver.store_mut().new_int(0, upper)?;
    solver.post(Box::new(Sum::new(energies, total)));
    Ok(Model { solver, tasks, heights, objective: Objective::maximize(total), horizon: h })
}

fn makespan(solver: &mut Solver, tasks: &[IntervalVar], horizon: i64) -> Result<IntVar, ModelError> {
    let mk = solver.store_mut().new_int(0, horizon.max(0))?;
    solver.post(Box::new(MaxOf::new(tasks.iter().map(|t| t.end).collect(), mk)));
    Ok(mk)
}

/// `energy = max(height, 0) * duration` when present, `0` when absent.
/// Filtered on bounds; `duration` is non-negative.
#[derive(Debug, Clone)]
pub struct Energy {
    pub presence: BoolVar,
    pub height: IntVar,
    pub duration: IntVar,
    pub energy: IntVar,
}

impl Propagator for Energy {
    fn propagate(&mut self, store: &mut Store) -> PropResult {
        let present = match store.bool_value(self.presence) {
            Some(false) => {
                store.fix(self.energy, 0)?;
                return Ok(());
            }
            Some(true) => true,
            None => false,
        };
        let (cl, ch) = (store.min(self.height).max(0), store.max(self.height).max(0));
        let (dl, dh) = (store.min(self.duration), store.max(self.duration));
        store.set_min(self.energy, if present { cl * dl } else { 0 })?;
        store.set_max(self.energy, ch * dh)?;

        let (el, eh) = (store.min(self.energy), store.max(self.energy));
        if el > 0 {
            // ch * dh >= el > 0 here
            store.set_bool(self.presence, true)?;
            store.set_min(self.height, div_ceil(el, dh))?;
            store.set_min(self.duration, div_ceil(el, ch))?;
        }
        if present || el > 0 {
            if dl > 0 {
                store.set_max(self.height, eh / dl)?;
            }
            let cl = store.min(self.height).max(0);
            if cl > 0 {
                store.set_max(self.duration, eh / cl)?;
            }
        }
        Ok(())
    }

    fn watches(&self) -> Vec<Watch> {
        vec![self.presence.into(), self.height.into(), self.duration.into(), self.energy.into()]
    }

    fn name(&self) -> &'static str {
        "energy"
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    (a + b - 1) / b
}
