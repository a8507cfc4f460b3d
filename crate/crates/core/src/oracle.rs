//! Brute-force semantics of the generalized cumulative constraint, used to
//! test the propagator: a direct checker for fixed assignments, exhaustive
//! enumeration over small domains and a randomized differential harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cumul::CumulTask;
use crate::dzn::{self, DznError, DznWriter};
use crate::engine::{Fixpoint, Solver, Store};
use crate::interval::IntervalVar;
use crate::timetable::{timetable_propagate, CapacityRange, GeneralizedCumulative, RuleMode};

/// A fully decided task. Attributes of an absent task are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedTask {
    pub present: bool,
    pub s: i64,
    pub d: i64,
    pub e: i64,
    pub c: i64,
}

impl FixedTask {
    pub fn present(s: i64, d: i64, c: i64) -> Self {
        Self { present: true, s, d, e: s + d, c }
    }

    pub fn absent() -> Self {
        Self { present: false, s: 0, d: 0, e: 0, c: 0 }
    }
}

/// True iff at every time covered by a present task the sum of the heights
/// of the present tasks covering it lies in `cap`.
pub fn check_assignment(tasks: &[FixedTask], cap: CapacityRange) -> bool {
    let live: Vec<&FixedTask> = tasks.iter().filter(|t| t.present && t.s < t.e).collect();
    // the sum is constant between consecutive starts and ends
    let mut times: Vec<i64> = live.iter().flat_map(|t| [t.s, t.e]).collect();
    times.sort_unstable();
    times.dedup();
    times.into_iter().all(|tau| {
        let mut covered = false;
        let mut sum = 0i64;
        for t in &live {
            if t.s <= tau && tau < t.e {
                covered = true;
                sum += t.c;
            }
        }
        !covered || (cap.lo <= sum && sum <= cap.hi)
    })
}

/// Bounds of one task before filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskDomain {
    pub optional: bool,
    pub s: (i64, i64),
    pub d: (i64, i64),
    pub e: (i64, i64),
    pub c: (i64, i64),
}

impl TaskDomain {
    pub fn contains(&self, t: &FixedTask) -> bool {
        if !t.present {
            return self.optional;
        }
        let within = |v: i64, r: (i64, i64)| r.0 <= v && v <= r.1;
        within(t.s, self.s) && within(t.d, self.d) && within(t.e, self.e) && within(t.c, self.c) && t.e == t.s + t.d
    }

    /// Present placements (those with `e = s + d` inside the end range),
    /// plus the absent one for optional tasks.
    fn values(&self) -> Vec<FixedTask> {
        let mut out = Vec::new();
        if self.optional {
            out.push(FixedTask::absent());
        }
        for s in self.s.0..=self.s.1 {
            for d in self.d.0.max(0)..=self.d.1 {
                let e = s + d;
                if e < self.e.0 || e > self.e.1 {
                    continue;
                }
                for c in self.c.0..=self.c.1 {
                    out.push(FixedTask::present(s, d, c));
                }
            }
        }
        out
    }

    fn raw_size(&self) -> u128 {
        let w = |r: (i64, i64)| (r.1 - r.0 + 1).max(0) as u128;
        w(self.s) * w(self.d) * w(self.c) + self.optional as u128
    }
}

pub const DEFAULT_ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("search space of {size} assignments exceeds the limit of {limit}")]
pub struct TooLarge {
    pub size: u128,
    pub limit: u128,
}

/// Product of the per-task domain sizes.
pub fn search_space(domains: &[TaskDomain]) -> u128 {
    domains
        .iter()
        .map(TaskDomain::raw_size)
        .fold(1u128, |acc, x| acc.saturating_mul(x))
}

/// Visit every satisfying assignment; `visit` returns false to stop early.
pub fn for_each_solution(
    domains: &[TaskDomain],
    cap: CapacityRange,
    limit: u128,
    mut visit: impl FnMut(&[FixedTask]) -> bool,
) -> Result<(), TooLarge> {
    let size = search_space(domains);
    if size > limit {
        return Err(TooLarge { size, limit });
    }
    let values: Vec<Vec<FixedTask>> = domains.iter().map(TaskDomain::values).collect();
    if values.iter().any(Vec::is_empty) {
        return Ok(());
    }
    let mut idx = vec![0usize; domains.len()];
    let mut current: Vec<FixedTask> = values.iter().map(|v| v[0]).collect();
    loop {
        if check_assignment(&current, cap) && !visit(&current) {
            return Ok(());
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == domains.len() {
                return Ok(());
            }
            idx[k] += 1;
            if idx[k] < values[k].len() {
                current[k] = values[k][idx[k]];
                break;
            }
            idx[k] = 0;
            current[k] = values[k][0];
            k += 1;
        }
    }
}

/// Every satisfying assignment, in enumeration order.
pub fn enumerate_all(domains: &[TaskDomain], cap: CapacityRange, limit: u128) -> Result<Vec<Vec<FixedTask>>, TooLarge> {
    let mut out = Vec::new();
    for_each_solution(domains, cap, limit, |sol| {
        out.push(sol.to_vec());
        true
    })?;
    Ok(out)
}

/// A small random instance for the differential harness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trial {
    pub tasks: Vec<TaskDomain>,
    pub cap: CapacityRange,
    pub lower_is_real: bool,
    pub mode: RuleMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParams {
    pub max_tasks: usize,
    pub max_horizon: i64,
    pub max_abs_height: i64,
    pub optional_rate: f64,
    pub negative_rate: f64,
    pub hybrid_rate: f64,
    pub max_start_width: i64,
    pub max_duration_width: i64,
    /// Run the whole propagation queue instead of one timetable call.
    pub fixpoint: bool,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            max_tasks: 5,
            max_horizon: 12,
            max_abs_height: 3,
            optional_rate: 0.3,
            negative_rate: 0.25,
            hybrid_rate: 0.1,
            max_start_width: 2,
            max_duration_width: 1,
            fixpoint: false,
        }
    }
}

pub fn random_trial(rng: &mut impl Rng, p: &GeneratorParams) -> Trial {
    let horizon = rng.random_range(4..=p.max_horizon.max(4));
    let n = rng.random_range(1..=p.max_tasks.max(1));
    let h = p.max_abs_height.max(1);
    let tasks = (0..n)
        .map(|_| {
            let optional = rng.random_bool(p.optional_rate);
            let d_lo = if rng.random_bool(0.1) { 0 } else { rng.random_range(1..=3.min(horizon)) };
            let d = (d_lo, d_lo + rng.random_range(0..=p.max_duration_width.max(0)));
            let s_lo = rng.random_range(0..=(horizon - d.0).max(0));
            let s = (s_lo, (s_lo + rng.random_range(0..=p.max_start_width.max(0))).min(horizon - d.0));
            let mut e = (s.0 + d.0, (s.1 + d.1).min(horizon));
            if rng.random_bool(0.2) && e.1 > e.0 {
                e.1 -= 1;
            }
            let kind: f64 = rng.random();
            let c = if kind < p.hybrid_rate {
                (-rng.random_range(1..=h), rng.random_range(1..=h))
            } else if kind < p.hybrid_rate + p.negative_rate {
                let lo = -rng.random_range(1..=h);
                (lo, (lo + rng.random_range(0..=1)).min(0))
            } else {
                let lo = rng.random_range(0..=h);
                (lo, (lo + rng.random_range(0..=1)).min(h))
            };
            TaskDomain { optional, s, d, e, c }
        })
        .collect();
    let lower_is_real = rng.random_bool(0.7);
    let (lo, hi) = if lower_is_real {
        let lo = rng.random_range(-3..=1);
        (lo, lo + rng.random_range(0..=4))
    } else {
        (-1000, rng.random_range(0..=4))
    };
    let mode = match rng.random_range(0..10) {
        0..=4 => RuleMode::Auto,
        5..=8 => RuleMode::All,
        _ => RuleMode::ForbidOnly,
    };
    Trial { tasks, cap: CapacityRange::new(lo, hi), lower_is_real, mode }
}

/// A fully fixed random instance: each domain is a single placement.
pub fn random_fixed_trial(rng: &mut impl Rng, p: &GeneratorParams) -> (Vec<FixedTask>, CapacityRange) {
    let trial = random_trial(rng, p);
    let tasks = trial
        .tasks
        .iter()
        .map(|dom| {
            if dom.optional && rng.random_bool(0.5) {
                return FixedTask::absent();
            }
            let s = rng.random_range(dom.s.0..=dom.s.1);
            let d = rng.random_range(dom.d.0..=dom.d.1);
            let c = rng.random_range(dom.c.0..=dom.c.1);
            FixedTask::present(s, d, c)
        })
        .collect();
    (tasks, trial.cap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    /// A solution inside the initial domains was filtered out.
    PruneSoundness,
    /// Propagation failed although a solution exists.
    FailSoundness,
}

impl Property {
    pub fn as_str(&self) -> &'static str {
        match self {
            Property::PruneSoundness => "prune-soundness",
            Property::FailSoundness => "fail-soundness",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: Trial,
    pub property: Property,
    pub witness: Vec<FixedTask>,
}

/// Outcome of one trial when no property is violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub failed: bool,
    pub solutions: u64,
    pub pruned_values: u64,
}

struct Posted {
    solver: Solver,
    tasks: Vec<CumulTask>,
}

fn post(trial: &Trial) -> Option<Posted> {
    let mut solver = Solver::new();
    let mut tasks = Vec::with_capacity(trial.tasks.len());
    for dom in &trial.tasks {
        let interval = IntervalVar::new(&mut solver, dom.s, dom.d, dom.e, dom.optional).ok()?;
        let height = solver.store_mut().new_int(dom.c.0, dom.c.1).ok()?;
        tasks.push(CumulTask { interval, height });
    }
    Some(Posted { solver, tasks })
}

fn within_post(store: &Store, task: &CumulTask, t: &FixedTask) -> bool {
    let iv = task.interval;
    if !t.present {
        return !iv.is_present(store);
    }
    let has = |v, x| store.domain(v).contains(x);
    !iv.is_absent(store)
        && has(iv.start, t.s)
        && has(iv.duration, t.d)
        && has(iv.end, t.e)
        && has(task.height, t.c)
}

fn domain_width(store: &Store, tasks: &[CumulTask]) -> u64 {
    tasks
        .iter()
        .map(|t| {
            let w = |v| {
                let d = store.domain(v);
                (d.hi - d.lo + 1).max(0) as u64
            };
            let iv = t.interval;
            let absent = iv.is_absent(store) as u64;
            (1 - absent) * (w(iv.start) + w(iv.duration) + w(iv.end) + w(t.height))
                + store.bool_value(iv.presence).is_none() as u64
        })
        .sum()
}

/// Propagate once on the trial and compare against the oracle.
pub fn run_trial(trial: &Trial, fixpoint: bool) -> Result<TrialOutcome, Box<Counterexample>> {
    let Some(mut posted) = post(trial) else {
        return Ok(TrialOutcome { failed: true, solutions: 0, pruned_values: 0 });
    };
    let before = domain_width(posted.solver.store(), &posted.tasks);
    let failed = if fixpoint {
        posted.solver.post(Box::new(
            GeneralizedCumulative::new(posted.tasks.clone(), trial.cap, trial.mode)
                .with_lower_bound_real(trial.lower_is_real),
        ));
        posted.solver.propagate_to_fixpoint() == Fixpoint::Failed
    } else {
        timetable_propagate(
            posted.solver.store_mut(),
            &posted.tasks,
            trial.cap,
            trial.lower_is_real,
            trial.mode,
        )
        .is_err()
    };
    let after = if failed { 0 } else { domain_width(posted.solver.store(), &posted.tasks) };

    let mut solutions = 0u64;
    let mut violation: Option<Counterexample> = None;
    let store = posted.solver.store();
    for_each_solution(&trial.tasks, trial.cap, DEFAULT_ENUMERATION_LIMIT, |sol| {
        solutions += 1;
        let property = if failed {
            Some(Property::FailSoundness)
        } else if !sol.iter().zip(&posted.tasks).all(|(t, task)| within_post(store, task, t)) {
            Some(Property::PruneSoundness)
        } else {
            None
        };
        if let Some(property) = property {
            violation = Some(Counterexample { trial: trial.clone(), property, witness: sol.to_vec() });
            return false;
        }
        true
    })
    .expect("trial generator keeps domains small");
    match violation {
        Some(cx) => Err(Box::new(cx)),
        None => Ok(TrialOutcome { failed, solutions, pruned_values: before.saturating_sub(after) }),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DiffSummary {
    pub trials: u64,
    pub failures: u64,
    pub prunings: u64,
    pub optional_tasks: u64,
    pub tasks: u64,
}

/// Run `trials` random trials from `seed`, stopping at the first violation.
pub fn differential_test(seed: u64, trials: u64, params: &GeneratorParams) -> Result<DiffSummary, Box<Counterexample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = DiffSummary::default();
    for _ in 0..trials {
        let trial = random_trial(&mut rng, params);
        summary.tasks += trial.tasks.len() as u64;
        summary.optional_tasks += trial.tasks.iter().filter(|t| t.optional).count() as u64;
        let outcome = run_trial(&trial, params.fixpoint)?;
        summary.trials += 1;
        summary.failures += outcome.failed as u64;
        summary.prunings += (outcome.pruned_values > 0) as u64;
    }
    Ok(summary)
}

fn mode_code(mode: RuleMode) -> i64 {
    match mode {
        RuleMode::Auto => 0,
        RuleMode::All => 1,
        RuleMode::ForbidOnly => 2,
    }
}

impl Trial {
    pub fn to_dzn(&self) -> String {
        let col = |f: &dyn Fn(&TaskDomain) -> i64| self.tasks.iter().map(f).collect::<Vec<_>>();
        DznWriter::new()
            .int("n_tasks", self.tasks.len() as i64)
            .int("cap_min", self.cap.lo)
            .int("cap_max", self.cap.hi)
            .bool("cap_min_real", self.lower_is_real)
            .int("rules", mode_code(self.mode))
            .ints("optional", &col(&|t| t.optional as i64))
            .ints("s_min", &col(&|t| t.s.0))
            .ints("s_max", &col(&|t| t.s.1))
            .ints("d_min", &col(&|t| t.d.0))
            .ints("d_max", &col(&|t| t.d.1))
            .ints("e_min", &col(&|t| t.e.0))
            .ints("e_max", &col(&|t| t.e.1))
            .ints("c_min", &col(&|t| t.c.0))
            .ints("c_max", &col(&|t| t.c.1))
            .finish()
    }

    pub fn from_dzn(text: &str) -> Result<Self, DznError> {
        let data = dzn::parse(text)?;
        let n = data.int("n_tasks")?;
        let col = |key: &str| -> Result<Vec<i64>, DznError> {
            let v = data.ints(key)?;
            if v.len() as i64 != n {
                return Err(DznError::new(data.line(key), format!("`{key}` must have n_tasks entries")));
            }
            Ok(v)
        };
        let (opt, smin, smax, dmin, dmax, emin, emax, cmin, cmax) = (
            col("optional")?,
            col("s_min")?,
            col("s_max")?,
            col("d_min")?,
            col("d_max")?,
            col("e_min")?,
            col("e_max")?,
            col("c_min")?,
            col("c_max")?,
        );
        let tasks = (0..n as usize)
            .map(|i| TaskDomain {
                optional: opt[i] != 0,
                s: (smin[i], smax[i]),
                d: (dmin[i], dmax[i]),
                e: (emin[i], emax[i]),
                c: (cmin[i], cmax[i]),
            })
            .collect();
        let (lo, hi) = (data.int("cap_min")?, data.int("cap_max")?);
        if lo > hi {
            return Err(DznError::new(data.line("cap_max"), "cap_min exceeds cap_max"));
        }
        let mode = match data.int("rules")? {
            0 => RuleMode::Auto,
            1 => RuleMode::All,
            2 => RuleMode::ForbidOnly,
            _ => return Err(DznError::new(data.line("rules"), "rules must be 0, 1 or 2")),
        };
        Ok(Trial {
            tasks,
            cap: CapacityRange::new(lo, hi),
            lower_is_real: data.bool("cap_min_real")?,
            mode,
        })
    }
}

impl Counterexample {
    /// The trial followed by the witness, in data-file text.
    pub fn to_dzn(&self) -> String {
        let mut text = format!("% violated property: {}\n", self.property.as_str());
        text.push_str(&self.trial.to_dzn());
        let col = |f: &dyn Fn(&FixedTask) -> i64| self.witness.iter().map(f).collect::<Vec<_>>();
        text.push_str(
            &DznWriter::new()
                .ints("w_present", &col(&|t| t.present as i64))
                .ints("w_s", &col(&|t| t.s))
                .ints("w_d", &col(&|t| t.d))
                .ints("w_c", &col(&|t| t.c))
                .finish(),
        );
        text
    }

    pub fn from_dzn(text: &str) -> Result<Self, DznError> {
        let trial = Trial::from_dzn(text)?;
        let data = dzn::parse(text)?;
        let (p, s, d, c) = (data.ints("w_present")?, data.ints("w_s")?, data.ints("w_d")?, data.ints("w_c")?);
        let n = trial.tasks.len();
        if [p.len(), s.len(), d.len(), c.len()].iter().any(|&l| l != n) {
            return Err(DznError::new(data.line("w_present"), "witness must have n_tasks entries"));
        }
        let witness = (0..n)
            .map(|i| if p[i] != 0 { FixedTask::present(s[i], d[i], c[i]) } else { FixedTask::absent() })
            .collect();
        let property = text
            .lines()
            .find_map(|l| l.strip_prefix("% violated property: "))
            .map(str::trim);
        let property = match property {
            Some("fail-soundness") => Property::FailSoundness,
            _ => Property::PruneSoundness,
        };
        Ok(Counterexample { trial, property, witness })
    }

    /// Re-run the trial; true iff the recorded witness is still a solution
    /// that propagation removes.
    pub fn reproduces(&self, fixpoint: bool) -> bool {
        if !check_assignment(&self.witness, self.trial.cap)
            || !self.trial.tasks.iter().zip(&self.witness).all(|(d, t)| d.contains(t))
        {
            return false;
        }
        let Some(mut posted) = post(&self.trial) else {
            return true;
        };
        let failed = if fixpoint {
            posted.solver.post(Box::new(
                GeneralizedCumulative::new(posted.tasks.clone(), self.trial.cap, self.trial.mode)
                    .with_lower_bound_real(self.trial.lower_is_real),
            ));
            posted.solver.propagate_to_fixpoint() == Fixpoint::Failed
        } else {
            timetable_propagate(
                posted.solver.store_mut(),
                &posted.tasks,
                self.trial.cap,
                self.trial.lower_is_real,
                self.trial.mode,
            )
            .is_err()
        };
        let store = posted.solver.store();
        failed
            || !self
                .witness
                .iter()
                .zip(&posted.tasks)
                .all(|(t, task)| within_post(store, task, t))
    }
}
