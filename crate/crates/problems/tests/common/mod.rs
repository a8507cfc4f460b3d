//! Random small instances and exhaustive optima computed by direct
//! per-time evaluation.
#![allow(dead_code)]

use gencumul_problems::{RcpspCprInstance, SmicInstance};
use rand::Rng;

pub fn random_rcpsp(rng: &mut impl Rng, max_tasks: usize) -> RcpspCprInstance {
    let n = rng.random_range(1..=max_tasks);
    let n_res = rng.random_range(0..=2);
    let n_cp_res = rng.random_range(0..=1);
    let rc: Vec<i64> = (0..n_res).map(|_| rng.random_range(1..=3)).collect();
    let rr = (0..n_res).map(|k| (0..n).map(|_| rng.random_range(0..=rc[k])).collect()).collect();
    let rcp = (0..n_cp_res).map(|_| rng.random_range(0..=3)).collect();
    let rr_c = (0..n_cp_res).map(|_| (0..n).map(|_| rng.random_range(0..=2)).collect()).collect();
    let rr_p = (0..n_cp_res).map(|_| (0..n).map(|_| rng.random_range(0..=2)).collect()).collect();
    let suc = (0..n)
        .map(|i| (i + 1..n).filter(|_| rng.random_bool(0.3)).collect())
        .collect();
    RcpspCprInstance {
        n_res,
        rc,
        n_cp_res,
        rcp,
        n_tasks: n,
        d: (0..n).map(|_| rng.random_range(1..=4)).collect(),
        rr,
        rr_c,
        rr_p,
        suc,
    }
}

pub fn random_smic(rng: &mut impl Rng, max_jobs: usize) -> SmicInstance {
    let n = rng.random_range(1..=max_jobs);
    let init = rng.random_range(0..=4);
    SmicInstance {
        n_jobs: n,
        init_inventory: init,
        capa_inventory: init + rng.random_range(0..=5),
        type_inventory: (0..n).map(|_| rng.random_range(0..=1)).collect(),
        processing: (0..n).map(|_| rng.random_range(1..=4)).collect(),
        release: (0..n).map(|_| rng.random_range(0..=5)).collect(),
        inventory: (0..n).map(|_| rng.random_range(0..=4)).collect(),
    }
}

/// Calls `f` with every start vector in the product of the ranges.
fn for_each_start(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if ranges.iter().any(|r| r.0 > r.1) {
        return;
    }
    let mut s: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&s);
        let mut i = 0;
        loop {
            if i == s.len() {
                return;
            }
            if s[i] < ranges[i].1 {
                s[i] += 1;
                break;
            }
            s[i] = ranges[i].0;
            i += 1;
        }
    }
}

pub fn rcpsp_feasible(inst: &RcpspCprInstance, s: &[i64]) -> bool {
    let n = inst.n_tasks;
    let h = inst.horizon();
    let e: Vec<i64> = (0..n).map(|i| s[i] + inst.d[i]).collect();
    if (0..n).any(|i| s[i] < 0 || e[i] > h || inst.suc[i].iter().any(|&j| e[i] > s[j])) {
        return false;
    }
    (0..h).all(|tau| {
        let renewable = (0..inst.n_res).all(|k| {
            let used: i64 = (0..n).filter(|&i| s[i] <= tau && tau < e[i]).map(|i| inst.rr[k][i]).sum();
            used <= inst.rc[k]
        });
        let reservoir = (0..inst.n_cp_res).all(|u| {
            let mut level = inst.rcp[u];
            for i in 0..n {
                if s[i] <= tau {
                    level -= inst.rr_c[u][i];
                }
                if e[i] <= tau {
                    level += inst.rr_p[u][i];
                }
            }
            level >= 0
        });
        renewable && reservoir
    })
}

/// Minimum makespan by enumerating all start vectors.
pub fn brute_rcpsp(inst: &RcpspCprInstance) -> Option<i64> {
    let h = inst.horizon();
    let ranges: Vec<(i64, i64)> = inst.d.iter().map(|&d| (0, h - d)).collect();
    let mut best: Option<i64> = None;
    for_each_start(&ranges, |s| {
        if rcpsp_feasible(inst, s) {
            let mk = (0..inst.n_tasks).map(|i| s[i] + inst.d[i]).max().unwrap_or(0);
            best = Some(best.map_or(mk, |b| b.min(mk)));
        }
    });
    best
}

pub fn smic_feasible(inst: &SmicInstance, s: &[i64]) -> bool {
    let n = inst.n_jobs;
    let h = inst.horizon();
    let p = &inst.processing;
    if (0..n).any(|i| s[i] < inst.release[i] || s[i] + p[i] > h) {
        return false;
    }
    (0..h).all(|tau| {
        let busy = (0..n).filter(|&i| s[i] <= tau && tau < s[i] + p[i]).count();
        let level: i64 = inst.init_inventory + (0..n).filter(|&i| s[i] <= tau).map(|i| inst.delta(i)).sum::<i64>();
        busy <= 1 && (0..=inst.capa_inventory).contains(&level)
    })
}

pub fn brute_smic(inst: &SmicInstance) -> Option<i64> {
    let h = inst.horizon();
    let ranges: Vec<(i64, i64)> = (0..inst.n_jobs).map(|i| (inst.release[i], h - inst.processing[i])).collect();
    let mut best: Option<i64> = None;
    for_each_start(&ranges, |s| {
        if smic_feasible(inst, s) {
            let mk = (0..inst.n_jobs).map(|i| s[i] + inst.processing[i]).max().unwrap_or(0);
            best = Some(best.map_or(mk, |b| b.min(mk)));
        }
    });
    best
}
