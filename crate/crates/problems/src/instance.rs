//! The three instance formats. Files use the data-file dialect of
//! [`gencumul_core::dzn`]; task indices are 1-based in files and 0-based
//! in memory.

use gencumul_core::dzn::{self, DznData, DznError, DznWriter};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Parse(#[from] DznError),
    #[error("line {line}: `{key}` has {found} entries, expected {expected}")]
    Dimension {
        key: String,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("precedence graph has a cycle through task {0}")]
    Cycle(usize),
}

impl InstanceError {
    fn invalid(data: Option<&DznData>, key: &str, message: impl Into<String>) -> Self {
        InstanceError::Invalid {
            line: data.map_or(0, |d| d.line(key)),
            message: message.into(),
        }
    }
}

fn count(data: &DznData, key: &str) -> Result<usize, InstanceError> {
    let n = data.int(key)?;
    usize::try_from(n).map_err(|_| InstanceError::invalid(Some(data), key, format!("`{key}` must be non-negative")))
}

fn expect_len(data: Option<&DznData>, key: &str, found: usize, expected: usize) -> Result<(), InstanceError> {
    if found == expected {
        Ok(())
    } else {
        Err(InstanceError::Dimension {
            key: key.to_string(),
            line: data.map_or(0, |d| d.line(key)),
            expected,
            found,
        })
    }
}

fn expect_matrix(data: Option<&DznData>, key: &str, m: &[Vec<i64>], rows: usize, cols: usize) -> Result<(), InstanceError> {
    expect_len(data, key, m.len(), rows)?;
    for row in m {
        expect_len(data, key, row.len(), cols)?;
    }
    Ok(())
}

fn non_negative<'a>(data: Option<&DznData>, key: &str, xs: impl IntoIterator<Item = &'a i64>) -> Result<(), InstanceError> {
    match xs.into_iter().find(|&&x| x < 0) {
        Some(x) => Err(InstanceError::invalid(data, key, format!("`{key}` contains negative value {x}"))),
        None => Ok(()),
    }
}

/// Bound on every number in an instance, keeping horizons, sums and
/// products of a few values within `i64`.
pub const VALUE_LIMIT: i64 = 1 << 30;

fn bounded<'a>(data: Option<&DznData>, key: &str, xs: impl IntoIterator<Item = &'a i64>) -> Result<(), InstanceError> {
    match xs.into_iter().find(|x| x.abs() > VALUE_LIMIT) {
        Some(x) => Err(InstanceError::invalid(data, key, format!("`{key}` value {x} exceeds ±{VALUE_LIMIT}"))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RcpspCprInstance {
    pub n_res: usize,
    /// Renewable capacities.
    pub rc: Vec<i64>,
    pub n_cp_res: usize,
    /// Initial reservoir levels.
    pub rcp: Vec<i64>,
    pub n_tasks: usize,
    pub d: Vec<i64>,
    /// `rr[k][i]`: demand of task `i` on renewable resource `k`.
    pub rr: Vec<Vec<i64>>,
    /// `rr_c[u][i]`: consumption of task `i` from reservoir `u` at its start.
    pub rr_c: Vec<Vec<i64>>,
    /// `rr_p[u][i]`: production of task `i` into reservoir `u` at its end.
    pub rr_p: Vec<Vec<i64>>,
    /// Successors of each task, 0-based.
    pub suc: Vec<Vec<usize>>,
}

impl RcpspCprInstance {
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let data = dzn::parse(text)?;
        let n_tasks = count(&data, "n_tasks")?;
        let suc = data
            .sets("suc")?
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|j| match usize::try_from(j) {
                        Ok(j) if (1..=n_tasks).contains(&j) => Ok(j - 1),
                        _ => Err(InstanceError::invalid(
                            Some(&data),
                            "suc",
                            format!("successor {j} is not a task index in 1..={n_tasks}"),
                        )),
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        let inst = Self {
            n_res: count(&data, "n_res")?,
            rc: data.ints("rc")?,
            n_cp_res: count(&data, "n_cp_res")?,
            rcp: data.ints("rcp")?,
            n_tasks,
            d: data.ints("d")?,
            rr: data.matrix("rr")?,
            rr_c: data.matrix("rr_c")?,
            rr_p: data.matrix("rr_p")?,
            suc,
        };
        inst.check(Some(&data))?;
        Ok(inst)
    }

    pub fn to_dzn(&self) -> String {
        let suc: Vec<Vec<i64>> = self
            .suc
            .iter()
            .map(|row| row.iter().map(|&j| j as i64 + 1).collect())
            .collect();
        DznWriter::new()
            .int("n_res", self.n_res as i64)
            .ints("rc", &self.rc)
            .int("n_cp_res", self.n_cp_res as i64)
            .ints("rcp", &self.rcp)
            .int("n_tasks", self.n_tasks as i64)
            .ints("d", &self.d)
            .matrix("rr", &self.rr)
            .matrix("rr_c", &self.rr_c)
            .matrix("rr_p", &self.rr_p)
            .sets("suc", &suc)
            .finish()
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        self.check(None)
    }

    fn check(&self, data: Option<&DznData>) -> Result<(), InstanceError> {
        let n = self.n_tasks;
        expect_len(data, "rc", self.rc.len(), self.n_res)?;
        expect_len(data, "rcp", self.rcp.len(), self.n_cp_res)?;
        expect_len(data, "d", self.d.len(), n)?;
        expect_matrix(data, "rr", &self.rr, self.n_res, n)?;
        expect_matrix(data, "rr_c", &self.rr_c, self.n_cp_res, n)?;
        expect_matrix(data, "rr_p", &self.rr_p, self.n_cp_res, n)?;
        expect_len(data, "suc", self.suc.len(), n)?;
        bounded(data, "rc", &self.rc)?;
        bounded(data, "rcp", &self.rcp)?;
        bounded(data, "d", &self.d)?;
        bounded(data, "rr", self.rr.iter().flatten())?;
        bounded(data, "rr_c", self.rr_c.iter().flatten())?;
        bounded(data, "rr_p", self.rr_p.iter().flatten())?;
        non_negative(data, "rc", &self.rc)?;
        non_negative(data, "rcp", &self.rcp)?;
        non_negative(data, "d", &self.d)?;
        non_negative(data, "rr", self.rr.iter().flatten())?;
        non_negative(data, "rr_c", self.rr_c.iter().flatten())?;
        non_negative(data, "rr_p", self.rr_p.iter().flatten())?;
        if let Some(&j) = self.suc.iter().flatten().find(|&&j| j >= n) {
            return Err(InstanceError::invalid(data, "suc", format!("successor {} out of range", j + 1)));
        }
        match self.topological_order() {
            Ok(_) => Ok(()),
            Err(i) => Err(InstanceError::Cycle(i + 1)),
        }
    }

    /// Tasks ordered so that every task comes before its successors, or
    /// a task on a cycle.
    pub fn topological_order(&self) -> Result<Vec<usize>, usize> {
        let n = self.n_tasks;
        let mut indegree = vec![0usize; n];
        for &j in self.suc.iter().flatten() {
            indegree[j] += 1;
        }
        let mut ready: Vec<usize> = (0..n).rev().filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop() {
            order.push(i);
            for &j in &self.suc[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(j);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err((0..n).find(|&i| indegree[i] > 0).unwrap())
        }
    }

    pub fn horizon(&self) -> i64 {
        self.d.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmicInstance {
    pub n_jobs: usize,
    pub init_inventory: i64,
    pub capa_inventory: i64,
    /// 1 for a producing job, 0 for a consuming one.
    pub type_inventory: Vec<i64>,
    pub processing: Vec<i64>,
    pub release: Vec<i64>,
    pub inventory: Vec<i64>,
}

impl SmicInstance {
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let data = dzn::parse(text)?;
        let inst = Self {
            n_jobs: count(&data, "n_jobs")?,
            init_inventory: data.int("init_inventory")?,
            capa_inventory: data.int("capa_inventory")?,
            type_inventory: data.ints("type_inventory")?,
            processing: data.ints("processing")?,
            release: data.ints("release")?,
            inventory: data.ints("inventory")?,
        };
        inst.check(Some(&data))?;
        Ok(inst)
    }

    pub fn to_dzn(&self) -> String {
        DznWriter::new()
            .int("n_jobs", self.n_jobs as i64)
            .int("init_inventory", self.init_inventory)
            .int("capa_inventory", self.capa_inventory)
            .ints("type_inventory", &self.type_inventory)
            .ints("processing", &self.processing)
            .ints("release", &self.release)
            .ints("inventory", &self.inventory)
            .finish()
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        self.check(None)
    }

    fn check(&self, data: Option<&DznData>) -> Result<(), InstanceError> {
        let n = self.n_jobs;
        expect_len(data, "type_inventory", self.type_inventory.len(), n)?;
        expect_len(data, "processing", self.processing.len(), n)?;
        expect_len(data, "release", self.release.len(), n)?;
        expect_len(data, "inventory", self.inventory.len(), n)?;
        if let Some(t) = self.type_inventory.iter().find(|&&t| t != 0 && t != 1) {
            return Err(InstanceError::invalid(data, "type_inventory", format!("job type must be 0 or 1, got {t}")));
        }
        bounded(data, "init_inventory", [&self.init_inventory])?;
        bounded(data, "capa_inventory", [&self.capa_inventory])?;
        bounded(data, "processing", &self.processing)?;
        bounded(data, "release", &self.release)?;
        bounded(data, "inventory", &self.inventory)?;
        non_negative(data, "capa_inventory", [&self.capa_inventory])?;
        non_negative(data, "processing", &self.processing)?;
        non_negative(data, "release", &self.release)?;
        non_negative(data, "inventory", &self.inventory)?;
        Ok(())
    }

    /// Signed inventory change at the start of job `i`.
    pub fn delta(&self, i: usize) -> i64 {
        if self.type_inventory[i] == 1 {
            self.inventory[i]
        } else {
            -self.inventory[i]
        }
    }

    pub fn horizon(&self) -> i64 {
        self.processing.iter().sum::<i64>() + self.release.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MespInstance {
    pub n_tasks: usize,
    pub capa: i64,
    pub max_length: i64,
    pub start_min: Vec<i64>,
    pub height_min: Vec<i64>,
    pub height_max: Vec<i64>,
}

impl MespInstance {
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let data = dzn::parse(text)?;
        let inst = Self {
            n_tasks: count(&data, "n_tasks")?,
            capa: data.int("capa")?,
            max_length: data.int("max_length")?,
            start_min: data.ints("start_min")?,
            height_min: data.ints("height_min")?,
            height_max: data.ints("height_max")?,
        };
        inst.check(Some(&data))?;
        Ok(inst)
    }

    pub fn to_dzn(&self) -> String {
        DznWriter::new()
            .int("n_tasks", self.n_tasks as i64)
            .int("capa", self.capa)
            .int("max_length", self.max_length)
            .ints("start_min", &self.start_min)
            .ints("height_min", &self.height_min)
            .ints("height_max", &self.height_max)
            .finish()
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        self.check(None)
    }

    fn check(&self, data: Option<&DznData>) -> Result<(), InstanceError> {
        let n = self.n_tasks;
        expect_len(data, "start_min", self.start_min.len(), n)?;
        expect_len(data, "height_min", self.height_min.len(), n)?;
        expect_len(data, "height_max", self.height_max.len(), n)?;
        bounded(data, "capa", [&self.capa])?;
        bounded(data, "max_length", [&self.max_length])?;
        bounded(data, "start_min", &self.start_min)?;
        bounded(data, "height_min", &self.height_min)?;
        bounded(data, "height_max", &self.height_max)?;
        if self.max_length < 1 {
            return Err(InstanceError::invalid(data, "max_length", "`max_length` must be at least 1"));
        }
        non_negative(data, "start_min", &self.start_min)?;
        if let Some(i) = (0..n).find(|&i| self.height_min[i] > self.height_max[i]) {
            return Err(InstanceError::invalid(
                data,
                "height_min",
                format!("task {}: height_min {} exceeds height_max {}", i + 1, self.height_min[i], self.height_max[i]),
            ));
        }
        Ok(())
    }

    /// Exclusive bound on every end time.
    pub fn horizon(&self) -> i64 {
        self.start_min.iter().copied().max().unwrap_or(0) + 2 * self.max_length - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RCPSP: &str = "
        n_res = 1; rc = [2];
        n_cp_res = 1; rcp = [1];
        n_tasks = 3; d = [2, 3, 4];
        rr = [[1, 1, 2]];
        rr_c = [[1, 0, 0]];
        rr_p = [[0, 1, 0]];
        suc = [{2}, {3}, {}];
    ";

    #[test]
    fn rcpsp_successors_are_zero_based() {
        let inst = RcpspCprInstance::parse(RCPSP).unwrap();
        assert_eq!(inst.suc, vec![vec![1], vec![2], vec![]]);
        assert_eq!(inst.horizon(), 9);
        assert_eq!(inst.topological_order(), Ok(vec![0, 1, 2]));
    }

    #[test]
    fn rcpsp_minimal() {
        let text = "n_res = 0; rc = []; n_cp_res = 0; rcp = []; n_tasks = 1; d = [0];
                    rr = []; rr_c = []; rr_p = []; suc = [{}];";
        let inst = RcpspCprInstance::parse(text).unwrap();
        assert_eq!(inst.n_tasks, 1);
        let one_res = "n_res = 1; rc = [0]; n_cp_res = 1; rcp = [0]; n_tasks = 1; d = [0];
                    rr = [[0]]; rr_c = [[0]]; rr_p = [[0]]; suc = [{}];";
        assert!(RcpspCprInstance::parse(one_res).is_ok());
    }

    #[test]
    fn rcpsp_swapped_dimensions() {
        let text = RCPSP.replace("rr = [[1, 1, 2]]", "rr = [[1], [1], [2]]");
        let err = RcpspCprInstance::parse(&text).unwrap_err();
        assert!(matches!(err, InstanceError::Dimension { ref key, line: 5, .. } if key == "rr"), "{err}");
    }

    #[test]
    fn rcpsp_cycle() {
        let text = RCPSP.replace("{}]", "{1}]");
        assert_eq!(RcpspCprInstance::parse(&text).unwrap_err(), InstanceError::Cycle(1));
    }

    #[test]
    fn rcpsp_bad_successor() {
        let text = RCPSP.replace("{3}", "{4}");
        let err = RcpspCprInstance::parse(&text).unwrap_err();
        assert!(matches!(err, InstanceError::Invalid { line: 8, .. }), "{err}");
    }

    #[test]
    fn rcpsp_round_trip() {
        let inst = RcpspCprInstance::parse(RCPSP).unwrap();
        assert_eq!(RcpspCprInstance::parse(&inst.to_dzn()).unwrap(), inst);
    }

    const SMIC: &str = "n_jobs = 1; init_inventory = 0; capa_inventory = 5;
        type_inventory = [1]; processing = [3]; release = [2]; inventory = [4];";

    #[test]
    fn smic_one_producer() {
        let inst = SmicInstance::parse(SMIC).unwrap();
        assert_eq!(inst.delta(0), 4);
        assert_eq!(inst.horizon(), 5);
        assert_eq!(SmicInstance::parse(&inst.to_dzn()).unwrap(), inst);
    }

    #[test]
    fn smic_rejects_type_two() {
        let err = SmicInstance::parse(&SMIC.replace("type_inventory = [1]", "type_inventory = [2]")).unwrap_err();
        assert!(matches!(err, InstanceError::Invalid { line: 2, .. }), "{err}");
    }

    #[test]
    fn smic_missing_key() {
        let err = SmicInstance::parse("n_jobs = 0;").unwrap_err();
        assert!(err.to_string().contains("missing `init_inventory`"), "{err}");
    }

    const MESP: &str = "n_tasks = 2; capa = 4; max_length = 3;
        start_min = [0, 2]; height_min = [-2, 1]; height_max = [3, 1];";

    #[test]
    fn mesp_parse() {
        let inst = MespInstance::parse(MESP).unwrap();
        assert_eq!(inst.horizon(), 7);
        assert_eq!(MespInstance::parse(&inst.to_dzn()).unwrap(), inst);
    }

    #[test]
    fn mesp_rejects_inverted_heights() {
        let err = MespInstance::parse(&MESP.replace("height_max = [3, 1]", "height_max = [3, 0]")).unwrap_err();
        assert!(err.to_string().contains("task 2"), "{err}");
    }

    #[test]
    fn mesp_rejects_zero_length() {
        assert!(MespInstance::parse(&MESP.replace("max_length = 3", "max_length = 0")).is_err());
    }
}
