use super::{IntVar, Propagator, Store, Watch};
use crate::error::PropResult;

/// `x + offset <= y`
#[derive(Debug, Clone)]
pub struct LessEq {
    x: IntVar,
    y: IntVar,
    offset: i64,
}

impl LessEq {
    pub fn new(x: IntVar, y: IntVar, offset: i64) -> Self {
        Self { x, y, offset }
    }
}

impl Propagator for LessEq {
    fn propagate(&mut self, store: &mut Store) -> PropResult {
        store.set_min(self.y, store.min(self.x) + self.offset)?;
        store.set_max(self.x, store.max(self.y) - self.offset)?;
        Ok(())
    }

    fn watches(&self) -> Vec<Watch> {
        vec![self.x.into(), self.y.into()]
    }

    fn name(&self) -> &'static str {
        "less-eq"
    }
}

/// `out = max(vars)`, filtered on bounds.
#[derive(Debug, Clone)]
pub struct MaxOf {
    vars: Vec<IntVar>,
    out: IntVar,
}

impl MaxOf {
    pub fn new(vars: Vec<IntVar>, out: IntVar) -> Self {
        Self { vars, out }
    }
}

impl Propagator for MaxOf {
    fn propagate(&mut self, store: &mut Store) -> PropResult {
        if self.vars.is_empty() {
            return Ok(());
        }
        let lo = self.vars.iter().map(|&v| store.min(v)).max().unwrap_or(i64::MIN);
        let hi = self.vars.iter().map(|&v| store.max(v)).max().unwrap_or(i64::MIN);
        store.set_min(self.out, lo)?;
        store.set_max(self.out, hi)?;
        let cap = store.max(self.out);
        for &v in &self.vars {
            store.set_max(v, cap)?;
        }
        Ok(())
    }

    fn watches(&self) -> Vec<Watch> {
        let mut w: Vec<Watch> = self.vars.iter().map(|&v| v.into()).collect();
        w.push(self.out.into());
        w
    }

    fn name(&self) -> &'static str {
        "max-of"
    }
}

/// `out = sum(vars)`, filtered on bounds.
#[derive(Debug, Clone)]
pub struct Sum {
    vars: Vec<IntVar>,
    out: IntVar,
}

impl Sum {
    pub fn new(vars: Vec<IntVar>, out: IntVar) -> Self {
        Self { vars, out }
    }
}

impl Propagator for Sum {
    fn propagate(&mut self, store: &mut Store) -> PropResult {
        let lo: i64 = self.vars.iter().map(|&v| store.min(v)).sum();
        let hi: i64 = self.vars.iter().map(|&v| store.max(v)).sum();
        store.set_min(self.out, lo)?;
        store.set_max(self.out, hi)?;
        let (olo, ohi) = (store.min(self.out), store.max(self.out));
        for &v in &self.vars {
            let (vlo, vhi) = (store.min(v), store.max(v));
            // the other terms range over [lo - vlo, hi - vhi]
            store.set_min(v, olo - (hi - vhi))?;
            store.set_max(v, ohi - (lo - vlo))?;
        }
        Ok(())
    }

    fn watches(&self) -> Vec<Watch> {
        let mut w: Vec<Watch> = self.vars.iter().map(|&v| v.into()).collect();
        w.push(self.out.into());
        w
    }

    fn name(&self) -> &'static str {
        "sum"
    }
}

/// `y = -x`
#[derive(Debug, Clone)]
pub struct Negation {
    x: IntVar,
    y: IntVar,
}

impl Negation {
    pub fn new(x: IntVar, y: IntVar) -> Self {
        Self { x, y }
    }
}

impl Propagator for Negation {
    fn propagate(&mut self, store: &mut Store) -> PropResult {
        store.set_min(self.y, -store.max(self.x))?;
        store.set_max(self.y, -store.min(self.x))?;
        store.set_min(self.x, -store.max(self.y))?;
        store.set_max(self.x, -store.min(self.y))?;
        Ok(())
    }

    fn watches(&self) -> Vec<Watch> {
        vec![self.x.into(), self.y.into()]
    }

    fn name(&self) -> &'static str {
        "negation"
    }
}
