//! Constraint engine with conditional interval variables, cumulative
//! functions and a timetable propagator for the generalized cumulative
//! constraint, where task heights may be negative and tasks optional.

pub mod cumul;
pub mod dzn;
pub mod engine;
pub mod error;
pub mod interval;
pub mod oracle;
pub mod timetable;

pub use cumul::{always_in, flatten, ge, le, pulse, step, step_at_end, step_at_start, CumulExpr, CumulTask, Height, ModelConfig};
pub use engine::{Fixpoint, Solver};
pub use error::{Inconsistency, ModelError, PropResult};
pub use interval::{Attr, IntervalVar, Status};
pub use timetable::{CapacityRange, GeneralizedCumulative, RuleMode};
