//! Joint states of the rate formula, the achievable rate
//! `R = I(VU;B) - I(V;S|U)`, and a heuristic maximizer over strategies.

mod bundle;
mod model;
mod optimize;

pub use bundle::{achievable_rate, assemble, classical_quantum, JointStateBundle, RateReport};
pub use model::{ActionModel, Strategy};
pub use optimize::{optimize_rate, project_to_simplex, OptimizationResult, OptimizerConfig};
