//! Economies, bundles, utility families and the structural property checks.

mod allocation;
mod bundle;
mod economy;
pub mod outcomes;
pub mod properties;
mod utility;
mod value;

pub use allocation::{trading_components, Allocation, NamedBundle, StructuredAllocation};
pub use bundle::{Bundle, Coalition, MAX_AGENTS, MAX_OBJECTS};
pub use economy::{Economy, ValidationReport, Violation};
pub use outcomes::{Budget, CoalitionOutcomes};
pub use properties::{
    check_discrete_tu, check_gains_from_trade, check_injective, check_strictly_monotone, pareto_frontier_pair,
    Monotonicity, ParetoFrontierPair,
};
pub use utility::Utility;
pub use value::{parse_rational, rational_serde, ExtValue, Rational};
