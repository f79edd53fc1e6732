//! Run metrics, instance summaries and the two-sample comparison tests.

mod metrics;
mod nonparam;
mod summary;

pub use metrics::{AppKind, NodeMetrics, NodeRole, RunMetrics, Totals};
pub use nonparam::{asymptotic_p, exact_p, mann_whitney_u, vargha_delaney_a12, MannWhitney, EXACT_MAX_N};
pub use summary::{compare, summarize, write_rows, ComparisonResult, InstanceSummary};
