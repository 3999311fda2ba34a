//! Deployment planning for multi-tenant applications built from
//! rich-variant components (RVCs).
//!
//! Tenants state per-functionality sharing requirements (`SWAny`, `SWJ`,
//! `DSW`, `DSWAny`). The pipeline translates those into per-RVC variant
//! requirement tables, derives the boolean sharing matrix and its conflict
//! complement, then greedily colors the conflict graph section by section;
//! each color is one deployed instance. An exhaustive oracle audits the
//! greedy result on small instances.

pub mod coloring;
pub mod graph;
pub mod instance;
pub mod oracle;
pub mod plan;
pub mod requirement;
pub mod tenant;

pub use coloring::{color, ColoringMatrix, InstanceDistribution};
pub use graph::{ConflictMatrix, EdgeLabeledGraph, SharingMatrix};
pub use instance::{PlanningInstance, VariantTable};
pub use oracle::{check_valid, exact_min_instances, random_instance, OracleOutcome, Violation};
pub use plan::{solve, DeploymentPlan, SolveOptions};
pub use requirement::{Requirement, RequirementExpr};
pub use tenant::{Relations, TenantId, Tenants};
