//! End-to-end solving, the plan/tables file formats, plan auditing, and
//! synthetic instance generation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{color, ColoringError, ColoringMatrix, InstanceDistribution};
use crate::graph::{ConflictMatrix, SharingMatrix};
use crate::instance::{
    FunctionalitySection, InstanceFile, PlanningInstance, RelationsSection, RvcSection,
    VariantTable, FORMAT_VERSION,
};
use crate::oracle::{check_valid, exact_min_instances, random_instance, OracleOutcome};

/// Bounds for the exact-search audit. The search is exhaustive, so it is
/// only run when the tenant count stays within `max_tenants`.
#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub max_tenants: usize,
    pub node_budget: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            max_tenants: 10,
            node_budget: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Restrict solving to one RVC id.
    pub only_rvc: Option<String>,
    /// Audit the greedy result against the exact minimum.
    pub oracle: Option<OracleOptions>,
}

/// Everything the pipeline produced for one RVC.
#[derive(Debug, Clone)]
pub struct RvcPlan {
    pub table: VariantTable,
    pub sharing: SharingMatrix,
    pub conflicts: ConflictMatrix,
    pub coloring: ColoringMatrix,
    pub distribution: InstanceDistribution,
    pub oracle: Option<OracleReport>,
}

impl RvcPlan {
    pub fn rvc(&self) -> &str {
        self.table.rvc()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleReport {
    Exact { minimum: u32, explored: u64 },
    Inconclusive { best_known: u32, explored: u64 },
    Skipped { tenant_count: usize, limit: usize },
}

#[derive(Debug, Clone)]
pub struct DeploymentPlan {
    pub tenants: Vec<String>,
    pub rvcs: Vec<RvcPlan>,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("unknown RVC `{0}`")]
    UnknownRvc(String),
}

/// Runs the full pipeline: translate the requirements, build and invert
/// the sharing matrix per RVC, color it, and regroup by instance.
pub fn solve(
    instance: &PlanningInstance,
    options: &SolveOptions,
) -> Result<DeploymentPlan, SolveError> {
    if let Some(id) = &options.only_rvc {
        if instance.rvc(id).is_none() {
            return Err(SolveError::UnknownRvc(id.clone()));
        }
    }
    let mut rvcs = Vec::new();
    for table in instance.translate() {
        if let Some(id) = &options.only_rvc {
            if table.rvc() != id {
                continue;
            }
        }
        let sharing = SharingMatrix::from_table(&table);
        let conflicts = sharing.invert();
        let coloring = color(&conflicts);
        let distribution = coloring.distribution();
        let oracle = options.oracle.as_ref().map(|opts| {
            if table.tenant_count() > opts.max_tenants {
                OracleReport::Skipped {
                    tenant_count: table.tenant_count(),
                    limit: opts.max_tenants,
                }
            } else {
                match exact_min_instances(&sharing, opts.node_budget) {
                    OracleOutcome::Exact(result) => OracleReport::Exact {
                        minimum: result.h_star,
                        explored: result.explored,
                    },
                    OracleOutcome::Inconclusive {
                        best_known,
                        explored,
                        ..
                    } => OracleReport::Inconclusive {
                        best_known,
                        explored,
                    },
                }
            }
        });
        rvcs.push(RvcPlan {
            table,
            sharing,
            conflicts,
            coloring,
            distribution,
            oracle,
        });
    }
    Ok(DeploymentPlan {
        tenants: instance.tenants.labels().to_vec(),
        rvcs,
    })
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

/// Serialized form of the per-RVC variant requirement tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesFile {
    pub format: u32,
    pub tenants: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rvcs: Vec<TablesRvc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesRvc {
    pub id: String,
    pub variants: Vec<String>,
    /// Row per tenant (in roster order), cell per variant.
    pub requirements: Vec<Vec<String>>,
}

/// Serialized deployment plan. All orderings are canonical: tenants in
/// roster order, variants in declaration order, target lists and tenant
/// sets ascending by tenant index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub format: u32,
    pub tenants: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rvcs: Vec<PlanRvc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRvc {
    pub id: String,
    pub variants: Vec<String>,
    pub instances: u32,
    /// Grounded requirement table, row per tenant.
    pub requirements: Vec<Vec<String>>,
    /// Row per tenant, cell per variant: the 1-based instance id.
    pub coloring: Vec<Vec<u32>>,
    /// `distribution[c][k]`: tenants served by instance `c+1` under
    /// variant `k`; empty cells are explicit.
    pub distribution: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSection {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimum: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_known: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explored: Option<u64>,
    pub verdict: String,
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Toml(#[from] Box<toml::de::Error>),
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    UnsupportedFormat(u32),
}

pub fn tables_file(tenants: &[String], tables: &[VariantTable]) -> TablesFile {
    TablesFile {
        format: FORMAT_VERSION,
        tenants: tenants.to_vec(),
        rvcs: tables
            .iter()
            .map(|table| TablesRvc {
                id: table.rvc().to_string(),
                variants: table.variants().to_vec(),
                requirements: table.rendered_rows(),
            })
            .collect(),
    }
}

pub fn tables_to_toml(tenants: &[String], tables: &[VariantTable]) -> String {
    toml::to_string(&tables_file(tenants, tables)).expect("tables serialize")
}

pub fn tables_from_toml(text: &str) -> Result<TablesFile, PlanError> {
    let file: TablesFile = toml::from_str(text).map_err(Box::new)?;
    if file.format != FORMAT_VERSION {
        return Err(PlanError::UnsupportedFormat(file.format));
    }
    Ok(file)
}

pub fn plan_file(plan: &DeploymentPlan) -> PlanFile {
    PlanFile {
        format: FORMAT_VERSION,
        tenants: plan.tenants.clone(),
        rvcs: plan
            .rvcs
            .iter()
            .map(|rvc| {
                let labels = rvc.table.tenants();
                let dist = &rvc.distribution;
                let distribution = (0..dist.instance_count())
                    .map(|c| {
                        (0..dist.variant_count())
                            .map(|k| {
                                dist.tenants(c, k)
                                    .iter()
                                    .map(|&i| labels[i].clone())
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                PlanRvc {
                    id: rvc.rvc().to_string(),
                    variants: rvc.table.variants().to_vec(),
                    instances: rvc.coloring.num_colors(),
                    requirements: rvc.table.rendered_rows(),
                    coloring: rvc.coloring.rows().to_vec(),
                    distribution,
                    oracle: rvc.oracle.as_ref().map(|report| oracle_section(report, &rvc.coloring)),
                }
            })
            .collect(),
    }
}

fn oracle_section(report: &OracleReport, coloring: &ColoringMatrix) -> OracleSection {
    match report {
        OracleReport::Exact { minimum, explored } => OracleSection {
            status: "exact".into(),
            minimum: Some(*minimum),
            best_known: None,
            explored: Some(*explored),
            verdict: greedy_verdict(coloring.num_colors(), *minimum),
        },
        OracleReport::Inconclusive {
            best_known,
            explored,
        } => OracleSection {
            status: "inconclusive".into(),
            minimum: None,
            best_known: Some(*best_known),
            explored: Some(*explored),
            verdict: "search budget exhausted; minimum unproven".into(),
        },
        OracleReport::Skipped {
            tenant_count,
            limit,
        } => OracleSection {
            status: "skipped".into(),
            minimum: None,
            best_known: None,
            explored: None,
            verdict: format!("{tenant_count} tenants exceed the size bound of {limit}"),
        },
    }
}

fn greedy_verdict(greedy: u32, minimum: u32) -> String {
    if greedy == minimum {
        "greedy result optimal".into()
    } else {
        format!("greedy result uses {greedy} instances (minimum {minimum})")
    }
}

pub fn plan_to_toml(plan: &DeploymentPlan) -> String {
    toml::to_string(&plan_file(plan)).expect("plan serializes")
}

pub fn plan_from_toml(text: &str) -> Result<PlanFile, PlanError> {
    let file: PlanFile = toml::from_str(text).map_err(Box::new)?;
    if file.format != FORMAT_VERSION {
        return Err(PlanError::UnsupportedFormat(file.format));
    }
    Ok(file)
}

// ---------------------------------------------------------------------------
// Human-readable rendering
// ---------------------------------------------------------------------------

/// Pads every column to its widest cell; the last column is left ragged so
/// lines carry no trailing whitespace.
fn render_grid(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0usize; columns];
    for row in rows {
        for (c, cell) in row.iter().enumerate() {
            widths[c] = widths[c].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in rows {
        for (c, cell) in row.iter().enumerate() {
            if c + 1 == row.len() {
                out.push_str(cell);
            } else {
                out.push_str(&format!("{cell:<width$}  ", width = widths[c]));
            }
        }
        out.push('\n');
    }
    out
}

/// One table per RVC: tenants down, variants across.
pub fn render_requirement_tables(tables: &[VariantTable]) -> String {
    let mut out = String::new();
    for table in tables {
        out.push_str(table.rvc());
        out.push('\n');
        let mut rows = Vec::with_capacity(table.tenant_count() + 1);
        let mut header = vec!["tenant".to_string()];
        header.extend(table.variants().iter().cloned());
        rows.push(header);
        for (label, cells) in table.tenants().iter().zip(table.rendered_rows()) {
            let mut row = vec![label.clone()];
            row.extend(cells);
            rows.push(row);
        }
        out.push_str(&render_grid(&rows));
        out.push('\n');
    }
    out
}

/// The distribution tables: variants down, instances across, `----` for an
/// instance that serves no tenant under a variant.
pub fn render_plan(plan: &DeploymentPlan) -> String {
    let mut out = String::new();
    for rvc in &plan.rvcs {
        out.push_str(&format!(
            "{}: instances = {}\n",
            rvc.rvc(),
            rvc.coloring.num_colors()
        ));
        if let Some(report) = &rvc.oracle {
            out.push_str(&render_oracle_line(report, &rvc.coloring));
        }
        let labels = rvc.table.tenants();
        let dist = &rvc.distribution;
        let mut rows = Vec::with_capacity(dist.variant_count() + 1);
        let mut header = vec!["variant".to_string()];
        header.extend((1..=dist.instance_count()).map(|c| format!("I{c}")));
        rows.push(header);
        for (k, variant) in rvc.table.variants().iter().enumerate() {
            let mut row = vec![variant.clone()];
            for c in 0..dist.instance_count() {
                let tenants = dist.tenants(c, k);
                if tenants.is_empty() {
                    row.push("----".to_string());
                } else {
                    let names: Vec<&str> = tenants.iter().map(|&i| labels[i].as_str()).collect();
                    row.push(names.join(","));
                }
            }
            rows.push(row);
        }
        out.push_str(&render_grid(&rows));
        out.push('\n');
    }
    out
}

fn render_oracle_line(report: &OracleReport, coloring: &ColoringMatrix) -> String {
    match report {
        OracleReport::Exact { minimum, explored } => format!(
            "oracle: minimum = {minimum} (exact, explored {explored} nodes); {}\n",
            greedy_verdict(coloring.num_colors(), *minimum)
        ),
        OracleReport::Inconclusive {
            best_known,
            explored,
        } => format!(
            "oracle: best known = {best_known} (search budget exhausted after {explored} nodes); minimum unproven\n"
        ),
        OracleReport::Skipped {
            tenant_count,
            limit,
        } => format!("oracle: skipped ({tenant_count} tenants exceed the size bound of {limit})\n"),
    }
}

// ---------------------------------------------------------------------------
// Plan auditing
// ---------------------------------------------------------------------------

/// A sharing violation, with labels resolved for printing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanViolation {
    pub rvc: String,
    pub variant: String,
    pub tenant_a: String,
    pub tenant_b: String,
    pub instance: u32,
}

impl std::fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} variant {}: {} and {} are both on instance {} but must not share",
            self.rvc, self.variant, self.tenant_a, self.tenant_b, self.instance
        )
    }
}

/// Everything `check` found wrong with a plan that still parsed cleanly.
#[derive(Debug, Clone, Default)]
pub struct PlanAudit {
    pub violations: Vec<PlanViolation>,
    pub inconsistencies: Vec<String>,
}

impl PlanAudit {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.inconsistencies.is_empty()
    }
}

/// Structural mismatches between a plan and an instance; these abort the
/// check rather than being reported as violations.
#[derive(Debug, Error)]
pub enum CheckError {
    #[error("plan and instance declare different tenant lists")]
    TenantsMismatch,
    #[error("plan references RVC `{0}` which the instance does not declare")]
    UnknownRvc(String),
    #[error("plan and instance disagree on the variants of RVC `{0}`")]
    VariantsMismatch(String),
    #[error("plan requirement table for RVC `{0}` does not match the instance requirements")]
    RequirementsMismatch(String),
    #[error("plan coloring for RVC `{rvc}` is malformed: {source}")]
    BadColoring {
        rvc: String,
        source: ColoringError,
    },
    #[error("plan coloring for RVC `{0}` does not match the tenant/variant counts")]
    ColoringShape(String),
    #[error("plan for RVC `{0}` declares {1} instances but its coloring uses {2}")]
    InstanceCountMismatch(String, u32, u32),
}

/// Audits a plan against the instance it claims to solve: rebuilds the
/// sharing matrices, checks every coloring for violations, and verifies
/// the stored distribution agrees with the stored coloring.
pub fn check_plan(plan: &PlanFile, instance: &PlanningInstance) -> Result<PlanAudit, CheckError> {
    if plan.tenants != instance.tenants.labels() {
        return Err(CheckError::TenantsMismatch);
    }
    let tables = instance.translate();
    let mut audit = PlanAudit::default();

    for plan_rvc in &plan.rvcs {
        let table = tables
            .iter()
            .find(|t| t.rvc() == plan_rvc.id)
            .ok_or_else(|| CheckError::UnknownRvc(plan_rvc.id.clone()))?;
        if plan_rvc.variants != table.variants() {
            return Err(CheckError::VariantsMismatch(plan_rvc.id.clone()));
        }
        if plan_rvc.requirements != table.rendered_rows() {
            return Err(CheckError::RequirementsMismatch(plan_rvc.id.clone()));
        }
        let coloring =
            ColoringMatrix::from_rows(plan_rvc.coloring.clone()).map_err(|source| {
                CheckError::BadColoring {
                    rvc: plan_rvc.id.clone(),
                    source,
                }
            })?;
        if coloring.tenant_count() != table.tenant_count()
            || coloring.variant_count() != table.variant_count()
        {
            return Err(CheckError::ColoringShape(plan_rvc.id.clone()));
        }
        if plan_rvc.instances != coloring.num_colors() {
            return Err(CheckError::InstanceCountMismatch(
                plan_rvc.id.clone(),
                plan_rvc.instances,
                coloring.num_colors(),
            ));
        }

        let sharing = SharingMatrix::from_table(table);
        let violations = check_valid(&sharing, &coloring).expect("dimensions verified above");
        let labels = table.tenants();
        for v in violations {
            audit.violations.push(PlanViolation {
                rvc: plan_rvc.id.clone(),
                variant: table.variants()[v.variant].clone(),
                tenant_a: labels[v.tenant_a].clone(),
                tenant_b: labels[v.tenant_b].clone(),
                instance: v.instance,
            });
        }

        // The stored distribution must be exactly the regrouping of the
        // stored coloring.
        let derived = coloring.distribution();
        let derived_labels: Vec<Vec<Vec<String>>> = (0..derived.instance_count())
            .map(|c| {
                (0..derived.variant_count())
                    .map(|k| {
                        derived
                            .tenants(c, k)
                            .iter()
                            .map(|&i| labels[i].clone())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        if plan_rvc.distribution != derived_labels {
            audit.inconsistencies.push(format!(
                "{}: stored distribution does not match the stored coloring",
                plan_rvc.id
            ));
        }
    }
    Ok(audit)
}

// ---------------------------------------------------------------------------
// Synthetic instances
// ---------------------------------------------------------------------------

/// Builds a single-RVC instance whose pipeline output reproduces exactly
/// the seeded random sharing matrix of [`random_instance`]. Conflicts are
/// written as per-tenant `DSW` lists on one functionality per variant, so
/// the file stays within the ordinary schema.
pub fn synthesize_instance(m: usize, n: usize, density: f64, seed: u64) -> String {
    let sharing = random_instance(m, n, density, seed);
    let tenants: Vec<String> = sharing.tenants().to_vec();
    let variants: Vec<String> = sharing.variants().to_vec();

    let mut requirements: std::collections::BTreeMap<
        String,
        std::collections::BTreeMap<String, String>,
    > = Default::default();
    for i in 0..m {
        for k in 0..n {
            let denied: Vec<&str> = ((i + 1)..m)
                .filter(|&j| !sharing.may_share(i, j, k))
                .map(|j| tenants[j].as_str())
                .collect();
            if denied.is_empty() {
                continue;
            }
            requirements
                .entry(tenants[i].clone())
                .or_default()
                .insert(format!("F{}", k + 1), format!("DSW({})", denied.join(",")));
        }
    }

    let file = InstanceFile {
        format: FORMAT_VERSION,
        tenants,
        relations: RelationsSection::default(),
        rvcs: vec![RvcSection {
            id: "RVC1".into(),
            variants: variants.clone(),
        }],
        functionalities: (0..n)
            .map(|k| FunctionalitySection {
                id: format!("F{}", k + 1),
                path: vec![("RVC1".into(), variants[k].clone())],
            })
            .collect(),
        requirements,
    };
    toml::to_string(&file).expect("instance serializes")
}
