//! Planning instances: tenants, relations, rich-variant components,
//! functionality paths, and the raw requirement table, plus translation of
//! functionality-level requirements into per-RVC variant requirement tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::requirement::{ParseError, Requirement, RequirementExpr};
use crate::tenant::{Relations, TenantError, TenantId, Tenants};

/// Version tag carried by every file this tool reads or writes.
pub const FORMAT_VERSION: u32 = 1;

/// A rich-variant component: one deployable unit whose behavior is selected
/// from a fixed list of named variants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rvc {
    pub id: String,
    pub variants: Vec<String>,
}

impl Rvc {
    pub fn variant_index(&self, id: &str) -> Option<usize> {
        self.variants.iter().position(|v| v == id)
    }
}

/// An application functionality and the (RVC, variant) sections it
/// traverses, stored as resolved indices in path order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functionality {
    pub id: String,
    pub path: Vec<(usize, usize)>,
}

/// Everything needed to plan a deployment: who the tenants are, how they
/// relate, what the application is made of, and what each tenant demands
/// per functionality. Requirements are sparse; an absent cell means
/// `SWAny`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanningInstance {
    pub tenants: Tenants,
    pub relations: Relations,
    pub rvcs: Vec<Rvc>,
    pub functionalities: Vec<Functionality>,
    requirements: BTreeMap<(usize, usize), RequirementExpr>,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Toml(#[from] Box<toml::de::Error>),
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    UnsupportedFormat(u32),
    #[error(transparent)]
    Tenant(#[from] TenantError),
    #[error("duplicate RVC `{0}`")]
    DuplicateRvc(String),
    #[error("RVC `{0}` declares no variants")]
    NoVariants(String),
    #[error("duplicate variant `{variant}` in RVC `{rvc}`")]
    DuplicateVariant { rvc: String, variant: String },
    #[error("unknown RVC `{0}`")]
    UnknownRvc(String),
    #[error("unknown variant `{variant}` in RVC `{rvc}`")]
    UnknownVariant { rvc: String, variant: String },
    #[error("duplicate functionality `{0}`")]
    DuplicateFunctionality(String),
    #[error("unknown functionality `{0}`")]
    UnknownFunctionality(String),
    #[error("requirement of tenant `{tenant}` for functionality `{functionality}`: {source}")]
    Requirement {
        tenant: String,
        functionality: String,
        source: ParseError,
    },
    #[error("invalid variant table: {0}")]
    InvalidTable(String),
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct InstanceFile {
    pub format: u32,
    pub tenants: Vec<String>,
    #[serde(default, skip_serializing_if = "RelationsSection::is_empty")]
    pub relations: RelationsSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rvcs: Vec<RvcSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub functionalities: Vec<FunctionalitySection>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub requirements: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub(crate) struct RelationsSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub partners: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub competitors: Vec<(String, String)>,
}

impl RelationsSection {
    pub(crate) fn is_empty(&self) -> bool {
        self.partners.is_empty() && self.competitors.is_empty()
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct RvcSection {
    pub id: String,
    pub variants: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct FunctionalitySection {
    pub id: String,
    pub path: Vec<(String, String)>,
}

impl PlanningInstance {
    pub fn from_toml_str(text: &str) -> Result<Self, ModelError> {
        let file: InstanceFile = toml::from_str(text).map_err(Box::new)?;
        Self::from_file(file)
    }

    fn from_file(file: InstanceFile) -> Result<Self, ModelError> {
        if file.format != FORMAT_VERSION {
            return Err(ModelError::UnsupportedFormat(file.format));
        }
        let tenants = Tenants::new(file.tenants)?;

        let mut relations = Relations::new();
        for (a, b) in &file.relations.partners {
            relations.add_partners(&tenants, a, b)?;
        }
        for (a, b) in &file.relations.competitors {
            relations.add_competitors(&tenants, a, b)?;
        }

        let mut rvcs = Vec::with_capacity(file.rvcs.len());
        for section in file.rvcs {
            if rvcs.iter().any(|r: &Rvc| r.id == section.id) {
                return Err(ModelError::DuplicateRvc(section.id));
            }
            if section.variants.is_empty() {
                return Err(ModelError::NoVariants(section.id));
            }
            for (i, variant) in section.variants.iter().enumerate() {
                if section.variants[..i].contains(variant) {
                    return Err(ModelError::DuplicateVariant {
                        rvc: section.id,
                        variant: variant.clone(),
                    });
                }
            }
            rvcs.push(Rvc {
                id: section.id,
                variants: section.variants,
            });
        }

        let mut functionalities = Vec::with_capacity(file.functionalities.len());
        for section in file.functionalities {
            if functionalities.iter().any(|f: &Functionality| f.id == section.id) {
                return Err(ModelError::DuplicateFunctionality(section.id));
            }
            let mut path = Vec::with_capacity(section.path.len());
            for (rvc_id, variant_id) in &section.path {
                let rvc_idx = rvcs
                    .iter()
                    .position(|r| &r.id == rvc_id)
                    .ok_or_else(|| ModelError::UnknownRvc(rvc_id.clone()))?;
                let variant_idx = rvcs[rvc_idx].variant_index(variant_id).ok_or_else(|| {
                    ModelError::UnknownVariant {
                        rvc: rvc_id.clone(),
                        variant: variant_id.clone(),
                    }
                })?;
                path.push((rvc_idx, variant_idx));
            }
            functionalities.push(Functionality {
                id: section.id,
                path,
            });
        }

        let mut requirements = BTreeMap::new();
        for (tenant_label, row) in &file.requirements {
            let tenant = tenants
                .get(tenant_label)
                .ok_or_else(|| TenantError::Unknown(tenant_label.clone()))?;
            for (functionality_id, text) in row {
                let functionality = functionalities
                    .iter()
                    .position(|f| &f.id == functionality_id)
                    .ok_or_else(|| ModelError::UnknownFunctionality(functionality_id.clone()))?;
                if text.trim().is_empty() {
                    continue; // blank cell: the SWAny default
                }
                let expr = RequirementExpr::parse(text, &tenants).map_err(|source| {
                    ModelError::Requirement {
                        tenant: tenant_label.clone(),
                        functionality: functionality_id.clone(),
                        source,
                    }
                })?;
                requirements.insert((tenant.index(), functionality), expr);
            }
        }

        Ok(Self {
            tenants,
            relations,
            rvcs,
            functionalities,
            requirements,
        })
    }

    pub fn requirement(&self, tenant: TenantId, functionality: usize) -> Option<&RequirementExpr> {
        self.requirements.get(&(tenant.index(), functionality))
    }

    pub fn rvc(&self, id: &str) -> Option<&Rvc> {
        self.rvcs.iter().find(|r| r.id == id)
    }

    /// Translates the functionality-level requirement table into one
    /// grounded variant requirement table per RVC.
    ///
    /// A cell (tenant, variant) folds together the grounded requirement of
    /// every functionality whose path crosses that variant; untouched cells
    /// stay `SWAny`. The fold is order-insensitive because `combine` is
    /// commutative and associative.
    pub fn translate(&self) -> Vec<VariantTable> {
        let m = self.tenants.len();
        self.rvcs
            .iter()
            .enumerate()
            .map(|(rvc_idx, rvc)| {
                let n = rvc.variants.len();
                let mut rows = vec![vec![Requirement::ShareAny; n]; m];
                for (func_idx, functionality) in self.functionalities.iter().enumerate() {
                    for &(path_rvc, variant) in &functionality.path {
                        if path_rvc != rvc_idx {
                            continue;
                        }
                        for tenant in self.tenants.iter() {
                            if let Some(expr) = self.requirement(tenant, func_idx) {
                                let grounded = expr.ground(tenant, &self.relations);
                                let cell = &mut rows[tenant.index()][variant];
                                *cell = cell.combine(&grounded);
                            }
                        }
                    }
                }
                VariantTable {
                    rvc: rvc.id.clone(),
                    tenants: self.tenants.labels().to_vec(),
                    variants: rvc.variants.clone(),
                    rows,
                }
            })
            .collect()
    }
}

/// The grounded m×n requirement table of one RVC: `rows[i][k]` is tenant
/// `i`'s requirement about variant `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantTable {
    rvc: String,
    tenants: Vec<String>,
    variants: Vec<String>,
    rows: Vec<Vec<Requirement>>,
}

impl VariantTable {
    pub fn new(
        rvc: impl Into<String>,
        tenants: Vec<String>,
        variants: Vec<String>,
        rows: Vec<Vec<Requirement>>,
    ) -> Result<Self, ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidTable(msg));
        if tenants.is_empty() {
            return bad("no tenants".into());
        }
        if variants.is_empty() {
            return bad("no variants".into());
        }
        if rows.len() != tenants.len() {
            return bad(format!(
                "{} rows for {} tenants",
                rows.len(),
                tenants.len()
            ));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != variants.len() {
                return bad(format!(
                    "row {} has {} cells for {} variants",
                    i,
                    row.len(),
                    variants.len()
                ));
            }
            for cell in row {
                let targets = match cell {
                    Requirement::ShareJust(t) | Requirement::DontShare(t) => t,
                    _ => continue,
                };
                if targets.is_empty() {
                    return bad(format!("row {i} holds an empty target list"));
                }
                if targets.contains(&TenantId::new(i)) {
                    return bad(format!("row {i} targets its own tenant"));
                }
                if targets.iter().any(|id| id.index() >= tenants.len()) {
                    return bad(format!("row {i} targets an out-of-range tenant"));
                }
            }
        }
        Ok(Self {
            rvc: rvc.into(),
            tenants,
            variants,
            rows,
        })
    }

    pub fn rvc(&self) -> &str {
        &self.rvc
    }

    pub fn tenants(&self) -> &[String] {
        &self.tenants
    }

    pub fn variants(&self) -> &[String] {
        &self.variants
    }

    pub fn tenant_count(&self) -> usize {
        self.tenants.len()
    }

    pub fn variant_count(&self) -> usize {
        self.variants.len()
    }

    pub fn cell(&self, tenant: usize, variant: usize) -> &Requirement {
        &self.rows[tenant][variant]
    }

    pub fn rows(&self) -> &[Vec<Requirement>] {
        &self.rows
    }

    /// Cells rendered to canonical expression strings, row per tenant.
    pub fn rendered_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|cell| cell.render(&self.tenants)).collect())
            .collect()
    }
}
