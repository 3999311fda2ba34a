//! Tenant identities and partner/competitor relations.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

/// Index of a tenant within a planning instance.
///
/// Declaration order in the instance file is canonical: it fixes the row
/// order of every matrix and therefore the greedy coloring result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TenantId(usize);

impl TenantId {
    pub const fn new(index: usize) -> Self {
        Self(index)
    }

    pub const fn index(self) -> usize {
        self.0
    }
}

/// Tokens with a fixed meaning in requirement expressions; they can never
/// name a tenant.
const RESERVED_LABELS: [&str; 2] = ["P", "Cp"];

/// The ordered tenant roster of a planning instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tenants {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl Tenants {
    /// Builds a roster from labels in declaration order. Labels must be
    /// unique, non-empty, free of whitespace and expression punctuation,
    /// and must not collide with the reserved tokens `P`/`Cp`.
    pub fn new<I, S>(labels: I) -> Result<Self, TenantError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(TenantError::Empty);
        }
        let mut index = BTreeMap::new();
        for (i, label) in labels.iter().enumerate() {
            let bad_char = |c: char| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '"');
            if label.is_empty()
                || RESERVED_LABELS.contains(&label.as_str())
                || label.chars().any(bad_char)
            {
                return Err(TenantError::InvalidLabel(label.clone()));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(TenantError::Duplicate(label.clone()));
            }
        }
        Ok(Self { labels, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<TenantId> {
        self.index.get(label).copied().map(TenantId::new)
    }

    pub fn label(&self, id: TenantId) -> &str {
        &self.labels[id.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = TenantId> + '_ {
        (0..self.labels.len()).map(TenantId::new)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TenantError {
    #[error("no tenants declared")]
    Empty,
    #[error("duplicate tenant label `{0}`")]
    Duplicate(String),
    #[error("invalid tenant label `{0}` (labels must be non-empty, free of whitespace and `(),\"`, and must not be the reserved tokens `P`/`Cp`)")]
    InvalidLabel(String),
    #[error("unknown tenant label `{0}`")]
    Unknown(String),
    #[error("tenant `{0}` cannot be its own partner or competitor")]
    SelfRelation(String),
    #[error("tenants `{0}` and `{1}` cannot be both partners and competitors")]
    PartnerAndCompetitor(String, String),
}

/// Symmetric, irreflexive partner and competitor relations over tenants.
/// No pair may appear in both relations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Relations {
    partners: BTreeSet<(TenantId, TenantId)>,
    competitors: BTreeSet<(TenantId, TenantId)>,
}

impl Relations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_partners(&mut self, tenants: &Tenants, a: &str, b: &str) -> Result<(), TenantError> {
        let pair = Self::resolve(tenants, a, b)?;
        if self.competitors.contains(&pair) {
            return Err(TenantError::PartnerAndCompetitor(a.into(), b.into()));
        }
        self.partners.insert(pair);
        Ok(())
    }

    pub fn add_competitors(
        &mut self,
        tenants: &Tenants,
        a: &str,
        b: &str,
    ) -> Result<(), TenantError> {
        let pair = Self::resolve(tenants, a, b)?;
        if self.partners.contains(&pair) {
            return Err(TenantError::PartnerAndCompetitor(a.into(), b.into()));
        }
        self.competitors.insert(pair);
        Ok(())
    }

    fn resolve(tenants: &Tenants, a: &str, b: &str) -> Result<(TenantId, TenantId), TenantError> {
        let ta = tenants
            .get(a)
            .ok_or_else(|| TenantError::Unknown(a.into()))?;
        let tb = tenants
            .get(b)
            .ok_or_else(|| TenantError::Unknown(b.into()))?;
        if ta == tb {
            return Err(TenantError::SelfRelation(a.into()));
        }
        Ok((ta.min(tb), ta.max(tb)))
    }

    pub fn partners_of(&self, tenant: TenantId) -> BTreeSet<TenantId> {
        Self::neighbors(&self.partners, tenant)
    }

    pub fn competitors_of(&self, tenant: TenantId) -> BTreeSet<TenantId> {
        Self::neighbors(&self.competitors, tenant)
    }

    fn neighbors(pairs: &BTreeSet<(TenantId, TenantId)>, tenant: TenantId) -> BTreeSet<TenantId> {
        pairs
            .iter()
            .filter_map(|&(a, b)| {
                if a == tenant {
                    Some(b)
                } else if b == tenant {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }
}
