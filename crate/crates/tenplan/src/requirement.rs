//! Sharing requirements and the algebra used to normalize and combine them.
//!
//! Tenants state, per functionality, with whom they are willing to share an
//! instance: `SWAny` (anyone, the default), `SWJ(list)` (just the listed
//! parties), `DSW(list)` (anyone but the listed parties), or `DSWAny`
//! (no one). Lists may name tenants directly or reference the owner's
//! partners (`P`) or competitors (`Cp`); grounding resolves those
//! references away.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::tenant::{Relations, TenantId, Tenants};

pub type TenantSet = BTreeSet<TenantId>;

/// One entry in a parsed requirement's target list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TargetRef {
    Tenant(TenantId),
    /// `P`: the owning tenant's partners.
    Partners,
    /// `Cp`: the owning tenant's competitors.
    Competitors,
}

/// A requirement as written in an instance file. Target lists may still
/// hold `P`/`Cp` references whose meaning depends on who owns the cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RequirementExpr {
    ShareAny,
    ShareJust(BTreeSet<TargetRef>),
    DontShare(BTreeSet<TargetRef>),
    ShareNone,
}

/// A grounded requirement: every target is a concrete tenant, the owner
/// never appears in its own target set, and `SWJ`/`DSW` sets are non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Requirement {
    /// `SWAny`: share with anyone.
    ShareAny,
    /// `SWJ(..)`: share with just the listed tenants.
    ShareJust(TenantSet),
    /// `DSW(..)`: don't share with the listed tenants.
    DontShare(TenantSet),
    /// `DSWAny`: don't share with anyone.
    ShareNone,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty requirement expression")]
    Empty,
    #[error("malformed requirement expression `{0}`")]
    Malformed(String),
    #[error("unknown tenant label `{0}`")]
    UnknownTenant(String),
    #[error("{0} requires a non-empty target list")]
    EmptyTargets(String),
}

impl RequirementExpr {
    /// Parses `SWAny | DSWAny | SWJ(tok,…) | DSW(tok,…)`. Whitespace is
    /// ignored; `tok` is a declared tenant label, `P`, or `Cp`.
    pub fn parse(text: &str, tenants: &Tenants) -> Result<Self, ParseError> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(ParseError::Empty);
        }
        match cleaned.as_str() {
            "SWAny" => return Ok(Self::ShareAny),
            "DSWAny" => return Ok(Self::ShareNone),
            _ => {}
        }
        let malformed = || ParseError::Malformed(text.trim().to_string());
        let (kind, rest) = if let Some(rest) = cleaned.strip_prefix("SWJ(") {
            ("SWJ", rest)
        } else if let Some(rest) = cleaned.strip_prefix("DSW(") {
            ("DSW", rest)
        } else {
            return Err(malformed());
        };
        let inner = rest.strip_suffix(')').ok_or_else(malformed)?;
        if inner.contains(['(', ')']) {
            return Err(malformed());
        }
        if inner.is_empty() {
            return Err(ParseError::EmptyTargets(kind.to_string()));
        }
        let mut targets = BTreeSet::new();
        for token in inner.split(',') {
            let target = match token {
                "" => return Err(malformed()),
                "P" => TargetRef::Partners,
                "Cp" => TargetRef::Competitors,
                label => TargetRef::Tenant(
                    tenants
                        .get(label)
                        .ok_or_else(|| ParseError::UnknownTenant(label.to_string()))?,
                ),
            };
            targets.insert(target);
        }
        Ok(match kind {
            "SWJ" => Self::ShareJust(targets),
            _ => Self::DontShare(targets),
        })
    }

    /// Replaces `P`/`Cp` with the owner's partner/competitor sets, drops
    /// the owner from the result (sharing with oneself is always allowed),
    /// and normalizes emptied lists: `SWJ()` becomes `DSWAny`, `DSW()`
    /// becomes `SWAny`.
    pub fn ground(&self, owner: TenantId, relations: &Relations) -> Requirement {
        let resolve = |targets: &BTreeSet<TargetRef>| -> TenantSet {
            let mut out = TenantSet::new();
            for target in targets {
                match target {
                    TargetRef::Tenant(id) => {
                        out.insert(*id);
                    }
                    TargetRef::Partners => out.extend(relations.partners_of(owner)),
                    TargetRef::Competitors => out.extend(relations.competitors_of(owner)),
                }
            }
            out.remove(&owner);
            out
        };
        match self {
            Self::ShareAny => Requirement::ShareAny,
            Self::ShareNone => Requirement::ShareNone,
            Self::ShareJust(targets) => Requirement::share_just(resolve(targets)),
            Self::DontShare(targets) => Requirement::dont_share(resolve(targets)),
        }
    }
}

impl Requirement {
    /// `SWJ` over `targets`, collapsing the empty list to `DSWAny`.
    pub fn share_just(targets: TenantSet) -> Self {
        if targets.is_empty() {
            Self::ShareNone
        } else {
            Self::ShareJust(targets)
        }
    }

    /// `DSW` over `targets`, collapsing the empty list to `SWAny`.
    pub fn dont_share(targets: TenantSet) -> Self {
        if targets.is_empty() {
            Self::ShareAny
        } else {
            Self::DontShare(targets)
        }
    }

    /// Conjunction of two requirements held by the same tenant.
    ///
    /// `SWAny` is the identity and `DSWAny` absorbs. Deny-lists merge
    /// (`DSW(X) ∧ DSW(Y) = DSW(X∪Y)`), allow-lists intersect
    /// (`SWJ(X) ∧ SWJ(Y) = SWJ(X∩Y)`), and a deny-list prunes an
    /// allow-list (`DSW(X) ∧ SWJ(Y) = SWJ(Y∖X)`); an emptied allow-list
    /// collapses to `DSWAny`. Commutative, associative, idempotent.
    pub fn combine(&self, other: &Requirement) -> Requirement {
        use Requirement::*;
        match (self, other) {
            (ShareNone, _) | (_, ShareNone) => ShareNone,
            (ShareAny, z) | (z, ShareAny) => z.clone(),
            (DontShare(x), DontShare(y)) => DontShare(x | y),
            (ShareJust(x), ShareJust(y)) => Self::share_just(x & y),
            (DontShare(x), ShareJust(y)) | (ShareJust(y), DontShare(x)) => {
                Self::share_just(y - x)
            }
        }
    }

    /// Canonical rendering with targets in tenant-index order.
    pub fn render(&self, labels: &[String]) -> String {
        let list = |set: &TenantSet| {
            set.iter()
                .map(|id| labels[id.index()].as_str())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Self::ShareAny => "SWAny".to_string(),
            Self::ShareNone => "DSWAny".to_string(),
            Self::ShareJust(set) => format!("SWJ({})", list(set)),
            Self::DontShare(set) => format!("DSW({})", list(set)),
        }
    }
}
