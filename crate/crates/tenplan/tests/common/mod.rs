//! Helpers shared by the integration test binaries.
#![allow(dead_code)] // each test binary uses its own subset

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tenplan::instance::{PlanningInstance, VariantTable};
use tenplan::requirement::{Requirement, TenantSet};
use tenplan::tenant::TenantId;

pub const SCHOOLS_TOML: &str = include_str!("../fixtures/schools.toml");

pub fn schools() -> PlanningInstance {
    PlanningInstance::from_toml_str(SCHOOLS_TOML).expect("schools fixture loads")
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Seeded random grounded requirement table: m in 1..=6, n in 1..=4.
pub fn random_table(seed: u64) -> VariantTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=6);
    let n = rng.gen_range(1..=4);
    let rows = (0..m)
        .map(|i| (0..n).map(|_| random_requirement(&mut rng, m, i)).collect())
        .collect();
    let tenants = (1..=m).map(|t| format!("T{t}")).collect();
    let variants = (1..=n).map(|v| format!("V{v}")).collect();
    VariantTable::new("R1", tenants, variants, rows).expect("generated table is well-formed")
}

pub fn random_requirement(rng: &mut ChaCha8Rng, m: usize, owner: usize) -> Requirement {
    let others: Vec<usize> = (0..m).filter(|&j| j != owner).collect();
    match rng.gen_range(0..4) {
        0 => Requirement::ShareAny,
        1 => Requirement::ShareNone,
        kind => {
            if others.is_empty() {
                return Requirement::ShareAny;
            }
            let mut set = TenantSet::new();
            for &j in &others {
                if rng.gen_bool(0.5) {
                    set.insert(TenantId::new(j));
                }
            }
            if set.is_empty() {
                set.insert(TenantId::new(others[rng.gen_range(0..others.len())]));
            }
            if kind == 2 {
                Requirement::ShareJust(set)
            } else {
                Requirement::DontShare(set)
            }
        }
    }
}

/// The sharing predicate, restated directly from the requirement semantics;
/// kept independent of the matrix builder so the two can cross-check.
pub fn forbids(requirement: &Requirement, other: usize) -> bool {
    let other = TenantId::new(other);
    match requirement {
        Requirement::ShareAny => false,
        Requirement::ShareNone => true,
        Requirement::ShareJust(allowed) => !allowed.contains(&other),
        Requirement::DontShare(denied) => denied.contains(&other),
    }
}
