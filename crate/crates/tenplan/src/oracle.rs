//! Independent auditing of deployments: validity checking against the
//! sharing matrix, exact minimum-instance search, and seeded random
//! instance generation for property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coloring::ColoringMatrix;
use crate::graph::{Grid3, SharingMatrix};

/// A tenant pair placed on the same instance for a variant they must not
/// share.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub tenant_a: usize,
    pub tenant_b: usize,
    pub variant: usize,
    pub instance: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("coloring is {coloring_tenants}x{coloring_variants} but the matrix is {matrix_tenants}x{matrix_variants}")]
pub struct DimensionMismatch {
    pub matrix_tenants: usize,
    pub matrix_variants: usize,
    pub coloring_tenants: usize,
    pub coloring_variants: usize,
}

/// Lists every violation of `coloring` against `sharing`; an empty list
/// means the deployment is valid.
pub fn check_valid(
    sharing: &SharingMatrix,
    coloring: &ColoringMatrix,
) -> Result<Vec<Violation>, DimensionMismatch> {
    let m = sharing.tenant_count();
    let n = sharing.variant_count();
    if coloring.tenant_count() != m || coloring.variant_count() != n {
        return Err(DimensionMismatch {
            matrix_tenants: m,
            matrix_variants: n,
            coloring_tenants: coloring.tenant_count(),
            coloring_variants: coloring.variant_count(),
        });
    }
    let mut violations = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            for k in 0..n {
                let c = coloring.color_of(i, k);
                if c == coloring.color_of(j, k) && !sharing.may_share(i, j, k) {
                    violations.push(Violation {
                        tenant_a: i,
                        tenant_b: j,
                        variant: k,
                        instance: c,
                    });
                }
            }
        }
    }
    Ok(violations)
}

/// A completed exact search: no valid deployment uses fewer than `h_star`
/// instances, and `witness` attains it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub h_star: u32,
    pub witness: ColoringMatrix,
    pub explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Exact(OracleResult),
    /// The node budget ran out before optimality was proven; `best_known`
    /// is an upper bound only and is never passed off as the minimum.
    Inconclusive {
        best_known: u32,
        witness: ColoringMatrix,
        explored: u64,
    },
}

/// Exact minimum instance count for `sharing`, by exhaustive search.
///
/// Sections of different variants never conflict, and an instance opened
/// for one variant serves every other variant for free, so the global
/// minimum equals the largest per-variant chromatic number of the conflict
/// graphs. Each per-variant minimum comes from branch-and-bound over
/// section-to-color assignments in tenant order: a section may open at
/// most one new color (symmetry breaking), branches that reach the current
/// best are cut, and the first-fit coloring seeds the bound. `budget` caps
/// the total number of attempted assignments across all variants; intended
/// for desk-scale instances (roughly ten tenants or fewer).
pub fn exact_min_instances(sharing: &SharingMatrix, budget: u64) -> OracleOutcome {
    let m = sharing.tenant_count();
    let n = sharing.variant_count();
    let mut remaining = budget;
    let mut proven = true;
    let mut h_star = 1u32;
    let mut columns: Vec<Vec<u32>> = Vec::with_capacity(n);

    for k in 0..n {
        let adj: Vec<Vec<bool>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| i != j && !sharing.may_share(i, j, k))
                    .collect()
            })
            .collect();
        let (first_fit_colors, first_fit_assign) = first_fit_column(&adj);
        let mut search = ColumnSearch {
            adj: &adj,
            assign: vec![0; m],
            best: first_fit_colors,
            best_assign: first_fit_assign,
        };
        proven &= search.descend(0, 0, &mut remaining);
        h_star = h_star.max(search.best);
        columns.push(search.best_assign);
    }

    let rows: Vec<Vec<u32>> = (0..m).map(|i| (0..n).map(|k| columns[k][i]).collect()).collect();
    let witness = ColoringMatrix::from_parts(rows, h_star);
    let explored = budget - remaining;
    if proven {
        OracleOutcome::Exact(OracleResult {
            h_star,
            witness,
            explored,
        })
    } else {
        OracleOutcome::Inconclusive {
            best_known: h_star,
            witness,
            explored,
        }
    }
}

fn first_fit_column(adj: &[Vec<bool>]) -> (u32, Vec<u32>) {
    let m = adj.len();
    let mut assign = vec![0u32; m];
    let mut used = 0u32;
    for v in 0..m {
        let mut f = 1u32;
        while (0..v).any(|u| adj[v][u] && assign[u] == f) {
            f += 1;
        }
        assign[v] = f;
        used = used.max(f);
    }
    (used, assign)
}

struct ColumnSearch<'a> {
    adj: &'a [Vec<bool>],
    assign: Vec<u32>,
    best: u32,
    best_assign: Vec<u32>,
}

impl ColumnSearch<'_> {
    /// Returns false when the budget ran out mid-search.
    fn descend(&mut self, v: usize, used: u32, remaining: &mut u64) -> bool {
        if used >= self.best {
            return true;
        }
        if v == self.adj.len() {
            self.best = used;
            self.best_assign = self.assign.clone();
            return true;
        }
        let mut color = 1u32;
        while color <= used + 1 && color < self.best {
            let blocked = (0..v).any(|u| self.adj[v][u] && self.assign[u] == color);
            if !blocked {
                if *remaining == 0 {
                    return false;
                }
                *remaining -= 1;
                self.assign[v] = color;
                if !self.descend(v + 1, used.max(color), remaining) {
                    return false;
                }
                self.assign[v] = 0;
            }
            color += 1;
        }
        true
    }
}

/// Seeded random sharing matrix: symmetric with a unit diagonal, each
/// off-diagonal pair (i < j, k) independently cut with probability
/// `density`. Same seed, same matrix.
pub fn random_instance(m: usize, n: usize, density: f64, seed: u64) -> SharingMatrix {
    assert!(m >= 1 && n >= 1, "need at least one tenant and one variant");
    assert!(
        (0.0..=1.0).contains(&density),
        "density must lie in [0, 1]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = Grid3::filled(m, n, true);
    for i in 0..m {
        for j in (i + 1)..m {
            for k in 0..n {
                if rng.gen::<f64>() < density {
                    grid.set(i, j, k, false);
                    grid.set(j, i, k, false);
                }
            }
        }
    }
    let tenants = (1..=m).map(|i| format!("T{i}")).collect();
    let variants = (1..=n).map(|k| format!("V{k}")).collect();
    SharingMatrix::from_grid("RVC1".into(), tenants, variants, grid)
}
