//! Sectioned greedy coloring of conflict matrices.
//!
//! Every tenant vertex is divided into one section per variant. Sections of
//! the same variant must get different colors when their tenants conflict
//! on that variant; sections of different variants never constrain each
//! other. A color stands for one deployed instance, and because an instance
//! serves all of its variants at once the color pool is shared across
//! variants.

use thiserror::Error;

use crate::graph::ConflictMatrix;

/// The m×n color assignment: `color_of(i, k)` is the 1-based instance id
/// serving tenant `i` under variant `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringMatrix {
    rows: Vec<Vec<u32>>,
    num_colors: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("coloring matrix must have at least one tenant row and one variant column")]
    Empty,
    #[error("coloring rows must all have the same length")]
    Ragged,
    #[error("colors are 1-based; found 0")]
    ZeroColor,
}

impl ColoringMatrix {
    /// Wraps raw rows, recomputing the color count. Accepts any positive
    /// assignment (loaded plans may have been edited by hand); the
    /// contiguous-color guarantee holds for colorings this crate produces.
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<Self, ColoringError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(ColoringError::Empty);
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(ColoringError::Ragged);
        }
        let mut max = 0;
        for row in &rows {
            for &c in row {
                if c == 0 {
                    return Err(ColoringError::ZeroColor);
                }
                max = max.max(c);
            }
        }
        Ok(Self {
            rows,
            num_colors: max,
        })
    }

    pub(crate) fn from_parts(rows: Vec<Vec<u32>>, num_colors: u32) -> Self {
        Self { rows, num_colors }
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn color_of(&self, tenant: usize, variant: usize) -> u32 {
        self.rows[tenant][variant]
    }

    /// The number of instances the deployment needs: the count of used
    /// colors.
    pub fn num_colors(&self) -> u32 {
        self.num_colors
    }

    pub fn tenant_count(&self) -> usize {
        self.rows.len()
    }

    pub fn variant_count(&self) -> usize {
        self.rows[0].len()
    }

    /// Regroups the matrix by instance: which tenants each instance serves
    /// under each variant. Cells may be empty (an instance need not serve
    /// every variant).
    pub fn distribution(&self) -> InstanceDistribution {
        let n = self.variant_count();
        let mut cells = vec![vec![Vec::new(); n]; self.num_colors as usize];
        for (i, row) in self.rows.iter().enumerate() {
            for k in 0..n {
                cells[(row[k] - 1) as usize][k].push(i);
            }
        }
        InstanceDistribution { cells }
    }
}

/// Per instance and per variant, the tenants served; tenant indices are
/// ascending, instances are in color order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDistribution {
    cells: Vec<Vec<Vec<usize>>>,
}

impl InstanceDistribution {
    pub fn instance_count(&self) -> usize {
        self.cells.len()
    }

    pub fn variant_count(&self) -> usize {
        self.cells.first().map_or(0, |row| row.len())
    }

    /// Tenants of `instance` (0-based) under `variant`, ascending.
    pub fn tenants(&self, instance: usize, variant: usize) -> &[usize] {
        &self.cells[instance][variant]
    }
}

/// Deterministic sequential coloring of the conflict matrix.
///
/// The first tenant takes color 1 in every section. Each later tenant, per
/// variant, scans colors `1..=h` in order and takes the first one not held
/// by a conflicting earlier tenant in the same variant column; if none
/// fits, a new color is opened. Tenant order is input row order and must
/// not be changed or parallelized: the result is defined by this exact
/// scan.
pub fn color(conflicts: &ConflictMatrix) -> ColoringMatrix {
    let m = conflicts.tenant_count();
    let n = conflicts.variant_count();
    let mut rows = vec![vec![0u32; n]; m];
    rows[0] = vec![1; n];
    let mut num_colors = 1u32;
    for i in 1..m {
        for k in 0..n {
            let mut assigned = None;
            'scan: for f in 1..=num_colors {
                for (j, earlier) in rows.iter().take(i).enumerate() {
                    if earlier[k] == f && conflicts.conflicts(i, j, k) {
                        continue 'scan;
                    }
                }
                assigned = Some(f);
                break;
            }
            rows[i][k] = assigned.unwrap_or_else(|| {
                num_colors += 1;
                num_colors
            });
        }
    }
    ColoringMatrix::from_parts(rows, num_colors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SharingMatrix;
    use crate::instance::VariantTable;
    use crate::requirement::Requirement;

    fn conflict_free(m: usize, n: usize) -> ConflictMatrix {
        let tenants = (1..=m).map(|i| format!("T{i}")).collect();
        let variants = (1..=n).map(|k| format!("V{k}")).collect();
        let rows = vec![vec![Requirement::ShareAny; n]; m];
        let table = VariantTable::new("R1", tenants, variants, rows).unwrap();
        SharingMatrix::from_table(&table).invert()
    }

    fn total_conflict(m: usize, n: usize) -> ConflictMatrix {
        let tenants = (1..=m).map(|i| format!("T{i}")).collect();
        let variants = (1..=n).map(|k| format!("V{k}")).collect();
        let rows = vec![vec![Requirement::ShareNone; n]; m];
        let table = VariantTable::new("R1", tenants, variants, rows).unwrap();
        SharingMatrix::from_table(&table).invert()
    }

    #[test]
    fn single_tenant_gets_one_color() {
        let d = color(&conflict_free(1, 3));
        assert_eq!(d.rows(), &[vec![1, 1, 1]]);
        assert_eq!(d.num_colors(), 1);
    }

    #[test]
    fn forced_conflict_opens_a_second_color() {
        let d = color(&total_conflict(2, 1));
        assert_eq!(d.rows(), &[vec![1], vec![2]]);
        assert_eq!(d.num_colors(), 2);
    }

    #[test]
    fn no_conflicts_reuse_the_first_color() {
        let d = color(&conflict_free(3, 1));
        assert_eq!(d.rows(), &[vec![1], vec![1], vec![1]]);
        assert_eq!(d.num_colors(), 1);
    }

    #[test]
    fn complete_conflict_graph_needs_one_color_per_tenant() {
        let d = color(&total_conflict(4, 2));
        assert_eq!(d.num_colors(), 4);
        for k in 0..2 {
            for i in 0..4 {
                assert_eq!(d.color_of(i, k), (i + 1) as u32);
            }
        }
    }

    #[test]
    fn distribution_regroups_by_instance() {
        let d = ColoringMatrix::from_rows(vec![vec![1, 1], vec![2, 1], vec![2, 2]]).unwrap();
        let dist = d.distribution();
        assert_eq!(dist.instance_count(), 2);
        assert_eq!(dist.tenants(0, 0), &[0]);
        assert_eq!(dist.tenants(0, 1), &[0, 1]);
        assert_eq!(dist.tenants(1, 0), &[1, 2]);
        assert_eq!(dist.tenants(1, 1), &[2]);
    }

    #[test]
    fn single_tenant_distribution_has_one_instance() {
        let d = ColoringMatrix::from_rows(vec![vec![1]]).unwrap();
        let dist = d.distribution();
        assert_eq!(dist.instance_count(), 1);
        assert_eq!(dist.tenants(0, 0), &[0]);
    }

    #[test]
    fn from_rows_validates_shape_and_values() {
        assert_eq!(
            ColoringMatrix::from_rows(vec![]).unwrap_err(),
            ColoringError::Empty
        );
        assert_eq!(
            ColoringMatrix::from_rows(vec![vec![1], vec![1, 2]]).unwrap_err(),
            ColoringError::Ragged
        );
        assert_eq!(
            ColoringMatrix::from_rows(vec![vec![0]]).unwrap_err(),
            ColoringError::ZeroColor
        );
        let ok = ColoringMatrix::from_rows(vec![vec![1, 3]]).unwrap();
        assert_eq!(ok.num_colors(), 3);
    }
}
