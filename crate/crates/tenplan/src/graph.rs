//! Deployment-information matrices and their edge-labeled graph views.
//!
//! The sharing matrix records, per variant, which tenant pairs may share an
//! instance; the conflict matrix is its elementwise complement and is what
//! the coloring works on. Matrices are the canonical computation form; the
//! edge-labeled graphs exist for export and inspection.

use std::collections::BTreeSet;

use crate::instance::VariantTable;
use crate::requirement::Requirement;
use crate::tenant::TenantId;

/// Dense boolean m×m×n tensor, symmetric in the first two indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Grid3 {
    m: usize,
    n: usize,
    bits: Vec<bool>,
}

impl Grid3 {
    pub(crate) fn filled(m: usize, n: usize, value: bool) -> Self {
        Self {
            m,
            n,
            bits: vec![value; m * m * n],
        }
    }

    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.m + j) * self.n + k
    }

    pub(crate) fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.bits[self.offset(i, j, k)]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, k: usize, value: bool) {
        let at = self.offset(i, j, k);
        self.bits[at] = value;
    }

    fn complement(&self) -> Self {
        Self {
            m: self.m,
            n: self.n,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

/// Boolean tensor G: `may_share(i, j, k)` says tenants `i` and `j` may
/// share an instance deployed for variant `k`. Symmetric, with an all-ones
/// diagonal (a tenant always shares with itself).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharingMatrix {
    rvc: String,
    tenants: Vec<String>,
    variants: Vec<String>,
    grid: Grid3,
}

/// Elementwise complement of a sharing matrix: `conflicts(i, j, k)` says
/// the pair must NOT share variant `k`. The diagonal is all zeros, matching
/// the self-loop-free graph view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictMatrix {
    rvc: String,
    tenants: Vec<String>,
    variants: Vec<String>,
    grid: Grid3,
}

impl SharingMatrix {
    /// Builds G from a grounded variant requirement table.
    ///
    /// Starts all-ones, then every cell knocks out the pairs it forbids:
    /// `DSWAny` cuts the owner from everyone, `SWJ(L)` from everyone
    /// outside `L`, `DSW(L)` from everyone inside `L`. All branches skip
    /// `j == i`, so the diagonal stays 1.
    pub fn from_table(table: &VariantTable) -> Self {
        let m = table.tenant_count();
        let n = table.variant_count();
        let mut grid = Grid3::filled(m, n, true);
        for k in 0..n {
            for i in 0..m {
                match table.cell(i, k) {
                    Requirement::ShareAny => {}
                    Requirement::ShareNone => {
                        for j in 0..m {
                            if j != i {
                                cut(&mut grid, i, j, k);
                            }
                        }
                    }
                    Requirement::ShareJust(allowed) => {
                        for j in 0..m {
                            if j != i && !allowed.contains(&TenantId::new(j)) {
                                cut(&mut grid, i, j, k);
                            }
                        }
                    }
                    Requirement::DontShare(denied) => {
                        for id in denied {
                            if id.index() != i {
                                cut(&mut grid, i, id.index(), k);
                            }
                        }
                    }
                }
            }
        }
        Self {
            rvc: table.rvc().to_string(),
            tenants: table.tenants().to_vec(),
            variants: table.variants().to_vec(),
            grid,
        }
    }

    pub(crate) fn from_grid(
        rvc: String,
        tenants: Vec<String>,
        variants: Vec<String>,
        grid: Grid3,
    ) -> Self {
        Self {
            rvc,
            tenants,
            variants,
            grid,
        }
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

    pub fn may_share(&self, i: usize, j: usize, k: usize) -> bool {
        self.grid.get(i, j, k)
    }

    /// Elementwise complement, diagonal included.
    pub fn invert(&self) -> ConflictMatrix {
        ConflictMatrix {
            rvc: self.rvc.clone(),
            tenants: self.tenants.clone(),
            variants: self.variants.clone(),
            grid: self.grid.complement(),
        }
    }

    pub fn to_graph(&self) -> EdgeLabeledGraph {
        graph_from(
            &self.grid,
            &self.tenants,
            &self.variants,
            format!("{}_sharing", dot_id(&self.rvc)),
        )
    }
}

impl ConflictMatrix {
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

    pub fn conflicts(&self, i: usize, j: usize, k: usize) -> bool {
        self.grid.get(i, j, k)
    }

    /// Elementwise complement; inverting twice restores the original.
    pub fn invert(&self) -> SharingMatrix {
        SharingMatrix {
            rvc: self.rvc.clone(),
            tenants: self.tenants.clone(),
            variants: self.variants.clone(),
            grid: self.grid.complement(),
        }
    }

    pub fn to_graph(&self) -> EdgeLabeledGraph {
        graph_from(
            &self.grid,
            &self.tenants,
            &self.variants,
            format!("{}_conflict", dot_id(&self.rvc)),
        )
    }
}

fn cut(grid: &mut Grid3, i: usize, j: usize, k: usize) {
    grid.set(i, j, k, false);
    grid.set(j, i, k, false);
}

fn graph_from(grid: &Grid3, tenants: &[String], variants: &[String], name: String) -> EdgeLabeledGraph {
    let m = tenants.len();
    let n = variants.len();
    let mut edges = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let on: BTreeSet<usize> = (0..n).filter(|&k| grid.get(i, j, k)).collect();
            if !on.is_empty() {
                edges.push(Edge {
                    a: i,
                    b: j,
                    variants: on,
                });
            }
        }
    }
    EdgeLabeledGraph {
        name,
        vertices: tenants.to_vec(),
        variants: variants.to_vec(),
        edges,
    }
}

fn dot_id(raw: &str) -> String {
    let mut id: String = raw
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect();
    if id.chars().next().is_none_or(|c| c.is_ascii_digit()) {
        id.insert(0, 'g');
    }
    id
}

/// Undirected graph over tenants; each edge carries the set of variants it
/// stands for. An edge covering every variant renders without a label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeLabeledGraph {
    name: String,
    vertices: Vec<String>,
    variants: Vec<String>,
    edges: Vec<Edge>,
}

/// One undirected edge (`a < b`) and the non-empty variant set it covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub variants: BTreeSet<usize>,
}

impl EdgeLabeledGraph {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Whether the underlying matrix held a 1 at (i, j, k); order of `i`
    /// and `j` does not matter. Diagonal entries are never represented.
    pub fn has(&self, i: usize, j: usize, k: usize) -> bool {
        let (lo, hi) = (i.min(j), i.max(j));
        self.edges
            .iter()
            .any(|e| e.a == lo && e.b == hi && e.variants.contains(&k))
    }

    /// Deterministic DOT rendering: vertices in tenant order, edges in
    /// (a, b) order, labels as comma-joined variant ids.
    pub fn to_dot(&self) -> String {
        let mut out = format!("graph {} {{\n", self.name);
        for vertex in &self.vertices {
            out.push_str(&format!("    \"{vertex}\";\n"));
        }
        for edge in &self.edges {
            let a = &self.vertices[edge.a];
            let b = &self.vertices[edge.b];
            if edge.variants.len() == self.variants.len() {
                out.push_str(&format!("    \"{a}\" -- \"{b}\";\n"));
            } else {
                let label: Vec<&str> = edge
                    .variants
                    .iter()
                    .map(|&k| self.variants[k].as_str())
                    .collect();
                out.push_str(&format!(
                    "    \"{a}\" -- \"{b}\" [label=\"{}\"];\n",
                    label.join(",")
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::VariantTable;
    use crate::requirement::Requirement;

    fn labels(prefix: &str, count: usize) -> Vec<String> {
        (1..=count).map(|i| format!("{prefix}{i}")).collect()
    }

    fn table(m: usize, n: usize, rows: Vec<Vec<Requirement>>) -> VariantTable {
        VariantTable::new("R1", labels("T", m), labels("V", n), rows).unwrap()
    }

    #[test]
    fn all_share_any_gives_all_ones() {
        let t = table(3, 2, vec![vec![Requirement::ShareAny; 2]; 3]);
        let g = SharingMatrix::from_table(&t);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..2 {
                    assert!(g.may_share(i, j, k));
                }
            }
        }
    }

    #[test]
    fn share_none_cuts_everything_but_the_diagonal() {
        let t = table(
            2,
            2,
            vec![
                vec![Requirement::ShareNone, Requirement::ShareNone],
                vec![Requirement::ShareAny, Requirement::ShareAny],
            ],
        );
        let g = SharingMatrix::from_table(&t);
        for k in 0..2 {
            assert!(!g.may_share(0, 1, k));
            assert!(!g.may_share(1, 0, k));
            assert!(g.may_share(0, 0, k));
            assert!(g.may_share(1, 1, k));
        }
    }

    #[test]
    fn invert_complements_and_round_trips() {
        let t = table(
            2,
            1,
            vec![vec![Requirement::ShareAny], vec![Requirement::ShareAny]],
        );
        let g = SharingMatrix::from_table(&t);
        let gp = g.invert();
        for i in 0..2 {
            for j in 0..2 {
                assert!(!gp.conflicts(i, j, 0));
            }
        }
        assert_eq!(gp.invert(), g);
    }

    #[test]
    fn graph_captures_single_pair_single_variant() {
        // Tenant 1 refuses all variants except V3 to tenant 2.
        let deny_all = Requirement::ShareNone;
        let t = table(
            2,
            4,
            vec![
                vec![
                    deny_all.clone(),
                    deny_all.clone(),
                    Requirement::ShareAny,
                    deny_all.clone(),
                ],
                vec![Requirement::ShareAny; 4],
            ],
        );
        let g = SharingMatrix::from_table(&t).to_graph();
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.edges()[0].variants, [2usize].into_iter().collect());
        assert!(g.has(1, 0, 2));
        assert!(!g.has(0, 1, 0));
    }

    #[test]
    fn dot_renders_unlabeled_full_edges() {
        let t = table(2, 2, vec![vec![Requirement::ShareAny; 2]; 2]);
        let dot = SharingMatrix::from_table(&t).to_graph().to_dot();
        assert_eq!(
            dot,
            "graph r1_sharing {\n    \"T1\";\n    \"T2\";\n    \"T1\" -- \"T2\";\n}\n"
        );
    }

    #[test]
    fn dot_renders_a_single_vertex_graph() {
        let t = table(1, 1, vec![vec![Requirement::ShareAny]]);
        let dot = SharingMatrix::from_table(&t).to_graph().to_dot();
        assert_eq!(dot, "graph r1_sharing {\n    \"T1\";\n}\n");
    }
}
