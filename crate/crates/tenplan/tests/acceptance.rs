//! Acceptance suite for the deployment-planning pipeline.
//!
//! One test per criterion; each prints a single `ACCEPTANCE <name>: PASS|FAIL`
//! line (visible with `--nocapture`, and always visible for failures).
//!
//! Known red: `distribution_golden` keeps the recorded reference
//! distribution for the schools example verbatim, and the RVC3 part of that
//! reference answer is internally inconsistent — it seats Sc2 and Sc4
//! together on variant H although Sc4 declares `DSW(Sc2,Sc5)` there, so no
//! valid deployment can match it. The solver's own RVC3 answer (3
//! instances) is proven valid and minimal by
//! `pipeline::rvc3_needs_three_instances_and_is_valid`. The criterion is
//! kept as stated rather than weakened to match.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::schools;
use tenplan::coloring::color;
use tenplan::oracle::{check_valid, exact_min_instances, random_instance, OracleOutcome};
use tenplan::plan::{plan_to_toml, solve, SolveOptions};
use tenplan::requirement::{Requirement, TenantSet};
use tenplan::tenant::TenantId;

fn finish(name: &str, start: Instant, limit: Duration, mut problems: Vec<String>) {
    let elapsed = start.elapsed();
    if elapsed >= limit {
        problems.push(format!("took {elapsed:?}, limit {limit:?}"));
    }
    let pass = problems.is_empty();
    println!("ACCEPTANCE {name}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}:\n{}", problems.join("\n"));
}

/// (rvc id, rows of six tenant cells keyed by variant).
type TableGolden = (&'static str, &'static [(&'static str, [&'static str; 6])]);

/// (rvc id, instance count, per-variant tenant list of every instance).
type DistributionGolden = (
    &'static str,
    u32,
    &'static [(&'static str, &'static [&'static [&'static str]])],
);

/// Expected grounded requirement tables for the schools example, variant-
/// major: one row of six tenant cells per variant.
const EXPECTED_TABLES: &[TableGolden] = &[
    (
        "RVC1",
        &[
            ("A", ["DSWAny", "SWAny", "DSW(Sc1,Sc2,Sc4)", "SWJ(Sc2,Sc5)", "DSW(Sc2)", "SWAny"]),
            ("B", ["DSWAny", "DSW(Sc3)", "DSW(Sc1,Sc2,Sc6)", "DSW(Sc2,Sc5)", "DSW(Sc3)", "SWAny"]),
            ("C", ["DSWAny", "SWAny", "SWAny", "SWAny", "SWAny", "SWAny"]),
            ("D", ["DSWAny", "DSW(Sc1,Sc3)", "DSW(Sc6)", "SWJ(Sc2,Sc5)", "DSW(Sc6)", "SWAny"]),
        ],
    ),
    (
        "RVC2",
        &[
            ("E", ["DSWAny", "SWAny", "DSW(Sc1,Sc2,Sc4)", "SWJ(Sc2,Sc5)", "DSW(Sc2)", "SWAny"]),
            ("F", ["DSWAny", "DSW(Sc3)", "DSW(Sc1,Sc2,Sc6)", "DSW(Sc2,Sc5)", "DSW(Sc3)", "SWAny"]),
        ],
    ),
    (
        "RVC3",
        &[
            ("G", ["DSWAny", "SWJ(Sc4,Sc5)", "SWAny", "SWAny", "SWAny", "SWAny"]),
            ("H", ["DSWAny", "DSW(Sc3)", "DSW(Sc1,Sc2,Sc6)", "DSW(Sc2,Sc5)", "DSW(Sc3)", "SWAny"]),
        ],
    ),
    (
        "RVC4",
        &[
            ("J", ["DSWAny", "SWAny", "DSW(Sc4)", "SWJ(Sc2,Sc5)", "DSW(Sc2)", "SWAny"]),
            ("K", ["DSWAny", "SWAny", "DSW(Sc1,Sc2)", "SWJ(Sc2,Sc5)", "SWAny", "SWAny"]),
        ],
    ),
];

#[test]
fn translation_golden() {
    let start = Instant::now();
    let tables = schools().translate();
    let mut problems = Vec::new();

    if tables.len() != EXPECTED_TABLES.len() {
        problems.push(format!("{} tables for 4 RVCs", tables.len()));
    }
    for (table, (rvc, variants)) in tables.iter().zip(EXPECTED_TABLES) {
        if table.rvc() != *rvc {
            problems.push(format!("expected {rvc}, found {}", table.rvc()));
            continue;
        }
        let rendered = table.rendered_rows();
        for (k, (variant, cells)) in variants.iter().enumerate() {
            for (i, expected) in cells.iter().enumerate() {
                let actual = &rendered[i][k];
                if actual != expected {
                    problems.push(format!(
                        "{rvc} variant {variant}, tenant Sc{}: expected `{expected}`, got `{actual}`",
                        i + 1
                    ));
                }
            }
        }
    }
    finish("translation-golden", start, Duration::from_secs(1), problems);
}

#[test]
fn coloring_golden() {
    let start = Instant::now();
    let plan = solve(&schools(), &SolveOptions::default()).unwrap();
    let rvc1 = &plan.rvcs[0];
    let expected: Vec<Vec<u32>> = vec![
        vec![1, 1, 1, 1],
        vec![2, 2, 2, 2],
        vec![3, 3, 2, 3],
        vec![2, 3, 2, 2],
        vec![3, 2, 2, 2],
        vec![3, 2, 2, 4],
    ];
    let mut problems = Vec::new();
    if rvc1.coloring.rows() != expected.as_slice() {
        problems.push(format!(
            "RVC1 coloring differs: expected {expected:?}, got {:?}",
            rvc1.coloring.rows()
        ));
    }
    finish("coloring-golden", start, Duration::from_secs(1), problems);
}

/// Reference distribution tables: per RVC, the instance count and, per
/// variant, the tenant list of every instance (empty = the instance serves
/// no tenant under that variant).
const EXPECTED_DISTRIBUTION: &[DistributionGolden] = &[
    (
        "RVC1",
        4,
        &[
            ("A", &[&["Sc1"], &["Sc2", "Sc4"], &["Sc3", "Sc5", "Sc6"], &[]]),
            ("B", &[&["Sc1"], &["Sc2", "Sc5", "Sc6"], &["Sc3", "Sc4"], &[]]),
            ("C", &[&["Sc1"], &["Sc2", "Sc3", "Sc4", "Sc5", "Sc6"], &[], &[]]),
            ("D", &[&["Sc1"], &["Sc2", "Sc4", "Sc5"], &["Sc3"], &["Sc6"]]),
        ],
    ),
    (
        "RVC2",
        3,
        &[
            ("E", &[&["Sc1"], &["Sc2", "Sc4"], &["Sc3", "Sc5", "Sc6"]]),
            ("F", &[&["Sc1"], &["Sc2", "Sc5", "Sc6"], &["Sc3", "Sc4"]]),
        ],
    ),
    // The reference answer for RVC3 below cannot be produced by any valid
    // deployment: its H row seats Sc2 and Sc4 together although Sc4
    // declares DSW(Sc2,Sc5) on H. Kept verbatim; see the module docs.
    (
        "RVC3",
        4,
        &[
            ("G", &[&["Sc1"], &["Sc2", "Sc5"], &["Sc3", "Sc4", "Sc6"], &[]]),
            ("H", &[&["Sc1"], &["Sc2", "Sc4", "Sc6"], &["Sc3"], &["Sc5"]]),
        ],
    ),
    (
        "RVC4",
        3,
        &[
            ("J", &[&["Sc1"], &["Sc2", "Sc3", "Sc6"], &["Sc4", "Sc5"]]),
            ("K", &[&["Sc1"], &["Sc2", "Sc4", "Sc5"], &["Sc3", "Sc6"]]),
        ],
    ),
];

#[test]
fn distribution_golden() {
    let start = Instant::now();
    let plan = solve(&schools(), &SolveOptions::default()).unwrap();
    let mut problems = Vec::new();

    for (rvc_plan, (rvc, instances, variants)) in plan.rvcs.iter().zip(EXPECTED_DISTRIBUTION) {
        let mut mismatches = Vec::new();
        if rvc_plan.coloring.num_colors() != *instances {
            mismatches.push(format!(
                "expected {instances} instances, got {}",
                rvc_plan.coloring.num_colors()
            ));
        }
        let labels = rvc_plan.table.tenants();
        let dist = &rvc_plan.distribution;
        for (k, (variant, per_instance)) in variants.iter().enumerate() {
            for (c, expected) in per_instance.iter().enumerate() {
                let actual: Vec<&str> = if c < dist.instance_count() {
                    dist.tenants(c, k).iter().map(|&i| labels[i].as_str()).collect()
                } else {
                    Vec::new()
                };
                if actual != **expected {
                    mismatches.push(format!(
                        "variant {variant} instance {}: expected {expected:?}, got {actual:?}",
                        c + 1
                    ));
                }
            }
        }
        if mismatches.is_empty() {
            println!("  {rvc}: match");
        } else {
            println!("  {rvc}: MISMATCH");
            problems.push(format!("{rvc}: {}", mismatches.join("; ")));
        }
    }
    finish("distribution-golden", start, Duration::from_secs(1), problems);
}

#[test]
fn safety_property() {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut cases = 0u64;
    for (d_idx, &density) in [0.1, 0.3, 0.5, 0.8].iter().enumerate() {
        for run in 0..250u64 {
            let seed = (d_idx as u64) * 10_000 + run;
            let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_5500 ^ seed);
            let m = rng.gen_range(1..=8);
            let n = rng.gen_range(1..=4);
            let sharing = random_instance(m, n, density, seed);
            let coloring = color(&sharing.invert());
            let violations = check_valid(&sharing, &coloring).unwrap();
            if !violations.is_empty() {
                problems.push(format!(
                    "m={m} n={n} density={density} seed={seed}: {violations:?}"
                ));
            }
            cases += 1;
        }
    }
    assert!(cases >= 1000);
    finish("safety-property", start, Duration::from_secs(30), problems);
}

#[test]
fn oracle_audit() {
    let start = Instant::now();
    let mut problems = Vec::new();
    let densities = [0.1, 0.3, 0.5, 0.8];
    let mut optimal = 0u32;
    let total = 200u64;
    for case in 0..total {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1_E000 ^ case);
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=3);
        let density = densities[(case % 4) as usize];
        let sharing = random_instance(m, n, density, 7_000 + case);
        let greedy = color(&sharing.invert());
        match exact_min_instances(&sharing, 10_000_000) {
            OracleOutcome::Exact(result) => {
                if greedy.num_colors() < result.h_star {
                    problems.push(format!(
                        "case {case}: greedy {} beat the proven minimum {}",
                        greedy.num_colors(),
                        result.h_star
                    ));
                }
                if greedy.num_colors() == result.h_star {
                    optimal += 1;
                }
            }
            OracleOutcome::Inconclusive { .. } => {
                problems.push(format!("case {case}: search budget exhausted"));
            }
        }
    }
    println!(
        "  greedy optimal in {optimal}/{total} audited cases ({:.1}%)",
        100.0 * f64::from(optimal) / total as f64
    );

    // The schools RVC1 matrix: greedy and the oracle agree on 4.
    let plan = solve(&schools(), &SolveOptions::default()).unwrap();
    let rvc1 = &plan.rvcs[0];
    match exact_min_instances(&rvc1.sharing, 10_000_000) {
        OracleOutcome::Exact(result) => {
            if result.h_star != 4 || rvc1.coloring.num_colors() != 4 {
                problems.push(format!(
                    "RVC1: greedy {} vs minimum {}",
                    rvc1.coloring.num_colors(),
                    result.h_star
                ));
            }
        }
        other => problems.push(format!("RVC1 audit did not finish: {other:?}")),
    }
    finish("oracle-audit", start, Duration::from_secs(60), problems);
}

#[test]
fn algebra_properties() {
    let start = Instant::now();
    let mut problems = Vec::new();

    // Every expression shape over three non-owner tenants: 2 keywords plus
    // SWJ/DSW over each non-empty subset.
    let targets: Vec<TenantId> = (1..=3).map(TenantId::new).collect();
    let mut expressions = vec![Requirement::ShareAny, Requirement::ShareNone];
    for mask in 1u8..8 {
        let set: TenantSet = targets
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask & (1 << bit) != 0)
            .map(|(_, id)| *id)
            .collect();
        expressions.push(Requirement::ShareJust(set.clone()));
        expressions.push(Requirement::DontShare(set));
    }
    assert_eq!(expressions.len(), 16);

    for a in &expressions {
        if a.combine(a) != *a {
            problems.push(format!("not idempotent: {a:?}"));
        }
        if Requirement::ShareAny.combine(a) != *a {
            problems.push(format!("SWAny is not an identity for {a:?}"));
        }
        if Requirement::ShareNone.combine(a) != Requirement::ShareNone {
            problems.push(format!("DSWAny does not absorb {a:?}"));
        }
        for b in &expressions {
            if a.combine(b) != b.combine(a) {
                problems.push(format!("not commutative: {a:?} vs {b:?}"));
            }
            for c in &expressions {
                if a.combine(b).combine(c) != a.combine(&b.combine(c)) {
                    problems.push(format!("not associative: {a:?}, {b:?}, {c:?}"));
                }
            }
        }
    }
    finish("algebra-properties", start, Duration::from_secs(5), problems);
}

#[test]
fn structural_properties() {
    let start = Instant::now();
    let mut problems = Vec::new();

    for seed in 0..300u64 {
        let table = common::random_table(seed);
        let sharing = tenplan::graph::SharingMatrix::from_table(&table);
        let (m, n) = (sharing.tenant_count(), sharing.variant_count());

        // Symmetric with a unit diagonal.
        for i in 0..m {
            for k in 0..n {
                if !sharing.may_share(i, i, k) {
                    problems.push(format!("seed {seed}: diagonal zero at ({i},{k})"));
                }
                for j in 0..m {
                    if sharing.may_share(i, j, k) != sharing.may_share(j, i, k) {
                        problems.push(format!("seed {seed}: asymmetry at ({i},{j},{k})"));
                    }
                }
            }
        }

        // Inverting twice restores the matrix.
        if sharing.invert().invert() != sharing {
            problems.push(format!("seed {seed}: invert is not an involution"));
        }

        // Graph round-trip is lossless off the diagonal.
        let graph = sharing.to_graph();
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                for k in 0..n {
                    if graph.has(i, j, k) != sharing.may_share(i, j, k) {
                        problems.push(format!("seed {seed}: graph round-trip lost ({i},{j},{k})"));
                    }
                }
            }
        }
    }

    // Two full solves are byte-identical.
    let instance = schools();
    let once = plan_to_toml(&solve(&instance, &SolveOptions::default()).unwrap());
    let twice = plan_to_toml(&solve(&instance, &SolveOptions::default()).unwrap());
    if once != twice {
        problems.push("solve is not deterministic".into());
    }

    finish("structural-properties", start, Duration::from_secs(10), problems);
}
