use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use tenplan::instance::PlanningInstance;
use tenplan::plan::{
    check_plan, plan_from_toml, plan_to_toml, render_plan, render_requirement_tables, solve,
    synthesize_instance, tables_to_toml, OracleOptions, SolveOptions,
};

/// Plan multi-tenant component deployments from per-tenant sharing
/// requirements.
#[derive(Parser)]
#[command(name = "tenplan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate functionality-level requirements into per-RVC variant
    /// requirement tables
    Translate {
        /// Planning instance file
        input: PathBuf,
        /// Where to write the tables file
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the full pipeline and write a deployment plan
    Solve {
        /// Planning instance file
        input: PathBuf,
        /// Where to write the plan file
        #[arg(short, long)]
        output: PathBuf,
        /// Also write DOT graphs of the sharing and conflict matrices,
        /// next to the plan file
        #[arg(long)]
        emit_graphs: bool,
        /// Audit the greedy result against the exact minimum (small
        /// instances only)
        #[arg(long)]
        oracle: bool,
        /// Solve a single RVC id instead of all of them
        #[arg(long)]
        rvc: Option<String>,
    },
    /// Validate a deployment plan against its planning instance
    Check {
        /// Deployment plan file
        plan: PathBuf,
        /// Planning instance file the plan was solved from
        instance: PathBuf,
    },
    /// Generate a synthetic single-RVC planning instance with seeded
    /// random conflicts
    Gen {
        /// Number of tenants
        #[arg(short = 'm', long)]
        tenants: usize,
        /// Number of variants
        #[arg(short = 'n', long)]
        variants: usize,
        /// Probability that a tenant pair conflicts on a variant
        #[arg(long)]
        density: f64,
        /// RNG seed
        #[arg(long)]
        seed: u64,
        /// Where to write the instance file
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Translate { input, output } => {
            let instance = load_instance(&input)?;
            let tables = instance.translate();
            write_file(&output, &tables_to_toml(instance.tenants.labels(), &tables))?;
            print!("{}", render_requirement_tables(&tables));
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            input,
            output,
            emit_graphs,
            oracle,
            rvc,
        } => {
            let instance = load_instance(&input)?;
            let options = SolveOptions {
                only_rvc: rvc,
                oracle: oracle.then(OracleOptions::default),
            };
            let plan = solve(&instance, &options)?;
            write_file(&output, &plan_to_toml(&plan))?;
            if emit_graphs {
                for rvc_plan in &plan.rvcs {
                    let sharing = graph_path(&output, rvc_plan.rvc(), "sharing");
                    write_file(&sharing, &rvc_plan.sharing.to_graph().to_dot())?;
                    let conflict = graph_path(&output, rvc_plan.rvc(), "conflict");
                    write_file(&conflict, &rvc_plan.conflicts.to_graph().to_dot())?;
                }
            }
            print!("{}", render_plan(&plan));
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { plan, instance } => {
            let instance = load_instance(&instance)?;
            let text = fs::read_to_string(&plan)
                .with_context(|| format!("reading {}", plan.display()))?;
            let plan_data = plan_from_toml(&text)
                .with_context(|| format!("loading deployment plan {}", plan.display()))?;
            let audit = check_plan(&plan_data, &instance)?;
            for violation in &audit.violations {
                println!("{violation}");
            }
            for inconsistency in &audit.inconsistencies {
                println!("{inconsistency}");
            }
            if audit.is_clean() {
                println!("plan is valid");
                Ok(ExitCode::SUCCESS)
            } else {
                println!(
                    "plan check failed: {} violations, {} inconsistencies",
                    audit.violations.len(),
                    audit.inconsistencies.len()
                );
                Ok(ExitCode::from(1))
            }
        }
        Command::Gen {
            tenants,
            variants,
            density,
            seed,
            output,
        } => {
            if tenants < 1 {
                bail!("tenant count must be at least 1");
            }
            if variants < 1 {
                bail!("variant count must be at least 1");
            }
            if !(0.0..=1.0).contains(&density) {
                bail!("density must lie in [0, 1]");
            }
            write_file(&output, &synthesize_instance(tenants, variants, density, seed))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_instance(path: &Path) -> Result<PlanningInstance> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    PlanningInstance::from_toml_str(&text)
        .with_context(|| format!("loading planning instance {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

/// `plan.toml` + `RVC1` + `conflict` -> `plan.RVC1.conflict.dot`.
fn graph_path(output: &Path, rvc: &str, kind: &str) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "plan".to_string());
    output.with_file_name(format!("{stem}.{rvc}.{kind}.dot"))
}
