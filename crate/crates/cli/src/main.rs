use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use vassreach::diophantine::{hilbert_basis, Bounded, DiophantineBudget, IntMatrix};
use vassreach::generate::{generate, GenParams};
use vassreach::oracle::{bfs_reach, certified_unreach, config, Certification, OracleBound, OracleReach};
use vassreach::search::{decide, SearchBudget, TreeStats, Verdict};
use vassreach::{geometry, parse_instance, print_instance, selftest, validate_walk, Configuration, Instance};

const SCHEMA_VERSION: u32 = 1;
const PROFILE_VAR: &str = "VASSREACH_BUDGET_PROFILE";

#[derive(Parser)]
#[command(name = "vassreach", version, about = "Reachability workbench for vector addition systems with states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide reachability for an instance file
    Check(CheckArgs),
    /// Like check, and print the walk with every intermediate configuration
    Witness(CheckArgs),
    /// Geometric dimension and orthogonal indices
    Dim { file: PathBuf },
    /// Hilbert basis of A·x = 0, with A read as a whitespace matrix
    Hilbert {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Bounded breadth-first search
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 40)]
        norm_cap: i64,
        #[arg(long, default_value_t = 100_000)]
        max_configs: usize,
    },
    /// Print a random instance with planted geometric dimension
    Gen {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        geom_dim: usize,
        #[arg(long)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        norm: i64,
        #[arg(long, default_value_t = 3)]
        max_entry: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the randomized cross-checks and print a table
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[arg(long)]
    budget_nodes: Option<usize>,
    #[arg(long)]
    budget_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for branch parallelism (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Sampled paths per refinement step for the soundness audit
    #[arg(long)]
    audit_samples: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Serialize)]
struct ReportRecord<'a> {
    schema: u32,
    version: &'static str,
    digest: String,
    verdict: &'static str,
    walk: Option<&'a [usize]>,
    reasons: &'a [String],
    stats: &'a TreeStats,
    elapsed_ms: f64,
    budget: &'a SearchBudget,
    threads: usize,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> Result<(Instance, String)> {
    let text = read(path)?;
    let inst = parse_instance(&text).map_err(|e| anyhow::anyhow!("{}:{e}", path.display()))?;
    let digest = format!("sha256:{:x}", Sha256::digest(text.as_bytes()));
    Ok((inst, digest))
}

fn budget_for(args: &CheckArgs) -> Result<SearchBudget> {
    let mut b = match std::env::var(PROFILE_VAR) {
        Ok(name) => SearchBudget::profile(&name)
            .with_context(|| format!("{PROFILE_VAR}={name}: expected tiny, desk or stress"))?,
        Err(_) => SearchBudget::default(),
    };
    if let Some(n) = args.budget_nodes {
        b.max_nodes = n;
    }
    if let Some(n) = args.budget_size {
        b.max_cgs_size = n;
    }
    if let Some(s) = args.seed {
        b.seed = s;
    }
    if let Some(n) = args.audit_samples {
        b.audit_samples = n;
    }
    Ok(b)
}

fn check(args: &CheckArgs, show_walk: bool) -> Result<ExitCode> {
    let (inst, digest) = load(&args.file)?;
    let budget = budget_for(args)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;
    let started = Instant::now();
    let report = pool.install(|| {
        decide(&inst.vass, inst.init.0, &inst.init.1, inst.target.0, &inst.target.1, &budget)
    });
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    let (walk, reasons): (Option<&[usize]>, &[String]) = match &report.verdict {
        Verdict::Reachable { walk, .. } => (Some(&walk.path.steps), &[]),
        Verdict::Unknown { reasons } => (None, reasons),
        Verdict::Unreachable => (None, &[]),
    };
    let record = ReportRecord {
        schema: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION"),
        digest,
        verdict: report.verdict.name(),
        walk,
        reasons,
        stats: &report.stats,
        elapsed_ms,
        budget: &budget,
        threads: pool.current_num_threads(),
    };
    if args.json {
        println!("{}", serde_json::to_string(&record)?);
    } else {
        println!("{}", record.verdict.to_uppercase());
        if let Some(w) = walk {
            let ids: Vec<String> = w.iter().map(usize::to_string).collect();
            println!("walk ({} steps): {}", w.len(), ids.join(" "));
        }
        for r in reasons {
            println!("reason: {r}");
        }
        let s = &report.stats;
        println!(
            "nodes {} leaves {} depth {} max size {} partial {}",
            s.nodes, s.leaves, s.max_depth, s.max_cgs_size, s.partial
        );
        for (k, n) in &s.steps_by_kind {
            println!("  {k:?}: {n}");
        }
        println!("time {elapsed_ms:.1} ms, digest {}", record.digest);
    }
    if show_walk {
        if let Verdict::Reachable { walk, .. } = &report.verdict {
            let mut cur = Configuration {
                state: inst.init.0,
                location: inst.init.1.clone(),
            };
            println!("{}{}", inst.vass.state(cur.state).name, cur.location);
            for &t in &walk.path.steps {
                let tr = inst.vass.transition(t);
                cur.location.add_assign(&tr.delta);
                cur.state = tr.dst;
                println!("  --{t}--> {}{}", inst.vass.state(cur.state).name, cur.location);
            }
            let start = config(inst.init.0, &inst.init.1);
            validate_walk(&inst.vass, &start, &walk.path).context("witness does not validate")?;
        }
    }
    Ok(if report.verdict.is_decided() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let code = line.split('#').next().unwrap_or("");
        if code.trim().is_empty() {
            continue;
        }
        let row = code
            .split_whitespace()
            .map(|t| t.parse::<i64>().with_context(|| format!("line {}: not an integer: {t}", ln + 1)))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                bail!("line {}: expected {} entries, found {}", ln + 1, first.len(), row.len());
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("empty matrix");
    }
    Ok(IntMatrix::from_rows(&rows))
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check(args) => check(&args, false),
        Command::Witness(args) => check(&args, true),
        Command::Dim { file } => {
            let (inst, _) = load(&file)?;
            println!("{}", geometry::geometric_dimension(&inst.vass));
            let orth: Vec<i64> = geometry::orthogonal_indices(&inst.vass)
                .into_iter()
                .map(|i| i as i64)
                .collect();
            println!("orthogonal: {}", join(&orth));
            Ok(ExitCode::SUCCESS)
        }
        Command::Hilbert { matrix } => {
            let a = parse_matrix(&read(&matrix)?)?;
            match hilbert_basis(&a, DiophantineBudget { max_nodes: 5_000_000 }) {
                Bounded::Done(basis) => {
                    for v in basis {
                        println!("{}", join(&v));
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Bounded::Budget => {
                    println!("UNKNOWN");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Oracle {
            file,
            norm_cap,
            max_configs,
        } => {
            let (inst, _) = load(&file)?;
            let bound = OracleBound {
                max_norm: norm_cap,
                max_configs,
                ..OracleBound::default()
            };
            let s = config(inst.init.0, &inst.init.1);
            let t = config(inst.target.0, &inst.target.1);
            if let OracleReach::Reachable(w) = bfs_reach(&inst.vass, &s, &t, &bound) {
                let ids: Vec<String> = w.path.steps.iter().map(usize::to_string).collect();
                println!("REACHABLE");
                println!("walk ({} steps): {}", ids.len(), ids.join(" "));
                return Ok(ExitCode::SUCCESS);
            }
            match certified_unreach(&inst.vass, &s, &t, &bound) {
                Certification::ProvenUnreachable => {
                    println!("UNREACHABLE");
                    Ok(ExitCode::SUCCESS)
                }
                Certification::Inconclusive => {
                    println!("UNKNOWN");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Gen {
            dim,
            geom_dim,
            states,
            norm,
            max_entry,
            seed,
        } => {
            if dim == 0 || states == 0 || norm < 1 || geom_dim > dim || max_entry < 0 {
                bail!("need dim ≥ 1, states ≥ 1, norm ≥ 1, geom-dim ≤ dim and max-entry ≥ 0");
            }
            let inst = generate(&GenParams {
                dim,
                geom_dim,
                states,
                norm,
                max_entry,
                seed,
            });
            print!("{}", print_instance(&inst));
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { seed } => {
            let suites = selftest::desk_suites(seed);
            println!("{:<20} {:>6} {:>8} {:>9}  result", "suite", "cases", "skipped", "failures");
            let mut ok = true;
            for s in &suites {
                ok &= s.passed();
                println!(
                    "{:<20} {:>6} {:>8} {:>9}  {}",
                    s.name,
                    s.cases,
                    s.skipped,
                    s.failures,
                    if s.passed() { "pass" } else { "FAIL" }
                );
                if let Some(f) = &s.first_failure {
                    println!("    {f}");
                }
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
