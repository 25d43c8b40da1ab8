//! The `rbl` command line. `run` parses argv, dispatches, and returns the
//! process exit code:
//!
//! * `verify`: 0 valid, 1 violation, 2 vacuously valid
//! * 64 usage error, 65 bad input or failed precondition, 69 resource or
//!   budget limit, 74 I/O failure

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rbl_core::bounds::{self, check_corradi_instance, lemma_a1_check, random_instance};
use rbl_core::constructions::{self, ConstructionResult, DEFAULT_DENSITY};
use rbl_core::energy::{self, PruneConfig, DEFAULT_PARTITION_RETRIES};
use rbl_core::exact::{exact_r, SearchBudget};
use rbl_core::store::{self, Payload, RecordKey, ResultRecord, Store};
use rbl_core::verifier::{verify_with_jobs, VerifyOutcome};
use rbl_core::{Coloring, Error, PatternSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_VACUOUS: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_UNAVAILABLE: i32 = 69;
pub const EXIT_IO: i32 = 74;

#[derive(Parser, Debug)]
#[command(name = "rbl", version, about = "Edge-colorings of K_{n,n} avoiding few-colored K_{s,t}")]
struct Cli {
    /// Append results to this JSONL store (RBL_STORE overrides).
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConstructionName {
    StarI,
    StarIi,
    StarRefined,
    NearRainbowPairs,
    NearRainbowPairsOdd,
    K89,
    Hypergraph,
    Rainbow,
    Monochromatic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Emit {
    Stats,
    Graph,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Lemma {
    Corradi,
    GenCorradi,
    A1,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build one of the explicit colorings.
    Construct {
        name: ConstructionName,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DENSITY)]
        density: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that every copy of K_{s,t} sees at least q colors.
    Verify {
        #[arg(long)]
        coloring: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Exhaustive search for r(K_{n,n}, K_{s,t}, q).
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        node_limit: Option<u64>,
        /// Seconds.
        #[arg(long)]
        time_limit: Option<u64>,
    },
    /// Color energy graph statistics, optionally after pruning.
    Energy {
        #[arg(long)]
        coloring: PathBuf,
        #[arg(long)]
        r: usize,
        /// Rare-color threshold; setting it (or --seed) enables pruning.
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Emit::Stats)]
        emit: Emit,
    },
    /// Known bounds for the given parameters.
    Bounds {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        q: usize,
    },
    /// Randomized or exhaustive checks of the set-family and arithmetic lemmas.
    CheckLemmas {
        #[arg(long, value_enum)]
        which: Lemma,
        #[arg(long, default_value_t = 1000)]
        seeds: u64,
        #[arg(long, default_value_t = 200)]
        s_max: u64,
        #[arg(long, default_value_t = 600)]
        t_max: u64,
    },
    /// Consistency of stored exact values with closed forms.
    Report,
}

enum Failure {
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Core(Error::Json(e))
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn exit_code_for(e: &Failure) -> i32 {
    match e {
        Failure::Io(_) | Failure::Core(Error::Io(_)) => EXIT_IO,
        Failure::Core(e) if e.is_resource() => EXIT_UNAVAILABLE,
        Failure::Core(_) => EXIT_DATA,
    }
}

/// Runs with the process's stdout and stderr.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let store = store::resolve_store_path(cli.store.clone()).map(Store::new);
    match dispatch(cli.command, store.as_ref(), out, err) {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code_for(&e);
            let msg = match e {
                Failure::Core(e) => e.to_string(),
                Failure::Io(e) => e.to_string(),
            };
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn read_coloring(path: &Path) -> std::result::Result<Coloring, Failure> {
    let text = std::fs::read_to_string(path)?;
    if let Ok(c) = Coloring::from_json(&text) {
        return Ok(c);
    }
    let wrapped: ConstructionResult = serde_json::from_str(&text)?;
    Ok(wrapped.coloring)
}

fn need(v: Option<usize>, flag: &str) -> rbl_core::Result<usize> {
    v.ok_or_else(|| Error::Input(format!("--{flag} is required for this construction")))
}

fn append(store: Option<&Store>, key: RecordKey, payload: Payload) -> std::result::Result<(), Failure> {
    if let Some(st) = store {
        st.append(&ResultRecord::now(key, payload))?;
    }
    Ok(())
}

fn dispatch(cmd: Command, store: Option<&Store>, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Construct {
            name,
            n,
            s,
            t,
            q,
            ell,
            seed,
            density,
            out: out_path,
        } => {
            use ConstructionName::*;
            let res = match name {
                StarI => constructions::star_upper_i(n, need(t, "t")?, need(q, "q")?)?,
                StarIi => constructions::star_upper_ii(n, need(t, "t")?, need(q, "q")?)?,
                StarRefined => constructions::star_upper_refined(n, need(t, "t")?, need(q, "q")?)?,
                NearRainbowPairs => constructions::near_rainbow_pairs(n, need(s, "s")?, need(t, "t")?)?,
                NearRainbowPairsOdd => {
                    constructions::near_rainbow_pairs_odd(n, need(s, "s")?, need(t, "t")?)?
                }
                K89 => constructions::k89_block(n)?,
                Hypergraph => {
                    constructions::hypergraph_coloring(n, need(s, "s")?, need(t, "t")?, ell, density, seed)?
                }
                Rainbow | Monochromatic => {
                    let coloring = if matches!(name, Rainbow) {
                        constructions::rainbow(n)?
                    } else {
                        constructions::monochromatic(n)?
                    };
                    emit_coloring_only(&coloring, out_path.as_deref(), out)?;
                    return Ok(EXIT_OK);
                }
            };
            for w in &res.warnings {
                writeln!(err, "warning: {w}")?;
            }
            let c = res.claim;
            let key = RecordKey::new(n, c.s, c.t, c.q, format!("construct:{}", res.provenance.name), res.provenance.seed);
            append(store, key, Payload::Construction(c))?;
            match out_path {
                Some(p) => {
                    std::fs::write(&p, serde_json::to_string_pretty(&res)?)?;
                    emit_json(&res.claim, out)?;
                }
                None => emit_json(&res, out)?,
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            coloring,
            s,
            t,
            q,
            jobs,
        } => {
            let c = read_coloring(&coloring)?;
            let spec = PatternSpec::new(s, t, q)?;
            let outcome = verify_with_jobs(&c, spec, jobs)?;
            append(
                store,
                RecordKey::new(c.n(), s, t, q, "verify", None),
                Payload::Verification(outcome.clone()),
            )?;
            emit_json(&outcome, out)?;
            Ok(match outcome {
                VerifyOutcome::Valid => EXIT_OK,
                VerifyOutcome::Violation { .. } => EXIT_VIOLATION,
                VerifyOutcome::VacuouslyValid => EXIT_VACUOUS,
            })
        }
        Command::Exact {
            n,
            s,
            t,
            q,
            node_limit,
            time_limit,
        } => {
            let spec = PatternSpec::new(s, t, q)?;
            let mut budget = SearchBudget::default();
            if let Some(l) = node_limit {
                budget.node_limit = l;
            }
            if let Some(secs) = time_limit {
                budget.time_limit = Duration::from_secs(secs);
            }
            let res = exact_r(n, spec, &budget)?;
            append(store, RecordKey::new(n, s, t, q, "exact", None), Payload::Exact(res.clone()))?;
            emit_json(&res, out)?;
            Ok(EXIT_OK)
        }
        Command::Energy {
            coloring,
            r,
            threshold,
            seed,
            emit,
        } => {
            let c = read_coloring(&coloring)?;
            let graph = if threshold.is_some() || seed.is_some() {
                let config = PruneConfig {
                    seed: seed.unwrap_or(0),
                    retries: DEFAULT_PARTITION_RETRIES,
                    threshold,
                    ell_star: None,
                };
                let (g, report) = energy::pruned_energy(&c, r, config)?;
                if let Emit::Stats = emit {
                    emit_json(
                        &serde_json::json!({
                            "n": c.n(),
                            "r": r,
                            "seed": config.seed,
                            "prune": report,
                            "flags": g.flags,
                        }),
                        out,
                    )?;
                    return Ok(EXIT_OK);
                }
                g
            } else {
                energy::build_energy(&c, r)?
            };
            match emit {
                Emit::Graph => emit_json(&graph.to_json(), out)?,
                Emit::Stats => {
                    let edges = graph.edge_count() as u64;
                    let power_sum: u64 = graph
                        .color_multiplicity
                        .iter()
                        .map(|&m| (m as u64).pow(r as u32))
                        .sum();
                    emit_json(
                        &serde_json::json!({
                            "n": c.n(),
                            "r": r,
                            "palette": c.palette_size(),
                            "edges": edges,
                            "multiplicity_power_sum": power_sum,
                            "max_star": graph.max_star,
                            "palette_lower_bound": energy::energy_lower_bound_colors(edges, c.n(), r)?,
                        }),
                        out,
                    )?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Bounds { s, t, q } => {
            emit_json(&bounds::threshold_classify(s, t, q)?, out)?;
            Ok(EXIT_OK)
        }
        Command::CheckLemmas {
            which,
            seeds,
            s_max,
            t_max,
        } => {
            match which {
                Lemma::A1 => {
                    let v = lemma_a1_check(s_max, t_max)?;
                    emit_json(
                        &serde_json::json!({ "which": "a1", "s_max": s_max, "t_max": t_max, "violations": v }),
                        out,
                    )?;
                }
                Lemma::Corradi | Lemma::GenCorradi => {
                    let (r, label) = match which {
                        Lemma::Corradi => (2, "corradi"),
                        _ => (3, "gen-corradi"),
                    };
                    let mut violations = Vec::new();
                    for seed in 0..seeds {
                        let inst = random_instance(seed, r)?;
                        let check = check_corradi_instance(&inst);
                        if !check.satisfied || check.identity_ok == Some(false) {
                            violations.push(serde_json::json!({ "seed": seed, "check": check }));
                        }
                    }
                    emit_json(
                        &serde_json::json!({ "which": label, "seeds": seeds, "violations": violations }),
                        out,
                    )?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Report => {
            let Some(st) = store else {
                return Err(Error::Input("report needs --store or RBL_STORE".into()).into());
            };
            let loaded = st.load()?;
            for w in &loaded.warnings {
                writeln!(err, "warning: {w}")?;
            }
            emit_json(&store::report(&loaded), out)?;
            Ok(EXIT_OK)
        }
    }
}

fn emit_coloring_only(
    coloring: &Coloring,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, coloring.to_json())?,
        None => {
            out.write_all(coloring.to_json().as_bytes())?;
            writeln!(out)?;
        }
    }
    Ok(())
}
