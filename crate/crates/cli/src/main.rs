//! `angled` — command-line front end for the angle-structure toolkit.
//!
//! Subcommands cover the full pipeline: `validate` a triangulation file,
//! `generate` triangulations (builtins, optionally randomized by Pachner
//! walks), `solve` the angle equations over a group, `check` a structure
//! file, compute the `invariant`, replay the vanishing proof with `trace`,
//! and `fuzz` the whole stack on random walks and random structures.
//!
//! Exit codes are a stable contract:
//! 0 success / property holds, 1 check failed, 2 malformed input,
//! 3 precondition violated.

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};

use angled::abelian::GroupSpec;
use angled::angles::{random_angled, AngleSystem};
use angled::complex::{random_walk, Triangulation};
use angled::invariant::total_invariant;
use angled::trace::run_trace;
use angled::{io, Error};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const EXIT_OK: i32 = 0;
const EXIT_FAILED: i32 = 1;
const EXIT_MALFORMED: i32 = 2;
const EXIT_PRECONDITION: i32 = 3;

#[derive(Parser)]
#[command(name = "angled", version, about = "Angle structures on triangulated 3-manifolds: solve, verify, trace, fuzz")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a triangulation file is a closed oriented 3-manifold
    Validate {
        /// Triangulation file (angled-tri-v1)
        tri: PathBuf,
    },
    /// Write a builtin triangulation, optionally after a random Pachner walk
    Generate {
        /// Which starting triangulation to use
        builtin: Builtin,
        /// Number of random 2-3 / 1-4 moves to apply
        #[arg(long, default_value_t = 0)]
        moves: usize,
        /// Seed for the walk
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the angle equations over a group and write the generators
    Solve {
        /// Triangulation file
        tri: PathBuf,
        /// Coefficient group, e.g. "Z/4", "Z^2 x Z/2", "1"
        #[arg(long)]
        group: String,
        /// Directory for generator files (current directory when omitted)
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Decide whether a structure file satisfies all angle equations
    Check {
        tri: PathBuf,
        angles: PathBuf,
    },
    /// Compute the obstruction invariant; holds iff the total is zero
    Invariant {
        tri: PathBuf,
        angles: PathBuf,
    },
    /// Replay every identity of the vanishing argument, step by step
    Trace {
        tri: PathBuf,
        angles: PathBuf,
    },
    /// Random Pachner walks, random structures, invariant + trace on each
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Maximum walk length per trial
        #[arg(long, default_value_t = 20)]
        moves: usize,
        /// Coefficient groups to draw from (repeatable)
        #[arg(long = "group", value_name = "SPEC")]
        groups: Vec<String>,
        /// Directory for counterexample bundles
        #[arg(long, default_value = "counterexamples")]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Builtin {
    /// Boundary of the 4-simplex: 5 tetrahedra on 5 vertices
    Simplex,
    /// Boundary of the 4-dimensional cross-polytope: 16 tetrahedra
    Crosspoly,
}

impl Builtin {
    fn build(self) -> Triangulation {
        match self {
            Builtin::Simplex => Triangulation::boundary_4_simplex(),
            Builtin::Crosspoly => Triangulation::cross_polytope_boundary(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Builtin::Simplex => "simplex",
            Builtin::Crosspoly => "crosspoly",
        }
    }
}

fn main() {
    std::process::exit(run(Cli::parse()));
}

fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Validate { tri } => cmd_validate(&tri),
        Command::Generate { builtin, moves, seed, out } => {
            cmd_generate(builtin, moves, seed, out.as_deref())
        }
        Command::Solve { tri, group, out } => cmd_solve(&tri, &group, &out),
        Command::Check { tri, angles } => cmd_check(&tri, &angles),
        Command::Invariant { tri, angles } => cmd_invariant(&tri, &angles),
        Command::Trace { tri, angles } => cmd_trace(&tri, &angles),
        Command::Fuzz { seed, trials, moves, groups, out } => {
            cmd_fuzz(seed, trials, moves, &groups, &out)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Malformed input (unreadable, unparsable, bad group grammar) is exit 2;
/// every other error is a violated precondition, exit 3.
fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::MalformedFile(_) | Error::Io(_) | Error::BadGroupSpec(_) => EXIT_MALFORMED,
        _ => EXIT_PRECONDITION,
    }
}

fn cmd_validate(tri: &Path) -> Result<i32, Error> {
    let t = io::read_triangulation(tri)?;
    let report = t.validate();
    println!("{report}");
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_generate(builtin: Builtin, moves: usize, seed: u64, out: Option<&Path>) -> Result<i32, Error> {
    let mut t = builtin.build();
    if moves > 0 {
        t = random_walk(&t, seed, moves);
    }
    match out {
        Some(path) => io::write_triangulation(path, &t)?,
        None => println!("{}", io::triangulation_to_json(&t)),
    }
    Ok(EXIT_OK)
}

fn cmd_solve(tri: &Path, group: &str, out: &Path) -> Result<i32, Error> {
    let t = io::read_triangulation(tri)?;
    let g: GroupSpec = group.parse()?;
    let system = AngleSystem::new(&t)?;
    let generators = system.generator_structures(&g)?;
    println!("group: {g}");
    println!("generators: {}", generators.len());
    std::fs::create_dir_all(out)?;
    for (i, s) in generators.iter().enumerate() {
        let path = out.join(format!("generator-{i:03}.angles.json"));
        io::write_structure(&path, s)?;
        println!("wrote {}", path.display());
    }
    Ok(EXIT_OK)
}

fn cmd_check(tri: &Path, angles: &Path) -> Result<i32, Error> {
    let t = io::read_triangulation(tri)?;
    let s = io::read_structure(angles)?;
    s.matches(&t)?;
    let mut check = s.check_vertex_equations();
    check.violations.extend(s.edge_equation_failures(&t)?);
    println!("{check}");
    Ok(if check.is_ok() { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_invariant(tri: &Path, angles: &Path) -> Result<i32, Error> {
    let t = io::read_triangulation(tri)?;
    let s = io::read_structure(angles)?;
    let report = total_invariant(&t, &s)?;
    println!("{report}");
    Ok(if report.holds { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_trace(tri: &Path, angles: &Path) -> Result<i32, Error> {
    let t = io::read_triangulation(tri)?;
    let s = io::read_structure(angles)?;
    let report = run_trace(&t, &s)?;
    println!("{report}");
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
}

const DEFAULT_FUZZ_GROUPS: [&str; 5] = ["Z/2", "Z/3", "Z/4", "Z", "Z/2 x Z/4"];

struct Trial {
    log: String,
    /// Inputs reproducing the failure, when there is one.
    failure: Option<(Triangulation, Option<angled::angles::AngleStructure>)>,
}

fn cmd_fuzz(seed: u64, trials: usize, moves: usize, groups: &[String], out: &Path) -> Result<i32, Error> {
    let groups: Vec<GroupSpec> = if groups.is_empty() {
        DEFAULT_FUZZ_GROUPS.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    } else {
        groups.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    };
    if trials == 0 {
        return Ok(EXIT_OK);
    }

    // Trials are independent; logs are buffered per trial and printed in
    // trial order so fixed seeds give byte-identical output either way.
    #[cfg(feature = "parallel")]
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| run_fuzz_trial(i, seed, moves, &groups))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Trial> = (0..trials)
        .map(|i| run_fuzz_trial(i, seed, moves, &groups))
        .collect();

    let mut failures = 0usize;
    for (i, trial) in results.iter().enumerate() {
        println!("{}", trial.log);
        if let Some((t, s)) = &trial.failure {
            failures += 1;
            let stem = format!("trial-{i:03}");
            match s {
                Some(s) => {
                    let (tp, ap) = io::write_bundle(out, &stem, t, s)?;
                    println!("  counterexample: {} {}", tp.display(), ap.display());
                }
                None => {
                    std::fs::create_dir_all(out)?;
                    let tp = out.join(format!("{stem}.tri.json"));
                    io::write_triangulation(&tp, t)?;
                    println!("  counterexample: {}", tp.display());
                }
            }
        }
    }
    if failures == 0 {
        println!("fuzz: {trials} trials, all passed");
        Ok(EXIT_OK)
    } else {
        println!("fuzz: {trials} trials, {failures} FAILED");
        Ok(EXIT_FAILED)
    }
}

fn run_fuzz_trial(trial: usize, seed: u64, max_moves: usize, groups: &[GroupSpec]) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, trial as u64));
    let builtin = if rng.gen_range(0..2u8) == 0 { Builtin::Simplex } else { Builtin::Crosspoly };
    let moves = rng.gen_range(0..=max_moves);
    let t = random_walk(&builtin.build(), rng.gen(), moves);
    let g = groups[rng.gen_range(0..groups.len())].clone();
    let head = format!(
        "trial {trial:03}: {} + {moves} moves ({} tets), {g}",
        builtin.name(),
        t.len()
    );

    let s = match random_angled(&t, &g, rng.gen()) {
        Ok(s) => s,
        Err(e) => {
            return Trial {
                log: format!("{head}: SETUP FAILED: {e}"),
                failure: Some((t, None)),
            }
        }
    };
    let step = |label: &str, detail: String, failed: bool, s: &angled::angles::AngleStructure| Trial {
        log: format!("{head}: {label}\n{}", indent(&detail)),
        failure: if failed { Some((t.clone(), Some(s.clone()))) } else { None },
    };
    match total_invariant(&t, &s) {
        Ok(report) if !report.holds => {
            return step("INVARIANT NONZERO", report.to_string(), true, &s)
        }
        Err(e) => return step("INVARIANT REFUSED", e.to_string(), true, &s),
        Ok(_) => {}
    }
    match run_trace(&t, &s) {
        Ok(report) if report.passed() => Trial {
            log: format!("{head}: ok ({} checks)", report.total_checks()),
            failure: None,
        },
        Ok(report) => step("TRACE FAILED", report.to_string(), true, &s),
        Err(e) => step("TRACE REFUSED", e.to_string(), true, &s),
    }
}

/// One splitmix64 round; distinct trials under the same master seed get
/// well-separated stream seeds.
fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed.wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}")).collect::<Vec<_>>().join("\n")
}
