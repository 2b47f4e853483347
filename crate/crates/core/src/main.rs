use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use matcop::check::check_proof;
use matcop::gen::{generate_text, Profile};
use matcop::oracle::{oracle_prove, OracleVerdict};
use matcop::parse::parse_problem_with;
use matcop::problem::{Problem, StartPolicy};
use matcop::proof::{Mode, ProofDocument};
use matcop::prover::{prove, Config, Verdict};

// a closed pipe (e.g. `| head`) is not an error worth a panic
macro_rules! say {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

const THEOREM: u8 = 0;
const NON_THEOREM: u8 = 1;
const UNKNOWN: u8 = 2;
const INPUT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "matcop",
    version,
    about = "Connection-method prover driven by a CDCL SAT solver"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Caps {
    Auto,
    Off,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a spanning matrix (or closed tableau) for a CNF problem.
    Prove {
        file: PathBuf,
        #[arg(long, default_value = "core")]
        mode: Mode,
        /// Start clauses: ladder, declared, positive or all.
        #[arg(long, default_value = "ladder")]
        start: StartPolicy,
        #[arg(long, default_value_t = 16)]
        max_depth: u32,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long)]
        max_solves: Option<u64>,
        #[arg(long)]
        proof_out: Option<PathBuf>,
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        no_copy_order: bool,
        #[arg(long)]
        no_subst_order: bool,
        #[arg(long)]
        no_instance_sym: bool,
        /// Same as `--mode avatar`.
        #[arg(long)]
        avatar: bool,
        #[arg(long, value_enum, default_value = "auto")]
        epr_caps: Caps,
    },
    /// Verify a proof document against its problem.
    Check {
        proof: PathBuf,
        file: PathBuf,
        #[arg(long, default_value = "ladder")]
        start: StartPolicy,
    },
    /// Exhaustive search over matrices with at most `d_max` copies.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        d_max: u32,
    },
    /// Print a random problem.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "epr")]
        profile: Profile,
    },
}

fn load(path: &Path, start: StartPolicy) -> Result<Problem, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(INPUT_ERROR)
    })?;
    parse_problem_with(&text, start).map_err(|e| {
        eprintln!("{}:{e}", path.display());
        ExitCode::from(INPUT_ERROR)
    })
}

fn name(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Prove {
            file,
            mode,
            start,
            max_depth,
            timeout,
            max_solves,
            proof_out,
            stats,
            no_copy_order,
            no_subst_order,
            no_instance_sym,
            avatar,
            epr_caps,
        } => {
            let problem = match load(&file, start) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let config = Config {
                mode: if avatar { Mode::Avatar } else { mode },
                max_depth,
                timeout: timeout.map(Duration::from_secs_f64),
                max_solves,
                copy_order: !no_copy_order,
                subst_order: !no_subst_order,
                instance_sym: !no_instance_sym,
                epr_caps: matches!(epr_caps, Caps::Auto),
                ..Config::default()
            };
            let report = prove(&problem, &config);
            say!("% SZS status {} for {}", report.verdict.status(), name(&file));
            if stats {
                for (k, v) in report.stats.pairs() {
                    say!("% {k} {v}");
                }
                say!("% elapsed_ms {}", report.elapsed.as_millis());
            }
            match report.verdict {
                Verdict::Theorem(doc) => {
                    let text = doc.render(&problem);
                    match proof_out {
                        Some(path) => {
                            if let Err(e) = std::fs::write(&path, text) {
                                eprintln!("{}: {e}", path.display());
                                return ExitCode::from(INPUT_ERROR);
                            }
                        }
                        None => {
                            let _ = std::io::stdout().lock().write_all(text.as_bytes());
                        }
                    }
                    ExitCode::from(THEOREM)
                }
                Verdict::NonTheorem => ExitCode::from(NON_THEOREM),
                Verdict::Unknown(reason) => {
                    say!("% reason {reason}");
                    ExitCode::from(UNKNOWN)
                }
            }
        }
        Cmd::Check { proof, file, start } => {
            let problem = match load(&file, start) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let text = match std::fs::read_to_string(&proof) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("{}: {e}", proof.display());
                    return ExitCode::from(INPUT_ERROR);
                }
            };
            let doc = match ProofDocument::parse(&text, &problem) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("{}: {e}", proof.display());
                    return ExitCode::from(INPUT_ERROR);
                }
            };
            match check_proof(&doc, &problem) {
                Ok(()) => {
                    say!("accept");
                    ExitCode::from(THEOREM)
                }
                Err(r) => {
                    say!("reject: {r}");
                    ExitCode::from(NON_THEOREM)
                }
            }
        }
        Cmd::Oracle { file, d_max } => {
            let problem = match load(&file, StartPolicy::Ladder) {
                Ok(p) => p,
                Err(code) => return code,
            };
            match oracle_prove(&problem, d_max) {
                OracleVerdict::Theorem(t) => {
                    let used: Vec<&str> = t
                        .copies
                        .iter()
                        .map(|c| problem.clauses[c.clause].name.as_str())
                        .collect();
                    say!("theorem with {} copies: {}", t.copies.len(), used.join(" "));
                    ExitCode::from(THEOREM)
                }
                OracleVerdict::NoProofWithin(d) => {
                    say!("no proof within {d} copies");
                    ExitCode::from(UNKNOWN)
                }
            }
        }
        Cmd::Gen { seed, profile } => {
            let _ = std::io::stdout()
                .lock()
                .write_all(generate_text(seed, profile).as_bytes());
            ExitCode::SUCCESS
        }
    }
}
