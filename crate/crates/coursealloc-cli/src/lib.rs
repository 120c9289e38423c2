//! Command-line surface over the course-allocation library: parsing and
//! serialization of the instance file format, subcommand dispatch, and the
//! JSON report schema.
//!
//! Exit codes are part of the interface: `0` success (including "matching is
//! stable"), `10` matching unstable, `11` no stable matching exists, `2`
//! usage or data error, `3` a search or enumeration budget was exceeded.

pub mod format;
pub mod json;
pub mod sources;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use coursealloc::{
    matching_size, max_stable_brute, max_stable_search, reduce_exactmm, reduce_hrs,
    reduce_minmm_fc, reduce_smti_coalition, solve_master_list, solve_pair_size_da,
    verify_with_mode, witness_report, BlockingWitness, EnumerationReport, ExactMmMode, GenParams,
    HrsMode, Instance, LqMode, Matching, OracleError, SolveError, StabilityNotion, Verdict,
    VerifyError, VerifyMode,
};

use format::{parse_instance, serialize_instance, serialize_matching, ParsedFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSTABLE: i32 = 10;
pub const EXIT_NO_STABLE: i32 = 11;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser)]
#[command(
    name = "coursealloc",
    version,
    about = "Stable course allocation: verify, solve, enumerate, and generate instances",
    after_help = "Exit codes: 0 ok/stable, 10 unstable, 11 no stable matching, \
                  2 usage or data error, 3 budget exceeded."
)]
struct Cli {
    /// Emit the report as JSON (schema shipped with the binary).
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the [matching] section of FILE against a stability notion.
    Verify {
        #[arg(long, value_enum)]
        notion: NotionArg,
        /// Force the verifier backend (default: dp, or exhaustive when
        /// constraints are present).
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        file: PathBuf,
    },
    /// Compute a stable matching and print it as a [matching] section.
    Solve {
        #[arg(long, value_enum)]
        alg: AlgArg,
        file: PathBuf,
    },
    /// Search for a maximum-size stable matching.
    Max {
        #[arg(long, value_enum)]
        notion: NotionArg,
        /// Lower-quota handling: ignore them, require them with no closures,
        /// or allow closing under-quota courses.
        #[arg(long, value_enum, default_value = "none")]
        lq: LqArg,
        file: PathBuf,
    },
    /// Enumerate every matching and report stability counts per notion.
    Oracle { file: PathBuf },
    /// Generate a seeded random instance and print it.
    Gen {
        #[arg(long, default_value_t = 3)]
        students: usize,
        #[arg(long, default_value_t = 3)]
        courses: usize,
        /// Credit limits are drawn from 1..=max-limit.
        #[arg(long, default_value_t = 3)]
        max_limit: u32,
        /// Course credit values are drawn from 1..=max-credits.
        #[arg(long, default_value_t = 2)]
        max_credits: u32,
        /// Upper quotas are drawn from 1..=max-quota.
        #[arg(long, default_value_t = 2)]
        max_quota: u32,
        /// Draw lower quotas from 0..=max-lower (default: all zero).
        #[arg(long)]
        max_lower: Option<u32>,
        /// Probability that a student-course pair is mutually acceptable.
        #[arg(long, default_value_t = 0.8)]
        density: f64,
        /// Generate master lists on both sides.
        #[arg(long)]
        master_lists: bool,
        /// Attach random feasibility constraints.
        #[arg(long)]
        rules: bool,
        #[arg(long)]
        seed: u64,
    },
    /// Encode a source problem file as a course-allocation instance.
    Reduce {
        #[arg(long, value_enum)]
        from: FromArg,
        src: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NotionArg {
    Pair,
    PairSize,
    Coalition,
    FirstCoalition,
}

impl From<NotionArg> for StabilityNotion {
    fn from(n: NotionArg) -> StabilityNotion {
        match n {
            NotionArg::Pair => StabilityNotion::Pair,
            NotionArg::PairSize => StabilityNotion::PairSize,
            NotionArg::Coalition => StabilityNotion::Coalition,
            NotionArg::FirstCoalition => StabilityNotion::FirstCoalition,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Dp,
    Exhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgArg {
    PairSizeDa,
    SerialDictatorship,
}

#[derive(Clone, Copy, ValueEnum)]
enum LqArg {
    None,
    Nc,
    Cl,
}

impl LqArg {
    fn mode(self) -> LqMode {
        match self {
            LqArg::None => LqMode::None,
            LqArg::Nc => LqMode::NoClosures,
            LqArg::Cl => LqMode::Closures,
        }
    }

    fn name(self) -> &'static str {
        match self {
            LqArg::None => "none",
            LqArg::Nc => "nc",
            LqArg::Cl => "cl",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FromArg {
    SubsetSum,
    Hrs,
    HrsFc,
    Smti,
    MinMm,
    ExactMm,
    ExactMmLq,
}

impl FromArg {
    fn name(self) -> &'static str {
        match self {
            FromArg::SubsetSum => "subset-sum",
            FromArg::Hrs => "hrs",
            FromArg::HrsFc => "hrs-fc",
            FromArg::Smti => "smti",
            FromArg::MinMm => "min-mm",
            FromArg::ExactMm => "exact-mm",
            FromArg::ExactMmLq => "exact-mm-lq",
        }
    }
}

/// A command failure: what to print on stderr and which code to exit with.
struct Failure {
    code: i32,
    error: anyhow::Error,
}

type CmdResult<T> = Result<T, Failure>;

fn usage<T>(error: impl Into<anyhow::Error>) -> CmdResult<T> {
    Err(Failure {
        code: EXIT_USAGE,
        error: error.into(),
    })
}

fn verify_failure(e: VerifyError) -> Failure {
    let code = match e {
        VerifyError::CapExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_USAGE,
    };
    Failure {
        code,
        error: e.into(),
    }
}

fn solve_failure(e: SolveError) -> Failure {
    let code = match &e {
        SolveError::BudgetExceeded { .. } | SolveError::TooManyOpenSets { .. } => EXIT_BUDGET,
        SolveError::Verify(VerifyError::CapExceeded { .. }) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    };
    Failure {
        code,
        error: e.into(),
    }
}

fn oracle_failure(e: OracleError) -> Failure {
    let code = match e {
        OracleError::TooManyPairs { .. } | OracleError::WitnessSpaceTooLarge { .. } => EXIT_BUDGET,
        OracleError::InvalidMatching(_) => EXIT_USAGE,
    };
    Failure {
        code,
        error: e.into(),
    }
}

/// Parses arguments and runs one command, writing the report to `out` and
/// failures to `err`; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {:#}", f.error);
            f.code
        }
    }
}

fn load(path: &Path) -> CmdResult<ParsedFile> {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => return usage(anyhow!("cannot read {}: {e}", path.display())),
    };
    parse_instance(&text).or_else(usage)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CmdResult<i32> {
    match &cli.cmd {
        Cmd::Verify { notion, mode, file } => {
            let parsed = load(file)?;
            let Some(matching) = parsed.matching else {
                return usage(anyhow!(
                    "{} has no [matching] section to verify",
                    file.display()
                ));
            };
            cmd_verify(
                &parsed.instance,
                &matching,
                (*notion).into(),
                *mode,
                cli.json,
                out,
            )
        }
        Cmd::Solve { alg, file } => {
            let parsed = load(file)?;
            cmd_solve(&parsed.instance, *alg, cli.json, out)
        }
        Cmd::Max { notion, lq, file } => {
            let parsed = load(file)?;
            cmd_max(&parsed.instance, (*notion).into(), *lq, cli.json, out)
        }
        Cmd::Oracle { file } => {
            let parsed = load(file)?;
            let report =
                max_stable_brute(&parsed.instance, LqMode::None).map_err(oracle_failure)?;
            emit_oracle(&report, cli.json, out);
            Ok(EXIT_OK)
        }
        Cmd::Gen {
            students,
            courses,
            max_limit,
            max_credits,
            max_quota,
            max_lower,
            density,
            master_lists,
            rules,
            seed,
        } => {
            if *max_limit < 1 || *max_credits < 1 || *max_quota < 1 {
                return usage(anyhow!(
                    "max-limit, max-credits, and max-quota must be at least 1"
                ));
            }
            if !(0.0..=1.0).contains(density) {
                return usage(anyhow!("density must lie in [0, 1]"));
            }
            let params = GenParams {
                students: *students,
                courses: *courses,
                limit_range: 1..=*max_limit,
                credit_range: 1..=*max_credits,
                quota_range: 1..=*max_quota,
                lower_quota_range: max_lower.map(|k| 0..=k),
                list_density: *density,
                master_list: *master_lists,
                rules: *rules,
            };
            let inst = coursealloc::gen_random(&params, *seed);
            let text = serialize_instance(&inst, None);
            if cli.json {
                emit_json(&json::gen_report(*seed, &text), out);
            } else {
                let _ = write!(out, "{text}");
            }
            Ok(EXIT_OK)
        }
        Cmd::Reduce { from, src } => {
            let text = match fs::read_to_string(src) {
                Ok(text) => text,
                Err(e) => return usage(anyhow!("cannot read {}: {e}", src.display())),
            };
            let (inst, matching) = reduce_source(*from, &text)?;
            let rendered = serialize_instance(&inst, matching.as_ref());
            if cli.json {
                emit_json(&json::reduce_report(from.name(), &rendered), out);
            } else {
                let _ = write!(out, "{rendered}");
            }
            Ok(EXIT_OK)
        }
    }
}

/// Subset-sum is a decision gadget about one specific matching, so it comes
/// back with a [matching] section; the graph and preference gadgets are
/// existence questions and emit the instance alone.
fn reduce_source(from: FromArg, text: &str) -> CmdResult<(Instance, Option<Matching>)> {
    let built = match from {
        FromArg::SubsetSum => {
            let inp = sources::parse_subset_sum(text).or_else(usage)?;
            let (inst, m) = coursealloc::gadget_subset_sum(&inp);
            return Ok((inst, Some(m)));
        }
        FromArg::Hrs => reduce_hrs(&sources::parse_hrs(text).or_else(usage)?, HrsMode::Pair),
        FromArg::HrsFc => reduce_hrs(
            &sources::parse_hrs(text).or_else(usage)?,
            HrsMode::FirstCoalition,
        ),
        FromArg::Smti => reduce_smti_coalition(&sources::parse_smti(text).or_else(usage)?),
        FromArg::MinMm => reduce_minmm_fc(&sources::parse_graph(text).or_else(usage)?),
        FromArg::ExactMm => reduce_exactmm(
            &sources::parse_graph(text).or_else(usage)?,
            ExactMmMode::PairSize,
        ),
        FromArg::ExactMmLq => reduce_exactmm(
            &sources::parse_graph(text).or_else(usage)?,
            ExactMmMode::LqClosures,
        ),
    };
    built.map(|inst| (inst, None)).or_else(usage)
}

fn cmd_verify(
    inst: &Instance,
    m: &Matching,
    notion: StabilityNotion,
    mode: Option<ModeArg>,
    as_json: bool,
    out: &mut dyn Write,
) -> CmdResult<i32> {
    let mode = match mode {
        Some(ModeArg::Dp) => VerifyMode::Dp,
        Some(ModeArg::Exhaustive) => VerifyMode::Exhaustive,
        None if inst.rules.is_empty() => VerifyMode::Dp,
        None => VerifyMode::Exhaustive,
    };
    let mode_name = match mode {
        VerifyMode::Dp => "dp",
        VerifyMode::Exhaustive => "exhaustive",
    };
    match verify_with_mode(inst, m, notion, mode).map_err(verify_failure)? {
        Verdict::Stable => {
            if as_json {
                emit_json(&json::verify_report(inst, notion, mode_name, None), out);
            } else {
                let _ = writeln!(out, "stable ({notion}): no blocking witness");
            }
            Ok(EXIT_OK)
        }
        Verdict::Unstable(w) => {
            let conditions = witness_report(inst, m, &w).map_err(verify_failure)?;
            if as_json {
                emit_json(
                    &json::verify_report(inst, notion, mode_name, Some((&w, &conditions))),
                    out,
                );
            } else {
                let _ = writeln!(out, "unstable ({notion}): {}", witness_headline(inst, &w));
                for c in &conditions {
                    let _ = writeln!(
                        out,
                        "  {}. {} [{}]",
                        c.index,
                        c.description,
                        if c.holds { "holds" } else { "fails" }
                    );
                }
            }
            Ok(EXIT_UNSTABLE)
        }
    }
}

/// `s1 blocks with c1,c2 dropping c3` — the witness in one line.
fn witness_headline(inst: &Instance, w: &BlockingWitness) -> String {
    let labels = |cs: &[coursealloc::CourseId]| {
        cs.iter()
            .map(|&c| inst.courses[c.0].label.as_str())
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut line = format!(
        "{} blocks with {}",
        inst.students[w.student.0].label,
        labels(&w.coalition)
    );
    if !w.drop_set.is_empty() {
        let _ = write!(line, " dropping {}", labels(&w.drop_set));
    }
    line
}

fn cmd_solve(inst: &Instance, alg: AlgArg, as_json: bool, out: &mut dyn Write) -> CmdResult<i32> {
    let (name, matching) = match alg {
        AlgArg::PairSizeDa => ("pair-size-da", solve_pair_size_da(inst)),
        AlgArg::SerialDictatorship => {
            let m = solve_master_list(inst).map_err(|e| match e {
                SolveError::MissingMasterList | SolveError::InconsistentMasterList(_) => Failure {
                    code: EXIT_USAGE,
                    error: anyhow::Error::from(e).context("master list required"),
                },
                other => solve_failure(other),
            })?;
            ("serial-dictatorship", m)
        }
    };
    if as_json {
        emit_json(&json::solve_report(inst, name, &matching), out);
    } else {
        let _ = write!(out, "{}", serialize_matching(inst, &matching));
    }
    Ok(EXIT_OK)
}

fn cmd_max(
    inst: &Instance,
    notion: StabilityNotion,
    lq: LqArg,
    as_json: bool,
    out: &mut dyn Write,
) -> CmdResult<i32> {
    // Closures mode goes through the open-set search so the report can name
    // the lower-quota courses left open.
    let result: Option<(Matching, u64, Option<Vec<String>>)> = match lq {
        LqArg::Cl => coursealloc::lq_cl_max(inst, notion)
            .map_err(solve_failure)?
            .map(|(m, open, size)| {
                let labels = open
                    .iter()
                    .map(|&c| inst.courses[c.0].label.clone())
                    .collect();
                (m, size, Some(labels))
            }),
        _ => max_stable_search(inst, notion, lq.mode())
            .map_err(solve_failure)?
            .map(|(m, size)| (m, size, None)),
    };
    match result {
        None => {
            if as_json {
                emit_json(&json::max_report(inst, notion, lq.name(), None), out);
            } else {
                let _ = writeln!(out, "no stable matching ({notion})");
            }
            Ok(EXIT_NO_STABLE)
        }
        Some((m, size, open)) => {
            if as_json {
                emit_json(
                    &json::max_report(inst, notion, lq.name(), Some((&m, size, open))),
                    out,
                );
            } else {
                let _ = write!(out, "{}", serialize_matching(inst, &m));
                let _ = writeln!(out, "# size={size}");
                if let Some(open) = open {
                    let _ = writeln!(out, "# open={}", open.join(","));
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn emit_oracle(report: &EnumerationReport, as_json: bool, out: &mut dyn Write) {
    if as_json {
        emit_json(&json::oracle_report(report), out);
        return;
    }
    let _ = writeln!(out, "total matchings: {}", report.total_matchings);
    for notion in [
        StabilityNotion::Pair,
        StabilityNotion::FirstCoalition,
        StabilityNotion::Coalition,
        StabilityNotion::PairSize,
    ] {
        let size = match report.max_stable_size[&notion] {
            Some(s) => s.to_string(),
            None => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "{notion}: {} stable, max size {size}",
            report.stable_counts[&notion]
        );
    }
}

fn emit_json(value: &serde_json::Value, out: &mut dyn Write) {
    debug_assert!(
        json::validate_report(value).is_ok(),
        "emitted report violates the schema"
    );
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(value).expect("reports serialize")
    );
}

// Keep an explicit impl so `matching_size` is exercised through the JSON
// path even when no text command needs it directly.
const _: fn(&Instance, &Matching) -> coursealloc::MatchingSize = matching_size;
