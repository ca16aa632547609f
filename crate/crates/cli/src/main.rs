use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbiseifert::cli_report::{
    config_text, emit_group, emit_report, emit_scenario, group_section, log_lines, parse_scenario,
    pi1_section, run_pipeline, BaseSpec, Builtin, Format, PipelineError, PipelineOptions, Scenario,
    SpinTarget, DEFAULT_COSET_BOUND,
};
use orbiseifert::exactmath::{is_prime, Int};
use orbiseifert::fpgroup::{parse_relators, CosetStatus, Presentation};

macro_rules! outln {
    ($o:expr, $($t:tt)*) => {{
        let _ = writeln!($o, $($t)*);
    }};
}

/// Exact invariants of Seifert bundles over cyclic 4-orbifolds.
///
/// Exit codes: 0 all checks pass, 1 a check fails, 2 bad input,
/// 3 inconclusive (a search or enumeration bound was hit).
#[derive(Parser, Debug)]
#[command(name = "orbiseifert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the configuration and print it with its surgery log.
    Build(Common),
    /// Run the pipeline and print only the verdicts.
    Verify(Common),
    /// Run the pipeline and print the full report.
    Report(Common),
    /// Coset enumeration for a scenario's group or an explicit presentation.
    Enumerate(EnumerateArgs),
}

#[derive(Args, Debug)]
struct Input {
    /// Scenario file.
    scenario: Option<PathBuf>,
    /// Use a builtin base instead of a file.
    #[arg(long, value_enum, conflicts_with = "scenario")]
    builtin: Option<BuiltinName>,
    /// Prime for the paper_Z base.
    #[arg(long)]
    prime: Option<Int>,
}

#[derive(Args, Debug)]
struct Common {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum)]
    spin_target: Option<SpinArg>,
    /// Per-entry bound for the c1(B) search.
    #[arg(long)]
    search_bound: Option<i64>,
    /// Maximum number of cosets defined during enumeration.
    #[arg(long)]
    coset_bound: Option<usize>,
    /// Largest exponent i whose p^i-torsion relators enter the group.
    #[arg(long)]
    max_exponent: Option<u32>,
    #[arg(long, value_enum, default_value = "human")]
    format: FormatArg,
    /// Include the full coset table.
    #[arg(long)]
    dump_cosets: bool,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[command(flatten)]
    input: Input,
    /// Space-separated generator names; replaces the scenario group.
    #[arg(long, requires = "rels")]
    gens: Option<String>,
    /// Comma-separated relators, e.g. "x^2, y^3, (x y)^2".
    #[arg(long, requires = "gens")]
    rels: Option<String>,
    /// Comma-separated subgroup generators.
    #[arg(long, requires = "gens")]
    subgroup: Option<String>,
    #[arg(long)]
    coset_bound: Option<usize>,
    #[arg(long)]
    max_exponent: Option<u32>,
    #[arg(long, value_enum, default_value = "human")]
    format: FormatArg,
    #[arg(long)]
    dump_cosets: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BuiltinName {
    #[value(name = "block_Y")]
    BlockY,
    #[value(name = "block_W")]
    BlockW,
    #[value(name = "paper_Z")]
    PaperZ,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SpinArg {
    Spin,
    Nonspin,
    Any,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Human,
    Structured,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Human => Format::Human,
            FormatArg::Structured => Format::Structured,
        }
    }
}

impl From<SpinArg> for SpinTarget {
    fn from(s: SpinArg) -> Self {
        match s {
            SpinArg::Spin => SpinTarget::Spin,
            SpinArg::Nonspin => SpinTarget::NonSpin,
            SpinArg::Any => SpinTarget::Any,
        }
    }
}

struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        msg: msg.into(),
    }
}

fn load(input: &Input) -> Result<Scenario, Failure> {
    let mut s = match (&input.scenario, input.builtin) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            parse_scenario(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        (None, Some(BuiltinName::BlockY)) => Scenario::builtin(Builtin::BlockY),
        (None, Some(BuiltinName::BlockW)) => Scenario::builtin(Builtin::BlockW),
        (None, Some(BuiltinName::PaperZ)) => {
            let p = input
                .prime
                .clone()
                .ok_or_else(|| usage("--builtin paper_Z needs --prime"))?;
            Scenario::builtin(Builtin::PaperZ(p))
        }
        (None, None) => return Err(usage("give a scenario file or --builtin")),
    };
    if let Some(p) = &input.prime {
        if !is_prime(p) {
            return Err(usage(format!("{p} is not prime")));
        }
        match &mut s.base {
            BaseSpec::Builtin(Builtin::PaperZ(q)) => *q = p.clone(),
            _ => return Err(usage("--prime only applies to a paper_Z base")),
        }
    }
    Ok(s)
}

fn options(c: &Common) -> PipelineOptions {
    PipelineOptions {
        spin_target: c.spin_target.map(Into::into),
        search_bound: c.search_bound,
        coset_bound: c.coset_bound,
        max_exponent: c.max_exponent,
        dump_cosets: c.dump_cosets,
    }
}

fn pipeline_failure(e: PipelineError) -> Failure {
    usage(e.to_string())
}

fn build(c: &Common, out: &mut String) -> Result<u8, Failure> {
    let s = load(&c.input)?;
    let (cfg, log) = s.realize().map_err(|(step, e)| match step {
        Some(k) => usage(format!("script step {}: {e}", k + 1)),
        None => usage(e.to_string()),
    })?;
    let replay_ok = log.replay().map(|r| r == cfg).unwrap_or(false);
    match Format::from(c.format) {
        Format::Human => {
            outln!(out, "# {}", s.label());
            out.push_str(&config_text(&cfg));
            outln!(
                out,
                "# log ({} steps, replay {})",
                log.entries.len(),
                if replay_ok { "ok" } else { "MISMATCH" }
            );
            for l in log_lines(&log) {
                outln!(out, "# {}", l.op);
            }
        }
        Format::Structured => {
            // A scenario that rebuilds the final config directly.
            out.push_str(&emit_scenario(&Scenario::explicit(cfg)));
        }
    }
    Ok(if replay_ok { 0 } else { 1 })
}

fn verify(c: &Common, full: bool, out: &mut String) -> Result<u8, Failure> {
    let s = load(&c.input)?;
    let report = run_pipeline(&s, &options(c)).map_err(pipeline_failure)?;
    let format = Format::from(c.format);
    if full {
        out.push_str(&emit_report(&report, format));
    } else {
        for v in &report.verdicts {
            match format {
                Format::Human => {
                    outln!(out, "{:<18} {:<12} {}", v.name, v.status.as_str(), v.detail)
                }
                Format::Structured => outln!(out, "verdict.{} = {}", v.name, v.status.as_str()),
            }
        }
        if format == Format::Structured {
            outln!(out, "exit = {}", report.exit_code());
        }
    }
    Ok(report.exit_code())
}

fn enumerate(a: &EnumerateArgs, out: &mut String) -> Result<u8, Failure> {
    let bound = a.coset_bound.unwrap_or(DEFAULT_COSET_BOUND);
    let sec = match (&a.gens, &a.rels) {
        (Some(gens), Some(rels)) => {
            if a.input.scenario.is_some() || a.input.builtin.is_some() {
                return Err(usage("--gens cannot be combined with a scenario"));
            }
            let names: Vec<&str> = gens.split_whitespace().collect();
            let p = Presentation::parse(&names, rels).map_err(|e| usage(format!("--rels: {e}")))?;
            let sub = parse_relators(a.subgroup.as_deref().unwrap_or(""), &p.generators)
                .map_err(|e| usage(format!("--subgroup: {e}")))?;
            group_section("explicit", p, sub, bound, a.dump_cosets)
        }
        _ => {
            let s = load(&a.input)?;
            let opts = PipelineOptions {
                coset_bound: a.coset_bound,
                max_exponent: a.max_exponent,
                dump_cosets: a.dump_cosets,
                ..Default::default()
            };
            pi1_section(&s, &opts)
                .ok_or_else(|| usage("scenario has no [group] block"))?
                .map_err(usage)?
        }
    };
    out.push_str(&emit_group(&sec, a.format.into()));
    Ok(match sec.status {
        CosetStatus::Complete(_) if sec.replay_ok => 0,
        CosetStatus::Complete(_) => 1,
        CosetStatus::Exhausted(_) => 3,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = match &cli.command {
        Command::Build(c) => build(c, &mut out),
        Command::Verify(c) => verify(c, false, &mut out),
        Command::Report(c) => verify(c, true, &mut out),
        Command::Enumerate(a) => enumerate(a, &mut out),
    };
    // A closed pipe (e.g. `| head`) is not an error.
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
