//! `subrack`: subrack lattices of small groups from the command line.

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use subrack_core::cycle_forms::{p_nilpotent_from_lattice, CycleForms, PNilpotence, SYLOW_SIZE_READING};
use subrack_core::group::DEFAULT_MAX_ORDER;
use subrack_core::invariants::invariant_report;
use subrack_core::lattice::DEFAULT_CAP;
use subrack_core::nilpotence::{hypercenter_quotient, nilpotence_class_from_lattice};
use subrack_core::oracle::Nilpotence;
use subrack_core::verify::verify_catalog;
use subrack_core::{catalog, ElemSet, Error, FiniteGroup, LatticeMode, ModeChoice, SubrackLattice, CATALOG};

const EXIT_VERIFY: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_CAP: u8 = 4;

#[derive(Parser)]
#[command(name = "subrack", version, about = "Subrack lattices of finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// `catalog:<name>` or a path to a JSON group file.
    #[arg(long, global = true)]
    group: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[arg(long, global = true, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,

    /// Seed for sampled automorphism checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Extra notes and timings on stderr.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build the lattice and print or export it.
    Lattice,
    /// Class size frequency, center, A, N and M.
    Invariants,
    /// Nilpotence class with one line per quotient.
    Nilpotence,
    /// Whether the group has a normal p-complement.
    Pnilpotence {
        #[arg(long)]
        p: usize,
    },
    /// Cycle forms over the hypercenter quotient.
    Cycleforms {
        /// Label or index of one atom.
        #[arg(long)]
        atom: Option<String>,
        /// Print refined forms instead of pseudo forms.
        #[arg(long)]
        refined: bool,
    },
    /// Cross-check every catalog group against the oracle.
    Verify {
        #[arg(long, default_value_t = 24)]
        max_order: usize,
    },
    /// List the built-in groups.
    Catalog,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Auto,
    Explicit,
    Implicit,
}

impl From<Mode> for ModeChoice {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Auto => ModeChoice::Auto,
            Mode::Explicit => ModeChoice::Explicit,
            Mode::Implicit => ModeChoice::Implicit,
        }
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded(_)
            | Error::ImplicitOnly(_)
            | Error::IntervalTooLarge { .. }
            | Error::TooLarge { .. }
            | Error::OrderCapExceeded(_) => EXIT_CAP,
            Error::Internal(_) => EXIT_VERIFY,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// Printed output plus the exit code to finish with.
struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

type Run = Result<Output, Failure>;

fn load_group(source: Option<&str>) -> Result<FiniteGroup, Failure> {
    let source = source.ok_or_else(|| input_error("--group is required"))?;
    if let Some(name) = source.strip_prefix("catalog:") {
        return Ok(catalog(name)?);
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{source}: {e}")))?;
    Ok(FiniteGroup::from_json_str(&text, DEFAULT_MAX_ORDER)?)
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn no_dot(what: &str) -> Failure {
    input_error(format!("{what} has no dot output"))
}

fn labels_of(l: &SubrackLattice, family: &[ElemSet]) -> String {
    family.iter().map(|&s| l.set_label(s)).collect::<Vec<_>>().join(" ")
}

fn lattice_cmd(cli: &Cli, l: &SubrackLattice) -> Run {
    match cli.format {
        Format::Dot => Ok(Output::ok(l.to_dot()?)),
        Format::Json => Ok(Output::ok(pretty(&l.to_json()?))),
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "group {} of order {}", l.name(), l.size()).unwrap();
            match l.mode() {
                LatticeMode::Explicit => {
                    let elements = l.elements()?;
                    writeln!(out, "{} subracks", elements.len()).unwrap();
                    for (i, &s) in elements.iter().enumerate() {
                        writeln!(out, "{i} {}", l.set_label(s)).unwrap();
                    }
                    writeln!(out, "{} covers", l.hasse()?.len()).unwrap();
                }
                LatticeMode::Implicit => {
                    writeln!(out, "implicit lattice").unwrap();
                    writeln!(out, "coatoms {}", labels_of(l, l.coatoms())).unwrap();
                }
            }
            Ok(Output::ok(out))
        }
    }
}

fn invariants_cmd(cli: &Cli, l: &SubrackLattice) -> Run {
    let r = invariant_report(l)?;
    let code = if r.m_undecided.is_empty() { 0 } else { EXIT_CAP };
    let text = match cli.format {
        Format::Dot => return Err(no_dot("invariants")),
        Format::Json => pretty(&r),
        Format::Text => {
            let mut out = String::new();
            let w: Vec<String> = r.w.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            writeln!(out, "w {}", w.join(" ")).unwrap();
            writeln!(out, "center {}", l.set_label(r.center)).unwrap();
            writeln!(out, "abelian {}", r.abelian).unwrap();
            writeln!(out, "A {}", labels_of(l, &r.a)).unwrap();
            writeln!(out, "N {}", labels_of(l, &r.n)).unwrap();
            writeln!(out, "M {}", labels_of(l, &r.m)).unwrap();
            writeln!(out, "noncentral_abelian_normal {}", r.noncentral_abelian_normal).unwrap();
            if !r.m_undecided.is_empty() {
                writeln!(out, "M_undecided {}", labels_of(l, &r.m_undecided)).unwrap();
            }
            out
        }
    };
    Ok(Output { text, code })
}

fn verdict_text(v: Nilpotence) -> String {
    match v {
        Nilpotence::Class(c) => format!("class {c}"),
        Nilpotence::NotNilpotent => "not nilpotent".to_string(),
    }
}

fn nilpotence_cmd(cli: &Cli, l: &SubrackLattice, g: &FiniteGroup) -> Run {
    let trace = nilpotence_class_from_lattice(l, g, cli.seed)?;
    match cli.format {
        Format::Dot => Err(no_dot("nilpotence")),
        Format::Json => Ok(Output::ok(pretty(&trace))),
        Format::Text => {
            let mut out = String::new();
            for (i, s) in trace.steps.iter().enumerate() {
                let poset = s.poset_size.map_or("-".to_string(), |n| n.to_string());
                writeln!(
                    out,
                    "step {}: order {}, center {}, blocks {}, poset {}",
                    i + 1,
                    s.group_order,
                    s.center_size,
                    s.blocks,
                    poset
                )
                .unwrap();
            }
            writeln!(out, "{}", verdict_text(trace.verdict)).unwrap();
            Ok(Output::ok(out))
        }
    }
}

fn pnil_text(r: &PNilpotence) -> &'static str {
    match r.verdict {
        Some(true) => "true",
        Some(false) => "false",
        None => "condition not met",
    }
}

fn pnilpotence_cmd(cli: &Cli, l: &SubrackLattice, g: &FiniteGroup, p: usize) -> Run {
    let r = p_nilpotent_from_lattice(p, l, g, cli.seed)?;
    if cli.verbose {
        eprintln!("sylow descent: {SYLOW_SIZE_READING}");
        eprintln!("hypercenter quotient order {}", r.quotient_order);
    }
    match cli.format {
        Format::Dot => Err(no_dot("pnilpotence")),
        Format::Json => Ok(Output::ok(pretty(&r))),
        Format::Text => Ok(Output::ok(format!("{}\n", pnil_text(&r)))),
    }
}

fn resolve_atom(l: &SubrackLattice, atom: &str) -> Result<usize, Failure> {
    if let Some(i) = l.labels().iter().position(|s| s == atom) {
        return Ok(i);
    }
    match atom.parse::<usize>() {
        Ok(i) if i < l.size() => Ok(i),
        _ => Err(input_error(format!("no atom {atom:?} in the centerless quotient"))),
    }
}

fn cycleforms_cmd(cli: &Cli, l: &SubrackLattice, g: &FiniteGroup, atom: Option<&str>, refined: bool) -> Run {
    let (ql, _) = hypercenter_quotient(l, g, cli.seed)?;
    if ql.size() == 1 {
        return match cli.format {
            Format::Json => Ok(Output::ok(pretty(&Value::Array(vec![])))),
            _ => Ok(Output::ok("trivial quotient\n".to_string())),
        };
    }
    let forms = CycleForms::compute(&ql)?;
    let pick = |a: usize| if refined { forms.refined(a) } else { forms.pseudo(a) };
    let atoms: Vec<usize> = match atom {
        Some(s) => vec![resolve_atom(&ql, s)?],
        None => (0..ql.size()).collect(),
    };
    match cli.format {
        Format::Dot => Err(no_dot("cycleforms")),
        Format::Json => {
            let v: Vec<_> = atoms.iter().map(|&a| pick(a).to_json(a)).collect();
            if atom.is_some() {
                Ok(Output::ok(pretty(&v[0])))
            } else {
                Ok(Output::ok(pretty(&v)))
            }
        }
        Format::Text => {
            let mut out = String::new();
            for &a in &atoms {
                let line = pick(a).render(ql.labels());
                if atom.is_some() {
                    writeln!(out, "{line}").unwrap();
                } else {
                    writeln!(out, "{}: {line}", ql.labels()[a]).unwrap();
                }
            }
            Ok(Output::ok(out))
        }
    }
}

fn verify_cmd(cli: &Cli, max_order: usize) -> Run {
    let r = verify_catalog(max_order, cli.seed)?;
    if cli.verbose {
        for g in &r.groups {
            for c in &g.checks {
                eprintln!("{} {} {:.1} ms", g.group, c.name, c.millis);
            }
        }
    }
    let code = if !r.passed() {
        EXIT_VERIFY
    } else if r.skips() > 0 {
        EXIT_CAP
    } else {
        0
    };
    let text = match cli.format {
        Format::Dot => return Err(no_dot("verify")),
        Format::Json => pretty(&r),
        Format::Text => r.render_text(),
    };
    Ok(Output { text, code })
}

fn catalog_cmd(cli: &Cli) -> Run {
    let groups: Vec<FiniteGroup> = CATALOG.iter().map(|n| catalog(n)).collect::<Result<_, _>>()?;
    match cli.format {
        Format::Dot => Err(no_dot("catalog")),
        Format::Json => {
            let v: Vec<Value> = groups
                .iter()
                .map(|g| json!({"name": g.name(), "order": g.order(), "implicit_only": g.implicit_only()}))
                .collect();
            Ok(Output::ok(pretty(&v)))
        }
        Format::Text => {
            let mut out = String::new();
            for g in &groups {
                let note = if g.implicit_only() { " implicit-only" } else { "" };
                writeln!(out, "{} {}{note}", g.name(), g.order()).unwrap();
            }
            Ok(Output::ok(out))
        }
    }
}

fn run(cli: &Cli) -> Run {
    match &cli.command {
        Command::Catalog => return catalog_cmd(cli),
        Command::Verify { max_order } => return verify_cmd(cli, *max_order),
        _ => {}
    }
    let g = load_group(cli.group.as_deref())?;
    let t = Instant::now();
    let l = SubrackLattice::of_group(&g, cli.mode.into(), DEFAULT_CAP)?;
    if cli.verbose {
        let mode = match l.mode() {
            LatticeMode::Explicit => "explicit",
            LatticeMode::Implicit => "implicit",
        };
        eprintln!("{} lattice of {} built in {:.1} ms", mode, g.name(), t.elapsed().as_secs_f64() * 1e3);
    }
    match &cli.command {
        Command::Lattice => lattice_cmd(cli, &l),
        Command::Invariants => invariants_cmd(cli, &l),
        Command::Nilpotence => nilpotence_cmd(cli, &l, &g),
        Command::Pnilpotence { p } => pnilpotence_cmd(cli, &l, &g, *p),
        Command::Cycleforms { atom, refined } => cycleforms_cmd(cli, &l, &g, atom.as_deref(), *refined),
        Command::Verify { .. } | Command::Catalog => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
