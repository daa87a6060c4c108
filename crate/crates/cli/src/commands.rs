use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use simplext_core::completeness::{crosscheck, is_complete_upto, is_injective_upto, Catalog, CheckError, Limits};
use simplext_core::models::DEFAULT_SEARCH_CAP;
use simplext_core::term::{eval_term, Assignment};
use simplext_core::variety::{default_generator_names, VarietyError, DEFAULT_FREE_CAP};
use simplext_core::{free_algebra, parse_term, FiniteAlgebra, Variety};

use crate::format::{load_algebra, load_variety, variables, write_algebra};
use crate::report::{self, Header};
use crate::selftest;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "simplext", version, about = "Completeness and injectivity checks for finite algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a term in an algebra
    Eval(EvalArgs),
    /// Is the algebra closed under simple extensions within the variety?
    CheckComplete(CheckArgs),
    /// Is the algebra injective among members up to the size bound?
    CheckInjective(CheckArgs),
    /// Run both checks and convert witnesses between them
    Crosscheck(CheckArgs),
    /// Size (and optionally tables) of a free algebra of the variety
    Free(FreeArgs),
    /// Seeded randomized audits of the Boolean and group instances
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub algebra: PathBuf,
    #[arg(long)]
    pub term: String,
    /// NAME=ELEMENT, repeatable
    #[arg(long = "bind", value_name = "NAME=ELEM")]
    pub binds: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub algebra: PathBuf,
    #[arg(long)]
    pub variety: PathBuf,
    /// Largest member size to quantify over
    #[arg(long, default_value_t = 4)]
    pub max_size: usize,
    /// Height bound of the condition window
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// Also write the report to this file
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Node cap for the model search
    #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
    pub model_cap: u64,
    /// Element cap for free algebras
    #[arg(long, default_value_t = DEFAULT_FREE_CAP)]
    pub free_cap: usize,
}

#[derive(Debug, Args)]
pub struct FreeArgs {
    #[arg(long)]
    pub variety: PathBuf,
    #[arg(long)]
    pub gens: usize,
    /// Print the tables in algebra-file form
    #[arg(long)]
    pub tables: bool,
    #[arg(long, default_value_t = DEFAULT_FREE_CAP)]
    pub free_cap: usize,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = selftest::DEFAULT_SEED)]
    pub seed: u64,
    /// Random cases per audit
    #[arg(long, default_value_t = 200)]
    pub cases: usize,
}

/// Runs the command line `args` (program name first), writing normal output
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval(a) => eval(&a),
        Command::CheckComplete(a) => check(Kind::Complete, &a),
        Command::CheckInjective(a) => check(Kind::Injective, &a),
        Command::Crosscheck(a) => check(Kind::Cross, &a),
        Command::Free(a) => free(&a),
        Command::Selftest(a) => Ok(selftest_cmd(&a)),
    };
    match result {
        Ok(Outcome { code, text, report }) => {
            let _ = out.write_all(text.as_bytes());
            if let Some((path, body)) = report {
                if let Err(e) = std::fs::write(&path, body) {
                    let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                    return EXIT_INPUT;
                }
            }
            code
        }
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

struct Outcome {
    code: i32,
    text: String,
    report: Option<(PathBuf, String)>,
}

type CmdResult = Result<Outcome, (i32, String)>;

fn input<E: std::fmt::Display>(e: E) -> (i32, String) {
    (EXIT_INPUT, e.to_string())
}

fn eval(a: &EvalArgs) -> CmdResult {
    let alg = load_algebra(&a.algebra).map_err(input)?;
    let mut asg = Assignment::new();
    for b in &a.binds {
        let (name, label) = b
            .split_once('=')
            .ok_or_else(|| input(format!("binding `{b}` is not NAME=ELEM")))?;
        let e = alg
            .element(label)
            .ok_or_else(|| input(format!("`{label}` is not an element of {}", a.algebra.display())))?;
        asg.insert(name.to_string(), e);
    }
    // unbound names still parse, so shape errors are reported before
    // missing bindings
    let names = variables(&a.term, alg.signature());
    let t = parse_term(&a.term, alg.signature(), &names)
        .map_err(|e| input(format!("term, column {}: {}", e.offset + 1, e.kind)))?;
    let v = eval_term(&t, &alg, &asg).map_err(input)?;
    Ok(Outcome {
        code: EXIT_PASS,
        text: format!("{}\n", alg.label(v)),
        report: None,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Complete,
    Injective,
    Cross,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Complete => "check-complete",
            Kind::Injective => "check-injective",
            Kind::Cross => "crosscheck",
        }
    }
}

fn quote(s: &str) -> String {
    shlex::try_quote(s).map_or_else(|_| s.to_string(), |q| q.into_owned())
}

fn replay_line(kind: Kind, a: &CheckArgs) -> String {
    let mut s = format!(
        "simplext {} --algebra {} --variety {} --max-size {}",
        kind.name(),
        quote(&a.algebra.to_string_lossy()),
        quote(&a.variety.to_string_lossy()),
        a.max_size
    );
    if kind != Kind::Injective {
        let _ = write!(s, " --depth {}", a.depth);
    }
    if a.model_cap != DEFAULT_SEARCH_CAP {
        let _ = write!(s, " --model-cap {}", a.model_cap);
    }
    if a.free_cap != DEFAULT_FREE_CAP {
        let _ = write!(s, " --free-cap {}", a.free_cap);
    }
    s
}

fn identity_text(v: &Variety, index: usize) -> String {
    let (l, r) = &v.identities()[index];
    format!("{l} = {r}")
}

fn check(kind: Kind, a: &CheckArgs) -> CmdResult {
    let b = load_algebra(&a.algebra).map_err(input)?;
    let v = load_variety(&a.variety).map_err(input)?;
    if b.signature() != v.signature() {
        return Err(input("the algebra and the variety have different signatures"));
    }
    if let Err((index, _)) = v.check_member(&b) {
        return Err(input(format!(
            "{} is not in the variety: identity `{}` fails",
            a.algebra.display(),
            identity_text(&v, index)
        )));
    }
    let limits = Limits {
        model_nodes: a.model_cap,
        free_size: a.free_cap,
    };
    let header = Header {
        command: kind.name(),
        algebra_path: a.algebra.to_string_lossy().into_owned(),
        algebra_size: b.size(),
        variety_name: v.name().to_string(),
        variety_path: a.variety.to_string_lossy().into_owned(),
        max_size: a.max_size,
        depth: (kind != Kind::Injective).then_some(a.depth),
    };
    let replay = replay_line(kind, a);
    let finish = |code: i32, text: String| Outcome {
        code,
        report: a.report.clone().map(|p| (p, text.clone())),
        text,
    };
    let (catalog, err) = Catalog::build_partial(&v, a.max_size, limits);
    if let Some(e) = err {
        return if e.is_cap() {
            Ok(finish(EXIT_CAP, report::capped(&header, &e.to_string(), &catalog, &replay)))
        } else {
            Err(input(e))
        };
    }
    let capped = |e: CheckError| -> CmdResult {
        if e.is_cap() {
            Ok(finish(EXIT_CAP, report::capped(&header, &e.to_string(), &catalog, &replay)))
        } else {
            Err(input(e))
        }
    };
    match kind {
        Kind::Complete => match is_complete_upto(&b, &v, &catalog, a.depth, limits) {
            Ok(verdict) => {
                let code = if verdict.passed() { EXIT_PASS } else { EXIT_FAIL };
                Ok(finish(code, report::completeness(&header, &verdict, &b, &catalog, &replay)))
            }
            Err(e) => capped(e),
        },
        Kind::Injective => match is_injective_upto(&b, &v, &catalog) {
            Ok(verdict) => {
                let code = if verdict.passed() { EXIT_PASS } else { EXIT_FAIL };
                Ok(finish(code, report::injectivity(&header, &verdict, &b, &catalog, &replay)))
            }
            Err(e) => capped(e),
        },
        Kind::Cross => match crosscheck(&b, &v, &catalog, a.depth, limits) {
            Ok(x) => {
                let code = if x.complete.passed() && x.injective.passed() { EXIT_PASS } else { EXIT_FAIL };
                Ok(finish(code, report::crosscheck(&header, &x, &b, &catalog, &replay)))
            }
            Err(e) => capped(e),
        },
    }
}

fn free(a: &FreeArgs) -> CmdResult {
    let v = load_variety(&a.variety).map_err(input)?;
    let names = default_generator_names(a.gens);
    let f = match free_algebra(&v, &names, a.free_cap) {
        Ok(f) => f,
        Err(e @ VarietyError::CapExceeded { .. }) => return Err((EXIT_CAP, e.to_string())),
        Err(e) => return Err(input(e)),
    };
    let mut text = format!("{}\n", f.size());
    if a.tables {
        let labels: Vec<String> = (0..f.size()).map(|i| format!("e{i}")).collect();
        let alg: FiniteAlgebra = f.algebra().with_labels(labels).expect("fresh labels");
        for e in 0..f.size() {
            let _ = writeln!(text, "# e{e} = {}", f.representative(e));
        }
        text.push_str(&write_algebra(&alg));
    }
    Ok(Outcome {
        code: EXIT_PASS,
        text,
        report: None,
    })
}

fn selftest_cmd(a: &SelftestArgs) -> Outcome {
    let results = selftest::run_all(a.seed, a.cases);
    let mut text = format!("seed: {}\n", a.seed);
    let mut ok = true;
    for (name, r) in results {
        match r {
            Ok(n) => {
                let _ = writeln!(text, "{name}: ok ({n} cases)");
            }
            Err(msg) => {
                ok = false;
                let _ = writeln!(text, "{name}: FAILED {msg}");
            }
        }
    }
    Outcome {
        code: if ok { EXIT_PASS } else { EXIT_FAIL },
        text,
        report: None,
    }
}
