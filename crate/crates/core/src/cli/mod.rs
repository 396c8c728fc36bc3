//! The `kisin` command line.
//!
//! Exit codes: 0 ok, 1 usage or parse error, 2 invariant or shape violation, 3 not generic.
//! Machine-readable JSON goes to stdout (or `--out`), a short human summary to stderr.

pub mod doc;
pub mod fuzz;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::algebra::EpsilonModel;
use crate::error::{Error, Result};
use crate::lift::{ordinary_lift, LiftConfig};
use crate::phigamma::{check_consistency, check_iplus, tau_shape_check, Consistency};
use crate::rootsys::{enumerate_closed_sets, w_c_combinatorial, w_c_conjugation, ClosedSet, MAX_ENUM_DIM};
use crate::shape::{analyze, analyze_raw, closed_set_from_weights, find_sigma};
use doc::{InputDocument, ShapeReportDoc};
use fuzz::{run_fuzz, FuzzParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_NOT_GENERIC: i32 = 3;

/// `weyl` refuses dimensions above this.
pub const MAX_WEYL_DIM: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "kisin", version, about = "Shapes, tau-vanishing and ordinary lifts of upper-triangular Kisin modules")]
struct Cli {
    /// Write the JSON result here (a directory for `fuzz`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Series precision N for tau computations.
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// Coefficients of g in epsilon = 1 + x^p g, e.g. "1" or "1,1".
    #[arg(long, global = true, default_value = "1")]
    epsilon_model: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shape report of a module document.
    Analyze { path: PathBuf },
    /// Closed set C, W_C and sigma for a weight tuple.
    Sigma {
        #[arg(required = true)]
        weights: Vec<u32>,
    },
    /// Compare both descriptions of W_C over every closed set.
    Weyl { d: usize },
    /// Ordinary lift certificate of a module document.
    Lift { path: PathBuf },
    /// Check the tau data of a document against its module.
    CheckTau { path: PathBuf },
    /// Random corpus through the whole pipeline.
    Fuzz {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        f: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    out_path: Option<PathBuf>,
}

impl Ctx<'_> {
    fn emit<T: Serialize>(&mut self, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Invariant(e.to_string()))?;
        text.push('\n');
        match &self.out_path {
            Some(path) => std::fs::write(path, text).map_err(|e| Error::Input(format!("{}: {e}", path.display()))),
            None => self.out.write_all(text.as_bytes()).map_err(|e| Error::Input(e.to_string())),
        }
    }

    fn note(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.err, "{}", line.as_ref());
    }
}

/// Run the command line on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut ctx = Ctx { out, err, out_path: cli.out.clone() };
    match dispatch(&cli, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            ctx.note(format!("error: {e}"));
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, ctx: &mut Ctx) -> Result<i32> {
    let eps = EpsilonModel::parse(&cli.epsilon_model)?;
    match &cli.command {
        Command::Analyze { path } => cmd_analyze(ctx, path),
        Command::Sigma { weights } => cmd_sigma(ctx, weights),
        Command::Weyl { d } => cmd_weyl(ctx, *d),
        Command::Lift { path } => cmd_lift(ctx, path, cli.precision, eps),
        Command::CheckTau { path } => cmd_check_tau(ctx, path, cli.precision, eps),
        Command::Fuzz { p, f, d, count } => {
            cmd_fuzz(ctx, FuzzParams { p: *p, f: *f, d: *d, count: *count, seed: cli.seed })
        }
    }
}

fn read_doc(path: &Path) -> Result<InputDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    InputDocument::parse(&text).map_err(|e| match e {
        Error::Input(msg) => Error::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn fmt_roots(c: &ClosedSet) -> String {
    let inner: Vec<String> = c.roots().iter().map(|r| format!("({},{})", r.i + 1, r.j + 1)).collect();
    format!("{{{}}}", inner.join(","))
}

fn cmd_analyze(ctx: &mut Ctx, path: &Path) -> Result<i32> {
    let doc = read_doc(path)?;
    let field = doc.field()?;
    let (a, r) = doc.raw_matrix(&field)?;
    let report = match crate::kisin::UTKisinModule::new(field.clone(), a.clone(), r) {
        Ok(m) => analyze(&m),
        Err(Error::NotUpperTriangular(..) | Error::BadDiagonal(_) | Error::HeightFailed(_)) => analyze_raw(&field, &a, r),
        Err(e) => return Err(e),
    };
    ctx.emit(&ShapeReportDoc::new(&field, &report))?;
    ctx.note(format!("weights  {:?}", report.weights));
    if let Some(c) = &report.closed_set {
        ctx.note(format!("C        {}", fmt_roots(c)));
    }
    if let Some(s) = &report.sigma {
        ctx.note(format!("sigma    {s}"));
    }
    for d in &report.diagnostics {
        let at = d.position.map(|(i, j)| format!(" at ({}, {})", i + 1, j + 1)).unwrap_or_default();
        ctx.note(format!("{}{at}: {}", d.code, d.message));
    }
    Ok(if report.is_clean() {
        ctx.note("shape    OK");
        EXIT_OK
    } else {
        ctx.note(format!("shape    {} violation(s)", report.diagnostics.len()));
        EXIT_VIOLATION
    })
}

fn cmd_sigma(ctx: &mut Ctx, weights: &[u32]) -> Result<i32> {
    let c = closed_set_from_weights(weights)?;
    let sigma = find_sigma(weights)?;
    let w_c = (weights.len() <= MAX_ENUM_DIM).then(|| w_c_combinatorial(&c));
    ctx.emit(&json!({ "weights": weights, "closed_set": c, "w_c": w_c, "sigma": sigma }))?;
    ctx.note(format!("C     = {}", fmt_roots(&c)));
    if let Some(w) = &w_c {
        ctx.note(format!("|W_C| = {}", w.len()));
    }
    ctx.note(format!("sigma = {sigma}"));
    Ok(EXIT_OK)
}

fn cmd_weyl(ctx: &mut Ctx, d: usize) -> Result<i32> {
    if d == 0 || d > MAX_WEYL_DIM {
        return Err(Error::Input(format!("weyl needs 1 <= d <= {MAX_WEYL_DIM}, got {d}")));
    }
    let sets = enumerate_closed_sets(d)?;
    let mut agree = 0;
    for c in &sets {
        if w_c_conjugation(c)? == w_c_combinatorial(c) {
            agree += 1;
        }
    }
    let pass = agree == sets.len();
    let status = if pass { "PASS" } else { "FAIL" };
    ctx.emit(&json!({ "d": d, "closed_sets": sets.len(), "agree": agree, "status": status }))?;
    ctx.note(format!("d = {d}: {} closed sets, {agree} agree, {status}", sets.len()));
    Ok(if pass { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_lift(ctx: &mut Ctx, path: &Path, precision: Option<usize>, eps: EpsilonModel) -> Result<i32> {
    let doc = read_doc(path)?;
    let field = doc.field()?;
    let m = doc.kisin_module(&field)?;
    let tau = doc.tau_matrix(&field, precision, eps)?;
    match ordinary_lift(&m, tau.as_ref().map(|(r, t)| (r, t)), &LiftConfig::default()) {
        Ok(cert) => {
            ctx.emit(&cert)?;
            ctx.note(format!("sigma        {}", cert.sigma));
            ctx.note(format!("ht_multiset  {:?}", cert.ht_multiset));
            ctx.note("generic, ordinary");
            Ok(EXIT_OK)
        }
        Err(Error::NotGeneric(i, j)) => {
            ctx.emit(&json!({ "generic": false, "witness": [i, j] }))?;
            ctx.note(format!("not generic: chi_{i} / chi_{j} is the mod-p cyclotomic character"));
            Ok(EXIT_NOT_GENERIC)
        }
        Err(Error::ShapeViolations(n)) => {
            let report = analyze(&m);
            ctx.emit(&ShapeReportDoc::new(&field, &report))?;
            ctx.note(format!("{n} shape violation(s); no certificate"));
            Ok(EXIT_VIOLATION)
        }
        Err(Error::Invariant(msg)) => {
            ctx.note(format!("INVARIANT FAILURE: {msg}"));
            Ok(EXIT_VIOLATION)
        }
        Err(e) => Err(e),
    }
}

fn cmd_check_tau(ctx: &mut Ctx, path: &Path, precision: Option<usize>, eps: EpsilonModel) -> Result<i32> {
    let doc = read_doc(path)?;
    let field = doc.field()?;
    let m = doc.kisin_module(&field)?;
    let Some((ring, tau)) = doc.tau_matrix(&field, precision, eps)? else {
        return Err(Error::Input("document has no \"tau\"".into()));
    };
    let iplus = check_iplus(&ring, &tau)?;
    let consistency = check_consistency(&ring, m.a_phi(), &tau)?;
    let shape = if iplus && consistency.is_verified() { Some(tau_shape_check(&ring, &m, &tau)?) } else { None };
    let violations: Option<Vec<[usize; 2]>> =
        shape.as_ref().map(|s| s.violations.iter().map(|&(i, j)| [i + 1, j + 1]).collect());
    let ok = iplus && consistency.is_verified() && shape.as_ref().is_some_and(|s| s.holds());
    let consistency_doc = match consistency {
        Consistency::VerifiedUpToPrecision { up_to } => json!({ "status": "verified_up_to_precision", "up_to": up_to }),
        Consistency::Violated { row, col, exponent } => {
            json!({ "status": "violated", "position": [row + 1, col + 1], "exponent": exponent })
        }
    };
    ctx.emit(&json!({
        "precision": ring.n(),
        "iplus": iplus,
        "consistency": consistency_doc,
        "in_b_c": shape.as_ref().map(|s| s.holds()),
        "violations": violations,
    }))?;
    ctx.note(format!("N            {}", ring.n()));
    ctx.note(format!("I+           {iplus}"));
    ctx.note(format!("consistency  {consistency:?}"));
    if let Some(s) = &shape {
        if !s.holds() {
            ctx.note(format!("INVARIANT FAILURE: A_tau outside B_C at {:?}", s.violations));
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_fuzz(ctx: &mut Ctx, params: FuzzParams) -> Result<i32> {
    let (summary, items) = run_fuzz(&params)?;
    if let Some(dir) = ctx.out_path.take() {
        let io = |e: std::io::Error| Error::Input(format!("{}: {e}", dir.display()));
        let corpus = dir.join("corpus");
        std::fs::create_dir_all(&corpus).map_err(io)?;
        let failed: std::collections::BTreeSet<usize> = summary.failures.iter().map(|f| f.index).collect();
        if !failed.is_empty() {
            std::fs::create_dir_all(dir.join("failures")).map_err(io)?;
        }
        for item in &items {
            let text = serde_json::to_string_pretty(&item.document).map_err(|e| Error::Invariant(e.to_string()))? + "\n";
            let name = format!("item-{:06}.json", item.index);
            std::fs::write(corpus.join(&name), &text).map_err(io)?;
            if failed.contains(&item.index) {
                std::fs::write(dir.join("failures").join(&name), &text).map_err(io)?;
            }
        }
        let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Invariant(e.to_string()))? + "\n";
        std::fs::write(dir.join("summary.json"), &text).map_err(io)?;
    }
    ctx.emit(&summary)?;
    for (name, t) in &summary.invariants {
        ctx.note(format!("{name:<18} pass {:>6}  fail {:>6}  skipped {:>6}", t.pass, t.fail, t.skipped));
    }
    ctx.note(format!("non-generic        {}", summary.non_generic));
    Ok(if summary.failed() { EXIT_VIOLATION } else { EXIT_OK })
}
