//! The `ramforge` command line: one subcommand per library operation, JSON
//! documents in and out.
//!
//! Exit codes: 0 success, 2 invalid input, 3 insufficient precision. Errors
//! are written to stderr as `{"error", "reason"}`. Arguments that take a
//! document accept a file path, `-` for stdin, or inline JSON.

use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::gfseries::{SeriesError, SeriesJson, TruncSeries};
use crate::herbrand::{self, BreakData, HerbrandError, PLFunc};
use crate::interchange::{self, format_rational, parse_rational};
use crate::nottingham::{self, Depth, NottinghamError};
use crate::pdyn::{self, PadicSeries, PdynError};
use crate::ramcheck::{self, RamcheckError, TheoremInputs};
use crate::truncation::{self, MorphismJson, TruncError};

type Q = BigRational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

/// Default cap on total coefficient digits of any input series.
pub const DEFAULT_MAX_PRECISION: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub reason: &'static str,
    pub message: String,
}

impl CliError {
    fn input(reason: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            reason,
            message: message.into(),
        }
    }

    fn precision(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_PRECISION,
            reason: "precision",
            message: message.into(),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::PrecisionExhausted => CliError::precision(e.to_string()),
            _ => CliError::input("invalid_series", e.to_string()),
        }
    }
}

impl From<NottinghamError> for CliError {
    fn from(e: NottinghamError) -> Self {
        match e {
            NottinghamError::Series(s) => s.into(),
            NottinghamError::Precision { .. }
            | NottinghamError::TooShort { .. }
            | NottinghamError::ModulusTooLarge { .. } => CliError::precision(e.to_string()),
            NottinghamError::SenViolation { .. } => CliError::input("sen_violation", e.to_string()),
            NottinghamError::Inadmissible(_) | NottinghamError::NotIncreasing(_) => {
                CliError::input("inadmissible", e.to_string())
            }
            NottinghamError::NotInA | NottinghamError::NotNottingham => CliError::input("invalid_series", e.to_string()),
        }
    }
}

impl From<HerbrandError> for CliError {
    fn from(e: HerbrandError) -> Self {
        let reason = match e {
            HerbrandError::Inadmissible(_) => "inadmissible",
            HerbrandError::OutOfRange { .. } => "out_of_range",
            _ => "invalid_input",
        };
        CliError::input(reason, e.to_string())
    }
}

impl From<TruncError> for CliError {
    fn from(e: TruncError) -> Self {
        match e {
            TruncError::Series(s) => s.into(),
            _ => CliError::input("invalid_morphism", e.to_string()),
        }
    }
}

impl From<RamcheckError> for CliError {
    fn from(e: RamcheckError) -> Self {
        match e {
            RamcheckError::Herbrand(h) => h.into(),
            RamcheckError::NotApplicable(_) | RamcheckError::NoAdmissibleM => {
                CliError::input("not_applicable", e.to_string())
            }
            _ => CliError::input("invalid_input", e.to_string()),
        }
    }
}

impl From<PdynError> for CliError {
    fn from(e: PdynError) -> Self {
        match e {
            PdynError::Precision(_) => CliError::precision(e.to_string()),
            PdynError::Inexact(_) => CliError::input("inexact_division", e.to_string()),
            PdynError::Nottingham(n) => n.into(),
            PdynError::Series(s) => s.into(),
            _ => CliError::input("invalid_series", e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ramforge", version, about = "Ramification and p-adic dynamics toolkit")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Truncated power series over finite fields.
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Ramification breaks of Nottingham elements and of Z_p-actions.
    #[command(subcommand)]
    Breaks(BreaksCmd),
    /// Hasse-Herbrand functions.
    #[command(subcommand)]
    Herbrand(HerbrandCmd),
    /// Morphisms of truncated valuation rings.
    #[command(subcommand)]
    Trunc(TruncCmd),
    /// Congruence-length conditions for ramification data; defaults to `main`.
    Check(CheckArgs),
    /// Dynamics of p-adic power series; defaults to `analyze`.
    Dynamics(DynamicsArgs),
}

#[derive(Debug, Subcommand)]
pub enum SeriesCmd {
    /// outer(inner(X)).
    Compose {
        #[arg(long)]
        outer: String,
        #[arg(long)]
        inner: String,
    },
    /// k-fold composite, or the p^n-fold one with --p-power.
    Iterate {
        #[arg(long)]
        series: String,
        #[arg(long, conflicts_with = "p_power", required_unless_present = "p_power")]
        k: Option<u64>,
        #[arg(long)]
        p_power: Option<usize>,
    },
    /// Depth of a Nottingham element.
    Depth {
        #[arg(long)]
        series: String,
    },
    /// Compositional inverse.
    Inverse {
        #[arg(long)]
        series: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum BreaksCmd {
    /// Lower and upper breaks i_0..i_n of the group generated by a series.
    Lower {
        #[arg(long)]
        series: String,
        #[arg(long, default_value_t = 2)]
        levels: usize,
    },
    /// Upper breaks from lower breaks.
    Upper {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        lower: Vec<u64>,
    },
    /// Index d from upper breaks.
    Index {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        upper: Vec<u64>,
    },
    /// Admissibility of upper breaks over a base of ramification e.
    Validate(BreakArgs),
}

/// Break data either as a document (`--breaks`) or as flags.
#[derive(Debug, Args)]
pub struct BreakArgs {
    /// BreakData document.
    #[arg(long, conflicts_with_all = ["p", "e", "upper"])]
    pub breaks: Option<String>,
    #[arg(long, requires_all = ["e", "upper"])]
    pub p: Option<u64>,
    /// Rational, e.g. `1` or `3/2`.
    #[arg(long)]
    pub e: Option<String>,
    /// Comma-separated rationals.
    #[arg(long, value_delimiter = ',')]
    pub upper: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Psi,
    Phi,
}

#[derive(Debug, Subcommand)]
pub enum HerbrandCmd {
    Psi(BreakArgs),
    Phi(BreakArgs),
    /// Evaluate a PL function, given directly or as psi/phi of break data.
    Eval {
        #[arg(long)]
        func: Option<String>,
        #[arg(long, value_enum, default_value_t = Which::Psi)]
        kind: Which,
        #[command(flatten)]
        breaks: BreakArgs,
        /// Comma-separated rationals.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        x: Vec<String>,
    },
    /// outer ∘ inner.
    Compose {
        #[arg(long)]
        outer: String,
        #[arg(long)]
        inner: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum TruncCmd {
    /// g ∘ f.
    Compose {
        #[arg(long)]
        g: String,
        #[arg(long)]
        f: String,
    },
    /// Whether a morphism is an extension (and an isomorphism).
    Extension {
        #[arg(long)]
        morphism: String,
    },
    /// Whether f ≡ g mod R(c).
    Requiv {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        c: u64,
    },
}

/// Theorem inputs as a document (`--input`) or as break flags.
#[derive(Debug, Args)]
pub struct TheoremArgs {
    #[arg(long, conflicts_with_all = ["breaks", "p", "e", "upper"])]
    pub input: Option<String>,
    #[command(flatten)]
    pub bd: BreakArgs,
    /// Congruence length; defaults to e p^n.
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub m: Option<u32>,
    /// L is not known to lie in a Z_p-extension.
    #[arg(long)]
    pub not_in_zp: bool,
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct CheckArgs {
    #[command(subcommand)]
    pub op: Option<CheckCmd>,
    #[command(flatten)]
    pub main: TheoremArgs,
}

#[derive(Debug, Subcommand)]
pub enum CheckCmd {
    /// Conditions of the main congruence criterion.
    Main(TheoremArgs),
    /// The p-th root variant.
    Proot(TheoremArgs),
    /// Least admissible m.
    M0(TheoremArgs),
    /// Shift function: one value with --t, else the period-sum identity.
    Fshift {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        e: u64,
        #[arg(long)]
        m: u32,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<i64>,
    },
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct DynamicsArgs {
    #[command(subcommand)]
    pub op: Option<DynamicsCmd>,
    #[command(flatten)]
    pub analyze: AnalyzeArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// PadicSeries document for u.
    #[arg(long)]
    pub series: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub levels: u32,
}

#[derive(Debug, Subcommand)]
pub enum DynamicsCmd {
    /// Full report: depths, index, q_n degrees and polygons, r_n.
    Analyze(AnalyzeArgs),
    /// Newton polygon of the polynomial part up to --degree.
    Newton {
        #[arg(long)]
        series: String,
        #[arg(long)]
        degree: usize,
    },
    /// q_n = (u^(p^n) - X)/(u^(p^(n-1)) - X), with X cancelled.
    Qn {
        #[arg(long)]
        series: String,
        #[arg(long)]
        n: u32,
    },
}

struct Ctx {
    max_precision: u64,
}

impl Ctx {
    fn load<T: DeserializeOwned>(&self, arg: &str) -> Result<T, CliError> {
        let trimmed = arg.trim_start();
        let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
            arg.to_string()
        } else if arg == "-" {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::input("io", format!("reading stdin: {e}")))?;
            buf
        } else {
            std::fs::read_to_string(arg).map_err(|e| CliError::input("io", format!("reading {arg}: {e}")))?
        };
        serde_json::from_str(&text).map_err(|e| CliError::input("parse", e.to_string()))
    }

    fn cap(&self, digits: u64, what: &str) -> Result<(), CliError> {
        if digits > self.max_precision {
            return Err(CliError::input(
                "precision_cap",
                format!(
                    "{what} carries {digits} coefficient digits, above RAMFORGE_MAX_PRECISION = {}",
                    self.max_precision
                ),
            ));
        }
        Ok(())
    }

    fn series(&self, arg: &str) -> Result<TruncSeries, CliError> {
        let j: SeriesJson = self.load(arg)?;
        self.cap(j.trunc as u64 * j.w as u64, "series")?;
        Ok(j.to_series()?)
    }

    fn padic(&self, arg: &str) -> Result<PadicSeries, CliError> {
        let u: PadicSeries = self.load(arg)?;
        self.cap(u.trunc() as u64 * u.prec() as u64, "series")?;
        Ok(u)
    }

    fn break_data(&self, b: &BreakArgs) -> Result<BreakData, CliError> {
        if let Some(doc) = &b.breaks {
            return self.load(doc);
        }
        let (Some(p), Some(e), Some(upper)) = (b.p, &b.e, &b.upper) else {
            return Err(CliError::input("usage", "give --breaks, or --p, --e and --upper"));
        };
        let upper = upper.iter().map(|s| rational(s)).collect::<Result<_, _>>()?;
        Ok(BreakData::new(p, rational(e)?, upper)?)
    }

    fn theorem(&self, t: &TheoremArgs) -> Result<TheoremInputs, CliError> {
        let mut ti = match &t.input {
            Some(doc) => self.load(doc)?,
            None => TheoremInputs::new(self.break_data(&t.bd)?, !t.not_in_zp),
        };
        if let Some(a) = &t.a {
            ti.a = Some(
                a.trim()
                    .parse::<BigInt>()
                    .map_err(|e| CliError::input("parse", format!("bad --a {a:?}: {e}")))?,
            );
        }
        if t.m.is_some() {
            ti.m = t.m;
        }
        if t.input.is_some() && t.not_in_zp {
            ti.contained_in_zp = false;
        }
        Ok(ti)
    }
}

fn rational(s: &str) -> Result<Q, CliError> {
    parse_rational(s).map_err(|e| CliError::input("parse", e))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("documents serialize")
}

fn u64_list(v: &[u64]) -> Value {
    to_value(&U64s(v.to_vec()))
}

#[derive(Serialize)]
struct U64s(#[serde(with = "interchange::u64_vec")] Vec<u64>);

fn i128_value(v: i128) -> Value {
    if v.unsigned_abs() < interchange::SAFE_INT_LIMIT as u128 {
        json!(v as i64)
    } else {
        json!(v.to_string())
    }
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> Result<Value, CliError> {
    match cmd {
        Command::Series(c) => series_cmd(c, ctx),
        Command::Breaks(c) => breaks_cmd(c, ctx),
        Command::Herbrand(c) => herbrand_cmd(c, ctx),
        Command::Trunc(c) => trunc_cmd(c, ctx),
        Command::Check(c) => match &c.op {
            Some(op) => check_cmd(op, ctx),
            None => Ok(to_value(&ramcheck::check_conditions(&ctx.theorem(&c.main)?)?)),
        },
        Command::Dynamics(d) => match &d.op {
            Some(op) => dynamics_cmd(op, ctx),
            None => analyze_cmd(&d.analyze, ctx),
        },
    }
}

fn series_cmd(c: &SeriesCmd, ctx: &Ctx) -> Result<Value, CliError> {
    let out = |s: &TruncSeries| to_value(&SeriesJson::from_series(s));
    match c {
        SeriesCmd::Compose { outer, inner } => {
            let (f, g) = (ctx.series(outer)?, ctx.series(inner)?);
            Ok(out(&f.compose(&g)?))
        }
        SeriesCmd::Iterate { series, k, p_power } => {
            let g = ctx.series(series)?;
            let it = match (k, p_power) {
                (Some(k), _) => nottingham::iterate(&g, *k)?,
                (None, Some(n)) => nottingham::p_iterate(&g, *n)?,
                (None, None) => return Err(CliError::input("usage", "give --k or --p-power")),
            };
            Ok(out(&it))
        }
        SeriesCmd::Depth { series } => match nottingham::depth(&ctx.series(series)?)? {
            Depth::Finite(d) => Ok(json!({ "depth": d })),
            Depth::AtLeast(b) => Err(CliError::precision(format!(
                "depth is at least {b}; all known terms of (g - X)/X vanish"
            ))),
        },
        SeriesCmd::Inverse { series } => Ok(out(&ctx.series(series)?.comp_inverse()?)),
    }
}

fn breaks_cmd(c: &BreaksCmd, ctx: &Ctx) -> Result<Value, CliError> {
    match c {
        BreaksCmd::Lower { series, levels } => {
            Ok(to_value(&nottingham::ram_sequence(&ctx.series(series)?, *levels)?))
        }
        BreaksCmd::Upper { p, lower } => Ok(json!({ "upper": u64_list(&nottingham::upper_from_lower(*p, lower)?) })),
        BreaksCmd::Index { p, upper } => Ok(to_value(&nottingham::index_of(*p, upper)?)),
        BreaksCmd::Validate(b) => Ok(to_value(&herbrand::validate_breaks(&ctx.break_data(b)?))),
    }
}

fn herbrand_cmd(c: &HerbrandCmd, ctx: &Ctx) -> Result<Value, CliError> {
    match c {
        HerbrandCmd::Psi(b) => Ok(to_value(&herbrand::psi_from_breaks(&ctx.break_data(b)?))),
        HerbrandCmd::Phi(b) => Ok(to_value(&herbrand::phi_from_breaks(&ctx.break_data(b)?))),
        HerbrandCmd::Eval { func, kind, breaks, x } => {
            let f: PLFunc = match func {
                Some(doc) => ctx.load(doc)?,
                None => {
                    let bd = ctx.break_data(breaks)?;
                    match kind {
                        Which::Psi => herbrand::psi_from_breaks(&bd),
                        Which::Phi => herbrand::phi_from_breaks(&bd),
                    }
                }
            };
            let points = x
                .iter()
                .map(|s| {
                    let xv = rational(s)?;
                    Ok(json!({ "x": format_rational(&xv), "value": format_rational(&f.eval(&xv)) }))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(json!({ "points": points }))
        }
        HerbrandCmd::Compose { outer, inner } => {
            let (f, g): (PLFunc, PLFunc) = (ctx.load(outer)?, ctx.load(inner)?);
            Ok(to_value(&herbrand::pl_compose(&f, &g)))
        }
    }
}

fn morphism(ctx: &Ctx, arg: &str) -> Result<truncation::TruncMorphism, CliError> {
    let j: MorphismJson = ctx.load(arg)?;
    ctx.cap(j.eta_coeff.trunc as u64 * j.eta_coeff.w as u64, "morphism")?;
    Ok(j.to_morphism()?)
}

fn trunc_cmd(c: &TruncCmd, ctx: &Ctx) -> Result<Value, CliError> {
    match c {
        TruncCmd::Compose { g, f } => {
            let h = truncation::compose_morphism(&morphism(ctx, g)?, &morphism(ctx, f)?)?;
            Ok(to_value(&MorphismJson::from_morphism(&h)))
        }
        TruncCmd::Extension { morphism: m } => {
            let f = morphism(ctx, m)?;
            Ok(json!({
                "extension": truncation::is_extension(&f),
                "isomorphism": truncation::is_isomorphism(&f),
            }))
        }
        TruncCmd::Requiv { f, g, c } => {
            let eq = truncation::r_equivalent(&morphism(ctx, f)?, &morphism(ctx, g)?, *c)?;
            Ok(json!({ "c": c, "equivalent": eq }))
        }
    }
}

fn check_cmd(c: &CheckCmd, ctx: &Ctx) -> Result<Value, CliError> {
    match c {
        CheckCmd::Main(t) => Ok(to_value(&ramcheck::check_conditions(&ctx.theorem(t)?)?)),
        CheckCmd::Proot(t) => Ok(to_value(&ramcheck::proot_check(&ctx.theorem(t)?)?)),
        CheckCmd::M0(t) => Ok(json!({ "m0": ramcheck::m0(&ctx.theorem(t)?)? })),
        CheckCmd::Fshift { p, e, m, t } => {
            let tp = ramcheck::tame_params(*p, *e)?;
            match t {
                Some(t) => Ok(json!({ "t": t, "f": i128_value(ramcheck::f_shift(&tp, *m, *t as i128)?) })),
                None => {
                    let (sum, expected) = ramcheck::f_shift_period_sum(&tp, *m)?;
                    Ok(json!({
                        "params": to_value(&tp),
                        "m": m,
                        "sum": i128_value(sum),
                        "expected": i128_value(expected),
                        "holds": sum == expected,
                    }))
                }
            }
        }
    }
}

fn analyze_cmd(a: &AnalyzeArgs, ctx: &Ctx) -> Result<Value, CliError> {
    let Some(series) = &a.series else {
        return Err(CliError::input("usage", "dynamics needs --series (or a subcommand)"));
    };
    Ok(to_value(&pdyn::analyze(&ctx.padic(series)?, a.levels)?))
}

fn dynamics_cmd(c: &DynamicsCmd, ctx: &Ctx) -> Result<Value, CliError> {
    match c {
        DynamicsCmd::Analyze(a) => analyze_cmd(a, ctx),
        DynamicsCmd::Newton { series, degree } => Ok(to_value(&pdyn::newton_polygon(&ctx.padic(series)?, *degree)?)),
        DynamicsCmd::Qn { series, n } => Ok(to_value(&pdyn::qn_divide(&ctx.padic(series)?, *n)?)),
    }
}

fn render(v: &Value, format: Format) -> String {
    match (format, v) {
        (Format::Table, Value::Object(map)) => {
            let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
            map.iter()
                .map(|(k, v)| format!("{k:width$}  {v}\n"))
                .collect()
        }
        _ => format!("{v}\n"),
    }
}

/// Runs the command line with an explicit precision cap and output sinks.
pub fn run_with<I, T>(args: I, max_precision: u64, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            if matches!(e.kind(), ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = write!(err, "{e}");
                return EXIT_INPUT;
            }
            let doc = json!({ "error": e.to_string().trim_end(), "reason": "usage" });
            let _ = writeln!(err, "{doc}");
            return EXIT_INPUT;
        }
    };
    let ctx = Ctx { max_precision };
    match dispatch(&cli.command, &ctx) {
        Ok(v) => {
            let _ = out.write_all(render(&v, cli.format).as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "{}", json!({ "error": e.message, "reason": e.reason }));
            e.code
        }
    }
}

/// Cap from `RAMFORGE_MAX_PRECISION`, falling back to the default.
pub fn max_precision_from_env() -> u64 {
    std::env::var("RAMFORGE_MAX_PRECISION")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_PRECISION)
}

/// Runs against the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, max_precision_from_env(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["ramforge"];
        argv.extend_from_slice(args);
        let code = run_with(argv, DEFAULT_MAX_PRECISION, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn upper_breaks() {
        let (code, out, _) = call(&["breaks", "upper", "--p", "5", "--lower", "4,24,124"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), r#"{"upper":[4,8,12]}"#);
    }

    #[test]
    fn m0_from_flags() {
        let (code, out, _) = call(&["check", "m0", "--p", "5", "--e", "1", "--upper", "1,2,3"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), r#"{"m0":2}"#);
    }

    #[test]
    fn depth_from_inline_series() {
        let s = r#"{"p":5,"w":1,"trunc":7,"coeffs":[0,1,0,0,0,1,1]}"#;
        let (code, out, _) = call(&["series", "depth", "--series", s]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), r#"{"depth":4}"#);
    }

    #[test]
    fn sen_violation_is_input_error() {
        let (code, _, err) = call(&["breaks", "upper", "--p", "5", "--lower", "4,23"]);
        assert_eq!(code, 2);
        let v: Value = serde_json::from_str(&err).unwrap();
        assert_eq!(v["reason"], "sen_violation");
    }

    #[test]
    fn identity_depth_is_precision_error() {
        let s = r#"{"p":5,"w":1,"trunc":7,"coeffs":[0,1]}"#;
        let (code, _, err) = call(&["series", "depth", "--series", s]);
        assert_eq!(code, 3);
        assert!(err.contains("\"reason\":\"precision\""));
    }

    #[test]
    fn precision_cap() {
        let s = r#"{"p":5,"w":1,"trunc":70,"coeffs":[0,1,1]}"#;
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(["ramforge", "series", "depth", "--series", s], 50, &mut out, &mut err);
        assert_eq!(code, 2);
        assert!(String::from_utf8(err).unwrap().contains("precision_cap"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["nonsense"]).0, 2);
        assert_eq!(call(&["breaks", "upper", "--p", "5"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn fshift_sum() {
        let (code, out, _) = call(&["check", "fshift", "--p", "5", "--e", "2", "--m", "2"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["holds"], true);
    }

    #[test]
    fn table_format() {
        let (code, out, _) = call(&["breaks", "upper", "--p", "5", "--lower", "4,24", "--format", "table"]);
        assert_eq!(code, 0);
        assert_eq!(out, "upper  [4,8]\n");
    }
}
