//! Command-line front end: tables in JSON, CSV or LaTeX, verification runs,
//! and golden-file regression checks.
//!
//! Output depends only on the parsed arguments. The command line recorded in
//! a document is rebuilt from them with every default spelled out, and
//! `--threads` is left out so that thread count never shows in the bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{Coeff, Lambda, LambdaPoly, LambdaSpec, Rational, Scalar};
use crate::bernoulli::{
    b_explicit_row, b_higher_order, b_via_multinomial, b_via_recurrence, b_via_series,
    classical_b_by_limit, classical_b_by_stirling, ExplicitForm, MULTINOMIAL_MAX_N,
};
use crate::coeff_a::{a_limit_at_zero, CoeffTable};
use crate::combinatorics::{
    degenerate_stirling2, scaled_degenerate_stirling_table, stirling1_signed, Stirling2Route,
    StirlingTable,
};
use crate::error::{Error, Result};
use crate::verify::{verify_all, IdentityReport, Suite, VerifyConfig, VerifyOutcome};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "degbern",
    version,
    about = "Exact tables and identity checks for degenerate Bernoulli numbers of the second kind"
)]
pub struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Degenerate Bernoulli numbers of the second kind, any order.
    B(BArgs),
    /// Coefficients of the differential equations satisfied by 1/log_λ(1+t).
    A(AArgs),
    /// Stirling-number triangles.
    Stirling(StirlingArgs),
    /// Classical Bernoulli numbers of the second kind.
    Classical(ClassicalArgs),
    /// Run identity checks; exits nonzero if any check fails.
    Verify(VerifyArgs),
    /// Compare built-in cases against stored output files.
    Golden(GoldenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Latex,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Latex => "latex",
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Latex => "tex",
        }
    }
}

fn parse_lambda(s: &str) -> std::result::Result<LambdaSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BRoute {
    Series,
    Recurrence,
    Multinomial,
    Explicit,
    All,
}

#[derive(Args, Debug)]
pub struct BArgs {
    #[arg(long = "max-n")]
    pub max_n: usize,
    #[arg(long, default_value = "sym", value_parser = parse_lambda, allow_hyphen_values = true)]
    pub lambda: LambdaSpec,
    /// Order r of b^(r); orders above 1 use the series route.
    #[arg(long = "order-r", default_value_t = 1)]
    pub order_r: usize,
    #[arg(long, value_enum, default_value_t = BRoute::Series)]
    pub route: BRoute,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ARoute {
    Recurrence,
    Unrolled,
    Falling,
    Stirling,
    All,
}

#[derive(Args, Debug)]
pub struct AArgs {
    #[arg(long = "max-N")]
    pub max_big_n: usize,
    #[arg(long, default_value = "sym", value_parser = parse_lambda, allow_hyphen_values = true)]
    pub lambda: LambdaSpec,
    #[arg(long, value_enum, default_value_t = ARoute::Recurrence)]
    pub route: ARoute,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StirlingChoice {
    /// Signed Stirling numbers of the first kind.
    First,
    /// Degenerate Stirling numbers of the second kind.
    Deg2,
    /// λ^{n-k} S_{2,1/λ}(n,k).
    ScaledDeg2,
}

#[derive(Args, Debug)]
pub struct StirlingArgs {
    #[arg(long, value_enum)]
    pub kind: StirlingChoice,
    #[arg(long = "max-n")]
    pub max_n: usize,
    /// Ignored for the first kind.
    #[arg(long, default_value = "sym", value_parser = parse_lambda, allow_hyphen_values = true)]
    pub lambda: LambdaSpec,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ClassicalArgs {
    #[arg(long = "max-n")]
    pub max_n: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteChoice {
    Ode,
    Cor34,
    Eq41,
    Eq42,
    Thm41,
    Cor42,
    All,
}

impl SuiteChoice {
    fn suite(self) -> Suite {
        match self {
            SuiteChoice::Ode => Suite::Ode,
            SuiteChoice::Cor34 => Suite::Convolution,
            SuiteChoice::Eq41 => Suite::ClassicalDerivative,
            SuiteChoice::Eq42 => Suite::ClassicalScaledDerivative,
            SuiteChoice::Thm41 => Suite::HigherOrderExpansion,
            SuiteChoice::Cor42 => Suite::SingularPart,
            SuiteChoice::All => Suite::All,
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteChoice::All)]
    pub suite: SuiteChoice,
    #[arg(long = "max-N", default_value_t = 8)]
    pub max_big_n: usize,
    /// Largest n for the cross-route comparisons (default: max-N).
    #[arg(long = "max-n")]
    pub max_n: Option<usize>,
    #[arg(long = "max-j", default_value_t = 8)]
    pub max_j: usize,
    /// Series truncation order (default: 2·max(max-N, max-n) + 8).
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, default_value = "sym", value_parser = parse_lambda, allow_hyphen_values = true)]
    pub lambda: LambdaSpec,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct GoldenArgs {
    #[arg(long)]
    pub dir: PathBuf,
    /// Rewrite the stored files instead of comparing.
    #[arg(long)]
    pub bless: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
}

/// One table cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Index(i64),
    Flag(bool),
    Value(Scalar),
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Table(Table),
    Reports(VerifyOutcome),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDocument {
    pub schema_version: u32,
    pub meta: Meta,
    pub payload: Payload,
}

impl OutputDocument {
    fn new(
        command: String,
        lambda: Option<String>,
        order: Option<usize>,
        payload: Payload,
    ) -> Self {
        OutputDocument {
            schema_version: SCHEMA_VERSION,
            meta: Meta {
                version: env!("CARGO_PKG_VERSION").to_string(),
                command,
                lambda,
                order,
            },
            payload,
        }
    }

    /// False if any report in the payload failed.
    pub fn all_passed(&self) -> bool {
        match &self.payload {
            Payload::Table(_) => true,
            Payload::Reports(out) => out.all_passed(),
        }
    }
}

/// Rendered output and the process exit code it calls for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
}

fn value<C: Coeff>(c: &C) -> Cell {
    Cell::Value(c.to_scalar())
}

fn check_b_lambda(lambda: &LambdaSpec) -> Result<()> {
    if lambda.is_zero() {
        return Err(Error::Parse(
            "lambda = 0 has no degenerate numbers; use the classical command".into(),
        ));
    }
    Ok(())
}

fn b_table<C: Coeff>(lambda: &Lambda<C>, args: &BArgs) -> Result<Table> {
    let n_max = args.max_n;
    let index = |n: usize| Cell::Index(n as i64);
    if args.order_r != 1 {
        if args.route != BRoute::Series {
            return Err(Error::OutOfRange(
                "orders above 1 are only available through the series route".into(),
            ));
        }
        let row = b_higher_order(lambda, args.order_r, n_max)?;
        return Ok(Table {
            title: format!("b^({})_n", args.order_r),
            columns: vec!["n".into(), format!("b^({})", args.order_r)],
            rows: row
                .values
                .iter()
                .enumerate()
                .map(|(n, v)| vec![index(n), value(v)])
                .collect(),
        });
    }
    let single = |values: Vec<C>| Table {
        title: "b_n".into(),
        columns: vec!["n".into(), "b".into()],
        rows: values
            .iter()
            .enumerate()
            .map(|(n, v)| vec![index(n), value(v)])
            .collect(),
    };
    match args.route {
        BRoute::Series => Ok(single(b_via_series(lambda, n_max)?.values)),
        BRoute::Recurrence => Ok(single(b_via_recurrence(lambda, n_max)?.values)),
        BRoute::Multinomial => {
            if n_max > MULTINOMIAL_MAX_N {
                return Err(Error::OutOfRange(format!(
                    "multinomial route is capped at n = {MULTINOMIAL_MAX_N}"
                )));
            }
            let values = (0..=n_max)
                .into_par_iter()
                .map(|n| b_via_multinomial(lambda, n))
                .collect::<Result<_>>()?;
            Ok(single(values))
        }
        BRoute::Explicit => Ok(single(
            b_explicit_row(lambda, n_max, ExplicitForm::AForm)?.values,
        )),
        BRoute::All => {
            let series = b_via_series(lambda, n_max)?.values;
            let recurrence = b_via_recurrence(lambda, n_max)?.values;
            let multinomial: Vec<Option<C>> = (0..=n_max)
                .into_par_iter()
                .map(|n| {
                    if n > MULTINOMIAL_MAX_N {
                        Ok(None)
                    } else {
                        b_via_multinomial(lambda, n).map(Some)
                    }
                })
                .collect::<Result<_>>()?;
            let forms: Vec<Vec<C>> = ExplicitForm::ALL
                .par_iter()
                .map(|&f| b_explicit_row(lambda, n_max, f).map(|r| r.values))
                .collect::<Result<_>>()?;
            let rows = (0..=n_max)
                .map(|n| {
                    let s = &series[n];
                    let mut agree = recurrence[n] == *s;
                    let mut row = vec![index(n), value(s), value(&recurrence[n])];
                    match &multinomial[n] {
                        Some(m) => {
                            agree &= m == s;
                            row.push(value(m));
                        }
                        None => row.push(Cell::Empty),
                    }
                    for f in &forms {
                        agree &= f[n] == *s;
                        row.push(value(&f[n]));
                    }
                    row.push(Cell::Flag(agree));
                    row
                })
                .collect();
            Ok(Table {
                title: "b_n by route".into(),
                columns: [
                    "n",
                    "series",
                    "recurrence",
                    "multinomial",
                    "explicit_a",
                    "explicit_stirling",
                    "explicit_falling",
                    "agree",
                ]
                .map(String::from)
                .to_vec(),
                rows,
            })
        }
    }
}

fn triangle_columns(first: &str, prefix: &str, max: usize) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain((0..=max).map(|k| format!("{prefix}{k}")))
        .collect()
}

fn triangle_rows<C: Coeff>(rows: &[Vec<C>], max: usize) -> Vec<Vec<Cell>> {
    rows.iter()
        .enumerate()
        .map(|(n, row)| {
            let mut cells = vec![Cell::Index(n as i64)];
            cells.extend((0..=max).map(|k| row.get(k).map_or(Cell::Empty, value)));
            cells
        })
        .collect()
}

fn a_table<C: Coeff>(lambda: &Lambda<C>, args: &AArgs) -> Result<Table> {
    let n_max = args.max_big_n;
    if n_max == 0 {
        return Err(Error::OutOfRange("max-N must be at least 1".into()));
    }
    let falling = || {
        if lambda.is_zero() {
            Err(Error::Parse(
                "the falling-factorial form divides by lambda; pick another route at lambda = 0"
                    .into(),
            ))
        } else {
            CoeffTable::by_falling_form(lambda, n_max)
        }
    };
    let table = match args.route {
        ARoute::Recurrence | ARoute::All => CoeffTable::by_recurrence(lambda, n_max),
        ARoute::Unrolled => CoeffTable::by_unrolled_recurrence(lambda, n_max),
        ARoute::Falling => falling()?,
        ARoute::Stirling => CoeffTable::by_stirling_form(lambda, n_max),
    };
    let mut columns = triangle_columns("N", "a_", n_max);
    let mut rows = triangle_rows(table.rows(), n_max);
    if args.route == ARoute::All {
        let mut others = vec![
            CoeffTable::by_unrolled_recurrence(lambda, n_max),
            CoeffTable::by_stirling_form(lambda, n_max),
        ];
        if lambda.is_zero() {
            let limit: Vec<Vec<C>> = (0..=n_max)
                .map(|big_n| {
                    (0..=big_n)
                        .map(|i| a_limit_at_zero(i, big_n).map(C::from_rational))
                        .collect::<Result<_>>()
                })
                .collect::<Result<_>>()?;
            // Row 0 is the convention [1]; the limit formula agrees there.
            others.push(CoeffTable::from_rows(limit)?);
        } else {
            others.push(falling()?);
        }
        columns.push("agree".into());
        for (big_n, row) in rows.iter_mut().enumerate() {
            let agree = others.iter().all(|o| o.row(big_n) == table.row(big_n));
            row.push(Cell::Flag(agree));
        }
    }
    Ok(Table {
        title: "a_i(N)".into(),
        columns,
        rows,
    })
}

fn stirling_table<C: Coeff>(table: &StirlingTable<C>, title: &str) -> Table {
    Table {
        title: title.into(),
        columns: triangle_columns("n", "k=", table.n_max()),
        rows: triangle_rows(table.rows(), table.n_max()),
    }
}

fn classical_table(n_max: usize) -> Table {
    let limit = classical_b_by_limit(n_max);
    let formula = classical_b_by_stirling(n_max);
    Table {
        title: "classical b_n".into(),
        columns: ["n", "limit", "stirling", "agree"]
            .map(String::from)
            .to_vec(),
        rows: limit
            .iter()
            .zip(&formula)
            .enumerate()
            .map(|(n, (a, b))| {
                vec![
                    Cell::Index(n as i64),
                    value(a),
                    value(b),
                    Cell::Flag(a == b),
                ]
            })
            .collect(),
    }
}

/// Runs `f` in the coefficient domain selected by `lambda`.
macro_rules! in_domain {
    ($lambda:expr, |$l:ident| $body:expr) => {
        match $lambda {
            LambdaSpec::Symbolic => {
                let $l = &Lambda::<LambdaPoly>::symbolic();
                $body
            }
            LambdaSpec::Value(v) => {
                let $l = &Lambda::<Rational>::at(v.clone());
                $body
            }
        }
    };
}

fn table_outcome(doc: OutputDocument, format: Format) -> Result<Outcome> {
    Ok(Outcome {
        text: render(&doc, format)?,
        exit_code: 0,
    })
}

/// Builds the document for a subcommand other than `golden`.
pub fn document(command: &Command) -> Result<(OutputDocument, Format)> {
    match command {
        Command::B(args) => {
            check_b_lambda(&args.lambda)?;
            let table = in_domain!(&args.lambda, |l| b_table(l, args))?;
            let cmd = format!(
                "b --max-n {} --lambda {} --order-r {} --route {} --format {}",
                args.max_n,
                args.lambda.descriptor(),
                args.order_r,
                value_name(args.route),
                args.format.name()
            );
            let doc = OutputDocument::new(
                cmd,
                Some(args.lambda.descriptor()),
                Some(args.max_n + 1),
                Payload::Table(table),
            );
            Ok((doc, args.format))
        }
        Command::A(args) => {
            let table = in_domain!(&args.lambda, |l| a_table(l, args))?;
            let cmd = format!(
                "a --max-N {} --lambda {} --route {} --format {}",
                args.max_big_n,
                args.lambda.descriptor(),
                value_name(args.route),
                args.format.name()
            );
            let doc = OutputDocument::new(
                cmd,
                Some(args.lambda.descriptor()),
                None,
                Payload::Table(table),
            );
            Ok((doc, args.format))
        }
        Command::Stirling(args) => {
            let (table, lambda) = match args.kind {
                StirlingChoice::First => (
                    stirling_table(&stirling1_signed::<Rational>(args.max_n), "s(n,k)"),
                    None,
                ),
                StirlingChoice::Deg2 => (
                    in_domain!(&args.lambda, |l| stirling_table(
                        &degenerate_stirling2(l, args.max_n, Stirling2Route::GeneratingFunction),
                        "S_2,lambda(n,k)"
                    )),
                    Some(args.lambda.descriptor()),
                ),
                StirlingChoice::ScaledDeg2 => (
                    in_domain!(&args.lambda, |l| stirling_table(
                        &scaled_degenerate_stirling_table(l, args.max_n),
                        "lambda^(n-k) S_2,1/lambda(n,k)"
                    )),
                    Some(args.lambda.descriptor()),
                ),
            };
            let mut cmd = format!(
                "stirling --kind {} --max-n {}",
                value_name(args.kind),
                args.max_n
            );
            if let Some(l) = &lambda {
                let _ = write!(cmd, " --lambda {l}");
            }
            let _ = write!(cmd, " --format {}", args.format.name());
            Ok((
                OutputDocument::new(cmd, lambda, None, Payload::Table(table)),
                args.format,
            ))
        }
        Command::Classical(args) => {
            let cmd = format!(
                "classical --max-n {} --format {}",
                args.max_n,
                args.format.name()
            );
            let doc = OutputDocument::new(
                cmd,
                Some("0".into()),
                None,
                Payload::Table(classical_table(args.max_n)),
            );
            Ok((doc, args.format))
        }
        Command::Verify(args) => {
            let cfg = VerifyConfig::sized(
                args.suite.suite(),
                args.lambda.clone(),
                args.max_big_n,
                args.max_n.unwrap_or(args.max_big_n),
                args.max_j,
                args.order,
            );
            let outcome = verify_all(&cfg)?;
            let cmd = format!(
                "verify --suite {} --max-N {} --max-n {} --max-j {} --order {} --lambda {} --format {}",
                value_name(args.suite),
                cfg.max_big_n,
                cfg.max_n,
                cfg.max_j,
                cfg.order,
                cfg.lambda.descriptor(),
                args.format.name()
            );
            let doc = OutputDocument::new(
                cmd,
                Some(cfg.lambda.descriptor()),
                Some(cfg.order),
                Payload::Reports(outcome),
            );
            Ok((doc, args.format))
        }
        Command::Golden(_) => Err(Error::Parse("golden does not produce a document".into())),
    }
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

/// Executes a parsed command line on a pool of the requested size.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    pool.install(|| run_command(&cli.command))
}

fn run_command(command: &Command) -> Result<Outcome> {
    match command {
        Command::Golden(args) => golden(&args.dir, args.bless),
        other => {
            let (doc, format) = document(other)?;
            let mut out = table_outcome(doc.clone(), format)?;
            if !doc.all_passed() {
                out.exit_code = 1;
            }
            Ok(out)
        }
    }
}

/// Parses and runs an argument vector (program name first).
pub fn run_args<I, T>(args: I) -> Result<Outcome>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Parse(e.to_string()))?;
    run(&cli)
}

/// Renders a document in the requested format. Output always ends in a newline.
pub fn render(doc: &OutputDocument, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc)
                .map_err(|e| Error::Internal(format!("json: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => match &doc.payload {
            Payload::Table(t) => table_csv(t),
            Payload::Reports(out) => reports_csv(out),
        },
        Format::Latex => match &doc.payload {
            Payload::Table(t) => Ok(table_latex(t)),
            Payload::Reports(out) => Ok(reports_latex(out)),
        },
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Index(i) => i.to_string(),
        Cell::Flag(b) => b.to_string(),
        Cell::Value(v) => v.to_plain_string(),
        Cell::Empty => String::new(),
    }
}

fn csv_string(records: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::NonNumeric)
        .from_writer(Vec::new());
    for r in records {
        w.write_record(&r)
            .map_err(|e| Error::Internal(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(format!("csv: {e}")))
}

fn table_csv(t: &Table) -> Result<String> {
    let mut records = vec![t.columns.clone()];
    records.extend(t.rows.iter().map(|r| r.iter().map(cell_text).collect()));
    csv_string(records)
}

const REPORT_COLUMNS: [&str; 14] = [
    "identity", "N", "n", "j", "order", "lambda", "route", "verdict", "from", "to", "index", "lhs",
    "rhs", "finding",
];

fn report_fields(r: &IdentityReport, finding: bool) -> Vec<String> {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let identity = serde_json::to_value(r.identity)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    let verdict = if r.passed() { "pass" } else { "fail" };
    vec![
        identity,
        opt(r.params.big_n.map(|v| v.to_string())),
        opt(r.params.n.map(|v| v.to_string())),
        opt(r.params.j.map(|v| v.to_string())),
        opt(r.params.order.map(|v| v.to_string())),
        r.params.lambda.clone(),
        opt(r.route.clone()),
        verdict.to_string(),
        opt(r.compared.map(|c| c.from.to_string())),
        opt(r.compared.map(|c| c.to.to_string())),
        opt(r.witness.as_ref().map(|w| w.index.to_string())),
        opt(r.witness.as_ref().map(|w| w.lhs.to_plain_string())),
        opt(r.witness.as_ref().map(|w| w.rhs.to_plain_string())),
        finding.to_string(),
    ]
}

fn reports_csv(out: &VerifyOutcome) -> Result<String> {
    let mut records = vec![REPORT_COLUMNS.map(String::from).to_vec()];
    records.extend(out.reports.iter().map(|r| report_fields(r, false)));
    records.extend(out.findings.iter().map(|r| report_fields(r, true)));
    csv_string(records)
}

fn latex_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '_' | '&' | '%' | '#' | '$' | '{' | '}' => {
                out.push('\\');
                out.push(ch);
            }
            'λ' => out.push_str("$\\lambda$"),
            '^' => out.push_str("\\^{}"),
            _ => out.push(ch),
        }
    }
    out
}

fn latex_cell(c: &Cell) -> String {
    match c {
        Cell::Index(i) => i.to_string(),
        Cell::Flag(true) => "yes".into(),
        Cell::Flag(false) => "no".into(),
        Cell::Value(v) => format!("${}$", v.to_latex()),
        Cell::Empty => String::new(),
    }
}

fn latex_tabular(title: &str, columns: &[String], rows: Vec<Vec<String>>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "% {title}");
    let spec: String = std::iter::once("r")
        .chain(std::iter::repeat_n("l", columns.len().saturating_sub(1)))
        .collect();
    let _ = writeln!(s, "\\begin{{tabular}}{{{spec}}}");
    let header: Vec<String> = columns.iter().map(|c| latex_text(c)).collect();
    let _ = writeln!(s, "{} \\\\", header.join(" & "));
    s.push_str("\\hline\n");
    for r in rows {
        let _ = writeln!(s, "{} \\\\", r.join(" & "));
    }
    s.push_str("\\end{tabular}\n");
    s
}

fn table_latex(t: &Table) -> String {
    let rows = t
        .rows
        .iter()
        .map(|r| r.iter().map(latex_cell).collect())
        .collect();
    latex_tabular(&latex_text(&t.title), &t.columns, rows)
}

fn reports_latex(out: &VerifyOutcome) -> String {
    let rows = out
        .reports
        .iter()
        .map(|r| report_fields(r, false))
        .chain(out.findings.iter().map(|r| report_fields(r, true)))
        .map(|fields| fields.iter().map(|f| latex_text(f)).collect())
        .collect();
    latex_tabular("identity reports", &REPORT_COLUMNS.map(String::from), rows)
}

/// Built-in regression cases: file name and arguments.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("b_sym_series", &["b", "--max-n", "6", "--lambda", "sym"]),
    (
        "b_half_all",
        &[
            "b", "--max-n", "8", "--lambda", "1/2", "--route", "all", "--format", "csv",
        ],
    ),
    (
        "b_sym_order2",
        &[
            "b",
            "--max-n",
            "5",
            "--lambda",
            "sym",
            "--order-r",
            "2",
            "--format",
            "latex",
        ],
    ),
    (
        "a_sym_all",
        &["a", "--max-N", "5", "--lambda", "sym", "--route", "all"],
    ),
    (
        "a_zero",
        &[
            "a", "--max-N", "5", "--lambda", "0", "--route", "all", "--format", "csv",
        ],
    ),
    (
        "a_sym_latex",
        &["a", "--max-N", "4", "--lambda", "sym", "--format", "latex"],
    ),
    (
        "stirling_first",
        &["stirling", "--kind", "first", "--max-n", "6"],
    ),
    (
        "stirling_deg2_sym",
        &[
            "stirling", "--kind", "deg2", "--max-n", "5", "--format", "csv",
        ],
    ),
    (
        "stirling_scaled_zero",
        &[
            "stirling",
            "--kind",
            "scaled-deg2",
            "--max-n",
            "5",
            "--lambda",
            "0",
        ],
    ),
    ("classical", &["classical", "--max-n", "10"]),
    ("verify_ode", &["verify", "--suite", "ode", "--max-N", "4"]),
    (
        "verify_cor42",
        &["verify", "--suite", "cor42", "--max-N", "4"],
    ),
    (
        "verify_thm41",
        &[
            "verify", "--suite", "thm41", "--max-N", "3", "--max-j", "3", "--format", "csv",
        ],
    ),
];

/// Renders one golden case; returns the file name and the bytes.
pub fn golden_case(name: &str, args: &[&str]) -> Result<(String, String)> {
    let cli = Cli::try_parse_from(std::iter::once("degbern").chain(args.iter().copied()))
        .map_err(|e| Error::Parse(e.to_string()))?;
    let (doc, format) = document(&cli.command)?;
    Ok((
        format!("{name}.{}", format.extension()),
        render(&doc, format)?,
    ))
}

fn golden(dir: &Path, bless: bool) -> Result<Outcome> {
    let io = |e: std::io::Error| Error::Internal(format!("{}: {e}", dir.display()));
    if bless {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut text = String::new();
    let mut failures = 0;
    for (name, args) in GOLDEN_CASES {
        let (file, rendered) = golden_case(name, args)?;
        let path = dir.join(&file);
        if bless {
            std::fs::write(&path, &rendered).map_err(io)?;
            let _ = writeln!(text, "blessed {file}");
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(stored) if stored == rendered => {
                let _ = writeln!(text, "ok {file}");
            }
            Ok(_) => {
                failures += 1;
                let _ = writeln!(text, "mismatch {file}");
            }
            Err(_) => {
                failures += 1;
                let _ = writeln!(text, "missing {file}");
            }
        }
    }
    Ok(Outcome {
        text,
        exit_code: i32::from(failures > 0),
    })
}
