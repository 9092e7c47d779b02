use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::Args;
use rayon::prelude::*;
use serde_json::{json, Value};

use nilnorm::cgc::{cgc_3j, lambda_coeff, orbit_transvectant, product_orbit};
use nilnorm::liealg::Expansion;
use nilnorm::normalform::{basis_up_to, normal_form, Mode};
use nilnorm::{bracket as bracket_of, Dim, LieComb, NFProblem, OrbitElement, ParamPoly, Rational};

use crate::error::CliError;
use crate::Format;

pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }

    fn json(v: &Value) -> Self {
        Output::ok(format!(
            "{}\n",
            serde_json::to_string_pretty(v).expect("values serialize")
        ))
    }
}

fn scalar(format: Format, name: &str, value: Rational) -> Output {
    match format {
        Format::Text => Output::ok(format!("{value}\n")),
        Format::Json => Output::json(&json!({ name: value.to_string() })),
    }
}

#[derive(Args)]
pub struct CgcArgs {
    #[arg(long)]
    m: i64,
    #[arg(long)]
    n: i64,
    #[arg(long)]
    p: i64,
    #[arg(long)]
    i: i64,
    #[arg(long)]
    j: i64,
    #[arg(long)]
    k: i64,
}

pub fn cgc(a: &CgcArgs, format: Format) -> Result<Output, CliError> {
    if [a.m, a.n, a.p, a.i, a.j, a.k].iter().any(|v| *v < 0) {
        return Err(CliError::Usage("indices must be non-negative".into()));
    }
    if a.p > a.m.min(a.n) || a.i > a.m || a.j > a.n || a.k > a.m + a.n - 2 * a.p {
        return Err(CliError::Usage(format!(
            "need p <= min(m, n), i <= m, j <= n and k <= m + n - 2p; got m={} n={} p={} i={} j={} k={}",
            a.m, a.n, a.p, a.i, a.j, a.k
        )));
    }
    Ok(scalar(format, "cgc", cgc_3j(a.m, a.n, a.p, a.i, a.j, a.k)))
}

#[derive(Args)]
pub struct TransvectantArgs {
    #[arg(long)]
    m: i64,
    #[arg(long)]
    n: i64,
    #[arg(long)]
    p: i64,
    /// Position along the orbit of `N`; 0 is the transvectant itself.
    #[arg(long, default_value_t = 0)]
    k: i64,
}

pub fn transvectant(a: &TransvectantArgs, format: Format) -> Result<Output, CliError> {
    let t = orbit_transvectant(a.m, a.n, a.p, a.k)?;
    let rows: Vec<(String, String)> = t
        .terms
        .iter()
        .rev()
        .map(|((i, j), c)| (c.to_string(), format!("v[{i}] w[{j}]")))
        .collect();
    Ok(match format {
        Format::Text => Output::ok(aligned(&rows)),
        Format::Json => Output::json(&json!({
            "m": a.m, "n": a.n, "p": a.p, "k": a.k,
            "terms": t.terms.iter().rev().map(|((i, j), c)| json!({"i": i, "j": j, "coeff": c.to_string()})).collect::<Vec<_>>(),
        })),
    })
}

#[derive(Args)]
pub struct LambdaArgs {
    #[arg(long)]
    l1: i64,
    #[arg(long)]
    mu1: i64,
    #[arg(long)]
    l2: i64,
    #[arg(long)]
    mu2: i64,
    #[arg(long)]
    rho: i64,
}

pub fn lambda(a: &LambdaArgs, format: Format) -> Result<Output, CliError> {
    // three-dimensional orbits: zeta^mu has sl2 weight 2 mu
    let ok = a.mu1 >= 0
        && a.mu2 >= 0
        && (0..=2 * a.mu1).contains(&a.l1)
        && (0..=2 * a.mu2).contains(&a.l2)
        && a.rho >= 0;
    if !ok {
        return Err(CliError::Usage(
            "need 0 <= l1 <= 2 mu1, 0 <= l2 <= 2 mu2 and rho >= 0".into(),
        ));
    }
    Ok(scalar(
        format,
        "lambda",
        lambda_coeff(a.l1, a.mu1, a.l2, a.mu2, a.rho),
    ))
}

#[derive(Args)]
pub struct PairArgs {
    /// 2 or 3.
    #[arg(long, default_value_t = 3)]
    dim: u8,
    /// First element, `A[l,mu,k]` (3D) or `A[l,m]` (2D).
    left: String,
    /// Second element.
    right: String,
}

pub type ProductArgs = PairArgs;
pub type BracketArgs = PairArgs;

fn parse_dim(d: u8) -> Result<Dim, CliError> {
    Dim::try_from(d).map_err(|_| CliError::Usage(format!("--dim must be 2 or 3, got {d}")))
}

fn parse_element(dim: Dim, text: &str) -> Result<OrbitElement, CliError> {
    let e: OrbitElement = text.parse()?;
    if e.dim != dim {
        return Err(CliError::Usage(format!("{text} is not a {dim} element")));
    }
    if !e.is_valid() {
        return Err(CliError::Usage(format!("{e} is outside its orbit")));
    }
    Ok(e)
}

impl PairArgs {
    fn elements(&self) -> Result<(OrbitElement, OrbitElement), CliError> {
        let dim = parse_dim(self.dim)?;
        Ok((
            parse_element(dim, &self.left)?,
            parse_element(dim, &self.right)?,
        ))
    }
}

/// Terms by descending `(mu, k, l)`.
fn sorted_terms<'a>(
    terms: impl IntoIterator<Item = (&'a OrbitElement, &'a Rational)>,
) -> Vec<(OrbitElement, Rational)> {
    let mut v: Vec<_> = terms.into_iter().map(|(e, c)| (*e, c.clone())).collect();
    v.sort_by_key(|(e, _)| std::cmp::Reverse(*e));
    v
}

fn term_list(terms: &[(OrbitElement, Rational)], format: Format) -> Output {
    match format {
        Format::Text if terms.is_empty() => Output::ok("0\n".into()),
        Format::Text => Output::ok(terms.iter().map(|(e, c)| format!("{c} * {e}\n")).collect()),
        Format::Json => Output::json(&terms_json(terms)),
    }
}

fn terms_json(terms: &[(OrbitElement, Rational)]) -> Value {
    terms
        .iter()
        .map(|(e, c)| json!({"coeff": c.to_string(), "element": e.to_string()}))
        .collect()
}

pub fn product(a: &ProductArgs, format: Format) -> Result<Output, CliError> {
    let (e1, e2) = a.elements()?;
    let dim = e1.dim;
    let map = product_orbit(dim, &e1.orbit_function(), &e2.orbit_function())?;
    let terms: BTreeMap<OrbitElement, Rational> = map
        .into_iter()
        .map(|(o, c)| (OrbitElement::new(dim, o.l, o.base.mu, o.base.k), c))
        .collect();
    Ok(term_list(&sorted_terms(&terms), format))
}

pub fn bracket(a: &BracketArgs, format: Format) -> Result<Output, CliError> {
    let (e1, e2) = a.elements()?;
    let exp = bracket_of(&e1, &e2)?;
    Ok(term_list(
        &sorted_terms(exp.iter().map(|(e, c)| (e, c))),
        format,
    ))
}

#[derive(Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 3)]
    dim: u8,
    /// Largest degree of a bracket; its degree is the sum of the operands'.
    #[arg(long)]
    bound: u32,
}

pub fn table(a: &TableArgs, format: Format) -> Result<Output, CliError> {
    let dim = parse_dim(a.dim)?;
    let basis = basis_up_to(dim, a.bound.saturating_sub(1));
    let pairs: Vec<(OrbitElement, OrbitElement)> = basis
        .iter()
        .flat_map(|x| basis.iter().map(move |y| (*x, *y)))
        .filter(|(x, y)| x < y && x.grade_delta0() + y.grade_delta0() <= a.bound)
        .collect();
    let rows: Vec<(OrbitElement, OrbitElement, Expansion)> = pairs
        .into_par_iter()
        .map(|(x, y)| bracket_of(&x, &y).map(|exp| (x, y, exp)))
        .collect::<Result<_, _>>()?;
    Ok(match format {
        Format::Text => {
            let lines: Vec<(String, String)> = rows
                .iter()
                .map(|(x, y, exp)| {
                    let terms = sorted_terms(exp.iter().map(|(e, c)| (e, c)));
                    let rhs = if terms.is_empty() {
                        "0".to_string()
                    } else {
                        terms
                            .iter()
                            .map(|(e, c)| format!("{c} * {e}"))
                            .collect::<Vec<_>>()
                            .join(" + ")
                    };
                    (format!("[{x}, {y}]"), format!("= {rhs}"))
                })
                .collect();
            Output::ok(aligned(&lines))
        }
        Format::Json => Output::json(&json!({
            "dim": u8::from(dim),
            "bound": a.bound,
            "brackets": rows.iter().map(|(x, y, exp)| json!({
                "left": x.to_string(),
                "right": y.to_string(),
                "terms": terms_json(&sorted_terms(exp.iter().map(|(e, c)| (e, c)))),
            })).collect::<Vec<_>>(),
        })),
    })
}

/// Left column padded to a common width.
fn aligned(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(a, _)| a.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (a, b) in rows {
        writeln!(out, "{a:>width$}  {b}").expect("writing to a String");
    }
    out
}

#[derive(Args)]
pub struct NormalFormArgs {
    /// JSON file holding either a full problem (`dim`, `input`, `max_grade`,
    /// `mode`) or a bare vector field.
    #[arg(long)]
    input: String,
    /// Degree bound, required when the file holds a bare vector field.
    #[arg(long)]
    max_grade: Option<u32>,
    /// Overrides the mode; a bare field defaults to numeric.
    #[arg(long, value_parser = ["numeric", "symbolic"])]
    mode: Option<String>,
}

fn load_problem(a: &NormalFormArgs) -> Result<NFProblem, CliError> {
    let text = std::fs::read_to_string(&a.input).map_err(|source| CliError::Io {
        path: a.input.clone(),
        source,
    })?;
    let value: Value = serde_json::from_str(&text)?;
    let mode = match a.mode.as_deref() {
        Some("symbolic") => Some(Mode::Symbolic),
        Some(_) => Some(Mode::Numeric),
        None => None,
    };
    let mut problem = if value.get("input").is_some() {
        serde_json::from_value::<NFProblem>(value)?
    } else {
        let field: LieComb<ParamPoly> = serde_json::from_value(value)?;
        let max_grade = a.max_grade.ok_or_else(|| {
            CliError::Usage("--max-grade is required for a bare vector field".into())
        })?;
        NFProblem::new(field, max_grade, Mode::Numeric)
    };
    if let Some(g) = a.max_grade {
        problem.max_grade = g;
    }
    if let Some(m) = mode {
        problem.mode = m;
    }
    Ok(problem)
}

pub fn normalform(a: &NormalFormArgs, format: Format) -> Result<Output, CliError> {
    let problem = load_problem(a)?;
    let report = normal_form(&problem)?;
    Ok(match format {
        Format::Json => Output::json(&serde_json::to_value(&report)?),
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "input:   {}", report.input).expect("writing to a String");
            for level in 1..=3u8 {
                let Some(v) = report.level_output(level) else {
                    continue;
                };
                writeln!(out, "level {level}: {v}").expect("writing to a String");
                for g in report.generators.iter().filter(|g| g.level == level) {
                    writeln!(out, "  T (grade {}): {}", g.grade, g.generator)
                        .expect("writing to a String");
                }
            }
            for s in &report.removed_slots {
                writeln!(
                    out,
                    "removed at level {} (grade {}): {}",
                    s.level, s.grade, s.slot
                )
                .expect("writing to a String");
            }
            Output::ok(out)
        }
    })
}
