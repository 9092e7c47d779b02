//! Closed forms checked against direct computation over user-given ranges.

use std::collections::BTreeMap;

use clap::Args;
use rayon::prelude::*;
use serde_json::json;

use nilnorm::cgc::{
    invert_tensor, lambda_coeff, lambda_l1_zero, lambda_rho0, product_orbit, transvectant_norm_sq,
    transvectant_norm_sq_direct,
};
use nilnorm::liealg::comb_to_vectorfield;
use nilnorm::normalform::basis_up_to;
use nilnorm::polyvf::oracle_bracket;
use nilnorm::sl2rep::{realize, to_orbit_coords, OrbitFunction};
use nilnorm::{bracket, Dim, LieComb, OrbitElement, Rational};

use crate::commands::Output;
use crate::error::CliError;
use crate::Format;

#[derive(Args)]
pub struct VerifyArgs {
    /// Largest sl2 weight `m`, `n` for the transvectant identities.
    #[arg(long, default_value_t = 6)]
    max_weight: i64,
    /// Largest degree of the operands for the product and bracket identities.
    #[arg(long, default_value_t = 4)]
    max_degree: u32,
}

struct Report {
    name: &'static str,
    cases: usize,
    /// First failing case, if any.
    failure: Option<String>,
}

/// Runs `check` over `cases` in parallel; the reported failure is the
/// first one in case order.
fn identity<T: Sync>(
    name: &'static str,
    cases: Vec<T>,
    check: impl Fn(&T) -> Result<bool, CliError> + Sync,
    label: impl Fn(&T) -> String,
) -> Result<Report, CliError> {
    let results: Vec<bool> = cases.par_iter().map(&check).collect::<Result<_, _>>()?;
    let failure = cases
        .iter()
        .zip(&results)
        .find(|(_, ok)| !**ok)
        .map(|(c, _)| label(c));
    Ok(Report {
        name,
        cases: cases.len(),
        failure,
    })
}

fn weight_triples(w: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for m in 0..=w {
        for n in 0..=w {
            out.extend((0..=m.min(n)).map(|p| (m, n, p)));
        }
    }
    out
}

fn norm(w: i64) -> Result<Report, CliError> {
    identity(
        "transvectant norm",
        weight_triples(w),
        |&(m, n, p)| Ok(transvectant_norm_sq(m, n, p)? == transvectant_norm_sq_direct(m, n, p)?),
        |(m, n, p)| format!("m={m} n={n} p={p}"),
    )
}

fn inversion(w: i64) -> Result<Report, CliError> {
    let mut cases = Vec::new();
    for m in 0..=w {
        for n in 0..=w {
            for i in 0..=m {
                cases.extend((0..=n).map(|j| (m, n, i, j)));
            }
        }
    }
    identity(
        "tensor inversion",
        cases,
        |&(m, n, i, j)| {
            let t = invert_tensor(m, n, i, j)?.expand();
            Ok(t.terms.len() == 1 && t.get(i, j) == Rational::one())
        },
        |(m, n, i, j)| format!("m={m} n={n} i={i} j={j}"),
    )
}

fn lambda_cases(max_mu: i64) -> Vec<(i64, i64, i64, i64, i64)> {
    let mut out = Vec::new();
    for mu1 in 0..=max_mu {
        for mu2 in 0..=max_mu {
            for l1 in 0..=2 * mu1 {
                for l2 in 0..=2 * mu2 {
                    out.extend((0..=(l1 + l2) / 2).map(|rho| (l1, mu1, l2, mu2, rho)));
                }
            }
        }
    }
    out
}

fn lambda_closed_forms(max_mu: i64) -> Result<Vec<Report>, CliError> {
    let label = |&(l1, mu1, l2, mu2, rho): &(i64, i64, i64, i64, i64)| {
        format!("l1={l1} mu1={mu1} l2={l2} mu2={mu2} rho={rho}")
    };
    let all = lambda_cases(max_mu);
    let rho0: Vec<_> = all.iter().copied().filter(|c| c.4 == 0).collect();
    let l1_zero: Vec<_> = all.iter().copied().filter(|c| c.0 == 0).collect();
    Ok(vec![
        identity(
            "lambda at rho = 0",
            rho0,
            |&(l1, mu1, l2, mu2, _)| {
                Ok(lambda_rho0(l1, mu1, l2, mu2) == lambda_coeff(l1, mu1, l2, mu2, 0))
            },
            label,
        )?,
        identity(
            "lambda at l1 = 0",
            l1_zero,
            |&(_, mu1, l2, mu2, rho)| {
                Ok(lambda_l1_zero(mu1, l2, mu2, rho) == lambda_coeff(0, mu1, l2, mu2, rho))
            },
            label,
        )?,
    ])
}

fn pairs(max_degree: u32) -> Vec<(OrbitElement, OrbitElement)> {
    let mut out = Vec::new();
    for dim in [Dim::Two, Dim::Three] {
        let basis = basis_up_to(dim, max_degree);
        for a in &basis {
            out.extend(basis.iter().map(|b| (*a, *b)));
        }
    }
    out
}

fn product(max_degree: u32) -> Result<Report, CliError> {
    identity(
        "orbit product",
        pairs(max_degree),
        |(a, b)| {
            let (oa, ob) = (a.orbit_function(), b.orbit_function());
            let closed = product_orbit(a.dim, &oa, &ob)?;
            let direct = realize(&oa)?
                .mul(&*realize(&ob)?)
                .map_err(|e| CliError::Invariant(e.to_string()))?;
            let direct: BTreeMap<OrbitFunction, Rational> = to_orbit_coords(&direct)?;
            Ok(closed == direct)
        },
        |(a, b)| format!("{a} * {b}"),
    )
}

fn bracket_oracle(max_degree: u32) -> Result<Report, CliError> {
    identity(
        "bracket vs vector fields",
        pairs(max_degree),
        |(a, b)| {
            let exp = bracket(a, b)?;
            let closed =
                comb_to_vectorfield(&LieComb::from_terms(a.dim, false, exp.iter().cloned()));
            let field =
                |e: &OrbitElement| comb_to_vectorfield(&LieComb::single(*e, Rational::one()));
            let direct = oracle_bracket(&field(a), &field(b))
                .map_err(|e| CliError::Invariant(e.to_string()))?;
            Ok(closed == direct)
        },
        |(a, b)| format!("[{a}, {b}]"),
    )
}

pub fn run(a: &VerifyArgs, format: Format) -> Result<Output, CliError> {
    if a.max_weight < 0 {
        return Err(CliError::Usage("--max-weight must be non-negative".into()));
    }
    let mut reports = vec![norm(a.max_weight)?, inversion(a.max_weight)?];
    reports.extend(lambda_closed_forms(a.max_weight)?);
    reports.push(product(a.max_degree)?);
    reports.push(bracket_oracle(a.max_degree)?);

    let all_pass = reports.iter().all(|r| r.failure.is_none());
    let text = match format {
        Format::Text => {
            let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0);
            reports
                .iter()
                .map(|r| match &r.failure {
                    None => format!("PASS  {:<width$}  {} cases\n", r.name, r.cases),
                    Some(case) => format!(
                        "FAIL  {:<width$}  {} cases, first failure {case}\n",
                        r.name, r.cases
                    ),
                })
                .collect()
        }
        Format::Json => {
            let v: Vec<_> = reports
                .iter()
                .map(|r| json!({"identity": r.name, "pass": r.failure.is_none(), "cases": r.cases, "failure": r.failure}))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&v)?)
        }
    };
    Ok(Output {
        text,
        code: if all_pass { 0 } else { 2 },
    })
}
