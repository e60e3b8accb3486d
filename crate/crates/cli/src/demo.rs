//! The `demo` subcommand: CSV table plus a one-line verdict on stdout.

use std::fmt::Write as _;

use anyhow::{anyhow, Result};
use setscore::interval_family::{prediction_family, GridSpec};
use setscore::lab::{
    gamma_lambda_probe, grid_knots, noninjective_density, proper_subset_demo, si_dirac_table,
    si_table_csv, wrapped_sine, wrapped_sine_cdf,
};
use setscore::util::linspace;

use crate::output::emit;
use crate::{DemoArgs, DemoName, Outcome};

pub fn run(args: &DemoArgs) -> Result<Outcome> {
    let (csv, passed, summary) = match args.name {
        DemoName::Noninjective => noninjective(args.alpha.unwrap_or(0.25))?,
        DemoName::Wrapped => wrapped(args.b.unwrap_or(0.04), args.n.unwrap_or(3))?,
        DemoName::ProperSubset => {
            let r = proper_subset_demo(args.alpha.unwrap_or(0.75), args.c)?;
            let summary = format!(
                "contained {}, strict {}, limit case {}",
                r.contained, r.strict, r.limit_case
            );
            (r.to_csv(), r.passed(), summary)
        }
        DemoName::SiTable => {
            let level = args.level.or(args.beta).unwrap_or(0.8);
            let rows = si_dirac_table(level, &linspace(0.0, 1.0, 21))?;
            let bad = rows.iter().filter(|r| !r.matches()).count();
            (
                si_table_csv(&rows),
                bad == 0,
                format!(
                    "{} rows, {bad} differ from the closed-form table",
                    rows.len()
                ),
            )
        }
        DemoName::GammaLambda => {
            let p = gamma_lambda_probe(args.alpha.unwrap_or(0.5), &linspace(0.0, 1.0, 21))?;
            let mut summary = String::new();
            for c in &p.candidates {
                let _ = write!(
                    summary,
                    "{}: affine error {:.1e}, violations {:?}; ",
                    c.name, c.affine_error, c.violations
                );
            }
            (
                p.to_csv(),
                p.passed(),
                summary.trim_end_matches("; ").to_string(),
            )
        }
    };
    if args.out.is_some() {
        emit(args.out.as_deref(), &csv)?;
    } else {
        print!("{csv}");
    }
    println!(
        "{}: {} ({summary})",
        demo_name(args.name),
        if passed { "PASS" } else { "FAIL" }
    );
    Ok(Outcome { passed })
}

fn demo_name(d: DemoName) -> &'static str {
    match d {
        DemoName::Noninjective => "noninjective",
        DemoName::Wrapped => "wrapped",
        DemoName::ProperSubset => "proper-subset",
        DemoName::SiTable => "si-table",
        DemoName::GammaLambda => "gamma-lambda",
    }
}

fn noninjective(alpha: f64) -> Result<(String, bool, String)> {
    let n = (1.0 / alpha).round();
    let a_values = if (n * alpha - 1.0).abs() <= 1e-12 {
        [0.0, 0.5, 1.0]
    } else {
        // at the bound the low level vanishes, flat CDF stretches move the
        // lower quantiles and the family changes, so stay inside
        let beta = 1.0 % alpha;
        let bound = beta / (alpha - beta);
        [0.0, 0.5 * bound, 0.9 * bound]
    };
    let laws = a_values
        .iter()
        .map(|a| noninjective_density(*a, alpha))
        .collect::<Result<Vec<_>, _>>()?;
    let knots = grid_knots(&laws[0])
        .ok_or_else(|| anyhow!("expected a grid density"))?
        .to_vec();
    let fams = laws
        .iter()
        .map(|f| prediction_family(f, alpha, &GridSpec::Points(knots.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let mut gap = 0.0f64;
    let mut same_shape = true;
    for f in &fams[1..] {
        same_shape &= f.grid() == fams[0].grid() && f.domain_cut() == fams[0].domain_cut();
        for (g, g0) in f.gamma().iter().zip(fams[0].gamma()) {
            gap = gap.max(match (g.finite(), g0.finite()) {
                (Some(u), Some(v)) => (u - v).abs(),
                _ if g == g0 => 0.0,
                _ => f64::INFINITY,
            });
        }
    }
    let mut csv = String::from("x");
    for a in a_values {
        let _ = write!(csv, ",window_a{a}");
    }
    csv.push('\n');
    let mut worst = 0.0f64;
    for x in knots.iter().filter(|x| **x <= 1.0 - alpha) {
        let _ = write!(csv, "{x}");
        for f in &laws {
            let m = f.prob_closed_interval(*x, *x + alpha)?;
            worst = worst.max((m - alpha).abs());
            let _ = write!(csv, ",{m}");
        }
        csv.push('\n');
    }
    let passed = same_shape && worst <= 1e-9 && gap <= 1e-9;
    Ok((
        csv,
        passed,
        format!("max window error {worst:.1e}, max family gap {gap:.1e}"),
    ))
}

fn wrapped(b: f64, n: usize) -> Result<(String, bool, String)> {
    let f = wrapped_sine(b, n)?;
    let period = 1.0 / n as f64;
    let mut csv = String::from("y,cdf,closed_form,shift_error\n");
    let mut worst = 0.0f64;
    for y in linspace(0.0, 1.0 - period, 300) {
        let err = f.cdf(y + period) - f.cdf(y) - period;
        worst = worst.max(err.abs());
        let _ = writeln!(csv, "{y},{},{},{err}", f.cdf(y), wrapped_sine_cdf(b, n, y));
    }
    Ok((csv, worst <= 1e-12, format!("max shift error {worst:.1e}")))
}
