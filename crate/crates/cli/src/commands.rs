use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use setscore::interval_family::{prediction_family, shortest_intervals, GridSpec};
use setscore::interval_scores::{murphy_empirical, murphy_expected, normalized_score, v_selective};
use setscore::specified_intervals::{
    fixed_left_score, fixed_mid_score, fixed_right_score, qi_score, si1_score, LineMeasure,
    Transform,
};
use setscore::util::linspace;
use setscore::vorobev::{
    argmin_bruteforce, expected_score_normalized, expected_score_tilde, in_argmin_band,
    score_normalized, score_tilde, vorobev_sets,
};
use setscore::{ExtReal, Grid, Interval, PointMeasure, ScoreReport};

use crate::output::emit;
use crate::{input, FamilyArgs, MurphyArgs, Outcome, ScoreArgs, ScoreKind, SiArgs, VorobevArgs};

fn mu_box(args: &ScoreArgs, kind: &str) -> Result<[f64; 4]> {
    args.mu
        .mu_box
        .ok_or_else(|| anyhow!("--mu-box is required for the {kind} score"))
}

pub fn score(args: &ScoreArgs) -> Result<Outcome> {
    let obs = input::observations(&args.obs)?;
    let alpha = args.alpha;
    let g: Transform = args.transform.into();
    let scores: Vec<f64> = if args.score == ScoreKind::Exhaustive {
        let manifest = args
            .manifest
            .as_ref()
            .ok_or_else(|| anyhow!("--manifest is required for the exhaustive score"))?;
        let mu = PointMeasure::uniform_grid(mu_box(args, "exhaustive")?, args.mu.mu_res)?;
        let fams = input::align(&input::family_manifest(manifest)?, &obs, "manifest")?;
        fams.iter()
            .zip(&obs)
            .map(|(a, (_, y))| normalized_score(a, *y, alpha, &mu))
            .collect()
    } else {
        let path = args
            .forecasts
            .as_ref()
            .ok_or_else(|| anyhow!("--forecasts is required for interval scores"))?;
        let xs = input::align(&input::intervals(path)?, &obs, "forecasts")?;
        let line = match args.score {
            ScoreKind::FixedLeft | ScoreKind::FixedRight => {
                let [x0, _, x1, _] = mu_box(args, "fixed-endpoint")?;
                Some(LineMeasure::uniform_grid(x0, x1, args.mu.mu_res)?)
            }
            _ => None,
        };
        let finite = |x: ExtReal| {
            x.finite()
                .ok_or_else(|| anyhow!("endpoint {x} must be finite"))
        };
        xs.iter()
            .zip(&obs)
            .map(|(x, (id, y)): (&Interval, &(String, f64))| {
                let y = *y;
                let one = || -> Result<f64> {
                    Ok(match args.score {
                        ScoreKind::Selective => v_selective(x, y, alpha),
                        ScoreKind::Qi => {
                            let beta = args
                                .beta
                                .ok_or_else(|| anyhow!("--beta is required for the qi score"))?;
                            qi_score(x, y, alpha, beta, [g, g])?
                        }
                        ScoreKind::FixedLeft => fixed_left_score(
                            x.hi(),
                            y,
                            alpha,
                            finite(x.lo())?,
                            line.as_ref().expect("set above"),
                        )?,
                        ScoreKind::FixedRight => fixed_right_score(
                            x.lo(),
                            y,
                            alpha,
                            finite(x.hi())?,
                            line.as_ref().expect("set above"),
                        )?,
                        ScoreKind::FixedMid => {
                            let (lo, hi) = (finite(x.lo())?, finite(x.hi())?);
                            fixed_mid_score(0.5 * (hi - lo), y, 0.5 * (lo + hi), alpha, |t| {
                                g.apply(t)
                            })?
                        }
                        ScoreKind::Si1 => si1_score(x, y, g),
                        ScoreKind::Exhaustive => unreachable!("handled above"),
                    })
                };
                one().with_context(|| format!("case {id:?}"))
            })
            .collect::<Result<_>>()?
    };
    let report = ScoreReport::new(obs.iter().map(|(id, _)| id.clone()).zip(scores).collect());
    emit(args.out.as_deref(), &report.to_csv())?;
    Ok(Outcome { passed: true })
}

pub fn murphy(args: &MurphyArgs) -> Result<Outcome> {
    let mu = PointMeasure::uniform_grid(args.mu_box, args.u_grid)?;
    let u_grid: Vec<Interval> = mu.atoms().iter().map(|(u, _)| *u).collect();
    let (names, table, passed) = if let Some(manifest) = &args.manifest {
        let obs_path = args
            .obs
            .as_ref()
            .ok_or_else(|| anyhow!("--obs is required with --manifest"))?;
        let obs = input::observations(obs_path)?;
        let forecasters = input::forecaster_manifest(manifest)?;
        if forecasters.is_empty() {
            bail!("{}: no forecasters", manifest.display());
        }
        let mut rows = Vec::new();
        let mut names = Vec::new();
        for (name, cases) in &forecasters {
            rows.push(input::align(cases, &obs, &format!("forecaster {name}"))?);
            names.push(name.clone());
        }
        let ys: Vec<f64> = obs.iter().map(|(_, y)| *y).collect();
        (
            names,
            murphy_empirical(&rows, &ys, args.alpha, &u_grid)?,
            true,
        )
    } else {
        if args.dist.is_empty() {
            bail!("give forecasters with --manifest or at least one --dist");
        }
        let laws = args
            .dist
            .iter()
            .map(|p| input::distribution(p))
            .collect::<Result<Vec<_>>>()?;
        // sample Γ at the u₁ coordinates so membership of every u is exact
        let [x0, _, x1, _] = args.mu_box;
        let pts = GridSpec::Points(linspace(x0, x1, args.u_grid));
        let fams = laws
            .iter()
            .map(|f| prediction_family(f, args.alpha, &pts))
            .collect::<Result<Vec<_>, _>>()?;
        let table = murphy_expected(&fams, &laws[0], args.alpha, &u_grid)?;
        let dominated = table[1..]
            .iter()
            .all(|row| row.iter().zip(&table[0]).all(|(alt, truth)| truth <= alt));
        let names = args
            .dist
            .iter()
            .map(|p| {
                p.file_stem()
                    .map_or("dist".into(), |s| s.to_string_lossy().into_owned())
            })
            .collect();
        (names, table, dominated)
    };
    let mut s = String::from("u1,u2");
    for n in &names {
        let _ = write!(s, ",{n}");
    }
    s.push('\n');
    for (j, u) in u_grid.iter().enumerate() {
        let _ = write!(s, "{},{}", u.lo(), u.hi());
        for row in &table {
            let _ = write!(s, ",{}", row[j]);
        }
        s.push('\n');
    }
    emit(args.out.as_deref(), &s)?;
    if !passed {
        eprintln!("check failed: the first distribution's family is not dominant at every u");
    }
    Ok(Outcome { passed })
}

pub fn family(args: &FamilyArgs) -> Result<Outcome> {
    let f = input::distribution(&args.dist)?;
    let fam = prediction_family(
        &f,
        args.alpha,
        &GridSpec::Auto {
            n: args.n,
            eps: 1e-3,
        },
    )?;
    emit(args.out.as_deref(), &fam.to_csv_string())?;
    Ok(Outcome { passed: true })
}

pub fn si(args: &SiArgs) -> Result<Outcome> {
    let f = input::distribution(&args.dist)?;
    let si = shortest_intervals(&f, args.alpha)?;
    let mut s = String::from("lo,hi,length\n");
    for iv in &si.intervals {
        let _ = writeln!(s, "{},{},{}", iv.lo(), iv.hi(), iv.length());
    }
    emit(args.out.as_deref(), &s)?;
    Ok(Outcome { passed: true })
}

fn mask_string(d: &setscore::GridSet) -> String {
    d.mask()
        .iter()
        .map(|m| if *m { '1' } else { '0' })
        .collect()
}

pub fn vorobev(args: &VorobevArgs) -> Result<Outcome> {
    let y = input::randset(&args.randset)?;
    let grid = match &args.weights {
        Some(p) => input::weights(p)?,
        None => Grid::counting(y.len())?,
    };
    if grid.len() != y.len() {
        bail!(
            "weights have {} cells, the random set {}",
            grid.len(),
            y.len()
        );
    }
    let alpha = args.alpha;
    let sets = vorobev_sets(&y, alpha)?;
    if args.argmin {
        let mins = argmin_bruteforce(&y, alpha, &grid)?;
        let mut s = String::from("minimizer\n");
        for d in &mins {
            let _ = writeln!(s, "{}", mask_string(d));
        }
        emit(args.out.as_deref(), &s)?;
        let passed = mins.iter().all(|d| in_argmin_band(d, &sets, &grid));
        if !passed {
            eprintln!("check failed: a minimiser lies outside the band between Q_gt and Q_alpha");
        }
        return Ok(Outcome { passed });
    }
    let x_path = args
        .grid
        .as_ref()
        .ok_or_else(|| anyhow!("give --argmin or a reported set with --grid"))?;
    let x = input::grid_set(x_path)?;
    if x.len() != y.len() {
        bail!(
            "{}: {} cells, the random set has {}",
            x_path.display(),
            x.len(),
            y.len()
        );
    }
    let seed = args
        .seed
        .ok_or_else(|| anyhow!("--seed is required when sampling observations"))?;
    let mut s = String::from("sample,score_tilde,score_normalized\n");
    for (i, obs) in y.sample_n(args.samples, seed).iter().enumerate() {
        let _ = writeln!(
            s,
            "{i},{},{}",
            score_tilde(&x, obs, alpha, &grid),
            score_normalized(&x, obs, alpha, &grid)
        );
    }
    let _ = writeln!(
        s,
        "expected,{},{}",
        expected_score_tilde(&x, &y, alpha, &grid),
        expected_score_normalized(&x, &y, alpha, grid.weights())
    );
    emit(args.out.as_deref(), &s)?;
    Ok(Outcome { passed: true })
}
