use std::fs;

use axdecomp::axioms::{
    check_shapley_axioms, random_game, run_suite, AxiomVerdict, CorpusSpec, Principle, Status, SuiteConfig,
};
use axdecomp::coords::SUBSET_CAP;
use axdecomp::demos::{self, Tariff};
use axdecomp::var_model::{quantile_rank, ClaimsModel};
use axdecomp::{decomp, io, montecarlo, parse, shapley, Dimension, FunctionHandle, Game, MaskedTable, Method, Permutation, Point};
use serde_json::json;

use crate::error::{exit, CliError};
use crate::output::{num, Format, Report, Row};
use crate::{AxiomsArgs, Command, DecomposeArgs, Example1Args, Example2Args, Example3Args, MethodArg, OutputArgs, ShapleyArgs};

pub fn run(cmd: Command) -> Result<u8, CliError> {
    match cmd {
        Command::Decompose(a) => decompose(a),
        Command::Shapley(a) => shapley_cmd(a),
        Command::Axioms(a) => axioms(a),
        Command::Example1(a) => example1(a),
        Command::Example2(a) => example2(a),
        Command::Example3(a) => example3(a),
    }
}

fn read_file(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn emit(text: &str, output: &Option<String>) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_point(text: &str, d: Dimension) -> Result<Point, CliError> {
    let coords = text
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| CliError::usage(format!("bad coordinate {c:?} in point {text:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != d.get() {
        return Err(CliError::usage(format!("point {text:?} has {} coordinates, expected {d}", coords.len())));
    }
    Ok(Point::new(coords)?)
}

fn parse_order(text: &str) -> Result<Permutation, CliError> {
    let ranks = text
        .split(',')
        .map(|c| c.trim().parse::<usize>().map_err(|_| CliError::usage(format!("bad rank {c:?} in order {text:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Permutation::from_one_based(&ranks)?)
}

fn points_from(args: &[String], csv: Option<&str>, d: Dimension) -> Result<Vec<Point>, CliError> {
    let mut points = args.iter().map(|p| parse_point(p, d)).collect::<Result<Vec<_>, _>>()?;
    if let Some(path) = csv {
        points.extend(io::read_points(&read_file(path)?, d)?);
    }
    Ok(points)
}

fn within(residual: f64, total: f64, tol: f64) -> bool {
    residual <= tol * (1.0 + total.abs())
}

fn finish(report: &Report, out: &OutputArgs, ok: bool) -> Result<u8, CliError> {
    emit(&report.render(out.format), &out.output)?;
    if ok {
        Ok(exit::OK)
    } else {
        log::warn!("verification failed at tolerance {}", out.tol);
        Ok(exit::VERIFICATION)
    }
}

fn resolve_method(a: &DecomposeArgs, d: Dimension) -> Result<Method, CliError> {
    if a.order.is_some() && a.method != MethodArg::Sequential {
        return Err(CliError::usage("--order only applies to --method sequential"));
    }
    Ok(match a.method {
        MethodArg::Auto if d.get() <= SUBSET_CAP => Method::AsSubset,
        MethodArg::Auto | MethodArg::Mc => Method::MonteCarlo { seed: a.seed, n: a.samples },
        MethodArg::Sequential => {
            let pi = match &a.order {
                Some(text) => parse_order(text)?,
                None => Permutation::identity(d),
            };
            Method::sequential(&pi)
        }
        MethodArg::As => Method::AsSubset,
        MethodArg::AsPermutation => Method::AsPermutation,
        MethodArg::DeltaStar => Method::DeltaStar,
        MethodArg::Pointwise => Method::PointwiseShapley,
    })
}

fn decompose(a: DecomposeArgs) -> Result<u8, CliError> {
    let d = Dimension::new(a.dim)?;
    let mut points = points_from(&a.points, a.points_csv.as_deref(), d)?;
    let f = match (&a.function, &a.table_csv) {
        (Some(text), None) => parse(text, d)?.into_handle(),
        (None, Some(path)) => {
            if points.len() > 1 {
                return Err(CliError::usage("a masked table covers one base point; pass at most one point"));
            }
            let base = points.pop().unwrap_or_else(|| Point::ones(d));
            let values = io::read_masked_table(&read_file(path)?, d)?;
            points.push(base.clone());
            FunctionHandle::from_table(MaskedTable::new(base, values)?)
        }
        _ => return Err(CliError::usage("give exactly one of --function or --table-csv")),
    };
    if points.is_empty() {
        return Err(CliError::usage("no points: pass -x or --points-csv"));
    }
    if let Some(path) = &a.export_table {
        if points.len() != 1 {
            return Err(CliError::usage("--export-table needs exactly one point"));
        }
        let values = decomp::masked_values(&f, &points[0])?;
        fs::write(path, io::write_masked_table(&values, d)?).map_err(|e| CliError::io(path, e))?;
    }
    let method = resolve_method(&a, d)?;
    log::info!("decomposing {f} with {method} at {} point(s)", points.len());

    let mut rows = Vec::with_capacity(points.len());
    let mut ok = true;
    for x in &points {
        let (contributions, total, standard_error) = match method {
            Method::MonteCarlo { seed, n } => {
                let r = montecarlo::estimate_as(&f, x, n, seed)?;
                (r.estimate, r.total, Some(r.standard_error))
            }
            _ => {
                let r = decomp::decompose(&f, x, &method)?;
                (r.contributions, r.total, None)
            }
        };
        let residual = (total - contributions.iter().sum::<f64>()).abs();
        ok &= within(residual, total, a.out.tol);
        rows.push(Row { x: x.coords().to_vec(), contributions, total, residual, standard_error, reference: None });
    }
    let report = Report { method: method.to_string(), d: d.get(), rows, notes: Vec::new() };
    finish(&report, &a.out, ok)
}

fn shapley_cmd(a: ShapleyArgs) -> Result<u8, CliError> {
    let v = Game::from_json(&read_file(&a.game)?)?;
    let phi = shapley(&v);
    let residual = phi.efficiency_residual(&v);
    let grand = v.grand_value();
    let g = |x: f64| crate::output::fmt_sig(x, crate::output::DATA_DIGITS);
    let text = match a.out.format {
        Format::Table => {
            let t = |x: f64| crate::output::fmt_sig(x, crate::output::TABLE_DIGITS);
            let mut s = String::from("player  share\n");
            for (i, p) in phi.shares.iter().enumerate() {
                s.push_str(&format!("{:>6}  {}\n", i + 1, t(*p)));
            }
            s.push_str(&format!("v(U): {}\nefficiency residual: {}\n", t(grand), t(residual)));
            s
        }
        Format::Json => {
            let shares: Vec<_> = phi.shares.iter().map(|&x| num(x)).collect();
            let o = json!({
                "d": v.dim().get(),
                "shares": shares,
                "grand_value": num(grand),
                "efficiency_residual": num(residual),
            });
            format!("{}\n", serde_json::to_string_pretty(&o).expect("serializes"))
        }
        Format::Csv => {
            let mut s = String::from("player,share\n");
            for (i, p) in phi.shares.iter().enumerate() {
                s.push_str(&format!("{},{}\n", i + 1, g(*p)));
            }
            s
        }
    };
    emit(&text, &a.out.output)?;
    Ok(if within(residual, grand, a.out.tol) { exit::OK } else { exit::VERIFICATION })
}

fn axioms(a: AxiomsArgs) -> Result<u8, CliError> {
    let spec = match &a.corpus {
        Some(path) => serde_json::from_str::<CorpusSpec>(&read_file(path)?)
            .map_err(|e| CliError::usage(format!("{path}: invalid corpus spec: {e}")))?,
        None => CorpusSpec::default_suite(),
    };
    if spec.functions.is_empty() {
        return Err(CliError::usage("no functions in corpus"));
    }
    let mut principle: Principle = a.principle.parse()?;
    if let Some(order) = &a.order {
        if principle != Principle::Sequential(None) {
            return Err(CliError::usage("--order only applies to --principle sequential"));
        }
        principle = Principle::Sequential(Some(parse_order(order)?));
    }
    let cfg = SuiteConfig { principle, tol: a.tol, seed: a.seed, ..SuiteConfig::default() };
    let mut verdicts = run_suite(&spec, &cfg)?;
    let exact = |v: &Game| shapley(v).shares;
    for k in 0..a.games {
        let d = Dimension::new(1 + k % 5)?;
        let seed = a.seed.wrapping_add(2 * k as u64);
        let v = random_game(d, seed);
        let w = random_game(d, seed + 1);
        verdicts.extend(check_shapley_axioms(&exact, &v, &w, &format!("game#{k} d={d}"), seed, a.tol.min(1e-12))?);
    }
    let mut text = String::new();
    for v in &verdicts {
        text.push_str(&v.to_json_line());
        text.push('\n');
    }
    emit(&text, &a.output)?;
    let count = |s: Status| verdicts.iter().filter(|v| v.status == s).count();
    log::info!(
        "{} verdicts: {} pass, {} partial, {} skipped, {} fail",
        verdicts.len(),
        count(Status::Pass),
        count(Status::Partial),
        count(Status::Skipped),
        count(Status::Fail)
    );
    Ok(if verdicts.iter().any(|v: &AxiomVerdict| v.status.is_failure()) { exit::VERIFICATION } else { exit::OK })
}

fn delta_star_rows(f: &FunctionHandle, points: &[Point], tol: f64) -> Result<(Vec<Row>, bool), CliError> {
    let mut rows = Vec::new();
    let mut ok = true;
    for x in points {
        let r = decomp::delta_star(f, x)?;
        let residual = r.residual();
        ok &= within(residual, r.total, tol);
        rows.push(Row {
            x: x.coords().to_vec(),
            contributions: r.contributions,
            total: r.total,
            residual,
            standard_error: None,
            reference: None,
        });
    }
    Ok((rows, ok))
}

fn example1(a: Example1Args) -> Result<u8, CliError> {
    let d = Dimension::new(2)?;
    let mut points = points_from(&a.points, None, d)?;
    if points.is_empty() {
        points.push(Point::ones(d));
    }
    let f = demos::stock_fx_pnl(a.s0, a.c0);
    let (mut rows, mut ok) = delta_star_rows(&f, &points, a.out.tol)?;
    for r in &mut rows {
        let closed = demos::stock_fx_closed_form(a.s0, a.c0, [r.x[0], r.x[1]]);
        ok &= r.contributions.iter().zip(&closed).all(|(g, c)| within((g - c).abs(), *c, a.out.tol));
        r.reference = Some(closed.to_vec());
    }
    let notes = vec![("s0".into(), num(a.s0)), ("c0".into(), num(a.c0))];
    finish(&Report { method: "delta_star".into(), d: 2, rows, notes }, &a.out, ok)
}

fn example2(a: Example2Args) -> Result<u8, CliError> {
    let d = Dimension::new(a.dim)?;
    let mut points = points_from(&a.points, None, d)?;
    if points.is_empty() {
        points.push(Point::new((1..=d.get()).map(|i| i as f64).collect())?);
    }
    let tariff = Tariff { fixed: a.fixed, rate: a.rate, discount: a.threshold.zip(a.discount_rate) };
    let f = demos::shared_bill(tariff, d);
    let (rows, ok) = delta_star_rows(&f, &points, a.out.tol)?;
    let notes = vec![("fixed_share".into(), num(a.fixed / d.get() as f64))];
    finish(&Report { method: "delta_star".into(), d: d.get(), rows, notes }, &a.out, ok)
}

fn example3(a: Example3Args) -> Result<u8, CliError> {
    let model = if a.symmetric {
        ClaimsModel::symmetric_two_factor(a.positions.div_ceil(2), a.scenarios, a.seed)?
    } else {
        ClaimsModel::generate(Dimension::new(a.dim)?, a.positions, a.scenarios, a.seed)?
    };
    let d = model.dim();
    let mut points = points_from(&a.points, None, d)?;
    if points.is_empty() {
        points.push(Point::new(vec![0.1; d.get()])?);
    }
    let base = model.var(&vec![0.0; d.get()]);
    let n = model.scenarios();
    let f = model.var_change();
    let (rows, ok) = delta_star_rows(&f, &points, a.out.tol)?;
    let notes = vec![
        ("scenarios".into(), json!(n)),
        ("quantile_rank".into(), json!(quantile_rank(n))),
        ("base_var".into(), num(base)),
    ];
    finish(&Report { method: "delta_star".into(), d: d.get(), rows, notes }, &a.out, ok)
}
