use serde::Serialize;
use serde_json::json;
use yamabe_core::asymptotics::{counterexample_report, green_normalization, FConvention};
use yamabe_core::invariants::{lambda_hp2, lambda_lower_min, model_constants, yamabe_sphere, ModelSpace};
use yamabe_core::scans::{compare_series_at, ratio_scan_at, scan_min_location_at, ScanReport};
use yamabe_core::surgery_bounds::{topo_bound, BoundValue, TopoClass, TopoInput};
use yamabe_core::yamabe_ode::{
    find_bracket, integrate, shoot_with, theorem_check, RadialProblem, RadialSolution,
    ShootOptions, TheoremCheck,
};

use crate::output::{sig, Cell, Certificate, CommandOutput, OutputConfig, Tabular};
use crate::{CliError, ConventionArg, OdeArgs, ScanArg, SigmaArgs, EXIT_VIOLATION};

type CmdResult = Result<CommandOutput, CliError>;

pub fn cmd_table(n_lo: i64, n_hi: i64, cfg: &OutputConfig) -> CmdResult {
    if n_lo < 7 || n_lo > n_hi {
        return Err(CliError::usage(format!(
            "table needs 7 <= n_lo <= n_hi, got {n_lo}..{n_hi}"
        )));
    }
    let (bits, d) = (cfg.precision_bits, cfg.sig_digits);
    let mut t = Tabular::new(&[
        ("n", "n"),
        ("yamabe_sphere", "Y(S^n)"),
        ("lambda_min", "Lambda_{n,>=2}"),
        ("lambda_hp2", "lambda_n"),
    ]);
    let mut certs = Vec::new();
    for n in n_lo..=n_hi {
        let y = yamabe_sphere(n, bits)?;
        let m = lambda_lower_min(n, bits)?;
        let h = if n >= 11 { Some(lambda_hp2(n, bits)?.value) } else { None };
        t.push(vec![
            Cell::Int(n),
            Cell::Dec(y.to_decimal(d)),
            Cell::Dec(m.value.to_decimal(d)),
            h.as_ref().map_or(Cell::Empty, |v| Cell::Dec(v.to_decimal(d))),
        ]);
        certs.push(Certificate::new(format!("Y(S^{n})"), &y, d));
        certs.push(Certificate::new(format!("Lambda_{{{n},>=2}}"), &m.value, d));
        if let Some(v) = &h {
            certs.push(Certificate::new(format!("lambda_{n}"), v, d));
        }
    }
    let mut out = CommandOutput::new(
        "table",
        json!({"n_lo": n_lo, "n_hi": n_hi, "digits": d, "precision_bits": bits}),
        t,
    );
    out.certificates = certs;
    Ok(out)
}

fn scan_name(kind: ScanArg) -> &'static str {
    match kind {
        ScanArg::MinK => "min-k",
        ScanArg::Compare => "compare",
        ScanArg::Ratio => "ratio",
    }
}

pub fn cmd_scan(kind: ScanArg, from: i64, to: i64, cfg: &OutputConfig) -> CmdResult {
    let bits = cfg.precision_bits;
    let report = match kind {
        ScanArg::MinK => scan_min_location_at(from, to, bits),
        ScanArg::Compare => compare_series_at(from, to, bits),
        ScanArg::Ratio => ratio_scan_at(from, to, bits),
    }?;
    Ok(scan_output(kind, &report, cfg))
}

fn scan_output(kind: ScanArg, report: &ScanReport, cfg: &OutputConfig) -> CommandOutput {
    let d = cfg.sig_digits;
    let mut t = Tabular::new(&[
        ("n", "n"),
        ("lhs_id", "lhs"),
        ("lhs", "lhs_value"),
        ("relation", "relation"),
        ("rhs_id", "rhs"),
        ("rhs", "rhs_value"),
        ("argmin", "argmin_k"),
    ]);
    let mut certs = Vec::new();
    for e in &report.per_n {
        let (lhs, rhs) = match e.values.as_slice() {
            [a, b, ..] => (Some(a), b),
            [b] => (None, b),
            [] => unreachable!("scan rows carry values"),
        };
        let argmin = e
            .argmin
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        t.push(vec![
            Cell::Int(e.n),
            lhs.map_or(Cell::Empty, |(id, _)| Cell::Text(id.clone())),
            lhs.map_or(Cell::Empty, |(_, v)| Cell::Dec(v.to_decimal(d))),
            Cell::Text(e.relation.symbol().into()),
            Cell::Text(rhs.0.clone()),
            Cell::Dec(rhs.1.to_decimal(d)),
            Cell::Text(argmin),
        ]);
        for (id, v) in &e.values {
            certs.push(Certificate::new(id.clone(), v, d));
        }
    }
    let holds = report.holds();
    let mut out = CommandOutput::new(
        "scan",
        json!({
            "kind": scan_name(kind),
            "from": report.range.0,
            "to": report.range.1,
            "precision_bits": cfg.precision_bits,
            "digits": d,
        }),
        t,
    );
    out.results = Some(json!({
        "holds": holds,
        "violations": report.violations,
        "rows": out.tabular.to_json(),
    }));
    out.certificates = certs;
    out.footer.push(format!(
        "{} violation(s) for n = {}..{}",
        report.violations.len(),
        report.range.0,
        report.range.1
    ));
    for v in &report.violations {
        out.footer.push(format!("violation at n = {}: {}", v.n, v.detail));
    }
    out.diagnostics.push(format!(
        "scan {} {}..{}: {:.3} s",
        scan_name(kind),
        report.range.0,
        report.range.1,
        report.wall_time.as_secs_f64()
    ));
    if !holds {
        out.code = EXIT_VIOLATION;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
struct OdeRun {
    action: &'static str,
    u0: f64,
    bracket: Option<(f64, f64)>,
    bracket_width: Option<f64>,
    iterations: Option<usize>,
    r_split: Option<f64>,
    r_max: f64,
    samples: usize,
    classification: String,
    r_cross: Option<f64>,
}

fn trajectory(sol: &RadialSolution) -> Tabular {
    let mut t = Tabular::new(&[("r", "r"), ("u", "u"), ("du", "du"), ("tau", "tau")]);
    for s in &sol.samples {
        t.push(vec![
            Cell::Float(s.r),
            Cell::Float(s.u),
            Cell::Float(s.du),
            Cell::Float(sol.tau_at(s)),
        ]);
    }
    t
}

fn solver<T>(r: yamabe_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::failure(e.to_string()))
}

pub fn cmd_ode(a: &OdeArgs, cfg: &OutputConfig) -> CmdResult {
    let m = ModelSpace::new(a.n, a.k, a.c)?;
    let mu = a.mu.unwrap_or((a.n * (a.n - 1)) as f64);
    if !(mu.is_finite() && mu > 0.0) {
        return Err(CliError::usage(format!("mu must be positive, got {mu}")));
    }
    if !(a.tol.is_finite() && a.tol > 0.0 && a.tol < 1.0) {
        return Err(CliError::usage(format!("tol must lie in (0, 1), got {}", a.tol)));
    }
    if let Some(r) = a.r_max {
        if !(r.is_finite() && r > 0.0) {
            return Err(CliError::usage(format!("r-max must be positive, got {r}")));
        }
    }
    let bracket = a.shoot.as_ref().map(|v| (v[0], v[1]));
    let action = match (a.integrate, bracket.is_some(), a.check) {
        (_, _, true) if a.integrate => {
            return Err(CliError::usage("--check and --integrate are exclusive"));
        }
        (_, _, true) => "check",
        (true, false, false) => "integrate",
        (false, true, false) => "shoot",
        (true, true, false) => {
            return Err(CliError::usage("--integrate and --shoot are exclusive"));
        }
        (false, false, false) => {
            return Err(CliError::usage("choose one of --integrate, --shoot LO HI, --check"));
        }
    };
    if action == "integrate" && a.u0.is_none() {
        return Err(CliError::usage("--integrate needs --u0"));
    }
    let opts = ShootOptions {
        integrate_tol: a.tol,
        r_max: a.r_max,
        ..ShootOptions::default()
    };
    let r_max = opts.radius(&m);
    let mut notes = Vec::new();
    let integrate_from = |u0: f64| -> Result<(RadialSolution, OdeRun), CliError> {
        let p = RadialProblem::new(m, mu, u0)?;
        let sol = solver(integrate(&p, r_max, a.tol))?;
        let run = OdeRun {
            action,
            u0,
            bracket: None,
            bracket_width: None,
            iterations: None,
            r_split: None,
            r_max,
            samples: 0,
            classification: String::new(),
            r_cross: None,
        };
        Ok((sol, run))
    };
    let shoot_between = |b: (f64, f64)| -> Result<(RadialSolution, OdeRun), CliError> {
        if !(b.0 > 0.0 && b.1 > b.0) {
            return Err(CliError::usage(format!("need 0 < LO < HI, got {} {}", b.0, b.1)));
        }
        let r = solver(shoot_with(&m, mu, b, 1e-12 * b.1, &opts))?;
        let run = OdeRun {
            action,
            u0: r.u0_star,
            bracket: Some(b),
            bracket_width: Some(r.bracket_width),
            iterations: Some(r.iterations),
            r_split: Some(r.r_split),
            r_max,
            samples: 0,
            classification: String::new(),
            r_cross: None,
        };
        Ok((r.solution, run))
    };
    let (sol, mut run) = match (action, bracket, a.u0) {
        ("integrate", _, Some(u0)) => integrate_from(u0)?,
        (_, Some(b), _) => shoot_between(b)?,
        (_, None, Some(u0)) => integrate_from(u0)?,
        _ => match solver(find_bracket(&m, mu, &opts))? {
            Some(b) => shoot_between(b)?,
            None => {
                let u0 = RadialProblem::equilibrium(&m, mu).unwrap_or(1.0);
                notes.push(format!(
                    "no crossing / non-crossing bracket found; integrated from u0 = {u0}"
                ));
                integrate_from(u0)?
            }
        },
    };
    run.samples = sol.samples.len();
    run.classification = sol.classification.label().into();
    if let yamabe_core::yamabe_ode::Classification::Crossing { r_cross } = sol.classification {
        run.r_cross = Some(r_cross);
    }
    let mut verdict = theorem_check(&sol);
    verdict.notes.extend(notes);
    let traj = trajectory(&sol);
    if let Some(path) = &a.trajectory {
        std::fs::write(path, traj.to_csv())
            .map_err(|e| CliError::failure(format!("cannot write {}: {e}", path.display())))?;
    }
    let human = ode_summary(&m, mu, &run, &verdict, cfg.sig_digits);
    let mut out = CommandOutput::new(
        "ode",
        json!({
            "n": a.n, "k": a.k, "c": a.c, "mu": mu, "action": action,
            "u0": a.u0, "bracket": bracket, "tol": a.tol, "r_max": r_max,
        }),
        traj,
    );
    out.results = Some(json!({
        "run": run,
        "verdict": verdict,
        "trajectory": out.tabular.to_json(),
    }));
    out.human = Some(human);
    if verdict.theorem_confirmed == Some(false) {
        out.code = EXIT_VIOLATION;
        out.diagnostics.push("decay dichotomy not confirmed".into());
    }
    Ok(out)
}

fn ode_summary(m: &ModelSpace, mu: f64, run: &OdeRun, v: &TheoremCheck, d: usize) -> String {
    let mc = model_constants(m);
    let f = |x: f64| sig(x, d);
    let o = |x: Option<f64>| x.map_or_else(|| "-".to_string(), f);
    let b = |x: Option<bool>| x.map_or_else(|| "-".to_string(), |b| b.to_string());
    let mut t = Tabular::new(&[("field", "field"), ("value", "value")]);
    let mut row = |k: &str, v: String| t.push(vec![Cell::Text(k.into()), Cell::Text(v)]);
    row("model", format!("n = {}, k = {}, c = {}", m.n(), m.k(), m.c()));
    row("mu", f(mu));
    row("scal", f(mc.scal));
    row("assumption_ok", mc.assumption_ok.to_string());
    row("action", run.action.into());
    row("u0", f(run.u0));
    if let Some((lo, hi)) = run.bracket {
        row("bracket", format!("{} {}", f(lo), f(hi)));
        row("bracket_width", o(run.bracket_width));
        row("iterations", run.iterations.unwrap_or(0).to_string());
        row("r_split", o(run.r_split));
    }
    row("r_max", f(run.r_max));
    row("samples", run.samples.to_string());
    row("classification", run.classification.clone());
    if let Some(r) = run.r_cross {
        row("r_cross", f(r));
    }
    row("tau_inf", o(v.tau_inf));
    row("tau_threshold", f(v.tau_threshold));
    row("sqrt_alpha", f(v.sqrt_alpha));
    row("dichotomy", format!("{:?}", v.dichotomy).to_lowercase());
    row("l2_finite", b(v.l2_finite));
    row("lpn_finite", b(v.lpn_finite));
    row("exponent_b", o(v.exponent_b));
    row("functional_ratio", o(v.functional_ratio));
    row("theorem_applies", v.theorem_applies.to_string());
    row("theorem_confirmed", b(v.theorem_confirmed));
    for n in &v.notes {
        row("note", n.clone());
    }
    t.to_aligned()
}

pub fn cmd_sigma(a: &SigmaArgs, cfg: &OutputConfig) -> CmdResult {
    let class = if let Some(dims) = &a.dims {
        TopoClass::SurgeryChain(dims.clone())
    } else if a.two_connected_spin_boundary {
        TopoClass::TwoConnectedSpinBoundary
    } else if a.alpha_zero {
        TopoClass::TwoConnectedAlphaZero
    } else {
        TopoClass::TwoConnectedAlphaNonzero
    };
    let input = TopoInput { n: a.n, class };
    let r = topo_bound(&input, cfg.precision_bits)?;
    let d = cfg.sig_digits;
    let (status, value) = match &r.value {
        BoundValue::Interval(v) => ("interval", Cell::Dec(v.to_decimal(d))),
        BoundValue::Zero => ("zero", Cell::Dec("0".into())),
        BoundValue::NotCovered => ("not_covered", Cell::Empty),
    };
    let mut t = Tabular::new(&[("id", "term"), ("value", "value"), ("minimum", "minimum")]);
    let mut certs = Vec::new();
    for term in &r.trail {
        let is_min = r.argmin.as_deref() == Some(term.id.as_str());
        t.push(vec![
            Cell::Text(term.id.clone()),
            Cell::Dec(term.value.to_decimal(d)),
            Cell::Bool(is_min),
        ]);
        certs.push(Certificate::new(term.id.clone(), &term.value, d));
    }
    if let Some(v) = r.interval() {
        certs.insert(0, Certificate::new("sigma_lower_bound", v, d));
    }
    let class_name = match &input.class {
        TopoClass::SurgeryChain(_) => "surgery_chain",
        TopoClass::TwoConnectedSpinBoundary => "two_connected_spin_boundary",
        TopoClass::TwoConnectedAlphaZero => "two_connected_alpha_zero",
        TopoClass::TwoConnectedAlphaNonzero => "two_connected_alpha_nonzero",
    };
    let dims = match &input.class {
        TopoClass::SurgeryChain(d) => Some(d.clone()),
        _ => None,
    };
    let mut out = CommandOutput::new(
        "sigma",
        json!({"n": a.n, "class": class_name, "dims": dims, "precision_bits": cfg.precision_bits, "digits": d}),
        t,
    );
    out.results = Some(json!({
        "status": status,
        "value": value.json(),
        "argmin": r.argmin,
        "trail": out.tabular.to_json(),
        "note": r.note,
    }));
    let mut human = format!("sigma(M^{}) lower bound: ", a.n);
    human.push_str(&match status {
        "interval" => value.text(),
        "zero" => "sigma = 0".into(),
        _ => "not covered".into(),
    });
    human.push('\n');
    if let Some(n) = &r.note {
        human.push_str(n);
        human.push('\n');
    }
    if !r.trail.is_empty() {
        human.push_str(&out.tabular.to_aligned());
    }
    out.human = Some(human);
    out.certificates = certs;
    Ok(out)
}

pub fn cmd_counterexample(n: i64, conv: ConventionArg, cfg: &OutputConfig) -> CmdResult {
    let conv = match conv {
        ConventionArg::Derived => FConvention::Derived,
        ConventionArg::PaperStated => FConvention::PaperStated,
    };
    let r = counterexample_report(n, conv)?;
    let d = cfg.sig_digits;
    let mut t = Tabular::new(&[
        ("germ", "germ"),
        ("exponent", "exponent"),
        ("codim", "codim"),
    ]);
    let green = green_normalization(n, cfg.precision_bits)?;
    let green_const = green.to_decimal(d);
    for (name, g) in [("green", &r.green), ("h", &r.h), ("f", &r.f), ("u", &r.u)] {
        t.push(vec![
            Cell::Text(name.into()),
            Cell::Text(g.a.to_string()),
            Cell::Int(g.codim),
        ]);
    }
    let mut results = serde_json::to_value(&r).expect("serializable");
    results["green_constant"] = serde_json::to_value(green.certificate(d)).expect("serializable");
    let mut out = CommandOutput::new(
        "counterexample",
        json!({"n": n, "convention": conv.label()}),
        t,
    );
    out.results = Some(results);
    out.certificates = vec![Certificate::new("green_normalization", &green, d)];
    out.footer = vec![
        format!("p_n = {}", r.p_n),
        format!("green constant = {green_const}"),
        format!("u in L^p_n: {}", r.verdict_lpn),
        format!("u in L^2 ({}): {}", conv.label(), r.verdict_l2),
        format!("discrepancy: {}", r.discrepancy_flag),
    ];
    Ok(out)
}
