use crate::report::Report;
use crate::{parse, Cli, Command, GridOpts, IndexKind, Inputs};
use anyhow::{anyhow, bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::Path;
use std::time::Instant;
use ultraweight::constructions::{
    associated_matrix, check_descendant_mg, descendant, kappa_alt_form, kappa_power_normalized, kappa_r,
    reduction_build, DEFAULT_LEVELS,
};
use ultraweight::functions::{
    check_implication_chain, check_omega_condition_on, check_omega_nq_r_on, compare_o_on, compare_preceq_on,
    equivalent_fun_on, OmegaCondition,
};
use ultraweight::indices::{
    gamma_index_fun_with, gamma_index_seq_with, mixed_condition_fun_on, mixed_condition_seq, mu_fun_with,
    mu_seq_with, BisectOptions,
};
use ultraweight::sequences::{
    check_beta1, check_beta3, check_gamma1, check_lc, check_mg, check_nq, check_nq_r, check_slc, compare,
    RelationKind,
};
use ultraweight::{ConditionVerdict, Error, Gamma1Witness, TGrid, WeightFunction, WeightSequence};

pub const EXIT_PARSE: u8 = 64;
pub const EXIT_PRECONDITION: u8 = 65;
pub const EXIT_OTHER: u8 = 70;

pub const GRID_POINTS_ENV: &str = "ULTRAWEIGHT_GRID_POINTS";

/// Marks errors caused by malformed input.
#[derive(Debug)]
struct ParseError(anyhow::Error);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for ParseError {}

fn bad_input(e: anyhow::Error) -> anyhow::Error {
    anyhow::Error::new(ParseError(e))
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ParseError>().is_some() {
        return EXIT_PARSE;
    }
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::InvalidSpec(_) | Error::InvalidArgument(_)) => EXIT_PARSE,
        Some(
            Error::NotLogConvex(_)
            | Error::DivergentAssociated(_)
            | Error::NotNonQuasianalytic(_)
            | Error::NotNormalized(_)
            | Error::GammaNotAboveOne
            | Error::PreconditionInconclusive(_)
            | Error::ConvexityViolation { .. },
        ) => EXIT_PRECONDITION,
        _ => EXIT_OTHER,
    }
}

pub fn run(cli: Cli) -> u8 {
    let start = Instant::now();
    let mut csv_to_stdout = false;
    let result = execute(&cli.command, &mut csv_to_stdout);
    match result {
        Ok(mut report) => {
            report.wall_time_ms = start.elapsed().as_millis() as u64;
            let json = report.to_json();
            if let Some(path) = &cli.report {
                if let Err(e) = std::fs::write(path, &json) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return EXIT_OTHER;
                }
            }
            if !cli.quiet && !csv_to_stdout {
                println!("{json}");
            }
            report.exit_code()
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code_for(&err)
        }
    }
}

fn grid(opts: &GridOpts) -> Result<TGrid> {
    let default = TGrid::default();
    let points = match std::env::var(GRID_POINTS_ENV) {
        Ok(v) => v.parse::<usize>().map_err(|e| bad_input(anyhow!("{GRID_POINTS_ENV}={v}: {e}")))?,
        Err(_) => default.points,
    };
    TGrid::new(opts.tmin.unwrap_or(default.t_min), opts.tmax.unwrap_or(default.t_max), points)
        .map_err(|e| bad_input(e.into()))
}

fn seq(text: &str, opts: &GridOpts) -> Result<WeightSequence> {
    let spec = parse::sequence(text).map_err(bad_input)?;
    let m = spec.build()?;
    Ok(match opts.pmax {
        Some(p) => m.with_p_max(p),
        None => m,
    })
}

fn fun(text: &str) -> Result<WeightFunction> {
    let spec = parse::function(text).map_err(bad_input)?;
    Ok(spec.build()?)
}

fn need<'a>(value: &'a Option<String>, flag: &str) -> Result<&'a str> {
    value.as_deref().ok_or_else(|| bad_input(anyhow!("missing --{flag}")))
}

fn execute(cmd: &Command, csv_to_stdout: &mut bool) -> Result<Report> {
    match cmd {
        Command::Check { inputs, grid: g, conditions, r } => check(inputs, g, conditions, *r),
        Command::Index { kind, inputs, grid: g, tol } => index(*kind, inputs, g, *tol),
        Command::Descend { inputs, grid: g, r, out } => descend(inputs, g, *r, out.as_deref()),
        Command::Reduce { inputs, n, witness, out } => reduce(inputs, *n, witness, out.as_deref()),
        Command::Matrix { inputs, levels, jmax, out } => matrix(inputs, levels, *jmax, out.as_deref()),
        Command::Kappa { inputs, r, normalized, out } => kappa(inputs, *r, *normalized, out.as_deref()),
        Command::Sample { inputs, grid: g, n, random, seed, out } => {
            *csv_to_stdout = out.is_none();
            sample(inputs, g, *n, *random, *seed, out.as_deref())
        }
        Command::Report { inputs, grid: g, tol } => full_report(inputs, g, *tol),
    }
}

fn require_r(r: Option<f64>, name: &str) -> Result<f64> {
    r.ok_or_else(|| bad_input(anyhow!("condition {name} needs --r")))
}

fn sequence_condition(m: &WeightSequence, name: &str, r: Option<f64>) -> Result<ConditionVerdict> {
    Ok(match name {
        "lc" => check_lc(m),
        "slc" => check_slc(m),
        "mg" => check_mg(m),
        "nq" => check_nq(m),
        "nq_r" => check_nq_r(m, require_r(r, name)?),
        "gamma1" => check_gamma1(m),
        "beta1" => check_beta1(m),
        "beta3" => check_beta3(m),
        other => bail!(bad_input(anyhow!("unknown sequence condition `{other}`"))),
    })
}

const SEQUENCE_CONDITIONS: [&str; 7] = ["lc", "slc", "mg", "nq", "gamma1", "beta1", "beta3"];

fn relation(name: &str) -> Option<RelationKind> {
    match name {
        "precsim" => Some(RelationKind::Precsim),
        "vartriangleleft" => Some(RelationKind::Vartriangleleft),
        "equivalent" => Some(RelationKind::Equivalent),
        _ => None,
    }
}

fn check(inputs: &Inputs, g: &GridOpts, conditions: &[String], r: Option<f64>) -> Result<Report> {
    let mut report = Report::new("check");
    let tg = grid(g)?;
    let names = |defaults: &[&str]| -> Vec<String> {
        if conditions.is_empty() {
            let mut v: Vec<String> = defaults.iter().map(|s| s.to_string()).collect();
            if r.is_some() {
                v.push("mixed".into());
            }
            v
        } else {
            conditions.iter().map(|s| s.trim().to_ascii_lowercase()).collect()
        }
    };
    if let (Some(ms), Some(ns)) = (&inputs.m, &inputs.n_seq) {
        let (m, n) = (seq(ms, g)?, seq(ns, g)?);
        report.input("M", m.to_spec());
        report.input("N", n.to_spec());
        for name in names(&["precsim", "vartriangleleft", "equivalent"]) {
            if name == "mixed" {
                let r = require_r(r, &name)?;
                report.verdict(&format!("mixed_r={r}"), &mixed_condition_seq(&m, &n, r));
            } else {
                let kind = relation(&name).ok_or_else(|| bad_input(anyhow!("unknown relation `{name}`")))?;
                let rel = compare(&m, &n, kind);
                report.verdict(&name, &rel.verdict.clone().with_witness("ratio", rel.witness));
                report.note(format!("{name}: {}", rel.convention));
            }
        }
        return Ok(report);
    }
    if let (Some(ss), Some(os)) = (&inputs.sigma, &inputs.omega) {
        let (s, w) = (fun(ss)?, fun(os)?);
        report.input("sigma", s.to_spec());
        report.input("omega", w.to_spec());
        report.input("grid", tg);
        for name in names(&["preceq", "o", "equivalent"]) {
            let v = match name.as_str() {
                "preceq" => compare_preceq_on(&s, &w, &tg),
                "o" => compare_o_on(&s, &w, &tg),
                "equivalent" => equivalent_fun_on(&s, &w, &tg),
                "mixed" => mixed_condition_fun_on(&s, &w, require_r(r, &name)?, &tg),
                other => bail!(bad_input(anyhow!("unknown pair condition `{other}`"))),
            };
            report.verdict(&name, &v);
        }
        return Ok(report);
    }
    if let Some(text) = inputs.sequence.as_ref().or(inputs.m.as_ref()) {
        let m = seq(text, g)?;
        report.input("sequence", m.to_spec());
        report.input("range", m.range());
        for w in m.warnings() {
            report.note(w.clone());
        }
        let mut defaults: Vec<&str> = SEQUENCE_CONDITIONS.to_vec();
        if r.is_some() {
            defaults.push("nq_r");
        }
        let list = if conditions.is_empty() { defaults.iter().map(|s| s.to_string()).collect() } else { names(&[]) };
        for name in list {
            let v = sequence_condition(&m, &name, r)?;
            report.verdict(&name, &v);
        }
        return Ok(report);
    }
    if let Some(text) = &inputs.omega {
        let w = fun(text)?;
        report.input("omega", w.to_spec());
        report.input("grid", tg);
        let list: Vec<String> = if conditions.is_empty() {
            let mut v: Vec<String> = OmegaCondition::ALL.iter().map(|c| c.name().to_string()).collect();
            if r.is_some() {
                v.push("omega_nq_r".into());
            }
            v
        } else {
            names(&[])
        };
        for name in list {
            let v = if name == "omega_nq_r" {
                check_omega_nq_r_on(&w, require_r(r, &name)?, &tg)
            } else {
                let c: OmegaCondition = name.parse().map_err(|e: Error| bad_input(e.into()))?;
                check_omega_condition_on(&w, c, &tg)
            };
            report.verdict(&name, &v);
        }
        return Ok(report);
    }
    Err(bad_input(anyhow!("give --sequence, --omega, --M with --N, or --sigma with --omega")))
}

fn options(tol: f64) -> Result<BisectOptions> {
    if !(tol > 0.0) {
        return Err(bad_input(anyhow!("--tol must be positive")));
    }
    Ok(BisectOptions { tol, ..BisectOptions::default() })
}

fn index(kind: IndexKind, inputs: &Inputs, g: &GridOpts, tol: f64) -> Result<Report> {
    let mut report = Report::new("index");
    let opts = options(tol)?;
    let tg = grid(g)?;
    let est = match kind {
        IndexKind::Mu => {
            if let Some(text) = inputs.sequence.as_ref().or(inputs.n_seq.as_ref()) {
                let n = seq(text, g)?;
                report.input("sequence", n.to_spec());
                mu_seq_with(&n, &opts)?
            } else {
                let w = fun(need(&inputs.omega, "omega")?)?;
                report.input("omega", w.to_spec());
                report.input("grid", tg);
                mu_fun_with(&w, &opts, &tg)
            }
        }
        IndexKind::Gamma => {
            if let Some(ms) = inputs.m.as_ref().or(inputs.sequence.as_ref()) {
                let m = seq(ms, g)?;
                let n = match &inputs.n_seq {
                    Some(ns) => seq(ns, g)?,
                    None => m.clone(),
                };
                report.input("M", m.to_spec());
                report.input("N", n.to_spec());
                gamma_index_seq_with(&m, &n, &opts)
            } else {
                let w = fun(need(&inputs.omega, "omega")?)?;
                let s = match &inputs.sigma {
                    Some(ss) => fun(ss)?,
                    None => w.clone(),
                };
                report.input("sigma", s.to_spec());
                report.input("omega", w.to_spec());
                report.input("grid", tg);
                gamma_index_fun_with(&s, &w, &opts, &tg)
            }
        }
    };
    report.diagnostics.extend(est.diagnostics.iter().cloned());
    report.value("estimate", &est);
    Ok(report)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn descend(inputs: &Inputs, g: &GridOpts, r: f64, out: Option<&Path>) -> Result<Report> {
    let mut report = Report::new("descend");
    let text = inputs.sequence.as_ref().or(inputs.n_seq.as_ref()).ok_or_else(|| bad_input(anyhow!("missing --sequence")))?;
    let n = seq(text, g)?;
    report.input("sequence", n.to_spec());
    report.input("r", r);
    let d = descendant(&n, r)?;
    report.value("tau_1", d.tau_1);
    report.value("sigma", &d.sigma_head);
    report.value("lambda_nu_bound", d.lambda_nu_bound);
    report.value("range", d.range);
    report.value("descendant", d.s.to_spec());
    report.verdict("slc", &d.slc);
    report.verdict(&format!("mixed_L_N_r={r}"), &d.mixed_at_r);
    report.verdict("descendant_mg", &check_descendant_mg(&n, r));
    if d.tail_fitted {
        report.note("tail sums completed with a fitted quotient law");
    }
    if let Some(path) = out {
        write_json(path, &d.s.to_spec())?;
        report.note(format!("descendant spec written to {}", path.display()));
    }
    Ok(report)
}

fn reduce(inputs: &Inputs, n: usize, witness: &[f64], out: Option<&Path>) -> Result<Report> {
    let mut report = Report::new("reduce");
    let s = fun(need(&inputs.sigma, "sigma")?)?;
    let w = fun(need(&inputs.omega, "omega")?)?;
    let f = fun(need(&inputs.f, "f")?)?;
    report.input("sigma", s.to_spec());
    report.input("omega", w.to_spec());
    report.input("f", f.to_spec());
    report.input("n", n);
    let given = match witness {
        [] => None,
        [c, k, h, t0] => Some(Gamma1Witness { c: *c, k: *k, h: *h, t0: *t0, j_max: 30, t_max: 1e8 }),
        _ => return Err(bad_input(anyhow!("--witness takes C,K,H,t0"))),
    };
    if let Some(wit) = given {
        report.input("witness", wit);
    }
    let res = reduction_build(&s, &w, &f, n, given)?;
    let violations = res.sandwich_violations();
    let sandwich = if violations == 0 {
        ConditionVerdict::satisfied([("violations", 0.0), ("segments", res.segments.len() as f64)])
    } else {
        let first = res.segments.iter().find(|s| s.omega_sandwich_violations + s.sigma_sandwich_violations > 0);
        ConditionVerdict::violated(first.map_or(f64::NAN, |s| s.lo), violations as f64, "sandwich inequality fails")
    };
    report.verdict("sandwich", &sandwich);
    let continuity = if res.continuity_max_rel <= 1e-9 {
        ConditionVerdict::satisfied([("max_rel", res.continuity_max_rel)])
    } else {
        ConditionVerdict::violated(f64::NAN, res.continuity_max_rel, "glued weights jump at a breakpoint")
    };
    report.verdict("continuity", &continuity);
    report.verdict("output_condition", &res.output_condition);
    if let Some(v) = &res.omega1_preserved {
        report.verdict("omega1_preserved", v);
    }
    report.diagnostics.extend(res.diagnostics.iter().cloned());
    report.value("reduction", &res);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_json(&dir.join("omega_tilde.json"), &res.omega_tilde.to_spec())?;
        write_json(&dir.join("sigma_tilde.json"), &res.sigma_tilde.to_spec())?;
        let last = *res.breakpoints.last().expect("breakpoints");
        let ts = geometric(1e-2, 10.0 * last, 400);
        write_function_csv(&dir.join("omega_tilde.csv"), &res.omega_tilde, &ts)?;
        write_function_csv(&dir.join("sigma_tilde.csv"), &res.sigma_tilde, &ts)?;
        report.note(format!("specs and samples written to {}", dir.display()));
    }
    Ok(report)
}

fn matrix(inputs: &Inputs, levels: &[f64], jmax: usize, out: Option<&Path>) -> Result<Report> {
    let mut report = Report::new("matrix");
    let w = fun(need(&inputs.omega, "omega")?)?;
    let levels = if levels.is_empty() { DEFAULT_LEVELS.to_vec() } else { levels.to_vec() };
    report.input("omega", w.to_spec());
    report.input("levels", &levels);
    report.input("jmax", jmax);
    let mat = associated_matrix(&w, &levels, jmax)?;
    report.diagnostics.extend(mat.diagnostics.iter().cloned());
    report.value("matrix", &mat);
    if let Some(path) = out {
        let mut wtr = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        wtr.write_record(["j", "l", "W"])?;
        for (j, l, v) in mat.table() {
            wtr.write_record([j.to_string(), l.to_string(), format!("{v:e}")])?;
        }
        wtr.flush()?;
        report.note(format!("matrix written to {}", path.display()));
    }
    Ok(report)
}

fn kappa(inputs: &Inputs, r: f64, normalized: bool, out: Option<&Path>) -> Result<Report> {
    let mut report = Report::new("kappa");
    let w = fun(need(&inputs.omega, "omega")?)?;
    report.input("omega", w.to_spec());
    report.input("r", r);
    report.input("normalized", normalized);
    let k = if normalized { kappa_power_normalized(&w, r)? } else { kappa_r(&w, r)? };
    report.value("kappa", k.to_spec());
    let ts = [1.0, 10.0, 100.0, 1e3, 1e6];
    let values: Vec<(f64, f64)> = ts.iter().map(|t| (*t, k.at(*t))).collect();
    report.value("values", &values);
    if r == 1.0 && !normalized {
        let alt: Vec<(f64, f64)> = ts.iter().map(|t| Ok((*t, kappa_alt_form(&w, *t)?))).collect::<Result<_>>()?;
        let worst = values.iter().zip(&alt).map(|((_, a), (_, b))| (a - b).abs() / b.abs().max(1e-300)).fold(0.0, f64::max);
        report.value("alt_form", &alt);
        report.value("forms_max_rel_diff", worst);
    }
    let r_prime = 0.95 * r;
    report.verdict(&format!("mixed_r={r_prime}"), &mixed_condition_fun_on(&k, &w, r_prime, &TGrid::default()));
    if let Some(path) = out {
        write_json(path, &k.to_spec())?;
        report.note(format!("kappa spec written to {}", path.display()));
    }
    Ok(report)
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == n => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

fn write_function_csv(path: &Path, w: &WeightFunction, ts: &[f64]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    wtr.write_record(["t", "value"])?;
    for t in ts {
        wtr.write_record([format!("{t:e}"), format!("{:e}", w.at(*t))])?;
    }
    wtr.flush()?;
    Ok(())
}

fn sample(inputs: &Inputs, g: &GridOpts, n: usize, random: bool, seed: u64, out: Option<&Path>) -> Result<Report> {
    let mut report = Report::new("sample");
    if n == 0 {
        return Err(bad_input(anyhow!("--n must be positive")));
    }
    report.input("n", n);
    report.input("random", random);
    report.input("seed", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf: Vec<u8> = Vec::new();
    {
        let mut wtr = csv::Writer::from_writer(&mut buf);
        if let Some(text) = inputs.sequence.as_ref().or(inputs.m.as_ref()) {
            let m = seq(text, g)?;
            report.input("sequence", m.to_spec());
            let top = g.pmax.unwrap_or(n - 1).min(m.max_index().unwrap_or(usize::MAX));
            let mut ps: Vec<usize> = if random {
                (0..n).map(|_| rng.gen_range(0..=top)).collect()
            } else {
                (0..n.min(top + 1)).collect()
            };
            ps.sort_unstable();
            wtr.write_record(["p", "log_value"])?;
            for p in ps {
                wtr.write_record([p.to_string(), format!("{:e}", m.log_value(p))])?;
            }
        } else {
            let w = fun(need(&inputs.omega, "omega")?)?;
            report.input("omega", w.to_spec());
            let tg = grid(g)?;
            let ts = if random {
                let (a, b) = (tg.t_min.ln(), tg.t_max.ln());
                let mut ts: Vec<f64> = (0..n).map(|_| rng.gen_range(a..=b).exp()).collect();
                ts.sort_by(|x, y| x.total_cmp(y));
                ts
            } else {
                geometric(tg.t_min, tg.t_max, n)
            };
            wtr.write_record(["t", "value"])?;
            for t in ts {
                wtr.write_record([format!("{t:e}"), format!("{:e}", w.eval(t)?)])?;
            }
        }
        wtr.flush()?;
    }
    match out {
        Some(path) => {
            std::fs::write(path, &buf).with_context(|| format!("writing {}", path.display()))?;
            report.note(format!("samples written to {}", path.display()));
        }
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(report)
}

fn full_report(inputs: &Inputs, g: &GridOpts, tol: f64) -> Result<Report> {
    let mut report = Report::new("report");
    let opts = options(tol)?;
    if let Some(text) = &inputs.sequence {
        let m = seq(text, g)?;
        report.input("sequence", m.to_spec());
        for name in SEQUENCE_CONDITIONS {
            report.verdict(name, &sequence_condition(&m, name, None)?);
        }
        match mu_seq_with(&m, &opts) {
            Ok(est) => report.value("mu", &est),
            Err(e) => report.note(format!("mu not computed: {e}")),
        }
        report.value("gamma", &gamma_index_seq_with(&m, &m, &opts));
        return Ok(report);
    }
    let w = fun(need(&inputs.omega, "omega or --sequence")?)?;
    let tg = grid(g)?;
    report.input("omega", w.to_spec());
    report.input("grid", tg);
    for (c, v) in check_implication_chain(&w, &tg)? {
        report.verdict(c.name(), &v);
    }
    report.value("mu", &mu_fun_with(&w, &opts, &tg));
    report.value("gamma", &gamma_index_fun_with(&w, &w, &opts, &tg));
    Ok(report)
}
