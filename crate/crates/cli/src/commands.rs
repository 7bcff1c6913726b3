use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use serde_json::{json, Value};

use nicety::check::Certificate;
use nicety::density::{apply_operator, kernel_vector, min_singular_oracle, span_is_dense, PerturbationPair, Verdict};
use nicety::lab::{
    check_fge1, module_approximate, random_approx_instance, random_module, vanishing_characters, ApproxOptions,
    LabError,
};
use nicety::lemmas::{
    balanced_mass_with, boundary_bump, prescribe_derivative, random_bump_spec, random_prescribe_instance,
    BalanceOptions, BumpSpec, LemmaError, Selection,
};
use nicety::pipeline::{
    build_tower, default_test_functions, nonniceness_certificate, norm_bound_suite, CertificateOptions, PipelineError,
    PipelineTower, TowerMode, VectorFn,
};
use nicety::pw::io::sample_csv;
use nicety::pw::{svc_set, PiecewiseFn, SetFn};
use nicety::scalar::parse_rational;
use nicety::{Scalar, Q};

use crate::{Cli, Command, ModeArg, TowerArgs};

/// Below this the singular-value oracle calls an operator singular.
const SIGMA_FLOOR: f64 = 1e-8;
/// Tolerance on `(I + T)v` for a reported kernel vector.
const KERNEL_TOL: f64 = 1e-12;

pub enum RunError {
    Usage(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for RunError {
    fn from(e: anyhow::Error) -> Self {
        RunError::Other(e)
    }
}

pub enum Outcome {
    Passed,
    Failed(Vec<String>),
    Infeasible { message: String, required_depth: Option<u32> },
}

impl Outcome {
    fn from_failures(failures: Vec<String>) -> Self {
        if failures.is_empty() {
            Outcome::Passed
        } else {
            Outcome::Failed(failures)
        }
    }

    pub fn report(self) -> ExitCode {
        match self {
            Outcome::Passed => {
                println!("PASS");
                ExitCode::SUCCESS
            }
            Outcome::Failed(failures) => {
                println!("FAIL: {} check(s) failed", failures.len());
                for f in failures {
                    println!("  - {f}");
                }
                ExitCode::from(1)
            }
            Outcome::Infeasible { message, required_depth } => {
                println!("INFEASIBLE: {message}");
                match required_depth {
                    Some(d) => println!("hint: increase depth to at least {d}"),
                    None => println!("hint: increase depth"),
                }
                ExitCode::from(2)
            }
        }
    }
}

fn failed_checks(c: &Certificate) -> Vec<String> {
    c.failures().map(|f| f.name.clone()).collect()
}

fn parse_q(name: &str, s: &str) -> Result<Q, RunError> {
    parse_rational(s).map_err(|_| RunError::Usage(format!("--{name}: cannot parse '{s}' as a number")))
}

fn parse_scalar<S: Scalar>(name: &str, s: &str) -> Result<S, RunError> {
    S::parse_decimal(s).map_err(|_| RunError::Usage(format!("--{name}: cannot parse '{s}' as a number")))
}

fn parse_list<S: Scalar>(name: &str, s: &str) -> Result<Vec<S>, RunError> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(|x| parse_scalar(name, x.trim())).collect()
}

fn positive_eps(s: &str) -> Result<Q, RunError> {
    let eps = parse_q("eps", s)?;
    if eps <= Q::from_i64(0) {
        return Err(RunError::Usage("--eps must be positive".into()));
    }
    Ok(eps)
}

struct Output<'a> {
    cli: &'a Cli,
    name: &'static str,
}

impl Output<'_> {
    fn write(&self, file: &Path, contents: &str) -> Result<(), RunError> {
        let path = self.cli.out_dir.join(file);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn json(&self, report: &str) -> Result<(), RunError> {
        let file = self.cli.json.clone().unwrap_or_else(|| format!("{}.json", self.name).into());
        self.write(&file, &format!("{report}\n"))
    }

    fn json_value(&self, report: &Value) -> Result<(), RunError> {
        self.json(&serde_json::to_string_pretty(report).expect("plain data serializes"))
    }

    fn csv<S: Scalar>(&self, f: &PiecewiseFn<S>) -> Result<(), RunError> {
        match &self.cli.csv {
            Some(file) => self.write(file, &sample_csv(f, self.cli.csv_points as usize)),
            None => Ok(()),
        }
    }

    fn no_csv(&self) -> Result<(), RunError> {
        match &self.cli.csv {
            Some(_) => Err(RunError::Usage(format!("{} has no function to sample; drop --csv", self.name))),
            None => Ok(()),
        }
    }

    fn exact_only(&self) -> Result<(), RunError> {
        match self.cli.mode {
            ModeArg::Exact => Ok(()),
            ModeArg::Float => Err(RunError::Usage(format!("{} runs in exact arithmetic only", self.name))),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, RunError> {
    match &cli.command {
        Command::Cantor(a) => cantor(&Output { cli, name: "cantor" }, a.depth),
        Command::Lemma57(a) => {
            let out = Output { cli, name: "lemma57" };
            let spec = match a.seed {
                Some(seed) => random_bump_spec(seed),
                None => BumpSpec {
                    alpha: parse_q("alpha", &a.alpha)?,
                    beta: parse_q("beta", &a.beta)?,
                    a: parse_q("slope-a", &a.slope_a)?,
                    b: parse_q("slope-b", &a.slope_b)?,
                    eps: parse_q("eps", &a.eps)?,
                },
            };
            spec.validate().map_err(|e| RunError::Usage(e.to_string()))?;
            match cli.mode {
                ModeArg::Exact => lemma57(&out, spec),
                ModeArg::Float => lemma57(&out, map_spec(&spec, Q::to_f64)),
            }
        }
        Command::Lemma58(a) => lemma58(&Output { cli, name: "lemma58" }, a.depth, &a.eps, a.seed),
        Command::Lemma59(a) => lemma59(&Output { cli, name: "lemma59" }, a.depth, &a.eps, a.norm_only),
        Command::Density(a) => {
            let out = Output { cli, name: "density" };
            match cli.mode {
                ModeArg::Exact => density::<Q>(&out, &a.gamma, &a.delta),
                ModeArg::Float => density::<f64>(&out, &a.gamma, &a.delta),
            }
        }
        Command::Tower(a) => tower(&Output { cli, name: "tower" }, a),
        Command::Certify(a) => certify(&Output { cli, name: "certify" }, a),
        Command::Discrete(a) => discrete(&Output { cli, name: "discrete" }, a.seed, a.modules, a.instances),
    }
}

fn map_spec<S: Scalar>(s: &BumpSpec<Q>, f: impl Fn(&Q) -> S) -> BumpSpec<S> {
    BumpSpec { alpha: f(&s.alpha), beta: f(&s.beta), a: f(&s.a), b: f(&s.b), eps: f(&s.eps) }
}

fn cantor(out: &Output, depth: u32) -> Result<Outcome, RunError> {
    out.exact_only()?;
    let k = svc_set(depth).map_err(|e| RunError::Usage(e.to_string()))?;
    let expected = Q::from_frac(1, 2) + Q::pow2_neg(depth + 1);
    let measure = k.measure();
    println!("svc_set({depth}): {} components, measure {}", k.len(), measure.to_decimal_string());
    if k.len() <= 16 {
        for (l, r) in k.components() {
            println!("  [{}, {}]", l.to_decimal_string(), r.to_decimal_string());
        }
    }
    let passed = measure == expected;
    out.json_value(&json!({
        "schema": "cantor_v1",
        "depth": depth,
        "set": k.to_json_value(),
        "expected_measure": expected.to_decimal_string(),
        "measure_matches": passed,
    }))?;
    out.csv(&k.indicator().to_piecewise())?;
    Ok(Outcome::from_failures(if passed { vec![] } else { vec!["measure = 1/2 + 2^-(depth+1)".into()] }))
}

fn lemma57<S: Scalar>(out: &Output, spec: BumpSpec<S>) -> Result<Outcome, RunError> {
    let bump = boundary_bump(&spec).map_err(|e| RunError::Usage(e.to_string()))?;
    let cert = bump.certificate();
    println!(
        "bump on [{}, {}], slopes {} / {}, delta {}, sup|f| = {:e} (eps {})",
        spec.alpha.to_decimal_string(),
        spec.beta.to_decimal_string(),
        spec.a.to_decimal_string(),
        spec.b.to_decimal_string(),
        bump.delta.to_decimal_string(),
        bump.sup_abs(),
        spec.eps.to_decimal_string(),
    );
    let unit = bump.to_unit_fn().ok();
    out.json_value(&json!({
        "schema": "lemma57_v1",
        "mode": S::MODE,
        "spec": {
            "alpha": spec.alpha.to_decimal_string(),
            "beta": spec.beta.to_decimal_string(),
            "a": spec.a.to_decimal_string(),
            "b": spec.b.to_decimal_string(),
            "eps": spec.eps.to_decimal_string(),
        },
        "delta": bump.delta.to_decimal_string(),
        "sup_abs": bump.sup_abs(),
        "function": unit.as_ref().map(|f| f.to_json_value()),
        "certificate": cert,
    }))?;
    if out.cli.csv.is_some() {
        let f = unit.ok_or_else(|| RunError::Usage("CSV needs [alpha, beta] inside [0, 1]".into()))?;
        out.csv(&f)?;
    }
    Ok(Outcome::from_failures(failed_checks(&cert)))
}

fn lemma58(out: &Output, depth: u32, eps: &str, seed: Option<u64>) -> Result<Outcome, RunError> {
    out.exact_only()?;
    let (k, a, f, eps) = match seed {
        Some(seed) => random_prescribe_instance(seed),
        None => {
            let k = svc_set(depth).map_err(|e| RunError::Usage(e.to_string()))?;
            let a = SetFn::constant(k.clone(), Q::from_i64(1));
            (k, a, PiecewiseFn::zero(), positive_eps(eps)?)
        }
    };
    let p = match prescribe_derivative(&k, &a, &f, &eps) {
        Ok(p) => p,
        Err(e @ LemmaError::CoverInfeasible { .. }) => {
            return Ok(Outcome::Infeasible { message: e.to_string(), required_depth: None })
        }
        Err(e) => return Err(RunError::Usage(e.to_string())),
    };
    let cert = p.certificate();
    let dist = p.g.sub(&f).segment().sup_abs();
    println!(
        "K: {} components; cover of {} intervals, delta {}; sup|g - f| = {dist:e} (eps {})",
        k.len(),
        p.cover.len(),
        p.delta.to_decimal_string(),
        eps.to_decimal_string()
    );
    out.json_value(&json!({
        "schema": "lemma58_v1",
        "seed": seed,
        "k_components": k.len(),
        "k_measure": k.measure().to_decimal_string(),
        "eps": eps.to_decimal_string(),
        "delta": p.delta.to_decimal_string(),
        "h_norm_bound": p.h_norm.to_decimal_string(),
        "cover_intervals": p.cover.len(),
        "g_pieces": p.g.num_pieces(),
        "sup_g_minus_f": dist,
        "certificate": cert,
    }))?;
    out.csv(&p.g)?;
    Ok(Outcome::from_failures(failed_checks(&cert)))
}

fn lemma59(out: &Output, depth: u32, eps: &str, norm_only: bool) -> Result<Outcome, RunError> {
    out.exact_only()?;
    let k = svc_set(depth).map_err(|e| RunError::Usage(e.to_string()))?;
    let eps = positive_eps(eps)?;
    let selection = if norm_only { Selection::NormOnly } else { Selection::PaperBounds };
    let opts = BalanceOptions { min_zone: 1, selection };
    let r = match balanced_mass_with(&k, &eps, opts) {
        Ok(r) => r,
        Err(LemmaError::Infeasible { eps, required_depth, .. }) => {
            return Ok(Outcome::Infeasible {
                message: format!("no block selection on svc_set({depth}) meets the bounds for eps = {eps:e}"),
                required_depth,
            })
        }
        Err(e) => return Err(RunError::Usage(e.to_string())),
    };
    println!(
        "{} block(s), zones of {} component(s), |B + chi|_2 = {:e} (eps {})",
        r.n_blocks,
        r.zone_size,
        r.residual_norm(),
        eps.to_decimal_string()
    );
    let mut failures = failed_checks(&r.contract);
    if selection == Selection::PaperBounds {
        failures.extend(failed_checks(&r.paper_bounds));
    }
    out.json_value(&json!({
        "schema": "lemma59_v1",
        "depth": depth,
        "eps": eps.to_decimal_string(),
        "selection": selection,
        "n_blocks": r.n_blocks,
        "zone_size": r.zone_size,
        "threshold": r.threshold.as_ref().map(Scalar::to_decimal_string),
        "residual_sq": r.residual_sq.to_decimal_string(),
        "residual_norm": r.residual_norm(),
        "blocks": r.blocks,
        "contract": r.contract,
        "paper_bounds": r.paper_bounds,
    }))?;
    out.csv(&r.b)?;
    Ok(Outcome::from_failures(failures))
}

fn density<S: Scalar>(out: &Output, gamma: &str, delta: &str) -> Result<Outcome, RunError> {
    let pair = PerturbationPair::new(parse_list::<S>("gamma", gamma)?, parse_list::<S>("delta", delta)?)
        .map_err(|e| RunError::Usage(e.to_string()))?;
    let report = span_is_dense(&pair);
    let sigma = min_singular_oracle(&pair);
    let kernel = kernel_vector(&pair);
    let kernel_residual = kernel.as_ref().map(|v| {
        apply_operator(&pair, v).iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    });
    let mut failures = Vec::new();
    match report.verdict {
        Verdict::Dense if sigma <= SIGMA_FLOOR => failures.push(format!("dense verdict but sigma_min = {sigma:e}")),
        Verdict::NotDense if sigma > SIGMA_FLOOR => failures.push(format!("not dense but sigma_min = {sigma:e}")),
        _ => {}
    }
    if let Some(r) = kernel_residual.filter(|r| *r > KERNEL_TOL) {
        failures.push(format!("|(I + T)v|_inf = {r:e} exceeds {KERNEL_TOL:e}"));
    }
    println!(
        "sum gamma_n delta_n = {}; verdict {:?}; sigma_min = {sigma:e}",
        report.sum.to_decimal_string(),
        report.verdict
    );
    out.json_value(&json!({
        "schema": "density_v1",
        "mode": S::MODE,
        "order": pair.order(),
        "sum": report.sum.to_decimal_string(),
        "verdict": report.verdict,
        "sigma_min": sigma,
        "kernel_vector": kernel.map(|v| v.iter().map(Scalar::to_decimal_string).collect::<Vec<_>>()),
        "kernel_residual": kernel_residual,
    }))?;
    if let Some(file) = &out.cli.csv {
        out.write(file, &pair.matrix_csv())?;
    }
    Ok(Outcome::from_failures(failures))
}

fn build(out: &Output, a: &TowerArgs) -> Result<Result<PipelineTower<Q>, Outcome>, RunError> {
    let k = svc_set(a.depth).map_err(|e| RunError::Usage(e.to_string()))?;
    let mode = if a.strict { TowerMode::Strict } else { TowerMode::BestEffort };
    match build_tower(&k, a.order as usize, mode) {
        Ok(t) => Ok(Ok(t)),
        Err(e @ PipelineError::Level { .. }) if e.is_infeasible() => {
            let required_depth = e.required_depth();
            Ok(Err(Outcome::Infeasible { message: format!("{} at depth {}: {e}", out.name, a.depth), required_depth }))
        }
        Err(e) => Err(RunError::Usage(e.to_string())),
    }
}

fn tower(out: &Output, a: &TowerArgs) -> Result<Outcome, RunError> {
    let t = match build(out, a)? {
        Ok(t) => t,
        Err(o) => return Ok(o),
    };
    let (invariants, s_minus_one) = match out.cli.mode {
        ModeArg::Exact => (t.invariants(), None),
        ModeArg::Float => {
            let f = t.to_f64();
            (f.invariants(), Some(f.s(f.order()).add_constant(&-1.0)))
        }
    };
    for l in t.levels() {
        println!(
            "level {}: zone {}, {} block(s), |B + chi|_2 = {:e}{}",
            l.n,
            l.zone_size,
            l.blocks,
            l.residual_norm,
            l.required_depth.map(|d| format!(" (needs depth {d})")).unwrap_or_default()
        );
    }
    out.json_value(&json!({
        "schema": "tower_v1",
        "mode": match out.cli.mode { ModeArg::Exact => "exact", ModeArg::Float => "float" },
        "depth": a.depth,
        "order": a.order,
        "k_components": t.k().len(),
        "k_measure": t.k().measure().to_decimal_string(),
        "levels": t.levels(),
        "invariants": invariants,
    }))?;
    match s_minus_one {
        Some(f) => out.csv(&f)?,
        None => out.csv(&t.s(t.order()).add_constant(&-Q::from_i64(1)))?,
    }
    Ok(Outcome::from_failures(failed_checks(&invariants)))
}

fn certify(out: &Output, a: &crate::CertifyArgs) -> Result<Outcome, RunError> {
    let t = match build(out, &a.tower)? {
        Ok(t) => t,
        Err(o) => return Ok(o),
    };
    let opts = CertificateOptions { grid: a.grid as usize };
    let float = t.to_f64();
    let cert = match out.cli.mode {
        ModeArg::Exact => nonniceness_certificate(&t, &default_test_functions::<Q>(), &opts),
        ModeArg::Float => nonniceness_certificate(&float, &default_test_functions::<f64>(), &opts),
    }
    .map_err(|e| RunError::Other(e.into()))?;
    // the norm suite always runs in float arithmetic
    let cert = if a.samples > 0 { cert.with_norm_bounds(norm_bound_suite(&float, a.seed, a.samples)) } else { cert };
    println!("certificate: {} ({} failure(s))", cert.verdict, cert.failures.len());
    out.json(&cert.to_json())?;
    out.csv(&t.s(t.order()).add_constant(&-Q::from_i64(1)))?;
    Ok(Outcome::from_failures(cert.failures))
}

fn discrete(out: &Output, seed: u64, modules: u64, instances: u64) -> Result<Outcome, RunError> {
    out.exact_only()?;
    out.no_csv()?;
    let mut failures = Vec::new();
    let mut full = 0usize;
    let mut characters = 0usize;
    for s in seed..seed + modules {
        let m = random_module(s);
        if !check_fge1(&m) {
            failures.push(format!("fge1 disagrees on module seed {s}"));
        }
        full += m.is_full() as usize;
        characters += vanishing_characters(&m).len();
    }
    println!("{modules} module(s): {full} full, {characters} vanishing character(s) in total");

    let mut summaries = Vec::new();
    for s in seed..seed + instances {
        let (gens, f, eps) = random_approx_instance(s);
        match module_approximate(&gens, &f, &eps, ApproxOptions::default()) {
            Ok(r) => summaries.push(json!({ "seed": s, "eps": eps.to_decimal_string(), "result": r.summary() })),
            Err(e) => {
                failures.push(format!("approximation seed {s}: {e:?}"));
                summaries.push(json!({ "seed": s, "eps": eps.to_decimal_string(), "error": format!("{e:?}") }));
            }
        }
    }
    println!("{instances} approximation instance(s), {} certified", summaries.iter().filter(|v| v.get("result").is_some()).count());

    // f = e_1 against the single generator e_0: every point is a witness
    let one = PiecewiseFn::<Q>::one();
    let violation = match module_approximate(
        &[VectorFn::basis(0, one.clone())],
        &VectorFn::basis(1, one),
        &Q::from_frac(1, 10),
        ApproxOptions::default(),
    ) {
        Err(LabError::DensityViolated { t, witness }) => {
            json!({ "t": t.to_decimal_string(), "witness": witness.iter().map(Scalar::to_decimal_string).collect::<Vec<_>>() })
        }
        other => {
            failures.push("missing generator direction was not reported".into());
            json!({ "unexpected": format!("{:?}", other.map(|r| r.summary())) })
        }
    };
    out.json_value(&json!({
        "schema": "discrete_v1",
        "seed": seed,
        "modules": { "count": modules, "full": full, "vanishing_characters": characters },
        "approximations": summaries,
        "density_violation": violation,
        "failures": failures,
    }))?;
    Ok(Outcome::from_failures(failures))
}
