//! Command-line front end: reads JSON specs, runs the computations with their
//! oracle cross-checks, and renders deterministic reports.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{make_field, prime_power, ArithError, Field, Fq};
use crate::fourier::{self, CountTable, FourierError, MainIdentityData};
use crate::hasse::{self, HasseError, MuNCharacter, QmodZ};
use crate::integrate::{count_smooth_points, lift_count, weil_volume, AffineSchemeDesc, IntegrateError, VolumeValue};
use crate::neron::{self, NeronError, WeierstrassCurve};
use crate::orbifold::{
    fiber_volume, groupoid_mass, kummer_line_oracle, lambda_map, oracle_fiber_volumes, rotation_action,
    stringy_volume, twisted_inertia, OrbifoldError, QuotientStackDesc, StackSpec, DEFAULT_MAX_CELLS,
};
use crate::torsor::{enumerate_h1, orbit_decomposition, GroupWithFrobenius, TorsorError};

/// Oracle intervals must be at most q^{-ORACLE_WIDTH} wide.
pub const ORACLE_WIDTH: i64 = 6;

#[derive(Debug, Parser)]
#[command(name = "orbivol", version, about = "Exact volumes and counts for quotient stacks over F_q((t))")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Oracle level (series precision for hasse).
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub level: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; defaults to the rayon default.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// Refuse enumerations larger than this many cells.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_CELLS)]
    pub max_cells: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { level: 8, format: Format::Json, jobs: None, max_cells: DEFAULT_MAX_CELLS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weil volume of a scheme, or stringy volume of a stack with oracle checks.
    Volume(SpecArg),
    /// Twisted inertia classes of a stack.
    Inertia(SpecArg),
    /// H¹ of a finite group with Frobenius over F_q((t)).
    Torsors(SpecArg),
    /// Hilbert-symbol check of the specialization formula on [A^1/μ_N].
    Hasse(SpecArg),
    /// Character sums: transforms, the twisted identity, random suites.
    Fourier(SpecArg),
    /// Point counts across rational 2-isogenies.
    Isogeny(SpecArg),
    /// The built-in verification suite.
    VerifyAll,
}

#[derive(Debug, Args)]
pub struct SpecArg {
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Orbifold(#[from] OrbifoldError),
    #[error(transparent)]
    Torsor(#[from] TorsorError),
    #[error(transparent)]
    Hasse(#[from] HasseError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Neron(#[from] NeronError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("thread pool: {0}")]
    Pool(String),
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Spec(e.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Report {
    fn new(command: &str, inputs: Value) -> Self {
        Report { command: command.to_string(), inputs, results: Value::Null, checks: Vec::new(), pass: true }
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.pass &= pass;
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("reports serialize") + "\n",
            Format::Csv => {
                let mut out = String::from("check,pass,detail\n");
                for c in &self.checks {
                    out.push_str(&format!("{},{},{}\n", csv_field(&c.name), c.pass, csv_field(&c.detail)));
                }
                out
            }
            Format::Text => {
                let mut out = format!("{}: {}\n", self.command, if self.pass { "PASS" } else { "FAIL" });
                for c in &self.checks {
                    out.push_str(&format!("  [{}] {} {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail));
                }
                out.push_str(&serde_json::to_string_pretty(&self.results).expect("results serialize"));
                out.push('\n');
                out
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn read_spec(path: &PathBuf) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(serde_json::from_str(&text)?)
}

/// Runs a parsed command inside a pool of the requested size.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.config.jobs {
        pool = pool.num_threads(j as usize);
    }
    let pool = pool.build().map_err(|e| CliError::Pool(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Volume(a) => run_volume(&cli.config, &read_spec(&a.spec)?),
        Command::Inertia(a) => run_inertia(&cli.config, &read_spec(&a.spec)?),
        Command::Torsors(a) => run_torsors(&read_spec(&a.spec)?),
        Command::Hasse(a) => run_hasse(&cli.config, &read_spec(&a.spec)?),
        Command::Fourier(a) => run_fourier(&read_spec(&a.spec)?),
        Command::Isogeny(a) => run_isogeny(&read_spec(&a.spec)?),
        Command::VerifyAll => Ok(verify_all(&cli.config)),
    })
}

#[derive(Debug, Deserialize)]
struct SchemeSpec {
    p: u64,
    #[serde(default = "one")]
    r: u32,
    vars: Vec<String>,
    equations: Vec<String>,
    dim: usize,
}

fn one() -> u32 {
    1
}

fn scheme_report(report: &mut Report, x: &AffineSchemeDesc, max_lift: usize, max_cells: u64) -> Result<Value, CliError> {
    let q = x.field.q();
    let count = count_smooth_points(x);
    let vol = weil_volume(x);
    let expected = VolumeValue::integer(x.field.p(), count as i64)
        .mul(&VolumeValue::q_power(x.field.p(), x.field.r(), Ratio::from_integer(x.dim as i64)));
    report.check("weil_volume", vol == expected, format!("{} = {}/q^{}", vol, count, x.dim));
    let mut lifts = Vec::new();
    for m in 1..=max_lift {
        let got = lift_count(x, m, max_cells)?;
        let want = count as u128 * (q as u128).pow(((m - 1) * x.dim) as u32);
        report.check(format!("lift_count/m={}", m), got as u128 == want, format!("{} vs {}", got, want));
        lifts.push(got);
    }
    Ok(json!({ "q": q, "count": count, "volume": vol, "lift_counts": lifts }))
}

fn stack_volume_report(report: &mut Report, stack: &QuotientStackDesc, level: u32, max_cells: u64) -> Result<Value, CliError> {
    let inertia = twisted_inertia(stack, max_cells)?;
    let stringy = stringy_volume(stack, &inertia);
    let oracle = oracle_fiber_volumes(stack, &inertia, level)?;
    let tol = VolumeValue::q_power(stack.p, stack.r, Ratio::from_integer(ORACLE_WIDTH));
    let mut bad = Vec::new();
    for (i, (cls, iv)) in inertia.classes.iter().zip(&oracle).enumerate() {
        if !iv.contains(&fiber_volume(stack, cls)) || !iv.within(&tol) {
            bad.push(i);
        }
    }
    report.check("fiber_volume_oracle", bad.is_empty(), format!("{} classes, failing {:?}", oracle.len(), bad));
    if let Ok(kummer) = kummer_line_oracle(stack, &inertia, level) {
        let ok = inertia.classes.iter().zip(&kummer).all(|(c, iv)| iv.contains(&fiber_volume(stack, c)) && iv.within(&tol));
        report.check("kummer_oracle", ok, format!("{} classes", kummer.len()));
    }
    let mut results = serde_json::to_value(&stringy)?;
    results["oracle"] = serde_json::to_value(&oracle)?;
    Ok(results)
}

pub fn run_volume(cfg: &RunConfig, spec: &Value) -> Result<Report, CliError> {
    let mut report = Report::new("volume", spec.clone());
    report.results = if spec.get("equations").is_some() {
        let s: SchemeSpec = serde_json::from_value(spec.clone())?;
        let field = make_field(s.p, s.r)?;
        let vars: Vec<&str> = s.vars.iter().map(String::as_str).collect();
        let eqs: Vec<&str> = s.equations.iter().map(String::as_str).collect();
        let x = AffineSchemeDesc::parse(&field, &vars, &eqs, s.dim)?;
        scheme_report(&mut report, &x, (cfg.level as usize).min(3), cfg.max_cells)?
    } else {
        let s: StackSpec = serde_json::from_value(spec.clone())?;
        let stack = QuotientStackDesc::from_spec(&s)?;
        stack_volume_report(&mut report, &stack, cfg.level, cfg.max_cells)?
    };
    Ok(report)
}

pub fn run_inertia(cfg: &RunConfig, spec: &Value) -> Result<Report, CliError> {
    let mut report = Report::new("inertia", spec.clone());
    let s: StackSpec = serde_json::from_value(spec.clone())?;
    let stack = QuotientStackDesc::from_spec(&s)?;
    let inertia = twisted_inertia(&stack, cfg.max_cells)?;
    let stringy = stringy_volume(&stack, &inertia);
    let mass = groupoid_mass(&stack);
    let expected = num_rational::BigRational::from_integer(stack.q.pow(stack.n as u32).into());
    report.check("groupoid_mass", mass == expected, format!("{} vs q^n = {}", mass, expected));
    report.results = json!({ "count": inertia.len(), "classes": stringy.classes, "groupoid_mass": mass.to_string() });
    Ok(report)
}

#[derive(Debug, Deserialize)]
struct TorsorSpec {
    q: u64,
    group: TorsorGroupSpec,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TorsorGroupSpec {
    /// Z/N with Frobenius acting by multiplication by `frobenius`.
    Cyclic {
        #[serde(rename = "N")]
        order: usize,
        #[serde(default = "one_usize")]
        frobenius: usize,
    },
    Table { mul: Vec<Vec<usize>>, phi: Vec<usize> },
}

fn one_usize() -> usize {
    1
}

fn torsor_group(spec: &TorsorGroupSpec) -> Result<GroupWithFrobenius, CliError> {
    match spec {
        TorsorGroupSpec::Cyclic { order: 0, .. } => Err(CliError::Spec("N must be positive".into())),
        TorsorGroupSpec::Cyclic { order, frobenius } => {
            let n = *order;
            let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
            let phi = (0..n).map(|a| a * frobenius % n).collect();
            Ok(GroupWithFrobenius::from_table(mul, phi)?)
        }
        TorsorGroupSpec::Table { mul, phi } => Ok(GroupWithFrobenius::from_table(mul.clone(), phi.clone())?),
    }
}

/// N·|F_q^× / (F_q^×)^N|: the Kummer count of F^×/(F^×)^N for F = F_q((t)).
pub fn kummer_count(field: &Field, n: u64) -> u64 {
    let powers: std::collections::BTreeSet<Fq> =
        field.elements().filter(|x| x.0 != 0).map(|x| field.pow(x, n)).collect();
    n * ((field.q() - 1) / powers.len() as u64)
}

pub fn run_torsors(spec: &Value) -> Result<Report, CliError> {
    let mut report = Report::new("torsors", spec.clone());
    let s: TorsorSpec = serde_json::from_value(spec.clone())?;
    let (p, r) = prime_power(s.q).ok_or_else(|| CliError::Spec(format!("q = {} is not a prime power", s.q)))?;
    let g = torsor_group(&s.group)?;
    let classes = enumerate_h1(&g, s.q)?;
    let mut rows = Vec::new();
    for c in &classes {
        let shape = orbit_decomposition(&g, c.representative);
        let total: usize = shape.iter().map(|(f, e, m)| f * e * m).sum();
        report.check(
            format!("decomposition/({},{})", c.representative.x_beta, c.representative.x_gamma),
            total == g.order(),
            format!("sum e*f = {}", total),
        );
        rows.push(json!({
            "x_beta": c.representative.x_beta,
            "x_gamma": c.representative.x_gamma,
            "size": c.size,
            "tag": c.tag,
            "shape": shape,
        }));
    }
    if let TorsorGroupSpec::Cyclic { order, frobenius: 1 } = s.group {
        if (s.q - 1) % order as u64 == 0 {
            let k = kummer_count(&make_field(p, r)?, order as u64);
            report.check("kummer", k == classes.len() as u64, format!("{} classes, Kummer {}", classes.len(), k));
        }
    }
    report.results = json!({ "q": s.q, "order": g.order(), "count": classes.len(), "classes": rows });
    Ok(report)
}

#[derive(Debug, Deserialize)]
struct HasseSpec {
    p: u64,
    #[serde(default = "one")]
    r: u32,
    #[serde(rename = "N")]
    order: u64,
    #[serde(default = "one_u64")]
    chi: u64,
    #[serde(default = "two")]
    max_v: i64,
}

fn one_u64() -> u64 {
    1
}

fn two() -> i64 {
    2
}

fn hasse_checks(report: &mut Report, p: u64, r: u32, n: u64, chi: u64, max_v: i64, prec: i64) -> Result<Value, CliError> {
    let stack = QuotientStackDesc::mu_n(p, r, n, &[1])?;
    let inertia = twisted_inertia(&stack, DEFAULT_MAX_CELLS)?;
    let l = hasse::Character::from_mu(&stack, &MuNCharacter::new(n, chi)?)?;
    let points = hasse::coarse_points(p, r, max_v)?;
    let mut failures = Vec::new();
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    for u in &points {
        let c = hasse::hasse_specialization_check(&stack, &inertia, &l, u, prec)?;
        *tally.entry(c.lhs.to_string()).or_default() += 1;
        if !c.equal {
            failures.push(json!({ "u": format!("{:?}", u), "lhs": c.lhs, "rhs": c.rhs }));
        }
    }
    report.check(
        format!("hasse/q={}/N={}", stack.q, n),
        failures.is_empty(),
        format!("{} points, {} failures", points.len(), failures.len()),
    );
    Ok(json!({ "points": points.len(), "invariants": tally, "failures": failures }))
}

fn gerbe_checks(report: &mut Report, max_n: u64) -> Result<(), CliError> {
    let mut bad = Vec::new();
    for n in 1..=max_n {
        for chi in 0..n {
            let inv = hasse::invariant(&hasse::torsor_gerbe(&MuNCharacter::new(n, chi)?));
            if inv != QmodZ::new(chi as i64, n as i64) {
                bad.push((n, chi));
            }
        }
    }
    report.check(format!("torsor_gerbe/N<={}", max_n), bad.is_empty(), format!("failing {:?}", bad));
    Ok(())
}

pub fn run_hasse(cfg: &RunConfig, spec: &Value) -> Result<Report, CliError> {
    let mut report = Report::new("hasse", spec.clone());
    let s: HasseSpec = serde_json::from_value(spec.clone())?;
    let results = hasse_checks(&mut report, s.p, s.r, s.order, s.chi, s.max_v, cfg.level as i64)?;
    gerbe_checks(&mut report, s.order)?;
    report.results = results;
    Ok(report)
}

#[derive(Debug, Deserialize)]
struct RandomSpec {
    random: usize,
    #[serde(default)]
    seed: u64,
}

fn identity_report(report: &mut Report, d: &MainIdentityData) -> Result<Value, CliError> {
    let r = fourier::verify_main_identity(d);
    let failing: Vec<Value> = r
        .failing
        .iter()
        .map(|&(s, t)| json!({ "s": d.a_dual.label(&d.a_dual.element(s)), "t": d.a_g.label(&d.a_g.element(t)) }))
        .collect();
    report.check("main_identity", r.passes(), format!("{} pairs, {} failing", r.pairs, r.failing.len()));
    let mut results = json!({ "pairs": r.pairs, "failing": failing });
    if r.passes() {
        let st = fourier::derive_stable_equality(d);
        report.check("stable_equality", st.equal && st.collapse_ok, format!("{} = {}", st.lhs, st.rhs));
        let mut kappas = Vec::new();
        for lam in 0..d.a_g.order() {
            let k = fourier::derive_kappa_identity(d, lam)?;
            let label = d.a_g.label(&d.a_g.element(lam));
            report.check(format!("kappa_identity/{}", label), k.equal && k.collapse_ok, k.transfer_factor.to_string());
            kappas.push(json!({ "lambda": label, "identity": k }));
        }
        results["stable"] = serde_json::to_value(&st)?;
        results["kappa"] = Value::Array(kappas);
    }
    Ok(results)
}

/// Mirror instances and single-entry perturbations from a fixed seed.
fn random_fourier_checks(report: &mut Report, count: usize, seed: u64) -> Value {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ok, mut flagged) = (0, 0);
    for _ in 0..count {
        let d = fourier::random_instance(&mut rng);
        let pass = fourier::verify_main_identity(&d).passes()
            && fourier::derive_stable_equality(&d).equal
            && (0..d.a_g.order()).all(|l| fourier::derive_kappa_identity(&d, l).map_or(false, |k| k.equal && k.collapse_ok));
        ok += pass as usize;
        let (bad, mut predicted) = fourier::perturb(&d, &mut rng);
        predicted.sort();
        flagged += (fourier::verify_main_identity(&bad).failing == predicted) as usize;
    }
    report.check("fourier/mirror_instances", ok == count, format!("{}/{}", ok, count));
    report.check("fourier/perturbations", flagged == count, format!("{}/{}", flagged, count));
    json!({ "instances": count, "seed": seed, "passing": ok, "perturbations_flagged": flagged })
}

pub fn run_fourier(spec: &Value) -> Result<Report, CliError> {
    let mut report = Report::new("fourier", spec.clone());
    report.results = if spec.get("group").is_some() {
        let table = CountTable::from_json(&spec.to_string())?;
        let transform = fourier::fourier_transform(&table);
        let back = fourier::inverse_fourier(&table.group, &transform);
        report.check("inversion", back == table, "");
        let stable = fourier::stable_count(&table);
        report.check("stable_is_trivial_component", stable == transform[0].1, stable.to_string());
        let map: BTreeMap<String, String> =
            transform.iter().map(|(chi, v)| (table.group.label(&chi.a), v.to_string())).collect();
        json!({ "transform": map, "stable_count": stable.to_string() })
    } else if spec.get("a_g").is_some() {
        let d = MainIdentityData::from_json(&spec.to_string())?;
        identity_report(&mut report, &d)?
    } else if spec.get("random").is_some() {
        let s: RandomSpec = serde_json::from_value(spec.clone())?;
        random_fourier_checks(&mut report, s.random, s.seed)
    } else {
        return Err(CliError::Spec("expected a count table, main-identity data, or a random suite".into()));
    };
    Ok(report)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum IsogenySpec {
    Suite { suite: Vec<u64> },
    Curve {
        p: u64,
        #[serde(default = "one")]
        r: u32,
        a: [i64; 5],
        #[serde(default)]
        kernel: Option<[i64; 2]>,
    },
}

fn suite_checks(report: &mut Report, primes: &[u64]) -> Result<Value, CliError> {
    let mut out = BTreeMap::new();
    for &p in primes {
        let entries = neron::isogeny_suite(p)?;
        let bad: Vec<&neron::SuiteEntry> = entries.iter().filter(|e| !e.passes()).collect();
        report.check(format!("isogeny_suite/q={}", p), bad.is_empty(), format!("{} isogenies, {} failing", entries.len(), bad.len()));
        out.insert(p.to_string(), json!({ "isogenies": entries.len(), "failing": bad }));
    }
    Ok(json!(out))
}

pub fn run_isogeny(spec: &Value) -> Result<Report, CliError> {
    let mut report = Report::new("isogeny", spec.clone());
    let s: IsogenySpec = serde_json::from_value(spec.clone())?;
    report.results = match s {
        IsogenySpec::Suite { suite } => suite_checks(&mut report, &suite)?,
        IsogenySpec::Curve { p, r, a, kernel } => {
            let f = make_field(p, r)?;
            let coeffs = a.map(|c| f.from_int(c));
            let e = WeierstrassCurve::new(&f, coeffs)?;
            let kernels: Vec<(Fq, Fq)> = match kernel {
                Some([x, y]) => vec![(f.from_int(x), f.from_int(y))],
                None => {
                    // y = -(a1 x + a3)/2 on the 2-torsion
                    let half = f.inv(f.from_int(2)).ok_or(NeronError::CharacteristicTwo)?;
                    e.two_torsion()?
                        .into_iter()
                        .map(|x| (x, f.neg(f.mul(half, f.add(f.mul(coeffs[0], x), coeffs[2])))))
                        .collect()
                }
            };
            let mut rows = Vec::new();
            for t in kernels {
                let iso = neron::two_isogenous(&e, t)?;
                let v = neron::verify_volume_equality(&e, &iso.target);
                report.check(format!("counts/kernel=({},{})", t.0 .0, t.1 .0), v.equal, format!("{} vs {}", v.count_source, v.count_target));
                let tgt: Vec<u32> = iso.target.a.iter().map(|c| c.0).collect();
                rows.push(json!({ "kernel": [t.0 .0, t.1 .0], "target": tgt, "report": v }));
            }
            json!({ "q": f.q(), "isogenies": rows })
        }
    };
    Ok(report)
}

fn weil_suite(report: &mut Report, max_cells: u64) -> Result<Value, CliError> {
    let mut out = Vec::new();
    for p in [3u64, 5, 7] {
        let f = make_field(p, 1)?;
        let mut schemes = vec![];
        for n in 0..=3 {
            schemes.push((format!("A^{}", n), AffineSchemeDesc::affine_space(&f, n)));
        }
        schemes.push(("xy=1".into(), AffineSchemeDesc::parse(&f, &["x", "y"], &["x*y - 1"], 1)?));
        schemes.push(("y^2=x^3+x".into(), AffineSchemeDesc::parse(&f, &["x", "y"], &["y^2 - x^3 - x"], 1)?));
        schemes.push(("y^2=x^3-x".into(), AffineSchemeDesc::parse(&f, &["x", "y"], &["y^2 - x^3 + x"], 1)?));
        for (name, x) in schemes {
            let mut sub = Report::new("", Value::Null);
            let r = scheme_report(&mut sub, &x, 3, max_cells)?;
            report.check(format!("weil/q={}/{}", p, name), sub.pass, format!("count {}", r["count"]));
            out.push(json!({ "q": p, "scheme": name, "result": r }));
        }
    }
    Ok(Value::Array(out))
}

/// The stacks of the volume suite, with names, over F_p.
pub fn stack_suite(p: u64) -> Result<Vec<(String, QuotientStackDesc)>, OrbifoldError> {
    let rot = rotation_action(p, 1, 3)?;
    Ok(vec![
        ("[A^1/mu_2]".into(), QuotientStackDesc::mu_n(p, 1, 2, &[1])?),
        ("[A^2/mu_2(-1,-1)]".into(), QuotientStackDesc::mu_n(p, 1, 2, &[1, 1])?),
        ("[A^2/mu_2(1,-1)]".into(), QuotientStackDesc::mu_n(p, 1, 2, &[0, 1])?),
        ("[A^1/mu_3]".into(), QuotientStackDesc::mu_n(p, 1, 3, &[1])?),
        ("[A^2/mu_3(1,2)]".into(), QuotientStackDesc::mu_n(p, 1, 3, &[1, 2])?),
        ("[A^2/rot_3]".into(), QuotientStackDesc::matrix_list(p, 1, &[rot.matrix], rot.s)?),
    ])
}

fn stack_suite_checks(report: &mut Report, level: u32, max_cells: u64) -> Result<Value, CliError> {
    let mut out = Vec::new();
    for p in [5u64, 7, 13] {
        for (name, stack) in stack_suite(p)? {
            let mut sub = Report::new("", Value::Null);
            let r = stack_volume_report(&mut sub, &stack, level, max_cells)?;
            report.check(format!("stack/q={}/{}", p, name), sub.pass, format!("{} classes", r["classes"].as_array().map_or(0, Vec::len)));
            out.push(json!({ "q": p, "stack": name, "stringy_volume": r["stringy_volume"] }));
        }
    }
    for p in [5u64, 13] {
        let stack = QuotientStackDesc::mu_n(p, 1, 2, &[1])?;
        let inertia = twisted_inertia(&stack, max_cells)?;
        let s = stringy_volume(&stack, &inertia).stringy_volume;
        let want = VolumeValue::integer(p, 1).add(&VolumeValue::q_power(p, 1, Ratio::new(1, 2)));
        let tol = VolumeValue::q_power(p, 1, Ratio::from_integer(8));
        let coarse = crate::orbifold::coarse_line_integral(p, 1, 2, &tol);
        report.check(
            format!("stringy/q={}", p),
            s == want && coarse.contains(&s) && coarse.within(&tol),
            format!("{} in [{}, {}]", s, coarse.lo, coarse.hi),
        );
    }
    Ok(Value::Array(out))
}

fn lambda_check(report: &mut Report) -> Result<(), CliError> {
    let rot = rotation_action(5, 1, 3)?;
    let lm = lambda_map(&rot)?;
    report.check("lambda/rotation/q=5", lm.certificate.passes(), format!("{:?}", lm.certificate));
    Ok(())
}

fn torsor_count_checks(report: &mut Report) -> Result<(), CliError> {
    for (n, qs) in [(2usize, vec![5u64, 7, 11]), (3, vec![7, 13])] {
        for q in qs {
            let spec = json!({ "q": q, "group": { "kind": "cyclic", "N": n } });
            let sub = run_torsors(&spec)?;
            let count = sub.results["count"].as_u64().unwrap_or(0);
            report.check(format!("h1/Z{}/q={}", n, q), sub.pass && count == (n * n) as u64, format!("{} classes", count));
        }
    }
    Ok(())
}

/// Every built-in check; deterministic for a fixed configuration.
pub fn verify_all(cfg: &RunConfig) -> Report {
    let mut report = Report::new("verify-all", json!({ "level": cfg.level, "max_cells": cfg.max_cells }));
    let mut results = serde_json::Map::new();
    let mut section = |report: &mut Report, name: &str, r: Result<Value, CliError>| match r {
        Ok(v) => {
            results.insert(name.to_string(), v);
        }
        Err(e) => report.check(name.to_string(), false, e.to_string()),
    };
    let r = weil_suite(&mut report, cfg.max_cells);
    section(&mut report, "weil", r);
    let r = stack_suite_checks(&mut report, cfg.level, cfg.max_cells);
    section(&mut report, "stacks", r);
    let r = lambda_check(&mut report).map(|_| Value::Null);
    section(&mut report, "lambda", r);
    let r = torsor_count_checks(&mut report).map(|_| Value::Null);
    section(&mut report, "torsors", r);
    let mut hasse_out = serde_json::Map::new();
    for p in [5u64, 13] {
        match hasse_checks(&mut report, p, 1, 2, 1, 4, cfg.level as i64) {
            Ok(v) => {
                hasse_out.insert(p.to_string(), v);
            }
            Err(e) => report.check(format!("hasse/q={}", p), false, e.to_string()),
        }
    }
    let r = gerbe_checks(&mut report, 12).map(|_| Value::Object(hasse_out));
    section(&mut report, "hasse", r);
    let r = random_fourier_checks(&mut report, 100, 0);
    section(&mut report, "fourier", Ok(r));
    let r = suite_checks(&mut report, &[5, 7, 11, 13]);
    section(&mut report, "isogeny", r);
    results.retain(|_, v| !v.is_null());
    report.results = Value::Object(results);
    report
}
