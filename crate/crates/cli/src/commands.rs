//! One function per subcommand. Each returns the report body, an optional
//! per-point table and whether any verdict was indeterminate.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use heightlab::cover::{density_report, subspace_cover, CoverMode};
use heightlab::error::Error;
use heightlab::exceptional::{enumerate_points, filter_enumerated, filter_solutions, InequalityKind, SolutionSet, SystemSpec};
use heightlab::field::NumberField;
use heightlab::heights::{weil_hyperplane, HyperplanePresentation, LinearForm, ProjectivePoint};
use heightlab::interval::{Interval, Verdict};
use heightlab::places::{place, places_above, product_formula_defect, RationalPlace};
use heightlab::ruvojta::{delta_sigma, filtration_dims, gamma_beta, h0_twist, twisted_sections_sum, RuVojtaParams};
use heightlab::scattering::{fw_weights, scatter_solutions, uniform_distribution, Profile, WeightKind, WeightSystem};
use heightlab::twisted::{log_twisted_report, q_sweep, stabilization_q, PlaceForms, TwistedHeightSpec};

use crate::config::{element, rational, ExperimentConfig, Mode, WeightRule};
use crate::CliError;

/// Tolerance of the identity audit.
pub const AUDIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug)]
pub struct Output {
    pub body: Value,
    pub table: Option<Table>,
    pub indeterminate: bool,
    /// Set when the experiment ran but its check did not hold.
    pub failure: Option<String>,
}

impl Output {
    fn new(body: Value) -> Output {
        Output { body, table: None, indeterminate: false, failure: None }
    }
}

fn rat_str(q: &BigRational) -> String {
    q.to_string()
}

fn mid(i: &Interval) -> String {
    i.mid().to_string()
}

fn require_mode(cfg: &ExperimentConfig, allowed: &[Mode], command: &str) -> Result<(), CliError> {
    if allowed.contains(&cfg.mode) {
        return Ok(());
    }
    let names: Vec<&str> = allowed.iter().map(|m| m.name()).collect();
    Err(CliError::ConfigInvalid(format!(
        "mode: \"{}\" cannot run under `{command}` (expected one of {})",
        cfg.mode.name(),
        names.join(", ")
    )))
}

/// Explicit points when given, otherwise every point up to `height_bound`.
fn points(cfg: &ExperimentConfig) -> Result<Vec<ProjectivePoint>, CliError> {
    if let Some(p) = cfg.explicit_points()? {
        return Ok(p);
    }
    let n = cfg.dimension()?;
    let bound = cfg.height_bound.ok_or_else(|| CliError::ConfigInvalid("height_bound: required when no points are listed".into()))?;
    Ok(enumerate_points(n, bound, cfg.budget)?)
}

/// Weil values per (place, form), or `None` on the support of some form.
fn profile(places: &[PlaceForms], x: &ProjectivePoint, digits: u32) -> Result<Option<Vec<Vec<Interval>>>, CliError> {
    let mut rows = Vec::with_capacity(places.len());
    for pf in places {
        let mut row = Vec::with_capacity(pf.forms.len());
        for f in &pf.forms {
            match weil_hyperplane(&HyperplanePresentation::new(f.clone()), x, &pf.place, digits) {
                Ok(l) => row.push(l),
                Err(Error::OnSupport) => return Ok(None),
                Err(e) => return Err(e.into()),
            }
        }
        rows.push(row);
    }
    Ok(Some(rows))
}

fn lambda_header(places: &[PlaceForms]) -> Vec<String> {
    let mut h = vec!["point".to_string(), "h".to_string()];
    for pf in places {
        for i in 0..pf.forms.len() {
            h.push(format!("lambda_{}_{}_{i}", pf.place.v, pf.place.w_index));
        }
    }
    h
}

fn lambda_row(x: &ProjectivePoint, lambda: &[Vec<Interval>]) -> Vec<String> {
    let mut row = vec![x.to_string(), mid(&x.log_height())];
    row.extend(lambda.iter().flatten().map(mid));
    row
}

pub fn places_cmd(cfg: &ExperimentConfig, digits: u32) -> Result<Output, CliError> {
    let field = cfg.number_field()?;
    let mut vs: BTreeSet<RationalPlace> = BTreeSet::from([RationalPlace::Infinity]);
    for k in 0..cfg.places.len() {
        vs.insert(cfg.rational_place(k)?);
    }
    for &p in &cfg.primes {
        if !heightlab::rat::is_prime_u64(p) {
            return Err(CliError::ConfigInvalid(format!("primes: {p} is not prime")));
        }
        vs.insert(RationalPlace::Prime(p));
    }
    let mut listing = Vec::new();
    for v in vs {
        let above = places_above(&field, v, digits)?;
        let sum_ef: usize = above.iter().map(|w| w.e * w.f).sum();
        listing.push(json!({ "v": v, "places": above, "sum_ef": sum_ef }));
    }
    let mut elements = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, c) in cfg.elements.iter().enumerate() {
        let a = element(&field, c, &format!("elements[{k}]"))?;
        if a.is_zero() {
            return Err(CliError::ConfigInvalid(format!("elements[{k}]: the product formula needs a nonzero element")));
        }
        let defect = product_formula_defect(&field, &a, digits)?;
        worst = worst.max(defect);
        elements.push(json!({ "element": a.to_string(), "norm": rat_str(&a.norm()), "defect": defect }));
    }
    Ok(Output::new(json!({
        "field": field.min_poly().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "degree": field.degree(),
        "places": listing,
        "elements": elements,
        "max_defect": worst,
    })))
}

pub fn height_cmd(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let pts = points(cfg)?;
    let mut table = Table { header: vec!["point".into(), "H".into(), "h".into()], rows: Vec::new() };
    let mut entries = Vec::with_capacity(pts.len());
    for x in &pts {
        let h = x.log_height();
        table.rows.push(vec![x.to_string(), x.mult_height().to_string(), mid(&h)]);
        entries.push(json!({ "point": x, "H": x.mult_height(), "h": h }));
    }
    let mut out = Output::new(json!({ "count": pts.len(), "points": entries }));
    out.table = Some(table);
    Ok(out)
}

pub fn weil_cmd(cfg: &ExperimentConfig, digits: u32) -> Result<Output, CliError> {
    let field = cfg.number_field()?;
    let places = cfg.place_forms(&field, digits, WeightRule::Ignored)?;
    let pts = points(cfg)?;
    let mut table = Table { header: lambda_header(&places), rows: Vec::new() };
    let mut entries = Vec::new();
    let mut support = Vec::new();
    for x in &pts {
        match profile(&places, x, digits)? {
            Some(l) => {
                table.rows.push(lambda_row(x, &l));
                entries.push(json!({ "point": x, "h": x.log_height(), "lambda": l }));
            }
            None => support.push(x.clone()),
        }
    }
    let mut out = Output::new(json!({ "points": entries, "support": support }));
    out.table = Some(table);
    Ok(out)
}

fn twisted_spec(cfg: &ExperimentConfig, digits: u32, q: BigRational) -> Result<TwistedHeightSpec, CliError> {
    let field = cfg.number_field()?;
    let places = cfg.place_forms(&field, digits, WeightRule::ZeroSum)?;
    Ok(TwistedHeightSpec::new(&field, cfg.dimension()?, places, cfg.epsilon()?, q)?)
}

pub fn twisted_cmd(cfg: &ExperimentConfig, digits: u32) -> Result<Output, CliError> {
    let spec = twisted_spec(cfg, digits, cfg.single_q()?)?;
    let slack = cfg.slack()?;
    let pts = points(cfg)?;
    let mut table = Table {
        header: ["point", "h", "lhs", "rhs", "verdict", "identity_residual"].map(String::from).to_vec(),
        rows: Vec::new(),
    };
    let mut reports = Vec::new();
    let mut support = Vec::new();
    let mut indeterminate = false;
    for x in &pts {
        match log_twisted_report(&spec, x, digits, &slack) {
            Ok(r) => {
                indeterminate |= r.verdict == Verdict::Indeterminate;
                let verdict = serde_json::to_value(r.verdict).expect("verdicts serialize");
                table.rows.push(vec![
                    x.to_string(),
                    mid(&r.h),
                    mid(&r.lhs),
                    mid(&r.rhs),
                    verdict.as_str().unwrap_or_default().to_string(),
                    r.identity_residual.to_string(),
                ]);
                reports.push(json!({ "point": x, "report": r }));
            }
            Err(Error::OnSupport) => support.push(x.clone()),
            Err(e) => return Err(e.into()),
        }
    }
    let mut out = Output::new(json!({ "Q": rat_str(spec.q()), "points": reports, "support": support }));
    out.table = Some(table);
    out.indeterminate = indeterminate;
    Ok(out)
}

pub fn sweep_cmd(cfg: &ExperimentConfig, digits: u32) -> Result<Output, CliError> {
    require_mode(cfg, &[Mode::Parametric], "sweep")?;
    let grid = cfg.q_values()?;
    if grid.is_empty() {
        return Err(CliError::ConfigInvalid("q_grid: the sweep needs at least one value".into()));
    }
    let spec = twisted_spec(cfg, digits, BigRational::from_integer(1.into()))?;
    let pts = points(cfg)?;
    let sweep = q_sweep(&spec, &grid, &pts, digits, &cfg.slack()?)?;
    let stable = stabilization_q(&sweep);
    let mut out = Output::new(json!({
        "examined": pts.len(),
        "sweep": sweep,
        "stabilization_Q": stable.as_ref().map(rat_str),
    }));
    out.indeterminate = sweep.iter().any(|e| !e.indeterminate.is_empty());
    let mut table = Table { header: ["Q", "solutions", "indeterminate"].map(String::from).to_vec(), rows: Vec::new() };
    for e in &sweep {
        table.rows.push(vec![rat_str(&e.q), e.solutions.len().to_string(), e.indeterminate.len().to_string()]);
    }
    out.table = Some(table);
    Ok(out)
}

struct Solved {
    spec: SystemSpec,
    set: SolutionSet,
    fw: Option<Value>,
}

fn solve_system(cfg: &ExperimentConfig, digits: u32, kind: InequalityKind) -> Result<Solved, CliError> {
    let field: Arc<NumberField> = cfg.number_field()?;
    let n = cfg.dimension()?;
    let rule = match kind {
        InequalityKind::Schmidt => WeightRule::Ignored,
        InequalityKind::Fw => WeightRule::Any,
        InequalityKind::Parametric => WeightRule::ZeroSum,
    };
    let places = cfg.place_forms(&field, digits, rule)?;
    let (eps, fw) = match kind {
        InequalityKind::Fw => {
            let d = WeightSystem::new(WeightKind::D, places.iter().map(|pf| pf.weights.clone()).collect())?;
            let (eps, c) = fw_weights(&d)?;
            let info = json!({
                "epsilon": rat_str(&eps),
                "c": c.entries.iter().map(|r| r.iter().map(rat_str).collect::<Vec<_>>()).collect::<Vec<_>>(),
            });
            (eps, Some(info))
        }
        _ => (cfg.epsilon()?, None),
    };
    let q = (kind == InequalityKind::Parametric).then(|| cfg.single_q()).transpose()?;
    let spec = SystemSpec::new(kind, &field, n, places, eps, q)?;
    let slack = cfg.slack()?;
    let set = match cfg.explicit_points()? {
        Some(p) => filter_solutions(&spec, &p, digits, &slack)?,
        None => {
            let bound = cfg.height_bound.ok_or_else(|| CliError::ConfigInvalid("height_bound: required when no points are listed".into()))?;
            filter_enumerated(&spec, bound, digits, &slack)?
        }
    };
    Ok(Solved { spec, set, fw })
}

pub fn solve_cmd(cfg: &ExperimentConfig, digits: u32) -> Result<Output, CliError> {
    require_mode(cfg, &[Mode::Schmidt, Mode::Fw, Mode::Parametric], "solve")?;
    let kind = match cfg.mode {
        Mode::Schmidt => InequalityKind::Schmidt,
        Mode::Fw => InequalityKind::Fw,
        _ => InequalityKind::Parametric,
    };
    let Solved { spec, set, fw } = solve_system(cfg, digits, kind)?;
    let cover_cfg = cfg.cover.clone().unwrap_or_default();
    let mode = match cover_cfg.mode {
        crate::config::CoverChoice::Exact => CoverMode::Exact,
        crate::config::CoverChoice::Greedy => CoverMode::Greedy,
    };
    let cover = if set.points.is_empty() { None } else { Some(subspace_cover(&set.points, mode, cover_cfg.max_subspaces)?) };
    let density = density_report(cover.as_ref());
    let mut table = Table { header: lambda_header(spec.places()), rows: Vec::new() };
    for x in &set.points {
        if let Some(l) = profile(spec.places(), x, digits)? {
            table.rows.push(lambda_row(x, &l));
        }
    }
    let mut out = Output::new(json!({
        "kind": kind,
        "epsilon": rat_str(spec.epsilon()),
        "fw": fw,
        "solutions": set,
        "cover": cover,
        "density": density,
    }));
    out.indeterminate = !set.indeterminate.is_empty();
    out.table = Some(table);
    Ok(out)
}

pub fn scatter_cmd(cfg: &ExperimentConfig, digits: u32) -> Result<Output, CliError> {
    require_mode(cfg, &[Mode::Schmidt, Mode::Scatter], "scatter")?;
    let Solved { spec, set, .. } = solve_system(cfg, digits, InequalityKind::Schmidt)?;
    let n = spec.n();
    let d = match &cfg.distribution {
        Some(ds) => ds
            .iter()
            .enumerate()
            .map(|(k, s)| rational(s, &format!("distribution[{k}]")))
            .collect::<Result<Vec<_>, _>>()?,
        None => uniform_distribution(spec.places().len()),
    };
    // lambda rounded down and h rounded up, so every class inequality that
    // holds for the rationals also holds for the true values
    let mut profiles = Vec::new();
    let mut height_zero = Vec::new();
    for x in &set.points {
        if x.mult_height() == 1 {
            height_zero.push(x.clone());
            continue;
        }
        let Some(l) = profile(spec.places(), x, digits)? else { continue };
        let lambda = l
            .iter()
            .map(|row| row.iter().map(|i| BigRational::from_float(i.lo).expect("finite Weil value")).collect())
            .collect();
        let h = BigRational::from_float(x.log_height().hi).expect("finite height");
        profiles.push(Profile { point: x.clone(), lambda, h });
    }
    let classes = scatter_solutions(&profiles, n, spec.epsilon(), &cfg.slack()?, &d)?;
    let classified: BTreeSet<&ProjectivePoint> = classes.iter().flat_map(|c| &c.members).collect();
    let unclassified: Vec<&ProjectivePoint> = profiles.iter().map(|p| &p.point).filter(|x| !classified.contains(x)).collect();
    let mut table = Table { header: ["class", "kind", "anchor", "tuple", "sum_e", "members"].map(String::from).to_vec(), rows: Vec::new() };
    for (k, c) in classes.iter().enumerate() {
        table.rows.push(vec![
            k.to_string(),
            c.kind.to_string(),
            c.anchor.map(|a| a.to_string()).unwrap_or_default(),
            c.tuple.iter().map(rat_str).collect::<Vec<_>>().join(" "),
            rat_str(&c.sum_e),
            c.members.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
        ]);
    }
    let mut out = Output::new(json!({
        "epsilon": rat_str(spec.epsilon()),
        "distribution": d.iter().map(rat_str).collect::<Vec<_>>(),
        "solutions": set,
        "height_zero": height_zero,
        "classes": classes,
        "unclassified": unclassified,
    }));
    out.indeterminate = !set.indeterminate.is_empty();
    out.table = Some(table);
    Ok(out)
}

pub fn ruvojta_cmd(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    require_mode(cfg, &[Mode::Ruvojta], "ruvojta")?;
    let rv = cfg.ruvojta.as_ref().ok_or_else(|| CliError::ConfigInvalid("ruvojta: section required".into()))?;
    if rv.n == 0 {
        return Err(CliError::ConfigInvalid("ruvojta.n: must be at least 1".into()));
    }
    if rv.betas.len() as u64 != rv.n + 1 {
        return Err(CliError::ConfigInvalid(format!("ruvojta.betas: expected {} entries, one per coordinate hyperplane", rv.n + 1)));
    }
    let betas = rv
        .betas
        .iter()
        .enumerate()
        .map(|(k, s)| rational(s, &format!("ruvojta.betas[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(&i) = rv.sigma.iter().find(|&&i| i as u64 > rv.n) {
        return Err(CliError::ConfigInvalid(format!("ruvojta.sigma: index {i} exceeds n = {}", rv.n)));
    }
    let gamma = gamma_beta(rv.n, rv.m_max.unwrap_or(rv.m).max(1))?;
    let restricted: Vec<BigRational> = rv.sigma.iter().map(|&i| betas[i].clone()).collect();
    let delta = delta_sigma(&restricted, rv.b)?;
    let limit = rv.max_profiles.unwrap_or(16);
    let mut profiles = Vec::new();
    for a in delta.iter().take(limit) {
        let p = filtration_dims(rv.n as usize, rv.m, &rv.sigma, a)?;
        profiles.push(json!({ "a": a.iter().map(rat_str).collect::<Vec<_>>(), "profile": p }));
    }
    let params = RuVojtaParams {
        n: rv.n,
        m: rv.m,
        betas: betas.clone(),
        b: rv.b,
        epsilon1: rational(&rv.epsilon1, "ruvojta.epsilon1")?,
    };
    let feasible = match &cfg.epsilon {
        Some(_) => Some(params.feasible(&cfg.epsilon()?)?),
        None => None,
    };
    Ok(Output::new(json!({
        "h0": h0_twist(rv.n, rv.m, 0).to_string(),
        "twisted_sections_sum": twisted_sections_sum(rv.n, rv.m).to_string(),
        "gamma": gamma,
        "delta_sigma": delta.iter().map(|a| a.iter().map(rat_str).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "profiles": profiles,
        "profiles_truncated": delta.len() > limit,
        "feasible": feasible,
    })))
}

/// Largest residual of `h(x) = sum_v lambda_{x_0}(x, v)` over points with
/// `x_0 != 0`, computed over Q with all places where the sum can be nonzero.
fn height_weil_residual(pts: &[ProjectivePoint], digits: u32) -> Result<(f64, usize), CliError> {
    let q = NumberField::rationals();
    let inf = place(&q, RationalPlace::Infinity, 0, digits)?;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for x in pts.iter().filter(|x| x.coords()[0] != 0) {
        let pres = HyperplanePresentation::new(LinearForm::coordinate(&q, x.dim(), 0));
        let mut sum = weil_hyperplane(&pres, x, &inf, digits)?;
        for p in heightlab::rat::prime_divisors(&x.coords()[0].into())? {
            sum = sum.add(&weil_hyperplane(&pres, x, &place(&q, RationalPlace::Prime(p), 0, digits)?, digits)?);
        }
        let d = sum.sub(&x.log_height());
        worst = worst.max(d.lo.abs().max(d.hi.abs()));
        count += 1;
    }
    Ok((worst, count))
}

pub fn audit_cmd(cfg: &ExperimentConfig, digits: u32) -> Result<Output, CliError> {
    let pts = points(cfg)?;
    let (hw, hw_count) = height_weil_residual(&pts, digits)?;
    let mut checks = vec![json!({ "check": "height_weil", "samples": hw_count, "max_residual": hw })];
    let mut worst = hw;
    if !cfg.places.is_empty() {
        let grid = if cfg.q_grid.is_empty() { [1, 2, 10, 1000].map(|v| BigRational::from_integer(v.into())).to_vec() } else { cfg.q_values()? };
        let base = twisted_spec(cfg, digits, BigRational::from_integer(1.into()))?;
        let mut tw: f64 = 0.0;
        let mut count = 0;
        let mut support = 0;
        for q in &grid {
            let spec = base.with_q(q.clone())?;
            for x in &pts {
                match log_twisted_report(&spec, x, digits, &BigRational::zero()) {
                    Ok(r) => {
                        tw = tw.max(r.identity_residual);
                        count += 1;
                    }
                    Err(Error::OnSupport) => support += 1,
                    Err(e) => return Err(e.into()),
                }
            }
        }
        worst = worst.max(tw);
        checks.push(json!({
            "check": "twisted_identity",
            "Q": grid.iter().map(rat_str).collect::<Vec<_>>(),
            "samples": count,
            "skipped_on_support": support,
            "max_residual": tw,
        }));
    }
    if !cfg.elements.is_empty() {
        let field = cfg.number_field()?;
        let mut pf: f64 = 0.0;
        for (k, c) in cfg.elements.iter().enumerate() {
            let a = element(&field, c, &format!("elements[{k}]"))?;
            if a.is_zero() {
                return Err(CliError::ConfigInvalid(format!("elements[{k}]: the product formula needs a nonzero element")));
            }
            pf = pf.max(product_formula_defect(&field, &a, digits)?);
        }
        worst = worst.max(pf);
        checks.push(json!({ "check": "product_formula", "samples": cfg.elements.len(), "max_residual": pf }));
    }
    let pass = worst < AUDIT_TOLERANCE;
    let mut out = Output::new(json!({
        "tolerance": AUDIT_TOLERANCE,
        "checks": checks,
        "max_residual": worst,
        "pass": pass,
    }));
    if !pass {
        out.failure = Some(format!("audit residual {worst:e} exceeds {AUDIT_TOLERANCE:e}"));
    }
    Ok(out)
}
