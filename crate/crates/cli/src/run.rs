//! Dispatch from job documents to the core verifiers.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use charsum_core::field_tower::TowerOptions;
use charsum_core::fourier::{auxid_sweep, solve_monomial_transform, verify_transform_pointwise, TransformCase};
use charsum_core::identity::{find_violation, verify_maincor, GammaMonomial, ViolationSearch};
use charsum_core::norm::{
    divisor_d_chi_v, solve_norm_transform, verify_gaussnorm, verify_norm_auxid, EtaleAlgebra, VirtualModule,
};
use charsum_core::stalk::{
    gmtr_closed_form, gmtr_datum, stalk_trace_at_zero, trace_function_supported, verify_binomial_identities,
    MonomialDatum,
};
use charsum_core::suite::{run_criterion, suite_ids, SuiteOptions};
use charsum_core::{CharContext, CycloValue, Error, FieldTower, MultCharacter};
use serde_json::{json, Value};

use crate::job::{CharSelection, CharSpec, Job};
use crate::report::{character, characters, element, Case, Render, Report};

#[derive(Debug)]
pub enum Failure {
    /// The job document does not match the schema.
    Schema(String),
    Core {
        context: String,
        error: Error,
    },
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Schema(_) => 2,
            Failure::Core { error, .. } => match error {
                Error::SizeBound { .. } => 3,
                Error::InvariantBreach(_) | Error::MissingDegree(_) | Error::NotDivisible { .. } => 4,
                _ => 2,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Schema(msg) => write!(f, "schema violation: {msg}"),
            Failure::Core { context, error } => write!(f, "{context}: {error}"),
        }
    }
}

type Out<T> = std::result::Result<T, Failure>;

trait Context<T> {
    fn within(self, context: impl FnOnce() -> String) -> Out<T>;
}

impl<T> Context<T> for charsum_core::Result<T> {
    fn within(self, context: impl FnOnce() -> String) -> Out<T> {
        self.map_err(|error| Failure::Core { context: context(), error })
    }
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub depth: Option<u32>,
    pub seed: Option<u64>,
    pub max_grid: u64,
    pub cache_dir: Option<PathBuf>,
    pub render: Render,
}

impl Settings {
    fn depth(&self, job: Option<u32>, default: u32) -> u32 {
        self.depth.or(job).unwrap_or(default).max(1)
    }

    fn seed(&self, job: Option<u64>) -> u64 {
        self.seed.or(job).unwrap_or(SuiteOptions::default().seed)
    }

    fn max_terms(&self) -> u128 {
        (self.max_grid as u128).pow(2)
    }

    fn context(&self, p: u64, s: u32, degrees: &[u32]) -> Out<CharContext> {
        let opts = TowerOptions { cache_dir: self.cache_dir.clone(), ..Default::default() };
        let tower = FieldTower::closure(p, s, degrees, &opts).within(|| format!("tower p={p} s={s}"))?;
        Ok(CharContext::new(tower))
    }
}

/// What a finished job produced: a report, or line records already streamed.
pub enum Outcome {
    Report(Report),
    Streamed { pass: bool },
}

impl Outcome {
    pub fn pass(&self) -> bool {
        match self {
            Outcome::Report(r) => r.all_pass(),
            Outcome::Streamed { pass } => *pass,
        }
    }
}

pub fn parse(doc: &Value) -> Out<Job> {
    serde_json::from_value(doc.clone()).map_err(|e| Failure::Schema(e.to_string()))
}

pub fn run(job: &Job, echo: Value, set: &Settings, out: &mut impl Write) -> Out<Outcome> {
    let start = Instant::now();
    let cases = match job {
        Job::Gauss { p, s, degree, lambda } => gauss(set, *p, *s, *degree, lambda)?,
        Job::Hd { p, s, n, lift, lambda } => hd(set, *p, *s, *n, lift, lambda)?,
        Job::Divisor { moduli, trials, max_n, seed } => divisor(moduli, *trials, *max_n, set.seed(*seed)),
        Job::Identity { p, s, monomial, depth } => identity(set, *p, *s, monomial, set.depth(*depth, 2))?,
        Job::Monom { p, s, exponents, characters, a, depth, pointwise } => {
            monom(set, *p, *s, exponents, characters, *a, set.depth(*depth, 1), *pointwise)?
        }
        Job::Stalk { p, s, exponents, characters, a, gmtr } => stalk(set, *p, *s, exponents, characters, *a, gmtr)?,
        Job::Binom { n, r, s } => binom(*n, *r, *s)?,
        Job::Norm { p, s, factor_degrees, ranks, characters, a, depth } => {
            norm(set, *p, *s, factor_degrees, ranks, characters, *a, set.depth(*depth, 2))?
        }
        Job::Suite { name, criteria, seed, depth } => {
            let pass = suite(set, name, criteria.as_deref(), set.seed(*seed), set.depth(*depth, 2), out)?;
            eprintln!("charsum: suite {name} finished in {:.3}s", start.elapsed().as_secs_f64());
            return Ok(Outcome::Streamed { pass });
        }
    };
    eprintln!("charsum: {} job finished in {:.3}s", job.kind(), start.elapsed().as_secs_f64());
    Ok(Outcome::Report(Report::new(job.kind(), echo, cases)))
}

fn case(key: impl Into<String>, inputs: Value, outputs: Value, pass: bool) -> Case {
    Case { key: key.into(), inputs, outputs, pass, m: None }
}

fn resolve(ctx: &CharContext, degree: u32, spec: &CharSpec) -> Out<MultCharacter> {
    match spec {
        CharSpec::Named(_) => ctx.trivial(degree),
        CharSpec::Eps { eps } => ctx.eps(degree, *eps),
        CharSpec::Index { index } => ctx.character(degree, *index),
    }
    .within(|| format!("character {spec:?} at degree {degree}"))
}

fn select(ctx: &CharContext, degree: u32, sel: &CharSelection) -> Out<Vec<MultCharacter>> {
    match sel {
        CharSelection::Default | CharSelection::All(_) => MultCharacter::all(ctx.tower(), degree),
        CharSelection::Indices(ix) => ix.iter().map(|&i| ctx.character(degree, i)).collect(),
    }
    .within(|| format!("characters at degree {degree}"))
}

fn gauss(set: &Settings, p: u64, s: u32, degree: u32, sel: &CharSelection) -> Out<Vec<Case>> {
    let ctx = set.context(p, s, &[degree])?;
    let t = ctx.tower();
    let q = t.size(degree).within(|| "field size".into())?;
    let minus_one = t.from_int(degree, -1);
    let mut cases = Vec::new();
    for lam in select(&ctx, degree, sel)? {
        let cx = || format!("Gauss sum at {lam}");
        let g = ctx.gauss_sum(&lam).within(cx)?;
        let mut checks = serde_json::Map::new();
        if lam.is_trivial() {
            checks.insert("trivial_is_minus_one".into(), json!(g == CycloValue::from_int(-1)));
        } else {
            let gi = ctx.gauss_sum(&lam.inv()).within(cx)?;
            let sign = ctx.eval_mult(&lam, minus_one).within(cx)?;
            let qv = CycloValue::from_int(q);
            checks.insert("product".into(), json!(&g * &gi == &sign * &qv));
            checks.insert("conjugate".into(), json!(g.conjugate() == &sign * &gi));
            checks.insert("abs_squared".into(), json!(g.abs_squared().within(cx)? == q.into()));
        }
        let pass = checks.values().all(|v| v == &json!(true));
        cases.push(case(
            format!("lambda={}", lam.index()),
            json!({ "lambda": character(&lam) }),
            json!({ "g": set.render.cyclo(&g), "checks": checks }),
            pass,
        ));
    }
    Ok(cases)
}

fn hd(set: &Settings, p: u64, s: u32, n: Option<u64>, lift: &[u32], sel: &CharSelection) -> Out<Vec<Case>> {
    if n.is_none() && lift.is_empty() {
        return Err(Failure::Schema("hd job needs n, lift, or both".into()));
    }
    let mut degrees = vec![1];
    degrees.extend_from_slice(lift);
    let ctx = set.context(p, s, &degrees)?;
    let mut cases = Vec::new();
    for lam in select(&ctx, 1, sel)? {
        if let Some(n) = n {
            let r = ctx.check_hd_product(&lam, n).within(|| format!("product n={n} at {lam}"))?;
            cases.push(case(
                format!("product n={n} lambda={}", lam.index()),
                json!({ "lambda": character(&lam), "n": n }),
                json!({ "lhs": set.render.cyclo(&r.lhs), "rhs": set.render.cyclo(&r.rhs) }),
                r.pass,
            ));
        }
        for &d in lift {
            let r = ctx.check_hd_lift(&lam, d).within(|| format!("lift d={d} at {lam}"))?;
            cases.push(case(
                format!("lift d={d} lambda={}", lam.index()),
                json!({ "lambda": character(&lam), "d": d }),
                json!({ "lhs": set.render.cyclo(&r.lhs), "rhs": set.render.cyclo(&r.rhs) }),
                r.pass,
            ));
        }
    }
    Ok(cases)
}

fn divisor(moduli: &[u64], trials: usize, max_n: u64, seed: u64) -> Vec<Case> {
    use charsum_core::divisor::{injectivity_exhaustive, injectivity_probe};
    let mut cases = Vec::new();
    for &n in moduli {
        for (label, r) in
            [("exhaustive", injectivity_exhaustive(n, max_n)), ("random", injectivity_probe(n, trials, seed))]
        {
            cases.push(case(
                format!("N={n} {label}"),
                json!({ "modulus": n, "max_n": max_n, "trials": trials, "seed": seed }),
                json!({
                    "checked": r.checked,
                    "zero_images": r.zero_images,
                    "counterexample": r.counterexample.as_ref().map(|c| c.to_string()),
                }),
                r.pass(),
            ));
        }
    }
    cases
}

fn identity(set: &Settings, p: u64, s: u32, terms: &[crate::job::Term], depth: u32) -> Out<Vec<Case>> {
    let base = terms.iter().fold(1u32, |acc, t| lcm(acc, t.degree.max(1)));
    let degrees: Vec<u32> = (1..=depth).map(|e| base * e).collect();
    let ctx = set.context(p, s, &degrees)?;
    let mono = GammaMonomial::new(
        terms
            .iter()
            .map(|t| Ok((ctx.character(t.degree, t.index).within(|| format!("term {t:?}"))?, t.n)))
            .collect::<Out<Vec<_>>>()?,
    );
    let div = mono.predicted_divisor(p).within(|| format!("divisor of {mono}"))?;
    let mut cases = vec![case(
        "divisor",
        json!({ "monomial": mono.to_string() }),
        json!({ "divisor": div.to_string(), "zero": div.is_zero() }),
        true,
    )];
    if div.is_zero() {
        for &d in &degrees {
            for lam in MultCharacter::all(ctx.tower(), d).within(|| format!("characters at degree {d}"))? {
                let key = format!("lambda d={d} index={}", lam.index());
                match verify_maincor(&ctx, &mono, &lam) {
                    Ok(o) => cases.push(Case {
                        m: Some(o.m),
                        ..case(
                            key,
                            json!({ "lambda": character(&lam) }),
                            json!({ "parity_checked": o.parity_checked }),
                            true,
                        )
                    }),
                    Err(Error::InvariantBreach(why)) => {
                        cases.push(case(key, json!({ "lambda": character(&lam) }), json!({ "violation": why }), false))
                    }
                    Err(error) => return Err(Failure::Core { context: format!("{mono} at {lam}"), error }),
                }
            }
        }
    } else {
        let r = find_violation(&ctx, &mono, base * depth).within(|| format!("falsifier on {mono}"))?;
        let (outputs, pass) = match r {
            ViolationSearch::Witness { degree, lambda } => {
                (json!({ "witness": { "degree": degree, "lambda": character(&lambda) } }), true)
            }
            ViolationSearch::Inconclusive { depth } => (json!({ "inconclusive": { "depth": depth } }), false),
            ViolationSearch::ZeroDivisor => (json!({ "zero_divisor": true }), false),
        };
        cases.push(case("falsifier", json!({ "depth": base * depth }), outputs, pass));
    }
    Ok(cases)
}

#[allow(clippy::too_many_arguments)]
fn monom(
    set: &Settings,
    p: u64,
    s: u32,
    exponents: &[i64],
    specs: &[CharSpec],
    a: i64,
    depth: u32,
    pointwise: bool,
) -> Out<Vec<Case>> {
    let degrees: Vec<u32> = (1..=depth).collect();
    let ctx = set.context(p, s, &degrees)?;
    let chars = specs.iter().map(|c| resolve(&ctx, 1, c)).collect::<Out<Vec<_>>>()?;
    let a = ctx.tower().from_int(1, a);
    let datum = MonomialDatum::new(&ctx, exponents.to_vec(), chars, a).within(|| "monomial datum".into())?;
    let inputs = json!({ "datum": datum.to_string() });
    let sol = match solve_monomial_transform(&ctx, &datum) {
        Ok(sol) => sol,
        Err(Error::NoSolution(why) | Error::Inapplicable(why)) => {
            return Ok(vec![case("solution", inputs, json!({ "no_solution": why }), false)]);
        }
        Err(error) => return Err(Failure::Core { context: format!("solving {datum}"), error }),
    };
    let mut cases = vec![Case {
        m: Some(sol.m),
        ..case(
            "solution",
            inputs.clone(),
            json!({
                "case": match sol.case { TransformCase::Gaussian => "gaussian", TransformCase::Balanced => "balanced" },
                "chi": character(&sol.chi),
                "b": element(sol.b),
                "c": set.render.cyclo(&sol.c),
                "exponents": sol.exponents,
                "characters": characters(&sol.chars),
            }),
            true,
        )
    }];
    let mut nonvanishing = 0;
    for e in 1..=depth {
        let cx = || format!("level {e} of {datum}");
        let (d, s) = if e == 1 {
            (datum.clone(), sol.clone())
        } else {
            let d = datum.lift(&ctx, e).within(cx)?;
            let s = solve_monomial_transform(&ctx, &d).within(cx)?;
            (d, s)
        };
        let lifted_ok = s.c == sol.c.pow(e as u64);
        let r = auxid_sweep(&ctx, &d, &s).within(cx)?;
        nonvanishing += r.nonvanishing;
        cases.push(case(
            format!("auxid level={e}"),
            json!({ "level": e }),
            json!({ "tuples": r.tuples, "failures": r.failures, "nonvanishing": r.nonvanishing, "c_is_power": lifted_ok }),
            r.pass() && lifted_ok,
        ));
    }
    cases.push(case("nonvanishing", json!({ "levels": depth }), json!({ "tuples": nonvanishing }), nonvanishing > 0));
    if pointwise && trace_function_supported(&datum) {
        let out = sol.output_datum(&ctx).within(|| "output datum".into())?;
        if trace_function_supported(&out) {
            let r = verify_transform_pointwise(&ctx, &datum, &sol, set.max_terms())
                .within(|| format!("naive transform of {datum}"))?;
            cases.push(case(
                "pointwise",
                json!({ "grid_points": r.points }),
                json!({ "mismatches": r.mismatches }),
                r.pass(),
            ));
        }
    }
    Ok(cases)
}

fn stalk(
    set: &Settings,
    p: u64,
    s: u32,
    exponents: &[i64],
    specs: &[CharSpec],
    a: i64,
    gmtr: &Option<crate::job::Gmtr>,
) -> Out<Vec<Case>> {
    let ctx = set.context(p, s, &[1])?;
    let a = ctx.tower().from_int(1, a);
    let chars = specs.iter().map(|c| resolve(&ctx, 1, c)).collect::<Out<Vec<_>>>()?;
    if let Some(g) = gmtr {
        let [chi] = chars.as_slice() else {
            return Err(Failure::Schema("a gmtr stalk job takes exactly one character".into()));
        };
        let cx = || format!("family n={} m={} d={}", g.n, g.m, g.d);
        let datum = gmtr_datum(&ctx, g.n, g.m, g.d, chi, a).within(cx)?;
        let got = stalk_trace_at_zero(&ctx, &datum).within(cx)?;
        let want = gmtr_closed_form(&ctx, g.n as u64, g.m as u64, g.d, chi, a).within(cx)?;
        return Ok(vec![case(
            format!("n={} m={} d={}", g.n, g.m, g.d),
            json!({ "datum": datum.to_string() }),
            json!({ "stalk": set.render.cyclo(&got), "closed_form": set.render.cyclo(&want) }),
            got == want,
        )]);
    }
    let datum = MonomialDatum::new(&ctx, exponents.to_vec(), chars, a).within(|| "monomial datum".into())?;
    let v = stalk_trace_at_zero(&ctx, &datum).within(|| format!("stalk of {datum}"))?;
    Ok(vec![case(
        "origin",
        json!({ "datum": datum.to_string() }),
        json!({ "stalk": set.render.cyclo(&v), "trace_function_supported": trace_function_supported(&datum) }),
        true,
    )])
}

fn binom(n: u64, r: Option<u64>, s: Option<u64>) -> Out<Vec<Case>> {
    let rs: Vec<u64> = r.map_or_else(|| (0..=n).collect(), |r| vec![r]);
    let ss: Vec<u64> = s.map_or_else(|| (0..=n).collect(), |s| vec![s]);
    let mut cases = Vec::new();
    for &r in &rs {
        for &s in &ss {
            for chk in verify_binomial_identities(n, r, s).within(|| format!("binomials (n,r,s)=({n},{r},{s})"))? {
                cases.push(case(
                    format!("{} r={r} s={s}", chk.name),
                    json!({ "n": n, "r": r, "s": s }),
                    json!({ "lhs": chk.lhs.to_string(), "rhs": chk.rhs.to_string() }),
                    chk.pass(),
                ));
            }
        }
    }
    Ok(cases)
}

#[allow(clippy::too_many_arguments)]
fn norm(
    set: &Settings,
    p: u64,
    s: u32,
    factor_degrees: &[u32],
    ranks: &[i64],
    specs: &[CharSpec],
    a: i64,
    depth: u32,
) -> Out<Vec<Case>> {
    if factor_degrees.len() != ranks.len() || ranks.len() != specs.len() {
        return Err(Failure::Schema("factor_degrees, ranks and characters must have equal length".into()));
    }
    let mut degrees: Vec<u32> = (1..=depth).collect();
    for &d in factor_degrees {
        degrees.extend((1..=depth).map(|e| d.max(1) * e));
    }
    let ctx = set.context(p, s, &degrees)?;
    let alg = EtaleAlgebra::new(&ctx, 1, factor_degrees).within(|| "algebra".into())?;
    let chars = specs.iter().zip(factor_degrees).map(|(c, &d)| resolve(&ctx, d, c)).collect::<Out<Vec<_>>>()?;
    let v = VirtualModule::new(ranks.to_vec());
    let a = ctx.tower().from_int(1, a);
    let inputs = json!({ "factor_degrees": factor_degrees, "ranks": ranks, "characters": characters(&chars) });
    let div = divisor_d_chi_v(&ctx, &alg, &chars, &v).within(|| "divisor".into())?;
    let mut cases =
        vec![case("divisor", inputs.clone(), json!({ "divisor": div.to_string(), "zero": div.is_zero() }), true)];
    if div.is_zero() {
        for lam in MultCharacter::all(ctx.tower(), 1).within(|| "base characters".into())? {
            let o = verify_gaussnorm(&ctx, &alg, &v, &chars, &lam).within(|| format!("norm identity at {lam}"))?;
            cases.push(Case {
                m: Some(o.m),
                ..case(
                    format!("lambda={}", lam.index()),
                    json!({ "lambda": character(&lam) }),
                    json!({ "trivial_weight": o.trivial_weight, "parity_checked": o.parity_checked }),
                    o.parity_ok(),
                )
            });
        }
        return Ok(cases);
    }
    let sol = match solve_norm_transform(&ctx, &alg, &v, &chars, a) {
        Ok(sol) => sol,
        Err(Error::NoSolution(why) | Error::Inapplicable(why)) => {
            cases.push(case("solution", inputs, json!({ "no_solution": why }), false));
            return Ok(cases);
        }
        Err(error) => return Err(Failure::Core { context: "solving the norm transform".into(), error }),
    };
    cases.push(case(
        "solution",
        inputs,
        json!({
            "nu": character(&sol.nu),
            "ranks": sol.w.ranks,
            "eta": characters(&sol.eta),
            "b": element(sol.b),
            "c0": set.render.cyclo(&sol.c0),
        }),
        true,
    ));
    let mut nonvanishing = 0;
    let mut ms = Vec::new();
    for e in 1..=depth {
        let r = verify_norm_auxid(&ctx, &alg, &v, &chars, a, &sol, e).within(|| format!("level {e}"))?;
        nonvanishing += r.nonvanishing;
        ms.extend(r.m);
        cases.push(Case {
            m: r.m,
            ..case(
                format!("auxid level={e}"),
                json!({ "level": e }),
                json!({ "tuples": r.tuples, "failures": r.failures, "nonvanishing": r.nonvanishing }),
                r.pass(),
            )
        });
    }
    let consistent = ms.windows(2).all(|w| w[0] == w[1]);
    cases.push(case(
        "nonvanishing",
        json!({ "levels": depth }),
        json!({ "tuples": nonvanishing, "m_consistent": consistent }),
        nonvanishing > 0 && consistent,
    ));
    Ok(cases)
}

fn suite(set: &Settings, name: &str, only: Option<&[u8]>, seed: u64, depth: u32, out: &mut impl Write) -> Out<bool> {
    let mut ids = suite_ids(name).ok_or_else(|| Failure::Schema(format!("unknown suite {name:?}")))?;
    if let Some(only) = only {
        if let Some(bad) = only.iter().find(|i| !ids.contains(i)) {
            return Err(Failure::Schema(format!("suite {name} has no criterion {bad}")));
        }
        ids.retain(|i| only.contains(i));
    }
    let opts = SuiteOptions { seed, depth, max_terms: set.max_terms() };
    let mut failed = Vec::new();
    for id in &ids {
        let r = run_criterion(*id, &opts).within(|| format!("criterion {id}"))?;
        eprintln!("charsum: {}", r.summary_line());
        if !r.within_limit() {
            eprintln!("charsum: criterion {id} exceeded its time limit");
        }
        let failing: Vec<Value> = r.failures().map(|c| json!({ "key": c.key, "detail": c.detail })).collect();
        let pass = failing.is_empty();
        if !pass {
            failed.push(*id);
        }
        let line = json!({ "criterion": id, "title": r.title, "pass": pass, "checks": r.checked, "failing": failing });
        writeln!(out, "{line}").map_err(|e| Failure::Schema(format!("writing report: {e}")))?;
    }
    let summary = json!({ "suite": name, "seed": seed, "criteria": ids.len(), "passed": ids.len() - failed.len(), "failed": failed });
    writeln!(out, "{summary}").map_err(|e| Failure::Schema(format!("writing report: {e}")))?;
    Ok(failed.is_empty())
}

fn lcm(a: u32, b: u32) -> u32 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let core = |error| Failure::Core { context: "x".into(), error };
        assert_eq!(Failure::Schema("x".into()).exit_code(), 2);
        assert_eq!(core(Error::NotPrime(6)).exit_code(), 2);
        assert_eq!(core(Error::SizeBound { what: "grid".into(), size: 10, limit: 1 }).exit_code(), 3);
        assert_eq!(core(Error::InvariantBreach("pivots disagree".into())).exit_code(), 4);
        assert_eq!(core(Error::MissingDegree(3)).exit_code(), 4);
    }

    #[test]
    fn lcm_small() {
        assert_eq!(lcm(4, 6), 12);
        assert_eq!(lcm(1, 5), 5);
    }
}
