//! Command implementations for the `stein` binary.
//!
//! Every command returns an [`Outcome`]: the rendered artifact and whether the
//! mathematical check passed. I/O and parse problems are [`CliError`]s.

use std::fs;
use std::path::{Path, PathBuf};

use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use stein_core::barcplx::bar_differential;
use stein_core::cones::{
    bernoulli_reference, bernoulli_specs, coefficient_shuffle_check, shuffle_pieces, st_oracle_is_zero, truncated_fourier_sum,
    FourierSpec, OracleConfig,
};
use stein_core::io::{bar_to_value, parse_st2, parse_steinberg, st2_to_value, steinberg_to_value, vectors_from_value};
use stein_core::mpl::{parse_identity, verify_li_identity, NumericCheck};
use stein_core::qlinalg::{dual_basis, parse_q, qi, random_basis, QVector};
use stein_core::st2::{
    cobracket_residual, dihedral_defects, double_shuffle_defect, dualize, is_coxeter_pair, is_zero_st_infty, make_i, make_l,
    random_non_generic_pair, symbol_i, symbol_l, Family, St2Element,
};
use stein_core::steinberg::{ash_rudolph_reduce, make_apartment, normal_form, SteinbergElement};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    Argument(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

fn parse_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Parse(e.to_string())
}

/// Shared knobs. The seed is written into every artifact.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub seed: u64,
    pub oracle_points: usize,
    pub box_size: i64,
    pub dim: Option<usize>,
    pub weight: Option<u32>,
    pub cases: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig { seed: 0, oracle_points: 5, box_size: 10_000, dim: None, weight: None, cases: None, out: None }
    }
}

impl JobConfig {
    /// Independent generator for case `index`, derived from the job seed.
    pub fn case_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64 + 1);
        rng
    }

    fn oracle(&self) -> OracleConfig {
        OracleConfig { points: self.oracle_points, coord_bound: self.box_size, seed: self.seed }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub passed: bool,
    pub body: String,
}

impl Outcome {
    fn json(passed: bool, v: Value) -> Outcome {
        Outcome { passed, body: serde_json::to_string_pretty(&v).expect("serializable") + "\n" }
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    /// Writes to `--out` when given, stdout otherwise.
    pub fn emit(&self, out: Option<&Path>) -> Result<(), CliError> {
        match out {
            Some(p) => fs::write(p, &self.body).map_err(|source| CliError::Write { path: p.to_path_buf(), source }),
            None => {
                print!("{}", self.body);
                Ok(())
            }
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

/// Flag-basis normal form of a Steinberg element, cross-checked with the ρ oracle.
pub fn cmd_reduce(cfg: &JobConfig, path: &Path) -> Result<Outcome, CliError> {
    let x = parse_steinberg(&read(path)?).map_err(parse_err)?;
    let nf = normal_form(&x);
    let agrees = st_oracle_is_zero(&x.sub(&nf), &cfg.oracle()).map_err(parse_err)?;
    Ok(Outcome::json(
        agrees,
        json!({
            "seed": cfg.seed,
            "ambient": x.ambient(),
            "zero": nf.is_empty(),
            "terms": nf.len(),
            "normal_form": steinberg_to_value(&nf),
            "oracle_agrees": agrees,
        }),
    ))
}

/// s(L[v]) or s(I[v]) as a bar element.
pub fn cmd_symbol(cfg: &JobConfig, kind: &str, vectors: &str) -> Result<Outcome, CliError> {
    let v: Value = serde_json::from_str(vectors).map_err(parse_err)?;
    let v = vectors_from_value(&v).map_err(parse_err)?;
    let d = v.first().map(|x| x.len()).ok_or_else(|| CliError::Argument("no vectors".into()))?;
    if v.iter().any(|x| x.len() != d) {
        return Err(CliError::Argument("vectors have different lengths".into()));
    }
    if make_l(&v).is_err() {
        return Err(CliError::Argument("vectors are linearly dependent".into()));
    }
    let bar = match kind {
        "L" | "l" => symbol_l(&v),
        "I" | "i" => symbol_i(&v),
        other => return Err(CliError::Argument(format!("unknown kind {other}, expected L or I"))),
    };
    let closed = bar_differential(&bar).is_zero();
    Ok(Outcome::json(
        closed,
        json!({
            "seed": cfg.seed,
            "kind": kind.to_uppercase(),
            "terms": bar.len(),
            "cycle": closed,
            "element": bar_to_value(&bar),
        }),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Shuffle,
    Dihedral,
    Cobracket,
    Duality,
    AshRudolph,
}

impl std::str::FromStr for Suite {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Suite, CliError> {
        match s {
            "shuffle" => Ok(Suite::Shuffle),
            "dihedral" => Ok(Suite::Dihedral),
            "cobracket" => Ok(Suite::Cobracket),
            "duality" => Ok(Suite::Duality),
            "ashrudolph" => Ok(Suite::AshRudolph),
            other => Err(CliError::Argument(format!("unknown suite {other}"))),
        }
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Shuffle => "shuffle",
            Suite::Dihedral => "dihedral",
            Suite::Cobracket => "cobracket",
            Suite::Duality => "duality",
            Suite::AshRudolph => "ashrudolph",
        }
    }

    fn default_dim(self) -> usize {
        match self {
            Suite::AshRudolph => 2,
            _ => 3,
        }
    }

    fn default_cases(self) -> usize {
        match self {
            Suite::Shuffle | Suite::Duality => 20,
            Suite::Dihedral => 10,
            Suite::Cobracket => 5,
            Suite::AshRudolph => 50,
        }
    }
}

struct Check {
    name: String,
    passed: bool,
    witness: Option<Value>,
}

impl Check {
    fn st2(name: impl Into<String>, x: &St2Element, zero: bool) -> Check {
        Check { name: name.into(), passed: zero, witness: (!zero).then(|| st2_to_value(&x.normal_form())) }
    }
}

fn vectors_value(v: &[QVector]) -> Value {
    Value::Array(v.iter().map(|x| stein_core::io::vector_to_value(x)).collect())
}

fn random_case(suite: Suite, d: usize, rng: &mut ChaCha8Rng) -> Result<(Value, Vec<Check>), CliError> {
    let v = random_basis(rng, d, 4);
    let mut checks = Vec::new();
    let err = |e: stein_core::St2Error| CliError::Argument(e.to_string());
    match suite {
        Suite::Shuffle => {
            for d1 in 1..d {
                for (kind, name) in [(Family::L, "L"), (Family::I, "I")] {
                    let x = double_shuffle_defect(kind, &v, d1).map_err(err)?;
                    let zero = x.is_zero();
                    checks.push(Check::st2(format!("{name} {d1}+{}", d - d1), &x, zero));
                }
            }
        }
        Suite::Dihedral => {
            for (name, x) in dihedral_defects(&v).map_err(err)? {
                let zero = is_zero_st_infty(&x);
                checks.push(Check::st2(name, &x, zero));
            }
            for k in 1..d {
                let (p, q) = random_non_generic_pair(rng, d, k);
                let x = St2Element::pair_plain(&p, &q);
                let zero = is_coxeter_pair(&p, &q) && is_zero_st_infty(&x);
                checks.push(Check::st2(format!("non-generic at {}", k + 1), &x, zero));
            }
        }
        Suite::Cobracket => {
            let r = cobracket_residual(&v, rng.gen()).map_err(err)?;
            checks.push(Check { name: "cobracket".into(), passed: r == 0, witness: (r != 0).then(|| json!({ "residual_terms": r })) });
        }
        Suite::Duality => {
            let l = make_l(&v).map_err(err)?;
            let dl = dualize(&l).map_err(err)?;
            let dual = dual_basis(&v).map_err(|e| CliError::Argument(e.to_string()))?;
            let rev: Vec<QVector> = dual.iter().rev().cloned().collect();
            let sign = if d % 2 == 0 { qi(1) } else { qi(-1) };
            let x = dl.sub(&make_i(&rev).map_err(err)?.scaled(&sign));
            let zero = x.is_zero();
            checks.push(Check::st2("D(L) = ±I", &x, zero));
            let y = dualize(&dl).map_err(err)?.sub(&l);
            let zero = y.is_zero();
            checks.push(Check::st2("D∘D = id", &y, zero));
        }
        Suite::AshRudolph => unreachable!("handled separately"),
    }
    Ok((vectors_value(&v), checks))
}

/// A random integral apartment with 0 < |det| ≤ bound.
pub fn random_apartment(rng: &mut ChaCha8Rng, d: usize, bound: i64) -> Vec<QVector> {
    let r = if d == 2 { 12 } else { 4 };
    loop {
        let v: Vec<QVector> = (0..d).map(|_| (0..d).map(|_| qi(rng.gen_range(-r..=r))).collect()).collect();
        let det = stein_core::qlinalg::det_of_vectors(&v).abs();
        if !det.is_zero() && det <= qi(bound) {
            return v;
        }
    }
}

/// Unimodular output, ρ-equality with the input, and a term count within the
/// continued-fraction bound 2·log₂|det| + 2 for d = 2.
pub fn ash_rudolph_check(x: &SteinbergElement, oracle: &OracleConfig) -> Result<(bool, usize, Option<Value>), CliError> {
    let y = ash_rudolph_reduce(x).map_err(parse_err)?;
    let unimodular = y.terms().keys().all(|a| a.det().abs() == 1.into());
    let equal = st_oracle_is_zero(&x.sub(&y), oracle).map_err(parse_err)?;
    let within = if x.ambient() == 2 {
        let max_det = x.terms().keys().map(|a| a.det().abs().to_f64().unwrap_or(f64::MAX)).fold(1.0, f64::max);
        (y.len() as f64) <= 2.0 * max_det.log2() * x.len() as f64 + 2.0 * x.len() as f64
    } else {
        true
    };
    let ok = unimodular && equal && within;
    let witness = (!ok).then(|| json!({ "unimodular": unimodular, "oracle_equal": equal, "length_bound": within, "output": steinberg_to_value(&y) }));
    Ok((ok, y.len(), witness))
}

fn report(cfg: &JobConfig, suite: Suite, d: usize, cases: Vec<Value>, passed: bool) -> Outcome {
    Outcome::json(passed, json!({ "suite": suite.name(), "seed": cfg.seed, "dim": d, "passed": passed, "cases": cases }))
}

fn case_value(index: usize, input: Value, checks: &[Check]) -> (Value, bool) {
    let passed = checks.iter().all(|c| c.passed);
    let failures: Vec<Value> =
        checks.iter().filter(|c| !c.passed).map(|c| json!({ "check": c.name, "witness": c.witness })).collect();
    (json!({ "index": index, "input": input, "checks": checks.len(), "passed": passed, "failures": failures }), passed)
}

/// Runs a relation suite on seeded random bases, or on the cases of a fixture
/// file. St² fixtures are `[{name, element}]` with `element` in the St² pair
/// encoding; Ash–Rudolph fixtures are `[{name, apartment}]`.
pub fn cmd_verify(cfg: &JobConfig, suite: Suite, fixture: Option<&Path>) -> Result<Outcome, CliError> {
    let d = cfg.dim.unwrap_or(suite.default_dim());
    if d == 0 || d > 6 {
        return Err(CliError::Argument(format!("dimension {d} out of range")));
    }
    let mut cases = Vec::new();
    let mut all = true;
    if let Some(path) = fixture {
        let raw: Vec<Value> = serde_json::from_str(&read(path)?).map_err(parse_err)?;
        for (i, case) in raw.iter().enumerate() {
            let name = case.get("name").cloned().unwrap_or(Value::Null);
            let checks = match suite {
                Suite::AshRudolph => {
                    let a = case.get("apartment").ok_or_else(|| CliError::Parse("missing apartment".into()))?;
                    let v = vectors_from_value(a).map_err(parse_err)?;
                    let (ok, _, witness) = ash_rudolph_check(&make_apartment(&v), &cfg.oracle())?;
                    vec![Check { name: "reduction".into(), passed: ok, witness }]
                }
                _ => {
                    let e = case.get("element").ok_or_else(|| CliError::Parse("missing element".into()))?;
                    let x = parse_st2(&e.to_string()).map_err(parse_err)?;
                    let zero = if suite == Suite::Shuffle || suite == Suite::Duality { x.is_zero() } else { is_zero_st_infty(&x) };
                    vec![Check::st2("fixture relation", &x, zero)]
                }
            };
            let (v, ok) = case_value(i, name, &checks);
            all &= ok;
            cases.push(v);
        }
        return Ok(report(cfg, suite, d, cases, all));
    }
    let n = cfg.cases.unwrap_or(suite.default_cases());
    for i in 0..n {
        let mut rng = cfg.case_rng(i);
        let (input, checks) = if suite == Suite::AshRudolph {
            let bound = if d == 2 { 100 } else { 50 };
            let v = random_apartment(&mut rng, d, bound);
            let (ok, len, witness) = ash_rudolph_check(&make_apartment(&v), &cfg.oracle())?;
            (vectors_value(&v), vec![Check { name: format!("reduction ({len} terms)"), passed: ok, witness }])
        } else {
            random_case(suite, d, &mut rng)?
        };
        let (v, ok) = case_value(i, input, &checks);
        all &= ok;
        cases.push(v);
    }
    Ok(report(cfg, suite, d, cases, all))
}

/// Verifies a polylogarithm identity file: exactly in St^∞⊗𝕊 and by power series.
pub fn cmd_st(cfg: &JobConfig, path: &Path) -> Result<Outcome, CliError> {
    let (d, terms) = parse_identity(&read(path)?).map_err(parse_err)?;
    let numeric = NumericCheck::default_for(d);
    let rep = verify_li_identity(d, &terms, Some(&numeric)).map_err(parse_err)?;
    let passed = rep.passed();
    let mut body = json!({
        "seed": cfg.seed,
        "ambient": d,
        "weight": rep.weight,
        "terms": terms.len(),
        "st_infty_zero": rep.st_infty_zero,
        "numeric_error": rep.numeric.map(|(e, _)| e),
        "numeric_ok": rep.numeric_ok,
        "verdict": if passed { "PASS" } else { "FAIL" },
    });
    if !rep.st_infty_zero {
        body["residual"] = st2_to_value(&rep.residual);
    }
    Ok(Outcome::json(passed, body))
}

/// Fourier studies. The spec file is `{"study": "bernoulli", "n": 2}` or
/// `{"study": "shuffle", "n1": 1, "n2": 1}`.
pub fn cmd_fourier(cfg: &JobConfig, path: &Path, x: Option<&str>) -> Result<Outcome, CliError> {
    let spec: Value = serde_json::from_str(&read(path)?).map_err(parse_err)?;
    let study = spec.get("study").and_then(Value::as_str).ok_or_else(|| CliError::Parse("missing study".into()))?;
    let int = |k: &str, default: u64| spec.get(k).and_then(Value::as_u64).unwrap_or(default) as u32;
    let mut w = csv::Writer::from_writer(Vec::new());
    let passed = match study {
        "bernoulli" => {
            let n = int("n", cfg.weight.unwrap_or(2) as u64);
            if n == 0 {
                return Err(CliError::Parse("n must be positive".into()));
            }
            let xs = x.map(str::to_string).or_else(|| spec.get("x").and_then(Value::as_str).map(str::to_string)).unwrap_or_else(|| "1/3".into());
            let xq = parse_q(&xs).map_err(parse_err)?;
            let xf = xq.to_f64().ok_or_else(|| CliError::Parse("x out of range".into()))?;
            let reference = bernoulli_reference(n, xf).map_err(parse_err)?;
            let specs: Vec<FourierSpec> = bernoulli_specs(n);
            let tol = if n == 1 { 1e-2 } else { 1e-6 };
            w.write_record(["seed", "n", "x", "M", "re_error", "im_error"]).map_err(parse_err)?;
            let mut ladder = Vec::new();
            let mut m = 10;
            while m < cfg.box_size {
                ladder.push(m);
                m *= 10;
            }
            ladder.push(cfg.box_size);
            let mut last = f64::INFINITY;
            for m in ladder {
                let err = truncated_fourier_sum(&specs, &[xf], m) - reference;
                last = err.norm();
                w.write_record([cfg.seed.to_string(), n.to_string(), xs.clone(), m.to_string(), format!("{:e}", err.re), format!("{:e}", err.im)])
                    .map_err(parse_err)?;
            }
            last <= tol
        }
        "shuffle" => {
            let (n1, n2) = (int("n1", 1), int("n2", 1));
            let a = FourierSpec::standard(&[n1]);
            let b = FourierSpec::standard(&[n2]);
            let m = cfg.box_size.min(200);
            let res = coefficient_shuffle_check(&a, &b, &shuffle_pieces(n1, n2), m);
            w.write_record(["seed", "n1", "n2", "box", "checked", "passed", "witness"]).map_err(parse_err)?;
            let witness = res.witness.as_ref().map(|v| format!("{v:?}")).unwrap_or_default();
            w.write_record([cfg.seed.to_string(), n1.to_string(), n2.to_string(), m.to_string(), res.checked.to_string(), res.passed.to_string(), witness])
                .map_err(parse_err)?;
            res.passed
        }
        other => return Err(CliError::Parse(format!("unknown study {other}"))),
    };
    let body = String::from_utf8(w.into_inner().map_err(parse_err)?).map_err(parse_err)?;
    Ok(Outcome { passed, body })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in [Suite::Shuffle, Suite::Dihedral, Suite::Cobracket, Suite::Duality, Suite::AshRudolph] {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("shufle".parse::<Suite>().is_err());
    }

    #[test]
    fn case_streams_are_independent_and_stable() {
        let cfg = JobConfig { seed: 9, ..JobConfig::default() };
        let a: u64 = cfg.case_rng(0).gen();
        let b: u64 = cfg.case_rng(1).gen();
        assert_ne!(a, b);
        assert_eq!(a, cfg.case_rng(0).gen::<u64>());
    }

    #[test]
    fn random_apartments_respect_bound() {
        let cfg = JobConfig::default();
        for i in 0..20 {
            let v = random_apartment(&mut cfg.case_rng(i), 2, 100);
            let det = stein_core::qlinalg::det_of_vectors(&v).abs();
            assert!(!det.is_zero() && det <= qi(100));
        }
    }
}
