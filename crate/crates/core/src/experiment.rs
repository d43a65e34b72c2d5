//! Batch experiments: configuration, execution, and rendering of results.
//!
//! A configuration is a single JSON document; command-line flags override
//! its fields. Every output embeds the crate version and the fully resolved
//! configuration, and is byte-identical across reruns and thread counts.

use std::path::{Path, PathBuf};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cfuncs::{self, CSpec, DecayBudget};
use crate::error::{Error, Result};
use crate::hyperoctahedral::{self, Weight};
use crate::innerproduct::{self, Coords};
use crate::orthosys::{self, ErrorReport, Ordering};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Ortho,
    Asym,
    Exact,
    DecayRay,
    OrthoScan,
    Gram,
    Stability,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Ortho => "ortho",
            Kind::Asym => "asym",
            Kind::Exact => "exact",
            Kind::DecayRay => "decay-ray",
            Kind::OrthoScan => "ortho-scan",
            Kind::Gram => "gram",
            Kind::Stability => "stability",
        }
    }

    fn parse(s: &str) -> Result<Kind> {
        serde_json::from_value(Value::String(s.into()))
            .map_err(|_| Error::config("experiment", format!("unknown experiment {s:?}")))
    }
}

/// Partially specified configuration, as read from JSON or collected from flags.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: Option<String>,
    pub spec: Option<Value>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "K")]
    pub order: Option<usize>,
    pub ordering: Option<String>,
    pub lambda: Option<Vec<i64>>,
    pub lambdas: Option<Vec<Vec<i64>>>,
    pub max_part: Option<i64>,
    pub l_max: Option<usize>,
    pub m: Option<usize>,
    pub m_ref: Option<usize>,
    pub k_step: Option<usize>,
    pub tol: Option<f64>,
    pub digits: Option<usize>,
    pub output: Option<PathBuf>,
}

impl RawConfig {
    pub fn from_json_str(s: &str) -> Result<RawConfig> {
        serde_json::from_str(s).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<RawConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(self, over: RawConfig) -> RawConfig {
        RawConfig {
            experiment: over.experiment.or(self.experiment),
            spec: over.spec.or(self.spec),
            n: over.n.or(self.n),
            order: over.order.or(self.order),
            ordering: over.ordering.or(self.ordering),
            lambda: over.lambda.or(self.lambda),
            lambdas: over.lambdas.or(self.lambdas),
            max_part: over.max_part.or(self.max_part),
            l_max: over.l_max.or(self.l_max),
            m: over.m.or(self.m),
            m_ref: over.m_ref.or(self.m_ref),
            k_step: over.k_step.or(self.k_step),
            tol: over.tol.or(self.tol),
            digits: over.digits.or(self.digits),
            output: over.output.or(self.output),
        }
    }
}

/// Named parameter sets usable wherever a spec is expected.
pub fn spec_preset(name: &str) -> Option<CSpec> {
    use crate::rational::ratio;
    match name {
        "symplectic" => Some(CSpec::trivial()),
        "hall-littlewood-sample" => Some(CSpec::HallLittlewood {
            t: ratio(1, 3),
            t0: ratio(1, 2),
            t1: ratio(-1, 4),
        }),
        "koornwinder-sample" => Some(CSpec::Koornwinder {
            q: ratio(1, 2),
            t: ratio(1, 3),
            t_r: [ratio(1, 2), ratio(-1, 3), ratio(1, 4), ratio(-1, 5)],
        }),
        _ => None,
    }
}

fn parse_spec(v: &Value) -> Result<CSpec> {
    if let Value::String(name) = v {
        return spec_preset(name).ok_or_else(|| Error::config("spec", format!("unknown preset {name:?}")));
    }
    CSpec::from_json_value(v).map_err(|e| match e {
        Error::Config { field, message } if field != "spec" => Error::Config {
            field: format!("spec.{field}"),
            message,
        },
        other => other,
    })
}

fn weight_field(field: &str, parts: &[i64]) -> Result<Weight> {
    Weight::new(parts.to_vec()).map_err(|_| Error::config(field, format!("{parts:?} is not a dominant weight")))
}

/// Fully resolved configuration.
#[derive(Clone, Debug, Serialize)]
pub struct Config {
    pub experiment: Kind,
    pub spec: CSpec,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub order: usize,
    pub ordering: Ordering,
    pub lambdas: Vec<Weight>,
    pub l_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_ref: Option<usize>,
    pub k_step: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub digits: usize,
    /// Destination file; not part of the embedded config so reruns into
    /// different paths stay byte-identical.
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

pub const DEFAULT_DIGITS: usize = 15;
pub const DEFAULT_L_MAX: usize = 6;
pub const DEFAULT_EXACT_TOL: f64 = 1e-8;

impl Config {
    pub fn resolve(raw: RawConfig) -> Result<Config> {
        let experiment = Kind::parse(
            raw.experiment
                .as_deref()
                .ok_or_else(|| Error::config("experiment", "missing"))?,
        )?;
        let spec = parse_spec(raw.spec.as_ref().ok_or_else(|| Error::config("spec", "missing"))?)?;

        let mut lambdas = Vec::new();
        if let Some(l) = &raw.lambda {
            lambdas.push(weight_field("lambda", l)?);
        }
        for (i, l) in raw.lambdas.iter().flatten().enumerate() {
            lambdas.push(weight_field(&format!("lambdas[{i}]"), l)?);
        }
        let n = match (raw.n, lambdas.first()) {
            (Some(n), _) => n,
            (None, Some(l)) => l.dim(),
            (None, None) => return Err(Error::config("N", "missing (and no weight to infer it from)")),
        };
        if n == 0 {
            return Err(Error::config("N", "rank must be at least 1"));
        }
        for l in &lambdas {
            if l.dim() != n {
                return Err(Error::config("lambda", format!("{l} does not have length N = {n}")));
            }
        }
        if let Some(max) = raw.max_part {
            if max < 0 {
                return Err(Error::config("max_part", "must be nonnegative"));
            }
            lambdas.extend(hyperoctahedral::dominant_weights(n, max));
        }
        lambdas.sort();
        lambdas.dedup();
        if lambdas.is_empty() {
            return Err(Error::config("lambda", "no weights given (use lambda, lambdas or max_part)"));
        }
        let single = matches!(experiment, Kind::DecayRay | Kind::Gram | Kind::Stability);
        if single && lambdas.len() != 1 {
            return Err(Error::config("lambda", format!("{} needs exactly one weight", experiment.name())));
        }

        let order = raw.order.unwrap_or_else(|| innerproduct::default_order(n));
        if order == 0 {
            return Err(Error::config("K", "truncation order must be at least 1"));
        }
        let ordering = match &raw.ordering {
            Some(s) => s.parse()?,
            None => Ordering::Dominance,
        };
        if experiment == Kind::Asym && raw.m.is_none() {
            return Err(Error::config("m", "missing"));
        }
        if let (Some(m), Some(m_ref)) = (raw.m, raw.m_ref) {
            if m_ref < m {
                return Err(Error::config("m_ref", format!("{m_ref} is below m = {m}")));
            }
        }
        let l_max = raw.l_max.unwrap_or(DEFAULT_L_MAX);
        if experiment == Kind::DecayRay {
            if l_max < 1 {
                return Err(Error::config("l_max", "must be at least 1"));
            }
            if hyperoctahedral::min_gap(&lambdas[0]) == 0 {
                return Err(Error::config("lambda", "ray experiments need a strongly dominant weight"));
            }
        }
        if let Some(t) = raw.tol {
            if !(t >= 0.0) {
                return Err(Error::config("tol", "must be a nonnegative number"));
            }
        }
        let tol = match experiment {
            Kind::Exact => Some(raw.tol.unwrap_or(DEFAULT_EXACT_TOL)),
            _ => raw.tol,
        };
        let k_step = raw.k_step.unwrap_or(innerproduct::DEFAULT_STABILITY_STEP);
        Ok(Config {
            experiment,
            spec,
            n,
            order,
            ordering,
            lambdas,
            l_max,
            m: raw.m,
            m_ref: raw.m_ref,
            k_step,
            tol,
            digits: raw.digits.unwrap_or(DEFAULT_DIGITS),
            output: raw.output,
        })
    }
}

/// Rendered results of one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    /// Main output (JSON or CSV).
    pub main: String,
    /// Extra JSON summary (ray experiments only).
    pub summary: Option<String>,
    /// False when a verification check exceeded its tolerance.
    pub passed: bool,
}

fn header(config: &Config) -> Value {
    json!({
        "version": crate::VERSION,
        "config": serde_json::to_value(config).expect("config serializes"),
    })
}

fn csv_preamble(config: &Config) -> String {
    let cfg = serde_json::to_string(config).expect("config serializes");
    format!("# hyperoct {}\n# config: {cfg}\n", crate::VERSION)
}

fn exact_value(r: &Rational, digits: usize) -> Value {
    json!({ "exact": rational::to_string(r), "decimal": rational::to_decimal(r, digits) })
}

fn coords_json(coords: &Coords, digits: usize) -> Value {
    Value::Array(
        coords
            .iter()
            .map(|(w, c)| {
                json!({
                    "weight": w,
                    "value": rational::to_string(c),
                    "decimal": rational::to_decimal(c, digits),
                })
            })
            .collect(),
    )
}

fn label(w: &Weight) -> String {
    let parts: Vec<String> = w.parts().iter().map(|p| p.to_string()).collect();
    format!("\"{}\"", parts.join(","))
}

fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

pub fn run(config: &Config) -> Result<Outcome> {
    match config.experiment {
        Kind::Ortho => run_ortho(config),
        Kind::Asym => run_asym(config),
        Kind::Exact => run_exact(config),
        Kind::DecayRay => run_decay_ray(config),
        Kind::OrthoScan => run_scan(config),
        Kind::Gram => run_gram(config),
        Kind::Stability => run_stability(config),
    }
}

fn run_ortho(config: &Config) -> Result<Outcome> {
    let delta = innerproduct::build_delta(&config.spec, config.n, config.order)?;
    let polys: Vec<orthosys::MonicOrthoPoly> = config
        .lambdas
        .par_iter()
        .map(|l| orthosys::monic_orthogonal(l, config.ordering, &delta))
        .collect::<Result<_>>()?;
    let results: Vec<Value> = polys
        .iter()
        .map(|p| {
            json!({
                "lambda": p.lambda,
                "coords": coords_json(p.coords(), config.digits),
                "norm_sq": exact_value(p.norm_sq(), config.digits),
                "n_lambda": orthosys::fmt_f64(p.n_lambda(), config.digits),
            })
        })
        .collect();
    let mut doc = header(config);
    doc["tail_hint"] = json!(orthosys::fmt_f64(delta.tail_hint(), config.digits));
    doc["results"] = Value::Array(results);
    Ok(Outcome {
        main: to_json_string(&doc),
        summary: None,
        passed: true,
    })
}

fn run_asym(config: &Config) -> Result<Outcome> {
    let m = config.m.expect("resolved");
    let polys: Vec<orthosys::AsymptoticPoly> = config
        .lambdas
        .par_iter()
        .map(|l| orthosys::truncated_asymptotic(l, m, &config.spec))
        .collect::<Result<_>>()?;
    let results: Vec<Value> = polys
        .iter()
        .map(|p| {
            json!({
                "lambda": p.lambda,
                "m": p.m,
                "min_gap": hyperoctahedral::min_gap(&p.lambda),
                "coords": coords_json(&p.coords, config.digits),
            })
        })
        .collect();
    let mut doc = header(config);
    doc["results"] = Value::Array(results);
    Ok(Outcome {
        main: to_json_string(&doc),
        summary: None,
        passed: true,
    })
}

fn run_exact(config: &Config) -> Result<Outcome> {
    let degree = config
        .spec
        .polynomial_degree()
        .ok_or_else(|| Error::config("spec", "exact needs a polynomial family"))?;
    let tol = config.tol.expect("resolved");
    let delta = innerproduct::build_delta(&config.spec, config.n, config.order)?;
    let eligible: Vec<&Weight> = config
        .lambdas
        .iter()
        .filter(|l| hyperoctahedral::min_gap(l) >= degree as i64 - 1)
        .collect();
    let reports: Vec<orthosys::ExactReport> = eligible
        .par_iter()
        .map(|l| orthosys::verify_exact(l, &config.spec, &delta, config.ordering, tol))
        .collect::<Result<_>>()?;
    let d = config.digits;
    let mut out = csv_preamble(config);
    out.push_str("lambda,min_gap,M,coord_dev,coords_equal,norm_dev,pass\n");
    for r in &reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            label(&r.lambda),
            r.min_gap,
            r.degree,
            orthosys::fmt_f64(r.coord_dev, d),
            r.coords_equal,
            r.norm_dev.map(|x| orthosys::fmt_f64(x, d)).unwrap_or_default(),
            r.pass,
        ));
    }
    Ok(Outcome {
        main: out,
        summary: None,
        passed: reports.iter().all(|r| r.pass),
    })
}

/// Ray experiment results before rendering.
#[derive(Clone, Debug)]
pub struct RayResult {
    pub reports: Vec<ErrorReport>,
    /// Slope of `log err − N log ℓ` against ℓ.
    pub ray_fit: Option<orthosys::DecayFit>,
    /// Slope of `log err` against `m(ℓλ)`.
    pub raw_fit: Option<orthosys::DecayFit>,
    /// Slope of `log |𝒩 − 1|` against ℓ.
    pub n_lambda_fit: Option<orthosys::DecayFit>,
    /// Slope of `log |‖P^{(m_ref)}‖ − 1|` against ℓ.
    pub asym_norm_fit: Option<orthosys::DecayFit>,
    /// ℓ values whose error vanished exactly (excluded from fits).
    pub exact_points: Vec<usize>,
}

fn fit_positive(points: &[(f64, f64)]) -> Option<orthosys::DecayFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0.0 && p.1.is_finite())
        .map(|&(x, y)| (x, y.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    orthosys::fit_line(&pts).ok()
}

pub fn ray_experiment(
    lambda: &Weight,
    spec: &CSpec,
    order: usize,
    l_max: usize,
    m_ref: Option<usize>,
) -> Result<RayResult> {
    let n = lambda.dim();
    let delta = innerproduct::build_delta(spec, n, order)?;
    let reports: Vec<ErrorReport> = (1..=l_max)
        .into_par_iter()
        .map(|l| {
            let w = lambda.scale(l as i64);
            let m = hyperoctahedral::min_gap(&w) as usize;
            let m_ref = m_ref.unwrap_or_else(|| orthosys::default_m_ref(spec, m)).max(m);
            orthosys::asymptotic_error(&w, spec, &delta, m, m_ref)
        })
        .collect::<Result<_>>()?;
    let exact_points: Vec<usize> = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| !(r.err_norm_sq > 0.0))
        .map(|(i, _)| i + 1)
        .collect();
    let nf = n as f64;
    let ell = |i: usize| (i + 1) as f64;
    let ray: Vec<(f64, f64)> = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| r.err_norm_sq > 0.0)
        .map(|(i, r)| (ell(i), r.err_norm / ell(i).powf(nf)))
        .collect();
    let raw: Vec<(f64, f64)> = reports
        .iter()
        .filter(|r| r.err_norm_sq > 0.0)
        .map(|r| (r.min_gap as f64, r.err_norm))
        .collect();
    let nl: Vec<(f64, f64)> = reports.iter().enumerate().map(|(i, r)| (ell(i), r.n_lambda_dev)).collect();
    let an: Vec<(f64, f64)> = reports.iter().enumerate().map(|(i, r)| (ell(i), r.asym_norm_dev)).collect();
    Ok(RayResult {
        ray_fit: fit_positive(&ray),
        raw_fit: fit_positive(&raw),
        n_lambda_fit: fit_positive(&nl),
        asym_norm_fit: fit_positive(&an),
        reports,
        exact_points,
    })
}

fn fit_json(f: &Option<orthosys::DecayFit>, bound: Option<f64>, digits: usize) -> Value {
    match f {
        None => json!({ "slope": Value::Null, "bound": bound, "pass": Value::Null }),
        Some(f) => json!({
            "slope": orthosys::fmt_f64(f.slope, digits),
            "intercept": orthosys::fmt_f64(f.intercept, digits),
            "residual": orthosys::fmt_f64(f.residual, digits),
            "bound": bound.map(|b| orthosys::fmt_f64(b, digits)),
            "pass": bound.map(|b| f.slope <= b),
        }),
    }
}

fn run_decay_ray(config: &Config) -> Result<Outcome> {
    let lambda = &config.lambdas[0];
    let r = ray_experiment(lambda, &config.spec, config.order, config.l_max, config.m_ref)?;
    let d = config.digits;
    let mut out = csv_preamble(config);
    out.push_str(ErrorReport::CSV_HEADER);
    out.push('\n');
    for rep in &r.reports {
        out.push_str(&rep.csv_row(d));
        out.push('\n');
    }
    // bounds from the admissible decay rate ε < log(1/q)
    let gap = hyperoctahedral::min_gap(lambda) as f64;
    let (eps, ray_bound, raw_bound, est_bound) = match cfuncs::decay_budget(&config.spec) {
        DecayBudget::Rate(eps) => (
            Some(eps),
            Some(-0.8 * eps * gap),
            Some(-0.4 * eps),
            Some(-0.8 * eps * gap),
        ),
        DecayBudget::ExactBeyond(_) => (None, None, None, None),
    };
    let fits = [
        (&r.ray_fit, ray_bound),
        (&r.raw_fit, raw_bound),
        (&r.n_lambda_fit, est_bound),
        (&r.asym_norm_fit, est_bound),
    ];
    let passed = fits
        .iter()
        .all(|(f, b)| match (f, b) {
            (Some(f), Some(b)) => f.slope <= *b,
            _ => true,
        });
    let mut doc = header(config);
    doc["epsilon"] = json!(eps.map(|e| orthosys::fmt_f64(e, d)));
    doc["exact_points"] = json!(r.exact_points);
    doc["ray_slope"] = fit_json(&r.ray_fit, ray_bound, d);
    doc["raw_slope"] = fit_json(&r.raw_fit, raw_bound, d);
    doc["n_lambda_slope"] = fit_json(&r.n_lambda_fit, est_bound, d);
    doc["asym_norm_slope"] = fit_json(&r.asym_norm_fit, est_bound, d);
    doc["pass"] = json!(passed);
    Ok(Outcome {
        main: out,
        summary: Some(to_json_string(&doc)),
        passed,
    })
}

fn run_scan(config: &Config) -> Result<Outcome> {
    let delta = innerproduct::build_delta(&config.spec, config.n, config.order)?;
    let r = orthosys::orthogonality_scan(&config.lambdas, &delta, config.ordering)?;
    let d = config.digits;
    let mut out = csv_preamble(config);
    out.push_str(&format!("# max_dev: {}\n", orthosys::fmt_f64(r.max_dev, d)));
    out.push_str("weight");
    for w in &r.weights {
        out.push(',');
        out.push_str(&label(w));
    }
    out.push('\n');
    for (w, row) in r.weights.iter().zip(&r.deviations) {
        out.push_str(&label(w));
        for v in row {
            out.push(',');
            out.push_str(&orthosys::fmt_f64(*v, d));
        }
        out.push('\n');
    }
    let passed = config.tol.is_none_or(|t| r.max_dev <= t);
    Ok(Outcome {
        main: out,
        summary: None,
        passed,
    })
}

fn run_gram(config: &Config) -> Result<Outcome> {
    let delta = innerproduct::build_delta(&config.spec, config.n, config.order)?;
    let g = innerproduct::gram_matrix(&config.lambdas[0], &delta)?;
    let minors = g.leading_minors();
    let positive = minors.len() == g.basis.len() && minors.iter().all(|m| m.is_positive());
    let mut out = csv_preamble(config);
    out.push_str(&format!("# positive_definite: {positive}\n"));
    out.push_str(&g.to_csv());
    Ok(Outcome {
        main: out,
        summary: None,
        passed: true,
    })
}

fn run_stability(config: &Config) -> Result<Outcome> {
    let r = innerproduct::stability_probe(&config.lambdas[0], &config.spec, config.n, config.order, config.k_step)?;
    let d = config.digits;
    let mut doc = header(config);
    doc["result"] = json!({
        "lambda": r.lambda,
        "K": r.order,
        "k_step": r.step,
        "diff": orthosys::fmt_f64(r.diff, d),
        "next_diff": orthosys::fmt_f64(r.next_diff, d),
        "ratio": orthosys::fmt_f64(r.ratio, d),
        "diff_exact": rational::to_string(&r.diff_exact),
        "diff_is_zero": r.diff_exact.is_zero(),
    });
    Ok(Outcome {
        main: to_json_string(&doc),
        summary: None,
        passed: true,
    })
}

/// Path of the summary file written next to `output`: `<stem>.summary.json`.
pub fn summary_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    output.with_file_name(format!("{stem}.summary.json"))
}

/// Writes the outcome to `config.output`, or returns the text for stdout.
pub fn write_outcome(config: &Config, outcome: &Outcome) -> Result<Option<String>> {
    match &config.output {
        Some(path) => {
            std::fs::write(path, &outcome.main)?;
            if let Some(s) = &outcome.summary {
                std::fs::write(summary_path(path), s)?;
            }
            Ok(None)
        }
        None => {
            let mut text = outcome.main.clone();
            if let Some(s) = &outcome.summary {
                text.push_str(s);
            }
            Ok(Some(text))
        }
    }
}

/// Process exit status for an error: 2 for configuration and usage
/// problems, 1 for everything raised during the computation.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::Json(_) | Error::NotDominant(_) | Error::Domain(_) => 2,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(json: &str) -> RawConfig {
        RawConfig::from_json_str(json).unwrap()
    }

    #[test]
    fn resolves_defaults() {
        let c = Config::resolve(raw(r#"{"experiment":"ortho","spec":"symplectic","lambda":[2,1]}"#)).unwrap();
        assert_eq!(c.n, 2);
        assert_eq!(c.order, 30);
        assert_eq!(c.digits, DEFAULT_DIGITS);
        assert_eq!(c.ordering, Ordering::Dominance);
        let c = Config::resolve(raw(r#"{"experiment":"exact","spec":"symplectic","N":3,"max_part":1}"#)).unwrap();
        assert_eq!(c.order, 12);
        assert_eq!(c.lambdas.len(), 4);
        assert_eq!(c.tol, Some(DEFAULT_EXACT_TOL));
    }

    #[test]
    fn bad_rational_names_field() {
        let r = raw(r#"{"experiment":"ortho","spec":{"family":"hall-littlewood","t":"1/0","t0":"0","t1":"0"},"lambda":[1]}"#);
        match Config::resolve(r) {
            Err(e @ Error::Config { .. }) => {
                assert!(e.to_string().contains("spec.t"), "{e}");
                assert_eq!(exit_code(&e), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(RawConfig::from_json_str(r#"{"bogus":1}"#).is_err());
        assert!(Config::resolve(raw(r#"{"experiment":"ortho","spec":"symplectic","lambda":[1,2]}"#)).is_err());
        assert!(Config::resolve(raw(r#"{"experiment":"nope","spec":"symplectic","lambda":[1]}"#)).is_err());
        assert!(Config::resolve(raw(r#"{"experiment":"gram","spec":"symplectic","N":1,"max_part":2}"#)).is_err());
        assert!(Config::resolve(raw(r#"{"experiment":"decay-ray","spec":"symplectic","lambda":[1,1]}"#)).is_err());
        assert!(Config::resolve(raw(r#"{"experiment":"asym","spec":"symplectic","lambda":[1]}"#)).is_err());
    }

    #[test]
    fn merge_prefers_override() {
        let base = raw(r#"{"experiment":"ortho","K":5,"N":2}"#);
        let over = RawConfig {
            order: Some(7),
            ..Default::default()
        };
        let m = base.merge(over);
        assert_eq!(m.order, Some(7));
        assert_eq!(m.n, Some(2));
    }

    #[test]
    fn symplectic_exact_passes() {
        let c = Config::resolve(raw(r#"{"experiment":"exact","spec":"symplectic","N":2,"K":2,"max_part":3,"tol":0}"#)).unwrap();
        let o = run(&c).unwrap();
        assert!(o.passed);
        assert!(o.main.starts_with("# hyperoct "));
        assert!(!o.main.contains(",false\n"));
    }

    #[test]
    fn summary_path_uses_stem() {
        assert_eq!(summary_path(Path::new("/tmp/ray.csv")), PathBuf::from("/tmp/ray.summary.json"));
    }
}
