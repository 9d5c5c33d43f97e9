//! The four subcommands. Each is a pure function of its configuration and inputs.

use std::fs;
use std::path::{Path, PathBuf};

use mfleaders::formalism::{
    legendre_spectrum, measure_legendre, measure_tau, scaling_function, structure_function, upper_bound_check,
    SpectrumEstimate,
};
use mfleaders::generators::{
    davenport, prescribed_series, transference_series, two_exponent_series, weierstrass, GroundTruth,
};
use mfleaders::leaders::{
    compute_leaders, dyadic_radii, estimate_exponent, irregularity_certificate, local_leaders, oscillation_exponents,
    Bound, CertificateConfig, EstimateMode, ExponentEstimate, LeaderPyramid, Probe,
};
use mfleaders::measures::{cascade, multinomial, multinomial_tau, BAdicMeasure, CascadeSpec, WeightLaw};
use mfleaders::verify::{run_all, suite, CriterionReport};
use mfleaders::wavelet::{analyze as dwt, CoefficientPyramid, Normalization};
use serde_json::{json, Value};

use crate::config::{parse_profile, ExperimentConfig, Format};
use crate::format::{encode_csv, encode_mfs1, read_input, Input};
use crate::report::{nums, num, opt, stamped, write_bytes, write_csv, write_json};
use crate::CliError;

/// Slack of the upper-bound inequality reported by `analyze`.
pub const UPPER_BOUND_SLACK: f64 = 0.1;

fn truth_path(dir: &Path, base: &str) -> PathBuf {
    dir.join(format!("{base}.truth.json"))
}

/// File name up to the first dot: `davenport.pyramid.json` has base `davenport`.
fn base_name(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("input");
    name.split('.').next().filter(|s| !s.is_empty()).unwrap_or("input").to_string()
}

fn truth_json(c: &ExperimentConfig, truth: Option<&GroundTruth>, extra: Value) -> Result<Value, CliError> {
    let truth = match truth {
        Some(t) => serde_json::to_value(t).map_err(|e| CliError::Validation(e.to_string()))?,
        None => Value::Null,
    };
    let mut body = json!({
        "construction": c.construction,
        "config": c.canonical_text(),
        "truth": truth,
    });
    if let (Value::Object(b), Value::Object(e)) = (&mut body, extra) {
        b.extend(e);
    }
    Ok(stamped(c, body))
}

fn write_signal(c: &ExperimentConfig, samples: &[f64], truth: &GroundTruth) -> Result<Vec<PathBuf>, CliError> {
    let name = &c.construction;
    let (path, bytes) = match c.format {
        Format::Mfs1 => (c.out.join(format!("{name}.mfs1")), encode_mfs1(samples)),
        Format::Csv => (c.out.join(format!("{name}.csv")), encode_csv(samples).into_bytes()),
    };
    let data = write_bytes(&path, &bytes)?;
    let side = truth_json(c, Some(truth), json!({ "kind": "signal", "levels": c.levels, "samples": samples.len() }))?;
    Ok(vec![data, write_json(&truth_path(&c.out, name), &side)?])
}

fn write_pyramid(c: &ExperimentConfig, p: &CoefficientPyramid, truth: &GroundTruth) -> Result<Vec<PathBuf>, CliError> {
    let name = &c.construction;
    let body = serde_json::to_value(p.to_file()).map_err(|e| CliError::Validation(e.to_string()))?;
    let data = write_json(&c.out.join(format!("{name}.pyramid.json")), &stamped(c, body))?;
    let side = truth_json(c, Some(truth), json!({ "kind": "pyramid", "levels": p.levels() }))?;
    Ok(vec![data, write_json(&truth_path(&c.out, name), &side)?])
}

fn write_measure(c: &ExperimentConfig, m: &BAdicMeasure, extra: Value) -> Result<Vec<PathBuf>, CliError> {
    let name = &c.construction;
    let body = serde_json::to_value(m.to_file()).map_err(|e| CliError::Validation(e.to_string()))?;
    let data = write_json(&c.out.join(format!("{name}.measure.json")), &stamped(c, body))?;
    let side = truth_json(c, None, extra)?;
    Ok(vec![data, write_json(&truth_path(&c.out, name), &side)?])
}

fn truncation(c: &ExperimentConfig) -> Option<usize> {
    (c.terms > 0).then_some(c.terms)
}

pub fn generate(c: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let w = c.wavelet_spec()?;
    match c.construction.as_str() {
        "davenport" => {
            let g = davenport(c.beta, c.levels, truncation(c))?;
            write_signal(c, &g.data, &g.truth)
        }
        "weierstrass" => {
            let g = weierstrass(&parse_profile(&c.h)?, c.lambda, c.levels, truncation(c))?;
            write_signal(c, &g.data, &g.truth)
        }
        "prescribed" => {
            let g = prescribed_series(&parse_profile(&c.h)?, &w, c.levels)?;
            write_pyramid(c, &g.data, &g.truth)
        }
        "two-exponent" => {
            let g = two_exponent_series(&parse_profile(&c.h_lo)?, &parse_profile(&c.h_hi)?, &w, c.levels)?;
            write_pyramid(c, &g.data, &g.truth)
        }
        "transference" => {
            let m = multinomial(2, &c.weights, c.levels.saturating_sub(1))?;
            let g = transference_series(&m, c.s0, c.p0, &w, c.levels)?;
            write_pyramid(c, &g.data, &g.truth)
        }
        "multinomial" => {
            let m = multinomial(c.b, &c.weights, c.depth)?;
            write_measure(c, &m, json!({ "kind": "measure", "weights": nums(&c.weights) }))
        }
        "cascade" => {
            let spec = CascadeSpec::new(c.b, WeightLaw::parse(&c.law)?)?;
            let m = cascade(&spec, c.depth, c.seed)?;
            let nd = spec.nondegeneracy();
            let extra = json!({
                "kind": "measure",
                "law": c.law,
                "nondegeneracy": {
                    "mean_form": num(nd.mean_form),
                    "entropy_form": num(nd.entropy_form),
                    "holds": nd.holds(),
                },
            });
            write_measure(c, &m, extra)
        }
        other => Err(CliError::Validation(format!(
            "construction: unknown {other:?}; expected davenport, weierstrass, prescribed, two-exponent, \
             transference, multinomial or cascade"
        ))),
    }
}

fn read_truth(input: &Path) -> Result<Option<GroundTruth>, CliError> {
    let path = truth_path(input.parent().unwrap_or(Path::new("")), &base_name(input));
    let Ok(text) = fs::read_to_string(&path) else {
        return Ok(None);
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Format {
        offset: 0,
        message: format!("{}: {e}", path.display()),
    })?;
    match v.get("truth") {
        None | Some(Value::Null) => Ok(None),
        Some(t) => serde_json::from_value(t.clone())
            .map(Some)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display()))),
    }
}

fn leaders_of(input: &Input, c: &ExperimentConfig) -> Result<LeaderPyramid, CliError> {
    match input {
        Input::Signal(s) => Ok(compute_leaders(&dwt(s, &c.wavelet_spec()?)?)?),
        Input::Pyramid(p) => Ok(compute_leaders(&p.renormalize(Normalization::Linf))?),
        Input::Measure(_) => Err(CliError::Validation(
            "input: a measure is analysed with --tau".into(),
        )),
    }
}

fn spectrum_json(s: &SpectrumEstimate) -> Value {
    json!({ "h": nums(&s.h), "D": nums(&s.d) })
}

pub fn analyze(input: &Path, c: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let data = read_input(input)?;
    let base = base_name(input);
    if c.tau || matches!(data, Input::Measure(_)) {
        let Input::Measure(m) = &data else {
            return Err(CliError::Validation("tau: input is not a measure".into()));
        };
        return analyze_measure(m, &base, c);
    }
    let lp = leaders_of(&data, c)?;
    let levels = lp.levels();
    let window = c.window_for(levels)?;
    let sf = structure_function(&lp, &c.pgrid.points(), 1..=levels - 1)?;
    let omega = scaling_function(&sf, window)?;
    let spec = legendre_spectrum(&omega, &c.hgrid.points(), 1.0);

    let truth = read_truth(input)?;
    let bound = truth.as_ref().and_then(|t| {
        let support = t.support()?;
        t.spectrum(support.0)?;
        let chk = upper_bound_check(&spec, |h| t.spectrum(h).unwrap_or(f64::NEG_INFINITY), support, UPPER_BOUND_SLACK);
        Some(json!({
            "description": t.description(),
            "support": [num(support.0), num(support.1)],
            "slack": UPPER_BOUND_SLACK,
            "pass": chk.pass,
            "margin": num(chk.margin),
            "worst_h": num(chk.worst_h),
            "points": chk.points,
        }))
    });

    let dir = &c.out;
    let mut files = Vec::new();
    let leaders = json!({
        "J": levels,
        "levels": (0..levels).map(|j| nums(lp.level(j))).collect::<Vec<_>>(),
    });
    files.push(write_json(&dir.join(format!("{base}.leaders.json")), &stamped(c, leaders))?);

    let mut rows = Vec::new();
    for (i, &j) in sf.scales.iter().enumerate() {
        for (k, &p) in sf.p.iter().enumerate() {
            rows.push(vec![j as f64, p, sf.log2_values[i][k], sf.counts[i] as f64, sf.excluded[i] as f64]);
        }
    }
    files.push(write_csv(
        &dir.join(format!("{base}.structure.csv")),
        c,
        "j [scale],p [moment],log2_S [log2 units],count [cells],excluded [cells]",
        &rows,
    )?);
    let rows: Vec<Vec<f64>> = omega.p.iter().zip(&omega.omega).zip(&omega.r2).map(|((p, w), r)| vec![*p, *w, *r]).collect();
    files.push(write_csv(&dir.join(format!("{base}.omega.csv")), c, "p [moment],omega [exponent],r2 [1]", &rows)?);
    let rows: Vec<Vec<f64>> = spec.h.iter().zip(&spec.d).map(|(h, d)| vec![*h, *d]).collect();
    files.push(write_csv(&dir.join(format!("{base}.spectrum.csv")), c, "h [exponent],D [dimension]", &rows)?);

    let apex = spec.apex();
    let report = json!({
        "input": input.display().to_string(),
        "kind": match data { Input::Signal(_) => "signal", _ => "pyramid" },
        "levels": levels,
        "wavelet": c.wavelet,
        "fit": [window.start, window.end],
        "structure_function": {
            "scales": sf.scales,
            "counts": sf.counts,
            "excluded": sf.excluded,
        },
        "scaling_function": {
            "p": nums(&omega.p),
            "omega": nums(&omega.omega),
            "r2": nums(&omega.r2),
            "max_second_difference": num(omega.max_second_difference()),
        },
        "spectrum": spectrum_json(&spec),
        "apex": apex.map(|(h, d)| json!({ "h": num(h), "D": num(d) })),
        "upper_bound": bound,
    });
    files.push(write_json(&dir.join(format!("{base}.report.json")), &stamped(c, report))?);
    Ok(files)
}

fn analyze_measure(m: &BAdicMeasure, base: &str, c: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let depths = c.depths.unwrap_or((m.depth().div_ceil(2).max(1), m.depth()));
    let q = c.qgrid.points();
    let tau = measure_tau(m, &q, depths.0..=depths.1)?;
    let spec = measure_legendre(&tau, &c.hgrid.points());
    let dir = &c.out;
    let mut files = Vec::new();
    let rows: Vec<Vec<f64>> = tau.q.iter().zip(&tau.tau).zip(&tau.r2).map(|((q, t), r)| vec![*q, *t, *r]).collect();
    files.push(write_csv(&dir.join(format!("{base}.tau.csv")), c, "q [moment],tau [exponent],r2 [1]", &rows)?);
    let rows: Vec<Vec<f64>> = spec.h.iter().zip(&spec.d).map(|(h, d)| vec![*h, *d]).collect();
    files.push(write_csv(&dir.join(format!("{base}.spectrum.csv")), c, "alpha [exponent],D [dimension]", &rows)?);
    let analytic = m.weights().map(|w| {
        let err = tau.q.iter().zip(&tau.tau).map(|(q, t)| (t - multinomial_tau(w, *q)).abs()).fold(0.0, f64::max);
        json!({ "weights": nums(w), "max_abs_tau_error": num(err) })
    });
    let report = json!({
        "kind": "measure",
        "base": m.base(),
        "depth": m.depth(),
        "depths": [depths.0, depths.1],
        "tau": { "q": nums(&tau.q), "tau": nums(&tau.tau), "r2": nums(&tau.r2) },
        "spectrum": spectrum_json(&spec),
        "multinomial": analytic,
    });
    files.push(write_json(&dir.join(format!("{base}.report.json")), &stamped(c, report))?);
    Ok(files)
}

fn estimate_json(e: &ExponentEstimate) -> Value {
    json!({
        "liminf": num(e.liminf),
        "limsup": num(e.limsup),
        "limit": opt(e.limit),
        "range": [num(e.range.0), num(e.range.1)],
        "r2": num(e.r2),
    })
}

fn bound_json(b: &Bound) -> Value {
    json!({ "constant": num(b.constant), "trend": num(b.trend), "pass": b.pass })
}

pub fn pointwise(input: &Path, c: &ExperimentConfig) -> Result<PathBuf, CliError> {
    let data = read_input(input)?;
    let lp = leaders_of(&data, c)?;
    let window = c.window_for(lp.levels())?;
    let truth = read_truth(input)?;
    let mut out = Vec::new();
    for &x in &c.points {
        let s = local_leaders(&lp, x)?;
        let contaminated = window.scales().any(|j| s.contaminated[j]);
        let used = if contaminated { window.waived() } else { window };
        let est = estimate_exponent(&s, used, EstimateMode::Limit)?;
        let certificate = match c.certificate {
            Some((alpha, beta)) => {
                let cert = irregularity_certificate(&s, alpha, beta, used, &CertificateConfig::default())?;
                json!({
                    "alpha": num(alpha),
                    "beta": num(beta),
                    "sufficient": bound_json(&cert.sufficient),
                    "necessary": bound_json(&cert.necessary),
                })
            }
            None => Value::Null,
        };
        let oscillation = match (&data, c.oscillation) {
            (Input::Signal(samples), true) => {
                let j = samples.len().trailing_zeros() as usize;
                if j < 13 {
                    return Err(CliError::Validation(format!(
                        "oscillation: {} samples are too few for six admissible radii",
                        samples.len()
                    )));
                }
                estimate_json(&oscillation_exponents(&Probe::Samples(samples), x, &dyadic_radii(3, j - 4), 1)?)
            }
            (_, true) => {
                return Err(CliError::Validation("oscillation: the cross-check needs a sampled signal".into()));
            }
            _ => Value::Null,
        };
        out.push(json!({
            "x": num(x),
            "contaminated": contaminated,
            "fit": [used.start, used.end],
            "estimate": estimate_json(&est),
            "certificate": certificate,
            "oscillation": oscillation,
            "truth": {
                "lower": opt(truth.as_ref().and_then(|t| t.lower_exponent(x))),
                "upper": opt(truth.as_ref().and_then(|t| t.upper_exponent(x))),
            },
        }));
    }
    let report = json!({
        "input": input.display().to_string(),
        "levels": lp.levels(),
        "wavelet": c.wavelet,
        "points": out,
    });
    write_json(&c.out.join(format!("{}.pointwise.json", base_name(input))), &stamped(c, report))
}

fn report_json(r: &CriterionReport) -> Value {
    json!({
        "id": r.id,
        "name": r.name,
        "passed": r.passed,
        "runtime_s": num(r.runtime_s),
        "budget_s": opt(r.budget_s),
        "checks": r.checks.iter().map(|k| json!({
            "label": k.label,
            "measured": num(k.measured),
            "comparison": serde_json::to_value(k.comparison).unwrap_or(Value::Null),
            "passed": k.passed,
        })).collect::<Vec<_>>(),
    })
}

/// Runs the suites, prints one line per criterion and writes `verify.json`.
/// Returns whether every criterion passed.
pub fn verify(name: &str, c: &ExperimentConfig) -> Result<bool, CliError> {
    let reports = if name == "all" {
        run_all()
    } else {
        let s = suite(name).ok_or_else(|| CliError::Validation(format!("suite: unknown {name:?}")))?;
        vec![s.run()]
    };
    for r in &reports {
        println!("{}", r.line());
    }
    let passed = reports.iter().all(|r| r.passed);
    let body = json!({
        "suite": name,
        "passed": passed,
        "criteria": reports.iter().map(report_json).collect::<Vec<_>>(),
    });
    write_json(&c.out.join("verify.json"), &stamped(c, body))?;
    Ok(passed)
}
