//! One computation per job: the shared back end of the command line and of
//! the golden fixtures. Every job renders to a byte-stable artifact.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::correspondence::{membership_a, membership_b, rho_inf, rho_word, sft_approx_sequence, to_hole_system};
use crate::error::{Error, Result};
use crate::input::{parse_params, parse_rational, parse_scalar};
use crate::itinerary::{expansion, Params, Variant};
use crate::kneading::{
    is_sft, kneading_invariants, pair_polynomial, system_from_kneading_pair, validate_kneading_pair, Validity,
};
use crate::numerics::{Scalar, DEFAULT_PRECISION};
use crate::oracles::{box_counting_dim, brute_force_language, escape_fraction};
use crate::sft::{compile, Transitivity};
use crate::survivor::{critical_hole, dimension_sweep, eta_kneading, in_bifurcation_set, sweep_csv, SurvivorConfig};
use crate::winning::{parse_gamma, winning_report};
use crate::words::{is_balanced, EPWord};

/// Environment variable holding the default ball precision in bits.
pub const PRECISION_ENV: &str = "BETAFLOW_PRECISION";

pub fn default_precision() -> u32 {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&p| p >= 16)
        .unwrap_or(DEFAULT_PRECISION)
}

fn default_steps() -> usize {
    64
}

fn default_depth() -> usize {
    30
}

fn default_t_max() -> String {
    String::from("9/10")
}

fn default_lyndon() -> usize {
    SurvivorConfig::default().lyndon_bound
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SftEmit {
    Dot,
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "oracle", rename_all = "kebab-case")]
pub enum OracleJob {
    Language { beta: String, alpha: String, n: usize },
    BoxCount { beta: String, alpha: String, t: String, grid: usize, steps: usize },
    Escape { beta: String, alpha: String, t: String, samples: usize, steps: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    Expand {
        beta: String,
        alpha: String,
        x: String,
        #[serde(default = "upper")]
        variant: Variant,
        #[serde(default = "default_steps")]
        steps: usize,
    },
    Kneading {
        beta: String,
        alpha: String,
    },
    Solve {
        lower: String,
        upper: String,
    },
    Conjugate {
        beta: String,
        alpha: String,
        #[serde(default)]
        xi: Option<String>,
    },
    Sft {
        beta: String,
        alpha: String,
        emit: SftEmit,
    },
    Sweep {
        beta: String,
        alpha: String,
        samples: usize,
        #[serde(default = "default_depth")]
        depth: usize,
        #[serde(default = "default_t_max")]
        t_max: String,
        #[serde(default = "default_lyndon")]
        lyndon_bound: usize,
    },
    Bifurcation {
        beta: String,
        alpha: String,
        #[serde(default)]
        t: Option<String>,
        #[serde(default)]
        critical: bool,
        #[serde(default = "default_steps")]
        depth: usize,
    },
    ApproxSft {
        beta: String,
        alpha: String,
        n: usize,
    },
    Winning {
        beta: String,
        alpha: String,
        xi: String,
        gamma: String,
        depth: usize,
    },
    Oracle(OracleJob),
}

fn upper() -> Variant {
    Variant::Upper
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
    Dot,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Dot => "dot",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub format: Format,
    pub body: String,
}

impl Artifact {
    fn text(lines: &[(&str, String)]) -> Artifact {
        let mut body = String::new();
        for (k, v) in lines {
            body.push_str(&format!("{k}: {v}\n"));
        }
        Artifact { format: Format::Text, body }
    }

    fn json(v: &impl Serialize) -> Result<Artifact> {
        let value = serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Artifact { format: Format::Json, body: canonical_json(&value) })
    }
}

/// Sorted keys, floats rounded to 12 significant digits, two-space indent.
pub fn canonical_json(v: &serde_json::Value) -> String {
    fn round(v: &serde_json::Value) -> serde_json::Value {
        use serde_json::Value;
        match v {
            Value::Number(n) if n.is_f64() => {
                let x = n.as_f64().unwrap();
                let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
                serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
            }
            Value::Array(a) => Value::Array(a.iter().map(round).collect()),
            Value::Object(o) => Value::Object(o.iter().map(|(k, v)| (k.clone(), round(v))).collect()),
            other => other.clone(),
        }
    }
    let mut s = serde_json::to_string_pretty(&round(v)).unwrap_or_default();
    s.push('\n');
    s
}

fn dec(x: f64) -> String {
    format!("{x:.12}")
}

fn params(beta: &str, alpha: &str, prec: u32) -> Result<Params> {
    parse_params(beta, alpha, prec)
}

/// Run a job at the given ball precision.
pub fn run(job: &Job, prec: u32) -> Result<Artifact> {
    match job {
        Job::Expand { beta, alpha, x, variant, steps } => {
            let p = params(beta, alpha, prec)?;
            let x = parse_scalar(x, p.beta(), prec)?;
            let e = expansion(&p, &x, *variant, *steps)?;
            Ok(Artifact { format: Format::Text, body: format!("{e}\n") })
        }
        Job::Kneading { beta, alpha } => {
            let p = params(beta, alpha, prec)?;
            let k = kneading_invariants(&p)?;
            let sft = is_sft(&p)?;
            Ok(Artifact::text(&[
                ("lower", k.lower.to_string()),
                ("upper", k.upper.to_string()),
                ("tau_minus_one", k.tau_minus_one().to_string()),
                ("tau_plus_zero", k.tau_plus_zero().to_string()),
                ("validity", validate_kneading_pair(&k.lower, &k.upper)?.to_string()),
                ("sft", serde_json::to_value(sft).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()),
                ("balanced_tau_minus_one", is_balanced(&k.tau_minus_one()).to_string()),
            ]))
        }
        Job::Solve { lower, upper } => {
            let (lo, up): (EPWord, EPWord) = (lower.parse()?, upper.parse()?);
            let validity = validate_kneading_pair(&lo, &up)?;
            if !validity.is_valid() {
                return Err(Error::NotAdmissible(format!("pair ({lo}, {up}) is {validity}")));
            }
            let p = system_from_kneading_pair(&lo, &up)?;
            let b = p.beta_real().ok_or_else(|| Error::NotAdmissible("β is not exact".into()))?;
            Ok(Artifact::text(&[
                ("validity", validity.to_string()),
                ("pair_polynomial", pair_polynomial(&lo, &up).to_string()),
                ("beta_minpoly", b.poly().to_string()),
                ("beta_minimal", b.is_minimal().to_string()),
                ("beta_interval", format!("({}, {})", b.lo(), b.hi())),
                ("beta", dec(b.to_f64())),
                ("alpha", p.alpha().to_string()),
                ("alpha_decimal", dec(p.alpha().to_f64())),
            ]))
        }
        Job::Conjugate { beta, alpha, xi } => {
            let p = params(beta, alpha, prec)?;
            let h = to_hole_system(&p)?;
            let mut lines = vec![
                ("beta_prime_minpoly", h.beta_prime.poly().to_string()),
                ("beta_prime", dec(h.beta_prime.to_f64())),
                ("hole_t", h.hole_t.to_string()),
                ("hole_t_decimal", dec(h.hole_t.to_f64())),
                ("hole_word", h.hole_word.to_string()),
            ];
            match (rho_word(&h.beta_prime), rho_inf(&h.beta_prime)) {
                (Ok(w), Ok(r)) => {
                    lines.push(("rho_word", w.to_string()));
                    lines.push(("rho_decimal", dec(r.to_f64())));
                }
                (Err(e), _) | (_, Err(e)) => lines.push(("rho_word", format!("ERR:{}", e.code()))),
            }
            if let Some(xi) = xi {
                let w: EPWord = xi.parse()?;
                let b = membership_b(&h.beta_prime, &w)?;
                let a = match membership_a(&h.beta_prime, &w)? {
                    Validity::Valid => String::from("YES"),
                    Validity::Invalid(c) => format!("NO({c})"),
                };
                lines.push(("xi", w.to_string()));
                lines.push(("xi_in_e_plus", b.in_e_plus.to_string()));
                lines.push(("xi_below_rho", b.below_rho.to_string()));
                lines.push(("xi_positive_entropy", b.positive_entropy.to_string()));
                lines.push(("membership_b", b.member().to_string()));
                lines.push(("membership_a", a));
            }
            Ok(Artifact::text(&lines))
        }
        Job::Sft { beta, alpha, emit } => {
            let p = params(beta, alpha, prec)?;
            let s = compile(&p)?;
            match emit {
                SftEmit::Dot => Ok(Artifact { format: Format::Dot, body: s.to_dot() }),
                SftEmit::Csv => Ok(Artifact { format: Format::Csv, body: s.to_csv() }),
                SftEmit::Json => {
                    let transitivity = s.transitivity_report()?;
                    let mixing = if transitivity == Transitivity::Transitive { Some(s.mixing_time()?) } else { None };
                    Artifact::json(&serde_json::json!({
                        "cells": s.num_cells(),
                        "points": s.points.iter().map(Scalar::to_f64).collect::<Vec<_>>(),
                        "letters": s.letters,
                        "adjacency": s.adjacency,
                        "characteristic_polynomial": s.characteristic_polynomial().to_string(),
                        "perron_root_is_beta": s.perron_root_is_beta()?,
                        "entropy": s.entropy()?,
                        "transitivity": transitivity,
                        "mixing_time": mixing,
                    }))
                }
            }
        }
        Job::Sweep { beta, alpha, samples, depth, t_max, lyndon_bound } => {
            let p = params(beta, alpha, prec)?;
            let t_max = parse_rational(t_max)?;
            let cfg = SurvivorConfig { lyndon_bound: *lyndon_bound, depth: *depth, ..SurvivorConfig::default() };
            let rows = dimension_sweep(&p, *samples, &t_max, &cfg)?;
            Ok(Artifact { format: Format::Csv, body: sweep_csv(&rows) })
        }
        Job::Bifurcation { beta, alpha, t, critical, depth } => {
            let p = params(beta, alpha, prec)?;
            let mut lines = Vec::new();
            if let Some(t) = t {
                let t = parse_scalar(t, p.beta(), prec)?;
                let h = in_bifurcation_set(&p, &t, *depth)?;
                lines.push(("t", t.to_string()));
                lines.push(("t_decimal", dec(t.to_f64())));
                lines.push(("t_word", h.t_word.to_string()));
                lines.push(("e_plus", h.in_e_plus.to_string()));
                if let crate::survivor::EPlus::Yes { witness } = &h.in_e_plus {
                    lines.push(("witness", witness.to_string()));
                }
                match eta_kneading(&p, &t, &SurvivorConfig::default()) {
                    Ok(k) => {
                        lines.push(("eta", format!("{:.9}", k.eta)));
                        lines.push(("plateau", k.plateau.id()));
                    }
                    Err(e) => lines.push(("eta", format!("ERR:{}", e.code()))),
                }
            }
            if *critical || t.is_none() {
                let c = critical_hole(&p)?;
                lines.push(("critical_hole", c.t.to_string()));
                lines.push(("critical_hole_decimal", dec(c.t.to_f64())));
                lines.push((
                    "critical_method",
                    serde_json::to_value(c.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                ));
                let q = kneading_invariants(&p)?.tau_minus_one();
                lines.push(("balanced_tau_minus_one", is_balanced(&q).to_string()));
            }
            Ok(Artifact::text(&lines))
        }
        Job::ApproxSft { beta, alpha, n } => {
            let p = params(beta, alpha, prec)?;
            let steps = sft_approx_sequence(&p, *n)?;
            let mut body =
                String::from("k,beta_minpoly,beta,alpha,lower,upper,agreement,contained,hausdorff_log2_bound\n");
            for (k, s) in steps.iter().enumerate() {
                body.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    k + 1,
                    s.params.beta_real().map(|b| b.poly().to_string()).unwrap_or_default(),
                    dec(s.params.beta().to_f64()),
                    dec(s.params.alpha().to_f64()),
                    s.pair.lower,
                    s.pair.upper,
                    s.agreement,
                    s.contained,
                    s.distance_exponent()
                ));
            }
            Ok(Artifact { format: Format::Csv, body })
        }
        Job::Winning { beta, alpha, xi, gamma, depth } => {
            let p = params(beta, alpha, prec)?;
            let xi = parse_scalar(xi, p.beta(), prec)?;
            let gamma: BigRational = parse_gamma(gamma)?;
            let r = winning_report(&p, &xi, &gamma, *depth)?;
            Artifact::json(&r)
        }
        Job::Oracle(o) => run_oracle(o, prec),
    }
}

fn run_oracle(o: &OracleJob, prec: u32) -> Result<Artifact> {
    match o {
        OracleJob::Language { beta, alpha, n } => {
            let p = params(beta, alpha, prec)?;
            if !p.is_exact() {
                return Err(Error::InvalidParams("the language oracle needs exact parameters".into()));
            }
            let mut body = String::from("n,count\n");
            for k in 1..=*n {
                body.push_str(&format!("{k},{}\n", brute_force_language(&p, k)?.count()));
            }
            Ok(Artifact { format: Format::Csv, body })
        }
        OracleJob::BoxCount { beta, alpha, t, grid, steps } => {
            let p = params(beta, alpha, prec)?;
            let ts = parse_scalar(t, p.beta(), prec)?;
            let dim = box_counting_dim(&p, &ts, *grid, *steps);
            Artifact::json(&serde_json::json!({ "t": ts.to_f64(), "grid": grid, "steps": steps, "dimension": dim }))
        }
        OracleJob::Escape { beta, alpha, t, samples, steps, seed } => {
            let p = params(beta, alpha, prec)?;
            let ts = parse_scalar(t, p.beta(), prec)?;
            let f = escape_fraction(&p, &ts, *samples, *steps, *seed);
            Artifact::json(&serde_json::json!({
                "t": ts.to_f64(), "samples": samples, "steps": steps, "seed": seed, "escape_fraction": f
            }))
        }
    }
}

/// Plotting script for a sweep CSV (data only; nothing is rendered here).
pub fn sweep_plot_script(csv_path: &str) -> String {
    format!(
        "import csv\nimport matplotlib.pyplot as plt\n\nrows = list(csv.DictReader(open({csv_path:?})))\n\
t = [float(r[\"t\"]) for r in rows if r[\"eta_kneading\"]]\n\
eta = [float(r[\"eta_kneading\"]) for r in rows if r[\"eta_kneading\"]]\n\
tb = [float(r[\"t\"]) for r in rows if r[\"eta_counting\"]]\n\
etab = [float(r[\"eta_counting\"]) for r in rows if r[\"eta_counting\"]]\n\
plt.step(t, eta, where=\"post\", label=\"kneading\")\n\
plt.plot(tb, etab, \".\", markersize=3, label=\"counting\")\n\
plt.xlabel(\"t\")\nplt.ylabel(\"dim K+(t)\")\nplt.legend()\nplt.savefig({:?})\n",
        format!("{}.png", csv_path.trim_end_matches(".csv"))
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const QB: &str = "poly:-1,-1,-1,0,1";
    const QA: &str = "expr:1-b^2/(b+1)";

    #[test]
    fn solve_quartic_pair() {
        let a = run(&Job::Solve { lower: "0(10)".into(), upper: "1(0001)".into() }, 64).unwrap();
        assert!(a.body.contains("validity: VALID\n"), "{}", a.body);
        assert!(a.body.contains("beta: 1.465571231877\n"), "{}", a.body);
        assert!(a.body.contains("alpha_decimal: 0.128843244139\n"), "{}", a.body);
    }

    #[test]
    fn expand_and_kneading_text() {
        let e = run(
            &Job::Expand { beta: QB.into(), alpha: QA.into(), x: "0".into(), variant: Variant::Upper, steps: 64 },
            64,
        )
        .unwrap();
        assert_eq!(e.body, "(0001)\n");
        let k = run(&Job::Kneading { beta: QB.into(), alpha: QA.into() }, 64).unwrap();
        assert!(k.body.starts_with("lower: (01)\nupper: (1000)\n"), "{}", k.body);
        assert!(k.body.contains("sft: SFT\n"));
    }

    #[test]
    fn job_config_round_trips_through_json() {
        let j = Job::Oracle(OracleJob::Escape {
            beta: "poly:-1,-1,1".into(),
            alpha: "0".into(),
            t: "0.01".into(),
            samples: 10,
            steps: 5,
            seed: 3,
        });
        let s = serde_json::to_string(&j).unwrap();
        assert_eq!(serde_json::from_str::<Job>(&s).unwrap(), j);
        let parsed: Job = serde_json::from_str(r#"{"command":"sweep","beta":"b","alpha":"0","samples":3}"#).unwrap();
        assert!(matches!(parsed, Job::Sweep { depth: 30, lyndon_bound: 64, .. }));
    }

    #[test]
    fn canonical_json_sorts_and_rounds() {
        let v = serde_json::json!({"b": 0.1 + 0.2, "a": [1, 2.5]});
        assert_eq!(canonical_json(&v), "{\n  \"a\": [\n    1,\n    2.5\n  ],\n  \"b\": 0.3\n}\n");
    }
}
