//! Operations shared by the single-shot subcommands and experiment grids.
//!
//! Each operation returns the module report together with a list of checks.
//! Hard checks are set-theoretic facts that must hold whatever the
//! constants; soft checks are bound-shaped observables and are reported
//! without affecting the exit code.

use std::sync::Arc;

use anyhow::{anyhow, bail, Context as _, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use vcgrp_core::bohr::{find_regular_dilate, size_lower_bound_check, subgroup_inside, BohrSpec};
use vcgrp_core::descriptor::ElemRef;
use vcgrp_core::fourier::{chang_cover, large_spectrum};
use vcgrp_core::freiman::{is_s_isomorphism, model_embed, FreimanMap, DEFAULT_MAX_ATTEMPTS, DEFAULT_TRIALS};
use vcgrp_core::periods::{period_finders, PeriodOutcome, PeriodQuery, SamplerConfig, DEFAULT_C_SAMPLE, DEFAULT_RETRIES};
use vcgrp_core::rational::{self, Rational};
use vcgrp_core::regularity::{
    bogolyubov_methods, regularity_methods, BogolyubovOutcome, BogolyubovQuery, RegularityConfig, RegularityQuery,
};
use vcgrp_core::setcalc::{convolution_backends, CountFn};
use vcgrp_core::stability::{is_k_stable, StabilityStatus, DEFAULT_BUDGET};
use vcgrp_core::vc::{d_hint, shatters, translate_family, vc_dimension, Scope, DEFAULT_CAP};
use vcgrp_core::{GSet, Group};

fn default_cap() -> usize {
    DEFAULT_CAP
}
fn default_backend() -> String {
    "fourier".into()
}
fn default_period_method() -> String {
    "sample".into()
}
fn default_c_sample() -> u64 {
    DEFAULT_C_SAMPLE
}
fn default_retries() -> u32 {
    DEFAULT_RETRIES
}
fn one() -> usize {
    1
}
fn default_bohr() -> String {
    "bohr".into()
}
fn half() -> Rational {
    Rational::new(1, 2)
}
fn default_attempts() -> usize {
    DEFAULT_MAX_ATTEMPTS
}
fn default_trials() -> usize {
    DEFAULT_TRIALS
}
fn default_budget() -> u64 {
    DEFAULT_BUDGET
}
fn default_scope() -> Scope {
    Scope::Restricted
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Operation {
    Vcd {
        #[serde(default = "default_scope")]
        scope: Scope,
        #[serde(default = "default_cap")]
        cap: usize,
    },
    /// `1_A * 1_B` through a named convolution backend.
    Conv {
        #[serde(default = "default_backend")]
        backend: String,
    },
    Periods {
        /// `exact`, `sample` or `bohr`.
        #[serde(default = "default_period_method")]
        method: String,
        #[serde(default = "default_c_sample")]
        c_sample: u64,
        #[serde(default = "default_retries")]
        retries: u32,
        #[serde(default = "one")]
        k: usize,
    },
    Bohr {
        freqs: Vec<ElemRef>,
        #[serde(with = "rational::as_string")]
        radius: Rational,
        #[serde(default)]
        regular_dilate: bool,
        #[serde(default)]
        check_size_bound: bool,
    },
    /// Large spectrum of `μ_A`, optionally with a dissociated cover.
    Spectrum {
        threshold: f64,
        #[serde(default)]
        chang: bool,
    },
    Regularity {
        /// `bohr` or `subspace`.
        #[serde(default = "default_bohr")]
        method: String,
        #[serde(default = "half", with = "rational::as_string")]
        nu: Rational,
    },
    Bogolyubov {
        /// `bohr`, `subspace` or `doubling`.
        #[serde(default = "default_bohr")]
        method: String,
    },
    Model {
        s: usize,
        #[serde(default = "default_attempts")]
        max_attempts: usize,
    },
    FreimanCheck {
        s: usize,
        #[serde(default = "default_trials")]
        trials: usize,
    },
    Stability {
        k: usize,
        #[serde(default = "default_budget")]
        budget: u64,
    },
}

impl Operation {
    pub fn name(&self) -> &'static str {
        match self {
            Operation::Vcd { .. } => "vcd",
            Operation::Conv { .. } => "conv",
            Operation::Periods { .. } => "periods",
            Operation::Bohr { .. } => "bohr",
            Operation::Spectrum { .. } => "spectrum",
            Operation::Regularity { .. } => "regularity",
            Operation::Bogolyubov { .. } => "bogolyubov",
            Operation::Model { .. } => "model",
            Operation::FreimanCheck { .. } => "freiman-check",
            Operation::Stability { .. } => "stability",
        }
    }
}

/// Built inputs for one operation. Which fields are needed depends on the
/// operation.
#[derive(Clone, Debug)]
pub struct Inputs {
    pub group: Option<Arc<Group>>,
    pub a: Option<GSet>,
    pub b: Option<GSet>,
    /// Candidate translates for the sampler.
    pub s: Option<GSet>,
    pub map: Option<FreimanMap>,
}

impl Inputs {
    fn a(&self) -> Result<&GSet> {
        self.a.as_ref().ok_or_else(|| anyhow!("this operation needs a set"))
    }

    fn b(&self) -> Result<&GSet> {
        self.b.as_ref().map_or_else(|| self.a(), Ok)
    }

    fn group(&self) -> Result<&Arc<Group>> {
        self.group
            .as_ref()
            .or_else(|| self.a.as_ref().map(|a| a.group()))
            .ok_or_else(|| anyhow!("this operation needs a group"))
    }
}

/// Grid parameters for one cell.
#[derive(Clone, Debug, Serialize)]
pub struct CellParams {
    #[serde(serialize_with = "ser_opt_rational")]
    pub epsilon: Option<Rational>,
    pub d: Option<usize>,
    pub seed: u64,
}

fn ser_opt_rational<S: serde::Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&rational::format_rational(r)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub hard: bool,
}

impl Check {
    fn hard(name: &str, passed: bool) -> Check {
        Check {
            name: name.into(),
            passed,
            hard: true,
        }
    }

    fn soft(name: &str, passed: bool) -> Check {
        Check {
            name: name.into(),
            passed,
            hard: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OpOutcome {
    /// Name of the headline quantity, e.g. `dimension` or `size`.
    pub metric: &'static str,
    pub value: Value,
    pub checks: Vec<Check>,
    pub result: Value,
}

fn need_epsilon(cell: &CellParams) -> Result<Rational> {
    cell.epsilon.ok_or_else(|| anyhow!("this operation needs an epsilon"))
}

pub fn execute(op: &Operation, inputs: &Inputs, cell: &CellParams) -> Result<OpOutcome> {
    match op {
        Operation::Vcd { scope, cap } => {
            let (a, b) = (inputs.a()?, inputs.b()?);
            let family = translate_family(a, b, *scope)?;
            let r = vc_dimension(&family, *cap)?;
            let witness = GSet::new(a.group(), r.witness.iter().copied())?;
            let checks = vec![
                Check::hard("witness_shattered", shatters(&family, &witness)?),
                Check::soft("below_cap", !r.at_cap),
            ];
            Ok(OpOutcome {
                metric: "dimension",
                value: json!(r.dimension),
                checks,
                result: serde_json::to_value(&r)?,
            })
        }
        Operation::Conv { backend } => {
            let (a, b) = (inputs.a()?, inputs.b()?);
            let (f, g) = (CountFn::indicator(a), CountFn::indicator(b));
            let reg = convolution_backends();
            let out = reg.get(backend)?.convolve(&f, &g)?;
            let mut agree = true;
            for name in reg.names() {
                agree &= reg.get(name)?.convolve(&f, &g)? == out;
            }
            Ok(OpOutcome {
                metric: "total",
                value: json!(out.total() as i64),
                checks: vec![Check::hard("backends_agree", agree)],
                result: json!({"backend": backend, "convolution": out}),
            })
        }
        Operation::Periods {
            method,
            c_sample,
            retries,
            k,
        } => {
            let a = inputs.a()?;
            let d_hint = match cell.d {
                Some(d) => d,
                None => d_hint(a)?,
            };
            let query = PeriodQuery {
                a: a.clone(),
                b: inputs.b()?.clone(),
                s: inputs.s.clone(),
                epsilon: need_epsilon(cell)?,
                d_hint,
                seed: cell.seed,
                config: SamplerConfig {
                    c_sample: *c_sample,
                    retries: *retries,
                    k: *k,
                },
            };
            let outcome = period_finders().get(method)?.find(&query)?;
            let (size, checks) = match &outcome {
                PeriodOutcome::Exact { size, .. } => (*size, Vec::new()),
                PeriodOutcome::Sample(r) => (
                    r.t.len(),
                    vec![
                        Check::hard("composition_sound", r.composition_sound),
                        Check::soft("nonempty", !r.t.is_empty()),
                    ],
                ),
                PeriodOutcome::Bohr(r) => (r.size, vec![Check::hard("all_valid", r.all_valid)]),
            };
            Ok(OpOutcome {
                metric: "size",
                value: json!(size),
                checks,
                result: serde_json::to_value(&outcome)?,
            })
        }
        Operation::Bohr {
            freqs,
            radius,
            regular_dilate,
            check_size_bound,
        } => {
            let g = inputs.group()?;
            let freqs = freqs.iter().map(|f| f.resolve(g)).collect::<vcgrp_core::Result<Vec<_>>>()?;
            let spec = BohrSpec::new(g, freqs, *radius)?;
            let set = spec.realize();
            let sub = subgroup_inside(&spec);
            let mut checks = vec![
                Check::hard("annihilator_inside", sub.subgroup.is_subset(&set)),
                Check::hard("annihilator_is_subgroup", sub.is_subgroup),
            ];
            if let Some(ok) = sub.index_within_bound {
                checks.push(Check::hard("annihilator_index_bound", ok));
            }
            let mut result = json!({
                "spec": spec,
                "size": set.len(),
                "annihilator": {"size": sub.subgroup.len(), "index": sub.index, "index_bound": sub.index_bound},
            });
            if *check_size_bound {
                let r = size_lower_bound_check(&spec)?;
                checks.push(Check::hard("size_bound_arc", r.arc_pass));
                checks.push(Check::soft("size_bound", r.pass));
                result["size_bound"] = serde_json::to_value(&r)?;
            }
            if *regular_dilate {
                let r = find_regular_dilate(&spec)?;
                checks.push(Check::hard("regular", r.defect == 0.0));
                result["regular_dilate"] = json!({"tau": rational::format_rational(&r.tau), "defect": r.defect,
                    "grid": r.grid, "size": r.spec.realize().len(), "spec": r.spec});
            }
            Ok(OpOutcome {
                metric: "size",
                value: json!(set.len()),
                checks,
                result,
            })
        }
        Operation::Spectrum { threshold, chang } => {
            let a = inputs.a()?;
            a.require_nonempty("the spectrum needs a non-empty set")?;
            let g = a.group();
            let n = a.len() as f64;
            let mu: Vec<f64> = g.elements().map(|x| if a.contains(x) { 1.0 / n } else { 0.0 }).collect();
            let spectrum = large_spectrum(g, &mu, *threshold)?;
            let mut checks = Vec::new();
            let mut result = json!({"spectrum": spectrum});
            if *chang {
                let cover = chang_cover(g, &spectrum)?;
                checks.push(Check::hard("cover_certified", cover.certified));
                if let Some(d) = cover.dissociated {
                    checks.push(Check::hard("dissociated", d));
                }
                result["cover"] = serde_json::to_value(&cover)?;
            }
            Ok(OpOutcome {
                metric: "spectrum_size",
                value: json!(spectrum.members.len()),
                checks,
                result,
            })
        }
        Operation::Regularity { method, nu } => {
            let query = RegularityQuery {
                a: inputs.a()?.clone(),
                epsilon: need_epsilon(cell)?,
                nu: *nu,
                seed: cell.seed,
                config: RegularityConfig {
                    d_hint: cell.d,
                    scope: inputs.s.clone(),
                    ..RegularityConfig::default()
                },
            };
            let dec = regularity_methods().get(method)?.decompose(&query)?;
            let c = &dec.checks;
            let checks = vec![
                Check::hard("a_prime_subset_a", c.a_prime_subset_a),
                Check::hard("w_subset_a_plus_h", c.w_subset_a_plus_h),
                Check::hard("h_in_difference_set", c.h_in_difference_set),
                Check::hard("bootstrap_valid", c.bootstrap_valid),
                Check::soft("symdiff_within_eps", c.symdiff_within_eps),
                Check::soft("a_prime_large", c.a_prime_large),
                Check::soft("dilate_density", c.dilate_density),
            ];
            Ok(OpOutcome {
                metric: "h_size",
                value: json!(dec.h_size),
                checks,
                result: serde_json::to_value(&dec)?,
            })
        }
        Operation::Bogolyubov { method } => {
            let query = BogolyubovQuery {
                a: inputs.a()?.clone(),
                seed: cell.seed,
                config: RegularityConfig {
                    d_hint: cell.d,
                    ..RegularityConfig::default()
                },
            };
            let out = bogolyubov_methods().get(method)?.extract(&query)?;
            let size = match &out {
                BogolyubovOutcome::Bohr(b) => b.size,
                BogolyubovOutcome::Subspace(s) => s.size,
            };
            Ok(OpOutcome {
                metric: "size",
                value: json!(size),
                checks: vec![Check::hard("contained_in_difference_set", out.contained())],
                result: serde_json::to_value(&out)?,
            })
        }
        Operation::Model { s, max_attempts } => {
            let m = model_embed(inputs.a()?, *s, cell.seed, *max_attempts)?;
            let checks = vec![
                Check::hard("isomorphism", m.verification.holds() != Some(false)),
                Check::soft("isomorphism_verified", m.verification.holds() == Some(true)),
                Check::hard("dimension_bound", m.bound_holds),
            ];
            Ok(OpOutcome {
                metric: "m",
                value: json!(m.m),
                checks,
                result: serde_json::to_value(&m)?,
            })
        }
        Operation::FreimanCheck { s, trials } => {
            let map = inputs.map.as_ref().ok_or_else(|| anyhow!("freiman-check needs a map"))?;
            let status = is_s_isomorphism(map, *s, cell.seed, *trials)?;
            let verdict = match status.holds() {
                Some(true) => "isomorphism",
                Some(false) => "not_isomorphism",
                None => "no_violation_found",
            };
            Ok(OpOutcome {
                metric: "verdict",
                value: json!(verdict),
                checks: Vec::new(),
                result: serde_json::to_value(&status)?,
            })
        }
        Operation::Stability { k, budget } => {
            let status = is_k_stable(inputs.a()?, *k, *budget)?;
            let (verdict, checks) = match &status {
                StabilityStatus::Stable { .. } => ("stable", Vec::new()),
                StabilityStatus::Unstable { witness, .. } => {
                    ("unstable", vec![Check::hard("witness_verified", witness.verified)])
                }
                StabilityStatus::Unknown { .. } => ("unknown", Vec::new()),
            };
            Ok(OpOutcome {
                metric: "verdict",
                value: json!(verdict),
                checks,
                result: serde_json::to_value(&status)?,
            })
        }
    }
}

/// Parses a strategy list such as `"exact"` with a helpful error.
pub fn check_method(op: &Operation) -> Result<()> {
    let (family, name): (Vec<&str>, &str) = match op {
        Operation::Conv { backend } => (convolution_backends().names(), backend),
        Operation::Periods { method, .. } => (period_finders().names(), method),
        Operation::Regularity { method, .. } => (regularity_methods().names(), method),
        Operation::Bogolyubov { method } => (bogolyubov_methods().names(), method),
        _ => return Ok(()),
    };
    if !family.contains(&name) {
        bail!("unknown method `{name}` for {}; available: {}", op.name(), family.join(", "));
    }
    Ok(())
}

/// Parses a JSON list of elements such as `[[1],[3]]` or `[1, 3]`.
pub fn parse_elements(text: &str) -> Result<Vec<ElemRef>> {
    serde_json::from_str(text).with_context(|| format!("parsing element list `{text}`"))
}
