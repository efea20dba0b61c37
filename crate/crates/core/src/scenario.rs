//! Scenario files: a single JSON document naming groups, lengths, maps and
//! one task to run. See the README for the schema.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;
use serde_json::{json, Value};

use crate::approx::{
    is_quasi_homomorphism, multiplicative_defect, quasi_action_defect, ApproxParams,
    ApproximationMap, CheckBudget, Method, QhomMode, QhomVerdict, QuasiAction, DEFAULT_BUDGET,
    DEFAULT_SAMPLES, DEFAULT_SEED,
};
use crate::construct::{
    build_amenable_extension, build_direct_product, build_sofic_wreath, build_wreath,
    FolnerProvider, PermutationRule, QuotientProvider,
};
use crate::error::{Error, Result};
use crate::groups::{Element, Group};
use crate::length::{
    check_axioms, check_commutator_contractive, CheckMode, Exponent, LengthFunction, LengthSpec,
    WeightFunction,
};
use crate::report::{Offender, Report, Settings, Verdict};
use crate::witnesses::QuotientMap;

pub const SCHEMA_VERSION: u32 = 1;

/// A named entry or an inline descriptor.
#[derive(Clone, Debug)]
pub enum Ref<T> {
    Name(String),
    Inline(T),
}

impl<'de, T: serde::de::DeserializeOwned> Deserialize<'de> for Ref<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(name) => Ok(Ref::Name(name)),
            v @ Value::Object(_) => T::deserialize(v).map(Ref::Inline).map_err(serde::de::Error::custom),
            other => Err(serde::de::Error::custom(format!(
                "expected a name or an inline descriptor object, got {other}"
            ))),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    #[serde(default)]
    pub groups: BTreeMap<String, Group>,
    #[serde(default)]
    pub lengths: BTreeMap<String, LengthSpec>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapSpec>,
    #[serde(default)]
    pub actions: BTreeMap<String, ActionSpec>,
    pub task: TaskSpec,
    #[serde(default)]
    pub params: ParamsSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub source: Ref<Group>,
    pub target: Ref<Group>,
    pub length: Ref<LengthSpec>,
    #[serde(default)]
    pub weight: Option<WeightFunction>,
    pub table: Vec<(Element, Element)>,
    #[serde(rename = "F", default)]
    pub f: Option<Vec<Element>>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub source: Ref<Group>,
    pub points: usize,
    pub table: Vec<(Element, Element)>,
    #[serde(rename = "F", default)]
    pub f: Option<Vec<Element>>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(rename = "F", default)]
    pub f: Option<Vec<Element>>,
    #[serde(default)]
    pub p: Option<Exponent>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExtensionSpec {
    /// `G` finite, `N` the listed normal subgroup.
    Finite { normal: Vec<Element> },
    /// `G = N × Q`, projecting onto `Q`.
    LatticeSplit,
    /// `N = {1}`, `Q = G`.
    TrivialKernel,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    CheckLength {
        group: Ref<Group>,
        length: Ref<LengthSpec>,
        #[serde(default)]
        pairs: Option<Vec<(Element, Element)>>,
        #[serde(default)]
        contractive: bool,
    },
    CheckQhom {
        map: String,
        #[serde(default)]
        mode: QhomMode,
    },
    CheckQaction {
        action: String,
    },
    BuildDirectProduct {
        left: String,
        right: String,
    },
    BuildWreath {
        map: String,
        wreath: Ref<Group>,
        #[serde(default)]
        quotient: QuotientProvider,
    },
    BuildSoficWreath {
        action: String,
        wreath: Ref<Group>,
        #[serde(default)]
        quotient: QuotientProvider,
    },
    BuildAmenableExt {
        map: String,
        group: Ref<Group>,
        extension: ExtensionSpec,
        #[serde(default)]
        folner: FolnerProvider,
        #[serde(default)]
        rule: PermutationRule,
    },
}

impl TaskSpec {
    pub fn name(&self) -> &'static str {
        match self {
            TaskSpec::CheckLength { .. } => "check-length",
            TaskSpec::CheckQhom { .. } => "check-qhom",
            TaskSpec::CheckQaction { .. } => "check-qaction",
            TaskSpec::BuildDirectProduct { .. } => "build-direct-product",
            TaskSpec::BuildWreath { .. } => "build-wreath",
            TaskSpec::BuildSoficWreath { .. } => "build-sofic-wreath",
            TaskSpec::BuildAmenableExt { .. } => "build-amenable-ext",
        }
    }
}

/// Command-line values that take precedence over `params`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub budget: Option<u64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

fn schema(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Schema(format!("{field}: {msg}"))
}

/// Parses a scenario, reporting the failing field path and line/column.
pub fn parse_scenario(text: &str) -> Result<(ScenarioFile, Value)> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let field = if path.is_empty() || path == "." { "<root>".to_string() } else { path };
        Error::Schema(format!("{field}: {inner}"))
    })?;
    let echo: Value = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    validate(&file)?;
    Ok((file, echo))
}

fn check_epsilon(field: &str, eps: Option<f64>) -> Result<()> {
    match eps {
        Some(e) if !(e > 0.0) || !e.is_finite() => Err(schema(field, format!("must be a positive number, got {e}"))),
        _ => Ok(()),
    }
}

fn validate(file: &ScenarioFile) -> Result<()> {
    if file.version != SCHEMA_VERSION {
        return Err(schema("version", format!("unsupported version {}, expected {SCHEMA_VERSION}", file.version)));
    }
    check_epsilon("params.epsilon", file.params.epsilon)?;
    if file.params.budget == Some(0) {
        return Err(schema("params.budget", "must be positive"));
    }
    if file.params.samples == Some(0) {
        return Err(schema("params.samples", "must be positive"));
    }
    if let Some(c) = file.params.c {
        if !(c > 0.0 && c <= 1.0) {
            return Err(schema("params.c", format!("must lie in (0, 1], got {c}")));
        }
    }
    for (name, m) in &file.maps {
        check_epsilon(&format!("maps.{name}.epsilon"), m.epsilon)?;
        if let Some(w) = &m.weight {
            w.validate().map_err(|e| schema(&format!("maps.{name}.weight"), e))?;
        }
    }
    for (name, a) in &file.actions {
        check_epsilon(&format!("actions.{name}.epsilon"), a.epsilon)?;
        if a.points == 0 {
            return Err(schema(&format!("actions.{name}.points"), "must be positive"));
        }
    }
    Ok(())
}

struct Resolver<'a> {
    file: &'a ScenarioFile,
}

impl<'a> Resolver<'a> {
    fn group(&self, field: &str, r: &Ref<Group>) -> Result<Group> {
        match r {
            Ref::Inline(g) => Ok(g.clone()),
            Ref::Name(n) => self
                .file
                .groups
                .get(n)
                .cloned()
                .ok_or_else(|| schema(field, format!("unknown group {n:?}"))),
        }
    }

    fn length(&self, field: &str, r: &Ref<LengthSpec>) -> Result<LengthFunction> {
        let spec = match r {
            Ref::Inline(s) => s.clone(),
            Ref::Name(n) => self
                .file
                .lengths
                .get(n)
                .cloned()
                .ok_or_else(|| schema(field, format!("unknown length {n:?}")))?,
        };
        spec.try_into()
    }

    fn epsilon(&self, field: &str, own: Option<f64>) -> Result<f64> {
        own.or(self.file.params.epsilon)
            .ok_or_else(|| schema(field, "missing, and no params.epsilon to fall back on"))
    }

    /// `F` for a map: its own, else `fallback`, else its table's keys.
    fn map(&self, field: &str, name: &str, fallback: Option<&Vec<Element>>) -> Result<ApproximationMap> {
        let spec = self
            .file
            .maps
            .get(name)
            .ok_or_else(|| schema(field, format!("unknown map {name:?}")))?;
        let prefix = format!("maps.{name}");
        let weight = match (&spec.weight, self.file.params.c) {
            (Some(w), _) => w.clone(),
            (None, Some(c)) => WeightFunction::constant(c)?,
            (None, None) => {
                return Err(schema(&format!("{prefix}.weight"), "missing, and no params.c to fall back on"))
            }
        };
        let f = spec
            .f
            .clone()
            .or_else(|| fallback.cloned())
            .unwrap_or_else(|| spec.table.iter().map(|(g, _)| g.clone()).collect());
        ApproximationMap::new(
            self.group(&format!("{prefix}.source"), &spec.source)?,
            self.group(&format!("{prefix}.target"), &spec.target)?,
            self.length(&format!("{prefix}.length"), &spec.length)?,
            weight,
            ApproxParams::new(f, self.epsilon(&format!("{prefix}.epsilon"), spec.epsilon)?)?,
            spec.table.clone(),
        )
    }

    fn action(&self, field: &str, name: &str, fallback: Option<&Vec<Element>>) -> Result<QuasiAction> {
        let spec = self
            .file
            .actions
            .get(name)
            .ok_or_else(|| schema(field, format!("unknown action {name:?}")))?;
        let prefix = format!("actions.{name}");
        let f = spec
            .f
            .clone()
            .or_else(|| fallback.cloned())
            .unwrap_or_else(|| spec.table.iter().map(|(g, _)| g.clone()).collect());
        let table = spec
            .table
            .iter()
            .map(|(g, p)| Ok((g.clone(), p.as_perm()?.clone())))
            .collect::<Result<Vec<_>>>()?;
        QuasiAction::on_points(
            self.group(&format!("{prefix}.source"), &spec.source)?,
            spec.points,
            ApproxParams::new(f, self.epsilon(&format!("{prefix}.epsilon"), spec.epsilon)?)?,
            table,
        )
    }

    fn f(&self) -> Result<Vec<Element>> {
        self.file
            .params
            .f
            .clone()
            .ok_or_else(|| schema("params.F", "required by this task"))
    }
}

/// Parses and runs a scenario. Bound violations are reported in the
/// returned report; errors mean the scenario could not be run.
pub fn run_scenario_str(text: &str, overrides: &Overrides) -> Result<Report> {
    let (file, echo) = parse_scenario(text)?;
    run_scenario(&file, echo, overrides)
}

pub fn run_scenario(file: &ScenarioFile, echo: Value, overrides: &Overrides) -> Result<Report> {
    let budget = CheckBudget {
        budget: overrides.budget.or(file.params.budget).unwrap_or(DEFAULT_BUDGET),
        samples: overrides.samples.or(file.params.samples).unwrap_or(DEFAULT_SAMPLES),
        seed: overrides.seed.or(file.params.seed).unwrap_or(DEFAULT_SEED),
    };
    if budget.budget == 0 {
        return Err(schema("--budget", "must be positive"));
    }
    if budget.samples == 0 {
        return Err(schema("--samples", "must be positive"));
    }
    let mut report = Report::new(file.task.name(), echo, Settings::from(budget));
    let r = Resolver { file };
    match &file.task {
        TaskSpec::CheckLength {
            group,
            length,
            pairs,
            contractive,
        } => {
            let group = r.group("task.group", group)?;
            let length = r.length("task.length", length)?;
            let mode = match pairs {
                Some(p) => CheckMode::Pairs(p.clone()),
                None => CheckMode::Exhaustive,
            };
            let axioms = check_axioms(&group, &length, &mode)?;
            report.method = Some(Method::Exhaustive);
            report.pair_count = Some(axioms.pairs_checked as u64);
            report.verdicts.push(Verdict::count("axiom violations", axioms.violations.len(), 0));
            let mut details = json!({ "axioms": axioms });
            if *contractive {
                let cc = check_commutator_contractive(&group, &length, &mode)?;
                report
                    .verdicts
                    .push(Verdict::count("commutator-contractivity violations", cc.violations.len(), 0));
                details["commutator_contractive"] = serde_json::to_value(&cc).expect("serializable");
                report.offending.extend(cc.violations.iter().map(Offender::from_violation));
            }
            report.offending.extend(axioms.violations.iter().map(Offender::from_violation));
            report.details = details;
        }
        TaskSpec::CheckQhom { map, mode } => {
            let phi = r.map("task.map", map, file.params.f.as_ref())?;
            let v = is_quasi_homomorphism(&phi, *mode, &budget)?;
            record_qhom(&mut report, &v, phi.params.epsilon, "epsilon");
        }
        TaskSpec::CheckQaction { action } => {
            let q = r.action("task.action", action, file.params.f.as_ref())?;
            let a = quasi_action_defect(&q, &budget)?;
            record_action(&mut report, &a, q.params.epsilon);
        }
        TaskSpec::BuildDirectProduct { left, right } => {
            let left = r.map("task.left", left, None)?;
            let right = r.map("task.right", right, None)?;
            let p = file.params.p.unwrap_or(Exponent::Infinity);
            let dl = multiplicative_defect(&left, &budget)?;
            let dr = multiplicative_defect(&right, &budget)?;
            let (scenario, phi) = build_direct_product(&left, &right, p, file.params.f.clone())?;
            let v = is_quasi_homomorphism(&phi, QhomMode::Weighted, &budget)?;
            let input_max = dl.max_defect.max(dr.max_defect);
            report.witnesses = json!({
                "direct": scenario,
                "input_max_defects": [dl.max_defect, dr.max_defect],
            });
            record_qhom(&mut report, &v, phi.params.epsilon, "max(input epsilons)");
            report
                .verdicts
                .push(Verdict::at_most("max defect <= max(input max defects)", v.report.max_defect, input_max));
        }
        TaskSpec::BuildWreath {
            map,
            wreath,
            quotient,
        } => {
            let phi = r.map("task.map", map, None)?;
            let w = r.group("task.wreath", wreath)?;
            let (scenario, psi) = build_wreath(&phi, &w, r.f()?, quotient)?;
            let v = is_quasi_homomorphism(&psi, QhomMode::Weighted, &budget)?;
            report.witnesses = serde_json::to_value(&scenario).expect("serializable");
            record_qhom(&mut report, &v, psi.params.epsilon, "input epsilon");
        }
        TaskSpec::BuildSoficWreath {
            action,
            wreath,
            quotient,
        } => {
            let phi = r.action("task.action", action, None)?;
            let w = r.group("task.wreath", wreath)?;
            let eps = r.epsilon("params.epsilon", None)?;
            let (scenario, psi) = build_sofic_wreath(&phi, &w, r.f()?, eps, quotient)?;
            let a = quasi_action_defect(&psi, &budget)?;
            let mut witnesses = serde_json::to_value(&scenario).expect("serializable");
            witnesses["points"] = json!(a.points.to_string());
            report.witnesses = witnesses;
            record_action(&mut report, &a, eps);
        }
        TaskSpec::BuildAmenableExt {
            map,
            group,
            extension,
            folner,
            rule,
        } => {
            let psi = r.map("task.map", map, None)?;
            let g = r.group("task.group", group)?;
            let quotient = match extension {
                ExtensionSpec::Finite { normal } => QuotientMap::by_normal_subgroup(g, normal)?,
                ExtensionSpec::LatticeSplit => QuotientMap::drop_left(g)?,
                ExtensionSpec::TrivialKernel => QuotientMap::identity(g),
            };
            let eps = r.epsilon("params.epsilon", None)?;
            let (scenario, phi) =
                build_amenable_extension(&psi, &quotient, folner, r.f()?, eps, *rule, &budget)?;
            let v = is_quasi_homomorphism(&phi, QhomMode::Weighted, &budget)?;
            report.witnesses = serde_json::to_value(&scenario).expect("serializable");
            record_qhom(&mut report, &v, phi.params.epsilon, "5 epsilon");
            report.verdicts.insert(
                0,
                Verdict::holds(
                    "input map is an (E, epsilon)-quasi-homomorphism",
                    scenario.input_check.holds,
                ),
            );
        }
    }
    report.finish();
    Ok(report)
}

fn record_qhom(report: &mut Report, v: &QhomVerdict, epsilon: f64, bound_name: &str) {
    let r = &v.report;
    report.method = Some(r.method);
    report.pair_count = Some(r.pair_defects.len() as u64);
    report.pairs = serde_json::to_value(&r.pair_defects).expect("serializable");
    report.max_defect = Some(r.max_defect);
    report.min_slack = r.min_slack;
    report
        .verdicts
        .push(Verdict::at_most(&format!("max defect <= {bound_name}"), r.max_defect, epsilon));
    if let Some(s) = r.min_slack {
        report.verdicts.push(Verdict::at_least("min weight slack >= 0", s, 0.0));
    }
    report
        .offending
        .extend(r.offending_pairs(epsilon).map(|p| Offender::pair(&p.g, &p.h, p.defect, epsilon)));
    report.offending.extend(r.offending_weights().map(|s| Offender {
        check: "weight".into(),
        elements: vec![s.g.clone()],
        value: s.length,
        bound: s.bound,
    }));
    report.details = serde_json::to_value(v).expect("serializable");
}

fn record_action(report: &mut Report, a: &crate::approx::ActionReport, epsilon: f64) {
    report.method = Some(a.method);
    report.pair_count = Some(a.pair_agreements.len() as u64);
    report.pairs = serde_json::to_value(&a.pair_agreements).expect("serializable");
    report.max_defect = Some(1.0 - a.min_agreement);
    let limit = epsilon + a.margin;
    report
        .verdicts
        .push(Verdict::at_most("1 - min agreement <= epsilon", 1.0 - a.min_agreement, limit));
    if let Some(x) = a.max_fixed {
        report
            .verdicts
            .push(Verdict::at_most("max fixed-point proportion <= epsilon", x, limit));
    }
    report.offending.extend(
        a.offending_pairs(epsilon)
            .map(|p| Offender::pair(&p.g, &p.h, 1.0 - p.agreement, limit)),
    );
    report.offending.extend(a.offending_elements(epsilon).map(|p| Offender {
        check: "fixed points".into(),
        elements: vec![p.g.clone()],
        value: p.fixed,
        bound: limit,
    }));
    report.details = serde_json::to_value(a).expect("serializable");
}

/// Names defined in a scenario that its task never uses.
pub fn unused_names(file: &ScenarioFile) -> BTreeSet<String> {
    let mut used = BTreeSet::new();
    let mut mark = |s: &str| {
        used.insert(s.to_string());
    };
    match &file.task {
        TaskSpec::CheckQhom { map, .. } | TaskSpec::BuildWreath { map, .. } | TaskSpec::BuildAmenableExt { map, .. } => mark(map),
        TaskSpec::CheckQaction { action } | TaskSpec::BuildSoficWreath { action, .. } => mark(action),
        TaskSpec::BuildDirectProduct { left, right } => {
            mark(left);
            mark(right);
        }
        TaskSpec::CheckLength { .. } => {}
    }
    file.maps
        .keys()
        .chain(file.actions.keys())
        .filter(|k| !used.contains(*k))
        .cloned()
        .collect()
}
