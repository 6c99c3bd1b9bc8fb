//! Per-alpha rows pairing every closed form with its full-state simulation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use refsys_core::hardy::{ExperimentState, CHECK_TOL};
use refsys_core::paradox::{analyze, Classification};
use refsys_core::{HardyModel, Particle, Pointer, Setting, Settings};

use crate::config::RunConfig;

/// Tolerance of the invariant residuals.
pub const INVARIANT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Closed form versus simulation, sum rule, imaginary residual.
    pub check: f64,
    /// Coefficient identities, unitarity, locality, branch decomposition.
    pub invariant: f64,
}

impl Tolerances {
    pub fn from_override(t: Option<f64>) -> Self {
        match t {
            Some(t) => Tolerances { check: t, invariant: t },
            None => Tolerances { check: CHECK_TOL, invariant: INVARIANT_TOL },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Compared {
    pub closed_form: f64,
    pub simulated: f64,
    pub abs_diff: f64,
}

impl Compared {
    pub fn new(closed_form: f64, simulated: f64) -> Self {
        Compared { closed_form, simulated, abs_diff: (closed_form - simulated).abs() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemValue {
    pub item: u8,
    pub description: String,
    pub settings: String,
    pub value: Compared,
}

/// `p_j` of device `M1` with the given own setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalValue {
    pub setting: String,
    pub pointer: u8,
    pub value: Compared,
}

/// `P(M1 = j, M2 = k)` at one setting pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub settings: String,
    pub j: u8,
    pub k: u8,
    pub value: Compared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxValue {
    pub pseudo_plus: Compared,
    pub pseudo_minus: Compared,
    pub hardy_joint: Compared,
    pub classification: String,
    pub sum_rule_residual: f64,
    pub imaginary_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantResiduals {
    pub coefficient_identity: f64,
    pub unitarity: f64,
    pub norm: f64,
    pub ready_pointer: f64,
    pub locality: f64,
    pub branch_decomposition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowValues {
    pub items: Vec<ItemValue>,
    pub marginals: Vec<MarginalValue>,
    pub tables: Vec<TableEntry>,
    pub paradox: ParadoxValue,
    pub invariants: InvariantResiduals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub alpha: f64,
    pub beta: Option<f64>,
    pub status: RowStatus,
    /// Why the row is degenerate.
    pub reason: Option<String>,
    pub values: Option<RowValues>,
    /// Empty for degenerate rows.
    pub checks: Vec<Check>,
}

impl Row {
    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub tolerances: Tolerances,
    pub timestamp: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub checks_passed: usize,
    pub checks_failed: usize,
    pub degenerate_rows: usize,
}

impl Summary {
    pub fn of(rows: &[Row]) -> Self {
        let total: usize = rows.iter().map(|r| r.checks.len()).sum();
        let failed: usize = rows.iter().map(Row::failed_checks).sum();
        Summary {
            rows: rows.len(),
            checks_passed: total - failed,
            checks_failed: failed,
            degenerate_rows: rows.iter().filter(|r| r.status == RowStatus::Degenerate).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub metadata: Metadata,
    pub rows: Vec<Row>,
    pub summary: Summary,
    pub narrative: Vec<String>,
}

const SETTINGS: [Setting; 2] = [Setting::U, Setting::D];

fn final_states(m: &HardyModel) -> Vec<(Settings, ExperimentState)> {
    Settings::ALL.iter().map(|&s| (s, m.final_state(s).expect("initial state evolves"))).collect()
}

fn marginal_at(states: &[(Settings, ExperimentState)], settings: Settings, device: Particle) -> Vec<f64> {
    let (_, state) = states.iter().find(|(s, _)| *s == settings).expect("all setting pairs evaluated");
    state.device_marginal(device).expect("final stage").into_iter().map(|(_, p)| p).collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn invariants(m: &HardyModel, states: &[(Settings, ExperimentState)]) -> InvariantResiduals {
    let b = m.basis();
    let coefficient_identity = [
        b.a * b.a + b.b * b.b - 1.0,
        b.big_a * b.big_a + b.big_b * b.big_b - 1.0,
        m.alpha() * b.b * b.b - m.beta() * b.a * b.a,
    ]
    .iter()
    .fold(0.0_f64, |acc, x| acc.max(x.abs()));

    let mut unitarity = 0.0_f64;
    for s in SETTINGS {
        for p in [Particle::First, Particle::Second] {
            unitarity = unitarity.max(m.measurement_unitary(s, p).unitarity_defect());
        }
    }

    let norm = states.iter().map(|(_, f)| (f.state().norm() - 1.0).abs()).fold(0.0, f64::max);
    let ready_pointer = states.iter().map(|(_, f)| f.ready_amplitude()).fold(0.0, f64::max);

    let mut locality = 0.0_f64;
    for own in SETTINGS {
        locality = locality.max(max_diff(
            &marginal_at(states, Settings::new(own, Setting::U), Particle::First),
            &marginal_at(states, Settings::new(own, Setting::D), Particle::First),
        ));
        locality = locality.max(max_diff(
            &marginal_at(states, Settings::new(Setting::U, own), Particle::Second),
            &marginal_at(states, Settings::new(Setting::D, own), Particle::Second),
        ));
    }

    let mut branch_decomposition = 0.0_f64;
    for (settings, state) in states {
        for p in [Particle::First, Particle::Second] {
            let setting = settings.get(p);
            let (plus, minus) = m.branch_states(setting, p);
            branch_decomposition = branch_decomposition.max(plus.inner(&minus).expect("same layout").norm());
            let reduced = state.reduced(&[p.particle_id(), p.device_id()]).expect("systems present");
            branch_decomposition =
                branch_decomposition.max(reduced.state().as_operator().max_abs_diff(&m.branch_mixture(setting, p)));
        }
    }

    InvariantResiduals { coefficient_identity, unitarity, norm, ready_pointer, locality, branch_decomposition }
}

fn values(m: &HardyModel) -> Result<RowValues, String> {
    let states = final_states(m);
    let items = m
        .verify_items()
        .map_err(|e| e.to_string())?
        .items
        .into_iter()
        .map(|i| ItemValue {
            item: i.item,
            description: i.description.to_string(),
            settings: i.settings.label(),
            value: Compared { closed_form: i.expected, simulated: i.simulated, abs_diff: i.abs_diff },
        })
        .collect();

    let mut marginals = Vec::with_capacity(4);
    for s in SETTINGS {
        let sim = marginal_at(&states, Settings::new(s, Setting::D), Particle::First);
        for p in Pointer::RESULTS {
            marginals.push(MarginalValue {
                setting: s.label().to_string(),
                pointer: p.index() as u8,
                value: Compared::new(m.marginal_closed_form(s, p), sim[p.index()]),
            });
        }
    }

    let mut tables = Vec::with_capacity(16);
    for settings in Settings::ALL {
        let t = m.outcome_distribution(settings).map_err(|e| e.to_string())?;
        for j in 0..2 {
            for k in 0..2 {
                tables.push(TableEntry {
                    settings: settings.label(),
                    j: j as u8 + 1,
                    k: k as u8 + 1,
                    value: Compared::new(t.closed_form.get(&[j, k]), t.simulated.get(&[j, k])),
                });
            }
        }
    }

    let report = analyze(m.alpha());
    let v = report.values.ok_or_else(|| report.error.clone().unwrap_or_default())?;
    let paradox = ParadoxValue {
        pseudo_plus: Compared::new(v.closed_form_plus, v.pseudo_plus),
        pseudo_minus: Compared::new(v.closed_form_minus, v.pseudo_minus),
        hardy_joint: Compared::new(v.hardy_joint_closed_form, v.hardy_joint),
        classification: report.classification.label().to_string(),
        sum_rule_residual: v.sum_rule_residual,
        imaginary_residual: v.imaginary_residual,
    };

    Ok(RowValues { items, marginals, tables, paradox, invariants: invariants(m, &states) })
}

fn checks(alpha: f64, beta: f64, v: &RowValues, tol: Tolerances) -> Vec<Check> {
    let check = |name: String, value: f64, tolerance: f64| Check { passed: value <= tolerance, name, value, tolerance };
    let mut out = Vec::new();
    for i in &v.items {
        out.push(check(format!("item {}", i.item), i.value.abs_diff, tol.check));
    }
    let worst = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    out.push(check("device marginals".into(), worst(&mut v.marginals.iter().map(|x| x.value.abs_diff)), tol.check));
    out.push(check("outcome tables".into(), worst(&mut v.tables.iter().map(|x| x.value.abs_diff)), tol.check));
    for s in ["U/U", "U/D", "D/U", "D/D"] {
        let total: f64 = v.tables.iter().filter(|t| t.settings == s).map(|t| t.value.simulated).sum();
        out.push(check(format!("{s} table total"), (total - 1.0).abs(), tol.check));
    }
    let p = &v.paradox;
    out.push(check("pseudo+ closed form".into(), p.pseudo_plus.abs_diff, tol.check));
    out.push(check("pseudo- closed form".into(), p.pseudo_minus.abs_diff, tol.check));
    out.push(check("joint closed form".into(), p.hardy_joint.abs_diff, tol.check));
    out.push(check("sum rule".into(), p.sum_rule_residual, tol.check));
    out.push(check("imaginary residual".into(), p.imaginary_residual, tol.check));
    let expected = if alpha > beta { Classification::NegativePlus } else { Classification::ExceedsJoint };
    let matches = p.classification == expected.label();
    out.push(Check {
        name: format!("classification is {}", expected.label()),
        value: if matches { 0.0 } else { 1.0 },
        tolerance: 0.0,
        passed: matches,
    });
    let inv = &v.invariants;
    for (name, value) in [
        ("coefficient identities", inv.coefficient_identity),
        ("unitarity", inv.unitarity),
        ("norm preservation", inv.norm),
        ("ready pointer vacated", inv.ready_pointer),
        ("locality of marginals", inv.locality),
        ("branch decomposition", inv.branch_decomposition),
    ] {
        out.push(check(name.into(), value, tol.invariant));
    }
    out
}

/// Evaluates one alpha. The row is degenerate when the model rejects alpha
/// or when `P(D1 = 1, D2 = 1)` is within the check tolerance of zero.
pub fn evaluate(alpha: f64, tol: Tolerances) -> Row {
    let model = match HardyModel::new(alpha) {
        Ok(m) => m,
        Err(e) => {
            return Row {
                alpha,
                beta: None,
                status: RowStatus::Degenerate,
                reason: Some(e.to_string()),
                values: None,
                checks: Vec::new(),
            }
        }
    };
    let beta = model.beta();
    let values = match values(&model) {
        Ok(v) => v,
        Err(e) => {
            return Row {
                alpha,
                beta: Some(beta),
                status: RowStatus::Degenerate,
                reason: Some(e),
                values: None,
                checks: Vec::new(),
            }
        }
    };
    let joint = model.hardy_joint_closed_form();
    if joint <= tol.check {
        return Row {
            alpha,
            beta: Some(beta),
            status: RowStatus::Degenerate,
            reason: Some(format!("P(D1=1, D2=1) = {joint:e} is within the check tolerance {:e} of zero", tol.check)),
            values: Some(values),
            checks: Vec::new(),
        };
    }
    let checks = checks(alpha, beta, &values, tol);
    Row { alpha, beta: Some(beta), status: RowStatus::Ok, reason: None, values: Some(values), checks }
}

/// Rows in the order of `alphas`; points are evaluated in parallel.
pub fn evaluate_all(alphas: &[f64], tol: Tolerances) -> Vec<Row> {
    alphas.par_iter().map(|&a| evaluate(a, tol)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::from_override(None)
    }

    #[test]
    fn row_at_point_eight() {
        let r = evaluate(0.8, tol());
        assert_eq!(r.status, RowStatus::Ok);
        assert_eq!(r.failed_checks(), 0, "{:?}", r.checks);
        let v = r.values.unwrap();
        assert_eq!(v.items.len(), 4);
        assert_eq!(v.marginals.len(), 4);
        assert_eq!(v.tables.len(), 16);
        assert!((v.items[3].value.simulated - 0.0340828402366864).abs() < 1e-12);
        assert!((v.paradox.pseudo_plus.simulated + 0.0438207945900254).abs() < 1e-12);
        assert_eq!(v.paradox.classification, "negative_plus");
        let p1_d = v.marginals.iter().find(|m| m.setting == "D" && m.pointer == 1).unwrap();
        assert!((p1_d.value.simulated - 0.556923076923077).abs() < 1e-12);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn near_balanced_alpha_is_degenerate() {
        let r = evaluate(0.70710678, tol());
        assert_eq!(r.status, RowStatus::Degenerate);
        assert!(r.values.is_some() && r.checks.is_empty());
        let r = evaluate(std::f64::consts::FRAC_1_SQRT_2, tol());
        assert_eq!(r.status, RowStatus::Degenerate);
        assert!(r.values.is_none() && r.reason.is_some());
    }

    #[test]
    fn tight_override_fails_checks() {
        let r = evaluate(0.8, Tolerances::from_override(Some(1e-300)));
        assert!(r.failed_checks() > 0);
    }

    #[test]
    fn parallel_rows_keep_order() {
        let alphas = [0.3, 0.1, 0.9];
        let rows = evaluate_all(&alphas, tol());
        assert_eq!(rows.iter().map(|r| r.alpha).collect::<Vec<_>>(), alphas);
    }
}
