//! The trace formula applied to overlapping systems.
//!
//! With both particles measured in the `D` basis, consider the "event" that
//! the final `P1 + M1` state is the branch state `φ₊` (initial internal state
//! of `P1` was `|+⟩`) and both devices show `m2`. `P1 + M1` and `M1` overlap,
//! so the joint-probability formula does not apply; evaluating
//! `Tr[π_φ π_M1 π_M2 ρ]` anyway gives
//!
//! ```text
//! pseudo₊ = α²β⁴(β−α) / ((α+β)(1−αβ)²)
//! pseudo₋ = α⁴β²(α−β) / ((α+β)(1−αβ)²)
//! ```
//!
//! which sum to `P(D1 = 1, D2 = 1)`. One of them is always negative, and
//! for `α < β` the plus branch exceeds the joint probability it is supposed
//! to be part of.

use crate::error::Result;
use crate::hardy::{pointer_projector, HardyModel, HiddenBranch, Particle, Pointer, Setting, Settings};
use crate::postulates::{joint_probability, naive_trace_functional};
use crate::tensor::{DensityOperator, Projector, C64};

/// Guard band around zero and around the joint probability when classifying.
pub const SIGN_GUARD: f64 = 1e-12;
/// Tolerance of closed-form agreement, the sum rule and the imaginary part.
pub const PARADOX_TOL: f64 = 1e-10;

/// Measurement settings the pseudo-probability is evaluated at.
pub const PARADOX_SETTINGS: Settings = Settings::new(Setting::D, Setting::D);

/// A factor of the overlapping product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    /// `|φ_branch⟩⟨φ_branch|` on `P1 + M1`.
    Branch,
    /// `|m2⟩⟨m2|` on `M1`.
    FirstPointer,
    /// `|m2⟩⟨m2|` on `M2`.
    SecondPointer,
}

/// Branch projector, then the `M1` pointer, then the `M2` pointer.
pub const WRITTEN_ORDER: [Slot; 3] = [Slot::Branch, Slot::FirstPointer, Slot::SecondPointer];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// `pseudo₊ < 0`.
    NegativePlus,
    /// `pseudo₊ > P(D1 = 1, D2 = 1)`.
    ExceedsJoint,
    /// Invalid parameter, or neither condition resolvable outside the guard band.
    Degenerate,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::NegativePlus => "negative_plus",
            Classification::ExceedsJoint => "exceeds_joint",
            Classification::Degenerate => "degenerate",
        }
    }
}

pub fn classify(pseudo_plus: f64, hardy_joint: f64) -> Classification {
    if pseudo_plus < -SIGN_GUARD {
        Classification::NegativePlus
    } else if pseudo_plus > hardy_joint + SIGN_GUARD {
        Classification::ExceedsJoint
    } else {
        Classification::Degenerate
    }
}

/// Evaluated quantities at a valid `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParadoxValues {
    /// Real part of the functional for the plus branch.
    pub pseudo_plus: f64,
    pub pseudo_minus: f64,
    /// `P(D1 = 1, D2 = 1)` from the evolved state.
    pub hardy_joint: f64,
    pub hardy_joint_closed_form: f64,
    pub closed_form_plus: f64,
    pub closed_form_minus: f64,
    /// `|pseudo₊ + pseudo₋ − hardy_joint|`.
    pub sum_rule_residual: f64,
    /// Largest imaginary magnitude of either functional value.
    pub imaginary_residual: f64,
}

impl ParadoxValues {
    pub fn closed_form_residual(&self) -> f64 {
        (self.pseudo_plus - self.closed_form_plus).abs().max((self.pseudo_minus - self.closed_form_minus).abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParadoxReport {
    pub alpha: f64,
    pub classification: Classification,
    /// `None` when the parameter was rejected.
    pub values: Option<ParadoxValues>,
    /// Reason for rejection.
    pub error: Option<String>,
}

impl ParadoxReport {
    /// Every check at [`PARADOX_TOL`] passes and the classification matches
    /// the sign of `α − β`.
    pub fn consistent(&self) -> bool {
        let Some(v) = &self.values else { return false };
        let beta = (1.0 - self.alpha * self.alpha).sqrt();
        let expected = if self.alpha > beta { Classification::NegativePlus } else { Classification::ExceedsJoint };
        self.classification == expected
            && v.closed_form_residual() <= PARADOX_TOL
            && v.sum_rule_residual <= PARADOX_TOL
            && v.imaginary_residual <= PARADOX_TOL
            && (v.hardy_joint - v.hardy_joint_closed_form).abs() <= PARADOX_TOL
    }
}

fn slot_projector(model: &HardyModel, slot: Slot, branch: HiddenBranch) -> Projector {
    match slot {
        Slot::Branch => model.branch_state(PARADOX_SETTINGS.first, Particle::First, branch).dyad(),
        Slot::FirstPointer => pointer_projector(Particle::First, Pointer::Two),
        Slot::SecondPointer => pointer_projector(Particle::Second, Pointer::Two),
    }
}

fn functional(model: &HardyModel, rho: &DensityOperator, branch: HiddenBranch, order: [Slot; 3]) -> Result<C64> {
    let projectors: Vec<Projector> = order.iter().map(|&s| slot_projector(model, s, branch)).collect();
    naive_trace_functional(&projectors, rho)
}

/// Functional in the written order (branch, `M1`, `M2`).
pub fn pseudo_probability(model: &HardyModel, branch: HiddenBranch) -> Result<C64> {
    pseudo_probability_ordered(model, branch, WRITTEN_ORDER)
}

/// Functional with an explicit projector order. Overlapping projectors do
/// not commute, so the value can depend on `order`.
pub fn pseudo_probability_ordered(model: &HardyModel, branch: HiddenBranch, order: [Slot; 3]) -> Result<C64> {
    let fin = model.final_state(PARADOX_SETTINGS)?;
    functional(model, &fin.density(), branch, order)
}

/// Closed form of the functional in the written order.
pub fn closed_form(model: &HardyModel, branch: HiddenBranch) -> f64 {
    let (a, b) = (model.alpha(), model.beta());
    let denom = (a + b) * (1.0 - a * b).powi(2);
    match branch {
        HiddenBranch::Plus => a * a * b.powi(4) * (b - a) / denom,
        HiddenBranch::Minus => a.powi(4) * b * b * (a - b) / denom,
    }
}

fn evaluate(model: &HardyModel) -> Result<ParadoxValues> {
    let rho = model.final_state(PARADOX_SETTINGS)?.density();
    let plus = functional(model, &rho, HiddenBranch::Plus, WRITTEN_ORDER)?;
    let minus = functional(model, &rho, HiddenBranch::Minus, WRITTEN_ORDER)?;
    let hardy_joint = joint_probability(
        &[pointer_projector(Particle::First, Pointer::Two), pointer_projector(Particle::Second, Pointer::Two)],
        &rho,
    )?;
    Ok(ParadoxValues {
        pseudo_plus: plus.re,
        pseudo_minus: minus.re,
        hardy_joint,
        hardy_joint_closed_form: model.hardy_joint_closed_form(),
        closed_form_plus: closed_form(model, HiddenBranch::Plus),
        closed_form_minus: closed_form(model, HiddenBranch::Minus),
        sum_rule_residual: (plus.re + minus.re - hardy_joint).abs(),
        imaginary_residual: plus.im.abs().max(minus.im.abs()),
    })
}

/// `|pseudo₊ + pseudo₋ − P(D1 = 1, D2 = 1)|`.
pub fn sum_rule_check(model: &HardyModel) -> Result<f64> {
    evaluate(model).map(|v| v.sum_rule_residual)
}

/// Full report at one `α`. Rejected parameters yield a degenerate report.
pub fn analyze(alpha: f64) -> ParadoxReport {
    match HardyModel::new(alpha).and_then(|m| evaluate(&m)) {
        Ok(values) => ParadoxReport {
            alpha,
            classification: classify(values.pseudo_plus, values.hardy_joint),
            values: Some(values),
            error: None,
        },
        Err(e) => ParadoxReport {
            alpha,
            classification: Classification::Degenerate,
            values: None,
            error: Some(e.to_string()),
        },
    }
}

/// One report per grid point, in grid order.
pub fn negativity_sweep(alpha_grid: &[f64]) -> Vec<ParadoxReport> {
    alpha_grid.iter().map(|&a| analyze(a)).collect()
}

/// 97 points from 0.02 to 0.98 in steps of 0.01.
pub fn default_grid() -> Vec<f64> {
    (2..=98)
        .map(|k| k as f64 / 100.0)
        .filter(|&a| (a - (1.0 - a * a).sqrt()).abs() > crate::hardy::MIN_ALPHA_BETA_GAP)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn negative_at_point_eight() {
        let m = HardyModel::new(0.8).unwrap();
        let v = pseudo_probability(&m, HiddenBranch::Plus).unwrap();
        assert_abs_diff_eq!(v.re, -0.04382079459002536, epsilon = 1e-12);
        assert_abs_diff_eq!(v.re, closed_form(&m, HiddenBranch::Plus), epsilon = 1e-10);
        assert!(v.im.abs() <= 1e-10);
    }

    #[test]
    fn exceeds_at_point_six() {
        let m = HardyModel::new(0.6).unwrap();
        let v = pseudo_probability(&m, HiddenBranch::Plus).unwrap().re;
        assert_abs_diff_eq!(v, 0.07790363482671175, epsilon = 1e-12);
        assert!(v > m.hardy_joint_closed_form());
        let minus = pseudo_probability(&m, HiddenBranch::Minus).unwrap().re;
        assert_abs_diff_eq!(minus, -0.04382079459002536, epsilon = 1e-12);
    }

    #[test]
    fn sum_rule_both_regimes() {
        for alpha in [0.8, 0.6] {
            let m = HardyModel::new(alpha).unwrap();
            assert!(sum_rule_check(&m).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn sweep_classification_examples() {
        let r = negativity_sweep(&[0.8, 0.6, std::f64::consts::FRAC_1_SQRT_2]);
        assert_eq!(r[0].classification, Classification::NegativePlus);
        assert_eq!(r[1].classification, Classification::ExceedsJoint);
        assert_eq!(r[2].classification, Classification::Degenerate);
        assert!(r[2].values.is_none() && r[2].error.is_some());
        assert!(r[0].consistent() && r[1].consistent() && !r[2].consistent());
    }

    #[test]
    fn default_grid_shape() {
        let g = default_grid();
        assert_eq!(g.len(), 97);
        assert_abs_diff_eq!(g[0], 0.02);
        assert_abs_diff_eq!(g[96], 0.98);
    }

    #[test]
    fn classify_guard_band() {
        assert_eq!(classify(-1e-13, 0.0), Classification::Degenerate);
        assert_eq!(classify(-2e-12, 0.0), Classification::NegativePlus);
        assert_eq!(classify(0.5 + 2e-12, 0.5), Classification::ExceedsJoint);
    }
}
