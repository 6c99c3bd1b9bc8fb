//! States relative to reference systems, internal-state candidates and the
//! joint-probability trace formula.
//!
//! A system `S` contained in a reference system `R` has the state
//! `ρ_S(R) = Tr_{R∖S} |ψ_R⟩⟨ψ_R|`. When `R` is isolated, the internal state
//! of `S` is one of the eigenvectors of `ρ_S(R)` and the probability of each
//! is its eigenvalue. For pairwise disjoint systems `S_1..S_n` inside an
//! isolated `I`, the probability that each internal state coincides with a
//! given vector is `Tr[π_1 ··· π_n ρ_{S_1+..+S_n}(I)]`.

use crate::distribution::OutcomeDistribution;
use crate::eigen::hermitian_eigensystem;
use crate::error::{Error, Result};
use crate::layout::SystemId;
use crate::tensor::{DensityOperator, LinearOperator, Projector, StateVector, C64};

/// Eigenvalues below this are treated as absent branches.
pub const ZERO_BRANCH_TOL: f64 = 1e-12;
/// Allowed imaginary part and range overshoot of a joint probability.
pub const PROBABILITY_TOL: f64 = 1e-10;
/// Completeness (`Σπ = 1`) and mutual orthogonality tolerance of an outcome set.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// `ρ_S(R)` together with the systems it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceState {
    subsystem: Vec<SystemId>,
    reference: Vec<SystemId>,
    state: DensityOperator,
    isolated: bool,
}

impl ReferenceState {
    /// Wraps an operator on `subsystem`, validating it as a density operator.
    pub fn new(reference: Vec<SystemId>, state: LinearOperator) -> Result<Self> {
        let subsystem: Vec<SystemId> = state.layout().ids().cloned().collect();
        if let Some(id) = subsystem.iter().find(|id| !reference.contains(id)) {
            return Err(Error::UnknownSystem(id.clone()));
        }
        let state = DensityOperator::new(state)?;
        Ok(ReferenceState { subsystem, reference, state, isolated: false })
    }

    pub fn subsystem(&self) -> &[SystemId] {
        &self.subsystem
    }

    pub fn reference(&self) -> &[SystemId] {
        &self.reference
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn is_isolated(&self) -> bool {
        self.isolated
    }

    /// Declares the reference system isolated (never interacted with the
    /// outside). Only the caller knows the interaction history.
    pub fn assume_isolated(mut self) -> Self {
        self.isolated = true;
        self
    }
}

/// `ρ_S(R) = Tr_{R∖S} |ψ_R⟩⟨ψ_R|`.
pub fn reduced_state(psi: &StateVector, subsystem: &[SystemId]) -> Result<ReferenceState> {
    let rho = DensityOperator::pure(psi).partial_trace(subsystem)?;
    Ok(ReferenceState {
        subsystem: rho.layout().ids().cloned().collect(),
        reference: psi.layout().ids().cloned().collect(),
        state: rho,
        isolated: false,
    })
}

/// One possible internal state with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct InternalCandidate {
    pub state: StateVector,
    pub probability: f64,
    /// The eigenvalue is shared with another candidate, so this particular
    /// vector is one arbitrary choice from the eigenspace.
    pub degenerate: bool,
}

/// Possible internal states of `S` given its state relative to an isolated
/// reference system: the eigenvectors of `ρ_S(I)` with nonzero eigenvalue,
/// in descending order of probability.
pub fn internal_candidates(rho: &ReferenceState) -> Result<Vec<InternalCandidate>> {
    if !rho.isolated {
        return Err(Error::NotIsolated);
    }
    let state = DensityOperator::new(rho.state.as_operator().clone())?;
    let es = hermitian_eigensystem(state.as_operator())?;
    Ok(es
        .into_pairs()
        .into_iter()
        .filter(|p| p.value >= ZERO_BRANCH_TOL)
        .map(|p| InternalCandidate { state: p.vector, probability: p.value, degenerate: p.degenerate })
        .collect())
}

fn check_disjoint(assignments: &[Projector]) -> Result<()> {
    for (i, a) in assignments.iter().enumerate() {
        for b in &assignments[i + 1..] {
            if let Some(id) = a.layout().shared_system(b.layout()) {
                return Err(Error::DisjointnessViolation(id.clone()));
            }
        }
    }
    Ok(())
}

/// `Tr[π_1 ··· π_n ρ]` for pairwise disjoint systems. Each projector names
/// its systems through its layout. Values within the tolerance band outside
/// `[0, 1]` are clamped.
pub fn joint_probability(assignments: &[Projector], rho: &DensityOperator) -> Result<f64> {
    check_disjoint(assignments)?;
    let value = naive_trace_functional(assignments, rho)?;
    if value.im.abs() > PROBABILITY_TOL {
        return Err(Error::ProbabilityOutOfRange(format!("imaginary part {:e}", value.im)));
    }
    if value.re < -PROBABILITY_TOL || value.re > 1.0 + PROBABILITY_TOL {
        return Err(Error::ProbabilityOutOfRange(format!("{}", value.re)));
    }
    Ok(value.re.clamp(0.0, 1.0))
}

/// `Tr[π_1 π_2 ··· π_n ρ]` in the order given, with no disjointness guard
/// and no clamping. For overlapping systems the result need not be a
/// probability and may depend on the order.
pub fn naive_trace_functional(assignments: &[Projector], rho: &DensityOperator) -> Result<C64> {
    let target = rho.layout();
    let mut product = rho.as_operator().clone();
    for pi in assignments.iter().rev() {
        product = pi.as_operator().embed(target)?.compose(&product)?;
    }
    Ok(product.trace())
}

/// Whether an outcome set must resolve the identity on its systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    Required,
    Waived,
}

/// Labeled, mutually orthogonal projectors on one group of systems.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSet {
    pub name: String,
    pub outcomes: Vec<(String, Projector)>,
}

impl OutcomeSet {
    pub fn new(name: impl Into<String>, outcomes: Vec<(String, Projector)>) -> Result<Self> {
        let name = name.into();
        let Some((_, first)) = outcomes.first() else {
            return Err(Error::InvalidLayout(format!("outcome set `{name}` is empty")));
        };
        let layout = first.layout().clone();
        for (label, pi) in &outcomes {
            if pi.layout() != &layout {
                return Err(Error::LayoutConflict(format!("outcome `{label}` of `{name}` acts on {}", pi.layout())));
            }
        }
        for (i, (la, a)) in outcomes.iter().enumerate() {
            for (lb, b) in &outcomes[i + 1..] {
                let overlap = a.as_operator().compose(b.as_operator())?;
                let size = overlap.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
                if size > COMPLETENESS_TOL {
                    return Err(Error::NotProjector(format!("outcomes `{la}` and `{lb}` are not orthogonal")));
                }
            }
        }
        Ok(OutcomeSet { name, outcomes })
    }

    /// `max |Σπ - 1|` over entries.
    pub fn completeness_defect(&self) -> f64 {
        let layout = self.outcomes[0].1.layout().clone();
        let sum = self
            .outcomes
            .iter()
            .try_fold(LinearOperator::zeros(layout.clone()), |acc, (_, pi)| acc.add(pi.as_operator()))
            .expect("outcomes share one layout");
        sum.max_abs_diff(&LinearOperator::identity(layout))
    }
}

/// Joint distribution over every combination of outcomes, one per set.
pub fn correlation_table(
    sets: &[OutcomeSet],
    rho: &DensityOperator,
    completeness: Completeness,
) -> Result<OutcomeDistribution> {
    if completeness == Completeness::Required {
        for set in sets {
            let defect = set.completeness_defect();
            if defect > COMPLETENESS_TOL {
                return Err(Error::Incomplete(defect));
            }
        }
    }
    let shape: Vec<usize> = sets.iter().map(|s| s.outcomes.len()).collect();
    let size: usize = shape.iter().product();
    let mut probabilities = Vec::with_capacity(size);
    for flat in 0..size {
        let mut rest = flat;
        let mut index = vec![0; shape.len()];
        for (axis, &n) in shape.iter().enumerate().rev() {
            index[axis] = rest % n;
            rest /= n;
        }
        let assignments: Vec<Projector> = index.iter().zip(sets).map(|(&i, set)| set.outcomes[i].1.clone()).collect();
        probabilities.push(joint_probability(&assignments, rho)?);
    }
    OutcomeDistribution::new(
        sets.iter().map(|s| s.name.clone()).collect(),
        sets.iter().map(|s| s.outcomes.iter().map(|(l, _)| l.clone()).collect()).collect(),
        probabilities,
    )
}
