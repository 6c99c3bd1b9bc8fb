//! Hardy's two-particle, two-device experiment.
//!
//! The particles `P1`, `P2` live on qubits with basis `|+⟩` (index 0) and
//! `|−⟩` (index 1). Each measuring device `M1`, `M2` is a qutrit with the
//! ready pointer `m0` and result pointers `m1`, `m2`. The full space is laid
//! out as `P1 ⊗ P2 ⊗ M1 ⊗ M2` (dimension 36).
//!
//! The initial state is `(α|+⟩|+⟩ − β|−⟩|−⟩)|m0⟩|m0⟩`. Measuring particle
//! `i` in the eigenbasis `(ξ1, ξ2)` maps `|ξj⟩|m0⟩ → |ξj⟩|mj⟩`.

use crate::distribution::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::layout::{SpaceLayout, SystemId};
use crate::postulates::{correlation_table, reduced_state, Completeness, OutcomeSet, ReferenceState};
use crate::tensor::{DensityOperator, LinearOperator, Projector, StateVector, TensorProduct, C64};

pub const P1: SystemId = SystemId::from_static("P1");
pub const P2: SystemId = SystemId::from_static("P2");
pub const M1: SystemId = SystemId::from_static("M1");
pub const M2: SystemId = SystemId::from_static("M2");

pub const PARTICLE_DIM: usize = 2;
pub const DEVICE_DIM: usize = 3;

/// Smallest admissible `|α − β|`.
pub const MIN_ALPHA_BETA_GAP: f64 = 1e-9;
/// Smallest admissible `α²` and `β²`. Below this `β = √(1 − α²)` (or `α`)
/// carries no reliable digits in double precision.
pub const MIN_WEIGHT: f64 = 1e-12;
/// Absolute tolerance of every closed-form versus simulation comparison.
pub const CHECK_TOL: f64 = 1e-10;

/// Amplitudes `α`, `β` of the initial pair state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyParameters {
    alpha: f64,
    beta: f64,
}

impl HardyParameters {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
            return Err(Error::Domain(format!("alpha = {alpha} is not in (0, 1)")));
        }
        let beta_sq = (1.0 - alpha) * (1.0 + alpha);
        if alpha * alpha <= MIN_WEIGHT || beta_sq <= MIN_WEIGHT {
            return Err(Error::Domain(format!(
                "alpha = {alpha} leaves alpha^2 = {:e}, beta^2 = {beta_sq:e}; both must exceed {MIN_WEIGHT:e}",
                alpha * alpha
            )));
        }
        let beta = beta_sq.sqrt();
        if (alpha - beta).abs() <= MIN_ALPHA_BETA_GAP {
            return Err(Error::DegenerateParameter(format!(
                "|alpha - beta| = {:e} at alpha = {alpha}; the c/d basis collapses onto u/v",
                (alpha - beta).abs()
            )));
        }
        Ok(HardyParameters { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// A single-particle vector given by its `(⟨+|·⟩, ⟨−|·⟩)` components.
pub type Components = [f64; 2];

/// Coefficients and measurement basis vectors, identical for both particles.
///
/// `u = b|+⟩ + a|−⟩`, `v = −a|+⟩ + b|−⟩`, `c = A u + B v`, `d = −B u + A v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyBasis {
    pub a: f64,
    pub b: f64,
    pub big_a: f64,
    pub big_b: f64,
    pub u: Components,
    pub v: Components,
    pub c: Components,
    pub d: Components,
}

impl HardyBasis {
    pub fn new(params: &HardyParameters) -> Self {
        let (alpha, beta) = (params.alpha, params.beta);
        let a = (alpha / (alpha + beta)).sqrt();
        let b = (beta / (alpha + beta)).sqrt();
        let big_a = (alpha * beta / (1.0 - alpha * beta)).sqrt();
        let big_b = (beta - alpha) / (1.0 - alpha * beta).sqrt();
        let u = [b, a];
        let v = [-a, b];
        let c = [big_a * u[0] + big_b * v[0], big_a * u[1] + big_b * v[1]];
        let d = [-big_b * u[0] + big_a * v[0], -big_b * u[1] + big_a * v[1]];
        HardyBasis { a, b, big_a, big_b, u, v, c, d }
    }

    /// Eigenbasis `(ξ1, ξ2)` of the observable selected by `setting`.
    pub fn eigenbasis(&self, setting: Setting) -> [Components; 2] {
        match setting {
            Setting::U => [self.u, self.v],
            Setting::D => [self.c, self.d],
        }
    }
}

/// Observable measured on one particle: `U` has eigenbasis `(u, v)`, `D`
/// has `(c, d)`. Outcome 1 (`U = 1`, `D = 1`) is the first basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    U,
    D,
}

impl Setting {
    pub fn label(self) -> &'static str {
        match self {
            Setting::U => "U",
            Setting::D => "D",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Settings {
    pub first: Setting,
    pub second: Setting,
}

impl Settings {
    pub const ALL: [Settings; 4] = [
        Settings::new(Setting::U, Setting::U),
        Settings::new(Setting::U, Setting::D),
        Settings::new(Setting::D, Setting::U),
        Settings::new(Setting::D, Setting::D),
    ];

    pub const fn new(first: Setting, second: Setting) -> Self {
        Settings { first, second }
    }

    pub fn get(&self, particle: Particle) -> Setting {
        match particle {
            Particle::First => self.first,
            Particle::Second => self.second,
        }
    }

    pub fn label(&self) -> String {
        format!("{}/{}", self.first.label(), self.second.label())
    }
}

/// Particle index together with its measuring device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Particle {
    First,
    Second,
}

impl Particle {
    pub fn particle_id(self) -> SystemId {
        match self {
            Particle::First => P1,
            Particle::Second => P2,
        }
    }

    pub fn device_id(self) -> SystemId {
        match self {
            Particle::First => M1,
            Particle::Second => M2,
        }
    }

    pub fn particle_layout(self) -> SpaceLayout {
        SpaceLayout::single(self.particle_id(), PARTICLE_DIM).expect("valid layout")
    }

    pub fn device_layout(self) -> SpaceLayout {
        SpaceLayout::single(self.device_id(), DEVICE_DIM).expect("valid layout")
    }

    /// `P_i ⊗ M_i`.
    pub fn pair_layout(self) -> SpaceLayout {
        SpaceLayout::new([(self.particle_id(), PARTICLE_DIM), (self.device_id(), DEVICE_DIM)]).expect("valid layout")
    }

    /// Single-particle state with the given `(+, −)` components.
    pub fn state(self, components: Components) -> StateVector {
        StateVector::from_real(self.particle_layout(), &components).expect("basis vectors are unit vectors")
    }
}

/// Orthonormal pointer states of a measuring device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pointer {
    Ready,
    One,
    Two,
}

impl Pointer {
    pub const ALL: [Pointer; 3] = [Pointer::Ready, Pointer::One, Pointer::Two];
    pub const RESULTS: [Pointer; 2] = [Pointer::One, Pointer::Two];

    pub fn index(self) -> usize {
        match self {
            Pointer::Ready => 0,
            Pointer::One => 1,
            Pointer::Two => 2,
        }
    }

    pub fn from_index(index: usize) -> Option<Pointer> {
        Pointer::ALL.get(index).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Pointer::Ready => "m0",
            Pointer::One => "m1",
            Pointer::Two => "m2",
        }
    }

    pub fn state(self, device: Particle) -> StateVector {
        StateVector::basis(device.device_layout(), self.index()).expect("pointer index within device dimension")
    }
}

/// Initial internal state of `P1`, which plays the part of the hidden variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HiddenBranch {
    Plus,
    Minus,
}

impl HiddenBranch {
    pub const ALL: [HiddenBranch; 2] = [HiddenBranch::Plus, HiddenBranch::Minus];

    pub fn components(self) -> Components {
        match self {
            HiddenBranch::Plus => [1.0, 0.0],
            HiddenBranch::Minus => [0.0, 1.0],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            HiddenBranch::Plus => "plus",
            HiddenBranch::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Initial,
    Final,
}

/// State of `P1 + P2 + M1 + M2` before or after the measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentState {
    state: StateVector,
    stage: Stage,
    settings: Option<Settings>,
}

impl ExperimentState {
    pub fn layout() -> SpaceLayout {
        SpaceLayout::new([(P1, PARTICLE_DIM), (P2, PARTICLE_DIM), (M1, DEVICE_DIM), (M2, DEVICE_DIM)])
            .expect("valid layout")
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    /// Settings applied by [`HardyModel::evolve`]; `None` before.
    pub fn settings(&self) -> Option<Settings> {
        self.settings
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::pure(&self.state)
    }

    pub fn reduced(&self, subsystem: &[SystemId]) -> Result<ReferenceState> {
        reduced_state(&self.state, subsystem)
    }

    /// Largest amplitude on a basis vector where either device shows `m0`.
    pub fn ready_amplitude(&self) -> f64 {
        (0..self.state.dim())
            .filter(|i| {
                let (m1, m2) = ((i / DEVICE_DIM) % DEVICE_DIM, i % DEVICE_DIM);
                m1 == 0 || m2 == 0
            })
            .map(|i| self.state.amplitude(i).norm())
            .fold(0.0, f64::max)
    }

    /// `⟨mj|ρ_M(I)|mj⟩` for every pointer state of `device`.
    pub fn device_marginal(&self, device: Particle) -> Result<Vec<(Pointer, f64)>> {
        self.require(Stage::Final)?;
        let rho = self.reduced(&[device.device_id()])?;
        let op = rho.state().as_operator();
        Ok(Pointer::ALL.iter().map(|&p| (p, op.entry(p.index(), p.index()).re)).collect())
    }

    fn require(&self, expected: Stage) -> Result<()> {
        if self.stage == expected {
            Ok(())
        } else {
            Err(Error::Stage { expected, found: self.stage })
        }
    }
}

/// Closed-form and simulated `P(M1 = j, M2 = k)` tables for one setting pair.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeComparison {
    pub settings: Settings,
    pub closed_form: OutcomeDistribution,
    pub simulated: OutcomeDistribution,
    pub max_abs_diff: f64,
}

/// One of the four standard predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemCheck {
    pub item: u8,
    pub description: &'static str,
    pub settings: Settings,
    /// From the evolved 36-dimensional state.
    pub simulated: f64,
    /// From the amplitude formula.
    pub closed_form: f64,
    /// The stated prediction: zero for items 1-3, `α²β²(α−β)²/(1−αβ)²` for item 4.
    pub expected: f64,
    pub abs_diff: f64,
    pub passed: bool,
}

/// The four standard predictions evaluated at one `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemsReport {
    pub alpha: f64,
    pub items: Vec<ItemCheck>,
}

impl ItemsReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

/// Parameters, derived basis, and everything computed from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyModel {
    params: HardyParameters,
    basis: HardyBasis,
}

/// Validates `alpha` and derives the measurement bases.
pub fn build_model(alpha: f64) -> Result<HardyModel> {
    HardyModel::new(alpha)
}

impl HardyModel {
    pub fn new(alpha: f64) -> Result<Self> {
        let params = HardyParameters::new(alpha)?;
        Ok(HardyModel { params, basis: HardyBasis::new(&params) })
    }

    pub fn params(&self) -> &HardyParameters {
        &self.params
    }

    pub fn basis(&self) -> &HardyBasis {
        &self.basis
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn beta(&self) -> f64 {
        self.params.beta
    }

    /// `α|+⟩|+⟩ − β|−⟩|−⟩` on `P1 ⊗ P2`.
    pub fn pair_state(&self) -> StateVector {
        let plus_plus = Particle::First.state([1.0, 0.0]).tensor(&Particle::Second.state([1.0, 0.0]));
        let minus_minus = Particle::First.state([0.0, 1.0]).tensor(&Particle::Second.state([0.0, 1.0]));
        let (pp, mm) = (plus_plus.expect("disjoint"), minus_minus.expect("disjoint"));
        let amplitudes = pp
            .amplitudes()
            .iter()
            .zip(mm.amplitudes().iter())
            .map(|(x, y)| x * self.params.alpha - y * self.params.beta)
            .collect();
        StateVector::new(pp.layout().clone(), amplitudes).expect("alpha^2 + beta^2 = 1")
    }

    /// Pair state with both devices ready.
    pub fn initial_state(&self) -> ExperimentState {
        let state = self
            .pair_state()
            .tensor(&Pointer::Ready.state(Particle::First))
            .and_then(|s| s.tensor(&Pointer::Ready.state(Particle::Second)))
            .expect("disjoint factors");
        ExperimentState { state, stage: Stage::Initial, settings: None }
    }

    /// Unitary on `P_i ⊗ M_i` realizing `|ξj⟩|m0⟩ → |ξj⟩|mj⟩`. Off the ready
    /// sector it is completed by the cyclic pointer shift
    /// `|ξj⟩|mk⟩ → |ξj⟩|m_{(k+j) mod 3}⟩`.
    pub fn measurement_unitary(&self, setting: Setting, particle: Particle) -> LinearOperator {
        let mut total = LinearOperator::zeros(particle.pair_layout());
        for (j, xi) in self.basis.eigenbasis(setting).iter().enumerate() {
            let shift = j + 1;
            let xi = particle.state(*xi);
            let particle_part = xi.dyad().as_operator().clone();
            for k in 0..DEVICE_DIM {
                let from = Pointer::from_index(k).expect("k < 3").state(particle);
                let to = Pointer::from_index((k + shift) % DEVICE_DIM).expect("index < 3").state(particle);
                let term = particle_part
                    .tensor(&LinearOperator::outer(&to, &from).expect("same device layout"))
                    .expect("disjoint factors");
                total = total.add(&term).expect("same pair layout");
            }
        }
        total
    }

    /// Runs both measurements on an initial state.
    pub fn evolve(&self, initial: &ExperimentState, settings: Settings) -> Result<ExperimentState> {
        initial.require(Stage::Initial)?;
        let layout = ExperimentState::layout();
        let first = self.measurement_unitary(settings.first, Particle::First).embed(&layout)?;
        let second = self.measurement_unitary(settings.second, Particle::Second).embed(&layout)?;
        let state = first.compose(&second)?.apply(&initial.state)?;
        Ok(ExperimentState { state, stage: Stage::Final, settings: Some(settings) })
    }

    pub fn final_state(&self, settings: Settings) -> Result<ExperimentState> {
        self.evolve(&self.initial_state(), settings)
    }

    /// `(φ₊, φ₋)` with `φ_s = Σj ⟨ξj|s⟩ |ξj⟩|mj⟩` on `P_i ⊗ M_i`.
    pub fn branch_states(&self, setting: Setting, particle: Particle) -> (StateVector, StateVector) {
        let branch = |branch: HiddenBranch| self.branch_state(setting, particle, branch);
        (branch(HiddenBranch::Plus), branch(HiddenBranch::Minus))
    }

    pub fn branch_state(&self, setting: Setting, particle: Particle, branch: HiddenBranch) -> StateVector {
        let s = branch.components();
        let mut amplitudes = vec![C64::new(0.0, 0.0); PARTICLE_DIM * DEVICE_DIM];
        for (xi, pointer) in self.basis.eigenbasis(setting).iter().zip(Pointer::RESULTS) {
            let overlap = xi[0] * s[0] + xi[1] * s[1];
            for (p, x) in xi.iter().enumerate() {
                amplitudes[p * DEVICE_DIM + pointer.index()] += C64::new(overlap * x, 0.0);
            }
        }
        StateVector::new(particle.pair_layout(), amplitudes).expect("branch states are unit vectors")
    }

    /// `⟨ξ1_j|+⟩⟨ξ2_k|+⟩ α − ⟨ξ1_j|−⟩⟨ξ2_k|−⟩ β`, the amplitude of
    /// `|ξ1_j⟩|mj⟩|ξ2_k⟩|mk⟩` in the final state. `j`, `k` are 1 or 2.
    pub fn amplitude(&self, settings: Settings, j: usize, k: usize) -> f64 {
        let x1 = self.basis.eigenbasis(settings.first)[j - 1];
        let x2 = self.basis.eigenbasis(settings.second)[k - 1];
        self.params.alpha * x1[0] * x2[0] - self.params.beta * x1[1] * x2[1]
    }

    /// Closed-form `P(M1, j, M2, k)`.
    pub fn joint_closed_form(&self, settings: Settings, j: usize, k: usize) -> f64 {
        self.amplitude(settings, j, k).powi(2)
    }

    /// Closed-form `p_j = α²|⟨ξj|+⟩|² + β²|⟨ξj|−⟩|²`; zero for the ready pointer.
    pub fn marginal_closed_form(&self, setting: Setting, pointer: Pointer) -> f64 {
        match pointer {
            Pointer::Ready => 0.0,
            Pointer::One | Pointer::Two => {
                let xi = self.basis.eigenbasis(setting)[pointer.index() - 1];
                let (a2, b2) = (self.params.alpha.powi(2), self.params.beta.powi(2));
                a2 * xi[0].powi(2) + b2 * xi[1].powi(2)
            }
        }
    }

    /// `α²β²(α−β)²/(1−αβ)²`, the probability of `D1 = 1 ∧ D2 = 1`.
    pub fn hardy_joint_closed_form(&self) -> f64 {
        let (a, b) = (self.params.alpha, self.params.beta);
        (a * b * (a - b) / (1.0 - a * b)).powi(2)
    }

    fn pointer_set(device: Particle) -> OutcomeSet {
        let outcomes = Pointer::RESULTS.iter().map(|p| (p.index().to_string(), p.state(device).dyad())).collect();
        OutcomeSet::new(device.device_id().as_str(), outcomes).expect("pointer states are orthonormal")
    }

    /// `P(M1 = j, M2 = k)` for `j, k ∈ {1, 2}` from the closed form and from
    /// pointer projectors on the evolved state.
    pub fn outcome_distribution(&self, settings: Settings) -> Result<OutcomeComparison> {
        let fin = self.final_state(settings)?;
        let simulated = correlation_table(
            &[Self::pointer_set(Particle::First), Self::pointer_set(Particle::Second)],
            &fin.density(),
            Completeness::Waived,
        )?;
        let mut probabilities = Vec::with_capacity(4);
        for j in 1..=2 {
            for k in 1..=2 {
                probabilities.push(self.joint_closed_form(settings, j, k));
            }
        }
        let closed_form = OutcomeDistribution::new(
            simulated.axes().to_vec(),
            vec![simulated.labels(0).to_vec(), simulated.labels(1).to_vec()],
            probabilities,
        )?;
        let max_abs_diff = closed_form.max_abs_diff(&simulated);
        Ok(OutcomeComparison { settings, closed_form, simulated, max_abs_diff })
    }

    /// The four standard predictions:
    /// 1. `P(U1 = 1, U2 = 1) = 0`;
    /// 2. `P(D1 = 1, U2 ≠ 1) = 0`;
    /// 3. `P(U1 ≠ 1, D2 = 1) = 0`;
    /// 4. `P(D1 = 1, D2 = 1) = α²β²(α−β)²/(1−αβ)²`.
    pub fn verify_items(&self) -> Result<ItemsReport> {
        use Setting::{D, U};
        let specs: [(u8, &'static str, Settings, usize, usize, f64); 4] = [
            (1, "P(U1=1, U2=1) = 0", Settings::new(U, U), 1, 1, 0.0),
            (2, "P(D1=1, U2!=1) = 0", Settings::new(D, U), 2, 2, 0.0),
            (3, "P(U1!=1, D2=1) = 0", Settings::new(U, D), 2, 2, 0.0),
            (
                4,
                "P(D1=1, D2=1) = a^2 b^2 (a-b)^2 / (1-ab)^2",
                Settings::new(D, D),
                2,
                2,
                self.hardy_joint_closed_form(),
            ),
        ];
        let mut items = Vec::with_capacity(4);
        for (item, description, settings, j, k, expected) in specs {
            let table = self.outcome_distribution(settings)?;
            let simulated = table.simulated.get(&[j - 1, k - 1]);
            let closed_form = table.closed_form.get(&[j - 1, k - 1]);
            let abs_diff = (simulated - expected).abs().max((closed_form - expected).abs());
            items.push(ItemCheck {
                item,
                description,
                settings,
                simulated,
                closed_form,
                expected,
                abs_diff,
                passed: abs_diff <= CHECK_TOL,
            });
        }
        Ok(ItemsReport { alpha: self.params.alpha, items })
    }

    /// Joint distribution of the final `P1 + M1` branch state (`φ₊`, `φ₋`)
    /// and the `M2` result pointer.
    pub fn hidden_branch_table(&self, settings: Settings) -> Result<OutcomeDistribution> {
        let fin = self.final_state(settings)?;
        let branches = HiddenBranch::ALL
            .iter()
            .map(|&b| (b.label().to_string(), self.branch_state(settings.first, Particle::First, b).dyad()))
            .collect();
        let branch_set = OutcomeSet::new("P1+M1", branches)?;
        correlation_table(&[branch_set, Self::pointer_set(Particle::Second)], &fin.density(), Completeness::Waived)
    }

    /// `α² dyad(φ₊) + β² dyad(φ₋)` on `P_i ⊗ M_i`.
    pub fn branch_mixture(&self, setting: Setting, particle: Particle) -> LinearOperator {
        let (plus, minus) = self.branch_states(setting, particle);
        let weight = |x: f64| C64::new(x * x, 0.0);
        plus.dyad()
            .as_operator()
            .scale(weight(self.params.alpha))
            .add(&minus.dyad().as_operator().scale(weight(self.params.beta)))
            .expect("same layout")
    }
}

/// Rank-1 projector onto a pointer state.
pub fn pointer_projector(device: Particle, pointer: Pointer) -> Projector {
    pointer.state(device).dyad()
}
