//! Random operators and invariant checks shared by the property suite and
//! the acceptance target. Every check returns the largest observed defect.

#![allow(dead_code)]

use nalgebra::DMatrix;
use proptest::prelude::*;
use refsys_core::postulates::{correlation_table, joint_probability, naive_trace_functional, Completeness, OutcomeSet};
use refsys_core::{
    embed_operator, hermitian_eigensystem, tensor_product, DensityOperator, LinearOperator, Projector, SpaceLayout,
    StateVector, SystemId, C64,
};

pub const NAMES: [&str; 3] = ["A", "B", "C"];

/// Factor dimensions of a random layout plus enough entries for a full matrix.
#[derive(Debug, Clone)]
pub struct Sample {
    pub dims: Vec<usize>,
    pub entries: Vec<(f64, f64)>,
}

impl Sample {
    pub fn layout(&self) -> SpaceLayout {
        layout_of(&self.dims)
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        let n: usize = self.dims.iter().product();
        DMatrix::from_fn(n, n, |r, c| {
            let (re, im) = self.entries[r * n + c];
            C64::new(re, im)
        })
    }

    pub fn density(&self) -> DensityOperator {
        density_from(self.layout(), self.matrix())
    }

    pub fn hermitian(&self) -> LinearOperator {
        let m = self.matrix();
        LinearOperator::new(self.layout(), (&m + m.adjoint()) * C64::new(0.5, 0.0)).unwrap()
    }
}

pub fn layout_of(dims: &[usize]) -> SpaceLayout {
    SpaceLayout::new(dims.iter().zip(NAMES).map(|(&d, n)| (n, d))).unwrap()
}

pub fn ids(names: &[&str]) -> Vec<SystemId> {
    names.iter().map(|&n| SystemId::from(n)).collect()
}

/// `G G† + ε I`, normalized to unit trace.
pub fn density_from(layout: SpaceLayout, g: DMatrix<C64>) -> DensityOperator {
    let n = g.nrows();
    let mut m = &g * g.adjoint() + DMatrix::<C64>::identity(n, n) * C64::new(1e-3, 0.0);
    let tr = m.trace();
    m /= tr;
    DensityOperator::new(LinearOperator::new(layout, m).unwrap()).unwrap()
}

pub fn entries(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
}

/// Two or three factors of dimension 1 to 3.
pub fn sample(min_factors: usize) -> impl Strategy<Value = Sample> {
    prop::collection::vec(1usize..=3, min_factors..=3).prop_flat_map(|dims| {
        let n: usize = dims.iter().product();
        entries(n * n).prop_map(move |entries| Sample { dims: dims.clone(), entries })
    })
}

/// Three factors of dimension 2 or 3.
pub fn tripartite() -> impl Strategy<Value = Sample> {
    prop::collection::vec(2usize..=3, 3).prop_flat_map(|dims| {
        let n: usize = dims.iter().product();
        entries(n * n).prop_map(move |entries| Sample { dims: dims.clone(), entries })
    })
}

fn nonempty_subsets(n: usize) -> Vec<Vec<SystemId>> {
    (1..(1usize << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).map(|i| SystemId::from(NAMES[i])).collect())
        .collect()
}

/// `|Tr(Tr_K ρ) − 1|` over every nonempty kept subset.
pub fn trace_preservation_defect(s: &Sample) -> f64 {
    let rho = s.density();
    nonempty_subsets(s.dims.len())
        .iter()
        .map(|keep| (rho.partial_trace(keep).unwrap().trace() - C64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max)
}

/// Tracing `A` then `B` versus `B` then `A` on a three-factor state.
pub fn trace_commutation_defect(s: &Sample) -> f64 {
    let rho = s.density();
    let ab = rho.partial_trace(&ids(&["B", "C"])).unwrap().partial_trace(&ids(&["C"])).unwrap();
    let ba = rho.partial_trace(&ids(&["A", "C"])).unwrap().partial_trace(&ids(&["C"])).unwrap();
    ab.as_operator().max_abs_diff(ba.as_operator())
}

/// `max |H − Σ λ |e⟩⟨e||` plus orthonormality of the eigenvectors.
pub fn reconstruction_defect(s: &Sample) -> f64 {
    let h = s.hermitian();
    let es = hermitian_eigensystem(&h).unwrap();
    let mut defect = es.reconstruct().max_abs_diff(&h);
    for (i, p) in es.pairs().iter().enumerate() {
        for (j, q) in es.pairs().iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((p.vector.inner(&q.vector).unwrap() - C64::new(expected, 0.0)).norm());
        }
    }
    defect
}

/// `embed(XY)` versus `embed(X) embed(Y)` for operators on `C ⊗ A`, a
/// reversed and non-contiguous subset of the target.
pub fn embedding_defect(dims: &[usize], x: &[(f64, f64)], y: &[(f64, f64)]) -> f64 {
    let target = layout_of(dims);
    let local = SpaceLayout::new([("C", dims[2]), ("A", dims[0])]).unwrap();
    let n = local.dim();
    let op = |e: &[(f64, f64)]| {
        LinearOperator::from_fn(local.clone(), |r, c| {
            let (re, im) = e[r * n + c];
            C64::new(re, im)
        })
        .unwrap()
    };
    let (x, y) = (op(x), op(y));
    let lhs = embed_operator(&x.compose(&y).unwrap(), &target).unwrap();
    let rhs = embed_operator(&x, &target).unwrap().compose(&embed_operator(&y, &target).unwrap()).unwrap();
    lhs.max_abs_diff(&rhs)
}

/// `Tr_B(a ⊗ b)` versus `a` and `Tr_A(a ⊗ b)` versus `b`.
pub fn tensor_trace_defect(a: &Sample, b: &Sample) -> f64 {
    let rho_a = density_from(SpaceLayout::single("A", a.dims[0]).unwrap(), a.matrix());
    let rho_b = density_from(SpaceLayout::single("B", b.dims[0]).unwrap(), b.matrix());
    let joint = tensor_product(&rho_a, &rho_b).unwrap();
    let back_a = joint.partial_trace(&ids(&["A"])).unwrap();
    let back_b = joint.partial_trace(&ids(&["B"])).unwrap();
    back_a.as_operator().max_abs_diff(rho_a.as_operator()).max(back_b.as_operator().max_abs_diff(rho_b.as_operator()))
}

/// Rank-1 projector on one factor from raw components.
pub fn ray(id: &str, components: &[(f64, f64)]) -> Projector {
    let layout = SpaceLayout::single(id, components.len()).unwrap();
    let amps: Vec<C64> = components.iter().map(|&(re, im)| C64::new(re, im + 1e-3)).collect();
    StateVector::normalized(layout, amps).unwrap().dyad()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Spread of `joint_probability` over every ordering of three disjoint
/// projectors, and its gap to the unguarded functional.
pub fn ordering_and_guard_defect(s: &Sample, rays: &[Vec<(f64, f64)>; 3]) -> (f64, f64) {
    let rho = s.density();
    let projectors: Vec<Projector> = NAMES.iter().zip(rays).zip(&s.dims).map(|((n, r), &d)| ray(n, &r[..d])).collect();
    let reference = joint_probability(&projectors, &rho).unwrap();
    let mut spread = 0.0_f64;
    let mut guard = 0.0_f64;
    for perm in permutations(3) {
        let ordered: Vec<Projector> = perm.iter().map(|&i| projectors[i].clone()).collect();
        let p = joint_probability(&ordered, &rho).unwrap();
        let naive = naive_trace_functional(&ordered, &rho).unwrap();
        spread = spread.max((p - reference).abs());
        guard = guard.max((naive - C64::new(p, 0.0)).norm());
    }
    (spread, guard)
}

fn computational_set(id: &str, dim: usize) -> OutcomeSet {
    let layout = SpaceLayout::single(id, dim).unwrap();
    let outcomes = (0..dim).map(|k| (k.to_string(), StateVector::basis(layout.clone(), k).unwrap().dyad())).collect();
    OutcomeSet::new(id, outcomes).unwrap()
}

/// Marginalizing the `A`/`B` table over one axis versus the single-system table.
pub fn marginal_defect(s: &Sample) -> f64 {
    let rho = s.density();
    let (a, b) = (computational_set("A", s.dims[0]), computational_set("B", s.dims[1]));
    let table = correlation_table(&[a.clone(), b.clone()], &rho, Completeness::Required).unwrap();
    let only_a = correlation_table(&[a], &rho, Completeness::Required).unwrap();
    let only_b = correlation_table(&[b], &rho, Completeness::Required).unwrap();
    table.marginal(0).max_abs_diff(&only_a).max(table.marginal(1).max_abs_diff(&only_b))
}

/// Candidate probabilities versus the eigenvalues, and their total versus 1.
pub fn candidates_defect(s: &Sample) -> f64 {
    use refsys_core::postulates::{internal_candidates, ReferenceState, ZERO_BRANCH_TOL};
    let rho = s.density();
    let reference = ids(&NAMES[..s.dims.len()]);
    let state = ReferenceState::new(reference, rho.as_operator().clone()).unwrap().assume_isolated();
    let candidates = internal_candidates(&state).unwrap();
    let values: Vec<f64> = hermitian_eigensystem(rho.as_operator())
        .unwrap()
        .values()
        .into_iter()
        .filter(|&v| v >= ZERO_BRANCH_TOL)
        .collect();
    let mut defect = if values.len() == candidates.len() { 0.0 } else { f64::INFINITY };
    for (c, v) in candidates.iter().zip(&values) {
        defect = defect.max((c.probability - v).abs());
    }
    let total: f64 = candidates.iter().map(|c| c.probability).sum();
    defect.max((total - 1.0).abs())
}

/// `α_k = 0.01 + 0.98 k / 100` for `k = 1..=99`.
pub fn alpha_grid() -> Vec<f64> {
    (1..=99).map(|k| 0.01 + 0.98 * k as f64 / 100.0).collect()
}

pub mod hardy {
    use refsys_core::hardy::{ExperimentState, Stage};
    use refsys_core::{HardyModel, Particle, Setting, Settings};

    pub const SETTINGS: [Setting; 2] = [Setting::U, Setting::D];
    pub const PARTICLES: [Particle; 2] = [Particle::First, Particle::Second];

    /// `a² + b² − 1`, `A² + B² − 1` and `αb² − βa²`.
    pub fn coefficient_defect(m: &HardyModel) -> f64 {
        let b = m.basis();
        [
            b.a * b.a + b.b * b.b - 1.0,
            b.big_a * b.big_a + b.big_b * b.big_b - 1.0,
            m.alpha() * b.b * b.b - m.beta() * b.a * b.a,
        ]
        .iter()
        .fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// `‖U†U − I‖` of every measurement unitary.
    pub fn unitarity_defect(m: &HardyModel) -> f64 {
        let mut defect = 0.0_f64;
        for s in SETTINGS {
            for p in PARTICLES {
                defect = defect.max(m.measurement_unitary(s, p).unitarity_defect());
            }
        }
        defect
    }

    /// `|‖ψ_final‖ − 1|`, and the largest amplitude left on a ready pointer.
    pub fn evolution_defect(m: &HardyModel) -> (f64, f64) {
        let mut norm = 0.0_f64;
        let mut ready = 0.0_f64;
        for settings in Settings::ALL {
            let fin: ExperimentState = m.final_state(settings).unwrap();
            assert_eq!(fin.stage(), Stage::Final);
            norm = norm.max((fin.state().norm() - 1.0).abs());
            ready = ready.max(fin.ready_amplitude());
        }
        (norm, ready)
    }

    /// Change in each device marginal when only the partner's setting changes.
    pub fn locality_defect(m: &HardyModel) -> f64 {
        let mut defect = 0.0_f64;
        for own in SETTINGS {
            let first: Vec<Vec<f64>> =
                SETTINGS.iter().map(|&other| marginal(m, Settings::new(own, other), Particle::First)).collect();
            let second: Vec<Vec<f64>> =
                SETTINGS.iter().map(|&other| marginal(m, Settings::new(other, own), Particle::Second)).collect();
            for pair in [first, second] {
                for (x, y) in pair[0].iter().zip(&pair[1]) {
                    defect = defect.max((x - y).abs());
                }
            }
        }
        defect
    }

    pub fn marginal(m: &HardyModel, settings: Settings, device: Particle) -> Vec<f64> {
        m.final_state(settings).unwrap().device_marginal(device).unwrap().into_iter().map(|(_, p)| p).collect()
    }

    /// `|⟨φ₊|φ₋⟩|` and `ρ_{P_i+M_i}` versus `α² dyad(φ₊) + β² dyad(φ₋)`.
    pub fn branch_defect(m: &HardyModel) -> f64 {
        let mut defect = 0.0_f64;
        for settings in Settings::ALL {
            let fin = m.final_state(settings).unwrap();
            for p in PARTICLES {
                let setting = settings.get(p);
                let (plus, minus) = m.branch_states(setting, p);
                defect = defect.max(plus.inner(&minus).unwrap().norm());
                let reduced = fin.reduced(&[p.particle_id(), p.device_id()]).unwrap();
                defect = defect.max(reduced.state().as_operator().max_abs_diff(&m.branch_mixture(setting, p)));
            }
        }
        defect
    }
}
