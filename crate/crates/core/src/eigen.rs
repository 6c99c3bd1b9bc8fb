//! Hermitian eigensystems with degeneracy flagging.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::tensor::{LinearOperator, StateVector, C64};

/// Hermiticity required of an operator before decomposition.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues closer than this (relative to `max(1, spectral radius)`)
/// belong to one degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-9;

const MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: StateVector,
    /// Set when another eigenvalue lies within the degeneracy gap.
    pub degenerate: bool,
}

/// Eigenpairs sorted by descending eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem {
    pairs: Vec<EigenPair>,
}

impl Eigensystem {
    pub fn pairs(&self) -> &[EigenPair] {
        &self.pairs
    }

    pub fn into_pairs(self) -> Vec<EigenPair> {
        self.pairs
    }

    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn has_degeneracy(&self) -> bool {
        self.pairs.iter().any(|p| p.degenerate)
    }

    /// `Σ λ |e⟩⟨e|`.
    pub fn reconstruct(&self) -> LinearOperator {
        let layout = self.pairs[0].vector.layout().clone();
        self.pairs.iter().fold(LinearOperator::zeros(layout), |acc, p| {
            let term = p.vector.dyad().as_operator().scale(C64::new(p.value, 0.0));
            acc.add(&term).expect("eigenvectors share the operator layout")
        })
    }
}

/// Decomposes a Hermitian operator. Each eigenvector's phase is fixed so
/// that its largest-magnitude component (first one on ties) is real and
/// positive.
pub fn hermitian_eigensystem(op: &LinearOperator) -> Result<Eigensystem> {
    let defect = op.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::SymmetryViolation(defect));
    }
    let m = op.matrix();
    let symmetric = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(symmetric, f64::EPSILON, MAX_SWEEPS).ok_or(Error::NoConvergence)?;

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let scale = eig.eigenvalues.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let gap = DEGENERACY_GAP * scale;
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let mut pairs = Vec::with_capacity(values.len());
    for (rank, &i) in order.iter().enumerate() {
        let column: Vec<C64> = eig.eigenvectors.column(i).iter().copied().collect();
        let vector = StateVector::normalized(op.layout().clone(), fix_phase(column))?;
        let degenerate = (rank > 0 && values[rank - 1] - values[rank] < gap)
            || (rank + 1 < values.len() && values[rank] - values[rank + 1] < gap);
        pairs.push(EigenPair { value: values[rank], vector, degenerate });
    }
    Ok(Eigensystem { pairs })
}

fn fix_phase(mut v: Vec<C64>) -> Vec<C64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)).copied() {
        let phase = pivot.conj() / pivot.norm();
        for z in &mut v {
            *z *= phase;
        }
    }
    v
}
