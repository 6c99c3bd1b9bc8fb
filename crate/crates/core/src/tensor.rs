//! Dense complex vectors and operators over a [`SpaceLayout`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::{SpaceLayout, SystemId};

pub type C64 = Complex64;

/// Allowed deviation of a state vector's norm from 1.
pub const NORM_TOL: f64 = 1e-12;
/// Hermiticity, trace and positivity tolerance of a density operator.
pub const DENSITY_TOL: f64 = 1e-12;
/// Hermiticity and idempotence tolerance of a projector.
pub const PROJECTOR_TOL: f64 = 1e-10;

fn is_finite(z: &C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn max_abs<'a>(entries: impl Iterator<Item = &'a C64>) -> f64 {
    entries.map(|z| z.norm()).fold(0.0, f64::max)
}

fn same_layout(a: &SpaceLayout, b: &SpaceLayout) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::LayoutConflict(format!("{a} vs {b}")))
    }
}

/// Unit-norm complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: SpaceLayout,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(layout: SpaceLayout, amplitudes: Vec<C64>) -> Result<Self> {
        let v = Self::unchecked(layout, amplitudes)?;
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(v)
    }

    /// Scales `amplitudes` to unit norm.
    pub fn normalized(layout: SpaceLayout, amplitudes: Vec<C64>) -> Result<Self> {
        let mut v = Self::unchecked(layout, amplitudes)?;
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        v.amplitudes.unscale_mut(norm);
        Ok(v)
    }

    pub fn from_real(layout: SpaceLayout, amplitudes: &[f64]) -> Result<Self> {
        Self::new(layout, amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `index`.
    pub fn basis(layout: SpaceLayout, index: usize) -> Result<Self> {
        let dim = layout.dim();
        if index >= dim {
            return Err(Error::LayoutConflict(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self::new(layout, amplitudes)
    }

    fn unchecked(layout: SpaceLayout, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::LayoutConflict(format!(
                "{} amplitudes for layout {layout} of dimension {}",
                amplitudes.len(),
                layout.dim()
            )));
        }
        if !amplitudes.iter().all(is_finite) {
            return Err(Error::NonFinite);
        }
        Ok(StateVector { layout, amplitudes: DVector::from_vec(amplitudes) })
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        same_layout(&self.layout, &other.layout)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Rank-1 projector `|self⟩⟨self|`.
    pub fn dyad(&self) -> Projector {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        Projector(LinearOperator { layout: self.layout.clone(), matrix: m })
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        if self.layout != other.layout {
            return f64::INFINITY;
        }
        max_abs((&self.amplitudes - &other.amplitudes).iter())
    }
}

/// Square complex matrix acting on a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    layout: SpaceLayout,
    matrix: DMatrix<C64>,
}

impl LinearOperator {
    pub fn new(layout: SpaceLayout, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = layout.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::LayoutConflict(format!(
                "{}x{} matrix for layout {layout} of dimension {dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !matrix.iter().all(is_finite) {
            return Err(Error::NonFinite);
        }
        Ok(LinearOperator { layout, matrix })
    }

    pub fn from_fn(layout: SpaceLayout, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let dim = layout.dim();
        Self::new(layout, DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let dim = layout.dim();
        LinearOperator { layout, matrix: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(layout: SpaceLayout) -> Self {
        let dim = layout.dim();
        LinearOperator { layout, matrix: DMatrix::zeros(dim, dim) }
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Result<Self> {
        same_layout(&ket.layout, &bra.layout)?;
        Ok(LinearOperator { layout: ket.layout.clone(), matrix: &ket.amplitudes * bra.amplitudes.adjoint() })
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &LinearOperator) -> Result<LinearOperator> {
        same_layout(&self.layout, &other.layout)?;
        Ok(LinearOperator { layout: self.layout.clone(), matrix: &self.matrix * &other.matrix })
    }

    /// Applies the operator to a state. The image must again be a unit
    /// vector, so this is meant for isometries.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        same_layout(&self.layout, &v.layout)?;
        let amplitudes = &self.matrix * &v.amplitudes;
        StateVector::new(self.layout.clone(), amplitudes.iter().copied().collect())
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> LinearOperator {
        LinearOperator { layout: self.layout.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn add(&self, other: &LinearOperator) -> Result<LinearOperator> {
        same_layout(&self.layout, &other.layout)?;
        Ok(LinearOperator { layout: self.layout.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn scale(&self, factor: C64) -> LinearOperator {
        LinearOperator { layout: self.layout.clone(), matrix: &self.matrix * factor }
    }

    /// `max |A - A†|` over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs((&self.matrix - self.matrix.adjoint()).iter())
    }

    /// `max |U†U - I|` over entries.
    pub fn unitarity_defect(&self) -> f64 {
        let dim = self.dim();
        max_abs((self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(dim, dim)).iter())
    }

    pub fn max_abs_diff(&self, other: &LinearOperator) -> f64 {
        if self.layout != other.layout {
            return f64::INFINITY;
        }
        max_abs((&self.matrix - &other.matrix).iter())
    }

    /// Lifts the operator to `target`, acting as identity on every factor of
    /// `target` that this operator's layout does not name. The factors of
    /// `self` may appear anywhere in `target` and in any order.
    pub fn embed(&self, target: &SpaceLayout) -> Result<LinearOperator> {
        let mut positions = Vec::with_capacity(self.layout.factors().len());
        for f in self.layout.factors() {
            let p = target.position(&f.id).ok_or_else(|| Error::UnknownSystem(f.id.clone()))?;
            let target_dim = target.factors()[p].dim;
            if target_dim != f.dim {
                return Err(Error::LayoutConflict(format!(
                    "system `{}` has dimension {} locally but {target_dim} in target",
                    f.id, f.dim
                )));
            }
            positions.push(p);
        }
        let local = target.offsets(&positions);
        let rest = target.offsets(&target.complement(&positions));
        let dim = target.dim();
        let mut matrix = DMatrix::zeros(dim, dim);
        for &r in &rest {
            for (a, &la) in local.iter().enumerate() {
                for (b, &lb) in local.iter().enumerate() {
                    matrix[(la + r, lb + r)] = self.matrix[(a, b)];
                }
            }
        }
        Ok(LinearOperator { layout: target.clone(), matrix })
    }

    /// Contracts every factor not in `keep`. The result's factors follow
    /// this operator's canonical order.
    pub fn partial_trace(&self, keep: &[SystemId]) -> Result<LinearOperator> {
        let (kept, positions) = self.layout.restrict(keep)?;
        let kept_off = self.layout.offsets(&positions);
        let traced_off = self.layout.offsets(&self.layout.complement(&positions));
        let n = kept_off.len();
        let matrix = DMatrix::from_fn(n, n, |i, j| {
            traced_off.iter().map(|&t| self.matrix[(kept_off[i] + t, kept_off[j] + t)]).sum()
        });
        Ok(LinearOperator { layout: kept, matrix })
    }
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(LinearOperator);

impl DensityOperator {
    pub fn new(op: LinearOperator) -> Result<Self> {
        let herm = op.hermiticity_defect();
        if herm > DENSITY_TOL {
            return Err(Error::NotDensity(format!("Hermiticity defect {herm:e}")));
        }
        let tr = op.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let min = op.matrix.symmetric_eigenvalues().min();
        if min < -DENSITY_TOL {
            return Err(Error::NotDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityOperator(op))
    }

    /// `|psi⟩⟨psi|`.
    pub fn pure(psi: &StateVector) -> Self {
        DensityOperator(psi.dyad().0)
    }

    pub fn as_operator(&self) -> &LinearOperator {
        &self.0
    }

    pub fn into_operator(self) -> LinearOperator {
        self.0
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.0.layout
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Reduced state on `keep`. Positivity and unit trace carry over from
    /// the input, so the result is not revalidated.
    pub fn partial_trace(&self, keep: &[SystemId]) -> Result<DensityOperator> {
        self.0.partial_trace(keep).map(DensityOperator)
    }
}

/// Hermitian idempotent operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector(LinearOperator);

impl Projector {
    pub fn new(op: LinearOperator) -> Result<Self> {
        let herm = op.hermiticity_defect();
        if herm > PROJECTOR_TOL {
            return Err(Error::NotProjector(format!("Hermiticity defect {herm:e}")));
        }
        let idem = max_abs((&op.matrix * &op.matrix - &op.matrix).iter());
        if idem > PROJECTOR_TOL {
            return Err(Error::NotProjector(format!("idempotence defect {idem:e}")));
        }
        Ok(Projector(op))
    }

    pub fn as_operator(&self) -> &LinearOperator {
        &self.0
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.0.layout
    }

    pub fn rank(&self) -> usize {
        self.0.trace().re.round() as usize
    }
}

/// Kronecker product in the concatenated layout.
pub trait TensorProduct: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
}

impl TensorProduct for StateVector {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(StateVector { layout, amplitudes: self.amplitudes.kronecker(&other.amplitudes) })
    }
}

impl TensorProduct for LinearOperator {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(LinearOperator { layout, matrix: self.matrix.kronecker(&other.matrix) })
    }
}

impl TensorProduct for DensityOperator {
    fn tensor(&self, other: &Self) -> Result<Self> {
        self.0.tensor(&other.0).map(DensityOperator)
    }
}

impl TensorProduct for Projector {
    fn tensor(&self, other: &Self) -> Result<Self> {
        self.0.tensor(&other.0).map(Projector)
    }
}

pub fn tensor_product<T: TensorProduct>(a: &T, b: &T) -> Result<T> {
    a.tensor(b)
}

pub fn partial_trace(rho: &DensityOperator, keep: &[SystemId]) -> Result<DensityOperator> {
    rho.partial_trace(keep)
}

pub fn embed_operator(local: &LinearOperator, target: &SpaceLayout) -> Result<LinearOperator> {
    local.embed(target)
}

pub fn dyad(v: &StateVector) -> Projector {
    v.dyad()
}

pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    a.inner(b)
}

pub fn apply(op: &LinearOperator, v: &StateVector) -> Result<StateVector> {
    op.apply(v)
}

pub fn compose(a: &LinearOperator, b: &LinearOperator) -> Result<LinearOperator> {
    a.compose(b)
}

pub fn trace(op: &LinearOperator) -> C64 {
    op.trace()
}
