//! Labeled tensor-factor structure of a composite Hilbert space.
//!
//! Indices are row-major over the factors: the first factor is the most
//! significant digit, matching the usual Kronecker product convention.

use std::borrow::Cow;
use std::fmt;

use crate::error::{Error, Result};

/// Label of one subsystem, e.g. `P1` or `M2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SystemId(Cow<'static, str>);

impl SystemId {
    pub fn new(label: impl Into<String>) -> Self {
        SystemId(Cow::Owned(label.into()))
    }

    pub const fn from_static(label: &'static str) -> Self {
        SystemId(Cow::Borrowed(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for SystemId {
    fn from(label: &str) -> Self {
        SystemId::new(label)
    }
}

impl From<String> for SystemId {
    fn from(label: String) -> Self {
        SystemId(Cow::Owned(label))
    }
}

impl From<&SystemId> for SystemId {
    fn from(id: &SystemId) -> Self {
        id.clone()
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub id: SystemId,
    pub dim: usize,
}

/// Ordered list of labeled factors. The order is fixed at construction and
/// defines the canonical index layout of every vector and operator on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceLayout {
    factors: Vec<Factor>,
}

impl SpaceLayout {
    pub fn new<I, S>(factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<SystemId>,
    {
        let factors: Vec<Factor> = factors.into_iter().map(|(id, dim)| Factor { id: id.into(), dim }).collect();
        if factors.is_empty() {
            return Err(Error::InvalidLayout("layout has no factors".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return Err(Error::InvalidLayout(format!("factor `{}` has dimension 0", f.id)));
            }
            if factors[..i].iter().any(|g| g.id == f.id) {
                return Err(Error::InvalidLayout(format!("duplicate system `{}`", f.id)));
            }
        }
        Ok(SpaceLayout { factors })
    }

    pub fn single(id: impl Into<SystemId>, dim: usize) -> Result<Self> {
        SpaceLayout::new([(id.into(), dim)])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn ids(&self) -> impl Iterator<Item = &SystemId> {
        self.factors.iter().map(|f| &f.id)
    }

    /// Total dimension (product of factor dimensions).
    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn position(&self, id: &SystemId) -> Option<usize> {
        self.factors.iter().position(|f| &f.id == id)
    }

    pub fn contains(&self, id: &SystemId) -> bool {
        self.position(id).is_some()
    }

    pub fn factor_dim(&self, id: &SystemId) -> Option<usize> {
        self.position(id).map(|p| self.factors[p].dim)
    }

    /// First system shared with `other`, if any.
    pub fn shared_system(&self, other: &SpaceLayout) -> Option<&SystemId> {
        self.ids().find(|id| other.contains(id))
    }

    pub fn is_disjoint(&self, other: &SpaceLayout) -> bool {
        self.shared_system(other).is_none()
    }

    /// Layout of `self ⊗ other`.
    pub fn concat(&self, other: &SpaceLayout) -> Result<SpaceLayout> {
        if let Some(id) = self.shared_system(other) {
            return Err(Error::LayoutConflict(format!("system `{id}` present in both operands")));
        }
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Ok(SpaceLayout { factors })
    }

    /// Sub-layout holding exactly `keep`, in this layout's order, together
    /// with the positions of the kept factors.
    pub fn restrict(&self, keep: &[SystemId]) -> Result<(SpaceLayout, Vec<usize>)> {
        if keep.is_empty() {
            return Err(Error::InvalidLayout("empty system selection".into()));
        }
        for id in keep {
            if !self.contains(id) {
                return Err(Error::UnknownSystem(id.clone()));
            }
        }
        let positions: Vec<usize> = (0..self.factors.len()).filter(|&p| keep.contains(&self.factors[p].id)).collect();
        let factors = positions.iter().map(|&p| self.factors[p].clone()).collect();
        Ok((SpaceLayout { factors }, positions))
    }

    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for p in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[p] = strides[p + 1] * self.factors[p + 1].dim;
        }
        strides
    }

    /// Full-space index offset of every multi-index over the factors at
    /// `positions`, enumerated row-major in the order given.
    pub(crate) fn offsets(&self, positions: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0];
        for &p in positions {
            let (dim, stride) = (self.factors[p].dim, strides[p]);
            offsets = offsets.iter().flat_map(|&o| (0..dim).map(move |d| o + d * stride)).collect();
        }
        offsets
    }

    /// Positions not listed in `positions`, ascending.
    pub(crate) fn complement(&self, positions: &[usize]) -> Vec<usize> {
        (0..self.factors.len()).filter(|p| !positions.contains(p)).collect()
    }
}

impl fmt::Display for SpaceLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| format!("{}:{}", x.id, x.dim)).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}
