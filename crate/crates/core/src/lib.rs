//! Quantum reference-system states on finite-dimensional composite Hilbert
//! spaces, and Hardy's two-particle experiment described with them.
//!
//! - [`layout`], [`tensor`], [`eigen`]: dense complex linear algebra over
//!   labeled tensor factors (Kronecker products, partial traces, operator
//!   embedding, Hermitian eigensystems).
//! - [`postulates`]: reduced states relative to a reference system,
//!   internal-state candidates, and the joint-probability trace formula.
//! - [`hardy`]: the initial state, measurement dynamics, branch states,
//!   device marginals and outcome correlations of the Hardy setup.
//! - [`paradox`]: the trace formula evaluated on overlapping systems, which
//!   yields negative or super-additive "probabilities".

pub mod distribution;
pub mod eigen;
pub mod error;
pub mod hardy;
pub mod layout;
pub mod paradox;
pub mod postulates;
pub mod tensor;

pub use distribution::OutcomeDistribution;
pub use eigen::{hermitian_eigensystem, EigenPair, Eigensystem};
pub use error::{Error, Result};
pub use hardy::{build_model, HardyModel, HiddenBranch, Particle, Pointer, Setting, Settings};
pub use layout::{SpaceLayout, SystemId};
pub use tensor::{
    apply, compose, dyad, embed_operator, inner_product, partial_trace, tensor_product, trace, DensityOperator,
    LinearOperator, Projector, StateVector, TensorProduct, C64,
};
