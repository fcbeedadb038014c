//! Evolved quantum feature maps for fidelity-kernel classification.
//!
//! The crate is organised bottom-up:
//!
//! * [`sim`]: dense statevector simulation of Hadamard + Pauli-word rotation circuits.
//! * [`qkernel`]: fidelity kernels, Gram matrices and the shot-sampled inversion test.
//! * [`fitness`]: kernel-target alignment and the normalized dominant-eigenvalue score.
//! * [`evolution`]: the generational search over feature maps with local α refinement.
//! * [`svm`]: SMO-trained soft-margin SVM on precomputed kernels, plus AUC.
//! * [`datapipe`]: CSV ingestion, mutual-information ranking, Fisher/PCA reduction,
//!   stratified splitting and synthetic dataset generators.

pub mod datapipe;
pub mod error;
pub mod evolution;
pub mod fitness;
pub mod qkernel;
pub mod rng;
pub mod sim;
pub mod svm;

pub use error::{Result, SqsError};
pub use fitness::LabelVector;
pub use qkernel::GramMatrix;
pub use sim::{FeatureMap, Gene, Pauli, PauliWord, StateVector, MAX_QUBITS};
