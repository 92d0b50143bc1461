//! Simulation of continuous-variable teleportation from an optical mode to a
//! magnon mode, with entanglement shared through optomagnonic squeezing and
//! optionally distilled by magnon and photon subtraction.
//!
//! Mode 0 of every two-mode state is the magnon, mode 1 the optical mode.

// `!(x <= tol)` is written on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entanglement;
pub mod fock;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod states;
pub mod teleport;
pub mod wigner;

pub use fock::{DensityOperator, FockError, TruncatedState};
pub use params::{derive_params, DerivedParams, PhysicalParams};
pub use quadrature::QuadratureSettings;
pub use states::InputStateSpec;
pub use teleport::{Channel, CharacteristicFunction, Resource, TeleportResult};
pub use wigner::{GridSpec, PhaseSpaceGrid};
