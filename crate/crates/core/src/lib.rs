//! Lie–Poisson pencil on the dual of `E_a(1,3)`, the integrable spin-orbit
//! Hamiltonian built from its second Casimirs, its flow in several charts,
//! the closed-form quadrature of that flow, and the twistor realizations of
//! massless and massive particles.
//!
//! Everything is generic over the scalar type ([`Real`]: `f32` or `f64`);
//! the `f64` aliases at the crate root cover the common case.

pub mod dynamics;
pub mod error;
pub mod liepencil;
pub mod quadrature;
pub mod scalar;
pub mod twistor;
pub mod vec3;

pub use error::{Error, Result};
pub use scalar::Real;
pub use vec3::Vec3;

pub type Vector3 = Vec3<f64>;
pub type Params = liepencil::PencilParams<f64>;
pub type State = liepencil::PoincareState<f64>;
pub type Spin = liepencil::SpinVector<f64>;
pub type Group = liepencil::GroupElement<f64>;
pub type Trajectory = dynamics::Trajectory<f64>;
pub type Twistor = twistor::TwistorPoint<f64>;
pub type Flag = twistor::FlagPoint<f64>;
