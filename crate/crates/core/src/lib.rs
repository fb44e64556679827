//! Coupled harmonic layer chains: decoupling of string and intra-layer
//! motion, normal modes, contact and inverse-square intra-layer levels, and
//! total energies.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod error;
pub mod intralayer;
pub mod linalg;
pub mod model;
pub mod modes;
pub mod oracle;
pub mod quadrature;
pub mod roots;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SystemSpecF64 = model::SystemSpec<f64>;
pub type SystemSpecF32 = model::SystemSpec<f32>;
pub type LayerSpecF64 = model::LayerSpec<f64>;
pub type PairCouplingF64 = model::PairCoupling<f64>;
pub type IntraPotentialF64 = model::IntraPotential<f64>;
pub type ShiftModelF64 = model::ShiftModel<f64>;
pub type NormalModeSetF64 = modes::NormalModeSet<f64>;
pub type LevelListF64 = modes::LevelList<f64>;
pub type IntraLevelF64 = intralayer::IntraLevel<f64>;
pub type EnergyBudgetF64 = assembly::EnergyBudget<f64>;
pub type EnergyBudgetF32 = assembly::EnergyBudget<f32>;
pub type ChainTemplateF64 = assembly::ChainTemplate<f64>;
pub type SweepRowF64 = assembly::SweepRow<f64>;
