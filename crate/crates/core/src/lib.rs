// SPDX-License-Identifier: Apache-2.0

//! Energy-reliability analysis for boolean formulas built from noisy gates.
//!
//! * [`efmodel`]: energy-failure functions and their inverses.
//! * [`circuit`]: tree-structured circuits, parsing and generators.
//! * [`bounds`]: lower bounds on total energy at a uniform operating point.
//! * [`alloc`]: optimal non-uniform energy allocation and its certificate.
//! * [`evaluate`]: exact error probabilities, entropies and information audits.
//! * [`sweep`]: budget sweeps comparing optimized and uniform allocations.

pub mod alloc;
pub mod bounds;
pub mod circuit;
pub mod efmodel;
pub mod evaluate;
pub mod info;
pub mod sweep;

pub use alloc::{Allocation, KktReport};
pub use bounds::{make_target, BoundReport, ReliabilityTarget};
pub use circuit::{GateKind, GateTree};
pub use efmodel::{EnergyFailureModel, Family};
pub use evaluate::EvalReport;
