//! Finite groups, set arithmetic and VC-dimension tools for additive
//! combinatorics experiments.

pub mod error;
pub mod fourier;
pub mod group;
pub mod rational;
pub mod registry;
pub mod setcalc;
pub mod vc;
pub mod bohr;
pub mod periods;
pub mod linalg;
pub mod freiman;
pub mod stability;
pub mod regularity;
pub mod descriptor;

pub use error::{Error, Result};
pub use group::{Element, Group, GroupSpec};
pub use rational::Rational;
pub use setcalc::{CountFn, GSet};
