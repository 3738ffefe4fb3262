//! Qualitative intercausal reasoning in discrete belief networks.
//!
//! Networks are loaded with [`model::parse_network`]. [`qual`] decides the
//! per-instantiation signs (influence, additive and product synergy),
//! [`synergy2`] the distribution-robust product synergy through the
//! half-definiteness tests in [`copositivity`], and [`oracle`] answers the
//! same questions numerically by exact enumeration.

pub mod bundled;
pub mod copositivity;
pub mod model;
pub mod oracle;
pub mod qual;
pub mod sign;
pub mod synergy2;

pub use copositivity::{ClassifyOptions, Definiteness, HalfDefiniteness};
pub use model::{parse_network, ModelError, Network, VarId};
pub use oracle::{Evidence, OracleError};
pub use sign::Sign;
pub use synergy2::{SynergyError, SynergyVerdict};
