//! Achievable (semantic rate, bit rate) regions for the uplink coexistence of
//! semantic text users and one bit user.
//!
//! The library models sentence similarity as a generalized logistic function of
//! received SNR in dB, derives the induced SINR floors, and computes rate-region
//! boundary points for three multiple-access schemes:
//!
//! - [`fdma`]: closed-form bandwidth minimization (bisection per user),
//! - [`noma`]: successive convex approximation over the bit user's decoding
//!   position,
//! - [`rsma`]: successive convex approximation with the bit user split into
//!   `N_s + 1` streams interleaved with the semantic streams.
//!
//! [`region`] sweeps target semantic rates to trace boundaries, builds the
//! time-sharing envelope, and runs the comparative experiments. All solver
//! entry points are deterministic: identical inputs produce identical outputs,
//! independent of thread count.

pub mod fdma;
pub mod noma;
pub mod region;
pub mod rsma;
pub mod sca;
pub mod scenario;
pub mod semantic;
pub mod subsolver;
pub mod units;

pub use scenario::{PathLossModel, Scenario};
pub use semantic::{LogisticParams, SemanticConfig};
