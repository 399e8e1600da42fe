//! Exact no-ruin classification for generalized Ornstein-Uhlenbeck processes
//! `V_t = e^{ξ_t}(z + ∫₀ᵗ e^{-ξ_{s-}} dη_s)` driven by a bivariate Lévy process,
//! together with Monte Carlo tools that check every exact decision.

pub mod classification;
pub mod corpus;
pub mod error;
pub mod estimation;
pub mod extended;
pub mod interval;
pub mod levy_model;
pub mod presets;
pub mod quadrature;
pub mod region;
pub mod simulator;
pub mod tol;

pub use error::{GouError, Result};
pub use extended::ExtendedReal;
pub use interval::{ClosedInterval, Interval, IntervalSet};
pub use levy_model::{
    Atom1D, Coord, DensityFamily, DensitySpec, JumpAtom, LevyMeasure2D, LevyTriplet2D,
    MarginalTriplet, Measure1D,
};
pub use classification::{Decision, RuinReport, SubordinatorCertificate, Verdict};
pub use estimation::{EstimateWithCI, McConfig};
pub use region::ThetaBounds;
pub use simulator::{PathConfig, Simulator};
