//! Kemeny's constant of finite reversible Markov chains, computed through
//! the simplex whose squared edge lengths are the chain's commute times.
//!
//! The pipeline validates a chain, finds its stationary distribution,
//! builds the Laplacian `L`, its pseudoinverse `L†` and a Gram factor `V`
//! with `VᵀV = L†`. The columns of `V` are the vertices of a simplex; its
//! circumradius `R` and the distance between the circumcenter `γ` and the
//! Lemoine point `ℓ` give Kemeny's constant as `K = R² − ‖γ − ℓ‖²`. That
//! value is cross-checked against the per-state hitting-time sums, the
//! commute-time double sum, the spectrum of `P` and, optionally, a seeded
//! Monte Carlo estimate.
//!
//! ```
//! use kemeny_core::{full_report, MarkovChain};
//!
//! let chain = MarkovChain::from_rows(
//!     vec!["1", "2", "3"],
//!     &[
//!         vec![0.0, 1.0 / 2.0, 1.0 / 2.0],
//!         vec![2.0 / 3.0, 0.0, 1.0 / 3.0],
//!         vec![2.0 / 3.0, 1.0 / 3.0, 0.0],
//!     ],
//! )?;
//! let analysis = full_report(&chain)?;
//! assert!((analysis.kemeny.geometric - 1.35).abs() < 1e-9);
//! # Ok::<(), kemeny_core::Error>(())
//! ```

pub mod chain;
pub mod cli;
pub mod document;
pub mod embedding;
pub mod error;
pub mod generate;
pub mod kemeny;
pub mod mc;
pub mod simplex;
pub mod tolerance;

pub use chain::{
    assess, check_admissible, commute_times, hitting_times, stationary_distribution, Admissibility,
    CommuteTimeMatrix, HittingTimeMatrix, MarkovChain, StationaryDistribution,
};
pub use embedding::{commute_via_pinv, gram_factor, laplacian, pseudoinverse, EmbeddingBundle, LaplacianMatrix};
pub use error::{Condition, Error, Result};
pub use kemeny::{
    analyze, full_report, kemeny_commute, kemeny_geometric, kemeny_per_state, kemeny_spectral, Analysis,
    GeometryReport, KemenyReport,
};
pub use mc::{estimate_kemeny, sample_hitting_time, McEstimate};
pub use simplex::{
    circumcenter, coords_to_point, facet_distance, lemoine, minimality_probe, squared_distance_qf,
    BarycentricVector, CircumcenterResult, LemoinePoint, ProbeReport,
};
pub use tolerance::{Tolerances, STEP_CAP, TOL_CROSS, TOL_SOLVE, TOL_STOCH};
