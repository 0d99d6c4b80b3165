//! Kemeny's constant by four independent routes, and the pipeline that
//! computes and cross-checks all of them for one chain.
//!
//! | route      | formula                                  |
//! |------------|------------------------------------------|
//! | per-state  | `K_x = Σ_y π(y) h_xy` for every `x`      |
//! | commute    | `½ Σ_{x,y} π(x) π(y) c_xy`               |
//! | geometric  | `R² − ‖γ − ℓ‖²` on the commute simplex   |
//! | spectral   | `Σ_{i≥2} 1 / (1 − λ_i)` over P's spectrum |

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::chain::{
    assess, commute_times, hitting_times, Admissibility, CommuteTimeMatrix, HittingTimeMatrix,
    MarkovChain, StationaryDistribution,
};
use crate::embedding::{squared_vertex_distances, EmbeddingBundle};
use crate::error::{ensure_within, Error, Result};
use crate::simplex::{circumcenter, lemoine, squared_distance_qf, CircumcenterResult, LemoinePoint};
use crate::tolerance::{Tolerances, TOL_SOLVE};

pub fn kemeny_per_state(h: &HittingTimeMatrix, pi: &StationaryDistribution) -> Result<DVector<f64>> {
    if h.len() != pi.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} hitting-time rows, {} stationary weights",
            h.len(),
            pi.len()
        )));
    }
    Ok(h.matrix() * pi.as_vector())
}

pub fn kemeny_commute(c: &CommuteTimeMatrix, pi: &StationaryDistribution) -> Result<f64> {
    if c.len() != pi.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} commute-time rows, {} stationary weights",
            c.len(),
            pi.len()
        )));
    }
    let pi = pi.as_vector();
    Ok(0.5 * pi.dot(&(c.matrix() * pi)))
}

/// `R² − ‖γ − ℓ‖²`, the squared distance taken from the commute-time
/// quadratic form.
pub fn kemeny_geometric(
    circ: &CircumcenterResult,
    ell: &LemoinePoint,
    c: &CommuteTimeMatrix,
) -> Result<f64> {
    if circ.gamma_hat.len() != c.len() || ell.ell_hat.len() != c.len() {
        return Err(Error::InconsistentInputs(format!(
            "circumcenter has {} coordinates, Lemoine point {}, commute matrix {}",
            circ.gamma_hat.len(),
            ell.ell_hat.len(),
            c.len()
        )));
    }
    let d2 = squared_distance_qf(c, &circ.gamma_hat, &ell.ell_hat)?;
    Ok(circ.r_squared - d2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    /// Eigenvalues of P, descending; the first is 1.
    pub eigenvalues: Vec<f64>,
    pub kemeny: f64,
}

/// Kemeny's constant from the spectrum of `D^{1/2} P D^{-1/2}`, which is
/// symmetric for reversible chains and similar to P.
pub fn kemeny_spectral(chain: &MarkovChain, pi: &StationaryDistribution) -> Result<SpectralResult> {
    let n = chain.len();
    if pi.len() != n {
        return Err(Error::InconsistentInputs(format!(
            "chain has {n} states, pi has {}",
            pi.len()
        )));
    }
    let p = chain.transition_matrix();
    let sqrt_pi: Vec<f64> = pi.as_vector().iter().map(|v| v.sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |x, y| sqrt_pi[x] * p[(x, y)] / sqrt_pi[y]);
    let asymmetry = (&s - s.transpose()).amax();
    if asymmetry >= TOL_SOLVE {
        return Err(Error::SpectralFailure(format!(
            "similarity transform is not symmetric (defect {asymmetry:e})"
        )));
    }
    let s = (&s + s.transpose()) * 0.5;
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    if (eigenvalues[0] - 1.0).abs() >= TOL_SOLVE {
        return Err(Error::SpectralFailure(format!(
            "leading eigenvalue is {}, not 1",
            eigenvalues[0]
        )));
    }
    let gap = 1.0 - eigenvalues[1];
    if gap <= TOL_SOLVE {
        return Err(Error::SpectralFailure(format!(
            "eigenvalue 1 is not simple (second eigenvalue {})",
            eigenvalues[1]
        )));
    }
    let kemeny = eigenvalues[1..].iter().map(|l| 1.0 / (1.0 - l)).sum();
    Ok(SpectralResult { eigenvalues, kemeny })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KemenyReport {
    pub per_state: Vec<f64>,
    pub commute: f64,
    pub geometric: f64,
    pub spectral: f64,
    /// `max_x K_x − min_x K_x`.
    pub spread: f64,
    /// Largest pairwise deviation across every route value.
    pub agreement: f64,
}

impl KemenyReport {
    pub fn new(per_state: Vec<f64>, commute: f64, geometric: f64, spectral: f64) -> Self {
        let (lo, hi) = min_max(per_state.iter().copied());
        let spread = hi - lo;
        let (lo, hi) = min_max(per_state.iter().copied().chain([commute, geometric, spectral]));
        KemenyReport {
            per_state,
            commute,
            geometric,
            spectral,
            spread,
            agreement: hi - lo,
        }
    }

    /// Every route value, per-state entries first.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.per_state
            .iter()
            .copied()
            .chain([self.commute, self.geometric, self.spectral])
    }
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub gamma_hat: Vec<f64>,
    pub r_squared: f64,
    pub r: f64,
    pub ell_hat: Vec<f64>,
    pub center_distance_squared: f64,
    pub center_distance: f64,
    pub circumcenter_inside: bool,
    pub circumcenter_residual: f64,
    pub lemoine_facet_total: f64,
}

/// Deviations between quantities that must agree, kept so that a report
/// can show what was checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Hitting-time first-step recursion residual.
    pub recursion_residual: f64,
    /// `max |C_hitting − C_pinv|`.
    pub commute_route_deviation: f64,
    /// `max |‖v_x − v_y‖² − c_xy|`.
    pub embedding_deviation: f64,
    /// `|K_geometric − K_commute|`.
    pub geometric_deviation: f64,
    /// `|K_spectral − K_commute|`.
    pub spectral_deviation: f64,
    /// `R² − K_commute`, which must be nonnegative.
    pub radius_margin: f64,
}

/// Full analysis of one admissible chain.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub chain: MarkovChain,
    pub admissibility: Admissibility,
    pub pi: StationaryDistribution,
    pub embedding: EmbeddingBundle,
    pub hitting: HittingTimeMatrix,
    pub commute: CommuteTimeMatrix,
    pub commute_pinv: CommuteTimeMatrix,
    pub circumcenter: CircumcenterResult,
    pub lemoine: LemoinePoint,
    pub spectral: SpectralResult,
    pub kemeny: KemenyReport,
    pub geometry: GeometryReport,
    pub diagnostics: Diagnostics,
    pub tolerances: Tolerances,
}

/// Runs the pipeline with the default tolerances.
pub fn full_report(chain: &MarkovChain) -> Result<Analysis> {
    analyze(chain, &Tolerances::default())
}

/// Admissibility, π, embedding, hitting and commute times, the special
/// points and all four Kemeny routes. Fails with `Inadmissible` naming the
/// first failed condition, or `ToleranceViolation` if any cross-check
/// exceeds `tol.cross`.
pub fn analyze(chain: &MarkovChain, tol: &Tolerances) -> Result<Analysis> {
    let (admissibility, pi) = assess(chain);
    if let Some(cond) = admissibility.first_failure() {
        return Err(Error::Inadmissible(cond));
    }
    let pi = pi.expect("admissible chains have a stationary distribution");

    let embedding = EmbeddingBundle::build(chain, &pi)?;
    let hitting = hitting_times(chain, &pi, &embedding.l_dagger)?;
    let commute = commute_times(&hitting);
    let commute_pinv = embedding.commute_times();
    let circ = circumcenter(&commute)?;
    let ell = lemoine(&pi)?;
    let spectral = kemeny_spectral(chain, &pi)?;

    let per_state = kemeny_per_state(&hitting, &pi)?;
    let k_commute = kemeny_commute(&commute, &pi)?;
    let k_geometric = kemeny_geometric(&circ, &ell, &commute)?;
    let kemeny = KemenyReport::new(per_state.iter().copied().collect(), k_commute, k_geometric, spectral.kemeny);

    let center_distance_squared = squared_distance_qf(&commute, &circ.gamma_hat, &ell.ell_hat)?;
    let geometry = GeometryReport {
        gamma_hat: circ.gamma_hat.to_vec(),
        r_squared: circ.r_squared,
        r: circ.radius(),
        ell_hat: ell.ell_hat.to_vec(),
        center_distance_squared,
        center_distance: center_distance_squared.sqrt(),
        circumcenter_inside: circ.is_inside(),
        circumcenter_residual: circ.residual,
        lemoine_facet_total: ell.facet_total,
    };

    let diagnostics = Diagnostics {
        recursion_residual: hitting.residual(),
        commute_route_deviation: (commute.matrix() - commute_pinv.matrix()).amax(),
        embedding_deviation: (squared_vertex_distances(&embedding.v) - commute.matrix()).amax(),
        geometric_deviation: (k_geometric - k_commute).abs(),
        spectral_deviation: (spectral.kemeny - k_commute).abs(),
        radius_margin: circ.r_squared - k_commute,
    };

    ensure_within("Kemeny per-state spread", kemeny.spread, tol.cross)?;
    ensure_within("Kemeny route agreement", kemeny.agreement, tol.cross)?;
    ensure_within("commute route deviation", diagnostics.commute_route_deviation, tol.cross)?;
    ensure_within("embedding edge deviation", diagnostics.embedding_deviation, tol.cross)?;
    ensure_within("Lemoine facet total - 1", (ell.facet_total - 1.0).abs(), tol.cross)?;
    if let Some(bad) = kemeny.values().find(|&k| !(k > 0.0)) {
        return Err(Error::ToleranceViolation {
            check: "Kemeny positivity",
            value: bad,
            tolerance: 0.0,
        });
    }
    if diagnostics.radius_margin < -tol.cross {
        return Err(Error::ToleranceViolation {
            check: "R^2 - K",
            value: diagnostics.radius_margin,
            tolerance: -tol.cross,
        });
    }

    Ok(Analysis {
        chain: chain.clone(),
        admissibility,
        pi,
        embedding,
        hitting,
        commute,
        commute_pinv,
        circumcenter: circ,
        lemoine: ell,
        spectral,
        kemeny,
        geometry,
        diagnostics,
        tolerances: *tol,
    })
}
