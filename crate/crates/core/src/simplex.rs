//! Barycentric coordinates on the commute-time simplex and its two special
//! points: the circumcenter and the Lemoine point.
//!
//! Every point of the embedding space is identified by a unit-sum weight
//! vector over states. Distances between points are computed intrinsically
//! from the commute-time matrix, so nothing here needs the Gram factor
//! except [`coords_to_point`].

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::chain::{CommuteTimeMatrix, StationaryDistribution};
use crate::error::{ensure_within, Error, Result};
use crate::tolerance::{TOL_CROSS, TOL_SOLVE};

/// Unit-sum weights `p̂` with `p = Σ_x p̂(x) v_x`. Entries may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricVector {
    coords: DVector<f64>,
}

impl BarycentricVector {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        let sum = coords.sum();
        if !sum.is_finite() || (sum - 1.0).abs() >= TOL_SOLVE {
            return Err(Error::NotUnitSum(sum));
        }
        Ok(BarycentricVector { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    /// Coordinates of vertex `x`, i.e. `δ_x`.
    pub fn vertex(n: usize, x: usize) -> Result<Self> {
        if x >= n {
            return Err(Error::UnknownState(x.to_string()));
        }
        let mut coords = DVector::zeros(n);
        coords[x] = 1.0;
        Ok(BarycentricVector { coords })
    }

    pub fn centroid(n: usize) -> Self {
        BarycentricVector {
            coords: DVector::from_element(n, 1.0 / n as f64),
        }
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Whether the point lies in the closed simplex.
    pub fn is_inside(&self) -> bool {
        self.coords.iter().all(|&c| c >= 0.0)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coords.iter().copied().collect()
    }
}

impl From<&StationaryDistribution> for BarycentricVector {
    fn from(pi: &StationaryDistribution) -> Self {
        BarycentricVector {
            coords: pi.as_vector().clone(),
        }
    }
}

impl std::ops::Index<usize> for BarycentricVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

/// `V·p̂`, the embedded point.
pub fn coords_to_point(v: &DMatrix<f64>, p_hat: &BarycentricVector) -> Result<DVector<f64>> {
    if v.ncols() != p_hat.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} vertices but {} coordinates",
            v.ncols(),
            p_hat.len()
        )));
    }
    Ok(v * p_hat.as_vector())
}

/// `−½ Σ_{x,y} c_xy (â−b̂)(x) (â−b̂)(y)`, the squared Euclidean distance
/// between two points given by their coordinates.
pub fn squared_distance_qf(
    c: &CommuteTimeMatrix,
    a_hat: &BarycentricVector,
    b_hat: &BarycentricVector,
) -> Result<f64> {
    let n = c.len();
    if a_hat.len() != n || b_hat.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "commute matrix has {n} states, coordinates have {} and {}",
            a_hat.len(),
            b_hat.len()
        )));
    }
    for p in [a_hat, b_hat] {
        let sum = p.as_vector().sum();
        if (sum - 1.0).abs() >= TOL_SOLVE {
            return Err(Error::NotUnitSum(sum));
        }
    }
    let d = a_hat.as_vector() - b_hat.as_vector();
    let q = -0.5 * d.dot(&(c.matrix() * &d));
    Ok(q.max(0.0))
}

/// `|p̂(x)| / √π(x)`, the distance from the point to the facet opposite `x`.
pub fn facet_distance(p_hat: &BarycentricVector, pi: &StationaryDistribution, x: usize) -> Result<f64> {
    if x >= p_hat.len() || x >= pi.len() {
        return Err(Error::UnknownState(x.to_string()));
    }
    if p_hat.len() != pi.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} coordinates for {} states",
            p_hat.len(),
            pi.len()
        )));
    }
    Ok(p_hat[x].abs() / pi[x].sqrt())
}

/// `Σ_x p̂(x)² / π(x)`.
pub fn total_squared_facet_distance(p_hat: &BarycentricVector, pi: &StationaryDistribution) -> Result<f64> {
    (0..pi.len())
        .map(|x| facet_distance(p_hat, pi, x).map(|d| d * d))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircumcenterResult {
    pub gamma_hat: BarycentricVector,
    pub r_squared: f64,
    /// `max_x |(Cγ̂)_x − 2R²|`.
    pub residual: f64,
}

impl CircumcenterResult {
    pub fn radius(&self) -> f64 {
        self.r_squared.sqrt()
    }

    pub fn is_inside(&self) -> bool {
        self.gamma_hat.is_inside()
    }
}

/// Solves `[C  −2·1; 1ᵀ  0]·[γ̂; R²] = [0; 1]`.
///
/// The residual is checked relative to the largest commute time, since an
/// LU solve's backward error scales with the matrix entries.
pub fn circumcenter(c: &CommuteTimeMatrix) -> Result<CircumcenterResult> {
    let n = c.len();
    let cm = c.matrix();
    let mut system = DMatrix::zeros(n + 1, n + 1);
    system.view_mut((0, 0), (n, n)).copy_from(cm);
    for x in 0..n {
        system[(x, n)] = -2.0;
        system[(n, x)] = 1.0;
    }
    let mut rhs = DVector::zeros(n + 1);
    rhs[n] = 1.0;
    let solution = system.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    if solution.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let gamma = solution.rows(0, n).into_owned();
    let r_squared = solution[n];
    if !(r_squared > 0.0) {
        return Err(Error::SingularSystem);
    }
    let residual = (cm * &gamma).add_scalar(-2.0 * r_squared).amax();
    ensure_within(
        "circumcenter residual",
        residual / cm.amax().max(1.0),
        TOL_SOLVE,
    )?;
    Ok(CircumcenterResult {
        gamma_hat: BarycentricVector::new(gamma)?,
        r_squared,
        residual,
    })
}

/// The point minimizing the total squared distance to all facets. Its
/// coordinates are the stationary distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct LemoinePoint {
    pub ell_hat: BarycentricVector,
    /// `Σ_x d(ℓ, facet_x)²`, which equals 1 at the minimum.
    pub facet_total: f64,
}

pub fn lemoine(pi: &StationaryDistribution) -> Result<LemoinePoint> {
    let ell_hat = BarycentricVector::from(pi);
    let facet_total = total_squared_facet_distance(&ell_hat, pi)?;
    ensure_within("Lemoine facet total - 1", (facet_total - 1.0).abs(), TOL_CROSS)?;
    Ok(LemoinePoint { ell_hat, facet_total })
}

/// Excess of `Σ p̂²/π` over its minimum for `p̂ = π + ε·z`, evaluated as
/// `Σ (p̂ − π)(p̂ + π)/π` so that `ε = 0` gives exactly zero.
pub fn facet_total_excess(pi: &StationaryDistribution, z: &DVector<f64>, epsilon: f64) -> f64 {
    let pi = pi.as_vector();
    pi.iter()
        .zip(z.iter())
        .map(|(&w, &dz)| {
            let p = w + epsilon * dz;
            (p - w) * (p + w) / w
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub trials: usize,
    /// Perturbations whose facet total did not exceed the Lemoine point's.
    pub violations: usize,
    pub min_excess: f64,
}

/// Samples random unit-sum perturbations of `π` and checks that each has
/// a strictly larger total squared facet distance.
///
/// Directions are Gaussian, projected onto the sum-zero hyperplane and
/// normalized; step sizes are log-uniform in `[1e-6, 1e-1]`.
pub fn minimality_probe(pi: &StationaryDistribution, trials: usize, seed: u64) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("minimality probe needs at least one trial".into()));
    }
    let n = pi.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ProbeReport {
        trials,
        violations: 0,
        min_excess: f64::INFINITY,
    };
    for _ in 0..trials {
        let z = loop {
            let mut z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let mean = z.mean();
            z.add_scalar_mut(-mean);
            let norm = z.norm();
            if norm > 1e-12 {
                break z / norm;
            }
        };
        let epsilon = 10f64.powf(rng.random_range(-6.0..=-1.0));
        let excess = facet_total_excess(pi, &z, epsilon);
        if !(excess > 0.0) {
            report.violations += 1;
        }
        report.min_excess = report.min_excess.min(excess);
    }
    Ok(report)
}
