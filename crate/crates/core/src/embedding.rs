//! The Laplacian of a reversible chain, its Moore–Penrose pseudoinverse and
//! the Gram factor whose columns are the vertices of the commute-time
//! simplex.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::chain::{detailed_balance_defect, CommuteTimeMatrix, MarkovChain, StationaryDistribution};
use crate::error::{ensure_within, Error, Result};
use crate::tolerance::TOL_SOLVE;

/// Symmetric Laplacian `L_xx = π(x)`, `L_xy = −π(x)P_xy`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    l: DMatrix<f64>,
}

impl LaplacianMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn len(&self) -> usize {
        self.l.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.l.is_empty()
    }

    /// `fᵀLf`.
    pub fn quadratic_form(&self, f: &DVector<f64>) -> f64 {
        f.dot(&(&self.l * f))
    }
}

pub fn laplacian(chain: &MarkovChain, pi: &StationaryDistribution) -> Result<LaplacianMatrix> {
    let n = chain.len();
    if pi.len() != n {
        return Err(Error::InconsistentInputs(format!(
            "chain has {n} states, pi has {}",
            pi.len()
        )));
    }
    let (deviation, x, y) = detailed_balance_defect(chain, pi);
    if deviation >= TOL_SOLVE {
        return Err(Error::NotReversible { x, y, deviation });
    }
    let p = chain.transition_matrix();
    let flow = DMatrix::from_fn(n, n, |x, y| pi[x] * p[(x, y)]);
    let mut l = -(&flow + flow.transpose()) * 0.5;
    for x in 0..n {
        l[(x, x)] = 0.0;
        let off: f64 = l.row(x).iter().sum();
        l[(x, x)] = -off;
    }
    Ok(LaplacianMatrix { l })
}

/// Eigenvalues at or below this are treated as zero.
pub fn rank_cutoff(n: usize, lambda_max: f64) -> f64 {
    n as f64 * f64::EPSILON * lambda_max
}

/// Eigenpairs sorted by descending eigenvalue, eigenvectors sign-fixed so
/// their first entry of non-negligible magnitude is positive.
fn sorted_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        let scale = v.amax();
        if let Some(&first) = v.iter().find(|e| e.abs() > 1e-8 * scale) {
            if first < 0.0 {
                v.neg_mut();
            }
        }
        vectors.set_column(k, &v);
    }
    (values, vectors)
}

/// Splits a PSD spectrum into its positive part, requiring exactly one
/// eigenvalue at zero.
fn positive_spectrum(values: &[f64]) -> Result<usize> {
    let n = values.len();
    let lambda_max = values.first().copied().unwrap_or(0.0);
    let cutoff = rank_cutoff(n, lambda_max);
    if let Some(&lowest) = values.last() {
        if lowest < -cutoff.max(TOL_SOLVE * lambda_max) {
            return Err(Error::NotPositiveSemidefinite(lowest));
        }
    }
    let zeros = values.iter().filter(|&&v| v <= cutoff).count();
    if zeros != 1 {
        return Err(Error::RankDeficient {
            zero_eigenvalues: zeros,
            cutoff,
        });
    }
    Ok(n - 1)
}

/// Moore–Penrose pseudoinverse of `L` from its eigendecomposition.
pub fn pseudoinverse(l: &LaplacianMatrix) -> Result<DMatrix<f64>> {
    let n = l.len();
    let (values, vectors) = sorted_eigen(&l.l);
    let rank = positive_spectrum(&values)?;
    let mut pinv = DMatrix::zeros(n, n);
    for k in 0..rank {
        let u = vectors.column(k);
        pinv.ger(1.0 / values[k], &u, &u, 1.0);
    }
    Ok(center(&((&pinv + pinv.transpose()) * 0.5)))
}

/// Double-centers a symmetric matrix so that it annihilates the all-ones
/// vector.
fn center(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let row_means = DVector::from_fn(n, |i, _| m.row(i).mean());
    let grand = row_means.mean();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)] - (row_means[i] + row_means[j]) + grand)
}

/// Largest deviation across the four Moore–Penrose identities.
pub fn moore_penrose_defect(a: &DMatrix<f64>, a_pinv: &DMatrix<f64>) -> f64 {
    let apa = a * a_pinv * a;
    let pap = a_pinv * a * a_pinv;
    let ap = a * a_pinv;
    let pa = a_pinv * a;
    [
        (&apa - a).amax(),
        (&pap - a_pinv).amax(),
        (&ap - ap.transpose()).amax(),
        (&pa - pa.transpose()).amax(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Spectrum of `L†` kept alongside the Gram factor.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenData {
    /// Eigenvalues of `L†`, descending, with the kernel eigenvalue clamped to 0.
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
}

/// `V = Λ^{1/2} Uᵀ` over the `n − 1` positive eigenpairs of `L†`, so that
/// `VᵀV = L†` and `V·1 = 0`. Returns the factor and the spectrum used.
pub fn gram_factor_with_spectrum(l_dagger: &DMatrix<f64>) -> Result<(DMatrix<f64>, EigenData)> {
    let n = l_dagger.nrows();
    if l_dagger.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "pseudoinverse is {}x{}",
            n,
            l_dagger.ncols()
        )));
    }
    let (mut values, vectors) = sorted_eigen(l_dagger);
    let rank = positive_spectrum(&values)?;
    let mut v = DMatrix::zeros(rank, n);
    for k in 0..rank {
        let s = values[k].sqrt();
        for x in 0..n {
            v[(k, x)] = s * vectors[(x, k)];
        }
    }
    values[rank] = 0.0;
    Ok((v, EigenData { eigenvalues: values, rank }))
}

pub fn gram_factor(l_dagger: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    gram_factor_with_spectrum(l_dagger).map(|(v, _)| v)
}

/// Whether the columns of `v` span an `(n−1)`-simplex, judged by the
/// smallest singular value of the edge matrix `[v_2 − v_1, …, v_n − v_1]`.
pub fn affinely_independent(v: &DMatrix<f64>) -> bool {
    let n = v.ncols();
    if n < 2 {
        return n == 1;
    }
    let edges = DMatrix::from_fn(v.nrows(), n - 1, |i, j| v[(i, j + 1)] - v[(i, 0)]);
    let sv = edges.singular_values();
    let max = sv.max();
    let min = sv.min();
    edges.nrows() >= n - 1 && max > 0.0 && min > rank_cutoff(n, max)
}

/// `c_xy = L†_xx + L†_yy − 2 L†_xy`.
pub fn commute_via_pinv(l_dagger: &DMatrix<f64>) -> CommuteTimeMatrix {
    let n = l_dagger.nrows();
    let mut c = DMatrix::from_fn(n, n, |x, y| {
        l_dagger[(x, x)] + l_dagger[(y, y)] - l_dagger[(x, y)] - l_dagger[(y, x)]
    });
    for x in 0..n {
        c[(x, x)] = 0.0;
        for y in (x + 1)..n {
            let s = 0.5 * (c[(x, y)] + c[(y, x)]);
            c[(x, y)] = s;
            c[(y, x)] = s;
        }
    }
    CommuteTimeMatrix::new(c).expect("symmetric with zero diagonal by construction")
}

/// Pairwise squared distances between the columns of `v`.
pub fn squared_vertex_distances(v: &DMatrix<f64>) -> DMatrix<f64> {
    let n = v.ncols();
    DMatrix::from_fn(n, n, |x, y| (v.column(x) - v.column(y)).norm_squared())
}

/// Everything the simplex embedding of one chain consists of.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBundle {
    pub laplacian: LaplacianMatrix,
    pub l_dagger: DMatrix<f64>,
    /// `(n−1)×n`; column `x` is the vertex of state `x`.
    pub v: DMatrix<f64>,
    pub eigen: EigenData,
}

impl EmbeddingBundle {
    /// Builds `L`, `L†` and `V`, checking the Moore–Penrose identities, the
    /// factorization `VᵀV = L†`, `V·1 = 0` and affine independence.
    pub fn build(chain: &MarkovChain, pi: &StationaryDistribution) -> Result<Self> {
        let laplacian = laplacian(chain, pi)?;
        let l_dagger = pseudoinverse(&laplacian)?;
        let scale = l_dagger.amax().max(1.0);
        ensure_within(
            "Moore-Penrose identity defect",
            moore_penrose_defect(laplacian.matrix(), &l_dagger) / scale,
            TOL_SOLVE,
        )?;
        let (v, eigen) = gram_factor_with_spectrum(&l_dagger)?;
        ensure_within(
            "Gram factorization defect",
            (v.tr_mul(&v) - &l_dagger).amax() / scale,
            TOL_SOLVE,
        )?;
        let n = chain.len();
        let centroid = &v * DVector::from_element(n, 1.0);
        ensure_within("vertex centroid offset", centroid.amax() / scale.sqrt(), TOL_SOLVE)?;
        if !affinely_independent(&v) {
            return Err(Error::AffinelyDependent);
        }
        Ok(EmbeddingBundle {
            laplacian,
            l_dagger,
            v,
            eigen,
        })
    }

    pub fn vertex(&self, x: usize) -> DVector<f64> {
        self.v.column(x).into_owned()
    }

    pub fn commute_times(&self) -> CommuteTimeMatrix {
        commute_via_pinv(&self.l_dagger)
    }
}
