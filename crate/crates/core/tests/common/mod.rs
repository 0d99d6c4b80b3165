#![allow(dead_code)]

use kemeny_core::generate::suite_chain;
use kemeny_core::MarkovChain;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SUITE_SEED: u64 = 0x4b454d454e59;
pub const SUITE_SIZE: u64 = 200;

/// Three-state walk with edge weights w12 = w13 = 0.2, w23 = 0.1.
pub fn chain_a() -> MarkovChain {
    MarkovChain::from_rows(
        vec!["1", "2", "3"],
        &[
            vec![0.0, 1.0 / 2.0, 1.0 / 2.0],
            vec![2.0 / 3.0, 0.0, 1.0 / 3.0],
            vec![2.0 / 3.0, 1.0 / 3.0, 0.0],
        ],
    )
    .unwrap()
}

/// Symmetric walk on the triangle.
pub fn chain_b() -> MarkovChain {
    MarkovChain::from_rows(
        vec!["1", "2", "3"],
        &[vec![0.0, 0.5, 0.5], vec![0.5, 0.0, 0.5], vec![0.5, 0.5, 0.0]],
    )
    .unwrap()
}

pub fn path_chain() -> MarkovChain {
    MarkovChain::from_rows(
        vec!["1", "2", "3"],
        &[vec![0.0, 1.0, 0.0], vec![0.5, 0.0, 0.5], vec![0.0, 1.0, 0.0]],
    )
    .unwrap()
}

pub fn two_cycles() -> MarkovChain {
    MarkovChain::from_rows(
        vec!["1", "2", "3", "4"],
        &[
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ],
    )
    .unwrap()
}

/// Dense loop-free chain with independent random rows; detailed balance
/// fails for such chains with probability one.
pub fn random_non_reversible(n: usize, seed: u64) -> MarkovChain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { rng.random_range(0.1..1.0) });
    let p = DMatrix::from_fn(n, n, |i, j| p[(i, j)] / p.row(i).sum());
    MarkovChain::with_default_labels(p).unwrap()
}

pub fn suite() -> impl Iterator<Item = (u64, MarkovChain)> {
    (0..SUITE_SIZE).map(|i| (i, suite_chain(SUITE_SEED, i, 3..=30)))
}

/// Hitting times by first-step analysis: for each target `x`, solve
/// `(I − P) h = 1` on the states other than `x` with a plain LU solve.
pub fn hitting_times_first_step(p: &DMatrix<f64>) -> DMatrix<f64> {
    let n = p.nrows();
    let mut h = DMatrix::zeros(n, n);
    for x in 0..n {
        let others: Vec<usize> = (0..n).filter(|&t| t != x).collect();
        let m = others.len();
        let a = DMatrix::from_fn(m, m, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            delta - p[(others[i], others[j])]
        });
        let sol = a.lu().solve(&DVector::from_element(m, 1.0)).unwrap();
        for (i, &t) in others.iter().enumerate() {
            h[(t, x)] = sol[i];
        }
    }
    h
}

/// Circumradius² and barycentric circumcenter of a triangle from its squared
/// side lengths (`a2` opposite vertex 0, etc.), by the classical formulas
/// `R = abc / 4·Area` and `γ̂ ∝ (a²(b²+c²−a²), b²(c²+a²−b²), c²(a²+b²−c²))`.
pub fn triangle_circumcenter(a2: f64, b2: f64, c2: f64) -> (f64, [f64; 3]) {
    let (a, b, c) = (a2.sqrt(), b2.sqrt(), c2.sqrt());
    let s = 0.5 * (a + b + c);
    let area = (s * (s - a) * (s - b) * (s - c)).sqrt();
    let r = a * b * c / (4.0 * area);
    let w = [
        a2 * (b2 + c2 - a2),
        b2 * (c2 + a2 - b2),
        c2 * (a2 + b2 - c2),
    ];
    let total: f64 = w.iter().sum();
    (r * r, [w[0] / total, w[1] / total, w[2] / total])
}

/// Euclidean distance from `point` to the affine hull of `vertices`
/// (columns), via an orthonormal basis of the hull's direction space.
pub fn distance_to_affine_hull(point: &DVector<f64>, vertices: &DMatrix<f64>) -> f64 {
    let base = vertices.column(0).into_owned();
    let k = vertices.ncols() - 1;
    let dirs = DMatrix::from_fn(vertices.nrows(), k, |i, j| vertices[(i, j + 1)] - base[i]);
    let q = dirs.qr().q();
    let r = point - &base;
    let proj = &q * (q.transpose() * &r);
    (r - proj).norm()
}

/// Random unit-sum coordinates; `spread` controls how far outside the
/// simplex they may fall.
pub fn random_coords<R: Rng>(n: usize, spread: f64, rng: &mut R) -> DVector<f64> {
    let w = DVector::from_fn(n, |_, _| rng.random_range(-spread..1.0 + spread));
    let shift = (1.0 - w.sum()) / n as f64;
    w.add_scalar(shift)
}

/// Prints one acceptance line and returns whether it passed.
pub fn report(id: &str, passed: bool, detail: impl std::fmt::Display) -> bool {
    println!("[{}] {id}: {detail}", if passed { "PASS" } else { "FAIL" });
    passed
}
