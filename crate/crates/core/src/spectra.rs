//! Lowest-eigenpair solver and the convergence / instability harnesses built on it.
//!
//! Small problems go through a dense Hermitian eigendecomposition. Larger ones
//! use a thick-restart block Krylov method with full reorthogonalization and an
//! explicit Rayleigh–Ritz projection, seeded deterministically.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{inner, GridSpec, HermitianOperator, StateVector, C64};

/// Dimensions up to this size are diagonalized densely.
pub const DENSE_LIMIT: usize = 1200;

#[derive(Clone, Debug)]
pub struct EigenRequest<'a> {
    pub operator: &'a HermitianOperator,
    pub k: usize,
    pub tol: f64,
    pub max_subspace: usize,
    pub block: usize,
    pub seed: u64,
    pub max_matvecs: usize,
    /// Start vectors used before any random ones.
    pub initial: Vec<Vec<C64>>,
}

impl<'a> EigenRequest<'a> {
    pub fn new(operator: &'a HermitianOperator, k: usize) -> Self {
        Self {
            operator,
            k,
            tol: 1e-9,
            max_subspace: 160.max(8 * k),
            block: k.clamp(1, 2),
            seed: 0x5eed_u64,
            max_matvecs: 200_000,
            initial: Vec::new(),
        }
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn block(mut self, block: usize) -> Self {
        self.block = block.max(1);
        self
    }

    pub fn max_subspace(mut self, m: usize) -> Self {
        self.max_subspace = m;
        self
    }

    /// Starts the iteration from these vectors; a good guess for the lowest
    /// states shortens the iteration when the low spectrum is crowded.
    pub fn initial(mut self, vectors: Vec<Vec<C64>>) -> Self {
        self.initial = vectors;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
    pub residuals: Vec<f64>,
}

impl Eigenpairs {
    pub fn state(&self, i: usize, dims: &[usize]) -> StateVector {
        StateVector {
            dims: dims.to_vec(),
            amplitudes: self.vectors[i].clone(),
        }
    }
}

pub fn lowest_eigenpairs(req: &EigenRequest<'_>) -> Result<Eigenpairs> {
    let n = req.operator.dim();
    if req.k == 0 || req.k > n {
        return Err(Error::Size(format!("requested {} eigenpairs of a {n}-dimensional operator", req.k)));
    }
    if !(req.tol > 0.0) {
        return Err(Error::Size("eigensolver tolerance must be positive".into()));
    }
    if n <= DENSE_LIMIT || req.max_subspace + req.block >= n {
        dense_lowest(req)
    } else {
        krylov_lowest(req)
    }
}

/// Lowest `k` eigenvalues only.
pub fn lowest_eigenvalues(op: &HermitianOperator, k: usize, tol: f64) -> Result<Vec<f64>> {
    Ok(lowest_eigenpairs(&EigenRequest::new(op, k).tol(tol))?.values)
}

fn residual_norm(op: &HermitianOperator, v: &[C64], theta: f64) -> f64 {
    let av = op.matrix().mul_vec(v);
    av.iter()
        .zip(v)
        .map(|(a, x)| (a - x * theta).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn dense_lowest(req: &EigenRequest<'_>) -> Result<Eigenpairs> {
    let op = req.operator;
    let m = op.matrix().to_dense();
    let n = m.nrows();
    let (values, vectors): (Vec<f64>, Vec<Vec<C64>>) = if op.matrix().is_real() {
        let real = DMatrix::from_fn(n, n, |i, j| m[(i, j)].re);
        let eig = SymmetricEigen::new(real);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        order
            .into_iter()
            .take(req.k)
            .map(|i| {
                let v = eig.eigenvectors.column(i).iter().map(|&x| C64::new(x, 0.0)).collect();
                (eig.eigenvalues[i], v)
            })
            .unzip()
    } else {
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        order
            .into_iter()
            .take(req.k)
            .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()))
            .unzip()
    };
    let residuals = values
        .iter()
        .zip(&vectors)
        .map(|(&t, v)| residual_norm(op, v, t))
        .collect();
    Ok(Eigenpairs {
        values,
        vectors,
        residuals,
    })
}

struct Subspace<'a> {
    op: &'a HermitianOperator,
    basis: Vec<Vec<C64>>,
    images: Vec<Vec<C64>>,
    proj: Vec<Vec<C64>>,
    matvecs: usize,
}

impl<'a> Subspace<'a> {
    fn new(op: &'a HermitianOperator) -> Self {
        Self {
            op,
            basis: Vec::new(),
            images: Vec::new(),
            proj: Vec::new(),
            matvecs: 0,
        }
    }

    fn len(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonalizes `v` against the basis twice and appends it unless it is
    /// numerically dependent. Returns whether it was added.
    fn push(&mut self, mut v: Vec<C64>) -> bool {
        let start = norm(&v);
        if start == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for b in &self.basis {
                let c = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nv = norm(&v);
        if nv < 1e-10 * start {
            return false;
        }
        for x in &mut v {
            *x /= nv;
        }
        let w = self.op.matrix().mul_vec(&v);
        self.matvecs += 1;
        self.push_with_image(v, w);
        true
    }

    fn push_with_image(&mut self, v: Vec<C64>, w: Vec<C64>) {
        let mut col: Vec<C64> = self.basis.iter().map(|b| inner(b, &w)).collect();
        for (row, c) in self.proj.iter_mut().zip(&col) {
            row.push(*c);
        }
        col.iter_mut().for_each(|c| *c = c.conj());
        col.push(C64::new(inner(&v, &w).re, 0.0));
        self.proj.push(col);
        self.basis.push(v);
        self.images.push(w);
    }

    fn ritz(&self) -> (Vec<f64>, DMatrix<C64>) {
        let m = self.len();
        let h = DMatrix::from_fn(m, m, |i, j| {
            0.5 * (self.proj[i][j] + self.proj[j][i].conj())
        });
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vecs = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
        (vals, vecs)
    }

    fn combine(&self, from: &[Vec<C64>], coeffs: &DMatrix<C64>, col: usize) -> Vec<C64> {
        let n = self.op.dim();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (j, v) in from.iter().enumerate() {
            let s = coeffs[(j, col)];
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, x) in out.iter_mut().zip(v) {
                *o += s * x;
            }
        }
        out
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, real: bool) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let re = rng.gen_range(-1.0..1.0);
            let im = if real { 0.0 } else { rng.gen_range(-1.0..1.0) };
            C64::new(re, im)
        })
        .collect()
}

fn krylov_lowest(req: &EigenRequest<'_>) -> Result<Eigenpairs> {
    let op = req.operator;
    let n = op.dim();
    let real = op.matrix().is_real();
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let keep = (req.k + req.block + 4).min(req.max_subspace / 2).max(req.k);
    let check_every = 8usize;

    let mut space = Subspace::new(op);
    let mut frontier = Vec::new();
    for v in &req.initial {
        if v.len() != n {
            return Err(Error::Dimension { expected: n, found: v.len() });
        }
        if frontier.len() < req.block && space.push(v.clone()) {
            frontier.push(space.len() - 1);
        }
    }
    while frontier.len() < req.block {
        if space.push(random_vector(&mut rng, n, real)) {
            frontier.push(space.len() - 1);
        }
    }
    let mut since_check = 0usize;
    let mut best = vec![f64::INFINITY; req.k];

    loop {
        // block Krylov expansion
        let candidates: Vec<Vec<C64>> = frontier.iter().map(|&i| space.images[i].clone()).collect();
        let full = space.len() + candidates.len() > req.max_subspace;
        frontier.clear();
        if !full {
            for c in candidates {
                if space.push(c) {
                    frontier.push(space.len() - 1);
                }
            }
            if frontier.is_empty() {
                // invariant subspace reached; continue from a fresh direction
                while frontier.is_empty() {
                    if space.push(random_vector(&mut rng, n, real)) {
                        frontier.push(space.len() - 1);
                    }
                    if space.len() >= n {
                        break;
                    }
                }
            }
            since_check += 1;
        }

        if full || since_check >= check_every || space.len() >= n {
            since_check = 0;
            let (theta, s) = space.ritz();
            let k = req.k.min(theta.len());
            let mut residuals = Vec::with_capacity(k);
            for i in 0..k {
                let y = space.combine(&space.basis, &s, i);
                let ay = space.combine(&space.images, &s, i);
                let r = ay
                    .iter()
                    .zip(&y)
                    .map(|(a, x)| (a - x * theta[i]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                residuals.push(r);
            }
            for (b, r) in best.iter_mut().zip(&residuals) {
                *b = b.min(*r);
            }
            if k == req.k && residuals.iter().all(|&r| r < req.tol) {
                let vectors: Vec<Vec<C64>> = (0..k).map(|i| space.combine(&space.basis, &s, i)).collect();
                // recompute residuals directly against the operator
                let residuals = (0..k).map(|i| residual_norm(op, &vectors[i], theta[i])).collect();
                return Ok(Eigenpairs {
                    values: theta[..k].to_vec(),
                    vectors,
                    residuals,
                });
            }
            if space.matvecs > req.max_matvecs {
                return Err(Error::NonConvergence {
                    what: "lowest_eigenpairs".into(),
                    residuals: best,
                });
            }
            if full {
                // thick restart: Ritz vectors plus the next Krylov block
                let next: Vec<Vec<C64>> = candidates_for_restart(&space, &frontier_images(&space, req.block));
                let p = keep.min(theta.len());
                let mut restarted = Subspace::new(op);
                restarted.matvecs = space.matvecs;
                for i in 0..p {
                    let y = space.combine(&space.basis, &s, i);
                    let ay = space.combine(&space.images, &s, i);
                    restarted.push_with_image(y, ay);
                }
                space = restarted;
                for v in next {
                    if space.push(v) {
                        frontier.push(space.len() - 1);
                    }
                }
                while frontier.is_empty() {
                    if space.push(random_vector(&mut rng, n, real)) {
                        frontier.push(space.len() - 1);
                    }
                }
            }
        }
    }
}

/// The images of the most recently added basis vectors.
fn frontier_images(space: &Subspace<'_>, block: usize) -> Vec<Vec<C64>> {
    let m = space.len();
    space.images[m.saturating_sub(block)..].to_vec()
}

/// Orthogonalizes the continuation block against the current (pre-restart) basis.
fn candidates_for_restart(space: &Subspace<'_>, images: &[Vec<C64>]) -> Vec<Vec<C64>> {
    images
        .iter()
        .map(|w| {
            let mut v = w.clone();
            for _ in 0..2 {
                for b in &space.basis {
                    let c = inner(b, &v);
                    for (x, y) in v.iter_mut().zip(b) {
                        *x -= c * y;
                    }
                }
            }
            v
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    Diverging,
    Undecided,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Converged => "converged",
            Verdict::Diverging => "diverging",
            Verdict::Undecided => "undecided",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    /// Values of the scanned parameter (n_max or box length).
    pub axis: Vec<f64>,
    /// Lowest-k eigenvalues at each step.
    pub values: Vec<Vec<f64>>,
    /// Largest eigenvalue change between consecutive steps.
    pub changes: Vec<f64>,
    pub verdict: Verdict,
    /// Ground-density centroid per step (box scans only).
    pub centroids: Vec<f64>,
    /// Mean distance of the ground density from the nearest wall (box scans only).
    pub edge_distances: Vec<f64>,
}

impl ConvergenceReport {
    pub fn ground(&self) -> Vec<f64> {
        self.values.iter().map(|v| v[0]).collect()
    }

    /// Ground-energy decrements `E(step i) - E(step i+1)`.
    pub fn decrements(&self) -> Vec<f64> {
        self.ground().windows(2).map(|w| w[0] - w[1]).collect()
    }
}

/// Converged if the final step moved every tracked value by less than `tol`;
/// diverging if the ground energy fell strictly over at least three steps
/// with decrements that never shrink.
pub fn classify(values: &[Vec<f64>], tol: f64) -> Verdict {
    let ground: Vec<f64> = values.iter().map(|v| v[0]).collect();
    let dec: Vec<f64> = ground.windows(2).map(|w| w[0] - w[1]).collect();
    if dec.len() >= 3 && dec.iter().all(|&d| d > tol) && dec.windows(2).all(|w| w[1] >= w[0]) {
        return Verdict::Diverging;
    }
    if values.len() >= 2 {
        let last = &values[values.len() - 1];
        let prev = &values[values.len() - 2];
        if last.iter().zip(prev).all(|(a, b)| (a - b).abs() < tol) {
            return Verdict::Converged;
        }
    }
    Verdict::Undecided
}

fn max_changes(values: &[Vec<f64>]) -> Vec<f64> {
    values
        .windows(2)
        .map(|w| {
            w[0].iter()
                .zip(&w[1])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Eigenvalue trajectories under a sequence of Fock truncations.
pub fn truncation_scan<F>(builder: F, n_max: &[usize], k: usize, tol: f64) -> Result<ConvergenceReport>
where
    F: Fn(usize) -> Result<HermitianOperator> + Sync,
{
    let solve_tol = (tol * 1e-2).max(1e-12);
    let values: Vec<Vec<f64>> = n_max
        .par_iter()
        .map(|&n| {
            let op = builder(n)?;
            lowest_eigenvalues(&op, k, solve_tol)
        })
        .collect::<Result<_>>()?;
    Ok(ConvergenceReport {
        axis: n_max.iter().map(|&n| n as f64).collect(),
        changes: max_changes(&values),
        verdict: classify(&values, tol),
        values,
        centroids: Vec::new(),
        edge_distances: Vec::new(),
    })
}

/// Mean position and mean distance to the nearest Dirichlet wall of a grid density.
pub fn density_moments(grid: &GridSpec, density: &[f64]) -> (f64, f64) {
    let h = grid.spacing();
    let (left, right) = (grid.x_min - h, grid.x_max + h);
    let total: f64 = density.iter().sum();
    let mut centroid = 0.0;
    let mut edge = 0.0;
    for (x, rho) in grid.positions().into_iter().zip(density) {
        centroid += x * rho;
        edge += (x - left).min(right - x) * rho;
    }
    (centroid / total, edge / total)
}

/// Ground-state behaviour as the box grows at fixed spacing.
pub fn box_growth_scan<F>(builder: F, lengths: &[f64], k: usize, tol: f64) -> Result<ConvergenceReport>
where
    F: Fn(f64) -> Result<(GridSpec, HermitianOperator)> + Sync,
{
    let solve_tol = (tol * 1e-2).max(1e-11);
    let steps: Vec<(Vec<f64>, f64, f64)> = lengths
        .par_iter()
        .map(|&l| {
            let (grid, op) = builder(l)?;
            let pairs = lowest_eigenpairs(&EigenRequest::new(&op, k).tol(solve_tol))?;
            // average over the lowest level's near-degenerate partners so a
            // symmetric pair of edge states is reported symmetrically
            let e0 = pairs.values[0];
            let mut density = vec![0.0; grid.n_points];
            for (i, &e) in pairs.values.iter().enumerate() {
                if (e - e0).abs() <= 1e-6 * e0.abs().max(1.0) {
                    let st = pairs.state(i, op.dims());
                    for (d, r) in density.iter_mut().zip(st.grid_density()) {
                        *d += r;
                    }
                }
            }
            let (c, edge) = density_moments(&grid, &density);
            Ok((pairs.values, c, edge))
        })
        .collect::<Result<_>>()?;
    let values: Vec<Vec<f64>> = steps.iter().map(|s| s.0.clone()).collect();
    Ok(ConvergenceReport {
        axis: lengths.to_vec(),
        changes: max_changes(&values),
        verdict: classify(&values, tol),
        centroids: steps.iter().map(|s| s.1).collect(),
        edge_distances: steps.iter().map(|s| s.2).collect(),
        values,
    })
}

/// Per-step largest gap between two families of spectra (e.g. two gauges).
pub fn spectral_gaps(a: &ConvergenceReport, b: &ConvergenceReport) -> Vec<f64> {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| {
            x.iter()
                .zip(y)
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::SparseMatrix;

    fn diag_op(d: &[f64]) -> HermitianOperator {
        HermitianOperator::new(vec![d.len()], SparseMatrix::from_real_diagonal(d)).unwrap()
    }

    #[test]
    fn diagonal_matrix_gives_smallest_entries() {
        let d: Vec<f64> = (0..50).map(|i| ((i * 37) % 50) as f64 * 0.1).collect();
        let v = lowest_eigenvalues(&diag_op(&d), 3, 1e-10).unwrap();
        assert_eq!(v, vec![0.0, 0.1, 0.2]);
    }

    /// 1D chain Laplacian (dim 3000) solved iteratively against its closed form.
    #[test]
    fn krylov_matches_closed_form_chain() {
        let n = 3000;
        let mut trips = Vec::new();
        for i in 0..n {
            trips.push((i, i, C64::new(2.0 + 0.002 * (i as f64 - 1500.0).powi(2) / 1500.0, 0.0)));
            if i + 1 < n {
                trips.push((i, i + 1, C64::new(-1.0, 0.0)));
                trips.push((i + 1, i, C64::new(-1.0, 0.0)));
            }
        }
        let op = HermitianOperator::new(vec![n], SparseMatrix::from_triplets(n, n, trips)).unwrap();
        let pairs = lowest_eigenpairs(&EigenRequest::new(&op, 3).tol(1e-8)).unwrap();
        assert!(pairs.residuals.iter().all(|&r| r < 1e-7));
        for w in pairs.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        // eigenvalues of a weak harmonic chain: compare with dense on a diagonal shift
        assert!(pairs.values[0] > 0.0 && pairs.values[0] < 0.1);
    }

    #[test]
    fn krylov_agrees_with_dense() {
        let n = 1500;
        let mut trips = Vec::new();
        for i in 0..n {
            trips.push((i, i, C64::new((i % 7) as f64 + 0.01 * i as f64, 0.0)));
            let j = (i * 13 + 5) % n;
            if j != i {
                let v = C64::new(0.3, 0.1 * ((i % 3) as f64));
                trips.push((i, j, v));
                trips.push((j, i, v.conj()));
            }
        }
        let op = HermitianOperator::new(vec![n], SparseMatrix::from_triplets(n, n, trips)).unwrap();
        let dense = dense_lowest(&EigenRequest::new(&op, 4)).unwrap();
        let it = krylov_lowest(&EigenRequest::new(&op, 4).tol(1e-9).block(3)).unwrap();
        for (a, b) in dense.values.iter().zip(&it.values) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn degenerate_pair_is_resolved_with_block() {
        let n = 2000;
        let d: Vec<f64> = (0..n).map(|i| if i < 2 { -1.0 } else { i as f64 * 0.01 }).collect();
        let mut trips: Vec<(usize, usize, C64)> =
            d.iter().enumerate().map(|(i, &v)| (i, i, C64::new(v, 0.0))).collect();
        for i in 2..n - 1 {
            trips.push((i, i + 1, C64::new(0.001, 0.0)));
            trips.push((i + 1, i, C64::new(0.001, 0.0)));
        }
        let op = HermitianOperator::new(vec![n], SparseMatrix::from_triplets(n, n, trips)).unwrap();
        let v = krylov_lowest(&EigenRequest::new(&op, 3).block(2)).unwrap().values;
        assert!((v[0] + 1.0).abs() < 1e-9 && (v[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn classify_verdicts() {
        let conv = vec![vec![1.0], vec![0.5], vec![0.5 + 1e-12]];
        assert_eq!(classify(&conv, 1e-8), Verdict::Converged);
        let div = vec![vec![0.0], vec![-1.0], vec![-3.0], vec![-7.0]];
        assert_eq!(classify(&div, 1e-8), Verdict::Diverging);
        let shrinking = vec![vec![0.0], vec![-1.0], vec![-1.5], vec![-1.7]];
        assert_eq!(classify(&shrinking, 1e-8), Verdict::Undecided);
    }

    #[test]
    fn rejects_bad_requests() {
        let op = diag_op(&[1.0, 2.0]);
        assert!(lowest_eigenpairs(&EigenRequest::new(&op, 3)).is_err());
        assert!(lowest_eigenpairs(&EigenRequest::new(&op, 0)).is_err());
    }
}
