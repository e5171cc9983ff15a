//! Electron grid ⊗ truncated Fock spaces: bases, index arithmetic and the
//! elementary operators every Hamiltonian is assembled from.
//!
//! The electron coordinate is one-dimensional and runs along the shared
//! polarization axis. Tensor factors are ordered grid first, then one Fock
//! factor per photon mode, with row-major (last factor fastest) flattening.

mod sparse;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use sparse::{SparseMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub m: f64,
    pub e: f64,
    pub c: f64,
    pub eps0: f64,
}

impl PhysicalConstants {
    /// Hartree atomic units.
    pub fn atomic() -> Self {
        Self {
            hbar: 1.0,
            m: 1.0,
            e: 1.0,
            c: 137.035999,
            eps0: 1.0 / (4.0 * std::f64::consts::PI),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("hbar", self.hbar),
            ("m", self.m),
            ("e", self.e),
            ("c", self.c),
            ("eps0", self.eps0),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("constant {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::atomic()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub boundary: Boundary,
    #[serde(default = "default_stencil")]
    pub stencil_order: usize,
}

fn default_stencil() -> usize {
    4
}

impl GridSpec {
    pub fn new(
        x_min: f64,
        x_max: f64,
        n_points: usize,
        boundary: Boundary,
        stencil_order: usize,
    ) -> Result<Self> {
        let g = Self {
            x_min,
            x_max,
            n_points,
            boundary,
            stencil_order,
        };
        g.validate()?;
        Ok(g)
    }

    /// Dirichlet grid centred on the origin with the given spacing.
    pub fn centered_dirichlet(half_width: f64, spacing: f64, stencil_order: usize) -> Result<Self> {
        let n = (2.0 * half_width / spacing).round() as usize + 1;
        Self::new(-half_width, half_width, n, Boundary::Dirichlet, stencil_order)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 3 {
            return Err(Error::Size(format!("grid needs at least 3 points, got {}", self.n_points)));
        }
        if !(self.x_max > self.x_min) {
            return Err(Error::Size(format!(
                "grid requires x_max > x_min, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.stencil_order != 2 && self.stencil_order != 4 {
            return Err(Error::Size(format!("stencil order must be 2 or 4, got {}", self.stencil_order)));
        }
        if self.n_points < self.stencil_width() {
            return Err(Error::Size(format!(
                "{} points is fewer than the stencil width {}",
                self.n_points,
                self.stencil_width()
            )));
        }
        Ok(())
    }

    pub fn stencil_width(&self) -> usize {
        self.stencil_order + 1
    }

    pub fn spacing(&self) -> f64 {
        match self.boundary {
            Boundary::Dirichlet => (self.x_max - self.x_min) / (self.n_points - 1) as f64,
            Boundary::Periodic => (self.x_max - self.x_min) / self.n_points as f64,
        }
    }

    pub fn positions(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_points).map(|j| self.x_min + j as f64 * h).collect()
    }

    /// Length on which the wave function lives. For Dirichlet grids the walls
    /// sit one spacing outside the outermost points.
    pub fn box_length(&self) -> f64 {
        let h = self.spacing();
        match self.boundary {
            Boundary::Dirichlet => (self.n_points + 1) as f64 * h,
            Boundary::Periodic => self.n_points as f64 * h,
        }
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.x_min + self.x_max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockSpec {
    pub n_max: usize,
}

impl FockSpec {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::Size("Fock truncation needs n_max >= 1".into()));
        }
        Ok(Self { n_max })
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompositeBasis {
    pub grid: GridSpec,
    pub focks: Vec<FockSpec>,
}

impl CompositeBasis {
    pub fn new(grid: GridSpec, focks: Vec<FockSpec>) -> Result<Self> {
        grid.validate()?;
        for f in &focks {
            FockSpec::new(f.n_max)?;
        }
        Ok(Self { grid, focks })
    }

    /// Same Fock truncation for each of `modes` modes.
    pub fn uniform(grid: GridSpec, n_max: usize, modes: usize) -> Result<Self> {
        Self::new(grid, vec![FockSpec::new(n_max)?; modes])
    }

    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.grid.n_points)
            .chain(self.focks.iter().map(FockSpec::dim))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        flatten(&self.dims(), idx)
    }

    pub fn unflatten(&self, flat: usize) -> Vec<usize> {
        unflatten(&self.dims(), flat)
    }
}

pub fn flatten(dims: &[usize], idx: &[usize]) -> usize {
    assert_eq!(dims.len(), idx.len());
    idx.iter().zip(dims).fold(0, |acc, (&i, &d)| {
        assert!(i < d, "index {i} outside factor of size {d}");
        acc * d + i
    })
}

pub fn unflatten(dims: &[usize], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for (slot, &d) in dims.iter().enumerate().rev() {
        idx[slot] = flat % d;
        flat /= d;
    }
    idx
}

/// Sparse matrix that is exactly Hermitian, tagged with its tensor factor dims.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    dims: Vec<usize>,
    matrix: SparseMatrix,
}

impl HermitianOperator {
    pub fn new(dims: Vec<usize>, matrix: SparseMatrix) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: matrix.nrows(),
            });
        }
        if let Some((row, col)) = matrix.hermiticity_defect() {
            return Err(Error::NotHermitian { row, col });
        }
        Ok(Self { dims, matrix })
    }

    pub fn on_basis(basis: &CompositeBasis, matrix: SparseMatrix) -> Result<Self> {
        Self::new(basis.dims(), matrix)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SparseMatrix {
        self.matrix
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::new(self.dims.clone(), self.matrix.add(&other.matrix)?)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::new(self.dims.clone(), self.matrix.sub(&other.matrix)?)
    }

    pub fn shift(&self, offset: f64) -> Result<Self> {
        let id = SparseMatrix::identity(self.dim()).scale_real(offset);
        Self::new(self.dims.clone(), self.matrix.add(&id)?)
    }

    pub fn expectation(&self, psi: &StateVector) -> f64 {
        let hpsi = self.matrix.mul_vec(&psi.amplitudes);
        inner(&psi.amplitudes, &hpsi).re / psi.norm_sqr()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if amplitudes.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        for a in &mut self.amplitudes {
            *a /= n;
        }
        self
    }

    pub fn overlap(&self, other: &Self) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// Probability density on the grid factor (slot 0), marginalised over photons.
    pub fn grid_density(&self) -> Vec<f64> {
        let inner_dim: usize = self.dims[1..].iter().product();
        self.amplitudes
            .chunks(inner_dim)
            .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }
}

/// `<a|b>` with the first argument conjugated.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Ladder operators of one truncated oscillator, `a = (p + ∂/∂p)/√2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ladder {
    pub lower: SparseMatrix,
    pub raise: SparseMatrix,
}

impl Ladder {
    /// `p = (a + a†)/√2`.
    pub fn coordinate(&self) -> SparseMatrix {
        self.lower
            .add(&self.raise)
            .expect("ladder factors share a shape")
            .scale_real(std::f64::consts::FRAC_1_SQRT_2)
    }

    /// `∂/∂p = (a − a†)/√2`, anti-Hermitian.
    pub fn derivative(&self) -> SparseMatrix {
        self.lower
            .sub(&self.raise)
            .expect("ladder factors share a shape")
            .scale_real(std::f64::consts::FRAC_1_SQRT_2)
    }

    /// `i ∂/∂p`, Hermitian.
    pub fn i_derivative(&self) -> SparseMatrix {
        self.derivative().scale(C64::new(0.0, 1.0))
    }

    pub fn number(&self) -> SparseMatrix {
        self.raise.mul(&self.lower).expect("square ladder factors")
    }
}

pub fn ladder_operators(fock: &FockSpec) -> Result<Ladder> {
    let fock = FockSpec::new(fock.n_max)?;
    let d = fock.dim();
    let lower = SparseMatrix::from_triplets(
        d,
        d,
        (1..d).map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0))),
    );
    let raise = lower.adjoint();
    Ok(Ladder { lower, raise })
}

fn stencil_offsets(coeffs: &[f64]) -> impl Iterator<Item = (isize, f64)> + '_ {
    let half = (coeffs.len() / 2) as isize;
    coeffs
        .iter()
        .enumerate()
        .map(move |(k, &c)| (k as isize - half, c))
}

/// Builds a banded stencil matrix. With `mirror`, Dirichlet rows reach past the
/// wall (one spacing beyond the outer point) through an odd reflection, which
/// keeps wide stencils at their design order near the boundary.
fn banded(grid: &GridSpec, coeffs: &[f64], scale: f64, mirror: bool) -> SparseMatrix {
    let n = grid.n_points as isize;
    let mut trips = Vec::new();
    for i in 0..n {
        for (off, c) in stencil_offsets(coeffs) {
            if c == 0.0 {
                continue;
            }
            let j = i + off;
            let (j, sign) = match grid.boundary {
                Boundary::Periodic => (j.rem_euclid(n), 1.0),
                Boundary::Dirichlet if (0..n).contains(&j) => (j, 1.0),
                // wall at index -1 (or n): index -1-d reflects onto -1+d
                Boundary::Dirichlet if mirror && j < -1 => (-2 - j, -1.0),
                Boundary::Dirichlet if mirror && j > n => (2 * n - j, -1.0),
                Boundary::Dirichlet => continue,
            };
            trips.push((i as usize, j as usize, C64::new(sign * c * scale, 0.0)));
        }
    }
    SparseMatrix::from_triplets(grid.n_points, grid.n_points, trips)
}

/// Finite-difference second derivative (the Laplacian in one dimension).
pub fn grid_laplacian(grid: &GridSpec) -> Result<SparseMatrix> {
    grid.validate()?;
    let h = grid.spacing();
    let coeffs: &[f64] = match grid.stencil_order {
        2 => &[1.0, -2.0, 1.0],
        _ => &[-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0],
    };
    Ok(banded(grid, coeffs, 1.0 / (h * h), true))
}

/// Central-difference first derivative; real and antisymmetric.
pub fn grid_derivative(grid: &GridSpec) -> Result<SparseMatrix> {
    grid.validate()?;
    let h = grid.spacing();
    let coeffs: &[f64] = match grid.stencil_order {
        2 => &[-0.5, 0.0, 0.5],
        _ => &[1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0],
    };
    Ok(banded(grid, coeffs, 1.0 / h, false))
}

pub fn grid_position(grid: &GridSpec) -> SparseMatrix {
    SparseMatrix::from_real_diagonal(&grid.positions())
}

/// `(Tψ)(x_j) = ψ(x_{j+sites})` on a periodic grid.
pub fn lattice_translation(grid: &GridSpec, sites: isize) -> Result<SparseMatrix> {
    if grid.boundary != Boundary::Periodic {
        return Err(Error::Precondition("lattice translation needs a periodic grid".into()));
    }
    let n = grid.n_points as isize;
    Ok(SparseMatrix::from_triplets(
        grid.n_points,
        grid.n_points,
        (0..n).map(|j| (j as usize, (j + sites).rem_euclid(n) as usize, C64::new(1.0, 0.0))),
    ))
}

/// Embeds a factor operator into slot `slot` of a tensor product, identity elsewhere.
pub fn tensor_embed(op: &SparseMatrix, slot: usize, dims: &[usize]) -> Result<SparseMatrix> {
    if slot >= dims.len() {
        return Err(Error::SlotOutOfRange {
            slot,
            slots: dims.len(),
        });
    }
    if op.nrows() != dims[slot] || op.ncols() != dims[slot] {
        return Err(Error::Dimension {
            expected: dims[slot],
            found: op.nrows(),
        });
    }
    let before: usize = dims[..slot].iter().product();
    let after: usize = dims[slot + 1..].iter().product();
    Ok(SparseMatrix::identity(before)
        .kron(op)
        .kron(&SparseMatrix::identity(after)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};
    use std::f64::consts::PI;

    fn lowest_real_eigenvalue(m: &SparseMatrix) -> f64 {
        let d = m.to_dense();
        let real = DMatrix::from_fn(d.nrows(), d.ncols(), |i, j| d[(i, j)].re);
        SymmetricEigen::new(real).eigenvalues.min()
    }

    #[test]
    fn vacuum_is_annihilated() {
        let l = ladder_operators(&FockSpec { n_max: 1 }).unwrap();
        let v = l.lower.mul_vec(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        assert!(v.iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn truncated_commutator_is_identity_below_cutoff() {
        let l = ladder_operators(&FockSpec { n_max: 3 }).unwrap();
        let comm = l.lower.commutator(&l.raise).unwrap();
        // exact up to the rounding of sqrt(n)^2
        for n in 0..3 {
            assert!((comm.get(n, n) - 1.0).norm() <= 4.0 * f64::EPSILON);
        }
        // corner defect: [a, a†]_{33} = -n_max
        assert!((comm.get(3, 3) + 3.0).norm() <= 4.0 * f64::EPSILON);
        assert_eq!(comm.nnz(), 4);
    }

    #[test]
    fn coordinate_matrix_element() {
        let l = ladder_operators(&FockSpec { n_max: 2 }).unwrap();
        let p = l.coordinate();
        assert!((p.get(0, 1).re - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(l.i_derivative().hermiticity_defect().is_none());
    }

    #[test]
    fn zero_fock_cutoff_is_rejected() {
        assert!(ladder_operators(&FockSpec { n_max: 0 }).is_err());
    }

    #[test]
    fn laplacian_annihilates_constants_on_periodic_grid() {
        for order in [2, 4] {
            let g = GridSpec::new(0.0, 1.0, 16, Boundary::Periodic, order).unwrap();
            let lap = grid_laplacian(&g).unwrap();
            let y = lap.mul_vec(&vec![C64::new(1.0, 0.0); 16]);
            assert!(y.iter().all(|z| z.norm() < 1e-9));
        }
    }

    #[test]
    fn particle_in_a_box_converges_at_stencil_order() {
        for order in [2usize, 4] {
            let mut errs = Vec::new();
            for n in [39usize, 79, 159] {
                let g = GridSpec::new(-1.0, 1.0, n, Boundary::Dirichlet, order).unwrap();
                let l = g.box_length();
                let t = grid_laplacian(&g).unwrap().scale_real(-0.5);
                let exact = PI * PI / (2.0 * l * l);
                errs.push((lowest_real_eigenvalue(&t) - exact).abs());
            }
            let rate = (errs[1] / errs[2]).log2();
            assert!(
                (rate - order as f64).abs() < 0.3,
                "order {order}: observed rate {rate} from {errs:?}"
            );
        }
    }

    #[test]
    fn plane_wave_discrete_dispersion() {
        let n = 32;
        let g = GridSpec::new(0.0, 2.0 * PI, n, Boundary::Periodic, 2).unwrap();
        let h = g.spacing();
        let k = 3.0;
        let psi: Vec<C64> = g.positions().iter().map(|&x| C64::new(0.0, k * x).exp()).collect();
        let lap_psi = grid_laplacian(&g).unwrap().mul_vec(&psi);
        let expected = (2.0 / (h * h)) * ((k * h).cos() - 1.0);
        for (a, b) in lap_psi.iter().zip(&psi) {
            assert!((a - b * expected).norm() < 1e-10);
        }
    }

    #[test]
    fn too_few_points_for_stencil() {
        assert!(GridSpec::new(0.0, 1.0, 4, Boundary::Dirichlet, 4).is_err());
        assert!(GridSpec::new(0.0, 1.0, 2, Boundary::Dirichlet, 2).is_err());
    }

    #[test]
    fn embedding_properties() {
        let g = GridSpec::new(-1.0, 1.0, 5, Boundary::Dirichlet, 2).unwrap();
        let basis = CompositeBasis::uniform(g.clone(), 3, 2).unwrap();
        let dims = basis.dims();
        let id = tensor_embed(&SparseMatrix::identity(4), 1, &dims).unwrap();
        assert_eq!(id, SparseMatrix::identity(basis.dim()));

        let l = ladder_operators(&FockSpec { n_max: 3 }).unwrap();
        let p = tensor_embed(&l.coordinate(), 2, &dims).unwrap();
        let x = tensor_embed(&grid_position(&g), 0, &dims).unwrap();
        assert_eq!(p.commutator(&x).unwrap().nnz(), 0);

        let a = l.number();
        let tr = tensor_embed(&a, 1, &dims).unwrap().trace();
        assert_eq!(tr, a.trace() * (5.0 * 4.0));

        let ab = tensor_embed(&l.lower.mul(&l.raise).unwrap(), 1, &dims).unwrap();
        let prod = tensor_embed(&l.lower, 1, &dims)
            .unwrap()
            .mul(&tensor_embed(&l.raise, 1, &dims).unwrap())
            .unwrap();
        assert_eq!(ab, prod);

        assert!(matches!(
            tensor_embed(&a, 3, &dims),
            Err(Error::SlotOutOfRange { .. })
        ));
        assert!(matches!(
            tensor_embed(&a, 0, &dims),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn hermitian_operator_rejects_non_hermitian() {
        let l = ladder_operators(&FockSpec { n_max: 2 }).unwrap();
        assert!(matches!(
            HermitianOperator::new(vec![3], l.lower.clone()),
            Err(Error::NotHermitian { .. })
        ));
        assert!(HermitianOperator::new(vec![3], l.coordinate()).is_ok());
    }

    #[test]
    fn lattice_translation_commutes_with_periodic_laplacian() {
        let g = GridSpec::new(0.0, 10.0, 20, Boundary::Periodic, 4).unwrap();
        let t = lattice_translation(&g, 3).unwrap();
        let lap = grid_laplacian(&g).unwrap();
        assert_eq!(t.commutator(&lap).unwrap().max_abs(), 0.0);
    }

    proptest::proptest! {
        #[test]
        fn flatten_roundtrip(d0 in 1usize..6, d1 in 1usize..5, d2 in 1usize..4, seed in 0usize..1000) {
            let dims = [d0, d1, d2];
            let total = d0 * d1 * d2;
            let flat = seed % total;
            let idx = unflatten(&dims, flat);
            proptest::prop_assert_eq!(flatten(&dims, &idx), flat);
        }

        #[test]
        fn truncated_ccr_below_cutoff(n_max in 1usize..20) {
            let l = ladder_operators(&FockSpec { n_max }).unwrap();
            let comm = l.lower.commutator(&l.raise).unwrap();
            for n in 0..n_max {
                proptest::prop_assert!((comm.get(n, n) - 1.0).norm() <= 4.0 * f64::EPSILON * n_max as f64);
            }
        }
    }
}
