//! Hamiltonian builders: length gauge with and without the dipole self-energy,
//! velocity gauge, the polaritonic translation, the few-level model zoo and the
//! uniform-field photon energy demonstration.

mod field_energy;
mod models;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    grid_derivative, grid_laplacian, grid_position, ladder_operators, lattice_translation,
    tensor_embed, CompositeBasis, GridSpec, HermitianOperator, PhysicalConstants, SparseMatrix, C64,
};

pub use field_energy::{dipole_field_energy_demo, FieldEnergyDemo};
pub use models::{
    build_dicke, build_jaynes_cummings, build_rabi, dicke_excitation_number, jc_excitation_number,
    two_level_reduction, TwoLevelReduction,
};

/// One photon mode in the dipole limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub omega: f64,
    /// Coupling strength λ along the polarization axis.
    pub lambda: f64,
    #[serde(default = "unit_sign")]
    pub epsilon_sign: f64,
}

fn unit_sign() -> f64 {
    1.0
}

impl Mode {
    pub fn new(omega: f64, lambda: f64) -> Self {
        Self {
            omega,
            lambda,
            epsilon_sign: 1.0,
        }
    }

    /// λ = √ω e C / c with C = (ħc²/ε₀L³)^½.
    pub fn from_quantization_volume(omega: f64, volume: f64, consts: &PhysicalConstants) -> Self {
        let c = coupling_prefactor(volume, consts);
        Self::new(omega, omega.sqrt() * consts.e * c / consts.c)
    }

    /// Signed coupling projected on the 1D axis.
    pub fn coupling(&self) -> f64 {
        self.lambda * self.epsilon_sign
    }

    /// Coefficient of x² in the dipole self-energy, λ²/(2ħω).
    pub fn self_energy_coefficient(&self, consts: &PhysicalConstants) -> f64 {
        self.lambda * self.lambda / (2.0 * consts.hbar * self.omega)
    }

    /// The vector-potential prefactor C implied by λ for this mode.
    pub fn implied_prefactor(&self, consts: &PhysicalConstants) -> f64 {
        self.lambda.abs() * consts.c / (self.omega.sqrt() * consts.e)
    }
}

/// C = (ħc²/ε₀L³)^½.
pub fn coupling_prefactor(volume: f64, consts: &PhysicalConstants) -> f64 {
    (consts.hbar * consts.c * consts.c / (consts.eps0 * volume)).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSet {
    pub modes: Vec<Mode>,
    #[serde(default)]
    pub quantization_volume: Option<f64>,
}

impl ModeSet {
    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        let set = Self {
            modes,
            quantization_volume: None,
        };
        set.validate(&PhysicalConstants::atomic())?;
        Ok(set)
    }

    pub fn single(omega: f64, lambda: f64) -> Self {
        Self {
            modes: vec![Mode::new(omega, lambda)],
            quantization_volume: None,
        }
    }

    /// Modes whose couplings all follow from one quantization volume.
    pub fn from_quantization_volume(omegas: &[f64], volume: f64, consts: &PhysicalConstants) -> Self {
        Self {
            modes: omegas
                .iter()
                .map(|&w| Mode::from_quantization_volume(w, volume, consts))
                .collect(),
            quantization_volume: Some(volume),
        }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn validate(&self, consts: &PhysicalConstants) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::Config("at least one photon mode is required".into()));
        }
        for (i, m) in self.modes.iter().enumerate() {
            if !(m.omega > 0.0 && m.omega.is_finite()) {
                return Err(Error::Config(format!("mode {i}: omega must be positive, got {}", m.omega)));
            }
            if !m.lambda.is_finite() {
                return Err(Error::Config(format!("mode {i}: lambda must be finite")));
            }
            if m.epsilon_sign != 1.0 && m.epsilon_sign != -1.0 {
                return Err(Error::Config(format!("mode {i}: epsilon_sign must be +1 or -1")));
            }
        }
        if let Some(v) = self.quantization_volume {
            if !(v > 0.0) {
                return Err(Error::Config("quantization volume must be positive".into()));
            }
            for (i, m) in self.modes.iter().enumerate() {
                let expected = Mode::from_quantization_volume(m.omega, v, consts).lambda;
                if (m.lambda.abs() - expected).abs() > 1e-12 * expected.max(1e-300) {
                    return Err(Error::Config(format!(
                        "mode {i}: lambda {} inconsistent with quantization volume (expected {expected})",
                        m.lambda
                    )));
                }
            }
        }
        Ok(())
    }

    /// Σ_α λ_α²/(ħω_α): curvature of the dipole self-energy, ε_dip = ½·curvature·x².
    pub fn self_energy_curvature(&self, consts: &PhysicalConstants) -> f64 {
        self.modes
            .iter()
            .map(|m| 2.0 * m.self_energy_coefficient(consts))
            .sum()
    }

    pub fn with_couplings_scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for m in &mut out.modes {
            m.lambda *= s;
        }
        out.quantization_volume = None;
        out
    }
}

/// Static external potential acting on the electron.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExternalPotential {
    Zero,
    /// ½ m Ω² x².
    Harmonic { omega: f64 },
    /// −V₀ exp(−x²/2σ²).
    GaussianWell { depth: f64, width: f64 },
    /// −Z e²/(4πε₀ √(x² + s²)).
    SoftCoulomb { charge: f64, softening: f64 },
    /// Values on the grid points, in order.
    Tabulated { values: Vec<f64> },
}

impl ExternalPotential {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ExternalPotential::Harmonic { omega } if !(omega > 0.0) => {
                Err(Error::Config("harmonic potential needs omega > 0".into()))
            }
            ExternalPotential::GaussianWell { depth, width } if depth < 0.0 || !(width > 0.0) => {
                Err(Error::Config("gaussian well needs depth >= 0 and width > 0".into()))
            }
            ExternalPotential::SoftCoulomb { softening, .. } if !(softening > 0.0) => {
                Err(Error::Config("soft Coulomb needs softening > 0".into()))
            }
            _ => Ok(()),
        }
    }

    /// Value at distance `r` from the origin. Tabulated potentials have no
    /// analytic form and return `None`.
    pub fn radial(&self, r: f64, consts: &PhysicalConstants) -> Option<f64> {
        Some(match *self {
            ExternalPotential::Zero => 0.0,
            ExternalPotential::Harmonic { omega } => 0.5 * consts.m * omega * omega * r * r,
            ExternalPotential::GaussianWell { depth, width } => {
                -depth * (-r * r / (2.0 * width * width)).exp()
            }
            ExternalPotential::SoftCoulomb { charge, softening } => {
                -charge * consts.e * consts.e
                    / (4.0 * std::f64::consts::PI * consts.eps0 * (r * r + softening * softening).sqrt())
            }
            ExternalPotential::Tabulated { .. } => return None,
        })
    }

    pub fn on_grid(&self, grid: &GridSpec, consts: &PhysicalConstants) -> Result<Vec<f64>> {
        self.validate()?;
        match self {
            ExternalPotential::Tabulated { values } => {
                if values.len() != grid.n_points {
                    return Err(Error::Dimension {
                        expected: grid.n_points,
                        found: values.len(),
                    });
                }
                Ok(values.clone())
            }
            _ => Ok(grid
                .positions()
                .into_iter()
                .map(|x| self.radial(x, consts).expect("analytic potential"))
                .collect()),
        }
    }

    /// Mirror symmetry about the origin on the given grid.
    pub fn is_symmetric(&self, grid: &GridSpec, consts: &PhysicalConstants) -> bool {
        let Ok(v) = self.on_grid(grid, consts) else {
            return false;
        };
        let xs = grid.positions();
        let symmetric_grid = (xs[0] + xs[xs.len() - 1]).abs() < 1e-12;
        symmetric_grid && v.iter().zip(v.iter().rev()).all(|(a, b)| (a - b).abs() <= 1e-14 * a.abs().max(1.0))
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// −(ħ²/2m)∇² + v_ext on the grid alone.
pub fn electron_hamiltonian(
    grid: &GridSpec,
    v_ext: &ExternalPotential,
    consts: &PhysicalConstants,
) -> Result<HermitianOperator> {
    let kinetic = grid_laplacian(grid)?.scale_real(-consts.hbar * consts.hbar / (2.0 * consts.m));
    let potential = SparseMatrix::from_real_diagonal(&v_ext.on_grid(grid, consts)?);
    HermitianOperator::new(vec![grid.n_points], kinetic.add(&potential)?)
}

/// The separately exposed pieces of the length-gauge Hamiltonian.
#[derive(Clone, Debug)]
pub struct LengthGaugeParts {
    pub dims: Vec<usize>,
    /// Electron Hamiltonian plus Σ ħω(a†a + ½).
    pub bare: SparseMatrix,
    /// −Σ λ_α x p_α.
    pub bilinear: SparseMatrix,
    /// Σ (λ_α x)²/(2ħω_α).
    pub self_energy: SparseMatrix,
}

impl LengthGaugeParts {
    pub fn assemble(&self, include_dip: bool) -> Result<HermitianOperator> {
        let mut h = self.bare.add(&self.bilinear)?;
        if include_dip {
            h = h.add(&self.self_energy)?;
        }
        HermitianOperator::new(self.dims.clone(), h)
    }
}

fn check_modes(basis: &CompositeBasis, modes: &ModeSet, consts: &PhysicalConstants) -> Result<()> {
    consts.validate()?;
    modes.validate(consts)?;
    if basis.focks.len() != modes.len() {
        return Err(Error::Config(format!(
            "basis has {} Fock factors but {} modes were given",
            basis.focks.len(),
            modes.len()
        )));
    }
    Ok(())
}

/// Photon energy Σ ħω_α(a†a + ½) embedded in the full space.
fn photon_energy(basis: &CompositeBasis, modes: &ModeSet, consts: &PhysicalConstants) -> Result<SparseMatrix> {
    let dims = basis.dims();
    let mut acc = SparseMatrix::zeros(basis.dim(), basis.dim());
    for (slot, (mode, fock)) in modes.modes.iter().zip(&basis.focks).enumerate() {
        let diag: Vec<f64> = (0..fock.dim())
            .map(|n| consts.hbar * mode.omega * (n as f64 + 0.5))
            .collect();
        acc = acc.add(&tensor_embed(&SparseMatrix::from_real_diagonal(&diag), slot + 1, &dims)?)?;
    }
    Ok(acc)
}

fn self_energy_operator(basis: &CompositeBasis, modes: &ModeSet, consts: &PhysicalConstants) -> Result<SparseMatrix> {
    let coeff: f64 = modes.modes.iter().map(|m| m.self_energy_coefficient(consts)).sum();
    let diag: Vec<f64> = basis.grid.positions().iter().map(|x| coeff * x * x).collect();
    tensor_embed(&SparseMatrix::from_real_diagonal(&diag), 0, &basis.dims())
}

pub fn length_gauge_parts(
    basis: &CompositeBasis,
    modes: &ModeSet,
    v_ext: &ExternalPotential,
    consts: &PhysicalConstants,
) -> Result<LengthGaugeParts> {
    check_modes(basis, modes, consts)?;
    let dims = basis.dims();
    let electron = electron_hamiltonian(&basis.grid, v_ext, consts)?;
    let bare = tensor_embed(electron.matrix(), 0, &dims)?.add(&photon_energy(basis, modes, consts)?)?;

    let x = tensor_embed(&grid_position(&basis.grid), 0, &dims)?;
    let mut bilinear = SparseMatrix::zeros(basis.dim(), basis.dim());
    for (slot, (mode, fock)) in modes.modes.iter().zip(&basis.focks).enumerate() {
        let p = tensor_embed(&ladder_operators(fock)?.coordinate(), slot + 1, &dims)?;
        bilinear = bilinear.add(&x.mul(&p)?.scale_real(-mode.coupling()))?;
    }
    Ok(LengthGaugeParts {
        dims,
        bare,
        bilinear,
        self_energy: self_energy_operator(basis, modes, consts)?,
    })
}

/// Single-electron length-gauge Hamiltonian, optionally without ε_dip.
pub fn build_length_gauge(
    basis: &CompositeBasis,
    modes: &ModeSet,
    v_ext: &ExternalPotential,
    include_dip: bool,
    consts: &PhysicalConstants,
) -> Result<HermitianOperator> {
    length_gauge_parts(basis, modes, v_ext, consts)?.assemble(include_dip)
}

/// Minimal coupling in the dipole limit, (P − (e/c)Â)²/2m + v_ext + H_p, with
/// (e/c)Â = Σ_α (λ_α/ω_α) q_α and q_α = (a + a†)/√2 in each Fock factor.
///
/// With `subtract_dip` the self-energy is removed again, which is the velocity
/// gauge image of the length-gauge Hamiltonian without ε_dip. On Dirichlet
/// grids the momentum stencil is truncated at the walls.
pub fn build_velocity_gauge(
    basis: &CompositeBasis,
    modes: &ModeSet,
    v_ext: &ExternalPotential,
    subtract_dip: bool,
    consts: &PhysicalConstants,
) -> Result<HermitianOperator> {
    check_modes(basis, modes, consts)?;
    let dims = basis.dims();
    let n = basis.dim();
    let electron = electron_hamiltonian(&basis.grid, v_ext, consts)?;
    let mut h = tensor_embed(electron.matrix(), 0, &dims)?.add(&photon_energy(basis, modes, consts)?)?;

    // vector potential (e/c)Â as a photon-space operator
    let mut a_field = SparseMatrix::zeros(n, n);
    for (slot, (mode, fock)) in modes.modes.iter().zip(&basis.focks).enumerate() {
        let q = ladder_operators(fock)?.coordinate();
        let g = mode.coupling() / mode.omega;
        a_field = a_field.add(&tensor_embed(&q, slot + 1, &dims)?.scale_real(g))?;
    }
    // P = −iħ d/dx; the cross term −(PÂ + ÂP)/2m reduces to −PÂ/m since the factors commute
    let momentum = tensor_embed(
        &grid_derivative(&basis.grid)?.scale(C64::new(0.0, -consts.hbar)),
        0,
        &dims,
    )?;
    let pa = momentum.mul(&a_field)?;
    let ap = a_field.mul(&momentum)?;
    let cross = pa.add(&ap)?.scale_real(-1.0 / (2.0 * consts.m));
    let a_sq = a_field.mul(&a_field)?.scale_real(1.0 / (2.0 * consts.m));
    h = h.add(&cross)?.add(&a_sq)?;
    if subtract_dip {
        h = h.sub(&self_energy_operator(basis, modes, consts)?)?;
    }
    HermitianOperator::new(dims, h)
}

/// Length-gauge image of the electronic translation by `shift`: a lattice shift
/// of the grid together with p_α → p_α + λ_α N shift/(ħω_α) in every mode.
pub fn polaritonic_translation(
    basis: &CompositeBasis,
    modes: &ModeSet,
    shift: f64,
    n_electrons: usize,
    consts: &PhysicalConstants,
) -> Result<SparseMatrix> {
    check_modes(basis, modes, consts)?;
    let h = basis.grid.spacing();
    let sites = (shift / h).round();
    if (shift / h - sites).abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "shift {shift} is not a multiple of the grid spacing {h}"
        )));
    }
    let mut op = lattice_translation(&basis.grid, sites as isize)?;
    for (mode, fock) in modes.modes.iter().zip(&basis.focks) {
        let amount = mode.coupling() * n_electrons as f64 * shift / (consts.hbar * mode.omega);
        let gen = ladder_operators(fock)?.derivative().to_dense();
        let gen = DMatrix::from_fn(gen.nrows(), gen.ncols(), |i, j| gen[(i, j)].re * amount);
        let disp = gen.exp();
        let disp = SparseMatrix::from_triplets(
            disp.nrows(),
            disp.ncols(),
            (0..disp.nrows())
                .flat_map(|i| (0..disp.ncols()).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, real(disp[(i, j)])))
                .filter(|(_, _, v)| v.norm() > 1e-300),
        );
        op = op.kron(&disp);
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{Boundary, FockSpec};
    use crate::spectra::lowest_eigenvalues;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::atomic()
    }

    fn harmonic_basis(n_max: usize) -> CompositeBasis {
        let g = GridSpec::centered_dirichlet(7.0, 0.1, 4).unwrap();
        CompositeBasis::uniform(g, n_max, 1).unwrap()
    }

    #[test]
    fn decoupled_ground_energy_is_sum_of_parts() {
        let basis = harmonic_basis(4);
        let v = ExternalPotential::GaussianWell { depth: 1.0, width: 1.0 };
        let modes = ModeSet::single(0.7, 0.0);
        let h = build_length_gauge(&basis, &modes, &v, true, &consts()).unwrap();
        let e = lowest_eigenvalues(&h, 1, 1e-10).unwrap()[0];
        let he = electron_hamiltonian(&basis.grid, &v, &consts()).unwrap();
        let e_el = lowest_eigenvalues(&he, 1, 1e-10).unwrap()[0];
        assert!((e - (e_el + 0.35)).abs() < 1e-9);
    }

    #[test]
    fn self_energy_is_exact_difference() {
        let basis = harmonic_basis(5);
        let modes = ModeSet::new(vec![Mode::new(1.0, 0.2), Mode::new(2.0, -0.1)]).unwrap();
        let basis = CompositeBasis::uniform(basis.grid, 3, 2).unwrap();
        let v = ExternalPotential::Harmonic { omega: 1.0 };
        let with = build_length_gauge(&basis, &modes, &v, true, &consts()).unwrap();
        let without = build_length_gauge(&basis, &modes, &v, false, &consts()).unwrap();
        let diff = with.matrix().sub(without.matrix()).unwrap();
        let coeff = 0.2 * 0.2 / 2.0 + 0.1 * 0.1 / 4.0;
        let expected: Vec<f64> = basis.grid.positions().iter().map(|x| coeff * x * x).collect();
        let expected = tensor_embed(&SparseMatrix::from_real_diagonal(&expected), 0, &basis.dims()).unwrap();
        assert!(diff.sub(&expected).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn zero_coupling_gauges_coincide() {
        let basis = harmonic_basis(3);
        let modes = ModeSet::single(1.0, 0.0);
        let v = ExternalPotential::Harmonic { omega: 1.0 };
        let l = build_length_gauge(&basis, &modes, &v, true, &consts()).unwrap();
        let vg = build_velocity_gauge(&basis, &modes, &v, false, &consts()).unwrap();
        assert_eq!(l, vg);
    }

    #[test]
    fn mismatched_mode_count_is_rejected() {
        let basis = harmonic_basis(3);
        let modes = ModeSet::new(vec![Mode::new(1.0, 0.1), Mode::new(1.0, 0.1)]).unwrap();
        let r = build_length_gauge(&basis, &modes, &ExternalPotential::Zero, true, &consts());
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn quantization_volume_consistency() {
        let c = consts();
        let set = ModeSet::from_quantization_volume(&[0.5, 1.5], 1e4, &c);
        set.validate(&c).unwrap();
        let mut bad = set.clone();
        bad.modes[1].lambda *= 1.001;
        assert!(bad.validate(&c).is_err());
        let pre = coupling_prefactor(1e4, &c);
        assert!((set.modes[0].implied_prefactor(&c) - pre).abs() < 1e-12 * pre);
    }

    #[test]
    fn translation_identity_and_free_commutation() {
        let g = GridSpec::new(-5.0, 5.0, 40, Boundary::Periodic, 4).unwrap();
        let basis = CompositeBasis::new(g, vec![FockSpec { n_max: 6 }]).unwrap();
        let modes = ModeSet::single(1.0, 0.0);
        let t0 = polaritonic_translation(&basis, &modes, 0.0, 1, &consts()).unwrap();
        assert!(t0.sub(&SparseMatrix::identity(basis.dim())).unwrap().max_abs() < 1e-15);

        let h = basis.grid.spacing();
        let t = polaritonic_translation(&basis, &modes, 3.0 * h, 1, &consts()).unwrap();
        let ham = build_length_gauge(&basis, &modes, &ExternalPotential::Zero, true, &consts()).unwrap();
        assert_eq!(ham.matrix().commutator(&t).unwrap().max_abs(), 0.0);

        assert!(polaritonic_translation(&basis, &modes, 0.3 * h, 1, &consts()).is_err());
    }

    #[test]
    fn velocity_gauge_is_hermitian_and_complex() {
        let g = GridSpec::new(-4.0, 4.0, 41, Boundary::Periodic, 2).unwrap();
        let basis = CompositeBasis::uniform(g, 4, 1).unwrap();
        let h = build_velocity_gauge(&basis, &ModeSet::single(1.0, 0.3), &ExternalPotential::Zero, true, &consts())
            .unwrap();
        assert!(!h.matrix().is_real());
    }
}
