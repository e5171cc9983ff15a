//! Few-level reductions: two-level atom, Rabi, Jaynes-Cummings and Dicke.

use serde::Serialize;

use super::{electron_hamiltonian, ExternalPotential, Mode};
use crate::error::{Error, Result};
use crate::hilbert::{
    grid_position, inner, ladder_operators, FockSpec, GridSpec, HermitianOperator, PhysicalConstants,
    SparseMatrix, C64,
};
use crate::spectra::{lowest_eigenpairs, EigenRequest};

const PARITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoLevelReduction {
    pub e_g: f64,
    pub e_e: f64,
    pub d_ge: f64,
    /// Rabi frequency √2 λ d_ge/ħ.
    pub omega_r: f64,
    /// Rabi frequency from √(2ω) e C d_ge/(cħ), with C implied by λ.
    pub omega_r_from_prefactor: f64,
    pub g_offset: f64,
    /// Largest of |⟨g|x|g⟩|, |⟨e|x|e⟩|, |⟨g|x²|e⟩|.
    pub parity_defect: f64,
    pub parity_warning: bool,
}

/// Projects the single-electron problem onto its two lowest states.
pub fn two_level_reduction(
    grid: &GridSpec,
    v_ext: &ExternalPotential,
    mode: &Mode,
    consts: &PhysicalConstants,
) -> Result<TwoLevelReduction> {
    let h = electron_hamiltonian(grid, v_ext, consts)?;
    let pairs = lowest_eigenpairs(&EigenRequest::new(&h, 2).tol(1e-11))?;
    let (e_g, e_e) = (pairs.values[0], pairs.values[1]);
    if !(e_e > e_g) {
        return Err(Error::Precondition(format!(
            "two lowest levels are degenerate ({e_g}, {e_e})"
        )));
    }
    let x = grid_position(grid);
    let x2 = x.mul(&x)?;
    let g = &pairs.vectors[0];
    let e = &pairs.vectors[1];
    let elem = |op: &SparseMatrix, a: &[C64], b: &[C64]| inner(a, &op.mul_vec(b));

    let d_ge = elem(&x, g, e).norm();
    let parity_defect = [
        elem(&x, g, g).norm(),
        elem(&x, e, e).norm(),
        elem(&x2, g, e).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let omega_r = std::f64::consts::SQRT_2 * mode.lambda.abs() * d_ge / consts.hbar;
    let c_pref = mode.implied_prefactor(consts);
    let omega_r_from_prefactor = (2.0 * mode.omega).sqrt() * consts.e * c_pref * d_ge / (consts.c * consts.hbar);
    let coeff = mode.self_energy_coefficient(consts);
    let g_offset = coeff * (elem(&x2, g, g).re + elem(&x2, e, e).re);

    Ok(TwoLevelReduction {
        e_g,
        e_e,
        d_ge,
        omega_r,
        omega_r_from_prefactor,
        g_offset,
        parity_defect,
        parity_warning: parity_defect > PARITY_TOL,
    })
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Generic pseudo-spin/boson Hamiltonian on (spin) ⊗ (Fock):
/// ħω·jz + ħω a†a + coupling, with the spin factor given by its J_z diagonal and J₊.
fn spin_boson(
    jz: &[f64],
    j_plus: &SparseMatrix,
    mode: &Mode,
    omega_r: f64,
    rotating_wave: bool,
    n_max: usize,
    consts: &PhysicalConstants,
) -> Result<HermitianOperator> {
    let fock = FockSpec::new(n_max)?;
    let ladder = ladder_operators(&fock)?;
    let hw = consts.hbar * mode.omega;
    let spin_dim = jz.len();
    let id_spin = SparseMatrix::identity(spin_dim);
    let id_fock = SparseMatrix::identity(fock.dim());

    let spin_energy = SparseMatrix::from_real_diagonal(&jz.iter().map(|m| hw * m).collect::<Vec<_>>());
    let photon = SparseMatrix::from_real_diagonal(&(0..fock.dim()).map(|n| hw * n as f64).collect::<Vec<_>>());
    let j_minus = j_plus.adjoint();
    let g = -consts.hbar * omega_r / 2.0;

    let coupling = if rotating_wave {
        j_plus.kron(&ladder.lower).add(&j_minus.kron(&ladder.raise))?
    } else {
        // σ_x(a + a†) with σ_x = J₊ + J₋
        j_plus.add(&j_minus)?.kron(&ladder.lower.add(&ladder.raise)?)
    };
    let h = spin_energy
        .kron(&id_fock)
        .add(&id_spin.kron(&photon))?
        .add(&coupling.scale_real(g))?;
    HermitianOperator::new(vec![spin_dim, fock.dim()], h)
}

fn sigma_plus() -> SparseMatrix {
    // basis order: |g⟩ = 0, |e⟩ = 1
    SparseMatrix::from_triplets(2, 2, [(1, 0, real(1.0))])
}

/// (ħω/2)σ_z + ħω a†a − (ħΩ_R/2)σ_x(a + a†), plus G·1 when requested.
pub fn build_rabi(
    red: &TwoLevelReduction,
    mode: &Mode,
    with_offset: bool,
    n_max: usize,
    consts: &PhysicalConstants,
) -> Result<HermitianOperator> {
    let h = spin_boson(&[-0.5, 0.5], &sigma_plus(), mode, red.omega_r, false, n_max, consts)?;
    if with_offset {
        h.shift(red.g_offset)
    } else {
        Ok(h)
    }
}

pub fn build_jaynes_cummings(
    red: &TwoLevelReduction,
    mode: &Mode,
    n_max: usize,
    consts: &PhysicalConstants,
) -> Result<HermitianOperator> {
    spin_boson(&[-0.5, 0.5], &sigma_plus(), mode, red.omega_r, true, n_max, consts)
}

/// N_ex = a†a + σ₊σ₋ on the Jaynes-Cummings space.
pub fn jc_excitation_number(n_max: usize) -> Result<SparseMatrix> {
    dicke_excitation_number(1, n_max)
}

fn collective_spin(n_atoms: usize) -> (Vec<f64>, SparseMatrix) {
    let j = n_atoms as f64 / 2.0;
    let dim = n_atoms + 1;
    let ms: Vec<f64> = (0..dim).map(|i| i as f64 - j).collect();
    let j_plus = SparseMatrix::from_triplets(
        dim,
        dim,
        (0..dim - 1).map(|i| {
            let m = ms[i];
            (i + 1, i, real((j * (j + 1.0) - m * (m + 1.0)).sqrt()))
        }),
    );
    (ms, j_plus)
}

/// ħω a†a − (ħΩ_R/2)(S₊a + S₋a†) + (ħω/2)S_z in the symmetric spin-n/2 sector,
/// with S_z = 2J_z and S± = J±. Spin index i carries m = i − j.
pub fn build_dicke(
    red: &TwoLevelReduction,
    mode: &Mode,
    n_atoms: usize,
    n_max: usize,
    consts: &PhysicalConstants,
) -> Result<HermitianOperator> {
    if n_atoms == 0 {
        return Err(Error::Size("Dicke model needs at least one atom".into()));
    }
    let (ms, j_plus) = collective_spin(n_atoms);
    spin_boson(&ms, &j_plus, mode, red.omega_r, true, n_max, consts)
}

/// a†a + J_z + j on the Dicke space.
pub fn dicke_excitation_number(n_atoms: usize, n_max: usize) -> Result<SparseMatrix> {
    let fock = FockSpec::new(n_max)?;
    let j = n_atoms as f64 / 2.0;
    let (ms, _) = collective_spin(n_atoms);
    let spin = SparseMatrix::from_real_diagonal(&ms.iter().map(|m| m + j).collect::<Vec<_>>());
    let number = ladder_operators(&fock)?.number();
    Ok(spin
        .kron(&SparseMatrix::identity(fock.dim()))
        .add(&SparseMatrix::identity(ms.len()).kron(&number))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::lowest_eigenvalues;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::atomic()
    }

    fn harmonic_reduction(lambda: f64) -> (TwoLevelReduction, Mode) {
        let grid = GridSpec::centered_dirichlet(8.0, 0.05, 4).unwrap();
        let mode = Mode::new(1.0, lambda);
        let red = two_level_reduction(&grid, &ExternalPotential::Harmonic { omega: 1.0 }, &mode, &consts()).unwrap();
        (red, mode)
    }

    fn synthetic(omega_r: f64, g: f64) -> TwoLevelReduction {
        TwoLevelReduction {
            e_g: 0.0,
            e_e: 1.0,
            d_ge: 1.0,
            omega_r,
            omega_r_from_prefactor: omega_r,
            g_offset: g,
            parity_defect: 0.0,
            parity_warning: false,
        }
    }

    #[test]
    fn harmonic_dipole_and_rabi_forms_agree() {
        let (red, _) = harmonic_reduction(0.05);
        assert!((red.d_ge - 0.5f64.sqrt()).abs() < 1e-6);
        assert!(!red.parity_warning);
        assert!((red.omega_r - red.omega_r_from_prefactor).abs() < 1e-12 * red.omega_r);
        // ⟨x²⟩ = ½ and 3/2 in the two lowest oscillator states
        assert!((red.g_offset - 0.05f64.powi(2) / 2.0 * 2.0).abs() < 1e-6);
    }

    #[test]
    fn zero_coupling_gives_zero_rabi_and_offset() {
        let (red, _) = harmonic_reduction(0.0);
        assert_eq!(red.omega_r, 0.0);
        assert_eq!(red.g_offset, 0.0);
    }

    #[test]
    fn asymmetric_potential_is_flagged() {
        let grid = GridSpec::new(-6.0, 6.0, 201, crate::hilbert::Boundary::Dirichlet, 4).unwrap();
        let v: Vec<f64> = grid.positions().iter().map(|x| 0.5 * x * x + 0.2 * x * x * x / (1.0 + x * x)).collect();
        let red = two_level_reduction(&grid, &ExternalPotential::Tabulated { values: v }, &Mode::new(1.0, 0.1), &consts())
            .unwrap();
        assert!(red.parity_warning);
    }

    #[test]
    fn rabi_offset_shifts_whole_spectrum() {
        let red = synthetic(0.3, 0.123);
        let mode = Mode::new(1.0, 0.1);
        let a = lowest_eigenvalues(&build_rabi(&red, &mode, false, 20, &consts()).unwrap(), 6, 1e-12).unwrap();
        let b = lowest_eigenvalues(&build_rabi(&red, &mode, true, 20, &consts()).unwrap(), 6, 1e-12).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((y - x - 0.123).abs() < 1e-12);
        }
    }

    #[test]
    fn rabi_weak_coupling_shift() {
        let omega_r = 0.02;
        let red = synthetic(omega_r, 0.0);
        let h = build_rabi(&red, &Mode::new(1.0, 0.0), false, 10, &consts()).unwrap();
        let e0 = lowest_eigenvalues(&h, 1, 1e-13).unwrap()[0];
        let predicted = -0.5 - (omega_r / 2.0).powi(2) / 2.0;
        assert!((e0 - predicted).abs() < 1e-7, "{e0} vs {predicted}");
    }

    #[test]
    fn jc_conserves_excitations_and_splits_resonantly() {
        let red = synthetic(0.1, 0.0);
        let mode = Mode::new(1.0, 0.0);
        let h = build_jaynes_cummings(&red, &mode, 8, &consts()).unwrap();
        let nex = jc_excitation_number(8).unwrap();
        assert!(h.matrix().commutator(&nex).unwrap().max_abs() < 1e-14);
        let e = lowest_eigenvalues(&h, 3, 1e-12).unwrap();
        assert!((e[0] + 0.5).abs() < 1e-12);
        assert!((e[1] - (0.5 - 0.05)).abs() < 1e-12);
        assert!((e[2] - (0.5 + 0.05)).abs() < 1e-12);
    }

    #[test]
    fn single_atom_dicke_is_jc() {
        let red = synthetic(0.37, 0.0);
        let mode = Mode::new(1.3, 0.0);
        let jc = build_jaynes_cummings(&red, &mode, 6, &consts()).unwrap();
        let dk = build_dicke(&red, &mode, 1, 6, &consts()).unwrap();
        assert_eq!(jc, dk);
    }

    #[test]
    fn dicke_conservation_and_free_spectrum() {
        let red = synthetic(0.2, 0.0);
        let mode = Mode::new(1.0, 0.0);
        let h = build_dicke(&red, &mode, 4, 10, &consts()).unwrap();
        let nex = dicke_excitation_number(4, 10).unwrap();
        assert!(h.matrix().commutator(&nex).unwrap().max_abs() < 1e-14);

        let free = build_dicke(&synthetic(0.0, 0.0), &mode, 3, 4, &consts()).unwrap();
        let d = free.matrix().diagonal();
        // m = −3/2 with zero photons is the lowest level
        assert_eq!(d[0].re, -1.5);
        assert_eq!(free.matrix().nnz(), d.iter().filter(|v| v.re != 0.0).count());
    }
}
