//! Static semi-classical limits: the electron in a classical field with and
//! without the dipole self-energy, the self-consistent (non-linear) problem and
//! its fixed-displacement linearization, and the resulting Stark shifts.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{electron_hamiltonian, ExternalPotential, ModeSet};
use crate::hilbert::{GridSpec, HermitianOperator, PhysicalConstants, SparseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScfConfig {
    pub mixing: f64,
    /// Convergence threshold on successive dipoles (bohr).
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ScfConfig {
    fn default() -> Self {
        Self {
            mixing: 0.7,
            tol: 1e-12,
            max_iter: 500,
        }
    }
}

impl ScfConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(Error::Config(format!("scf mixing must lie in (0, 1], got {}", self.mixing)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("scf tolerance must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("scf max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

fn position_diag(grid: &GridSpec, f: impl Fn(f64) -> f64) -> SparseMatrix {
    SparseMatrix::from_real_diagonal(&grid.positions().into_iter().map(f).collect::<Vec<_>>())
}

/// T + v_ext − eE x.
pub fn build_standard_semiclassical(
    grid: &GridSpec,
    v_ext: &ExternalPotential,
    field: f64,
    consts: &PhysicalConstants,
) -> Result<HermitianOperator> {
    let h = electron_hamiltonian(grid, v_ext, consts)?;
    h.add(&HermitianOperator::new(
        vec![grid.n_points],
        position_diag(grid, |x| -consts.e * field * x),
    )?)
}

/// T + v_ext − (e/ε₀) x ΣD_α + ½κ x² with κ = Σλ_α²/(ħω_α); D_α are the
/// axis components of the per-mode displacement fields.
pub fn build_fixed_displacement(
    grid: &GridSpec,
    v_ext: &ExternalPotential,
    modes: &ModeSet,
    displacement: &[f64],
    consts: &PhysicalConstants,
) -> Result<HermitianOperator> {
    modes.validate(consts)?;
    if displacement.len() != modes.len() {
        return Err(Error::Dimension {
            expected: modes.len(),
            found: displacement.len(),
        });
    }
    let d_total: f64 = displacement.iter().sum();
    let kappa = modes.self_energy_curvature(consts);
    let h = electron_hamiltonian(grid, v_ext, consts)?;
    h.add(&HermitianOperator::new(
        vec![grid.n_points],
        position_diag(grid, |x| -consts.e / consts.eps0 * d_total * x + 0.5 * kappa * x * x),
    )?)
}

/// The self-consistent Hamiltonian evaluated at a given dipole ⟨x⟩:
/// T + v_ext − eE x − κ⟨x⟩x + ½κx².
pub fn build_nonlinear(
    grid: &GridSpec,
    v_ext: &ExternalPotential,
    modes: &ModeSet,
    field: f64,
    dipole: f64,
    consts: &PhysicalConstants,
) -> Result<HermitianOperator> {
    let kappa = modes.self_energy_curvature(consts);
    let h = electron_hamiltonian(grid, v_ext, consts)?;
    h.add(&HermitianOperator::new(
        vec![grid.n_points],
        position_diag(grid, |x| -consts.e * field * x - kappa * dipole * x + 0.5 * kappa * x * x),
    )?)
}

/// Full real spectrum of an electron-only operator, ascending.
fn real_spectrum(op: &HermitianOperator) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if !op.matrix().is_real() {
        return Err(Error::Precondition("semi-classical operators are real".into()));
    }
    let n = op.dim();
    let mut dense = DMatrix::zeros(n, n);
    for (r, c, v) in op.matrix().triplets() {
        dense[(r, c)] = v.re;
    }
    let eig = SymmetricEigen::new(dense);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

fn mean_position(xs: &[f64], psi: &DVector<f64>) -> f64 {
    xs.iter().zip(psi.iter()).map(|(x, a)| x * a * a).sum()
}

/// Ground state with a deterministic choice inside a (near-)degenerate pair:
/// the combination with the largest ⟨x⟩, and a sign fixed by the largest
/// amplitude being positive.
fn ground_state(op: &HermitianOperator, xs: &[f64]) -> Result<(f64, DVector<f64>)> {
    let (values, vectors) = real_spectrum(op)?;
    let mut psi = vectors.column(0).into_owned();
    if values.len() > 1 && (values[1] - values[0]).abs() < 1e-9 * values[0].abs().max(1.0) {
        let phi = vectors.column(1).into_owned();
        let plus = (&psi + &phi) / std::f64::consts::SQRT_2;
        let minus = (&psi - &phi) / std::f64::consts::SQRT_2;
        psi = if mean_position(xs, &plus) >= mean_position(xs, &minus) { plus } else { minus };
    }
    let imax = psi.iamax();
    if psi[imax] < 0.0 {
        psi = -psi;
    }
    Ok((values[0], psi))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScfSolution {
    pub amplitudes: Vec<f64>,
    /// Lowest eigenvalue of the converged non-linear Hamiltonian.
    pub eigenvalue: f64,
    /// eigenvalue + ½κ⟨x⟩², the value of the energy functional.
    pub energy: f64,
    pub dipole: f64,
    pub polarization: f64,
    /// ε₀E + P.
    pub displacement: f64,
    /// Per-mode split of the displacement, summing to `displacement`.
    pub displacement_per_mode: Vec<f64>,
    pub iterations: usize,
    /// |⟨x⟩_out − ⟨x⟩_in| per iteration.
    pub history: Vec<f64>,
}

pub fn scf_ground_state(
    grid: &GridSpec,
    v_ext: &ExternalPotential,
    modes: &ModeSet,
    field: f64,
    scf: &ScfConfig,
    consts: &PhysicalConstants,
) -> Result<ScfSolution> {
    scf.validate()?;
    modes.validate(consts)?;
    let xs = grid.positions();
    let kappa = modes.self_energy_curvature(consts);

    // seed: the field-free problem with ε_dip
    let seed = build_nonlinear(grid, v_ext, modes, 0.0, 0.0, consts)?;
    let (_, psi0) = ground_state(&seed, &xs)?;
    let mut x_in = mean_position(&xs, &psi0);
    let mut history = Vec::new();
    for it in 1..=scf.max_iter {
        let h = build_nonlinear(grid, v_ext, modes, field, x_in, consts)?;
        let (eigenvalue, psi) = ground_state(&h, &xs)?;
        let x_out = mean_position(&xs, &psi);
        let change = (x_out - x_in).abs();
        history.push(change);
        if change < scf.tol {
            // report the state belonging to the final Hamiltonian
            let polarization = consts.eps0 * kappa * x_in / consts.e;
            let displacement = consts.eps0 * field + polarization;
            return Ok(ScfSolution {
                amplitudes: psi.iter().copied().collect(),
                eigenvalue,
                energy: eigenvalue + 0.5 * kappa * x_in * x_in,
                dipole: x_in,
                polarization,
                displacement,
                displacement_per_mode: split_displacement(modes, field, x_in, consts),
                iterations: it,
                history,
            });
        }
        x_in = (1.0 - scf.mixing) * x_in + scf.mixing * x_out;
    }
    Err(Error::ScfNotConverged {
        iterations: scf.max_iter,
        history,
    })
}

fn split_displacement(modes: &ModeSet, field: f64, dipole: f64, consts: &PhysicalConstants) -> Vec<f64> {
    let weights: Vec<f64> = modes
        .modes
        .iter()
        .map(|m| m.lambda * m.lambda / (consts.hbar * m.omega))
        .collect();
    let total: f64 = weights.iter().sum();
    weights
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let share = if total > 0.0 { w / total } else if i == 0 { 1.0 } else { 0.0 };
            consts.eps0 * field * share + consts.eps0 * w * dipole / consts.e
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SosPolarizability {
    /// e²χ₀ with χ₀ = 2Σ|⟨0|x|n⟩|²/(E_n − E_0) of T + v_ext + ε_dip.
    pub fixed_displacement: f64,
    /// e²χ₀/(1 − κχ₀): the response once the dipole feeds back through κ⟨x⟩x.
    pub self_consistent: f64,
}

pub fn sum_over_states_polarizability(
    grid: &GridSpec,
    v_ext: &ExternalPotential,
    modes: &ModeSet,
    consts: &PhysicalConstants,
) -> Result<SosPolarizability> {
    let h = build_nonlinear(grid, v_ext, modes, 0.0, 0.0, consts)?;
    let (values, vectors) = real_spectrum(&h)?;
    let xs = grid.positions();
    let g = vectors.column(0);
    let mut chi = 0.0;
    for n in 1..values.len() {
        let gap = values[n] - values[0];
        if gap <= 1e-12 {
            return Err(Error::Precondition("degenerate ground state has no perturbative polarizability".into()));
        }
        let xn: f64 = xs.iter().enumerate().map(|(i, x)| g[i] * x * vectors[(i, n)]).sum();
        chi += 2.0 * xn * xn / gap;
    }
    let kappa = modes.self_energy_curvature(consts);
    let e2 = consts.e * consts.e;
    Ok(SosPolarizability {
        fixed_displacement: e2 * chi,
        self_consistent: e2 * chi / (1.0 - kappa * chi),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarkPoint {
    pub field: f64,
    pub energy: Option<f64>,
    pub dipole: Option<f64>,
    pub iterations: Option<usize>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarkResult {
    pub points: Vec<StarkPoint>,
    /// Energy functional at zero field.
    pub e0: f64,
    /// −2 × the E² coefficient of a polynomial fit in E², E⁴.
    pub alpha_fit: f64,
    /// Least-squares slope of e⟨x⟩ against E.
    pub alpha_dipole: f64,
    pub alpha_pt: SosPolarizability,
    /// |α_fit − α_pt| / α_pt for the self-consistent response.
    pub relative_agreement: f64,
    /// Largest |E(F) − E(−F)| over mirrored field pairs.
    pub parity_defect: f64,
}

impl StarkResult {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.failure.is_some()).count()
    }
}

/// Solves the non-linear problem at every field. Failed points are marked and
/// excluded from the fits.
pub fn stark_scan(
    grid: &GridSpec,
    v_ext: &ExternalPotential,
    modes: &ModeSet,
    fields: &[f64],
    scf: &ScfConfig,
    consts: &PhysicalConstants,
) -> Result<StarkResult> {
    if !fields.contains(&0.0) {
        return Err(Error::Config("a Stark scan must include zero field".into()));
    }
    let points: Vec<StarkPoint> = fields
        .par_iter()
        .map(|&f| match scf_ground_state(grid, v_ext, modes, f, scf, consts) {
            Ok(sol) => StarkPoint {
                field: f,
                energy: Some(sol.energy),
                dipole: Some(sol.dipole),
                iterations: Some(sol.iterations),
                failure: None,
            },
            Err(e) => StarkPoint {
                field: f,
                energy: None,
                dipole: None,
                iterations: None,
                failure: Some(e.to_string()),
            },
        })
        .collect();
    let good: Vec<&StarkPoint> = points.iter().filter(|p| p.failure.is_none()).collect();
    let e0 = good
        .iter()
        .find(|p| p.field == 0.0)
        .and_then(|p| p.energy)
        .ok_or_else(|| Error::NonConvergence {
            what: "zero-field SCF".into(),
            residuals: vec![],
        })?;

    let distinct: Vec<f64> = {
        let mut v: Vec<f64> = good.iter().map(|p| p.field.abs()).filter(|f| *f > 0.0).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    if distinct.is_empty() {
        if fields.iter().any(|&f| f != 0.0) {
            return Err(Error::NonConvergence {
                what: "SCF at every non-zero field".into(),
                residuals: vec![],
            });
        }
        return Err(Error::Config("a Stark scan needs at least one non-zero field".into()));
    }
    let use_quartic = distinct.len() >= 2;
    let ncols = if use_quartic { 3 } else { 2 };
    let a = DMatrix::from_fn(good.len(), ncols, |i, j| good[i].field.powi(2 * j as i32));
    let b = DVector::from_iterator(good.len(), good.iter().map(|p| p.energy.unwrap() - e0));
    let coeffs = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-300)
        .map_err(|e| Error::Invariant(format!("Stark fit failed: {e}")))?;
    let alpha_fit = -2.0 * coeffs[1];

    let sxx: f64 = good.iter().map(|p| p.field * p.field).sum();
    let sxy: f64 = good.iter().map(|p| p.field * consts.e * p.dipole.unwrap()).sum();
    let alpha_dipole = sxy / sxx;

    let mut parity_defect = 0.0f64;
    for p in &good {
        if let Some(q) = good.iter().find(|q| q.field == -p.field) {
            parity_defect = parity_defect.max((p.energy.unwrap() - q.energy.unwrap()).abs());
        }
    }
    let alpha_pt = sum_over_states_polarizability(grid, v_ext, modes, consts)?;
    Ok(StarkResult {
        relative_agreement: (alpha_fit - alpha_pt.self_consistent).abs() / alpha_pt.self_consistent.abs(),
        points,
        e0,
        alpha_fit,
        alpha_dipole,
        alpha_pt,
        parity_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::Mode;
    use crate::spectra::lowest_eigenvalues;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::atomic()
    }

    fn grid() -> GridSpec {
        GridSpec::centered_dirichlet(8.0, 0.05, 4).unwrap()
    }

    #[test]
    fn standard_harmonic_completed_square() {
        let v = ExternalPotential::Harmonic { omega: 1.0 };
        let f = 0.05;
        let h = build_standard_semiclassical(&grid(), &v, f, &consts()).unwrap();
        let e = lowest_eigenvalues(&h, 1, 1e-12).unwrap()[0];
        assert!((e - (0.5 - f * f / 2.0)).abs() < 1e-6);
        let h0 = build_standard_semiclassical(&grid(), &v, 0.0, &consts()).unwrap();
        assert_eq!(h0, electron_hamiltonian(&grid(), &v, &consts()).unwrap());
    }

    #[test]
    fn fixed_displacement_harmonic() {
        let v = ExternalPotential::Harmonic { omega: 1.0 };
        let modes = ModeSet::single(1.0, 0.3);
        let c = consts();
        let d = 0.002;
        let h = build_fixed_displacement(&grid(), &v, &modes, &[d], &c).unwrap();
        let e = lowest_eigenvalues(&h, 1, 1e-12).unwrap()[0];
        let w2: f64 = 1.0 + 0.09;
        let force = c.e / c.eps0 * d;
        assert!((e - (0.5 * w2.sqrt() - force * force / (2.0 * w2))).abs() < 1e-6);
    }

    #[test]
    fn zero_field_scf_is_plain_diagonalization() {
        let v = ExternalPotential::GaussianWell { depth: 1.0, width: 1.0 };
        let modes = ModeSet::single(1.0, 0.2);
        let sol = scf_ground_state(&grid(), &v, &modes, 0.0, &ScfConfig::default(), &consts()).unwrap();
        assert!(sol.dipole.abs() < 1e-12);
        let h = build_fixed_displacement(&grid(), &v, &modes, &[0.0], &consts()).unwrap();
        let e = lowest_eigenvalues(&h, 1, 1e-12).unwrap()[0];
        assert!((sol.energy - e).abs() < 1e-10);
    }

    #[test]
    fn fixed_displacement_round_trip() {
        let v = ExternalPotential::GaussianWell { depth: 1.0, width: 1.0 };
        let modes = ModeSet::new(vec![Mode::new(1.0, 0.2), Mode::new(2.0, 0.1)]).unwrap();
        let sol = scf_ground_state(&grid(), &v, &modes, 0.01, &ScfConfig::default(), &consts()).unwrap();
        let h = build_fixed_displacement(&grid(), &v, &modes, &sol.displacement_per_mode, &consts()).unwrap();
        let (_, psi) = ground_state(&h, &grid().positions()).unwrap();
        let overlap: f64 = psi.iter().zip(&sol.amplitudes).map(|(a, b)| a * b).sum();
        assert!(overlap.abs() > 1.0 - 1e-10, "{overlap}");
    }

    #[test]
    fn harmonic_scf_matches_linear_solve() {
        let v = ExternalPotential::Harmonic { omega: 1.0 };
        let modes = ModeSet::single(1.0, 0.3);
        let f = 0.01;
        let sol = scf_ground_state(&grid(), &v, &modes, f, &ScfConfig::default(), &consts()).unwrap();
        // x = (eE + κx)/(mΩ² + κ) → x = eE/(mΩ²)
        assert!((sol.dipole - f).abs() < 1e-8 * f, "{}", sol.dipole);
    }

    #[test]
    fn scf_reports_non_convergence() {
        let v = ExternalPotential::Harmonic { omega: 1.0 };
        let modes = ModeSet::single(1.0, 0.3);
        let scf = ScfConfig { mixing: 0.1, tol: 1e-14, max_iter: 3 };
        let r = scf_ground_state(&grid(), &v, &modes, 0.01, &scf, &consts());
        match r {
            Err(Error::ScfNotConverged { history, .. }) => assert_eq!(history.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
