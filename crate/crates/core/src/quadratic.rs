//! The potential-free light-matter problem as a quadratic form in the
//! center-of-mass coordinate X = Σx_i/√N and the photon coordinates p_α.
//!
//! H = Σ_i K_i π_i² + ½ ξᵀVξ with ξ = (X, p_1, …, p_M). The conjugate momenta
//! satisfy [X, π_X] = iħ and [p_α, π_α] = i, so the Heisenberg equations close
//! on the linear span of (ξ, π) and every identity below is checked on exact
//! coefficient vectors.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonians::{coupling_prefactor, ModeSet};
use crate::hilbert::PhysicalConstants;

const STABILITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    pub labels: Vec<String>,
    /// Diagonal of K.
    pub kinetic: Vec<f64>,
    pub potential: DMatrix<f64>,
    /// Commutator scale of each coordinate with its momentum: ħ for X, 1 for p_α.
    pub commutator_scale: Vec<f64>,
    pub hbar: f64,
}

pub fn assemble_quadratic(
    modes: &ModeSet,
    n_electrons: usize,
    include_dip: bool,
    consts: &PhysicalConstants,
) -> Result<QuadraticForm> {
    if n_electrons == 0 {
        return Err(Error::Config("at least one electron is required".into()));
    }
    modes.validate(consts)?;
    let m = modes.len();
    let n = n_electrons as f64;
    let mut v = DMatrix::zeros(m + 1, m + 1);
    let mut labels = vec!["x".to_string()];
    let mut kinetic = vec![1.0 / (2.0 * consts.m)];
    let mut scale = vec![consts.hbar];
    for (a, mode) in modes.modes.iter().enumerate() {
        let hw = consts.hbar * mode.omega;
        labels.push(format!("p_{}", a + 1));
        kinetic.push(hw / 2.0);
        scale.push(1.0);
        v[(a + 1, a + 1)] = hw;
        v[(0, a + 1)] = -mode.coupling() * n.sqrt();
        v[(a + 1, 0)] = v[(0, a + 1)];
        if include_dip {
            v[(0, 0)] += mode.lambda * mode.lambda * n / hw;
        }
    }
    Ok(QuadraticForm {
        labels,
        kinetic,
        potential: v,
        commutator_scale: scale,
        hbar: consts.hbar,
    })
}

impl QuadraticForm {
    pub fn dim(&self) -> usize {
        self.kinetic.len()
    }

    /// Effective inertia μ_i with ξ̈ = −μ⁻¹Vξ.
    pub fn masses(&self) -> Vec<f64> {
        self.kinetic
            .iter()
            .zip(&self.commutator_scale)
            .map(|(k, c)| self.hbar * self.hbar / (2.0 * k * c * c))
            .collect()
    }

    /// Generator G of the linear Heisenberg flow ż = G z on z = (ξ, π).
    /// An observable with coefficient row vector o has time derivative o·G.
    pub fn phase_space_generator(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut g = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            let c = self.commutator_scale[i];
            g[(i, n + i)] = 2.0 * self.kinetic[i] * c / self.hbar;
            for j in 0..n {
                g[(n + i, j)] = -c / self.hbar * self.potential[(i, j)];
            }
        }
        g
    }

    /// Eigenvalues of V, ascending.
    pub fn potential_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.potential.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalModeResult {
    /// ν², ascending; negative values are unstable directions.
    pub nu_squared: Vec<f64>,
    /// √ν² for stable directions, √|ν²| for unstable ones (see `imaginary`).
    pub frequencies: Vec<f64>,
    pub imaginary: Vec<bool>,
    /// Columns are mass-weighted eigenvectors, ordered as `nu_squared`.
    pub modes: DMatrix<f64>,
    pub stable: bool,
}

pub fn normal_modes(qf: &QuadraticForm) -> NormalModeResult {
    let mu = qf.masses();
    let n = qf.dim();
    let w = DMatrix::from_fn(n, n, |i, j| qf.potential[(i, j)] / (mu[i] * mu[j]).sqrt());
    let eig = SymmetricEigen::new(w);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let nu_squared: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let scale = nu_squared.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let imaginary: Vec<bool> = nu_squared.iter().map(|&v| v < -STABILITY_TOL * scale).collect();
    let frequencies = nu_squared.iter().map(|v| v.abs().sqrt()).collect();
    let modes = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    NormalModeResult {
        stable: !imaginary.iter().any(|&b| b),
        nu_squared,
        frequencies,
        imaginary,
        modes,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlasmaFrequency {
    /// Nλ²/(mħω).
    pub reduced_sq: f64,
    /// ne²/(mε₀) with n = N/L³, when a volume is known.
    pub density_sq: Option<f64>,
}

impl PlasmaFrequency {
    pub fn omega_p(&self) -> f64 {
        self.reduced_sq.sqrt()
    }
}

pub fn plasma_frequency(
    modes: &ModeSet,
    n_electrons: usize,
    consts: &PhysicalConstants,
    volume: Option<f64>,
) -> Result<Vec<PlasmaFrequency>> {
    if n_electrons == 0 {
        return Err(Error::Config("at least one electron is required".into()));
    }
    modes.validate(consts)?;
    let n = n_electrons as f64;
    let volume = volume.or(modes.quantization_volume);
    let density_sq = volume.map(|v| n / v * consts.e * consts.e / (consts.m * consts.eps0));
    modes
        .modes
        .iter()
        .map(|mode| {
            let reduced_sq = n * mode.lambda * mode.lambda / (consts.m * consts.hbar * mode.omega);
            if let Some(d) = density_sq {
                if (d - reduced_sq).abs() > 1e-12 * d.abs().max(reduced_sq.abs()) {
                    return Err(Error::Invariant(format!(
                        "plasma frequency forms disagree: density {d}, coupling {reduced_sq}"
                    )));
                }
            }
            Ok(PlasmaFrequency { reduced_sq, density_sq })
        })
        .collect()
}

/// Field observables as coefficient vectors over (X, p_α, π_X, π_α).
#[derive(Clone, Debug)]
pub struct FieldOperators {
    pub vector_potential: Vec<DVector<f64>>,
    pub electric: Vec<DVector<f64>>,
    pub displacement: Vec<DVector<f64>>,
    pub polarization: Vec<DVector<f64>>,
    /// Prefactor C_α used for each mode.
    pub prefactors: Vec<f64>,
}

impl FieldOperators {
    pub fn electric_total(&self) -> DVector<f64> {
        sum(&self.electric)
    }

    pub fn displacement_total(&self) -> DVector<f64> {
        sum(&self.displacement)
    }
}

fn sum(v: &[DVector<f64>]) -> DVector<f64> {
    v.iter().fold(DVector::zeros(v[0].len()), |a, b| a + b)
}

/// Builds Â_α, Ê_α, D̂_α and P̂_α (components along the 1D axis). A mode with
/// λ = 0 uses C = 1 so its field shape stays visible.
pub fn field_operators(modes: &ModeSet, n_electrons: usize, consts: &PhysicalConstants) -> FieldOperators {
    let m = modes.len();
    let dim = 2 * (m + 1);
    let sqrt_n = (n_electrons as f64).sqrt();
    let mut out = FieldOperators {
        vector_potential: Vec::new(),
        electric: Vec::new(),
        displacement: Vec::new(),
        polarization: Vec::new(),
        prefactors: Vec::new(),
    };
    for (a, mode) in modes.modes.iter().enumerate() {
        let c_pref = match modes.quantization_volume {
            Some(v) => coupling_prefactor(v, consts),
            None if mode.lambda != 0.0 => mode.implied_prefactor(consts),
            None => 1.0,
        };
        let sign = mode.epsilon_sign;
        let k = c_pref * mode.omega.sqrt() / consts.c;
        let mut a_vec = DVector::zeros(dim);
        a_vec[m + 1 + a + 1] = sign * c_pref / mode.omega.sqrt();
        let mut e_vec = DVector::zeros(dim);
        e_vec[a + 1] = sign * k;
        e_vec[0] = -sign * k * mode.coupling() * sqrt_n / (consts.hbar * mode.omega);
        let mut d_vec = DVector::zeros(dim);
        d_vec[a + 1] = consts.eps0 * sign * k;
        let mut p_vec = DVector::zeros(dim);
        p_vec[0] = consts.eps0 * c_pref * c_pref * consts.e * sqrt_n / (consts.hbar * consts.c * consts.c)
            * if mode.lambda == 0.0 { 0.0 } else { 1.0 };
        out.vector_potential.push(a_vec);
        out.electric.push(e_vec);
        out.displacement.push(d_vec);
        out.polarization.push(p_vec);
        out.prefactors.push(c_pref);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeResidual {
    pub mode: usize,
    /// Ä_α + ω_α²A_α against the current term (C_α²e/mc)·ΣP_i/ħ.
    pub current_equation: f64,
    /// Ë_α against −ω_α²E_α − ω_p,α² E.
    pub electric_equation: f64,
    /// Ë_α against −ω_α²E_α − ω_p,α² D/ε₀.
    pub displacement_equation: f64,
    /// D_α − ε₀E_α − P_α.
    pub constitutive: f64,
    /// Frequency at which Ê_α oscillates when it is an eigen-direction of the flow.
    pub dressed_frequency_sq: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxwellEomReport {
    pub include_dip: bool,
    pub per_mode: Vec<ModeResidual>,
    pub electric_residual: f64,
    pub displacement_residual: f64,
    pub current_residual: f64,
    pub constitutive_residual: f64,
}

/// Residuals are relative: each is divided by the norm of the dominant term
/// (ω̃_α² times the field coefficients).
pub fn maxwell_eom_check(
    modes: &ModeSet,
    n_electrons: usize,
    include_dip: bool,
    consts: &PhysicalConstants,
) -> Result<MaxwellEomReport> {
    let qf = assemble_quadratic(modes, n_electrons, include_dip, consts)?;
    let plasma = plasma_frequency(modes, n_electrons, consts, None)?;
    let g = qf.phase_space_generator();
    let g2 = &g * &g;
    let fields = field_operators(modes, n_electrons, consts);
    let m = modes.len();
    let e_total = fields.electric_total();
    let d_total = fields.displacement_total();
    let sqrt_n = (n_electrons as f64).sqrt();

    let mut per_mode = Vec::with_capacity(m);
    for (a, mode) in modes.modes.iter().enumerate() {
        let w2 = mode.omega * mode.omega;
        let wp2 = plasma[a].reduced_sq;
        let e = &fields.electric[a];
        let a_vec = &fields.vector_potential[a];
        let scale_e = (w2 + wp2) * e.norm().max(e_total.norm());

        let e_dd = (e.transpose() * &g2).transpose();
        let electric_rhs = -w2 * e - wp2 * &e_total;
        let displacement_rhs = -w2 * e - wp2 / consts.eps0 * &d_total;

        let a_dd = (a_vec.transpose() * &g2).transpose();
        let mut current = DVector::zeros(2 * (m + 1));
        let c_pref = fields.prefactors[a];
        current[m + 1] = if mode.lambda == 0.0 {
            0.0
        } else {
            c_pref * c_pref * consts.e * sqrt_n / (consts.hbar * consts.m * consts.c)
        };
        let current_lhs = &a_dd + w2 * a_vec;
        let scale_a = (w2 + wp2) * a_vec.norm();

        let constitutive = &fields.displacement[a] - consts.eps0 * e - &fields.polarization[a];
        let rel = |v: f64, s: f64| if s > 0.0 { v / s } else { v };
        let dressed = if e.norm() > 0.0 { -e.dot(&e_dd) / e.norm_squared() } else { 0.0 };
        per_mode.push(ModeResidual {
            mode: a,
            current_equation: rel((current_lhs - current).norm(), scale_a),
            electric_equation: rel((&e_dd - electric_rhs).norm(), scale_e),
            displacement_equation: rel((&e_dd - displacement_rhs).norm(), scale_e),
            constitutive: rel(constitutive.norm(), fields.displacement[a].norm()),
            dressed_frequency_sq: dressed,
        });
    }
    let max_of = |f: fn(&ModeResidual) -> f64| per_mode.iter().map(f).fold(0.0, f64::max);
    Ok(MaxwellEomReport {
        include_dip,
        electric_residual: max_of(|r| r.electric_equation),
        displacement_residual: max_of(|r| r.displacement_equation),
        current_residual: max_of(|r| r.current_equation),
        constitutive_residual: max_of(|r| r.constitutive),
        per_mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::Mode;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::atomic()
    }

    #[test]
    fn decoupled_frequencies() {
        let modes = ModeSet::new(vec![Mode::new(0.7, 0.0), Mode::new(1.9, 0.0)]).unwrap();
        let nm = normal_modes(&assemble_quadratic(&modes, 1, true, &consts()).unwrap());
        let expected = [0.0, 0.7, 1.9];
        for (f, e) in nm.frequencies.iter().zip(expected) {
            assert!((f - e).abs() < 1e-12);
        }
        assert!(nm.stable);
    }

    #[test]
    fn determinant_signs() {
        let modes = ModeSet::single(1.2, 0.3);
        let with = assemble_quadratic(&modes, 3, true, &consts()).unwrap();
        let without = assemble_quadratic(&modes, 3, false, &consts()).unwrap();
        assert!(with.potential.determinant().abs() < 1e-14);
        assert!(with.potential_eigenvalues()[0] > -1e-14);
        // det = −λ²N
        assert!((without.potential.determinant() + 0.09 * 3.0).abs() < 1e-13);
        assert!(!normal_modes(&without).stable);
    }

    #[test]
    fn depolarized_frequency() {
        let (w, lam, n) = (1.1, 0.25, 4);
        let modes = ModeSet::single(w, lam);
        let nm = normal_modes(&assemble_quadratic(&modes, n, true, &consts()).unwrap());
        let wp2 = n as f64 * lam * lam / w;
        assert!(nm.frequencies[0] < 1e-7);
        assert!((nm.frequencies[1] - (w * w + wp2).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn plasma_forms_agree_and_scale_with_n() {
        let c = consts();
        let modes = ModeSet::from_quantization_volume(&[0.5, 2.0], 3.0e3, &c);
        let one = plasma_frequency(&modes, 1, &c, None).unwrap();
        let two = plasma_frequency(&modes, 2, &c, None).unwrap();
        for (a, b) in one.iter().zip(&two) {
            let d = a.density_sq.unwrap();
            assert!((a.reduced_sq - d).abs() < 1e-12 * d);
            assert!((b.reduced_sq - 2.0 * a.reduced_sq).abs() < 1e-12 * b.reduced_sq);
        }
        let zero = plasma_frequency(&ModeSet::single(1.0, 0.0), 1, &c, None).unwrap();
        assert_eq!(zero[0].omega_p(), 0.0);
        assert!(plasma_frequency(&modes, 1, &c, Some(1.0)).is_err());
    }

    #[test]
    fn maxwell_with_and_without_self_energy() {
        let c = consts();
        let modes = ModeSet::new(vec![Mode::new(0.8, 0.2), Mode { omega: 1.7, lambda: 0.1, epsilon_sign: -1.0 }]).unwrap();
        let with = maxwell_eom_check(&modes, 2, true, &c).unwrap();
        assert!(with.electric_residual < 1e-12, "{with:?}");
        assert!(with.current_residual < 1e-12);
        assert!(with.constitutive_residual < 1e-12);
        let without = maxwell_eom_check(&modes, 2, false, &c).unwrap();
        assert!(without.displacement_residual < 1e-12, "{without:?}");
        assert!(without.electric_residual > 1e-3);
        assert!(without.constitutive_residual < 1e-12);
    }

    #[test]
    fn single_mode_dressed_frequency() {
        let c = consts();
        let modes = ModeSet::single(1.0, 0.3);
        let r = maxwell_eom_check(&modes, 1, true, &c).unwrap();
        assert!((r.per_mode[0].dressed_frequency_sq - 1.09).abs() < 1e-12);
        let bare = maxwell_eom_check(&ModeSet::single(1.3, 0.0), 1, true, &c).unwrap();
        assert!((bare.per_mode[0].dressed_frequency_sq - 1.69).abs() < 1e-12);
        assert_eq!(bare.electric_residual, 0.0);
    }
}
