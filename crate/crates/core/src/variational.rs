//! Trial states showing that the length-gauge Hamiltonian without the dipole
//! self-energy has no lower bound: compactly supported mollifier orbitals
//! pushed away from the origin, times a photon superposition with ⟨p⟩ ≠ 0.
//!
//! All orbital integrals reduce to radial quadratures because every orbital is
//! spherically symmetric about its own center.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{ExternalPotential, ModeSet};
use crate::hilbert::{ladder_operators, FockSpec, PhysicalConstants, C64};
use crate::quadrature::integrate;

const RADIAL_TOL: f64 = 1e-13;
const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

pub type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn scaled(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn distance(a: Vec3, b: Vec3) -> f64 {
    norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

/// exp(−1/(1 − r²)) inside the unit ball, zero outside.
pub fn mollifier(r: f64) -> f64 {
    if r.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r * r)).exp()
    }
}

pub fn mollifier_derivative(r: f64) -> f64 {
    if r.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - r * r;
        -2.0 * r / (q * q) * mollifier(r)
    }
}

pub fn mollifier_second_derivative(r: f64) -> f64 {
    if r.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - r * r;
        let g = -2.0 * r / (q * q);
        let dg = -2.0 / (q * q) - 8.0 * r * r / (q * q * q);
        (g * g + dg) * mollifier(r)
    }
}

/// Radial integrals of the unit-radius mollifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MollifierIntegrals {
    /// ∫ 4πr² f² dr.
    pub norm_integral: f64,
    /// 𝒩 with 𝒩² ∫4πr²f² = 1.
    pub normalization: f64,
    /// 𝒩² ∫ 4πr² f′² dr (ħ²/2m omitted).
    pub gradient_sq: f64,
    /// −𝒩² ∫ 4πr² f (f″ + 2f′/r) dr, the same quantity via the Laplacian.
    pub laplacian_form: f64,
    /// ⟨r²⟩ of the normalized density.
    pub second_moment: f64,
}

pub fn mollifier_integrals() -> Result<MollifierIntegrals> {
    static CACHE: OnceLock<std::result::Result<MollifierIntegrals, String>> = OnceLock::new();
    CACHE
        .get_or_init(|| compute_integrals().map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::Invariant)
}

fn compute_integrals() -> Result<MollifierIntegrals> {
    let norm_integral = integrate(|r| FOUR_PI * r * r * mollifier(r).powi(2), 0.0, 1.0, RADIAL_TOL)?;
    let n2 = 1.0 / norm_integral;
    let gradient_sq = n2 * integrate(|r| FOUR_PI * r * r * mollifier_derivative(r).powi(2), 0.0, 1.0, RADIAL_TOL)?;
    let laplacian_form = -n2
        * integrate(
            |r| {
                let lap = if r == 0.0 {
                    3.0 * mollifier_second_derivative(0.0)
                } else {
                    mollifier_second_derivative(r) + 2.0 * mollifier_derivative(r) / r
                };
                FOUR_PI * r * r * mollifier(r) * lap
            },
            0.0,
            1.0,
            RADIAL_TOL,
        )?;
    let second_moment = n2 * integrate(|r| FOUR_PI * r.powi(4) * mollifier(r).powi(2), 0.0, 1.0, RADIAL_TOL)?;
    Ok(MollifierIntegrals {
        norm_integral,
        normalization: n2.sqrt(),
        gradient_sq,
        laplacian_form,
        second_moment,
    })
}

/// Normalized density |F|² at distance `s` from the center.
fn density(s: f64, ints: &MollifierIntegrals) -> f64 {
    ints.normalization.powi(2) * mollifier(s).powi(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifierConfig {
    pub a: f64,
    pub kappa: Vec3,
}

impl MollifierConfig {
    pub fn center(&self) -> Vec3 {
        scaled(self.kappa, self.a)
    }
}

/// (𝒩, T) for one mollifier orbital. T does not depend on the center.
pub fn mollifier_norm_and_kinetic(_config: &MollifierConfig, consts: &PhysicalConstants) -> Result<(f64, f64)> {
    let ints = mollifier_integrals()?;
    Ok((ints.normalization, consts.hbar * consts.hbar / (2.0 * consts.m) * ints.gradient_sq))
}

/// Expectation of r in the orbital: the center plus the numerically integrated
/// centered first moment, which vanishes by symmetry.
pub fn dipole_moment(config: &MollifierConfig) -> Result<(Vec3, f64)> {
    let ints = mollifier_integrals()?;
    let centered = integrate(
        |s| {
            let inner = integrate(|u| s * u * 2.0 * std::f64::consts::PI * s * s, -1.0, 1.0, 1e-15)
                .unwrap_or(f64::NAN);
            density(s, &ints) * inner
        },
        0.0,
        1.0,
        RADIAL_TOL,
    )?;
    let c = config.center();
    let k = norm(config.kappa);
    let dir = if k > 0.0 { scaled(config.kappa, 1.0 / k) } else { [0.0; 3] };
    Ok(([c[0] + centered * dir[0], c[1] + centered * dir[1], c[2] + centered * dir[2]], centered))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlaterMollifierConfig {
    pub n_electrons: usize,
    pub a: f64,
    pub kappa: Vec3,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
}

fn default_spacing() -> f64 {
    3.0
}

impl From<MollifierConfig> for SlaterMollifierConfig {
    fn from(c: MollifierConfig) -> Self {
        Self {
            n_electrons: 1,
            a: c.a,
            kappa: c.kappa,
            spacing: default_spacing(),
        }
    }
}

impl SlaterMollifierConfig {
    /// Centers [a + spacing·(i − 1)]κ, i = 1..N.
    pub fn centers(&self) -> Vec<Vec3> {
        (0..self.n_electrons)
            .map(|i| scaled(self.kappa, self.a + self.spacing * i as f64))
            .collect()
    }

    pub fn with_a(&self, a: f64) -> Self {
        Self { a, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_electrons == 0 {
            return Err(Error::Config("at least one electron is required".into()));
        }
        if self.n_electrons > 1 {
            let gap = self.spacing.abs() * norm(self.kappa);
            if gap < 2.0 {
                return Err(Error::Precondition(format!(
                    "mollifier supports overlap: neighbouring centers are {gap} bohr apart"
                )));
            }
        }
        Ok(())
    }
}

/// Per-mode real amplitudes over oscillator eigenstates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotonTrialState {
    pub weights: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhotonMoments {
    pub mean_p: f64,
    pub mean_p_sq: f64,
    /// ⟨H_p⟩ / ħω.
    pub energy_quanta: f64,
}

impl PhotonTrialState {
    /// (φ₀ + φ₁)/√2 in every mode.
    pub fn equal_superposition(modes: usize) -> Self {
        let w = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            weights: vec![vec![w, w]; modes],
        }
    }

    pub fn validate(&self, modes: usize) -> Result<()> {
        if self.weights.len() != modes {
            return Err(Error::Config(format!(
                "photon trial state has {} modes, expected {modes}",
                self.weights.len()
            )));
        }
        for (i, w) in self.weights.iter().enumerate() {
            let n: f64 = w.iter().map(|x| x * x).sum();
            if w.is_empty() || (n - 1.0).abs() > 1e-12 {
                return Err(Error::Config(format!("photon weights of mode {i} are not normalized ({n})")));
            }
        }
        Ok(())
    }

    /// Moments of p = (a + a†)/√2 per mode, computed in a Fock space one level
    /// larger than the state so that p² is not truncated.
    pub fn moments(&self) -> Result<Vec<PhotonMoments>> {
        self.weights
            .iter()
            .map(|w| {
                let fock = FockSpec::new(w.len())?;
                let p = ladder_operators(&fock)?.coordinate();
                let mut psi: Vec<C64> = w.iter().map(|&x| C64::new(x, 0.0)).collect();
                psi.push(C64::new(0.0, 0.0));
                let p_psi = p.mul_vec(&psi);
                let mean_p = crate::hilbert::inner(&psi, &p_psi).re;
                let mean_p_sq = crate::hilbert::inner(&p_psi, &p_psi).re;
                let energy_quanta = w.iter().enumerate().map(|(n, x)| x * x * (n as f64 + 0.5)).sum();
                Ok(PhotonMoments {
                    mean_p,
                    mean_p_sq,
                    energy_quanta,
                })
            })
            .collect()
    }

    /// ⟨p_αΦ, p_βΦ⟩ for the product state.
    pub fn gram(&self) -> Result<DMatrix<f64>> {
        let m = self.moments()?;
        Ok(DMatrix::from_fn(m.len(), m.len(), |a, b| {
            if a == b {
                m[a].mean_p_sq
            } else {
                m[a].mean_p * m[b].mean_p
            }
        }))
    }
}

/// κ = λ/|λ|² for one mode, the unit vector along Σλ_α otherwise. Couplings
/// lie along the x axis.
pub fn default_kappa(modes: &ModeSet) -> Result<Vec3> {
    let total: f64 = modes.modes.iter().map(|m| m.coupling()).sum();
    if total == 0.0 {
        return Err(Error::Config("κ cannot be derived from vanishing couplings; give it explicitly".into()));
    }
    if modes.len() == 1 {
        Ok([1.0 / total, 0.0, 0.0])
    } else {
        Ok([total.signum(), 0.0, 0.0])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub photon: f64,
    /// ⟨v_ext⟩, negative for an attractive well.
    pub potential: f64,
    /// Point-charge form of the electron-electron repulsion.
    pub coulomb: f64,
    /// The same repulsion from radial and angular quadrature.
    pub coulomb_quadrature: f64,
    pub bilinear: f64,
    pub dipole_self_energy: Option<f64>,
    pub total: f64,
    pub mean_p: Vec<f64>,
}

impl EnergyBreakdown {
    pub fn parts_sum(&self) -> f64 {
        self.kinetic + self.photon + self.potential + self.coulomb + self.bilinear + self.dipole_self_energy.unwrap_or(0.0)
    }
}

/// Spherical average of a radial function g(|r|) over a sphere of radius s
/// whose center sits at distance d from the origin.
fn shell_average<G: Fn(f64) -> f64>(g: &G, d: f64, s: f64) -> Result<f64> {
    if d == 0.0 {
        return Ok(g(s));
    }
    Ok(0.5 * integrate(|u| g((d * d + s * s + 2.0 * d * s * u).max(0.0).sqrt()), -1.0, 1.0, 1e-14)?)
}

/// ∫ ρ(r − c) g(|r|) d³r for the normalized mollifier density centered at c.
fn density_against_radial<G: Fn(f64) -> f64>(g: &G, d: f64, ints: &MollifierIntegrals) -> Result<f64> {
    let failure = std::cell::RefCell::new(None);
    let value = integrate(
        |s| match shell_average(g, d, s) {
            Ok(avg) => FOUR_PI * s * s * density(s, ints) * avg,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        1.0,
        1e-12,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    value
}

/// ⟨v_ext⟩ summed over all orbitals.
pub fn external_energy(
    centers: &[Vec3],
    v_ext: &ExternalPotential,
    consts: &PhysicalConstants,
) -> Result<f64> {
    if matches!(v_ext, ExternalPotential::Zero) {
        return Ok(0.0);
    }
    if v_ext.radial(0.0, consts).is_none() {
        return Err(Error::Config("trial energies need an analytic radial potential".into()));
    }
    v_ext.validate()?;
    let ints = mollifier_integrals()?;
    let g = |r: f64| v_ext.radial(r, consts).unwrap_or(0.0);
    centers.iter().map(|&c| density_against_radial(&g, norm(c), &ints)).sum()
}

pub fn coulomb_point_charge(centers: &[Vec3], consts: &PhysicalConstants) -> f64 {
    let k = consts.e * consts.e / (FOUR_PI * consts.eps0);
    let mut w = 0.0;
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            w += k / distance(centers[i], centers[j]);
        }
    }
    w
}

/// Repulsion of the orbital densities by quadrature: the potential of one
/// density follows from its enclosed charge and outer shells, the other
/// density is integrated against it with a numerical angular average.
pub fn coulomb_quadrature(centers: &[Vec3], consts: &PhysicalConstants) -> Result<f64> {
    let ints = mollifier_integrals()?;
    let k = consts.e * consts.e / (FOUR_PI * consts.eps0);
    let enclosed = |r: f64| -> Result<f64> {
        integrate(|s| FOUR_PI * s * s * density(s, &ints), 0.0, r.min(1.0), 1e-14)
    };
    let outer = |r: f64| -> Result<f64> {
        if r >= 1.0 {
            Ok(0.0)
        } else {
            integrate(|s| FOUR_PI * s * density(s, &ints), r, 1.0, 1e-14)
        }
    };
    let potential = |r: f64| -> f64 {
        let q = enclosed(r).unwrap_or(f64::NAN);
        let o = outer(r).unwrap_or(f64::NAN);
        k * (q / r + o)
    };
    let mut w = 0.0;
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            w += density_against_radial(&potential, distance(centers[i], centers[j]), &ints)?;
        }
    }
    if w.is_nan() {
        return Err(Error::Quadrature { tol: 1e-14, estimate: f64::NAN });
    }
    Ok(w)
}

/// Σ_i ⟨r_i⟩ along x, the only axis the couplings see.
fn dipole_x(centers: &[Vec3]) -> f64 {
    centers.iter().map(|c| c[0]).sum()
}

pub fn trial_energy(
    config: &SlaterMollifierConfig,
    photons: &PhotonTrialState,
    modes: &ModeSet,
    v_ext: &ExternalPotential,
    include_dip: bool,
    consts: &PhysicalConstants,
) -> Result<EnergyBreakdown> {
    config.validate()?;
    modes.validate(consts)?;
    photons.validate(modes.len())?;
    let ints = mollifier_integrals()?;
    let n = config.n_electrons as f64;
    let centers = config.centers();
    let moments = photons.moments()?;

    let kinetic = n * consts.hbar * consts.hbar / (2.0 * consts.m) * ints.gradient_sq;
    let photon: f64 = modes
        .modes
        .iter()
        .zip(&moments)
        .map(|(m, mo)| consts.hbar * m.omega * mo.energy_quanta)
        .sum();
    let potential = external_energy(&centers, v_ext, consts)?;
    let coulomb = coulomb_point_charge(&centers, consts);
    let coulomb_quadrature = if centers.len() > 1 { coulomb_quadrature(&centers, consts)? } else { 0.0 };
    let rx = dipole_x(&centers);
    let bilinear: f64 = -modes
        .modes
        .iter()
        .zip(&moments)
        .map(|(m, mo)| mo.mean_p * m.coupling() * rx)
        .sum::<f64>();
    let dipole_self_energy = include_dip.then(|| {
        modes
            .modes
            .iter()
            .map(|m| m.lambda * m.lambda * (rx * rx + n * ints.second_moment / 3.0) / (2.0 * consts.hbar * m.omega))
            .sum::<f64>()
    });
    let mut out = EnergyBreakdown {
        kinetic,
        photon,
        potential,
        coulomb,
        coulomb_quadrature,
        bilinear,
        dipole_self_energy,
        total: 0.0,
        mean_p: moments.iter().map(|m| m.mean_p).collect(),
    };
    out.total = out.parts_sum();
    Ok(out)
}

/// ⟨V_int Ψ | V_int Ψ⟩, finite for every trial state.
pub fn interaction_norm(
    config: &SlaterMollifierConfig,
    photons: &PhotonTrialState,
    modes: &ModeSet,
) -> Result<f64> {
    config.validate()?;
    photons.validate(modes.len())?;
    let ints = mollifier_integrals()?;
    let gram = photons.gram()?;
    let centers = config.centers();
    let rx = dipole_x(&centers);
    let r2 = rx * rx + config.n_electrons as f64 * ints.second_moment / 3.0;
    let mut acc = 0.0;
    for (a, ma) in modes.modes.iter().enumerate() {
        for (b, mb) in modes.modes.iter().enumerate() {
            acc += gram[(a, b)] * ma.coupling() * mb.coupling() * r2;
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnboundednessScan {
    pub a_values: Vec<f64>,
    pub energies: Vec<EnergyBreakdown>,
    /// Index of the first point from which ⟨v_ext⟩ is negligible.
    pub tail_start: usize,
    /// Least-squares slope of the total energy over the tail.
    pub tail_slope: f64,
    /// −Σ_α ⟨p_α⟩ N λ_α·κ.
    pub expected_slope: f64,
}

impl UnboundednessScan {
    pub fn totals(&self) -> Vec<f64> {
        self.energies.iter().map(|e| e.total).collect()
    }

    pub fn tail_strictly_decreasing(&self) -> bool {
        self.totals()[self.tail_start..].windows(2).all(|w| w[1] < w[0])
    }

    pub fn tail_strictly_increasing(&self) -> bool {
        self.totals()[self.tail_start..].windows(2).all(|w| w[1] > w[0])
    }

    pub fn minimum(&self) -> f64 {
        self.totals().into_iter().fold(f64::INFINITY, f64::min)
    }
}

pub fn unboundedness_scan(
    base: &SlaterMollifierConfig,
    a_values: &[f64],
    photons: &PhotonTrialState,
    modes: &ModeSet,
    v_ext: &ExternalPotential,
    include_dip: bool,
    consts: &PhysicalConstants,
) -> Result<UnboundednessScan> {
    if a_values.len() < 2 {
        return Err(Error::Config("a scan needs at least two points".into()));
    }
    let energies: Vec<EnergyBreakdown> = a_values
        .par_iter()
        .map(|&a| trial_energy(&base.with_a(a), photons, modes, v_ext, include_dip, consts))
        .collect::<Result<_>>()?;
    let tail_start = energies
        .iter()
        .rposition(|e| e.potential.abs() > 1e-14)
        .map_or(0, |i| i + 1)
        .min(a_values.len() - 2);
    let xs = &a_values[tail_start..];
    let ys: Vec<f64> = energies[tail_start..].iter().map(|e| e.total).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let moments = photons.moments()?;
    let n = base.n_electrons as f64;
    let expected_slope = -modes
        .modes
        .iter()
        .zip(&moments)
        .map(|(m, mo)| mo.mean_p * n * m.coupling() * base.kappa[0])
        .sum::<f64>();
    Ok(UnboundednessScan {
        a_values: a_values.to_vec(),
        energies,
        tail_start,
        tail_slope: sxy / sxx,
        expected_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::atomic()
    }

    #[test]
    fn kinetic_forms_agree_and_are_positive() {
        let ints = mollifier_integrals().unwrap();
        assert!(ints.gradient_sq > 0.0);
        assert!((ints.gradient_sq - ints.laplacian_form).abs() < 1e-9 * ints.gradient_sq);
        let (_, t0) = mollifier_norm_and_kinetic(&MollifierConfig { a: 0.0, kappa: [1.0, 0.0, 0.0] }, &consts()).unwrap();
        let (_, t7) = mollifier_norm_and_kinetic(&MollifierConfig { a: 7.0, kappa: [1.0, 0.0, 0.0] }, &consts()).unwrap();
        assert_eq!(t0, t7);
    }

    #[test]
    fn dipole_is_center() {
        let (d, centered) = dipole_moment(&MollifierConfig { a: 5.0, kappa: [1.0, 0.0, 0.0] }).unwrap();
        assert!(centered.abs() < 1e-10);
        assert!((d[0] - 5.0).abs() < 1e-10 && d[1] == 0.0 && d[2] == 0.0);
        let (z, _) = dipole_moment(&MollifierConfig { a: 0.0, kappa: [0.0, 1.0, 0.0] }).unwrap();
        assert!(norm(z) < 1e-10);
    }

    #[test]
    fn photon_moments() {
        let m = PhotonTrialState::equal_superposition(1).moments().unwrap()[0];
        assert!((m.mean_p - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((m.mean_p_sq - 1.0).abs() < 1e-15);
        assert!((m.energy_quanta - 1.0).abs() < 1e-15);
        let g = PhotonTrialState::equal_superposition(2).gram().unwrap();
        assert!((g[(0, 1)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn overlapping_supports_rejected() {
        let cfg = SlaterMollifierConfig { n_electrons: 2, a: 0.0, kappa: [0.5, 0.0, 0.0], spacing: 3.0 };
        let r = trial_energy(
            &cfg,
            &PhotonTrialState::equal_superposition(1),
            &ModeSet::single(1.0, 0.1),
            &ExternalPotential::Zero,
            false,
            &consts(),
        );
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn coulomb_shell_theorem() {
        let cfg = SlaterMollifierConfig { n_electrons: 3, a: 1.0, kappa: [0.0, 1.0, 0.0], spacing: 3.0 };
        let centers = cfg.centers();
        let point = coulomb_point_charge(&centers, &consts());
        let quad = coulomb_quadrature(&centers, &consts()).unwrap();
        assert!((point - (1.0 / 3.0 + 1.0 / 3.0 + 1.0 / 6.0)).abs() < 1e-14);
        assert!((quad - point).abs() < 1e-8 * point, "{quad} vs {point}");
    }

    #[test]
    fn gaussian_well_energy_is_attractive_and_decays() {
        let v = ExternalPotential::GaussianWell { depth: 1.0, width: 1.0 };
        let near = external_energy(&[[0.0; 3]], &v, &consts()).unwrap();
        let far = external_energy(&[[40.0, 0.0, 0.0]], &v, &consts()).unwrap();
        assert!(near < -0.5);
        assert_eq!(far, 0.0);
    }

    #[test]
    fn slope_and_coercivity() {
        let modes = ModeSet::single(1.0, 0.1);
        let kappa = default_kappa(&modes).unwrap();
        let base = SlaterMollifierConfig { n_electrons: 1, a: 0.0, kappa, spacing: 3.0 };
        let photons = PhotonTrialState::equal_superposition(1);
        let v = ExternalPotential::GaussianWell { depth: 1.0, width: 1.0 };
        let a: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let scan = unboundedness_scan(&base, &a, &photons, &modes, &v, false, &consts()).unwrap();
        assert!(scan.tail_strictly_decreasing());
        assert!((scan.tail_slope - scan.expected_slope).abs() < 1e-8 * scan.expected_slope.abs());
        let with = unboundedness_scan(&base, &a, &photons, &modes, &v, true, &consts()).unwrap();
        assert!(with.tail_strictly_increasing());
        for e in &with.energies {
            assert!((e.total - e.parts_sum()).abs() < 1e-12);
        }
    }
}
