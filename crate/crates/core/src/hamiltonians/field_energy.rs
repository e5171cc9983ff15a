//! Photon energy obtained by inserting uniform single-mode E and B fields
//! into ε₀/2 ∫(E² + c²B²), compared against ħω(a†a + ½).

use serde::Serialize;

use super::{coupling_prefactor, Mode};
use crate::error::Result;
use crate::hilbert::{ladder_operators, FockSpec, PhysicalConstants, SparseMatrix, C64};

/// Prefactor in front of (aa† + a†a − a² − a†²) in the commonly quoted energy
/// expression, in units of ħω.
pub const PRINTED_PREFACTOR_HBAR_OMEGA: f64 = 1.0;

#[derive(Clone, Debug)]
pub struct FieldEnergyDemo {
    /// Derived from the field operators, truncated at `n_max`.
    pub wrong_hp: SparseMatrix,
    pub correct_hp: SparseMatrix,
    /// The commonly quoted form with its stated prefactor.
    pub printed_hp: SparseMatrix,
    pub summary: FieldEnergySummary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldEnergySummary {
    pub vacuum_wrong: f64,
    pub vacuum_correct: f64,
    pub vacuum_printed: f64,
    /// Coefficient of a†a after normal ordering, from the truncated matrix.
    pub number_coefficient_derived: f64,
    pub number_coefficient_printed: f64,
    /// Derived prefactor of (aa† + a†a − a² − a†²), in units of ħω.
    pub prefactor_derived: f64,
    pub prefactor_printed: f64,
    /// Largest entry of wrong_hp outside the diagonal and the Δn = ±2 bands.
    pub off_band_max: f64,
    pub squeezing_max: f64,
    pub quantization_volume: f64,
}

/// Builds the three single-mode photon energies. The quantization volume is
/// taken from the mode set when given, otherwise inferred from λ.
pub fn dipole_field_energy_demo(
    mode: &Mode,
    quantization_volume: Option<f64>,
    n_max: usize,
    consts: &PhysicalConstants,
) -> Result<FieldEnergyDemo> {
    consts.validate()?;
    let fock = FockSpec::new(n_max)?;
    let ladder = ladder_operators(&fock)?;
    let dim = fock.dim();
    let w = mode.omega;
    let volume = match quantization_volume {
        Some(v) => v,
        None => {
            // λ = √ω e C/c with C = (ħc²/ε₀L³)^½
            let c_pref = mode.implied_prefactor(consts);
            consts.hbar * consts.c * consts.c / (consts.eps0 * c_pref * c_pref)
        }
    };
    let c_pref = coupling_prefactor(volume, consts);

    let a_minus_adag = ladder.lower.sub(&ladder.raise)?;
    let i = C64::new(0.0, 1.0);
    let e_field = a_minus_adag.scale(i * c_pref / consts.c * (w / 2.0).sqrt());
    let k = w / consts.c;
    let b_field = a_minus_adag.scale(i * c_pref / consts.c * k / (2.0 * w).sqrt());
    let energy_density = e_field
        .mul(&e_field)?
        .add(&b_field.mul(&b_field)?.scale_real(consts.c * consts.c))?;
    let wrong_hp = energy_density.scale_real(consts.eps0 * volume / 2.0);

    let hw = consts.hbar * w;
    let correct_hp = SparseMatrix::from_real_diagonal(&(0..dim).map(|n| hw * (n as f64 + 0.5)).collect::<Vec<_>>());

    let aad = ladder.lower.mul(&ladder.raise)?;
    let ada = ladder.raise.mul(&ladder.lower)?;
    let a2 = ladder.lower.mul(&ladder.lower)?;
    let ad2 = ladder.raise.mul(&ladder.raise)?;
    let printed_hp = aad
        .add(&ada)?
        .sub(&a2)?
        .sub(&ad2)?
        .scale_real(PRINTED_PREFACTOR_HBAR_OMEGA * hw);

    let mut off_band_max = 0.0f64;
    let mut squeezing_max = 0.0f64;
    for (r, c, v) in wrong_hp.triplets() {
        match r.abs_diff(c) {
            0 => {}
            2 => squeezing_max = squeezing_max.max(v.norm()),
            _ => off_band_max = off_band_max.max(v.norm()),
        }
    }
    // (aa† + a†a) has diagonal 2n + 1, so the n = 0 → 1 step is twice the prefactor;
    // the last Fock level is skipped because truncation corrupts it.
    let step = wrong_hp.get(1, 1).re - wrong_hp.get(0, 0).re;
    let prefactor_derived = step / (2.0 * hw);
    let summary = FieldEnergySummary {
        vacuum_wrong: wrong_hp.get(0, 0).re,
        vacuum_correct: correct_hp.get(0, 0).re,
        vacuum_printed: printed_hp.get(0, 0).re,
        number_coefficient_derived: step,
        number_coefficient_printed: 2.0 * PRINTED_PREFACTOR_HBAR_OMEGA * hw,
        prefactor_derived,
        prefactor_printed: PRINTED_PREFACTOR_HBAR_OMEGA,
        off_band_max,
        squeezing_max,
        quantization_volume: volume,
    };
    Ok(FieldEnergyDemo {
        wrong_hp,
        correct_hp,
        printed_hp,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_squeezing_terms_off_diagonal() {
        let demo = dipole_field_energy_demo(&Mode::new(0.8, 0.05), None, 12, &PhysicalConstants::atomic()).unwrap();
        let s = &demo.summary;
        assert!(s.off_band_max < 1e-12 * s.squeezing_max);
        assert!(s.squeezing_max > 0.0);
        assert!(demo.wrong_hp.hermiticity_defect().is_none());
    }

    #[test]
    fn derived_prefactor_is_half() {
        let c = PhysicalConstants::atomic();
        let demo = dipole_field_energy_demo(&Mode::new(1.3, 0.0), Some(1e6), 8, &c).unwrap();
        assert!((demo.summary.prefactor_derived - 0.5).abs() < 1e-12);
        assert!((demo.summary.vacuum_wrong - 0.65).abs() < 1e-12);
        // ⟨1|wrong|1⟩ − ⟨1|correct|1⟩ = 0 and ⟨0|·|2⟩ carries the squeezing
        assert!((demo.wrong_hp.get(0, 2).re + 0.65 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn printed_vacuum_differs_from_zero_point() {
        let demo = dipole_field_energy_demo(&Mode::new(1.0, 0.1), None, 6, &PhysicalConstants::atomic()).unwrap();
        assert!((demo.summary.vacuum_printed - demo.summary.vacuum_correct).abs() > 0.1);
    }
}
