//! Photon energy of one mode built from the dipole-limit E and B operators,
//! compared with the normal-ordered form and the printed expression.

use lwqed::hamiltonians::{dipole_field_energy_demo, Mode};
use lwqed::hilbert::PhysicalConstants;

fn main() -> lwqed::error::Result<()> {
    let c = PhysicalConstants::atomic();
    let demo = dipole_field_energy_demo(&Mode::new(1.0, 0.05), None, 12, &c)?;
    let s = &demo.summary;
    println!("vacuum: derived {:.6}, correct {:.6}, printed {:.6}", s.vacuum_wrong, s.vacuum_correct, s.vacuum_printed);
    println!("prefactor / hbar omega: derived {:.6}, printed {:.6}", s.prefactor_derived, s.prefactor_printed);
    println!("largest squeezing entry {:.4}, off-band {:.1e}", s.squeezing_max, s.off_band_max);
    Ok(())
}
