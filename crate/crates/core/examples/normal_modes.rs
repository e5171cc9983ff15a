//! Quadratic (harmonic-electron) limit: normal-mode frequencies with the
//! dipole self-energy reproduce √(ω² + ω_p²) plus a free centre-of-mass
//! direction. Without it the potential form has a negative direction, and
//! the field equations of motion pick up a residual.

use lwqed::hamiltonians::{Mode, ModeSet};
use lwqed::hilbert::PhysicalConstants;
use lwqed::quadratic::{assemble_quadratic, maxwell_eom_check, normal_modes, plasma_frequency};

fn main() -> lwqed::error::Result<()> {
    let c = PhysicalConstants::atomic();
    let single = ModeSet::single(1.0, 0.3);
    let n = 2;
    let wp2 = plasma_frequency(&single, n, &c, None)?[0].reduced_sq;
    let nm = normal_modes(&assemble_quadratic(&single, n, true, &c)?);
    println!("omega_p^2 = {wp2:.6}, predicted nu^2 = {:.12}", 1.0 + wp2);
    println!("nu^2 with dip: {:?}", nm.nu_squared);

    let bare = assemble_quadratic(&single, n, false, &c)?;
    println!("potential eigenvalues without dip: {:?}", bare.potential_eigenvalues());

    let two = ModeSet::new(vec![Mode::new(1.0, 0.1), Mode { omega: 2.5, lambda: 0.3, epsilon_sign: -1.0 }])?;
    for include_dip in [true, false] {
        let r = maxwell_eom_check(&two, n, include_dip, &c)?;
        println!(
            "include_dip {include_dip}: electric {:.2e}, displacement {:.2e}, current {:.2e}",
            r.electric_residual, r.displacement_residual, r.current_residual
        );
    }
    Ok(())
}
