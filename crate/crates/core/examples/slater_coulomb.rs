//! Electron-electron repulsion of a row of mollifier densities, from the
//! point-charge formula and from radial plus angular quadrature.

use lwqed::hilbert::PhysicalConstants;
use lwqed::variational::{coulomb_point_charge, coulomb_quadrature, SlaterMollifierConfig};

fn main() -> lwqed::error::Result<()> {
    let c = PhysicalConstants::atomic();
    for spacing in [2.0, 3.0, 5.0] {
        let s = SlaterMollifierConfig { n_electrons: 3, a: 1.0, kappa: [0.6, 0.8, 0.0], spacing };
        s.validate()?;
        let centers = s.centers();
        let point = coulomb_point_charge(&centers, &c);
        let quad = coulomb_quadrature(&centers, &c)?;
        println!("spacing {spacing}: point {point:.15}, quadrature {quad:.15}");
    }
    Ok(())
}
