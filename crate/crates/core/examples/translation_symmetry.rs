//! On a periodic grid, the polaritonic translation maps eigenstates of the
//! length-gauge Hamiltonian with potential V(x) onto eigenstates of the one
//! with V(x + shift). The residual is small only with the dipole self-energy.

use lwqed::hamiltonians::{build_length_gauge, polaritonic_translation, ExternalPotential, ModeSet};
use lwqed::hilbert::{Boundary, CompositeBasis, GridSpec, PhysicalConstants, StateVector};
use lwqed::spectra::{lowest_eigenpairs, EigenRequest};

fn main() -> lwqed::error::Result<()> {
    let c = PhysicalConstants::atomic();
    let modes = ModeSet::single(1.0, 0.2);
    let h = 0.1;
    let grid = GridSpec::new(-15.0, 15.0, 300, Boundary::Periodic, 4)?;
    let basis = CompositeBasis::uniform(grid.clone(), 20, 1)?;
    let shift = 10.0 * h;
    let v = ExternalPotential::Harmonic { omega: 1.0 };
    let moved = ExternalPotential::Tabulated {
        values: grid.positions().iter().map(|x| 0.5 * (x + shift) * (x + shift)).collect(),
    };
    let t = polaritonic_translation(&basis, &modes, shift, 1, &c)?;

    for include_dip in [true, false] {
        let h0 = build_length_gauge(&basis, &modes, &v, include_dip, &c)?;
        let h1 = build_length_gauge(&basis, &modes, &moved, include_dip, &c)?;
        let pairs = lowest_eigenpairs(&EigenRequest::new(&h0, 1).tol(1e-10))?;
        let psi: StateVector = pairs.state(0, &basis.dims());
        let moved_psi = StateVector::new(basis.dims(), t.mul_vec(&psi.amplitudes))?;
        let e = h1.expectation(&moved_psi);
        let hpsi = h1.matrix().mul_vec(&moved_psi.amplitudes);
        let residual: f64 = hpsi
            .iter()
            .zip(&moved_psi.amplitudes)
            .map(|(a, b)| (a - b * e).norm_sqr())
            .sum::<f64>()
            .sqrt();
        println!("include_dip {include_dip}: E0 {:.8}, translated residual {residual:.2e}", pairs.values[0]);
    }
    Ok(())
}
