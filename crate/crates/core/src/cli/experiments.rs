//! The named experiments behind `lwqed run`. Each one turns a config into a
//! `ResultTable` whose verdict states whether the expected physics appeared.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::table::{Cell, ResultTable};
use crate::error::{Error, Result};
use crate::hamiltonians::{
    build_dicke, build_jaynes_cummings, build_length_gauge, build_rabi, build_velocity_gauge,
    dicke_excitation_number, dipole_field_energy_demo, jc_excitation_number, polaritonic_translation,
    two_level_reduction, ExternalPotential, ModeSet,
};
use crate::hilbert::{
    grid_position, inner, ladder_operators, lattice_translation, tensor_embed, Boundary, CompositeBasis, FockSpec,
    GridSpec, HermitianOperator, SparseMatrix, C64,
};
use crate::quadratic::{assemble_quadratic, maxwell_eom_check, normal_modes, plasma_frequency};
use crate::semiclassical::{build_fixed_displacement, build_standard_semiclassical, stark_scan};
use crate::spectra::{box_growth_scan, lowest_eigenpairs, lowest_eigenvalues, EigenRequest, Verdict};
use crate::variational::{
    default_kappa, unboundedness_scan, PhotonTrialState,
    SlaterMollifierConfig,
};

/// Runs the experiment named in the config and returns its table with the
/// run metadata attached. Nothing is written to disk.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let diags = cfg.diagnostics();
    if let Some(d) = diags.first() {
        return Err(Error::Config(d.to_string()));
    }
    let mut table = match cfg.experiment.name.as_str() {
        "gauge-equivalence" => gauge_equivalence(cfg)?,
        "unboundedness-scan" => unboundedness(cfg)?,
        "slater-scan" => slater(cfg)?,
        "depolarization" => depolarization(cfg)?,
        "maxwell-eom" => maxwell(cfg)?,
        "box-instability" => box_instability(cfg)?,
        "model-zoo" => model_zoo(cfg)?,
        "stark" => stark(cfg)?,
        "field-energy-demo" => field_energy(cfg)?,
        "translation-check" => translation(cfg)?,
        other => return Err(Error::Config(format!("unknown experiment '{other}'"))),
    };
    let mut meta = vec![
        ("lwqed".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("experiment".to_string(), cfg.experiment.name.clone()),
        ("seed".to_string(), cfg.experiment.seed.to_string()),
    ];
    let rendered = toml::to_string(cfg).map_err(|e| Error::Invariant(format!("config does not serialize: {e}")))?;
    meta.push(("config".to_string(), rendered.trim_end().to_string()));
    meta.append(&mut table.metadata);
    table.metadata = meta;
    Ok(table)
}

/// `run_experiment` followed by a write to the configured output path, with
/// a `timestamp` metadata entry (seconds since the Unix epoch).
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = run_experiment(cfg)?;
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    table.metadata.insert(1, ("timestamp".into(), stamp.to_string()));
    table.write_file(&cfg.output_path())?;
    Ok(table)
}

fn modes_of(cfg: &ExperimentConfig) -> Result<ModeSet> {
    let modes = cfg.mode_set();
    modes.validate(&cfg.constants)?;
    Ok(modes)
}

fn any_coupling(modes: &ModeSet) -> bool {
    modes.modes.iter().any(|m| m.lambda != 0.0)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn gauge_equivalence(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let modes = modes_of(cfg)?;
    let grid = cfg.grid.build()?;
    let consts = &cfg.constants;
    let n_max = if cfg.scan.n_max.is_empty() { vec![4, 8, 16] } else { cfg.scan.n_max.clone() };
    let k = cfg.scan.k;
    let solve_tol = (cfg.scan.tol * 1e-2).max(1e-11);
    let spectra: Vec<(Vec<f64>, Vec<f64>)> = n_max
        .par_iter()
        .map(|&n| {
            let basis = CompositeBasis::uniform(grid.clone(), n, modes.len())?;
            let hl = build_length_gauge(&basis, &modes, &cfg.potential, true, consts)?;
            let hv = build_velocity_gauge(&basis, &modes, &cfg.potential, false, consts)?;
            let solve = |op: &HermitianOperator| -> Result<Vec<f64>> {
                Ok(lowest_eigenpairs(&EigenRequest::new(op, k).tol(solve_tol).seed(cfg.experiment.seed))?.values)
            };
            Ok((solve(&hl)?, solve(&hv)?))
        })
        .collect::<Result<_>>()?;

    let mut t = ResultTable::new(["n_max", "level", "e_length", "e_velocity", "abs_diff"]);
    for (n, (el, ev)) in n_max.iter().zip(&spectra) {
        for i in 0..k {
            t.push(vec![(*n).into(), i.into(), el[i].into(), ev[i].into(), (el[i] - ev[i]).abs().into()])?;
        }
    }
    let gaps: Vec<f64> = spectra.iter().map(|(a, b)| max_abs_diff(a, b)).collect();
    let last = spectra.len() - 1;
    let moved = |pick: fn(&(Vec<f64>, Vec<f64>)) -> &Vec<f64>| {
        if last == 0 {
            f64::INFINITY
        } else {
            max_abs_diff(pick(&spectra[last]), pick(&spectra[last - 1]))
        }
    };
    let length_change = moved(|s| &s.0);
    let velocity_change = moved(|s| &s.1);
    let converged = length_change < cfg.scan.tol && velocity_change < cfg.scan.tol;
    let agree = gaps[last] < cfg.scan.tol;
    t.note("final_max_gap", gaps[last]);
    t.note("length_last_change", length_change);
    t.note("velocity_last_change", velocity_change);
    t.note("gap_shrinks_monotonically", gaps.windows(2).all(|w| w[1] <= w[0]));
    t.verdict = Some(converged && agree);
    Ok(t)
}

fn scan_offsets(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.scan.values.is_empty() {
        (0..=10).map(|i| 5.0 * i as f64).collect()
    } else {
        cfg.scan.values.clone()
    }
}

fn base_slater(cfg: &ExperimentConfig, modes: &ModeSet, n_electrons: usize) -> Result<SlaterMollifierConfig> {
    let kappa = if any_coupling(modes) { default_kappa(modes)? } else { [1.0, 0.0, 0.0] };
    Ok(SlaterMollifierConfig {
        n_electrons,
        a: 0.0,
        kappa,
        spacing: cfg.scan.spacing,
    })
}

fn unboundedness(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let modes = modes_of(cfg)?;
    let a_values = scan_offsets(cfg);
    let base = base_slater(cfg, &modes, cfg.scan.n_electrons)?;
    let photons = PhotonTrialState::equal_superposition(modes.len());
    let include_dip = cfg.flags.include_dip;
    let scan = unboundedness_scan(&base, &a_values, &photons, &modes, &cfg.potential, include_dip, &cfg.constants)?;

    let mut t = ResultTable::new([
        "a", "kinetic", "photon", "potential", "coulomb", "bilinear", "dipole_self_energy", "total",
    ]);
    for (a, e) in scan.a_values.iter().zip(&scan.energies) {
        t.push(vec![
            (*a).into(),
            e.kinetic.into(),
            e.photon.into(),
            e.potential.into(),
            e.coulomb.into(),
            e.bilinear.into(),
            e.dipole_self_energy.unwrap_or(0.0).into(),
            e.total.into(),
        ])?;
    }
    let totals = scan.totals();
    t.note("tail_start_a", scan.a_values[scan.tail_start]);
    t.note("tail_slope", scan.tail_slope);
    t.note("expected_slope", scan.expected_slope);
    let pass = if include_dip {
        let imin = totals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        t.note("minimum_at_a", scan.a_values[imin]);
        imin + 1 < totals.len() && totals[totals.len() - 1] > totals[0]
    } else if any_coupling(&modes) {
        let rel = (scan.tail_slope - scan.expected_slope).abs() / scan.expected_slope.abs();
        t.note("slope_relative_error", rel);
        rel <= 1e-8 && scan.tail_strictly_decreasing()
    } else {
        let spread = max_abs_diff(&totals[scan.tail_start..], &vec![totals[scan.tail_start]; totals.len() - scan.tail_start]);
        t.note("tail_spread", spread);
        spread <= 1e-10
    };
    t.verdict = Some(pass);
    Ok(t)
}

fn slater(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let modes = modes_of(cfg)?;
    let a_values = scan_offsets(cfg);
    let n = if cfg.scan.n_electrons > 1 { cfg.scan.n_electrons } else { 3 };
    let photons = PhotonTrialState::equal_superposition(modes.len());
    let consts = &cfg.constants;
    let single = unboundedness_scan(
        &base_slater(cfg, &modes, 1)?,
        &a_values,
        &photons,
        &modes,
        &cfg.potential,
        false,
        consts,
    )?;
    let base = base_slater(cfg, &modes, n)?;
    base.validate()?;
    let many = unboundedness_scan(&base, &a_values, &photons, &modes, &cfg.potential, false, consts)?;

    let mut t = ResultTable::new([
        "a", "total_single", "total_slater", "coulomb_point", "coulomb_quadrature", "coulomb_relative_diff",
    ]);
    let mut worst = 0.0f64;
    for ((a, e1), en) in a_values.iter().zip(&single.energies).zip(&many.energies) {
        let rel = (en.coulomb - en.coulomb_quadrature).abs() / en.coulomb.abs();
        worst = worst.max(rel);
        t.push(vec![
            (*a).into(),
            e1.total.into(),
            en.total.into(),
            en.coulomb.into(),
            en.coulomb_quadrature.into(),
            rel.into(),
        ])?;
    }
    t.note("n_electrons", n);
    t.note("slope_single", single.tail_slope);
    t.note("slope_slater", many.tail_slope);
    let ratio_ok = if any_coupling(&modes) {
        let ratio = many.tail_slope / single.tail_slope;
        t.note("slope_ratio", ratio);
        (ratio - n as f64).abs() <= 1e-8 * n as f64
    } else {
        many.tail_slope.abs() <= 1e-10
    };
    t.note("coulomb_max_relative_diff", worst);
    t.verdict = Some(ratio_ok && worst <= 1e-6);
    Ok(t)
}

/// Eigenvalues of ω_α²δ_αβ + ω_p,α ω_p,β, the squared photon-like frequencies
/// of free electrons coupled to several modes.
fn depolarized_frequencies(omegas: &[f64], omega_p: &[f64]) -> Vec<f64> {
    let m = omegas.len();
    let w = DMatrix::from_fn(m, m, |a, b| {
        omega_p[a] * omega_p[b] + if a == b { omegas[a] * omegas[a] } else { 0.0 }
    });
    let mut v: Vec<f64> = SymmetricEigen::new(w).eigenvalues.iter().map(|x| x.max(0.0).sqrt()).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Excitation gap of the photon-like mode on a periodic grid: the energy of
/// u|0⟩ above the ground state, u = p − λx/(ħω) being the mode displacement
/// measured from the electron.
fn grid_polariton_gap(cfg: &ExperimentConfig, modes: &ModeSet) -> Result<f64> {
    let consts = &cfg.constants;
    let half = cfg.grid.half_width;
    let n = (2.0 * half / cfg.grid.spacing).round() as usize;
    let grid = GridSpec::new(-half, half, n, Boundary::Periodic, cfg.grid.stencil_order)?;
    let basis = CompositeBasis::uniform(grid.clone(), cfg.fock.n_max, 1)?;
    let h = build_length_gauge(&basis, modes, &ExternalPotential::Zero, true, consts)?;
    let mode = &modes.modes[0];
    let g = mode.coupling() / (consts.hbar * mode.omega);
    // start from a wall-avoiding envelope times the photon vacuum displaced to
    // ⟨p⟩ = g x; the crowded free-electron ladder otherwise slows the solver
    let mut guess = Vec::with_capacity(basis.dim());
    for x in grid.positions() {
        let envelope = (std::f64::consts::PI * x / (2.0 * half)).cos();
        let alpha = g * x / std::f64::consts::SQRT_2;
        let mut c = (-0.5 * alpha * alpha).exp();
        for n in 0..=cfg.fock.n_max {
            if n > 0 {
                c *= alpha / (n as f64).sqrt();
            }
            guess.push(C64::new(envelope * c, 0.0));
        }
    }
    let pairs = lowest_eigenpairs(
        &EigenRequest::new(&h, 1)
            .tol(1e-9)
            .seed(cfg.experiment.seed)
            .initial(vec![guess]),
    )?;
    let dims = basis.dims();
    let x = tensor_embed(&grid_position(&grid), 0, &dims)?;
    let p = tensor_embed(&ladder_operators(&basis.focks[0])?.coordinate(), 1, &dims)?;
    let u = p.sub(&x.scale_real(g))?;
    let upsi = u.mul_vec(&pairs.vectors[0]);
    let hu = h.matrix().mul_vec(&upsi);
    Ok(inner(&upsi, &hu).re / inner(&upsi, &upsi).re - pairs.values[0])
}

fn depolarization(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let base = modes_of(cfg)?;
    let consts = &cfg.constants;
    let n_el = cfg.scan.n_electrons;
    let scales = if cfg.scan.values.is_empty() { vec![1.0] } else { cfg.scan.values.clone() };
    let run_ed = cfg.flags.exact_diagonalization;
    if run_ed && (base.len() != 1 || n_el != 1) {
        return Err(Error::Config(
            "grid diagonalization supports one mode and one electron".into(),
        ));
    }
    struct Row {
        scale: f64,
        predicted: Vec<f64>,
        normal: Vec<f64>,
        omega_p_sq: Vec<f64>,
        gap: Option<f64>,
    }
    let rows: Vec<Row> = scales
        .par_iter()
        .map(|&s| {
            let modes = base.with_couplings_scaled(s);
            let wp: Vec<f64> = plasma_frequency(&modes, n_el, consts, None)?
                .iter()
                .map(|p| p.reduced_sq)
                .collect();
            let omegas: Vec<f64> = modes.modes.iter().map(|m| m.omega).collect();
            let predicted =
                depolarized_frequencies(&omegas, &wp.iter().map(|x| x.sqrt()).collect::<Vec<_>>());
            let nm = normal_modes(&assemble_quadratic(&modes, n_el, true, consts)?);
            // the lowest frequency is the free centre-of-mass direction
            let normal = nm.frequencies[1..].to_vec();
            let gap = if run_ed { Some(grid_polariton_gap(cfg, &modes)?) } else { None };
            Ok(Row {
                scale: s,
                predicted,
                normal,
                omega_p_sq: wp,
                gap,
            })
        })
        .collect::<Result<_>>()?;

    let mut t = ResultTable::new([
        "scale", "branch", "omega_p_sq", "predicted", "normal_mode", "normal_relative_error_sq", "zero_mode",
        "grid_gap", "grid_relative_error",
    ]);
    let mut worst_nm = 0.0f64;
    let mut worst_ed = 0.0f64;
    for (row, scale) in rows.iter().zip(&scales) {
        let modes = base.with_couplings_scaled(*scale);
        let zero_sq = normal_modes(&assemble_quadratic(&modes, n_el, true, consts)?).nu_squared[0];
        let zero = zero_sq.abs().sqrt();
        for (b, (&pred, &nu)) in row.predicted.iter().zip(&row.normal).enumerate() {
            // compared as squares, where the free direction is zero to rounding
            let rel = (nu * nu - pred * pred).abs() / (pred * pred);
            worst_nm = worst_nm.max(rel).max(zero_sq.abs() / (pred * pred));
            let (gap, gap_rel): (Cell, Cell) = match (b, row.gap) {
                (0, Some(g)) => {
                    let rel = (consts.hbar * g - consts.hbar * pred).abs() / (consts.hbar * pred);
                    worst_ed = worst_ed.max(rel);
                    (g.into(), rel.into())
                }
                _ => ("".into(), "".into()),
            };
            let wp_col: Cell = row.omega_p_sq.get(b).copied().map_or("".into(), Cell::from);
            t.push(vec![
                row.scale.into(),
                b.into(),
                wp_col,
                pred.into(),
                nu.into(),
                rel.into(),
                zero.into(),
                gap,
                gap_rel,
            ])?;
        }
    }
    t.note("normal_mode_max_relative_error", worst_nm);
    let mut pass = worst_nm <= 1e-12;
    if run_ed {
        t.note("grid_max_relative_error", worst_ed);
        pass &= worst_ed <= 1e-3;
    }
    t.verdict = Some(pass);
    Ok(t)
}

fn maxwell(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let modes = modes_of(cfg)?;
    let n = cfg.scan.n_electrons;
    let with = maxwell_eom_check(&modes, n, true, &cfg.constants)?;
    let without = maxwell_eom_check(&modes, n, false, &cfg.constants)?;
    let mut t = ResultTable::new([
        "include_dip", "mode", "current_equation", "electric_equation", "displacement_equation", "constitutive",
        "dressed_frequency_sq",
    ]);
    for rep in [&with, &without] {
        for r in &rep.per_mode {
            t.push(vec![
                rep.include_dip.to_string().into(),
                r.mode.into(),
                r.current_equation.into(),
                r.electric_equation.into(),
                r.displacement_equation.into(),
                r.constitutive.into(),
                r.dressed_frequency_sq.into(),
            ])?;
        }
    }
    let wp = plasma_frequency(&modes, n, &cfg.constants, None)?;
    let floor = 1e-3
        * wp.iter()
            .zip(&modes.modes)
            .map(|(p, m)| p.reduced_sq / (m.omega * m.omega + p.reduced_sq))
            .fold(0.0, f64::max);
    t.note("electric_with_dip", with.electric_residual);
    t.note("electric_without_dip", without.electric_residual);
    t.note("displacement_without_dip", without.displacement_residual);
    t.note("electric_floor", floor);
    let mut pass = with.electric_residual <= 1e-12
        && without.displacement_residual <= 1e-12
        && with.current_residual <= 1e-12
        && without.current_residual <= 1e-12
        && with.constitutive_residual <= 1e-12;
    if any_coupling(&modes) {
        pass &= without.electric_residual >= floor;
    }
    t.verdict = Some(pass);
    Ok(t)
}

fn box_lengths(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.scan.values.is_empty() {
        vec![10.0, 20.0, 40.0, 80.0]
    } else {
        cfg.scan.values.clone()
    }
}

fn box_instability(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let modes = modes_of(cfg)?;
    let consts = &cfg.constants;
    let lengths = box_lengths(cfg);
    let tol = cfg.scan.tol;
    let grid_at = |l: f64| -> Result<GridSpec> {
        let g = cfg.grid.build_with_half_width(l / 2.0)?;
        if g.boundary != Boundary::Dirichlet {
            return Err(Error::Config("box-instability needs a dirichlet grid".into()));
        }
        Ok(g)
    };
    let quantum = |dip: bool| {
        box_growth_scan(
            |l| {
                let g = grid_at(l)?;
                let b = CompositeBasis::uniform(g.clone(), cfg.fock.n_max, modes.len())?;
                Ok((g, build_length_gauge(&b, &modes, &cfg.potential, dip, consts)?))
            },
            &lengths,
            1,
            tol,
        )
    };
    let classical = |fixed: bool| {
        box_growth_scan(
            |l| {
                let g = grid_at(l)?;
                let h = if fixed {
                    build_fixed_displacement(&g, &cfg.potential, &modes, &vec![0.0; modes.len()], consts)?
                } else {
                    build_standard_semiclassical(&g, &cfg.potential, cfg.scan.field, consts)?
                };
                Ok((g, h))
            },
            &lengths,
            1,
            tol,
        )
    };
    let reports = [
        ("length_without_dip", quantum(false)?, any_coupling(&modes)),
        ("length_with_dip", quantum(true)?, false),
        ("semiclassical", classical(false)?, cfg.scan.field != 0.0),
        ("fixed_displacement", classical(true)?, false),
    ];

    let mut t = ResultTable::new(["model", "box_length", "ground_energy", "decrement", "centroid", "edge_distance", "verdict"]);
    let mut all = true;
    for (name, rep, unstable) in &reports {
        let last = lengths.len() - 1;
        let edge_localized = rep.edge_distances[last] < 0.1 * lengths[last] / 2.0;
        let ok = if *unstable {
            rep.verdict == Verdict::Diverging && edge_localized
        } else {
            rep.verdict == Verdict::Converged
        };
        all &= ok;
        let dec = rep.decrements();
        for (i, l) in lengths.iter().enumerate() {
            let d: Cell = if i == 0 { "".into() } else { dec[i - 1].into() };
            t.push(vec![
                (*name).into(),
                (*l).into(),
                rep.ground()[i].into(),
                d,
                rep.centroids[i].into(),
                rep.edge_distances[i].into(),
                ok.into(),
            ])?;
        }
        t.note(format!("{name}_expected"), if *unstable { "diverging" } else { "converged" });
        t.note(format!("{name}_observed"), rep.verdict);
    }
    t.verdict = Some(all);
    Ok(t)
}

fn model_zoo(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let modes = modes_of(cfg)?;
    let mode = &modes.modes[0];
    let consts = &cfg.constants;
    let n_max = cfg.fock.n_max;
    let grid = cfg.grid.build()?;
    let red = two_level_reduction(&grid, &cfg.potential, mode, consts)?;

    let dense = |op: &HermitianOperator| lowest_eigenvalues(op, op.dim(), 1e-12);
    let rabi = dense(&build_rabi(&red, mode, false, n_max, consts)?)?;
    let shifted = dense(&build_rabi(&red, mode, true, n_max, consts)?)?;
    let offset_defect = rabi
        .iter()
        .zip(&shifted)
        .map(|(a, b)| (b - a - red.g_offset).abs())
        .fold(0.0, f64::max);

    let jc = build_jaynes_cummings(&red, mode, n_max, consts)?;
    let jc_comm = jc.matrix().commutator(&jc_excitation_number(n_max)?)?.max_abs();
    let dicke1 = build_dicke(&red, mode, 1, n_max, consts)?;
    let dicke_vs_jc = dicke1.matrix().sub(jc.matrix())?.max_abs();
    let n_atoms = cfg.scan.n_atoms.max(2);
    let dicke = build_dicke(&red, mode, n_atoms, n_max, consts)?;
    let dicke_comm = dicke.matrix().commutator(&dicke_excitation_number(n_atoms, n_max)?)?.max_abs();

    let mut t = ResultTable::new(["check", "value", "tolerance", "verdict"]);
    let checks: [(&str, f64, f64); 4] = [
        ("rabi_offset_spectrum_shift", offset_defect, 1e-12),
        ("jc_excitation_commutator", jc_comm, 1e-14),
        ("dicke_single_atom_vs_jc", dicke_vs_jc, 0.0),
        ("dicke_excitation_commutator", dicke_comm, 1e-14),
    ];
    let mut all = true;
    for (name, value, tol) in checks {
        let ok = value <= tol;
        all &= ok;
        t.push(vec![name.into(), value.into(), tol.into(), ok.into()])?;
    }
    t.note("e_g", red.e_g);
    t.note("e_e", red.e_e);
    t.note("d_ge", red.d_ge);
    t.note("omega_r", red.omega_r);
    t.note("omega_r_from_prefactor", red.omega_r_from_prefactor);
    t.note("g_offset", red.g_offset);
    t.note("parity_defect", red.parity_defect);
    t.note("dicke_atoms", n_atoms);
    t.verdict = Some(all);
    Ok(t)
}

fn stark(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let modes = modes_of(cfg)?;
    let grid = cfg.grid.build()?;
    let consts = &cfg.constants;
    let fields = if cfg.scan.values.is_empty() {
        vec![-0.004, -0.002, -0.001, 0.0, 0.001, 0.002, 0.004]
    } else {
        cfg.scan.values.clone()
    };
    let r = stark_scan(&grid, &cfg.potential, &modes, &fields, &cfg.scf, consts)?;
    let mut t = ResultTable::new(["field", "energy_shift", "dipole", "iterations", "status"]);
    for p in &r.points {
        let (e, d, it): (Cell, Cell, Cell) = match (p.energy, p.dipole, p.iterations) {
            (Some(e), Some(d), Some(i)) => ((e - r.e0).into(), d.into(), i.into()),
            _ => ("".into(), "".into(), "".into()),
        };
        let status = p.failure.clone().unwrap_or_else(|| "converged".into());
        t.push(vec![p.field.into(), e, d, it, status.into()])?;
    }
    t.note("e0", r.e0);
    t.note("alpha_fit", r.alpha_fit);
    t.note("alpha_dipole", r.alpha_dipole);
    t.note("alpha_sum_over_states_fixed_displacement", r.alpha_pt.fixed_displacement);
    t.note("alpha_sum_over_states", r.alpha_pt.self_consistent);
    t.note("relative_agreement", r.relative_agreement);
    t.note("parity_defect", r.parity_defect);
    t.note("failed_points", r.failures());
    let mut pass = r.failures() == 0 && r.relative_agreement <= 1e-2;
    if let ExternalPotential::Harmonic { omega } = cfg.potential {
        let closed = consts.e * consts.e / (consts.m * omega * omega);
        let rel = (r.alpha_fit - closed).abs() / closed;
        t.note("alpha_closed_form", closed);
        t.note("closed_form_relative_error", rel);
        pass &= rel <= 1e-6;
    }
    t.verdict = Some(pass);
    Ok(t)
}

fn field_energy(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let modes = modes_of(cfg)?;
    let consts = &cfg.constants;
    let mode = &modes.modes[0];
    let demo = dipole_field_energy_demo(mode, cfg.field.quantization_volume, cfg.fock.n_max, consts)?;
    let s = &demo.summary;
    let hw = consts.hbar * mode.omega;
    let mut t = ResultTable::new(["quantity", "derived", "printed", "correct"]);
    t.push(vec!["vacuum_energy".into(), s.vacuum_wrong.into(), s.vacuum_printed.into(), s.vacuum_correct.into()])?;
    t.push(vec![
        "number_coefficient".into(),
        s.number_coefficient_derived.into(),
        s.number_coefficient_printed.into(),
        hw.into(),
    ])?;
    t.push(vec![
        "prefactor_over_hbar_omega".into(),
        s.prefactor_derived.into(),
        s.prefactor_printed.into(),
        "".into(),
    ])?;
    t.push(vec!["squeezing_max".into(), s.squeezing_max.into(), "".into(), 0.0.into()])?;
    t.push(vec!["off_band_max".into(), s.off_band_max.into(), "".into(), 0.0.into()])?;
    t.note("quantization_volume", s.quantization_volume);
    t.note(
        "discrepancy",
        format!(
            "field energy from dipole-limit E and B has prefactor {} hbar*omega (printed {}), vacuum {} vs hbar*omega/2 = {}",
            s.prefactor_derived,
            s.prefactor_printed,
            s.vacuum_wrong,
            0.5 * hw
        ),
    );
    // the derived operator keeps the vacuum at ħω/2 but is not diagonal in n;
    // the printed prefactor moves the vacuum as well
    t.note("derived_vacuum_matches_half_hbar_omega", (s.vacuum_wrong - 0.5 * hw).abs() <= 1e-12);
    t.verdict = Some(
        s.squeezing_max > 1e-12 && (s.vacuum_printed - 0.5 * hw).abs() > 1e-12 && s.off_band_max <= 1e-12,
    );
    Ok(t)
}

fn translation(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let modes = modes_of(cfg)?;
    let consts = &cfg.constants;
    let half = cfg.grid.half_width;
    let n = (2.0 * half / cfg.grid.spacing).round() as usize;
    let grid = GridSpec::new(-half, half, n, Boundary::Periodic, cfg.grid.stencil_order)?;
    let basis = CompositeBasis::uniform(grid.clone(), cfg.fock.n_max, modes.len())?;
    let sites = cfg.scan.shift_sites;
    let shift = sites as f64 * grid.spacing();
    // (Tψ)(x) = ψ(x + shift): states move by −shift, so the potential does too
    let moved: Vec<f64> = grid
        .positions()
        .iter()
        .map(|x| cfg.potential.radial((x + shift).abs(), consts))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Config("translation-check needs an analytic potential".into()))?;
    let moved = ExternalPotential::Tabulated { values: moved };

    let polaritonic = polaritonic_translation(&basis, &modes, shift, 1, consts)?;
    let photon_identity = basis
        .focks
        .iter()
        .fold(SparseMatrix::identity(1), |acc, f: &FockSpec| acc.kron(&SparseMatrix::identity(f.dim())));
    let electronic = lattice_translation(&grid, sites)?.kron(&photon_identity);

    let mut t = ResultTable::new(["include_dip", "translation", "level", "energy", "residual"]);
    let mut worst = std::collections::BTreeMap::new();
    for dip in [true, false] {
        let h0 = build_length_gauge(&basis, &modes, &cfg.potential, dip, consts)?;
        let h1 = build_length_gauge(&basis, &modes, &moved, dip, consts)?;
        let pairs = lowest_eigenpairs(&EigenRequest::new(&h0, cfg.scan.k).tol(1e-10).seed(cfg.experiment.seed))?;
        for (name, op) in [("polaritonic", &polaritonic), ("electronic", &electronic)] {
            let mut w = 0.0f64;
            for (i, e) in pairs.values.iter().enumerate() {
                let tv = op.mul_vec(&pairs.vectors[i]);
                let hv = h1.matrix().mul_vec(&tv);
                let r = hv.iter().zip(&tv).map(|(a, b)| (a - b * *e).norm_sqr()).sum::<f64>().sqrt()
                    / inner(&tv, &tv).re.sqrt();
                w = w.max(r);
                t.push(vec![dip.to_string().into(), name.into(), i.into(), (*e).into(), r.into()])?;
            }
            worst.insert((dip, name), w);
            t.note(format!("{name}_{}_max_residual", if dip { "with_dip" } else { "without_dip" }), w);
        }
    }
    let tol = cfg.scan.tol;
    let mut pass = worst[&(true, "polaritonic")] <= tol;
    if any_coupling(&modes) {
        pass &= worst[&(true, "electronic")] > tol && worst[&(false, "polaritonic")] > tol;
    }
    t.verdict = Some(pass);
    Ok(t)
}
