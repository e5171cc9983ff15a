//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line with
//! its measured runtime; the test fails if any line is FAIL.

use std::path::Path;
use std::time::{Duration, Instant};

use lwqed::cli::{parse_config, run_experiment, ExperimentConfig, ResultTable};
use lwqed::hamiltonians::{ExternalPotential, Mode, ModeSet};
use lwqed::hilbert::{GridSpec, PhysicalConstants};
use lwqed::quadratic::{assemble_quadratic, maxwell_eom_check, normal_modes, plasma_frequency};
use lwqed::semiclassical::{stark_scan, ScfConfig};
use lwqed::variational::{
    coulomb_point_charge, coulomb_quadrature, default_kappa, unboundedness_scan, PhotonTrialState,
    SlaterMollifierConfig,
};

fn consts() -> PhysicalConstants {
    PhysicalConstants::atomic()
}

fn shipped(name: &str, overrides: &[&str]) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.toml"));
    let text = std::fs::read_to_string(path).unwrap();
    let over: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    parse_config(&text, &over).unwrap().unwrap()
}

fn summary(t: &ResultTable, key: &str) -> f64 {
    t.summary_value(key).unwrap_or_else(|| panic!("missing {key}")).parse().unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(budget: Duration, body: impl FnOnce() -> Outcome) -> (Outcome, Duration, bool) {
    let start = Instant::now();
    let out = body();
    let took = start.elapsed();
    (out, took, took <= budget)
}

fn gaussian() -> ExternalPotential {
    ExternalPotential::GaussianWell { depth: 1.0, width: 1.0 }
}

fn offsets(from: f64) -> Vec<f64> {
    (0..=10).map(|i| 5.0 * i as f64).filter(|a| *a >= from).collect()
}

fn slope_scaling() -> Outcome {
    let c = consts();
    let modes = ModeSet::single(1.0, 0.1);
    let kappa = default_kappa(&modes).unwrap();
    let photons = PhotonTrialState::equal_superposition(1);
    let a = offsets(5.0);
    let scan = |n: usize| {
        let base = SlaterMollifierConfig { n_electrons: n, a: 0.0, kappa, spacing: 3.0 };
        unboundedness_scan(&base, &a, &photons, &modes, &gaussian(), false, &c).unwrap()
    };
    let one = scan(1);
    let three = scan(3);
    let rel = (one.tail_slope - one.expected_slope).abs() / one.expected_slope.abs();
    let ratio = three.tail_slope / one.tail_slope;
    Outcome {
        pass: rel <= 1e-8 && (ratio - 3.0).abs() <= 3e-8 && one.tail_strictly_decreasing(),
        detail: format!("slope {:.10} vs {:.10} (rel {rel:.1e}), N=3 ratio {ratio:.10}", one.tail_slope, one.expected_slope),
    }
}

fn restored_boundedness() -> Outcome {
    let c = consts();
    let modes = ModeSet::single(1.0, 0.1);
    let base = SlaterMollifierConfig { n_electrons: 1, a: 0.0, kappa: default_kappa(&modes).unwrap(), spacing: 3.0 };
    let a = offsets(0.0);
    let scan = unboundedness_scan(&base, &a, &PhotonTrialState::equal_superposition(1), &modes, &gaussian(), true, &c)
        .unwrap();
    let e = scan.totals();
    let imin = (0..e.len()).min_by(|&i, &j| e[i].total_cmp(&e[j])).unwrap();
    Outcome {
        pass: imin + 1 < e.len() && e[e.len() - 1] > e[0],
        detail: format!("minimum at a = {}, E(0) = {:.6}, E(50) = {:.6}", a[imin], e[0], e[e.len() - 1]),
    }
}

fn depolarization() -> Outcome {
    let c = consts();
    let triples = [(1.0, 0.1, 1), (1.0, 0.3, 2), (2.0, 0.5, 1), (0.5, 0.05, 4), (3.0, 1.0, 3)];
    let mut worst = 0.0f64;
    for (omega, lambda, n) in triples {
        let modes = ModeSet::single(omega, lambda);
        let wp = plasma_frequency(&modes, n, &c, None).unwrap()[0].reduced_sq;
        let target = (omega * omega + wp).sqrt();
        // squared frequencies: the zero mode is exact only up to rounding in ν²
        let nm = normal_modes(&assemble_quadratic(&modes, n, true, &c).unwrap());
        let t2 = target * target;
        worst = worst.max(nm.nu_squared[0].abs() / t2).max((nm.nu_squared[1] - t2).abs() / t2);
    }
    let cfg = shipped("depolarization", &["scan.values=[1.0, 2.5]"]);
    let t = run_experiment(&cfg).unwrap();
    let grid = summary(&t, "grid_max_relative_error");
    Outcome {
        pass: worst <= 1e-12 && grid <= 1e-3,
        detail: format!("normal modes worst rel {worst:.1e}; grid gap worst rel {grid:.2e} (400 points, n_max 40)"),
    }
}

fn indefiniteness() -> Outcome {
    let c = consts();
    let lambdas = [-0.5, -0.2, -0.05, 0.001, 0.01, 0.05, 0.1, 0.3, 0.7, 1.5];
    let mut negatives = Vec::new();
    for l in lambdas {
        let qf = assemble_quadratic(&ModeSet::single(1.0, l), 1, false, &c).unwrap();
        negatives.push(qf.potential_eigenvalues().iter().filter(|v| **v < 0.0).count());
    }
    Outcome {
        pass: negatives.iter().all(|&k| k >= 1),
        detail: format!("negative eigenvalues per lambda {negatives:?}"),
    }
}

fn gauge_equivalence() -> Outcome {
    let t = run_experiment(&shipped("gauge-equivalence", &[])).unwrap();
    let gap = summary(&t, "final_max_gap");
    Outcome {
        pass: t.verdict == Some(true) && gap <= 1e-6,
        detail: format!(
            "lowest 5 levels differ by {gap:.1e} Ha at n_max 16; last doubling moved them by {:.1e}",
            summary(&t, "length_last_change")
        ),
    }
}

fn maxwell() -> Outcome {
    let c = consts();
    let modes = ModeSet::new(vec![
        Mode::new(1.0, 0.1),
        Mode { omega: 2.5, lambda: 0.3, epsilon_sign: -1.0 },
    ])
    .unwrap();
    let with = maxwell_eom_check(&modes, 2, true, &c).unwrap();
    let without = maxwell_eom_check(&modes, 2, false, &c).unwrap();
    let wp_max = plasma_frequency(&modes, 2, &c, None).unwrap().iter().map(|p| p.reduced_sq).fold(0.0, f64::max);
    let ratio = without.electric_residual / wp_max;
    Outcome {
        pass: with.electric_residual <= 1e-12 && without.displacement_residual <= 1e-12 && ratio >= 1e-3,
        detail: format!(
            "with dip {:.1e}; without dip E-equation {:.2e} (= {ratio:.2} omega_p^2), D-equation {:.1e}",
            with.electric_residual, without.electric_residual, without.displacement_residual
        ),
    }
}

fn model_zoo() -> Outcome {
    let t = run_experiment(&shipped("model-zoo", &[])).unwrap();
    let rows: Vec<String> = t.rows.iter().map(|r| format!("{}={}", r[0], r[1])).collect();
    Outcome { pass: t.verdict == Some(true), detail: rows.join(", ") }
}

fn box_instability() -> Outcome {
    let t = run_experiment(&shipped("box-instability", &[])).unwrap();
    let observed: Vec<String> = ["length_without_dip", "length_with_dip", "semiclassical", "fixed_displacement"]
        .iter()
        .map(|m| format!("{m} {}", t.summary_value(&format!("{m}_observed")).unwrap()))
        .collect();
    Outcome { pass: t.verdict == Some(true), detail: observed.join(", ") }
}

fn stark() -> Outcome {
    let c = consts();
    let grid = GridSpec::centered_dirichlet(8.0, 0.1, 4).unwrap();
    let modes = ModeSet::single(1.0, 0.2);
    let fields = [-0.004, -0.002, -0.001, 0.0, 0.001, 0.002, 0.004];
    let well = stark_scan(&grid, &gaussian(), &modes, &fields, &ScfConfig::default(), &c).unwrap();
    let omega = 1.0;
    let harmonic = stark_scan(&grid, &ExternalPotential::Harmonic { omega }, &modes, &fields, &ScfConfig::default(), &c)
        .unwrap();
    let closed = c.e * c.e / (c.m * omega * omega);
    let rel = (harmonic.alpha_fit - closed).abs() / closed;
    Outcome {
        pass: well.relative_agreement <= 1e-2 && rel <= 1e-6 && well.failures() + harmonic.failures() == 0,
        detail: format!(
            "gaussian alpha {:.6} vs {:.6} (rel {:.1e}); harmonic {:.9} vs {closed} (rel {rel:.1e})",
            well.alpha_fit, well.alpha_pt.self_consistent, well.relative_agreement, harmonic.alpha_fit
        ),
    }
}

fn field_energy() -> Outcome {
    let t = run_experiment(&shipped("field-energy-demo", &[])).unwrap();
    let squeezing = match &t.column("derived").unwrap()[3] {
        lwqed::cli::Cell::Float(v) => *v,
        other => panic!("{other:?}"),
    };
    Outcome {
        pass: t.verdict == Some(true) && squeezing > 0.0 && t.summary_value("discrepancy").is_some(),
        detail: format!("largest dn=+-2 entry {squeezing:.3}; {}", t.summary_value("discrepancy").unwrap()),
    }
}

fn shell_theorem() -> Outcome {
    let c = consts();
    let configs: [([f64; 3], f64, f64); 3] = [([1.0, 0.0, 0.0], 0.0, 3.0), ([0.6, 0.8, 0.0], 4.0, 2.5), ([0.0, 0.0, 1.0], -3.0, 5.0)];
    let mut worst = 0.0f64;
    for (kappa, a, spacing) in configs {
        let s = SlaterMollifierConfig { n_electrons: 3, a, kappa, spacing };
        s.validate().unwrap();
        let centers = s.centers();
        let point = coulomb_point_charge(&centers, &c);
        let quad = coulomb_quadrature(&centers, &c).unwrap();
        worst = worst.max((quad - point).abs() / point);
    }
    Outcome { pass: worst <= 1e-6, detail: format!("worst relative difference {worst:.1e} over 3 configurations") }
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("unboundedness slope", s(10), slope_scaling),
        ("restored boundedness", s(10), restored_boundedness),
        ("depolarization shift", s(120), depolarization),
        ("indefiniteness without dipole self-energy", s(1), indefiniteness),
        ("gauge equivalence", s(120), gauge_equivalence),
        ("maxwell equations of motion", s(1), maxwell),
        ("model zoo", s(5), model_zoo),
        ("box instability", s(180), box_instability),
        ("stark shift", s(60), stark),
        ("field energy demo", s(1), field_energy),
        ("shell theorem coulomb", s(30), shell_theorem),
    ];
    let mut failed = Vec::new();
    for (i, (name, budget, body)) in criteria.into_iter().enumerate() {
        let (out, took, in_time) = check(budget, body);
        let pass = out.pass && in_time;
        println!(
            "{} criterion {:>2} {name}: {} [{:.2}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
