//! Acceptance criteria 1–10, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::Instant;

use dlsfem::adaptivity::{afem_loop, AdaptiveHistory};
use dlsfem::assembly::PenaltyRegime;
use dlsfem::benchmarks::{side_condition_diagnostic, weight, ConvergenceRecord, WeightMode};
use dlsfem::config::ExperimentConfig;
use dlsfem::mesh::{build_initial_mesh, DomainKind, DomainSpec, Mesh};
use dlsfem::spaces::{build_constrained_basis, Discretization};
use dlsfem::verify::{
    alpha_partition_defect, constrained_dimension, constrained_mean_jump_defect, constraint_rank, formulation_gap,
    optimality_margin, quadratic_identity_defect,
};
use dlsfem::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// L-shape adaptive runs stop once the next mesh would exceed this many unknowns.
const LSHAPE_MAX_NDOF: usize = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

fn uniform(domain: DomainKind, ell: f64, k: usize, weight: WeightMode, levels: usize) -> Result<AdaptiveHistory> {
    afem_loop(&ExperimentConfig {
        domain,
        ell,
        k,
        weight,
        theta: 1.0,
        max_levels: Some(levels),
        ..Default::default()
    })
}

fn adaptive(alpha: i32, k: usize, theta: f64) -> Result<AdaptiveHistory> {
    afem_loop(&ExperimentConfig {
        domain: DomainKind::LShape,
        k,
        alpha,
        theta,
        max_ndof: LSHAPE_MAX_NDOF,
        ..Default::default()
    })
}

fn errors(h: &AdaptiveHistory) -> Vec<f64> {
    h.records.iter().map(|r| r.err_energy_rel).collect()
}

/// Largest level-wise relative deviation of each curve from the first one.
fn levelwise_spread(curves: &[Vec<f64>]) -> f64 {
    let n = curves.iter().map(Vec::len).min().unwrap_or(0);
    let mut worst = 0.0f64;
    for c in &curves[1..] {
        for i in 0..n {
            worst = worst.max((c[i] - curves[0][i]).abs() / curves[0][i]);
        }
    }
    worst
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
}

fn criterion_1() -> Result<Outcome> {
    let mut pass = true;
    let mut detail = Vec::new();
    for (k, levels) in [(0, 6), (1, 5)] {
        let h = uniform(DomainKind::Square, 1.0, k, WeightMode::Friedrichs, levels)?;
        let target = -((k + 1) as f64) / 2.0;
        let slope = h.slope(3, |r| r.err_energy_rel).unwrap_or(f64::NAN);
        pass &= h.records.len() >= 4 && within(slope, target, 0.15);
        detail.push(format!("k={k} slope {slope:.3} (target {target})"));
    }
    outcome(pass, detail.join(", "))
}

fn criterion_2() -> Result<Outcome> {
    let curves: Vec<Vec<f64>> = [1.0, 10.0, 100.0]
        .iter()
        .map(|&ell| uniform(DomainKind::Square, ell, 0, WeightMode::Friedrichs, 4).map(|h| errors(&h)))
        .collect::<Result<_>>()?;
    let spread = levelwise_spread(&curves);
    let one = errors(&uniform(DomainKind::Square, 100.0, 0, WeightMode::One, 4)?);
    let ratio = one[3] / one[0];
    outcome(
        spread <= 0.01 && ratio > 0.5,
        format!("friedrichs spread across ell {spread:.2e} (<= 1e-2), unweighted ell=100 error ratio after 3 refinements {ratio:.3} (> 0.5)"),
    )
}

fn criterion_3() -> Result<Outcome> {
    let ells = [1.0, 4.0, 16.0];
    let mut slopes = Vec::new();
    let mut weighted = Vec::new();
    let mut unweighted = Vec::new();
    for &ell in &ells {
        let h = uniform(DomainKind::Rectangle, ell, 0, WeightMode::Friedrichs, 5)?;
        slopes.push(h.slope(3, |r| r.err_energy_rel).unwrap_or(f64::NAN));
        weighted.push(errors(&h));
        unweighted.push(errors(&uniform(DomainKind::Rectangle, ell, 0, WeightMode::One, 5)?));
    }
    let slopes_ok = slopes.iter().all(|s| within(*s, -0.5, 0.15));
    let w = levelwise_spread(&weighted);
    let u = levelwise_spread(&unweighted);
    // Informational: the initial mesh has h independent of ell, so ell = 4^m
    // at level n has the relative mesh size of ell = 1 at level n + 2m.
    let mut aligned = 0.0f64;
    for (m, curve) in weighted.iter().enumerate().skip(1) {
        for (n, e) in curve.iter().enumerate() {
            if let Some(reference) = weighted[0].get(n + 2 * m) {
                aligned = aligned.max((e - reference).abs() / reference);
            }
        }
    }
    outcome(
        slopes_ok && w <= 0.05 && u <= 0.10,
        format!(
            "slopes {} (target -0.5), friedrichs level-wise spread {w:.3} (<= 0.05), unweighted spread {u:.3} (<= 0.10); \
             friedrichs spread at equal h/ell {aligned:.1e}",
            fmt_list(&slopes)
        ),
    )
}

fn estimator_slope(h: &AdaptiveHistory) -> f64 {
    h.slope(4, |r| r.estimator).unwrap_or(f64::NAN)
}

fn adaptive_criterion(alpha: i32, runs: &[(usize, AdaptiveHistory)]) -> Result<Outcome> {
    let mut pass = true;
    let mut detail = Vec::new();
    for (k, h) in runs {
        let target = -((k + 1) as f64) / 2.0;
        let slope = estimator_slope(h);
        let last = h.records.last().map(|r| r.ndof).unwrap_or(0);
        pass &= within(slope, target, 0.15);
        detail.push(format!("k={k} slope {slope:.3} (target {target}, {} levels, ndof {last})", h.records.len()));
    }
    if alpha == 1 {
        let u = adaptive(1, 1, 1.0)?;
        let slope = estimator_slope(&u);
        pass &= slope >= -0.40;
        detail.push(format!("uniform k=1 slope {slope:.3} (>= -0.40)"));
    }
    outcome(pass, detail.join(", "))
}

fn criterion_6() -> Result<Outcome> {
    let domains = [
        DomainSpec::square(1.0)?,
        DomainSpec::square(100.0)?,
        DomainSpec::rectangle(1.0)?,
        DomainSpec::rectangle(16.0)?,
        DomainSpec::lshape(1.0)?,
    ];
    let mut worst = 0.0f64;
    for d in &domains {
        let c = weight(WeightMode::Friedrichs, d);
        let first = build_initial_mesh(d)?;
        let second = first.refine_uniform()?;
        for mesh in [&first, &second] {
            for k in 0..=1 {
                worst = worst.max(formulation_gap(&Discretization::new(mesh, k)?, c)?);
            }
        }
    }
    outcome(worst <= 1e-8, format!("largest relative field difference {worst:.2e} (<= 1e-8)"))
}

fn efficiency_band(records: &[ConvergenceRecord]) -> (f64, f64) {
    records
        .iter()
        .filter(|r| !r.unreliable)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.efficiency), hi.max(r.efficiency)))
}

fn criterion_7(runs: &[(i32, usize, &AdaptiveHistory)]) -> Result<Outcome> {
    let mut pass = true;
    let mut detail = Vec::new();
    for (alpha, k, h) in runs {
        let (lo, hi) = efficiency_band(&h.records);
        pass &= lo >= 0.1 && hi / lo <= 10.0;
        detail.push(format!("alpha={alpha} k={k} [{lo:.3}, {hi:.3}]"));
    }
    outcome(pass, format!("efficiency ranges {}", detail.join(", ")))
}

fn criterion_8() -> Result<Outcome> {
    let l = build_initial_mesh(&DomainSpec::lshape(1.0)?)?;
    let meshes: Vec<Mesh> = vec![
        build_initial_mesh(&DomainSpec::square(1.0)?)?,
        build_initial_mesh(&DomainSpec::rectangle(3.0)?)?,
        l.refine(&[0, 9, 17])?,
    ];
    let (mut alpha, mut jump) = (0.0f64, 0.0f64);
    let mut cardinality = true;
    let mut rank = true;
    for mesh in &meshes {
        for k in 0..=2 {
            let disc = Discretization::new(mesh, k)?;
            alpha = alpha.max(alpha_partition_defect(&disc)?);
            jump = jump.max(constrained_mean_jump_defect(&disc)?);
            cardinality &= build_constrained_basis(&disc)?.len() == constrained_dimension(&disc);
            let (r, rows) = constraint_rank(&disc)?;
            rank &= r == rows;
        }
    }
    outcome(
        alpha <= 1e-12 && jump <= 1e-12 && cardinality && rank,
        format!("alpha sum defect {alpha:.1e}, mean jump / h {jump:.1e}, cardinality {cardinality}, full row rank {rank}"),
    )
}

fn criterion_9() -> Result<Outcome> {
    let mut mesh = build_initial_mesh(&DomainSpec::square(1.0)?)?;
    let mut lhs = vec![];
    let mut rhs = vec![];
    for level in 0..=4 {
        if level > 0 {
            mesh = mesh.refine_uniform()?;
        }
        let d = side_condition_diagnostic(&mesh);
        lhs.push(d.lhs);
        rhs.push(d.rhs);
    }
    let growth: Vec<f64> = lhs.windows(2).map(|w| w[1] / w[0]).collect();
    let band = rhs.iter().cloned().fold(0.0f64, f64::max) / rhs.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        growth.iter().all(|g| *g >= 1.2) && band <= 1.5,
        format!("lhs growth per level {} (>= 1.2), rhs band {band:.3} (<= 1.5)", fmt_list(&growth)),
    )
}

fn criterion_10() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let meshes = vec![
        build_initial_mesh(&DomainSpec::square(2.0)?)?,
        build_initial_mesh(&DomainSpec::rectangle(2.0)?)?,
        build_initial_mesh(&DomainSpec::lshape(1.0)?)?.refine(&[1, 2])?,
    ];
    let (mut identity, mut margin) = (0.0f64, f64::INFINITY);
    for mesh in &meshes {
        for k in 0..=1 {
            let disc = Discretization::new(mesh, k)?;
            for alpha in [-1, 1] {
                let regime = PenaltyRegime::new(alpha, 0.6)?;
                for _ in 0..5 {
                    identity = identity.max(quadratic_identity_defect(&disc, &regime, &mut rng)?);
                    margin = margin.min(optimality_margin(&disc, &regime, &mut rng)?);
                }
            }
        }
    }
    outcome(
        identity <= 1e-10 && margin >= -1e-12,
        format!("quadratic identity defect {identity:.1e} (<= 1e-10), smallest relative increase at perturbations {margin:.2e} (>= 0)"),
    )
}

fn report(n: usize, name: &str, start: Instant, result: Result<Outcome>) -> bool {
    let secs = start.elapsed().as_secs_f64();
    match result {
        Ok(o) => {
            println!("criterion {n:>2} {}: {name}: {} [{secs:.1}s]", if o.pass { "PASS" } else { "FAIL" }, o.detail);
            o.pass
        }
        Err(e) => {
            println!("criterion {n:>2} FAIL: {name}: error: {e} [{secs:.1}s]");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut all = true;
    let t = Instant::now();
    all &= report(1, "smooth square convergence", t, criterion_1());
    let t = Instant::now();
    all &= report(2, "scaling robustness", t, criterion_2());
    let t = Instant::now();
    all &= report(3, "anisotropic rectangle", t, criterion_3());

    let t = Instant::now();
    let natural: Result<Vec<(usize, AdaptiveHistory)>> = (0..=1).map(|k| Ok((k, adaptive(1, k, 0.5)?))).collect();
    all &= report(4, "L-shape adaptive optimality", t, run_or_fail(&natural, |r| adaptive_criterion(1, r)));
    let t = Instant::now();
    let over: Result<Vec<(usize, AdaptiveHistory)>> = (0..=1).map(|k| Ok((k, adaptive(-1, k, 0.5)?))).collect();
    all &= report(5, "over-penalized scheme", t, run_or_fail(&over, |r| adaptive_criterion(-1, r)));

    let t = Instant::now();
    all &= report(6, "formulation equivalence", t, criterion_6());

    let t = Instant::now();
    let c7 = match (&natural, &over) {
        (Ok(a), Ok(b)) => {
            let runs: Vec<(i32, usize, &AdaptiveHistory)> = a
                .iter()
                .map(|(k, h)| (1, *k, h))
                .chain(b.iter().map(|(k, h)| (-1, *k, h)))
                .collect();
            criterion_7(&runs)
        }
        _ => outcome(false, "adaptive runs failed".into()),
    };
    all &= report(7, "estimator efficiency band", t, c7);

    let t = Instant::now();
    all &= report(8, "constrained basis unit suite", t, criterion_8());
    let t = Instant::now();
    all &= report(9, "side-condition diagnostic", t, criterion_9());
    let t = Instant::now();
    all &= report(10, "quadratic identity and optimality", t, criterion_10());

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run_or_fail<T>(runs: &Result<T>, check: impl FnOnce(&T) -> Result<Outcome>) -> Result<Outcome> {
    match runs {
        Ok(r) => check(r),
        Err(e) => outcome(false, format!("run failed: {e}")),
    }
}
