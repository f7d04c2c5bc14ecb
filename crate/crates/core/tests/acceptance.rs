//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hoferlab::chords::{
    enumerate_chords, enumerate_phi_chords, enumerate_tau_chords, is_transverse,
};
use hoferlab::exec::Execution;
use hoferlab::floer::{
    boundary_depth_scenario, build_complex, distinguished_degree, spectral_differences,
    threshold_k, DifferentialRule, FloerScenario,
};
use hoferlab::oracles::{
    exhaustive_bottleneck, geodesic_transport_oracle, maslov_oracle, rank_function_barcode,
};
use hoferlab::persistence::bottleneck_distance;
use hoferlab::quasiflat::{
    hofer_upper_plain, one_norm, random_pairs, sandwich, sigma_hamiltonians, SandwichOptions,
};
use hoferlab::testkit::{
    perturb_actions, random_barcode, random_complex, random_vector, ComplexSpec,
};
use hoferlab::{ModelConfig, Region, Sector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 spectral-difference identity", spectral_identity),
        ("2 chord census", chord_census),
        ("3 index oracle equivalence", index_oracle),
        ("4 degree-gap guard", degree_gap),
        ("5 oscillation values", oscillation_values),
        ("6 sandwich", sandwich_bounds),
        ("7 boundary-depth divergence", boundary_depth_divergence),
        ("8 bottleneck oracle", bottleneck_oracle),
        ("9 reduction oracle", reduction_oracle),
        ("10 stability", stability),
        ("11 homology ranks", homology_ranks),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}  ({detail}; {secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}  ({detail}; {secs:.2}s)");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent < limit, || format!("took {spent:?}, limit {limit:?}"))
}

fn spectral_identity() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for n in [2u32, 3] {
        let config = ModelConfig::standard(n, PI / 3.0, 3).map_err(|e| e.to_string())?;
        let pairs: Vec<_> = random_pairs(1000 + n as u64, 100, 3, 4.0)
            .into_iter()
            .filter(|(v, w)| is_transverse(v, &config) && is_transverse(w, &config))
            .collect();
        ensure(pairs.len() >= 95, || "too few transverse pairs".into())?;
        let errors = Execution::Parallel.try_map(&pairs, |(v, w)| {
            let k = threshold_k(v).max(threshold_k(w));
            let a = spectral_differences(&config, v, k).map_err(|e| e.to_string())?;
            let b = spectral_differences(&config, w, k).map_err(|e| e.to_string())?;
            let worst = (0..3).fold(0.0f64, |m, i| m.max(((a[i] - b[i]) - (w[i] - v[i])).abs()));
            Ok::<f64, String>(worst)
        })?;
        checked += errors.len();
        worst = errors.into_iter().fold(worst, f64::max);
    }
    ensure(worst <= 1e-9, || format!("max error {worst:e}"))?;
    within(start, Duration::from_secs(10))?;
    Ok(format!("{checked} pairs, max error {worst:.1e}"))
}

fn chord_census() -> Outcome {
    let mut cases = 0;
    for n in [2u32, 3, 5] {
        let config = ModelConfig::standard(n, PI / 3.0, 3).map_err(|e| e.to_string())?;
        for i in 0..config.twists() {
            for k in 1..=32u32 {
                let chords = enumerate_tau_chords(&config, i, k, &[]).map_err(|e| e.to_string())?;
                ensure(chords.len() == 2 * k as usize, || {
                    format!("n={n} i={i} k={k}: {} chords", chords.len())
                })?;
                let mut idx: Vec<i64> = chords.iter().map(|c| c.index).collect();
                idx.sort_unstable();
                let n = n as i64;
                let want: Vec<i64> = (0..2 * k as i64).map(|j| n + j * (n - 1)).collect();
                ensure(idx == want, || {
                    format!("n={n} i={i} k={k}: degrees {idx:?}")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (n, i, k) cases"))
}

fn index_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut scenarios = 0;
    let mut chords_checked = 0;
    while scenarios < 200 {
        let n = [2u32, 3, 5][rng.random_range(0..3)];
        let delta = rng.random_range(0.05..PI - 0.05);
        let config = ModelConfig::standard(n, delta, 3).map_err(|e| e.to_string())?;
        let v = random_vector(&mut rng, 3, 4.0);
        if !is_transverse(&v, &config) {
            continue;
        }
        let i = rng.random_range(0..config.twists());
        let k = rng.random_range(1..=16u32);
        for c in enumerate_chords(&config, &v, i, k).map_err(|e| e.to_string())? {
            let oracle = maslov_oracle(&config, &c, &v, i, k);
            ensure(c.index == oracle, || {
                format!(
                    "n={n} i={i} k={k} {}: {} vs oracle {oracle}",
                    c.label(),
                    c.index
                )
            })?;
            ensure(geodesic_transport_oracle(&config, &c, &v, i, k), || {
                format!(
                    "n={n} i={i} k={k} {}: transport misses the target fiber",
                    c.label()
                )
            })?;
            chords_checked += 1;
        }
        scenarios += 1;
    }
    Ok(format!("{scenarios} scenarios, {chords_checked} chords"))
}

fn degree_gap() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut checked = 0;
    for n in [2u32, 3, 5] {
        let config = ModelConfig::standard(n, PI / 3.0, 3).map_err(|e| e.to_string())?;
        for _ in 0..40 {
            let v = random_vector(&mut rng, 3, 4.0);
            if !is_transverse(&v, &config) {
                continue;
            }
            let k0 = threshold_k(&v);
            for k in k0..k0 + 4 {
                let target = distinguished_degree(&config, k);
                for i in 0..config.twists() {
                    for c in enumerate_phi_chords(&config, &v, i, k).map_err(|e| e.to_string())? {
                        let ok = match c.sector {
                            Sector::Phi {
                                region: Region::Inner,
                                ..
                            } => c.index < target,
                            Sector::Phi {
                                region: Region::Outer,
                                ..
                            } => c.index > target,
                            Sector::Tau => true,
                        };
                        ensure(ok, || {
                            format!(
                                "n={n} k={k} i={i} {}: degree {} vs {target}",
                                c.label(),
                                c.index
                            )
                        })?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} band chords"))
}

fn oscillation_values() -> Outcome {
    let plain = ModelConfig::standard(2, PI / 3.0, 3).map_err(|e| e.to_string())?;
    let doubled = ModelConfig::sigma(2, PI / 3.0, 3).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (v, w) in random_pairs(5, 200, 3, 4.0) {
        for (j, h) in sigma_hamiltonians(&v, &w).iter().enumerate() {
            let err = (h.oscillation(&doubled) - (w[j] - v[j]).abs()).abs();
            worst = worst.max(err);
        }
        let upper = hofer_upper_plain(&plain, &v, &w).map_err(|e| e.to_string())?;
        ensure(upper <= 2.0 * one_norm(&v, &w) + 1e-12, || {
            format!("plain bound {upper} > 2‖v−w‖₁")
        })?;
    }
    ensure(worst <= 1e-9, || {
        format!("sigma oscillation error {worst:e}")
    })?;
    Ok(format!("200 pairs, max sigma error {worst:.1e}"))
}

fn sandwich_bounds() -> Outcome {
    let start = Instant::now();
    let config = ModelConfig::sigma(2, PI / 3.0, 3).map_err(|e| e.to_string())?;
    let pairs = random_pairs(6, 500, 3, 4.0);
    let reports = Execution::Parallel.try_map(&pairs, |(v, w)| {
        sandwich(&config, v, w, SandwichOptions::default()).map_err(|e| e.to_string())
    })?;
    let mut nudged = 0;
    for r in &reports {
        let upper = r.upper_sigma.ok_or("missing sigma bound")?;
        ensure((r.lower - 0.5 * r.exact_inf_norm).abs() <= 1e-9, || {
            format!("lower {} vs ½‖v−w‖∞ {}", r.lower, 0.5 * r.exact_inf_norm)
        })?;
        ensure(
            r.lower <= upper + 1e-9 && upper <= 2.0 * r.exact_inf_norm + 1e-9,
            || {
                format!(
                    "order violated: {} ≤ {upper} ≤ {}",
                    r.lower,
                    2.0 * r.exact_inf_norm
                )
            },
        )?;
        nudged += r.nudged as usize;
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("{} pairs, {nudged} nudged", reports.len()))
}

fn boundary_depth_divergence() -> Outcome {
    let cases = [
        ("n=1 disk", 2u32, DifferentialRule::DiskPairing),
        ("n=2", 2, DifferentialRule::SymmetryReduced),
        ("n=3", 3, DifferentialRule::DegreeVanishing),
    ];
    let mut rows = 0;
    for (label, n, rule) in cases {
        let config = ModelConfig::standard(n, PI / 3.0, 1).map_err(|e| e.to_string())?;
        for ell in 0..=2u32 {
            let ks: Vec<u32> = (1..=64).collect();
            let rows_here = Execution::Parallel.try_map(&ks, |&k| {
                boundary_depth_scenario(&config, k, ell, rule).map_err(|e| e.to_string())
            })?;
            for bd in &rows_here {
                ensure(bd.beta >= bd.lower_bound - 1e-8, || {
                    format!(
                        "{label} ℓ={ell} k={}: beta {} < bound {}",
                        bd.k, bd.beta, bd.lower_bound
                    )
                })?;
            }
            let beta = |k: usize| rows_here[k - 1].beta;
            ensure(beta(64) > beta(32) && beta(32) > beta(16), || {
                format!(
                    "{label} ℓ={ell}: β(16..64) = {} {} {}",
                    beta(16),
                    beta(32),
                    beta(64)
                )
            })?;
            rows += rows_here.len();
        }
    }
    Ok(format!("{rows} (k, ℓ, n) rows"))
}

fn bottleneck_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let b = random_barcode(&mut rng, 5);
        let c = random_barcode(&mut rng, 5);
        let fast = bottleneck_distance(&b, &c);
        let slow = exhaustive_bottleneck(&b, &c);
        if fast.is_infinite() || slow.is_infinite() {
            ensure(fast == slow, || format!("{fast} vs {slow}"))?;
        } else {
            worst = worst.max((fast - slow).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("max error {worst:e}"))?;
    Ok(format!("1000 pairs, max error {worst:.1e}"))
}

fn reduction_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..200 {
        let size = rng.random_range(1..=8);
        let (complex, _) = random_complex(&mut rng, &ComplexSpec::small(size));
        let fast = complex.reduce_to_barcode().map_err(|e| e.to_string())?;
        let slow = rank_function_barcode(&complex);
        ensure(fast == slow, || {
            format!("trial {trial}: {fast:?} vs {slow:?}")
        })?;
    }
    Ok("200 complexes".into())
}

fn stability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let eps = 0.01;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let size = rng.random_range(2..=12);
        let (complex, _) = random_complex(&mut rng, &ComplexSpec::separated(size, 0.05));
        let moved = perturb_actions(&mut rng, &complex, eps);
        let a = complex.reduce_to_barcode().map_err(|e| e.to_string())?;
        let b = moved.reduce_to_barcode().map_err(|e| e.to_string())?;
        worst = worst.max(bottleneck_distance(&a, &b));
    }
    ensure(worst <= eps + 1e-12, || format!("distance {worst} > {eps}"))?;
    Ok(format!("100 trials, max distance {worst:.4}"))
}

fn homology_ranks() -> Outcome {
    let mut checked = 0;
    for n in [2u32, 3] {
        let config = ModelConfig::standard(n, PI / 3.0, 3).map_err(|e| e.to_string())?;
        let rule = DifferentialRule::for_dimension(n);
        for k in 1..=8u32 {
            for v in [vec![], vec![1.3, -2.6, 0.7]] {
                for i in 0..config.twists() {
                    let fc = build_complex(&config, &FloerScenario::new(i, k, v.clone()), rule)
                        .map_err(|e| e.to_string())?;
                    let n = n as i64;
                    for d in -40..80 {
                        let want = usize::from((0..2 * k as i64).any(|j| n + j * (n - 1) == d));
                        let got = fc.complex.homology_rank(d).map_err(|e| e.to_string())?;
                        ensure(got == want, || {
                            format!("n={n} k={k} i={i} degree {d}: rank {got}")
                        })?;
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} complexes"))
}
