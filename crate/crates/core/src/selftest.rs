//! A fast invariant suite, run by `hoferlab selftest`. Each check is a smaller
//! version of a property exercised by the test suites.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chords::{enumerate_chords, enumerate_tau_chords, is_transverse};
use crate::floer::{boundary_depth_scenario, spectral_a, threshold_k, DifferentialRule};
use crate::local_model::ModelConfig;
use crate::oracles::{
    exhaustive_bottleneck, geodesic_transport_oracle, maslov_oracle, rank_function_barcode,
};
use crate::persistence::bottleneck_distance;
use crate::quasiflat::{random_pairs, sandwich, SandwichOptions};
use crate::testkit::{random_barcode, random_complex, random_vector, ComplexSpec};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub outcome: Result<(), String>,
}

type Check = fn() -> Result<(), String>;

const CHECKS: &[(&str, Check)] = &[
    ("twist chord census", tau_census),
    ("index oracle", index_oracle),
    ("spectral difference identity", spectral_identity),
    ("sandwich bounds", sandwich_bounds),
    ("boundary depth growth", boundary_depth_growth),
    ("bottleneck oracle", bottleneck_oracle),
    ("reduction oracle", reduction_oracle),
];

pub fn run() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|&(name, check)| CheckResult {
            name,
            outcome: check(),
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tau_census() -> Result<(), String> {
    for n in [2u32, 3] {
        let c = ModelConfig::standard(n, 1.0, 2).map_err(|e| e.to_string())?;
        for k in 1..=8u32 {
            let chords = enumerate_tau_chords(&c, 1, k, &[]).map_err(|e| e.to_string())?;
            let mut idx: Vec<i64> = chords.iter().map(|ch| ch.index).collect();
            idx.sort_unstable();
            let n = n as i64;
            let want: Vec<i64> = (0..2 * k as i64).map(|j| n + j * (n - 1)).collect();
            ensure(idx == want, || format!("n={n} k={k}: degrees {idx:?}"))?;
        }
    }
    Ok(())
}

fn index_oracle() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = [2u32, 3, 5][rng.random_range(0..3)];
        let c =
            ModelConfig::standard(n, rng.random_range(0.1..3.0), 3).map_err(|e| e.to_string())?;
        let v = random_vector(&mut rng, 3, 4.0);
        if !is_transverse(&v, &c) {
            continue;
        }
        let i = rng.random_range(0..c.twists());
        let k = rng.random_range(1..=6u32);
        for ch in enumerate_chords(&c, &v, i, k).map_err(|e| e.to_string())? {
            ensure(ch.index == maslov_oracle(&c, &ch, &v, i, k), || {
                format!("index mismatch at {}", ch.label())
            })?;
            ensure(geodesic_transport_oracle(&c, &ch, &v, i, k), || {
                format!("transport check failed at {}", ch.label())
            })?;
        }
    }
    Ok(())
}

fn spectral_identity() -> Result<(), String> {
    let c = ModelConfig::standard(3, PI / 3.0, 3).map_err(|e| e.to_string())?;
    for (v, w) in random_pairs(5, 10, 3, 4.0) {
        if !is_transverse(&v, &c) || !is_transverse(&w, &c) {
            continue;
        }
        let k = threshold_k(&v).max(threshold_k(&w));
        for i in 0..3 {
            let a = spectral_a(&c, i, &v, k).map_err(|e| e.to_string())?;
            let b = spectral_a(&c, i, &w, k).map_err(|e| e.to_string())?;
            ensure(((a - b) - (w[i] - v[i])).abs() <= 1e-9, || {
                format!("a_{i}(v) - a_{i}(w) = {} vs {}", a - b, w[i] - v[i])
            })?;
        }
    }
    Ok(())
}

fn sandwich_bounds() -> Result<(), String> {
    let c = ModelConfig::sigma(2, PI / 3.0, 3).map_err(|e| e.to_string())?;
    for (v, w) in random_pairs(6, 20, 3, 4.0) {
        let r = sandwich(&c, &v, &w, SandwichOptions::default()).map_err(|e| e.to_string())?;
        let upper = r.upper_sigma.unwrap_or(f64::NAN);
        ensure(
            r.lower <= upper + 1e-12 && upper <= 2.0 * r.exact_inf_norm + 1e-9,
            || {
                format!(
                    "bounds out of order: {} {} {}",
                    r.lower, upper, r.exact_inf_norm
                )
            },
        )?;
    }
    Ok(())
}

fn boundary_depth_growth() -> Result<(), String> {
    let c = ModelConfig::standard(3, PI / 3.0, 1).map_err(|e| e.to_string())?;
    let mut prev = 0.0;
    for k in 1..=16u32 {
        let bd = boundary_depth_scenario(&c, k, 1, DifferentialRule::DegreeVanishing)
            .map_err(|e| e.to_string())?;
        ensure(bd.beta >= bd.lower_bound - 1e-8, || {
            format!("k={k}: beta {} < bound {}", bd.beta, bd.lower_bound)
        })?;
        ensure(bd.beta > prev, || format!("k={k}: beta did not grow"))?;
        prev = bd.beta;
    }
    Ok(())
}

fn bottleneck_oracle() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let b = random_barcode(&mut rng, 4);
        let c = random_barcode(&mut rng, 4);
        let fast = bottleneck_distance(&b, &c);
        let slow = exhaustive_bottleneck(&b, &c);
        let same = (fast.is_infinite() && slow.is_infinite()) || (fast - slow).abs() <= 1e-9;
        ensure(same, || format!("{fast} vs {slow}"))?;
    }
    Ok(())
}

fn reduction_oracle() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let size = rng.random_range(1..=8);
        let (c, expected) = random_complex(&mut rng, &ComplexSpec::small(size));
        let got = c.reduce_to_barcode().map_err(|e| e.to_string())?;
        ensure(got == expected && got == rank_function_barcode(&c), || {
            "reduction disagrees with the rank oracle".to_string()
        })?;
    }
    Ok(())
}
