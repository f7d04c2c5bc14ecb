//! Hofer upper bounds from explicit radial Hamiltonians, lower bounds from
//! spectral differences, the Σ doubling, and per-pair reports.
//!
//! Nothing here computes a Hofer distance. `lower` and `upper_*` are bounds on
//! it obtained from the two sides of the sandwich.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::chords::nudge_to_transverse;
use crate::exec::Execution;
use crate::floer::{spectral_differences, threshold_k, FloerError};
use crate::local_model::ModelConfig;
use crate::testkit::random_vector;

const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuasiflatError {
    #[error(transparent)]
    Floer(#[from] FloerError),
    #[error("the sigma construction needs a config built in sigma mode")]
    NotSigmaMode,
    #[error("vector has {got} coordinates, expected {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("{which} is not transverse (rerun with nudging enabled)")]
    NonTransverse { which: &'static str },
    #[error("{what} = {value} exceeds its bound {bound}")]
    BoundViolated {
        what: &'static str,
        value: f64,
        bound: f64,
    },
    #[error("lower bound {lower} differs from half the sup-norm distance {expected}")]
    LowerMismatch { lower: f64, expected: f64 },
}

/// `max − min` of sampled values; 0 for an empty profile.
pub fn oscillation(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// Autonomous radial Hamiltonian `H(r) = Σ c_b ∫₀ʳ θ_b`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RadialHamiltonian {
    pub terms: Vec<(usize, f64)>,
}

impl RadialHamiltonian {
    pub fn value(&self, config: &ModelConfig, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(b, c)| {
                let mut unit = vec![0.0; b + 1];
                unit[b] = c;
                config.hamiltonian_value(r, &unit)
            })
            .sum()
    }

    /// Radii where the profile can take its extreme values: 0 and both ends of
    /// every band it touches. It is monotone inside a band and constant between
    /// bands.
    pub fn breakpoints(&self, config: &ModelConfig) -> Vec<f64> {
        let mut pts = vec![0.0];
        for &(b, _) in &self.terms {
            let (lo, hi) = config.partition().band(b);
            pts.push(lo);
            pts.push(hi);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    pub fn profile(&self, config: &ModelConfig) -> Vec<f64> {
        self.breakpoints(config)
            .into_iter()
            .map(|r| self.value(config, r))
            .collect()
    }

    pub fn oscillation(&self, config: &ModelConfig) -> f64 {
        oscillation(&self.profile(config))
    }
}

/// One Hamiltonian per band moving `φ_v(L₂)` to `φ_w(L₂)` in that band only.
pub fn plain_hamiltonians(v: &[f64], w: &[f64]) -> Vec<RadialHamiltonian> {
    v.iter()
        .zip(w)
        .enumerate()
        .map(|(b, (x, y))| RadialHamiltonian {
            terms: vec![(b, y - x)],
        })
        .collect()
}

/// Sum of the per-band oscillations; checked against `2‖v − w‖₁`.
pub fn hofer_upper_plain(
    config: &ModelConfig,
    v: &[f64],
    w: &[f64],
) -> Result<f64, QuasiflatError> {
    check_len(v, config.bands())?;
    check_len(w, config.bands())?;
    let total: f64 = plain_hamiltonians(v, w)
        .iter()
        .map(|h| h.oscillation(config))
        .sum();
    let bound = 2.0 * one_norm(v, w);
    if total > bound + BOUND_SLACK {
        return Err(QuasiflatError::BoundViolated {
            what: "plain upper bound",
            value: total,
            bound,
        });
    }
    Ok(total)
}

/// `(v₁, −v₁, v₂, −v₂, …)`.
pub fn sigma_map(v: &[f64]) -> Vec<f64> {
    v.iter().flat_map(|&x| [x, -x]).collect()
}

/// Per-coordinate Hamiltonians of the doubled layout: `Δ_j` on band `2j` and
/// `−Δ_j` on band `2j + 1`, so each one returns to 0.
pub fn sigma_hamiltonians(v: &[f64], w: &[f64]) -> Vec<RadialHamiltonian> {
    v.iter()
        .zip(w)
        .enumerate()
        .map(|(j, (x, y))| RadialHamiltonian {
            terms: vec![(2 * j, y - x), (2 * j + 1, x - y)],
        })
        .collect()
}

/// Oscillation of the combined doubled Hamiltonian; checked against
/// `2‖v − w‖∞`.
pub fn hofer_upper_sigma(
    config: &ModelConfig,
    v: &[f64],
    w: &[f64],
) -> Result<f64, QuasiflatError> {
    if !config.sigma_mode() {
        return Err(QuasiflatError::NotSigmaMode);
    }
    check_len(v, config.d())?;
    check_len(w, config.d())?;
    let combined = RadialHamiltonian {
        terms: sigma_hamiltonians(v, w)
            .into_iter()
            .flat_map(|h| h.terms)
            .collect(),
    };
    let osc = combined.oscillation(config);
    let bound = 2.0 * inf_norm(v, w);
    if osc > bound + BOUND_SLACK {
        return Err(QuasiflatError::BoundViolated {
            what: "sigma upper bound",
            value: osc,
            bound,
        });
    }
    Ok(osc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichOptions {
    /// Twist power; defaults to the threshold of the two vectors.
    pub k: Option<u32>,
    pub allow_nudge: bool,
}

impl Default for SandwichOptions {
    fn default() -> Self {
        SandwichOptions {
            k: None,
            allow_nudge: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiflatReport {
    /// The vectors actually evaluated (after any nudge).
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub k: u32,
    /// `½ max_i |a_i(v) − a_i(w)|`.
    pub lower: f64,
    pub upper_plain: f64,
    /// Only in sigma mode.
    pub upper_sigma: Option<f64>,
    pub exact_inf_norm: f64,
    pub exact_one_norm: f64,
    /// `a_i(v) − a_i(w)` for every band of the evaluated layout.
    pub spectral_differences: Vec<f64>,
    pub nudged: bool,
    /// The upper bound is the oscillation of one compactly supported
    /// Hamiltonian, so it also bounds the distance in the group.
    pub group_bound: bool,
}

fn check_len(v: &[f64], expected: usize) -> Result<(), QuasiflatError> {
    if v.len() != expected {
        return Err(QuasiflatError::Dimension {
            got: v.len(),
            expected,
        });
    }
    Ok(())
}

pub fn inf_norm(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

pub fn one_norm(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(a, b)| (a - b).abs()).sum()
}

fn make_transverse(
    config: &ModelConfig,
    v: &[f64],
    which: &'static str,
    allow: bool,
) -> Result<(Vec<f64>, bool), QuasiflatError> {
    // Resonance is sign-symmetric, so nudging the flat vector also fixes its
    // doubled layout.
    let (out, nudged) = nudge_to_transverse(v, config);
    if nudged && !allow {
        return Err(QuasiflatError::NonTransverse { which });
    }
    Ok((out, nudged))
}

/// Lower and upper bounds for one pair of flat vectors.
pub fn sandwich(
    config: &ModelConfig,
    v: &[f64],
    w: &[f64],
    opts: SandwichOptions,
) -> Result<QuasiflatReport, QuasiflatError> {
    check_len(v, config.d())?;
    check_len(w, config.d())?;
    let (v, nv) = make_transverse(config, v, "v", opts.allow_nudge)?;
    let (w, nw) = make_transverse(config, w, "w", opts.allow_nudge)?;

    let (lv, lw) = if config.sigma_mode() {
        (sigma_map(&v), sigma_map(&w))
    } else {
        (v.clone(), w.clone())
    };
    let k = opts
        .k
        .unwrap_or_else(|| threshold_k(&lv).max(threshold_k(&lw)));
    let av = spectral_differences(config, &lv, k)?;
    let aw = spectral_differences(config, &lw, k)?;
    let diffs: Vec<f64> = av.iter().zip(&aw).map(|(a, b)| a - b).collect();
    let lower = 0.5 * diffs.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let exact_inf_norm = inf_norm(&v, &w);
    let exact_one_norm = one_norm(&v, &w);
    if (lower - 0.5 * exact_inf_norm).abs() > 1e-9 {
        return Err(QuasiflatError::LowerMismatch {
            lower,
            expected: 0.5 * exact_inf_norm,
        });
    }
    let upper_plain = hofer_upper_plain(config, &lv, &lw)?;
    let upper_sigma = if config.sigma_mode() {
        Some(hofer_upper_sigma(config, &v, &w)?)
    } else {
        None
    };
    let group_bound = match upper_sigma {
        Some(u) => u <= 2.0 * exact_inf_norm + BOUND_SLACK,
        None => upper_plain <= 2.0 * exact_one_norm + BOUND_SLACK,
    };
    Ok(QuasiflatReport {
        v,
        w,
        k,
        lower,
        upper_plain,
        upper_sigma,
        exact_inf_norm,
        exact_one_norm,
        spectral_differences: diffs,
        nudged: nv || nw,
        group_bound,
    })
}

/// `count` pairs drawn uniformly from `[-bound, bound]^d`, reproducible from
/// `seed`.
pub fn random_pairs(seed: u64, count: usize, d: usize, bound: f64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (
                random_vector(&mut rng, d, bound),
                random_vector(&mut rng, d, bound),
            )
        })
        .collect()
}

/// Sandwich reports for a batch of pairs, in input order.
pub fn sweep(
    config: &ModelConfig,
    pairs: &[(Vec<f64>, Vec<f64>)],
    opts: SandwichOptions,
    exec: Execution,
) -> Result<Vec<QuasiflatReport>, QuasiflatError> {
    exec.try_map(pairs, |(v, w)| sandwich(config, v, w, opts))
}
