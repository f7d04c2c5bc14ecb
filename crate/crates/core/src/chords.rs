//! Intersection points of `τ_i^{2k}(L₀)` and `φ_v(L₂)`, with Maslov indices and
//! actions.
//!
//! A chord is a covector at signed radius `s` along the great circle. In a band
//! it is a solution of `θ_v(|s|) ≡ ±δ (mod 2π)`; in a twist shell of
//! `2k·ρ_i(|s|) ≡ ±δ (mod 2π)`. The `+δ` branch is realized at `s > 0`.
//!
//! Levels are written `2πm + δ` (branch `+`) or `2πm − δ` (branch `−`), up to an
//! overall sign for negative coefficients. The index formulas need the number of
//! half turns `⌊|level|/π⌋`, which is `2m` or `2m − 1` respectively (see
//! [`half_turns`]).

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::local_model::{ModelConfig, ModelError};

const TAU: f64 = 2.0 * PI;

/// Tolerance on `2πv_b ≡ ±δ (mod 2π)` in [`is_transverse`].
pub const TRANSVERSE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChordError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("v is not transverse: coefficient {coeff} of band {band} resonates with delta")]
    NonTransverse { band: usize, coeff: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

/// Position of a band relative to the twist shell: inside it (`r < ĥ_i`) or
/// beyond it (`r > ȟ_{i+1}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Inner,
    Outer,
}

/// Which root of a level equation inside a band: left of the bump maximum
/// (`check`) or right of it (`hat`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Check,
    Hat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Phi {
        band: usize,
        region: Region,
        side: Side,
    },
    Tau,
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::Tau => f.write_str("tau"),
            Sector::Phi { band, region, side } => {
                let region = match region {
                    Region::Inner => "inner",
                    Region::Outer => "outer",
                };
                let side = match side {
                    Side::Check => "check",
                    Side::Hat => "hat",
                };
                write!(f, "phi{band}-{region}-{side}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chord {
    pub sector: Sector,
    /// Signed radial parameter; positive exactly on the `+` branch.
    pub s: f64,
    pub r: f64,
    /// Turn count of the level: `|level| = 2πm ± δ`.
    pub m: u32,
    pub branch: Branch,
    /// The level `θ_v(r)` (or `2kρ_i(r)`) that was solved for.
    pub level: f64,
    /// `⌊|level| / π⌋`.
    pub half_turns: u32,
    /// Sign of `θ_v(r)` and `θ_v′(r)`, measured at the root (φ chords only;
    /// `0` for τ chords).
    pub theta_sign: i8,
    pub theta_prime_sign: i8,
    pub index: i64,
    pub action: f64,
}

impl Chord {
    /// Stable identifier, unique within one enumeration.
    pub fn label(&self) -> String {
        format!("{}:{}{}", self.sector, self.branch, self.m)
    }

    pub fn is_tau(&self) -> bool {
        matches!(self.sector, Sector::Tau)
    }
}

/// Half turns of the level `2πm + δ` (branch `+`) or `2πm − δ` (branch `−`).
pub fn half_turns(m: u32, branch: Branch) -> u32 {
    match branch {
        Branch::Plus => 2 * m,
        Branch::Minus => 2 * m - 1,
    }
}

/// True iff `2πv_b ≢ ±δ (mod 2π)` for every band.
pub fn is_transverse(v: &[f64], config: &ModelConfig) -> bool {
    first_resonance(v, config.delta()).is_none()
}

/// Coordinate shift applied to non-transverse inputs.
pub const NUDGE: f64 = 1e-6;

/// Shift each resonant coordinate by [`NUDGE`] until it is transverse.
/// Returns the new vector and whether anything moved.
pub fn nudge_to_transverse(v: &[f64], config: &ModelConfig) -> (Vec<f64>, bool) {
    let mut out = v.to_vec();
    let mut nudged = false;
    for x in out.iter_mut() {
        while first_resonance(std::slice::from_ref(x), config.delta()).is_some() {
            *x += NUDGE;
            nudged = true;
        }
    }
    (out, nudged)
}

fn first_resonance(v: &[f64], delta: f64) -> Option<usize> {
    v.iter().position(|&c| {
        let x = (TAU * c).rem_euclid(TAU);
        let near = |target: f64| {
            let diff = (x - target).rem_euclid(TAU);
            diff.min(TAU - diff) <= TRANSVERSE_TOL
        };
        near(delta) || near(TAU - delta)
    })
}

/// The `2k` intersection points inside twist shell `i`.
pub fn enumerate_tau_chords(
    config: &ModelConfig,
    i: usize,
    k: u32,
    v: &[f64],
) -> Result<Vec<Chord>, ChordError> {
    config.check_vector(v)?;
    let delta = config.delta();
    let mut levels = Vec::with_capacity(2 * k as usize);
    for m in 0..k {
        levels.push((m, Branch::Plus, TAU * m as f64 + delta));
    }
    for m in 1..=k {
        levels.push((m, Branch::Minus, TAU * m as f64 - delta));
    }
    let mut out = Vec::with_capacity(levels.len());
    for (m, branch, level) in levels {
        let r = config.solve_twist_level(i, k, level)?;
        let ht = half_turns(m, branch);
        let mut chord = Chord {
            sector: Sector::Tau,
            s: branch.sign() * r,
            r,
            m,
            branch,
            level,
            half_turns: ht,
            theta_sign: 0,
            theta_prime_sign: 0,
            index: 0,
            action: action(config, r, v, i, k),
        };
        chord.index = maslov_index(config, &chord, k);
        out.push(chord);
    }
    out.sort_by(|a, b| a.r.total_cmp(&b.r));
    Ok(out)
}

/// Intersection points inside the bands, for the twist `τ_i^{2k}`.
pub fn enumerate_phi_chords(
    config: &ModelConfig,
    v: &[f64],
    i: usize,
    k: u32,
) -> Result<Vec<Chord>, ChordError> {
    config.check_vector(v)?;
    if let Some(band) = first_resonance(v, config.delta()) {
        return Err(ChordError::NonTransverse {
            band,
            coeff: v[band],
        });
    }
    let delta = config.delta();
    let mut out = Vec::new();
    for (band, &coeff) in v.iter().enumerate() {
        if coeff == 0.0 {
            continue;
        }
        let top = TAU * coeff.abs();
        let sign = coeff.signum();
        let region = if band < i {
            Region::Inner
        } else {
            Region::Outer
        };
        let mut magnitudes = Vec::new();
        for m in 0u32.. {
            let plus = TAU * m as f64 + delta;
            if plus >= top {
                break;
            }
            magnitudes.push((m, plus, true));
        }
        for m in 1u32.. {
            let minus = TAU * m as f64 - delta;
            if minus >= top {
                break;
            }
            magnitudes.push((m, minus, false));
        }
        for (m, magnitude, plus_form) in magnitudes {
            let level = sign * magnitude;
            // level ≡ +δ exactly when the sign and the form agree.
            let branch = if (sign > 0.0) == plus_form {
                Branch::Plus
            } else {
                Branch::Minus
            };
            let Some((check, hat)) = config.solve_bump_level(band, coeff, level)? else {
                continue;
            };
            for (side, r) in [(Side::Check, check), (Side::Hat, hat)] {
                let mut chord = Chord {
                    sector: Sector::Phi { band, region, side },
                    s: branch.sign() * r,
                    r,
                    m,
                    branch,
                    level,
                    half_turns: half_turns(
                        m,
                        if plus_form {
                            Branch::Plus
                        } else {
                            Branch::Minus
                        },
                    ),
                    theta_sign: sign_of(config.theta_v(r, v)),
                    theta_prime_sign: sign_of(config.theta_v_prime(r, v)),
                    index: 0,
                    action: action(config, r, v, i, k),
                };
                chord.index = maslov_index(config, &chord, k);
                out.push(chord);
            }
        }
    }
    out.sort_by(|a, b| a.r.total_cmp(&b.r));
    Ok(out)
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// All chords of `τ_i^{2k}(L₀) ∩ φ_v(L₂)`, sorted by radius.
pub fn enumerate_chords(
    config: &ModelConfig,
    v: &[f64],
    i: usize,
    k: u32,
) -> Result<Vec<Chord>, ChordError> {
    let mut all = enumerate_phi_chords(config, v, i, k)?;
    all.extend(enumerate_tau_chords(config, i, k, v)?);
    all.sort_by(|a, b| a.r.total_cmp(&b.r));
    Ok(all)
}

/// Closed-form Maslov index.
pub fn maslov_index(config: &ModelConfig, c: &Chord, k: u32) -> i64 {
    let n = config.n() as i64;
    let k = k as i64;
    let m = c.half_turns as i64;
    match c.sector {
        Sector::Tau => n + (2 * k - 1 - m) * (n - 1),
        Sector::Phi { region, .. } => {
            let base = match (c.theta_sign > 0, c.theta_prime_sign > 0) {
                (true, true) => n + (n - 1) * m,
                (true, false) => n + (n - 1) * m - 1,
                (false, true) => -(n - 1) * m + 1,
                (false, false) => -(n - 1) * m,
            };
            match region {
                Region::Inner => base,
                Region::Outer => base + 2 * k * (n - 1),
            }
        }
    }
}

/// `A(c) = h_{φ_v(L₂)} − h_{τ_i^{2k}(L₀)}` at radius `r`. The ambient term `f`
/// enters both primitives at the same point and cancels.
pub fn action(config: &ModelConfig, r: f64, v: &[f64], i: usize, k: u32) -> f64 {
    let phi = config.theta_v(r, v) * r - config.hamiltonian_value(r, v);
    let twist = if k == 0 {
        0.0
    } else {
        let kk = 2.0 * k as f64;
        kk * config.rho(i, r) * r - kk * config.rho_integral(i, r)
    };
    phi - twist
}

/// Largest possible inner φ index and smallest possible outer φ index for
/// `‖v‖∞ ≤ bound`.
pub fn phi_degree_bounds(config: &ModelConfig, bound: f64, k: u32) -> (i64, i64) {
    let n = config.n() as i64;
    let m = (2.0 * bound).floor() as i64;
    (n + m * (n - 1), (2 * k as i64 - m) * (n - 1))
}
