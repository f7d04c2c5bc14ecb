//! Filtered Floer complexes of `τ_i^{2k}(L₀)` and `φ_v(L₂)`, the spectral
//! differences `a_i(v)`, and the boundary-depth scenario.
//!
//! Generators are the chords of [`crate::chords`]. Holomorphic strips are not
//! computed; the differential is fixed by a [`DifferentialRule`]. Every rule
//! pairs the two roots of the same level inside one band (higher degree maps to
//! lower degree) and sets everything else to zero, so twist chords always
//! survive to homology.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::chords::{
    enumerate_phi_chords, enumerate_tau_chords, phi_degree_bounds, Chord, ChordError, Region,
    Sector, Side,
};
use crate::filtered_complex::{ComplexError, FilteredComplex, Generator, Reduction};
use crate::local_model::{ModelConfig, ModelError};
use crate::persistence::{boundary_depth, spectral_invariants, Barcode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FloerError {
    #[error(transparent)]
    Chord(#[from] ChordError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("twist power k = {k} is below the threshold k0 = {k0} for this vector")]
    Threshold { k: u32, k0: u32 },
    #[error("rule {rule} needs n ≥ 3, got n = {n}")]
    RuleUnavailable { rule: DifferentialRule, n: u32 },
    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),
}

/// How the differential between band chords is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DifferentialRule {
    /// n ≥ 3: degrees separate everything except the band pairs; pairs whose
    /// target is the only candidate of the right degree and action are counted
    /// as forced.
    DegreeVanishing,
    /// Explicit strips of the one-dimensional picture: `∂č = ĉ` on each level.
    DiskPairing,
    /// n = 2: inherits the disk pairs by a symmetry argument. This is an
    /// assumption carried over, not an independent computation.
    SymmetryReduced,
}

impl DifferentialRule {
    pub fn for_dimension(n: u32) -> Self {
        match n {
            0 | 1 => DifferentialRule::DiskPairing,
            2 => DifferentialRule::SymmetryReduced,
            _ => DifferentialRule::DegreeVanishing,
        }
    }

    pub fn is_assumption(self) -> bool {
        self == DifferentialRule::SymmetryReduced
    }

    pub fn name(self) -> &'static str {
        match self {
            DifferentialRule::DegreeVanishing => "degree-vanishing",
            DifferentialRule::DiskPairing => "disk-pairing",
            DifferentialRule::SymmetryReduced => "symmetry-reduced",
        }
    }
}

impl fmt::Display for DifferentialRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DifferentialRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "degree-vanishing" => Ok(DifferentialRule::DegreeVanishing),
            "disk-pairing" => Ok(DifferentialRule::DiskPairing),
            "symmetry-reduced" => Ok(DifferentialRule::SymmetryReduced),
            other => Err(format!(
                "unknown rule {other:?} (expected degree-vanishing, disk-pairing or symmetry-reduced)"
            )),
        }
    }
}

/// Twist shell `i` with power `2k` against `φ_v(L₂)`. `k = 0` means no twist.
#[derive(Debug, Clone, PartialEq)]
pub struct FloerScenario {
    pub i: usize,
    pub k: u32,
    pub v: Vec<f64>,
}

impl FloerScenario {
    pub fn new(i: usize, k: u32, v: Vec<f64>) -> Self {
        FloerScenario { i, k, v }
    }

    /// Twist shell 0 with power `2ℓ` against `φ_{(k)}` (coefficient `k` in the
    /// first band).
    pub fn boundary_depth(k: u32, ell: u32) -> Self {
        FloerScenario {
            i: 0,
            k: ell,
            v: vec![k as f64],
        }
    }
}

#[derive(Debug, Clone)]
pub struct FloerComplex {
    pub scenario: FloerScenario,
    pub rule: DifferentialRule,
    pub chords: Vec<Chord>,
    pub complex: FilteredComplex,
    /// Nonzero differential entries as (source, target) chord positions.
    pub differential: Vec<(usize, usize)>,
    /// Entries whose target is the unique generator of the right degree below
    /// the source's action (computed for every rule).
    pub forced_pairs: usize,
}

impl FloerComplex {
    pub fn reduction(&self) -> Result<Reduction, FloerError> {
        Ok(self.complex.reduce()?)
    }

    pub fn barcode(&self) -> Result<Barcode, FloerError> {
        Ok(self.complex.reduce_to_barcode()?)
    }
}

pub fn build_complex(
    config: &ModelConfig,
    scenario: &FloerScenario,
    rule: DifferentialRule,
) -> Result<FloerComplex, FloerError> {
    if rule == DifferentialRule::DegreeVanishing && config.n() < 3 {
        return Err(FloerError::RuleUnavailable {
            rule,
            n: config.n(),
        });
    }
    let FloerScenario { i, k, ref v } = *scenario;
    if i >= config.twists() {
        return Err(ModelError::OutOfRange {
            index: i,
            count: config.twists(),
        }
        .into());
    }
    let mut chords = enumerate_phi_chords(config, v, i, k)?;
    let tau = enumerate_tau_chords(config, i, k, v)?;
    if rule == DifferentialRule::DegreeVanishing {
        let mut degrees: Vec<i64> = tau.iter().map(|c| c.index).collect();
        degrees.sort_unstable();
        if degrees.windows(2).any(|w| w[1] - w[0] < 2) {
            return Err(FloerError::ModelInconsistency(
                "twist chord degrees are not separated by at least 2".into(),
            ));
        }
    }
    chords.extend(tau);

    let generators = chords
        .iter()
        .map(|c| Generator::new(c.label(), c.index, c.action))
        .collect();
    let mut complex = FilteredComplex::new(generators);

    // Pair the two roots of each band level.
    let mut levels: BTreeMap<(usize, String), [Option<usize>; 2]> = BTreeMap::new();
    for (pos, c) in chords.iter().enumerate() {
        if let Sector::Phi { band, side, .. } = c.sector {
            let slot = levels
                .entry((band, format!("{}{}", c.branch, c.m)))
                .or_default();
            slot[(side == Side::Hat) as usize] = Some(pos);
        }
    }
    let mut differential = Vec::new();
    for ((band, level), [check, hat]) in levels {
        let (Some(check), Some(hat)) = (check, hat) else {
            return Err(FloerError::ModelInconsistency(format!(
                "band {band} level {level} has a single root"
            )));
        };
        let (src, tgt) = if chords[check].index > chords[hat].index {
            (check, hat)
        } else {
            (hat, check)
        };
        if chords[src].index != chords[tgt].index + 1 {
            return Err(FloerError::ModelInconsistency(format!(
                "band {band} level {level}: roots differ in degree by {}",
                chords[src].index - chords[tgt].index
            )));
        }
        if chords[src].action <= chords[tgt].action {
            return Err(FloerError::ModelInconsistency(format!(
                "band {band} level {level}: differential does not decrease action"
            )));
        }
        differential.push((src, tgt));
    }
    differential.sort_unstable();
    for &(src, tgt) in &differential {
        complex.add_boundary(&chords[src].label(), &chords[tgt].label());
    }
    let forced_pairs = differential
        .iter()
        .filter(|&&(src, _)| {
            chords
                .iter()
                .filter(|c| c.index == chords[src].index - 1 && c.action < chords[src].action)
                .count()
                == 1
        })
        .count();

    complex
        .validate()
        .map_err(|e| FloerError::Complex(ComplexError::Invalid(e)))?;

    let out = FloerComplex {
        scenario: scenario.clone(),
        rule,
        chords,
        complex,
        differential,
        forced_pairs,
    };
    if rule == DifferentialRule::DegreeVanishing {
        check_twist_homology(&out)?;
    }
    Ok(out)
}

/// Homology must be one class per twist chord, in the twist chord's degree.
fn check_twist_homology(fc: &FloerComplex) -> Result<(), FloerError> {
    let mut expected: BTreeMap<i64, usize> = BTreeMap::new();
    for c in fc.chords.iter().filter(|c| c.is_tau()) {
        *expected.entry(c.index).or_default() += 1;
    }
    let ranks = fc.complex.homology_ranks()?;
    if ranks != expected {
        return Err(FloerError::ModelInconsistency(format!(
            "homology ranks {ranks:?}, expected one per twist chord degree {expected:?}"
        )));
    }
    Ok(())
}

/// `k₀(v) = 2(⌈‖v‖∞⌉ + 3)`.
pub fn threshold_k(v: &[f64]) -> u32 {
    let norm = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    2 * (norm.ceil() as u32 + 3)
}

/// Degree of the distinguished class: `n + k(n − 1)`.
pub fn distinguished_degree(config: &ModelConfig, k: u32) -> i64 {
    let n = config.n() as i64;
    n + k as i64 * (n - 1)
}

/// The unique twist chord of degree `n + k(n−1)` in shell `i`, after checking
/// that no band chord can share or straddle that degree.
pub fn distinguished_chord(
    config: &ModelConfig,
    i: usize,
    v: &[f64],
    k: u32,
) -> Result<Chord, FloerError> {
    let degree = distinguished_degree(config, k);
    let bound = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (inner_cap, outer_floor) = phi_degree_bounds(config, bound, k);
    if !(inner_cap < degree && degree < outer_floor) {
        return Err(FloerError::ModelInconsistency(format!(
            "degree gap fails: inner ≤ {inner_cap}, target {degree}, outer ≥ {outer_floor}"
        )));
    }
    for c in enumerate_phi_chords(config, v, i, k)? {
        let Sector::Phi { region, .. } = c.sector else {
            continue;
        };
        let ok = match region {
            Region::Inner => c.index < degree,
            Region::Outer => c.index > degree,
        };
        if !ok {
            return Err(FloerError::ModelInconsistency(format!(
                "band chord {} has degree {} on the wrong side of {degree}",
                c.label(),
                c.index
            )));
        }
    }
    let mut hits = enumerate_tau_chords(config, i, k, v)?
        .into_iter()
        .filter(|c| c.index == degree);
    match (hits.next(), hits.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(FloerError::ModelInconsistency(format!(
            "twist shell {i} has no unique chord of degree {degree}"
        ))),
    }
}

/// Spectral invariant of the distinguished class in shell `i`, read from the
/// reduced barcode and checked against the chord action.
pub fn distinguished_invariant(
    config: &ModelConfig,
    i: usize,
    v: &[f64],
    k: u32,
) -> Result<f64, FloerError> {
    let chord = distinguished_chord(config, i, v, k)?;
    let rule = DifferentialRule::for_dimension(config.n());
    let fc = build_complex(config, &FloerScenario::new(i, k, v.to_vec()), rule)?;
    let reduction = fc.reduction()?;
    let mut classes = reduction
        .essential
        .iter()
        .filter(|g| g.degree == chord.index);
    let class = match (classes.next(), classes.next()) {
        (Some(g), None) => g,
        _ => {
            return Err(FloerError::ModelInconsistency(format!(
                "homology of shell {i} is not one-dimensional in degree {}",
                chord.index
            )))
        }
    };
    let invariants = spectral_invariants(&reduction.barcode());
    if class.id != chord.label() || !invariants.contains(&class.action) {
        return Err(FloerError::ModelInconsistency(format!(
            "distinguished class in shell {i} is not carried by {}",
            chord.label()
        )));
    }
    Ok(class.action)
}

/// `a_i(v)`: difference of the distinguished spectral invariants of shells
/// `i + 1` and `i`. Requires `k ≥ k₀(v)`.
pub fn spectral_a(config: &ModelConfig, i: usize, v: &[f64], k: u32) -> Result<f64, FloerError> {
    let k0 = threshold_k(v);
    if k < k0 {
        return Err(FloerError::Threshold { k, k0 });
    }
    if i >= config.bands() {
        return Err(ModelError::OutOfRange {
            index: i,
            count: config.bands(),
        }
        .into());
    }
    let upper = distinguished_invariant(config, i + 1, v, k)?;
    let lower = distinguished_invariant(config, i, v, k)?;
    Ok(upper - lower)
}

/// All `a_i(v)` for `i = 0..bands`, evaluating each shell once.
pub fn spectral_differences(
    config: &ModelConfig,
    v: &[f64],
    k: u32,
) -> Result<Vec<f64>, FloerError> {
    let k0 = threshold_k(v);
    if k < k0 {
        return Err(FloerError::Threshold { k, k0 });
    }
    let invariants = (0..config.twists())
        .map(|i| distinguished_invariant(config, i, v, k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(invariants.windows(2).map(|w| w[1] - w[0]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryDepth {
    pub k: u32,
    pub ell: u32,
    pub beta: f64,
    pub lower_bound: f64,
    /// `A(č⁺_{k,0}) − A(ĉ⁺_{k,0})`, the bar of the lowest positive level.
    pub first_pair_gap: f64,
}

/// Boundary depth of the complex for `τ₀^{2ℓ}` against `φ_{(k)}` and the
/// closed-form lower bound `k∫θ − δ(t̂ − ť) + C` over the `k = 1` roots.
pub fn boundary_depth_scenario(
    config: &ModelConfig,
    k: u32,
    ell: u32,
    rule: DifferentialRule,
) -> Result<BoundaryDepth, FloerError> {
    let scenario = FloerScenario::boundary_depth(k, ell);
    let fc = build_complex(config, &scenario, rule)?;
    let beta = boundary_depth(&fc.barcode()?);

    let delta = config.delta();
    let (check1, hat1) = config
        .solve_bump_level(0, 1.0, delta)?
        .ok_or_else(|| FloerError::ModelInconsistency("no k = 1 roots".into()))?;
    let unit = [1.0];
    let area = config.hamiltonian_value(hat1, &unit) - config.hamiltonian_value(check1, &unit);
    let (band_lo, _) = config.partition().band(0);
    let (s_lo, s_hi) = config.partition().bump().support();
    let c = -2.0 * config.ambient().max_abs_on(band_lo + s_lo, band_lo + s_hi);
    let lower_bound = k as f64 * area - delta * (hat1 - check1) + c;

    let find = |side: Side| {
        fc.chords.iter().find(|ch| {
            matches!(ch.sector, Sector::Phi { band: 0, side: s, .. } if s == side)
                && ch.branch == crate::chords::Branch::Plus
                && ch.m == 0
        })
    };
    let first_pair_gap = match (find(Side::Check), find(Side::Hat)) {
        (Some(a), Some(b)) => a.action - b.action,
        _ => 0.0,
    };
    Ok(BoundaryDepth {
        k,
        ell,
        beta,
        lower_bound,
        first_pair_gap,
    })
}
