//! Radial shells, the bump profile `θ`, the twist profile `ρ` and the level
//! equation solvers.
//!
//! All geometry is radial: a covector of norm `t` is rotated along its geodesic
//! by the angle `θ_v(t)` (for `φ_v`) or `2k·ρ_i(t)` (for `τ_i^{2k}`).
//!
//! Shell boundaries are stored as one increasing list
//! `[ĥ₀, ȟ₁, ĥ₁, …, ȟ_d, ĥ_d, ȟ_{d+1}]`. With 0-based indices, band `j`
//! (where `θ_v` lives, coefficient `v[j]`) is `(knots[2j+1], knots[2j+2])` and
//! twist shell `i` (where `ρ_i` drops from π to 0) is `(knots[2i], knots[2i+1])`.
//! Band `j` sits between twist shells `j` and `j + 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const TAU: f64 = 2.0 * PI;

/// Half-width of the support of `θ`. Fixed by requiring max `2π` and total
/// integral 1 for the profile `2π(1 − u²)⁴`, since `∫₋₁¹ (1 − u²)⁴ du = 256/315`.
pub const BUMP_HALF_WIDTH: f64 = 315.0 / (512.0 * PI);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("shell list must have even length ≥ 4, got {0}")]
    ShellCount(usize),
    #[error("shell boundaries must be finite, positive and strictly increasing (position {0})")]
    NotIncreasing(usize),
    #[error("band width {hbar} is too small for the bump profile (need > {min})")]
    BandTooNarrow { hbar: f64, min: f64 },
    #[error("sphere dimension n = {0} unsupported (need n ≥ 2)")]
    Dimension(u32),
    #[error("delta = {0} must lie strictly between 0 and π")]
    Delta(f64),
    #[error("partition has {bands} bands but {expected} are required")]
    BandCount { bands: usize, expected: usize },
    #[error("vector has {len} coordinates but the model has {bands} bands")]
    VectorTooLong { len: usize, bands: usize },
    #[error("index {index} out of range (have {count})")]
    OutOfRange { index: usize, count: usize },
    #[error("level {level} touches an extremum of the profile (non-transverse)")]
    NonTransverse { level: f64 },
    #[error("ambient offset table must have increasing finite radii")]
    AmbientTable,
}

/// The increasing shell boundaries together with the derived widths.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPartition {
    knots: Vec<f64>,
    hbar: f64,
    iota: f64,
    epsilon: f64,
}

impl RadialPartition {
    pub fn new(knots: Vec<f64>) -> Result<Self, ModelError> {
        if knots.len() < 4 || !knots.len().is_multiple_of(2) {
            return Err(ModelError::ShellCount(knots.len()));
        }
        for (p, w) in knots.windows(2).enumerate() {
            if !(w[0].is_finite() && w[1].is_finite() && w[0] < w[1]) {
                return Err(ModelError::NotIncreasing(p + 1));
            }
        }
        if knots[0] <= 0.0 {
            return Err(ModelError::NotIncreasing(0));
        }
        let d = knots.len() / 2 - 1;
        let hbar = (0..d)
            .map(|j| knots[2 * j + 2] - knots[2 * j + 1])
            .fold(f64::INFINITY, f64::min);
        let epsilon = (0..=d)
            .map(|i| knots[2 * i + 1] - knots[2 * i])
            .fold(f64::INFINITY, f64::min);
        let iota = hbar / 2.0 - BUMP_HALF_WIDTH;
        if iota <= 0.0 {
            return Err(ModelError::BandTooNarrow {
                hbar,
                min: 2.0 * BUMP_HALF_WIDTH,
            });
        }
        Ok(RadialPartition {
            knots,
            hbar,
            iota,
            epsilon,
        })
    }

    /// Evenly spaced layout with `bands` bands of width 0.5 separated by twist
    /// shells of width 0.2, starting at 0.2.
    pub fn standard(bands: usize) -> Self {
        let mut knots = vec![0.2];
        for _ in 0..bands {
            let last = *knots.last().unwrap();
            knots.push(last + 0.2);
            knots.push(last + 0.7);
        }
        let last = *knots.last().unwrap();
        knots.push(last + 0.2);
        RadialPartition::new(knots).expect("standard layout is valid")
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn bands(&self) -> usize {
        self.knots.len() / 2 - 1
    }

    pub fn twists(&self) -> usize {
        self.bands() + 1
    }

    /// `(ȟ, ĥ)` of band `j`.
    pub fn band(&self, j: usize) -> (f64, f64) {
        (self.knots[2 * j + 1], self.knots[2 * j + 2])
    }

    /// `(ĥ_i, ȟ_{i+1})` of twist shell `i`.
    pub fn twist_shell(&self, i: usize) -> (f64, f64) {
        (self.knots[2 * i], self.knots[2 * i + 1])
    }

    /// Smallest band width.
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Gap between a band's inner boundary and the support of its bump.
    pub fn iota(&self) -> f64 {
        self.iota
    }

    /// Smallest twist shell width.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn bump(&self) -> BumpProfile {
        BumpProfile { hbar: self.hbar }
    }

    /// Support `[a, b]` of the transition of `ρ_i`.
    pub fn twist_window(&self, i: usize) -> (f64, f64) {
        let h = self.knots[2 * i];
        (h + self.epsilon / 3.0, h + self.epsilon / 2.0)
    }
}

/// `θ(t) = 2π(1 − u²)⁴` with `u = (t − ħ/2)/w`, supported in `[ι, ħ − ι]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpProfile {
    hbar: f64,
}

// Antiderivative of (1 − u²)⁴.
fn bump_poly(u: f64) -> f64 {
    let u2 = u * u;
    u * (1.0 + u2 * (-4.0 / 3.0 + u2 * (6.0 / 5.0 + u2 * (-4.0 / 7.0 + u2 / 9.0))))
}

impl BumpProfile {
    pub fn new(hbar: f64) -> Self {
        BumpProfile { hbar }
    }

    pub fn center(&self) -> f64 {
        self.hbar / 2.0
    }

    pub fn support(&self) -> (f64, f64) {
        (
            self.center() - BUMP_HALF_WIDTH,
            self.center() + BUMP_HALF_WIDTH,
        )
    }

    fn coord(&self, t: f64) -> f64 {
        (t - self.center()) / BUMP_HALF_WIDTH
    }

    pub fn value(&self, t: f64) -> f64 {
        let u = self.coord(t);
        if u.abs() >= 1.0 {
            return 0.0;
        }
        TAU * (1.0 - u * u).powi(4)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let u = self.coord(t);
        if u.abs() >= 1.0 {
            return 0.0;
        }
        TAU * 4.0 * (1.0 - u * u).powi(3) * (-2.0 * u) / BUMP_HALF_WIDTH
    }

    /// `∫₀ᵗ θ`.
    pub fn integral(&self, t: f64) -> f64 {
        let u = self.coord(t).clamp(-1.0, 1.0);
        TAU * BUMP_HALF_WIDTH * (bump_poly(u) - bump_poly(-1.0))
    }

    /// The two solutions `ť < t̂` of `θ(t) = q` for `0 < q < 2π`.
    pub fn solve(&self, q: f64) -> Result<Option<(f64, f64)>, ModelError> {
        if q <= 0.0 {
            return Err(ModelError::NonTransverse { level: q });
        }
        if q > TAU {
            return Ok(None);
        }
        if q == TAU {
            return Err(ModelError::NonTransverse { level: q });
        }
        let (lo, hi) = self.support();
        let c = self.center();
        let check = bisect(lo, c, |t| self.value(t) - q);
        let hat = bisect(c, hi, |t| q - self.value(t));
        Ok(Some((check, hat)))
    }
}

/// Root of an increasing function `g` on `[lo, hi]` with `g(lo) ≤ 0 ≤ g(hi)`,
/// refined until the bracket cannot shrink further.
pub(crate) fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Tabulated ambient correction `f(r)`, linearly interpolated and constant
/// beyond the table. Empty means `f ≡ 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AmbientOffset {
    points: Vec<(f64, f64)>,
}

impl AmbientOffset {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        let finite = points.iter().all(|p| p.0.is_finite() && p.1.is_finite());
        let increasing = points.windows(2).all(|w| w[0].0 < w[1].0);
        if !finite || !increasing {
            return Err(ModelError::AmbientTable);
        }
        Ok(AmbientOffset { points })
    }

    pub fn is_zero(&self) -> bool {
        self.points.iter().all(|p| p.1 == 0.0)
    }

    pub fn value(&self, r: f64) -> f64 {
        let pts = &self.points;
        match pts.len() {
            0 => 0.0,
            _ if r <= pts[0].0 => pts[0].1,
            _ if r >= pts[pts.len() - 1].0 => pts[pts.len() - 1].1,
            _ => {
                let k = pts.partition_point(|p| p.0 <= r);
                let (a, b) = (pts[k - 1], pts[k]);
                a.1 + (b.1 - a.1) * (r - a.0) / (b.0 - a.0)
            }
        }
    }

    /// `max |f|` over `[lo, hi]`; attained at an endpoint or a table node.
    pub fn max_abs_on(&self, lo: f64, hi: f64) -> f64 {
        self.points
            .iter()
            .filter(|p| p.0 > lo && p.0 < hi)
            .map(|p| p.1.abs())
            .chain([self.value(lo).abs(), self.value(hi).abs()])
            .fold(0.0, f64::max)
    }
}

/// Sphere dimension, fiber separation and radial data of the local model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    n: u32,
    delta: f64,
    d: usize,
    sigma_mode: bool,
    partition: RadialPartition,
    ambient: AmbientOffset,
}

impl ModelConfig {
    /// `d` is the flat dimension; the partition needs `d` bands, or `2d` in
    /// sigma mode (one pair of bands per coordinate).
    pub fn new(
        n: u32,
        delta: f64,
        d: usize,
        partition: RadialPartition,
        sigma_mode: bool,
    ) -> Result<Self, ModelError> {
        if n < 2 {
            return Err(ModelError::Dimension(n));
        }
        if !(delta > 0.0 && delta < PI) {
            return Err(ModelError::Delta(delta));
        }
        let expected = if sigma_mode { 2 * d } else { d };
        if partition.bands() != expected {
            return Err(ModelError::BandCount {
                bands: partition.bands(),
                expected,
            });
        }
        Ok(ModelConfig {
            n,
            delta,
            d,
            sigma_mode,
            partition,
            ambient: AmbientOffset::default(),
        })
    }

    pub fn standard(n: u32, delta: f64, d: usize) -> Result<Self, ModelError> {
        Self::new(n, delta, d, RadialPartition::standard(d), false)
    }

    /// Sigma-mode layout: `2d` standard bands.
    pub fn sigma(n: u32, delta: f64, d: usize) -> Result<Self, ModelError> {
        Self::new(n, delta, d, RadialPartition::standard(2 * d), true)
    }

    pub fn with_ambient(mut self, ambient: AmbientOffset) -> Self {
        self.ambient = ambient;
        self
    }

    pub fn with_dimension(&self, n: u32) -> Result<Self, ModelError> {
        let mut out = Self::new(
            n,
            self.delta,
            self.d,
            self.partition.clone(),
            self.sigma_mode,
        )?;
        out.ambient = self.ambient.clone();
        Ok(out)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Flat dimension.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sigma_mode(&self) -> bool {
        self.sigma_mode
    }

    pub fn partition(&self) -> &RadialPartition {
        &self.partition
    }

    pub fn ambient(&self) -> &AmbientOffset {
        &self.ambient
    }

    pub fn bands(&self) -> usize {
        self.partition.bands()
    }

    pub fn twists(&self) -> usize {
        self.partition.twists()
    }

    pub fn check_vector(&self, v: &[f64]) -> Result<(), ModelError> {
        if v.len() > self.bands() {
            return Err(ModelError::VectorTooLong {
                len: v.len(),
                bands: self.bands(),
            });
        }
        Ok(())
    }

    fn check_band(&self, j: usize) -> Result<(), ModelError> {
        if j >= self.bands() {
            return Err(ModelError::OutOfRange {
                index: j,
                count: self.bands(),
            });
        }
        Ok(())
    }

    fn check_twist(&self, i: usize) -> Result<(), ModelError> {
        if i >= self.twists() {
            return Err(ModelError::OutOfRange {
                index: i,
                count: self.twists(),
            });
        }
        Ok(())
    }

    fn band_start(&self, j: usize) -> f64 {
        self.partition.band(j).0
    }

    /// `θ_j(t) = θ(t − ȟ_j)`.
    pub fn theta_band(&self, j: usize, t: f64) -> f64 {
        self.partition.bump().value(t - self.band_start(j))
    }

    /// Band whose bump support contains `t`, if any.
    pub fn band_at(&self, t: f64) -> Option<usize> {
        let (lo, hi) = self.partition.bump().support();
        (0..self.bands()).find(|&j| {
            let s = self.band_start(j);
            t > s + lo && t < s + hi
        })
    }

    /// `θ_v(t) = Σ_j v_j θ(t − ȟ_j)`; coordinates beyond `v.len()` are zero.
    pub fn theta_v(&self, t: f64, v: &[f64]) -> f64 {
        match self.band_at(t) {
            Some(j) if j < v.len() => v[j] * self.theta_band(j, t),
            _ => 0.0,
        }
    }

    pub fn theta_v_prime(&self, t: f64, v: &[f64]) -> f64 {
        match self.band_at(t) {
            Some(j) if j < v.len() => {
                v[j] * self.partition.bump().derivative(t - self.band_start(j))
            }
            _ => 0.0,
        }
    }

    /// `H_v` at radius `r`: `∫₀ʳ θ_v`.
    pub fn hamiltonian_value(&self, r: f64, v: &[f64]) -> f64 {
        let bump = self.partition.bump();
        v.iter()
            .enumerate()
            .take(self.bands())
            .map(|(j, &c)| c * bump.integral(r - self.band_start(j)))
            .sum()
    }

    /// `ρ_i(t)`: π up to `ĥ_i + ε/3`, smoothstep down to 0 at `ĥ_i + ε/2`.
    pub fn rho(&self, i: usize, t: f64) -> f64 {
        let (a, b) = self.partition.twist_window(i);
        if t <= a {
            PI
        } else if t >= b {
            0.0
        } else {
            let x = (t - a) / (b - a);
            PI * (1.0 - x * x * (3.0 - 2.0 * x))
        }
    }

    pub fn rho_prime(&self, i: usize, t: f64) -> f64 {
        let (a, b) = self.partition.twist_window(i);
        if t <= a || t >= b {
            0.0
        } else {
            let x = (t - a) / (b - a);
            -PI * 6.0 * x * (1.0 - x) / (b - a)
        }
    }

    /// `∫₀ᵗ ρ_i` for `t ≥ 0`.
    pub fn rho_integral(&self, i: usize, t: f64) -> f64 {
        let (a, b) = self.partition.twist_window(i);
        if t <= a {
            PI * t
        } else {
            let x = ((t - a) / (b - a)).min(1.0);
            PI * a + PI * (b - a) * (x - x.powi(3) + 0.5 * x.powi(4))
        }
    }

    /// Solutions `ť < t̂` of `coeff · θ_j(t) = level` inside band `j`.
    pub fn solve_bump_level(
        &self,
        j: usize,
        coeff: f64,
        level: f64,
    ) -> Result<Option<(f64, f64)>, ModelError> {
        self.check_band(j)?;
        if coeff == 0.0 {
            return Err(ModelError::NonTransverse { level });
        }
        let roots = self.partition.bump().solve(level / coeff)?;
        let s = self.band_start(j);
        Ok(roots.map(|(a, b)| (a + s, b + s)))
    }

    /// The unique `t` with `2k · ρ_i(t) = level`, for `0 < level < 2πk`.
    pub fn solve_twist_level(&self, i: usize, k: u32, level: f64) -> Result<f64, ModelError> {
        self.check_twist(i)?;
        let top = TAU * k as f64;
        if !(level > 0.0 && level < top) {
            return Err(ModelError::NonTransverse { level });
        }
        let (a, b) = self.partition.twist_window(i);
        let scale = 2.0 * k as f64;
        Ok(bisect(a, b, |t| level - scale * self.rho(i, t)))
    }
}

// Config JSON: {"n":2,"delta":1.047,"d":3,"shells":[...],"sigma_mode":false,"ambient_offset":[[r,f],...]}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: u32,
    pub delta: f64,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shells: Option<Vec<f64>>,
    #[serde(default)]
    pub sigma_mode: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient_offset: Option<Vec<(f64, f64)>>,
}

impl TryFrom<ConfigFile> for ModelConfig {
    type Error = ModelError;

    fn try_from(raw: ConfigFile) -> Result<Self, ModelError> {
        let bands = if raw.sigma_mode { 2 * raw.d } else { raw.d };
        let partition = match raw.shells {
            Some(knots) => RadialPartition::new(knots)?,
            None => RadialPartition::standard(bands),
        };
        let config = ModelConfig::new(raw.n, raw.delta, raw.d, partition, raw.sigma_mode)?;
        Ok(match raw.ambient_offset {
            Some(points) => config.with_ambient(AmbientOffset::new(points)?),
            None => config,
        })
    }
}

impl From<&ModelConfig> for ConfigFile {
    fn from(c: &ModelConfig) -> Self {
        ConfigFile {
            n: c.n,
            delta: c.delta,
            d: c.d,
            shells: Some(c.partition.knots.clone()),
            sigma_mode: c.sigma_mode,
            ambient_offset: (!c.ambient.points.is_empty()).then(|| c.ambient.points.clone()),
        }
    }
}
