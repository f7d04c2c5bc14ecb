//! Barcodes, δ-matchings, bottleneck distance, boundary depth and spectral
//! invariants.
//!
//! Bars are half-open intervals `(left, right]` with `left < right`; an infinite
//! bar has `right = f64::INFINITY`. A [`Barcode`] is a finite multiset of bars kept
//! in canonical order, so two barcodes are equal as multisets iff they compare
//! equal with `==`.

use std::cmp::Ordering;
use std::collections::VecDeque;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PersistenceError {
    #[error("bar ({left}, {right}] is empty or malformed: need finite left < right")]
    InvalidBar { left: f64, right: f64 },
    #[error("bar multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("matching pair ({0}, {1}) is out of range")]
    IndexOutOfRange(usize, usize),
    #[error("bar {index} on side {side} is matched more than once")]
    DuplicateUse { side: char, index: usize },
}

/// A bar `(left, right]` with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub left: f64,
    pub right: f64,
    pub multiplicity: u32,
}

impl Bar {
    pub fn new(left: f64, right: f64) -> Result<Self, PersistenceError> {
        Self::with_multiplicity(left, right, 1)
    }

    pub fn infinite(left: f64) -> Result<Self, PersistenceError> {
        Self::new(left, f64::INFINITY)
    }

    pub fn with_multiplicity(
        left: f64,
        right: f64,
        multiplicity: u32,
    ) -> Result<Self, PersistenceError> {
        if !left.is_finite() || right.is_nan() || left >= right {
            return Err(PersistenceError::InvalidBar { left, right });
        }
        if multiplicity == 0 {
            return Err(PersistenceError::ZeroMultiplicity);
        }
        Ok(Bar {
            left,
            right,
            multiplicity,
        })
    }

    pub fn is_infinite(&self) -> bool {
        self.right == f64::INFINITY
    }

    /// `right - left`, infinite for infinite bars.
    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    fn key_cmp(&self, other: &Bar) -> Ordering {
        self.left
            .total_cmp(&other.left)
            .then(self.right.total_cmp(&other.right))
    }
}

/// A finite multiset of bars in canonical order (by left, then right), with
/// equal intervals merged into one entry.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Barcode {
    bars: Vec<Bar>,
}

impl Barcode {
    pub fn new(mut bars: Vec<Bar>) -> Self {
        bars.sort_by(Bar::key_cmp);
        let mut merged: Vec<Bar> = Vec::with_capacity(bars.len());
        for bar in bars {
            match merged.last_mut() {
                Some(last) if last.key_cmp(&bar) == Ordering::Equal => {
                    last.multiplicity += bar.multiplicity;
                }
                _ => merged.push(bar),
            }
        }
        Barcode { bars: merged }
    }

    pub fn empty() -> Self {
        Barcode::default()
    }

    /// Build from `(left, right)` pairs, one copy each.
    pub fn from_intervals(intervals: &[(f64, f64)]) -> Result<Self, PersistenceError> {
        let bars = intervals
            .iter()
            .map(|&(a, b)| Bar::new(a, b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Barcode::new(bars))
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    /// Total number of bars counted with multiplicity.
    pub fn len(&self) -> usize {
        self.bars.iter().map(|b| b.multiplicity as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Every bar copy as its own `(left, right)` entry, in canonical order.
    /// Indices of a [`Matching`] refer to this list.
    pub fn expanded(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for bar in &self.bars {
            for _ in 0..bar.multiplicity {
                out.push((bar.left, bar.right));
            }
        }
        out
    }

    pub fn finite_bars(&self) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(|b| !b.is_infinite())
    }

    pub fn infinite_bars(&self) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(|b| b.is_infinite())
    }

    pub fn infinite_count(&self) -> usize {
        self.infinite_bars().map(|b| b.multiplicity as usize).sum()
    }

    /// The sub-barcode of infinite bars.
    pub fn infinite_part(&self) -> Barcode {
        Barcode {
            bars: self.infinite_bars().copied().collect(),
        }
    }
}

/// Pairs of indices into the expanded bar lists of two barcodes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Matching { pairs }
    }
}

/// Cost of matching `(a, b]` with `(c, d]`: the larger endpoint difference, with
/// `|∞ − ∞| = 0` and `|finite − ∞| = ∞`.
pub fn pair_cost(p: (f64, f64), q: (f64, f64)) -> f64 {
    let left = (p.0 - q.0).abs();
    let right = match (p.1.is_infinite(), q.1.is_infinite()) {
        (true, true) => 0.0,
        (false, false) => (p.1 - q.1).abs(),
        _ => f64::INFINITY,
    };
    left.max(right)
}

/// Cost of leaving `(a, b]` unmatched: half its length.
pub fn unmatched_cost(p: (f64, f64)) -> f64 {
    (p.1 - p.0) / 2.0
}

pub fn is_delta_matching(
    b: &Barcode,
    c: &Barcode,
    mu: &Matching,
    delta: f64,
) -> Result<bool, PersistenceError> {
    let bs = b.expanded();
    let cs = c.expanded();
    let mut used_b = vec![false; bs.len()];
    let mut used_c = vec![false; cs.len()];
    for &(i, j) in &mu.pairs {
        if i >= bs.len() || j >= cs.len() {
            return Err(PersistenceError::IndexOutOfRange(i, j));
        }
        if std::mem::replace(&mut used_b[i], true) {
            return Err(PersistenceError::DuplicateUse {
                side: 'B',
                index: i,
            });
        }
        if std::mem::replace(&mut used_c[j], true) {
            return Err(PersistenceError::DuplicateUse {
                side: 'C',
                index: j,
            });
        }
    }
    let pairs_ok = mu
        .pairs
        .iter()
        .all(|&(i, j)| pair_cost(bs[i], cs[j]) <= delta);
    let unmatched_ok = bs
        .iter()
        .zip(&used_b)
        .chain(cs.iter().zip(&used_c))
        .filter(|(_, &used)| !used)
        .all(|(&bar, _)| unmatched_cost(bar) <= delta);
    Ok(pairs_ok && unmatched_ok)
}

/// Bottleneck distance together with an optimal matching (`None` when the
/// distance is infinite).
pub fn bottleneck_with_certificate(b: &Barcode, c: &Barcode) -> (f64, Option<Matching>) {
    if b.infinite_count() != c.infinite_count() {
        return (f64::INFINITY, None);
    }
    let bs = b.expanded();
    let cs = c.expanded();

    let mut candidates = vec![0.0];
    for &p in &bs {
        for &q in &cs {
            let cost = pair_cost(p, q);
            if cost.is_finite() {
                candidates.push(cost);
            }
        }
    }
    candidates.extend(
        bs.iter()
            .chain(&cs)
            .map(|&p| unmatched_cost(p))
            .filter(|x| x.is_finite()),
    );
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // Feasibility is monotone in delta; find the first feasible candidate.
    let (mut lo, mut hi) = (0usize, candidates.len());
    let mut best = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match feasible_matching(&bs, &cs, candidates[mid]) {
            Some(m) => {
                best = Some((candidates[mid], m));
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    match best {
        Some((delta, m)) => (delta, Some(m)),
        None => (f64::INFINITY, None),
    }
}

pub fn bottleneck_distance(b: &Barcode, c: &Barcode) -> f64 {
    bottleneck_with_certificate(b, c).0
}

/// A δ-matching of the expanded bar lists if one exists.
///
/// Left vertices are the bars of `bs` followed by diagonal copies of `cs`; right
/// vertices are the bars of `cs` followed by diagonal copies of `bs`. A perfect
/// matching of this graph is exactly a δ-matching.
fn feasible_matching(bs: &[(f64, f64)], cs: &[(f64, f64)], delta: f64) -> Option<Matching> {
    let (nb, nc) = (bs.len(), cs.len());
    let size = nb + nc;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (i, &p) in bs.iter().enumerate() {
        for (j, &q) in cs.iter().enumerate() {
            if pair_cost(p, q) <= delta {
                adj[i].push(j);
            }
        }
        if unmatched_cost(p) <= delta {
            adj[i].push(nc + i);
        }
    }
    for (j, &q) in cs.iter().enumerate() {
        let row = &mut adj[nb + j];
        if unmatched_cost(q) <= delta {
            row.push(j);
        }
        row.extend((0..nb).map(|i| nc + i));
    }
    let mate = hopcroft_karp(&adj, size);
    if mate.iter().any(Option::is_none) {
        return None;
    }
    let pairs = (0..nb)
        .filter_map(|i| mate[i].filter(|&r| r < nc).map(|r| (i, r)))
        .collect();
    Some(Matching { pairs })
}

/// Maximum bipartite matching; returns the right partner of each left vertex.
fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    const NIL: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l = vec![NIL; n_left];
    let mut match_r = vec![NIL; n_right];
    let mut dist = vec![0usize; n_left];

    loop {
        // Layer free left vertices by BFS over alternating paths.
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut progress = false;
        for u in 0..n_left {
            if match_l[u] == NIL && augment(u, adj, &mut match_l, &mut match_r, &mut dist) {
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    match_l
        .into_iter()
        .map(|v| if v == NIL { None } else { Some(v) })
        .collect()
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for &v in &adj[u] {
        let w = match_r[v];
        let ok =
            w == usize::MAX || (dist[w] == dist[u] + 1 && augment(w, adj, match_l, match_r, dist));
        if ok {
            match_l[u] = v;
            match_r[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

/// Length of the longest finite bar, 0 if there is none.
pub fn boundary_depth(b: &Barcode) -> f64 {
    b.finite_bars().map(Bar::length).fold(0.0, f64::max)
}

/// Left endpoints of the infinite bars, ascending, with multiplicity.
pub fn spectral_invariants(b: &Barcode) -> Vec<f64> {
    b.expanded()
        .into_iter()
        .filter(|p| p.1.is_infinite())
        .map(|p| p.0)
        .collect()
}

// JSON: {"bars":[{"left":0.0,"right":3.0},{"left":5.0,"right":"inf"}]}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Endpoint {
    Number(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct BarJson {
    left: f64,
    right: Endpoint,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    multiplicity: u32,
}

#[derive(Serialize, Deserialize)]
struct BarcodeJson {
    bars: Vec<BarJson>,
}

fn one() -> u32 {
    1
}

fn is_one(m: &u32) -> bool {
    *m == 1
}

impl Serialize for Barcode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let bars = self
            .bars
            .iter()
            .map(|b| BarJson {
                left: b.left,
                right: if b.is_infinite() {
                    Endpoint::Text("inf".into())
                } else {
                    Endpoint::Number(b.right)
                },
                multiplicity: b.multiplicity,
            })
            .collect();
        BarcodeJson { bars }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Barcode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BarcodeJson::deserialize(deserializer)?;
        let mut bars = Vec::with_capacity(raw.bars.len());
        for b in raw.bars {
            let right = match b.right {
                Endpoint::Number(x) => x,
                Endpoint::Text(s) if matches!(s.as_str(), "inf" | "+inf" | "infinity") => {
                    f64::INFINITY
                }
                Endpoint::Text(s) => {
                    return Err(D::Error::custom(format!("bad right endpoint {s:?}")))
                }
            };
            bars.push(
                Bar::with_multiplicity(b.left, right, b.multiplicity).map_err(D::Error::custom)?,
            );
        }
        Ok(Barcode::new(bars))
    }
}
