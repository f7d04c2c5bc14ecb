//! Random generators for tests, acceptance runs and benches.
//!
//! [`random_complex`] builds a valid filtered complex whose barcode is known in
//! advance: start from a canonical complex (disjoint pairs `∂x = y` plus
//! isolated cycles) and apply a random filtration-preserving change of basis,
//! which scrambles the boundary matrix without changing the barcode.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::filtered_complex::{f2_add, FilteredComplex, Generator};
use crate::persistence::{Bar, Barcode};

#[derive(Debug, Clone)]
pub struct ComplexSpec {
    /// Number of generators.
    pub generators: usize,
    /// Actions are distinct multiples of this spacing.
    pub gap: f64,
    /// Largest degree of a birth generator.
    pub max_degree: i64,
}

impl ComplexSpec {
    pub fn small(generators: usize) -> Self {
        ComplexSpec {
            generators,
            gap: 0.25,
            max_degree: 3,
        }
    }

    /// Actions at least `gap` apart, so perturbations below `gap / 2` keep
    /// their order.
    pub fn separated(generators: usize, gap: f64) -> Self {
        ComplexSpec {
            generators,
            gap,
            max_degree: 3,
        }
    }
}

/// A random valid complex and its barcode.
pub fn random_complex<R: Rng>(rng: &mut R, spec: &ComplexSpec) -> (FilteredComplex, Barcode) {
    let n = spec.generators;
    let n_pairs = rng.random_range(0..=n / 2);

    let mut slots: Vec<i64> = (0..(3 * n as i64 + 1)).collect();
    slots.shuffle(rng);
    let mut actions: Vec<f64> = slots[..n].iter().map(|&s| s as f64 * spec.gap).collect();

    // Positions 2p, 2p+1 form pair p (birth, death); the rest are cycles.
    let mut degrees = vec![0i64; n];
    let mut canonical: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut bars = Vec::with_capacity(n - n_pairs);
    for p in 0..n_pairs {
        let (y, x) = (2 * p, 2 * p + 1);
        if actions[y] > actions[x] {
            actions.swap(y, x);
        }
        let d = rng.random_range(0..=spec.max_degree);
        degrees[y] = d;
        degrees[x] = d + 1;
        canonical[x] = vec![y];
        bars.push(Bar::new(actions[y], actions[x]).expect("distinct actions"));
    }
    for g in 2 * n_pairs..n {
        degrees[g] = rng.random_range(0..=spec.max_degree + 1);
        bars.push(Bar::infinite(actions[g]).expect("finite action"));
    }

    // f_p = e_p + random lower-action terms of the same degree.
    let basis: Vec<Vec<usize>> = (0..n)
        .map(|p| {
            let mut v: Vec<usize> = (0..n)
                .filter(|&q| q != p && degrees[q] == degrees[p] && actions[q] < actions[p])
                .filter(|_| rng.random_bool(0.5))
                .collect();
            v.push(p);
            v.sort_unstable();
            v
        })
        .collect();

    // Express an e-vector in the f-basis by peeling off the highest action.
    let to_f = |mut u: Vec<usize>| -> Vec<usize> {
        let mut coords = Vec::new();
        while let Some(&top) = u
            .iter()
            .max_by(|&&a, &&b| actions[a].total_cmp(&actions[b]))
        {
            coords.push(top);
            u = f2_add(&u, &basis[top]);
        }
        coords.sort_unstable();
        coords
    };

    let ids: Vec<String> = (0..n).map(|p| format!("g{p}")).collect();
    let mut generators: Vec<Generator> = (0..n)
        .map(|p| Generator::new(ids[p].clone(), degrees[p], actions[p]))
        .collect();
    generators.shuffle(rng);
    let mut complex = FilteredComplex::new(generators);
    for p in 0..n {
        let mut image = Vec::new();
        for &q in &basis[p] {
            image = f2_add(&image, &canonical[q]);
        }
        for t in to_f(image) {
            complex.add_boundary(&ids[p], &ids[t]);
        }
    }
    (complex, Barcode::new(bars))
}

/// Shift every action by independent uniform noise in `[-eps, eps]`.
pub fn perturb_actions<R: Rng>(rng: &mut R, c: &FilteredComplex, eps: f64) -> FilteredComplex {
    let mut out = c.clone();
    for g in &mut out.generators {
        g.action += rng.random_range(-eps..=eps);
    }
    out
}

/// A random barcode with at most `max_bars` bars on a coarse grid, so that
/// ties and coincidences actually occur.
pub fn random_barcode<R: Rng>(rng: &mut R, max_bars: usize) -> Barcode {
    let count = rng.random_range(0..=max_bars);
    let bars = (0..count)
        .map(|_| {
            let left = rng.random_range(0..16) as f64 * 0.25;
            if rng.random_bool(0.2) {
                Bar::infinite(left).expect("finite left")
            } else {
                let len = rng.random_range(1..12) as f64 * 0.125 + rng.random_range(0.0..0.01);
                Bar::new(left, left + len).expect("positive length")
            }
        })
        .collect();
    Barcode::new(bars)
}

/// Uniform random vector in `[-bound, bound]^d`.
pub fn random_vector<R: Rng>(rng: &mut R, d: usize, bound: f64) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-bound..=bound)).collect()
}
