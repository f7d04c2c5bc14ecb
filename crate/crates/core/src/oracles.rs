//! Slow reference implementations. Each one recomputes a quantity from its
//! definition, without sharing code paths with the fast version it checks.

use std::f64::consts::PI;

use crate::chords::{Chord, Sector};
use crate::filtered_complex::{f2_add, FilteredComplex};
use crate::local_model::ModelConfig;
use crate::persistence::{pair_cost, unmatched_cost, Bar, Barcode};

/// Minimum over all partial matchings of the worst matched or unmatched cost.
/// Exponential; meant for a handful of bars.
pub fn exhaustive_bottleneck(b: &Barcode, c: &Barcode) -> f64 {
    let bs = b.expanded();
    let cs = c.expanded();
    let mut used = vec![false; cs.len()];
    let mut best = f64::INFINITY;
    search(&bs, &cs, 0, &mut used, 0.0, &mut best);
    best
}

fn search(
    bs: &[(f64, f64)],
    cs: &[(f64, f64)],
    next: usize,
    used: &mut [bool],
    cost: f64,
    best: &mut f64,
) {
    if cost >= *best {
        return;
    }
    if next == bs.len() {
        let rest = cs
            .iter()
            .zip(used.iter())
            .filter(|(_, &u)| !u)
            .map(|(&q, _)| unmatched_cost(q))
            .fold(cost, f64::max);
        *best = best.min(rest);
        return;
    }
    search(
        bs,
        cs,
        next + 1,
        used,
        cost.max(unmatched_cost(bs[next])),
        best,
    );
    for j in 0..cs.len() {
        if !used[j] {
            used[j] = true;
            let c = cost.max(pair_cost(bs[next], cs[j]));
            search(bs, cs, next + 1, used, c, best);
            used[j] = false;
        }
    }
}

/// Barcode read off from ranks of the maps `H(F_i) → H(F_j)` between sublevel
/// complexes. `F_i` is spanned by generators with action at most the `i`-th
/// distinct action value. The complex is assumed valid.
#[allow(clippy::needless_range_loop)] // r is indexed as a 2-D table
pub fn rank_function_barcode(c: &FilteredComplex) -> Barcode {
    let mut levels: Vec<f64> = c.generators.iter().map(|g| g.action).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let count = levels.len();

    let pos = |id: &str| c.generators.iter().position(|g| g.id == id).unwrap();
    let columns: Vec<Vec<usize>> = c
        .generators
        .iter()
        .map(|g| {
            let mut col: Vec<usize> = c
                .boundary
                .get(&g.id)
                .map(|ts| ts.iter().map(|t| pos(t)).collect())
                .unwrap_or_default();
            col.sort_unstable();
            let mut out: Vec<usize> = Vec::new();
            for x in col {
                if out.last() == Some(&x) {
                    out.pop();
                } else {
                    out.push(x);
                }
            }
            out
        })
        .collect();
    let members = |level: usize| -> Vec<usize> {
        (0..c.generators.len())
            .filter(|&g| c.generators[g].action <= levels[level])
            .collect()
    };

    // r[i][j] = rank H(F_i) → H(F_j) for i ≤ j, 1-based with F_0 = 0.
    let mut r = vec![vec![0usize; count + 1]; count + 1];
    for i in 1..=count {
        let cycles = cycle_basis(&members(i - 1), &columns);
        for j in i..=count {
            let boundaries: Vec<Vec<usize>> =
                members(j - 1).iter().map(|&g| columns[g].clone()).collect();
            let b_rank = rank(boundaries.clone());
            let mut both = boundaries;
            both.extend(cycles.iter().cloned());
            r[i][j] = rank(both) - b_rank;
        }
    }

    let mut bars = Vec::new();
    for i in 1..=count {
        for j in i + 1..=count {
            let mult =
                r[i][j - 1] as i64 - r[i][j] as i64 - r[i - 1][j - 1] as i64 + r[i - 1][j] as i64;
            for _ in 0..mult.max(0) {
                bars.push(Bar::new(levels[i - 1], levels[j - 1]).unwrap());
            }
        }
        let essential = r[i][count] as i64 - r[i - 1][count] as i64;
        for _ in 0..essential.max(0) {
            bars.push(Bar::infinite(levels[i - 1]).unwrap());
        }
    }
    Barcode::new(bars)
}

/// Basis of the kernel of the boundary restricted to `gens`, by elimination
/// with an identity tag.
fn cycle_basis(gens: &[usize], columns: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut rows: Vec<(Vec<usize>, Vec<usize>)> = gens
        .iter()
        .map(|&g| (columns[g].clone(), vec![g]))
        .collect();
    let mut kernel = Vec::new();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for idx in 0..rows.len() {
        while let Some(&top) = rows[idx].0.last() {
            match pivots.iter().find(|p| p.0 == top) {
                Some(&(_, other)) => {
                    let (image, tag) = rows[other].clone();
                    rows[idx].0 = f2_add(&rows[idx].0, &image);
                    rows[idx].1 = f2_add(&rows[idx].1, &tag);
                }
                None => {
                    pivots.push((top, idx));
                    break;
                }
            }
        }
        if rows[idx].0.is_empty() {
            let mut tag = rows[idx].1.clone();
            tag.sort_unstable();
            kernel.push(tag);
        }
    }
    kernel
}

/// Rank by dense Gauss–Jordan elimination over F₂.
fn rank(vectors: Vec<Vec<usize>>) -> usize {
    let width = vectors.iter().flatten().map(|&x| x + 1).max().unwrap_or(0);
    let mut rows: Vec<Vec<bool>> = vectors
        .iter()
        .map(|v| {
            let mut row = vec![false; width];
            for &x in v {
                row[x] ^= true;
            }
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= *b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a > b {
        return -integrate(f, b, a, tol);
    }
    // Split into fixed panels first so narrow features are not skipped.
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let (x0, x1) = (a + h * p as f64, a + h * (p + 1) as f64);
            let (f0, f1, fm) = (f(x0), f(x1), f(0.5 * (x0 + x1)));
            let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
            simpson(&f, x0, x1, f0, fm, f1, whole, tol / panels as f64, 40)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Transport the chord's covector along the great circle and check that it
/// lands on the other fiber's base point.
///
/// The circle is embedded in the plane with `x = (1, 0)` and
/// `y = (cos δ, sin δ)`. A band chord starts over `y` and turns by `θ_v(r)`
/// towards `x` for `s > 0` (away from it for `s < 0`); a twist chord starts over
/// `x` and turns by `2kρ_i(r)` towards `y` likewise.
pub fn geodesic_transport_oracle(
    config: &ModelConfig,
    c: &Chord,
    v: &[f64],
    i: usize,
    k: u32,
) -> bool {
    let delta = config.delta();
    let x = [1.0, 0.0];
    let y = [delta.cos(), delta.sin()];
    let (base, target, angle) = match c.sector {
        Sector::Phi { .. } => (y, x, config.theta_v(c.r, v)),
        Sector::Tau => (x, y, 2.0 * k as f64 * config.rho(i, c.r)),
    };
    let dot = base[0] * target[0] + base[1] * target[1];
    let u = [
        (target[0] - dot * base[0]) / delta.sin(),
        (target[1] - dot * base[1]) / delta.sin(),
    ];
    let dir = c.s.signum();
    let p = [
        angle.cos() * base[0] + angle.sin() * dir * u[0],
        angle.cos() * base[1] + angle.sin() * dir * u[1],
    ];
    ((p[0] - target[0]).powi(2) + (p[1] - target[1]).powi(2)).sqrt() < 1e-8
}

/// Maslov index by walking the rotation angle `t·a` for `t ∈ (0, 1]` and counting
/// where it crosses `πℤ`, plus the half contribution at `t = 0`.
///
/// For band chords `a = θ_v(r)` and each crossing weighs `−sign(a)(n−1)`; for
/// twist chords `a = 2kρ_i(r)` and the signs of `a` and `a′` are reversed. All
/// bookkeeping is in half units.
pub fn maslov_oracle(config: &ModelConfig, c: &Chord, v: &[f64], i: usize, k: u32) -> i64 {
    let n = config.n() as i64;
    let (angle, s, s_prime, shift) = match c.sector {
        Sector::Phi { .. } => {
            let a = config.theta_v(c.r, v);
            let ap = config.theta_v_prime(c.r, v);
            let outer = c.r > config.partition().twist_shell(i).1;
            let shift = if outer { 2 * k as i64 * (n - 1) } else { 0 };
            (a, sgn(a), sgn(ap), shift)
        }
        Sector::Tau => {
            let a = 2.0 * k as f64 * config.rho(i, c.r);
            let ap = 2.0 * k as f64 * config.rho_prime(i, c.r);
            (a, -sgn(a), -sgn(ap), 2 * k as i64 * (n - 1))
        }
    };
    let crossings = count_crossings(angle);
    let twice_mu = -(s_prime + s * (n - 1)) - 2 * crossings * s * (n - 1);
    assert!((n - twice_mu) % 2 == 0, "half-integer index");
    shift + (n - twice_mu) / 2
}

fn sgn(x: f64) -> i64 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Number of `t ∈ (0, 1)` with `t·a ∈ πℤ`, found from sign changes of
/// `sin(t·a)` on a grid fine enough to separate consecutive crossings.
fn count_crossings(a: f64) -> i64 {
    let steps = 64 * ((a.abs() / PI).ceil() as usize + 1);
    let mut prev = (a / steps as f64).sin().signum();
    let mut count = 0;
    for j in 2..=steps {
        let cur = (a * j as f64 / steps as f64).sin();
        if cur == 0.0 {
            continue;
        }
        if cur.signum() != prev {
            count += 1;
            prev = cur.signum();
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_counts() {
        assert_eq!(count_crossings(0.5), 0);
        assert_eq!(count_crossings(PI + 0.5), 1);
        assert_eq!(count_crossings(-(2.0 * PI + 0.1)), 2);
        assert_eq!(count_crossings(17.0 * PI + 3.0), 17);
    }

    #[test]
    fn exhaustive_examples() {
        let b = Barcode::from_intervals(&[(0.0, 10.0)]).unwrap();
        let c = Barcode::from_intervals(&[(1.0, 9.0)]).unwrap();
        assert_eq!(exhaustive_bottleneck(&b, &c), 1.0);
        let b = Barcode::from_intervals(&[(0.0, 4.0), (0.0, f64::INFINITY)]).unwrap();
        let c = Barcode::from_intervals(&[(0.0, f64::INFINITY)]).unwrap();
        assert_eq!(exhaustive_bottleneck(&b, &c), 2.0);
    }

    #[test]
    fn quadrature_is_accurate() {
        let q = integrate(|x| x.sin(), 0.0, PI, 1e-13);
        assert!((q - 2.0).abs() < 1e-12);
        let q = integrate(|x| if x < 0.3 { 0.0 } else { x }, 0.0, 1.0, 1e-13);
        assert!((q - (0.5 - 0.045)).abs() < 1e-9);
    }
}
