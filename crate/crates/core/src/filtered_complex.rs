//! F₂ filtered chain complexes and their barcodes.
//!
//! A complex is a list of generators (id, degree, action) and a boundary map
//! sending each id to an F₂-combination of ids. Repeated ids in a boundary list
//! cancel in pairs. The sublevel complex at `λ` is spanned by generators with
//! `action < λ`, so a class born at action `a` and killed at action `b` gives the
//! bar `(a, b]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::persistence::{Bar, Barcode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub degree: i64,
    pub action: f64,
}

impl Generator {
    pub fn new(id: impl Into<String>, degree: i64, action: f64) -> Self {
        Generator {
            id: id.into(),
            degree,
            action,
        }
    }
}

/// First broken invariant found by [`FilteredComplex::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateId(String),
    UnknownId { source: String, target: String },
    NonFiniteAction(String),
    DegreeMismatch { source: String, target: String },
    ActionNotDecreasing { source: String, target: String },
    BoundarySquaredNonzero { source: String, target: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId(id) => write!(f, "duplicate generator id {id:?}"),
            Violation::UnknownId { source, target } => {
                write!(f, "boundary of {source:?} mentions unknown id {target:?}")
            }
            Violation::NonFiniteAction(id) => write!(f, "generator {id:?} has non-finite action"),
            Violation::DegreeMismatch { source, target } => {
                write!(
                    f,
                    "∂{source:?} contains {target:?} whose degree is not one less"
                )
            }
            Violation::ActionNotDecreasing { source, target } => {
                write!(
                    f,
                    "∂{source:?} contains {target:?} whose action is not strictly smaller"
                )
            }
            Violation::BoundarySquaredNonzero { source, target } => {
                write!(f, "∂∂{source:?} contains {target:?}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error("invalid complex: {0}")]
    Invalid(Violation),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FilteredComplex {
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub boundary: BTreeMap<String, Vec<String>>,
}

/// Output of the column reduction: birth/death pairs and essential generators,
/// by id.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub pairs: Vec<(Generator, Generator)>,
    pub essential: Vec<Generator>,
}

impl Reduction {
    pub fn barcode(&self) -> Barcode {
        let mut bars: Vec<Bar> = self
            .pairs
            .iter()
            .map(|(birth, death)| Bar::new(birth.action, death.action).expect("validated"))
            .collect();
        bars.extend(
            self.essential
                .iter()
                .map(|g| Bar::infinite(g.action).expect("validated")),
        );
        Barcode::new(bars)
    }
}

impl FilteredComplex {
    pub fn new(generators: Vec<Generator>) -> Self {
        FilteredComplex {
            generators,
            boundary: BTreeMap::new(),
        }
    }

    /// Add `target` to the boundary of `source`.
    pub fn add_boundary(&mut self, source: &str, target: &str) {
        self.boundary
            .entry(source.to_string())
            .or_default()
            .push(target.to_string());
    }

    pub fn generator(&self, id: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.id == id)
    }

    fn index(&self) -> Result<HashMap<&str, usize>, Violation> {
        let mut index = HashMap::with_capacity(self.generators.len());
        for (pos, g) in self.generators.iter().enumerate() {
            if !g.action.is_finite() {
                return Err(Violation::NonFiniteAction(g.id.clone()));
            }
            if index.insert(g.id.as_str(), pos).is_some() {
                return Err(Violation::DuplicateId(g.id.clone()));
            }
        }
        Ok(index)
    }

    /// Boundary of every generator as a sorted list of generator positions,
    /// with F₂ cancellation applied.
    fn columns(&self, index: &HashMap<&str, usize>) -> Result<Vec<Vec<usize>>, Violation> {
        let mut cols = vec![Vec::new(); self.generators.len()];
        for (source, targets) in &self.boundary {
            let &s = index
                .get(source.as_str())
                .ok_or_else(|| Violation::UnknownId {
                    source: source.clone(),
                    target: source.clone(),
                })?;
            let mut col = Vec::with_capacity(targets.len());
            for t in targets {
                let &ti = index.get(t.as_str()).ok_or_else(|| Violation::UnknownId {
                    source: source.clone(),
                    target: t.clone(),
                })?;
                col.push(ti);
            }
            cols[s] = f2_normalize(col);
        }
        Ok(cols)
    }

    /// Check ids, degree drop by one, strict action decrease and ∂∂ = 0.
    pub fn validate(&self) -> Result<(), Violation> {
        let index = self.index()?;
        let cols = self.columns(&index)?;
        let gens = &self.generators;
        for (s, col) in cols.iter().enumerate() {
            for &t in col {
                if gens[t].degree != gens[s].degree - 1 {
                    return Err(Violation::DegreeMismatch {
                        source: gens[s].id.clone(),
                        target: gens[t].id.clone(),
                    });
                }
                if gens[t].action >= gens[s].action {
                    return Err(Violation::ActionNotDecreasing {
                        source: gens[s].id.clone(),
                        target: gens[t].id.clone(),
                    });
                }
            }
        }
        for (s, col) in cols.iter().enumerate() {
            let mut acc = Vec::new();
            for &t in col {
                acc = f2_add(&acc, &cols[t]);
            }
            if let Some(&bad) = acc.first() {
                return Err(Violation::BoundarySquaredNonzero {
                    source: gens[s].id.clone(),
                    target: gens[bad].id.clone(),
                });
            }
        }
        Ok(())
    }

    /// Standard column reduction in increasing (action, id) order.
    pub fn reduce(&self) -> Result<Reduction, ComplexError> {
        self.validate().map_err(ComplexError::Invalid)?;
        let index = self.index().map_err(ComplexError::Invalid)?;
        let cols = self.columns(&index).map_err(ComplexError::Invalid)?;

        let mut order: Vec<usize> = (0..self.generators.len()).collect();
        order.sort_by(|&a, &b| {
            let (ga, gb) = (&self.generators[a], &self.generators[b]);
            ga.action
                .total_cmp(&gb.action)
                .then_with(|| ga.id.cmp(&gb.id))
        });
        let mut rank = vec![0; order.len()];
        for (pos, &g) in order.iter().enumerate() {
            rank[g] = pos;
        }

        // Columns in filtration coordinates.
        let mut reduced: Vec<Vec<usize>> = order
            .iter()
            .map(|&g| {
                let mut c: Vec<usize> = cols[g].iter().map(|&t| rank[t]).collect();
                c.sort_unstable();
                c
            })
            .collect();
        let mut pivot_owner: Vec<Option<usize>> = vec![None; order.len()];
        let mut killed = vec![false; order.len()];
        let mut pairs = Vec::new();
        for j in 0..reduced.len() {
            while let Some(&low) = reduced[j].last() {
                match pivot_owner[low] {
                    Some(other) => {
                        let sum = f2_add(&reduced[j], &reduced[other]);
                        reduced[j] = sum;
                    }
                    None => break,
                }
            }
            if let Some(&low) = reduced[j].last() {
                pivot_owner[low] = Some(j);
                killed[low] = true;
                pairs.push((low, j));
            }
        }
        let gen_at = |pos: usize| self.generators[order[pos]].clone();
        let essential = (0..order.len())
            .filter(|&p| reduced[p].is_empty() && !killed[p])
            .map(gen_at)
            .collect();
        let pairs = pairs
            .into_iter()
            .map(|(birth, death)| (gen_at(birth), gen_at(death)))
            .collect();
        Ok(Reduction { pairs, essential })
    }

    pub fn reduce_to_barcode(&self) -> Result<Barcode, ComplexError> {
        Ok(self.reduce()?.barcode())
    }

    /// dim H_degree over F₂ for the whole complex, by rank counting
    /// (independent of the persistence reduction).
    pub fn homology_rank(&self, degree: i64) -> Result<usize, ComplexError> {
        Ok(self.homology_ranks()?.get(&degree).copied().unwrap_or(0))
    }

    /// Nonzero homology ranks by degree.
    pub fn homology_ranks(&self) -> Result<BTreeMap<i64, usize>, ComplexError> {
        self.validate().map_err(ComplexError::Invalid)?;
        let index = self.index().map_err(ComplexError::Invalid)?;
        let cols = self.columns(&index).map_err(ComplexError::Invalid)?;
        let mut by_degree: BTreeMap<i64, Vec<Vec<usize>>> = BTreeMap::new();
        for (g, col) in self.generators.iter().zip(cols) {
            by_degree.entry(g.degree).or_default().push(col);
        }
        let ranks: BTreeMap<i64, (usize, usize)> = by_degree
            .into_iter()
            .map(|(d, cols)| (d, (cols.len(), f2_rank(cols))))
            .collect();
        Ok(ranks
            .iter()
            .map(|(&d, &(dim, rank_out))| {
                let rank_in = ranks.get(&(d + 1)).map_or(0, |r| r.1);
                (d, dim - rank_out - rank_in)
            })
            .filter(|&(_, r)| r > 0)
            .collect())
    }
}

/// Sort and cancel repeated entries in pairs.
pub(crate) fn f2_normalize(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    let mut out: Vec<usize> = Vec::with_capacity(v.len());
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Symmetric difference of two sorted lists.
pub(crate) fn f2_add(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Rank over F₂ of a set of sparse sorted vectors.
pub(crate) fn f2_rank(vectors: Vec<Vec<usize>>) -> usize {
    let mut pivots: HashMap<usize, Vec<usize>> = HashMap::new();
    for mut v in vectors {
        while let Some(&top) = v.last() {
            match pivots.get(&top) {
                Some(p) => v = f2_add(&v, p),
                None => {
                    pivots.insert(top, v);
                    break;
                }
            }
        }
    }
    pivots.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::rank_function_barcode;
    use crate::persistence::bottleneck_distance;
    use crate::testkit::{perturb_actions, random_complex, ComplexSpec};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const INF: f64 = f64::INFINITY;

    fn pair_complex() -> FilteredComplex {
        let mut c = FilteredComplex::new(vec![
            Generator::new("y", 0, 1.0),
            Generator::new("x", 1, 2.0),
        ]);
        c.add_boundary("x", "y");
        c
    }

    #[test]
    fn validate_examples() {
        let zero = FilteredComplex::new(vec![
            Generator::new("a", 0, 0.0),
            Generator::new("b", 3, 1.0),
        ]);
        assert_eq!(zero.validate(), Ok(()));

        let mut flat = FilteredComplex::new(vec![
            Generator::new("y", 0, 1.0),
            Generator::new("x", 1, 1.0),
        ]);
        flat.add_boundary("x", "y");
        assert!(matches!(
            flat.validate(),
            Err(Violation::ActionNotDecreasing { .. })
        ));

        let mut same = FilteredComplex::new(vec![
            Generator::new("y", 1, 1.0),
            Generator::new("x", 1, 2.0),
        ]);
        same.add_boundary("x", "y");
        assert!(matches!(
            same.validate(),
            Err(Violation::DegreeMismatch { .. })
        ));

        let dup = FilteredComplex::new(vec![
            Generator::new("a", 0, 0.0),
            Generator::new("a", 0, 1.0),
        ]);
        assert_eq!(dup.validate(), Err(Violation::DuplicateId("a".into())));

        let mut unknown = pair_complex();
        unknown.add_boundary("x", "z");
        assert!(matches!(
            unknown.validate(),
            Err(Violation::UnknownId { .. })
        ));
    }

    #[test]
    fn detects_nonzero_square() {
        let mut c = FilteredComplex::new(vec![
            Generator::new("z", 0, 0.0),
            Generator::new("y", 1, 1.0),
            Generator::new("x", 2, 2.0),
        ]);
        c.add_boundary("x", "y");
        c.add_boundary("y", "z");
        assert!(matches!(
            c.validate(),
            Err(Violation::BoundarySquaredNonzero { .. })
        ));
        assert!(c.reduce_to_barcode().is_err());
    }

    #[test]
    fn repeated_targets_cancel() {
        let mut c = pair_complex();
        c.add_boundary("x", "y");
        assert_eq!(
            c.reduce_to_barcode().unwrap(),
            Barcode::from_intervals(&[(1.0, INF), (2.0, INF)]).unwrap()
        );
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(
            pair_complex().reduce_to_barcode().unwrap(),
            Barcode::from_intervals(&[(1.0, 2.0)]).unwrap()
        );
        let zero = FilteredComplex::new(vec![
            Generator::new("a", 0, 0.5),
            Generator::new("b", 0, -1.0),
            Generator::new("c", 2, 3.0),
        ]);
        assert_eq!(
            zero.reduce_to_barcode().unwrap(),
            Barcode::from_intervals(&[(-1.0, INF), (0.5, INF), (3.0, INF)]).unwrap()
        );
    }

    #[test]
    fn homology_rank_examples() {
        let zero = FilteredComplex::new(vec![
            Generator::new("a", 3, 0.0),
            Generator::new("b", 3, 1.0),
        ]);
        assert_eq!(zero.homology_rank(3).unwrap(), 2);
        let c = pair_complex();
        assert_eq!(c.homology_rank(0).unwrap(), 0);
        assert_eq!(c.homology_rank(1).unwrap(), 0);
    }

    #[test]
    fn json_shape() {
        let c = pair_complex();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(
            text,
            r#"{"generators":[{"id":"y","degree":0,"action":1.0},{"id":"x","degree":1,"action":2.0}],"boundary":{"x":["y"]}}"#
        );
        let back: FilteredComplex = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    proptest! {
        #[test]
        fn reduction_matches_rank_oracle(seed in any::<u64>(), size in 1usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (c, expected) = random_complex(&mut rng, &ComplexSpec::small(size));
            prop_assert_eq!(c.validate(), Ok(()));
            let fast = c.reduce_to_barcode().unwrap();
            prop_assert_eq!(&fast, &rank_function_barcode(&c));
            prop_assert_eq!(&fast, &expected);
            prop_assert_eq!(fast.len(), c.generators.len() - c.reduce().unwrap().pairs.len());
        }

        #[test]
        fn homology_rank_counts_essential_generators(seed in any::<u64>(), size in 1usize..=10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (c, _) = random_complex(&mut rng, &ComplexSpec::small(size));
            let red = c.reduce().unwrap();
            for d in -1..6 {
                let ess = red.essential.iter().filter(|g| g.degree == d).count();
                prop_assert_eq!(c.homology_rank(d).unwrap(), ess);
            }
        }

        #[test]
        fn small_perturbations_move_barcode_little(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = ComplexSpec::separated(8, 0.05);
            let (c, _) = random_complex(&mut rng, &spec);
            let moved = perturb_actions(&mut rng, &c, 0.01);
            let d = bottleneck_distance(
                &c.reduce_to_barcode().unwrap(),
                &moved.reduce_to_barcode().unwrap(),
            );
            prop_assert!(d <= 0.01 + 1e-12);
        }
    }
}
