//! Graded vector spaces, weight-graded chain complexes, homology, and
//! Poincaré-series arithmetic.
//!
//! Conventions: homological (lower) grading throughout; cohomological data is
//! stored negated. Weight is a first-class second grading (configuration
//! cardinality / Sym word length) and differentials preserve it.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::exactla::{is_odd, SparseMatrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GradedError {
    #[error("duplicate basis label {0:?}")]
    DuplicateLabel(String),
    #[error("sym_series requires every generator to have weight >= 1, found {0:?} at weight 0")]
    WeightZeroGenerator(String),
    #[error("d*d != 0 at weight {weight}, degree {degree}")]
    DifferentialSquareNonzero { weight: u32, degree: i32 },
    #[error("differential at weight {weight}, degree {degree} is {got_rows}x{got_cols}, expected {want_rows}x{want_cols}")]
    DifferentialShape {
        weight: u32,
        degree: i32,
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("no basis at weight {0} for the supplied differential")]
    MissingWeight(u32),
}

/// A named basis vector with homological degree and weight.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasisElement {
    pub label: String,
    pub degree: i32,
    pub weight: u32,
}

impl BasisElement {
    pub fn new(label: impl Into<String>, degree: i32, weight: u32) -> Self {
        BasisElement {
            label: label.into(),
            degree,
            weight,
        }
    }
}

/// Finite ordered basis of a graded vector space. Labels are unique.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedVectorSpace {
    basis: Vec<BasisElement>,
}

impl GradedVectorSpace {
    pub fn empty() -> Self {
        GradedVectorSpace { basis: Vec::new() }
    }

    pub fn new(basis: Vec<BasisElement>) -> Result<Self, GradedError> {
        let mut seen = std::collections::BTreeSet::new();
        for b in &basis {
            if !seen.insert(b.label.clone()) {
                return Err(GradedError::DuplicateLabel(b.label.clone()));
            }
        }
        Ok(GradedVectorSpace { basis })
    }

    /// One generator.
    pub fn single(label: impl Into<String>, degree: i32, weight: u32) -> Self {
        GradedVectorSpace {
            basis: vec![BasisElement::new(label, degree, weight)],
        }
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    /// Bigraded dimensions, keyed by (degree, weight).
    pub fn dims(&self) -> BTreeMap<(i32, u32), usize> {
        let mut out = BTreeMap::new();
        for b in &self.basis {
            *out.entry((b.degree, b.weight)).or_insert(0) += 1;
        }
        out
    }

    /// Dimensions per weight, summed over degrees.
    pub fn dims_by_weight(&self) -> BTreeMap<u32, usize> {
        let mut out = BTreeMap::new();
        for b in &self.basis {
            *out.entry(b.weight).or_insert(0) += 1;
        }
        out
    }

    /// Suspension: every degree incremented by `k`, labels and weights kept.
    pub fn shift(&self, k: i32) -> GradedVectorSpace {
        GradedVectorSpace {
            basis: self
                .basis
                .iter()
                .map(|b| BasisElement::new(b.label.clone(), b.degree + k, b.weight))
                .collect(),
        }
    }
}

/// Weight-indexed family of chain complexes over the rationals.
///
/// `spaces[w]` holds the basis of the weight-`w` block and
/// `differentials[(w, d)]` the matrix from its degree-`d` part to its
/// degree-`d-1` part, with columns and rows ordered by basis position.
/// `d ∘ d = 0` is checked exactly at construction.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    spaces: BTreeMap<u32, GradedVectorSpace>,
    differentials: BTreeMap<(u32, i32), SparseMatrix>,
    /// weight -> degree -> basis positions, in basis order
    layout: BTreeMap<u32, BTreeMap<i32, Vec<usize>>>,
}

impl ChainComplex {
    pub fn new(
        spaces: BTreeMap<u32, GradedVectorSpace>,
        differentials: BTreeMap<(u32, i32), SparseMatrix>,
    ) -> Result<Self, GradedError> {
        let mut layout: BTreeMap<u32, BTreeMap<i32, Vec<usize>>> = BTreeMap::new();
        for (&w, space) in &spaces {
            let by_degree = layout.entry(w).or_default();
            for (i, b) in space.basis().iter().enumerate() {
                by_degree.entry(b.degree).or_default().push(i);
            }
        }
        let dim_at = |w: u32, d: i32| -> usize {
            layout
                .get(&w)
                .and_then(|m| m.get(&d))
                .map_or(0, |v| v.len())
        };
        for (&(w, d), m) in &differentials {
            if !spaces.contains_key(&w) {
                return Err(GradedError::MissingWeight(w));
            }
            let want_rows = dim_at(w, d - 1);
            let want_cols = dim_at(w, d);
            if m.rows() != want_rows || m.cols() != want_cols {
                return Err(GradedError::DifferentialShape {
                    weight: w,
                    degree: d,
                    got_rows: m.rows(),
                    got_cols: m.cols(),
                    want_rows,
                    want_cols,
                });
            }
        }
        let cx = ChainComplex {
            spaces,
            differentials,
            layout,
        };
        cx.check_d_squared()?;
        Ok(cx)
    }

    fn check_d_squared(&self) -> Result<(), GradedError> {
        for (&(w, d), m) in &self.differentials {
            if let Some(next) = self.differentials.get(&(w, d + 1)) {
                let prod = m.matmul(next).expect("shapes validated");
                if !prod.is_zero() {
                    return Err(GradedError::DifferentialSquareNonzero {
                        weight: w,
                        degree: d + 1,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn weights(&self) -> impl Iterator<Item = u32> + '_ {
        self.spaces.keys().copied()
    }

    pub fn space(&self, weight: u32) -> Option<&GradedVectorSpace> {
        self.spaces.get(&weight)
    }

    pub fn differential(&self, weight: u32, degree: i32) -> Option<&SparseMatrix> {
        self.differentials.get(&(weight, degree))
    }

    /// Basis positions of the degree-`d` part of the weight-`w` block, in the
    /// column order used by the differentials.
    pub fn degree_block(&self, weight: u32, degree: i32) -> &[usize] {
        self.layout
            .get(&weight)
            .and_then(|m| m.get(&degree))
            .map_or(&[], |v| v.as_slice())
    }

    pub fn dim_at(&self, weight: u32, degree: i32) -> usize {
        self.degree_block(weight, degree).len()
    }

    /// Bigraded chain dimensions keyed by (weight, degree). These are the
    /// dimensions of the underlying spaces, not of homology, and they read
    /// each basis element's own (degree, weight) so they stay meaningful in
    /// the collapsed storage used for weight-inhomogeneous differentials.
    pub fn bigraded_dims(&self) -> BTreeMap<(u32, i32), usize> {
        let mut out = BTreeMap::new();
        for space in self.spaces.values() {
            for b in space.basis() {
                *out.entry((b.weight, b.degree)).or_insert(0) += 1;
            }
        }
        out
    }

    /// Betti numbers keyed by (weight, degree): dim ker d_d - rank d_{d+1},
    /// computed exactly. Only nonzero entries are returned.
    pub fn homology(&self) -> BTreeMap<(u32, i32), usize> {
        let mut out = BTreeMap::new();
        for (&w, by_degree) in &self.layout {
            let mut rank_cache: BTreeMap<i32, usize> = BTreeMap::new();
            let mut rank_at = |d: i32, diffs: &BTreeMap<(u32, i32), SparseMatrix>| -> usize {
                *rank_cache
                    .entry(d)
                    .or_insert_with(|| diffs.get(&(w, d)).map_or(0, |m| m.rank()))
            };
            for (&d, block) in by_degree {
                let dim = block.len();
                let r_out = rank_at(d, &self.differentials);
                let r_in = rank_at(d + 1, &self.differentials);
                let betti = dim - r_out - r_in;
                if betti > 0 {
                    out.insert((w, d), betti);
                }
            }
        }
        out
    }

    /// Per weight, the alternating sum of chain dimensions. Equals the
    /// alternating sum of Betti numbers because d squares to zero.
    pub fn euler_characteristic(&self) -> BTreeMap<u32, i64> {
        let mut out = BTreeMap::new();
        for (&w, by_degree) in &self.layout {
            let mut chi = 0i64;
            for (&d, block) in by_degree {
                let sign = if is_odd(d) { -1 } else { 1 };
                chi += sign * block.len() as i64;
            }
            out.insert(w, chi);
        }
        out
    }
}

/// Bigraded integer series, keyed by (degree, weight) and truncated in
/// weight. Used for dimension bookkeeping of symmetric algebras and Betti
/// tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoincareSeries {
    pub coefficients: BTreeMap<(i32, u32), i64>,
    pub truncation: u32,
}

impl PoincareSeries {
    pub fn zero(truncation: u32) -> Self {
        PoincareSeries {
            coefficients: BTreeMap::new(),
            truncation,
        }
    }

    /// The unit series `1`.
    pub fn one(truncation: u32) -> Self {
        let mut s = PoincareSeries::zero(truncation);
        s.coefficients.insert((0, 0), 1);
        s
    }

    pub fn from_coeffs(
        truncation: u32,
        coeffs: impl IntoIterator<Item = ((i32, u32), i64)>,
    ) -> Self {
        let mut s = PoincareSeries::zero(truncation);
        for ((d, w), c) in coeffs {
            if w <= truncation && c != 0 {
                *s.coefficients.entry((d, w)).or_insert(0) += c;
            }
        }
        s.coefficients.retain(|_, c| *c != 0);
        s
    }

    /// Bigraded dimension series of a space (weights above the truncation are
    /// dropped).
    pub fn of_space(space: &GradedVectorSpace, truncation: u32) -> Self {
        PoincareSeries::from_coeffs(
            truncation,
            space.dims().into_iter().map(|(k, v)| (k, v as i64)),
        )
    }

    pub fn coeff(&self, degree: i32, weight: u32) -> i64 {
        self.coefficients.get(&(degree, weight)).copied().unwrap_or(0)
    }

    /// Coefficientwise product, truncated in weight.
    pub fn mul(&self, other: &PoincareSeries) -> PoincareSeries {
        let truncation = self.truncation.min(other.truncation);
        let mut out = PoincareSeries::zero(truncation);
        for (&(d1, w1), &c1) in &self.coefficients {
            for (&(d2, w2), &c2) in &other.coefficients {
                let w = w1 + w2;
                if w > truncation {
                    continue;
                }
                let slot = out.coefficients.entry((d1 + d2, w)).or_insert(0);
                *slot += c1 * c2;
            }
        }
        out.coefficients.retain(|_, c| *c != 0);
        out
    }

    /// Restricts to a single weight, as a polynomial in the degree variable.
    pub fn weight_slice(&self, weight: u32) -> BTreeMap<i32, i64> {
        self.coefficients
            .iter()
            .filter(|((_, w), _)| *w == weight)
            .map(|((d, _), &c)| (*d, c))
            .collect()
    }

    /// Plain-text Laurent polynomial in t (degree) and s (weight), e.g.
    /// `1 + s*t^0 + s^2*t^3`. Terms are ordered by weight, then degree.
    pub fn to_text(&self) -> String {
        if self.coefficients.is_empty() {
            return "0".to_string();
        }
        let mut ordered: Vec<(u32, i32, i64)> = self
            .coefficients
            .iter()
            .map(|(&(d, w), &c)| (w, d, c))
            .collect();
        ordered.sort();
        let term = |w: u32, d: i32, c: i64| -> String {
            if w == 0 && d == 0 {
                return c.to_string();
            }
            let mut parts = Vec::new();
            if c != 1 {
                parts.push(c.to_string());
            }
            match w {
                0 => {}
                1 => parts.push("s".to_string()),
                _ => parts.push(format!("s^{}", w)),
            }
            if w == 0 {
                parts.push(format!("t^{}", d));
            } else {
                parts.push(format!("t^{}", d));
            }
            parts.join("*")
        };
        ordered
            .into_iter()
            .map(|(w, d, c)| term(w, d, c))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for PoincareSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Bigraded dimension series of the free graded-commutative algebra on the
/// given generators, truncated at `max_weight`. Generators of even degree
/// contribute polynomial factors, generators of odd degree exterior factors;
/// the weight-0 unit term is included.
pub fn sym_series(
    generators: &GradedVectorSpace,
    max_weight: u32,
) -> Result<PoincareSeries, GradedError> {
    let mut out = PoincareSeries::one(max_weight);
    for b in generators.basis() {
        if b.weight == 0 {
            return Err(GradedError::WeightZeroGenerator(b.label.clone()));
        }
        let factor = if is_odd(b.degree) {
            PoincareSeries::from_coeffs(max_weight, [((0, 0), 1), ((b.degree, b.weight), 1)])
        } else {
            let mut coeffs = Vec::new();
            let mut k = 0u32;
            while k * b.weight <= max_weight {
                coeffs.push(((b.degree * k as i32, b.weight * k), 1));
                k += 1;
            }
            PoincareSeries::from_coeffs(max_weight, coeffs)
        };
        out = out.mul(&factor);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat_int;

    fn space(gens: &[(&str, i32, u32)]) -> GradedVectorSpace {
        GradedVectorSpace::new(
            gens.iter()
                .map(|&(l, d, w)| BasisElement::new(l, d, w))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn duplicate_labels_rejected() {
        let err = GradedVectorSpace::new(vec![
            BasisElement::new("x", 0, 1),
            BasisElement::new("x", 1, 1),
        ])
        .unwrap_err();
        assert_eq!(err, GradedError::DuplicateLabel("x".into()));
    }

    #[test]
    fn shift_examples() {
        let v = space(&[("x", 0, 1)]);
        assert_eq!(v.shift(0), v);
        // degree 0 shifted by 1-n with n = 2 lands in degree -1
        assert_eq!(v.shift(-1).basis()[0].degree, -1);
        assert_eq!(v.shift(3).shift(-3), v);
    }

    fn two_term_acyclic() -> ChainComplex {
        // 0 -> Q --(1)--> Q -> 0 in degrees 1 -> 0, weight 1
        let mut spaces = BTreeMap::new();
        spaces.insert(
            1,
            space(&[("a", 0, 1), ("b", 1, 1)]),
        );
        let mut diffs = BTreeMap::new();
        diffs.insert((1, 1), SparseMatrix::from_dense_i64(&[&[1]]));
        ChainComplex::new(spaces, diffs).unwrap()
    }

    #[test]
    fn homology_of_acyclic_two_term_complex_vanishes() {
        let cx = two_term_acyclic();
        assert!(cx.homology().is_empty());
    }

    #[test]
    fn homology_with_zero_differential_is_chain_dims() {
        let mut spaces = BTreeMap::new();
        spaces.insert(2, space(&[("u", 0, 2), ("v", 3, 2), ("w", 3, 2)]));
        let cx = ChainComplex::new(spaces, BTreeMap::new()).unwrap();
        let h = cx.homology();
        assert_eq!(h.get(&(2, 0)), Some(&1));
        assert_eq!(h.get(&(2, 3)), Some(&2));
    }

    #[test]
    fn homology_of_sum_map() {
        // Q^2 --[[1,1]]--> Q in degrees 1 -> 0
        let mut spaces = BTreeMap::new();
        spaces.insert(1, space(&[("a", 0, 1), ("x", 1, 1), ("y", 1, 1)]));
        let mut diffs = BTreeMap::new();
        diffs.insert((1, 1), SparseMatrix::from_dense_i64(&[&[1, 1]]));
        let cx = ChainComplex::new(spaces, diffs).unwrap();
        let h = cx.homology();
        assert_eq!(h.get(&(1, 1)), Some(&1));
        assert_eq!(h.get(&(1, 0)), None);
    }

    #[test]
    fn d_squared_violation_is_loud() {
        let mut spaces = BTreeMap::new();
        spaces.insert(1, space(&[("a", 0, 1), ("b", 1, 1), ("c", 2, 1)]));
        let mut diffs = BTreeMap::new();
        diffs.insert((1, 1), SparseMatrix::from_dense_i64(&[&[1]]));
        diffs.insert((1, 2), SparseMatrix::from_dense_i64(&[&[1]]));
        let err = ChainComplex::new(spaces, diffs).unwrap_err();
        assert_eq!(
            err,
            GradedError::DifferentialSquareNonzero {
                weight: 1,
                degree: 2
            }
        );
    }

    #[test]
    fn differential_shape_checked() {
        let mut spaces = BTreeMap::new();
        spaces.insert(1, space(&[("a", 0, 1), ("b", 1, 1)]));
        let mut diffs = BTreeMap::new();
        diffs.insert((1, 1), SparseMatrix::zero(2, 2));
        assert!(matches!(
            ChainComplex::new(spaces, diffs),
            Err(GradedError::DifferentialShape { .. })
        ));
    }

    #[test]
    fn euler_characteristic_examples() {
        let cx = ChainComplex::new(BTreeMap::new(), BTreeMap::new()).unwrap();
        assert!(cx.euler_characteristic().is_empty());

        let mut spaces = BTreeMap::new();
        spaces.insert(1, space(&[("x", 0, 1)]));
        let cx = ChainComplex::new(spaces, BTreeMap::new()).unwrap();
        assert_eq!(cx.euler_characteristic().get(&1), Some(&1));

        let cx = two_term_acyclic();
        assert_eq!(cx.euler_characteristic().get(&1), Some(&0));
    }

    #[test]
    fn euler_characteristic_matches_betti_alternating_sum() {
        let mut spaces = BTreeMap::new();
        spaces.insert(1, space(&[("a", 0, 1), ("b", 1, 1), ("c", 1, 1)]));
        let mut diffs = BTreeMap::new();
        diffs.insert(
            (1, 1),
            SparseMatrix::from_triplets(1, 2, [(0, 0, rat_int(2))]).unwrap(),
        );
        let cx = ChainComplex::new(spaces, diffs).unwrap();
        let chi = cx.euler_characteristic();
        let h = cx.homology();
        let mut from_h: BTreeMap<u32, i64> = BTreeMap::new();
        for (&(w, d), &b) in &h {
            *from_h.entry(w).or_insert(0) += if is_odd(d) { -(b as i64) } else { b as i64 };
        }
        assert_eq!(chi.get(&1), from_h.get(&1).or(Some(&0)).into());
    }

    #[test]
    fn sym_series_one_odd_generator() {
        let s = sym_series(&space(&[("x", 1, 1)]), 5).unwrap();
        let expected = PoincareSeries::from_coeffs(5, [((0, 0), 1), ((1, 1), 1)]);
        assert_eq!(s, expected);
    }

    #[test]
    fn sym_series_one_even_generator() {
        let s = sym_series(&space(&[("x", 2, 1)]), 3).unwrap();
        let expected = PoincareSeries::from_coeffs(
            3,
            [((0, 0), 1), ((2, 1), 1), ((4, 2), 1), ((6, 3), 1)],
        );
        assert_eq!(s, expected);
    }

    #[test]
    fn sym_series_mixed_generators() {
        // degree 0 weight 1 (polynomial) and degree 1 weight 2 (exterior)
        let s = sym_series(&space(&[("x", 0, 1), ("y", 1, 2)]), 2).unwrap();
        let expected = PoincareSeries::from_coeffs(
            2,
            [((0, 0), 1), ((0, 1), 1), ((0, 2), 1), ((1, 2), 1)],
        );
        assert_eq!(s, expected);
    }

    #[test]
    fn sym_series_rejects_weight_zero() {
        let err = sym_series(&space(&[("x", 2, 0)]), 3).unwrap_err();
        assert_eq!(err, GradedError::WeightZeroGenerator("x".into()));
    }

    #[test]
    fn sym_series_multiplicative_over_disjoint_union() {
        let a = space(&[("x", 0, 1), ("q", 3, 1)]);
        let b = space(&[("y", 1, 2), ("z", 2, 1)]);
        let mut both = a.basis().to_vec();
        both.extend(b.basis().to_vec());
        let joint = sym_series(&GradedVectorSpace::new(both).unwrap(), 4).unwrap();
        let product = sym_series(&a, 4).unwrap().mul(&sym_series(&b, 4).unwrap());
        assert_eq!(joint, product);
    }

    #[test]
    fn series_text_format() {
        let s = PoincareSeries::from_coeffs(3, [((0, 0), 1), ((0, 1), 1), ((3, 2), 1)]);
        assert_eq!(s.to_text(), "1 + s*t^0 + s^2*t^3");
        let t = PoincareSeries::from_coeffs(3, [((0, 0), 1), ((1, 0), 3), ((2, 0), 2)]);
        assert_eq!(t.to_text(), "1 + 3*t^1 + 2*t^2");
        assert_eq!(PoincareSeries::zero(2).to_text(), "0");
    }
}
