//! Underlying weight-graded complexes of higher enveloping algebras, and the
//! free E_n series.
//!
//! `U_n(L)` is computed at the level of underlying complexes as the
//! Chevalley-Eilenberg complex of the sphere cotensor: `CE(H̃_c^{-*}(R^n) ⊗ L)`.
//! The coefficient algebra is the one-class formal model `e` in degree `-n`
//! with `e·e = 0`, so the tensor Lie algebra is abelian and the bigraded
//! dimensions are forced to agree with `Sym(L[1-n])`; `pbw_check` makes that
//! comparison explicit, coefficient by coefficient.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ce::{ce_chain_complex, CeError};
use crate::graded::{
    sym_series, ChainComplex, GradedError, GradedVectorSpace, PoincareSeries,
};
use crate::lie::{free_lie, tensor_cdga_lie, Cdga, GradedLieAlgebra, LieError};

#[derive(Debug, Error)]
pub enum EnvelopeError {
    #[error("ambient dimension n must be >= 1, got {0}")]
    BadDimension(u32),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Ce(#[from] CeError),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

/// The one-dimensional non-unital CDGA modeling reduced compactly supported
/// cochains of R^n: a single class `e` in degree `-n` with `e·e = 0` and zero
/// differential.
pub fn sphere_model(n: u32) -> Cdga {
    Cdga::new(
        GradedVectorSpace::single("e", -(n as i32), 0),
        BTreeMap::new(),
        None,
        None,
    )
}

/// Underlying complex of `U_n(L)` together with the Poincaré series of its
/// homology. The series coefficients are the Betti numbers of the complex.
#[derive(Debug, Clone)]
pub struct EnvelopeResult {
    pub n: u32,
    pub complex: ChainComplex,
    pub series: PoincareSeries,
}

/// The weight-graded complex computing the underlying object of `U_n(L)` in
/// characteristic zero. Because `e·e = 0` the CE input is abelian, and the
/// bigraded dimensions equal `sym_series(L.space shifted by 1-n)`; this is
/// asserted as a postcondition.
pub fn u_n_underlying(
    l: &GradedLieAlgebra,
    n: u32,
    max_weight: u32,
) -> Result<EnvelopeResult, EnvelopeError> {
    if n == 0 {
        return Err(EnvelopeError::BadDimension(n));
    }
    let tensor = tensor_cdga_lie(&sphere_model(n), l, max_weight)?;
    let complex = ce_chain_complex(&tensor, max_weight)?;

    let expected = sym_series(&l.space().shift(1 - n as i32), max_weight)?;
    let got: BTreeMap<(i32, u32), i64> = complex
        .bigraded_dims()
        .into_iter()
        .map(|((w, d), c)| ((d, w), c as i64))
        .collect();
    assert_eq!(
        got, expected.coefficients,
        "PBW postcondition violated: bigraded dims of CE(sphere ⊗ L) differ from Sym(L[1-n])"
    );

    let homology = complex.homology();
    let series = PoincareSeries::from_coeffs(
        max_weight,
        homology.iter().map(|(&(w, d), &b)| ((d, w), b as i64)),
    );
    Ok(EnvelopeResult { n, complex, series })
}

/// Per-(weight, degree) comparison between the bigraded dimensions of the
/// underlying complex of `U_n(L)` and the coefficients of `Sym(L[1-n])`.
#[derive(Debug, Clone)]
pub struct PbwReport {
    pub n: u32,
    pub max_weight: u32,
    /// (weight, degree, dim of complex, coefficient of Sym(L[1-n]))
    pub entries: Vec<(u32, i32, usize, i64)>,
}

impl PbwReport {
    pub fn all_match(&self) -> bool {
        self.entries.iter().all(|&(_, _, a, b)| a as i64 == b)
    }
}

/// Verifies, coefficientwise up to `max_weight`, that the underlying bigraded
/// dimension of `U_n(L)` equals that of `Sym(L[1-n])`. Mismatches are data:
/// they indicate an implementation bug, since equality is forced by `e² = 0`.
pub fn pbw_check(
    l: &GradedLieAlgebra,
    n: u32,
    max_weight: u32,
) -> Result<PbwReport, EnvelopeError> {
    if n == 0 {
        return Err(EnvelopeError::BadDimension(n));
    }
    let tensor = tensor_cdga_lie(&sphere_model(n), l, max_weight)?;
    let complex = ce_chain_complex(&tensor, max_weight)?;
    let expected = sym_series(&l.space().shift(1 - n as i32), max_weight)?;

    let dims = complex.bigraded_dims();
    let mut keys: Vec<(u32, i32)> = dims.keys().copied().collect();
    for &(d, w) in expected.coefficients.keys() {
        if !keys.contains(&(w, d)) {
            keys.push((w, d));
        }
    }
    keys.sort();
    let entries = keys
        .into_iter()
        .map(|(w, d)| {
            (
                w,
                d,
                dims.get(&(w, d)).copied().unwrap_or(0),
                expected.coeff(d, w),
            )
        })
        .collect();
    Ok(PbwReport {
        n,
        max_weight,
        entries,
    })
}

/// Poincaré series of the homology of the free nonunital E_n-algebra on `V`
/// over the rationals: `Sym(FreeLie(V[n-1])[1-n])`, weight by weight.
pub fn free_en_series(
    v: &GradedVectorSpace,
    n: u32,
    max_weight: u32,
) -> Result<PoincareSeries, EnvelopeError> {
    if n == 0 {
        return Err(EnvelopeError::BadDimension(n));
    }
    let shifted = v.shift(n as i32 - 1);
    let l = free_lie(&shifted, max_weight)?;
    Ok(sym_series(&l.space().shift(1 - n as i32), max_weight)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::BasisElement;

    fn abelian_dim1(degree: i32) -> GradedLieAlgebra {
        GradedLieAlgebra::abelian(GradedVectorSpace::single("x", degree, 1))
    }

    #[test]
    fn enveloping_of_abelian_line_n1_is_polynomial() {
        let result = u_n_underlying(&abelian_dim1(0), 1, 5).unwrap();
        for w in 0..=5u32 {
            assert_eq!(result.series.coeff(0, w), 1, "weight {w}");
        }
        assert_eq!(result.series.coefficients.len(), 6);
    }

    #[test]
    fn enveloping_of_abelian_line_n2_is_exterior() {
        let result = u_n_underlying(&abelian_dim1(0), 2, 5).unwrap();
        assert_eq!(result.series.coeff(0, 0), 1);
        assert_eq!(result.series.coeff(-1, 1), 1);
        assert_eq!(result.series.coefficients.len(), 2, "weights >= 2 vanish");
    }

    #[test]
    fn enveloping_of_sl2_n1_counts_symmetric_powers() {
        let result = u_n_underlying(&GradedLieAlgebra::sl2(), 1, 3).unwrap();
        // dims of Sym^w(Q^3), all in degree 0: 1, 3, 6, 10
        for (w, expect) in [(0u32, 1), (1, 3), (2, 6), (3, 10)] {
            assert_eq!(result.series.coeff(0, w), expect, "weight {w}");
        }
    }

    #[test]
    fn free_en_series_on_point_n2_is_braid_homology() {
        let v = GradedVectorSpace::single("x", 0, 1);
        let s = free_en_series(&v, 2, 3).unwrap();
        let expected = PoincareSeries::from_coeffs(
            3,
            [
                ((0, 0), 1),
                ((0, 1), 1),
                ((0, 2), 1),
                ((1, 2), 1),
                ((0, 3), 1),
                ((1, 3), 1),
            ],
        );
        assert_eq!(s, expected);
    }

    #[test]
    fn free_en_series_on_point_n3_is_trivial_above_degree_zero() {
        let v = GradedVectorSpace::single("x", 0, 1);
        let s = free_en_series(&v, 3, 3).unwrap();
        let expected = PoincareSeries::from_coeffs(
            3,
            [((0, 0), 1), ((0, 1), 1), ((0, 2), 1), ((0, 3), 1)],
        );
        assert_eq!(s, expected);
    }

    #[test]
    fn free_en_series_on_zero_object_is_unit() {
        let s = free_en_series(&GradedVectorSpace::empty(), 2, 4).unwrap();
        assert_eq!(s, PoincareSeries::one(4));
    }

    #[test]
    fn pbw_check_battery() {
        let mut battery: Vec<GradedLieAlgebra> = vec![
            abelian_dim1(-1),
            abelian_dim1(0),
            abelian_dim1(1),
            GradedLieAlgebra::sl2(),
        ];
        for degree in [0, 1, 2] {
            battery.push(
                free_lie(&GradedVectorSpace::single("x", degree, 1), 4).unwrap(),
            );
        }
        for l in &battery {
            for n in 1..=3u32 {
                let report = pbw_check(l, n, 4).unwrap();
                assert!(report.all_match(), "n={n}: {:?}", report.entries);
            }
        }
    }

    #[test]
    fn pbw_check_free_lie_on_odd_generator_n2() {
        let l = free_lie(&GradedVectorSpace::single("x", 1, 1), 4).unwrap();
        let report = pbw_check(&l, 2, 4).unwrap();
        assert!(report.all_match());
        // Sym on x[-1] (even, deg 0, wt 1) and [x,x][-1] (odd, deg 1, wt 2)
        let result = u_n_underlying(&l, 2, 4).unwrap();
        assert_eq!(result.series.coeff(0, 2), 1);
        assert_eq!(result.series.coeff(1, 2), 1);
    }

    #[test]
    fn free_en_weight_one_slice_is_the_generator_space() {
        let v = GradedVectorSpace::new(vec![
            BasisElement::new("a", 0, 1),
            BasisElement::new("b", 2, 1),
        ])
        .unwrap();
        for n in 1..=3u32 {
            let s = free_en_series(&v, n, 3).unwrap();
            assert_eq!(s.coeff(0, 1), 1, "n={n}");
            assert_eq!(s.coeff(2, 1), 1, "n={n}");
            let weight1: i64 = s
                .coefficients
                .iter()
                .filter(|((_, w), _)| *w == 1)
                .map(|(_, &c)| c)
                .sum();
            assert_eq!(weight1, 2, "n={n}");
        }
    }

    #[test]
    fn dimension_zero_rejected() {
        assert!(matches!(
            u_n_underlying(&abelian_dim1(0), 0, 2),
            Err(EnvelopeError::BadDimension(0))
        ));
    }
}
