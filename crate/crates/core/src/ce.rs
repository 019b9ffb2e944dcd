//! The Chevalley-Eilenberg complex `CE(L) = Sym(L[1])` of a dg Lie algebra,
//! with its weight grading and homology.
//!
//! Words are sorted multisets of suspended basis letters; letters of odd
//! shifted degree appear at most once. The differential is the coderivation
//! extension of `s ∘ dL` (arity one) and `(-1)^{|x|} s[x,y]` (arity two),
//! with all reordering signs derived from the crate-wide Koszul rule.
//! `d ∘ d = 0` is validated exactly when the complex is assembled; a failure
//! here means a sign bug and construction fails loudly.
//!
//! When the bracket adds weights and the differential preserves them (every
//! algebra in the configuration-space pipeline), the complex splits by
//! weight and is stored weight by weight. Classical inputs like sl2 carry a
//! weight-1 basis with a bracket that is not weight-additive; their complex
//! is stored in a single block, the bigraded dimensions still being read off
//! the word basis.

use std::collections::BTreeMap;

use num_traits::One;
use thiserror::Error;

use crate::exactla::{is_odd, sign_pow, Rational, SparseMatrix};
use crate::graded::{
    sym_series, BasisElement, ChainComplex, GradedError, GradedVectorSpace, PoincareSeries,
};
use crate::lie::{GradedLieAlgebra, LieError, ValidationReport};

#[derive(Debug, Error)]
pub enum CeError {
    #[error("input Lie algebra fails validation:\n{0}")]
    InvalidLie(ValidationReport),
    #[error("basis element {0:?} has weight 0 and even shifted degree; the word basis is infinite")]
    NonConvergent(String),
    #[error("bracket or differential raises weight on a non-weight-additive algebra; the truncated word basis is not closed under the differential")]
    WeightStructure,
    #[error("differential image word {0:?} falls outside the enumerated basis")]
    ImageOutsideBasis(String),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// A CE word in canonical form: Lie-algebra basis indices sorted by the
/// letter rank (degree, label). Empty word = the unit.
type Word = Vec<usize>;

/// The assembled complex together with the grading mode.
#[derive(Debug, Clone)]
pub struct CeComplex {
    complex: ChainComplex,
    weight_graded: bool,
    /// (weight, degree) -> word count, from the word basis itself.
    word_dims: BTreeMap<(u32, i32), usize>,
    /// degree -> set of word weights, for labeling collapsed homology.
    weights_by_degree: BTreeMap<i32, Vec<u32>>,
}

impl CeComplex {
    /// The underlying weight-graded chain complex. In the collapsed case the
    /// single block is stored at weight 0 and basis elements carry their own
    /// true weights.
    pub fn chain_complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn is_weight_graded(&self) -> bool {
        self.weight_graded
    }

    /// Bigraded dimensions of the word basis, keyed (weight, degree). By
    /// construction these equal the coefficients of `Sym(L[1])`.
    pub fn bigraded_dims(&self) -> &BTreeMap<(u32, i32), usize> {
        &self.word_dims
    }

    /// Betti numbers keyed by (weight, degree). For a collapsed complex the
    /// weight label of a degree is the common weight of its words when that
    /// is unique (as for algebras concentrated in degree 0, where a degree-d
    /// word has exactly d letters), and 0 otherwise.
    pub fn homology(&self) -> BTreeMap<(u32, i32), usize> {
        let raw = self.complex.homology();
        if self.weight_graded {
            return raw;
        }
        let mut out: BTreeMap<(u32, i32), usize> = BTreeMap::new();
        for ((_, d), betti) in raw {
            let weights = self.weights_by_degree.get(&d);
            let label = match weights {
                Some(ws) if ws.len() == 1 => ws[0],
                _ => 0,
            };
            *out.entry((label, d)).or_insert(0) += betti;
        }
        out
    }

    pub fn euler_characteristic(&self) -> BTreeMap<u32, i64> {
        self.complex.euler_characteristic()
    }
}

/// Builds `CE(L)` truncated at `max_weight`, validating the input first.
pub fn ce_complex(l: &GradedLieAlgebra, max_weight: u32) -> Result<CeComplex, CeError> {
    let report = l.validate();
    if !report.is_clean() {
        return Err(CeError::InvalidLie(report));
    }
    build(l, max_weight)
}

/// The weight-graded chain complex of `CE(L)`, for weight-additive inputs
/// (the enveloping-algebra and configuration-space pipelines). Errors if the
/// bracket does not add weights.
pub fn ce_chain_complex(l: &GradedLieAlgebra, max_weight: u32) -> Result<ChainComplex, CeError> {
    let ce = ce_complex(l, max_weight)?;
    if !ce.weight_graded {
        return Err(CeError::InvalidLie(ValidationReport {
            violations: vec![crate::lie::Violation::DegreeAdditivity {
                left: "<bracket is not weight-additive;".into(),
                right: "weight-graded complex unavailable>".into(),
            }],
        }));
    }
    Ok(ce.complex)
}

/// Bigraded dimension series of `Sym(L[1])`: the associated graded of the
/// weight filtration of `CE(L)`, and by construction the bigraded dimension
/// of `ce_complex(L, max_weight)`.
pub fn gr_dims(l: &GradedLieAlgebra, max_weight: u32) -> Result<PoincareSeries, CeError> {
    let report = l.validate();
    if !report.is_clean() {
        return Err(CeError::InvalidLie(report));
    }
    Ok(sym_series(&l.space().shift(1), max_weight)?)
}

struct WordBuilder<'a> {
    l: &'a GradedLieAlgebra,
    /// basis indices ordered by (degree, label)
    by_rank: Vec<usize>,
    /// basis index -> rank
    rank: Vec<usize>,
    shifted_degree: Vec<i32>,
    weight: Vec<u32>,
}

impl<'a> WordBuilder<'a> {
    fn new(l: &'a GradedLieAlgebra) -> Self {
        let basis = l.space().basis();
        let mut by_rank: Vec<usize> = (0..basis.len()).collect();
        by_rank.sort_by(|&a, &b| {
            (basis[a].degree, &basis[a].label).cmp(&(basis[b].degree, &basis[b].label))
        });
        let mut rank = vec![0usize; basis.len()];
        for (r, &i) in by_rank.iter().enumerate() {
            rank[i] = r;
        }
        WordBuilder {
            l,
            by_rank,
            rank,
            shifted_degree: basis.iter().map(|b| b.degree + 1).collect(),
            weight: basis.iter().map(|b| b.weight).collect(),
        }
    }

    fn word_degree(&self, w: &Word) -> i32 {
        w.iter().map(|&i| self.shifted_degree[i]).sum()
    }

    fn word_weight(&self, w: &Word) -> u32 {
        w.iter().map(|&i| self.weight[i]).sum()
    }

    fn word_label(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let mut run = 1;
            while i + run < w.len() && w[i + run] == w[i] {
                run += 1;
            }
            let letter = &self.l.space().basis()[w[i]].label;
            if run == 1 {
                parts.push(format!("s({letter})"));
            } else {
                parts.push(format!("s({letter})^{run}"));
            }
            i += run;
        }
        parts.join("·")
    }

    /// All words of weight <= max_weight, letters in rank order.
    fn enumerate(&self, max_weight: u32) -> Result<Vec<Word>, CeError> {
        for &i in &self.by_rank {
            if self.weight[i] == 0 && !is_odd(self.shifted_degree[i]) {
                return Err(CeError::NonConvergent(
                    self.l.space().basis()[i].label.clone(),
                ));
            }
        }
        let mut out = Vec::new();
        let mut current: Word = Vec::new();
        self.enumerate_rec(0, max_weight, &mut current, &mut out);
        out.sort_by(|a, b| {
            (self.word_weight(a), self.word_degree(a), a.clone()).cmp(&(
                self.word_weight(b),
                self.word_degree(b),
                b.clone(),
            ))
        });
        Ok(out)
    }

    fn enumerate_rec(&self, from_rank: usize, budget: u32, current: &mut Word, out: &mut Vec<Word>) {
        out.push(current.clone());
        for r in from_rank..self.by_rank.len() {
            let i = self.by_rank[r];
            if self.weight[i] > budget {
                continue;
            }
            let odd = is_odd(self.shifted_degree[i]);
            current.push(i);
            let next_rank = if odd { r + 1 } else { r };
            self.enumerate_rec(next_rank, budget - self.weight[i], current, out);
            current.pop();
        }
    }

    /// Sorts letters into rank order, accumulating the Koszul sign; None if a
    /// repeated odd letter makes the word zero.
    fn normalize(&self, mut letters: Word, mut sign: Rational) -> Option<(Word, Rational)> {
        for i in 1..letters.len() {
            let mut j = i;
            while j > 0 && self.rank[letters[j - 1]] > self.rank[letters[j]] {
                if is_odd(self.shifted_degree[letters[j - 1]])
                    && is_odd(self.shifted_degree[letters[j]])
                {
                    sign = -sign;
                }
                letters.swap(j - 1, j);
                j -= 1;
            }
        }
        for pair in letters.windows(2) {
            if pair[0] == pair[1] && is_odd(self.shifted_degree[pair[0]]) {
                return None;
            }
        }
        Some((letters, sign))
    }

    /// Koszul sign of moving the letter at `pos` to the front.
    fn extract_sign(&self, word: &Word, pos: usize) -> Rational {
        let d = self.shifted_degree[word[pos]];
        if !is_odd(d) {
            return Rational::one();
        }
        let crossings = word[..pos]
            .iter()
            .filter(|&&l| is_odd(self.shifted_degree[l]))
            .count();
        if crossings % 2 == 1 {
            -Rational::one()
        } else {
            Rational::one()
        }
    }

    /// The total differential of a word, as coefficients on canonical words.
    fn differential(&self, word: &Word) -> BTreeMap<Word, Rational> {
        let mut out: BTreeMap<Word, Rational> = BTreeMap::new();
        let mut push = |letters: Word, coeff: Rational| {
            if let Some((canon, sign)) = self.normalize(letters, coeff) {
                use num_traits::Zero;
                let slot = out.entry(canon).or_insert_with(Rational::zero);
                *slot += sign;
                // zero entries are filtered by the caller
            }
        };
        // arity one: sum_i ± x_1 ... s(dL x_i) ... x_m
        for i in 0..word.len() {
            let d_letter = self.l.d_of(word[i]);
            if d_letter.is_zero() {
                continue;
            }
            let sign = self.extract_sign(word, i);
            let mut rest: Word = word.to_vec();
            rest.remove(i);
            for (target, c) in d_letter.iter() {
                let mut letters = Vec::with_capacity(word.len());
                letters.push(target);
                letters.extend_from_slice(&rest);
                push(letters, c * &sign);
            }
        }
        // arity two: sum_{i<j} ± (-1)^{|x_i|} s[x_i, x_j] x_1 ... ^i ... ^j ... x_m
        for i in 0..word.len() {
            for j in (i + 1)..word.len() {
                let bracket = self.l.bracket(word[i], word[j]);
                if bracket.is_zero() {
                    continue;
                }
                let mut sign = self.extract_sign(word, i);
                // move x_j to the second slot, past letters before j except x_i
                let odd_j = is_odd(self.shifted_degree[word[j]]);
                if odd_j {
                    let crossings = word[..j]
                        .iter()
                        .enumerate()
                        .filter(|&(k, &l)| k != i && is_odd(self.shifted_degree[l]))
                        .count();
                    if crossings % 2 == 1 {
                        sign = -sign;
                    }
                }
                // decalage: beta(s x, s y) = (-1)^{|x|} s [x, y]
                sign *= sign_pow(self.l.space().basis()[word[i]].degree);
                let mut rest: Word = Vec::with_capacity(word.len() - 2);
                for (k, &l) in word.iter().enumerate() {
                    if k != i && k != j {
                        rest.push(l);
                    }
                }
                for (target, c) in bracket.iter() {
                    let mut letters = Vec::with_capacity(word.len() - 1);
                    letters.push(target);
                    letters.extend_from_slice(&rest);
                    push(letters, c * &sign);
                }
            }
        }
        out
    }
}

fn build(l: &GradedLieAlgebra, max_weight: u32) -> Result<CeComplex, CeError> {
    let wb = WordBuilder::new(l);
    let words = wb.enumerate(max_weight)?;
    let weight_graded = l.is_weight_additive();
    if !weight_graded {
        // collapsed storage is sound only when the differential never raises
        // the word weight, so that images stay inside the truncation
        let nonincreasing = l.bracket_table().iter().all(|(&(i, j), lc)| {
            let w = l.space().basis()[i].weight as u64 + l.space().basis()[j].weight as u64;
            lc.iter().all(|(k, _)| (l.space().basis()[k].weight as u64) <= w)
        }) && l.differential().is_none_or(|d| {
            d.iter().all(|(&i, lc)| {
                lc.iter()
                    .all(|(k, _)| l.space().basis()[k].weight <= l.space().basis()[i].weight)
            })
        });
        if !nonincreasing {
            return Err(CeError::WeightStructure);
        }
    }

    let mut word_dims: BTreeMap<(u32, i32), usize> = BTreeMap::new();
    let mut weights_by_degree: BTreeMap<i32, Vec<u32>> = BTreeMap::new();
    for w in &words {
        let (wt, d) = (wb.word_weight(w), wb.word_degree(w));
        *word_dims.entry((wt, d)).or_insert(0) += 1;
        let ws = weights_by_degree.entry(d).or_default();
        if !ws.contains(&wt) {
            ws.push(wt);
        }
    }

    // bucket words: by weight when the grading splits, else all in block 0
    let mut buckets: BTreeMap<u32, BTreeMap<i32, Vec<Word>>> = BTreeMap::new();
    for w in &words {
        let bucket = if weight_graded { wb.word_weight(w) } else { 0 };
        buckets
            .entry(bucket)
            .or_default()
            .entry(wb.word_degree(w))
            .or_default()
            .push(w.clone());
    }

    let mut spaces: BTreeMap<u32, GradedVectorSpace> = BTreeMap::new();
    let mut diffs: BTreeMap<(u32, i32), SparseMatrix> = BTreeMap::new();
    for (&bucket, by_degree) in &buckets {
        let mut basis = Vec::new();
        for (&d, ws) in by_degree.iter() {
            for w in ws {
                basis.push(BasisElement::new(wb.word_label(w), d, wb.word_weight(w)));
            }
        }
        spaces.insert(bucket, GradedVectorSpace::new(basis)?);

        for (&d, ws) in by_degree.iter() {
            let target_d = d - 1;
            let empty = Vec::new();
            let targets = by_degree.get(&target_d).unwrap_or(&empty);
            let target_index: BTreeMap<&Word, usize> =
                targets.iter().enumerate().map(|(k, w)| (w, k)).collect();
            let mut triplets = Vec::new();
            for (col, w) in ws.iter().enumerate() {
                for (canon, c) in wb.differential(w) {
                    use num_traits::Zero;
                    if c.is_zero() {
                        continue;
                    }
                    let Some(&row) = target_index.get(&canon) else {
                        // every nonzero image word lies in the enumeration:
                        // additivity (or the nonincreasing check above)
                        // keeps its weight within the truncation
                        return Err(CeError::ImageOutsideBasis(wb.word_label(&canon)));
                    };
                    triplets.push((row, col, c));
                }
            }
            if targets.is_empty() {
                continue;
            }
            let m = SparseMatrix::from_triplets(targets.len(), ws.len(), triplets)
                .expect("indices in range");
            if !m.is_zero() {
                diffs.insert((bucket, d), m);
            }
        }
    }

    let complex = ChainComplex::new(spaces, diffs)?;
    Ok(CeComplex {
        complex,
        weight_graded,
        word_dims,
        weights_by_degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat_int;
    use crate::graded::BasisElement;
    use crate::lie::{free_lie, tensor_cdga_lie, Cdga, GradedLieAlgebra, UNTRUNCATED};
    use std::collections::BTreeMap as Map;

    fn abelian_point() -> GradedLieAlgebra {
        GradedLieAlgebra::abelian(GradedVectorSpace::single("x", 0, 1))
    }

    #[test]
    fn abelian_one_generator_degree_zero() {
        let ce = ce_complex(&abelian_point(), 1).unwrap();
        assert!(ce.is_weight_graded());
        let dims = ce.bigraded_dims();
        assert_eq!(dims.get(&(0, 0)), Some(&1)); // unit
        assert_eq!(dims.get(&(1, 1)), Some(&1)); // shifted generator, odd
        assert_eq!(dims.len(), 2);
        // abelian => zero differential => homology = dims
        let h = ce.homology();
        assert_eq!(h.get(&(0, 0)), Some(&1));
        assert_eq!(h.get(&(1, 1)), Some(&1));
    }

    #[test]
    fn sl2_homology_is_exterior_on_degree_three() {
        let ce = ce_complex(&GradedLieAlgebra::sl2(), 3).unwrap();
        assert!(!ce.is_weight_graded());
        let h = ce.homology();
        let expected: Map<(u32, i32), usize> = [((0, 0), 1), ((3, 3), 1)].into();
        assert_eq!(h, expected);
    }

    #[test]
    fn free_lie_on_odd_generator_has_one_reduced_class() {
        let l = free_lie(&GradedVectorSpace::single("x", 1, 1), 3).unwrap();
        let ce = ce_complex(&l, 3).unwrap();
        assert!(ce.is_weight_graded());
        let h = ce.homology();
        let expected: Map<(u32, i32), usize> = [((0, 0), 1), ((1, 2), 1)].into();
        assert_eq!(h, expected, "CE of a free Lie algebra retains only the generators, shifted");
    }

    #[test]
    fn gr_dims_examples() {
        // abelian 1-dim in degree 0
        let s = gr_dims(&abelian_point(), 1).unwrap();
        assert_eq!(s.to_text(), "1 + s*t^1");

        // sl2: exterior on three odd weight-1 generators
        let s = gr_dims(&GradedLieAlgebra::sl2(), 3).unwrap();
        let per_weight: Vec<i64> = (0..=3).map(|w| {
            s.coefficients
                .iter()
                .filter(|((_, wt), _)| *wt == w)
                .map(|(_, &c)| c)
                .sum()
        }).collect();
        assert_eq!(per_weight, vec![1, 3, 3, 1]);

        // R^2 configuration Lie algebra: one even weight-1 and one odd weight-2 letter
        let l = free_lie(&GradedVectorSpace::single("x", 1, 1), 4).unwrap();
        let e = Cdga::new(GradedVectorSpace::single("e", -2, 0), Map::new(), None, None);
        let conf = tensor_cdga_lie(&e, &l, 4).unwrap();
        let s = gr_dims(&conf, 4).unwrap();
        for k in 0..=4u32 {
            assert_eq!(s.coeff(0, k), 1, "one degree-0 class per weight");
            if k >= 2 {
                assert_eq!(s.coeff(1, k), 1, "one degree-1 class for k >= 2");
            }
        }
    }

    #[test]
    fn bigraded_dims_equal_gr_dims() {
        let battery: Vec<GradedLieAlgebra> = vec![
            abelian_point(),
            GradedLieAlgebra::sl2(),
            free_lie(&GradedVectorSpace::single("x", 1, 1), 4).unwrap(),
            free_lie(
                &GradedVectorSpace::new(vec![
                    BasisElement::new("x", 0, 1),
                    BasisElement::new("y", 1, 1),
                ])
                .unwrap(),
                3,
            )
            .unwrap(),
        ];
        for l in &battery {
            let k = 4;
            let ce = ce_complex(l, k).unwrap();
            let series = gr_dims(l, k).unwrap();
            let mut from_words: Map<(i32, u32), i64> = Map::new();
            for (&(w, d), &n) in ce.bigraded_dims() {
                from_words.insert((d, w), n as i64);
            }
            assert_eq!(from_words, series.coefficients);
        }
    }

    #[test]
    fn mixed_internal_and_bracket_differential_squares_to_zero() {
        // contractible CDGA (u unit, w with dw = u) tensored with sl2: the
        // relative sign between the two differential summands is exercised
        let space = GradedVectorSpace::new(vec![
            BasisElement::new("u", 0, 0),
            BasisElement::new("w", 1, 0),
        ])
        .unwrap();
        let mut product = Map::new();
        product.insert((0, 0), LinComb::term(0, Rational::one()));
        product.insert((0, 1), LinComb::term(1, Rational::one()));
        product.insert((1, 0), LinComb::term(1, Rational::one()));
        // w·w = 0 by oddness
        let mut differential = Map::new();
        differential.insert(1usize, LinComb::term(0, Rational::one()));
        let a = Cdga::new(space, product, Some(0), Some(differential));
        assert!(a.validate().is_clean());

        let e = tensor_cdga_lie(&a, &GradedLieAlgebra::sl2(), 3).unwrap();
        // construction validates d² = 0 exactly; reaching here is the test
        let ce = ce_complex(&e, 3).unwrap();
        assert!(!ce.is_weight_graded());

        // the acyclic factor kills reduced homology
        let h = ce.homology();
        let expected: Map<(u32, i32), usize> = [((0, 0), 1)].into();
        assert_eq!(h, expected);
    }

    #[test]
    fn ce_with_free_lie_differential_squares_to_zero() {
        // free Lie on x (odd) tensored with H_c of R^2 at bigger truncation,
        // then CE: weight-graded path with nontrivial bracket data
        let l = free_lie(
            &GradedVectorSpace::new(vec![
                BasisElement::new("x", 1, 1),
                BasisElement::new("y", 3, 1),
            ])
            .unwrap(),
            4,
        )
        .unwrap();
        let ce = ce_complex(&l, 4).unwrap();
        assert!(ce.is_weight_graded());
        // reduced homology of CE(free Lie) is the generators, shifted by 1
        let h = ce.homology();
        let expected: Map<(u32, i32), usize> =
            [((0, 0), 1), ((1, 2), 1), ((1, 4), 1)].into();
        assert_eq!(h, expected);
    }

    #[test]
    fn jacobi_violation_is_rejected_before_assembly() {
        // corrupt sl2: [h,f] = +2f breaks Jacobi
        let space = GradedVectorSpace::new(vec![
            BasisElement::new("e", 0, 1),
            BasisElement::new("f", 0, 1),
            BasisElement::new("h", 0, 1),
        ])
        .unwrap();
        let (e, f, h) = (0usize, 1usize, 2usize);
        let mut bracket = Map::new();
        let mut put = |a: usize, b: usize, lc: LinComb| {
            bracket.insert((b, a), lc.negated());
            bracket.insert((a, b), lc);
        };
        put(h, e, LinComb::term(e, rat_int(2)));
        put(h, f, LinComb::term(f, rat_int(2)));
        put(e, f, LinComb::term(h, rat_int(1)));
        let corrupt = GradedLieAlgebra::new(space, bracket, None, UNTRUNCATED);
        assert!(!corrupt.validate().is_clean());
        assert!(matches!(ce_complex(&corrupt, 3), Err(CeError::InvalidLie(_))));

        // bypassing validation, the d² = 0 gate catches the same corruption
        let err = build(&corrupt, 3).unwrap_err();
        assert!(matches!(
            err,
            CeError::Graded(GradedError::DifferentialSquareNonzero { .. })
        ));
    }

    #[test]
    fn weight_zero_even_letter_is_rejected()  {
        // a degree 1 (even after shift... degree+1 = 2) weight-0 element
        let l = GradedLieAlgebra::abelian(GradedVectorSpace::single("x", 1, 0));
        assert!(matches!(ce_complex(&l, 2), Err(CeError::NonConvergent(_))));
        // odd shifted degree at weight 0 stays finite
        let l = GradedLieAlgebra::abelian(GradedVectorSpace::single("x", 0, 0));
        assert!(ce_complex(&l, 2).is_ok());
    }

    #[test]
    fn euler_characteristic_consistent_with_homology() {
        let l = free_lie(&GradedVectorSpace::single("x", 1, 1), 4).unwrap();
        let ce = ce_complex(&l, 4).unwrap();
        let chi = ce.euler_characteristic();
        let h = ce.chain_complex().homology();
        let mut from_h: Map<u32, i64> = Map::new();
        for (&(w, d), &b) in &h {
            *from_h.entry(w).or_insert(0) += if is_odd(d) { -(b as i64) } else { b as i64 };
        }
        for (&w, &x) in &chi {
            assert_eq!(x, from_h.get(&w).copied().unwrap_or(0), "weight {w}");
        }
    }
}
