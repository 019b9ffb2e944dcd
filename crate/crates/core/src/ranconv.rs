//! The combinatorial engine behind the disjoint and overlapping convolution
//! monoidal structures: the category of covers, cardinality functors, the
//! two tensor products with labeled summands, symmetric-power coinvariants
//! via the averaging projector, nilpotence, and the lax comparison map.
//!
//! A J-cover of I is a J-indexed family of subsets of I whose union is I;
//! parts may be empty and may overlap. Functions are the covers with
//! singleton membership. Tensor values are computed over subsets of
//! `{1..k}` as bitmasks; functor values depend only on the cardinality of a
//! subset, with summand labels carrying the subset data for group actions.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{rat_int, ExactlaError, Rational, SparseMatrix};
use crate::graded::{BasisElement, GradedError, GradedVectorSpace};

#[derive(Debug, Error)]
pub enum RanconvError {
    #[error("cover composition mismatch: inner target {inner:?} != outer source {outer:?}")]
    TargetSourceMismatch {
        inner: Vec<String>,
        outer: Vec<String>,
    },
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Exactla(#[from] ExactlaError),
}

/// A J-cover of I over labeled finite sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub source: BTreeSet<String>,
    pub target: BTreeSet<String>,
    pub parts: BTreeMap<String, BTreeSet<String>>,
}

impl Cover {
    pub fn new(
        source: impl IntoIterator<Item = String>,
        target: impl IntoIterator<Item = String>,
        parts: BTreeMap<String, BTreeSet<String>>,
    ) -> Result<Self, RanconvError> {
        let cover = Cover {
            source: source.into_iter().collect(),
            target: target.into_iter().collect(),
            parts,
        };
        cover.validate()?;
        Ok(cover)
    }

    pub fn validate(&self) -> Result<(), RanconvError> {
        let keys: BTreeSet<String> = self.parts.keys().cloned().collect();
        if keys != self.target {
            return Err(RanconvError::InvalidCover(format!(
                "parts are indexed by {keys:?}, target is {:?}",
                self.target
            )));
        }
        let mut union = BTreeSet::new();
        for (j, part) in &self.parts {
            for i in part {
                if !self.source.contains(i) {
                    return Err(RanconvError::InvalidCover(format!(
                        "part {j:?} contains {i:?}, not in the source"
                    )));
                }
                union.insert(i.clone());
            }
        }
        if union != self.source {
            return Err(RanconvError::InvalidCover(format!(
                "parts cover {union:?}, source is {:?}",
                self.source
            )));
        }
        Ok(())
    }

    /// The cover of a function: parts are the fibers.
    pub fn from_function(
        source: impl IntoIterator<Item = String>,
        target: impl IntoIterator<Item = String>,
        f: &BTreeMap<String, String>,
    ) -> Result<Self, RanconvError> {
        let target: BTreeSet<String> = target.into_iter().collect();
        let mut parts: BTreeMap<String, BTreeSet<String>> = target
            .iter()
            .map(|j| (j.clone(), BTreeSet::new()))
            .collect();
        for (i, j) in f {
            parts
                .get_mut(j)
                .ok_or_else(|| {
                    RanconvError::InvalidCover(format!("function value {j:?} not in target"))
                })?
                .insert(i.clone());
        }
        Cover::new(source, target, parts)
    }

    pub fn identity(set: impl IntoIterator<Item = String> + Clone) -> Self {
        let f: BTreeMap<String, String> = set
            .clone()
            .into_iter()
            .map(|x| (x.clone(), x))
            .collect();
        Cover::from_function(set.clone(), set, &f).expect("identity is a cover")
    }

    /// Every source element lies in exactly one part.
    pub fn is_function(&self) -> bool {
        self.source.iter().all(|i| {
            self.parts.values().filter(|part| part.contains(i)).count() == 1
        })
    }

    /// A function-cover with no empty part.
    pub fn is_surjective_function(&self) -> bool {
        self.is_function() && self.parts.values().all(|p| !p.is_empty())
    }
}

/// Composite `(t ∘ s)_k = ∪_{j ∈ t_k} s_j` of covers `s: I -> J`, `t: J -> K`.
pub fn compose(t: &Cover, s: &Cover) -> Result<Cover, RanconvError> {
    if s.target != t.source {
        return Err(RanconvError::TargetSourceMismatch {
            inner: s.target.iter().cloned().collect(),
            outer: t.source.iter().cloned().collect(),
        });
    }
    let parts: BTreeMap<String, BTreeSet<String>> = t
        .parts
        .iter()
        .map(|(k, t_part)| {
            let mut union = BTreeSet::new();
            for j in t_part {
                union.extend(s.parts[j].iter().cloned());
            }
            (k.clone(), union)
        })
        .collect();
    Cover::new(s.source.clone(), t.target.clone(), parts)
}

/// All J-covers of I, in a fixed deterministic order. The count is
/// `(2^{|J|} - 1)^{|I|}`: each source element picks a nonempty set of parts.
pub fn enumerate_covers(source: &[String], target: &[String]) -> Vec<Cover> {
    let j_count = target.len();
    let choices_per_element = (1usize << j_count).saturating_sub(1);
    let mut out = Vec::new();
    if source.is_empty() {
        let parts: BTreeMap<String, BTreeSet<String>> = target
            .iter()
            .map(|j| (j.clone(), BTreeSet::new()))
            .collect();
        out.push(Cover {
            source: BTreeSet::new(),
            target: target.iter().cloned().collect(),
            parts,
        });
        return out;
    }
    if j_count == 0 {
        return out; // no cover of a nonempty set by the empty family
    }
    let mut membership = vec![1usize; source.len()]; // nonempty masks 1..=choices
    loop {
        let mut parts: BTreeMap<String, BTreeSet<String>> = target
            .iter()
            .map(|j| (j.clone(), BTreeSet::new()))
            .collect();
        for (idx, &mask) in membership.iter().enumerate() {
            for (jpos, j) in target.iter().enumerate() {
                if mask & (1 << jpos) != 0 {
                    parts.get_mut(j).unwrap().insert(source[idx].clone());
                }
            }
        }
        out.push(Cover {
            source: source.iter().cloned().collect(),
            target: target.iter().cloned().collect(),
            parts,
        });
        // increment the mixed-radix counter over nonempty masks
        let mut pos = source.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if membership[pos] < choices_per_element {
                membership[pos] += 1;
                for m in membership.iter_mut().skip(pos + 1) {
                    *m = 1;
                }
                break;
            }
        }
    }
}

/// Factors `s: I -> J` as a splitting cover `I -> ⊔_J s_j` with singleton
/// parts, followed by the evident function `⊔_J s_j -> J`. Middle-set
/// elements are labeled `j:i`.
pub fn canonical_factorization(s: &Cover) -> (Cover, Cover) {
    let mut middle: BTreeSet<String> = BTreeSet::new();
    let mut split_parts: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut fun_parts: BTreeMap<String, BTreeSet<String>> = s
        .target
        .iter()
        .map(|j| (j.clone(), BTreeSet::new()))
        .collect();
    for (j, part) in &s.parts {
        for i in part {
            let m = format!("{j}:{i}");
            middle.insert(m.clone());
            split_parts.insert(m.clone(), [i.clone()].into());
            fun_parts.get_mut(j).unwrap().insert(m);
        }
    }
    let splitting = Cover {
        source: s.source.clone(),
        target: middle.clone(),
        parts: split_parts,
    };
    let function = Cover {
        source: middle,
        target: s.target.clone(),
        parts: fun_parts,
    };
    (splitting, function)
}

// ---------------------------------------------------------------------------
// Cardinality functors and convolution tensors
// ---------------------------------------------------------------------------

/// A reduced functor determined by cardinality: a finite-dimensional graded
/// value at each k in 1..=truncation, zero elsewhere.
#[derive(Debug, Clone)]
pub struct CardinalityFunctor {
    values: BTreeMap<usize, GradedVectorSpace>,
    truncation: usize,
}

impl CardinalityFunctor {
    pub fn new(values: BTreeMap<usize, GradedVectorSpace>, truncation: usize) -> Self {
        let mut values = values;
        values.retain(|&k, v| k >= 1 && k <= truncation && v.dim() > 0);
        CardinalityFunctor { values, truncation }
    }

    pub fn zero(truncation: usize) -> Self {
        CardinalityFunctor {
            values: BTreeMap::new(),
            truncation,
        }
    }

    /// Supported at a single cardinality.
    pub fn at(k: usize, space: GradedVectorSpace, truncation: usize) -> Self {
        CardinalityFunctor::new([(k, space)].into(), truncation)
    }

    /// Supported on the diagonal: value only at k = 1.
    pub fn diagonal(space: GradedVectorSpace, truncation: usize) -> Self {
        CardinalityFunctor::at(1, space, truncation)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn dim(&self, k: usize) -> usize {
        self.values.get(&k).map_or(0, |v| v.dim())
    }

    pub fn value(&self, k: usize) -> Option<&GradedVectorSpace> {
        self.values.get(&k)
    }

    pub fn is_zero_functor(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorMode {
    /// Sum over ordered tuples of disjoint nonempty subsets partitioning [k].
    Disjoint,
    /// Sum over ordered tuples of nonempty subsets covering [k].
    Overlap,
}

/// One summand basis vector of a labeled tensor: the subset tuple plus a
/// basis index into each factor's value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TensorElem {
    /// bitmask subsets of {0..k-1}, one per tensor slot
    pub parts: Vec<u32>,
    /// basis index into the corresponding factor's value at |part|
    pub factors: Vec<usize>,
}

/// A tensor value at fixed cardinality with its labeled summand basis.
#[derive(Debug, Clone)]
pub struct LabeledTensor {
    pub k: usize,
    pub mode: TensorMode,
    pub elems: Vec<TensorElem>,
    /// degree of each elem (sum over factors)
    pub degrees: Vec<i32>,
    /// weight of each elem (sum over factors)
    pub weights: Vec<u32>,
    labels: Vec<String>,
}

impl LabeledTensor {
    pub fn dim(&self) -> usize {
        self.elems.len()
    }

    pub fn space(&self) -> Result<GradedVectorSpace, GradedError> {
        GradedVectorSpace::new(
            self.elems
                .iter()
                .enumerate()
                .map(|(i, _)| BasisElement::new(self.labels[i].clone(), self.degrees[i], self.weights[i]))
                .collect(),
        )
    }

    pub fn dims_by_degree(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for &d in &self.degrees {
            *out.entry(d).or_insert(0) += 1;
        }
        out
    }
}

fn mask_label(mask: u32) -> String {
    let elems: Vec<String> = (0..32)
        .filter(|b| mask & (1 << b) != 0)
        .map(|b| (b + 1).to_string())
        .collect();
    format!("{{{}}}", elems.join(","))
}

fn build_labeled(
    k: usize,
    mode: TensorMode,
    factors: &[&CardinalityFunctor],
    elems: Vec<TensorElem>,
) -> LabeledTensor {
    let mut degrees = Vec::with_capacity(elems.len());
    let mut weights = Vec::with_capacity(elems.len());
    let mut labels = Vec::with_capacity(elems.len());
    for e in &elems {
        let mut degree = 0i32;
        let mut weight = 0u32;
        let mut label_parts = Vec::new();
        for (slot, (&mask, &fi)) in e.parts.iter().zip(&e.factors).enumerate() {
            let card = mask.count_ones() as usize;
            let b = &factors[slot].value(card).expect("nonzero factor").basis()[fi];
            degree += b.degree;
            weight += b.weight;
            label_parts.push(format!("{}{}", mask_label(mask), b.label));
        }
        degrees.push(degree);
        weights.push(weight);
        labels.push(label_parts.join("⊗"));
    }
    LabeledTensor {
        k,
        mode,
        elems,
        degrees,
        weights,
        labels,
    }
}

/// Ordered tuples `(s_1, ..., s_arity)` of nonempty subsets of `{0..k-1}`
/// with union the full set, disjoint when requested.
fn subset_tuples(k: usize, arity: usize, mode: TensorMode) -> Vec<Vec<u32>> {
    let full: u32 = if k == 32 { u32::MAX } else { (1 << k) - 1 };
    let mut out = Vec::new();
    let mut current: Vec<u32> = Vec::with_capacity(arity);
    fn rec(
        full: u32,
        arity: usize,
        mode: TensorMode,
        used: u32,
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if current.len() == arity {
            if used == full {
                out.push(current.clone());
            }
            return;
        }
        let candidates = match mode {
            TensorMode::Disjoint => full & !used,
            TensorMode::Overlap => full,
        };
        // iterate nonempty submasks of candidates in increasing order
        let mut sub = candidates;
        let mut masks = Vec::new();
        while sub != 0 {
            masks.push(sub);
            sub = (sub - 1) & candidates;
        }
        masks.sort_unstable();
        for mask in masks {
            current.push(mask);
            rec(full, arity, mode, used | mask, current, out);
            current.pop();
        }
    }
    if k >= 1 && arity >= 1 {
        rec(full, arity, mode, 0, &mut current, &mut out);
    }
    out
}

/// Multi-factor tensor by direct enumeration of subset tuples. This is the
/// reference J-ary formula; `tensor_power` must agree with it and the
/// verification suite checks that they do.
pub fn tensor_multi_direct(
    factors: &[&CardinalityFunctor],
    k: usize,
    mode: TensorMode,
) -> LabeledTensor {
    let mut elems = Vec::new();
    for parts in subset_tuples(k, factors.len(), mode) {
        let dims: Vec<usize> = parts
            .iter()
            .zip(factors)
            .map(|(&m, f)| f.dim(m.count_ones() as usize))
            .collect();
        if dims.iter().any(|&d| d == 0) {
            continue;
        }
        let mut idx = vec![0usize; dims.len()];
        loop {
            elems.push(TensorElem {
                parts: parts.clone(),
                factors: idx.clone(),
            });
            let mut pos = dims.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < dims[pos] {
                    break;
                }
                idx[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX {
                break;
            }
        }
    }
    elems.sort();
    build_labeled(k, mode, factors, elems)
}

/// Binary disjoint tensor `(F ⊗^⨿ G)(k)`, with labeled summands.
pub fn tensor_disjoint(f: &CardinalityFunctor, g: &CardinalityFunctor, k: usize) -> LabeledTensor {
    tensor_multi_direct(&[f, g], k, TensorMode::Disjoint)
}

/// Binary overlapping tensor `(F ⊗^∪ G)(k)`, with labeled summands.
pub fn tensor_overlap(f: &CardinalityFunctor, g: &CardinalityFunctor, k: usize) -> LabeledTensor {
    tensor_multi_direct(&[f, g], k, TensorMode::Overlap)
}

/// The j-fold tensor power of `F` at cardinality `k`, built by iterating the
/// binary tensor and flattening with the associativity relabeling. Produces
/// the same summand set as the direct J-ary enumeration.
pub fn tensor_power(f: &CardinalityFunctor, j: usize, k: usize, mode: TensorMode) -> LabeledTensor {
    assert!(j >= 1, "tensor power needs arity >= 1");
    // elems per cardinality, flattened to arity = level
    let mut level: BTreeMap<usize, Vec<TensorElem>> = BTreeMap::new();
    for card in 1..=k {
        let full: u32 = (1 << card) - 1;
        let mut elems = Vec::new();
        for fi in 0..f.dim(card) {
            elems.push(TensorElem {
                parts: vec![full],
                factors: vec![fi],
            });
        }
        level.insert(card, elems);
    }
    for _ in 1..j {
        let mut next: BTreeMap<usize, Vec<TensorElem>> = BTreeMap::new();
        for card in 1..=k {
            let mut elems = Vec::new();
            for pair in subset_tuples(card, 2, mode) {
                let (a, b) = (pair[0], pair[1]);
                let a_card = a.count_ones() as usize;
                // order-preserving relabeling of {0..|a|-1} into the bits of a
                let a_bits: Vec<u32> = (0..32).filter(|&bit| a & (1 << bit) != 0).collect();
                let Some(inner) = level.get(&a_card) else {
                    continue;
                };
                for e in inner {
                    for fb in 0..f.dim(b.count_ones() as usize) {
                        let mut parts: Vec<u32> = e
                            .parts
                            .iter()
                            .map(|&m| {
                                let mut out = 0u32;
                                for (pos, &bit) in a_bits.iter().enumerate() {
                                    if m & (1 << pos) != 0 {
                                        out |= 1 << bit;
                                    }
                                }
                                out
                            })
                            .collect();
                        parts.push(b);
                        let mut factors = e.factors.clone();
                        factors.push(fb);
                        elems.push(TensorElem { parts, factors });
                    }
                }
            }
            next.insert(card, elems);
        }
        level = next;
    }
    let mut elems = level.remove(&k).unwrap_or_default();
    elems.sort();
    elems.dedup();
    let factors: Vec<&CardinalityFunctor> = std::iter::repeat_n(f, j).collect();
    build_labeled(k, mode, &factors, elems)
}

fn permutations(j: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for len in 0..j {
        let mut next = Vec::new();
        for p in &out {
            for pos in 0..=len {
                let mut q = p.clone();
                q.insert(pos, len);
                next.push(q);
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Koszul sign of the place permutation sending source slot `perm[i]` to
/// output slot `i`: the product over inverted pairs of the degrees of the
/// two factors that cross.
fn koszul_sign(perm: &[usize], degrees: &[i32]) -> Rational {
    let mut negative = false;
    for i in 0..perm.len() {
        for l in (i + 1)..perm.len() {
            if perm[i] > perm[l]
                && degrees[perm[i]].rem_euclid(2) == 1
                && degrees[perm[l]].rem_euclid(2) == 1
            {
                negative = !negative;
            }
        }
    }
    if negative {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// Dimensions per degree of the Σ_j-coinvariants of the j-fold tensor power
/// of `F` at cardinality `k`, computed as the rank of the averaging
/// projector. Returns a materialized graded space with synthetic labels.
pub fn sym_power(
    f: &CardinalityFunctor,
    j: usize,
    k: usize,
    mode: TensorMode,
) -> Result<GradedVectorSpace, RanconvError> {
    let tensor = tensor_power(f, j, k, mode);
    let mut index: BTreeMap<&TensorElem, usize> = BTreeMap::new();
    for (i, e) in tensor.elems.iter().enumerate() {
        index.insert(e, i);
    }
    let perms = permutations(j);
    let order = rat_int(perms.len() as i64);

    // block by degree; the action preserves degree and weight
    let mut blocks: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &d) in tensor.degrees.iter().enumerate() {
        blocks.entry(d).or_default().push(i);
    }

    let mut basis = Vec::new();
    for (&degree, block) in &blocks {
        let local: BTreeMap<usize, usize> =
            block.iter().enumerate().map(|(c, &i)| (i, c)).collect();
        let mut triplets: Vec<(usize, usize, Rational)> = Vec::new();
        for (&global, &col) in &local {
            let e = &tensor.elems[global];
            let factor_degrees: Vec<i32> = e
                .parts
                .iter()
                .zip(&e.factors)
                .map(|(&m, &fi)| {
                    f.value(m.count_ones() as usize).expect("nonzero").basis()[fi].degree
                })
                .collect();
            for p in &perms {
                // place-permutation: slot i of the image takes the content
                // of slot p[i]
                let parts: Vec<u32> = p.iter().map(|&s| e.parts[s]).collect();
                let factors: Vec<usize> = p.iter().map(|&s| e.factors[s]).collect();
                let image = TensorElem { parts, factors };
                let sign = koszul_sign(p, &factor_degrees);
                let row = local[&index[&image]];
                triplets.push((row, col, sign / &order));
            }
        }
        let projector = SparseMatrix::from_triplets(block.len(), block.len(), triplets)?;
        let rank = projector.projector_rank()?;
        for i in 0..rank {
            basis.push(BasisElement::new(
                format!("sym{j}[k={k},deg={degree}]#{i}"),
                degree,
                k as u32,
            ));
        }
    }
    Ok(GradedVectorSpace::new(basis)?)
}

/// True iff the m-fold disjoint tensor of the given reduced functors is zero
/// at every cardinality in 1..=r whenever m >= r+1 (vacuously true for
/// m <= r).
pub fn nilpotence_check(functors: &[&CardinalityFunctor], r: usize) -> bool {
    let m = functors.len();
    if m < r + 1 {
        return true;
    }
    for k in 1..=r {
        if tensor_multi_direct(functors, k, TensorMode::Disjoint).dim() > 0 {
            return false;
        }
    }
    true
}

/// The component of the lax monoidal comparison at cardinality k: the
/// projection from the overlapping tensor onto the disjoint one, killing
/// summands whose parts are not a partition. Returned as (overlap value,
/// disjoint value, matrix from overlap columns to disjoint rows).
pub fn lax_projection(
    f: &CardinalityFunctor,
    g: &CardinalityFunctor,
    k: usize,
) -> Result<(LabeledTensor, LabeledTensor, SparseMatrix), RanconvError> {
    let overlap = tensor_overlap(f, g, k);
    let disjoint = tensor_disjoint(f, g, k);
    let mut row_index: BTreeMap<&TensorElem, usize> = BTreeMap::new();
    for (i, e) in disjoint.elems.iter().enumerate() {
        row_index.insert(e, i);
    }
    let mut triplets = Vec::new();
    for (col, e) in overlap.elems.iter().enumerate() {
        if let Some(&row) = row_index.get(e) {
            triplets.push((row, col, Rational::one()));
        }
    }
    let matrix = SparseMatrix::from_triplets(disjoint.dim(), overlap.dim(), triplets)?;
    Ok((overlap, disjoint, matrix))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn line(degree: i32) -> GradedVectorSpace {
        GradedVectorSpace::single("v", degree, 1)
    }

    #[test]
    fn compose_splitting_then_collapse() {
        // S: {1,2} -> {a} with S_a = {1,2}; T: {a} -> {u,v}, T_u = T_v = {a}
        let s = Cover::new(
            labels(&["1", "2"]),
            labels(&["a"]),
            [("a".into(), ["1".into(), "2".into()].into())].into(),
        )
        .unwrap();
        let t = Cover::new(
            labels(&["a"]),
            labels(&["u", "v"]),
            [
                ("u".into(), ["a".into()].into()),
                ("v".into(), ["a".into()].into()),
            ]
            .into(),
        )
        .unwrap();
        let ts = compose(&t, &s).unwrap();
        let full: BTreeSet<String> = ["1".into(), "2".into()].into();
        assert_eq!(ts.parts["u"], full);
        assert_eq!(ts.parts["v"], full);
    }

    #[test]
    fn identity_covers_compose_to_identity() {
        let id = Cover::identity(labels(&["1", "2", "3"]));
        let both = compose(&id, &id).unwrap();
        assert_eq!(both, id);
    }

    #[test]
    fn function_covers_compose_like_functions() {
        let f: BTreeMap<String, String> = [
            ("1".into(), "a".into()),
            ("2".into(), "a".into()),
            ("3".into(), "b".into()),
        ]
        .into();
        let g: BTreeMap<String, String> =
            [("a".into(), "x".into()), ("b".into(), "x".into())].into();
        let cf = Cover::from_function(labels(&["1", "2", "3"]), labels(&["a", "b"]), &f).unwrap();
        let cg = Cover::from_function(labels(&["a", "b"]), labels(&["x"]), &g).unwrap();
        let gf: BTreeMap<String, String> = f
            .iter()
            .map(|(i, j)| (i.clone(), g[j].clone()))
            .collect();
        let cgf =
            Cover::from_function(labels(&["1", "2", "3"]), labels(&["x"]), &gf).unwrap();
        assert_eq!(compose(&cg, &cf).unwrap(), cgf);
    }

    #[test]
    fn compose_rejects_mismatch() {
        let id1 = Cover::identity(labels(&["1"]));
        let id2 = Cover::identity(labels(&["2"]));
        assert!(matches!(
            compose(&id1, &id2),
            Err(RanconvError::TargetSourceMismatch { .. })
        ));
    }

    #[test]
    fn enumerate_cover_counts() {
        assert_eq!(enumerate_covers(&labels(&["1", "2"]), &labels(&["a"])).len(), 1);
        assert_eq!(enumerate_covers(&labels(&["1"]), &labels(&["a", "b"])).len(), 3);
        assert_eq!(
            enumerate_covers(&labels(&["1", "2"]), &labels(&["a", "b"])).len(),
            9
        );
        for cover in enumerate_covers(&labels(&["1", "2"]), &labels(&["a", "b"])) {
            cover.validate().unwrap();
        }
        // (2^|J| - 1)^|I| with |I| = 0 or |J| = 0
        assert_eq!(enumerate_covers(&[], &labels(&["a"])).len(), 1);
        assert_eq!(enumerate_covers(&labels(&["1"]), &[]).len(), 0);
    }

    #[test]
    fn factorization_of_a_function_splits_into_singletons() {
        let f: BTreeMap<String, String> =
            [("1".into(), "a".into()), ("2".into(), "a".into())].into();
        let c = Cover::from_function(labels(&["1", "2"]), labels(&["a"]), &f).unwrap();
        let (split, fun) = canonical_factorization(&c);
        assert!(split.parts.values().all(|p| p.len() == 1));
        assert!(split.is_function(), "splitting of a function is a bijection cover");
        assert_eq!(compose(&fun, &split).unwrap(), c);
    }

    #[test]
    fn factorization_middle_counts_multiplicity() {
        // S: {1} -> {a,b} with S_a = S_b = {1}: middle set has 2 elements
        let s = Cover::new(
            labels(&["1"]),
            labels(&["a", "b"]),
            [
                ("a".into(), ["1".into()].into()),
                ("b".into(), ["1".into()].into()),
            ]
            .into(),
        )
        .unwrap();
        let (split, fun) = canonical_factorization(&s);
        assert_eq!(split.target.len(), 2);
        assert_eq!(compose(&fun, &split).unwrap(), s);
    }

    #[test]
    fn factorization_recomposes_on_small_sets() {
        let source = labels(&["1", "2"]);
        let target = labels(&["a", "b"]);
        for s in enumerate_covers(&source, &target) {
            let (split, fun) = canonical_factorization(&s);
            split.validate().unwrap();
            fun.validate().unwrap();
            assert_eq!(compose(&fun, &split).unwrap(), s);
        }
    }

    #[test]
    fn disjoint_tensor_counts() {
        let f = CardinalityFunctor::diagonal(line(0), 4);
        // two ordered 2-part set partitions of [2]
        assert_eq!(tensor_disjoint(&f, &f, 2).dim(), 2);
        assert_eq!(tensor_disjoint(&f, &f, 1).dim(), 0);
        let g = CardinalityFunctor::at(2, line(0), 4);
        // choose the singleton slot: C(3,1) = 3
        assert_eq!(tensor_disjoint(&f, &g, 3).dim(), 3);
        let zero = CardinalityFunctor::zero(4);
        assert_eq!(tensor_disjoint(&f, &zero, 2).dim(), 0);
    }

    #[test]
    fn overlap_tensor_counts() {
        let f = CardinalityFunctor::diagonal(line(0), 4);
        assert_eq!(tensor_overlap(&f, &f, 1).dim(), 1, "S1 = S2 = {{1}}");
        assert_eq!(tensor_overlap(&f, &f, 2).dim(), 2, "only disjoint covers survive");
        // F(1) ⊗ G(k) appears with multiplicity k
        for k in 1..=4usize {
            let g = CardinalityFunctor::at(k, line(0), 4);
            let value = tensor_overlap(&f, &g, k);
            let count = value
                .elems
                .iter()
                .filter(|e| e.parts[1].count_ones() as usize == k)
                .count();
            assert_eq!(count, k);
        }
    }

    #[test]
    fn tensors_are_symmetric_dimensionwise() {
        let f = CardinalityFunctor::new(
            [(1, line(0)), (2, line(1))].into(),
            3,
        );
        let g = CardinalityFunctor::diagonal(line(1), 3);
        for k in 1..=3 {
            assert_eq!(
                tensor_disjoint(&f, &g, k).dims_by_degree(),
                tensor_disjoint(&g, &f, k).dims_by_degree()
            );
            assert_eq!(
                tensor_overlap(&f, &g, k).dims_by_degree(),
                tensor_overlap(&g, &f, k).dims_by_degree()
            );
        }
    }

    #[test]
    fn iterated_power_matches_direct_enumeration() {
        let f = CardinalityFunctor::new(
            [(1, line(0)), (2, line(1))].into(),
            3,
        );
        for mode in [TensorMode::Disjoint, TensorMode::Overlap] {
            for j in 1..=3usize {
                for k in 1..=3usize {
                    let factors: Vec<&CardinalityFunctor> = vec![&f; j];
                    let direct = tensor_multi_direct(&factors, k, mode);
                    let iterated = tensor_power(&f, j, k, mode);
                    assert_eq!(direct.elems, iterated.elems, "j={j} k={k} {mode:?}");
                }
            }
        }
    }

    #[test]
    fn sym_power_diagonal_disjoint_graded_vanish() {
        let f = CardinalityFunctor::diagonal(line(0), 4);
        assert_eq!(sym_power(&f, 2, 2, TensorMode::Disjoint).unwrap().dim(), 1);
        assert_eq!(sym_power(&f, 2, 3, TensorMode::Disjoint).unwrap().dim(), 0);
        assert_eq!(sym_power(&f, 3, 2, TensorMode::Disjoint).unwrap().dim(), 0);
    }

    #[test]
    fn sym_power_overlap_even_and_odd_lines() {
        let even = CardinalityFunctor::diagonal(line(0), 4);
        assert_eq!(sym_power(&even, 2, 1, TensorMode::Overlap).unwrap().dim(), 1);
        let odd = CardinalityFunctor::diagonal(line(1), 4);
        assert_eq!(
            sym_power(&odd, 2, 1, TensorMode::Overlap).unwrap().dim(),
            0,
            "exterior square of an odd line vanishes"
        );
    }

    #[test]
    fn nilpotence_examples() {
        let f = CardinalityFunctor::diagonal(line(0), 4);
        assert!(nilpotence_check(&[&f], 0));
        assert!(nilpotence_check(&[&f, &f], 1));
        let fs: Vec<&CardinalityFunctor> = vec![&f; 4];
        assert!(nilpotence_check(&fs, 3));
        // at k = r+1 the disjoint tensor is nonzero, but that is outside
        // the truncated range the definition quantifies over
        assert_eq!(
            tensor_multi_direct(&fs, 4, TensorMode::Disjoint).dim(),
            24
        );
    }

    #[test]
    fn lax_projection_cases() {
        let f = CardinalityFunctor::diagonal(line(0), 4);
        // k=2: all surviving covers are partitions; iso
        let (overlap, disjoint, m) = lax_projection(&f, &f, 2).unwrap();
        assert_eq!(overlap.dim(), 2);
        assert_eq!(disjoint.dim(), 2);
        assert_eq!(m.rank(), 2);
        // k=1: 1-dimensional source, zero target
        let (overlap, disjoint, m) = lax_projection(&f, &f, 1).unwrap();
        assert_eq!(overlap.dim(), 1);
        assert_eq!(disjoint.dim(), 0);
        assert!(m.is_zero());
        // zero functor
        let zero = CardinalityFunctor::zero(4);
        let (_, _, m) = lax_projection(&f, &zero, 2).unwrap();
        assert!(m.is_zero());
        // surjectivity in general: rank equals the disjoint dimension
        let g = CardinalityFunctor::new([(1, line(1)), (2, line(0))].into(), 3);
        let (_, disjoint, m) = lax_projection(&f, &g, 3).unwrap();
        assert_eq!(m.rank(), disjoint.dim());
    }

    #[test]
    fn cover_json_round_trip() {
        let s = Cover::new(
            labels(&["1"]),
            labels(&["a", "b"]),
            [
                ("a".into(), ["1".into()].into()),
                ("b".into(), ["1".into()].into()),
            ]
            .into(),
        )
        .unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: Cover = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
