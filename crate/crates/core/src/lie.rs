//! Differential graded Lie algebras over the rationals with a weight
//! grading, free graded Lie algebras on the super-Lyndon basis, and the
//! CDGA-tensor construction `A ⊗ L`.
//!
//! The Koszul sign convention is fixed once for the whole crate: transposing
//! symbols of degrees `p` and `q` introduces `(-1)^{pq}`. Every sign below
//! derives from that rule; `validate` and the `d² = 0` checks in `ce` are the
//! regression net for it.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_traits::One;
use thiserror::Error;

use crate::exactla::{
    is_odd, parse_rational, rat_int, sign_pow, ExactlaError, LinComb, Rational,
};
use crate::graded::{BasisElement, GradedError, GradedVectorSpace};

/// Truncation weight meaning "no truncation".
pub const UNTRUNCATED: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum LieError {
    #[error("free Lie generators must all have weight 1, found {label:?} at weight {weight}")]
    NonUnitWeightGenerator { label: String, weight: u32 },
    #[error("structure validation failed:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Exactla(#[from] ExactlaError),
    #[error("unknown basis label {0:?}")]
    UnknownLabel(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A single violated axiom, reported with the offending basis labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Antisymmetry { left: String, right: String },
    Jacobi { x: String, y: String, z: String },
    DegreeAdditivity { left: String, right: String },
    DifferentialDegree { on: String },
    DifferentialWeight { on: String },
    DifferentialSquare { on: String },
    Derivation { left: String, right: String },
    Commutativity { left: String, right: String },
    Associativity { a: String, b: String, c: String },
    Unit { on: String },
    Leibniz { left: String, right: String },
}

/// Validation outcome; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "  {:?}", v)?;
        }
        Ok(())
    }
}

/// Differential graded Lie algebra with ordered basis. The bracket table is
/// stored sparsely with both orders present; brackets whose total weight
/// exceeds `max_weight` are truncated to zero (the quotient by the ideal of
/// high weights, which is again a dg Lie algebra).
#[derive(Debug, Clone)]
pub struct GradedLieAlgebra {
    space: GradedVectorSpace,
    bracket: BTreeMap<(usize, usize), LinComb>,
    differential: Option<BTreeMap<usize, LinComb>>,
    max_weight: u32,
}

impl GradedLieAlgebra {
    pub fn new(
        space: GradedVectorSpace,
        bracket: BTreeMap<(usize, usize), LinComb>,
        differential: Option<BTreeMap<usize, LinComb>>,
        max_weight: u32,
    ) -> Self {
        let mut bracket = bracket;
        bracket.retain(|_, lc| !lc.is_zero());
        let differential = differential.filter(|d| d.values().any(|lc| !lc.is_zero()));
        GradedLieAlgebra {
            space,
            bracket,
            differential,
            max_weight,
        }
    }

    /// Abelian Lie algebra on the given space.
    pub fn abelian(space: GradedVectorSpace) -> Self {
        GradedLieAlgebra::new(space, BTreeMap::new(), None, UNTRUNCATED)
    }

    /// sl2 in degree 0, basis e, f, h at weight 1:
    /// [h,e] = 2e, [h,f] = -2f, [e,f] = h.
    pub fn sl2() -> Self {
        let space = GradedVectorSpace::new(vec![
            BasisElement::new("e", 0, 1),
            BasisElement::new("f", 0, 1),
            BasisElement::new("h", 0, 1),
        ])
        .unwrap();
        let (e, f, h) = (0usize, 1usize, 2usize);
        let mut bracket = BTreeMap::new();
        let mut put = |a: usize, b: usize, lc: LinComb| {
            bracket.insert((b, a), lc.negated());
            bracket.insert((a, b), lc);
        };
        put(h, e, LinComb::term(e, rat_int(2)));
        put(h, f, LinComb::term(f, rat_int(-2)));
        put(e, f, LinComb::term(h, rat_int(1)));
        GradedLieAlgebra::new(space, bracket, None, UNTRUNCATED)
    }

    pub fn space(&self) -> &GradedVectorSpace {
        &self.space
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn differential(&self) -> Option<&BTreeMap<usize, LinComb>> {
        self.differential.as_ref()
    }

    pub fn bracket_table(&self) -> &BTreeMap<(usize, usize), LinComb> {
        &self.bracket
    }

    /// Bracket of two basis elements, as stored.
    pub fn bracket(&self, i: usize, j: usize) -> LinComb {
        self.bracket.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// Bracket extended bilinearly to linear combinations.
    pub fn bracket_lincomb(&self, a: &LinComb, b: &LinComb) -> LinComb {
        let mut out = LinComb::zero();
        for (i, ci) in a.iter() {
            for (j, cj) in b.iter() {
                out.add_scaled(&self.bracket(i, j), &(ci * cj));
            }
        }
        out
    }

    pub fn d_of(&self, i: usize) -> LinComb {
        self.differential
            .as_ref()
            .and_then(|d| d.get(&i))
            .cloned()
            .unwrap_or_default()
    }

    pub fn d_lincomb(&self, a: &LinComb) -> LinComb {
        let mut out = LinComb::zero();
        for (i, c) in a.iter() {
            out.add_scaled(&self.d_of(i), c);
        }
        out
    }

    fn degree(&self, i: usize) -> i32 {
        self.space.basis()[i].degree
    }

    fn weight(&self, i: usize) -> u32 {
        self.space.basis()[i].weight
    }

    fn label(&self, i: usize) -> &str {
        &self.space.basis()[i].label
    }

    /// True when the bracket adds weights and the differential preserves
    /// them. The configuration-space pipeline always is; classical algebras
    /// like sl2 with an unweighted basis are not, and their CE complex is
    /// assembled without the weight splitting.
    pub fn is_weight_additive(&self) -> bool {
        let additive_bracket = self.bracket.iter().all(|(&(i, j), lc)| {
            let w = self.weight(i) as u64 + self.weight(j) as u64;
            lc.iter().all(|(k, _)| self.weight(k) as u64 == w)
        });
        let preserving_d = self.differential.as_ref().is_none_or(|d| {
            d.iter()
                .all(|(&i, lc)| lc.iter().all(|(k, _)| self.weight(k) == self.weight(i)))
        });
        additive_bracket && preserving_d
    }

    fn lincomb_degree_is(&self, lc: &LinComb, degree: i32) -> bool {
        lc.iter().all(|(k, _)| self.degree(k) == degree)
    }

    /// Checks graded antisymmetry on all pairs, graded Jacobi on all triples
    /// within the truncation, degree additivity, and (when present) that the
    /// differential has degree -1, squares to zero, and is a derivation of
    /// the bracket. Violations are data, not errors.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.space.dim();
        let truncated = |ws: u64| self.max_weight != UNTRUNCATED && ws > self.max_weight as u64;

        for i in 0..n {
            for j in 0..n {
                let b = self.bracket(i, j);
                if !self.lincomb_degree_is(&b, self.degree(i) + self.degree(j)) {
                    report.violations.push(Violation::DegreeAdditivity {
                        left: self.label(i).into(),
                        right: self.label(j).into(),
                    });
                }
                // [x,y] + (-1)^{|x||y|} [y,x] = 0
                let mut anti = b.clone();
                let sign = if is_odd(self.degree(i)) && is_odd(self.degree(j)) {
                    -Rational::one()
                } else {
                    Rational::one()
                };
                anti.add_scaled(&self.bracket(j, i), &sign);
                if !anti.is_zero() {
                    report.violations.push(Violation::Antisymmetry {
                        left: self.label(i).into(),
                        right: self.label(j).into(),
                    });
                }
            }
        }

        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let ws = self.weight(x) as u64 + self.weight(y) as u64 + self.weight(z) as u64;
                    if truncated(ws) {
                        continue;
                    }
                    // [x,[y,z]] - [[x,y],z] - (-1)^{|x||y|} [y,[x,z]] = 0
                    let lx = LinComb::term(x, Rational::one());
                    let ly = LinComb::term(y, Rational::one());
                    let mut jac = self.bracket_lincomb(&lx, &self.bracket(y, z));
                    jac.add_scaled(
                        &self.bracket_lincomb(&self.bracket(x, y), &LinComb::term(z, Rational::one())),
                        &-Rational::one(),
                    );
                    let sign = sign_pow(self.degree(x) * self.degree(y) + 1);
                    jac.add_scaled(&self.bracket_lincomb(&ly, &self.bracket(x, z)), &sign);
                    if !jac.is_zero() {
                        report.violations.push(Violation::Jacobi {
                            x: self.label(x).into(),
                            y: self.label(y).into(),
                            z: self.label(z).into(),
                        });
                    }
                }
            }
        }

        if self.differential.is_some() {
            for i in 0..n {
                let di = self.d_of(i);
                if !self.lincomb_degree_is(&di, self.degree(i) - 1) {
                    report.violations.push(Violation::DifferentialDegree {
                        on: self.label(i).into(),
                    });
                }
                if !self.d_lincomb(&di).is_zero() {
                    report.violations.push(Violation::DifferentialSquare {
                        on: self.label(i).into(),
                    });
                }
            }
            for i in 0..n {
                for j in 0..n {
                    if truncated(self.weight(i) as u64 + self.weight(j) as u64) {
                        continue;
                    }
                    // d[x,y] = [dx,y] + (-1)^{|x|} [x,dy]
                    let mut lhs = self.d_lincomb(&self.bracket(i, j));
                    let lj = LinComb::term(j, Rational::one());
                    let li = LinComb::term(i, Rational::one());
                    lhs.add_scaled(&self.bracket_lincomb(&self.d_of(i), &lj), &-Rational::one());
                    lhs.add_scaled(
                        &self.bracket_lincomb(&li, &self.d_of(j)),
                        &-sign_pow(self.degree(i)),
                    );
                    if !lhs.is_zero() {
                        report.violations.push(Violation::Derivation {
                            left: self.label(i).into(),
                            right: self.label(j).into(),
                        });
                    }
                }
            }
        }

        report
    }

    /// Structured text serialization: basis lines, bracket lines, diff lines.
    pub fn to_text(&self) -> String {
        let labels: Vec<String> = self.space.basis().iter().map(|b| b.label.clone()).collect();
        let mut out = String::new();
        for b in self.space.basis() {
            writeln!(out, "basis {} {} {}", b.label, b.degree, b.weight).unwrap();
        }
        for (&(i, j), lc) in &self.bracket {
            if i <= j && !lc.is_zero() {
                writeln!(
                    out,
                    "bracket {} {} = {}",
                    labels[i],
                    labels[j],
                    lc.to_text(&labels)
                )
                .unwrap();
            }
        }
        if let Some(d) = &self.differential {
            for (&i, lc) in d {
                if !lc.is_zero() {
                    writeln!(out, "diff {} = {}", labels[i], lc.to_text(&labels)).unwrap();
                }
            }
        }
        out
    }

    /// Parses the structured text format written by `to_text`. Brackets given
    /// in one order are completed antisymmetrically unless both orders are
    /// present (so corrupted tables can be expressed for validation tests).
    pub fn from_text(text: &str) -> Result<Self, LieError> {
        let mut basis = Vec::new();
        let mut raw_brackets: Vec<(usize, String, String, String)> = Vec::new();
        let mut raw_diffs: Vec<(usize, String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: &str| LieError::Parse {
                line: lineno + 1,
                msg: msg.to_string(),
            };
            let mut tokens = line.split_whitespace();
            match tokens.next() {
                Some("basis") => {
                    let label = tokens.next().ok_or_else(|| parse_err("missing label"))?;
                    let degree: i32 = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| parse_err("missing or bad degree"))?;
                    let weight: u32 = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| parse_err("missing or bad weight"))?;
                    basis.push(BasisElement::new(label, degree, weight));
                }
                Some("bracket") => {
                    let a = tokens.next().ok_or_else(|| parse_err("missing label"))?;
                    let b = tokens.next().ok_or_else(|| parse_err("missing label"))?;
                    let rest: Vec<&str> = tokens.collect();
                    if rest.first() != Some(&"=") {
                        return Err(parse_err("expected '='"));
                    }
                    raw_brackets.push((lineno + 1, a.into(), b.into(), rest[1..].join(" ")));
                }
                Some("diff") => {
                    let a = tokens.next().ok_or_else(|| parse_err("missing label"))?;
                    let rest: Vec<&str> = tokens.collect();
                    if rest.first() != Some(&"=") {
                        return Err(parse_err("expected '='"));
                    }
                    raw_diffs.push((lineno + 1, a.into(), rest[1..].join(" ")));
                }
                Some(other) => {
                    return Err(parse_err(&format!("unknown directive {other:?}")));
                }
                None => unreachable!(),
            }
        }
        let space = GradedVectorSpace::new(basis)?;
        let index = |label: &str, line: usize| -> Result<usize, LieError> {
            space.index_of(label).ok_or(LieError::Parse {
                line,
                msg: format!("unknown label {label:?}"),
            })
        };
        let parse_lincomb = |text: &str, line: usize| -> Result<LinComb, LieError> {
            let mut lc = LinComb::zero();
            for part in text.split('+') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let mut it = part.split_whitespace();
                let coeff = it
                    .next()
                    .map(parse_rational)
                    .transpose()
                    .map_err(|e| LieError::Parse {
                        line,
                        msg: e.to_string(),
                    })?
                    .ok_or(LieError::Parse {
                        line,
                        msg: "empty term".into(),
                    })?;
                let label = it.next().ok_or(LieError::Parse {
                    line,
                    msg: "term missing label".into(),
                })?;
                lc.add(index(label, line)?, coeff);
            }
            Ok(lc)
        };

        let mut bracket: BTreeMap<(usize, usize), LinComb> = BTreeMap::new();
        let mut explicit: Vec<(usize, usize)> = Vec::new();
        for (line, a, b, rhs) in raw_brackets {
            let (i, j) = (index(&a, line)?, index(&b, line)?);
            bracket.insert((i, j), parse_lincomb(&rhs, line)?);
            explicit.push((i, j));
        }
        for (i, j) in explicit {
            if !bracket.contains_key(&(j, i)) {
                let sign = if is_odd(space.basis()[i].degree) && is_odd(space.basis()[j].degree) {
                    Rational::one()
                } else {
                    -Rational::one()
                };
                let mirrored = bracket[&(i, j)].scaled(&sign);
                bracket.insert((j, i), mirrored);
            }
        }
        let mut differential = BTreeMap::new();
        for (line, a, rhs) in raw_diffs {
            differential.insert(index(&a, line)?, parse_lincomb(&rhs, line)?);
        }
        let differential = (!differential.is_empty()).then_some(differential);
        Ok(GradedLieAlgebra::new(space, bracket, differential, UNTRUNCATED))
    }
}

/// Graded-commutative differential graded algebra with ordered basis and a
/// sparsely stored multiplication table.
#[derive(Debug, Clone)]
pub struct Cdga {
    space: GradedVectorSpace,
    product: BTreeMap<(usize, usize), LinComb>,
    unit: Option<usize>,
    differential: Option<BTreeMap<usize, LinComb>>,
}

impl Cdga {
    pub fn new(
        space: GradedVectorSpace,
        product: BTreeMap<(usize, usize), LinComb>,
        unit: Option<usize>,
        differential: Option<BTreeMap<usize, LinComb>>,
    ) -> Self {
        let mut product = product;
        product.retain(|_, lc| !lc.is_zero());
        let differential = differential.filter(|d| d.values().any(|lc| !lc.is_zero()));
        Cdga {
            space,
            product,
            unit,
            differential,
        }
    }

    /// The ground field as a one-element unital CDGA.
    pub fn ground_field() -> Self {
        let space = GradedVectorSpace::single("1", 0, 0);
        let mut product = BTreeMap::new();
        product.insert((0, 0), LinComb::term(0, Rational::one()));
        Cdga::new(space, product, Some(0), None)
    }

    pub fn space(&self) -> &GradedVectorSpace {
        &self.space
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    pub fn product(&self, i: usize, j: usize) -> LinComb {
        self.product.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn product_lincomb(&self, a: &LinComb, b: &LinComb) -> LinComb {
        let mut out = LinComb::zero();
        for (i, ci) in a.iter() {
            for (j, cj) in b.iter() {
                out.add_scaled(&self.product(i, j), &(ci * cj));
            }
        }
        out
    }

    pub fn d_of(&self, i: usize) -> LinComb {
        self.differential
            .as_ref()
            .and_then(|d| d.get(&i))
            .cloned()
            .unwrap_or_default()
    }

    pub fn d_lincomb(&self, a: &LinComb) -> LinComb {
        let mut out = LinComb::zero();
        for (i, c) in a.iter() {
            out.add_scaled(&self.d_of(i), c);
        }
        out
    }

    pub fn has_differential(&self) -> bool {
        self.differential.is_some()
    }

    fn degree(&self, i: usize) -> i32 {
        self.space.basis()[i].degree
    }

    fn label(&self, i: usize) -> &str {
        &self.space.basis()[i].label
    }

    /// Graded commutativity, associativity, unit law, degree additivity,
    /// Leibniz and d² = 0.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.space.dim();
        for i in 0..n {
            for j in 0..n {
                let p = self.product(i, j);
                if !p
                    .iter()
                    .all(|(k, _)| self.degree(k) == self.degree(i) + self.degree(j))
                {
                    report.violations.push(Violation::DegreeAdditivity {
                        left: self.label(i).into(),
                        right: self.label(j).into(),
                    });
                }
                // a*b - (-1)^{|a||b|} b*a = 0
                let mut comm = p.clone();
                comm.add_scaled(
                    &self.product(j, i),
                    &-sign_pow(self.degree(i) * self.degree(j)),
                );
                if !comm.is_zero() {
                    report.violations.push(Violation::Commutativity {
                        left: self.label(i).into(),
                        right: self.label(j).into(),
                    });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lc = LinComb::term(c, Rational::one());
                    let la = LinComb::term(a, Rational::one());
                    let mut assoc = self.product_lincomb(&self.product(a, b), &lc);
                    assoc.add_scaled(
                        &self.product_lincomb(&la, &self.product(b, c)),
                        &-Rational::one(),
                    );
                    if !assoc.is_zero() {
                        report.violations.push(Violation::Associativity {
                            a: self.label(a).into(),
                            b: self.label(b).into(),
                            c: self.label(c).into(),
                        });
                    }
                }
            }
        }
        if let Some(u) = self.unit {
            for i in 0..n {
                let e = LinComb::term(i, Rational::one());
                if self.product(u, i) != e || self.product(i, u) != e {
                    report.violations.push(Violation::Unit {
                        on: self.label(i).into(),
                    });
                }
            }
        }
        if self.differential.is_some() {
            for i in 0..n {
                let di = self.d_of(i);
                if !di.iter().all(|(k, _)| self.degree(k) == self.degree(i) - 1) {
                    report.violations.push(Violation::DifferentialDegree {
                        on: self.label(i).into(),
                    });
                }
                if !self.d_lincomb(&di).is_zero() {
                    report.violations.push(Violation::DifferentialSquare {
                        on: self.label(i).into(),
                    });
                }
            }
            for i in 0..n {
                for j in 0..n {
                    // d(ab) = da*b + (-1)^{|a|} a*db
                    let mut lhs = self.d_lincomb(&self.product(i, j));
                    let lj = LinComb::term(j, Rational::one());
                    let li = LinComb::term(i, Rational::one());
                    lhs.add_scaled(&self.product_lincomb(&self.d_of(i), &lj), &-Rational::one());
                    lhs.add_scaled(
                        &self.product_lincomb(&li, &self.d_of(j)),
                        &-sign_pow(self.degree(i)),
                    );
                    if !lhs.is_zero() {
                        report.violations.push(Violation::Leibniz {
                            left: self.label(i).into(),
                            right: self.label(j).into(),
                        });
                    }
                }
            }
        }
        report
    }
}

// ---------------------------------------------------------------------------
// Free graded Lie algebras on the super-Lyndon basis
// ---------------------------------------------------------------------------

/// Basis element of a free graded Lie algebra: the standard bracketing of a
/// Lyndon word, or the self-bracket of one of odd degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum LieBasisKey {
    Word(Vec<u16>),
    Square(Vec<u16>),
}

/// All Lyndon words over `0..alphabet` of length 1..=max_len, ordered by
/// (length, lexicographic). Generated with Duval's algorithm.
fn lyndon_words(alphabet: u16, max_len: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    if alphabet == 0 || max_len == 0 {
        return out;
    }
    let mut w = vec![0u16];
    loop {
        if w.len() <= max_len {
            out.push(w.clone());
        }
        // next Lyndon word
        let mut t = Vec::with_capacity(max_len);
        while t.len() < max_len {
            t.push(w[t.len() % w.len()]);
        }
        while let Some(&last) = t.last() {
            if last == alphabet - 1 {
                t.pop();
            } else {
                break;
            }
        }
        if t.is_empty() {
            break;
        }
        *t.last_mut().unwrap() += 1;
        w = t;
    }
    out.sort_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
    out
}

/// Standard factorization of a Lyndon word of length >= 2: the split at the
/// lexicographically smallest proper suffix. Both parts are Lyndon and the
/// suffix is the longest proper Lyndon suffix.
fn standard_factorization(w: &[u16]) -> (Vec<u16>, Vec<u16>) {
    debug_assert!(w.len() >= 2);
    let mut best = 1;
    for i in 2..w.len() {
        if w[i..] < w[best..] {
            best = i;
        }
    }
    (w[..best].to_vec(), w[best..].to_vec())
}

fn bracket_label(w: &[u16], gen_labels: &[String]) -> String {
    if w.len() == 1 {
        gen_labels[w[0] as usize].clone()
    } else {
        let (l, r) = standard_factorization(w);
        format!("[{},{}]", bracket_label(&l, gen_labels), bracket_label(&r, gen_labels))
    }
}

struct FreeLieBuilder {
    max_weight: u32,
    gen_degrees: Vec<i32>,
    ids: HashMap<LieBasisKey, usize>,
    keys: Vec<LieBasisKey>,
    memo: HashMap<(usize, usize), LinComb>,
}

impl FreeLieBuilder {
    fn word_degree(&self, w: &[u16]) -> i32 {
        w.iter().map(|&g| self.gen_degrees[g as usize]).sum()
    }

    fn degree(&self, id: usize) -> i32 {
        match &self.keys[id] {
            LieBasisKey::Word(w) => self.word_degree(w),
            LieBasisKey::Square(w) => 2 * self.word_degree(w),
        }
    }

    fn weight(&self, id: usize) -> u32 {
        match &self.keys[id] {
            LieBasisKey::Word(w) => w.len() as u32,
            LieBasisKey::Square(w) => 2 * w.len() as u32,
        }
    }

    fn id_of(&self, key: &LieBasisKey) -> usize {
        *self
            .ids
            .get(key)
            .unwrap_or_else(|| panic!("basis key {key:?} missing; truncation bug"))
    }

    /// [basis(a), basis(b)] rewritten into the super-Lyndon basis, truncated
    /// at max_weight. Classical Lyndon rewriting, with graded signs from the
    /// single Koszul rule.
    fn reduce(&mut self, a: usize, b: usize) -> LinComb {
        if self.weight(a) as u64 + self.weight(b) as u64 > self.max_weight as u64 {
            return LinComb::zero();
        }
        if let Some(hit) = self.memo.get(&(a, b)) {
            return hit.clone();
        }
        let result = self.reduce_uncached(a, b);
        self.memo.insert((a, b), result.clone());
        result
    }

    fn reduce_lincomb(&mut self, a: usize, terms: &LinComb) -> LinComb {
        let mut out = LinComb::zero();
        for (t, c) in terms.clone().iter() {
            out.add_scaled(&self.reduce(a, t), c);
        }
        out
    }

    fn reduce_uncached(&mut self, a: usize, b: usize) -> LinComb {
        if a == b {
            // [z,z] = 0 for even z; odd z only occurs for word keys and
            // yields the square basis element
            if is_odd(self.degree(a)) {
                if let LieBasisKey::Word(u) = &self.keys[a] {
                    if let Some(&id) = self.ids.get(&LieBasisKey::Square(u.clone())) {
                        return LinComb::term(id, Rational::one());
                    }
                }
                return LinComb::zero(); // beyond truncation
            }
            return LinComb::zero();
        }
        let (ka, kb) = (self.keys[a].clone(), self.keys[b].clone());
        match (ka, kb) {
            (LieBasisKey::Square(u), _) => {
                // [[u,u],u] = 0 in characteristic zero (3[u,[u,u]] = 0)
                if self.keys[b] == LieBasisKey::Word(u.clone()) {
                    return LinComb::zero();
                }
                // [[u,u], z] = 2 [u, [u, z]] for odd u, from graded Jacobi
                let u_id = self.id_of(&LieBasisKey::Word(u));
                let inner = self.reduce(u_id, b);
                let outer = self.reduce_lincomb(u_id, &inner);
                outer.scaled(&rat_int(2))
            }
            // squares have even degree, so [z, [u,u]] = -[[u,u], z]
            (_, LieBasisKey::Square(_)) => self.reduce(b, a).negated(),
            (LieBasisKey::Word(u), LieBasisKey::Word(v)) => {
                if v < u {
                    let sign = sign_pow(self.word_degree(&u) * self.word_degree(&v) + 1);
                    return self.reduce(b, a).scaled(&sign);
                }
                // u < v: [b(u), b(v)] = b(uv) exactly when uv's standard
                // factorization is (u, v)
                let direct = u.len() == 1 || {
                    let (_, u2) = standard_factorization(&u);
                    u2.as_slice() >= v.as_slice()
                };
                if direct {
                    let mut uv = u.clone();
                    uv.extend_from_slice(&v);
                    let id = self.id_of(&LieBasisKey::Word(uv));
                    return LinComb::term(id, Rational::one());
                }
                // [[u1,u2], v] = [u1, [u2, v]] - (-1)^{|u1||u2|} [u2, [u1, v]]
                let (u1, u2) = standard_factorization(&u);
                let (d1, d2) = (self.word_degree(&u1), self.word_degree(&u2));
                let id1 = self.id_of(&LieBasisKey::Word(u1));
                let id2 = self.id_of(&LieBasisKey::Word(u2));
                let t2 = self.reduce(id2, b);
                let mut out = self.reduce_lincomb(id1, &t2);
                let t1 = self.reduce(id1, b);
                let r2 = self.reduce_lincomb(id2, &t1);
                out.add_scaled(&r2, &-sign_pow(d1 * d2));
                out
            }
        }
    }
}

/// Free graded Lie algebra on the given weight-1 generators, truncated at
/// `max_weight`. The basis is the super-Lyndon basis: standard bracketings of
/// Lyndon words plus, for each Lyndon word of odd total degree, its
/// self-bracket.
pub fn free_lie(generators: &GradedVectorSpace, max_weight: u32) -> Result<GradedLieAlgebra, LieError> {
    for b in generators.basis() {
        if b.weight != 1 {
            return Err(LieError::NonUnitWeightGenerator {
                label: b.label.clone(),
                weight: b.weight,
            });
        }
    }
    let gen_labels: Vec<String> = generators.basis().iter().map(|b| b.label.clone()).collect();
    let gen_degrees: Vec<i32> = generators.basis().iter().map(|b| b.degree).collect();

    let words = lyndon_words(generators.dim() as u16, max_weight as usize);
    let mut entries: Vec<(u32, LieBasisKey)> = Vec::new();
    for w in words {
        let len = w.len() as u32;
        let degree: i32 = w.iter().map(|&g| gen_degrees[g as usize]).sum();
        if is_odd(degree) && 2 * len <= max_weight {
            entries.push((2 * len, LieBasisKey::Square(w.clone())));
        }
        entries.push((len, LieBasisKey::Word(w)));
    }
    entries.sort();

    let keys: Vec<LieBasisKey> = entries.into_iter().map(|(_, k)| k).collect();
    let ids: HashMap<LieBasisKey, usize> =
        keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();

    let mut builder = FreeLieBuilder {
        max_weight,
        gen_degrees,
        ids,
        keys,
        memo: HashMap::new(),
    };

    let n = builder.keys.len();
    let mut bracket = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if builder.weight(i) as u64 + builder.weight(j) as u64 > max_weight as u64 {
                continue;
            }
            let lc = builder.reduce(i, j);
            if !lc.is_zero() {
                bracket.insert((i, j), lc);
            }
        }
    }

    let basis: Vec<BasisElement> = builder
        .keys
        .iter()
        .map(|k| {
            let (label, degree, weight) = match k {
                LieBasisKey::Word(w) => (
                    bracket_label(w, &gen_labels),
                    builder.word_degree(w),
                    w.len() as u32,
                ),
                LieBasisKey::Square(w) => {
                    let inner = bracket_label(w, &gen_labels);
                    (
                        format!("[{inner},{inner}]"),
                        2 * builder.word_degree(w),
                        2 * w.len() as u32,
                    )
                }
            };
            BasisElement::new(label, degree, weight)
        })
        .collect();
    let space = GradedVectorSpace::new(basis)?;
    Ok(GradedLieAlgebra::new(space, bracket, None, max_weight))
}

/// The dg Lie algebra `A ⊗ L` for a CDGA `A`: basis `a⊗x`, degree `|a|+|x|`,
/// weight that of `x`, bracket `[a⊗x, b⊗y] = (-1)^{|x||b|} (a·b) ⊗ [x,y]`,
/// differential `d(a⊗x) = dA(a)⊗x + (-1)^{|a|} a⊗dL(x)`. The result is
/// validated before it is returned.
pub fn tensor_cdga_lie(
    a: &Cdga,
    l: &GradedLieAlgebra,
    max_weight: u32,
) -> Result<GradedLieAlgebra, LieError> {
    let a_report = a.validate();
    if !a_report.is_clean() {
        return Err(LieError::Invalid(a_report));
    }
    let l_report = l.validate();
    if !l_report.is_clean() {
        return Err(LieError::Invalid(l_report));
    }

    let na = a.space().dim();
    let nl = l.space().dim();
    let pair_id = |ai: usize, li: usize| ai * nl + li;

    let mut basis = Vec::with_capacity(na * nl);
    for ab in a.space().basis() {
        for lb in l.space().basis() {
            basis.push(BasisElement::new(
                format!("{}⊗{}", ab.label, lb.label),
                ab.degree + lb.degree,
                ab.weight + lb.weight,
            ));
        }
    }
    let space = GradedVectorSpace::new(basis)?;

    let tensor_lincomb = |pa: &LinComb, pl: &LinComb| -> LinComb {
        let mut out = LinComb::zero();
        for (m, cm) in pa.iter() {
            for (z, cz) in pl.iter() {
                out.add(pair_id(m, z), cm * cz);
            }
        }
        out
    };

    let mut bracket = BTreeMap::new();
    for ai in 0..na {
        for li in 0..nl {
            for bj in 0..na {
                for lj in 0..nl {
                    let w = space.basis()[pair_id(ai, li)].weight as u64
                        + space.basis()[pair_id(bj, lj)].weight as u64;
                    if w > max_weight as u64 {
                        continue;
                    }
                    let prod = a.product(ai, bj);
                    let brk = l.bracket(li, lj);
                    if prod.is_zero() || brk.is_zero() {
                        continue;
                    }
                    let sign = sign_pow(
                        l.space().basis()[li].degree * a.space().basis()[bj].degree,
                    );
                    let lc = tensor_lincomb(&prod, &brk).scaled(&sign);
                    if !lc.is_zero() {
                        bracket.insert((pair_id(ai, li), pair_id(bj, lj)), lc);
                    }
                }
            }
        }
    }

    let mut differential = BTreeMap::new();
    if a.has_differential() || l.differential().is_some() {
        for ai in 0..na {
            for li in 0..nl {
                let mut lc = tensor_lincomb(&a.d_of(ai), &LinComb::term(li, Rational::one()));
                let sign = sign_pow(a.space().basis()[ai].degree);
                lc.add_scaled(
                    &tensor_lincomb(&LinComb::term(ai, Rational::one()), &l.d_of(li)),
                    &sign,
                );
                if !lc.is_zero() {
                    differential.insert(pair_id(ai, li), lc);
                }
            }
        }
    }
    let differential = (!differential.is_empty()).then_some(differential);

    let result = GradedLieAlgebra::new(space, bracket, differential, max_weight);
    let report = result.validate();
    if !report.is_clean() {
        return Err(LieError::Invalid(report));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens(list: &[(&str, i32)]) -> GradedVectorSpace {
        GradedVectorSpace::new(
            list.iter()
                .map(|&(l, d)| BasisElement::new(l, d, 1))
                .collect(),
        )
        .unwrap()
    }

    fn dims_by_weight(l: &GradedLieAlgebra) -> BTreeMap<u32, usize> {
        l.space().dims_by_weight()
    }

    #[test]
    fn lyndon_words_binary_up_to_three() {
        let words = lyndon_words(2, 3);
        let expect: Vec<Vec<u16>> = vec![
            vec![0],
            vec![1],
            vec![0, 1],
            vec![0, 0, 1],
            vec![0, 1, 1],
        ];
        assert_eq!(words, expect);
    }

    #[test]
    fn standard_factorization_examples() {
        assert_eq!(
            standard_factorization(&[0, 0, 1]),
            (vec![0], vec![0, 1])
        );
        assert_eq!(
            standard_factorization(&[0, 1, 1]),
            (vec![0, 1], vec![1])
        );
        assert_eq!(
            standard_factorization(&[0, 1, 0, 2]),
            (vec![0, 1], vec![0, 2])
        );
    }

    #[test]
    fn free_lie_one_even_generator() {
        let l = free_lie(&gens(&[("x", 0)]), 3).unwrap();
        let dims = dims_by_weight(&l);
        assert_eq!(dims.get(&1), Some(&1));
        assert_eq!(dims.get(&2), None);
        assert_eq!(dims.get(&3), None);
    }

    #[test]
    fn free_lie_one_odd_generator() {
        let l = free_lie(&gens(&[("x", 1)]), 3).unwrap();
        let dims = dims_by_weight(&l);
        assert_eq!(dims.get(&1), Some(&1));
        assert_eq!(dims.get(&2), Some(&1));
        assert_eq!(dims.get(&3), None);
        let sq = l.space().index_of("[x,x]").unwrap();
        assert_eq!(l.space().basis()[sq].degree, 2);
        // [x,x] rewrites to the square basis element
        assert_eq!(l.bracket(0, 0), LinComb::term(sq, Rational::one()));
    }

    #[test]
    fn free_lie_two_even_generators_witt_dims() {
        let l = free_lie(&gens(&[("x", 0), ("y", 0)]), 3).unwrap();
        let dims = dims_by_weight(&l);
        assert_eq!(dims.get(&1), Some(&2));
        assert_eq!(dims.get(&2), Some(&1));
        assert_eq!(dims.get(&3), Some(&2));
    }

    #[test]
    fn free_lie_rejects_bad_weights() {
        let v = GradedVectorSpace::single("x", 0, 2);
        assert!(matches!(
            free_lie(&v, 3),
            Err(LieError::NonUnitWeightGenerator { .. })
        ));
    }

    #[test]
    fn free_lie_outputs_validate_clean() {
        for gens_list in [vec![("x", 0)], vec![("x", 1)], vec![("x", 0), ("y", 1)], vec![("x", 2), ("y", 3)]] {
            for k in 1..=4 {
                let l = free_lie(&gens(&gens_list), k).unwrap();
                let report = l.validate();
                assert!(report.is_clean(), "K={k} {gens_list:?}: {report}");
            }
        }
    }

    #[test]
    fn abelian_validates_clean() {
        let l = GradedLieAlgebra::abelian(gens(&[("a", 0), ("b", 3)]));
        assert!(l.validate().is_clean());
    }

    #[test]
    fn sl2_validates_clean() {
        assert!(GradedLieAlgebra::sl2().validate().is_clean());
        assert!(!GradedLieAlgebra::sl2().is_weight_additive());
    }

    #[test]
    fn corrupted_bracket_table_reports_antisymmetry() {
        // [x,y] set without its antisymmetric partner
        let space = gens(&[("x", 0), ("y", 0), ("z", 0)]);
        let mut bracket = BTreeMap::new();
        bracket.insert((0, 1), LinComb::term(2, Rational::one()));
        let l = GradedLieAlgebra::new(space, bracket, None, UNTRUNCATED);
        let report = l.validate();
        let anti = report
            .violations
            .iter()
            .filter(|v| matches!(v, Violation::Antisymmetry { .. }))
            .count();
        assert_eq!(anti, 2); // (x,y) and (y,x) both fail pair consistency
    }

    #[test]
    fn tensor_with_ground_field_is_identity() {
        let l = free_lie(&gens(&[("x", 0), ("y", 1)]), 3).unwrap();
        let t = tensor_cdga_lie(&Cdga::ground_field(), &l, 3).unwrap();
        assert_eq!(t.space().dims(), l.space().dims());
        // structure constants agree under the relabeling 1⊗x -> x
        for (&(i, j), lc) in l.bracket_table() {
            assert_eq!(&t.bracket(i, j), lc);
        }
    }

    /// One class e in degree -n with e·e = 0: reduced compactly supported
    /// cochains of R^n.
    fn point_class(n: i32) -> Cdga {
        Cdga::new(
            GradedVectorSpace::single("e", -n, 0),
            BTreeMap::new(),
            None,
            None,
        )
    }

    #[test]
    fn tensor_r2_configuration_lie_algebra() {
        let l = free_lie(&gens(&[("x", 1)]), 2).unwrap();
        let t = tensor_cdga_lie(&point_class(2), &l, 2).unwrap();
        let basis = t.space().basis();
        assert_eq!(basis.len(), 2);
        assert_eq!((basis[0].label.as_str(), basis[0].degree, basis[0].weight), ("e⊗x", -1, 1));
        assert_eq!(
            (basis[1].label.as_str(), basis[1].degree, basis[1].weight),
            ("e⊗[x,x]", 0, 2)
        );
        assert!(t.bracket_table().is_empty(), "e² = 0 kills all brackets");
    }

    #[test]
    fn tensor_with_two_class_algebra_has_nonzero_bracket() {
        // A: unit u (deg 0) and t (deg -2, t² = 0); L free on x in degree 1.
        let space = GradedVectorSpace::new(vec![
            BasisElement::new("u", 0, 0),
            BasisElement::new("t", -2, 0),
        ])
        .unwrap();
        let mut product = BTreeMap::new();
        product.insert((0, 0), LinComb::term(0, Rational::one()));
        product.insert((0, 1), LinComb::term(1, Rational::one()));
        product.insert((1, 0), LinComb::term(1, Rational::one()));
        let a = Cdga::new(space, product, Some(0), None);
        assert!(a.validate().is_clean());

        let l = free_lie(&gens(&[("x", 1)]), 2).unwrap();
        let t = tensor_cdga_lie(&a, &l, 2).unwrap();
        let tx = t.space().index_of("t⊗x").unwrap();
        let ux = t.space().index_of("u⊗x").unwrap();
        let txx = t.space().index_of("t⊗[x,x]").unwrap();
        let b = t.bracket(tx, ux);
        assert!(!b.is_zero());
        assert_eq!(b, LinComb::term(txx, sign_pow(1 * 0)));
    }

    #[test]
    fn text_round_trip() {
        let l = free_lie(&gens(&[("x", 0), ("y", 1)]), 3).unwrap();
        let text = l.to_text();
        let back = GradedLieAlgebra::from_text(&text).unwrap();
        assert_eq!(back.space().dims(), l.space().dims());
        for i in 0..l.space().dim() {
            for j in 0..l.space().dim() {
                assert_eq!(back.bracket(i, j), l.bracket(i, j), "bracket ({i},{j})");
            }
        }
        assert!(back.validate().is_clean());
    }

    #[test]
    fn text_parse_errors() {
        assert!(matches!(
            GradedLieAlgebra::from_text("basis x zero 1"),
            Err(LieError::Parse { .. })
        ));
        assert!(matches!(
            GradedLieAlgebra::from_text("basis x 0 1\nbracket x q = 1 x"),
            Err(LieError::Parse { .. })
        ));
        assert!(matches!(
            GradedLieAlgebra::from_text("bogus"),
            Err(LieError::Parse { .. })
        ));
    }

    /// PBW dimension oracle: Sym of the claimed super-Lyndon basis must equal
    /// the tensor-algebra series on the generators, weight by weight.
    fn tensor_algebra_series(
        v: &GradedVectorSpace,
        max_weight: u32,
    ) -> crate::graded::PoincareSeries {
        use crate::graded::PoincareSeries;
        let mut per_degree: BTreeMap<i32, i64> = BTreeMap::new();
        for b in v.basis() {
            *per_degree.entry(b.degree).or_insert(0) += 1;
        }
        let mut out = PoincareSeries::one(max_weight);
        let mut current: BTreeMap<i32, i64> = BTreeMap::new();
        current.insert(0, 1);
        for w in 1..=max_weight {
            let mut next: BTreeMap<i32, i64> = BTreeMap::new();
            for (&d1, &c1) in &current {
                for (&d2, &c2) in &per_degree {
                    *next.entry(d1 + d2).or_insert(0) += c1 * c2;
                }
            }
            for (&d, &c) in &next {
                if c != 0 {
                    out.coefficients.insert((d, w), c);
                }
            }
            current = next;
        }
        out
    }

    #[test]
    fn pbw_series_identity_for_free_lie() {
        use crate::graded::sym_series;
        for gens_list in [
            vec![("x", 0)],
            vec![("x", 1)],
            vec![("x", 2)],
            vec![("x", 0), ("y", 0)],
            vec![("x", 0), ("y", 1)],
            vec![("x", 1), ("y", 1)],
            vec![("x", 1), ("y", 2), ("z", 0)],
        ] {
            let v = gens(&gens_list);
            for k in 1..=4 {
                let l = free_lie(&v, k).unwrap();
                let sym = sym_series(l.space(), k).unwrap();
                let tensor = tensor_algebra_series(&v, k);
                assert_eq!(sym, tensor, "gens {gens_list:?} K={k}");
            }
        }
    }
}
