//! Rational homology of unordered configuration spaces through the
//! enveloping-algebra pipeline, and the Arnold-presentation oracle for
//! ordered configuration spaces of Euclidean space.
//!
//! A manifold enters as a formal model of its compactly supported cohomology
//! ring. Degrees are stored negated (`H_c^{-*}`), the coefficient Lie algebra
//! is `H_c^{-*}(M) ⊗ FreeLie(x)` with `x` in degree `n-1` and weight 1, and
//! the weight-`k` Chevalley-Eilenberg homology of that algebra is
//! `H_*(B_k(M); Q)`. No degree shift is applied on output: the `H_c^{-*}`
//! negation and the CE suspension cancel exactly, which is pinned by the
//! braid-group and `RP^{n-1}` oracles in the tests.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::One;
use thiserror::Error;

use crate::ce::{ce_chain_complex, CeError};
use crate::exactla::{parse_rational, LinComb, Rational, SparseMatrix};
use crate::graded::{BasisElement, GradedError, GradedVectorSpace, PoincareSeries};
use crate::lie::{
    free_lie, tensor_cdga_lie, Cdga, GradedLieAlgebra, LieError, ValidationReport,
};

#[derive(Debug, Error)]
pub enum ConfspaceError {
    #[error("manifold {0:?} is not orientable; only orientable manifolds are supported")]
    NonOrientable(String),
    #[error("manifold {0:?} has a nonzero differential; only formal models are supported")]
    NonFormalModel(String),
    #[error("manifold dimension must be >= 1, got {0}")]
    BadDimension(u32),
    #[error("class {label:?} has cohomological degree {degree}, outside 0..={n}")]
    DegreeOutOfRange { label: String, degree: u32, n: u32 },
    #[error("cup product table fails validation:\n{0}")]
    InvalidCup(ValidationReport),
    #[error("arnold_dims requires k >= 1 and n >= 2, got k={k}, n={n}")]
    BadArnoldInput { k: u32, n: u32 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Ce(#[from] CeError),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

/// A manifold described by its dimension, orientability, and a formal model
/// of its compactly supported cohomology ring: basis classes with
/// cohomological degrees and a cup-product table.
#[derive(Debug, Clone)]
pub struct ManifoldDescriptor {
    pub name: String,
    pub n: u32,
    pub orientable: bool,
    /// (label, cohomological degree)
    pub hc_basis: Vec<(String, u32)>,
    /// cup products over hc_basis indices; missing pairs are zero
    pub cup: BTreeMap<(usize, usize), LinComb>,
    pub unit: Option<usize>,
    /// labels with declared nonzero differential (rejects the model)
    pub differential_support: Vec<String>,
}

impl ManifoldDescriptor {
    /// Structured key-value text format:
    ///
    /// ```text
    /// name S2
    /// dim 2
    /// orientable true
    /// hc u 0
    /// hc v 2
    /// unit u
    /// cup u v = 1 v
    /// cup v v =
    /// ```
    ///
    /// Rationals are written `p/q`. Cup lines given in one order are
    /// completed graded-commutatively.
    pub fn parse(text: &str) -> Result<Self, ConfspaceError> {
        let mut name = None;
        let mut n = None;
        let mut orientable = None;
        let mut hc_basis: Vec<(String, u32)> = Vec::new();
        let mut cup_lines: Vec<(usize, String, String, String)> = Vec::new();
        let mut unit_label: Option<(usize, String)> = None;
        let mut differential_support = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| ConfspaceError::Parse {
                line: lineno + 1,
                msg: msg.to_string(),
            };
            let mut tok = line.split_whitespace();
            match tok.next() {
                Some("name") => name = Some(tok.next().ok_or_else(|| err("missing name"))?.to_string()),
                Some("dim") => {
                    n = Some(
                        tok.next()
                            .and_then(|t| t.parse::<u32>().ok())
                            .ok_or_else(|| err("missing or bad dimension"))?,
                    )
                }
                Some("orientable") => {
                    orientable = Some(match tok.next() {
                        Some("true") => true,
                        Some("false") => false,
                        _ => return Err(err("orientable must be true or false")),
                    })
                }
                Some("hc") => {
                    let label = tok.next().ok_or_else(|| err("missing label"))?.to_string();
                    let degree = tok
                        .next()
                        .and_then(|t| t.parse::<u32>().ok())
                        .ok_or_else(|| err("missing or bad degree"))?;
                    hc_basis.push((label, degree));
                }
                Some("unit") => {
                    let label = tok.next().ok_or_else(|| err("missing label"))?.to_string();
                    unit_label = Some((lineno + 1, label));
                }
                Some("cup") => {
                    let a = tok.next().ok_or_else(|| err("missing label"))?.to_string();
                    let b = tok.next().ok_or_else(|| err("missing label"))?.to_string();
                    let rest: Vec<&str> = tok.collect();
                    if rest.first() != Some(&"=") {
                        return Err(err("expected '='"));
                    }
                    cup_lines.push((lineno + 1, a, b, rest[1..].join(" ")));
                }
                Some("d") => {
                    let label = tok.next().ok_or_else(|| err("missing label"))?.to_string();
                    let rest: Vec<&str> = tok.collect();
                    if rest.first() != Some(&"=") {
                        return Err(err("expected '='"));
                    }
                    if !rest[1..].is_empty() {
                        differential_support.push(label);
                    }
                }
                Some(other) => return Err(err(&format!("unknown directive {other:?}"))),
                None => unreachable!(),
            }
        }

        let name = name.ok_or(ConfspaceError::Parse {
            line: 0,
            msg: "missing `name` line".into(),
        })?;
        let n = n.ok_or(ConfspaceError::Parse {
            line: 0,
            msg: "missing `dim` line".into(),
        })?;
        let orientable = orientable.ok_or(ConfspaceError::Parse {
            line: 0,
            msg: "missing `orientable` line".into(),
        })?;

        let index = |label: &str, line: usize| -> Result<usize, ConfspaceError> {
            hc_basis
                .iter()
                .position(|(l, _)| l == label)
                .ok_or(ConfspaceError::Parse {
                    line,
                    msg: format!("unknown class {label:?}"),
                })
        };
        let mut cup: BTreeMap<(usize, usize), LinComb> = BTreeMap::new();
        let mut explicit = Vec::new();
        for (line, a, b, rhs) in cup_lines {
            let (i, j) = (index(&a, line)?, index(&b, line)?);
            let mut lc = LinComb::zero();
            for part in rhs.split('+') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let mut it = part.split_whitespace();
                let coeff = it
                    .next()
                    .map(parse_rational)
                    .transpose()
                    .map_err(|e| ConfspaceError::Parse {
                        line,
                        msg: e.to_string(),
                    })?
                    .ok_or(ConfspaceError::Parse {
                        line,
                        msg: "empty term".into(),
                    })?;
                let label = it.next().ok_or(ConfspaceError::Parse {
                    line,
                    msg: "term missing label".into(),
                })?;
                lc.add(index(label, line)?, coeff);
            }
            cup.insert((i, j), lc);
            explicit.push((i, j));
        }
        // graded-commutative completion on cohomological degrees
        for (i, j) in explicit {
            if !cup.contains_key(&(j, i)) {
                let sign = if hc_basis[i].1 % 2 == 1 && hc_basis[j].1 % 2 == 1 {
                    -Rational::one()
                } else {
                    Rational::one()
                };
                let mirror = cup[&(i, j)].scaled(&sign);
                cup.insert((j, i), mirror);
            }
        }
        let unit = match unit_label {
            None => None,
            Some((line, label)) => Some(index(&label, line)?),
        };
        Ok(ManifoldDescriptor {
            name,
            n,
            orientable,
            hc_basis,
            cup,
            unit,
            differential_support,
        })
    }

    /// Validity checks shared by every consumer: dimension, orientability,
    /// formality, degree range, and the ring axioms (after degree negation).
    pub fn validate(&self) -> Result<(), ConfspaceError> {
        if self.n == 0 {
            return Err(ConfspaceError::BadDimension(self.n));
        }
        if !self.orientable {
            return Err(ConfspaceError::NonOrientable(self.name.clone()));
        }
        if !self.differential_support.is_empty() {
            return Err(ConfspaceError::NonFormalModel(self.name.clone()));
        }
        for (label, degree) in &self.hc_basis {
            if *degree > self.n {
                return Err(ConfspaceError::DegreeOutOfRange {
                    label: label.clone(),
                    degree: *degree,
                    n: self.n,
                });
            }
        }
        let report = self.to_cdga()?.validate();
        if !report.is_clean() {
            return Err(ConfspaceError::InvalidCup(report));
        }
        Ok(())
    }

    /// The model as a CDGA with negated degrees: `H_c^{-*}(M)`.
    pub fn to_cdga(&self) -> Result<Cdga, ConfspaceError> {
        let basis: Vec<BasisElement> = self
            .hc_basis
            .iter()
            .map(|(label, degree)| BasisElement::new(label.clone(), -(*degree as i32), 0))
            .collect();
        let space = GradedVectorSpace::new(basis)?;
        Ok(Cdga::new(space, self.cup.clone(), self.unit, None))
    }
}

/// The coefficient Lie algebra of Theorem C's rational shadow:
/// `H_c^{-*}(M) ⊗ FreeLie(x)` with `x` in degree `n-1`, weight 1.
pub fn conf_lie(m: &ManifoldDescriptor, max_k: u32) -> Result<GradedLieAlgebra, ConfspaceError> {
    m.validate()?;
    let a = m.to_cdga()?;
    let l = free_lie(
        &GradedVectorSpace::single("x", m.n as i32 - 1, 1),
        max_k,
    )?;
    Ok(tensor_cdga_lie(&a, &l, max_k)?)
}

/// Betti numbers of unordered configuration spaces, keyed by
/// (number of points k, homological degree). Zero entries are omitted and
/// the weight-0 row (the unit) is dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiTable {
    pub entries: BTreeMap<(u32, i32), usize>,
}

impl BettiTable {
    /// CSV with header `k,degree,betti`, rows sorted by (k, degree).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,degree,betti\n");
        for (&(k, d), &b) in &self.entries {
            writeln!(out, "{k},{d},{b}").unwrap();
        }
        out
    }

    /// One Poincaré polynomial in t per k, e.g. `k=3: 1 + t^1`.
    pub fn to_polynomials(&self, max_k: u32) -> String {
        let mut out = String::new();
        for k in 1..=max_k {
            let slice: Vec<(i32, usize)> = self
                .entries
                .iter()
                .filter(|((kk, _), _)| *kk == k)
                .map(|(&(_, d), &b)| (d, b))
                .collect();
            let poly = if slice.is_empty() {
                "0".to_string()
            } else {
                slice
                    .iter()
                    .map(|&(d, b)| match (d, b) {
                        (0, b) => b.to_string(),
                        (d, 1) => format!("t^{d}"),
                        (d, b) => format!("{b}*t^{d}"),
                    })
                    .collect::<Vec<_>>()
                    .join(" + ")
            };
            writeln!(out, "k={k}: {poly}").unwrap();
        }
        out
    }

    /// The table as a bigraded series (weight = k).
    pub fn to_series(&self, max_k: u32) -> PoincareSeries {
        PoincareSeries::from_coeffs(
            max_k,
            self.entries.iter().map(|(&(k, d), &b)| ((d, k), b as i64)),
        )
    }
}

/// `H_*(B_k(M); Q)` for 1 <= k <= max_k, through the Chevalley-Eilenberg
/// complex of `conf_lie(M, max_k)`.
pub fn betti_unordered(m: &ManifoldDescriptor, max_k: u32) -> Result<BettiTable, ConfspaceError> {
    let l = conf_lie(m, max_k)?;
    let complex = ce_chain_complex(&l, max_k)?;
    let entries = complex
        .homology()
        .into_iter()
        .filter(|&((k, _), _)| k >= 1)
        .collect();
    Ok(BettiTable { entries })
}

// ---------------------------------------------------------------------------
// Arnold presentation of H^*(Conf_k(R^n)), by brute force
// ---------------------------------------------------------------------------

/// Dimensions of `H^*(Conf_k(R^n))` computed from the Arnold presentation:
/// generators `w_ij` of degree `n-1` for i != j, relations
/// `w_ij = (-1)^{n-1} w_ji`, `w_ij² = 0`, and the three-term Arnold relation,
/// with ranks over the rationals taken degreewise. Returns the nonzero
/// dimensions for degrees `0..=max_degree`.
pub fn arnold_dims(k: u32, n: u32, max_degree: u32) -> Result<BTreeMap<u32, usize>, ConfspaceError> {
    if k < 1 || n < 2 {
        return Err(ConfspaceError::BadArnoldInput { k, n });
    }
    let gen_deg = n - 1;
    // canonical generators w_ij with i < j
    let mut gens: Vec<(u32, u32)> = Vec::new();
    for i in 1..=k {
        for j in (i + 1)..=k {
            gens.push((i, j));
        }
    }
    let gen_index: BTreeMap<(u32, u32), usize> = gens
        .iter()
        .enumerate()
        .map(|(g, &p)| (p, g))
        .collect();
    // w_ij for arbitrary order. Swapping the points composes the Gauss map
    // with the antipodal map of S^{n-1}, of degree (-1)^n; this sign is the
    // one under which the three-term relation presents the classical ring
    // (the k <= 6 oracle pins it).
    let omega = |i: u32, j: u32| -> (usize, Rational) {
        if i < j {
            (gen_index[&(i, j)], Rational::one())
        } else {
            let sign = if n % 2 == 0 {
                Rational::one()
            } else {
                -Rational::one()
            };
            (gen_index[&(j, i)], sign)
        }
    };
    // product of two distinct generators as a signed sorted pair
    let swap_sign = if gen_deg % 2 == 1 {
        -Rational::one()
    } else {
        Rational::one()
    };
    let mul2 = |g1: usize, g2: usize| -> Option<(Vec<usize>, Rational)> {
        match g1.cmp(&g2) {
            std::cmp::Ordering::Equal => None, // square is zero
            std::cmp::Ordering::Less => Some((vec![g1, g2], Rational::one())),
            std::cmp::Ordering::Greater => Some((vec![g2, g1], swap_sign.clone())),
        }
    };

    // the three-term relation for each unordered triple, in the canonical
    // squarefree monomial basis of degree 2(n-1)
    let mut relations: Vec<BTreeMap<Vec<usize>, Rational>> = Vec::new();
    for a in 1..=k {
        for b in (a + 1)..=k {
            for c in (b + 1)..=k {
                let mut rel: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
                let mut add = |p: (usize, Rational), q: (usize, Rational)| {
                    if let Some((mono, s)) = mul2(p.0, q.0) {
                        let coeff = p.1 * q.1 * s;
                        let slot = rel.entry(mono).or_insert_with(num_traits::Zero::zero);
                        *slot += coeff;
                    }
                };
                // w_ab w_bc + w_ca w_ab + w_bc w_ca
                add(omega(a, b), omega(b, c));
                add(omega(c, a), omega(a, b));
                add(omega(b, c), omega(c, a));
                rel.retain(|_, v| !num_traits::Zero::is_zero(v));
                if !rel.is_empty() {
                    relations.push(rel);
                }
            }
        }
    }

    // multiply a relation by a squarefree monomial, dropping overlaps
    let merge = |rel_mono: &[usize], mono: &[usize]| -> Option<(Vec<usize>, Rational)> {
        let mut crossings = 0usize;
        for &g in rel_mono {
            if mono.contains(&g) {
                return None;
            }
            crossings += mono.iter().filter(|&&h| h < g).count();
        }
        let mut merged: Vec<usize> = rel_mono.iter().chain(mono.iter()).copied().collect();
        merged.sort_unstable();
        let sign = if gen_deg % 2 == 1 && crossings % 2 == 1 {
            -Rational::one()
        } else {
            Rational::one()
        };
        Some((merged, sign))
    };

    let mut dims = BTreeMap::new();
    dims.insert(0u32, 1usize);
    if gens.is_empty() {
        return Ok(dims);
    }
    let mut degree = gen_deg;
    let mut m = 1usize; // monomial length
    while degree <= max_degree {
        let monos: Vec<Vec<usize>> = combinations(gens.len(), m);
        if monos.is_empty() {
            break;
        }
        let mono_index: BTreeMap<&Vec<usize>, usize> =
            monos.iter().enumerate().map(|(c, mn)| (mn, c)).collect();
        let mut triplets = Vec::new();
        let mut row = 0usize;
        if m >= 2 {
            let factors: Vec<Vec<usize>> = combinations(gens.len(), m - 2);
            for rel in &relations {
                for f in &factors {
                    let mut any = false;
                    for (rel_mono, coeff) in rel {
                        if let Some((merged, sign)) = merge(rel_mono, f) {
                            triplets.push((row, mono_index[&merged], coeff * sign));
                            any = true;
                        }
                    }
                    if any {
                        row += 1;
                    }
                }
            }
        }
        let matrix = SparseMatrix::from_triplets(row, monos.len(), triplets)
            .expect("indices in range");
        let rank = matrix.rank();
        let dim = monos.len() - rank;
        if dim > 0 {
            dims.insert(degree, dim);
        }
        degree += gen_deg;
        m += 1;
    }
    Ok(dims)
}

/// All sorted `m`-subsets of `0..count`.
fn combinations(count: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if m > count {
        return out;
    }
    let mut current: Vec<usize> = (0..m).collect();
    loop {
        out.push(current.clone());
        // next combination in lexicographic order
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] != i + count - m {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        current[i] += 1;
        for j in (i + 1)..m {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// Closed-form oracle for ordered configuration spaces of Euclidean space:
/// the coefficients of `prod_{i=1}^{k-1} (1 + i t^{n-1})`, stored at weight 0.
pub fn ordered_series_oracle(k: u32, n: u32) -> PoincareSeries {
    let gen_deg = (n - 1) as i32;
    let mut coeffs: BTreeMap<i32, i64> = BTreeMap::new();
    coeffs.insert(0, 1);
    for i in 1..k {
        let mut next: BTreeMap<i32, i64> = BTreeMap::new();
        for (&d, &c) in &coeffs {
            *next.entry(d).or_insert(0) += c;
            *next.entry(d + gen_deg).or_insert(0) += c * i as i64;
        }
        coeffs = next;
    }
    PoincareSeries::from_coeffs(0, coeffs.into_iter().map(|(d, c)| ((d, 0), c)))
}

/// Builtin descriptor sources, installed as data files under `descriptors/`
/// and compiled in for `builtin:NAME` lookups.
pub fn builtin_descriptor(name: &str) -> Option<&'static str> {
    match name {
        "R1" => Some(include_str!("../../../descriptors/R1.desc")),
        "R2" => Some(include_str!("../../../descriptors/R2.desc")),
        "R3" => Some(include_str!("../../../descriptors/R3.desc")),
        "R4" => Some(include_str!("../../../descriptors/R4.desc")),
        "S1" => Some(include_str!("../../../descriptors/S1.desc")),
        "S2" => Some(include_str!("../../../descriptors/S2.desc")),
        "T2" => Some(include_str!("../../../descriptors/T2.desc")),
        "Sigma2" => Some(include_str!("../../../descriptors/Sigma2.desc")),
        "Sigma1P" => Some(include_str!("../../../descriptors/Sigma1P.desc")),
        "Sigma2P" => Some(include_str!("../../../descriptors/Sigma2P.desc")),
        _ => None,
    }
}

/// Descriptor for R^n: one compactly supported class in top degree.
pub fn euclidean_descriptor(n: u32) -> ManifoldDescriptor {
    let mut cup = BTreeMap::new();
    cup.insert((0, 0), LinComb::zero());
    ManifoldDescriptor {
        name: format!("R{n}"),
        n,
        orientable: true,
        hc_basis: vec![("e".to_string(), n)],
        cup,
        unit: None,
        differential_support: Vec::new(),
    }
}
