//! Cross-module integration: configuration-space tables against classical
//! fixtures and the Euler-characteristic generating function.

use std::collections::BTreeMap;

use envalg::confspace::{betti_unordered, builtin_descriptor, ManifoldDescriptor};
use envalg::exactla::is_odd;

fn builtin(name: &str) -> ManifoldDescriptor {
    let m = ManifoldDescriptor::parse(builtin_descriptor(name).expect("builtin")).unwrap();
    m.validate().unwrap();
    m
}

fn polynomial(table: &BTreeMap<(u32, i32), usize>, k: u32) -> Vec<(i32, usize)> {
    table
        .iter()
        .filter(|((kk, _), _)| *kk == k)
        .map(|(&(_, d), &b)| (d, b))
        .collect()
}

#[test]
fn circle_configurations_are_circles() {
    // B_k(S^1) is homotopy equivalent to S^1 for every k >= 1
    let table = betti_unordered(&builtin("S1"), 6).unwrap();
    let mut expected = BTreeMap::new();
    for k in 1..=6u32 {
        expected.insert((k, 0), 1);
        expected.insert((k, 1), 1);
    }
    assert_eq!(table.entries, expected);
}

#[test]
fn sphere_configurations_regression() {
    // B_1 = S^2, B_2 rationally trivial (RP^2), B_k for k >= 3 rationally S^3
    let table = betti_unordered(&builtin("S2"), 6).unwrap();
    assert_eq!(polynomial(&table.entries, 1), vec![(0, 1), (2, 1)]);
    assert_eq!(polynomial(&table.entries, 2), vec![(0, 1)]);
    for k in 3..=6 {
        assert_eq!(polynomial(&table.entries, k), vec![(0, 1), (3, 1)], "k={k}");
    }
}

#[test]
fn torus_configurations_regression() {
    let table = betti_unordered(&builtin("T2"), 4).unwrap();
    let rows: Vec<Vec<usize>> = (1..=4)
        .map(|k| {
            let poly = polynomial(&table.entries, k);
            let top = poly.iter().map(|&(d, _)| d).max().unwrap();
            (0..=top)
                .map(|d| {
                    poly.iter()
                        .find(|&&(dd, _)| dd == d)
                        .map_or(0, |&(_, b)| b)
                })
                .collect()
        })
        .collect();
    assert_eq!(rows[0], vec![1, 2, 1]);
    assert_eq!(rows[1], vec![1, 2, 1]);
    assert_eq!(rows[2], vec![1, 2, 3, 4, 2]);
    assert_eq!(rows[3], vec![1, 2, 3, 5, 4, 1]);
}

/// The compactly supported Euler characteristic of the descriptor.
fn chi_c(m: &ManifoldDescriptor) -> i64 {
    m.hc_basis
        .iter()
        .map(|&(_, d)| if d % 2 == 0 { 1 } else { -1 })
        .sum()
}

/// Binomial series (1 + u)^chi up to u^max_k, for integer chi of either sign.
fn binomial_series(chi: i64, max_k: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(max_k + 1);
    let mut coeff: i64 = 1;
    for k in 0..=max_k as i64 {
        if k > 0 {
            coeff = coeff * (chi - k + 1) / k;
        }
        out.push(coeff);
    }
    out
}

#[test]
fn euler_characteristics_follow_the_binomial_series() {
    // For a surface M, sum_k chi(B_k(M)) u^k = (1 + u)^{chi(M)}; for even-
    // dimensional manifolds chi_c = chi, so the descriptor data suffices.
    for name in ["R2", "S2", "T2", "Sigma2", "Sigma1P", "Sigma2P"] {
        let m = builtin(name);
        let max_k = 5u32;
        let table = betti_unordered(&m, max_k).unwrap();
        let expected = binomial_series(chi_c(&m), max_k as usize);
        for k in 1..=max_k {
            let chi: i64 = table
                .entries
                .iter()
                .filter(|((kk, _), _)| *kk == k)
                .map(|(&(_, d), &b)| if is_odd(d) { -(b as i64) } else { b as i64 })
                .sum();
            assert_eq!(chi, expected[k as usize], "{name}, k={k}");
        }
    }
}

#[test]
fn lie_text_round_trip_through_ce() {
    // serializing a conf Lie algebra and reading it back gives the same
    // homology table
    let l = envalg::confspace::conf_lie(&builtin("T2"), 3).unwrap();
    let text = l.to_text();
    let back = envalg::lie::GradedLieAlgebra::from_text(&text).unwrap();
    assert!(back.validate().is_clean());
    let h1 = envalg::ce::ce_complex(&l, 3).unwrap().homology();
    let h2 = envalg::ce::ce_complex(&back, 3).unwrap().homology();
    assert_eq!(h1, h2);
}
