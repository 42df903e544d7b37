//! Generalized single and double excitation pools.

use crate::fermisim::{jw_encode, ExcitationKind, ExcitationOp};

fn sort_key(op: &ExcitationOp) -> (u8, Vec<usize>) {
    let kind = match op.kind {
        ExcitationKind::Single => 0,
        ExcitationKind::Double => 1,
    };
    (kind, op.indices())
}

/// Every spin-preserving single and `S_z`-preserving double over `2k` spin
/// orbitals, each generator once, singles first then lexicographic.
pub fn build_pool(k: usize) -> Vec<ExcitationOp> {
    pool_touching(k, 0)
}

/// Elements of `build_pool(k)` that touch spatial orbital `k − 1`.
pub fn incremental_pool(k: usize) -> Vec<ExcitationOp> {
    pool_touching(k, k.saturating_sub(1))
}

/// Elements of `build_pool(k)` touching at least one orbital `≥ k_prev`.
pub fn incremental_pool_between(k_prev: usize, k: usize) -> Vec<ExcitationOp> {
    pool_touching(k, k_prev)
}

/// Number of elements of `build_pool(k)`, by counting rather than building.
pub fn pool_size(k: usize) -> usize {
    let same_spin_pairs = k * k.saturating_sub(1) / 2;
    let singles = 2 * same_spin_pairs;
    // Pairs of disjoint spin-orbital pairs with matching β count, unordered.
    let mut doubles = 0usize;
    let n = 2 * k;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
        .collect();
    for (i, &(p, q)) in pairs.iter().enumerate() {
        for &(r, s) in &pairs[..i] {
            if p != r && p != s && q != r && q != s && p % 2 + q % 2 == r % 2 + s % 2 {
                doubles += 1;
            }
        }
    }
    singles + doubles
}

fn pool_touching(k: usize, min_orb: usize) -> Vec<ExcitationOp> {
    let n = 2 * k;
    let touches = |idx: &[usize]| idx.iter().any(|&i| i / 2 >= min_orb);
    let mut out = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            if p % 2 == q % 2 && touches(&[p, q]) {
                out.push(jw_encode(&[p, q], n).expect("valid single"));
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
        .collect();
    for (i, &(p, q)) in pairs.iter().enumerate() {
        for &(r, s) in &pairs[..i] {
            let disjoint = p != r && p != s && q != r && q != s;
            if disjoint && p % 2 + q % 2 == r % 2 + s % 2 && touches(&[p, q, r, s]) {
                out.push(jw_encode(&[p, q, r, s], n).expect("valid double"));
            }
        }
    }
    out.sort_by_key(sort_key);
    out
}
