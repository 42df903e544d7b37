#![allow(dead_code)]

use std::path::PathBuf;

use oevqe::integrals::{read_fcidump, IntegralSet};
use serde_json::Value;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture_path(name: &str) -> PathBuf {
    fixture_dir().join(format!("{name}.fcidump"))
}

pub fn load(name: &str) -> IntegralSet {
    read_fcidump(fixture_path(name)).expect("fixture parses")
}

pub struct Reference {
    pub name: String,
    pub e_hf: f64,
    pub e_mp2: f64,
    pub e_fci: f64,
    pub e_nuc: f64,
    pub n_orb: usize,
}

pub fn references() -> Vec<Reference> {
    let text = std::fs::read_to_string(fixture_dir().join("reference.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| Reference {
            name: e["name"].as_str().unwrap().to_string(),
            e_hf: e["e_hf"].as_f64().unwrap(),
            e_mp2: e["e_mp2"].as_f64().unwrap(),
            e_fci: e["e_fci"].as_f64().unwrap(),
            e_nuc: e["e_nuc"].as_f64().unwrap(),
            n_orb: e["n_orb"].as_u64().unwrap() as usize,
        })
        .collect()
}

pub fn reference(name: &str) -> Reference {
    references().into_iter().find(|r| r.name == name).expect("known fixture")
}

/// Hydrogen fixtures used by the fast suites.
pub const HYDROGEN: [&str; 7] = [
    "h2_0.74", "h4_1.00", "h4_1.50", "h6_1.00", "h6_1.50", "h6_2.00", "h6_2.40",
];

/// Independent count: every (create, annihilate) choice, deduplicated as an
/// unordered pair so `τ` and `−τ` count once.
pub fn enumerate_generators(k: usize) -> usize {
    use std::collections::BTreeSet;
    let n = 2 * k;
    let mut seen: BTreeSet<(Vec<usize>, Vec<usize>)> = BTreeSet::new();
    let mut add = |c: Vec<usize>, a: Vec<usize>| {
        let key = if c < a { (c, a) } else { (a, c) };
        seen.insert(key);
    };
    for p in 0..n {
        for q in 0..n {
            if p != q && p % 2 == q % 2 {
                add(vec![p], vec![q]);
            }
        }
    }
    let pairs: Vec<Vec<usize>> = (0..n).flat_map(|p| (p + 1..n).map(move |q| vec![p, q])).collect();
    let beta = |v: &[usize]| v.iter().filter(|i| *i % 2 == 1).count();
    for c in &pairs {
        for a in &pairs {
            if c.iter().all(|i| !a.contains(i)) && beta(c) == beta(a) {
                add(c.clone(), a.clone());
            }
        }
    }
    seen.len()
}
