//! Published table values used as regression targets.

use serde::Deserialize;

use crate::groups::Convention;

/// Row order shared by the summary tables.
pub const SUMMARY_GROUPS: [&str; 8] = [
    "triclinic",
    "monoclinic",
    "orthotropic",
    "trigonal",
    "tetragonal",
    "transverse",
    "cubic",
    "isotropic",
];

/// Convention under which the yield and A²(S³) summaries reproduce.
pub const SUMMARY_CONVENTION: Convention = Convention::O3Zheng;

/// (components, dim S²(S²(R³))^G) for the anisotropic yield tensor.
pub const KARAFILLIS: [(usize, u64); 8] = [(15, 21), (9, 13), (6, 9), (4, 6), (4, 6), (3, 5), (2, 3), (1, 2)];

/// dim A²(S³(R³))^G
pub const MANUFACTURED: [u64; 8] = [45, 21, 9, 6, 4, 2, 1, 0];

/// Crystal-class table rows in catalog order; each cell is (A, B) for
/// tensor orders 4, 3, 2, 1.
pub const CRYSTAL_SO3: [[(u64, u64); 4]; 8] = [
    [(40, 81), (14, 27), (4, 9), (2, 3)],
    [(33, 41), (10, 13), (2, 5), (0, 1)],
    [(21, 21), (6, 6), (2, 3), (0, 0)],
    [(10, 11), (0, 3), (0, 2), (0, 0)],
    [(13, 14), (1, 4), (0, 2), (0, 0)],
    [(4, 4), (0, 1), (0, 1), (0, 0)],
    [(10, 10), (4, 4), (2, 2), (1, 1)],
    [(3, 3), (0, 0), (1, 1), (0, 0)],
];

pub const CRYSTAL_O3: [[(u64, u64); 4]; 8] = [
    [(40, 81), (0, 0), (4, 9), (0, 0)],
    [(32, 41), (0, 0), (2, 5), (0, 0)],
    [(19, 21), (0, 0), (1, 3), (0, 0)],
    [(12, 14), (0, 0), (0, 2), (0, 0)],
    [(7, 11), (0, 0), (0, 2), (0, 0)],
    [(4, 4), (0, 0), (0, 1), (0, 0)],
    [(10, 10), (0, 0), (2, 2), (0, 0)],
    [(3, 3), (0, 0), (1, 1), (0, 0)],
];

pub const CRYSTAL_ORDERS: [usize; 4] = [4, 3, 2, 1];

pub fn crystal_table(c: Convention) -> &'static [[(u64, u64); 4]; 8] {
    match c {
        Convention::O3Zheng => &CRYSTAL_O3,
        _ => &CRYSTAL_SO3,
    }
}

/// Sparse tensor entry with 1-based indices.
pub type Entry2 = (usize, usize, f64);
pub type Entry4 = (usize, usize, usize, usize, f64);

/// Listed second-order tensors per group.
pub fn second_order(c: Convention) -> Vec<(&'static str, Vec<Vec<Entry2>>)> {
    let iso = vec![vec![(1, 1, 1.0), (2, 2, 1.0), (3, 3, 1.0)]];
    let trans = vec![vec![(1, 1, 1.0), (2, 2, 1.0)], vec![(3, 3, 1.0)]];
    let tri = vec![
        vec![(1, 3, 1.0)],
        vec![(2, 3, 1.0)],
        vec![(3, 1, 1.0)],
        vec![(3, 2, 1.0)],
    ];
    let mono = vec![vec![(1, 2, 1.0), (2, 1, 1.0)], vec![(1, 2, -1.0), (2, 1, 1.0)]];
    let ortho = match c {
        Convention::O3Zheng => vec![vec![(1, 1, 1.0), (2, 2, -1.0)]],
        _ => vec![
            vec![(2, 2, 1.0), (3, 3, -1.0)],
            vec![(1, 1, 1.0), (2, 2, -0.5), (3, 3, -0.5)],
        ],
    };
    vec![
        ("triclinic", tri),
        ("monoclinic", mono),
        ("orthotropic", ortho),
        ("transverse", trans),
        ("isotropic", iso),
    ]
}

fn isotropic_ii() -> Vec<Entry4> {
    let mut v = Vec::new();
    for i in 1..=3 {
        for k in 1..=3 {
            v.push((i, i, k, k, 1.0));
        }
    }
    v
}

/// The sparsest characteristic fourth-order tensor listed per group.
pub fn single_fourth_order(c: Convention) -> Vec<(&'static str, Vec<Entry4>)> {
    let cubic = vec![(1, 1, 1, 1, 1.0), (2, 2, 2, 2, 1.0), (3, 3, 3, 3, 1.0)];
    match c {
        Convention::O3Zheng => vec![
            ("monoclinic", vec![(1, 3, 3, 1, 1.0)]),
            ("orthotropic", vec![(2, 2, 3, 3, 1.0)]),
            ("trigonal", vec![(3, 1, 3, 1, 1.0), (3, 2, 3, 2, 1.0)]),
            ("tetragonal", vec![(1, 3, 1, 3, 1.0), (2, 3, 2, 3, 1.0)]),
            ("cubic", cubic),
            (
                "transverse",
                vec![(1, 2, 1, 2, -1.0), (1, 2, 2, 1, 1.0), (2, 1, 1, 2, 1.0), (2, 1, 2, 1, -1.0)],
            ),
            ("isotropic", isotropic_ii()),
        ],
        _ => vec![
            ("monoclinic", vec![(1, 1, 2, 1, 1.0)]),
            ("orthotropic", vec![(2, 2, 3, 3, 1.0)]),
            ("trigonal", vec![(3, 1, 1, 3, 1.0), (3, 2, 2, 3, 1.0)]),
            ("tetragonal", vec![(1, 1, 2, 2, 1.0), (2, 2, 1, 1, 1.0)]),
            ("cubic", cubic),
            ("transverse", vec![(1, 3, 1, 3, 1.0), (2, 3, 2, 3, 1.0)]),
            ("isotropic", isotropic_ii()),
        ],
    }
}

/// Bases printed to four decimals in the appendix tables.
#[derive(Debug, Clone, Deserialize)]
pub struct AppendixTable {
    /// "modulus" (elastic modulus bases) or "structure" (order-4 invariants).
    pub kind: String,
    pub group: String,
    pub count: usize,
    pub bases: Vec<AppendixBase>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AppendixBase {
    #[serde(default)]
    pub exclusive: Option<bool>,
    pub entries: Vec<Entry4>,
}

pub fn appendix_tables() -> Vec<AppendixTable> {
    serde_json::from_str(include_str!("../../fixtures/appendix_tables.json")).expect("bundled fixture parses")
}

/// Basis count stated in prose for the trigonal structure basis, whose
/// table is not printed.
pub const APPENDIX_TRIGONAL_TEXT_COUNT: usize = 9;

/// Half a unit in the fourth decimal place.
pub const ROUNDING: f64 = 5e-5;
