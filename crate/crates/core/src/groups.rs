//! Orthogonal matrices, crystal-class generator catalogs and group closure.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frobenius distance below which two group elements are identified.
pub const DEDUP_TOL: f64 = 1e-8;
pub const DEFAULT_CLOSURE_CAP: usize = 10_000;
const ORTHO_TOL: f64 = 1e-8;

/// Angle used to sample continuous symmetries; incommensurate with 2π.
pub fn sample_angle() -> f64 {
    (-3.0f64 / 5.0).acos()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMatrix {
    m: DMatrix<f64>,
}

impl OrthogonalMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Shape {
                expected: "square matrix".into(),
                found: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
        let dev = (m.transpose() * &m - DMatrix::identity(m.nrows(), m.ncols())).norm();
        if dev > ORTHO_TOL {
            return Err(Error::NotOrthogonal { deviation: dev });
        }
        Ok(Self { m })
    }

    pub fn from_row_slice(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Shape {
                expected: format!("{} entries", dim * dim),
                found: data.len().to_string(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, data))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn inversion(dim: usize) -> Self {
        Self {
            m: -DMatrix::identity(dim, dim),
        }
    }

    /// Rotation by `theta` about the unit `axis`: `I + sinθ A + (1 - cosθ) A²`.
    pub fn rotation(axis: &[f64], theta: f64) -> Result<Self> {
        let a = unit_axis(axis)?;
        let skew = DMatrix::from_row_slice(3, 3, &[0.0, -a[2], a[1], a[2], 0.0, -a[0], -a[1], a[0], 0.0]);
        let sq = &skew * &skew;
        let m = DMatrix::identity(3, 3) + skew * theta.sin() + sq * (1.0 - theta.cos());
        Ok(Self { m: clean(m) })
    }

    /// Rotation about coordinate axis `k` (0-based).
    pub fn axis_rotation(k: usize, theta: f64) -> Self {
        let mut a = [0.0; 3];
        a[k] = 1.0;
        Self::rotation(&a, theta).expect("coordinate axis is a unit vector")
    }

    /// Reflection `I - 2 a⊗a` through the plane with unit normal `axis`.
    pub fn reflection(axis: &[f64]) -> Result<Self> {
        let a = unit_axis(axis)?;
        let v = DVector::from_row_slice(&a);
        let m = DMatrix::identity(3, 3) - (&v * v.transpose()) * 2.0;
        Ok(Self { m: clean(m) })
    }

    pub fn axis_reflection(k: usize) -> Self {
        let mut a = [0.0; 3];
        a[k] = 1.0;
        Self::reflection(&a).expect("coordinate axis is a unit vector")
    }

    /// Uniformly distributed rotation from a normalised Gaussian quaternion.
    pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut q = [0.0f64; 4];
        let mut n = 0.0;
        while n < 1e-12 {
            for x in q.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
            n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        }
        let [w, x, y, z] = q.map(|v| v / n);
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - z * w),
                2.0 * (x * z + y * w),
                2.0 * (x * y + z * w),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - x * w),
                2.0 * (x * z - y * w),
                2.0 * (y * z + x * w),
                1.0 - 2.0 * (x * x + y * y),
            ],
        );
        Self { m }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn det(&self) -> f64 {
        self.m.determinant()
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { m: &self.m * &other.m }
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
        }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.m - &other.m).norm()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.m.row(i).iter().copied().collect())
            .collect()
    }
}

fn unit_axis(axis: &[f64]) -> Result<[f64; 3]> {
    if axis.len() != 3 {
        return Err(Error::Shape {
            expected: "3-vector".into(),
            found: axis.len().to_string(),
        });
    }
    let n = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitAxis(n));
    }
    Ok([axis[0], axis[1], axis[2]])
}

fn clean(mut m: DMatrix<f64>) -> DMatrix<f64> {
    for v in m.iter_mut() {
        if v.abs() < 1e-15 {
            *v = 0.0;
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    #[serde(rename = "so3_kb")]
    So3Kb,
    #[serde(rename = "o3_zheng")]
    O3Zheng,
    #[serde(rename = "custom")]
    Custom,
}

impl Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::So3Kb => "so3_kb",
            Convention::O3Zheng => "o3_zheng",
            Convention::Custom => "custom",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "so3_kb" => Ok(Convention::So3Kb),
            "o3_zheng" => Ok(Convention::O3Zheng),
            "custom" => Ok(Convention::Custom),
            _ => Err(Error::UnknownConvention(s.to_string())),
        }
    }
}

/// Catalog group names, ordered from lowest to highest symmetry.
pub const CATALOG_NAMES: [&str; 8] = [
    "triclinic",
    "monoclinic",
    "orthotropic",
    "trigonal",
    "tetragonal",
    "cubic",
    "transverse",
    "isotropic",
];

#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub name: String,
    pub convention: Convention,
    pub generators: Vec<OrthogonalMatrix>,
    /// False when a continuous symmetry is represented by a sampled angle.
    pub finite_hint: bool,
    pub sample_angles: Vec<f64>,
}

#[derive(Deserialize)]
struct CustomGroupFile {
    name: String,
    generators: Vec<Vec<Vec<f64>>>,
    #[serde(default = "default_true")]
    finite: bool,
}

fn default_true() -> bool {
    true
}

impl GroupSpec {
    pub fn catalog(name: &str, convention: Convention) -> Result<Self> {
        use OrthogonalMatrix as Q;
        let pi = std::f64::consts::PI;
        let th = sample_angle();
        let unknown = || Error::UnknownGroup {
            name: name.to_string(),
            valid: CATALOG_NAMES.iter().map(|s| s.to_string()).collect(),
        };
        let (generators, finite) = match convention {
            Convention::So3Kb => match name {
                "triclinic" => (vec![Q::identity(3)], true),
                "monoclinic" => (vec![Q::axis_rotation(0, pi)], true),
                "orthotropic" => (vec![Q::axis_rotation(0, pi), Q::axis_rotation(2, pi)], true),
                "trigonal" => (vec![Q::axis_rotation(2, 2.0 * pi / 3.0)], true),
                "tetragonal" => (vec![Q::axis_rotation(0, pi), Q::axis_rotation(2, pi / 2.0)], true),
                "cubic" => (
                    vec![
                        Q::axis_rotation(0, pi / 2.0),
                        Q::axis_rotation(1, pi / 2.0),
                        Q::axis_rotation(2, pi / 2.0),
                    ],
                    true,
                ),
                "transverse" | "isotropic" => (continuous(name, th), false),
                _ => return Err(unknown()),
            },
            Convention::O3Zheng => match name {
                "triclinic" => (vec![Q::identity(3), Q::inversion(3)], true),
                "monoclinic" => (vec![Q::axis_rotation(2, pi), Q::inversion(3)], true),
                "orthotropic" => (
                    vec![
                        Q::axis_reflection(0),
                        Q::axis_reflection(1),
                        Q::axis_rotation(2, pi),
                        Q::inversion(3),
                    ],
                    true,
                ),
                "trigonal" => (
                    vec![Q::axis_reflection(1), Q::axis_rotation(2, 2.0 * pi / 3.0), Q::inversion(3)],
                    true,
                ),
                "tetragonal" => (
                    vec![
                        Q::axis_reflection(0),
                        Q::axis_reflection(1),
                        Q::axis_rotation(2, pi / 2.0),
                        Q::inversion(3),
                    ],
                    true,
                ),
                "cubic" => {
                    let c = 1.0 / 3f64.sqrt();
                    (
                        vec![
                            Q::rotation(&[c, c, c], 2.0 * pi / 3.0)?,
                            Q::axis_rotation(0, pi / 2.0),
                            Q::axis_reflection(1),
                            Q::inversion(3),
                        ],
                        true,
                    )
                }
                "transverse" | "isotropic" => (continuous(name, th), false),
                _ => return Err(unknown()),
            },
            Convention::Custom => {
                return Err(Error::InvalidArgument(
                    "custom groups are loaded from a JSON file".into(),
                ))
            }
        };
        Ok(Self {
            name: name.to_string(),
            convention,
            generators,
            finite_hint: finite,
            sample_angles: if finite { vec![] } else { vec![th] },
        })
    }

    /// Trigonal class with its three-fold axis on the cube diagonal, so that it
    /// sits inside the cubic class of the same convention.
    pub fn trigonal_cube_diagonal(convention: Convention) -> Result<Self> {
        use OrthogonalMatrix as Q;
        let c = 1.0 / 3f64.sqrt();
        let r3 = Q::rotation(&[c, c, c], 2.0 * std::f64::consts::PI / 3.0)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let generators = match convention {
            Convention::So3Kb => vec![r3],
            Convention::O3Zheng => vec![Q::reflection(&[s, -s, 0.0])?, r3, Q::inversion(3)],
            Convention::Custom => return Err(Error::UnknownConvention("custom".into())),
        };
        Ok(Self {
            name: "trigonal".into(),
            convention,
            generators,
            finite_hint: true,
            sample_angles: vec![],
        })
    }

    /// A user-supplied generator set; an empty set means the trivial group.
    pub fn custom(name: &str, mut generators: Vec<OrthogonalMatrix>, finite: bool) -> Result<Self> {
        if let Some(d) = generators.first().map(|g| g.dim()) {
            if let Some(g) = generators.iter().find(|g| g.dim() != d) {
                return Err(Error::Shape {
                    expected: format!("{d}x{d} generators"),
                    found: format!("{0}x{0}", g.dim()),
                });
            }
        } else {
            generators.push(OrthogonalMatrix::identity(3));
        }
        Ok(Self {
            name: name.to_string(),
            convention: Convention::Custom,
            generators,
            finite_hint: finite,
            sample_angles: vec![],
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CustomGroupFile = serde_json::from_str(text)?;
        let mut generators = Vec::with_capacity(file.generators.len());
        for g in &file.generators {
            if g.len() != 3 || g.iter().any(|r| r.len() != 3) {
                return Err(Error::Shape {
                    expected: "3x3 generator".into(),
                    found: format!("{} rows", g.len()),
                });
            }
            let flat: Vec<f64> = g.iter().flatten().copied().collect();
            generators.push(OrthogonalMatrix::from_row_slice(3, &flat)?);
        }
        Self::custom(&file.name, generators, file.finite)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn dim(&self) -> usize {
        self.generators.first().map_or(3, |g| g.dim())
    }

    pub fn close(&self) -> Result<FiniteGroup> {
        self.close_with_cap(DEFAULT_CLOSURE_CAP)
    }

    pub fn close_with_cap(&self, cap: usize) -> Result<FiniteGroup> {
        if !self.finite_hint {
            return Err(Error::InfiniteGroup(self.name.clone()));
        }
        let elements = close_group(&self.generators, cap)?;
        Ok(FiniteGroup {
            name: self.name.clone(),
            elements,
        })
    }
}

fn continuous(name: &str, th: f64) -> Vec<OrthogonalMatrix> {
    use OrthogonalMatrix as Q;
    if name == "transverse" {
        vec![Q::axis_rotation(0, std::f64::consts::PI), Q::axis_rotation(2, th)]
    } else {
        vec![Q::axis_rotation(0, th), Q::axis_rotation(1, th), Q::axis_rotation(2, th)]
    }
}

#[derive(Debug, Clone)]
pub struct FiniteGroup {
    pub name: String,
    elements: Vec<OrthogonalMatrix>,
}

impl FiniteGroup {
    pub fn from_generators(name: &str, generators: &[OrthogonalMatrix], cap: usize) -> Result<Self> {
        Ok(Self {
            name: name.to_string(),
            elements: close_group(generators, cap)?,
        })
    }

    pub fn elements(&self) -> &[OrthogonalMatrix] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn contains(&self, g: &OrthogonalMatrix) -> bool {
        self.elements.iter().any(|e| e.distance(g) <= DEDUP_TOL)
    }
}

struct ElementIndex {
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

const GRID: f64 = 1e4;

impl ElementIndex {
    fn key(m: &DMatrix<f64>) -> Vec<i64> {
        m.iter().map(|v| (v * GRID).round() as i64).collect()
    }

    /// Keys of every grid cell a matrix within DEDUP_TOL could round into.
    fn nearby_keys(m: &DMatrix<f64>) -> Vec<Vec<i64>> {
        let mut keys = vec![Vec::with_capacity(m.len())];
        for v in m.iter() {
            let s = v * GRID;
            let frac = s - s.floor();
            if (frac - 0.5).abs() < 1e-3 {
                let lo = s.floor() as i64;
                keys = keys
                    .into_iter()
                    .flat_map(|k| {
                        let mut a = k.clone();
                        a.push(lo);
                        let mut b = k;
                        b.push(lo + 1);
                        [a, b]
                    })
                    .collect();
            } else {
                let r = s.round() as i64;
                for k in keys.iter_mut() {
                    k.push(r);
                }
            }
        }
        keys
    }

    fn find(&self, elems: &[OrthogonalMatrix], g: &OrthogonalMatrix) -> bool {
        Self::nearby_keys(&g.m).iter().any(|k| {
            self.buckets
                .get(k)
                .is_some_and(|b| b.iter().any(|&i| elems[i].distance(g) <= DEDUP_TOL))
        })
    }

    fn insert(&mut self, g: &OrthogonalMatrix, i: usize) {
        self.buckets.entry(Self::key(&g.m)).or_default().push(i);
    }
}

/// Breadth-first closure of a generator set under multiplication.
pub fn close_group(generators: &[OrthogonalMatrix], cap: usize) -> Result<Vec<OrthogonalMatrix>> {
    let dim = generators.first().map_or(3, |g| g.dim());
    if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
        return Err(Error::Shape {
            expected: format!("{dim}x{dim} generators"),
            found: format!("{0}x{0}", g.dim()),
        });
    }
    let mut elems = vec![OrthogonalMatrix::identity(dim)];
    let mut index = ElementIndex {
        buckets: HashMap::new(),
    };
    index.insert(&elems[0], 0);
    let mut head = 0;
    while head < elems.len() {
        let cur = elems[head].clone();
        head += 1;
        for g in generators {
            let p = g.compose(&cur);
            if !index.find(&elems, &p) {
                if elems.len() >= cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                index.insert(&p, elems.len());
                elems.push(p);
            }
        }
    }
    Ok(elems)
}
