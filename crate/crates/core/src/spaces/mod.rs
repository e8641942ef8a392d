//! Structured tensor spaces built from `R^d` by tensor, symmetric and
//! alternating powers, e.g. `S2(S2(R3))` for elasticity-like tensors.

mod molien;

pub use molien::{molien_series, predict_dimension, space_eigenvalues, HilbertCoeffs};

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{check_permutation, DenseTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgebraKind {
    Tensor,
    Symmetric,
    Alternating,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SpaceSpec {
    Base(usize),
    Tensor(usize, Box<SpaceSpec>),
    Sym(usize, Box<SpaceSpec>),
    Alt(usize, Box<SpaceSpec>),
}

impl SpaceSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser {
            input: s,
            chars: compact.as_bytes(),
            pos: 0,
        };
        let spec = p.node()?;
        if p.pos != p.chars.len() {
            return Err(p.err("trailing characters"));
        }
        Ok(spec)
    }

    /// Plain tensor power `T^n(R^d)`.
    pub fn tensor_power(order: usize, dim: usize) -> Self {
        SpaceSpec::Tensor(order, Box::new(SpaceSpec::Base(dim)))
    }

    pub fn ambient_order(&self) -> usize {
        match self {
            SpaceSpec::Base(_) => 1,
            SpaceSpec::Tensor(k, c) | SpaceSpec::Sym(k, c) | SpaceSpec::Alt(k, c) => k * c.ambient_order(),
        }
    }

    pub fn base_dim(&self) -> usize {
        match self {
            SpaceSpec::Base(d) => *d,
            SpaceSpec::Tensor(_, c) | SpaceSpec::Sym(_, c) | SpaceSpec::Alt(_, c) => c.base_dim(),
        }
    }

    /// Number of components of the ambient tensor power `d^n`.
    pub fn ambient_len(&self) -> usize {
        self.base_dim().pow(self.ambient_order() as u32)
    }

    /// Dimension of the space itself (ignoring any group).
    pub fn dimension(&self) -> u64 {
        match self {
            SpaceSpec::Base(d) => *d as u64,
            SpaceSpec::Tensor(k, c) => c.dimension().pow(*k as u32),
            SpaceSpec::Sym(k, c) => binomial(c.dimension() + *k as u64 - 1, *k as u64),
            SpaceSpec::Alt(k, c) => binomial(c.dimension(), *k as u64),
        }
    }

    /// Signed slot permutations whose fixed points are exactly the space.
    pub fn symmetry_generators(&self) -> Vec<SignedPermutation> {
        let n = self.ambient_order();
        let mut out = Vec::new();
        self.collect_generators(0, n, &mut out);
        out
    }

    fn collect_generators(&self, offset: usize, n: usize, out: &mut Vec<SignedPermutation>) {
        let (k, child, sign) = match self {
            SpaceSpec::Base(_) => return,
            SpaceSpec::Tensor(k, c) => (*k, c, None),
            SpaceSpec::Sym(k, c) => (*k, c, Some(1.0)),
            SpaceSpec::Alt(k, c) => (*k, c, Some(-1.0)),
        };
        let block = child.ambient_order();
        for b in 0..k {
            child.collect_generators(offset + b * block, n, out);
        }
        if let Some(sign) = sign {
            for b in 0..k.saturating_sub(1) {
                let mut perm: Vec<usize> = (0..n).collect();
                let a0 = offset + b * block;
                for s in 0..block {
                    perm.swap(a0 + s, a0 + block + s);
                }
                out.push(SignedPermutation { perm, sign });
            }
        }
    }

    /// All elements of the signed permutation group generated by
    /// [`symmetry_generators`](Self::symmetry_generators).
    pub fn symmetry_group(&self) -> Vec<SignedPermutation> {
        let n = self.ambient_order();
        let gens = self.symmetry_generators();
        let id = SignedPermutation::identity(n);
        let mut seen: HashSet<Vec<usize>> = HashSet::from([id.perm.clone()]);
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(cur) = queue.pop_front() {
            for g in &gens {
                let p = g.then(&cur);
                if seen.insert(p.perm.clone()) {
                    out.push(p.clone());
                    queue.push_back(p);
                }
            }
        }
        out
    }

    /// Orthogonal projection of an ambient tensor onto the space.
    pub fn project(&self, t: &DenseTensor) -> Result<DenseTensor> {
        if t.order() != self.ambient_order() || t.dim() != self.base_dim() {
            return Err(Error::Shape {
                expected: format!("order {} dim {}", self.ambient_order(), self.base_dim()),
                found: format!("order {} dim {}", t.order(), t.dim()),
            });
        }
        let group = self.symmetry_group();
        let mut acc = DenseTensor::zeros(t.order(), t.dim());
        for h in &group {
            acc.axpy(1.0, &h.apply(t)?)?;
        }
        Ok(acc.scale(1.0 / group.len() as f64))
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as u64
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Base(d) => write!(f, "R{d}"),
            SpaceSpec::Tensor(k, c) => write!(f, "T{k}({c})"),
            SpaceSpec::Sym(k, c) => write!(f, "S{k}({c})"),
            SpaceSpec::Alt(k, c) => write!(f, "A{k}({c})"),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

struct Parser<'a> {
    input: &'a str,
    chars: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::SpaceParse {
            input: self.input.to_string(),
            msg: format!("{msg} at position {}", self.pos),
        }
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let n: usize = std::str::from_utf8(&self.chars[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number out of range"))?;
        if n == 0 {
            return Err(self.err("expected a positive number"));
        }
        Ok(n)
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.chars.get(self.pos) != Some(&c) {
            return Err(self.err(&format!("expected '{}'", c as char)));
        }
        self.pos += 1;
        Ok(())
    }

    fn node(&mut self) -> Result<SpaceSpec> {
        let head = *self.chars.get(self.pos).ok_or_else(|| self.err("unexpected end"))?;
        self.pos += 1;
        let k = self.number()?;
        if head == b'R' {
            return Ok(SpaceSpec::Base(k));
        }
        self.expect(b'(')?;
        let child = Box::new(self.node()?);
        self.expect(b')')?;
        match head {
            b'T' => Ok(SpaceSpec::Tensor(k, child)),
            b'S' => Ok(SpaceSpec::Sym(k, child)),
            b'A' => Ok(SpaceSpec::Alt(k, child)),
            _ => {
                self.pos -= 1;
                Err(self.err("expected one of T, S, A, R"))
            }
        }
    }
}

/// A slot permutation with sign, acting as
/// `(P t)[i_perm(0), .., i_perm(n-1)] = sign * t[i_0, .., i_{n-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub sign: f64,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, sign: f64) -> Result<Self> {
        check_permutation(&perm, perm.len())?;
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidArgument(format!("sign must be ±1, got {sign}")));
        }
        Ok(Self { perm, sign })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            sign: 1.0,
        }
    }

    pub fn apply(&self, t: &DenseTensor) -> Result<DenseTensor> {
        t.permute_indices(&self.perm, self.sign)
    }

    /// The permutation acting as `self` after `first`.
    pub fn then(&self, first: &Self) -> Self {
        Self {
            perm: self.perm.iter().map(|&p| first.perm[p]).collect(),
            sign: self.sign * first.sign,
        }
    }
}
