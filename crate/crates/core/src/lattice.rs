//! Hypercubic tori and their n-cubes.
//!
//! Every n-cube is addressed by the coordinates of its center, stored doubled
//! so that half-integer entries become odd integers. The number of odd entries
//! is the cube dimension: on a 3D lattice `(1, 1, 0)` is the plaquette
//! centered at `(½, ½, 0)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Boundary {
    Periodic,
    Open,
}

impl Boundary {
    pub fn tag(self) -> &'static str {
        match self {
            Boundary::Periodic => "pbc",
            Boundary::Open => "obc",
        }
    }
}

/// Center of an n-cube in doubled integer coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubeCoord(Vec<i64>);

impl CubeCoord {
    pub fn new(coords: Vec<i64>) -> Self {
        CubeCoord(coords)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn ndim(&self) -> usize {
        self.0.len()
    }

    /// Cube dimension n: the number of half-integer axes.
    pub fn dim(&self) -> usize {
        self.0.iter().filter(|c| c.rem_euclid(2) == 1).count()
    }

    /// Axes along which the cube extends (odd doubled coordinate).
    pub fn half_axes(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i].rem_euclid(2) == 1).collect()
    }

    pub fn is_half(&self, axis: usize) -> bool {
        self.0[axis].rem_euclid(2) == 1
    }

    pub fn get(&self, axis: usize) -> i64 {
        self.0[axis]
    }

    /// Raw doubled shift along one axis, no wrapping.
    pub fn shifted(&self, axis: usize, delta: i64) -> CubeCoord {
        let mut c = self.0.clone();
        c[axis] += delta;
        CubeCoord(c)
    }

    pub fn with(&self, axis: usize, value: i64) -> CubeCoord {
        let mut c = self.0.clone();
        c[axis] = value;
        CubeCoord(c)
    }

    /// Raw doubled translation, no wrapping.
    pub fn offset(&self, delta: &[i64]) -> CubeCoord {
        CubeCoord(self.0.iter().zip(delta).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for CubeCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, &c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if c.rem_euclid(2) == 0 {
                write!(f, "{}", c / 2)?;
            } else {
                write!(f, "{}/2", c)?;
            }
        }
        write!(f, ")")
    }
}

/// A D-dimensional hypercubic lattice with linear sizes `dims`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    dims: Vec<usize>,
    bc: Boundary,
}

impl LatticeSpec {
    pub fn new(dims: Vec<usize>, bc: Boundary) -> Result<Self> {
        if dims.len() < 2 {
            return domain(format!("lattice dimension must be at least 2, got {}", dims.len()));
        }
        if let Some(l) = dims.iter().find(|&&l| l < 2) {
            return domain(format!("every linear size must be at least 2, got {l}"));
        }
        Ok(LatticeSpec { dims, bc })
    }

    pub fn periodic(dims: &[usize]) -> Result<Self> {
        Self::new(dims.to_vec(), Boundary::Periodic)
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn bc(&self) -> Boundary {
        self.bc
    }

    /// Number of sites, i.e. the product of the linear sizes.
    pub fn volume(&self) -> usize {
        self.dims.iter().product()
    }

    fn period(&self, axis: usize) -> i64 {
        2 * self.dims[axis] as i64
    }

    /// Brings a raw coordinate vector onto the lattice: reduced modulo `2 L_i`
    /// under periodic boundaries, rejected when outside under open boundaries.
    pub fn normalize(&self, c: &CubeCoord) -> Option<CubeCoord> {
        debug_assert_eq!(c.ndim(), self.dim());
        match self.bc {
            Boundary::Periodic => {
                Some(CubeCoord(c.0.iter().enumerate().map(|(i, &x)| x.rem_euclid(self.period(i))).collect()))
            }
            Boundary::Open => {
                let inside = c.0.iter().enumerate().all(|(i, &x)| x >= 0 && x <= self.period(i) - 2);
                inside.then(|| c.clone())
            }
        }
    }

    pub fn contains(&self, c: &CubeCoord) -> bool {
        c.ndim() == self.dim() && self.normalize(c).as_ref() == Some(c)
    }

    /// Minimal-image distance along one axis, in doubled units.
    pub fn axis_distance(&self, axis: usize, a: i64, b: i64) -> i64 {
        match self.bc {
            Boundary::Periodic => {
                let p = self.period(axis);
                let d = (a - b).rem_euclid(p);
                d.min(p - d)
            }
            Boundary::Open => (a - b).abs(),
        }
    }

    /// Sum of per-axis distances in doubled units.
    pub fn l1_distance(&self, a: &CubeCoord, b: &CubeCoord) -> i64 {
        (0..self.dim()).map(|i| self.axis_distance(i, a.0[i], b.0[i])).sum()
    }

    /// All n-cubes in lexicographic order of their doubled coordinates.
    pub fn enumerate_cubes(&self, n: usize) -> Result<Vec<CubeCoord>> {
        if n > self.dim() {
            return domain(format!("cube dimension {n} exceeds lattice dimension {}", self.dim()));
        }
        let ranges = (0..self.dim()).map(|i| match self.bc {
            Boundary::Periodic => 0..self.period(i),
            Boundary::Open => 0..self.period(i) - 1,
        });
        Ok(ranges.multi_cartesian_product().map(CubeCoord).filter(|c| c.dim() == n).collect())
    }

    /// The nearest-cube relation: for cubes of dimensions m ≠ n the summed
    /// coordinate distance equals |m−n|/2, for equal dimensions it equals 1.
    pub fn is_nearest(&self, a: &CubeCoord, b: &CubeCoord) -> bool {
        let (m, n) = (a.dim() as i64, b.dim() as i64);
        let target = if m == n { 2 } else { (m - n).abs() };
        self.l1_distance(a, b) == target
    }

    /// All m-cubes nearest to `c`, sorted and deduplicated.
    ///
    /// For m < n these are the m-faces of `c`, for m > n the m-cubes having `c`
    /// as a face, and for m = n the parallel translates by one lattice unit and
    /// the cubes obtained by trading one extended axis for another.
    pub fn nearest_cubes(&self, c: &CubeCoord, m: usize) -> Result<Vec<CubeCoord>> {
        let dim = self.dim();
        if m > dim {
            return domain(format!("cube dimension {m} exceeds lattice dimension {dim}"));
        }
        let n = c.dim();
        let odd = c.half_axes();
        let even: Vec<usize> = (0..dim).filter(|i| !c.is_half(*i)).collect();
        let mut raw: Vec<CubeCoord> = Vec::new();
        let mut push_signed = |axes: &[usize], step: i64| {
            for signs in (0..axes.len()).map(|_| [-step, step]).multi_cartesian_product() {
                let mut v = c.0.clone();
                for (ax, s) in axes.iter().zip(&signs) {
                    v[*ax] += s;
                }
                raw.push(CubeCoord(v));
            }
        };
        if m < n {
            for axes in odd.iter().copied().combinations(n - m) {
                push_signed(&axes, 1);
            }
        } else if m > n {
            for axes in even.iter().copied().combinations(m - n) {
                push_signed(&axes, 1);
            }
        } else {
            for ax in 0..dim {
                push_signed(&[ax], 2);
            }
            for &i in &odd {
                for &j in &even {
                    push_signed(&[i, j], 1);
                }
            }
        }
        let mut out: Vec<CubeCoord> = raw.iter().filter_map(|v| self.normalize(v)).filter(|v| v != c).collect();
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.dims.iter().join("x"), self.bc.tag())
    }
}

/// Parses `"<L1>x<L2>x...x<LD>:<pbc|obc>"`. A missing `:<bc>` suffix means periodic.
impl FromStr for LatticeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_lattice_at(s, 0)
    }
}

pub(crate) fn parse_lattice_at(s: &str, base: usize) -> Result<LatticeSpec> {
    let (dims_part, bc) = match s.find(':') {
        Some(i) => {
            let bc = match &s[i + 1..] {
                "pbc" => Boundary::Periodic,
                "obc" => Boundary::Open,
                other => {
                    return Err(Error::Parse {
                        pos: base + i + 1,
                        msg: format!("expected 'pbc' or 'obc', found '{other}'"),
                    })
                }
            };
            (&s[..i], bc)
        }
        None => (s, Boundary::Periodic),
    };
    let mut dims = Vec::new();
    let mut offset = 0;
    for piece in dims_part.split('x') {
        let l = piece.parse::<usize>().map_err(|_| Error::Parse {
            pos: base + offset,
            msg: format!("expected a linear size, found '{piece}'"),
        })?;
        dims.push(l);
        offset += piece.len() + 1;
    }
    LatticeSpec::new(dims, bc).map_err(|e| Error::Parse { pos: base, msg: e.to_string() })
}

/// Bijection between the n-cubes of a lattice and `0..N`, in enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitIndexMap {
    cubes: Vec<CubeCoord>,
    index: HashMap<CubeCoord, usize>,
}

impl QubitIndexMap {
    pub fn new(lat: &LatticeSpec, n: usize) -> Result<Self> {
        Ok(Self::from_cubes(lat.enumerate_cubes(n)?))
    }

    /// Index map over an explicit cube list; the list is sorted first.
    pub fn from_cubes(mut cubes: Vec<CubeCoord>) -> Self {
        cubes.sort();
        cubes.dedup();
        let index = cubes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        QubitIndexMap { cubes, index }
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn index_of(&self, c: &CubeCoord) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn cube(&self, i: usize) -> &CubeCoord {
        &self.cubes[i]
    }

    pub fn cubes(&self) -> &[CubeCoord] {
        &self.cubes
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
