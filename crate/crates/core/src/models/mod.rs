//! `[dn,ds,dl,D]` stabilizer models: qubits on ds-cubes, X-type A terms on
//! D-cubes, and Z-type B terms on dn-cubes restricted to dl-dimensional
//! subsystems.

mod fit;

pub use fit::{gsd_point, gsd_scan_and_fit, GsdFit, GsdPoint};

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gf2::BitMatrix;
use crate::lattice::{binomial, parse_lattice_at, Boundary, CubeCoord, LatticeSpec, QubitIndexMap};
use crate::pauli::{symplectic_matrix, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModelSpec {
    pub dn: usize,
    pub ds: usize,
    pub dl: usize,
    pub dim: usize,
}

impl ModelSpec {
    pub fn new(dn: usize, ds: usize, dl: usize, dim: usize) -> Result<Self> {
        if !(dn < ds && ds < dl && dl <= dim) {
            return domain(format!("[{dn},{ds},{dl},{dim}] violates dn < ds < dl <= D"));
        }
        if dim < 2 {
            return domain("lattice dimension must be at least 2");
        }
        Ok(ModelSpec { dn, ds, dl, dim })
    }

    /// `[d, d+1, d+2, D]`, the family on which the renormalization steps act.
    pub fn is_erg_form(&self) -> bool {
        self.ds == self.dn + 1 && self.dl == self.dn + 2
    }

    /// `[D−2, D−1, D, D]`: toric codes in disguise.
    pub fn is_toric(&self) -> bool {
        self.is_erg_form() && self.dl == self.dim
    }

    /// Weight of every A term on a periodic lattice.
    pub fn a_weight(&self) -> usize {
        binomial(self.dim, self.ds) * (1 << (self.dim - self.ds))
    }

    /// Qubit count on a periodic lattice of the given sizes.
    pub fn qubit_count(&self, dims: &[usize]) -> usize {
        binomial(self.dim, self.ds) * dims.iter().product::<usize>()
    }

    /// The model one dimension lower that a renormalization step inserts.
    pub fn inserted(&self) -> Result<ModelSpec> {
        if !self.is_erg_form() {
            return domain(format!("{self} is not of the form [d,d+1,d+2,D]"));
        }
        ModelSpec::new(self.dn, self.ds, self.dl, self.dim - 1)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{}]", self.dn, self.ds, self.dl, self.dim)
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_spec_at(s, 0)
    }
}

fn parse_spec_at(s: &str, base: usize) -> Result<ModelSpec> {
    let err = |pos: usize, msg: String| Error::Parse { pos: base + pos, msg };
    if !s.starts_with('[') {
        return Err(err(0, "expected '['".into()));
    }
    let Some(close) = s.find(']') else {
        return Err(err(s.len(), "expected ']'".into()));
    };
    if close + 1 != s.len() {
        return Err(err(close + 1, format!("unexpected trailing input '{}'", &s[close + 1..])));
    }
    let mut vals = Vec::new();
    let mut pos = 1;
    for piece in s[1..close].split(',') {
        let v = piece
            .trim()
            .parse::<usize>()
            .map_err(|_| err(pos, format!("expected a non-negative integer, found '{piece}'")))?;
        vals.push(v);
        pos += piece.len() + 1;
    }
    if vals.len() != 4 {
        return Err(err(0, format!("expected 4 entries, found {}", vals.len())));
    }
    ModelSpec::new(vals[0], vals[1], vals[2], vals[3]).map_err(|e| err(0, e.to_string()))
}

/// Parses `"[dn,ds,dl,D]@<L1>x...x<LD>:<bc>"`; `@<dims>` may be omitted when
/// `allow_bare` is set, in which case no lattice is returned.
pub fn parse_instance(s: &str, allow_bare: bool) -> Result<(ModelSpec, Option<LatticeSpec>)> {
    match s.find('@') {
        Some(at) => {
            let spec = parse_spec_at(&s[..at], 0)?;
            let lat = parse_lattice_at(&s[at + 1..], at + 1)?;
            if lat.dim() != spec.dim {
                return Err(Error::Parse {
                    pos: at + 1,
                    msg: format!("{spec} needs {} linear sizes, found {}", spec.dim, lat.dim()),
                });
            }
            Ok((spec, Some(lat)))
        }
        None if allow_bare => Ok((parse_spec_at(s, 0)?, None)),
        None => Err(Error::Parse { pos: s.len(), msg: "expected '@<dims>'".into() }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeneratorTag {
    /// X on the ds-cubes nearest a D-cube.
    A(CubeCoord),
    /// Z on the ds-cubes nearest a dn-cube inside the subsystem spanned by `axes`.
    B {
        anchor: CubeCoord,
        axes: Vec<usize>,
    },
    /// Z on a cut qubit and its partner one unit up the grown axis.
    ZZ(CubeCoord),
    InsertedA(CubeCoord),
    InsertedB {
        anchor: CubeCoord,
        axes: Vec<usize>,
    },
    /// Product of the two A terms on either side of the cut.
    ModifiedA(CubeCoord),
    /// Single-qubit X of a product-state insertion.
    InsertedX(CubeCoord),
}

impl GeneratorTag {
    pub fn kind(&self) -> &'static str {
        match self {
            GeneratorTag::A(_) => "A",
            GeneratorTag::B { .. } => "B",
            GeneratorTag::ZZ(_) => "ZZ",
            GeneratorTag::InsertedA(_) => "inserted-A",
            GeneratorTag::InsertedB { .. } => "inserted-B",
            GeneratorTag::ModifiedA(_) => "modified-A",
            GeneratorTag::InsertedX(_) => "inserted-X",
        }
    }

    pub fn anchor(&self) -> &CubeCoord {
        match self {
            GeneratorTag::A(c)
            | GeneratorTag::ZZ(c)
            | GeneratorTag::InsertedA(c)
            | GeneratorTag::ModifiedA(c)
            | GeneratorTag::InsertedX(c) => c,
            GeneratorTag::B { anchor, .. } | GeneratorTag::InsertedB { anchor, .. } => anchor,
        }
    }

    fn map_anchor(&self, f: impl Fn(&CubeCoord) -> CubeCoord) -> GeneratorTag {
        match self {
            GeneratorTag::A(c) => GeneratorTag::A(f(c)),
            GeneratorTag::ZZ(c) => GeneratorTag::ZZ(f(c)),
            GeneratorTag::InsertedA(c) => GeneratorTag::InsertedA(f(c)),
            GeneratorTag::ModifiedA(c) => GeneratorTag::ModifiedA(f(c)),
            GeneratorTag::InsertedX(c) => GeneratorTag::InsertedX(f(c)),
            GeneratorTag::B { anchor, axes } => GeneratorTag::B { anchor: f(anchor), axes: axes.clone() },
            GeneratorTag::InsertedB { anchor, axes } => {
                GeneratorTag::InsertedB { anchor: f(anchor), axes: axes.clone() }
            }
        }
    }
}

impl fmt::Display for GeneratorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorTag::B { anchor, axes } | GeneratorTag::InsertedB { anchor, axes } => {
                let axes = axes.iter().map(|a| a + 1).join(",");
                write!(f, "{}{}[{}]", self.kind(), anchor, axes)
            }
            other => write!(f, "{}{}", other.kind(), other.anchor()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub tag: GeneratorTag,
    pub op: PauliString,
}

#[derive(Debug, Clone)]
pub struct StabilizerModel {
    pub lattice: LatticeSpec,
    pub spec: ModelSpec,
    /// Set when every coordinate has been shifted by half a lattice unit.
    pub dual: bool,
    pub qubits: QubitIndexMap,
    pub generators: Vec<Generator>,
}

impl StabilizerModel {
    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn ops(&self) -> Vec<PauliString> {
        self.generators.iter().map(|g| g.op.clone()).collect()
    }

    /// Stacked `x ‖ z` rows, one per generator.
    pub fn symplectic(&self) -> BitMatrix {
        symplectic_matrix(self.n_qubits(), &self.ops())
    }

    pub fn rank(&self) -> usize {
        self.symplectic().rank()
    }

    /// First anticommuting generator pair, if any.
    pub fn first_anticommuting_pair(&self) -> Option<(usize, usize)> {
        let g = &self.generators;
        (0..g.len()).flat_map(|i| (i + 1..g.len()).map(move |j| (i, j))).find(|&(i, j)| !g[i].op.commutes(&g[j].op))
    }

    pub fn describe(&self, g: &Generator) -> String {
        format!("{}: {}", g.tag, g.op.to_atoms(&self.qubits))
    }
}

/// Pauli string of one type on the given cubes, which must all be qubits.
pub(crate) fn op_on(qubits: &QubitIndexMap, cubes: &[CubeCoord], is_x: bool) -> Result<PauliString> {
    let mut idx = Vec::with_capacity(cubes.len());
    for c in cubes {
        match qubits.index_of(c) {
            Some(i) => idx.push(i),
            None => return Err(Error::Construction(format!("{c} is not a qubit"))),
        }
    }
    let n = qubits.len();
    Ok(if is_x { PauliString::pure_x(n, idx) } else { PauliString::pure_z(n, idx) })
}

/// Subsystems of a B term at `anchor`: every choice of dl axes containing the
/// anchor's extended axes, in lexicographic order.
pub(crate) fn subsystems(spec: &ModelSpec, anchor: &CubeCoord) -> Vec<Vec<usize>> {
    let own = anchor.half_axes();
    let free: Vec<usize> = (0..spec.dim).filter(|a| !own.contains(a)).collect();
    let mut out: Vec<Vec<usize>> = free
        .into_iter()
        .combinations(spec.dl - own.len())
        .map(|extra| {
            let mut l: Vec<usize> = own.iter().copied().chain(extra).collect();
            l.sort_unstable();
            l
        })
        .collect();
    out.sort();
    out
}

pub(crate) fn a_support(lat: &LatticeSpec, spec: &ModelSpec, cube: &CubeCoord) -> Result<Vec<CubeCoord>> {
    lat.nearest_cubes(cube, spec.ds)
}

pub(crate) fn b_support(
    lat: &LatticeSpec,
    spec: &ModelSpec,
    anchor: &CubeCoord,
    axes: &[usize],
) -> Result<Vec<CubeCoord>> {
    Ok(lat
        .nearest_cubes(anchor, spec.ds)?
        .into_iter()
        .filter(|c| c.half_axes().iter().all(|a| axes.contains(a)))
        .collect())
}

/// A B term as `(anchor, subsystem axes, support)`.
pub(crate) type BTerm = (CubeCoord, Vec<usize>, Vec<CubeCoord>);

/// All B terms of a model on a lattice.
pub(crate) fn b_terms(lat: &LatticeSpec, spec: &ModelSpec) -> Result<Vec<BTerm>> {
    let mut out = Vec::new();
    for anchor in lat.enumerate_cubes(spec.dn)? {
        for axes in subsystems(spec, &anchor) {
            let support = b_support(lat, spec, &anchor, &axes)?;
            if !support.is_empty() {
                out.push((anchor.clone(), axes, support));
            }
        }
    }
    Ok(out)
}

/// Builds the model's generators: all A terms in cube order, then all B terms
/// ordered by anchor and subsystem. The generators are guaranteed to commute
/// only for `[d,d+1,d+2,D]`.
pub fn build_model(spec: ModelSpec, lat: &LatticeSpec) -> Result<StabilizerModel> {
    if lat.dim() != spec.dim {
        return domain(format!("{spec} needs a {}-dimensional lattice, got {lat}", spec.dim));
    }
    let qubits = QubitIndexMap::new(lat, spec.ds)?;
    let mut generators = Vec::new();
    for cube in lat.enumerate_cubes(spec.dim)? {
        let op = op_on(&qubits, &a_support(lat, &spec, &cube)?, true)?;
        generators.push(Generator { tag: GeneratorTag::A(cube), op });
    }
    for (anchor, axes, support) in b_terms(lat, &spec)? {
        let op = op_on(&qubits, &support, false)?;
        generators.push(Generator { tag: GeneratorTag::B { anchor, axes }, op });
    }
    Ok(StabilizerModel { lattice: lat.clone(), spec, dual: false, qubits, generators })
}

/// Shifts every coordinate by half a lattice unit on all axes, turning an
/// n-cube into a (D−n)-cube. Generators keep their order.
pub fn dualize(model: &StabilizerModel) -> Result<StabilizerModel> {
    if model.spec.dl != model.spec.dim {
        return domain(format!("{} is not of the form [D-2,D-1,D,D]", model.spec));
    }
    if model.lattice.bc() != Boundary::Periodic {
        return domain("dualization needs periodic boundaries");
    }
    let lat = &model.lattice;
    let shift = vec![1i64; lat.dim()];
    let move_cube = |c: &CubeCoord| lat.normalize(&c.offset(&shift)).expect("periodic normalization");
    let qubits = QubitIndexMap::from_cubes(model.qubits.cubes().iter().map(move_cube).collect());
    let n = qubits.len();
    let relabel: Vec<usize> =
        model.qubits.cubes().iter().map(|c| qubits.index_of(&move_cube(c)).expect("shifted qubit")).collect();
    let remap = |bits: &crate::gf2::BitVec| crate::gf2::BitVec::from_indices(n, bits.ones().map(|i| relabel[i]));
    let generators = model
        .generators
        .iter()
        .map(|g| Generator {
            tag: g.tag.map_anchor(move_cube),
            op: PauliString::new(remap(g.op.x_bits()), remap(g.op.z_bits())),
        })
        .collect();
    Ok(StabilizerModel { lattice: lat.clone(), spec: model.spec, dual: !model.dual, qubits, generators })
}

/// `N − rank` of the stacked generator matrix.
pub fn log2_gsd(model: &StabilizerModel) -> usize {
    model.n_qubits() - model.rank()
}
