//! Level-0 coarse-graining of the 2D toric code by a nonlinear gate.
//!
//! Each vertex receives an extra qubit set by two CNOTs to the XOR of two of
//! its links, splitting the vertex into two trivalent ones joined by a short
//! diagonal. Plaquettes of one checkerboard colour ("squares") are then
//! shrunk: an 8-qubit gate reads the four corner diagonals and flips the
//! square's sides until they agree. The diagonals left over form a toric code
//! on a lattice rotated by 45°.
//!
//! Configurations are bit strings over the `2L²` links (in the toric model's
//! qubit order) followed by the `L²` vertex qubits (vertex `(x, y)` at
//! `2L² + x·L + y`).

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::gf2::{reduce_against, BitMatrix, BitVec};
use crate::groundstate::{config_group, enumerate_configs};
use crate::lattice::{CubeCoord, LatticeSpec, QubitIndexMap};
use crate::models::{build_model, ModelSpec};
use crate::Limits;

/// Largest torus whose ground configurations are enumerated.
pub const MAX_L: usize = 5;

/// Flip mask over the sides `(i, j, k, l)` for every corner pattern `(a, b, c, d)`.
/// Bit 3 of an index is `a` and bit 0 is `d`; likewise bit 3 of a mask is `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UsTable {
    masks: [u8; 16],
}

const A: u8 = 0b1000;
const B: u8 = 0b0100;
const C: u8 = 0b0010;
const D: u8 = 0b0001;
const I: u8 = 0b1000;
const J: u8 = 0b0100;
const K: u8 = 0b0010;
#[cfg(test)]
const L: u8 = 0b0001;

impl UsTable {
    /// For two set corners, flip the sides met walking clockwise from the
    /// first to the second in the order a, b, c, d; for all four, flip i and k.
    pub fn standard() -> Self {
        let mut masks = [0u8; 16];
        masks[(A | B) as usize] = I;
        masks[(A | C) as usize] = I | J;
        masks[(A | D) as usize] = I | J | K;
        masks[(B | C) as usize] = J;
        masks[(B | D) as usize] = J | K;
        masks[(C | D) as usize] = K;
        masks[(A | B | C | D) as usize] = I | K;
        UsTable { masks }
    }

    pub fn from_masks(masks: [u8; 16]) -> Result<Self> {
        if masks.iter().any(|&m| m > 0xf) {
            return domain("flip masks are 4-bit");
        }
        Ok(UsTable { masks })
    }

    pub fn masks(&self) -> [u8; 16] {
        self.masks
    }

    /// Mask for a corner pattern; odd patterns cannot arise from closed strings.
    pub fn mask(&self, corners: u8) -> Result<u8> {
        if corners.count_ones() % 2 == 1 {
            return Err(Error::Construction(format!("odd corner pattern {corners:04b} reached the square gate")));
        }
        Ok(self.masks[corners as usize & 0xf])
    }

    /// The gate on an 8-bit word: high nibble corners, low nibble sides.
    pub fn apply_local(&self, word: u8) -> u8 {
        word ^ self.masks[(word >> 4) as usize]
    }

    pub fn is_involution(&self) -> bool {
        (0..=255u8).all(|w| self.apply_local(self.apply_local(w)) == w)
    }
}

impl Default for UsTable {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Square {
    /// Vertex-qubit indices of a (NW), b (NE), c (SE), d (SW).
    corners: [usize; 4],
    /// Link indices of i (N), j (E), k (S), l (W).
    sides: [usize; 4],
}

/// Index bookkeeping for the refined L×L torus.
#[derive(Debug, Clone)]
pub struct RefinedLattice {
    l: usize,
    links: QubitIndexMap,
    squares: Vec<Square>,
    /// Plaquettes of the other colour, as corner vertex qubits.
    others: Vec<[usize; 4]>,
}

impl RefinedLattice {
    pub fn new(l: usize) -> Result<Self> {
        if l % 2 == 1 {
            return domain(format!(
                "L = {l}: the squares must tile the links of an L×L torus, which needs L²/2 of them and hence even L"
            ));
        }
        let lat = LatticeSpec::periodic(&[l, l])?;
        let links = QubitIndexMap::new(&lat, 1)?;
        let mut r = RefinedLattice { l, links, squares: Vec::new(), others: Vec::new() };
        for px in 0..l as i64 {
            for py in 0..l as i64 {
                let corners = [r.vertex(px, py + 1), r.vertex(px + 1, py + 1), r.vertex(px + 1, py), r.vertex(px, py)];
                if (px + py) % 2 == 0 {
                    let sides = [
                        r.link(2 * px + 1, 2 * py + 2),
                        r.link(2 * px + 2, 2 * py + 1),
                        r.link(2 * px + 1, 2 * py),
                        r.link(2 * px, 2 * py + 1),
                    ];
                    r.squares.push(Square { corners, sides });
                } else {
                    r.others.push(corners);
                }
            }
        }
        let mut seen = BTreeSet::new();
        if !r.squares.iter().flat_map(|s| s.sides).all(|q| seen.insert(q)) || seen.len() != r.links.len() {
            return Err(Error::Construction("squares do not partition the links".into()));
        }
        Ok(r)
    }

    pub fn size(&self) -> usize {
        self.l
    }

    pub fn n_links(&self) -> usize {
        self.links.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.links.len() + self.l * self.l
    }

    fn wrap(&self, v: i64) -> i64 {
        v.rem_euclid(self.l as i64)
    }

    fn vertex(&self, x: i64, y: i64) -> usize {
        self.links.len() + (self.wrap(x) * self.l as i64 + self.wrap(y)) as usize
    }

    /// Link at doubled coordinates `(x2, y2)`.
    fn link(&self, x2: i64, y2: i64) -> usize {
        let p = 2 * self.l as i64;
        let c = CubeCoord::new(vec![x2.rem_euclid(p), y2.rem_euclid(p)]);
        self.links.index_of(&c).expect("link on the torus")
    }

    /// `(up, down, left, right)` links of a vertex.
    fn legs(&self, x: i64, y: i64) -> [usize; 4] {
        [
            self.link(2 * x, 2 * y + 1),
            self.link(2 * x, 2 * y - 1),
            self.link(2 * x - 1, 2 * y),
            self.link(2 * x + 1, 2 * y),
        ]
    }

    /// Sublattice A (x + y odd) pairs the vertex qubit with up and left,
    /// sublattice B with up and right.
    fn is_a(x: i64, y: i64) -> bool {
        (x + y) % 2 == 1
    }

    fn vertices(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let l = self.l as i64;
        (0..l).flat_map(move |x| (0..l).map(move |y| (x, y)))
    }

    /// Both trivalent constraints at every split vertex.
    pub fn check_refined_constraints(&self, config: &BitVec) -> bool {
        self.vertices().all(|(x, y)| {
            let [up, down, left, right] = self.legs(x, y).map(|q| config.get(q));
            let e = config.get(self.vertex(x, y));
            let (first, second) = if Self::is_a(x, y) { (up ^ left, down ^ right) } else { (up ^ right, down ^ left) };
            first == e && second == e
        })
    }
}

/// Ground configurations of the toric code on an L×L torus, in link order.
pub fn toric_ground_configs(l: usize, limits: &Limits) -> Result<Vec<BitVec>> {
    if l > MAX_L {
        return Err(Error::Resource(format!("L = {l} exceeds the enumeration limit of {MAX_L}")));
    }
    let model = build_model(ModelSpec::new(0, 1, 2, 2)?, &LatticeSpec::periodic(&[l, l])?)?;
    enumerate_configs(&config_group(&model), limits)
}

/// Appends the vertex qubits and applies the two CNOTs feeding each one.
pub fn add_sublattice_qubits_and_u1(configs: &[BitVec], lattice: &RefinedLattice) -> Result<Vec<BitVec>> {
    let n_links = lattice.n_links();
    if let Some(c) = configs.iter().find(|c| c.len() != n_links) {
        return domain(format!("configuration of length {} on {} links", c.len(), n_links));
    }
    Ok(configs
        .par_iter()
        .map(|c| {
            let mut out = c.concat(&BitVec::zeros(lattice.l * lattice.l));
            for (x, y) in lattice.vertices() {
                let [up, _, left, right] = lattice.legs(x, y);
                let other = if RefinedLattice::is_a(x, y) { left } else { right };
                if c.get(up) ^ c.get(other) {
                    out.flip(lattice.vertex(x, y));
                }
            }
            out
        })
        .collect())
}

/// The square gate on every square of every configuration.
pub fn apply_u2(configs: &[BitVec], lattice: &RefinedLattice, table: &UsTable) -> Result<Vec<BitVec>> {
    configs
        .par_iter()
        .map(|c| {
            if c.len() != lattice.n_qubits() {
                return domain(format!("configuration of length {} on {} refined qubits", c.len(), lattice.n_qubits()));
            }
            let mut out = c.clone();
            for s in &lattice.squares {
                let corners = s.corners.iter().fold(0u8, |acc, &q| (acc << 1) | c.get(q) as u8);
                let mask = table.mask(corners)?;
                for (bit, &q) in s.sides.iter().enumerate() {
                    if mask & (0b1000 >> bit) != 0 {
                        out.flip(q);
                    }
                }
            }
            Ok(out)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[allow(non_snake_case)]
pub struct CoarseReport {
    pub L: usize,
    pub n_configs: usize,
    pub ghz_ok: bool,
    pub coarse_equal_ok: bool,
    pub us_involution_ok: bool,
    pub refined_constraints_ok: bool,
    /// Configurations with some square not in 0000 or 1111.
    pub ghz_failures: usize,
    pub coarse_group_dim: usize,
}

impl CoarseReport {
    pub fn all_ok(&self) -> bool {
        self.ghz_ok && self.coarse_equal_ok && self.us_involution_ok && self.refined_constraints_ok
    }
}

/// Checks that every square reads 0000 or 1111, and that the diagonal bits
/// form exactly the ground configuration set of the rotated toric code.
pub fn verify_coarse_structure(configs: &[BitVec], lattice: &RefinedLattice) -> Result<(bool, bool, usize, usize)> {
    let n_diag = lattice.l * lattice.l;
    let first_vertex = lattice.n_links();
    let ghz_failures = configs
        .par_iter()
        .filter(|c| {
            lattice.squares.iter().any(|s| {
                let ones = s.sides.iter().filter(|&&q| c.get(q)).count();
                ones != 0 && ones != 4
            })
        })
        .count();

    let patterns: Vec<BitVec> =
        lattice.others.iter().map(|p| BitVec::from_indices(n_diag, p.iter().map(|&q| q - first_vertex))).collect();
    let span = BitMatrix::from_rows(n_diag, &patterns).rref();
    let projected: BTreeSet<BitVec> = configs.iter().map(|c| c.slice(first_vertex, n_diag)).collect();
    let inside = projected.iter().all(|v| reduce_against(v, &span).is_zero());
    let coarse_b_ok = projected.iter().all(|v| {
        lattice.squares.iter().all(|s| s.corners.iter().filter(|&&q| v.get(q - first_vertex)).count() % 2 == 0)
    });
    let full = span.rows() < 64 && projected.len() as u64 == 1u64 << span.rows();
    Ok((ghz_failures == 0, inside && full && coarse_b_ok, ghz_failures, span.rows()))
}

/// Enumerate, refine, apply the square gates, and check the result.
pub fn run_coarse_pipeline(l: usize, limits: &Limits, table: &UsTable) -> Result<CoarseReport> {
    if l > MAX_L {
        return Err(Error::Resource(format!("L = {l} exceeds the enumeration limit of {MAX_L}")));
    }
    let lattice = RefinedLattice::new(l)?;
    let ground = toric_ground_configs(l, limits)?;
    let refined = add_sublattice_qubits_and_u1(&ground, &lattice)?;
    let refined_constraints_ok = refined.par_iter().all(|c| lattice.check_refined_constraints(c));
    let shrunk = apply_u2(&refined, &lattice, table)?;
    let (ghz_ok, coarse_equal_ok, ghz_failures, coarse_group_dim) = verify_coarse_structure(&shrunk, &lattice)?;
    Ok(CoarseReport {
        L: l,
        n_configs: shrunk.len(),
        ghz_ok,
        coarse_equal_ok,
        us_involution_ok: table.is_involution(),
        refined_constraints_ok,
        ghz_failures,
        coarse_group_dim,
    })
}
