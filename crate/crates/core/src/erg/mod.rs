//! One renormalization step along a chosen axis: cut the lattice, duplicate
//! the cut qubits, insert a lower-dimensional copy of the model, and undo the
//! seam with a single layer of CNOTs.
//!
//! Coordinates on the enlarged lattice are tracked by their *layer*, the
//! doubled distance above the base plane just below the cut:
//!
//! | layer | content                                          |
//! |-------|--------------------------------------------------|
//! | 0     | last untouched plane of the source lattice        |
//! | 1     | the cut qubits                                    |
//! | 2     | the inserted lower-dimensional model (controls)   |
//! | 3     | duplicates of the cut qubits                      |
//! | ≥ 4   | the rest of the source lattice, shifted up by one |

mod circuits;
mod classify;

pub use circuits::{
    build_circuit, build_circuit_general, build_circuit_paper, validate_circuit_conditions, CircuitReport,
};
pub use classify::{check_mapping_claims, classify_term, MappingReport, TermClass};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::gf2::{row_space_equal, BitVec};
use crate::lattice::{Boundary, CubeCoord, LatticeSpec, QubitIndexMap};
use crate::models::{
    a_support, b_terms, build_model, log2_gsd, op_on, Generator, GeneratorTag, ModelSpec, StabilizerModel,
};
use crate::pauli::{circuit_conjugate, conjugate_group, symplectic_matrix, CnotCircuit, PauliString};
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitSource {
    Paper,
    General,
}

impl fmt::Display for CircuitSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CircuitSource::Paper => "paper",
            CircuitSource::General => "general",
        })
    }
}

impl FromStr for CircuitSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(CircuitSource::Paper),
            "general" => Ok(CircuitSource::General),
            other => Err(Error::Parse { pos: 0, msg: format!("expected 'paper' or 'general', found '{other}'") }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErgPlan {
    pub spec: ModelSpec,
    /// Source sizes.
    pub dims: Vec<usize>,
    /// Grown axis, 0-based.
    pub axis: usize,
    /// Doubled coordinate of the cut on the source lattice; must be odd.
    pub cut_x2: i64,
    pub circuit: CircuitSource,
}

impl ErgPlan {
    /// Plan growing the last axis, cut at the first half-integer plane.
    pub fn new(spec: ModelSpec, dims: &[usize], circuit: CircuitSource) -> Result<Self> {
        let plan = ErgPlan { spec, dims: dims.to_vec(), axis: spec.dim.saturating_sub(1), cut_x2: 1, circuit };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_axis(mut self, axis: usize) -> Result<Self> {
        self.axis = axis;
        self.validate()?;
        Ok(self)
    }

    pub fn with_cut(mut self, cut_x2: i64) -> Result<Self> {
        self.cut_x2 = cut_x2;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.spec.is_erg_form() {
            return domain(format!("{} is not of the form [d,d+1,d+2,D]", self.spec));
        }
        if self.dims.len() != self.spec.dim {
            return domain(format!("{} needs {} sizes, got {}", self.spec, self.spec.dim, self.dims.len()));
        }
        LatticeSpec::periodic(&self.dims)?;
        if self.axis >= self.spec.dim {
            return domain(format!("axis {} outside 1..={}", self.axis + 1, self.spec.dim));
        }
        let period = 2 * self.dims[self.axis] as i64;
        if self.cut_x2.rem_euclid(2) != 1 || self.cut_x2 <= 0 || self.cut_x2 >= period {
            return domain(format!(
                "cut position {} must be an odd doubled coordinate inside (0, {period})",
                self.cut_x2
            ));
        }
        Ok(())
    }

    pub fn enlarged_dims(&self) -> Vec<usize> {
        let mut d = self.dims.clone();
        d[self.axis] += 1;
        d
    }

    pub fn transverse_dims(&self) -> Vec<usize> {
        self.dims.iter().enumerate().filter(|(i, _)| *i != self.axis).map(|(_, &l)| l).collect()
    }

    /// Level-0 steps insert a product state instead of a lower model.
    pub fn is_product_insertion(&self) -> bool {
        self.spec.is_toric()
    }
}

/// D − d − 2.
pub fn erg_level(spec: &ModelSpec) -> Result<usize> {
    if !spec.is_erg_form() {
        return domain(format!("{spec} is not of the form [d,d+1,d+2,D]"));
    }
    Ok(spec.dim - spec.dn - 2)
}

/// Geometry shared by every stage of a plan.
#[derive(Debug, Clone)]
pub struct ErgContext {
    pub plan: ErgPlan,
    pub source: LatticeSpec,
    pub enlarged: LatticeSpec,
    /// Qubits of the enlarged lattice.
    pub qubits: QubitIndexMap,
    base: i64,
}

impl ErgContext {
    pub fn new(plan: &ErgPlan) -> Result<Self> {
        plan.validate()?;
        let source = LatticeSpec::new(plan.dims.clone(), Boundary::Periodic)?;
        let enlarged = LatticeSpec::new(plan.enlarged_dims(), Boundary::Periodic)?;
        let qubits = QubitIndexMap::new(&enlarged, plan.spec.ds)?;
        Ok(ErgContext { plan: plan.clone(), source, enlarged, qubits, base: plan.cut_x2 - 1 })
    }

    pub fn axis(&self) -> usize {
        self.plan.axis
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    /// Layer of an enlarged-lattice cube, in `0..2L'`.
    pub fn layer(&self, c: &CubeCoord) -> i64 {
        let p = 2 * self.enlarged.dims()[self.axis()] as i64;
        (c.get(self.axis()) - self.base).rem_euclid(p)
    }

    /// `c` moved to the given layer.
    pub fn at_layer(&self, c: &CubeCoord, layer: i64) -> CubeCoord {
        self.norm(&c.with(self.axis(), self.base + layer))
    }

    /// `c` shifted by `delta` (doubled) along the grown axis.
    pub fn up(&self, c: &CubeCoord, delta: i64) -> CubeCoord {
        self.norm(&c.shifted(self.axis(), delta))
    }

    pub fn norm(&self, c: &CubeCoord) -> CubeCoord {
        self.enlarged.normalize(c).expect("periodic lattice")
    }

    /// Source cube → enlarged cube. Layers 0 and 1 stay put, everything from
    /// the source layer 2 upward moves up by one lattice unit.
    pub fn embed(&self, c: &CubeCoord) -> CubeCoord {
        let a = self.axis();
        let p = 2 * self.plan.dims[a] as i64;
        let rel = (c.get(a) - self.base).rem_euclid(p);
        let new = if rel <= 1 { self.base + rel } else { self.base + rel + 2 };
        self.norm(&c.with(a, new))
    }

    /// Transverse-lattice cube → enlarged cube at layer 2.
    pub fn lift(&self, t: &CubeCoord) -> CubeCoord {
        let mut v = t.coords().to_vec();
        v.insert(self.axis(), self.base + 2);
        self.norm(&CubeCoord::new(v))
    }

    pub fn index(&self, c: &CubeCoord) -> usize {
        self.qubits.index_of(c).unwrap_or_else(|| panic!("{c} is not a qubit of the enlarged lattice"))
    }

    pub fn qubits_at_layer(&self, layer: i64) -> Vec<usize> {
        (0..self.n_qubits()).filter(|&i| self.layer(self.qubits.cube(i)) == layer).collect()
    }

    /// Qubits with the grown axis extended, one per cut position (layer 1).
    pub fn cut_qubits(&self) -> Vec<usize> {
        self.qubits_at_layer(1)
    }

    fn full_a(&self, cube: &CubeCoord) -> Result<PauliString> {
        op_on(&self.qubits, &a_support(&self.enlarged, &self.plan.spec, cube)?, true)
    }

    /// Re-expresses a string over `from` qubits on the enlarged lattice.
    fn transport(&self, p: &PauliString, from: &QubitIndexMap, map: impl Fn(&CubeCoord) -> CubeCoord) -> PauliString {
        let n = self.n_qubits();
        let relabel = |bits: &BitVec| BitVec::from_indices(n, bits.ones().map(|i| self.index(&map(from.cube(i)))));
        PauliString::new(relabel(p.x_bits()), relabel(p.z_bits()))
    }

    /// Generators of the inserted state, already placed at layer 2.
    pub fn inserted_generators(&self) -> Result<Vec<Generator>> {
        if self.plan.is_product_insertion() {
            return Ok(self
                .qubits_at_layer(2)
                .into_iter()
                .map(|q| Generator {
                    tag: GeneratorTag::InsertedX(self.qubits.cube(q).clone()),
                    op: PauliString::pure_x(self.n_qubits(), [q]),
                })
                .collect());
        }
        let lower = build_model(self.plan.spec.inserted()?, &LatticeSpec::periodic(&self.plan.transverse_dims())?)?;
        Ok(lower
            .generators
            .iter()
            .map(|g| {
                let tag = match &g.tag {
                    GeneratorTag::A(c) => GeneratorTag::InsertedA(self.lift(c)),
                    GeneratorTag::B { anchor, axes } => GeneratorTag::InsertedB {
                        anchor: self.lift(anchor),
                        axes: axes.iter().map(|&x| if x >= self.axis() { x + 1 } else { x }).collect(),
                    },
                    other => unreachable!("plain model has no {} generators", other.kind()),
                };
                Generator { tag, op: self.transport(&g.op, &lower.qubits, |c| self.lift(c)) }
            })
            .collect())
    }
}

/// H1 assembled from enlarged-lattice terms: A terms away from the cut,
/// modified A′ at the cut, B terms off the inserted plane and the duplicates,
/// the inserted model, and the ZZ pairs.
pub fn build_h1(plan: &ErgPlan) -> Result<StabilizerModel> {
    let ctx = ErgContext::new(plan)?;
    build_h1_in(&ctx)
}

pub fn build_h1_in(ctx: &ErgContext) -> Result<StabilizerModel> {
    let spec = ctx.plan.spec;
    let lat = &ctx.enlarged;
    let n = ctx.n_qubits();
    let mut generators = Vec::new();
    for cube in lat.enumerate_cubes(spec.dim)? {
        match ctx.layer(&cube) {
            1 => {
                let op = ctx.full_a(&cube)?.multiply(&ctx.full_a(&ctx.up(&cube, 2))?)?;
                generators.push(Generator { tag: GeneratorTag::ModifiedA(cube), op });
            }
            3 => {}
            _ => {
                let op = ctx.full_a(&cube)?;
                generators.push(Generator { tag: GeneratorTag::A(cube), op });
            }
        }
    }
    for (anchor, axes, support) in b_terms(lat, &spec)? {
        if matches!(ctx.layer(&anchor), 2 | 3) {
            continue;
        }
        let op = op_on(&ctx.qubits, &support, false)?;
        generators.push(Generator { tag: GeneratorTag::B { anchor, axes }, op });
    }
    generators.extend(ctx.inserted_generators()?);
    for q in ctx.cut_qubits() {
        let c = ctx.qubits.cube(q);
        let op = PauliString::pure_z(n, [q, ctx.index(&ctx.up(c, 2))]);
        generators.push(Generator { tag: GeneratorTag::ZZ(c.clone()), op });
    }
    Ok(StabilizerModel { lattice: lat.clone(), spec, dual: false, qubits: ctx.qubits.clone(), generators })
}

/// CNOTs copying each cut qubit onto its fresh duplicate one unit up.
pub fn duplication_circuit(ctx: &ErgContext) -> Result<CnotCircuit> {
    CnotCircuit::from_pairs(ctx.cut_qubits().into_iter().map(|q| (q, ctx.index(&ctx.up(ctx.qubits.cube(q), 2)))))
}

/// H1 the long way round: embed the source model, pin every duplicate to
/// |0⟩ with a Z, add the inserted model, and apply the duplication CNOTs.
pub fn build_h1_by_duplication(ctx: &ErgContext) -> Result<Vec<PauliString>> {
    let source = build_model(ctx.plan.spec, &ctx.source)?;
    let mut group: Vec<PauliString> =
        source.generators.iter().map(|g| ctx.transport(&g.op, &source.qubits, |c| ctx.embed(c))).collect();
    group.extend(ctx.qubits_at_layer(3).into_iter().map(|q| PauliString::pure_z(ctx.n_qubits(), [q])));
    group.extend(ctx.inserted_generators()?.into_iter().map(|g| g.op));
    Ok(conjugate_group(&duplication_circuit(ctx)?, &group))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedPointReport {
    pub spec: String,
    pub dims_from: Vec<usize>,
    pub dims_to: Vec<usize>,
    /// 1-based.
    pub axis: usize,
    pub circuit_source: CircuitSource,
    pub n_gates: usize,
    pub h1_rank: usize,
    pub h2_rank: usize,
    pub h3_rank: usize,
    pub equal: bool,
    pub gsd_from: usize,
    pub gsd_to: usize,
    pub inserted_gsd: usize,
    pub recursion_ok: bool,
    pub h1_commuting: bool,
    pub h1_matches_duplication: bool,
    pub circuit_conditions_ok: bool,
}

impl FixedPointReport {
    pub fn all_ok(&self) -> bool {
        self.equal
            && self.recursion_ok
            && self.h1_commuting
            && self.h1_matches_duplication
            && self.circuit_conditions_ok
            && self.h1_rank == self.h2_rank
    }
}

/// H2 = U·H1·U† compared with H3, the model built directly on the enlarged
/// lattice, as row spaces over the joint X‖Z columns.
pub fn verify_fixed_point(plan: &ErgPlan, limits: &Limits) -> Result<FixedPointReport> {
    limits.check_qubits(plan.spec.qubit_count(&plan.enlarged_dims()))?;
    let ctx = ErgContext::new(plan)?;
    let n = ctx.n_qubits();
    let h1 = build_h1_in(&ctx)?;
    let circuit = build_circuit(&ctx)?;
    let conditions = validate_circuit_conditions(&circuit, &ctx)?;
    let h1_ops = h1.ops();
    let h2_ops = conjugate_group(&circuit, &h1_ops);
    let h3 = build_model(plan.spec, &ctx.enlarged)?;

    let m1 = symplectic_matrix(n, &h1_ops);
    let m2 = symplectic_matrix(n, &h2_ops);
    let m3 = h3.symplectic();
    let route = symplectic_matrix(n, &build_h1_by_duplication(&ctx)?);
    let h1_commuting = h1_ops.par_iter().enumerate().all(|(i, p)| h1_ops[i + 1..].iter().all(|q| p.commutes(q)));

    let recursion = gsd_recursion_check(plan.spec, &plan.dims, plan.axis, limits)?;
    Ok(FixedPointReport {
        spec: plan.spec.to_string(),
        dims_from: plan.dims.clone(),
        dims_to: plan.enlarged_dims(),
        axis: plan.axis + 1,
        circuit_source: plan.circuit,
        n_gates: circuit.len(),
        h1_rank: m1.rank(),
        h2_rank: m2.rank(),
        h3_rank: m3.rank(),
        equal: row_space_equal(&m2, &m3)?,
        gsd_from: recursion.gsd_from,
        gsd_to: recursion.gsd_to,
        inserted_gsd: recursion.inserted_gsd,
        recursion_ok: recursion.ok,
        h1_commuting,
        h1_matches_duplication: row_space_equal(&m1, &route)?,
        circuit_conditions_ok: conditions.all_ok(),
    })
}

/// H2 generators, for reporting.
pub fn build_h2(ctx: &ErgContext) -> Result<Vec<PauliString>> {
    let h1 = build_h1_in(ctx)?;
    let circuit = build_circuit(ctx)?;
    Ok(h1.generators.iter().map(|g| circuit_conjugate(&circuit, &g.op)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecursionReport {
    pub gsd_from: usize,
    pub gsd_to: usize,
    pub inserted_gsd: usize,
    pub ok: bool,
}

/// log₂GSD grows by exactly the inserted model's log₂GSD (zero for a
/// product-state insertion) when the grown axis gains one unit.
pub fn gsd_recursion_check(spec: ModelSpec, dims: &[usize], axis: usize, limits: &Limits) -> Result<RecursionReport> {
    let plan = ErgPlan { spec, dims: dims.to_vec(), axis, cut_x2: 1, circuit: CircuitSource::General };
    plan.validate()?;
    limits.check_qubits(spec.qubit_count(&plan.enlarged_dims()))?;
    let gsd_from = log2_gsd(&build_model(spec, &LatticeSpec::periodic(dims)?)?);
    let gsd_to = log2_gsd(&build_model(spec, &LatticeSpec::periodic(&plan.enlarged_dims())?)?);
    let inserted_gsd = if plan.is_product_insertion() {
        0
    } else {
        log2_gsd(&build_model(spec.inserted()?, &LatticeSpec::periodic(&plan.transverse_dims())?)?)
    };
    Ok(RecursionReport { gsd_from, gsd_to, inserted_gsd, ok: gsd_to == gsd_from + inserted_gsd })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> ModelSpec {
        s.parse().unwrap()
    }

    #[test]
    fn levels() {
        assert_eq!(erg_level(&spec("[0,1,2,2]")).unwrap(), 0);
        assert_eq!(erg_level(&spec("[0,1,2,3]")).unwrap(), 1);
        assert_eq!(erg_level(&spec("[0,1,2,4]")).unwrap(), 2);
        assert_eq!(erg_level(&spec("[1,2,3,4]")).unwrap(), 1);
        assert!(erg_level(&spec("[0,1,3,4]")).is_err());
    }

    #[test]
    fn plan_validation() {
        let s = spec("[0,1,2,3]");
        assert!(ErgPlan::new(s, &[2, 2], CircuitSource::Paper).is_err());
        let p = ErgPlan::new(s, &[2, 2, 2], CircuitSource::Paper).unwrap();
        assert!(p.clone().with_cut(2).is_err());
        assert!(p.clone().with_cut(3).is_ok());
        assert!(p.clone().with_axis(3).is_err());
        assert_eq!(p.enlarged_dims(), vec![2, 2, 3]);
    }

    #[test]
    fn embedding_skips_two_layers() {
        let p = ErgPlan::new(spec("[0,1,2,3]"), &[2, 2, 2], CircuitSource::Paper).unwrap();
        let ctx = ErgContext::new(&p).unwrap();
        let layers: Vec<i64> = (0..4).map(|z| ctx.layer(&ctx.embed(&CubeCoord::new(vec![0, 0, z])))).collect();
        assert_eq!(layers, vec![0, 1, 4, 5]);
        let n_src = p.spec.qubit_count(&p.dims);
        assert_eq!(ctx.n_qubits(), n_src + ctx.qubits_at_layer(2).len() + ctx.qubits_at_layer(3).len());
    }

    #[test]
    fn modified_a_is_product_across_the_cut() {
        let p = ErgPlan::new(spec("[0,1,2,4]"), &[2, 2, 2, 2], CircuitSource::Paper).unwrap();
        let ctx = ErgContext::new(&p).unwrap();
        let h1 = build_h1_in(&ctx).unwrap();
        let g = CubeCoord::new(vec![1, 1, 1, 1]);
        let m = h1.generators.iter().find(|x| x.tag == GeneratorTag::ModifiedA(g.clone())).unwrap();
        let want = ctx.full_a(&g).unwrap().multiply(&ctx.full_a(&CubeCoord::new(vec![1, 1, 1, 3])).unwrap()).unwrap();
        assert_eq!(m.op, want);
        assert_eq!(m.op.weight(), 2 * 32 - 2 * 12);
    }

    #[test]
    fn h1_agrees_with_duplication_route() {
        for (s, dims) in [("[0,1,2,2]", vec![3, 3]), ("[0,1,2,3]", vec![2, 2, 2]), ("[1,2,3,4]", vec![2, 2, 2, 2])] {
            let p = ErgPlan::new(spec(s), &dims, CircuitSource::General).unwrap();
            let ctx = ErgContext::new(&p).unwrap();
            let h1 = build_h1_in(&ctx).unwrap();
            let route = symplectic_matrix(ctx.n_qubits(), &build_h1_by_duplication(&ctx).unwrap());
            assert!(row_space_equal(&h1.symplectic(), &route).unwrap(), "{s}");
            assert_eq!(h1.first_anticommuting_pair(), None, "{s}");
        }
    }

    #[test]
    fn xcube_fixed_point_small() {
        let p = ErgPlan::new(spec("[0,1,2,3]"), &[2, 2, 2], CircuitSource::Paper).unwrap();
        let r = verify_fixed_point(&p, &Limits::default()).unwrap();
        assert!(r.all_ok(), "{r:?}");
        assert_eq!((r.gsd_from, r.gsd_to, r.inserted_gsd), (9, 11, 2));
    }

    #[test]
    fn recursion_increments() {
        let l = Limits::default();
        assert_eq!(gsd_recursion_check(spec("[0,1,2,3]"), &[2, 2, 2], 2, &l).unwrap().inserted_gsd, 2);
        assert_eq!(gsd_recursion_check(spec("[1,2,3,4]"), &[2, 2, 2, 2], 3, &l).unwrap().inserted_gsd, 3);
        let r = gsd_recursion_check(spec("[0,1,2,4]"), &[2, 2, 2, 2], 3, &l).unwrap();
        assert_eq!(r.inserted_gsd, 9);
        assert!(r.ok);
    }
}
