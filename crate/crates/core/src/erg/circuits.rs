//! The CNOT layer of a renormalization step, either from hand-written gate
//! tables for the four worked models or from a generic rule, plus a checker
//! for the structural conditions any such layer must meet.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::Serialize;

use super::{CircuitSource, ErgContext};
use crate::error::{domain, Error, Result};
use crate::lattice::CubeCoord;
use crate::models::ModelSpec;
use crate::pauli::CnotCircuit;

/// Gate lists of a reference D-cube. Vertices are named by letters; a qubit is
/// the cube spanned by the listed vertices.
type CellTable = &'static [(&'static str, &'static [&'static str])];

const TORIC_2D: CellTable = &[("ab", &["bc", "cd", "da"])];

const XCUBE_3D: CellTable =
    &[("bc", &["bf", "cg", "fg"]), ("ad", &["ae", "dh", "eh"]), ("ab", &["ef"]), ("dc", &["hg"])];

const FRACTON_0124: CellTable = &[
    ("fg", &["fn", "no", "og"]),
    ("bc", &["bj", "jk", "kc"]),
    ("ad", &["ai", "il", "ld"]),
    ("eh", &["em", "mp", "ph"]),
    ("ef", &["mn"]),
    ("ab", &["ij"]),
    ("dc", &["lk"]),
    ("hg", &["po"]),
    ("cg", &["ko"]),
    ("bf", &["jn"]),
    ("ae", &["im"]),
    ("dh", &["lp"]),
];

const FRACTON_1234: CellTable = &[
    ("abcd", &["ijkl", "abji", "bckj", "cdlk", "dail"]),
    ("efgh", &["mnop", "efnm", "fgon", "ghpo", "hemp"]),
    ("abfe", &["ijnm", "aemi", "bfnj"]),
    ("cdhg", &["klpo", "dhpl", "cgok"]),
    ("bcgf", &["jkon"]),
    ("daeh", &["limp"]),
];

/// Vertex of the reference cube named by `c`; the last local axis is the grown
/// one, with 1 on the inserted plane and 0 below the cut.
fn vertex(dim: usize, c: char) -> Result<Vec<i64>> {
    let cube3 = |c: char| -> Option<[i64; 3]> {
        Some(match c {
            'e' => [0, 0, 0],
            'a' => [0, 0, 1],
            'b' => [1, 0, 1],
            'c' => [1, 1, 1],
            'd' => [0, 1, 1],
            'f' => [1, 0, 0],
            'g' => [1, 1, 0],
            'h' => [0, 1, 0],
            _ => return None,
        })
    };
    let v = match dim {
        2 => match c {
            'd' => Some(vec![0, 0]),
            'c' => Some(vec![1, 0]),
            'a' => Some(vec![0, 1]),
            'b' => Some(vec![1, 1]),
            _ => None,
        },
        3 => cube3(c).map(|v| v.to_vec()),
        4 => {
            let (upper, lower) = (cube3(c), ('i'..='p').position(|x| x == c));
            match (upper, lower) {
                (Some(v), _) => Some(vec![v[0], v[1], v[2], 1]),
                (None, Some(i)) => cube3("abcdefgh".chars().nth(i).unwrap()).map(|v| vec![v[0], v[1], v[2], 0]),
                _ => None,
            }
        }
        _ => None,
    };
    v.ok_or_else(|| Error::Construction(format!("no vertex '{c}' in a {dim}-cube")))
}

/// Doubled local coordinates of the cube spanned by the named vertices.
fn local_cube(dim: usize, name: &str) -> Result<Vec<i64>> {
    let verts: Vec<Vec<i64>> = name.chars().map(|c| vertex(dim, c)).collect::<Result<_>>()?;
    let k = verts.len() as i64;
    Ok((0..dim).map(|i| 2 * verts.iter().map(|v| v[i]).sum::<i64>() / k).collect())
}

fn tabulated_cells(spec: &ModelSpec) -> Option<CellTable> {
    match (spec.dn, spec.dim) {
        (0, 2) if spec.is_erg_form() => Some(TORIC_2D),
        (0, 3) if spec.is_erg_form() => Some(XCUBE_3D),
        (0, 4) if spec.is_erg_form() => Some(FRACTON_0124),
        (1, 4) if spec.is_erg_form() => Some(FRACTON_1234),
        _ => None,
    }
}

/// Transverse translations of the reference cell, as doubled offsets.
fn cell_origins(ctx: &ErgContext) -> Vec<Vec<i64>> {
    let a = ctx.axis();
    ctx.plan
        .dims
        .iter()
        .enumerate()
        .map(|(i, &l)| if i == a { vec![0] } else { (0..l as i64).map(|x| 2 * x).collect() })
        .multi_cartesian_product()
        .collect()
}

/// Local cell coordinates → enlarged-lattice cube. Local axes list the
/// transverse axes in order, then the grown axis.
fn place(ctx: &ErgContext, origin: &[i64], local: &[i64]) -> CubeCoord {
    let a = ctx.axis();
    let transverse: Vec<usize> = (0..origin.len()).filter(|&i| i != a).collect();
    let mut v = origin.to_vec();
    for (k, &ax) in transverse.iter().enumerate() {
        v[ax] += local[k];
    }
    v[a] = ctx.base + local[local.len() - 1];
    ctx.norm(&CubeCoord::new(v))
}

fn circuit_from_pairs(ctx: &ErgContext, pairs: BTreeSet<(CubeCoord, CubeCoord)>) -> Result<CnotCircuit> {
    let gates: BTreeSet<(usize, usize)> = pairs.iter().map(|(c, t)| (ctx.index(c), ctx.index(t))).collect();
    CnotCircuit::from_pairs(gates)
}

/// The worked-example circuits, replicated over every transverse cell. Gates
/// shared by neighbouring cells appear once.
pub fn build_circuit_paper(ctx: &ErgContext) -> Result<CnotCircuit> {
    let spec = ctx.plan.spec;
    let Some(table) = tabulated_cells(&spec) else {
        return domain(format!("no tabulated circuit for {spec}"));
    };
    let dim = spec.dim;
    let mut pairs = BTreeSet::new();
    for origin in cell_origins(ctx) {
        for (control, targets) in table {
            let c = place(ctx, &origin, &local_cube(dim, control)?);
            for t in targets.iter() {
                pairs.insert((c.clone(), place(ctx, &origin, &local_cube(dim, t)?)));
            }
        }
    }
    circuit_from_pairs(ctx, pairs)
}

/// Generic layer: each qubit below the cut is controlled by its partner on the
/// inserted plane, and each cut qubit by the two inserted-plane qubits obtained
/// by stepping ±½ along the lowest transverse axis it does not already span.
pub fn build_circuit_general(ctx: &ErgContext) -> Result<CnotCircuit> {
    let spec = ctx.plan.spec;
    if !spec.is_erg_form() {
        return domain(format!("{spec} is not of the form [d,d+1,d+2,D]"));
    }
    let a = ctx.axis();
    let mut pairs = BTreeSet::new();
    for q in ctx.qubits_at_layer(0) {
        let t = ctx.qubits.cube(q).clone();
        pairs.insert((ctx.up(&t, 2), t));
    }
    for q in ctx.cut_qubits() {
        let t = ctx.qubits.cube(q).clone();
        let k = (0..spec.dim)
            .find(|&i| i != a && !t.is_half(i))
            .ok_or_else(|| Error::Construction(format!("cut qubit {t} spans every transverse axis")))?;
        let lifted = ctx.up(&t, 1);
        for s in [-1, 1] {
            pairs.insert((ctx.norm(&lifted.shifted(k, s)), t.clone()));
        }
    }
    circuit_from_pairs(ctx, pairs)
}

pub fn build_circuit(ctx: &ErgContext) -> Result<CnotCircuit> {
    match ctx.plan.circuit {
        CircuitSource::Paper => build_circuit_paper(ctx),
        CircuitSource::General => build_circuit_general(ctx),
    }
}

/// One structural condition and the gates or qubits that violate it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub name: &'static str,
    pub ok: bool,
    pub offenders: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircuitReport {
    pub n_gates: usize,
    pub conditions: Vec<ConditionResult>,
}

impl CircuitReport {
    pub fn all_ok(&self) -> bool {
        self.conditions.iter().all(|c| c.ok)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

const MAX_OFFENDERS: usize = 20;

fn condition(name: &'static str, offenders: Vec<String>) -> ConditionResult {
    let ok = offenders.is_empty();
    ConditionResult { name, ok, offenders: offenders.into_iter().take(MAX_OFFENDERS).collect() }
}

/// Checks the conditions any valid layer must satisfy:
/// controls sit on the inserted plane and targets at or below the cut, each
/// gate fits inside one cut D-cube, the gate set is translation invariant,
/// each qubit below the cut is controlled exactly by its partner above, each
/// cut qubit has exactly one control per cut D-cube containing it, parallel
/// neighbours share the linking control or both avoid it, and every cut qubit
/// has two controls overall.
pub fn validate_circuit_conditions(circuit: &CnotCircuit, ctx: &ErgContext) -> Result<CircuitReport> {
    let spec = ctx.plan.spec;
    let a = ctx.axis();
    let dim = spec.dim;
    let n = ctx.n_qubits();
    if circuit.max_qubit().is_some_and(|m| m >= n) {
        return domain("circuit addresses qubits beyond the enlarged lattice");
    }
    let cube = |i: usize| ctx.qubits.cube(i).clone();
    let gates: BTreeSet<(CubeCoord, CubeCoord)> =
        circuit.gates().iter().map(|g| (cube(g.control), cube(g.target))).collect();
    let mut controls: BTreeMap<CubeCoord, BTreeSet<CubeCoord>> = BTreeMap::new();
    for (c, t) in &gates {
        controls.entry(t.clone()).or_default().insert(c.clone());
    }
    let show = |c: &CubeCoord, t: &CubeCoord| format!("{c}->{t}");

    let mut placement = Vec::new();
    for (c, t) in &gates {
        let in_cell = ctx
            .enlarged
            .nearest_cubes(t, dim)?
            .into_iter()
            .filter(|g| ctx.layer(g) == 1)
            .any(|g| ctx.enlarged.nearest_cubes(&g, spec.ds).map(|f| f.contains(c)).unwrap_or(false));
        if ctx.layer(c) != 2 || !matches!(ctx.layer(t), 0 | 1) || !in_cell {
            placement.push(show(c, t));
        }
    }

    let mut translation = Vec::new();
    for ax in (0..dim).filter(|&i| i != a) {
        for (c, t) in &gates {
            let moved = (ctx.norm(&c.shifted(ax, 2)), ctx.norm(&t.shifted(ax, 2)));
            if !gates.contains(&moved) {
                translation.push(format!("{} has no image under a shift along axis {}", show(c, t), ax + 1));
            }
        }
    }

    let mut below = Vec::new();
    for q in ctx.qubits_at_layer(0) {
        let t = cube(q);
        let want: BTreeSet<CubeCoord> = [ctx.up(&t, 2)].into();
        if controls.get(&t) != Some(&want) {
            below.push(format!("{t}"));
        }
    }

    let mut per_cell = Vec::new();
    let mut two_controls = Vec::new();
    let mut parallel = Vec::new();
    let empty = BTreeSet::new();
    for q in ctx.cut_qubits() {
        let t = cube(q);
        let ctl = controls.get(&t).unwrap_or(&empty);
        if ctl.len() != 2 {
            two_controls.push(format!("{t} has {} controls", ctl.len()));
        }
        for g in ctx.enlarged.nearest_cubes(&t, dim)? {
            let faces = ctx.enlarged.nearest_cubes(&g, spec.ds)?;
            let k = ctl.iter().filter(|c| faces.contains(c)).count();
            if k != 1 {
                per_cell.push(format!("{t} has {k} controls in {g}"));
            }
        }
        for k in (0..dim).filter(|&i| i != a && !t.is_half(i)) {
            let neighbour = ctx.norm(&t.shifted(k, 2));
            let link = ctx.norm(&ctx.up(&t, 1).shifted(k, 1));
            let here = gates.contains(&(link.clone(), t.clone()));
            let there = gates.contains(&(link.clone(), neighbour.clone()));
            if here != there {
                parallel.push(format!("{link} controls only one of {t}, {neighbour}"));
            }
        }
    }

    Ok(CircuitReport {
        n_gates: circuit.len(),
        conditions: vec![
            condition("placement", placement),
            condition("translation_invariance", translation),
            condition("below_cut_partner", below),
            condition("one_control_per_cell", per_cell),
            condition("parallel_pairs", parallel),
            condition("two_controls", two_controls),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erg::ErgPlan;

    fn ctx(s: &str, dims: &[usize], src: CircuitSource) -> ErgContext {
        ErgContext::new(&ErgPlan::new(s.parse().unwrap(), dims, src).unwrap()).unwrap()
    }

    #[test]
    fn labels_place_faces() {
        assert_eq!(local_cube(3, "ab").unwrap(), vec![1, 0, 2]);
        assert_eq!(local_cube(3, "bf").unwrap(), vec![2, 0, 1]);
        assert_eq!(local_cube(4, "fn").unwrap(), vec![2, 0, 0, 1]);
        assert_eq!(local_cube(4, "abcd").unwrap(), vec![1, 1, 2, 2]);
        assert_eq!(local_cube(4, "abji").unwrap(), vec![1, 0, 2, 1]);
        assert_eq!(local_cube(2, "da").unwrap(), vec![0, 1]);
        assert!(local_cube(3, "az").is_err());
    }

    #[test]
    fn toric_gates_per_plaquette() {
        let c = ctx("[0,1,2,2]", &[3, 3], CircuitSource::Paper);
        let circuit = build_circuit_paper(&c).unwrap();
        // per cell: one bottom link and two shared vertical links
        assert_eq!(circuit.len(), 3 * 3);
        assert!(validate_circuit_conditions(&circuit, &c).unwrap().all_ok());
    }

    #[test]
    fn tabulated_and_general_circuits_pass_conditions() {
        for (s, dims) in
            [("[0,1,2,3]", vec![2, 2, 2]), ("[0,1,2,4]", vec![2, 2, 2, 2]), ("[1,2,3,4]", vec![2, 2, 2, 2])]
        {
            for src in [CircuitSource::Paper, CircuitSource::General] {
                let c = ctx(s, &dims, src);
                let report = validate_circuit_conditions(&build_circuit(&c).unwrap(), &c).unwrap();
                assert!(report.all_ok(), "{s} {src}: {report:?}");
            }
        }
    }

    #[test]
    fn general_matches_tabulated_for_level_one_planes() {
        let c = ctx("[1,2,3,4]", &[2, 2, 2, 2], CircuitSource::Paper);
        assert_eq!(
            build_circuit_paper(&c).unwrap().gates().iter().collect::<BTreeSet<_>>(),
            build_circuit_general(&c).unwrap().gates().iter().collect::<BTreeSet<_>>()
        );
    }

    #[test]
    fn deleting_a_gate_breaks_parallel_pairs() {
        let c = ctx("[0,1,2,3]", &[3, 3, 2], CircuitSource::Paper);
        let circuit = build_circuit_paper(&c).unwrap();
        let idx = circuit.gates().iter().position(|g| c.layer(c.qubits.cube(g.target)) == 1).unwrap();
        let report = validate_circuit_conditions(&circuit.without_gate(idx), &c).unwrap();
        assert!(!report.condition("parallel_pairs").unwrap().ok);
        assert!(!report.all_ok());
    }

    #[test]
    fn unsupported_spec_has_no_table() {
        let c = ctx("[1,2,3,5]", &[2, 2, 2, 2, 2], CircuitSource::Paper);
        assert!(build_circuit_paper(&c).is_err());
        assert!(validate_circuit_conditions(&build_circuit_general(&c).unwrap(), &c).unwrap().all_ok());
    }
}
