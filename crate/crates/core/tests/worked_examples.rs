use std::collections::BTreeSet;

use ergstab::erg::{
    build_circuit, build_circuit_general, build_circuit_paper, build_h1, validate_circuit_conditions, CircuitSource,
    ErgContext, ErgPlan,
};
use ergstab::gf2::row_space_equal;
use ergstab::groundstate::{config_group, enumerate_configs};
use ergstab::lattice::{CubeCoord, LatticeSpec};
use ergstab::models::{build_model, gsd_scan_and_fit, log2_gsd, GeneratorTag, ModelSpec};
use ergstab::pauli::{circuit_conjugate, conjugate_group, symplectic_matrix, PauliString};
use ergstab::Limits;
use num_rational::Ratio;

fn spec(s: &str) -> ModelSpec {
    s.parse().unwrap()
}

fn cube(v: &[i64]) -> CubeCoord {
    CubeCoord::new(v.to_vec())
}

fn ctx(s: &str, dims: &[usize], src: CircuitSource) -> ErgContext {
    ErgContext::new(&ErgPlan::new(spec(s), dims, src).unwrap()).unwrap()
}

fn z_on(c: &ErgContext, cubes: &[CubeCoord]) -> PauliString {
    PauliString::pure_z(c.n_qubits(), cubes.iter().map(|q| c.qubits.index_of(q).unwrap()))
}

#[test]
fn xcube_a_and_b_terms_commute_pairwise() {
    let m = build_model(spec("[0,1,2,3]"), &LatticeSpec::periodic(&[2, 2, 2]).unwrap()).unwrap();
    let (a, b): (Vec<_>, Vec<_>) = m.generators.iter().partition(|g| g.op.is_pure_x());
    for x in &a {
        for z in &b {
            assert!(x.op.commutes(&z.op));
        }
    }
}

#[test]
fn zz_pair_moves_a_b_term_across_the_duplicate() {
    // X-cube B^x at vertex (0,0,2) of the enlarged lattice, written with its
    // lower vertical leg still on the cut, differs from the real term by one ZZ.
    let c = ctx("[0,1,2,3]", &[2, 2, 2], CircuitSource::Paper);
    let unmodified = z_on(&c, &[cube(&[0, 1, 4]), cube(&[0, 3, 4]), cube(&[0, 0, 5]), cube(&[0, 0, 1])]);
    let zz = z_on(&c, &[cube(&[0, 0, 1]), cube(&[0, 0, 3])]);
    let connected = unmodified.multiply(&zz).unwrap();
    assert_eq!(connected, z_on(&c, &[cube(&[0, 1, 4]), cube(&[0, 3, 4]), cube(&[0, 0, 5]), cube(&[0, 0, 3])]));
    let h1 = build_h1(&c.plan).unwrap();
    let b =
        h1.generators.iter().find(|g| g.tag == GeneratorTag::B { anchor: cube(&[0, 0, 4]), axes: vec![1, 2] }).unwrap();
    assert_eq!(b.op, connected);
}

#[test]
fn xcube_circuit_turns_a_plaquette_into_a_cube() {
    let c = ctx("[0,1,2,3]", &[2, 2, 2], CircuitSource::Paper);
    let circuit = build_circuit_paper(&c).unwrap();
    let ap = PauliString::pure_x(
        c.n_qubits(),
        [cube(&[1, 0, 2]), cube(&[2, 1, 2]), cube(&[1, 2, 2]), cube(&[0, 1, 2])]
            .iter()
            .map(|q| c.qubits.index_of(q).unwrap()),
    );
    let image = circuit_conjugate(&circuit, &ap);
    assert_eq!(image.weight(), 12);
    let cube_term = build_model(spec("[0,1,2,3]"), &c.enlarged)
        .unwrap()
        .generators
        .into_iter()
        .find(|g| g.tag == GeneratorTag::A(cube(&[1, 1, 1])))
        .unwrap();
    assert_eq!(image, cube_term.op);
}

#[test]
fn level_one_circuit_turns_a_cube_term_into_a_hypercube_term() {
    let c = ctx("[1,2,3,4]", &[2, 2, 2, 2], CircuitSource::Paper);
    let circuit = build_circuit_paper(&c).unwrap();
    let h1 = build_h1(&c.plan).unwrap();
    let inserted = h1.generators.iter().find(|g| g.tag == GeneratorTag::InsertedA(cube(&[1, 1, 1, 2]))).unwrap();
    assert_eq!(inserted.op.weight(), 6);
    let image = circuit_conjugate(&circuit, &inserted.op);
    assert_eq!(image.weight(), 24);
    let target = build_model(spec("[1,2,3,4]"), &c.enlarged)
        .unwrap()
        .generators
        .into_iter()
        .find(|g| g.tag == GeneratorTag::A(cube(&[1, 1, 1, 1])))
        .unwrap();
    assert_eq!(image, target.op);
}

#[test]
fn toric_circuit_gate_pattern() {
    let c = ctx("[0,1,2,2]", &[3, 3], CircuitSource::Paper);
    let circuit = build_circuit_paper(&c).unwrap();
    let ab = c.qubits.index_of(&cube(&[1, 2])).unwrap();
    let targets: BTreeSet<CubeCoord> =
        circuit.gates().iter().filter(|g| g.control == ab).map(|g| c.qubits.cube(g.target).clone()).collect();
    assert_eq!(targets, [cube(&[2, 1]), cube(&[1, 0]), cube(&[0, 1])].into());
}

#[test]
fn fracton_circuit_control_lines() {
    let c = ctx("[0,1,2,4]", &[2, 2, 2, 2], CircuitSource::Paper);
    let circuit = build_circuit_paper(&c).unwrap();
    // fg -> fn, no, og in the reference cell at the origin
    let fg = c.qubits.index_of(&cube(&[2, 1, 0, 2])).unwrap();
    let targets: BTreeSet<CubeCoord> =
        circuit.gates().iter().filter(|g| g.control == fg).map(|g| c.qubits.cube(g.target).clone()).collect();
    assert!(targets.is_superset(&[cube(&[2, 0, 0, 1]), cube(&[2, 1, 0, 0]), cube(&[2, 2, 0, 1])].into()));
    let controls: BTreeSet<usize> = circuit.gates().iter().map(|g| g.control).collect();
    assert!(controls.iter().all(|&q| c.layer(c.qubits.cube(q)) == 2));
}

#[test]
fn general_and_tabulated_circuits_give_the_same_h2() {
    for dims in [vec![2, 2, 2], vec![3, 3, 2]] {
        let c = ctx("[0,1,2,3]", &dims, CircuitSource::Paper);
        let h1 = build_h1(&c.plan).unwrap().ops();
        let n = c.n_qubits();
        let via_tabulated = symplectic_matrix(n, &conjugate_group(&build_circuit_paper(&c).unwrap(), &h1));
        let via_general = symplectic_matrix(n, &conjugate_group(&build_circuit_general(&c).unwrap(), &h1));
        assert!(row_space_equal(&via_tabulated, &via_general).unwrap());
    }
}

#[test]
fn every_cut_qubit_has_two_controls() {
    for (s, dims) in [("[0,1,2,3]", vec![2, 2, 2]), ("[0,1,2,4]", vec![2, 2, 2, 2]), ("[1,2,3,4]", vec![2, 2, 2, 2])] {
        for src in [CircuitSource::Paper, CircuitSource::General] {
            let c = ctx(s, &dims, src);
            let circuit = build_circuit(&c).unwrap();
            for q in c.cut_qubits() {
                assert_eq!(circuit.controls_of(q).len(), 2, "{s} {src}");
            }
            assert!(validate_circuit_conditions(&circuit, &c).unwrap().all_ok());
        }
    }
}

#[test]
fn configuration_group_sizes() {
    let toric = |l: usize| build_model(spec("[0,1,2,2]"), &LatticeSpec::periodic(&[l, l]).unwrap()).unwrap();
    assert_eq!(config_group(&toric(2)).dim(), 3);
    assert_eq!(enumerate_configs(&config_group(&toric(4)), &Limits::default()).unwrap().len(), 32768);
    let xcube = build_model(spec("[0,1,2,3]"), &LatticeSpec::periodic(&[2, 2, 2]).unwrap()).unwrap();
    let a_rank =
        symplectic_matrix(xcube.n_qubits(), &xcube.ops().into_iter().filter(|p| p.is_pure_x()).collect::<Vec<_>>())
            .rank();
    assert_eq!(config_group(&xcube).dim(), a_rank);
}

#[test]
fn rank_oracle_values() {
    let gsd = |s: &str, d: &[usize]| log2_gsd(&build_model(spec(s), &LatticeSpec::periodic(d).unwrap()).unwrap());
    for l in 2..=5 {
        assert_eq!(gsd("[0,1,2,2]", &[l, l]), 2);
    }
    assert_eq!(gsd("[1,2,3,3]", &[3, 3, 3]), 3);
    assert_eq!(gsd("[0,1,2,3]", &[3, 3, 3]), 15);
    // 2·e2 − 3·e1 + 4 at 2⁴: 48 − 24 + 4
    assert_eq!(gsd("[0,1,2,4]", &[2, 2, 2, 2]), 28);
    // 3·e1 − 6 at 2⁴
    assert_eq!(gsd("[1,2,3,4]", &[2, 2, 2, 2]), 18);
}

#[test]
fn xcube_fit_over_mixed_sizes() {
    let sizes: Vec<Vec<usize>> = vec![vec![2, 2, 2], vec![2, 3, 4], vec![3, 3, 3], vec![4, 4, 2], vec![2, 2, 3]];
    let fit = gsd_scan_and_fit(spec("[0,1,2,3]"), &sizes, &Limits::default()).unwrap();
    assert!(fit.exact());
    assert_eq!((fit.c2, fit.c1, fit.c0), (Ratio::from_integer(0), Ratio::from_integer(2), Ratio::from_integer(-3)));
}
