use ergstab::coarsegrain::{run_coarse_pipeline, UsTable};
use ergstab::erg::{
    build_circuit, check_mapping_claims, validate_circuit_conditions, verify_fixed_point, ErgContext, ErgPlan,
};
use ergstab::lattice::LatticeSpec;
use ergstab::models::{build_model, dualize, gsd_scan_and_fit, log2_gsd, ModelSpec, StabilizerModel};
use ergstab::Limits;
use serde_json::{json, Value};

use crate::{CliResult, Job, Report};

fn model_of(job: &Job) -> (ModelSpec, &LatticeSpec) {
    match job {
        Job::Model { spec, lattice, .. } => (*spec, lattice),
        other => unreachable!("not a model job: {other:?}"),
    }
}

fn plan_of(job: &Job) -> &ErgPlan {
    match job {
        Job::Erg { plan, .. } => plan,
        other => unreachable!("not an erg job: {other:?}"),
    }
}

fn checked_model(spec: ModelSpec, lattice: &LatticeSpec, limits: &Limits) -> CliResult<StabilizerModel> {
    limits.check_qubits(spec.qubit_count(lattice.dims()))?;
    let model = build_model(spec, lattice)?;
    limits.check_qubits(model.n_qubits())?;
    Ok(model)
}

fn lattice_fields(spec: ModelSpec, lattice: &LatticeSpec) -> Value {
    json!({ "spec": spec.to_string(), "dims": lattice.dims(), "bc": lattice.bc().tag() })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut a, b) {
        a.extend(b);
    }
    a
}

fn generator_rows(model: &StabilizerModel) -> Vec<Vec<String>> {
    model
        .generators
        .iter()
        .map(|g| vec![g.tag.kind().to_string(), g.tag.to_string(), g.op.to_atoms(&model.qubits)])
        .collect()
}

pub fn cmd_model_gsd(job: &Job, limits: &Limits) -> CliResult<Report> {
    let (spec, lattice) = model_of(job);
    let model = checked_model(spec, lattice, limits)?;
    let rank = model.rank();
    let body = merge(
        lattice_fields(spec, lattice),
        json!({ "n_qubits": model.n_qubits(), "rank": rank, "log2_gsd": model.n_qubits() - rank }),
    );
    Ok(Report::new(body, true))
}

pub fn cmd_model_build(job: &Job, limits: &Limits) -> CliResult<Report> {
    let (spec, lattice) = model_of(job);
    let model = checked_model(spec, lattice, limits)?;
    let commuting = model.first_anticommuting_pair().is_none();
    let generators: Vec<String> = model.generators.iter().map(|g| model.describe(g)).collect();
    let body = merge(
        lattice_fields(spec, lattice),
        json!({
            "n_qubits": model.n_qubits(),
            "n_generators": generators.len(),
            "commuting": commuting,
            "generators": generators,
        }),
    );
    Ok(Report::new(body, commuting).with_table(&["kind", "tag", "operator"], generator_rows(&model)))
}

pub fn cmd_model_dualize(job: &Job, limits: &Limits) -> CliResult<Report> {
    let (spec, lattice) = model_of(job);
    let model = checked_model(spec, lattice, limits)?;
    let dual = dualize(&model)?;
    let (before, after) = (log2_gsd(&model), log2_gsd(&dual));
    let commuting = dual.first_anticommuting_pair().is_none();
    let generators: Vec<String> = dual.generators.iter().map(|g| dual.describe(g)).collect();
    let body = merge(
        lattice_fields(spec, lattice),
        json!({
            "dual": dual.dual,
            "n_qubits": dual.n_qubits(),
            "n_generators": generators.len(),
            "commuting": commuting,
            "log2_gsd_original": before,
            "log2_gsd": after,
            "gsd_preserved": before == after,
            "generators": generators,
        }),
    );
    Ok(Report::new(body, commuting && before == after).with_table(&["kind", "tag", "operator"], generator_rows(&dual)))
}

pub fn cmd_scan_fit(job: &Job, limits: &Limits) -> CliResult<Report> {
    let Job::Scan { spec, sizes } = job else { unreachable!("not a scan job: {job:?}") };
    let fit = gsd_scan_and_fit(*spec, sizes, limits)?;
    let mut rows = Vec::new();
    let points: Vec<Value> = fit
        .points
        .iter()
        .zip(&fit.residuals)
        .map(|(p, r)| {
            let fitted = fit.predict(&p.dims);
            rows.push(vec![
                p.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x"),
                p.n_qubits.to_string(),
                p.rank.to_string(),
                p.log2_gsd.to_string(),
                fitted.to_string(),
                r.to_string(),
            ]);
            json!({
                "dims": p.dims,
                "n_qubits": p.n_qubits,
                "rank": p.rank,
                "log2_gsd": p.log2_gsd,
                "fitted": fitted.to_string(),
                "residual": r.to_string(),
            })
        })
        .collect();
    let exact = fit.exact();
    let body = json!({
        "spec": spec.to_string(),
        "ansatz": "c2*e2(L) + c1*e1(L) + c0",
        "c2": fit.c2.to_string(),
        "c1": fit.c1.to_string(),
        "c0": fit.c0.to_string(),
        "exact": exact,
        "points": points,
    });
    Ok(Report::new(body, exact).with_table(&["dims", "n_qubits", "rank", "log2_gsd", "fitted", "residual"], rows))
}

fn plan_fields(plan: &ErgPlan) -> Value {
    json!({
        "spec": plan.spec.to_string(),
        "dims_from": plan.dims,
        "dims_to": plan.enlarged_dims(),
        "axis": plan.axis + 1,
        "circuit_source": plan.circuit,
    })
}

pub fn cmd_erg_verify(job: &Job, limits: &Limits) -> CliResult<Report> {
    let plan = plan_of(job);
    let fixed = verify_fixed_point(plan, limits)?;
    let mapping = check_mapping_claims(plan)?;
    let ok = fixed.all_ok() && mapping.ok();
    let body = merge(
        serde_json::to_value(&fixed).expect("serializable"),
        json!({ "mapping_ok": mapping.ok(), "mapping": mapping }),
    );
    Ok(Report::new(body, ok))
}

pub fn cmd_erg_circuit(job: &Job, limits: &Limits) -> CliResult<Report> {
    let plan = plan_of(job);
    limits.check_qubits(plan.spec.qubit_count(&plan.enlarged_dims()))?;
    let ctx = ErgContext::new(plan)?;
    let circuit = build_circuit(&ctx)?;
    let conditions = validate_circuit_conditions(&circuit, &ctx)?;
    let rows: Vec<Vec<String>> = circuit
        .gates()
        .iter()
        .map(|g| vec![ctx.qubits.cube(g.control).to_string(), ctx.qubits.cube(g.target).to_string()])
        .collect();
    let gates: Vec<Value> = rows.iter().map(|r| json!({ "control": r[0], "target": r[1] })).collect();
    let ok = conditions.all_ok();
    let body = merge(
        plan_fields(plan),
        json!({ "n_gates": circuit.len(), "conditions": conditions.conditions, "gates": gates }),
    );
    Ok(Report::new(body, ok).with_table(&["control", "target"], rows))
}

pub fn cmd_erg_classify(job: &Job, limits: &Limits) -> CliResult<Report> {
    let plan = plan_of(job);
    limits.check_qubits(plan.spec.qubit_count(&plan.enlarged_dims()))?;
    let mapping = check_mapping_claims(plan)?;
    let ok = mapping.ok();
    let body = merge(plan_fields(plan), serde_json::to_value(&mapping).expect("serializable"));
    Ok(Report::new(body, ok))
}

pub fn cmd_coarse_verify(job: &Job, limits: &Limits) -> CliResult<Report> {
    let Job::Coarse { l } = job else { unreachable!("not a coarse job: {job:?}") };
    let report = run_coarse_pipeline(*l, limits, &UsTable::standard())?;
    let ok = report.all_ok();
    Ok(Report::new(serde_json::to_value(&report).expect("serializable"), ok))
}
