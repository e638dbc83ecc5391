//! Command-specific JSON results.

use serde_json::{json, Map, Value};
use toric_gkz::cohomology::{normalized_volume, presentation, OrbifoldRing};
use toric_gkz::crepant::{
    build_global_fan, check_gen_equals_new_rays, check_sl, exceptional_not_in_kahler, is_crepant, pair_models,
    validate_q_basis, ResolutionPair,
};
use toric_gkz::fan::ExtendedFan;
use toric_gkz::ifunction::{annihilation_report, enumerate_degrees, i_function, mirror_map, LogSeries};
use toric_gkz::io::{
    int_matrix_json, int_vec_json, int_json, one_based, rat_json, rat_matrix_json, rat_vec_json, FanDocument,
};
use toric_gkz::linalg::{Int, Rat};
use toric_gkz::operators::{
    box_hat, check_unfolding_conditions, residue_algebra, symbol_fiber_dimension, DiffOp, OperatorSystem,
};
use toric_gkz::picard::{picard_data, rho_membership, superpotential, PicardModel};
use toric_gkz::poly::Poly;
use toric_gkz::{Error, Result};

/// Results plus optional certificates and whether every declared check passed.
pub struct Outcome {
    pub results: Value,
    pub certificates: Value,
    pub passed: bool,
}

impl Outcome {
    fn ok(results: Value) -> Self {
        Outcome { results, certificates: Value::Null, passed: true }
    }
}

fn model(doc: &FanDocument, ext: ExtendedFan) -> Result<PicardModel> {
    match doc.kappa_basis() {
        Some(k) => PicardModel::with_kappa_basis(ext, k),
        None => PicardModel::new(ext),
    }
}

fn poly_json(p: &Poly) -> Value {
    Value::Array(
        p.terms().iter().map(|(m, c)| json!({"exponents": m, "coefficient": rat_json(c)})).collect(),
    )
}

fn op_json(op: &DiffOp) -> Value {
    Value::Array(
        op.terms()
            .iter()
            .map(|(t, c)| {
                json!({
                    "coefficient": rat_json(c),
                    "chi": t.chi,
                    "z": t.z,
                    "derivations": t.letters,
                    "euler": t.euler,
                })
            })
            .collect(),
    )
}

fn graded_json(coh: &OrbifoldRing) -> Value {
    Value::Array(
        coh.ring.graded_dims().iter().map(|(d, n)| json!({"degree": rat_json(d), "dimension": n})).collect(),
    )
}

fn ring_basis_json(coh: &OrbifoldRing) -> Value {
    json!({
        "monomials": coh.ring.basis(),
        "degrees": rat_vec_json(&coh.ring.basis_degrees()),
    })
}

pub fn validate(doc: &FanDocument) -> Result<Outcome> {
    let fan = doc.fan()?;
    let report = fan.validate();
    let mut results = json!({
        "rank": fan.rank(),
        "rays": fan.rays().len(),
        "max_cones": fan.cones().len(),
        "simplicial": report.simplicial,
        "complete": report.complete,
        "primitive": report.primitive,
        "valid": report.is_valid(),
        "issues": report.issues.iter().map(ToString::to_string).collect::<Vec<_>>(),
    });
    if report.is_valid() {
        let obj = results.as_object_mut().expect("object");
        obj.insert("smooth".into(), json!(fan.is_smooth()));
        obj.insert("anticanonical_nef".into(), json!(fan.is_anticanonical_nef()));
        obj.insert("sl".into(), json!(check_sl(&fan)));
        if let Some(extra) = &doc.extra_generators {
            let ext = ExtendedFan::with_generators(fan.clone(), extra.clone());
            obj.insert("extra_generators_valid".into(), json!(ext.is_ok()));
            if let Err(e) = ext {
                obj.insert("extra_generators_error".into(), json!(e.to_string()));
            }
        }
    }
    let passed = results["valid"].as_bool() == Some(true) && results.get("extra_generators_valid") != Some(&json!(false));
    Ok(Outcome { results, certificates: Value::Null, passed })
}

fn coset_json(pm: &PicardModel) -> Result<Value> {
    Ok(Value::Array(
        pm.box_coset_table()?
            .iter()
            .map(|e| {
                json!({
                    "box_vector": e.box_vector,
                    "degree": rat_vec_json(&e.degree),
                    "pairings": rat_vec_json(&e.pairings),
                    "round_trip": e.round_trip,
                })
            })
            .collect(),
    ))
}

pub fn box_elements(doc: &FanDocument) -> Result<Outcome> {
    let ext = doc.extended()?;
    let gen: Vec<Vec<i64>> = ext.base().gen_elements().into_iter().map(|b| b.vector).collect();
    let elements: Vec<Value> = ext
        .box_elements()
        .iter()
        .map(|b| {
            json!({
                "vector": b.vector,
                "cone": one_based(&b.cone),
                "coordinates": rat_vec_json(&b.coords),
                "age": rat_json(&b.age),
                "in_gen": gen.contains(&b.vector),
            })
        })
        .collect();
    let mut results = Map::new();
    results.insert("elements".into(), Value::Array(elements));
    results.insert("gen".into(), json!(gen));
    results.insert("extra_generators".into(), json!(ext.extra().iter().map(|b| b.vector.clone()).collect::<Vec<_>>()));
    match model(doc, ext) {
        Ok(pm) => {
            results.insert("coset_table".into(), coset_json(&pm)?);
        }
        Err(e) if doc.p_basis.is_some() => return Err(e),
        Err(e) => {
            results.insert("coset_table_error".into(), json!(e.to_string()));
        }
    }
    Ok(Outcome::ok(Value::Object(results)))
}

pub fn cohomology(doc: &FanDocument) -> Result<Outcome> {
    let ext = doc.extended()?;
    let coh = presentation(&ext)?;
    let mut results = Map::new();
    results.insert("dimension".into(), json!(coh.dim()));
    results.insert("graded_dimensions".into(), graded_json(&coh));
    results.insert("basis".into(), ring_basis_json(&coh));
    results.insert("generator_degrees".into(), rat_vec_json(&ext.degrees()));
    results.insert(
        "relation_counts".into(),
        json!({
            "cone": coh.cone_binomials.len(),
            "euler": coh.euler_forms.len(),
            "primitive": coh.collection_monomials.len(),
        }),
    );
    let mut passed = true;
    match normalized_volume(&ext) {
        Ok(v) => {
            passed = Int::from(coh.dim()) == v;
            results.insert("normalized_volume".into(), int_json(&v));
            results.insert("dimension_equals_volume".into(), json!(passed));
        }
        Err(e) => {
            results.insert("normalized_volume_error".into(), json!(e.to_string()));
        }
    }
    let certificates = json!({
        "groebner_basis": coh.ring.groebner_basis().iter().map(poly_json).collect::<Vec<_>>(),
        "cone_binomials": coh.cone_binomials.iter().map(poly_json).collect::<Vec<_>>(),
        "primitive_monomials": coh.collection_monomials.iter().map(poly_json).collect::<Vec<_>>(),
    });
    Ok(Outcome { results: Value::Object(results), certificates, passed })
}

pub fn picard(doc: &FanDocument) -> Result<Outcome> {
    let ext = doc.extended()?;
    let data = picard_data(&ext)?;
    let membership = rho_membership(&ext, &data)?;
    let mut results = Map::new();
    results.insert("relations".into(), int_matrix_json(&data.relations));
    results.insert("base_relations".into(), int_matrix_json(&data.base_relations));
    results.insert("extended_picard_basis".into(), int_matrix_json(&data.pic_basis));
    results.insert("picard_basis_kappa".into(), int_matrix_json(&data.kappa_pic_basis));
    results.insert("kahler_walls_kappa".into(), int_matrix_json(&data.wall_inequalities));
    results.insert("kahler_generators_kappa".into(), rat_matrix_json(data.kahler_kappa.generators()));
    results.insert("kahler_generators".into(), rat_matrix_json(data.kahler.generators()));
    results.insert("extended_kahler_generators".into(), rat_matrix_json(data.kahler_extended.generators()));
    results.insert("rho".into(), int_vec_json(&data.rho));
    results.insert("rho_bar_kappa".into(), rat_vec_json(&data.rho_bar));
    results.insert("rho_membership".into(), json!({"lp": membership.by_lp, "degree": membership.by_degree}));
    let passed = membership.by_lp == membership.by_degree;
    let basis = match doc.kappa_basis() {
        Some(k) => toric_gkz::picard::basis_from_kappa(&ext, &data, k),
        None => toric_gkz::picard::choose_basis_p(&ext, &data),
    };
    match basis {
        Ok(b) => {
            results.insert(
                "p_basis".into(),
                json!({
                    "kappa": int_matrix_json(&b.kappa),
                    "p": int_matrix_json(&b.p),
                    "m": rat_matrix_json(&b.m),
                    "n": int_matrix_json(&b.n),
                    "user_supplied": b.user_supplied,
                }),
            );
            let pm = PicardModel { ext, data, basis: b };
            results.insert("coset_table".into(), coset_json(&pm)?);
        }
        Err(e) if doc.p_basis.is_some() => return Err(e),
        Err(e) => {
            results.insert("p_basis_error".into(), json!(e.to_string()));
        }
    }
    Ok(Outcome { results: Value::Object(results), certificates: Value::Null, passed })
}

pub fn superpotential_cmd(doc: &FanDocument) -> Result<Outcome> {
    let pm = model(doc, doc.extended()?)?;
    let terms: Vec<Value> = superpotential(&pm.ext, &pm.basis)
        .iter()
        .map(|t| {
            json!({
                "coefficient": t.coefficient,
                "chi_exponent": int_vec_json(&t.chi_exponent),
                "y_exponent": t.y_exponent,
            })
        })
        .collect();
    Ok(Outcome::ok(json!({"terms": terms})))
}

fn relations_json(ls: &[Vec<Int>]) -> Value {
    int_matrix_json(ls)
}

pub fn gkz(doc: &FanDocument) -> Result<Outcome> {
    let ext = doc.extended()?;
    let coh = presentation(&ext)?;
    let pm = model(doc, ext)?;
    let ops = OperatorSystem::new(&pm);
    let (cone, primitive, basis) = toric_gkz::operators::relation_families(&pm, &coh)?;
    let mut operators = Vec::new();
    for l in &basis {
        operators.push(json!({
            "relation": int_vec_json(l),
            "p_of_relation": rat_vec_json(&pm.p_of_integer_relation(l)?),
            "operator": op_json(&ops.box_x(l)?),
            "lambda_operator": op_json(&box_hat(l)),
            "factorization_verified": true,
        }));
    }
    let residue = residue_algebra(&pm, &coh)?;
    let fiber = symbol_fiber_dimension(&pm, &coh)?;
    let unfolding = check_unfolding_conditions(&pm, &coh)?;
    let sensitivity: Vec<Value> = fiber
        .sensitivity
        .iter()
        .map(|s| json!({"family": s.family, "empty": s.empty, "dimension_without": s.dimension_without}))
        .collect();
    let fiber_ok = fiber.dimension.is_some()
        && fiber.sensitivity.iter().filter(|s| s.family == "box").all(|s| s.dimension_without.is_none_or(|d| Some(d) > fiber.dimension));
    let results = json!({
        "euler_operator": op_json(&ops.euler_op()),
        "lattice_basis_operators": operators,
        "cone_relations": relations_json(&cone),
        "primitive_relations": relations_json(&primitive),
        "residue_algebra": {
            "dimension": residue.ring.dim(),
            "cohomology_dimension": coh.dim(),
            "graded_dimensions": residue.ring.graded_dims().iter().map(|(d, n)| json!({"degree": rat_json(d), "dimension": n})).collect::<Vec<_>>(),
        },
        "symbol_fiber": {"dimension": fiber.dimension, "sensitivity": sensitivity},
        "unfolding": {
            "injectivity": unfolding.injectivity,
            "generation": unfolding.generation,
            "eigenvector": unfolding.eigenvector,
        },
    });
    let certificates = json!({
        "residue_relations": residue.families.all().iter().map(poly_json).collect::<Vec<_>>(),
        "residue_comparison": rat_matrix_json(&residue.comparison),
    });
    let passed = fiber_ok && unfolding.injectivity && unfolding.generation && unfolding.eigenvector;
    Ok(Outcome { results, certificates, passed })
}

fn series_json(s: &LogSeries) -> Value {
    Value::Array(
        s.terms()
            .iter()
            .map(|(k, c)| {
                json!({
                    "chi": k.chi,
                    "log_chi": k.log_chi,
                    "z": rat_json(&k.z),
                    "log_z": k.log_z,
                    "class": rat_vec_json(c),
                })
            })
            .collect(),
    )
}

pub fn ifunction(doc: &FanDocument, order: u32) -> Result<Outcome> {
    let ext = doc.extended()?;
    let coh = presentation(&ext)?;
    let pm = model(doc, ext)?;
    let degrees: Vec<Value> = enumerate_degrees(&pm, order)?
        .iter()
        .map(|d| json!({"p": d.p, "pairings": rat_vec_json(&d.pairings), "sector": d.sector}))
        .collect();
    let series = i_function(&pm, &coh, order)?;
    let results = json!({
        "order": series.order,
        "prefactor": "exp(sum_a pbar_a log(chi_a) / z)",
        "cohomology_basis": ring_basis_json(&coh),
        "degrees": degrees,
        "terms": series_json(&series),
    });
    Ok(Outcome::ok(results))
}

pub fn mirror(doc: &FanDocument, order: u32) -> Result<Outcome> {
    let ext = doc.extended()?;
    let coh = presentation(&ext)?;
    let pm = model(doc, ext)?;
    let mm = mirror_map(&i_function(&pm, &coh, order)?, &coh)?;
    let results = json!({
        "order": mm.order,
        "cohomology_basis": ring_basis_json(&coh),
        "log_linear": rat_matrix_json(&mm.log_linear),
        "analytic": mm.analytic.iter().map(|(chi, c)| json!({"chi": chi, "class": rat_vec_json(c)})).collect::<Vec<_>>(),
        "log_corrections": mm.log_corrections.iter().map(|(k, c)| json!({"chi": k.chi, "log_chi": k.log_chi, "class": rat_vec_json(c)})).collect::<Vec<_>>(),
    });
    Ok(Outcome::ok(results))
}

pub fn crepant(x: &FanDocument, z: &FanDocument) -> Result<Outcome> {
    let pair = ResolutionPair::new(x.fan()?, z.fan()?)?;
    let rep = is_crepant(&pair)?;
    let witnesses: Vec<Value> = rep
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "ray": w.ray,
                "cone": one_based(&w.cone),
                "coordinates": rat_vec_json(&w.coordinates),
                "degree": rat_json(&w.degree),
                "discrepancy": rat_json(&w.discrepancy),
            })
        })
        .collect();
    let gen = check_gen_equals_new_rays(&pair);
    let mut results = Map::new();
    results.insert("crepant".into(), json!(rep.crepant));
    results.insert("witnesses".into(), Value::Array(witnesses));
    results.insert("orbifold_sl".into(), json!(check_sl(&pair.orbifold)));
    results.insert("resolution_smooth".into(), json!(pair.resolution.is_smooth()));
    results.insert(
        "gen_equals_new_rays".into(),
        json!({"equal": gen.equal, "only_in_gen": gen.only_in_gen, "only_in_new_rays": gen.only_in_new_rays}),
    );
    let mut passed = true;
    if rep.crepant {
        let models = pair_models(&pair, x.kappa_basis())?;
        let exc = exceptional_not_in_kahler(&pair, &models)?;
        passed &= exc.iter().all(|(_, v)| *v) && gen.equal;
        results.insert(
            "exceptional_not_in_kahler".into(),
            Value::Array(exc.iter().map(|(i, v)| json!({"generator": i + 1, "outside": v})).collect()),
        );
        let dx = presentation(&models.orbifold.ext)?.dim();
        let dz = presentation(&ExtendedFan::with_generators(pair.resolution.clone(), vec![])?)?.dim();
        passed &= dx == dz;
        results.insert("dimensions".into(), json!({"orbifold": dx, "resolution": dz, "equal": dx == dz}));
        results.insert("extended_sequences_equal".into(), json!(models.orbifold.ext.n() == pair.resolution.rays().len()));
    }
    Ok(Outcome { results: Value::Object(results), certificates: Value::Null, passed })
}

pub fn global_moduli(x: &FanDocument, z: &FanDocument) -> Result<Outcome> {
    let pair = ResolutionPair::new(x.fan()?, z.fan()?)?;
    if !is_crepant(&pair)?.crepant {
        return Err(Error::Invariant("the resolution is not crepant".into()));
    }
    let models = pair_models(&pair, x.kappa_basis())?;
    let supplied = x.q_basis_ints();
    let g = match &supplied {
        Some(q) => validate_q_basis(&models, q)?,
        None => build_global_fan(&models)?,
    };
    let results = json!({
        "p": int_matrix_json(&g.p),
        "q": int_matrix_json(&g.q),
        "q_supplied": supplied.is_some(),
        "transition": int_matrix_json(&g.transition),
        "cone_x": rat_matrix_json(g.cone_x.generators()),
        "cone_z": rat_matrix_json(g.cone_z.generators()),
        "intersection": rat_matrix_json(g.intersection.generators()),
        "kahler_x": rat_matrix_json(models.orbifold.data.kahler.generators()),
        "kahler_z": rat_matrix_json(models.resolution.kahler.generators()),
        "common_face": true,
    });
    let certificates = json!({
        "face_in_x": rat_vec_json(&g.face_in_x.functional),
        "face_in_z": rat_vec_json(&g.face_in_z.functional),
        "kahler_face": rat_vec_json(&g.kahler_face.functional),
    });
    Ok(Outcome { results, certificates, passed: true })
}

struct Checks(Vec<Value>);

impl Checks {
    fn push(&mut self, name: &str, outcome: Result<(bool, Value)>) {
        let (pass, detail) = match outcome {
            Ok(x) => x,
            Err(e) => (false, json!({"error": e.to_string()})),
        };
        self.0.push(json!({"name": name, "pass": pass, "detail": detail}));
    }
}

fn truncation_stable(pm: &PicardModel, coh: &OrbifoldRing, order: u32) -> Result<bool> {
    let a = i_function(pm, coh, order)?;
    let b = i_function(pm, coh, order + 1)?.truncate(order);
    Ok(a == b)
}

/// The full invariant suite on one fan.
pub fn all(doc: &FanDocument, order: u32) -> Result<Outcome> {
    let mut checks = Checks(Vec::new());
    let valid = validate(doc)?;
    checks.push("valid_fan", Ok((valid.passed, valid.results.clone())));
    if !valid.passed {
        return Ok(Outcome { results: json!({"checks": checks.0, "passed": false}), certificates: Value::Null, passed: false });
    }
    let ext = doc.extended()?;
    let coh = presentation(&ext);
    let data = picard_data(&ext);
    let pm = model(doc, ext.clone());
    checks.push(
        "rho_membership_agreement",
        data.as_ref().map_err(Clone::clone).and_then(|d| {
            let m = rho_membership(&ext, d)?;
            Ok((m.by_lp == m.by_degree, json!({"lp": m.by_lp, "degree": m.by_degree})))
        }),
    );
    let (coh, pm) = match (coh, pm) {
        (Ok(c), Ok(p)) => (c, p),
        (c, p) => {
            let msg = c.err().or(p.err()).map(|e| e.to_string());
            checks.push("preconditions", Ok((false, json!({"error": msg}))));
            return Ok(Outcome { results: json!({"checks": checks.0, "passed": false}), certificates: Value::Null, passed: false });
        }
    };
    checks.push(
        "rank_identity",
        (|| {
            let vol = normalized_volume(&ext)?;
            let res = residue_algebra(&pm, &coh)?;
            let d = coh.dim();
            Ok((
                Int::from(d) == vol && res.ring.dim() == d,
                json!({"cohomology": d, "volume": int_json(&vol), "residue_algebra": res.ring.dim(), "graded": graded_json(&coh)}),
            ))
        })(),
    );
    checks.push(
        "box_bijection",
        (|| {
            let table = pm.box_coset_table()?;
            let mut ok = table.iter().all(|e| e.round_trip == e.box_vector);
            for e in &table {
                for l in &pm.data.relations {
                    let pl = pm.p_of_integer_relation(l)?;
                    let shifted: Vec<Rat> = e.degree.iter().zip(&pl).map(|(a, b)| a + b).collect();
                    ok &= pm.ceiling_vector(&shifted) == e.box_vector;
                }
            }
            Ok((ok, json!({"sectors": table.len()})))
        })(),
    );
    let ops = OperatorSystem::new(&pm);
    checks.push(
        "operator_factorization",
        (|| {
            let (cone, primitive, basis) = toric_gkz::operators::relation_families(&pm, &coh)?;
            let mut count = 0;
            for l in basis.iter().chain(&cone).chain(&primitive) {
                ops.box_x(l)?;
                count += 1;
            }
            Ok((true, json!({"relations": count})))
        })(),
    );
    checks.push(
        "symbol_fiber",
        symbol_fiber_dimension(&pm, &coh).map(|f| {
            let grows = f
                .sensitivity
                .iter()
                .filter(|s| s.family == "box")
                .all(|s| !s.empty && s.dimension_without.is_none_or(|d| Some(d) > f.dimension));
            (f.dimension.is_some() && grows, json!({"dimension": f.dimension}))
        }),
    );
    checks.push(
        "annihilation",
        annihilation_report(&pm, &coh, order).map(|rs| {
            let failing: Vec<String> = rs.iter().filter(|(_, r)| !r.vanishes()).map(|(n, _)| n.clone()).collect();
            (failing.is_empty(), json!({"operators": rs.len(), "order": order, "failing": failing}))
        }),
    );
    checks.push(
        "mirror_map_shape",
        (|| {
            let mm = mirror_map(&i_function(&pm, &coh, order)?, &coh)?;
            Ok((true, json!({"analytic_terms": mm.analytic.len(), "log_corrections": mm.log_corrections.len()})))
        })(),
    );
    checks.push("truncation_stability", truncation_stable(&pm, &coh, order).map(|b| (b, json!({"order": order}))));
    checks.push(
        "unfolding_conditions",
        check_unfolding_conditions(&pm, &coh).map(|u| {
            (
                u.injectivity && u.generation && u.eigenvector,
                json!({"injectivity": u.injectivity, "generation": u.generation, "eigenvector": u.eigenvector}),
            )
        }),
    );
    let passed = checks.0.iter().all(|c| c["pass"] == json!(true));
    Ok(Outcome { results: json!({"checks": checks.0, "passed": passed}), certificates: Value::Null, passed })
}
