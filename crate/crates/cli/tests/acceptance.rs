//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use toric_gkz::corpus;
use toric_gkz::fan::ExtendedFan;
use toric_gkz::linalg::{Int, Rat};
use toric_gkz::operators::OperatorSystem;
use toric_gkz::picard::PicardModel;

const CORPUS: [&str; 5] = ["p1", "p2", "p112", "p1113", "f2"];

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn corpus_file(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../corpus");
    p.push(format!("{name}.json"));
    p.to_string_lossy().into_owned()
}

struct Run {
    code: i32,
    stdout: Vec<u8>,
}

impl Run {
    fn json(&self) -> Result<Value, String> {
        serde_json::from_slice(&self.stdout).map_err(|e| format!("bad JSON: {e}"))
    }
}

fn cli(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_toric-gkz")).args(args).output().expect("binary runs");
    Run { code: out.status.code().unwrap_or(-1), stdout: out.stdout }
}

fn results(args: &[&str]) -> Result<Value, String> {
    let run = cli(args);
    if run.code != 0 {
        return Err(format!("{args:?} exited with {}", run.code));
    }
    Ok(run.json()?["results"].clone())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check_of<'a>(all: &'a Value, name: &str) -> Option<&'a Value> {
    all["checks"].as_array()?.iter().find(|c| c["name"] == name)
}

fn rank_identity() -> Check {
    for name in CORPUS {
        let file = corpus_file(name);
        let coh = results(&["cohomology", &file])?;
        let gkz = results(&["gkz", &file])?;
        let dim = coh["dimension"].as_i64();
        let vol = coh["normalized_volume"].as_i64();
        let res = gkz["residue_algebra"]["dimension"].as_i64();
        ensure(dim.is_some() && dim == vol && dim == res, || format!("{name}: {dim:?} {vol:?} {res:?}"))?;
    }
    let coh = results(&["cohomology", &corpus_file("p112")])?;
    let graded: Vec<i64> =
        coh["graded_dimensions"].as_array().unwrap().iter().filter_map(|g| g["dimension"].as_i64()).collect();
    ensure(graded == [1, 2, 1] && coh["dimension"] == 4, || format!("P112 graded {graded:?}"))
}

fn models() -> Vec<(&'static str, PicardModel)> {
    let mut fans = corpus::named();
    fans.push(("P113", corpus::p113()));
    fans.into_iter().map(|(n, f)| (n, PicardModel::new(ExtendedFan::new(f).unwrap()).unwrap())).collect()
}

fn random_relation(pm: &PicardModel, rng: &mut ChaCha8Rng, spread: i64) -> Vec<Int> {
    let mut l = vec![Int::from(0); pm.ext.n()];
    for basis in &pm.data.relations {
        let c = Int::from(rng.gen_range(-spread..=spread));
        for (x, b) in l.iter_mut().zip(basis) {
            *x += &c * b;
        }
    }
    l
}

fn box_bijection() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (name, pm) in models() {
        let table = pm.box_coset_table().map_err(|e| e.to_string())?;
        for entry in &table {
            ensure(entry.round_trip == entry.box_vector, || format!("{name}: round trip"))?;
            for _ in 0..10 {
                let l = random_relation(&pm, &mut rng, 6);
                let pl = pm.p_of_integer_relation(&l).map_err(|e| e.to_string())?;
                let shifted: Vec<Rat> = entry.degree.iter().zip(&pl).map(|(a, b)| a + b).collect();
                ensure(pm.ceiling_vector(&shifted) == entry.box_vector, || format!("{name}: shift by {l:?}"))?;
            }
        }
    }
    Ok(())
}

fn rho_membership() -> Check {
    for name in CORPUS.iter().chain(&["p113", "f3"]) {
        let r = results(&["picard", &corpus_file(name)])?;
        let m = &r["rho_membership"];
        ensure(m["lp"] == m["degree"], || format!("{name}: {m}"))?;
        ensure(m["lp"] == (*name != "f3"), || format!("{name}: unexpected verdict {m}"))?;
    }
    Ok(())
}

fn factorization() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (name, pm) in models() {
        let ops = OperatorSystem::new(&pm);
        let mut relations = pm.data.relations.clone();
        relations.extend((0..20).map(|_| random_relation(&pm, &mut rng, 2)));
        for l in &relations {
            let lhs = ops.extra_chi_prefix(l).mul(&ops.box_x_unchecked(l).map_err(|e| e.to_string())?);
            let rhs = ops.box_tilde(l).map_err(|e| e.to_string())?;
            ensure(lhs.sub(&rhs).is_zero(), || format!("{name}: residual for {l:?}"))?;
        }
    }
    Ok(())
}

fn symbol_fiber() -> Check {
    for name in CORPUS {
        let g = results(&["gkz", &corpus_file(name)])?;
        let fiber = &g["symbol_fiber"];
        let dim = fiber["dimension"].as_u64().ok_or_else(|| format!("{name}: infinite fiber"))?;
        let grows = fiber["sensitivity"].as_array().unwrap().iter().any(|s| {
            s["family"] == "box" && s["empty"] == false && s["dimension_without"].as_u64().is_none_or(|d| d > dim)
        });
        ensure(grows, || format!("{name}: dropping the box operators does not enlarge the fiber"))?;
    }
    Ok(())
}

fn annihilation() -> Check {
    for name in ["p1", "p2", "p112"] {
        let all = results(&["all", "--order", "3", &corpus_file(name)])?;
        let c = check_of(&all, "annihilation").ok_or("missing check")?;
        ensure(c["pass"] == true, || format!("{name}: {c}"))?;
    }
    Ok(())
}

fn mirror_map_shape() -> Check {
    for name in ["p1", "p2"] {
        let m = results(&["mirror-map", "--order", "6", &corpus_file(name)])?;
        let empty = |k: &str| m[k].as_array().is_some_and(Vec::is_empty);
        ensure(empty("analytic") && empty("log_corrections"), || format!("{name}: {m}"))?;
        let degrees = m["cohomology_basis"]["degrees"].as_array().unwrap();
        let linear = &m["log_linear"][0];
        let only_divisor = linear.as_array().unwrap().iter().zip(degrees).all(|(x, d)| x == "0/1" || d == "1/1");
        ensure(only_divisor && linear.as_array().unwrap().iter().any(|x| x != "0/1"), || format!("{name}: {linear}"))?;
    }
    for name in CORPUS {
        let all = results(&["all", &corpus_file(name)])?;
        for check in ["mirror_map_shape", "truncation_stability"] {
            let c = check_of(&all, check).ok_or("missing check")?;
            ensure(c["pass"] == true, || format!("{name}: {c}"))?;
        }
    }
    Ok(())
}

fn crepant_suite() -> Check {
    let (x, z) = (corpus_file("p112"), corpus_file("f2"));
    let r = results(&["crepant", "--fan", &x, "--resolution", &z])?;
    ensure(r["crepant"] == true && r["orbifold_sl"] == true, || format!("{r}"))?;
    ensure(r["gen_equals_new_rays"]["equal"] == true, || "Gen differs from the new rays".into())?;
    ensure(r["dimensions"]["orbifold"] == 4 && r["dimensions"]["resolution"] == 4, || format!("{}", r["dimensions"]))?;
    ensure(!r["witnesses"].as_array().unwrap().is_empty(), || "no witnesses".into())?;
    let sub = results(&["crepant", "--fan", &x, "--resolution", &corpus_file("p112_subdivided")])?;
    ensure(sub["crepant"] == false, || "subdivision reported crepant".into())?;
    ensure(sub["witnesses"].as_array().unwrap().iter().any(|w| w["discrepancy"] == "1/1"), || format!("{sub}"))?;
    let sl113 = results(&["validate", &corpus_file("p113")])?;
    ensure(sl113["sl"] == false, || "P113 reported SL".into())?;
    let run = cli(&["global-moduli", "--fan", &x, "--resolution", &z, "--emit-certificates"]);
    ensure(run.code == 0, || format!("global-moduli exited {}", run.code))?;
    let g = run.json()?;
    ensure(g["results"]["common_face"] == true, || "no common face".into())?;
    for cert in ["face_in_x", "face_in_z", "kahler_face"] {
        ensure(g["certificates"][cert].is_array(), || format!("missing {cert}"))?;
    }
    Ok(())
}

fn unfolding() -> Check {
    for name in CORPUS {
        let u = &results(&["gkz", &corpus_file(name)])?["unfolding"];
        ensure(u["injectivity"] == true && u["generation"] == true && u["eigenvector"] == true, || format!("{name}: {u}"))?;
    }
    Ok(())
}

fn determinism() -> Check {
    for name in CORPUS {
        let file = corpus_file(name);
        let first = cli(&["all", &file]);
        ensure(first.code == 0, || format!("{name}: all exited {}", first.code))?;
        for _ in 0..2 {
            ensure(cli(&["all", &file]).stdout == first.stdout, || format!("{name}: output differs between runs"))?;
        }
    }
    Ok(())
}

fn report(line: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stderr().lock(), "{line}");
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("rank identity", rank_identity),
        ("box bijection", box_bijection),
        ("rho membership equivalence", rho_membership),
        ("operator factorization", factorization),
        ("symbol fiber finiteness", symbol_fiber),
        ("annihilation", annihilation),
        ("mirror map shape", mirror_map_shape),
        ("crepant suite", crepant_suite),
        ("unfolding conditions", unfolding),
        ("determinism", determinism),
    ];
    let mut failures = Vec::new();
    for (i, (label, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => report(&format!("criterion {}: PASS {label}", i + 1)),
            Err(e) => {
                report(&format!("criterion {}: FAIL {label}: {e}", i + 1));
                failures.push(i + 1);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}

#[test]
fn broken_fan_reports_wall_diagnostic() {
    let run = cli(&["validate", &corpus_file("broken")]);
    assert_eq!(run.code, 1);
    let issues = run.json().unwrap()["results"]["issues"].clone();
    assert!(issues.as_array().unwrap().iter().any(|i| i.as_str().unwrap().contains("wall")));
}

#[test]
fn schema_errors_go_to_stderr() {
    let out = Command::new(env!("CARGO_BIN_EXE_toric-gkz"))
        .args(["box", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .and_then(|mut child| {
            use std::io::Write;
            child.stdin.take().unwrap().write_all(br#"{"rank": 2, "rays": [[1]], "max_cones": []}"#)?;
            child.wait_with_output()
        })
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["pointer"], "/rays/0");
}

#[test]
fn non_nef_input_fails_the_suite() {
    assert_eq!(cli(&["all", &corpus_file("f3")]).code, 2);
}
