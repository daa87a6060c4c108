//! Acceptance suite. Runs every criterion against its time limit and prints
//! one line per criterion; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use simplext::selftest;
use simplext_core::algebra::{enumerate_homs, generating_set, is_homomorphism, is_injective, subalgebras};
use simplext_core::boolean::{bounds_from_conditions, sup_witness, PowersetAlgebra};
use simplext_core::completeness::{
    base_maps, crosscheck, generator_names, realized_extensions, replay_completeness, replay_injectivity, Catalog,
    Limits,
};
use simplext_core::extension::{
    audit_prop2, enumerate_conditions, extends_to_hom, lemma1_audit, prop2_construct, satisfies_conditions,
    ConditionWindow, SimpleExtension,
};
use simplext_core::group::{normalize_condition, solves, TableGroup};
use simplext_core::models::{enumerate_models, DEFAULT_SEARCH_CAP};
use simplext_core::term::{for_each_tuple, Assignment};
use simplext_core::variety::DEFAULT_FREE_CAP;
use simplext_core::{free_algebra, standard, FiniteAlgebra, Variety};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grid_varieties() -> Vec<Variety> {
    vec![
        standard::boolean_variety(),
        standard::exponent_variety(2),
        standard::exponent_variety(4),
        standard::semilattice_variety(),
    ]
}

fn grid(v: &Variety) -> (Catalog, Vec<SimpleExtension>) {
    let cat = Catalog::build(v, 4, Limits::default()).expect("catalog");
    let exts = cat
        .members()
        .iter()
        .flat_map(|m| realized_extensions(&m.algebra).expect("extensions"))
        .collect();
    (cat, exts)
}

fn transport_audit() -> Outcome {
    let mut maps = 0;
    for v in [standard::boolean_variety(), standard::exponent_variety(4)] {
        for size in 1..=4 {
            let models = enumerate_models(v.signature(), v.identities(), size, true, DEFAULT_SEARCH_CAP)
                .map_err(|e| e.to_string())?;
            for target in &models {
                for k in 0..=2 {
                    let names: Vec<String> = (0..k).map(|i| format!("s{i}")).collect();
                    let mut failure = None;
                    for_each_tuple(size, k, |h| {
                        if failure.is_some() {
                            return;
                        }
                        match lemma1_audit(&names, h, target, 3) {
                            Ok(r) if r.passed() => maps += 1,
                            Ok(r) => failure = Some(format!("{} size {size}: {:?}", v.name(), r.counterexample)),
                            Err(e) => failure = Some(e.to_string()),
                        }
                    });
                    if let Some(f) = failure {
                        return Err(f);
                    }
                }
            }
        }
    }
    Ok(format!("{maps} maps"))
}

fn bounded_conditions() -> Outcome {
    let mut instances = 0usize;
    for v in grid_varieties() {
        let (cat, exts) = grid(&v);
        for ext in &exts {
            for tgt in cat.members() {
                for bm in base_maps(ext, &tgt.algebra) {
                    let w = ConditionWindow::new(ext, &tgt.algebra, &bm, Some(3)).map_err(|e| e.to_string())?;
                    for b in 0..tgt.algebra.size() {
                        let hom = extends_to_hom(ext, &tgt.algebra, &bm, b).map_err(|e| e.to_string())?.is_some();
                        let sat = w.violation(b).is_none();
                        ensure(sat == hom, || format!("{} target {} base map {bm:?} b={b}", v.name(), tgt.name))?;
                        instances += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{instances} instances"))
}

fn quotient_construction() -> Outcome {
    let (mut runs, mut qualifying) = (0usize, 0usize);
    for v in grid_varieties() {
        let (cat, exts) = grid(&v);
        for ext in &exts {
            let (a_alg, _) = ext.base_algebra();
            for b in cat.members() {
                for g in enumerate_homs(&a_alg, &b.algebra) {
                    if g.iter().collect::<BTreeSet<_>>().len() != b.algebra.size() {
                        continue;
                    }
                    let out = prop2_construct(&v, ext, &b.algebra, &g, DEFAULT_FREE_CAP).map_err(|e| e.to_string())?;
                    audit_prop2(&out, ext, &b.algebra, &g, 2).map_err(|e| format!("{}: {e:?}", v.name()))?;
                    runs += 1;
                    for tgt in cat.members() {
                        for psi in enumerate_homs(&b.algebra, &tgt.algebra) {
                            let bm: Vec<usize> = ext
                                .base_gens()
                                .iter()
                                .map(|(_, a)| psi[g[ext.base_index(*a).unwrap()]])
                                .collect();
                            let w = ConditionWindow::new(ext, &tgt.algebra, &bm, None).map_err(|e| e.to_string())?;
                            for c in w.satisfying() {
                                let hom = extends_to_hom(&out.extension, &tgt.algebra, &bm, c).map_err(|e| e.to_string())?;
                                ensure(hom.is_some(), || format!("{} qualifying {c} has no homomorphism", v.name()))?;
                                qualifying += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{runs} constructions, {qualifying} qualifying elements"))
}

fn completeness_equals_injectivity() -> Outcome {
    let mut checked = 0;
    for v in standard::bundled_varieties() {
        let cat = Catalog::build(&v, 4, Limits::default()).map_err(|e| e.to_string())?;
        for m in cat.members() {
            let b = &m.algebra;
            let x = crosscheck(b, &v, &cat, 2, Limits::default()).map_err(|e| e.to_string())?;
            ensure(x.agree(), || format!("{} {}", v.name(), m.name))?;
            if !x.complete.passed() {
                ensure(x.interconvertible(), || format!("{} {}: witnesses do not convert", v.name(), m.name))?;
            }
            if let Some(w) = &x.complete.witness {
                ensure(replay_completeness(w, b).unwrap_or(false), || format!("{} {} replay", v.name(), m.name))?;
            }
            if let Some(w) = &x.injective.witness {
                ensure(replay_injectivity(w, b, &cat).unwrap_or(false), || format!("{} {} replay", v.name(), m.name))?;
            }
            checked += 1;
        }
    }
    let v = standard::exponent_variety(4);
    let cat = Catalog::build(&v, 4, Limits::default()).map_err(|e| e.to_string())?;
    let x = crosscheck(&standard::cyclic(2), &v, &cat, 2, Limits::default()).map_err(|e| e.to_string())?;
    ensure(!x.complete.passed() && !x.injective.passed() && x.interconvertible(), || {
        "z2 in exp4 is not a failing, interconvertible case".into()
    })?;
    Ok(format!("{checked} algebras"))
}

fn meet_criterion() -> Outcome {
    selftest::lemma2_exhaustive().map(|n| format!("{n} triples"))
}

fn powerset_supremum() -> Outcome {
    let members: Vec<PowersetAlgebra> = (0..=3).map(PowersetAlgebra::new).collect();
    let mut instances = 0;
    for p in &members {
        for sub in subalgebras(p.algebra()) {
            let gens = generating_set(p.algebra(), &sub);
            let names = generator_names(p.algebra(), &gens, "x");
            let (sub_alg, _) = p.algebra().restrict(&sub).map_err(|e| e.to_string())?;
            let asg: Assignment = names.iter().cloned().zip(gens.iter().copied()).collect();
            for m in &members {
                for emb in enumerate_homs(&sub_alg, m.algebra()).into_iter().filter(|h| is_injective(h)) {
                    for a in 0..m.size() {
                        let base_gens = names
                            .iter()
                            .cloned()
                            .zip(gens.iter().map(|g| emb[sub.binary_search(g).unwrap()]))
                            .collect();
                        let (ext, _) = SimpleExtension::realize(m.algebra(), base_gens, a).map_err(|e| e.to_string())?;
                        let conds = ConditionWindow::new(&ext, p.algebra(), &gens, Some(2))
                            .map_err(|e| e.to_string())?
                            .reduced_conditions();
                        let bp = bounds_from_conditions(&conds, p, &asg, "x").map_err(|e| e.to_string())?;
                        let mut brute = Vec::new();
                        for c in 0..p.size() {
                            let sat = satisfies_conditions(p.algebra(), &asg, "x", c, &conds)
                                .map_err(|e| e.to_string())?
                                .is_satisfied();
                            ensure(sat == bp.admits(p, c), || format!("P({}) bounds unfaithful at {}", p.atoms(), p.label(c)))?;
                            if sat {
                                brute.push(c);
                            }
                        }
                        let w = sup_witness(&bp, p).map_err(|e| format!("{e:?}"))?;
                        ensure(brute.contains(&w), || format!("P({}) supremum {} is no witness", p.atoms(), p.label(w)))?;
                        instances += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{instances} instances"))
}

fn linear_bridge(m: usize) -> Result<usize, String> {
    let v = standard::exponent_variety(m);
    let cat = Catalog::build(&v, 4, Limits::default()).map_err(|e| e.to_string())?;
    let zm = standard::cyclic(m);
    let g = TableGroup::new(&zm).map_err(|e| e.to_string())?;
    let mut n = 0;
    for sub in subalgebras(&zm) {
        let gens = generating_set(&zm, &sub);
        let names = generator_names(&zm, &gens, "x");
        let (sub_alg, _) = zm.restrict(&sub).map_err(|e| e.to_string())?;
        let asg: Assignment = names.iter().cloned().zip(gens.iter().copied()).collect();
        for member in cat.members() {
            for emb in enumerate_homs(&sub_alg, &member.algebra).into_iter().filter(|h| is_injective(h)) {
                for a in 0..member.algebra.size() {
                    let base_gens = names
                        .iter()
                        .cloned()
                        .zip(gens.iter().map(|e| emb[sub.binary_search(e).unwrap()]))
                        .collect();
                    let (ext, _) = SimpleExtension::realize(&member.algebra, base_gens, a).map_err(|e| e.to_string())?;
                    let conds = enumerate_conditions(&ext, 2, 1 << 20).map_err(|e| e.to_string())?;
                    let lcs = conds
                        .iter()
                        .map(|c| normalize_condition(c, &g, &asg, "x"))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| e.to_string())?;
                    for b in 0..m {
                        let direct = satisfies_conditions(&zm, &asg, "x", b, &conds)
                            .map_err(|e| e.to_string())?
                            .is_satisfied();
                        ensure(direct == lcs.iter().all(|lc| solves(&g, lc, &b)), || format!("Z{m} b={b}"))?;
                        n += 1;
                    }
                }
            }
        }
    }
    Ok(n)
}

fn group_pipeline() -> Outcome {
    let seed = selftest::DEFAULT_SEED;
    let terms = selftest::linearization_soundness(seed, 1000, &[2, 4, 6, 8])?;
    let bridge = linear_bridge(2)? + linear_bridge(4)?;
    let divisions = selftest::qmodz_division(seed, 20, 100)?;
    Ok(format!("{terms} terms, {bridge} bridge instances, {divisions} divisions"))
}

fn brute_force_homs(dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_tuple(cod.size(), dom.size(), |h| {
        if is_homomorphism(h, dom, cod).is_ok() {
            out.push(h.to_vec());
        }
    });
    out
}

fn golden(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(p).unwrap_or_default()
}

fn run_cli(args: &[String]) -> (Option<i32>, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_simplext"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs");
    (o.status.code(), String::from_utf8_lossy(&o.stdout).into_owned())
}

fn known_values() -> Outcome {
    let v = standard::boolean_variety();
    for (k, expected) in [(1usize, 4usize), (2, 16)] {
        let names: Vec<String> = (0..k).map(|i| format!("g{i}")).collect();
        let f = free_algebra(&v, &names, DEFAULT_FREE_CAP).map_err(|e| e.to_string())?;
        // independent count: distinct Boolean functions of k variables
        ensure(f.size() == expected && expected == 1 << (1 << k), || format!("free Boolean k={k}: {}", f.size()))?;
    }

    let (z4, z2) = (standard::cyclic(4), standard::cyclic(2));
    let homs: BTreeSet<Vec<usize>> = enumerate_homs(&z4, &z2).into_iter().collect();
    let brute: BTreeSet<Vec<usize>> = brute_force_homs(&z4, &z2).into_iter().collect();
    ensure(homs.len() == 2 && homs == brute, || format!("{} homs Z4 -> Z2", homs.len()))?;

    let ba2_models = enumerate_models(v.signature(), v.identities(), 2, true, DEFAULT_SEARCH_CAP).map_err(|e| e.to_string())?;
    let ba3_models = enumerate_models(v.signature(), v.identities(), 3, true, DEFAULT_SEARCH_CAP).map_err(|e| e.to_string())?;
    ensure(ba2_models.len() == 1 && ba3_models.is_empty(), || {
        format!("Boolean models: {} of size 2, {} of size 3", ba2_models.len(), ba3_models.len())
    })?;
    let labelled = enumerate_models(v.signature(), v.identities(), 2, false, DEFAULT_SEARCH_CAP).map_err(|e| e.to_string())?;
    ensure(labelled.len() == 2, || format!("{} labelled two-element Boolean algebras", labelled.len()))?;

    // no homomorphism Z4 -> Z2 sends 2 to 1, so the partial map cannot extend
    ensure(brute_force_homs(&z4, &z2).iter().all(|h| h[2] != 1), || "2->1 extends".into())?;
    let g = golden("check-injective-z2-exp4.txt");
    for line in ["  member: z4", "  subalgebra: {0,2}", "  hom: 0->0 2->1"] {
        ensure(g.lines().any(|l| l == line), || format!("golden report lacks `{line}`"))?;
    }
    let args: Vec<String> = ["check-injective", "--algebra", "fixtures/z2.alg", "--variety", "fixtures/exp4.var", "--max-size", "4"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let (code, out) = run_cli(&args);
    ensure(code == Some(1) && out == g, || "injectivity witness differs from the golden report".into())?;
    Ok("all match".into())
}

fn cli_end_to_end() -> Outcome {
    let cases: [(&[&str], i32, &str); 3] = [
        (
            &["check-injective", "--algebra", "fixtures/z2.alg", "--variety", "fixtures/exp4.var", "--max-size", "4"],
            1,
            "check-injective-z2-exp4.txt",
        ),
        (
            &["crosscheck", "--algebra", "fixtures/ba4.alg", "--variety", "fixtures/boolean.var", "--max-size", "8", "--depth", "2"],
            0,
            "crosscheck-ba4-boolean.txt",
        ),
        (
            &["check-complete", "--algebra", "fixtures/trivial.alg", "--variety", "fixtures/boolean.var", "--max-size", "2"],
            0,
            "check-complete-trivial-boolean.txt",
        ),
    ];
    for (args, code, name) in cases {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let (got, out) = run_cli(&args);
        ensure(got == Some(code), || format!("{}: exit {got:?}, expected {code}", args[0]))?;
        ensure(out == golden(name), || format!("{}: report differs from {name}", args[0]))?;
        let line = out
            .lines()
            .find_map(|l| l.strip_prefix("replay: "))
            .ok_or_else(|| format!("{name}: no replay line"))?;
        let words = shlex::split(line).ok_or_else(|| format!("{name}: replay line does not split"))?;
        ensure(words.first().map(String::as_str) == Some("simplext"), || format!("{name}: replay program"))?;
        let (got2, out2) = run_cli(&words[1..]);
        ensure(got2 == Some(code) && out2 == out, || format!("{name}: replay differs"))?;
    }
    Ok("3 reports, 3 replays".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 transport audit", Duration::from_secs(10), transport_audit),
        ("2 bounded conditions decide extension", Duration::from_secs(300), bounded_conditions),
        ("3 quotient construction", Duration::from_secs(300), quotient_construction),
        ("4 completeness equals injectivity", Duration::from_secs(600), completeness_equals_injectivity),
        ("5 meet criterion exhaustive", Duration::from_secs(1), meet_criterion),
        ("6 powerset supremum pipeline", Duration::from_secs(120), powerset_supremum),
        ("7 abelian group pipeline", Duration::from_secs(30), group_pipeline),
        ("8 known values", Duration::from_secs(60), known_values),
        ("9 cli end-to-end", Duration::from_secs(60), cli_end_to_end),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the time limit")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {name}: {detail} ({:.2}s, limit {}s)",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
