//! Seeded randomized audits of the Boolean and abelian-group instances.
//! Each returns the number of cases checked, or a description of the first
//! failure.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simplext_core::boolean::{dnf_normalize, dnf_value, lemma2_check, PowersetAlgebra};
use simplext_core::group::{linearize, solves, AbelianGroup, LinearCondition, QmodZ, QmodZElement, TableGroup};
use simplext_core::standard;
use simplext_core::term::{eval_term, random_term, Assignment};

pub const DEFAULT_SEED: u64 = 1729;

pub type Audit = Result<usize, String>;

/// Both sides of the meet criterion agree on every triple, 1 to 3 atoms.
pub fn lemma2_exhaustive() -> Audit {
    let mut n = 0;
    for atoms in 1..=3 {
        let p = PowersetAlgebra::new(atoms);
        for a in 0..p.size() {
            for b in 0..p.size() {
                for c in 0..p.size() {
                    let (l, r) = lemma2_check(&p, a, b, c);
                    if l != r {
                        return Err(format!("P({atoms}) a={} b={} c={}", p.label(a), p.label(b), p.label(c)));
                    }
                    n += 1;
                }
            }
        }
    }
    Ok(n)
}

/// Random terms of height at most 3 over `P(3)` agree with their
/// decomposition at every point.
pub fn dnf_soundness(seed: u64, cases: usize) -> Audit {
    let p = PowersetAlgebra::new(3);
    let sig = p.algebra().signature().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let t = random_term(&sig, &["x", "k", "l"], 3, &mut |n| rng.gen_range(0..n));
        let asg: Assignment = [("k".to_string(), rng.gen_range(0..8)), ("l".to_string(), rng.gen_range(0..8))]
            .into_iter()
            .collect();
        let bc = dnf_normalize(&t, &p, &asg, "x").map_err(|e| e.to_string())?;
        for x in 0..p.size() {
            let mut full = asg.clone();
            full.insert("x".into(), x);
            if dnf_value(&p, bc, x) != eval_term(&t, p.algebra(), &full).map_err(|e| e.to_string())? {
                return Err(format!("{t} at x={}", p.label(x)));
            }
        }
    }
    Ok(cases)
}

/// Random group terms of height at most 3 in each `Z_m` equal `n·x + c`
/// for their extracted coefficients, at every `x`. `cases` terms in total.
pub fn linearization_soundness(seed: u64, cases: usize, moduli: &[usize]) -> Audit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..cases {
        let m = moduli[i % moduli.len()];
        let alg = standard::cyclic(m);
        let g = TableGroup::new(&alg).map_err(|e| e.to_string())?;
        let t = random_term(alg.signature(), &["x", "u", "w"], 3, &mut |n| rng.gen_range(0..n));
        let base: BTreeMap<String, usize> = [("u".to_string(), rng.gen_range(0..m)), ("w".to_string(), rng.gen_range(0..m))]
            .into_iter()
            .collect();
        let (n, c) = linearize(&t, &g, &base, "x").map_err(|e| e.to_string())?;
        for x in 0..m {
            let mut asg = base.clone();
            asg.insert("x".into(), x);
            if eval_term(&t, &alg, &asg).map_err(|e| e.to_string())? != g.add(&g.times(n, &x), &c) {
                return Err(format!("Z{m}: {t} at x={x}"));
            }
        }
    }
    Ok(cases)
}

/// For every `1 <= n <= n_max` and `per_n` random `a`, the quotient `a/n`
/// solves `n·x = a`.
pub fn qmodz_division(seed: u64, n_max: i64, per_n: usize) -> Audit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = 0;
    for n in 1..=n_max {
        for _ in 0..per_n {
            let q = rng.gen_range(1..=1000u64);
            let a = QmodZElement::new(rng.gen_range(0..q as i64), q).expect("positive denominator");
            let lc = LinearCondition { n, a };
            let x = QmodZ.solve(&lc).ok_or_else(|| format!("{lc} unsolved"))?;
            if !solves(&QmodZ, &lc, &x) {
                return Err(format!("{lc}: {n}·{x} = {}", QmodZ.times(n, &x)));
            }
            count += 1;
        }
    }
    Ok(count)
}

pub fn run_all(seed: u64, cases: usize) -> Vec<(&'static str, Audit)> {
    vec![
        ("meet criterion (exhaustive)", lemma2_exhaustive()),
        ("dnf soundness", dnf_soundness(seed, cases)),
        ("linearization soundness", linearization_soundness(seed, cases, &[2, 4, 6, 8])),
        ("Q/Z division", qmodz_division(seed, 20, cases.div_ceil(20).max(1))),
    ]
}
