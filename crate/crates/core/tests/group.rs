use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simplext_core::algebra::{enumerate_homs, generating_set, is_injective, subalgebras};
use simplext_core::completeness::{generator_names, is_injective_upto, Catalog, Limits};
use simplext_core::extension::{enumerate_conditions, satisfies_conditions, SimpleExtension};
use simplext_core::group::{
    divisibility_report, linearize, normalize_condition, solves, AbelianGroup, LinearCondition, QmodZ, QmodZElement,
    TableGroup,
};
use simplext_core::standard;
use simplext_core::term::{eval_term, random_term, Assignment};

proptest! {
    #[test]
    fn linearization_is_sound(m in 1usize..=8, seed in any::<u64>()) {
        let alg = standard::cyclic(m);
        let g = TableGroup::new(&alg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_term(alg.signature(), &["x", "u", "w"], 3, &mut |n| rng.gen_range(0..n));
        let base: BTreeMap<String, usize> = [("u".to_string(), rng.gen_range(0..m)), ("w".to_string(), rng.gen_range(0..m))]
            .into_iter()
            .collect();
        let (n, c) = linearize(&t, &g, &base, "x").unwrap();
        for x in 0..m {
            let mut asg = base.clone();
            asg.insert("x".into(), x);
            prop_assert_eq!(eval_term(&t, &alg, &asg).unwrap(), g.add(&g.times(n, &x), &c));
        }
    }

    #[test]
    fn qmodz_division_is_exact(n in 1i64..=20, p in 0i64..1000, q in 1u64..1000) {
        let a = QmodZElement::new(p, q).unwrap();
        let lc = LinearCondition { n, a };
        let x = QmodZ.solve(&lc).unwrap();
        prop_assert!(solves(&QmodZ, &lc, &x));
        prop_assert!(x.numerator() < x.denominator());
    }
}

/// Extensions of subgroups of `Z_m` realised in exponent-`m` groups: the
/// bounded conditions and their linear forms select the same elements.
#[test]
fn linear_forms_lose_nothing() {
    for m in [2, 4] {
        let v = standard::exponent_variety(m);
        let cat = Catalog::build(&v, 4, Limits::default()).unwrap();
        let zm = standard::cyclic(m);
        let g = TableGroup::new(&zm).unwrap();
        for sub in subalgebras(&zm) {
            let gens = generating_set(&zm, &sub);
            let names = generator_names(&zm, &gens, "x");
            let (sub_alg, _) = zm.restrict(&sub).unwrap();
            let asg: Assignment = names.iter().cloned().zip(gens.iter().copied()).collect();
            for member in cat.members() {
                for emb in enumerate_homs(&sub_alg, &member.algebra).into_iter().filter(|h| is_injective(h)) {
                    for a in 0..member.algebra.size() {
                        let base_gens = names
                            .iter()
                            .cloned()
                            .zip(gens.iter().map(|e| emb[sub.binary_search(e).unwrap()]))
                            .collect();
                        let (ext, _) = SimpleExtension::realize(&member.algebra, base_gens, a).unwrap();
                        let conds = enumerate_conditions(&ext, 2, 1 << 20).unwrap();
                        let lcs: Vec<_> = conds
                            .iter()
                            .map(|c| normalize_condition(c, &g, &asg, "x").unwrap())
                            .collect();
                        for b in 0..m {
                            let direct = satisfies_conditions(&zm, &asg, "x", b, &conds).unwrap().is_satisfied();
                            assert_eq!(direct, lcs.iter().all(|lc| solves(&g, lc, &b)));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn divisibility_tracks_injectivity() {
    for (m, z2_fails) in [(2, false), (4, true)] {
        let v = standard::exponent_variety(m);
        let cat = Catalog::build(&v, 4, Limits::default()).unwrap();
        let z2 = standard::cyclic(2);
        let g = TableGroup::new(&z2).unwrap();
        let report = divisibility_report(&g, m as u64 - 1);
        let failed = !is_injective_upto(&z2, &v, &cat).unwrap().passed();
        assert_eq!(!report.is_empty(), failed);
        assert_eq!(failed, z2_fails);
    }
}
