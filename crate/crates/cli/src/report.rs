//! Plain-text witness reports. Field order is fixed and nothing depends on
//! timing, so a replayed command prints the same bytes.

use std::fmt::Write as _;

use simplext_core::completeness::{
    Catalog, CheckStats, CompletenessWitness, Crosscheck, ExtensionSource, InjectivityWitness, Refutation, Verdict,
};
use simplext_core::{Elem, FiniteAlgebra};

/// Where a report came from.
#[derive(Clone, Debug)]
pub struct Header {
    pub command: &'static str,
    pub algebra_path: String,
    pub algebra_size: usize,
    pub variety_name: String,
    pub variety_path: String,
    pub max_size: usize,
    pub depth: Option<usize>,
}

impl Header {
    fn write(&self, s: &mut String) {
        let _ = writeln!(s, "command: {}", self.command);
        let plural = if self.algebra_size == 1 { "" } else { "s" };
        let _ = writeln!(s, "algebra: {} ({} element{plural})", self.algebra_path, self.algebra_size);
        let _ = writeln!(s, "variety: {} ({})", self.variety_name, self.variety_path);
        let _ = writeln!(s, "max-size: {}", self.max_size);
        if let Some(d) = self.depth {
            let _ = writeln!(s, "depth: {d}");
        }
    }
}

/// `{a,b}` in the labels of `alg`.
pub fn set(alg: &FiniteAlgebra, elems: &[Elem]) -> String {
    let parts: Vec<&str> = elems.iter().map(|&e| alg.label(e)).collect();
    format!("{{{}}}", parts.join(","))
}

/// `a->x b->y`: `dom[i]` in `dom_alg` goes to `values[i]` in `cod_alg`.
pub fn map(dom_alg: &FiniteAlgebra, dom: &[Elem], cod_alg: &FiniteAlgebra, values: &[Elem]) -> String {
    let parts: Vec<String> = dom
        .iter()
        .zip(values)
        .map(|(&d, &v)| format!("{}->{}", dom_alg.label(d), cod_alg.label(v)))
        .collect();
    parts.join(" ")
}

fn member_algebra<'a>(catalog: &'a Catalog, name: &str) -> &'a FiniteAlgebra {
    &catalog.get(name).expect("witness names a catalog member").algebra
}

fn write_completeness_witness(s: &mut String, w: &CompletenessWitness, b: &FiniteAlgebra, catalog: &Catalog) {
    let _ = writeln!(s, "  subalgebra: {}", set(b, &w.subalgebra));
    match &w.source {
        ExtensionSource::Realized {
            member,
            embedding,
            ext_elem,
        } => {
            let m = member_algebra(catalog, member);
            let _ = writeln!(
                s,
                "  source: realized in {member}, embedding {}, adjoining {}",
                map(b, &w.subalgebra, m, embedding),
                m.label(*ext_elem)
            );
        }
        ExtensionSource::Constructed {
            member,
            domain,
            ext_elem,
            hom,
        } => {
            let m = member_algebra(catalog, member);
            let _ = writeln!(
                s,
                "  source: constructed from {member}, subalgebra {} adjoining {}, onto the subalgebra by {}",
                set(m, domain),
                m.label(*ext_elem),
                map(m, domain, b, hom)
            );
        }
    }
    let ext = &w.extension;
    let amb = ext.ambient();
    let gens: Vec<String> = ext
        .base_gens()
        .iter()
        .map(|(n, e)| format!("{n}={}", amb.label(*e)))
        .collect();
    let _ = writeln!(
        s,
        "  extension: {} elements, base generators [{}], {}={}",
        amb.size(),
        gens.join(" "),
        ext.var(),
        amb.label(ext.ext_elem())
    );
    let bm: Vec<String> = ext
        .base_gens()
        .iter()
        .zip(&w.base_map)
        .map(|((n, _), &e)| format!("{n}->{}", b.label(e)))
        .collect();
    let _ = writeln!(s, "  base map: [{}]", bm.join(" "));
    let _ = writeln!(s, "  refutations:");
    for (c, r) in w.refutations.iter().enumerate() {
        match r {
            Refutation::Condition(cond) => {
                let _ = writeln!(s, "    {}={}: violates {cond}", ext.var(), b.label(c));
            }
            Refutation::NoHomomorphism => {
                let _ = writeln!(s, "    {}={}: no homomorphism", ext.var(), b.label(c));
            }
        }
    }
}

fn write_injectivity_witness(s: &mut String, w: &InjectivityWitness, b: &FiniteAlgebra, catalog: &Catalog) {
    let m = member_algebra(catalog, &w.member);
    let _ = writeln!(s, "  member: {}", w.member);
    let _ = writeln!(s, "  subalgebra: {}", set(m, &w.subalgebra));
    let _ = writeln!(s, "  hom: {}", map(m, &w.subalgebra, b, &w.hom));
    let d = &w.dead_end;
    let _ = writeln!(
        s,
        "  dead end: {} on {} does not extend to {}",
        map(m, &d.domain, b, &d.hom),
        set(m, &d.domain),
        m.label(d.next)
    );
}

fn write_stats(s: &mut String, st: &CheckStats) {
    let _ = writeln!(s, "  members: {}", st.members);
    let _ = writeln!(s, "  subalgebras: {}", st.subalgebras);
    let _ = writeln!(s, "  realized extensions: {}", st.realized);
    let _ = writeln!(s, "  constructed extensions: {}", st.constructed);
    let _ = writeln!(s, "  homomorphisms: {}", st.homs);
    let _ = writeln!(s, "  deeper conditions needed: {}", st.depth_insufficient);
}

fn verdict_line(passed: bool, what: &str, max_size: usize) -> String {
    if passed {
        format!("verdict: PASS ({what} up to size {max_size})")
    } else {
        format!("verdict: FAIL (not {what} up to size {max_size})")
    }
}

pub fn completeness(
    h: &Header,
    v: &Verdict<CompletenessWitness>,
    b: &FiniteAlgebra,
    catalog: &Catalog,
    replay: &str,
) -> String {
    let mut s = String::new();
    h.write(&mut s);
    let _ = writeln!(s, "{}", verdict_line(v.passed(), "complete", h.max_size));
    if let Some(w) = &v.witness {
        let _ = writeln!(s, "witness:");
        write_completeness_witness(&mut s, w, b, catalog);
    }
    let _ = writeln!(s, "statistics:");
    write_stats(&mut s, &v.stats);
    let _ = writeln!(s, "replay: {replay}");
    s
}

pub fn injectivity(
    h: &Header,
    v: &Verdict<InjectivityWitness>,
    b: &FiniteAlgebra,
    catalog: &Catalog,
    replay: &str,
) -> String {
    let mut s = String::new();
    h.write(&mut s);
    let _ = writeln!(s, "{}", verdict_line(v.passed(), "injective", h.max_size));
    if let Some(w) = &v.witness {
        let _ = writeln!(s, "witness:");
        write_injectivity_witness(&mut s, w, b, catalog);
    }
    let _ = writeln!(s, "statistics:");
    write_stats(&mut s, &v.stats);
    let _ = writeln!(s, "replay: {replay}");
    s
}

pub fn agreement_line(x: &Crosscheck) -> &'static str {
    match (x.complete.passed(), x.injective.passed()) {
        (true, true) => "verdicts agree: complete ∧ injective",
        (false, false) => "verdicts agree: neither complete nor injective",
        (true, false) => "verdicts DISAGREE: complete but not injective",
        (false, true) => "verdicts DISAGREE: injective but not complete",
    }
}

pub fn crosscheck(h: &Header, x: &Crosscheck, b: &FiniteAlgebra, catalog: &Catalog, replay: &str) -> String {
    let mut s = String::new();
    h.write(&mut s);
    let _ = writeln!(s, "{}", agreement_line(x));
    let _ = writeln!(s, "completeness: {}", if x.complete.passed() { "PASS" } else { "FAIL" });
    if let Some(w) = &x.complete.witness {
        write_completeness_witness(&mut s, w, b, catalog);
    }
    let _ = writeln!(s, "injectivity: {}", if x.injective.passed() { "PASS" } else { "FAIL" });
    if let Some(w) = &x.injective.witness {
        write_injectivity_witness(&mut s, w, b, catalog);
    }
    if !x.complete.passed() {
        let _ = writeln!(s, "injectivity witness from the completeness witness:");
        match &x.injectivity_from_completeness {
            Some(w) => write_injectivity_witness(&mut s, w, b, catalog),
            None => {
                let _ = writeln!(s, "  none");
            }
        }
    }
    if !x.injective.passed() {
        let _ = writeln!(s, "completeness witness from the injectivity witness:");
        match &x.completeness_from_injectivity {
            Some(w) => write_completeness_witness(&mut s, w, b, catalog),
            None => {
                let _ = writeln!(s, "  none");
            }
        }
    }
    if let Some(d) = x.deeper_agrees {
        let _ = writeln!(s, "deeper window restores agreement: {}", if d { "yes" } else { "no" });
    }
    let _ = writeln!(s, "statistics (completeness):");
    write_stats(&mut s, &x.complete.stats);
    let _ = writeln!(s, "statistics (injectivity):");
    write_stats(&mut s, &x.injective.stats);
    let _ = writeln!(s, "replay: {replay}");
    s
}

/// Report for a check stopped by a resource cap.
pub fn capped(h: &Header, reason: &str, catalog: &Catalog, replay: &str) -> String {
    let mut s = String::new();
    h.write(&mut s);
    let _ = writeln!(s, "verdict: CAP ({reason})");
    let _ = writeln!(s, "statistics:");
    let _ = writeln!(s, "  catalog complete up to size: {}", catalog.size_bound());
    let _ = writeln!(s, "  members: {}", catalog.members().len());
    let _ = writeln!(s, "replay: {replay}");
    s
}
