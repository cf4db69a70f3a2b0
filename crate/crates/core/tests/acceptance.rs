//! One PASS/FAIL line per acceptance criterion. Runs without the test
//! harness so the lines always show; exits non-zero if any line fails.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use cks_core::hyperize::{emit_web, hyperize, HyperizationConfig};
use cks_core::interchange::{clif_to_fcif, fcif_to_clif, parse_clif, parse_fcif, parse_views};
use cks_core::lattice::is_order_isomorphism;
use cks_core::linkage::{ext_diff_measure, ext_linkage, ext_similarity, int_diff_measure, int_linkage, int_similarity};
use cks_core::scaling::{parse_records, parse_scales};
use cks_core::{
    crispify, enumerate_concepts_oracle, linkage_matrix, purify, reduce, BrowseSession, ConceptLattice, FcifDocument,
    FormalContext, KnowledgeSystem, Mode, Scope,
};
use common::*;
use num_rational::Ratio;
use regex::Regex;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixtures() -> Vec<(&'static str, FormalContext)> {
    vec![("K1", k1_context()), ("DOCS", docs_context())]
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut contexts = fixtures();
    contexts.extend(random_contexts(1, 200).into_iter().map(|c| ("random", c)));
    for (name, ctx) in &contexts {
        let l = ConceptLattice::build(ctx.clone());
        let brute = brute_force_concepts(ctx);
        ensure(lattice_concepts(&l) == brute, || {
            format!("{name}: lattice differs from brute force")
        })?;
        let oracle = enumerate_concepts_oracle(ctx).map_err(|e| e.to_string())?;
        ensure(oracle.len() == l.len(), || {
            format!("{name}: library oracle count differs")
        })?;
    }
    ensure(ConceptLattice::build(k1_context()).len() == 6, || {
        "K1 should have 6 concepts".into()
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 10.0, || format!("took {elapsed:?}"))
}

fn round_trips() -> Check {
    let mut cases = 0;
    for ctx in random_contexts(2, 150) {
        let (pure, _) = purify(&ctx);
        let (reduced, _) = reduce(&pure).map_err(|e| e.to_string())?;
        let fcif = FcifDocument::from_context("R", &reduced);
        let clif = fcif_to_clif(&fcif).map_err(|e| e.to_string())?;
        let back = clif_to_fcif(&clif).map_err(|e| e.to_string())?;
        ensure(
            back.to_context().map_err(|e| e.to_string())?.equivalent(&reduced),
            || "fcif->clif->fcif changed the context".into(),
        )?;
        ensure(
            fcif_to_clif(&back).map_err(|e| e.to_string())?.emit() == clif.emit(),
            || "clif->fcif->clif changed the lattice".into(),
        )?;
        cases += 1;
    }
    ensure(cases >= 100, || format!("only {cases} cases"))?;
    for name in ["k1.fcif", "docs.fcif"] {
        let text = read_fixture(name);
        ensure(parse_fcif(&text).map_err(|e| e.to_string())?.emit() == text, || {
            format!("{name} not idempotent")
        })?;
    }
    for name in ["k1.clif", "docs.clif"] {
        let text = read_fixture(name);
        ensure(parse_clif(&text).map_err(|e| e.to_string())?.emit() == text, || {
            format!("{name} not idempotent")
        })?;
    }
    let converted = fcif_to_clif(&parse_fcif(&read_fixture("k1.fcif")).unwrap())
        .unwrap()
        .emit();
    ensure(converted == read_fixture("k1.clif"), || {
        "K1 conversion differs from golden CLIF".into()
    })
}

fn measure_laws() -> Check {
    let one = Ratio::from_integer(1);
    let mut contexts = fixtures();
    contexts.extend(random_contexts(3, 30).into_iter().map(|c| ("random", c)));
    for (name, ctx) in &contexts {
        let l = ConceptLattice::build(ctx.clone());
        let t = ConceptLattice::build(ctx.transpose());
        let phi: Vec<usize> = l
            .concepts()
            .iter()
            .map(|c| {
                let mut e = t.context().empty_object_set();
                e.extend(c.intent.ones());
                t.concept_with_extent(&e).unwrap()
            })
            .collect();
        let n = l.len();
        for a in 0..n {
            let size = l.concepts()[a].extent.count_ones(..);
            for b in 0..n {
                let s = ext_similarity(&l, a, b).unwrap();
                ensure(s == ext_similarity(&l, b, a).unwrap() && s <= size, || {
                    format!("{name}: similarity law at {a},{b}")
                })?;
                if let Ok(v) = ext_linkage(&l, a, b) {
                    ensure(v <= one && (v == one) == l.leq(a, b).unwrap(), || {
                        format!("{name}: linkage law at {a},{b}")
                    })?;
                }
                ensure(
                    (int_diff_measure(&l, a, b).unwrap() == 0) == l.leq(a, b).unwrap(),
                    || format!("{name}: difference zero law at {a},{b}"),
                )?;
                ensure(
                    int_similarity(&l, a, b).unwrap() == ext_similarity(&t, phi[a], phi[b]).unwrap()
                        && int_diff_measure(&l, a, b).unwrap() == ext_diff_measure(&t, phi[a], phi[b]).unwrap()
                        && int_linkage(&l, a, b).ok() == ext_linkage(&t, phi[a], phi[b]).ok(),
                    || format!("{name}: duality at {a},{b}"),
                )?;
                for c in 0..n {
                    let d = |x, y| int_diff_measure(&l, x, y).unwrap();
                    let e = |x, y| ext_diff_measure(&l, x, y).unwrap();
                    ensure(d(a, c) <= d(a, b) + d(b, c) && e(a, c) <= e(a, b) + e(b, c), || {
                        format!("{name}: triangle at {a},{b},{c}")
                    })?;
                }
            }
        }
    }
    Ok(())
}

fn table4_shape() -> Check {
    let system = docs_system();
    let mut session = BrowseSession::new(system.clone(), Mode::Ext);
    session
        .transition(system.concept_named("Plan1").map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let sim = session.ranking().map_err(|e| e.to_string())?;
    let zero = Ratio::from_integer(0);
    let own = sim.rank_of("Plan1").ok_or("Plan1 missing")?;
    let ps = sim.rank_of("PostScript").ok_or("PostScript missing")?;
    ensure(sim.rank_of("Plan2") == Some(zero), || "Plan2 not at rank 0".into())?;
    ensure(sim.rank_of("format=text") == Some(ps), || {
        "PostScript and format=text differ".into()
    })?;
    ensure(zero < ps && ps < own, || {
        "PostScript rank not strictly between 0 and Plan1".into()
    })?;
    session.set_scope(Scope::Local).map_err(|e| e.to_string())?;
    let diff = session.ranking().map_err(|e| e.to_string())?;
    ensure(diff.rank_of("Plan1") == Some(zero), || {
        "Plan1 not at difference 0".into()
    })?;
    let one = Some(Ratio::from_integer(1));
    ensure(
        diff.rank_of("plan1.ps") == one && diff.rank_of("notes0.txt") == one,
        || "plan1.ps and notes0.txt not together at 1".into(),
    )
}

fn crispification() -> Check {
    let mut lattices: Vec<ConceptLattice> = fixtures().into_iter().map(|(_, c)| ConceptLattice::build(c)).collect();
    lattices.extend(random_contexts(4, 100).into_iter().map(ConceptLattice::build));
    for l in &lattices {
        let links: BTreeSet<(usize, usize)> = crispify(&linkage_matrix(l, Mode::Ext), 1.0)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|c| (c.source, c.target))
            .collect();
        ensure(links == strict_pairs(l), || {
            "link set differs from the strict order".into()
        })?;
    }
    Ok(())
}

fn neighborhood_laws() -> Check {
    for (name, ctx) in fixtures() {
        let l = ConceptLattice::build(ctx);
        for seed in 0..l.len() {
            let hood = l.meet_restrict(seed).map_err(|e| e.to_string())?;
            let image: BTreeSet<usize> = hood.projection.iter().copied().collect();
            ensure(image.len() == hood.lattice.len(), || {
                format!("{name}: projection at {seed} not surjective")
            })?;
            for x in 0..l.len() {
                for y in 0..l.len() {
                    let g = hood.projection[l.meet(x, y).unwrap()];
                    let m = hood.lattice.meet(hood.projection[x], hood.projection[y]).unwrap();
                    ensure(g == m, || format!("{name}: meet not preserved at {seed}: {x},{y}"))?;
                }
            }
        }
        let top = l.meet_restrict(l.top()).unwrap();
        ensure(is_order_isomorphism(&l, &top.lattice, &top.projection), || {
            format!("{name}: top neighborhood")
        })?;
        ensure(l.meet_restrict(l.bottom()).unwrap().lattice.len() == 1, || {
            format!("{name}: bottom neighborhood")
        })?;
    }
    Ok(())
}

fn purify_reduce_isomorphism() -> Check {
    let mut cases = 0;
    for ctx in random_contexts(5, 120) {
        let full = ConceptLattice::build(ctx.clone());
        let (pure, _) = purify(&ctx);
        let (reduced, _) = reduce(&pure).map_err(|e| e.to_string())?;
        let pl = ConceptLattice::build(pure);
        let rl = ConceptLattice::build(reduced);
        let map: Vec<usize> = rl
            .concepts()
            .iter()
            .map(|c| {
                let tokens: Vec<_> = rl.context().attribute_tokens(&c.intent).cloned().collect();
                pl.concept_of_attributes(&pl.context().attribute_set(&tokens).unwrap())
            })
            .collect();
        ensure(full.len() == pl.len(), || {
            "purification changed the concept count".into()
        })?;
        ensure(is_order_isomorphism(&rl, &pl, &map), || {
            "reduced lattice not isomorphic".into()
        })?;
        cases += 1;
    }
    ensure(cases >= 100, || format!("only {cases} cases"))
}

fn query_retraction() -> Check {
    let k1 = KnowledgeSystem::new(ConceptLattice::build(k1_context()), &[]).map_err(|e| e.to_string())?;
    for system in [&k1, &*docs_system()] {
        let before = system.lattice().context().clone();
        let attrs = before.attributes().to_vec();
        for mask in 0u32..(1 << attrs.len()) {
            let goal: Vec<_> = (0..attrs.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| attrs[i].clone())
                .collect();
            system.intensional_query(&goal).map_err(|e| e.to_string())?;
        }
        for g in before.objects() {
            system.extensional_query(&[g.as_str()]).map_err(|e| e.to_string())?;
        }
        ensure(system.lattice().context() == &before, || {
            "context changed by a query".into()
        })?;
    }
    let q = k1
        .intensional_query(&["b".parse().unwrap(), "c".parse().unwrap()])
        .map_err(|e| e.to_string())?;
    ensure(q.landing == Some(k1.lattice().object_concept_of("g2").unwrap()), || {
        "{b,c} does not land on g2".into()
    })
}

fn hyperize_docs() -> Check {
    let records = parse_records(&read_fixture("docs.rec")).map_err(|e| e.to_string())?;
    let config =
        HyperizationConfig::new(parse_scales(&read_fixture("docs.cfg")).unwrap(), 1.0).map_err(|e| e.to_string())?;
    let views = parse_views(&read_fixture("docs.views")).unwrap();
    let h = hyperize(&records, None, &views, &config).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let written = emit_web(&h.system, &h.links, dir.path()).map_err(|e| e.to_string())?;
    let href = Regex::new(r#"href="concept-(\d+)\.html""#).unwrap();
    let page = Regex::new(r"concept-(\d+)\.html$").unwrap();
    let mut anchors = BTreeSet::new();
    for path in &written {
        let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
        let golden =
            fs::read_to_string(fixture("docs_web").join(path.file_name().unwrap())).map_err(|e| e.to_string())?;
        ensure(text == golden, || format!("{} differs from golden", path.display()))?;
        if let Some(c) = page.captures(path.to_str().unwrap()) {
            let source: usize = c[1].parse().unwrap();
            for a in href.captures_iter(&text) {
                anchors.insert((source - 1, a[1].parse::<usize>().unwrap() - 1));
            }
        }
    }
    let named: Vec<bool> = (0..h.lattice().len()).map(|k| h.system.is_named(k)).collect();
    let order: BTreeSet<(usize, usize)> = strict_pairs(h.lattice())
        .into_iter()
        .filter(|&(a, b)| named[a] && named[b])
        .collect();
    ensure(!order.is_empty() && anchors == order, || {
        "anchors differ from the order".into()
    })
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("interchange round-trips", round_trips),
        ("measure laws", measure_laws),
        ("ranking shape on DOCS", table4_shape),
        ("crispification law", crispification),
        ("neighborhood laws", neighborhood_laws),
        ("purification and reduction isomorphism", purify_reduce_isomorphism),
        ("query retraction", query_retraction),
        ("hyperize DOCS end to end", hyperize_docs),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => println!("PASS {name}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
