#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use cks_core::interchange::{parse_fcif, parse_views};
use cks_core::{AttributeToken, ConceptLattice, FormalContext, KnowledgeSystem};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn k1_context() -> FormalContext {
    parse_fcif(&read_fixture("k1.fcif")).unwrap().to_context().unwrap()
}

pub fn k1() -> ConceptLattice {
    ConceptLattice::build(k1_context())
}

pub fn docs_context() -> FormalContext {
    parse_fcif(&read_fixture("docs.fcif")).unwrap().to_context().unwrap()
}

pub fn docs_system() -> Arc<KnowledgeSystem> {
    let views = parse_views(&read_fixture("docs.views")).unwrap();
    Arc::new(KnowledgeSystem::prepare(&docs_context(), &views, true).unwrap())
}

/// `rows x cols` context with each cross present with probability `density`.
pub fn random_context(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> FormalContext {
    let objects = (0..rows).map(|i| format!("g{i}")).collect();
    let attributes = (0..cols).map(|j| AttributeToken::bare(format!("m{j}"))).collect();
    let mut incidence = Vec::new();
    for g in 0..rows {
        for m in 0..cols {
            if rng.gen_bool(density) {
                incidence.push((g, m));
            }
        }
    }
    FormalContext::new(objects, attributes, incidence).unwrap()
}

/// `count` contexts of up to 8 x 8 from a fixed seed.
pub fn random_contexts(seed: u64, count: usize) -> Vec<FormalContext> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let rows = rng.gen_range(0..=8);
            let cols = rng.gen_range(0..=8);
            let density = rng.gen_range(0.1..0.9);
            random_context(&mut rng, rows, cols, density)
        })
        .collect()
}

/// Concepts by brute force from the raw cross table, as sorted
/// (extent names, intent names) pairs. Shares no code with the library
/// beyond reading the table.
pub fn brute_force_concepts(ctx: &FormalContext) -> BTreeSet<(Vec<String>, Vec<String>)> {
    let n = ctx.object_count();
    let m = ctx.attribute_count();
    let table: Vec<Vec<bool>> = (0..n).map(|g| (0..m).map(|a| ctx.incident(g, a)).collect()).collect();
    let mut out = BTreeSet::new();
    for mask in 0u32..(1u32 << n) {
        let members: Vec<usize> = (0..n).filter(|g| mask & (1 << g) != 0).collect();
        let intent: Vec<usize> = (0..m).filter(|&a| members.iter().all(|&g| table[g][a])).collect();
        let extent: Vec<usize> = (0..n).filter(|&g| intent.iter().all(|&a| table[g][a])).collect();
        let mut e: Vec<String> = extent.iter().map(|&g| ctx.objects()[g].clone()).collect();
        let mut i: Vec<String> = intent.iter().map(|&a| ctx.attributes()[a].to_string()).collect();
        e.sort();
        i.sort();
        out.insert((e, i));
    }
    out
}

pub fn lattice_concepts(l: &ConceptLattice) -> BTreeSet<(Vec<String>, Vec<String>)> {
    let ctx = l.context();
    l.concepts()
        .iter()
        .map(|c| {
            let mut e: Vec<String> = ctx.object_names(&c.extent).map(str::to_owned).collect();
            let mut i: Vec<String> = ctx.attribute_tokens(&c.intent).map(ToString::to_string).collect();
            e.sort();
            i.sort();
            (e, i)
        })
        .collect()
}

/// Pairs `(i, j)` with `extent(i)` strictly inside `extent(j)`.
pub fn strict_pairs(l: &ConceptLattice) -> BTreeSet<(usize, usize)> {
    let cs = l.concepts();
    let mut out = BTreeSet::new();
    for i in 0..cs.len() {
        for j in 0..cs.len() {
            if i != j && cs[i].extent.is_subset(&cs[j].extent) {
                out.insert((i, j));
            }
        }
    }
    out
}
