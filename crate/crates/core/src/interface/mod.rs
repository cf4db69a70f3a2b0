//! Command line and HTTP front ends.
//!
//! Both speak 1-based concept indexes; the library underneath is 0-based.
//! JSON payloads are built from `serde_json::Value`, whose maps keep keys
//! sorted, so equal inputs always serialize to equal bytes.

pub mod cli;
pub mod service;
pub mod workspace;

use serde_json::{json, Value};

use crate::browsing::{format_rank, Display, KnowledgeSystem, QueryResult, RankedOrder};
use crate::linkage::{ratio_f64, CrispLink, LinkageMatrix};

pub use workspace::Workspace;

fn exact(r: num_rational::Ratio<usize>) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Extent, intent, label and covers of concept `k`.
pub fn concept_json(system: &KnowledgeSystem, k: usize) -> Value {
    let lattice = system.lattice();
    let ctx = lattice.context();
    let c = &lattice.concepts()[k];
    let one_based = |ks: &[usize]| ks.iter().map(|&i| i + 1).collect::<Vec<_>>();
    json!({
        "index": k + 1,
        "extent": ctx.object_names(&c.extent).collect::<Vec<_>>(),
        "intent": ctx.attribute_tokens(&c.intent).map(ToString::to_string).collect::<Vec<_>>(),
        "views": system.view_names(k),
        "label": system.full_label(k).names,
        "upper_covers": one_based(lattice.upper_covers(k).unwrap_or(&[])),
        "lower_covers": one_based(lattice.lower_covers(k).unwrap_or(&[])),
    })
}

pub fn ranking_json(order: &RankedOrder) -> Value {
    let groups: Vec<Value> = order
        .groups
        .iter()
        .map(|g| {
            json!({
                "rank": format_rank(g.rank),
                "exact": exact(g.rank),
                "labels": g.labels.iter().map(|l| json!({"concept": l.concept + 1, "names": l.names})).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "display": match order.display { Display::Direct => "direct", Display::Reverse => "reverse" },
        "groups": groups,
        "text": order.render(),
    })
}

pub fn query_json(kind: &str, result: &QueryResult) -> Value {
    json!({
        "kind": kind,
        "landing": result.landing.map(|k| k + 1),
        "ranking": ranking_json(&result.ranking),
    })
}

pub fn linkage_json(m: &LinkageMatrix) -> Value {
    json!({
        "mode": m.mode().name(),
        "dimension": m.dimension(),
        "exact": m.rows().iter().map(|row| row.iter().map(|&r| exact(r)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "values": m.to_f64(),
    })
}

pub fn crisp_json(threshold: f64, links: &[CrispLink]) -> Value {
    json!({
        "threshold": threshold,
        "links": links
            .iter()
            .map(|l| json!({
                "source": l.source + 1,
                "target": l.target + 1,
                "exact": exact(l.weight),
                "weight": ratio_f64(l.weight),
            }))
            .collect::<Vec<_>>(),
    })
}
