//! From metadata and hyperlinks to crisp link structure.
//!
//! Link graph file:
//!
//! ```text
//! node index.html
//! node plan1.ps
//! edge index.html plan1.ps
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::browsing::KnowledgeSystem;
use crate::context::{apposition, AttributeToken, ConceptualView, FormalContext};
use crate::error::{Error, Result};
use crate::lattice::ConceptLattice;
use crate::linkage::{crispify, format_links, linkage_matrix, CrispLink, LinkageMatrix, Mode};
use crate::scaling::{interpret, ConceptualScale, MetadataRecord};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WebObjectGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
}

/// Which end of a hyperlink holds the other as an attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// The source of a link has its target as an attribute.
    #[default]
    CrossReferential,
    /// The target of a link has its source as an attribute.
    Hierarchical,
}

impl std::str::FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cross" | "cross-referential" => Ok(Orientation::CrossReferential),
            "hier" | "hierarchical" => Ok(Orientation::Hierarchical),
            other => Err(format!(
                "unknown orientation `{other}` (expected cross or hierarchical)"
            )),
        }
    }
}

pub fn parse_link_graph(text: &str) -> Result<WebObjectGraph> {
    let mut graph = WebObjectGraph::default();
    for (i, line) in text.lines().enumerate() {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            [] => {}
            [w, ..] if w.starts_with('#') => {}
            ["node", name] => graph.nodes.push((*name).to_owned()),
            ["edge", src, dst] => graph.edges.push(((*src).to_owned(), (*dst).to_owned())),
            _ => {
                return Err(Error::syntax(
                    i + 1,
                    1,
                    "expected `node <name>` or `edge <source> <target>`",
                ))
            }
        }
    }
    Ok(graph)
}

pub fn link_token(node: &str) -> AttributeToken {
    AttributeToken::bare(format!("link:{node}"))
}

/// Objects are the nodes; each node also names one `link:<node>` attribute.
pub fn ingest_link_graph(graph: &WebObjectGraph, orientation: Orientation) -> Result<FormalContext> {
    let mut seen = HashSet::new();
    for node in &graph.nodes {
        if !seen.insert(node.as_str()) {
            return Err(Error::GraphIntegrity(format!("node `{node}` declared twice")));
        }
    }
    let position = |name: &str| graph.nodes.iter().position(|n| n == name);
    let mut incidence = Vec::new();
    for (src, dst) in &graph.edges {
        let (s, d) = match (position(src), position(dst)) {
            (Some(s), Some(d)) => (s, d),
            _ => {
                return Err(Error::GraphIntegrity(format!(
                    "edge `{src}` -> `{dst}` has an undeclared endpoint"
                )))
            }
        };
        if s == d {
            log::warn!("dropping self-link on `{src}`");
            continue;
        }
        incidence.push(match orientation {
            Orientation::CrossReferential => (s, d),
            Orientation::Hierarchical => (d, s),
        });
    }
    let attributes = graph.nodes.iter().map(|n| link_token(n)).collect();
    FormalContext::new(graph.nodes.clone(), attributes, incidence)
}

/// Apposition of hyperlink incidence with metadata incidence over the same
/// objects. The link context's objects may be listed in any order. A link
/// context with no attributes adds nothing. If a metadata token collides with
/// a link token, metadata tags are prefixed with `meta:`.
pub fn enrich(link_ctx: &FormalContext, meta_ctx: &FormalContext) -> Result<FormalContext> {
    if link_ctx.attribute_count() == 0 && link_ctx.object_count() == 0 {
        return Ok(meta_ctx.clone());
    }
    let link_ctx = link_ctx.reorder_objects(meta_ctx.objects())?;
    match apposition(&link_ctx, meta_ctx) {
        Err(Error::AttributeCollision(_)) => apposition(&link_ctx, &meta_ctx.with_tag_prefix("meta:")),
        other => other,
    }
}

#[derive(Debug, Clone)]
pub struct HyperizationConfig {
    pub scales: Vec<ConceptualScale>,
    pub threshold: f64,
    pub orientation: Orientation,
    /// Skip purification and reduction and count every raw element.
    pub raw_counts: bool,
}

impl HyperizationConfig {
    pub fn new(scales: Vec<ConceptualScale>, threshold: f64) -> Result<HyperizationConfig> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::ThresholdOutOfRange(threshold));
        }
        Ok(HyperizationConfig {
            scales,
            threshold,
            orientation: Orientation::default(),
            raw_counts: false,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Hyperization {
    /// The interpreted (and enriched) context before purification.
    pub context: FormalContext,
    pub system: KnowledgeSystem,
    pub matrix: LinkageMatrix,
    pub links: Vec<CrispLink>,
}

impl Hyperization {
    pub fn lattice(&self) -> &ConceptLattice {
        self.system.lattice()
    }

    /// Object-to-object hyperlinks: `g -> h` whenever a crisp link joins
    /// the object concepts of `g` and `h`. Covers every interpreted object,
    /// including fused and reduced-away ones.
    pub fn object_links(&self) -> Result<Vec<(String, String, f64)>> {
        let ctx = &self.context;
        let mut concept_of = Vec::with_capacity(ctx.object_count());
        for name in ctx.objects() {
            concept_of.push(self.system.concept_named(name)?);
        }
        let mut out = Vec::new();
        for link in &self.links {
            for (g, &cg) in concept_of.iter().enumerate() {
                if cg != link.source {
                    continue;
                }
                for (h, &ch) in concept_of.iter().enumerate() {
                    if ch == link.target && g != h {
                        out.push((ctx.objects()[g].clone(), ctx.objects()[h].clone(), link.weight_f64()));
                    }
                }
            }
        }
        out.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        Ok(out)
    }
}

/// interpret, enrich, purify, reduce, build, measure, crispify.
pub fn hyperize(
    records: &[MetadataRecord],
    graph: Option<&WebObjectGraph>,
    views: &[ConceptualView],
    config: &HyperizationConfig,
) -> Result<Hyperization> {
    let mut context = interpret(records, &config.scales)?;
    if let Some(graph) = graph {
        let link_ctx = ingest_link_graph(graph, config.orientation)?;
        context = enrich(&link_ctx, &context)?;
    }
    let system = KnowledgeSystem::prepare(&context, views, !config.raw_counts)?;
    let matrix = linkage_matrix(system.lattice(), Mode::Ext);
    let links = crispify(&matrix, config.threshold)?;
    Ok(Hyperization {
        context,
        system,
        matrix,
        links,
    })
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

pub fn page_name(k: usize) -> String {
    format!("concept-{}.html", k + 1)
}

fn page(system: &KnowledgeSystem, k: usize, links: &[CrispLink]) -> String {
    let lattice = system.lattice();
    let ctx = lattice.context();
    let concept = &lattice.concepts()[k];
    let label = system.full_label(k).to_string();
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"><title>");
    out.push_str(&escape(&label));
    out.push_str("</title></head>\n<body>\n<h1>");
    out.push_str(&escape(&label));
    out.push_str("</h1>\n<h2>Intent</h2>\n<ul>\n");
    let mut intent: Vec<String> = ctx.attribute_tokens(&concept.intent).map(ToString::to_string).collect();
    intent.sort();
    for m in intent {
        let _ = writeln!(out, "<li>{}</li>", escape(&m));
    }
    out.push_str("</ul>\n<h2>Extent</h2>\n<ul>\n");
    let mut extent: Vec<&str> = ctx.object_names(&concept.extent).collect();
    extent.sort_unstable();
    for g in extent {
        let _ = writeln!(out, "<li>{}</li>", escape(g));
    }
    out.push_str("</ul>\n<h2>Links</h2>\n<ul>\n");
    for link in links.iter().filter(|l| l.source == k && system.is_named(l.target)) {
        let _ = writeln!(
            out,
            "<li><a href=\"{}\">{}</a> {:.6}</li>",
            page_name(link.target),
            escape(&system.full_label(link.target).to_string()),
            link.weight_f64()
        );
    }
    out.push_str("</ul>\n</body>\n</html>\n");
    out
}

/// Writes one page per named concept and `links.txt` into `out_dir`.
/// Returns the written paths, pages first.
pub fn emit_web(system: &KnowledgeSystem, links: &[CrispLink], out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for k in 0..system.lattice().len() {
        if !system.is_named(k) {
            continue;
        }
        let path = out_dir.join(page_name(k));
        fs::write(&path, page(system, k, links))?;
        written.push(path);
    }
    let path = out_dir.join("links.txt");
    fs::write(&path, format_links(links))?;
    written.push(path);
    Ok(written)
}

/// Adjacency export: concepts with labels, and weighted links, all 1-based.
pub fn graph_json(system: &KnowledgeSystem, links: &[CrispLink]) -> Value {
    let lattice = system.lattice();
    let nodes: Vec<Value> = (0..lattice.len())
        .map(|k| {
            let targets: Vec<usize> = links.iter().filter(|l| l.source == k).map(|l| l.target + 1).collect();
            json!({
                "index": k + 1,
                "label": system.full_label(k).names,
                "adjacent": targets,
            })
        })
        .collect();
    let edges: Vec<Value> = links
        .iter()
        .map(|l| json!({"source": l.source + 1, "target": l.target + 1, "weight": l.weight_f64()}))
        .collect();
    json!({"nodes": nodes, "links": edges})
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> WebObjectGraph {
        parse_link_graph("node A\nnode B\nedge A B\n").unwrap()
    }

    #[test]
    fn orientations() {
        let cross = ingest_link_graph(&ab(), Orientation::CrossReferential).unwrap();
        let names: Vec<String> = cross.attribute_tokens(cross.row(0)).map(ToString::to_string).collect();
        assert_eq!(names, ["link:B"]);
        assert!(cross.row(1).is_clear());
        let hier = ingest_link_graph(&ab(), Orientation::Hierarchical).unwrap();
        assert!(hier.row(0).is_clear());
        let names: Vec<String> = hier.attribute_tokens(hier.row(1)).map(ToString::to_string).collect();
        assert_eq!(names, ["link:A"]);
        let empty = ingest_link_graph(&WebObjectGraph::default(), Orientation::CrossReferential).unwrap();
        assert_eq!((empty.object_count(), empty.attribute_count()), (0, 0));
    }

    #[test]
    fn graph_integrity() {
        let dangling = parse_link_graph("node A\nedge A Z\n").unwrap();
        assert!(matches!(
            ingest_link_graph(&dangling, Orientation::CrossReferential),
            Err(Error::GraphIntegrity(_))
        ));
        let selfie = parse_link_graph("node A\nedge A A\n").unwrap();
        let ctx = ingest_link_graph(&selfie, Orientation::CrossReferential).unwrap();
        assert!(ctx.row(0).is_clear());
        assert!(parse_link_graph("edge A\n").is_err());
    }

    #[test]
    fn enrich_two_nodes() {
        let link = ingest_link_graph(&ab(), Orientation::CrossReferential).unwrap();
        let meta = FormalContext::from_table(&["kind=page"], &[("B", &["kind=page"]), ("A", &[])]).unwrap();
        let out = enrich(&link, &meta).unwrap();
        assert_eq!(out.attribute_count(), 3);
        assert_eq!(out.objects(), meta.objects());
        assert_eq!(enrich(&FormalContext::default(), &meta).unwrap(), meta);
        let other = FormalContext::from_table(&[], &[("C", &[])]).unwrap();
        assert!(matches!(enrich(&link, &other), Err(Error::ObjectSetMismatch)));
    }

    #[test]
    fn single_record_has_no_links() {
        let config = HyperizationConfig::new(vec![ConceptualScale::nominal("p", &["x"]).unwrap()], 1.0).unwrap();
        let h = hyperize(&[MetadataRecord::new("r").with("p", "x")], None, &[], &config).unwrap();
        assert_eq!(h.lattice().len(), 1);
        assert!(h.links.is_empty());
        assert!(HyperizationConfig::new(vec![], 0.0).is_err());
    }
}
