//! Raw metadata records and the conceptual scales that interpret them.
//!
//! Record file:
//!
//! ```text
//! object plan1.ps
//! project plan1
//! format postscript
//!
//! object notes0.txt
//! project plan1
//! ```
//!
//! Scale file, one scale per line:
//!
//! ```text
//! nominal project plan1 plan2
//! ordinal numeric size 10 100 1000
//! ```

use std::cmp::Ordering;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use crate::context::{apposition, AttributeToken, FormalContext, Relator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetadataRecord {
    pub object_id: String,
    pub pairs: Vec<(String, String)>,
}

impl MetadataRecord {
    pub fn new(object_id: impl Into<String>) -> MetadataRecord {
        MetadataRecord {
            object_id: object_id.into(),
            pairs: Vec::new(),
        }
    }

    pub fn with(mut self, tag: &str, value: &str) -> MetadataRecord {
        self.pairs.push((tag.to_owned(), value.to_owned()));
        self
    }

    pub fn values<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.pairs
            .iter()
            .filter(move |(t, _)| t == tag)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Numeric,
    Lexicographic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleKind {
    Nominal,
    Ordinal(Comparator),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptualScale {
    tag: String,
    kind: ScaleKind,
    values: Vec<String>,
}

impl ConceptualScale {
    /// Ordinal values must already be strictly ascending.
    pub fn new(tag: impl Into<String>, kind: ScaleKind, values: Vec<String>) -> Result<ConceptualScale> {
        let tag = tag.into();
        if tag.is_empty() {
            return Err(Error::ScaleDefinition("empty tag".into()));
        }
        if values.is_empty() {
            return Err(Error::ScaleDefinition(format!("scale `{tag}` has no values")));
        }
        for (i, v) in values.iter().enumerate() {
            if v.is_empty() {
                return Err(Error::ScaleDefinition(format!("scale `{tag}` has an empty value")));
            }
            if values[..i].contains(v) {
                return Err(Error::ScaleDefinition(format!("scale `{tag}` repeats `{v}`")));
            }
        }
        let scale = ConceptualScale { tag, kind, values };
        if let ScaleKind::Ordinal(cmp) = kind {
            for w in scale.values.windows(2) {
                let ord = compare(cmp, &scale.tag, &w[0], &w[1])
                    .map_err(|_| Error::ScaleDefinition(format!("scale `{}`: `{}` is not numeric", scale.tag, w[0])))?;
                if ord != Ordering::Less {
                    return Err(Error::ScaleDefinition(format!(
                        "scale `{}` values are not ascending at `{}`",
                        scale.tag, w[1]
                    )));
                }
            }
            if cmp == Comparator::Numeric {
                parse_number(&scale.tag, scale.values.last().unwrap())
                    .map_err(|_| Error::ScaleDefinition(format!("scale `{}`: value is not numeric", scale.tag)))?;
            }
        }
        Ok(scale)
    }

    pub fn nominal(tag: &str, values: &[&str]) -> Result<ConceptualScale> {
        ConceptualScale::new(tag, ScaleKind::Nominal, values.iter().map(|s| s.to_string()).collect())
    }

    pub fn ordinal(tag: &str, cmp: Comparator, values: &[&str]) -> Result<ConceptualScale> {
        ConceptualScale::new(
            tag,
            ScaleKind::Ordinal(cmp),
            values.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn kind(&self) -> ScaleKind {
        self.kind
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    fn tokens(&self) -> Result<Vec<AttributeToken>> {
        let relator = match self.kind {
            ScaleKind::Nominal => Relator::Eq,
            ScaleKind::Ordinal(_) => Relator::Le,
        };
        self.values
            .iter()
            .map(|v| AttributeToken::new(self.tag.clone(), relator, v.clone()))
            .collect()
    }
}

fn parse_number(tag: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::ScaleValue {
            tag: tag.to_owned(),
            value: s.to_owned(),
        })
}

fn compare(cmp: Comparator, tag: &str, a: &str, b: &str) -> Result<Ordering> {
    match cmp {
        Comparator::Lexicographic => Ok(a.cmp(b)),
        Comparator::Numeric => {
            let (x, y) = (parse_number(tag, a)?, parse_number(tag, b)?);
            Ok(x.partial_cmp(&y).expect("finite numbers compare"))
        }
    }
}

/// Interprets records through one scale. Nominal values outside the scale
/// leave the object without a column for that tag.
pub fn apply_scale(records: &[MetadataRecord], scale: &ConceptualScale) -> Result<FormalContext> {
    let objects: Vec<String> = records.iter().map(|r| r.object_id.clone()).collect();
    let attributes = scale.tokens()?;
    let mut incidence = Vec::new();
    for (g, record) in records.iter().enumerate() {
        for (m, v) in scale.values.iter().enumerate() {
            let hit = match scale.kind {
                ScaleKind::Nominal => record.values(&scale.tag).any(|raw| raw == v),
                ScaleKind::Ordinal(cmp) => {
                    let mut hit = false;
                    for raw in record.values(&scale.tag) {
                        if compare(cmp, &scale.tag, raw, v)? != Ordering::Greater {
                            hit = true;
                        }
                    }
                    hit
                }
            };
            if hit {
                incidence.push((g, m));
            }
        }
    }
    let order = match scale.kind {
        ScaleKind::Nominal => Vec::new(),
        ScaleKind::Ordinal(_) => (1..scale.values.len()).map(|i| (i - 1, i)).collect(),
    };
    FormalContext::new(objects, attributes, incidence)?.with_orders(Vec::new(), order)
}

/// Apposition of every scale's context. A scale whose tokens collide with
/// an earlier one gets its tags prefixed with `s<i>:` (1-based position).
pub fn interpret(records: &[MetadataRecord], scales: &[ConceptualScale]) -> Result<FormalContext> {
    let objects: Vec<String> = records.iter().map(|r| r.object_id.clone()).collect();
    let mut ctx = FormalContext::new(objects, Vec::new(), std::iter::empty())?;
    for (i, scale) in scales.iter().enumerate() {
        let part = apply_scale(records, scale)?;
        ctx = match apposition(&ctx, &part) {
            Err(Error::AttributeCollision(_)) => apposition(&ctx, &part.with_tag_prefix(&format!("s{}:", i + 1)))?,
            other => other?,
        };
    }
    Ok(ctx)
}

pub fn parse_records(text: &str) -> Result<Vec<MetadataRecord>> {
    let mut out: Vec<MetadataRecord> = Vec::new();
    let mut open = false;
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            open = false;
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        let (key, rest) = match trimmed.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (trimmed, ""),
        };
        if !open {
            if key != "object" || rest.is_empty() {
                return Err(Error::syntax(i + 1, 1, "a record starts with `object <id>`"));
            }
            if out.iter().any(|r| r.object_id == rest) {
                return Err(Error::DuplicateDeclaration {
                    line: i + 1,
                    column: 8,
                    name: rest.to_owned(),
                });
            }
            out.push(MetadataRecord::new(rest));
            open = true;
        } else {
            if rest.is_empty() {
                return Err(Error::syntax(i + 1, 1, format!("tag `{key}` has no value")));
            }
            out.last_mut().unwrap().pairs.push((key.to_owned(), rest.to_owned()));
        }
    }
    Ok(out)
}

pub fn emit_records(records: &[MetadataRecord]) -> String {
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("object {}\n", r.object_id));
        for (t, v) in &r.pairs {
            out.push_str(&format!("{t} {v}\n"));
        }
    }
    out
}

pub fn parse_scales(text: &str) -> Result<Vec<ConceptualScale>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.is_empty() || words[0].starts_with('#') {
            continue;
        }
        let wrap = |e: Error| match e {
            Error::ScaleDefinition(msg) => Error::ScaleDefinition(format!("line {}: {msg}", i + 1)),
            other => other,
        };
        let scale = match words[0] {
            "nominal" if words.len() >= 3 => ConceptualScale::new(
                words[1],
                ScaleKind::Nominal,
                words[2..].iter().map(|s| s.to_string()).collect(),
            ),
            "ordinal" if words.len() >= 4 => {
                let cmp = match words[1] {
                    "numeric" => Comparator::Numeric,
                    "lex" => Comparator::Lexicographic,
                    other => {
                        return Err(Error::ScaleDefinition(format!(
                            "line {}: unknown comparator `{other}`",
                            i + 1
                        )))
                    }
                };
                ConceptualScale::new(
                    words[2],
                    ScaleKind::Ordinal(cmp),
                    words[3..].iter().map(|s| s.to_string()).collect(),
                )
            }
            _ => {
                return Err(Error::ScaleDefinition(format!(
                    "line {}: expected `nominal <tag> <values>` or `ordinal <numeric|lex> <tag> <values>`",
                    i + 1
                )))
            }
        };
        out.push(scale.map_err(wrap)?);
    }
    Ok(out)
}

fn title_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?is)<title[^>]*>(.*?)</title>").unwrap())
}

fn href_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"(?i)href\s*=\s*(?:"([^"]*)"|'([^']*)')"#).unwrap())
}

const TITLE_LIMIT: usize = 120;

/// Summarizes document contents into a record with `format`, `size`,
/// `title` and one `link` pair per href.
pub fn summarize_bytes(file_name: &str, bytes: &[u8], object_id: &str) -> MetadataRecord {
    let text = String::from_utf8_lossy(bytes);
    let ext = Path::new(file_name)
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let format = match ext.as_str() {
        "ps" | "eps" => "postscript",
        "html" | "htm" => "html",
        "txt" | "text" => "text",
        _ if text.starts_with("%!PS") => "postscript",
        _ if text.to_ascii_lowercase().contains("<html") => "html",
        _ => "text",
    };
    let mut record = MetadataRecord::new(object_id)
        .with("format", format)
        .with("size", &bytes.len().to_string());
    let title = match title_re().captures(&text) {
        Some(c) => Some(c[1].split_whitespace().collect::<Vec<_>>().join(" ")),
        None => text.lines().map(str::trim).find(|l| !l.is_empty()).map(str::to_owned),
    };
    if let Some(title) = title.filter(|t| !t.is_empty()) {
        let title: String = title.chars().take(TITLE_LIMIT).collect();
        record = record.with("title", &title);
    }
    for c in href_re().captures_iter(&text) {
        let target = c.get(1).or_else(|| c.get(2)).unwrap().as_str();
        record = record.with("link", target);
    }
    record
}

/// Reads and summarizes one file; the object id defaults to its file name.
pub fn summarize_document(path: &Path, object_id: Option<&str>) -> Result<MetadataRecord> {
    let bytes = std::fs::read(path)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    Ok(summarize_bytes(name, &bytes, object_id.unwrap_or(name)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs() -> Vec<MetadataRecord> {
        [
            ("plan1.ps", "plan1", "postscript"),
            ("plan2.ps", "plan2", "postscript"),
            ("plan2.doc", "plan2", "text"),
            ("notes0.txt", "plan1", "text"),
            ("notes1.txt", "plan2", "text"),
            ("notes2.txt", "plan2", "text"),
        ]
        .iter()
        .map(|(g, p, f)| MetadataRecord::new(*g).with("project", p).with("format", f))
        .collect()
    }

    #[test]
    fn nominal_project_column() {
        let scale = ConceptualScale::nominal("project", &["plan1", "plan2"]).unwrap();
        let ctx = apply_scale(&docs(), &scale).unwrap();
        let token: AttributeToken = "project=plan1".parse().unwrap();
        let col = ctx.derive_attrs([&token]).unwrap();
        assert_eq!(ctx.object_names(&col).collect::<Vec<_>>(), ["plan1.ps", "notes0.txt"]);
    }

    #[test]
    fn ordinal_sizes() {
        let scale = ConceptualScale::ordinal("size", Comparator::Numeric, &["10", "100", "1000"]).unwrap();
        let ctx = apply_scale(&[MetadataRecord::new("x").with("size", "50")], &scale).unwrap();
        let row = ctx.derive_objects(["x"]).unwrap();
        let names: Vec<String> = ctx.attribute_tokens(&row).map(ToString::to_string).collect();
        assert_eq!(names, ["size<=100", "size<=1000"]);
        assert_eq!(ctx.attribute_order(), &[(0, 1), (1, 2)]);
        let bad = apply_scale(&[MetadataRecord::new("x").with("size", "big")], &scale);
        assert!(matches!(bad, Err(Error::ScaleValue { .. })));
        assert!(ConceptualScale::ordinal("size", Comparator::Numeric, &["100", "10"]).is_err());
        assert!(ConceptualScale::ordinal("size", Comparator::Numeric, &["a", "b"]).is_err());
    }

    #[test]
    fn empty_and_uncovered() {
        let scale = ConceptualScale::nominal("project", &["plan1"]).unwrap();
        let ctx = apply_scale(&[], &scale).unwrap();
        assert_eq!((ctx.object_count(), ctx.attribute_count()), (0, 1));
        let ctx = apply_scale(&[MetadataRecord::new("x").with("project", "other")], &scale).unwrap();
        assert!(ctx.row(0).is_clear());
        let ctx = interpret(&[MetadataRecord::new("x")], &[]).unwrap();
        assert_eq!((ctx.object_count(), ctx.attribute_count()), (1, 0));
    }

    #[test]
    fn interpret_appends_and_namespaces() {
        let scales = [
            ConceptualScale::nominal("project", &["plan1", "plan2"]).unwrap(),
            ConceptualScale::nominal("format", &["postscript", "text"]).unwrap(),
        ];
        let ctx = interpret(&docs(), &scales).unwrap();
        assert_eq!(ctx.attribute_count(), 4);
        let single = interpret(&docs(), &scales[..1]).unwrap();
        assert_eq!(single, apply_scale(&docs(), &scales[0]).unwrap());

        let split = [
            ConceptualScale::nominal("project", &["plan1"]).unwrap(),
            ConceptualScale::nominal("project", &["plan2"]).unwrap(),
        ];
        assert_eq!(interpret(&docs(), &split).unwrap().attribute_count(), 2);
        let clash = [
            ConceptualScale::nominal("project", &["plan1"]).unwrap(),
            ConceptualScale::nominal("project", &["plan1", "plan2"]).unwrap(),
        ];
        let ctx = interpret(&docs(), &clash).unwrap();
        let tokens: Vec<String> = ctx.attributes().iter().map(ToString::to_string).collect();
        assert_eq!(tokens, ["project=plan1", "s2:project=plan1", "s2:project=plan2"]);
    }

    #[test]
    fn file_formats() {
        let text = "# corpus\nobject a.txt\nproject plan1\ntitle Two words\n\nobject b.txt\n";
        let records = parse_records(text).unwrap();
        assert_eq!(records[0].pairs[1], ("title".into(), "Two words".into()));
        assert!(records[1].pairs.is_empty());
        assert_eq!(parse_records(&emit_records(&records)).unwrap(), records);
        assert!(matches!(
            parse_records("project plan1\n"),
            Err(Error::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_records("object a\n\nobject a\n"),
            Err(Error::DuplicateDeclaration { line: 3, .. })
        ));

        let scales = parse_scales("nominal project plan1 plan2\n# size\nordinal numeric size 10 100\n").unwrap();
        assert_eq!(scales.len(), 2);
        assert_eq!(scales[1].kind(), ScaleKind::Ordinal(Comparator::Numeric));
        assert!(parse_scales("interval x 1 2\n").is_err());
        assert!(parse_scales("nominal x\n").is_err());
    }

    #[test]
    fn summaries() {
        let r = summarize_bytes("notes0.txt", b"hi", "notes0.txt");
        assert_eq!(
            r.pairs[..2],
            [("format".into(), "text".into()), ("size".into(), "2".into())]
        );
        let html = br#"<html><head><title> My
 Page </title></head><body><a href="x.html">x</a> <A HREF='y.html'>y</A></body></html>"#;
        let r = summarize_bytes("page.html", html, "page");
        assert_eq!(r.values("title").collect::<Vec<_>>(), ["My Page"]);
        assert_eq!(r.values("link").collect::<Vec<_>>(), ["x.html", "y.html"]);
        let r = summarize_bytes("plan1.ps", b"%!PS-Adobe-3.0\n", "plan1.ps");
        assert_eq!(r.values("format").next(), Some("postscript"));
        let r = summarize_bytes("blob", b"%!PS\n", "blob");
        assert_eq!(r.values("format").next(), Some("postscript"));
        let long = "x".repeat(300);
        let r = summarize_bytes("a.txt", long.as_bytes(), "a");
        assert_eq!(r.values("title").next().unwrap().len(), 120);
    }
}
