//! Conceptual view files.
//!
//! ```text
//! INTENT
//! Plan1 { project=plan1 }
//! EXTENT
//! Prototypes { plan1.ps }
//! ```
//!
//! Both sections are optional but must appear in this order. A view is
//! the concept generated by its attributes (INTENT) or objects (EXTENT).

use std::collections::HashSet;

use super::lexer::{write_entry, Cursor};
use crate::context::{AttributeToken, ConceptualView, ViewDefinition};
use crate::error::{Error, Result};

pub fn parse_views(text: &str) -> Result<Vec<ConceptualView>> {
    let mut cur = Cursor::new(text)?;
    let mut out = Vec::new();
    let mut names = HashSet::new();
    if cur.at_keyword("INTENT") {
        cur.expect_keyword("INTENT")?;
        for (name, items) in cur.entries()? {
            if !names.insert(name.text.clone()) {
                return Err(Error::DuplicateDeclaration {
                    line: name.line,
                    column: name.column,
                    name: name.text,
                });
            }
            let tokens = items
                .iter()
                .map(|s| {
                    s.text
                        .parse::<AttributeToken>()
                        .map_err(|_| Error::syntax(s.line, s.column, format!("invalid attribute token `{}`", s.text)))
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(ConceptualView::by_intent(name.text, tokens));
        }
    }
    if cur.at_keyword("EXTENT") {
        cur.expect_keyword("EXTENT")?;
        for (name, items) in cur.entries()? {
            if !names.insert(name.text.clone()) {
                return Err(Error::DuplicateDeclaration {
                    line: name.line,
                    column: name.column,
                    name: name.text,
                });
            }
            out.push(ConceptualView::by_extent(
                name.text,
                items.into_iter().map(|s| s.text).collect(),
            ));
        }
    }
    if !cur.at_end() {
        return Err(cur.error("expected `INTENT`, `EXTENT` or end of input"));
    }
    Ok(out)
}

pub fn emit_views(views: &[ConceptualView]) -> String {
    let mut intents = String::new();
    let mut extents = String::new();
    for view in views {
        match &view.definition {
            ViewDefinition::Intent(tokens) => {
                write_entry(&mut intents, &view.name, tokens.iter().map(ToString::to_string))
            }
            ViewDefinition::Extent(objects) => write_entry(&mut extents, &view.name, objects),
        }
    }
    let mut out = String::new();
    if !intents.is_empty() {
        out.push_str("INTENT\n");
        out.push_str(&intents);
    }
    if !extents.is_empty() {
        out.push_str("EXTENT\n");
        out.push_str(&extents);
    }
    out
}
