use std::collections::HashMap;

use super::lexer::{write_entry, Cursor, Spanned};
use crate::context::{AttributeToken, FormalContext};
use crate::error::{Error, Result};

/// A formal context as written in a `.fcif` file.
///
/// Braces after a declared object or attribute list its immediate
/// order-predecessors; empty braces mean the element is unordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FcifDocument {
    pub type_name: String,
    pub objects: Vec<(String, Vec<String>)>,
    pub attributes: Vec<(AttributeToken, Vec<AttributeToken>)>,
    pub incidence: Vec<(String, Vec<AttributeToken>)>,
}

fn token_at(s: &Spanned) -> Result<AttributeToken> {
    s.text
        .parse()
        .map_err(|_| Error::syntax(s.line, s.column, format!("invalid attribute token `{}`", s.text)))
}

fn undeclared(s: &Spanned) -> Error {
    Error::Undeclared {
        line: s.line,
        column: s.column,
        name: s.text.clone(),
    }
}

fn duplicate(s: &Spanned) -> Error {
    Error::DuplicateDeclaration {
        line: s.line,
        column: s.column,
        name: s.text.clone(),
    }
}

impl FcifDocument {
    pub fn parse(text: &str) -> Result<FcifDocument> {
        let mut cur = Cursor::new(text)?;
        cur.expect_keyword("TYPE")?;
        let type_name = cur.word()?.text;

        cur.expect_keyword("OBJECT")?;
        let raw_objects = cur.entries()?;
        let mut object_index = HashMap::new();
        for (i, (name, _)) in raw_objects.iter().enumerate() {
            if object_index.insert(name.text.clone(), i).is_some() {
                return Err(duplicate(name));
            }
        }
        let mut objects = Vec::with_capacity(raw_objects.len());
        for (name, preds) in raw_objects {
            for p in &preds {
                if !object_index.contains_key(&p.text) {
                    return Err(undeclared(p));
                }
            }
            objects.push((name.text, preds.into_iter().map(|p| p.text).collect()));
        }

        cur.expect_keyword("ATTRIBUTE")?;
        let raw_attributes = cur.entries()?;
        let mut attribute_index = HashMap::new();
        for (name, _) in &raw_attributes {
            if attribute_index.insert(token_at(name)?, ()).is_some() {
                return Err(duplicate(name));
            }
        }
        let mut attributes = Vec::with_capacity(raw_attributes.len());
        for (name, preds) in raw_attributes {
            let mut tokens = Vec::with_capacity(preds.len());
            for p in &preds {
                let t = token_at(p)?;
                if !attribute_index.contains_key(&t) {
                    return Err(undeclared(p));
                }
                tokens.push(t);
            }
            attributes.push((token_at(&name)?, tokens));
        }

        cur.expect_keyword("INCIDENCE")?;
        let mut seen = HashMap::new();
        let mut incidence = Vec::new();
        for (name, items) in cur.entries()? {
            if !object_index.contains_key(&name.text) {
                return Err(undeclared(&name));
            }
            if seen.insert(name.text.clone(), ()).is_some() {
                return Err(duplicate(&name));
            }
            let mut tokens = Vec::with_capacity(items.len());
            for item in &items {
                let t = token_at(item)?;
                if !attribute_index.contains_key(&t) {
                    return Err(undeclared(item));
                }
                tokens.push(t);
            }
            incidence.push((name.text, tokens));
        }
        cur.expect_end()?;
        Ok(FcifDocument {
            type_name,
            objects,
            attributes,
            incidence,
        })
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str("TYPE ");
        out.push_str(&super::lexer::quote(&self.type_name));
        out.push_str("\nOBJECT\n");
        for (name, preds) in &self.objects {
            write_entry(&mut out, name, preds);
        }
        out.push_str("ATTRIBUTE\n");
        for (token, preds) in &self.attributes {
            write_entry(&mut out, &token.to_string(), preds.iter().map(ToString::to_string));
        }
        out.push_str("INCIDENCE\n");
        for (name, tokens) in &self.incidence {
            write_entry(&mut out, name, tokens.iter().map(ToString::to_string));
        }
        out
    }

    /// The embodied context, with orders taken from the predecessor lists.
    pub fn to_context(&self) -> Result<FormalContext> {
        let objects: Vec<String> = self.objects.iter().map(|(g, _)| g.clone()).collect();
        let attributes: Vec<AttributeToken> = self.attributes.iter().map(|(m, _)| m.clone()).collect();
        let g_index: HashMap<&str, usize> = objects.iter().enumerate().map(|(i, g)| (g.as_str(), i)).collect();
        let m_index: HashMap<&AttributeToken, usize> = attributes.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let lookup_g = |g: &str| {
            g_index.get(g).copied().ok_or_else(|| Error::NotInContext {
                kind: crate::ElementKind::Object,
                name: g.to_owned(),
            })
        };
        let lookup_m = |m: &AttributeToken| {
            m_index.get(m).copied().ok_or_else(|| Error::NotInContext {
                kind: crate::ElementKind::Attribute,
                name: m.to_string(),
            })
        };
        let mut incidence = Vec::new();
        for (g, tokens) in &self.incidence {
            let g = lookup_g(g)?;
            for m in tokens {
                incidence.push((g, lookup_m(m)?));
            }
        }
        let mut object_order = Vec::new();
        for (i, (_, preds)) in self.objects.iter().enumerate() {
            for p in preds {
                object_order.push((lookup_g(p)?, i));
            }
        }
        let mut attribute_order = Vec::new();
        for (i, (_, preds)) in self.attributes.iter().enumerate() {
            for p in preds {
                attribute_order.push((lookup_m(p)?, i));
            }
        }
        FormalContext::new(objects, attributes, incidence)?.with_orders(object_order, attribute_order)
    }

    /// Canonical document for a context: every object gets an incidence
    /// entry, and predecessor lists hold immediate predecessors only.
    pub fn from_context(type_name: impl Into<String>, ctx: &FormalContext) -> FcifDocument {
        let objects = (0..ctx.object_count())
            .map(|g| {
                let preds = ctx
                    .object_predecessors(g)
                    .into_iter()
                    .map(|p| ctx.objects()[p].clone())
                    .collect();
                (ctx.objects()[g].clone(), preds)
            })
            .collect();
        let attributes = (0..ctx.attribute_count())
            .map(|m| {
                let preds = ctx
                    .attribute_predecessors(m)
                    .into_iter()
                    .map(|p| ctx.attributes()[p].clone())
                    .collect();
                (ctx.attributes()[m].clone(), preds)
            })
            .collect();
        let incidence = (0..ctx.object_count())
            .map(|g| {
                let tokens = ctx.row(g).ones().map(|m| ctx.attributes()[m].clone()).collect();
                (ctx.objects()[g].clone(), tokens)
            })
            .collect();
        FcifDocument {
            type_name: type_name.into(),
            objects,
            attributes,
            incidence,
        }
    }
}

pub fn parse_fcif(text: &str) -> Result<FcifDocument> {
    FcifDocument::parse(text)
}

pub fn emit_fcif(doc: &FcifDocument) -> String {
    doc.emit()
}
