use std::collections::HashSet;

use fixedbitset::FixedBitSet;

use super::fcif::FcifDocument;
use super::lexer::{quote, write_entry, Cursor, Spanned};
use crate::context::{AttributeToken, FormalContext};
use crate::error::{Error, Result};
use crate::lattice::ConceptLattice;

/// A concept lattice as written in a `.clif` file. Concept indexes are
/// 1-based; successors of a concept are its upper covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClifDocument {
    pub type_name: String,
    pub object_generators: Vec<(usize, Vec<String>)>,
    pub attribute_generators: Vec<(usize, Vec<AttributeToken>)>,
    pub successors: Vec<(usize, Vec<usize>)>,
    pub layout: Option<Vec<(usize, u64, u64)>>,
}

fn index_at(s: &Spanned) -> Result<usize> {
    match s.text.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(Error::syntax(
            s.line,
            s.column,
            format!("expected a concept index, found `{}`", s.text),
        )),
    }
}

fn coordinate_at(s: &Spanned) -> Result<u64> {
    s.text
        .parse()
        .map_err(|_| Error::syntax(s.line, s.column, format!("expected a coordinate, found `{}`", s.text)))
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

impl ClifDocument {
    pub fn parse(text: &str) -> Result<ClifDocument> {
        let mut cur = Cursor::new(text)?;
        cur.expect_keyword("TYPE")?;
        let type_name = cur.word()?.text;

        cur.expect_compound("GENERATOR:", "OBJECT")?;
        let raw_objects = cur.entries()?;
        cur.expect_compound("GENERATOR:", "ATTRIBUTE")?;
        let raw_attributes = cur.entries()?;
        cur.expect_keyword("SUCCESSOR")?;
        let raw_successors = cur.entries()?;
        let raw_layout = if cur.at_keyword("LAYOUT") {
            cur.expect_keyword("LAYOUT")?;
            Some(cur.entries()?)
        } else {
            None
        };
        cur.expect_end()?;

        // The SUCCESSOR section declares the concepts; everything else refers to them.
        let n = raw_successors.len();
        let mut declared = HashSet::new();
        for (k, _) in &raw_successors {
            let idx = index_at(k)?;
            if idx > n {
                return Err(Error::syntax(
                    k.line,
                    k.column,
                    format!("concept index {idx} exceeds concept count {n}"),
                ));
            }
            if !declared.insert(idx) {
                return Err(duplicate(k));
            }
        }
        let known = |s: &Spanned| -> Result<usize> {
            let idx = index_at(s)?;
            if declared.contains(&idx) {
                Ok(idx)
            } else {
                Err(undeclared(s))
            }
        };

        let mut names = HashSet::new();
        let mut object_generators = Vec::new();
        let mut used = HashSet::new();
        for (k, items) in raw_objects {
            let idx = known(&k)?;
            if !used.insert(idx) {
                return Err(duplicate(&k));
            }
            for item in &items {
                if !names.insert(item.text.clone()) {
                    return Err(duplicate(item));
                }
            }
            object_generators.push((idx, items.into_iter().map(|s| s.text).collect()));
        }
        let mut tokens = HashSet::new();
        let mut attribute_generators = Vec::new();
        used.clear();
        for (k, items) in raw_attributes {
            let idx = known(&k)?;
            if !used.insert(idx) {
                return Err(duplicate(&k));
            }
            let mut list = Vec::with_capacity(items.len());
            for item in &items {
                let t: AttributeToken = item.text.parse().map_err(|_| {
                    Error::syntax(
                        item.line,
                        item.column,
                        format!("invalid attribute token `{}`", item.text),
                    )
                })?;
                if !tokens.insert(t.clone()) {
                    return Err(duplicate(item));
                }
                list.push(t);
            }
            attribute_generators.push((idx, list));
        }
        let mut successors = Vec::with_capacity(n);
        for (k, items) in raw_successors {
            let idx = index_at(&k)?;
            let list = items.iter().map(&known).collect::<Result<Vec<_>>>()?;
            successors.push((idx, list));
        }
        let layout = match raw_layout {
            None => None,
            Some(entries) => {
                let mut out = Vec::with_capacity(entries.len());
                for (k, items) in entries {
                    let idx = known(&k)?;
                    if items.len() != 2 {
                        return Err(Error::syntax(k.line, k.column, "layout entry needs `{ x y }`"));
                    }
                    out.push((idx, coordinate_at(&items[0])?, coordinate_at(&items[1])?));
                }
                Some(out)
            }
        };
        let doc = ClifDocument {
            type_name,
            object_generators,
            attribute_generators,
            successors,
            layout,
        };
        doc.above()?;
        Ok(doc)
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str("TYPE ");
        out.push_str(&quote(&self.type_name));
        out.push_str("\nGENERATOR: OBJECT\n");
        for (k, names) in &self.object_generators {
            write_entry(&mut out, &k.to_string(), names);
        }
        out.push_str("GENERATOR: ATTRIBUTE\n");
        for (k, tokens) in &self.attribute_generators {
            write_entry(&mut out, &k.to_string(), tokens.iter().map(ToString::to_string));
        }
        out.push_str("SUCCESSOR\n");
        for (k, succ) in &self.successors {
            write_entry(&mut out, &k.to_string(), succ.iter().map(ToString::to_string));
        }
        if let Some(layout) = &self.layout {
            out.push_str("LAYOUT\n");
            for (k, x, y) in layout {
                write_entry(&mut out, &k.to_string(), [x.to_string(), y.to_string()]);
            }
        }
        out
    }

    pub fn concept_count(&self) -> usize {
        self.successors.len()
    }

    /// Reflexive-transitive closure of the successor relation, 0-based:
    /// `above[i]` holds every concept at or above `i`.
    fn above(&self) -> Result<Vec<FixedBitSet>> {
        let n = self.concept_count();
        let mut succ = vec![Vec::new(); n];
        for (k, list) in &self.successors {
            succ[k - 1] = list.iter().map(|s| s - 1).collect();
        }
        // Depth-first topological sort; a back edge is a cycle.
        let mut state = vec![0u8; n];
        let mut order = Vec::with_capacity(n);
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some((v, i)) = stack.pop() {
                if i < succ[v].len() {
                    stack.push((v, i + 1));
                    let w = succ[v][i];
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => return Err(Error::CyclicOrder(w + 1)),
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    order.push(v);
                }
            }
        }
        // `order` lists every concept after all of its successors.
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for &v in &order {
            above[v].insert(v);
            for &w in &succ[v] {
                let up = above[w].clone();
                above[v].union_with(&up);
            }
        }
        Ok(above)
    }

    /// Incidence readout: `g I m` iff the generator concept of `g` lies at or
    /// below the generator concept of `m`.
    pub fn readout(&self) -> Result<FormalContext> {
        let above = self.above()?;
        let mut objects = Vec::new();
        let mut gamma = Vec::new();
        for (k, names) in &self.object_generators {
            for g in names {
                objects.push(g.clone());
                gamma.push(k - 1);
            }
        }
        let mut attributes = Vec::new();
        let mut mu = Vec::new();
        for (k, tokens) in &self.attribute_generators {
            for m in tokens {
                attributes.push(m.clone());
                mu.push(k - 1);
            }
        }
        let mut incidence = Vec::new();
        for (g, &gk) in gamma.iter().enumerate() {
            for (m, &mk) in mu.iter().enumerate() {
                if above[gk].contains(mk) {
                    incidence.push((g, m));
                }
            }
        }
        FormalContext::new(objects, attributes, incidence)
    }

    /// Rebuilds the lattice from the readout and checks that it has exactly
    /// the order this document describes.
    pub fn to_lattice(&self) -> Result<ConceptLattice> {
        let above = self.above()?;
        let ctx = self.readout()?;
        let lattice = ConceptLattice::build(ctx);
        let n = self.concept_count();
        if lattice.len() != n {
            return Err(Error::InvalidLattice(format!(
                "document lists {n} concepts but its generators determine {}",
                lattice.len()
            )));
        }
        let mut gamma = Vec::new();
        for (k, names) in &self.object_generators {
            gamma.extend(std::iter::repeat_n(k - 1, names.len()));
        }
        let mut map = Vec::with_capacity(n);
        for k in 0..n {
            let mut extent = lattice.context().empty_object_set();
            for (g, &gk) in gamma.iter().enumerate() {
                if above[gk].contains(k) {
                    extent.insert(g);
                }
            }
            match lattice.concept_with_extent(&extent) {
                Some(j) => map.push(j),
                None => return Err(Error::InvalidLattice(format!("concept {} is not closed", k + 1))),
            }
        }
        for i in 0..n {
            for j in 0..n {
                if above[i].contains(j) != lattice.leq(map[i], map[j])? {
                    return Err(Error::InvalidLattice(format!(
                        "order between concepts {} and {} does not match the generators",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(lattice)
    }

    /// Canonical document for a built lattice.
    pub fn from_lattice(type_name: impl Into<String>, lattice: &ConceptLattice) -> ClifDocument {
        let ctx = lattice.context();
        let mut object_generators = Vec::new();
        let mut attribute_generators = Vec::new();
        let mut successors = Vec::with_capacity(lattice.len());
        for k in 0..lattice.len() {
            let mut names: Vec<String> = lattice.object_generators(k).map(|g| ctx.objects()[g].clone()).collect();
            names.sort();
            if !names.is_empty() {
                object_generators.push((k + 1, names));
            }
            let mut tokens: Vec<AttributeToken> = lattice
                .attribute_generators(k)
                .map(|m| ctx.attributes()[m].clone())
                .collect();
            tokens.sort();
            if !tokens.is_empty() {
                attribute_generators.push((k + 1, tokens));
            }
            let ups = lattice
                .upper_covers(k)
                .expect("index in range")
                .iter()
                .map(|u| u + 1)
                .collect();
            successors.push((k + 1, ups));
        }
        ClifDocument {
            type_name: type_name.into(),
            object_generators,
            attribute_generators,
            successors,
            layout: None,
        }
    }
}

pub fn parse_clif(text: &str) -> Result<ClifDocument> {
    ClifDocument::parse(text)
}

pub fn emit_clif(doc: &ClifDocument) -> String {
    doc.emit()
}

/// Generation: the lattice of the embodied context, canonically indexed.
pub fn fcif_to_clif(doc: &FcifDocument) -> Result<ClifDocument> {
    let ctx = doc.to_context()?;
    let lattice = ConceptLattice::build(ctx);
    Ok(ClifDocument::from_lattice(doc.type_name.clone(), &lattice))
}

/// Readout: the context whose incidence is the generator order.
pub fn clif_to_fcif(doc: &ClifDocument) -> Result<FcifDocument> {
    let ctx = doc.readout()?;
    Ok(FcifDocument::from_context(doc.type_name.clone(), &ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interchange::fcif::parse_fcif;

    const K1_FCIF: &str = "TYPE K1\nOBJECT\ng1 { }\ng2 { }\ng3 { }\nATTRIBUTE\na { }\nb { }\nc { }\nINCIDENCE\ng1 { a b }\ng2 { b c }\ng3 { c }\n";
    const K1_CLIF: &str = "TYPE K1\nGENERATOR: OBJECT\n3 { g3 }\n4 { g1 }\n5 { g2 }\nGENERATOR: ATTRIBUTE\n2 { b }\n3 { c }\n4 { a }\nSUCCESSOR\n1 { }\n2 { 1 }\n3 { 1 }\n4 { 2 }\n5 { 2 3 }\n6 { 4 5 }\n";

    #[test]
    fn k1_golden_pair() {
        let clif = fcif_to_clif(&parse_fcif(K1_FCIF).unwrap()).unwrap();
        assert_eq!(emit_clif(&clif), K1_CLIF);
        let parsed = parse_clif(K1_CLIF).unwrap();
        assert_eq!(parsed, clif);
        let back = clif_to_fcif(&parsed).unwrap();
        assert!(back
            .to_context()
            .unwrap()
            .equivalent(&parse_fcif(K1_FCIF).unwrap().to_context().unwrap()));
        assert_eq!(parsed.to_lattice().unwrap().len(), 6);
    }

    #[test]
    fn empty_fcif_gives_single_concept() {
        let clif = fcif_to_clif(&parse_fcif("TYPE E\nOBJECT\nATTRIBUTE\nINCIDENCE\n").unwrap()).unwrap();
        assert_eq!(
            emit_clif(&clif),
            "TYPE E\nGENERATOR: OBJECT\nGENERATOR: ATTRIBUTE\nSUCCESSOR\n1 { }\n"
        );
        assert_eq!(clif.to_lattice().unwrap().len(), 1);
    }

    #[test]
    fn cycles_are_rejected() {
        let text = "TYPE C\nGENERATOR: OBJECT\nGENERATOR: ATTRIBUTE\nSUCCESSOR\n1 { 2 }\n2 { 1 }\n";
        assert!(matches!(parse_clif(text), Err(Error::CyclicOrder(_))));
        let selfloop = "TYPE C\nGENERATOR: OBJECT\nGENERATOR: ATTRIBUTE\nSUCCESSOR\n1 { 1 }\n";
        assert!(matches!(parse_clif(selfloop), Err(Error::CyclicOrder(1))));
    }

    #[test]
    fn index_errors() {
        let gap = "TYPE C\nGENERATOR: OBJECT\nGENERATOR: ATTRIBUTE\nSUCCESSOR\n1 { }\n3 { 1 }\n";
        assert!(matches!(parse_clif(gap), Err(Error::Syntax { line: 6, .. })));
        let dangling = "TYPE C\nGENERATOR: OBJECT\n2 { g }\nGENERATOR: ATTRIBUTE\nSUCCESSOR\n1 { }\n";
        assert!(matches!(
            parse_clif(dangling),
            Err(Error::Undeclared { line: 3, column: 1, .. })
        ));
        let twice = "TYPE C\nGENERATOR: OBJECT\n1 { g }\n2 { g }\nGENERATOR: ATTRIBUTE\nSUCCESSOR\n1 { }\n2 { 1 }\n";
        assert!(matches!(
            parse_clif(twice),
            Err(Error::DuplicateDeclaration { line: 4, .. })
        ));
    }

    #[test]
    fn layout_round_trips() {
        let text = format!("{K1_CLIF}LAYOUT\n1 {{ 50 0 }}\n6 {{ 50 300 }}\n");
        let doc = parse_clif(&text).unwrap();
        assert_eq!(doc.layout.as_deref(), Some(&[(1, 50, 0), (6, 50, 300)][..]));
        assert_eq!(emit_clif(&doc), text);
    }

    #[test]
    fn inconsistent_generators_are_invalid() {
        // Two incomparable concepts with no common bottom cannot come from a context.
        let text =
            "TYPE X\nGENERATOR: OBJECT\n2 { g }\n3 { h }\nGENERATOR: ATTRIBUTE\nSUCCESSOR\n1 { }\n2 { 1 }\n3 { 1 }\n";
        assert!(matches!(
            parse_clif(text).unwrap().to_lattice(),
            Err(Error::InvalidLattice(_))
        ));
    }
}
