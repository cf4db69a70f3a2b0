//! Formal contexts: objects, single-valued attributes and their incidence.
//!
//! Object and attribute sets are bitsets indexed by position in the owning
//! context. Name-based entry points resolve names first and fail with
//! [`Error::NotInContext`] on anything unknown.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;

use crate::error::{ElementKind, Error, Result};

pub type ObjectSet = FixedBitSet;
pub type AttributeSet = FixedBitSet;

/// Largest object count the brute-force concept oracle accepts.
pub const ORACLE_OBJECT_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relator {
    Eq,
    Le,
    Ge,
}

impl Relator {
    pub fn symbol(self) -> &'static str {
        match self {
            Relator::Eq => "=",
            Relator::Le => "<=",
            Relator::Ge => ">=",
        }
    }
}

/// A single-valued attribute `tag#value`, or a bare boolean `tag`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributeToken {
    tag: String,
    relator: Relator,
    value: String,
}

impl AttributeToken {
    pub fn new(tag: impl Into<String>, relator: Relator, value: impl Into<String>) -> Result<Self> {
        let tag = tag.into();
        let value = value.into();
        if tag.is_empty() {
            return Err(Error::InvalidToken(format!("{}{value}", relator.symbol())));
        }
        if value.is_empty() && relator != Relator::Eq {
            return Err(Error::InvalidToken(format!("{tag}{}", relator.symbol())));
        }
        Ok(AttributeToken { tag, relator, value })
    }

    /// Bare boolean tag. Panics on an empty tag.
    pub fn bare(tag: impl Into<String>) -> Self {
        let tag = tag.into();
        assert!(!tag.is_empty(), "attribute tag must be non-empty");
        AttributeToken {
            tag,
            relator: Relator::Eq,
            value: String::new(),
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn relator(&self) -> Relator {
        self.relator
    }

    pub fn value(&self) -> &str {
        &self.value
    }

    pub fn is_bare(&self) -> bool {
        self.value.is_empty()
    }

    /// Same token with `prefix` prepended to the tag.
    pub fn prefixed(&self, prefix: &str) -> Self {
        AttributeToken {
            tag: format!("{prefix}{}", self.tag),
            relator: self.relator,
            value: self.value.clone(),
        }
    }
}

impl fmt::Display for AttributeToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.is_empty() {
            f.write_str(&self.tag)
        } else {
            write!(f, "{}{}{}", self.tag, self.relator.symbol(), self.value)
        }
    }
}

impl FromStr for AttributeToken {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        for (i, &b) in bytes.iter().enumerate() {
            let (relator, width) = match b {
                b'=' => (Relator::Eq, 1),
                b'<' if bytes.get(i + 1) == Some(&b'=') => (Relator::Le, 2),
                b'>' if bytes.get(i + 1) == Some(&b'=') => (Relator::Ge, 2),
                _ => continue,
            };
            let value = &s[i + width..];
            if value.is_empty() {
                return Err(Error::InvalidToken(s.to_owned()));
            }
            return AttributeToken::new(&s[..i], relator, value).map_err(|_| Error::InvalidToken(s.to_owned()));
        }
        if s.is_empty() {
            return Err(Error::InvalidToken(String::new()));
        }
        Ok(AttributeToken::bare(s))
    }
}

// Tokens sort by their serialized form so that displayed orderings and
// canonical indexing agree.
impl Ord for AttributeToken {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_string()
            .cmp(&other.to_string())
            .then_with(|| self.tag.cmp(&other.tag))
    }
}

impl PartialOrd for AttributeToken {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<AttributeToken>,
    rows: Vec<FixedBitSet>,
    columns: Vec<FixedBitSet>,
    /// Strict order pairs `(lower, upper)` as supplied; not necessarily reduced.
    object_order: Vec<(usize, usize)>,
    attribute_order: Vec<(usize, usize)>,
    object_index: HashMap<String, usize>,
    attribute_index: HashMap<AttributeToken, usize>,
}

impl Default for FormalContext {
    fn default() -> Self {
        FormalContext::new(Vec::new(), Vec::new(), std::iter::empty()).expect("empty context")
    }
}

impl FormalContext {
    /// Builds a context from element lists and `(object, attribute)` index pairs.
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<AttributeToken>,
        incidence: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut object_index = HashMap::with_capacity(objects.len());
        for (i, name) in objects.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidToken(String::new()));
            }
            if object_index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateElement {
                    kind: ElementKind::Object,
                    name: name.clone(),
                });
            }
        }
        let mut attribute_index = HashMap::with_capacity(attributes.len());
        for (i, token) in attributes.iter().enumerate() {
            if attribute_index.insert(token.clone(), i).is_some() {
                return Err(Error::DuplicateElement {
                    kind: ElementKind::Attribute,
                    name: token.to_string(),
                });
            }
        }
        let (n, m) = (objects.len(), attributes.len());
        let mut rows = vec![FixedBitSet::with_capacity(m); n];
        let mut columns = vec![FixedBitSet::with_capacity(n); m];
        for (g, a) in incidence {
            if g >= n {
                return Err(Error::NotInContext {
                    kind: ElementKind::Object,
                    name: format!("#{g}"),
                });
            }
            if a >= m {
                return Err(Error::NotInContext {
                    kind: ElementKind::Attribute,
                    name: format!("#{a}"),
                });
            }
            rows[g].insert(a);
            columns[a].insert(g);
        }
        Ok(FormalContext {
            objects,
            attributes,
            rows,
            columns,
            object_order: Vec::new(),
            attribute_order: Vec::new(),
            object_index,
            attribute_index,
        })
    }

    /// Convenience constructor from attribute strings and named rows.
    ///
    /// ```
    /// use cks_core::FormalContext;
    /// let k = FormalContext::from_table(
    ///     &["a", "b", "c"],
    ///     &[("g1", &["a", "b"]), ("g2", &["b", "c"]), ("g3", &["c"])],
    /// ).unwrap();
    /// assert_eq!(k.object_count(), 3);
    /// ```
    pub fn from_table(attributes: &[&str], rows: &[(&str, &[&str])]) -> Result<Self> {
        let attributes = attributes
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<AttributeToken>>>()?;
        let objects: Vec<String> = rows.iter().map(|(g, _)| (*g).to_owned()).collect();
        let index: HashMap<&AttributeToken, usize> = attributes.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut incidence = Vec::new();
        for (g, (_, attrs)) in rows.iter().enumerate() {
            for s in attrs.iter() {
                let token: AttributeToken = s.parse()?;
                let a = index.get(&token).ok_or_else(|| Error::NotInContext {
                    kind: ElementKind::Attribute,
                    name: token.to_string(),
                })?;
                incidence.push((g, *a));
            }
        }
        FormalContext::new(objects, attributes, incidence)
    }

    /// Attaches strict orders given as `(lower, upper)` index pairs.
    ///
    /// Attribute incidence must be inherited upward (`m < n` and `g I m`
    /// imply `g I n`); object incidence is inherited downward (`g < h` and
    /// `h I m` imply `g I m`).
    pub fn with_orders(
        mut self,
        object_order: Vec<(usize, usize)>,
        attribute_order: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let above_objects = order_closure(self.objects.len(), &object_order, ElementKind::Object)?;
        let above_attributes = order_closure(self.attributes.len(), &attribute_order, ElementKind::Attribute)?;
        for (m, above) in above_attributes.iter().enumerate() {
            for n in above.ones() {
                if !self.columns[m].is_subset(&self.columns[n]) {
                    return Err(Error::OrderViolation(format!(
                        "`{}` < `{}` but incidence is not inherited",
                        self.attributes[m], self.attributes[n]
                    )));
                }
            }
        }
        for (g, above) in above_objects.iter().enumerate() {
            for h in above.ones() {
                if !self.rows[h].is_subset(&self.rows[g]) {
                    return Err(Error::OrderViolation(format!(
                        "`{}` < `{}` but incidence is not inherited",
                        self.objects[g], self.objects[h]
                    )));
                }
            }
        }
        self.object_order = object_order;
        self.attribute_order = attribute_order;
        Ok(self)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[AttributeToken] {
        &self.attributes
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn object_position(&self, name: &str) -> Option<usize> {
        self.object_index.get(name).copied()
    }

    pub fn attribute_position(&self, token: &AttributeToken) -> Option<usize> {
        self.attribute_index.get(token).copied()
    }

    pub fn incident(&self, object: usize, attribute: usize) -> bool {
        self.rows[object].contains(attribute)
    }

    pub fn row(&self, object: usize) -> &AttributeSet {
        &self.rows[object]
    }

    pub fn column(&self, attribute: usize) -> &ObjectSet {
        &self.columns[attribute]
    }

    pub fn object_order(&self) -> &[(usize, usize)] {
        &self.object_order
    }

    pub fn attribute_order(&self) -> &[(usize, usize)] {
        &self.attribute_order
    }

    pub fn empty_object_set(&self) -> ObjectSet {
        FixedBitSet::with_capacity(self.objects.len())
    }

    pub fn empty_attribute_set(&self) -> AttributeSet {
        FixedBitSet::with_capacity(self.attributes.len())
    }

    pub fn all_objects(&self) -> ObjectSet {
        let mut set = self.empty_object_set();
        set.insert_range(..);
        set
    }

    pub fn all_attributes(&self) -> AttributeSet {
        let mut set = self.empty_attribute_set();
        set.insert_range(..);
        set
    }

    /// Attributes shared by every object in `objects` (all attributes for the empty set).
    pub fn common_attributes(&self, objects: &ObjectSet) -> AttributeSet {
        let mut out = self.all_attributes();
        for g in objects.ones() {
            out.intersect_with(&self.rows[g]);
        }
        out
    }

    /// Objects having every attribute in `attributes` (all objects for the empty set).
    pub fn common_objects(&self, attributes: &AttributeSet) -> ObjectSet {
        let mut out = self.all_objects();
        for m in attributes.ones() {
            out.intersect_with(&self.columns[m]);
        }
        out
    }

    pub fn close_objects(&self, objects: &ObjectSet) -> ObjectSet {
        self.common_objects(&self.common_attributes(objects))
    }

    pub fn close_attributes(&self, attributes: &AttributeSet) -> AttributeSet {
        self.common_attributes(&self.common_objects(attributes))
    }

    pub fn object_set<'a, I>(&self, names: I) -> Result<ObjectSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut set = self.empty_object_set();
        for name in names {
            let g = self.object_position(name).ok_or_else(|| Error::NotInContext {
                kind: ElementKind::Object,
                name: name.to_owned(),
            })?;
            set.insert(g);
        }
        Ok(set)
    }

    pub fn attribute_set<'a, I>(&self, tokens: I) -> Result<AttributeSet>
    where
        I: IntoIterator<Item = &'a AttributeToken>,
    {
        let mut set = self.empty_attribute_set();
        for token in tokens {
            let m = self.attribute_position(token).ok_or_else(|| Error::NotInContext {
                kind: ElementKind::Attribute,
                name: token.to_string(),
            })?;
            set.insert(m);
        }
        Ok(set)
    }

    /// Parses each string as an attribute token and resolves it.
    pub fn parse_attribute_set<'a, I>(&self, tokens: I) -> Result<AttributeSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let tokens = tokens
            .into_iter()
            .map(str::parse)
            .collect::<Result<Vec<AttributeToken>>>()?;
        self.attribute_set(tokens.iter())
    }

    pub fn object_names<'a>(&'a self, set: &'a ObjectSet) -> impl Iterator<Item = &'a str> + 'a {
        set.ones().map(move |g| self.objects[g].as_str())
    }

    pub fn attribute_tokens<'a>(&'a self, set: &'a AttributeSet) -> impl Iterator<Item = &'a AttributeToken> + 'a {
        set.ones().map(move |m| &self.attributes[m])
    }

    /// Prime operator on named objects.
    pub fn derive_objects<'a, I>(&self, names: I) -> Result<AttributeSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        Ok(self.common_attributes(&self.object_set(names)?))
    }

    /// Prime operator on attribute tokens.
    pub fn derive_attrs<'a, I>(&self, tokens: I) -> Result<ObjectSet>
    where
        I: IntoIterator<Item = &'a AttributeToken>,
    {
        Ok(self.common_objects(&self.attribute_set(tokens)?))
    }

    /// True when every object has every attribute. Such a context has a
    /// single concept.
    pub fn is_full(&self) -> bool {
        self.rows.iter().all(FixedBitSet::is_full)
    }

    /// Objects and attributes swap roles. Object names become bare tags and
    /// attribute tokens become object names in serialized form.
    pub fn transpose(&self) -> FormalContext {
        let objects = self.attributes.iter().map(ToString::to_string).collect();
        let attributes = self.objects.iter().map(AttributeToken::bare).collect();
        let incidence = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(m, col)| col.ones().map(move |g| (m, g)));
        let ctx = FormalContext::new(objects, attributes, incidence).expect("transposed context has unique names");
        // object order reverses into attribute order and vice versa
        let object_order = self.attribute_order.iter().map(|&(a, b)| (b, a)).collect();
        let attribute_order = self.object_order.iter().map(|&(a, b)| (b, a)).collect();
        ctx.with_orders(object_order, attribute_order)
            .expect("transposed orders stay consistent")
    }

    /// Sub-context on `keep` objects; all attributes are retained.
    pub fn restrict_objects(&self, keep: &ObjectSet) -> FormalContext {
        let (ctx, _) = self.subcontext(keep, &self.all_attributes());
        ctx
    }

    /// Sub-context on `keep` attributes; all objects are retained.
    pub fn restrict_attributes(&self, keep: &AttributeSet) -> FormalContext {
        let (ctx, _) = self.subcontext(&self.all_objects(), keep);
        ctx
    }

    /// Sub-context on the given elements, with orders restricted through
    /// their transitive closure. Also returns the old-to-new object positions.
    fn subcontext(&self, objects: &ObjectSet, attributes: &AttributeSet) -> (FormalContext, Vec<Option<usize>>) {
        let mut object_map = vec![None; self.objects.len()];
        for (new, g) in objects.ones().enumerate() {
            object_map[g] = Some(new);
        }
        let mut attribute_map = vec![None; self.attributes.len()];
        for (new, m) in attributes.ones().enumerate() {
            attribute_map[m] = Some(new);
        }
        let names = objects.ones().map(|g| self.objects[g].clone()).collect();
        let tokens = attributes.ones().map(|m| self.attributes[m].clone()).collect();
        let mut incidence = Vec::new();
        for g in objects.ones() {
            for m in self.rows[g].ones() {
                if let Some(a) = attribute_map[m] {
                    incidence.push((object_map[g].unwrap(), a));
                }
            }
        }
        let ctx = FormalContext::new(names, tokens, incidence).expect("sub-context of a valid context");
        let object_order = restrict_order(self.objects.len(), &self.object_order, &object_map);
        let attribute_order = restrict_order(self.attributes.len(), &self.attribute_order, &attribute_map);
        let ctx = ctx
            .with_orders(object_order, attribute_order)
            .expect("restricted orders stay consistent");
        (ctx, object_map)
    }

    /// Copy with one more object incident to exactly `attributes`.
    pub fn with_object(&self, name: &str, attributes: &AttributeSet) -> Result<FormalContext> {
        let mut objects = self.objects.clone();
        objects.push(name.to_owned());
        let g = self.objects.len();
        let incidence = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(g, row)| row.ones().map(move |m| (g, m)))
            .chain(attributes.ones().map(|m| (g, m)));
        FormalContext::new(objects, self.attributes.clone(), incidence)?
            .with_orders(self.object_order.clone(), self.attribute_order.clone())
    }

    /// Copy with one more attribute held by exactly `objects`.
    pub fn with_attribute(&self, token: AttributeToken, objects: &ObjectSet) -> Result<FormalContext> {
        let mut attributes = self.attributes.clone();
        attributes.push(token);
        let m = self.attributes.len();
        let incidence = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(g, row)| row.ones().map(move |m| (g, m)))
            .chain(objects.ones().map(|g| (g, m)));
        FormalContext::new(self.objects.clone(), attributes, incidence)?
            .with_orders(self.object_order.clone(), self.attribute_order.clone())
    }

    /// Immediate order-predecessors of object `g`, ascending by position.
    pub fn object_predecessors(&self, g: usize) -> Vec<usize> {
        immediate_predecessors(self.objects.len(), &self.object_order, g)
    }

    pub fn attribute_predecessors(&self, m: usize) -> Vec<usize> {
        immediate_predecessors(self.attributes.len(), &self.attribute_order, m)
    }

    /// Order-insensitive view: object name to serialized row, plus the
    /// attribute token set and closed orders by name.
    pub fn canonical_form(&self) -> CanonicalContext {
        let rows = self
            .objects
            .iter()
            .zip(&self.rows)
            .map(|(g, row)| {
                let tokens = row.ones().map(|m| self.attributes[m].to_string()).collect();
                (g.clone(), tokens)
            })
            .collect();
        let attributes = self.attributes.iter().map(ToString::to_string).collect();
        let object_order = closed_pairs(self.objects.len(), &self.object_order)
            .into_iter()
            .map(|(a, b)| (self.objects[a].clone(), self.objects[b].clone()))
            .collect();
        let attribute_order = closed_pairs(self.attributes.len(), &self.attribute_order)
            .into_iter()
            .map(|(a, b)| (self.attributes[a].to_string(), self.attributes[b].to_string()))
            .collect();
        CanonicalContext {
            rows,
            attributes,
            object_order,
            attribute_order,
        }
    }

    /// Equal up to the listing order of objects and attributes.
    pub fn equivalent(&self, other: &FormalContext) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    /// First pair of indistinguishable objects or attributes, if any.
    pub fn purification_witness(&self) -> Option<(ElementKind, String, String)> {
        let mut seen: HashMap<&FixedBitSet, usize> = HashMap::new();
        for (g, row) in self.rows.iter().enumerate() {
            if let Some(&h) = seen.get(row) {
                return Some((ElementKind::Object, self.objects[h].clone(), self.objects[g].clone()));
            }
            seen.insert(row, g);
        }
        let mut seen: HashMap<&FixedBitSet, usize> = HashMap::new();
        for (m, col) in self.columns.iter().enumerate() {
            if let Some(&n) = seen.get(col) {
                return Some((
                    ElementKind::Attribute,
                    self.attributes[n].to_string(),
                    self.attributes[m].to_string(),
                ));
            }
            seen.insert(col, m);
        }
        None
    }

    pub fn is_purified(&self) -> bool {
        self.purification_witness().is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalContext {
    pub rows: BTreeMap<String, BTreeSet<String>>,
    pub attributes: BTreeSet<String>,
    pub object_order: BTreeSet<(String, String)>,
    pub attribute_order: BTreeSet<(String, String)>,
}

/// `above[i]` = elements strictly above `i`. Fails on cycles or bad indexes.
fn order_closure(n: usize, pairs: &[(usize, usize)], kind: ElementKind) -> Result<Vec<FixedBitSet>> {
    let mut above = vec![FixedBitSet::with_capacity(n); n];
    for &(lo, hi) in pairs {
        if lo >= n || hi >= n {
            return Err(Error::OrderViolation(format!(
                "{kind} order references index out of range"
            )));
        }
        above[lo].insert(hi);
    }
    // Warshall
    for k in 0..n {
        for i in 0..n {
            if above[i].contains(k) {
                let via = above[k].clone();
                above[i].union_with(&via);
            }
        }
    }
    if let Some(i) = (0..n).find(|&i| above[i].contains(i)) {
        return Err(Error::OrderViolation(format!(
            "{kind} order has a cycle through position {i}"
        )));
    }
    Ok(above)
}

fn closed_pairs(n: usize, pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let above = order_closure(n, pairs, ElementKind::Object).expect("order validated on construction");
    above
        .iter()
        .enumerate()
        .flat_map(|(i, up)| up.ones().map(move |j| (i, j)))
        .collect()
}

fn immediate_predecessors(n: usize, pairs: &[(usize, usize)], x: usize) -> Vec<usize> {
    if pairs.is_empty() {
        return Vec::new();
    }
    let above = order_closure(n, pairs, ElementKind::Object).expect("order validated on construction");
    let below: Vec<usize> = (0..n).filter(|&y| above[y].contains(x)).collect();
    below
        .iter()
        .copied()
        .filter(|&y| !below.iter().any(|&z| z != y && above[y].contains(z)))
        .collect()
}

/// Restricts an order to surviving elements via its closure; `map` sends old
/// positions to new ones.
fn restrict_order(n: usize, pairs: &[(usize, usize)], map: &[Option<usize>]) -> Vec<(usize, usize)> {
    if pairs.is_empty() {
        return Vec::new();
    }
    let mut out: Vec<(usize, usize)> = closed_pairs(n, pairs)
        .into_iter()
        .filter_map(|(a, b)| match (map[a], map[b]) {
            (Some(a), Some(b)) if a != b => Some((a, b)),
            _ => None,
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Records which original names were fused into which survivor.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeMap {
    pub objects: BTreeMap<String, String>,
    pub attributes: BTreeMap<AttributeToken, AttributeToken>,
}

impl MergeMap {
    pub fn canonical_object(&self, name: &str) -> Option<&str> {
        self.objects.get(name).map(String::as_str)
    }

    pub fn canonical_attribute(&self, token: &AttributeToken) -> Option<&AttributeToken> {
        self.attributes.get(token)
    }

    /// Number of original objects represented by `survivor`.
    pub fn object_multiplicity(&self, survivor: &str) -> usize {
        self.objects.values().filter(|s| s.as_str() == survivor).count()
    }

    pub fn is_identity(&self) -> bool {
        self.objects.iter().all(|(a, b)| a == b) && self.attributes.iter().all(|(a, b)| a == b)
    }
}

/// Fuses objects with identical rows and attributes with identical columns.
/// The lexicographically least name of each class survives, at the position
/// of its first class member.
pub fn purify(ctx: &FormalContext) -> (FormalContext, MergeMap) {
    let mut merge = MergeMap::default();

    let mut object_classes: Vec<Vec<usize>> = Vec::new();
    let mut by_row: HashMap<&FixedBitSet, usize> = HashMap::new();
    for (g, row) in ctx.rows.iter().enumerate() {
        let class = *by_row.entry(row).or_insert_with(|| {
            object_classes.push(Vec::new());
            object_classes.len() - 1
        });
        object_classes[class].push(g);
    }
    let mut attribute_classes: Vec<Vec<usize>> = Vec::new();
    let mut by_column: HashMap<&FixedBitSet, usize> = HashMap::new();
    for (m, col) in ctx.columns.iter().enumerate() {
        let class = *by_column.entry(col).or_insert_with(|| {
            attribute_classes.push(Vec::new());
            attribute_classes.len() - 1
        });
        attribute_classes[class].push(m);
    }

    let mut keep_objects = ctx.empty_object_set();
    for class in &object_classes {
        let survivor = *class
            .iter()
            .min_by(|&&a, &&b| ctx.objects[a].cmp(&ctx.objects[b]))
            .unwrap();
        keep_objects.insert(survivor);
        for &g in class {
            merge
                .objects
                .insert(ctx.objects[g].clone(), ctx.objects[survivor].clone());
        }
    }
    let mut keep_attributes = ctx.empty_attribute_set();
    for class in &attribute_classes {
        let survivor = *class
            .iter()
            .min_by(|&&a, &&b| ctx.attributes[a].cmp(&ctx.attributes[b]))
            .unwrap();
        keep_attributes.insert(survivor);
        for &m in class {
            merge
                .attributes
                .insert(ctx.attributes[m].clone(), ctx.attributes[survivor].clone());
        }
    }

    // Survivors replace the first member of their class so the listing
    // order follows first appearance.
    let mut object_slots: Vec<(usize, usize)> = object_classes
        .iter()
        .map(|class| {
            let survivor = *class.iter().find(|&&g| keep_objects.contains(g)).unwrap();
            (class[0], survivor)
        })
        .collect();
    object_slots.sort_unstable();
    let mut attribute_slots: Vec<(usize, usize)> = attribute_classes
        .iter()
        .map(|class| {
            let survivor = *class.iter().find(|&&m| keep_attributes.contains(m)).unwrap();
            (class[0], survivor)
        })
        .collect();
    attribute_slots.sort_unstable();

    let objects: Vec<String> = object_slots.iter().map(|&(_, g)| ctx.objects[g].clone()).collect();
    let attributes: Vec<AttributeToken> = attribute_slots
        .iter()
        .map(|&(_, m)| ctx.attributes[m].clone())
        .collect();
    let mut attribute_pos = vec![None; ctx.attributes.len()];
    for (new, &(_, m)) in attribute_slots.iter().enumerate() {
        attribute_pos[m] = Some(new);
    }
    let incidence: Vec<(usize, usize)> = object_slots
        .iter()
        .enumerate()
        .flat_map(|(new_g, &(_, g))| {
            let attribute_pos = &attribute_pos;
            ctx.rows[g]
                .ones()
                .filter_map(move |m| attribute_pos[m].map(|a| (new_g, a)))
        })
        .collect();

    // orders: every class member maps to its class's new position
    let mut object_map = vec![None; ctx.objects.len()];
    for (new, &(first, _)) in object_slots.iter().enumerate() {
        let class = object_classes.iter().find(|c| c[0] == first).unwrap();
        for &g in class {
            object_map[g] = Some(new);
        }
    }
    let mut attribute_map = vec![None; ctx.attributes.len()];
    for (new, &(first, _)) in attribute_slots.iter().enumerate() {
        let class = attribute_classes.iter().find(|c| c[0] == first).unwrap();
        for &m in class {
            attribute_map[m] = Some(new);
        }
    }
    let object_order = restrict_order(ctx.objects.len(), &ctx.object_order, &object_map);
    let attribute_order = restrict_order(ctx.attributes.len(), &ctx.attribute_order, &attribute_map);

    let out = FormalContext::new(objects, attributes, incidence)
        .and_then(|c| c.with_orders(object_order, attribute_order))
        .expect("purified context stays valid");
    (out, merge)
}

/// How a named concept is pinned down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViewDefinition {
    /// The concept generated by these attributes.
    Intent(Vec<AttributeToken>),
    /// The concept generated by these objects.
    Extent(Vec<String>),
}

/// A named, explicitly specified concept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptualView {
    pub name: String,
    pub definition: ViewDefinition,
}

impl ConceptualView {
    pub fn by_intent(name: impl Into<String>, intent: Vec<AttributeToken>) -> Self {
        ConceptualView {
            name: name.into(),
            definition: ViewDefinition::Intent(intent),
        }
    }

    pub fn by_extent(name: impl Into<String>, extent: Vec<String>) -> Self {
        ConceptualView {
            name: name.into(),
            definition: ViewDefinition::Extent(extent),
        }
    }
}

/// Drops join-reducible objects and meet-reducible attributes. Each dropped
/// element comes back as a conceptual view named after it: objects keep
/// their intent, attributes their extent.
///
/// A context whose lattice has a single concept is returned unchanged.
pub fn reduce(ctx: &FormalContext) -> Result<(FormalContext, Vec<ConceptualView>)> {
    if let Some((kind, first, second)) = ctx.purification_witness() {
        return Err(Error::NotPurified { kind, first, second });
    }
    if ctx.is_full() {
        return Ok((ctx.clone(), Vec::new()));
    }

    let mut keep_objects = ctx.empty_object_set();
    let mut views = Vec::new();
    for (g, row) in ctx.rows.iter().enumerate() {
        // join-reducible iff the row is the intersection of the strictly larger rows
        let mut meet = ctx.all_attributes();
        for other in ctx.rows.iter() {
            if other != row && row.is_subset(other) {
                meet.intersect_with(other);
            }
        }
        if &meet == row {
            views.push(ConceptualView::by_intent(
                ctx.objects[g].clone(),
                ctx.attribute_tokens(row).cloned().collect(),
            ));
        } else {
            keep_objects.insert(g);
        }
    }
    let mut keep_attributes = ctx.empty_attribute_set();
    for (m, col) in ctx.columns.iter().enumerate() {
        let mut meet = ctx.all_objects();
        for other in ctx.columns.iter() {
            if other != col && col.is_subset(other) {
                meet.intersect_with(other);
            }
        }
        if &meet == col {
            views.push(ConceptualView::by_extent(
                ctx.attributes[m].to_string(),
                ctx.object_names(col).map(str::to_owned).collect(),
            ));
        } else {
            keep_attributes.insert(m);
        }
    }
    let (reduced, _) = ctx.subcontext(&keep_objects, &keep_attributes);
    Ok((reduced, views))
}

/// Puts two contexts over the same objects side by side.
pub fn apposition(left: &FormalContext, right: &FormalContext) -> Result<FormalContext> {
    if left.objects != right.objects {
        return Err(Error::ObjectSetMismatch);
    }
    if let Some(token) = right.attributes.iter().find(|t| left.attribute_index.contains_key(*t)) {
        return Err(Error::AttributeCollision(token.to_string()));
    }
    let offset = left.attributes.len();
    let attributes = left.attributes.iter().chain(&right.attributes).cloned().collect();
    let incidence = left
        .rows
        .iter()
        .enumerate()
        .flat_map(|(g, row)| row.ones().map(move |m| (g, m)))
        .chain(
            right
                .rows
                .iter()
                .enumerate()
                .flat_map(|(g, row)| row.ones().map(move |m| (g, m + offset))),
        );
    let mut object_order = left.object_order.clone();
    object_order.extend(right.object_order.iter().copied());
    object_order.sort_unstable();
    object_order.dedup();
    let attribute_order = left
        .attribute_order
        .iter()
        .copied()
        .chain(right.attribute_order.iter().map(|&(a, b)| (a + offset, b + offset)))
        .collect();
    FormalContext::new(left.objects.clone(), attributes, incidence)?.with_orders(object_order, attribute_order)
}

/// Apposition after prefixing every attribute tag on each side.
pub fn apposition_namespaced(
    left: &FormalContext,
    left_prefix: &str,
    right: &FormalContext,
    right_prefix: &str,
) -> Result<FormalContext> {
    apposition(&left.with_tag_prefix(left_prefix), &right.with_tag_prefix(right_prefix))
}

impl FormalContext {
    /// Copy with `prefix` prepended to every attribute tag.
    pub fn with_tag_prefix(&self, prefix: &str) -> FormalContext {
        if prefix.is_empty() {
            return self.clone();
        }
        let mut out = self.clone();
        out.attributes = self.attributes.iter().map(|t| t.prefixed(prefix)).collect();
        out.attribute_index = out.attributes.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        out
    }

    /// Same context with objects listed in `order`, which must be a
    /// permutation of the current object names.
    pub fn reorder_objects(&self, order: &[String]) -> Result<FormalContext> {
        if order.len() != self.objects.len() {
            return Err(Error::ObjectSetMismatch);
        }
        let mut positions = Vec::with_capacity(order.len());
        for name in order {
            positions.push(self.object_position(name).ok_or(Error::ObjectSetMismatch)?);
        }
        let mut new_pos = vec![0; order.len()];
        for (new, &old) in positions.iter().enumerate() {
            new_pos[old] = new;
        }
        let incidence = positions
            .iter()
            .enumerate()
            .flat_map(|(new, &old)| self.rows[old].ones().map(move |m| (new, m)));
        let object_order = self
            .object_order
            .iter()
            .map(|&(a, b)| (new_pos[a], new_pos[b]))
            .collect();
        FormalContext::new(order.to_vec(), self.attributes.clone(), incidence)?
            .with_orders(object_order, self.attribute_order.clone())
    }
}

/// Every concept of `ctx` by exhaustive closure, sorted by extent then intent.
///
/// Closes every subset of the smaller side, so it refuses contexts with more
/// than [`ORACLE_OBJECT_LIMIT`] objects.
pub fn enumerate_concepts_oracle(ctx: &FormalContext) -> Result<Vec<(ObjectSet, AttributeSet)>> {
    if ctx.object_count() > ORACLE_OBJECT_LIMIT {
        return Err(Error::OracleScaleExceeded {
            objects: ctx.object_count(),
            limit: ORACLE_OBJECT_LIMIT,
        });
    }
    let mut found = BTreeSet::new();
    if ctx.attribute_count() <= ctx.object_count() {
        let m = ctx.attribute_count();
        for mask in 0u64..(1u64 << m) {
            let mut subset = ctx.empty_attribute_set();
            for bit in 0..m {
                if mask & (1 << bit) != 0 {
                    subset.insert(bit);
                }
            }
            let extent = ctx.common_objects(&subset);
            let intent = ctx.common_attributes(&extent);
            found.insert((extent, intent));
        }
    } else {
        let n = ctx.object_count();
        for mask in 0u64..(1u64 << n) {
            let mut subset = ctx.empty_object_set();
            for bit in 0..n {
                if mask & (1 << bit) != 0 {
                    subset.insert(bit);
                }
            }
            let intent = ctx.common_attributes(&subset);
            let extent = ctx.common_objects(&intent);
            found.insert((extent, intent));
        }
    }
    Ok(found.into_iter().collect())
}
