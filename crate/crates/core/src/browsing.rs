//! Ranked orders, browse sessions and goal queries.
//!
//! Only named concepts take part in browsing. A concept is named when a
//! conceptual view resolves to it or when it is the object or attribute
//! concept of some element. Which names a ranking shows depends on mode and
//! scope:
//!
//! | mode | global scope            | local scope             |
//! |------|-------------------------|-------------------------|
//! | ext  | views and attributes    | views and objects       |
//! | int  | views and objects       | views and attributes    |
//!
//! A concept none of whose shown names survive is left out of the ranking.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::context::{
    purify, reduce, AttributeSet, AttributeToken, ConceptualView, FormalContext, MergeMap, ViewDefinition,
};
use crate::error::{ElementKind, Error, Result};
use crate::lattice::{ConceptLattice, NeighborhoodLattice};
use crate::linkage::{self, at_least, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Global,
    Local,
}

impl Scope {
    pub fn name(self) -> &'static str {
        match self {
            Scope::Global => "global",
            Scope::Local => "local",
        }
    }
}

impl std::str::FromStr for Scope {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "global" => Ok(Scope::Global),
            "local" => Ok(Scope::Local),
            other => Err(format!("unknown scope `{other}` (expected global or local)")),
        }
    }
}

/// Direct display lists the lowest rank first, reverse the highest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Display {
    Direct,
    Reverse,
}

/// The names shown for one concept, views first, then attributes, then
/// objects, each group sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisplayLabel {
    pub concept: usize,
    pub names: Vec<String>,
}

impl fmt::Display for DisplayLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.names.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankGroup {
    pub rank: Ratio<usize>,
    pub labels: Vec<DisplayLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedOrder {
    pub display: Display,
    /// Non-empty groups in display order.
    pub groups: Vec<RankGroup>,
}

pub fn format_rank(r: Ratio<usize>) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{:.6}", linkage::ratio_f64(r))
    }
}

impl RankedOrder {
    fn from_scores(display: Display, scored: Vec<(Ratio<usize>, DisplayLabel)>) -> RankedOrder {
        let mut by_rank: BTreeMap<Ratio<usize>, Vec<DisplayLabel>> = BTreeMap::new();
        for (rank, label) in scored {
            by_rank.entry(rank).or_default().push(label);
        }
        let mut groups: Vec<RankGroup> = by_rank
            .into_iter()
            .map(|(rank, mut labels)| {
                labels.sort_by_cached_key(|l| l.to_string());
                RankGroup { rank, labels }
            })
            .collect();
        if display == Display::Reverse {
            groups.reverse();
        }
        RankedOrder { display, groups }
    }

    pub fn rank_of(&self, name: &str) -> Option<Ratio<usize>> {
        self.groups
            .iter()
            .find(|g| g.labels.iter().any(|l| l.names.iter().any(|n| n == name)))
            .map(|g| g.rank)
    }

    pub fn label_count(&self) -> usize {
        self.groups.iter().map(|g| g.labels.len()).sum()
    }

    /// Keeps labels whose rank is at least `tau`.
    pub fn threshold_filter(&self, tau: f64) -> RankedOrder {
        RankedOrder {
            display: self.display,
            groups: self.groups.iter().filter(|g| at_least(g.rank, tau)).cloned().collect(),
        }
    }

    /// Rows in display order. Reverse displays with integer ranks also get
    /// a row for each unused rank between the extremes.
    pub fn rows(&self) -> Vec<(Ratio<usize>, &[DisplayLabel])> {
        let integral = self.groups.iter().all(|g| g.rank.is_integer());
        if self.display == Display::Reverse && integral && !self.groups.is_empty() {
            let hi = self.groups.first().unwrap().rank.to_integer();
            let lo = self.groups.last().unwrap().rank.to_integer();
            let mut out = Vec::new();
            let mut it = self.groups.iter().peekable();
            for r in (lo..=hi).rev() {
                match it.peek() {
                    Some(g) if g.rank.to_integer() == r => {
                        out.push((g.rank, g.labels.as_slice()));
                        it.next();
                    }
                    _ => out.push((Ratio::from_integer(r), &[][..])),
                }
            }
            out
        } else {
            self.groups.iter().map(|g| (g.rank, g.labels.as_slice())).collect()
        }
    }

    /// One line per rank: `<rank> { [a, b] [c] }`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (rank, labels) in self.rows() {
            out.push_str(&format_rank(rank));
            out.push_str(" {");
            for l in labels {
                out.push(' ');
                out.push_str(&l.to_string());
            }
            out.push_str(" }\n");
        }
        out
    }
}

/// A lattice together with its named conceptual views.
#[derive(Debug, Clone)]
pub struct KnowledgeSystem {
    lattice: ConceptLattice,
    views: Vec<Vec<String>>,
    /// Names fused into a surviving object or attribute, by concept.
    object_aliases: Vec<Vec<String>>,
    attribute_aliases: Vec<Vec<String>>,
    merge: MergeMap,
    promoted: Vec<ConceptualView>,
}

impl KnowledgeSystem {
    /// Resolves every view; unknown element names are an error.
    pub fn new(lattice: ConceptLattice, views: &[ConceptualView]) -> Result<KnowledgeSystem> {
        let n = lattice.len();
        let mut system = KnowledgeSystem {
            views: vec![Vec::new(); n],
            object_aliases: vec![Vec::new(); n],
            attribute_aliases: vec![Vec::new(); n],
            lattice,
            merge: MergeMap::default(),
            promoted: Vec::new(),
        };
        system.add_views(views, false)?;
        Ok(system)
    }

    /// Builds the system browsed over `ctx`. With `reduced`, the lattice is
    /// built from the purified, reduced context so that every cardinality
    /// counts irreducible elements only. Fused names stay visible as aliases
    /// and reduced-away elements come back as views.
    pub fn prepare(ctx: &FormalContext, views: &[ConceptualView], reduced: bool) -> Result<KnowledgeSystem> {
        if !reduced {
            return KnowledgeSystem::new(ConceptLattice::build(ctx.clone()), views);
        }
        let (pure, merge) = purify(ctx);
        let (small, promoted) = reduce(&pure)?;
        let mut system = KnowledgeSystem::new(ConceptLattice::build(small), &[])?;
        for view in &promoted {
            system.place_view(&pure, None, view)?;
        }
        for view in views {
            system.place_view(ctx, Some(&merge), view)?;
        }
        for (alias, survivor) in &merge.objects {
            if alias != survivor {
                if let Ok(k) = system.locate_object(&pure, survivor) {
                    push_sorted(&mut system.object_aliases[k], alias.clone());
                }
            }
        }
        for (alias, survivor) in &merge.attributes {
            if alias != survivor {
                let k = system.locate_intent(&pure, &pure.attribute_set([survivor])?, None)?;
                push_sorted(&mut system.attribute_aliases[k], alias.to_string());
            }
        }
        system.merge = merge;
        system.promoted = promoted;
        Ok(system)
    }

    /// The concept whose intent, restricted to this lattice's attributes,
    /// matches the closure of `attrs` in `base`.
    fn locate_intent(&self, base: &FormalContext, attrs: &AttributeSet, merge: Option<&MergeMap>) -> Result<usize> {
        let closed = base.close_attributes(attrs);
        let ctx = self.lattice.context();
        let mut set = ctx.empty_attribute_set();
        for token in base.attribute_tokens(&closed) {
            let token = merge.and_then(|m| m.canonical_attribute(token)).unwrap_or(token);
            if let Some(m) = ctx.attribute_position(token) {
                set.insert(m);
            }
        }
        Ok(self.lattice.concept_of_attributes(&set))
    }

    fn locate_object(&self, base: &FormalContext, name: &str) -> Result<usize> {
        let row = base.derive_objects([name])?;
        self.locate_intent(base, &row, None)
    }

    /// Resolves `view` in `base`, then carries it over to this lattice.
    fn place_view(&mut self, base: &FormalContext, merge: Option<&MergeMap>, view: &ConceptualView) -> Result<()> {
        let intent = match &view.definition {
            ViewDefinition::Intent(tokens) => base.attribute_set(tokens)?,
            ViewDefinition::Extent(objects) => base.derive_objects(objects.iter().map(String::as_str))?,
        };
        let k = self.locate_intent(base, &intent, merge)?;
        push_sorted(&mut self.views[k], view.name.clone());
        Ok(())
    }

    pub fn merge_map(&self) -> &MergeMap {
        &self.merge
    }

    /// Views created by reduction.
    pub fn promoted_views(&self) -> &[ConceptualView] {
        &self.promoted
    }

    /// Adds views. With `lenient`, names missing from the context are
    /// ignored, which is how views promoted by reduction are located.
    pub fn add_views(&mut self, views: &[ConceptualView], lenient: bool) -> Result<()> {
        for view in views {
            let k = self.resolve_view(view, lenient)?;
            push_sorted(&mut self.views[k], view.name.clone());
        }
        Ok(())
    }

    fn resolve_view(&self, view: &ConceptualView, lenient: bool) -> Result<usize> {
        let ctx = self.lattice.context();
        match &view.definition {
            ViewDefinition::Intent(tokens) => {
                let mut set = ctx.empty_attribute_set();
                for t in tokens {
                    match ctx.attribute_position(t) {
                        Some(m) => set.insert(m),
                        None if lenient => {}
                        None => {
                            return Err(Error::NotInContext {
                                kind: ElementKind::Attribute,
                                name: t.to_string(),
                            })
                        }
                    }
                }
                Ok(self.lattice.concept_of_attributes(&set))
            }
            ViewDefinition::Extent(objects) => {
                let mut set = ctx.empty_object_set();
                for g in objects {
                    match ctx.object_position(g) {
                        Some(i) => set.insert(i),
                        None if lenient => {}
                        None => {
                            return Err(Error::NotInContext {
                                kind: ElementKind::Object,
                                name: g.clone(),
                            })
                        }
                    }
                }
                Ok(self.lattice.concept_of_objects(&set))
            }
        }
    }

    pub fn lattice(&self) -> &ConceptLattice {
        &self.lattice
    }

    pub fn view_names(&self, k: usize) -> &[String] {
        &self.views[k]
    }

    /// Concept a view resolves to, by view name.
    pub fn view_concept(&self, name: &str) -> Option<usize> {
        self.views.iter().position(|names| names.iter().any(|n| n == name))
    }

    fn attribute_names(&self, k: usize) -> Vec<String> {
        let ctx = self.lattice.context();
        let mut v: Vec<&AttributeToken> = self
            .lattice
            .attribute_generators(k)
            .map(|m| &ctx.attributes()[m])
            .collect();
        v.sort();
        let mut names: Vec<String> = v.into_iter().map(ToString::to_string).collect();
        names.extend(self.attribute_aliases[k].iter().cloned());
        names
    }

    fn object_names(&self, k: usize) -> Vec<String> {
        let ctx = self.lattice.context();
        let mut v: Vec<String> = self
            .lattice
            .object_generators(k)
            .map(|g| ctx.objects()[g].clone())
            .collect();
        v.extend(self.object_aliases[k].iter().cloned());
        v.sort();
        v
    }

    /// Every name of concept `k`.
    pub fn full_label(&self, k: usize) -> DisplayLabel {
        let mut names = self.views[k].clone();
        names.extend(self.attribute_names(k));
        names.extend(self.object_names(k));
        DisplayLabel { concept: k, names }
    }

    /// The label shown for `k` in a ranking of the given mode and scope.
    pub fn label(&self, k: usize, mode: Mode, scope: Scope) -> DisplayLabel {
        let mut names = self.views[k].clone();
        let attributes = matches!((mode, scope), (Mode::Ext, Scope::Global) | (Mode::Int, Scope::Local));
        if attributes {
            names.extend(self.attribute_names(k));
        } else {
            names.extend(self.object_names(k));
        }
        DisplayLabel { concept: k, names }
    }

    pub fn is_named(&self, k: usize) -> bool {
        k < self.lattice.len() && !self.full_label(k).names.is_empty()
    }

    /// Concept that a label name (view, object or attribute) refers to.
    pub fn concept_named(&self, name: &str) -> Result<usize> {
        if let Some(k) = self.view_concept(name) {
            return Ok(k);
        }
        if let Ok(k) = self.lattice.object_concept_of(name) {
            return Ok(k);
        }
        if let Some(k) = self.object_aliases.iter().position(|a| a.iter().any(|n| n == name)) {
            return Ok(k);
        }
        if let Some(k) = self.attribute_aliases.iter().position(|a| a.iter().any(|n| n == name)) {
            return Ok(k);
        }
        if let Ok(token) = name.parse::<AttributeToken>() {
            if let Ok(k) = self.lattice.attribute_concept_of(&token) {
                return Ok(k);
            }
        }
        if let Ok(k) = name.parse::<usize>() {
            if k >= 1 && k <= self.lattice.len() {
                return Ok(k - 1);
            }
        }
        Err(Error::UnknownLabel(name.to_owned()))
    }

    fn ranking<F>(
        &self,
        candidates: impl Iterator<Item = usize>,
        mode: Mode,
        scope: Scope,
        display: Display,
        score: F,
    ) -> Result<RankedOrder>
    where
        F: Fn(usize) -> Result<Ratio<usize>>,
    {
        let mut scored = Vec::new();
        for k in candidates {
            let label = self.label(k, mode, scope);
            if !label.names.is_empty() {
                scored.push((score(k)?, label));
            }
        }
        Ok(RankedOrder::from_scores(display, scored))
    }

    /// Global similarity ranking toward `state`, highest first.
    pub fn rank_similarity(&self, mode: Mode, state: usize) -> Result<RankedOrder> {
        let l = &self.lattice;
        l.concept(state)?;
        self.ranking(0..l.len(), mode, Scope::Global, Display::Reverse, |x| {
            let s = match mode {
                Mode::Ext => linkage::ext_similarity(l, state, x)?,
                Mode::Int => linkage::int_similarity(l, state, x)?,
            };
            Ok(Ratio::from_integer(s))
        })
    }

    /// Local difference ranking inside the neighborhood of its seed, lowest
    /// first.
    pub fn rank_difference(&self, mode: Mode, hood: &NeighborhoodLattice) -> Result<RankedOrder> {
        let local = &hood.lattice;
        let seed = hood.project(hood.seed)?;
        let inside: Vec<usize> = hood.embedding.clone();
        self.ranking(inside.into_iter(), mode, Scope::Local, Display::Direct, |x| {
            let x = hood.project(x)?;
            let d = match mode {
                Mode::Ext => linkage::int_diff_measure(local, seed, x)?,
                Mode::Int => linkage::ext_diff_measure(local, seed, x)?,
            };
            Ok(Ratio::from_integer(d))
        })
    }

    pub fn neighborhood(&self, mode: Mode, seed: usize) -> Result<NeighborhoodLattice> {
        match mode {
            Mode::Ext => self.lattice.meet_restrict(seed),
            Mode::Int => self.lattice.join_restrict(seed),
        }
    }

    /// Intensional goal query: a temporary object holding exactly `attrs`
    /// is added, and every label of views and objects is ranked by the
    /// intensional linkage from the goal concept.
    pub fn intensional_query(&self, attrs: &[AttributeToken]) -> Result<QueryResult> {
        let ctx = self.lattice.context();
        let set = ctx.attribute_set(attrs)?;
        let goal_name = fresh_name(|n| ctx.object_position(n).is_some());
        let extended = ConceptLattice::build(ctx.with_object(&goal_name, &set)?);
        let goal = extended.object_concept(ctx.object_count());
        let goal_intent = &extended.concepts()[goal].intent;
        // Original intents stay closed after adding an object.
        let image = |k: usize| -> usize {
            let intent = &self.lattice.concepts()[k].intent;
            let mut lifted = extended.context().empty_attribute_set();
            lifted.extend(intent.ones());
            extended
                .concept_with_intent(&lifted)
                .expect("original intent remains closed")
        };
        let landing = (0..self.lattice.len()).find(|&k| self.lattice.concepts()[k].intent == *goal_intent);
        let ranking = self.ranking(0..self.lattice.len(), Mode::Int, Scope::Global, Display::Reverse, |x| {
            Ok(linkage::int_linkage(&extended, goal, image(x)).unwrap_or_else(|_| Ratio::from_integer(1)))
        })?;
        Ok(QueryResult { landing, ranking })
    }

    /// Extensional goal query: the dual of [`intensional_query`], with a
    /// temporary attribute held by exactly `objects` and views and
    /// attributes ranked by extensional linkage.
    ///
    /// [`intensional_query`]: KnowledgeSystem::intensional_query
    pub fn extensional_query(&self, objects: &[&str]) -> Result<QueryResult> {
        let ctx = self.lattice.context();
        let set = ctx.object_set(objects.iter().copied())?;
        let tag = fresh_name(|n| ctx.attributes().iter().any(|t| t.tag() == n));
        let extended = ConceptLattice::build(ctx.with_attribute(AttributeToken::bare(tag), &set)?);
        let goal = extended.attribute_concept(ctx.attribute_count());
        let goal_extent = &extended.concepts()[goal].extent;
        let image = |k: usize| -> usize {
            extended
                .concept_with_extent(&self.lattice.concepts()[k].extent)
                .expect("original extent remains closed")
        };
        let landing = (0..self.lattice.len()).find(|&k| self.lattice.concepts()[k].extent == *goal_extent);
        let ranking = self.ranking(0..self.lattice.len(), Mode::Ext, Scope::Global, Display::Reverse, |x| {
            Ok(linkage::ext_linkage(&extended, goal, image(x)).unwrap_or_else(|_| Ratio::from_integer(1)))
        })?;
        Ok(QueryResult { landing, ranking })
    }
}

fn push_sorted(names: &mut Vec<String>, name: String) {
    if let Err(at) = names.binary_search(&name) {
        names.insert(at, name);
    }
}

fn fresh_name(taken: impl Fn(&str) -> bool) -> String {
    let mut name = String::from("?goal");
    let mut i = 0;
    while taken(&name) {
        i += 1;
        name = format!("?goal{i}");
    }
    name
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    /// Concept of the unextended lattice the goal coincides with, if any.
    pub landing: Option<usize>,
    pub ranking: RankedOrder,
}

/// One user's walk through a lattice. The mode is fixed at creation; the
/// scope starts global, and local scope needs a state to be seeded from.
#[derive(Debug, Clone)]
pub struct BrowseSession {
    system: Arc<KnowledgeSystem>,
    mode: Mode,
    scope: Scope,
    state: Option<usize>,
    local: Option<NeighborhoodLattice>,
}

impl BrowseSession {
    pub fn new(system: Arc<KnowledgeSystem>, mode: Mode) -> BrowseSession {
        BrowseSession {
            system,
            mode,
            scope: Scope::Global,
            state: None,
            local: None,
        }
    }

    pub fn system(&self) -> &KnowledgeSystem {
        &self.system
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn state(&self) -> Option<usize> {
        self.state
    }

    pub fn local(&self) -> Option<&NeighborhoodLattice> {
        self.local.as_ref()
    }

    /// Modes are chosen once; asking for the other one fails.
    pub fn set_mode(&mut self, mode: Mode) -> Result<()> {
        if mode != self.mode {
            return Err(Error::WrongMode {
                current: self.mode.name(),
            });
        }
        Ok(())
    }

    pub fn set_scope(&mut self, scope: Scope) -> Result<()> {
        match scope {
            Scope::Global => {
                self.scope = Scope::Global;
                self.local = None;
            }
            Scope::Local => {
                let state = self.state.ok_or_else(|| {
                    Error::ProtocolViolation("browse globally to a concept before entering local scope".into())
                })?;
                self.local = Some(self.system.neighborhood(self.mode, state)?);
                self.scope = Scope::Local;
            }
        }
        Ok(())
    }

    /// Moves to `target`, a named global concept. In local scope the target
    /// must lie in the current neighborhood, which is then re-seeded there.
    pub fn transition(&mut self, target: usize) -> Result<()> {
        let lattice = self.system.lattice();
        lattice.concept(target)?;
        if !self.system.is_named(target) {
            return Err(Error::NotDisplayable(target));
        }
        if self.state == Some(target) {
            return Ok(());
        }
        if self.scope == Scope::Local {
            let hood = self.local.as_ref().expect("local scope has a neighborhood");
            if hood.local_of(target).is_none() {
                return Err(Error::ProtocolViolation(format!(
                    "concept {} is outside the current neighborhood",
                    target + 1
                )));
            }
            self.local = Some(self.system.neighborhood(self.mode, target)?);
        }
        self.state = Some(target);
        Ok(())
    }

    /// Global similarity ranking toward the state, or toward the top before
    /// any state has been chosen.
    pub fn rank_similarity(&self) -> Result<RankedOrder> {
        if self.scope != Scope::Global {
            return Err(Error::WrongScope { expected: "global" });
        }
        let reference = self.state.unwrap_or_else(|| match self.mode {
            Mode::Ext => self.system.lattice().top(),
            Mode::Int => self.system.lattice().bottom(),
        });
        self.system.rank_similarity(self.mode, reference)
    }

    pub fn rank_difference(&self) -> Result<RankedOrder> {
        match &self.local {
            Some(hood) if self.scope == Scope::Local => self.system.rank_difference(self.mode, hood),
            _ => Err(Error::WrongScope { expected: "local" }),
        }
    }

    /// Whichever ranking the current scope offers.
    pub fn ranking(&self) -> Result<RankedOrder> {
        match self.scope {
            Scope::Global => self.rank_similarity(),
            Scope::Local => self.rank_difference(),
        }
    }
}
