//! Concept lattices.
//!
//! Closed intents are enumerated with NextClosure, upper covers come from
//! Lindig's neighbor step, and concepts are then renumbered canonically by
//! intent size and then lexicographically least intent. That order is a
//! linear extension of the lattice order read from the top, so index 0 is
//! always the top concept and every concept follows its generalizations.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::context::{AttributeSet, AttributeToken, FormalContext, ObjectSet};
use crate::error::{ElementKind, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub index: usize,
    pub extent: ObjectSet,
    pub intent: AttributeSet,
}

#[derive(Debug, Clone)]
pub struct ConceptLattice {
    context: FormalContext,
    concepts: Vec<Concept>,
    upper: Vec<Vec<usize>>,
    lower: Vec<Vec<usize>>,
    gamma: Vec<usize>,
    mu: Vec<usize>,
    by_extent: HashMap<ObjectSet, usize>,
    by_intent: HashMap<AttributeSet, usize>,
}

/// Builds the concept lattice of `ctx`.
pub fn build_lattice(ctx: &FormalContext) -> ConceptLattice {
    ConceptLattice::build(ctx.clone())
}

impl ConceptLattice {
    pub fn build(context: FormalContext) -> ConceptLattice {
        let intents = next_closure_intents(&context);
        let mut concepts: Vec<(ObjectSet, AttributeSet)> = intents
            .into_iter()
            .map(|intent| (context.common_objects(&intent), intent))
            .collect();
        let by_extent: HashMap<ObjectSet, usize> =
            concepts.iter().enumerate().map(|(i, (e, _))| (e.clone(), i)).collect();
        let upper: Vec<Vec<usize>> = concepts
            .iter()
            .map(|(extent, intent)| {
                upper_neighbors(&context, extent, intent)
                    .into_iter()
                    .map(|e| by_extent[&e])
                    .collect()
            })
            .collect();

        // canonical renumbering: by intent size, then lexicographically
        // least intent; a linear extension with the top first
        let keys: Vec<(usize, Vec<String>)> = concepts
            .iter()
            .map(|(_, intent)| {
                let mut key: Vec<String> = context.attribute_tokens(intent).map(ToString::to_string).collect();
                key.sort();
                (key.len(), key)
            })
            .collect();
        let n = concepts.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut renumber = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            renumber[old] = new;
        }
        let mut taken: Vec<Option<(ObjectSet, AttributeSet)>> = concepts.drain(..).map(Some).collect();
        let concepts: Vec<Concept> = order
            .iter()
            .enumerate()
            .map(|(index, &old)| {
                let (extent, intent) = taken[old].take().unwrap();
                Concept { index, extent, intent }
            })
            .collect();
        let mut new_upper = vec![Vec::new(); n];
        for (old, ups) in upper.iter().enumerate() {
            let mut ups: Vec<usize> = ups.iter().map(|&u| renumber[u]).collect();
            ups.sort_unstable();
            new_upper[renumber[old]] = ups;
        }
        ConceptLattice::assemble(context, concepts, new_upper)
    }

    fn assemble(context: FormalContext, concepts: Vec<Concept>, upper: Vec<Vec<usize>>) -> ConceptLattice {
        let n = concepts.len();
        let mut lower = vec![Vec::new(); n];
        for (c, ups) in upper.iter().enumerate() {
            for &u in ups {
                lower[u].push(c);
            }
        }
        for l in &mut lower {
            l.sort_unstable();
        }
        let by_extent = concepts
            .iter()
            .map(|c| (c.extent.clone(), c.index))
            .collect::<HashMap<_, _>>();
        let by_intent = concepts
            .iter()
            .map(|c| (c.intent.clone(), c.index))
            .collect::<HashMap<_, _>>();
        let gamma = (0..context.object_count())
            .map(|g| {
                let mut single = context.empty_object_set();
                single.insert(g);
                by_extent[&context.close_objects(&single)]
            })
            .collect();
        let mu = (0..context.attribute_count())
            .map(|m| {
                let mut single = context.empty_attribute_set();
                single.insert(m);
                by_intent[&context.close_attributes(&single)]
            })
            .collect();
        ConceptLattice {
            context,
            concepts,
            upper,
            lower,
            gamma,
            mu,
            by_extent,
            by_intent,
        }
    }

    pub fn context(&self) -> &FormalContext {
        &self.context
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn concept(&self, k: usize) -> Result<&Concept> {
        self.concepts.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            len: self.concepts.len(),
        })
    }

    pub fn top(&self) -> usize {
        0
    }

    pub fn bottom(&self) -> usize {
        self.concepts.len() - 1
    }

    pub fn extent(&self, k: usize) -> Result<&ObjectSet> {
        Ok(&self.concept(k)?.extent)
    }

    pub fn intent(&self, k: usize) -> Result<&AttributeSet> {
        Ok(&self.concept(k)?.intent)
    }

    /// Immediate generalizations of `k`, ascending.
    pub fn upper_covers(&self, k: usize) -> Result<&[usize]> {
        self.concept(k)?;
        Ok(&self.upper[k])
    }

    /// Immediate specializations of `k`, ascending.
    pub fn lower_covers(&self, k: usize) -> Result<&[usize]> {
        self.concept(k)?;
        Ok(&self.lower[k])
    }

    pub fn cover_count(&self) -> usize {
        self.upper.iter().map(Vec::len).sum()
    }

    /// Object concept of the object at position `g`.
    pub fn object_concept(&self, g: usize) -> usize {
        self.gamma[g]
    }

    /// Attribute concept of the attribute at position `m`.
    pub fn attribute_concept(&self, m: usize) -> usize {
        self.mu[m]
    }

    pub fn object_concept_of(&self, name: &str) -> Result<usize> {
        self.context
            .object_position(name)
            .map(|g| self.gamma[g])
            .ok_or_else(|| Error::NotInContext {
                kind: ElementKind::Object,
                name: name.to_owned(),
            })
    }

    pub fn attribute_concept_of(&self, token: &AttributeToken) -> Result<usize> {
        self.context
            .attribute_position(token)
            .map(|m| self.mu[m])
            .ok_or_else(|| Error::NotInContext {
                kind: ElementKind::Attribute,
                name: token.to_string(),
            })
    }

    /// Objects whose object concept is `k`.
    pub fn object_generators(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.gamma
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == k)
            .map(|(g, _)| g)
    }

    /// Attributes whose attribute concept is `k`.
    pub fn attribute_generators(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.mu.iter().enumerate().filter(move |(_, &c)| c == k).map(|(m, _)| m)
    }

    pub fn concept_with_extent(&self, extent: &ObjectSet) -> Option<usize> {
        self.by_extent.get(extent).copied()
    }

    pub fn concept_with_intent(&self, intent: &AttributeSet) -> Option<usize> {
        self.by_intent.get(intent).copied()
    }

    /// Concept generated by a set of objects.
    pub fn concept_of_objects(&self, objects: &ObjectSet) -> usize {
        self.by_extent[&self.context.close_objects(objects)]
    }

    /// Concept generated by a set of attributes.
    pub fn concept_of_attributes(&self, attributes: &AttributeSet) -> usize {
        self.by_intent[&self.context.close_attributes(attributes)]
    }

    /// `k0 <= k1` in generalization order: extent inclusion.
    pub fn leq(&self, k0: usize, k1: usize) -> Result<bool> {
        Ok(self.extent(k0)?.is_subset(self.extent(k1)?))
    }

    pub fn meet(&self, k0: usize, k1: usize) -> Result<usize> {
        let mut extent = self.extent(k0)?.clone();
        extent.intersect_with(self.extent(k1)?);
        Ok(self.by_extent[&extent])
    }

    pub fn join(&self, k0: usize, k1: usize) -> Result<usize> {
        let mut intent = self.intent(k0)?.clone();
        intent.intersect_with(self.intent(k1)?);
        Ok(self.by_intent[&intent])
    }

    /// Join-irreducible concepts (exactly one lower cover) and
    /// meet-irreducible concepts (exactly one upper cover).
    pub fn irreducibles(&self) -> (Vec<usize>, Vec<usize>) {
        let join = (0..self.len()).filter(|&k| self.lower[k].len() == 1).collect();
        let meet = (0..self.len()).filter(|&k| self.upper[k].len() == 1).collect();
        (join, meet)
    }

    /// All pairs `(k0, k1)` with `k0 < k1`.
    pub fn strict_order(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.concepts.iter().enumerate() {
            for (j, b) in self.concepts.iter().enumerate() {
                if i != j && a.extent.is_subset(&b.extent) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Incidence readout: `g I m` iff `gamma(g) <= mu(m)`.
    pub fn readout(&self) -> FormalContext {
        let ctx = &self.context;
        let mut incidence = Vec::new();
        for (g, &gc) in self.gamma.iter().enumerate() {
            for (m, &mc) in self.mu.iter().enumerate() {
                if self.concepts[gc].extent.is_subset(&self.concepts[mc].extent) {
                    incidence.push((g, m));
                }
            }
        }
        FormalContext::new(ctx.objects().to_vec(), ctx.attributes().to_vec(), incidence)
            .and_then(|c| c.with_orders(ctx.object_order().to_vec(), ctx.attribute_order().to_vec()))
            .expect("readout of a valid lattice")
    }

    /// Extensional neighborhood: the lattice of the context restricted to
    /// `extent(k)`, with the projection `x -> k ∧ x`.
    pub fn meet_restrict(&self, k: usize) -> Result<NeighborhoodLattice> {
        let seed = self.extent(k)?;
        let positions: Vec<usize> = seed.ones().collect();
        let local = ConceptLattice::build(self.context.restrict_objects(seed));
        let to_local = |global: &ObjectSet| -> ObjectSet {
            let mut set = local.context.empty_object_set();
            for (i, &g) in positions.iter().enumerate() {
                if global.contains(g) {
                    set.insert(i);
                }
            }
            set
        };
        let projection = self
            .concepts
            .iter()
            .map(|c| local.by_extent[&to_local(&c.extent)])
            .collect();
        let embedding = local
            .concepts
            .iter()
            .map(|c| {
                let mut global = self.context.empty_object_set();
                for i in c.extent.ones() {
                    global.insert(positions[i]);
                }
                self.by_extent[&global]
            })
            .collect();
        Ok(NeighborhoodLattice {
            lattice: local,
            seed: k,
            kind: NeighborhoodKind::Extensional,
            projection,
            embedding,
        })
    }

    /// Intensional neighborhood, the dual of [`meet_restrict`]: the context
    /// restricted to `intent(k)`, with the projection `x -> k ∨ x`.
    ///
    /// [`meet_restrict`]: ConceptLattice::meet_restrict
    pub fn join_restrict(&self, k: usize) -> Result<NeighborhoodLattice> {
        let seed = self.intent(k)?;
        let positions: Vec<usize> = seed.ones().collect();
        let local = ConceptLattice::build(self.context.restrict_attributes(seed));
        let to_local = |global: &AttributeSet| -> AttributeSet {
            let mut set = local.context.empty_attribute_set();
            for (i, &m) in positions.iter().enumerate() {
                if global.contains(m) {
                    set.insert(i);
                }
            }
            set
        };
        let projection = self
            .concepts
            .iter()
            .map(|c| local.by_intent[&to_local(&c.intent)])
            .collect();
        let embedding = local
            .concepts
            .iter()
            .map(|c| {
                let mut global = self.context.empty_attribute_set();
                for i in c.intent.ones() {
                    global.insert(positions[i]);
                }
                self.by_intent[&global]
            })
            .collect();
        Ok(NeighborhoodLattice {
            lattice: local,
            seed: k,
            kind: NeighborhoodKind::Intensional,
            projection,
            embedding,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborhoodKind {
    /// Restriction to the seed's extent (meet restriction).
    Extensional,
    /// Restriction to the seed's intent (join restriction).
    Intensional,
}

/// A local lattice around a seed concept of some global lattice.
#[derive(Debug, Clone)]
pub struct NeighborhoodLattice {
    pub lattice: ConceptLattice,
    /// Seed index in the global lattice.
    pub seed: usize,
    pub kind: NeighborhoodKind,
    /// Global concept -> local concept.
    pub projection: Vec<usize>,
    /// Local concept -> global concept; right inverse of `projection`.
    pub embedding: Vec<usize>,
}

impl NeighborhoodLattice {
    pub fn project(&self, global: usize) -> Result<usize> {
        self.projection.get(global).copied().ok_or(Error::IndexOutOfRange {
            index: global,
            len: self.projection.len(),
        })
    }

    pub fn embed(&self, local: usize) -> Result<usize> {
        self.embedding.get(local).copied().ok_or(Error::IndexOutOfRange {
            index: local,
            len: self.embedding.len(),
        })
    }

    /// Local concept of a global concept that lies inside the neighborhood.
    pub fn local_of(&self, global: usize) -> Option<usize> {
        self.embedding.iter().position(|&g| g == global)
    }
}

/// True when `map` (indexed by `a`'s concepts) is a bijection onto `b`'s
/// concepts that preserves and reflects the order.
pub fn is_order_isomorphism(a: &ConceptLattice, b: &ConceptLattice, map: &[usize]) -> bool {
    if a.len() != b.len() || map.len() != a.len() {
        return false;
    }
    let mut hit = FixedBitSet::with_capacity(b.len());
    for &k in map {
        if k >= b.len() || hit.put(k) {
            return false;
        }
    }
    for i in 0..a.len() {
        for j in 0..a.len() {
            let left = a.concepts[i].extent.is_subset(&a.concepts[j].extent);
            let right = b.concepts[map[i]].extent.is_subset(&b.concepts[map[j]].extent);
            if left != right {
                return false;
            }
        }
    }
    true
}

/// Closed attribute sets in lectic order.
fn next_closure_intents(ctx: &FormalContext) -> Vec<AttributeSet> {
    let m = ctx.attribute_count();
    let mut current = ctx.close_attributes(&ctx.empty_attribute_set());
    let mut out = vec![current.clone()];
    'outer: loop {
        let mut prefix = current.clone();
        for i in (0..m).rev() {
            if prefix.contains(i) {
                prefix.remove(i);
                continue;
            }
            let mut candidate = prefix.clone();
            candidate.insert(i);
            let closed = ctx.close_attributes(&candidate);
            // accept when the closure adds nothing below i
            let fresh = closed.difference(&prefix).find(|&x| x < i);
            if fresh.is_none() {
                current = closed;
                out.push(current.clone());
                continue 'outer;
            }
        }
        break;
    }
    out
}

/// Extents of the upper covers of the concept `(extent, intent)`.
fn upper_neighbors(ctx: &FormalContext, extent: &ObjectSet, intent: &AttributeSet) -> Vec<ObjectSet> {
    let mut min = ctx.all_objects();
    min.difference_with(extent);
    let candidates: Vec<usize> = min.ones().collect();
    let mut out: Vec<ObjectSet> = Vec::new();
    for g in candidates {
        let mut shared = intent.clone();
        shared.intersect_with(ctx.row(g));
        let grown = ctx.common_objects(&shared);
        let mut extra = grown.clone();
        extra.difference_with(extent);
        extra.set(g, false);
        if extra.is_disjoint(&min) {
            if !out.contains(&grown) {
                out.push(grown);
            }
        } else {
            min.set(g, false);
        }
    }
    out
}
