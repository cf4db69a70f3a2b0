//! Extensional and intensional linkage between concepts.
//!
//! Cardinalities count the elements of whatever context the lattice was
//! built from. Callers that want the counts of a purified, reduced context
//! build the lattice from that context.
//!
//! Linkage values are exact ratios; compare them as ratios, never as floats.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::context::{AttributeSet, ObjectSet};
use crate::error::{Error, Result};
use crate::lattice::ConceptLattice;

/// Browsing and measuring happen either over extents or over intents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[serde(alias = "extensional")]
    Ext,
    #[serde(alias = "intensional")]
    Int,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Ext => "extensional",
            Mode::Int => "intensional",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ext" | "extensional" => Ok(Mode::Ext),
            "int" | "intensional" => Ok(Mode::Int),
            other => Err(format!("unknown mode `{other}` (expected ext or int)")),
        }
    }
}

fn pair(l: &ConceptLattice, k0: usize, k1: usize) -> Result<(&crate::Concept, &crate::Concept)> {
    Ok((l.concept(k0)?, l.concept(k1)?))
}

/// Size of the common extent.
pub fn ext_similarity(l: &ConceptLattice, k0: usize, k1: usize) -> Result<usize> {
    let (a, b) = pair(l, k0, k1)?;
    Ok(a.extent.intersection(&b.extent).count())
}

/// Fraction of `extent(k0)` that lies in `extent(k1)`, read as `p(k1 | k0)`.
pub fn ext_linkage(l: &ConceptLattice, k0: usize, k1: usize) -> Result<Ratio<usize>> {
    let size = l.concept(k0)?.extent.count_ones(..);
    if size == 0 {
        return Err(Error::EmptyExtent(k0));
    }
    Ok(Ratio::new(ext_similarity(l, k0, k1)?, size))
}

/// Attributes of `k1` that `k0` lacks. Empty exactly when `k0 <= k1`.
pub fn int_difference(l: &ConceptLattice, k0: usize, k1: usize) -> Result<AttributeSet> {
    let (a, b) = pair(l, k0, k1)?;
    let mut out = b.intent.clone();
    out.difference_with(&a.intent);
    Ok(out)
}

pub fn int_diff_measure(l: &ConceptLattice, k0: usize, k1: usize) -> Result<usize> {
    Ok(int_difference(l, k0, k1)?.count_ones(..))
}

/// Size of the common intent.
pub fn int_similarity(l: &ConceptLattice, k0: usize, k1: usize) -> Result<usize> {
    let (a, b) = pair(l, k0, k1)?;
    Ok(a.intent.intersection(&b.intent).count())
}

pub fn int_linkage(l: &ConceptLattice, k0: usize, k1: usize) -> Result<Ratio<usize>> {
    let size = l.concept(k0)?.intent.count_ones(..);
    if size == 0 {
        return Err(Error::EmptyIntent(k0));
    }
    Ok(Ratio::new(int_similarity(l, k0, k1)?, size))
}

/// Objects of `k1` that `k0` lacks. Empty exactly when `k1 <= k0`.
pub fn ext_difference(l: &ConceptLattice, k0: usize, k1: usize) -> Result<ObjectSet> {
    let (a, b) = pair(l, k0, k1)?;
    let mut out = b.extent.clone();
    out.difference_with(&a.extent);
    Ok(out)
}

pub fn ext_diff_measure(l: &ConceptLattice, k0: usize, k1: usize) -> Result<usize> {
    Ok(ext_difference(l, k0, k1)?.count_ones(..))
}

/// Square matrix of linkage values between all concepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkageMatrix {
    mode: Mode,
    entries: Vec<Vec<Ratio<usize>>>,
}

impl LinkageMatrix {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dimension(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Ratio<usize> {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Ratio<usize>>] {
        &self.entries
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|&r| ratio_f64(r)).collect())
            .collect()
    }
}

pub fn ratio_f64(r: Ratio<usize>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// All pairwise linkage values.
///
/// A concept with an empty extent (empty intent in INT mode) has a row of
/// ones: the empty conjunction implies everything, which keeps the row
/// consistent with "value 1 exactly on the order".
pub fn linkage_matrix(l: &ConceptLattice, mode: Mode) -> LinkageMatrix {
    let n = l.len();
    let entries = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let value = match mode {
                        Mode::Ext => ext_linkage(l, i, j),
                        Mode::Int => int_linkage(l, i, j),
                    };
                    value.unwrap_or_else(|_| Ratio::from_integer(1))
                })
                .collect()
        })
        .collect();
    LinkageMatrix { mode, entries }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrispLink {
    pub source: usize,
    pub target: usize,
    pub weight: Ratio<usize>,
}

impl CrispLink {
    pub fn weight_f64(&self) -> f64 {
        ratio_f64(self.weight)
    }
}

/// Off-diagonal entries at or above `threshold`, in row-major order.
pub fn crispify(m: &LinkageMatrix, threshold: f64) -> Result<Vec<CrispLink>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::ThresholdOutOfRange(threshold));
    }
    let mut out = Vec::new();
    for (i, row) in m.entries.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            if i != j && at_least(w, threshold) {
                out.push(CrispLink {
                    source: i,
                    target: j,
                    weight: w,
                });
            }
        }
    }
    Ok(out)
}

/// `r >= t` without dividing: `numer >= t * denom`.
pub fn at_least(r: Ratio<usize>, t: f64) -> bool {
    *r.numer() as f64 >= t * *r.denom() as f64
}

/// Writes links as `source target weight`, 1-based, weight to 6 decimals.
pub fn format_links(links: &[CrispLink]) -> String {
    let mut out = String::new();
    for link in links {
        out.push_str(&format!(
            "{} {} {:.6}\n",
            link.source + 1,
            link.target + 1,
            link.weight_f64()
        ));
    }
    out
}
