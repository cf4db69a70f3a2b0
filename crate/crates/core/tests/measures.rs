mod common;

use cks_core::linkage::{
    at_least, ext_diff_measure, ext_linkage, ext_similarity, int_diff_measure, int_linkage, int_similarity,
};
use cks_core::{crispify, linkage_matrix, ConceptLattice, Mode};
use common::{docs_context, k1, random_contexts, strict_pairs};
use num_rational::Ratio;

fn lattices() -> Vec<ConceptLattice> {
    let mut out = vec![k1(), ConceptLattice::build(docs_context())];
    out.extend(random_contexts(21, 40).into_iter().map(ConceptLattice::build));
    out
}

#[test]
fn similarity_is_symmetric_and_bounded() {
    for l in lattices() {
        let n = l.len();
        for i in 0..n {
            let size = l.concepts()[i].extent.count_ones(..);
            for j in 0..n {
                let s = ext_similarity(&l, i, j).unwrap();
                assert_eq!(s, ext_similarity(&l, j, i).unwrap());
                assert!(s <= size);
                assert_eq!(int_similarity(&l, i, j).unwrap(), int_similarity(&l, j, i).unwrap());
            }
        }
    }
}

#[test]
fn linkage_is_one_exactly_on_the_order() {
    let one = Ratio::from_integer(1);
    for l in lattices() {
        for i in 0..l.len() {
            for j in 0..l.len() {
                if let Ok(v) = ext_linkage(&l, i, j) {
                    assert!(v <= one);
                    assert_eq!(v == one, l.leq(i, j).unwrap(), "ext {i} {j}");
                }
                if let Ok(v) = int_linkage(&l, i, j) {
                    assert!(v <= one);
                    assert_eq!(v == one, l.leq(j, i).unwrap(), "int {i} {j}");
                }
            }
        }
    }
}

#[test]
fn difference_is_zero_on_the_order_and_obeys_the_triangle() {
    for l in lattices().into_iter().take(12) {
        let n = l.len();
        for a in 0..n {
            for b in 0..n {
                assert_eq!(int_diff_measure(&l, a, b).unwrap() == 0, l.leq(a, b).unwrap());
                assert_eq!(ext_diff_measure(&l, a, b).unwrap() == 0, l.leq(b, a).unwrap());
                for c in 0..n {
                    assert!(
                        int_diff_measure(&l, a, c).unwrap()
                            <= int_diff_measure(&l, a, b).unwrap() + int_diff_measure(&l, b, c).unwrap()
                    );
                    assert!(
                        ext_diff_measure(&l, a, c).unwrap()
                            <= ext_diff_measure(&l, a, b).unwrap() + ext_diff_measure(&l, b, c).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn intensional_measures_are_extensional_measures_of_the_transpose() {
    for ctx in random_contexts(22, 30) {
        let l = ConceptLattice::build(ctx.clone());
        let t = ConceptLattice::build(ctx.transpose());
        let phi: Vec<usize> = l
            .concepts()
            .iter()
            .map(|c| {
                let mut extent = t.context().empty_object_set();
                extent.extend(c.intent.ones());
                t.concept_with_extent(&extent).unwrap()
            })
            .collect();
        for i in 0..l.len() {
            for j in 0..l.len() {
                assert_eq!(
                    int_similarity(&l, i, j).unwrap(),
                    ext_similarity(&t, phi[i], phi[j]).unwrap()
                );
                assert_eq!(
                    int_diff_measure(&l, i, j).unwrap(),
                    ext_diff_measure(&t, phi[i], phi[j]).unwrap()
                );
                assert_eq!(int_linkage(&l, i, j).ok(), ext_linkage(&t, phi[i], phi[j]).ok());
            }
        }
    }
}

#[test]
fn crisp_links_at_one_are_the_strict_order() {
    for l in lattices() {
        for mode in [Mode::Ext, Mode::Int] {
            let links = crispify(&linkage_matrix(&l, mode), 1.0).unwrap();
            let got: std::collections::BTreeSet<(usize, usize)> = links
                .iter()
                .map(|c| match mode {
                    Mode::Ext => (c.source, c.target),
                    Mode::Int => (c.target, c.source),
                })
                .collect();
            assert_eq!(got, strict_pairs(&l), "{mode:?}");
        }
    }
}

#[test]
fn thresholds_compare_without_rounding() {
    assert!(at_least(Ratio::new(1, 3), 1.0 / 3.0));
    assert!(!at_least(Ratio::new(1, 3), 0.34));
    assert!(at_least(Ratio::new(2, 3), 0.5));
}
