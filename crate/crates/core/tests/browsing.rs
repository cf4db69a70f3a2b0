mod common;

use std::sync::Arc;

use cks_core::{BrowseSession, ConceptLattice, Error, KnowledgeSystem, Mode, Scope};
use common::{docs_system, k1, k1_context};
use num_rational::Ratio;

#[test]
fn docs_similarity_at_plan1() {
    let system = docs_system();
    let mut session = BrowseSession::new(system.clone(), Mode::Ext);
    session.transition(system.concept_named("Plan1").unwrap()).unwrap();
    let ranking = session.ranking().unwrap();
    assert_eq!(
        ranking.render(),
        "2 { [Document, Object] [Plan1, project=plan1] }\n\
         1 { [PostScript, format=postscript] [format=text] }\n\
         0 { [Plan2, project=plan2] }\n"
    );
    let own = ranking.rank_of("Plan1").unwrap();
    assert_eq!(ranking.rank_of("Plan2"), Some(Ratio::from_integer(0)));
    assert_eq!(ranking.rank_of("PostScript"), ranking.rank_of("format=text"));
    assert!(ranking.rank_of("PostScript").unwrap() > Ratio::from_integer(0));
    assert!(ranking.rank_of("PostScript").unwrap() < own);
}

#[test]
fn docs_difference_at_plan1() {
    let system = docs_system();
    let mut session = BrowseSession::new(system.clone(), Mode::Ext);
    session.transition(system.concept_named("Plan1").unwrap()).unwrap();
    session.set_scope(Scope::Local).unwrap();
    let ranking = session.ranking().unwrap();
    assert_eq!(ranking.render(), "0 { [Plan1] }\n1 { [notes0.txt] [plan1.ps] }\n");
}

#[test]
fn scope_protocol() {
    let system = docs_system();
    let mut session = BrowseSession::new(system.clone(), Mode::Ext);
    assert!(matches!(
        session.set_scope(Scope::Local),
        Err(Error::ProtocolViolation(_))
    ));
    assert!(matches!(session.set_mode(Mode::Int), Err(Error::WrongMode { .. })));
    session.set_mode(Mode::Ext).unwrap();

    let plan1 = system.concept_named("Plan1").unwrap();
    let plan2 = system.concept_named("Plan2").unwrap();
    session.transition(plan1).unwrap();
    session.set_scope(Scope::Local).unwrap();
    assert!(matches!(session.rank_similarity(), Err(Error::WrongScope { .. })));
    assert!(matches!(session.transition(plan2), Err(Error::ProtocolViolation(_))));

    let doc = system.concept_named("plan1.ps").unwrap();
    session.transition(doc).unwrap();
    assert_eq!(session.local().unwrap().seed, doc);
    assert_eq!(session.local().unwrap().lattice.len(), 2);

    session.set_scope(Scope::Global).unwrap();
    session.transition(plan2).unwrap();
    assert_eq!(session.state(), Some(plan2));
}

#[test]
fn unnamed_concepts_cannot_be_entered() {
    let system = docs_system();
    let bottom = system.lattice().bottom();
    let mut session = BrowseSession::new(system, Mode::Ext);
    assert!(matches!(session.transition(bottom), Err(Error::NotDisplayable(_))));
}

#[test]
fn neighborhood_projection_is_a_surjective_meet_homomorphism() {
    let lattices = [k1(), docs_system().lattice().clone()];
    for l in &lattices {
        for seed in 0..l.len() {
            let hood = l.meet_restrict(seed).unwrap();
            let local = &hood.lattice;
            let mut hit = vec![false; local.len()];
            for &p in &hood.projection {
                hit[p] = true;
            }
            assert!(hit.iter().all(|&h| h));
            for x in 0..l.len() {
                for y in 0..l.len() {
                    let global_meet = l.meet(x, y).unwrap();
                    let local_meet = local.meet(hood.projection[x], hood.projection[y]).unwrap();
                    assert_eq!(hood.projection[global_meet], local_meet);
                }
            }
        }
        let top = l.meet_restrict(l.top()).unwrap();
        assert!(cks_core::lattice::is_order_isomorphism(
            l,
            &top.lattice,
            &top.projection
        ));
        assert_eq!(l.meet_restrict(l.bottom()).unwrap().lattice.len(), 1);
    }
}

#[test]
fn queries_leave_the_context_untouched() {
    let system = KnowledgeSystem::new(k1(), &[]).unwrap();
    let before = system.lattice().context().clone();
    let goal = system
        .intensional_query(&["b".parse().unwrap(), "c".parse().unwrap()])
        .unwrap();
    assert_eq!(system.lattice().context(), &before);
    assert_eq!(goal.landing, Some(system.lattice().object_concept_of("g2").unwrap()));
    assert_eq!(goal.ranking.rank_of("g2"), Some(Ratio::from_integer(1)));

    let ext = system.extensional_query(&["g1", "g2"]).unwrap();
    assert_eq!(system.lattice().context(), &before);
    assert_eq!(
        ext.landing,
        Some(system.lattice().attribute_concept_of(&"b".parse().unwrap()).unwrap())
    );

    let all = system.intensional_query(&[]).unwrap();
    assert!(all.ranking.groups.iter().all(|g| g.rank == Ratio::from_integer(1)));
    assert!(matches!(
        system.intensional_query(&["z".parse().unwrap()]),
        Err(Error::NotInContext { .. })
    ));
}

#[test]
fn threshold_one_keeps_only_subsumed_labels() {
    let system = KnowledgeSystem::new(ConceptLattice::build(k1_context()), &[]).unwrap();
    let goal = system.intensional_query(&["b".parse().unwrap()]).unwrap();
    let kept = goal.ranking.threshold_filter(1.0);
    let mut names: Vec<&str> = kept
        .groups
        .iter()
        .flat_map(|g| &g.labels)
        .flat_map(|l| &l.names)
        .map(String::as_str)
        .collect();
    names.sort_unstable();
    assert_eq!(names, ["g1", "g2"]);
}

#[test]
fn intensional_sessions_start_from_the_bottom() {
    let system = Arc::new(KnowledgeSystem::new(k1(), &[]).unwrap());
    let session = BrowseSession::new(system, Mode::Int);
    assert!(session.ranking().is_ok());
}
