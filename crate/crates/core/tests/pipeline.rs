//! End-to-end checks across modules, using only the public API.

use iri::bisim::{check_delta_bisim, distinguishing_formula, max_delta_bisim, Language};
use iri::kripke::load_model;
use iri::search::{enumerate_bimodels, find_countermodel, SearchBound};
use iri::semantics::extension;
use iri::{parse, FrameClass, PointedModel};

#[test]
fn enumerated_countermodels_round_trip_through_json() {
    let f = parse("IR p -> I I p | I (I p | p)").unwrap();
    let class = FrameClass::proper();
    let v = find_countermodel(&f, &class, &SearchBound::new(4, ["p"])).unwrap();
    let (m, w) = v.countermodel().expect("a countermodel");
    let reloaded = load_model(&m.to_json()).unwrap();
    assert_eq!(&reloaded, m);
    assert!(reloaded.check_frame_property(&class));
    assert!(!PointedModel::new(&reloaded, w).unwrap().eval(&f).unwrap());
}

#[test]
fn largest_bisimulation_preserves_li_on_enumerated_models() {
    let models = enumerate_bimodels(&SearchBound::new(2, ["p"]), &FrameClass::proper()).unwrap();
    let f = parse("I (p | I p) & ~I ~p").unwrap();
    for m1 in models.iter().step_by(7) {
        for m2 in models.iter().step_by(11) {
            let z = max_delta_bisim(m1, m2);
            assert!(z.is_empty() || check_delta_bisim(m1, m2, &z).unwrap());
            let (e1, e2) = (extension(m1, &f).unwrap(), extension(m2, &f).unwrap());
            for (a, b) in &z.pairs {
                let (i, j) = (m1.world_index(a).unwrap(), m2.world_index(b).unwrap());
                assert_eq!(e1[i], e2[j]);
                let none = distinguishing_formula(
                    &PointedModel::new(m1, a).unwrap(),
                    &PointedModel::new(m2, b).unwrap(),
                    Language::LI,
                    4,
                )
                .unwrap();
                assert_eq!(none, None);
            }
        }
    }
}
