mod common;

use std::sync::Arc;

use common::*;
use graph_dilation::problem::Problem;
use graph_dilation::representation::{induced_regular_rep, GraphRep};
use graph_dilation::linalg::Tolerance;
use proptest::prelude::*;

fn same_rep(a: &GraphRep, b: &GraphRep) -> bool {
    a.dim() == b.dim()
        && a.edge_ops() == b.edge_ops()
        && a.projections() == b.projections()
        && a.unitaries() == b.unitaries()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_text_round_trips_bit_for_bit(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let rep = random_case(&mut rng);
        let problem = Problem::from_rep(rep.clone());
        let text = problem.to_canonical_string().unwrap();
        let back = Problem::parse(&text).unwrap();
        prop_assert!(same_rep(back.representation.as_ref().unwrap(), &rep));
        prop_assert_eq!(&*back.graph, &**rep.graph());
        prop_assert_eq!(back.to_canonical_string().unwrap(), text);
    }

    #[test]
    fn covariant_problems_round_trip(seed in any::<u64>(), which in 0usize..6) {
        let mut rng = rng(seed);
        let (_, action) = z2_actions().into_iter().chain(z3_actions()).nth(which).unwrap();
        let base = random_cc_rep(&mut rng, Arc::clone(action.graph()), 2);
        let rep = induced_regular_rep(&base, &action, &Tolerance::default()).unwrap();
        let text = Problem::from_rep(rep.clone()).to_canonical_string().unwrap();
        let back = Problem::parse(&text).unwrap();
        prop_assert!(back.action.is_some());
        prop_assert!(same_rep(back.representation.as_ref().unwrap(), &rep));
        prop_assert_eq!(back.to_canonical_string().unwrap(), text);
    }
}

#[test]
fn shipped_examples_are_canonical_after_one_pass() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let Ok(problem) = Problem::load(&path) else { continue };
        let once = problem.to_canonical_string().unwrap();
        let twice = Problem::parse(&once).unwrap().to_canonical_string().unwrap();
        assert_eq!(once, twice, "{}", path.display());
    }
}

#[test]
fn parse_errors_name_the_problem() {
    let err = Problem::parse("{\"graph\": {\"vertices\": [\"v\"], \"edges\": [{\"id\": \"e\", \"src\": \"v\", \"dst\": \"x\"}]}}")
        .unwrap_err()
        .to_string();
    assert!(err.contains('x'), "{err}");
    assert!(Problem::parse("{ not json").is_err());
}
