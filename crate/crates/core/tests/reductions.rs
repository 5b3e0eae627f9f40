mod common;

use rayon::prelude::*;

use unitres::oracle::{enumerate_partials, partial_at, Constraint, DEFAULT_ENUM_LIMIT};
use unitres::propagate::propagate_fixpoint;
use unitres::reduce::{compose_upac, contra_to_prop, prop_to_contra};
use unitres::verify::is_upi;
use unitres::Var;

#[test]
fn round_trip_preserves_conflicts_on_corpus() {
    let corpus = common::corpus();
    let bad = corpus.par_iter().find_first(|source| {
        let out = contra_to_prop(source).unwrap();
        let back = prop_to_contra(&out.formula, out.map.s()).unwrap();
        let vars: Vec<Var> = source.vars().collect();
        enumerate_partials(&vars, DEFAULT_ENUM_LIMIT).unwrap().any(|i| {
            propagate_fixpoint(&back.restrict(&i).unwrap()).is_conflict()
                != propagate_fixpoint(&source.restrict(&i).unwrap()).is_conflict()
        })
    });
    assert!(bad.is_none(), "{:?}", bad);
}

#[test]
fn verdicts_are_deterministic_and_report_first_failure() {
    let base = common::pairwise_at_most_one(3);
    let q = Constraint::truth_table(3, vec![true; 8]).unwrap();
    let first = is_upi(&base, &q, DEFAULT_ENUM_LIMIT).unwrap();
    for _ in 0..5 {
        assert_eq!(is_upi(&base, &q, DEFAULT_ENUM_LIMIT).unwrap(), first);
    }
    let cex = first.counterexample.expect("the encoding rejects assignments q allows");
    // the earliest assignment with two true inputs: v1 = v2 = 1
    let vars: Vec<Var> = (1..=3).map(Var::from_id).collect();
    assert_eq!(cex.assignment, partial_at(&vars, 1 + 3));
}

#[test]
fn guard_removal_counterexample_is_concrete() {
    let base = common::xor_with_auxiliaries();
    let q = Constraint::truth_table(2, vec![false, true, true, false]).unwrap();
    let c = compose_upac(&base, q.vars()).unwrap();
    for k in 0..c.blocks.len() {
        let verdict = unitres::verify::is_upac(&c.without_guard(k), &q, DEFAULT_ENUM_LIMIT).unwrap();
        let cex = verdict.counterexample.clone().expect("guard is load-bearing");
        assert_eq!(cex.assignment.len(), 1);
        assert!(verdict.report().starts_with("FAILS"));
    }
}

#[test]
fn singleton_source_counts() {
    let source = unitres::CnfFormula::from_dimacs_clauses(1, &[&[1]]).unwrap();
    let out = contra_to_prop(&source).unwrap();
    let c = out.counts;
    assert_eq!(
        (c.injection, c.replication, c.deduction, c.unit, c.collection),
        (2, 2, 0, 1, 1)
    );
    assert_eq!(out.formula.size(), 12);
}
