//! Exhaustive checkers with counterexample reporting.
//!
//! Every sweep enumerates partial assignments in the fixed ternary order of
//! [`crate::oracle::enumerate_partials`], evaluates them in parallel, and
//! reports the first failure in that order. Expected values always come from
//! a brute-force constraint oracle or from runs on the *source* formula,
//! never from the formula under test.

use std::fmt;

use rayon::prelude::*;

use crate::cnf::{CnfFormula, Lit, LiteralSet, PartialAssignment, Var};
use crate::error::{Error, Result};
use crate::oracle::{count_partials, falsifies, inconsistency_fn, partial_at, Constraint, MatchingFunction};
use crate::propagate::{propagate_fixpoint, trace_input, InputStage};
use crate::reduce::{contra_to_prop, ReductionOutput};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Holds,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub assignment: PartialAssignment,
    /// Extra coordinates of the failure (literal, stage), if any.
    pub detail: Option<String>,
    pub expected: String,
    pub observed: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub counterexample: Option<Counterexample>,
    /// Number of in-domain assignments examined, up to and including the
    /// counterexample.
    pub checked: u64,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    fn pass(checked: u64) -> Verdict {
        Verdict {
            status: Status::Holds,
            counterexample: None,
            checked,
        }
    }

    fn fail(checked: u64, counterexample: Counterexample) -> Verdict {
        Verdict {
            status: Status::Fails,
            counterexample: Some(counterexample),
            checked,
        }
    }

    pub fn report(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => writeln!(f, "HOLDS checked={}", self.checked),
            Some(cex) => {
                writeln!(f, "FAILS checked={}", self.checked)?;
                writeln!(f, "assignment: {}", cex.assignment)?;
                if let Some(detail) = &cex.detail {
                    writeln!(f, "at: {detail}")?;
                }
                writeln!(f, "expected: {}", cex.expected)?;
                writeln!(f, "observed: {}", cex.observed)
            }
        }
    }
}

enum Check {
    OutOfDomain,
    Passed,
    Failed(Counterexample),
}

fn sweep<F>(vars: &[Var], limit: usize, check: F) -> Result<Verdict>
where
    F: Fn(&PartialAssignment) -> Check + Sync,
{
    let total = count_partials(vars.len(), limit)?;
    let results: Vec<Check> = (0..total)
        .into_par_iter()
        .map(|idx| check(&partial_at(vars, idx)))
        .collect();
    let mut checked = 0;
    for result in results {
        match result {
            Check::OutOfDomain => {}
            Check::Passed => checked += 1,
            Check::Failed(cex) => return Ok(Verdict::fail(checked + 1, cex)),
        }
    }
    Ok(Verdict::pass(checked))
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn require_vars(formula: &CnfFormula, vars: &[Var]) -> Result<()> {
    match vars.iter().find(|v| !formula.contains_var(**v)) {
        Some(v) => Err(Error::Domain(format!("{v} outside the formula's universe"))),
        None => Ok(()),
    }
}

fn conflicts(formula: &CnfFormula, assignment: &PartialAssignment) -> bool {
    propagate_fixpoint(&formula.restrict(assignment).expect("inputs lie in the universe")).is_conflict()
}

/// f_Σ over `vars`: yes iff unit resolution on Σ|_I produces the empty clause.
pub fn contradiction_fn(formula: &CnfFormula, vars: &[Var]) -> Result<MatchingFunction> {
    require_vars(formula, vars)?;
    let formula = formula.clone();
    Ok(MatchingFunction::total(vars.to_vec(), move |i| conflicts(&formula, i)))
}

/// g_{Σ,ω} over `vars`: defined where f_Σ is no; yes iff `[ω]` is inferred.
pub fn propagation_fn(formula: &CnfFormula, vars: &[Var], omega: Lit) -> Result<MatchingFunction> {
    require_vars(formula, vars)?;
    require_vars(formula, &[omega.var()])?;
    let domain = formula.clone();
    let formula = formula.clone();
    Ok(MatchingFunction::new(
        vars.to_vec(),
        move |i| !conflicts(&domain, i),
        move |i| {
            propagate_fixpoint(&formula.restrict(i).expect("inputs lie in the universe"))
                .final_set
                .contains(omega)
        },
    ))
}

/// Does unit resolution on Σ|_I conflict exactly where `f` says yes?
pub fn computes_by_contradiction(formula: &CnfFormula, f: &MatchingFunction, limit: usize) -> Result<Verdict> {
    require_vars(formula, f.vars())?;
    sweep(f.vars(), limit, |i| {
        if !f.in_domain(i) {
            return Check::OutOfDomain;
        }
        let expected = f.eval(i);
        let observed = conflicts(formula, i);
        if expected == observed {
            Check::Passed
        } else {
            Check::Failed(Counterexample {
                assignment: i.clone(),
                detail: None,
                expected: if expected { "conflict" } else { "no conflict" }.into(),
                observed: if observed { "conflict" } else { "no conflict" }.into(),
            })
        }
    })
}

/// Does unit resolution on Σ|_I never conflict and infer `[ω]` exactly where
/// `f` says yes?
pub fn computes_by_propagation(
    formula: &CnfFormula,
    f: &MatchingFunction,
    omega: Lit,
    limit: usize,
) -> Result<Verdict> {
    require_vars(formula, f.vars())?;
    require_vars(formula, &[omega.var()])?;
    sweep(f.vars(), limit, |i| {
        if !f.in_domain(i) {
            return Check::OutOfDomain;
        }
        let expected = f.eval(i);
        let outcome = propagate_fixpoint(&formula.restrict(i).expect("inputs lie in the universe"));
        let observed = if outcome.is_conflict() {
            None
        } else {
            Some(outcome.final_set.contains(omega))
        };
        if observed == Some(expected) {
            Check::Passed
        } else {
            Check::Failed(Counterexample {
                assignment: i.clone(),
                detail: Some(format!("output {omega}")),
                expected: format!("inferred: {}", yes_no(expected)),
                observed: match observed {
                    None => "conflict".into(),
                    Some(b) => format!("inferred: {}", yes_no(b)),
                },
            })
        }
    })
}

/// Unit propagation detects every partial assignment falsifying `q`.
pub fn is_upi(formula: &CnfFormula, q: &Constraint, limit: usize) -> Result<Verdict> {
    computes_by_contradiction(formula, &inconsistency_fn(q), limit)
}

/// Unit propagation detects inconsistency and, on assignments that do not
/// falsify `q`, infers exactly the unbound input literals forced by `q`.
pub fn is_upac(formula: &CnfFormula, q: &Constraint, limit: usize) -> Result<Verdict> {
    require_vars(formula, q.vars())?;
    let lits: Vec<Lit> = q.vars().iter().flat_map(|v| [v.pos(), v.neg()]).collect();
    sweep(q.vars(), limit, |i| {
        let falsified = falsifies(q, i).expect("assignment ranges over the inputs");
        let outcome = propagate_fixpoint(&formula.restrict(i).expect("inputs lie in the universe"));
        let fail = |detail: Option<String>, expected: &str, observed: &str| {
            Check::Failed(Counterexample {
                assignment: i.clone(),
                detail,
                expected: expected.into(),
                observed: observed.into(),
            })
        };
        if falsified {
            return if outcome.is_conflict() {
                Check::Passed
            } else {
                fail(None, "conflict", "no conflict")
            };
        }
        if outcome.is_conflict() {
            return fail(None, "no conflict", "conflict");
        }
        for &omega in lits.iter().filter(|l| !i.is_bound(l.var())) {
            let forced = falsifies(q, &i.with(!omega).expect("unbound")).expect("inputs");
            let inferred = outcome.final_set.contains(omega);
            if forced != inferred {
                return fail(
                    Some(format!("literal {omega}")),
                    &format!("inferred: {}", yes_no(forced)),
                    &format!("inferred: {}", yes_no(inferred)),
                );
            }
        }
        Check::Passed
    })
}

/// Stage-by-stage correspondence between unit resolution on Σ_c|_I and on
/// the simulation Σ_p built from it: for every m ∈ 1..=n+1 and literal ω,
/// `x_{ω,m} ∈ U(Σ_p|_I, m)` iff `ω ∈ U(Σ_c|_I, m)`.
///
/// On Σ_c the assignment enters through its restriction units at stage 1;
/// on Σ_p it is the stage-0 set, so the injection clauses fire at stage 1.
pub fn check_stage_correspondence(source: &CnfFormula, assignment: &PartialAssignment) -> Result<Verdict> {
    let reduction = contra_to_prop(source)?;
    stage_correspondence(source, &reduction, assignment)
}

/// [`check_stage_correspondence`] for every partial assignment over the
/// source universe; `checked` counts assignments.
pub fn check_stage_correspondence_all(source: &CnfFormula, limit: usize) -> Result<Verdict> {
    let reduction = contra_to_prop(source)?;
    let vars: Vec<Var> = source.vars().collect();
    sweep(&vars, limit, |i| {
        let verdict = stage_correspondence(source, &reduction, i).expect("inputs lie in the universe");
        match verdict.counterexample {
            None => Check::Passed,
            Some(cex) => Check::Failed(cex),
        }
    })
}

/// Core of the stage correspondence check against an existing reduction of
/// `source`. `checked` counts (stage, literal) comparisons.
pub fn stage_correspondence(
    source: &CnfFormula,
    reduction: &ReductionOutput,
    assignment: &PartialAssignment,
) -> Result<Verdict> {
    let map = &reduction.map;
    let horizon = map.horizon();
    let simulated = trace_input(source, assignment, InputStage::RestrictionUnits, horizon)?;
    let simulation = trace_input(&reduction.formula, assignment, InputStage::Initial, horizon + 1)?;
    let mut checked = 0;
    for m in 1..=horizon {
        let u_c: &LiteralSet = simulated.stage_assignment(m);
        let u_p: &LiteralSet = simulation.stage_assignment(m);
        for code in 0..2 * source.num_vars() as usize {
            let omega = Lit::from_code(code);
            checked += 1;
            let expected = u_c.contains(omega);
            let observed = u_p.contains(map.x(omega, m));
            if expected != observed {
                return Ok(Verdict::fail(
                    checked,
                    Counterexample {
                        assignment: assignment.clone(),
                        detail: Some(format!("stage {m}, literal {omega}")),
                        expected: format!("x present: {}", yes_no(expected)),
                        observed: format!("x present: {}", yes_no(observed)),
                    },
                ));
            }
        }
    }
    Ok(Verdict::pass(checked))
}

/// Checks the reduction's family counts against their closed forms and its
/// size against `k · n² · max(p, 1)`.
pub fn check_size_bound(out: &ReductionOutput, k: usize) -> Verdict {
    let expected = out.source.expected_counts();
    let fail = |expected: String, observed: String| {
        Verdict::fail(
            1,
            Counterexample {
                assignment: PartialAssignment::new(),
                detail: None,
                expected,
                observed,
            },
        )
    };
    if out.counts != expected {
        return fail(format!("{expected:?}"), format!("{:?}", out.counts));
    }
    if out.counts.total() != out.formula.num_clauses() {
        return fail(
            format!("{} clauses", out.counts.total()),
            format!("{} clauses", out.formula.num_clauses()),
        );
    }
    let n = out.source.n;
    let bound = k * n * n * out.source.p.max(1);
    let size = out.formula.size();
    if size > bound {
        return fail(format!("size ≤ {bound}"), format!("size {size}"));
    }
    Verdict::pass(1)
}

/// size(Σ_p) / (n² · max(p, 1)).
pub fn size_ratio(out: &ReductionOutput) -> f64 {
    let n = out.source.n as f64;
    out.formula.size() as f64 / (n * n * out.source.p.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{Constraint, DEFAULT_ENUM_LIMIT};
    use crate::reduce::prop_to_contra;

    const LIMIT: usize = DEFAULT_ENUM_LIMIT;

    fn formula(num_vars: u32, clauses: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_dimacs_clauses(num_vars, clauses).unwrap()
    }

    fn pairwise_at_most_one() -> CnfFormula {
        formula(3, &[&[-1, -2], &[-1, -3], &[-2, -3]])
    }

    fn lit(v: i64) -> Lit {
        Lit::from_dimacs(v).unwrap()
    }

    #[test]
    fn pairwise_computes_inconsistency() {
        let q = Constraint::at_most(1, 3).unwrap();
        let v = computes_by_contradiction(&pairwise_at_most_one(), &inconsistency_fn(&q), LIMIT).unwrap();
        assert!(v.holds());
        assert_eq!(v.checked, 27);
    }

    #[test]
    fn empty_formula_computes_constant_no() {
        let vars = vec![Var::from_id(1)];
        let f = MatchingFunction::total(vars, |_| false);
        assert!(computes_by_contradiction(&formula(1, &[]), &f, LIMIT).unwrap().holds());
    }

    #[test]
    fn unit_formula_fails_against_at_most_one() {
        let q = Constraint::at_most(1, 3).unwrap();
        let v = computes_by_contradiction(&formula(3, &[&[1]]), &inconsistency_fn(&q), LIMIT).unwrap();
        assert_eq!(v.status, Status::Fails);
        let cex = v.counterexample.unwrap();
        assert_eq!(cex.assignment, PartialAssignment::from_dimacs(&[-1]).unwrap());
        assert_eq!(cex.expected, "no conflict");
        assert_eq!(cex.observed, "conflict");
    }

    #[test]
    fn implication_computes_by_propagation() {
        let sigma = formula(2, &[&[-1, 2]]);
        let a = Var::from_id(1);
        let f = MatchingFunction::total(vec![a], move |i| i.contains(a.pos()));
        assert!(computes_by_propagation(&sigma, &f, lit(2), LIMIT).unwrap().holds());
    }

    #[test]
    fn propagation_fails_on_conflicting_input() {
        let sigma = formula(2, &[&[-1, 2], &[-2]]);
        let a = Var::from_id(1);
        let f = MatchingFunction::total(vec![a], move |i| i.contains(a.pos()));
        let v = computes_by_propagation(&sigma, &f, lit(2), LIMIT).unwrap();
        let cex = v.counterexample.unwrap();
        assert_eq!(cex.assignment, PartialAssignment::from_dimacs(&[1]).unwrap());
        assert_eq!(cex.observed, "conflict");
    }

    #[test]
    fn worked_example_simulation_computes_its_contradiction_function() {
        let sc = formula(4, &[&[1], &[-1, 2, 3], &[-3, -4]]);
        let out = contra_to_prop(&sc).unwrap();
        let vars: Vec<Var> = sc.vars().collect();
        let f = contradiction_fn(&sc, &vars).unwrap();
        let v = computes_by_propagation(&out.formula, &f, out.map.s(), LIMIT).unwrap();
        assert!(v.holds(), "{v}");
        assert_eq!(v.checked, 81);

        let back = prop_to_contra(&out.formula, out.map.s()).unwrap();
        assert!(computes_by_contradiction(&back, &f, LIMIT).unwrap().holds());
    }

    #[test]
    fn stage_correspondence_worked_example() {
        let sc = formula(4, &[&[1], &[-1, 2, 3], &[-3, -4]]);
        let i = PartialAssignment::from_dimacs(&[-2, 4]).unwrap();
        let v = check_stage_correspondence(&sc, &i).unwrap();
        assert!(v.holds(), "{v}");
        assert_eq!(v.checked, 5 * 8);
        assert!(check_stage_correspondence_all(&sc, LIMIT).unwrap().holds());
    }

    #[test]
    fn stage_correspondence_base_case() {
        let sc = formula(1, &[&[1]]);
        let v = check_stage_correspondence(&sc, &PartialAssignment::new()).unwrap();
        assert!(v.holds());
    }

    #[test]
    fn upi_and_upac_of_pairwise() {
        let q = Constraint::at_most(1, 3).unwrap();
        assert!(is_upi(&pairwise_at_most_one(), &q, LIMIT).unwrap().holds());
        assert!(is_upac(&pairwise_at_most_one(), &q, LIMIT).unwrap().holds());
    }

    #[test]
    fn upac_detects_missing_propagation() {
        // (¬v1∨¬v2) alone: v3 is unconstrained, so with I = {v1} the
        // literal ¬v3 is forced by at-most-one but not inferred.
        let q = Constraint::at_most(1, 3).unwrap();
        let weak = formula(3, &[&[-1, -2]]);
        let v = is_upac(&weak, &q, LIMIT).unwrap();
        assert_eq!(v.status, Status::Fails);
        let cex = v.counterexample.unwrap();
        assert_eq!(cex.assignment, PartialAssignment::from_dimacs(&[1]).unwrap());
        assert_eq!(cex.detail.as_deref(), Some("literal -3"));
    }

    #[test]
    fn size_bound_on_worked_example() {
        let sc = formula(4, &[&[1], &[-1, 2, 3], &[-3, -4]]);
        let out = contra_to_prop(&sc).unwrap();
        assert!(check_size_bound(&out, 13).holds());
        assert!(!check_size_bound(&out, 1).holds());
    }

    #[test]
    fn limit_is_enforced() {
        let q = Constraint::at_most(1, 3).unwrap();
        assert!(matches!(
            is_upi(&pairwise_at_most_one(), &q, 2),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn report_format() {
        let q = Constraint::at_most(1, 3).unwrap();
        let ok = is_upi(&pairwise_at_most_one(), &q, LIMIT).unwrap();
        assert_eq!(ok.report(), "HOLDS checked=27\n");
        let bad = is_upi(&formula(3, &[&[-1, -2]]), &q, LIMIT).unwrap();
        let text = bad.report();
        assert!(text.starts_with("FAILS checked="), "{text}");
        assert!(text.contains("assignment: v1=1, v3=1\n"), "{text}");
        assert!(text.ends_with("expected: conflict\nobserved: no conflict\n"));
    }
}
