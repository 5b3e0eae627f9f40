//! Constraints as satisfiability functions, and brute-force oracles for the
//! matching functions they induce.
//!
//! Nothing here runs unit propagation: these oracles are the independent
//! side of every equivalence the verifiers check.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::cnf::{CnfFormula, Lit, PartialAssignment, Var};
use crate::error::{Error, Result};

/// Default cap on the number of variables any exhaustive sweep may range over.
pub const DEFAULT_ENUM_LIMIT: usize = 12;

/// Hard cap for complete-extension scans (2^n satisfier calls).
const MAX_CONSTRAINT_VARS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Bit `i` is the value of the satisfier on the complete assignment whose
    /// binary encoding is `i`, first variable least significant.
    TruthTable(Vec<bool>),
    /// Satisfied iff at most `k` inputs are 1.
    AtMost(usize),
    /// Satisfied iff the wrapped formula is; inputs are all its variables.
    Cnf(CnfFormula),
}

/// A Boolean constraint over an ordered set of input variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    vars: Vec<Var>,
    kind: ConstraintKind,
}

impl Constraint {
    /// At most `k` of `v1..=vn`.
    pub fn at_most(k: usize, n: u32) -> Result<Constraint> {
        check_arity(n as usize)?;
        Ok(Constraint {
            vars: (1..=n).map(Var::from_id).collect(),
            kind: ConstraintKind::AtMost(k),
        })
    }

    pub fn truth_table(n: u32, table: Vec<bool>) -> Result<Constraint> {
        check_arity(n as usize)?;
        if table.len() != 1usize << n {
            return Err(Error::Domain(format!(
                "truth table over {n} variables needs {} entries, got {}",
                1usize << n,
                table.len()
            )));
        }
        Ok(Constraint {
            vars: (1..=n).map(Var::from_id).collect(),
            kind: ConstraintKind::TruthTable(table),
        })
    }

    pub fn from_cnf(formula: CnfFormula) -> Result<Constraint> {
        check_arity(formula.num_vars() as usize)?;
        Ok(Constraint {
            vars: formula.vars().collect(),
            kind: ConstraintKind::Cnf(formula),
        })
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn kind(&self) -> &ConstraintKind {
        &self.kind
    }

    /// h_q on a complete assignment; bit `j` of `bits` is the value of
    /// `vars()[j]`.
    pub fn satisfied(&self, bits: u64) -> bool {
        match &self.kind {
            ConstraintKind::TruthTable(table) => table[bits as usize],
            ConstraintKind::AtMost(k) => (bits.count_ones() as usize) <= *k,
            ConstraintKind::Cnf(formula) => {
                let values: Vec<bool> = (0..self.vars.len()).map(|j| bits >> j & 1 == 1).collect();
                formula.satisfied_by(&values)
            }
        }
    }

    fn position(&self, var: Var) -> Result<usize> {
        self.vars
            .iter()
            .position(|&v| v == var)
            .ok_or_else(|| Error::Domain(format!("{var} is not an input of the constraint")))
    }

    /// Fixed bits and the free positions left by `assignment`.
    fn split(&self, assignment: &PartialAssignment) -> Result<(u64, Vec<usize>)> {
        let mut fixed = 0u64;
        for lit in assignment.lits() {
            let j = self.position(lit.var())?;
            if lit.value() {
                fixed |= 1 << j;
            }
        }
        let free = (0..self.vars.len())
            .filter(|&j| !assignment.is_bound(self.vars[j]))
            .collect();
        Ok((fixed, free))
    }

    /// Every complete extension of `assignment`, as bit patterns.
    pub fn extensions(&self, assignment: &PartialAssignment) -> Result<impl Iterator<Item = u64>> {
        let (fixed, free) = self.split(assignment)?;
        Ok((0u64..1 << free.len()).map(move |choice| {
            free.iter()
                .enumerate()
                .fold(fixed, |acc, (k, &j)| acc | ((choice >> k & 1) << j))
        }))
    }
}

fn check_arity(n: usize) -> Result<()> {
    if n > MAX_CONSTRAINT_VARS {
        return Err(Error::LimitExceeded {
            vars: n,
            limit: MAX_CONSTRAINT_VARS,
        });
    }
    Ok(())
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ConstraintKind::AtMost(k) => write!(f, "atmost {k} of {}", self.vars.len()),
            ConstraintKind::TruthTable(table) => {
                let bits: String = table.iter().map(|&b| if b { '1' } else { '0' }).collect();
                write!(f, "table {} {bits}", self.vars.len())
            }
            ConstraintKind::Cnf(formula) => write!(f, "cnf over {} variables", formula.num_vars()),
        }
    }
}

/// Parses `atmost <k> of <n>` and `table <n> <bits>`. The `cnf <path>` form
/// needs file access and is handled by the command-line front end.
impl FromStr for Constraint {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Constraint> {
        let bad = || Error::Domain(format!("unrecognized constraint `{spec}`"));
        let fields: Vec<&str> = spec.split_whitespace().collect();
        match fields.as_slice() {
            ["atmost", k, "of", n] => {
                Constraint::at_most(k.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?)
            }
            ["table", n, bits] => {
                let table = bits
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(bad()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Constraint::truth_table(n.parse().map_err(|_| bad())?, table)
            }
            _ => Err(bad()),
        }
    }
}

/// Does `assignment` falsify `q`, i.e. does no complete extension satisfy it?
pub fn falsifies(q: &Constraint, assignment: &PartialAssignment) -> Result<bool> {
    Ok(!q.extensions(assignment)?.any(|bits| q.satisfied(bits)))
}

type Predicate = Arc<dyn Fn(&PartialAssignment) -> bool + Send + Sync>;

/// A function from partial assignments over `vars` to yes (`true`) / no
/// (`false`), defined on the assignments where `in_domain` holds.
#[derive(Clone)]
pub struct MatchingFunction {
    vars: Vec<Var>,
    in_domain: Predicate,
    eval: Predicate,
}

impl MatchingFunction {
    pub fn new(
        vars: Vec<Var>,
        in_domain: impl Fn(&PartialAssignment) -> bool + Send + Sync + 'static,
        eval: impl Fn(&PartialAssignment) -> bool + Send + Sync + 'static,
    ) -> MatchingFunction {
        MatchingFunction {
            vars,
            in_domain: Arc::new(in_domain),
            eval: Arc::new(eval),
        }
    }

    /// Defined on every partial assignment over `vars`.
    pub fn total(
        vars: Vec<Var>,
        eval: impl Fn(&PartialAssignment) -> bool + Send + Sync + 'static,
    ) -> MatchingFunction {
        MatchingFunction::new(vars, |_| true, eval)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn in_domain(&self, assignment: &PartialAssignment) -> bool {
        (self.in_domain)(assignment)
    }

    /// Only meaningful where [`MatchingFunction::in_domain`] holds.
    pub fn eval(&self, assignment: &PartialAssignment) -> bool {
        (self.eval)(assignment)
    }
}

impl fmt::Debug for MatchingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatchingFunction")
            .field("vars", &self.vars)
            .finish_non_exhaustive()
    }
}

/// f_q: yes iff the assignment falsifies `q`.
pub fn inconsistency_fn(q: &Constraint) -> MatchingFunction {
    let q = q.clone();
    MatchingFunction::total(q.vars().to_vec(), move |i| {
        falsifies(&q, i).expect("assignment ranges over the constraint's inputs")
    })
}

/// g_{q,ω}: on assignments not falsifying `q`, yes iff adding `[¬ω]` would
/// falsify it. When ω's variable is already bound the answer is whether
/// `[ω]` is the binding.
pub fn arc_fn(q: &Constraint, omega: Lit) -> Result<MatchingFunction> {
    q.position(omega.var())?;
    let domain_q = q.clone();
    let q = q.clone();
    Ok(MatchingFunction::new(
        q.vars().to_vec(),
        move |i| !falsifies(&domain_q, i).expect("assignment ranges over the constraint's inputs"),
        move |i| match i.value(omega.var()) {
            Some(value) => value == omega.value(),
            None => falsifies(&q, &i.with(!omega).expect("variable is unbound"))
                .expect("assignment ranges over the constraint's inputs"),
        },
    ))
}

fn pow3(n: usize) -> u64 {
    3u64.pow(n as u32)
}

/// The partial assignment at position `index` of the ternary enumeration of
/// `vars`: digit `j` (first variable least significant) is 0 for unbound,
/// 1 for true, 2 for false.
pub fn partial_at(vars: &[Var], mut index: u64) -> PartialAssignment {
    let mut out = PartialAssignment::new();
    for &var in vars {
        match index % 3 {
            1 => out.bind(var.pos()).expect("fresh variable"),
            2 => out.bind(var.neg()).expect("fresh variable"),
            _ => {}
        }
        index /= 3;
    }
    out
}

/// Number of partial assignments over `n` variables, after the limit check.
pub fn count_partials(n: usize, limit: usize) -> Result<u64> {
    if n > limit {
        return Err(Error::LimitExceeded { vars: n, limit });
    }
    Ok(pow3(n))
}

/// Iterator over all 3^|V| partial assignments in ternary counting order.
#[derive(Clone, Debug)]
pub struct Partials {
    vars: Vec<Var>,
    next: u64,
    total: u64,
}

impl Iterator for Partials {
    type Item = PartialAssignment;

    fn next(&mut self) -> Option<PartialAssignment> {
        if self.next >= self.total {
            return None;
        }
        let out = partial_at(&self.vars, self.next);
        self.next += 1;
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Partials {}

pub fn enumerate_partials(vars: &[Var], limit: usize) -> Result<Partials> {
    Ok(Partials {
        vars: vars.to_vec(),
        next: 0,
        total: count_partials(vars.len(), limit)?,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn pa(lits: &[i64]) -> PartialAssignment {
        PartialAssignment::from_dimacs(lits).unwrap()
    }

    fn lit(v: i64) -> Lit {
        Lit::from_dimacs(v).unwrap()
    }

    #[test]
    fn at_most_one_falsification() {
        let q = Constraint::at_most(1, 3).unwrap();
        assert!(falsifies(&q, &pa(&[1, 2])).unwrap());
        assert!(!falsifies(&q, &pa(&[1])).unwrap());
        assert!(!falsifies(&q, &pa(&[1, -2, -3])).unwrap());
        assert!(falsifies(&q, &pa(&[1, 2, -3])).unwrap());
    }

    #[test]
    fn foreign_variable_is_a_domain_error() {
        let q = Constraint::at_most(1, 2).unwrap();
        assert!(matches!(falsifies(&q, &pa(&[3])), Err(Error::Domain(_))));
        assert!(arc_fn(&q, lit(5)).is_err());
    }

    #[test]
    fn inconsistency_table_at_most_one() {
        let q = Constraint::at_most(1, 3).unwrap();
        let f = inconsistency_fn(&q);
        assert!(f.eval(&pa(&[1, 3])));
        assert!(!f.eval(&pa(&[])));
        let yes = enumerate_partials(q.vars(), DEFAULT_ENUM_LIMIT)
            .unwrap()
            .filter(|i| f.eval(i))
            .count();
        // exactly two 1s: 3 pairs × (third unbound or 0), plus all three 1s
        assert_eq!(yes, 7);
    }

    #[test]
    fn arc_function_cases() {
        let q = Constraint::at_most(1, 3).unwrap();
        let g = arc_fn(&q, lit(-2)).unwrap();
        assert!(g.in_domain(&pa(&[1])));
        assert!(g.eval(&pa(&[1])));
        assert!(!g.eval(&pa(&[])));
        assert!(!g.in_domain(&pa(&[1, 3])));
        // variable already bound
        assert!(g.eval(&pa(&[-2])));
        assert!(!g.eval(&pa(&[2])));
    }

    #[test]
    fn enumeration_counts() {
        let none = enumerate_partials(&[], 12).unwrap().collect::<Vec<_>>();
        assert_eq!(none, vec![PartialAssignment::new()]);

        let v = Var::from_id(1);
        let one = enumerate_partials(&[v], 12).unwrap().collect::<Vec<_>>();
        assert_eq!(one, vec![pa(&[]), pa(&[1]), pa(&[-1])]);

        let vars: Vec<Var> = (1..=3).map(Var::from_id).collect();
        let all: Vec<_> = enumerate_partials(&vars, 12).unwrap().collect();
        assert_eq!(all.len(), 27);
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), 27);
    }

    #[test]
    fn enumeration_limit() {
        let vars: Vec<Var> = (1..=4).map(Var::from_id).collect();
        assert_eq!(
            enumerate_partials(&vars, 3).unwrap_err(),
            Error::LimitExceeded { vars: 4, limit: 3 }
        );
    }

    #[test]
    fn spec_strings() {
        let q: Constraint = "atmost 2 of 4".parse().unwrap();
        assert_eq!(q, Constraint::at_most(2, 4).unwrap());
        let xor: Constraint = "table 2 0110".parse().unwrap();
        assert!(!xor.satisfied(0b00));
        assert!(xor.satisfied(0b01));
        assert!(xor.satisfied(0b10));
        assert!(!xor.satisfied(0b11));
        assert!("table 2 011".parse::<Constraint>().is_err());
        assert!("atmost x of 3".parse::<Constraint>().is_err());
        assert_eq!(xor.to_string(), "table 2 0110");
    }

    #[test]
    fn cnf_constraint_is_semantic() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[-1]]).unwrap();
        let q = Constraint::from_cnf(f).unwrap();
        assert!(q.satisfied(0b10));
        assert!(!q.satisfied(0b01));
        assert!(!q.satisfied(0b00));
        assert!(falsifies(&q, &pa(&[1])).unwrap());
        assert!(!falsifies(&q, &pa(&[])).unwrap());
    }
}
