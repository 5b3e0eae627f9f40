//! Propositional core: variables, literals, clauses, formulas and partial
//! assignments, plus restriction of a formula by an assignment.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Not;

use crate::error::{Error, Result};

/// A propositional variable. Identifiers start at 1, as in DIMACS.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn new(id: u32) -> Result<Var> {
        if id == 0 || id > i32::MAX as u32 {
            return Err(Error::Domain(format!("variable id {id} out of range")));
        }
        Ok(Var(id))
    }

    /// # Panics
    ///
    /// If `id` is zero.
    pub fn from_id(id: u32) -> Var {
        Var::new(id).expect("variable ids start at 1")
    }

    #[inline]
    pub fn id(self) -> u32 {
        self.0
    }

    /// Zero-based position, used to index dense per-variable tables.
    #[inline]
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    #[inline]
    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    #[inline]
    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A literal: a variable or its negation.
///
/// Literals order by variable first, positive before negative, which is the
/// order used for every rendered literal set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    var: Var,
    negative: bool,
}

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit {
            var,
            negative: !positive,
        }
    }

    /// Parses a signed DIMACS integer (`-3` is ¬v3).
    pub fn from_dimacs(value: i64) -> Result<Lit> {
        if value == 0 || value.unsigned_abs() > i32::MAX as u64 {
            return Err(Error::Domain(format!("{value} is not a literal")));
        }
        Ok(Lit::new(Var(value.unsigned_abs() as u32), value > 0))
    }

    #[inline]
    pub fn var(self) -> Var {
        self.var
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        !self.negative
    }

    /// Truth value this literal asserts for its variable.
    #[inline]
    pub fn value(self) -> bool {
        !self.negative
    }

    #[inline]
    pub fn to_dimacs(self) -> i64 {
        if self.negative {
            -(self.var.0 as i64)
        } else {
            self.var.0 as i64
        }
    }

    /// Dense code `2 * index + polarity`, negative literal odd.
    #[inline]
    pub fn code(self) -> usize {
        2 * self.var.index() + self.negative as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Lit {
        Lit {
            var: Var((code / 2) as u32 + 1),
            negative: code % 2 == 1,
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit {
            var: self.var,
            negative: !self.negative,
        }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals with duplicates merged.
///
/// Tautological clauses (containing some ω and ¬ω) are kept as they are;
/// [`Clause::is_tautology`] reports them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Builds a clause, keeping the first occurrence of each repeated literal.
    pub fn new<I: IntoIterator<Item = Lit>>(lits: I) -> Clause {
        let mut out: Vec<Lit> = Vec::new();
        for lit in lits {
            if !out.contains(&lit) {
                out.push(lit);
            }
        }
        Clause { lits: out }
    }

    pub fn unit(lit: Lit) -> Clause {
        Clause { lits: vec![lit] }
    }

    pub fn from_dimacs(values: &[i64]) -> Result<Clause> {
        values
            .iter()
            .map(|&v| Lit::from_dimacs(v))
            .collect::<Result<Vec<_>>>()
            .map(Clause::new)
    }

    #[inline]
    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.lits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn is_tautology(&self) -> bool {
        self.lits.iter().any(|&l| self.lits.contains(&!l))
    }

    /// Whether a complete assignment (indexed by variable) satisfies the clause.
    pub fn satisfied_by(&self, values: &[bool]) -> bool {
        self.lits.iter().any(|l| values[l.var().index()] == l.value())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, lit) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{lit}")?;
        }
        write!(f, ")")
    }
}

/// A CNF formula over the dense variable universe `1..=num_vars`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: u32) -> CnfFormula {
        CnfFormula {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn from_clauses(num_vars: u32, clauses: Vec<Clause>) -> Result<CnfFormula> {
        let mut formula = CnfFormula::new(num_vars);
        for clause in clauses {
            formula.push(clause)?;
        }
        Ok(formula)
    }

    /// Convenience constructor from signed DIMACS literals.
    pub fn from_dimacs_clauses(num_vars: u32, clauses: &[&[i64]]) -> Result<CnfFormula> {
        let clauses = clauses
            .iter()
            .map(|c| Clause::from_dimacs(c))
            .collect::<Result<Vec<_>>>()?;
        CnfFormula::from_clauses(num_vars, clauses)
    }

    /// Appends a clause; every variable must belong to the universe.
    pub fn push(&mut self, clause: Clause) -> Result<()> {
        if let Some(lit) = clause.lits().iter().find(|l| l.var().id() > self.num_vars) {
            return Err(Error::Domain(format!(
                "literal {lit} outside universe 1..={}",
                self.num_vars
            )));
        }
        self.clauses.push(clause);
        Ok(())
    }

    /// Grows the universe to at least `num_vars` variables.
    pub fn extend_universe(&mut self, num_vars: u32) {
        self.num_vars = self.num_vars.max(num_vars);
    }

    #[inline]
    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    #[inline]
    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Sum of clause sizes.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (1..=self.num_vars).map(Var)
    }

    pub fn contains_var(&self, var: Var) -> bool {
        var.id() <= self.num_vars
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    /// Removes and returns the clause at `index`.
    pub fn remove_clause(&mut self, index: usize) -> Clause {
        self.clauses.remove(index)
    }

    /// Whether a complete assignment (indexed by variable) satisfies every clause.
    pub fn satisfied_by(&self, values: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.satisfied_by(values))
    }

    /// `Σ|_I`: the formula with one unit clause appended per binding of `I`,
    /// in variable order.
    pub fn restrict(&self, assignment: &PartialAssignment) -> Result<CnfFormula> {
        let mut out = self.clone();
        for lit in assignment.lits() {
            if !self.contains_var(lit.var()) {
                return Err(Error::Domain(format!(
                    "assignment binds {} outside universe 1..={}",
                    lit.var(),
                    self.num_vars
                )));
            }
            out.clauses.push(Clause::unit(lit));
        }
        Ok(out)
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, clause) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{clause}")?;
        }
        Ok(())
    }
}

/// A non-contradictory partial assignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct PartialAssignment {
    bindings: BTreeMap<Var, bool>,
}

impl PartialAssignment {
    pub fn new() -> PartialAssignment {
        PartialAssignment::default()
    }

    /// Builds an assignment from literals; a variable bound both ways is rejected.
    pub fn from_lits<I: IntoIterator<Item = Lit>>(lits: I) -> Result<PartialAssignment> {
        let mut out = PartialAssignment::new();
        for lit in lits {
            out.bind(lit)?;
        }
        Ok(out)
    }

    pub fn from_dimacs(values: &[i64]) -> Result<PartialAssignment> {
        PartialAssignment::from_lits(
            values
                .iter()
                .map(|&v| Lit::from_dimacs(v))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Adds `[lit]`. Binding a variable to its current value is a no-op.
    pub fn bind(&mut self, lit: Lit) -> Result<()> {
        match self.bindings.get(&lit.var()) {
            Some(&value) if value != lit.value() => Err(Error::Contradictory(lit.var())),
            _ => {
                self.bindings.insert(lit.var(), lit.value());
                Ok(())
            }
        }
    }

    /// Copy of `self` with `[lit]` added.
    pub fn with(&self, lit: Lit) -> Result<PartialAssignment> {
        let mut out = self.clone();
        out.bind(lit)?;
        Ok(out)
    }

    pub fn value(&self, var: Var) -> Option<bool> {
        self.bindings.get(&var).copied()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.value(lit.var()) == Some(lit.value())
    }

    pub fn is_bound(&self, var: Var) -> bool {
        self.bindings.contains_key(&var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn is_complete_on(&self, vars: &[Var]) -> bool {
        vars.iter().all(|v| self.is_bound(*v))
    }

    /// Bound literals in variable order.
    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.bindings.iter().map(|(&v, &b)| Lit::new(v, b))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.bindings.keys().copied()
    }

    pub fn to_lit_set(&self) -> LiteralSet {
        self.lits().collect()
    }
}

impl fmt::Display for PartialAssignment {
    /// `v1=1, v3=0`; the empty assignment renders as `{}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, (var, value)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{var}={}", *value as u8)?;
        }
        Ok(())
    }
}

/// A set of literals that may hold both polarities of a variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LiteralSet {
    members: BTreeSet<Lit>,
}

impl LiteralSet {
    pub fn new() -> LiteralSet {
        LiteralSet::default()
    }

    pub fn insert(&mut self, lit: Lit) -> bool {
        self.members.insert(lit)
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.members.contains(&lit)
    }

    /// True iff some variable occurs with both polarities.
    pub fn is_contradictory(&self) -> bool {
        self.members
            .iter()
            .any(|&l| l.is_positive() && self.members.contains(&!l))
    }

    pub fn is_subset(&self, other: &LiteralSet) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Lit> + '_ {
        self.members.iter().copied()
    }
}

impl FromIterator<Lit> for LiteralSet {
    fn from_iter<I: IntoIterator<Item = Lit>>(iter: I) -> Self {
        LiteralSet {
            members: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for LiteralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, lit) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{lit}")?;
        }
        write!(f, "}}")
    }
}

/// Optional human-readable variable names, used only when rendering traces.
#[derive(Clone, Debug, Default)]
pub struct VarNames {
    names: HashMap<Var, String>,
}

impl VarNames {
    pub fn new() -> VarNames {
        VarNames::default()
    }

    /// Names variables 1, 2, ... in order.
    pub fn from_list<S: AsRef<str>>(names: &[S]) -> VarNames {
        let mut out = VarNames::new();
        for (i, name) in names.iter().enumerate() {
            out.insert(Var::from_id(i as u32 + 1), name.as_ref());
        }
        out
    }

    pub fn insert(&mut self, var: Var, name: impl Into<String>) {
        self.names.insert(var, name.into());
    }

    pub fn get(&self, var: Var) -> Option<&str> {
        self.names.get(&var).map(String::as_str)
    }

    /// `a` / `¬a` when named, DIMACS integer otherwise.
    pub fn lit(&self, lit: Lit) -> String {
        match self.get(lit.var()) {
            Some(name) if lit.is_positive() => name.to_string(),
            Some(name) => format!("¬{name}"),
            None => lit.to_string(),
        }
    }

    pub fn clause(&self, clause: &Clause) -> String {
        let body: Vec<String> = clause.lits().iter().map(|&l| self.lit(l)).collect();
        format!("({})", body.join(" ∨ "))
    }
}
