//! Formula-to-formula reductions between the two ways unit resolution
//! computes a matching function.
//!
//! * [`prop_to_contra`]: from an output literal ω, append `(¬ω)`.
//! * [`contra_to_prop`]: simulate the stages of unit resolution on Σ_c with
//!   stage-indexed copies `x_{ω,i}` of every literal, so that a fresh output
//!   variable `s` is inferred exactly when Σ_c would have conflicted.
//! * [`compose_upac`]: one simulation block per input literal, each guarded
//!   by `(¬s_ω ∨ ¬ω)`, turning an encoding where propagation detects
//!   inconsistency into one where it also restores arc consistency.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::cnf::{Clause, CnfFormula, Lit, Var, VarNames};
use crate::error::{Error, Result};

/// Where the fresh variables of one simulation live.
///
/// `x_{ω,i}` for ω over the source universe `1..=n` and stage `i ∈ 1..=n+1`
/// is `first_fresh + code(ω)·(n+1) + (i−1)`; `s` follows the last of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimulationMap {
    source_vars: u32,
    first_fresh: u32,
}

/// A fresh variable decoded back to its role.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fresh {
    X { lit: Lit, stage: usize },
    S,
}

impl SimulationMap {
    fn new(source_vars: u32, first_fresh: u32) -> SimulationMap {
        SimulationMap {
            source_vars,
            first_fresh,
        }
    }

    /// n = |source universe|.
    pub fn source_vars(&self) -> u32 {
        self.source_vars
    }

    /// n + 1, the number of simulated stages.
    pub fn horizon(&self) -> usize {
        self.source_vars as usize + 1
    }

    /// 2n(n+1) + 1.
    pub fn num_fresh(&self) -> u32 {
        2 * self.source_vars * (self.source_vars + 1) + 1
    }

    pub fn fresh_vars(&self) -> impl Iterator<Item = Var> {
        (self.first_fresh..self.first_fresh + self.num_fresh()).map(Var::from_id)
    }

    /// # Panics
    ///
    /// If `lit` is outside the source universe or `stage ∉ 1..=n+1`.
    pub fn x_var(&self, lit: Lit, stage: usize) -> Var {
        assert!(lit.var().id() <= self.source_vars, "{lit} outside source universe");
        assert!((1..=self.horizon()).contains(&stage), "stage {stage} out of range");
        Var::from_id(self.first_fresh + (lit.code() * self.horizon() + stage - 1) as u32)
    }

    pub fn x(&self, lit: Lit, stage: usize) -> Lit {
        self.x_var(lit, stage).pos()
    }

    pub fn s_var(&self) -> Var {
        Var::from_id(self.first_fresh + self.num_fresh() - 1)
    }

    pub fn s(&self) -> Lit {
        self.s_var().pos()
    }

    pub fn decode(&self, var: Var) -> Option<Fresh> {
        let id = var.id();
        if id < self.first_fresh || id >= self.first_fresh + self.num_fresh() {
            return None;
        }
        if var == self.s_var() {
            return Some(Fresh::S);
        }
        let offset = (id - self.first_fresh) as usize;
        Some(Fresh::X {
            lit: Lit::from_code(offset / self.horizon()),
            stage: offset % self.horizon() + 1,
        })
    }

    /// Side map text: `x <lit> <stage> <var>` per fresh variable, then `s <var>`.
    pub fn to_side_map(&self) -> String {
        let mut out = String::new();
        for code in 0..2 * self.source_vars as usize {
            let lit = Lit::from_code(code);
            for stage in 1..=self.horizon() {
                let _ = writeln!(out, "x {lit} {stage} {}", self.x_var(lit, stage).id());
            }
        }
        let _ = writeln!(out, "s {}", self.s_var().id());
        out
    }

    /// Names `x_{a,2}` and `s` built on top of `base` names for the source
    /// variables.
    pub fn names(&self, base: &VarNames) -> VarNames {
        SideMap::from(self).names(base)
    }
}

/// A parsed side map file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideMap {
    pub xs: Vec<(Lit, usize, Var)>,
    pub s: Var,
}

impl SideMap {
    pub fn parse(text: &str) -> Result<SideMap> {
        let mut xs = Vec::new();
        let mut s = None;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let bad = || Error::parse(line_no, format!("malformed side map line `{line}`"));
            if s.is_some() {
                return Err(Error::parse(line_no, "entries after the `s` line"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["x", lit, stage, var] => {
                    let lit = lit.parse::<i64>().ok().and_then(|v| Lit::from_dimacs(v).ok());
                    let stage = stage.parse::<usize>().ok();
                    let var = var.parse::<u32>().ok().and_then(|v| Var::new(v).ok());
                    match (lit, stage, var) {
                        (Some(l), Some(st), Some(v)) => xs.push((l, st, v)),
                        _ => return Err(bad()),
                    }
                }
                ["s", var] => {
                    s = Some(var.parse::<u32>().ok().and_then(|v| Var::new(v).ok()).ok_or_else(bad)?);
                }
                _ => return Err(bad()),
            }
        }
        let s = s.ok_or_else(|| Error::parse(text.lines().count().max(1), "missing `s` line"))?;
        Ok(SideMap { xs, s })
    }

    pub fn names(&self, base: &VarNames) -> VarNames {
        let mut names = base.clone();
        for &(lit, stage, var) in &self.xs {
            let source = base.lit(lit);
            names.insert(var, format!("x{{{source},{stage}}}"));
        }
        names.insert(self.s, "s");
        names
    }
}

impl From<&SimulationMap> for SideMap {
    fn from(map: &SimulationMap) -> SideMap {
        let mut xs = Vec::new();
        for code in 0..2 * map.source_vars as usize {
            let lit = Lit::from_code(code);
            for stage in 1..=map.horizon() {
                xs.push((lit, stage, map.x_var(lit, stage)));
            }
        }
        SideMap { xs, s: map.s_var() }
    }
}

/// Clause counts per family of the simulation construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FamilyCounts {
    pub injection: usize,
    pub replication: usize,
    pub deduction: usize,
    pub unit: usize,
    pub collection: usize,
}

impl FamilyCounts {
    pub fn total(&self) -> usize {
        self.injection + self.replication + self.deduction + self.unit + self.collection
    }
}

/// Shape of the source formula, recorded for size checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceStats {
    /// |universe|
    pub n: usize,
    /// size (total literal count)
    pub p: usize,
    /// number of distinct singleton clauses
    pub singletons: usize,
    /// total size of the clauses with at least two literals
    pub multi_literal_size: usize,
}

impl SourceStats {
    pub fn of(formula: &CnfFormula) -> SourceStats {
        let mut singles: Vec<Lit> = Vec::new();
        for clause in formula.clauses() {
            if let [lit] = clause.lits() {
                if !singles.contains(lit) {
                    singles.push(*lit);
                }
            }
        }
        SourceStats {
            n: formula.num_vars() as usize,
            p: formula.size(),
            singletons: singles.len(),
            multi_literal_size: formula
                .clauses()
                .iter()
                .filter(|c| c.len() >= 2)
                .map(Clause::len)
                .sum(),
        }
    }

    /// Family counts implied by the construction's definition.
    pub fn expected_counts(&self) -> FamilyCounts {
        FamilyCounts {
            injection: 2 * self.n,
            replication: 2 * self.n * self.n,
            deduction: self.n * self.multi_literal_size,
            unit: self.singletons,
            collection: self.n,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub formula: CnfFormula,
    pub map: SimulationMap,
    pub counts: FamilyCounts,
    pub source: SourceStats,
}

/// Σ_c = Σ_p ∧ (¬ω).
pub fn prop_to_contra(formula: &CnfFormula, omega: Lit) -> Result<CnfFormula> {
    if !formula.contains_var(omega.var()) {
        return Err(Error::Domain(format!("output literal {omega} outside universe")));
    }
    let mut out = formula.clone();
    out.push(Clause::unit(!omega))?;
    Ok(out)
}

/// Builds Σ_p from Σ_c with fresh variables numbered right after Σ_c's
/// universe.
pub fn contra_to_prop(source: &CnfFormula) -> Result<ReductionOutput> {
    contra_to_prop_from(source, source.num_vars() + 1)
}

/// Builds Σ_p from Σ_c with fresh variables starting at `first_fresh`.
///
/// Clauses are emitted as: injection, unit, replication (by literal, then
/// stage), deduction (by source clause, then literal, then stage),
/// collection.
pub fn contra_to_prop_from(source: &CnfFormula, first_fresh: u32) -> Result<ReductionOutput> {
    let n = source.num_vars();
    if n == 0 {
        return Err(Error::Domain("source formula has an empty universe".into()));
    }
    if let Some(ci) = source.clauses().iter().position(Clause::is_empty) {
        return Err(Error::Domain(format!(
            "source clause {ci} is empty; its contradiction function is constant"
        )));
    }
    if first_fresh <= n {
        return Err(Error::Domain(format!(
            "fresh variables must start after the source universe (got {first_fresh} ≤ {n})"
        )));
    }

    let map = SimulationMap::new(n, first_fresh);
    let horizon = map.horizon();
    let stats = SourceStats::of(source);
    let mut out = CnfFormula::new(map.s_var().id());
    let mut counts = FamilyCounts::default();
    let emit = |out: &mut CnfFormula, lits: Vec<Lit>| {
        out.push(Clause::new(lits)).expect("fresh variables lie in the output universe");
    };

    for v in source.vars() {
        emit(&mut out, vec![v.pos(), map.x(v.neg(), 1)]);
        emit(&mut out, vec![v.neg(), map.x(v.pos(), 1)]);
        counts.injection += 2;
    }

    let mut singles: Vec<Lit> = Vec::new();
    for clause in source.clauses() {
        if let [lit] = clause.lits() {
            if !singles.contains(lit) {
                singles.push(*lit);
                emit(&mut out, vec![map.x(*lit, 1)]);
                counts.unit += 1;
            }
        }
    }

    for code in 0..2 * n as usize {
        let lit = Lit::from_code(code);
        for i in 1..horizon {
            emit(&mut out, vec![!map.x(lit, i), map.x(lit, i + 1)]);
            counts.replication += 1;
        }
    }

    for clause in source.clauses().iter().filter(|c| c.len() >= 2) {
        for &omega in clause.lits() {
            for i in 1..horizon {
                let mut lits = vec![map.x(omega, i + 1)];
                lits.extend(
                    clause
                        .lits()
                        .iter()
                        .filter(|&&rho| rho != omega)
                        .map(|&rho| !map.x(!rho, i)),
                );
                emit(&mut out, lits);
                counts.deduction += 1;
            }
        }
    }

    for v in source.vars() {
        emit(
            &mut out,
            vec![!map.x(v.pos(), horizon), !map.x(v.neg(), horizon), map.s()],
        );
        counts.collection += 1;
    }

    Ok(ReductionOutput {
        formula: out,
        map,
        counts,
        source: stats,
    })
}

/// One per-literal block of a composition.
#[derive(Clone, Debug)]
pub struct UpacBlock {
    /// The literal ω whose block this is; the block simulates Σ_q ∧ (ω).
    pub lit: Lit,
    pub map: SimulationMap,
    pub counts: FamilyCounts,
    /// Index of the guard clause (¬s_ω ∨ ¬ω) in the composed formula.
    pub guard: usize,
}

#[derive(Clone, Debug)]
pub struct Composition {
    pub formula: CnfFormula,
    pub blocks: Vec<UpacBlock>,
}

impl Composition {
    pub fn guard_clauses(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.guard).collect()
    }

    /// The composed formula with the guard of block `block` removed.
    pub fn without_guard(&self, block: usize) -> CnfFormula {
        let mut out = self.formula.clone();
        out.remove_clause(self.blocks[block].guard);
        out
    }
}

/// Ω_q = Σ_q ∧ ⋀_{ω ∈ lit(V)} (Σ_{q,ω} ∧ (¬s_ω ∨ ¬ω)), where Σ_{q,ω} is
/// [`contra_to_prop`] of Σ_q ∧ (ω) in its own fresh namespace.
///
/// Literals are taken in the order v, ¬v for each v of `inputs`.
pub fn compose_upac(formula: &CnfFormula, inputs: &[Var]) -> Result<Composition> {
    for (k, v) in inputs.iter().enumerate() {
        if !formula.contains_var(*v) {
            return Err(Error::Domain(format!("input {v} outside universe")));
        }
        if inputs[..k].contains(v) {
            return Err(Error::Domain(format!("input {v} listed twice")));
        }
    }
    let lits: Vec<Lit> = inputs.iter().flat_map(|v| [v.pos(), v.neg()]).collect();
    let n = formula.num_vars();
    if n == 0 && !lits.is_empty() {
        return Err(Error::Domain("formula has an empty universe".into()));
    }
    let block_width = 2 * n * (n + 1) + 1;

    let built: Vec<(Lit, ReductionOutput)> = lits
        .par_iter()
        .enumerate()
        .map(|(k, &lit)| {
            let mut source = formula.clone();
            source.push(Clause::unit(lit))?;
            let first_fresh = n + 1 + k as u32 * block_width;
            Ok((lit, contra_to_prop_from(&source, first_fresh)?))
        })
        .collect::<Result<_>>()?;

    let mut out = formula.clone();
    out.extend_universe(n + lits.len() as u32 * block_width);
    let mut blocks = Vec::with_capacity(built.len());
    for (lit, reduction) in built {
        for clause in reduction.formula.clauses() {
            out.push(clause.clone())?;
        }
        out.push(Clause::new([!reduction.map.s(), !lit]))?;
        blocks.push(UpacBlock {
            lit,
            map: reduction.map,
            counts: reduction.counts,
            guard: out.num_clauses() - 1,
        });
    }
    Ok(Composition {
        formula: out,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: i64) -> Lit {
        Lit::from_dimacs(v).unwrap()
    }

    fn worked_example() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(4, &[&[1], &[-1, 2, 3], &[-3, -4]]).unwrap()
    }

    #[test]
    fn prop_to_contra_appends_negated_output() {
        let sp = CnfFormula::from_dimacs_clauses(2, &[&[-1, 2]]).unwrap();
        let sc = prop_to_contra(&sp, lit(2)).unwrap();
        assert_eq!(sc, CnfFormula::from_dimacs_clauses(2, &[&[-1, 2], &[-2]]).unwrap());
        assert_eq!(sc.size(), sp.size() + 1);
        assert!(prop_to_contra(&sp, lit(3)).is_err());
    }

    #[test]
    fn worked_example_counts() {
        let out = contra_to_prop(&worked_example()).unwrap();
        let expected = FamilyCounts {
            injection: 8,
            replication: 32,
            deduction: 20,
            unit: 1,
            collection: 4,
        };
        assert_eq!(out.counts, expected);
        assert_eq!(out.counts, out.source.expected_counts());
        assert_eq!(out.counts.total(), 65);
        assert_eq!(out.formula.num_clauses(), 65);
        assert_eq!(out.map.num_fresh(), 41);
        assert_eq!(out.formula.num_vars(), 4 + 41);
    }

    #[test]
    fn worked_example_named_clauses() {
        let out = contra_to_prop(&worked_example()).unwrap();
        let m = out.map;
        let has = |lits: Vec<Lit>| out.formula.clauses().contains(&Clause::new(lits));
        // injection (b ∨ x_{¬b,1}), (¬d ∨ x_{d,1})
        assert!(has(vec![lit(2), m.x(lit(-2), 1)]));
        assert!(has(vec![lit(-4), m.x(lit(4), 1)]));
        // unit (x_{a,1})
        assert!(has(vec![m.x(lit(1), 1)]));
        // deduction (x_{c,2} ∨ ¬x_{a,1} ∨ ¬x_{¬b,1})
        assert!(has(vec![m.x(lit(3), 2), !m.x(lit(1), 1), !m.x(lit(-2), 1)]));
        // deduction (x_{¬c,2} ∨ ¬x_{d,1})
        assert!(has(vec![m.x(lit(-3), 2), !m.x(lit(4), 1)]));
        // collection (¬x_{c,5} ∨ ¬x_{¬c,5} ∨ s)
        assert!(has(vec![!m.x(lit(3), 5), !m.x(lit(-3), 5), m.s()]));
    }

    #[test]
    fn single_unit_source() {
        let sc = CnfFormula::from_dimacs_clauses(1, &[&[1]]).unwrap();
        let out = contra_to_prop(&sc).unwrap();
        assert_eq!(
            out.counts,
            FamilyCounts {
                injection: 2,
                replication: 2,
                deduction: 0,
                unit: 1,
                collection: 1
            }
        );
        assert_eq!(out.formula.num_clauses(), 6);
    }

    #[test]
    fn duplicate_singletons_emit_once() {
        let sc = CnfFormula::from_dimacs_clauses(1, &[&[1], &[1]]).unwrap();
        assert_eq!(contra_to_prop(&sc).unwrap().counts.unit, 1);
    }

    #[test]
    fn rejects_degenerate_sources() {
        assert!(contra_to_prop(&CnfFormula::new(0)).is_err());
        let with_empty = CnfFormula::from_dimacs_clauses(1, &[&[]]).unwrap();
        assert!(contra_to_prop(&with_empty).is_err());
        assert!(contra_to_prop_from(&worked_example(), 3).is_err());
    }

    #[test]
    fn map_layout_is_injective_and_decodable() {
        let map = contra_to_prop(&worked_example()).unwrap().map;
        let mut seen = std::collections::HashSet::new();
        for code in 0..8 {
            for stage in 1..=5 {
                let l = Lit::from_code(code);
                let v = map.x_var(l, stage);
                assert!(v.id() > 4);
                assert!(seen.insert(v));
                assert_eq!(map.decode(v), Some(Fresh::X { lit: l, stage }));
            }
        }
        assert!(!seen.contains(&map.s_var()));
        assert_eq!(seen.len(), 40);
        assert_eq!(map.decode(map.s_var()), Some(Fresh::S));
        assert_eq!(map.decode(Var::from_id(4)), None);
    }

    #[test]
    fn side_map_roundtrip() {
        let map = contra_to_prop(&worked_example()).unwrap().map;
        let text = map.to_side_map();
        assert!(text.starts_with("x 1 1 5\nx 1 2 6\n"));
        assert!(text.ends_with("s 45\n"));
        assert_eq!(SideMap::parse(&text).unwrap(), SideMap::from(&map));
        assert!(SideMap::parse("x 1 1\ns 3\n").is_err());
        assert!(SideMap::parse("x 1 1 5\n").is_err());
    }

    #[test]
    fn names_follow_the_map() {
        let map = contra_to_prop(&worked_example()).unwrap().map;
        let names = map.names(&VarNames::from_list(&["a", "b", "c", "d"]));
        assert_eq!(names.lit(map.x(lit(-2), 1)), "x{¬b,1}");
        assert_eq!(names.lit(map.s()), "s");
    }

    #[test]
    fn compose_layout() {
        let sq = CnfFormula::from_dimacs_clauses(3, &[&[-1, -2], &[-1, -3], &[-2, -3]]).unwrap();
        let vars: Vec<Var> = (1..=3).map(Var::from_id).collect();
        let comp = compose_upac(&sq, &vars).unwrap();
        assert_eq!(comp.blocks.len(), 6);
        assert_eq!(&comp.formula.clauses()[..3], sq.clauses());

        // namespaces are disjoint and after the source universe
        let mut all = std::collections::HashSet::new();
        for b in &comp.blocks {
            for v in b.map.fresh_vars() {
                assert!(v.id() > 3);
                assert!(all.insert(v));
            }
            let guard = &comp.formula.clauses()[b.guard];
            assert_eq!(guard, &Clause::new([!b.map.s(), !b.lit]));
        }
        assert_eq!(comp.formula.num_vars() as usize, 3 + all.len());

        let without = comp.without_guard(2);
        assert_eq!(without.num_clauses(), comp.formula.num_clauses() - 1);
    }

    #[test]
    fn compose_rejects_bad_inputs() {
        let sq = CnfFormula::from_dimacs_clauses(2, &[&[-1, -2]]).unwrap();
        assert!(compose_upac(&sq, &[Var::from_id(3)]).is_err());
        assert!(compose_upac(&sq, &[Var::from_id(1), Var::from_id(1)]).is_err());
    }
}
