//! Unit propagation engines.
//!
//! [`propagate_fixpoint`] is the solver-style engine: a FIFO worklist that
//! stops at the first conflict. [`propagate_staged`] computes the
//! breadth-first stage sets U(Σ, m) and keeps going over possibly
//! contradictory literal sets, which is what the stage-correspondence
//! checks need.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::cnf::{CnfFormula, Lit, LiteralSet, PartialAssignment, VarNames};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutcomeKind {
    Conflict,
    Fixpoint,
}

/// One inferred literal and the index of the clause that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Implied {
    pub lit: Lit,
    pub clause: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagationOutcome {
    pub kind: OutcomeKind,
    /// Literals assigned when propagation stopped. On a conflict raised by
    /// an opposite literal, that literal is included.
    pub final_set: LiteralSet,
    pub conflict_clause: Option<usize>,
    /// Inferences in the order they were made.
    pub trail: Vec<Implied>,
}

impl PropagationOutcome {
    pub fn is_conflict(&self) -> bool {
        self.kind == OutcomeKind::Conflict
    }
}

/// Unit resolution to fixpoint or first conflict.
pub fn propagate_fixpoint(formula: &CnfFormula) -> PropagationOutcome {
    let num_vars = formula.num_vars() as usize;
    let clauses = formula.clauses();

    let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); 2 * num_vars];
    let mut queue: VecDeque<Implied> = VecDeque::new();
    for (ci, clause) in clauses.iter().enumerate() {
        if clause.is_empty() {
            return PropagationOutcome {
                kind: OutcomeKind::Conflict,
                final_set: LiteralSet::new(),
                conflict_clause: Some(ci),
                trail: Vec::new(),
            };
        }
        if clause.len() == 1 {
            queue.push_back(Implied {
                lit: clause.lits()[0],
                clause: ci,
            });
        }
        for lit in clause.lits() {
            occurrences[lit.code()].push(ci);
        }
    }

    let mut values: Vec<Option<bool>> = vec![None; num_vars];
    let mut trail: Vec<Implied> = Vec::new();
    let conflict = |trail: Vec<Implied>, extra: Option<Lit>, clause: usize| {
        let mut final_set: LiteralSet = trail.iter().map(|i| i.lit).collect();
        if let Some(lit) = extra {
            final_set.insert(lit);
        }
        PropagationOutcome {
            kind: OutcomeKind::Conflict,
            final_set,
            conflict_clause: Some(clause),
            trail,
        }
    };

    while let Some(implied) = queue.pop_front() {
        let lit = implied.lit;
        match values[lit.var().index()] {
            Some(v) if v == lit.value() => continue,
            Some(_) => return conflict(trail, Some(lit), implied.clause),
            None => {
                values[lit.var().index()] = Some(lit.value());
                trail.push(implied);
            }
        }
        for &ci in &occurrences[(!lit).code()] {
            let mut open = None;
            let mut open_count = 0;
            let mut satisfied = false;
            for &l in clauses[ci].lits() {
                match values[l.var().index()] {
                    Some(v) if v == l.value() => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        open_count += 1;
                        open = Some(l);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match open_count {
                0 => return conflict(trail, None, ci),
                1 => queue.push_back(Implied {
                    lit: open.unwrap(),
                    clause: ci,
                }),
                _ => {}
            }
        }
    }

    PropagationOutcome {
        kind: OutcomeKind::Fixpoint,
        final_set: trail.iter().map(|i| i.lit).collect(),
        conflict_clause: None,
        trail,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    /// Stage number, starting at 1.
    pub index: usize,
    /// Literals new at this stage, each with the first justifying clause in
    /// clause order.
    pub inferred: Vec<Implied>,
    /// U(Σ, index).
    pub cumulative: LiteralSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StagedConflict {
    /// First stage whose set is contradictory; 0 for an empty clause or a
    /// contradictory seed.
    pub stage: usize,
    pub clause: Option<usize>,
}

/// Execution record of the staged engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagedTrace {
    pub initial: LiteralSet,
    /// Only stages that inferred something are recorded.
    pub stages: Vec<StageRecord>,
    pub conflict: Option<StagedConflict>,
}

impl StagedTrace {
    pub fn num_stages(&self) -> usize {
        self.stages.len()
    }

    /// U(Σ, m). Past the last recorded stage this is the final set.
    pub fn stage_assignment(&self, m: usize) -> &LiteralSet {
        if m == 0 {
            return &self.initial;
        }
        match self.stages.get(m - 1) {
            Some(record) => &record.cumulative,
            None => self.final_set(),
        }
    }

    pub fn final_set(&self) -> &LiteralSet {
        self.stages
            .last()
            .map(|r| &r.cumulative)
            .unwrap_or(&self.initial)
    }

    pub fn is_conflict(&self) -> bool {
        self.conflict.is_some()
    }

    /// Stage at which `lit` first appears, if it does.
    pub fn stage_of(&self, lit: Lit) -> Option<usize> {
        if self.initial.contains(lit) {
            return Some(0);
        }
        self.stages
            .iter()
            .find(|r| r.inferred.iter().any(|i| i.lit == lit))
            .map(|r| r.index)
    }

    pub fn render_table(&self, formula: &CnfFormula, names: &VarNames) -> String {
        let mut rows: Vec<[String; 3]> = Vec::new();
        if !self.initial.is_empty() {
            rows.push([
                "0".into(),
                "(initial)".into(),
                join_lits(self.initial.iter(), names),
            ]);
        }
        for record in &self.stages {
            let mut invoked: Vec<usize> = Vec::new();
            for i in &record.inferred {
                if !invoked.contains(&i.clause) {
                    invoked.push(i.clause);
                }
            }
            let invoked: Vec<String> = invoked
                .iter()
                .map(|&ci| names.clause(&formula.clauses()[ci]))
                .collect();
            rows.push([
                record.index.to_string(),
                invoked.join(" "),
                join_lits(record.inferred.iter().map(|i| i.lit), names),
            ]);
        }
        let mut out = render_rows(["stage", "clauses invoked", "inferred"], &rows);
        match self.conflict {
            Some(c) => {
                let _ = writeln!(out, "conflict at stage {}", c.stage);
            }
            None => out.push_str("no conflict\n"),
        }
        out
    }

    /// One `INFER <stage> <clause> <lit>` line per inference, then a
    /// `CONFLICT <stage> <clause|->` line if any.
    pub fn render_records(&self) -> String {
        let mut out = String::new();
        for lit in self.initial.iter() {
            let _ = writeln!(out, "INITIAL {lit}");
        }
        for record in &self.stages {
            for i in &record.inferred {
                let _ = writeln!(out, "INFER {} {} {}", record.index, i.clause, i.lit);
            }
        }
        if let Some(c) = self.conflict {
            let clause = c.clause.map_or("-".to_string(), |ci| ci.to_string());
            let _ = writeln!(out, "CONFLICT {} {clause}", c.stage);
        }
        out
    }
}

/// Staged unit resolution from the empty stage-0 set.
///
/// Stage m infers every literal ω of a clause whose other literals are all
/// falsified by U(Σ, m−1), unless ω is already in U(Σ, m−1). Runs until a
/// stage adds nothing or `max_stages` stages have run.
pub fn propagate_staged(formula: &CnfFormula, max_stages: usize) -> StagedTrace {
    staged(formula, LiteralSet::new(), max_stages)
}

/// Like [`propagate_staged`], with U(Σ, 0) = `initial`.
pub fn propagate_staged_from(
    formula: &CnfFormula,
    initial: &LiteralSet,
    max_stages: usize,
) -> Result<StagedTrace> {
    if let Some(lit) = initial.iter().find(|l| !formula.contains_var(l.var())) {
        return Err(Error::Domain(format!("seed literal {lit} outside universe")));
    }
    Ok(staged(formula, initial.clone(), max_stages))
}

/// How the input assignment enters a staged run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputStage {
    /// Through the unit clauses of Σ|_I, which fire at stage 1.
    RestrictionUnits,
    /// As the stage-0 set, without restriction clauses.
    Initial,
}

/// Staged run of `formula` on input `assignment`.
pub fn trace_input(
    formula: &CnfFormula,
    assignment: &PartialAssignment,
    input: InputStage,
    max_stages: usize,
) -> Result<StagedTrace> {
    match input {
        InputStage::RestrictionUnits => {
            Ok(propagate_staged(&formula.restrict(assignment)?, max_stages))
        }
        InputStage::Initial => {
            propagate_staged_from(formula, &assignment.to_lit_set(), max_stages)
        }
    }
}

fn staged(formula: &CnfFormula, initial: LiteralSet, max_stages: usize) -> StagedTrace {
    let clauses = formula.clauses();
    let mut present = vec![false; 2 * formula.num_vars() as usize];
    for lit in initial.iter() {
        present[lit.code()] = true;
    }

    let mut conflict = if initial.is_contradictory() {
        Some(StagedConflict {
            stage: 0,
            clause: None,
        })
    } else {
        clauses
            .iter()
            .position(|c| c.is_empty())
            .map(|ci| StagedConflict {
                stage: 0,
                clause: Some(ci),
            })
    };

    let mut stages: Vec<StageRecord> = Vec::new();
    let mut cumulative = initial.clone();
    for m in 1..=max_stages {
        let previous = present.clone();
        let mut inferred: Vec<Implied> = Vec::new();
        for (ci, clause) in clauses.iter().enumerate() {
            let lits = clause.lits();
            let falsified = lits.iter().filter(|l| previous[(!**l).code()]).count();
            if lits.is_empty() || falsified + 1 < lits.len() {
                continue;
            }
            for &lit in lits {
                let others_falsified = falsified == lits.len() || !previous[(!lit).code()];
                if others_falsified && !present[lit.code()] {
                    present[lit.code()] = true;
                    inferred.push(Implied { lit, clause: ci });
                }
            }
        }
        if inferred.is_empty() {
            break;
        }
        for i in &inferred {
            cumulative.insert(i.lit);
        }
        if conflict.is_none() {
            if let Some(i) = inferred.iter().find(|i| present[(!i.lit).code()]) {
                conflict = Some(StagedConflict {
                    stage: m,
                    clause: Some(i.clause),
                });
            }
        }
        stages.push(StageRecord {
            index: m,
            inferred,
            cumulative: cumulative.clone(),
        });
    }

    StagedTrace {
        initial,
        stages,
        conflict,
    }
}

/// Result of asking whether unit resolution infers a literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inference {
    Yes,
    No,
    Conflict,
}

/// Does unit resolution on Σ|_I infer `[lit]`?
pub fn infers(formula: &CnfFormula, assignment: &PartialAssignment, lit: Lit) -> Result<Inference> {
    let outcome = propagate_fixpoint(&formula.restrict(assignment)?);
    Ok(if outcome.is_conflict() {
        Inference::Conflict
    } else if outcome.final_set.contains(lit) {
        Inference::Yes
    } else {
        Inference::No
    })
}

/// Table of the fixpoint engine's inferences in worklist order.
pub fn render_fixpoint(outcome: &PropagationOutcome, formula: &CnfFormula, names: &VarNames) -> String {
    let rows: Vec<[String; 3]> = outcome
        .trail
        .iter()
        .enumerate()
        .map(|(step, i)| {
            [
                (step + 1).to_string(),
                names.clause(&formula.clauses()[i.clause]),
                names.lit(i.lit),
            ]
        })
        .collect();
    let mut out = render_rows(["step", "clause", "inferred"], &rows);
    match outcome.conflict_clause {
        Some(ci) => {
            let _ = writeln!(out, "conflict in clause {}", names.clause(&formula.clauses()[ci]));
        }
        None => out.push_str("no conflict\n"),
    }
    out
}

fn join_lits(lits: impl Iterator<Item = Lit>, names: &VarNames) -> String {
    lits.map(|l| names.lit(l)).collect::<Vec<_>>().join(" ")
}

fn render_rows(header: [&str; 3], rows: &[[String; 3]]) -> String {
    let mut widths = header.map(|h| h.chars().count());
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: [&str; 3]| {
        let mut s = String::new();
        for (k, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if k > 0 {
                s.push_str(" | ");
            }
            s.push_str(cell);
            if k < 2 {
                s.extend(std::iter::repeat_n(' ', w - cell.chars().count()));
            }
        }
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(header);
    out.push_str(
        &widths
            .iter()
            .map(|&w| "-".repeat(w))
            .collect::<Vec<_>>()
            .join("-+-"),
    );
    out.push('\n');
    for row in rows {
        out.push_str(&line([&row[0], &row[1], &row[2]]));
    }
    out
}
