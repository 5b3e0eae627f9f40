//! DIMACS CNF reading and writing.
//!
//! Output is canonical: a `p cnf` header, then one clause per line with
//! single spaces and a terminating `0`, no comments and no trailing spaces.

use std::fmt::Write as _;
use std::io::{self, Read, Write};

use crate::cnf::{Clause, CnfFormula, Lit};
use crate::error::{Error, Result};

/// Parses DIMACS CNF text. Clauses may span lines; `c` lines are comments.
pub fn parse(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(u32, usize)> = None;
    let mut formula = CnfFormula::new(0);
    let mut pending: Vec<Lit> = Vec::new();
    let mut pending_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(line_no, "duplicate problem line"));
            }
            header = Some(parse_header(line, line_no)?);
            formula = CnfFormula::new(header.unwrap().0);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(Error::parse(line_no, "clause before problem line"));
        };
        for token in line.split_whitespace() {
            let value: i64 = token
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid literal `{token}`")))?;
            if value == 0 {
                formula
                    .push(Clause::new(pending.drain(..)))
                    .map_err(|e| Error::parse(line_no, e.to_string()))?;
                continue;
            }
            if value.unsigned_abs() > num_vars as u64 {
                return Err(Error::parse(
                    line_no,
                    format!("literal {value} out of range 1..={num_vars}"),
                ));
            }
            if pending.is_empty() {
                pending_line = line_no;
            }
            pending.push(Lit::from_dimacs(value).map_err(|e| Error::parse(line_no, e.to_string()))?);
        }
    }

    let Some((_, num_clauses)) = header else {
        return Err(Error::parse(text.lines().count().max(1), "missing problem line"));
    };
    if !pending.is_empty() {
        return Err(Error::parse(pending_line, "clause missing terminating 0"));
    }
    if formula.num_clauses() != num_clauses {
        return Err(Error::parse(
            text.lines().count().max(1),
            format!(
                "header declares {num_clauses} clauses, found {}",
                formula.num_clauses()
            ),
        ));
    }
    Ok(formula)
}

fn parse_header(line: &str, line_no: usize) -> Result<(u32, usize)> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    match fields.as_slice() {
        ["p", "cnf", vars, clauses] => {
            let vars = vars
                .parse::<u32>()
                .ok()
                .filter(|&v| v <= i32::MAX as u32)
                .ok_or_else(|| Error::parse(line_no, format!("invalid variable count `{vars}`")))?;
            let clauses = clauses
                .parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("invalid clause count `{clauses}`")))?;
            Ok((vars, clauses))
        }
        _ => Err(Error::parse(line_no, format!("malformed problem line `{line}`"))),
    }
}

pub fn parse_bytes(bytes: &[u8]) -> Result<CnfFormula> {
    let text =
        std::str::from_utf8(bytes).map_err(|e| Error::parse(1, format!("not UTF-8: {e}")))?;
    parse(text)
}

pub fn read<R: Read>(mut reader: R) -> io::Result<Result<CnfFormula>> {
    let mut buf = Vec::new();
    reader.read_to_end(&mut buf)?;
    Ok(parse_bytes(&buf))
}

pub fn emit(formula: &CnfFormula) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", formula.num_vars(), formula.num_clauses());
    for clause in formula.clauses() {
        for lit in clause.lits() {
            let _ = write!(out, "{lit} ");
        }
        out.push_str("0\n");
    }
    out
}

pub fn write<W: Write>(formula: &CnfFormula, mut writer: W) -> io::Result<()> {
    writer.write_all(emit(formula).as_bytes())
}
