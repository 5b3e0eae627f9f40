//! Shared test corpus and independent oracles.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unitres::{Clause, CnfFormula, Lit};

pub const SEED: u64 = 0x5eed_c0ff_ee00;

/// Every non-empty duplicate-free clause over `1..=n` with at most
/// `max_len` literals, tautologies included.
pub fn all_clauses(n: u32, max_len: usize) -> Vec<Clause> {
    let lits: Vec<Lit> = (0..2 * n as usize).map(Lit::from_code).collect();
    let mut out = Vec::new();
    fn grow(lits: &[Lit], start: usize, current: &mut Vec<Lit>, max_len: usize, out: &mut Vec<Clause>) {
        for k in start..lits.len() {
            current.push(lits[k]);
            out.push(Clause::new(current.iter().copied()));
            if current.len() < max_len {
                grow(lits, k + 1, current, max_len, out);
            }
            current.pop();
        }
    }
    grow(&lits, 0, &mut Vec::new(), max_len, &mut out);
    out
}

/// All formulas over n ∈ 1..=3 made of at most two distinct clauses of size ≤ 3.
pub fn exhaustive_small() -> Vec<CnfFormula> {
    let mut out = Vec::new();
    for n in 1..=3 {
        let clauses = all_clauses(n, 3);
        out.push(CnfFormula::new(n));
        for (i, a) in clauses.iter().enumerate() {
            out.push(CnfFormula::from_clauses(n, vec![a.clone()]).unwrap());
            for b in &clauses[i + 1..] {
                out.push(CnfFormula::from_clauses(n, vec![a.clone(), b.clone()]).unwrap());
            }
        }
    }
    out
}

/// Random formulas with `clauses` clauses drawn from [`all_clauses`].
pub fn sampled(n: u32, count: usize, clauses: std::ops::RangeInclusive<usize>, seed: u64) -> Vec<CnfFormula> {
    let pool = all_clauses(n, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let m = rng.gen_range(clauses.clone());
            let picked: Vec<Clause> = (0..m).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
            CnfFormula::from_clauses(n, picked).unwrap()
        })
        .collect()
}

/// Random formulas over 4 variables: 1 to 8 clauses of 1 to 3 random literals.
pub fn random_n4(count: usize, seed: u64) -> Vec<CnfFormula> {
    random_formulas(4, count, 1..=8, seed)
}

pub fn random_formulas(
    n: u32,
    count: usize,
    clauses: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> Vec<CnfFormula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let m = rng.gen_range(clauses.clone());
            let picked: Vec<Clause> = (0..m)
                .map(|_| {
                    let len = rng.gen_range(1..=3);
                    Clause::new((0..len).map(|_| Lit::from_code(rng.gen_range(0..2 * n as usize))))
                })
                .collect();
            CnfFormula::from_clauses(n, picked).unwrap()
        })
        .collect()
}

/// The sweep corpus: every small formula with at most two clauses, 1000
/// sampled formulas with 3 to 6 clauses over 2 and 3 variables, and 500
/// random formulas over 4 variables.
pub fn corpus() -> Vec<CnfFormula> {
    let mut out = exhaustive_small();
    out.extend(sampled(2, 300, 3..=6, SEED));
    out.extend(sampled(3, 700, 3..=6, SEED + 1));
    out.extend(random_n4(500, SEED + 2));
    out
}

/// Pairwise at-most-one over `1..=n`.
pub fn pairwise_at_most_one(n: u32) -> CnfFormula {
    let mut f = CnfFormula::new(n);
    for i in 1..=n as i64 {
        for j in i + 1..=n as i64 {
            f.push(Clause::from_dimacs(&[-i, -j]).unwrap()).unwrap();
        }
    }
    f
}

/// Binomial at-most-k over `1..=n`: one clause (¬v_i ∨ ...) per (k+1)-subset.
pub fn binomial_at_most(k: usize, n: u32) -> CnfFormula {
    let mut f = CnfFormula::new(n);
    let vars: Vec<i64> = (1..=n as i64).collect();
    fn subsets(vars: &[i64], size: usize, start: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for k in start..vars.len() {
            cur.push(vars[k]);
            subsets(vars, size, k + 1, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    subsets(&vars, k + 1, 0, &mut Vec::new(), &mut all);
    for s in all {
        let neg: Vec<i64> = s.iter().map(|v| -v).collect();
        f.push(Clause::from_dimacs(&neg).unwrap()).unwrap();
    }
    f
}

/// Exclusive-or of v1, v2 with each forbidden pattern detected only through
/// an auxiliary pair of clauses, so propagation detects inconsistency but
/// infers nothing from a single input.
pub fn xor_with_auxiliaries() -> CnfFormula {
    CnfFormula::from_dimacs_clauses(
        4,
        &[&[-1, -2, 3], &[-1, -2, -3], &[1, 2, 4], &[1, 2, -4]],
    )
    .unwrap()
}
