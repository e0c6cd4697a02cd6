// SPDX-License-Identifier: MIT OR Apache-2.0
//! Interactive 3-SAT verification with multiset fingerprints.
//!
//! The prover first streams one triple `(literal, clause, value)` per
//! literal occurrence sorted by variable, so the verifier can check that
//! each variable gets one value while remembering only the previous
//! triple. It then streams the same triples clause by clause so the
//! verifier can check each clause. Both streams are folded into
//! fingerprints that must agree at the end.
//!
//! Messages are classical: the literal and clause labels of every triple
//! are fixed by the public formula and checked, so the prover's only
//! freedom is the value bits.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fingerprint::{fingerprint, fingerprint_step, prime_interval, primes_in, FingerprintParams};
use crate::error::{Error, Result};
use crate::oracle::{ClassicalProtocol, Move};

/// Largest number of (phase-one, phase-two) multiset pairs the direct
/// collision computation will visit.
pub const MULTISET_PAIR_CAP: u64 = 10_000_000;

/// A CNF formula with exactly three signed, 1-based literals per clause.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf3Formula {
    pub num_vars: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl Cnf3Formula {
    pub fn new(num_vars: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        let f = Self { num_vars, clauses };
        f.check()?;
        Ok(f)
    }

    pub fn check(&self) -> Result<()> {
        if self.num_vars == 0 || self.clauses.is_empty() {
            return Err(Error::Argument("formula needs at least one variable and one clause".into()));
        }
        for (i, c) in self.clauses.iter().enumerate() {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > self.num_vars {
                    return Err(Error::Argument(format!("clause {} has literal {l} outside 1..={}", i + 1, self.num_vars)));
                }
            }
        }
        Ok(())
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars
            && self.clauses.iter().all(|c| c.iter().any(|&l| literal_value(l, assignment[l.unsigned_abs() as usize - 1])))
    }

    /// Brute-force satisfiability (for small formulas).
    pub fn satisfying_assignment(&self) -> Option<Vec<bool>> {
        if self.num_vars > 24 {
            return None;
        }
        (0u32..1 << self.num_vars)
            .map(|bits| (0..self.num_vars).map(|v| bits >> v & 1 == 1).collect::<Vec<_>>())
            .find(|a| self.is_satisfied_by(a))
    }

    /// Parses DIMACS CNF. Every clause must have exactly three literals.
    pub fn from_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<i32> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" {
                    return Err(Error::Parse(format!("line {}: malformed problem line", lineno + 1)));
                }
                let n = parts[2].parse().map_err(|_| Error::Parse(format!("line {}: bad variable count", lineno + 1)))?;
                let k = parts[3].parse().map_err(|_| Error::Parse(format!("line {}: bad clause count", lineno + 1)))?;
                if header.replace((n, k)).is_some() {
                    return Err(Error::Parse(format!("line {}: second problem line", lineno + 1)));
                }
                continue;
            }
            if header.is_none() {
                return Err(Error::Parse(format!("line {}: clause before problem line", lineno + 1)));
            }
            for tok in line.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| Error::Parse(format!("line {}: bad literal {tok:?}", lineno + 1)))?;
                if l == 0 {
                    let c: [i32; 3] = current.as_slice().try_into().map_err(|_| {
                        Error::Parse(format!("line {}: clause with {} literals, expected 3", lineno + 1, current.len()))
                    })?;
                    clauses.push(c);
                    current.clear();
                } else {
                    current.push(l);
                }
            }
        }
        let (n, k) = header.ok_or_else(|| Error::Parse("missing problem line".into()))?;
        if !current.is_empty() {
            return Err(Error::Parse("last clause is not terminated by 0".into()));
        }
        if clauses.len() != k {
            return Err(Error::Parse(format!("problem line announces {k} clauses, found {}", clauses.len())));
        }
        Self::new(n, clauses).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            s.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        s
    }
}

impl fmt::Display for Cnf3Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lit = |l: i32| if l < 0 { format!("¬x{}", -l) } else { format!("x{l}") };
        let parts: Vec<String> =
            self.clauses.iter().map(|c| format!("({} ∨ {} ∨ {})", lit(c[0]), lit(c[1]), lit(c[2]))).collect();
        f.write_str(&parts.join(" ∧ "))
    }
}

fn literal_value(literal: i32, var_value: bool) -> bool {
    var_value != (literal < 0)
}

fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

/// One literal occurrence with the value the prover claims for it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    /// Signed 1-based literal.
    pub literal: i32,
    /// 0-based clause index.
    pub clause: usize,
    /// Claimed value of the literal (not of its variable).
    pub value: bool,
}

impl Triple {
    pub fn var(&self) -> usize {
        self.literal.unsigned_abs() as usize
    }

    /// Value this triple implies for its variable.
    pub fn var_value(&self) -> bool {
        self.value != (self.literal < 0)
    }
}

/// Bit layout of the triple encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleEncoding {
    pub var_bits: u32,
    pub clause_bits: u32,
    /// Declared element width: `2⌈log n⌉ + ⌈log k⌉ + 1`, raised to the
    /// width the encoding actually needs when that is larger.
    pub b: u32,
    /// Multiset size `3k`.
    pub ell: u64,
}

impl TripleEncoding {
    pub fn for_formula(f: &Cnf3Formula) -> Self {
        let var_bits = ceil_log2(f.num_vars);
        let clause_bits = ceil_log2(f.num_clauses());
        let declared = 2 * var_bits + clause_bits + 1;
        let needed = var_bits + clause_bits + 2;
        Self { var_bits, clause_bits, b: declared.max(needed), ell: 3 * f.num_clauses() as u64 }
    }

    /// `(var − 1, clause, sign, value)` packed most significant first.
    pub fn encode(&self, t: &Triple) -> u64 {
        ((((t.var() as u64 - 1) << self.clause_bits | t.clause as u64) << 1 | (t.literal < 0) as u64) << 1) | t.value as u64
    }
}

/// A complete prover transcript.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatTranscript {
    /// Literal occurrences sorted by (variable, clause, position).
    pub by_variable: Vec<Triple>,
    /// The three occurrences of each clause, in clause order.
    pub by_clause: Vec<[Triple; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum SatReject {
    /// Transcript has the wrong number of messages.
    Length,
    /// A triple's literal or clause label differs from the schedule.
    Label { phase: u8, position: usize },
    /// Two consecutive triples give one variable different values.
    Inconsistent { var: usize, position: usize },
    /// All three claimed literal values of a clause are false.
    Unsatisfied { clause: usize },
    FingerprintMismatch { f_var: u64, f_cl: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatVerdict {
    pub accept: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reject: Option<SatReject>,
    pub f_var: u64,
    pub f_cl: u64,
}

/// The 3-SAT verifier as a classical protocol over its fingerprint coins.
#[derive(Clone, Debug)]
pub struct ThreeSatProtocol {
    pub formula: Cnf3Formula,
    pub encoding: TripleEncoding,
    /// Variable-ordered schedule of literal occurrences (values unset).
    schedule: Vec<Triple>,
    primes: Vec<u64>,
    fixed: Option<FingerprintParams>,
}

/// Verifier memory between messages.
#[derive(Clone, Debug)]
pub struct SatState {
    params: FingerprintParams,
    next: usize,
    previous: Option<(usize, bool, u64)>,
    f_var: u64,
    f_cl: u64,
    echo: Option<u64>,
    reject: Option<SatReject>,
}

impl ThreeSatProtocol {
    /// Protocol with the verifier's fingerprint parameters drawn at random.
    pub fn new(formula: Cnf3Formula) -> Result<Self> {
        formula.check()?;
        let encoding = TripleEncoding::for_formula(&formula);
        let (lo, hi) = prime_interval(encoding.b, encoding.ell)?;
        let mut schedule: Vec<(usize, usize, usize, Triple)> = Vec::with_capacity(3 * formula.num_clauses());
        for (i, c) in formula.clauses.iter().enumerate() {
            for (pos, &l) in c.iter().enumerate() {
                let t = Triple { literal: l, clause: i, value: false };
                schedule.push((t.var(), i, pos, t));
            }
        }
        schedule.sort_by_key(|&(v, i, pos, _)| (v, i, pos));
        Ok(Self {
            formula,
            encoding,
            schedule: schedule.into_iter().map(|s| s.3).collect(),
            primes: primes_in(lo, hi),
            fixed: None,
        })
    }

    /// The schedule of variable-ordered occurrences, with values unset.
    pub fn variable_schedule(&self) -> &[Triple] {
        &self.schedule
    }

    pub fn with_fixed_params(mut self, params: FingerprintParams) -> Result<Self> {
        if params.b != self.encoding.b || params.ell != self.encoding.ell {
            return Err(Error::Argument(format!(
                "parameters are for (b, ell) = ({}, {}), formula needs ({}, {})",
                params.b, params.ell, self.encoding.b, self.encoding.ell
            )));
        }
        FingerprintParams::new(params.p, params.r, params.b, params.ell)?;
        self.fixed = Some(params);
        Ok(self)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    fn initial(&self, params: &FingerprintParams) -> SatState {
        SatState { params: *params, next: 0, previous: None, f_var: 1 % params.p, f_cl: 1 % params.p, echo: None, reject: None }
    }

    fn phase_one_len(&self) -> usize {
        self.schedule.len()
    }

    fn total_messages(&self) -> usize {
        self.schedule.len() + self.formula.num_clauses()
    }

    fn receive(&self, s: &SatState, message: usize) -> SatState {
        let mut s = s.clone();
        let t = s.next;
        s.next += 1;
        if t < self.phase_one_len() {
            let mut triple = self.schedule[t];
            triple.value = message == 1;
            let code = self.encoding.encode(&triple);
            if let Some((var, val, prev_code)) = s.previous {
                if var == triple.var() && val != triple.var_value() {
                    s.reject = Some(SatReject::Inconsistent { var, position: t });
                    return s;
                }
                s.echo = Some(prev_code);
            }
            s.f_var = fingerprint_step(s.f_var, code, &s.params);
            s.previous = Some((triple.var(), triple.var_value(), code));
        } else {
            let clause = t - self.phase_one_len();
            let lits = self.formula.clauses[clause];
            let mut packed = 0u64;
            let mut any = false;
            for (j, &l) in lits.iter().enumerate() {
                let value = message >> (2 - j) & 1 == 1;
                any |= value;
                let code = self.encoding.encode(&Triple { literal: l, clause, value });
                s.f_cl = fingerprint_step(s.f_cl, code, &s.params);
                packed = packed << self.encoding.b | code;
            }
            if !any {
                s.reject = Some(SatReject::Unsatisfied { clause });
                return s;
            }
            s.echo = Some(packed);
        }
        s
    }

    fn finish(&self, s: &SatState) -> SatVerdict {
        if let Some(r) = &s.reject {
            return SatVerdict { accept: false, reject: Some(r.clone()), f_var: s.f_var, f_cl: s.f_cl };
        }
        let accept = s.f_var == s.f_cl;
        SatVerdict {
            accept,
            reject: (!accept).then_some(SatReject::FingerprintMismatch { f_var: s.f_var, f_cl: s.f_cl }),
            f_var: s.f_var,
            f_cl: s.f_cl,
        }
    }

    /// Runs the verifier on a full transcript with the given parameters.
    pub fn verify_transcript(&self, params: &FingerprintParams, tr: &SatTranscript) -> SatVerdict {
        let mut s = self.initial(params);
        let reject = |s: &SatState, r| SatVerdict { accept: false, reject: Some(r), f_var: s.f_var, f_cl: s.f_cl };
        if tr.by_variable.len() != self.phase_one_len() || tr.by_clause.len() != self.formula.num_clauses() {
            return reject(&s, SatReject::Length);
        }
        for (pos, (got, want)) in tr.by_variable.iter().zip(&self.schedule).enumerate() {
            if (got.literal, got.clause) != (want.literal, want.clause) {
                return reject(&s, SatReject::Label { phase: 1, position: pos });
            }
            s = self.receive(&s, got.value as usize);
            if s.reject.is_some() {
                return self.finish(&s);
            }
        }
        for (i, triples) in tr.by_clause.iter().enumerate() {
            let mut message = 0;
            for (j, t) in triples.iter().enumerate() {
                if t.literal != self.formula.clauses[i][j] || t.clause != i {
                    return reject(&s, SatReject::Label { phase: 2, position: i });
                }
                message = message << 1 | t.value as usize;
            }
            s = self.receive(&s, message);
            if s.reject.is_some() {
                return self.finish(&s);
            }
        }
        self.finish(&s)
    }

    /// Every multiset a prover can send in the variable phase without
    /// being caught locally (one per assignment of the occurring
    /// variables), and every multiset it can send in the clause phase.
    pub fn forced_multisets(&self) -> Result<(Vec<Vec<u64>>, Vec<Vec<u64>>)> {
        let vars: BTreeSet<usize> = self.schedule.iter().map(Triple::var).collect();
        let vars: Vec<usize> = vars.into_iter().collect();
        let k = self.formula.num_clauses() as u32;
        let pairs = (1u64 << vars.len().min(63)).saturating_mul(7u64.saturating_pow(k));
        if vars.len() >= 63 || pairs > MULTISET_PAIR_CAP {
            return Err(Error::Size(format!("{pairs} multiset pairs exceed the cap of {MULTISET_PAIR_CAP}")));
        }
        let mut first = Vec::with_capacity(1 << vars.len());
        for bits in 0u64..1 << vars.len() {
            let mut set: Vec<u64> = self
                .schedule
                .iter()
                .map(|t| {
                    let idx = vars.binary_search(&t.var()).expect("occurring variable");
                    let value = literal_value(t.literal, bits >> idx & 1 == 1);
                    self.encoding.encode(&Triple { value, ..*t })
                })
                .collect();
            set.sort_unstable();
            first.push(set);
        }
        let mut second = vec![Vec::new()];
        for (i, c) in self.formula.clauses.iter().enumerate() {
            let mut next = Vec::with_capacity(second.len() * 7);
            for prefix in &second {
                for m in 1..8usize {
                    let mut set: Vec<u64> = prefix.clone();
                    for (j, &l) in c.iter().enumerate() {
                        set.push(self.encoding.encode(&Triple { literal: l, clause: i, value: m >> (2 - j) & 1 == 1 }));
                    }
                    next.push(set);
                }
            }
            second = next;
        }
        for s in &mut second {
            s.sort_unstable();
        }
        Ok((first, second))
    }

    /// Maximum over locally valid (variable-phase, clause-phase) multiset
    /// pairs of the weighted frequency with which their fingerprints agree.
    /// A pair of equal multisets always agrees.
    pub fn collision_acceptance(&self, coins: &[(FingerprintParams, f64)]) -> Result<f64> {
        let (first, second) = self.forced_multisets()?;
        let fp = |sets: &[Vec<u64>], c: &FingerprintParams| -> Result<Vec<u64>> {
            sets.iter().map(|s| fingerprint(s, c)).collect()
        };
        let mut per_coin = Vec::with_capacity(coins.len());
        for (c, _) in coins {
            per_coin.push((fp(&first, c)?, fp(&second, c)?));
        }
        let mut best = 0.0f64;
        for (a, sa) in first.iter().enumerate() {
            for (b, sb) in second.iter().enumerate() {
                let total = if sa == sb {
                    coins.iter().map(|(_, w)| w).sum()
                } else {
                    coins.iter().zip(&per_coin).filter(|(_, (fa, fb))| fa[a] == fb[b]).map(|((_, w), _)| w).sum()
                };
                best = best.max(total);
            }
        }
        Ok(best)
    }
}

impl ClassicalProtocol for ThreeSatProtocol {
    type Coin = FingerprintParams;
    type State = SatState;

    fn exact_coins(&self, limit: usize) -> Option<Vec<(FingerprintParams, f64)>> {
        if let Some(p) = self.fixed {
            return Some(vec![(p, 1.0)]);
        }
        let total: u64 = self.primes.iter().map(|p| p - 1).sum();
        if total > limit as u64 {
            return None;
        }
        let np = self.primes.len() as f64;
        let (b, ell) = (self.encoding.b, self.encoding.ell);
        Some(
            self.primes
                .iter()
                .flat_map(|&p| (1..p).map(move |r| (FingerprintParams { p, r, b, ell }, 1.0 / (np * (p - 1) as f64))))
                .collect(),
        )
    }

    fn sample_coin(&self, rng: &mut ChaCha8Rng) -> FingerprintParams {
        if let Some(p) = self.fixed {
            return p;
        }
        let p = self.primes[rng.gen_range(0..self.primes.len())];
        FingerprintParams { p, r: rng.gen_range(1..p), b: self.encoding.b, ell: self.encoding.ell }
    }

    fn start(&self, coin: &FingerprintParams) -> SatState {
        self.initial(coin)
    }

    fn next_move(&self, s: &SatState) -> Move {
        if s.reject.is_some() {
            return Move::Done { accept: false };
        }
        if let Some(message) = s.echo {
            return Move::Verifier { message };
        }
        if s.next < self.phase_one_len() {
            Move::Prover { alphabet: 2 }
        } else if s.next < self.total_messages() {
            Move::Prover { alphabet: 8 }
        } else {
            Move::Done { accept: s.f_var == s.f_cl }
        }
    }

    fn after_prover(&self, s: &SatState, message: usize) -> SatState {
        self.receive(s, message)
    }

    fn after_verifier(&self, s: &SatState) -> SatState {
        SatState { echo: None, ..s.clone() }
    }
}

/// Protocol with fixed fingerprint parameters.
pub fn build_3sat_protocol(formula: &Cnf3Formula, params: FingerprintParams) -> Result<ThreeSatProtocol> {
    ThreeSatProtocol::new(formula.clone())?.with_fixed_params(params)
}

/// The transcript an honest prover sends for a satisfying assignment.
pub fn honest_3sat_prover(formula: &Cnf3Formula, assignment: &[bool]) -> Result<SatTranscript> {
    formula.check()?;
    if assignment.len() != formula.num_vars {
        return Err(Error::Argument(format!(
            "assignment has {} values, formula has {} variables",
            assignment.len(),
            formula.num_vars
        )));
    }
    if !formula.is_satisfied_by(assignment) {
        return Err(Error::Precondition("assignment does not satisfy the formula".into()));
    }
    let value = |l: i32| literal_value(l, assignment[l.unsigned_abs() as usize - 1]);
    let protocol = ThreeSatProtocol::new(formula.clone())?;
    let by_variable = protocol.schedule.iter().map(|t| Triple { value: value(t.literal), ..*t }).collect();
    let by_clause = formula
        .clauses
        .iter()
        .enumerate()
        .map(|(i, c)| c.map(|l| Triple { literal: l, clause: i, value: value(l) }))
        .collect();
    Ok(SatTranscript { by_variable, by_clause })
}
