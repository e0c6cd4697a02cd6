// SPDX-License-Identifier: MIT OR Apache-2.0
//! Circuit-evaluation game for semi-unbounded circuits: the prover picks
//! a child at OR gates, the verifier flips a public fair coin at AND
//! gates, and the walk ends at an input literal.

use std::collections::HashMap;

use num_rational::Rational64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{ClassicalProtocol, Move};

/// Longest allowed path from the output gate to an input.
pub const DEPTH_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Sac1Kind {
    Or,
    And,
    Input,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sac1Gate {
    pub id: usize,
    pub kind: Sac1Kind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<usize>,
    /// Signed 1-based input literal, for input gates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal: Option<i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Sac1Repr", into = "Sac1Repr")]
pub struct Sac1Circuit {
    num_inputs: usize,
    gates: Vec<Sac1Gate>,
    output: usize,
    /// Gate ids resolved to positions in `gates`.
    index: HashMap<usize, usize>,
    depth: usize,
}

#[derive(Serialize, Deserialize)]
struct Sac1Repr {
    num_inputs: usize,
    output: usize,
    gates: Vec<Sac1Gate>,
}

impl TryFrom<Sac1Repr> for Sac1Circuit {
    type Error = Error;
    fn try_from(r: Sac1Repr) -> Result<Self> {
        Sac1Circuit::new(r.num_inputs, r.gates, r.output)
    }
}

impl From<Sac1Circuit> for Sac1Repr {
    fn from(c: Sac1Circuit) -> Self {
        Sac1Repr { num_inputs: c.num_inputs, output: c.output, gates: c.gates }
    }
}

impl Sac1Circuit {
    pub fn new(num_inputs: usize, gates: Vec<Sac1Gate>, output: usize) -> Result<Self> {
        let mut index = HashMap::with_capacity(gates.len());
        for (i, g) in gates.iter().enumerate() {
            if index.insert(g.id, i).is_some() {
                return Err(Error::Validation(format!("duplicate gate id {}", g.id)));
            }
        }
        for g in &gates {
            match g.kind {
                Sac1Kind::Input => {
                    let l = g.literal.ok_or_else(|| Error::Validation(format!("input gate {} has no literal", g.id)))?;
                    if l == 0 || l.unsigned_abs() as usize > num_inputs {
                        return Err(Error::Validation(format!("gate {} reads literal {l} outside 1..={num_inputs}", g.id)));
                    }
                    if !g.children.is_empty() {
                        return Err(Error::Validation(format!("input gate {} has children", g.id)));
                    }
                }
                Sac1Kind::And if g.children.len() != 2 => {
                    return Err(Error::Validation(format!("AND gate {} has fan-in {}", g.id, g.children.len())));
                }
                Sac1Kind::Or if g.children.is_empty() => {
                    return Err(Error::Validation(format!("OR gate {} has no children", g.id)));
                }
                _ => {
                    if g.literal.is_some() {
                        return Err(Error::Validation(format!("gate {} is not an input but names a literal", g.id)));
                    }
                }
            }
            for c in &g.children {
                if !index.contains_key(c) {
                    return Err(Error::Validation(format!("gate {} refers to unknown gate {c}", g.id)));
                }
            }
        }
        if !index.contains_key(&output) {
            return Err(Error::Validation(format!("output gate {output} does not exist")));
        }
        let mut c = Self { num_inputs, gates, output, index, depth: 0 };
        c.depth = c.compute_depth()?;
        if c.depth > DEPTH_CAP {
            return Err(Error::Validation(format!("depth {} exceeds the cap of {DEPTH_CAP}", c.depth)));
        }
        Ok(c)
    }

    /// Longest output-to-input path, rejecting cycles.
    fn compute_depth(&self) -> Result<usize> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.gates.len()];
        let mut depth = vec![0usize; self.gates.len()];
        let mut stack = vec![(self.index[&self.output], 0usize)];
        state[self.index[&self.output]] = 1;
        while let Some(&mut (g, ref mut next)) = stack.last_mut() {
            let children = &self.gates[g].children;
            if *next < children.len() {
                let c = self.index[&children[*next]];
                *next += 1;
                match state[c] {
                    0 => {
                        state[c] = 1;
                        stack.push((c, 0));
                    }
                    1 => return Err(Error::Validation(format!("cycle through gate {}", self.gates[c].id))),
                    _ => {}
                }
            } else {
                depth[g] = children.iter().map(|c| depth[self.index[c]] + 1).max().unwrap_or(0);
                state[g] = 2;
                stack.pop();
            }
        }
        Ok(depth[self.index[&self.output]])
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn gates(&self) -> &[Sac1Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn gate(&self, id: usize) -> &Sac1Gate {
        &self.gates[self.index[&id]]
    }

    fn check_input(&self, input: &[bool]) -> Result<()> {
        if input.len() != self.num_inputs {
            return Err(Error::Argument(format!("input has {} bits, circuit reads {}", input.len(), self.num_inputs)));
        }
        Ok(())
    }

    fn literal(input: &[bool], l: i32) -> bool {
        input[l.unsigned_abs() as usize - 1] != (l < 0)
    }

    /// Boolean value of the circuit.
    pub fn evaluate(&self, input: &[bool]) -> Result<bool> {
        self.check_input(input)?;
        fn go(c: &Sac1Circuit, id: usize, input: &[bool], memo: &mut HashMap<usize, bool>) -> bool {
            if let Some(&v) = memo.get(&id) {
                return v;
            }
            let g = c.gate(id);
            let v = match g.kind {
                Sac1Kind::Input => Sac1Circuit::literal(input, g.literal.expect("validated")),
                Sac1Kind::Or => g.children.iter().any(|&ch| go(c, ch, input, memo)),
                Sac1Kind::And => g.children.iter().all(|&ch| go(c, ch, input, memo)),
            };
            memo.insert(id, v);
            v
        }
        Ok(go(self, self.output, input, &mut HashMap::new()))
    }

    /// Largest number of AND gates on one output-to-input path.
    pub fn and_depth(&self) -> usize {
        fn go(c: &Sac1Circuit, id: usize, memo: &mut HashMap<usize, usize>) -> usize {
            if let Some(&v) = memo.get(&id) {
                return v;
            }
            let g = c.gate(id);
            let below = g.children.iter().map(|&ch| go(c, ch, memo)).max().unwrap_or(0);
            let v = below + (g.kind == Sac1Kind::And) as usize;
            memo.insert(id, v);
            v
        }
        go(self, self.output, &mut HashMap::new())
    }
}

/// Value of the game under the best prover: maximum at OR gates, mean at
/// AND gates, literal truth at inputs.
pub fn sac1_game_value(circuit: &Sac1Circuit, input: &[bool]) -> Result<Rational64> {
    circuit.check_input(input)?;
    fn go(c: &Sac1Circuit, id: usize, input: &[bool], memo: &mut HashMap<usize, Rational64>) -> Rational64 {
        if let Some(&v) = memo.get(&id) {
            return v;
        }
        let g = c.gate(id);
        let v = match g.kind {
            Sac1Kind::Input => Rational64::from_integer(Sac1Circuit::literal(input, g.literal.expect("validated")) as i64),
            Sac1Kind::Or => g.children.iter().map(|&ch| go(c, ch, input, memo)).max().expect("non-empty"),
            Sac1Kind::And => (go(c, g.children[0], input, memo) + go(c, g.children[1], input, memo)) / 2,
        };
        memo.insert(id, v);
        v
    }
    Ok(go(circuit, circuit.output, input, &mut HashMap::new()))
}

/// The game as a classical protocol. Coins are bit strings; the `j`-th
/// AND gate on the walk reads bit `j`.
#[derive(Clone, Debug)]
pub struct Sac1Protocol {
    circuit: Sac1Circuit,
    input: Vec<bool>,
    coin_bits: usize,
}

#[derive(Clone, Debug)]
pub struct Sac1State {
    gate: usize,
    coin: u64,
    used: usize,
}

pub fn build_sac1_protocol(circuit: &Sac1Circuit, input: &[bool]) -> Result<Sac1Protocol> {
    circuit.check_input(input)?;
    let coin_bits = circuit.and_depth();
    if coin_bits >= 64 {
        return Err(Error::Size(format!("{coin_bits} coin flips do not fit in one word")));
    }
    Ok(Sac1Protocol { circuit: circuit.clone(), input: input.to_vec(), coin_bits })
}

impl ClassicalProtocol for Sac1Protocol {
    type Coin = u64;
    type State = Sac1State;

    fn exact_coins(&self, limit: usize) -> Option<Vec<(u64, f64)>> {
        let n = 1u64 << self.coin_bits;
        if n > limit as u64 {
            return None;
        }
        let w = 1.0 / n as f64;
        Some((0..n).map(|c| (c, w)).collect())
    }

    fn sample_coin(&self, rng: &mut ChaCha8Rng) -> u64 {
        rng.gen::<u64>() & ((1u64 << self.coin_bits) - 1)
    }

    fn start(&self, coin: &u64) -> Sac1State {
        Sac1State { gate: self.circuit.output, coin: *coin, used: 0 }
    }

    fn next_move(&self, s: &Sac1State) -> Move {
        let g = self.circuit.gate(s.gate);
        match g.kind {
            Sac1Kind::Input => Move::Done { accept: Sac1Circuit::literal(&self.input, g.literal.expect("validated")) },
            Sac1Kind::Or => Move::Prover { alphabet: g.children.len() },
            Sac1Kind::And => Move::Verifier { message: s.coin >> s.used & 1 },
        }
    }

    fn after_prover(&self, s: &Sac1State, message: usize) -> Sac1State {
        Sac1State { gate: self.circuit.gate(s.gate).children[message], ..s.clone() }
    }

    fn after_verifier(&self, s: &Sac1State) -> Sac1State {
        let bit = (s.coin >> s.used & 1) as usize;
        Sac1State { gate: self.circuit.gate(s.gate).children[bit], coin: s.coin, used: s.used + 1 }
    }
}

/// Random circuit with `num_gates` gates (inputs included) over
/// `num_inputs` variables; the last gate is the output.
pub fn random_sac1_circuit<R: Rng + ?Sized>(num_inputs: usize, num_gates: usize, rng: &mut R) -> Result<Sac1Circuit> {
    if num_inputs == 0 || num_gates == 0 {
        return Err(Error::Argument("need at least one input variable and one gate".into()));
    }
    let leaves = rng.gen_range(1..=num_gates.min(num_inputs.max(2) + 1));
    let mut gates = Vec::with_capacity(num_gates);
    for id in 0..leaves {
        let var = rng.gen_range(1..=num_inputs) as i32;
        let literal = if rng.gen_bool(0.5) { var } else { -var };
        gates.push(Sac1Gate { id, kind: Sac1Kind::Input, children: vec![], literal: Some(literal) });
    }
    for id in leaves..num_gates {
        if rng.gen_bool(0.5) {
            let a = rng.gen_range(0..id);
            let b = if id > 1 { (a + rng.gen_range(1..id)) % id } else { a };
            gates.push(Sac1Gate { id, kind: Sac1Kind::And, children: vec![a, b], literal: None });
        } else {
            let fan_in = rng.gen_range(1..=id.min(3));
            let mut children: Vec<usize> = Vec::with_capacity(fan_in);
            while children.len() < fan_in {
                let c = rng.gen_range(0..id);
                if !children.contains(&c) {
                    children.push(c);
                }
            }
            gates.push(Sac1Gate { id, kind: Sac1Kind::Or, children, literal: None });
        }
    }
    Sac1Circuit::new(num_inputs, gates, num_gates - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{enumerate_classical, EnumerationConfig};

    fn input(id: usize, literal: i32) -> Sac1Gate {
        Sac1Gate { id, kind: Sac1Kind::Input, children: vec![], literal: Some(literal) }
    }

    fn gate(id: usize, kind: Sac1Kind, children: Vec<usize>) -> Sac1Gate {
        Sac1Gate { id, kind, children, literal: None }
    }

    #[test]
    fn single_input() {
        let c = Sac1Circuit::new(1, vec![input(0, 1)], 0).unwrap();
        assert_eq!(sac1_game_value(&c, &[true]).unwrap(), Rational64::from_integer(1));
    }

    #[test]
    fn and_of_two_inputs_is_half() {
        let c = Sac1Circuit::new(2, vec![input(0, 1), input(1, 2), gate(2, Sac1Kind::And, vec![0, 1])], 2).unwrap();
        assert_eq!(sac1_game_value(&c, &[true, false]).unwrap(), Rational64::new(1, 2));
        let r = enumerate_classical(&build_sac1_protocol(&c, &[true, false]).unwrap(), &EnumerationConfig::default()).unwrap();
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn or_picks_satisfied_child() {
        let c = Sac1Circuit::new(2, vec![input(0, 1), input(1, 2), gate(2, Sac1Kind::Or, vec![0, 1])], 2).unwrap();
        assert_eq!(sac1_game_value(&c, &[false, true]).unwrap(), Rational64::from_integer(1));
    }

    #[test]
    fn and_of_ors() {
        let c = Sac1Circuit::new(
            2,
            vec![
                input(0, 1),
                input(1, 2),
                gate(2, Sac1Kind::Or, vec![0]),
                gate(3, Sac1Kind::Or, vec![1]),
                gate(4, Sac1Kind::And, vec![2, 3]),
            ],
            4,
        )
        .unwrap();
        assert_eq!(sac1_game_value(&c, &[true, false]).unwrap(), Rational64::new(1, 2));
        assert_eq!(c.depth(), 2);
    }

    #[test]
    fn rejects_malformed() {
        assert!(Sac1Circuit::new(1, vec![input(0, 1), gate(1, Sac1Kind::And, vec![0])], 1).is_err());
        assert!(Sac1Circuit::new(1, vec![gate(0, Sac1Kind::Or, vec![1]), gate(1, Sac1Kind::Or, vec![0])], 0).is_err());
        assert!(Sac1Circuit::new(1, vec![input(0, 2)], 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = Sac1Circuit::new(2, vec![input(0, -1), input(1, 2), gate(2, Sac1Kind::And, vec![0, 1])], 2).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"kind\":\"AND\""));
        let back: Sac1Circuit = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
