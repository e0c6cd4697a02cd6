// SPDX-License-Identifier: MIT OR Apache-2.0
//! Verifier-to-verifier compilers.
//!
//! Each transform renumbers the input's wires into a larger (M, W)
//! register, splices extra gates around the original actions and records
//! a provenance entry on the output.

use serde_json::json;

use crate::circuits::{ActionKind, Caps, CircuitAction, Gate, ProvenanceEntry, Starter, VerifierSpec};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};

/// Largest denominator exponent tried when picking the dyadic threshold.
pub const MAX_DYADIC_EXPONENT: u32 = 10;

/// Collects gates for one new action, numbering the environment wires of
/// embedded actions consecutively after the new register.
struct ActionBuilder {
    in_qubits: usize,
    gates: Vec<Gate>,
    created: usize,
    kind: ActionKind,
}

impl ActionBuilder {
    fn new(in_qubits: usize) -> Self {
        Self { in_qubits, gates: Vec::new(), created: 0, kind: ActionKind::Unitary }
    }

    fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    /// Splices `a` in with its register wires renamed by `f`.
    fn embed(&mut self, a: &CircuitAction, f: &dyn Fn(usize) -> usize) {
        let (old_in, base) = (a.in_qubits, self.in_qubits + self.created);
        self.gates.extend(a.gates.iter().map(|g| g.map_wires(|w| if w < old_in { f(w) } else { base + (w - old_in) })));
        self.created += a.env_count();
        self.kind = match (self.kind, a.kind) {
            (ActionKind::Isometric, _) | (_, ActionKind::Isometric) => ActionKind::Isometric,
            (ActionKind::AlmostUnitary, _) | (_, ActionKind::AlmostUnitary) => ActionKind::AlmostUnitary,
            _ => ActionKind::Unitary,
        };
    }

    /// Splices a unitary action in, conditioned on `controls`.
    fn embed_controlled(&mut self, a: &CircuitAction, f: &dyn Fn(usize) -> usize, controls: &[(usize, bool)]) -> Result<()> {
        if a.kind != ActionKind::Unitary {
            return Err(Error::Argument("only unitary actions can be run conditionally".into()));
        }
        for g in &a.gates {
            self.gates.push(g.map_wires(f).with_controls(controls)?);
        }
        Ok(())
    }

    fn build(self) -> Result<CircuitAction> {
        CircuitAction::new(self.kind, self.in_qubits, self.gates)
    }
}

fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

/// `+1 mod 2^w` on `bits` (most significant first) under `controls`.
fn increment(bits: &[usize], controls: &[(usize, bool)]) -> Vec<Gate> {
    (0..bits.len())
        .map(|i| {
            let mut cs = controls.to_vec();
            cs.extend(bits[i + 1..].iter().map(|&b| (b, true)));
            Gate::mcx(cs, bits[i])
        })
        .collect()
}

/// Controls matching `value` on `bits` (most significant first).
fn equals(bits: &[usize], value: usize) -> Vec<(usize, bool)> {
    let w = bits.len();
    bits.iter().enumerate().map(|(i, &b)| (b, value >> (w - 1 - i) & 1 == 1)).collect()
}

fn check_caps(q_m: usize, q_w: usize) -> Result<()> {
    let cap = Caps::default().max_register_qubits;
    if q_m + q_w > cap {
        return Err(Error::Size(format!("transformed register needs {} qubits, cap is {cap}", q_m + q_w)));
    }
    Ok(())
}

fn finish(
    input: &VerifierSpec,
    q_m: usize,
    q_w: usize,
    actions: Vec<CircuitAction>,
    output_qubit: usize,
    starts_with: Starter,
    transform: &str,
    params: serde_json::Value,
) -> Result<VerifierSpec> {
    let mut v = VerifierSpec::new(q_m, q_w, actions, output_qubit, starts_with)?;
    v.provenance = input.provenance.clone();
    v.provenance.push(ProvenanceEntry { transform: transform.into(), params, input_hash: input.content_hash() });
    Ok(v)
}

/// Smallest-denominator dyadic rational in `[(3c+s)/4, c]` (ties go to
/// the smaller value), as `(numerator, exponent)`.
pub fn dyadic_threshold(c: f64, s: f64) -> Result<(u64, u32)> {
    if !(0.0 <= s && s < c && c <= 1.0) {
        return Err(Error::Parameter(format!("need 0 ≤ s < c ≤ 1, got c = {c}, s = {s}")));
    }
    let lo = (3.0 * c + s) / 4.0;
    for e in 0..=MAX_DYADIC_EXPONENT {
        let den = (1u64 << e) as f64;
        let a = (lo * den - 1e-12).ceil().max(0.0);
        if a / den <= c + 1e-12 {
            return Ok((a as u64, e));
        }
    }
    Err(Error::Parameter(format!("no dyadic with denominator ≤ 2^{MAX_DYADIC_EXPONENT} lies in [{lo}, {c}]")))
}

/// Two-qubit unitary sending `√(1−α)|00⟩ + √α|11⟩` to `|00⟩`.
fn gamma_rotation(alpha: f64) -> ComplexMatrix {
    let (a, b) = ((1.0 - alpha).sqrt(), alpha.sqrt());
    let mut g = ComplexMatrix::zeros(4, 4);
    g[(0, 0)] = c(a, 0.0);
    g[(0, 3)] = c(b, 0.0);
    g[(1, 1)] = c(1.0, 0.0);
    g[(2, 2)] = c(1.0, 0.0);
    g[(3, 0)] = c(-b, 0.0);
    g[(3, 3)] = c(a, 0.0);
    g
}

/// Adds two turns after which the verifier accepts with certainty when
/// the input accepted with probability at least `α ≥ (3c+s)/4`.
///
/// The final action, instead of reading the output qubit `Z`, copies it
/// onto a private qubit `Z'` and hands all of `W` (which holds `Z`) to
/// the prover. The prover returns one qubit in place of `Z`, and the
/// verifier accepts iff `(Z, Z')` passes the projection onto
/// `√(1−α)|00⟩ + √α|11⟩`.
///
/// New layout: `M' = (M, X)` with `X` as wide as `W`, then
/// `W' = (W, Z', flag)`. `W` travels in `X`, so `Z` sits at the same
/// index in `M'` as it had in the input.
pub fn perfect_completeness_transform(v: &VerifierSpec, c: f64, s: f64) -> Result<VerifierSpec> {
    v.check()?;
    let (num, e) = dyadic_threshold(c, s)?;
    let alpha = num as f64 / (1u64 << e) as f64;
    let (q_m, q_w) = (v.q_m, v.q_w);
    let out = v.output_qubit;
    let qm2 = q_m + q_w;
    let qw2 = q_w + 2;
    check_caps(qm2, qw2)?;
    let map = move |w: usize| if w < q_m { w } else { qm2 + (w - q_m) };
    let (z_copy, flag) = (qm2 + q_w, qm2 + q_w + 1);
    let n2 = qm2 + qw2;
    let l = v.actions.len() - 1;
    let mut actions = Vec::with_capacity(v.actions.len() + 1);
    for a in &v.actions[..l] {
        let mut b = ActionBuilder::new(n2);
        b.embed(a, &map);
        actions.push(b.build()?);
    }
    let mut last = ActionBuilder::new(n2);
    last.embed(&v.actions[l], &map);
    last.push(Gate::Cnot { control: map(out), target: z_copy });
    for k in 0..q_w {
        last.push(Gate::Swap(q_m + k, qm2 + k));
    }
    actions.push(last.build()?);
    let mut check = ActionBuilder::new(n2);
    check.push(Gate::Raw { wires: vec![out, z_copy], matrix: gamma_rotation(alpha) });
    check.push(Gate::mcx(vec![(out, false), (z_copy, false)], flag));
    actions.push(check.build()?);
    finish(
        v,
        qm2,
        qw2,
        actions,
        flag,
        v.starts_with,
        "perfect_completeness",
        json!({ "c": c, "s": s, "alpha": alpha, "alpha_numerator": num, "alpha_exponent": e }),
    )
}

/// `r = ⌈k / log₂(1/(1 − (c−s)²/2))⌉`, the number of sequential
/// repetitions that pushes soundness `1 − (c−s)²/2` below `2^{-k}`.
pub fn repetition_count(k: u32, c: f64, s: f64) -> Result<usize> {
    if !(0.0 <= s && s < c && c <= 1.0) {
        return Err(Error::Parameter(format!("need 0 ≤ s < c ≤ 1, got c = {c}, s = {s}")));
    }
    let g = c - s;
    let per_round = -(1.0 - g * g / 2.0).log2();
    Ok(((k as f64) / per_round).ceil().max(1.0) as usize)
}

/// `r`-fold sequential repetition with prover-assisted workspace reset.
///
/// Layout: `M̂ = (M, X)` with `X` as wide as `W`, and
/// `Ŵ = (W, S, T, flag)`. After each run the output qubit increments `S`;
/// between runs the prover sends `(M, X)`, the verifier increments `T` if
/// all of it is zero and swaps `X` with `W`. Accepts iff `S = r` and
/// `T = r − 1`. `S` has `⌈log₂(r+1)⌉` qubits so it can hold `r`.
pub fn sequential_repetition(v: &VerifierSpec, r: usize) -> Result<VerifierSpec> {
    v.check()?;
    if r == 0 {
        return Err(Error::Argument("repetition count must be at least 1".into()));
    }
    let v0 = v.to_verifier_start();
    let (q_m, q_w) = (v0.q_m, v0.q_w);
    let (ws, wt) = (ceil_log2(r + 1), ceil_log2(r));
    let qm2 = q_m + q_w;
    let qw2 = q_w + ws + wt + 1;
    check_caps(qm2, qw2)?;
    let n2 = qm2 + qw2;
    let map = move |w: usize| if w < q_m { w } else { qm2 + (w - q_m) };
    let s_bits: Vec<usize> = (qm2 + q_w..qm2 + q_w + ws).collect();
    let t_bits: Vec<usize> = (qm2 + q_w + ws..qm2 + q_w + ws + wt).collect();
    let flag = n2 - 1;
    let z = map(v0.output_qubit);
    let l = v0.actions.len() - 1;
    let mut actions = Vec::with_capacity(r * (l + 1));
    for i in 1..=r {
        for (j, a) in v0.actions.iter().enumerate() {
            let mut b = ActionBuilder::new(n2);
            if j == 0 && i > 1 {
                let zero: Vec<(usize, bool)> = (0..qm2).map(|w| (w, false)).collect();
                for g in increment(&t_bits, &zero) {
                    b.push(g);
                }
                for k in 0..q_w {
                    b.push(Gate::Swap(q_m + k, qm2 + k));
                }
            }
            b.embed(a, &map);
            if j == l {
                for g in increment(&s_bits, &[(z, true)]) {
                    b.push(g);
                }
                if i == r {
                    let mut cs = equals(&s_bits, r);
                    cs.extend(equals(&t_bits, r - 1));
                    b.push(Gate::mcx(cs, flag));
                }
            }
            actions.push(b.build()?);
        }
    }
    finish(v, qm2, qw2, actions, flag, Starter::Verifier, "sequential_repetition", json!({ "r": r, "s_bits": ws, "t_bits": wt }))
}

/// `k` independent copies run side by side; accepts iff every copy does.
///
/// Layout: `M̂ = (M⁽¹⁾, …, M⁽ᵏ⁾)`, `Ŵ = (W⁽¹⁾, …, W⁽ᵏ⁾, flag)`.
pub fn parallel_repetition(v: &VerifierSpec, k: usize) -> Result<VerifierSpec> {
    v.check()?;
    if k == 0 {
        return Err(Error::Argument("copy count must be at least 1".into()));
    }
    let (q_m, q_w) = (v.q_m, v.q_w);
    let (qm2, qw2) = (k * q_m, k * q_w + 1);
    check_caps(qm2, qw2)?;
    let n2 = qm2 + qw2;
    let flag = n2 - 1;
    let copy_map = |c: usize| move |w: usize| if w < q_m { c * q_m + w } else { qm2 + c * q_w + (w - q_m) };
    let l = v.actions.len() - 1;
    let mut actions = Vec::with_capacity(v.actions.len());
    for (j, a) in v.actions.iter().enumerate() {
        let mut b = ActionBuilder::new(n2);
        for copy in 0..k {
            b.embed(a, &copy_map(copy));
        }
        if j == l {
            let cs = (0..k).map(|copy| (copy_map(copy)(v.output_qubit), true)).collect();
            b.push(Gate::mcx(cs, flag));
        }
        actions.push(b.build()?);
    }
    finish(v, qm2, qw2, actions, flag, v.starts_with, "parallel_repetition", json!({ "k": k }))
}

/// Shared construction behind turn halving and the single-coin game.
///
/// The prover's first message carries a full `W` in the extra carrier
/// `X`, which the first action swaps into the private `W`. The verifier
/// then flips a coin `b` into a private qubit, copies it into the message,
/// and runs `forward[j]` when `b = 0` or `backward[j]` when `b = 1`. It
/// accepts on `b = 0` iff the original output qubit is 1, and on `b = 1`
/// iff `W` is all-zero.
///
/// Layout: `M̂ = (M, X, b-copy)`, `Ŵ = (W, b, flag)`.
fn coin_split(
    v: &VerifierSpec,
    forward: &[CircuitAction],
    backward: &[CircuitAction],
    name: &str,
    params: serde_json::Value,
) -> Result<VerifierSpec> {
    let (q_m, q_w) = (v.q_m, v.q_w);
    let qm2 = q_m + q_w + 1;
    let qw2 = q_w + 2;
    check_caps(qm2, qw2)?;
    let n2 = qm2 + qw2;
    let map = move |w: usize| if w < q_m { w } else { qm2 + (w - q_m) };
    let bit_copy = q_m + q_w;
    let (coin, flag) = (qm2 + q_w, qm2 + q_w + 1);
    let steps = forward.len();
    let mut actions = Vec::with_capacity(steps);
    for j in 0..steps {
        let mut b = ActionBuilder::new(n2);
        if j == 0 {
            for k in 0..q_w {
                b.push(Gate::Swap(q_m + k, qm2 + k));
            }
            b.push(Gate::H(coin));
            b.push(Gate::Cnot { control: coin, target: bit_copy });
        }
        b.embed_controlled(&forward[j], &map, &[(coin, false)])?;
        b.embed_controlled(&backward[j], &map, &[(coin, true)])?;
        if j + 1 == steps {
            b.push(Gate::mcx(vec![(coin, false), (map(v.output_qubit), true)], flag));
            let mut zero = vec![(coin, true)];
            zero.extend((0..q_w).map(|k| (qm2 + k, false)));
            b.push(Gate::mcx(zero, flag));
        }
        actions.push(b.build()?);
    }
    finish(v, qm2, qw2, actions, flag, Starter::Prover, name, params)
}

fn require_unitary_prover_first(v: &VerifierSpec, what: &str) -> Result<()> {
    v.check()?;
    if v.starts_with != Starter::Prover {
        return Err(Error::Argument(format!("{what} needs a verifier whose first turn is the prover's")));
    }
    if !v.is_unitary() {
        return Err(Error::Argument(format!("{what} needs unitary verifier actions")));
    }
    Ok(())
}

/// Compiles a `(4m+1)`-turn verifier into a `(2m+1)`-turn one.
///
/// The prover first sends the snapshot right after its `(m+1)`-st message
/// of the original run (both `M` and `W`). On `b = 0` the verifier runs
/// `V_{m+1}, …, V_{2m+1}` forward; on `b = 1` it runs
/// `V_m†, …, V_1†` backward (after an idle first step).
pub fn turn_halving(v: &VerifierSpec) -> Result<VerifierSpec> {
    require_unitary_prover_first(v, "turn halving")?;
    let turns = v.num_turns();
    if turns < 5 || turns % 4 != 1 {
        return Err(Error::Argument(format!("turn halving needs 4m+1 turns with m ≥ 1, got {turns}")));
    }
    let m = (turns - 1) / 4;
    let forward: Vec<CircuitAction> = v.actions[m..=2 * m].to_vec();
    let mut backward = vec![CircuitAction::identity(v.n_qubits())];
    for a in v.actions[..m].iter().rev() {
        backward.push(a.inverse()?);
    }
    coin_split(v, &forward, &backward, "turn_halving", json!({ "m": m }))
}

/// Compiles a 3-turn verifier into a message / one public coin / message
/// game: the prover sends `W` after `V_1`, receives the coin, then sends
/// `M`; the verifier applies `V_2` (coin 0) or `V_1†` (coin 1).
pub fn single_coin_qmaml(v: &VerifierSpec) -> Result<VerifierSpec> {
    require_unitary_prover_first(v, "the single-coin compiler")?;
    if v.num_turns() != 3 {
        return Err(Error::Argument(format!("the single-coin compiler needs 3 turns, got {}", v.num_turns())));
    }
    let id = CircuitAction::identity(v.n_qubits());
    let forward = vec![id.clone(), v.actions[1].clone()];
    let backward = vec![id, v.actions[0].inverse()?];
    coin_split(v, &forward, &backward, "single_coin_qmaml", json!({}))
}

/// Multiplies every acceptance probability by `p`: the final action
/// rotates a fresh private qubit to `Pr[1] = p` when the original output
/// qubit is 1, and that qubit becomes the output.
pub fn scale_acceptance(v: &VerifierSpec, p: f64) -> Result<VerifierSpec> {
    v.check()?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("scale {p} outside [0, 1]")));
    }
    let (q_m, q_w) = (v.q_m, v.q_w);
    check_caps(q_m, q_w + 1)?;
    let n2 = q_m + q_w + 1;
    let flag = n2 - 1;
    let theta = p.sqrt().asin();
    let ry = ComplexMatrix::from_real(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
    let map = |w: usize| w;
    let l = v.actions.len() - 1;
    let mut actions = Vec::with_capacity(v.actions.len());
    for (j, a) in v.actions.iter().enumerate() {
        let mut b = ActionBuilder::new(n2);
        b.embed(a, &map);
        if j == l {
            b.push(Gate::Controlled { controls: vec![(v.output_qubit, true)], targets: vec![flag], matrix: ry.clone() });
        }
        actions.push(b.build()?);
    }
    finish(v, q_m, q_w + 1, actions, flag, v.starts_with, "scale_acceptance", json!({ "p": p }))
}

/// Flips the output qubit at the end of the final action, so the
/// optimum of the result is one minus the least acceptance probability
/// any prover can force on the input.
pub fn complement_output(v: &VerifierSpec) -> Result<VerifierSpec> {
    v.check()?;
    let mut actions = v.actions.clone();
    let last = actions.last_mut().expect("checked verifiers have a final action");
    last.gates.push(Gate::x(v.output_qubit));
    finish(v, v.q_m, v.q_w, actions, v.output_qubit, v.starts_with, "complement_output", json!({}))
}
