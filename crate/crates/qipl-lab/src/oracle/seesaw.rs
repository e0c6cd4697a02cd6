// SPDX-License-Identifier: MIT OR Apache-2.0
//! Alternating optimization of the prover's unitaries.
//!
//! With all other unitaries fixed, the acceptance probability is a convex
//! quadratic in `P_j`, so replacing `P_j` by the polar factor of its
//! linear response never decreases it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{adjoint_action, forward_action, run_protocol, ProverStrategy, VerifierSpec};
use crate::error::{Error, Result};
use crate::linalg::random::haar_unitary;
use crate::linalg::{polar_unitary, ComplexMatrix, C64};

/// Weight of the previous iterate in the polar update; breaks ties in
/// favour of not moving.
const TIE_BREAK: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeeSawConfig {
    pub restarts: usize,
    pub iterations: usize,
    /// Prover register size; `None` means `2 (q_M + q_W)`.
    #[serde(default)]
    pub prover_qubits: Option<usize>,
    pub rng_seed: u64,
}

impl Default for SeeSawConfig {
    fn default() -> Self {
        Self { restarts: 8, iterations: 200, prover_qubits: None, rng_seed: 0 }
    }
}

impl SeeSawConfig {
    pub fn prover_qubits_for(&self, v: &VerifierSpec) -> usize {
        self.prover_qubits.unwrap_or(2 * v.n_qubits())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeeSawOutcome {
    pub strategy: ProverStrategy,
    pub value: f64,
    pub restarts: usize,
    pub best_restart: usize,
    /// Acceptance after every sweep of the winning restart.
    pub history: Vec<f64>,
}

/// Pure-state evolution of the deferred-measurement lift, with the global
/// layout `(Q, M, W, env)`.
struct Evolution<'a> {
    v: &'a VerifierSpec,
    q_q: usize,
    /// Live env wires before each verifier action.
    live_before: Vec<usize>,
}

impl<'a> Evolution<'a> {
    fn new(v: &'a VerifierSpec, q_q: usize) -> Self {
        let mut live_before = Vec::with_capacity(v.actions.len());
        let mut live = 0;
        for a in &v.actions {
            live_before.push(live);
            live += a.env_count();
        }
        Self { v, q_q, live_before }
    }

    fn qm_dim(&self) -> usize {
        1 << (self.q_q + self.v.q_m)
    }

    fn initial(&self) -> Vec<C64> {
        let mut s = vec![C64::new(0.0, 0.0); 1 << (self.q_q + self.v.n_qubits())];
        s[0] = C64::new(1.0, 0.0);
        s
    }

    fn verifier(&self, j: usize, s: &[C64]) -> Vec<C64> {
        forward_action(s, 1, self.q_q, self.live_before[j], &self.v.actions[j])
    }

    fn verifier_adj(&self, j: usize, s: &[C64]) -> Vec<C64> {
        adjoint_action(s, 1, self.q_q, self.live_before[j], &self.v.actions[j])
    }

    fn prover(&self, u: &ComplexMatrix, s: &[C64]) -> Vec<C64> {
        let d = self.qm_dim();
        let m = ComplexMatrix::from_vec(d, s.len() / d, s.to_vec()).expect("layout");
        u.matmul(&m).into_data()
    }

    fn project_accept(&self, s: &mut [C64]) {
        let nq = s.len().trailing_zeros() as usize;
        let shift = nq - 1 - (self.q_q + self.v.output_qubit);
        for (i, z) in s.iter_mut().enumerate() {
            if i >> shift & 1 == 0 {
                *z = C64::new(0.0, 0.0);
            }
        }
    }

    /// State just before prover action `j` (0-based).
    fn before_prover(&self, us: &[ComplexMatrix], j: usize) -> Vec<C64> {
        let mut s = self.initial();
        for (i, u) in us.iter().enumerate().take(j + 1) {
            s = self.verifier(i, &s);
            if i < j {
                s = self.prover(u, &s);
            }
        }
        s
    }

    fn value(&self, us: &[ComplexMatrix]) -> f64 {
        let l = us.len();
        let mut s = self.before_prover(us, l - 1);
        s = self.prover(&us[l - 1], &s);
        s = self.verifier(l, &s);
        self.project_accept(&mut s);
        s.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Polar update of prover action `j`.
    fn update(&self, us: &mut [ComplexMatrix], j: usize) {
        let l = us.len();
        let phi = self.before_prover(us, j);
        let mut s = self.prover(&us[j], &phi);
        for i in j + 1..=l {
            s = self.verifier(i, &s);
            if i < l {
                s = self.prover(&us[i], &s);
            }
        }
        self.project_accept(&mut s);
        for i in (j + 1..=l).rev() {
            s = self.verifier_adj(i, &s);
            if i > j + 1 {
                s = self.prover(&us[i - 1].adjoint(), &s);
            }
        }
        let d = self.qm_dim();
        let rest = phi.len() / d;
        let chi = ComplexMatrix::from_vec(d, rest, s).expect("layout");
        let psi = ComplexMatrix::from_vec(d, rest, phi).expect("layout");
        let g = chi.matmul(&psi.adjoint());
        let scale = g.frobenius_norm().max(1e-300) * TIE_BREAK;
        let target = &g + &us[j].scale_real(scale);
        us[j] = polar_unitary(&target);
    }
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    // splitmix64 step so neighbouring restarts get unrelated streams
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(restart as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn one_restart(evo: &Evolution<'_>, cfg: &SeeSawConfig, restart: usize, count: usize) -> (Vec<ComplexMatrix>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(cfg.rng_seed, restart));
    let mut us: Vec<ComplexMatrix> = (0..count).map(|_| haar_unitary(evo.qm_dim(), &mut rng)).collect();
    let mut history = vec![evo.value(&us)];
    for _ in 0..cfg.iterations {
        for j in 0..count {
            evo.update(&mut us, j);
        }
        let v = evo.value(&us);
        let prev = *history.last().expect("non-empty");
        history.push(v);
        if v - prev < 1e-13 {
            break;
        }
    }
    (us, history)
}

/// Number of worker threads: `QIPL_LAB_THREADS` if set, else the
/// available parallelism.
pub fn thread_count() -> usize {
    std::env::var("QIPL_LAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Best prover strategy found by alternating polar updates, over
/// `cfg.restarts` seeded random starting points.
pub fn see_saw_prover(verifier: &VerifierSpec, cfg: &SeeSawConfig) -> Result<SeeSawOutcome> {
    verifier.check()?;
    if cfg.restarts == 0 || cfg.iterations == 0 {
        return Err(Error::Argument("see-saw needs at least one restart and one iteration".into()));
    }
    let q_q = cfg.prover_qubits_for(verifier);
    let lifted = verifier.lift_to_isometric().to_verifier_start();
    let count = lifted.num_prover_actions();
    if count == 0 {
        let strategy = ProverStrategy { q_q, actions: vec![] };
        let value = run_protocol(verifier, &strategy)?;
        return Ok(SeeSawOutcome { strategy, value, restarts: cfg.restarts, best_restart: 0, history: vec![value] });
    }
    let total: usize = q_q + lifted.n_qubits() + lifted.actions.iter().map(|a| a.env_count()).sum::<usize>();
    if total > crate::circuits::MAX_STATE_QUBITS {
        return Err(Error::Size(format!("see-saw state would need {total} qubits")));
    }
    let evo = Evolution::new(&lifted, q_q);
    let threads = thread_count().min(cfg.restarts).max(1);
    let mut results: Vec<Option<(Vec<ComplexMatrix>, Vec<f64>)>> = vec![None; cfg.restarts];
    std::thread::scope(|scope| {
        let chunks: Vec<Vec<usize>> =
            (0..threads).map(|t| (0..cfg.restarts).filter(|r| r % threads == t).collect()).collect();
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|rs| {
                let evo = &evo;
                scope.spawn(move || rs.into_iter().map(|r| (r, one_restart(evo, cfg, r, count))).collect::<Vec<_>>())
            })
            .collect();
        for h in handles {
            for (r, res) in h.join().expect("see-saw worker panicked") {
                results[r] = Some(res);
            }
        }
    });
    let mut best: Option<(usize, Vec<ComplexMatrix>, Vec<f64>)> = None;
    for (r, res) in results.into_iter().enumerate() {
        let (us, hist) = res.expect("every restart ran");
        let v = *hist.last().expect("non-empty");
        if best.as_ref().map_or(true, |(_, _, h)| v > *h.last().expect("non-empty")) {
            best = Some((r, us, hist));
        }
    }
    let (best_restart, actions, history) = best.expect("at least one restart");
    let strategy = ProverStrategy { q_q, actions };
    let value = run_protocol(verifier, &strategy)?;
    Ok(SeeSawOutcome { strategy, value, restarts: cfg.restarts, best_restart, history })
}
