// SPDX-License-Identifier: MIT OR Apache-2.0
//! Exhaustive search over deterministic classical provers.
//!
//! A deterministic prover is a function from the public transcript to its
//! next message. Strategies are counted in reduced form: choices at
//! transcripts the strategy itself never produces are not distinguished.
//! Every reduced strategy gets its own acceptance probability, computed by
//! walking the public game tree once while carrying all coin outcomes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What happens next in one run of the protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    /// The prover sends a message in `0..alphabet`.
    Prover { alphabet: usize },
    /// The verifier sends a public message.
    Verifier { message: u64 },
    Done { accept: bool },
}

/// A classical interactive protocol with a deterministic verifier driven
/// by private or public coins.
pub trait ClassicalProtocol: Sync {
    type Coin: Clone + Send + Sync;
    type State: Clone;

    /// Every coin outcome with its probability, or `None` when there are
    /// more than `limit` of them.
    fn exact_coins(&self, limit: usize) -> Option<Vec<(Self::Coin, f64)>>;
    fn sample_coin(&self, rng: &mut ChaCha8Rng) -> Self::Coin;
    fn start(&self, coin: &Self::Coin) -> Self::State;
    fn next_move(&self, state: &Self::State) -> Move;
    fn after_prover(&self, state: &Self::State, message: usize) -> Self::State;
    fn after_verifier(&self, state: &Self::State) -> Self::State;
}

/// One public transcript symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "from", content = "message", rename_all = "snake_case")]
pub enum Token {
    Prover(usize),
    Verifier(u64),
}

/// The prover's choice after one public history.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub history: Vec<Token>,
    pub message: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CoinMode {
    Exact { outcomes: usize },
    MonteCarlo { samples: usize, seed: u64, std_error: f64, ci95: (f64, f64) },
    Given { outcomes: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationConfig {
    pub strategy_cap: u64,
    pub exact_coin_limit: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self { strategy_cap: 10_000_000, exact_coin_limit: 1 << 16, samples: 4096, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationResult {
    pub value: f64,
    pub strategies: u64,
    pub best_strategy: Vec<StrategyEntry>,
    pub coins: CoinMode,
}

/// Shape of the reduced-strategy space below one public history.
struct Shape {
    /// Per-message subtrees when the prover moves here.
    prover: Option<Vec<Shape>>,
    verifier: Vec<(u64, Shape)>,
    count: u64,
}

struct Walker<'a, P: ClassicalProtocol> {
    protocol: &'a P,
    cap: u64,
}

impl<'a, P: ClassicalProtocol> Walker<'a, P> {
    fn too_many(&self, n: u64) -> Error {
        Error::Size(format!(
            "more than {} reduced prover strategies ({n} at least); use Monte-Carlo sampling of provers instead",
            self.cap
        ))
    }

    /// Values of every reduced strategy below this history, in mixed-radix
    /// order (prover choice first, then verifier children in message order).
    fn explore(&self, group: Vec<(f64, P::State)>) -> Result<(Vec<f64>, Shape)> {
        let mut done = 0.0;
        let mut prover: Vec<(f64, P::State)> = Vec::new();
        let mut alphabet = None;
        let mut verifier: std::collections::BTreeMap<u64, Vec<(f64, P::State)>> = Default::default();
        for (w, s) in group {
            match self.protocol.next_move(&s) {
                Move::Done { accept } => {
                    if accept {
                        done += w;
                    }
                }
                Move::Prover { alphabet: a } => {
                    if a == 0 {
                        return Err(Error::Argument("prover turn with an empty alphabet".into()));
                    }
                    match alphabet {
                        Some(b) if b != a => {
                            return Err(Error::Argument(format!(
                                "coins sharing a public history disagree on the prover alphabet ({b} vs {a})"
                            )))
                        }
                        _ => alphabet = Some(a),
                    }
                    prover.push((w, s));
                }
                Move::Verifier { message } => {
                    let next = self.protocol.after_verifier(&s);
                    verifier.entry(message).or_default().push((w, next));
                }
            }
        }
        let mut lists: Vec<Vec<f64>> = Vec::new();
        let mut prover_shape = None;
        if let Some(a) = alphabet {
            let mut all = Vec::new();
            let mut shapes = Vec::with_capacity(a);
            for m in 0..a {
                let child: Vec<(f64, P::State)> =
                    prover.iter().map(|(w, s)| (*w, self.protocol.after_prover(s, m))).collect();
                let (vals, shape) = self.explore(child)?;
                all.extend(vals);
                if all.len() as u64 > self.cap {
                    return Err(self.too_many(all.len() as u64));
                }
                shapes.push(shape);
            }
            lists.push(all);
            prover_shape = Some(shapes);
        }
        let mut verifier_shapes = Vec::with_capacity(verifier.len());
        for (msg, child) in verifier {
            let (vals, shape) = self.explore(child)?;
            lists.push(vals);
            verifier_shapes.push((msg, shape));
        }
        let mut values = vec![done];
        for list in &lists {
            let n = values.len() as u64 * list.len() as u64;
            if n > self.cap {
                return Err(self.too_many(n));
            }
            let mut next = Vec::with_capacity(n as usize);
            for &a in &values {
                for &b in list {
                    next.push(a + b);
                }
            }
            values = next;
        }
        let count = values.len() as u64;
        Ok((values, Shape { prover: prover_shape, verifier: verifier_shapes, count }))
    }
}

fn decode(shape: &Shape, mut index: u64, history: &mut Vec<Token>, out: &mut Vec<StrategyEntry>) {
    // radices in the same order as `explore` multiplied them
    let mut radices: Vec<u64> = Vec::new();
    if let Some(ps) = &shape.prover {
        radices.push(ps.iter().map(|s| s.count).sum());
    }
    radices.extend(shape.verifier.iter().map(|(_, s)| s.count));
    let mut digits = vec![0u64; radices.len()];
    for k in (0..radices.len()).rev() {
        digits[k] = index % radices[k];
        index /= radices[k];
    }
    let mut k = 0;
    if let Some(ps) = &shape.prover {
        let mut d = digits[0];
        for (m, s) in ps.iter().enumerate() {
            if d < s.count {
                out.push(StrategyEntry { history: history.clone(), message: m });
                history.push(Token::Prover(m));
                decode(s, d, history, out);
                history.pop();
                break;
            }
            d -= s.count;
        }
        k = 1;
    }
    for ((msg, s), &d) in shape.verifier.iter().zip(&digits[k..]) {
        history.push(Token::Verifier(*msg));
        decode(s, d, history, out);
        history.pop();
    }
}

/// Exhaustive maximum over reduced prover strategies, averaged over the
/// given weighted coin outcomes.
pub fn enumerate_with_coins<P: ClassicalProtocol>(
    protocol: &P,
    coins: &[(P::Coin, f64)],
    strategy_cap: u64,
) -> Result<(f64, u64, Vec<StrategyEntry>)> {
    if coins.is_empty() {
        return Err(Error::Argument("no coin outcomes".into()));
    }
    let walker = Walker { protocol, cap: strategy_cap };
    let group = coins.iter().map(|(c, w)| (*w, protocol.start(c))).collect();
    let (values, shape) = walker.explore(group)?;
    let (best, &value) = values
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    let mut strategy = Vec::new();
    decode(&shape, best as u64, &mut Vec::new(), &mut strategy);
    Ok((value, shape.count, strategy))
}

/// Maximum acceptance probability over deterministic classical provers.
///
/// Coins are averaged exactly when there are at most
/// `cfg.exact_coin_limit` outcomes; otherwise `cfg.samples` coins are drawn
/// with the seeded generator and a binomial confidence interval is
/// reported for the winning strategy.
pub fn enumerate_classical<P: ClassicalProtocol>(protocol: &P, cfg: &EnumerationConfig) -> Result<EnumerationResult> {
    match protocol.exact_coins(cfg.exact_coin_limit) {
        Some(coins) => {
            let (value, strategies, best_strategy) = enumerate_with_coins(protocol, &coins, cfg.strategy_cap)?;
            Ok(EnumerationResult { value, strategies, best_strategy, coins: CoinMode::Exact { outcomes: coins.len() } })
        }
        None => {
            if cfg.samples == 0 {
                return Err(Error::Argument("coin space is too large for exact averaging and samples = 0".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let w = 1.0 / cfg.samples as f64;
            let coins: Vec<(P::Coin, f64)> = (0..cfg.samples).map(|_| (protocol.sample_coin(&mut rng), w)).collect();
            let (value, strategies, best_strategy) = enumerate_with_coins(protocol, &coins, cfg.strategy_cap)?;
            let std_error = (value * (1.0 - value) / cfg.samples as f64).max(0.0).sqrt();
            let ci95 = ((value - 1.96 * std_error).max(0.0), (value + 1.96 * std_error).min(1.0));
            Ok(EnumerationResult {
                value,
                strategies,
                best_strategy,
                coins: CoinMode::MonteCarlo { samples: cfg.samples, seed: cfg.seed, std_error, ci95 },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Prover names a bit; verifier accepts iff it equals a private coin.
    struct Guess;

    impl ClassicalProtocol for Guess {
        type Coin = bool;
        type State = (bool, Option<bool>);
        fn exact_coins(&self, _: usize) -> Option<Vec<(bool, f64)>> {
            Some(vec![(false, 0.5), (true, 0.5)])
        }
        fn sample_coin(&self, rng: &mut ChaCha8Rng) -> bool {
            rand::Rng::gen(rng)
        }
        fn start(&self, c: &bool) -> Self::State {
            (*c, None)
        }
        fn next_move(&self, s: &Self::State) -> Move {
            match s.1 {
                None => Move::Prover { alphabet: 2 },
                Some(g) => Move::Done { accept: g == s.0 },
            }
        }
        fn after_prover(&self, s: &Self::State, m: usize) -> Self::State {
            (s.0, Some(m == 1))
        }
        fn after_verifier(&self, s: &Self::State) -> Self::State {
            s.clone()
        }
    }

    /// Verifier announces a public coin, then the prover must repeat it.
    struct Echo;

    impl ClassicalProtocol for Echo {
        type Coin = bool;
        type State = (bool, u8, Option<bool>);
        fn exact_coins(&self, _: usize) -> Option<Vec<(bool, f64)>> {
            Some(vec![(false, 0.5), (true, 0.5)])
        }
        fn sample_coin(&self, rng: &mut ChaCha8Rng) -> bool {
            rand::Rng::gen(rng)
        }
        fn start(&self, c: &bool) -> Self::State {
            (*c, 0, None)
        }
        fn next_move(&self, s: &Self::State) -> Move {
            match (s.1, s.2) {
                (0, _) => Move::Verifier { message: s.0 as u64 },
                (_, None) => Move::Prover { alphabet: 2 },
                (_, Some(g)) => Move::Done { accept: g == s.0 },
            }
        }
        fn after_prover(&self, s: &Self::State, m: usize) -> Self::State {
            (s.0, s.1, Some(m == 1))
        }
        fn after_verifier(&self, s: &Self::State) -> Self::State {
            (s.0, 1, s.2)
        }
    }

    #[test]
    fn private_coin_cannot_be_guessed() {
        let r = enumerate_classical(&Guess, &EnumerationConfig::default()).unwrap();
        assert_eq!(r.value, 0.5);
        assert_eq!(r.strategies, 2);
    }

    #[test]
    fn public_coin_can_be_echoed() {
        let r = enumerate_classical(&Echo, &EnumerationConfig::default()).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.strategies, 4);
        assert_eq!(r.best_strategy.len(), 2);
        for e in &r.best_strategy {
            assert_eq!(e.history.len(), 1);
            let Token::Verifier(b) = e.history[0] else { panic!("expected a verifier token") };
            assert_eq!(e.message as u64, b);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = enumerate_with_coins(&Echo, &[(false, 0.5), (true, 0.5)], 3).unwrap_err();
        assert!(matches!(err, Error::Size(_)));
    }
}
