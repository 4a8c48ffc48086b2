use rand::Rng;

use super::ZERO_PROB;

/// Source of every random decision in a round: measurement branches as well
/// as the parties' own coin flips.
///
/// A sampler draws from the weights; the branch enumerator instead walks
/// every index with non-zero weight. Weights sum to one.
pub trait Outcomes {
    fn choose(&mut self, weights: &[f64]) -> usize;
}

impl<O: Outcomes + ?Sized> Outcomes for &mut O {
    fn choose(&mut self, weights: &[f64]) -> usize {
        (**self).choose(weights)
    }
}

/// Draws outcomes from a seeded generator. Branches with weight at or below
/// the zero-probability threshold are never returned.
#[derive(Debug, Clone)]
pub struct Sampler<R> {
    rng: R,
}

impl<R: Rng> Sampler<R> {
    pub fn new(rng: R) -> Self {
        Sampler { rng }
    }

    pub fn into_inner(self) -> R {
        self.rng
    }
}

impl<R: Rng> Outcomes for Sampler<R> {
    fn choose(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().filter(|&&w| w > ZERO_PROB).sum();
        let mut target = self.rng.random::<f64>() * total;
        let mut last = None;
        for (i, &w) in weights.iter().enumerate() {
            if w <= ZERO_PROB {
                continue;
            }
            if target < w {
                return i;
            }
            target -= w;
            last = Some(i);
        }
        last.expect("at least one branch must have positive weight")
    }
}

/// Picks one of `items` with equal probability.
pub fn choose_uniform<T: Copy, O: Outcomes + ?Sized>(outcomes: &mut O, items: &[T]) -> T {
    let w = 1.0 / items.len() as f64;
    let weights = vec![w; items.len()];
    items[outcomes.choose(&weights)]
}
