use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Midpoint triples `(t1, (t1 + t2) / 2, t2)` in a range: half on a
/// stratified low-discrepancy pattern, half seeded uniform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleGrid {
    pub range: (f64, f64),
    pub triples: Vec<(f64, f64, f64)>,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

impl TripleGrid {
    pub fn new(lo: f64, hi: f64, count: usize, seed: u64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(domain(format!("triple range [{lo}, {hi}] is empty or not finite")));
        }
        let width = hi - lo;
        let stratified = count / 2;
        let mut triples = Vec::with_capacity(count);
        for k in 0..stratified {
            let u = (k as f64 + 0.5) / stratified as f64;
            let v = (u + 0.5 + GOLDEN * k as f64).fract();
            triples.push(Self::triple(lo + width * u, lo + width * v));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in stratified..count {
            let (a, b) = (rng.random_range(lo..=hi), rng.random_range(lo..=hi));
            triples.push(Self::triple(a, b));
        }
        Ok(TripleGrid {
            range: (lo, hi),
            triples,
        })
    }

    /// Explicit triples; the midpoints are recomputed.
    pub fn from_pairs(range: (f64, f64), pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs
            .iter()
            .any(|(a, b)| *a < range.0 || *a > range.1 || *b < range.0 || *b > range.1)
        {
            return Err(domain("triple outside its declared range"));
        }
        Ok(TripleGrid {
            range,
            triples: pairs.iter().map(|(a, b)| Self::triple(*a, *b)).collect(),
        })
    }

    fn triple(a: f64, b: f64) -> (f64, f64, f64) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        (a, 0.5 * (a + b), b)
    }

    /// Sorted distinct parameter values used by the triples.
    pub fn nodes(&self) -> Vec<f64> {
        let mut nodes: Vec<f64> = self.triples.iter().flat_map(|(a, m, b)| [*a, *m, *b]).collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        nodes
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoints_exact_and_in_range() {
        let g = TripleGrid::new(0.25, 4.0, 50, 1).unwrap();
        assert_eq!(g.len(), 50);
        for (a, m, b) in &g.triples {
            assert_eq!(*m, 0.5 * (a + b));
            assert!(*a >= 0.25 && *b <= 4.0 && a <= b);
        }
        assert_eq!(g, TripleGrid::new(0.25, 4.0, 50, 1).unwrap());
        assert!(TripleGrid::new(1.0, 1.0, 3, 0).is_err());
    }
}
