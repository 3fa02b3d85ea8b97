use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    /// Modified modulus: quasi-cyclic, `n` steps.
    Mm,
    /// Mantharam-Eberlein: cyclic, `n - 1` steps.
    Me,
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mm" => Ok(Self::Mm),
            "me" => Ok(Self::Me),
            _ => Err(Error::Config(format!("unknown strategy {s:?}, expected mm or me"))),
        }
    }
}

/// A parallel ordering: each step is a list of disjoint pairs `(p, q)`, `p < q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub n: usize,
    pub kind: StrategyKind,
    pub steps: Vec<Vec<(usize, usize)>>,
}

impl Strategy {
    pub fn new(kind: StrategyKind, n: usize) -> Result<Self> {
        match kind {
            StrategyKind::Mm => strategy_mm(n),
            StrategyKind::Me => strategy_me(n),
        }
    }

    /// `kind`, or MM when `kind` cannot be built for this order.
    pub fn with_fallback(kind: StrategyKind, n: usize) -> Result<Self> {
        match Self::new(kind, n) {
            Err(Error::UnsupportedStrategy(_)) => {
                log::warn!("ME ordering unavailable for n = {n}; using MM");
                strategy_mm(n)
            }
            other => other,
        }
    }
}

fn check_even(n: usize) -> Result<()> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::OddOrder(n));
    }
    Ok(())
}

/// Step `k` pairs every `i < j` with `i + j = k (mod n)`; on even steps the
/// two self-paired indices `k/2` and `k/2 + n/2` are paired with each other.
/// Order 2 has a single pair and gets a single step.
pub fn strategy_mm(n: usize) -> Result<Strategy> {
    check_even(n)?;
    if n == 2 {
        return Ok(Strategy { n, kind: StrategyKind::Mm, steps: vec![vec![(0, 1)]] });
    }
    let half = n / 2;
    let steps = (0..n)
        .map(|k| {
            let mut step: Vec<(usize, usize)> = (0..n)
                .filter_map(|i| {
                    let j = (k + n - i) % n;
                    (i < j).then_some((i, j))
                })
                .collect();
            if k % 2 == 0 {
                let a = k / 2;
                step.push((a, a + half));
            }
            step.sort_unstable();
            step
        })
        .collect();
    Ok(Strategy { n, kind: StrategyKind::Mm, steps })
}

/// Recursive butterfly: all cross pairs between the two halves in `n/2`
/// cyclically shifted steps, followed by both halves in lockstep.
/// Requires `n` to be a power of two.
pub fn strategy_me(n: usize) -> Result<Strategy> {
    check_even(n)?;
    if !n.is_power_of_two() {
        return Err(Error::UnsupportedStrategy(n));
    }
    fn build(base: usize, n: usize) -> Vec<Vec<(usize, usize)>> {
        if n == 2 {
            return vec![vec![(base, base + 1)]];
        }
        let h = n / 2;
        let mut steps: Vec<Vec<(usize, usize)>> = (0..h)
            .map(|s| (0..h).map(|i| (base + i, base + h + (i + s) % h)).collect())
            .collect();
        let lo = build(base, h);
        let hi = build(base + h, h);
        for (a, b) in lo.into_iter().zip(hi) {
            steps.push(a.into_iter().chain(b).collect());
        }
        steps
    }
    Ok(Strategy { n, kind: StrategyKind::Me, steps: build(0, n) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(s: &Strategy) {
        let n = s.n;
        let mut seen = vec![0u32; n * n];
        for step in &s.steps {
            let mut used = vec![false; n];
            for &(p, q) in step {
                assert!(p < q && q < n);
                assert!(!used[p] && !used[q], "index reused within a step");
                used[p] = true;
                used[q] = true;
                seen[p * n + q] += 1;
            }
            assert_eq!(step.len(), n / 2);
        }
        for p in 0..n {
            for q in p + 1..n {
                assert!(seen[p * n + q] >= 1, "pair ({p},{q}) missing for n={n}");
            }
        }
    }

    #[test]
    fn order_two() {
        for kind in [StrategyKind::Mm, StrategyKind::Me] {
            let s = Strategy::new(kind, 2).unwrap();
            assert_eq!(s.steps, vec![vec![(0, 1)]]);
        }
    }

    #[test]
    fn me_four_covers_each_pair_once() {
        let s = strategy_me(4).unwrap();
        assert_eq!(s.steps.len(), 3);
        let mut all: Vec<_> = s.steps.concat();
        all.sort_unstable();
        assert_eq!(all, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn mm_four() {
        let s = strategy_mm(4).unwrap();
        assert_eq!(s.steps.len(), 4);
        check(&s);
    }

    #[test]
    fn exhaustive_coverage_up_to_256() {
        for n in (2..=256).step_by(2) {
            let mm = strategy_mm(n).unwrap();
            assert_eq!(mm.steps.len(), if n == 2 { 1 } else { n });
            check(&mm);
            match strategy_me(n) {
                Ok(me) => {
                    assert!(n.is_power_of_two());
                    assert_eq!(me.steps.len(), n - 1);
                    check(&me);
                    let total: usize = me.steps.iter().map(Vec::len).sum();
                    assert_eq!(total, n * (n - 1) / 2);
                }
                Err(e) => assert!(matches!(e, Error::UnsupportedStrategy(m) if m == n)),
            }
        }
    }

    #[test]
    fn odd_order_is_rejected_and_fallback_works() {
        assert!(matches!(strategy_mm(5), Err(Error::OddOrder(5))));
        let s = Strategy::with_fallback(StrategyKind::Me, 12).unwrap();
        assert_eq!(s.kind, StrategyKind::Mm);
    }
}
