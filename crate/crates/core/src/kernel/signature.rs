use crate::{Error, Result};

/// Diagonal `±1` matrix stored as the runs of `-1` on its diagonal.
///
/// Block starts are zero-based. When every `+1` precedes every `-1`,
/// `n_plus` holds the number of leading positive entries and at most one
/// negative block exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    order: usize,
    neg_blocks: Vec<(usize, usize)>,
    n_plus: Option<usize>,
}

impl Signature {
    /// The identity signature of order `n`.
    pub fn identity(n: usize) -> Self {
        Self {
            order: n,
            neg_blocks: Vec::new(),
            n_plus: Some(n),
        }
    }

    /// `n_plus` positive entries followed by `n_minus` negative ones.
    pub fn sorted(n_plus: usize, n_minus: usize) -> Self {
        let neg_blocks = if n_minus > 0 {
            vec![(n_plus, n_minus)]
        } else {
            Vec::new()
        };
        Self {
            order: n_plus + n_minus,
            neg_blocks,
            n_plus: Some(n_plus),
        }
    }

    /// Run-length encodes a vector of `±1` entries.
    pub fn encode(diag: &[i8]) -> Result<Self> {
        let mut neg_blocks: Vec<(usize, usize)> = Vec::new();
        for (i, &d) in diag.iter().enumerate() {
            match d {
                1 => {}
                -1 => match neg_blocks.last_mut() {
                    Some((start, len)) if *start + *len == i => *len += 1,
                    _ => neg_blocks.push((i, 1)),
                },
                other => {
                    return Err(Error::InvalidSignature {
                        index: i,
                        value: other as i64,
                    })
                }
            }
        }
        let order = diag.len();
        let n_plus = match neg_blocks.as_slice() {
            [] => Some(order),
            [(start, len)] if start + len == order => Some(*start),
            _ => None,
        };
        Ok(Self {
            order,
            neg_blocks,
            n_plus,
        })
    }

    pub fn decode(&self) -> Vec<i8> {
        let mut out = vec![1i8; self.order];
        for &(start, len) in &self.neg_blocks {
            out[start..start + len].fill(-1);
        }
        out
    }

    /// Diagonal as `f64` values.
    pub fn to_f64(&self) -> Vec<f64> {
        self.decode().into_iter().map(f64::from).collect()
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn neg_blocks(&self) -> &[(usize, usize)] {
        &self.neg_blocks
    }

    pub fn n_plus(&self) -> Option<usize> {
        self.n_plus
    }

    pub fn is_identity(&self) -> bool {
        self.neg_blocks.is_empty()
    }

    pub fn count_negative(&self) -> usize {
        self.neg_blocks.iter().map(|b| b.1).sum()
    }

    /// Sign of entry `i`.
    pub fn sign(&self, i: usize) -> f64 {
        assert!(i < self.order);
        let neg = self
            .neg_blocks
            .iter()
            .any(|&(start, len)| i >= start && i < start + len);
        if neg {
            -1.0
        } else {
            1.0
        }
    }

    /// Maximal runs of equal sign covering `0..order`, as `(start, len, sign)`.
    pub fn runs(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(2 * self.neg_blocks.len() + 1);
        let mut pos = 0;
        for &(start, len) in &self.neg_blocks {
            if start > pos {
                out.push((pos, start - pos, 1.0));
            }
            out.push((start, len, -1.0));
            pos = start + len;
        }
        if pos < self.order {
            out.push((pos, self.order - pos, 1.0));
        }
        out
    }

    /// Entries `from..order` as a new signature.
    pub fn tail(&self, from: usize) -> Self {
        Self::encode(&self.decode()[from..]).expect("decoded entries are ±1")
    }

    /// Concatenation of several signatures.
    pub fn concat(parts: &[&Signature]) -> Self {
        let diag: Vec<i8> = parts.iter().flat_map(|s| s.decode()).collect();
        Self::encode(&diag).expect("decoded entries are ±1")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_negative_run_is_sorted() {
        let s = Signature::encode(&[1, 1, -1, -1, -1]).unwrap();
        assert_eq!(s.neg_blocks(), &[(2, 3)]);
        assert_eq!(s.n_plus(), Some(2));
    }

    #[test]
    fn all_positive() {
        let s = Signature::encode(&[1; 7]).unwrap();
        assert!(s.neg_blocks().is_empty());
        assert_eq!(s.n_plus(), Some(7));
        assert!(s.is_identity());
    }

    #[test]
    fn alternating_runs_are_unsorted() {
        let s = Signature::encode(&[1, -1, 1, -1]).unwrap();
        assert_eq!(s.neg_blocks(), &[(1, 1), (3, 1)]);
        assert_eq!(s.n_plus(), None);
    }

    #[test]
    fn all_negative_has_zero_leading_positives() {
        let s = Signature::encode(&[-1, -1]).unwrap();
        assert_eq!(s.n_plus(), Some(0));
        assert_eq!(s.neg_blocks(), &[(0, 2)]);
    }

    #[test]
    fn rejects_other_values() {
        assert!(matches!(
            Signature::encode(&[1, 0, -1]),
            Err(Error::InvalidSignature { index: 1, value: 0 })
        ));
    }

    #[test]
    fn runs_cover_everything() {
        let s = Signature::encode(&[-1, 1, 1, -1, -1, 1]).unwrap();
        assert_eq!(
            s.runs(),
            vec![(0, 1, -1.0), (1, 2, 1.0), (3, 2, -1.0), (5, 1, 1.0)]
        );
    }

    proptest! {
        #[test]
        fn encode_decode_roundtrip(bits in proptest::collection::vec(any::<bool>(), 0..1024)) {
            let diag: Vec<i8> = bits.iter().map(|&b| if b { 1 } else { -1 }).collect();
            let s = Signature::encode(&diag).unwrap();
            prop_assert_eq!(s.decode(), diag.clone());
            let sorted = diag.windows(2).all(|w| w[0] >= w[1]);
            prop_assert_eq!(s.n_plus().is_some(), sorted);
            for w in s.neg_blocks().windows(2) {
                prop_assert!(w[0].0 + w[0].1 < w[1].0);
            }
        }
    }
}
