//! Dense truncated integer power series, restricted to the two operations the
//! cyclotomic pipelines need: multiplication and division by `1 - x^k`.
//!
//! Both operations are a single strided pass over the buffer. Multiplication
//! is a backward difference `s[m] - s[m-k]`; division is the formal inverse,
//! a cumulative sum with stride `k`. All updates use checked arithmetic and a
//! failing update reports the coefficient index.
//!
//! [`stream_extreme`] evaluates the same factor sequence one coefficient at a
//! time with per-factor ring buffers, so a height can be found without ever
//! holding the full series.

use serde::Serialize;

use crate::error::{Error, Result};

/// One binomial factor `(1 - x^k)` applied to a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Factor {
    /// Multiply by `1 - x^k`.
    Mul(u64),
    /// Divide by `1 - x^k`.
    Div(u64),
}

impl Factor {
    pub fn stride(self) -> u64 {
        match self {
            Factor::Mul(k) | Factor::Div(k) => k,
        }
    }
}

/// Truncated power series with `i64` coefficients; index `m` holds the
/// coefficient of `x^m`. The truncation length is fixed at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffSeries {
    coeffs: Vec<i64>,
}

impl CoeffSeries {
    /// The constant series `1` truncated to `truncation_len` terms.
    pub fn one(truncation_len: usize) -> Result<Self> {
        if truncation_len == 0 {
            return Err(Error::invalid("truncation length must be at least 1"));
        }
        let mut coeffs = vec![0i64; truncation_len];
        coeffs[0] = 1;
        Ok(CoeffSeries { coeffs })
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("a series needs at least one coefficient"));
        }
        Ok(CoeffSeries { coeffs })
    }

    pub fn truncation_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<i64> {
        self.coeffs
    }

    pub fn mul_binomial(mut self, k: u64) -> Result<Self> {
        self.mul_binomial_in_place(k)?;
        Ok(self)
    }

    pub fn div_binomial(mut self, k: u64) -> Result<Self> {
        self.div_binomial_in_place(k)?;
        Ok(self)
    }

    pub fn apply(&mut self, factor: Factor) -> Result<()> {
        match factor {
            Factor::Mul(k) => self.mul_binomial_in_place(k),
            Factor::Div(k) => self.div_binomial_in_place(k),
        }
    }

    /// `s[m] <- s[m] - s[m-k]`, walking downwards so every read sees the
    /// original value. On error the buffer is left partially updated.
    pub fn mul_binomial_in_place(&mut self, k: u64) -> Result<()> {
        let k = check_stride(k)?;
        let len = self.coeffs.len();
        if k >= len {
            return Ok(());
        }
        for m in (k..len).rev() {
            let lower = self.coeffs[m - k];
            self.coeffs[m] = self.coeffs[m]
                .checked_sub(lower)
                .ok_or_else(|| overflow(m, "multiply by 1 - x^k", k))?;
        }
        Ok(())
    }

    /// `s[m] <- s[m] + s[m-k]` walking upwards, i.e. division by `1 - x^k`.
    pub fn div_binomial_in_place(&mut self, k: u64) -> Result<()> {
        let k = check_stride(k)?;
        let len = self.coeffs.len();
        if k >= len {
            return Ok(());
        }
        for m in k..len {
            let lower = self.coeffs[m - k];
            self.coeffs[m] = self.coeffs[m]
                .checked_add(lower)
                .ok_or_else(|| overflow(m, "divide by 1 - x^k", k))?;
        }
        Ok(())
    }

    /// Largest absolute coefficient and the first index attaining it.
    pub fn max_abs(&self) -> (u64, usize) {
        let mut best = (0u64, 0usize);
        for (m, &c) in self.coeffs.iter().enumerate() {
            let a = c.unsigned_abs();
            if a > best.0 {
                best = (a, m);
            }
        }
        best
    }

    /// Replaces `x` by `x^stride`, growing the truncation length to
    /// `(len - 1) * stride + 1`.
    pub fn stretch(&self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::invalid("stretch factor must be positive"));
        }
        let len = (self.coeffs.len() - 1)
            .checked_mul(stride)
            .and_then(|d| d.checked_add(1))
            .ok_or_else(|| Error::ArithmeticOverflow("stretched length".into()))?;
        let mut coeffs = vec![0i64; len];
        for (m, &c) in self.coeffs.iter().enumerate() {
            coeffs[m * stride] = c;
        }
        Ok(CoeffSeries { coeffs })
    }

    /// Substitutes `x -> -x`.
    pub fn negate_argument(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| if m % 2 == 1 { -c } else { c })
            .collect();
        CoeffSeries { coeffs }
    }
}

fn check_stride(k: u64) -> Result<usize> {
    if k == 0 {
        return Err(Error::invalid("binomial stride must be at least 1"));
    }
    // Strides beyond the address space act as the identity on any buffer.
    Ok(usize::try_from(k).unwrap_or(usize::MAX))
}

fn overflow(index: usize, op: &str, k: usize) -> Error {
    Error::Overflow {
        index,
        context: format!("{op} with k = {k}"),
    }
}

/// Result of a streaming scan over a factor product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StreamExtreme {
    pub value: u64,
    pub index: u64,
    /// Number of coefficients held by the ring buffers.
    pub ring_len: u64,
}

struct Stage {
    divide: bool,
    ring: Vec<i64>,
    pos: usize,
    stride: u64,
}

/// Walks the coefficients `0..len` of `prod(factors)` applied to `1`, in
/// order, handing each to `visit`. Memory is the sum of the strides that are
/// shorter than `len`, which must not exceed `max_ring`.
pub fn stream_coeffs<F>(factors: &[Factor], len: u64, max_ring: usize, mut visit: F) -> Result<u64>
where
    F: FnMut(u64, i64),
{
    if len == 0 {
        return Err(Error::invalid("truncation length must be at least 1"));
    }
    let mut ring_total: u128 = 0;
    for f in factors {
        if f.stride() == 0 {
            return Err(Error::invalid("binomial stride must be at least 1"));
        }
        if f.stride() < len {
            ring_total += f.stride() as u128;
        }
    }
    if ring_total > max_ring as u128 {
        return Err(Error::Resource {
            what: "streaming ring buffers".into(),
            needed: ring_total,
            budget: max_ring as u128,
        });
    }

    let mut stages: Vec<Stage> = factors
        .iter()
        .filter(|f| f.stride() < len)
        .map(|&f| Stage {
            divide: matches!(f, Factor::Div(_)),
            ring: vec![0i64; f.stride() as usize],
            pos: 0,
            stride: f.stride(),
        })
        .collect();

    for m in 0..len {
        let mut v: i64 = if m == 0 { 1 } else { 0 };
        for stage in stages.iter_mut() {
            let held = stage.ring[stage.pos];
            if stage.divide {
                // ring holds this stage's own output from m - k
                v = v.checked_add(held).ok_or_else(|| Error::Overflow {
                    index: m as usize,
                    context: format!("streaming divide by 1 - x^{}", stage.stride),
                })?;
                stage.ring[stage.pos] = v;
            } else {
                // ring holds this stage's input from m - k
                let input = v;
                v = v.checked_sub(held).ok_or_else(|| Error::Overflow {
                    index: m as usize,
                    context: format!("streaming multiply by 1 - x^{}", stage.stride),
                })?;
                stage.ring[stage.pos] = input;
            }
            stage.pos += 1;
            if stage.pos == stage.ring.len() {
                stage.pos = 0;
            }
        }
        visit(m, v);
    }
    Ok(ring_total as u64)
}

/// Largest absolute coefficient of `prod(factors)` truncated to `len` terms,
/// computed without materialising the series.
pub fn stream_extreme(factors: &[Factor], len: u64, max_ring: usize) -> Result<StreamExtreme> {
    let mut value = 0u64;
    let mut index = 0u64;
    let ring_len = stream_coeffs(factors, len, max_ring, |m, c| {
        let a = c.unsigned_abs();
        if a > value {
            value = a;
            index = m;
        }
    })?;
    Ok(StreamExtreme {
        value,
        index,
        ring_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(v: &[i64]) -> CoeffSeries {
        CoeffSeries::from_coeffs(v.to_vec()).unwrap()
    }

    /// Multiplies by `1 - x^k` through a plain convolution with the
    /// two-term polynomial, independent of the strided kernels.
    fn convolve_binomial(s: &[i64], k: usize) -> Vec<i64> {
        let factor: Vec<(usize, i64)> = vec![(0, 1), (k, -1)];
        let mut out = vec![0i64; s.len()];
        for (i, &a) in s.iter().enumerate() {
            for &(j, b) in &factor {
                if i + j < s.len() {
                    out[i + j] += a * b;
                }
            }
        }
        out
    }

    #[test]
    fn one_examples() {
        assert_eq!(CoeffSeries::one(4).unwrap().coeffs(), &[1, 0, 0, 0]);
        assert_eq!(CoeffSeries::one(1).unwrap().coeffs(), &[1]);
        let s = CoeffSeries::one(49).unwrap();
        assert_eq!(s.truncation_len(), 49);
        assert!(matches!(
            CoeffSeries::one(0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(
            series(&[1, 1, 1, 1]).mul_binomial(2).unwrap().coeffs(),
            &[1, 1, 0, 0]
        );
        assert_eq!(
            series(&[1, 0, 0, 0]).mul_binomial(1).unwrap().coeffs(),
            &[1, -1, 0, 0]
        );
    }

    #[test]
    fn div_examples() {
        assert_eq!(
            series(&[1, 0, 0, 0, 0]).div_binomial(1).unwrap().coeffs(),
            &[1, 1, 1, 1, 1]
        );
        assert_eq!(
            series(&[1, -1, 0, 0]).div_binomial(1).unwrap().coeffs(),
            &[1, 0, 0, 0]
        );
        assert_eq!(
            series(&[1, 0, 0, 0, 0, 0, 0])
                .div_binomial(3)
                .unwrap()
                .coeffs(),
            &[1, 0, 0, 1, 0, 0, 1]
        );
    }

    #[test]
    fn zero_stride_rejected() {
        assert!(matches!(
            series(&[1]).mul_binomial(0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            series(&[1]).div_binomial(0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn stride_longer_than_buffer_is_identity() {
        let s = series(&[3, -1, 4]);
        assert_eq!(s.clone().mul_binomial(3).unwrap(), s);
        assert_eq!(s.clone().div_binomial(u64::MAX).unwrap(), s);
    }

    #[test]
    fn overflow_names_index() {
        let s = series(&[i64::MAX, 0, 1]);
        match s.div_binomial(2) {
            Err(Error::Overflow { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected overflow, got {other:?}"),
        }
        let s = series(&[i64::MAX, i64::MIN]);
        match s.mul_binomial(1) {
            Err(Error::Overflow { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn max_abs_examples() {
        assert_eq!(series(&[1, 1, 1]).max_abs(), (1, 0));
        assert_eq!(series(&[0]).max_abs(), (0, 0));
        assert_eq!(series(&[0, -3, 3, 1]).max_abs(), (3, 1));
    }

    #[test]
    fn stretch_and_negate() {
        let s = series(&[1, 1, 1]);
        assert_eq!(s.stretch(2).unwrap().coeffs(), &[1, 0, 1, 0, 1]);
        assert_eq!(s.negate_argument().coeffs(), &[1, -1, 1]);
    }

    #[test]
    fn streaming_matches_dense() {
        let factors = [
            Factor::Mul(3),
            Factor::Div(1),
            Factor::Mul(5),
            Factor::Div(15),
            Factor::Mul(7),
            Factor::Div(35),
            Factor::Div(21),
            Factor::Mul(105),
        ];
        let mut dense = CoeffSeries::one(49).unwrap();
        for f in factors {
            dense.apply(f).unwrap();
        }
        let mut streamed = Vec::new();
        stream_coeffs(&factors, 49, 1000, |_, c| streamed.push(c)).unwrap();
        assert_eq!(streamed, dense.coeffs());
        let ext = stream_extreme(&factors, 49, 1000).unwrap();
        assert_eq!((ext.value, ext.index as usize), dense.max_abs());
    }

    #[test]
    fn streaming_ring_budget() {
        let factors = [Factor::Div(10), Factor::Mul(20)];
        assert!(matches!(
            stream_extreme(&factors, 100, 29),
            Err(Error::Resource { needed: 30, .. })
        ));
        // strides past the truncation need no memory
        assert!(stream_extreme(&factors, 15, 10).is_ok());
    }

    fn small_series() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(0i64..1000, 1..64)
    }

    proptest! {
        #[test]
        fn mul_matches_convolution(s in small_series(), k in 1usize..70) {
            let got = series(&s).mul_binomial(k as u64).unwrap();
            let expected = convolve_binomial(&s, k);
            prop_assert_eq!(got.coeffs(), expected.as_slice());
        }

        #[test]
        fn round_trips(s in small_series(), k in 1u64..70) {
            let a = series(&s);
            prop_assert_eq!(a.clone().div_binomial(k).unwrap().mul_binomial(k).unwrap(), a.clone());
            prop_assert_eq!(a.clone().mul_binomial(k).unwrap().div_binomial(k).unwrap(), a);
        }

        #[test]
        fn distinct_strides_commute(s in small_series(), k1 in 1u64..40, k2 in 1u64..40, mul1: bool, mul2: bool) {
            let f = |k, mul| if mul { Factor::Mul(k) } else { Factor::Div(k) };
            let mut a = series(&s);
            a.apply(f(k1, mul1)).unwrap();
            a.apply(f(k2, mul2)).unwrap();
            let mut b = series(&s);
            b.apply(f(k2, mul2)).unwrap();
            b.apply(f(k1, mul1)).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
