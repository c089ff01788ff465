//! Coefficients and heights of cyclotomic polynomials `Φ_n` and of ternary
//! inclusion-exclusion polynomials
//!
//! ```text
//! Q_{p,q,r}(x) = (x^{pqr}-1)(x^p-1)(x^q-1)(x^r-1) / ((x^{pq}-1)(x^{qr}-1)(x^{rp}-1)(x-1))
//! ```
//!
//! Every polynomial is evaluated as a product of `(1 - x^k)^{±1}` factors over
//! a truncated power series whose length is the degree plus one. Each
//! `x^k - 1` equals `-(1 - x^k)`; both the Möbius product for `Φ_n` (n > 1)
//! and `Q` carry as many factors upstairs as downstairs, so the signs cancel.

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{factorize, radical, totient};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::series::{stream_extreme, CoeffSeries, Factor};

/// Pairwise-coprime triple of integers, each greater than 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TernaryTriple {
    p: u64,
    q: u64,
    r: u64,
    #[serde(skip)]
    degree: u64,
}

impl TernaryTriple {
    pub fn new(p: u64, q: u64, r: u64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q), ("r", r)] {
            if v <= 2 {
                return Err(Error::invalid(format!(
                    "{name} = {v} must be greater than 2"
                )));
            }
        }
        for (a, b) in [(p, q), (q, r), (p, r)] {
            let g = a.gcd(&b);
            if g != 1 {
                return Err(Error::invalid(format!(
                    "({a}, {b}) share the factor {g}; parameters must be pairwise coprime"
                )));
            }
        }
        let degree = (p - 1)
            .checked_mul(q - 1)
            .and_then(|d| d.checked_mul(r - 1))
            .ok_or_else(|| Error::ArithmeticOverflow(format!("degree of ({p}, {q}, {r})")))?;
        Ok(TernaryTriple { p, q, r, degree })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn as_array(&self) -> [u64; 3] {
        [self.p, self.q, self.r]
    }

    /// `(p-1)(q-1)(r-1)`
    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// Product `pqr`, when it fits in 64 bits.
    pub fn product(&self) -> Option<u64> {
        self.p.checked_mul(self.q)?.checked_mul(self.r)
    }

    /// Fixed evaluation order: the `x^{pqr}` numerator term is applied last.
    pub fn factors(&self) -> [Factor; 8] {
        let (p, q, r) = (self.p, self.q, self.r);
        [
            Factor::Mul(p),
            Factor::Div(1),
            Factor::Mul(q),
            Factor::Div(p.saturating_mul(q)),
            Factor::Mul(r),
            Factor::Div(q.saturating_mul(r)),
            Factor::Div(r.saturating_mul(p)),
            Factor::Mul(p.saturating_mul(q).saturating_mul(r)),
        ]
    }
}

/// What a height was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    N(u64),
    Triple([u64; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Full coefficient buffer.
    Dense,
    /// Coefficient-by-coefficient scan with ring buffers.
    Streaming,
    /// Conventional value for a degenerate third parameter (1 or 2).
    Convention,
    /// Slow reference polynomial arithmetic.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HeightRecord {
    pub subject: Subject,
    pub height: u64,
    pub degree: u64,
    pub extremal_index: u64,
    pub method: Method,
}

/// Möbius-product factors for `Φ_m`, `m > 1` squarefree, interleaving
/// multiplications and divisions in increasing stride order.
fn mobius_factors(m: u64) -> Vec<Factor> {
    let primes: Vec<u64> = factorize(m).into_iter().map(|(p, _)| p).collect();
    let omega = primes.len();
    let mut muls = Vec::new();
    let mut divs = Vec::new();
    for mask in 0u32..(1 << omega) {
        let d: u64 = (0..omega)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| primes[i])
            .product();
        // μ(m/d) = (-1)^{ω - popcount}
        if (omega - mask.count_ones() as usize) % 2 == 0 {
            muls.push(Factor::Mul(d));
        } else {
            divs.push(Factor::Div(d));
        }
    }
    muls.sort_by_key(|f| f.stride());
    divs.sort_by_key(|f| f.stride());
    muls.into_iter()
        .zip(divs)
        .flat_map(|(a, b)| [a, b])
        .collect()
}

fn checked_len(degree: u64, budget: &Budget, what: &str) -> Result<usize> {
    let len = degree as u128 + 1;
    if len > budget.max_coeffs as u128 {
        return Err(Error::Resource {
            what: what.to_string(),
            needed: len,
            budget: budget.max_coeffs as u128,
        });
    }
    Ok(len as usize)
}

fn dense_product(factors: &[Factor], len: usize) -> Result<CoeffSeries> {
    let mut s = CoeffSeries::one(len)?;
    for &f in factors {
        s.apply(f)?;
    }
    Ok(s)
}

/// Coefficients of `Φ_n`, length `φ(n) + 1`.
///
/// `Φ_rad(n)` is built from its Möbius product and then stretched by
/// `n / rad(n)`.
pub fn phi_coeffs(n: u64, budget: &Budget) -> Result<CoeffSeries> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    checked_len(totient(n), budget, "coefficients of Φ_n")?;
    if n == 1 {
        return CoeffSeries::from_coeffs(vec![-1, 1]);
    }
    let rad = radical(n);
    let base = dense_product(&mobius_factors(rad), totient(rad) as usize + 1)?;
    if rad == n {
        Ok(base)
    } else {
        base.stretch((n / rad) as usize)
    }
}

/// Coefficients of `Q_{p,q,r}`, length `(p-1)(q-1)(r-1) + 1`.
pub fn inclusion_exclusion_coeffs(t: &TernaryTriple, budget: &Budget) -> Result<CoeffSeries> {
    let len = checked_len(t.degree(), budget, "coefficients of Q_{p,q,r}")?;
    dense_product(&t.factors(), len)
}

/// Dense when the series fits the coefficient budget, streaming otherwise.
fn extreme_of_factors(
    factors: &[Factor],
    degree: u64,
    budget: &Budget,
) -> Result<(u64, u64, Method)> {
    if degree < budget.max_coeffs as u64 {
        let s = dense_product(factors, degree as usize + 1)?;
        let (h, i) = s.max_abs();
        return Ok((h, i as u64, Method::Dense));
    }
    if degree > budget.stream_degree_cap {
        return Err(Error::Resource {
            what: "streaming height evaluation (degree)".into(),
            needed: degree as u128,
            budget: budget.stream_degree_cap as u128,
        });
    }
    let ext = stream_extreme(factors, degree + 1, budget.max_coeffs)?;
    Ok((ext.value, ext.index, Method::Streaming))
}

pub fn triple_height(t: &TernaryTriple, budget: &Budget) -> Result<HeightRecord> {
    let (height, idx, method) = extreme_of_factors(&t.factors(), t.degree(), budget)?;
    Ok(HeightRecord {
        subject: Subject::Triple(t.as_array()),
        height,
        degree: t.degree(),
        extremal_index: idx,
        method,
    })
}

/// `A(n)`. Only `Φ_rad(n)` is evaluated; stretching by `n / rad(n)` keeps the
/// coefficients and scales the extremal index.
pub fn n_height(n: u64, budget: &Budget) -> Result<HeightRecord> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let degree = totient(n);
    let (height, idx, method) = if n == 1 {
        (1, 0, Method::Dense)
    } else {
        let rad = radical(n);
        let (h, i, method) = extreme_of_factors(&mobius_factors(rad), totient(rad), budget)?;
        (h, i * (n / rad), method)
    };
    Ok(HeightRecord {
        subject: Subject::N(n),
        height,
        degree,
        extremal_index: idx,
        method,
    })
}

/// `A(p, q, r)` for a raw triple. A single parameter equal to 1 or 2 takes
/// the conventional values `A(p,q,1) = 0` and `A(p,q,2) = 1`.
pub fn height_of_triple(p: u64, q: u64, r: u64, budget: &Budget) -> Result<HeightRecord> {
    let params = [p, q, r];
    let small: Vec<usize> = (0..3).filter(|&i| params[i] <= 2).collect();
    if small.len() == 1 {
        let s = params[small[0]];
        let others: Vec<u64> = (0..3)
            .filter(|&i| i != small[0])
            .map(|i| params[i])
            .collect();
        let (a, b) = (others[0], others[1]);
        if s == 0 {
            return Err(Error::invalid("parameters must be positive"));
        }
        if a <= 2 || b <= 2 || a.gcd(&b) != 1 || a.gcd(&s) != 1 || b.gcd(&s) != 1 {
            return Err(Error::invalid(format!(
                "conventional triple ({p}, {q}, {r}) needs two coprime parameters > 2 coprime to {s}"
            )));
        }
        let (height, degree) = if s == 1 {
            (0, 0)
        } else {
            (1, (a - 1) * (b - 1))
        };
        return Ok(HeightRecord {
            subject: Subject::Triple(params),
            height,
            degree,
            extremal_index: 0,
            method: Method::Convention,
        });
    }
    let t = TernaryTriple::new(p, q, r)?;
    triple_height(&t, budget)
}

pub fn height(subject: Subject, budget: &Budget) -> Result<HeightRecord> {
    match subject {
        Subject::N(n) => n_height(n, budget),
        Subject::Triple([p, q, r]) => height_of_triple(p, q, r, budget),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoreReduction {
    pub n: u64,
    pub core: u64,
    pub height_n: HeightRecord,
    pub height_core: HeightRecord,
    pub same_height: bool,
}

/// Odd part of `rad(n)` (or `rad(n)` itself when that part is 1), together
/// with both heights.
pub fn reduce_to_core(n: u64, budget: &Budget) -> Result<CoreReduction> {
    if n < 3 {
        return Err(Error::invalid(format!(
            "reduce_to_core needs n >= 3, got {n}"
        )));
    }
    let rad = radical(n);
    let odd = rad >> rad.trailing_zeros();
    let core = if odd == 1 { rad } else { odd };
    let height_n = n_height(n, budget)?;
    let height_core = n_height(core, budget)?;
    Ok(CoreReduction {
        n,
        core,
        height_n,
        height_core,
        same_height: height_n.height == height_core.height,
    })
}

/// `c[m] == c[d - m]` for every `m`.
pub fn is_self_reciprocal(s: &CoeffSeries) -> bool {
    let c = s.coeffs();
    c.iter().eq(c.iter().rev())
}

/// Sum of coefficients, i.e. the value at `x = 1`.
pub fn value_at_one(s: &CoeffSeries) -> Option<i64> {
    s.coeffs()
        .iter()
        .try_fold(0i64, |acc, &c| acc.checked_add(c))
}
