//! Slow reference implementation with no code shared with [`crate::series`]
//! or [`crate::cyclo`]: plain integer polynomials, schoolbook products, and
//! top-down exact long division.
//!
//! `Φ_n` comes from dividing `x^n - 1` by every `Φ_d` with `d | n, d < n`;
//! `Q_{p,q,r}` from forming the full numerator product and dividing out the
//! four denominator binomials. Every division must leave a zero remainder.

use std::collections::HashMap;

use crate::cyclo::{HeightRecord, Method, Subject, TernaryTriple};
use crate::error::{Error, Result};

pub const MAX_ORACLE_N: u64 = 100_000;
pub const MAX_ORACLE_PRODUCT: u64 = 1_000_000;

/// Integer polynomial, lowest degree first, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DensePoly {
    coeffs: Vec<i64>,
}

impl DensePoly {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        DensePoly { coeffs }
    }

    pub fn zero() -> Self {
        DensePoly { coeffs: Vec::new() }
    }

    /// `x^k - 1`
    pub fn x_pow_minus_one(k: usize) -> Self {
        let mut coeffs = vec![0i64; k + 1];
        coeffs[0] = -1;
        coeffs[k] += 1;
        DensePoly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn height(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &DensePoly) -> Result<DensePoly> {
        if self.is_zero() || other.is_zero() {
            return Ok(DensePoly::zero());
        }
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        let rhs: Vec<(usize, i64)> = nonzero_terms(&other.coeffs);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for &(j, b) in &rhs {
                let term = a.checked_mul(b).ok_or_else(|| mul_overflow(i + j))?;
                out[i + j] = out[i + j]
                    .checked_add(term)
                    .ok_or_else(|| mul_overflow(i + j))?;
            }
        }
        Ok(DensePoly::new(out))
    }

    /// Long division from the leading term down. The divisor's leading
    /// coefficient must divide every intermediate leading coefficient.
    pub fn div_rem(&self, divisor: &DensePoly) -> Result<(DensePoly, DensePoly)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::invalid("division by the zero polynomial"))?;
        let lead = divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((DensePoly::zero(), self.clone()));
        }
        let mut quot = vec![0i64; rem.len() - dd];
        let lower: Vec<(usize, i64)> = nonzero_terms(&divisor.coeffs[..dd]);
        for top in (dd..rem.len()).rev() {
            let c = rem[top];
            if c == 0 {
                continue;
            }
            if c % lead != 0 {
                return Err(Error::Internal(format!(
                    "inexact division: leading coefficient {lead} does not divide {c}"
                )));
            }
            let qc = c / lead;
            let shift = top - dd;
            quot[shift] = qc;
            rem[top] = 0;
            for &(j, b) in &lower {
                let term = qc.checked_mul(b).ok_or_else(|| div_overflow(shift + j))?;
                rem[shift + j] = rem[shift + j]
                    .checked_sub(term)
                    .ok_or_else(|| div_overflow(shift + j))?;
            }
        }
        Ok((DensePoly::new(quot), DensePoly::new(rem)))
    }

    /// Quotient of a division that must be exact.
    pub fn exact_div(&self, divisor: &DensePoly) -> Result<DensePoly> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::Internal(format!(
                "nonzero remainder of degree {:?} in exact division",
                r.degree()
            )));
        }
        Ok(q)
    }
}

fn nonzero_terms(c: &[i64]) -> Vec<(usize, i64)> {
    c.iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(i, &v)| (i, v))
        .collect()
}

fn mul_overflow(index: usize) -> Error {
    Error::Overflow {
        index,
        context: "oracle polynomial product".into(),
    }
}

fn div_overflow(index: usize) -> Error {
    Error::Overflow {
        index,
        context: "oracle long division".into(),
    }
}

/// Memoising `Φ_n` evaluator for bulk comparisons.
#[derive(Debug, Default)]
pub struct PhiOracle {
    cache: HashMap<u64, DensePoly>,
}

impl PhiOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn phi(&mut self, n: u64) -> Result<DensePoly> {
        if n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if n > MAX_ORACLE_N {
            return Err(Error::Resource {
                what: "oracle Φ_n".into(),
                needed: n as u128,
                budget: MAX_ORACLE_N as u128,
            });
        }
        if let Some(p) = self.cache.get(&n) {
            return Ok(p.clone());
        }
        let mut acc = DensePoly::x_pow_minus_one(n as usize);
        for d in (1..n).filter(|d| n % d == 0) {
            let phi_d = self.phi(d)?;
            acc = acc.exact_div(&phi_d)?;
        }
        self.cache.insert(n, acc.clone());
        Ok(acc)
    }
}

pub fn oracle_phi(n: u64) -> Result<DensePoly> {
    PhiOracle::new().phi(n)
}

pub fn oracle_inclusion_exclusion(t: &TernaryTriple) -> Result<DensePoly> {
    let (p, q, r) = (t.p() as usize, t.q() as usize, t.r() as usize);
    let product = t
        .product()
        .filter(|&n| n <= MAX_ORACLE_PRODUCT)
        .ok_or(Error::Resource {
            what: "oracle Q_{p,q,r} (pqr)".into(),
            needed: (t.p() as u128) * (t.q() as u128) * (t.r() as u128),
            budget: MAX_ORACLE_PRODUCT as u128,
        })? as usize;

    let mut num = DensePoly::x_pow_minus_one(p);
    for k in [q, r, product] {
        num = num.mul(&DensePoly::x_pow_minus_one(k))?;
    }
    for k in [p * q, q * r, r * p, 1] {
        num = num.exact_div(&DensePoly::x_pow_minus_one(k))?;
    }
    Ok(num)
}

/// Polynomial and height record for `Φ_n` or `Q_{p,q,r}`, entirely from the
/// oracle. Conventional triples have no polynomial and are rejected.
pub fn oracle_record(subject: Subject) -> Result<(HeightRecord, DensePoly)> {
    let poly = match subject {
        Subject::N(n) => oracle_phi(n)?,
        Subject::Triple([p, q, r]) => oracle_inclusion_exclusion(&TernaryTriple::new(p, q, r)?)?,
    };
    let height = poly.height();
    let extremal_index = poly
        .coeffs()
        .iter()
        .position(|c| c.unsigned_abs() == height)
        .unwrap_or(0) as u64;
    let rec = HeightRecord {
        subject,
        height,
        degree: poly.degree().unwrap_or(0) as u64,
        extremal_index,
        method: Method::Oracle,
    };
    Ok((rec, poly))
}
