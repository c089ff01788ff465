//! Explicit constructions of triples with known or bracketed heights.
//!
//! * [`lemma1_triple`] and [`lemma4_triple`]: triples of height `(p+1)/2`.
//! * [`lemma2_range`]: the interval of heights reachable from a prime `p`.
//! * [`theorem1_witness`]: for a target `h`, primes `q, r, p` with
//!   `q ≡ 2 (mod p')`, `r ≡ (p'q+1)/2 (mod p'q)`, `p ≡ p' (mod qr)` where
//!   `p' = 2h - 1`; the height is then `h` or `h + 1`.
//! * [`jump_sequence`], [`jump_probe`], [`prime_chain`]: replacing the
//!   smallest parameter `s` by something congruent to it modulo the product
//!   of the other two moves the height by 0 or 1.
//! * [`explore_m`]: exhaustive heights for a fixed `p` over a box of `(q, r)`.
//!
//! Every prime search takes the smallest admissible candidate and runs under
//! an explicit cap.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Budget;
use crate::cyclo::{height_of_triple, triple_height, HeightRecord, Method, TernaryTriple};
use crate::error::{Error, Result};
use crate::primes::{is_prime, next_prime_in_ap, small_primes, APQuery};

/// Optional value caps for the three prime searches. `None` derives a cap
/// from [`Budget::ap_steps`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchCaps {
    pub q_cap: Option<u64>,
    pub r_cap: Option<u64>,
    pub p_cap: Option<u64>,
}

/// The caps actually applied, echoed into certificates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CapsUsed {
    pub q_cap: u64,
    pub r_cap: u64,
    /// `None` when `p = p'` was taken without a search.
    pub p_cap: Option<u64>,
}

fn search(
    residue: u64,
    modulus: u64,
    lower_bound: u64,
    cap: Option<u64>,
    budget: &Budget,
    stage: &str,
) -> Result<(u64, u64)> {
    let cap = cap.unwrap_or_else(|| budget.ap_cap(lower_bound, modulus));
    let q = APQuery::new(residue, modulus, lower_bound, cap);
    next_prime_in_ap(&q)
        .map(|p| (p, cap))
        .map_err(|e| e.at_stage(stage))
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    Ok(())
}

fn mul(a: u64, b: u64, what: &str) -> Result<u64> {
    a.checked_mul(b)
        .ok_or_else(|| Error::ArithmeticOverflow(format!("{what}: {a} * {b}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassSign {
    /// `r ≡ (pq+1)/2 (mod pq)`
    Plus,
    /// `r ≡ (pq-1)/2 (mod pq)`
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lemma1Triple {
    pub triple: TernaryTriple,
    pub sign: ClassSign,
    pub predicted_height: u64,
}

/// Smallest prime `q > p` with `q ≡ 2 (mod p)`, then the smallest prime
/// `r > pq` in either class `(pq ± 1)/2 (mod pq)`.
pub fn lemma1_triple(
    p: u64,
    q_cap: Option<u64>,
    r_cap: Option<u64>,
    budget: &Budget,
) -> Result<Lemma1Triple> {
    require_odd_prime(p)?;
    let (q, _) = search(2, p, p, q_cap, budget, "lemma1 q")?;
    let pq = mul(p, q, "lemma1 modulus")?;
    let plus = search((pq + 1) / 2, pq, pq, r_cap, budget, "lemma1 r");
    let minus = search((pq - 1) / 2, pq, pq, r_cap, budget, "lemma1 r");
    let (r, sign) = match (plus, minus) {
        (Ok((a, _)), Ok((b, _))) if b < a => (b, ClassSign::Minus),
        (Ok((a, _)), _) => (a, ClassSign::Plus),
        (Err(_), Ok((b, _))) => (b, ClassSign::Minus),
        (Err(e), Err(_)) => return Err(e),
    };
    Ok(Lemma1Triple {
        triple: TernaryTriple::new(p, q, r)?,
        sign,
        predicted_height: (p + 1) / 2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lemma4Triple {
    pub triple: TernaryTriple,
    pub k: u64,
    pub l: u64,
    pub predicted_height: u64,
}

/// `q = 2 + (2k+1)p`, `r = (pq+1)/2 + l·pq` for odd `p >= 3` (not
/// necessarily prime).
pub fn lemma4_triple(p: u64, k: u64, l: u64) -> Result<Lemma4Triple> {
    if p < 3 || p % 2 == 0 {
        return Err(Error::invalid(format!(
            "p = {p} must be odd and at least 3"
        )));
    }
    let q = k
        .checked_mul(2)
        .and_then(|v| v.checked_add(1))
        .and_then(|v| v.checked_mul(p))
        .and_then(|v| v.checked_add(2))
        .ok_or_else(|| Error::ArithmeticOverflow("lemma4 q".into()))?;
    let pq = mul(p, q, "lemma4 pq")?;
    let r = l
        .checked_mul(pq)
        .and_then(|v| v.checked_add(pq / 2 + 1))
        .ok_or_else(|| Error::ArithmeticOverflow("lemma4 r".into()))?;
    Ok(Lemma4Triple {
        triple: TernaryTriple::new(p, q, r)?,
        k,
        l,
        predicted_height: (p + 1) / 2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma2Range {
    pub p: u64,
    /// Larger root of `4x^2 + 2x + 3 - p`, for display only.
    pub x_p: f64,
    pub h_min: u64,
    pub h_max: u64,
    pub heights: Vec<u64>,
}

/// Heights `(p+1)/2 <= h <= (p+1)/2 + x_p` with
/// `x_p = (sqrt(4p - 11) - 1) / 4`. The floor of `x_p` is taken in integers:
/// `floor(x_p) = (isqrt(4p - 11) - 1) / 4`.
pub fn lemma2_range(p: u64) -> Result<Lemma2Range> {
    require_odd_prime(p)?;
    let disc = p
        .checked_mul(4)
        .ok_or_else(|| Error::ArithmeticOverflow("4p - 11".into()))?
        - 11;
    let s = disc.isqrt();
    let floor_x = (s - 1) / 4;
    let h_min = (p + 1) / 2;
    let h_max = h_min + floor_x;
    Ok(Lemma2Range {
        p,
        x_p: ((disc as f64).sqrt() - 1.0) / 4.0,
        h_min,
        h_max,
        heights: (h_min..=h_max).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WitnessCase {
    ExactH,
    HPlusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WitnessCertificate {
    pub target_h: u64,
    pub p_prime: u64,
    pub q: u64,
    pub r: u64,
    pub p: u64,
    pub computed_height: u64,
    pub case: WitnessCase,
    pub strict_larger_p: bool,
    pub search_caps_used: CapsUsed,
    pub degree: u64,
    pub method: Method,
}

impl WitnessCertificate {
    /// Recomputes the three congruences and the height from scratch.
    pub fn verify(&self, budget: &Budget) -> Result<()> {
        let pp = self.p_prime;
        let fail = |what: &str| Err(Error::Internal(format!("certificate check failed: {what}")));
        if pp != 2 * self.target_h - 1 {
            return fail("p' != 2h - 1");
        }
        for v in [self.p, self.q, self.r] {
            if v < 3 || !is_prime(v) {
                return fail("parameter is not an odd prime");
            }
        }
        if self.q % pp != 2 % pp {
            return fail("q mod p'");
        }
        let ppq = pp as u128 * self.q as u128;
        if self.r as u128 % ppq != (ppq + 1) / 2 % ppq {
            return fail("r mod p'q");
        }
        let qr = self.q as u128 * self.r as u128;
        if self.p as u128 % qr != pp as u128 % qr {
            return fail("p mod qr");
        }
        let rec = height_of_triple(self.p, self.q, self.r, budget)?;
        if rec.height != self.computed_height {
            return fail("recomputed height differs");
        }
        if rec.height != self.target_h && rec.height != self.target_h + 1 {
            return fail("height outside {h, h+1}");
        }
        Ok(())
    }
}

struct WitnessPrimes {
    p_prime: u64,
    q: u64,
    r: u64,
    caps: CapsUsed,
}

fn theorem1_qr(h: u64, caps: &SearchCaps, budget: &Budget) -> Result<WitnessPrimes> {
    if h == 0 {
        return Err(Error::invalid("target height must be positive"));
    }
    let p_prime = h
        .checked_mul(2)
        .map(|v| v - 1)
        .ok_or_else(|| Error::ArithmeticOverflow("2h - 1".into()))?;
    // q odd prime with q ≡ 2 (mod p'), hence of the form 2 + (2k+1)p'
    let (q, q_cap) = search(
        2 % p_prime,
        p_prime,
        p_prime + 1,
        caps.q_cap,
        budget,
        "witness q",
    )?;
    let ppq = mul(p_prime, q, "p'q")?;
    let class = ppq / 2 + 1;
    // r ≥ (p'q+1)/2 and odd
    let (r, r_cap) = search(
        class,
        ppq,
        (class - 1).max(2),
        caps.r_cap,
        budget,
        "witness r",
    )?;
    Ok(WitnessPrimes {
        p_prime,
        q,
        r,
        caps: CapsUsed {
            q_cap,
            r_cap,
            p_cap: None,
        },
    })
}

/// Builds and certifies a triple with height `h` or `h + 1`.
///
/// `q`, `r`, `p` are chosen in that order, each minimal. When `p' = 2h - 1`
/// is itself prime and `strict_larger_p` is false, `p = p'`. For `h = 1`,
/// `p ≡ 1 (mod qr)` forces height 1.
pub fn theorem1_witness(
    h: u64,
    strict_larger_p: bool,
    caps: &SearchCaps,
    budget: &Budget,
) -> Result<WitnessCertificate> {
    let WitnessPrimes {
        p_prime,
        q,
        r,
        caps: mut used,
    } = theorem1_qr(h, caps, budget)?;
    let qr = mul(q, r, "qr")?;
    let p = if is_prime(p_prime) && p_prime > 2 && !strict_larger_p {
        p_prime
    } else {
        let (p, cap) = search(p_prime % qr, qr, p_prime, caps.p_cap, budget, "witness p")?;
        used.p_cap = Some(cap);
        p
    };
    let mut sorted = [p, q, r];
    sorted.sort_unstable();
    let rec: HeightRecord = height_of_triple(sorted[0], sorted[1], sorted[2], budget)?;
    let case = if rec.height == h {
        WitnessCase::ExactH
    } else if rec.height == h + 1 {
        WitnessCase::HPlusOne
    } else {
        return Err(Error::Internal(format!(
            "height {} of ({p}, {q}, {r}) is outside {{{h}, {}}}",
            rec.height,
            h + 1
        )));
    };
    Ok(WitnessCertificate {
        target_h: h,
        p_prime,
        q,
        r,
        p,
        computed_height: rec.height,
        case,
        strict_larger_p,
        search_caps_used: used,
        degree: rec.degree,
        method: rec.method,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanHit {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    pub height: u64,
    pub case: WitnessCase,
}

/// Keeps the minimal `q, r` for target `h` and walks the first `count`
/// primes `p > p'` with `p ≡ p' (mod qr)`, reporting which case each lands
/// in. Used to find instances of both outcomes.
pub fn theorem1_scan(h: u64, count: usize, budget: &Budget) -> Result<Vec<ScanHit>> {
    let t = theorem1_qr(h, &SearchCaps::default(), budget)?;
    let qr = mul(t.q, t.r, "qr")?;
    let mut hits = Vec::with_capacity(count);
    let mut lower = t.p_prime;
    while hits.len() < count {
        let (p, _) = search(t.p_prime % qr, qr, lower, None, budget, "scan p")?;
        let rec = height_of_triple(t.q, t.r, p, budget)?;
        let case = match rec.height {
            x if x == h => WitnessCase::ExactH,
            x if x == h + 1 => WitnessCase::HPlusOne,
            x => {
                return Err(Error::Internal(format!(
                    "height {x} of ({p}, {}, {}) is outside {{{h}, {}}}",
                    t.q,
                    t.r,
                    h + 1
                )))
            }
        };
        hits.push(ScanHit {
            p,
            q: t.q,
            r: t.r,
            height: rec.height,
            case,
        });
        lower = p;
    }
    Ok(hits)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JumpStep {
    pub before: [u64; 3],
    pub after: [u64; 3],
    pub height_before: u64,
    pub height_after: u64,
    pub jumped: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JumpSequence {
    pub start: [u64; 3],
    pub heights: Vec<u64>,
    pub steps: Vec<JumpStep>,
    /// Why the sequence ended before the requested length, if it did.
    pub stopped: Option<String>,
}

fn step_delta(before: u64, after: u64, what: &str) -> Result<bool> {
    match after.checked_sub(before) {
        Some(0) => Ok(false),
        Some(1) => Ok(true),
        _ => Err(Error::Internal(format!(
            "{what}: height moved from {before} to {after}, outside the 0/1 jump bound"
        ))),
    }
}

/// Iterates `(p, q, r) -> (q, r, p + qr)` from a pairwise-coprime start with
/// `2 < p < q < r`.
pub fn jump_sequence(start: TernaryTriple, steps: usize, budget: &Budget) -> Result<JumpSequence> {
    let [p, q, r] = start.as_array();
    if !(p < q && q < r) {
        return Err(Error::invalid(format!(
            "start ({p}, {q}, {r}) must satisfy p < q < r"
        )));
    }
    let mut current = start;
    let mut h = triple_height(&start, budget)?.height;
    let mut out = JumpSequence {
        start: start.as_array(),
        heights: vec![h],
        steps: Vec::new(),
        stopped: None,
    };
    for _ in 0..steps {
        let [p, q, r] = current.as_array();
        let next = match q.checked_mul(r).and_then(|qr| qr.checked_add(p)) {
            Some(s) => TernaryTriple::new(q, r, s),
            None => Err(Error::ArithmeticOverflow("p + qr".into())),
        };
        let next = match next {
            Ok(t) => t,
            Err(e) => {
                out.stopped = Some(e.to_string());
                break;
            }
        };
        let h_next = match triple_height(&next, budget) {
            Ok(rec) => rec.height,
            Err(e @ Error::Resource { .. }) => {
                out.stopped = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        let jumped = step_delta(h, h_next, "jump sequence")?;
        out.steps.push(JumpStep {
            before: current.as_array(),
            after: next.as_array(),
            height_before: h,
            height_after: h_next,
            jumped,
        });
        out.heights.push(h_next);
        current = next;
        h = h_next;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftLaw {
    /// Both values exceed `max(q, r)`: heights agree.
    Periodic,
    /// `s < max(q, r)`: the shifted height is the base height or one more.
    JumpBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JumpProbe {
    pub q: u64,
    pub r: u64,
    pub s: u64,
    pub shifted: u64,
    pub h_base: u64,
    pub h_shifted: u64,
    pub jumped: bool,
    pub law: ShiftLaw,
}

/// Compares `A(q, r, s)` with `A(q, r, s + qr)`; `s` may be 1 or 2.
pub fn jump_probe(q: u64, r: u64, s: u64, budget: &Budget) -> Result<JumpProbe> {
    let qr = mul(q, r, "qr")?;
    let shifted = s
        .checked_add(qr)
        .ok_or_else(|| Error::ArithmeticOverflow("s + qr".into()))?;
    let h_base = height_of_triple(q, r, s, budget)?.height;
    let h_shifted = height_of_triple(q, r, shifted, budget)?.height;
    let law = if s > q.max(r) {
        ShiftLaw::Periodic
    } else {
        ShiftLaw::JumpBound
    };
    let jumped = match law {
        ShiftLaw::Periodic => {
            if h_base != h_shifted {
                return Err(Error::Internal(format!(
                    "periodicity violated: A({q},{r},{s}) = {h_base} but A({q},{r},{shifted}) = {h_shifted}"
                )));
            }
            false
        }
        ShiftLaw::JumpBound => step_delta(h_base, h_shifted, "jump probe")?,
    };
    Ok(JumpProbe {
        q,
        r,
        s,
        shifted,
        h_base,
        h_shifted,
        jumped,
        law,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainElement {
    pub triple: [u64; 3],
    pub height: u64,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeChain {
    pub elements: Vec<ChainElement>,
    pub stopped: Option<String>,
}

/// `(p, q, r) -> (q, r, p*)` where `p*` is the smallest prime `> r` with
/// `p* ≡ p (mod qr)`.
pub fn prime_chain(
    start: TernaryTriple,
    steps: usize,
    cap: Option<u64>,
    budget: &Budget,
) -> Result<PrimeChain> {
    let [p, q, r] = start.as_array();
    for v in [p, q, r] {
        if !is_prime(v) {
            return Err(Error::invalid(format!("{v} is not prime")));
        }
    }
    let first = triple_height(&start, budget)?;
    let mut chain = PrimeChain {
        elements: vec![ChainElement {
            triple: start.as_array(),
            height: first.height,
            method: first.method,
        }],
        stopped: None,
    };
    let mut current = start.as_array();
    for _ in 0..steps {
        let [p, q, r] = current;
        let qr = match q.checked_mul(r) {
            Some(v) => v,
            None => {
                chain.stopped = Some("qr exceeds 64 bits".into());
                break;
            }
        };
        let next_r = match search(p % qr, qr, r, cap, budget, "chain successor") {
            Ok((v, _)) => v,
            Err(e @ (Error::NotFound { .. } | Error::ArithmeticOverflow(_))) => {
                chain.stopped = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        let next = [q, r, next_r];
        let rec = match height_of_triple(q, r, next_r, budget) {
            Ok(rec) => rec,
            Err(e @ (Error::Resource { .. } | Error::ArithmeticOverflow(_))) => {
                chain.stopped = Some(format!("({q}, {r}, {next_r}): {e}"));
                break;
            }
            Err(e) => return Err(e),
        };
        let prev = chain.elements.last().map(|e| e.height).unwrap_or(0);
        step_delta(prev, rec.height, "prime chain")?;
        chain.elements.push(ChainElement {
            triple: next,
            height: rec.height,
            method: rec.method,
        });
        current = next;
    }
    Ok(chain)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExploreReport {
    pub label: &'static str,
    pub p: u64,
    pub q_max: u64,
    pub r_max: u64,
    pub pairs_evaluated: usize,
    pub pairs_skipped: usize,
    pub attained: BTreeSet<u64>,
    pub max_h: u64,
    /// First `(q, r)` in lexicographic order attaining each height.
    pub witnesses: BTreeMap<u64, [u64; 2]>,
    /// Whether `attained` is exactly `{1, ..., max_h}`.
    pub full_interval: bool,
    pub skip_reason: Option<String>,
}

/// Heights `A(pqr)` over all primes `q < r`, both different from `p`, with
/// `q <= q_max` and `r <= r_max`. Pairs whose degree exceeds the budget are
/// skipped and counted.
pub fn explore_m(p: u64, q_max: u64, r_max: u64, budget: &Budget) -> Result<ExploreReport> {
    require_odd_prime(p)?;
    let limit = q_max.max(r_max);
    let primes: Vec<u64> = if limit >= 3 {
        small_primes(limit, budget.sieve_limit)?
            .into_iter()
            .filter(|&v| v > 2 && v != p)
            .collect()
    } else {
        Vec::new()
    };
    let pairs: Vec<(u64, u64)> = primes
        .iter()
        .filter(|&&q| q <= q_max)
        .flat_map(|&q| {
            primes
                .iter()
                .filter(move |&&r| r > q && r <= r_max)
                .map(move |&r| (q, r))
        })
        .collect();

    let results: Vec<Result<u64>> = pairs
        .par_iter()
        .map(|&(q, r)| height_of_triple(p, q, r, budget).map(|rec| rec.height))
        .collect();

    let mut report = ExploreReport {
        label: "evidence",
        p,
        q_max,
        r_max,
        pairs_evaluated: 0,
        pairs_skipped: 0,
        attained: BTreeSet::new(),
        max_h: 0,
        witnesses: BTreeMap::new(),
        full_interval: false,
        skip_reason: None,
    };
    for (&(q, r), res) in pairs.iter().zip(results) {
        match res {
            Ok(h) => {
                report.pairs_evaluated += 1;
                report.attained.insert(h);
                report.witnesses.entry(h).or_insert([q, r]);
                report.max_h = report.max_h.max(h);
            }
            Err(e @ Error::Resource { .. }) => {
                report.pairs_skipped += 1;
                report.skip_reason.get_or_insert_with(|| e.to_string());
            }
            Err(e) => return Err(e),
        }
    }
    report.full_interval =
        !report.attained.is_empty() && report.attained.iter().copied().eq(1..=report.max_h);
    Ok(report)
}

/// Whether `a ≡ b (mod m)`, computed without overflow.
pub fn congruent(a: u64, b: u64, m: u64) -> bool {
    m != 0 && a % m == b % m
}

/// `true` when `q`, `r`, `s` are pairwise coprime.
pub fn pairwise_coprime(q: u64, r: u64, s: u64) -> bool {
    q.gcd(&r) == 1 && q.gcd(&s) == 1 && r.gcd(&s) == 1
}
