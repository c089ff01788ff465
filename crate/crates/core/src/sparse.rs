//! A sparse set of primes that still supports every witness construction.
//!
//! Three families are generated, each element the smallest admissible prime:
//!
//! * `q_1 = 5`, and `q_n ≡ 2 (mod (2n+1)!!)` with `q_n > q_{n-1}`;
//! * `r_1 = 5`, and `r_n ≡ ((2n+1)!! + 1)/2 (mod (2n+1)!!)` with
//!   `r_n > max((2n+1)!!, r_{n-1})`;
//! * for each `a >= 1`, with `π_k` the smallest odd prime above `a^a`:
//!   `p_1(a) ≡ a (mod π_k)`, `p_1(a) > π_k^3`, and
//!   `p_{n+1}(a) ≡ a (mod π_k π_{k+1} ... π_{k+n})`, `p_{n+1}(a) > p_n(a)^3`.
//!
//! Here `(2n+1)!! = 1·3·5···(2n+1)`. Generation stops when the next element
//! cannot fit in 64 bits; that is a normal outcome, reported as saturation.
//!
//! Each family records a frontier: a value below which every member has been
//! generated. Counting queries refuse to answer past the smallest frontier.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::Budget;
use crate::error::{Error, Result};
use crate::primes::{is_prime, next_prime, next_prime_in_ap, small_primes, APQuery};

/// `1·3·5···(2n+1)`.
pub fn odd_factorial(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("odd_factorial needs n >= 1"));
    }
    (1..=n).try_fold(1u64, |acc, i| {
        acc.checked_mul(2 * i + 1)
            .ok_or_else(|| Error::ArithmeticOverflow(format!("(2·{n}+1)!! exceeds 64 bits")))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    QSeq,
    RSeq,
    PSeq(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SparseSetElement {
    pub value: u64,
    pub family: Family,
    pub index: u64,
    /// Modulus of the defining congruence; `None` for the seeds `q_1`, `r_1`.
    pub modulus_used: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyRun {
    pub family: Family,
    pub elements: Vec<SparseSetElement>,
    /// Every member not in `elements` is strictly greater than this.
    pub frontier: u64,
    /// No further member exists below 2^64.
    pub saturated: bool,
    pub note: Option<String>,
}

impl FamilyRun {
    fn new(family: Family) -> Self {
        FamilyRun {
            family,
            elements: Vec::new(),
            frontier: 0,
            saturated: false,
            note: None,
        }
    }

    fn saturate(&mut self, why: impl Into<String>) {
        self.saturated = true;
        self.frontier = u64::MAX;
        self.note = Some(why.into());
    }

    pub fn values(&self) -> Vec<u64> {
        self.elements.iter().map(|e| e.value).collect()
    }
}

fn ap_search(residue: u64, modulus: u64, lower: u64, budget: &Budget) -> Result<u64> {
    next_prime_in_ap(&APQuery::new(
        residue,
        modulus,
        lower,
        budget.ap_cap(lower, modulus),
    ))
}

pub fn gen_q_sequence(n_max: u64, budget: &Budget) -> Result<FamilyRun> {
    let mut run = FamilyRun::new(Family::QSeq);
    if n_max == 0 {
        run.frontier = 4;
        return Ok(run);
    }
    run.elements.push(SparseSetElement {
        value: 5,
        family: Family::QSeq,
        index: 1,
        modulus_used: None,
    });
    let mut prev = 5u64;
    for n in 2..=n_max {
        let m = match odd_factorial(n) {
            Ok(m) => m,
            Err(_) => {
                run.saturate(format!("(2n+1)!! exceeds 64 bits at n = {n}"));
                return Ok(run);
            }
        };
        match ap_search(2, m, prev, budget) {
            Ok(v) => {
                prev = v;
                run.elements.push(SparseSetElement {
                    value: v,
                    family: Family::QSeq,
                    index: n,
                    modulus_used: Some(m),
                });
            }
            Err(Error::ArithmeticOverflow(_)) => {
                run.saturate(format!(
                    "no 64-bit prime ≡ 2 mod {m} above {prev} (n = {n})"
                ));
                return Ok(run);
            }
            Err(e) => return Err(e.at_stage(&format!("q_{n}"))),
        }
    }
    // q_{n+1} > q_n and q_{n+1} >= (2n+3)!! + 2
    let next_mod = odd_factorial(n_max + 1).map(|m| m + 1).unwrap_or(u64::MAX);
    run.frontier = prev.max(next_mod);
    Ok(run)
}

pub fn gen_r_sequence(n_max: u64, budget: &Budget) -> Result<FamilyRun> {
    let mut run = FamilyRun::new(Family::RSeq);
    if n_max == 0 {
        run.frontier = 4;
        return Ok(run);
    }
    run.elements.push(SparseSetElement {
        value: 5,
        family: Family::RSeq,
        index: 1,
        modulus_used: None,
    });
    let mut prev = 5u64;
    for n in 2..=n_max {
        let m = match odd_factorial(n) {
            Ok(m) => m,
            Err(_) => {
                run.saturate(format!("(2n+1)!! exceeds 64 bits at n = {n}"));
                return Ok(run);
            }
        };
        let class = m / 2 + 1;
        match ap_search(class, m, m.max(prev), budget) {
            Ok(v) => {
                prev = v;
                run.elements.push(SparseSetElement {
                    value: v,
                    family: Family::RSeq,
                    index: n,
                    modulus_used: Some(m),
                });
            }
            Err(Error::ArithmeticOverflow(_)) => {
                run.saturate(format!(
                    "no 64-bit prime ≡ {class} mod {m} above {m} (n = {n})"
                ));
                return Ok(run);
            }
            Err(e) => return Err(e.at_stage(&format!("r_{n}"))),
        }
    }
    let next_mod = odd_factorial(n_max + 1).unwrap_or(u64::MAX);
    run.frontier = prev.max(next_mod);
    Ok(run)
}

/// Smallest odd prime strictly above `a^a`, or `None` past 64 bits.
pub fn base_prime(a: u64) -> Option<u64> {
    let aa = a.checked_pow(u32::try_from(a).ok()?)?;
    next_prime(aa.max(2))
}

pub fn gen_p_sequence(a: u64, n_max: u64, budget: &Budget) -> Result<FamilyRun> {
    if a == 0 {
        return Err(Error::invalid("a must be positive"));
    }
    let mut run = FamilyRun::new(Family::PSeq(a));
    let Some(pi_k) = base_prime(a) else {
        run.saturate(format!("no odd prime above {a}^{a} fits 64 bits"));
        return Ok(run);
    };
    let Some(mut lower) = pi_k.checked_pow(3) else {
        run.saturate(format!("π_k^3 exceeds 64 bits (π_k = {pi_k})"));
        return Ok(run);
    };
    let mut modulus = pi_k;
    let mut top_prime = pi_k;
    for n in 1..=n_max {
        if n > 1 {
            let next =
                next_prime(top_prime).ok_or_else(|| Error::ArithmeticOverflow("π_j".into()))?;
            top_prime = next;
            modulus = match modulus.checked_mul(next) {
                Some(m) => m,
                None => {
                    run.saturate(format!("modulus P(k, k+{}) exceeds 64 bits", n - 1));
                    return Ok(run);
                }
            };
        }
        match ap_search(a % modulus, modulus, lower, budget) {
            Ok(v) => {
                run.elements.push(SparseSetElement {
                    value: v,
                    family: Family::PSeq(a),
                    index: n,
                    modulus_used: Some(modulus),
                });
                match v.checked_pow(3) {
                    Some(c) => lower = c,
                    None => {
                        run.saturate(format!("p_{n}({a})^3 exceeds 64 bits"));
                        return Ok(run);
                    }
                }
            }
            Err(Error::ArithmeticOverflow(_)) => {
                run.saturate(format!("no 64-bit prime ≡ {a} mod {modulus} above {lower}"));
                return Ok(run);
            }
            Err(e) => return Err(e.at_stage(&format!("p_{n}({a})"))),
        }
    }
    run.frontier = lower;
    Ok(run)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SparseConfig {
    pub q_depth: u64,
    pub r_depth: u64,
    /// Generate p-families for `a = 1..=a_max`.
    pub a_max: u64,
    pub p_depth: u64,
}

impl Default for SparseConfig {
    /// Deep enough that every family saturates within 64 bits.
    fn default() -> Self {
        SparseConfig {
            q_depth: 20,
            r_depth: 20,
            a_max: 8,
            p_depth: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SparseSet {
    pub config: SparseConfig,
    pub q: FamilyRun,
    pub r: FamilyRun,
    pub p: Vec<FamilyRun>,
    /// Every member of the full set not generated here exceeds this value.
    pub frontier: u64,
    /// Values removed by [`SparseSet::trim_small`].
    pub removed: Vec<u64>,
}

/// Counts at a point `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PCount {
    pub x: u64,
    pub count: usize,
    pub ln_x: f64,
    pub bound_ok: bool,
    /// Distinct values from the q and r families.
    pub qr_count: usize,
    /// Distinct values from the p families.
    pub p_count: usize,
    pub half_ln_x: f64,
    pub qr_ok: bool,
    pub p_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DumpLine {
    pub value: u64,
    pub tags: Vec<SparseSetElement>,
}

impl SparseSet {
    pub fn generate(config: SparseConfig, budget: &Budget) -> Result<Self> {
        let q = gen_q_sequence(config.q_depth, budget)?;
        let r = gen_r_sequence(config.r_depth, budget)?;
        let p = (1..=config.a_max)
            .map(|a| gen_p_sequence(a, config.p_depth, budget))
            .collect::<Result<Vec<_>>>()?;
        // p-families with a > a_max start above (a^a)^3 >= ((a_max+1)^(a_max+1))^3
        let a = config.a_max + 1;
        let unlisted = u32::try_from(a)
            .ok()
            .and_then(|e| a.checked_pow(e))
            .and_then(|v| v.checked_pow(3))
            .unwrap_or(u64::MAX);
        let frontier = p
            .iter()
            .map(|f| f.frontier)
            .chain([q.frontier, r.frontier, unlisted])
            .min()
            .unwrap_or(u64::MAX);
        Ok(SparseSet {
            config,
            q,
            r,
            p,
            frontier,
            removed: Vec::new(),
        })
    }

    pub fn families(&self) -> impl Iterator<Item = &FamilyRun> {
        [&self.q, &self.r].into_iter().chain(self.p.iter())
    }

    /// Distinct values with their family tags, ascending.
    pub fn tagged(&self) -> BTreeMap<u64, Vec<SparseSetElement>> {
        let mut map: BTreeMap<u64, Vec<SparseSetElement>> = BTreeMap::new();
        for f in self.families() {
            for e in &f.elements {
                if !self.removed.contains(&e.value) {
                    map.entry(e.value).or_default().push(*e);
                }
            }
        }
        map
    }

    /// Distinct values, ascending.
    pub fn values(&self) -> Vec<u64> {
        self.tagged().into_keys().collect()
    }

    fn values_where(&self, pred: impl Fn(Family) -> bool) -> Vec<u64> {
        self.tagged()
            .into_iter()
            .filter(|(_, tags)| tags.iter().any(|t| pred(t.family)))
            .map(|(v, _)| v)
            .collect()
    }

    pub fn qr_values(&self) -> Vec<u64> {
        self.values_where(|f| matches!(f, Family::QSeq | Family::RSeq))
    }

    pub fn p_values(&self) -> Vec<u64> {
        self.values_where(|f| matches!(f, Family::PSeq(_)))
    }

    fn require_within_frontier(&self, x: u64) -> Result<()> {
        if x > self.frontier {
            let limiting: Vec<String> = self
                .families()
                .filter(|f| f.frontier < x)
                .map(|f| format!("{:?}", f.family))
                .collect();
            return Err(Error::invalid(format!(
                "x = {x} is beyond the generated frontier {}; generate deeper in {} (or raise a_max)",
                self.frontier,
                if limiting.is_empty() { "the p-families".to_string() } else { limiting.join(", ") }
            )));
        }
        Ok(())
    }

    pub fn count_p(&self, x: u64) -> Result<PCount> {
        self.require_within_frontier(x)?;
        let (mut all, mut qr, mut p) = (Vec::new(), Vec::new(), Vec::new());
        for e in self.families().flat_map(|f| &f.elements) {
            if e.value > x || self.removed.contains(&e.value) {
                continue;
            }
            all.push(e.value);
            match e.family {
                Family::PSeq(_) => p.push(e.value),
                _ => qr.push(e.value),
            }
        }
        let distinct = |mut v: Vec<u64>| {
            v.sort_unstable();
            v.dedup();
            v.len()
        };
        let (count, qr_count, p_count) = (distinct(all), distinct(qr), distinct(p));
        let ln_x = (x as f64).ln();
        let half = ln_x / 2.0;
        Ok(PCount {
            x,
            count,
            ln_x,
            bound_ok: (count as f64) < ln_x,
            qr_count,
            p_count,
            half_ln_x: half,
            qr_ok: (qr_count as f64) < half,
            p_ok: (p_count as f64) < half,
        })
    }

    /// Removes the shortest run of smallest values after which
    /// `P(x) < ln x` holds for every `x >= 2` up to the frontier.
    ///
    /// The bound is checked at the element values, where `P` steps up.
    pub fn trim_small(&self) -> SparseSet {
        let vals: Vec<u64> = self
            .values()
            .into_iter()
            .filter(|&v| v <= self.frontier)
            .collect();
        let holds_from = |t: usize| {
            vals.iter()
                .enumerate()
                .skip(t)
                .all(|(i, &v)| ((i - t + 1) as f64) < (v as f64).ln())
        };
        let t = (0..=vals.len())
            .find(|&t| holds_from(t))
            .unwrap_or(vals.len());
        let mut out = self.clone();
        out.removed.extend_from_slice(&vals[..t]);
        out.removed.sort_unstable();
        out
    }

    /// Smallest `x0` such that the family count stays below `(1/2) ln x` for
    /// every integer `x` in `[x0, frontier]`; `None` if no such point exists
    /// inside the generated range.
    pub fn half_log_threshold(&self, p_family: bool) -> Option<u64> {
        let vals = if p_family {
            self.p_values()
        } else {
            self.qr_values()
        };
        let vals: Vec<u64> = vals.into_iter().filter(|&v| v <= self.frontier).collect();
        let mut x0 = 2u64;
        for (i, &v) in vals.iter().enumerate() {
            let c = (i + 1) as f64;
            let end = vals.get(i + 1).map(|&n| n - 1).unwrap_or(self.frontier);
            // violated while x <= e^{2c}
            let bound = (2.0 * c).exp();
            if (v as f64) <= bound {
                let last_bad = if bound >= end as f64 {
                    end
                } else {
                    bound.floor() as u64
                };
                if last_bad >= v {
                    x0 = x0.max(last_bad.checked_add(1)?);
                }
            }
        }
        (x0 <= self.frontier).then_some(x0)
    }

    pub fn dump(&self, x_max: u64) -> Vec<DumpLine> {
        self.tagged()
            .into_iter()
            .take_while(|(v, _)| *v <= x_max)
            .map(|(value, tags)| DumpLine { value, tags })
            .collect()
    }

    /// Checks primality and the defining congruence and growth condition of
    /// every generated element.
    pub fn verify_invariants(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Internal(msg));
        for run in self.families() {
            let mut prev: Option<u64> = None;
            for e in &run.elements {
                if !is_prime(e.value) {
                    return fail(format!("{:?} element {} is not prime", e.family, e.value));
                }
                match (e.family, e.modulus_used) {
                    (Family::QSeq, Some(m)) => {
                        if m != odd_factorial(e.index)? || e.value % m != 2 % m {
                            return fail(format!(
                                "q_{} = {} breaks q ≡ 2 mod {m}",
                                e.index, e.value
                            ));
                        }
                    }
                    (Family::RSeq, Some(m)) => {
                        if m != odd_factorial(e.index)?
                            || e.value % m != (m + 1) / 2
                            || e.value <= m
                        {
                            return fail(format!(
                                "r_{} = {} breaks its class mod {m}",
                                e.index, e.value
                            ));
                        }
                    }
                    (Family::PSeq(a), Some(m)) => {
                        if e.value % m != a % m {
                            return fail(format!(
                                "p_{}({a}) = {} breaks ≡ a mod {m}",
                                e.index, e.value
                            ));
                        }
                        let floor = match prev {
                            Some(p) => p.checked_pow(3),
                            None => base_prime(a).and_then(|b| b.checked_pow(3)),
                        };
                        if floor.is_none_or(|f| e.value <= f) {
                            return fail(format!(
                                "p_{}({a}) = {} is not above the cube bound",
                                e.index, e.value
                            ));
                        }
                    }
                    (Family::QSeq | Family::RSeq, None) => {
                        if e.index != 1 || e.value != 5 {
                            return fail(format!(
                                "unexpected seed {} at index {}",
                                e.value, e.index
                            ));
                        }
                    }
                    (Family::PSeq(_), None) => {
                        return fail("p-family element without modulus".into())
                    }
                }
                if let Some(p) = prev {
                    if e.value <= p {
                        return fail(format!(
                            "{:?} is not strictly increasing at {}",
                            e.family, e.value
                        ));
                    }
                }
                prev = Some(e.value);
            }
        }
        Ok(())
    }

    pub fn p_family(&self, a: u64) -> Option<&FamilyRun> {
        self.p.iter().find(|f| f.family == Family::PSeq(a))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Verified { checked: usize, detail: String },
    Inconclusive { reason: String },
    Violated { detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub m: u64,
    pub a: u64,
    /// Threshold `a^a + 1` above which `q, r` count as large for `a`.
    pub c_a: u64,
    pub p1: Verdict,
    pub p2: Verdict,
    pub p3: Verdict,
}

fn check_class(run: &FamilyRun, m: u64, target: u64, name: &str) -> Verdict {
    let mut checked = 0usize;
    let mut indices = Vec::new();
    for e in &run.elements {
        let Ok(of) = odd_factorial(e.index) else {
            continue;
        };
        if of % m != 0 {
            continue;
        }
        if e.value % m != target % m {
            return Verdict::Violated {
                detail: format!(
                    "{name}_{} = {} is not ≡ {target} (mod {m})",
                    e.index, e.value
                ),
            };
        }
        checked += 1;
        indices.push(e.index);
    }
    if checked == 0 {
        Verdict::Inconclusive {
            reason: format!("no generated {name}_n has {m} dividing (2n+1)!!; generate deeper"),
        }
    } else {
        Verdict::Verified {
            checked,
            detail: format!("{name}_n ≡ {target} (mod {m}) for n in {indices:?}"),
        }
    }
}

/// Checks the three membership properties at the generated depth.
///
/// (P1) some `q_n ≡ 2 (mod m)`; (P2) some `r_n ≡ (m+1)/2 (mod m)`, in both
/// cases for every generated `n` with `m | (2n+1)!!`; (P3) for distinct
/// `q, r` in the set with `q, r >= a^a + 1`, some `p_n(a) ≡ a (mod qr)`.
/// P3 is only reported as verified when every such pair is reached.
pub fn check_p_properties(m: u64, a: u64, set: &SparseSet) -> Result<PropertyReport> {
    if m < 3 || m % 2 == 0 {
        return Err(Error::invalid(format!(
            "m = {m} must be odd and at least 3"
        )));
    }
    if a == 0 {
        return Err(Error::invalid("a must be positive"));
    }
    let p1 = check_class(&set.q, m, 2, "q");
    let p2 = check_class(&set.r, m, (m + 1) / 2, "r");

    let c_a = u32::try_from(a)
        .ok()
        .and_then(|e| a.checked_pow(e))
        .map(|v| v.saturating_add(1))
        .unwrap_or(u64::MAX);
    let p3 = match set.p_family(a) {
        None => Verdict::Inconclusive {
            reason: format!(
                "p-family for a = {a} was not generated (a_max = {})",
                set.config.a_max
            ),
        },
        Some(run) => {
            let large: Vec<u64> = set.values().into_iter().filter(|&v| v >= c_a).collect();
            let mut reached = 0usize;
            let mut unreached = 0usize;
            let mut violated = None;
            for (i, &q) in large.iter().enumerate() {
                for &r in &large[i + 1..] {
                    let qr = q as u128 * r as u128;
                    let hit = run
                        .elements
                        .iter()
                        .any(|e| e.value as u128 % qr == a as u128 % qr);
                    let divides_modulus = run
                        .elements
                        .iter()
                        .any(|e| e.modulus_used.is_some_and(|m| m as u128 % qr == 0));
                    if hit {
                        reached += 1;
                    } else if divides_modulus {
                        violated.get_or_insert(format!(
                            "modulus divisible by {q}·{r} but no element ≡ {a}"
                        ));
                    } else {
                        unreached += 1;
                    }
                }
            }
            if let Some(detail) = violated {
                Verdict::Violated { detail }
            } else if reached > 0 && unreached == 0 {
                Verdict::Verified {
                    checked: reached,
                    detail: format!("all {reached} large pairs reached"),
                }
            } else {
                Verdict::Inconclusive {
                    reason: format!(
                        "{reached} of {} large pairs have an element ≡ {a} (mod qr) within 64 bits",
                        reached + unreached
                    ),
                }
            }
        }
    };
    Ok(PropertyReport {
        m,
        a,
        c_a,
        p1,
        p2,
        p3,
    })
}

/// Picks `q, r, p` from the set by the membership recipe for target `h`:
/// `q ≡ 2 (mod p')`, `r ≡ (p'q+1)/2 (mod p'q)` (both at least `C_{p'}`),
/// then `p ≡ p' (mod qr)`. `None` when the generated set holds no such triple.
pub fn select_from_set(h: u64, set: &SparseSet) -> Result<Option<[u64; 3]>> {
    if h == 0 {
        return Err(Error::invalid("target height must be positive"));
    }
    let pp = 2 * h - 1;
    let c = u32::try_from(pp)
        .ok()
        .and_then(|e| pp.checked_pow(e))
        .map(|v| v.saturating_add(1))
        .unwrap_or(u64::MAX);
    let vals = set.values();
    for &q in vals.iter().filter(|&&q| q >= c && q % pp == 2 % pp) {
        let ppq = pp as u128 * q as u128;
        for &r in vals
            .iter()
            .filter(|&&r| r >= c && r != q && r as u128 % ppq == (ppq + 1) / 2)
        {
            let qr = q as u128 * r as u128;
            if let Some(&p) = vals
                .iter()
                .find(|&&p| p != q && p != r && p as u128 % qr == pp as u128 % qr)
            {
                return Ok(Some([p, q, r]));
            }
        }
    }
    Ok(None)
}

/// Primes below `limit`, exposed for callers that enumerate `π_j`.
pub fn primes_up_to(limit: u64, budget: &Budget) -> Result<Vec<u64>> {
    small_primes(limit, budget.sieve_limit)
}
