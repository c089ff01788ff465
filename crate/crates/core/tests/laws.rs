use proptest::prelude::*;

use cyclo_core::arith::{is_squarefree, omega};
use cyclo_core::constructions::{
    lemma1_triple, lemma2_range, prime_chain, theorem1_witness, SearchCaps,
};
use cyclo_core::cyclo::{
    height_of_triple, inclusion_exclusion_coeffs, is_self_reciprocal, phi_coeffs, triple_height,
};
use cyclo_core::oracle::PhiOracle;
use cyclo_core::primes::{is_prime, next_prime_in_ap, APQuery};
use cyclo_core::sparse::{select_from_set, SparseConfig, SparseSet};
use cyclo_core::{Budget, Error, TernaryTriple};
use num_integer::Integer;

fn coprime_triple() -> impl Strategy<Value = [u64; 3]> {
    (3u64..40, 3u64..40, 3u64..200)
        .prop_filter("pairwise coprime", |&(p, q, r)| {
            p.gcd(&q) == 1 && q.gcd(&r) == 1 && p.gcd(&r) == 1
        })
        .prop_map(|(p, q, r)| [p, q, r])
}

fn odd_pair() -> impl Strategy<Value = (u64, u64)> {
    (1u64..12, 1u64..15)
        .prop_map(|(a, b)| (2 * a + 1, 2 * b + 1))
        .prop_filter("coprime, distinct", |&(p, q)| p != q && p.gcd(&q) == 1)
}

fn height(p: u64, q: u64, r: u64) -> u64 {
    height_of_triple(p, q, r, &Budget::default())
        .unwrap()
        .height
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symmetric_under_permutation_and_palindromic(t in coprime_triple()) {
        let b = Budget::default();
        let [p, q, r] = t;
        let base = inclusion_exclusion_coeffs(&TernaryTriple::new(p, q, r).unwrap(), &b).unwrap();
        prop_assert!(is_self_reciprocal(&base));
        for [a, c, d] in [[p, r, q], [q, p, r], [q, r, p], [r, p, q], [r, q, p]] {
            let s = inclusion_exclusion_coeffs(&TernaryTriple::new(a, c, d).unwrap(), &b).unwrap();
            prop_assert_eq!(s.coeffs(), base.coeffs());
        }
    }

    #[test]
    fn periodic_above_both(pq in odd_pair(), off in 1u64..400, j in 1u64..4) {
        let (p, q) = pq;
        let s = p.max(q) + off;
        prop_assume!(s.gcd(&(p * q)) == 1);
        prop_assert_eq!(height(p, q, s), height(p, q, s + j * p * q));
    }

    #[test]
    fn jump_bound_below(pq in odd_pair(), s_seed in 0u64..1000, j in 1u64..4) {
        let (p, q) = pq;
        let s = 1 + s_seed % (p.max(q) - 1);
        prop_assume!(s.gcd(&(p * q)) == 1);
        let (hs, hr) = (height(p, q, s), height(p, q, s + j * p * q));
        prop_assert!(hs <= hr && hr <= hs + 1, "A({p},{q},{s}) = {hs}, shifted {hr}");
    }

    #[test]
    fn unit_residue_gives_height_one(i in 1usize..12, j in 1usize..12, plus in any::<bool>()) {
        let primes = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43];
        prop_assume!(i < j);
        let (p, q) = (primes[i - 1], primes[j]);
        let pq = p * q;
        let b = Budget::default();
        let residue = if plus { 1 } else { pq - 1 };
        let r = next_prime_in_ap(&APQuery::new(residue, pq, q, b.ap_cap(q, pq))).unwrap();
        prop_assert_eq!(height(p, q, r), 1);
    }

    #[test]
    fn lemma2_lower_end(i in 0usize..40) {
        let p = (3u64..).filter(|&v| is_prime(v)).nth(i).unwrap();
        let r = lemma2_range(p).unwrap();
        prop_assert_eq!(r.h_min, (p + 1) / 2);
        prop_assert!(r.h_max >= r.h_min);
    }
}

#[test]
fn value_at_one() {
    let b = Budget::default();
    for n in 2u64..2000 {
        let s = phi_coeffs(n, &b).unwrap();
        let sum: i64 = s.coeffs().iter().sum();
        if is_prime(n) {
            assert_eq!(sum, n as i64);
        } else if is_squarefree(n) && omega(n) >= 2 {
            assert_eq!(sum, 1, "n = {n}");
        }
    }
}

#[test]
fn ternary_squarefree_match_oracle() {
    let b = Budget::default();
    let mut oracle = PhiOracle::new();
    let mut seen = 0;
    for n in (3u64..3000).step_by(2) {
        if is_squarefree(n) && omega(n) == 3 {
            assert_eq!(
                phi_coeffs(n, &b).unwrap().coeffs(),
                oracle.phi(n).unwrap().coeffs()
            );
            seen += 1;
        }
    }
    assert!(seen > 50);
}

#[test]
fn large_products_stay_exact() {
    // pqr up to 10^8: checked arithmetic must not trip, densely or streaming
    let b = Budget::default();
    for [p, q, r] in [[463u64, 467, 461], [211, 223, 2111], [15, 49, 27211]] {
        let t = TernaryTriple::new(p, q, r).unwrap();
        assert!(t.product().unwrap() <= 100_000_000);
        assert!(triple_height(&t, &b).unwrap().height >= 1);
    }
    let s = inclusion_exclusion_coeffs(&TernaryTriple::new(15, 49, 27211).unwrap(), &b).unwrap();
    assert!(is_self_reciprocal(&s));
}

#[test]
fn certificates_reverify() {
    let b = Budget::default();
    for h in 1..=4u64 {
        // strict p for h = 4 lands beyond the streaming degree cap
        for strict in [false, true].into_iter().filter(|&st| !st || h <= 3) {
            let cert = theorem1_witness(h, strict, &SearchCaps::default(), &b).unwrap();
            cert.verify(&b).unwrap();
            assert!(cert.computed_height == h || cert.computed_height == h + 1);
            if strict {
                assert!(cert.p > cert.p_prime);
            }
        }
    }
}

#[test]
fn lemma1_exact() {
    let b = Budget::default();
    for p in [3u64, 5, 7, 11, 13, 17] {
        let t = lemma1_triple(p, None, None, &b).unwrap();
        assert_eq!(triple_height(&t.triple, &b).unwrap().height, (p + 1) / 2);
    }
}

#[test]
fn chain_moves_by_at_most_one() {
    let b = Budget::default();
    for start in [[3u64, 5, 7], [3, 7, 11], [5, 7, 11]] {
        let [p, q, r] = start;
        let chain = prime_chain(TernaryTriple::new(p, q, r).unwrap(), 2, None, &b).unwrap();
        for w in chain.elements.windows(2) {
            assert!(w[1].height == w[0].height || w[1].height == w[0].height + 1);
        }
    }
}

#[test]
fn sparse_set_supports_h2_or_skips() {
    let b = Budget::default();
    let set = SparseSet::generate(SparseConfig::default(), &b).unwrap();
    match select_from_set(2, &set).unwrap() {
        Some([p, q, r]) => match height_of_triple(q, r, p, &b) {
            Ok(rec) => assert!(rec.height == 2 || rec.height == 3),
            Err(Error::Resource { .. }) => eprintln!("skipped: ({p},{q},{r}) exceeds the budget"),
            Err(e) => panic!("{e}"),
        },
        None => {
            eprintln!("skipped: no h = 2 triple among the 64-bit elements of the generated set")
        }
    }
}
