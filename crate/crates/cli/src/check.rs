use serde::Serialize;

use cyclo_core::arith::totient;
use cyclo_core::cyclo::{inclusion_exclusion_coeffs, phi_coeffs};
use cyclo_core::oracle::{
    oracle_inclusion_exclusion, oracle_phi, MAX_ORACLE_N, MAX_ORACLE_PRODUCT,
};
use cyclo_core::{Budget, Error, Subject, TernaryTriple};

/// Coefficient-by-coefficient comparison against the slow oracle.
#[derive(Debug, Clone, Default, Serialize)]
pub struct OracleReport {
    pub checked: usize,
    /// Subjects beyond the oracle's size limits or without a polynomial.
    pub skipped: usize,
    pub mismatches: Vec<String>,
}

impl OracleReport {
    pub fn check(&mut self, subject: Subject, budget: &Budget) -> Result<(), Error> {
        let (fast, slow) = match subject {
            Subject::N(n) => {
                if n == 0 || n > MAX_ORACLE_N || totient(n) as usize >= budget.max_coeffs {
                    self.skipped += 1;
                    return Ok(());
                }
                (phi_coeffs(n, budget)?.into_coeffs(), oracle_phi(n)?)
            }
            Subject::Triple([p, q, r]) => {
                let Ok(t) = TernaryTriple::new(p, q, r) else {
                    self.skipped += 1;
                    return Ok(());
                };
                if t.product().is_none_or(|v| v > MAX_ORACLE_PRODUCT) {
                    self.skipped += 1;
                    return Ok(());
                }
                (
                    inclusion_exclusion_coeffs(&t, budget)?.into_coeffs(),
                    oracle_inclusion_exclusion(&t)?,
                )
            }
        };
        self.checked += 1;
        if fast != slow.coeffs() {
            self.mismatches.push(format!(
                "{subject:?}: fast kernel and oracle coefficients differ"
            ));
        }
        Ok(())
    }
}
