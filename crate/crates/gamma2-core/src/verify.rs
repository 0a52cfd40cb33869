//! Exhaustive sign-coherence verification.
//!
//! For a polynomial in 2k variables the sweep enumerates all 4^k sign
//! sequences, applies the substitution `v -> sigma(v)(1 + v)` to each, and
//! classifies the resulting coefficient signs. The sweep over sigma is
//! embarrassingly parallel: the input polynomial is shared read-only, each
//! worker owns its substitution result, and verdicts merge in ascending mask
//! order so reports are identical for every worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::matrix::{compute_f, trace_comb, IntMatrix2};
use crate::poly::{Coeff, Monomial, MultilinearPoly, SignPattern};
use crate::sigma::SignSequence;

/// Sign predicted for every coefficient of a substituted trace combination
/// with positive (1,1) entry: `(-1)^(k + #negatives)`.
pub fn predicted_sign(k: usize, sigma: &SignSequence) -> i8 {
    if (k as u32 + sigma.neg_count()).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Verdict for one sign sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaVerdict {
    pub sigma: SignSequence,
    pub pattern: SignPattern,
}

/// First violation found by a sweep, in ascending sigma-mask order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoodnessFailure {
    /// Some substituted polynomial has coefficients of both signs.
    Mixed {
        sigma: SignSequence,
        pos: (Monomial, Coeff),
        neg: (Monomial, Coeff),
    },
    /// Uniform sign disagrees with the predicted `(-1)^(k + #neg)`.
    WrongSign {
        sigma: SignSequence,
        expected: i8,
        observed: i8,
    },
}

impl GoodnessFailure {
    pub fn sigma(&self) -> &SignSequence {
        match self {
            GoodnessFailure::Mixed { sigma, .. } | GoodnessFailure::WrongSign { sigma, .. } => sigma,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        match self {
            GoodnessFailure::Mixed { sigma, pos, neg } => serde_json::json!({
                "kind": "mixed",
                "sigma": sigma.to_string(),
                "positive": term_json(&pos.0, &pos.1),
                "negative": term_json(&neg.0, &neg.1),
            }),
            GoodnessFailure::WrongSign { sigma, expected, observed } => serde_json::json!({
                "kind": "wrong_sign",
                "sigma": sigma.to_string(),
                "expected": i32::from(*expected),
                "observed": i32::from(*observed),
            }),
        }
    }
}

/// Outcome of sweeping one polynomial over every sign sequence.
#[derive(Debug, Clone)]
pub struct GoodnessReport {
    /// Number of variable pairs of the swept polynomial.
    pub k: usize,
    /// No substituted version is Mixed.
    pub all_good: bool,
    /// Every non-Zero substituted version has sign `(-1)^(k + #neg)`.
    pub sign_formula_holds: bool,
    /// How many sign sequences produced the zero polynomial.
    pub zero_count: u64,
    /// First violation, if any.
    pub counterexample: Option<GoodnessFailure>,
    /// One verdict per sigma, ascending mask order.
    pub per_sigma: Vec<SigmaVerdict>,
}

impl GoodnessReport {
    fn from_verdicts(k: usize, per_sigma: Vec<SigmaVerdict>) -> Self {
        let mut all_good = true;
        let mut sign_formula_holds = true;
        let mut zero_count = 0;
        let mut counterexample = None;
        for v in &per_sigma {
            match v.pattern {
                SignPattern::Zero => zero_count += 1,
                SignPattern::Mixed { pos, neg } => {
                    all_good = false;
                    sign_formula_holds = false;
                    if counterexample.is_none() {
                        counterexample =
                            Some(GoodnessFailure::Mixed { sigma: v.sigma, pos, neg });
                    }
                }
                SignPattern::AllNonneg | SignPattern::AllNonpos => {
                    let observed = v.pattern.uniform_sign().unwrap();
                    let expected = predicted_sign(k, &v.sigma);
                    if observed != expected {
                        sign_formula_holds = false;
                        if counterexample.is_none() {
                            counterexample = Some(GoodnessFailure::WrongSign {
                                sigma: v.sigma,
                                expected,
                                observed,
                            });
                        }
                    }
                }
            }
        }
        GoodnessReport { k, all_good, sign_formula_holds, zero_count, counterexample, per_sigma }
    }

    /// JSON form; the per-sigma table is large (4^k rows) and therefore
    /// included only on request. Counterexamples are always included.
    pub fn to_json_value(&self, include_per_sigma: bool) -> serde_json::Value {
        let mut value = serde_json::json!({
            "schema": "gamma2.goodness-report/v1",
            "k": self.k,
            "sigma_count": self.per_sigma.len(),
            "all_good": self.all_good,
            "sign_formula_holds": self.sign_formula_holds,
            "zero_count": self.zero_count,
            "counterexample": self.counterexample.as_ref().map(GoodnessFailure::to_json_value),
        });
        if include_per_sigma {
            let rows: Vec<serde_json::Value> = self
                .per_sigma
                .iter()
                .map(|v| {
                    serde_json::json!({
                        "sigma": v.sigma.to_string(),
                        "pattern": v.pattern.tag(),
                    })
                })
                .collect();
            value["per_sigma"] = serde_json::Value::Array(rows);
        }
        value
    }
}

fn term_json(m: &Monomial, c: &Coeff) -> serde_json::Value {
    serde_json::json!({
        "vars": m.vars().map(|v| v.index()).collect::<Vec<_>>(),
        "monomial": m.to_string(),
        "coeff": c.to_string(),
    })
}

/// Runs `op` on a dedicated pool of `jobs` workers (0 means the global
/// default pool).
pub fn with_workers<T: Send>(jobs: usize, op: impl FnOnce() -> T + Send) -> T {
    if jobs == 0 {
        return op();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("failed to build worker pool")
        .install(op)
}

/// Sweeps `p` over all 4^k sign sequences (k = pairs of `p`) and classifies
/// every substituted version. Deterministic for every worker count.
pub fn goodness(p: &MultilinearPoly, jobs: usize) -> Result<GoodnessReport> {
    let k = p.pairs();
    let total: u64 = 1 << (2 * k);
    let verdicts: Vec<Result<SigmaVerdict>> = with_workers(jobs, || {
        (0..total)
            .into_par_iter()
            .map(|mask| {
                let sigma = SignSequence::from_mask(k, mask)?;
                let substituted = p.substitute_signs(&sigma)?;
                Ok(SigmaVerdict { sigma, pattern: substituted.sign_pattern() })
            })
            .collect()
    });
    let mut per_sigma = Vec::with_capacity(verdicts.len());
    for v in verdicts {
        per_sigma.push(v?);
    }
    Ok(GoodnessReport::from_verdicts(k, per_sigma))
}

/// Verifies that `p_k = tr(F_k)` is good with the predicted signs, over all
/// 4^k sequences.
pub fn verify_theorem(k: usize, jobs: usize) -> Result<GoodnessReport> {
    let p = compute_f(k)?.trace()?;
    goodness(&p, jobs)
}

/// Verifies goodness of the combination `a*f_k + b*h_k + c*t_k + d*g_k`.
pub fn verify_comb_good(k: usize, m: &IntMatrix2, jobs: usize) -> Result<GoodnessReport> {
    let p = trace_comb(&compute_f(k)?, m)?;
    goodness(&p, jobs)
}

/// Trace of `A^{m_1} B^{n_1} ... A^{m_k} B^{n_k}` computed purely with
/// integer matrices via the closed forms `A^m = (1 2m; 0 1)` and
/// `B^n = (1 0; -2n 1)`. Independent of the polynomial path; must agree with
/// `evaluate(p_k, exponents)` everywhere.
pub fn numeric_oracle(k: usize, exponents: &[Coeff]) -> Result<Coeff> {
    if exponents.len() != 2 * k {
        return Err(CoreError::PointLength { expected: 2 * k, actual: exponents.len() });
    }
    let mut acc = IntMatrix2::identity();
    for j in 0..k {
        let a_pow = IntMatrix2::new(1, 2 * exponents[2 * j], 0, 1);
        let b_pow = IntMatrix2::new(1, 0, -2 * exponents[2 * j + 1], 1);
        acc = acc.mul(&a_pow)?.mul(&b_pow)?;
    }
    acc.trace()
}

/// One disagreement between the numeric oracle and polynomial evaluation.
#[derive(Debug, Clone)]
pub struct OracleMismatch {
    pub exponents: Vec<Coeff>,
    pub oracle: Coeff,
    pub evaluated: Coeff,
}

/// Result of a seeded random-trial comparison.
#[derive(Debug, Clone)]
pub struct OracleTrialReport {
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    pub mismatches: Vec<OracleMismatch>,
}

impl OracleTrialReport {
    pub fn all_agree(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": "gamma2.oracle-report/v1",
            "k": self.k,
            "trials": self.trials,
            "seed": self.seed,
            "agreements": self.trials - self.mismatches.len() as u64,
            "mismatches": self.mismatches.iter().map(|m| serde_json::json!({
                "exponents": m.exponents.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "oracle": m.oracle.to_string(),
                "evaluated": m.evaluated.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Draws `trials` exponent vectors with entries in `[-5, 5] \ {0}` from a
/// seeded deterministic generator and compares the numeric oracle against
/// polynomial evaluation of `p_k`.
pub fn oracle_trials(k: usize, trials: u64, seed: u64) -> Result<OracleTrialReport> {
    let p = compute_f(k)?.trace()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = Vec::new();
    for _ in 0..trials {
        let exponents: Vec<Coeff> = (0..2 * k)
            .map(|_| loop {
                let v = rng.gen_range(-5i64..=5) as Coeff;
                if v != 0 {
                    return v;
                }
            })
            .collect();
        let oracle = numeric_oracle(k, &exponents)?;
        let evaluated = p.evaluate(&exponents)?;
        if oracle != evaluated {
            mismatches.push(OracleMismatch { exponents, oracle, evaluated });
        }
    }
    Ok(OracleTrialReport { k, trials, seed, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::constants;
    use crate::poly::VarIndex;

    fn poly(pairs: usize, terms: &[(u64, Coeff)]) -> MultilinearPoly {
        MultilinearPoly::from_terms(
            pairs,
            terms.iter().map(|&(m, c)| (Monomial::from_mask(m), c)),
        )
        .unwrap()
    }

    #[test]
    fn predicted_sign_formula() {
        assert_eq!(predicted_sign(1, &"++".parse().unwrap()), -1);
        assert_eq!(predicted_sign(1, &"+-".parse().unwrap()), 1);
        assert_eq!(predicted_sign(2, &"----".parse().unwrap()), 1);
    }

    #[test]
    fn theorem_holds_for_small_k() {
        for k in 1..=3 {
            let report = verify_theorem(k, 1).unwrap();
            assert!(report.all_good, "k = {k}");
            assert!(report.sign_formula_holds, "k = {k}");
            assert_eq!(report.zero_count, 0, "k = {k}");
            assert_eq!(report.per_sigma.len(), 1 << (2 * k));
        }
    }

    #[test]
    fn theorem_k1_patterns() {
        let report = verify_theorem(1, 1).unwrap();
        let tags: Vec<&str> = report.per_sigma.iter().map(|v| v.pattern.tag()).collect();
        // masks 0b00 (++), 0b01 (-+ on x1), 0b10, 0b11
        assert_eq!(tags, ["all_nonpos", "all_nonneg", "all_nonneg", "all_nonpos"]);
    }

    #[test]
    fn goodness_of_linear_poly() {
        // x1 + 1 is good: 2 + x1 under +, -x1 under -.
        let p = MultilinearPoly::variable(1, VarIndex::x(1))
            .unwrap()
            .add(&MultilinearPoly::one(1))
            .unwrap();
        let report = goodness(&p, 1).unwrap();
        assert!(report.all_good);
    }

    #[test]
    fn goodness_of_zero_poly() {
        let report = goodness(&MultilinearPoly::zero(2), 1).unwrap();
        assert!(report.all_good);
        assert_eq!(report.zero_count, 16);
        // vacuously true: no non-zero pattern exists to violate the formula
        assert!(report.sign_formula_holds);
    }

    #[test]
    fn mixed_fixture_is_detected() {
        // x1 - y1 stays mixed under every substitution.
        let p = poly(1, &[(0b01, 1), (0b10, -1)]);
        let report = goodness(&p, 1).unwrap();
        assert!(!report.all_good);
        match report.counterexample {
            Some(GoodnessFailure::Mixed { sigma, pos, neg }) => {
                assert_eq!(sigma.mask(), 0);
                assert_eq!(pos.1, 1);
                assert_eq!(neg.1, -1);
            }
            ref other => panic!("expected mixed counterexample, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_quadratic_fixture_is_good() {
        // 1 + 4 x1 y1 - 2 x1 is good; every substituted version is
        // single-signed (checked independently by hand expansion).
        let p = poly(1, &[(0b00, 1), (0b01, -2), (0b11, 4)]);
        let report = goodness(&p, 1).unwrap();
        assert!(report.all_good);
    }

    #[test]
    fn comb_goodness_examples() {
        let consts = constants();
        assert!(verify_comb_good(1, &consts.a4, 1).unwrap().all_good);
        assert!(verify_comb_good(1, &consts.e, 1).unwrap().all_good);
        assert!(verify_comb_good(2, &consts.a5, 1).unwrap().all_good);
    }

    #[test]
    fn non_good_combination_has_witness() {
        // a f_1 + d g_1 with (a, d) = (1, -6) is -5 - 4 x1 y1; flipping one
        // sign gives -1 + 4x1 + 4y1 + 4x1y1, which is mixed. The first such
        // sigma in mask order is "-+".
        let m = IntMatrix2::new(1, 0, 0, -6);
        let report = verify_comb_good(1, &m, 1).unwrap();
        assert!(!report.all_good);
        match report.counterexample {
            Some(GoodnessFailure::Mixed { sigma, pos, neg }) => {
                assert_eq!(sigma.to_string(), "-+");
                assert_eq!(pos, (Monomial::from_mask(0b01), 4));
                assert_eq!(neg, (Monomial::ONE, -1));
            }
            ref other => panic!("expected mixed counterexample, got {other:?}"),
        }
    }

    #[test]
    fn verdicts_independent_of_worker_count() {
        let p = compute_f(3).unwrap().trace().unwrap();
        let one = goodness(&p, 1).unwrap();
        for jobs in [2, 3, 8] {
            let many = goodness(&p, jobs).unwrap();
            assert_eq!(one.per_sigma, many.per_sigma);
            assert_eq!(one.all_good, many.all_good);
            assert_eq!(one.sign_formula_holds, many.sign_formula_holds);
        }
    }

    #[test]
    fn numeric_oracle_spot_values() {
        assert_eq!(numeric_oracle(1, &[1, 1]).unwrap(), -2);
        assert_eq!(numeric_oracle(2, &[1, 1, 1, 1]).unwrap(), 2);
        assert_eq!(numeric_oracle(1, &[-1, 1]).unwrap(), 6);
        assert!(numeric_oracle(1, &[1]).is_err());
    }

    #[test]
    fn oracle_matches_evaluation() {
        for k in 1..=3 {
            let report = oracle_trials(k, 200, 12345).unwrap();
            assert!(report.all_agree(), "k = {k}: {:?}", report.mismatches);
        }
    }

    #[test]
    fn oracle_trials_are_seed_deterministic() {
        let a = oracle_trials(2, 50, 7).unwrap();
        let b = oracle_trials(2, 50, 7).unwrap();
        assert_eq!(a.to_json_value(), b.to_json_value());
    }
}
