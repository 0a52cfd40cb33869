//! Machine checks for the finite algebraic facts behind the sign-coherence
//! proof: the linear and word identities among the constant matrices, the
//! cone decompositions, the level k -> k+1 trace recursion with its k = 0
//! base case, the k = 1 goodness biconditional, and the properties of the
//! certificate words (positive (1,1) entry, decreasing, positive trace,
//! nonnegative generator traces, and preservation of all of these under
//! right-multiplication by each generator).
//!
//! Checks accept the constant set by reference so corrupted copies can be
//! fed through the same paths; every failure carries its witness.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::matrix::{
    compute_f_sigma, constants, is_decreasing, m_table_factor, tau, trace_comb, word_to_matrix,
    Constants, GenWord, Generator, IntMatrix2,
};
use crate::poly::{Coeff, MultilinearPoly, VarIndex};
use crate::sigma::SignSequence;
use crate::verify::with_workers;

/// Outcome of one exact matrix identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub ok: bool,
    pub lhs: IntMatrix2,
    pub rhs: IntMatrix2,
}

impl IdentityCheck {
    fn compare(name: impl Into<String>, lhs: IntMatrix2, rhs: IntMatrix2) -> Self {
        IdentityCheck { name: name.into(), ok: lhs == rhs, lhs, rhs }
    }
}

/// The five linear identities among `A_1..A_6` and their transposes.
pub fn check_linear_identities(consts: &Constants) -> Result<Vec<IdentityCheck>> {
    let c = consts;
    Ok(vec![
        IdentityCheck::compare("A4 + A5 == 4*A2", c.a4.add(&c.a5)?, c.a2.scale(4)?),
        IdentityCheck::compare("A4 + A6 == 4*A3t", c.a4.add(&c.a6)?, c.a3t.scale(4)?),
        IdentityCheck::compare("A4t + A5 == 4*A2t", c.a4t.add(&c.a5)?, c.a2t.scale(4)?),
        IdentityCheck::compare("A4t + A6 == 4*A3", c.a4t.add(&c.a6)?, c.a3.scale(4)?),
        IdentityCheck::compare("A2 + A3 == 4*A1", c.a2.add(&c.a3)?, c.a1.scale(4)?),
    ])
}

/// The four identities expressing the certificate alphabet through the
/// generators: `A_4 = -A^{-1}B^{-1}`, `A_4^t = -AB`, `A_5 = AB^{-1}`,
/// `A_6 = A^{-1}B`.
pub fn check_word_identities(consts: &Constants) -> Result<Vec<IdentityCheck>> {
    let c = consts;
    Ok(vec![
        IdentityCheck::compare("A4 == -(A^-1 * B^-1)", c.a4, c.gen_a_inv.mul(&c.gen_b_inv)?.neg()?),
        IdentityCheck::compare("A4t == -(A * B)", c.a4t, c.gen_a.mul(&c.gen_b)?.neg()?),
        IdentityCheck::compare("A5 == A * B^-1", c.a5, c.gen_a.mul(&c.gen_b_inv)?),
        IdentityCheck::compare("A6 == A^-1 * B", c.a6, c.gen_a_inv.mul(&c.gen_b)?),
    ])
}

/// Nonnegative decompositions of the recursion's left factors over
/// `{A_4, A_4^t, A_5, A_6}`, verified after clearing denominators so the
/// whole check stays in exact integers.
pub fn check_cone_decompositions(consts: &Constants) -> Result<Vec<IdentityCheck>> {
    let c = consts;
    Ok(vec![
        IdentityCheck::compare("A4 + A5 == 2*(2*A2)", c.a4.add(&c.a5)?, c.a2.scale(4)?),
        IdentityCheck::compare("A4t + A5 == 2*(2*A2t)", c.a4t.add(&c.a5)?, c.a2t.scale(4)?),
        IdentityCheck::compare("A4t + A6 == 2*(2*A3)", c.a4t.add(&c.a6)?, c.a3.scale(4)?),
        IdentityCheck::compare("A4 + A6 == 2*(2*A3t)", c.a4.add(&c.a6)?, c.a3t.scale(4)?),
        IdentityCheck::compare(
            "A4 + A4t + A5 + A6 == 16*A1",
            c.a4.add(&c.a4t)?.add(&c.a5)?.add(&c.a6)?,
            c.a1.scale(16)?,
        ),
    ])
}

/// Instance check that every `M^{ij}` lies in the cone generated by
/// `{A_4 M, A_4^t M, A_5 M, A_6 M}`: each decomposition from
/// [`check_cone_decompositions`] is applied to `M` with denominators cleared.
pub fn mij_cone_closure(consts: &Constants, m: &IntMatrix2) -> Result<Vec<IdentityCheck>> {
    let c = consts;
    let gm = |g: &IntMatrix2| g.mul(m);
    let (g4, g4t, g5, g6) = (gm(&c.a4)?, gm(&c.a4t)?, gm(&c.a5)?, gm(&c.a6)?);
    let mut checks = Vec::with_capacity(16);
    for i in 0..4u8 {
        for j in 0..4u8 {
            let mij = m_table_factor(c, i, j)?.mul(m)?;
            let (scale, sum, combo) = match (i, j) {
                (_, 0) => (4, g4.add(&g4t)?.add(&g5)?.add(&g6)?, "A4M + A4tM + A5M + A6M"),
                (0, 1) | (2, 1) => (2, g4t.add(&g6)?, "A4tM + A6M"),
                (1, 1) | (3, 1) => (2, g4.add(&g5)?, "A4M + A5M"),
                (0, 2) | (1, 2) => (2, g4t.add(&g5)?, "A4tM + A5M"),
                (2, 2) | (3, 2) => (2, g4.add(&g6)?, "A4M + A6M"),
                (0, 3) => (1, g4t, "A4tM"),
                (1, 3) => (1, g5, "A5M"),
                (2, 3) => (1, g6, "A6M"),
                (3, 3) => (1, g4, "A4M"),
                _ => unreachable!(),
            };
            checks.push(IdentityCheck::compare(
                format!("{scale}*M^{{{i}{j}}} == {combo}"),
                mij.scale(scale)?,
                sum,
            ));
        }
    }
    Ok(checks)
}

/// Checks the trace recursion
/// `tr(F_{k+1}^{sigma_i} M) = (-1)^tau(i) (x y tr(F_k^s M^{i0}) + x tr(.. M^{i1}) + y tr(.. M^{i2}) + tr(.. M^{i3}))`
/// as an exact polynomial identity in 2k+2 variables. The k = 0 case is the
/// base identity with `F_0 = E`; it is derived by the same code path, not
/// special-cased.
pub fn check_recursion(k: usize, sigma: &SignSequence, i: u8, m: &IntMatrix2) -> Result<bool> {
    check_recursion_with(&constants(), k, sigma, i, m)
}

pub fn check_recursion_with(
    consts: &Constants,
    k: usize,
    sigma: &SignSequence,
    i: u8,
    m: &IntMatrix2,
) -> Result<bool> {
    if sigma.len() != 2 * k {
        return Err(CoreError::SigmaLength { expected: 2 * k, actual: sigma.len() });
    }
    let lhs_matrix = compute_f_sigma(k + 1, &sigma.extended(i))?;
    let lhs = trace_comb(&lhs_matrix, m)?;
    let rhs = recursion_rhs(consts, k, sigma, i, m)?;
    Ok(lhs == rhs)
}

fn recursion_rhs(
    consts: &Constants,
    k: usize,
    sigma: &SignSequence,
    i: u8,
    m: &IntMatrix2,
) -> Result<MultilinearPoly> {
    let f_sigma = compute_f_sigma(k, sigma)?;
    let pairs = k + 1;
    let x_new = MultilinearPoly::variable(pairs, VarIndex::x(pairs))?;
    let y_new = MultilinearPoly::variable(pairs, VarIndex::y(pairs))?;
    let xy_new = x_new.mul_disjoint(&y_new)?;
    let multipliers = [Some(&xy_new), Some(&x_new), Some(&y_new), None];

    let mut rhs = MultilinearPoly::zero(pairs);
    for (j, multiplier) in multipliers.iter().enumerate() {
        let mij = m_table_factor(consts, i, j as u8)?.mul(m)?;
        let term = trace_comb(&f_sigma, &mij)?.lift_to(pairs)?;
        let term = match multiplier {
            Some(mult) => term.mul_disjoint(mult)?,
            None => term,
        };
        rhs = rhs.add(&term)?;
    }
    if tau(i) == 1 {
        rhs = rhs.scale(-1)?;
    }
    Ok(rhs)
}

/// Outcome of the k = 1 biconditional: the combination
/// `a f_1 + b h_1 + c t_1 + d g_1` is good iff `tr(M^{i3}) >= 0` for all i,
/// under the hypotheses `a > 0` and positive (1,1) entry of every `M^{ij}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseEquivalence {
    /// Hypotheses hold and both sides agree.
    Holds { good: bool, traces: [Coeff; 4] },
    /// Hypotheses hold but the two sides disagree.
    Violated { good: bool, traces: [Coeff; 4] },
    /// A hypothesis is not met; the biconditional is not asserted.
    Skipped { reason: String },
}

pub fn check_base_equivalence(m: &IntMatrix2) -> Result<BaseEquivalence> {
    check_base_equivalence_with(&constants(), m)
}

pub fn check_base_equivalence_with(consts: &Constants, m: &IntMatrix2) -> Result<BaseEquivalence> {
    if m.a <= 0 {
        return Ok(BaseEquivalence::Skipped {
            reason: format!("(1,1) entry {} is not positive", m.a),
        });
    }
    for i in 0..4u8 {
        for j in 0..4u8 {
            let mij = m_table_factor(consts, i, j)?.mul(m)?;
            if mij.a <= 0 {
                return Ok(BaseEquivalence::Skipped {
                    reason: format!("(1,1) entry of M^{{{i}{j}}} is {}", mij.a),
                });
            }
        }
    }
    let mut traces = [0; 4];
    for (i, slot) in traces.iter_mut().enumerate() {
        *slot = m_table_factor(consts, i as u8, 3)?.mul(m)?.trace()?;
    }
    let traces_nonneg = traces.iter().all(|&t| t >= 0);
    let good = crate::verify::verify_comb_good(1, m, 1)?.all_good;
    if good == traces_nonneg {
        Ok(BaseEquivalence::Holds { good, traces })
    } else {
        Ok(BaseEquivalence::Violated { good, traces })
    }
}

/// Streams all words over the certificate alphabet of length `0..=max_len`
/// in length-lexicographic order, with their matrices.
pub fn enumerate_delta(max_len: usize) -> DeltaWords {
    assert!(max_len <= 30, "word length cap is 30");
    DeltaWords { max_len, len: 0, counter: 0 }
}

pub struct DeltaWords {
    max_len: usize,
    len: usize,
    counter: u64,
}

impl Iterator for DeltaWords {
    type Item = Result<(GenWord, IntMatrix2)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.len > self.max_len {
            return None;
        }
        let mut letters = Vec::with_capacity(self.len);
        for pos in (0..self.len).rev() {
            let digit = (self.counter >> (2 * pos)) & 3;
            letters.push(Generator::ALL[digit as usize]);
        }
        let word = GenWord(letters);
        let item = word_to_matrix(&word).map(|m| (word, m));
        self.counter += 1;
        if self.counter == 1u64 << (2 * self.len) {
            self.len += 1;
            self.counter = 0;
        }
        Some(item)
    }
}

/// Number of nonempty words of length at most `max_len`.
pub fn delta_word_count(max_len: usize) -> u64 {
    (0..=max_len as u32).map(|n| 4u64.pow(n)).sum::<u64>() - 1
}

/// A property violated by one word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaViolation {
    EntryNotPositive,
    NotDecreasing,
    TraceNotPositive,
    GeneratorTraceNegative(Generator),
    InductiveEntry(Generator),
    InductiveNotDecreasing(Generator),
}

impl DeltaViolation {
    pub fn tag(&self) -> String {
        match self {
            DeltaViolation::EntryNotPositive => "entry_not_positive".into(),
            DeltaViolation::NotDecreasing => "not_decreasing".into(),
            DeltaViolation::TraceNotPositive => "trace_not_positive".into(),
            DeltaViolation::GeneratorTraceNegative(g) => {
                format!("generator_trace_negative:{}", g.symbol())
            }
            DeltaViolation::InductiveEntry(g) => format!("inductive_entry:{}", g.symbol()),
            DeltaViolation::InductiveNotDecreasing(g) => {
                format!("inductive_not_decreasing:{}", g.symbol())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaFailure {
    pub word: GenWord,
    pub matrix: IntMatrix2,
    pub violation: DeltaViolation,
}

/// Checks one nonempty word's obligations: positive (1,1) entry, decreasing,
/// positive trace, `tr(C M) >= 0` for every generator `C`, and the inductive
/// step that `M K` stays decreasing with positive (1,1) entry for every
/// generator `K`. Returns the violations (empty when all hold) together with
/// the smallest generator trace observed.
pub fn check_delta_word(word: &GenWord, m: &IntMatrix2) -> Result<(Vec<DeltaFailure>, Coeff)> {
    let mut failures = Vec::new();
    let fail = |violation: DeltaViolation| {
        DeltaFailure { word: word.clone(), matrix: *m, violation }
    };
    if m.a <= 0 {
        failures.push(fail(DeltaViolation::EntryNotPositive));
    }
    if !is_decreasing(m) {
        failures.push(fail(DeltaViolation::NotDecreasing));
    }
    if m.a > 0 && is_decreasing(m) && m.trace()? <= 0 {
        failures.push(fail(DeltaViolation::TraceNotPositive));
    }
    let mut min_trace = Coeff::MAX;
    for g in Generator::ALL {
        let t = g.matrix().mul(m)?.trace()?;
        min_trace = min_trace.min(t);
        if t < 0 {
            failures.push(fail(DeltaViolation::GeneratorTraceNegative(g)));
        }
        let extended = m.mul(&g.matrix())?;
        if extended.a <= 0 {
            failures.push(fail(DeltaViolation::InductiveEntry(g)));
        }
        if !is_decreasing(&extended) {
            failures.push(fail(DeltaViolation::InductiveNotDecreasing(g)));
        }
    }
    Ok((failures, min_trace))
}

/// Collision bookkeeping keeps the full matrices in memory; past this depth
/// the map would dominate the run, so the (never yet observed) word-collision
/// count is simply not tracked.
const COLLISION_TRACK_MAX_DEPTH: usize = 9;

#[derive(Debug, Clone)]
pub struct DeltaReport {
    pub depth: usize,
    pub words_checked: u64,
    pub ok: bool,
    pub p1_ok: bool,
    pub decreasing_ok: bool,
    pub trace_positive_ok: bool,
    pub p2_ok: bool,
    pub inductive_ok: bool,
    /// Smallest `tr(C M)` seen; the obligations only need `>= 0`, strictness
    /// is observational.
    pub min_generator_trace: Option<Coeff>,
    /// Distinct words mapping to an already-seen matrix (`None` when the
    /// depth exceeds the bookkeeping bound).
    pub collisions: Option<u64>,
    pub failures: Vec<DeltaFailure>,
}

/// Verifies the word obligations for every nonempty word of length
/// `<= max_len`; the identity (empty word) is exempt.
pub fn check_delta_properties(max_len: usize) -> Result<DeltaReport> {
    if max_len == 0 {
        return Err(CoreError::Precondition("delta depth must be at least 1".into()));
    }
    let track_collisions = max_len <= COLLISION_TRACK_MAX_DEPTH;
    let mut seen: HashMap<(Coeff, Coeff, Coeff, Coeff), u64> = HashMap::new();
    let mut collisions = 0u64;
    let mut failures = Vec::new();
    let mut words_checked = 0u64;
    let mut min_trace = Coeff::MAX;
    for item in enumerate_delta(max_len) {
        let (word, matrix) = item?;
        if word.is_empty() {
            continue;
        }
        words_checked += 1;
        let (mut word_failures, word_min) = check_delta_word(&word, &matrix)?;
        failures.append(&mut word_failures);
        min_trace = min_trace.min(word_min);
        if track_collisions {
            let count = seen.entry((matrix.a, matrix.c, matrix.b, matrix.d)).or_insert(0);
            if *count > 0 {
                collisions += 1;
            }
            *count += 1;
        }
    }
    let missing = |v: fn(&DeltaViolation) -> bool| !failures.iter().any(|f| v(&f.violation));
    let p1_ok = missing(|v| matches!(v, DeltaViolation::EntryNotPositive));
    let decreasing_ok = missing(|v| matches!(v, DeltaViolation::NotDecreasing));
    let trace_positive_ok = missing(|v| matches!(v, DeltaViolation::TraceNotPositive));
    let p2_ok = missing(|v| matches!(v, DeltaViolation::GeneratorTraceNegative(_)));
    let inductive_ok = missing(|v| {
        matches!(v, DeltaViolation::InductiveEntry(_) | DeltaViolation::InductiveNotDecreasing(_))
    });
    Ok(DeltaReport {
        depth: max_len,
        words_checked,
        ok: failures.is_empty(),
        p1_ok,
        decreasing_ok,
        trace_positive_ok,
        p2_ok,
        inductive_ok,
        min_generator_trace: (words_checked > 0).then_some(min_trace),
        collisions: track_collisions.then_some(collisions),
        failures,
    })
}

/// A failure recorded by the aggregate certificate, with its witness.
#[derive(Debug, Clone)]
pub enum CertFailure {
    Identity { name: String, lhs: IntMatrix2, rhs: IntMatrix2 },
    Cone { name: String, lhs: IntMatrix2, rhs: IntMatrix2 },
    Recursion { k: usize, sigma: SignSequence, i: u8, matrix: IntMatrix2 },
    BaseEquivalence { matrix: IntMatrix2, good: bool, traces: [Coeff; 4] },
    Delta(DeltaFailure),
}

impl CertFailure {
    pub fn to_json_value(&self) -> serde_json::Value {
        match self {
            CertFailure::Identity { name, lhs, rhs } => serde_json::json!({
                "kind": "identity",
                "name": name,
                "lhs": lhs.to_string(),
                "rhs": rhs.to_string(),
            }),
            CertFailure::Cone { name, lhs, rhs } => serde_json::json!({
                "kind": "cone",
                "name": name,
                "lhs": lhs.to_string(),
                "rhs": rhs.to_string(),
            }),
            CertFailure::Recursion { k, sigma, i, matrix } => serde_json::json!({
                "kind": "recursion",
                "k": k,
                "sigma": sigma.to_string(),
                "i": i,
                "matrix": matrix.to_string(),
            }),
            CertFailure::BaseEquivalence { matrix, good, traces } => serde_json::json!({
                "kind": "base_equivalence",
                "matrix": matrix.to_string(),
                "good": good,
                "traces": traces.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            }),
            CertFailure::Delta(f) => serde_json::json!({
                "kind": "delta",
                "word": f.word.to_string(),
                "matrix": f.matrix.to_string(),
                "violation": f.violation.tag(),
            }),
        }
    }
}

/// Parameters of the aggregate certificate run.
#[derive(Debug, Clone)]
pub struct CertifyParams {
    /// Word-length bound for the certificate set truncation.
    pub delta_depth: usize,
    /// The recursion is checked for every `k < recursion_k_max`.
    pub recursion_k_max: usize,
    /// Number of seeded random matrices (entries in [-3, 3]) mixed into the
    /// recursion's matrix pool alongside the words of length <= 2.
    pub random_samples: usize,
    pub seed: u64,
    /// Worker count for the recursion sweep (0 = default pool).
    pub jobs: usize,
}

impl Default for CertifyParams {
    fn default() -> Self {
        CertifyParams { delta_depth: 8, recursion_k_max: 3, random_samples: 50, seed: 1, jobs: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub identities_ok: bool,
    pub cone_ok: bool,
    pub recursion_ok: bool,
    pub recursion_tested: u64,
    /// The k = 0 slice of the recursion (the base identity).
    pub base_case_ok: bool,
    pub base_equivalence_ok: bool,
    pub base_equivalence_checked: u64,
    pub base_equivalence_skipped: u64,
    pub delta_depth: usize,
    pub delta_ok: bool,
    pub delta: DeltaReport,
    pub failures: Vec<CertFailure>,
}

impl CertificateReport {
    pub fn all_ok(&self) -> bool {
        self.identities_ok
            && self.cone_ok
            && self.recursion_ok
            && self.base_case_ok
            && self.base_equivalence_ok
            && self.delta_ok
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": "gamma2.certificate-report/v1",
            "all_ok": self.all_ok(),
            "checks": {
                "identities": { "ok": self.identities_ok },
                "cone_decompositions": { "ok": self.cone_ok },
                "recursion": {
                    "ok": self.recursion_ok,
                    "tested": self.recursion_tested,
                    "base_case_ok": self.base_case_ok,
                },
                "base_equivalence": {
                    "ok": self.base_equivalence_ok,
                    "checked": self.base_equivalence_checked,
                    "skipped": self.base_equivalence_skipped,
                },
                "delta": {
                    "ok": self.delta_ok,
                    "depth": self.delta_depth,
                    "words_checked": self.delta.words_checked,
                    "p1_ok": self.delta.p1_ok,
                    "decreasing_ok": self.delta.decreasing_ok,
                    "trace_positive_ok": self.delta.trace_positive_ok,
                    "p2_ok": self.delta.p2_ok,
                    "inductive_ok": self.delta.inductive_ok,
                    "min_generator_trace": self.delta.min_generator_trace.map(|t| t.to_string()),
                    "collisions": self.delta.collisions,
                },
            },
            "failures": self.failures.iter().map(CertFailure::to_json_value).collect::<Vec<_>>(),
        })
    }

    /// One CSV row per check: `check,ok,detail`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,ok,detail\n");
        out.push_str(&format!("identities,{},linear+word\n", self.identities_ok));
        out.push_str(&format!("cone_decompositions,{},denominators cleared\n", self.cone_ok));
        out.push_str(&format!(
            "recursion,{},tested={} base_case_ok={}\n",
            self.recursion_ok, self.recursion_tested, self.base_case_ok
        ));
        out.push_str(&format!(
            "base_equivalence,{},checked={} skipped={}\n",
            self.base_equivalence_ok, self.base_equivalence_checked, self.base_equivalence_skipped
        ));
        out.push_str(&format!(
            "delta,{},depth={} words={}\n",
            self.delta_ok, self.delta_depth, self.delta.words_checked
        ));
        out
    }
}

/// Matrices with small entries exercising both directions of the k = 1
/// biconditional, including one whose traces go negative (goodness must fail
/// with it) and two that miss the hypotheses (skipped).
fn base_equivalence_fixtures() -> Vec<IntMatrix2> {
    vec![
        IntMatrix2::new(1, 0, 0, -3),
        IntMatrix2::new(1, 0, 0, -6),
        IntMatrix2::new(2, 1, 1, 0),
        IntMatrix2::new(1, 0, 5, 0),
        IntMatrix2::new(-1, 0, 0, 1),
    ]
}

/// Runs every certificate check and aggregates the full failure inventory.
/// Assertion failures never abort the run; only overflow or a violated
/// precondition returns an error.
pub fn full_certificate(consts: &Constants, params: &CertifyParams) -> Result<CertificateReport> {
    if params.delta_depth == 0 {
        return Err(CoreError::Precondition("delta depth must be at least 1".into()));
    }
    if params.recursion_k_max == 0 {
        return Err(CoreError::Precondition("recursion k_max must be at least 1".into()));
    }
    let mut failures = Vec::new();

    let mut identities_ok = true;
    for check in check_linear_identities(consts)?
        .into_iter()
        .chain(check_word_identities(consts)?)
    {
        if !check.ok {
            identities_ok = false;
            failures.push(CertFailure::Identity { name: check.name, lhs: check.lhs, rhs: check.rhs });
        }
    }

    let mut cone_ok = true;
    for check in check_cone_decompositions(consts)? {
        if !check.ok {
            cone_ok = false;
            failures.push(CertFailure::Cone { name: check.name, lhs: check.lhs, rhs: check.rhs });
        }
    }

    // k = 1 biconditional over the short words plus the fixtures.
    let mut base_equivalence_ok = true;
    let mut base_equivalence_checked = 0;
    let mut base_equivalence_skipped = 0;
    let mut base_matrices: Vec<IntMatrix2> = Vec::new();
    for item in enumerate_delta(params.delta_depth.min(3)) {
        base_matrices.push(item?.1);
    }
    base_matrices.extend(base_equivalence_fixtures());
    for m in &base_matrices {
        match check_base_equivalence_with(consts, m)? {
            BaseEquivalence::Holds { .. } => base_equivalence_checked += 1,
            BaseEquivalence::Violated { good, traces } => {
                base_equivalence_checked += 1;
                base_equivalence_ok = false;
                failures.push(CertFailure::BaseEquivalence { matrix: *m, good, traces });
            }
            BaseEquivalence::Skipped { .. } => base_equivalence_skipped += 1,
        }
    }

    // Recursion pool: words of length <= 2 plus seeded random matrices.
    let mut pool: Vec<IntMatrix2> = Vec::new();
    for item in enumerate_delta(2) {
        pool.push(item?.1);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..params.random_samples {
        let mut entry = || Coeff::from(rng.gen_range(-3i64..=3));
        let (a, c, b, d) = (entry(), entry(), entry(), entry());
        pool.push(IntMatrix2::new(a, c, b, d));
    }

    let mut recursion_ok = true;
    let mut base_case_ok = true;
    let mut recursion_tested = 0u64;
    for k in 0..params.recursion_k_max {
        let sigma_count = 1u64 << (2 * k);
        let per_sigma: Vec<Result<Vec<CertFailure>>> = with_workers(params.jobs, || {
            (0..sigma_count)
                .into_par_iter()
                .map(|mask| {
                    let sigma = SignSequence::from_mask(k, mask)?;
                    let mut local = Vec::new();
                    for i in 0..4u8 {
                        for m in &pool {
                            if !check_recursion_with(consts, k, &sigma, i, m)? {
                                local.push(CertFailure::Recursion { k, sigma, i, matrix: *m });
                            }
                        }
                    }
                    Ok(local)
                })
                .collect()
        });
        for entry in per_sigma {
            let mut entry = entry?;
            recursion_tested += 4 * pool.len() as u64;
            if !entry.is_empty() {
                recursion_ok = false;
                if k == 0 {
                    base_case_ok = false;
                }
                failures.append(&mut entry);
            }
        }
    }

    let delta = check_delta_properties(params.delta_depth)?;
    let delta_ok = delta.ok;
    failures.extend(delta.failures.iter().cloned().map(CertFailure::Delta));

    Ok(CertificateReport {
        identities_ok,
        cone_ok,
        recursion_ok,
        recursion_tested,
        base_case_ok,
        base_equivalence_ok,
        base_equivalence_checked,
        base_equivalence_skipped,
        delta_depth: params.delta_depth,
        delta_ok,
        delta,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;

    #[test]
    fn linear_identities_pass() {
        let checks = check_linear_identities(&constants()).unwrap();
        assert_eq!(checks.len(), 5);
        assert!(checks.iter().all(|c| c.ok), "{checks:?}");
        // spot value from the identity A4 + A5 = 4 A2
        assert_eq!(checks[0].lhs, IntMatrix2::new(8, 4, 0, 0));
    }

    #[test]
    fn corrupted_constant_fails_identities() {
        let mut consts = constants();
        consts.a5 = IntMatrix2::new(5, 2, 2, 2);
        let checks = check_linear_identities(&consts).unwrap();
        assert!(checks.iter().any(|c| !c.ok));
    }

    #[test]
    fn word_identities_pass() {
        let checks = check_word_identities(&constants()).unwrap();
        assert_eq!(checks.len(), 4);
        assert!(checks.iter().all(|c| c.ok), "{checks:?}");
    }

    #[test]
    fn cone_decompositions_pass() {
        let checks = check_cone_decompositions(&constants()).unwrap();
        assert_eq!(checks.len(), 5);
        assert!(checks.iter().all(|c| c.ok), "{checks:?}");
        assert_eq!(checks[4].rhs, IntMatrix2::new(16, 0, 0, 0));
    }

    #[test]
    fn mij_closure_for_words() {
        let consts = constants();
        for item in enumerate_delta(3) {
            let (word, matrix) = item.unwrap();
            let checks = mij_cone_closure(&consts, &matrix).unwrap();
            assert_eq!(checks.len(), 16);
            assert!(checks.iter().all(|c| c.ok), "word {word}");
        }
    }

    #[test]
    fn recursion_base_instance() {
        // k = 0, i = 0, M = E: both sides equal -2 - 4x - 4y - 4xy.
        let e = IntMatrix2::identity();
        let sigma = SignSequence::empty();
        assert!(check_recursion(0, &sigma, 0, &e).unwrap());
        let rhs = recursion_rhs(&constants(), 0, &sigma, 0, &e).unwrap();
        let expected = MultilinearPoly::from_terms(
            1,
            [
                (Monomial::from_mask(0b00), -2),
                (Monomial::from_mask(0b01), -4),
                (Monomial::from_mask(0b10), -4),
                (Monomial::from_mask(0b11), -4),
            ],
        )
        .unwrap();
        assert_eq!(rhs, expected);
    }

    #[test]
    fn recursion_constant_terms() {
        // k = 0, i = 1, M = E: tau(1) = 0 and tr(A_5) = 6, so the constant
        // term on both sides is 6.
        let e = IntMatrix2::identity();
        let rhs = recursion_rhs(&constants(), 0, &SignSequence::empty(), 1, &e).unwrap();
        assert_eq!(rhs.coefficient(Monomial::ONE), 6);
        assert!(check_recursion(0, &SignSequence::empty(), 1, &e).unwrap());
    }

    #[test]
    fn recursion_holds_for_sampled_instances() {
        let ms = [
            IntMatrix2::identity(),
            constants().a4,
            constants().a5,
            IntMatrix2::new(1, 2, -3, 0),
            IntMatrix2::new(-2, 1, 0, 3),
        ];
        for k in 0..=2usize {
            for sigma in SignSequence::all(k) {
                for i in 0..4u8 {
                    for m in &ms {
                        assert!(
                            check_recursion(k, &sigma, i, m).unwrap(),
                            "k={k} sigma={sigma} i={i} m={m}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn base_equivalence_cases() {
        let consts = constants();
        match check_base_equivalence(&consts.e).unwrap() {
            BaseEquivalence::Holds { good, traces } => {
                assert!(good);
                assert_eq!(traces, [2, 6, 6, 2]);
            }
            other => panic!("expected holds, got {other:?}"),
        }
        match check_base_equivalence(&consts.a5).unwrap() {
            BaseEquivalence::Holds { good, traces } => {
                assert!(good);
                assert_eq!(traces, [14, 34, 18, 14]);
            }
            other => panic!("expected holds, got {other:?}"),
        }
        // negative-control direction: traces go negative, goodness fails
        match check_base_equivalence(&IntMatrix2::new(1, 0, 0, -6)).unwrap() {
            BaseEquivalence::Holds { good, traces } => {
                assert!(!good);
                assert_eq!(traces, [9, -1, -1, 9]);
            }
            other => panic!("expected holds (both sides false), got {other:?}"),
        }
        // hypothesis misses
        assert!(matches!(
            check_base_equivalence(&IntMatrix2::new(-1, 0, 0, 1)).unwrap(),
            BaseEquivalence::Skipped { .. }
        ));
        assert!(matches!(
            check_base_equivalence(&IntMatrix2::new(1, 0, 5, 0)).unwrap(),
            BaseEquivalence::Skipped { .. }
        ));
    }

    #[test]
    fn delta_enumeration_order_and_values() {
        let all: Vec<_> = enumerate_delta(2).map(|r| r.unwrap()).collect();
        assert_eq!(all.len(), 21);
        assert_eq!(all[0].0, GenWord::empty());
        assert_eq!(all[0].1, IntMatrix2::identity());
        let consts = constants();
        assert_eq!(all[1].1, consts.a4);
        assert_eq!(all[2].1, consts.a4t);
        assert_eq!(all[3].1, consts.a5);
        assert_eq!(all[4].1, consts.a6);
        // length-lexicographic: "44" right after the four single letters
        assert_eq!(all[5].0.to_string(), "44");
        let w45 = all.iter().find(|(w, _)| w.to_string() == "45").unwrap();
        assert_eq!(w45.1, IntMatrix2::new(19, 8, -12, -5));
        assert_eq!(delta_word_count(2), 20);
    }

    #[test]
    fn delta_properties_small_depth() {
        let report = check_delta_properties(3).unwrap();
        assert!(report.ok, "{:?}", report.failures);
        assert_eq!(report.words_checked, 84);
        assert_eq!(report.collisions, Some(0));
        assert!(report.min_generator_trace.unwrap() >= 0);
        assert!(check_delta_properties(0).is_err());
    }

    #[test]
    fn delta_word_check_propagates_overflow() {
        let word: GenWord = "4".parse().unwrap();
        let huge = IntMatrix2::new(Coeff::MAX, 0, 0, 1);
        assert!(matches!(
            check_delta_word(&word, &huge),
            Err(CoreError::Overflow(_))
        ));
    }

    #[test]
    fn delta_word_check_flags_identity_matrix() {
        // feeding a non-decreasing matrix produces a witnessed failure
        let word: GenWord = "4".parse().unwrap();
        let (failures, _) = check_delta_word(&word, &IntMatrix2::identity()).unwrap();
        assert!(failures
            .iter()
            .any(|f| f.violation == DeltaViolation::NotDecreasing && f.word == word));
    }

    #[test]
    fn full_certificate_passes() {
        let params = CertifyParams {
            delta_depth: 3,
            recursion_k_max: 2,
            random_samples: 10,
            seed: 1,
            jobs: 1,
        };
        let report = full_certificate(&constants(), &params).unwrap();
        assert!(report.all_ok(), "{:?}", report.failures.len());
        assert_eq!(report.delta_depth, 3);
        assert_eq!(report.recursion_tested, (1 + 4) * 4 * (21 + 10));
        assert!(report.failures.is_empty());
    }

    #[test]
    fn full_certificate_flags_corrupted_constant() {
        let mut consts = constants();
        consts.a6 = IntMatrix2::new(5, -2, -2, 2);
        let params = CertifyParams {
            delta_depth: 1,
            recursion_k_max: 1,
            random_samples: 2,
            seed: 1,
            jobs: 1,
        };
        let report = full_certificate(&consts, &params).unwrap();
        assert!(!report.identities_ok);
        assert!(!report.all_ok());
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, CertFailure::Identity { .. })));
    }

    #[test]
    fn certificate_precondition_errors() {
        let bad = CertifyParams { delta_depth: 0, ..CertifyParams::default() };
        assert!(matches!(
            full_certificate(&constants(), &bad),
            Err(CoreError::Precondition(_))
        ));
    }
}
