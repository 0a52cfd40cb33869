//! Exact multilinear polynomials in the variables `x_1, y_1, ..., x_k, y_k`.
//!
//! Monomials are subsets of the 2k variables, stored as bit masks (bit `2j`
//! is `x_{j+1}`, bit `2j+1` is `y_{j+1}`). Coefficients are exact signed
//! 128-bit integers; every operation uses checked arithmetic and reports
//! overflow instead of wrapping. Terms are kept sorted by ascending mask with
//! no zero coefficients, so equality of the term vectors is equality of
//! polynomials and serialization is canonical.
//!
//! Only support-disjoint multiplication is provided. Every product formed
//! here multiplies factors over distinct variable pairs, which keeps
//! multilinearity a structural guarantee rather than a runtime check on
//! exponents.

use std::fmt;

use crate::error::{add_checked, mul_checked, neg_checked, CoreError, Result};
use crate::sigma::SignSequence;

/// Exact coefficient type. 128 bits holds every quantity this crate forms at
/// its supported sizes with ample headroom; overflow is detected, not wrapped.
pub type Coeff = i128;

/// Largest supported number of variable pairs (mask width 2k must fit u64).
pub const MAX_PAIRS: usize = 31;

/// Index of a single variable: even `2(j-1)` is `x_j`, odd `2j-1` is `y_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarIndex(usize);

impl VarIndex {
    pub fn new(index: usize) -> Self {
        VarIndex(index)
    }

    /// The x-variable of pair `j` (1-based).
    pub fn x(pair: usize) -> Self {
        assert!(pair >= 1);
        VarIndex(2 * (pair - 1))
    }

    /// The y-variable of pair `j` (1-based).
    pub fn y(pair: usize) -> Self {
        assert!(pair >= 1);
        VarIndex(2 * pair - 1)
    }

    pub fn index(self) -> usize {
        self.0
    }

    /// 1-based pair number.
    pub fn pair(self) -> usize {
        self.0 / 2 + 1
    }

    pub fn is_x(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

impl fmt::Display for VarIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.is_x() { "x" } else { "y" }, self.pair())
    }
}

/// A squarefree monomial: the set of variables it contains, as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_mask(mask: u64) -> Self {
        Monomial(mask)
    }

    pub fn from_vars<I: IntoIterator<Item = VarIndex>>(vars: I) -> Self {
        let mut mask = 0;
        for v in vars {
            mask |= 1 << v.index();
        }
        Monomial(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    /// Total degree (number of variables present).
    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, v: VarIndex) -> bool {
        self.0 >> v.index() & 1 == 1
    }

    pub fn is_constant(self) -> bool {
        self.0 == 0
    }

    /// Variables in ascending index order.
    pub fn vars(self) -> impl Iterator<Item = VarIndex> {
        let mask = self.0;
        (0..64).filter(move |i| mask >> i & 1 == 1).map(VarIndex)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return f.write_str("1");
        }
        let mut first = true;
        for v in self.vars() {
            if !first {
                f.write_str("*")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Sign classification of a polynomial's stored (nonzero) coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignPattern {
    /// No stored terms.
    Zero,
    /// Every coefficient > 0.
    AllNonneg,
    /// Every coefficient < 0.
    AllNonpos,
    /// Coefficients of both signs; carries one witness of each.
    Mixed {
        pos: (Monomial, Coeff),
        neg: (Monomial, Coeff),
    },
}

impl SignPattern {
    /// The common sign, if there is one (`None` for Zero and Mixed).
    pub fn uniform_sign(&self) -> Option<i8> {
        match self {
            SignPattern::AllNonneg => Some(1),
            SignPattern::AllNonpos => Some(-1),
            _ => None,
        }
    }

    pub fn is_mixed(&self) -> bool {
        matches!(self, SignPattern::Mixed { .. })
    }

    /// Stable tag for serialization.
    pub fn tag(&self) -> &'static str {
        match self {
            SignPattern::Zero => "zero",
            SignPattern::AllNonneg => "all_nonneg",
            SignPattern::AllNonpos => "all_nonpos",
            SignPattern::Mixed { .. } => "mixed",
        }
    }
}

/// Exact multilinear polynomial in `pairs` variable pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultilinearPoly {
    pairs: usize,
    /// Sorted by ascending monomial mask; no zero coefficients.
    terms: Vec<(Monomial, Coeff)>,
}

/// Dense substitution is used while the coefficient table fits comfortably in
/// memory (2^20 entries = 16 MiB); beyond that a sparse merge path takes over.
const DENSE_SUBST_MAX_SLOTS: usize = 20;

impl MultilinearPoly {
    pub fn zero(pairs: usize) -> Self {
        MultilinearPoly { pairs, terms: Vec::new() }
    }

    pub fn constant(pairs: usize, c: Coeff) -> Self {
        let terms = if c == 0 { Vec::new() } else { vec![(Monomial::ONE, c)] };
        MultilinearPoly { pairs, terms }
    }

    pub fn one(pairs: usize) -> Self {
        Self::constant(pairs, 1)
    }

    /// The single-variable polynomial `v`.
    pub fn variable(pairs: usize, v: VarIndex) -> Result<Self> {
        Self::term(pairs, Monomial::from_vars([v]), 1)
    }

    /// The polynomial `c * m`.
    pub fn term(pairs: usize, m: Monomial, c: Coeff) -> Result<Self> {
        Self::from_terms(pairs, [(m, c)])
    }

    /// Builds a polynomial from arbitrary terms: validates variable indices,
    /// merges duplicate monomials exactly, and drops zero coefficients.
    pub fn from_terms<I>(pairs: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Coeff)>,
    {
        if pairs > MAX_PAIRS {
            return Err(CoreError::TooManyPairs(pairs));
        }
        let width = 2 * pairs;
        let mut collected: Vec<(Monomial, Coeff)> = terms.into_iter().collect();
        for (m, _) in &collected {
            if width < 64 && m.mask() >> width != 0 {
                let bad = (64 - m.mask().leading_zeros() - 1) as usize;
                return Err(CoreError::VarOutOfRange { index: bad, pairs });
            }
        }
        collected.sort_unstable_by_key(|(m, _)| m.mask());
        let mut merged: Vec<(Monomial, Coeff)> = Vec::with_capacity(collected.len());
        for (m, c) in collected {
            match merged.last_mut() {
                Some((last, acc)) if *last == m => {
                    *acc = add_checked(*acc, c, "term merge")?;
                }
                _ => merged.push((m, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0);
        Ok(MultilinearPoly { pairs, terms: merged })
    }

    /// Number of variable pairs k (the polynomial lives in 2k variables).
    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending mask order.
    pub fn terms(&self) -> &[(Monomial, Coeff)] {
        &self.terms
    }

    /// Union of all monomial masks.
    pub fn support(&self) -> u64 {
        self.terms.iter().fold(0, |acc, (m, _)| acc | m.mask())
    }

    /// Reinterprets the polynomial in a larger ambient variable set. Masks
    /// are unchanged; only the pair count grows.
    pub fn lift_to(&self, pairs: usize) -> Result<Self> {
        if pairs < self.pairs {
            return Err(CoreError::PairMismatch { left: self.pairs, right: pairs });
        }
        if pairs > MAX_PAIRS {
            return Err(CoreError::TooManyPairs(pairs));
        }
        Ok(MultilinearPoly { pairs, terms: self.terms.clone() })
    }

    /// Coefficient-wise sum. Both operands must share the same pair count.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.pairs != other.pairs {
            return Err(CoreError::PairMismatch { left: self.pairs, right: other.pairs });
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = self.terms[i];
            let (mb, cb) = other.terms[j];
            match ma.mask().cmp(&mb.mask()) {
                std::cmp::Ordering::Less => {
                    out.push((ma, ca));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((mb, cb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = add_checked(ca, cb, "add")?;
                    if c != 0 {
                        out.push((ma, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Ok(MultilinearPoly { pairs: self.pairs, terms: out })
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: Coeff) -> Result<Self> {
        if c == 0 {
            return Ok(Self::zero(self.pairs));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(m, coeff) in &self.terms {
            terms.push((m, mul_checked(coeff, c, "scale")?));
        }
        Ok(MultilinearPoly { pairs: self.pairs, terms })
    }

    /// Product of polynomials with disjoint variable supports. Disjointness
    /// makes the product multilinear and every pairwise monomial union
    /// distinct, so no merging is needed.
    pub fn mul_disjoint(&self, other: &Self) -> Result<Self> {
        if self.pairs != other.pairs {
            return Err(CoreError::PairMismatch { left: self.pairs, right: other.pairs });
        }
        let shared = self.support() & other.support();
        if shared != 0 {
            return Err(CoreError::OverlappingSupport(shared));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(ma, ca) in &self.terms {
            for &(mb, cb) in &other.terms {
                let m = Monomial::from_mask(ma.mask() | mb.mask());
                terms.push((m, mul_checked(ca, cb, "mul_disjoint")?));
            }
        }
        terms.sort_unstable_by_key(|(m, _)| m.mask());
        debug_assert!(terms.windows(2).all(|w| w[0].0 != w[1].0));
        Ok(MultilinearPoly { pairs: self.pairs, terms })
    }

    /// Replaces each variable `v` by `sigma(v) * (1 + v)` and expands.
    ///
    /// Performed as 2k sequential single-variable substitutions: splitting
    /// `p = p0 + v*p1`, the substitution maps it to `(p0 + s*p1) + v*(s*p1)`.
    pub fn substitute_signs(&self, sigma: &SignSequence) -> Result<Self> {
        if sigma.len() != 2 * self.pairs {
            return Err(CoreError::SigmaLength { expected: 2 * self.pairs, actual: sigma.len() });
        }
        if self.terms.is_empty() {
            return Ok(self.clone());
        }
        if 2 * self.pairs <= DENSE_SUBST_MAX_SLOTS {
            self.substitute_signs_dense(sigma)
        } else {
            self.substitute_signs_sparse(sigma)
        }
    }

    fn substitute_signs_dense(&self, sigma: &SignSequence) -> Result<Self> {
        let slots = 2 * self.pairs;
        let size = 1usize << slots;
        let mut table = vec![0i128; size];
        for &(m, c) in &self.terms {
            table[m.mask() as usize] = c;
        }
        for slot in 0..slots {
            let bit = 1usize << slot;
            let negate = sigma.sign(slot) == -1;
            for low in 0..size {
                if low & bit != 0 {
                    continue;
                }
                let hi = low | bit;
                let mut top = table[hi];
                if top == 0 {
                    continue;
                }
                if negate {
                    top = neg_checked(top, "substitute_signs")?;
                    table[hi] = top;
                }
                table[low] = add_checked(table[low], top, "substitute_signs")?;
            }
        }
        let terms = table
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c != 0)
            .map(|(mask, &c)| (Monomial::from_mask(mask as u64), c))
            .collect();
        Ok(MultilinearPoly { pairs: self.pairs, terms })
    }

    fn substitute_signs_sparse(&self, sigma: &SignSequence) -> Result<Self> {
        let mut current = self.terms.clone();
        for slot in 0..2 * self.pairs {
            let bit = 1u64 << slot;
            let s = Coeff::from(sigma.sign(slot));
            let mut next = Vec::with_capacity(current.len() * 2);
            for &(m, c) in &current {
                if m.mask() & bit != 0 {
                    let sc = mul_checked(c, s, "substitute_signs")?;
                    next.push((Monomial::from_mask(m.mask() & !bit), sc));
                    next.push((m, sc));
                } else {
                    next.push((m, c));
                }
            }
            next.sort_unstable_by_key(|(m, _)| m.mask());
            let mut merged: Vec<(Monomial, Coeff)> = Vec::with_capacity(next.len());
            for (m, c) in next {
                match merged.last_mut() {
                    Some((last, acc)) if *last == m => {
                        *acc = add_checked(*acc, c, "substitute_signs")?;
                    }
                    _ => merged.push((m, c)),
                }
            }
            merged.retain(|&(_, c)| c != 0);
            current = merged;
        }
        Ok(MultilinearPoly { pairs: self.pairs, terms: current })
    }

    /// Exact value at an integer point of length 2k.
    pub fn evaluate(&self, point: &[Coeff]) -> Result<Coeff> {
        if point.len() != 2 * self.pairs {
            return Err(CoreError::PointLength { expected: 2 * self.pairs, actual: point.len() });
        }
        let mut total: Coeff = 0;
        for &(m, c) in &self.terms {
            let mut value = c;
            let mut mask = m.mask();
            while mask != 0 {
                let idx = mask.trailing_zeros() as usize;
                value = mul_checked(value, point[idx], "evaluate")?;
                mask &= mask - 1;
            }
            total = add_checked(total, value, "evaluate")?;
        }
        Ok(total)
    }

    /// Classifies the signs of the stored coefficients.
    pub fn sign_pattern(&self) -> SignPattern {
        let mut pos: Option<(Monomial, Coeff)> = None;
        let mut neg: Option<(Monomial, Coeff)> = None;
        for &(m, c) in &self.terms {
            if c > 0 && pos.is_none() {
                pos = Some((m, c));
            } else if c < 0 && neg.is_none() {
                neg = Some((m, c));
            }
            if pos.is_some() && neg.is_some() {
                break;
            }
        }
        match (pos, neg) {
            (None, None) => SignPattern::Zero,
            (Some(_), None) => SignPattern::AllNonneg,
            (None, Some(_)) => SignPattern::AllNonpos,
            (Some(p), Some(n)) => SignPattern::Mixed { pos: p, neg: n },
        }
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// Coefficient of `m` (0 when absent).
    pub fn coefficient(&self, m: Monomial) -> Coeff {
        self.terms
            .binary_search_by_key(&m.mask(), |(t, _)| t.mask())
            .map(|i| self.terms[i].1)
            .unwrap_or(0)
    }

    /// JSON form: `{"k": <int>, "terms": [{"vars": [...], "coeff": "<dec>"}]}`
    /// with coefficients as decimal strings.
    pub fn to_json_value(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                serde_json::json!({
                    "vars": m.vars().map(VarIndex::index).collect::<Vec<_>>(),
                    "coeff": c.to_string(),
                })
            })
            .collect();
        serde_json::json!({ "k": self.pairs, "terms": terms })
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| CoreError::Parse("polynomial JSON must be an object".into()))?;
        let pairs = obj
            .get("k")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| CoreError::Parse("missing or invalid \"k\"".into()))?
            as usize;
        let raw_terms = obj
            .get("terms")
            .and_then(|v| v.as_array())
            .ok_or_else(|| CoreError::Parse("missing or invalid \"terms\"".into()))?;
        let mut terms = Vec::with_capacity(raw_terms.len());
        for t in raw_terms {
            let vars = t
                .get("vars")
                .and_then(|v| v.as_array())
                .ok_or_else(|| CoreError::Parse("term missing \"vars\"".into()))?;
            let mut mask = 0u64;
            for v in vars {
                let idx = v
                    .as_u64()
                    .ok_or_else(|| CoreError::Parse("variable index must be an integer".into()))?;
                if idx >= 64 {
                    return Err(CoreError::VarOutOfRange { index: idx as usize, pairs });
                }
                mask |= 1 << idx;
            }
            let coeff = match t.get("coeff") {
                Some(serde_json::Value::String(s)) => s
                    .parse::<Coeff>()
                    .map_err(|e| CoreError::Parse(format!("bad coefficient {s:?}: {e}")))?,
                Some(serde_json::Value::Number(n)) => n
                    .as_i128()
                    .ok_or_else(|| CoreError::Parse(format!("bad coefficient {n}")))?,
                _ => return Err(CoreError::Parse("term missing \"coeff\"".into())),
            };
            terms.push((Monomial::from_mask(mask), coeff));
        }
        Self::from_terms(pairs, terms)
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CoreError::Parse(e.to_string()))?;
        Self::from_json_value(&value)
    }

    /// CSV rows `mask,coeff`, one term per line, ascending mask.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (m, c) in &self.terms {
            out.push_str(&format!("{},{}\n", m.mask(), c));
        }
        out
    }
}

impl fmt::Display for MultilinearPoly {
    /// Canonical text form: terms by ascending mask, explicit coefficient on
    /// every non-constant term, constant printed bare, e.g. `2 - 4*x1*y1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let magnitude = c.unsigned_abs();
            if i == 0 {
                if *c < 0 {
                    f.write_str("-")?;
                }
            } else if *c < 0 {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_constant() {
                write!(f, "{magnitude}")?;
            } else {
                write!(f, "{magnitude}*{m}")?;
            }
        }
        Ok(())
    }
}
