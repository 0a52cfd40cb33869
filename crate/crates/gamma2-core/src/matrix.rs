//! Exact 2x2 matrix algebra: the generators of the level-2 congruence
//! subgroup, symbolic generator powers, the matrix `F_k` of trace
//! polynomials, the constant matrices `A_1..A_6`, the `M^{ij}` table, and
//! words over the certificate alphabet.
//!
//! Entry layout follows the convention `M = (a c; b d)`: `a` is the (1,1)
//! entry, `c` is (1,2), `b` is (2,1), `d` is (2,2). Note that `b` names the
//! *lower-left* entry; the trace pairing `a*f + b*h + c*t + d*g` depends on
//! this layout and silently breaks under the usual `(a b; c d)` reading.
//! Serialized forms are row-major: `[[a, c], [b, d]]`.

use std::fmt;
use std::str::FromStr;

use crate::error::{add_checked, mul_checked, neg_checked, CoreError, Result};
use crate::poly::{Coeff, MultilinearPoly, VarIndex};
use crate::sigma::SignSequence;

/// Exact-integer 2x2 matrix in the `(a c; b d)` layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    /// Entry (1,1).
    pub a: Coeff,
    /// Entry (1,2).
    pub c: Coeff,
    /// Entry (2,1).
    pub b: Coeff,
    /// Entry (2,2).
    pub d: Coeff,
}

impl IntMatrix2 {
    pub const fn new(a: Coeff, c: Coeff, b: Coeff, d: Coeff) -> Self {
        IntMatrix2 { a, c, b, d }
    }

    pub const fn identity() -> Self {
        IntMatrix2::new(1, 0, 0, 1)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let ctx = "matrix multiply";
        Ok(IntMatrix2 {
            a: add_checked(mul_checked(self.a, other.a, ctx)?, mul_checked(self.c, other.b, ctx)?, ctx)?,
            c: add_checked(mul_checked(self.a, other.c, ctx)?, mul_checked(self.c, other.d, ctx)?, ctx)?,
            b: add_checked(mul_checked(self.b, other.a, ctx)?, mul_checked(self.d, other.b, ctx)?, ctx)?,
            d: add_checked(mul_checked(self.b, other.c, ctx)?, mul_checked(self.d, other.d, ctx)?, ctx)?,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let ctx = "matrix add";
        Ok(IntMatrix2 {
            a: add_checked(self.a, other.a, ctx)?,
            c: add_checked(self.c, other.c, ctx)?,
            b: add_checked(self.b, other.b, ctx)?,
            d: add_checked(self.d, other.d, ctx)?,
        })
    }

    pub fn scale(&self, s: Coeff) -> Result<Self> {
        let ctx = "matrix scale";
        Ok(IntMatrix2 {
            a: mul_checked(self.a, s, ctx)?,
            c: mul_checked(self.c, s, ctx)?,
            b: mul_checked(self.b, s, ctx)?,
            d: mul_checked(self.d, s, ctx)?,
        })
    }

    pub fn neg(&self) -> Result<Self> {
        self.scale(-1)
    }

    /// Transpose swaps the off-diagonal entries `c` and `b`.
    pub const fn transpose(&self) -> Self {
        IntMatrix2 { a: self.a, c: self.b, b: self.c, d: self.d }
    }

    pub fn trace(&self) -> Result<Coeff> {
        add_checked(self.a, self.d, "matrix trace")
    }

    pub fn det(&self) -> Result<Coeff> {
        let ad = mul_checked(self.a, self.d, "matrix det")?;
        let cb = mul_checked(self.c, self.b, "matrix det")?;
        add_checked(ad, neg_checked(cb, "matrix det")?, "matrix det")
    }

    /// JSON form with decimal-string entries: `{"a":"..","c":"..","b":"..","d":".."}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "a": self.a.to_string(),
            "c": self.c.to_string(),
            "b": self.b.to_string(),
            "d": self.d.to_string(),
        })
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self> {
        let get = |key: &str| -> Result<Coeff> {
            let v = value
                .get(key)
                .ok_or_else(|| CoreError::Parse(format!("matrix JSON missing \"{key}\"")))?;
            match v {
                serde_json::Value::String(s) => s
                    .parse()
                    .map_err(|e| CoreError::Parse(format!("bad entry {key}={s:?}: {e}"))),
                serde_json::Value::Number(n) => n
                    .as_i128()
                    .ok_or_else(|| CoreError::Parse(format!("bad entry {key}={n}"))),
                _ => Err(CoreError::Parse(format!("entry {key} must be a string"))),
            }
        };
        Ok(IntMatrix2 { a: get("a")?, c: get("c")?, b: get("b")?, d: get("d")? })
    }
}

impl fmt::Display for IntMatrix2 {
    /// Row-major literal `[[a,c],[b,d]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.c, self.b, self.d)
    }
}

impl FromStr for IntMatrix2 {
    type Err = CoreError;

    /// Parses the row-major literal `[[a,c],[b,d]]` (whitespace tolerated).
    fn from_str(s: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(s)
            .map_err(|e| CoreError::Parse(format!("matrix literal {s:?}: {e}")))?;
        let rows = value
            .as_array()
            .filter(|rows| rows.len() == 2)
            .ok_or_else(|| CoreError::Parse(format!("matrix literal {s:?} must have 2 rows")))?;
        let mut entries = [0i128; 4];
        for (r, row) in rows.iter().enumerate() {
            let cols = row
                .as_array()
                .filter(|cols| cols.len() == 2)
                .ok_or_else(|| CoreError::Parse(format!("row {r} must have 2 entries")))?;
            for (cix, v) in cols.iter().enumerate() {
                entries[2 * r + cix] = v
                    .as_i64()
                    .map(Coeff::from)
                    .or_else(|| v.as_str().and_then(|t| t.parse().ok()))
                    .ok_or_else(|| CoreError::Parse(format!("bad entry in row {r}")))?;
            }
        }
        Ok(IntMatrix2::new(entries[0], entries[1], entries[2], entries[3]))
    }
}

/// The named constant matrices used throughout the certificate checks.
///
/// Checks take this struct by reference so that tests can feed deliberately
/// corrupted copies and watch the failure reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constants {
    pub gen_a: IntMatrix2,
    pub gen_b: IntMatrix2,
    pub gen_a_inv: IntMatrix2,
    pub gen_b_inv: IntMatrix2,
    pub e: IntMatrix2,
    pub a1: IntMatrix2,
    pub a2: IntMatrix2,
    pub a3: IntMatrix2,
    pub a4: IntMatrix2,
    pub a5: IntMatrix2,
    pub a6: IntMatrix2,
    pub a2t: IntMatrix2,
    pub a3t: IntMatrix2,
    pub a4t: IntMatrix2,
}

/// The generators, their inverses, the identity, and `A_1..A_6` with the
/// transposes `A_2^t, A_3^t, A_4^t`.
pub fn constants() -> Constants {
    let a2 = IntMatrix2::new(2, 1, 0, 0);
    let a3 = IntMatrix2::new(2, -1, 0, 0);
    let a4 = IntMatrix2::new(3, 2, -2, -1);
    Constants {
        gen_a: IntMatrix2::new(1, 2, 0, 1),
        gen_b: IntMatrix2::new(1, 0, -2, 1),
        gen_a_inv: IntMatrix2::new(1, -2, 0, 1),
        gen_b_inv: IntMatrix2::new(1, 0, 2, 1),
        e: IntMatrix2::identity(),
        a1: IntMatrix2::new(1, 0, 0, 0),
        a2,
        a3,
        a4,
        a5: IntMatrix2::new(5, 2, 2, 1),
        a6: IntMatrix2::new(5, -2, -2, 1),
        a2t: a2.transpose(),
        a3t: a3.transpose(),
        a4t: a4.transpose(),
    }
}

/// 2x2 matrix with multilinear polynomial entries, in the `F_k` layout
/// `(f h; t g)`: `f` is (1,1), `h` is (1,2), `t` is (2,1), `g` is (2,2).
///
/// For any product of symbolic generator powers the determinant `f*g - h*t`
/// is the constant polynomial 1 (each factor has determinant 1); this is
/// checked by the test suites rather than enforced at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix2 {
    pub f: MultilinearPoly,
    pub h: MultilinearPoly,
    pub t: MultilinearPoly,
    pub g: MultilinearPoly,
}

impl PolyMatrix2 {
    pub fn identity(pairs: usize) -> Self {
        PolyMatrix2 {
            f: MultilinearPoly::one(pairs),
            h: MultilinearPoly::zero(pairs),
            t: MultilinearPoly::zero(pairs),
            g: MultilinearPoly::one(pairs),
        }
    }

    pub fn pairs(&self) -> usize {
        self.f.pairs()
    }

    /// Matrix product; entry products must have disjoint variable supports.
    pub fn mul_disjoint(&self, other: &Self) -> Result<Self> {
        Ok(PolyMatrix2 {
            f: self.f.mul_disjoint(&other.f)?.add(&self.h.mul_disjoint(&other.t)?)?,
            h: self.f.mul_disjoint(&other.h)?.add(&self.h.mul_disjoint(&other.g)?)?,
            t: self.t.mul_disjoint(&other.f)?.add(&self.g.mul_disjoint(&other.t)?)?,
            g: self.t.mul_disjoint(&other.h)?.add(&self.g.mul_disjoint(&other.g)?)?,
        })
    }

    /// Trace `f + g`.
    pub fn trace(&self) -> Result<MultilinearPoly> {
        self.f.add(&self.g)
    }

    /// Determinant evaluated at an integer point (the full determinant is not
    /// multilinear, so it is probed by evaluation).
    pub fn det_at(&self, point: &[Coeff]) -> Result<Coeff> {
        let ctx = "det_at";
        let fg = mul_checked(self.f.evaluate(point)?, self.g.evaluate(point)?, ctx)?;
        let ht = mul_checked(self.h.evaluate(point)?, self.t.evaluate(point)?, ctx)?;
        add_checked(fg, neg_checked(ht, ctx)?, ctx)
    }

    /// Entries with their canonical names, row-major.
    pub fn entries(&self) -> [(&'static str, &MultilinearPoly); 4] {
        [("f", &self.f), ("h", &self.h), ("t", &self.t), ("g", &self.g)]
    }
}

/// Signed symbolic exponent flavor for the generator powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerKind {
    /// `A^{x_j}` resp. `B^{y_j}`: exponent is the bare variable.
    Raw,
    /// `A^{s(1+x_j)}` resp. `B^{s(1+y_j)}`: the substituted exponent.
    Substituted(i8),
}

/// `A` raised to a symbolic exponent in pair `j` (1-based), inside an ambient
/// set of `pairs` variable pairs. `A^m = (1 2m; 0 1)` for every integer `m`,
/// so the signed substituted exponent needs no symbolic inverse.
pub fn sym_power_a(pairs: usize, j: usize, kind: PowerKind) -> Result<PolyMatrix2> {
    let exponent = exponent_poly(pairs, j, VarIndex::x(j), kind)?;
    Ok(PolyMatrix2 {
        f: MultilinearPoly::one(pairs),
        h: exponent.scale(2)?,
        t: MultilinearPoly::zero(pairs),
        g: MultilinearPoly::one(pairs),
    })
}

/// `B` raised to a symbolic exponent in pair `j`: `B^n = (1 0; -2n 1)`.
pub fn sym_power_b(pairs: usize, j: usize, kind: PowerKind) -> Result<PolyMatrix2> {
    let exponent = exponent_poly(pairs, j, VarIndex::y(j), kind)?;
    Ok(PolyMatrix2 {
        f: MultilinearPoly::one(pairs),
        h: MultilinearPoly::zero(pairs),
        t: exponent.scale(-2)?,
        g: MultilinearPoly::one(pairs),
    })
}

fn exponent_poly(pairs: usize, j: usize, v: VarIndex, kind: PowerKind) -> Result<MultilinearPoly> {
    if j == 0 || j > pairs {
        return Err(CoreError::PairOutOfRange { index: j, pairs });
    }
    let var = MultilinearPoly::variable(pairs, v)?;
    match kind {
        PowerKind::Raw => Ok(var),
        PowerKind::Substituted(s) => {
            var.add(&MultilinearPoly::one(pairs))?.scale(Coeff::from(s))
        }
    }
}

/// `F_k = A^{x_1} B^{y_1} ... A^{x_k} B^{y_k}`; `F_0` is the identity.
pub fn compute_f(k: usize) -> Result<PolyMatrix2> {
    let mut acc = PolyMatrix2::identity(k);
    for j in 1..=k {
        acc = acc.mul_disjoint(&sym_power_a(k, j, PowerKind::Raw)?)?;
        acc = acc.mul_disjoint(&sym_power_b(k, j, PowerKind::Raw)?)?;
    }
    Ok(acc)
}

/// `F_k^sigma`: the product of substituted powers
/// `A^{sigma(2j-1)(1+x_j)} B^{sigma(2j)(1+y_j)}`. Equals the entrywise sign
/// substitution of [`compute_f`], which the tests cross-check.
pub fn compute_f_sigma(k: usize, sigma: &SignSequence) -> Result<PolyMatrix2> {
    if sigma.len() != 2 * k {
        return Err(CoreError::SigmaLength { expected: 2 * k, actual: sigma.len() });
    }
    let mut acc = PolyMatrix2::identity(k);
    for j in 1..=k {
        let sa = PowerKind::Substituted(sigma.sign(2 * j - 2));
        let sb = PowerKind::Substituted(sigma.sign(2 * j - 1));
        acc = acc.mul_disjoint(&sym_power_a(k, j, sa)?)?;
        acc = acc.mul_disjoint(&sym_power_b(k, j, sb)?)?;
    }
    Ok(acc)
}

/// `tr(F M) = a*f + b*h + c*t + d*g` (note `b` pairs with the (1,2) entry `h`
/// under this layout).
pub fn trace_comb(fm: &PolyMatrix2, m: &IntMatrix2) -> Result<MultilinearPoly> {
    fm.f.scale(m.a)?
        .add(&fm.h.scale(m.b)?)?
        .add(&fm.t.scale(m.c)?)?
        .add(&fm.g.scale(m.d)?)
}

/// Left factor of `M^{ij}` for `i, j` in `0..=3`, drawn from the fixed table
/// over `{4A_1, 2A_2, 2A_3, 2A_2^t, 2A_3^t, A_4, A_4^t, A_5, A_6}`.
pub fn m_table_factor(consts: &Constants, i: u8, j: u8) -> Result<IntMatrix2> {
    assert!(i < 4 && j < 4, "table indices must be 0..=3");
    match (i, j) {
        (_, 0) => consts.a1.scale(4),
        (0, 1) | (2, 1) => consts.a3.scale(2),
        (1, 1) | (3, 1) => consts.a2.scale(2),
        (0, 2) | (1, 2) => consts.a2t.scale(2),
        (2, 2) | (3, 2) => consts.a3t.scale(2),
        (0, 3) => Ok(consts.a4t),
        (1, 3) => Ok(consts.a5),
        (2, 3) => Ok(consts.a6),
        (3, 3) => Ok(consts.a4),
        _ => unreachable!(),
    }
}

/// The matrix `M^{ij}` driving the level k -> k+1 trace recursion.
pub fn m_table(m: &IntMatrix2, i: u8, j: u8) -> Result<IntMatrix2> {
    m_table_factor(&constants(), i, j)?.mul(m)
}

/// Sign exponent of the recursion: `tau(0) = tau(3) = 1`, `tau(1) = tau(2) = 0`.
pub fn tau(i: u8) -> u8 {
    match i {
        0 | 3 => 1,
        1 | 2 => 0,
        _ => panic!("extension index must be 0..=3"),
    }
}

/// One letter of the certificate alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    A4,
    A4T,
    A5,
    A6,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::A4, Generator::A4T, Generator::A5, Generator::A6];

    pub fn matrix(self) -> IntMatrix2 {
        let c = constants();
        match self {
            Generator::A4 => c.a4,
            Generator::A4T => c.a4t,
            Generator::A5 => c.a5,
            Generator::A6 => c.a6,
        }
    }

    /// Single-character text form: `4`, `T`, `5`, `6`.
    pub fn symbol(self) -> char {
        match self {
            Generator::A4 => '4',
            Generator::A4T => 'T',
            Generator::A5 => '5',
            Generator::A6 => '6',
        }
    }

    fn from_symbol(ch: char) -> Option<Self> {
        match ch {
            '4' => Some(Generator::A4),
            'T' | 't' => Some(Generator::A4T),
            '5' => Some(Generator::A5),
            '6' => Some(Generator::A6),
            _ => None,
        }
    }
}

/// A free word over the certificate alphabet; the empty word is the identity.
/// Words are kept as written: no reduction, no dedup of equal matrices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GenWord(pub Vec<Generator>);

impl GenWord {
    pub fn empty() -> Self {
        GenWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.0 {
            write!(f, "{}", g.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for GenWord {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::with_capacity(s.len());
        for ch in s.chars() {
            let g = Generator::from_symbol(ch)
                .ok_or_else(|| CoreError::Parse(format!("invalid generator symbol {ch:?}")))?;
            letters.push(g);
        }
        Ok(GenWord(letters))
    }
}

/// Ordered product of the letter matrices; the empty word gives the identity.
pub fn word_to_matrix(word: &GenWord) -> Result<IntMatrix2> {
    let mut acc = IntMatrix2::identity();
    for g in word.letters() {
        acc = acc.mul(&g.matrix())?;
    }
    Ok(acc)
}

/// Whether both strict chains `|a| > |b| > |d|` and `|a| > |c| > |d|` hold.
pub fn is_decreasing(m: &IntMatrix2) -> bool {
    let (a, b, c, d) = (m.a.unsigned_abs(), m.b.unsigned_abs(), m.c.unsigned_abs(), m.d.unsigned_abs());
    a > b && b > d && a > c && c > d
}
