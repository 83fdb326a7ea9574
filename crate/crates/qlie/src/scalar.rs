//! Exact coefficient arithmetic: Laurent polynomials over the rationals in a
//! set of named symbols, with formal quotients where a division does not
//! resolve to a Laurent polynomial.
//!
//! The symbol set is open-ended (`q`, a global constant `c`, deformation
//! parameters `p{i}{j}`, ad-hoc test symbols). Parameter symbols come in
//! inverse pairs: `p21` is never stored, it is rewritten to `p12^-1` at
//! construction and at parse time.
//!
//! Two evaluation regimes are supported: fully symbolic normalization (a
//! residual is accepted only if it normalizes to the literal zero) and exact
//! rational evaluation at a sample point (used by the linear solver).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number used for coefficients and sample points.
pub type Rat = BigRational;

/// Build a rational from a numerator/denominator pair of machine integers.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("no value supplied for symbol `{0}`")]
    MissingSymbol(String),
    #[error("symbol `{0}` occurs with a negative exponent but is mapped to zero")]
    ZeroSubstitutionForUnit(String),
    #[error("denominator evaluates to zero")]
    ZeroDenominator,
    #[error("parse error: {0}")]
    Parse(String),
}

/// An interned symbol name. Cheap to clone, ordered by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sparse exponent vector over the symbol set. Exponents may be negative.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub(crate) struct Monomial {
    exps: BTreeMap<Symbol, i64>,
}

impl Monomial {
    pub(crate) fn one() -> Self {
        Monomial::default()
    }

    pub(crate) fn var(sym: Symbol, exp: i64) -> Self {
        let mut exps = BTreeMap::new();
        if exp != 0 {
            exps.insert(sym, exp);
        }
        Monomial { exps }
    }

    pub(crate) fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub(crate) fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (s, e) in &other.exps {
            let v = exps.entry(s.clone()).or_insert(0);
            *v += e;
            if *v == 0 {
                exps.remove(s);
            }
        }
        Monomial { exps }
    }

    pub(crate) fn inv(&self) -> Monomial {
        Monomial {
            exps: self.exps.iter().map(|(s, e)| (s.clone(), -e)).collect(),
        }
    }

    fn total_degree(&self) -> i64 {
        self.exps.values().sum()
    }

    /// Graded-lexicographic comparison. Restricted to non-negative exponents
    /// this is a proper monomial order, which is all the division code needs.
    fn cmp_grlex(&self, other: &Monomial) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.exps.iter();
        let mut b = other.exps.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                // A missing symbol counts as exponent 0; with equal total
                // degree the side that still has symbols earlier in the
                // symbol order carries more weight there.
                (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb) {
                    Ordering::Less => return ea.cmp(&0),
                    Ordering::Greater => return 0.cmp(eb),
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {}
                        ord => return ord,
                    },
                },
                (Some((_, ea)), None) => return ea.cmp(&0),
                (None, Some((_, eb))) => return 0.cmp(eb),
            }
        }
    }

    /// Componentwise quotient when `other` divides `self` with non-negative
    /// exponents on both sides.
    fn try_div_nonneg(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = self.exps.clone();
        for (s, e) in &other.exps {
            let have = exps.get(s).copied().unwrap_or(0);
            if have < *e {
                return None;
            }
            if have == *e {
                exps.remove(s);
            } else {
                exps.insert(s.clone(), have - e);
            }
        }
        Some(Monomial { exps })
    }

    fn eval(&self, point: &BTreeMap<Symbol, Rat>) -> Result<Rat, ScalarError> {
        let mut acc = Rat::one();
        for (s, e) in &self.exps {
            let v = point
                .get(s)
                .ok_or_else(|| ScalarError::MissingSymbol(s.name().to_string()))?;
            if v.is_zero() {
                if *e < 0 {
                    return Err(ScalarError::ZeroSubstitutionForUnit(s.name().to_string()));
                }
                return Ok(Rat::zero());
            }
            let p = if *e >= 0 {
                num_traits::pow::pow(v.clone(), *e as usize)
            } else {
                num_traits::pow::pow(v.clone().recip(), (-*e) as usize)
            };
            acc *= p;
        }
        Ok(acc)
    }
}

/// Canonical Laurent polynomial: sorted terms, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub(crate) struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly::default()
    }

    pub(crate) fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub(crate) fn constant(r: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(Monomial::one(), r);
        }
        Poly { terms }
    }

    pub(crate) fn term(m: Monomial, r: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(m, r);
        }
        Poly { terms }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn as_constant(&self) -> Option<&Rat> {
        if self.terms.is_empty() {
            return None;
        }
        if self.terms.len() == 1 {
            let (m, r) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return Some(r);
            }
        }
        None
    }

    fn as_monomial(&self) -> Option<(&Monomial, &Rat)> {
        if self.terms.len() == 1 {
            let (m, r) = self.terms.iter().next().unwrap();
            Some((m, r))
        } else {
            None
        }
    }

    pub(crate) fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, m: Monomial, r: Rat) {
        if r.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(r);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += r;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, r) in &other.terms {
            out.add_term(m.clone(), r.clone());
        }
        out
    }

    pub(crate) fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, r)| (m.clone(), -r.clone())).collect(),
        }
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, r1) in &self.terms {
            for (m2, r2) in &other.terms {
                out.add_term(m1.mul(m2), r1 * r2);
            }
        }
        out
    }

    fn mul_monomial(&self, m: &Monomial, r: &Rat) -> Poly {
        if r.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(tm, tr)| (tm.mul(m), tr * r))
                .collect(),
        }
    }

    fn scale(&self, r: &Rat) -> Poly {
        self.mul_monomial(&Monomial::one(), r)
    }

    /// Monomial of per-symbol minimum exponents (0 for symbols missing from a
    /// term). Dividing by it leaves an ordinary polynomial with per-symbol
    /// minimum exponent exactly 0.
    fn content_monomial(&self) -> Monomial {
        let mut mins: BTreeMap<Symbol, i64> = BTreeMap::new();
        let mut seen: BTreeMap<Symbol, usize> = BTreeMap::new();
        for m in self.terms.keys() {
            for (s, e) in &m.exps {
                let v = mins.entry(s.clone()).or_insert(*e);
                if *e < *v {
                    *v = *e;
                }
                *seen.entry(s.clone()).or_insert(0) += 1;
            }
        }
        // A symbol absent from at least one term has implicit exponent 0 there.
        let n = self.terms.len();
        let exps: BTreeMap<Symbol, i64> = mins
            .into_iter()
            .filter_map(|(s, e)| {
                let e = if seen[&s] < n { e.min(0) } else { e };
                if e == 0 {
                    None
                } else {
                    Some((s, e))
                }
            })
            .collect();
        Monomial { exps }
    }

    fn leading_grlex(&self) -> Option<(&Monomial, &Rat)> {
        self.terms
            .iter()
            .max_by(|a, b| a.0.cmp_grlex(b.0))
    }

    /// Exact division in the Laurent ring: returns `self / div` when the
    /// quotient is again a Laurent polynomial.
    fn exact_div(&self, div: &Poly) -> Option<Poly> {
        if div.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        // Shift both operands to ordinary polynomials; divisibility is
        // preserved because monomials are units here.
        let cn = self.content_monomial();
        let cd = div.content_monomial();
        let f = self.mul_monomial(&cn.inv(), &Rat::one());
        let g = div.mul_monomial(&cd.inv(), &Rat::one());
        let (lg, lgc) = g.leading_grlex().unwrap();
        let lg = lg.clone();
        let lgc = lgc.clone();
        let mut rem = f;
        let mut quo = Poly::zero();
        while !rem.is_zero() {
            let (lr, lrc) = rem.leading_grlex().unwrap();
            let t = lr.try_div_nonneg(&lg)?;
            let c = lrc / &lgc;
            quo.add_term(t.clone(), c.clone());
            rem = rem.sub(&g.mul_monomial(&t, &c));
        }
        Some(quo.mul_monomial(&cn.mul(&cd.inv()), &Rat::one()))
    }

    fn eval(&self, point: &BTreeMap<Symbol, Rat>) -> Result<Rat, ScalarError> {
        let mut acc = Rat::zero();
        for (m, r) in &self.terms {
            acc += m.eval(point)? * r;
        }
        Ok(acc)
    }

    fn symbols(&self, out: &mut std::collections::BTreeSet<Symbol>) {
        for m in self.terms.keys() {
            for s in m.exps.keys() {
                out.insert(s.clone());
            }
        }
    }
}

/// An exact element of the coefficient field.
///
/// Stored as `num/den` with `den = 1` whenever the quotient resolves to a
/// Laurent polynomial; monomial denominators are always folded into the
/// numerator. Equality is field equality (cross multiplication), so a
/// residual is zero exactly when it is the zero element of the field.
#[derive(Clone)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    fn make(num: Poly, den: Poly) -> Scalar {
        debug_assert!(!den.is_zero());
        let mut num = num;
        let mut den = den;
        if num.is_zero() {
            return Scalar {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        // Monomial factors of the denominator are units: move them across.
        let c = den.content_monomial();
        if !c.is_one() {
            den = den.mul_monomial(&c.inv(), &Rat::one());
            num = num.mul_monomial(&c.inv(), &Rat::one());
        }
        if let Some(r) = den.as_constant() {
            let inv = r.clone().recip();
            return Scalar {
                num: num.scale(&inv),
                den: Poly::one(),
            };
        }
        if let Some(q) = num.exact_div(&den) {
            return Scalar {
                num: q,
                den: Poly::one(),
            };
        }
        // Keep the quotient; make it canonical by normalizing the leading
        // denominator coefficient to 1.
        let lc = den.leading_grlex().unwrap().1.clone();
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Scalar { num, den }
    }

    pub fn zero() -> Scalar {
        Scalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Scalar {
        Scalar {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_rat(Rat::from(BigInt::from(n)))
    }

    pub fn from_rat(r: Rat) -> Scalar {
        Scalar {
            num: Poly::constant(r),
            den: Poly::one(),
        }
    }

    /// The symbol `name` as a scalar. Parameter names of the form `p{i}{j}`
    /// with single digits are canonicalized so that `p21` becomes `p12^-1`
    /// and `p11` becomes `1`.
    pub fn var(name: &str) -> Scalar {
        if let Some((i, j)) = parse_p_name(name) {
            return Scalar::p(i, j);
        }
        Scalar {
            num: Poly::term(Monomial::var(Symbol::new(name), 1), Rat::one()),
            den: Poly::one(),
        }
    }

    /// The deformation parameter for the (0-based) basis pair `(i, j)`.
    ///
    /// Only `p_ij` with `i < j` is ever stored; the swapped pair is its
    /// inverse and the diagonal is 1. Printed names are 1-based (`p12` is the
    /// parameter for basis vectors 0 and 1), so indices must stay below 9.
    pub fn p(i: usize, j: usize) -> Scalar {
        assert!(i < 9 && j < 9, "symbolic parameters support dimensions up to 9");
        match i.cmp(&j) {
            Ordering::Equal => Scalar::one(),
            Ordering::Less => Scalar {
                num: Poly::term(Monomial::var(p_symbol(i, j), 1), Rat::one()),
                den: Poly::one(),
            },
            Ordering::Greater => Scalar {
                num: Poly::term(Monomial::var(p_symbol(j, i), -1), Rat::one()),
                den: Poly::one(),
            },
        }
    }

    /// The distinguished symbol `q`.
    pub fn q() -> Scalar {
        Scalar::var("q")
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self == &Scalar::one()
    }

    /// Re-canonicalize. All constructors and operations already produce
    /// canonical scalars, so this is idempotent; it is exposed for values
    /// rebuilt from untrusted parts (deserialization).
    pub fn normalize(&self) -> Scalar {
        Scalar::make(self.num.clone(), self.den.clone())
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        if self.den == other.den {
            return Scalar::make(self.num.add(&other.num), self.den.clone());
        }
        Scalar::make(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        Scalar::make(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn invert(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::make(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul(&other.invert()?))
    }

    /// Integer power. Panics when raising zero to a negative power.
    pub fn pow(&self, e: i64) -> Scalar {
        if e == 0 {
            return Scalar::one();
        }
        let base = if e < 0 {
            self.invert().expect("zero raised to a negative power")
        } else {
            self.clone()
        };
        let mut acc = Scalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Exact rational value at a sample point.
    pub fn evaluate(&self, point: &BTreeMap<Symbol, Rat>) -> Result<Rat, ScalarError> {
        let n = self.num.eval(point)?;
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(n / d)
    }

    /// The rational value of a constant scalar, if it is one.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        match (self.num.as_constant(), self.den.as_constant()) {
            (Some(n), Some(d)) => Some(n / d),
            _ => None,
        }
    }

    /// All symbols occurring in the scalar.
    pub fn symbols(&self) -> std::collections::BTreeSet<Symbol> {
        let mut out = std::collections::BTreeSet::new();
        self.num.symbols(&mut out);
        self.den.symbols(&mut out);
        out
    }

    /// Canonical square root of a scalar that is a perfect-square monomial
    /// (even exponents, square rational coefficient). The root's coefficient
    /// is taken positive.
    pub fn sqrt_monomial(&self) -> Option<Scalar> {
        if self.den != Poly::one() {
            return None;
        }
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        let (m, r) = self.num.as_monomial()?;
        if r.is_negative() {
            return None;
        }
        let mut exps = BTreeMap::new();
        for (s, e) in &m.exps {
            if e % 2 != 0 {
                return None;
            }
            exps.insert(s.clone(), e / 2);
        }
        let sn = r.numer().sqrt();
        let sd = r.denom().sqrt();
        if &(&sn * &sn) != r.numer() || &(&sd * &sd) != r.denom() {
            return None;
        }
        Some(Scalar {
            num: Poly::term(Monomial { exps }, Rat::new(sn, sd)),
            den: Poly::one(),
        })
    }

    /// Number of stored terms (numerator plus denominator); used to pick
    /// cheap pivots during elimination.
    pub(crate) fn complexity(&self) -> usize {
        self.num.num_terms() + self.den.num_terms()
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        // Field equality: a/b = c/d iff ad = cb.
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for Scalar {}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl std::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::add(self, rhs)
    }
}

impl std::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::sub(self, rhs)
    }
}

impl std::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::mul(self, rhs)
    }
}

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

fn p_symbol(i: usize, j: usize) -> Symbol {
    Symbol::new(&format!("p{}{}", i + 1, j + 1))
}

/// Recognize `p{i}{j}` names with two single digits, returning 0-based indices.
fn parse_p_name(name: &str) -> Option<(usize, usize)> {
    let bytes = name.as_bytes();
    if bytes.len() == 3 && bytes[0] == b'p' && bytes[1].is_ascii_digit() && bytes[2].is_ascii_digit()
    {
        let i = (bytes[1] - b'0') as usize;
        let j = (bytes[2] - b'0') as usize;
        if i >= 1 && j >= 1 {
            return Some((i - 1, j - 1));
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_term(m: &Monomial, r: &Rat, lead: bool) -> String {
    let mut s = String::new();
    let neg = r.is_negative();
    let abs = r.abs();
    if lead {
        if neg {
            s.push('-');
        }
    } else {
        s.push_str(if neg { " - " } else { " + " });
    }
    let mut parts: Vec<String> = Vec::new();
    if !abs.is_one() || m.is_one() {
        parts.push(fmt_rat(&abs));
    }
    for (sym, e) in &m.exps {
        if *e == 1 {
            parts.push(sym.name().to_string());
        } else {
            parts.push(format!("{}^{}", sym.name(), e));
        }
    }
    s.push_str(&parts.join("*"));
    s
}

fn fmt_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (idx, (m, r)) in p.terms.iter().enumerate() {
        s.push_str(&fmt_term(m, r, idx == 0));
    }
    s
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", fmt_poly(&self.num))
        } else {
            write!(f, "({})/({})", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn err(&self, msg: &str) -> ScalarError {
        ScalarError::Parse(format!("{} at byte {}", msg, self.pos))
    }

    fn parse_expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.bump();
                self.parse_product()?.neg()
            }
            Some(b'+') => {
                self.bump();
                self.parse_product()?
            }
            _ => self.parse_product()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    let t = self.parse_product()?;
                    acc = acc.add(&t);
                }
                Some(b'-') => {
                    self.bump();
                    let t = self.parse_product()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_product(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    let t = self.parse_factor()?;
                    acc = acc.mul(&t);
                }
                Some(b'/') => {
                    self.bump();
                    let t = self.parse_factor()?;
                    acc = acc.div(&t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Scalar, ScalarError> {
        let base = self.parse_atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.parse_int()?;
            if base.is_zero() && e < 0 {
                return Err(ScalarError::DivisionByZero);
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let e = self.parse_expr()?;
                if self.bump() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(b'-') => {
                self.bump();
                Ok(self.parse_factor()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.parse_int()?;
                Ok(Scalar::from_int(n))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Scalar::var(name))
            }
            _ => Err(self.err("expected a number, symbol or `(`")),
        }
    }

    fn parse_int(&mut self) -> Result<i64, ScalarError> {
        self.skip_ws();
        let mut sign = 1i64;
        if self.src.get(self.pos) == Some(&b'-') {
            sign = -1;
            self.pos += 1;
        }
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        digits
            .parse::<i64>()
            .map(|v| sign * v)
            .map_err(|e| ScalarError::Parse(e.to_string()))
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser::new(s);
        let v = p.parse_expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
