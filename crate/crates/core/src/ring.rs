//! Truncated differential-jet polynomial rings.
//!
//! A jet variable `f_w` stands for `D_{w_1}(D_{w_2}(... D_{w_r}(f)))` where the
//! word `w` is kept non-decreasing.  Left multiplication by a derivation is
//! straightened with the bracket constants, so every element has one normal
//! form.  Jets of order `>= order` are dropped and the drop is recorded.

use smallvec::{smallvec, SmallVec};
use crate::scalar::{Rational, Scalar};
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RingError {
    #[error("bracket constants have wrong arity: {0}")]
    BadArity(String),
    #[error("bracket constants are not antisymmetric at ({a},{b}) -> {c}")]
    Antisymmetry { a: usize, b: usize, c: usize },
    #[error("Jacobi identity fails for derivations ({a},{b},{c}) in component {d}")]
    JacobiViolation { a: usize, b: usize, c: usize, d: usize },
    #[error("generator {0} has a derivation support that is not closed under brackets")]
    SupportNotClosed(String),
    #[error("unknown name {0}")]
    UnknownName(String),
    #[error("relation has no jet variable that can be solved for linearly: {0}")]
    NonLinearRelation(String),
}

/// Inline storage for derivation words.
pub type Word = SmallVec<[u8; 6]>;

/// Jet variable: generator index and a non-decreasing derivation word.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct JetVar {
    pub gen: u16,
    pub word: Word,
}

impl JetVar {
    pub fn new(gen: usize, word: Vec<u8>) -> Self {
        let mut word = word;
        word.sort_unstable();
        JetVar { gen: gen as u16, word: Word::from_vec(word) }
    }
    pub fn order(&self) -> usize {
        self.word.len()
    }
}

impl Ord for JetVar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then(self.gen.cmp(&other.gen))
            .then(self.word.cmp(&other.word))
    }
}
impl PartialOrd for JetVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sorted list of (variable, exponent) pairs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(pub SmallVec<[(JetVar, u32); 3]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }
    pub fn var(v: JetVar) -> Self {
        Monomial(smallvec![(v, 1)])
    }
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.0[i..].iter().cloned());
        out.extend(other.0[j..].iter().cloned());
        Monomial(out)
    }
    fn lower(&self, idx: usize) -> Monomial {
        let mut v = self.0.clone();
        if v[idx].1 == 1 {
            v.remove(idx);
        } else {
            v[idx].1 -= 1;
        }
        Monomial(v)
    }
    /// Graded order: total degree first, then the largest variables.
    pub fn graded_cmp(&self, other: &Monomial) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let a = self.0.iter().rev();
            let b = other.0.iter().rev();
            for (x, y) in a.zip(b) {
                let c = x.0.cmp(&y.0).then(x.1.cmp(&y.1));
                if c != Ordering::Equal {
                    return c;
                }
            }
            self.0.len().cmp(&other.0.len())
        })
    }
    pub fn max_order(&self) -> usize {
        self.0.iter().map(|(v, _)| v.order()).max().unwrap_or(0)
    }
}

/// Polynomial in jet variables with Gaussian-rational coefficients.
#[derive(Clone, Debug, Default)]
pub struct RingElem {
    terms: BTreeMap<Monomial, Scalar>,
    consumed: u8,
    truncated: bool,
}

impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}
impl Eq for RingElem {}

impl RingElem {
    pub fn zero() -> Self {
        RingElem::default()
    }
    pub fn one() -> Self {
        RingElem::constant(Scalar::one())
    }
    pub fn constant(c: Scalar) -> Self {
        let mut r = RingElem::zero();
        if !c.is_zero() {
            r.terms.insert(Monomial::one(), c);
        }
        r
    }
    pub fn int(n: i64) -> Self {
        RingElem::constant(Scalar::from_int(n))
    }
    pub fn rational(q: Rational) -> Self {
        RingElem::constant(Scalar::from_rational(q))
    }
    pub fn i() -> Self {
        RingElem::constant(Scalar::i())
    }
    pub fn var(v: JetVar) -> Self {
        let mut r = RingElem::zero();
        r.consumed = v.order() as u8;
        r.terms.insert(Monomial::var(v), Scalar::one());
        r
    }
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut r = RingElem::zero();
        for (m, c) in terms {
            r.add_term(m, &c);
        }
        r.consumed = r.max_jet_order() as u8;
        r
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
    fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }
    fn absorb_flags(&mut self, o: &RingElem) {
        self.consumed = self.consumed.max(o.consumed);
        self.truncated |= o.truncated;
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Monomial::one()))
    }
    pub fn as_constant(&self) -> Option<Scalar> {
        if self.terms.is_empty() {
            Some(Scalar::zero())
        } else if self.is_constant() {
            self.terms.get(&Monomial::one()).cloned()
        } else {
            None
        }
    }
    /// Nonzero constant, the units of the polynomial ring.
    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }
    pub fn is_unit(&self) -> bool {
        !self.terms.is_empty() && self.is_constant()
    }
    pub fn scale(&self, c: &Scalar) -> RingElem {
        let mut r = RingElem::zero();
        r.absorb_flags(self);
        if c.is_zero() {
            return r;
        }
        if c.is_one() {
            r.terms = self.terms.clone();
            return r;
        }
        for (m, v) in &self.terms {
            r.terms.insert(m.clone(), v * c);
        }
        r
    }
    pub fn conj(&self) -> RingElem {
        let mut r = self.clone();
        for v in r.terms.values_mut() {
            *v = v.conj();
        }
        r
    }
    /// Real part; jet generators are real so this acts on coefficients.
    pub fn re(&self) -> RingElem {
        let mut r = RingElem::zero();
        r.absorb_flags(self);
        for (m, v) in &self.terms {
            r.add_term(m.clone(), &v.re_part());
        }
        r
    }
    pub fn im(&self) -> RingElem {
        let mut r = RingElem::zero();
        r.absorb_flags(self);
        for (m, v) in &self.terms {
            r.add_term(m.clone(), &v.im_part());
        }
        r
    }
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }
    pub fn max_jet_order(&self) -> usize {
        self.terms.keys().map(|m| m.max_order()).max().unwrap_or(0)
    }
    /// Highest jet order produced while computing this element, including dropped jets.
    pub fn consumed_order(&self) -> usize {
        (self.consumed as usize).max(self.max_jet_order())
    }
    pub fn truncated(&self) -> bool {
        self.truncated
    }
    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().max_by(|a, b| a.0.graded_cmp(b.0))
    }
    /// Divide by the leading coefficient so equal ideals compare equal up to units.
    pub fn monic(&self) -> RingElem {
        match self.leading() {
            Some((_, c)) => {
                let inv = c.inv().unwrap();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }
    pub fn vars(&self) -> BTreeSet<JetVar> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }
    pub fn mul_monomial(&self, m: &Monomial, c: &Scalar) -> RingElem {
        let mut r = RingElem::zero();
        r.absorb_flags(self);
        if c.is_zero() {
            return r;
        }
        for (mm, v) in &self.terms {
            r.add_term(mm.mul(m), &(v * c));
        }
        r
    }
    /// Rename jet variables (used when embedding a factor ring into a product).
    pub fn map_vars(&self, f: impl Fn(&JetVar) -> JetVar) -> RingElem {
        let mut out = RingElem::zero();
        for (m, c) in &self.terms {
            let mut nm = Monomial::one();
            for (v, e) in &m.0 {
                for _ in 0..*e {
                    nm = nm.mul(&Monomial::var(f(v)));
                }
            }
            out.add_term(nm, c);
        }
        out.consumed = self.consumed;
        out.truncated = self.truncated;
        out
    }
    pub fn pow(&self, e: u32) -> RingElem {
        let mut r = RingElem::one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }
}

impl Add for &RingElem {
    type Output = RingElem;
    fn add(self, o: &RingElem) -> RingElem {
        let mut r = self.clone();
        r.absorb_flags(o);
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c);
        }
        r
    }
}
impl Sub for &RingElem {
    type Output = RingElem;
    fn sub(self, o: &RingElem) -> RingElem {
        let mut r = self.clone();
        r.absorb_flags(o);
        for (m, c) in &o.terms {
            r.add_term(m.clone(), &-c);
        }
        r
    }
}
impl Mul for &RingElem {
    type Output = RingElem;
    fn mul(self, o: &RingElem) -> RingElem {
        if let Some(c) = constant_term_only(o) {
            let mut r = self.scale(c);
            r.absorb_flags(o);
            return r;
        }
        if let Some(c) = constant_term_only(self) {
            let mut r = o.scale(c);
            r.absorb_flags(self);
            return r;
        }
        let mut r = RingElem::zero();
        r.absorb_flags(self);
        r.absorb_flags(o);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        r
    }
}
impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        self.scale(&-Scalar::one())
    }
}
impl Add for RingElem {
    type Output = RingElem;
    fn add(self, o: RingElem) -> RingElem {
        &self + &o
    }
}
impl Sub for RingElem {
    type Output = RingElem;
    fn sub(self, o: RingElem) -> RingElem {
        &self - &o
    }
}
impl Mul for RingElem {
    type Output = RingElem;
    fn mul(self, o: RingElem) -> RingElem {
        &self * &o
    }
}
impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        -&self
    }
}
impl std::ops::AddAssign<&RingElem> for RingElem {
    fn add_assign(&mut self, o: &RingElem) {
        self.absorb_flags(o);
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c);
        }
    }
}
impl std::ops::SubAssign<&RingElem> for RingElem {
    fn sub_assign(&mut self, o: &RingElem) {
        self.absorb_flags(o);
        for (m, c) in &o.terms {
            self.add_term(m.clone(), &-c);
        }
    }
}

/// Dense structure constants `c[a][b][c]` of `[D_a, D_b] = sum_c c_{ab}^c D_c`.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketConstants {
    n: usize,
    data: Vec<Rational>,
}

impl BracketConstants {
    pub fn zero(n: usize) -> Self {
        BracketConstants { n, data: vec![Rational::zero(); n * n * n] }
    }
    /// Fill from entries with `a < b`; the `(b, a)` entries are set by antisymmetry.
    pub fn from_upper(n: usize, entries: &[(usize, usize, usize, Rational)]) -> Self {
        let mut c = BracketConstants::zero(n);
        for (a, b, k, v) in entries {
            c.set(*a, *b, *k, v.clone());
            c.set(*b, *a, *k, -v.clone());
        }
        c
    }
    /// `c_{ab}^c = s * eps_{abc}` on three derivations.
    pub fn su2(scale: i64) -> Self {
        let s = Rational::from_integer(scale.into());
        BracketConstants::from_upper(
            3,
            &[(0, 1, 2, s.clone()), (1, 2, 0, s.clone()), (0, 2, 1, -s)],
        )
    }
    pub fn from_dense(data: Vec<Vec<Vec<Rational>>>) -> Result<Self, RingError> {
        let n = data.len();
        let mut c = BracketConstants::zero(n);
        for (a, row) in data.iter().enumerate() {
            if row.len() != n {
                return Err(RingError::BadArity(format!("row {a} has {} entries, expected {n}", row.len())));
            }
            for (b, col) in row.iter().enumerate() {
                if col.len() != n {
                    return Err(RingError::BadArity(format!(
                        "entry ({a},{b}) has {} components, expected {n}",
                        col.len()
                    )));
                }
                for (k, v) in col.iter().enumerate() {
                    c.set(a, b, k, v.clone());
                }
            }
        }
        Ok(c)
    }
    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn get(&self, a: usize, b: usize, c: usize) -> &Rational {
        &self.data[(a * self.n + b) * self.n + c]
    }
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: Rational) {
        let n = self.n;
        self.data[(a * n + b) * n + c] = v;
    }
    pub fn is_abelian(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }
    pub fn validate(&self) -> Result<(), RingError> {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if *self.get(a, b, c) != -self.get(b, a, c).clone() {
                        return Err(RingError::Antisymmetry { a, b, c });
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for e in 0..n {
                        let mut s = Rational::zero();
                        for d in 0..n {
                            s += self.get(a, b, d) * self.get(d, c, e);
                            s += self.get(b, c, d) * self.get(d, a, e);
                            s += self.get(c, a, d) * self.get(d, b, e);
                        }
                        if !s.is_zero() {
                            return Err(RingError::JacobiViolation { a, b, c, d: e });
                        }
                    }
                }
            }
        }
        Ok(())
    }
    /// Block sum with another set of constants.
    pub fn direct_sum(&self, other: &BracketConstants) -> BracketConstants {
        let n = self.n + other.n;
        let mut c = BracketConstants::zero(n);
        for a in 0..self.n {
            for b in 0..self.n {
                for k in 0..self.n {
                    c.set(a, b, k, self.get(a, b, k).clone());
                }
            }
        }
        let o = self.n;
        for a in 0..other.n {
            for b in 0..other.n {
                for k in 0..other.n {
                    c.set(a + o, b + o, k + o, other.get(a, b, k).clone());
                }
            }
        }
        c
    }
}

const MAX_REDUCTION_DEPTH: usize = 64;

/// Differential polynomial ring truncated at a jet order, optionally modulo
/// linear relations solved for leading jet variables.
#[derive(Clone, Debug)]
pub struct JetRing {
    generators: Vec<String>,
    derivations: Vec<String>,
    constants: BracketConstants,
    sparse: Vec<Vec<Vec<(u8, Rational)>>>,
    order: u8,
    support: Vec<Vec<bool>>,
    rules: BTreeMap<JetVar, RingElem>,
}

impl PartialEq for JetRing {
    fn eq(&self, o: &Self) -> bool {
        self.generators == o.generators
            && self.derivations == o.derivations
            && self.constants == o.constants
            && self.order == o.order
            && self.support == o.support
            && self.rules == o.rules
    }
}

impl JetRing {
    pub fn new(
        generators: Vec<String>,
        derivations: Vec<String>,
        constants: BracketConstants,
        order: usize,
    ) -> Result<Self, RingError> {
        if constants.dim() != derivations.len() {
            return Err(RingError::BadArity(format!(
                "{} derivations but constants of dimension {}",
                derivations.len(),
                constants.dim()
            )));
        }
        if order == 0 || order > 250 {
            return Err(RingError::BadArity(format!("truncation order {order} out of range")));
        }
        if derivations.len() > 250 {
            return Err(RingError::BadArity("too many derivations".into()));
        }
        constants.validate()?;
        let n = derivations.len();
        let mut sparse = vec![vec![Vec::new(); n]; n];
        for (a, row) in sparse.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                for c in 0..n {
                    let v = constants.get(a, b, c);
                    if !v.is_zero() {
                        cell.push((c as u8, v.clone()));
                    }
                }
            }
        }
        let support = vec![vec![true; n]; generators.len()];
        Ok(JetRing {
            generators,
            derivations,
            constants,
            sparse,
            order: order as u8,
            support,
            rules: BTreeMap::new(),
        })
    }

    /// Convenience constructor from string slices.
    pub fn with_names(gens: &[&str], ders: &[&str], constants: BracketConstants, order: usize) -> Result<Self, RingError> {
        JetRing::new(
            gens.iter().map(|s| s.to_string()).collect(),
            ders.iter().map(|s| s.to_string()).collect(),
            constants,
            order,
        )
    }

    /// Restrict the derivations each generator depends on.  A generator is
    /// killed by derivations outside its support.
    pub fn with_supports(mut self, supports: Vec<Vec<bool>>) -> Result<Self, RingError> {
        if supports.len() != self.generators.len() || supports.iter().any(|s| s.len() != self.derivations.len()) {
            return Err(RingError::BadArity("support table shape".into()));
        }
        let n = self.derivations.len();
        for (g, s) in supports.iter().enumerate() {
            for a in 0..n {
                for b in 0..n {
                    if s[a] && s[b] {
                        for (c, _) in &self.sparse[a][b] {
                            if !s[*c as usize] {
                                return Err(RingError::SupportNotClosed(self.generators[g].clone()));
                            }
                        }
                    }
                }
            }
        }
        self.support = supports;
        Ok(self)
    }

    pub fn with_order(&self, order: usize) -> Self {
        let mut r = self.clone();
        r.order = order.clamp(1, 250) as u8;
        r
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }
    pub fn derivations(&self) -> &[String] {
        &self.derivations
    }
    pub fn constants(&self) -> &BracketConstants {
        &self.constants
    }
    pub fn order(&self) -> usize {
        self.order as usize
    }
    pub fn supports(&self) -> &[Vec<bool>] {
        &self.support
    }
    pub fn rules(&self) -> &BTreeMap<JetVar, RingElem> {
        &self.rules
    }
    pub fn num_derivations(&self) -> usize {
        self.derivations.len()
    }
    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }
    pub fn derivation_index(&self, name: &str) -> Option<usize> {
        self.derivations.iter().position(|g| g == name)
    }
    /// The generator as a ring element (reduced if a relation fixes it).
    pub fn gen(&self, i: usize) -> RingElem {
        self.reduce_var(&JetVar::new(i, vec![]), 0)
    }
    pub fn gen_named(&self, name: &str) -> Result<RingElem, RingError> {
        self.generator_index(name)
            .map(|i| self.gen(i))
            .ok_or_else(|| RingError::UnknownName(name.to_string()))
    }
    pub fn jet(&self, gen: usize, word: &[usize]) -> RingElem {
        let mut r = self.gen(gen);
        for a in word.iter().rev() {
            r = self.derive(&r, *a);
        }
        r
    }

    /// Apply derivation `a`.
    pub fn derive(&self, r: &RingElem, a: usize) -> RingElem {
        self.derive_depth(r, a, 0)
    }

    fn derive_depth(&self, r: &RingElem, a: usize, depth: usize) -> RingElem {
        let mut out = RingElem::zero();
        out.absorb_flags(r);
        for (m, c) in &r.terms {
            for (idx, (v, e)) in m.0.iter().enumerate() {
                let dv = self.derive_var(v, a, depth);
                out.absorb_flags(&dv);
                if dv.is_zero() {
                    continue;
                }
                let rest = m.lower(idx);
                let coef = c * &Scalar::from_int(*e as i64);
                out += &dv.mul_monomial(&rest, &coef);
            }
        }
        out
    }

    fn derive_var(&self, v: &JetVar, a: usize, depth: usize) -> RingElem {
        let mut out = RingElem::zero();
        if !self.support[v.gen as usize][a] {
            return out;
        }
        if v.word.first().is_none_or(|&w0| a as u8 <= w0) {
            let len = v.word.len() + 1;
            out.consumed = len as u8;
            if len >= self.order as usize {
                out.truncated = true;
                return out;
            }
            let mut word = Word::with_capacity(len);
            word.push(a as u8);
            word.extend_from_slice(&v.word);
            let mut red = self.reduce_var(&JetVar { gen: v.gen, word }, depth + 1);
            red.consumed = red.consumed.max(len as u8);
            return red;
        }
        for (w, c) in self.left_mul(a as u8, &v.word) {
            let len = w.len();
            out.consumed = out.consumed.max(len as u8);
            if len >= self.order as usize {
                out.truncated = true;
                continue;
            }
            let var = JetVar { gen: v.gen, word: Word::from_vec(w) };
            let red = self.reduce_var(&var, depth + 1);
            out += &red.scale(&Scalar::from_rational(c));
        }
        out
    }

    /// Straighten `D_a * D_w` into non-decreasing words.
    fn left_mul(&self, a: u8, w: &[u8]) -> BTreeMap<Vec<u8>, Rational> {
        let mut out = BTreeMap::new();
        if w.is_empty() || a <= w[0] {
            let mut word = Vec::with_capacity(w.len() + 1);
            word.push(a);
            word.extend_from_slice(w);
            out.insert(word, Rational::one());
            return out;
        }
        let w0 = w[0];
        let rest = &w[1..];
        let mut acc = |word: Vec<u8>, c: Rational| {
            let e = out.entry(word).or_insert_with(Rational::zero);
            *e += c;
        };
        for (u, c) in self.left_mul(a, rest) {
            for (u2, c2) in self.left_mul(w0, &u) {
                acc(u2, &c * &c2);
            }
        }
        for (k, coef) in &self.sparse[a as usize][w0 as usize] {
            for (u, c) in self.left_mul(*k, rest) {
                acc(u, coef * &c);
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn is_reducible(&self, v: &JetVar) -> bool {
        if self.rules.is_empty() {
            return false;
        }
        if self.rules.contains_key(v) {
            return true;
        }
        (0..v.word.len()).any(|i| {
            let mut tail = v.word.clone();
            tail.remove(i);
            self.is_reducible(&JetVar { gen: v.gen, word: tail })
        })
    }

    fn peel_routes(&self, v: &JetVar, depth: usize) -> Vec<RingElem> {
        let mut routes = Vec::new();
        let mut seen = BTreeSet::new();
        for i in 0..v.word.len() {
            let letter = v.word[i];
            if !seen.insert(letter) {
                continue;
            }
            let mut tail = v.word.clone();
            tail.remove(i);
            let tail_var = JetVar { gen: v.gen, word: tail.clone() };
            if !self.is_reducible(&tail_var) {
                continue;
            }
            let reduced_tail = self.reduce_var(&tail_var, depth + 1);
            let mut res = self.derive_depth(&reduced_tail, letter as usize, depth + 1);
            for (w, c) in self.left_mul(letter, &tail) {
                if w.as_slice() != v.word.as_slice() {
                    let lower = self.reduce_var(&JetVar { gen: v.gen, word: Word::from_vec(w) }, depth + 1);
                    res -= &lower.scale(&Scalar::from_rational(c));
                }
            }
            routes.push(res);
        }
        routes
    }

    fn reduce_var(&self, v: &JetVar, depth: usize) -> RingElem {
        if self.rules.is_empty() {
            return RingElem::var(v.clone());
        }
        assert!(depth < MAX_REDUCTION_DEPTH, "relation rules do not terminate");
        if let Some(rhs) = self.rules.get(v) {
            return rhs.clone();
        }
        if !v.word.is_empty() {
            if let Some(r) = self.peel_routes(v, depth).into_iter().next() {
                return r;
            }
        }
        RingElem::var(v.clone())
    }

    /// Normal form modulo the relation rules.
    pub fn reduce(&self, r: &RingElem) -> RingElem {
        if self.rules.is_empty() {
            return r.clone();
        }
        let mut out = RingElem::zero();
        out.absorb_flags(r);
        for (m, c) in &r.terms {
            let mut t = RingElem::constant(c.clone());
            for (v, e) in &m.0 {
                t = &t * &self.reduce_var(v, 0).pow(*e);
            }
            out += &t;
        }
        out
    }

    /// Quotient by the given relations.  Complex relations contribute their
    /// real and imaginary parts.  Each part is solved for a jet variable that
    /// occurs linearly with constant coefficient, preferring the largest one.
    /// Afterwards the system is completed at orders below the truncation
    /// order by adding the differences between alternative reduction routes.
    pub fn with_relations(&self, relations: &[RingElem]) -> Result<JetRing, RingError> {
        let mut ring = self.clone();
        let mut pending: Vec<RingElem> = Vec::new();
        for r in relations {
            pending.push(r.re());
            pending.push(r.im());
        }
        for _round in 0..8 {
            for p in pending.drain(..) {
                ring.add_rule(&p)?;
            }
            for (_, d) in ring.integrability_defects() {
                pending.push(d);
            }
            if pending.is_empty() {
                break;
            }
        }
        Ok(ring)
    }

    fn add_rule(&mut self, p: &RingElem) -> Result<(), RingError> {
        let p = self.reduce(p);
        if p.is_zero() {
            return Ok(());
        }
        let (v, c) = leading_linear_var(&p).ok_or_else(|| RingError::NonLinearRelation(self.format(&p)))?;
        let rest = &p - &RingElem::var(v.clone()).scale(&c);
        let rhs = rest.scale(&-c.inv().unwrap());
        self.rules.insert(v.clone(), rhs);
        for _ in 0..MAX_REDUCTION_DEPTH {
            let keys: Vec<JetVar> = self.rules.keys().cloned().collect();
            let mut changed = false;
            for k in keys {
                let rhs = self.rules[&k].clone();
                if rhs.vars().iter().any(|u| self.is_reducible(u)) {
                    let mut probe = self.clone();
                    probe.rules.remove(&k);
                    let red = probe.reduce(&rhs);
                    let red = if red.vars().iter().any(|u| *u == k) {
                        return Err(RingError::NonLinearRelation(self.format(&rhs)));
                    } else {
                        red
                    };
                    self.rules.insert(k, red);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(())
    }

    /// Differences between two reduction routes of the same jet, for jets of
    /// order at least two below the truncation order.
    pub fn integrability_defects(&self) -> Vec<(JetVar, RingElem)> {
        let mut out = Vec::new();
        if self.rules.is_empty() {
            return out;
        }
        let n = self.derivations.len();
        for len in 2..self.order as usize {
            for gen in 0..self.generators.len() {
                for word in sorted_words(n, len) {
                    if word.iter().any(|a| !self.support[gen][*a as usize]) {
                        continue;
                    }
                    let v = JetVar { gen: gen as u16, word: Word::from_vec(word) };
                    let mut routes = self.peel_routes(&v, 0);
                    if self.rules.contains_key(&v) {
                        routes.insert(0, self.rules[&v].clone());
                    }
                    for r in routes.iter().skip(1) {
                        let d = r - &routes[0];
                        if !d.is_zero() {
                            out.push((v.clone(), d));
                        }
                    }
                }
            }
        }
        out
    }

    /// Ring of functions on a product: generators and derivations of both
    /// factors side by side, each generator killed by the other factor's
    /// derivations.  Clashing names of the second factor get a `_2` suffix;
    /// the renamings are returned.
    pub fn tensor(&self, other: &JetRing) -> (JetRing, Vec<String>) {
        let mut renames = Vec::new();
        let mut gens = self.generators.clone();
        for g in &other.generators {
            gens.push(fresh_name(g, &gens, &mut renames));
        }
        let mut ders = self.derivations.clone();
        for d in &other.derivations {
            ders.push(fresh_name(d, &ders, &mut renames));
        }
        let (g1, n1) = (self.generators.len(), self.derivations.len());
        let n = n1 + other.derivations.len();
        let constants = self.constants.direct_sum(&other.constants);
        let mut support = Vec::new();
        for s in &self.support {
            let mut row = s.clone();
            row.resize(n, false);
            support.push(row);
        }
        for s in &other.support {
            let mut row = vec![false; n1];
            row.extend_from_slice(s);
            support.push(row);
        }
        let mut ring = JetRing::new(gens, ders, constants, self.order.max(other.order) as usize)
            .expect("direct sum of valid constants is valid")
            .with_supports(support)
            .expect("block supports are closed");
        let lift2 = |v: &JetVar| JetVar {
            gen: v.gen + g1 as u16,
            word: v.word.iter().map(|a| a + n1 as u8).collect(),
        };
        for (k, v) in &self.rules {
            ring.rules.insert(k.clone(), v.clone());
        }
        for (k, v) in &other.rules {
            ring.rules.insert(lift2(k), v.map_vars(lift2));
        }
        (ring, renames)
    }

    /// Embedding of the first (`factor = 0`) or second factor's elements into
    /// `self.tensor(other)`.
    pub fn lift_factor(&self, r: &RingElem, factor: usize) -> RingElem {
        if factor == 0 {
            return r.clone();
        }
        let (g1, n1) = (self.generators.len(), self.derivations.len());
        r.map_vars(|v| JetVar { gen: v.gen + g1 as u16, word: v.word.iter().map(|a| a + n1 as u8).collect() })
    }

    pub fn format_var(&self, v: &JetVar) -> String {
        let mut s = self.generators[v.gen as usize].clone();
        for a in v.word.iter().rev() {
            s = format!("{}({})", self.derivations[*a as usize], s);
        }
        s
    }

    /// Normal-form text, largest monomial first.
    pub fn format(&self, r: &RingElem) -> String {
        if r.is_zero() {
            return "0".to_string();
        }
        let mut terms: Vec<(&Monomial, &Scalar)> = r.terms.iter().collect();
        terms.sort_by(|a, b| b.0.graded_cmp(a.0));
        let mut out = String::new();
        for (k, (m, c)) in terms.iter().enumerate() {
            let mono: Vec<String> = m
                .0
                .iter()
                .map(|(v, e)| {
                    let n = self.format_var(v);
                    if *e == 1 {
                        n
                    } else {
                        format!("{n}^{e}")
                    }
                })
                .collect();
            let mono = mono.join("*");
            let neg = c.is_negative_real() || (c.real().is_zero() && c.imag() < Rational::zero());
            let (neg, mag) = if neg { (true, -(*c).clone()) } else { (false, (*c).clone()) };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{}", mag, mono));
            }
        }
        out
    }
}

fn constant_term_only(r: &RingElem) -> Option<&Scalar> {
    if r.terms.len() != 1 {
        return None;
    }
    let (m, c) = r.terms.iter().next().unwrap();
    m.0.is_empty().then_some(c)
}

fn fresh_name(name: &str, taken: &[String], renames: &mut Vec<String>) -> String {
    if !taken.iter().any(|t| t == name) {
        return name.to_string();
    }
    let mut k = 2;
    loop {
        let cand = format!("{name}_{k}");
        if !taken.contains(&cand) {
            renames.push(format!("{name} -> {cand}"));
            return cand;
        }
        k += 1;
    }
}

fn leading_linear_var(p: &RingElem) -> Option<(JetVar, Scalar)> {
    let mut vars: Vec<JetVar> = p.vars().into_iter().collect();
    vars.sort();
    for v in vars.into_iter().rev() {
        let mut hits = p.terms.iter().filter(|(m, _)| m.0.iter().any(|(u, _)| *u == v));
        let first = hits.next();
        if hits.next().is_some() {
            continue;
        }
        if let Some((m, c)) = first {
            if m.0.len() == 1 && m.0[0].1 == 1 {
                return Some((v, c.clone()));
            }
        }
    }
    None
}

fn sorted_words(n: usize, len: usize) -> Vec<Vec<u8>> {
    fn rec(n: usize, len: usize, start: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for a in start..n {
            cur.push(a as u8);
            rec(n, len, a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, len, 0, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}{:?}", self.gen, self.word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn su2_ring() -> JetRing {
        JetRing::with_names(&["f"], &["D1", "D2", "D3"], BracketConstants::su2(2), 3).unwrap()
    }

    #[test]
    fn commutator_of_derivations_on_su2() {
        let r = su2_ring();
        let f = r.gen(0);
        let lhs = &r.derive(&r.derive(&f, 1), 0) - &r.derive(&r.derive(&f, 0), 1);
        assert_eq!(lhs, r.derive(&f, 2).scale(&Scalar::from_int(2)));
    }

    #[test]
    fn antisymmetry_violation_rejected() {
        let mut c = BracketConstants::zero(3);
        c.set(0, 1, 2, rat(1, 1));
        c.set(1, 0, 2, rat(1, 1));
        let err = JetRing::with_names(&[], &["a", "b", "c"], c, 3).unwrap_err();
        assert!(matches!(err, RingError::Antisymmetry { .. }));
    }

    #[test]
    fn jacobi_violation_rejected() {
        // [D1,D2]=D2, [D1,D3]=D1, [D2,D3]=0 breaks Jacobi.
        let c = BracketConstants::from_upper(3, &[(0, 1, 1, rat(1, 1)), (0, 2, 0, rat(1, 1))]);
        let err = JetRing::with_names(&[], &["a", "b", "c"], c, 3).unwrap_err();
        assert!(matches!(err, RingError::JacobiViolation { .. }));
    }

    #[test]
    fn truncation_is_flagged() {
        let r = su2_ring().with_order(2);
        let f = r.gen(0);
        let d = r.derive(&r.derive(&f, 0), 0);
        assert!(d.is_zero());
        assert!(d.truncated());
        assert_eq!(d.consumed_order(), 2);
    }

    #[test]
    fn relation_substitution_and_format() {
        let r = JetRing::with_names(&["f2", "f3"], &["D1", "D2", "D3"], BracketConstants::su2(2), 3).unwrap();
        let rel = &r.jet(0, &[0]) - &r.gen(1).scale(&Scalar::from_int(2));
        let q = r.with_relations(&[rel]).unwrap();
        assert_eq!(q.jet(0, &[0]), q.gen(1).scale(&Scalar::from_int(2)));
        assert_eq!(r.format(&r.jet(0, &[0, 1])), "D1(D2(f2))");
    }

    #[test]
    fn s3_relations_complete_to_second_order() {
        let r = JetRing::with_names(&["f2", "f3"], &["D1", "D2", "D3"], BracketConstants::su2(2), 3).unwrap();
        let h = &r.gen(0) + &(&RingElem::i() * &r.gen(1));
        let dbar = &r.derive(&h, 1) + &(&RingElem::i() * &r.derive(&h, 2));
        let y1 = &r.derive(&h, 0) + &(&RingElem::i() * &h).scale(&Scalar::from_int(2));
        let q = r.with_relations(&[dbar, y1]).unwrap();
        assert_eq!(q.rules().len(), 5);
        assert!(q.integrability_defects().is_empty());
        let lap = &(&q.jet(0, &[1, 1]) + &q.jet(0, &[2, 2])) + &q.gen(0).scale(&Scalar::from_int(4));
        assert!(lap.is_zero(), "{}", q.format(&lap));
    }
}
