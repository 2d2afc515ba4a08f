//! Courant algebroids presented by a global frame.

use crate::linalg::{self, LinalgError, Mat, Signature};
use crate::ring::{BracketConstants, JetRing, JetVar, Monomial, RingElem, RingError};
use crate::scalar::{Rational, Scalar};
use rand::Rng;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebroidError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("Gram matrix must be constant and invertible: {0}")]
    BadGram(String),
    #[error("Lie constants do not match the ring derivations")]
    AnchorMismatch,
    #[error("jet order exhausted; raise the truncation order")]
    TruncationOverflow,
    #[error("unknown frame element `{0}`")]
    UnknownFrame(String),
}

/// Vector of ring coefficients in frame coordinates.
#[derive(Clone, PartialEq, Debug)]
pub struct Section(pub Vec<RingElem>);

impl Section {
    pub fn zero(n: usize) -> Self {
        Section(vec![RingElem::zero(); n])
    }
    pub fn basis(n: usize, i: usize) -> Self {
        let mut s = Section::zero(n);
        s.0[i] = RingElem::one();
        s
    }
    pub fn dim(&self) -> usize {
        self.0.len()
    }
    pub fn coeff(&self, i: usize) -> &RingElem {
        &self.0[i]
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
    pub fn conj(&self) -> Section {
        Section(self.0.iter().map(|c| c.conj()).collect())
    }
    pub fn is_real(&self) -> bool {
        self.0.iter().all(|c| c.is_real())
    }
    pub fn re(&self) -> Section {
        Section(self.0.iter().map(|c| c.re()).collect())
    }
    pub fn im(&self) -> Section {
        Section(self.0.iter().map(|c| c.im()).collect())
    }
    pub fn add(&self, o: &Section) -> Section {
        Section(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
    pub fn sub(&self, o: &Section) -> Section {
        Section(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
    pub fn neg(&self) -> Section {
        Section(self.0.iter().map(|a| -a).collect())
    }
    pub fn mul(&self, f: &RingElem) -> Section {
        Section(self.0.iter().map(|a| a * f).collect())
    }
    pub fn scale(&self, c: &Scalar) -> Section {
        Section(self.0.iter().map(|a| a.scale(c)).collect())
    }
    pub fn consumed_order(&self) -> usize {
        self.0.iter().map(|c| c.consumed_order()).max().unwrap_or(0)
    }
    pub fn truncated(&self) -> bool {
        self.0.iter().any(|c| c.truncated())
    }
    /// `sum_k c_k s_k`.
    pub fn combination(n: usize, coeffs: &[RingElem], sections: &[Section]) -> Section {
        let mut out = Section::zero(n);
        for (c, s) in coeffs.iter().zip(sections) {
            if !c.is_zero() {
                out = out.add(&s.mul(c));
            }
        }
        out
    }
}

/// Endomorphism in frame coordinates; column `j` is the image of `e_j`.
#[derive(Clone, PartialEq, Debug)]
pub struct Endo(pub Mat);

impl Endo {
    pub fn identity(n: usize) -> Self {
        Endo(Mat::identity(n))
    }
    pub fn apply(&self, x: &Section) -> Section {
        Section(self.0.mul_vec(&x.0))
    }
    pub fn compose(&self, o: &Endo) -> Endo {
        Endo(self.0.mul(&o.0))
    }
    pub fn image(&self, j: usize) -> Section {
        Section(self.0.col(j))
    }
    /// Adjoint for the pairing with Gram `g`: `g^{-1} T^t g`.
    pub fn adjoint(&self, g: &Mat, g_inv: &Mat) -> Endo {
        Endo(g_inv.mul(&self.0.transpose()).mul(g))
    }
}

/// Which frame elements are tangent and which are cotangent, when known.
#[derive(Clone, Debug, PartialEq)]
pub struct Polarization {
    pub tangent: Vec<usize>,
    pub cotangent: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FramedAlgebra {
    names: Vec<String>,
    ring: JetRing,
    gram: Mat,
    gram_inv: Mat,
    table: Vec<Vec<Section>>,
    anchor: Mat,
    polarization: Option<Polarization>,
}

impl FramedAlgebra {
    /// Algebra from explicit data.  `table[i][j]` holds the coordinates of
    /// `[e_i, e_j]`; `anchor` is `N x n` with row `i` giving `a(e_i)` in the
    /// ring derivations.
    pub fn new(
        names: Vec<String>,
        ring: JetRing,
        gram: Mat,
        table: Vec<Vec<Section>>,
        anchor: Mat,
    ) -> Result<Self, AlgebroidError> {
        let n = names.len();
        if gram.rows() != n || gram.cols() != n {
            return Err(AlgebroidError::DimensionMismatch(format!("{n} frame elements, Gram {}x{}", gram.rows(), gram.cols())));
        }
        if anchor.rows() != n || anchor.cols() != ring.num_derivations() {
            return Err(AlgebroidError::DimensionMismatch(format!(
                "anchor is {}x{}, expected {n}x{}",
                anchor.rows(),
                anchor.cols(),
                ring.num_derivations()
            )));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|s| s.dim() != n)) {
            return Err(AlgebroidError::DimensionMismatch("bracket table shape".into()));
        }
        if !gram.is_constant() || !gram.is_symmetric() {
            return Err(AlgebroidError::BadGram("entries must be constant and symmetric".into()));
        }
        let gram_inv = gram.inverse().map_err(|_| AlgebroidError::BadGram("singular".into()))?;
        let table = table.into_iter().map(|row| row.into_iter().map(|s| Section(s.0.iter().map(|c| ring.reduce(c)).collect())).collect()).collect();
        let anchor = anchor.map(|c| ring.reduce(c));
        Ok(FramedAlgebra { names, ring, gram, gram_inv, table, anchor, polarization: None })
    }

    pub fn with_polarization(mut self, p: Polarization) -> Self {
        self.polarization = Some(p);
        self
    }
    pub fn polarization(&self) -> Option<&Polarization> {
        self.polarization.as_ref()
    }
    pub fn dim(&self) -> usize {
        self.names.len()
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn ring(&self) -> &JetRing {
        &self.ring
    }
    pub fn gram(&self) -> &Mat {
        &self.gram
    }
    pub fn gram_inv(&self) -> &Mat {
        &self.gram_inv
    }
    pub fn anchor_matrix(&self) -> &Mat {
        &self.anchor
    }
    pub fn table(&self, i: usize, j: usize) -> &Section {
        &self.table[i][j]
    }
    pub fn index(&self, name: &str) -> Result<usize, AlgebroidError> {
        self.names.iter().position(|n| n == name).ok_or_else(|| AlgebroidError::UnknownFrame(name.to_string()))
    }
    pub fn e(&self, i: usize) -> Section {
        Section::basis(self.dim(), i)
    }
    pub fn named(&self, name: &str) -> Result<Section, AlgebroidError> {
        Ok(self.e(self.index(name)?))
    }
    pub fn zero(&self) -> Section {
        Section::zero(self.dim())
    }

    /// Same frame and table over a different coefficient ring (for example a
    /// quotient by relations or a different truncation order).
    pub fn with_ring(&self, ring: JetRing) -> Result<Self, AlgebroidError> {
        let mut a = FramedAlgebra::new(self.names.clone(), ring, self.gram.clone(), self.table.clone(), self.anchor.clone())?;
        a.polarization = self.polarization.clone();
        Ok(a)
    }
    /// Impose relations on the coefficient ring.
    pub fn with_relations(&self, relations: &[RingElem]) -> Result<Self, AlgebroidError> {
        self.with_ring(self.ring.with_relations(relations)?)
    }

    fn check(&self, x: &Section) -> Result<(), AlgebroidError> {
        if x.dim() != self.dim() {
            return Err(AlgebroidError::DimensionMismatch(format!("section of length {} in a rank {} frame", x.dim(), self.dim())));
        }
        Ok(())
    }

    pub fn reduce(&self, x: &Section) -> Section {
        Section(x.0.iter().map(|c| self.ring.reduce(c)).collect())
    }

    pub fn inner(&self, x: &Section, y: &Section) -> Result<RingElem, AlgebroidError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.inner_unchecked(x, y))
    }
    pub(crate) fn inner_unchecked(&self, x: &Section, y: &Section) -> RingElem {
        let mut s = RingElem::zero();
        for i in 0..self.dim() {
            if x.0[i].is_zero() {
                continue;
            }
            for j in 0..self.dim() {
                let g = self.gram.get(i, j);
                if g.is_zero() || y.0[j].is_zero() {
                    continue;
                }
                s += &(&(&x.0[i] * &y.0[j]) * g);
            }
        }
        s
    }

    /// `a(x) f`.
    pub fn anchor(&self, x: &Section, f: &RingElem) -> RingElem {
        if f.is_constant() {
            return RingElem::zero();
        }
        self.apply_vector(&self.anchor_vector(x), f)
    }

    /// `sum_a v_a D_a f`.
    pub fn apply_vector(&self, v: &[RingElem], f: &RingElem) -> RingElem {
        let mut s = RingElem::zero();
        if f.is_constant() {
            return s;
        }
        for (a, c) in v.iter().enumerate() {
            if !c.is_zero() {
                s += &(c * &self.ring.derive(f, a));
            }
        }
        s
    }

    /// Coefficients of `a(x)` as a derivation vector.
    pub fn anchor_vector(&self, x: &Section) -> Vec<RingElem> {
        let n = self.ring.num_derivations();
        let mut v = vec![RingElem::zero(); n];
        for i in 0..self.dim() {
            if x.0[i].is_zero() {
                continue;
            }
            for (a, slot) in v.iter_mut().enumerate() {
                let c = self.anchor.get(i, a);
                if !c.is_zero() {
                    *slot += &(&x.0[i] * c);
                }
            }
        }
        v
    }

    /// `df`, characterised by `2<e_i, df> = a(e_i) f`.
    pub fn differential(&self, f: &RingElem) -> Section {
        if f.is_constant() {
            return self.zero();
        }
        self.differential_from(&self.derivatives(f))
    }

    /// `D_a f` for every ring derivation.
    fn derivatives(&self, f: &RingElem) -> Vec<RingElem> {
        if f.is_constant() {
            return vec![RingElem::zero(); self.ring.num_derivations()];
        }
        (0..self.ring.num_derivations()).map(|a| self.ring.derive(f, a)).collect()
    }

    fn differential_from(&self, derivs: &[RingElem]) -> Section {
        let n = self.dim();
        let half = Scalar::ratio(1, 2);
        let mut rhs = vec![RingElem::zero(); n];
        for (i, slot) in rhs.iter_mut().enumerate() {
            for (a, d) in derivs.iter().enumerate() {
                let c = self.anchor.get(i, a);
                if !c.is_zero() && !d.is_zero() {
                    *slot += &(c * d);
                }
            }
            *slot = slot.scale(&half);
        }
        Section(self.gram_inv.mul_vec(&rhs))
    }

    /// Dorfman bracket with the Leibniz extension in both slots.
    pub fn dorfman(&self, x: &Section, y: &Section) -> Result<Section, AlgebroidError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.dorfman_unchecked(x, y))
    }

    pub(crate) fn dorfman_unchecked(&self, x: &Section, y: &Section) -> Section {
        let n = self.dim();
        let mut out = self.zero();
        for i in 0..n {
            if x.0[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y.0[j].is_zero() {
                    continue;
                }
                let t = &self.table[i][j];
                let mut p: Option<RingElem> = None;
                for (k, c) in t.0.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let p = p.get_or_insert_with(|| &x.0[i] * &y.0[j]);
                    let v = if c.is_one() { p.clone() } else { &*p * c };
                    out.0[k] += &v;
                }
            }
        }
        let ax = self.anchor_vector(x);
        let ay = self.anchor_vector(y);
        let dx: Vec<Vec<RingElem>> = x.0.iter().map(|c| self.derivatives(c)).collect();
        let dy: Vec<Vec<RingElem>> = y.0.iter().map(|c| self.derivatives(c)).collect();
        for j in 0..n {
            let d = contract(&ax, &dy[j]);
            if !d.is_zero() {
                out.0[j] += &d;
            }
        }
        for i in 0..n {
            let d = contract(&ay, &dx[i]);
            if !d.is_zero() {
                out.0[i] -= &d;
            }
        }
        for i in 0..n {
            if x.0[i].is_constant() {
                continue;
            }
            let mut p = RingElem::zero();
            for j in 0..n {
                let g = self.gram.get(i, j);
                if !g.is_zero() && !y.0[j].is_zero() {
                    p += &(&y.0[j] * g);
                }
            }
            if p.is_zero() {
                continue;
            }
            let df = self.differential_from(&dx[i]);
            let p = p.scale(&Scalar::from_int(2));
            for (k, c) in df.0.iter().enumerate() {
                if !c.is_zero() {
                    out.0[k] += &(c * &p);
                }
            }
        }
        out
    }

    pub fn lie_derivative(&self, x: &Section, y: &Section) -> Result<Section, AlgebroidError> {
        self.dorfman(x, y)
    }

    /// `(L_x T)(e_j) = [x, T e_j] - T [x, e_j]`.
    pub fn lie_derivative_endo(&self, x: &Section, t: &Endo) -> Result<Endo, AlgebroidError> {
        self.check(x)?;
        let n = self.dim();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let a = self.dorfman_unchecked(x, &t.image(j));
            let b = t.apply(&self.dorfman_unchecked(x, &self.e(j)));
            cols.push(a.sub(&b).0);
        }
        Ok(Endo(Mat::from_cols(&cols)))
    }

    pub fn format_section(&self, x: &Section) -> String {
        let parts: Vec<String> = x
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let s = self.ring.format(c);
                if c.is_one() {
                    self.names[i].clone()
                } else if c.num_terms() == 1 && !s.contains(" + ") && !s.contains(" - ") {
                    format!("{s}*{}", self.names[i])
                } else {
                    format!("({s})*{}", self.names[i])
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    pub fn signature(&self) -> Signature {
        linalg::signature(&self.gram).expect("Gram is constant and symmetric by construction")
    }

    /// Random section with coefficients of jet order zero and degree at most
    /// `degree` in the ring generators (constants when the ring has none).
    pub fn random_section(&self, rng: &mut impl Rng, degree: u32) -> Section {
        let mut s = self.zero();
        for i in 0..self.dim() {
            if rng.gen_bool(0.3) {
                continue;
            }
            s.0[i] = random_coefficient(&self.ring, rng, degree);
        }
        s
    }
}

pub fn random_coefficient(ring: &JetRing, rng: &mut impl Rng, degree: u32) -> RingElem {
    let g = ring.generators().len();
    let mut c = RingElem::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let k: i64 = rng.gen_range(-3..=3);
        if k == 0 {
            continue;
        }
        let mut m = Monomial::one();
        if g > 0 && degree > 0 {
            for _ in 0..rng.gen_range(0..=degree) {
                let v = JetVar::new(rng.gen_range(0..g), vec![]);
                m = m.mul(&Monomial::var(v));
            }
        }
        c += &RingElem::from_terms([(m, Scalar::from_int(k))]);
    }
    ring.reduce(&c)
}

impl AlgebroidError {
    pub fn is_truncation(&self) -> bool {
        matches!(self, AlgebroidError::TruncationOverflow)
    }
}

fn contract(v: &[RingElem], d: &[RingElem]) -> RingElem {
    let mut s = RingElem::zero();
    for (a, b) in v.iter().zip(d) {
        if !a.is_zero() && !b.is_zero() {
            s += &(a * b);
        }
    }
    s
}

/// 𝕋M for a parallelizable M: frame `X1..Xn, a1..an` with `<X_i, a_j> =
/// delta_ij / 2`, `[X_i, X_j] = c_ij^k X_k`, `[X_i, a_j] = -c_ik^j a_k`,
/// `[a_i, X_j] = c_jk^i a_k` and `[a_i, a_j] = 0`.
pub fn standard_algebra(ring: &JetRing, lie_constants: &BracketConstants) -> Result<FramedAlgebra, AlgebroidError> {
    let n = ring.num_derivations();
    if lie_constants != ring.constants() {
        return Err(AlgebroidError::AnchorMismatch);
    }
    let c = lie_constants;
    let big = 2 * n;
    let mut names: Vec<String> = (1..=n).map(|i| format!("X{i}")).collect();
    names.extend((1..=n).map(|i| format!("a{i}")));
    let mut gram = Mat::zeros(big, big);
    let half = RingElem::rational(Rational::new(1.into(), 2.into()));
    for i in 0..n {
        gram.set(i, n + i, half.clone());
        gram.set(n + i, i, half.clone());
    }
    let mut table = vec![vec![Section::zero(big); big]; big];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = c.get(i, j, k);
                if !v.eq(&Rational::from_integer(0.into())) {
                    table[i][j].0[k] = RingElem::rational(v.clone());
                }
                let w = c.get(i, k, j);
                if *w != Rational::from_integer(0.into()) {
                    table[i][n + j].0[n + k] = RingElem::rational(-w.clone());
                }
                let u = c.get(j, k, i);
                if *u != Rational::from_integer(0.into()) {
                    table[n + i][j].0[n + k] = RingElem::rational(u.clone());
                }
            }
        }
    }
    let mut anchor = Mat::zeros(big, n);
    for i in 0..n {
        anchor.set(i, i, RingElem::one());
    }
    let alg = FramedAlgebra::new(names, ring.clone(), gram, table, anchor)?;
    Ok(alg.with_polarization(Polarization { tangent: (0..n).collect(), cotangent: (n..big).collect() }))
}

/// Result of [`product_algebra`].
#[derive(Clone, Debug)]
pub struct ProductAlgebra {
    pub algebra: FramedAlgebra,
    pub renames: Vec<String>,
    pub split: usize,
    first_ring: JetRing,
}

impl ProductAlgebra {
    /// Pull back a section of the first factor.
    pub fn lift1(&self, x: &Section) -> Section {
        let mut s = self.algebra.zero();
        for (i, c) in x.0.iter().enumerate() {
            s.0[i] = self.first_ring.lift_factor(c, 0);
        }
        s
    }
    /// Pull back a section of the second factor.
    pub fn lift2(&self, x: &Section) -> Section {
        let mut s = self.algebra.zero();
        for (i, c) in x.0.iter().enumerate() {
            s.0[self.split + i] = self.first_ring.lift_factor(c, 1);
        }
        s
    }
    /// Pull back a function of the first or second factor.
    pub fn lift_fn(&self, f: &RingElem, factor: usize) -> RingElem {
        self.first_ring.lift_factor(f, factor)
    }
}

/// Frame algebra of `M1 x M2` with frames pulled back from the factors.
pub fn product_algebra(a1: &FramedAlgebra, a2: &FramedAlgebra) -> Result<ProductAlgebra, AlgebroidError> {
    let (ring, mut renames) = a1.ring.tensor(&a2.ring);
    let (n1, n2) = (a1.dim(), a2.dim());
    let n = n1 + n2;
    let mut names = a1.names.clone();
    for nm in &a2.names {
        let mut cand = nm.clone();
        let mut k = 2;
        while names.contains(&cand) {
            cand = format!("{nm}_{k}");
            k += 1;
        }
        if cand != *nm {
            renames.push(format!("{nm} -> {cand}"));
        }
        names.push(cand);
    }
    let gram = Mat::block_diag(&[&a1.gram, &a2.gram]);
    let mut table = vec![vec![Section::zero(n); n]; n];
    for i in 0..n1 {
        for j in 0..n1 {
            for k in 0..n1 {
                table[i][j].0[k] = a1.ring.lift_factor(&a1.table[i][j].0[k], 0);
            }
        }
    }
    for i in 0..n2 {
        for j in 0..n2 {
            for k in 0..n2 {
                table[n1 + i][n1 + j].0[n1 + k] = a1.ring.lift_factor(&a2.table[i][j].0[k], 1);
            }
        }
    }
    let (d1, d2) = (a1.ring.num_derivations(), a2.ring.num_derivations());
    let mut anchor = Mat::zeros(n, d1 + d2);
    for i in 0..n1 {
        for a in 0..d1 {
            anchor.set(i, a, a1.ring.lift_factor(a1.anchor.get(i, a), 0));
        }
    }
    for i in 0..n2 {
        for a in 0..d2 {
            anchor.set(n1 + i, d1 + a, a1.ring.lift_factor(a2.anchor.get(i, a), 1));
        }
    }
    let mut alg = FramedAlgebra::new(names, ring, gram, table, anchor)?;
    if let (Some(p1), Some(p2)) = (&a1.polarization, &a2.polarization) {
        let mut tangent = p1.tangent.clone();
        tangent.extend(p2.tangent.iter().map(|i| i + n1));
        let mut cotangent = p1.cotangent.clone();
        cotangent.extend(p2.cotangent.iter().map(|i| i + n1));
        alg = alg.with_polarization(Polarization { tangent, cotangent });
    }
    Ok(ProductAlgebra { algebra: alg, renames, split: n1, first_ring: a1.ring.clone() })
}

/// One checked instance of an axiom.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomInstance {
    pub axiom: &'static str,
    pub instance: String,
    pub holds: bool,
    pub residual: String,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub signature: Signature,
    pub split_signature: bool,
    pub frame_instances: usize,
    pub random_triples: usize,
    pub violations: Vec<AxiomInstance>,
    pub max_order: usize,
    pub truncated: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.split_signature && self.violations.is_empty() && !self.truncated
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "signature {} ({})", self.signature, if self.split_signature { "split" } else { "not split" })?;
        writeln!(f, "{} frame instances, {} random triples", self.frame_instances, self.random_triples)?;
        for v in &self.violations {
            writeln!(f, "violated {}: {} -> {}", v.axiom, v.instance, v.residual)?;
        }
        write!(f, "{}", if self.passed() { "valid" } else { "invalid" })
    }
}

/// Residuals of axioms (i), (ii), (iii) on one triple.
pub fn axiom_residuals(alg: &FramedAlgebra, x: &Section, y: &Section, z: &Section) -> [RingElem; 3] {
    let xy = alg.dorfman_unchecked(x, y);
    let xz = alg.dorfman_unchecked(x, z);
    let yz = alg.dorfman_unchecked(y, z);
    let lhs1 = alg.anchor(x, &alg.inner_unchecked(y, z));
    let r1 = &(&lhs1 - &alg.inner_unchecked(&xy, z)) - &alg.inner_unchecked(y, &xz);
    let lhs2 = alg.dorfman_unchecked(x, &yz);
    let rhs2 = alg.dorfman_unchecked(&xy, z).add(&alg.dorfman_unchecked(y, &xz));
    let d2 = lhs2.sub(&rhs2);
    let yx = alg.dorfman_unchecked(y, x);
    let d3 = xy.add(&yx).sub(&alg.differential(&alg.inner_unchecked(x, y)).scale(&Scalar::from_int(2)));
    [r1, section_norm(&d2), section_norm(&d3)]
}

/// First nonzero coefficient; zero iff the section is zero.
fn section_norm(s: &Section) -> RingElem {
    s.0.iter().find(|c| !c.is_zero()).cloned().unwrap_or_else(RingElem::zero)
}

/// Bracket of derivation vectors `u = sum u_a D_a`, `v = sum v_b D_b`.
pub fn vector_bracket(ring: &JetRing, u: &[RingElem], v: &[RingElem]) -> Vec<RingElem> {
    let n = ring.num_derivations();
    let c = ring.constants();
    let mut out = vec![RingElem::zero(); n];
    for a in 0..n {
        for b in 0..n {
            if u[a].is_zero() || v[b].is_zero() {
                continue;
            }
            let p = &u[a] * &v[b];
            for (k, slot) in out.iter_mut().enumerate() {
                let ck = c.get(a, b, k);
                if *ck != Rational::from_integer(0.into()) {
                    *slot += &p.scale(&Scalar::from_rational(ck.clone()));
                }
            }
        }
    }
    for (b, slot) in out.iter_mut().enumerate() {
        for a in 0..n {
            if !u[a].is_zero() {
                *slot += &(&u[a] * &ring.derive(&v[b], a));
            }
            if !v[a].is_zero() {
                *slot -= &(&v[a] * &ring.derive(&u[b], a));
            }
        }
    }
    out
}

const NAMES: [&str; 3] = ["(i) anchor-metric", "(ii) Jacobi-Leibniz", "(iii) symmetric part"];

/// Axioms (i)-(iii) on frame triples, anchor compatibility, split signature,
/// and `random` coefficient-dressed triples drawn from a seeded generator.
pub fn validate(alg: &FramedAlgebra, random: usize, seed: u64) -> ValidationReport {
    use rand::SeedableRng;
    let n = alg.dim();
    let sig = alg.signature();
    let split = matches!(sig, Signature::Nondegenerate { p, q } if p == q);
    let mut violations = Vec::new();
    let mut max_order = 0;
    let mut truncated = false;
    let mut frame_instances = 0;
    let mut note = |res: &RingElem, axiom: &'static str, instance: String, viol: &mut Vec<AxiomInstance>| {
        max_order = max_order.max(res.consumed_order());
        truncated |= res.truncated();
        if !res.is_zero() {
            viol.push(AxiomInstance { axiom, instance, holds: false, residual: alg.ring.format(res) });
        }
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r = axiom_residuals(alg, &alg.e(i), &alg.e(j), &alg.e(k));
                let inst = format!("({}, {}, {})", alg.names[i], alg.names[j], alg.names[k]);
                note(&r[0], NAMES[0], inst.clone(), &mut violations);
                note(&r[1], NAMES[1], inst.clone(), &mut violations);
                if k == 0 {
                    note(&r[2], NAMES[2], format!("({}, {})", alg.names[i], alg.names[j]), &mut violations);
                }
                frame_instances += 1;
            }
            let u = alg.anchor_vector(&alg.e(i));
            let v = alg.anchor_vector(&alg.e(j));
            let lhs = alg.anchor_vector(&alg.dorfman_unchecked(&alg.e(i), &alg.e(j)));
            let rhs = vector_bracket(&alg.ring, &u, &v);
            for (a, (l, r)) in lhs.iter().zip(&rhs).enumerate() {
                let d = l - r;
                note(
                    &d,
                    "anchor compatibility",
                    format!("({}, {}) along {}", alg.names[i], alg.names[j], alg.ring.derivations()[a]),
                    &mut violations,
                );
            }
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for t in 0..random {
        let x = alg.random_section(&mut rng, 1);
        let y = alg.random_section(&mut rng, 1);
        let z = alg.random_section(&mut rng, 1);
        let r = axiom_residuals(alg, &x, &y, &z);
        for (a, res) in r.iter().enumerate() {
            note(res, NAMES[a], format!("random triple {t}"), &mut violations);
        }
    }
    ValidationReport {
        signature: sig,
        split_signature: split,
        frame_instances,
        random_triples: random,
        violations,
        max_order,
        truncated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn su2() -> FramedAlgebra {
        let ring = JetRing::with_names(&["f", "g"], &["D1", "D2", "D3"], BracketConstants::su2(2), 3).unwrap();
        standard_algebra(&ring, &BracketConstants::su2(2)).unwrap()
    }

    #[test]
    fn su2_frame_brackets() {
        let a = su2();
        let x = |i| a.e(i);
        assert_eq!(a.dorfman(&x(0), &x(1)).unwrap(), x(2).scale(&Scalar::from_int(2)));
        assert_eq!(a.dorfman(&x(0), &x(4)).unwrap(), x(5).scale(&Scalar::from_int(2)));
        let s = x(0).add(&x(3));
        assert_eq!(a.inner(&s, &s).unwrap(), RingElem::one());
    }

    #[test]
    fn leibniz_in_second_slot() {
        let a = su2();
        let f = a.ring().gen(0);
        let lhs = a.dorfman(&a.e(0), &a.e(1).mul(&f)).unwrap();
        let rhs = a.e(2).mul(&f.scale(&Scalar::from_int(2))).add(&a.e(1).mul(&a.ring().derive(&f, 0)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn differential_of_standard_frame() {
        let a = su2();
        let f = a.ring().gen(0);
        let df = a.differential(&f);
        for i in 0..3 {
            assert_eq!(df.0[3 + i], a.ring().derive(&f, i));
            assert!(df.0[i].is_zero());
        }
        assert!(a.differential(&RingElem::int(5)).is_zero());
    }

    #[test]
    fn su2_validates() {
        let r = validate(&su2(), 20, 1);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn halved_structure_constant_is_caught() {
        let a = su2();
        let mut table: Vec<Vec<Section>> = (0..6).map(|i| (0..6).map(|j| a.table(i, j).clone()).collect()).collect();
        table[0][1] = a.e(2);
        table[1][0] = a.e(2).neg();
        let bad = FramedAlgebra::new(a.names().to_vec(), a.ring().clone(), a.gram().clone(), table, a.anchor_matrix().clone()).unwrap();
        let r = validate(&bad, 0, 0);
        assert!(r.violations.iter().any(|v| v.axiom.starts_with("(i)") || v.axiom.starts_with("(iii)")));
    }

    #[test]
    fn product_factors_commute() {
        let a = su2();
        let p = product_algebra(&a, &a).unwrap();
        assert!(!p.renames.is_empty());
        let x = p.lift1(&a.e(0));
        let y = p.lift2(&a.e(1));
        assert!(p.algebra.dorfman(&x, &y).unwrap().is_zero());
        assert!(validate(&p.algebra, 5, 2).passed());
    }
}
