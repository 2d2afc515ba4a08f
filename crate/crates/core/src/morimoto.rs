//! Admissible triples, Morimoto data and products, and invariant structures on
//! products with Lie groups.

use crate::algebroid::{product_algebra, FramedAlgebra, ProductAlgebra, Section};
use crate::linalg::{self, Mat, Signature};
use crate::ring::RingElem;
use crate::scalar::Scalar;
use crate::structures::{
    crf_obstructions, normal_pair_check, normalizes, real_generators, CrfReport, Framing, NormalPairReport, Obstruction, Sgf,
    StructureError, Subbundle,
};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MorimotoError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("not admissible: {0}")]
    NotAdmissible(String),
    #[error("matrix is not orthogonal for the restricted pairing")]
    NotOrthogonal,
    #[error("equivalence violated: {0}")]
    EquivalenceViolation(String),
    #[error("Gram compatibility violated: {0}")]
    GramCompatibilityViolation(String),
    #[error("the frame of the complement is not injective")]
    BNotInjective,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

impl From<crate::algebroid::AlgebroidError> for MorimotoError {
    fn from(e: crate::algebroid::AlgebroidError) -> Self {
        MorimotoError::Structure(e.into())
    }
}
impl From<linalg::LinalgError> for MorimotoError {
    fn from(e: linalg::LinalgError) -> Self {
        MorimotoError::Structure(e.into())
    }
}

type Result<T> = std::result::Result<T, MorimotoError>;

fn reduce_mat(alg: &FramedAlgebra, m: &Mat) -> Mat {
    m.map(|x| alg.ring().reduce(x))
}

fn i_times(m: &Mat) -> Mat {
    m.scale(&Scalar::i())
}

/// `(V1, V2, Psi)` with `Psi` written on the framing vectors `V1 ++ V2` and
/// `phi` holding in column `j` the `V2`-coordinates of `phi(v1_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleTriple {
    pub v1: Framing,
    pub v2: Framing,
    pub e1p: Subbundle,
    pub e2p: Subbundle,
    pub psi: Sgf,
    pub phi: Mat,
}

impl AdmissibleTriple {
    pub fn l1(&self) -> usize {
        self.v1.len()
    }
    pub fn l2(&self) -> usize {
        self.v2.len()
    }
    /// `(A, B, C, D)` with `A: V1 -> V1`, `B: V2 -> V1`, `C: V1 -> V2`, `D: V2 -> V2`.
    pub fn blocks(&self) -> (Mat, Mat, Mat, Mat) {
        let (l1, l2) = (self.l1(), self.l2());
        let m = self.psi.matrix();
        (m.block(0, l1, 0, l1), m.block(0, l1, l1, l1 + l2), m.block(l1, l1 + l2, 0, l1), m.block(l1, l1 + l2, l1, l1 + l2))
    }
    /// `phi(v1_j)` as a section.
    pub fn phi_image(&self, alg: &FramedAlgebra, j: usize) -> Section {
        alg.reduce(&Section::combination(alg.dim(), &self.phi.col(j), &self.v2.vectors))
    }
    /// `phi` recovered from the eigenbundle: `L_Psi` generators written as
    /// `[p; q]` in `V1 ++ V2` coordinates give `phi = q p^{-1}`.
    pub fn phi_from_graph(&self, alg: &FramedAlgebra) -> Result<Mat> {
        let l = self.psi.eigenbundle(alg)?;
        let (l1, l2) = (self.l1(), self.l2());
        let mut cols = Vec::new();
        for g in l.gens() {
            let c = self.psi.e.coords(alg, g)?.ok_or_else(|| MorimotoError::NotAdmissible("eigenbundle leaves E1' + E2'".into()))?;
            cols.push(c);
        }
        let all = Mat::from_cols(&cols);
        let p = all.block(0, l1, 0, cols.len());
        let q = all.block(l1, l1 + l2, 0, cols.len());
        let pinv = p.inverse().map_err(|_| MorimotoError::NotAdmissible("eigenbundle is not a graph over V1".into()))?;
        Ok(reduce_mat(alg, &q.mul(&pinv)))
    }
}

/// Build the triple from blocks of `Psi` and its admissible isomorphism
/// `phi = -B^{-1}(A - i)`.
pub fn admissible_from_blocks(
    alg: &FramedAlgebra,
    v1: &Framing,
    v2: &Framing,
    a: &Mat,
    b: &Mat,
    c: &Mat,
    d: &Mat,
) -> Result<AdmissibleTriple> {
    let (l1, l2) = (v1.len(), v2.len());
    let e1p = v1.as_subbundle(alg)?;
    let e2p = v2.as_subbundle(alg)?;
    if !e1p.orthogonal_to(alg, &e2p)? {
        return Err(MorimotoError::NotAdmissible("E1' and E2' are not orthogonal".into()));
    }
    if !v1.vectors.iter().chain(&v2.vectors).all(|v| v.is_real()) {
        return Err(MorimotoError::NotAdmissible("framings must be real".into()));
    }
    let m = Mat::from_blocks(a, b, c, d);
    if m.rows() != l1 + l2 || m.cols() != l1 + l2 {
        return Err(MorimotoError::NotAdmissible("block shapes do not match the framings".into()));
    }
    let mut gens = v1.vectors.clone();
    gens.extend(v2.vectors.iter().cloned());
    let sub = Subbundle::new(alg, gens)?;
    let psi = Sgf::from_matrix(sub, m)?;
    let rep = psi.check(alg)?;
    if !rep.passed() {
        return Err(MorimotoError::NotAdmissible(format!("Psi is not an SGF structure ({rep})")));
    }
    if !b.is_square() || !c.is_square() || !b.det().is_unit() || !c.det().is_unit() {
        return Err(MorimotoError::NotAdmissible("blocks B and C must be invertible".into()));
    }
    let binv = b.inverse()?;
    let phi = reduce_mat(alg, &binv.mul(&a.sub(&i_times(&Mat::identity(l1)))).neg());
    let t = AdmissibleTriple { v1: v1.clone(), v2: v2.clone(), e1p, e2p, psi, phi };
    let l = t.psi.eigenbundle(alg)?;
    for j in 0..l1 {
        let g = v1.vectors[j].add(&t.phi_image(alg, j));
        if !l.contains(alg, &g)? {
            return Err(MorimotoError::NotAdmissible(format!("v1_{} + phi(v1_{}) is not in the eigenbundle", j + 1, j + 1)));
        }
    }
    if !t.phi.det().is_unit() {
        return Err(MorimotoError::NotAdmissible("phi does not map V1 onto V2".into()));
    }
    Ok(t)
}

/// `Psi0can = [[0, Id], [-Id, 0]]`, for framings with equal Gram matrices.
pub fn canonical_triple(alg: &FramedAlgebra, v1: &Framing, v2: &Framing) -> Result<AdmissibleTriple> {
    let l = v1.len();
    let z = Mat::zeros(l, l);
    let id = Mat::identity(l);
    admissible_from_blocks(alg, v1, v2, &z, &id, &id.neg(), &z)
}

/// Whether `r` preserves the Gram matrix `g`.
pub fn is_orthogonal(g: &Mat, r: &Mat) -> bool {
    r.is_square() && r.transpose().mul(g).mul(r) == *g
}

/// `(R1, R2) . Psi = R Psi R^{-1}`.
pub fn sigma_action(alg: &FramedAlgebra, t: &AdmissibleTriple, r1: &Mat, r2: &Mat) -> Result<AdmissibleTriple> {
    if !is_orthogonal(t.e1p.gram(), r1) || !is_orthogonal(t.e2p.gram(), r2) {
        return Err(MorimotoError::NotOrthogonal);
    }
    let r = Mat::block_diag(&[r1, r2]);
    let rinv = r.inverse()?;
    let m = reduce_mat(alg, &r.mul(t.psi.matrix()).mul(&rinv));
    let (l1, l2) = (t.l1(), t.l2());
    admissible_from_blocks(
        alg,
        &t.v1,
        &t.v2,
        &m.block(0, l1, 0, l1),
        &m.block(0, l1, l1, l1 + l2),
        &m.block(l1, l1 + l2, 0, l1),
        &m.block(l1, l1 + l2, l1, l1 + l2),
    )
}

/// Whether `(R1, R2)` fixes `Psi`.
pub fn stabilizes(alg: &FramedAlgebra, t: &AdmissibleTriple, r1: &Mat, r2: &Mat) -> Result<bool> {
    Ok(sigma_action(alg, t, r1, r2)?.psi.matrix() == t.psi.matrix())
}

/// `phi R1 phi^{-1}`, the partner of `R1` in the stabilizer.
pub fn stabilizer_partner(t: &AdmissibleTriple, r1: &Mat) -> Result<Mat> {
    Ok(t.phi.mul(r1).mul(&t.phi.inverse()?))
}

/// Hyperbolic rotation `diag(t, 1/t)` of a rank one null basis `(X, x)`.
pub fn hyperbolic(t: &Scalar) -> Mat {
    let inv = t.inv().expect("nonzero boost parameter");
    Mat::from_scalars(&[vec![t.clone(), Scalar::zero()], vec![Scalar::zero(), inv]])
}

/// `T (+) T^{-t}` on a null basis ordered as `(X_1..X_l, x_1..x_l)`.
pub fn gl_lift(t: &Mat) -> Result<Mat> {
    let tinv = t.inverse()?;
    Ok(Mat::block_diag(&[t, &tinv.transpose()]))
}

/// Defects `phi([v, w]) - [phi(v), phi(w)]` for framing vectors of `src`,
/// where column `j` of `phi` holds the `dst` coordinates of `phi(src_j)`.
pub fn intertwining_defects(
    alg: &FramedAlgebra,
    src: &Framing,
    src_span: &Subbundle,
    dst: &Framing,
    phi: &Mat,
) -> Result<Vec<Obstruction>> {
    let n = alg.dim();
    let img = |j: usize| alg.reduce(&Section::combination(n, &phi.col(j), &dst.vectors));
    let mut out = Vec::new();
    for a in 0..src.len() {
        for b in 0..src.len() {
            let br = alg.reduce(&alg.dorfman(&src.vectors[a], &src.vectors[b])?);
            let c = src_span.coords(alg, &br)?.ok_or_else(|| {
                MorimotoError::PreconditionFailed(format!("[v{}, v{}] leaves the span of the framing", a + 1, b + 1))
            })?;
            let mut lhs = alg.zero();
            for (k, ck) in c.iter().enumerate() {
                if !ck.is_zero() {
                    lhs = lhs.add(&img(k).mul(ck));
                }
            }
            let rhs = alg.reduce(&alg.dorfman(&img(a), &img(b))?);
            let d = alg.reduce(&lhs.sub(&rhs));
            for (m, v) in d.0.iter().enumerate() {
                if !v.is_zero() {
                    out.push(Obstruction { label: format!("phi[v{}, v{}] - [phi v{}, phi v{}] along {}", a + 1, b + 1, a + 1, b + 1, alg.names()[m]), value: v.clone() });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhiCompatReport {
    /// `V_i ⊆ I(E_i')` for both framings.
    pub precondition: bool,
    pub intertwines: Option<bool>,
    pub defects: Vec<Obstruction>,
    pub psi_crf: bool,
    pub psi_obstructions: Vec<RingElem>,
}

impl PhiCompatReport {
    pub fn agree(&self) -> bool {
        self.intertwines.is_none_or(|i| i == self.psi_crf)
    }
}

/// CRF status of `Psi` computed directly and through the intertwining test.
pub fn phi_bracket_compat(alg: &FramedAlgebra, t: &AdmissibleTriple) -> Result<PhiCompatReport> {
    let crf = crf_obstructions(alg, &t.psi)?;
    let mut precondition = true;
    for (v, e) in [(&t.v1, &t.e1p), (&t.v2, &t.e2p)] {
        for x in &v.vectors {
            precondition &= normalizes(alg, x, e)?.holds;
        }
    }
    let (intertwines, defects) = if precondition {
        let d = intertwining_defects(alg, &t.v1, &t.e1p, &t.v2, &t.phi)?;
        (Some(d.is_empty()), d)
    } else {
        (None, vec![])
    };
    Ok(PhiCompatReport { precondition, intertwines, defects, psi_crf: crf.crf(), psi_obstructions: crf.generators })
}

/// `(J1, J2, V1, V2, Psi)` with optional candidate framings `W1`, `W2` of
/// `E1`, `E2`.
#[derive(Clone, Debug, PartialEq)]
pub struct MorimotoDatum {
    pub j1: Sgf,
    pub j2: Sgf,
    pub triple: AdmissibleTriple,
    pub w1: Option<Framing>,
    pub w2: Option<Framing>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatumReport {
    pub mutually_orthogonal: bool,
    pub splits: bool,
    /// Condition 1: `V_i ⊆ I(E1'') ∩ I(E2'')`.
    pub v_normalize: bool,
    /// Condition 2 on the supplied candidates; `None` without candidates.  A
    /// failing candidate does not refute the existence of other framings.
    pub w_condition: Option<bool>,
    pub obstructions: Vec<Obstruction>,
}

impl DatumReport {
    pub fn valid(&self) -> bool {
        self.mutually_orthogonal && self.splits && self.v_normalize && self.w_condition != Some(false)
    }
}

impl MorimotoDatum {
    pub fn e1pp(&self, alg: &FramedAlgebra) -> Result<Subbundle> {
        Ok(self.j1.e.direct_sum(alg, &self.triple.e1p)?)
    }
    pub fn e2pp(&self, alg: &FramedAlgebra) -> Result<Subbundle> {
        Ok(self.j2.e.direct_sum(alg, &self.triple.e2p)?)
    }
    pub fn epp(&self, alg: &FramedAlgebra) -> Result<Subbundle> {
        Ok(self.e1pp(alg)?.direct_sum(alg, &self.e2pp(alg)?)?)
    }

    pub fn validate(&self, alg: &FramedAlgebra) -> Result<DatumReport> {
        let parts = [&self.j1.e, &self.j2.e, &self.triple.e1p, &self.triple.e2p];
        let mut mutually_orthogonal = true;
        let mut splits = true;
        for (i, a) in parts.iter().enumerate() {
            splits &= a.split_check().map(|r| r.split).unwrap_or(false);
            for b in parts.iter().skip(i + 1) {
                mutually_orthogonal &= a.orthogonal_to(alg, b)?;
            }
        }
        let (p1, p2) = (self.e1pp(alg)?, self.e2pp(alg)?);
        let mut obstructions = Vec::new();
        let check = |tag: &str, xs: &[Section], obstructions: &mut Vec<Obstruction>| -> Result<bool> {
            let mut ok = true;
            for (k, x) in xs.iter().enumerate() {
                for (name, e) in [("E1''", &p1), ("E2''", &p2)] {
                    let r = normalizes(alg, x, e)?;
                    ok &= r.holds;
                    for o in r.obstructions {
                        obstructions.push(Obstruction { label: format!("{tag}{} in I({name}): {}", k + 1, o.label), value: o.value });
                    }
                }
            }
            Ok(ok)
        };
        let v_normalize = check("v1_", &self.triple.v1.vectors, &mut obstructions)? & check("v2_", &self.triple.v2.vectors, &mut obstructions)?;
        let w_condition = match (&self.w1, &self.w2) {
            (Some(w1), Some(w2)) => {
                let spans = w1.check(alg, &self.j1.e)?.passed() && w2.check(alg, &self.j2.e)?.passed();
                let a = check("w1_", &w1.vectors, &mut obstructions)?;
                let b = check("w2_", &w2.vectors, &mut obstructions)?;
                Some(spans && a && b)
            }
            _ => None,
        };
        Ok(DatumReport { mutually_orthogonal, splits, v_normalize, w_condition, obstructions })
    }
}

/// How adaptability of one factor was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdaptRoute {
    Candidate,
    CrfLemma,
    Undecided,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorAdaptability {
    pub route: AdaptRoute,
    pub candidate: Option<bool>,
    pub crf: bool,
    pub obstructions: Vec<Obstruction>,
}

impl FactorAdaptability {
    pub fn holds(&self) -> Option<bool> {
        match self.route {
            AdaptRoute::Candidate | AdaptRoute::CrfLemma => Some(true),
            AdaptRoute::Undecided => {
                if self.candidate == Some(false) {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptabilityReport {
    pub factors: [FactorAdaptability; 2],
}

impl AdaptabilityReport {
    pub fn adaptable(&self) -> Option<bool> {
        match (self.factors[0].holds(), self.factors[1].holds()) {
            (Some(a), Some(b)) => Some(a && b),
            (Some(false), _) | (_, Some(false)) => Some(false),
            _ => None,
        }
    }
}

/// `d<J_i w, z>` must stay in `E_i''` for `w, z` in the candidate framing;
/// CRF factors are adaptable regardless.  A failing candidate of a non-CRF
/// factor is reported as not adaptable for that candidate.
pub fn adaptability_check(alg: &FramedAlgebra, datum: &MorimotoDatum) -> Result<AdaptabilityReport> {
    let mut out = Vec::new();
    for (j, w, epp) in [(&datum.j1, &datum.w1, datum.e1pp(alg)?), (&datum.j2, &datum.w2, datum.e2pp(alg)?)] {
        let crf = crf_obstructions(alg, j)?.crf();
        let mut obstructions = Vec::new();
        let candidate = match w {
            Some(w) => {
                for (a, x) in w.vectors.iter().enumerate() {
                    let jx = j.apply(alg, x)?;
                    for (b, z) in w.vectors.iter().enumerate() {
                        let f = alg.ring().reduce(&alg.inner(&jx, z)?);
                        let df = alg.reduce(&alg.differential(&f));
                        let res = epp.residual(alg, &df)?;
                        for (m, v) in res.0.iter().enumerate() {
                            if !v.is_zero() {
                                obstructions.push(Obstruction { label: format!("d<J w{}, w{}> along {}", a + 1, b + 1, alg.names()[m]), value: v.clone() });
                            }
                        }
                    }
                }
                Some(obstructions.is_empty())
            }
            None => None,
        };
        let route = if candidate == Some(true) {
            AdaptRoute::Candidate
        } else if crf {
            AdaptRoute::CrfLemma
        } else {
            AdaptRoute::Undecided
        };
        out.push(FactorAdaptability { route, candidate, crf, obstructions });
    }
    let f2 = out.pop().unwrap();
    let f1 = out.pop().unwrap();
    Ok(AdaptabilityReport { factors: [f1, f2] })
}

/// `J1 (+) J2 (+) Psi` on `E''`, generators ordered `E1, E2, V1, V2`.
pub fn morimoto_product(alg: &FramedAlgebra, datum: &MorimotoDatum) -> Result<Sgf> {
    let mut gens: Vec<Section> = datum.j1.e.gens().to_vec();
    gens.extend(datum.j2.e.gens().iter().cloned());
    gens.extend(datum.triple.psi.e.gens().iter().cloned());
    let e = Subbundle::new(alg, gens)?;
    let m = Mat::block_diag(&[datum.j1.matrix(), datum.j2.matrix(), datum.triple.psi.matrix()]);
    Ok(Sgf::from_matrix(e, m)?)
}

/// `[w1 - i J1 w1, w2 - i J2 w2]` on the candidate framings.
pub fn cross_commutation(alg: &FramedAlgebra, datum: &MorimotoDatum) -> Result<Option<Vec<Obstruction>>> {
    let (w1, w2) = match (&datum.w1, &datum.w2) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(None),
    };
    let mi = -Scalar::i();
    let mut ls = Vec::new();
    for (j, w) in [(&datum.j1, w1), (&datum.j2, w2)] {
        let mut v = Vec::new();
        for x in &w.vectors {
            v.push(alg.reduce(&x.add(&j.apply(alg, x)?.scale(&mi))));
        }
        ls.push(v);
    }
    let mut out = Vec::new();
    for (a, x) in ls[0].iter().enumerate() {
        for (b, y) in ls[1].iter().enumerate() {
            let br = alg.reduce(&alg.dorfman(x, y)?);
            for (m, v) in br.0.iter().enumerate() {
                if !v.is_zero() {
                    out.push(Obstruction { label: format!("[l1_{}, l2_{}] along {}", a + 1, b + 1, alg.names()[m]), value: v.clone() });
                }
            }
        }
    }
    Ok(Some(out))
}

/// Both sides of the Morimoto equivalence, computed independently.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub datum: DatumReport,
    pub product_crf: CrfReport,
    pub adaptability: AdaptabilityReport,
    pub normal1: NormalPairReport,
    pub normal2: NormalPairReport,
    pub psi: PhiCompatReport,
    pub cross_commutation: Option<Vec<Obstruction>>,
}

impl EquivalenceReport {
    /// `J` CRF and the datum adaptable.
    pub fn lhs(&self) -> Option<bool> {
        let crf = self.product_crf.crf();
        match self.adaptability.adaptable() {
            Some(a) => Some(crf && a),
            None if !crf => Some(false),
            None => None,
        }
    }
    /// Both pairs normal and `Psi` CRF.
    pub fn rhs(&self) -> bool {
        self.normal1.normal() && self.normal2.normal() && self.psi.psi_crf
    }
    pub fn agree(&self) -> bool {
        self.lhs().is_none_or(|l| l == self.rhs()) && self.psi.agree()
    }
    pub fn lhs_generators(&self) -> Vec<RingElem> {
        self.product_crf.generators.clone()
    }
    pub fn rhs_generators(&self) -> Vec<RingElem> {
        let mut all = self.normal1.generators.clone();
        all.extend(self.normal2.generators.iter().cloned());
        all.extend(self.psi.psi_obstructions.iter().cloned());
        real_generators(&all)
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ob = |o: Option<bool>| o.map_or("undecided".to_string(), |b| b.to_string());
        writeln!(f, "datum valid: {}", self.datum.valid())?;
        writeln!(f, "J CRF: {}", self.product_crf.crf())?;
        writeln!(f, "adaptable: {}", ob(self.adaptability.adaptable()))?;
        writeln!(f, "(J1, V1) normal: {}", self.normal1.normal())?;
        writeln!(f, "(J2, V2) normal: {}", self.normal2.normal())?;
        writeln!(f, "Psi CRF: {} (intertwining: {})", self.psi.psi_crf, ob(self.psi.intertwines))?;
        if let Some(c) = &self.cross_commutation {
            writeln!(f, "cross-commutation on candidates: {}", c.is_empty())?;
        }
        writeln!(f, "left side: {}, right side: {}", ob(self.lhs()), self.rhs())?;
        write!(f, "equivalence holds: {}", self.agree())
    }
}

/// Evaluate both sides of the Morimoto product criterion.  Disagreement on a
/// datum that passes validation is an error.
pub fn abstract_morimoto_check(alg: &FramedAlgebra, datum: &MorimotoDatum) -> Result<EquivalenceReport> {
    let dr = datum.validate(alg)?;
    let j = morimoto_product(alg, datum)?;
    let product_crf = crf_obstructions(alg, &j)?;
    let adaptability = adaptability_check(alg, datum)?;
    let normal1 = normal_pair_check(alg, &datum.j1, &datum.triple.e1p, &datum.triple.v1)?;
    let normal2 = normal_pair_check(alg, &datum.j2, &datum.triple.e2p, &datum.triple.v2)?;
    let psi = phi_bracket_compat(alg, &datum.triple)?;
    let cc = if adaptability.adaptable() == Some(true) { cross_commutation(alg, datum)? } else { None };
    let rep = EquivalenceReport { datum: dr, product_crf, adaptability, normal1, normal2, psi, cross_commutation: cc };
    if rep.datum.valid() && !rep.agree() {
        return Err(MorimotoError::EquivalenceViolation(rep.to_string()));
    }
    if let Some(c) = &rep.cross_commutation {
        if rep.datum.valid() && !c.is_empty() {
            return Err(MorimotoError::EquivalenceViolation("adaptable datum with non-commuting eigenbundles".into()));
        }
    }
    Ok(rep)
}

/// Lift a structure on one factor of a product.
pub fn lift_sgf(p: &ProductAlgebra, j: &Sgf, factor: usize) -> Result<Sgf> {
    let e = lift_subbundle(p, &j.e, factor)?;
    Ok(Sgf::from_matrix(e, j.matrix().map(|x| p.lift_fn(x, factor)))?)
}

pub fn lift_subbundle(p: &ProductAlgebra, s: &Subbundle, factor: usize) -> Result<Subbundle> {
    Ok(Subbundle::new(&p.algebra, s.gens().iter().map(|g| lift_section(p, g, factor)).collect())?)
}

pub fn lift_framing(p: &ProductAlgebra, v: &Framing, factor: usize) -> Framing {
    Framing::new(v.vectors.iter().map(|g| lift_section(p, g, factor)).collect())
}

pub fn lift_section(p: &ProductAlgebra, x: &Section, factor: usize) -> Section {
    if factor == 0 {
        p.lift1(x)
    } else {
        p.lift2(x)
    }
}

/// Conditions of an external datum checked on the factors: `V_i` and the
/// candidates `W_i` normalize `E_i''`.
pub fn external_conditions(a: &FramedAlgebra, j: &Sgf, ep: &Subbundle, v: &Framing, w: Option<&Framing>) -> Result<bool> {
    let epp = j.e.direct_sum(a, ep)?;
    let mut ok = true;
    for x in v.vectors.iter().chain(w.map(|w| w.vectors.iter()).into_iter().flatten()) {
        ok &= normalizes(a, x, &epp)?.holds;
    }
    Ok(ok)
}

/// Invariant data on `M` for a product `M x G`.
#[derive(Clone, Debug, PartialEq)]
pub struct SekiyaQuadruple {
    pub e: Subbundle,
    pub j: Sgf,
    pub v: Vec<Section>,
    pub phi: Mat,
}

/// Structure on `M x G` built from a quadruple.
#[derive(Clone, Debug)]
pub struct SekiyaStructure {
    pub product: ProductAlgebra,
    pub structure: Sgf,
    pub j: Sgf,
    pub triple: AdmissibleTriple,
    /// Gram of `{v_i}`, the image of `B`; split signature is required.
    pub image_signature: Signature,
    /// Matrix of `B^*` from `{v_i}` to the invariant frame of `TG`.
    pub b_star: Mat,
}

/// `G(phi^2 + Id)` against `<v_i, v_j>`.
fn sekiya_gram_check(g_gram: &Mat, phi: &Mat, q: &Mat) -> Result<()> {
    let n = phi.rows();
    let lhs = phi.mul(phi).add(&Mat::identity(n)).transpose().mul(g_gram);
    if lhs != *q {
        return Err(MorimotoError::GramCompatibilityViolation("<(phi^2 + Id) b_i, b_j> differs from <v_i, v_j>".into()));
    }
    Ok(())
}

pub fn sekiya_to_structure(m: &FramedAlgebra, g: &FramedAlgebra, q: &SekiyaQuadruple) -> Result<SekiyaStructure> {
    let r = g.dim();
    if q.v.len() != r || q.phi.rows() != r || q.phi.cols() != r {
        return Err(MorimotoError::PreconditionFailed(format!("need {r} frame vectors and a {r}x{r} twist")));
    }
    let constant = q.v.iter().all(|v| v.0.iter().all(|c| c.is_constant())) && q.j.matrix().is_constant() && q.phi.is_constant();
    if !constant || !q.e.gens().iter().all(|s| s.0.iter().all(|c| c.is_constant())) {
        return Err(MorimotoError::PreconditionFailed("invariant data must have constant coefficients".into()));
    }
    let span = match Subbundle::new(m, q.v.clone()) {
        Ok(s) => s,
        Err(StructureError::DependentGenerators) => return Err(MorimotoError::BNotInjective),
        Err(e) => return Err(e.into()),
    };
    if !span.same_span(m, &q.e.orthogonal_complement(m)?)? {
        return Err(MorimotoError::PreconditionFailed("{v_i} does not frame the complement of E".into()));
    }
    if !is_skew_for(g.gram(), &q.phi) {
        return Err(MorimotoError::NotOrthogonal);
    }
    sekiya_gram_check(g.gram(), &q.phi, span.gram())?;
    let image_signature = linalg::signature(span.gram())?;
    let p = product_algebra(m, g)?;
    let alg = &p.algebra;
    let v1 = Framing::new(q.v.iter().map(|v| p.lift1(v)).collect());
    let v2 = Framing::new((0..r).map(|i| p.lift2(&g.e(i))).collect());
    let b_star = g.gram_inv().mul(span.gram());
    let a_blk = q.phi.neg();
    let b_blk = Mat::identity(r);
    let c_blk = b_star.neg();
    let triple = admissible_from_blocks(alg, &v1, &v2, &a_blk, &b_blk, &c_blk, &q.phi)?;
    let j = lift_sgf(&p, &q.j, 0)?;
    let mut gens = j.e.gens().to_vec();
    gens.extend(triple.psi.e.gens().iter().cloned());
    let e = Subbundle::new(alg, gens)?;
    let structure = Sgf::from_matrix(e, Mat::block_diag(&[j.matrix(), triple.psi.matrix()]))?;
    Ok(SekiyaStructure { product: p, structure, j, triple, image_signature, b_star })
}

fn is_skew_for(g: &Mat, phi: &Mat) -> bool {
    phi.transpose().mul(g).add(&g.mul(phi)).is_zero()
}

/// Recover `(E, J, {v_i}, phi)` from a structure on the full product frame.
pub fn structure_to_sekiya(m: &FramedAlgebra, g: &FramedAlgebra, full: &Mat) -> Result<SekiyaQuadruple> {
    let (nm, ng) = (m.dim(), g.dim());
    if full.rows() != nm + ng || full.cols() != nm + ng {
        return Err(MorimotoError::PreconditionFailed("structure matrix has the wrong size".into()));
    }
    if !full.is_constant() {
        return Err(MorimotoError::PreconditionFailed("invariant structures have constant coefficients".into()));
    }
    let b = full.block(0, nm, nm, nm + ng);
    let v: Vec<Section> = (0..ng).map(|i| Section(b.col(i))).collect();
    let span = match Subbundle::new(m, v.clone()) {
        Ok(s) => s,
        Err(StructureError::DependentGenerators) => return Err(MorimotoError::BNotInjective),
        Err(e) => return Err(e.into()),
    };
    if !span.split_check()?.split {
        return Err(MorimotoError::GramCompatibilityViolation("image of B is not of split signature".into()));
    }
    let e = span.orthogonal_complement(m)?;
    let a = full.block(0, nm, 0, nm);
    let images: Vec<Section> = e.gens().iter().map(|x| Section(a.mul_vec(&x.0))).collect();
    let j = Sgf::from_images(m, e.clone(), &images)?;
    let phi = full.block(nm, nm + ng, nm, nm + ng);
    Ok(SekiyaQuadruple { e, j, v, phi })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SekiyaIntegrability {
    pub direct: CrfReport,
    pub normal: NormalPairReport,
    /// `(B^*)^{-1}(phi - i)` in the `{v_i}` coordinates.
    pub twist: Mat,
    pub defects: Vec<Obstruction>,
}

impl SekiyaIntegrability {
    pub fn by_criterion(&self) -> bool {
        self.normal.normal() && self.defects.is_empty()
    }
    pub fn agree(&self) -> bool {
        self.direct.crf() == self.by_criterion()
    }
}

/// Integrability computed directly and through the normal-pair and
/// intertwining criterion.
pub fn sekiya_integrability(m: &FramedAlgebra, q: &SekiyaQuadruple, s: &SekiyaStructure) -> Result<SekiyaIntegrability> {
    let alg = &s.product.algebra;
    let direct = crf_obstructions(alg, &s.structure)?;
    let span = Subbundle::new(m, q.v.clone())?;
    let normal = normal_pair_check(m, &q.j, &span, &Framing::new(q.v.clone()))?;
    let r = q.v.len();
    let twist = reduce_mat(alg, &s.b_star.inverse()?.mul(&q.phi.sub(&i_times(&Mat::identity(r)))));
    let defects = intertwining_defects(alg, &s.triple.v2, &s.triple.e2p, &s.triple.v1, &twist)?;
    Ok(SekiyaIntegrability { direct, normal, twist, defects })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::standard_algebra;
    use crate::ring::{BracketConstants, JetRing};

    fn flat(n: usize) -> FramedAlgebra {
        let ders: Vec<String> = (1..=n).map(|i| format!("D{i}")).collect();
        let dr: Vec<&str> = ders.iter().map(|s| s.as_str()).collect();
        let ring = JetRing::with_names(&[], &dr, BracketConstants::zero(n), 2).unwrap();
        standard_algebra(&ring, &BracketConstants::zero(n)).unwrap()
    }

    #[test]
    fn canonical_phi_is_i() {
        let a = flat(2);
        let v1 = Framing::named(&a, &["X1", "a1"]).unwrap();
        let v2 = Framing::named(&a, &["X2", "a2"]).unwrap();
        let t = canonical_triple(&a, &v1, &v2).unwrap();
        assert_eq!(t.phi, Mat::identity(2).scale(&Scalar::i()));
        assert_eq!(t.phi_from_graph(&a).unwrap(), t.phi);
        let z = Mat::zeros(2, 2);
        let id = Mat::identity(2);
        assert!(matches!(admissible_from_blocks(&a, &v1, &v2, &id, &z, &z, &id), Err(MorimotoError::NotAdmissible(_))));
    }

    #[test]
    fn stabilizer_pairs() {
        let a = flat(2);
        let v1 = Framing::named(&a, &["X1", "a1"]).unwrap();
        let v2 = Framing::named(&a, &["X2", "a2"]).unwrap();
        let t = canonical_triple(&a, &v1, &v2).unwrap();
        let r1 = hyperbolic(&Scalar::from_int(3));
        let r2 = stabilizer_partner(&t, &r1).unwrap();
        assert!(stabilizes(&a, &t, &r1, &r2).unwrap());
        assert!(!stabilizes(&a, &t, &r1, &Mat::identity(2)).unwrap());
        assert!(matches!(sigma_action(&a, &t, &Mat::from_ints(&[&[2, 0], &[0, 1]]), &Mat::identity(2)), Err(MorimotoError::NotOrthogonal)));
    }
}
