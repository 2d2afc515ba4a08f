//! Contact, normal contact, bicontact and Hermitian bicontact data, and the
//! Abstract Blair-Ludden-Yano pipeline.

use crate::algebroid::{AlgebroidError, FramedAlgebra, Section};
use crate::linalg::{self, Mat};
use crate::morimoto::{abstract_morimoto_check, admissible_from_blocks, EquivalenceReport, MorimotoDatum, MorimotoError};
use crate::ring::RingElem;
use crate::scalar::Scalar;
use crate::structures::{
    normal_pair_check, normalizes, normalizes_sgf, ConditionVerdict, Framing, Lagrangian, NormalPairReport, NormalizerReport, Obstruction, Sgf,
    StructureError, Subbundle, crf_obstructions,
};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContactError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Morimoto(#[from] MorimotoError),
    #[error("rank-ambiguous kernel: {0}")]
    RankAmbiguous(String),
    #[error("J does not preserve {0}")]
    BlockLeak(String),
    #[error("theorem violated: {0}")]
    TheoremViolation(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

impl From<AlgebroidError> for ContactError {
    fn from(e: AlgebroidError) -> Self {
        ContactError::Structure(e.into())
    }
}

impl From<linalg::LinalgError> for ContactError {
    fn from(e: linalg::LinalgError) -> Self {
        ContactError::Structure(e.into())
    }
}

type Result<T> = std::result::Result<T, ContactError>;

fn push_residual(alg: &FramedAlgebra, label: &str, res: &Section, out: &mut Vec<Obstruction>) {
    for (m, v) in res.0.iter().enumerate() {
        if !v.is_zero() {
            out.push(Obstruction { label: format!("{label} along {}", alg.names()[m]), value: v.clone() });
        }
    }
}

fn push_normalizer(label: &str, rep: &NormalizerReport, out: &mut Vec<Obstruction>) {
    for o in &rep.obstructions {
        out.push(Obstruction { label: format!("{label}: {}", o.label), value: o.value.clone() });
    }
}

fn verdict(name: &'static str, obstructions: Vec<Obstruction>) -> ConditionVerdict {
    ConditionVerdict { name, holds: obstructions.is_empty(), obstructions }
}

fn split_framing(alg: &FramedAlgebra, ep: &Subbundle, v: &Framing, w: &Framing) -> Result<()> {
    let mut all = v.vectors.clone();
    all.extend(w.vectors.iter().cloned());
    if !Framing::new(all).check(alg, ep)?.passed() {
        return Err(ContactError::PreconditionFailed("V + W is not a real framing of E'".into()));
    }
    for f in [v, w] {
        for a in &f.vectors {
            for b in &f.vectors {
                if !alg.ring().reduce(&alg.inner(a, b)?).is_zero() {
                    return Err(ContactError::PreconditionFailed("V and W must be isotropic".into()));
                }
            }
        }
    }
    Ok(())
}

/// `(L, V, W)` for `(E, E')`; `V` and `W` are frame vectors spanning real
/// isotropic subspaces of the sections of `E'`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactDatum {
    pub e: Subbundle,
    pub e_prime: Subbundle,
    pub l: Lagrangian,
    pub v: Framing,
    pub w: Framing,
}

impl ContactDatum {
    pub fn new(alg: &FramedAlgebra, e: Subbundle, e_prime: Subbundle, l: Vec<Section>, v: Framing, w: Framing) -> Result<Self> {
        if !e.orthogonal_to(alg, &e_prime)? {
            return Err(ContactError::PreconditionFailed("E and E' are not orthogonal".into()));
        }
        for (name, s) in [("E", &e), ("E'", &e_prime)] {
            if !s.split_check().map(|r| r.split).unwrap_or(false) {
                return Err(ContactError::PreconditionFailed(format!("{name} is not split")));
            }
        }
        if v.len() != w.len() || 2 * v.len() != e_prime.rank() {
            return Err(ContactError::PreconditionFailed("V and W must each have half the rank of E'".into()));
        }
        split_framing(alg, &e_prime, &v, &w)?;
        let l = Lagrangian::maximal_isotropic(alg, e.clone(), l)?;
        Ok(ContactDatum { e, e_prime, l, v, w })
    }

    /// Rank 1 shorthand `(L, V)`: `W` is the other isotropic line of `E'`,
    /// scaled so that `<v, w> = 1/2`.
    pub fn rank_one(alg: &FramedAlgebra, e: Subbundle, e_prime: Subbundle, l: Vec<Section>, v: Section) -> Result<Self> {
        if e_prime.rank() != 2 {
            return Err(ContactError::PreconditionFailed("E' must have rank 2".into()));
        }
        let w = isotropic_partner(alg, &e_prime, &v)?;
        ContactDatum::new(alg, e, e_prime, l, Framing::new(vec![v]), Framing::new(vec![w]))
    }

    pub fn rank(&self) -> usize {
        self.v.len()
    }

    /// The subbundle `L + span(W)`.
    pub fn l_plus_w(&self, alg: &FramedAlgebra) -> Result<Subbundle> {
        let mut gens = self.l.gens().to_vec();
        gens.extend(self.w.vectors.iter().cloned());
        Ok(Subbundle::new(alg, gens)?)
    }

    /// Brackets `[v, l_j]` for every framing vector `v` of `V`.
    pub fn lv_images(&self, alg: &FramedAlgebra) -> Result<Vec<Section>> {
        let mut out = Vec::new();
        for v in &self.v.vectors {
            for l in self.l.gens() {
                out.push(alg.reduce(&alg.dorfman(v, l)?));
            }
        }
        Ok(out)
    }
}

/// The isotropic line of a rank 2 split `E'` other than `span(v)`.
pub fn isotropic_partner(alg: &FramedAlgebra, ep: &Subbundle, v: &Section) -> Result<Section> {
    let ring = alg.ring();
    let vv = ring.reduce(&alg.inner(v, v)?);
    if !vv.is_zero() {
        return Err(ContactError::PreconditionFailed("V is not isotropic".into()));
    }
    for u in ep.gens() {
        let uv = ring.reduce(&alg.inner(u, v)?);
        let uv = match uv.as_constant() {
            Some(c) if !c.is_zero() => c,
            _ => continue,
        };
        let uu = ring.reduce(&alg.inner(u, u)?);
        let half = (uv * Scalar::from_int(2)).inv().expect("nonzero");
        let w = alg.reduce(&u.sub(&v.mul(&uu).scale(&half)));
        // <w, v> = <u, v>
        let w = w.scale(&half);
        return Ok(alg.reduce(&w));
    }
    Err(ContactError::PreconditionFailed("no generator of E' pairs with V by a nonzero constant".into()))
}

/// Evaluation of the five contact conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactReport {
    pub conditions: Vec<ConditionVerdict>,
    /// Directions of condition 4: `L_W(L) ⊆ L` and `L ⊆ L_W(L)`.
    pub condition4: (bool, bool),
    /// Present when `E' = E^⊥`.
    pub remark: Option<ContactRemark>,
}

/// Consequences of `E' = E^⊥`: condition 1 follows from 3, and condition 2
/// only needs brackets with `L` on the left.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactRemark {
    pub condition1_implied: bool,
    pub condition2_simplified: bool,
    pub consistent: bool,
}

impl ContactReport {
    pub fn valid(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }
    pub fn obstructions(&self) -> Vec<RingElem> {
        self.conditions.iter().flat_map(|c| c.obstructions.iter().map(|o| o.value.clone())).collect()
    }
}

impl fmt::Display for ContactReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            writeln!(f, "{}: {}", c.name, c.holds)?;
        }
        if let Some(r) = &self.remark {
            writeln!(f, "E' = E^perp shortcuts consistent: {}", r.consistent)?;
        }
        write!(f, "contact datum: {}", self.valid())
    }
}

fn in_span_obstructions(alg: &FramedAlgebra, s: &Subbundle, label: &str, xs: &[Section], out: &mut Vec<Obstruction>) -> Result<()> {
    for (k, x) in xs.iter().enumerate() {
        let res = s.residual(alg, x)?;
        push_residual(alg, &format!("{label}{}", k + 1), &res, out);
    }
    Ok(())
}

/// Conditions 1-5, evaluated on frame vectors.  Condition 2 asks that the
/// subbundle `L + span(W)` be involutive; condition 4 is tested in both
/// directions; condition 5 asks that `L` and the brackets `[v, l_j]` span
/// `E` with no overlap.
pub fn contact_check(alg: &FramedAlgebra, d: &ContactDatum) -> Result<ContactReport> {
    let mut c1 = Vec::new();
    for (k, v) in d.v.vectors.iter().enumerate() {
        push_normalizer(&format!("v{} in I(E)", k + 1), &normalizes(alg, v, &d.e)?, &mut c1);
    }

    let lw = d.l_plus_w(alg)?;
    let mut c2 = Vec::new();
    let mut c2_left = Vec::new();
    for (k, l) in d.l.gens().iter().enumerate() {
        push_normalizer(&format!("l{}", k + 1), &normalizes(alg, l, &lw)?, &mut c2_left);
    }
    c2.extend(c2_left.iter().cloned());
    for (k, w) in d.w.vectors.iter().enumerate() {
        push_normalizer(&format!("w{}", k + 1), &normalizes(alg, w, &lw)?, &mut c2);
    }

    let mut c3 = Vec::new();
    let vw: Vec<(String, &Section)> = d
        .v
        .vectors
        .iter()
        .enumerate()
        .map(|(k, x)| (format!("v{}", k + 1), x))
        .chain(d.w.vectors.iter().enumerate().map(|(k, x)| (format!("w{}", k + 1), x)))
        .collect();
    for (na, a) in &vw {
        for (nb, b) in &vw {
            let br = alg.reduce(&alg.dorfman(a, b)?);
            push_residual(alg, &format!("[{na}, {nb}]"), &br, &mut c3);
        }
    }

    let lsub = d.l.as_subbundle(alg)?;
    let mut c4 = Vec::new();
    let mut wl = Vec::new();
    for (a, w) in d.w.vectors.iter().enumerate() {
        for (j, l) in d.l.gens().iter().enumerate() {
            let br = alg.reduce(&alg.dorfman(w, l)?);
            let res = lsub.residual(alg, &br)?;
            push_residual(alg, &format!("[w{}, l{}] outside L", a + 1, j + 1), &res, &mut c4);
            wl.push(br);
        }
    }
    let forward = c4.is_empty();
    let image = Subbundle::spanned_by(alg, &wl)?;
    let before = c4.len();
    if image.rank() == 0 {
        for (j, l) in d.l.gens().iter().enumerate() {
            push_residual(alg, &format!("l{} outside L_W(L)", j + 1), l, &mut c4);
        }
    } else {
        in_span_obstructions(alg, &image, "outside L_W(L): l", d.l.gens(), &mut c4)?;
    }
    let backward = c4.len() == before;

    let mut c5 = Vec::new();
    let lv = d.lv_images(alg)?;
    let lvs = Subbundle::spanned_by(alg, &lv)?;
    let mut both = d.l.gens().to_vec();
    both.extend(lvs.gens().iter().cloned());
    let sum = Subbundle::spanned_by(alg, &both)?;
    if sum.rank() != d.l.rank() + lvs.rank() {
        c5.push(Obstruction { label: "L meets L_V(L)".into(), value: RingElem::int((d.l.rank() + lvs.rank() - sum.rank()) as i64) });
    }
    in_span_obstructions(alg, &d.e, "L_V(L) outside E: [v, l]_", &lv, &mut c5)?;
    if sum.rank() < d.e.rank() {
        match in_span_obstructions(alg, &sum, "E not spanned: e", d.e.gens(), &mut c5) {
            Ok(()) => {}
            Err(ContactError::Structure(StructureError::MembershipUndecidable(_))) => {
                c5.push(Obstruction { label: "rank of L + L_V(L) below rank E".into(), value: RingElem::int((d.e.rank() - sum.rank()) as i64) })
            }
            Err(e) => return Err(e),
        }
    }

    let whole = d.e.rank() + d.e_prime.rank() == alg.dim();
    let remark = if whole {
        let condition1_implied = !c3.is_empty() || c1.is_empty();
        let simplified = c2_left.is_empty();
        Some(ContactRemark {
            condition1_implied,
            condition2_simplified: simplified,
            consistent: condition1_implied && (!c3.is_empty() || simplified == c2.is_empty()),
        })
    } else {
        None
    };

    Ok(ContactReport {
        conditions: vec![
            verdict("1) V in I(E)", c1),
            verdict("2) L + span(W) involutive", c2),
            verdict("3) [V+W, V+W] = 0", c3),
            verdict("4) L = L_W(L)", c4),
            verdict("5) E = L + L_V(L)", c5),
        ],
        condition4: (forward, backward),
        remark,
    })
}

/// Computed conclusions for a rank 1 contact datum: `L_V(L)` maximal
/// isotropic in `E` and `W ⊆ I(E)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactDerived {
    pub lv_l: Vec<Section>,
    /// `<[v, l_i], [v, l_j]>`.
    pub pairings: Mat,
    pub in_e: bool,
    pub rank: usize,
    pub isotropic: bool,
    pub w_normalizes: bool,
    pub obstructions: Vec<Obstruction>,
}

impl ContactDerived {
    pub fn holds(&self) -> bool {
        self.in_e && self.isotropic && self.w_normalizes
    }
}

pub fn contact_derived(alg: &FramedAlgebra, d: &ContactDatum) -> Result<ContactDerived> {
    if d.rank() != 1 {
        return Err(ContactError::PreconditionFailed("the lemma concerns rank 1 contact data".into()));
    }
    if !contact_check(alg, d)?.valid() {
        return Err(ContactError::PreconditionFailed("not a contact datum".into()));
    }
    let lv = d.lv_images(alg)?;
    let k = lv.len();
    let mut pairings = Mat::zeros(k, k);
    let mut obstructions = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let p = alg.ring().reduce(&alg.inner(&lv[i], &lv[j])?);
            if !p.is_zero() && i <= j {
                obstructions.push(Obstruction { label: format!("<[v, l{}], [v, l{}]>", i + 1, j + 1), value: p.clone() });
            }
            pairings.set(i, j, p);
        }
    }
    let isotropic = pairings.is_zero();
    let mut ext = Vec::new();
    in_span_obstructions(alg, &d.e, "[v, l]_", &lv, &mut ext)?;
    let in_e = ext.is_empty();
    obstructions.extend(ext);
    let rank = Subbundle::spanned_by(alg, &lv)?.rank();
    let mut wn = Vec::new();
    for (a, w) in d.w.vectors.iter().enumerate() {
        push_normalizer(&format!("w{} in I(E)", a + 1), &normalizes(alg, w, &d.e)?, &mut wn);
    }
    let w_normalizes = wn.is_empty();
    obstructions.extend(wn);
    Ok(ContactDerived { lv_l: lv, pairings, in_e, rank, isotropic: isotropic && rank == d.l.rank(), w_normalizes, obstructions })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalContactReport {
    pub contact: ContactReport,
    /// `J(L + span(W)) ⊆ L + span(W)`.
    pub preserves: bool,
    pub preserve_obstructions: Vec<Obstruction>,
    pub normal_pair: NormalPairReport,
    /// For `E' = E^⊥`: whether `J` is CRF, which must match the normal pair
    /// verdict of a valid contact datum.
    pub crf_route: Option<bool>,
}

impl NormalContactReport {
    pub fn normal(&self) -> bool {
        self.contact.valid() && self.preserves && self.normal_pair.normal()
    }
    pub fn routes_agree(&self) -> bool {
        !self.contact.valid() || self.crf_route.is_none_or(|c| c == self.normal_pair.normal())
    }
    pub fn obstructions(&self) -> Vec<RingElem> {
        let mut all = self.contact.obstructions();
        all.extend(self.preserve_obstructions.iter().map(|o| o.value.clone()));
        all.extend(self.normal_pair.generators.iter().cloned());
        crate::structures::real_generators(&all)
    }
}

impl fmt::Display for NormalContactReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.contact)?;
        writeln!(f, "J preserves L + span(W): {}", self.preserves)?;
        writeln!(f, "(J, V + W) normal pair: {}", self.normal_pair.normal())?;
        if let Some(c) = self.crf_route {
            writeln!(f, "J CRF (E' = E^perp route): {c}")?;
        }
        write!(f, "normal contact datum: {}", self.normal())
    }
}

/// Both clauses of normal contact for `J` on `E`.
pub fn normal_contact_check(alg: &FramedAlgebra, j: &Sgf, d: &ContactDatum) -> Result<NormalContactReport> {
    if !j.e.same_span(alg, &d.e)? {
        return Err(ContactError::PreconditionFailed("J does not live on E".into()));
    }
    let contact = contact_check(alg, d)?;
    let lw = d.l_plus_w(alg)?;
    let phi = j.phi(alg)?;
    let mut preserve_obstructions = Vec::new();
    for (k, x) in lw.gens().iter().enumerate() {
        let jx = alg.reduce(&phi.apply(x));
        let res = lw.residual(alg, &jx)?;
        push_residual(alg, &format!("J(g{}) outside L + span(W)", k + 1), &res, &mut preserve_obstructions);
    }
    let mut vw = d.v.vectors.clone();
    vw.extend(d.w.vectors.iter().cloned());
    let normal_pair = normal_pair_check(alg, j, &d.e_prime, &Framing::new(vw))?;
    let crf_route = if d.e.rank() + d.e_prime.rank() == alg.dim() { Some(normal_pair.crf) } else { None };
    Ok(NormalContactReport { contact, preserves: preserve_obstructions.is_empty(), preserve_obstructions, normal_pair, crf_route })
}

/// `(L, V1, V2)` for `(E, E1', E2')` with rank 1 split framings `(v_i, w_i)`
/// and optional candidate framings `K_i` of `L_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct BicontactDatum {
    pub e: Subbundle,
    pub e1p: Subbundle,
    pub e2p: Subbundle,
    pub l: Vec<Section>,
    pub v1: Section,
    pub w1: Section,
    pub v2: Section,
    pub w2: Section,
    pub k1: Option<Framing>,
    pub k2: Option<Framing>,
}

impl BicontactDatum {
    pub fn rank_two(&self, alg: &FramedAlgebra) -> Result<ContactDatum> {
        let ep = self.e1p.direct_sum(alg, &self.e2p)?;
        ContactDatum::new(
            alg,
            self.e.clone(),
            ep,
            self.l.clone(),
            Framing::new(vec![self.v1.clone(), self.v2.clone()]),
            Framing::new(vec![self.w1.clone(), self.w2.clone()]),
        )
    }
    /// `E + E1' + E2'`.
    pub fn epp(&self, alg: &FramedAlgebra) -> Result<Subbundle> {
        Ok(self.e.direct_sum(alg, &self.e1p)?.direct_sum(alg, &self.e2p)?)
    }
    fn v(&self, i: usize) -> &Section {
        if i == 0 {
            &self.v1
        } else {
            &self.v2
        }
    }
    fn w(&self, i: usize) -> &Section {
        if i == 0 {
            &self.w1
        } else {
            &self.w2
        }
    }
    fn ep(&self, i: usize) -> &Subbundle {
        if i == 0 {
            &self.e1p
        } else {
            &self.e2p
        }
    }
    fn k(&self, i: usize) -> Option<&Framing> {
        if i == 0 {
            self.k1.as_ref()
        } else {
            self.k2.as_ref()
        }
    }
}

/// The part of `L` killed by `[v, -]` on frame coefficients; the kernel of
/// the matrix with columns `[v, l_j]` must have constant rank.
pub fn lie_kernel(alg: &FramedAlgebra, v: &Section, l: &[Section]) -> Result<Vec<Section>> {
    let mut cols = Vec::new();
    for x in l {
        cols.push(alg.reduce(&alg.dorfman(v, x)?).0);
    }
    if cols.is_empty() {
        return Ok(Vec::new());
    }
    let m = Mat::from_cols(&cols);
    let e = linalg::unit_echelon(&m).map_err(|_| ContactError::RankAmbiguous("kernel pivot is not a unit".into()))?;
    Ok(linalg::echelon_kernel(&e)
        .into_iter()
        .map(|c| alg.reduce(&Section::combination(alg.dim(), &c, l)))
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FramingCheck {
    pub spans: [bool; 2],
    pub normalize: bool,
    pub commute: bool,
    pub obstructions: Vec<Obstruction>,
}

impl FramingCheck {
    pub fn holds(&self) -> bool {
        self.spans[0] && self.spans[1] && self.normalize && self.commute
    }
}

/// Conclusions i)-iv) of the bicontact lemma.
#[derive(Clone, Debug, PartialEq)]
pub struct BicontactLemma {
    pub orthogonal: bool,
    pub split: [bool; 2],
    pub contact: [bool; 2],
    pub vw_normalize: bool,
    pub k_normalize: bool,
    pub obstructions: Vec<Obstruction>,
}

impl BicontactLemma {
    pub fn holds(&self) -> bool {
        self.orthogonal && self.split == [true; 2] && self.contact == [true; 2] && self.vw_normalize && self.k_normalize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BicontactReport {
    pub contact: ContactReport,
    pub l1: Vec<Section>,
    pub l2: Vec<Section>,
    pub direct_sum: bool,
    /// Condition 3 on the supplied candidates.
    pub framings: Option<FramingCheck>,
    /// Derived `E_i = L_i + L_{V_i}(L_i)`.
    pub e1: Option<Subbundle>,
    pub e2: Option<Subbundle>,
    pub lemma: Option<BicontactLemma>,
}

impl BicontactReport {
    /// A failing candidate `K_i` does not refute the existence of others.
    pub fn valid(&self) -> bool {
        self.contact.valid() && self.direct_sum && self.framings.as_ref().is_some_and(|f| f.holds())
    }
    pub fn e_i(&self, i: usize) -> Option<&Subbundle> {
        if i == 0 {
            self.e1.as_ref()
        } else {
            self.e2.as_ref()
        }
    }
}

impl fmt::Display for BicontactReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank 2 contact datum: {}", self.contact.valid())?;
        writeln!(f, "rank L1 = {}, rank L2 = {}, L = L1 + L2: {}", self.l1.len(), self.l2.len(), self.direct_sum)?;
        match &self.framings {
            Some(k) => writeln!(f, "candidate K_i: {}", k.holds())?,
            None => writeln!(f, "candidate K_i: not supplied")?,
        }
        if let Some(l) = &self.lemma {
            writeln!(f, "lemma conclusions: {}", l.holds())?;
        }
        write!(f, "bicontact datum: {}", self.valid())
    }
}

fn e_i_of(alg: &FramedAlgebra, v: &Section, li: &[Section]) -> Result<Subbundle> {
    let mut gens = li.to_vec();
    for l in li {
        gens.push(alg.reduce(&alg.dorfman(v, l)?));
    }
    Ok(Subbundle::spanned_by(alg, &gens)?)
}

pub fn bicontact_check(alg: &FramedAlgebra, d: &BicontactDatum) -> Result<BicontactReport> {
    for (a, b) in [(&d.e, &d.e1p), (&d.e, &d.e2p), (&d.e1p, &d.e2p)] {
        if !a.orthogonal_to(alg, b)? {
            return Err(ContactError::PreconditionFailed("E, E1', E2' are not mutually orthogonal".into()));
        }
    }
    for i in 0..2 {
        if d.ep(i).rank() != 2 {
            return Err(ContactError::PreconditionFailed(format!("E{}' must have rank 2", i + 1)));
        }
        split_framing(alg, d.ep(i), &Framing::new(vec![d.v(i).clone()]), &Framing::new(vec![d.w(i).clone()]))?;
    }
    let c2 = d.rank_two(alg)?;
    let contact = contact_check(alg, &c2)?;
    let l = c2.l.gens().to_vec();
    let l1 = lie_kernel(alg, &d.v2, &l)?;
    let l2 = lie_kernel(alg, &d.v1, &l)?;
    let mut both = l1.clone();
    both.extend(l2.iter().cloned());
    let direct_sum = !l1.is_empty()
        && !l2.is_empty()
        && Subbundle::spanned_by(alg, &both)?.rank() == l1.len() + l2.len()
        && l1.len() + l2.len() == l.len();

    let epp = d.epp(alg)?;
    let framings = match (d.k(0), d.k(1)) {
        (Some(k1), Some(k2)) => {
            let mut obstructions = Vec::new();
            let mut spans = [false; 2];
            for (i, (k, li)) in [(k1, &l1), (k2, &l2)].into_iter().enumerate() {
                spans[i] = !li.is_empty() && Subbundle::new(alg, li.clone()).and_then(|s| k.check(alg, &s)).map(|r| r.passed()).unwrap_or(false);
                for (a, x) in k.vectors.iter().enumerate() {
                    push_normalizer(&format!("k{}_{} in I(E'')", i + 1, a + 1), &normalizes(alg, x, &epp)?, &mut obstructions);
                }
            }
            let normalize = obstructions.is_empty();
            let before = obstructions.len();
            for (a, x) in k1.vectors.iter().enumerate() {
                for (b, y) in k2.vectors.iter().enumerate() {
                    let br = alg.reduce(&alg.dorfman(x, y)?);
                    push_residual(alg, &format!("[k1_{}, k2_{}]", a + 1, b + 1), &br, &mut obstructions);
                }
            }
            let commute = obstructions.len() == before;
            Some(FramingCheck { spans, normalize, commute, obstructions })
        }
        _ => None,
    };

    let mut rep = BicontactReport { contact, l1, l2, direct_sum, framings, e1: None, e2: None, lemma: None };
    if rep.contact.valid() && rep.direct_sum {
        let e1 = e_i_of(alg, &d.v1, &rep.l1)?;
        let e2 = e_i_of(alg, &d.v2, &rep.l2)?;
        rep.lemma = Some(bicontact_lemma(alg, d, &rep, &e1, &e2)?);
        rep.e1 = Some(e1);
        rep.e2 = Some(e2);
    }
    Ok(rep)
}

fn bicontact_lemma(alg: &FramedAlgebra, d: &BicontactDatum, rep: &BicontactReport, e1: &Subbundle, e2: &Subbundle) -> Result<BicontactLemma> {
    let orthogonal = e1.orthogonal_to(alg, e2)?;
    let es = [e1, e2];
    let ls = [&rep.l1, &rep.l2];
    let mut split = [false; 2];
    let mut contact = [false; 2];
    let mut obstructions = Vec::new();
    let mut pp = Vec::new();
    for i in 0..2 {
        split[i] = es[i].split_check().map(|r| r.split).unwrap_or(false);
        if split[i] {
            let c = ContactDatum::new(alg, es[i].clone(), d.ep(i).clone(), ls[i].clone(), Framing::new(vec![d.v(i).clone()]), Framing::new(vec![d.w(i).clone()]));
            contact[i] = match c {
                Ok(c) => contact_check(alg, &c)?.valid(),
                Err(ContactError::PreconditionFailed(_)) | Err(ContactError::Structure(_)) => false,
                Err(e) => return Err(e),
            };
        }
        pp.push(es[i].direct_sum(alg, d.ep(i))?);
    }
    let mut vw = Vec::new();
    let mut kn = Vec::new();
    for (n, p) in pp.iter().enumerate() {
        for i in 0..2 {
            for (tag, x) in [("v", d.v(i)), ("w", d.w(i))] {
                push_normalizer(&format!("{tag}{} in I(E{}'')", i + 1, n + 1), &normalizes(alg, x, p)?, &mut vw);
            }
            if let Some(k) = d.k(i) {
                for (a, x) in k.vectors.iter().enumerate() {
                    push_normalizer(&format!("k{}_{} in I(E{}'')", i + 1, a + 1, n + 1), &normalizes(alg, x, p)?, &mut kn);
                }
            }
        }
    }
    let vw_normalize = vw.is_empty();
    let k_normalize = kn.is_empty() && d.k1.is_some() && d.k2.is_some();
    obstructions.extend(vw);
    obstructions.extend(kn);
    Ok(BicontactLemma { orthogonal, split, contact, vw_normalize, k_normalize, obstructions })
}

/// A bicontact datum with `J` on `E'' = E + E1' + E2'`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianDatum {
    pub bicontact: BicontactDatum,
    pub j: Sgf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianReport {
    pub bicontact: BicontactReport,
    pub crf: bool,
    pub conditions: Vec<ConditionVerdict>,
    /// `V2 + W2 ⊆ I(J)`, reported but not required.
    pub v2_certificate: bool,
    /// `J(E1) ⊆ E1`, `J(E2) ⊆ E2`, `J(E1' + E2') ⊆ E1' + E2'`.
    pub blocks: Option<[bool; 3]>,
}

impl HermitianReport {
    pub fn valid(&self) -> bool {
        self.bicontact.valid() && self.crf && self.conditions.iter().all(|c| c.holds)
    }
}

impl fmt::Display for HermitianReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.bicontact)?;
        writeln!(f, "J CRF on E'': {}", self.crf)?;
        for c in &self.conditions {
            writeln!(f, "{}: {}", c.name, c.holds)?;
        }
        writeln!(f, "V2 + W2 in I(J): {}", self.v2_certificate)?;
        if let Some(b) = self.blocks {
            writeln!(f, "block preservation: {}", b.iter().all(|x| *x))?;
        }
        write!(f, "Hermitian bicontact datum: {}", self.valid())
    }
}

/// `c` with `y = c x` for a constant `c`, if any.
fn constant_multiple(alg: &FramedAlgebra, y: &Section, x: &Section, dual: &Section) -> Result<Option<Scalar>> {
    let ring = alg.ring();
    let xd = ring.reduce(&alg.inner(x, dual)?).as_constant();
    let yd = ring.reduce(&alg.inner(y, dual)?).as_constant();
    match (xd, yd) {
        (Some(a), Some(b)) if !a.is_zero() => {
            let c = b * a.inv().expect("nonzero");
            Ok(if alg.reduce(&y.sub(&x.scale(&c))).is_zero() { Some(c) } else { None })
        }
        _ => Ok(None),
    }
}

pub fn hermitian_bicontact_check(alg: &FramedAlgebra, h: &HermitianDatum) -> Result<HermitianReport> {
    let d = &h.bicontact;
    let epp = d.epp(alg)?;
    if !h.j.e.same_span(alg, &epp)? {
        return Err(ContactError::PreconditionFailed("J is not defined on E + E1' + E2'".into()));
    }
    let bicontact = bicontact_check(alg, d)?;
    let crf = crf_obstructions(alg, &h.j)?.crf();

    let mut c1 = Vec::new();
    for (tag, x) in [("v1", &d.v1), ("w1", &d.w1)] {
        push_normalizer(&format!("{tag} in I(J)"), &normalizes_sgf(alg, x, &h.j)?, &mut c1);
    }
    let mut c2 = Vec::new();
    for (tag, x, y, dual) in [("J(V1) = V2", &d.v1, &d.v2, &d.w2), ("J(W1) = W2", &d.w1, &d.w2, &d.v2)] {
        let jx = h.j.apply(alg, x)?;
        match constant_multiple(alg, &jx, y, dual)? {
            Some(c) if !c.is_zero() => {}
            _ => push_residual(alg, tag, &jx, &mut c2),
        }
    }
    let mut sg = d.l.clone();
    sg.push(d.w1.clone());
    sg.push(d.w2.clone());
    let s = Subbundle::new(alg, sg)?;
    let mut c3 = Vec::new();
    for (k, x) in s.gens().iter().enumerate() {
        let jx = h.j.apply(alg, x)?;
        push_residual(alg, &format!("J(g{}) outside L + span(W1 + W2)", k + 1), &s.residual(alg, &jx)?, &mut c3);
    }
    let v2_certificate = normalizes_sgf(alg, &d.v2, &h.j)?.holds && normalizes_sgf(alg, &d.w2, &h.j)?.holds;

    let mut rep = HermitianReport {
        bicontact,
        crf,
        conditions: vec![verdict("1) V1 + W1 in I(J)", c1), verdict("2) J(V1) = V2, J(W1) = W2", c2), verdict("3) J preserves L + span(W1 + W2)", c3)],
        v2_certificate,
        blocks: None,
    };
    if let (Some(e1), Some(e2)) = (rep.bicontact.e1.clone(), rep.bicontact.e2.clone()) {
        let ep = d.e1p.direct_sum(alg, &d.e2p)?;
        let mut b = [true; 3];
        for (n, sub) in [&e1, &e2, &ep].into_iter().enumerate() {
            for g in sub.gens() {
                let jg = h.j.apply(alg, g)?;
                b[n] &= sub.residual(alg, &jg)?.is_zero();
            }
        }
        rep.blocks = Some(b);
        if rep.valid() && !b.iter().all(|x| *x) {
            let names = ["E1", "E2", "E1' + E2'"];
            let bad: Vec<&str> = b.iter().zip(names).filter(|(ok, _)| !**ok).map(|(_, n)| n).collect();
            return Err(ContactError::BlockLeak(bad.join(", ")));
        }
    }
    Ok(rep)
}

/// `(J1, J2, V1 + W1, V2 + W2, Psi)` by restriction, with candidate framings
/// `K_i + [v_i, K_i]` of `E_i`.
pub fn corresponding_morimoto(alg: &FramedAlgebra, h: &HermitianDatum, rep: &HermitianReport) -> Result<MorimotoDatum> {
    let d = &h.bicontact;
    let (e1, e2) = match (&rep.bicontact.e1, &rep.bicontact.e2) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => return Err(ContactError::PreconditionFailed("derived blocks E1, E2 unavailable".into())),
    };
    let restrict = |e: Subbundle, name: &str| -> Result<Sgf> {
        let imgs = e.gens().iter().map(|g| h.j.apply(alg, g)).collect::<std::result::Result<Vec<_>, _>>()?;
        Sgf::from_images(alg, e, &imgs).map_err(|err| match err {
            StructureError::NotInSpan(_) => ContactError::BlockLeak(name.to_string()),
            other => other.into(),
        })
    };
    let j1 = restrict(e1, "E1")?;
    let j2 = restrict(e2, "E2")?;
    let f1 = Framing::new(vec![d.v1.clone(), d.w1.clone()]);
    let f2 = Framing::new(vec![d.v2.clone(), d.w2.clone()]);
    let mut basis = f1.vectors.clone();
    basis.extend(f2.vectors.iter().cloned());
    let ep = Subbundle::new(alg, basis.clone())?;
    let psi = restrict(ep, "E1' + E2'")?;
    let m = psi.matrix();
    let (a, b, c, dd) = (m.block(0, 2, 0, 2), m.block(0, 2, 2, 4), m.block(2, 4, 0, 2), m.block(2, 4, 2, 4));
    let triple = admissible_from_blocks(alg, &f1, &f2, &a, &b, &c, &dd)?;
    let cand = |k: Option<&Framing>, v: &Section| -> Result<Option<Framing>> {
        match k {
            Some(k) => {
                let mut out = k.vectors.clone();
                for x in &k.vectors {
                    out.push(alg.reduce(&alg.dorfman(v, x)?));
                }
                Ok(Some(Framing::new(out)))
            }
            None => Ok(None),
        }
    };
    Ok(MorimotoDatum { j1, j2, triple, w1: cand(d.k(0), &d.v1)?, w2: cand(d.k(1), &d.v2)? })
}

/// Adapted framing conditions for the supplied `K_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedReport {
    pub normalize: bool,
    pub commute: bool,
    pub pairing: bool,
    pub obstructions: Vec<Obstruction>,
}

impl AdaptedReport {
    pub fn adaptable(&self) -> bool {
        self.normalize && self.commute && self.pairing
    }
}

pub fn adapted_framings_check(alg: &FramedAlgebra, h: &HermitianDatum, rep: &HermitianReport) -> Result<AdaptedReport> {
    let d = &h.bicontact;
    let (k1, k2) = match (&d.k1, &d.k2) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(ContactError::PreconditionFailed("adapted framings K_i not supplied".into())),
    };
    let fc = rep.bicontact.framings.as_ref();
    let spans = fc.is_some_and(|f| f.spans == [true; 2]);
    let commute = fc.is_some_and(|f| f.commute);
    let mut obstructions = Vec::new();
    let epp = d.epp(alg)?;
    for (i, k) in [k1, k2].into_iter().enumerate() {
        for (a, x) in k.vectors.iter().enumerate() {
            push_normalizer(&format!("k{}_{} in I(E'')", i + 1, a + 1), &normalizes(alg, x, &epp)?, &mut obstructions);
        }
    }
    let normalize = obstructions.is_empty() && spans;
    let before = obstructions.len();
    for (i, k) in [k1, k2].into_iter().enumerate() {
        let ei = rep.bicontact.e_i(i).ok_or_else(|| ContactError::PreconditionFailed("derived blocks unavailable".into()))?;
        let eipp = ei.direct_sum(alg, d.ep(i))?;
        for (a, x) in k.vectors.iter().enumerate() {
            let jx = h.j.apply(alg, x)?;
            for (b, y) in k.vectors.iter().enumerate() {
                let ly = alg.reduce(&alg.dorfman(d.v(i), y)?);
                let f = alg.ring().reduce(&alg.inner(&jx, &ly)?);
                let df = alg.reduce(&alg.differential(&f));
                push_residual(alg, &format!("d<J k{i1}_{}, L_V{i1} k{i1}_{}>", a + 1, b + 1, i1 = i + 1), &eipp.residual(alg, &df)?, &mut obstructions);
            }
        }
    }
    let pairing = obstructions.len() == before;
    Ok(AdaptedReport { normalize, commute, pairing, obstructions })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlyReport {
    pub hermitian: HermitianReport,
    pub adapted: AdaptedReport,
    pub morimoto: EquivalenceReport,
    pub normal_contact: [NormalContactReport; 2],
}

impl BlyReport {
    /// Both `(J_i, L_i, V_i)` normal contact data.
    pub fn conclusion(&self) -> bool {
        self.normal_contact.iter().all(|r| r.normal())
    }
    pub fn obstructions(&self) -> Vec<RingElem> {
        let mut all = Vec::new();
        for r in &self.normal_contact {
            all.extend(r.obstructions());
        }
        crate::structures::real_generators(&all)
    }
}

impl fmt::Display for BlyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.hermitian)?;
        writeln!(f, "adaptable: {}", self.adapted.adaptable())?;
        writeln!(f, "{}", self.morimoto)?;
        for (i, r) in self.normal_contact.iter().enumerate() {
            writeln!(f, "(J{0}, L{0}, V{0}) normal contact: {1}", i + 1, r.normal())?;
        }
        write!(f, "theorem conclusion: {}", self.conclusion())
    }
}

/// Hermitian bicontact datum -> Morimoto datum -> Morimoto product criterion,
/// with the normal contact conclusion verified independently.
pub fn bly_check(alg: &FramedAlgebra, h: &HermitianDatum) -> Result<BlyReport> {
    let hermitian = hermitian_bicontact_check(alg, h)?;
    if !hermitian.valid() {
        return Err(ContactError::PreconditionFailed(format!("not a Hermitian bicontact datum\n{hermitian}")));
    }
    let adapted = adapted_framings_check(alg, h, &hermitian)?;
    if !adapted.adaptable() {
        return Err(ContactError::PreconditionFailed("the supplied K_i are not adapted".into()));
    }
    let md = corresponding_morimoto(alg, h, &hermitian)?;
    let morimoto = abstract_morimoto_check(alg, &md)?;
    let d = &h.bicontact;
    let mut nc = Vec::new();
    for (i, (j, li)) in [(&md.j1, &hermitian.bicontact.l1), (&md.j2, &hermitian.bicontact.l2)].into_iter().enumerate() {
        let c = ContactDatum::new(alg, j.e.clone(), d.ep(i).clone(), li.clone(), Framing::new(vec![d.v(i).clone()]), Framing::new(vec![d.w(i).clone()]))?;
        nc.push(normal_contact_check(alg, j, &c)?);
    }
    let n2 = nc.pop().unwrap();
    let n1 = nc.pop().unwrap();
    let rep = BlyReport { hermitian, adapted, morimoto, normal_contact: [n1, n2] };
    if !rep.conclusion() {
        return Err(ContactError::TheoremViolation(rep.to_string()));
    }
    if !(rep.morimoto.normal1.normal() && rep.morimoto.normal2.normal()) {
        return Err(ContactError::TheoremViolation("the Morimoto step did not produce normal pairs".into()));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::standard_algebra;
    use crate::ring::{BracketConstants, JetRing};
    use crate::structures::generated_by;

    struct S3 {
        a: FramedAlgebra,
        x: [Section; 3],
    }

    fn s3(order: usize) -> S3 {
        let ring = JetRing::with_names(&["f2", "f3"], &["D1", "D2", "D3"], BracketConstants::su2(2), order).unwrap();
        let a = standard_algebra(&ring, &BracketConstants::su2(2)).unwrap();
        let (f2, f3) = (ring.gen(0), ring.gen(1));
        let n = |s: &str| a.named(s).unwrap();
        let x1 = n("a1").add(&n("X2").mul(&f2)).add(&n("X3").mul(&f3));
        let x2 = n("a2").sub(&n("X1").mul(&f2));
        let x3 = n("a3").sub(&n("X1").mul(&f3));
        S3 { a, x: [x1, x2, x3] }
    }

    fn datum(s: &S3) -> ContactDatum {
        let a = &s.a;
        let e = Subbundle::new(a, vec![a.named("X2").unwrap(), a.named("X3").unwrap(), s.x[1].clone(), s.x[2].clone()]).unwrap();
        let ep = Subbundle::new(a, vec![a.named("X1").unwrap(), s.x[0].clone()]).unwrap();
        ContactDatum::rank_one(a, e, ep, vec![a.named("X2").unwrap(), a.named("X3").unwrap()], s.x[0].clone()).unwrap()
    }

    #[test]
    fn s3_contact_iff_y1h() {
        let s = s3(3);
        let d = datum(&s);
        assert_eq!(d.w.vectors[0], s.a.named("X1").unwrap());
        let rep = contact_check(&s.a, &d).unwrap();
        assert!(!rep.valid());
        assert!(rep.remark.as_ref().unwrap().consistent);
        let r = s.a.ring();
        let two = Scalar::from_int(2);
        let y = [&r.jet(0, &[0]) - &r.gen(1).scale(&two), &r.jet(1, &[0]) + &r.gen(0).scale(&two)];
        assert!(generated_by(r, &rep.obstructions(), &y).unwrap(), "{rep}");
    }

    fn y1h(r: &JetRing) -> Vec<RingElem> {
        let two = Scalar::from_int(2);
        vec![&r.jet(0, &[0]) - &r.gen(1).scale(&two), &r.jet(1, &[0]) + &r.gen(0).scale(&two)]
    }

    fn dbar_h(r: &JetRing) -> Vec<RingElem> {
        vec![&r.jet(0, &[1]) - &r.jet(1, &[2]), &r.jet(1, &[1]) + &r.jet(0, &[2])]
    }

    fn hopf_j(s: &S3, d: &ContactDatum) -> Sgf {
        let a = &s.a;
        let imgs = vec![a.named("X3").unwrap(), a.named("X2").unwrap().neg(), s.x[2].clone(), s.x[1].neg()];
        Sgf::from_images(a, d.e.clone(), &imgs).unwrap()
    }

    #[test]
    fn s3_contact_with_relations() {
        let s = s3(3);
        let a = s.a.with_relations(&y1h(s.a.ring())).unwrap();
        let s = S3 { x: s.x.clone().map(|x| a.reduce(&x)), a };
        let d = datum(&s);
        let rep = contact_check(&s.a, &d).unwrap();
        assert!(rep.valid(), "{rep}");
        let der = contact_derived(&s.a, &d).unwrap();
        eprintln!("{:?} {:?}", der.isotropic, der.obstructions.iter().map(|o| (o.label.clone(), s.a.ring().format(&o.value))).collect::<Vec<_>>());
        let j = hopf_j(&s, &d);
        let nc = normal_contact_check(&s.a, &j, &d).unwrap();
        eprintln!("{nc}");
        assert!(nc.routes_agree());
    }

    #[test]
    fn s3_normal_contact_generators() {
        let s = s3(3);
        let d = datum(&s);
        let j = hopf_j(&s, &d);
        let nc = normal_contact_check(&s.a, &j, &d).unwrap();
        let r = s.a.ring();
        let mut t = y1h(r);
        t.extend(dbar_h(r));
        eprintln!("{nc}");
        assert!(crate::structures::generated_by(r, &nc.obstructions(), &t).unwrap());
        let h0 = s.a.with_relations(&[r.gen(0), r.gen(1)]).unwrap();
        let s0 = S3 { x: s.x.clone().map(|x| h0.reduce(&x)), a: h0 };
        let d0 = datum(&s0);
        let j0 = hopf_j(&s0, &d0);
        let nc0 = normal_contact_check(&s0.a, &j0, &d0).unwrap();
        assert!(nc0.normal(), "{nc0}");
        let der = contact_derived(&s0.a, &d0).unwrap();
        assert!(der.holds() && der.pairings.is_zero());
    }

    #[test]
    fn commuting_failure_reported() {
        let ring = JetRing::with_names(&[], &["D1", "D2", "D3"], BracketConstants::su2(2), 2).unwrap();
        let a = standard_algebra(&ring, &BracketConstants::su2(2)).unwrap();
        let e = Subbundle::span(&a, &["X3", "a3"]).unwrap();
        let ep = Subbundle::span(&a, &["X1", "X2", "a1", "a2"]).unwrap();
        let d = ContactDatum::new(&a, e, ep, vec![a.named("X3").unwrap()], Framing::named(&a, &["X1", "X2"]).unwrap(), Framing::named(&a, &["a1", "a2"]).unwrap()).unwrap();
        let rep = contact_check(&a, &d).unwrap();
        assert!(!rep.conditions[2].holds);
    }

    fn s3xs3(h0: bool) -> (crate::algebroid::ProductAlgebra, HermitianDatum) {
        use crate::morimoto::{canonical_triple, lift_framing, lift_section, lift_sgf, lift_subbundle, morimoto_product};
        let mut s = s3(3);
        if h0 {
            let r = s.a.ring().clone();
            let a = s.a.with_relations(&[r.gen(0), r.gen(1)]).unwrap();
            s = S3 { x: s.x.clone().map(|x| a.reduce(&x)), a };
        }
        let d = datum(&s);
        let j = hopf_j(&s, &d);
        let p = crate::algebroid::product_algebra(&s.a, &s.a).unwrap();
        let pa = &p.algebra;
        let e = lift_subbundle(&p, &d.e, 0).unwrap().direct_sum(pa, &lift_subbundle(&p, &d.e, 1).unwrap()).unwrap();
        let lift = |x: &Section, i| lift_section(&p, x, i);
        let f1 = Framing::new(vec![lift(&d.w.vectors[0], 0), lift(&d.v.vectors[0], 0)]);
        let f2 = Framing::new(vec![lift(&d.w.vectors[0], 1), lift(&d.v.vectors[0], 1)]);
        let triple = canonical_triple(pa, &f1, &f2).unwrap();
        let md = MorimotoDatum { j1: lift_sgf(&p, &j, 0).unwrap(), j2: lift_sgf(&p, &j, 1).unwrap(), triple, w1: None, w2: None };
        let jj = morimoto_product(pa, &md).unwrap();
        let k = Framing::new(d.l.gens().to_vec());
        let mut l = lift_framing(&p, &k, 0).vectors;
        l.extend(lift_framing(&p, &k, 1).vectors);
        let b = BicontactDatum {
            e,
            e1p: lift_subbundle(&p, &d.e_prime, 0).unwrap(),
            e2p: lift_subbundle(&p, &d.e_prime, 1).unwrap(),
            l,
            v1: lift(&d.v.vectors[0], 0),
            w1: lift(&d.w.vectors[0], 0),
            v2: lift(&d.v.vectors[0], 1),
            w2: lift(&d.w.vectors[0], 1),
            k1: Some(lift_framing(&p, &k, 0)),
            k2: Some(lift_framing(&p, &k, 1)),
        };
        (p, HermitianDatum { bicontact: b, j: jj })
    }

    #[test]
    fn s3xs3_hopf_bly() {
        let (p, h) = s3xs3(true);
        let a = &p.algebra;
        let b = bicontact_check(a, &h.bicontact).unwrap();
        assert!(b.valid(), "{b}");
        assert!(b.lemma.as_ref().unwrap().holds(), "{:?}", b.lemma);
        let rep = bly_check(a, &h).unwrap();
        eprintln!("{rep}");
        assert!(rep.conclusion());
    }
}
