//! Split structures, framings, SGF structures, eigenbundles, normalizers and
//! normal pairs.

use crate::algebroid::{AlgebroidError, Endo, FramedAlgebra, Section};
use crate::linalg::{self, LinalgError, Mat, Rref, Signature};
use crate::ring::{JetRing, RingElem};
use crate::scalar::Scalar;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("generator Gram matrix is not constant")]
    NonConstantGram,
    #[error("membership undecidable: {0}")]
    MembershipUndecidable(String),
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("not in the span: {0}")]
    NotInSpan(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("not an SGF structure: {0}")]
    NotSgf(String),
}

type Result<T> = std::result::Result<T, StructureError>;

/// Labelled ring element that must vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction {
    pub label: String,
    pub value: RingElem,
}

/// Subbundle spanned by a list of generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Subbundle {
    gens: Vec<Section>,
    gram: Mat,
    echelon: Option<Rref>,
}

impl Subbundle {
    pub fn new(alg: &FramedAlgebra, gens: Vec<Section>) -> Result<Self> {
        for g in &gens {
            if g.dim() != alg.dim() {
                return Err(AlgebroidError::DimensionMismatch(format!("generator of length {} in a rank {} frame", g.dim(), alg.dim())).into());
            }
        }
        let gens: Vec<Section> = gens.iter().map(|g| alg.reduce(g)).collect();
        let k = gens.len();
        let mut gram = Mat::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                gram.set(i, j, alg.ring().reduce(&alg.inner(&gens[i], &gens[j])?));
            }
        }
        let echelon = if k == 0 {
            Some(Rref { mat: Mat::zeros(0, alg.dim()), pivots: vec![] })
        } else {
            linalg::unit_echelon(&Mat::from_rows(gens.iter().map(|g| g.0.clone()).collect())).ok()
        };
        match &echelon {
            Some(e) if e.pivots.len() < k => return Err(StructureError::DependentGenerators),
            None if gram.det().is_zero() => {
                return Err(StructureError::MembershipUndecidable("generators have no unit echelon form and a singular Gram matrix".into()))
            }
            _ => {}
        }
        Ok(Subbundle { gens, gram, echelon })
    }
    /// Subbundle spanned by `list`, keeping a maximal independent subset in
    /// order.  Zero sections are skipped.
    pub fn spanned_by(alg: &FramedAlgebra, list: &[Section]) -> Result<Self> {
        let mut chosen: Vec<Section> = Vec::new();
        for x in list {
            let x = alg.reduce(x);
            if x.is_zero() {
                continue;
            }
            let mut trial = chosen.clone();
            trial.push(x);
            let m = Mat::from_rows(trial.iter().map(|g| g.0.clone()).collect());
            match linalg::unit_echelon(&m) {
                Ok(e) if e.pivots.len() == trial.len() => chosen = trial,
                Ok(_) => {}
                Err(_) => return Err(StructureError::MembershipUndecidable("span has non-constant rank".into())),
            }
        }
        Subbundle::new(alg, chosen)
    }
    /// Span of named frame elements.
    pub fn span(alg: &FramedAlgebra, names: &[&str]) -> Result<Self> {
        let gens = names.iter().map(|n| alg.named(n)).collect::<std::result::Result<Vec<_>, _>>()?;
        Subbundle::new(alg, gens)
    }
    pub fn whole(alg: &FramedAlgebra) -> Result<Self> {
        Subbundle::new(alg, (0..alg.dim()).map(|i| alg.e(i)).collect())
    }
    pub fn rank(&self) -> usize {
        self.gens.len()
    }
    pub fn gens(&self) -> &[Section] {
        &self.gens
    }
    pub fn gram(&self) -> &Mat {
        &self.gram
    }
    /// Echelon rows, a canonical spanning set once the pivot order is fixed.
    pub fn canonical_gens(&self) -> Option<Vec<Section>> {
        self.echelon.as_ref().map(|e| (0..e.pivots.len()).map(|r| Section(e.mat.row(r))).collect())
    }
    pub fn canonicalize(&self, alg: &FramedAlgebra) -> Result<Self> {
        match self.canonical_gens() {
            Some(g) => Subbundle::new(alg, g),
            None => Ok(self.clone()),
        }
    }

    /// Residual after echelon reduction, when an echelon form exists.
    pub fn echelon_residual(&self, alg: &FramedAlgebra, y: &Section) -> Option<Section> {
        self.echelon.as_ref().map(|e| alg.reduce(&Section(linalg::echelon_reduce(e, &y.0))))
    }
    /// Residual `y - P(y)` for the Gram projection, defined when the generator
    /// Gram is invertible over the ring.
    pub fn gram_residual(&self, alg: &FramedAlgebra, y: &Section) -> Result<Section> {
        if self.rank() == 0 {
            return Ok(y.clone());
        }
        let frame: Vec<Vec<RingElem>> = self.gens.iter().map(|g| g.0.clone()).collect();
        let (_, _, res) = linalg::gram_project(&frame, alg.gram(), &y.0)?;
        Ok(alg.reduce(&Section(res)))
    }
    /// Membership residual by Gram projection when available, else echelon
    /// reduction.
    pub fn residual(&self, alg: &FramedAlgebra, y: &Section) -> Result<Section> {
        match self.gram_residual(alg, y) {
            Ok(r) => Ok(r),
            Err(_) => self
                .echelon_residual(alg, y)
                .ok_or_else(|| StructureError::MembershipUndecidable("singular Gram and no unit echelon form".into())),
        }
    }
    pub fn contains(&self, alg: &FramedAlgebra, y: &Section) -> Result<bool> {
        Ok(self.residual(alg, y)?.is_zero())
    }
    /// Coefficients `c` with `y = sum c_i s_i`, or `None` when `y` is outside.
    pub fn coords(&self, alg: &FramedAlgebra, y: &Section) -> Result<Option<Vec<RingElem>>> {
        let k = self.rank();
        if k == 0 {
            return Ok(if alg.reduce(y).is_zero() { Some(vec![]) } else { None });
        }
        if let Ok(inv) = self.gram.inverse() {
            let rhs: Vec<RingElem> = self.gens.iter().map(|g| alg.inner(g, y)).collect::<std::result::Result<_, _>>()?;
            let c: Vec<RingElem> = inv.mul_vec(&rhs).iter().map(|x| alg.ring().reduce(x)).collect();
            let back = Section::combination(alg.dim(), &c, &self.gens);
            return Ok(if alg.reduce(&y.sub(&back)).is_zero() { Some(c) } else { None });
        }
        let s = Mat::from_cols(&self.gens.iter().map(|g| g.0.clone()).collect::<Vec<_>>());
        match linalg::solve_any(&s, &y.0) {
            Ok(c) => Ok(c.map(|c| c.iter().map(|x| alg.ring().reduce(x)).collect())),
            Err(_) => Err(StructureError::MembershipUndecidable("no unit pivots for the coordinate solve".into())),
        }
    }

    pub fn split_check(&self) -> Result<SplitReport> {
        if !self.gram.is_constant() {
            return match lagrangian_block(&self.gram) {
                Some(h) => Ok(SplitReport { rank: self.rank(), signature: Signature::Nondegenerate { p: h, q: h }, split: true }),
                None => Err(StructureError::NonConstantGram),
            };
        }
        let sig = linalg::signature(&self.gram).map_err(|_| StructureError::NonConstantGram)?;
        let split = matches!(sig, Signature::Nondegenerate { p, q } if p == q);
        Ok(SplitReport { rank: self.rank(), signature: sig, split })
    }

    /// Generators of the orthogonal complement.
    pub fn orthogonal_complement(&self, alg: &FramedAlgebra) -> Result<Self> {
        if self.rank() == 0 {
            return Subbundle::whole(alg);
        }
        let rows: Vec<Vec<RingElem>> = self.gens.iter().map(|g| alg.gram().transpose().mul_vec(&g.0)).collect();
        let a = Mat::from_rows(rows);
        let e = linalg::unit_echelon(&a)?;
        let ker = linalg::echelon_kernel(&e);
        Subbundle::new(alg, ker.into_iter().map(Section).collect())?.canonicalize(alg)
    }

    pub fn direct_sum(&self, alg: &FramedAlgebra, other: &Subbundle) -> Result<Self> {
        let mut g = self.gens.clone();
        g.extend(other.gens.iter().cloned());
        Subbundle::new(alg, g)
    }
    pub fn conj(&self, alg: &FramedAlgebra) -> Result<Self> {
        Subbundle::new(alg, self.gens.iter().map(|g| g.conj()).collect())
    }
    /// Containment of every generator of `other`.
    pub fn contains_all(&self, alg: &FramedAlgebra, other: &Subbundle) -> Result<bool> {
        for g in &other.gens {
            if !self.contains(alg, g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
    pub fn same_span(&self, alg: &FramedAlgebra, other: &Subbundle) -> Result<bool> {
        Ok(self.rank() == other.rank() && self.contains_all(alg, other)? && other.contains_all(alg, self)?)
    }
    pub fn orthogonal_to(&self, alg: &FramedAlgebra, other: &Subbundle) -> Result<bool> {
        for a in &self.gens {
            for b in &other.gens {
                if !alg.ring().reduce(&alg.inner(a, b)?).is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
    pub fn is_isotropic(&self) -> bool {
        self.gram.is_zero()
    }
}

/// Half the rank if some half of the generators is isotropic and pairs with
/// the rest through a constant invertible block; the Gram is then congruent
/// to a split form whatever its remaining block is.
fn lagrangian_block(g: &Mat) -> Option<usize> {
    let r = g.rows();
    if !r.is_multiple_of(2) || r > 16 {
        return None;
    }
    let h = r / 2;
    for mask in 0u32..(1 << r) {
        if mask.count_ones() as usize != h {
            continue;
        }
        let (ins, outs): (Vec<usize>, Vec<usize>) = (0..r).partition(|i| mask & (1 << i) != 0);
        if ins.iter().any(|&i| ins.iter().any(|&j| !g.get(i, j).is_zero())) {
            continue;
        }
        let p = Mat::from_rows(ins.iter().map(|&i| outs.iter().map(|&j| g.get(i, j).clone()).collect()).collect());
        if p.is_constant() && p.det().is_unit() {
            return Some(h);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitReport {
    pub rank: usize,
    pub signature: Signature,
    pub split: bool,
}

impl fmt::Display for SplitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rank {}, signature {}: {}", self.rank, self.signature, if self.split { "split structure" } else { "not split" })
    }
}

/// Real sections meant to frame a subbundle.
#[derive(Clone, Debug, PartialEq)]
pub struct Framing {
    pub vectors: Vec<Section>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FramingReport {
    pub real: bool,
    pub count_matches: bool,
    pub spans: bool,
}

impl FramingReport {
    pub fn passed(&self) -> bool {
        self.real && self.count_matches && self.spans
    }
}

impl Framing {
    pub fn new(vectors: Vec<Section>) -> Self {
        Framing { vectors }
    }
    pub fn named(alg: &FramedAlgebra, names: &[&str]) -> Result<Self> {
        Ok(Framing { vectors: names.iter().map(|n| alg.named(n)).collect::<std::result::Result<_, _>>()? })
    }
    pub fn len(&self) -> usize {
        self.vectors.len()
    }
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
    pub fn check(&self, alg: &FramedAlgebra, sub: &Subbundle) -> Result<FramingReport> {
        let real = self.vectors.iter().all(|v| v.is_real());
        let count_matches = self.vectors.len() == sub.rank();
        let spans = if count_matches {
            match Subbundle::new(alg, self.vectors.clone()) {
                Ok(v) => v.same_span(alg, sub)?,
                Err(StructureError::DependentGenerators) => false,
                Err(e) => return Err(e),
            }
        } else {
            false
        };
        Ok(FramingReport { real, count_matches, spans })
    }
    pub fn as_subbundle(&self, alg: &FramedAlgebra) -> Result<Subbundle> {
        Subbundle::new(alg, self.vectors.clone())
    }
}

/// Endomorphism `J` of a split structure `E`; column `j` of `m` holds the
/// coordinates of `J(s_j)` in the generators `s_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sgf {
    pub e: Subbundle,
    m: Mat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SgfReport {
    pub skew: bool,
    pub orthogonal: bool,
    pub square_minus_one: bool,
    pub phi_cubic: bool,
    pub kernel_contains_complement: bool,
    pub split: bool,
}

impl SgfReport {
    pub fn passed(&self) -> bool {
        self.skew && self.orthogonal && self.square_minus_one && self.phi_cubic && self.kernel_contains_complement && self.split
    }
}

impl fmt::Display for SgfReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        write!(
            f,
            "split {}, skew {}, orthogonal {}, J^2 = -1 {}, Phi^3 + Phi = 0 {}, ker Phi contains complement {}",
            yn(self.split),
            yn(self.skew),
            yn(self.orthogonal),
            yn(self.square_minus_one),
            yn(self.phi_cubic),
            yn(self.kernel_contains_complement)
        )
    }
}

impl Sgf {
    pub fn from_matrix(e: Subbundle, m: Mat) -> Result<Self> {
        if m.rows() != e.rank() || m.cols() != e.rank() {
            return Err(StructureError::NotSgf(format!("{}x{} matrix on a rank {} structure", m.rows(), m.cols(), e.rank())));
        }
        Ok(Sgf { e, m })
    }
    /// `images[j] = J(s_j)`; each image must lie in `E`.
    pub fn from_images(alg: &FramedAlgebra, e: Subbundle, images: &[Section]) -> Result<Self> {
        if images.len() != e.rank() {
            return Err(StructureError::NotSgf(format!("{} images for a rank {} structure", images.len(), e.rank())));
        }
        let mut cols = Vec::new();
        for (j, y) in images.iter().enumerate() {
            match e.coords(alg, y)? {
                Some(c) => cols.push(c),
                None => return Err(StructureError::NotInSpan(format!("image of generator {j}: {}", alg.format_section(y)))),
            }
        }
        Ok(Sgf { e, m: Mat::from_cols(&cols) })
    }
    pub fn matrix(&self) -> &Mat {
        &self.m
    }
    /// `J(x)` for `x` in `E`.
    pub fn apply(&self, alg: &FramedAlgebra, x: &Section) -> Result<Section> {
        let c = self.e.coords(alg, x)?.ok_or_else(|| StructureError::NotInSpan(alg.format_section(x)))?;
        let jc = self.m.mul_vec(&c);
        Ok(alg.reduce(&Section::combination(alg.dim(), &jc, self.e.gens())))
    }
    /// Generator images `J(s_j)`.
    pub fn images(&self, alg: &FramedAlgebra) -> Vec<Section> {
        (0..self.e.rank()).map(|j| alg.reduce(&Section::combination(alg.dim(), &self.m.col(j), self.e.gens()))).collect()
    }
    /// Zero extension `Phi = S M G_E^{-1} S^t G`.
    pub fn phi(&self, alg: &FramedAlgebra) -> Result<Endo> {
        let s = Mat::from_cols(&self.e.gens().iter().map(|g| g.0.clone()).collect::<Vec<_>>());
        if self.e.rank() == 0 {
            return Ok(Endo(Mat::zeros(alg.dim(), alg.dim())));
        }
        let ginv = self.e.gram().inverse().map_err(|_| StructureError::NotSgf("restricted pairing is degenerate".into()))?;
        let p = s.mul(&self.m).mul(&ginv).mul(&s.transpose()).mul(alg.gram());
        Ok(Endo(p.map(|x| alg.ring().reduce(x))))
    }
    pub fn check(&self, alg: &FramedAlgebra) -> Result<SgfReport> {
        let g = self.e.gram();
        let r = |m: &Mat| m.map(|x| alg.ring().reduce(x));
        let mt = self.m.transpose();
        let skew = r(&mt.mul(g).add(&g.mul(&self.m))).is_zero();
        let orthogonal = r(&mt.mul(g).mul(&self.m)) == *g;
        let k = self.e.rank();
        let square_minus_one = r(&self.m.mul(&self.m).add(&Mat::identity(k))).is_zero();
        let split = self.e.split_check().map(|s| s.split).unwrap_or(false);
        let (phi_cubic, kernel_contains_complement) = match self.phi(alg) {
            Ok(p) => {
                let p3 = r(&p.0.mul(&p.0).mul(&p.0));
                let cubic = r(&p3.add(&p.0)).is_zero();
                let comp = self.e.orthogonal_complement(alg)?;
                let ker = comp.gens().iter().all(|c| alg.reduce(&p.apply(c)).is_zero());
                (cubic, ker)
            }
            Err(_) => (false, false),
        };
        Ok(SgfReport { skew, orthogonal, square_minus_one, phi_cubic, kernel_contains_complement, split })
    }
    /// The `+i` eigenbundle `{x - i J x}`.
    pub fn eigenbundle(&self, alg: &FramedAlgebra) -> Result<Lagrangian> {
        let mi = -Scalar::i();
        let cands: Vec<Section> = self
            .e
            .gens()
            .iter()
            .zip(self.images(alg))
            .map(|(s, js)| alg.reduce(&s.add(&js.scale(&mi))))
            .collect();
        Lagrangian::from_candidates(alg, self.e.clone(), cands)
    }
}

/// Maximal isotropic subbundle of `E ⊗ C` with `L ∩ conj(L) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lagrangian {
    pub ambient: Subbundle,
    gens: Vec<Section>,
    pairing: Mat,
}

impl Lagrangian {
    /// Greedy choice of independent generators among `cands`; the pairing with
    /// the conjugates must end up invertible.
    pub fn from_candidates(alg: &FramedAlgebra, ambient: Subbundle, cands: Vec<Section>) -> Result<Self> {
        let want = ambient.rank() / 2;
        let mut chosen: Vec<Section> = Vec::new();
        for c in cands {
            if chosen.len() == want {
                break;
            }
            let mut trial = chosen.clone();
            trial.push(c);
            let m = Mat::from_rows(trial.iter().map(|g| g.0.clone()).collect());
            if matches!(linalg::unit_echelon(&m), Ok(e) if e.pivots.len() == trial.len()) {
                chosen = trial;
            }
        }
        if chosen.len() != want {
            return Err(StructureError::NotSgf(format!("only {} of {} eigenbundle generators are independent", chosen.len(), want)));
        }
        let pairing = conj_pairing(alg, &chosen)?;
        if !pairing.det().is_unit() {
            return Err(StructureError::NotSgf("eigenbundle meets its conjugate".into()));
        }
        Ok(Lagrangian { ambient, gens: chosen, pairing })
    }
    /// Maximal isotropic subbundle of `ambient` given by `gens`, without the
    /// condition on conjugates.
    pub fn maximal_isotropic(alg: &FramedAlgebra, ambient: Subbundle, gens: Vec<Section>) -> Result<Self> {
        let sub = Subbundle::new(alg, gens)?;
        if !sub.is_isotropic() {
            return Err(StructureError::PreconditionFailed("generators are not isotropic".into()));
        }
        if 2 * sub.rank() != ambient.rank() {
            return Err(StructureError::PreconditionFailed(format!("rank {} is not half of {}", sub.rank(), ambient.rank())));
        }
        if !ambient.contains_all(alg, &sub)? {
            return Err(StructureError::PreconditionFailed("generators leave the ambient structure".into()));
        }
        let pairing = conj_pairing(alg, sub.gens())?;
        Ok(Lagrangian { ambient, gens: sub.gens().to_vec(), pairing })
    }
    pub fn gens(&self) -> &[Section] {
        &self.gens
    }
    pub fn rank(&self) -> usize {
        self.gens.len()
    }
    /// `<l_i, conj(l_j)>`.
    pub fn conj_pairing(&self) -> &Mat {
        &self.pairing
    }
    pub fn is_isotropic(&self, alg: &FramedAlgebra) -> Result<bool> {
        for a in &self.gens {
            for b in &self.gens {
                if !alg.ring().reduce(&alg.inner(a, b)?).is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
    /// Paired-membership data of `y`: the residual outside `E` and the
    /// pairings `<y, l_k>`.  `y` lies in `L` iff all of them vanish.
    pub fn membership(&self, alg: &FramedAlgebra, y: &Section) -> Result<(Section, Vec<RingElem>)> {
        let external = self.ambient.residual(alg, y)?;
        let pairings = self.gens.iter().map(|l| alg.inner(y, l).map(|v| alg.ring().reduce(&v))).collect::<std::result::Result<_, _>>()?;
        Ok((external, pairings))
    }
    pub fn contains(&self, alg: &FramedAlgebra, y: &Section) -> Result<bool> {
        let (ext, p) = self.membership(alg, y)?;
        Ok(ext.is_zero() && p.iter().all(|x| x.is_zero()))
    }
    /// Membership by solving against the generators directly.
    pub fn contains_by_solve(&self, alg: &FramedAlgebra, y: &Section) -> Result<bool> {
        let sub = Subbundle::new(alg, self.gens.clone())?;
        sub.echelon_residual(alg, y)
            .map(|r| r.is_zero())
            .ok_or_else(|| StructureError::MembershipUndecidable("eigenbundle generators have no unit echelon form".into()))
    }
    pub fn as_subbundle(&self, alg: &FramedAlgebra) -> Result<Subbundle> {
        Subbundle::new(alg, self.gens.clone())
    }
}

fn conj_pairing(alg: &FramedAlgebra, ls: &[Section]) -> Result<Mat> {
    let k = ls.len();
    let mut m = Mat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            m.set(i, j, alg.ring().reduce(&alg.inner(&ls[i], &ls[j].conj())?));
        }
    }
    Ok(m)
}

/// Outcome of [`crf_obstructions`].
#[derive(Clone, Debug, PartialEq)]
pub struct CrfReport {
    pub pairings: Vec<Obstruction>,
    pub external: Vec<Obstruction>,
    pub generators: Vec<RingElem>,
    pub max_order: usize,
    pub truncated: bool,
}

impl CrfReport {
    pub fn crf(&self) -> bool {
        self.pairings.is_empty() && self.external.is_empty()
    }
}

/// Obstructions to closure of the eigenbundle `L_J` under the bracket: the
/// pairings `<[l_i, l_j], l_k>` and, separately, any part of `[l_i, l_j]`
/// outside `E`.
pub fn crf_obstructions(alg: &FramedAlgebra, j: &Sgf) -> Result<CrfReport> {
    let l = j.eigenbundle(alg)?;
    lagrangian_obstructions(alg, &l)
}

pub fn lagrangian_obstructions(alg: &FramedAlgebra, l: &Lagrangian) -> Result<CrfReport> {
    let mut pairings = Vec::new();
    let mut external = Vec::new();
    let mut max_order = 0;
    let mut truncated = false;
    let k = l.rank();
    for a in 0..k {
        for b in 0..k {
            let br = alg.reduce(&alg.dorfman(&l.gens[a], &l.gens[b])?);
            max_order = max_order.max(br.consumed_order());
            truncated |= br.truncated();
            let (ext, ps) = l.membership(alg, &br)?;
            for (c, v) in ps.into_iter().enumerate() {
                if !v.is_zero() {
                    pairings.push(Obstruction { label: format!("<[l{}, l{}], l{}>", a + 1, b + 1, c + 1), value: v });
                }
            }
            for (m, v) in ext.0.iter().enumerate() {
                if !v.is_zero() {
                    external.push(Obstruction {
                        label: format!("[l{}, l{}] outside E along {}", a + 1, b + 1, alg.names()[m]),
                        value: v.clone(),
                    });
                }
            }
        }
    }
    let all: Vec<RingElem> = pairings.iter().chain(&external).map(|o| o.value.clone()).collect();
    Ok(CrfReport { generators: real_generators(&all), pairings, external, max_order, truncated })
}

/// Monic real and imaginary parts of `values`, without repeats.
pub fn real_generators(values: &[RingElem]) -> Vec<RingElem> {
    let mut out: Vec<RingElem> = Vec::new();
    for v in values {
        for p in [v.re(), v.im()] {
            if p.is_zero() {
                continue;
            }
            let m = p.monic();
            if !out.contains(&m) {
                out.push(m);
            }
        }
    }
    out
}

/// Whether every element of `xs` is a constant combination of `ys`.
pub fn in_linear_span(xs: &[RingElem], ys: &[RingElem]) -> bool {
    xs.iter().all(|x| {
        if x.is_zero() {
            return true;
        }
        if ys.is_empty() {
            return false;
        }
        let mut monos = std::collections::BTreeSet::new();
        for y in ys.iter().chain(std::iter::once(x)) {
            for (m, _) in y.terms() {
                monos.insert(m.clone());
            }
        }
        let cols: Vec<Vec<RingElem>> = ys.iter().map(|y| monos.iter().map(|m| RingElem::constant(coeff_of(y, m))).collect()).collect();
        let rhs: Vec<RingElem> = monos.iter().map(|m| RingElem::constant(coeff_of(x, m))).collect();
        matches!(linalg::solve_any(&Mat::from_cols(&cols), &rhs), Ok(Some(_)))
    })
}

/// Whether the constant-coefficient span of `a` equals that of `b`.
pub fn same_linear_span(a: &[RingElem], b: &[RingElem]) -> bool {
    in_linear_span(a, b) && in_linear_span(b, a)
}

/// Whether `obstructions` and `targets` cut out the same conditions: every
/// obstruction vanishes modulo the targets (with their derivatives), and
/// every real part of a target is a constant combination of obstructions.
pub fn generated_by(ring: &JetRing, obstructions: &[RingElem], targets: &[RingElem]) -> Result<bool> {
    let q = ring.with_relations(targets).map_err(AlgebroidError::from)?;
    if !obstructions.iter().all(|o| q.reduce(o).is_zero()) {
        return Ok(false);
    }
    Ok(in_linear_span(&real_generators(targets), obstructions))
}

/// Whether `a` and `b` define the same conditions: each side vanishes modulo
/// the relations (and their derivatives) given by the other side's linear
/// members.
pub fn ideals_match(ring: &JetRing, a: &[RingElem], b: &[RingElem]) -> Result<bool> {
    let within = |xs: &[RingElem], ys: &[RingElem]| -> Result<bool> {
        let lin: Vec<RingElem> = real_generators(ys).into_iter().filter(|y| ring.with_relations(std::slice::from_ref(y)).is_ok()).collect();
        let q = ring.with_relations(&lin).map_err(AlgebroidError::from)?;
        Ok(xs.iter().all(|x| q.reduce(x).is_zero()))
    };
    Ok(within(a, b)? && within(b, a)?)
}

fn coeff_of(x: &RingElem, m: &crate::ring::Monomial) -> Scalar {
    x.terms().find(|(n, _)| *n == m).map(|(_, c)| c.clone()).unwrap_or_else(Scalar::zero)
}

/// Outcome of a normalizer check.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizerReport {
    pub holds: bool,
    pub obstructions: Vec<Obstruction>,
}

/// Whether `[x, s_j]` lies in `S` for every generator `s_j`.
pub fn normalizes(alg: &FramedAlgebra, x: &Section, s: &Subbundle) -> Result<NormalizerReport> {
    let mut obstructions = Vec::new();
    for (j, g) in s.gens().iter().enumerate() {
        let br = alg.reduce(&alg.dorfman(x, g)?);
        let res = s.residual(alg, &br)?;
        for (m, v) in res.0.iter().enumerate() {
            if !v.is_zero() {
                obstructions.push(Obstruction { label: format!("[x, s{}] along {}", j + 1, alg.names()[m]), value: v.clone() });
            }
        }
    }
    Ok(NormalizerReport { holds: obstructions.is_empty(), obstructions })
}

/// Whether `x` normalizes the eigenbundle, decided by paired membership.
pub fn normalizes_lagrangian(alg: &FramedAlgebra, x: &Section, l: &Lagrangian) -> Result<NormalizerReport> {
    let mut obstructions = Vec::new();
    for (j, g) in l.gens().iter().enumerate() {
        let br = alg.reduce(&alg.dorfman(x, g)?);
        let (ext, ps) = l.membership(alg, &br)?;
        for (c, v) in ps.into_iter().enumerate() {
            if !v.is_zero() {
                obstructions.push(Obstruction { label: format!("<[x, l{}], l{}>", j + 1, c + 1), value: v });
            }
        }
        for (m, v) in ext.0.iter().enumerate() {
            if !v.is_zero() {
                obstructions.push(Obstruction { label: format!("[x, l{}] outside E along {}", j + 1, alg.names()[m]), value: v.clone() });
            }
        }
    }
    Ok(NormalizerReport { holds: obstructions.is_empty(), obstructions })
}

/// Membership of `x` in the normalizer of `J`, which is the normalizer of `L_J`.
pub fn normalizes_sgf(alg: &FramedAlgebra, x: &Section, j: &Sgf) -> Result<NormalizerReport> {
    normalizes_lagrangian(alg, x, &j.eigenbundle(alg)?)
}

/// Verdict on one framing condition.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionVerdict {
    pub name: &'static str,
    pub holds: bool,
    pub obstructions: Vec<Obstruction>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalPairReport {
    pub crf: bool,
    pub crf_obstructions: Vec<RingElem>,
    pub conditions: Vec<ConditionVerdict>,
    /// `V ⊆ I(E)`, evaluated when `E' = E^⊥`.
    pub simplified: Option<bool>,
    pub generators: Vec<RingElem>,
}

impl NormalPairReport {
    pub fn normal(&self) -> bool {
        self.crf && self.conditions[0].holds
    }
    pub fn conditions_agree(&self) -> bool {
        let first = self.conditions[0].holds;
        self.conditions.iter().all(|c| c.holds == first) && self.simplified.is_none_or(|s| s == first)
    }
}

impl fmt::Display for NormalPairReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CRF: {}", self.crf)?;
        for c in &self.conditions {
            writeln!(f, "{}: {}", c.name, c.holds)?;
        }
        if let Some(s) = self.simplified {
            writeln!(f, "V in I(E) (E' = E^perp): {s}")?;
        }
        writeln!(f, "conditions agree: {}", self.conditions_agree())?;
        write!(f, "normal pair: {}", self.normal())
    }
}

fn collect(label: &str, idx: usize, rep: &NormalizerReport, out: &mut Vec<Obstruction>) {
    for o in &rep.obstructions {
        out.push(Obstruction { label: format!("v{} {}: {}", idx + 1, label, o.label), value: o.value.clone() });
    }
}

/// The four equivalent normality conditions for `(J, V)` with `V` a framing
/// of `E' ⊆ E^⊥`, each evaluated on its own, plus the CRF status of `J`.
pub fn normal_pair_check(alg: &FramedAlgebra, j: &Sgf, e_prime: &Subbundle, v: &Framing) -> Result<NormalPairReport> {
    let e = &j.e;
    if !e.orthogonal_to(alg, e_prime)? {
        return Err(StructureError::PreconditionFailed("E' is not orthogonal to E".into()));
    }
    let crf = crf_obstructions(alg, j)?;
    let l = j.eigenbundle(alg)?;
    let sum = e.direct_sum(alg, e_prime)?;
    let mut in_j = Vec::new();
    let mut in_e = Vec::new();
    let mut in_ep = Vec::new();
    let mut in_sum = Vec::new();
    for x in &v.vectors {
        in_j.push(normalizes_lagrangian(alg, x, &l)?);
        in_e.push(normalizes(alg, x, e)?);
        in_ep.push(normalizes(alg, x, e_prime)?);
        in_sum.push(normalizes(alg, x, &sum)?);
    }
    let cond = |name: &'static str, a: &[NormalizerReport], la: &str, b: &[NormalizerReport], lb: &str| {
        let mut obs = Vec::new();
        for (i, (ra, rb)) in a.iter().zip(b).enumerate() {
            collect(la, i, ra, &mut obs);
            collect(lb, i, rb, &mut obs);
        }
        ConditionVerdict { name, holds: obs.is_empty(), obstructions: obs }
    };
    let conditions = vec![
        cond("i) V in I(J) and I(E')", &in_j, "I(J)", &in_ep, "I(E')"),
        cond("ii) V in I(J) and I(E+E')", &in_j, "I(J)", &in_sum, "I(E+E')"),
        cond("iii) V in I(E) and I(E+E')", &in_e, "I(E)", &in_sum, "I(E+E')"),
        cond("iv) V in I(E) and I(E')", &in_e, "I(E)", &in_ep, "I(E')"),
    ];
    let simplified = if e.rank() + e_prime.rank() == alg.dim() { Some(in_e.iter().all(|r| r.holds)) } else { None };
    let mut all: Vec<RingElem> = crf.generators.clone();
    for c in &conditions {
        all.extend(c.obstructions.iter().map(|o| o.value.clone()));
    }
    Ok(NormalPairReport {
        crf: crf.crf(),
        crf_obstructions: crf.generators.clone(),
        conditions,
        simplified,
        generators: real_generators(&all),
    })
}

/// For CRF `J` and `u` in `I(J)`, whether the zero extension `Phi(u)` is in
/// `I(J)` as well.
pub fn ju_in_normalizer(alg: &FramedAlgebra, j: &Sgf, u: &Section) -> Result<bool> {
    if !crf_obstructions(alg, j)?.crf() {
        return Err(StructureError::PreconditionFailed("J is not CRF".into()));
    }
    let l = j.eigenbundle(alg)?;
    if !normalizes_lagrangian(alg, u, &l)?.holds {
        return Err(StructureError::PreconditionFailed("u is not in the normalizer of J".into()));
    }
    let ju = alg.reduce(&j.phi(alg)?.apply(u));
    Ok(normalizes_lagrangian(alg, &ju, &l)?.holds)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessReport {
    pub spans: bool,
    pub normalizing: Vec<bool>,
}

impl CompletenessReport {
    /// A failing candidate does not rule out other framings.
    pub fn complete(&self) -> bool {
        self.spans && self.normalizing.iter().all(|b| *b)
    }
}

/// Whether the candidate framing `w` spans `E` and normalizes it.
pub fn completeness_check(alg: &FramedAlgebra, e: &Subbundle, w: &Framing) -> Result<CompletenessReport> {
    let spans = w.check(alg, e)?.passed();
    let normalizing = w.vectors.iter().map(|x| normalizes(alg, x, e).map(|r| r.holds)).collect::<Result<_>>()?;
    Ok(CompletenessReport { spans, normalizing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::standard_algebra;
    use crate::ring::{BracketConstants, JetRing};

    fn su2_flat() -> FramedAlgebra {
        let ring = JetRing::with_names(&["h"], &["D1", "D2", "D3"], BracketConstants::su2(2), 3).unwrap();
        standard_algebra(&ring, &BracketConstants::su2(2)).unwrap()
    }

    #[test]
    fn hopf_split_and_complement() {
        let a = su2_flat();
        let e = Subbundle::span(&a, &["X2", "X3", "a2", "a3"]).unwrap();
        let ep = Subbundle::span(&a, &["X1", "a1"]).unwrap();
        assert!(e.split_check().unwrap().split);
        assert!(ep.split_check().unwrap().split);
        assert!(!Subbundle::span(&a, &["X1"]).unwrap().split_check().unwrap().split);
        assert!(ep.orthogonal_complement(&a).unwrap().same_span(&a, &e).unwrap());
        assert_eq!(Subbundle::whole(&a).unwrap().orthogonal_complement(&a).unwrap().rank(), 0);
    }

    #[test]
    fn hopf_sgf_is_crf() {
        let a = su2_flat();
        let e = Subbundle::span(&a, &["X2", "X3", "a2", "a3"]).unwrap();
        let imgs = vec![a.e(2), a.e(1).neg(), a.e(5), a.e(4).neg()];
        let j = Sgf::from_images(&a, e, &imgs).unwrap();
        let rep = j.check(&a).unwrap();
        assert!(rep.passed(), "{rep}");
        let l = j.eigenbundle(&a).unwrap();
        assert!(l.is_isotropic(&a).unwrap());
        assert!(l.conj_pairing().det().is_unit());
        assert!(crf_obstructions(&a, &j).unwrap().crf());
    }
}

