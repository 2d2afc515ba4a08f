//! Declarative documents and the command runner behind the `gencrf` binary.

use crate::algebroid::{product_algebra, standard_algebra, validate, FramedAlgebra, ProductAlgebra, Section};
use crate::catalog::{self, CatalogError, Ctx};
use crate::contact::{
    bicontact_check, bly_check, contact_check, contact_derived, normal_contact_check, BicontactDatum, ContactDatum, HermitianDatum,
};
use crate::linalg::Mat;
use crate::morimoto::{
    abstract_morimoto_check, admissible_from_blocks, canonical_triple, lift_framing, lift_section, lift_sgf, lift_subbundle, morimoto_product,
    AdmissibleTriple, MorimotoDatum, MorimotoError,
};
use crate::ring::{BracketConstants, JetRing, RingElem};
use crate::scalar::{parse_rational, Scalar};
use crate::structures::{crf_obstructions, normal_pair_check, Framing, Obstruction, Sgf, StructureError, Subbundle};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("unknown key at line {line}, column {column}: {msg}")]
    UnknownKey { line: usize, column: usize, msg: String },
    #[error("unresolved name: {0}")]
    UnresolvedName(String),
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
    #[error("{0}")]
    Command(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

type Result<T> = std::result::Result<T, CliError>;

fn invalid(path: &str, e: impl fmt::Display) -> CliError {
    CliError::Invalid { path: path.to_string(), msg: e.to_string() }
}

/// A number written as an integer, `"p/q"`, or `{"re": "p/q", "im": "p/q"}`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Text(String),
    Complex { re: String, im: String },
}

impl Num {
    pub fn scalar(&self) -> Option<Scalar> {
        match self {
            Num::Int(n) => Some(Scalar::from_int(*n)),
            Num::Text(s) => parse_rational(s).map(Scalar::from_rational),
            Num::Complex { re, im } => Some(Scalar::complex(parse_rational(re)?, parse_rational(im)?)),
        }
    }
}

/// Structure constants: `"abelian"`, `"su2"` (scale 2), or entries
/// `[a, b, c, value]` for `[D_a, D_b] = value D_c` with `a` before `b`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum Constants {
    Named(String),
    Entries(Vec<(String, String, String, Num)>),
}

impl Default for Constants {
    fn default() -> Self {
        Constants::Named("abelian".into())
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub name: String,
    #[serde(default)]
    pub generators: Vec<String>,
    pub derivations: Vec<String>,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    pub x: String,
    pub y: String,
    pub value: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnchorSpec {
    pub x: String,
    pub vector: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraSpec {
    /// `T G x T*G` of the Lie algebra of the ring's derivations.
    Standard { name: String, ring: String },
    Product { name: String, factors: [String; 2] },
    Explicit {
        name: String,
        ring: String,
        frame: Vec<String>,
        gram: Vec<Vec<String>>,
        #[serde(default)]
        brackets: Vec<BracketSpec>,
        #[serde(default)]
        anchor: Vec<AnchorSpec>,
    },
}

impl AlgebraSpec {
    pub fn name(&self) -> &str {
        match self {
            AlgebraSpec::Standard { name, .. } | AlgebraSpec::Product { name, .. } | AlgebraSpec::Explicit { name, .. } => name,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LiftSpec {
    pub from: String,
    /// 1 or 2.
    pub factor: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub name: String,
    pub algebra: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift: Option<LiftSpec>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Blocks {
    pub a: Vec<Vec<String>>,
    pub b: Vec<Vec<String>>,
    pub c: Vec<Vec<String>>,
    pub d: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureSpec {
    Subbundle { name: String, algebra: String, gens: Vec<String> },
    Framing { name: String, algebra: String, vectors: Vec<String> },
    Sgf { name: String, algebra: String, on: String, images: Vec<String> },
    /// A subbundle, framing or SGF structure of a factor, pulled back.
    Lift { name: String, algebra: String, from: String, factor: usize },
    /// Admissible triple from `Psi` blocks; canonical when `blocks` is absent.
    Triple {
        name: String,
        algebra: String,
        v1: String,
        v2: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        blocks: Option<Blocks>,
    },
    Morimoto {
        name: String,
        algebra: String,
        j1: String,
        j2: String,
        triple: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        w1: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        w2: Option<String>,
    },
    Contact {
        name: String,
        algebra: String,
        e: String,
        e_prime: String,
        l: Vec<String>,
        v: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        w: Option<Vec<String>>,
    },
    Bicontact {
        name: String,
        algebra: String,
        e: String,
        e1_prime: String,
        e2_prime: String,
        l: Vec<String>,
        v1: String,
        w1: String,
        v2: String,
        w2: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k1: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k2: Option<Vec<String>>,
    },
    Hermitian { name: String, algebra: String, bicontact: String, j: String },
    /// `J1 (+)_Psi J2` of a Morimoto datum.
    Product { name: String, algebra: String, datum: String },
}

impl StructureSpec {
    pub fn name(&self) -> &str {
        use StructureSpec::*;
        match self {
            Subbundle { name, .. }
            | Framing { name, .. }
            | Sgf { name, .. }
            | Lift { name, .. }
            | Triple { name, .. }
            | Morimoto { name, .. }
            | Contact { name, .. }
            | Bicontact { name, .. }
            | Hermitian { name, .. }
            | Product { name, .. } => name,
        }
    }
    fn algebra(&self) -> &str {
        use StructureSpec::*;
        match self {
            Subbundle { algebra, .. }
            | Framing { algebra, .. }
            | Sgf { algebra, .. }
            | Lift { algebra, .. }
            | Triple { algebra, .. }
            | Morimoto { algebra, .. }
            | Contact { algebra, .. }
            | Bicontact { algebra, .. }
            | Hermitian { algebra, .. }
            | Product { algebra, .. } => algebra,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub command: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_prime: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default)]
    pub rings: Vec<RingSpec>,
    #[serde(default)]
    pub algebras: Vec<AlgebraSpec>,
    #[serde(default)]
    pub sections: Vec<SectionSpec>,
    #[serde(default)]
    pub structures: Vec<StructureSpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

pub fn parse(text: &str) -> Result<Document> {
    serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        let (line, column) = (e.line(), e.column());
        if msg.contains("unknown field") || msg.contains("unknown variant") {
            CliError::UnknownKey { line, column, msg }
        } else {
            CliError::Syntax { line, column, msg }
        }
    })
}

pub fn to_text(doc: &Document) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

// Expressions.

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> std::result::Result<Vec<Tok>, String> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < cs.len() {
        let c = cs[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let st = k;
            while k < cs.len() && cs[k].is_ascii_digit() {
                k += 1;
            }
            out.push(Tok::Num(cs[st..k].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let st = k;
            while k < cs.len() && (cs[k].is_alphanumeric() || cs[k] == '_') {
                k += 1;
            }
            out.push(Tok::Ident(cs[st..k].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            k += 1;
        } else {
            return Err(format!("unexpected character {c:?} at offset {k}"));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Val {
    F(RingElem),
    S(Section),
}

/// Names visible to an expression.
struct Scope<'a> {
    alg: Option<&'a FramedAlgebra>,
    ring: &'a JetRing,
    sections: &'a BTreeMap<String, (String, Section)>,
    alg_name: &'a str,
}

struct Parser<'a, 'b> {
    toks: Vec<Tok>,
    pos: usize,
    scope: &'b Scope<'a>,
}

impl Parser<'_, '_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn expr(&mut self) -> std::result::Result<Val, String> {
        let mut acc = if self.eat('-') { neg(self.term()?) } else { self.term()? };
        loop {
            if self.eat('+') {
                acc = add(acc, self.term()?, false)?;
            } else if self.eat('-') {
                acc = add(acc, self.term()?, true)?;
            } else {
                return Ok(acc);
            }
        }
    }
    fn term(&mut self) -> std::result::Result<Val, String> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = mul(acc, self.unary()?)?;
            } else if self.eat('/') {
                let d = match self.unary()? {
                    Val::F(f) => f.as_constant().and_then(|c| c.inv()).ok_or("division by a non-constant or zero")?,
                    Val::S(_) => return Err("division by a section".into()),
                };
                acc = mul(acc, Val::F(RingElem::constant(d)))?;
            } else {
                return Ok(acc);
            }
        }
    }
    fn unary(&mut self) -> std::result::Result<Val, String> {
        if self.eat('-') {
            return Ok(neg(self.unary()?));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let e = match self.toks.get(self.pos) {
                Some(Tok::Num(n)) => n.parse::<u32>().map_err(|_| "bad exponent")?,
                _ => return Err("expected an integer exponent".into()),
            };
            self.pos += 1;
            return match base {
                Val::F(f) => Ok(Val::F(self.scope.ring.reduce(&f.pow(e)))),
                Val::S(_) => Err("cannot raise a section to a power".into()),
            };
        }
        Ok(base)
    }
    fn atom(&mut self) -> std::result::Result<Val, String> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Val::F(RingElem::constant(Scalar::from_rational(parse_rational(&n).ok_or("bad number")?))))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err("expected ')'".into());
                }
                Ok(v)
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                let sc = self.scope;
                if let Some(a) = sc.ring.derivation_index(&id) {
                    if !self.eat('(') {
                        return Err(format!("derivation {id} must be applied, as {id}(f)"));
                    }
                    let v = self.expr()?;
                    if !self.eat(')') {
                        return Err("expected ')'".into());
                    }
                    return match v {
                        Val::F(f) => Ok(Val::F(sc.ring.derive(&f, a))),
                        Val::S(_) => Err(format!("{id} applies to functions only")),
                    };
                }
                if let Some(g) = sc.ring.generator_index(&id) {
                    return Ok(Val::F(sc.ring.gen(g)));
                }
                if let Some(alg) = sc.alg {
                    if let Ok(i) = alg.index(&id) {
                        return Ok(Val::S(alg.e(i)));
                    }
                    if let Some((an, s)) = sc.sections.get(&id) {
                        if an == sc.alg_name {
                            return Ok(Val::S(s.clone()));
                        }
                        return Err(format!("section {id} belongs to algebra {an}"));
                    }
                }
                if id == "i" {
                    return Ok(Val::F(RingElem::i()));
                }
                Err(format!("unresolved name {id}"))
            }
            Some(t) => Err(format!("unexpected token {t:?}")),
            None => Err("unexpected end of expression".into()),
        }
    }
}

fn neg(v: Val) -> Val {
    match v {
        Val::F(f) => Val::F(-f),
        Val::S(s) => Val::S(s.neg()),
    }
}

fn add(a: Val, b: Val, sub: bool) -> std::result::Result<Val, String> {
    match (a, b) {
        (Val::F(x), Val::F(y)) => Ok(Val::F(if sub { &x - &y } else { &x + &y })),
        (Val::S(x), Val::S(y)) => Ok(Val::S(if sub { x.sub(&y) } else { x.add(&y) })),
        (Val::S(x), Val::F(y)) | (Val::F(y), Val::S(x)) if y.is_zero() => Ok(Val::S(if sub { x.neg() } else { x })),
        _ => Err("cannot add a function and a section".into()),
    }
}

fn mul(a: Val, b: Val) -> std::result::Result<Val, String> {
    match (a, b) {
        (Val::F(x), Val::F(y)) => Ok(Val::F(&x * &y)),
        (Val::F(f), Val::S(s)) | (Val::S(s), Val::F(f)) => Ok(Val::S(s.mul(&f))),
        _ => Err("cannot multiply two sections".into()),
    }
}

fn eval(scope: &Scope, text: &str) -> std::result::Result<Val, String> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, scope };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input after token {}", p.pos));
    }
    Ok(v)
}

// Resolution.

/// A resolved object of a document.
#[derive(Clone, Debug)]
pub enum Object {
    Subbundle(Subbundle),
    Framing(Framing),
    Sgf(Sgf),
    Triple(AdmissibleTriple),
    Morimoto(MorimotoDatum),
    Contact(ContactDatum),
    Bicontact(BicontactDatum),
    Hermitian(HermitianDatum),
}

impl Object {
    fn kind(&self) -> &'static str {
        match self {
            Object::Subbundle(_) => "subbundle",
            Object::Framing(_) => "framing",
            Object::Sgf(_) => "sgf",
            Object::Triple(_) => "triple",
            Object::Morimoto(_) => "morimoto",
            Object::Contact(_) => "contact",
            Object::Bicontact(_) => "bicontact",
            Object::Hermitian(_) => "hermitian",
        }
    }
}

#[derive(Clone, Debug)]
pub struct AlgebraEntry {
    pub algebra: FramedAlgebra,
    /// Product data and the factor algebra names.
    pub product: Option<(ProductAlgebra, [String; 2])>,
}

/// A document with every name resolved and every object validated.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub rings: BTreeMap<String, JetRing>,
    pub algebras: BTreeMap<String, AlgebraEntry>,
    pub sections: BTreeMap<String, (String, Section)>,
    pub structures: BTreeMap<String, (String, Object)>,
}

fn constants_of(c: &Constants, ders: &[String], path: &str) -> Result<BracketConstants> {
    let n = ders.len();
    match c {
        Constants::Named(s) if s == "abelian" => Ok(BracketConstants::zero(n)),
        Constants::Named(s) if s == "su2" && n == 3 => Ok(BracketConstants::su2(2)),
        Constants::Named(s) => Err(invalid(path, format!("unknown constants {s:?}; use abelian, su2 or a list of entries"))),
        Constants::Entries(es) => {
            let idx = |d: &str| ders.iter().position(|x| x == d).ok_or_else(|| CliError::UnresolvedName(format!("{path}: derivation {d}")));
            let mut entries = Vec::new();
            for (a, b, k, v) in es {
                let v = v.scalar().filter(|s| s.is_real()).ok_or_else(|| invalid(path, "structure constants must be real rationals"))?;
                entries.push((idx(a)?, idx(b)?, idx(k)?, v.real()));
            }
            let c = BracketConstants::from_upper(n, &entries);
            c.validate().map_err(|e| invalid(path, e))?;
            Ok(c)
        }
    }
}

impl Env {
    fn claim(&self, name: &str, taken: &mut Vec<String>) -> Result<()> {
        if taken.iter().any(|t| t == name) {
            return Err(CliError::UnresolvedName(format!("{name} is declared twice")));
        }
        taken.push(name.to_string());
        Ok(())
    }

    pub fn algebra(&self, name: &str) -> Result<&FramedAlgebra> {
        self.algebras.get(name).map(|a| &a.algebra).ok_or_else(|| CliError::UnresolvedName(format!("algebra {name}")))
    }

    fn eval_in(&self, alg_name: &str, text: &str, path: &str) -> Result<Val> {
        let alg = self.algebra(alg_name)?;
        let scope = Scope { alg: Some(alg), ring: alg.ring(), sections: &self.sections, alg_name };
        eval(&scope, text).map_err(|m| if m.starts_with("unresolved") { CliError::UnresolvedName(format!("{path}: {m}")) } else { invalid(path, m) })
    }

    fn section(&self, alg_name: &str, text: &str, path: &str) -> Result<Section> {
        match self.eval_in(alg_name, text, path)? {
            Val::S(s) => Ok(self.algebra(alg_name)?.reduce(&s)),
            Val::F(f) if f.is_zero() => Ok(self.algebra(alg_name)?.zero()),
            Val::F(_) => Err(invalid(path, "expected a section, found a function")),
        }
    }

    fn function(&self, alg_name: &str, text: &str, path: &str) -> Result<RingElem> {
        match self.eval_in(alg_name, text, path)? {
            Val::F(f) => Ok(self.algebra(alg_name)?.ring().reduce(&f)),
            Val::S(_) => Err(invalid(path, "expected a function, found a section")),
        }
    }

    fn sections_of(&self, alg: &str, xs: &[String], path: &str) -> Result<Vec<Section>> {
        xs.iter().enumerate().map(|(k, x)| self.section(alg, x, &format!("{path}[{k}]"))).collect()
    }

    fn matrix(&self, alg: &str, rows: &[Vec<String>], path: &str) -> Result<Mat> {
        let mut out = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            out.push(r.iter().enumerate().map(|(j, x)| self.function(alg, x, &format!("{path}[{i}][{j}]"))).collect::<Result<Vec<_>>>()?);
        }
        Ok(Mat::from_rows(out))
    }

    pub fn object(&self, name: &str) -> Result<(&str, &Object)> {
        self.structures.get(name).map(|(a, o)| (a.as_str(), o)).ok_or_else(|| CliError::UnresolvedName(format!("structure {name}")))
    }

    fn typed<'a, T>(&'a self, name: &str, alg: &str, want: &str, f: impl Fn(&'a Object) -> Option<&'a T>) -> Result<&'a T> {
        let (a, o) = self.object(name)?;
        if a != alg {
            return Err(invalid(name, format!("belongs to algebra {a}, expected {alg}")));
        }
        f(o).ok_or_else(|| invalid(name, format!("has kind {}, expected {want}", o.kind())))
    }
    fn subbundle(&self, name: &str, alg: &str) -> Result<&Subbundle> {
        self.typed(name, alg, "subbundle", |o| if let Object::Subbundle(s) = o { Some(s) } else { None })
    }
    fn framing(&self, name: &str, alg: &str) -> Result<&Framing> {
        self.typed(name, alg, "framing", |o| if let Object::Framing(s) = o { Some(s) } else { None })
    }
    fn sgf(&self, name: &str, alg: &str) -> Result<&Sgf> {
        self.typed(name, alg, "sgf", |o| if let Object::Sgf(s) = o { Some(s) } else { None })
    }
    fn product(&self, alg: &str, path: &str) -> Result<&(ProductAlgebra, [String; 2])> {
        self.algebras.get(alg).and_then(|a| a.product.as_ref()).ok_or_else(|| invalid(path, format!("{alg} is not a product algebra")))
    }
}

/// Resolve a document; `order` overrides every ring's truncation order.
pub fn resolve(doc: &Document, order: Option<usize>) -> Result<Env> {
    let mut env = Env::default();
    let mut taken = Vec::new();
    for (k, r) in doc.rings.iter().enumerate() {
        let path = format!("rings[{k}] ({})", r.name);
        env.claim(&r.name, &mut taken)?;
        let c = constants_of(&r.constants, &r.derivations, &path)?;
        let gens: Vec<&str> = r.generators.iter().map(|s| s.as_str()).collect();
        let ders: Vec<&str> = r.derivations.iter().map(|s| s.as_str()).collect();
        if gens.iter().chain(&ders).any(|s| *s == "i") {
            return Err(invalid(&path, "the name i is reserved for the imaginary unit"));
        }
        let mut ring = JetRing::with_names(&gens, &ders, c, order.or(r.order).unwrap_or(3)).map_err(|e| invalid(&path, e))?;
        if !r.relations.is_empty() {
            let scope = Scope { alg: None, ring: &ring, sections: &env.sections, alg_name: "" };
            let mut rel = Vec::new();
            for (j, t) in r.relations.iter().enumerate() {
                match eval(&scope, t).map_err(|m| invalid(&format!("{path}.relations[{j}]"), m))? {
                    Val::F(f) => rel.push(f),
                    Val::S(_) => return Err(invalid(&path, "relations must be functions")),
                }
            }
            ring = ring.with_relations(&rel).map_err(|e| invalid(&path, e))?;
        }
        env.rings.insert(r.name.clone(), ring);
    }
    for (k, a) in doc.algebras.iter().enumerate() {
        let path = format!("algebras[{k}] ({})", a.name());
        env.claim(a.name(), &mut taken)?;
        let ring_of = |n: &str| env.rings.get(n).cloned().ok_or_else(|| CliError::UnresolvedName(format!("{path}: ring {n}")));
        let entry = match a {
            AlgebraSpec::Standard { ring, .. } => {
                let r = ring_of(ring)?;
                let c = r.constants().clone();
                AlgebraEntry { algebra: standard_algebra(&r, &c).map_err(|e| invalid(&path, e))?, product: None }
            }
            AlgebraSpec::Product { factors, .. } => {
                let (a1, a2) = (env.algebra(&factors[0])?, env.algebra(&factors[1])?);
                let p = product_algebra(a1, a2).map_err(|e| invalid(&path, e))?;
                AlgebraEntry { algebra: p.algebra.clone(), product: Some((p, factors.clone())) }
            }
            AlgebraSpec::Explicit { ring, frame, gram, brackets, anchor, .. } => explicit_algebra(&env, ring_of(ring)?, frame, gram, brackets, anchor, &path)?,
        };
        env.algebras.insert(a.name().to_string(), entry);
    }
    for (k, s) in doc.sections.iter().enumerate() {
        let path = format!("sections[{k}] ({})", s.name);
        env.claim(&s.name, &mut taken)?;
        let alg = env.algebra(&s.algebra)?;
        if alg.index(&s.name).is_ok() || alg.ring().generator_index(&s.name).is_some() || alg.ring().derivation_index(&s.name).is_some() {
            return Err(CliError::UnresolvedName(format!("{path}: {} shadows a frame, generator or derivation name", s.name)));
        }
        let sec = match (&s.expr, &s.lift) {
            (Some(e), None) => env.section(&s.algebra, e, &path)?,
            (None, Some(l)) => {
                let (p, fs) = env.product(&s.algebra, &path)?;
                let (fa, x) = env.sections.get(&l.from).ok_or_else(|| CliError::UnresolvedName(format!("{path}: section {}", l.from)))?;
                let f = factor_index(l.factor, &path)?;
                if *fa != fs[f] {
                    return Err(invalid(&path, format!("{} lives on {fa}, not on factor {}", l.from, l.factor)));
                }
                lift_section(p, x, f)
            }
            _ => return Err(invalid(&path, "give exactly one of expr and lift")),
        };
        env.sections.insert(s.name.clone(), (s.algebra.clone(), sec));
    }
    for (k, s) in doc.structures.iter().enumerate() {
        let path = format!("structures[{k}] ({})", s.name());
        env.claim(s.name(), &mut taken)?;
        env.algebra(s.algebra())?;
        let obj = structure(&env, s, &path)?;
        env.structures.insert(s.name().to_string(), (s.algebra().to_string(), obj));
    }
    for (k, c) in doc.checks.iter().enumerate() {
        if !COMMANDS.contains(&c.command.as_str()) || c.command == "catalog" {
            return Err(invalid(&format!("checks[{k}]"), format!("unknown command {:?}", c.command)));
        }
        if !env.structures.contains_key(&c.target) && !env.algebras.contains_key(&c.target) {
            return Err(CliError::UnresolvedName(format!("checks[{k}]: target {}", c.target)));
        }
    }
    Ok(env)
}

fn factor_index(f: usize, path: &str) -> Result<usize> {
    match f {
        1 | 2 => Ok(f - 1),
        _ => Err(invalid(path, "factor must be 1 or 2")),
    }
}

fn explicit_algebra(
    env: &Env,
    ring: JetRing,
    frame: &[String],
    gram: &[Vec<String>],
    brackets: &[BracketSpec],
    anchor: &[AnchorSpec],
    path: &str,
) -> Result<AlgebraEntry> {
    let n = frame.len();
    let empty = BTreeMap::new();
    let scope = Scope { alg: None, ring: &ring, sections: &empty, alg_name: "" };
    let fun = |t: &str, p: &str| match eval(&scope, t) {
        Ok(Val::F(f)) => Ok(ring.reduce(&f)),
        Ok(Val::S(_)) => Err(invalid(p, "expected a function")),
        Err(m) => Err(invalid(p, m)),
    };
    let mut g = Vec::new();
    for (i, r) in gram.iter().enumerate() {
        g.push(r.iter().enumerate().map(|(j, x)| fun(x, &format!("{path}.gram[{i}][{j}]"))).collect::<Result<Vec<_>>>()?);
    }
    let gram = Mat::from_rows(g);
    let idx = |x: &str| frame.iter().position(|f| f == x).ok_or_else(|| CliError::UnresolvedName(format!("{path}: frame element {x}")));
    let mut an = Mat::zeros(n, ring.num_derivations());
    for a in anchor {
        let i = idx(&a.x)?;
        if a.vector.len() != ring.num_derivations() {
            return Err(invalid(path, format!("anchor of {} needs {} entries", a.x, ring.num_derivations())));
        }
        for (d, t) in a.vector.iter().enumerate() {
            an.set(i, d, fun(t, &format!("{path}.anchor({})", a.x))?);
        }
    }
    // Bracket values are read against a provisional frame algebra.
    let zero_table = vec![vec![Section::zero(n); n]; n];
    let probe = FramedAlgebra::new(frame.to_vec(), ring.clone(), gram.clone(), zero_table.clone(), an.clone()).map_err(|e| invalid(path, e))?;
    let mut table = zero_table;
    for b in brackets {
        let (i, j) = (idx(&b.x)?, idx(&b.y)?);
        let sc = Scope { alg: Some(&probe), ring: &ring, sections: &env.sections, alg_name: "\u{0}" };
        let v = match eval(&sc, &b.value).map_err(|m| invalid(&format!("{path}.brackets[{},{}]", b.x, b.y), m))? {
            Val::S(s) => s,
            Val::F(f) if f.is_zero() => Section::zero(n),
            Val::F(_) => return Err(invalid(path, "bracket values must be sections")),
        };
        table[i][j] = v;
    }
    let alg = FramedAlgebra::new(frame.to_vec(), ring, gram, table, an).map_err(|e| invalid(path, e))?;
    Ok(AlgebraEntry { algebra: alg, product: None })
}

fn structure(env: &Env, s: &StructureSpec, path: &str) -> Result<Object> {
    let an = s.algebra();
    let alg = env.algebra(an)?;
    let st = |e: StructureError| invalid(path, e);
    Ok(match s {
        StructureSpec::Subbundle { gens, .. } => Object::Subbundle(Subbundle::new(alg, env.sections_of(an, gens, path)?).map_err(st)?),
        StructureSpec::Framing { vectors, .. } => Object::Framing(Framing::new(env.sections_of(an, vectors, path)?)),
        StructureSpec::Sgf { on, images, .. } => {
            let e = env.subbundle(on, an)?.clone();
            Object::Sgf(Sgf::from_images(alg, e, &env.sections_of(an, images, path)?).map_err(st)?)
        }
        StructureSpec::Lift { from, factor, .. } => {
            let (p, fs) = env.product(an, path)?;
            let f = factor_index(*factor, path)?;
            let (fa, o) = env.object(from)?;
            if fa != fs[f] {
                return Err(invalid(path, format!("{from} lives on {fa}, not on factor {factor}")));
            }
            let m = |e: MorimotoError| invalid(path, e);
            match o {
                Object::Subbundle(x) => Object::Subbundle(lift_subbundle(p, x, f).map_err(m)?),
                Object::Framing(x) => Object::Framing(lift_framing(p, x, f)),
                Object::Sgf(x) => Object::Sgf(lift_sgf(p, x, f).map_err(m)?),
                o => return Err(invalid(path, format!("cannot lift a {}", o.kind()))),
            }
        }
        StructureSpec::Triple { v1, v2, blocks, .. } => {
            let (v1, v2) = (env.framing(v1, an)?, env.framing(v2, an)?);
            let t = match blocks {
                None => canonical_triple(alg, v1, v2),
                Some(b) => {
                    let m = |x: &[Vec<String>], k: &str| env.matrix(an, x, &format!("{path}.blocks.{k}"));
                    admissible_from_blocks(alg, v1, v2, &m(&b.a, "a")?, &m(&b.b, "b")?, &m(&b.c, "c")?, &m(&b.d, "d")?)
                }
            };
            Object::Triple(t.map_err(|e| invalid(path, e))?)
        }
        StructureSpec::Morimoto { j1, j2, triple, w1, w2, .. } => {
            let t = env.typed(triple, an, "triple", |o| if let Object::Triple(t) = o { Some(t) } else { None })?;
            let w = |x: &Option<String>| x.as_ref().map(|n| env.framing(n, an).cloned()).transpose();
            Object::Morimoto(MorimotoDatum { j1: env.sgf(j1, an)?.clone(), j2: env.sgf(j2, an)?.clone(), triple: t.clone(), w1: w(w1)?, w2: w(w2)? })
        }
        StructureSpec::Contact { e, e_prime, l, v, w, .. } => {
            let (e, ep) = (env.subbundle(e, an)?.clone(), env.subbundle(e_prime, an)?.clone());
            let l = env.sections_of(an, l, path)?;
            let v = env.sections_of(an, v, path)?;
            let c = match w {
                Some(w) => ContactDatum::new(alg, e, ep, l, Framing::new(v), Framing::new(env.sections_of(an, w, path)?)),
                None if v.len() == 1 => ContactDatum::rank_one(alg, e, ep, l, v[0].clone()),
                None => return Err(invalid(path, "w is required unless V has rank 1")),
            };
            Object::Contact(c.map_err(|e| invalid(path, e))?)
        }
        StructureSpec::Bicontact { e, e1_prime, e2_prime, l, v1, w1, v2, w2, k1, k2, .. } => {
            let sec = |x: &str| env.section(an, x, path);
            let k = |x: &Option<Vec<String>>| x.as_ref().map(|v| env.sections_of(an, v, path).map(Framing::new)).transpose();
            Object::Bicontact(BicontactDatum {
                e: env.subbundle(e, an)?.clone(),
                e1p: env.subbundle(e1_prime, an)?.clone(),
                e2p: env.subbundle(e2_prime, an)?.clone(),
                l: env.sections_of(an, l, path)?,
                v1: sec(v1)?,
                w1: sec(w1)?,
                v2: sec(v2)?,
                w2: sec(w2)?,
                k1: k(k1)?,
                k2: k(k2)?,
            })
        }
        StructureSpec::Hermitian { bicontact, j, .. } => {
            let b = env.typed(bicontact, an, "bicontact", |o| if let Object::Bicontact(b) = o { Some(b) } else { None })?;
            Object::Hermitian(HermitianDatum { bicontact: b.clone(), j: env.sgf(j, an)?.clone() })
        }
        StructureSpec::Product { datum, .. } => {
            let d = env.typed(datum, an, "morimoto", |o| if let Object::Morimoto(d) = o { Some(d) } else { None })?;
            Object::Sgf(morimoto_product(alg, d).map_err(|e| invalid(path, e))?)
        }
    })
}

// Running checks.

pub const COMMANDS: [&str; 11] = [
    "validate-algebra",
    "check-sgf",
    "check-crf",
    "check-normal-pair",
    "check-morimoto",
    "build-product",
    "check-contact",
    "check-bicontact",
    "check-bly",
    "obstructions",
    "catalog",
];

fn citation(command: &str) -> &'static str {
    match command {
        "validate-algebra" => "Courant algebroid axioms (i)-(iii)",
        "check-sgf" => "SGF structure: skew, J^2 = -Id on a split E",
        "check-crf" | "obstructions" => "CRF: +i eigenbundle closed under the Dorfman bracket",
        "check-normal-pair" => "normal pair lemma: four equivalent conditions",
        "check-morimoto" | "build-product" => "Morimoto product criterion",
        "check-contact" => "contact datum conditions 1)-5)",
        "check-bicontact" => "bicontact datum and its lemma",
        "check-bly" => "Abstract Blair-Ludden-Yano Theorem",
        _ => "catalog entry verdicts",
    }
}

/// One report record.
#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct Record {
    pub index: usize,
    pub command: String,
    pub target: String,
    pub verdict: Option<bool>,
    pub citation: String,
    pub obstructions: Vec<String>,
    pub max_jet_order: usize,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(rename = "report", skip_serializing_if = "String::is_empty")]
    pub text: String,
}

impl Record {
    fn new(index: usize, command: &str, target: &str) -> Self {
        Record {
            index,
            command: command.to_string(),
            target: target.to_string(),
            verdict: None,
            citation: citation(command).to_string(),
            obstructions: Vec::new(),
            max_jet_order: 0,
            details: json!({}),
            error: None,
            text: String::new(),
        }
    }
    fn values(&mut self, ring: &JetRing, vs: &[RingElem]) {
        for v in vs {
            self.max_jet_order = self.max_jet_order.max(v.consumed_order());
            self.obstructions.push(ring.format(v));
        }
    }
    fn labelled(&mut self, ring: &JetRing, obs: &[Obstruction]) {
        for o in obs {
            self.max_jet_order = self.max_jet_order.max(o.value.consumed_order());
            self.obstructions.push(format!("{}: {}", o.label, ring.format(&o.value)));
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn has_errors(&self) -> bool {
        self.records.iter().any(|r| r.error.is_some())
    }
    pub fn json(&self) -> String {
        serde_json::to_string_pretty(&json!({ "records": self.records })).expect("records serialize")
    }
    pub fn human(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let v = match (r.verdict, &r.error) {
                (_, Some(e)) => format!("error: {e}"),
                (Some(v), None) => v.to_string(),
                (None, None) => "no verdict".into(),
            };
            out.push_str(&format!("[{}] {} {}: {}  ({}; max jet order {})\n", r.index, r.command, r.target, v, r.citation, r.max_jet_order));
            for o in &r.obstructions {
                out.push_str(&format!("    {o}\n"));
            }
            for line in r.text.lines() {
                out.push_str(&format!("  | {line}\n"));
            }
        }
        out
    }
}

fn map_err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn run_check(env: &Env, index: usize, c: &CheckSpec) -> Record {
    let mut rec = Record::new(index, &c.command, &c.target);
    if let Err(e) = fill(env, c, &mut rec) {
        rec.verdict = None;
        rec.error = Some(e);
    }
    rec
}

fn fill(env: &Env, c: &CheckSpec, rec: &mut Record) -> std::result::Result<(), String> {
    if c.command == "validate-algebra" {
        let alg = env.algebra(&c.target).map_err(map_err)?;
        let rep = validate(alg, c.random.unwrap_or(200), c.seed.unwrap_or(0));
        rec.verdict = Some(rep.passed());
        rec.max_jet_order = rep.max_order;
        rec.obstructions = rep.violations.iter().map(|v| format!("{} {}: {}", v.axiom, v.instance, v.residual)).collect();
        rec.details = json!({
            "signature": rep.signature.to_string(),
            "split_signature": rep.split_signature,
            "frame_instances": rep.frame_instances,
            "random_triples": rep.random_triples,
            "truncated": rep.truncated,
        });
        rec.text = rep.to_string();
        return Ok(());
    }
    let (an, obj) = env.object(&c.target).map_err(map_err)?;
    let alg = env.algebra(an).map_err(map_err)?;
    let ring = alg.ring();
    let want = |k: &str| format!("{} expects a target of kind {k}, {} has kind {}", c.command, c.target, obj.kind());
    match (c.command.as_str(), obj) {
        ("check-sgf", Object::Sgf(j)) => {
            let rep = j.check(alg).map_err(map_err)?;
            rec.verdict = Some(rep.passed());
            rec.details = json!({
                "skew": rep.skew, "orthogonal": rep.orthogonal, "square_minus_one": rep.square_minus_one,
                "phi_cubic": rep.phi_cubic, "kernel_contains_complement": rep.kernel_contains_complement, "split": rep.split,
            });
            rec.text = rep.to_string();
        }
        ("check-crf" | "obstructions", Object::Sgf(j)) => {
            let rep = crf_obstructions(alg, j).map_err(map_err)?;
            rec.verdict = Some(rep.crf());
            if c.command == "obstructions" {
                rec.labelled(ring, &rep.pairings);
                rec.labelled(ring, &rep.external);
            }
            rec.values(ring, &rep.generators);
            rec.max_jet_order = rec.max_jet_order.max(rep.max_order);
            rec.details = json!({ "generators": rep.generators.iter().map(|g| ring.format(g)).collect::<Vec<_>>(), "truncated": rep.truncated });
        }
        ("check-normal-pair", Object::Sgf(j)) => {
            let ep = c.e_prime.as_deref().ok_or("check-normal-pair needs e_prime")?;
            let v = c.v.as_deref().ok_or("check-normal-pair needs v")?;
            let ep = env.subbundle(ep, an).map_err(map_err)?;
            let v = env.framing(v, an).map_err(map_err)?;
            let rep = normal_pair_check(alg, j, ep, v).map_err(map_err)?;
            rec.verdict = Some(rep.normal());
            rec.values(ring, &rep.generators);
            rec.details = json!({
                "crf": rep.crf,
                "conditions": rep.conditions.iter().map(|k| json!({"name": k.name, "holds": k.holds})).collect::<Vec<_>>(),
                "conditions_agree": rep.conditions_agree(),
            });
            rec.text = rep.to_string();
        }
        ("check-morimoto", Object::Morimoto(d)) => {
            let rep = abstract_morimoto_check(alg, d).map_err(map_err)?;
            rec.verdict = Some(rep.product_crf.crf());
            rec.values(ring, &rep.product_crf.generators);
            rec.details = json!({ "datum_valid": rep.datum.valid(), "lhs": rep.lhs(), "rhs": rep.rhs(), "agree": rep.agree() });
            rec.text = rep.to_string();
        }
        ("build-product", Object::Morimoto(d)) => {
            let j = morimoto_product(alg, d).map_err(map_err)?;
            let rep = j.check(alg).map_err(map_err)?;
            rec.verdict = Some(rep.passed());
            let imgs: Vec<Value> =
                j.e.gens().iter().zip(j.images(alg)).map(|(g, y)| json!({ "x": alg.format_section(g), "J(x)": alg.format_section(&y) })).collect();
            rec.details = json!({ "images": imgs });
        }
        ("check-contact", Object::Contact(d)) => {
            let rep = contact_check(alg, d).map_err(map_err)?;
            rec.verdict = Some(rep.valid());
            rec.values(ring, &rep.obstructions());
            let mut det = json!({ "conditions": rep.conditions.iter().map(|k| json!({"name": k.name, "holds": k.holds})).collect::<Vec<_>>() });
            let mut text = rep.to_string();
            if rep.valid() && d.rank() == 1 {
                let der = contact_derived(alg, d).map_err(map_err)?;
                det["lemma"] = json!({ "isotropic": der.isotropic, "in_e": der.in_e, "w_normalizes": der.w_normalizes, "holds": der.holds() });
            }
            if let Some(jn) = &c.j {
                let j = env.sgf(jn, an).map_err(map_err)?;
                let nc = normal_contact_check(alg, j, d).map_err(map_err)?;
                det["normal_contact"] = json!(nc.normal());
                det["normal_contact_obstructions"] = json!(nc.obstructions().iter().map(|g| ring.format(g)).collect::<Vec<_>>());
                text = nc.to_string();
            }
            rec.details = det;
            rec.text = text;
        }
        ("check-bicontact", Object::Bicontact(d)) => {
            let rep = bicontact_check(alg, d).map_err(map_err)?;
            rec.verdict = Some(rep.valid());
            rec.values(ring, &rep.contact.obstructions());
            rec.details = json!({
                "rank_l1": rep.l1.len(), "rank_l2": rep.l2.len(), "direct_sum": rep.direct_sum,
                "lemma": rep.lemma.as_ref().map(|l| l.holds()),
            });
            rec.text = rep.to_string();
        }
        ("check-bly", Object::Hermitian(h)) => {
            let rep = bly_check(alg, h).map_err(map_err)?;
            rec.verdict = Some(rep.conclusion());
            rec.values(ring, &rep.obstructions());
            rec.details = json!({
                "hermitian": rep.hermitian.valid(),
                "adapted": rep.adapted.adaptable(),
                "morimoto_datum_valid": rep.morimoto.datum.valid(),
                "morimoto_agree": rep.morimoto.agree(),
                "normal_contact": [rep.normal_contact[0].normal(), rep.normal_contact[1].normal()],
            });
            rec.text = rep.to_string();
        }
        ("check-sgf" | "check-crf" | "obstructions" | "check-normal-pair", _) => return Err(want("sgf")),
        ("check-morimoto" | "build-product", _) => return Err(want("morimoto")),
        ("check-contact", _) => return Err(want("contact")),
        ("check-bicontact", _) => return Err(want("bicontact")),
        ("check-bly", _) => return Err(want("hermitian")),
        _ => return Err(format!("unknown command {}", c.command)),
    }
    Ok(())
}

/// Run the declared checks with the given command, or all of them for
/// `run`; with `target`, run the command on that object alone.
pub fn run(doc: &Document, command: &str, target: Option<&str>, order: Option<usize>) -> Result<Report> {
    if command != "run" && (!COMMANDS.contains(&command) || command == "catalog") {
        return Err(CliError::Command(format!("unknown command {command}")));
    }
    let env = resolve(doc, order)?;
    let checks: Vec<CheckSpec> = match target {
        Some(t) if command != "run" => {
            vec![CheckSpec { command: command.into(), target: t.into(), e_prime: None, v: None, j: None, random: None, seed: None }]
        }
        Some(_) => return Err(CliError::Command("--target needs a specific command".into())),
        None => doc.checks.iter().filter(|c| command == "run" || c.command == command).cloned().collect(),
    };
    if let Some(t) = target {
        if !env.structures.contains_key(t) && !env.algebras.contains_key(t) {
            return Err(CliError::UnresolvedName(format!("target {t}")));
        }
    }
    // Normal-pair checks with a bare target reuse the declared parameters.
    let checks = checks
        .into_iter()
        .map(|c| if c.e_prime.is_none() { doc.checks.iter().find(|d| d.command == c.command && d.target == c.target).cloned().unwrap_or(c) } else { c })
        .collect::<Vec<_>>();
    Ok(Report { records: checks.iter().enumerate().map(|(k, c)| run_check(&env, k, c)).collect() })
}

/// Catalog entries as records, one per run.
pub fn run_catalog(entry: Option<&str>, params: &[String], order: Option<usize>) -> Result<Report> {
    let ctx = Ctx { order: order.unwrap_or(3), ..Ctx::default() };
    let runs: Vec<(String, catalog::Params)> = match entry {
        Some(e) => vec![(e.to_string(), catalog::parse_params(params)?)],
        None if params.is_empty() => catalog::default_runs().into_iter().map(|(n, p)| (n.to_string(), p)).collect(),
        None => return Err(CliError::Command("--params needs --entry".into())),
    };
    let mut records = Vec::new();
    for (k, (name, p)) in runs.iter().enumerate() {
        let ps: Vec<String> = p.iter().map(|(a, b)| format!("{a}={b}")).collect();
        let mut rec = Record::new(k, "catalog", &format!("{name}[{}]", ps.join(",")));
        match catalog::build(name, p, &ctx) {
            Ok(e) => {
                rec.verdict = Some(e.passed());
                rec.obstructions = e.verdicts.iter().filter(|v| !v.passed()).map(|v| v.check.clone()).collect();
                rec.details = json!({
                    "verdicts": e.verdicts.iter().map(|v| json!({
                        "check": v.check, "citation": v.citation, "expected": v.expected, "actual": v.actual,
                    })).collect::<Vec<_>>()
                });
                rec.text = e.to_string();
            }
            Err(CatalogError::UnknownEntry(n)) => return Err(CatalogError::UnknownEntry(n).into()),
            Err(CatalogError::BadParams(m)) => return Err(CatalogError::BadParams(m).into()),
            Err(e) => rec.error = Some(e.to_string()),
        }
        records.push(rec);
    }
    Ok(Report { records })
}
