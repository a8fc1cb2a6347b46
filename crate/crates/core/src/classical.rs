//! The one-sided classical calculus: formulas over atoms and dual atoms with
//! ⊗, ⅋, ⊕ and &, exchange, and the same slicing interpretation as the
//! intuitionistic calculus. Only & labels act as BDT variables.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, RngExt};
use thiserror::Error;

use crate::bdt::DEFAULT_ORACLE_BUDGET;
use crate::equiv::{slicing_equiv, EquivError, EquivVerdict};
use crate::formula::OccIndex;
use crate::proof::{parse_nat, NodePath};
use crate::slicing::{
    bdt_slicing, expand_with_budget, slicing, BdtSlicing, Shape, Sliceable, Slicing,
};
use crate::syntax::{is_atom_name, is_label, ParseError, Tok, Tokens};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MallFormula {
    Atom(String),
    Dual(String),
    Tensor(Box<MallFormula>, Box<MallFormula>),
    Par(Box<MallFormula>, Box<MallFormula>),
    Plus(String, Box<MallFormula>, Box<MallFormula>),
    With(String, Box<MallFormula>, Box<MallFormula>),
}

impl MallFormula {
    pub fn atom(a: impl Into<String>) -> Self {
        MallFormula::Atom(a.into())
    }

    pub fn dual(a: impl Into<String>) -> Self {
        MallFormula::Dual(a.into())
    }

    pub fn tensor(l: MallFormula, r: MallFormula) -> Self {
        MallFormula::Tensor(Box::new(l), Box::new(r))
    }

    pub fn par(l: MallFormula, r: MallFormula) -> Self {
        MallFormula::Par(Box::new(l), Box::new(r))
    }

    pub fn plus(x: impl Into<String>, l: MallFormula, r: MallFormula) -> Self {
        MallFormula::Plus(x.into(), Box::new(l), Box::new(r))
    }

    pub fn with(x: impl Into<String>, l: MallFormula, r: MallFormula) -> Self {
        MallFormula::With(x.into(), Box::new(l), Box::new(r))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, MallFormula::Atom(_) | MallFormula::Dual(_))
    }

    pub fn atom_count(&self) -> usize {
        match self {
            MallFormula::Atom(_) | MallFormula::Dual(_) => 1,
            MallFormula::Tensor(l, r)
            | MallFormula::Par(l, r)
            | MallFormula::Plus(_, l, r)
            | MallFormula::With(_, l, r) => l.atom_count() + r.atom_count(),
        }
    }

    pub fn labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            MallFormula::Atom(_) | MallFormula::Dual(_) => {}
            MallFormula::Tensor(l, r) | MallFormula::Par(l, r) => {
                l.collect_labels(out);
                r.collect_labels(out);
            }
            MallFormula::Plus(x, l, r) | MallFormula::With(x, l, r) => {
                out.push(x);
                l.collect_labels(out);
                r.collect_labels(out);
            }
        }
    }

    /// Renames every label through `f`.
    pub fn relabel(&self, f: &mut impl FnMut(&str) -> String) -> MallFormula {
        match self {
            MallFormula::Atom(_) | MallFormula::Dual(_) => self.clone(),
            MallFormula::Tensor(l, r) => MallFormula::tensor(l.relabel(f), r.relabel(f)),
            MallFormula::Par(l, r) => MallFormula::par(l.relabel(f), r.relabel(f)),
            MallFormula::Plus(x, l, r) => {
                let x = f(x);
                MallFormula::plus(x, l.relabel(f), r.relabel(f))
            }
            MallFormula::With(x, l, r) => {
                let x = f(x);
                MallFormula::with(x, l.relabel(f), r.relabel(f))
            }
        }
    }

    pub fn parse(text: &str) -> Result<MallFormula, ParseError> {
        let mut toks = Tokens::new(text)?;
        let f = parse_mall_formula(&mut toks)?;
        toks.finish()?;
        Ok(f)
    }
}

impl fmt::Display for MallFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MallFormula::Atom(a) => write!(f, "{a}"),
            MallFormula::Dual(a) => write!(f, "~{a}"),
            MallFormula::Tensor(l, r) => write!(f, "({l} * {r})"),
            MallFormula::Par(l, r) => write!(f, "({l} @ {r})"),
            MallFormula::Plus(x, l, r) => write!(f, "({l} +[{x}] {r})"),
            MallFormula::With(x, l, r) => write!(f, "({l} &[{x}] {r})"),
        }
    }
}

fn atom_name(toks: &mut Tokens) -> Result<String, ParseError> {
    let (a, p) = toks.ident("an atom")?;
    if !is_atom_name(&a) {
        return Err(ParseError::new(p, format!("invalid atom name `{a}`")));
    }
    Ok(a)
}

fn bracket_label(toks: &mut Tokens, what: &str) -> Result<String, ParseError> {
    let pos = toks.pos();
    if toks.peek() != Some(&Tok::LBracket) {
        return Err(ParseError::new(pos, format!("missing {what} label")));
    }
    toks.next();
    let (x, p) = toks.ident("a label")?;
    if !is_label(&x) {
        return Err(ParseError::new(p, format!("invalid label `{x}`")));
    }
    toks.expect(Tok::RBracket)?;
    Ok(x)
}

fn parse_mall_formula(toks: &mut Tokens) -> Result<MallFormula, ParseError> {
    let pos = toks.pos();
    match toks.peek() {
        Some(Tok::Tilde) => {
            toks.next();
            Ok(MallFormula::Dual(atom_name(toks)?))
        }
        Some(Tok::Ident(_)) => Ok(MallFormula::Atom(atom_name(toks)?)),
        Some(Tok::LParen) => {
            toks.next();
            let l = parse_mall_formula(toks)?;
            let op = toks.pos();
            let out = match toks.next() {
                Some((Tok::Star, _)) => MallFormula::tensor(l, parse_mall_formula(toks)?),
                Some((Tok::At, _)) => MallFormula::par(l, parse_mall_formula(toks)?),
                Some((Tok::Plus, _)) => {
                    let x = bracket_label(toks, "⊕")?;
                    MallFormula::plus(x, l, parse_mall_formula(toks)?)
                }
                Some((Tok::Amp, _)) => {
                    let x = bracket_label(toks, "&")?;
                    MallFormula::with(x, l, parse_mall_formula(toks)?)
                }
                Some((t, p)) => {
                    return Err(ParseError::new(
                        p,
                        format!("expected `*`, `@`, `+[` or `&[`, found {t}"),
                    ))
                }
                None => return Err(ParseError::new(op, "unexpected end of input")),
            };
            toks.expect(Tok::RParen)?;
            Ok(out)
        }
        Some(t) => Err(ParseError::new(
            pos,
            format!("expected a formula, found {t}"),
        )),
        None => Err(ParseError::new(
            pos,
            "expected a formula, found end of input",
        )),
    }
}

/// `|- F1, ..., Fn`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MallSequent(pub Vec<MallFormula>);

impl MallSequent {
    pub fn formulas(&self) -> &[MallFormula] {
        &self.0
    }

    pub fn atom_count(&self) -> usize {
        self.0.iter().map(MallFormula::atom_count).sum()
    }

    pub fn offsets(&self) -> Vec<OccIndex> {
        let mut acc = 0;
        self.0
            .iter()
            .map(|f| {
                let o = acc;
                acc += f.atom_count();
                o
            })
            .collect()
    }

    pub fn duplicate_label(&self) -> Option<String> {
        let mut seen = BTreeSet::new();
        self.0
            .iter()
            .flat_map(MallFormula::labels)
            .find(|l| !seen.insert(*l))
            .map(str::to_owned)
    }

    /// Labels of & connectives: the Boolean variables of the sequent.
    pub fn with_labels(&self) -> BTreeSet<String> {
        fn go(f: &MallFormula, out: &mut BTreeSet<String>) {
            match f {
                MallFormula::Atom(_) | MallFormula::Dual(_) => {}
                MallFormula::Tensor(l, r) | MallFormula::Par(l, r) | MallFormula::Plus(_, l, r) => {
                    go(l, out);
                    go(r, out);
                }
                MallFormula::With(x, l, r) => {
                    out.insert(x.clone());
                    go(l, out);
                    go(r, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        for f in &self.0 {
            go(f, &mut out);
        }
        out
    }

    pub fn parse(text: &str) -> Result<MallSequent, ParseError> {
        let mut toks = Tokens::new(text)?;
        toks.expect(Tok::Turnstile)?;
        let mut fs = Vec::new();
        if !toks.is_done() {
            fs.push(parse_mall_formula(&mut toks)?);
            while toks.peek() == Some(&Tok::Comma) {
                toks.next();
                fs.push(parse_mall_formula(&mut toks)?);
            }
        }
        toks.finish()?;
        let s = MallSequent(fs);
        if let Some(l) = s.duplicate_label() {
            return Err(ParseError::new(
                Default::default(),
                format!("label `{l}` occurs twice"),
            ));
        }
        Ok(s)
    }
}

impl fmt::Display for MallSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        if parts.is_empty() {
            write!(f, "|-")
        } else {
            write!(f, "|- {}", parts.join(", "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MallRuleError {
    #[error("`{0}` is not an atom name")]
    BadAtom(String),
    #[error("premise has too few formulas")]
    TooFewFormulas,
    #[error("exchange positions {i},{j} out of range for {len} formulas")]
    ExchangeOutOfRange { i: usize, j: usize, len: usize },
    #[error("exchange of position {0} with itself")]
    ExchangeSamePosition(usize),
    #[error("`{0}` is not a ⊕ formula")]
    NotASum(MallFormula),
    #[error("premise's last formula `{found}` is not the {side} disjunct `{expected}`")]
    DisjunctMismatch {
        side: &'static str,
        expected: MallFormula,
        found: MallFormula,
    },
    #[error("invalid label `{0}`")]
    InvalidLabel(String),
    #[error("premise contexts differ: `{left}` vs `{right}`")]
    ContextMismatch { left: String, right: String },
    #[error("label `{0}` occurs twice in the conclusion")]
    LabelCollision(String),
    #[error("stored conclusion `{stored}` differs from inferred `{inferred}`")]
    ConclusionMismatch { stored: String, inferred: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at node {path} ({rule}): {kind}")]
pub struct MallProofError {
    pub path: NodePath,
    pub rule: &'static str,
    pub kind: MallRuleError,
}

#[derive(Debug, Error)]
pub enum MallParseError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error(transparent)]
    Rule(#[from] MallProofError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MallRule {
    Ax(String),
    Tensor(MallProof, MallProof),
    Par(MallProof),
    PlusL(MallFormula, MallProof),
    PlusR(MallFormula, MallProof),
    With(String, MallProof, MallProof),
    Ex(usize, usize, MallProof),
}

fn show_formulas(fs: &[MallFormula]) -> String {
    fs.iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl MallRule {
    pub fn name(&self) -> &'static str {
        match self {
            MallRule::Ax(_) => "ax",
            MallRule::Tensor(..) => "tensor",
            MallRule::Par(_) => "par",
            MallRule::PlusL(..) => "plusL",
            MallRule::PlusR(..) => "plusR",
            MallRule::With(..) => "with",
            MallRule::Ex(..) => "ex",
        }
    }

    pub fn premises(&self) -> Vec<&MallProof> {
        match self {
            MallRule::Ax(_) => vec![],
            MallRule::Par(p)
            | MallRule::PlusL(_, p)
            | MallRule::PlusR(_, p)
            | MallRule::Ex(_, _, p) => {
                vec![p]
            }
            MallRule::Tensor(p, q) | MallRule::With(_, p, q) => vec![p, q],
        }
    }

    pub fn infer(&self) -> Result<MallSequent, MallRuleError> {
        let split = |p: &MallProof| -> Result<(Vec<MallFormula>, MallFormula), MallRuleError> {
            let mut fs = p.conclusion().0.clone();
            let last = fs.pop().ok_or(MallRuleError::TooFewFormulas)?;
            Ok((fs, last))
        };
        let fs = match self {
            MallRule::Ax(a) => {
                if !is_atom_name(a) {
                    return Err(MallRuleError::BadAtom(a.clone()));
                }
                vec![MallFormula::dual(a.clone()), MallFormula::atom(a.clone())]
            }
            MallRule::Par(p) => {
                let (mut g, b) = split(p)?;
                let a = g.pop().ok_or(MallRuleError::TooFewFormulas)?;
                g.push(MallFormula::par(a, b));
                g
            }
            MallRule::Tensor(p, q) => {
                let (mut g, a) = split(p)?;
                let (d, b) = split(q)?;
                g.extend(d);
                g.push(MallFormula::tensor(a, b));
                g
            }
            MallRule::PlusL(f, p) | MallRule::PlusR(f, p) => {
                let MallFormula::Plus(_, a, b) = f else {
                    return Err(MallRuleError::NotASum(f.clone()));
                };
                let (side, want) = if matches!(self, MallRule::PlusL(..)) {
                    ("left", a)
                } else {
                    ("right", b)
                };
                let (mut g, last) = split(p)?;
                if last != **want {
                    return Err(MallRuleError::DisjunctMismatch {
                        side,
                        expected: (**want).clone(),
                        found: last,
                    });
                }
                g.push(f.clone());
                g
            }
            MallRule::With(x, p, q) => {
                if !is_label(x) {
                    return Err(MallRuleError::InvalidLabel(x.clone()));
                }
                let (mut g, a) = split(p)?;
                let (g2, b) = split(q)?;
                if g != g2 {
                    return Err(MallRuleError::ContextMismatch {
                        left: show_formulas(&g),
                        right: show_formulas(&g2),
                    });
                }
                g.push(MallFormula::with(x.clone(), a, b));
                g
            }
            MallRule::Ex(i, j, p) => {
                let mut g = p.conclusion().0.clone();
                let len = g.len();
                if *i == 0 || *j == 0 || *i > len || *j > len {
                    return Err(MallRuleError::ExchangeOutOfRange { i: *i, j: *j, len });
                }
                if i == j {
                    return Err(MallRuleError::ExchangeSamePosition(*i));
                }
                g.swap(i - 1, j - 1);
                g
            }
        };
        let s = MallSequent(fs);
        if let Some(l) = s.duplicate_label() {
            return Err(MallRuleError::LabelCollision(l));
        }
        Ok(s)
    }
}

#[derive(Debug, PartialEq, Eq)]
struct MallNode {
    rule: MallRule,
    conclusion: MallSequent,
}

/// One-sided proof tree with stored conclusions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MallProof(Arc<MallNode>);

impl MallProof {
    pub fn new(rule: MallRule) -> Result<MallProof, MallRuleError> {
        let conclusion = rule.infer()?;
        Ok(MallProof(Arc::new(MallNode { rule, conclusion })))
    }

    pub fn from_parts_unchecked(rule: MallRule, conclusion: MallSequent) -> MallProof {
        MallProof(Arc::new(MallNode { rule, conclusion }))
    }

    pub fn ax(a: impl Into<String>) -> Result<MallProof, MallRuleError> {
        MallProof::new(MallRule::Ax(a.into()))
    }

    pub fn ex(i: usize, j: usize, p: MallProof) -> Result<MallProof, MallRuleError> {
        MallProof::new(MallRule::Ex(i, j, p))
    }

    pub fn rule(&self) -> &MallRule {
        &self.0.rule
    }

    pub fn conclusion(&self) -> &MallSequent {
        &self.0.conclusion
    }

    pub fn premises(&self) -> Vec<&MallProof> {
        self.0.rule.premises()
    }

    pub fn size(&self) -> usize {
        1 + self.premises().iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn at(&self, path: &NodePath) -> Option<&MallProof> {
        let mut cur = self;
        for &slot in &path.0 {
            cur = *cur.premises().get(slot)?;
        }
        Some(cur)
    }

    /// Premise occurrence ↦ conclusion occurrence for premise `slot`.
    pub fn embedding(&self, slot: usize) -> Option<Vec<OccIndex>> {
        let prem = self.premises().get(slot)?.conclusion();
        let k = prem.atom_count();
        let last = |s: &MallSequent| s.0.last().map_or(0, MallFormula::atom_count);
        let map = match self.rule() {
            MallRule::Ax(_) => return None,
            MallRule::Par(_) | MallRule::PlusL(..) => (0..k).collect(),
            MallRule::PlusR(MallFormula::Plus(_, a, _), _) => {
                let g = k - last(prem);
                let a = a.atom_count();
                (0..k).map(|o| if o < g { o } else { o + a }).collect()
            }
            MallRule::PlusR(..) => return None,
            MallRule::With(_, p, _) => {
                if slot == 0 {
                    (0..k).collect()
                } else {
                    let g = k - last(prem);
                    let a = last(p.conclusion());
                    (0..k).map(|o| if o < g { o } else { o + a }).collect()
                }
            }
            MallRule::Tensor(p, q) => {
                let (pc, qc) = (p.conclusion(), q.conclusion());
                let g = pc.atom_count() - last(pc);
                let d = qc.atom_count() - last(qc);
                let a = last(pc);
                if slot == 0 {
                    (0..k).map(|o| if o < g { o } else { o + d }).collect()
                } else {
                    (0..k)
                        .map(|o| if o < d { o + g } else { o + g + a })
                        .collect()
                }
            }
            MallRule::Ex(i, j, _) => {
                let from = prem.offsets();
                let to = self.conclusion().offsets();
                let mut out = vec![0; k];
                for (pos, f) in prem.0.iter().enumerate() {
                    let target = if pos + 1 == *i {
                        j - 1
                    } else if pos + 1 == *j {
                        i - 1
                    } else {
                        pos
                    };
                    for d in 0..f.atom_count() {
                        out[from[pos] + d] = to[target] + d;
                    }
                }
                out
            }
        };
        Some(map)
    }

    pub fn parse(text: &str) -> Result<MallProof, MallParseError> {
        let mut toks = Tokens::new(text)?;
        let p = parse_mall_proof(&mut toks, &NodePath::root())?;
        toks.finish()?;
        Ok(p)
    }
}

fn parse_mall_proof(toks: &mut Tokens, path: &NodePath) -> Result<MallProof, MallParseError> {
    toks.expect(Tok::LParen)?;
    let (name, np) = toks.ident("a rule name")?;
    let rule = match name.as_str() {
        "ax" => MallRule::Ax(atom_name(toks)?),
        "par" => MallRule::Par(parse_mall_proof(toks, &path.child(0))?),
        "tensor" => {
            let p = parse_mall_proof(toks, &path.child(0))?;
            MallRule::Tensor(p, parse_mall_proof(toks, &path.child(1))?)
        }
        "plusL" | "plusR" => {
            let f = parse_mall_formula(toks)?;
            let p = parse_mall_proof(toks, &path.child(0))?;
            if name == "plusL" {
                MallRule::PlusL(f, p)
            } else {
                MallRule::PlusR(f, p)
            }
        }
        "with" => {
            let (x, xp) = toks.ident("a label")?;
            if !is_label(&x) {
                return Err(ParseError::new(xp, format!("invalid label `{x}`")).into());
            }
            let p = parse_mall_proof(toks, &path.child(0))?;
            MallRule::With(x, p, parse_mall_proof(toks, &path.child(1))?)
        }
        "ex" => {
            let i = parse_nat(toks)?;
            let j = parse_nat(toks)?;
            MallRule::Ex(i, j, parse_mall_proof(toks, &path.child(0))?)
        }
        other => return Err(ParseError::new(np, format!("unknown rule `{other}`")).into()),
    };
    toks.expect(Tok::RParen)?;
    let rname = rule.name();
    MallProof::new(rule).map_err(|kind| {
        MallProofError {
            path: path.clone(),
            rule: rname,
            kind,
        }
        .into()
    })
}

impl fmt::Display for MallProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule() {
            MallRule::Ax(a) => write!(f, "(ax {a})"),
            MallRule::Tensor(p, q) => write!(f, "(tensor {p} {q})"),
            MallRule::Par(p) => write!(f, "(par {p})"),
            MallRule::PlusL(a, p) => write!(f, "(plusL {a} {p})"),
            MallRule::PlusR(a, p) => write!(f, "(plusR {a} {p})"),
            MallRule::With(x, p, q) => write!(f, "(with {x} {p} {q})"),
            MallRule::Ex(i, j, p) => write!(f, "(ex {i} {j} {p})"),
        }
    }
}

/// Checks every node, including stored conclusions.
pub fn check_mall_proof(p: &MallProof) -> Result<(), MallProofError> {
    fn go(p: &MallProof, path: &NodePath) -> Result<(), MallProofError> {
        for (slot, q) in p.premises().into_iter().enumerate() {
            go(q, &path.child(slot))?;
        }
        let err = |kind| MallProofError {
            path: path.clone(),
            rule: p.rule().name(),
            kind,
        };
        let inferred = p.rule().infer().map_err(err)?;
        if &inferred != p.conclusion() {
            return Err(err(MallRuleError::ConclusionMismatch {
                stored: p.conclusion().to_string(),
                inferred: inferred.to_string(),
            }));
        }
        Ok(())
    }
    go(p, &NodePath::root())
}

impl Sliceable for MallProof {
    type Conclusion = MallSequent;

    fn conclusion(&self) -> &MallSequent {
        MallProof::conclusion(self)
    }

    fn atom_count(&self) -> usize {
        MallProof::conclusion(self).atom_count()
    }

    fn shape(&self) -> Shape<'_, MallProof> {
        let emb = |slot| self.embedding(slot).expect("checked proof");
        match self.rule() {
            MallRule::Ax(_) => Shape::Axiom,
            MallRule::Par(p)
            | MallRule::PlusL(_, p)
            | MallRule::PlusR(_, p)
            | MallRule::Ex(_, _, p) => Shape::Pass((p, emb(0))),
            MallRule::Tensor(p, q) => Shape::Split((p, emb(0)), (q, emb(1))),
            MallRule::With(x, p, q) => {
                let k = Sliceable::atom_count(self);
                let whole = k - self.conclusion().0.last().unwrap().atom_count();
                let split = whole + p.conclusion().0.last().unwrap().atom_count();
                Shape::Branch {
                    label: x,
                    left: (p, emb(0)),
                    right: (q, emb(1)),
                    a: whole..split,
                    b: split..k,
                }
            }
        }
    }
}

pub fn mall_bdt_slicing(p: &MallProof) -> BdtSlicing<MallSequent> {
    bdt_slicing(p)
}

/// Explicit slicing by the set-valued clauses.
pub fn mall_slicing(p: &MallProof) -> Slicing {
    slicing(p)
}

pub fn mall_equiv(p: &MallProof, q: &MallProof) -> Result<EquivVerdict, EquivError> {
    slicing_equiv(p, q)
}

/// Compares the sets of valuation slices of the two BDT slicings.
pub fn mall_equiv_oracle(p: &MallProof, q: &MallProof) -> Result<bool, EquivError> {
    mall_equiv_oracle_with_budget(p, q, DEFAULT_ORACLE_BUDGET)
}

/// As [`mall_equiv_oracle`], refusing slicings over more than `budget`
/// variables.
pub fn mall_equiv_oracle_with_budget(
    p: &MallProof,
    q: &MallProof,
    budget: usize,
) -> Result<bool, EquivError> {
    if p.conclusion() != q.conclusion() {
        return Err(EquivError::ConclusionMismatch {
            left: p.conclusion().to_string(),
            right: q.conclusion().to_string(),
        });
    }
    Ok(
        expand_with_budget(&bdt_slicing(p), budget)?
            == expand_with_budget(&bdt_slicing(q), budget)?,
    )
}

/// Reorders the sequent of `p` into `target` with adjacent exchanges.
pub fn arrange_mall(p: MallProof, target: &[MallFormula]) -> MallProof {
    let mut ctx = p.conclusion().0.clone();
    let mut cur = p;
    for q in 0..target.len() {
        let pos = q + ctx[q..]
            .iter()
            .position(|f| f == &target[q])
            .expect("target is a permutation");
        for r in (q..pos).rev() {
            cur = MallProof::ex(r + 1, r + 2, cur).expect("adjacent exchange");
            ctx.swap(r, r + 1);
        }
    }
    cur
}

/// Randomized backward proof search with a node budget. Returns a proof
/// whose conclusion is exactly `goal`, or `None` if none was found.
pub fn search_proof<R: Rng + ?Sized>(
    goal: &MallSequent,
    rng: &mut R,
    budget: usize,
) -> Option<MallProof> {
    let mut fuel = budget;
    let mut failed = HashSet::new();
    search(&goal.0, rng, &mut fuel, &mut failed)
}

fn balanced(fs: &[MallFormula]) -> bool {
    // Necessary condition for provability: literals occurring outside any
    // additive connective must pair up by name.
    fn go(f: &MallFormula, count: &mut HashMap<String, i64>) {
        match f {
            MallFormula::Atom(a) => *count.entry(a.clone()).or_default() += 1,
            MallFormula::Dual(a) => *count.entry(a.clone()).or_default() -= 1,
            MallFormula::Tensor(l, r) | MallFormula::Par(l, r) => {
                go(l, count);
                go(r, count);
            }
            MallFormula::Plus(..) | MallFormula::With(..) => {}
        }
    }
    let mut count = HashMap::new();
    let mut additive = false;
    for f in fs {
        go(f, &mut count);
        additive |= !f.labels().is_empty();
    }
    additive || count.values().all(|&c| c == 0)
}

fn search<R: Rng + ?Sized>(
    goal: &[MallFormula],
    rng: &mut R,
    fuel: &mut usize,
    failed: &mut HashSet<Vec<MallFormula>>,
) -> Option<MallProof> {
    if *fuel == 0 || failed.contains(goal) || !balanced(goal) {
        return None;
    }
    *fuel -= 1;
    if let [x, y] = goal {
        match (x, y) {
            (MallFormula::Dual(a), MallFormula::Atom(b)) if a == b => {
                return MallProof::ax(a.clone()).ok()
            }
            (MallFormula::Atom(a), MallFormula::Dual(b)) if a == b => {
                return MallProof::ex(1, 2, MallProof::ax(a.clone()).ok()?).ok()
            }
            _ => {}
        }
    }
    let m = goal.len();
    let mut candidates: Vec<usize> = (0..m).filter(|&i| !goal[i].is_literal()).collect();
    candidates.shuffle(rng);
    for i in candidates {
        let mut rest = goal.to_vec();
        let principal = rest.remove(i);
        // Prove `rest, principal`, then move the principal formula back.
        let found = search_principal(&rest, &principal, rng, fuel, failed);
        if let Some(p) = found {
            return Some(arrange_mall(p, goal));
        }
        if *fuel == 0 {
            break;
        }
    }
    failed.insert(goal.to_vec());
    None
}

fn search_principal<R: Rng + ?Sized>(
    rest: &[MallFormula],
    principal: &MallFormula,
    rng: &mut R,
    fuel: &mut usize,
    failed: &mut HashSet<Vec<MallFormula>>,
) -> Option<MallProof> {
    let with_last = |f: &MallFormula| {
        let mut v = rest.to_vec();
        v.push(f.clone());
        v
    };
    match principal {
        MallFormula::Atom(_) | MallFormula::Dual(_) => None,
        MallFormula::Par(a, b) => {
            let mut v = with_last(a);
            v.push((**b).clone());
            let p = search(&v, rng, fuel, failed)?;
            MallProof::new(MallRule::Par(p)).ok()
        }
        MallFormula::With(x, a, b) => {
            let p = search(&with_last(a), rng, fuel, failed)?;
            let q = search(&with_last(b), rng, fuel, failed)?;
            MallProof::new(MallRule::With(x.clone(), p, q)).ok()
        }
        MallFormula::Plus(_, a, b) => {
            let left_first = rng.random_bool(0.5);
            for left in [left_first, !left_first] {
                let side = if left { a } else { b };
                if let Some(p) = search(&with_last(side), rng, fuel, failed) {
                    let rule = if left {
                        MallRule::PlusL(principal.clone(), p)
                    } else {
                        MallRule::PlusR(principal.clone(), p)
                    };
                    return MallProof::new(rule).ok();
                }
            }
            None
        }
        MallFormula::Tensor(a, b) => {
            let n = rest.len();
            let tries = if n <= 4 { 1usize << n } else { 12 };
            let mut masks: Vec<u64> = if n <= 4 {
                (0..1u64 << n).collect()
            } else {
                (0..tries)
                    .map(|_| rng.random_range(0..1u64 << n.min(63)))
                    .collect()
            };
            masks.shuffle(rng);
            for mask in masks {
                let (g, d): (Vec<_>, Vec<_>) = (0..n).partition(|&k| mask >> k & 1 == 1);
                let mut lg: Vec<MallFormula> = g.iter().map(|&k| rest[k].clone()).collect();
                let mut rd: Vec<MallFormula> = d.iter().map(|&k| rest[k].clone()).collect();
                lg.push((**a).clone());
                rd.push((**b).clone());
                let Some(p) = search(&lg, rng, fuel, failed) else {
                    continue;
                };
                let Some(q) = search(&rd, rng, fuel, failed) else {
                    continue;
                };
                let t = MallProof::new(MallRule::Tensor(p, q)).ok()?;
                let mut target = rest.to_vec();
                target.push(principal.clone());
                return Some(arrange_mall(t, &target));
            }
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdt::Bdt;
    use crate::formula::OccPair;
    use crate::slicing::expand;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn proof(text: &str) -> MallProof {
        MallProof::parse(text).unwrap()
    }

    fn pair(i: usize, j: usize) -> OccPair {
        OccPair::new(i, j).unwrap()
    }

    #[test]
    fn formula_round_trip() {
        for text in ["a", "~a", "((a * ~b) @ (c +[x] (d &[y] ~e)))"] {
            assert_eq!(MallFormula::parse(text).unwrap().to_string(), text);
        }
        assert!(MallFormula::parse("(a & b)").is_err());
        let s = MallSequent::parse("|- ~a, (a &[x] a)").unwrap();
        assert_eq!(s.to_string(), "|- ~a, (a &[x] a)");
        assert!(MallSequent::parse("|- (a &[x] a), (a +[x] a)").is_err());
    }

    #[test]
    fn axiom_and_par() {
        let p = proof("(ax a)");
        assert_eq!(p.conclusion().to_string(), "|- ~a, a");
        let p = proof("(par (ax a))");
        assert_eq!(p.conclusion().to_string(), "|- (~a @ a)");
        check_mall_proof(&p).unwrap();
        let bs = mall_bdt_slicing(&proof("(ax a)"));
        assert_eq!(bs.get(pair(0, 1)), &Bdt::one());
    }

    #[test]
    fn tensor_cross_pairs() {
        let p = proof("(tensor (ax a) (ax b))");
        assert_eq!(p.conclusion().to_string(), "|- ~a, ~b, (a * b)");
        let bs = mall_bdt_slicing(&p);
        assert_eq!(bs.get(pair(0, 2)), &Bdt::one());
        assert_eq!(bs.get(pair(1, 3)), &Bdt::one());
        assert_eq!(bs.get(pair(0, 1)), &Bdt::zero());
        assert_eq!(bs.get(pair(0, 3)), &Bdt::zero());
    }

    #[test]
    fn tensor_stored_conclusion_mismatch() {
        let good = proof("(tensor (ax a) (ax b))");
        let MallRule::Tensor(l, r) = good.rule().clone() else {
            unreachable!()
        };
        let bad = MallProof::from_parts_unchecked(
            MallRule::Tensor(l, r),
            MallSequent::parse("|- ~b, ~a, (a * b)").unwrap(),
        );
        let err = check_mall_proof(&bad).unwrap_err();
        assert!(matches!(err.kind, MallRuleError::ConclusionMismatch { .. }));
        let err = MallProof::parse("(with x (ax a) (ax b))").unwrap_err();
        assert!(err.to_string().contains("(with)"));
    }

    fn with_example() -> MallProof {
        proof("(with x (ex 1 2 (plusL (a +[y] b) (ax a))) (ex 1 2 (plusR (a +[y] b) (ax b))))")
    }

    #[test]
    fn with_mirrors_the_two_slice_example() {
        let p = with_example();
        assert_eq!(p.conclusion().to_string(), "|- (a +[y] b), (~a &[x] ~b)");
        let bs = mall_bdt_slicing(&p);
        assert_eq!(bs.get(pair(0, 2)).to_string(), "(x ? 1 : 0)");
        assert_eq!(bs.get(pair(1, 3)).to_string(), "(x ? 0 : 1)");
        let expected: Slicing = [
            [pair(0, 2)].into_iter().collect(),
            [pair(1, 3)].into_iter().collect(),
        ]
        .into_iter()
        .collect();
        assert_eq!(mall_slicing(&p), expected);
        assert_eq!(expand(&bs).unwrap(), expected);
    }

    #[test]
    fn distributivity_mirror() {
        let pi = "(ax c)";
        let mu = "(plusL (c +[y] d) (ax c))";
        let p = proof(&format!("(tensor (ax a) (ex 1 2 (with x {pi} {mu})))"));
        assert_eq!(
            p.conclusion().to_string(),
            "|- ~a, (c &[x] (c +[y] d)), (a * ~c)"
        );
        let side = |q: &str| format!("(ex 2 3 (tensor (ax a) (ex 1 2 {q})))");
        let q = proof(&format!("(ex 2 3 (with x {} {}))", side(pi), side(mu)));
        assert_eq!(p.conclusion(), q.conclusion());
        assert!(mall_equiv(&p, &q).unwrap().equivalent);
        assert!(mall_equiv_oracle(&p, &q).unwrap());
    }

    #[test]
    fn with_branch_swap() {
        let l = "(ex 1 2 (plusL (c +[y] c) (ax c)))";
        let r = "(ex 1 2 (plusR (c +[y] c) (ax c)))";
        let p = proof(&format!("(with x {l} {r})"));
        let q = proof(&format!("(with x {r} {l})"));
        assert_eq!(p.conclusion(), q.conclusion());
        assert!(!mall_equiv(&p, &q).unwrap().equivalent);
        assert!(!mall_equiv_oracle(&p, &q).unwrap());
        assert!(mall_equiv(&p, &p).unwrap().equivalent);
    }

    #[test]
    fn backward_search() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
        let goals = [
            "|- ~a, a",
            "|- a, ~a",
            "|- (~a @ a)",
            "|- ~a, ~b, (a * b)",
            "|- (a +[y] b), (~a &[x] ~b)",
            "|- (~a &[x] ~b), ((a * c) +[y] (b * c)), ~c",
        ];
        for g in goals {
            let goal = MallSequent::parse(g).unwrap();
            let p =
                search_proof(&goal, &mut rng, 10_000).unwrap_or_else(|| panic!("no proof of {g}"));
            check_mall_proof(&p).unwrap();
            assert_eq!(p.conclusion(), &goal);
        }
        let unprovable = MallSequent::parse("|- a, b").unwrap();
        assert!(search_proof(&unprovable, &mut rng, 1000).is_none());
    }
}
