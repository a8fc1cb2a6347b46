//! Proof trees of the intuitionistic calculus with explicit exchange.
//!
//! A [`ProofTerm`] is the bare rule tree as written in a proof file. A
//! [`Proof`] is the same tree with the conclusion sequent of every node
//! stored alongside its rule; it is obtained through [`infer_conclusion`]
//! or the checked constructors on [`Proof`].
//!
//! Rules, with the formula introduced by `DPlus` always last in the context:
//!
//! ```text
//!                Γ, A |- B        Γ |- A   B, Δ |- C      Γ |- C
//!  α |- α       ----------       -------------------    ---------- ex i j
//!               Γ |- A -o B      Γ, A -o B, Δ |- C       Γ' |- C
//!
//!   Γ |- A           Γ |- B           Γ, A |- C   Γ, B |- C
//! ------------     ------------     ------------------------ dplus x
//! Γ |- A +[y] B    Γ |- A +[y] B        Γ, A +[x] B |- C
//! ```

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::formula::{parse_formula, Formula, OccIndex, Sequent};
use crate::syntax::{is_atom_name, is_label, ParseError, Tok, Tokens};

/// Path from the root to a node: the premise slot taken at each step.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn child(&self, slot: usize) -> Self {
        let mut v = self.0.clone();
        v.push(slot);
        NodePath(v)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "/");
        }
        for s in &self.0 {
            write!(f, "/{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("axiom on non-atomic or invalid atom `{0}`")]
    NonAtomicAxiom(String),
    #[error("premise context is empty, no formula to discharge")]
    EmptyPremiseContext,
    #[error("exchange positions {i},{j} out of range (context has {len} formulas)")]
    ExchangeOutOfRange { i: usize, j: usize, len: usize },
    #[error("exchange positions must differ (got {0},{0})")]
    ExchangeSamePosition(usize),
    #[error("result formula `{0}` is not a ⊕")]
    NotASum(Formula),
    #[error("premise succedent `{found}` is not the {side} disjunct `{expected}`")]
    DisjunctMismatch {
        side: &'static str,
        expected: Formula,
        found: Formula,
    },
    #[error("invalid ⊕ label `{0}`")]
    InvalidLabel(String),
    #[error("context mismatch between premises: `{left}` vs `{right}`")]
    ContextMismatch { left: String, right: String },
    #[error("succedent mismatch between premises: `{left}` vs `{right}`")]
    SuccedentMismatch { left: Formula, right: Formula },
    #[error("label `{0}` occurs twice in the conclusion")]
    LabelCollision(String),
    #[error("node has no premise in slot {0}")]
    NoSuchPremise(usize),
    #[error("stored conclusion `{stored}` differs from inferred `{inferred}`")]
    ConclusionMismatch { stored: Sequent, inferred: Sequent },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at node {path} ({rule}): {kind}")]
pub struct ProofError {
    pub path: NodePath,
    pub rule: &'static str,
    pub kind: RuleError,
}

/// A proof as written, without conclusions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofTerm {
    Ax(String),
    ImpR(Box<ProofTerm>),
    ImpL(Box<ProofTerm>, Box<ProofTerm>),
    Ex(usize, usize, Box<ProofTerm>),
    PlusL(Formula, Box<ProofTerm>),
    PlusR(Formula, Box<ProofTerm>),
    DPlus(String, Box<ProofTerm>, Box<ProofTerm>),
}

impl ProofTerm {
    pub fn parse(text: &str) -> Result<ProofTerm, ParseError> {
        let mut toks = Tokens::new(text)?;
        let t = parse_term(&mut toks)?;
        toks.finish()?;
        Ok(t)
    }
}

fn parse_term(toks: &mut Tokens) -> Result<ProofTerm, ParseError> {
    toks.expect(Tok::LParen)?;
    let (rule, rp) = toks.ident("a rule name")?;
    let boxed = |t: ProofTerm| Box::new(t);
    let term = match rule.as_str() {
        "ax" => {
            let (a, p) = toks.ident("an atom")?;
            if !is_atom_name(&a) {
                return Err(ParseError::new(p, format!("invalid atom name `{a}`")));
            }
            ProofTerm::Ax(a)
        }
        "impR" => ProofTerm::ImpR(boxed(parse_term(toks)?)),
        "impL" => {
            let l = parse_term(toks)?;
            ProofTerm::ImpL(boxed(l), boxed(parse_term(toks)?))
        }
        "ex" => {
            let i = parse_nat(toks)?;
            let j = parse_nat(toks)?;
            ProofTerm::Ex(i, j, boxed(parse_term(toks)?))
        }
        "plusL" | "plusR" => {
            let f = parse_formula(toks)?;
            let p = boxed(parse_term(toks)?);
            if rule == "plusL" {
                ProofTerm::PlusL(f, p)
            } else {
                ProofTerm::PlusR(f, p)
            }
        }
        "dplus" => {
            let (x, p) = toks.ident("a label")?;
            if !is_label(&x) {
                return Err(ParseError::new(p, format!("invalid label `{x}`")));
            }
            let l = parse_term(toks)?;
            ProofTerm::DPlus(x, boxed(l), boxed(parse_term(toks)?))
        }
        other => return Err(ParseError::new(rp, format!("unknown rule `{other}`"))),
    };
    toks.expect(Tok::RParen)?;
    Ok(term)
}

pub(crate) fn parse_nat(toks: &mut Tokens) -> Result<usize, ParseError> {
    let (s, p) = toks.ident("a position")?;
    s.parse()
        .map_err(|_| ParseError::new(p, format!("expected a natural number, found `{s}`")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Ax(String),
    ImpR(Proof),
    ImpL(Proof, Proof),
    Ex(usize, usize, Proof),
    PlusL(Formula, Proof),
    PlusR(Formula, Proof),
    DPlus(String, Proof, Proof),
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Ax(_) => "ax",
            Rule::ImpR(_) => "impR",
            Rule::ImpL(..) => "impL",
            Rule::Ex(..) => "ex",
            Rule::PlusL(..) => "plusL",
            Rule::PlusR(..) => "plusR",
            Rule::DPlus(..) => "dplus",
        }
    }

    pub fn premises(&self) -> Vec<&Proof> {
        match self {
            Rule::Ax(_) => vec![],
            Rule::ImpR(p) | Rule::Ex(_, _, p) | Rule::PlusL(_, p) | Rule::PlusR(_, p) => vec![p],
            Rule::ImpL(p, q) | Rule::DPlus(_, p, q) => vec![p, q],
        }
    }

    /// Infers the conclusion of this rule from the stored conclusions of
    /// its premises.
    pub fn infer(&self) -> Result<Sequent, RuleError> {
        let s = match self {
            Rule::Ax(a) => {
                if !is_atom_name(a) {
                    return Err(RuleError::NonAtomicAxiom(a.clone()));
                }
                Sequent::new(vec![Formula::atom(a.clone())], Formula::atom(a.clone()))
            }
            Rule::ImpR(p) => {
                let mut ctx = p.conclusion().context.clone();
                let a = ctx.pop().ok_or(RuleError::EmptyPremiseContext)?;
                Sequent::new(ctx, Formula::imp(a, p.conclusion().succedent.clone()))
            }
            Rule::ImpL(p, q) => {
                let left = p.conclusion();
                let right = q.conclusion();
                let (b, delta) = right
                    .context
                    .split_first()
                    .ok_or(RuleError::EmptyPremiseContext)?;
                let mut ctx = left.context.clone();
                ctx.push(Formula::imp(left.succedent.clone(), b.clone()));
                ctx.extend(delta.iter().cloned());
                Sequent::new(ctx, right.succedent.clone())
            }
            Rule::Ex(i, j, p) => {
                let prem = p.conclusion();
                let len = prem.context.len();
                if *i == 0 || *j == 0 || *i > len || *j > len {
                    return Err(RuleError::ExchangeOutOfRange { i: *i, j: *j, len });
                }
                if i == j {
                    return Err(RuleError::ExchangeSamePosition(*i));
                }
                let mut ctx = prem.context.clone();
                ctx.swap(i - 1, j - 1);
                Sequent::new(ctx, prem.succedent.clone())
            }
            Rule::PlusL(f, p) | Rule::PlusR(f, p) => {
                let Formula::Plus(_, a, b) = f else {
                    return Err(RuleError::NotASum(f.clone()));
                };
                let (side, want) = if matches!(self, Rule::PlusL(..)) {
                    ("left", a)
                } else {
                    ("right", b)
                };
                let prem = p.conclusion();
                if prem.succedent != **want {
                    return Err(RuleError::DisjunctMismatch {
                        side,
                        expected: (**want).clone(),
                        found: prem.succedent.clone(),
                    });
                }
                Sequent::new(prem.context.clone(), f.clone())
            }
            Rule::DPlus(x, p, q) => {
                if !is_label(x) {
                    return Err(RuleError::InvalidLabel(x.clone()));
                }
                let left = p.conclusion();
                let right = q.conclusion();
                let (a, gamma) = left
                    .context
                    .split_last()
                    .ok_or(RuleError::EmptyPremiseContext)?;
                let (b, gamma2) = right
                    .context
                    .split_last()
                    .ok_or(RuleError::EmptyPremiseContext)?;
                if gamma != gamma2 {
                    return Err(RuleError::ContextMismatch {
                        left: show_context(gamma),
                        right: show_context(gamma2),
                    });
                }
                if left.succedent != right.succedent {
                    return Err(RuleError::SuccedentMismatch {
                        left: left.succedent.clone(),
                        right: right.succedent.clone(),
                    });
                }
                let mut ctx = gamma.to_vec();
                ctx.push(Formula::plus(x.clone(), a.clone(), b.clone()));
                Sequent::new(ctx, left.succedent.clone())
            }
        };
        if let Some(l) = s.duplicate_label() {
            return Err(RuleError::LabelCollision(l));
        }
        Ok(s)
    }
}

fn show_context(ctx: &[Formula]) -> String {
    ctx.iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, PartialEq, Eq)]
struct Node {
    rule: Rule,
    conclusion: Sequent,
}

/// A proof tree whose nodes carry their conclusion sequents. Subtrees are
/// shared, so cloning is cheap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof(Arc<Node>);

impl Proof {
    /// Builds a node after checking the rule against its premises.
    pub fn new(rule: Rule) -> Result<Proof, RuleError> {
        let conclusion = rule.infer()?;
        Ok(Proof(Arc::new(Node { rule, conclusion })))
    }

    /// Builds a node with an arbitrary stored conclusion. [`check_proof`]
    /// reports any disagreement.
    pub fn from_parts_unchecked(rule: Rule, conclusion: Sequent) -> Proof {
        Proof(Arc::new(Node { rule, conclusion }))
    }

    pub fn ax(atom: impl Into<String>) -> Result<Proof, RuleError> {
        Proof::new(Rule::Ax(atom.into()))
    }

    pub fn imp_r(p: Proof) -> Result<Proof, RuleError> {
        Proof::new(Rule::ImpR(p))
    }

    pub fn imp_l(p: Proof, q: Proof) -> Result<Proof, RuleError> {
        Proof::new(Rule::ImpL(p, q))
    }

    pub fn ex(i: usize, j: usize, p: Proof) -> Result<Proof, RuleError> {
        Proof::new(Rule::Ex(i, j, p))
    }

    pub fn plus_l(f: Formula, p: Proof) -> Result<Proof, RuleError> {
        Proof::new(Rule::PlusL(f, p))
    }

    pub fn plus_r(f: Formula, p: Proof) -> Result<Proof, RuleError> {
        Proof::new(Rule::PlusR(f, p))
    }

    pub fn dplus(x: impl Into<String>, p: Proof, q: Proof) -> Result<Proof, RuleError> {
        Proof::new(Rule::DPlus(x.into(), p, q))
    }

    pub fn rule(&self) -> &Rule {
        &self.0.rule
    }

    pub fn conclusion(&self) -> &Sequent {
        &self.0.conclusion
    }

    pub fn premises(&self) -> Vec<&Proof> {
        self.0.rule.premises()
    }

    /// Number of rule nodes, counting shared subtrees once per use.
    pub fn size(&self) -> usize {
        1 + self.premises().iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises().iter().map(|p| p.depth()).max().unwrap_or(0)
    }

    pub fn at(&self, path: &NodePath) -> Option<&Proof> {
        let mut cur = self;
        for &slot in &path.0 {
            cur = *cur.premises().get(slot)?;
        }
        Some(cur)
    }

    /// Replaces the subtree at `path`, re-inferring every ancestor.
    pub fn replace_at(&self, path: &NodePath, new: Proof) -> Result<Proof, ProofError> {
        self.replace_from(&path.0, 0, new)
    }

    fn replace_from(&self, full: &[usize], depth: usize, new: Proof) -> Result<Proof, ProofError> {
        let Some(&slot) = full.get(depth) else {
            return Ok(new);
        };
        let here = NodePath(full[..depth].to_vec());
        let sub = |p: &Proof| p.replace_from(full, depth + 1, new.clone());
        let rule = match (self.rule(), slot) {
            (Rule::ImpR(p), 0) => Rule::ImpR(sub(p)?),
            (Rule::Ex(i, j, p), 0) => Rule::Ex(*i, *j, sub(p)?),
            (Rule::PlusL(f, p), 0) => Rule::PlusL(f.clone(), sub(p)?),
            (Rule::PlusR(f, p), 0) => Rule::PlusR(f.clone(), sub(p)?),
            (Rule::ImpL(p, q), 0) => Rule::ImpL(sub(p)?, q.clone()),
            (Rule::ImpL(p, q), 1) => Rule::ImpL(p.clone(), sub(q)?),
            (Rule::DPlus(x, p, q), 0) => Rule::DPlus(x.clone(), sub(p)?, q.clone()),
            (Rule::DPlus(x, p, q), 1) => Rule::DPlus(x.clone(), p.clone(), sub(q)?),
            _ => {
                return Err(ProofError {
                    path: here.child(slot),
                    rule: self.rule().name(),
                    kind: RuleError::NoSuchPremise(slot),
                })
            }
        };
        let name = rule.name();
        Proof::new(rule).map_err(|kind| ProofError {
            path: here,
            rule: name,
            kind,
        })
    }

    /// Maps each occurrence of the premise in `slot` to the corresponding
    /// occurrence of this node's conclusion. `None` for an invalid slot.
    pub fn embedding(&self, slot: usize) -> Option<Vec<OccIndex>> {
        let prem = self.premises().get(slot)?.conclusion();
        let k = prem.atom_count();
        let map: Vec<OccIndex> = match self.rule() {
            Rule::Ax(_) => return None,
            Rule::ImpR(_) | Rule::PlusL(..) => (0..k).collect(),
            Rule::ImpL(left, _) => {
                let shift = if slot == 0 {
                    0
                } else {
                    left.conclusion().atom_count()
                };
                (0..k).map(|o| o + shift).collect()
            }
            Rule::PlusR(f, _) => {
                let Formula::Plus(_, a, _) = f else {
                    return None;
                };
                let g = prem.atom_count() - prem.succedent.atom_count();
                let a = a.atom_count();
                (0..k).map(|o| if o < g { o } else { o + a }).collect()
            }
            Rule::Ex(i, j, _) => {
                let concl = self.conclusion();
                let from = prem.offsets();
                let to = concl.offsets();
                let n = prem.context.len();
                let mut out = vec![0; k];
                for pos in 0..=n {
                    let target = if pos == n {
                        n
                    } else if pos + 1 == *i {
                        j - 1
                    } else if pos + 1 == *j {
                        i - 1
                    } else {
                        pos
                    };
                    let len = if pos == n {
                        prem.succedent.atom_count()
                    } else {
                        prem.context[pos].atom_count()
                    };
                    for d in 0..len {
                        out[from[pos] + d] = to[target] + d;
                    }
                }
                out
            }
            Rule::DPlus(_, left, right) => {
                let (lc, rc) = (left.conclusion(), right.conclusion());
                let a = lc.context.last()?.atom_count();
                let b = rc.context.last()?.atom_count();
                let g = lc.atom_count() - lc.succedent.atom_count() - a;
                if slot == 0 {
                    (0..k).map(|o| if o < g + a { o } else { o + b }).collect()
                } else {
                    (0..k).map(|o| if o < g { o } else { o + a }).collect()
                }
            }
        };
        Some(map)
    }

    pub fn to_term(&self) -> ProofTerm {
        match self.rule() {
            Rule::Ax(a) => ProofTerm::Ax(a.clone()),
            Rule::ImpR(p) => ProofTerm::ImpR(Box::new(p.to_term())),
            Rule::ImpL(p, q) => ProofTerm::ImpL(Box::new(p.to_term()), Box::new(q.to_term())),
            Rule::Ex(i, j, p) => ProofTerm::Ex(*i, *j, Box::new(p.to_term())),
            Rule::PlusL(f, p) => ProofTerm::PlusL(f.clone(), Box::new(p.to_term())),
            Rule::PlusR(f, p) => ProofTerm::PlusR(f.clone(), Box::new(p.to_term())),
            Rule::DPlus(x, p, q) => {
                ProofTerm::DPlus(x.clone(), Box::new(p.to_term()), Box::new(q.to_term()))
            }
        }
    }

    /// Parses a proof file and infers its conclusions.
    pub fn parse(text: &str) -> Result<Proof, ProofParseError> {
        let term = ProofTerm::parse(text)?;
        Ok(infer_conclusion(&term)?)
    }

    /// Multi-line rendering; nodes whose one-line form fits in 72 columns
    /// stay on one line.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        pretty_term(&self.to_term(), 0, &mut out);
        out
    }
}

#[derive(Debug, Error)]
pub enum ProofParseError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error(transparent)]
    Rule(#[from] ProofError),
}

/// Fills every node's conclusion bottom-up.
pub fn infer_conclusion(term: &ProofTerm) -> Result<Proof, ProofError> {
    infer_at(term, &NodePath::root())
}

fn infer_at(term: &ProofTerm, path: &NodePath) -> Result<Proof, ProofError> {
    let rule = match term {
        ProofTerm::Ax(a) => Rule::Ax(a.clone()),
        ProofTerm::ImpR(p) => Rule::ImpR(infer_at(p, &path.child(0))?),
        ProofTerm::ImpL(p, q) => {
            Rule::ImpL(infer_at(p, &path.child(0))?, infer_at(q, &path.child(1))?)
        }
        ProofTerm::Ex(i, j, p) => Rule::Ex(*i, *j, infer_at(p, &path.child(0))?),
        ProofTerm::PlusL(f, p) => Rule::PlusL(f.clone(), infer_at(p, &path.child(0))?),
        ProofTerm::PlusR(f, p) => Rule::PlusR(f.clone(), infer_at(p, &path.child(0))?),
        ProofTerm::DPlus(x, p, q) => Rule::DPlus(
            x.clone(),
            infer_at(p, &path.child(0))?,
            infer_at(q, &path.child(1))?,
        ),
    };
    let name = rule.name();
    Proof::new(rule).map_err(|kind| ProofError {
        path: path.clone(),
        rule: name,
        kind,
    })
}

/// Checks every node: the rule applies to its premises and the stored
/// conclusion is the inferred one.
pub fn check_proof(p: &Proof) -> Result<(), ProofError> {
    check_at(p, &NodePath::root())
}

fn check_at(p: &Proof, path: &NodePath) -> Result<(), ProofError> {
    for (slot, q) in p.premises().into_iter().enumerate() {
        check_at(q, &path.child(slot))?;
    }
    let err = |kind| ProofError {
        path: path.clone(),
        rule: p.rule().name(),
        kind,
    };
    let inferred = p.rule().infer().map_err(err)?;
    if &inferred != p.conclusion() {
        return Err(err(RuleError::ConclusionMismatch {
            stored: p.conclusion().clone(),
            inferred,
        }));
    }
    Ok(())
}

/// Embedding of the premise in `slot` of the node at `path` into that
/// node's conclusion.
pub fn premise_embedding(
    p: &Proof,
    path: &NodePath,
    slot: usize,
) -> Result<Vec<OccIndex>, InvalidNode> {
    p.at(path)
        .ok_or_else(|| InvalidNode(path.clone()))?
        .embedding(slot)
        .ok_or_else(|| InvalidNode(path.child(slot)))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no node at {0}")]
pub struct InvalidNode(pub NodePath);

impl fmt::Display for ProofTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofTerm::Ax(a) => write!(f, "(ax {a})"),
            ProofTerm::ImpR(p) => write!(f, "(impR {p})"),
            ProofTerm::ImpL(p, q) => write!(f, "(impL {p} {q})"),
            ProofTerm::Ex(i, j, p) => write!(f, "(ex {i} {j} {p})"),
            ProofTerm::PlusL(a, p) => write!(f, "(plusL {a} {p})"),
            ProofTerm::PlusR(a, p) => write!(f, "(plusR {a} {p})"),
            ProofTerm::DPlus(x, p, q) => write!(f, "(dplus {x} {p} {q})"),
        }
    }
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

fn pretty_term(t: &ProofTerm, indent: usize, out: &mut String) {
    let flat = t.to_string();
    if flat.len() + indent <= 72 {
        out.push_str(&flat);
        return;
    }
    let pad = " ".repeat(indent + 2);
    let (head, kids): (String, Vec<&ProofTerm>) = match t {
        ProofTerm::Ax(a) => (format!("ax {a}"), vec![]),
        ProofTerm::ImpR(p) => ("impR".into(), vec![p]),
        ProofTerm::ImpL(p, q) => ("impL".into(), vec![p, q]),
        ProofTerm::Ex(i, j, p) => (format!("ex {i} {j}"), vec![p]),
        ProofTerm::PlusL(a, p) => (format!("plusL {a}"), vec![p]),
        ProofTerm::PlusR(a, p) => (format!("plusR {a}"), vec![p]),
        ProofTerm::DPlus(x, p, q) => (format!("dplus {x}"), vec![p, q]),
    };
    out.push('(');
    out.push_str(&head);
    for k in kids {
        out.push('\n');
        out.push_str(&pad);
        pretty_term(k, indent + 2, out);
    }
    out.push(')');
}
