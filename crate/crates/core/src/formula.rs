//! Formulas and sequents of the intuitionistic calculus, atom-occurrence
//! indexing and pair canonicalization.
//!
//! Occurrences are numbered `0..k` by a depth-first, left-to-right walk of the
//! context formulas in order and then the succedent. Every other module talks
//! about atoms of a sequent through these indices.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{is_atom_name, is_label, ParseError, Pos, Tok, Tokens};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Imp(Box<Formula>, Box<Formula>),
    Plus(String, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn imp(left: Formula, right: Formula) -> Self {
        Formula::Imp(Box::new(left), Box::new(right))
    }

    pub fn plus(label: impl Into<String>, left: Formula, right: Formula) -> Self {
        Formula::Plus(label.into(), Box::new(left), Box::new(right))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Imp(l, r) | Formula::Plus(_, l, r) => l.atom_count() + r.atom_count(),
        }
    }

    /// Atom names in occurrence order.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::Atom(a) => out.push(a),
            Formula::Imp(l, r) | Formula::Plus(_, l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Every ⊕ label in the formula, in left-to-right order.
    pub fn labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::Atom(_) => {}
            Formula::Imp(l, r) => {
                l.collect_labels(out);
                r.collect_labels(out);
            }
            Formula::Plus(x, l, r) => {
                l.collect_labels(out);
                out.push(x);
                r.collect_labels(out);
            }
        }
    }

    /// Labels of ⊕ nodes met with the given polarity (`true` = positive).
    fn polar_labels<'a>(&'a self, positive: bool, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::Atom(_) => {}
            Formula::Imp(l, r) => {
                l.polar_labels(!positive, out);
                r.polar_labels(positive, out);
            }
            Formula::Plus(x, l, r) => {
                if !positive {
                    out.insert(x);
                }
                l.polar_labels(positive, out);
                r.polar_labels(positive, out);
            }
        }
    }

    /// Renames ⊕ labels according to `f`; labels mapped to `None` are kept.
    pub fn relabel(&self, f: &impl Fn(&str) -> Option<String>) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.clone()),
            Formula::Imp(l, r) => Formula::imp(l.relabel(f), r.relabel(f)),
            Formula::Plus(x, l, r) => Formula::plus(
                f(x).unwrap_or_else(|| x.clone()),
                l.relabel(f),
                r.relabel(f),
            ),
        }
    }

    pub fn parse(text: &str) -> Result<Formula, ParseError> {
        let mut toks = Tokens::new(text)?;
        let f = parse_formula(&mut toks)?;
        toks.finish()?;
        Ok(f)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Imp(l, r) => write!(f, "({l} -o {r})"),
            Formula::Plus(x, l, r) => write!(f, "({l} +[{x}] {r})"),
        }
    }
}

pub(crate) fn parse_formula(toks: &mut Tokens) -> Result<Formula, ParseError> {
    let pos = toks.pos();
    match toks.next() {
        Some((Tok::Ident(name), p)) => {
            if is_atom_name(&name) {
                Ok(Formula::Atom(name))
            } else {
                Err(ParseError::new(p, format!("invalid atom name `{name}`")))
            }
        }
        Some((Tok::LParen, _)) => {
            let left = parse_formula(toks)?;
            let op_pos = toks.pos();
            let out = match toks.next() {
                Some((Tok::Lolli, _)) => Formula::imp(left, parse_formula(toks)?),
                Some((Tok::Plus, _)) => {
                    if toks.peek() != Some(&Tok::LBracket) {
                        return Err(ParseError::new(
                            op_pos,
                            "missing ⊕ label: expected `+[label]`",
                        ));
                    }
                    toks.next();
                    let (label, lp) = toks.ident("⊕ label")?;
                    if !is_label(&label) {
                        return Err(ParseError::new(lp, format!("invalid label `{label}`")));
                    }
                    toks.expect(Tok::RBracket)?;
                    Formula::plus(label, left, parse_formula(toks)?)
                }
                Some((t, p)) => {
                    return Err(ParseError::new(
                        p,
                        format!("expected `-o` or `+[`, found {t}"),
                    ))
                }
                None => return Err(ParseError::new(op_pos, "unexpected end of input")),
            };
            toks.expect(Tok::RParen)?;
            Ok(out)
        }
        Some((t, p)) => Err(ParseError::new(p, format!("expected a formula, found {t}"))),
        None => Err(ParseError::new(
            pos,
            "expected a formula, found end of input",
        )),
    }
}

/// Index of one atom occurrence in a fixed sequent.
pub type OccIndex = usize;

/// Unordered pair of distinct occurrences, stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccPair {
    lo: OccIndex,
    hi: OccIndex,
}

impl OccPair {
    /// `None` when `i == j`.
    pub fn new(i: OccIndex, j: OccIndex) -> Option<Self> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Some(OccPair { lo: i, hi: j }),
            std::cmp::Ordering::Greater => Some(OccPair { lo: j, hi: i }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lo(&self) -> OccIndex {
        self.lo
    }

    pub fn hi(&self) -> OccIndex {
        self.hi
    }

    pub fn contains(&self, i: OccIndex) -> bool {
        self.lo == i || self.hi == i
    }

    /// All pairs over `k` occurrences, ascending.
    pub fn all(k: usize) -> impl Iterator<Item = OccPair> {
        (0..k).flat_map(move |i| (i + 1..k).map(move |j| OccPair { lo: i, hi: j }))
    }

    /// Maps both ends through `f` (an injective reindexing).
    pub fn map(&self, f: impl Fn(OccIndex) -> OccIndex) -> OccPair {
        OccPair::new(f(self.lo), f(self.hi)).expect("reindexing must be injective")
    }
}

impl fmt::Display for OccPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lo, self.hi)
    }
}

/// Where an occurrence lives: context position (1-based) or the succedent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Place {
    Context(usize),
    Succedent,
}

/// Branch taken inside a binary connective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub index: OccIndex,
    pub atom: String,
    pub place: Place,
    pub path: Vec<Side>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub context: Vec<Formula>,
    pub succedent: Formula,
}

impl Sequent {
    pub fn new(context: Vec<Formula>, succedent: Formula) -> Self {
        Sequent { context, succedent }
    }

    pub fn atom_count(&self) -> usize {
        self.context.iter().map(Formula::atom_count).sum::<usize>() + self.succedent.atom_count()
    }

    /// First occurrence index of each context formula, followed by that of
    /// the succedent.
    pub fn offsets(&self) -> Vec<OccIndex> {
        let mut out = Vec::with_capacity(self.context.len() + 1);
        let mut at = 0;
        for f in &self.context {
            out.push(at);
            at += f.atom_count();
        }
        out.push(at);
        out
    }

    pub fn occurrences(&self) -> Vec<Occurrence> {
        fn walk(f: &Formula, place: Place, path: &mut Vec<Side>, out: &mut Vec<Occurrence>) {
            match f {
                Formula::Atom(a) => out.push(Occurrence {
                    index: out.len(),
                    atom: a.clone(),
                    place,
                    path: path.clone(),
                }),
                Formula::Imp(l, r) | Formula::Plus(_, l, r) => {
                    path.push(Side::Left);
                    walk(l, place, path, out);
                    path.pop();
                    path.push(Side::Right);
                    walk(r, place, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        let mut path = Vec::new();
        for (i, f) in self.context.iter().enumerate() {
            walk(f, Place::Context(i + 1), &mut path, &mut out);
        }
        walk(&self.succedent, Place::Succedent, &mut path, &mut out);
        out
    }

    /// Labels of ⊕ occurrences in negative position. These are the Boolean
    /// variables of the sequent.
    pub fn negative_plus_labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in &self.context {
            f.polar_labels(false, &mut out);
        }
        self.succedent.polar_labels(true, &mut out);
        out.into_iter().map(str::to_owned).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.context
            .iter()
            .chain(std::iter::once(&self.succedent))
            .flat_map(Formula::labels)
            .collect()
    }

    /// First ⊕ label occurring twice, if any.
    pub fn duplicate_label(&self) -> Option<String> {
        let mut seen = BTreeSet::new();
        self.labels()
            .into_iter()
            .find(|l| !seen.insert(*l))
            .map(str::to_owned)
    }

    /// Occurrence range of the formula at 1-based context position `pos`.
    pub fn context_range(&self, pos: usize) -> std::ops::Range<OccIndex> {
        let start: usize = self.context[..pos - 1]
            .iter()
            .map(Formula::atom_count)
            .sum();
        start..start + self.context[pos - 1].atom_count()
    }

    pub fn succedent_range(&self) -> std::ops::Range<OccIndex> {
        let k = self.atom_count();
        k - self.succedent.atom_count()..k
    }

    pub fn parse(text: &str) -> Result<Sequent, ParseError> {
        let mut toks = Tokens::new(text)?;
        let s = parse_sequent(&mut toks)?;
        toks.finish()?;
        Ok(s)
    }
}

pub(crate) fn parse_sequent(toks: &mut Tokens) -> Result<Sequent, ParseError> {
    let start = toks.pos();
    let mut context = Vec::new();
    if toks.peek() != Some(&Tok::Turnstile) {
        loop {
            context.push(parse_formula(toks)?);
            if toks.peek() == Some(&Tok::Comma) {
                toks.next();
            } else {
                break;
            }
        }
    }
    toks.expect(Tok::Turnstile)?;
    let succedent = parse_formula(toks)?;
    let s = Sequent { context, succedent };
    check_labels(&s, start)?;
    Ok(s)
}

fn check_labels(s: &Sequent, pos: Pos) -> Result<(), ParseError> {
    match s.duplicate_label() {
        Some(l) => Err(ParseError::new(
            pos,
            format!("⊕ label `{l}` occurs twice in the sequent"),
        )),
        None => Ok(()),
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.context.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        if !self.context.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "|- {}", self.succedent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(s: &Sequent) -> Vec<(usize, String)> {
        s.occurrences()
            .into_iter()
            .map(|o| (o.index, o.atom))
            .collect()
    }

    #[test]
    fn parses_atoms_and_connectives() {
        assert_eq!(Formula::parse("a").unwrap(), Formula::atom("a"));
        assert_eq!(
            Formula::parse("((a +[x] b) -o c)").unwrap(),
            Formula::imp(
                Formula::plus("x", Formula::atom("a"), Formula::atom("b")),
                Formula::atom("c")
            )
        );
        assert_eq!(
            Formula::parse("(a -o (b -o c))").unwrap(),
            Formula::imp(
                Formula::atom("a"),
                Formula::imp(Formula::atom("b"), Formula::atom("c"))
            )
        );
        assert_eq!(
            Formula::parse(" ( a +  [ x ]b ) ").unwrap(),
            Formula::plus("x", Formula::atom("a"), Formula::atom("b"))
        );
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = Formula::parse("(a + b)").unwrap_err();
        assert!(err.message.contains("missing ⊕ label"), "{err}");
        assert_eq!(err.pos, Pos { line: 1, col: 4 });
        assert!(Formula::parse("(a -o b").is_err());
        assert!(Formula::parse("A").is_err());
        assert!(Formula::parse("a b").is_err());
        assert!(Formula::parse("(a +[] b)").is_err());
    }

    #[test]
    fn sequent_occurrences() {
        let s = Sequent::parse("(a +[x] b) |- (a +[y] b)").unwrap();
        assert_eq!(
            atoms(&s),
            vec![
                (0, "a".into()),
                (1, "b".into()),
                (2, "a".into()),
                (3, "b".into())
            ]
        );
        assert_eq!(atoms(&Sequent::parse("a |- a").unwrap()).len(), 2);
        let chain = Sequent::parse("a, (a -o a), (a -o a), (a -o a) |- a").unwrap();
        let occ = chain.occurrences();
        assert_eq!(occ.len(), 8);
        assert_eq!(
            occ.iter().map(|o| o.index).collect::<Vec<_>>(),
            (0..8).collect::<Vec<_>>()
        );
        assert_eq!(occ[2].place, Place::Context(2));
        assert_eq!(occ[2].path, vec![Side::Right]);
        assert_eq!(occ[3].place, Place::Context(3));
        assert_eq!(occ[3].path, vec![Side::Left]);
        assert_eq!(occ[7].place, Place::Succedent);
        assert_eq!(chain.context_range(3), 3..5);
        assert_eq!(chain.succedent_range(), 7..8);
    }

    #[test]
    fn negative_labels_follow_polarity() {
        let labels = |t: &str| Sequent::parse(t).unwrap().negative_plus_labels();
        assert_eq!(labels("(a +[x] b) |- c"), ["x".to_string()].into());
        assert!(labels("a |- (a +[y] b)").is_empty());
        assert!(labels("((a +[x] b) -o c) |- d").is_empty());
        assert_eq!(labels("|- ((a +[x] b) -o c)"), ["x".to_string()].into());
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let err = Sequent::parse("(a +[x] b) |- (a +[x] b)").unwrap_err();
        assert!(err.message.contains("`x`"));
    }

    #[test]
    fn empty_context_round_trip() {
        let s = Sequent::parse("|- (a -o a)").unwrap();
        assert!(s.context.is_empty());
        assert_eq!(s.to_string(), "|- (a -o a)");
    }

    #[test]
    fn pair_canonicalization() {
        assert_eq!(OccPair::new(3, 1), OccPair::new(1, 3));
        assert_eq!(OccPair::new(2, 2), None);
        assert_eq!(OccPair::all(4).count(), 6);
        assert_eq!(OccPair::new(0, 5).unwrap().to_string(), "(0,5)");
    }
}
