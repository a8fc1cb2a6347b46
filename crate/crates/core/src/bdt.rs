//! Free binary decision trees.
//!
//! `(x ? l : r)` tests `x`; the left subtree `l` is taken when `x = 0` and
//! the right subtree `r` when `x = 1`. Trees are free: no variable occurs
//! twice on a root-to-leaf path.
//!
//! Equivalence is decided without enumerating valuations: two free trees
//! differ iff some 1-leaf of one and some 0-leaf of the other sit on paths
//! that never test a shared variable in opposite directions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{is_label, ParseError, Tok, Tokens};

/// Largest variable count the brute-force oracles enumerate by default.
pub const DEFAULT_ORACLE_BUDGET: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BdtError {
    #[error("variable `{0}` appears twice on a root-to-leaf path")]
    NotFree(String),
    #[error("valuation does not assign variable `{0}`")]
    Unbound(String),
    #[error("{found} variables exceed the oracle budget of {budget}")]
    BudgetExceeded { found: usize, budget: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bdt {
    Leaf(bool),
    Node(String, Arc<Bdt>, Arc<Bdt>),
}

impl Bdt {
    pub fn zero() -> Self {
        Bdt::Leaf(false)
    }

    pub fn one() -> Self {
        Bdt::Leaf(true)
    }

    /// `(x ? left : right)`
    pub fn ite(x: impl Into<String>, left: Bdt, right: Bdt) -> Self {
        Bdt::Node(x.into(), Arc::new(left), Arc::new(right))
    }

    pub fn ite_shared(x: impl Into<String>, left: Arc<Bdt>, right: Arc<Bdt>) -> Self {
        Bdt::Node(x.into(), left, right)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Bdt::Leaf(_))
    }

    pub fn eval(&self, v: &Valuation) -> Result<bool, BdtError> {
        let mut cur = self;
        loop {
            match cur {
                Bdt::Leaf(b) => return Ok(*b),
                Bdt::Node(x, l, r) => {
                    cur = if v.get(x).ok_or_else(|| BdtError::Unbound(x.clone()))? {
                        r
                    } else {
                        l
                    };
                }
            }
        }
    }

    pub fn negate(&self) -> Bdt {
        match self {
            Bdt::Leaf(b) => Bdt::Leaf(!b),
            Bdt::Node(x, l, r) => Bdt::ite(x.clone(), l.negate(), r.negate()),
        }
    }

    pub fn is_free(&self) -> bool {
        self.first_repeat().is_none()
    }

    /// A variable repeated along some path, if any.
    pub fn first_repeat(&self) -> Option<String> {
        fn go<'a>(t: &'a Bdt, on_path: &mut Vec<&'a str>) -> Option<String> {
            match t {
                Bdt::Leaf(_) => None,
                Bdt::Node(x, l, r) => {
                    if on_path.contains(&x.as_str()) {
                        return Some(x.clone());
                    }
                    on_path.push(x);
                    let found = go(l, on_path).or_else(|| go(r, on_path));
                    on_path.pop();
                    found
                }
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn check_free(&self) -> Result<(), BdtError> {
        match self.first_repeat() {
            Some(x) => Err(BdtError::NotFree(x)),
            None => Ok(()),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        if let Bdt::Node(x, l, r) = self {
            if !out.contains(x) {
                out.insert(x.clone());
            }
            l.collect_vars(out);
            r.collect_vars(out);
        }
    }

    /// Variables in first-occurrence preorder.
    pub fn variables_preorder(&self) -> Vec<String> {
        fn go(t: &Bdt, out: &mut Vec<String>) {
            if let Bdt::Node(x, l, r) = t {
                if !out.contains(x) {
                    out.push(x.clone());
                }
                go(l, out);
                go(r, out);
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Internal nodes plus leaves.
    pub fn size(&self) -> usize {
        match self {
            Bdt::Leaf(_) => 1,
            Bdt::Node(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Bdt::Leaf(_) => 0,
            Bdt::Node(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn has_one_leaf(&self) -> bool {
        match self {
            Bdt::Leaf(b) => *b,
            Bdt::Node(_, l, r) => l.has_one_leaf() || r.has_one_leaf(),
        }
    }

    /// All leaves, depth-first left to right, with their root paths.
    pub fn leaves(&self) -> Vec<LeafPath> {
        fn go(t: &Bdt, steps: &mut Vec<(String, bool)>, out: &mut Vec<LeafPath>) {
            match t {
                Bdt::Leaf(b) => out.push(LeafPath {
                    value: *b,
                    steps: steps.clone(),
                }),
                Bdt::Node(x, l, r) => {
                    steps.push((x.clone(), false));
                    go(l, steps, out);
                    steps.last_mut().unwrap().1 = true;
                    go(r, steps, out);
                    steps.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// The subtree reached by following `path` (`false` = left).
    pub fn subtree(&self, path: &[bool]) -> Option<&Bdt> {
        let mut cur = self;
        for &right in path {
            match cur {
                Bdt::Leaf(_) => return None,
                Bdt::Node(_, l, r) => cur = if right { r } else { l },
            }
        }
        Some(cur)
    }

    /// Parses a tree and checks that it is free.
    pub fn parse(text: &str) -> Result<Bdt, ParseError> {
        let t = Bdt::parse_any(text)?;
        match t.first_repeat() {
            Some(x) => Err(ParseError::new(
                Default::default(),
                format!("tree is not free: variable `{x}` repeats on a path"),
            )),
            None => Ok(t),
        }
    }

    /// Parses a tree without the freeness check.
    pub fn parse_any(text: &str) -> Result<Bdt, ParseError> {
        let mut toks = Tokens::new(text)?;
        let t = parse_bdt(&mut toks)?;
        toks.finish()?;
        Ok(t)
    }
}

fn parse_bdt(toks: &mut Tokens) -> Result<Bdt, ParseError> {
    let pos = toks.pos();
    match toks.next() {
        Some((Tok::Ident(s), _)) if s == "0" => Ok(Bdt::zero()),
        Some((Tok::Ident(s), _)) if s == "1" => Ok(Bdt::one()),
        Some((Tok::LParen, _)) => {
            let (x, xp) = toks.ident("a variable")?;
            if !is_label(&x) {
                return Err(ParseError::new(xp, format!("invalid variable `{x}`")));
            }
            toks.expect(Tok::Question)?;
            let l = parse_bdt(toks)?;
            toks.expect(Tok::Colon)?;
            let r = parse_bdt(toks)?;
            toks.expect(Tok::RParen)?;
            Ok(Bdt::ite(x, l, r))
        }
        Some((t, p)) => Err(ParseError::new(
            p,
            format!("expected `0`, `1` or `(`, found {t}"),
        )),
        None => Err(ParseError::new(pos, "expected a tree, found end of input")),
    }
}

impl fmt::Display for Bdt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bdt::Leaf(b) => write!(f, "{}", u8::from(*b)),
            Bdt::Node(x, l, r) => write!(f, "({x} ? {l} : {r})"),
        }
    }
}

/// Total assignment of Boolean values to a finite set of variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(BTreeMap<String, bool>);

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn get(&self, x: &str) -> Option<bool> {
        self.0.get(x).copied()
    }

    pub fn set(&mut self, x: impl Into<String>, b: bool) {
        self.0.insert(x.into(), b);
    }

    pub fn with(mut self, x: impl Into<String>, b: bool) -> Self {
        self.set(x, b);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Every valuation of `vars`, in binary counting order with the first
    /// variable as the least significant bit.
    pub fn enumerate(vars: &[String]) -> impl Iterator<Item = Valuation> + '_ {
        (0u64..1u64 << vars.len()).map(move |bits| {
            Valuation(
                vars.iter()
                    .enumerate()
                    .map(|(i, x)| (x.clone(), bits >> i & 1 == 1))
                    .collect(),
            )
        })
    }
}

impl FromIterator<(String, bool)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (String, bool)>>(iter: I) -> Self {
        Valuation(iter.into_iter().collect())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(x, b)| format!("{x}={}", u8::from(*b)))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A leaf together with the tests made on the way down to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafPath {
    pub value: bool,
    /// `(variable, branch)` pairs from the root; `true` = right branch.
    pub steps: Vec<(String, bool)>,
}

impl fmt::Display for LeafPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let steps: Vec<String> = self
            .steps
            .iter()
            .map(|(x, b)| format!("{x}={}", u8::from(*b)))
            .collect();
        write!(f, "{} [{}]", u8::from(self.value), steps.join(", "))
    }
}

/// No variable is tested on both paths with opposite outcomes.
pub fn compatible(p: &LeafPath, q: &LeafPath) -> bool {
    p.steps
        .iter()
        .all(|(x, b)| q.steps.iter().all(|(y, c)| x != y || b == c))
}

/// Leaf paths packed as bitsets over a shared variable numbering.
struct PackedLeaves {
    paths: Vec<LeafPath>,
    tested: Vec<Vec<u64>>,
    taken: Vec<Vec<u64>>,
}

impl PackedLeaves {
    fn new(t: &Bdt, ids: &HashMap<String, usize>, words: usize) -> Self {
        let paths = t.leaves();
        let mut tested = Vec::with_capacity(paths.len());
        let mut taken = Vec::with_capacity(paths.len());
        for p in &paths {
            let mut m = vec![0u64; words];
            let mut v = vec![0u64; words];
            for (x, b) in &p.steps {
                let id = ids[x];
                m[id / 64] |= 1 << (id % 64);
                if *b {
                    v[id / 64] |= 1 << (id % 64);
                }
            }
            tested.push(m);
            taken.push(v);
        }
        PackedLeaves {
            paths,
            tested,
            taken,
        }
    }

    fn compatible(&self, i: usize, other: &PackedLeaves, j: usize) -> bool {
        self.tested[i]
            .iter()
            .zip(&other.tested[j])
            .zip(self.taken[i].iter().zip(&other.taken[j]))
            .all(|((m1, m2), (v1, v2))| m1 & m2 & (v1 ^ v2) == 0)
    }
}

/// Returns the first compatible pair of leaves with different values, in
/// depth-first order of `t1` then `t2`; `None` when the trees are equivalent.
pub fn equiv_witness(t1: &Bdt, t2: &Bdt) -> Result<Option<(LeafPath, LeafPath)>, BdtError> {
    t1.check_free()?;
    t2.check_free()?;
    if let (Bdt::Leaf(a), Bdt::Leaf(b)) = (t1, t2) {
        return Ok((a != b).then(|| (t1.leaves().remove(0), t2.leaves().remove(0))));
    }
    let mut ids = HashMap::new();
    for x in t1.variables().into_iter().chain(t2.variables()) {
        let n = ids.len();
        ids.entry(x).or_insert(n);
    }
    let words = ids.len().div_ceil(64).max(1);
    let a = PackedLeaves::new(t1, &ids, words);
    let b = PackedLeaves::new(t2, &ids, words);
    for i in 0..a.paths.len() {
        for j in 0..b.paths.len() {
            if a.paths[i].value != b.paths[j].value && a.compatible(i, &b, j) {
                return Ok(Some((a.paths[i].clone(), b.paths[j].clone())));
            }
        }
    }
    Ok(None)
}

pub fn equiv(t1: &Bdt, t2: &Bdt) -> Result<bool, BdtError> {
    Ok(equiv_witness(t1, t2)?.is_none())
}

/// Truth-table comparison over the union of both trees' variables.
pub fn equiv_oracle(t1: &Bdt, t2: &Bdt) -> Result<bool, BdtError> {
    equiv_oracle_with_budget(t1, t2, DEFAULT_ORACLE_BUDGET)
}

pub fn equiv_oracle_with_budget(t1: &Bdt, t2: &Bdt, budget: usize) -> Result<bool, BdtError> {
    let mut vars = t1.variables();
    vars.extend(t2.variables());
    if vars.len() > budget {
        return Err(BdtError::BudgetExceeded {
            found: vars.len(),
            budget,
        });
    }
    let vars: Vec<String> = vars.into_iter().collect();
    for v in Valuation::enumerate(&vars) {
        if t1.eval(&v)? != t2.eval(&v)? {
            return Ok(false);
        }
    }
    Ok(true)
}
