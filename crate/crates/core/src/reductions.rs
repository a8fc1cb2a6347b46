//! Order between vertices of a line graph (ORD), and its two gadget
//! reductions: to proof equivalence and to BDT equivalence.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::bdt::Bdt;
use crate::proof::Proof;
use crate::syntax::{ParseError, Tok, Tokens};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("not a line: {0}")]
    NotALine(String),
    #[error("vertex `{0}` is not in the graph")]
    UnknownVertex(String),
    #[error("f and s must be different vertices")]
    SameVertex,
    #[error("gadget precondition violated: {0}")]
    Precondition(String),
    #[error("vertex name `{0}` collides with a gadget variable")]
    ReservedName(String),
}

/// A validated directed line. Vertices are kept in line order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineGraph {
    order: Vec<String>,
}

impl LineGraph {
    /// Validates `edges` as a line: connected, in/out-degree 1 everywhere
    /// except one begin vertex (in-degree 0) and one exit (out-degree 0).
    pub fn from_edges(edges: &[(String, String)]) -> Result<Self, ReductionError> {
        if edges.is_empty() {
            return Err(ReductionError::NotALine("no edges".into()));
        }
        let mut succ: HashMap<&str, &str> = HashMap::new();
        let mut pred: HashMap<&str, &str> = HashMap::new();
        let mut vertices = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(ReductionError::NotALine(format!("self-loop on `{u}`")));
            }
            if succ.insert(u, v).is_some() {
                return Err(ReductionError::NotALine(format!(
                    "`{u}` has out-degree above 1"
                )));
            }
            if pred.insert(v, u).is_some() {
                return Err(ReductionError::NotALine(format!(
                    "`{v}` has in-degree above 1"
                )));
            }
            vertices.insert(u.as_str());
            vertices.insert(v.as_str());
        }
        let begins: Vec<&str> = vertices
            .iter()
            .copied()
            .filter(|v| !pred.contains_key(v))
            .collect();
        let [begin] = begins[..] else {
            return Err(ReductionError::NotALine(format!(
                "{} vertices have in-degree 0",
                begins.len()
            )));
        };
        let mut order = vec![begin.to_string()];
        let mut cur = begin;
        while let Some(&next) = succ.get(cur) {
            order.push(next.to_string());
            cur = next;
        }
        if order.len() != vertices.len() {
            return Err(ReductionError::NotALine("graph is not connected".into()));
        }
        Ok(LineGraph { order })
    }

    /// A line through `vertices` in the given order.
    pub fn from_order(vertices: &[String]) -> Result<Self, ReductionError> {
        let edges: Vec<(String, String)> = vertices
            .windows(2)
            .map(|w| (w[0].clone(), w[1].clone()))
            .collect();
        LineGraph::from_edges(&edges)
    }

    /// One `u -> v` edge per line.
    pub fn parse(text: &str) -> Result<Self, ReductionError> {
        let mut toks = Tokens::new(text)?;
        let mut edges = Vec::new();
        while !toks.is_done() {
            let (u, _) = toks.ident("a vertex")?;
            toks.expect(Tok::Arrow)?;
            let (v, _) = toks.ident("a vertex")?;
            edges.push((u, v));
        }
        LineGraph::from_edges(&edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn begin(&self) -> &str {
        &self.order[0]
    }

    pub fn exit(&self) -> &str {
        self.order.last().unwrap()
    }

    pub fn position(&self, v: &str) -> Option<usize> {
        self.order.iter().position(|w| w == v)
    }
}

impl fmt::Display for LineGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in self.order.windows(2) {
            writeln!(f, "{} -> {}", w[0], w[1])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdInstance {
    pub graph: LineGraph,
    pub f: String,
    pub s: String,
}

impl OrdInstance {
    pub fn new(
        graph: LineGraph,
        f: impl Into<String>,
        s: impl Into<String>,
    ) -> Result<Self, ReductionError> {
        let (f, s) = (f.into(), s.into());
        for v in [&f, &s] {
            if graph.position(v).is_none() {
                return Err(ReductionError::UnknownVertex(v.clone()));
            }
        }
        if f == s {
            return Err(ReductionError::SameVertex);
        }
        Ok(OrdInstance { graph, f, s })
    }
}

/// Walks the line from its begin vertex: is `f` met strictly before `s`?
pub fn ord_solve(inst: &OrdInstance) -> bool {
    for v in inst.graph.vertices() {
        if *v == inst.f {
            return true;
        }
        if *v == inst.s {
            return false;
        }
    }
    unreachable!("f and s are vertices of the line")
}

/// `a, (a -o a), (a -o a), (a -o a) |- a`
pub fn chain_proof() -> Proof {
    let ax = || Proof::ax("a").unwrap();
    let p = Proof::imp_l(ax(), ax()).unwrap();
    let p = Proof::imp_l(p, ax()).unwrap();
    Proof::imp_l(p, ax()).unwrap()
}

/// The chain proof followed by `ex 2 3` then `ex 3 4`.
pub fn reference_proof() -> Proof {
    let p = Proof::ex(2, 3, chain_proof()).unwrap();
    Proof::ex(3, 4, p).unwrap()
}

/// `(gadget proof, reference proof)`: equivalent iff `f` comes before `s`.
pub fn ord_to_proof_pair(inst: &OrdInstance) -> Result<(Proof, Proof), ReductionError> {
    let g = &inst.graph;
    if g.begin() == inst.f || g.begin() == inst.s {
        return Err(ReductionError::Precondition(
            "the begin vertex must differ from f and s".into(),
        ));
    }
    let mut cur = chain_proof();
    for v in &g.vertices()[1..] {
        cur = if *v == inst.f {
            Proof::ex(2, 3, cur)
        } else if *v == inst.s {
            Proof::ex(3, 4, cur)
        } else {
            Proof::ex(1, 2, cur).and_then(|p| Proof::ex(1, 2, p))
        }
        .expect("exchanges are within the four-formula context");
    }
    Ok((cur, reference_proof()))
}

/// Names of the two top gadget variables.
pub const GADGET_VARS: [&str; 2] = ["x", "y"];

fn sigma_f(c: usize) -> usize {
    c % 3 + 1
}

fn sigma_s(c: usize) -> usize {
    match c {
        1 => 2,
        2 => 1,
        c => c,
    }
}

fn copy_tree(inst: &OrdInstance, copy: usize, rewired: bool) -> Bdt {
    let g = &inst.graph;
    let mut c = copy;
    let mut path = Vec::new();
    for v in &g.vertices()[..g.len() - 1] {
        path.push(v.clone());
        if rewired && *v == inst.f {
            c = sigma_f(c);
        } else if rewired && *v == inst.s {
            c = sigma_s(c);
        }
    }
    path.into_iter()
        .rev()
        .fold(Bdt::Leaf(c == 1), |acc, v| Bdt::ite(v, acc, Bdt::one()))
}

/// `(rewired, plain)` trees: equivalent iff `f` comes before `s`.
pub fn ord_to_bdt_pair(inst: &OrdInstance) -> Result<(Bdt, Bdt), ReductionError> {
    let g = &inst.graph;
    for end in [g.begin(), g.exit()] {
        if end == inst.f || end == inst.s {
            return Err(ReductionError::Precondition(
                "the begin and exit vertices must differ from f and s".into(),
            ));
        }
    }
    if let Some(v) = g
        .vertices()
        .iter()
        .find(|v| GADGET_VARS.contains(&v.as_str()))
    {
        return Err(ReductionError::ReservedName(v.clone()));
    }
    let build = |rewired| {
        let [c1, c2, c3] = [1, 2, 3].map(|c| copy_tree(inst, c, rewired));
        Bdt::ite(GADGET_VARS[0], c3, Bdt::ite(GADGET_VARS[1], c2, c1))
    };
    Ok((build(true), build(false)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdt::{equiv, equiv_oracle};
    use crate::equiv::{proof_equiv, proof_equiv_oracle};
    use crate::formula::OccPair;
    use crate::slicing::bdt_slicing;

    fn line(names: &[&str]) -> LineGraph {
        LineGraph::from_order(&names.iter().map(|s| s.to_string()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn parsing_and_validation() {
        let g = LineGraph::parse("c -> d\na -> b\nb -> c\n").unwrap();
        assert_eq!(g.vertices(), ["a", "b", "c", "d"]);
        assert_eq!(g.to_string(), "a -> b\nb -> c\nc -> d\n");
        assert!(LineGraph::parse("a -> b\na -> c").is_err());
        assert!(LineGraph::parse("a -> b\nc -> b").is_err());
        assert!(LineGraph::parse("a -> b\nb -> a").is_err());
        assert!(LineGraph::parse("a -> b\nc -> d").is_err());
        assert!(LineGraph::parse("a -> b\nc -> d\nd -> c").is_err());
        assert!(LineGraph::parse("").is_err());
        assert!(matches!(
            LineGraph::parse("a -> "),
            Err(ReductionError::Parse(_))
        ));
    }

    #[test]
    fn solving() {
        let g = line(&["a", "b", "c", "d"]);
        assert!(ord_solve(&OrdInstance::new(g.clone(), "b", "c").unwrap()));
        assert!(!ord_solve(&OrdInstance::new(g.clone(), "c", "b").unwrap()));
        assert!(OrdInstance::new(g.clone(), "b", "b").is_err());
        assert!(OrdInstance::new(g, "b", "z").is_err());
    }

    #[test]
    fn chain_links() {
        let bs = bdt_slicing(&chain_proof());
        let linked: Vec<OccPair> = bs.entries().map(|(p, _)| p).collect();
        let expected: Vec<OccPair> = [(0, 1), (2, 3), (4, 5), (6, 7)]
            .iter()
            .map(|&(i, j)| OccPair::new(i, j).unwrap())
            .collect();
        assert_eq!(linked, expected);
    }

    #[test]
    fn proof_gadget() {
        let yes = OrdInstance::new(line(&["b", "f", "s"]), "f", "s").unwrap();
        let (p, r) = ord_to_proof_pair(&yes).unwrap();
        assert!(proof_equiv(&p, &r).unwrap().equivalent);
        let no = OrdInstance::new(line(&["b", "s", "f"]), "f", "s").unwrap();
        let (p, r) = ord_to_proof_pair(&no).unwrap();
        assert!(!proof_equiv(&p, &r).unwrap().equivalent);
        assert!(!proof_equiv_oracle(&p, &r).unwrap());
        let bad = OrdInstance::new(line(&["f", "s", "e"]), "f", "s").unwrap();
        assert!(ord_to_proof_pair(&bad).is_err());
    }

    #[test]
    fn bdt_gadget() {
        let yes = OrdInstance::new(line(&["b", "f", "s", "e"]), "f", "s").unwrap();
        let (r, n) = ord_to_bdt_pair(&yes).unwrap();
        assert!(r.is_free() && n.is_free());
        assert!(equiv(&r, &n).unwrap());
        assert!(equiv_oracle(&r, &n).unwrap());
        let no = OrdInstance::new(line(&["b", "s", "f", "e"]), "f", "s").unwrap();
        let (r, n) = ord_to_bdt_pair(&no).unwrap();
        assert!(!equiv(&r, &n).unwrap());
        assert!(!equiv_oracle(&r, &n).unwrap());
        let reserved = OrdInstance::new(line(&["b", "f", "s", "x"]), "f", "s").unwrap();
        assert_eq!(
            ord_to_bdt_pair(&reserved),
            Err(ReductionError::ReservedName("x".into()))
        );
        let at_exit = OrdInstance::new(line(&["b", "f", "s"]), "f", "s").unwrap();
        assert!(ord_to_bdt_pair(&at_exit).is_err());
    }

    #[test]
    fn plain_tree_shape() {
        let inst = OrdInstance::new(line(&["b", "f", "s", "e"]), "f", "s").unwrap();
        let (_, n) = ord_to_bdt_pair(&inst).unwrap();
        let copy = |v: u8| format!("(b ? (f ? (s ? {v} : 1) : 1) : 1)");
        assert_eq!(
            n.to_string(),
            format!("(x ? {} : (y ? {} : {}))", copy(0), copy(0), copy(1))
        );
    }
}
