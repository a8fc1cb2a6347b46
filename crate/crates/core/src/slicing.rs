//! Proof interpretations: explicit slicings (sets of sets of linked
//! occurrence pairs) and BDT slicings (one decision tree per pair).
//!
//! Both are computed from a rule-agnostic view of a proof node, [`Shape`],
//! so the intuitionistic and the one-sided calculus share one implementation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use thiserror::Error;

use crate::bdt::{Bdt, BdtError, Valuation, DEFAULT_ORACLE_BUDGET};
use crate::formula::{OccIndex, OccPair, Sequent};
use crate::proof::{Proof, Rule};

/// A premise together with its occurrence embedding into the conclusion.
pub type Premise<'a, P> = (&'a P, Vec<OccIndex>);

/// How a rule node acts on occurrence pairs.
pub enum Shape<'a, P> {
    /// Links occurrence 0 with occurrence 1.
    Axiom,
    /// Reindexes the premise (implication right, exchange, ⊕ right, ⅋).
    Pass(Premise<'a, P>),
    /// Juxtaposes two premises; pairs across them are unlinked
    /// (implication left, ⊗).
    Split(Premise<'a, P>, Premise<'a, P>),
    /// Superposes two premises under variable `label` (⊕ left, &).
    /// `a` and `b` are the conclusion occurrences of the two branch formulas.
    Branch {
        label: &'a str,
        left: Premise<'a, P>,
        right: Premise<'a, P>,
        a: Range<OccIndex>,
        b: Range<OccIndex>,
    },
}

/// A checked proof whose nodes can be viewed as [`Shape`]s.
pub trait Sliceable: Sized {
    type Conclusion: Clone + PartialEq + fmt::Display;

    fn conclusion(&self) -> &Self::Conclusion;
    fn atom_count(&self) -> usize;
    fn shape(&self) -> Shape<'_, Self>;
}

impl Sliceable for Proof {
    type Conclusion = Sequent;

    fn conclusion(&self) -> &Sequent {
        Proof::conclusion(self)
    }

    fn atom_count(&self) -> usize {
        Proof::conclusion(self).atom_count()
    }

    fn shape(&self) -> Shape<'_, Proof> {
        let emb = |slot| self.embedding(slot).expect("checked proof");
        match self.rule() {
            Rule::Ax(_) => Shape::Axiom,
            Rule::ImpR(p) | Rule::Ex(_, _, p) | Rule::PlusL(_, p) | Rule::PlusR(_, p) => {
                Shape::Pass((p, emb(0)))
            }
            Rule::ImpL(p, q) => Shape::Split((p, emb(0)), (q, emb(1))),
            Rule::DPlus(x, p, q) => {
                let concl = Proof::conclusion(self);
                let whole = concl.context_range(concl.context.len());
                let split = whole.start + p.conclusion().context.last().unwrap().atom_count();
                Shape::Branch {
                    label: x,
                    left: (p, emb(0)),
                    right: (q, emb(1)),
                    a: whole.start..split,
                    b: split..whole.end,
                }
            }
        }
    }
}

pub type Slice = BTreeSet<OccPair>;
pub type Slicing = BTreeSet<Slice>;

/// `{(i,j),(k,l)}`
pub fn show_slice(s: &Slice) -> String {
    let parts: Vec<String> = s.iter().map(OccPair::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

/// One slice per line.
pub fn show_slicing(s: &Slicing) -> String {
    s.iter().map(|sl| show_slice(sl) + "\n").collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlicingError {
    #[error("pair {pair} is out of range for a sequent with {atoms} atom occurrences")]
    InvalidPair { pair: OccPair, atoms: usize },
    #[error(transparent)]
    Bdt(#[from] BdtError),
}

fn inverse(emb: &[OccIndex], o: OccIndex) -> Option<OccIndex> {
    emb.iter().position(|&t| t == o)
}

fn preimage(emb: &[OccIndex], pr: OccPair) -> Option<OccPair> {
    OccPair::new(inverse(emb, pr.lo())?, inverse(emb, pr.hi())?)
}

/// The explicit slicing.
pub fn slicing<P: Sliceable>(p: &P) -> Slicing {
    let map_all = |s: Slicing, emb: &[OccIndex]| -> Slicing {
        s.into_iter()
            .map(|sl| sl.into_iter().map(|pr| pr.map(|o| emb[o])).collect())
            .collect()
    };
    match p.shape() {
        Shape::Axiom => [Slice::from([OccPair::new(0, 1).unwrap()])].into(),
        Shape::Pass((q, e)) => map_all(slicing(q), &e),
        Shape::Split((l, el), (r, er)) => {
            let ls = map_all(slicing(l), &el);
            let rs = map_all(slicing(r), &er);
            let mut out = Slicing::new();
            for a in &ls {
                for b in &rs {
                    out.insert(a.union(b).copied().collect());
                }
            }
            out
        }
        Shape::Branch {
            left: (l, el),
            right: (r, er),
            ..
        } => {
            let mut out = map_all(slicing(l), &el);
            out.extend(map_all(slicing(r), &er));
            out
        }
    }
}

/// Decision tree per occurrence pair; unstored pairs are the 0 leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BdtSlicing<C> {
    pub conclusion: C,
    pub atom_count: usize,
    entries: BTreeMap<OccPair, Arc<Bdt>>,
}

static ZERO: Bdt = Bdt::Leaf(false);

impl<C> BdtSlicing<C> {
    pub fn get(&self, pr: OccPair) -> &Bdt {
        self.entries.get(&pr).map(|t| &**t).unwrap_or(&ZERO)
    }

    /// Stored entries (everything that is not literally the 0 leaf).
    pub fn entries(&self) -> impl Iterator<Item = (OccPair, &Bdt)> {
        self.entries.iter().map(|(p, t)| (*p, &**t))
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in self.entries.values() {
            out.extend(t.variables());
        }
        out
    }
}

impl<C> fmt::Display for BdtSlicing<C> {
    /// `(i,j): tree` lines, skipping trees without a 1 leaf.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pr, t) in &self.entries {
            if t.has_one_leaf() {
                writeln!(f, "{pr}: {t}")?;
            }
        }
        Ok(())
    }
}

type PairMap = HashMap<OccPair, Arc<Bdt>>;

fn bdt_map<P: Sliceable>(p: &P) -> PairMap {
    let reindex = |m: PairMap, emb: &[OccIndex]| -> PairMap {
        m.into_iter()
            .map(|(pr, t)| (pr.map(|o| emb[o]), t))
            .collect()
    };
    match p.shape() {
        Shape::Axiom => [(OccPair::new(0, 1).unwrap(), Arc::new(Bdt::one()))].into(),
        Shape::Pass((q, e)) => reindex(bdt_map(q), &e),
        Shape::Split((l, el), (r, er)) => {
            let mut out = reindex(bdt_map(l), &el);
            out.extend(reindex(bdt_map(r), &er));
            out
        }
        Shape::Branch {
            label,
            left: (l, el),
            right: (r, er),
            a,
            b,
        } => {
            let lm = reindex(bdt_map(l), &el);
            let rm = reindex(bdt_map(r), &er);
            let zero = Arc::new(Bdt::zero());
            let pick =
                |m: &PairMap, pr: &OccPair| m.get(pr).cloned().unwrap_or_else(|| zero.clone());
            let mut out = PairMap::new();
            for pr in OccPair::all(p.atom_count()) {
                let in_a = a.contains(&pr.lo()) || a.contains(&pr.hi());
                let in_b = b.contains(&pr.lo()) || b.contains(&pr.hi());
                let t = match (in_a, in_b) {
                    (true, true) => continue,
                    (true, false) => Bdt::ite_shared(label, pick(&lm, &pr), zero.clone()),
                    (false, true) => Bdt::ite_shared(label, zero.clone(), pick(&rm, &pr)),
                    (false, false) => Bdt::ite_shared(label, pick(&lm, &pr), pick(&rm, &pr)),
                };
                out.insert(pr, Arc::new(t));
            }
            out
        }
    }
}

/// The BDT slicing, computed bottom-up over the whole proof.
pub fn bdt_slicing<P: Sliceable>(p: &P) -> BdtSlicing<P::Conclusion> {
    BdtSlicing {
        conclusion: p.conclusion().clone(),
        atom_count: p.atom_count(),
        entries: bdt_map(p)
            .into_iter()
            .filter(|(_, t)| **t != Bdt::Leaf(false))
            .collect(),
    }
}

/// The tree of a single pair, found by walking only the nodes that can
/// contribute to it.
pub fn bdt_slicing_pair<P: Sliceable>(p: &P, pr: OccPair) -> Result<Bdt, SlicingError> {
    if pr.hi() >= p.atom_count() {
        return Err(SlicingError::InvalidPair {
            pair: pr,
            atoms: p.atom_count(),
        });
    }
    Ok(pair_walk(p, pr))
}

fn pair_walk<P: Sliceable>(p: &P, pr: OccPair) -> Bdt {
    let through = |q: &P, emb: &[OccIndex]| match preimage(emb, pr) {
        Some(pp) => pair_walk(q, pp),
        None => Bdt::zero(),
    };
    match p.shape() {
        Shape::Axiom => Bdt::Leaf(pr == OccPair::new(0, 1).unwrap()),
        Shape::Pass((q, e)) => through(q, &e),
        Shape::Split((l, el), (r, er)) => {
            if preimage(&el, pr).is_some() {
                through(l, &el)
            } else {
                through(r, &er)
            }
        }
        Shape::Branch {
            label,
            left: (l, el),
            right: (r, er),
            a,
            b,
        } => {
            let in_a = a.contains(&pr.lo()) || a.contains(&pr.hi());
            let in_b = b.contains(&pr.lo()) || b.contains(&pr.hi());
            match (in_a, in_b) {
                (true, true) => Bdt::zero(),
                (true, false) => Bdt::ite(label, through(l, &el), Bdt::zero()),
                (false, true) => Bdt::ite(label, Bdt::zero(), through(r, &er)),
                (false, false) => Bdt::ite(label, through(l, &el), through(r, &er)),
            }
        }
    }
}

/// Pairs whose tree evaluates to 1 under `v`.
pub fn valuation_slice<C>(bs: &BdtSlicing<C>, v: &Valuation) -> Result<Slice, BdtError> {
    let mut out = Slice::new();
    for (pr, t) in bs.entries() {
        if t.eval(v)? {
            out.insert(pr);
        }
    }
    Ok(out)
}

/// All valuation slices, duplicates identified.
pub fn expand<C>(bs: &BdtSlicing<C>) -> Result<Slicing, BdtError> {
    expand_with_budget(bs, DEFAULT_ORACLE_BUDGET)
}

pub fn expand_with_budget<C>(bs: &BdtSlicing<C>, budget: usize) -> Result<Slicing, BdtError> {
    let vars: Vec<String> = bs.variables().into_iter().collect();
    if vars.len() > budget {
        return Err(BdtError::BudgetExceeded {
            found: vars.len(),
            budget,
        });
    }
    Valuation::enumerate(&vars)
        .map(|v| valuation_slice(bs, &v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdt::equiv;

    fn proof(text: &str) -> Proof {
        Proof::parse(text).unwrap()
    }

    fn pair(i: usize, j: usize) -> OccPair {
        OccPair::new(i, j).unwrap()
    }

    /// Proof of `(a +[x] b) |- (a +[y] b)` choosing the matching disjunct.
    fn two_slice_example() -> Proof {
        proof("(dplus x (plusL (a +[y] b) (ax a)) (plusR (a +[y] b) (ax b)))")
    }

    fn slicing_of(slices: &[&[(usize, usize)]]) -> Slicing {
        slices
            .iter()
            .map(|s| s.iter().map(|&(i, j)| pair(i, j)).collect())
            .collect()
    }

    #[test]
    fn axiom() {
        let p = proof("(ax a)");
        assert_eq!(slicing(&p), slicing_of(&[&[(0, 1)]]));
        let bs = bdt_slicing(&p);
        assert_eq!(bs.get(pair(0, 1)), &Bdt::one());
        assert_eq!(bs.entries().count(), 1);
    }

    #[test]
    fn two_slice_example_slicing() {
        let p = two_slice_example();
        assert_eq!(p.conclusion().to_string(), "(a +[x] b) |- (a +[y] b)");
        assert_eq!(slicing(&p), slicing_of(&[&[(0, 2)], &[(1, 3)]]));
    }

    #[test]
    fn two_slice_example_bdt_slicing() {
        let bs = bdt_slicing(&two_slice_example());
        assert_eq!(bs.get(pair(0, 2)).to_string(), "(x ? 1 : 0)");
        assert_eq!(bs.get(pair(1, 3)).to_string(), "(x ? 0 : 1)");
        assert_eq!(bs.get(pair(0, 1)), &Bdt::zero());
        for pr in OccPair::all(4) {
            assert_eq!(
                &bdt_slicing_pair(&two_slice_example(), pr).unwrap(),
                bs.get(pr)
            );
        }
        let v0 = Valuation::new().with("x", false);
        let v1 = Valuation::new().with("x", true);
        assert_eq!(
            valuation_slice(&bs, &v0).unwrap(),
            Slice::from([pair(0, 2)])
        );
        assert_eq!(
            valuation_slice(&bs, &v1).unwrap(),
            Slice::from([pair(1, 3)])
        );
        assert_eq!(expand(&bs).unwrap(), slicing(&two_slice_example()));
        assert_eq!(bs.to_string(), "(0,2): (x ? 1 : 0)\n(1,3): (x ? 0 : 1)\n");
    }

    fn pi0() -> Proof {
        proof("(impL (impL (impL (ax a) (ax a)) (ax a)) (ax a))")
    }

    #[test]
    fn chain_links() {
        let p = pi0();
        assert_eq!(
            p.conclusion().to_string(),
            "a, (a -o a), (a -o a), (a -o a) |- a"
        );
        let bs = bdt_slicing(&p);
        for pr in OccPair::all(8) {
            let linked = pr.hi() == pr.lo() + 1 && pr.lo() % 2 == 0;
            assert_eq!(bs.get(pr), &Bdt::Leaf(linked), "{pr}");
        }
        assert_eq!(expand(&bs).unwrap().len(), 1);
        assert_eq!(
            bdt_slicing_pair(&p, pair(3, 4)).unwrap(),
            Bdt::zero(),
            "cross pair of an implication left"
        );
        assert!(bdt_slicing_pair(&p, pair(3, 8)).is_err());
    }

    #[test]
    fn slices_multiply_under_implication_left() {
        // (a +[xi] a) |- a has two slices; three of them combined give eight.
        let sum = |x: &str| format!("(dplus {x} (ax a) (ax a))");
        let p = proof(&format!(
            "(impL (impL (impL {} {}) {}) {})",
            sum("x1"),
            sum("x2"),
            sum("x3"),
            "(ax a)"
        ));
        assert_eq!(slicing(&p).len(), 8);
        assert_eq!(expand(&bdt_slicing(&p)).unwrap(), slicing(&p));
    }

    #[test]
    fn nested_branches() {
        let p = proof(
            "(dplus y (dplus x (plusL (a +[z] a) (ax a)) (plusR (a +[z] a) (ax a))) (plusR (a +[z] a) (ax a)))",
        );
        let bs = bdt_slicing(&p);
        for t in bs.entries().map(|(_, t)| t) {
            assert!(t.is_free());
        }
        assert_eq!(expand(&bs).unwrap(), slicing(&p));
        for pr in OccPair::all(p.conclusion().atom_count()) {
            assert!(equiv(&bdt_slicing_pair(&p, pr).unwrap(), bs.get(pr)).unwrap());
        }
    }

    #[test]
    fn display_formats() {
        let s = slicing(&two_slice_example());
        assert_eq!(show_slicing(&s), "{(0,2)}\n{(1,3)}\n");
    }
}
