//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use malleq::bdt::Bdt;
use malleq::formula::OccPair;
use malleq::slicing::{Shape, Sliceable, Slicing};

pub fn eval(t: &Bdt, v: &BTreeMap<String, bool>) -> bool {
    match t {
        Bdt::Leaf(b) => *b,
        Bdt::Node(x, l, r) => {
            if v[x] {
                eval(r, v)
            } else {
                eval(l, v)
            }
        }
    }
}

fn vars(t: &Bdt, out: &mut BTreeSet<String>) {
    if let Bdt::Node(x, l, r) = t {
        out.insert(x.clone());
        vars(l, out);
        vars(r, out);
    }
}

/// Every valuation of `names`.
pub fn valuations(names: &BTreeSet<String>) -> Vec<BTreeMap<String, bool>> {
    let names: Vec<&String> = names.iter().collect();
    (0..1u64 << names.len())
        .map(|bits| {
            names
                .iter()
                .enumerate()
                .map(|(i, x)| ((*x).clone(), bits >> i & 1 == 1))
                .collect()
        })
        .collect()
}

/// Truth-table equivalence.
pub fn truth_table_equiv(t: &Bdt, u: &Bdt) -> bool {
    let mut names = BTreeSet::new();
    vars(t, &mut names);
    vars(u, &mut names);
    valuations(&names).iter().all(|v| eval(t, v) == eval(u, v))
}

pub fn negation(t: &Bdt) -> Bdt {
    match t {
        Bdt::Leaf(b) => Bdt::Leaf(!b),
        Bdt::Node(x, l, r) => Bdt::ite(x.clone(), negation(l), negation(r)),
    }
}

/// Set-valued slicing computed straight from the rule clauses.
pub fn explicit_slicing<P: Sliceable>(p: &P) -> Slicing {
    let mapped = |q: &P, emb: &[usize]| -> Slicing {
        explicit_slicing(q)
            .into_iter()
            .map(|s| {
                s.into_iter()
                    .map(|pr| OccPair::new(emb[pr.lo()], emb[pr.hi()]).unwrap())
                    .collect()
            })
            .collect()
    };
    match p.shape() {
        Shape::Axiom => [[OccPair::new(0, 1).unwrap()].into_iter().collect()]
            .into_iter()
            .collect(),
        Shape::Pass((q, emb)) => mapped(q, &emb),
        Shape::Split((l, el), (r, er)) => {
            let (ls, rs) = (mapped(l, &el), mapped(r, &er));
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
            let mut out = mapped(l, &el);
            out.extend(mapped(r, &er));
            out
        }
    }
}

/// Equivalence as equality of explicit slicings.
pub fn explicit_equiv<P: Sliceable>(p: &P, q: &P) -> bool {
    explicit_slicing(p) == explicit_slicing(q)
}
