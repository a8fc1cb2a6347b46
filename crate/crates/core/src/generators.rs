//! Seeded instance generators for the property suites.
//!
//! Every generator seeds a `Xoshiro256PlusPlus` stream with
//! `seed_from_u64(cfg.seed)` and consumes it in a fixed order, so a given
//! [`GenConfig`] always yields the same output.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, RngExt, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::bdt::{self, Bdt};
use crate::classical::{search_proof, MallFormula, MallProof, MallRule, MallSequent};
use crate::encode::{encode_bdt, Encoding};
use crate::proof::{NodePath, Proof};
use crate::reductions::{LineGraph, OrdInstance};
use crate::rewrite::{self, Rewrite};

pub type GenRng = Xoshiro256PlusPlus;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub var_budget: usize,
    pub depth_budget: usize,
    pub mutation_count: usize,
}

impl GenConfig {
    pub fn new(seed: u64) -> Self {
        GenConfig {
            seed,
            var_budget: 4,
            depth_budget: 4,
            mutation_count: 3,
        }
    }

    pub fn vars(mut self, n: usize) -> Self {
        self.var_budget = n;
        self
    }

    pub fn depth(mut self, d: usize) -> Self {
        self.depth_budget = d;
        self
    }

    pub fn mutations(mut self, m: usize) -> Self {
        self.mutation_count = m;
        self
    }

    pub fn rng(&self) -> GenRng {
        GenRng::seed_from_u64(self.seed)
    }
}

pub fn var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// A free tree over `x1..x{var_budget}` of depth at most `depth_budget`.
pub fn random_free_bdt(cfg: &GenConfig) -> Bdt {
    let mut rng = cfg.rng();
    random_free_bdt_with(&mut rng, &var_names(cfg.var_budget), cfg.depth_budget)
}

pub fn random_free_bdt_with<R: Rng + ?Sized>(rng: &mut R, vars: &[String], depth: usize) -> Bdt {
    let mut avail: Vec<String> = vars.to_vec();
    grow(rng, &mut avail, depth, true)
}

fn grow<R: Rng + ?Sized>(rng: &mut R, avail: &mut Vec<String>, depth: usize, root: bool) -> Bdt {
    // The root is always a test when possible, so trees are rarely trivial.
    let stop = depth == 0 || avail.is_empty() || (!root && rng.random_bool(0.3));
    if stop {
        return Bdt::Leaf(rng.random_bool(0.5));
    }
    let k = rng.random_range(0..avail.len());
    let x = avail.swap_remove(k);
    let l = grow(rng, avail, depth - 1, false);
    let r = grow(rng, avail, depth - 1, false);
    avail.push(x.clone());
    let last = avail.len() - 1;
    avail.swap(k, last);
    Bdt::ite(x, l, r)
}

fn replace_subtree(t: &Bdt, path: &[bool], f: &mut impl FnMut(&Bdt) -> Bdt) -> Bdt {
    match (path.split_first(), t) {
        (None, _) => f(t),
        (Some((&right, rest)), Bdt::Node(x, l, r)) => {
            if right {
                Bdt::ite(x.clone(), (**l).clone(), replace_subtree(r, rest, f))
            } else {
                Bdt::ite(x.clone(), replace_subtree(l, rest, f), (**r).clone())
            }
        }
        (Some(_), Bdt::Leaf(_)) => t.clone(),
    }
}

fn node_paths(
    t: &Bdt,
    cur: &mut Vec<bool>,
    out: &mut Vec<(Vec<bool>, BTreeSet<String>)>,
    above: &mut BTreeSet<String>,
) {
    out.push((cur.clone(), above.clone()));
    if let Bdt::Node(x, l, r) = t {
        above.insert(x.clone());
        cur.push(false);
        node_paths(l, cur, out, above);
        cur.pop();
        cur.push(true);
        node_paths(r, cur, out, above);
        cur.pop();
        above.remove(x);
    }
}

/// Applies one random equivalence-preserving tree rewrite: splitting a leaf
/// on an untested variable, collapsing a redundant test, or exchanging two
/// stacked tests of the same variable pair.
pub fn rewrite_bdt<R: Rng + ?Sized>(rng: &mut R, t: &Bdt, vars: &[String]) -> Bdt {
    let mut spots = Vec::new();
    node_paths(t, &mut Vec::new(), &mut spots, &mut BTreeSet::new());
    let (path, above) = spots.choose(rng).expect("a tree has a root").clone();
    let node = t.subtree(&path).expect("path from the tree");
    let new = match node {
        Bdt::Leaf(_) => {
            let fresh: Vec<&String> = vars.iter().filter(|v| !above.contains(*v)).collect();
            match fresh.choose(rng) {
                Some(z) => Bdt::ite((*z).clone(), node.clone(), node.clone()),
                None => return t.clone(),
            }
        }
        Bdt::Node(x, l, r) => match (&**l, &**r) {
            _ if l == r => (**l).clone(),
            (Bdt::Node(y, a, b), Bdt::Node(y2, c, d)) if y == y2 => Bdt::ite(
                y.clone(),
                Bdt::ite_shared(x.clone(), a.clone(), c.clone()),
                Bdt::ite_shared(x.clone(), b.clone(), d.clone()),
            ),
            _ => return t.clone(),
        },
    };
    replace_subtree(t, &path, &mut |_| new.clone())
}

/// Negates one random leaf.
pub fn flip_leaf<R: Rng + ?Sized>(rng: &mut R, t: &Bdt) -> Bdt {
    let leaves = t.leaves();
    let target = leaves.choose(rng).expect("a tree has a leaf");
    let path: Vec<bool> = target.steps.iter().map(|(_, b)| *b).collect();
    replace_subtree(t, &path, &mut |l| l.negate())
}

/// A pair of free trees: independent, rewritten-equivalent, or rewritten
/// with one leaf flipped, each with probability one third.
pub fn bdt_pair(cfg: &GenConfig) -> (Bdt, Bdt) {
    let mut rng = cfg.rng();
    let vars = var_names(cfg.var_budget);
    let t = random_free_bdt_with(&mut rng, &vars, cfg.depth_budget);
    let kind = rng.random_range(0..3);
    if kind == 0 {
        let u = random_free_bdt_with(&mut rng, &vars, cfg.depth_budget);
        return (t, u);
    }
    let mut u = t.clone();
    for _ in 0..cfg.mutation_count.max(1) {
        u = rewrite_bdt(&mut rng, &u, &vars);
    }
    if kind == 2 {
        u = flip_leaf(&mut rng, &u);
    }
    (t, u)
}

/// Every node path of `p`, in preorder.
pub fn proof_paths(p: &Proof) -> Vec<NodePath> {
    fn go(p: &Proof, cur: NodePath, out: &mut Vec<NodePath>) {
        out.push(cur.clone());
        for (slot, q) in p.premises().into_iter().enumerate() {
            go(q, cur.child(slot), out);
        }
    }
    let mut out = Vec::new();
    go(p, NodePath::root(), &mut out);
    out
}

/// One random equivalence-preserving rewrite: a structural permutation if
/// one applies (with probability 3/4), otherwise an identity exchange.
pub fn mutate<R: Rng + ?Sized>(rng: &mut R, p: &Proof) -> Proof {
    let sites = rewrite::sites(p);
    if !sites.is_empty() && rng.random_bool(0.75) {
        let (path, rw) = sites.choose(rng).unwrap();
        return rewrite::apply(p, path, *rw).expect("site reported as applicable");
    }
    let paths: Vec<NodePath> = proof_paths(p)
        .into_iter()
        .filter(|q| p.at(q).unwrap().conclusion().context.len() >= 2)
        .collect();
    let Some(path) = paths.choose(rng) else {
        return p.clone();
    };
    let m = p.at(path).unwrap().conclusion().context.len();
    let i = rng.random_range(1..=m);
    let mut j = rng.random_range(1..m);
    if j >= i {
        j += 1;
    }
    rewrite::apply(p, path, Rewrite::IdentityExchange(i, j))
        .expect("identity exchange always applies")
}

/// Which proof an [`equivalent_pair`] starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Template {
    /// The encoding of a random tree.
    Encoding,
    /// `impL (ax w) D` for the ⊕ left rule `D` at a random encoding site.
    Distribute,
    /// `impR (ex m-1 m D)` for such a `D`.
    Intro,
}

/// A base proof and its mutated copy, with the expected verdict.
#[derive(Debug, Clone)]
pub struct ProofPair {
    pub left: Proof,
    pub right: Proof,
    pub expected: bool,
    pub template: Template,
    pub tree: Bdt,
    pub injected: bool,
}

/// Builds a base proof, then either applies `mutation_count` equivalence-
/// preserving rewrites (expected `true`) or swaps the branches of one ⊕ left
/// rule and then mutates. In the swap case the expected verdict is decided on
/// the tree side: swapping the branches at a tree node is equivalent iff the
/// two subtrees are.
pub fn equivalent_pair(cfg: &GenConfig) -> (Proof, Proof, bool) {
    let pp = proof_pair(cfg);
    (pp.left, pp.right, pp.expected)
}

pub fn proof_pair(cfg: &GenConfig) -> ProofPair {
    let mut rng = cfg.rng();
    let n = cfg.var_budget;
    let vars = var_names(n);
    let tree = random_free_bdt_with(&mut rng, &vars, cfg.depth_budget.min(n));
    let enc = encode_bdt(n, &tree).expect("tree over the first n variables");
    let template = if enc.sites.is_empty() {
        Template::Encoding
    } else {
        *[Template::Encoding, Template::Distribute, Template::Intro]
            .choose(&mut rng)
            .unwrap()
    };
    let site = if enc.sites.is_empty() {
        None
    } else {
        Some(rng.random_range(0..enc.sites.len()))
    };
    let (base, swap_at) = build_template(&enc, template, site);
    if cfg.mutation_count == 0 {
        return ProofPair {
            right: base.clone(),
            left: base,
            expected: true,
            template,
            tree,
            injected: false,
        };
    }
    let inject = swap_at.is_some() && rng.random_bool(0.5);
    let mut right = base.clone();
    let mut expected = true;
    if inject {
        let (tree_path, proof_path) = swap_at.unwrap();
        right = rewrite::swap_dplus_branches(&right, &proof_path)
            .expect("encoding site is a ⊕ left rule");
        let Some(Bdt::Node(_, l, r)) = tree.subtree(&tree_path) else {
            unreachable!("sites are internal nodes")
        };
        expected = bdt::equiv(l, r).expect("subtrees of a free tree are free");
    }
    for _ in 0..cfg.mutation_count {
        right = mutate(&mut rng, &right);
    }
    ProofPair {
        left: base,
        right,
        expected,
        template,
        tree,
        injected: inject,
    }
}

fn build_template(
    enc: &Encoding,
    template: Template,
    site: Option<usize>,
) -> (Proof, Option<(Vec<bool>, NodePath)>) {
    let Some(k) = site else {
        return (enc.proof.clone(), None);
    };
    let (tree_path, proof_path) = enc.sites[k].clone();
    if template == Template::Encoding {
        return (enc.proof.clone(), Some((tree_path, proof_path)));
    }
    let d = enc.proof.at(&proof_path).expect("site path").clone();
    match template {
        Template::Distribute => {
            let p = Proof::imp_l(Proof::ax("w").unwrap(), d)
                .expect("any formula accepts an implication");
            (p, Some((tree_path, NodePath(vec![1]))))
        }
        _ => {
            let m = d.conclusion().context.len();
            let p = Proof::imp_r(Proof::ex(m - 1, m, d).expect("⊕ rule has a context"))
                .expect("nonempty context");
            (p, Some((tree_path, NodePath(vec![0, 0]))))
        }
    }
}

/// A random line over `max(var_budget, 4)` vertices with `f` and `s` drawn
/// from the interior, so both gadgets apply.
pub fn random_line(cfg: &GenConfig) -> OrdInstance {
    let mut rng = cfg.rng();
    let n = cfg.var_budget.max(4);
    let mut names: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    names.shuffle(&mut rng);
    let interior = &names[1..n - 1];
    let picked: Vec<&String> = interior.sample(&mut rng, 2).collect();
    let (f, s) = (picked[0].clone(), picked[1].clone());
    let graph = LineGraph::from_order(&names).expect("distinct generated names");
    OrdInstance::new(graph, f, s).expect("distinct interior vertices")
}

/// Forward generator of one-sided proofs.
struct MallGen<'r, R: ?Sized> {
    rng: &'r mut R,
    fresh: usize,
    search_budget: usize,
}

const MALL_ATOMS: [&str; 3] = ["a", "b", "c"];

impl<R: Rng + ?Sized> MallGen<'_, R> {
    fn label(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn literal(&mut self) -> MallFormula {
        let a = *MALL_ATOMS.choose(self.rng).unwrap();
        if self.rng.random_bool(0.5) {
            MallFormula::atom(a)
        } else {
            MallFormula::dual(a)
        }
    }

    fn proof(&mut self, depth: usize) -> MallProof {
        if depth == 0 || self.rng.random_bool(0.15) {
            return MallProof::ax(*MALL_ATOMS.choose(self.rng).unwrap()).unwrap();
        }
        match self.rng.random_range(0..6) {
            0 => {
                let p = self.proof(depth - 1);
                if p.conclusion().0.len() < 2 {
                    return p;
                }
                MallProof::new(MallRule::Par(p)).unwrap()
            }
            1 => {
                let p = self.proof(depth - 1);
                let q = self.proof(depth - 1);
                MallProof::new(MallRule::Tensor(p, q)).unwrap()
            }
            2 => {
                let p = self.proof(depth - 1);
                let a = p.conclusion().0.last().unwrap().clone();
                let other = self.literal();
                let x = self.label("y");
                if self.rng.random_bool(0.5) {
                    MallProof::new(MallRule::PlusL(MallFormula::plus(x, a, other), p)).unwrap()
                } else {
                    MallProof::new(MallRule::PlusR(MallFormula::plus(x, other, a), p)).unwrap()
                }
            }
            3 => {
                let p = self.proof(depth - 1);
                let m = p.conclusion().0.len();
                if m < 2 {
                    return p;
                }
                let i = self.rng.random_range(1..=m);
                let mut j = self.rng.random_range(1..m);
                if j >= i {
                    j += 1;
                }
                MallProof::ex(i, j, p).unwrap()
            }
            _ => self.with(depth),
        }
    }

    /// `with x p q` where `q` proves the context of `p` next to a relabeled
    /// copy of its last formula, found by backward search.
    fn with(&mut self, depth: usize) -> MallProof {
        let p = self.proof(depth - 1);
        let mut fs = p.conclusion().0.clone();
        let a = fs.pop().unwrap();
        let b = a.relabel(&mut |_| self.label("z"));
        fs.push(b);
        let goal = MallSequent(fs);
        let found = search_proof(&goal, self.rng, self.search_budget);
        let x = self.label("x");
        match found {
            Some(q) => MallProof::new(MallRule::With(x, p, q)).unwrap(),
            None => p,
        }
    }
}

/// Inserts `ex i j (ex i j ·)` at a random node.
pub fn mall_identity_exchange<R: Rng + ?Sized>(rng: &mut R, p: &MallProof) -> MallProof {
    fn paths(p: &MallProof, cur: NodePath, out: &mut Vec<NodePath>) {
        if p.conclusion().0.len() >= 2 {
            out.push(cur.clone());
        }
        for (slot, q) in p.premises().into_iter().enumerate() {
            paths(q, cur.child(slot), out);
        }
    }
    fn rebuild(p: &MallProof, path: &[usize], i: usize, j: usize) -> MallProof {
        let Some((&slot, rest)) = path.split_first() else {
            return MallProof::ex(i, j, MallProof::ex(i, j, p.clone()).unwrap()).unwrap();
        };
        let sub = |q: &MallProof, s: usize| {
            if s == slot {
                rebuild(q, rest, i, j)
            } else {
                q.clone()
            }
        };
        let rule = match p.rule() {
            MallRule::Ax(_) => unreachable!("path leads through a leaf"),
            MallRule::Par(q) => MallRule::Par(sub(q, 0)),
            MallRule::PlusL(f, q) => MallRule::PlusL(f.clone(), sub(q, 0)),
            MallRule::PlusR(f, q) => MallRule::PlusR(f.clone(), sub(q, 0)),
            MallRule::Ex(a, b, q) => MallRule::Ex(*a, *b, sub(q, 0)),
            MallRule::Tensor(q, r) => MallRule::Tensor(sub(q, 0), sub(r, 1)),
            MallRule::With(x, q, r) => MallRule::With(x.clone(), sub(q, 0), sub(r, 1)),
        };
        MallProof::new(rule).expect("premise conclusions unchanged")
    }
    let mut out = Vec::new();
    paths(p, NodePath::root(), &mut out);
    let path = out
        .choose(rng)
        .expect("every proof has a binary sequent")
        .clone();
    let m = p.at(&path).unwrap().conclusion().0.len();
    let i = rng.random_range(1..=m);
    let mut j = rng.random_range(1..m);
    if j >= i {
        j += 1;
    }
    rebuild(p, &path.0, i, j)
}

/// A random one-sided proof of depth at most `depth_budget`.
pub fn random_mall_proof(cfg: &GenConfig) -> MallProof {
    let mut rng = cfg.rng();
    MallGen {
        rng: &mut rng,
        fresh: 0,
        search_budget: 2_000,
    }
    .proof(cfg.depth_budget)
}

/// Two proofs of one sequent: the second is either found afresh by backward
/// search (so it may or may not be equivalent) or is the first with
/// `mutation_count` identity exchanges.
pub fn mall_pair(cfg: &GenConfig) -> (MallProof, MallProof) {
    let mut rng = cfg.rng();
    let p = MallGen {
        rng: &mut rng,
        fresh: 0,
        search_budget: 2_000,
    }
    .proof(cfg.depth_budget);
    if rng.random_bool(0.6) {
        if let Some(q) = search_proof(p.conclusion(), &mut rng, 20_000) {
            return (p, q);
        }
    }
    let mut q = p.clone();
    for _ in 0..cfg.mutation_count.max(1) {
        q = mall_identity_exchange(&mut rng, &q);
    }
    (p, q)
}
