//! Encoding of free BDTs as proofs.
//!
//! A tree over variables `x1..xn` becomes a proof of
//! `cont(n, ∅) |- (b +[b0] b)`, where
//!
//! * `cont(n, I)` lists the atoms `ai` of the already tested variables
//!   (`i ∈ I`, ascending), then the sums `(ai +[xi] ai)` of the untested
//!   ones (ascending), then `F_n = (an -o ... (a1 -o b))`;
//! * each internal node `(xk ? Q : R)` becomes a ⊕ left rule on `xk`, with
//!   exchanges moving the sum to the last position and back;
//! * each leaf becomes a tower of implication-left rules over the proof of
//!   `b |- (b +[b0] b)` picking the left (leaf 1) or right (leaf 0) disjunct.
//!
//! The ⊕ labels are the tree's own variable names; a [`VarOrder`] assigns
//! each name its index `i`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::bdt::{equiv, Bdt};
use crate::formula::{Formula, OccPair, Sequent};
use crate::proof::{NodePath, Proof, Rule};
use crate::slicing::bdt_slicing_pair;
use crate::syntax::is_label;

/// Label of the succedent sum; never a variable.
pub const RESERVED_LABEL: &str = "b0";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("tree is not free: variable `{0}` repeats on a path")]
    NotFree(String),
    #[error("variable `{0}` is not in the variable order")]
    UnknownVariable(String),
    #[error("variable order has {len} names but {n} variables were requested")]
    OrderTooShort { len: usize, n: usize },
    #[error("variable order repeats `{0}`")]
    DuplicateVariable(String),
    #[error("`{0}` is not a valid variable name")]
    InvalidVariable(String),
    #[error("variable name `{0}` is reserved")]
    ReservedVariable(String),
    #[error("no tree node at {0}")]
    InvalidPath(String),
}

/// Assignment of tree variables to indices `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarOrder(Vec<String>);

impl VarOrder {
    pub fn new(names: Vec<String>) -> Result<Self, EncodeError> {
        let mut seen = BTreeSet::new();
        for x in &names {
            if !is_label(x) {
                return Err(EncodeError::InvalidVariable(x.clone()));
            }
            if x == RESERVED_LABEL {
                return Err(EncodeError::ReservedVariable(x.clone()));
            }
            if !seen.insert(x) {
                return Err(EncodeError::DuplicateVariable(x.clone()));
            }
        }
        Ok(VarOrder(names))
    }

    /// `x1, ..., xn`
    pub fn indexed(n: usize) -> Self {
        VarOrder((1..=n).map(|i| format!("x{i}")).collect())
    }

    /// First-occurrence preorder, padded with unused `xi` names up to `n`.
    pub fn first_occurrence(t: &Bdt, n: usize) -> Self {
        let mut names = t.variables_preorder();
        let mut i = 1;
        while names.len() < n {
            let cand = format!("x{i}");
            if !names.contains(&cand) {
                names.push(cand);
            }
            i += 1;
        }
        VarOrder(names)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Name of variable `i` (1-based).
    pub fn name(&self, i: usize) -> &str {
        &self.0[i - 1]
    }

    /// 1-based index of `x`.
    pub fn index(&self, x: &str) -> Option<usize> {
        self.0.iter().position(|y| y == x).map(|p| p + 1)
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }
}

/// Variables tested on the way from the root to the node at `path`
/// (`false` = left), root first.
pub fn free_vars_at(t: &Bdt, path: &[bool]) -> Result<Vec<String>, EncodeError> {
    let mut out = Vec::new();
    let mut cur = t;
    for &right in path {
        match cur {
            Bdt::Leaf(_) => return Err(EncodeError::InvalidPath(show_tree_path(path))),
            Bdt::Node(x, l, r) => {
                out.push(x.clone());
                cur = if right { r } else { l };
            }
        }
    }
    Ok(out)
}

/// `/0/1`-style rendering of a tree path (`0` = left).
pub fn show_tree_path(path: &[bool]) -> String {
    if path.is_empty() {
        return "/".into();
    }
    path.iter().map(|b| if *b { "/1" } else { "/0" }).collect()
}

fn alpha(i: usize) -> Formula {
    Formula::atom(format!("a{i}"))
}

fn beta() -> Formula {
    Formula::atom("b")
}

/// `(b +[b0] b)`
pub fn bool_formula() -> Formula {
    Formula::plus(RESERVED_LABEL, beta(), beta())
}

/// `F_k = (ak -o (... (a1 -o b)))`
pub fn chain_formula(k: usize) -> Formula {
    (1..=k).fold(beta(), |acc, i| Formula::imp(alpha(i), acc))
}

/// The sequent `cont(k, I) |- (b +[b0] b)`; `tested` holds indices ≤ k.
pub fn cont(k: usize, tested: &BTreeSet<usize>, order: &VarOrder) -> Sequent {
    let mut ctx: Vec<Formula> = (1..=k).filter(|i| tested.contains(i)).map(alpha).collect();
    ctx.extend(
        (1..=k)
            .filter(|i| !tested.contains(i))
            .map(|i| Formula::plus(order.name(i), alpha(i), alpha(i))),
    );
    ctx.push(chain_formula(k));
    Sequent::new(ctx, bool_formula())
}

/// Reorders the context of `p` into `target` with adjacent exchanges,
/// moving each formula left into place in turn.
pub fn arrange(p: Proof, target: &[Formula]) -> Proof {
    let mut ctx = p.conclusion().context.clone();
    assert_eq!(ctx.len(), target.len(), "arrange: context sizes differ");
    let mut cur = p;
    for q in 0..target.len() {
        let pos = q + ctx[q..]
            .iter()
            .position(|f| f == &target[q])
            .expect("arrange: target is a permutation of the context");
        for r in (q..pos).rev() {
            cur = Proof::ex(r + 1, r + 2, cur).expect("adjacent exchange in range");
            ctx.swap(r, r + 1);
        }
    }
    cur
}

/// An encoded tree together with the proof positions of its internal nodes.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub proof: Proof,
    pub order: VarOrder,
    /// `(tree path, proof path)` of every internal tree node, in preorder;
    /// the proof node is the corresponding ⊕ left rule.
    pub sites: Vec<(Vec<bool>, NodePath)>,
}

struct Encoder<'a> {
    n: usize,
    order: &'a VarOrder,
    leaves: HashMap<(bool, Vec<usize>), Proof>,
}

impl Encoder<'_> {
    fn leaf(&mut self, value: bool, tested: &BTreeSet<usize>) -> Proof {
        let key = (value, tested.iter().copied().collect::<Vec<_>>());
        if let Some(p) = self.leaves.get(&key) {
            return p.clone();
        }
        let b = beta();
        let ax = Proof::ax("b").unwrap();
        let mut cur = if value {
            Proof::plus_l(bool_formula(), ax)
        } else {
            Proof::plus_r(bool_formula(), ax)
        }
        .unwrap();
        debug_assert_eq!(cur.conclusion().context, vec![b]);
        for k in 1..=self.n {
            // Bring F_{k-1} to the front, peel off ak, restore cont(k, I_k).
            let mut front = cur.conclusion().context.clone();
            let f = front.pop().unwrap();
            front.insert(0, f);
            cur = arrange(cur, &front);
            let nu = if tested.contains(&k) {
                Proof::ax(format!("a{k}")).unwrap()
            } else {
                let a = || Proof::ax(format!("a{k}")).unwrap();
                Proof::dplus(self.order.name(k), a(), a()).unwrap()
            };
            cur = Proof::imp_l(nu, cur).expect("tower step");
            let upto: BTreeSet<usize> = tested.iter().copied().filter(|&i| i <= k).collect();
            cur = arrange(cur, &cont(k, &upto, self.order).context);
        }
        self.leaves.insert(key, cur.clone());
        cur
    }

    fn tree(&mut self, t: &Bdt, tested: &mut BTreeSet<usize>) -> Result<Proof, EncodeError> {
        match t {
            Bdt::Leaf(v) => Ok(self.leaf(*v, tested)),
            Bdt::Node(x, l, r) => {
                let k = self
                    .order
                    .index(x)
                    .filter(|&k| k <= self.n)
                    .ok_or_else(|| EncodeError::UnknownVariable(x.clone()))?;
                if !tested.insert(k) {
                    return Err(EncodeError::NotFree(x.clone()));
                }
                let pl = self.tree(l, tested);
                let pr = self.tree(r, tested);
                let inner = cont(self.n, tested, self.order).context;
                tested.remove(&k);
                let (pl, pr) = (pl?, pr?);
                let mut last: Vec<Formula> = inner.into_iter().filter(|f| *f != alpha(k)).collect();
                last.push(alpha(k));
                let d = Proof::dplus(x.clone(), arrange(pl, &last), arrange(pr, &last))
                    .expect("both branches share cont(n, I ∪ {k})");
                Ok(arrange(d, &cont(self.n, tested, self.order).context))
            }
        }
    }
}

/// Encodes `t` over `n` variables named by `order` (its first `n` names).
pub fn encode_with_order(n: usize, t: &Bdt, order: &VarOrder) -> Result<Encoding, EncodeError> {
    if order.len() < n {
        return Err(EncodeError::OrderTooShort {
            len: order.len(),
            n,
        });
    }
    let order = VarOrder::new(order.0[..n].to_vec())?;
    if let Some(x) = t.first_repeat() {
        return Err(EncodeError::NotFree(x));
    }
    let mut enc = Encoder {
        n,
        order: &order,
        leaves: HashMap::new(),
    };
    let proof = enc.tree(t, &mut BTreeSet::new())?;
    let mut tree_paths = Vec::new();
    internal_paths(t, &mut Vec::new(), &mut tree_paths);
    let mut proof_paths = Vec::new();
    node_sites(&proof, NodePath::root(), &mut proof_paths);
    debug_assert_eq!(tree_paths.len(), proof_paths.len());
    Ok(Encoding {
        proof,
        sites: tree_paths.into_iter().zip(proof_paths).collect(),
        order,
    })
}

/// Encodes with the first-occurrence variable order.
pub fn encode_bdt(n: usize, t: &Bdt) -> Result<Encoding, EncodeError> {
    if t.variables().len() > n {
        let order = VarOrder::first_occurrence(t, n);
        let extra = &order.names()[n];
        return Err(EncodeError::UnknownVariable(extra.clone()));
    }
    encode_with_order(n, t, &VarOrder::first_occurrence(t, n))
}

fn internal_paths(t: &Bdt, here: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
    if let Bdt::Node(_, l, r) = t {
        out.push(here.clone());
        here.push(false);
        internal_paths(l, here, out);
        *here.last_mut().unwrap() = true;
        internal_paths(r, here, out);
        here.pop();
    }
}

/// ⊕ left rules concluding with the Boolean succedent, in preorder.
fn node_sites(p: &Proof, path: NodePath, out: &mut Vec<NodePath>) {
    if let Rule::DPlus(..) = p.rule() {
        if p.conclusion().succedent == bool_formula() {
            out.push(path.clone());
        }
    }
    for (slot, q) in p.premises().into_iter().enumerate() {
        node_sites(q, path.child(slot), out);
    }
}

/// Occurrence indices in `cont(n, ∅) |- (b +[b0] b)`.
pub mod occ {
    /// Left copy of `ai` in its sum.
    pub fn alpha_l(i: usize) -> usize {
        2 * (i - 1)
    }
    pub fn alpha_r(i: usize) -> usize {
        2 * i - 1
    }
    /// `ai` inside `F_n`.
    pub fn alpha_imp(n: usize, i: usize) -> usize {
        2 * n + (n - i)
    }
    /// `b` inside `F_n`.
    pub fn beta(n: usize) -> usize {
        3 * n
    }
    pub fn beta_l(n: usize) -> usize {
        3 * n + 1
    }
    pub fn beta_r(n: usize) -> usize {
        3 * n + 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    /// Structural equality.
    Exact,
    /// BDT equivalence.
    Equivalent,
}

#[derive(Debug, Clone)]
pub struct RepresentationCheck {
    pub name: String,
    pub pair: OccPair,
    pub mode: CheckMode,
    pub expected: Bdt,
    pub actual: Bdt,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct RepresentationReport {
    pub checks: Vec<RepresentationCheck>,
}

impl RepresentationReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

impl fmt::Display for RepresentationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let rel = match c.mode {
                CheckMode::Exact => "==",
                CheckMode::Equivalent => "~",
            };
            writeln!(
                f,
                "{} {} {}: {} {rel} {}",
                if c.ok { "ok  " } else { "FAIL" },
                c.name,
                c.pair,
                c.actual,
                c.expected
            )?;
        }
        Ok(())
    }
}

/// Encodes `t` and checks the four families of pair equations on the
/// resulting BDT slicing.
pub fn check_representation(
    n: usize,
    t: &Bdt,
    order: &VarOrder,
) -> Result<RepresentationReport, EncodeError> {
    let enc = encode_with_order(n, t, order)?;
    let p = &enc.proof;
    let at = |i, j| {
        let pr = OccPair::new(i, j).unwrap();
        (pr, bdt_slicing_pair(p, pr).expect("pair in range"))
    };
    let mut checks = Vec::new();
    let mut push = |name: String, (pair, actual): (OccPair, Bdt), mode, expected: Bdt| {
        let ok = match mode {
            CheckMode::Exact => actual == expected,
            CheckMode::Equivalent => equiv(&actual, &expected).unwrap_or(false),
        };
        checks.push(RepresentationCheck {
            name,
            pair,
            mode,
            expected,
            actual,
            ok,
        });
    };
    push(
        "beta/beta_l".into(),
        at(occ::beta(n), occ::beta_l(n)),
        CheckMode::Exact,
        t.clone(),
    );
    push(
        "beta/beta_r".into(),
        at(occ::beta(n), occ::beta_r(n)),
        CheckMode::Exact,
        t.negate(),
    );
    for i in 1..=n {
        let x = enc.order.name(i).to_string();
        push(
            format!("alpha{i}_l/alpha{i}_imp"),
            at(occ::alpha_l(i), occ::alpha_imp(n, i)),
            CheckMode::Equivalent,
            Bdt::ite(x.clone(), Bdt::one(), Bdt::zero()),
        );
        push(
            format!("alpha{i}_r/alpha{i}_imp"),
            at(occ::alpha_r(i), occ::alpha_imp(n, i)),
            CheckMode::Equivalent,
            Bdt::ite(x, Bdt::zero(), Bdt::one()),
        );
    }
    Ok(RepresentationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::proof_equiv;
    use crate::proof::check_proof;

    fn t(text: &str) -> Bdt {
        Bdt::parse(text).unwrap()
    }

    #[test]
    fn free_variables() {
        let tree = t("(x ? (t ? (z ? 0 : 0) : 0) : (y ? 1 : 0))");
        assert_eq!(free_vars_at(&tree, &[true, false]).unwrap(), ["x", "y"]);
        assert_eq!(free_vars_at(&tree, &[false, false]).unwrap(), ["x", "t"]);
        assert!(free_vars_at(&tree, &[]).unwrap().is_empty());
        assert!(free_vars_at(&tree, &[true, true, true]).is_err());
    }

    #[test]
    fn cont_shape() {
        let order = VarOrder::indexed(3);
        let s = cont(3, &BTreeSet::from([2]), &order);
        assert_eq!(
            s.to_string(),
            "a2, (a1 +[x1] a1), (a3 +[x3] a3), (a3 -o (a2 -o (a1 -o b))) |- (b +[b0] b)"
        );
    }

    #[test]
    fn leaf_without_variables() {
        let e = encode_bdt(0, &Bdt::one()).unwrap();
        assert_eq!(e.proof.to_string(), "(plusL (b +[b0] b) (ax b))");
        assert_eq!(e.proof.conclusion().to_string(), "b |- (b +[b0] b)");
        assert!(e.sites.is_empty());
    }

    fn or_not_y() -> Bdt {
        t("(x ? (y ? 1 : 0) : 1)")
    }

    #[test]
    fn or_not_y_encoding() {
        let e = encode_bdt(2, &or_not_y()).unwrap();
        check_proof(&e.proof).unwrap();
        assert_eq!(
            e.proof.conclusion().to_string(),
            "(a1 +[x] a1), (a2 +[y] a2), (a2 -o (a1 -o b)) |- (b +[b0] b)"
        );
        let tree_paths: Vec<_> = e.sites.iter().map(|(tp, _)| tp.clone()).collect();
        assert_eq!(tree_paths, vec![vec![], vec![false]]);
        for (_, pp) in &e.sites {
            assert!(matches!(e.proof.at(pp).unwrap().rule(), Rule::DPlus(..)));
        }
        let report = check_representation(2, &or_not_y(), &e.order).unwrap();
        assert!(report.all_ok(), "{report}");
        assert_eq!(report.checks[0].actual, or_not_y());
    }

    #[test]
    fn constant_leaves() {
        for (leaf, l, r) in [(Bdt::zero(), "0", "1"), (Bdt::one(), "1", "0")] {
            for n in 0..3 {
                let rep = check_representation(n, &leaf, &VarOrder::indexed(n)).unwrap();
                assert!(rep.all_ok(), "{rep}");
                assert_eq!(rep.checks[0].actual.to_string(), l);
                assert_eq!(rep.checks[1].actual.to_string(), r);
            }
        }
    }

    #[test]
    fn faithful_on_small_pairs() {
        let a = or_not_y();
        let b = t("(y ? 1 : (x ? 0 : 1))");
        let order = VarOrder::new(vec!["x".into(), "y".into()]).unwrap();
        let pa = encode_with_order(2, &a, &order).unwrap().proof;
        let pb = encode_with_order(2, &b, &order).unwrap().proof;
        assert!(proof_equiv(&pa, &pb).unwrap().equivalent);
        let c = t("(y ? 0 : (x ? 0 : 1))");
        let pc = encode_with_order(2, &c, &order).unwrap().proof;
        assert!(!proof_equiv(&pa, &pc).unwrap().equivalent);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            encode_bdt(1, &or_not_y()),
            Err(EncodeError::UnknownVariable(_))
        ));
        assert!(matches!(
            encode_with_order(2, &t("(z ? 0 : 1)"), &VarOrder::indexed(2)),
            Err(EncodeError::UnknownVariable(_))
        ));
        assert!(VarOrder::new(vec!["b0".into()]).is_err());
        assert!(VarOrder::new(vec!["x".into(), "x".into()]).is_err());
    }

    #[test]
    fn padding_avoids_used_names() {
        let order = VarOrder::first_occurrence(&t("(x2 ? 0 : 1)"), 3);
        assert_eq!(order.names(), ["x2", "x1", "x3"]);
    }
}
