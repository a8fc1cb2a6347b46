//! Local proof rewrites. All but [`Rewrite::SwapBranches`] preserve
//! proof equivalence; that one is used to inject inequivalent pairs.

use std::fmt;

use thiserror::Error;

use crate::proof::{NodePath, Proof, ProofError, Rule, RuleError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("no node at {0}")]
    InvalidPath(NodePath),
    #[error("node {path} does not have the shape {expected}")]
    ShapeMismatch {
        path: NodePath,
        expected: &'static str,
    },
    #[error("rewritten node {path} is ill-formed: {kind}")]
    IllFormed { path: NodePath, kind: RuleError },
    #[error("rewrite at {path} would change the conclusion to `{found}`")]
    ConclusionChanged { path: NodePath, found: String },
    #[error(transparent)]
    Proof(#[from] ProofError),
}

/// A rewrite applicable at a single node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rewrite {
    /// `impR(ex m-1 m (dplus x π μ))` ⇒ `dplus x (impR(ex m-1 m π)) (impR(ex m-1 m μ))`
    PermuteImpR,
    /// `impL ν (dplus x π μ)` ⇒ `dplus x (impL ν π) (impL ν μ)`
    DistributeImpL,
    /// `ex i j (ex k l π)` ⇒ `ex k l (ex i j π)` for disjoint `{i,j}`, `{k,l}`
    CommuteExchanges,
    /// `π` ⇒ `ex i j (ex i j π)`
    IdentityExchange(usize, usize),
    /// `dplus x π μ` ⇒ `dplus x μ π`
    SwapBranches,
}

impl fmt::Display for Rewrite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rewrite::PermuteImpR => write!(f, "permute-impR"),
            Rewrite::DistributeImpL => write!(f, "distribute-impL"),
            Rewrite::CommuteExchanges => write!(f, "commute-exchanges"),
            Rewrite::IdentityExchange(i, j) => write!(f, "identity-exchange({i},{j})"),
            Rewrite::SwapBranches => write!(f, "swap-branches"),
        }
    }
}

fn build(path: &NodePath, rule: Rule) -> Result<Proof, RewriteError> {
    Proof::new(rule).map_err(|kind| RewriteError::IllFormed {
        path: path.clone(),
        kind,
    })
}

fn local(node: &Proof, path: &NodePath, rw: Rewrite) -> Result<Proof, RewriteError> {
    let new = local_unchecked(node, path, rw)?;
    if new.conclusion() != node.conclusion() {
        return Err(RewriteError::ConclusionChanged {
            path: path.clone(),
            found: new.conclusion().to_string(),
        });
    }
    Ok(new)
}

fn local_unchecked(node: &Proof, path: &NodePath, rw: Rewrite) -> Result<Proof, RewriteError> {
    let mismatch = |expected| RewriteError::ShapeMismatch {
        path: path.clone(),
        expected,
    };
    match rw {
        Rewrite::PermuteImpR => {
            const SHAPE: &str = "impR(ex m-1 m (dplus x _ _))";
            let Rule::ImpR(ex) = node.rule() else {
                return Err(mismatch(SHAPE));
            };
            let Rule::Ex(i, j, dp) = ex.rule() else {
                return Err(mismatch(SHAPE));
            };
            let m = ex.conclusion().context.len();
            let Rule::DPlus(x, l, r) = dp.rule() else {
                return Err(mismatch(SHAPE));
            };
            if (*i.min(j), *i.max(j)) != (m - 1, m) {
                return Err(mismatch(SHAPE));
            }
            let lift = |p: &Proof| -> Result<Proof, RewriteError> {
                let e = build(path, Rule::Ex(*i, *j, p.clone()))?;
                build(path, Rule::ImpR(e))
            };
            build(path, Rule::DPlus(x.clone(), lift(l)?, lift(r)?))
        }
        Rewrite::DistributeImpL => {
            const SHAPE: &str = "impL _ (dplus x _ _)";
            let Rule::ImpL(nu, dp) = node.rule() else {
                return Err(mismatch(SHAPE));
            };
            let Rule::DPlus(x, l, r) = dp.rule() else {
                return Err(mismatch(SHAPE));
            };
            if dp.conclusion().context.len() < 2 {
                return Err(mismatch(SHAPE));
            }
            let l = build(path, Rule::ImpL(nu.clone(), l.clone()))?;
            let r = build(path, Rule::ImpL(nu.clone(), r.clone()))?;
            build(path, Rule::DPlus(x.clone(), l, r))
        }
        Rewrite::CommuteExchanges => {
            const SHAPE: &str = "ex i j (ex k l _) with disjoint positions";
            let Rule::Ex(i, j, inner) = node.rule() else {
                return Err(mismatch(SHAPE));
            };
            let Rule::Ex(k, l, p) = inner.rule() else {
                return Err(mismatch(SHAPE));
            };
            if [i, j].iter().any(|a| *a == k || *a == l) {
                return Err(mismatch(SHAPE));
            }
            let e = build(path, Rule::Ex(*i, *j, p.clone()))?;
            build(path, Rule::Ex(*k, *l, e))
        }
        Rewrite::IdentityExchange(i, j) => {
            let e = build(path, Rule::Ex(i, j, node.clone()))?;
            build(path, Rule::Ex(i, j, e))
        }
        Rewrite::SwapBranches => {
            let Rule::DPlus(x, l, r) = node.rule() else {
                return Err(mismatch("dplus x _ _"));
            };
            build(path, Rule::DPlus(x.clone(), r.clone(), l.clone()))
        }
    }
}

/// Applies `rw` at the node at `path`.
pub fn apply(p: &Proof, path: &NodePath, rw: Rewrite) -> Result<Proof, RewriteError> {
    let node = p
        .at(path)
        .ok_or_else(|| RewriteError::InvalidPath(path.clone()))?;
    let new = local(node, path, rw)?;
    Ok(p.replace_at(path, new)?)
}

/// Every node where one of the parameterless equivalence-preserving
/// rewrites applies, in preorder.
pub fn sites(p: &Proof) -> Vec<(NodePath, Rewrite)> {
    let mut out = Vec::new();
    collect_sites(p, NodePath::root(), &mut out);
    out
}

fn collect_sites(p: &Proof, path: NodePath, out: &mut Vec<(NodePath, Rewrite)>) {
    for rw in [
        Rewrite::PermuteImpR,
        Rewrite::DistributeImpL,
        Rewrite::CommuteExchanges,
    ] {
        if local(p, &path, rw).is_ok() {
            out.push((path.clone(), rw));
        }
    }
    for (slot, q) in p.premises().into_iter().enumerate() {
        collect_sites(q, path.child(slot), out);
    }
}

pub fn permute_imp_r_over_dplus(p: &Proof, path: &NodePath) -> Result<Proof, RewriteError> {
    apply(p, path, Rewrite::PermuteImpR)
}

pub fn distribute_imp_l_over_dplus(p: &Proof, path: &NodePath) -> Result<Proof, RewriteError> {
    apply(p, path, Rewrite::DistributeImpL)
}

pub fn commute_exchanges(p: &Proof, path: &NodePath) -> Result<Proof, RewriteError> {
    apply(p, path, Rewrite::CommuteExchanges)
}

pub fn insert_identity_exchange(
    p: &Proof,
    path: &NodePath,
    i: usize,
    j: usize,
) -> Result<Proof, RewriteError> {
    apply(p, path, Rewrite::IdentityExchange(i, j))
}

pub fn swap_dplus_branches(p: &Proof, path: &NodePath) -> Result<Proof, RewriteError> {
    apply(p, path, Rewrite::SwapBranches)
}
