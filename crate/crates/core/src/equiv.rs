//! Proof equivalence: pairwise BDT equivalence of the two BDT slicings, and
//! the explicit-slicing oracle.

use std::fmt;

use thiserror::Error;

use crate::bdt::{equiv_witness, BdtError, LeafPath, DEFAULT_ORACLE_BUDGET};
use crate::formula::OccPair;
use crate::slicing::{bdt_slicing, slicing, Shape, Sliceable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("conclusions differ: `{left}` vs `{right}`")]
    ConclusionMismatch { left: String, right: String },
    #[error("slicing may have up to {bound} slices, above the oracle budget of 2^{budget}")]
    SlicingTooLarge { bound: String, budget: usize },
    #[error(transparent)]
    Bdt(#[from] BdtError),
}

/// A pair on which the two slicings disagree, with a 1-leaf/0-leaf pair of
/// compatible leaves (the first from the left proof's tree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub pair: OccPair,
    pub left: LeafPath,
    pub right: LeafPath,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pair {}: left leaf {}, right leaf {}",
            self.pair, self.left, self.right
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivVerdict {
    pub equivalent: bool,
    pub witness: Option<Witness>,
}

fn same_conclusion<P: Sliceable>(p: &P, q: &P) -> Result<(), EquivError> {
    if p.conclusion() != q.conclusion() {
        return Err(EquivError::ConclusionMismatch {
            left: p.conclusion().to_string(),
            right: q.conclusion().to_string(),
        });
    }
    Ok(())
}

/// Decides equivalence through BDT slicings; the witness is the least
/// disagreeing pair.
pub fn slicing_equiv<P: Sliceable>(p: &P, q: &P) -> Result<EquivVerdict, EquivError> {
    same_conclusion(p, q)?;
    let (bp, bq) = (bdt_slicing(p), bdt_slicing(q));
    let mut pairs: Vec<OccPair> = bp.entries().chain(bq.entries()).map(|(pr, _)| pr).collect();
    pairs.sort();
    pairs.dedup();
    for pr in pairs {
        if let Some((left, right)) = equiv_witness(bp.get(pr), bq.get(pr))? {
            return Ok(EquivVerdict {
                equivalent: false,
                witness: Some(Witness {
                    pair: pr,
                    left,
                    right,
                }),
            });
        }
    }
    Ok(EquivVerdict {
        equivalent: true,
        witness: None,
    })
}

/// Upper bound on the number of slices, saturating.
fn slice_bound<P: Sliceable>(p: &P) -> u128 {
    match p.shape() {
        Shape::Axiom => 1,
        Shape::Pass((q, _)) => slice_bound(q),
        Shape::Split((l, _), (r, _)) => slice_bound(l).saturating_mul(slice_bound(r)),
        Shape::Branch {
            left: (l, _),
            right: (r, _),
            ..
        } => slice_bound(l).saturating_add(slice_bound(r)),
    }
}

/// Compares explicit slicings as sets.
pub fn slicing_equiv_oracle<P: Sliceable>(p: &P, q: &P, budget: usize) -> Result<bool, EquivError> {
    same_conclusion(p, q)?;
    let cap = 1u128.checked_shl(budget as u32).unwrap_or(u128::MAX);
    for r in [p, q] {
        let bound = slice_bound(r);
        if bound > cap {
            return Err(EquivError::SlicingTooLarge {
                bound: bound.to_string(),
                budget,
            });
        }
    }
    Ok(slicing(p) == slicing(q))
}

pub fn proof_equiv(
    p: &crate::proof::Proof,
    q: &crate::proof::Proof,
) -> Result<EquivVerdict, EquivError> {
    slicing_equiv(p, q)
}

pub fn proof_equiv_oracle(
    p: &crate::proof::Proof,
    q: &crate::proof::Proof,
) -> Result<bool, EquivError> {
    slicing_equiv_oracle(p, q, DEFAULT_ORACLE_BUDGET)
}
