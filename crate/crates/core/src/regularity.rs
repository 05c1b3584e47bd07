//! Regularity of multi-partitions and the tangent-weight oracle.
//!
//! A triple `(b, k, k')` with `b ∈ λ(k)` is a *hook triple* when
//! `p(k) - p(k') + arm_{λ(k)}(b) + leg_{λ(k')}(b) + 1 ≡ 0 (mod n)`. Each hook
//! triple carries a pair of torus eigenvalues summing to `ξ_Ω + ξ_Ω̄`; the
//! triple is *illegal* when both are positive. A multi-partition with no
//! illegal triple is regular.

use thiserror::Error;

use crate::partition::{residue, Cell, ColoredMultiPartition, Residue};
use crate::slope::{LexScalar, SlopeDatum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegularityError {
    #[error("eigenvalue of {0:?} is exactly zero; the slope datum is not general")]
    ZeroEigenvalue(HookTriple),
    #[error("threshold must exceed max ξ_k = {max_xi}, got {threshold}")]
    ThresholdTooLow { threshold: String, max_xi: String },
    #[error("slope datum has {datum} components but the multi-partition has {mp}")]
    ComponentMismatch { datum: usize, mp: usize },
}

/// A box of `λ(k)` paired with a target component `k'` satisfying the
/// mod-`n` hook condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HookTriple {
    pub cell: Cell,
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentWeightPair {
    pub triple: HookTriple,
    pub e_minus: LexScalar,
    pub e_plus: LexScalar,
}

fn check_components(xi: &SlopeDatum, mp: &ColoredMultiPartition) -> Result<(), RegularityError> {
    if xi.components() != mp.components() {
        return Err(RegularityError::ComponentMismatch { datum: xi.components(), mp: mp.components() });
    }
    Ok(())
}

/// `arm_{λ(k)}(b)` and `leg_{λ(k')}(b)` for a triple.
fn arm_leg(mp: &ColoredMultiPartition, t: &HookTriple) -> (i64, i64) {
    let arm = mp.component(t.source).arm(t.cell.i, t.cell.j);
    let leg = mp.component(t.target).leg(t.cell.i, t.cell.j);
    (arm, leg)
}

/// Every hook triple of `mp`; the count is half the tangent dimension.
pub fn hook_triples(mp: &ColoredMultiPartition) -> Vec<HookTriple> {
    let n = mp.n();
    let ell = mp.components();
    let mut out = Vec::new();
    for cell in mp.cells() {
        for target in 1..=ell {
            let t = HookTriple { cell, source: cell.k, target };
            let (arm, leg) = arm_leg(mp, &t);
            let p = mp.coloring()[cell.k - 1] as i64;
            let q = mp.coloring()[target - 1] as i64;
            if residue(p - q + arm + leg + 1, n) == 0 {
                out.push(t);
            }
        }
    }
    out
}

/// `ξ_{k'} - ξ_k + ξ_Ω·leg - ξ_Ω̄·arm`, the quantity bounded by the
/// illegality window.
fn window_value(xi: &SlopeDatum, mp: &ColoredMultiPartition, t: &HookTriple) -> LexScalar {
    let (arm, leg) = arm_leg(mp, t);
    &(&(xi.xi(t.target) - xi.xi(t.source)) + &xi.omega().scale(leg)) - &xi.omega_bar().scale(arm)
}

pub fn tangent_character(
    xi: &SlopeDatum,
    mp: &ColoredMultiPartition,
) -> Result<Vec<TangentWeightPair>, RegularityError> {
    check_components(xi, mp)?;
    Ok(hook_triples(mp)
        .into_iter()
        .map(|triple| {
            let (arm, leg) = arm_leg(mp, &triple);
            let diff = xi.xi(triple.source) - xi.xi(triple.target);
            let e_minus = &(&diff - &xi.omega().scale(leg)) + &xi.omega_bar().scale(arm + 1);
            let e_plus = &(&(-diff) + &xi.omega().scale(leg + 1)) - &xi.omega_bar().scale(arm);
            TangentWeightPair { triple, e_minus, e_plus }
        })
        .collect())
}

/// Number of strictly negative tangent eigenvalues.
pub fn attracting_dimension(
    xi: &SlopeDatum,
    mp: &ColoredMultiPartition,
) -> Result<usize, RegularityError> {
    let mut count = 0;
    for pair in tangent_character(xi, mp)? {
        for e in [&pair.e_minus, &pair.e_plus] {
            if e.is_zero() {
                return Err(RegularityError::ZeroEigenvalue(pair.triple));
            }
            if e.is_negative() {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Triples `(b, k, k')` with `-ξ_Ω < ξ_{k'} - ξ_k + ξ_Ω·leg - ξ_Ω̄·arm < ξ_Ω̄`.
pub fn illegal_triples(
    xi: &SlopeDatum,
    mp: &ColoredMultiPartition,
) -> Result<Vec<HookTriple>, RegularityError> {
    check_components(xi, mp)?;
    let lower = -xi.omega().clone();
    Ok(hook_triples(mp)
        .into_iter()
        .filter(|t| {
            let v = window_value(xi, mp, t);
            lower < v && &v < xi.omega_bar()
        })
        .collect())
}

pub fn is_regular(xi: &SlopeDatum, mp: &ColoredMultiPartition) -> Result<bool, RegularityError> {
    Ok(illegal_triples(xi, mp)?.is_empty())
}

/// Box counts at or above a height threshold for one color.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GradedCounts {
    /// `ī`-boxes of height `≥ H`.
    pub boxes_ge: usize,
    /// `ī`-boxes of height `> H`.
    pub boxes_gt: usize,
    /// Removable `ī`-nodes of height `≥ H`.
    pub removable_ge: usize,
    /// Addable `ī`-nodes of height `≥ H`.
    pub addable_ge: usize,
}

pub fn graded_box_counts(
    xi: &SlopeDatum,
    mp: &ColoredMultiPartition,
    color: Residue,
    threshold: &LexScalar,
) -> GradedCounts {
    let colored = |b: &Cell| mp.color_of(*b) == color;
    let heights: Vec<LexScalar> = mp.cells().filter(colored).map(|b| xi.height(b)).collect();
    let at_least = |cells: Vec<Cell>| cells.into_iter().filter(|&b| &xi.height(b) >= threshold).count();
    GradedCounts {
        boxes_ge: heights.iter().filter(|h| *h >= threshold).count(),
        boxes_gt: heights.iter().filter(|h| *h > threshold).count(),
        removable_ge: at_least(mp.removable_nodes(color)),
        addable_ge: at_least(mp.addable_nodes(color)),
    }
}

/// Both sides of the graded box-count identity at threshold `H`:
///
/// `V_ī(≥H) + V_ī(≥H+ξ_Ω+ξ_Ω̄) - V_{ī+1}(≥H+ξ_Ω̄) - V_{ī-1}(≥H+ξ_Ω)`
/// against `R_ī(≥H) - A_ī(≥H+ξ_Ω+ξ_Ω̄)`.
///
/// Box `(k;i,j+1)` has color one higher and sits `ξ_Ω̄` above `(k;i,j)`, so
/// the `ī+1` count is shifted by `ξ_Ω̄` and the `ī-1` count by `ξ_Ω`.
pub fn height_count_sides(
    xi: &SlopeDatum,
    mp: &ColoredMultiPartition,
    color: Residue,
    threshold: &LexScalar,
) -> Result<(i64, i64), RegularityError> {
    check_components(xi, mp)?;
    let max_xi = xi.max_xi();
    if threshold <= &max_xi {
        return Err(RegularityError::ThresholdTooLow {
            threshold: threshold.to_string(),
            max_xi: max_xi.to_string(),
        });
    }
    let n = mp.n();
    let up = residue(color as i64 + 1, n);
    let down = residue(color as i64 - 1, n);
    let high = threshold + &xi.width();
    let counts = |c: Residue, h: &LexScalar| graded_box_counts(xi, mp, c, h);
    let lhs = counts(color, threshold).boxes_ge as i64 + counts(color, &high).boxes_ge as i64
        - counts(up, &(threshold + xi.omega_bar())).boxes_ge as i64
        - counts(down, &(threshold + xi.omega())).boxes_ge as i64;
    let rhs = counts(color, threshold).removable_ge as i64 - counts(color, &high).addable_ge as i64;
    Ok((lhs, rhs))
}

pub fn height_count_identity(
    xi: &SlopeDatum,
    mp: &ColoredMultiPartition,
    color: Residue,
    threshold: &LexScalar,
) -> Result<bool, RegularityError> {
    let (lhs, rhs) = height_count_sides(xi, mp, color, threshold)?;
    Ok(lhs == rhs)
}

/// Pairs `(r, a)` of a removable and an addable `ī`-node with
/// `h(r) < h(a) < h(r) + ξ_Ω + ξ_Ω̄`. Any such pair forces an illegal triple.
pub fn gap_pairs(xi: &SlopeDatum, mp: &ColoredMultiPartition, color: Residue) -> Vec<(Cell, Cell)> {
    let width = xi.width();
    let addable: Vec<(Cell, LexScalar)> =
        mp.addable_nodes(color).into_iter().map(|a| (a, xi.height(a))).collect();
    let mut out = Vec::new();
    for r in mp.removable_nodes(color) {
        let hr = xi.height(r);
        let top = &hr + &width;
        for (a, ha) in &addable {
            if *ha > hr && *ha < top {
                out.push((r, *a));
            }
        }
    }
    out
}
