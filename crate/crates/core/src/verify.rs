//! Exhaustive small-instance checks tying generation, regularity and the
//! tangent oracle together.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::crystal::{bracket_string, e_op, f_op, CrystalError};
use crate::graph::{generate, CrystalGraph};
use crate::partition::{multipartitions_up_to, ColoredMultiPartition, PartitionError, Residue};
use crate::regularity::{
    attracting_dimension, gap_pairs, hook_triples, illegal_triples, RegularityError,
};
use crate::slope::SlopeDatum;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Crystal(#[from] CrystalError),
    #[error(transparent)]
    Regularity(#[from] RegularityError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: &'static str,
    pub vertex: ColoredMultiPartition,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyCounts {
    pub enumerated: usize,
    pub regular: usize,
    pub generated: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub counts: VerifyCounts,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every check over all multi-partitions with at most `size` boxes:
///
/// * the generated vertices are exactly the regular multi-partitions;
/// * attracting dimension equals `#hooks - #illegal`, hence `#hooks`
///   exactly at regular points;
/// * regular multi-partitions have no gap pairs;
/// * the graph's structural invariants hold.
///
/// At most one failure per check is recorded.
pub fn exhaustive(
    xi: &SlopeDatum,
    n: u32,
    coloring: &[Residue],
    size: usize,
) -> Result<VerifyReport, VerifyError> {
    let g = generate(xi, n, coloring, size, false)?;
    let all = multipartitions_up_to(n, coloring, size)?;
    let mut failures = Vec::new();
    let mut record = |f: Failure| {
        if !failures.iter().any(|seen: &Failure| seen.check == f.check) {
            failures.push(f);
        }
    };

    let mut regular = BTreeSet::new();
    for mp in &all {
        let hooks = hook_triples(mp).len();
        let illegal = illegal_triples(xi, mp)?.len();
        let attracting = attracting_dimension(xi, mp)?;
        let is_reg = illegal == 0;
        if is_reg {
            regular.insert(mp.clone());
        }
        if attracting + illegal != hooks || (attracting == hooks) != is_reg {
            record(Failure {
                check: "tangent_oracle",
                vertex: mp.clone(),
                detail: format!("attracting {attracting}, hooks {hooks}, illegal {illegal}"),
            });
        }
        if is_reg {
            if let Some(pair) = (0..n).flat_map(|c| gap_pairs(xi, mp, c)).next() {
                record(Failure {
                    check: "gap_pairs",
                    vertex: mp.clone(),
                    detail: format!("regular but has gap pair ({}, {})", pair.0, pair.1),
                });
            }
        }
        if g.contains(mp) != is_reg {
            let detail = if is_reg { "regular but not generated" } else { "generated but not regular" };
            record(Failure { check: "generated_equals_regular", vertex: mp.clone(), detail: detail.into() });
        }
    }
    if let Err(detail) = g.check_invariants() {
        record(Failure { check: "graph_invariants", vertex: g.root().clone(), detail });
    }

    Ok(VerifyReport {
        counts: VerifyCounts {
            enumerated: all.len(),
            regular: regular.len(),
            generated: g.vertices().len(),
            edges: g.edges().len(),
        },
        failures,
    })
}

/// On every vertex of `g` and every residue: `e(f(v)) = v` and `f(e(v)) = v`
/// when defined, and the uncanceled `)` / `(` counts equal the number of
/// times `e` / `f` apply before returning 0.
pub fn operator_consistency(xi: &SlopeDatum, g: &CrystalGraph) -> Result<Option<Failure>, CrystalError> {
    let fail = |check, v: &ColoredMultiPartition, detail: String| Ok(Some(Failure { check, vertex: v.clone(), detail }));
    for v in g.vertices() {
        for color in 0..g.n() {
            if let Some(up) = f_op(xi, v, color)? {
                if e_op(xi, &up, color)?.as_ref() != Some(v) {
                    return fail("e_after_f", v, format!("residue {color}"));
                }
            }
            if let Some(down) = e_op(xi, v, color)? {
                if f_op(xi, &down, color)?.as_ref() != Some(v) {
                    return fail("f_after_e", v, format!("residue {color}"));
                }
            }
            let s = bracket_string(xi, v, color)?;
            let eps = iterate(v, |m| e_op(xi, m, color))?;
            let phi = iterate(v, |m| f_op(xi, m, color))?;
            if (eps, phi) != (s.epsilon(), s.phi()) {
                return fail(
                    "bracket_statistics",
                    v,
                    format!("residue {color}: brackets ({}, {}), iterated ({eps}, {phi})", s.epsilon(), s.phi()),
                );
            }
        }
    }
    Ok(None)
}

fn iterate<F>(start: &ColoredMultiPartition, mut step: F) -> Result<usize, CrystalError>
where
    F: FnMut(&ColoredMultiPartition) -> Result<Option<ColoredMultiPartition>, CrystalError>,
{
    let mut count = 0;
    let mut current = start.clone();
    while let Some(next) = step(&current)? {
        current = next;
        count += 1;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slope::SlopeBase;

    #[test]
    fn small_exhaustive_runs_clean() {
        let xi = SlopeDatum::make_generic(SlopeBase::from_ints(&[1, 1, 1])).unwrap();
        let report = exhaustive(&xi, 2, &[0], 5).unwrap();
        assert!(report.is_ok(), "{:?}", report.failures);
        assert_eq!(report.counts.enumerated, 1 + 1 + 2 + 3 + 5 + 7);
        assert_eq!(report.counts.generated, report.counts.regular);
    }

    #[test]
    fn operators_consistent_on_small_graph() {
        let xi = SlopeDatum::make_row(SlopeBase::from_ints(&[2, 1, 1, 2])).unwrap();
        let g = generate(&xi, 3, &[0, 1], 4, false).unwrap();
        assert_eq!(operator_consistency(&xi, &g).unwrap(), None);
    }
}
