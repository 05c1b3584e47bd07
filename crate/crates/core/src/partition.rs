//! Partitions, colored multi-partitions and their addable/removable nodes.
//!
//! Boxes use 1-based coordinates `(k; i, j)`: `k` selects the component,
//! `i` the row and `j` the column. The color of a box is
//! `p(k) - i + j mod n`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A residue class in `Z/n`, always stored reduced into `0..n`.
pub type Residue = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("parts must be positive and weakly decreasing, got {0:?}")]
    NotAPartition(Vec<u32>),
    #[error("modulus n must be at least 2, got {0}")]
    BadModulus(u32),
    #[error("a multi-partition needs at least one component")]
    NoComponents,
    #[error("coloring has {coloring} entries but there are {partitions} partitions")]
    LengthMismatch { coloring: usize, partitions: usize },
    #[error("residue {residue} is out of range for n = {n}")]
    ResidueOutOfRange { residue: u32, n: u32 },
    #[error("component index {k} is out of range 1..={len}")]
    ComponentOutOfRange { k: usize, len: usize },
    #[error("box {0} cannot be added")]
    NotAddable(Cell),
    #[error("box {0} cannot be removed")]
    NotRemovable(Cell),
}

/// A box `(k; i, j)` of a multi-partition (all coordinates 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub k: usize,
    pub i: u32,
    pub j: u32,
}

impl Cell {
    pub fn new(k: usize, i: u32, j: u32) -> Self {
        debug_assert!(k >= 1 && i >= 1 && j >= 1, "cells are 1-based");
        Cell { k, i, j }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{},{})", self.k, self.i, self.j)
    }
}

/// A weakly decreasing sequence of positive integers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = PartitionError;

    fn try_from(parts: Vec<u32>) -> Result<Self, Self::Error> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl Partition {
    /// Builds a partition, rejecting zero parts and increases.
    pub fn new(parts: Vec<u32>) -> Result<Self, PartitionError> {
        let ok = parts.iter().all(|&p| p > 0) && parts.windows(2).all(|w| w[0] >= w[1]);
        if ok {
            Ok(Partition { parts })
        } else {
            Err(PartitionError::NotAPartition(parts))
        }
    }

    pub fn empty() -> Self {
        Partition::default()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    /// The `i`-th part (1-based), zero past the last row.
    pub fn part(&self, i: u32) -> u32 {
        if i == 0 {
            return 0;
        }
        self.parts.get(i as usize - 1).copied().unwrap_or(0)
    }

    pub fn contains(&self, i: u32, j: u32) -> bool {
        i >= 1 && j >= 1 && j <= self.part(i)
    }

    /// The conjugate partition: `λ'_j = #{ i | λ_i ≥ j }`.
    pub fn dual(&self) -> Partition {
        let width = self.part(1);
        let parts = (1..=width)
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count() as u32)
            .collect();
        Partition { parts }
    }

    /// `λ'_j`, the length of column `j`.
    pub fn column(&self, j: u32) -> u32 {
        if j == 0 {
            return 0;
        }
        self.parts.iter().take_while(|&&p| p >= j).count() as u32
    }

    /// `λ_i - j`; negative when the box lies outside the diagram.
    pub fn arm(&self, i: u32, j: u32) -> i64 {
        self.part(i) as i64 - j as i64
    }

    /// `λ'_j - i`; negative when the box lies outside the diagram.
    pub fn leg(&self, i: u32, j: u32) -> i64 {
        self.column(j) as i64 - i as i64
    }

    pub fn hook(&self, i: u32, j: u32) -> i64 {
        self.arm(i, j) + self.leg(i, j) + 1
    }

    /// Positions `(i, j)` where a box can be added, top row first.
    pub fn addable(&self) -> Vec<(u32, u32)> {
        let rows = self.parts.len() as u32;
        (1..=rows + 1)
            .filter_map(|i| {
                let j = self.part(i) + 1;
                (i == 1 || self.part(i - 1) >= j).then_some((i, j))
            })
            .collect()
    }

    /// Positions `(i, j)` of boxes whose removal leaves a partition.
    pub fn removable(&self) -> Vec<(u32, u32)> {
        let rows = self.parts.len() as u32;
        (1..=rows)
            .filter_map(|i| {
                let j = self.part(i);
                (self.part(i + 1) < j).then_some((i, j))
            })
            .collect()
    }

    pub fn with_added(&self, i: u32, j: u32) -> Option<Partition> {
        if !self.addable().contains(&(i, j)) {
            return None;
        }
        let mut parts = self.parts.clone();
        if i as usize > parts.len() {
            parts.push(1);
        } else {
            parts[i as usize - 1] += 1;
        }
        Some(Partition { parts })
    }

    pub fn with_removed(&self, i: u32, j: u32) -> Option<Partition> {
        if !self.removable().contains(&(i, j)) {
            return None;
        }
        let mut parts = self.parts.clone();
        parts[i as usize - 1] -= 1;
        if parts[i as usize - 1] == 0 {
            parts.pop();
        }
        Some(Partition { parts })
    }

    /// Iterates over the boxes `(i, j)` of the diagram row by row.
    pub fn cells(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (1..=len).map(move |j| (r as u32 + 1, j)))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (t, p) in self.parts.iter().enumerate() {
            if t > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Reduces an arbitrary integer into `0..n`.
pub fn residue(value: i64, n: u32) -> Residue {
    value.rem_euclid(n as i64) as Residue
}

/// An `ℓ`-tuple of partitions with a coloring `p: {1..ℓ} → Z/n`.
///
/// Field order matches the canonical JSON encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawMultiPartition")]
pub struct ColoredMultiPartition {
    n: u32,
    coloring: Vec<Residue>,
    partitions: Vec<Partition>,
}

#[derive(Deserialize)]
struct RawMultiPartition {
    n: u32,
    coloring: Vec<Residue>,
    partitions: Vec<Partition>,
}

impl TryFrom<RawMultiPartition> for ColoredMultiPartition {
    type Error = PartitionError;

    fn try_from(raw: RawMultiPartition) -> Result<Self, Self::Error> {
        ColoredMultiPartition::new(raw.n, raw.coloring, raw.partitions)
    }
}

impl ColoredMultiPartition {
    pub fn new(
        n: u32,
        coloring: Vec<Residue>,
        partitions: Vec<Partition>,
    ) -> Result<Self, PartitionError> {
        check_coloring(n, &coloring)?;
        if coloring.len() != partitions.len() {
            return Err(PartitionError::LengthMismatch {
                coloring: coloring.len(),
                partitions: partitions.len(),
            });
        }
        Ok(ColoredMultiPartition { n, coloring, partitions })
    }

    /// The multi-partition with every component empty.
    pub fn empty(n: u32, coloring: Vec<Residue>) -> Result<Self, PartitionError> {
        let partitions = vec![Partition::empty(); coloring.len()];
        Self::new(n, coloring, partitions)
    }

    /// Convenience constructor from raw part lists.
    pub fn from_parts(
        n: u32,
        coloring: Vec<Residue>,
        parts: Vec<Vec<u32>>,
    ) -> Result<Self, PartitionError> {
        let partitions = parts.into_iter().map(Partition::new).collect::<Result<_, _>>()?;
        Self::new(n, coloring, partitions)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coloring(&self) -> &[Residue] {
        &self.coloring
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// Number of components `ℓ`.
    pub fn components(&self) -> usize {
        self.partitions.len()
    }

    /// `λ(k)` for 1-based `k`.
    pub fn component(&self, k: usize) -> &Partition {
        &self.partitions[k - 1]
    }

    /// Total box count `|λ|`.
    pub fn size(&self) -> usize {
        self.partitions.iter().map(Partition::size).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.iter().all(Partition::is_empty)
    }

    pub fn contains(&self, b: Cell) -> bool {
        b.k >= 1 && b.k <= self.components() && self.component(b.k).contains(b.i, b.j)
    }

    /// `p(k) - i + j mod n`, defined for any position.
    pub fn color_of(&self, b: Cell) -> Residue {
        let p = self.coloring[b.k - 1] as i64;
        residue(p - b.i as i64 + b.j as i64, self.n)
    }

    /// Number of boxes of each color, indexed by residue.
    pub fn content(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n as usize];
        for b in self.cells() {
            counts[self.color_of(b) as usize] += 1;
        }
        counts
    }

    /// Number of components colored with each residue (the type `w`).
    pub fn color_type(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n as usize];
        for &p in &self.coloring {
            counts[p as usize] += 1;
        }
        counts
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.partitions
            .iter()
            .enumerate()
            .flat_map(|(idx, part)| part.cells().map(move |(i, j)| Cell::new(idx + 1, i, j)))
    }

    /// All addable boxes `A(λ)`, ordered by component then row.
    pub fn all_addable(&self) -> Vec<Cell> {
        self.partitions
            .iter()
            .enumerate()
            .flat_map(|(idx, part)| {
                part.addable().into_iter().map(move |(i, j)| Cell::new(idx + 1, i, j))
            })
            .collect()
    }

    /// All removable boxes `R(λ)`, ordered by component then row.
    pub fn all_removable(&self) -> Vec<Cell> {
        self.partitions
            .iter()
            .enumerate()
            .flat_map(|(idx, part)| {
                part.removable().into_iter().map(move |(i, j)| Cell::new(idx + 1, i, j))
            })
            .collect()
    }

    /// Addable `ī`-nodes `A_ī(λ)`.
    pub fn addable_nodes(&self, color: Residue) -> Vec<Cell> {
        self.all_addable().into_iter().filter(|&b| self.color_of(b) == color).collect()
    }

    /// Removable `ī`-nodes `R_ī(λ)`.
    pub fn removable_nodes(&self, color: Residue) -> Vec<Cell> {
        self.all_removable().into_iter().filter(|&b| self.color_of(b) == color).collect()
    }

    pub fn add_box(&self, b: Cell) -> Result<Self, PartitionError> {
        self.check_component(b.k)?;
        let part = self.partitions[b.k - 1]
            .with_added(b.i, b.j)
            .ok_or(PartitionError::NotAddable(b))?;
        let mut next = self.clone();
        next.partitions[b.k - 1] = part;
        Ok(next)
    }

    pub fn remove_box(&self, b: Cell) -> Result<Self, PartitionError> {
        self.check_component(b.k)?;
        let part = self.partitions[b.k - 1]
            .with_removed(b.i, b.j)
            .ok_or(PartitionError::NotRemovable(b))?;
        let mut next = self.clone();
        next.partitions[b.k - 1] = part;
        Ok(next)
    }

    fn check_component(&self, k: usize) -> Result<(), PartitionError> {
        if k == 0 || k > self.components() {
            Err(PartitionError::ComponentOutOfRange { k, len: self.components() })
        } else {
            Ok(())
        }
    }

    /// Canonical JSON: `{"n":…,"coloring":[…],"partitions":[[…]…]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("multi-partition serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl fmt::Display for ColoredMultiPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (t, p) in self.partitions.iter().enumerate() {
            if t > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn check_coloring(n: u32, coloring: &[Residue]) -> Result<(), PartitionError> {
    if n < 2 {
        return Err(PartitionError::BadModulus(n));
    }
    if coloring.is_empty() {
        return Err(PartitionError::NoComponents);
    }
    if let Some(&residue) = coloring.iter().find(|&&r| r >= n) {
        return Err(PartitionError::ResidueOutOfRange { residue, n });
    }
    Ok(())
}

/// All partitions of exactly `m`, in reverse lexicographic order.
pub fn partitions_of(m: u32) -> Vec<Partition> {
    fn go(remaining: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: prefix.clone() });
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            prefix.push(part);
            go(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(m, m, &mut Vec::new(), &mut out);
    out
}

/// Every colored multi-partition with the given coloring and at most
/// `max_boxes` boxes in total.
pub fn multipartitions_up_to(
    n: u32,
    coloring: &[Residue],
    max_boxes: usize,
) -> Result<Vec<ColoredMultiPartition>, PartitionError> {
    check_coloring(n, coloring)?;
    let by_size: Vec<Vec<Partition>> = (0..=max_boxes as u32).map(partitions_of).collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(coloring.len());
    fill(&by_size, coloring.len(), max_boxes, &mut current, &mut |parts| {
        out.push(ColoredMultiPartition { n, coloring: coloring.to_vec(), partitions: parts.to_vec() });
    });
    Ok(out)
}

fn fill(
    by_size: &[Vec<Partition>],
    slots: usize,
    budget: usize,
    current: &mut Vec<Partition>,
    emit: &mut dyn FnMut(&[Partition]),
) {
    if current.len() == slots {
        emit(current);
        return;
    }
    for (size, parts) in by_size.iter().enumerate().take(budget + 1) {
        for p in parts {
            current.push(p.clone());
            fill(by_size, slots, budget - size, current, emit);
            current.pop();
        }
    }
}
