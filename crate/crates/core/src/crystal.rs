//! Bracket strings and the crystal operators `e_ī`, `f_ī` on multi-partitions.

use thiserror::Error;

use crate::partition::{Cell, ColoredMultiPartition, PartitionError, Residue};
use crate::slope::{SlopeDatum, SlopeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrystalError {
    #[error(transparent)]
    Slope(#[from] SlopeError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("residue {residue} is out of range for n = {n}")]
    BadResidue { residue: Residue, n: u32 },
    #[error("slope datum has {datum} components but the coloring has {coloring}")]
    ComponentMismatch { datum: usize, coloring: usize },
    #[error("slope datum is not aligned; pass allow_nonaligned to generate anyway")]
    NotAligned,
    #[error("slope datum in plain mode does not totally order boxes")]
    NotPerturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bracket {
    /// An addable node, written `(`.
    Open,
    /// A removable node, written `)`.
    Close,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BracketEntry {
    pub bracket: Bracket,
    pub cell: Cell,
}

/// Addable and removable `ī`-nodes in decreasing height, with the mask left
/// by cancelling adjacent `()` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketString {
    entries: Vec<BracketEntry>,
    canceled: Vec<bool>,
}

impl BracketString {
    pub fn entries(&self) -> &[BracketEntry] {
        &self.entries
    }

    pub fn canceled(&self) -> &[bool] {
        &self.canceled
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn uncanceled(&self) -> impl DoubleEndedIterator<Item = &BracketEntry> {
        self.entries.iter().zip(&self.canceled).filter(|(_, &c)| !c).map(|(e, _)| e)
    }

    /// Number of uncanceled `)`.
    pub fn epsilon(&self) -> usize {
        self.uncanceled().filter(|e| e.bracket == Bracket::Close).count()
    }

    /// Number of uncanceled `(`.
    pub fn phi(&self) -> usize {
        self.uncanceled().filter(|e| e.bracket == Bracket::Open).count()
    }

    /// Box of the first uncanceled `(` from the left.
    pub fn first_open(&self) -> Option<Cell> {
        self.uncanceled().find(|e| e.bracket == Bracket::Open).map(|e| e.cell)
    }

    /// Box of the first uncanceled `)` from the right.
    pub fn last_close(&self) -> Option<Cell> {
        self.uncanceled().rev().find(|e| e.bracket == Bracket::Close).map(|e| e.cell)
    }

    /// Renders as e.g. `"(()("`.
    pub fn symbols(&self) -> String {
        self.entries.iter().map(|e| bracket_char(e.bracket)).collect()
    }

    /// Renders only the uncanceled brackets, always of the form `)…)(…(`.
    pub fn reduced(&self) -> String {
        self.uncanceled().map(|e| bracket_char(e.bracket)).collect()
    }
}

fn bracket_char(b: Bracket) -> char {
    match b {
        Bracket::Open => '(',
        Bracket::Close => ')',
    }
}

/// Marks matched `()` pairs; equivalent to repeatedly deleting adjacent
/// uncanceled `()` until none remain.
pub fn cancel_brackets(brackets: &[Bracket]) -> Vec<bool> {
    let mut canceled = vec![false; brackets.len()];
    let mut open = Vec::new();
    for (idx, b) in brackets.iter().enumerate() {
        match b {
            Bracket::Open => open.push(idx),
            Bracket::Close => {
                if let Some(o) = open.pop() {
                    canceled[o] = true;
                    canceled[idx] = true;
                }
            }
        }
    }
    canceled
}

fn check_residue(mp: &ColoredMultiPartition, color: Residue) -> Result<(), CrystalError> {
    if color >= mp.n() {
        return Err(CrystalError::BadResidue { residue: color, n: mp.n() });
    }
    Ok(())
}

fn check_components(xi: &SlopeDatum, mp: &ColoredMultiPartition) -> Result<(), CrystalError> {
    if xi.components() != mp.components() {
        return Err(CrystalError::ComponentMismatch { datum: xi.components(), coloring: mp.components() });
    }
    Ok(())
}

pub fn bracket_string(
    xi: &SlopeDatum,
    mp: &ColoredMultiPartition,
    color: Residue,
) -> Result<BracketString, CrystalError> {
    check_residue(mp, color)?;
    check_components(xi, mp)?;
    let mut keyed: Vec<_> = mp
        .addable_nodes(color)
        .into_iter()
        .map(|cell| (xi.height(cell), BracketEntry { bracket: Bracket::Open, cell }))
        .chain(
            mp.removable_nodes(color)
                .into_iter()
                .map(|cell| (xi.height(cell), BracketEntry { bracket: Bracket::Close, cell })),
        )
        .collect();
    keyed.sort_by(|a, b| b.0.cmp(&a.0));
    if let Some(w) = keyed.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(SlopeError::Tie(w[0].1.cell, w[1].1.cell).into());
    }
    let entries: Vec<BracketEntry> = keyed.into_iter().map(|(_, e)| e).collect();
    let kinds: Vec<Bracket> = entries.iter().map(|e| e.bracket).collect();
    let canceled = cancel_brackets(&kinds);
    Ok(BracketString { entries, canceled })
}

/// `f_ī`: adds the box of the first uncanceled `(` from the left.
pub fn f_op(
    xi: &SlopeDatum,
    mp: &ColoredMultiPartition,
    color: Residue,
) -> Result<Option<ColoredMultiPartition>, CrystalError> {
    let s = bracket_string(xi, mp, color)?;
    s.first_open().map(|b| mp.add_box(b).map_err(CrystalError::from)).transpose()
}

/// `e_ī`: removes the box of the first uncanceled `)` from the right.
pub fn e_op(
    xi: &SlopeDatum,
    mp: &ColoredMultiPartition,
    color: Residue,
) -> Result<Option<ColoredMultiPartition>, CrystalError> {
    let s = bracket_string(xi, mp, color)?;
    s.last_close().map(|b| mp.remove_box(b).map_err(CrystalError::from)).transpose()
}

/// One letter of an operator word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    E(Residue),
    F(Residue),
}

/// Applies letters left to right; `None` once any step returns 0.
pub fn apply_word(
    xi: &SlopeDatum,
    start: &ColoredMultiPartition,
    word: &[Letter],
) -> Result<Option<ColoredMultiPartition>, CrystalError> {
    let mut current = start.clone();
    for letter in word {
        let next = match *letter {
            Letter::E(c) => e_op(xi, &current, c)?,
            Letter::F(c) => f_op(xi, &current, c)?,
        };
        match next {
            Some(mp) => current = mp,
            None => return Ok(None),
        }
    }
    Ok(Some(current))
}
