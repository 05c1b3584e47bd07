//! Laurent monomials in `Y_{ī,k}` with crystal operators for
//! arbitrary edge constants, and the map `Ψ` from multi-partitions.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crystal::{cancel_brackets, e_op, Bracket, CrystalError};
use crate::graph::{CrystalGraph, RootedCrystal};
use crate::partition::{residue, Cell, ColoredMultiPartition, Residue};
use crate::slope::{rational_to_i64, SlopeBase, SlopeDatum, SlopeError, SlopeMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonomialError {
    #[error("edge constants violate c+(ī) + c-(ī+1) = K at ī = {0}")]
    NotConstant(Residue),
    #[error("edge constants need one entry per residue (n = {n}), got {got}")]
    WrongLength { n: u32, got: usize },
    #[error("modulus n must be at least 2, got {0}")]
    BadModulus(u32),
    #[error("slope datum is not integral")]
    NotIntegral,
    #[error("monomial uses modulus {got}, expected {expected}")]
    ModulusMismatch { expected: u32, got: u32 },
    #[error("monomial is not dominant")]
    NotDominant,
    #[error(transparent)]
    Crystal(#[from] CrystalError),
    #[error(transparent)]
    Slope(#[from] SlopeError),
}

/// A finitely supported product `∏ Y_{ī,k}^{y_{ī,k}}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    n: u32,
    exps: BTreeMap<(Residue, i64), i64>,
}

impl Monomial {
    pub fn identity(n: u32) -> Self {
        Monomial { n, exps: BTreeMap::new() }
    }

    /// `Y_{ī,k}^e`.
    pub fn var(n: u32, color: Residue, level: i64, exp: i64) -> Self {
        let mut m = Monomial::identity(n);
        m.bump(residue(color as i64, n), level, exp);
        m
    }

    /// Builds a monomial from `(residue, level, exponent)` factors.
    pub fn from_factors(n: u32, factors: &[(Residue, i64, i64)]) -> Self {
        let mut m = Monomial::identity(n);
        for &(c, level, e) in factors {
            m.bump(residue(c as i64, n), level, e);
        }
        m
    }

    fn bump(&mut self, color: Residue, level: i64, exp: i64) {
        let slot = self.exps.entry((color, level)).or_insert(0);
        *slot += exp;
        if *slot == 0 {
            self.exps.remove(&(color, level));
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn exponent(&self, color: Residue, level: i64) -> i64 {
        self.exps.get(&(color, level)).copied().unwrap_or(0)
    }

    /// Nonzero exponents in `(residue, level)` order.
    pub fn factors(&self) -> impl Iterator<Item = (Residue, i64, i64)> + '_ {
        self.exps.iter().map(|(&(c, k), &e)| (c, k, e))
    }

    pub fn is_identity(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (c, k, e) in other.factors() {
            out.bump(c, k, e);
        }
        out
    }

    pub fn inverse(&self) -> Monomial {
        Monomial { n: self.n, exps: self.exps.iter().map(|(&key, &e)| (key, -e)).collect() }
    }

    /// Shifts every level by `delta`.
    pub fn shift(&self, delta: i64) -> Monomial {
        Monomial { n: self.n, exps: self.exps.iter().map(|(&(c, k), &e)| ((c, k + delta), e)).collect() }
    }

    /// `(level, exponent)` pairs of one residue in increasing level.
    fn row(&self, color: Residue) -> Vec<(i64, i64)> {
        self.exps.range((color, i64::MIN)..=(color, i64::MAX)).map(|(&(_, k), &e)| (k, e)).collect()
    }

    pub fn is_dominant(&self) -> bool {
        self.exps.values().all(|&e| e > 0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MonomialJson::from(self)).expect("monomial serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Monomial, serde_json::Error> {
        let wire: MonomialJson = serde_json::from_str(text)?;
        Ok(Monomial::from_factors(
            wire.n,
            &wire.factors.iter().map(|f| (f.residue, f.level, f.exp)).collect::<Vec<_>>(),
        ))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        for (t, (c, k, e)) in self.factors().enumerate() {
            if t > 0 {
                write!(f, " ")?;
            }
            write!(f, "Y({c},{k})")?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct FactorJson {
    residue: Residue,
    level: i64,
    exp: i64,
}

#[derive(Serialize, Deserialize)]
struct MonomialJson {
    n: u32,
    factors: Vec<FactorJson>,
}

impl From<&Monomial> for MonomialJson {
    fn from(m: &Monomial) -> Self {
        MonomialJson {
            n: m.n,
            factors: m.factors().map(|(residue, level, exp)| FactorJson { residue, level, exp }).collect(),
        }
    }
}

/// Edge constants `c+(ī) = c_{ī,ī+1}` and `c-(ī) = c_{ī,ī-1}` with
/// `c+(ī) + c-(ī+1) = K` for every `ī`.
///
/// Storing the constants per direction keeps `A_{ī,k}` unambiguous for
/// `n = 2`, where `ī+1 = ī-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeConstants {
    n: u32,
    c_plus: Vec<i64>,
    c_minus: Vec<i64>,
    k: i64,
}

impl EdgeConstants {
    pub fn new(n: u32, c_plus: Vec<i64>, c_minus: Vec<i64>) -> Result<Self, MonomialError> {
        if n < 2 {
            return Err(MonomialError::BadModulus(n));
        }
        for v in [&c_plus, &c_minus] {
            if v.len() != n as usize {
                return Err(MonomialError::WrongLength { n, got: v.len() });
            }
        }
        let k = c_plus[0] + c_minus[1 % n as usize];
        for color in 0..n as usize {
            if c_plus[color] + c_minus[(color + 1) % n as usize] != k {
                return Err(MonomialError::NotConstant(color as Residue));
            }
        }
        Ok(EdgeConstants { n, c_plus, c_minus, k })
    }

    /// The same pair of constants on every edge.
    pub fn uniform(n: u32, c_plus: i64, c_minus: i64) -> Result<Self, MonomialError> {
        Self::new(n, vec![c_plus; n as usize], vec![c_minus; n as usize])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn c_plus(&self, color: Residue) -> i64 {
        self.c_plus[color as usize]
    }

    pub fn c_minus(&self, color: Residue) -> i64 {
        self.c_minus[color as usize]
    }
}

fn integral_base(xi: &SlopeDatum) -> Result<(i64, i64, Vec<i64>), MonomialError> {
    let base = xi.base();
    let get = |r| rational_to_i64(r).ok_or(MonomialError::NotIntegral);
    let xs = base.xi.iter().map(get).collect::<Result<Vec<_>, _>>()?;
    Ok((get(&base.omega)?, get(&base.omega_bar)?, xs))
}

/// `c+ ≡ ξ_Ω̄`, `c- ≡ ξ_Ω`, `K = ξ_Ω + ξ_Ω̄`, read from the rational base.
pub fn constants_from_slope(xi: &SlopeDatum, n: u32) -> Result<EdgeConstants, MonomialError> {
    let (omega, omega_bar, _) = integral_base(xi)?;
    EdgeConstants::uniform(n, omega_bar, omega)
}

/// `A_{ī,k} = Y_{ī,k} Y_{ī,k+K} Y_{ī+1,k+c+(ī)}^{-1} Y_{ī-1,k+c-(ī)}^{-1}`.
pub fn a_monomial(c: &EdgeConstants, color: Residue, level: i64) -> Monomial {
    let n = c.n;
    let up = residue(color as i64 + 1, n);
    let down = residue(color as i64 - 1, n);
    Monomial::from_factors(
        n,
        &[
            (color, level, 1),
            (color, level + c.k, 1),
            (up, level + c.c_plus(color), -1),
            (down, level + c.c_minus(color), -1),
        ],
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialStats {
    /// `wt_ī = Σ_k y_{ī,k}` for every residue.
    pub wt: Vec<i64>,
    pub eps: i64,
    pub phi: i64,
    /// Level of the `Y^{-1}` factor that `e` acts on.
    pub k_e: Option<i64>,
    /// Level of the `Y` factor that `f` acts on.
    pub k_f: Option<i64>,
}

/// Weight, `ε_ī`, `φ_ī` and the levels `k_e`, `k_f` from running sums.
///
/// `φ = max_k Σ_{s≤k} y_s` and `k_f` is the least level attaining it;
/// `ε = -min_k Σ_{s≥k} y_s` and `k_e` is the greatest level attaining it.
/// The empty sums at `±∞` contribute the value 0.
pub fn stats(m: &Monomial, color: Residue) -> MonomialStats {
    let mut wt = vec![0; m.n as usize];
    for (c, _, e) in m.factors() {
        wt[c as usize] += e;
    }
    let row = m.row(color);

    let (mut phi, mut k_f, mut prefix) = (0, None, 0);
    for &(k, e) in &row {
        prefix += e;
        if prefix > phi {
            phi = prefix;
            k_f = Some(k);
        }
    }
    let (mut low, mut k_e, mut suffix) = (0, None, 0);
    for &(k, e) in row.iter().rev() {
        suffix += e;
        if suffix < low {
            low = suffix;
            k_e = Some(k);
        }
    }
    MonomialStats { wt, eps: -low, phi, k_e, k_f }
}

/// `f̃_ī` from the running-sum definition.
pub fn f_direct(c: &EdgeConstants, m: &Monomial, color: Residue) -> Option<Monomial> {
    let s = stats(m, color);
    s.k_f.map(|k| a_monomial(c, color, k).inverse().mul(m))
}

/// `ẽ_ī` from the running-sum definition.
pub fn e_direct(c: &EdgeConstants, m: &Monomial, color: Residue) -> Option<Monomial> {
    let s = stats(m, color);
    s.k_e.map(|k| a_monomial(c, color, k - c.k).mul(m))
}

/// `(` per `Y_{ī,k}` factor and `)` per `Y_{ī,k}^{-1}` factor, by
/// decreasing `k`, with each bracket's level.
pub fn monomial_brackets(m: &Monomial, color: Residue) -> Vec<(Bracket, i64)> {
    let mut out = Vec::new();
    for (k, e) in m.row(color).into_iter().rev() {
        let b = if e > 0 { Bracket::Open } else { Bracket::Close };
        out.extend(std::iter::repeat_n((b, k), e.unsigned_abs() as usize));
    }
    out
}

fn reduced_brackets(m: &Monomial, color: Residue) -> Vec<(Bracket, i64)> {
    let brackets = monomial_brackets(m, color);
    let kinds: Vec<Bracket> = brackets.iter().map(|b| b.0).collect();
    let canceled = cancel_brackets(&kinds);
    brackets.into_iter().zip(canceled).filter(|(_, c)| !c).map(|(b, _)| b).collect()
}

/// `f̃_ī` from the bracket rule.
pub fn f_bracket(c: &EdgeConstants, m: &Monomial, color: Residue) -> Option<Monomial> {
    let live = reduced_brackets(m, color);
    let (_, k) = live.into_iter().find(|b| b.0 == Bracket::Open)?;
    Some(a_monomial(c, color, k).inverse().mul(m))
}

/// `ẽ_ī` from the bracket rule.
pub fn e_bracket(c: &EdgeConstants, m: &Monomial, color: Residue) -> Option<Monomial> {
    let live = reduced_brackets(m, color);
    let (_, k) = live.into_iter().rev().find(|b| b.0 == Bracket::Close)?;
    Some(a_monomial(c, color, k - c.k).mul(m))
}

/// `Ψ(λ) = ∏_{a∈A} Y_{c(a),h(a)} · ∏_{r∈R} Y_{c(r),h(r)+K}^{-1}` using the
/// integral base heights of `xi`.
pub fn psi(xi: &SlopeDatum, mp: &ColoredMultiPartition) -> Result<Monomial, MonomialError> {
    let (omega, omega_bar, xs) = integral_base(xi)?;
    let k_total = omega + omega_bar;
    let height = |b: Cell| xs[b.k - 1] + omega * b.i as i64 + omega_bar * b.j as i64;
    let mut m = Monomial::identity(mp.n());
    for a in mp.all_addable() {
        m.bump(mp.color_of(a), height(a), 1);
    }
    for r in mp.all_removable() {
        m.bump(mp.color_of(r), height(r) + k_total, -1);
    }
    Ok(m)
}

/// Dominant (all exponents nonnegative) with support levels spanning less
/// than `K`.
pub fn is_aligned_dominant(m: &Monomial, k: i64) -> bool {
    if !m.is_dominant() {
        return false;
    }
    let levels = || m.factors().map(|(_, level, _)| level);
    match (levels().min(), levels().max()) {
        (Some(lo), Some(hi)) => hi - lo < k,
        _ => true,
    }
}

/// A slope datum (row order) whose empty multi-partition maps to `m` under
/// `Ψ`, up to the returned level shift: `Ψ(∅) = m.shift(shift)`.
pub fn realizing_datum(
    m: &Monomial,
    omega: i64,
    omega_bar: i64,
) -> Result<(SlopeDatum, Vec<Residue>, i64), MonomialError> {
    if !m.is_dominant() || m.is_identity() {
        return Err(MonomialError::NotDominant);
    }
    let k_total = omega + omega_bar;
    let lowest = m.factors().map(|(_, level, _)| level).min().expect("nonempty");
    // each factor Y_{ī,L} becomes a component colored ī with ξ_k = L + shift - K ≥ 1
    let shift = k_total + 1 - lowest;
    let mut coloring = Vec::new();
    let mut xs = Vec::new();
    for (c, level, e) in m.factors() {
        for _ in 0..e {
            coloring.push(c);
            xs.push(level + shift - k_total);
        }
    }
    let mut values = vec![omega, omega_bar];
    values.extend(xs);
    let datum = SlopeDatum::build(SlopeMode::Row, SlopeBase::from_ints(&values))?;
    Ok((datum, coloring, shift))
}

/// Closure of a monomial under `f̃` up to `max_depth` steps.
#[derive(Debug, Clone)]
pub struct MonomialGraph {
    n: u32,
    max_depth: usize,
    vertices: Vec<Monomial>,
    depth: Vec<usize>,
    out: Vec<Vec<Option<usize>>>,
}

impl MonomialGraph {
    pub fn vertices(&self) -> &[Monomial] {
        &self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().flatten().flatten().count()
    }
}

pub fn monomial_closure(c: &EdgeConstants, root: &Monomial, max_depth: usize) -> MonomialGraph {
    let n = c.n();
    let mut g = MonomialGraph {
        n,
        max_depth,
        vertices: vec![root.clone()],
        depth: vec![0],
        out: vec![vec![None; n as usize]],
    };
    let mut index = HashMap::from([(root.clone(), 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        if g.depth[v] >= max_depth {
            continue;
        }
        for color in 0..n {
            let Some(next) = f_direct(c, &g.vertices[v], color) else { continue };
            let target = *index.entry(next.clone()).or_insert_with(|| {
                g.vertices.push(next);
                g.depth.push(g.depth[v] + 1);
                g.out.push(vec![None; n as usize]);
                queue.push_back(g.vertices.len() - 1);
                g.vertices.len() - 1
            });
            g.out[v][color as usize] = Some(target);
        }
    }
    g
}

impl RootedCrystal for MonomialGraph {
    fn residues(&self) -> u32 {
        self.n
    }

    fn root(&self) -> usize {
        0
    }

    fn successor(&self, v: usize, color: Residue) -> Option<usize> {
        self.out[v][color as usize]
    }

    fn is_frontier(&self, v: usize) -> bool {
        self.depth[v] >= self.max_depth
    }

    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
}

/// Returns a pair `(a, r)` with `a ∈ A_ī`, `r = (k;i,j) ∈ R_ī` for which
/// `a ≺ r` and `a ≺ (k;i+1,j+1)` disagree, if one exists.
pub fn corner_order_violation(xi: &SlopeDatum, mp: &ColoredMultiPartition) -> Option<(Cell, Cell)> {
    for color in 0..mp.n() {
        for r in mp.removable_nodes(color) {
            let corner = Cell::new(r.k, r.i + 1, r.j + 1);
            for a in mp.addable_nodes(color) {
                let below_r = xi.height(a) < xi.height(r);
                let below_corner = xi.height(a) < xi.height(corner);
                if below_r != below_corner {
                    return Some((a, r));
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiWitness {
    pub vertex: ColoredMultiPartition,
    pub residue: Option<Residue>,
    pub check: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PsiOutcome {
    Commutes { vertices: usize, edges: usize },
    Counterexample(PsiWitness),
}

impl PsiOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, PsiOutcome::Commutes { .. })
    }
}

/// Checks that `Ψ` intertwines the operators on every vertex of `g`, that
/// each edge multiplies `Ψ` by `A^{-1}` at the added box, and that weights
/// agree.
///
/// `xi` must have an integral base; plain data are re-perturbed in row
/// order, which is the order the graph is expected to be generated with.
pub fn verify_psi_commutes(
    xi: &SlopeDatum,
    c: &EdgeConstants,
    g: &CrystalGraph,
) -> Result<PsiOutcome, MonomialError> {
    integral_base(xi)?;
    if c.n() != g.n() {
        return Err(MonomialError::ModulusMismatch { expected: g.n(), got: c.n() });
    }
    let ops = if xi.mode() == SlopeMode::Plain { xi.with_mode(SlopeMode::Row)? } else { xi.clone() };
    let n = g.n();
    let images: Vec<Monomial> = g.vertices().iter().map(|v| psi(xi, v)).collect::<Result<_, _>>()?;
    let fail = |v: usize, residue: Option<Residue>, check: &str| {
        Ok(PsiOutcome::Counterexample(PsiWitness {
            vertex: g.vertices()[v].clone(),
            residue,
            check: check.to_string(),
        }))
    };

    for (v, mp) in g.vertices().iter().enumerate() {
        let content = mp.content();
        let types = mp.color_type();
        let image_wt = stats(&images[v], 0).wt;
        for color in 0..n as usize {
            let up = (color + 1) % n as usize;
            let down = (color + n as usize - 1) % n as usize;
            let expected = types[color] as i64 - 2 * content[color] as i64 + content[up] as i64 + content[down] as i64;
            if image_wt[color] != expected {
                return fail(v, Some(color as Residue), "wt(Ψ(λ)) = wt(λ)");
            }
        }
        for color in 0..n {
            if !g.is_frontier(v) {
                let lhs = g.successor(v, color).map(|t| &images[t]);
                let rhs = f_direct(c, &images[v], color);
                if lhs != rhs.as_ref() {
                    return fail(v, Some(color), "Ψ(f λ) = f̃ Ψ(λ)");
                }
            }
            let lhs = e_op(&ops, mp, color)?.map(|t| psi(xi, &t)).transpose()?;
            if lhs != e_direct(c, &images[v], color) {
                return fail(v, Some(color), "Ψ(e λ) = ẽ Ψ(λ)");
            }
        }
    }

    let (omega, omega_bar, xs) = integral_base(xi)?;
    for edge in g.edges() {
        let source = &g.vertices()[edge.source];
        let target = &g.vertices()[edge.target];
        let added = target.cells().find(|b| !source.contains(*b)).expect("edges add one box");
        let h = xs[added.k - 1] + omega * added.i as i64 + omega_bar * added.j as i64;
        let step = a_monomial(c, target.color_of(added), h).inverse().mul(&images[edge.source]);
        if step != images[edge.target] {
            return fail(edge.source, Some(edge.residue), "Ψ(λ ⊔ b) = A^{-1} Ψ(λ)");
        }
    }
    Ok(PsiOutcome::Commutes { vertices: g.vertices().len(), edges: g.edges().len() })
}
