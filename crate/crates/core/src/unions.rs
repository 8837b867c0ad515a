//! Finite equivalence-relation grids.
//!
//! A [`Grid`] is a doubly indexed family `E[n][m]` of partitions of a finite
//! carrier, increasing along rows and along the last column. Everything here
//! runs on truncations: quantifiers "for all k ≥ n" stop at the last row.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// FinEqRel

/// A partition of `[0, N)` as a block-id array, blocks numbered in order of
/// their least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct FinEqRel {
    blocks: Vec<usize>,
}

impl From<Vec<usize>> for FinEqRel {
    fn from(ids: Vec<usize>) -> Self {
        FinEqRel::from_labels(&ids)
    }
}

impl From<FinEqRel> for Vec<usize> {
    fn from(r: FinEqRel) -> Self {
        r.blocks
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn into_rel(mut self) -> FinEqRel {
        let labels: Vec<usize> = (0..self.0.len()).map(|x| self.find(x)).collect();
        FinEqRel::from_labels(&labels)
    }
}

impl FinEqRel {
    /// Any labelling of points; points with equal labels share a block.
    pub fn from_labels<T: Ord + Clone>(labels: &[T]) -> Self {
        let mut ids = BTreeMap::new();
        let blocks = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        FinEqRel { blocks }
    }

    /// Δ, the equality relation.
    pub fn discrete(n: usize) -> Self {
        FinEqRel { blocks: (0..n).collect() }
    }

    pub fn full(n: usize) -> Self {
        FinEqRel { blocks: vec![0; n] }
    }

    /// Least equivalence relation containing `pairs`.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut d = Dsu::new(n);
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("pair ({a}, {b}) outside carrier of {n}")));
            }
            d.union(a, b);
        }
        Ok(d.into_rel())
    }

    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, x: usize) -> usize {
        self.blocks[x]
    }

    pub fn block_ids(&self) -> &[usize] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.iter().max().map_or(0, |m| m + 1)
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.blocks[x] == self.blocks[y]
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]; self.block_count()];
        for (x, &b) in self.blocks.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    /// All pairs `x < y` in the relation.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = vec![];
        for class in self.classes() {
            for (i, &x) in class.iter().enumerate() {
                out.extend(class[i + 1..].iter().map(|&y| (x, y)));
            }
        }
        out.sort_unstable();
        out
    }

    fn same_carrier(&self, other: &FinEqRel) -> Result<()> {
        if self.size() != other.size() {
            return Err(Error::CarrierMismatch { left: self.size(), right: other.size() });
        }
        Ok(())
    }

    /// `self ⊆ other` as sets of pairs.
    pub fn refines(&self, other: &FinEqRel) -> Result<bool> {
        self.same_carrier(other)?;
        let mut image = vec![None; self.block_count()];
        for (x, &b) in self.blocks.iter().enumerate() {
            match image[b] {
                None => image[b] = Some(other.blocks[x]),
                Some(o) if o != other.blocks[x] => return Ok(false),
                Some(_) => {}
            }
        }
        Ok(true)
    }

    pub fn meet(&self, other: &FinEqRel) -> Result<FinEqRel> {
        self.same_carrier(other)?;
        let labels: Vec<(usize, usize)> = self.blocks.iter().copied().zip(other.blocks.iter().copied()).collect();
        Ok(FinEqRel::from_labels(&labels))
    }

    pub fn join(&self, other: &FinEqRel) -> Result<FinEqRel> {
        self.same_carrier(other)?;
        let mut d = Dsu::new(self.size());
        for rel in [self, other] {
            let mut first = vec![None; rel.block_count()];
            for (x, &b) in rel.blocks.iter().enumerate() {
                match first[b] {
                    None => first[b] = Some(x),
                    Some(r) => d.union(r, x),
                }
            }
        }
        Ok(d.into_rel())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionOp {
    Refines,
    Meet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PartitionResult {
    Bool(bool),
    Rel(FinEqRel),
}

pub fn partition_ops(kind: PartitionOp, p: &FinEqRel, q: &FinEqRel) -> Result<PartitionResult> {
    match kind {
        PartitionOp::Refines => p.refines(q).map(PartitionResult::Bool),
        PartitionOp::Meet => p.meet(q).map(PartitionResult::Rel),
    }
}

/// Orbit equivalence relation of a list of permutations of `[0, n)`.
pub fn orbit_relation(n: usize, action: &[Vec<usize>]) -> FinEqRel {
    let mut d = Dsu::new(n);
    for g in action {
        for (x, &y) in g.iter().enumerate() {
            d.union(x, y);
        }
    }
    d.into_rel()
}

/// Permutations `γ_i = c^i`, where `c` cycles each class in a random order.
/// `γ_0` is the identity and the orbits are exactly the classes of `rel`.
pub fn cyclic_action<R: Rng + ?Sized>(rng: &mut R, rel: &FinEqRel) -> Vec<Vec<usize>> {
    let n = rel.size();
    let mut cycle: Vec<usize> = (0..n).collect();
    let mut longest = 1;
    for mut class in rel.classes() {
        class.shuffle(rng);
        longest = longest.max(class.len());
        for (i, &x) in class.iter().enumerate() {
            cycle[x] = class[(i + 1) % class.len()];
        }
    }
    let mut action = vec![(0..n).collect::<Vec<usize>>()];
    for i in 1..longest {
        let prev = &action[i - 1];
        action.push(prev.iter().map(|&x| cycle[x]).collect());
    }
    action
}

/// Random coarsening of `rel`: each block is merged with another with
/// probability `p`.
pub fn random_coarsening<R: Rng + ?Sized>(rng: &mut R, rel: &FinEqRel, p: f64) -> FinEqRel {
    let n = rel.size();
    let reps: Vec<usize> = rel.classes().iter().map(|c| c[0]).collect();
    let mut pairs = vec![];
    for &r in &reps {
        if rng.gen_bool(p) {
            pairs.push((r, reps[rng.gen_range(0..reps.len())]));
        }
    }
    rel.join(&FinEqRel::from_pairs(n, &pairs).expect("in range")).expect("same carrier")
}

// ---------------------------------------------------------------------------
// Grid

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    carrier: usize,
    blocks: Vec<Vec<FinEqRel>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridRepr {
    carrier: usize,
    rows: usize,
    cols: usize,
    blocks: Vec<Vec<Vec<usize>>>,
}

impl TryFrom<GridRepr> for Grid {
    type Error = Error;

    fn try_from(r: GridRepr) -> Result<Self> {
        if r.blocks.len() != r.rows || r.blocks.iter().any(|row| row.len() != r.cols) {
            return Err(Error::Shape(format!("blocks do not form a {}x{} grid", r.rows, r.cols)));
        }
        let blocks = r
            .blocks
            .into_iter()
            .map(|row| row.into_iter().map(FinEqRel::from).collect())
            .collect();
        let g = Grid::new(blocks)?;
        if g.carrier != r.carrier {
            return Err(Error::CarrierMismatch { left: r.carrier, right: g.carrier });
        }
        Ok(g)
    }
}

impl From<Grid> for GridRepr {
    fn from(g: Grid) -> Self {
        GridRepr {
            carrier: g.carrier,
            rows: g.rows(),
            cols: g.cols(),
            blocks: g.blocks.into_iter().map(|row| row.into_iter().map(Vec::from).collect()).collect(),
        }
    }
}

impl Grid {
    /// Checks shape, row monotonicity and monotonicity of the last column.
    pub fn new(blocks: Vec<Vec<FinEqRel>>) -> Result<Self> {
        let cols = blocks.first().map_or(0, Vec::len);
        if cols == 0 || blocks.iter().any(|row| row.len() != cols) {
            return Err(Error::Shape("grid rows must be nonempty and equally long".into()));
        }
        let carrier = blocks[0][0].size();
        for (n, row) in blocks.iter().enumerate() {
            for (m, e) in row.iter().enumerate() {
                if e.size() != carrier {
                    return Err(Error::CarrierMismatch { left: carrier, right: e.size() });
                }
                if m > 0 && !row[m - 1].refines(e)? {
                    return Err(Error::Invalid(format!("row {n} not increasing at column {m}")));
                }
            }
            if n > 0 && !blocks[n - 1][cols - 1].refines(&row[cols - 1])? {
                return Err(Error::Invalid(format!("row limits not increasing at row {n}")));
            }
        }
        Ok(Grid { carrier, blocks })
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn rows(&self) -> usize {
        self.blocks.len()
    }

    pub fn cols(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn get(&self, n: usize, m: usize) -> &FinEqRel {
        &self.blocks[n][m]
    }

    /// `E_n`, the last element of row `n`.
    pub fn row_limit(&self, n: usize) -> &FinEqRel {
        &self.blocks[n][self.cols() - 1]
    }

    /// `E`, the top-right element.
    pub fn top(&self) -> &FinEqRel {
        self.row_limit(self.rows() - 1)
    }

    /// A random grid whose entries, read row by row, form a coarsening chain.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, carrier: usize, rows: usize, cols: usize) -> Grid {
        let p = 1.0 / (rows * cols) as f64;
        let mut cur = FinEqRel::discrete(carrier);
        let blocks = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| {
                        cur = random_coarsening(rng, &cur, p);
                        cur.clone()
                    })
                    .collect()
            })
            .collect();
        Grid::new(blocks).expect("coarsening chain is monotone")
    }
}

// ---------------------------------------------------------------------------
// χ, φ₀ and the F-constructions

/// `χ(x, y)[n]`: least `m` with `x E[n][m] y` when `x E_n y`, else 0.
pub fn chi(grid: &Grid, x: usize, y: usize) -> Vec<usize> {
    (0..grid.rows())
        .map(|n| {
            (0..grid.cols())
                .find(|&m| grid.get(n, m).related(x, y))
                .unwrap_or(0)
        })
        .collect()
}

/// `φ₀(x)[n]`: max of `χ(x, γ_i x)[n]` over translates `i ≤ n` related to
/// `x` in `E_n`. The last row stands in for the limit and reads every
/// translate.
pub fn phi0(grid: &Grid, action: &[Vec<usize>], x: usize) -> Vec<usize> {
    let r = grid.rows();
    (0..r)
        .map(|n| {
            let reach = if n + 1 == r { action.len() } else { (n + 1).min(action.len()) };
            action[..reach]
                .iter()
                .map(|g| g[x])
                .filter(|&y| grid.row_limit(n).related(x, y))
                .map(|y| chi(grid, x, y)[n])
                .max()
                .unwrap_or(0)
        })
        .collect()
}

/// Pointwise max of `φ₀` over each orbit: an invariant bound.
pub fn orbit_max_phi0(grid: &Grid, action: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let orbits = orbit_relation(grid.carrier(), action);
    let phis: Vec<Vec<usize>> = (0..grid.carrier()).map(|x| phi0(grid, action, x)).collect();
    let mut per_class = vec![vec![0; grid.rows()]; orbits.block_count()];
    for (x, v) in phis.iter().enumerate() {
        let acc = &mut per_class[orbits.block(x)];
        for (a, &b) in acc.iter_mut().zip(v) {
            *a = (*a).max(b);
        }
    }
    (0..grid.carrier()).map(|x| per_class[orbits.block(x)].clone()).collect()
}

fn check_psi_vector(grid: &Grid, v: &[usize]) -> Result<()> {
    if v.len() != grid.rows() {
        return Err(Error::Shape(format!("ψ has length {}, grid has {} rows", v.len(), grid.rows())));
    }
    if let Some(&bad) = v.iter().find(|&&m| m >= grid.cols()) {
        return Err(Error::Shape(format!("ψ entry {bad} outside {} columns", grid.cols())));
    }
    Ok(())
}

/// `x F_n y` iff for all `k ∈ [n, R)`: `ψ(x)(k) = ψ(y)(k)` and
/// `x E[k][ψ(x)(k)] y`.
#[allow(non_snake_case)]
pub fn build_F(grid: &Grid, psi: &[Vec<usize>], n: usize) -> Result<FinEqRel> {
    if psi.len() != grid.carrier() {
        return Err(Error::CarrierMismatch { left: grid.carrier(), right: psi.len() });
    }
    for v in psi {
        check_psi_vector(grid, v)?;
    }
    let keys: Vec<Vec<(usize, usize)>> = (0..grid.carrier())
        .map(|x| {
            (n..grid.rows())
                .map(|k| (psi[x][k], grid.get(k, psi[x][k]).block(x)))
                .collect()
        })
        .collect();
    Ok(FinEqRel::from_labels(&keys))
}

/// Facts about `⟨F_n : n < R⟩` for a point-indexed ψ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FChainReport {
    pub increasing: bool,
    pub within_rows: bool,
    pub union_equals_top: bool,
}

impl FChainReport {
    pub fn holds(&self) -> bool {
        self.increasing && self.within_rows && self.union_equals_top
    }
}

#[allow(non_snake_case)]
pub fn F_chain_report(grid: &Grid, psi: &[Vec<usize>]) -> Result<FChainReport> {
    let chain = (0..grid.rows()).map(|n| build_F(grid, psi, n)).collect::<Result<Vec<_>>>()?;
    let mut increasing = true;
    let mut within_rows = true;
    for (n, f) in chain.iter().enumerate() {
        within_rows &= f.refines(grid.row_limit(n))?;
        if n > 0 {
            increasing &= chain[n - 1].refines(f)?;
        }
    }
    let union_equals_top = chain.last().expect("grid has rows") == grid.top();
    Ok(FChainReport { increasing, within_rows, union_equals_top })
}

/// `F_k = ⋂_{n ∈ [k, R)} E[n][ψ(n)]`.
#[allow(non_snake_case)]
pub fn naive_F(grid: &Grid, psi: &[usize], k: usize) -> Result<FinEqRel> {
    check_psi_vector(grid, psi)?;
    (k..grid.rows()).try_fold(FinEqRel::full(grid.carrier()), |acc, n| acc.meet(grid.get(n, psi[n])))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// The pair is `E`-related but not yet `E_n`-related.
    NotRelated,
    /// `χ(x, y)[n] > ψ(n)`.
    ChiExceeds { chi: usize, psi: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustionViolation {
    pub x: usize,
    pub y: usize,
    pub row: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustionReport {
    /// Number of `E`-related pairs `x < y`.
    pub pairs: usize,
    /// Least `N` such that every pair satisfies the condition on `[N, R)`;
    /// equals `R` when some pair fails on the last row.
    pub settle_index: usize,
    /// Condition holds from row 0: `F_0 ⊇ E`.
    pub passed: bool,
    /// Condition holds on a final segment: `⋃_k F_k ⊇ E`.
    pub eventually: bool,
    /// `⋃_{k<R} F_k ⊇ E`, computed directly.
    pub union_covers: bool,
    pub first_violation: Option<ExhaustionViolation>,
    pub truncation: usize,
}

pub fn exhaustion_check(grid: &Grid, psi: &[usize]) -> Result<ExhaustionReport> {
    check_psi_vector(grid, psi)?;
    let r = grid.rows();
    let pairs = grid.top().pairs();
    let mut settle_index = 0;
    let mut first_violation = None;
    for &(x, y) in &pairs {
        let c = chi(grid, x, y);
        let failing = |n: usize| {
            if !grid.row_limit(n).related(x, y) {
                Some(ViolationKind::NotRelated)
            } else if c[n] > psi[n] {
                Some(ViolationKind::ChiExceeds { chi: c[n], psi: psi[n] })
            } else {
                None
            }
        };
        let settle = (0..r).rev().find(|&n| failing(n).is_some()).map_or(0, |n| n + 1);
        settle_index = settle_index.max(settle);
        if first_violation.is_none() {
            if let Some((row, kind)) = (0..r).find_map(|n| failing(n).map(|k| (n, k))) {
                first_violation = Some(ExhaustionViolation { x, y, row, kind });
            }
        }
    }
    let union = naive_F(grid, psi, r - 1)?;
    Ok(ExhaustionReport {
        pairs: pairs.len(),
        settle_index,
        passed: settle_index == 0,
        eventually: settle_index < r,
        union_covers: grid.top().refines(&union)?,
        first_violation,
        truncation: r,
    })
}

// ---------------------------------------------------------------------------
// Footnote counterexample

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonInclusion {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// A pair in `E_n^0 ∖ E_k^m`, as `((i, j), (i', j'))`.
    pub witness: Option<((usize, usize), (usize, usize))>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FootnoteGrid {
    pub k: usize,
    /// Columns `0..M` follow the `E_n^m` formula; column `M` closes each row
    /// with `E_n`.
    pub grid: Grid,
    pub non_inclusions: Vec<NonInclusion>,
}

impl FootnoteGrid {
    pub fn point(&self, x: usize) -> (usize, usize) {
        (x / self.k, x % self.k)
    }

    pub fn index(&self, (i, j): (usize, usize)) -> usize {
        i * self.k + j
    }

    pub fn all_witnessed(&self) -> bool {
        self.non_inclusions.iter().all(|w| w.witness.is_some())
    }
}

/// First pair related in `E[n][0]` but not in `E[k][m]`.
pub fn non_inclusion_witness(grid: &Grid, n: usize, k: usize, m: usize) -> Option<(usize, usize)> {
    let (a, b) = (grid.get(n, 0), grid.get(k, m));
    a.pairs().into_iter().find(|&(x, y)| !b.related(x, y))
}

/// The grid on `[0, K)²` with `(i,j) E_n^m (i',j')` iff equal, or
/// `i = i' = n`, or `i, i' < n` and `j, j' < m`.
pub fn footnote_grid(k: usize, rows: usize, cols: usize) -> Result<FootnoteGrid> {
    if k < 2 || rows == 0 || cols == 0 || rows > k || cols > k {
        return Err(Error::Precondition(format!(
            "footnote grid needs 2 <= K and 1 <= R, M <= K (got K={k}, R={rows}, M={cols})"
        )));
    }
    let point = |x: usize| (x / k, x % k);
    let rel = |label: &dyn Fn(usize, usize) -> usize| {
        let labels: Vec<usize> = (0..k * k).map(|x| {
            let (i, j) = point(x);
            label(i, j)
        })
        .collect();
        FinEqRel::from_labels(&labels)
    };
    // Labels: the shared block of a row gets a value ≥ k², singletons keep x.
    let shared = k * k;
    let blocks = (0..rows)
        .map(|n| {
            let mut row: Vec<FinEqRel> = (0..cols)
                .map(|m| {
                    rel(&|i, j| {
                        if i == n {
                            shared
                        } else if i < n && j < m {
                            shared + 1
                        } else {
                            i * k + j
                        }
                    })
                })
                .collect();
            row.push(rel(&|i, j| if i <= n { shared } else { i * k + j }));
            row
        })
        .collect();
    let grid = Grid::new(blocks)?;
    let mut non_inclusions = vec![];
    for n in 0..rows {
        for kk in (0..rows).filter(|&kk| kk != n) {
            for m in 0..cols {
                let witness = non_inclusion_witness(&grid, n, kk, m).map(|(x, y)| (point(x), point(y)));
                non_inclusions.push(NonInclusion { n, k: kk, m, witness });
            }
        }
    }
    Ok(FootnoteGrid { k, grid, non_inclusions })
}
