//! Complete anyon models (fusion table, F-blocks, R-scalars) and generic
//! pentagon, hexagon and unitarity checks.
//!
//! The checks work on fusion-tree bases: every associativity or braiding
//! isomorphism in a coherence diagram becomes a transition matrix between
//! two tree bases, assembled tree by tree from single F-moves and R-moves.
//! Naturality (an F-move acts on a subtree and carries the rest along) gives
//! the block-diagonal structure for free.
//!
//! F-block convention: `F[(a,b,c;d)][e][f]` is the coefficient of
//! `(a (b c)_f)_d` in the expansion of `((a b)_e c)_d`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::fusion_ring::{self, fibonacci_table, FusionTable, Label, TAU};
use crate::fusion_trees::{enumerate_trees, shape_of_left_comb, shape_of_right_comb, FusionTree, ParenShape, Side};
use crate::linalg::{CMatrix, LinalgError};
use crate::solver::{self, FibFSymbols, FibRSymbols, HexagonVariant};
use crate::DEFAULT_TOL;

/// Index of an F-block: `((a b) c) → d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FKey {
    pub a: Label,
    pub b: Label,
    pub c: Label,
    pub d: Label,
}

impl FKey {
    pub fn new(a: Label, b: Label, c: Label, d: Label) -> Self {
        FKey { a, b, c, d }
    }

    pub fn involves_unit(&self) -> bool {
        self.a.is_unit() || self.b.is_unit() || self.c.is_unit()
    }

    /// `a,b,c;d` with label names.
    pub fn render(&self, table: &FusionTable) -> String {
        format!(
            "{},{},{};{}",
            table.name(self.a),
            table.name(self.b),
            table.name(self.c),
            table.name(self.d)
        )
    }
}

/// Index of an R-scalar: `a ⊗ b → c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RKey {
    pub a: Label,
    pub b: Label,
    pub c: Label,
}

impl RKey {
    pub fn new(a: Label, b: Label, c: Label) -> Self {
        RKey { a, b, c }
    }

    pub fn render(&self, table: &FusionTable) -> String {
        format!("{},{};{}", table.name(self.a), table.name(self.b), table.name(self.c))
    }
}

/// One F-block with explicit row and column channel labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FBlock {
    pub rows: Vec<Label>,
    pub cols: Vec<Label>,
    pub matrix: CMatrix,
}

impl FBlock {
    fn coeff(&self, e: Label, f: Label) -> Option<Complex64> {
        let i = self.rows.iter().position(|&x| x == e)?;
        let j = self.cols.iter().position(|&x| x == f)?;
        Some(self.matrix[(i, j)])
    }
}

/// Inner channels of `((a b)_e c)_d` and `(a (b c)_f)_d`, ascending.
pub fn f_block_channels(table: &FusionTable, key: FKey) -> (Vec<Label>, Vec<Label>) {
    let rows = table
        .labels()
        .filter(|&e| table.admits(key.a, key.b, e) && table.admits(e, key.c, key.d))
        .collect();
    let cols = table
        .labels()
        .filter(|&f| table.admits(key.b, key.c, f) && table.admits(key.a, f, key.d))
        .collect();
    (rows, cols)
}

/// Every `(a,b,c;d)` with a nonempty block, in index order.
pub fn admissible_f_keys(table: &FusionTable) -> Vec<FKey> {
    let mut keys = Vec::new();
    for a in table.labels() {
        for b in table.labels() {
            for c in table.labels() {
                for d in table.labels() {
                    let key = FKey::new(a, b, c, d);
                    if !f_block_channels(table, key).0.is_empty() {
                        keys.push(key);
                    }
                }
            }
        }
    }
    keys
}

/// Every `(a,b;c)` with `N[a][b][c] = 1`, in index order.
pub fn admissible_r_keys(table: &FusionTable) -> Vec<RKey> {
    let mut keys = Vec::new();
    for a in table.labels() {
        for b in table.labels() {
            for c in table.outcomes(a, b) {
                keys.push(RKey::new(a, b, c));
            }
        }
    }
    keys
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("fusion table violates {0}")]
    InvalidTable(fusion_ring::Violation),
    #[error("fusion table is not multiplicity-free: N[{a}][{b}][{c}] = {mult}")]
    NotMultiplicityFree { a: usize, b: usize, c: usize, mult: u32 },
    #[error("coverage gap: missing F block ({0})")]
    MissingF(String),
    #[error("coverage gap: F block ({0}) is not admissible")]
    ExtraF(String),
    #[error("coverage gap: missing R symbol ({0})")]
    MissingR(String),
    #[error("coverage gap: R symbol ({0}) is not admissible")]
    ExtraR(String),
    #[error("F block ({key}): {what} channels {found:?}, expected {expected:?}")]
    Channels {
        key: String,
        what: &'static str,
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("F block ({key}) has shape {rows}x{cols}, expected {expected}x{expected}")]
    BlockShape {
        key: String,
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("F block ({0}) is singular")]
    Singular(String),
    #[error("F block ({0}) has a unit index but is not the identity")]
    UnitBlockNotIdentity(String),
    #[error("no F block or R symbol {0}")]
    UnknownKey(String),
}

/// A multiplicity-free anyon model whose F and R data cover exactly the
/// admissible index sets of its table.
#[derive(Debug, Clone, PartialEq)]
pub struct AnyonModel {
    table: FusionTable,
    f: BTreeMap<FKey, FBlock>,
    r: BTreeMap<RKey, Complex64>,
}

impl AnyonModel {
    /// Validates and assembles a model.
    pub fn new(
        table: FusionTable,
        f: BTreeMap<FKey, FBlock>,
        r: BTreeMap<RKey, Complex64>,
    ) -> Result<Self, ModelError> {
        if let Some(v) = fusion_ring::validate(&table).violations.first() {
            return Err(ModelError::InvalidTable(*v));
        }
        for a in table.labels() {
            for b in table.labels() {
                for c in table.labels() {
                    let mult = table.mult(a, b, c);
                    if mult > 1 {
                        return Err(ModelError::NotMultiplicityFree {
                            a: a.0,
                            b: b.0,
                            c: c.0,
                            mult,
                        });
                    }
                }
            }
        }
        let f_keys = admissible_f_keys(&table);
        for key in &f_keys {
            if !f.contains_key(key) {
                return Err(ModelError::MissingF(key.render(&table)));
            }
        }
        for key in f.keys() {
            if f_keys.binary_search(key).is_err() {
                return Err(ModelError::ExtraF(key.render(&table)));
            }
        }
        let r_keys = admissible_r_keys(&table);
        for key in &r_keys {
            if !r.contains_key(key) {
                return Err(ModelError::MissingR(key.render(&table)));
            }
        }
        for key in r.keys() {
            if r_keys.binary_search(key).is_err() {
                return Err(ModelError::ExtraR(key.render(&table)));
            }
        }
        for (key, block) in &f {
            check_block(&table, *key, block)?;
        }
        Ok(AnyonModel { table, f, r })
    }

    pub fn table(&self) -> &FusionTable {
        &self.table
    }

    pub fn f_blocks(&self) -> &BTreeMap<FKey, FBlock> {
        &self.f
    }

    pub fn r_symbols(&self) -> &BTreeMap<RKey, Complex64> {
        &self.r
    }

    pub fn f_block(&self, key: FKey) -> Option<&FBlock> {
        self.f.get(&key)
    }

    pub fn r_symbol(&self, key: RKey) -> Option<Complex64> {
        self.r.get(&key).copied()
    }

    /// Replaces one F matrix; the result is revalidated.
    pub fn with_f_matrix(&self, key: FKey, matrix: CMatrix) -> Result<AnyonModel, ModelError> {
        let mut f = self.f.clone();
        let block = f
            .get_mut(&key)
            .ok_or_else(|| ModelError::UnknownKey(key.render(&self.table)))?;
        block.matrix = matrix;
        AnyonModel::new(self.table.clone(), f, self.r.clone())
    }

    /// Replaces one R scalar.
    pub fn with_r_symbol(&self, key: RKey, value: Complex64) -> Result<AnyonModel, ModelError> {
        let mut r = self.r.clone();
        let slot = r
            .get_mut(&key)
            .ok_or_else(|| ModelError::UnknownKey(key.render(&self.table)))?;
        *slot = value;
        AnyonModel::new(self.table.clone(), self.f.clone(), r)
    }

    /// Expands the node at `path`, which must look like `((A B)_e C)_d`, into
    /// `Σ_f F[(a,b,c;d)][e][f] (A (B C)_f)_d`.
    pub fn associate(&self, tree: &FusionTree, path: &[Side]) -> Result<Vec<(Complex64, FusionTree)>, MoveError> {
        let node = tree.subtree(path).ok_or(MoveError::BadPath)?;
        let FusionTree::Node {
            left,
            right: c_tree,
            label: d,
        } = node
        else {
            return Err(MoveError::NotAssociable);
        };
        let FusionTree::Node {
            left: a_tree,
            right: b_tree,
            label: e,
        } = &**left
        else {
            return Err(MoveError::NotAssociable);
        };
        let key = FKey::new(a_tree.root(), b_tree.root(), c_tree.root(), *d);
        let block = self.f.get(&key).ok_or(MoveError::MissingF(key))?;
        let mut out = Vec::with_capacity(block.cols.len());
        for &f in &block.cols {
            let coeff = block.coeff(*e, f).ok_or(MoveError::MissingF(key))?;
            let bc = FusionTree::node((**b_tree).clone(), (**c_tree).clone(), f);
            let moved = FusionTree::node((**a_tree).clone(), bc, *d);
            out.push((coeff, tree.replaced(path, moved).ok_or(MoveError::BadPath)?));
        }
        Ok(out)
    }

    /// Exchanges the two children of the node at `path`.
    ///
    /// `Sigma` multiplies by `R[(x,y;c)]`; `SigmaInverse` applies
    /// `σ_{Y,X}^{-1}` and multiplies by `1 / R[(y,x;c)]`.
    pub fn braid(
        &self,
        tree: &FusionTree,
        path: &[Side],
        variant: HexagonVariant,
    ) -> Result<(Complex64, FusionTree), MoveError> {
        let node = tree.subtree(path).ok_or(MoveError::BadPath)?;
        let FusionTree::Node { left, right, label } = node else {
            return Err(MoveError::NotBraidable);
        };
        let (x, y) = (left.root(), right.root());
        let coeff = match variant {
            HexagonVariant::Sigma => {
                let key = RKey::new(x, y, *label);
                self.r.get(&key).copied().ok_or(MoveError::MissingR(key))?
            }
            HexagonVariant::SigmaInverse => {
                let key = RKey::new(y, x, *label);
                self.r.get(&key).copied().ok_or(MoveError::MissingR(key))?.inv()
            }
        };
        let swapped = FusionTree::node((**right).clone(), (**left).clone(), *label);
        Ok((coeff, tree.replaced(path, swapped).ok_or(MoveError::BadPath)?))
    }
}

fn check_block(table: &FusionTable, key: FKey, block: &FBlock) -> Result<(), ModelError> {
    let render = || key.render(table);
    let names = |ls: &[Label]| ls.iter().map(|&l| String::from(table.name(l))).collect::<Vec<_>>();
    let (rows, cols) = f_block_channels(table, key);
    if block.rows != rows {
        return Err(ModelError::Channels {
            key: render(),
            what: "row",
            expected: names(&rows),
            found: names(&block.rows),
        });
    }
    if block.cols != cols {
        return Err(ModelError::Channels {
            key: render(),
            what: "column",
            expected: names(&cols),
            found: names(&block.cols),
        });
    }
    let m = &block.matrix;
    if m.rows() != rows.len() || m.cols() != rows.len() || cols.len() != rows.len() {
        return Err(ModelError::BlockShape {
            key: render(),
            rows: m.rows(),
            cols: m.cols(),
            expected: rows.len(),
        });
    }
    match m.inverse() {
        Ok(_) => {}
        Err(LinalgError::Singular) => return Err(ModelError::Singular(render())),
        Err(_) => unreachable!("square checked above"),
    }
    if key.involves_unit() && m.max_abs_diff(&CMatrix::identity(m.rows())).expect("square") > DEFAULT_TOL {
        return Err(ModelError::UnitBlockNotIdentity(render()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("path does not name a subtree")]
    BadPath,
    #[error("node is not of the form ((A B) C)")]
    NotAssociable,
    #[error("node is a leaf")]
    NotBraidable,
    #[error("model has no F block {0:?}")]
    MissingF(FKey),
    #[error("model has no R symbol {0:?}")]
    MissingR(RKey),
    #[error("move produced a tree outside the target basis")]
    OutsideBasis,
}

/// Transition matrix from `source` to `target`: row `i` holds the expansion
/// of `source[i]`.
pub fn transition<F>(source: &[FusionTree], target: &[FusionTree], mut step: F) -> Result<CMatrix, MoveError>
where
    F: FnMut(&FusionTree) -> Result<Vec<(Complex64, FusionTree)>, MoveError>,
{
    let index: BTreeMap<&FusionTree, usize> = target.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut m = CMatrix::zeros(source.len(), target.len());
    for (i, tree) in source.iter().enumerate() {
        for (coeff, image) in step(tree)? {
            let j = *index.get(&image).ok_or(MoveError::OutsideBasis)?;
            m[(i, j)] += coeff;
        }
    }
    Ok(m)
}

/// Residual of one coherence case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseResidual {
    pub leaves: Vec<Label>,
    pub root: Label,
    pub dim: usize,
    pub residual: f64,
}

/// Residuals over all cases, in canonical (index-lexicographic) case order.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub cases: Vec<CaseResidual>,
}

impl ResidualReport {
    pub fn max_residual(&self) -> f64 {
        self.cases.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    /// First case with the largest residual.
    pub fn worst(&self) -> Option<&CaseResidual> {
        let mut best: Option<&CaseResidual> = None;
        for c in &self.cases {
            if best.is_none_or(|b| c.residual > b.residual) {
                best = Some(c);
            }
        }
        best
    }

    pub fn failures(&self, tol: f64) -> impl Iterator<Item = &CaseResidual> {
        self.cases
            .iter()
            .filter(move |c| c.residual > tol || c.residual.is_nan())
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.failures(tol).next().is_none()
    }

    pub fn case(&self, leaves: &[Label], root: Label) -> Option<&CaseResidual> {
        self.cases.iter().find(|c| c.leaves == leaves && c.root == root)
    }
}

fn shape(text: &str) -> ParenShape {
    ParenShape::parse(text).expect("static shape")
}

fn basis(model: &AnyonModel, shape: &ParenShape, leaves: &[Label], root: Label) -> Vec<FusionTree> {
    enumerate_trees(&model.table, shape, leaves, root).expect("labels come from the table")
}

/// Long and short sides of the pentagon for leaves `[a,b,c,d]` and `root`,
/// from the left comb basis to the right comb basis.
pub fn pentagon_sides(model: &AnyonModel, leaves: [Label; 4], root: Label) -> Result<(CMatrix, CMatrix), MoveError> {
    let s1 = basis(model, &shape_of_left_comb(4), &leaves, root);
    let s2 = basis(model, &shape("((..)(..))"), &leaves, root);
    let s3 = basis(model, &shape("((.(..)).)"), &leaves, root);
    let s4 = basis(model, &shape("(.((..).))"), &leaves, root);
    let s5 = basis(model, &shape_of_right_comb(4), &leaves, root);
    let at = |path: &'static [Side]| move |t: &FusionTree| model.associate(t, path);
    let short = &transition(&s1, &s2, at(&[]))? * &transition(&s2, &s5, at(&[]))?;
    let long = &(&transition(&s1, &s3, at(&[Side::Left]))? * &transition(&s3, &s4, at(&[]))?)
        * &transition(&s4, &s5, at(&[Side::Right]))?;
    Ok((long, short))
}

/// Pentagon residual for every 4-tuple of simple leaves and every root.
pub fn check_pentagon(model: &AnyonModel) -> ResidualReport {
    let t = &model.table;
    let mut cases = Vec::new();
    for a in t.labels() {
        for b in t.labels() {
            for c in t.labels() {
                for d in t.labels() {
                    for root in t.labels() {
                        let leaves = [a, b, c, d];
                        let dim = basis(model, &shape_of_left_comb(4), &leaves, root).len();
                        if dim == 0 {
                            continue;
                        }
                        let (long, short) = pentagon_sides(model, leaves, root).expect("validated model");
                        cases.push(CaseResidual {
                            leaves: leaves.to_vec(),
                            root,
                            dim,
                            residual: long.max_abs_diff(&short).expect("same bases"),
                        });
                    }
                }
            }
        }
    }
    ResidualReport { cases }
}

/// Both hexagon composites for leaves `[a,b,c]` and `root`, from
/// `((a b) c)` to `(b (c a))`: `(α·σ_{a,bc}·α, (σ_{a,b}⊗I)·α·(I⊗σ_{a,c}))`.
pub fn hexagon_sides(
    model: &AnyonModel,
    leaves: [Label; 3],
    root: Label,
    variant: HexagonVariant,
) -> Result<(CMatrix, CMatrix), MoveError> {
    let [a, b, c] = leaves;
    let left3 = shape_of_left_comb(3);
    let right3 = shape_of_right_comb(3);
    let h1 = basis(model, &left3, &[a, b, c], root);
    let h2 = basis(model, &right3, &[a, b, c], root);
    let h3 = basis(model, &left3, &[b, c, a], root);
    let h4 = basis(model, &right3, &[b, c, a], root);
    let h5 = basis(model, &left3, &[b, a, c], root);
    let h6 = basis(model, &right3, &[b, a, c], root);
    let assoc = |t: &FusionTree| model.associate(t, &[]);
    let braid_at = |path: &'static [Side]| move |t: &FusionTree| model.braid(t, path, variant).map(|x| vec![x]);
    let top = &(&transition(&h1, &h2, assoc)? * &transition(&h2, &h3, braid_at(&[]))?) * &transition(&h3, &h4, assoc)?;
    let bottom = &(&transition(&h1, &h5, braid_at(&[Side::Left]))? * &transition(&h5, &h6, assoc)?)
        * &transition(&h6, &h4, braid_at(&[Side::Right]))?;
    Ok((top, bottom))
}

/// Hexagon residual for every 3-tuple of simple leaves and every root.
pub fn check_hexagon(model: &AnyonModel, variant: HexagonVariant) -> ResidualReport {
    let t = &model.table;
    let mut cases = Vec::new();
    for a in t.labels() {
        for b in t.labels() {
            for c in t.labels() {
                for root in t.labels() {
                    let leaves = [a, b, c];
                    let dim = basis(model, &shape_of_left_comb(3), &leaves, root).len();
                    if dim == 0 {
                        continue;
                    }
                    let (top, bottom) = hexagon_sides(model, leaves, root, variant).expect("validated model");
                    cases.push(CaseResidual {
                        leaves: leaves.to_vec(),
                        root,
                        dim,
                        residual: top.max_abs_diff(&bottom).expect("same bases"),
                    });
                }
            }
        }
    }
    ResidualReport { cases }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitarityReport {
    /// `max |B B^† − I|` per F block.
    pub f_blocks: Vec<(FKey, f64)>,
    /// `||R| − 1|` per R symbol.
    pub r_symbols: Vec<(RKey, f64)>,
}

impl UnitarityReport {
    pub fn max_residual(&self) -> f64 {
        self.f_blocks
            .iter()
            .map(|x| x.1)
            .chain(self.r_symbols.iter().map(|x| x.1))
            .fold(0.0, f64::max)
    }

    pub fn failing_f(&self, tol: f64) -> impl Iterator<Item = &(FKey, f64)> {
        self.f_blocks.iter().filter(move |x| x.1 > tol || x.1.is_nan())
    }

    pub fn failing_r(&self, tol: f64) -> impl Iterator<Item = &(RKey, f64)> {
        self.r_symbols.iter().filter(move |x| x.1 > tol || x.1.is_nan())
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.failing_f(tol).next().is_none() && self.failing_r(tol).next().is_none()
    }
}

pub fn check_unitarity(model: &AnyonModel) -> UnitarityReport {
    UnitarityReport {
        f_blocks: model
            .f
            .iter()
            .map(|(k, b)| (*k, b.matrix.unitarity_residual()))
            .collect(),
        r_symbols: model.r.iter().map(|(k, z)| (*k, (z.norm() - 1.0).abs())).collect(),
    }
}

/// Fibonacci model from closed-form symbols.
pub fn fibonacci_model(f: &FibFSymbols, r: &FibRSymbols) -> AnyonModel {
    let table = fibonacci_table();
    let one = Label::UNIT;
    let mut fmap = BTreeMap::new();
    for key in admissible_f_keys(&table) {
        let (rows, cols) = f_block_channels(&table, key);
        let matrix = if key.involves_unit() {
            CMatrix::identity(rows.len())
        } else if key.d == one {
            CMatrix::diagonal(&[f.p])
        } else {
            f.tau_block()
        };
        fmap.insert(key, FBlock { rows, cols, matrix });
    }
    let mut rmap = BTreeMap::new();
    for key in admissible_r_keys(&table) {
        let value = match (key.a, key.b, key.c) {
            (TAU, TAU, c) if c == one => r.a,
            (TAU, TAU, _) => r.b,
            _ => Complex64::new(1.0, 0.0),
        };
        rmap.insert(key, value);
    }
    AnyonModel::new(table, fmap, rmap).expect("fibonacci model is well formed")
}

/// The unitary, `θ = 0`, counterclockwise Fibonacci model.
pub fn builtin_fibonacci() -> AnyonModel {
    let f = solver::solve_pentagon_fibonacci(solver::Branch::Unitary, 0.0);
    let r = solver::solve_hexagon_fibonacci(&f, solver::Orientation::Counterclockwise).expect("unitary branch");
    fibonacci_model(&f, &r)
}

impl fmt::Display for CaseResidual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "leaves {:?} root {} dim {}: {:e}",
            self.leaves, self.root.0, self.dim, self.residual
        )
    }
}
