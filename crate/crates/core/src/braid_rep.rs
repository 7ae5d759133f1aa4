//! Braid-group representations on left-comb fusion-tree bases.
//!
//! Matrices here act on column vectors of coordinates in the left-comb
//! basis: column `j` of `ρ(σ_i)` is the image of the `j`-th basis tree.
//! Words act left to right, so `[w_1, …, w_k]` maps to
//! `ρ(w_k) ⋯ ρ(w_1)`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::fusion_ring::Label;
use crate::fusion_trees::{enumerate_trees, shape_of_left_comb, FusionTree, ParenShape, Side};
use crate::linalg::{phase_0_2pi, CMatrix, LinalgError};
use crate::model_store::{transition, AnyonModel, MoveError};
use crate::solver::HexagonVariant;

/// A braid word on `n_strands`; `+i` is `σ_i`, `−i` is `σ_i^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    pub n_strands: usize,
    pub letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(n_strands: usize, letters: Vec<i32>) -> Result<Self, BraidError> {
        for &l in &letters {
            if l == 0 || l.unsigned_abs() as usize >= n_strands {
                return Err(BraidError::LetterOutOfRange { letter: l, n_strands });
            }
        }
        Ok(BraidWord { n_strands, letters })
    }

    pub fn empty(n_strands: usize) -> Self {
        BraidWord {
            n_strands,
            letters: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BraidError {
    #[error("need at least 2 strands, got {0}")]
    TooFewStrands(usize),
    #[error("label index {0} out of range")]
    UnknownLabel(usize),
    #[error("no admissible fusion trees: the representation is empty")]
    EmptyRepresentation,
    #[error("model is not multiplicity-free")]
    NotMultiplicityFree,
    #[error("letter {letter} out of range for {n_strands} strands")]
    LetterOutOfRange { letter: i32, n_strands: usize },
    #[error("word has {word} strands, representation has {rep}")]
    StrandMismatch { word: usize, rep: usize },
    #[error("generator {0} does not exist")]
    NoSuchGenerator(usize),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The F-moves used to localise one generator, kept for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorPath {
    /// Node re-associated (from the root) before braiding; empty for `σ_1`.
    pub moves: Vec<Vec<Side>>,
    /// Node whose children are exchanged, in the localised shape.
    pub braid_node: Vec<Side>,
    /// Coordinate change from the left comb basis to the localised basis.
    pub change_of_basis: CMatrix,
    /// Braiding eigenvalues in the localised basis.
    pub diagonal: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct BraidRep {
    pub n: usize,
    pub leaf: Label,
    pub root: Label,
    pub basis: Vec<FusionTree>,
    pub gens: Vec<CMatrix>,
    pub inverses: Vec<CMatrix>,
    pub paths: Vec<GeneratorPath>,
}

/// Builds `ρ(σ_1), …, ρ(σ_{n−1})` on the left-comb basis of `leaf^{⊗n} → root`.
///
/// `ρ(σ_1)` is diagonal with entries `R[(leaf, leaf; x)]`, `x` the innermost
/// channel. For `i > 1`, strands `i` and `i+1` are brought into an innermost
/// pair by one F-move at the comb node that attaches strand `i+1`, braided
/// there, and moved back: `ρ(σ_i) = M_i^{-1} D_i M_i`.
pub fn build_rep(model: &AnyonModel, leaf: Label, n: usize, root: Label) -> Result<BraidRep, BraidError> {
    let table = model.table();
    if n < 2 {
        return Err(BraidError::TooFewStrands(n));
    }
    for l in [leaf, root] {
        if l.0 >= table.rank() {
            return Err(BraidError::UnknownLabel(l.0));
        }
    }
    if !table.is_multiplicity_free() {
        return Err(BraidError::NotMultiplicityFree);
    }
    let leaves = vec![leaf; n];
    let shape = shape_of_left_comb(n);
    let basis = enumerate_trees(table, &shape, &leaves, root).expect("labels checked");
    if basis.is_empty() {
        return Err(BraidError::EmptyRepresentation);
    }
    let dim = basis.len();

    let mut gens = Vec::with_capacity(n - 1);
    let mut inverses = Vec::with_capacity(n - 1);
    let mut paths = Vec::with_capacity(n - 1);

    // σ_1: the innermost pair sits at depth n−2 along the left spine.
    let first_pair: Vec<Side> = vec![Side::Left; n - 2];
    let diag = braid_diagonal(model, &basis, &first_pair)?;
    let d = CMatrix::diagonal(&diag);
    gens.push(d.clone());
    inverses.push(CMatrix::diagonal(&diag.iter().map(|z| z.inv()).collect::<Vec<_>>()));
    paths.push(GeneratorPath {
        moves: Vec::new(),
        braid_node: first_pair,
        change_of_basis: CMatrix::identity(dim),
        diagonal: diag,
    });

    for i in 2..n {
        // Comb node attaching strand i+1: ((X s_i) s_{i+1}); |path| = n−1−i.
        let node: Vec<Side> = vec![Side::Left; n - 1 - i];
        let target_shape = localised_shape(n, i);
        let target = enumerate_trees(table, &target_shape, &leaves, root).expect("labels checked");
        // Row convention: row j expands basis[j] in the localised basis.
        let rows = transition(&basis, &target, |t| model.associate(t, &node))?;
        let mut pair = node.clone();
        pair.push(Side::Right);
        let diag = braid_diagonal(model, &target, &pair)?;
        // Coordinates transform with the transpose of the row-convention matrix.
        let m = rows.transpose();
        let m_inv = m.inverse()?;
        let d = CMatrix::diagonal(&diag);
        let d_inv = CMatrix::diagonal(&diag.iter().map(|z| z.inv()).collect::<Vec<_>>());
        gens.push(&(&m_inv * &d) * &m);
        inverses.push(&(&m_inv * &d_inv) * &m);
        paths.push(GeneratorPath {
            moves: vec![node],
            braid_node: pair,
            change_of_basis: m,
            diagonal: diag,
        });
    }

    Ok(BraidRep {
        n,
        leaf,
        root,
        basis,
        gens,
        inverses,
        paths,
    })
}

/// Left comb on `n` leaves with strands `i`, `i+1` (1-based) grouped:
/// `((…((X (s_i s_{i+1})) s_{i+2}) …) s_n)`.
fn localised_shape(n: usize, i: usize) -> ParenShape {
    let mut s = if i == 1 {
        ParenShape::node(ParenShape::Leaf, ParenShape::Leaf)
    } else {
        ParenShape::node(
            shape_of_left_comb(i - 1),
            ParenShape::node(ParenShape::Leaf, ParenShape::Leaf),
        )
    };
    for _ in i + 1..n {
        s = ParenShape::node(s, ParenShape::Leaf);
    }
    s
}

/// R-scalars of the exchange at `pair` for each tree of a basis that the
/// exchange maps to itself (both children are equal leaves).
fn braid_diagonal(model: &AnyonModel, basis: &[FusionTree], pair: &[Side]) -> Result<Vec<Complex64>, BraidError> {
    basis
        .iter()
        .map(|tree| {
            let (coeff, image) = model.braid(tree, pair, HexagonVariant::Sigma)?;
            if &image != tree {
                return Err(BraidError::Move(MoveError::OutsideBasis));
            }
            Ok(coeff)
        })
        .collect()
}

impl BraidRep {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `ρ(σ_i)` for `letter = +i`, `ρ(σ_i)^{-1}` for `−i`.
    pub fn letter_matrix(&self, letter: i32) -> Result<&CMatrix, BraidError> {
        let i = letter.unsigned_abs() as usize;
        if letter == 0 || i >= self.n {
            return Err(BraidError::LetterOutOfRange {
                letter,
                n_strands: self.n,
            });
        }
        Ok(if letter > 0 {
            &self.gens[i - 1]
        } else {
            &self.inverses[i - 1]
        })
    }
}

/// Matrix of a word; the first letter is applied first.
pub fn apply_word(rep: &BraidRep, word: &BraidWord) -> Result<CMatrix, BraidError> {
    if word.n_strands != rep.n {
        return Err(BraidError::StrandMismatch {
            word: word.n_strands,
            rep: rep.n,
        });
    }
    let mut acc = CMatrix::identity(rep.dim());
    for &l in &word.letters {
        acc = rep.letter_matrix(l)? * &acc;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BraidRelationReport {
    /// `max |ρ_i ρ_{i+1} ρ_i − ρ_{i+1} ρ_i ρ_{i+1}|` per adjacent pair `i`.
    pub adjacent: Vec<(usize, f64)>,
    /// `max |ρ_i ρ_j − ρ_j ρ_i|` per pair with `|i − j| ≥ 2`.
    pub far: Vec<(usize, usize, f64)>,
    /// `max |ρ_i ρ_i^† − I|` per generator.
    pub unitarity: Vec<f64>,
}

impl BraidRelationReport {
    pub fn max_adjacent(&self) -> f64 {
        self.adjacent.iter().map(|x| x.1).fold(0.0, f64::max)
    }

    pub fn max_far(&self) -> f64 {
        self.far.iter().map(|x| x.2).fold(0.0, f64::max)
    }

    pub fn max_unitarity(&self) -> f64 {
        self.unitarity.iter().copied().fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_adjacent() <= tol && self.max_far() <= tol && self.max_unitarity() <= tol
    }
}

pub fn check_braid_relations(rep: &BraidRep) -> BraidRelationReport {
    relations_of(&rep.gens)
}

/// Braid-relation residuals of an arbitrary list of generator matrices.
pub fn relations_of(gens: &[CMatrix]) -> BraidRelationReport {
    let k = gens.len();
    let mut adjacent = Vec::new();
    for i in 0..k.saturating_sub(1) {
        let (x, y) = (&gens[i], &gens[i + 1]);
        let l = &(x * y) * x;
        let r = &(y * x) * y;
        adjacent.push((i + 1, l.max_abs_diff(&r).expect("same dim")));
    }
    let mut far = Vec::new();
    for i in 0..k {
        for j in i + 2..k {
            far.push((i + 1, j + 1, gens[i].commutator_norm(&gens[j]).expect("same dim")));
        }
    }
    BraidRelationReport {
        adjacent,
        far,
        unitarity: gens.iter().map(CMatrix::unitarity_residual).collect(),
    }
}

/// Sorted eigenvalue arguments of `ρ(σ_i)`, in `[0, 2π)`.
pub fn eigenphases(rep: &BraidRep, i: usize) -> Result<Vec<f64>, BraidError> {
    if i == 0 || i >= rep.n {
        return Err(BraidError::NoSuchGenerator(i));
    }
    let mut phases: Vec<f64> = rep.gens[i - 1].eigenvalues()?.into_iter().map(phase_0_2pi).collect();
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}
