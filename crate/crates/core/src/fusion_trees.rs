//! Fusion trees: named basis vectors of morphism spaces.
//!
//! A tree records a full parenthesization of simple leaves together with the
//! fusion channel chosen at every internal node. The textual form is fully
//! parenthesized, with the channel written after each closing parenthesis:
//!
//! ```text
//! tree  := LABEL | "(" tree SP tree ")" "_" LABEL
//! LABEL := [A-Za-z0-9]+
//! SP    := one or more spaces
//! ```
//!
//! so `(tau (tau tau)_tau)_1` is three `tau`s whose right pair fuses to `tau`
//! and whose total fuses to the unit.
//!
//! Canonical order of trees with the same shape and leaves compares the
//! internal labels read in left-to-right postorder, by label index.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use thiserror::Error;

use crate::fusion_ring::{FusionTable, Label};

/// A full binary tree over ordered leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParenShape {
    Leaf,
    Node(Box<ParenShape>, Box<ParenShape>),
}

impl ParenShape {
    pub fn node(left: ParenShape, right: ParenShape) -> ParenShape {
        ParenShape::Node(Box::new(left), Box::new(right))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ParenShape::Leaf => 1,
            ParenShape::Node(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn internal_count(&self) -> usize {
        self.leaf_count() - 1
    }

    /// Every shape over `n` leaves; there are Catalan(n-1) of them.
    pub fn all(n: usize) -> Vec<ParenShape> {
        if n == 0 {
            return Vec::new();
        }
        if n == 1 {
            return vec![ParenShape::Leaf];
        }
        let mut out = Vec::new();
        for k in 1..n {
            let lefts = ParenShape::all(k);
            let rights = ParenShape::all(n - k);
            for l in &lefts {
                for r in &rights {
                    out.push(ParenShape::node(l.clone(), r.clone()));
                }
            }
        }
        out
    }

    /// Parses the compact shape notation, e.g. `(.(..))`.
    ///
    /// A leaf is `.`, `*` or `•`; a node is two shapes inside parentheses.
    /// Whitespace is ignored.
    pub fn parse(text: &str) -> Result<ParenShape, ShapeError> {
        let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        let mut pos = 0;
        let shape = parse_shape(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(ShapeError { position: chars[pos].0 });
        }
        Ok(shape)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed shape at byte {position}")]
pub struct ShapeError {
    pub position: usize,
}

fn parse_shape(chars: &[(usize, char)], pos: &mut usize) -> Result<ParenShape, ShapeError> {
    let end = chars.last().map_or(0, |c| c.0 + c.1.len_utf8());
    let at = |p: usize| chars.get(p).map_or(end, |c| c.0);
    match chars.get(*pos).map(|c| c.1) {
        Some('.') | Some('*') | Some('•') => {
            *pos += 1;
            Ok(ParenShape::Leaf)
        }
        Some('(') => {
            *pos += 1;
            let l = parse_shape(chars, pos)?;
            let r = parse_shape(chars, pos)?;
            if chars.get(*pos).map(|c| c.1) != Some(')') {
                return Err(ShapeError { position: at(*pos) });
            }
            *pos += 1;
            Ok(ParenShape::node(l, r))
        }
        _ => Err(ShapeError { position: at(*pos) }),
    }
}

impl fmt::Display for ParenShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParenShape::Leaf => f.write_str("."),
            ParenShape::Node(l, r) => write!(f, "({l}{r})"),
        }
    }
}

/// `((…(••)•)…•)`.
pub fn shape_of_left_comb(n: usize) -> ParenShape {
    assert!(n >= 1, "a shape needs at least one leaf");
    let mut s = ParenShape::Leaf;
    for _ in 1..n {
        s = ParenShape::node(s, ParenShape::Leaf);
    }
    s
}

/// `(•(•(…)))`.
pub fn shape_of_right_comb(n: usize) -> ParenShape {
    assert!(n >= 1, "a shape needs at least one leaf");
    let mut s = ParenShape::Leaf;
    for _ in 1..n {
        s = ParenShape::node(ParenShape::Leaf, s);
    }
    s
}

/// One step down a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A labelled fusion tree; `Node::label` is the fusion outcome of its children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FusionTree {
    Leaf(Label),
    Node {
        left: Box<FusionTree>,
        right: Box<FusionTree>,
        label: Label,
    },
}

impl FusionTree {
    pub fn node(left: FusionTree, right: FusionTree, label: Label) -> FusionTree {
        FusionTree::Node {
            left: Box::new(left),
            right: Box::new(right),
            label,
        }
    }

    /// The label under the outermost dot.
    pub fn root(&self) -> Label {
        match self {
            FusionTree::Leaf(l) => *l,
            FusionTree::Node { label, .. } => *label,
        }
    }

    pub fn shape(&self) -> ParenShape {
        match self {
            FusionTree::Leaf(_) => ParenShape::Leaf,
            FusionTree::Node { left, right, .. } => ParenShape::node(left.shape(), right.shape()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            FusionTree::Leaf(_) => 1,
            FusionTree::Node { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    pub fn leaf_labels(&self) -> Vec<Label> {
        let mut out = Vec::with_capacity(self.leaf_count());
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Label>) {
        match self {
            FusionTree::Leaf(l) => out.push(*l),
            FusionTree::Node { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }

    /// Internal labels in left-to-right postorder; the root label is last.
    pub fn internal_labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        self.collect_internal(&mut out);
        out
    }

    fn collect_internal(&self, out: &mut Vec<Label>) {
        if let FusionTree::Node { left, right, label } = self {
            left.collect_internal(out);
            right.collect_internal(out);
            out.push(*label);
        }
    }

    /// First inadmissible node in postorder, if any.
    pub fn first_inadmissible(&self, table: &FusionTable) -> Option<&FusionTree> {
        match self {
            FusionTree::Leaf(_) => None,
            FusionTree::Node { left, right, label } => left
                .first_inadmissible(table)
                .or_else(|| right.first_inadmissible(table))
                .or_else(|| (!table.admits(left.root(), right.root(), *label)).then_some(self)),
        }
    }

    pub fn is_admissible(&self, table: &FusionTable) -> bool {
        self.first_inadmissible(table).is_none()
    }

    pub fn subtree(&self, path: &[Side]) -> Option<&FusionTree> {
        match path.split_first() {
            None => Some(self),
            Some((side, rest)) => match self {
                FusionTree::Leaf(_) => None,
                FusionTree::Node { left, right, .. } => match side {
                    Side::Left => left.subtree(rest),
                    Side::Right => right.subtree(rest),
                },
            },
        }
    }

    /// Copy of `self` with the subtree at `path` replaced.
    pub fn replaced(&self, path: &[Side], with: FusionTree) -> Option<FusionTree> {
        match path.split_first() {
            None => Some(with),
            Some((side, rest)) => match self {
                FusionTree::Leaf(_) => None,
                FusionTree::Node { left, right, label } => Some(match side {
                    Side::Left => FusionTree::node(left.replaced(rest, with)?, (**right).clone(), *label),
                    Side::Right => FusionTree::node((**left).clone(), right.replaced(rest, with)?, *label),
                }),
            },
        }
    }
}

impl Ord for FusionTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.internal_labels()
            .cmp(&other.internal_labels())
            .then_with(|| self.leaf_labels().cmp(&other.leaf_labels()))
            .then_with(|| self.shape().cmp(&other.shape()))
    }
}

impl PartialOrd for FusionTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("shape has {shape} leaves but {labels} leaf labels were given")]
    LengthMismatch { shape: usize, labels: usize },
    #[error("label index {0} out of range")]
    UnknownLabel(usize),
}

fn check_labels(table: &FusionTable, shape: &ParenShape, leaves: &[Label], root: Label) -> Result<(), TreeError> {
    if shape.leaf_count() != leaves.len() {
        return Err(TreeError::LengthMismatch {
            shape: shape.leaf_count(),
            labels: leaves.len(),
        });
    }
    for l in leaves.iter().chain(core::iter::once(&root)) {
        if l.0 >= table.rank() {
            return Err(TreeError::UnknownLabel(l.0));
        }
    }
    Ok(())
}

/// All admissible trees over `shape` with the given leaves and root, in
/// canonical order.
pub fn enumerate_trees(
    table: &FusionTable,
    shape: &ParenShape,
    leaves: &[Label],
    root: Label,
) -> Result<Vec<FusionTree>, TreeError> {
    check_labels(table, shape, leaves, root)?;
    let mut all = enumerate_all(table, shape, leaves);
    all.retain(|t| t.root() == root);
    all.sort();
    Ok(all)
}

/// Every admissible tree with any root.
fn enumerate_all(table: &FusionTable, shape: &ParenShape, leaves: &[Label]) -> Vec<FusionTree> {
    match shape {
        ParenShape::Leaf => vec![FusionTree::Leaf(leaves[0])],
        ParenShape::Node(l, r) => {
            let k = l.leaf_count();
            let lefts = enumerate_all(table, l, &leaves[..k]);
            let rights = enumerate_all(table, r, &leaves[k..]);
            let mut out = Vec::new();
            for lt in &lefts {
                for rt in &rights {
                    for c in table.outcomes(lt.root(), rt.root()) {
                        out.push(FusionTree::node(lt.clone(), rt.clone(), c));
                    }
                }
            }
            out
        }
    }
}

/// Number of admissible trees, by dynamic programming over the shape.
///
/// Agrees with `enumerate_trees(..).len()`; for multiplicity-free tables this
/// is the dimension of the morphism space.
pub fn count_trees(table: &FusionTable, shape: &ParenShape, leaves: &[Label], root: Label) -> Result<u64, TreeError> {
    check_labels(table, shape, leaves, root)?;
    Ok(count_by_root(table, shape, leaves)[root.0])
}

fn count_by_root(table: &FusionTable, shape: &ParenShape, leaves: &[Label]) -> Vec<u64> {
    match shape {
        ParenShape::Leaf => {
            let mut v = vec![0; table.rank()];
            v[leaves[0].0] = 1;
            v
        }
        ParenShape::Node(l, r) => {
            let k = l.leaf_count();
            let lc = count_by_root(table, l, &leaves[..k]);
            let rc = count_by_root(table, r, &leaves[k..]);
            let mut out = vec![0u64; table.rank()];
            for a in table.labels() {
                if lc[a.0] == 0 {
                    continue;
                }
                for b in table.labels() {
                    if rc[b.0] == 0 {
                        continue;
                    }
                    for c in table.outcomes(a, b) {
                        out[c.0] += lc[a.0] * rc[b.0];
                    }
                }
            }
            out
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: &'static str },
    #[error("unknown label {name:?} at byte {position}")]
    UnknownLabel { position: usize, name: String },
    #[error("inadmissible node {node} at byte {position}: {left} ⊗ {right} has no {label} summand")]
    Inadmissible {
        position: usize,
        node: String,
        left: String,
        right: String,
        label: String,
    },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::UnknownLabel { position, .. }
            | ParseError::Inadmissible { position, .. } => *position,
        }
    }
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    table: &'a FusionTable,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::Syntax {
                position: self.pos,
                expected,
            })
        }
    }

    fn label(&mut self) -> Result<Label, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ParseError::Syntax {
                position: start,
                expected: "label",
            });
        }
        // Alphanumeric ASCII, so this slice is valid UTF-8.
        let name = core::str::from_utf8(&self.text[start..self.pos]).expect("ascii");
        self.table.label(name).ok_or_else(|| ParseError::UnknownLabel {
            position: start,
            name: name.into(),
        })
    }

    fn tree(&mut self) -> Result<FusionTree, ParseError> {
        let start = self.pos;
        if self.peek() != Some(b'(') {
            return match self.peek() {
                Some(b) if b.is_ascii_alphanumeric() => Ok(FusionTree::Leaf(self.label()?)),
                _ => Err(ParseError::Syntax {
                    position: self.pos,
                    expected: "'(' or label",
                }),
            };
        }
        self.pos += 1;
        let left = self.tree()?;
        if self.peek() != Some(b' ') {
            return Err(ParseError::Syntax {
                position: self.pos,
                expected: "space",
            });
        }
        while self.peek() == Some(b' ') {
            self.pos += 1;
        }
        let right = self.tree()?;
        self.expect(b')', "')'")?;
        self.expect(b'_', "'_'")?;
        let label = self.label()?;
        if !self.table.admits(left.root(), right.root(), label) {
            let t = self.table;
            let node = FusionTree::node(left.clone(), right.clone(), label);
            return Err(ParseError::Inadmissible {
                position: start,
                node: format_tree(&node, t),
                left: t.name(left.root()).into(),
                right: t.name(right.root()).into(),
                label: t.name(label).into(),
            });
        }
        Ok(FusionTree::node(left, right, label))
    }
}

/// Parses one tree in the fully parenthesized notation and checks
/// admissibility of every node.
pub fn parse_tree(text: &str, table: &FusionTable) -> Result<FusionTree, ParseError> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
        table,
    };
    let tree = p.tree()?;
    if p.pos != text.len() {
        return Err(ParseError::Syntax {
            position: p.pos,
            expected: "end of input",
        });
    }
    Ok(tree)
}

/// Canonical text: single spaces, lowercase names, channel after every `)`.
pub fn format_tree(tree: &FusionTree, table: &FusionTable) -> String {
    let mut out = String::new();
    write_tree(tree, table, &mut out);
    out
}

fn write_tree(tree: &FusionTree, table: &FusionTable, out: &mut String) {
    match tree {
        FusionTree::Leaf(l) => push_name(table.name(*l), out),
        FusionTree::Node { left, right, label } => {
            out.push('(');
            write_tree(left, table, out);
            out.push(' ');
            write_tree(right, table, out);
            out.push_str(")_");
            push_name(table.name(*label), out);
        }
    }
}

fn push_name(name: &str, out: &mut String) {
    out.extend(name.chars().map(|c| c.to_ascii_lowercase()));
}
