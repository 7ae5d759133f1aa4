//! Simple-object labels, fusion multiplicity tables, and the ring of objects
//! as multiplicity vectors over simple labels.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Index of a simple object in a [`FusionTable`]. Index 0 is the unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub usize);

impl Label {
    pub const UNIT: Label = Label(0);

    pub fn index(self) -> usize {
        self.0
    }

    pub fn is_unit(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("fusion table needs at least one label")]
    Empty,
    #[error("label {0} has an empty name")]
    EmptyName(usize),
    #[error("label name {0:?} must be alphanumeric")]
    BadName(String),
    #[error("duplicate label name {0:?}")]
    DuplicateName(String),
    #[error("fusion array shape mismatch at {path}: expected {expected} entries, found {found}")]
    Shape {
        path: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("object vector has length {found}, table rank is {rank}")]
    LengthMismatch { rank: usize, found: usize },
    #[error("label index {0} out of range")]
    UnknownLabel(usize),
    #[error("multiplicity overflow")]
    Overflow,
}

/// Fusion multiplicities `N[a][b][c]`: how often `c` occurs in `a ⊗ b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionTable {
    names: Vec<String>,
    n: Vec<u32>,
}

impl FusionTable {
    /// Builds a table from label names and a nested `rank×rank×rank` array.
    ///
    /// Only structure is checked here; the ring axioms are reported by
    /// [`validate`].
    pub fn new(names: Vec<String>, fusion: Vec<Vec<Vec<u32>>>) -> Result<Self, TableError> {
        let rank = names.len();
        if rank == 0 {
            return Err(TableError::Empty);
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(TableError::EmptyName(i));
            }
            if !name.chars().all(|c| c.is_ascii_alphanumeric()) {
                return Err(TableError::BadName(name.clone()));
            }
            if names[..i].iter().any(|m| m.eq_ignore_ascii_case(name)) {
                return Err(TableError::DuplicateName(name.clone()));
            }
        }
        let shape_err = |path: String, found: usize| TableError::Shape {
            path,
            expected: rank,
            found,
        };
        if fusion.len() != rank {
            return Err(shape_err("fusion".to_string(), fusion.len()));
        }
        let mut n = Vec::with_capacity(rank * rank * rank);
        for (a, plane) in fusion.iter().enumerate() {
            if plane.len() != rank {
                return Err(shape_err(alloc::format!("fusion[{a}]"), plane.len()));
            }
            for (b, row) in plane.iter().enumerate() {
                if row.len() != rank {
                    return Err(shape_err(alloc::format!("fusion[{a}][{b}]"), row.len()));
                }
                n.extend_from_slice(row);
            }
        }
        Ok(FusionTable { names, n })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn labels(&self) -> impl DoubleEndedIterator<Item = Label> + ExactSizeIterator + Clone {
        (0..self.rank()).map(Label)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, label: Label) -> &str {
        &self.names[label.0]
    }

    /// Looks a label up by name; exact match first, then ASCII-case-insensitive.
    pub fn label(&self, name: &str) -> Option<Label> {
        self.names
            .iter()
            .position(|n| n == name)
            .or_else(|| self.names.iter().position(|n| n.eq_ignore_ascii_case(name)))
            .map(Label)
    }

    #[inline]
    pub fn mult(&self, a: Label, b: Label, c: Label) -> u32 {
        let r = self.rank();
        self.n[(a.0 * r + b.0) * r + c.0]
    }

    pub fn set_mult(&mut self, a: Label, b: Label, c: Label, value: u32) {
        let r = self.rank();
        self.n[(a.0 * r + b.0) * r + c.0] = value;
    }

    /// Labels `c` with `N[a][b][c] >= 1`, ascending.
    pub fn outcomes(&self, a: Label, b: Label) -> impl Iterator<Item = Label> + '_ {
        self.labels().filter(move |&c| self.mult(a, b, c) > 0)
    }

    pub fn admits(&self, a: Label, b: Label, c: Label) -> bool {
        self.mult(a, b, c) > 0
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.n.iter().all(|&m| m <= 1)
    }

    /// Nested `rank×rank×rank` copy of the multiplicities.
    pub fn to_nested(&self) -> Vec<Vec<Vec<u32>>> {
        let r = self.rank();
        (0..r)
            .map(|a| {
                (0..r)
                    .map(|b| self.n[(a * r + b) * r..(a * r + b + 1) * r].to_vec())
                    .collect()
            })
            .collect()
    }

    pub fn unit_vec(&self) -> ObjectVec {
        self.simple(Label::UNIT)
    }

    pub fn simple(&self, label: Label) -> ObjectVec {
        let mut mults = vec![0; self.rank()];
        mults[label.0] = 1;
        ObjectVec(mults)
    }
}

/// The Fibonacci fusion rules: labels `1`, `tau`, with `tau ⊗ tau = 1 ⊕ tau`.
pub fn fibonacci_table() -> FusionTable {
    let names = vec!["1".to_string(), "tau".to_string()];
    let fusion = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 1]]];
    FusionTable::new(names, fusion).expect("fibonacci table is well formed")
}

/// Label of `tau` in [`fibonacci_table`].
pub const TAU: Label = Label(1);

/// A single broken ring axiom with its first witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// `N[0][a][c]` or `N[a][0][c]` differs from `δ(a, c)`.
    UnitLaw {
        a: Label,
        c: Label,
    },
    Commutativity {
        a: Label,
        b: Label,
        c: Label,
    },
    Associativity {
        a: Label,
        b: Label,
        c: Label,
        d: Label,
        left: u64,
        right: u64,
    },
}

impl Violation {
    pub fn class(&self) -> &'static str {
        match self {
            Violation::UnitLaw { .. } => "unit",
            Violation::Commutativity { .. } => "commutativity",
            Violation::Associativity { .. } => "associativity",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::UnitLaw { a, c } => write!(f, "unit law fails at ({}, {})", a.0, c.0),
            Violation::Commutativity { a, b, c } => {
                write!(f, "commutativity fails at ({}, {}, {})", a.0, b.0, c.0)
            }
            Violation::Associativity {
                a,
                b,
                c,
                d,
                left,
                right,
            } => write!(
                f,
                "associativity fails at ({}, {}, {}, {}): {} vs {}",
                a.0, b.0, c.0, d.0, left, right
            ),
        }
    }
}

/// The outcome of [`validate`]: at most one witness per invariant class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn find(&self, class: &str) -> Option<&Violation> {
        self.violations.iter().find(|v| v.class() == class)
    }
}

/// Checks the unit law, commutativity, and associativity of the induced ring.
pub fn validate(table: &FusionTable) -> ValidationReport {
    let mut violations = Vec::new();
    let unit = Label::UNIT;

    'unit: for a in table.labels() {
        for c in table.labels() {
            let want = u32::from(a == c);
            if table.mult(unit, a, c) != want || table.mult(a, unit, c) != want {
                violations.push(Violation::UnitLaw { a, c });
                break 'unit;
            }
        }
    }

    'comm: for a in table.labels() {
        for b in table.labels() {
            for c in table.labels() {
                if table.mult(a, b, c) != table.mult(b, a, c) {
                    violations.push(Violation::Commutativity { a, b, c });
                    break 'comm;
                }
            }
        }
    }

    'assoc: for a in table.labels() {
        for b in table.labels() {
            for c in table.labels() {
                for d in table.labels() {
                    let left: u64 = table
                        .labels()
                        .map(|e| u64::from(table.mult(a, b, e)) * u64::from(table.mult(e, c, d)))
                        .sum();
                    let right: u64 = table
                        .labels()
                        .map(|f| u64::from(table.mult(b, c, f)) * u64::from(table.mult(a, f, d)))
                        .sum();
                    if left != right {
                        violations.push(Violation::Associativity {
                            a,
                            b,
                            c,
                            d,
                            left,
                            right,
                        });
                        break 'assoc;
                    }
                }
            }
        }
    }

    ValidationReport { violations }
}

/// An object as a multiplicity vector over simple labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObjectVec(pub Vec<u64>);

impl ObjectVec {
    pub fn mults(&self) -> &[u64] {
        &self.0
    }

    pub fn get(&self, label: Label) -> u64 {
        self.0[label.0]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

fn check_len(table: &FusionTable, x: &ObjectVec) -> Result<(), RingError> {
    if x.0.len() != table.rank() {
        return Err(RingError::LengthMismatch {
            rank: table.rank(),
            found: x.0.len(),
        });
    }
    Ok(())
}

/// `x ⊗ y`, extended bilinearly from the table.
pub fn fuse(table: &FusionTable, x: &ObjectVec, y: &ObjectVec) -> Result<ObjectVec, RingError> {
    check_len(table, x)?;
    check_len(table, y)?;
    let mut out = vec![0u64; table.rank()];
    for a in table.labels() {
        let xa = x.0[a.0];
        if xa == 0 {
            continue;
        }
        for b in table.labels() {
            let yb = y.0[b.0];
            if yb == 0 {
                continue;
            }
            let xy = xa.checked_mul(yb).ok_or(RingError::Overflow)?;
            for c in table.labels() {
                let m = u64::from(table.mult(a, b, c));
                if m == 0 {
                    continue;
                }
                let term = xy.checked_mul(m).ok_or(RingError::Overflow)?;
                out[c.0] = out[c.0].checked_add(term).ok_or(RingError::Overflow)?;
            }
        }
    }
    Ok(ObjectVec(out))
}

/// `label^{⊗n}`; `n = 0` is the unit object.
pub fn tensor_power(table: &FusionTable, label: Label, n: u32) -> Result<ObjectVec, RingError> {
    if label.0 >= table.rank() {
        return Err(RingError::UnknownLabel(label.0));
    }
    let simple = table.simple(label);
    let mut acc = table.unit_vec();
    for _ in 0..n {
        acc = fuse(table, &acc, &simple)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ONE: Label = Label::UNIT;

    fn fib_numbers(count: usize) -> Vec<u64> {
        // f_{-1}, f_0, f_1, ...
        let mut f = vec![1u64, 0];
        while f.len() < count + 2 {
            let k = f.len();
            f.push(f[k - 1] + f[k - 2]);
        }
        f
    }

    #[test]
    fn fibonacci_rules() {
        let t = fibonacci_table();
        assert_eq!(t.mult(TAU, TAU, ONE), 1);
        assert_eq!(t.mult(TAU, TAU, TAU), 1);
        assert_eq!(t.mult(ONE, TAU, TAU), 1);
        assert_eq!(t.mult(ONE, TAU, ONE), 0);
        assert!(validate(&t).passed());
        assert!(t.is_multiplicity_free());
    }

    #[test]
    fn fuse_examples() {
        let t = fibonacci_table();
        let tau = t.simple(TAU);
        assert_eq!(fuse(&t, &tau, &tau).unwrap(), ObjectVec(vec![1, 1]));
        let x = ObjectVec(vec![3, 7]);
        assert_eq!(fuse(&t, &t.unit_vec(), &x).unwrap(), x);
        let s = ObjectVec(vec![1, 1]);
        assert_eq!(fuse(&t, &s, &s).unwrap(), ObjectVec(vec![2, 3]));
    }

    #[test]
    fn fuse_length_mismatch() {
        let t = fibonacci_table();
        let err = fuse(&t, &ObjectVec(vec![1]), &t.unit_vec()).unwrap_err();
        assert_eq!(err, RingError::LengthMismatch { rank: 2, found: 1 });
    }

    #[test]
    fn tensor_powers_follow_fibonacci() {
        let t = fibonacci_table();
        assert_eq!(tensor_power(&t, TAU, 0).unwrap(), ObjectVec(vec![1, 0]));
        assert_eq!(tensor_power(&t, TAU, 1).unwrap(), ObjectVec(vec![0, 1]));
        assert_eq!(tensor_power(&t, TAU, 4).unwrap(), ObjectVec(vec![2, 3]));
        assert_eq!(tensor_power(&t, TAU, 10).unwrap(), ObjectVec(vec![34, 55]));
        let f = fib_numbers(21);
        for n in 0..=20u32 {
            let v = tensor_power(&t, TAU, n).unwrap();
            // f[k] holds f_{k-1}
            assert_eq!(v.0, vec![f[n as usize], f[n as usize + 1]], "n = {n}");
        }
    }

    #[test]
    fn validate_reports_structure_separately() {
        let err = FusionTable::new(
            vec!["1".into(), "tau".into()],
            vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]],
        )
        .unwrap_err();
        assert!(matches!(err, TableError::Shape { .. }));
        assert!(matches!(
            FusionTable::new(vec!["1".into(), "1".into()], vec![]),
            Err(TableError::DuplicateName(_))
        ));
    }

    #[test]
    fn unit_law_violation() {
        let mut t = fibonacci_table();
        t.set_mult(ONE, TAU, TAU, 0);
        let report = validate(&t);
        assert!(matches!(report.find("unit"), Some(Violation::UnitLaw { .. })));
    }

    #[test]
    fn z2_corruption_is_a_valid_ring() {
        // Dropping tau from tau⊗tau leaves the Z2 rules, which satisfy every
        // ring axiom: both associativity sums at (tau,tau,tau,tau) equal 1.
        let mut t = fibonacci_table();
        t.set_mult(TAU, TAU, TAU, 0);
        let left: u32 = t.labels().map(|e| t.mult(TAU, TAU, e) * t.mult(e, TAU, TAU)).sum();
        let right: u32 = t.labels().map(|f| t.mult(TAU, TAU, f) * t.mult(TAU, f, TAU)).sum();
        assert_eq!((left, right), (1, 1));
        assert!(validate(&t).passed());
    }

    #[test]
    fn single_entry_corruption_sweep() {
        let base = fibonacci_table();
        let mut caught = 0;
        let mut valid_rings = Vec::new();
        for a in base.labels() {
            for b in base.labels() {
                for c in base.labels() {
                    let mut t = base.clone();
                    t.set_mult(a, b, c, 1 - base.mult(a, b, c));
                    if validate(&t).passed() {
                        valid_rings.push((a, b, c));
                    } else {
                        caught += 1;
                    }
                }
            }
        }
        // Every corruption touching the unit row or column breaks the unit
        // law; the two tau⊗tau corruptions yield genuine fusion rings.
        assert_eq!(caught, 6);
        assert_eq!(valid_rings, vec![(TAU, TAU, ONE), (TAU, TAU, TAU)]);
    }

    #[test]
    fn associativity_witness_on_non_associative_table() {
        // (a⊗a)⊗b = 1 but a⊗(a⊗b) = b
        let names = vec!["1".to_string(), "a".to_string(), "b".to_string()];
        let t = FusionTable::new(
            names,
            vec![
                vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
                vec![vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 1]],
                vec![vec![0, 0, 1], vec![0, 0, 1], vec![1, 0, 0]],
            ],
        )
        .unwrap();
        let report = validate(&t);
        assert!(report.find("unit").is_none());
        assert!(report.find("commutativity").is_none());
        assert!(matches!(
            report.find("associativity"),
            Some(Violation::Associativity { .. })
        ));
    }

    fn small_vec() -> impl Strategy<Value = ObjectVec> {
        proptest::collection::vec(0u64..20, 2).prop_map(ObjectVec)
    }

    proptest! {
        #[test]
        fn fuse_is_commutative(x in small_vec(), y in small_vec()) {
            let t = fibonacci_table();
            prop_assert_eq!(fuse(&t, &x, &y).unwrap(), fuse(&t, &y, &x).unwrap());
        }

        #[test]
        fn fuse_is_associative(x in small_vec(), y in small_vec(), z in small_vec()) {
            let t = fibonacci_table();
            let l = fuse(&t, &fuse(&t, &x, &y).unwrap(), &z).unwrap();
            let r = fuse(&t, &x, &fuse(&t, &y, &z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }
    }
}
