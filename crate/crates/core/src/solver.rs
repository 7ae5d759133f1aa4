//! Closed-form pentagon and hexagon solutions for Fibonacci anyons, and the
//! matrix residuals that certify them.
//!
//! Matrices follow the basis-change convention used throughout the crate:
//! row `i` of a transition matrix expands the `i`-th source basis vector in
//! the target basis, so a composite of moves is the product of their
//! matrices in the order they are applied. Inside the residuals the four-
//! and three-leaf bases are listed in the traditional hand-derivation order
//! (not the canonical order of [`crate::fusion_trees`]), which is why the
//! first transition carries a permutation.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{cis, CMatrix};
use crate::math;
use crate::DEFAULT_TOL;

/// The golden-ratio constant `(√5 − 1)/2`.
pub fn golden_q() -> f64 {
    (math::sqrt(5.0) - 1.0) / 2.0
}

/// Associator data for Fibonacci anyons.
///
/// `p` is the 1-channel component of `α_{τ,τ,τ}`; `[[q, r], [s, t]]` is the
/// τ-channel block, rows indexed by the inner channel of `((ττ)τ)` and
/// columns by the inner channel of `(τ(ττ))`, unit channel first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FibFSymbols {
    pub p: Complex64,
    pub q: Complex64,
    pub r: Complex64,
    pub s: Complex64,
    pub t: Complex64,
    pub theta: f64,
}

impl FibFSymbols {
    /// The τ-channel block `[[q, r], [s, t]]`.
    pub fn tau_block(&self) -> CMatrix {
        CMatrix::from_rows(vec![vec![self.q, self.r], vec![self.s, self.t]]).expect("2x2")
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.tau_block().unitarity_residual().max((self.p.norm() - 1.0).abs())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    /// Pentagon-consistent and unitary, i.e. the branch the hexagon solver accepts.
    pub fn is_unitary_branch(&self, tol: f64) -> bool {
        self.is_unitary(tol) && pentagon_residual(self) <= tol && self.q.re > 0.0
    }

    pub fn conj(&self) -> FibFSymbols {
        FibFSymbols {
            p: self.p.conj(),
            q: self.q.conj(),
            r: self.r.conj(),
            s: self.s.conj(),
            t: self.t.conj(),
            theta: -self.theta,
        }
    }
}

/// Braiding scalars: `a` on the unit channel of `τ⊗τ`, `b` on the τ channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FibRSymbols {
    pub a: Complex64,
    pub b: Complex64,
}

impl FibRSymbols {
    pub fn conj(&self) -> FibRSymbols {
        FibRSymbols {
            a: self.a.conj(),
            b: self.b.conj(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Unitary,
    NonUnitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Counterclockwise,
    Clockwise,
}

/// Which hexagon: with `σ`, or with every `σ_{X,Y}` replaced by `σ_{Y,X}^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HexagonVariant {
    Sigma,
    SigmaInverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SolverError {
    #[error("the hexagon is solved only on the unitary pentagon branch (unitarity residual {unitarity:e}, pentagon residual {pentagon:e})")]
    UnsupportedBranch { unitarity: f64, pentagon: f64 },
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Closed-form pentagon solution.
///
/// Unitary: `q = (√5−1)/2`, `r = √q e^{iθ}`, `s = conj(r)`. Non-unitary:
/// `q = (−1−√5)/2` with `r = s = i√|q|`; `theta` is ignored.
pub fn solve_pentagon_fibonacci(branch: Branch, theta: f64) -> FibFSymbols {
    match branch {
        Branch::Unitary => {
            let q = golden_q();
            let root = math::sqrt(q);
            FibFSymbols {
                p: re(1.0),
                q: re(q),
                r: cis(theta) * root,
                s: cis(-theta) * root,
                t: re(-q),
                theta,
            }
        }
        Branch::NonUnitary => {
            let q = (-1.0 - math::sqrt(5.0)) / 2.0;
            let rs = Complex64::new(0.0, math::sqrt(q.abs()));
            FibFSymbols {
                p: re(1.0),
                q: re(q),
                r: rs,
                s: rs,
                t: re(-q),
                theta: 0.0,
            }
        }
    }
}

fn m3(rows: [[Complex64; 3]; 3]) -> CMatrix {
    CMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).expect("3x3")
}

fn m2(rows: [[Complex64; 2]; 2]) -> CMatrix {
    CMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).expect("2x2")
}

/// The five transition matrices of the pentagon on the τ-component of
/// `τ^{⊗4}`, in the order
/// `[α_{ττ,τ,τ}, α_{τ,τ,ττ}, α_{τ,τ,τ}⊗I, α_{τ,ττ,τ}, I⊗α_{τ,τ,τ}]`.
pub fn pentagon_matrices_tau(f: &FibFSymbols) -> [CMatrix; 5] {
    let (p, q, r, s, t) = (f.p, f.q, f.r, f.s, f.t);
    let z = re(0.0);
    let o = re(1.0);
    let permuted = m3([[z, q, r], [o, z, z], [z, s, t]]);
    let middle = m3([[q, z, r], [z, o, z], [s, z, t]]);
    let padded = m3([[p, z, z], [z, q, r], [z, s, t]]);
    [permuted, middle.clone(), padded.clone(), middle, padded]
}

/// Same five matrices on the unit component of `τ^{⊗4}`.
pub fn pentagon_matrices_unit(f: &FibFSymbols) -> [CMatrix; 5] {
    let z = re(0.0);
    let o = re(1.0);
    let diag = m2([[o, z], [z, f.p]]);
    let block = f.tau_block();
    [diag.clone(), diag.clone(), block.clone(), diag, block]
}

/// Long-side and short-side products for one component.
pub fn pentagon_sides(ms: &[CMatrix; 5]) -> (CMatrix, CMatrix) {
    let short = &ms[0] * &ms[1];
    let long = &(&ms[2] * &ms[3]) * &ms[4];
    (long, short)
}

/// Max-abs difference between the long and short sides of the pentagon,
/// over both components of `τ^{⊗4}`.
pub fn pentagon_residual(f: &FibFSymbols) -> f64 {
    let (lt, st) = pentagon_sides(&pentagon_matrices_tau(f));
    let (lu, su) = pentagon_sides(&pentagon_matrices_unit(f));
    lt.max_abs_diff(&st)
        .expect("3x3")
        .max(lu.max_abs_diff(&su).expect("2x2"))
}

/// Braiding scalars from the hexagon, for the unitary pentagon branch.
///
/// `b` is the root of `b² + q b + 1 = 0` with positive imaginary part for
/// the counterclockwise orientation (this is `e^{3πi/5}`), its conjugate
/// for the clockwise one; `a = b²`.
pub fn solve_hexagon_fibonacci(f: &FibFSymbols, orientation: Orientation) -> Result<FibRSymbols, SolverError> {
    if !f.is_unitary_branch(DEFAULT_TOL) {
        return Err(SolverError::UnsupportedBranch {
            unitarity: f.unitarity_residual(),
            pentagon: pentagon_residual(f),
        });
    }
    let q = f.q.re;
    let b_ccw = Complex64::new(-q / 2.0, math::sqrt(4.0 - q * q) / 2.0);
    let b = match orientation {
        Orientation::Counterclockwise => b_ccw,
        Orientation::Clockwise => b_ccw.conj(),
    };
    Ok(FibRSymbols { a: b * b, b })
}

/// The two composites of the τ-component hexagon,
/// `(α · σ_{τ,ττ} · α, (σ⊗I) · α · (I⊗σ))`.
pub fn hexagon_sides_tau(f: &FibFSymbols, a: Complex64, b: Complex64) -> (CMatrix, CMatrix) {
    let z = re(0.0);
    let alpha = f.tau_block();
    // The left-pair channel of ((ττ)τ) and the right-pair channel of
    // (τ(ττ)) both run over (1, τ), so σ⊗I and I⊗σ are the same diagonal.
    let pair = m2([[a, z], [z, b]]);
    let through = m2([[re(1.0), z], [z, b]]);
    let top = &(&alpha * &through) * &alpha;
    let bottom = &(&pair * &alpha) * &pair;
    (top, bottom)
}

/// Hexagon residual: τ-component matrix mismatch combined with the unit
/// component scalar mismatch.
pub fn hexagon_residual(f: &FibFSymbols, r: &FibRSymbols, variant: HexagonVariant) -> f64 {
    let (a, b) = match variant {
        HexagonVariant::Sigma => (r.a, r.b),
        HexagonVariant::SigmaInverse => (r.a.inv(), r.b.inv()),
    };
    let (top, bottom) = hexagon_sides_tau(f, a, b);
    let tau = top.max_abs_diff(&bottom).expect("2x2");
    // Unit component: top p·a·p, bottom b·p·b.
    let unit = (f.p * a * f.p - b * f.p * b).norm();
    tau.max(unit)
}

/// One identity with its residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootIdentityReport {
    pub identities: [IdentityCheck; 4],
    /// `|b^k − 1|` for `k = 1..=10`.
    pub powers: Vec<f64>,
    pub primitive_tenth_root: bool,
}

impl RootIdentityReport {
    pub fn all_passed(&self) -> bool {
        self.identities.iter().all(|c| c.passed) && self.primitive_tenth_root
    }
}

/// Evaluates the algebraic relations between `b` and `q` implied by the
/// hexagon, and checks that `b` is a primitive tenth root of unity.
pub fn verify_root_identities(f: &FibFSymbols, r: &FibRSymbols, tol: f64) -> RootIdentityReport {
    let q = f.q;
    let b = r.b;
    let one = re(1.0);
    let b2 = b * b;
    let b3 = b2 * b;
    let b4 = b3 * b;
    let check = |name, residual: f64| IdentityCheck {
        name,
        residual,
        passed: residual < tol,
    };
    let identities = [
        check("b^3 = q(1-b)", (b3 - q * (one - b)).norm()),
        check("q + b = b^4", (q + b - b4).norm()),
        check("1 + bq + b^2 = 0", (one + b * q + b2).norm()),
        check("b^4 - b^3 + b^2 - b + 1 = 0", (b4 - b3 + b2 - b + one).norm()),
    ];
    let mut powers = Vec::with_capacity(10);
    let mut acc = one;
    for _ in 1..=10 {
        acc *= b;
        powers.push((acc - one).norm());
    }
    let primitive_tenth_root = powers[..9].iter().all(|&d| d > tol) && powers[9] < tol;
    RootIdentityReport {
        identities,
        powers,
        primitive_tenth_root,
    }
}
