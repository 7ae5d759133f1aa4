//! Exhaustive search over freely reduced braid words.
//!
//! Letters are ordered `+1 < −1 < +2 < −2 < …`; words compare by length,
//! then letter by letter in that order. The search space splits by the
//! first letter into any number of partitions, and [`merge`] combines
//! partial results so that the outcome does not depend on the split.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;
use thiserror::Error;

use crate::braid_rep::{BraidRep, BraidWord};
use crate::linalg::{CMatrix, LinalgError};
use crate::math;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Targets further than this from unitary are rejected.
pub const UNITARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("target is {target}x{target_cols}, representation has dimension {rep}")]
    DimensionMismatch {
        target: usize,
        target_cols: usize,
        rep: usize,
    },
    #[error("target has non-finite entries")]
    NonFinite,
    #[error("target is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("prune tolerance must be finite and non-negative")]
    BadTolerance,
    #[error("partition {index} of {count} does not exist")]
    BadPartition { index: usize, count: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Generators in search order: `+1, −1, +2, −2, …, ±(n−1)`.
pub fn alphabet(n_strands: usize) -> Vec<i32> {
    (1..n_strands as i32).flat_map(|i| [i, -i]).collect()
}

/// Position of a letter in [`alphabet`].
pub fn letter_rank(letter: i32) -> usize {
    2 * (letter.unsigned_abs() as usize - 1) + usize::from(letter < 0)
}

/// Shortlex order on letter sequences.
pub fn compare_words(a: &[i32], b: &[i32]) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.iter().map(|&l| letter_rank(l)).cmp(b.iter().map(|&l| letter_rank(l))))
}

/// Phase-invariant distance `sqrt(1 − |tr(U^† V)| / d)` between unitaries.
///
/// Evaluated as `‖U − e^{iφ} V‖_F / sqrt(2d)` with the optimal phase, which
/// equals the trace form for unitary inputs and keeps full relative
/// precision near zero.
pub fn dist(u: &CMatrix, v: &CMatrix) -> Result<f64, LinalgError> {
    if !u.is_square() || !v.is_square() || u.rows() != v.rows() {
        return Err(LinalgError::DimensionMismatch {
            left: (u.rows(), u.cols()),
            right: (v.rows(), v.cols()),
        });
    }
    Ok(dist_raw(u.as_slice(), v.as_slice(), u.rows()))
}

fn dist_raw(u: &[Complex64], v: &[Complex64], d: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    let tr: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    let n = tr.norm();
    let w = if n > 0.0 {
        tr.conj() / n
    } else {
        Complex64::new(1.0, 0.0)
    };
    let sq: f64 = u.iter().zip(v).map(|(a, b)| (a - w * b).norm_sqr()).sum();
    math::sqrt(sq / (2 * d) as f64)
}

/// `out = a · b` for `d×d` row-major buffers, same summation order as
/// [`CMatrix::checked_mul`].
fn mul_into(a: &[Complex64], b: &[Complex64], out: &mut [Complex64], d: usize) {
    out.fill(ZERO);
    for i in 0..d {
        for k in 0..d {
            let x = a[i * d + k];
            if x == ZERO {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += x * b[k * d + j];
            }
        }
    }
}

fn to_matrix(data: &[Complex64], d: usize) -> CMatrix {
    CMatrix::from_rows(data.chunks(d.max(1)).take(d).map(|r| r.to_vec()).collect()).expect("square buffer")
}

/// One slice of the search space: the first letters whose alphabet position
/// is `index` modulo `count`. Partition 0 also owns the empty word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partition {
    index: usize,
    count: usize,
}

impl Partition {
    pub const WHOLE: Partition = Partition { index: 0, count: 1 };

    pub fn new(index: usize, count: usize) -> Result<Self, SearchError> {
        if count == 0 || index >= count {
            return Err(SearchError::BadPartition { index, count });
        }
        Ok(Partition { index, count })
    }

    /// All `count` partitions.
    pub fn split(count: usize) -> Vec<Partition> {
        (0..count.max(1))
            .map(|index| Partition {
                index,
                count: count.max(1),
            })
            .collect()
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn count(&self) -> usize {
        self.count
    }

    fn owns_first(&self, rank: usize) -> bool {
        rank % self.count == self.index
    }
}

/// Best word of one partition, or of several after [`merge`].
#[derive(Debug, Clone, PartialEq)]
pub struct PartialResult {
    pub best: Option<Candidate>,
    pub words_examined: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub letters: Vec<i32>,
    pub distance: f64,
    pub matrix: CMatrix,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        better(self.distance, &self.letters, other.distance, &other.letters)
    }
}

fn better(d: f64, w: &[i32], best_d: f64, best_w: &[i32]) -> bool {
    match d.total_cmp(&best_d) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => compare_words(w, best_w) == Ordering::Less,
    }
}

/// Combines partial results by distance, then shortlex order.
pub fn merge<I: IntoIterator<Item = PartialResult>>(parts: I) -> PartialResult {
    let mut out = PartialResult {
        best: None,
        words_examined: 0,
    };
    for p in parts {
        out.words_examined += p.words_examined;
        if let Some(c) = p.best {
            match &out.best {
                Some(b) if !c.beats(b) => {}
                _ => out.best = Some(c),
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub word: BraidWord,
    pub distance: f64,
    pub matrix: CMatrix,
    pub words_examined: u64,
}

/// Depth-first walk over reduced words of length `min_len..=max_len`
/// whose first letter lies in `part`.
struct Walker<'a, F> {
    d: usize,
    min_len: usize,
    max_len: usize,
    part: Partition,
    letters: Vec<i32>,
    gens: Vec<&'a [Complex64]>,
    stack: Vec<Vec<Complex64>>,
    word: Vec<i32>,
    visit: F,
}

impl<F: FnMut(&[i32], &[Complex64])> Walker<'_, F> {
    fn run(&mut self) {
        if self.min_len == 0 && self.part.index == 0 {
            (self.visit)(&[], &self.stack[0]);
        }
        if self.max_len > 0 {
            self.walk(0, None);
        }
    }

    fn walk(&mut self, depth: usize, last: Option<usize>) {
        for rank in 0..self.letters.len() {
            if depth == 0 && !self.part.owns_first(rank) {
                continue;
            }
            // `rank ^ 1` is the inverse letter.
            if last == Some(rank ^ 1) {
                continue;
            }
            let (lo, hi) = self.stack.split_at_mut(depth + 1);
            mul_into(self.gens[rank], &lo[depth], &mut hi[0], self.d);
            self.word.push(self.letters[rank]);
            if depth + 1 >= self.min_len {
                (self.visit)(&self.word, &self.stack[depth + 1]);
            }
            if depth + 1 < self.max_len {
                self.walk(depth + 1, Some(rank));
            }
            self.word.pop();
        }
    }
}

fn walk<F: FnMut(&[i32], &[Complex64])>(rep: &BraidRep, min_len: usize, max_len: usize, part: Partition, visit: F) {
    let d = rep.dim();
    let letters = alphabet(rep.n);
    let gens = letters
        .iter()
        .map(|&l| rep.letter_matrix(l).expect("letter from alphabet").as_slice())
        .collect();
    let mut stack = vec![vec![ZERO; d * d]; max_len + 1];
    stack[0].copy_from_slice(CMatrix::identity(d).as_slice());
    let mut w = Walker {
        d,
        min_len,
        max_len,
        part,
        letters,
        gens,
        stack,
        word: Vec::with_capacity(max_len),
        visit,
    };
    w.run();
}

fn check_target(rep: &BraidRep, target: &CMatrix) -> Result<(), SearchError> {
    let d = rep.dim();
    if target.rows() != d || target.cols() != d {
        return Err(SearchError::DimensionMismatch {
            target: target.rows(),
            target_cols: target.cols(),
            rep: d,
        });
    }
    if target.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SearchError::NonFinite);
    }
    let u = target.unitarity_residual();
    if u > UNITARITY_TOL {
        return Err(SearchError::NotUnitary(u));
    }
    Ok(())
}

/// Best reduced word of length `min_len..=max_len` within one partition.
pub fn search_partition(
    rep: &BraidRep,
    target: &CMatrix,
    min_len: usize,
    max_len: usize,
    part: Partition,
) -> Result<PartialResult, SearchError> {
    check_target(rep, target)?;
    let d = rep.dim();
    let t = target.as_slice();
    let mut examined = 0u64;
    let mut best: Option<(Vec<i32>, f64, Vec<Complex64>)> = None;
    walk(rep, min_len, max_len, part, |word, m| {
        examined += 1;
        let dd = dist_raw(m, t, d);
        let take = match &best {
            None => true,
            Some((bw, bd, _)) => better(dd, word, *bd, bw),
        };
        if take {
            best = Some((word.to_vec(), dd, m.to_vec()));
        }
    });
    Ok(PartialResult {
        best: best.map(|(letters, distance, m)| Candidate {
            letters,
            distance,
            matrix: to_matrix(&m, d),
        }),
        words_examined: examined,
    })
}

/// Runs a search level by level when pruning, or in one pass otherwise.
///
/// `run(min_len, max_len)` must cover every partition of the given length
/// range; the threaded runner in the `anyonkit` crate plugs in here.
pub fn search_with<F>(
    rep: &BraidRep,
    target: &CMatrix,
    max_len: usize,
    prune_tol: f64,
    mut run: F,
) -> Result<SearchResult, SearchError>
where
    F: FnMut(usize, usize) -> Result<Vec<PartialResult>, SearchError>,
{
    if !prune_tol.is_finite() || prune_tol < 0.0 {
        return Err(SearchError::BadTolerance);
    }
    check_target(rep, target)?;
    let mut acc = PartialResult {
        best: None,
        words_examined: 0,
    };
    if prune_tol > 0.0 {
        for len in 0..=max_len {
            let level = merge(run(len, len)?);
            acc = merge([acc, level]);
            if acc.best.as_ref().is_some_and(|b| b.distance < prune_tol) {
                break;
            }
        }
    } else {
        acc = merge(run(0, max_len)?);
    }
    let best = acc.best.expect("the empty word is always examined");
    Ok(SearchResult {
        word: BraidWord {
            n_strands: rep.n,
            letters: best.letters,
        },
        distance: best.distance,
        matrix: best.matrix,
        words_examined: acc.words_examined,
    })
}

/// Best reduced word of length at most `max_len` approximating `target`.
/// `prune_tol = 0` examines everything; a positive value stops after the
/// first length at which some word is closer than `prune_tol`.
pub fn search(rep: &BraidRep, target: &CMatrix, max_len: usize, prune_tol: f64) -> Result<SearchResult, SearchError> {
    search_with(rep, target, max_len, prune_tol, |lo, hi| {
        Ok(vec![search_partition(rep, target, lo, hi, Partition::WHOLE)?])
    })
}

/// Best distance over words of length at most `ℓ`, for `ℓ = 0..=max_len`.
pub fn residual_curve(rep: &BraidRep, target: &CMatrix, max_len: usize) -> Result<Vec<(usize, f64)>, SearchError> {
    check_target(rep, target)?;
    let d = rep.dim();
    let t = target.as_slice();
    let mut per_len = vec![f64::INFINITY; max_len + 1];
    walk(rep, 0, max_len, Partition::WHOLE, |word, m| {
        let dd = dist_raw(m, t, d);
        if dd < per_len[word.len()] {
            per_len[word.len()] = dd;
        }
    });
    let mut run = f64::INFINITY;
    Ok(per_len
        .into_iter()
        .enumerate()
        .map(|(len, dd)| {
            run = run.min(dd);
            (len, run)
        })
        .collect())
}

/// Visits every reduced word of length at most `max_len` with its
/// incrementally built matrix.
pub fn for_each_word<F: FnMut(&[i32], &CMatrix)>(rep: &BraidRep, max_len: usize, mut f: F) {
    let d = rep.dim();
    walk(rep, 0, max_len, Partition::WHOLE, |w, m| f(w, &to_matrix(m, d)));
}
