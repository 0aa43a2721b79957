//! Weight tensors and assignments: index arithmetic, feasibility tracking,
//! objective evaluation, and the pruned scans every heuristic builds on.
//!
//! Coordinates are 1-based at the API surface (a vector lives in `{1..n}^s`);
//! the flat weight tensor is row-major, last coordinate varying fastest. All
//! objective sums use 64-bit accumulation so `n * max_weight` cannot overflow.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::ops::ControlFlow;
use std::path::Path;

use crate::{Error, Result};

/// A single vector weight. 4 bytes, matching the storage the scan
/// optimizations are sized around.
pub type Weight = u32;

const BINARY_MAGIC: &[u8; 8] = b"MAPBIN01";

/// Computes `n^s` as a usize, failing instead of overflowing.
pub(crate) fn num_vectors(s: usize, n: usize) -> Result<usize> {
    let mut count: usize = 1;
    for _ in 0..s {
        count = count
            .checked_mul(n)
            .ok_or_else(|| Error::TooManyVectors {
                vectors: (n as u128).saturating_pow(s as u32),
                max: usize::MAX,
            })?;
    }
    Ok(count)
}

/// Advances `coords` (1-based, last coordinate fastest) to the next row-major
/// tuple. Returns false after wrapping past the last tuple.
pub(crate) fn advance_coords(coords: &mut [u32], n: usize) -> bool {
    for c in coords.iter_mut().rev() {
        if (*c as usize) < n {
            *c += 1;
            return true;
        }
        *c = 1;
    }
    false
}

/// An s-AP instance: `s` dimensions of size `n` and the flat row-major
/// tensor of `n^s` non-negative weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    s: usize,
    n: usize,
    weights: Vec<Weight>,
}

impl Instance {
    /// Builds an instance, rejecting `s < 2`, `n < 1` and weight vectors of
    /// the wrong length.
    pub fn new(s: usize, n: usize, weights: Vec<Weight>) -> Result<Instance> {
        if s < 2 {
            return Err(Error::InvalidDimensions(s));
        }
        if n < 1 {
            return Err(Error::InvalidSize(n));
        }
        let expected = num_vectors(s, n)?;
        if weights.len() != expected {
            return Err(Error::WeightCount {
                expected,
                got: weights.len(),
            });
        }
        Ok(Instance { s, n, weights })
    }

    /// Builds an instance by evaluating `f` on every coordinate tuple in
    /// row-major order.
    pub fn from_fn<F>(s: usize, n: usize, mut f: F) -> Result<Instance>
    where
        F: FnMut(&[u32]) -> Weight,
    {
        if s < 2 {
            return Err(Error::InvalidDimensions(s));
        }
        if n < 1 {
            return Err(Error::InvalidSize(n));
        }
        let count = num_vectors(s, n)?;
        let mut weights = Vec::with_capacity(count);
        let mut coords = vec![1u32; s];
        loop {
            weights.push(f(&coords));
            if !advance_coords(&mut coords, n) {
                break;
            }
        }
        debug_assert_eq!(weights.len(), count);
        Ok(Instance { s, n, weights })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of vectors in the instance, `n^s`.
    pub fn num_vectors(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    /// Row-major stride of dimension `dim` (0-based): `n^(s-1-dim)`.
    pub(crate) fn stride(&self, dim: usize) -> usize {
        self.n.pow((self.s - 1 - dim) as u32)
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if p.coords.len() != self.s {
            return Err(Error::PointArity {
                expected: self.s,
                got: p.coords.len(),
            });
        }
        for (dim, &value) in p.coords.iter().enumerate() {
            if value < 1 || value as usize > self.n {
                return Err(Error::InvalidPoint {
                    dim: dim + 1,
                    value,
                    n: self.n,
                });
            }
        }
        Ok(())
    }

    /// Flat row-major index of a point: `sum((c_j - 1) * n^(s-j))`.
    pub fn index_of(&self, p: &Point) -> Result<usize> {
        self.check_point(p)?;
        let mut idx = 0usize;
        for &value in &p.coords {
            idx = idx * self.n + (value as usize - 1);
        }
        Ok(idx)
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn coords_of(&self, idx: usize) -> Result<Point> {
        if idx >= self.weights.len() {
            return Err(Error::InvalidIndex {
                idx,
                count: self.weights.len(),
            });
        }
        let mut coords = vec![0u32; self.s];
        let mut rest = idx;
        for c in coords.iter_mut().rev() {
            *c = (rest % self.n) as u32 + 1;
            rest /= self.n;
        }
        Ok(Point { coords })
    }

    /// Weight of a single vector.
    pub fn weight(&self, p: &Point) -> Result<Weight> {
        Ok(self.weights[self.index_of(p)?])
    }

    /// Sum of all weights in the tensor.
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().map(|&w| w as u64).sum()
    }

    /// Text form: header `MAP <s> <n>`, then `n^s` weights in row-major
    /// order, `n` per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("MAP {} {}\n", self.s, self.n);
        for line in self.weights.chunks(self.n) {
            let mut first = true;
            for w in line {
                if !first {
                    out.push(' ');
                }
                out.push_str(&w.to_string());
                first = false;
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(src: &str) -> Result<Instance> {
        let mut tokens = src.split_whitespace();
        match tokens.next() {
            Some("MAP") => {}
            other => {
                return Err(Error::Format(format!(
                    "expected MAP header, found {:?}",
                    other.unwrap_or("")
                )))
            }
        }
        let s: usize = parse_token(tokens.next(), "dimension count")?;
        let n: usize = parse_token(tokens.next(), "dimension size")?;
        if s < 2 {
            return Err(Error::InvalidDimensions(s));
        }
        if n < 1 {
            return Err(Error::InvalidSize(n));
        }
        let count = num_vectors(s, n)?;
        let mut weights = Vec::with_capacity(count);
        for _ in 0..count {
            let w: Weight = parse_token(tokens.next(), "weight")?;
            weights.push(w);
        }
        if tokens.next().is_some() {
            return Err(Error::Format("trailing data after weight tensor".into()));
        }
        Instance::new(s, n, weights)
    }

    /// Binary form: magic `MAPBIN01`, little-endian u32 `s`, u32 `n`, then
    /// `n^s` little-endian u32 weights.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 4 * self.weights.len());
        out.extend_from_slice(BINARY_MAGIC);
        out.extend_from_slice(&(self.s as u32).to_le_bytes());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        for w in &self.weights {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Instance> {
        if bytes.len() < 16 || &bytes[..8] != BINARY_MAGIC {
            return Err(Error::Format("missing MAPBIN01 magic".into()));
        }
        let s = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let n = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        if s < 2 {
            return Err(Error::InvalidDimensions(s));
        }
        if n < 1 {
            return Err(Error::InvalidSize(n));
        }
        let count = num_vectors(s, n)?;
        let body = &bytes[16..];
        if body.len() != 4 * count {
            return Err(Error::Format(format!(
                "weight payload is {} bytes, expected {}",
                body.len(),
                4 * count
            )));
        }
        let weights = body
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Instance::new(s, n, weights)
    }

    pub fn write_text_file(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn write_binary_file(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(&self.to_binary())?;
        Ok(())
    }

    /// Reads an instance file, detecting the binary magic or the `MAP` text
    /// header.
    pub fn read_file(path: &Path) -> Result<Instance> {
        let bytes = fs::read(path)?;
        if bytes.len() >= 8 && &bytes[..8] == BINARY_MAGIC {
            return Instance::from_binary(&bytes);
        }
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::Format("instance file is neither MAPBIN01 nor text".into()))?;
        Instance::from_text(&text)
    }
}

fn parse_token<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Format(format!("unexpected end of input, wanted {what}")))?;
    tok.parse()
        .map_err(|_| Error::Format(format!("invalid {what}: {tok:?}")))
}

/// One vector of an assignment: `s` coordinates, each in `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    coords: Vec<u32>,
}

impl Point {
    pub fn new(coords: Vec<u32>) -> Point {
        Point { coords }
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A feasible partial assignment: up to `n` vectors that are pairwise
/// distinct in every coordinate, with per-dimension used-value sets.
///
/// Built only through [`try_extend`](Self::try_extend), so the feasibility
/// invariant holds by construction.
#[derive(Debug, Clone)]
pub struct PartialAssignment {
    s: usize,
    n: usize,
    rows: Vec<Point>,
    used: Vec<Vec<bool>>,
}

impl PartialAssignment {
    pub fn new(s: usize, n: usize) -> PartialAssignment {
        PartialAssignment {
            s,
            n,
            rows: Vec::with_capacity(n),
            used: vec![vec![false; n]; s],
        }
    }

    pub fn for_instance(inst: &Instance) -> PartialAssignment {
        PartialAssignment::new(inst.s(), inst.n())
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Point] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.n
    }

    /// Whether `value` is already taken in dimension `dim` (0-based dim,
    /// 1-based value).
    pub fn is_value_used(&self, dim: usize, value: u32) -> bool {
        self.used[dim][value as usize - 1]
    }

    /// Appends `p` if it conflicts with no existing row in any dimension;
    /// rejection leaves the assignment untouched and is a normal outcome.
    ///
    /// Panics if `p` has the wrong arity or out-of-range coordinates.
    pub fn try_extend(&mut self, p: Point) -> bool {
        assert_eq!(p.coords.len(), self.s, "point arity mismatch");
        for (dim, &value) in p.coords.iter().enumerate() {
            assert!(
                value >= 1 && value as usize <= self.n,
                "coordinate {value} out of range 1..={}",
                self.n
            );
            if self.used[dim][value as usize - 1] {
                return false;
            }
        }
        for (dim, &value) in p.coords.iter().enumerate() {
            self.used[dim][value as usize - 1] = true;
        }
        self.rows.push(p);
        true
    }

    /// Total weight of the assignment on `inst`.
    pub fn evaluate(&self, inst: &Instance) -> Result<u64> {
        if self.s != inst.s() || self.n != inst.n() {
            return Err(Error::ShapeMismatch {
                want_s: inst.s(),
                want_n: inst.n(),
                got_s: self.s,
                got_n: self.n,
            });
        }
        let mut total = 0u64;
        for row in &self.rows {
            total += inst.weight(row)? as u64;
        }
        Ok(total)
    }
}

/// A full assignment: exactly `n` rows, so every dimension's values form a
/// permutation of `1..=n`.
#[derive(Debug, Clone)]
pub struct Assignment {
    inner: PartialAssignment,
}

impl Assignment {
    pub fn from_partial(pa: PartialAssignment) -> Result<Assignment> {
        if !pa.is_full() {
            return Err(Error::NotFull {
                got: pa.len(),
                need: pa.n(),
            });
        }
        Ok(Assignment { inner: pa })
    }

    pub fn rows(&self) -> &[Point] {
        self.inner.rows()
    }

    pub fn n(&self) -> usize {
        self.inner.n()
    }

    pub fn s(&self) -> usize {
        self.inner.s()
    }

    pub fn as_partial(&self) -> &PartialAssignment {
        &self.inner
    }

    pub fn objective(&self, inst: &Instance) -> Result<u64> {
        self.inner.evaluate(inst)
    }
}

/// Visits every vector `e` with `a ∪ {e}` feasible, in strictly increasing
/// flat-index order, skipping whole sub-blocks whose prefix coordinate is
/// already used. Returns the number of weights read.
pub fn scan_available<F>(a: &PartialAssignment, inst: &Instance, mut visitor: F) -> u64
where
    F: FnMut(usize, &[u32], Weight),
{
    try_scan_available(a, inst, |idx, coords, w| {
        visitor(idx, coords, w);
        ControlFlow::Continue(())
    })
}

/// Like [`scan_available`] but the visitor can stop the scan early by
/// returning `ControlFlow::Break(())`.
pub fn try_scan_available<F>(a: &PartialAssignment, inst: &Instance, mut visitor: F) -> u64
where
    F: FnMut(usize, &[u32], Weight) -> ControlFlow<()>,
{
    assert_eq!(a.s(), inst.s(), "assignment/instance dimension mismatch");
    assert_eq!(a.n(), inst.n(), "assignment/instance size mismatch");
    if a.is_full() {
        return 0;
    }
    let strides: Vec<usize> = (0..inst.s()).map(|d| inst.stride(d)).collect();
    let mut coords = vec![0u32; inst.s()];
    let mut reads = 0u64;
    let _ = scan_rec(inst, &strides, &a.used, &mut coords, 0, 0, &mut reads, &mut visitor);
    reads
}

#[allow(clippy::too_many_arguments)]
fn scan_rec<F>(
    inst: &Instance,
    strides: &[usize],
    used: &[Vec<bool>],
    coords: &mut Vec<u32>,
    depth: usize,
    base: usize,
    reads: &mut u64,
    visitor: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(usize, &[u32], Weight) -> ControlFlow<()>,
{
    if depth == inst.s() {
        *reads += 1;
        return visitor(base, coords, inst.weights()[base]);
    }
    let stride = strides[depth];
    for (v0, taken) in used[depth].iter().enumerate() {
        if *taken {
            continue;
        }
        coords[depth] = v0 as u32 + 1;
        scan_rec(inst, strides, used, coords, depth + 1, base + v0 * stride, reads, visitor)?;
    }
    ControlFlow::Continue(())
}
