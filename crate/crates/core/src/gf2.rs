//! GF(2) vectors and matrices, and adjacent independent row (AIR) matrices.
//!
//! An AIR matrix is a `K x L` zero-one matrix in which every `L` cyclically
//! adjacent rows are linearly independent. Independence here is over GF(2)
//! only.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use rand::Rng;

use crate::bits::BitBlock;
use crate::error::{Error, Result};

/// Fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vector(BitBlock);

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Gf2Vector(BitBlock::zeros(len))
    }

    /// Standard unit vector `e_n` (1-based position).
    pub fn unit(len: usize, n: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0.set(n - 1, true);
        v
    }

    pub fn from_bits(bits: BitBlock) -> Self {
        Gf2Vector(bits)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Gf2Vector(BitBlock::random(len, rng))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Coordinate `n` (1-based).
    pub fn coord(&self, n: usize) -> bool {
        self.0.get(n - 1)
    }

    pub fn bits(&self) -> &BitBlock {
        &self.0
    }

    pub fn xor(&self, other: &Gf2Vector) -> Gf2Vector {
        Gf2Vector(&self.0 ^ &other.0)
    }

    pub fn xor_assign(&mut self, other: &Gf2Vector) {
        self.0 ^= &other.0;
    }

    pub fn dot(&self, other: &Gf2Vector) -> bool {
        self.0.iter().zip(other.0.iter()).filter(|(a, b)| *a && *b).count() % 2 == 1
    }

    /// `⊕_n v_n · blocks[n]`: the GF(2) combination of equal-length blocks.
    pub fn combine<'a, I>(&self, blocks: I, block_len: usize) -> BitBlock
    where
        I: IntoIterator<Item = &'a BitBlock>,
    {
        let mut acc = BitBlock::zeros(block_len);
        for (i, b) in blocks.into_iter().enumerate() {
            if self.0.get(i) {
                acc ^= b;
            }
        }
        acc
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Vector({})", self.0)
    }
}

/// Row-reduced basis of a subspace of GF(2)^n, grown one vector at a time.
#[derive(Debug, Clone)]
pub struct Gf2Basis {
    len: usize,
    rows: Vec<(usize, BitBlock)>,
}

impl Gf2Basis {
    pub fn new(len: usize) -> Self {
        Gf2Basis {
            len,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &BitBlock> {
        self.rows.iter().map(|(_, r)| r)
    }

    /// `v` with every pivot coordinate cleared: a canonical representative of
    /// `v` modulo the span for this basis.
    pub fn reduce(&self, v: &BitBlock) -> BitBlock {
        let mut v = v.clone();
        for (p, r) in &self.rows {
            if v.get(*p) {
                v ^= r;
            }
        }
        v
    }

    pub fn contains(&self, v: &BitBlock) -> bool {
        assert_eq!(v.len(), self.len);
        self.reduce(v).is_zero()
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: &BitBlock) -> bool {
        assert_eq!(v.len(), self.len);
        let v = self.reduce(v);
        let Some(p) = v.iter().position(|b| b) else {
            return false;
        };
        for (_, r) in self.rows.iter_mut() {
            if r.get(p) {
                *r ^= &v;
            }
        }
        self.rows.push((p, v));
        true
    }
}

/// Dense zero-one matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<BitBlock>,
}

impl Gf2Matrix {
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Sizing("ragged matrix rows".into()));
        }
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| match x {
                        0 => Ok(false),
                        1 => Ok(true),
                        _ => Err(Error::Parse(format!("matrix entry {x} is not 0/1"))),
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(|b| BitBlock::from_bools(&b))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Gf2Matrix { cols, rows })
    }

    pub fn from_bit_rows(cols: usize, rows: Vec<BitBlock>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols));
        Gf2Matrix { cols, rows }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = BitBlock::zeros(n);
                r.set(i, true);
                r
            })
            .collect();
        Gf2Matrix { cols: n, rows }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at 1-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row - 1].get(col - 1)
    }

    /// Row `r` (1-based).
    pub fn row(&self, r: usize) -> &BitBlock {
        &self.rows[r - 1]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(u8::from).collect())
            .collect()
    }

    /// Rows `start, start+1, ..., start+len-1` with cyclic wrap-around (1-based).
    pub fn window(&self, start: usize, len: usize) -> Vec<&BitBlock> {
        let k = self.rows.len();
        (0..len).map(|o| &self.rows[(start - 1 + o) % k]).collect()
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let line: Vec<_> = r.iter().map(|b| if b { "1" } else { "0" }).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

pub fn rank_of<'a, I>(rows: I, cols: usize) -> usize
where
    I: IntoIterator<Item = &'a BitBlock>,
{
    let mut basis = Gf2Basis::new(cols);
    rows.into_iter().filter(|r| basis.insert(r)).count()
}

pub fn gf2_rank(m: &Gf2Matrix) -> usize {
    rank_of(&m.rows, m.cols)
}

/// True iff every `cols` cyclically consecutive rows have full rank.
pub fn check_air(m: &Gf2Matrix) -> bool {
    let (k, l) = (m.rows(), m.cols());
    if l == 0 || k < l {
        return false;
    }
    (1..=k).all(|s| rank_of(m.window(s, l), l) == l)
}

fn air_cache() -> &'static Mutex<HashMap<(usize, usize), Gf2Matrix>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Gf2Matrix>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// A `K x L` AIR matrix.
///
/// Identity for `L = K`, stacked identities when `L | K`, otherwise a
/// depth-first search seeded with an identity block. Results are memoized.
pub fn build_air(k: usize, l: usize) -> Result<Gf2Matrix> {
    if l == 0 || l > k {
        return Err(Error::InvalidConfig(format!(
            "AIR matrix needs 1 <= L <= K, got K={k}, L={l}"
        )));
    }
    if let Some(m) = air_cache().lock().expect("air cache").get(&(k, l)) {
        return Ok(m.clone());
    }
    let m = if k.is_multiple_of(l) {
        let rows = (0..k)
            .map(|i| {
                let mut r = BitBlock::zeros(l);
                r.set(i % l, true);
                r
            })
            .collect();
        Gf2Matrix { cols: l, rows }
    } else {
        search_air(k, l)?
    };
    debug_assert!(check_air(&m));
    air_cache()
        .lock()
        .expect("air cache")
        .insert((k, l), m.clone());
    Ok(m)
}

fn search_air(k: usize, l: usize) -> Result<Gf2Matrix> {
    // First L rows fixed to the identity: right-multiplying an AIR matrix by an
    // invertible matrix keeps it AIR, so this loses no solutions.
    let mut rows: Vec<BitBlock> = Gf2Matrix::identity(l).rows;
    let mut candidates: Vec<BitBlock> = (1..(1u64 << l)).map(|v| BitBlock::from_u64(v, l)).collect();
    candidates.sort_by_key(|c| std::cmp::Reverse(c.count_ones()));

    fn consistent(rows: &[BitBlock], k: usize, l: usize) -> bool {
        let placed = rows.len();
        // every window's placed rows must be independent
        (0..k).all(|s| {
            let members = (0..l).map(|o| (s + o) % k).filter(|&r| r < placed);
            let mut basis = Gf2Basis::new(l);
            members.into_iter().all(|r| basis.insert(&rows[r]))
        })
    }

    fn dfs(rows: &mut Vec<BitBlock>, k: usize, l: usize, cands: &[BitBlock], budget: &mut u64) -> bool {
        if rows.len() == k {
            return true;
        }
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let stacked = {
            let mut r = BitBlock::zeros(l);
            r.set(rows.len() % l, true);
            r
        };
        let order = std::iter::once(&stacked).chain(cands.iter().filter(|c| **c != stacked));
        for c in order {
            rows.push(c.clone());
            if consistent(rows, k, l) && dfs(rows, k, l, cands, budget) {
                return true;
            }
            rows.pop();
        }
        false
    }

    let mut budget = 5_000_000u64;
    if dfs(&mut rows, k, l, &candidates, &mut budget) {
        Ok(Gf2Matrix { cols: l, rows })
    } else {
        Err(Error::AirSearchExhausted { k, l })
    }
}

/// Encodes `L` equal-length parts into `K` coded blocks: `C_k = ⊕_ℓ A[k][ℓ] parts[ℓ]`.
pub fn air_encode(a: &Gf2Matrix, parts: &[BitBlock]) -> Result<Vec<BitBlock>> {
    if parts.len() != a.cols() {
        return Err(Error::Sizing(format!(
            "{} parts for a matrix with {} columns",
            parts.len(),
            a.cols()
        )));
    }
    let len = parts.first().map(BitBlock::len).unwrap_or(0);
    Ok(a
        .rows
        .iter()
        .map(|row| {
            let mut acc = BitBlock::zeros(len);
            for (l, p) in parts.iter().enumerate() {
                if row.get(l) {
                    acc ^= p;
                }
            }
            acc
        })
        .collect())
}

/// Recovers the `L` parts from the coded blocks of the window of rows
/// starting at `window_start` (1-based, cyclic). `rhs[i]` is the block coded
/// with row `window_start + i`.
pub fn gf2_solve_window(m: &Gf2Matrix, window_start: usize, rhs: &[BitBlock]) -> Result<Vec<BitBlock>> {
    let l = m.cols();
    if rhs.len() != l {
        return Err(Error::Sizing(format!("need {l} coded blocks, got {}", rhs.len())));
    }
    if window_start == 0 || window_start > m.rows() {
        return Err(Error::IndexOutOfRange {
            index: window_start,
            max: m.rows(),
        });
    }
    let block_len = rhs.first().map(BitBlock::len).unwrap_or(0);
    let mut sys: Vec<(BitBlock, BitBlock)> = m
        .window(window_start, l)
        .into_iter()
        .cloned()
        .zip(rhs.iter().cloned())
        .collect();
    for col in 0..l {
        let pivot = (col..l)
            .find(|&r| sys[r].0.get(col))
            .ok_or_else(|| Error::Singular(format!("window at row {window_start} is dependent")))?;
        sys.swap(col, pivot);
        let (coef, val) = sys[col].clone();
        for (r, row) in sys.iter_mut().enumerate() {
            if r != col && row.0.get(col) {
                row.0 ^= &coef;
                row.1.try_xor_assign(&val)?;
            }
        }
    }
    debug_assert!(sys.iter().all(|(_, v)| v.len() == block_len));
    Ok(sys.into_iter().map(|(_, v)| v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[u8]]) -> Gf2Matrix {
        Gf2Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn bits(s: &str) -> BitBlock {
        BitBlock::from_bit_str(s).unwrap()
    }

    /// Rank as log2 of the size of the row span, by enumerating all subsets.
    fn span_rank_oracle(m: &Gf2Matrix) -> usize {
        let r = m.rows();
        let mut span = std::collections::HashSet::new();
        for mask in 0u32..(1 << r) {
            let mut acc = BitBlock::zeros(m.cols());
            for i in 0..r {
                if mask >> i & 1 == 1 {
                    acc ^= m.row(i + 1);
                }
            }
            span.insert(acc);
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_examples() {
        assert_eq!(gf2_rank(&Gf2Matrix::identity(3)), 3);
        assert_eq!(gf2_rank(&m(&[&[1, 0], &[1, 0]])), 1);
        assert_eq!(gf2_rank(&m(&[&[1, 0], &[0, 1], &[1, 1]])), 2);
    }

    #[test]
    fn check_air_examples() {
        assert!(check_air(&Gf2Matrix::identity(4)));
        assert!(!check_air(&m(&[&[1, 0], &[1, 0], &[0, 1]])));
        assert!(check_air(&m(&[&[1, 0], &[0, 1], &[1, 1]])));
        assert!(!check_air(&m(&[&[1, 0, 0], &[0, 1, 0]])));
    }

    #[test]
    fn build_air_examples() {
        assert_eq!(
            build_air(4, 2).unwrap(),
            m(&[&[1, 0], &[0, 1], &[1, 0], &[0, 1]])
        );
        assert_eq!(build_air(5, 5).unwrap(), Gf2Matrix::identity(5));
        assert!(check_air(&build_air(3, 2).unwrap()));
        assert!(build_air(3, 4).is_err());
    }

    #[test]
    fn stacked_identity_is_air_when_l_divides_k() {
        for l in 1..=6 {
            for q in 1..=4 {
                let a = build_air(q * l, l).unwrap();
                assert!(check_air(&a), "K={}, L={l}", q * l);
            }
        }
    }

    #[test]
    fn build_air_covers_supported_range() {
        for k in 1..=16 {
            for l in 1..=k {
                let a = build_air(k, l).unwrap_or_else(|e| panic!("K={k} L={l}: {e}"));
                assert_eq!((a.rows(), a.cols()), (k, l));
                assert!(check_air(&a), "K={k}, L={l}");
            }
        }
    }

    #[test]
    fn rank_matches_span_enumeration_up_to_4x4() {
        for rows in 1..=4 {
            for cols in 1..=4 {
                for mask in 0u32..(1 << (rows * cols)) {
                    let data: Vec<Vec<u8>> = (0..rows)
                        .map(|r| (0..cols).map(|c| (mask >> (r * cols + c) & 1) as u8).collect())
                        .collect();
                    let mat = Gf2Matrix::from_rows(&data).unwrap();
                    assert_eq!(gf2_rank(&mat), span_rank_oracle(&mat));
                }
            }
        }
    }

    #[test]
    fn solve_window_examples() {
        let id = Gf2Matrix::identity(3);
        let rhs = vec![bits("01"), bits("10"), bits("11")];
        assert_eq!(gf2_solve_window(&id, 1, &rhs).unwrap(), rhs);

        let a = m(&[&[1, 0], &[1, 1]]);
        let (s1, s2) = (bits("1100"), bits("1010"));
        let rhs = vec![s1.clone(), &s1 ^ &s2];
        assert_eq!(gf2_solve_window(&a, 1, &rhs).unwrap(), vec![s1, s2]);

        let dep = m(&[&[1, 0], &[1, 0]]);
        assert!(matches!(
            gf2_solve_window(&dep, 1, &[bits("1"), bits("1")]),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn unit_and_combine() {
        let e2 = Gf2Vector::unit(3, 2);
        assert!(!e2.coord(1) && e2.coord(2) && !e2.coord(3));
        let blocks = [bits("100"), bits("010"), bits("001")];
        let v = Gf2Vector::from_bits(bits("101"));
        assert_eq!(v.combine(&blocks, 3), bits("101"));
        assert!(v.dot(&Gf2Vector::from_bits(bits("100"))));
        assert!(!v.dot(&Gf2Vector::from_bits(bits("101"))));
    }

    proptest! {
        #[test]
        fn encode_then_solve_every_window(k in 1usize..10, l in 1usize..10, len in 1usize..20, seed in any::<u64>()) {
            prop_assume!(l <= k);
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = build_air(k, l).unwrap();
            let parts: Vec<_> = (0..l).map(|_| BitBlock::random(len, &mut rng)).collect();
            let coded = air_encode(&a, &parts).unwrap();
            for s in 1..=k {
                let rhs: Vec<_> = (0..l).map(|o| coded[(s - 1 + o) % k].clone()).collect();
                prop_assert_eq!(&gf2_solve_window(&a, s, &rhs).unwrap(), &parts);
            }
        }
    }
}
