//! Explicit quiver representations over `Q` and `F_p`.
//!
//! Hom spaces are solution spaces of the intertwining equations, Ext is
//! recovered from the Euler form, and submodule grassmannians are counted
//! over prime fields. Euler characteristics come from interpolating those
//! counts in `q` and evaluating at `q = 1`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{check_len, Error, Result};
use crate::linalg::{is_prime, rank_mod, rank_rational, rref_mod, Mat};
use crate::quiver::{DimVector, Quiver};

/// Ground field of a representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    /// Integer matrices read over `Q`.
    Rational,
    Prime(u64),
}

impl Field {
    /// `0` for `Q`, `p` for `F_p`.
    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }
}

/// A representation: one matrix of shape `d_t x d_s` per arrow `s -> t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    quiver: Quiver,
    field: Field,
    dim: DimVector,
    maps: Vec<Mat>,
}

impl Representation {
    pub fn new(quiver: &Quiver, field: Field, dim: DimVector, maps: Vec<Mat>) -> Result<Self> {
        check_len(quiver.vertex_count(), dim.len())?;
        if !dim.is_nonnegative() {
            return Err(Error::InvalidInput(format!("negative dimension vector {dim}")));
        }
        if maps.len() != quiver.arrows().len() {
            return Err(Error::InvalidInput(format!(
                "{} arrow matrices for {} arrows",
                maps.len(),
                quiver.arrows().len()
            )));
        }
        for (k, (&(s, t), m)) in quiver.arrows().iter().zip(&maps).enumerate() {
            if m.rows() != dim[t] as usize || m.cols() != dim[s] as usize {
                return Err(Error::InvalidInput(format!(
                    "arrow {} matrix is {}x{}, expected {}x{}",
                    k + 1,
                    m.rows(),
                    m.cols(),
                    dim[t],
                    dim[s]
                )));
            }
        }
        let mut maps = maps;
        if let Field::Prime(p) = field {
            if !is_prime(p) {
                return Err(Error::InvalidInput(format!("{p} is not prime")));
            }
            maps.iter_mut().for_each(|m| m.reduce_mod(p));
        }
        Ok(Self {
            quiver: quiver.clone(),
            field,
            dim,
            maps,
        })
    }

    pub fn zero(quiver: &Quiver, field: Field) -> Self {
        let dim = DimVector::zero(quiver.vertex_count());
        let maps = quiver.arrows().iter().map(|_| Mat::zeros(0, 0)).collect();
        Self::new(quiver, field, dim, maps).expect("zero representation is valid")
    }

    /// The simple module `S_i`.
    pub fn simple(quiver: &Quiver, i: usize, field: Field) -> Self {
        let dim = DimVector::simple(quiver.vertex_count(), i);
        let maps = quiver
            .arrows()
            .iter()
            .map(|&(s, t)| Mat::zeros(dim[t] as usize, dim[s] as usize))
            .collect();
        Self::new(quiver, field, dim, maps).expect("simple representation is valid")
    }

    /// The indecomposable projective `P_i`: at vertex `j` its basis is the
    /// set of paths `i -> j`, and each arrow acts by post-composition.
    pub fn projective(quiver: &Quiver, i: usize, field: Field) -> Self {
        let n = quiver.vertex_count();
        // paths[j] = list of paths (as arrow sequences) from i to j
        let mut paths: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
        paths[i].push(Vec::new());
        for &v in quiver.topological_order() {
            for (a, &(s, t)) in quiver.arrows().iter().enumerate() {
                if s == v {
                    let ext: Vec<Vec<usize>> = paths[v]
                        .iter()
                        .map(|p| {
                            let mut p = p.clone();
                            p.push(a);
                            p
                        })
                        .collect();
                    paths[t].extend(ext);
                }
            }
        }
        let dim = DimVector::new(paths.iter().map(|p| p.len() as i64).collect());
        let maps = quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(a, &(s, t))| {
                let mut m = Mat::zeros(paths[t].len(), paths[s].len());
                for (c, p) in paths[s].iter().enumerate() {
                    let mut q = p.clone();
                    q.push(a);
                    let r = paths[t].iter().position(|x| *x == q).expect("extended path exists");
                    m.set(r, c, 1);
                }
                m
            })
            .collect();
        Self::new(quiver, field, dim, maps).expect("projective representation is valid")
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> &DimVector {
        &self.dim
    }

    pub fn maps(&self) -> &[Mat] {
        &self.maps
    }

    pub fn is_zero(&self) -> bool {
        self.dim.is_zero()
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let dim = &self.dim + &other.dim;
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(a, b)| a.direct_sum(b))
            .collect();
        Self::new(&self.quiver, self.field, dim, maps)
    }

    /// Reduction of an integer representation modulo `p`.
    pub fn reduce_mod(&self, p: u64) -> Result<Self> {
        if self.field != Field::Rational {
            return Err(Error::InvalidInput("only integer representations can be reduced".into()));
        }
        Self::new(&self.quiver, Field::Prime(p), self.dim.clone(), self.maps.clone())
    }

    /// Base change `M_a -> g_t M_a g_s^{-1}` by per-vertex invertible matrices
    /// (`g_inv[v]` must be the inverse of `g[v]` over the ground field).
    pub fn conjugate(&self, g: &[Mat], g_inv: &[Mat]) -> Result<Self> {
        let maps = self
            .quiver
            .arrows()
            .iter()
            .zip(&self.maps)
            .map(|(&(s, t), m)| {
                let out = g[t].mul(m).mul(&g_inv[s]);
                match self.field {
                    Field::Prime(p) => out.reduced_mod(p),
                    Field::Rational => out,
                }
            })
            .collect();
        Self::new(&self.quiver, self.field, self.dim.clone(), maps)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.quiver != other.quiver {
            return Err(Error::InvalidInput("representations of different quivers".into()));
        }
        if self.field != other.field {
            return Err(Error::InvalidInput("representations over different fields".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field.characteristic(),
            "dim": self.dim.to_json(),
            "maps": self.maps.iter().map(Mat::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(quiver: &Quiver, v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInput(format!("representation JSON: {m}"));
        let field = match v.get("field").and_then(Value::as_u64).unwrap_or(0) {
            0 => Field::Rational,
            p => Field::Prime(p),
        };
        let dim: Vec<i64> = v
            .get("dim")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"dim\""))?
            .iter()
            .map(|x| x.as_i64().ok_or_else(|| bad("non-integer dimension")))
            .collect::<Result<_>>()?;
        check_len(quiver.vertex_count(), dim.len())?;
        if dim.iter().any(|&x| x < 0) {
            return Err(bad("negative dimension"));
        }
        let maps_json = v
            .get("maps")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"maps\""))?;
        if maps_json.len() != quiver.arrows().len() {
            return Err(bad("one matrix per arrow is required"));
        }
        let maps = quiver
            .arrows()
            .iter()
            .zip(maps_json)
            .map(|(&(s, t), m)| Mat::from_json(m, dim[t] as usize, dim[s] as usize))
            .collect::<Result<Vec<_>>>()?;
        Self::new(quiver, field, DimVector::new(dim), maps)
    }
}

/// Coefficient matrix of the intertwining equations `N_a f_s = f_t M_a`.
fn hom_system(m: &Representation, n: &Representation) -> (usize, usize, Vec<i64>) {
    let q = &m.quiver;
    let nv = q.vertex_count();
    let md: Vec<usize> = m.dim.iter().map(|&x| x as usize).collect();
    let nd: Vec<usize> = n.dim.iter().map(|&x| x as usize).collect();
    let mut off = vec![0usize; nv + 1];
    for i in 0..nv {
        off[i + 1] = off[i] + nd[i] * md[i];
    }
    let cols = off[nv];
    let rows: usize = q.arrows().iter().map(|&(s, t)| nd[t] * md[s]).sum();
    let mut buf = vec![0i64; rows * cols];
    let mut row = 0;
    for (a, &(s, t)) in q.arrows().iter().enumerate() {
        let ma = &m.maps[a];
        let na = &n.maps[a];
        for r in 0..nd[t] {
            for c in 0..md[s] {
                let base = row * cols;
                // + sum_k N_a[r][k] f_s[k][c]
                for k in 0..nd[s] {
                    buf[base + off[s] + k * md[s] + c] += na.get(r, k);
                }
                // - sum_k f_t[r][k] M_a[k][c]
                for k in 0..md[t] {
                    buf[base + off[t] + r * md[t] + k] -= ma.get(k, c);
                }
                row += 1;
            }
        }
    }
    (rows, cols, buf)
}

/// `dim Hom(M, N)`.
pub fn hom_dim(m: &Representation, n: &Representation) -> Result<usize> {
    m.check_compatible(n)?;
    let (rows, cols, buf) = hom_system(m, n);
    let rank = match m.field {
        Field::Prime(p) => {
            let pi = p as i64;
            let mut b: Vec<u64> = buf.iter().map(|x| x.rem_euclid(pi) as u64).collect();
            rank_mod(&mut b, rows, cols, p)
        }
        Field::Rational => {
            let b: Vec<BigInt> = buf.iter().map(|&x| BigInt::from(x)).collect();
            rank_rational(rows, cols, &b)
        }
    };
    Ok(cols - rank)
}

/// `dim Ext^1(M, N) = dim Hom(M, N) - <dim M, dim N>`.
pub fn ext_dim(m: &Representation, n: &Representation) -> Result<usize> {
    let hom = hom_dim(m, n)? as i64;
    let euler = m.quiver.euler_form(&m.dim, &n.dim)?;
    let ext = hom - euler;
    if ext < 0 {
        return Err(Error::Consistency(format!(
            "negative Ext dimension {ext} between {} and {}",
            m.dim, n.dim
        )));
    }
    Ok(ext as usize)
}

/// Uniformly random representation over `F_p`, determined by `rng`.
pub fn random_representation<R: Rng>(q: &Quiver, d: &DimVector, p: u64, rng: &mut R) -> Result<Representation> {
    check_len(q.vertex_count(), d.len())?;
    let maps = q
        .arrows()
        .iter()
        .map(|&(s, t)| {
            let (r, c) = (d[t].max(0) as usize, d[s].max(0) as usize);
            let data = (0..r * c).map(|_| rng.gen_range(0..p) as i64).collect();
            Mat::from_rows(r, c, data).expect("shape matches")
        })
        .collect();
    Representation::new(q, Field::Prime(p), d.clone(), maps)
}

/// Deterministic uniform sample over `F_p` keyed by `rng_seed`.
pub fn sample_representation(q: &Quiver, d: &DimVector, p: u64, rng_seed: u64) -> Result<Representation> {
    let mut rng = crate::config::SeedTree::new(rng_seed).rng();
    random_representation(q, d, p, &mut rng)
}

/// Integer representation with entries uniform in `[-bound, bound]`.
pub fn random_integer_representation<R: Rng>(
    q: &Quiver,
    d: &DimVector,
    bound: i64,
    rng: &mut R,
) -> Result<Representation> {
    check_len(q.vertex_count(), d.len())?;
    let maps = q
        .arrows()
        .iter()
        .map(|&(s, t)| {
            let (r, c) = (d[t].max(0) as usize, d[s].max(0) as usize);
            let data = (0..r * c).map(|_| rng.gen_range(-bound..=bound)).collect();
            Mat::from_rows(r, c, data).expect("shape matches")
        })
        .collect();
    Representation::new(q, Field::Rational, d.clone(), maps)
}

/// Random unimodular integer matrix and its inverse, as a product of
/// elementary row operations.
pub fn random_unimodular<R: Rng>(n: usize, steps: usize, rng: &mut R) -> (Mat, Mat) {
    let mut g = Mat::identity(n);
    let mut g_inv = Mat::identity(n);
    if n < 2 {
        return (g, g_inv);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        // g <- E g with E = I + c e_ij ; g_inv <- g_inv E^{-1}
        for k in 0..n {
            let v = g.get(i, k) + c * g.get(j, k);
            g.set(i, k, v);
        }
        for k in 0..n {
            let v = g_inv.get(k, j) - c * g_inv.get(k, i);
            g_inv.set(k, j, v);
        }
    }
    (g, g_inv)
}

/// Random invertible matrix over `F_p` with its inverse.
pub fn random_invertible_mod<R: Rng>(n: usize, p: u64, rng: &mut R) -> (Mat, Mat) {
    loop {
        let data: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..p) as i64).collect();
        let g = Mat::from_rows(n, n, data).expect("square");
        // [g | I] -> [I | g^{-1}]
        let w = 2 * n;
        let mut buf = vec![0u64; n * w];
        for r in 0..n {
            for c in 0..n {
                buf[r * w + c] = g.get(r, c) as u64;
            }
            buf[r * w + n + r] = 1;
        }
        let piv = rref_mod(&mut buf, n, w, p);
        if piv.len() == n && piv.iter().enumerate().all(|(i, &c)| i == c) {
            let mut inv = Mat::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    inv.set(r, c, buf[r * w + n + c] as i64);
                }
            }
            return (g, inv);
        }
    }
}

// ---------------------------------------------------------------------------
// Point counting
// ---------------------------------------------------------------------------

/// Gaussian binomial `[n choose k]_q` (number of `k`-dimensional subspaces of
/// `F_q^n`); `None` on overflow.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    // row-by-row Pascal recurrence [n, k] = [n-1, k-1] + q^k [n-1, k]
    let mut row = vec![1u128];
    for m in 1..=n {
        let mut next = vec![1u128; m + 1];
        for j in 1..m {
            let qj = (q as u128).checked_pow(j as u32)?;
            next[j] = row[j - 1].checked_add(qj.checked_mul(row[j])?)?;
        }
        row = next;
    }
    Some(row[k])
}

/// Enumerates `j`-dimensional subspaces of `F_p^m` as reduced row echelon
/// bases, without materializing the whole list.
struct SubspaceIter {
    m: usize,
    j: usize,
    p: u64,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    vals: Vec<u64>,
    state: IterState,
    buf: Vec<u64>,
}

#[derive(PartialEq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

impl SubspaceIter {
    fn new(m: usize, j: usize, p: u64) -> Self {
        Self {
            m,
            j,
            p,
            pivots: (0..j).collect(),
            free: Vec::new(),
            vals: Vec::new(),
            state: if j > m { IterState::Done } else { IterState::Fresh },
            buf: vec![0; j * m],
        }
    }

    fn setup_free(&mut self) {
        self.free.clear();
        for (r, &pc) in self.pivots.iter().enumerate() {
            for c in pc + 1..self.m {
                if !self.pivots.contains(&c) {
                    self.free.push((r, c));
                }
            }
        }
        self.vals = vec![0; self.free.len()];
    }

    fn build(&mut self) {
        self.buf.iter_mut().for_each(|x| *x = 0);
        for (r, &pc) in self.pivots.iter().enumerate() {
            self.buf[r * self.m + pc] = 1;
        }
        for (&(r, c), &v) in self.free.iter().zip(&self.vals) {
            self.buf[r * self.m + c] = v;
        }
    }

    fn next_combination(&mut self) -> bool {
        let (m, j) = (self.m, self.j);
        let mut i = j;
        while i > 0 {
            i -= 1;
            if self.pivots[i] < m - j + i {
                self.pivots[i] += 1;
                for k in i + 1..j {
                    self.pivots[k] = self.pivots[k - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    /// Moves to the next subspace; its basis is then in `rows()`.
    fn advance(&mut self) -> bool {
        match self.state {
            IterState::Done => return false,
            IterState::Fresh => {
                self.state = IterState::Running;
                self.setup_free();
                self.build();
                return true;
            }
            IterState::Running => {}
        }
        for i in 0..self.vals.len() {
            self.vals[i] += 1;
            if self.vals[i] < self.p {
                self.build();
                return true;
            }
            self.vals[i] = 0;
        }
        if !self.next_combination() {
            self.state = IterState::Done;
            return false;
        }
        self.setup_free();
        self.build();
        true
    }

    fn rows(&self) -> &[u64] {
        &self.buf
    }
}

/// Number of subrepresentations of an `F_p`-representation, for every
/// dimension vector `0 <= e <= dim M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubrepCounts {
    dim: DimVector,
    p: u64,
    strides: Vec<usize>,
    counts: Vec<u128>,
}

impl SubrepCounts {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn get(&self, e: &DimVector) -> u128 {
        if e.len() != self.dim.len() || !e.is_nonnegative() || !e.le(&self.dim) {
            return 0;
        }
        let idx: usize = e.iter().zip(&self.strides).map(|(&x, &s)| x as usize * s).sum();
        self.counts[idx]
    }
}

struct Counter<'a> {
    p: u64,
    dims: Vec<usize>,
    arrows: &'a [(usize, usize)],
    maps: Vec<Vec<u64>>,
    in_arrows: Vec<Vec<usize>>,
    non_sinks: Vec<usize>,
    sinks: Vec<usize>,
    target: Option<Vec<usize>>,
    basis: Vec<Vec<u64>>,
    kdim: Vec<usize>,
    visited: u64,
    budget: u64,
    strides: Vec<usize>,
    table: Vec<u128>,
    /// gauss[n][k] = [n choose k]_p for n up to the largest dimension
    gauss: Vec<Vec<u128>>,
    scratch: Vec<u64>,
    sink_rank: Vec<usize>,
}

impl<'a> Counter<'a> {
    fn new(m: &'a Representation, target: Option<&DimVector>, budget: u64) -> Result<Self> {
        let Field::Prime(p) = m.field else {
            return Err(Error::InvalidInput("point counting needs a prime field".into()));
        };
        let q = &m.quiver;
        let n = q.vertex_count();
        let dims: Vec<usize> = m.dim.iter().map(|&x| x as usize).collect();
        let maps = m
            .maps
            .iter()
            .map(|mat| mat.data().iter().map(|&x| x as u64).collect())
            .collect();
        let mut in_arrows = vec![Vec::new(); n];
        let mut has_out = vec![false; n];
        for (a, &(s, t)) in q.arrows().iter().enumerate() {
            in_arrows[t].push(a);
            has_out[s] = true;
        }
        let non_sinks = q.topological_order().iter().copied().filter(|&v| has_out[v]).collect();
        let sinks: Vec<usize> = (0..n).filter(|&v| !has_out[v]).collect();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * (dims[i + 1] + 1);
        }
        let size = if n == 0 { 1 } else { strides[0] * (dims[0] + 1) };
        let target = match target {
            Some(e) => {
                check_len(n, e.len())?;
                if !e.is_nonnegative() || !e.le(&m.dim) {
                    return Err(Error::InvalidInput(format!("{e} is not between 0 and {}", m.dim)));
                }
                Some(e.iter().map(|&x| x as usize).collect())
            }
            None => None,
        };
        let dmax = dims.iter().copied().max().unwrap_or(0);
        let gauss = (0..=dmax)
            .map(|n| {
                (0..=n)
                    .map(|k| {
                        gaussian_binomial(n, k, p).ok_or_else(|| Error::BudgetExceeded {
                            what: format!("Gaussian binomial [{n} {k}]_{p} exceeds 128 bits"),
                            budget: u64::MAX,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let nsinks = sinks.len();
        Ok(Self {
            p,
            dims,
            arrows: q.arrows(),
            maps,
            in_arrows,
            non_sinks,
            sinks,
            target,
            basis: vec![Vec::new(); n],
            kdim: vec![0; n],
            visited: 0,
            budget,
            strides,
            table: vec![0; size],
            gauss,
            scratch: Vec::new(),
            sink_rank: vec![0; nsinks],
        })
    }

    fn tick(&mut self) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::BudgetExceeded {
                what: format!("subrepresentation enumeration over F_{}", self.p),
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// Writes the images `M_a u` of the chosen bases feeding `v` into
    /// `buf`; returns the number of rows.
    fn fill_images(&self, v: usize, buf: &mut Vec<u64>) -> usize {
        let dv = self.dims[v];
        let p = self.p;
        buf.clear();
        let mut nrows = 0;
        for &a in &self.in_arrows[v] {
            let s = self.arrows[a].0;
            let ds = self.dims[s];
            let map = &self.maps[a];
            for u in self.basis[s].chunks_exact(ds.max(1)).take(self.kdim[s]) {
                for r in 0..dv {
                    let row = &map[r * ds..(r + 1) * ds];
                    let acc: u64 = row.iter().zip(u).map(|(x, y)| x * y).sum();
                    buf.push(acc % p);
                }
                nrows += 1;
            }
        }
        nrows
    }

    /// RREF basis of `sum_{a: s -> v} M_a(U_s)`; returns (buffer, rank, pivots).
    fn image_span(&self, v: usize) -> (Vec<u64>, usize, Vec<usize>) {
        let dv = self.dims[v];
        let mut rows = Vec::new();
        let nrows = self.fill_images(v, &mut rows);
        if nrows == 0 || dv == 0 {
            return (Vec::new(), 0, Vec::new());
        }
        let piv = rref_mod(&mut rows, nrows, dv, self.p);
        let w = piv.len();
        rows.truncate(w * dv);
        (rows, w, piv)
    }

    fn run(&mut self) -> Result<()> {
        self.dfs(0)
    }

    fn dfs(&mut self, depth: usize) -> Result<()> {
        if depth == self.non_sinks.len() {
            return self.leaf();
        }
        let v = self.non_sinks[depth];
        let dv = self.dims[v];
        let (wbuf, w, piv) = self.image_span(v);
        let free_cols: Vec<usize> = (0..dv).filter(|c| !piv.contains(c)).collect();
        let m = dv - w;
        let (lo, hi) = match &self.target {
            Some(t) if t[v] >= w => (t[v], t[v]),
            Some(_) => return Ok(()),
            None => (w, dv),
        };
        let mut basis = std::mem::take(&mut self.basis[v]);
        for k in lo..=hi {
            let mut it = SubspaceIter::new(m, k - w, self.p);
            while it.advance() {
                self.tick()?;
                basis.clear();
                basis.extend_from_slice(&wbuf);
                for row in it.rows().chunks_exact(m.max(1)).take(k - w) {
                    let start = basis.len();
                    basis.resize(start + dv, 0);
                    for (x, &c) in row.iter().zip(&free_cols) {
                        basis[start + c] = *x;
                    }
                }
                std::mem::swap(&mut self.basis[v], &mut basis);
                self.kdim[v] = k;
                let r = self.dfs(depth + 1);
                std::mem::swap(&mut self.basis[v], &mut basis);
                r?;
            }
        }
        self.basis[v] = basis;
        Ok(())
    }

    fn leaf(&mut self) -> Result<()> {
        let base: usize = self
            .non_sinks
            .iter()
            .map(|&v| self.kdim[v] * self.strides[v])
            .sum();
        let mut scratch = std::mem::take(&mut self.scratch);
        for i in 0..self.sinks.len() {
            let s = self.sinks[i];
            let nrows = self.fill_images(s, &mut scratch);
            self.sink_rank[i] = if nrows == 0 || self.dims[s] == 0 {
                0
            } else {
                rank_mod(&mut scratch, nrows, self.dims[s], self.p)
            };
        }
        self.scratch = scratch;
        self.spread(0, base, 1);
        Ok(())
    }

    /// Adds the leaf's contribution for every choice of sink subspaces.
    fn spread(&mut self, i: usize, index: usize, mult: u128) {
        if i == self.sinks.len() {
            self.table[index] += mult;
            return;
        }
        let s = self.sinks[i];
        let (ds, w) = (self.dims[s], self.sink_rank[i]);
        let (lo, hi) = match &self.target {
            Some(t) => (t[s], t[s]),
            None => (0, ds),
        };
        for k in lo.max(w)..=hi {
            let c = self.gauss[ds - w][k - w];
            self.spread(i + 1, index + k * self.strides[s], mult * c);
        }
    }
}

/// Counts subrepresentations of every dimension vector `e <= dim M`.
pub fn count_all_subreps(m: &Representation, budget: u64) -> Result<SubrepCounts> {
    let mut counter = Counter::new(m, None, budget)?;
    counter.run()?;
    Ok(SubrepCounts {
        dim: m.dim.clone(),
        p: counter.p,
        strides: counter.strides,
        counts: counter.table,
    })
}

/// Number of `e`-dimensional subrepresentations of an `F_p`-representation.
pub fn count_subreps(m: &Representation, e: &DimVector, budget: u64) -> Result<u128> {
    let mut counter = Counter::new(m, Some(e), budget)?;
    counter.run()?;
    let idx: usize = e.iter().zip(&counter.strides).map(|(&x, &s)| x as usize * s).sum();
    Ok(counter.table[idx])
}

// ---------------------------------------------------------------------------
// Interpolation
// ---------------------------------------------------------------------------

/// Univariate polynomial in `q` counting points of a quiver grassmannian.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingPolynomial {
    coeffs: Vec<BigInt>,
}

impl CountingPolynomial {
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval(&self, q: u64) -> BigInt {
        let q = BigInt::from(q);
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * &q + c)
    }

    /// Euler characteristic: the value at `q = 1`.
    pub fn euler_characteristic(&self) -> BigInt {
        self.coeffs.iter().sum()
    }
}

/// `sum_i e_i (d_i - e_i)`: dimension of the ambient product of grassmannians.
pub fn degree_bound(d: &DimVector, e: &DimVector) -> usize {
    d.iter().zip(e.iter()).map(|(&d, &e)| (e * (d - e)).max(0) as usize).sum()
}

/// Interpolates through `points[..=deg]` and checks the remaining points.
pub fn interpolate_counts(points: &[(u64, u128)], deg: usize) -> Result<CountingPolynomial> {
    if points.len() < deg + 2 {
        return Err(Error::InsufficientPrimes {
            needed: deg + 2,
            available: points.len(),
        });
    }
    let fit = &points[..=deg];
    let mut coeffs = vec![BigRational::zero(); deg + 1];
    for (i, &(xi, yi)) in fit.iter().enumerate() {
        // Lagrange basis polynomial for node i
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, &(xj, _)) in fit.iter().enumerate() {
            if i == j {
                continue;
            }
            let xj = BigRational::from_integer(BigInt::from(xj));
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b;
                next[k] -= b * &xj;
            }
            basis = next;
            denom *= BigRational::from_integer(BigInt::from(xi)) - xj;
        }
        let scale = BigRational::from_integer(BigInt::from(yi)) / denom;
        for (k, b) in basis.iter().enumerate() {
            coeffs[k] += b * &scale;
        }
    }
    if let Some(c) = coeffs.iter().find(|c| !c.is_integer()) {
        return Err(Error::Interpolation(format!("non-integral coefficient {c}")));
    }
    let mut ints: Vec<BigInt> = coeffs.into_iter().map(|c| c.to_integer()).collect();
    while ints.last().is_some_and(|c| c.is_zero()) {
        ints.pop();
    }
    let poly = CountingPolynomial { coeffs: ints };
    for &(x, y) in &points[deg + 1..] {
        if poly.eval(x) != BigInt::from(y) {
            return Err(Error::Interpolation(format!(
                "count {y} over F_{x} disagrees with the interpolated polynomial"
            )));
        }
    }
    Ok(poly)
}

/// Counting polynomials and Euler characteristics of all quiver
/// grassmannians `Gr_e(M)` of an integer representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrassmannianTable {
    pub dim: DimVector,
    pub primes: Vec<u64>,
    pub polynomials: BTreeMap<DimVector, CountingPolynomial>,
}

impl GrassmannianTable {
    pub fn euler_characteristic(&self, e: &DimVector) -> BigInt {
        self.polynomials
            .get(e)
            .map(CountingPolynomial::euler_characteristic)
            .unwrap_or_default()
    }
}

/// Primes from `pool` whose reduction keeps `dim End(M)` equal to its value
/// over `Q`; stops once `needed` are found.
pub fn good_primes(m: &Representation, pool: &[u64], needed: usize) -> Result<Vec<u64>> {
    good_primes_filtered(m, pool, needed, |_| Ok(true))
}

/// As [`good_primes`], additionally discarding primes rejected by `filter`.
pub fn good_primes_filtered<F>(m: &Representation, pool: &[u64], needed: usize, filter: F) -> Result<Vec<u64>>
where
    F: Fn(u64) -> Result<bool>,
{
    if m.field != Field::Rational {
        return Err(Error::InvalidInput("expected an integer representation".into()));
    }
    let end_q = hom_dim(m, m)?;
    let mut out = Vec::with_capacity(needed);
    for &p in pool {
        if out.len() == needed {
            break;
        }
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} in the prime pool is not prime")));
        }
        let mp = m.reduce_mod(p)?;
        if hom_dim(&mp, &mp)? == end_q && filter(p)? {
            out.push(p);
        }
    }
    if out.len() < needed {
        return Err(Error::InsufficientPrimes {
            needed,
            available: out.len(),
        });
    }
    Ok(out)
}

/// Counting polynomial of every `Gr_e(M)` by point counts over enough good
/// primes plus one extra for the consistency check.
pub fn grassmannian_table(m: &Representation, pool: &[u64], budget: u64) -> Result<GrassmannianTable> {
    grassmannian_table_filtered(m, pool, budget, |_| Ok(true))
}

/// As [`grassmannian_table`], with an extra test a prime must pass.
pub fn grassmannian_table_filtered<F>(
    m: &Representation,
    pool: &[u64],
    budget: u64,
    filter: F,
) -> Result<GrassmannianTable>
where
    F: Fn(u64) -> Result<bool>,
{
    let zero = DimVector::zero(m.dim.len());
    let all_e = DimVector::boxed(&zero, &m.dim);
    let max_deg = all_e.iter().map(|e| degree_bound(&m.dim, e)).max().unwrap_or(0);
    let primes = good_primes_filtered(m, pool, max_deg + 2, filter)?;
    let counts: Vec<SubrepCounts> = primes
        .par_iter()
        .map(|&p| count_all_subreps(&m.reduce_mod(p)?, budget))
        .collect::<Result<_>>()?;
    let mut polynomials = BTreeMap::new();
    for e in all_e {
        let deg = degree_bound(&m.dim, &e);
        let points: Vec<(u64, u128)> = counts.iter().map(|c| (c.p, c.get(&e))).collect();
        let poly = interpolate_counts(&points, deg)?;
        polynomials.insert(e, poly);
    }
    Ok(GrassmannianTable {
        dim: m.dim.clone(),
        primes,
        polynomials,
    })
}

/// `chi(Gr_e(M))` for an integer representation `M`.
pub fn euler_char_grassmannian(m: &Representation, e: &DimVector, pool: &[u64], budget: u64) -> Result<BigInt> {
    check_len(m.dim.len(), e.len())?;
    if !e.is_nonnegative() || !e.le(&m.dim) {
        return Ok(BigInt::zero());
    }
    let deg = degree_bound(&m.dim, e);
    let primes = good_primes(m, pool, deg + 2)?;
    let points: Vec<(u64, u128)> = primes
        .par_iter()
        .map(|&p| Ok((p, count_subreps(&m.reduce_mod(p)?, e, budget)?)))
        .collect::<Result<_>>()?;
    Ok(interpolate_counts(&points, deg)?.euler_characteristic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SeedTree;

    fn dv(v: &[i64]) -> DimVector {
        DimVector::from(v)
    }

    fn kron_pair(a: i64, b: i64, field: Field) -> Representation {
        let k = Quiver::kronecker();
        Representation::new(
            &k,
            field,
            dv(&[1, 1]),
            vec![Mat::from_rows(1, 1, vec![a]).unwrap(), Mat::from_rows(1, 1, vec![b]).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn shapes_are_validated() {
        let k = Quiver::kronecker();
        let bad = Representation::new(&k, Field::Rational, dv(&[1, 1]), vec![Mat::zeros(1, 2), Mat::zeros(1, 1)]);
        assert!(bad.is_err());
        let neg = Representation::new(&k, Field::Rational, dv(&[-1, 1]), vec![Mat::zeros(1, 0), Mat::zeros(1, 0)]);
        assert!(neg.is_err());
    }

    #[test]
    fn projectives_have_path_dimensions() {
        let k = Quiver::kronecker();
        assert_eq!(Representation::projective(&k, 0, Field::Rational).dim(), &dv(&[1, 2]));
        assert_eq!(Representation::projective(&k, 1, Field::Rational).dim(), &dv(&[0, 1]));
        let a3 = Quiver::linear_a(3);
        assert_eq!(Representation::projective(&a3, 0, Field::Rational).dim(), &dv(&[1, 1, 1]));
    }

    #[test]
    fn hom_examples() {
        let f5 = Field::Prime(5);
        let m = kron_pair(1, 0, f5);
        let n = kron_pair(0, 1, f5);
        assert_eq!(hom_dim(&m, &m).unwrap(), 1);
        assert_eq!(hom_dim(&m, &n).unwrap(), 0);
        assert_eq!(ext_dim(&m, &m).unwrap(), 1);

        let a2 = Quiver::linear_a(2);
        let s1 = Representation::simple(&a2, 0, Field::Rational);
        let p1 = Representation::projective(&a2, 0, Field::Rational);
        assert_eq!(hom_dim(&s1, &p1).unwrap(), 0);
        assert_eq!(ext_dim(&s1, &p1).unwrap(), 0);
        assert_eq!(hom_dim(&p1, &s1).unwrap(), 1);
    }

    #[test]
    fn rigid_two_one_module() {
        // Kronecker (2,1): arrows (1 0) and (0 1) from k^2 to k
        let k = Quiver::kronecker();
        let m = Representation::new(
            &k,
            Field::Rational,
            dv(&[2, 1]),
            vec![Mat::from_rows(1, 2, vec![1, 0]).unwrap(), Mat::from_rows(1, 2, vec![0, 1]).unwrap()],
        )
        .unwrap();
        assert_eq!(hom_dim(&m, &m).unwrap(), 1);
        assert_eq!(ext_dim(&m, &m).unwrap(), 0);
    }

    #[test]
    fn projectives_have_no_extensions() {
        let mut rng = SeedTree::new(3).rng();
        for q in [Quiver::kronecker(), Quiver::affine_a2(), Quiver::linear_a(3)] {
            for i in 0..q.vertex_count() {
                let p = Representation::projective(&q, i, Field::Prime(7));
                for _ in 0..5 {
                    let d = DimVector::new((0..q.vertex_count()).map(|_| rng.gen_range(0..3)).collect());
                    let n = random_representation(&q, &d, 7, &mut rng).unwrap();
                    assert_eq!(ext_dim(&p, &n).unwrap(), 0);
                    let hom = hom_dim(&p, &n).unwrap() as i64;
                    assert_eq!(hom - ext_dim(&p, &n).unwrap() as i64, q.euler_form(p.dim(), &d).unwrap());
                }
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let k = Quiver::kronecker();
        let a = sample_representation(&k, &dv(&[2, 3]), 11, 99).unwrap();
        let b = sample_representation(&k, &dv(&[2, 3]), 11, 99).unwrap();
        assert_eq!(a, b);
        let z = sample_representation(&k, &dv(&[0, 0]), 11, 1).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn generic_delta_samples_are_quasi_simple() {
        // non-Schur locus: (0, 0) pairs only, i.e. probability 1/p^2
        let k = Quiver::kronecker();
        let p = 7;
        let schur = (0..200)
            .filter(|&s| {
                let m = sample_representation(&k, &dv(&[1, 1]), p, s).unwrap();
                hom_dim(&m, &m).unwrap() == 1
            })
            .count();
        assert!(schur as f64 >= 200.0 * (1.0 - 2.0 / p as f64));
    }

    #[test]
    fn subspace_counts_match_gaussian_binomials() {
        for (m, j, p) in [(4, 2, 3), (3, 1, 5), (5, 0, 2), (2, 2, 7), (4, 3, 2)] {
            let mut it = SubspaceIter::new(m, j, p);
            let mut n = 0u128;
            while it.advance() {
                n += 1;
            }
            assert_eq!(Some(n), gaussian_binomial(m, j, p), "[{m} {j}]_{p}");
        }
        assert_eq!(gaussian_binomial(4, 2, 2), Some(35));
    }

    #[test]
    fn count_examples() {
        let m = kron_pair(1, 2, Field::Prime(5));
        let budget = 1_000_000;
        assert_eq!(count_subreps(&m, &dv(&[0, 0]), budget).unwrap(), 1);
        assert_eq!(count_subreps(&m, &dv(&[1, 1]), budget).unwrap(), 1);
        assert_eq!(count_subreps(&m, &dv(&[0, 1]), budget).unwrap(), 1);
        assert_eq!(count_subreps(&m, &dv(&[1, 0]), budget).unwrap(), 0);
        let k = Quiver::kronecker();
        let s = Representation::simple(&k, 0, Field::Prime(5));
        assert_eq!(count_subreps(&s, &dv(&[1, 0]), budget).unwrap(), 1);
        let all = count_all_subreps(&m, budget).unwrap();
        assert_eq!(all.get(&dv(&[1, 0])), 0);
        assert_eq!(all.get(&dv(&[0, 1])), 1);
    }

    #[test]
    fn zero_map_counts_all_subspace_pairs() {
        // zero arrows: every pair of subspaces is a subrepresentation
        let k = Quiver::kronecker();
        let m = Representation::new(&k, Field::Prime(3), dv(&[2, 2]), vec![Mat::zeros(2, 2), Mat::zeros(2, 2)]).unwrap();
        let all = count_all_subreps(&m, 1_000_000).unwrap();
        assert_eq!(all.get(&dv(&[1, 1])), 16);
        assert_eq!(all.get(&dv(&[1, 2])), 4);
    }

    #[test]
    fn budget_is_enforced() {
        let k = Quiver::kronecker();
        let m = sample_representation(&k, &dv(&[4, 4]), 31, 5).unwrap();
        assert!(matches!(count_all_subreps(&m, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn counts_are_gl_invariant() {
        let mut rng = SeedTree::new(17).rng();
        for q in [Quiver::kronecker(), Quiver::affine_a2()] {
            for _ in 0..4 {
                let d = DimVector::new((0..q.vertex_count()).map(|_| rng.gen_range(0..3)).collect());
                let m = random_representation(&q, &d, 5, &mut rng).unwrap();
                let (g, gi): (Vec<Mat>, Vec<Mat>) = d
                    .iter()
                    .map(|&n| random_invertible_mod(n as usize, 5, &mut rng))
                    .unzip();
                let mc = m.conjugate(&g, &gi).unwrap();
                assert_eq!(count_all_subreps(&m, 1_000_000).unwrap().counts, count_all_subreps(&mc, 1_000_000).unwrap().counts);
            }
        }
    }

    #[test]
    fn unimodular_inverse() {
        let mut rng = SeedTree::new(1).rng();
        let (g, gi) = random_unimodular(4, 12, &mut rng);
        assert_eq!(g.mul(&gi), Mat::identity(4));
    }

    #[test]
    fn euler_characteristics() {
        let m = kron_pair(1, 3, Field::Rational);
        let pool = crate::config::default_prime_pool();
        let t = grassmannian_table(&m, &pool, 1_000_000).unwrap();
        assert_eq!(t.euler_characteristic(&dv(&[0, 1])), BigInt::from(1));
        assert_eq!(t.euler_characteristic(&dv(&[1, 0])), BigInt::from(0));
        assert_eq!(euler_char_grassmannian(&m, &dv(&[0, 0]), &pool, 1000).unwrap(), BigInt::from(1));
        // projective line of subspaces of the middle of a (0,2) simple sum
        let a2 = Quiver::linear_a(2);
        let s = Representation::simple(&a2, 1, Field::Rational);
        let ss = s.direct_sum(&s).unwrap();
        let t = grassmannian_table(&ss, &pool, 1_000_000).unwrap();
        assert_eq!(t.polynomials[&dv(&[0, 1])].coeffs(), &[BigInt::from(1), BigInt::from(1)]);
        assert_eq!(t.euler_characteristic(&dv(&[0, 1])), BigInt::from(2));
    }

    #[test]
    fn interpolation_is_independent_of_primes() {
        let a2 = Quiver::linear_a(2);
        let s = Representation::simple(&a2, 1, Field::Rational);
        let m = s.direct_sum(&s).unwrap().direct_sum(&s).unwrap();
        let e = dv(&[0, 1]);
        let a = euler_char_grassmannian(&m, &e, &[5, 7, 11, 13, 17], 1000).unwrap();
        let b = euler_char_grassmannian(&m, &e, &[19, 23, 29, 31, 37], 1000).unwrap();
        assert_eq!(a, BigInt::from(3));
        assert_eq!(a, b);
    }

    #[test]
    fn too_few_primes() {
        let a2 = Quiver::linear_a(2);
        let s = Representation::simple(&a2, 1, Field::Rational);
        let m = s.direct_sum(&s).unwrap();
        assert!(matches!(
            euler_char_grassmannian(&m, &dv(&[0, 1]), &[5, 7], 1000),
            Err(Error::InsufficientPrimes { needed: 3, available: 2 })
        ));
    }

    #[test]
    fn non_polynomial_counts_are_rejected() {
        // counts that no degree-1 polynomial fits on three points
        assert!(matches!(
            interpolate_counts(&[(5, 1), (7, 2), (11, 7)], 1),
            Err(Error::Interpolation(_))
        ));
        assert!(interpolate_counts(&[(5, 6), (7, 8), (11, 12)], 1).is_ok());
    }
}
