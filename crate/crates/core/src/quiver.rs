//! Acyclic quivers, their Euler form, positive roots and affine data.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{check_len, Error, Result};

/// Integer vector indexed by the vertices of a quiver.
///
/// Dimension vectors, roots and denominator vectors all use this type;
/// entries may be negative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DimVector(Vec<i64>);

impl DimVector {
    pub fn new(entries: Vec<i64>) -> Self {
        Self(entries)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// The simple root `alpha_i` (0-based).
    pub fn simple(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn is_sincere(&self) -> bool {
        self.0.iter().all(|&x| x > 0)
    }

    /// `[d]_+`
    pub fn positive_part(&self) -> Self {
        Self(self.0.iter().map(|&x| x.max(0)).collect())
    }

    /// `[d]_-`, entrywise `min(d_i, 0)`.
    pub fn negative_part(&self) -> Self {
        Self(self.0.iter().map(|&x| x.min(0)).collect())
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn scale(&self, k: i64) -> Self {
        Self(self.0.iter().map(|x| x * k).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &i64> {
        self.0.iter()
    }

    /// All vectors `v` with `lo <= v <= hi` componentwise, in lexicographic order.
    pub fn boxed(lo: &Self, hi: &Self) -> Vec<Self> {
        let n = lo.len();
        if lo.0.iter().zip(&hi.0).any(|(a, b)| a > b) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut cur = lo.0.clone();
        loop {
            out.push(Self(cur.clone()));
            let mut i = n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < hi.0[i] {
                    cur[i] += 1;
                    cur[i + 1..n].copy_from_slice(&lo.0[i + 1..n]);
                    break;
                }
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!(self.0)
    }
}

impl Index<usize> for DimVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl Add for &DimVector {
    type Output = DimVector;
    fn add(self, rhs: &DimVector) -> DimVector {
        assert_eq!(self.len(), rhs.len(), "dimension vectors of different length");
        DimVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &DimVector {
    type Output = DimVector;
    fn sub(self, rhs: &DimVector) -> DimVector {
        assert_eq!(self.len(), rhs.len(), "dimension vectors of different length");
        DimVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &DimVector {
    type Output = DimVector;
    fn neg(self) -> DimVector {
        DimVector(self.0.iter().map(|x| -x).collect())
    }
}

impl From<Vec<i64>> for DimVector {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl From<&[i64]> for DimVector {
    fn from(v: &[i64]) -> Self {
        Self(v.to_vec())
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Finite acyclic quiver with connected underlying graph.
///
/// Vertices are `0..vertex_count` internally; the JSON encoding is 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertex_count: usize,
    arrows: Vec<(usize, usize)>,
    topo_order: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    Real,
    Imaginary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuiverType {
    Dynkin,
    Affine,
    Wild,
}

/// Minimal positive imaginary root and a chosen extending vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineData {
    pub delta: DimVector,
    pub extending_vertex: usize,
}

impl AffineData {
    /// Defect `<delta, e>`: negative on preprojectives, zero on regulars,
    /// positive on preinjectives.
    pub fn defect(&self, q: &Quiver, e: &DimVector) -> Result<i64> {
        q.euler_form(&self.delta, e)
    }
}

impl Quiver {
    /// Validates and builds a quiver from 0-based arrows.
    pub fn new(vertex_count: usize, arrows: Vec<(usize, usize)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidQuiver("no vertices".into()));
        }
        for &(s, t) in &arrows {
            if s >= vertex_count || t >= vertex_count {
                return Err(Error::InvalidQuiver(format!(
                    "arrow ({}, {}) out of range",
                    s + 1,
                    t + 1
                )));
            }
            if s == t {
                return Err(Error::InvalidQuiver(format!("loop at vertex {}", s + 1)));
            }
        }
        let topo_order = topological_order(vertex_count, &arrows)
            .ok_or_else(|| Error::InvalidQuiver("oriented cycle".into()))?;
        if !is_connected(vertex_count, &arrows) {
            return Err(Error::InvalidQuiver("underlying graph is disconnected".into()));
        }
        Ok(Self {
            vertex_count,
            arrows,
            topo_order,
        })
    }

    /// Builds a quiver from 1-based arrows, as written in quiver files.
    pub fn from_one_based(vertex_count: usize, arrows: &[(usize, usize)]) -> Result<Self> {
        let mut zero_based = Vec::with_capacity(arrows.len());
        for &(s, t) in arrows {
            if s == 0 || t == 0 {
                return Err(Error::InvalidQuiver("vertex indices are 1-based".into()));
            }
            zero_based.push((s - 1, t - 1));
        }
        Self::new(vertex_count, zero_based)
    }

    /// The Kronecker quiver `1 => 2`.
    pub fn kronecker() -> Self {
        Self::new(2, vec![(0, 1), (0, 1)]).unwrap()
    }

    /// Linearly oriented `A_n`: `1 -> 2 -> ... -> n`.
    pub fn linear_a(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i)).collect()).unwrap()
    }

    /// Acyclic `Ã_2`: arrows `1 -> 2`, `2 -> 3`, `1 -> 3`.
    pub fn affine_a2() -> Self {
        Self::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    /// Vertices ordered so that every arrow goes forward.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo_order
    }

    /// Skew-symmetric exchange matrix `b_ij = #(i -> j) - #(j -> i)`.
    pub fn exchange_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.vertex_count;
        let mut b = vec![vec![0i64; n]; n];
        for &(s, t) in &self.arrows {
            b[s][t] += 1;
            b[t][s] -= 1;
        }
        b
    }

    /// Euler form `<e, f> = sum_i e_i f_i - sum_{a} e_{s(a)} f_{t(a)}`.
    pub fn euler_form(&self, e: &DimVector, f: &DimVector) -> Result<i64> {
        check_len(self.vertex_count, e.len())?;
        check_len(self.vertex_count, f.len())?;
        let diag: i64 = e.iter().zip(f.iter()).map(|(a, b)| a * b).sum();
        let off: i64 = self.arrows.iter().map(|&(s, t)| e[s] * f[t]).sum();
        Ok(diag - off)
    }

    /// Tits quadratic form `(e, e)`.
    pub fn tits_norm(&self, e: &DimVector) -> Result<i64> {
        self.euler_form(e, e)
    }

    /// Positive roots `e <= bound`, `e != 0`, with `(e, e) <= 1`; real iff `(e, e) = 1`.
    pub fn positive_roots(&self, bound: &DimVector) -> Result<Vec<(DimVector, RootKind)>> {
        check_len(self.vertex_count, bound.len())?;
        if !bound.is_nonnegative() {
            return Err(Error::InvalidInput("root box must be nonnegative".into()));
        }
        let zero = DimVector::zero(self.vertex_count);
        let mut out = Vec::new();
        for e in DimVector::boxed(&zero, bound) {
            if e.is_zero() {
                continue;
            }
            match self.tits_norm(&e)? {
                1 => out.push((e, RootKind::Real)),
                x if x <= 0 => out.push((e, RootKind::Imaginary)),
                _ => {}
            }
        }
        Ok(out)
    }

    fn symmetric_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.vertex_count;
        let mut m = vec![vec![0i64; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 2;
        }
        for &(s, t) in &self.arrows {
            m[s][t] -= 1;
            m[t][s] -= 1;
        }
        m
    }

    /// Dynkin / affine / wild, read off from the inertia of the symmetrized
    /// Tits form (positive definite / positive semidefinite of corank one /
    /// anything else). For connected simply-laced graphs this matches the
    /// ADE / extended-ADE shape lists.
    pub fn quiver_type(&self) -> QuiverType {
        classify(&self.symmetric_matrix())
    }

    pub fn is_dynkin(&self) -> bool {
        self.quiver_type() == QuiverType::Dynkin
    }

    /// `None` for Dynkin quivers; `Err(WildType)` for wild ones.
    pub fn affine_data(&self) -> Result<Option<AffineData>> {
        match self.quiver_type() {
            QuiverType::Dynkin => Ok(None),
            QuiverType::Wild => Err(Error::WildType),
            QuiverType::Affine => {
                let delta = radical_generator(&self.symmetric_matrix())
                    .ok_or_else(|| Error::Consistency("affine form without radical".into()))?;
                if !delta.is_sincere() || self.tits_norm(&delta)? != 0 {
                    return Err(Error::Consistency(format!(
                        "radical vector {delta} is not a sincere isotropic root"
                    )));
                }
                let full = self.symmetric_matrix();
                let extending_vertex = (0..self.vertex_count)
                    .find(|&e| {
                        delta[e] == 1 && {
                            let keep: Vec<usize> =
                                (0..self.vertex_count).filter(|&v| v != e).collect();
                            let sub: Vec<Vec<i64>> = keep
                                .iter()
                                .map(|&i| keep.iter().map(|&j| full[i][j]).collect())
                                .collect();
                            classify(&sub) == QuiverType::Dynkin
                        }
                    })
                    .ok_or_else(|| Error::Consistency("no extending vertex".into()))?;
                Ok(Some(AffineData {
                    delta,
                    extending_vertex,
                }))
            }
        }
    }

    /// Requires an affine quiver; wild and Dynkin inputs are rejected.
    pub fn require_affine(&self) -> Result<AffineData> {
        self.affine_data()?
            .ok_or_else(|| Error::InvalidQuiver("quiver is of Dynkin type, not affine".into()))
    }

    pub fn to_json(&self) -> Value {
        let arrows: Vec<[usize; 2]> = self.arrows.iter().map(|&(s, t)| [s + 1, t + 1]).collect();
        json!({ "vertices": self.vertex_count, "arrows": arrows })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidQuiver(format!("quiver JSON: {m}"));
        let n = v
            .get("vertices")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing \"vertices\""))? as usize;
        let arrows = v
            .get("arrows")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"arrows\""))?;
        let mut parsed = Vec::with_capacity(arrows.len());
        for a in arrows {
            let pair = a.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("arrow must be [s, t]"))?;
            let s = pair[0].as_u64().ok_or_else(|| bad("arrow endpoint"))? as usize;
            let t = pair[1].as_u64().ok_or_else(|| bad("arrow endpoint"))? as usize;
            parsed.push((s, t));
        }
        Self::from_one_based(n, &parsed)
    }
}

fn topological_order(n: usize, arrows: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    for &(_, t) in arrows {
        indeg[t] += 1;
    }
    let mut ready: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop() {
        order.push(v);
        let mut next = Vec::new();
        for &(s, t) in arrows {
            if s == v {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    next.push(t);
                }
            }
        }
        next.sort_unstable_by(|a, b| b.cmp(a));
        next.dedup();
        ready.extend(next);
        ready.sort_unstable_by(|a, b| b.cmp(a));
    }
    (order.len() == n).then_some(order)
}

fn is_connected(n: usize, arrows: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(s, t) in arrows {
            let w = if s == v {
                t
            } else if t == v {
                s
            } else {
                continue;
            };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|x| x)
}

fn to_rational(m: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    m.iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect()
}

/// Inertia-based classification of a symmetric integer matrix via symmetric
/// Gaussian elimination over the rationals.
fn classify(m: &[Vec<i64>]) -> QuiverType {
    let mut a = to_rational(m);
    let n = a.len();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut zero_pivots = 0;
    while !alive.is_empty() {
        // any strictly negative diagonal entry means indefinite
        if alive.iter().any(|&i| a[i][i].is_negative()) {
            return QuiverType::Wild;
        }
        match alive.iter().position(|&i| a[i][i].is_positive()) {
            Some(pos) => {
                let p = alive.remove(pos);
                let piv = a[p][p].clone();
                for &i in &alive {
                    let f = &a[i][p] / &piv;
                    for &j in &alive {
                        let delta = &f * &a[p][j];
                        a[i][j] -= delta;
                    }
                }
            }
            None => {
                // all remaining diagonal entries are zero: PSD forces the
                // remaining block to vanish
                if alive
                    .iter()
                    .any(|&i| alive.iter().any(|&j| !a[i][j].is_zero()))
                {
                    return QuiverType::Wild;
                }
                zero_pivots = alive.len();
                break;
            }
        }
    }
    match zero_pivots {
        0 => QuiverType::Dynkin,
        1 => QuiverType::Affine,
        _ => QuiverType::Wild,
    }
}

/// Primitive integer generator of a one-dimensional kernel, sign-normalized
/// so its first nonzero entry is positive.
fn radical_generator(m: &[Vec<i64>]) -> Option<DimVector> {
    let n = m.len();
    let mut a = to_rational(m);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(r) = (row..n).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, r);
        let inv = BigRational::one() / &a[row][col];
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for r2 in 0..n {
            if r2 != row && !a[r2][col].is_zero() {
                let f = a[r2][col].clone();
                for c in 0..n {
                    let delta = &f * &a[row][c];
                    a[r2][c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 1 {
        return None;
    }
    let fcol = free[0];
    let mut v = vec![BigRational::zero(); n];
    v[fcol] = BigRational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = -a[r][fcol].clone();
    }
    let lcm = v
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints
        .iter()
        .fold(num_bigint::BigInt::zero(), |acc, x| num_integer::gcd(acc, x.clone()));
    let mut out: Vec<i64> = ints
        .iter()
        .map(|x| i64::try_from(x / &g).expect("small radical entry"))
        .collect();
    if out.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        out.iter_mut().for_each(|x| *x = -*x);
    }
    Some(DimVector(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[i64]) -> DimVector {
        DimVector::from(v)
    }

    #[test]
    fn euler_form_examples() {
        let k = Quiver::kronecker();
        assert_eq!(k.euler_form(&dv(&[1, 0]), &dv(&[0, 1])).unwrap(), -2);
        assert_eq!(k.euler_form(&dv(&[1, 1]), &dv(&[1, 1])).unwrap(), 0);
        let a2 = Quiver::linear_a(2);
        assert_eq!(a2.euler_form(&dv(&[1, 1]), &dv(&[1, 1])).unwrap(), 1);
        assert!(k.euler_form(&dv(&[1]), &dv(&[1, 1])).is_err());
    }

    #[test]
    fn rejects_cycles_and_disconnected() {
        assert!(Quiver::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Quiver::new(3, vec![(0, 1)]).is_err());
        assert!(Quiver::new(1, vec![(0, 0)]).is_err());
        assert!(Quiver::new(1, vec![]).is_ok());
    }

    #[test]
    fn roots_a2_and_kronecker() {
        let a2 = Quiver::linear_a(2);
        let roots = a2.positive_roots(&dv(&[1, 1])).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().all(|(_, k)| *k == RootKind::Real));

        let k = Quiver::kronecker();
        let roots = k.positive_roots(&dv(&[2, 2])).unwrap();
        let real: Vec<_> = roots.iter().filter(|r| r.1 == RootKind::Real).map(|r| r.0.clone()).collect();
        let imag: Vec<_> = roots.iter().filter(|r| r.1 == RootKind::Imaginary).map(|r| r.0.clone()).collect();
        assert_eq!(real, vec![dv(&[0, 1]), dv(&[1, 0]), dv(&[1, 2]), dv(&[2, 1])]);
        assert_eq!(imag, vec![dv(&[1, 1]), dv(&[2, 2])]);

        let roots = k.positive_roots(&dv(&[5, 5])).unwrap();
        let imag: Vec<_> = roots.iter().filter(|r| r.1 == RootKind::Imaginary).map(|r| r.0.clone()).collect();
        assert_eq!(imag, (1..=5).map(|n| dv(&[n, n])).collect::<Vec<_>>());
    }

    #[test]
    fn dynkin_root_counts() {
        let a3 = Quiver::linear_a(3);
        assert_eq!(a3.positive_roots(&dv(&[3, 3, 3])).unwrap().len(), 6);
        // orientation does not change the count
        let a3b = Quiver::new(3, vec![(1, 0), (1, 2)]).unwrap();
        assert_eq!(a3b.positive_roots(&dv(&[3, 3, 3])).unwrap().len(), 6);
    }

    #[test]
    fn classification() {
        assert_eq!(Quiver::linear_a(3).quiver_type(), QuiverType::Dynkin);
        assert_eq!(Quiver::kronecker().quiver_type(), QuiverType::Affine);
        assert_eq!(Quiver::affine_a2().quiver_type(), QuiverType::Affine);
        let three_arrows = Quiver::new(2, vec![(0, 1); 3]).unwrap();
        assert_eq!(three_arrows.quiver_type(), QuiverType::Wild);
        assert_eq!(three_arrows.affine_data(), Err(Error::WildType));
        // D4 star and its affine extension
        let d4 = Quiver::new(4, vec![(1, 0), (2, 0), (3, 0)]).unwrap();
        assert_eq!(d4.quiver_type(), QuiverType::Dynkin);
        let d4t = Quiver::new(5, vec![(1, 0), (2, 0), (3, 0), (4, 0)]).unwrap();
        let data = d4t.affine_data().unwrap().unwrap();
        assert_eq!(data.delta, dv(&[2, 1, 1, 1, 1]));
        assert_eq!(data.extending_vertex, 1);
    }

    #[test]
    fn affine_data_examples() {
        let k = Quiver::kronecker();
        let data = k.affine_data().unwrap().unwrap();
        assert_eq!(data.delta, dv(&[1, 1]));
        assert_eq!(data.extending_vertex, 0);
        assert_eq!(Quiver::linear_a(3).affine_data().unwrap(), None);
        let a2t = Quiver::affine_a2().affine_data().unwrap().unwrap();
        assert_eq!(a2t.delta, dv(&[1, 1, 1]));
    }

    #[test]
    fn defect_signs() {
        let k = Quiver::kronecker();
        let data = k.require_affine().unwrap();
        assert_eq!(data.defect(&k, &data.delta).unwrap(), 0);
        // S_2 is simple projective (vertex 2 is a sink), S_1 simple injective
        assert!(data.defect(&k, &dv(&[0, 1])).unwrap() < 0);
        assert!(data.defect(&k, &dv(&[1, 0])).unwrap() > 0);
        for n in 0..=5 {
            let a = data.defect(&k, &dv(&[n + 1, n])).unwrap();
            let b = data.defect(&k, &dv(&[n, n + 1])).unwrap();
            assert_eq!(a + b, 0);
        }
    }

    #[test]
    fn json_round_trip() {
        let q = Quiver::affine_a2();
        let v = q.to_json();
        assert_eq!(v.to_string(), r#"{"arrows":[[1,2],[2,3],[1,3]],"vertices":3}"#);
        assert_eq!(Quiver::from_json(&v).unwrap(), q);
        assert!(Quiver::from_json(&json!({"vertices": 2, "arrows": [[0, 1]]})).is_err());
    }

    #[test]
    fn boxed_enumeration() {
        let all = DimVector::boxed(&dv(&[-1, 0]), &dv(&[1, 1]));
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], dv(&[-1, 0]));
        assert_eq!(all[5], dv(&[1, 1]));
    }
}
