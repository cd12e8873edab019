//! The three bases of the Kronecker cluster algebra and the base changes
//! between their imaginary layers.
//!
//! All three share the cluster monomials and differ on the elements of
//! denominator `n delta`: `F_n(z)`, `S_n(z)` or `z^n`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::affine::{chebyshev_f, chebyshev_s};
use crate::ccmap::cc_of_module;
use crate::error::{Error, Result};
use crate::laurent::{bigint_from_json, bigint_to_json, LaurentPoly};
use crate::linalg::{integer_left_kernel_vector, integer_row_rank, Mat};
use crate::mutation::{cluster_monomials, ClusterVariableTable};
use crate::quiver::{DimVector, Quiver};
use crate::repfq::{Field, Representation};
use crate::univariate::UnivariatePoly;

/// `z = (1 + u_1^2 + u_2^2) / (u_1 u_2)`.
pub fn z() -> LaurentPoly {
    LaurentPoly::from_terms(
        2,
        vec![
            (vec![-1, -1], BigInt::one()),
            (vec![1, -1], BigInt::one()),
            (vec![-1, 1], BigInt::one()),
        ],
    )
    .expect("two variables")
}

/// `z` as the CC character of a quasi-simple regular module, checked against
/// the closed form.
pub fn z_from_cc(pool: &[u64]) -> Result<LaurentPoly> {
    let k = Quiver::kronecker();
    let one = Mat::identity(1);
    let m = Representation::new(&k, Field::Rational, DimVector::new(vec![1, 1]), vec![one.clone(), one])?;
    let x = cc_of_module(&m, pool, 1_000_000)?;
    if x != z() {
        return Err(Error::Consistency(format!("CC character of a quasi-simple is {x}, not z")));
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisKind {
    /// Sherman-Zelevinsky: `F_n(z)`.
    Sz,
    /// Caldero-Zelevinsky: `S_n(z)`.
    Cz,
    /// Generic: `z^n`.
    G,
}

impl BasisKind {
    pub const ALL: [BasisKind; 3] = [BasisKind::Sz, BasisKind::Cz, BasisKind::G];

    /// Imaginary-layer element `n` as a polynomial in `z`; element `0` is `1`.
    pub fn layer_polynomial(self, n: usize) -> UnivariatePoly {
        if n == 0 {
            return UnivariatePoly::constant(1);
        }
        match self {
            BasisKind::Sz => chebyshev_f(n),
            BasisKind::Cz => chebyshev_s(n),
            BasisKind::G => (0..n).fold(UnivariatePoly::constant(1), |acc, _| acc.shift()),
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisKind::Sz => "SZ",
            BasisKind::Cz => "CZ",
            BasisKind::G => "G",
        })
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SZ" | "B" => Ok(BasisKind::Sz),
            "CZ" | "C" => Ok(BasisKind::Cz),
            "G" => Ok(BasisKind::G),
            _ => Err(Error::InvalidInput(format!("unknown basis family {s:?} (expected SZ, CZ or G)"))),
        }
    }
}

/// Basis elements with denominator vectors in a box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisFamily {
    pub kind: BasisKind,
    pub n_max: usize,
    elements: BTreeMap<DimVector, LaurentPoly>,
}

impl BasisFamily {
    pub fn elements(&self) -> impl Iterator<Item = (&DimVector, &LaurentPoly)> {
        self.elements.iter()
    }

    pub fn get(&self, den: &DimVector) -> Option<&LaurentPoly> {
        self.elements.get(den)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Imaginary-layer element `n >= 1`.
    pub fn layer(&self, n: usize) -> Option<&LaurentPoly> {
        self.elements.get(&DimVector::new(vec![n as i64, n as i64]))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.to_string(),
            "n_max": self.n_max,
            "elements": self.elements.iter().map(|(d, x)| json!({
                "den": d.to_json(),
                "poly": x.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Cluster monomials with `min_den <= den <= max_den` together with the
/// imaginary layer `n = 1..=n_max`.
pub fn build_basis(
    kind: BasisKind,
    n_max: usize,
    min_den: &DimVector,
    max_den: &DimVector,
    table: &ClusterVariableTable,
    pool: &[u64],
) -> Result<BasisFamily> {
    if table.quiver() != &Quiver::kronecker() {
        return Err(Error::InvalidInput("the table must belong to the Kronecker quiver".into()));
    }
    let z = z_from_cc(pool)?;
    let mut elements = BTreeMap::new();
    for m in cluster_monomials(table, min_den, max_den)? {
        elements.insert(m.den, m.poly);
    }
    for n in 1..=n_max {
        let x = LaurentPoly::substitute_univariate(&kind.layer_polynomial(n), &z);
        let den = x.denominator_vector()?;
        let expected = DimVector::new(vec![n as i64, n as i64]);
        if den != expected {
            return Err(Error::Consistency(format!("layer element {n} has denominator {den}")));
        }
        if elements.insert(den, x).is_some() {
            return Err(Error::Consistency(format!("a cluster monomial has denominator {expected}")));
        }
    }
    Ok(BasisFamily { kind, n_max, elements })
}

/// Coefficients `lambda_{i,n}` of `z^n = sum_i lambda_{i,n} F_i(z)`, with
/// index `0` standing for the constant `1`.
///
/// Driven by `z F_1 = F_2 + 2`, `z F_i = F_{i+1} + F_{i-1}` and cross-checked
/// by peeling leading terms in the Laurent ring.
pub fn expand_in_f(n: usize) -> Result<Vec<BigInt>> {
    let mut lam = vec![BigInt::one()];
    for _ in 0..n {
        let m = lam.len();
        let mut next = vec![BigInt::zero(); m + 1];
        for (i, c) in lam.iter().enumerate() {
            match i {
                0 => next[1] += c,
                1 => {
                    next[0] += c * 2;
                    next[2] += c;
                }
                _ => {
                    next[i - 1] += c;
                    next[i + 1] += c;
                }
            }
        }
        lam = next;
    }
    let peeled = peel_in_family(&z().pow(n as u32), BasisKind::Sz)?;
    if peeled != lam {
        return Err(Error::Consistency(format!("expansion of z^{n} disagrees with Laurent division")));
    }
    Ok(lam)
}

/// Coordinates of `x` in a family's imaginary layer by repeatedly removing
/// the lexicographically leading term, which is `(i, -i)` for layer `i`.
fn peel_in_family(x: &LaurentPoly, kind: BasisKind) -> Result<Vec<BigInt>> {
    let z = z();
    let mut rest = x.clone();
    let mut coeffs: Vec<BigInt> = Vec::new();
    while let Some((e, c)) = rest.leading_term() {
        let i = e[0];
        if i < 0 || e[1] != -i {
            return Err(Error::Consistency(format!("leading exponent {e:?} is not of the form (i, -i)")));
        }
        let i = i as usize;
        let c = c.clone();
        if coeffs.len() <= i {
            coeffs.resize(i + 1, BigInt::zero());
        }
        coeffs[i] += &c;
        let elem = LaurentPoly::substitute_univariate(&kind.layer_polynomial(i), &z);
        rest = rest.try_sub(&elem.scale(&c))?;
    }
    Ok(coeffs)
}

/// Square integer matrix whose column `n` holds the coordinates of the
/// target family's element `n` in the source family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseChangeMatrix {
    pub from: BasisKind,
    pub to: BasisKind,
    entries: Vec<Vec<BigInt>>,
}

impl BaseChangeMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    pub fn identity(kind: BasisKind, size: usize) -> Self {
        let entries = (0..size)
            .map(|i| (0..size).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        Self {
            from: kind,
            to: kind,
            entries,
        }
    }

    /// Upper triangular with unit diagonal.
    pub fn is_unipotent(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, x)| match i.cmp(&j) {
                std::cmp::Ordering::Equal => x.is_one(),
                std::cmp::Ordering::Greater => x.is_zero(),
                std::cmp::Ordering::Less => true,
            })
        })
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().flatten().all(|x| !x.is_negative())
    }

    /// Product `self * rhs` (base change `A -> B` followed by `B -> C`).
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.to != rhs.from || self.size() != rhs.size() {
            return Err(Error::InvalidInput("base changes do not compose".into()));
        }
        let n = self.size();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| &self.entries[i][k] * &rhs.entries[k][j]).sum())
                    .collect()
            })
            .collect();
        Ok(Self {
            from: self.from,
            to: rhs.to,
            entries,
        })
    }

    /// Inverse of a unipotent matrix by back substitution.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unipotent() {
            return Err(Error::Consistency("base change matrix is not unipotent".into()));
        }
        let n = self.size();
        let mut inv = vec![vec![BigInt::zero(); n]; n];
        for j in 0..n {
            inv[j][j] = BigInt::one();
            for i in (0..j).rev() {
                let s: BigInt = (i + 1..=j).map(|k| &self.entries[i][k] * &inv[k][j]).sum();
                inv[i][j] = -s;
            }
        }
        Ok(Self {
            from: self.to,
            to: self.from,
            entries: inv,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "from": self.from.to_string(),
            "to": self.to.to_string(),
            "size": self.size(),
            "matrix": self
                .entries
                .iter()
                .map(|r| r.iter().map(bigint_to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInput(format!("base change JSON: {m}"));
        let kind = |k: &str| -> Result<BasisKind> {
            v.get(k).and_then(Value::as_str).ok_or_else(|| bad("missing family"))?.parse()
        };
        let rows = v.get("matrix").and_then(Value::as_array).ok_or_else(|| bad("missing \"matrix\""))?;
        let entries: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| bad("rows must be arrays"))?
                    .iter()
                    .map(|x| bigint_from_json(x).ok_or_else(|| bad("entries must be integers")))
                    .collect()
            })
            .collect::<Result<_>>()?;
        if entries.iter().any(|r| r.len() != entries.len()) {
            return Err(bad("matrix must be square"));
        }
        Ok(Self {
            from: kind("from")?,
            to: kind("to")?,
            entries,
        })
    }
}

/// Base change between the imaginary layers `0..size` of two families.
pub fn base_change(from: BasisKind, to: BasisKind, size: usize) -> Result<BaseChangeMatrix> {
    if size == 0 {
        return Err(Error::InvalidInput("size must be at least 1".into()));
    }
    let src: Vec<UnivariatePoly> = (0..size).map(|i| from.layer_polynomial(i)).collect();
    let mut entries = vec![vec![BigInt::zero(); size]; size];
    for n in 0..size {
        // triangular solve: strip the top coefficient with the monic source element
        let mut rest = to.layer_polynomial(n);
        for i in (0..=n).rev() {
            let c = rest.coeff(i);
            if !c.is_zero() {
                rest = &rest - &src[i].scale(&c);
            }
            entries[i][n] = c;
        }
        if !rest.is_zero() {
            return Err(Error::Consistency(format!("{to} element {n} is not in the span of {from}")));
        }
    }
    let m = BaseChangeMatrix { from, to, entries };
    cross_check(&m)?;
    Ok(m)
}

/// Re-expands every column in the Laurent ring and compares with the target
/// element, and compares the `SZ -> G` columns with [`expand_in_f`].
fn cross_check(m: &BaseChangeMatrix) -> Result<()> {
    let z = z();
    let src: Vec<LaurentPoly> = (0..m.size())
        .map(|i| LaurentPoly::substitute_univariate(&m.from.layer_polynomial(i), &z))
        .collect();
    for n in 0..m.size() {
        let mut acc = LaurentPoly::zero(2);
        for (i, x) in src.iter().enumerate() {
            acc = acc.try_add(&x.scale(&m.entries[i][n]))?;
        }
        let target = LaurentPoly::substitute_univariate(&m.to.layer_polynomial(n), &z);
        if acc != target {
            return Err(Error::Consistency(format!("column {n} of the {}->{} base change is wrong", m.from, m.to)));
        }
        if m.from == BasisKind::Sz && m.to == BasisKind::G {
            let lam = expand_in_f(n)?;
            for (i, l) in lam.iter().enumerate() {
                if &m.entries[i][n] != l {
                    return Err(Error::Consistency(format!("lambda_({i},{n}) disagrees with the recurrence")));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositivityReport {
    pub unipotent: bool,
    pub nonnegative: bool,
    /// (row, column, entry) for every negative entry.
    pub negative_entries: Vec<(usize, usize, BigInt)>,
}

impl PositivityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "unipotent": self.unipotent,
            "nonnegative": self.nonnegative,
            "negative_entries": self.negative_entries.iter().map(|(i, j, x)| json!([i, j, bigint_to_json(x)])).collect::<Vec<_>>(),
        })
    }
}

pub fn positivity_report(m: &BaseChangeMatrix) -> PositivityReport {
    let negative_entries = m
        .entries
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().enumerate().filter(|(_, x)| x.is_negative()).map(move |(j, x)| (i, j, x.clone())))
        .collect();
    PositivityReport {
        unipotent: m.is_unipotent(),
        nonnegative: m.is_nonnegative(),
        negative_entries,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceReport {
    pub elements: usize,
    pub monomials: usize,
    pub rank: usize,
    /// Integer relation `sum c_k x_k = 0`, labelled by element, when dependent.
    pub relation: Option<Vec<(String, BigInt)>>,
}

impl IndependenceReport {
    pub fn independent(&self) -> bool {
        self.rank == self.elements
    }

    pub fn to_json(&self) -> Value {
        json!({
            "elements": self.elements,
            "monomials": self.monomials,
            "rank": self.rank,
            "independent": self.independent(),
            "relation": self.relation.as_ref().map(|r| r.iter().map(|(l, c)| json!({"element": l, "coef": bigint_to_json(c)})).collect::<Vec<_>>()),
        })
    }
}

/// Exact rank of the coefficient matrix of labelled Laurent polynomials in
/// the monomial basis.
pub fn independence_check_elements(elements: &[(String, LaurentPoly)]) -> IndependenceReport {
    let mut monomials: Vec<Vec<i64>> = elements.iter().flat_map(|(_, x)| x.terms().map(|(e, _)| e.clone())).collect();
    monomials.sort();
    monomials.dedup();
    let index: BTreeMap<&Vec<i64>, usize> = monomials.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let rows: Vec<Vec<BigInt>> = elements
        .iter()
        .map(|(_, x)| {
            let mut row = vec![BigInt::zero(); monomials.len()];
            for (e, c) in x.terms() {
                row[index[e]] = c.clone();
            }
            row
        })
        .collect();
    let rank = integer_row_rank(&rows);
    let relation = (rank < elements.len()).then(|| {
        let k = integer_left_kernel_vector(&rows).expect("rank deficiency gives a kernel vector");
        elements
            .iter()
            .zip(k)
            .filter(|(_, c)| !c.is_zero())
            .map(|((l, _), c)| (l.clone(), c))
            .collect()
    });
    IndependenceReport {
        elements: elements.len(),
        monomials: monomials.len(),
        rank,
        relation,
    }
}

/// Linear independence of the family's elements with `den <= bound`.
pub fn independence_check(f: &BasisFamily, bound: &DimVector) -> IndependenceReport {
    let elements: Vec<(String, LaurentPoly)> = f
        .elements()
        .filter(|(d, _)| DimVector::le(d, bound))
        .map(|(d, x)| (d.to_string(), x.clone()))
        .collect();
    independence_check_elements(&elements)
}
