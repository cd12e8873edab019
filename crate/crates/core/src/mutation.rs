//! Seed mutation and bounded enumeration of cluster variables.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::quiver::{DimVector, Quiver};

/// Exchange matrix together with a cluster written in the initial variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Seed {
    exchange_matrix: Vec<Vec<i64>>,
    cluster: Vec<LaurentPoly>,
}

impl Seed {
    /// The initial seed `(B_Q, (u_1, ..., u_n))`.
    pub fn initial(q: &Quiver) -> Self {
        let n = q.vertex_count();
        Self {
            exchange_matrix: q.exchange_matrix(),
            cluster: (0..n).map(|i| LaurentPoly::var(n, i)).collect(),
        }
    }

    pub fn new(exchange_matrix: Vec<Vec<i64>>, cluster: Vec<LaurentPoly>) -> Result<Self> {
        let n = exchange_matrix.len();
        if cluster.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: cluster.len(),
            });
        }
        for (i, row) in exchange_matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput("exchange matrix is not square".into()));
            }
            for (j, &b) in row.iter().enumerate() {
                if b != -exchange_matrix[j][i] {
                    return Err(Error::InvalidInput("exchange matrix is not skew-symmetric".into()));
                }
            }
        }
        Ok(Self {
            exchange_matrix,
            cluster,
        })
    }

    pub fn exchange_matrix(&self) -> &[Vec<i64>] {
        &self.exchange_matrix
    }

    pub fn cluster(&self) -> &[LaurentPoly] {
        &self.cluster
    }

    pub fn rank(&self) -> usize {
        self.cluster.len()
    }

    /// Cluster as a sorted list, the identity of the seed up to relabeling.
    pub fn cluster_key(&self) -> Vec<LaurentPoly> {
        let mut c = self.cluster.clone();
        c.sort();
        c
    }
}

/// Mutation at `k` (0-based).
pub fn mutate(s: &Seed, k: usize) -> Result<Seed> {
    let n = s.rank();
    if k >= n {
        return Err(Error::InvalidInput(format!("mutation index {} out of range 1..={n}", k + 1)));
    }
    let b = &s.exchange_matrix;
    let nvars = s.cluster[k].nvars();
    let mut plus = LaurentPoly::one(nvars);
    let mut minus = LaurentPoly::one(nvars);
    for i in 0..n {
        let bik = b[i][k];
        if bik > 0 {
            plus = plus.try_mul(&s.cluster[i].pow(bik as u32))?;
        } else if bik < 0 {
            minus = minus.try_mul(&s.cluster[i].pow((-bik) as u32))?;
        }
    }
    let new_var = plus.try_add(&minus)?.div_exact(&s.cluster[k])?;
    let mut cluster = s.cluster.clone();
    cluster[k] = new_var;

    let mut m = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                b[i][j] + (b[i][k].abs() * b[k][j] + b[i][k] * b[k][j].abs()) / 2
            };
        }
    }
    Ok(Seed {
        exchange_matrix: m,
        cluster,
    })
}

/// Applies a word of 0-based mutation indices from left to right.
pub fn mutate_word(s: &Seed, word: &[usize]) -> Result<Seed> {
    word.iter().try_fold(s.clone(), |acc, &k| mutate(&acc, k))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub variable: LaurentPoly,
    /// Shortest mutation word (0-based) from the initial seed reaching it.
    pub word: Vec<usize>,
}

/// Cluster variables keyed by denominator vector, plus every cluster met.
#[derive(Debug, Clone)]
pub struct ClusterVariableTable {
    quiver: Quiver,
    depth: usize,
    closed: bool,
    entries: BTreeMap<DimVector, TableEntry>,
    clusters: Vec<Vec<LaurentPoly>>,
}

impl ClusterVariableTable {
    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// True when the mutation graph was exhausted before the depth bound.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, den: &DimVector) -> Option<&TableEntry> {
        self.entries.get(den)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&DimVector, &TableEntry)> {
        self.entries.iter()
    }

    pub fn variables(&self) -> impl Iterator<Item = &LaurentPoly> {
        self.entries.values().map(|e| &e.variable)
    }

    pub fn clusters(&self) -> &[Vec<LaurentPoly>] {
        &self.clusters
    }

    pub fn to_json(&self) -> Value {
        let vars: Vec<Value> = self
            .entries
            .iter()
            .map(|(den, e)| {
                json!({
                    "den": den.to_json(),
                    "poly": e.variable.to_json(),
                    "word": e.word.iter().map(|k| k + 1).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "quiver": self.quiver.to_json(),
            "depth": self.depth,
            "closed": self.closed,
            "cluster_count": self.clusters.len(),
            "variables": vars,
        })
    }
}

/// Breadth-first closure of the initial seed under mutation, up to `depth`
/// mutations.
pub fn enumerate_cluster_variables(q: &Quiver, depth: usize) -> Result<ClusterVariableTable> {
    let init = Seed::initial(q);
    let mut seen: HashSet<Vec<LaurentPoly>> = HashSet::new();
    let mut clusters = Vec::new();
    let mut entries: BTreeMap<DimVector, TableEntry> = BTreeMap::new();
    let mut frontier: Vec<(Seed, Vec<usize>)> = vec![(init.clone(), Vec::new())];
    seen.insert(init.cluster_key());
    clusters.push(init.cluster_key());
    record(&mut entries, &init, &[])?;
    let mut closed = false;

    for _ in 0..depth {
        let children: Vec<Vec<(Seed, Vec<usize>)>> = frontier
            .par_iter()
            .map(|(s, w)| {
                (0..s.rank())
                    .filter(|&k| w.last() != Some(&k))
                    .map(|k| {
                        let mut word = w.clone();
                        word.push(k);
                        Ok((mutate(s, k)?, word))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for (s, w) in children.into_iter().flatten() {
            let key = s.cluster_key();
            if seen.insert(key.clone()) {
                record(&mut entries, &s, &w)?;
                clusters.push(key);
                next.push((s, w));
            }
        }
        if next.is_empty() {
            closed = true;
            break;
        }
        frontier = next;
    }

    Ok(ClusterVariableTable {
        quiver: q.clone(),
        depth,
        closed,
        entries,
        clusters,
    })
}

fn record(entries: &mut BTreeMap<DimVector, TableEntry>, s: &Seed, word: &[usize]) -> Result<()> {
    for x in s.cluster() {
        let den = x.denominator_vector()?;
        match entries.get(&den) {
            Some(e) if e.variable != *x => {
                return Err(Error::Consistency(format!(
                    "two distinct cluster variables share denominator vector {den}"
                )));
            }
            Some(_) => {}
            None => {
                entries.insert(
                    den,
                    TableEntry {
                        variable: x.clone(),
                        word: word.to_vec(),
                    },
                );
            }
        }
    }
    Ok(())
}

/// A product of variables from one cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterMonomial {
    pub poly: LaurentPoly,
    pub den: DimVector,
    /// (denominator vector of the factor, exponent)
    pub factors: Vec<(DimVector, u32)>,
}

/// All cluster monomials with `min_den <= den <= max_den`, deduplicated.
///
/// Denominator vectors of initial variables are negative, so a lower bound
/// is needed to keep the enumeration finite.
pub fn cluster_monomials(
    t: &ClusterVariableTable,
    min_den: &DimVector,
    max_den: &DimVector,
) -> Result<Vec<ClusterMonomial>> {
    let n = t.quiver.vertex_count();
    crate::error::check_len(n, min_den.len())?;
    crate::error::check_len(n, max_den.len())?;
    let mut out: BTreeMap<LaurentPoly, ClusterMonomial> = BTreeMap::new();
    for cluster in &t.clusters {
        let dens: Vec<DimVector> = cluster.iter().map(|x| x.denominator_vector()).collect::<Result<_>>()?;
        // Compatible variables never share a support vertex with an initial
        // variable, so each coordinate has a single sign inside a cluster.
        let caps: Vec<u32> = dens
            .iter()
            .map(|d| {
                (0..n)
                    .filter(|&i| d[i] != 0)
                    .map(|i| {
                        let room = if d[i] > 0 { max_den[i] } else { min_den[i] };
                        (room / d[i]).max(0) as u32
                    })
                    .min()
                    .unwrap_or(0)
            })
            .collect();
        let mut exps = vec![0u32; cluster.len()];
        loop {
            let mut den = DimVector::zero(n);
            for (d, &a) in dens.iter().zip(&exps) {
                den = &den + &d.scale(a as i64);
            }
            if min_den.le(&den) && den.le(max_den) {
                let mut poly = LaurentPoly::one(n);
                for (x, &a) in cluster.iter().zip(&exps) {
                    if a > 0 {
                        poly = poly.try_mul(&x.pow(a))?;
                    }
                }
                let actual = poly.denominator_vector()?;
                if actual != den {
                    return Err(Error::Consistency(format!(
                        "cluster monomial has denominator {actual}, expected {den}"
                    )));
                }
                let factors = dens
                    .iter()
                    .zip(&exps)
                    .filter(|(_, &a)| a > 0)
                    .map(|(d, &a)| (d.clone(), a))
                    .collect();
                out.entry(poly.clone()).or_insert(ClusterMonomial { poly, den, factors });
            }
            // odometer over exponents bounded by caps
            let mut i = 0;
            while i < exps.len() {
                if exps[i] < caps[i] {
                    exps[i] += 1;
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
            if i == exps.len() {
                break;
            }
        }
    }
    Ok(out.into_values().collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentReport {
    pub variables: usize,
    pub all_laurent: bool,
    pub all_positive: bool,
    pub max_coefficient: BigInt,
    pub max_terms: usize,
}

impl LaurentReport {
    pub fn to_json(&self) -> Value {
        json!({
            "variables": self.variables,
            "all_laurent": self.all_laurent,
            "all_positive": self.all_positive,
            "max_coefficient": crate::laurent::bigint_to_json(&self.max_coefficient),
            "max_terms": self.max_terms,
        })
    }
}

/// Re-checks the stored variables: integer Laurent polynomials in the
/// right number of variables, with positivity and size statistics.
pub fn laurent_check(t: &ClusterVariableTable) -> LaurentReport {
    let n = t.quiver.vertex_count();
    let vars: Vec<&LaurentPoly> = t.variables().collect();
    LaurentReport {
        variables: vars.len(),
        all_laurent: vars.iter().all(|x| x.nvars() == n && !x.is_zero()),
        all_positive: vars.iter().all(|x| x.all_coefficients_positive()),
        max_coefficient: vars.iter().map(|x| x.max_abs_coefficient()).max().unwrap_or_default(),
        max_terms: vars.iter().map(|x| x.len()).max().unwrap_or(0),
    }
}

/// Sorted set of denominator vectors in the table.
pub fn denominator_set(t: &ClusterVariableTable) -> BTreeSet<DimVector> {
    t.entries.keys().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::RootKind;

    fn dv(v: &[i64]) -> DimVector {
        DimVector::from(v)
    }

    #[test]
    fn kronecker_first_mutation() {
        let k = Quiver::kronecker();
        let s = mutate(&Seed::initial(&k), 0).unwrap();
        let u1 = LaurentPoly::var(2, 0);
        let u2 = LaurentPoly::var(2, 1);
        let expected = (&LaurentPoly::one(2) + &(&u2 * &u2)).div_exact(&u1).unwrap();
        assert_eq!(s.cluster()[0], expected);
        assert_eq!(s.exchange_matrix(), &[vec![0, -2], vec![2, 0]]);
    }

    #[test]
    fn involutive() {
        for q in [Quiver::kronecker(), Quiver::linear_a(3), Quiver::affine_a2()] {
            let mut s = Seed::initial(&q);
            for step in 0..6 {
                let k = step % q.vertex_count();
                let m = mutate(&s, k).unwrap();
                assert_eq!(mutate(&m, k).unwrap(), s);
                s = m;
            }
        }
    }

    #[test]
    fn a2_has_period_five() {
        let a2 = Quiver::linear_a(2);
        let s0 = Seed::initial(&a2);
        let s5 = mutate_word(&s0, &[0, 1, 0, 1, 0]).unwrap();
        assert_eq!(s5.cluster_key(), s0.cluster_key());
        assert_eq!(s5.cluster()[0], s0.cluster()[1]);
        assert_eq!(s5.cluster()[1], s0.cluster()[0]);
    }

    #[test]
    fn dynkin_closures() {
        let t2 = enumerate_cluster_variables(&Quiver::linear_a(2), 10).unwrap();
        assert!(t2.is_closed());
        assert_eq!(t2.len(), 5);
        assert_eq!(t2.clusters().len(), 5);
        let t3 = enumerate_cluster_variables(&Quiver::linear_a(3), 12).unwrap();
        assert!(t3.is_closed());
        assert_eq!(t3.len(), 9);
        assert_eq!(t3.clusters().len(), 14);
        let report = laurent_check(&t3);
        assert!(report.all_laurent && report.all_positive);
    }

    #[test]
    fn kronecker_denominators_are_real_roots() {
        let k = Quiver::kronecker();
        let t = enumerate_cluster_variables(&k, 3).unwrap();
        assert!(!t.is_closed());
        let roots = k.positive_roots(&dv(&[10, 10])).unwrap();
        for den in denominator_set(&t) {
            let negative_simple = den == dv(&[-1, 0]) || den == dv(&[0, -1]);
            let real = roots.contains(&(den.clone(), RootKind::Real));
            assert!(negative_simple || real, "{den}");
        }
        assert_eq!(t.len(), 2 + 2 * 3);
        let report = laurent_check(&enumerate_cluster_variables(&k, 4).unwrap());
        assert!(report.all_positive);
    }

    #[test]
    fn a2_monomials() {
        let a2 = Quiver::linear_a(2);
        let t = enumerate_cluster_variables(&a2, 10).unwrap();
        let only_one = cluster_monomials(&t, &dv(&[0, 0]), &dv(&[0, 0])).unwrap();
        assert_eq!(only_one.len(), 1);
        assert_eq!(only_one[0].poly, LaurentPoly::one(2));
        let mons = cluster_monomials(&t, &dv(&[0, 0]), &dv(&[2, 2])).unwrap();
        let polys: BTreeSet<LaurentPoly> = mons.iter().map(|m| m.poly.clone()).collect();
        for c in t.clusters() {
            let prod = &c[0] * &c[1];
            let den = prod.denominator_vector().unwrap();
            if dv(&[0, 0]).le(&den) {
                assert!(polys.contains(&prod), "missing product with den {den}");
            }
        }
        let all = cluster_monomials(&t, &dv(&[-1, -1]), &dv(&[2, 2])).unwrap();
        for c in t.clusters() {
            assert!(all.iter().any(|m| m.poly == &c[0] * &c[1]));
        }
    }

    #[test]
    fn kronecker_monomial_denominators_add() {
        let k = Quiver::kronecker();
        let t = enumerate_cluster_variables(&k, 6).unwrap();
        let mons = cluster_monomials(&t, &dv(&[-3, -3]), &dv(&[4, 4])).unwrap();
        assert!(!mons.is_empty());
        for m in mons {
            let sum = m
                .factors
                .iter()
                .fold(DimVector::zero(2), |acc, (d, a)| &acc + &d.scale(*a as i64));
            assert_eq!(sum, m.den);
            assert_eq!(m.poly.denominator_vector().unwrap(), m.den);
        }
    }

    #[test]
    fn json_lists_every_variable() {
        let t = enumerate_cluster_variables(&Quiver::linear_a(2), 6).unwrap();
        let j = t.to_json();
        assert_eq!(j["variables"].as_array().unwrap().len(), 5);
        assert_eq!(j["closed"], json!(true));
    }
}
