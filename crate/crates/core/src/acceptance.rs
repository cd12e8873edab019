//! The acceptance suite: twelve end-to-end criteria shared by the
//! `acceptance` integration test and `genvar selftest`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::affine::{
    at_t_plus_inverse, chebyshev_f, chebyshev_s, f_at_t_plus_inverse_expected, kronecker_tube_module,
    membership_check_a, s_from_f, s_in_f_terms,
};
use crate::candecomp::CanonicalDecomposition;
use crate::ccmap::{cc_of_module, cc_of_object, DecoratedRep, GenericEngine};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::kronecker::{
    base_change, build_basis, expand_in_f, independence_check, positivity_report, z, BaseChangeMatrix, BasisKind,
};
use crate::laurent::LaurentPoly;
use crate::linalg::Mat;
use crate::mutation::{cluster_monomials, enumerate_cluster_variables};
use crate::quiver::{DimVector, Quiver};
use crate::repfq::{ext_dim, hom_dim, Field, Representation};
use crate::univariate::UnivariatePoly;

pub const SZ_GOLDEN_FILE: &str = "sz_to_g.json";
pub const CZ_GOLDEN_FILE: &str = "cz_to_g.json";
const SZ_GOLDEN: &str = include_str!("../golden/sz_to_g.json");
const CZ_GOLDEN: &str = include_str!("../golden/cz_to_g.json");

/// Reference base-change matrices: each pair is `(forward, inverse)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Golden {
    pub sz: (BaseChangeMatrix, BaseChangeMatrix),
    pub cz: (BaseChangeMatrix, BaseChangeMatrix),
}

impl Golden {
    /// The copies compiled into the library.
    pub fn builtin() -> Result<Self> {
        Ok(Self {
            sz: parse_pair(SZ_GOLDEN)?,
            cz: parse_pair(CZ_GOLDEN)?,
        })
    }

    /// Reads `sz_to_g.json` and `cz_to_g.json` from `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let read = |name: &str| {
            std::fs::read_to_string(dir.join(name))
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", dir.join(name).display())))
        };
        Ok(Self {
            sz: parse_pair(&read(SZ_GOLDEN_FILE)?)?,
            cz: parse_pair(&read(CZ_GOLDEN_FILE)?)?,
        })
    }
}

fn parse_pair(text: &str) -> Result<(BaseChangeMatrix, BaseChangeMatrix)> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("golden file: {e}")))?;
    let get = |k: &str| v.get(k).ok_or_else(|| Error::InvalidInput(format!("golden file lacks {k:?}")));
    Ok((BaseChangeMatrix::from_json(get("forward")?)?, BaseChangeMatrix::from_json(get("inverse")?)?))
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionResult {
    /// `PASS [ 3] z reproduction (0.41 s): ...`
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {} ({:.2} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": self.elapsed.as_secs_f64(),
        })
    }
}

pub const CRITERIA: [(&str, u64); 12] = [
    ("SZ/G base change matches the golden matrices", 1),
    ("CZ/G base change matches the golden matrices", 1),
    ("z reproduction", 5),
    ("denominator parametrization", 120),
    ("Dynkin generic variables are cluster monomials", 120),
    ("X of 2 delta versus S_2(z)", 60),
    ("multiplicativity", 300),
    ("canonical decomposition: fast path equals search", 300),
    ("Chebyshev identities", 1),
    ("lambda parity, monotonicity and positivity", 30),
    ("G(K) independence in the box [-5,5]^2", 120),
    ("tube modules expand integrally in G(K)", 60),
];

/// Outcome of one check: `Ok(detail)` passes, `Err(reason)` fails.
type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub struct Suite {
    config: Config,
    golden: Golden,
}

impl Suite {
    pub fn new(config: Config, golden: Golden) -> Self {
        Self { config, golden }
    }

    /// Runs criterion `id` (1-based). The runtime limit is part of the pass
    /// condition.
    pub fn run(&self, id: usize) -> CriterionResult {
        let (name, limit) = CRITERIA[id - 1];
        let start = Instant::now();
        let outcome = match id {
            1 => self.golden_pair(BasisKind::Sz, &self.golden.sz),
            2 => self.golden_pair(BasisKind::Cz, &self.golden.cz),
            3 => self.z_reproduction(),
            4 => self.denominators(),
            5 => self.dynkin_equality(),
            6 => self.separation(),
            7 => self.multiplicativity(),
            8 => self.decomposition_paths(),
            9 => chebyshev_identities(),
            10 => lambda_properties(),
            11 => self.independence(),
            12 => self.tube_membership(),
            _ => Err(format!("no criterion {id}")),
        };
        let elapsed = start.elapsed();
        let (passed, detail) = match outcome {
            Ok(d) if elapsed.as_secs_f64() <= limit as f64 => (true, d),
            Ok(d) => (false, format!("{d}; exceeded the {limit} s limit")),
            Err(e) => (false, e),
        };
        CriterionResult {
            id,
            name,
            passed,
            detail,
            elapsed,
        }
    }

    pub fn run_all(&self) -> Vec<CriterionResult> {
        (1..=CRITERIA.len()).map(|i| self.run(i)).collect()
    }

    fn golden_pair(&self, kind: BasisKind, golden: &(BaseChangeMatrix, BaseChangeMatrix)) -> Check {
        let forward = lift(base_change(kind, BasisKind::G, 7))?;
        let backward = lift(base_change(BasisKind::G, kind, 7))?;
        let inverse = lift(forward.inverse())?;
        let mut diffs = matrix_diff(&golden.0, &forward);
        diffs.extend(matrix_diff(&golden.1, &backward));
        ensure(inverse == backward, || "inverse of the forward matrix differs from the backward solve".into())?;
        if diffs.is_empty() {
            Ok(format!("{kind}->G and G->{kind} reproduce the 7x7 golden matrices"))
        } else {
            Err(format!("differences (expected -> computed): {}", diffs.join("; ")))
        }
    }

    fn z_reproduction(&self) -> Check {
        let k = Quiver::kronecker();
        let expected = z();
        let params: [(i64, i64); 4] = [(1, 1), (1, -2), (3, 2), (0, 1)];
        for (a, b) in params {
            let m = lift(Representation::new(
                &k,
                Field::Rational,
                DimVector::new(vec![1, 1]),
                vec![Mat::from_rows(1, 1, vec![a]).map_err(|e| e.to_string())?, Mat::from_rows(1, 1, vec![b]).map_err(|e| e.to_string())?],
            ))?;
            // a brick in a homogeneous tube: End = k, Ext^1(M, M) = k
            ensure(lift(hom_dim(&m, &m))? == 1 && lift(ext_dim(&m, &m))? == 1, || {
                format!("parameter ({a}:{b}) is not a homogeneous quasi-simple")
            })?;
            let x = lift(cc_of_module(&m, &self.config.prime_pool, self.config.budgets.enumeration_cap))?;
            ensure(x == expected, || format!("parameter ({a}:{b}) gives {x}"))?;
        }
        let engine = GenericEngine::new(&k, &self.config);
        let g = lift(engine.generic_variable(&DimVector::new(vec![1, 1])))?;
        ensure(g.value == expected, || format!("generic variable of (1,1) is {}", g.value))?;
        Ok(format!("{} parameters and the certified generic sample all give {expected}", params.len()))
    }

    fn denominators(&self) -> Check {
        let mut checked = 0;
        for (q, depth, bound) in [(Quiver::linear_a(2), 10, 4), (Quiver::linear_a(3), 12, 4), (Quiver::kronecker(), 10, 4)] {
            let table = lift(enumerate_cluster_variables(&q, depth))?;
            let engine = GenericEngine::new(&q, &self.config);
            for (d, entry) in table.entries() {
                if d.iter().any(|x| x.abs() > bound) {
                    continue;
                }
                let x = if d.is_nonnegative() {
                    lift(engine.generic_module(d))?.value
                } else {
                    let i = d.iter().position(|&x| x < 0).expect("negative entry");
                    ensure(d == &-&DimVector::simple(q.vertex_count(), i), || format!("unexpected denominator {d}"))?;
                    lift(cc_of_object(&DecoratedRep::shifted_projective(&q, i), &self.config.prime_pool, self.config.budgets.enumeration_cap))?
                };
                let den = lift(x.denominator_vector())?;
                ensure(&den == d, || format!("object of dimension {d} has denominator {den}"))?;
                ensure(x == entry.variable, || format!("X of the rigid object {d} is not the cluster variable"))?;
                checked += 1;
            }
        }
        let zz = z();
        for n in 1..=10u32 {
            let den = lift(zz.pow(n).denominator_vector())?;
            ensure(den == DimVector::new(vec![n as i64, n as i64]), || format!("den(z^{n}) = {den}"))?;
        }
        Ok(format!("{checked} rigid indecomposables on A2, A3, Kronecker; den(z^n) = n delta for n <= 10"))
    }

    fn dynkin_equality(&self) -> Check {
        let mut checked = 0;
        for q in [Quiver::linear_a(2), Quiver::linear_a(3)] {
            let n = q.vertex_count();
            let lo = DimVector::new(vec![-2; n]);
            let hi = DimVector::new(vec![3; n]);
            let table = lift(enumerate_cluster_variables(&q, 20))?;
            ensure(table.is_closed(), || "Dynkin mutation table did not close".into())?;
            let monomials: BTreeSet<LaurentPoly> =
                lift(cluster_monomials(&table, &lo, &hi))?.into_iter().map(|m| m.poly).collect();
            let engine = GenericEngine::new(&q, &self.config);
            for d in DimVector::boxed(&lo, &hi) {
                let x = lift(engine.generic_variable(&d))?.value;
                ensure(monomials.contains(&x), || format!("X_{d} is not a cluster monomial"))?;
                checked += 1;
            }
        }
        let k = Quiver::kronecker();
        let table = lift(enumerate_cluster_variables(&k, 8))?;
        let lo = DimVector::new(vec![-4, -4]);
        let hi = DimVector::new(vec![4, 4]);
        let monomials = lift(cluster_monomials(&table, &lo, &hi))?;
        let engine = GenericEngine::new(&k, &self.config);
        let x = lift(engine.generic_variable(&DimVector::new(vec![2, 2])))?.value;
        ensure(monomials.iter().all(|m| m.poly != x), || "X_(2,2) is a cluster monomial".into())?;
        Ok(format!(
            "{checked} vectors on A2 and A3; X_(2,2) differs from all {} Kronecker cluster monomials",
            monomials.len()
        ))
    }

    fn separation(&self) -> Check {
        let engine = GenericEngine::new(&Quiver::kronecker(), &self.config);
        let x = lift(engine.generic_variable(&DimVector::new(vec![2, 2])))?.value;
        let zz = z();
        let s2 = LaurentPoly::substitute_univariate(&chebyshev_s(2), &zz);
        ensure(x == zz.pow(2), || format!("X_(2,2) = {x}, not z^2"))?;
        let diff = lift(x.try_sub(&s2))?;
        ensure(diff == LaurentPoly::one(2), || format!("X_(2,2) - S_2(z) = {diff}"))?;
        Ok("X_(2,2) = z^2 and X_(2,2) - S_2(z) = 1".into())
    }

    fn multiplicativity(&self) -> Check {
        let mut factorizations = 0;
        let mut products = 0;
        for (q, r) in [(Quiver::kronecker(), 4i64), (Quiver::affine_a2(), 3)] {
            let n = q.vertex_count();
            let engine = GenericEngine::new(&q, &self.config);
            let lo = DimVector::new(vec![-r; n]);
            let hi = DimVector::new(vec![r; n]);
            let vectors = DimVector::boxed(&lo, &hi);
            let mut values = BTreeMap::new();
            for d in &vectors {
                let g = lift(engine.generic_variable(d))?;
                if let Some(part) = &g.module_part {
                    let rebuilt = lift(canonical_product(&engine, d, &part.decomposition))?;
                    ensure(rebuilt == g.value, || format!("X_{d} is not the product over its canonical decomposition"))?;
                    factorizations += 1;
                }
                values.insert(d.clone(), g.value);
            }
            let oracles = engine.oracles();
            for (i, d) in vectors.iter().enumerate() {
                for e in &vectors[i..] {
                    let s = d + e;
                    if d.is_zero() || e.is_zero() || !s.le(&hi) || !lo.le(&s) {
                        continue;
                    }
                    if !lift(oracles.generic_ext_vanishes_cluster(d, e))? {
                        continue;
                    }
                    let prod = lift(values[d].try_mul(&values[e]))?;
                    ensure(prod == values[&s], || format!("X_{s} differs from X_{d} X_{e}"))?;
                    products += 1;
                }
            }
        }
        Ok(format!(
            "{factorizations} canonical factorizations and {products} Ext-orthogonal products on Kronecker and affine A2"
        ))
    }

    fn decomposition_paths(&self) -> Check {
        let mut checked = 0;
        for q in [Quiver::kronecker(), Quiver::affine_a2()] {
            let n = q.vertex_count();
            let engine = GenericEngine::new(&q, &self.config);
            let oracles = engine.oracles();
            for d in DimVector::boxed(&DimVector::zero(n), &DimVector::new(vec![3; n])) {
                if d.is_zero() {
                    continue;
                }
                let fast = lift(oracles.canonical_decomposition_affine(&d))?;
                let slow = lift(oracles.canonical_decomposition(&d))?;
                ensure(fast.summands == slow.summands, || {
                    format!("{d}: fast path {:?} vs search {:?}", fast.roots(), slow.roots())
                })?;
                for c in [&fast, &slow] {
                    ensure(lift(c.certificate.verify(&d))?, || format!("certificate for {d} does not re-verify"))?;
                }
                checked += 1;
            }
        }
        Ok(format!("{checked} vectors agree and both certificates re-verify over Q"))
    }

    fn independence(&self) -> Check {
        let k = Quiver::kronecker();
        let lo = DimVector::new(vec![-5, -5]);
        let hi = DimVector::new(vec![5, 5]);
        let table = lift(enumerate_cluster_variables(&k, 12))?;
        let basis = lift(build_basis(BasisKind::G, 5, &lo, &hi, &table, &self.config.prime_pool))?;
        ensure(basis.len() == 121, || format!("expected 121 elements in the box, found {}", basis.len()))?;
        let report = independence_check(&basis, &hi);
        if let Some(rel) = &report.relation {
            return Err(format!("dependency found: {rel:?}"));
        }
        ensure(report.independent(), || "rank deficit".into())?;
        Ok(format!(
            "{} elements, rank {} over {} monomials",
            report.elements, report.rank, report.monomials
        ))
    }

    fn tube_membership(&self) -> Check {
        let zz = z();
        let mut out = Vec::new();
        for lambda in [2i64, -1] {
            for n in 1..=3usize {
                let obj = lift(DecoratedRep::from_module(kronecker_tube_module(lambda, n)))?;
                let r = lift(membership_check_a(&obj, &self.config.prime_pool, self.config.budgets.enumeration_cap))?;
                // S_n(z) has coefficient s_k on z^k, i.e. on the element of denominator (k, k)
                let s = chebyshev_s(n);
                let expected: Vec<(DimVector, BigInt)> = (0..=n)
                    .filter(|&k| !s.coeff(k).is_zero())
                    .map(|k| (DimVector::new(vec![k as i64, k as i64]), s.coeff(k)))
                    .collect();
                ensure(r.coefficients == expected, || {
                    format!("tube module ({lambda}, {n}) expands as {:?}", r.coefficients)
                })?;
                ensure(r.value == LaurentPoly::substitute_univariate(&s, &zz), || {
                    format!("X of tube module ({lambda}, {n}) is not S_{n}(z)")
                })?;
                if lambda == 2 {
                    out.push(format!("n={n}: {} terms", expected.len()));
                }
            }
        }
        Ok(format!("integral expansions X = S_n(z) in G(K): {}", out.join(", ")))
    }
}

/// `u^{[d]_-} * prod X_{root}^{multiplicity}` with each root computed on its own.
fn canonical_product(engine: &GenericEngine, d: &DimVector, c: &CanonicalDecomposition) -> Result<LaurentPoly> {
    let n = d.len();
    let shift: Vec<i64> = d.iter().map(|&x| (-x).max(0)).collect();
    let mut acc = LaurentPoly::monomial(n, shift, 1);
    for s in &c.summands {
        let x = engine.generic_module(&s.root)?.value;
        acc = acc.try_mul(&x.pow(s.multiplicity as u32))?;
    }
    Ok(acc)
}

fn matrix_diff(expected: &BaseChangeMatrix, got: &BaseChangeMatrix) -> Vec<String> {
    let mut out = Vec::new();
    if (expected.from, expected.to) != (got.from, got.to) {
        out.push(format!(
            "direction {}->{} vs {}->{}",
            expected.from, expected.to, got.from, got.to
        ));
    }
    if expected.size() != got.size() {
        out.push(format!("size {} vs {}", expected.size(), got.size()));
        return out;
    }
    for i in 0..expected.size() {
        for j in 0..expected.size() {
            if expected.entry(i, j) != got.entry(i, j) {
                out.push(format!(
                    "{}->{} ({i},{j}): {} -> {}",
                    got.from,
                    got.to,
                    expected.entry(i, j),
                    got.entry(i, j)
                ));
            }
        }
    }
    out
}

fn chebyshev_identities() -> Check {
    let x = UnivariatePoly::x();
    for n in 0..=20 {
        let (s, f) = (chebyshev_s(n), chebyshev_f(n));
        ensure(s.is_monic() && s.degree() == Some(n), || format!("S_{n} is not monic of degree {n}"))?;
        if n >= 2 {
            let (s1, s2) = (chebyshev_s(n - 1), chebyshev_s(n - 2));
            ensure(s == &(&x * &s1) - &s2, || format!("S recurrence fails at {n}"))?;
            ensure(f == &(&x * &chebyshev_f(n - 1)) - &chebyshev_f(n - 2), || format!("F recurrence fails at {n}"))?;
            ensure(f == &s - &s2, || format!("F_{n} != S_{n} - S_{}", n - 2))?;
        }
        ensure(at_t_plus_inverse(&f) == f_at_t_plus_inverse_expected(n), || {
            format!("F_{n}(t + 1/t) != t^{n} + t^-{n}")
        })?;
        // independent oracle: S_n(t + 1/t) (t - 1/t) = t^{n+1} - t^{-(n+1)}
        let t = LaurentPoly::var(1, 0);
        let tinv = LaurentPoly::monomial(1, vec![-1], 1);
        let lhs = lift(at_t_plus_inverse(&s).try_mul(&lift(t.try_sub(&tinv))?))?;
        let k = n as i64 + 1;
        let rhs = lift(LaurentPoly::monomial(1, vec![k], 1).try_sub(&LaurentPoly::monomial(1, vec![-k], 1)))?;
        ensure(lhs == rhs, || format!("S_{n}(t + 1/t) fails the telescoping identity"))?;
        ensure(s_from_f(n) == s, || format!("S-in-F summation fails at {n}: terms {:?}", s_in_f_terms(n)))?;
    }
    Ok("recurrences, F_n(t+1/t), F_n = S_n - S_(n-2) and the S-in-F sum hold for n <= 20".into())
}

fn lambda_properties() -> Check {
    for n in 1..=12 {
        let lam = lift(expand_in_f(n))?;
        ensure(lam.len() == n + 1 && lam[n].is_one(), || format!("lambda_(n,n) != 1 at n = {n}"))?;
        for i in 0..=n {
            if (n - i) % 2 == 1 {
                ensure(lam[i].is_zero(), || format!("lambda_({i},{n}) = {} should vanish", lam[i]))?;
            } else {
                ensure(lam[i].is_positive(), || format!("lambda_({i},{n}) is not positive"))?;
                if i >= 2 {
                    ensure(lam[i] < lam[i - 2], || format!("lambda_({i},{n}) >= lambda_({},{n})", i - 2))?;
                }
            }
        }
        let cz = lift(base_change(BasisKind::Cz, BasisKind::G, n + 1))?;
        for i in 0..=n {
            let next = lam.get(i + 2).cloned().unwrap_or_else(BigInt::zero);
            let diff = &lam[i] - next;
            ensure(!diff.is_negative(), || format!("lambda_({i},{n}) - lambda_({},{n}) < 0", i + 2))?;
            ensure(cz.entry(i, n) == &diff, || format!("CZ coefficient ({i},{n}) is not the lambda difference"))?;
        }
    }
    for kind in [BasisKind::Sz, BasisKind::Cz] {
        let r = positivity_report(&lift(base_change(kind, BasisKind::G, 12))?);
        ensure(r.unipotent && r.nonnegative, || format!("{kind}->G at size 12: {:?}", r.to_json()))?;
    }
    Ok("parity, strict monotonicity and S-positivity for n <= 12; SZ->G and CZ->G unipotent and nonnegative at size 12".into())
}
