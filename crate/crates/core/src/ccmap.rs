//! The Caldero-Chapoton map and generic variables `X_d`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::candecomp::{CanonicalDecomposition, Oracles};
use crate::config::Config;
use crate::error::{check_len, Error, Result};
use crate::laurent::LaurentPoly;
use crate::quiver::{DimVector, Quiver, QuiverType};
use crate::repfq::{
    count_subreps, ext_dim, grassmannian_table_filtered, hom_dim, random_integer_representation, Field,
    Representation,
};

/// Object of the cluster category: a module plus shifted projectives
/// `P_i[1]` with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoratedRep {
    module: Representation,
    shifts: Vec<u64>,
}

impl DecoratedRep {
    pub fn new(module: Representation, shifts: Vec<u64>) -> Result<Self> {
        check_len(module.quiver().vertex_count(), shifts.len())?;
        if module.field() != Field::Rational {
            return Err(Error::InvalidInput("decorated representations use integer matrices".into()));
        }
        Ok(Self { module, shifts })
    }

    pub fn from_module(module: Representation) -> Result<Self> {
        let n = module.quiver().vertex_count();
        Self::new(module, vec![0; n])
    }

    /// `P_i[1]`.
    pub fn shifted_projective(q: &Quiver, i: usize) -> Self {
        let mut shifts = vec![0; q.vertex_count()];
        shifts[i] = 1;
        Self {
            module: Representation::zero(q, Field::Rational),
            shifts,
        }
    }

    pub fn module(&self) -> &Representation {
        &self.module
    }

    pub fn shifts(&self) -> &[u64] {
        &self.shifts
    }

    /// `dim M - sum_i m_i alpha_i`.
    pub fn dim_cluster(&self) -> DimVector {
        let d = self.module.dim();
        DimVector::new(d.iter().zip(&self.shifts).map(|(&x, &m)| x - m as i64).collect())
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let module = self.module.direct_sum(&other.module)?;
        let shifts = self.shifts.iter().zip(&other.shifts).map(|(a, b)| a + b).collect();
        Self::new(module, shifts)
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.module.to_json();
        v["shifts"] = json!(self.shifts);
        v
    }

    pub fn from_json(q: &Quiver, v: &Value) -> Result<Self> {
        let module = Representation::from_json(q, v)?;
        let shifts = match v.get("shifts") {
            None => vec![0; q.vertex_count()],
            Some(s) => s
                .as_array()
                .ok_or_else(|| Error::InvalidInput("\"shifts\" must be an array".into()))?
                .iter()
                .map(|x| x.as_u64().ok_or_else(|| Error::InvalidInput("shift multiplicities are nonnegative".into())))
                .collect::<Result<_>>()?,
        };
        Self::new(module, shifts)
    }
}

/// Exponent of `u` attached to a submodule of dimension `e` in `M` of
/// dimension `d`: `-<e, alpha_i> - <alpha_i, d - e>` at vertex `i`.
pub fn cc_exponent(q: &Quiver, d: &DimVector, e: &DimVector) -> Result<Vec<i64>> {
    let n = q.vertex_count();
    let rest = d - e;
    (0..n)
        .map(|i| {
            let a = DimVector::simple(n, i);
            Ok(-q.euler_form(e, &a)? - q.euler_form(&a, &rest)?)
        })
        .collect()
}

/// `X_M` for an integer representation, with an extra per-prime check that
/// a reduction is structurally faithful.
fn cc_filtered<F>(m: &Representation, pool: &[u64], budget: u64, filter: F) -> Result<LaurentPoly>
where
    F: Fn(u64) -> Result<bool>,
{
    let q = m.quiver();
    let n = q.vertex_count();
    if m.is_zero() {
        return Ok(LaurentPoly::one(n));
    }
    let table = grassmannian_table_filtered(m, pool, budget, filter)?;
    let mut terms = Vec::new();
    for (e, poly) in &table.polynomials {
        let chi = poly.euler_characteristic();
        if !chi.is_zero() {
            terms.push((cc_exponent(q, m.dim(), e)?, chi));
        }
    }
    LaurentPoly::from_terms(n, terms)
}

/// `X_M = sum_e chi(Gr_e(M)) prod_i u_i^{-<e, alpha_i> - <alpha_i, d - e>}`.
pub fn cc_of_module(m: &Representation, pool: &[u64], budget: u64) -> Result<LaurentPoly> {
    if m.field() != Field::Rational {
        return Err(Error::InvalidInput("the CC map needs an integer representation".into()));
    }
    cc_filtered(m, pool, budget, |_| Ok(true))
}

/// `X` of a decorated representation: `X_{H^0} * prod_i u_i^{m_i}`.
pub fn cc_of_object(obj: &DecoratedRep, pool: &[u64], budget: u64) -> Result<LaurentPoly> {
    let x = cc_of_module(&obj.module, pool, budget)?;
    let shift: Vec<i64> = obj.shifts.iter().map(|&m| m as i64).collect();
    x.shift(&shift)
}

/// A generic value `X_{[d]_+}` with the data that certifies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericModulePart {
    pub value: LaurentPoly,
    pub decomposition: CanonicalDecomposition,
    /// Accepted samples, all giving `value`.
    pub samples: Vec<Representation>,
    pub end_dim: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericVariable {
    pub d: DimVector,
    pub value: LaurentPoly,
    pub module_part: Option<GenericModulePart>,
}

impl GenericVariable {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "d": self.d.to_json(),
            "value": self.value.to_json(),
            "den": self.value.denominator_vector().map(|x| x.to_json()).unwrap_or(Value::Null),
        });
        if let Some(m) = &self.module_part {
            v["certificate"] = json!({
                "decomposition": m.decomposition.to_json(),
                "generic_end_dim": m.end_dim,
                "accepted_samples": m.samples.iter().map(Representation::to_json).collect::<Vec<_>>(),
            });
        }
        v
    }
}

/// Computes and caches certified generic variables over one quiver.
#[derive(Debug)]
pub struct GenericEngine {
    oracles: Oracles,
    cache: Mutex<HashMap<DimVector, GenericModulePart>>,
}

/// Entry bound for integer sample matrices.
const ENTRY_BOUND: i64 = 3;

impl GenericEngine {
    pub fn new(q: &Quiver, config: &Config) -> Self {
        Self {
            oracles: Oracles::new(q, config),
            cache: Mutex::default(),
        }
    }

    pub fn oracles(&self) -> &Oracles {
        &self.oracles
    }

    pub fn quiver(&self) -> &Quiver {
        self.oracles.quiver()
    }

    pub fn config(&self) -> &Config {
        self.oracles.config()
    }

    /// `X_d = X_{[d]_+} * prod_{d_i < 0} u_i^{-d_i}`.
    pub fn generic_variable(&self, d: &DimVector) -> Result<GenericVariable> {
        let q = self.quiver();
        check_len(q.vertex_count(), d.len())?;
        let dp = d.positive_part();
        let shift: Vec<i64> = d.iter().map(|&x| (-x).max(0)).collect();
        let (base, module_part) = if dp.is_zero() {
            (LaurentPoly::one(q.vertex_count()), None)
        } else {
            let part = self.generic_module(&dp)?;
            (part.value.clone(), Some(part))
        };
        let value = base.shift(&shift)?;
        let den = value.denominator_vector()?;
        if &den != d {
            return Err(Error::Consistency(format!("generic variable of {d} has denominator {den}")));
        }
        Ok(GenericVariable {
            d: d.clone(),
            value,
            module_part,
        })
    }

    /// Certified generic value `X_d` for `d >= 0`.
    pub fn generic_module(&self, d: &DimVector) -> Result<GenericModulePart> {
        if let Some(p) = self.cache.lock().expect("cache lock").get(d) {
            return Ok(p.clone());
        }
        let part = self.generic_module_uncached(d)?;
        self.cache.lock().expect("cache lock").insert(d.clone(), part.clone());
        Ok(part)
    }

    fn generic_module_uncached(&self, d: &DimVector) -> Result<GenericModulePart> {
        let q = self.quiver();
        let cfg = self.config();
        let decomposition = self.oracles.decompose(d)?;
        let end_dim = decomposition.generic_end_dim(q)?;
        let roots = decomposition.roots();
        let seeds = cfg.seeds().named("generic").keyed(d.as_slice());
        let mut accepted: Vec<(Representation, LaurentPoly)> = Vec::new();
        for attempt in 0..cfg.budgets.retry_limit {
            if accepted.len() == cfg.budgets.agreement {
                break;
            }
            let base = seeds.child(attempt as u64);
            let mut m = Representation::zero(q, Field::Rational);
            let mut homogeneous = Vec::new();
            let mut ok = true;
            for (i, r) in roots.iter().enumerate() {
                match self.sample_summand(r, base.child(i as u64))? {
                    Some(s) => {
                        if self.needs_homogeneity(r) {
                            homogeneous.push(s.clone());
                        }
                        m = m.direct_sum(&s)?;
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok || hom_dim(&m, &m)? as i64 != end_dim {
                continue;
            }
            let filter = |p: u64| -> Result<bool> {
                for s in &homogeneous {
                    if !self.is_homogeneous(&s.reduce_mod(p)?)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            };
            let x = cc_filtered(&m, &cfg.prime_pool, cfg.budgets.enumeration_cap, filter)?;
            if let Some((_, first)) = accepted.first() {
                if *first != x {
                    return Err(Error::Consistency(format!(
                        "accepted generic samples of dimension {d} disagree on X"
                    )));
                }
            }
            accepted.push((m, x));
        }
        if accepted.len() < cfg.budgets.agreement {
            return Err(Error::Certification(format!(
                "only {} of {} generic samples of dimension {d} were accepted",
                accepted.len(),
                cfg.budgets.agreement
            )));
        }
        let value = accepted[0].1.clone();
        Ok(GenericModulePart {
            value,
            decomposition,
            samples: accepted.into_iter().map(|(m, _)| m).collect(),
            end_dim,
        })
    }

    /// Integer Schur representation of dimension `r` (rigid when `r` is real,
    /// in a homogeneous tube when `r` is the affine `delta`).
    fn sample_summand(&self, r: &DimVector, seed: crate::config::SeedTree) -> Result<Option<Representation>> {
        let q = self.quiver();
        let real = q.tits_norm(r)? == 1;
        let mut rng = seed.rng();
        for _ in 0..self.config().budgets.summand_attempts {
            let m = random_integer_representation(q, r, ENTRY_BOUND, &mut rng)?;
            if hom_dim(&m, &m)? != 1 {
                continue;
            }
            if real && ext_dim(&m, &m)? != 0 {
                continue;
            }
            if self.needs_homogeneity(r) {
                let p = self.config().budgets.oracle_primes[0];
                if !self.is_homogeneous(&m.reduce_mod(p)?)? {
                    continue;
                }
            }
            return Ok(Some(m));
        }
        Ok(None)
    }

    fn needs_homogeneity(&self, r: &DimVector) -> bool {
        self.quiver().quiver_type() == QuiverType::Affine
            && self.quiver().affine_data().ok().flatten().is_some_and(|a| &a.delta == r)
    }

    /// A `delta`-dimensional brick lies in a homogeneous tube iff it has no
    /// proper nonzero subrepresentation of defect zero.
    fn is_homogeneous(&self, m: &Representation) -> Result<bool> {
        let q = self.quiver();
        let aff = q.require_affine()?;
        let zero = DimVector::zero(q.vertex_count());
        for e in DimVector::boxed(&zero, m.dim()) {
            if e.is_zero() || &e == m.dim() || aff.defect(q, &e)? != 0 {
                continue;
            }
            if count_subreps(m, &e, self.config().budgets.enumeration_cap)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;

    fn dv(v: &[i64]) -> DimVector {
        DimVector::from(v)
    }

    fn z() -> LaurentPoly {
        LaurentPoly::from_terms(2, vec![(vec![-1, -1], 1.into()), (vec![1, -1], 1.into()), (vec![-1, 1], 1.into())])
            .unwrap()
    }

    fn pool() -> Vec<u64> {
        crate::config::default_prime_pool()
    }

    fn kron_pair(a: i64, b: i64) -> Representation {
        let k = Quiver::kronecker();
        Representation::new(
            &k,
            Field::Rational,
            dv(&[1, 1]),
            vec![Mat::from_rows(1, 1, vec![a]).unwrap(), Mat::from_rows(1, 1, vec![b]).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn zero_module_gives_one() {
        let k = Quiver::kronecker();
        let x = cc_of_module(&Representation::zero(&k, Field::Rational), &pool(), 1000).unwrap();
        assert_eq!(x, LaurentPoly::one(2));
    }

    #[test]
    fn simple_at_sink_has_two_terms() {
        let a2 = Quiver::linear_a(2);
        let s = Representation::simple(&a2, 1, Field::Rational);
        let x = cc_of_module(&s, &pool(), 1000).unwrap();
        assert_eq!(x.len(), 2);
        let expected = LaurentPoly::from_terms(2, vec![(vec![0, -1], 1.into()), (vec![1, -1], 1.into())]).unwrap();
        assert_eq!(x, expected);
    }

    #[test]
    fn quasi_simples_give_z() {
        for (a, b) in [(1, 1), (1, 2), (2, -3), (0, 1)] {
            assert_eq!(cc_of_module(&kron_pair(a, b), &pool(), 100_000).unwrap(), z());
        }
    }

    #[test]
    fn shifts_and_sums() {
        let a1 = Quiver::new(1, vec![]).unwrap();
        let p = DecoratedRep::shifted_projective(&a1, 0);
        assert_eq!(cc_of_object(&p, &pool(), 10).unwrap(), LaurentPoly::var(1, 0));
        let s = DecoratedRep::from_module(Representation::simple(&a1, 0, Field::Rational)).unwrap();
        let both = s.direct_sum(&p).unwrap();
        assert!(both.dim_cluster().is_zero());
        let xs = cc_of_object(&s, &pool(), 10).unwrap();
        let x = cc_of_object(&both, &pool(), 10).unwrap();
        assert_eq!(x, &xs * &LaurentPoly::var(1, 0));
        assert_ne!(x, LaurentPoly::one(1));

        let m = kron_pair(1, 2);
        let n = Representation::simple(&Quiver::kronecker(), 0, Field::Rational);
        let xm = cc_of_module(&m, &pool(), 100_000).unwrap();
        let xn = cc_of_module(&n, &pool(), 100_000).unwrap();
        assert_eq!(cc_of_module(&m.direct_sum(&n).unwrap(), &pool(), 100_000).unwrap(), &xm * &xn);
    }

    #[test]
    fn generic_examples() {
        let k = Quiver::kronecker();
        let g = GenericEngine::new(&k, &Config::with_seed(1));
        assert_eq!(g.generic_variable(&dv(&[-1, 0])).unwrap().value, LaurentPoly::var(2, 0));
        assert_eq!(g.generic_variable(&dv(&[1, 1])).unwrap().value, z());
        let two = g.generic_variable(&dv(&[2, 2])).unwrap();
        assert_eq!(two.value, &z() * &z());
        assert_eq!(two.module_part.unwrap().samples.len(), 3);
    }

    #[test]
    fn rigid_modules_match_generic_variables() {
        let k = Quiver::kronecker();
        let g = GenericEngine::new(&k, &Config::with_seed(2));
        let m = Representation::new(
            &k,
            Field::Rational,
            dv(&[2, 1]),
            vec![Mat::from_rows(1, 2, vec![1, 0]).unwrap(), Mat::from_rows(1, 2, vec![0, 1]).unwrap()],
        )
        .unwrap();
        let x = cc_of_module(&m, &pool(), 100_000).unwrap();
        assert_eq!(x, g.generic_variable(&dv(&[2, 1])).unwrap().value);
        assert_eq!(x.denominator_vector().unwrap(), dv(&[2, 1]));
    }

    #[test]
    fn exceptional_tube_decomposition_on_a2() {
        let q = Quiver::affine_a2();
        let g = GenericEngine::new(&q, &Config::with_seed(5));
        let x = g.generic_variable(&dv(&[1, 2, 1])).unwrap().value;
        let xd = g.generic_variable(&dv(&[1, 1, 1])).unwrap().value;
        let xe = g.generic_variable(&dv(&[0, 1, 0])).unwrap().value;
        assert_eq!(x, &xd * &xe);
    }
}
