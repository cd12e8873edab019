//! Chebyshev polynomials and the structure of generic variables for affine
//! quivers.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::candecomp::{CanonicalDecomposition, SummandKind};
use crate::ccmap::{cc_of_object, DecoratedRep, GenericEngine};
use crate::error::{Error, Result};
use crate::kronecker::{build_basis, BasisKind};
use crate::laurent::{bigint_to_json, LaurentPoly};
use crate::linalg::{solve_rational, Mat};
use crate::mutation::enumerate_cluster_variables;
use crate::quiver::{DimVector, Quiver};
use crate::repfq::{ext_dim, hom_dim, Field, Representation};
use crate::univariate::UnivariatePoly;

/// Normalized Chebyshev polynomial of the second kind:
/// `S_0 = 1`, `S_1 = x`, `S_{n+1} = x S_n - S_{n-1}`.
pub fn chebyshev_s(n: usize) -> UnivariatePoly {
    chebyshev(UnivariatePoly::constant(1), n)
}

/// Normalized Chebyshev polynomial of the first kind:
/// `F_0 = 2`, `F_1 = x`, `F_{n+1} = x F_n - F_{n-1}`.
pub fn chebyshev_f(n: usize) -> UnivariatePoly {
    chebyshev(UnivariatePoly::constant(2), n)
}

fn chebyshev(p0: UnivariatePoly, n: usize) -> UnivariatePoly {
    let x = UnivariatePoly::x();
    let (mut a, mut b) = (p0, x.clone());
    if n == 0 {
        return a;
    }
    for _ in 1..n {
        let c = &(&x * &b) - &a;
        a = b;
        b = c;
    }
    b
}

/// Terms of `S_n` as a sum of first-kind polynomials: `(j, 1)` stands for
/// `F_j`, and `(0, 1)` for the constant `1` (half of `F_0`).
pub fn s_in_f_terms(n: usize) -> Vec<(usize, i64)> {
    let mut out: Vec<(usize, i64)> = (0..=n / 2).map(|k| n - 2 * k).filter(|&j| j > 0).map(|j| (j, 1)).collect();
    if n.is_multiple_of(2) {
        out.push((0, 1));
    }
    out
}

/// Evaluates [`s_in_f_terms`].
pub fn s_from_f(n: usize) -> UnivariatePoly {
    s_in_f_terms(n).into_iter().fold(UnivariatePoly::zero(), |acc, (j, c)| {
        let term = if j == 0 { UnivariatePoly::constant(1) } else { chebyshev_f(j) };
        &acc + &term.scale(&BigInt::from(c))
    })
}

/// `p(t + t^{-1})` as a Laurent polynomial in one variable.
pub fn at_t_plus_inverse(p: &UnivariatePoly) -> LaurentPoly {
    let t = LaurentPoly::var(1, 0);
    let x = &t + &LaurentPoly::monomial(1, vec![-1], 1);
    LaurentPoly::substitute_univariate(p, &x)
}

/// Which half of the disjoint union `G(Q) = M(Q) ⊔ {X_delta^n X_E}` an
/// element lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureTag {
    ClusterMonomial,
    NonMonomial { delta_power: usize },
}

impl StructureTag {
    pub fn to_json(self) -> Value {
        match self {
            StructureTag::ClusterMonomial => json!({"kind": "cluster_monomial"}),
            StructureTag::NonMonomial { delta_power } => json!({"kind": "non_monomial", "delta_power": delta_power}),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineGeneric {
    pub d: DimVector,
    pub value: LaurentPoly,
    pub tag: StructureTag,
    pub decomposition: Option<CanonicalDecomposition>,
}

impl AffineGeneric {
    pub fn to_json(&self) -> Value {
        json!({
            "d": self.d.to_json(),
            "value": self.value.to_json(),
            "tag": self.tag.to_json(),
            "decomposition": self.decomposition.as_ref().map(CanonicalDecomposition::to_json),
        })
    }
}

/// `X_d` for an affine quiver assembled from its canonical decomposition:
/// `X_delta^n` times the generic variables of the real Schur summands and
/// the shift monomial.
pub fn generic_variable_affine(engine: &GenericEngine, d: &DimVector) -> Result<AffineGeneric> {
    let q = engine.quiver();
    let aff = q.require_affine()?;
    crate::error::check_len(q.vertex_count(), d.len())?;
    let n = q.vertex_count();
    let dp = d.positive_part();
    let shift: Vec<i64> = d.iter().map(|&x| (-x).max(0)).collect();
    let mut value = LaurentPoly::one(n);
    let mut delta_power = 0;
    let decomposition = if dp.is_zero() {
        None
    } else {
        let dec = engine.oracles().canonical_decomposition_affine(&dp)?;
        for s in &dec.summands {
            if s.kind == SummandKind::ImaginarySchur {
                if s.root != aff.delta {
                    return Err(Error::Consistency(format!(
                        "imaginary summand {} differs from delta {}",
                        s.root, aff.delta
                    )));
                }
                delta_power += s.multiplicity;
            }
            let x = engine.generic_module(&s.root)?.value;
            value = value.try_mul(&x.pow(s.multiplicity as u32))?;
        }
        Some(dec)
    };
    let value = value.shift(&shift)?;
    let tag = if delta_power == 0 {
        StructureTag::ClusterMonomial
    } else {
        StructureTag::NonMonomial { delta_power }
    };
    Ok(AffineGeneric {
        d: d.clone(),
        value,
        tag,
        decomposition,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularRigidReport {
    pub defects: Vec<i64>,
    pub self_ext: usize,
    pub regular: bool,
    pub rigid: bool,
}

impl RegularRigidReport {
    pub fn holds(&self) -> bool {
        self.regular && self.rigid
    }
}

/// Whether `M = ⊕ summands` is regular (every summand of defect zero) and
/// rigid. Each summand must be a brick, which certifies indecomposability.
pub fn regular_rigid_check(q: &Quiver, summands: &[Representation]) -> Result<RegularRigidReport> {
    let aff = q.require_affine()?;
    let mut m = Representation::zero(q, Field::Rational);
    let mut defects = Vec::with_capacity(summands.len());
    for s in summands {
        if hom_dim(s, s)? != 1 {
            return Err(Error::InvalidInput(format!("summand of dimension {} is not a brick", s.dim())));
        }
        defects.push(aff.defect(q, s.dim())?);
        m = m.direct_sum(s)?;
    }
    let self_ext = ext_dim(&m, &m)?;
    Ok(RegularRigidReport {
        regular: defects.iter().all(|&x| x == 0),
        rigid: self_ext == 0,
        defects,
        self_ext,
    })
}

/// Kronecker tube module of quasi-length `n` at `lambda`: arrows
/// `(I_n, lambda I_n + J_n)` with `J_n` a nilpotent Jordan block.
pub fn kronecker_tube_module(lambda: i64, n: usize) -> Representation {
    let k = Quiver::kronecker();
    let a = Mat::identity(n);
    let mut b = Mat::zeros(n, n);
    for i in 0..n {
        b.set(i, i, lambda);
        if i + 1 < n {
            b.set(i, i + 1, 1);
        }
    }
    Representation::new(&k, Field::Rational, DimVector::new(vec![n as i64; 2]), vec![a, b])
        .expect("tube module shapes match")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipReport {
    pub value: LaurentPoly,
    /// Nonzero coefficients on `G(K)` elements, keyed by denominator vector.
    pub coefficients: Vec<(DimVector, BigInt)>,
    pub basis_size: usize,
}

impl MembershipReport {
    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value.to_json(),
            "basis_size": self.basis_size,
            "coefficients": self.coefficients.iter().map(|(d, c)| json!({
                "den": d.to_json(),
                "coef": bigint_to_json(c),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Expands `X_M` for a Kronecker object in the generic basis elements whose
/// denominator vectors lie in a box around `den(X_M)`. Fails loudly when
/// the expansion does not exist or is not integral.
pub fn membership_check_a(obj: &DecoratedRep, pool: &[u64], budget: u64) -> Result<MembershipReport> {
    let k = Quiver::kronecker();
    if obj.module().quiver() != &k {
        return Err(Error::InvalidInput("membership check is implemented for the Kronecker quiver".into()));
    }
    let value = cc_of_object(obj, pool, budget)?;
    let den = value.denominator_vector()?;
    let r = den.iter().map(|x| x.abs()).max().unwrap_or(0).max(1);
    let lo = DimVector::new(vec![-r, -r]);
    let hi = DimVector::new(vec![r, r]);
    let table = enumerate_cluster_variables(&k, 2 * r as usize + 4)?;
    let basis = build_basis(BasisKind::G, r as usize, &lo, &hi, &table, pool)?;
    let elements: Vec<(&DimVector, &LaurentPoly)> = basis.elements().collect();

    let mut monomials: Vec<Vec<i64>> = value.terms().map(|(e, _)| e.clone()).collect();
    for (_, x) in &elements {
        monomials.extend(x.terms().map(|(e, _)| e.clone()));
    }
    monomials.sort();
    monomials.dedup();
    let columns: Vec<Vec<BigInt>> = elements
        .iter()
        .map(|(_, x)| monomials.iter().map(|e| x.coefficient(e)).collect())
        .collect();
    let target: Vec<BigInt> = monomials.iter().map(|e| value.coefficient(e)).collect();
    let solution = solve_rational(&columns, &target)?
        .ok_or_else(|| Error::Consistency(format!("X with denominator {den} is outside the span of G(K)")))?;
    let mut coefficients = Vec::new();
    for ((d, _), c) in elements.iter().zip(solution) {
        if !c.is_integer() {
            return Err(Error::Consistency(format!("non-integral coefficient {c} on the element of denominator {d}")));
        }
        if !c.is_zero() {
            coefficients.push(((*d).clone(), c.to_integer()));
        }
    }
    Ok(MembershipReport {
        value,
        coefficients,
        basis_size: elements.len(),
    })
}

/// `S_n(t + t^{-1}) = t^n + t^{n-2} + ... + t^{-n}`.
pub fn s_at_t_plus_inverse_expected(n: usize) -> LaurentPoly {
    let terms = (0..=n).map(|k| (vec![n as i64 - 2 * k as i64], BigInt::one()));
    LaurentPoly::from_terms(1, terms).expect("one variable")
}

/// `F_n(t + t^{-1}) = t^n + t^{-n}` (and `2` for `n = 0`).
pub fn f_at_t_plus_inverse_expected(n: usize) -> LaurentPoly {
    let n = n as i64;
    LaurentPoly::from_terms(1, vec![(vec![n], BigInt::one()), (vec![-n], BigInt::one())]).expect("one variable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;

    fn dv(v: &[i64]) -> DimVector {
        DimVector::from(v)
    }

    #[test]
    fn small_polynomials() {
        assert_eq!(chebyshev_s(0), UnivariatePoly::constant(1));
        assert_eq!(chebyshev_s(1), UnivariatePoly::x());
        assert_eq!(chebyshev_s(2), UnivariatePoly::from_i64(&[-1, 0, 1]));
        assert_eq!(chebyshev_f(0), UnivariatePoly::constant(2));
        assert_eq!(chebyshev_f(2), UnivariatePoly::from_i64(&[-2, 0, 1]));
        assert_eq!(chebyshev_s(3), UnivariatePoly::from_i64(&[0, -2, 0, 1]));
    }

    #[test]
    fn trigonometric_forms() {
        assert_eq!(at_t_plus_inverse(&chebyshev_s(5)), s_at_t_plus_inverse_expected(5));
        for n in 0..=10 {
            assert_eq!(at_t_plus_inverse(&chebyshev_f(n)), f_at_t_plus_inverse_expected(n));
        }
    }

    #[test]
    fn first_and_second_kind() {
        for n in 2..=12 {
            assert_eq!(chebyshev_f(n), &chebyshev_s(n) - &chebyshev_s(n - 2));
        }
        for n in 0..=20 {
            assert_eq!(s_from_f(n), chebyshev_s(n), "n = {n}");
        }
        assert_eq!(s_in_f_terms(4), vec![(4, 1), (2, 1), (0, 1)]);
        assert_eq!(s_in_f_terms(3), vec![(3, 1), (1, 1)]);
    }

    #[test]
    fn kronecker_structural_route() {
        let k = Quiver::kronecker();
        let g = GenericEngine::new(&k, &Config::with_seed(11));
        let z = g.generic_variable(&dv(&[1, 1])).unwrap().value;
        for n in 1..=3 {
            let a = generic_variable_affine(&g, &dv(&[n, n])).unwrap();
            assert_eq!(a.value, z.pow(n as u32));
            assert_eq!(a.tag, StructureTag::NonMonomial { delta_power: n as usize });
        }
        let a = generic_variable_affine(&g, &dv(&[2, 1])).unwrap();
        assert_eq!(a.tag, StructureTag::ClusterMonomial);
        let table = enumerate_cluster_variables(&k, 4).unwrap();
        assert_eq!(table.get(&dv(&[2, 1])).unwrap().variable, a.value);
        let b = generic_variable_affine(&g, &dv(&[-1, 2])).unwrap();
        assert_eq!(b.value, g.generic_variable(&dv(&[-1, 2])).unwrap().value);
    }

    #[test]
    fn regular_rigid_examples() {
        let k = Quiver::kronecker();
        let qs = kronecker_tube_module(2, 1);
        assert!(!regular_rigid_check(&k, &[qs]).unwrap().holds());
        let m = Representation::new(
            &k,
            Field::Rational,
            dv(&[2, 1]),
            vec![Mat::from_rows(1, 2, vec![1, 0]).unwrap(), Mat::from_rows(1, 2, vec![0, 1]).unwrap()],
        )
        .unwrap();
        let r = regular_rigid_check(&k, &[m]).unwrap();
        assert!(r.rigid && !r.regular);
        assert_eq!(r.defects, vec![1]);

        let a2 = Quiver::affine_a2();
        let e = Representation::simple(&a2, 1, Field::Rational);
        assert!(regular_rigid_check(&a2, &[e]).unwrap().holds());
    }

    #[test]
    fn exceptional_tube_route_on_a2() {
        let q = Quiver::affine_a2();
        let g = GenericEngine::new(&q, &Config::with_seed(4));
        let a = generic_variable_affine(&g, &dv(&[1, 2, 1])).unwrap();
        assert_eq!(a.tag, StructureTag::NonMonomial { delta_power: 1 });
        assert_eq!(a.value, g.generic_variable(&dv(&[1, 2, 1])).unwrap().value);
    }

    #[test]
    fn tube_modules_expand_in_chebyshev_form() {
        let pool = crate::config::default_prime_pool();
        let expected = [vec![((1, 1), 1)], vec![((0, 0), -1), ((2, 2), 1)], vec![((1, 1), -2), ((3, 3), 1)]];
        for (n, want) in (1..=3).zip(expected) {
            let obj = DecoratedRep::from_module(kronecker_tube_module(3, n)).unwrap();
            let r = membership_check_a(&obj, &pool, 10_000_000).unwrap();
            let got: Vec<((i64, i64), i64)> = r
                .coefficients
                .iter()
                .map(|(d, c)| ((d[0], d[1]), i64::try_from(c).unwrap()))
                .collect();
            assert_eq!(got, want, "n = {n}");
            let z = crate::kronecker::z();
            let s = LaurentPoly::substitute_univariate(&chebyshev_s(n), &z);
            assert_eq!(r.value, s);
        }
    }
}
