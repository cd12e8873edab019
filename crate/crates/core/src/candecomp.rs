//! Schur roots, generic Ext vanishing and Kac's canonical decomposition.
//!
//! The oracles sample representations over `F_p`. A positive answer comes
//! with a witness whose integer lift is re-checked over `Q` (upper
//! semicontinuity makes any witness sufficient); negatives are confirmed by
//! exhaustive search over `F_2` when that search is small.

use std::collections::HashMap;
use std::sync::Mutex;

use serde_json::{json, Value};

use crate::config::{Config, SeedTree};
use crate::error::{check_len, Error, Result};
use crate::linalg::Mat;
use crate::quiver::{DimVector, Quiver, QuiverType};
use crate::repfq::{ext_dim, hom_dim, sample_representation, Field, Representation};

/// Largest `F_2` search space confirmed exhaustively.
const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleAnswer {
    pub value: bool,
    /// Integer representations proving a positive answer.
    pub witness: Vec<Representation>,
    /// A negative answer confirmed by enumerating every `F_2` point.
    pub exhaustive: bool,
}

impl OracleAnswer {
    fn no(exhaustive: bool) -> Self {
        Self {
            value: false,
            witness: Vec::new(),
            exhaustive,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value,
            "witness": self.witness.iter().map(Representation::to_json).collect::<Vec<_>>(),
            "exhaustive_f2": self.exhaustive,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SummandKind {
    RealSchur,
    ImaginarySchur,
}

impl SummandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SummandKind::RealSchur => "real_schur",
            SummandKind::ImaginarySchur => "imaginary_schur",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Summand {
    pub root: DimVector,
    pub multiplicity: usize,
    pub kind: SummandKind,
}

/// Witness representations, one per summand copy, that are Schur and
/// pairwise Ext-orthogonal over `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionCertificate {
    pub witnesses: Vec<Representation>,
}

impl DecompositionCertificate {
    /// Re-checks the certificate exactly over `Q`.
    pub fn verify(&self, d: &DimVector) -> Result<bool> {
        let total = self
            .witnesses
            .iter()
            .fold(DimVector::zero(d.len()), |acc, m| &acc + m.dim());
        if &total != d {
            return Ok(false);
        }
        for (i, m) in self.witnesses.iter().enumerate() {
            if m.field() != Field::Rational || hom_dim(m, m)? != 1 {
                return Ok(false);
            }
            for (j, n) in self.witnesses.iter().enumerate() {
                if i != j && ext_dim(m, n)? != 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> Value {
        json!({ "witnesses": self.witnesses.iter().map(Representation::to_json).collect::<Vec<_>>() })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalDecomposition {
    pub dim: DimVector,
    /// Sorted by root.
    pub summands: Vec<Summand>,
    pub certificate: DecompositionCertificate,
}

impl CanonicalDecomposition {
    /// Summand roots with multiplicity expanded.
    pub fn roots(&self) -> Vec<DimVector> {
        self.summands
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.root.clone(), s.multiplicity))
            .collect()
    }

    /// `dim End` of a generic representation: one per summand plus the
    /// Euler form between distinct summands.
    pub fn generic_end_dim(&self, q: &Quiver) -> Result<i64> {
        let roots = self.roots();
        let mut total = roots.len() as i64;
        for (i, a) in roots.iter().enumerate() {
            for (j, b) in roots.iter().enumerate() {
                if i != j {
                    total += q.euler_form(a, b)?;
                }
            }
        }
        Ok(total)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim.to_json(),
            "summands": self.summands.iter().map(|s| json!({
                "root": s.root.to_json(),
                "multiplicity": s.multiplicity,
                "kind": s.kind.as_str(),
            })).collect::<Vec<_>>(),
            "certificate": self.certificate.to_json(),
        })
    }
}

/// Sampling oracles over one quiver, memoized by dimension vector.
#[derive(Debug)]
pub struct Oracles {
    quiver: Quiver,
    config: Config,
    schur: Mutex<HashMap<DimVector, OracleAnswer>>,
    ext: Mutex<HashMap<(DimVector, DimVector), OracleAnswer>>,
    decomp: Mutex<HashMap<DimVector, Vec<DimVector>>>,
}

impl Oracles {
    pub fn new(quiver: &Quiver, config: &Config) -> Self {
        Self {
            quiver: quiver.clone(),
            config: config.clone(),
            schur: Mutex::default(),
            ext: Mutex::default(),
            decomp: Mutex::default(),
        }
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    fn seeds(&self, label: &str) -> SeedTree {
        self.config.seeds().named(label)
    }

    fn check_nonnegative(&self, d: &DimVector) -> Result<()> {
        check_len(self.quiver.vertex_count(), d.len())?;
        if !d.is_nonnegative() {
            return Err(Error::InvalidInput(format!("{d} has negative entries")));
        }
        Ok(())
    }

    /// Whether `d` admits a representation with trivial endomorphisms.
    pub fn is_schur_root(&self, d: &DimVector) -> Result<OracleAnswer> {
        self.check_nonnegative(d)?;
        if d.is_zero() {
            return Ok(OracleAnswer::no(true));
        }
        if let Some(a) = self.schur.lock().expect("cache lock").get(d) {
            return Ok(a.clone());
        }
        let answer = self.schur_uncached(d)?;
        self.schur.lock().expect("cache lock").insert(d.clone(), answer.clone());
        Ok(answer)
    }

    fn schur_uncached(&self, d: &DimVector) -> Result<OracleAnswer> {
        let q = &self.quiver;
        // Schur roots are roots
        if q.tits_norm(d)? > 1 {
            return Ok(OracleAnswer::no(false));
        }
        let seeds = self.seeds("schur").keyed(d.as_slice());
        for &p in &self.config.budgets.oracle_primes {
            for s in 0..self.config.budgets.oracle_samples {
                let m = sample_representation(q, d, p, seeds.child(p).child(s as u64).value())?;
                if hom_dim(&m, &m)? == 1 {
                    let lift = lift(&m)?;
                    if hom_dim(&lift, &lift)? == 1 {
                        return Ok(OracleAnswer {
                            value: true,
                            witness: vec![lift],
                            exhaustive: false,
                        });
                    }
                }
            }
        }
        let Some(space) = f2_space(q, &[d]) else {
            return Ok(OracleAnswer::no(false));
        };
        for bits in 0..space {
            let m = f2_representation(q, d, bits)?;
            if hom_dim(&m, &m)? == 1 {
                let lift = lift(&m)?;
                if hom_dim(&lift, &lift)? == 1 {
                    return Ok(OracleAnswer {
                        value: true,
                        witness: vec![lift],
                        exhaustive: false,
                    });
                }
            }
        }
        Ok(OracleAnswer::no(true))
    }

    /// Whether `Ext^1(M, N) = 0` for generic `M` of dimension `d` and `N` of
    /// dimension `e`.
    pub fn generic_ext_vanishes(&self, d: &DimVector, e: &DimVector) -> Result<OracleAnswer> {
        self.check_nonnegative(d)?;
        self.check_nonnegative(e)?;
        if d.is_zero() || e.is_zero() {
            return Ok(OracleAnswer {
                value: true,
                witness: Vec::new(),
                exhaustive: false,
            });
        }
        let key = (d.clone(), e.clone());
        if let Some(a) = self.ext.lock().expect("cache lock").get(&key) {
            return Ok(a.clone());
        }
        let answer = self.ext_uncached(d, e)?;
        self.ext.lock().expect("cache lock").insert(key, answer.clone());
        Ok(answer)
    }

    fn ext_uncached(&self, d: &DimVector, e: &DimVector) -> Result<OracleAnswer> {
        let q = &self.quiver;
        // ext >= -<d, e>
        if q.euler_form(d, e)? < 0 {
            return Ok(OracleAnswer::no(false));
        }
        let seeds = self.seeds("ext").keyed(d.as_slice()).named("|").keyed(e.as_slice());
        for &p in &self.config.budgets.oracle_primes {
            for s in 0..self.config.budgets.oracle_samples {
                let base = seeds.child(p).child(s as u64);
                let m = sample_representation(q, d, p, base.child(0).value())?;
                let n = sample_representation(q, e, p, base.child(1).value())?;
                if ext_dim(&m, &n)? == 0 {
                    let (ml, nl) = (lift(&m)?, lift(&n)?);
                    if ext_dim(&ml, &nl)? == 0 {
                        return Ok(OracleAnswer {
                            value: true,
                            witness: vec![ml, nl],
                            exhaustive: false,
                        });
                    }
                }
            }
        }
        let Some(space) = f2_space(q, &[d, e]) else {
            return Ok(OracleAnswer::no(false));
        };
        let shift = f2_bits(q, d);
        for bits in 0..space {
            let m = f2_representation(q, d, bits & ((1 << shift) - 1))?;
            let n = f2_representation(q, e, bits >> shift)?;
            if ext_dim(&m, &n)? == 0 {
                let (ml, nl) = (lift(&m)?, lift(&n)?);
                if ext_dim(&ml, &nl)? == 0 {
                    return Ok(OracleAnswer {
                        value: true,
                        witness: vec![ml, nl],
                        exhaustive: false,
                    });
                }
            }
        }
        Ok(OracleAnswer::no(true))
    }

    /// Generic vanishing of `Ext^1` between the cluster-category objects of
    /// integer vectors `d` and `e`: no vertex where one is a shifted
    /// projective and the other has a module part, plus module-level
    /// vanishing in both directions.
    pub fn generic_ext_vanishes_cluster(&self, d: &DimVector, e: &DimVector) -> Result<bool> {
        check_len(self.quiver.vertex_count(), d.len())?;
        check_len(self.quiver.vertex_count(), e.len())?;
        let clash = d.iter().zip(e.iter()).any(|(&a, &b)| (a < 0 && b > 0) || (b < 0 && a > 0));
        if clash {
            return Ok(false);
        }
        let (dp, ep) = (d.positive_part(), e.positive_part());
        Ok(self.generic_ext_vanishes(&dp, &ep)?.value && self.generic_ext_vanishes(&ep, &dp)?.value)
    }

    /// Kac's canonical decomposition by recursive splitting.
    pub fn canonical_decomposition(&self, d: &DimVector) -> Result<CanonicalDecomposition> {
        self.check_nonnegative(d)?;
        let roots = self.split_general(d)?;
        self.finish(d, roots)
    }

    /// Affine quivers: strip as many copies of `delta` as possible and
    /// decompose the regular remainder, then certify.
    pub fn canonical_decomposition_affine(&self, d: &DimVector) -> Result<CanonicalDecomposition> {
        self.check_nonnegative(d)?;
        let q = &self.quiver;
        let aff = q.require_affine()?;
        let delta = &aff.delta;
        let kmax = (0..d.len()).map(|i| d[i] / delta[i]).min().unwrap_or(0);
        for k in (0..=kmax).rev() {
            let rest = d - &delta.scale(k);
            let mut roots = self.split_general(&rest)?;
            if k > 0 {
                let mut regular = true;
                for r in &roots {
                    if aff.defect(q, r)? != 0 {
                        regular = false;
                    }
                }
                if !regular {
                    continue;
                }
            }
            roots.extend(std::iter::repeat_n(delta.clone(), k as usize));
            match self.finish(d, roots) {
                Ok(c) => return Ok(c),
                Err(Error::Certification(_)) if k > 0 => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::SearchExhausted(format!("no certified decomposition of {d}")))
    }

    /// Dispatches to the affine fast path when the quiver is affine.
    pub fn decompose(&self, d: &DimVector) -> Result<CanonicalDecomposition> {
        if self.quiver.quiver_type() == QuiverType::Affine {
            self.canonical_decomposition_affine(d)
        } else {
            self.canonical_decomposition(d)
        }
    }

    fn split_general(&self, d: &DimVector) -> Result<Vec<DimVector>> {
        if d.is_zero() {
            return Ok(Vec::new());
        }
        if let Some(r) = self.decomp.lock().expect("cache lock").get(d) {
            return Ok(r.clone());
        }
        let roots = if self.is_schur_root(d)?.value {
            vec![d.clone()]
        } else {
            let mut parts: Vec<DimVector> = DimVector::boxed(&DimVector::zero(d.len()), d)
                .into_iter()
                .filter(|a| !a.is_zero() && a != d)
                .filter(|a| {
                    let b = d - a;
                    (a.height(), a) <= (b.height(), &b)
                })
                .collect();
            parts.sort_by(|a, b| (a.height(), a).cmp(&(b.height(), b)));
            let mut found = None;
            for a in parts {
                let b = d - &a;
                if self.generic_ext_vanishes(&a, &b)?.value && self.generic_ext_vanishes(&b, &a)?.value {
                    let mut r = self.split_general(&a)?;
                    r.extend(self.split_general(&b)?);
                    found = Some(r);
                    break;
                }
            }
            found.ok_or_else(|| {
                Error::SearchExhausted(format!("{d} is not Schur and no Ext-orthogonal splitting was found"))
            })?
        };
        self.decomp.lock().expect("cache lock").insert(d.clone(), roots.clone());
        Ok(roots)
    }

    fn finish(&self, d: &DimVector, mut roots: Vec<DimVector>) -> Result<CanonicalDecomposition> {
        let q = &self.quiver;
        roots.sort();
        let mut summands: Vec<Summand> = Vec::new();
        for r in &roots {
            match summands.last_mut() {
                Some(s) if &s.root == r => s.multiplicity += 1,
                _ => summands.push(Summand {
                    root: r.clone(),
                    multiplicity: 1,
                    kind: if q.tits_norm(r)? == 1 {
                        SummandKind::RealSchur
                    } else {
                        SummandKind::ImaginarySchur
                    },
                }),
            }
        }
        let certificate = self.certify(d, &roots)?;
        Ok(CanonicalDecomposition {
            dim: d.clone(),
            summands,
            certificate,
        })
    }

    /// Samples one representation per summand copy until all are Schur and
    /// pairwise Ext-orthogonal, first over `F_p` and then over `Q`.
    fn certify(&self, d: &DimVector, roots: &[DimVector]) -> Result<DecompositionCertificate> {
        let q = &self.quiver;
        let seeds = self.seeds("certificate").keyed(d.as_slice());
        let primes = &self.config.budgets.oracle_primes;
        for attempt in 0..self.config.budgets.summand_attempts {
            let p = primes[attempt % primes.len()];
            let base = seeds.child(attempt as u64);
            let reps: Vec<Representation> = roots
                .iter()
                .enumerate()
                .map(|(i, r)| sample_representation(q, r, p, base.child(i as u64).value()))
                .collect::<Result<_>>()?;
            if !pairwise_ok(&reps)? {
                continue;
            }
            let lifted = DecompositionCertificate {
                witnesses: reps.iter().map(lift).collect::<Result<_>>()?,
            };
            if lifted.verify(d)? {
                return Ok(lifted);
            }
        }
        Err(Error::Certification(format!(
            "no pairwise Ext-orthogonal Schur witnesses for the decomposition of {d}"
        )))
    }
}

fn pairwise_ok(reps: &[Representation]) -> Result<bool> {
    for (i, m) in reps.iter().enumerate() {
        if hom_dim(m, m)? != 1 {
            return Ok(false);
        }
        for (j, n) in reps.iter().enumerate() {
            if i != j && ext_dim(m, n)? != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Integer lift of an `F_p` representation (entries in `[0, p)`).
fn lift(m: &Representation) -> Result<Representation> {
    Representation::new(m.quiver(), Field::Rational, m.dim().clone(), m.maps().to_vec())
}

fn f2_bits(q: &Quiver, d: &DimVector) -> u32 {
    q.arrows().iter().map(|&(s, t)| (d[s] * d[t]) as u32).sum()
}

fn f2_space(q: &Quiver, dims: &[&DimVector]) -> Option<u64> {
    let bits: u32 = dims.iter().map(|d| f2_bits(q, d)).sum();
    (bits < 63 && (1u64 << bits) <= EXHAUSTIVE_LIMIT).then(|| 1u64 << bits)
}

fn f2_representation(q: &Quiver, d: &DimVector, mut bits: u64) -> Result<Representation> {
    let maps = q
        .arrows()
        .iter()
        .map(|&(s, t)| {
            let (r, c) = (d[t] as usize, d[s] as usize);
            let data = (0..r * c)
                .map(|_| {
                    let b = (bits & 1) as i64;
                    bits >>= 1;
                    b
                })
                .collect();
            Mat::from_rows(r, c, data)
        })
        .collect::<Result<_>>()?;
    Representation::new(q, Field::Prime(2), d.clone(), maps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[i64]) -> DimVector {
        DimVector::from(v)
    }

    fn kron() -> Oracles {
        Oracles::new(&Quiver::kronecker(), &Config::with_seed(7))
    }

    #[test]
    fn schur_examples() {
        let o = kron();
        assert!(o.is_schur_root(&dv(&[1, 0])).unwrap().value);
        let delta = o.is_schur_root(&dv(&[1, 1])).unwrap();
        assert!(delta.value);
        let w = &delta.witness[0];
        assert_eq!(hom_dim(w, w).unwrap(), 1);
        let two = o.is_schur_root(&dv(&[2, 2])).unwrap();
        assert!(!two.value);
        assert!(two.exhaustive);
        assert!(o.is_schur_root(&dv(&[3, 4])).unwrap().value);
    }

    #[test]
    fn ext_examples() {
        let o = kron();
        assert!(o.generic_ext_vanishes(&dv(&[1, 1]), &dv(&[0, 0])).unwrap().value);
        assert!(o.generic_ext_vanishes(&dv(&[1, 1]), &dv(&[1, 1])).unwrap().value);
        // <(1,0),(0,1)> = -2 forces Ext(S_1, S_2) != 0; the other direction vanishes
        assert!(!o.generic_ext_vanishes(&dv(&[1, 0]), &dv(&[0, 1])).unwrap().value);
        assert!(o.generic_ext_vanishes(&dv(&[0, 1]), &dv(&[1, 0])).unwrap().value);
    }

    #[test]
    fn cluster_ext_examples() {
        let o = kron();
        assert!(o.generic_ext_vanishes_cluster(&dv(&[-1, 0]), &dv(&[0, -1])).unwrap());
        assert!(!o.generic_ext_vanishes_cluster(&dv(&[-1, 0]), &dv(&[1, 1])).unwrap());
        assert!(o.generic_ext_vanishes_cluster(&dv(&[2, 1]), &dv(&[2, 1])).unwrap());
        assert!(o.generic_ext_vanishes_cluster(&dv(&[-1, 0]), &dv(&[0, 1])).unwrap());
    }

    #[test]
    fn kronecker_decompositions() {
        let o = kron();
        let c = o.canonical_decomposition(&dv(&[3, 3])).unwrap();
        assert_eq!(c.summands.len(), 1);
        assert_eq!(c.summands[0].root, dv(&[1, 1]));
        assert_eq!(c.summands[0].multiplicity, 3);
        assert!(c.certificate.verify(&dv(&[3, 3])).unwrap());

        let c = o.canonical_decomposition(&dv(&[3, 1])).unwrap();
        assert_eq!(c.roots(), vec![dv(&[1, 0]), dv(&[2, 1])]);

        let c = o.canonical_decomposition(&dv(&[3, 2])).unwrap();
        assert_eq!(c.roots(), vec![dv(&[3, 2])]);
        assert_eq!(c.summands[0].kind, SummandKind::RealSchur);
    }

    #[test]
    fn affine_path_agrees() {
        let o = kron();
        for d in DimVector::boxed(&dv(&[0, 0]), &dv(&[3, 3])) {
            let a = o.canonical_decomposition(&d).unwrap();
            let b = o.canonical_decomposition_affine(&d).unwrap();
            assert_eq!(a.summands, b.summands, "{d}");
        }
    }

    #[test]
    fn affine_a2_exceptional_tube() {
        let o = Oracles::new(&Quiver::affine_a2(), &Config::with_seed(3));
        let c = o.decompose(&dv(&[1, 2, 1])).unwrap();
        assert_eq!(c.roots(), vec![dv(&[0, 1, 0]), dv(&[1, 1, 1])]);
        assert_eq!(c.generic_end_dim(o.quiver()).unwrap(), 2);
    }

    #[test]
    fn certificates_reject_tampering() {
        let o = kron();
        let c = o.canonical_decomposition(&dv(&[2, 2])).unwrap();
        assert!(c.certificate.verify(&dv(&[2, 2])).unwrap());
        let mut bad = c.certificate.clone();
        bad.witnesses[1] = bad.witnesses[0].clone();
        assert!(!bad.verify(&dv(&[2, 2])).unwrap());
    }
}
