//! Presentation of the orbifold cohomology ring of a toric orbifold.

use crate::error::{Error, Result};
use crate::fan::ExtendedFan;
use crate::linalg::{int_to_i64, Int, Rat};
use crate::poly::{saturate_by_product, GroebnerLimits, Monomial, Poly, QuotientRing};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// The quotient `ℚ[𝔇_1..𝔇_n] / (cone binomials + Euler forms + primitive
/// collection monomials)`, with its generator families kept apart.
#[derive(Clone, Debug)]
pub struct OrbifoldRing {
    pub ring: QuotientRing,
    pub cone_binomials: Vec<Poly>,
    pub euler_forms: Vec<Poly>,
    pub collection_monomials: Vec<Poly>,
}

/// The binomial `x^{l+} − x^{l−}`.
pub fn binomial(l: &[Int], ring_vars: usize) -> Poly {
    let mut plus = vec![0u32; ring_vars];
    let mut minus = vec![0u32; ring_vars];
    for (i, c) in l.iter().enumerate() {
        let v = u32::try_from(int_to_i64(&c.abs()).expect("small relation")).expect("small relation");
        if c.is_positive() {
            plus[i] = v;
        } else {
            minus[i] = v;
        }
    }
    Poly::from_terms(vec![(plus, Rat::one()), (minus, -Rat::one())], &crate::poly::MonomialOrder::graded(vec![1; ring_vars]))
}

/// Generators of the lattice ideal of each maximal cone's relation lattice.
pub fn cone_ideal(ext: &ExtendedFan, limits: GroebnerLimits) -> Result<Vec<Poly>> {
    let n = ext.n();
    let weights = crate::poly::integer_weights(&ext.degrees());
    let mut out: Vec<Poly> = Vec::new();
    for c in 0..ext.base().cones().len() {
        let rels = ext.cone_relations(c);
        if rels.is_empty() {
            continue;
        }
        let gens: Vec<Poly> = rels.iter().map(|l| binomial(l, n)).collect();
        for p in saturate_by_product(&gens, n, &ext.generators_in_cone(c), &weights, limits)? {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

pub fn euler_forms(ext: &ExtendedFan) -> Vec<Poly> {
    let n = ext.n();
    (0..ext.rank())
        .map(|k| {
            let terms = (0..ext.m())
                .map(|i| {
                    let mut m = vec![0u32; n];
                    m[i] = 1;
                    (m, Rat::from_integer(ext.generator(i)[k].into()))
                })
                .collect();
            Poly::from_terms(terms, &crate::poly::MonomialOrder::graded(vec![1; n]))
        })
        .filter(|p| !p.is_zero())
        .collect()
}

pub fn collection_monomials(ext: &ExtendedFan) -> Vec<Poly> {
    ext.generalized_primitive_collections()
        .iter()
        .map(|s| {
            let mut m = vec![0u32; ext.n()];
            for &i in s {
                m[i] = 1;
            }
            Poly::monomial(m, Rat::one())
        })
        .collect()
}

pub fn presentation(ext: &ExtendedFan) -> Result<OrbifoldRing> {
    presentation_with(ext, GroebnerLimits::default())
}

pub fn presentation_with(ext: &ExtendedFan, limits: GroebnerLimits) -> Result<OrbifoldRing> {
    let cone_binomials = cone_ideal(ext, limits)?;
    let euler = euler_forms(ext);
    let gp = collection_monomials(ext);
    let all: Vec<Poly> = cone_binomials.iter().chain(&euler).chain(&gp).cloned().collect();
    let ring = QuotientRing::new(ext.degrees(), &all, limits)?;
    Ok(OrbifoldRing { ring, cone_binomials, euler_forms: euler, collection_monomials: gp })
}

/// `Σ_σ |det σ|`, the normalized volume of `{φ ≤ 1}`; refuses inputs whose
/// anticanonical support function is not convex.
pub fn normalized_volume(ext: &ExtendedFan) -> Result<Int> {
    if !ext.base().is_anticanonical_nef() {
        return Err(Error::NotNef("anticanonical support function is not convex".into()));
    }
    Ok(ext.base().total_cone_volume())
}

impl OrbifoldRing {
    pub fn dim(&self) -> usize {
        self.ring.dim()
    }

    /// Class of the generator `𝔇_i`.
    pub fn generator_class(&self, i: usize) -> Vec<Rat> {
        self.ring.coordinates(&self.ring.variable(i))
    }

    pub fn monomial_class(&self, exponents: &[i64]) -> Vec<Rat> {
        let m: Monomial = exponents.iter().map(|&e| u32::try_from(e).expect("nonnegative exponent")).collect();
        self.ring.coordinates(&Poly::monomial(m, Rat::one()))
    }

    /// Fundamental class of the twisted sector of a box element.
    pub fn sector_class(&self, ext: &ExtendedFan, v: &[i64]) -> Result<Vec<Rat>> {
        if v.iter().all(|&x| x == 0) {
            return Ok(self.ring.one());
        }
        let exps = ext
            .nonnegative_decomposition(v)
            .ok_or_else(|| Error::Invariant(format!("no generator decomposition of {v:?}")))?;
        Ok(self.monomial_class(&exps))
    }

    /// First Chern class `Σ_{i ≤ m} 𝔇_i`.
    pub fn first_chern_class(&self, m: usize) -> Vec<Rat> {
        let mut c = vec![Rat::zero(); self.dim()];
        for i in 0..m {
            for (a, b) in c.iter_mut().zip(self.generator_class(i)) {
                *a += b;
            }
        }
        c
    }

    /// Grading operator: diagonal of basis degrees.
    pub fn a_infinity(&self) -> Vec<Vec<Rat>> {
        let d = self.ring.basis_degrees();
        (0..d.len())
            .map(|i| (0..d.len()).map(|j| if i == j { d[i].clone() } else { Rat::zero() }).collect())
            .collect()
    }

    /// Multiplication by `−c_1`.
    pub fn a_zero(&self, m: usize) -> Vec<Vec<Rat>> {
        let c: Vec<Rat> = self.first_chern_class(m).into_iter().map(|x| -x).collect();
        self.ring.multiplication_matrix(&c)
    }

    /// Rational degrees present in the basis.
    pub fn degree_set(&self) -> BTreeSet<Rat> {
        self.ring.basis_degrees().into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::linalg::rat;

    fn ring(f: crate::fan::StackyFan) -> (ExtendedFan, OrbifoldRing) {
        let ext = ExtendedFan::new(f).unwrap();
        let r = presentation(&ext).unwrap();
        (ext, r)
    }

    #[test]
    fn dimensions_match_volumes() {
        for (name, f) in corpus::named() {
            let (ext, r) = ring(f);
            assert_eq!(Int::from(r.dim()), normalized_volume(&ext).unwrap(), "{name}");
        }
    }

    #[test]
    fn weighted_plane_grading() {
        let (_, r) = ring(corpus::p112());
        let dims: Vec<(Rat, usize)> = r.ring.graded_dims().into_iter().collect();
        assert_eq!(dims, vec![(rat(0, 1), 1), (rat(1, 1), 2), (rat(2, 1), 1)]);
        let diag: Vec<Rat> = (0..4).map(|i| r.a_infinity()[i][i].clone()).collect();
        assert_eq!(diag, vec![rat(0, 1), rat(1, 1), rat(1, 1), rat(2, 1)]);
    }

    #[test]
    fn projective_plane_pairing() {
        let (_, r) = ring(corpus::p2());
        let h = r.generator_class(0);
        assert_eq!(r.ring.top_pairing(&h, &h).unwrap(), rat(1, 1));
        assert_eq!(r.ring.top_pairing(&r.ring.one(), &r.ring.one()).unwrap(), rat(0, 1));
    }

    #[test]
    fn non_nef_volume_refused() {
        let ext = ExtendedFan::new(corpus::f3()).unwrap();
        assert!(matches!(normalized_volume(&ext), Err(Error::NotNef(_))));
    }
}
