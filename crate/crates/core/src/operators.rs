//! Normal-ordered differential operators in `(z, χ)` and the GKZ-type
//! operators built from a [`PicardModel`].

use crate::cohomology::OrbifoldRing;
use crate::error::{Error, Result};
use crate::linalg::{rat_from_int, rat_matrix_from_ints, rat_rank, rat_to_int, Int, Rat};
use crate::picard::PicardModel;
use crate::poly::{GroebnerLimits, Monomial, MonomialOrder, Poly, QuotientRing};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

/// How the derivation attached to a variable is normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    /// `θ = z χ ∂_χ`.
    Log,
    /// `z ∂_χ`.
    Plain,
}

/// A normal-ordered monomial `χ^β z^k D^s E^u`, where `D_a` is the letter of
/// variable `a` and `E = z²∂_z`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpTerm {
    pub chi: Vec<u32>,
    pub z: u32,
    pub letters: Vec<u32>,
    pub euler: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    kinds: Vec<VarKind>,
    terms: BTreeMap<OpTerm, Rat>,
}

impl DiffOp {
    pub fn zero(kinds: &[VarKind]) -> Self {
        DiffOp { kinds: kinds.to_vec(), terms: BTreeMap::new() }
    }

    fn blank(&self) -> OpTerm {
        let n = self.kinds.len();
        OpTerm { chi: vec![0; n], z: 0, letters: vec![0; n], euler: 0 }
    }

    pub fn from_term(kinds: &[VarKind], term: OpTerm, c: Rat) -> Self {
        let mut op = DiffOp::zero(kinds);
        op.add_term(term, c);
        op
    }

    pub fn constant(kinds: &[VarKind], c: Rat) -> Self {
        let op = DiffOp::zero(kinds);
        let t = op.blank();
        DiffOp::from_term(kinds, t, c)
    }

    pub fn one(kinds: &[VarKind]) -> Self {
        DiffOp::constant(kinds, Rat::one())
    }

    pub fn chi(kinds: &[VarKind], a: usize, power: u32) -> Self {
        let mut t = DiffOp::zero(kinds).blank();
        t.chi[a] = power;
        DiffOp::from_term(kinds, t, Rat::one())
    }

    pub fn chi_monomial(kinds: &[VarKind], beta: &[u32]) -> Self {
        let mut t = DiffOp::zero(kinds).blank();
        t.chi = beta.to_vec();
        DiffOp::from_term(kinds, t, Rat::one())
    }

    pub fn z_power(kinds: &[VarKind], k: u32) -> Self {
        let mut t = DiffOp::zero(kinds).blank();
        t.z = k;
        DiffOp::from_term(kinds, t, Rat::one())
    }

    /// The letter of variable `a`: `θ_a` or `z∂_a` depending on its kind.
    pub fn letter(kinds: &[VarKind], a: usize) -> Self {
        let mut t = DiffOp::zero(kinds).blank();
        t.letters[a] = 1;
        DiffOp::from_term(kinds, t, Rat::one())
    }

    /// `z χ_a ∂_a`, whatever the kind of `a`.
    pub fn log_derivation(kinds: &[VarKind], a: usize) -> Self {
        match kinds[a] {
            VarKind::Log => DiffOp::letter(kinds, a),
            VarKind::Plain => DiffOp::chi(kinds, a, 1).mul(&DiffOp::letter(kinds, a)),
        }
    }

    /// `z²∂_z`.
    pub fn euler(kinds: &[VarKind]) -> Self {
        let mut t = DiffOp::zero(kinds).blank();
        t.euler = 1;
        DiffOp::from_term(kinds, t, Rat::one())
    }

    pub fn kinds(&self) -> &[VarKind] {
        &self.kinds
    }

    pub fn terms(&self) -> &BTreeMap<OpTerm, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, t: OpTerm, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(t) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> DiffOp {
        if c.is_zero() {
            return DiffOp::zero(&self.kinds);
        }
        DiffOp { kinds: self.kinds.clone(), terms: self.terms.iter().map(|(t, k)| (t.clone(), k * c)).collect() }
    }

    /// Left multiplication by the letter of variable `a`.
    fn letter_times(&self, a: usize) -> DiffOp {
        let mut out = DiffOp::zero(&self.kinds);
        for (t, c) in &self.terms {
            let mut moved = t.clone();
            moved.letters[a] += 1;
            out.add_term(moved, c.clone());
            let b = t.chi[a];
            if b > 0 {
                let mut extra = t.clone();
                extra.z += 1;
                if self.kinds[a] == VarKind::Plain {
                    extra.chi[a] -= 1;
                }
                out.add_term(extra, c * Rat::from_integer(b.into()));
            }
        }
        out
    }

    /// Left multiplication by `z²∂_z`.
    fn euler_times(&self) -> DiffOp {
        let mut out = DiffOp::zero(&self.kinds);
        for (t, c) in &self.terms {
            let mut moved = t.clone();
            moved.euler += 1;
            out.add_term(moved, c.clone());
            let weight = t.z + t.letters.iter().sum::<u32>();
            if weight > 0 {
                let mut extra = t.clone();
                extra.z += 1;
                out.add_term(extra, c * Rat::from_integer(weight.into()));
            }
        }
        out
    }

    pub fn mul(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero(&self.kinds);
        for (t, c) in &self.terms {
            let mut acc = other.clone();
            for _ in 0..t.euler {
                acc = acc.euler_times();
            }
            for (a, &s) in t.letters.iter().enumerate() {
                for _ in 0..s {
                    acc = acc.letter_times(a);
                }
            }
            for (u, k) in acc.terms {
                let shifted = OpTerm {
                    chi: u.chi.iter().zip(&t.chi).map(|(x, y)| x + y).collect(),
                    z: u.z + t.z,
                    letters: u.letters,
                    euler: u.euler,
                };
                out.add_term(shifted, k * c);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> DiffOp {
        let mut acc = DiffOp::one(&self.kinds);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `Π_{ν=0}^{len−1} (X − ν z)`.
    pub fn falling(&self, len: u32) -> DiffOp {
        let mut acc = DiffOp::one(&self.kinds);
        for nu in 0..len {
            let shift = DiffOp::z_power(&self.kinds, 1).scale(&Rat::from_integer(nu.into()));
            acc = acc.mul(&self.sub(&shift));
        }
        acc
    }

    /// Highest total number of derivation letters (including `z²∂_z`).
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|t| t.letters.iter().sum::<u32>() + t.euler).max().unwrap_or(0)
    }

    /// Largest amount by which a term can lower a `χ_a` exponent when applied.
    pub fn max_chi_lowering(&self) -> u32 {
        self.terms
            .keys()
            .map(|t| {
                t.letters
                    .iter()
                    .zip(&self.kinds)
                    .filter(|(_, k)| **k == VarKind::Plain)
                    .map(|(s, _)| *s)
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    /// Principal symbol as a commutative polynomial in
    /// `(z, χ_1..χ_R, ξ_1..ξ_R, ξ_E)`.
    pub fn principal_symbol(&self) -> Poly {
        let r = self.kinds.len();
        let top = self.order();
        let order = symbol_order(r);
        let terms = self
            .terms
            .iter()
            .filter(|(t, _)| t.letters.iter().sum::<u32>() + t.euler == top)
            .map(|(t, c)| {
                let mut m: Monomial = vec![t.z];
                m.extend(&t.chi);
                m.extend(&t.letters);
                m.push(t.euler);
                (m, c.clone())
            })
            .collect();
        Poly::from_terms(terms, &order)
    }

    /// Value at `z = χ = 0` as a polynomial in `(ξ_1..ξ_R, ξ_E)`.
    pub fn limit(&self) -> Poly {
        let r = self.kinds.len();
        let terms = self
            .terms
            .iter()
            .filter(|(t, _)| t.z == 0 && t.chi.iter().all(|&b| b == 0))
            .map(|(t, c)| {
                let mut m: Monomial = t.letters.clone();
                m.push(t.euler);
                (m, c.clone())
            })
            .collect();
        Poly::from_terms(terms, &MonomialOrder::graded(vec![1; r + 1]))
    }
}

pub fn symbol_order(r: usize) -> MonomialOrder {
    MonomialOrder::graded(vec![1; 2 * r + 2])
}

/// Fiber of a principal symbol at `z = χ = 0`, in `(ξ_1..ξ_R, ξ_E)`.
pub fn symbol_fiber(symbol: &Poly, r: usize) -> Poly {
    let terms = symbol
        .terms()
        .iter()
        .filter(|(m, _)| m[..=r].iter().all(|&e| e == 0))
        .map(|(m, c)| (m[r + 1..].to_vec(), c.clone()))
        .collect();
    Poly::from_terms(terms, &MonomialOrder::graded(vec![1; r + 1]))
}

/// Drops the `ξ_E` variable from a limit polynomial (which must not use it).
pub fn without_euler_variable(p: &Poly, r: usize) -> Poly {
    let terms = p.terms().iter().map(|(m, c)| (m[..r].to_vec(), c.clone())).collect();
    Poly::from_terms(terms, &MonomialOrder::graded(vec![1; r]))
}

/// `□̂_l = Π_{l_i<0}(z∂_{λ_i})^{−l_i} − Π_{l_i>0}(z∂_{λ_i})^{l_i}` in `n` plain variables.
pub fn box_hat(l: &[Int]) -> DiffOp {
    let kinds = vec![VarKind::Plain; l.len()];
    let mut neg = DiffOp::zero(&kinds).blank();
    let mut pos = neg.clone();
    for (i, x) in l.iter().enumerate() {
        let e = x.abs().to_u32().expect("small relation");
        if x.is_negative() {
            neg.letters[i] = e;
        } else {
            pos.letters[i] = e;
        }
    }
    DiffOp::from_term(&kinds, neg, Rat::one()).sub(&DiffOp::from_term(&kinds, pos, Rat::one()))
}

/// `Ê = z²∂_z + Σ_i zλ_i∂_{λ_i}` and `Ê_k = Σ_i a_{ki} zλ_i∂_{λ_i}` over all generators.
pub fn hat_euler_operators(generators: &[Vec<i64>]) -> (DiffOp, Vec<DiffOp>) {
    let n = generators.len();
    let kinds = vec![VarKind::Plain; n];
    let mut e0 = DiffOp::euler(&kinds);
    for i in 0..n {
        e0 = e0.add(&DiffOp::log_derivation(&kinds, i));
    }
    let d = generators.first().map_or(0, Vec::len);
    let ek = (0..d)
        .map(|k| {
            (0..n).fold(DiffOp::zero(&kinds), |acc, i| {
                acc.add(&DiffOp::log_derivation(&kinds, i).scale(&Rat::from_integer(generators[i][k].into())))
            })
        })
        .collect();
    (e0, ek)
}

/// Operator constructions attached to a chosen basis `p`.
pub struct OperatorSystem<'a> {
    model: &'a PicardModel,
    kinds: Vec<VarKind>,
}

fn split_exponent(x: &Rat) -> Result<(u32, u32)> {
    let i = rat_to_int(x).ok_or_else(|| Error::Invariant(format!("non-integral pairing {x}")))?;
    let v = i.abs().to_u32().ok_or_else(|| Error::ResourceLimit("exponent too large".into()))?;
    Ok(if i.is_negative() { (0, v) } else { (v, 0) })
}

impl<'a> OperatorSystem<'a> {
    pub fn new(model: &'a PicardModel) -> Self {
        let r = model.r();
        let kinds = (0..model.rank()).map(|a| if a < r { VarKind::Log } else { VarKind::Plain }).collect();
        OperatorSystem { model, kinds }
    }

    pub fn kinds(&self) -> &[VarKind] {
        &self.kinds
    }

    pub fn model(&self) -> &PicardModel {
        self.model
    }

    /// `Σ_a m_{ia} zχ_a∂_a`.
    pub fn log_divisor(&self, i: usize) -> DiffOp {
        self.model.basis.m[i].iter().enumerate().fold(DiffOp::zero(&self.kinds), |acc, (a, m)| {
            acc.add(&DiffOp::log_derivation(&self.kinds, a).scale(m))
        })
    }

    /// `𝒟_i`: the log divisor for rays, `z∂_{χ_{r+k}}` for extra generators.
    pub fn divisor(&self, i: usize) -> DiffOp {
        let m = self.model.ext.m();
        if i < m {
            self.log_divisor(i)
        } else {
            DiffOp::letter(&self.kinds, self.model.r() + i - m)
        }
    }

    fn p_exponents(&self, l: &[Int]) -> Result<Vec<(u32, u32)>> {
        self.model.p_of_integer_relation(l)?.iter().map(split_exponent).collect()
    }

    fn chi_side(&self, exps: &[(u32, u32)], positive: bool, upto: usize) -> DiffOp {
        let beta: Vec<u32> = exps
            .iter()
            .enumerate()
            .map(|(a, (p, n))| if a < upto { if positive { *p } else { *n } } else { 0 })
            .collect();
        DiffOp::chi_monomial(&self.kinds, &beta)
    }

    /// `□̃_l` in the `χ` chart.
    pub fn box_tilde(&self, l: &[Int]) -> Result<DiffOp> {
        let exps = self.p_exponents(l)?;
        let rank = self.model.rank();
        let mut first = self.chi_side(&exps, true, rank);
        let mut second = self.chi_side(&exps, false, rank);
        for (i, x) in l.iter().enumerate() {
            let len = x.abs().to_u32().expect("small relation");
            let f = self.log_divisor(i).falling(len);
            if x.is_negative() {
                first = first.mul(&f);
            } else if x.is_positive() {
                second = second.mul(&f);
            }
        }
        Ok(first.sub(&second))
    }

    /// `□^X_l`, with extra-generator factors placed left of the ray factors.
    pub fn box_x_unchecked(&self, l: &[Int]) -> Result<DiffOp> {
        let exps = self.p_exponents(l)?;
        let (m, r) = (self.model.ext.m(), self.model.r());
        let mut sides = [self.chi_side(&exps, true, r), self.chi_side(&exps, false, r)];
        for (i, x) in l.iter().enumerate().skip(m) {
            let e = x.abs().to_u32().expect("small relation");
            let side = usize::from(x.is_positive());
            if !x.is_zero() {
                sides[side] = sides[side].mul(&self.divisor(i).pow(e));
            }
        }
        for (i, x) in l.iter().enumerate().take(m) {
            let len = x.abs().to_u32().expect("small relation");
            let side = usize::from(x.is_positive());
            if !x.is_zero() {
                sides[side] = sides[side].mul(&self.divisor(i).falling(len));
            }
        }
        let [a, b] = sides;
        Ok(a.sub(&b))
    }

    /// `Π_k χ_{r+k}^{|l_{m+k}|}`.
    pub fn extra_chi_prefix(&self, l: &[Int]) -> DiffOp {
        let (m, r) = (self.model.ext.m(), self.model.r());
        let mut beta = vec![0u32; self.model.rank()];
        for (k, x) in l[m..].iter().enumerate() {
            beta[r + k] = x.abs().to_u32().expect("small relation");
        }
        DiffOp::chi_monomial(&self.kinds, &beta)
    }

    /// `□^X_l`, verifying `□̃_l = Π χ_{r+k}^{|l_{m+k}|} · □^X_l`.
    pub fn box_x(&self, l: &[Int]) -> Result<DiffOp> {
        let bx = self.box_x_unchecked(l)?;
        let lhs = self.box_tilde(l)?;
        let rhs = self.extra_chi_prefix(l).mul(&bx);
        if lhs != rhs {
            return Err(Error::Invariant(format!("factorization of the box operator fails for l = {l:?}")));
        }
        Ok(bx)
    }

    /// `Ě = z²∂_z + Σ_a Σ_i m_{ia} zχ_a∂_a`.
    pub fn euler_op(&self) -> DiffOp {
        (0..self.model.ext.n()).fold(DiffOp::euler(&self.kinds), |acc, i| acc.add(&self.log_divisor(i)))
    }

    /// `𝐃_i` as a linear form in `ξ_1..ξ_R`.
    pub fn limit_divisor(&self, i: usize) -> Poly {
        let rank = self.model.rank();
        let order = MonomialOrder::graded(vec![1; rank]);
        let m = self.model.ext.m();
        if i >= m {
            let mut mono = vec![0u32; rank];
            mono[self.model.r() + i - m] = 1;
            return Poly::monomial(mono, Rat::one());
        }
        let terms = (0..self.model.r())
            .map(|a| {
                let mut mono = vec![0u32; rank];
                mono[a] = 1;
                (mono, self.model.basis.m[i][a].clone())
            })
            .collect();
        Poly::from_terms(terms, &order)
    }
}

/// `𝔇_i ↦ images[i]` applied to a polynomial in the `𝔇`.
pub fn substitute(p: &Poly, images: &[Poly], order: &MonomialOrder) -> Poly {
    let nv = images.first().and_then(|q| q.terms().first()).map_or(0, |t| t.0.len());
    let nv = images.iter().find_map(|q| q.terms().first().map(|t| t.0.len())).unwrap_or(nv);
    let mut acc = Poly::zero();
    for (m, c) in p.terms() {
        let mut term = Poly::monomial(vec![0; nv], c.clone());
        for (i, &e) in m.iter().enumerate() {
            for _ in 0..e {
                term = term.mul(&images[i], order);
            }
        }
        acc = acc.add(&term, order);
    }
    acc
}

/// Relation vector `l` with `x^{l+} − x^{l−}` equal to a binomial.
pub fn binomial_relation(p: &Poly) -> Option<Vec<Int>> {
    let t = p.terms();
    if t.len() != 2 || t[0].1 != -t[1].1.clone() {
        return None;
    }
    Some(t[0].0.iter().zip(&t[1].0).map(|(a, b)| Int::from(i64::from(*a) - i64::from(*b))).collect())
}

/// Generator families of the operator ideal at the limit point.
#[derive(Clone, Debug)]
pub struct LimitFamilies {
    pub cone: Vec<Poly>,
    pub primitive: Vec<Poly>,
    pub lattice_basis: Vec<Poly>,
    pub euler: Vec<Poly>,
}

impl LimitFamilies {
    pub fn named(&self) -> [(&'static str, &Vec<Poly>); 4] {
        [
            ("cone", &self.cone),
            ("primitive", &self.primitive),
            ("lattice_basis", &self.lattice_basis),
            ("euler", &self.euler),
        ]
    }

    pub fn all(&self) -> Vec<Poly> {
        self.named().iter().flat_map(|(_, v)| v.iter().cloned()).collect()
    }

    pub fn without(&self, family: &str) -> Vec<Poly> {
        self.named().iter().filter(|(n, _)| *n != family).flat_map(|(_, v)| v.iter().cloned()).collect()
    }
}

/// Integer relations, one per row.
pub type Relations = Vec<Vec<Int>>;

/// Relation families: saturated cone relations, primitive relations and the
/// Hermite basis of `𝕃`.
pub fn relation_families(model: &PicardModel, coh: &OrbifoldRing) -> Result<(Relations, Relations, Relations)> {
    let cone: Vec<Vec<Int>> = coh
        .cone_binomials
        .iter()
        .map(|p| binomial_relation(p).ok_or_else(|| Error::Invariant("cone ideal generator is not a binomial".into())))
        .collect::<Result<_>>()?;
    let primitive: Vec<Vec<Int>> = model
        .ext
        .generalized_primitive_collections()
        .iter()
        .map(|c| model.ext.primitive_relation(c).map(|l| l.into_iter().map(Int::from).collect()))
        .collect::<Result<_>>()?;
    Ok((cone, primitive, model.data.relations.clone()))
}

fn euler_limits(ops: &OperatorSystem<'_>) -> Vec<Poly> {
    let model = ops.model();
    let rank = model.rank();
    let order = MonomialOrder::graded(vec![1; rank]);
    (0..model.ext.rank())
        .map(|k| {
            (0..model.ext.m()).fold(Poly::zero(), |acc, i| {
                acc.add(&ops.limit_divisor(i).scale(&Rat::from_integer(model.ext.generator(i)[k].into())), &order)
            })
        })
        .filter(|p| !p.is_zero())
        .collect()
}

/// Full limits at `z = χ = 0` of the box operators of each family.
pub fn limit_families(model: &PicardModel, coh: &OrbifoldRing) -> Result<LimitFamilies> {
    let ops = OperatorSystem::new(model);
    let r = model.rank();
    let (cone, primitive, basis) = relation_families(model, coh)?;
    let lim = |ls: &[Vec<Int>]| -> Result<Vec<Poly>> {
        let mut out = Vec::new();
        for l in ls {
            let p = without_euler_variable(&ops.box_x(l)?.limit(), r);
            if !p.is_zero() {
                out.push(p);
            }
        }
        Ok(out)
    };
    Ok(LimitFamilies { cone: lim(&cone)?, primitive: lim(&primitive)?, lattice_basis: lim(&basis)?, euler: euler_limits(&ops) })
}

/// Fibers at `z = χ = 0` of the principal symbols of each family.
pub fn symbol_families(model: &PicardModel, coh: &OrbifoldRing) -> Result<LimitFamilies> {
    let ops = OperatorSystem::new(model);
    let r = model.rank();
    let (cone, primitive, basis) = relation_families(model, coh)?;
    let sym = |ls: &[Vec<Int>]| -> Result<Vec<Poly>> {
        let mut out = Vec::new();
        for l in ls {
            let p = without_euler_variable(&symbol_fiber(&ops.box_x(l)?.principal_symbol(), r), r);
            if !p.is_zero() {
                out.push(p);
            }
        }
        Ok(out)
    };
    Ok(LimitFamilies { cone: sym(&cone)?, primitive: sym(&primitive)?, lattice_basis: sym(&basis)?, euler: euler_limits(&ops) })
}

/// Degrees of `ξ_1..ξ_{r+e}`: 1 for `a ≤ r`, the age of `a_{m+k}` otherwise.
pub fn xi_degrees(model: &PicardModel) -> Vec<Rat> {
    let mut d = vec![Rat::one(); model.r()];
    d.extend(model.ext.extra().iter().map(|b| b.age.clone()));
    d
}

/// The algebra `ℚ[ξ]/(limit relations)` with the identification map from
/// the cohomology presentation.
#[derive(Clone, Debug)]
pub struct ResidueAlgebra {
    pub ring: QuotientRing,
    pub families: LimitFamilies,
    /// Column `j` is the image of the `j`-th cohomology basis monomial.
    pub comparison: Vec<Vec<Rat>>,
}

pub fn residue_algebra(model: &PicardModel, coh: &OrbifoldRing) -> Result<ResidueAlgebra> {
    let ops = OperatorSystem::new(model);
    let families = limit_families(model, coh)?;
    let ring = QuotientRing::new(xi_degrees(model), &families.all(), GroebnerLimits::default())?;
    let images: Vec<Poly> = (0..model.ext.n()).map(|i| ops.limit_divisor(i)).collect();
    let order = ring.order().clone();
    let ideal = coh.cone_binomials.iter().chain(&coh.euler_forms).chain(&coh.collection_monomials);
    for g in ideal {
        let img = substitute(g, &images, &order);
        if ring.coordinates(&img).iter().any(|x| !x.is_zero()) {
            return Err(Error::Invariant("𝔇 ↦ 𝐃 does not respect the cohomology relations".into()));
        }
    }
    let mut comparison = vec![vec![Rat::zero(); coh.ring.dim()]; ring.dim()];
    for (j, mono) in coh.ring.basis().iter().enumerate() {
        let img = substitute(&Poly::monomial(mono.clone(), Rat::one()), &images, &order);
        for (i, x) in ring.coordinates(&img).into_iter().enumerate() {
            comparison[i][j] = x;
        }
    }
    if ring.dim() != coh.ring.dim() || rat_rank(&comparison, coh.ring.dim()) != ring.dim() {
        return Err(Error::Invariant(format!(
            "residue algebra has dimension {} but the cohomology ring has dimension {}",
            ring.dim(),
            coh.ring.dim()
        )));
    }
    Ok(ResidueAlgebra { ring, families, comparison })
}

/// Dimension of a quotient, `None` when infinite.
pub fn quotient_dimension(degrees: &[Rat], gens: &[Poly]) -> Result<Option<usize>> {
    match QuotientRing::new(degrees.to_vec(), gens, GroebnerLimits::default()) {
        Ok(r) => Ok(Some(r.dim())),
        Err(Error::InfiniteDimensional) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySensitivity {
    pub family: &'static str,
    pub empty: bool,
    pub dimension_without: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolFiber {
    pub dimension: Option<usize>,
    pub sensitivity: Vec<FamilySensitivity>,
}

pub fn symbol_fiber_dimension(model: &PicardModel, coh: &OrbifoldRing) -> Result<SymbolFiber> {
    let fam = symbol_families(model, coh)?;
    let degrees = vec![Rat::one(); model.rank()];
    let dimension = quotient_dimension(&degrees, &fam.all())?;
    let boxes: Vec<Poly> = fam.primitive.iter().chain(&fam.lattice_basis).cloned().collect();
    let groups = [("cone", fam.cone.clone()), ("box", boxes), ("euler", fam.euler.clone())];
    let mut sensitivity = Vec::new();
    for (i, (name, v)) in groups.iter().enumerate() {
        let rest: Vec<Poly> =
            groups.iter().enumerate().filter(|(j, _)| *j != i).flat_map(|(_, (_, g))| g.iter().cloned()).collect();
        let dimension_without = if v.is_empty() { dimension } else { quotient_dimension(&degrees, &rest)? };
        sensitivity.push(FamilySensitivity { family: name, empty: v.is_empty(), dimension_without });
    }
    Ok(SymbolFiber { dimension, sensitivity })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldingReport {
    pub injectivity: bool,
    pub generation: bool,
    pub eigenvector: bool,
}

/// `p̄_a` for `a ≤ r` as a cohomology class.
pub fn p_bar_classes(model: &PicardModel, coh: &OrbifoldRing) -> Result<Vec<Vec<Rat>>> {
    let m = model.ext.m();
    let lx = rat_matrix_from_ints(&model.data.base_relations);
    model
        .basis
        .kappa
        .iter()
        .map(|k| {
            let kr: Vec<Rat> = k.iter().map(rat_from_int).collect();
            let y = crate::linalg::rat_solve(&lx, m, &kr).ok_or_else(|| Error::Invariant("κ not in range".into()))?;
            let mut c = vec![Rat::zero(); coh.dim()];
            for (i, yi) in y.iter().enumerate() {
                for (x, g) in c.iter_mut().zip(coh.generator_class(i)) {
                    *x += yi * g;
                }
            }
            Ok(c)
        })
        .collect()
}

/// The degree-two generators `p̄_1..p̄_r, 𝔇_{m+1}..𝔇_{m+e}`.
pub fn degree_two_generators(model: &PicardModel, coh: &OrbifoldRing) -> Result<Vec<Vec<Rat>>> {
    let mut g = p_bar_classes(model, coh)?;
    for k in model.ext.m()..model.ext.n() {
        g.push(coh.generator_class(k));
    }
    Ok(g)
}

pub fn check_unfolding_conditions(model: &PicardModel, coh: &OrbifoldRing) -> Result<UnfoldingReport> {
    let gens = degree_two_generators(model, coh)?;
    let dim = coh.dim();
    let injectivity = rat_rank(&gens, dim) == gens.len();
    let mats: Vec<Vec<Vec<Rat>>> = gens.iter().map(|g| coh.ring.multiplication_matrix(g)).collect();
    let mut span = vec![coh.ring.one()];
    let mut frontier = span.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for v in &frontier {
            for mat in &mats {
                let w = crate::linalg::rat_mat_vec(mat, v);
                let mut trial = span.clone();
                trial.push(w.clone());
                if rat_rank(&trial, dim) > span.len() {
                    span.push(w.clone());
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    let one_degree_zero = coh.ring.basis().iter().position(|m| m.iter().all(|&e| e == 0)).is_some();
    Ok(UnfoldingReport { injectivity, generation: span.len() == dim, eigenvector: one_degree_zero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::presentation;
    use crate::corpus;
    use crate::fan::ExtendedFan;
    use crate::linalg::{rat, to_int_vec};

    fn model(f: crate::fan::StackyFan) -> (PicardModel, OrbifoldRing) {
        let ext = ExtendedFan::new(f).unwrap();
        let coh = presentation(&ext).unwrap();
        (PicardModel::new(ext).unwrap(), coh)
    }

    #[test]
    fn commutation_rules() {
        let k = [VarKind::Log, VarKind::Plain];
        let th = DiffOp::letter(&k, 0);
        let x = DiffOp::chi(&k, 0, 1);
        let z = DiffOp::z_power(&k, 1);
        assert_eq!(th.mul(&x), x.mul(&th).add(&z.mul(&x)));
        let d = DiffOp::letter(&k, 1);
        let y = DiffOp::chi(&k, 1, 1);
        assert_eq!(d.mul(&y), y.mul(&d).add(&z));
        let e = DiffOp::euler(&k);
        assert_eq!(e.mul(&z), z.mul(&e).add(&z.mul(&z)));
        assert_eq!(e.mul(&th), th.mul(&e).add(&z.mul(&th)));
    }

    #[test]
    fn falling_product_of_plain_log_derivation() {
        let k = [VarKind::Plain];
        let t = DiffOp::log_derivation(&k, 0);
        assert_eq!(t.falling(3), DiffOp::chi(&k, 0, 3).mul(&DiffOp::letter(&k, 0).pow(3)));
    }

    #[test]
    fn projective_line_box() {
        let (pm, _) = model(corpus::p1());
        let ops = OperatorSystem::new(&pm);
        let l = to_int_vec(&[1, 1]);
        let k = ops.kinds().to_vec();
        let expected = DiffOp::chi(&k, 0, 1).sub(&DiffOp::letter(&k, 0).pow(2));
        assert_eq!(ops.box_x(&l).unwrap(), expected);
        assert!(ops.box_x(&to_int_vec(&[0, 0])).unwrap().is_zero());
    }

    #[test]
    fn box_hat_signs() {
        let l = to_int_vec(&[1, 1]);
        let b = box_hat(&l);
        let neg: Vec<Int> = l.iter().map(|x| -x).collect();
        assert_eq!(box_hat(&neg), b.scale(&rat(-1, 1)));
        assert!(box_hat(&to_int_vec(&[0, 0])).is_zero());
    }

    #[test]
    fn weighted_plane_cone_limit() {
        let (pm, _) = model(corpus::p112());
        let ops = OperatorSystem::new(&pm);
        let lim = without_euler_variable(&ops.box_x(&to_int_vec(&[1, 0, 1, -2])).unwrap().limit(), 2);
        let o = MonomialOrder::graded(vec![1, 1]);
        let expect = Poly::from_terms(vec![(vec![0, 2], rat(1, 1)), (vec![2, 0], rat(-1, 4))], &o);
        assert_eq!(lim, expect);
    }

    #[test]
    fn residue_algebras_match() {
        for (name, f) in corpus::named() {
            let (pm, coh) = model(f);
            let res = residue_algebra(&pm, &coh).unwrap();
            assert_eq!(res.ring.dim(), coh.dim(), "{name}");
            let fiber = symbol_fiber_dimension(&pm, &coh).unwrap();
            assert!(fiber.dimension.is_some(), "{name}");
            let u = check_unfolding_conditions(&pm, &coh).unwrap();
            assert!(u.injectivity && u.generation && u.eigenvector, "{name}");
        }
    }

    #[test]
    fn primitive_limits_are_negated_products() {
        for (name, f) in corpus::named() {
            let (pm, _) = model(f);
            let ops = OperatorSystem::new(&pm);
            let o = MonomialOrder::graded(vec![1; pm.rank()]);
            for c in pm.ext.generalized_primitive_collections() {
                let l: Vec<Int> = pm.ext.primitive_relation(&c).unwrap().into_iter().map(Int::from).collect();
                let lim = without_euler_variable(&ops.box_x(&l).unwrap().limit(), pm.rank());
                let prod = c.iter().fold(Poly::monomial(vec![0; pm.rank()], rat(-1, 1)), |acc, &i| acc.mul(&ops.limit_divisor(i), &o));
                assert_eq!(lim, prod, "{name} {c:?}");
            }
        }
    }

    #[test]
    fn dropping_primitive_family_enlarges_fiber() {
        for (name, f) in corpus::named() {
            let (pm, coh) = model(f);
            let fiber = symbol_fiber_dimension(&pm, &coh).unwrap();
            let d = fiber.dimension.unwrap();
            let s = fiber.sensitivity.iter().find(|s| s.family == "box").unwrap();
            assert!(!s.empty, "{name}");
            assert!(s.dimension_without.is_none_or(|x| x > d), "{name}");
        }
    }
}
