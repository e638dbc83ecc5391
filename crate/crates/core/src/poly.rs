//! Multivariate polynomials over ℚ, Gröbner bases and finite-dimensional
//! quotient rings.

use crate::error::{Error, Result};
use crate::linalg::Rat;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;

pub type Monomial = Vec<u32>;

/// Matrix order: compare by each weight row in turn, then reverse
/// lexicographically (a smaller exponent on a later variable wins).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    weights: Vec<Vec<i64>>,
}

impl MonomialOrder {
    /// Weighted degree reverse lexicographic order. Weights must be positive.
    pub fn graded(weights: Vec<i64>) -> Self {
        MonomialOrder { weights: vec![weights] }
    }

    pub fn with_rows(weights: Vec<Vec<i64>>) -> Self {
        MonomialOrder { weights }
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        for w in &self.weights {
            let da: i64 = w.iter().zip(a).map(|(wi, &e)| wi * i64::from(e)).sum();
            let db: i64 = w.iter().zip(b).map(|(wi, &e)| wi * i64::from(e)).sum();
            match da.cmp(&db) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        for i in (0..a.len()).rev() {
            if a[i] != b[i] {
                return b[i].cmp(&a[i]);
            }
        }
        Ordering::Equal
    }
}

pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn mono_mul(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn mono_div(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn mono_lcm(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

/// Polynomial with terms sorted in decreasing order for a fixed monomial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    terms: Vec<(Monomial, Rat)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn from_terms(terms: Vec<(Monomial, Rat)>, order: &MonomialOrder) -> Self {
        let mut map: BTreeMap<Monomial, Rat> = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_insert_with(Rat::zero) += c;
        }
        let mut terms: Vec<(Monomial, Rat)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        Poly { terms }
    }

    pub fn monomial(m: Monomial, c: Rat) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn terms(&self) -> &[(Monomial, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&(Monomial, Rat)> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> &[u32] {
        &self.terms[0].0
    }

    /// `self + c · x^shift · other`.
    pub fn add_scaled(&self, other: &Poly, c: &Rat, shift: &[u32], order: &MonomialOrder) -> Poly {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let shifted = other.terms.iter().map(|(m, k)| (mono_mul(m, shift), k * c));
        let mut a = self.terms.iter().cloned().peekable();
        let mut b = shifted.peekable();
        loop {
            let ord = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (Some(x), Some(y)) => order.cmp(&x.0, &y.0),
            };
            match ord {
                Ordering::Greater => out.push(a.next().expect("peeked")),
                Ordering::Less => out.push(b.next().expect("peeked")),
                Ordering::Equal => {
                    let (m, x) = a.next().expect("peeked");
                    let (_, y) = b.next().expect("peeked");
                    let s = x + y;
                    if !s.is_zero() {
                        out.push((m, s));
                    }
                }
            }
        }
        Poly { terms: out }
    }

    pub fn add(&self, other: &Poly, order: &MonomialOrder) -> Poly {
        let n = self.nvars().or(other.nvars()).unwrap_or(0);
        self.add_scaled(other, &Rat::one(), &vec![0; n], order)
    }

    pub fn sub(&self, other: &Poly, order: &MonomialOrder) -> Poly {
        let n = self.nvars().or(other.nvars()).unwrap_or(0);
        self.add_scaled(other, &-Rat::one(), &vec![0; n], order)
    }

    pub fn mul(&self, other: &Poly, order: &MonomialOrder) -> Poly {
        let mut acc = Poly::zero();
        for (m, c) in &self.terms {
            acc = acc.add_scaled(other, c, m, order);
        }
        acc
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    fn nvars(&self) -> Option<usize> {
        self.terms.first().map(|t| t.0.len())
    }

    /// Full reduction modulo `basis` (leading coefficients need not be 1).
    pub fn reduce(&self, basis: &[Poly], order: &MonomialOrder) -> Poly {
        let mut p = self.clone();
        let mut idx = 0;
        while idx < p.terms.len() {
            let (m, c) = p.terms[idx].clone();
            match basis.iter().find(|g| !g.is_zero() && divides(g.leading_monomial(), &m)) {
                Some(g) => {
                    let (lm, lc) = g.leading().expect("nonzero");
                    let shift = mono_div(&m, lm);
                    p = p.add_scaled(g, &-(c / lc), &shift, order);
                }
                None => idx += 1,
            }
        }
        p
    }
}

/// Bounds on Buchberger's algorithm; exceeding them is a resource error.
#[derive(Clone, Copy, Debug)]
pub struct GroebnerLimits {
    pub max_pairs: usize,
    pub max_basis: usize,
}

impl Default for GroebnerLimits {
    fn default() -> Self {
        GroebnerLimits { max_pairs: 200_000, max_basis: 20_000 }
    }
}

fn s_polynomial(f: &Poly, g: &Poly, order: &MonomialOrder) -> Poly {
    let (fm, fc) = f.leading().expect("nonzero");
    let (gm, gc) = g.leading().expect("nonzero");
    let l = mono_lcm(fm, gm);
    let a = Poly::zero().add_scaled(f, &gc.clone(), &mono_div(&l, fm), order);
    a.add_scaled(g, &-fc.clone(), &mono_div(&l, gm), order)
}

/// Reduced Gröbner basis (monic, sorted by increasing leading monomial).
pub fn groebner_basis(generators: &[Poly], order: &MonomialOrder, limits: GroebnerLimits) -> Result<Vec<Poly>> {
    let mut basis: Vec<Poly> = Vec::new();
    for g in generators {
        let r = g.reduce(&basis, order);
        if !r.is_zero() {
            basis.push(r.monic());
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let mut processed = 0usize;
    while !pairs.is_empty() {
        // Normal selection strategy: smallest lcm first.
        let (pos, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let la = mono_lcm(basis[a.0].leading_monomial(), basis[a.1].leading_monomial());
                let lb = mono_lcm(basis[b.0].leading_monomial(), basis[b.1].leading_monomial());
                order.cmp(&la, &lb)
            })
            .expect("nonempty");
        let (i, j) = pairs.swap_remove(pos);
        processed += 1;
        if processed > limits.max_pairs {
            return Err(Error::ResourceLimit(format!("Gröbner basis exceeded {} S-pairs", limits.max_pairs)));
        }
        let (li, lj) = (basis[i].leading_monomial(), basis[j].leading_monomial());
        if li.iter().zip(lj).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let lcm = mono_lcm(li, lj);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && divides(basis[k].leading_monomial(), &lcm)
                && !pairs.contains(&(i.min(k), i.max(k)))
                && !pairs.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let r = s_polynomial(&basis[i], &basis[j], order).reduce(&basis, order);
        if !r.is_zero() {
            let k = basis.len();
            basis.push(r.monic());
            if basis.len() > limits.max_basis {
                return Err(Error::ResourceLimit(format!("Gröbner basis exceeded {} elements", limits.max_basis)));
            }
            for i in 0..k {
                pairs.push((i, k));
            }
        }
    }
    Ok(interreduce(basis, order))
}

fn interreduce(basis: Vec<Poly>, order: &MonomialOrder) -> Vec<Poly> {
    let mut kept: Vec<Poly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let lm = g.leading_monomial();
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            let hm = h.leading_monomial();
            j != i && divides(hm, lm) && (hm != lm || j < i)
        });
        if !redundant {
            kept.push(g.clone());
        }
    }
    let mut out = Vec::with_capacity(kept.len());
    for i in 0..kept.len() {
        let others: Vec<Poly> =
            kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
        out.push(kept[i].reduce(&others, order).monic());
    }
    out.sort_by(|a, b| order.cmp(a.leading_monomial(), b.leading_monomial()));
    out
}

/// Generators of `I : (x_{vars[0]} ⋯ x_{vars[k]})^∞`, computed by
/// eliminating an auxiliary variable `t` from `I + (t·Πx − 1)`.
pub fn saturate_by_product(
    generators: &[Poly],
    nvars: usize,
    vars: &[usize],
    degree_weights: &[i64],
    limits: GroebnerLimits,
) -> Result<Vec<Poly>> {
    let mut elim_row = vec![0i64; nvars + 1];
    elim_row[0] = 1;
    let mut deg_row = vec![1i64];
    deg_row.extend_from_slice(degree_weights);
    let order = MonomialOrder::with_rows(vec![elim_row, deg_row]);
    let lift = |m: &Monomial| {
        let mut v = vec![0u32];
        v.extend_from_slice(m);
        v
    };
    let mut gens: Vec<Poly> = generators
        .iter()
        .map(|p| Poly::from_terms(p.terms.iter().map(|(m, c)| (lift(m), c.clone())).collect(), &order))
        .collect();
    let mut prod = vec![0u32; nvars + 1];
    prod[0] = 1;
    for &v in vars {
        prod[v + 1] += 1;
    }
    gens.push(Poly::from_terms(vec![(prod, Rat::one()), (vec![0; nvars + 1], -Rat::one())], &order));
    let gb = groebner_basis(&gens, &order, limits)?;
    let target = MonomialOrder::graded(degree_weights.to_vec());
    Ok(gb
        .into_iter()
        .filter(|p| p.terms.iter().all(|(m, _)| m[0] == 0))
        .map(|p| Poly::from_terms(p.terms.into_iter().map(|(m, c)| (m[1..].to_vec(), c)).collect(), &target))
        .collect())
}

/// A finite-dimensional graded quotient `ℚ[x_1..x_n]/I` with its standard
/// monomial basis.
#[derive(Clone, Debug)]
pub struct QuotientRing {
    nvars: usize,
    degrees: Vec<Rat>,
    order: MonomialOrder,
    groebner: Vec<Poly>,
    basis: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
}

/// Common denominator clearing of positive rational degrees.
pub fn integer_weights(degrees: &[Rat]) -> Vec<i64> {
    let lcm = degrees.iter().fold(num_bigint::BigInt::one(), |acc, d| num_integer::lcm(acc, d.denom().clone()));
    degrees
        .iter()
        .map(|d| {
            let w = (d * Rat::from_integer(lcm.clone())).to_integer();
            i64::try_from(w).expect("weight fits in i64")
        })
        .collect()
}

impl QuotientRing {
    pub fn new(degrees: Vec<Rat>, generators: &[Poly], limits: GroebnerLimits) -> Result<Self> {
        let nvars = degrees.len();
        let order = MonomialOrder::graded(integer_weights(&degrees));
        let gens: Vec<Poly> = generators
            .iter()
            .map(|p| Poly::from_terms(p.terms.clone(), &order))
            .collect();
        let groebner = groebner_basis(&gens, &order, limits)?;
        let mut bounds = vec![None; nvars];
        for g in &groebner {
            let lm = g.leading_monomial();
            let support: Vec<usize> = (0..nvars).filter(|&i| lm[i] > 0).collect();
            if support.len() == 1 {
                let i = support[0];
                bounds[i] = Some(bounds[i].map_or(lm[i], |b: u32| b.min(lm[i])));
            }
        }
        if groebner.iter().any(|g| g.terms.len() == 1 && g.leading_monomial().iter().all(|&e| e == 0)) {
            return Err(Error::Invariant("ideal is the unit ideal".into()));
        }
        let bounds: Vec<u32> = bounds.into_iter().collect::<Option<Vec<u32>>>().ok_or(Error::InfiniteDimensional)?;
        let mut basis = Vec::new();
        let mut cur = vec![0u32; nvars];
        fn rec(i: usize, cur: &mut Vec<u32>, bounds: &[u32], gb: &[Poly], out: &mut Vec<Monomial>) {
            if gb.iter().any(|g| divides(g.leading_monomial(), cur)) {
                return;
            }
            if i == cur.len() {
                out.push(cur.clone());
                return;
            }
            for e in 0..bounds[i] {
                cur[i] = e;
                rec(i + 1, cur, bounds, gb, out);
            }
            cur[i] = 0;
        }
        rec(0, &mut cur, &bounds, &groebner, &mut basis);
        let mono_deg = |m: &Monomial| m.iter().zip(&degrees).fold(Rat::zero(), |a, (e, d)| a + d * Rat::from_integer((*e).into()));
        basis.sort_by(|a, b| mono_deg(a).cmp(&mono_deg(b)).then_with(|| order.cmp(a, b)));
        let index = basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        Ok(QuotientRing { nvars, degrees, order, groebner, basis, index })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn degrees(&self) -> &[Rat] {
        &self.degrees
    }

    pub fn groebner_basis(&self) -> &[Poly] {
        &self.groebner
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn monomial_degree(&self, m: &[u32]) -> Rat {
        m.iter().zip(&self.degrees).fold(Rat::zero(), |a, (e, d)| a + d * Rat::from_integer((*e).into()))
    }

    pub fn basis_degrees(&self) -> Vec<Rat> {
        self.basis.iter().map(|m| self.monomial_degree(m)).collect()
    }

    pub fn graded_dims(&self) -> BTreeMap<Rat, usize> {
        let mut out = BTreeMap::new();
        for d in self.basis_degrees() {
            *out.entry(d).or_insert(0) += 1;
        }
        out
    }

    pub fn poly(&self, terms: Vec<(Monomial, Rat)>) -> Poly {
        Poly::from_terms(terms, &self.order)
    }

    pub fn variable(&self, i: usize) -> Poly {
        let mut m = vec![0; self.nvars];
        m[i] = 1;
        Poly::monomial(m, Rat::one())
    }

    pub fn one(&self) -> Vec<Rat> {
        self.coordinates(&Poly::monomial(vec![0; self.nvars], Rat::one()))
    }

    /// Coordinates of the normal form in the standard monomial basis.
    pub fn coordinates(&self, p: &Poly) -> Vec<Rat> {
        let p = Poly::from_terms(p.terms.clone(), &self.order);
        let r = p.reduce(&self.groebner, &self.order);
        let mut v = vec![Rat::zero(); self.dim()];
        for (m, c) in r.terms {
            v[self.index[&m]] = c;
        }
        v
    }

    pub fn element(&self, v: &[Rat]) -> Poly {
        Poly::from_terms(self.basis.iter().cloned().zip(v.iter().cloned()).collect(), &self.order)
    }

    pub fn multiply(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let p = self.element(x).mul(&self.element(y), &self.order);
        self.coordinates(&p)
    }

    /// Matrix (row-major) of multiplication by `x`; column `j` is `x · b_j`.
    pub fn multiplication_matrix(&self, x: &[Rat]) -> Vec<Vec<Rat>> {
        let px = self.element(x);
        let n = self.dim();
        let mut m = vec![vec![Rat::zero(); n]; n];
        for (j, b) in self.basis.iter().enumerate() {
            let col = self.coordinates(&px.mul(&Poly::monomial(b.clone(), Rat::one()), &self.order));
            for (i, c) in col.into_iter().enumerate() {
                m[i][j] = c;
            }
        }
        m
    }

    /// Index of the unique top-degree basis monomial.
    pub fn top_index(&self) -> Result<usize> {
        let degs = self.basis_degrees();
        let top = degs.iter().max().cloned().unwrap_or_else(Rat::zero);
        let idx: Vec<usize> = (0..degs.len()).filter(|&i| degs[i] == top).collect();
        if idx.len() != 1 {
            return Err(Error::TopDegree(idx.len()));
        }
        Ok(idx[0])
    }

    /// Coefficient of the top basis monomial in `x·y`.
    pub fn top_pairing(&self, x: &[Rat], y: &[Rat]) -> Result<Rat> {
        let t = self.top_index()?;
        Ok(self.multiply(x, y)[t].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn p(terms: &[(&[u32], i64)], o: &MonomialOrder) -> Poly {
        Poly::from_terms(terms.iter().map(|(m, c)| (m.to_vec(), rat(*c, 1))).collect(), o)
    }

    #[test]
    fn grevlex_order() {
        let o = MonomialOrder::graded(vec![1, 1, 1]);
        assert_eq!(o.cmp(&[1, 0, 0], &[0, 1, 0]), Ordering::Greater);
        assert_eq!(o.cmp(&[1, 0, 1], &[0, 2, 0]), Ordering::Less);
        assert_eq!(o.cmp(&[0, 0, 2], &[1, 0, 0]), Ordering::Greater);
    }

    #[test]
    fn textbook_basis() {
        // x^2 - y, xy - 1 over grevlex.
        let o = MonomialOrder::graded(vec![1, 1]);
        let gb = groebner_basis(
            &[p(&[(&[2, 0], 1), (&[0, 1], -1)], &o), p(&[(&[1, 1], 1), (&[0, 0], -1)], &o)],
            &o,
            GroebnerLimits::default(),
        )
        .unwrap();
        let lms: Vec<Monomial> = gb.iter().map(|g| g.leading_monomial().to_vec()).collect();
        assert!(lms.contains(&vec![2, 0]));
        assert!(lms.contains(&vec![0, 2]));
        assert!(lms.contains(&vec![1, 1]));
    }

    #[test]
    fn projective_line_ring() {
        let o = MonomialOrder::graded(vec![1, 1]);
        let gens = [p(&[(&[1, 0], 1), (&[0, 1], -1)], &o), p(&[(&[1, 1], 1)], &o)];
        let r = QuotientRing::new(vec![rat(1, 1), rat(1, 1)], &gens, GroebnerLimits::default()).unwrap();
        assert_eq!(r.dim(), 2);
        let h = r.coordinates(&r.variable(0));
        assert!(r.multiply(&h, &h).iter().all(Zero::is_zero));
        assert_eq!(r.top_pairing(&r.one(), &h).unwrap(), rat(1, 1));
    }

    #[test]
    fn infinite_dimension_detected() {
        let o = MonomialOrder::graded(vec![1, 1]);
        let gens = [p(&[(&[1, 1], 1)], &o)];
        assert_eq!(
            QuotientRing::new(vec![rat(1, 1), rat(1, 1)], &gens, GroebnerLimits::default()).unwrap_err(),
            Error::InfiniteDimensional
        );
    }

    #[test]
    fn saturation_of_binomial() {
        // (x^2 - y^2) needs no saturation but x(x - y) saturates to (x - y).
        let o = MonomialOrder::graded(vec![1, 1]);
        let g = p(&[(&[2, 0], 1), (&[1, 1], -1)], &o);
        let sat = saturate_by_product(&[g], 2, &[0, 1], &[1, 1], GroebnerLimits::default()).unwrap();
        assert_eq!(sat.len(), 1);
        assert_eq!(sat[0], p(&[(&[1, 0], 1), (&[0, 1], -1)], &o));
    }
}
