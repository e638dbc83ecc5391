//! Truncated I-function, its mirror map, and operator annihilation checks.

use crate::cohomology::OrbifoldRing;
use crate::error::{Error, Result};
use crate::linalg::Rat;
use crate::operators::{DiffOp, OperatorSystem, VarKind};
use crate::picard::PicardModel;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

/// Exponents of one series term: `χ^β (log χ)^k z^q (log z)^j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeriesKey {
    pub chi: Vec<u32>,
    pub log_chi: Vec<u32>,
    pub z: Rat,
    pub log_z: u32,
}

impl SeriesKey {
    pub fn chi_degree(&self) -> u32 {
        self.chi.iter().sum()
    }
}

/// Cohomology-valued series; complete in total `χ`-degree up to `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogSeries {
    pub order: u32,
    dim: usize,
    terms: BTreeMap<SeriesKey, Vec<Rat>>,
}

fn is_zero_class(c: &[Rat]) -> bool {
    c.iter().all(Zero::is_zero)
}

fn scale_class(c: &[Rat], s: &Rat) -> Vec<Rat> {
    c.iter().map(|x| x * s).collect()
}

fn factorial(k: u32) -> Rat {
    (1..=k).fold(Rat::one(), |acc, i| acc * Rat::from_integer(i.into()))
}

impl LogSeries {
    pub fn zero(dim: usize, order: u32) -> Self {
        LogSeries { order, dim, terms: BTreeMap::new() }
    }

    pub fn constant(class: Vec<Rat>, chi_vars: usize, log_vars: usize, order: u32) -> Self {
        let mut s = LogSeries::zero(class.len(), order);
        let key = SeriesKey { chi: vec![0; chi_vars], log_chi: vec![0; log_vars], z: Rat::zero(), log_z: 0 };
        s.add_term(key, class);
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<SeriesKey, Vec<Rat>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: SeriesKey, class: Vec<Rat>) {
        if is_zero_class(&class) {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(class);
            }
            Entry::Occupied(mut o) => {
                for (a, b) in o.get_mut().iter_mut().zip(class) {
                    *a += b;
                }
                if is_zero_class(o.get()) {
                    o.remove();
                }
            }
        }
    }

    /// Drops terms beyond `order`.
    pub fn truncate(&self, order: u32) -> LogSeries {
        let mut out = LogSeries::zero(self.dim, order.min(self.order));
        for (k, c) in &self.terms {
            if k.chi_degree() <= out.order {
                out.terms.insert(k.clone(), c.clone());
            }
        }
        out
    }

    pub fn sub(&self, other: &LogSeries) -> LogSeries {
        let mut out = self.clone();
        out.order = self.order.min(other.order);
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.iter().map(|x| -x).collect());
        }
        out.truncate(out.order)
    }

    /// Cup product of two series.
    pub fn mul(&self, other: &LogSeries, ring: &OrbifoldRing) -> LogSeries {
        let mut out = LogSeries::zero(self.dim, self.order.min(other.order));
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key = SeriesKey {
                    chi: ka.chi.iter().zip(&kb.chi).map(|(x, y)| x + y).collect(),
                    log_chi: ka.log_chi.iter().zip(&kb.log_chi).map(|(x, y)| x + y).collect(),
                    z: &ka.z + &kb.z,
                    log_z: ka.log_z + kb.log_z,
                };
                if key.chi_degree() <= out.order {
                    out.add_term(key, ring.ring.multiply(ca, cb));
                }
            }
        }
        out
    }

    /// `z^μ`: a basis class of degree `q` is multiplied by `z^q`.
    pub fn apply_z_mu(&self, ring: &OrbifoldRing) -> LogSeries {
        let degrees = ring.ring.basis_degrees();
        let mut out = LogSeries::zero(self.dim, self.order);
        for (k, c) in &self.terms {
            for (j, x) in c.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let mut key = k.clone();
                key.z = &key.z + &degrees[j];
                let mut class = vec![Rat::zero(); self.dim];
                class[j] = x.clone();
                out.add_term(key, class);
            }
        }
        out
    }

    fn apply_letter(&self, a: usize, kind: VarKind) -> LogSeries {
        let mut out = LogSeries::zero(self.dim, self.order);
        for (k, c) in &self.terms {
            match kind {
                VarKind::Log => {
                    if k.chi[a] > 0 {
                        let mut key = k.clone();
                        key.z += Rat::one();
                        out.add_term(key, scale_class(c, &Rat::from_integer(k.chi[a].into())));
                    }
                    if a < k.log_chi.len() && k.log_chi[a] > 0 {
                        let mut key = k.clone();
                        key.z += Rat::one();
                        key.log_chi[a] -= 1;
                        out.add_term(key, scale_class(c, &Rat::from_integer(k.log_chi[a].into())));
                    }
                }
                VarKind::Plain => {
                    if k.chi[a] > 0 {
                        let mut key = k.clone();
                        key.z += Rat::one();
                        key.chi[a] -= 1;
                        out.add_term(key, scale_class(c, &Rat::from_integer(k.chi[a].into())));
                    }
                }
            }
        }
        out
    }

    fn apply_euler(&self) -> LogSeries {
        let mut out = LogSeries::zero(self.dim, self.order);
        for (k, c) in &self.terms {
            if !k.z.is_zero() {
                let mut key = k.clone();
                key.z += Rat::one();
                out.add_term(key, scale_class(c, &k.z));
            }
            if k.log_z > 0 {
                let mut key = k.clone();
                key.z += Rat::one();
                key.log_z -= 1;
                out.add_term(key, scale_class(c, &Rat::from_integer(k.log_z.into())));
            }
        }
        out
    }

    /// Applies a normal-ordered operator; the result is complete up to
    /// `order − (largest χ-lowering of the operator)`.
    pub fn apply(&self, op: &DiffOp) -> LogSeries {
        let lowered = self.order.saturating_sub(op.max_chi_lowering());
        let mut out = LogSeries::zero(self.dim, lowered);
        for (t, c) in op.terms() {
            let mut acc = self.clone();
            for _ in 0..t.euler {
                acc = acc.apply_euler();
            }
            for (a, &s) in t.letters.iter().enumerate() {
                for _ in 0..s {
                    acc = acc.apply_letter(a, op.kinds()[a]);
                }
            }
            for (k, cls) in acc.terms {
                let key = SeriesKey {
                    chi: k.chi.iter().zip(&t.chi).map(|(x, y)| x + y).collect(),
                    log_chi: k.log_chi,
                    z: k.z + Rat::from_integer(t.z.into()),
                    log_z: k.log_z,
                };
                if key.chi_degree() <= lowered {
                    out.add_term(key, scale_class(&cls, c));
                }
            }
        }
        out
    }
}

/// An effective degree `d` with `p(d)` and its sector `v(d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveDegree {
    pub p: Vec<u32>,
    pub pairings: Vec<Rat>,
    pub sector: Vec<i64>,
}

fn compositions(parts: usize, max_total: u32) -> Vec<Vec<u32>> {
    if parts == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..=max_total {
        for mut rest in compositions(parts - 1, max_total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All `d ∈ 𝕂^eff` with `Σ_a p_a(d) ≤ order`, each checked against the
/// coset of its sector's representative.
pub fn enumerate_degrees(model: &PicardModel, order: u32) -> Result<Vec<EffectiveDegree>> {
    let table = model.box_coset_table()?;
    let mut out = Vec::new();
    let mut grid = compositions(model.rank(), order);
    grid.sort_by_key(|w| (w.iter().sum::<u32>(), w.clone()));
    for w in grid {
        let pd: Vec<Rat> = w.iter().map(|&x| Rat::from_integer(x.into())).collect();
        if !model.in_k_eff(&pd) {
            continue;
        }
        let pairings = model.pairings(&pd);
        let sector = model.ceiling_vector(&pd);
        let entry = table
            .iter()
            .find(|e| e.box_vector == sector)
            .ok_or_else(|| Error::Invariant(format!("v(d) = {sector:?} is not a box element")))?;
        if pairings.iter().zip(&entry.pairings).any(|(x, y)| !(x - y).is_integer()) {
            return Err(Error::Invariant(format!("degree {w:?} is not in the coset of its sector")));
        }
        out.push(EffectiveDegree { p: w, pairings, sector });
    }
    Ok(out)
}

/// Laurent polynomial in `z` with cohomology coefficients.
type ZPoly = BTreeMap<i64, Vec<Rat>>;

fn zpoly_mul(a: &ZPoly, b: &ZPoly, ring: &OrbifoldRing) -> ZPoly {
    let mut out: ZPoly = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let p = ring.ring.multiply(ca, cb);
            let slot = out.entry(ea + eb).or_insert_with(|| vec![Rat::zero(); p.len()]);
            for (s, x) in slot.iter_mut().zip(p) {
                *s += x;
            }
        }
    }
    out.retain(|_, c| !is_zero_class(c));
    out
}

/// `D + c z`.
fn linear_factor(class: &[Rat], c: &Rat, ring: &OrbifoldRing) -> ZPoly {
    let mut f = ZPoly::new();
    f.insert(0, class.to_vec());
    f.insert(1, scale_class(&ring.ring.one(), c));
    f.retain(|_, v| !is_zero_class(v));
    f
}

/// `1/(D + c z) = Σ_k (−1)^k D^k c^{−k−1} z^{−k−1}` for nilpotent `D`, `c ≠ 0`.
fn inverse_factor(class: &[Rat], c: &Rat, ring: &OrbifoldRing) -> ZPoly {
    let mut f = ZPoly::new();
    let mut power = ring.ring.one();
    let mut k: i64 = 0;
    let inv = c.recip();
    let mut coeff = inv.clone();
    while !is_zero_class(&power) {
        f.insert(-k - 1, scale_class(&power, &coeff));
        power = ring.ring.multiply(&power, class);
        coeff = -coeff * &inv;
        k += 1;
    }
    f
}

/// `Π_i Π_{ν=⌈d_i⌉}^{∞}(D_i + (d_i−ν)z) / Π_{ν=0}^{∞}(D_i + (d_i−ν)z) · 1_{v(d)}`.
pub fn hypergeometric_factor(model: &PicardModel, ring: &OrbifoldRing, d: &EffectiveDegree) -> Result<ZPoly> {
    let m = model.ext.m();
    let zero = vec![Rat::zero(); ring.dim()];
    let mut acc = ZPoly::new();
    acc.insert(0, ring.sector_class(&model.ext, &d.sector)?);
    for (i, u) in d.pairings.iter().enumerate() {
        let class = if i < m { ring.generator_class(i) } else { zero.clone() };
        let ceil = u.ceil().to_integer().to_i64().ok_or_else(|| Error::ResourceLimit("pairing too large".into()))?;
        if ceil <= 0 {
            for nu in ceil..0 {
                let c = u - Rat::from_integer(nu.into());
                acc = zpoly_mul(&acc, &linear_factor(&class, &c, ring), ring);
            }
        } else {
            for nu in 0..ceil {
                let c = u - Rat::from_integer(nu.into());
                if !c.is_positive() {
                    return Err(Error::Invariant(format!("uncancelled zero factor for generator {}", i + 1)));
                }
                acc = zpoly_mul(&acc, &inverse_factor(&class, &c, ring), ring);
            }
        }
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

/// `exp(Σ_a x_a L_a · s)` where `L_a` is a log variable and `s` a `z` shift.
fn log_exponential(classes: &[Vec<Rat>], ring: &OrbifoldRing, chi_vars: usize, log_chi: bool, order: u32) -> LogSeries {
    let dim = ring.dim();
    let mut acc = LogSeries::constant(ring.ring.one(), chi_vars, if log_chi { classes.len() } else { 0 }, order);
    for (a, x) in classes.iter().enumerate() {
        let mut factor = LogSeries::zero(dim, order);
        let mut power = ring.ring.one();
        let mut k = 0u32;
        while !is_zero_class(&power) {
            let mut log = vec![0u32; if log_chi { classes.len() } else { 0 }];
            let key = if log_chi {
                log[a] = k;
                SeriesKey { chi: vec![0; chi_vars], log_chi: log, z: -Rat::from_integer(k.into()), log_z: 0 }
            } else {
                SeriesKey { chi: vec![0; chi_vars], log_chi: log, z: Rat::zero(), log_z: k }
            };
            factor.add_term(key, scale_class(&power, &factorial(k).recip()));
            power = ring.ring.multiply(&power, x);
            k += 1;
        }
        acc = acc.mul(&factor, ring);
    }
    acc
}

/// `I = exp(Σ_{a≤r} p̄_a log χ_a / z) · Σ_{d ∈ 𝕂^eff} χ^{p(d)} · factor(d)`.
pub fn i_function(model: &PicardModel, ring: &OrbifoldRing, order: u32) -> Result<LogSeries> {
    let rank = model.rank();
    let r = model.r();
    let mut sum = LogSeries::zero(ring.dim(), order);
    for d in enumerate_degrees(model, order)? {
        for (q, class) in hypergeometric_factor(model, ring, &d)? {
            let key = SeriesKey { chi: d.p.clone(), log_chi: vec![0; r], z: Rat::from_integer(q.into()), log_z: 0 };
            sum.add_term(key, class);
        }
    }
    let p_bar = crate::operators::p_bar_classes(model, ring)?;
    let prefactor = log_exponential(&p_bar, ring, rank, true, order);
    Ok(prefactor.mul(&sum, ring))
}

/// `Ĩ = exp(−ρ̄ log z) ∪ z^μ(I)`.
pub fn tilde_i(series: &LogSeries, model: &PicardModel, ring: &OrbifoldRing) -> LogSeries {
    let rho: Vec<Rat> = ring.first_chern_class(model.ext.m()).into_iter().map(|x| -x).collect();
    let first = series.terms().keys().next();
    let (chi_vars, log_vars) = first.map_or((model.rank(), model.r()), |k| (k.chi.len(), k.log_chi.len()));
    let mut z_rho = log_exponential(&[rho], ring, chi_vars, false, series.order);
    for (k, _) in z_rho.terms.clone() {
        let c = z_rho.terms.remove(&k).expect("present");
        let key = SeriesKey { log_chi: vec![0; log_vars], ..k };
        z_rho.terms.insert(key, c);
    }
    series.apply_z_mu(ring).mul(&z_rho, ring)
}

/// Log-linear and analytic parts of the `z^{−1}` coefficient of `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorMap {
    pub log_linear: Vec<Vec<Rat>>,
    pub analytic: Vec<(Vec<u32>, Vec<Rat>)>,
    pub order: u32,
    /// Terms of the `z^{−1}` coefficient carrying `log χ` beyond the linear part.
    pub log_corrections: Vec<(SeriesKey, Vec<Rat>)>,
}

pub fn mirror_map(series: &LogSeries, ring: &OrbifoldRing) -> Result<MirrorMap> {
    if series.order < 1 {
        return Err(Error::Invariant("the mirror map needs order at least 1".into()));
    }
    let degrees = ring.ring.basis_degrees();
    let r = series.terms().keys().next().map_or(0, |k| k.log_chi.len());
    let mut log_linear = vec![vec![Rat::zero(); ring.dim()]; r];
    let mut analytic = Vec::new();
    let mut log_corrections = Vec::new();
    let minus_one = -Rat::one();
    for (k, c) in series.terms() {
        let constant_one = k.chi_degree() == 0
            && k.log_chi.iter().all(|&x| x == 0)
            && k.z.is_zero()
            && k.log_z == 0
            && *c == ring.ring.one();
        if constant_one {
            continue;
        }
        if k.z > minus_one || k.log_z > 0 {
            return Err(Error::Invariant(format!("I has a term beyond 1 + O(1/z): {k:?}")));
        }
        if k.z != minus_one {
            continue;
        }
        if c.iter().zip(&degrees).any(|(x, d)| !x.is_zero() && *d > Rat::one()) {
            return Err(Error::Invariant(format!("mirror map coefficient of {k:?} leaves H^≤2")));
        }
        let logs: u32 = k.log_chi.iter().sum();
        if logs == 0 {
            analytic.push((k.chi.clone(), c.clone()));
        } else if logs == 1 && k.chi_degree() == 0 {
            let a = k.log_chi.iter().position(|&x| x == 1).expect("one log");
            log_linear[a] = c.clone();
        } else {
            log_corrections.push((k.clone(), c.clone()));
        }
    }
    Ok(MirrorMap { log_linear, analytic, order: series.order, log_corrections })
}

/// Terms of `op(Ĩ)` surviving within the guaranteed order.
#[derive(Clone, Debug)]
pub struct Residual {
    pub order: u32,
    pub terms: Vec<(SeriesKey, Vec<Rat>)>,
}

impl Residual {
    pub fn vanishes(&self) -> bool {
        self.terms.is_empty()
    }
}

pub fn annihilation_check(op: &DiffOp, series: &LogSeries) -> Residual {
    let out = series.apply(op);
    Residual { order: out.order, terms: out.terms.into_iter().collect() }
}

/// Residuals of `Ě` and of `□^X_l` for the lattice basis, cone and primitive
/// relations, each complete through χ-order `order`.
pub fn annihilation_report(
    model: &PicardModel,
    ring: &OrbifoldRing,
    order: u32,
) -> Result<Vec<(String, Residual)>> {
    let ops = OperatorSystem::new(model);
    let mut named = vec![("euler".to_string(), ops.euler_op())];
    let (cone, primitive, basis) = crate::operators::relation_families(model, ring)?;
    for (name, ls) in [("lattice_basis", basis), ("cone", cone), ("primitive", primitive)] {
        for l in ls {
            let label = format!("{name} {:?}", l.iter().map(ToString::to_string).collect::<Vec<_>>());
            named.push((label, ops.box_x(&l)?));
        }
    }
    let depth = order + named.iter().map(|(_, op)| op.max_chi_lowering()).max().unwrap_or(0);
    let tilde = tilde_i(&i_function(model, ring, depth)?, model, ring);
    Ok(named
        .into_iter()
        .map(|(label, op)| {
            let mut residual = annihilation_check(&op, &tilde.truncate(order + op.max_chi_lowering()));
            residual.terms.retain(|(k, _)| k.chi_degree() <= order);
            residual.order = order;
            (label, residual)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::presentation;
    use crate::corpus;
    use crate::fan::ExtendedFan;
    use crate::linalg::rat;

    fn setup(f: crate::fan::StackyFan) -> (PicardModel, OrbifoldRing) {
        let ext = ExtendedFan::new(f).unwrap();
        let coh = presentation(&ext).unwrap();
        (PicardModel::new(ext).unwrap(), coh)
    }

    #[test]
    fn projective_line_degrees() {
        let (pm, _) = setup(corpus::p1());
        let ds = enumerate_degrees(&pm, 2).unwrap();
        let ps: Vec<Vec<u32>> = ds.iter().map(|d| d.p.clone()).collect();
        assert_eq!(ps, vec![vec![0], vec![1], vec![2]]);
        assert!(ds.iter().all(|d| d.sector == vec![0]));
        assert_eq!(enumerate_degrees(&pm, 0).unwrap().len(), 1);
    }

    #[test]
    fn weighted_plane_twisted_degree() {
        let (pm, _) = setup(corpus::p112());
        let ds = enumerate_degrees(&pm, 1).unwrap();
        assert!(ds.iter().any(|d| d.p == vec![0, 1] && d.sector == vec![0, -1]));
    }

    #[test]
    fn zero_degree_factor_is_one() {
        let (pm, coh) = setup(corpus::p2());
        let d = EffectiveDegree { p: vec![0], pairings: vec![rat(0, 1); 3], sector: vec![0, 0] };
        let f = hypergeometric_factor(&pm, &coh, &d).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[&0], coh.ring.one());
    }

    #[test]
    fn annihilated_on_corpus() {
        for (name, f) in corpus::named() {
            let (pm, coh) = setup(f);
            for (label, res) in annihilation_report(&pm, &coh, 3).unwrap() {
                assert!(res.vanishes(), "{name} {label}: {:?}", res.terms.first());
            }
        }
    }

    #[test]
    fn mirror_map_of_projective_plane_is_log_linear() {
        let (pm, coh) = setup(corpus::p2());
        let i = i_function(&pm, &coh, 4).unwrap();
        let mm = mirror_map(&i, &coh).unwrap();
        assert!(mm.analytic.is_empty());
        assert_eq!(mm.log_linear[0], coh.generator_class(0));
    }
}
