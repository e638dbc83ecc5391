//! Piecewise-linear functions, (extended) Picard groups, Kähler cones, the
//! basis `p_1..p_{r+e}` and the Mori-side lattices.
//!
//! Coordinates: `𝕃 ⊂ ℤⁿ` carries its Hermite basis `L_1..L_{r+e}`; a
//! functional `x ∈ (ℤⁿ)*` maps to `𝕃*` as `(x·L_a)_a ∈ ℤ^{r+e}`. Classes in
//! `Pic(X) ⊗ ℚ` are written in the coordinates `κ = L_X y` where `L_X` is the
//! Hermite basis of the unextended relation lattice and `y ∈ ℚ^m` are values
//! on the rays.

use crate::cone::RationalCone;
use crate::error::{Error, Result};
use crate::fan::ExtendedFan;
use crate::linalg::{
    dot, hermite_basis, hermite_coordinates, kernel_basis, primitive_integer, rat_from_int, rat_inverse,
    rat_mat_vec, rat_matrix_from_ints, rat_solve, rat_to_int, rat_transpose, splitting_maps, to_int_vec, Int,
    IntMatrix, Rat, RatMatrix,
};
use crate::lp::{nonnegative_combination, LinearProgram, LpOutcome, Relation};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Lattices and cones attached to an extended fan, independent of any basis
/// choice.
#[derive(Clone, Debug)]
pub struct PicardData {
    /// Hermite basis of `𝕃`, `(r+e) × n`.
    pub relations: Vec<Vec<Int>>,
    /// Hermite basis of the unextended relation lattice, `r × m`.
    pub base_relations: Vec<Vec<Int>>,
    /// `Θ(PL(Σ)) ⊂ (ℤⁿ)*`.
    pub pl_basis: Vec<Vec<Int>>,
    /// `PL(Σ^e) = Θ(PL(Σ)) + Σ ℤ e*_{m+k}`.
    pub extended_pl_basis: Vec<Vec<Int>>,
    /// `Pic^e(X)` inside `𝕃* = ℤ^{r+e}`.
    pub pic_basis: Vec<Vec<Int>>,
    /// `θ(Pic(X))` inside `ℤ^{r+e}`.
    pub theta_pic_basis: Vec<Vec<Int>>,
    /// `Pic(X)` in κ-coordinates.
    pub kappa_pic_basis: Vec<Vec<Int>>,
    /// Wall inequalities of the Kähler cone in κ-coordinates.
    pub wall_inequalities: Vec<Vec<Int>>,
    /// Kähler cone in κ-coordinates.
    pub kahler_kappa: RationalCone,
    /// The map `θ: Pic(X)⊗ℚ → Pic^e(X)⊗ℚ` in κ-coordinates, `(r+e) × r`.
    pub theta: RatMatrix,
    /// `θ(𝒦) ⊂ ℚ^{r+e}`.
    pub kahler: RationalCone,
    /// `𝒦^e = θ(𝒦) + Σ ℚ_{≥0}[D_{m+k}]`.
    pub kahler_extended: RationalCone,
    /// `ρ = Σ_i [D_i]` in `ℤ^{r+e}`.
    pub rho: Vec<Int>,
    /// `ρ̄` in κ-coordinates.
    pub rho_bar: Vec<Rat>,
}

impl PicardData {
    pub fn r(&self) -> usize {
        self.base_relations.len()
    }

    pub fn rank(&self) -> usize {
        self.relations.len()
    }

    /// `[D_i] = (L_a[i])_a`.
    pub fn divisor_class(&self, i: usize) -> Vec<Int> {
        self.relations.iter().map(|l| l[i].clone()).collect()
    }

    /// Image in `𝕃*` of a functional on `ℤⁿ`.
    pub fn functional_class(&self, x: &[Rat]) -> Vec<Rat> {
        self.relations
            .iter()
            .map(|l| l.iter().zip(x).fold(Rat::zero(), |acc, (a, b)| acc + rat_from_int(a) * b))
            .collect()
    }

    pub fn theta_of(&self, kappa: &[Rat]) -> Vec<Rat> {
        rat_mat_vec(&self.theta, kappa)
    }

    pub fn in_kahler_kappa(&self, kappa: &[Rat]) -> bool {
        self.wall_inequalities
            .iter()
            .all(|w| !w.iter().zip(kappa).fold(Rat::zero(), |a, (x, y)| a + rat_from_int(x) * y).is_negative())
    }
}

/// Denominator-cleared distinguished relations `a_{m+k} − Σ r_{kj} a_j`.
fn distinguished_relations(ext: &ExtendedFan) -> Vec<Vec<Int>> {
    let (m, n) = (ext.m(), ext.n());
    ext.extra_coordinates()
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let mut v = vec![Rat::zero(); n];
            for j in 0..m {
                v[j] = -r[j].clone();
            }
            v[m + k] = Rat::one();
            primitive_integer(&v)
        })
        .collect()
}

/// ℤ-basis of `Θ(PL(Σ)) = {x ∈ (ℤⁿ)* : x(l_k) = 0 for all k}`.
pub fn pl_lattice(ext: &ExtendedFan) -> Vec<Vec<Int>> {
    let n = ext.n();
    let rels = distinguished_relations(ext);
    if rels.is_empty() {
        return (0..n).map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect()).collect();
    }
    kernel_basis(&IntMatrix::from_rows(&rels, n))
}

/// `Θ(y) = (y, R y)` for values `y` on the rays.
pub fn theta_values(ext: &ExtendedFan, y: &[Rat]) -> Vec<Rat> {
    let mut out = y.to_vec();
    for r in ext.extra_coordinates() {
        out.push(dot(&r, y));
    }
    out
}

pub fn picard_data(ext: &ExtendedFan) -> Result<PicardData> {
    let (m, n) = (ext.m(), ext.n());
    let relations = ext.relations().to_vec();
    let apply_l = |x: &[Int]| -> Vec<Int> {
        relations.iter().map(|l| l.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    };
    let pl_basis = pl_lattice(ext);
    let mut ext_gens = pl_basis.clone();
    for k in m..n {
        let mut v = vec![Int::zero(); n];
        v[k] = Int::one();
        ext_gens.push(v);
    }
    let extended_pl_basis = hermite_basis(&ext_gens);
    let pic_basis = hermite_basis(&extended_pl_basis.iter().map(|x| apply_l(x)).collect::<Vec<_>>());
    let theta_pic_basis = hermite_basis(&pl_basis.iter().map(|x| apply_l(x)).collect::<Vec<_>>());

    let base_matrix = IntMatrix::from_columns(
        &(0..m).map(|i| to_int_vec(ext.generator(i))).collect::<Vec<_>>(),
        ext.rank(),
    );
    let base_relations = kernel_basis(&base_matrix);
    let r = base_relations.len();
    let kappa_of = |y: &[Int]| -> Vec<Int> {
        base_relations.iter().map(|l| l.iter().zip(y).map(|(a, b)| a * b).sum()).collect()
    };
    let kappa_pic_basis = hermite_basis(&pl_basis.iter().map(|x| kappa_of(&x[..m])).collect::<Vec<_>>());

    let lx_t = rat_transpose(&rat_matrix_from_ints(&base_relations), m);
    let mut wall_inequalities: Vec<Vec<Int>> = Vec::new();
    for wall in ext.base().walls() {
        let c: Vec<Rat> = ext.base().wall_relation(&wall).iter().map(rat_from_int).collect();
        let w = rat_solve(&lx_t, r, &c).ok_or_else(|| Error::Invariant("wall relation outside relation lattice".into()))?;
        let w = primitive_integer(&w);
        if !wall_inequalities.contains(&w) {
            wall_inequalities.push(w);
        }
    }
    wall_inequalities.sort();
    let ineq_rat = rat_matrix_from_ints(&wall_inequalities);
    check_interior(&ineq_rat, r)?;
    let kahler_kappa = RationalCone::from_inequalities(r, ineq_rat)?;

    let lx = rat_matrix_from_ints(&base_relations);
    let lrat = rat_matrix_from_ints(&relations);
    let mut theta_cols = Vec::with_capacity(r);
    for b in 0..r {
        let unit: Vec<Rat> = (0..r).map(|i| if i == b { Rat::one() } else { Rat::zero() }).collect();
        let y = rat_solve(&lx, m, &unit).ok_or_else(|| Error::Invariant("κ-coordinates not surjective".into()))?;
        theta_cols.push(rat_mat_vec(&lrat, &theta_values(ext, &y)));
    }
    let rank = relations.len();
    let theta: RatMatrix = (0..rank).map(|a| theta_cols.iter().map(|c| c[a].clone()).collect()).collect();
    let kahler = kahler_kappa.map(&theta, rank)?;
    let mut ext_cone_gens = kahler.generators().to_vec();
    for k in m..n {
        ext_cone_gens.push(relations.iter().map(|l| rat_from_int(&l[k])).collect());
    }
    let kahler_extended = RationalCone::from_generators(rank, ext_cone_gens)?;
    let ones = vec![Int::one(); n];
    let rho = apply_l(&ones);
    let rho_bar: Vec<Rat> = kappa_of(&ones[..m]).iter().map(rat_from_int).collect();
    Ok(PicardData {
        relations,
        base_relations,
        pl_basis,
        extended_pl_basis,
        pic_basis,
        theta_pic_basis,
        kappa_pic_basis,
        wall_inequalities,
        kahler_kappa,
        theta,
        kahler,
        kahler_extended,
        rho,
        rho_bar,
    })
}

fn check_interior(ineqs: &RatMatrix, dim: usize) -> Result<()> {
    let mut lp = LinearProgram::new(dim).all_free();
    for h in ineqs {
        lp.constrain(h.clone(), Relation::Ge, Rat::one());
    }
    match lp.solve() {
        LpOutcome::Infeasible => Err(Error::EmptyInterior),
        _ => Ok(()),
    }
}

/// Both verdicts on `ρ ∈ 𝒦^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoMembership {
    pub by_lp: bool,
    pub by_degree: bool,
}

pub fn rho_membership(ext: &ExtendedFan, data: &PicardData) -> Result<RhoMembership> {
    let rho: Vec<Rat> = data.rho.iter().map(rat_from_int).collect();
    let by_lp = data.kahler_extended.contains(&rho)?;
    let by_degree =
        data.in_kahler_kappa(&data.rho_bar) && ext.extra().iter().all(|b| b.age <= Rat::one());
    Ok(RhoMembership { by_lp, by_degree })
}

/// A basis `p_1..p_{r+e}` of `Pic^e(X)` with `p_1..p_r ∈ θ(𝒦)`,
/// `p_{r+k} = [D_{m+k}]` and `ρ ∈ Cone(p)`, plus derived matrices.
#[derive(Clone, Debug)]
pub struct PBasis {
    /// κ-coordinates of `p_1..p_r`.
    pub kappa: Vec<Vec<Int>>,
    /// `p_1..p_{r+e}` in `ℤ^{r+e}`.
    pub p: Vec<Vec<Int>>,
    /// `M = (m_{ia})`, `n × (r+e)`, with `[D_i] = Σ_a m_{ia} p_a`.
    pub m: RatMatrix,
    /// `N = (n_{ai})`, `(r+e) × n`, superpotential exponents.
    pub n: Vec<Vec<Int>>,
    pub user_supplied: bool,
}

const SEARCH_BOUND: i64 = 4;

/// Deterministic search for p-basis; see [`validate_basis`].
pub fn choose_basis_p(ext: &ExtendedFan, data: &PicardData) -> Result<PBasis> {
    let membership = rho_membership(ext, data)?;
    if !membership.by_lp {
        return Err(Error::NotNef("ρ is not in the extended Kähler cone".into()));
    }
    let r = data.r();
    let lattice = &data.kappa_pic_basis;
    let lattice_rat = rat_matrix_from_ints(lattice);
    let lattice_t = rat_transpose(&lattice_rat, r);
    let to_point = |c: &[Int]| -> Vec<Int> {
        (0..r).map(|j| c.iter().zip(lattice).map(|(ci, b)| ci * &b[j]).sum()).collect()
    };
    let mut candidates: Vec<Vec<Int>> = Vec::new();
    for ray in data.kahler_kappa.generators() {
        if let Some(c) = rat_solve(&lattice_t, r, ray) {
            candidates.push(primitive_integer(&c));
        }
    }
    if let Some(b) = try_subsets(&candidates, r, data, &to_point, candidates.len()) {
        return finish_basis(ext, data, b, false);
    }
    let mut grid: Vec<Vec<Int>> = vec![vec![]];
    for _ in 0..r {
        grid = grid
            .into_iter()
            .flat_map(|p| {
                (-SEARCH_BOUND..=SEARCH_BOUND).map(move |x| {
                    let mut q = p.clone();
                    q.push(Int::from(x));
                    q
                })
            })
            .collect();
    }
    let mut lattice_points: Vec<Vec<Int>> = grid
        .into_iter()
        .filter(|c| c.iter().any(|x| !x.is_zero()))
        .filter(|c| {
            let g = c.iter().fold(Int::zero(), |a, x| a.gcd(x));
            g.is_one()
        })
        .filter(|c| data.in_kahler_kappa(&to_point(c).iter().map(rat_from_int).collect::<Vec<_>>()))
        .collect();
    lattice_points.sort_by(|a, b| {
        let na: Int = a.iter().map(|x| x.abs()).sum();
        let nb: Int = b.iter().map(|x| x.abs()).sum();
        na.cmp(&nb).then_with(|| a.cmp(b))
    });
    lattice_points.truncate(40);
    match try_subsets(&lattice_points, r, data, &to_point, lattice_points.len()) {
        Some(b) => finish_basis(ext, data, b, false),
        None => Err(Error::BasisSearch(format!(
            "no unimodular nef basis of Pic(X) containing ρ̄ among {} lattice points with coordinates in [-{SEARCH_BOUND}, {SEARCH_BOUND}]; supply one with --basis-file",
            lattice_points.len()
        ))),
    }
}

fn try_subsets(
    cands: &[Vec<Int>],
    r: usize,
    data: &PicardData,
    to_point: &dyn Fn(&[Int]) -> Vec<Int>,
    limit: usize,
) -> Option<Vec<Vec<Int>>> {
    for subset in crate::cone::subsets(limit.min(cands.len()), r) {
        let coeffs: Vec<Vec<Int>> = subset.iter().map(|&i| cands[i].clone()).collect();
        if !crate::linalg::determinant(&coeffs).abs().is_one() {
            continue;
        }
        let points: Vec<Vec<Int>> = coeffs.iter().map(|c| to_point(c)).collect();
        let pts_t = rat_transpose(&rat_matrix_from_ints(&points), r);
        if let Some(lambda) = rat_solve(&pts_t, r, &data.rho_bar) {
            if lambda.iter().all(|x| !x.is_negative()) {
                return Some(points);
            }
        }
    }
    None
}

/// Accepts `p_1..p_r` in κ-coordinates after validation.
pub fn basis_from_kappa(ext: &ExtendedFan, data: &PicardData, kappa: Vec<Vec<Int>>) -> Result<PBasis> {
    finish_basis(ext, data, kappa, true)
}

fn finish_basis(ext: &ExtendedFan, data: &PicardData, kappa: Vec<Vec<Int>>, user: bool) -> Result<PBasis> {
    let (r, rank, n, m) = (data.r(), data.rank(), ext.n(), ext.m());
    if kappa.len() != r || kappa.iter().any(|k| k.len() != r) {
        return Err(Error::InvalidBasis(format!("expected {r} vectors of length {r}")));
    }
    let mut p: Vec<Vec<Int>> = Vec::with_capacity(rank);
    for k in &kappa {
        let img = data.theta_of(&k.iter().map(rat_from_int).collect::<Vec<_>>());
        let ints: Option<Vec<Int>> = img.iter().map(rat_to_int).collect();
        p.push(ints.ok_or_else(|| Error::InvalidBasis(format!("θ({k:?}) is not integral")))?);
    }
    for k in m..n {
        p.push(data.divisor_class(k));
    }
    let basis = PBasis { kappa, p, m: Vec::new(), n: Vec::new(), user_supplied: user };
    let basis = with_matrices(ext, data, basis)?;
    validate_basis(ext, data, &basis)?;
    Ok(basis)
}

fn with_matrices(ext: &ExtendedFan, data: &PicardData, mut basis: PBasis) -> Result<PBasis> {
    let rank = data.rank();
    let p_cols = rat_transpose(&rat_matrix_from_ints(&basis.p), rank);
    let p_inv = rat_inverse(&p_cols).ok_or_else(|| Error::InvalidBasis("p-vectors are linearly dependent".into()))?;
    basis.m = (0..ext.n())
        .map(|i| {
            let d: Vec<Rat> = data.divisor_class(i).iter().map(rat_from_int).collect();
            rat_mat_vec(&p_inv, &d)
        })
        .collect();
    let split = splitting_maps(ext.matrix())?;
    basis.n = (0..rank)
        .map(|a| (0..ext.n()).map(|i| (0..rank).map(|b| &basis.p[a][b] * split.section.get(b, i)).sum()).collect())
        .collect();
    Ok(basis)
}

/// Checks the three basis conditions exactly.
pub fn validate_basis(ext: &ExtendedFan, data: &PicardData, basis: &PBasis) -> Result<()> {
    let (r, m) = (data.r(), ext.m());
    let pic = &data.kappa_pic_basis;
    let mut coords = Vec::with_capacity(r);
    for k in &basis.kappa {
        if !data.in_kahler_kappa(&k.iter().map(rat_from_int).collect::<Vec<_>>()) {
            return Err(Error::InvalidBasis(format!("{k:?} is not in the Kähler cone")));
        }
        coords.push(
            hermite_coordinates(pic, k).ok_or_else(|| Error::InvalidBasis(format!("{k:?} is not in Pic(X)")))?,
        );
    }
    if !crate::linalg::determinant(&coords).abs().is_one() {
        return Err(Error::InvalidBasis("vectors do not form a ℤ-basis of Pic(X)".into()));
    }
    let rho: Vec<Rat> = data.rho.iter().map(rat_from_int).collect();
    let gens: Vec<Vec<Rat>> = basis.p.iter().map(|v| v.iter().map(rat_from_int).collect()).collect();
    if nonnegative_combination(&gens, &rho).is_none() {
        return Err(Error::InvalidBasis("ρ is not in Cone(p)".into()));
    }
    for (k, row) in basis.m[m..].iter().enumerate() {
        for (a, x) in row.iter().enumerate() {
            let expect = if a == r + k { Rat::one() } else { Rat::zero() };
            if *x != expect {
                return Err(Error::Invariant("M row of an extra generator is not a unit vector".into()));
            }
        }
    }
    Ok(())
}

/// A term `−χ^{n_i} y^{a_i}` of the superpotential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperpotentialTerm {
    pub coefficient: i64,
    pub chi_exponent: Vec<Int>,
    pub y_exponent: Vec<i64>,
}

pub fn superpotential(ext: &ExtendedFan, basis: &PBasis) -> Vec<SuperpotentialTerm> {
    (0..ext.n())
        .map(|i| SuperpotentialTerm {
            coefficient: -1,
            chi_exponent: basis.n.iter().map(|row| row[i].clone()).collect(),
            y_exponent: ext.generator(i).to_vec(),
        })
        .collect()
}

/// Extended fan together with its Picard data and chosen basis; all
/// Mori-side computations live here.
#[derive(Clone, Debug)]
pub struct PicardModel {
    pub ext: ExtendedFan,
    pub data: PicardData,
    pub basis: PBasis,
}

/// One row of the `𝕂/𝕃 ↔ Box` table.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetEntry {
    pub box_vector: Vec<i64>,
    /// `p(d_v)`.
    pub degree: Vec<Rat>,
    /// `⟨D_i, d_v⟩`.
    pub pairings: Vec<Rat>,
    pub round_trip: Vec<i64>,
}

impl PicardModel {
    pub fn new(ext: ExtendedFan) -> Result<Self> {
        let data = picard_data(&ext)?;
        let basis = choose_basis_p(&ext, &data)?;
        Ok(PicardModel { ext, data, basis })
    }

    pub fn with_kappa_basis(ext: ExtendedFan, kappa: Vec<Vec<Int>>) -> Result<Self> {
        let data = picard_data(&ext)?;
        let basis = basis_from_kappa(&ext, &data, kappa)?;
        Ok(PicardModel { ext, data, basis })
    }

    pub fn r(&self) -> usize {
        self.data.r()
    }

    pub fn e(&self) -> usize {
        self.ext.e()
    }

    pub fn rank(&self) -> usize {
        self.data.rank()
    }

    /// `⟨D_i, d⟩ = Σ_a m_{ia} p_a(d)`.
    pub fn pairings(&self, pd: &[Rat]) -> Vec<Rat> {
        rat_mat_vec(&self.basis.m, pd)
    }

    /// `p(d)` from `𝕃`-coordinates `c`: `p_a(d) = Σ_b p_a[b] c_b`.
    pub fn p_of_lattice(&self, c: &[Rat]) -> Vec<Rat> {
        self.basis.p.iter().map(|pa| pa.iter().zip(c).fold(Rat::zero(), |s, (x, y)| s + rat_from_int(x) * y)).collect()
    }

    /// `p(d)` of a vector `u ∈ 𝕃 ⊗ ℚ ⊂ ℚⁿ`.
    pub fn p_of_relation(&self, u: &[Rat]) -> Result<Vec<Rat>> {
        let lt = rat_transpose(&rat_matrix_from_ints(&self.data.relations), self.ext.n());
        let c = rat_solve(&lt, self.rank(), u).ok_or_else(|| Error::Invariant(format!("{u:?} is not in 𝕃⊗ℚ")))?;
        Ok(self.p_of_lattice(&c))
    }

    fn set_in_anticones(&self, flags: &[bool]) -> bool {
        self.ext.is_extended_anticone(flags)
    }

    pub fn in_k(&self, pd: &[Rat]) -> bool {
        let flags: Vec<bool> = self.pairings(pd).iter().map(Rat::is_integer).collect();
        self.set_in_anticones(&flags)
    }

    pub fn in_k_eff(&self, pd: &[Rat]) -> bool {
        let flags: Vec<bool> =
            self.pairings(pd).iter().map(|x| x.is_integer() && !x.is_negative()).collect();
        self.set_in_anticones(&flags)
    }

    /// `d ∈ NE^e` iff all `p_a(d)` are integers.
    pub fn in_ne(&self, pd: &[Rat]) -> bool {
        pd.iter().all(Rat::is_integer)
    }

    /// Dual basis `q_a` in `𝕃 ⊗ ℚ` coordinates.
    pub fn dual_basis(&self) -> Vec<Vec<Rat>> {
        let rank = self.rank();
        let p_rows = rat_matrix_from_ints(&self.basis.p);
        let inv = rat_inverse(&p_rows).expect("p is a basis");
        (0..rank).map(|a| (0..rank).map(|b| inv[b][a].clone()).collect()).collect()
    }

    /// `v(d) = Σ ⌈⟨D_i,d⟩⌉ a_i`.
    pub fn ceiling_vector(&self, pd: &[Rat]) -> Vec<i64> {
        let d = self.ext.rank();
        let mut v = vec![0i64; d];
        for (i, x) in self.pairings(pd).iter().enumerate() {
            let c = i64::try_from(x.ceil().to_integer()).expect("small pairing");
            for (vk, gk) in v.iter_mut().zip(self.ext.generator(i)) {
                *vk += c * gk;
            }
        }
        v
    }

    /// Representative `d_v ∈ 𝕂` of the coset of a box element, as `p(d_v)`.
    pub fn box_representative(&self, v: &[i64]) -> Result<Vec<Rat>> {
        let n = self.ext.n();
        if v.iter().all(|&x| x == 0) {
            return Ok(vec![Rat::zero(); self.rank()]);
        }
        let (cone, coords) = self.ext.base().minimal_cone(v)?;
        let dec = self
            .ext
            .nonnegative_decomposition(v)
            .ok_or_else(|| Error::Invariant(format!("no decomposition of {v:?}")))?;
        let mut u: Vec<Rat> = dec.iter().map(|&x| Rat::from_integer(x.into())).collect();
        for (ray, r) in cone.iter().zip(&coords) {
            u[*ray] -= r;
        }
        debug_assert_eq!(u.len(), n);
        let pd = self.p_of_relation(&u)?;
        if !self.in_ne(&pd) {
            return Err(Error::Invariant(format!("d_v for {v:?} is not in NE^e")));
        }
        Ok(pd)
    }

    pub fn box_coset_table(&self) -> Result<Vec<CosetEntry>> {
        let mut out = Vec::new();
        for b in self.ext.box_elements() {
            let degree = self.box_representative(&b.vector)?;
            if !self.in_k(&degree) {
                return Err(Error::Invariant(format!("d_v for {:?} is not in 𝕂", b.vector)));
            }
            let round_trip = self.ceiling_vector(&degree);
            if round_trip != b.vector {
                return Err(Error::Invariant(format!("v(d_v) = {round_trip:?} ≠ {:?}", b.vector)));
            }
            out.push(CosetEntry { box_vector: b.vector.clone(), pairings: self.pairings(&degree), degree, round_trip });
        }
        for (i, a) in out.iter().enumerate() {
            for b in &out[i + 1..] {
                let diff: Vec<Rat> = a.pairings.iter().zip(&b.pairings).map(|(x, y)| x - y).collect();
                if diff.iter().all(Rat::is_integer) {
                    return Err(Error::Invariant("two box elements share a 𝕂/𝕃 coset".into()));
                }
            }
        }
        Ok(out)
    }

    /// `p(l)` for a relation `l ∈ 𝕃 ⊂ ℤⁿ`.
    pub fn p_of_integer_relation(&self, l: &[Int]) -> Result<Vec<Rat>> {
        self.p_of_relation(&l.iter().map(rat_from_int).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::linalg::rat;

    fn model(f: crate::fan::StackyFan) -> PicardModel {
        PicardModel::new(ExtendedFan::new(f).unwrap()).unwrap()
    }

    #[test]
    fn pl_lattices() {
        let ext = ExtendedFan::new(corpus::p112()).unwrap();
        assert_eq!(pl_lattice(&ext).len(), 3);
        let ext = ExtendedFan::new(corpus::p2()).unwrap();
        assert_eq!(pl_lattice(&ext).len(), 3);
    }

    #[test]
    fn projective_line_basis() {
        let pm = model(corpus::p1());
        assert_eq!(pm.basis.m, vec![vec![rat(1, 1)], vec![rat(1, 1)]]);
        assert!(pm.in_k_eff(&[rat(1, 1)]));
        let w = superpotential(&pm.ext, &pm.basis);
        assert_eq!(w[0].chi_exponent, vec![Int::from(1)]);
        assert_eq!(w[1].chi_exponent, vec![Int::from(0)]);
    }

    #[test]
    fn weighted_plane_basis() {
        let pm = model(corpus::p112());
        assert_eq!(pm.basis.m[3], vec![rat(0, 1), rat(1, 1)]);
        let table = pm.box_coset_table().unwrap();
        assert_eq!(table.len(), 2);
        let twisted = table.iter().find(|t| t.box_vector == vec![0, -1]).unwrap();
        assert_eq!(twisted.pairings, vec![rat(-1, 2), rat(0, 1), rat(-1, 2), rat(1, 1)]);
    }

    #[test]
    fn rho_membership_verdicts() {
        for (name, f) in corpus::named() {
            let ext = ExtendedFan::new(f).unwrap();
            let data = picard_data(&ext).unwrap();
            assert_eq!(rho_membership(&ext, &data).unwrap(), RhoMembership { by_lp: true, by_degree: true }, "{name}");
        }
        let ext = ExtendedFan::new(corpus::f3()).unwrap();
        let data = picard_data(&ext).unwrap();
        assert_eq!(rho_membership(&ext, &data).unwrap(), RhoMembership { by_lp: false, by_degree: false });
    }

    #[test]
    fn kahler_cone_dimensions() {
        let ext = ExtendedFan::new(corpus::f2()).unwrap();
        let data = picard_data(&ext).unwrap();
        assert_eq!(data.kahler.dimension(), 2);
        let ext = ExtendedFan::new(corpus::p2()).unwrap();
        assert_eq!(picard_data(&ext).unwrap().kahler.generators().len(), 1);
    }
}
