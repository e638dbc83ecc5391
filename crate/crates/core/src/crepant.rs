//! Crepant resolutions of toric orbifolds and the global Kähler moduli fan.

use crate::cone::{face_certificate, FaceCertificate, RationalCone};
use crate::error::{Error, Result};
use crate::fan::{ExtendedFan, StackyFan};
use crate::linalg::{determinant, rat_from_int, rat_inverse, rat_matrix_from_ints, rat_transpose, Int, Rat, RatMatrix};
use crate::picard::{picard_data, PicardData, PicardModel};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// An orbifold fan `X` and a refinement `Z` whose ray list starts with the
/// rays of `X` (in order) followed by the new rays.
#[derive(Clone, Debug)]
pub struct ResolutionPair {
    pub orbifold: StackyFan,
    pub resolution: StackyFan,
}

impl ResolutionPair {
    pub fn new(orbifold: StackyFan, resolution: StackyFan) -> Result<Self> {
        if orbifold.rank() != resolution.rank() {
            return Err(Error::DimensionMismatch { expected: orbifold.rank(), found: resolution.rank() });
        }
        for (name, f) in [("orbifold", &orbifold), ("resolution", &resolution)] {
            let report = f.validate();
            if !report.is_valid() {
                let msgs: Vec<String> = report.issues.iter().map(ToString::to_string).collect();
                return Err(Error::InvalidFan(format!("{name}: {}", msgs.join("; "))));
            }
        }
        let zr = resolution.rays();
        let mut order: Vec<usize> = Vec::with_capacity(zr.len());
        for (i, a) in orbifold.rays().iter().enumerate() {
            let j = zr
                .iter()
                .position(|b| b == a)
                .ok_or_else(|| Error::InvalidFan(format!("ray {} of the orbifold is not a ray of the resolution", i + 1)))?;
            order.push(j);
        }
        let fresh: Vec<usize> = (0..zr.len()).filter(|j| !order.contains(j)).collect();
        order.extend(fresh);
        let rays: Vec<Vec<i64>> = order.iter().map(|&j| zr[j].clone()).collect();
        let cones: Vec<Vec<usize>> = resolution
            .cones()
            .iter()
            .map(|c| c.iter().map(|j| order.iter().position(|o| o == j).expect("permutation")).collect())
            .collect();
        let resolution = StackyFan::new(resolution.rank(), rays, cones)?;
        for (k, cone) in resolution.cones().iter().enumerate() {
            let inside = (0..orbifold.cones().len()).any(|c| {
                cone.iter().all(|&j| orbifold.cone_coordinates(c, resolution.ray(j)).iter().all(|x| !x.is_negative()))
            });
            if !inside {
                return Err(Error::NotContained {
                    inner: format!("cone {} of the resolution", k + 1),
                    outer: "any cone of the orbifold fan".into(),
                });
            }
        }
        Ok(ResolutionPair { orbifold, resolution })
    }

    pub fn new_rays(&self) -> Vec<Vec<i64>> {
        self.resolution.rays()[self.orbifold.rays().len()..].to_vec()
    }
}

/// Position of a new ray in the minimal orbifold cone containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrepancyWitness {
    pub ray: Vec<i64>,
    pub cone: Vec<usize>,
    pub coordinates: Vec<Rat>,
    pub degree: Rat,
    pub discrepancy: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrepancyReport {
    pub crepant: bool,
    pub witnesses: Vec<CrepancyWitness>,
}

/// Every new ray has degree 1 in its minimal orbifold cone.
pub fn is_crepant(pair: &ResolutionPair) -> Result<CrepancyReport> {
    let mut witnesses = Vec::new();
    for ray in pair.new_rays() {
        let (cone, coordinates) = pair.orbifold.minimal_cone(&ray)?;
        let degree: Rat = coordinates.iter().sum();
        let discrepancy = &degree - Rat::one();
        witnesses.push(CrepancyWitness { ray, cone, coordinates, degree, discrepancy });
    }
    Ok(CrepancyReport { crepant: witnesses.iter().all(|w| w.discrepancy.is_zero()), witnesses })
}

/// All box elements have integral age.
pub fn check_sl(fan: &StackyFan) -> bool {
    fan.box_elements().iter().all(|b| b.age.is_integer())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenComparison {
    pub equal: bool,
    pub only_in_gen: Vec<Vec<i64>>,
    pub only_in_new_rays: Vec<Vec<i64>>,
}

pub fn check_gen_equals_new_rays(pair: &ResolutionPair) -> GenComparison {
    let gen: BTreeSet<Vec<i64>> = pair.orbifold.gen_elements().into_iter().map(|b| b.vector).collect();
    let new: BTreeSet<Vec<i64>> = pair.new_rays().into_iter().collect();
    let only_in_gen: Vec<Vec<i64>> = gen.difference(&new).cloned().collect();
    let only_in_new_rays: Vec<Vec<i64>> = new.difference(&gen).cloned().collect();
    GenComparison { equal: only_in_gen.is_empty() && only_in_new_rays.is_empty(), only_in_gen, only_in_new_rays }
}

/// Both sides of the pair on the common lattice `𝕃`.
#[derive(Clone, Debug)]
pub struct PairModels {
    pub orbifold: PicardModel,
    pub resolution: PicardData,
}

/// Extends `X` by the new rays of `Z` and checks both share `𝕃`.
pub fn pair_models(pair: &ResolutionPair, kappa_basis: Option<Vec<Vec<Int>>>) -> Result<PairModels> {
    let ext = ExtendedFan::with_generators(pair.orbifold.clone(), pair.new_rays())?;
    let orbifold = match kappa_basis {
        Some(k) => PicardModel::with_kappa_basis(ext, k)?,
        None => PicardModel::new(ext)?,
    };
    let resolution = picard_data(&ExtendedFan::with_generators(pair.resolution.clone(), vec![])?)?;
    if resolution.relations != orbifold.data.relations {
        return Err(Error::Invariant("the relation lattices of the pair differ".into()));
    }
    Ok(PairModels { orbifold, resolution })
}

/// `[D_i] ∉ 𝒦_Z` for every new ray, as `(generator index, verdict)`.
pub fn exceptional_not_in_kahler(pair: &ResolutionPair, models: &PairModels) -> Result<Vec<(usize, bool)>> {
    let m = pair.orbifold.rays().len();
    (m..pair.resolution.rays().len())
        .map(|i| {
            let d: Vec<Rat> = models.resolution.divisor_class(i).iter().map(rat_from_int).collect();
            Ok((i, !models.resolution.kahler.contains(&d)?))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct GlobalModuliFan {
    pub p: Vec<Vec<Int>>,
    pub q: Vec<Vec<Int>>,
    /// `q_i = Σ_j t_{ij} p_j`.
    pub transition: Vec<Vec<Int>>,
    pub cone_x: RationalCone,
    pub cone_z: RationalCone,
    pub intersection: RationalCone,
    pub face_in_x: FaceCertificate,
    pub face_in_z: FaceCertificate,
    pub kahler_face: FaceCertificate,
}

fn to_rat_rows(rows: &[Vec<Int>]) -> RatMatrix {
    rat_matrix_from_ints(rows)
}

/// Inequalities of the full-dimensional simplicial cone spanned by `rows`.
fn simplicial_inequalities(rows: &[Vec<Int>]) -> Result<Vec<Vec<Rat>>> {
    let k = rows.len();
    let gt = rat_transpose(&to_rat_rows(rows), k);
    rat_inverse(&gt).ok_or_else(|| Error::InvalidBasis("basis vectors are linearly dependent".into()))
}

fn combination(p: &[Vec<Int>], x: &[i64]) -> Vec<Int> {
    let k = p.first().map_or(0, Vec::len);
    (0..k).map(|j| p.iter().zip(x).fold(Int::zero(), |acc, (row, c)| acc + &row[j] * Int::from(*c))).collect()
}

fn integer_grid(dim: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out.into_iter().flat_map(|v| (-bound..=bound).map(move |c| [v.clone(), vec![c]].concat())).collect();
    }
    out.sort_by_key(|v| (v.iter().map(|c| c.abs()).sum::<i64>(), v.clone()));
    out
}

const Q_SEARCH_BOUND: i64 = 4;
const Q_SEARCH_CANDIDATES: usize = 24;

fn transition_of(p: &[Vec<Int>], q: &[Vec<Int>]) -> Result<Vec<Vec<Int>>> {
    let pt = rat_transpose(&to_rat_rows(p), p.len());
    let inv = rat_inverse(&pt).ok_or_else(|| Error::InvalidBasis("p is not a basis".into()))?;
    q.iter()
        .map(|qi| {
            let c = crate::linalg::rat_mat_vec(&inv, &qi.iter().map(rat_from_int).collect::<Vec<_>>());
            c.iter()
                .map(|x| crate::linalg::rat_to_int(x).ok_or_else(|| Error::InvalidBasis("q is not in the lattice spanned by p".into())))
                .collect()
        })
        .collect()
}

/// Checks the basis conditions on `q` and builds the two cones.
pub fn validate_q_basis(models: &PairModels, q: &[Vec<Int>]) -> Result<GlobalModuliFan> {
    let p = models.orbifold.basis.p.clone();
    let r = models.orbifold.r();
    if q.len() != p.len() {
        return Err(Error::InvalidBasis(format!("q has {} vectors, expected {}", q.len(), p.len())));
    }
    if q[..r] != p[..r] {
        return Err(Error::InvalidBasis("q_i must equal p_i for i ≤ r".into()));
    }
    for (i, qi) in q.iter().enumerate() {
        let v: Vec<Rat> = qi.iter().map(rat_from_int).collect();
        if !models.resolution.kahler.contains(&v)? {
            return Err(Error::InvalidBasis(format!("q_{} is not in the Kähler cone of the resolution", i + 1)));
        }
    }
    let transition = transition_of(&p, q)?;
    if !determinant(&transition).abs().is_one() {
        return Err(Error::InvalidBasis("q is not a basis of the extended Picard group".into()));
    }
    let rank = p.len();
    let gens = |rows: &[Vec<Int>]| rows.iter().map(|v| v.iter().map(rat_from_int).collect()).collect();
    let cone_x = RationalCone::from_generators(rank, gens(&p))?;
    let cone_z = RationalCone::from_generators(rank, gens(q))?;
    let mut ineq = simplicial_inequalities(&p)?;
    ineq.extend(simplicial_inequalities(q)?);
    let intersection = RationalCone::from_inequalities(rank, ineq)?;
    let not_face = |what: &str| Error::Invariant(format!("the intersection of the charts is not a face of {what}"));
    let face_in_x = face_certificate(&intersection, &cone_x)?.ok_or_else(|| not_face("C_X"))?;
    let face_in_z = face_certificate(&intersection, &cone_z)?.ok_or_else(|| not_face("C_Z"))?;
    let kahler_x = &models.orbifold.data.kahler;
    for g in kahler_x.generators() {
        if !intersection.contains(g)? {
            return Err(Error::Invariant("the Kähler cone of X is not inside both charts".into()));
        }
    }
    let kahler_face = face_certificate(kahler_x, &models.resolution.kahler)?
        .ok_or_else(|| Error::Invariant("the Kähler cone of X is not a face of the Kähler cone of Z".into()))?;
    Ok(GlobalModuliFan { p, q: q.to_vec(), transition, cone_x, cone_z, intersection, face_in_x, face_in_z, kahler_face })
}

/// Searches `q_{r+k} = Σ_b x_b p_b` over a bounded grid, smallest first.
pub fn build_global_fan(models: &PairModels) -> Result<GlobalModuliFan> {
    let p = &models.orbifold.basis.p;
    let (r, rank) = (models.orbifold.r(), p.len());
    let e = rank - r;
    let mut candidates = Vec::new();
    for x in integer_grid(rank, Q_SEARCH_BOUND) {
        if x[r..].iter().all(|&c| c == 0) {
            continue;
        }
        let q = combination(p, &x);
        if models.resolution.kahler.contains(&q.iter().map(rat_from_int).collect::<Vec<_>>())? {
            candidates.push(q);
            if candidates.len() == Q_SEARCH_CANDIDATES {
                break;
            }
        }
    }
    let mut chosen: Vec<usize> = Vec::new();
    fn pick(
        models: &PairModels,
        p: &[Vec<Int>],
        candidates: &[Vec<Int>],
        chosen: &mut Vec<usize>,
        e: usize,
    ) -> Option<GlobalModuliFan> {
        if chosen.len() == e {
            let mut q = p[..p.len() - e].to_vec();
            q.extend(chosen.iter().map(|&i| candidates[i].clone()));
            return validate_q_basis(models, &q).ok();
        }
        for i in 0..candidates.len() {
            if chosen.contains(&i) {
                continue;
            }
            chosen.push(i);
            if let Some(f) = pick(models, p, candidates, chosen, e) {
                return Some(f);
            }
            chosen.pop();
        }
        None
    }
    pick(models, p, &candidates, &mut chosen, e).ok_or_else(|| {
        Error::BasisSearch(format!(
            "no q-basis found with coefficients in [-{Q_SEARCH_BOUND}, {Q_SEARCH_BOUND}]; supply one with --basis-file"
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::linalg::{rat, to_int_vec};

    fn f2_pair() -> ResolutionPair {
        ResolutionPair::new(corpus::p112(), corpus::f2()).unwrap()
    }

    #[test]
    fn hirzebruch_resolves_weighted_plane() {
        let pair = f2_pair();
        let rep = is_crepant(&pair).unwrap();
        assert!(rep.crepant);
        assert_eq!(rep.witnesses[0].ray, vec![0, -1]);
        assert_eq!(rep.witnesses[0].coordinates, vec![rat(1, 2), rat(1, 2)]);
        assert!(check_gen_equals_new_rays(&pair).equal);
    }

    #[test]
    fn subdivision_is_not_crepant() {
        let pair = ResolutionPair::new(corpus::p112(), corpus::p112_subdivided()).unwrap();
        let rep = is_crepant(&pair).unwrap();
        assert!(!rep.crepant);
        assert_eq!(rep.witnesses[0].discrepancy, rat(1, 1));
    }

    #[test]
    fn sl_condition() {
        assert!(check_sl(&corpus::p112()));
        assert!(!check_sl(&corpus::p113()));
        assert!(check_sl(&corpus::p2()));
    }

    #[test]
    fn global_fan_of_hirzebruch_pair() {
        let pair = f2_pair();
        let models = pair_models(&pair, None).unwrap();
        assert!(exceptional_not_in_kahler(&pair, &models).unwrap().iter().all(|(_, v)| *v));
        let g = build_global_fan(&models).unwrap();
        assert_eq!(g.q[1], to_int_vec(&[2, 0]));
        assert_eq!(g.intersection.generators(), &[vec![rat(0, 1), rat(1, 1)]]);
    }

    #[test]
    fn trivial_resolution() {
        let pair = ResolutionPair::new(corpus::p2(), corpus::p2()).unwrap();
        assert!(is_crepant(&pair).unwrap().crepant);
        let models = pair_models(&pair, None).unwrap();
        let g = build_global_fan(&models).unwrap();
        assert_eq!(g.cone_x, g.cone_z);
    }
}
