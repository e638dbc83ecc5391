//! Stacky fans, their Box and Gen sets, and the extended fan data.

use crate::error::{Error, Result};
use crate::linalg::{
    determinant, gcd_of, kernel_basis, primitive_integer, rat, rat_from_int, rat_inverse, rat_mat_vec,
    smith_normal_form, to_int_vec, Int, IntMatrix, Rat, RatMatrix,
};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, VecDeque};
use std::fmt;

/// A complete simplicial fan with primitive ray generators. Cones are
/// stored as sorted 0-based ray index lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackyFan {
    rank: usize,
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FanIssue {
    ConeSize { cone: usize, size: usize },
    RepeatedIndex { cone: usize },
    DegenerateCone { cone: usize },
    UnmatchedWall { wall: Vec<usize>, cone: usize },
    OverfullWall { wall: Vec<usize>, cones: Vec<usize> },
    SameSideWall { wall: Vec<usize>, cones: (usize, usize) },
    Disconnected,
    NonPrimitiveRay { ray: usize },
    ZeroRay { ray: usize },
    RepeatedRay { ray: usize },
}

fn one_based(v: &[usize]) -> String {
    let s: Vec<String> = v.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", s.join(","))
}

impl fmt::Display for FanIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FanIssue::ConeSize { cone, size } => {
                write!(f, "cone {} has {} rays; simplicial maximal cones need exactly rank many", cone + 1, size)
            }
            FanIssue::RepeatedIndex { cone } => write!(f, "cone {} repeats a ray index", cone + 1),
            FanIssue::DegenerateCone { cone } => write!(f, "cone {} has zero determinant", cone + 1),
            FanIssue::UnmatchedWall { wall, cone } => {
                write!(f, "wall {} of cone {} is not shared by another maximal cone", one_based(wall), cone + 1)
            }
            FanIssue::OverfullWall { wall, cones } => {
                write!(f, "wall {} is shared by cones {}", one_based(wall), one_based(cones))
            }
            FanIssue::SameSideWall { wall, cones } => write!(
                f,
                "cones {} and {} lie on the same side of wall {}",
                cones.0 + 1,
                cones.1 + 1,
                one_based(wall)
            ),
            FanIssue::Disconnected => write!(f, "maximal cones are not connected through walls"),
            FanIssue::NonPrimitiveRay { ray } => write!(f, "ray {} is not primitive", ray + 1),
            FanIssue::ZeroRay { ray } => write!(f, "ray {} is zero", ray + 1),
            FanIssue::RepeatedRay { ray } => write!(f, "ray {} repeats an earlier ray", ray + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub simplicial: bool,
    pub complete: bool,
    pub primitive: bool,
    pub issues: Vec<FanIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.simplicial && self.complete && self.primitive
    }
}

/// A wall shared by two maximal cones together with the rays opposite to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub rays: Vec<usize>,
    pub cones: (usize, usize),
    pub opposite: (usize, usize),
}

/// A point of the half-open parallelepiped of its minimal cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxElement {
    pub vector: Vec<i64>,
    /// Rays of the minimal cone (sorted).
    pub cone: Vec<usize>,
    /// Coordinates with respect to `cone`, each in `[0, 1)`.
    pub coords: Vec<Rat>,
    pub age: Rat,
}

impl BoxElement {
    pub fn is_zero(&self) -> bool {
        self.vector.iter().all(|&x| x == 0)
    }

    /// Coordinate on ray `i`, zero off the minimal cone.
    pub fn coord(&self, ray: usize) -> Rat {
        self.cone.iter().position(|&r| r == ray).map_or_else(Rat::zero, |p| self.coords[p].clone())
    }
}

impl StackyFan {
    /// Builds a fan after shape checks (vector lengths and index ranges);
    /// geometric validity is checked by [`StackyFan::validate`].
    pub fn new(rank: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidFan("rank must be positive".into()));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != rank {
                return Err(Error::InvalidFan(format!("ray {} has length {} but rank is {rank}", i + 1, r.len())));
            }
        }
        let mut sorted = Vec::with_capacity(cones.len());
        for (c, cone) in cones.iter().enumerate() {
            if let Some(&bad) = cone.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!("cone {} uses ray index {} out of range", c + 1, bad + 1)));
            }
            let mut s = cone.clone();
            s.sort_unstable();
            sorted.push(s);
        }
        if sorted.is_empty() {
            return Err(Error::InvalidFan("fan has no maximal cones".into()));
        }
        Ok(StackyFan { rank, rays, cones: sorted })
    }

    /// Builds and validates; any failed check becomes an error.
    pub fn validated(rank: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Result<Self> {
        let fan = Self::new(rank, rays, cones)?;
        let report = fan.validate();
        if !report.is_valid() {
            let msgs: Vec<String> = report.issues.iter().map(ToString::to_string).collect();
            return Err(Error::InvalidFan(msgs.join("; ")));
        }
        Ok(fan)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    /// Columns are the rays of cone `c`.
    pub fn cone_matrix(&self, c: usize) -> IntMatrix {
        let cols: Vec<Vec<Int>> = self.cones[c].iter().map(|&i| to_int_vec(&self.rays[i])).collect();
        IntMatrix::from_columns(&cols, self.rank)
    }

    pub fn cone_det(&self, c: usize) -> Int {
        let cols: Vec<Vec<Int>> = self.cones[c].iter().map(|&i| to_int_vec(&self.rays[i])).collect();
        determinant(&cols)
    }

    fn cone_inverse(&self, c: usize) -> Option<RatMatrix> {
        let m = self.cone_matrix(c);
        let rows: RatMatrix = m.row_vectors().iter().map(|r| r.iter().map(rat_from_int).collect()).collect();
        rat_inverse(&rows)
    }

    /// Coordinates of `v` in the ray basis of maximal cone `c`.
    pub fn cone_coordinates(&self, c: usize, v: &[i64]) -> Vec<Rat> {
        let inv = self.cone_inverse(c).expect("degenerate maximal cone");
        let x: Vec<Rat> = v.iter().map(|&t| rat(t, 1)).collect();
        rat_mat_vec(&inv, &x)
    }

    pub fn is_smooth(&self) -> bool {
        (0..self.cones.len()).all(|c| self.cone_det(c).abs().is_one())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let mut primitive = true;
        for (i, r) in self.rays.iter().enumerate() {
            let g = gcd_of(&to_int_vec(r));
            if g.is_zero() {
                issues.push(FanIssue::ZeroRay { ray: i });
                primitive = false;
            } else if !g.is_one() {
                issues.push(FanIssue::NonPrimitiveRay { ray: i });
                primitive = false;
            }
            if self.rays[..i].contains(r) {
                issues.push(FanIssue::RepeatedRay { ray: i });
                primitive = false;
            }
        }
        let mut simplicial = true;
        for (c, cone) in self.cones.iter().enumerate() {
            if cone.len() != self.rank {
                issues.push(FanIssue::ConeSize { cone: c, size: cone.len() });
                simplicial = false;
            } else if cone.windows(2).any(|w| w[0] == w[1]) {
                issues.push(FanIssue::RepeatedIndex { cone: c });
                simplicial = false;
            } else if self.cone_det(c).is_zero() {
                issues.push(FanIssue::DegenerateCone { cone: c });
                simplicial = false;
            }
        }
        if !simplicial {
            return ValidationReport { simplicial, complete: false, primitive, issues };
        }
        let mut complete = true;
        let mut by_wall: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (c, cone) in self.cones.iter().enumerate() {
            for &opp in cone {
                let wall: Vec<usize> = cone.iter().copied().filter(|&i| i != opp).collect();
                by_wall.entry(wall).or_default().push((c, opp));
            }
        }
        let mut adjacency = vec![Vec::new(); self.cones.len()];
        for (wall, list) in &by_wall {
            match list.len() {
                1 => {
                    issues.push(FanIssue::UnmatchedWall { wall: wall.clone(), cone: list[0].0 });
                    complete = false;
                }
                2 => {
                    let ((c1, o1), (c2, o2)) = (list[0], list[1]);
                    if !self.opposite_sides(c1, o1, o2) {
                        issues.push(FanIssue::SameSideWall { wall: wall.clone(), cones: (c1, c2) });
                        complete = false;
                    }
                    adjacency[c1].push(c2);
                    adjacency[c2].push(c1);
                }
                _ => {
                    issues.push(FanIssue::OverfullWall {
                        wall: wall.clone(),
                        cones: list.iter().map(|x| x.0).collect(),
                    });
                    complete = false;
                }
            }
        }
        let mut seen = vec![false; self.cones.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(c) = queue.pop_front() {
            for &nb in &adjacency[c] {
                if !seen[nb] {
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            issues.push(FanIssue::Disconnected);
            complete = false;
        }
        ValidationReport { simplicial, complete, primitive, issues }
    }

    /// Whether ray `other` lies strictly across the wall of cone `c` opposite `opp`.
    fn opposite_sides(&self, c: usize, opp: usize, other: usize) -> bool {
        let t = self.cone_coordinates(c, &self.rays[other]);
        let pos = self.cones[c].iter().position(|&i| i == opp).expect("opposite ray in cone");
        t[pos].is_negative()
    }

    /// Walls of the fan (pairs of adjacent maximal cones).
    pub fn walls(&self) -> Vec<Wall> {
        let mut by_wall: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (c, cone) in self.cones.iter().enumerate() {
            for &opp in cone {
                let wall: Vec<usize> = cone.iter().copied().filter(|&i| i != opp).collect();
                by_wall.entry(wall).or_default().push((c, opp));
            }
        }
        by_wall
            .into_iter()
            .filter(|(_, l)| l.len() == 2)
            .map(|(rays, l)| Wall { rays, cones: (l[0].0, l[1].0), opposite: (l[0].1, l[1].1) })
            .collect()
    }

    /// Primitive integer relation among the rays of a wall and the two
    /// opposite rays; both opposite coefficients are positive.
    pub fn wall_relation(&self, wall: &Wall) -> Vec<Int> {
        let (c, _) = wall.cones;
        let (_, j) = wall.opposite;
        let t = self.cone_coordinates(c, &self.rays[j]);
        let mut rel = vec![Rat::zero(); self.rays.len()];
        rel[j] = Rat::one();
        for (k, &ray) in self.cones[c].iter().enumerate() {
            rel[ray] = -t[k].clone();
        }
        primitive_integer(&rel)
    }

    /// Whether `−K` is nef, i.e. the support function with value 1 on every
    /// ray is convex: each wall relation has nonnegative coefficient sum.
    pub fn is_anticanonical_nef(&self) -> bool {
        self.walls().iter().all(|w| !self.wall_relation(w).iter().sum::<Int>().is_negative())
    }

    /// Sum of `|det σ|` over maximal cones.
    pub fn total_cone_volume(&self) -> Int {
        (0..self.cones.len()).map(|c| self.cone_det(c).abs()).sum()
    }

    /// Index of a maximal cone containing `v`, with coordinates.
    pub fn containing_cone(&self, v: &[i64]) -> Option<(usize, Vec<Rat>)> {
        (0..self.cones.len()).find_map(|c| {
            let t = self.cone_coordinates(c, v);
            t.iter().all(|x| !x.is_negative()).then_some((c, t))
        })
    }

    /// The minimal cone containing `v` and the coordinates of `v` on its rays.
    pub fn minimal_cone(&self, v: &[i64]) -> Result<(Vec<usize>, Vec<Rat>)> {
        if v.len() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, found: v.len() });
        }
        let (c, t) = self
            .containing_cone(v)
            .ok_or_else(|| Error::InvalidFan(format!("{v:?} lies in no cone; fan is not complete")))?;
        let mut rays = Vec::new();
        let mut coords = Vec::new();
        for (k, &ray) in self.cones[c].iter().enumerate() {
            if !t[k].is_zero() {
                rays.push(ray);
                coords.push(t[k].clone());
            }
        }
        Ok((rays, coords))
    }

    /// Lattice points of the half-open parallelepiped of every maximal cone,
    /// deduplicated, in lexicographic order.
    pub fn box_elements(&self) -> Vec<BoxElement> {
        let mut seen: BTreeMap<Vec<i64>, BoxElement> = BTreeMap::new();
        for c in 0..self.cones.len() {
            for el in self.cone_box(c) {
                seen.entry(el.vector.clone()).or_insert(el);
            }
        }
        let mut out: Vec<BoxElement> = seen.into_values().collect();
        out.sort_by(|a, b| a.vector.cmp(&b.vector));
        out
    }

    fn cone_box(&self, c: usize) -> Vec<BoxElement> {
        let b = self.cone_matrix(c);
        let snf = smith_normal_form(&b);
        let u_rows: RatMatrix =
            snf.u.row_vectors().iter().map(|r| r.iter().map(rat_from_int).collect()).collect();
        let u_inv = rat_inverse(&u_rows).expect("unimodular");
        let factors: Vec<i64> =
            (0..self.rank).map(|i| snf.s.get(i, i).to_i64().expect("cone determinant fits in i64")).collect();
        let mut reps: Vec<Vec<i64>> = vec![vec![]];
        for &f in &factors {
            reps = reps
                .into_iter()
                .flat_map(|p| {
                    (0..f).map(move |y| {
                        let mut q = p.clone();
                        q.push(y);
                        q
                    })
                })
                .collect();
        }
        let mut out = Vec::new();
        for y in reps {
            let yq: Vec<Rat> = y.iter().map(|&t| rat(t, 1)).collect();
            let x = rat_mat_vec(&u_inv, &yq);
            let xi: Vec<i64> = x.iter().map(|q| q.to_integer().to_i64().expect("small")).collect();
            let t = self.cone_coordinates(c, &xi);
            let frac: Vec<Rat> = t.iter().map(|q| q - q.floor()).collect();
            let mut v = vec![Rat::zero(); self.rank];
            for (k, &ray) in self.cones[c].iter().enumerate() {
                for (vi, ri) in v.iter_mut().zip(&self.rays[ray]) {
                    *vi += &frac[k] * rat(*ri, 1);
                }
            }
            let vector: Vec<i64> = v.iter().map(|q| q.to_integer().to_i64().expect("small")).collect();
            let mut cone = Vec::new();
            let mut coords = Vec::new();
            for (k, &ray) in self.cones[c].iter().enumerate() {
                if !frac[k].is_zero() {
                    cone.push(ray);
                    coords.push(frac[k].clone());
                }
            }
            let age = coords.iter().fold(Rat::zero(), |a, x| a + x);
            out.push(BoxElement { vector, cone, coords, age });
        }
        out
    }

    /// Box elements that admit no decomposition `x + y` with `x, y` nonzero
    /// lattice points of their minimal cone.
    pub fn gen_elements(&self) -> Vec<BoxElement> {
        let all = self.box_elements();
        all.iter()
            .filter(|v| !v.is_zero() && find_split(&all, v).is_none())
            .cloned()
            .collect()
    }

    /// Whether all given rays lie in a common maximal cone.
    pub fn rays_span_cone(&self, rays: &[usize]) -> bool {
        rays.is_empty() || self.cones.iter().any(|c| rays.iter().all(|r| c.contains(r)))
    }
}

/// A nonzero box element `x ≠ v` whose coordinates are dominated by those of
/// `v` on the minimal cone of `v`, so that `v = x + (v - x)` splits.
fn find_split<'a>(all: &'a [BoxElement], v: &BoxElement) -> Option<&'a BoxElement> {
    all.iter().find(|x| {
        !x.is_zero()
            && x.vector != v.vector
            && x.cone.iter().all(|r| v.cone.contains(r))
            && x.cone.iter().all(|&r| x.coord(r) <= v.coord(r))
    })
}

/// The fan together with extra generators `a_{m+1}, …, a_{m+e}`.
#[derive(Clone, Debug)]
pub struct ExtendedFan {
    base: StackyFan,
    box_elements: Vec<BoxElement>,
    extra: Vec<BoxElement>,
    matrix: IntMatrix,
    relations: Vec<Vec<Int>>,
    /// For each generator, the bitmask of maximal cones containing it.
    cone_masks: Vec<u64>,
}

impl ExtendedFan {
    /// Extends by `Gen(Σ)`.
    pub fn new(base: StackyFan) -> Result<Self> {
        let gens: Vec<Vec<i64>> = base.gen_elements().into_iter().map(|b| b.vector).collect();
        Self::with_generators(base, gens)
    }

    /// Extends by the given box elements, in the given order.
    pub fn with_generators(base: StackyFan, extra: Vec<Vec<i64>>) -> Result<Self> {
        let report = base.validate();
        if !report.is_valid() {
            let msgs: Vec<String> = report.issues.iter().map(ToString::to_string).collect();
            return Err(Error::InvalidFan(msgs.join("; ")));
        }
        if base.cones.len() > 64 {
            return Err(Error::ResourceLimit("more than 64 maximal cones".into()));
        }
        let box_elements = base.box_elements();
        let mut extra_elems = Vec::with_capacity(extra.len());
        for (k, v) in extra.iter().enumerate() {
            if v.len() != base.rank {
                return Err(Error::InvalidFan(format!("extra generator {} has wrong length", k + 1)));
            }
            let el = box_elements
                .iter()
                .find(|b| &b.vector == v && !b.is_zero())
                .ok_or_else(|| Error::InvalidFan(format!("extra generator {v:?} is not a nonzero Box element")))?;
            if !gcd_of(&to_int_vec(v)).is_one() {
                return Err(Error::InvalidFan(format!("extra generator {v:?} is not primitive")));
            }
            if extra[..k].contains(v) {
                return Err(Error::InvalidFan(format!("extra generator {v:?} is repeated")));
            }
            extra_elems.push(el.clone());
        }
        let mut cols: Vec<Vec<Int>> = base.rays.iter().map(|r| to_int_vec(r)).collect();
        cols.extend(extra.iter().map(|v| to_int_vec(v)));
        let matrix = IntMatrix::from_columns(&cols, base.rank);
        let snf = smith_normal_form(&matrix);
        let factors: Vec<Int> = (0..base.rank)
            .map(|i| if i < matrix.cols() { snf.s.get(i, i).clone() } else { Int::zero() })
            .collect();
        if factors.iter().any(|f| !f.is_one()) {
            return Err(Error::NotSurjective {
                factors: factors.iter().filter(|f| !f.is_one()).map(ToString::to_string).collect(),
            });
        }
        let relations = kernel_basis(&matrix);
        let mut fan = ExtendedFan {
            base,
            box_elements,
            extra: extra_elems,
            matrix,
            relations,
            cone_masks: Vec::new(),
        };
        fan.cone_masks = (0..fan.n())
            .map(|i| {
                let support = fan.support(i);
                fan.base
                    .cones
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| support.iter().all(|r| c.contains(r)))
                    .fold(0u64, |acc, (k, _)| acc | (1 << k))
            })
            .collect();
        Ok(fan)
    }

    pub fn base(&self) -> &StackyFan {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.base.rank
    }

    pub fn m(&self) -> usize {
        self.base.rays.len()
    }

    pub fn e(&self) -> usize {
        self.extra.len()
    }

    pub fn n(&self) -> usize {
        self.m() + self.e()
    }

    /// Rank of 𝕃, equal to `r + e`.
    pub fn lattice_rank(&self) -> usize {
        self.relations.len()
    }

    /// Rank `r` of the Picard group of the coarse space.
    pub fn picard_rank(&self) -> usize {
        self.m() - self.rank()
    }

    pub fn box_elements(&self) -> &[BoxElement] {
        &self.box_elements
    }

    pub fn extra(&self) -> &[BoxElement] {
        &self.extra
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Hermite basis of the relation lattice 𝕃 ⊂ ℤⁿ.
    pub fn relations(&self) -> &[Vec<Int>] {
        &self.relations
    }

    pub fn generator(&self, i: usize) -> &[i64] {
        if i < self.m() {
            &self.base.rays[i]
        } else {
            &self.extra[i - self.m()].vector
        }
    }

    /// Rays of the minimal cone containing generator `i`.
    pub fn support(&self, i: usize) -> Vec<usize> {
        if i < self.m() {
            vec![i]
        } else {
            self.extra[i - self.m()].cone.clone()
        }
    }

    /// Degree of generator `i`: 1 for rays, the age for extra generators.
    pub fn degree(&self, i: usize) -> Rat {
        if i < self.m() {
            Rat::one()
        } else {
            self.extra[i - self.m()].age.clone()
        }
    }

    pub fn degrees(&self) -> Vec<Rat> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    /// Fractional coordinates `r_{kj}` of extra generator `k` on ray `j`.
    pub fn extra_coordinates(&self) -> Vec<Vec<Rat>> {
        self.extra.iter().map(|b| (0..self.m()).map(|j| b.coord(j)).collect()).collect()
    }

    /// Whether generator `i` lies in maximal cone `c`.
    pub fn generator_in_cone(&self, i: usize, c: usize) -> bool {
        self.cone_masks[i] & (1 << c) != 0
    }

    pub fn generators_in_cone(&self, c: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.generator_in_cone(i, c)).collect()
    }

    /// Whether the given generators lie in a common cone.
    pub fn contained_in_cone(&self, indices: &[usize]) -> bool {
        indices.iter().fold(u64::MAX, |acc, &i| acc & self.cone_masks[i]) != 0
    }

    /// Anticones `I ⊂ {0..m}` (complement spans a cone), largest first, and
    /// their extensions by all extra indices.
    pub fn anticones(&self) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let m = self.m();
        let mut plain: Vec<Vec<usize>> = (0u64..(1 << m))
            .map(|mask| (0..m).filter(|i| mask & (1 << i) != 0).collect::<Vec<usize>>())
            .filter(|set| self.is_anticone(set))
            .collect();
        plain.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let extended = plain
            .iter()
            .map(|set| {
                let mut s = set.clone();
                s.extend(m..self.n());
                s
            })
            .collect();
        (plain, extended)
    }

    /// `I ⊂ {0..m}` is an anticone iff its complement spans a cone.
    pub fn is_anticone(&self, set: &[usize]) -> bool {
        let complement: Vec<usize> = (0..self.m()).filter(|i| !set.contains(i)).collect();
        self.base.rays_span_cone(&complement)
    }

    /// Membership in the extended anticone family for a set given as flags
    /// over all `n` indices.
    pub fn is_extended_anticone(&self, flags: &[bool]) -> bool {
        if flags[self.m()..].iter().any(|f| !f) {
            return false;
        }
        let complement: Vec<usize> = (0..self.m()).filter(|&i| !flags[i]).collect();
        self.base.rays_span_cone(&complement)
    }

    /// Minimal subsets of `{0..n}` whose generators lie in no common cone.
    pub fn generalized_primitive_collections(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut sets: Vec<Vec<usize>> = (0u64..(1 << n))
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect::<Vec<usize>>())
            .collect();
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        for s in sets {
            if s.is_empty() || self.contained_in_cone(&s) {
                continue;
            }
            let minimal = (0..s.len()).all(|skip| {
                let sub: Vec<usize> =
                    s.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &i)| i).collect();
                self.contained_in_cone(&sub)
            });
            if minimal {
                out.push(s);
            }
        }
        out
    }

    /// ℤ-basis of relations among the generators lying in maximal cone `c`,
    /// embedded in ℤⁿ.
    pub fn cone_relations(&self, c: usize) -> Vec<Vec<Int>> {
        let gens = self.generators_in_cone(c);
        let cols: Vec<Vec<Int>> = gens.iter().map(|&i| to_int_vec(self.generator(i))).collect();
        let sub = IntMatrix::from_columns(&cols, self.rank());
        kernel_basis(&sub)
            .into_iter()
            .map(|k| {
                let mut full = vec![Int::zero(); self.n()];
                for (pos, &i) in gens.iter().enumerate() {
                    full[i] = k[pos].clone();
                }
                full
            })
            .collect()
    }

    /// Lexicographically smallest `c ∈ ℕⁿ` supported on generators of a
    /// maximal cone containing `target` with `Σ c_i a_i = target`.
    pub fn nonnegative_decomposition(&self, target: &[i64]) -> Option<Vec<i64>> {
        let (c, t) = self.base.containing_cone(target)?;
        let gens = self.generators_in_cone(c);
        let coords: Vec<Vec<Rat>> = gens.iter().map(|&i| self.base.cone_coordinates(c, self.generator(i))).collect();
        let mut best: Option<Vec<i64>> = None;
        let mut current = vec![0i64; self.n()];
        decompose_rec(&gens, &coords, 0, t, &mut current, &mut best);
        best
    }

    /// Decomposition of a box element into generators, used for sector classes.
    pub fn sector_exponents(&self, v: &BoxElement) -> Result<Vec<i64>> {
        self.nonnegative_decomposition(&v.vector)
            .ok_or_else(|| Error::Invariant(format!("box element {:?} has no decomposition", v.vector)))
    }

    /// The relation `l_I = e_I − c` for a generalized primitive collection.
    pub fn primitive_relation(&self, collection: &[usize]) -> Result<Vec<i64>> {
        let mut w = vec![0i64; self.rank()];
        for &i in collection {
            for (wk, gk) in w.iter_mut().zip(self.generator(i)) {
                *wk += gk;
            }
        }
        let c = self
            .nonnegative_decomposition(&w)
            .ok_or_else(|| Error::Invariant(format!("no decomposition of primitive sum {w:?}")))?;
        let mut l: Vec<i64> = c.iter().map(|x| -x).collect();
        for &i in collection {
            l[i] += 1;
        }
        Ok(l)
    }
}

fn decompose_rec(
    gens: &[usize],
    coords: &[Vec<Rat>],
    pos: usize,
    remaining: Vec<Rat>,
    current: &mut Vec<i64>,
    best: &mut Option<Vec<i64>>,
) {
    if remaining.iter().all(Zero::is_zero) {
        if best.as_ref().is_none_or(|b| &**current < b) {
            *best = Some(current.clone());
        }
        return;
    }
    if pos == gens.len() {
        return;
    }
    // Larger multiplicities on later indices give lexicographically smaller
    // vectors, so explore from the last generator backwards.
    let idx = gens.len() - 1 - pos;
    let g = &coords[idx];
    let mut k = 0i64;
    let mut rem = remaining;
    let mut candidates = Vec::new();
    loop {
        candidates.push((k, rem.clone()));
        let next: Vec<Rat> = rem.iter().zip(g).map(|(r, x)| r - x).collect();
        if next.iter().any(|x| x.is_negative()) {
            break;
        }
        rem = next;
        k += 1;
    }
    for (k, rem) in candidates.into_iter().rev() {
        current[gens[idx]] = k;
        decompose_rec(gens, coords, pos + 1, rem, current, best);
        current[gens[idx]] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn projective_plane_is_valid() {
        let r = corpus::p2().validate();
        assert!(r.is_valid(), "{:?}", r.issues);
    }

    #[test]
    fn missing_cone_names_unmatched_wall() {
        let fan = StackyFan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2]]).unwrap();
        let r = fan.validate();
        assert!(!r.complete);
        assert!(r.issues.iter().any(|i| matches!(i, FanIssue::UnmatchedWall { .. })));
        let msg = r.issues[0].to_string();
        assert!(msg.contains("wall"), "{msg}");
    }

    #[test]
    fn non_primitive_ray_rejected() {
        let fan =
            StackyFan::new(2, vec![vec![2, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let r = fan.validate();
        assert!(!r.primitive);
        assert!(r.issues.contains(&FanIssue::NonPrimitiveRay { ray: 0 }));
    }

    #[test]
    fn minimal_cones() {
        let fan = corpus::p112();
        let (cone, coords) = fan.minimal_cone(&[0, -1]).unwrap();
        assert_eq!(cone, vec![0, 2]);
        assert_eq!(coords, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(fan.minimal_cone(&[0, 0]).unwrap().0, Vec::<usize>::new());
        assert_eq!(fan.minimal_cone(&[0, 1]).unwrap().0, vec![1]);
    }

    #[test]
    fn box_of_weighted_plane() {
        let b = corpus::p112().box_elements();
        let vecs: Vec<Vec<i64>> = b.iter().map(|x| x.vector.clone()).collect();
        assert_eq!(vecs, vec![vec![0, -1], vec![0, 0]]);
        assert_eq!(b[0].age, rat(1, 1));
        assert_eq!(corpus::p2().box_elements().len(), 1);
    }

    #[test]
    fn gen_sets() {
        let g: Vec<Vec<i64>> = corpus::p112().gen_elements().into_iter().map(|b| b.vector).collect();
        assert_eq!(g, vec![vec![0, -1]]);
        assert!(corpus::p2().gen_elements().is_empty());
        assert!(corpus::f2().gen_elements().is_empty());
        let g: Vec<Vec<i64>> = corpus::p1113().gen_elements().into_iter().map(|b| b.vector).collect();
        assert_eq!(g, vec![vec![0, 0, -1]]);
    }

    #[test]
    fn extensions() {
        let x = ExtendedFan::new(corpus::p112()).unwrap();
        assert_eq!((x.n(), x.lattice_rank()), (4, 2));
        let x = ExtendedFan::new(corpus::p2()).unwrap();
        assert_eq!((x.n(), x.e()), (3, 0));
        assert_eq!(x.relations(), &[to_int_vec(&[1, 1, 1])]);
        let x = ExtendedFan::new(corpus::p1()).unwrap();
        assert_eq!(x.relations(), &[to_int_vec(&[1, 1])]);
    }

    #[test]
    fn anticone_families() {
        let x = ExtendedFan::new(corpus::p1()).unwrap();
        assert_eq!(x.anticones().0, vec![vec![0, 1], vec![0], vec![1]]);
        let x = ExtendedFan::new(corpus::p2()).unwrap();
        assert_eq!(x.anticones().0.len(), 7);
        let x = ExtendedFan::new(corpus::p112()).unwrap();
        assert!(x.anticones().1.iter().all(|s| s.contains(&3)));
    }

    #[test]
    fn primitive_collections() {
        assert_eq!(ExtendedFan::new(corpus::p2()).unwrap().generalized_primitive_collections(), vec![vec![0, 1, 2]]);
        assert_eq!(ExtendedFan::new(corpus::p1()).unwrap().generalized_primitive_collections(), vec![vec![0, 1]]);
        let gp = ExtendedFan::new(corpus::p112()).unwrap().generalized_primitive_collections();
        assert!(gp.contains(&vec![1, 3]));
    }

    #[test]
    fn cone_relation_of_singular_cone() {
        let x = ExtendedFan::new(corpus::p112()).unwrap();
        let c = x.base().cones().iter().position(|c| c == &vec![0, 2]).unwrap();
        assert_eq!(x.cone_relations(c), vec![to_int_vec(&[1, 0, 1, -2])]);
        let smooth = x.base().cones().iter().position(|c| c == &vec![0, 1]).unwrap();
        assert!(x.cone_relations(smooth).is_empty());
        let p1 = ExtendedFan::new(corpus::p1()).unwrap();
        assert!(p1.cone_relations(0).is_empty());
    }
}
