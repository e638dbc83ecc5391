//! Rational polyhedral cones with exact membership and face tests.

use crate::error::{Error, Result};
use crate::linalg::{primitive_integer, rat_from_int, rat_nullspace, rat_rank, Rat, RatMatrix};
use crate::lp::{nonnegative_combination, LinearProgram, LpOutcome, Relation};
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct RationalCone {
    ambient: usize,
    generators: Vec<Vec<Rat>>,
    inequalities: Option<Vec<Vec<Rat>>>,
}

/// Linear functional certifying that a cone is a face of another: it is
/// nonnegative on the outer cone and vanishes exactly on the face.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceCertificate {
    pub functional: Vec<Rat>,
}

impl RationalCone {
    pub fn from_generators(ambient: usize, generators: Vec<Vec<Rat>>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != ambient) {
            return Err(Error::DimensionMismatch { expected: ambient, found: g.len() });
        }
        let generators = generators.into_iter().filter(|g| g.iter().any(|x| !x.is_zero())).collect();
        Ok(RationalCone { ambient, generators, inequalities: None })
    }

    /// Cone `{x : h·x ≥ 0 for all rows h}`; must be pointed. Extremal rays are
    /// computed by enumerating rank-deficient subsets of the inequalities.
    pub fn from_inequalities(ambient: usize, inequalities: Vec<Vec<Rat>>) -> Result<Self> {
        if let Some(h) = inequalities.iter().find(|h| h.len() != ambient) {
            return Err(Error::DimensionMismatch { expected: ambient, found: h.len() });
        }
        if rat_rank(&inequalities, ambient) < ambient {
            return Err(Error::Invariant("cone given by inequalities is not pointed".into()));
        }
        let rays = extremal_rays(ambient, &inequalities);
        Ok(RationalCone { ambient, generators: rays, inequalities: Some(inequalities) })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn generators(&self) -> &[Vec<Rat>] {
        &self.generators
    }

    pub fn inequalities(&self) -> Option<&[Vec<Rat>]> {
        self.inequalities.as_deref()
    }

    pub fn dimension(&self) -> usize {
        rat_rank(&self.generators, self.ambient)
    }

    pub fn contains(&self, x: &[Rat]) -> Result<bool> {
        cone_contains(self, x)
    }

    /// Image under a linear map given by a matrix with `ambient` columns.
    pub fn map(&self, matrix: &RatMatrix, target: usize) -> Result<RationalCone> {
        let gens = self
            .generators
            .iter()
            .map(|g| crate::linalg::rat_mat_vec(matrix, g))
            .collect();
        RationalCone::from_generators(target, gens)
    }
}

fn extremal_rays(k: usize, h: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut rays: Vec<Vec<Rat>> = Vec::new();
    let mut push = |v: Vec<Rat>| {
        if v.iter().all(Zero::is_zero) || !h.iter().all(|row| !crate::linalg::dot(row, &v).is_negative()) {
            return;
        }
        let p: Vec<Rat> = primitive_integer(&v).iter().map(rat_from_int).collect();
        if !rays.contains(&p) {
            rays.push(p);
        }
    };
    if k == 1 {
        push(vec![Rat::one()]);
        push(vec![-Rat::one()]);
    } else {
        for subset in subsets(h.len(), k - 1) {
            let rows: RatMatrix = subset.iter().map(|&i| h[i].clone()).collect();
            if rat_rank(&rows, k) != k - 1 {
                continue;
            }
            let null = rat_nullspace(&rows, k);
            let v = null[0].clone();
            let neg: Vec<Rat> = v.iter().map(|x| -x.clone()).collect();
            push(v);
            push(neg);
        }
    }
    rays.sort();
    rays
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    rec(0, n, size, &mut cur, &mut out);
    out
}

pub fn cone_contains(c: &RationalCone, x: &[Rat]) -> Result<bool> {
    if x.len() != c.ambient {
        return Err(Error::DimensionMismatch { expected: c.ambient, found: x.len() });
    }
    if x.iter().all(Zero::is_zero) {
        return Ok(true);
    }
    if c.generators.is_empty() {
        return Ok(false);
    }
    Ok(nonnegative_combination(&c.generators, x).is_some())
}

/// Decides whether `f` is a face of `c`; on success returns a witness
/// functional. Fails if `f ⊄ c`.
pub fn face_certificate(f: &RationalCone, c: &RationalCone) -> Result<Option<FaceCertificate>> {
    if f.ambient != c.ambient {
        return Err(Error::DimensionMismatch { expected: c.ambient, found: f.ambient });
    }
    for g in &f.generators {
        if !cone_contains(c, g)? {
            return Err(Error::NotContained { inner: format!("{:?}", f.generators), outer: format!("{:?}", c.generators) });
        }
    }
    let mut on_face = Vec::new();
    let mut off_face = Vec::new();
    for g in &c.generators {
        if cone_contains(f, g)? {
            on_face.push(g.clone());
        } else {
            off_face.push(g.clone());
        }
    }
    let spanned = RationalCone::from_generators(c.ambient, on_face.clone())?;
    for g in &f.generators {
        if !cone_contains(&spanned, g)? {
            return Ok(None);
        }
    }
    let mut lp = LinearProgram::new(c.ambient).all_free();
    for g in on_face.iter().chain(&f.generators) {
        lp.constrain(g.clone(), Relation::Eq, Rat::zero());
    }
    for g in &off_face {
        lp.constrain(g.clone(), Relation::Ge, Rat::one());
    }
    Ok(match lp.solve() {
        LpOutcome::Optimal { x, .. } => Some(FaceCertificate { functional: x }),
        _ => None,
    })
}

pub fn is_face(f: &RationalCone, c: &RationalCone) -> Result<bool> {
    Ok(face_certificate(f, c)?.is_some())
}
