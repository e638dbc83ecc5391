//! Graded dimensions from a Macaulay matrix, volumes from cone determinants.

mod common;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use toric_gkz::cohomology::{normalized_volume, presentation};
use toric_gkz::corpus;
use toric_gkz::fan::{ExtendedFan, StackyFan};
use toric_gkz::linalg::{determinant, rat_rank, Int, Rat};
use toric_gkz::operators::residue_algebra;
use toric_gkz::poly::{Monomial, Poly};

fn degree(m: &[u32], weights: &[Rat]) -> Rat {
    m.iter().zip(weights).map(|(&e, w)| w * Rat::from_integer(e.into())).sum()
}

fn monomials_up_to(weights: &[Rat], bound: &Rat) -> Vec<Monomial> {
    let mut out = vec![vec![]];
    for _ in weights {
        let mut next = Vec::new();
        for m in &out {
            let mut e = 0u32;
            loop {
                let mut mm: Monomial = m.clone();
                mm.push(e);
                let partial: Rat = degree(&mm, &weights[..mm.len()]);
                if &partial > bound {
                    break;
                }
                next.push(mm);
                e += 1;
            }
        }
        out = next;
    }
    out
}

/// Dimension of each graded piece of `ℚ[x]/(gens)` up to `bound`, by ranks of
/// the spans of `m·g` in each degree.
fn macaulay_dims(weights: &[Rat], gens: &[Poly], bound: &Rat) -> BTreeMap<Rat, usize> {
    let monos = monomials_up_to(weights, bound);
    let mut by_degree: BTreeMap<Rat, Vec<Monomial>> = BTreeMap::new();
    for m in monos {
        by_degree.entry(degree(&m, weights)).or_default().push(m);
    }
    let mut dims = BTreeMap::new();
    for (t, basis) in &by_degree {
        let index: BTreeMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows = Vec::new();
        for g in gens {
            let gdeg = degree(&g.terms()[0].0, weights);
            assert!(g.terms().iter().all(|(m, _)| degree(m, weights) == gdeg), "inhomogeneous generator");
            for shift in by_degree.get(&(t - &gdeg)).into_iter().flatten() {
                let mut row = vec![Rat::zero(); basis.len()];
                for (m, c) in g.terms() {
                    let prod: Monomial = m.iter().zip(shift).map(|(a, b)| a + b).collect();
                    row[index[&prod]] += c;
                }
                rows.push(row);
            }
        }
        let rank = if rows.is_empty() { 0 } else { rat_rank(&rows, basis.len()) };
        let d = basis.len() - rank;
        if d > 0 {
            dims.insert(t.clone(), d);
        }
    }
    dims
}

fn cone_determinant_volume(f: &StackyFan) -> Int {
    f.cones()
        .iter()
        .map(|c| {
            let rows: Vec<Vec<Int>> = c.iter().map(|&i| f.ray(i).iter().map(|&x| Int::from(x)).collect()).collect();
            determinant(&rows).abs()
        })
        .sum()
}

#[test]
fn graded_dimensions_match_macaulay_oracle() {
    for (name, f) in corpus::named() {
        let ext = ExtendedFan::new(f.clone()).unwrap();
        let coh = presentation(&ext).unwrap();
        let weights = ext.degrees();
        let gens: Vec<Poly> =
            coh.cone_binomials.iter().chain(&coh.euler_forms).chain(&coh.collection_monomials).cloned().collect();
        let bound = Rat::from_integer((f.rank() + 1).into());
        let oracle = macaulay_dims(&weights, &gens, &bound);
        let ours: BTreeMap<Rat, usize> = coh.ring.graded_dims().into_iter().collect();
        assert_eq!(ours, oracle, "{name}");
    }
}

#[test]
fn rank_identity_on_corpus() {
    for (name, f) in corpus::named() {
        let (pm, coh) = common::model(f.clone());
        let vol = cone_determinant_volume(&f);
        assert_eq!(normalized_volume(&pm.ext).unwrap(), vol, "{name}");
        assert_eq!(Int::from(coh.dim()), vol, "{name}");
        assert_eq!(residue_algebra(&pm, &coh).unwrap().ring.dim(), coh.dim(), "{name}");
    }
}

#[test]
fn weighted_plane_graded_dimensions() {
    let coh = presentation(&ExtendedFan::new(corpus::p112()).unwrap()).unwrap();
    let dims: Vec<usize> = coh.ring.graded_dims().values().copied().collect();
    assert_eq!(dims, vec![1, 2, 1]);
    assert_eq!(cone_determinant_volume(&corpus::p112()), Int::from(4));
}

#[test]
fn non_nef_volume_is_refused() {
    let ext = ExtendedFan::new(corpus::f3()).unwrap();
    assert!(normalized_volume(&ext).is_err());
}
