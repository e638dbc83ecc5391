//! Built-in example fans.

use crate::fan::StackyFan;

fn build(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> StackyFan {
    StackyFan::validated(
        rank,
        rays.iter().map(|r| r.to_vec()).collect(),
        cones.iter().map(|c| c.to_vec()).collect(),
    )
    .expect("built-in fan is valid")
}

pub fn p1() -> StackyFan {
    build(1, &[&[1], &[-1]], &[&[0], &[1]])
}

pub fn p2() -> StackyFan {
    build(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]])
}

/// Weighted projective plane with weights (1,1,2).
pub fn p112() -> StackyFan {
    build(2, &[&[1, 0], &[0, 1], &[-1, -2]], &[&[0, 1], &[1, 2], &[0, 2]])
}

/// Weighted projective plane with weights (1,1,3).
pub fn p113() -> StackyFan {
    build(2, &[&[1, 0], &[0, 1], &[-1, -3]], &[&[0, 1], &[1, 2], &[0, 2]])
}

/// Weighted projective space with weights (1,1,1,3).
pub fn p1113() -> StackyFan {
    build(
        3,
        &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -3]],
        &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
    )
}

/// Hirzebruch surface F_k.
pub fn hirzebruch(k: i64) -> StackyFan {
    build(2, &[&[1, 0], &[0, 1], &[-1, -k], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]])
}

pub fn f2() -> StackyFan {
    hirzebruch(2)
}

/// F_3, whose anticanonical class is not nef.
pub fn f3() -> StackyFan {
    hirzebruch(3)
}

/// Star subdivision of the weighted plane (1,1,2) along (−1,−1): not crepant.
pub fn p112_subdivided() -> StackyFan {
    build(2, &[&[1, 0], &[0, 1], &[-1, -2], &[-1, -1]], &[&[0, 1], &[1, 3], &[2, 3], &[0, 2]])
}

/// The fans used for the rank and annihilation checks.
pub fn named() -> Vec<(&'static str, StackyFan)> {
    vec![("P1", p1()), ("P2", p2()), ("P112", p112()), ("P1113", p1113()), ("F2", f2())]
}
