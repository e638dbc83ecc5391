//! I-function against the closed form for projective spaces, plus
//! truncation stability, annihilation and the mirror map.

mod common;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use toric_gkz::corpus;
use toric_gkz::fan::StackyFan;
use toric_gkz::ifunction::{annihilation_report, i_function, mirror_map, SeriesKey};
use toric_gkz::linalg::Rat;
use toric_gkz::operators::p_bar_classes;

/// Polynomial in a nilpotent class `H` (`H^{n+1} = 0`) with Laurent
/// coefficients in `z`: `(power of H, power of z) → coefficient`.
type Nil = BTreeMap<(usize, i64), Rat>;

fn nil_mul(a: &Nil, b: &Nil, n: usize) -> Nil {
    let mut out = Nil::new();
    for ((ha, za), ca) in a {
        for ((hb, zb), cb) in b {
            if ha + hb <= n {
                *out.entry((ha + hb, za + zb)).or_insert_with(Rat::zero) += ca * cb;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `1/(H + kz) = Σ_j (−1)^j H^j / (kz)^{j+1}`.
fn inverse_linear(k: i64, n: usize) -> Nil {
    (0..=n)
        .map(|j| {
            let sign = if j % 2 == 0 { Rat::one() } else { -Rat::one() };
            let kz = Rat::from_integer(k.into());
            ((j, -(j as i64) - 1), sign / num_traits::pow(kz, j + 1))
        })
        .collect()
}

/// `e^{H log χ / z} Σ_{d ≤ N} χ^d / Π_{k=1}^d (H + kz)^{n+1}` as
/// `(d, power of log χ, power of z, power of H) → coefficient`.
fn projective_space_oracle(n: usize, order: u32) -> BTreeMap<(u32, u32, i64, usize), Rat> {
    let mut out = BTreeMap::new();
    let mut factor: Nil = [((0, 0), Rat::one())].into_iter().collect();
    for d in 0..=order {
        if d > 0 {
            for _ in 0..=n {
                factor = nil_mul(&factor, &inverse_linear(d.into(), n), n);
            }
        }
        for ((h, z), c) in &factor {
            let mut fact = Rat::one();
            for j in 0..=(n - h) {
                if j > 0 {
                    fact *= Rat::from_integer(j.into());
                }
                let key = (d, j as u32, z - j as i64, h + j);
                *out.entry(key).or_insert_with(Rat::zero) += c / &fact;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn check_projective_space(f: StackyFan, n: usize, order: u32) {
    let (pm, coh) = common::model(f);
    let series = i_function(&pm, &coh, order).unwrap();
    let h = p_bar_classes(&pm, &coh).unwrap().remove(0);
    let mut powers = vec![coh.ring.one()];
    for j in 1..=n {
        powers.push(coh.ring.multiply(&powers[j - 1], &h));
    }
    let mut expected: BTreeMap<SeriesKey, Vec<Rat>> = BTreeMap::new();
    for ((d, l, z, hp), c) in projective_space_oracle(n, order) {
        let key = SeriesKey { chi: vec![d], log_chi: vec![l], z: Rat::from_integer(z.into()), log_z: 0 };
        let class = expected.entry(key).or_insert_with(|| vec![Rat::zero(); coh.dim()]);
        for (x, p) in class.iter_mut().zip(&powers[hp]) {
            *x += &c * p;
        }
    }
    expected.retain(|_, v| v.iter().any(|x| !x.is_zero()));
    assert!(expected.keys().any(|k| k.chi[0] == order && k.log_chi[0] > 0));
    assert_eq!(series.terms(), &expected);
}

#[test]
fn projective_line_matches_closed_form() {
    check_projective_space(corpus::p1(), 1, 4);
}

#[test]
fn projective_plane_matches_closed_form() {
    check_projective_space(corpus::p2(), 2, 3);
}

#[test]
fn truncation_is_stable() {
    for (name, f) in corpus::named() {
        let (pm, coh) = common::model(f);
        let mut previous = i_function(&pm, &coh, 1).unwrap();
        for order in 2..=4 {
            let next = i_function(&pm, &coh, order).unwrap();
            assert_eq!(next.truncate(order - 1), previous, "{name} order {order}");
            previous = next;
        }
    }
}

#[test]
fn operators_annihilate_twisted_series() {
    for (name, f) in [("P1", corpus::p1()), ("P2", corpus::p2()), ("P112", corpus::p112())] {
        let (pm, coh) = common::model(f);
        let report = annihilation_report(&pm, &coh, 3).unwrap();
        assert!(!report.is_empty());
        for (op, residual) in report {
            assert!(residual.vanishes(), "{name}: {op} leaves {:?}", residual.terms.first());
        }
    }
}

#[test]
fn fano_mirror_map_is_log_linear() {
    for f in [corpus::p1(), corpus::p2()] {
        let (pm, coh) = common::model(f);
        let mm = mirror_map(&i_function(&pm, &coh, 6).unwrap(), &coh).unwrap();
        assert_eq!(mm.log_linear, p_bar_classes(&pm, &coh).unwrap());
        assert!(mm.analytic.is_empty());
        assert!(mm.log_corrections.is_empty());
    }
}

#[test]
fn mirror_map_lies_in_low_degree() {
    for (name, f) in corpus::named() {
        let (pm, coh) = common::model(f);
        let degrees = coh.ring.basis_degrees();
        let mm = mirror_map(&i_function(&pm, &coh, 3).unwrap(), &coh).unwrap();
        let classes = mm.log_linear.iter().chain(mm.analytic.iter().map(|(_, c)| c));
        for class in classes {
            for (x, deg) in class.iter().zip(&degrees) {
                assert!(x.is_zero() || *deg <= Rat::one(), "{name}");
            }
        }
    }
}
