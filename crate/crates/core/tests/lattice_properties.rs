//! Sector table, ρ-membership and operator factorization on the corpus.

mod common;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toric_gkz::corpus;
use toric_gkz::fan::ExtendedFan;
use toric_gkz::linalg::{Int, Rat};
use toric_gkz::operators::OperatorSystem;
use toric_gkz::picard::{picard_data, rho_membership, PicardModel};

fn random_relation(pm: &PicardModel, rng: &mut ChaCha8Rng, spread: i64) -> Vec<Int> {
    let mut l = vec![Int::zero(); pm.ext.n()];
    for basis in &pm.data.relations {
        let c = Int::from(rng.gen_range(-spread..=spread));
        for (x, b) in l.iter_mut().zip(basis) {
            *x += &c * b;
        }
    }
    l
}

fn with_sectors() -> Vec<(&'static str, toric_gkz::fan::StackyFan)> {
    let mut fans = corpus::named();
    fans.push(("P113", corpus::p113()));
    fans
}

#[test]
fn sector_table_round_trips_and_is_lattice_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, f) in with_sectors() {
        let (pm, _) = common::model(f);
        let table = pm.box_coset_table().unwrap();
        assert_eq!(table.len(), pm.ext.box_elements().len(), "{name}");
        for entry in &table {
            assert_eq!(entry.round_trip, entry.box_vector, "{name}");
            assert_eq!(pm.ceiling_vector(&entry.degree), entry.box_vector, "{name}");
            for _ in 0..10 {
                let l = random_relation(&pm, &mut rng, 5);
                let pl = pm.p_of_integer_relation(&l).unwrap();
                let shifted: Vec<Rat> = entry.degree.iter().zip(&pl).map(|(a, b)| a + b).collect();
                assert_eq!(pm.ceiling_vector(&shifted), entry.box_vector, "{name} {l:?}");
            }
        }
    }
}

#[test]
fn rho_membership_verdicts_agree() {
    let mut fans = with_sectors();
    fans.push(("F3", corpus::f3()));
    for (name, f) in fans {
        let ext = ExtendedFan::new(f).unwrap();
        let data = picard_data(&ext).unwrap();
        let m = rho_membership(&ext, &data).unwrap();
        assert_eq!(m.by_lp, m.by_degree, "{name}");
        assert_eq!(m.by_lp, name != "F3", "{name}");
    }
}

#[test]
fn factorization_holds_for_random_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, f) in corpus::named() {
        let (pm, _) = common::model(f);
        let ops = OperatorSystem::new(&pm);
        let mut relations = pm.data.relations.clone();
        relations.extend((0..20).map(|_| random_relation(&pm, &mut rng, 2)));
        for l in &relations {
            let lhs = ops.extra_chi_prefix(l).mul(&ops.box_x_unchecked(l).unwrap());
            assert_eq!(lhs, ops.box_tilde(l).unwrap(), "{name} {l:?}");
            assert!(ops.box_x(l).is_ok(), "{name} {l:?}");
        }
    }
}

#[test]
fn negated_relation_negates_operator() {
    let (pm, _) = common::model(corpus::p112());
    let ops = OperatorSystem::new(&pm);
    for l in &pm.data.relations {
        let neg: Vec<Int> = l.iter().map(|x| -x).collect();
        let a = ops.box_tilde(l).unwrap();
        let b = ops.box_tilde(&neg).unwrap();
        assert!(a.add(&b).is_zero());
    }
}
