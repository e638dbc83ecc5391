//! Crepant resolution of the weighted plane (1,1,2) by F₂.

use toric_gkz::cohomology::presentation;
use toric_gkz::cone::is_face;
use toric_gkz::corpus;
use toric_gkz::crepant::{
    build_global_fan, check_gen_equals_new_rays, check_sl, exceptional_not_in_kahler, is_crepant, pair_models,
    validate_q_basis, ResolutionPair,
};
use toric_gkz::fan::ExtendedFan;
use toric_gkz::linalg::rat;

#[test]
fn weighted_plane_resolution() {
    let pair = ResolutionPair::new(corpus::p112(), corpus::f2()).unwrap();
    let report = is_crepant(&pair).unwrap();
    assert!(report.crepant);
    assert_eq!(report.witnesses.len(), 1);
    assert_eq!(report.witnesses[0].ray, vec![0, -1]);
    assert_eq!(report.witnesses[0].coordinates, vec![rat(1, 2), rat(1, 2)]);
    assert!(check_sl(&pair.orbifold));
    assert!(check_gen_equals_new_rays(&pair).equal);

    let models = pair_models(&pair, None).unwrap();
    assert!(exceptional_not_in_kahler(&pair, &models).unwrap().iter().all(|(_, outside)| *outside));
    let dx = presentation(&models.orbifold.ext).unwrap().dim();
    let dz = presentation(&ExtendedFan::new(corpus::f2()).unwrap()).unwrap().dim();
    assert_eq!((dx, dz), (4, 4));

    let global = build_global_fan(&models).unwrap();
    assert!(is_face(&global.intersection, &global.cone_x).unwrap());
    assert!(is_face(&global.intersection, &global.cone_z).unwrap());
    let again = validate_q_basis(&models, &global.q).unwrap();
    assert_eq!(again.transition, global.transition);
}

#[test]
fn subdivision_through_interior_point_is_not_crepant() {
    let pair = ResolutionPair::new(corpus::p112(), corpus::p112_subdivided()).unwrap();
    let report = is_crepant(&pair).unwrap();
    assert!(!report.crepant);
    assert!(report.witnesses.iter().any(|w| w.discrepancy == rat(1, 1)));
    assert!(!check_sl(&corpus::p113()));
}

#[test]
fn unrelated_fans_are_rejected() {
    assert!(ResolutionPair::new(corpus::p112(), corpus::p2()).is_err());
}
