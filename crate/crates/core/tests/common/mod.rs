#![allow(dead_code)]

use toric_gkz::cohomology::{presentation, OrbifoldRing};
use toric_gkz::fan::{ExtendedFan, StackyFan};
use toric_gkz::picard::PicardModel;

pub fn model(f: StackyFan) -> (PicardModel, OrbifoldRing) {
    let ext = ExtendedFan::new(f).expect("extended fan");
    let coh = presentation(&ext).expect("presentation");
    (PicardModel::new(ext).expect("model"), coh)
}
