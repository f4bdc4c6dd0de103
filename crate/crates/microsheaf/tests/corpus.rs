use std::sync::Arc;

use microsheaf::microloc::{
    curated_data, morse_duality_check, perversity_by_morse_groups, perversity_by_stalks, Perversity,
};
use microsheaf::sheafcat::corpus::corpus;
use microsheaf::sheafcat::decompose_into_standards;
use microsheaf::stratspace::{preset, PRESETS};

#[test]
fn corpus_is_generated_and_consistent() {
    for name in PRESETS {
        let x = Arc::new(preset(name).unwrap());
        let data = curated_data(&x, name).unwrap();
        for (n, f) in corpus(&x) {
            assert!(f.is_constructible(), "{name} {n}");
            let d = decompose_into_standards(&f).unwrap_or_else(|e| panic!("{name} {n}: {e}"));
            assert!(d.certificate.is_quasi_isomorphism());
            assert_eq!(d.tree.evaluate(&x).fingerprint(), f.fingerprint(), "{name} {n}");
            assert!(morse_duality_check(&f, &data).unwrap().ok, "{name} {n}");
            if x.is_complex_stratified() {
                let a = perversity_by_stalks(&f, &Perversity::Middle).unwrap();
                let b = perversity_by_morse_groups(&f, &data.data).unwrap();
                assert_eq!(a.perverse, b.perverse, "{name} {n}");
            }
        }
    }
}
