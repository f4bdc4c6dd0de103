use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use microsheaf::ainfty::{cochain_model, hpl_transfer, random_complex, TransferData};
use microsheaf::homalg::{ChainMap, CochainComplex, Matrix};
use microsheaf::laggr::{
    holomorphic_block, j_matrix, pair_report, random_holomorphic_pair, random_symmetric, short_path_angles,
    subspace_distance, LagrangianPlane,
};
use microsheaf::microloc::{
    curated_data, local_morse_group, perversity_by_morse_groups, perversity_by_stalks, Perversity,
};
use microsheaf::morse::{bump, open_vs_mor, perturbed_sequence, DirectedFunction};
use microsheaf::sheafcat::corpus::random_sheaf;
use microsheaf::sheafcat::{adjunction_triangles, decompose_into_standards, verdier_dual};
use microsheaf::stratspace::{preset, subdivided_circle, CellSet, StratifiedComplex, PRESETS};

const COMPLEX_PRESETS: [&str; 3] = ["p1", "c-origin", "s2"];

fn matrix(rows: usize, cols: usize, entries: &[i64]) -> Matrix {
    Matrix::from_i64(rows, cols, &entries[..rows * cols])
}

/// A three-term complex Q^a → Q^b → Q^c with d1 = X·L, L spanning the left null space of d0.
fn three_term(a: usize, b: usize, c: usize, e: &[i64]) -> CochainComplex {
    let d0 = matrix(b, a, e);
    let left = d0.transpose().kernel().transpose();
    let x = matrix(c, left.rows(), &e[a * b..]);
    let d1 = &x * &left;
    CochainComplex::new(0, vec![a, b, c], vec![d0, d1]).unwrap()
}

fn space(name: &str) -> Arc<StratifiedComplex> {
    Arc::new(preset(name).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn euler_characteristic_is_alternating_betti_sum(
        a in 0usize..4, b in 0usize..4, c in 0usize..4,
        e in prop::collection::vec(-2i64..=2, 32),
    ) {
        let x = three_term(a, b, c, &e);
        let alt: i64 = x.betti_numbers().iter().map(|&(k, n)| if k % 2 == 0 { n as i64 } else { -(n as i64) }).sum();
        prop_assert_eq!(x.euler_characteristic(), alt);
        prop_assert_eq!(x.euler_characteristic(), a as i64 - b as i64 + c as i64);
    }

    #[test]
    fn cone_is_acyclic_iff_quasi_isomorphism(n in 1usize..4, e in prop::collection::vec(-1i64..=1, 9), k in -1i32..2) {
        let s = CochainComplex::concentrated(k, n);
        let f = ChainMap::new(s.clone(), s.clone(), k, vec![matrix(n, n, &e)]).unwrap();
        let invertible = matrix(n, n, &e).rank() == n;
        prop_assert_eq!(f.is_quasi_isomorphism(), invertible);
        prop_assert_eq!(f.cone().is_acyclic(), invertible);
    }

    #[test]
    fn identity_cone_is_acyclic(a in 0usize..4, b in 0usize..4, c in 0usize..4, e in prop::collection::vec(-2i64..=2, 32)) {
        let x = three_term(a, b, c, &e);
        prop_assert!(ChainMap::identity(&x).cone().is_acyclic());
    }

    #[test]
    fn open_star_is_minimal(p in 0usize..PRESETS.len(), pick in 0usize..64) {
        let x = preset(PRESETS[p]).unwrap();
        let sigma = pick % x.num_cells();
        let star = x.open_star(sigma);
        prop_assert!(star.cells().contains(&sigma));
        for &c in star.cells() {
            if c == sigma {
                continue;
            }
            let mut smaller: CellSet = star.cells().clone();
            smaller.remove(&c);
            prop_assert!(!x.is_open(&smaller), "{} without {}", PRESETS[p], x.name(c));
        }
        let one: CellSet = [sigma].into_iter().collect();
        let faces: CellSet = x.closure(&one).into_iter().filter(|&d| d != sigma).collect();
        let rim: CellSet = x.closure(star.cells()).difference(star.cells()).copied().collect();
        let expected: CellSet = x.link(sigma).union(&faces).copied().collect();
        prop_assert_eq!(rim, expected);
    }

    #[test]
    fn sections_over_stars_are_stalks(p in 0usize..PRESETS.len(), seed in 0u64..1000) {
        let x = space(PRESETS[p]);
        let f = random_sheaf(&x, seed).unwrap();
        for c in 0..x.num_cells() {
            let star = x.open_star(c);
            prop_assert_eq!(f.sections(&star).betti_numbers(), f.stalk_cohomology(c));
        }
    }

    #[test]
    fn duality_is_an_involution_on_stalk_dims(p in 0usize..PRESETS.len(), seed in 0u64..1000) {
        let x = space(PRESETS[p]);
        let f = random_sheaf(&x, seed).unwrap();
        prop_assert_eq!(verdier_dual(&verdier_dual(&f)).fingerprint(), f.fingerprint());
    }

    #[test]
    fn decomposition_matches_sections(p in 0usize..PRESETS.len(), seed in 0u64..1000) {
        let x = space(PRESETS[p]);
        let f = random_sheaf(&x, seed).unwrap();
        let d = decompose_into_standards(&f).unwrap();
        prop_assert!(d.certificate.is_quasi_isomorphism());
        for line in d.sections_check(&f) {
            prop_assert!(line.ok, "{:?}", line);
        }
    }

    #[test]
    fn perversity_tests_agree(p in 0usize..COMPLEX_PRESETS.len(), seed in 1000u64..100_000) {
        let name = COMPLEX_PRESETS[p];
        let x = space(name);
        let data = curated_data(&x, name).unwrap();
        let f = random_sheaf(&x, seed).unwrap();
        let a = perversity_by_stalks(&f, &Perversity::Middle).unwrap();
        let b = perversity_by_morse_groups(&f, &data.data).unwrap();
        prop_assert_eq!(a.perverse, b.perverse);
    }

    #[test]
    fn morse_euler_is_additive(p in 0usize..COMPLEX_PRESETS.len(), seed in 0u64..1000, pick in 0usize..64) {
        let name = COMPLEX_PRESETS[p];
        let x = space(name);
        let data = curated_data(&x, name).unwrap();
        let f = random_sheaf(&x, seed).unwrap();
        let sigma = pick % x.num_cells();
        let one: CellSet = [sigma].into_iter().collect();
        let y = x.closure(&one);
        let (t1, t2) = adjunction_triangles(&f, &y).unwrap();
        for t in [t1, t2] {
            for d in &data.data {
                let e = |g| local_morse_group(g, d).unwrap().euler;
                prop_assert_eq!(e(&t.middle), e(&t.first) + e(&t.third));
            }
        }
    }

    #[test]
    fn transfer_of_random_complexes(seed in 0u64..10_000) {
        let m = cochain_model(&random_complex(seed)).unwrap();
        let tr = hpl_transfer(&m.dg, &m.transfer, 4, 1).unwrap();
        prop_assert!(tr.b.check_relations_through(4).unwrap().ok);
        prop_assert_eq!(tr.b.hom_cohomology(0, 0), m.dg.hom_cohomology(0, 0));
        let total: usize = m.dg.hom_cohomology(0, 0).iter().map(|&(_, n)| n).sum();
        let minimal = tr.b.op(1).values().all(|v| v.is_empty());
        prop_assert_eq!(minimal, tr.b.num_gens() == total);
        prop_assert!(tr.g_after_f_is_identity().unwrap());
    }

    #[test]
    fn identity_transfer_is_verbatim(seed in 0u64..10_000) {
        let m = cochain_model(&random_complex(seed)).unwrap();
        let tr = hpl_transfer(&m.dg, &TransferData::identity(&m.dg), 4, 1).unwrap();
        prop_assert!(tr.b.same_as(&m.dg.truncated(4)));
    }

    #[test]
    fn circle_perturbations_compare(k in 1i64..6, centre in 0usize..6) {
        let s = subdivided_circle(6).unwrap();
        let rho = bump(&s, s.cell_index(&format!("v{centre}")).unwrap());
        let f = DirectedFunction::new(&s, s.whole(), rho.clone()).unwrap();
        let list = vec![("X0".to_string(), f.clone()), ("X1".to_string(), f.clone()), ("X2".to_string(), f)];
        let eps = microsheaf::homalg::q_frac(k, 4);
        let objects = perturbed_sequence(&s, list, &rho, &eps).unwrap();
        let r = open_vs_mor(Arc::new(s), objects, 3).unwrap();
        prop_assert!(r.ok);
    }

    #[test]
    fn holomorphic_degree_law(n in 1usize..=4, seed in 0u64..1_000_000) {
        let (l0, l1) = random_holomorphic_pair(n, seed).unwrap();
        let r = pair_report(&l0, &l1).unwrap();
        for (re, im) in r.phases {
            prop_assert!(re > 0.0 && im.abs() < 1e-9 * re.hypot(im));
        }
        prop_assert!(r.pairing_defect < 1e-8);
        prop_assert!((r.angle_sum + n as f64 / 2.0).abs() < 1e-8);
        let expected = l1.theta.unwrap() - l0.theta.unwrap() + n as f64;
        prop_assert!((r.degree.unwrap() - expected).abs() < 1e-6);
    }

    #[test]
    fn short_path_reconstructs(n in 1usize..=4, seed in 0u64..1_000_000) {
        let (l0, l1) = random_holomorphic_pair(n, seed).unwrap();
        let sp = short_path_angles(&l0, &l1).unwrap();
        prop_assert!(sp.angles.iter().all(|&a| -0.5 < a && a < 0.0));
        let rot = LagrangianPlane::new(n, sp.rotated_rows(), None).unwrap();
        prop_assert!(subspace_distance(&rot, &l1).unwrap() < 1e-8);
    }

    #[test]
    fn holomorphic_blocks_anticommute(k in 1usize..=4, seed in 0u64..1_000_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = holomorphic_block(&random_symmetric(k, &mut rng));
        let j = j_matrix(k);
        prop_assert!((&a * &j + &j * &a).amax() < 1e-12);
        prop_assert!((&a - a.transpose()).amax() < 1e-12);
    }
}

