use proptest::prelude::*;
use sphere_qmc::geometry::{apply_rotation, inverse_stereographic, pairwise_cosines, stereographic, Rotation};
use sphere_qmc::samplers::sample_iid_uniform;
use sphere_qmc::{Configuration, RngStream, UnitPoint};

#[test]
fn stereographic_round_trip() {
    let c = sample_iid_uniform(10_000, &RngStream::new(1, 0)).unwrap();
    for p in c.iter() {
        let Some(w) = stereographic(*p) else { continue };
        let q = inverse_stereographic(w);
        let err = (0..3).map(|k| (p.coords()[k] - q.coords()[k]).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{p:?} -> {q:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cosines_symmetric_and_rotation_invariant(n in 1usize..40, seed in any::<u64>()) {
        let c = sample_iid_uniform(n, &RngStream::new(seed, 0)).unwrap();
        let mut rng = RngStream::new(seed, 1).rng();
        let r = Rotation::random(&mut rng);
        let a = pairwise_cosines(&c);
        let b = pairwise_cosines(&apply_rotation(&c, &r));
        for i in 0..n {
            prop_assert_eq!(a.get(i, i), 1.0);
            for j in 0..n {
                prop_assert_eq!(a.get(i, j), a.get(j, i));
                prop_assert!((a.get(i, j) - b.get(i, j)).abs() <= 1e-12);
                prop_assert!((-1.0..=1.0).contains(&a.get(i, j)));
            }
        }
    }

    #[test]
    fn triples_round_trip(xs in prop::collection::vec((-1.0f64..1.0, 0.0f64..std::f64::consts::TAU), 1..20)) {
        let pts: Vec<UnitPoint> = xs.iter().map(|&(z, phi)| UnitPoint::from_height(z, phi)).collect();
        let c = Configuration::new(pts).unwrap();
        // Both readers renormalize, which may move the last bit.
        let back = Configuration::from_triples(&c.triples()).unwrap();
        let json = Configuration::from_json(&c.to_json().unwrap()).unwrap();
        for other in [back, json] {
            for (a, b) in other.triples().iter().zip(c.triples()) {
                for k in 0..3 {
                    prop_assert!((a[k] - b[k]).abs() <= 4.0 * f64::EPSILON);
                }
            }
        }
    }
}
