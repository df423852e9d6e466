use proptest::prelude::*;

use herd_core::projgeom::{enumerate_pg2, Homography, Point2};
use herd_core::zspace::{interpolate, ZFunc};
use herd_core::{Felt, Field, HerdSpace};

const ORDERS: [u64; 6] = [4, 5, 7, 8, 9, 11];

fn field_strategy() -> impl Strategy<Value = Field> {
    prop::sample::select(ORDERS.to_vec()).prop_map(|q| Field::with_order(q).unwrap())
}

fn field_and_codes(n: usize) -> impl Strategy<Value = (Field, Vec<u32>)> {
    field_strategy().prop_flat_map(move |k| {
        let q = k.q();
        (Just(k), prop::collection::vec(0..q, n))
    })
}

fn elt(k: &Field, c: u32) -> Felt {
    k.element(c as u64).unwrap()
}

// random functions vanishing at 0, possibly not a flock
fn zfunc(k: &Field, codes: &[u32]) -> ZFunc {
    ZFunc::from_codes(k, codes).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms((k, c) in field_and_codes(3)) {
        let (a, b, d) = (elt(&k, c[0]), elt(&k, c[1]), elt(&k, c[2]));
        prop_assert_eq!(k.mul(a, k.add(b, d)), k.add(k.mul(a, b), k.mul(a, d)));
        prop_assert_eq!(k.add(k.sub(a, b), b), a);
        if a != Felt::ZERO {
            prop_assert_eq!(k.mul(a, k.inv(a).unwrap()), Felt::ONE);
            prop_assert_eq!(k.pow(a, k.q() as u64 - 1), Felt::ONE);
        }
        // Frobenius is additive
        prop_assert_eq!(k.frobenius(k.add(a, b), 1), k.add(k.frobenius(a, 1), k.frobenius(b, 1)));
    }

    #[test]
    fn interpolation_inverts_evaluation((k, c) in field_and_codes(10)) {
        let q = k.q() as usize;
        let f = zfunc(&k, &c[..q - 1]);
        let g = interpolate(&k, &f.values(&k)).unwrap();
        prop_assert_eq!(g, f);
    }

    #[test]
    fn homography_inverse_round_trip((k, c) in field_and_codes(12)) {
        let rows = [
            [elt(&k, c[0]), elt(&k, c[1]), elt(&k, c[2])],
            [elt(&k, c[3]), elt(&k, c[4]), elt(&k, c[5])],
            [elt(&k, c[6]), elt(&k, c[7]), elt(&k, c[8])],
        ];
        if let Ok(h) = Homography::<3>::new(&k, rows) {
            let inv = h.inverse(&k);
            let p = Point2::from_codes(&k, [1, c[9], c[10]]).unwrap();
            prop_assert_eq!(inv.apply(&k, &h.apply(&k, &p)), p);
        }
    }

    #[test]
    fn herd_entries_partition_the_plane((k, c) in field_and_codes(30)) {
        let m = k.q() as usize - 1;
        let (f, g, h) = (zfunc(&k, &c[..m]), zfunc(&k, &c[10..10 + m]), zfunc(&k, &c[20..20 + m]));
        if let Ok(herd) = HerdSpace::build(&k, &f, &g, &h) {
            prop_assert_eq!(herd.entries().len(), enumerate_pg2(&k).len());
            let phc = herd.phc();
            for e in herd.entries() {
                prop_assert_eq!(e.permutation, phc.contains(&e.point));
                prop_assert_eq!(e.permutation, e.class.rep().is_some_and(|r| r.is_permutation(&k)));
            }
        }
    }

    #[test]
    fn scalar_multiple_keeps_the_herd_cover((k, c) in field_and_codes(31)) {
        let m = k.q() as usize - 1;
        let s = elt(&k, 1 + c[30] % (k.q() - 1));
        let (f, g, h) = (zfunc(&k, &c[..m]), zfunc(&k, &c[10..10 + m]), zfunc(&k, &c[20..20 + m]));
        let (fs, gs, hs) = (f.scale(&k, s), g.scale(&k, s), h.scale(&k, s));
        if let (Ok(a), Ok(b)) = (HerdSpace::build(&k, &f, &g, &h), HerdSpace::build(&k, &fs, &gs, &hs)) {
            prop_assert_eq!(a.phc(), b.phc());
        }
    }
}
