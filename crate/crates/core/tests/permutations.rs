use permubench_core::{
    compose, cycle_decomposition, fixed_point_count, random_permutation_uniform, Permutation, RandomStream,
    Transposition,
};
use proptest::prelude::*;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    any::<u64>().prop_map(move |seed| random_permutation_uniform(n, &mut RandomStream::new(seed)).unwrap())
}

fn triple() -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
    (1usize..40).prop_flat_map(|n| (perm(n), perm(n), perm(n)))
}

proptest! {
    #[test]
    fn compose_is_associative((a, b, c) in triple()) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_cancels((a, _, _) in triple()) {
        let n = a.size();
        prop_assert!(compose(&a, &a.inverse()).unwrap().is_identity());
        prop_assert!(compose(&a.inverse(), &a).unwrap().is_identity());
        prop_assert_eq!(a.inverse().inverse(), a.clone());
        prop_assert_eq!(a.inverse().size(), n);
    }

    #[test]
    fn decomposition_round_trip_large(p in (8usize..200).prop_flat_map(perm)) {
        prop_assert_eq!(cycle_decomposition(&p).rebuild().unwrap(), p);
    }

    #[test]
    fn transposition_changes_cycles_by_one(
        p in (7usize..60).prop_flat_map(perm),
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
    ) {
        let n = p.size();
        let (a, b) = (i.index(n) + 1, j.index(n) + 1);
        prop_assume!(a != b);
        let t = Transposition::new(a, b).unwrap();
        let before = p.total_cycle_count() as i64;
        let after = p.apply_transposition(t).unwrap().total_cycle_count() as i64;
        let same_cycle = cycle_decomposition(&p)
            .cycles
            .iter()
            .any(|c| c.contains(&a) && c.contains(&b));
        prop_assert_eq!(after - before, if same_cycle { 1 } else { -1 });
    }

    #[test]
    fn display_parse_round_trip(p in (1usize..30).prop_flat_map(perm)) {
        let text = p.to_string();
        prop_assert_eq!(text.parse::<Permutation>().unwrap(), p);
    }
}

#[test]
fn exhaustive_round_trip_and_fixed_points() {
    for n in 1..=7 {
        let mut count = 0;
        for p in Permutation::all(n) {
            assert_eq!(cycle_decomposition(&p).rebuild().unwrap(), p);
            assert_ne!(fixed_point_count(&p) + 1, n, "{p}");
            assert_eq!(Permutation::from_lex_rank(n, p.lex_rank()).unwrap(), p);
            count += 1;
        }
        assert_eq!(count, (1..=n).product::<usize>());
    }
}

#[test]
fn exhaustive_transposition_parity_small() {
    for n in 2..=6 {
        for p in Permutation::all(n) {
            let c = p.total_cycle_count();
            for t in Transposition::all(n) {
                let d = p.apply_transposition(t).unwrap().total_cycle_count();
                assert_eq!(c.abs_diff(d), 1);
                assert_eq!(p.apply_transposition(t).unwrap(), compose(&t.to_permutation(n).unwrap(), &p).unwrap());
            }
        }
    }
}
