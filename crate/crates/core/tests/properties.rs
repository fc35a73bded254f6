use iacsit::allocation::{
    allocate_super, allocate_tight, allocation_size, complete_size, expand_mask, MaskScope, RemovalMode,
};
use iacsit::channel::{AntennaConfig, SubIc};
use iacsit::feasibility::{
    excess_antennas, is_feasible, is_feasible_bruteforce, is_tight, n_eq, n_var, Classification,
};
use proptest::prelude::*;

fn config(max_users: usize, max_antennas: usize) -> impl Strategy<Value = AntennaConfig> {
    (1..=max_users).prop_flat_map(move |k| {
        (
            prop::collection::vec(1..=max_antennas, k),
            prop::collection::vec(1..=max_antennas, k),
        )
            .prop_map(|(rx, tx)| AntennaConfig::new(rx, tx).unwrap())
    })
}

/// Every tight sub-IC by enumeration, skipping the empty one.
fn tight_subics(c: &AntennaConfig) -> Vec<SubIc> {
    let span = 1u32 << c.users();
    (0..span)
        .flat_map(|rx| (0..span).map(move |tx| SubIc::from_masks(rx, tx)))
        .filter(|&s| is_tight(c, s))
        .collect()
}

/// Configurations with exactly `K(K+1)` antennas, most of them feasible.
fn tight_count(max_users: usize) -> impl Strategy<Value = AntennaConfig> {
    (2..=max_users).prop_flat_map(|k| {
        prop::collection::vec(1..=k, 2 * k).prop_map(move |mut a| {
            let target = k * (k + 1);
            while a.iter().sum::<usize>() > target {
                let i = (0..a.len()).max_by_key(|&i| (a[i], i)).unwrap();
                a[i] -= 1;
            }
            while a.iter().sum::<usize>() < target {
                let i = (0..a.len()).min_by_key(|&i| (a[i], i)).unwrap();
                a[i] += 1;
            }
            let tx = a.split_off(k);
            AntennaConfig::new(a, tx).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn polynomial_test_agrees_with_enumeration(c in config(6, 6)) {
        let fast = is_feasible(&c);
        let slow = is_feasible_bruteforce(&c).unwrap();
        prop_assert_eq!(fast.feasible, slow.feasible);
        prop_assert_eq!(fast.classification, slow.classification);
        if let Some(w) = fast.witness.filter(|_| !fast.feasible) {
            prop_assert!(n_var(&c, w) < n_eq(w));
        }
    }

    #[test]
    fn adding_an_antenna_keeps_feasibility(c in config(5, 4), node in 0usize..10) {
        prop_assume!(is_feasible(&c).feasible);
        let k = c.users();
        let mut rx = c.rx_antennas().to_vec();
        let mut tx = c.tx_antennas().to_vec();
        let i = node % (2 * k);
        if i < k { rx[i] += 1 } else { tx[i - k] += 1 }
        let grown = AntennaConfig::new(rx, tx).unwrap();
        prop_assert!(is_feasible(&grown).feasible);
        prop_assert_eq!(is_feasible(&grown).classification, Classification::Super);
    }

    #[test]
    fn tight_masks_are_tight_subics_holding_their_owner(c in tight_count(5)) {
        prop_assume!(is_feasible(&c).classification == Classification::Tight);
        let alloc = allocate_tight(&c).unwrap();
        let tight = tight_subics(&c);
        for m in alloc.masks() {
            match m.scope {
                MaskScope::Complete => {}
                MaskScope::Sets(s) if s.is_empty() => {
                    // A lone single-antenna transmitter is tight on its own.
                    prop_assert_eq!(c.tx_antennas()[m.owner_tx], 1);
                }
                MaskScope::Sets(s) => {
                    prop_assert!(s.has_tx(m.owner_tx));
                    prop_assert!(tight.contains(&s));
                }
            }
        }
        prop_assert!(allocation_size(&c, &alloc) <= complete_size(&c));
    }

    #[test]
    fn size_counts_expanded_mask_entries(c in tight_count(5)) {
        prop_assume!(is_feasible(&c).classification == Classification::Tight);
        let alloc = allocate_tight(&c).unwrap();
        let expanded: usize = alloc
            .masks()
            .iter()
            .map(|m| expand_mask(&c, m).iter().filter(|&&b| b).count())
            .sum();
        prop_assert_eq!(expanded, allocation_size(&c, &alloc));
    }

    #[test]
    fn removal_reaches_tightness(c in config(4, 4)) {
        prop_assume!(is_feasible(&c).classification == Classification::Super);
        let s = excess_antennas(&c) as usize;
        let (hp, ha) = allocate_super(&c, RemovalMode::Heuristic).unwrap();
        prop_assert_eq!(hp.removed(), s);
        prop_assert_eq!(is_feasible(&hp.reduced_config).classification, Classification::Tight);
        let (ep, ea) = allocate_super(&c, RemovalMode::Exhaustive).unwrap();
        prop_assert_eq!(ep.removed(), s);
        prop_assert!(
            allocation_size(&ep.reduced_config, &ea) <= allocation_size(&hp.reduced_config, &ha)
        );
    }
}

#[test]
fn homogeneous_tight_settings_have_no_strict_tight_subic() {
    for k in 2..=8usize {
        for m in 2..k {
            let n = k + 1 - m;
            let c = AntennaConfig::homogeneous(n, m, k).unwrap();
            let full = SubIc::full(k);
            assert_eq!(tight_subics(&c), vec![full], "{c}");
            let alloc = allocate_tight(&c).unwrap();
            assert!(alloc.masks().iter().all(|m| m.is_complete()), "{c}");
        }
    }
}

#[test]
fn homogeneous_complete_size_closed_form() {
    for k in 1..=6 {
        for (n, m) in [(1, 1), (2, 3), (4, 2)] {
            let c = AntennaConfig::homogeneous(n, m, k).unwrap();
            assert_eq!(complete_size(&c), k * k * (k - 1) * n * m);
        }
    }
}

#[test]
fn three_pairs_plus_a_large_user() {
    // 20 antennas for K = 4 meets the counting bound exactly.
    let c: AntennaConfig = "[(2,2)^3.(4,4)]".parse().unwrap();
    assert_eq!(c, "[(2,2).(2,2).(2,2).(4,4)]".parse().unwrap());
    assert_eq!(
        is_feasible_bruteforce(&c).unwrap().classification,
        Classification::Tight
    );
    let alloc = allocate_tight(&c).unwrap();
    let inner = SubIc::from_indices(&[0, 1, 2], &[0, 1, 2], 4).unwrap();
    for j in 0..3 {
        assert_eq!(alloc.masks()[j].scope, MaskScope::Sets(inner));
    }
    // TX 4 cannot stay inside the first three pairs, the smallest tight
    // sub-IC holding it adds only that transmitter.
    let with_tx4 = SubIc::from_indices(&[0, 1, 2], &[0, 1, 2, 3], 4).unwrap();
    assert_eq!(alloc.masks()[3].scope, MaskScope::Sets(with_tx4));
    assert_eq!((allocation_size(&c, &alloc), complete_size(&c)), (120, 288));
}
