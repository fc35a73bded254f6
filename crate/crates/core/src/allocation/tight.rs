use crate::channel::{AntennaConfig, SubIc};
use crate::error::{Error, Result};
use crate::feasibility::{self, Anchor, Classification, Scan, ScanOrder};

use super::mask::{CsitAllocation, CsitMask};

/// Mask for transmitter `j` from its scan result.
///
/// A tight sub-IC with an empty side carries no interfering block and is
/// stored as `(∅, ∅)`; the full IC becomes `Complete`; no tight sub-IC at all
/// also falls back to `Complete`.
fn mask_from_scan(config: &AntennaConfig, j: usize, found: Option<SubIc>) -> CsitMask {
    match found {
        Some(s) if s.is_degenerate() => CsitMask::sets(j, SubIc::EMPTY),
        Some(s) if s == SubIc::full(config.users()) => CsitMask::complete(j),
        Some(s) => CsitMask::sets(j, s),
        None => CsitMask::complete(j),
    }
}

/// CSIT allocation for a tightly-feasible configuration: transmitter `j`
/// gets the smallest tight sub-IC the scan finds starting from `(∅, {j})`.
pub fn allocate_tight(config: &AntennaConfig) -> Result<CsitAllocation> {
    let report = feasibility::is_feasible(config);
    if report.classification != Classification::Tight {
        return Err(Error::NotTight(config.to_string()));
    }
    let order = ScanOrder::new(config);
    let masks = (0..config.users())
        .map(|j| {
            let found = feasibility::smallest_tight_with(config, &order, Anchor::Tx(j));
            mask_from_scan(config, j, found)
        })
        .collect();
    CsitAllocation::new(masks)
}

/// Nodes that belong to some tight sub-IC the scan reaches, as a sub-IC
/// whose sets are the member receivers and member transmitters.
///
/// Scans start at every single transmitter and every single receiver.
pub fn tight_membership(config: &AntennaConfig) -> SubIc {
    let order = ScanOrder::new(config);
    let anchors = (0..config.users())
        .map(Anchor::Tx)
        .chain((0..config.users()).map(Anchor::Rx));
    anchors
        .filter_map(|a| Scan::new(config, &order, a, false).find(|&s| feasibility::is_tight(config, s)))
        .fold(SubIc::EMPTY, SubIc::union)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::{allocation_size, complete_size, MaskScope};

    fn cfg(s: &str) -> AntennaConfig {
        s.parse().unwrap()
    }

    fn sub(rx: &[usize], tx: &[usize]) -> SubIc {
        let z = |v: &[usize]| v.iter().map(|i| i - 1).collect::<Vec<_>>();
        SubIc::from_indices(&z(rx), &z(tx), 32).unwrap()
    }

    #[test]
    fn five_user_example() {
        let c = cfg("[(2,3).(2,4).(3,5).(3,2).(4,2)]");
        let a = allocate_tight(&c).unwrap();
        let scopes: Vec<_> = a.masks().iter().map(|m| m.scope).collect();
        assert_eq!(
            scopes,
            vec![
                MaskScope::Sets(sub(&[1, 2, 3], &[1, 4, 5])),
                MaskScope::Sets(sub(&[1, 2, 3, 4], &[1, 2, 4, 5])),
                MaskScope::Complete,
                MaskScope::Sets(sub(&[1, 2], &[4, 5])),
                MaskScope::Sets(sub(&[1, 2], &[4, 5])),
            ]
        );
        assert_eq!(allocation_size(&c, &a), 346);
        assert_eq!(complete_size(&c), 905);
    }

    #[test]
    fn reduced_three_user_example() {
        let c = cfg("[(2,1).(3,2).(2,2)]");
        let a = allocate_tight(&c).unwrap();
        assert_eq!(a.masks()[0].scope, MaskScope::Sets(SubIc::EMPTY));
        assert_eq!(a.masks()[1].scope, MaskScope::Sets(sub(&[3], &[1, 2])));
        assert_eq!(a.masks()[2].scope, MaskScope::Sets(sub(&[1, 3], &[1, 2, 3])));
        assert_eq!(allocation_size(&c, &a), 20);
    }

    #[test]
    fn homogeneous_is_complete() {
        let c = cfg("[(2,2)^3]");
        let a = allocate_tight(&c).unwrap();
        assert!(a.masks().iter().all(|m| m.is_complete()));
        assert_eq!(allocation_size(&c, &a), complete_size(&c));
    }

    #[test]
    fn rejects_non_tight() {
        assert!(matches!(
            allocate_tight(&cfg("[(2,2).(3,2).(2,3)]")),
            Err(Error::NotTight(_))
        ));
        assert!(matches!(allocate_tight(&cfg("[(2,2)^4]")), Err(Error::NotTight(_))));
    }

    #[test]
    fn membership_examples() {
        assert_eq!(tight_membership(&cfg("[(2,1).(3,2).(2,3)]")), sub(&[1, 3], &[1, 2]));
        assert_eq!(tight_membership(&cfg("[(2,2).(3,2).(2,3)]")), SubIc::EMPTY);
    }
}
