use nalgebra::{DMatrix, DVector};

use super::*;
use crate::allocation::{allocate_super, allocate_tight, CsitAllocation, RemovalMode};
use crate::channel::{AntennaConfig, BlockChannel, ChannelMatrix, SubIc};
use crate::linalg::{basis_vector, eig_min};
use crate::rng;
use crate::C64;

fn cfg(s: &str) -> AntennaConfig {
    s.parse().unwrap()
}

fn unit(seed: u64, n: usize) -> DVector<C64> {
    let mut r = rng::stream(seed, 99);
    let v = DVector::from_fn(n, |_, _| rng::complex_gaussian(&mut r));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

fn random_set(c: &AntennaConfig, seed: u64) -> BeamformerSet {
    let tx = (0..c.users())
        .map(|k| unit(seed * 31 + k as u64, c.tx_antennas()[k]))
        .collect();
    let rx = (0..c.users())
        .map(|k| unit(seed * 37 + 1000 + k as u64, c.rx_antennas()[k]))
        .collect();
    BeamformerSet::full(tx, rx).unwrap()
}

#[test]
fn leakage_single_user_is_zero() {
    let c = cfg("[(2,2)]");
    let h = ChannelMatrix::draw(&c, 1).to_blocks();
    assert_eq!(leakage(&h, &random_set(&c, 4)).unwrap(), 0.0);
}

#[test]
fn leakage_matches_full_matrix_product() {
    let c = cfg("[(2,2)^3]");
    let hm = ChannelMatrix::draw(&c, 3);
    let b = random_set(&c, 5);
    // Block-diagonal G and T: off-diagonal entries of G^H H T are the cross gains.
    let mut g = DMatrix::<C64>::zeros(6, 3);
    let mut t = DMatrix::<C64>::zeros(6, 3);
    for k in 0..3 {
        g.view_mut((2 * k, k), (2, 1)).copy_from(b.rx(k).unwrap());
        t.view_mut((2 * k, k), (2, 1)).copy_from(b.tx(k).unwrap());
    }
    let cross = g.adjoint() * hm.entries() * t;
    let expected: f64 = (0..3)
        .flat_map(|i| (0..3).filter(move |&k| k != i).map(move |k| (i, k)))
        .map(|(i, k)| cross[(i, k)].norm_sqr())
        .sum();
    let got = leakage(&hm.to_blocks(), &b).unwrap();
    assert!(got > 0.0);
    assert!((got - expected).abs() <= 1e-12 * expected.max(1.0));
}

#[test]
fn leakage_zero_when_aligned_by_construction() {
    // Every interferer reaches RX i along a_i; g_i is orthogonal to a_i.
    let k = 3;
    let a: Vec<DVector<C64>> = (0..k).map(|i| unit(50 + i as u64, 2)).collect();
    let mut blocks = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let mut b = DMatrix::from_fn(2, 2, |r, c| C64::new((r + 2 * c + i + j) as f64, 0.5));
            if i != j {
                let scale = C64::new(1.0 + j as f64, -0.5);
                b.set_column(0, &(&a[i] * scale));
            }
            blocks.push(b);
        }
    }
    let h = BlockChannel::from_blocks(k, blocks).unwrap();
    let tx = (0..k).map(|_| basis_vector(2, 0)).collect();
    let rx = a
        .iter()
        .map(|ai| DVector::from_vec(vec![-ai[1].conj(), ai[0].conj()]))
        .collect();
    let b = BeamformerSet::full(tx, rx).unwrap();
    assert!(leakage(&h, &b).unwrap() < 1e-28);
}

#[test]
fn leakage_rejects_wrong_dims() {
    let h = ChannelMatrix::draw(&cfg("[(2,2)^3]"), 1).to_blocks();
    let b = random_set(&cfg("[(3,2)^3]"), 1);
    assert!(leakage(&h, &b).is_err());
}

#[test]
fn homogeneous_three_user_converges() {
    let c = cfg("[(2,2)^3]");
    let h = ChannelMatrix::draw(&c, 11).to_blocks();
    let opts = SolverOptions::default();
    let (b, trace) = min_leakage_solve(&h, SubIc::full(3), &[], &opts).unwrap();
    assert!(trace.converged);
    assert!(trace.final_leakage() <= 1e-10);
    assert_eq!(trace.iterations_used, trace.values.len());
    assert!((leakage(&h, &b).unwrap() - trace.final_leakage()).abs() < 1e-15);
    for w in trace.values.windows(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
}

#[test]
fn generalized_subic_sums_over_present_nodes() {
    // RXs {1,2}, TXs {1,3}: [(2,2).(2,*).(*,2)].
    let c = cfg("[(2,2)^3]");
    let h = ChannelMatrix::draw(&c, 21).to_blocks();
    let present = SubIc::from_indices(&[0, 1], &[0, 2], 3).unwrap();
    let t1 = unit(1, 2);
    let t3 = unit(3, 2);
    let opts = SolverOptions {
        max_iterations: 1,
        ..Default::default()
    };
    let (b, trace) = min_leakage_solve(&h, present, &[(0, t1.clone()), (2, t3.clone())], &opts).unwrap();
    assert!(b.tx(1).is_none() && b.rx(2).is_none());
    assert_eq!(b.present(), present);
    let outer = |v: DVector<C64>| &v * v.adjoint();
    assert_eq!(b.rx(0).unwrap(), &eig_min(&outer(h.block(0, 2) * &t3)));
    let cov2 = outer(h.block(1, 0) * &t1) + outer(h.block(1, 2) * &t3);
    let g2 = eig_min(&cov2);
    assert!((b.rx(1).unwrap() - g2).norm() < 1e-12);
    let direct = (h.block(0, 2) * &t3).dotc(b.rx(0).unwrap()).norm_sqr()
        + (h.block(1, 0) * &t1).dotc(b.rx(1).unwrap()).norm_sqr()
        + (h.block(1, 2) * &t3).dotc(b.rx(1).unwrap()).norm_sqr();
    assert!((trace.final_leakage() - direct).abs() < 1e-12);
}

#[test]
fn fixed_beamformer_is_untouched() {
    let c = cfg("[(2,2)^3]");
    let h = ChannelMatrix::draw(&c, 8).to_blocks();
    let t1 = unit(77, 2);
    let opts = SolverOptions {
        max_iterations: 300,
        ..Default::default()
    };
    let (b, trace) = min_leakage_solve(&h, SubIc::full(3), &[(0, t1.clone())], &opts).unwrap();
    assert_eq!(b.tx(0).unwrap(), &t1);
    for w in trace.values.windows(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
}

#[test]
fn solver_input_errors() {
    let c = cfg("[(2,2)^3]");
    let h = ChannelMatrix::draw(&c, 8).to_blocks();
    let opts = SolverOptions::default();
    assert!(matches!(
        min_leakage_solve(&h, SubIc::EMPTY, &[], &opts),
        Err(crate::Error::EmptyChannel)
    ));
    let partial = SubIc::from_indices(&[0], &[1], 3).unwrap();
    assert!(min_leakage_solve(&h, partial, &[(2, unit(1, 2))], &opts).is_err());
    assert!(min_leakage_solve(&h, SubIc::full(3), &[(0, unit(1, 3))], &opts).is_err());
    let long = DVector::from_element(2, C64::new(1.0, 0.0));
    assert!(min_leakage_solve(&h, SubIc::full(3), &[(0, long)], &opts).is_err());
    let bad = SolverOptions {
        max_iterations: 0,
        ..Default::default()
    };
    assert!(min_leakage_solve(&h, SubIc::full(3), &[], &bad).is_err());
}

#[test]
fn rx_filter_minimizes_rayleigh_quotient() {
    let c = cfg("[(3,2).(3,2).(2,3)]");
    let h = ChannelMatrix::draw(&c, 5).to_blocks();
    let b = random_set(&c, 9);
    let tx: Vec<_> = (0..3).map(|k| b.tx(k).unwrap().clone()).collect();
    let g = rx_filters(&h, &tx).unwrap();
    for i in 0..3 {
        let cost = |v: &DVector<C64>| -> f64 {
            (0..3)
                .filter(|&k| k != i)
                .map(|k| (h.block(i, k) * &tx[k]).dotc(v).norm_sqr())
                .sum()
        };
        let best = cost(&g[i]);
        assert!((g[i].norm() - 1.0).abs() < 1e-12);
        for p in 0..1000 {
            let probe = unit(10_000 + p, h.rx_dims()[i]);
            assert!(best <= cost(&probe) + 1e-12);
        }
    }
}

#[test]
fn single_user_filter_is_canonical() {
    let c = cfg("[(3,2)]");
    let h = ChannelMatrix::draw(&c, 5).to_blocks();
    let g = rx_filters(&h, &[unit(1, 2)]).unwrap();
    assert_eq!(g[0], basis_vector(3, 0));
}

#[test]
fn rate_examples() {
    let c = cfg("[(1,1)]");
    let h = ChannelMatrix::from_entries(&c, DMatrix::from_element(1, 1, C64::new(1.0, 0.0)))
        .unwrap()
        .to_blocks();
    let b = BeamformerSet::full(vec![basis_vector(1, 0)], vec![basis_vector(1, 0)]).unwrap();
    assert!((user_rates(&h, &b, 1.0).unwrap()[0] - 1.0).abs() < 1e-15);
    let c3 = cfg("[(2,2)^3]");
    let h3 = ChannelMatrix::draw(&c3, 2).to_blocks();
    assert!(user_rates(&h3, &random_set(&c3, 1), 0.0)
        .unwrap()
        .iter()
        .all(|&r| r == 0.0));
    assert!(user_rates(&h3, &random_set(&c3, 1), -1.0).is_err());
}

#[test]
fn aligned_rates_gain_one_dof() {
    let c = cfg("[(2,2)^3]");
    let hm = ChannelMatrix::draw(&c, 12);
    let (b, trace) = complete_precode(&hm, &SolverOptions::default()).unwrap();
    assert!(trace.converged);
    let h = hm.to_blocks();
    let r30 = user_rates(&h, &b, db_to_power(30.0)).unwrap();
    let r50 = user_rates(&h, &b, db_to_power(50.0)).unwrap();
    for (a, z) in r30.iter().zip(&r50) {
        let slope = (z - a) / 2.0;
        assert!((slope - 10f64.log2()).abs() < 0.1, "slope {slope}");
    }
}

#[test]
fn complete_allocation_is_a_single_full_solve() {
    let c = cfg("[(2,2)^3]");
    let hm = ChannelMatrix::draw(&c, 4);
    let opts = SolverOptions {
        init_seed: 3,
        ..Default::default()
    };
    let d = distributed_precode(&c, &CsitAllocation::complete(3), None, &hm, &opts).unwrap();
    let (full, _) = complete_precode(&hm, &opts).unwrap();
    assert_eq!(d.beamformers, full);
    assert!(d.replicas.is_empty());
    assert_eq!(d.solves.len(), 3);
}

#[test]
fn five_user_incomplete_aligns() {
    let c = cfg("[(2,3).(2,4).(3,5).(3,2).(4,2)]");
    let alloc = allocate_tight(&c).unwrap();
    let hm = ChannelMatrix::draw(&c, 1);
    let d = distributed_precode(&c, &alloc, None, &hm, &SolverOptions::default()).unwrap();
    assert!(d.leakage <= 1e-8, "leakage {}", d.leakage);
    assert!(d.replication_consistent());
    // TX 3 (complete CSIT) recomputes everyone else; TX 2 recomputes 1, 4, 5.
    let held = |j: usize| {
        let mut v: Vec<usize> = d.replicas.iter().filter(|r| r.holder == j).map(|r| r.tx).collect();
        v.sort();
        v
    };
    assert_eq!(held(2), vec![0, 1, 3, 4]);
    assert_eq!(held(1), vec![0, 3, 4]);
    assert_eq!(held(0), vec![3, 4]);
    assert!(held(3).is_empty() && held(4).is_empty());
    assert_eq!(d.solves[0].frozen, vec![3, 4]);
    assert_eq!(d.solves[3].frozen, Vec::<usize>::new());
}

#[test]
fn reduced_configuration_precodes() {
    let c = cfg("[(2,2).(3,2).(2,3)]");
    let (plan, alloc) = allocate_super(&c, RemovalMode::Heuristic).unwrap();
    let hm = ChannelMatrix::draw(&c, 6);
    let d = distributed_precode(&c, &alloc, Some(&plan), &hm, &SolverOptions::default()).unwrap();
    assert!(d.leakage <= 1e-8, "leakage {}", d.leakage);
    assert!(d.replication_consistent());
    for k in 0..3 {
        assert_eq!(d.beamformers.tx(k).unwrap().len(), c.tx_antennas()[k]);
    }
}

#[test]
fn reduction_bases_follow_direct_channel() {
    let c = cfg("[(3,3).(2,2)]");
    let hm = ChannelMatrix::draw(&c, 2);
    let plan = crate::allocation::RemovalPlan {
        rx_removals: vec![0],
        tx_removals: vec![0],
        reduced_config: cfg("[(2,2).(2,2)]"),
    };
    let r = Reduction::from_plan(&hm, &plan).unwrap();
    assert!(r.tx[1].is_none() && r.rx[1].is_none());
    let v = r.tx[0].as_ref().unwrap();
    let u = r.rx[0].as_ref().unwrap();
    let proj = r.project(&hm.to_blocks()).unwrap();
    assert_eq!(proj.tx_dims(), &[2, 2]);
    assert_eq!(proj.rx_dims(), &[2, 2]);
    // U^H H_11 V keeps the two dominant singular values of H_11.
    let sv = hm.block(0, 0).unwrap().into_owned().singular_values();
    let kept = (u.columns().ad_mul(&hm.block(0, 0).unwrap().into_owned()) * v.columns()).singular_values();
    let mut a: Vec<f64> = sv.iter().copied().collect();
    a.sort_by(|x, y| y.total_cmp(x));
    let mut b: Vec<f64> = kept.iter().copied().collect();
    b.sort_by(|x, y| y.total_cmp(x));
    assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
}
