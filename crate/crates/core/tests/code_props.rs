mod common;

use std::io::Cursor;

use polarlist::code::{polar_transform, reliability_order};
use polarlist::sim::{run_point, DecoderSpec, StopRule};
use polarlist::{ArithModel, Construction, PolarCode};
use proptest::prelude::*;

const GOLDEN: &str = include_str!("data/frozen_n1024_k512_ga2db.txt");

fn bits(len: usize) -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0u8..=1, len)
}

fn gf2_matmul(u: &[u8]) -> Vec<u8> {
    // x_j = Σ_i u_i G_ij with G_ij = 1 iff the bits of j are a subset of the bits of i
    let len = u.len();
    (0..len)
        .map(|j| (0..len).filter(|&i| i & j == j).fold(0u8, |acc, i| acc ^ u[i]))
        .collect()
}

proptest! {
    #[test]
    fn encoding_is_linear(seed in any::<u64>(), n in 1usize..=7) {
        let len = 1 << n;
        let mut rng = common::rng(seed);
        let k = 1 + (seed as usize % len);
        let code = common::random_code(len, k, &mut rng);
        let a: Vec<u8> = (0..k).map(|j| ((seed >> (j % 64)) & 1) as u8).collect();
        let b: Vec<u8> = (0..k).map(|j| ((seed.rotate_left(17) >> (j % 64)) & 1) as u8).collect();
        let ab: Vec<u8> = a.iter().zip(&b).map(|(p, q)| p ^ q).collect();
        let xa = code.encode(&a).unwrap();
        let xb = code.encode(&b).unwrap();
        let xab = code.encode(&ab).unwrap();
        let sum: Vec<u8> = xa.iter().zip(&xb).map(|(p, q)| p ^ q).collect();
        prop_assert_eq!(xab, sum);
    }

    #[test]
    fn transform_is_an_involution(u in (0usize..=8).prop_flat_map(|n| bits(1 << n))) {
        let mut x = u.clone();
        polar_transform(&mut x);
        polar_transform(&mut x);
        prop_assert_eq!(x, u);
    }

    #[test]
    fn butterfly_matches_kronecker_matrix(u in (0usize..=6).prop_flat_map(|n| bits(1 << n))) {
        let mut x = u.clone();
        polar_transform(&mut x);
        prop_assert_eq!(x, gf2_matmul(&u));
    }

    #[test]
    fn frozen_file_round_trip(seed in any::<u64>(), n in 0usize..=10) {
        let len = 1 << n;
        let mut rng = common::rng(seed);
        let code = common::random_code(len, 1 + seed as usize % len, &mut rng);
        let back = PolarCode::read_frozen(Cursor::new(code.to_frozen_string())).unwrap();
        prop_assert_eq!(back, code);
    }
}

#[test]
fn encoder_rows() {
    let code = PolarCode::from_frozen(vec![false; 4]).unwrap();
    assert_eq!(code.encode(&[0, 0, 0, 0]).unwrap(), vec![0, 0, 0, 0]);
    assert_eq!(code.encode(&[0, 0, 0, 1]).unwrap(), vec![1, 1, 1, 1]);
    assert_eq!(code.encode(&[1, 0, 0, 0]).unwrap(), vec![1, 0, 0, 0]);
    assert!(code.encode(&[1, 0, 0]).is_err());
}

#[test]
fn bec_frozen_sets_are_nested() {
    let method = Construction::BhattacharyyaBec { erasure_prob: 0.5 };
    for len in [2usize, 16, 256] {
        let mut prev = PolarCode::construct(len, 1, method).unwrap();
        for k in 2..=len {
            let next = PolarCode::construct(len, k, method).unwrap();
            for i in 0..len {
                assert!(!next.is_frozen(i) || prev.is_frozen(i), "N={len} K={k} index {i}");
            }
            prev = next;
        }
    }
}

// With the design noise level held fixed the ranking is a single order, so
// information sets grow by one index at a time.
#[test]
fn ga_order_at_fixed_noise_is_nested() {
    let method = Construction::GaussianApprox { design_ebn0_db: 2.0 };
    let order = reliability_order(1024, &method, 0.5);
    let mut seen = vec![false; 1024];
    for &i in &order {
        assert!(!seen[i]);
        seen[i] = true;
    }
    let code = PolarCode::construct(1024, 512, method).unwrap();
    let mut info: Vec<usize> = order[..512].to_vec();
    info.sort_unstable();
    assert_eq!(code.info_indices(), &info[..]);
}

#[test]
fn bec_two_bit_example() {
    let code = PolarCode::construct(2, 1, Construction::BhattacharyyaBec { erasure_prob: 0.5 }).unwrap();
    assert_eq!(code.frozen(), &[true, false]);
    for method in [
        Construction::BhattacharyyaBec { erasure_prob: 0.3 },
        Construction::GaussianApprox { design_ebn0_db: 1.0 },
    ] {
        assert_eq!(PolarCode::construct(2, 2, method).unwrap().frozen(), &[false, false]);
    }
}

#[test]
fn construction_is_deterministic_and_pinned() {
    let method = Construction::GaussianApprox { design_ebn0_db: 2.0 };
    let code = PolarCode::construct(1024, 512, method).unwrap();
    assert_eq!(code, PolarCode::construct(1024, 512, method).unwrap());
    let golden = PolarCode::read_frozen(Cursor::new(GOLDEN)).unwrap();
    assert_eq!(golden.k(), 512);
    assert_eq!(code, golden);
}

#[test]
fn pinned_code_sc_fer_band_at_2db() {
    let code = PolarCode::read_frozen(Cursor::new(GOLDEN)).unwrap();
    let stop = StopRule {
        max_frames: 10_000,
        min_frame_errors: 0,
    };
    let p = run_point(&code, &DecoderSpec::sc(ArithModel::ApproxMin), 2.0, 0, &stop, 11).unwrap();
    assert!((1e-2..=2e-1).contains(&p.fer), "fer {}", p.fer);
}

#[test]
fn bad_parameters_are_rejected() {
    let bec = Construction::BhattacharyyaBec { erasure_prob: 0.5 };
    assert!(PolarCode::construct(12, 4, bec).is_err());
    assert!(PolarCode::construct(16, 0, bec).is_err());
    assert!(PolarCode::construct(16, 17, bec).is_err());
    assert!(PolarCode::construct(16, 8, Construction::BhattacharyyaBec { erasure_prob: 1.0 }).is_err());
    assert!(PolarCode::construct(16, 8, Construction::GaussianApprox { design_ebn0_db: f64::NAN }).is_err());
}
