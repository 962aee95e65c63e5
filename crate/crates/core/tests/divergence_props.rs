use nalgebra::DMatrix;
use proptest::prelude::*;
use renyi_core::divergence::*;
use renyi_core::fuzz::sample_region_point;
use renyi_core::matcore::*;
use renyi_core::sampler::{Sampler, Seed};

fn full_rank_pair(seed: u64, d: usize) -> (DensityMatrix, DensityMatrix) {
    let mut rng = Sampler::new(Seed::new(seed, 0));
    (rng.hs_density(d, d).unwrap(), rng.hs_density(d, d).unwrap())
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

fn region_grid() -> Vec<(f64, f64)> {
    let alphas = [0.1, 0.3, 0.5, 0.7, 0.9, 1.2, 1.5, 2.0, 2.5, 3.0];
    let zs = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0];
    alphas
        .iter()
        .flat_map(|&a| zs.iter().map(move |&z| (a, z)))
        .filter(|&(a, z)| in_dpi_region(a, z))
        .collect()
}

/// Block state `Σ_k p_k |k⟩⟨k| ⊗ ρ_k`.
fn flagged(p: &[f64], blocks: &[DensityMatrix]) -> DensityMatrix {
    let d = blocks[0].dim();
    let n = p.len() * d;
    let mut m = DMatrix::zeros(n, n);
    for (k, (pk, b)) in p.iter().zip(blocks).enumerate() {
        m.view_mut((k * d, k * d), (d, d)).copy_from(&b.matrix().scale(*pk));
    }
    DensityMatrix::new(m).unwrap()
}

#[test]
fn region_spot_points() {
    assert!(in_dpi_region(0.5, 0.5));
    assert!(!in_dpi_region(1.5, 0.6));
    assert!(in_dpi_region(3.0, 2.5));
}

#[test]
fn region_matches_stated_conditions_on_a_fine_grid() {
    for i in 1..=400 {
        for j in 1..=400 {
            let (a, z) = (i as f64 * 0.01, j as f64 * 0.01);
            let expected = if i < 100 {
                z >= a.max(1.0 - a) - 1e-12
            } else if i == 100 {
                false
            } else if i <= 200 {
                a / 2.0 - 1e-12 <= z && z <= a + 1e-12
            } else {
                a - 1.0 - 1e-12 <= z && z <= a + 1e-12
            };
            assert_eq!(in_dpi_region(a, z), expected, "({a}, {z})");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_composition(seed in any::<u64>(), s in -1.5f64..1.5, t in -1.5f64..1.5) {
        let mut rng = Sampler::new(Seed::new(seed, 1));
        let rank = rng.int(1, 3);
        let a = rng.hs_density(3, rank).unwrap();
        let lhs = matrix_power(&matrix_power(a.operator(), s).unwrap(), t).unwrap();
        let rhs = matrix_power(a.operator(), s * t).unwrap();
        let scale = 1.0 + max_abs(rhs.matrix());
        prop_assert!(max_abs_diff(lhs.matrix(), rhs.matrix()) <= 1e-9 * scale);
    }

    #[test]
    fn first_power_is_support_restriction(seed in any::<u64>()) {
        let mut rng = Sampler::new(Seed::new(seed, 2));
        let rank = rng.int(1, 4);
        let a = rng.hs_density(4, rank).unwrap();
        let p = support_projector(a.operator()).unwrap();
        let restricted = a.matrix() * p.matrix();
        let once = matrix_power(a.operator(), 1.0).unwrap();
        prop_assert!(max_abs_diff(once.matrix(), &restricted) <= 1e-10);
        prop_assert!(max_abs_diff(&(p.matrix() * p.matrix()), p.matrix()) <= 1e-10);
    }

    #[test]
    fn decomposition_is_deterministic_and_orthonormal(seed in any::<u64>()) {
        let mut rng = Sampler::new(Seed::new(seed, 3));
        let g = rng.ginibre(4, 4);
        let h = HermitianOperator::new(&g + g.adjoint()).unwrap();
        let a = spectral_decompose(&h);
        let b = spectral_decompose(&h);
        prop_assert_eq!(&a, &b);
        let v = a.eigenvectors();
        let gram = v.adjoint() * v;
        prop_assert!(max_abs_diff(&gram, &DMatrix::identity(4, 4)) <= 1e-10);
        let rebuilt = a.reconstruct();
        prop_assert!(max_abs_diff(rebuilt.matrix(), h.matrix()) <= 1e-9 * (1.0 + max_abs(h.matrix())));
    }

    #[test]
    fn commuting_pairs_reduce_to_classical(seed in any::<u64>()) {
        let mut rng = Sampler::new(Seed::new(seed, 4));
        let p = rng.probability(4);
        let q = rng.probability(4);
        let rho = DensityMatrix::diagonal(p.as_slice()).unwrap();
        let sigma = DensityMatrix::diagonal(q.as_slice()).unwrap();
        for (a, z) in region_grid() {
            let quantum = alpha_z_divergence(&rho, &sigma, a, z).unwrap().value;
            let classical = renyi_classical(&p, &q, a).unwrap().value;
            prop_assert!((quantum - classical).abs() <= 1e-9, "a={} z={} {} {}", a, z, quantum, classical);
        }
    }

    #[test]
    // Below α ≈ 1/4 the power σ^{(1−α)/α} spans more than 15 decades and
    // neither evaluation route is accurate to 1e-10.
    fn special_case_identities(seed in any::<u64>(), a in 0.25f64..0.95) {
        let (rho, sigma) = full_rank_pair(seed, 3);
        let z1 = alpha_z_divergence(&rho, &sigma, a, 1.0).unwrap().value;
        let rre = renyi_relative_entropy(&rho, &sigma, a).unwrap().value;
        prop_assert!(rel_diff(z1, rre) <= 1e-10);

        for alpha in [a, 1.0 + 2.0 * a] {
            let za = alpha_z_divergence(&rho, &sigma, alpha, alpha).unwrap().value;
            let sw = sandwiched_divergence(&rho, &sigma, alpha).unwrap().value;
            prop_assert!(rel_diff(za, sw) <= 1e-10);
        }

        let forward = alpha_z_divergence(&rho, &sigma, a, 1.0 - a).unwrap().value;
        let reverse = sandwiched_divergence(&sigma, &rho, 1.0 - a).unwrap().value;
        prop_assert!(rel_diff(forward, a / (1.0 - a) * reverse) <= 1e-10);
    }

    #[test]
    fn half_order_sandwiched_is_minus_log_fidelity(seed in any::<u64>()) {
        let mut rng = Sampler::new(Seed::new(seed, 5));
        let (r1, r2) = (rng.int(1, 2), rng.int(1, 2));
        let rho = rng.hs_density(2, r1).unwrap();
        let sigma = rng.hs_density(2, r2).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        prop_assume!(f > 1e-8);
        let d = sandwiched_divergence(&rho, &sigma, 0.5).unwrap().value;
        prop_assert!((d + f.log2()).abs() <= 1e-9);
    }

    #[test]
    fn overlap_orderings_agree(seed in any::<u64>()) {
        let (rho, sigma) = full_rank_pair(seed, 3);
        let (a, z) = sample_region_point(&mut Sampler::new(Seed::new(seed, 9)));
        let f1 = alpha_z_overlap(&rho, &sigma, a, z).unwrap();
        let f2 = alpha_z_overlap_sigma_outside(&rho, &sigma, a, z).unwrap();
        prop_assert!(rel_diff(f1, f2) <= 1e-9);
    }

    #[test]
    fn overlap_with_itself_is_one(seed in any::<u64>(), idx in 0usize..1000) {
        let mut rng = Sampler::new(Seed::new(seed, 6));
        let rank = rng.int(1, 3);
        let rho = rng.hs_density(3, rank).unwrap();
        let grid = region_grid();
        let (a, z) = grid[idx % grid.len()];
        prop_assert!((alpha_z_overlap(&rho, &rho, a, z).unwrap() - 1.0).abs() <= 1e-9);
        prop_assert!(alpha_z_divergence(&rho, &rho, a, z).unwrap().value.abs() <= 1e-9);
    }

    #[test]
    fn alternate_distance_flag_condition(seed in any::<u64>(), idx in 0usize..1000) {
        let mut rng = Sampler::new(Seed::new(seed, 7));
        let k = rng.int(2, 3);
        let p = rng.probability(k);
        let sig: Vec<_> = (0..k).map(|_| rng.hs_density(2, 2).unwrap()).collect();
        let tau: Vec<_> = (0..k).map(|_| rng.hs_density(2, 2).unwrap()).collect();
        let grid = region_grid();
        let (a, z) = grid[idx % grid.len()];
        let whole = alternate_distance(&flagged(p.as_slice(), &sig), &flagged(p.as_slice(), &tau), a, z).unwrap();
        let parts: f64 = p
            .as_slice()
            .iter()
            .zip(sig.iter().zip(&tau))
            .map(|(pk, (s, t))| pk * alternate_distance(s, t, a, z).unwrap())
            .sum();
        prop_assert!(rel_diff(whole, parts) <= 1e-9, "{} {}", whole, parts);
        prop_assert!(whole >= -1e-12);
    }

    #[test]
    fn umegaki_matches_kl_on_diagonals(seed in any::<u64>()) {
        let mut rng = Sampler::new(Seed::new(seed, 8));
        let p = rng.probability(3);
        let q = rng.probability(3);
        let rho = DensityMatrix::diagonal(p.as_slice()).unwrap();
        let sigma = DensityMatrix::diagonal(q.as_slice()).unwrap();
        let u = umegaki_relative_entropy(&rho, &sigma).unwrap().value;
        prop_assert!((u - kl_divergence(&p, &q).unwrap().value).abs() <= 1e-10);
    }
}
