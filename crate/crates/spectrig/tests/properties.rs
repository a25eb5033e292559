//! Randomized property suites, 100+ cases each: the algebraic identities
//! and theorem-level invariants that must hold on *arbitrary* inputs, not
//! just the curated fixtures.

mod common;

use common::{convex_sample, random_framework, reflection_family, rng_from};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use spectrig::certify::{farkas_dichotomy, subspace_check, Verdict};
use spectrig::fixtures;
use spectrig::framework::{build_v, op_k, op_kv, op_t, op_tv};
use spectrig::numerics::{self, ToleranceConfig};
use spectrig::spectra::build_spectrahedron;
use spectrig::stress::{find_psd_stress, psd_stress_candidates, verify_stress, StressMatrix};
use spectrig::Framework;

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

/// Fixtures that carry a PSD stress, with the stress attached.
fn stressed_fixtures() -> Vec<(Framework, StressMatrix)> {
    [
        fixtures::fold5(),
        fixtures::rigid5(),
        fixtures::rigid5_minus_edge(),
        fixtures::line4(),
    ]
    .into_iter()
    .map(|fw| {
        let stress = find_psd_stress(&fw, &cfg(), 7)
            .unwrap()
            .found()
            .cloned()
            .expect("fixture carries a PSD stress");
        (fw, stress)
    })
    .collect()
}

fn hollow_symmetric(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            d[(i, j)] = entries[k];
            d[(j, i)] = entries[k];
            k += 1;
        }
    }
    d
}

fn symmetric(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            x[(i, j)] = entries[k];
            x[(j, i)] = entries[k];
            k += 1;
        }
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// The Gower operators invert each other on their natural domains:
    /// `K(T(D)) = D` for hollow symmetric `D`, `T(K(B)) = B` for centered
    /// symmetric `B`.
    #[test]
    fn gower_inverse_identities(
        n in 3usize..8,
        entries in prop::collection::vec(-10.0f64..10.0, 36),
    ) {
        let d = hollow_symmetric(n, &entries);
        let back = op_k(&op_t(&d));
        prop_assert!((&back - &d).amax() <= 1e-8 * d.amax().max(1.0));

        // A centered matrix: conjugate anything symmetric by V.
        let v = build_v(n).unwrap();
        let x = symmetric(n - 1, &entries);
        let b = &v * x * v.transpose();
        let back = op_t(&op_k(&b));
        prop_assert!((&back - &b).amax() <= 1e-8 * b.amax().max(1.0));
    }

    /// Same identities after projecting out translations: `T_V(K_V(X)) = X`
    /// for symmetric `X`, `K_V(T_V(D)) = D` for hollow symmetric `D`.
    #[test]
    fn projected_gower_inverse_identities(
        n in 3usize..8,
        entries in prop::collection::vec(-10.0f64..10.0, 36),
    ) {
        let x = symmetric(n - 1, &entries);
        let back = op_tv(&op_kv(&x).unwrap()).unwrap();
        prop_assert!((&back - &x).amax() <= 1e-8 * x.amax().max(1.0));

        let d = hollow_symmetric(n, &entries);
        let back = op_kv(&op_tv(&d).unwrap()).unwrap();
        prop_assert!((&back - &d).amax() <= 1e-8 * d.amax().max(1.0));
    }

    /// The spectrahedron's basis matrices `M^ij` are linearly independent,
    /// and `K_V` maps each back to the unit offset matrix `E^ij` of its
    /// missing pair.
    #[test]
    fn basis_matrices_independent_and_mapped_to_unit_offsets(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let fw = random_framework(&mut rng);
        let spec = build_spectrahedron(&fw).unwrap();
        let n = fw.n();
        let mbar = spec.m_bar();

        let mut stacked = DMatrix::zeros((n - 1) * (n - 1), mbar);
        for (k, &(i, j)) in spec.missing_edges().iter().enumerate() {
            let m = spec.m_matrix(k);
            stacked.column_mut(k).copy_from_slice(m.as_slice());

            let mut e = DMatrix::zeros(n, n);
            e[(i, j)] = 1.0;
            e[(j, i)] = 1.0;
            let mapped = op_kv(m).unwrap();
            prop_assert!(
                (&mapped - &e).amax() <= 1e-8,
                "K_V(M^{i}{j}) missed E^{i}{j} by {}",
                (&mapped - &e).amax()
            );
        }
        prop_assert_eq!(numerics::rank_rect(&stacked, &cfg()).unwrap(), mbar);
    }

    /// Every stress matrix the search returns — PSD or merely a candidate —
    /// satisfies the defining equations when re-verified independently.
    #[test]
    fn returned_stresses_reverify(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let fw = random_framework(&mut rng);
        for stress in psd_stress_candidates(&fw, &cfg(), seed, 4).unwrap() {
            let check = verify_stress(&fw, &stress.omega, &cfg());
            prop_assert!(check.ok, "{:?}", check.violation);
        }
        if let Some(stress) = find_psd_stress(&fw, &cfg(), seed).unwrap().found() {
            let check = verify_stress(&fw, &stress.omega, &cfg());
            prop_assert!(check.ok, "{:?}", check.violation);
            prop_assert!(stress.psd);
        }
    }

    /// Subspace theorem: every sampled member of the spectrahedron lies in
    /// `{y : Ω E(y) = 0}` for every PSD stress Ω. Samples are exact —
    /// closed-form reflection images and their convex combinations.
    #[test]
    fn sampled_members_stay_in_the_certified_subspace(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        for (fw, stress) in stressed_fixtures() {
            let family = reflection_family(&fw);
            let samples: Vec<DVector<f64>> =
                (0..6).map(|_| convex_sample(&family, &mut rng)).collect();
            let report = subspace_check(&fw, &stress, &samples, &cfg()).unwrap();
            prop_assert!(
                report.all_contained,
                "residuals {:?}",
                report.residuals
            );
        }
    }

    /// Null-space dimension equality: the systems `Ω E(y) = 0` and
    /// `Ω E(y) V = 0` have the same solution space dimension.
    #[test]
    fn nullspace_dimension_agrees_with_the_projected_system(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        for (fw, stress) in stressed_fixtures() {
            let family = reflection_family(&fw);
            let samples = vec![convex_sample(&family, &mut rng)];
            let report = subspace_check(&fw, &stress, &samples, &cfg()).unwrap();
            prop_assert!(
                report.dims_equal,
                "with V: {}, plain: {}",
                report.null_dim_with_v,
                report.null_dim_plain
            );
        }
    }

    /// Stress transfer: a PSD stress of the input is a stress of every
    /// equivalent framework reconstructed from the spectrahedron.
    #[test]
    fn stresses_transfer_to_reconstructed_equivalents(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        for (fw, stress) in stressed_fixtures() {
            let spec = build_spectrahedron(&fw).unwrap();
            let family = reflection_family(&fw);
            let y = convex_sample(&family, &mut rng);
            let rebuilt = spec.equivalent_framework(&fw, &y, &cfg()).unwrap();
            let check = verify_stress(&rebuilt, &stress.omega, &cfg());
            prop_assert!(check.ok, "{:?}", check.violation);
        }
    }

    /// The Farkas alternatives are mutually exclusive on arbitrary
    /// frameworks: never both certified, and `holding()` singles out the
    /// certified side when there is one.
    #[test]
    fn farkas_alternatives_are_exclusive(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let fw = random_framework(&mut rng);
        let farkas = farkas_dichotomy(&fw, &cfg(), seed).unwrap();
        let both = farkas.statement1.verdict == Verdict::Certified
            && farkas.statement2.verdict == Verdict::Certified;
        prop_assert!(!both, "both Farkas statements certified");
        if let Some(cert) = farkas.holding() {
            prop_assert_eq!(cert.verdict, Verdict::Certified);
        }
    }
}

/// The named fixtures also pass the exclusivity check, with the expected
/// side holding.
#[test]
fn farkas_fixtures_hold_the_expected_statement() {
    // rectangle4 has no PSD stress: statement 1 (a full-dimensional
    // equivalent framework) must hold. The stressed fixtures certify
    // statement 2.
    let farkas = farkas_dichotomy(&fixtures::rectangle4(), &cfg(), 7).unwrap();
    assert_eq!(farkas.statement1.verdict, Verdict::Certified);
    assert_ne!(farkas.statement2.verdict, Verdict::Certified);

    for (name, fw) in fixtures::all() {
        if name == "rectangle4" {
            continue;
        }
        let farkas = farkas_dichotomy(&fw, &cfg(), 7).unwrap();
        assert_eq!(
            farkas.statement2.verdict,
            Verdict::Certified,
            "{name} carries a PSD stress"
        );
        assert_ne!(farkas.statement1.verdict, Verdict::Certified, "{name}");
    }
}
