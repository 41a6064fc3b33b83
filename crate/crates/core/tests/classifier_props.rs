mod common;

use common::*;
use proptest::prelude::*;
use qenergy::classifier::{
    empirical_quality, projector_energy_report, region_energy, ClassSpec, EnergyClassifier,
    NormalizationMode,
};
use qenergy::datasets::{
    gen_example1, gen_example2, read_csv, write_csv, ClassLabel, LabeledDataset,
};
use qenergy::moments::{analytic_moments, direction_projector, estimate_moments, MomentSummary};
use qenergy::spectral::{sym_eig, Projector, SymMatrix};
use qenergy::{complement, snr};
use rand::Rng;

fn spec_from_k(prior: f64, k: SymMatrix<f64>) -> ClassSpec<f64> {
    let n = k.dim();
    ClassSpec::new(prior, analytic_moments(&vec![0.0; n], &k).unwrap())
}

fn random_instance(r: &mut impl Rng, n: usize) -> (ClassSpec<f64>, ClassSpec<f64>) {
    let p1 = r.random_range(0.05..0.95);
    let (r1, r2) = (r.random_range(1..=n + 1), r.random_range(1..=n + 1));
    let k1 = random_psd(r, n, r1);
    let k2 = random_psd(r, n, r2);
    (spec_from_k(p1, k1), spec_from_k(1.0 - p1, k2))
}

fn correct_energy(c1: &ClassSpec<f64>, c2: &ClassSpec<f64>, p1: &Projector<f64>) -> f64 {
    let p2 = complement(p1);
    projector_energy_report(
        [c1.prior, c2.prior],
        [p1, &p2],
        [&c1.moments.correlation, &c2.moments.correlation],
    )
    .unwrap()
    .enr_correct
}

#[test]
fn fitted_projectors_are_complete() {
    let mut r = rng(21);
    for trial in 0..200 {
        let n = 1 + trial % 8;
        let (c1, c2) = random_instance(&mut r, n);
        for mode in [
            NormalizationMode::Raw,
            NormalizationMode::TraceNorm,
            NormalizationMode::Centered,
        ] {
            let clf = EnergyClassifier::fit(&c1, &c2, mode).unwrap();
            assert!(clf.completeness_error() <= 1e-9);
            assert_eq!(
                clf.projector(ClassLabel::One).rank() + clf.projector(ClassLabel::Two).rank(),
                n
            );
        }
    }
}

#[test]
fn fitted_projector_beats_every_eigenvector_subset_and_random_projectors() {
    let mut r = rng(22);
    for trial in 0..40 {
        let n = 1 + trial % 5;
        let (c1, c2) = random_instance(&mut r, n);
        let clf = EnergyClassifier::fit(&c1, &c2, NormalizationMode::Raw).unwrap();
        let fitted = correct_energy(&c1, &c2, clf.projector(ClassLabel::One));

        let d = c1
            .moments
            .correlation
            .lin_comb(c1.prior, &c2.moments.correlation, -c2.prior)
            .unwrap();
        let eig = sym_eig(&d).unwrap();
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << n) {
            let basis: Vec<Vec<f64>> = (0..n)
                .filter(|k| mask & (1 << k) != 0)
                .map(|k| eig.vector(k))
                .collect();
            let p = Projector::from_basis(n, &basis).unwrap();
            best = best.max(correct_energy(&c1, &c2, &p));
        }
        assert!(fitted >= best - 1e-9, "trial {trial}: {fitted} < {best}");
        // Closed form of the maximum: p₂ tr K₂ + sum of positive eigenvalues.
        let closed = c2.prior * c2.moments.correlation.trace()
            + eig.values().iter().filter(|&&l| l > 0.0).sum::<f64>();
        assert!((fitted - closed).abs() <= 1e-9 * (1.0 + closed.abs()));
        for _ in 0..200 {
            let p = random_projector(&mut r, n);
            assert!(fitted >= correct_energy(&c1, &c2, &p) - 1e-9);
        }
    }
}

#[test]
fn conservation_for_arbitrary_pairs() {
    let mut r = rng(23);
    for trial in 0..200 {
        let n = 1 + trial % 8;
        let (c1, c2) = random_instance(&mut r, n);
        let p1 = random_projector(&mut r, n);
        let p2 = complement(&p1);
        let rep = projector_energy_report(
            [c1.prior, c2.prior],
            [&p1, &p2],
            [&c1.moments.correlation, &c2.moments.correlation],
        )
        .unwrap();
        assert!(rep.conservation_residual().abs() <= 1e-10);
    }
}

#[test]
fn orthogonal_means_recover_rank_one_projector() {
    let mut r = rng(24);
    for trial in 0..50 {
        let n = 2 + trial % 5;
        // orthogonal means from a random orthonormal pair
        let q = sym_eig(&random_symmetric(&mut r, n)).unwrap();
        let (s1, s2) = (r.random_range(0.5..3.0), r.random_range(0.5..3.0));
        let m1: Vec<f64> = q.vector(0).iter().map(|v| v * s1).collect();
        let m2: Vec<f64> = q.vector(1).iter().map(|v| v * s2).collect();
        let cov = random_psd(&mut r, n, n);
        let c1 = ClassSpec::new(0.5, analytic_moments(&m1, &cov).unwrap());
        let c2 = ClassSpec::new(0.5, analytic_moments(&m2, &cov).unwrap());
        let clf = EnergyClassifier::fit(&c1, &c2, NormalizationMode::Raw).unwrap();
        let target = direction_projector(&m1).unwrap();
        assert!(
            clf.projector(ClassLabel::One)
                .matrix()
                .max_abs_diff(&target)
                <= 1e-8
        );
        // The decision compares ⟨m₁,x⟩²/‖m₁‖² against ‖x‖² − that, i.e. class 1 iff
        // the m₁-component carries more than half the energy.
        let x = uniform_vec(&mut r, n, -2.0, 2.0);
        let along: f64 = x.iter().zip(&m1).map(|(a, b)| a * b).sum::<f64>().powi(2)
            / m1.iter().map(|v| v * v).sum::<f64>();
        let total: f64 = x.iter().map(|v| v * v).sum();
        let expected = if along > total - along {
            ClassLabel::One
        } else {
            ClassLabel::Two
        };
        if (2.0 * along - total).abs() > 1e-9 {
            assert_eq!(clf.decide(&x).unwrap(), expected);
        }
    }
}

fn example2_closed_form(n: usize, sigma2: f64, a2: f64) -> (f64, f64) {
    let nf = n as f64;
    let denom = 2.0 * nf * (nf * sigma2 + a2);
    ((nf - 1.0) * a2 / denom, -a2 / denom)
}

fn example2_specs(n: usize, sigma2: f64, a2: f64) -> (Vec<f64>, ClassSpec<f64>, ClassSpec<f64>) {
    let mut a = vec![0.0; n];
    a[0] = a2.sqrt();
    let noise = SymMatrix::identity(n).scale(sigma2);
    let c1 = ClassSpec::new(0.5, analytic_moments(&a, &noise).unwrap());
    let c2 = ClassSpec::new(0.5, analytic_moments(&vec![0.0; n], &noise).unwrap());
    (a, c1, c2)
}

#[test]
fn example2_spectrum_and_error_energy_on_a_grid() {
    for n in 1..=12 {
        for sigma2 in [0.1, 0.5, 1.0, 3.0] {
            for a2 in [0.25, 1.0, 4.0, 9.0] {
                let (a, c1, c2) = example2_specs(n, sigma2, a2);
                let clf = EnergyClassifier::fit(&c1, &c2, NormalizationMode::TraceNorm).unwrap();
                let (top, rest) = example2_closed_form(n, sigma2, a2);
                let s = clf.spectrum();
                assert!((s[0] - top).abs() <= 1e-10);
                for &l in &s[1..] {
                    assert!((l - rest).abs() <= 1e-10);
                }
                let rep = clf.energy_report(&c1, &c2).unwrap();
                let nf = n as f64;
                let snr = snr(&a, sigma2, n).unwrap();
                let expected = (1.0 - 1.0 / nf) / (2.0 * (1.0 + snr)) + 1.0 / (2.0 * nf);
                assert!((rep.enr_error - expected).abs() <= 1e-12);
                assert!(rep.conservation_residual().abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn trace_norm_rule_matches_closed_form_rule() {
    let mut r = rng(25);
    let (a, c1, c2) = example2_specs(4, 1.5, 3.0);
    let clf = EnergyClassifier::fit(&c1, &c2, NormalizationMode::TraceNorm).unwrap();
    let snr = snr(&a, 1.5, 4).unwrap();
    let a2: f64 = a.iter().map(|v| v * v).sum();
    for _ in 0..2000 {
        let x = uniform_vec(&mut r, 4, -3.0, 3.0);
        let xa: f64 = x.iter().zip(&a).map(|(p, q)| p * q).sum();
        let x2: f64 = x.iter().map(|v| v * v).sum();
        let lhs = xa * xa / (1.0 + snr);
        let rhs = x2 * a2 - xa * xa;
        if (lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()) {
            continue;
        }
        let expected = if lhs > rhs {
            ClassLabel::One
        } else {
            ClassLabel::Two
        };
        assert_eq!(clf.decide(&x).unwrap(), expected);
    }
}

#[test]
fn quality_functional_agrees_with_trace_formula() {
    let (a, c1, c2) = example2_specs(3, 1.0, 2.0);
    let clf = EnergyClassifier::fit(&c1, &c2, NormalizationMode::Raw).unwrap();
    let data = gen_example2(&a, 1.0, 50_000, 77).unwrap();
    let analytic = clf.energy_report(&c1, &c2).unwrap().enr_correct;
    let mc = clf.empirical_energy(&data).unwrap().enr_correct;
    let q = empirical_quality(&clf, &data, [0.5, 0.5]).unwrap();
    assert!((q - mc.value).abs() <= 1e-12 * q.abs());
    assert!(
        (q - analytic).abs() <= 4.0 * mc.std_error,
        "{q} vs {analytic} ± {}",
        mc.std_error
    );
}

#[test]
fn sandwich_bound_holds_on_generated_data() {
    for (n, sigma2, a2, seed) in [(2, 1.0, 4.0, 1), (5, 0.5, 2.0, 2), (8, 2.0, 9.0, 3)] {
        let (a, c1, c2) = example2_specs(n, sigma2, a2);
        for mode in [NormalizationMode::Raw, NormalizationMode::TraceNorm] {
            let clf = EnergyClassifier::fit(&c1, &c2, mode).unwrap();
            let rep = clf.energy_report(&c1, &c2).unwrap();
            let data = gen_example2(&a, sigma2, 20_000, seed).unwrap();
            let region = region_energy(&clf, &data).unwrap();
            let gap = rep.enr_correct - region.value;
            let slack = 3.0 * region.std_error;
            assert!(gap >= -slack, "{mode}: gap {gap}");
            assert!(
                gap <= rep.enr_error + slack,
                "{mode}: gap {gap} vs {}",
                rep.enr_error
            );
        }
    }
}

#[test]
fn centered_mode_fits_covariances() {
    // Same means, different covariance shapes: only the centered fit sees the difference.
    let m = vec![5.0, 5.0];
    let c1: ClassSpec<f64> = ClassSpec::new(
        0.5,
        analytic_moments(&m, &SymMatrix::from_diag(&[4.0, 0.25])).unwrap(),
    );
    let c2 = ClassSpec::new(
        0.5,
        analytic_moments(&m, &SymMatrix::from_diag(&[0.25, 4.0])).unwrap(),
    );
    let clf = EnergyClassifier::fit(&c1, &c2, NormalizationMode::Centered).unwrap();
    assert!(
        clf.projector(ClassLabel::One)
            .matrix()
            .max_abs_diff(&SymMatrix::from_diag(&[1.0, 0.0]))
            < 1e-12
    );
    assert_eq!(clf.decide(&[7.0, 5.5]).unwrap(), ClassLabel::One);
    assert_eq!(clf.decide(&[5.5, 7.0]).unwrap(), ClassLabel::Two);
    let rep = clf.energy_report(&c1, &c2).unwrap();
    assert!((rep.enr_correct - 4.0).abs() < 1e-12);
    assert!((rep.total - 4.25).abs() < 1e-12);
}

#[test]
fn unit_norm_pipeline() {
    let data = gen_example2(&[3.0, 0.0, 0.0], 1.0, 5_000, 9).unwrap();
    let unit = data.unit_normalized().unwrap();
    let moments = |label| estimate_moments(&unit.samples(label)).unwrap();
    let (m1, m2): (MomentSummary<f64>, MomentSummary<f64>) =
        (moments(ClassLabel::One), moments(ClassLabel::Two));
    assert!((m1.correlation.trace() - 1.0).abs() <= 1e-12);
    let c1 = ClassSpec::new(0.5, m1);
    let c2 = ClassSpec::new(0.5, m2);
    let clf = EnergyClassifier::fit(&c1, &c2, NormalizationMode::UnitNorm).unwrap();
    let rep = clf.energy_report(&c1, &c2).unwrap();
    assert!((rep.total - 1.0).abs() <= 1e-12);
    // decisions ignore the scale of the pattern entirely
    for (_, x) in data.rows().iter().take(200) {
        let scaled: Vec<f64> = x.iter().map(|v| v * 123.0).collect();
        assert_eq!(clf.decide(x).unwrap(), clf.decide(&scaled).unwrap());
    }
    let g = clf.discriminants(&[0.0, 5.0, 0.0]).unwrap();
    assert!(g[0] <= 1.0 && g[1] <= 1.0);
}

#[test]
fn csv_round_trip_preserves_every_decision() {
    let data = gen_example2(&[1.5, -0.5, 0.25], 0.8, 400, 31).unwrap();
    let mut buf = Vec::new();
    write_csv(&data, &mut buf).unwrap();
    let back: LabeledDataset<f64> = read_csv(buf.as_slice()).unwrap();
    for mode in NormalizationMode::ALL {
        let prepared = if mode == NormalizationMode::UnitNorm {
            data.unit_normalized().unwrap()
        } else {
            data.clone()
        };
        let specs: Vec<ClassSpec<f64>> = ClassLabel::BOTH
            .iter()
            .map(|&l| ClassSpec::new(0.5, estimate_moments(&prepared.samples(l)).unwrap()))
            .collect();
        let clf = EnergyClassifier::fit(&specs[0], &specs[1], mode).unwrap();
        for ((_, x), (_, y)) in data.rows().iter().zip(back.rows()) {
            assert_eq!(clf.decide(x).unwrap(), clf.decide(y).unwrap());
        }
    }
}

#[test]
fn example1_generator_feeds_the_classifier() {
    let data: LabeledDataset<f64> = gen_example1(
        &[2.0, 0.0, 0.0],
        &[0.0, 0.0, 1.5],
        &SymMatrix::zeros(3),
        10,
        0,
    )
    .unwrap();
    let spec = |l| ClassSpec::new(0.5, estimate_moments(&data.samples(l)).unwrap());
    let clf = EnergyClassifier::fit(
        &spec(ClassLabel::One),
        &spec(ClassLabel::Two),
        NormalizationMode::Raw,
    )
    .unwrap();
    let est = region_energy(&clf, &data).unwrap();
    // point masses: every sample decided correctly with full energy
    assert!((est.value - (0.5 * 4.0 + 0.5 * 2.25)).abs() < 1e-12);
}

#[test]
fn single_precision_classifier() {
    let i2 = SymMatrix::<f32>::identity(2);
    let c1 = ClassSpec::new(0.5_f32, analytic_moments(&[2.0_f32, 0.0], &i2).unwrap());
    let c2 = ClassSpec::new(0.5_f32, analytic_moments(&[0.0_f32, 1.0], &i2).unwrap());
    let clf = EnergyClassifier::fit(&c1, &c2, NormalizationMode::Raw).unwrap();
    assert_eq!(clf.projector(ClassLabel::One).rank(), 1);
    assert_eq!(clf.decide(&[2.0, 1.0]).unwrap(), ClassLabel::One);
    let rep = clf.energy_report(&c1, &c2).unwrap();
    assert!((rep.enr_correct - 3.5).abs() < 1e-5);
}

proptest! {
    #[test]
    fn trace_norm_decisions_are_scale_invariant(
        seed in any::<u64>(),
        n in 1usize..6,
        scale in 1e-3..1e3_f64,
    ) {
        let mut r = rng(seed);
        let (c1, c2) = random_instance(&mut r, n);
        let clf = EnergyClassifier::fit(&c1, &c2, NormalizationMode::TraceNorm).unwrap();
        let x = uniform_vec(&mut r, n, -2.0, 2.0);
        let [g1, g2] = clf.discriminants(&x).unwrap();
        prop_assume!((g1 - g2).abs() > 1e-9 * (g1.abs() + g2.abs()));
        let scaled: Vec<f64> = x.iter().map(|v| v * scale).collect();
        prop_assert_eq!(clf.decide(&x).unwrap(), clf.decide(&scaled).unwrap());
    }

    #[test]
    fn energy_report_rows_match_per_class_energy(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let (c1, c2) = random_instance(&mut r, n);
        let clf = EnergyClassifier::fit(&c1, &c2, NormalizationMode::Raw).unwrap();
        let rep = clf.energy_report(&c1, &c2).unwrap();
        for (j, c) in [&c1, &c2].iter().enumerate() {
            let row = rep.r[j][0] + rep.r[j][1];
            let full = c.prior * c.moments.correlation.trace();
            prop_assert!((row - full).abs() <= 1e-10 * (1.0 + full));
        }
        // the fitted pair never does worse than either trivial split
        let lower = c1.prior * c1.moments.correlation.trace();
        let upper = c2.prior * c2.moments.correlation.trace();
        prop_assert!(rep.enr_correct >= lower.max(upper) - 1e-9);
    }
}
