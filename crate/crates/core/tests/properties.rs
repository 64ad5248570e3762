//! Invariants of the numerical layers over randomized inputs.

use proptest::prelude::*;
use realpw::poly::{family_explicit, MultiIndex};
use realpw::prelude::*;
use realpw::reconstruct::dilated;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn coeff() -> impl Strategy<Value = f64> {
    prop_oneof![(-100.0..100.0f64), (-8i32..8).prop_map(|k| k as f64 * 0.5)]
}

fn poly_2d() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(((0u32..4, 0u32..4), coeff(), coeff()), 1..6).prop_map(|terms| {
        let mut p = MultiPoly::zero(2);
        for ((a, b), re, im) in terms {
            p = p.add(&MultiPoly::monomial(2, vec![a, b], c(re, im)));
        }
        p
    })
}

/// A homogeneous polynomial of the given degree in two variables.
fn homogeneous(k: u32) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((0..=k, coeff(), coeff()), 1..4).prop_map(move |terms| {
        let mut p = MultiPoly::zero(2);
        for (a, re, im) in terms {
            let alpha: MultiIndex = vec![a, k - a];
            p = p.add(&MultiPoly::monomial(2, alpha, c(re, im)));
        }
        p
    })
}

fn signal(m: usize, h: f64, values: Vec<(f64, f64)>) -> SampledFunction {
    let grid = make_grid(1, m, h).unwrap();
    SampledFunction::new(grid, Side::Spatial, values.into_iter().map(|(a, b)| c(a, b)).collect(), "random").unwrap()
}

fn random_signal(m: usize) -> impl Strategy<Value = SampledFunction> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), m).prop_map(move |v| signal(m, 0.3, v))
}

fn band_limited(lo: f64, hi: f64) -> SampledFunction {
    let grid = make_grid(1, 256, 2.0).unwrap();
    sample_builtin(&Builtin::spectral_bump(SupportSet::interval(lo, hi), 0.003), &grid).unwrap()
}

fn interval() -> impl Strategy<Value = (f64, f64)> {
    (-1.0..0.3f64, 0.1..0.9f64).prop_map(|(lo, w)| (lo, lo + w))
}

fn exponent() -> impl Strategy<Value = NormExponent> {
    prop_oneof![
        Just(NormExponent::ONE),
        Just(NormExponent::TWO),
        Just(NormExponent::INF),
        (1.0..6.0f64).prop_map(|q| NormExponent::new(q).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn display_parses_back(p in poly_2d()) {
        let text = p.to_string();
        prop_assert_eq!(parse_poly(&text, 2).unwrap(), p, "text {}", text);
    }

    #[test]
    fn symbol_scales_exactly_by_powers_of_two(k in 0u32..5, p in (0u32..5).prop_flat_map(homogeneous), j in -6i32..6, l in prop::array::uniform2(-3.0..3.0f64)) {
        let k = p.degree().unwrap_or(k);
        let s = 2f64.powi(j);
        let lhs = p.symbol(&[s * l[0], s * l[1]]);
        let rhs = p.symbol(&l) * s.powi(k as i32);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn symbol_scales_homogeneously(p in (0u32..5).prop_flat_map(homogeneous), s in 0.1..10.0f64, l in prop::array::uniform2(-3.0..3.0f64)) {
        let k = p.degree().unwrap_or(0) as i32;
        let lhs = p.symbol(&[s * l[0], s * l[1]]);
        let rhs = p.symbol(&l) * s.powi(k);
        let scale: f64 = p
            .terms()
            .iter()
            .map(|(a, cf)| cf.norm() * l[0].abs().powi(a[0] as i32) * l[1].abs().powi(a[1] as i32))
            .sum::<f64>()
            * s.powi(k);
        prop_assert!((lhs - rhs).norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn real_linear_symbols_are_imaginary(a in prop::array::uniform3(-5.0..5.0f64), l in prop::array::uniform3(-4.0..4.0f64)) {
        let mut p = MultiPoly::zero(3);
        for (j, aj) in a.iter().enumerate() {
            p = p.add(&MultiPoly::var(3, j + 1).unwrap().scale(c(*aj, 0.0)));
        }
        prop_assert_eq!(p.symbol(&l).re, 0.0);
    }

    #[test]
    fn quadratic_member_matches_its_expansion(center in prop::array::uniform2(-1.0..1.0f64), l in prop::array::uniform2(-2.0..2.0f64)) {
        let grid = make_grid(2, 64, 0.5).unwrap();
        let fam = family_quadratic(&[center.to_vec()], &grid).unwrap();
        let member = &fam.members()[0];
        let closed = member.symbol(&l);
        let expanded = member.to_poly().symbol(&l);
        let size = 1.0 + l.iter().chain(&center).map(|v| v * v).sum::<f64>();
        prop_assert!((closed - expanded).norm() <= 1e-13 * size);
    }

    #[test]
    fn dft_round_trip_and_parseval(f in random_signal(64)) {
        let big = forward_dft(&f).unwrap();
        let back = inverse_dft(&big).unwrap();
        for (u, v) in f.values().iter().zip(back.values()) {
            prop_assert!((u - v).norm() < 1e-13);
        }
        let spatial: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * f.grid().step();
        let spectral: f64 = big.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * f.grid().freq_step();
        prop_assert!((spatial - spectral).abs() <= 1e-12 * spatial);
    }

    #[test]
    fn masks_shrink_as_eps_grows(f in random_signal(64), e1 in -12.0..-1.0f64, de in 0.0..3.0f64) {
        let big = forward_dft(&f).unwrap();
        let loose = support_mask(&big, 10f64.powf(e1)).unwrap();
        let tight = support_mask(&big, 10f64.powf((e1 + de).min(-0.01))).unwrap();
        prop_assert!(tight.is_subset_of(&loose));
    }

    #[test]
    fn r_grows_with_the_mask(cells in prop::collection::vec((any::<bool>(), any::<bool>()), 64), p in poly_2d()) {
        let grid = make_grid(2, 8, 0.7).unwrap();
        let small: Vec<bool> = cells.iter().map(|(a, b)| *a && *b).collect();
        let large: Vec<bool> = cells.iter().map(|(a, _)| *a).collect();
        let small = SupportMask::from_cells(grid, small, 1e-8).unwrap();
        let large = SupportMask::from_cells(grid, large, 1e-8).unwrap();
        prop_assert!(compute_r(&p, &small).unwrap().value <= compute_r(&p, &large).unwrap().value);
    }

    #[test]
    fn supporting_function_homogeneity_and_symmetry(
        pts in prop::collection::vec(prop::array::uniform2(-5.0..5.0f64), 1..20),
        y in prop::array::uniform2(-3.0..3.0f64),
        k in -4i32..4,
    ) {
        let points: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vec()).collect();
        let s = 2f64.powi(k);
        let h = supporting_function(&points, &y).unwrap();
        prop_assert_eq!(supporting_function(&points, &[s * y[0], s * y[1]]).unwrap(), s * h);
        let reflected: Vec<Vec<f64>> = points.iter().map(|p| vec![-p[0], -p[1]]).collect();
        prop_assert_eq!(supporting_function(&reflected, &[-y[0], -y[1]]).unwrap(), h);
    }

    #[test]
    fn norms_are_homogeneous(f in random_signal(32), p in exponent(), re in -4.0..4.0f64, im in -4.0..4.0f64) {
        let a = c(re, im);
        let lhs = lp_norm(&f.scaled(a), p).unwrap();
        let rhs = a.norm() * lp_norm(&f, p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300));
    }

    #[test]
    fn holder_inequality(f in random_signal(32), g in random_signal(32), q in 1.0..8.0f64) {
        let conj = q / (q - 1.0);
        let prod: Vec<(f64, f64)> = f.values().iter().zip(g.values()).map(|(u, v)| { let w = u * v; (w.re, w.im) }).collect();
        let fg = signal(32, 0.3, prod);
        let lhs = lp_norm(&fg, NormExponent::ONE).unwrap();
        let p_norm = lp_norm(&f, NormExponent::new(q).unwrap()).unwrap();
        let q_norm = if conj.is_finite() { lp_norm(&g, NormExponent::new(conj).unwrap()).unwrap() } else { lp_norm(&g, NormExponent::INF).unwrap() };
        prop_assert!(lhs <= p_norm * q_norm * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn growth_is_translation_invariant((lo, hi) in interval(), shift in -40i64..40, p in exponent()) {
        let f = band_limited(lo, hi);
        let x1 = parse_poly("x1", 1).unwrap();
        let a = growth_sequence(&f, &x1, p, 16).unwrap();
        let b = growth_sequence(&f.shifted(&[shift]).unwrap(), &x1, p, 16).unwrap();
        for (u, v) in a.log_norms.iter().zip(&b.log_norms) {
            prop_assert!((u - v).abs() <= 1e-9 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn operator_scaling_adds_n_log_c((lo, hi) in interval(), re in -3.0..3.0f64, im in 0.1..3.0f64) {
        let f = band_limited(lo, hi);
        let p = parse_poly("x1^2 + 0.25", 1).unwrap();
        let a = c(re, im);
        let base = growth_sequence(&f, &p, NormExponent::TWO, 16).unwrap();
        let scaled = growth_sequence(&f, &p.scale(a), NormExponent::TWO, 16).unwrap();
        for (n, (u, v)) in base.log_norms.iter().zip(&scaled.log_norms).enumerate() {
            let expect = u + (n + 1) as f64 * a.norm().ln();
            prop_assert!((v - expect).abs() <= 1e-9 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn modulation_shifts_the_mask((lo, hi) in interval(), k0 in -30i64..30) {
        let f = band_limited(lo, hi);
        let grid = *f.grid();
        let m = grid.points_per_axis() as f64;
        let modulated: Vec<Complex64> = (0..grid.len())
            .map(|j| {
                let k = grid.lattice_index(j)[0] as f64;
                f.values()[j] * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k * k0 as f64 / m)
            })
            .collect();
        let g = SampledFunction::new(grid, Side::Spatial, modulated, "modulated").unwrap();
        let a = support_mask(&forward_dft(&f).unwrap(), 1e-8).unwrap().shifted(&[k0]);
        let b = support_mask(&forward_dft(&g).unwrap(), 1e-8).unwrap();
        prop_assert_eq!(a.cells(), b.cells());
    }

    #[test]
    fn raster_maximum_is_r((lo, hi) in interval(), p in poly_2d()) {
        let grid = make_grid(2, 64, 2.0).unwrap();
        let f = sample_builtin(&Builtin::spectral_bump(SupportSet::cube(&[0.8 * lo, -0.3], &[0.8 * hi, 0.4]), 0.01), &grid).unwrap();
        let mask = support_mask(&forward_dft(&f).unwrap(), 1e-8).unwrap();
        let raster = local_spectrum_raster(&p, &mask).unwrap();
        prop_assert_eq!(raster.max_modulus.to_bits(), compute_r(&p, &mask).unwrap().value.to_bits());
    }
}

fn linear_pieces(dirs: &[f64]) -> Vec<MultiPoly> {
    dirs.iter().map(|a| parse_poly(&format!("{a}*x1"), 1).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn family_enlargement_and_order((lo, hi) in interval(), extra in -2.0..2.0f64, shift in 0.0..1.0f64) {
        let f = band_limited(lo, hi);
        let base = family_linear(&[vec![1.0], vec![-1.0]]).unwrap();
        let centered = family_explicit(vec![parse_poly(&format!("x1 + {}*i", shift), 1).unwrap()]).unwrap();
        let more = base.extended(&family_explicit(linear_pieces(&[extra])).unwrap()).unwrap().extended(&centered).unwrap();
        let a = reconstruct_support(&f, &base, NormExponent::TWO, 16, None).unwrap();
        let b = reconstruct_support(&f, &more, NormExponent::TWO, 16, None).unwrap();
        prop_assert!(b.mask.is_subset_of(&a.mask));
        let order: Vec<usize> = (0..more.len()).rev().collect();
        let c = reconstruct_support(&f, &more.permuted(&order).unwrap(), NormExponent::TWO, 16, None).unwrap();
        prop_assert_eq!(b.mask.cells(), c.mask.cells());
    }

    #[test]
    fn reconstruction_covers_the_reference((lo, hi) in interval(), p in prop_oneof![Just(NormExponent::ONE), Just(NormExponent::TWO), Just(NormExponent::INF)]) {
        let f = band_limited(lo, hi);
        let reference = support_mask(&forward_dft(&f).unwrap(), 1e-8).unwrap();
        let mid = 0.5 * (lo + hi);
        let centered = MultiPoly::var(1, 1).unwrap().add(&MultiPoly::constant(1, c(0.0, -mid)));
        let fam = family_explicit(vec![centered]).unwrap();
        let est = reconstruct_support(&f, &fam, p, 64, Some(&reference)).unwrap();
        prop_assert!(reference.is_subset_of(&dilated(&est.mask, 1.0)));
        prop_assert!(est.mask.is_subset_of(&dilated(&reference, 3.0)));
    }
}
