use eitslm::analysis::{extract_order, lg_decompose, oam_spectrum, winding_number, WaistFit};
use eitslm::cell::ComplexField;
use eitslm::grid::GridSpec;
use eitslm::optics::{far_field, gaussian_source, lg_source};
use eitslm::patterns::fork_grating;
use num_complex::Complex64;
use proptest::prelude::*;

const LAMBDA: f64 = 780e-9;
const W: f64 = 120e-6;

fn grid() -> GridSpec {
    GridSpec::square(256, 4e-6).unwrap()
}

fn superposition(coeffs: &[(u32, i32, f64, f64)]) -> ComplexField {
    let mut acc = ComplexField::zeros(grid(), LAMBDA).unwrap();
    for &(p, l, re, im) in coeffs {
        let m = lg_source(grid(), p, l, W, LAMBDA).unwrap();
        acc.amplitude
            .scaled_add(Complex64::new(re, im), &m.amplitude);
    }
    let k = 1.0 / acc.power().sqrt();
    acc.scaled(Complex64::new(k, 0.0))
}

fn rotate_quarter(f: &ComplexField) -> ComplexField {
    // (x, y) -> (-y, x) around the grid centre; row and column 0 have no partner.
    let n = f.grid.nx;
    let mut out = ComplexField::zeros(f.grid, LAMBDA).unwrap();
    for iy in 1..n {
        for ix in 1..n {
            out.amplitude[[ix, n - iy]] = f.amplitude[[iy, ix]];
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn winding_ignores_global_constant_and_radius(
        l in -3i32..=3,
        mag in 1e-3f64..1e3,
        arg in 0.0f64..std::f64::consts::TAU,
        r in 0.3f64..1.5,
    ) {
        let f = lg_source(grid(), 0, l, W, LAMBDA).unwrap();
        let g = f.scaled(Complex64::from_polar(mag, arg));
        prop_assert_eq!(winding_number(&g, r * W).unwrap(), l);
    }

    #[test]
    fn oam_power_survives_rotation(
        a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, d in -1.0f64..1.0,
    ) {
        prop_assume!(a.abs() + b.abs() + c.abs() + d.abs() > 0.1);
        let f = superposition(&[(0, 0, a, b), (0, 2, c, 0.0), (1, -1, d, a)]);
        let s = oam_spectrum(&f, 4).unwrap();
        let sr = oam_spectrum(&rotate_quarter(&f), 4).unwrap();
        prop_assert!(s.total() <= 1.0 + 1e-9);
        for m in -4..=4 {
            prop_assert!((s.get(m) - sr.get(m)).abs() < 1e-3, "m={} {} {}", m, s.get(m), sr.get(m));
        }
    }

    #[test]
    fn lg_weights_sum_to_at_most_one(
        a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0,
        w_scale in 0.7f64..1.4,
    ) {
        prop_assume!(a.abs() + b.abs() + c.abs() > 0.1);
        let f = superposition(&[(0, 1, a, c), (2, 0, b, 0.0), (0, 4, c, b)]);
        let s = lg_decompose(&f, w_scale * W, 2, 2, WaistFit::Fixed).unwrap();
        prop_assert!(s.total() <= 1.0 + 1e-9, "{}", s.total());
        prop_assert!(s.weights.values().all(|x| *x >= 0.0));
    }
}

#[test]
fn conjugate_orders_wind_oppositely() {
    let g = GridSpec::square(512, 4e-6).unwrap();
    let period = 16.0 * g.dx;
    let probe = gaussian_source(g, 64.0 * g.dx, LAMBDA).unwrap();
    for l in [-2, -1, 1, 2] {
        let mask = fork_grating(g, l, period, 1.0).unwrap();
        let mut f = probe.clone();
        f.amplitude.zip_mut_with(&mask.intensity, |e, t| *e *= *t);
        let far = far_field(&f, 2).unwrap();
        let plus = extract_order(&far, period, 1).unwrap().winding().unwrap();
        let minus = extract_order(&far, period, -1).unwrap().winding().unwrap();
        assert_eq!(plus, -minus, "l={l}");
        assert_eq!(plus, l);
    }
}
