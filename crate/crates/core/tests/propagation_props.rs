use dualpol_core::propagation::march_z;
use dualpol_core::Complex64;
use proptest::prelude::*;

proptest! {
    #[test]
    fn zero_source_march_is_identity(re in -1e3f64..1e3, im in -1e3f64..1e3, n in 4usize..400, h in 1e-6f64..1e-2) {
        let e = Complex64::new(re, im);
        let out = march_z(e, &vec![Complex64::new(0.0, 0.0); n], h).unwrap();
        prop_assert!(out.iter().all(|x| *x == e));
    }

    #[test]
    fn march_is_linear_in_boundary_and_source(
        e1 in -10.0f64..10.0, e2 in -10.0f64..10.0, k in -3.0f64..3.0,
        s in proptest::collection::vec(-1e3f64..1e3, 8..64),
    ) {
        let h = 1e-4;
        let src: Vec<Complex64> = s.iter().map(|x| Complex64::new(*x, 0.5 * x)).collect();
        let scaled: Vec<Complex64> = src.iter().map(|x| x * k).collect();
        let a = march_z(Complex64::new(e1, 0.0), &src, h).unwrap();
        let b = march_z(Complex64::new(e2, 0.0), &scaled, h).unwrap();
        let sum: Vec<Complex64> = src.iter().zip(&scaled).map(|(x, y)| x + y).collect();
        let c = march_z(Complex64::new(e1 + e2, 0.0), &sum, h).unwrap();
        for i in 0..src.len() {
            prop_assert!((a[i] + b[i] - c[i]).norm() <= 1e-9 * (1.0 + c[i].norm()));
        }
    }
}
