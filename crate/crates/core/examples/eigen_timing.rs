//! Times both symmetric eigensolvers on circle Gram matrices of growing size.
//!
//! `cargo run --release -p mmds --example eigen_timing`

use mmds::eigen::*;
use nalgebra::DMatrix;
fn main() {
    for n in [128usize, 256, 500, 1000, 2048] {
        let m = DMatrix::from_fn(n, n, |i, j| {
            let d = (i as f64 - j as f64).abs();
            let d = d.min(n as f64 - d) * 2.0 * std::f64::consts::PI / n as f64;
            -0.5 * d * d
        });
        for method in [EigenMethod::Jacobi, EigenMethod::TridiagonalQl] {
            if method == EigenMethod::Jacobi && n > 1000 {
                continue;
            }
            let t = std::time::Instant::now();
            let s = symmetric_eigendecomposition_with(&m, method).unwrap();
            println!(
                "{n} {method:?} {:.2}s top {}",
                t.elapsed().as_secs_f64(),
                s.eigenvalues[0]
            );
        }
    }
}
