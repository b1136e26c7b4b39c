//! Inputs shared by the benchmarks.

use tvlab_core::coset_lattice::{TorsionCoset, TorsionSubscheme};
use tvlab_core::galois_poly::IntPolynomial;
use tvlab_core::scan::ScanOptions;
use tvlab_core::torus_geom::Subvariety;

/// `x + y = 1` scanned at `p = 7` up to order `bound`.
pub fn unit_line_scan(bound: u64) -> (Subvariety, ScanOptions) {
    let mut opts = ScanOptions::new(7, bound);
    opts.precision = 12;
    opts.max_p_level = Some(2);
    (Subvariety::unit_line(), opts)
}

/// `μ_3 ⊂ G_m` with the Fibonacci polynomial.
pub fn fibonacci_core_input() -> (TorsionSubscheme, IntPolynomial) {
    let mu3 = TorsionSubscheme::new(1, vec![TorsionCoset::roots_of_unity(3)]).expect("valid coset");
    (mu3, IntPolynomial::from_i64(&[-1, -1, 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let (x, opts) = unit_line_scan(10);
        assert_eq!(x.n, 2);
        assert_eq!(opts.p, 7);
        let (mu3, f) = fibonacci_core_input();
        assert!(!mu3.is_empty());
        assert_eq!(f.degree(), Some(2));
    }
}
