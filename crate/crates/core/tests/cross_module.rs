use tvlab_core::coset_lattice::{torsion_core, TorsionCoset, TorsionSubscheme};
use tvlab_core::cyclo_exact::{galois_act, GaloisElement, TorusPoint};
use tvlab_core::galois_poly::{frobenius_poly_torus, IntPolynomial};
use tvlab_core::scan::{scan_gap, ScanOptions, TorsionFilter};
use tvlab_core::torus_geom::{distance_auto, DistanceValue, Subvariety};

#[test]
fn scan_witness_reproduces_its_distance() {
    let x = Subvariety::unit_line();
    let mut opts = ScanOptions::new(5, 20);
    opts.precision = 12;
    let r = scan_gap(&x, &opts).unwrap();
    let w = r.witness.clone().unwrap();
    assert_eq!(Some(distance_auto(&w, &x, 5, 12).unwrap()), r.min_non_member);
    for row in r.rows.iter().filter(|row| !row.distance.is_member()) {
        assert!(row.distance >= r.min_non_member.unwrap());
    }
}

#[test]
fn filtered_scans_cover_the_full_scan() {
    let x = Subvariety::unit_line();
    let scan = |filter| {
        let mut opts = ScanOptions::new(3, 18);
        opts.precision = 10;
        opts.filter = filter;
        scan_gap(&x, &opts).unwrap()
    };
    let all = scan(TorsionFilter::All);
    let parts = [TorsionFilter::Unramified, TorsionFilter::PPrimary, TorsionFilter::Mixed].map(scan);
    // The identity is counted by the unramified and p-primary scans.
    assert_eq!(parts.iter().map(|r| r.points).sum::<usize>() - 1, all.points);
    let best = parts.iter().filter_map(|r| r.min_non_member).min();
    assert_eq!(best, all.min_non_member);
}

#[test]
fn frobenius_fixes_unramified_distances() {
    // Frobenius permutes prime-to-p torsion and preserves rational subvarieties.
    let x = Subvariety::unit_line();
    let p = 7;
    for s in ["1/3,1/4", "2/5,1/10", "1/8,3/8"] {
        let pt = TorusPoint::parse(s).unwrap();
        let tau = GaloisElement::tau(p, pt.order()).unwrap();
        let moved = galois_act(&tau, &pt).unwrap();
        assert_eq!(distance_auto(&moved, &x, p, 12).unwrap(), distance_auto(&pt, &x, p, 12).unwrap());
    }
}

#[test]
fn torus_frobenius_core_of_roots_of_unity() {
    // For F = T − q the core of μ_m is the part of μ_m on which [q] is bijective.
    let (_, f) = frobenius_poly_torus(5).unwrap();
    let mu = |m| TorsionSubscheme::new(1, vec![TorsionCoset::roots_of_unity(m)]).unwrap();
    assert_eq!(torsion_core(&mu(12), &f).unwrap().core, mu(12));
    assert_eq!(torsion_core(&mu(10), &f).unwrap().core, mu(2));
    let circle = Subvariety::point(&TorusPoint::parse("1/2").unwrap());
    assert_eq!(distance_auto(&TorusPoint::parse("1/2").unwrap(), &circle, 5, 8).unwrap(), DistanceValue::Member);
    assert!(IntPolynomial::parse("-5,1").unwrap() == f);
}
