use ranklq::calib::mc_moments;
use ranklq::exact::{parse_ratio, to_f64};
use ranklq::moments::{
    bruteforce_moment, kendall_moment, pearson_gaussian_moment, spearman_moment_mobius, spearman_moment_partition,
};
use ranklq::patternenum::{omega_monte_carlo, printed_omega, taustar_l4_exact, OmegaKey};
use ranklq::CoefficientKind;

#[test]
fn spearman_routes_agree() {
    for n in 3..=12 {
        for r in 1..=6 {
            assert_eq!(
                spearman_moment_partition(r, n).unwrap(),
                spearman_moment_mobius(r, n).unwrap(),
                "r = {r}, n = {n}"
            );
        }
    }
}

#[test]
fn odd_moments_vanish_for_symmetric_laws() {
    for n in 4..=9 {
        for r in [1, 3, 5] {
            assert_eq!(to_f64(&spearman_moment_partition(r, n).unwrap()), 0.0);
            assert_eq!(to_f64(&kendall_moment(r, n).unwrap()), 0.0);
        }
    }
}

#[test]
fn kendall_small_n_by_hand() {
    // n = 3: tau takes 1, 1/3, 1/3, -1/3, -1/3, -1, so E tau^2 = 11/27
    assert_eq!(kendall_moment(2, 3).unwrap(), parse_ratio("11/27").unwrap());
    assert_eq!(bruteforce_moment(CoefficientKind::Kendall, 2, 3).unwrap(), parse_ratio("11/27").unwrap());
}

#[test]
fn pearson_second_moment() {
    // E r^2 = 1/(n-1) under independent Gaussian pairs
    for n in 3..20 {
        assert_eq!(pearson_gaussian_moment(2, n), parse_ratio(&format!("1/{}", n - 1)).unwrap());
    }
}

#[test]
fn bkr_large_overlaps_by_sampling() {
    // printed constants for b = 9..12, 10^7 (pi, cover) samples each
    for b in 9..=12 {
        let key = OmegaKey::new(CoefficientKind::BkrR, 2, b).unwrap();
        let want = to_f64(&printed_omega(key).unwrap());
        let est = omega_monte_carlo(key, 10_000_000, 101 + b as u64).unwrap();
        assert!((est.mean - want).abs() < 3.0 * est.std_error, "b = {b}: {est:?} vs {want}");
    }
}

#[test]
fn taustar_monte_carlo_fourth_moment() {
    let (mu, _) = taustar_l4_exact(8).unwrap();
    let m = mc_moments(CoefficientKind::TauStar, 8, 1_000_000, 5).unwrap();
    let mean = m.get(4).unwrap();
    let se = ((m.get(8).unwrap() - mean * mean) / 1e6).sqrt();
    assert!((mean - to_f64(&mu)).abs() < 4.0 * se, "{mean} vs {}", to_f64(&mu));
}
