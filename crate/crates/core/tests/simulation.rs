use hetmarket::analytic::{
    accept_any_of_k, alpha_min, kopt_sequential, kopt_uninformed, matching_means, multi_variant_b,
    sequential_sales, Form,
};
use hetmarket::correlation::{Coupling, Scheme, Sign};
use hetmarket::simulate::{
    sim_correlated, sim_duopoly, sim_informed_max, sim_matching, sim_multi_variant,
    sim_sequential, sim_uninformed, with_threads, Stopping,
};
use hetmarket::{AcceptanceFunction, MarketParams};

fn headline(z: f64) -> MarketParams {
    MarketParams::new(500, 2000, 0.05, z).unwrap()
}

fn linear() -> AcceptanceFunction {
    AcceptanceFunction::linear(0.05).unwrap()
}

#[test]
fn single_offer_sells_mp() {
    let params = MarketParams::new(2000, 100, 0.002, 0.0).unwrap();
    let s = sim_uninformed(&params, AcceptanceFunction::linear(0.002).unwrap(), 1, 2000, 11).unwrap();
    assert!(s.scalar("total_sold").unwrap().z_score(4.0) < 4.0);
}

#[test]
fn uninformed_scan_finds_the_optimum() {
    let params = headline(5.0);
    let s = sim_uninformed(&params, linear(), 80, 1000, 12).unwrap();
    let (k, _) = s.series_argmax("profit").unwrap();
    let k_opt = kopt_uninformed(&params).k_opt;
    assert!((k as f64 - k_opt).abs() <= 2.0, "{k} vs {k_opt}");
    for (k, est) in s.series("sold").unwrap().iter().enumerate().step_by(10) {
        assert!(est.z_score(500.0 * accept_any_of_k(0.05, k, Form::Exact)) < 4.0, "k={k}");
        assert!(est.mean <= 500.0);
    }
}

#[test]
fn simultaneous_sales_split_evenly() {
    let k = 20;
    let s = sim_uninformed(&headline(5.0), linear(), k, 1000, 13).unwrap();
    let per_variant = 500.0 * accept_any_of_k(0.05, k, Form::Exact) / k as f64;
    for (alpha, est) in s.series("variant_sales").unwrap().iter().enumerate() {
        assert!(est.z_score(per_variant) < 4.0, "variant {alpha}: {est:?} vs {per_variant}");
    }
    assert!(s.scalar("sale_per_variant").unwrap().z_score(per_variant) < 4.0);
}

#[test]
fn sequential_sales_decay_geometrically() {
    let s = sim_sequential(&headline(5.0), linear(), Stopping::Fixed(30), 1000, 14).unwrap();
    for (i, est) in s.series("sales").unwrap().iter().enumerate() {
        assert!(est.z_score(sequential_sales(500.0, 0.05, i + 1)) < 4.0, "alpha {}", i + 1);
    }
    let simultaneous = sim_uninformed(&headline(5.0), linear(), 30, 1000, 15).unwrap();
    let a = s.scalar("total_sold").unwrap();
    let b = simultaneous.scalar("total_sold").unwrap();
    let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    assert!((a.mean - b.mean).abs() < 4.0 * se);
}

#[test]
fn greedy_stop_approaches_continuous_optimum() {
    let gap = |m: usize| {
        let params = MarketParams::new(m, 2000, 0.05, 0.01 * m as f64).unwrap();
        let s = sim_sequential(&params, linear(), Stopping::Greedy, 400, 16).unwrap();
        s.scalar("stop_k").unwrap().mean - kopt_sequential(m as f64, 0.05, 0.01 * m as f64)
    };
    let (small, large) = (gap(1_000), gap(100_000));
    assert!(small.abs() > large.abs(), "{small} {large}");
    assert!(large.abs() <= 2.0);
}

#[test]
fn duopoly_without_rival_is_monopoly() {
    let params = headline(5.0);
    let duo = sim_duopoly(&params, linear(), 5.0, f64::INFINITY, 25, 0, 200, 17).unwrap();
    let mono = sim_uninformed(&params, linear(), 25, 200, 17).unwrap();
    // Same draws; the two code paths only sum in a different order.
    let (a, b) = (duo.scalar("profit1").unwrap(), mono.scalar("profit").unwrap());
    assert!((a.mean - b.mean).abs() < 1e-9 && (a.std_error - b.std_error).abs() < 1e-9);
    assert_eq!(duo.scalar("profit2").unwrap().mean, 0.0);
}

#[test]
fn duopoly_shares_follow_offer_counts() {
    let s = sim_duopoly(&headline(5.0), linear(), 5.0, 5.0, 10, 30, 1000, 18).unwrap();
    assert!(s.scalar("share1").unwrap().z_score(0.25) < 4.0);
}

#[test]
fn informed_single_variant_is_binomial() {
    let params = MarketParams::new(500, 1, 0.05, 5.0).unwrap();
    let s = sim_informed_max(&params, linear(), 4000, 19).unwrap();
    assert!(s.scalar("max_sale").unwrap().z_score(25.0) < 4.0);
    assert_eq!(s.histogram("max_sale").unwrap().iter().sum::<u64>(), 4000);
}

#[test]
fn correlated_market_without_binding_is_uncorrelated() {
    let params = headline(5.0);
    let step = AcceptanceFunction::step(0.05).unwrap();
    let plain = sim_uninformed(&params, step, 40, 1000, 20).unwrap();
    for scheme in [Scheme::Graded, Scheme::Gaussian] {
        let corr = sim_correlated(&params, scheme, Coupling::uncorrelated(), 40, 1000, 21).unwrap();
        for k in [1, 10, 40] {
            let a = corr.series("sold").unwrap()[k];
            let b = plain.series("sold").unwrap()[k];
            let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
            assert!((a.mean - b.mean).abs() < 4.0 * se, "{scheme:?} k={k}");
        }
    }
}

#[test]
fn perfect_binding_sells_one_variant_to_everyone() {
    let params = headline(5.0);
    let full = Coupling::new(1.0, Sign::Positive).unwrap();
    let s = sim_correlated(&params, Scheme::Graded, full, 20, 50, 22).unwrap();
    assert_eq!(s.series_argmax("profit").unwrap().0, 1);
    assert_eq!(s.series("sold").unwrap()[1].mean, 500.0);
    assert_eq!(s.series("sold").unwrap()[1].std_error, 0.0);
}

#[test]
fn anticorrelated_market_sells_nothing_cheap() {
    let params = headline(5.0);
    let neg = Coupling::new(0.1, Sign::Negative).unwrap();
    let s = sim_correlated(&params, Scheme::Graded, neg, 2000, 20, 23).unwrap();
    let first = alpha_min(2000, 0.05, 0.1);
    let sales = s.series("variant_sales").unwrap();
    assert!(sales[..first - 1].iter().all(|e| e.mean == 0.0));
    assert!(sales[first - 1..].iter().any(|e| e.mean > 0.0));
}

#[test]
fn matching_limits() {
    let s = sim_matching(200, 1, 1, 20_000, 24).unwrap();
    assert!(s.scalar("b").unwrap().z_score(100.5) < 4.0);

    let s = sim_matching(1000, 5, 10, 2000, 25).unwrap();
    let rank = s.scalar("vendor_rank").unwrap();
    assert!((rank.mean / 5.5 - 1.0).abs() < 0.05, "{rank:?}");
    let means = matching_means(1000, 5, 10);
    assert!((s.scalar("b").unwrap().mean / means.mean_b - 1.0).abs() < 0.1);
}

#[test]
fn multi_variant_matches_exact_mean() {
    let s = sim_multi_variant(2, 1, 10, 4000, 26).unwrap();
    assert!(s.scalar("b").unwrap().z_score(1.5) < 4.0);
    let exact = multi_variant_b(100, 9).unwrap().mean_exact;
    let s = sim_multi_variant(100, 9, 20, 2000, 27).unwrap();
    assert!(s.scalar("b").unwrap().z_score(exact) < 4.0);
}

#[test]
fn summaries_do_not_depend_on_thread_count() {
    let params = headline(5.0);
    let neg = Coupling::new(0.3, Sign::Negative).unwrap();
    let run = || {
        vec![
            sim_uninformed(&params, linear(), 40, 64, 99).unwrap(),
            sim_sequential(&params, linear(), Stopping::Greedy, 64, 99).unwrap(),
            sim_duopoly(&params, linear(), 3.0, 7.0, 12, 9, 64, 99).unwrap(),
            sim_informed_max(&params, linear(), 64, 99).unwrap(),
            sim_correlated(&params, Scheme::Gaussian, neg, 30, 64, 99).unwrap(),
            sim_matching(300, 4, 7, 64, 99).unwrap(),
            sim_multi_variant(300, 7, 4, 64, 99).unwrap(),
        ]
    };
    let single = with_threads(1, run);
    let many = with_threads(8, run);
    assert_eq!(single, many);
    assert_ne!(single[0], sim_uninformed(&params, linear(), 40, 64, 100).unwrap());
}
