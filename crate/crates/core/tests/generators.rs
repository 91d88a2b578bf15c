use vqhull::{gen_circle, gen_disk, gen_kuzmin, HullConfig, HullEngine};

#[test]
fn disk_inner_half_radius_holds_a_quarter() {
    let n = 1_000_000;
    let set = gen_disk(n, 2024);
    let inside = set.iter().filter(|p| p.x * p.x + p.y * p.y <= 0.25).count() as f64;
    let sigma = (n as f64 * 0.25 * 0.75).sqrt();
    assert!((inside - 0.25 * n as f64).abs() <= 3.0 * sigma, "{inside}");
    assert!(set.iter().all(|p| p.x * p.x + p.y * p.y < 1.0 + 1e-15));
}

#[test]
fn circle_radii_are_one_within_four_ulps() {
    let set = gen_circle(100_000, 8);
    let u = f64::EPSILON / 2.0;
    let worst = set
        .iter()
        .map(|p| (p.x * p.x + p.y * p.y - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 4.0 * u, "{worst:e}");
}

#[test]
fn kuzmin_median_radius() {
    let n = 1_000_000;
    let mut r: Vec<f64> = gen_kuzmin(n, 5).iter().map(|p| p.x.hypot(p.y)).collect();
    r.sort_by(f64::total_cmp);
    let median = r[n / 2];
    // Density of the radius at sqrt(3) is sqrt(3)/8; four standard errors of the median.
    let se = 1.0 / (2.0 * (3f64.sqrt() / 8.0) * (n as f64).sqrt());
    assert!((median - 3f64.sqrt()).abs() < 4.0 * se, "{median}");
}

#[test]
fn kuzmin_recursion_collapses() {
    let n = 1_000_000;
    let set = gen_kuzmin(n, 1);
    let cfg = HullConfig {
        trace: true,
        ..HullConfig::default()
    };
    let run = HullEngine::new(cfg).unwrap().run(&set).unwrap();
    // Some partition over nearly all points keeps almost none of them.
    let collapse = run
        .trace
        .iter()
        .find(|c| c.size >= n * 9 / 10 && (c.s1 + c.s2) * 1000 <= c.size)
        .expect("a collapsing partition");
    assert!(collapse.depth <= 3, "{collapse:?}");
    assert!(run.polygon.len() < 100);
}
