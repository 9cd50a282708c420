use fracp_core::*;

fn main() {
    let t0 = std::time::Instant::now();
    let dom = Domain::ball([0.0, 0.0], 1.0).unwrap();
    let prm = FracParams::new(0.5, 2.0, 2).unwrap();
    let quad = QuadConfig::default();
    match delta_s_boundedness_scan(&dom, 0.2, 16, &prm, &quad) {
        Ok(scan) => println!(
            "2D ball scan: {} samples, max {:.4}, median {:.4}, bounded: {} ({:?})",
            scan.samples.len(),
            scan.max_abs,
            scan.median_abs,
            scan.bounded_within(10.0),
            t0.elapsed()
        ),
        Err(e) => println!("2D scan error: {e}"),
    }
    let t1 = std::time::Instant::now();
    let rect = Domain::rectangle([-1.0, -0.6], [1.0, 0.6]).unwrap();
    match delta_s_boundedness_scan(&rect, 0.12, 16, &prm, &quad) {
        Ok(scan) => println!(
            "2D rect scan: {} samples, max {:.4}, median {:.4}, bounded: {} ({:?})",
            scan.samples.len(),
            scan.max_abs,
            scan.median_abs,
            scan.bounded_within(10.0),
            t1.elapsed()
        ),
        Err(e) => println!("2D rect scan error: {e}"),
    }
}
