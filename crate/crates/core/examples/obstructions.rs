// Grid evidence against linearizability: preimage components, crossing
// branches, critical points and fixed sets.

use babbage::builtin::builtin_map;
use babbage::expr::Expression;
use babbage::map::MapSpec;
use babbage::obstruction::{
    fixed_point_sample, gradient_vanish_scan, local_branch_count, preimage_components, GridWindow,
    DEFAULT_MARK_TOL,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = MapSpec::parse(&["x", "y"], &["x + y*x^2", "0"])?;
    let grid = GridWindow::cube(2, -3.0, 3.0, 200)?;
    let r = preimage_components(&f, &[0.0, 0.0], &grid, DEFAULT_MARK_TOL)?;
    println!(
        "preimage of (0,0): {} components (stable {}) at {:?}",
        r.count, r.stable, r.representatives
    );

    let p1 = Expression::parse("x*(1 - y)", &["x", "y"])?;
    let crossing = local_branch_count(&p1, &[0.0, 1.0], 0.1, 64, 1e-9)?;
    let regular = local_branch_count(&p1, &[0.0, -2.0], 0.1, 64, 1e-9)?;
    println!("x(1-y) = 0: {crossing} branches at (0,1), {regular} at (0,-2)");

    let scan = gradient_vanish_scan(&p1, &GridWindow::cube(2, -5.0, 5.0, 100)?, 1e-6)?;
    let points: Vec<&Vec<f64>> = scan.cells.iter().map(|c| &c.refined).collect();
    println!(
        "grad x(1-y) vanishes in {} cluster(s): {points:?}",
        scan.clusters
    );

    let hw = builtin_map(&"builtin:hw_simple?k=2".parse()?)?;
    let fixed = fixed_point_sample(&hw, &GridWindow::cube(2, 0.0, 1.0, 100)?, DEFAULT_MARK_TOL)?;
    println!(
        "hw_simple(2) fixed set: {} component(s), {} cells",
        fixed.count, fixed.marked
    );

    let mut csv = Vec::new();
    fixed.write_csv(&mut csv)?;
    println!(
        "csv header: {}",
        String::from_utf8(csv)?.lines().next().unwrap_or_default()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
