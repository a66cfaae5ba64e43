// Finding the least pair with f^n = f^k, and what follows from it.

use babbage::builtin::builtin_map;
use babbage::equation::{
    check_pair, corollary_identities, detect_minimal_pair, idempotent_power, Sampling,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = builtin_map(&"builtin:exp_collapse".parse()?)?;
    let opts = Sampling::default().with_samples(1024);

    let report = detect_minimal_pair(&f, 4, &opts, None)?;
    println!(
        "exp_collapse: pair {:?}, label {:?}",
        report.pair, report.label
    );
    for r in &report.refuted {
        println!(
            "  f^{} != f^{}: deviation {:.3} at {:?}",
            r.n, r.k, r.deviation, r.witness
        );
    }
    assert_eq!(report.pair, Some((3, 2)));

    let (n, k) = report.pair.expect("pair found");
    for row in corollary_identities(&f, n, k, 2, &opts, None)? {
        println!(
            "  l1 = {}, l2 = {}: equal = {}",
            row.l1, row.l2, row.result.equal
        );
    }
    let h = idempotent_power(&f, n, k, &opts, None)?;
    println!("  h = f^{} idempotent: {}", h.exponent, h.verified());

    let hw = builtin_map(&"builtin:hw_simple?k=3".parse()?)?;
    let report = check_pair(&hw, 2, 1, &Sampling::default(), None)?;
    println!("hw_simple(3): {:?} in {:?} mode", report.label, report.mode);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
