// Conjugating an involution of an interval to x -> -x.

use babbage::equation::Sampling;
use babbage::linearize::involution_conjugacy;
use babbage::map::MapSpec;
use babbage::sampling::Window;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = MapSpec::parse(&["x"], &["1 - x"])?;
    let opts = Sampling::default().with_window(Window::new(vec![[-4.0, 5.0]])?);
    let r = involution_conjugacy(&f, &opts)?;
    println!("phi(x) = {}", r.phi.components()[0]);
    println!("G(x)   = {}", r.target.components()[0]);
    println!(
        "residual {} ({:?}), verified {}",
        r.residual, r.mode, r.verified
    );
    for h in &r.hypotheses {
        println!(
            "  {}: {} ({})",
            h.check,
            h.value,
            if h.passed { "ok" } else { "fails" }
        );
    }
    assert!(r.verified);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
