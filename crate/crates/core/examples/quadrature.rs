// The fixed Gauss-Legendre rule behind the 𝔤 integral.

use babbage::quadrature::{gauss_legendre, integrate_unit};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (nodes, weights) = gauss_legendre(4);
    for (x, w) in nodes.iter().zip(&weights) {
        println!("node {x:+.15}  weight {w:.15}");
    }
    let v = integrate_unit::<std::convert::Infallible>(|t| Ok((3.0 * t).cos()))?;
    println!("∫₀¹ cos 3t dt = {v:.15} (exact {:.15})", 3f64.sin() / 3.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
