// Parsing, evaluation, differentiation and exact polynomial forms.

use babbage::expr::{grad_symbolic, poly_canonical, Expression};
use num_rational::BigRational;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let g = Expression::parse("x + y*x^2", &["x", "y"])?;
    println!("g = {g}");
    println!("g(2, 1) = {}", g.eval(&[2.0, 1.0])?);

    let half = BigRational::new(1.into(), 2.into());
    let exact = g.eval_exact(&[half.clone(), half])?;
    println!("g(1/2, 1/2) = {exact}");
    assert_eq!(exact, BigRational::new(5.into(), 8.into()));

    let partials = grad_symbolic(&g)?;
    println!("dg/dx = {}, dg/dy = {}", partials[0], partials[1]);

    // composition expands to a canonical polynomial
    let square = Expression::parse("x^2", &["x", "y"])?;
    let inner = [square.clone(), square];
    let composed = g.compose(&inner)?;
    let p = poly_canonical(&composed)?;
    println!("g(x^2, x^2) = {p}");
    assert_eq!(p.total_degree(), 6);

    let smooth = Expression::parse("piece(x <= 0 : 0 ; else : exp(-1/x))", &["x"])?;
    println!("bump(1) = {:.6}", smooth.eval(&[1.0])?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
