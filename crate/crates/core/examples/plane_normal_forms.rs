// Plane maps (g, 0): the ±x + y·𝔤 normal form, the projection conjugacy,
// and the strip-to-plane map.

use babbage::expr::Expression;
use babbage::linearize::{
    cube_sampling, extract_gfrak, projection_conjugacy, strip_to_plane, LinearizeError,
};
use babbage::map::MapSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let opts = cube_sampling(2, -3.0, 3.0, 1024);
    for g in ["x + y*x^2", "x + y^3", "-x + x*y"] {
        let f = MapSpec::parse(&["x", "y"], &[g, "0"])?;
        let nf = extract_gfrak(&f, &opts)?;
        println!(
            "{g:<10} sign {:+}  gfrak = {}  residual {:.1e}",
            nf.sign.unwrap_or(0),
            nf.gfrak_exact
                .as_ref()
                .map(ToString::to_string)
                .unwrap_or_default(),
            nf.residual.unwrap_or(f64::NAN)
        );
    }

    let f = MapSpec::parse(&["x", "y"], &["x*(1 + y^2)", "0"])?;
    let r = projection_conjugacy(&f, &opts)?;
    println!(
        "projection conjugacy: residual {:.1e}, verified {}",
        r.residual, r.verified
    );

    let f = MapSpec::parse(&["x", "y"], &["x + y*x^2", "0"])?;
    match projection_conjugacy(&f, &opts) {
        Err(LinearizeError::Hypothesis { check, witness, .. }) => {
            println!("x + y*x^2: `{check}` fails at {witness:?}");
        }
        other => return Err(format!("expected a hypothesis failure, got {other:?}").into()),
    }

    let h = Expression::parse("1 + x^2", &["x"])?;
    let s = strip_to_plane(&h, [-3.0, 3.0], 400)?;
    println!(
        "strip map psi = ({}, {}), verified {}",
        s.psi.components()[0],
        s.psi.components()[1],
        s.verified
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
