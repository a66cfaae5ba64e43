// Nested image enclosures of an interval under a map of the line.

use babbage::builtin::builtin_map;
use babbage::interval::{image_chain, verify_1d_equation, Interval1};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = builtin_map(&"builtin:f_lambda_smooth?bits=1".parse()?)?;
    let chain = image_chain(&f, &Interval1::closed(-10.0, 10.0)?, 2, 4096)?;
    for (step, e) in chain.steps.iter().enumerate() {
        println!("f^{step}(I) = {}  (slack {:.1e})", e.interval, e.slack);
    }
    assert!(chain.last().approx_eq(&Interval1::point(0.0), 1e-6));

    for (text, n, k) in [
        ("builtin:f_lambda_cont?bits=101", 2, 1),
        ("builtin:f_lambda_smooth?bits=1", 3, 2),
    ] {
        let f = builtin_map(&text.parse()?)?;
        let window = f.window().expect("builtins carry a window").axes()[0];
        let i = Interval1::closed(window[0], window[1])?;
        let r = verify_1d_equation(&f, &i, n, k, 2048, 1e-9)?;
        println!(
            "{text}: f^{n} = f^{k} verified {} via {:?}, restriction {:?}",
            r.verified, r.reduction, r.restriction
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
