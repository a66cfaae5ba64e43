// Linear and complex affine solutions of f^n = f^k.

use babbage::builtin::builtin_map;
use babbage::equation::{affine_complex_classify, linear_solution_check};
use num_complex::Complex64;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("builtin:rot_refl?angle=1/3", 4, 1),
        ("builtin:jordan?blocks=N2", 2, 1),
        ("builtin:jordan?blocks=N2", 3, 2),
        ("builtin:jordan?blocks=R1/4,-1,N3", 7, 3),
    ];
    for (text, n, k) in cases {
        let f = builtin_map(&text.parse()?)?;
        let r = linear_solution_check(&f, n, k)?;
        println!(
            "{text:<34} ({n},{k}): satisfies {:<5}  spectral {:<5}  nilpotent index {}",
            r.satisfies, r.spectral.holds, r.spectral.nilpotent_index
        );
        assert!(r.agree);
    }

    let i = Complex64::new(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    for (a, b, n, k) in [
        (i, zero, 5, 1),
        (Complex64::new(1.0, 0.0), i, 3, 1),
        (zero, i, 2, 1),
    ] {
        let r = affine_complex_classify(a, b, n, k)?;
        println!("z -> {a}z + {b}, ({n},{k}): {:?}", r.class);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
