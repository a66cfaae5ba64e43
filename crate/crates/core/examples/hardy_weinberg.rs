// Hardy-Weinberg dynamics: one-step equilibrium, allele conservation, the
// two-sex model and the conjugacies to linear normal forms.

use babbage::builtin::{builtin_map, hardy_weinberg};
use babbage::equation::{check_pair, Sampling};
use babbage::linearize::{hw_conjugacy, HwVariant};
use num_rational::BigRational;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn show(v: &[BigRational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = builtin_map(&"builtin:hw_simple?k=3".parse()?)?;
    println!("hw_simple(3) in {:?}", f.vars());
    let r = check_pair(&f, 2, 1, &Sampling::default(), None)?;
    println!("f∘f = f: {:?} ({:?})", r.label, r.mode);

    let x = [q(1, 10), q(1, 5), q(1, 10), q(3, 10), q(1, 10)];
    let before = hardy_weinberg::allele_frequencies_exact(3, &x);
    let after = hardy_weinberg::allele_frequencies_exact(3, &f.apply_exact(&x)?);
    println!("allele frequencies {} -> {}", show(&before), show(&after));
    assert_eq!(before, after);

    let sexed = builtin_map(&"builtin:hw_sexed?k=2".parse()?)?;
    let x = [q(1, 2), q(1, 2), q(1, 3), q(2, 3)];
    let once = sexed.apply_exact(&x)?;
    let twice = sexed.apply_exact(&once)?;
    println!("two-sex model: f(x)  = {}", show(&once));
    println!("               f²(x) = {}", show(&twice));
    assert_eq!(sexed.apply_exact(&twice)?, twice);
    assert_ne!(once, twice);

    for (k, variant) in [
        (2, HwVariant::Simple),
        (3, HwVariant::Simple),
        (2, HwVariant::Sexed),
    ] {
        let r = hw_conjugacy(k, variant, &Sampling::default().with_samples(256), None)?;
        println!(
            "{variant:?} k = {k}: verified {} ({:?})",
            r.verified, r.mode
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
