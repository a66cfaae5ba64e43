// The named map families and their default windows.

use babbage::builtin::{builtin_map, BuiltinParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for text in [
        "builtin:f_lambda_cont?bits=101",
        "builtin:f_lambda_smooth?bits=1",
        "builtin:poly_family?i=2",
        "builtin:exp_collapse",
        "builtin:hw_simple?k=3",
        "builtin:hw_sexed?k=2",
        "builtin:jordan?blocks=R1/3,N2",
        "builtin:rot_refl?angle=1/4",
    ] {
        let params: BuiltinParams = text.parse()?;
        let f = builtin_map(&params)?;
        let window = f.window().map(|w| w.axes().to_vec()).unwrap_or_default();
        println!(
            "{:<16} dim {:>2}  window {:?}",
            params.family_name(),
            f.dim(),
            window[0]
        );
    }

    let f = builtin_map(&"builtin:exp_collapse".parse()?)?;
    let orbit: Vec<Vec<f64>> = (0..4)
        .map(|n| f.iterate(&[1.0, 7.0], n))
        .collect::<Result<_, _>>()?;
    println!("exp_collapse orbit of (1, 7): {orbit:?}");
    assert_eq!(orbit[2], orbit[3]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
