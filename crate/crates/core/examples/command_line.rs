// Driving the command-line front end in-process.

use babbage::cli::run;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/exp_collapse.spec");
    for (n, k) in [("3", "2"), ("2", "1")] {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            [
                "babbage",
                "check",
                "--map",
                spec,
                "--n",
                n,
                "--k",
                k,
                "--samples",
                "512",
            ],
            &mut out,
            &mut err,
        );
        let report: serde_json::Value = serde_json::from_slice(&out)?;
        println!(
            "check --n {n} --k {k}: exit {code}, label {}, digest {}",
            report["result"]["label"], report["input_digest"]
        );
    }

    let mut out = Vec::new();
    let code = run(
        [
            "babbage",
            "obstruct",
            "branches",
            "--expr",
            "x*(1 - y)",
            "--point",
            "0,1",
            "--expect",
            "2",
        ],
        &mut out,
        &mut Vec::new(),
    );
    println!(
        "obstruct branches: exit {code}\n{}",
        String::from_utf8(out)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
