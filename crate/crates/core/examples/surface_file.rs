//! Load a surface from a TOML spec and run the spectrum suite on it. The
//! spec below writes the flat disk as a Chebyshev-Fourier expansion, so the
//! expected eigenvalues are 0, 1, 1, 2, 2.

use fbms::cli::{describe, run, Command, RunConfig};

const SPEC: &str = r#"
format_version = 1

[surface]
kind = "custom"

[custom]
label = "chebyshev-disk"
t_range = [0.001, 1.0]
ends = ["natural", "free"]

# r = t = 0.5005 + 0.4995 s on s in [-1, 1]
[[custom.terms]]
component = 0
cheb = 0
fourier = 1
cos = 0.5005

[[custom.terms]]
component = 0
cheb = 1
fourier = 1
cos = 0.4995

[[custom.terms]]
component = 1
cheb = 0
fourier = 1
sin = 0.5005

[[custom.terms]]
component = 1
cheb = 1
fourier = 1
sin = 0.4995
"#;

fn main() -> fbms::Result<()> {
    let dir = std::env::temp_dir().join("fbms-surface-file");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("disk.toml");
    std::fs::write(&path, SPEC)?;
    let name = path.to_string_lossy().into_owned();

    print!("{}", describe(&name)?);
    let cfg = RunConfig { surface: name, n_t: 32, n_theta: 64, n_eig: 5, output: dir.join("out"), ..Default::default() };
    let report = run(Command::Spectrum, &cfg)?;
    for c in &report.checks {
        println!("{c}");
    }
    print!("{}", std::fs::read_to_string(dir.join("out/spectrum.csv"))?);
    Ok(())
}
