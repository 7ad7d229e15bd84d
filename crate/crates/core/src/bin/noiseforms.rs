use std::io::Write;

fn main() {
    let (code, out) = noiseforms::cli::run(std::env::args_os());
    print!("{out}");
    let _ = std::io::stdout().flush();
    std::process::exit(code);
}
