//! `symcsp` binary.

fn main() {
    let code = symcsp_cli::run_command(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
