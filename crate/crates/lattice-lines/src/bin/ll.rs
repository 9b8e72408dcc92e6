use lattice_lines::cli;

fn main() {
    let code = cli::dispatch(std::env::args_os());
    std::process::exit(code);
}
