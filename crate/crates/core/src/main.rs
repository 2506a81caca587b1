fn main() {
    let code = zerosum_index::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
