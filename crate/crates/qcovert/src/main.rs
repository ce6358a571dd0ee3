fn main() {
    let code = qcovert::cli::run(std::env::args_os());
    std::process::exit(code);
}
