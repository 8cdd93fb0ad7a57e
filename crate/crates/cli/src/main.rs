fn main() {
    let code = pilipovic_cli::run(
        std::env::args_os(),
        std::env::var_os(pilipovic_cli::OUT_ENV),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    std::process::exit(code);
}
