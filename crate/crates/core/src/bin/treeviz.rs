fn main() {
    let code = treeviz::cli::cli_entry(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
