fn main() {
    std::process::exit(hgproto::cli::main_with(std::env::args_os()));
}
