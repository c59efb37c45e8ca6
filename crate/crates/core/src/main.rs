fn main() {
    std::process::exit(c2dom::cli::run(std::env::args_os()));
}
