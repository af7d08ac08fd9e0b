fn main() {
    std::process::exit(tdgn::cli::run(std::env::args_os()));
}
