fn main() {
    std::process::exit(csrbf::cli::run(std::env::args_os()));
}
