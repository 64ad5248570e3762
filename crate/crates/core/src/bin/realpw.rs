fn main() {
    std::process::exit(realpw::cli::run(std::env::args_os()));
}
