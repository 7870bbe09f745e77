fn main() {
    std::process::exit(ecrt::cli::run(std::env::args_os()));
}
