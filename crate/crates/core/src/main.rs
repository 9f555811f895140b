fn main() {
    std::process::exit(cliffnet::cli::run(std::env::args_os()));
}
