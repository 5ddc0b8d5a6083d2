fn main() {
    std::process::exit(randers_lab::cli::run(std::env::args_os()));
}
