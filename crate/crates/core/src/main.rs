fn main() {
    std::process::exit(heisenberg_lab::cli::run(std::env::args_os()));
}
