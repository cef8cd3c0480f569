fn main() {
    perioctrl::cli::init_threads();
    std::process::exit(perioctrl::cli::run(std::env::args_os()));
}
