fn main() {
    std::process::exit(shaperlab::cli::run(std::env::args_os()));
}
