fn main() {
    std::process::exit(hagkit::cli::run(std::env::args_os()));
}
