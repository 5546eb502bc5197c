fn main() {
    std::process::exit(polydisc::cli::run(std::env::args_os()));
}
