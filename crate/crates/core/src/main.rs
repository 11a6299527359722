fn main() {
    std::process::exit(heunpot::cli::run(std::env::args_os()));
}
