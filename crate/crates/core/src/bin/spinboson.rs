fn main() {
    std::process::exit(spinboson_core::cli::run(std::env::args_os()));
}
