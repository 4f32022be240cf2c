fn main() {
    std::process::exit(trapwalk::cli::dispatch(std::env::args_os()));
}
