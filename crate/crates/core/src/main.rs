fn main() {
    std::process::exit(scpizza::cli::dispatch(std::env::args_os().skip(1)));
}
