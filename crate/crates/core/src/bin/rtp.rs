fn main() {
    std::process::exit(rtp_meanfield::cli::main_from(std::env::args_os()));
}
