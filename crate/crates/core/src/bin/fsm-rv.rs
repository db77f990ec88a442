fn main() {
    std::process::exit(fsm_rv::cli::run(std::env::args_os()));
}
