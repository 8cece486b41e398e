fn main() {
    std::process::exit(jcm_ladder::cli::run(std::env::args_os()));
}
