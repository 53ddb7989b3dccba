fn main() {
    std::process::exit(uavloc::cli::run(std::env::args_os()));
}
