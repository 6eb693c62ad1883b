fn main() {
    std::process::exit(nbccl::cli::run(std::env::args_os()));
}
