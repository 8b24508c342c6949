fn main() {
    std::process::exit(matrixprove::cli::main_with_args(std::env::args_os()));
}
