fn main() {
    std::process::exit(yoshimura_gripper::io::cli::run(std::env::args_os()));
}
