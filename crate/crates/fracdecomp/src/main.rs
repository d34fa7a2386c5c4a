fn main() {
    std::process::exit(fracdecomp::cli::run());
}
