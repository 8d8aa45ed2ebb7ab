fn main() {
    std::process::exit(poscurv::cli::run());
}
