fn main() {
    std::process::exit(mavg_cri::cli::main())
}
