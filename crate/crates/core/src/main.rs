fn main() {
    std::process::exit(heathsym::cli::run());
}
