fn main() {
    std::process::exit(cegame::cli::run());
}
