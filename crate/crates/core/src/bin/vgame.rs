fn main() {
    std::process::exit(vgame::cli::run(std::env::args().collect()));
}
