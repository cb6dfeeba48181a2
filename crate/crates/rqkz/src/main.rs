fn main() {
    std::process::exit(rqkz::run(std::env::args_os()));
}
