fn main() {
    std::process::exit(fluctamp::run(std::env::args_os()));
}
