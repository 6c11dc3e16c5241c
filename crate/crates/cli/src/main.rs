fn main() {
    std::process::exit(mono3d_kit::run(std::env::args_os()));
}
