fn main() {
    std::process::exit(heatlab::app::main());
}
