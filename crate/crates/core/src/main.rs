fn main() {
    // CLI wiring lands after the library modules.
    eprintln!("hcmkr: not yet wired");
    std::process::exit(1);
}
