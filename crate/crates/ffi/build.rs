use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").expect("set by cargo"));
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml")).expect("readable cbindgen.toml");
    match cbindgen::generate_with_config(&crate_dir, config) {
        Ok(bindings) => {
            std::fs::create_dir_all(crate_dir.join("include")).expect("include directory");
            bindings.write_to_file(crate_dir.join("include/dlsfem.h"));
        }
        Err(e) => println!("cargo:warning=header generation skipped: {e}"),
    }
}
