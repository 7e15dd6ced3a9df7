use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    let out_dir = PathBuf::from(std::env::var("OUT_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml")).expect("read cbindgen.toml");
    let generated = out_dir.join("nadi.h");
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("generate C header")
        .write_to_file(&generated);

    // keep a checked-in copy next to the crate, rewritten only on change
    let header = std::fs::read(&generated).expect("read generated header");
    let published = crate_dir.join("include").join("nadi.h");
    if std::fs::read(&published).ok().as_deref() != Some(header.as_slice()) {
        std::fs::create_dir_all(published.parent().unwrap()).expect("create include/");
        std::fs::write(&published, header).expect("write include/nadi.h");
    }
}
