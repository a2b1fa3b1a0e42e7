fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_language(cbindgen::Language::C)
        .with_include_guard("TSCAL_H")
        .with_header(
            "/* C interface to the tscal time-scale calculus engine.\n\
             * Opaque handles, status codes, UTF-8 strings. Strings returned\n\
             * through out-parameters are freed with tscal_string_free. */",
        )
        .with_cpp_compat(true)
        .generate()
        .expect("cbindgen header generation")
        .write_to_file(format!("{crate_dir}/include/tscal.h"));
    println!("cargo:rerun-if-changed=src/lib.rs");
}
