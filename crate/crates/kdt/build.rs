fn main() {
    // System LAPACK (any provider exporting the Fortran zgeev_/zgetrf_/
    // zgetrs_/zgecon_ symbols; Debian's liblapack alternative qualifies).
    println!("cargo:rustc-link-lib=dylib=lapack");
    println!("cargo:rerun-if-changed=build.rs");
}
