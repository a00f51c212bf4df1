fn main() {
    // Hermitian eigensolver comes from the system LAPACK
    println!("cargo:rustc-link-lib=lapack");
}
