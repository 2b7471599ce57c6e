use std::env;
use std::path::Path;

// The SDP backend needs LAPACK and BLAS. The reference Fortran builds are
// linked statically by default; set PIESTAB_LAPACK_DIR / PIESTAB_BLAS_DIR to
// point at other static archives, or PIESTAB_LAPACK_DYLIB=1 to link the
// system shared libraries instead.
fn main() {
    println!("cargo:rerun-if-env-changed=PIESTAB_LAPACK_DIR");
    println!("cargo:rerun-if-env-changed=PIESTAB_BLAS_DIR");
    println!("cargo:rerun-if-env-changed=PIESTAB_LAPACK_DYLIB");

    if env::var_os("PIESTAB_LAPACK_DYLIB").is_some() {
        println!("cargo:rustc-link-lib=dylib=lapack");
        println!("cargo:rustc-link-lib=dylib=blas");
        return;
    }

    let lapack_dir = env::var("PIESTAB_LAPACK_DIR").unwrap_or_else(|_| "/usr/lib/x86_64-linux-gnu/lapack".to_string());
    let blas_dir = env::var("PIESTAB_BLAS_DIR").unwrap_or_else(|_| "/usr/lib/x86_64-linux-gnu/blas".to_string());

    let have_static =
        Path::new(&lapack_dir).join("liblapack.a").exists() && Path::new(&blas_dir).join("libblas.a").exists();
    if have_static {
        println!("cargo:rustc-link-search=native={lapack_dir}");
        println!("cargo:rustc-link-search=native={blas_dir}");
        println!("cargo:rustc-link-lib=static=lapack");
        println!("cargo:rustc-link-lib=static=blas");
        println!("cargo:rustc-link-lib=dylib=gfortran");
    } else {
        println!("cargo:rustc-link-lib=dylib=lapack");
        println!("cargo:rustc-link-lib=dylib=blas");
    }
}
