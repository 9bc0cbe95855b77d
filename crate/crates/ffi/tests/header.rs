use std::path::PathBuf;
use std::process::Command;

fn header_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/hypext.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header_path()).expect("header is generated by the build script");
    for name in [
        "hypext_last_error",
        "hypext_critical_exponent",
        "hypext_strichartz_q",
        "hypext_kappa",
        "hypext_moment",
        "hypext_bessel_k0",
        "hypext_kg_closed",
        "hypext_gaussian_extension",
        "hypext_grid_gaussian",
        "hypext_grid_from_samples",
        "hypext_grid_len",
        "hypext_grid_samples",
        "hypext_grid_free",
        "hypext_lambda",
        "hypext_ascend",
        "HYPEXT_STATUS_NULL_POINTER",
        "typedef struct HypextGrid HypextGrid",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempdir();
    let src = dir.join("probe.c");
    std::fs::write(
        &src,
        "#include \"hypext.h\"\nint main(void) { double p; return hypext_critical_exponent(2, &p) == HYPEXT_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let include = header_path().parent().unwrap().to_path_buf();
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<PathBuf, ()> {
    ["/usr/bin/cc", "/usr/bin/gcc", "/usr/bin/clang"]
        .iter()
        .map(PathBuf::from)
        .find(|p| p.exists())
        .ok_or(())
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hypext-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
