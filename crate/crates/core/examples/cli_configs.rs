//! Runs every shipped CLI config in `examples/configs` into a temporary directory.

use std::ffi::OsStr;
use std::path::Path;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let out = std::env::temp_dir().join("tsna-example-configs");
    let mut entries: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for path in entries {
        let stem = path.file_stem().unwrap().to_string_lossy().to_string();
        let command = stem.split('_').next().unwrap().to_owned();
        let target = out.join(&stem);
        let code = tsna::cli::run([
            OsStr::new("tsna"),
            OsStr::new(&command),
            OsStr::new("--config"),
            path.as_os_str(),
            OsStr::new("--out"),
            target.as_os_str(),
        ]);
        println!("{command:<9} {} -> exit {code}, outputs in {}", path.display(), target.display());
    }
}
