//! Signal and mask files: JSON with plain or base64 payloads, and CSV rows.

use realpw::io::{read_mask, read_signal, signal_from_csv, write_mask, write_signal, Encoding};
use realpw::prelude::*;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("realpw-signal-io");
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.display().to_string(), source: e })?;
    let grid = make_grid(1, 256, 0.25)?;
    let f = sample_builtin(&Builtin::gaussian(1.0, &[0.5]), &grid)?;

    for (name, enc) in [("plain.json", Encoding::Array), ("packed.json", Encoding::Base64)] {
        let path = dir.join(name);
        write_signal(&path, &f, enc)?;
        let back = read_signal(&path, None)?;
        let size = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
        println!("{name}: {size} bytes, round trip exact: {}", back.values() == f.values());
    }

    let mask = support_mask(&forward_dft(&f)?, 1e-8)?;
    let path = dir.join("mask.json");
    write_mask(&path, &mask)?;
    println!("mask: {} of {} cells, read back equal: {}", mask.count(), grid.len(), read_mask(&path)? == mask);

    let csv = "index,re,im\n-4,0,0\n-3,0.5,0\n-2,1,0\n-1,1,0\n0,1,0\n1,1,0\n2,0.5,0\n3,0,0\n";
    let g = signal_from_csv(csv, 0.5, "steps")?;
    println!("csv: M = {}, h = {}, l2 norm {:.4}", g.grid().points_per_axis(), g.grid().step(), lp_norm(&g, NormExponent::TWO)?);
    Ok(())
}
