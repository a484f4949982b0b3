//! CSV series, density-matrix snapshots and atomic file writes.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use decoherence_core::{Basis, DensityMatrix, Trajectory, C64};
use faer::Mat;

/// Writes through a temporary file in the target directory and renames it into
/// place, so a failed run never leaves a half-written file behind.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Header `t,<observables...>`, one row per recorded time, 17 significant digits.
pub fn render_csv(traj: &Trajectory) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend(traj.observables.iter().map(|(n, _)| n.clone()));
    w.write_record(&header).expect("writing to memory");
    for (k, t) in traj.times.iter().enumerate() {
        let mut row = vec![format!("{t:.16e}")];
        row.extend(traj.observables.iter().map(|(_, v)| format!("{:.16e}", v[k])));
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is UTF-8")
}

/// Position-basis matrix: a `N,dx` line, then `N` rows of `re:im` entries.
pub fn render_snapshot(rho: &DensityMatrix) -> String {
    let r = rho.to_basis(Basis::Position);
    let n = r.n();
    let mut out = format!("{},{:.16e}\n", n, r.lattice().dx());
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| {
                let z = r.data()[(i, j)];
                format!("{:.16e}:{:.16e}", z.re, z.im)
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("snapshot line {line}: {message}")]
pub struct SnapshotError {
    pub line: usize,
    pub message: String,
}

/// Parses [`render_snapshot`] output into `(dx, matrix)`.
pub fn parse_snapshot(text: &str) -> Result<(f64, Mat<C64>), SnapshotError> {
    let err = |line: usize, message: String| SnapshotError { line, message };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let (n, dx) = header
        .split_once(',')
        .ok_or_else(|| err(1, format!("expected `N,dx`, found `{header}`")))?;
    let n: usize = n.trim().parse().map_err(|_| err(1, format!("bad N `{n}`")))?;
    let dx: f64 = dx.trim().parse().map_err(|_| err(1, format!("bad dx `{dx}`")))?;
    let mut m = Mat::<C64>::zeros(n, n);
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| err(i + 2, format!("expected {n} rows, found {i}")))?;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n {
            return Err(err(i + 2, format!("expected {n} entries, found {}", cells.len())));
        }
        for (j, cell) in cells.iter().enumerate() {
            let parsed = cell
                .split_once(':')
                .and_then(|(re, im)| Some(C64::new(re.trim().parse().ok()?, im.trim().parse().ok()?)));
            m[(i, j)] = parsed.ok_or_else(|| err(i + 2, format!("bad entry `{cell}`")))?;
        }
    }
    Ok((dx, m))
}

/// Writes `snapshot_0000.txt`, `snapshot_0001.txt`, ... into `dir`.
pub fn write_snapshots(dir: &Path, states: &[DensityMatrix]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(states.len());
    for (k, rho) in states.iter().enumerate() {
        let p = dir.join(format!("snapshot_{k:04}.txt"));
        write_atomic(&p, render_snapshot(rho).as_bytes())?;
        paths.push(p);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use decoherence_core::{cat_state, evolve, make_lattice, GeneratorSpec, Observable};

    #[test]
    fn snapshot_round_trip() {
        let lat = make_lattice(16, 16.0, 1.0).unwrap();
        let rho = cat_state(&lat, 4.0, 0.6).unwrap();
        let (dx, m) = parse_snapshot(&render_snapshot(&rho)).unwrap();
        assert_eq!(dx, lat.dx());
        assert!((&m - rho.data()).norm_max() < 1e-15);
    }

    #[test]
    fn snapshot_rejects_short_rows() {
        let e = parse_snapshot("2,0.5\n1:0,0:0\n1:0\n").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn csv_is_bit_exact() {
        let lat = make_lattice(16, 16.0, 1.0).unwrap();
        let l = GeneratorSpec::JoosZeh { lambda: 0.3 }.build(&lat).unwrap();
        let rho = cat_state(&lat, 4.0, 0.6).unwrap();
        let traj = evolve(&l, &rho, 0.1, 0.01, 3, &[Observable::purity()]).unwrap();
        let text = render_csv(&traj);
        let mut r = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(r.headers().unwrap(), vec!["t", "purity"]);
        let purity = traj.series("purity").unwrap();
        for (k, rec) in r.records().enumerate() {
            let v: f64 = rec.unwrap()[1].parse().unwrap();
            assert_eq!(v.to_bits(), purity[k].to_bits());
        }
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
