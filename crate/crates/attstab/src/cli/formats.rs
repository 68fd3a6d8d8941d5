//! On-disk formats: trajectory CSV, sweep CSV, and binary PGM stability
//! maps, with parsers so every emitted file round-trips through the toolkit
//! itself.

use crate::control::Trajectory;
use crate::error::{Error, Result};
use crate::stability::{StabilityClass, Verdict};

/// Stability map over a rectangular (beta1, beta2) grid. Cells are stored
/// row-major with the beta2 index ascending; writers flip to the image
/// convention (row 0 = max beta2).
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub b1_values: Vec<f64>,
    pub b2_values: Vec<f64>,
    cells: Vec<StabilityClass>,
}

impl SweepResult {
    pub fn new(
        b1_values: Vec<f64>,
        b2_values: Vec<f64>,
        cells: Vec<StabilityClass>,
    ) -> Result<Self> {
        if b1_values.len() * b2_values.len() != cells.len() {
            return Err(Error::Dimension(format!(
                "{}x{} grid needs {} cells, got {}",
                b1_values.len(),
                b2_values.len(),
                b1_values.len() * b2_values.len(),
                cells.len()
            )));
        }
        Ok(SweepResult {
            b1_values,
            b2_values,
            cells,
        })
    }

    pub fn n1(&self) -> usize {
        self.b1_values.len()
    }

    pub fn n2(&self) -> usize {
        self.b2_values.len()
    }

    pub fn cell(&self, i1: usize, i2: usize) -> &StabilityClass {
        &self.cells[i2 * self.n1() + i1]
    }

    pub fn cells(&self) -> &[StabilityClass] {
        &self.cells
    }
}

fn verdict_byte(v: Verdict) -> u8 {
    match v {
        Verdict::Unstable => 0,
        Verdict::PolynomiallyStableOnly => 128,
        Verdict::LyapunovStable => 255,
    }
}

fn byte_verdict(b: u8) -> Result<Verdict> {
    match b {
        0 => Ok(Verdict::Unstable),
        128 => Ok(Verdict::PolynomiallyStableOnly),
        255 => Ok(Verdict::LyapunovStable),
        other => Err(Error::Domain(format!("unknown verdict byte {other}"))),
    }
}

/// Binary PGM (P5) encoding of the verdict grid: one byte per cell,
/// 0 = Unstable, 128 = PolynomiallyStableOnly, 255 = LyapunovStable,
/// row 0 = max beta2.
pub fn sweep_to_pgm(sweep: &SweepResult) -> Vec<u8> {
    let (n1, n2) = (sweep.n1(), sweep.n2());
    let mut out = format!("P5\n{n1} {n2}\n255\n").into_bytes();
    for r in 0..n2 {
        let i2 = n2 - 1 - r;
        for i1 in 0..n1 {
            out.push(verdict_byte(sweep.cell(i1, i2).verdict));
        }
    }
    out
}

/// Parses a P5 PGM produced by [`sweep_to_pgm`]: returns width, height, and
/// the raster bytes in file order (top row first).
pub fn parse_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let bad = |msg: &str| Error::Domain(format!("malformed PGM: {msg}"));
    if !bytes.starts_with(b"P5") {
        return Err(bad("missing P5 magic"));
    }
    // header tokens: magic, width, height, maxval, then one whitespace byte
    let mut pos = 2usize;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad header number"))?;
    }
    let [w, h, maxval] = fields;
    if maxval != 255 {
        return Err(bad("maxval must be 255"));
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(bad("missing raster separator"));
    }
    pos += 1;
    let raster = &bytes[pos..];
    if raster.len() != w * h {
        return Err(bad("raster size does not match dimensions"));
    }
    for &b in raster {
        byte_verdict(b)?;
    }
    Ok((w, h, raster.to_vec()))
}

/// Companion CSV for a sweep: `beta1,beta2,class,boundary` rows in the same
/// order as the PGM raster (top row = max beta2 first).
pub fn sweep_to_csv(sweep: &SweepResult) -> String {
    let (n1, n2) = (sweep.n1(), sweep.n2());
    let mut out = String::from("beta1,beta2,class,boundary\n");
    for r in 0..n2 {
        let i2 = n2 - 1 - r;
        for i1 in 0..n1 {
            let c = sweep.cell(i1, i2);
            out.push_str(&format!(
                "{},{},{},{}\n",
                sweep.b1_values[i1], sweep.b2_values[i2], c.verdict, c.boundary
            ));
        }
    }
    out
}

/// Parses a sweep CSV back into a [`SweepResult`].
pub fn parse_sweep_csv(text: &str) -> Result<SweepResult> {
    let bad = |msg: String| Error::Domain(format!("malformed sweep CSV: {msg}"));
    let mut lines = text.lines();
    match lines.next() {
        Some("beta1,beta2,class,boundary") => {}
        other => return Err(bad(format!("unexpected header {other:?}"))),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(bad(format!("row {} has {} fields", idx + 2, parts.len())));
        }
        let b1: f64 = parts[0]
            .parse()
            .map_err(|_| bad(format!("bad beta1 in row {}", idx + 2)))?;
        let b2: f64 = parts[1]
            .parse()
            .map_err(|_| bad(format!("bad beta2 in row {}", idx + 2)))?;
        let verdict = Verdict::from_name(parts[2])
            .ok_or_else(|| bad(format!("bad class in row {}", idx + 2)))?;
        let boundary = match parts[3] {
            "true" => true,
            "false" => false,
            other => return Err(bad(format!("bad boundary flag {other:?}"))),
        };
        rows.push((b1, b2, StabilityClass { verdict, boundary }));
    }
    if rows.is_empty() {
        return Err(bad("no data rows".into()));
    }
    // Row order is row-major with beta2 descending: the first block of rows
    // shares the maximum beta2 and carries every beta1 value.
    let first_b2 = rows[0].1;
    let n1 = rows.iter().take_while(|(_, b2, _)| *b2 == first_b2).count();
    if n1 == 0 || rows.len() % n1 != 0 {
        return Err(bad(format!(
            "inconsistent grid: n1 = {n1}, rows = {}",
            rows.len()
        )));
    }
    let n2 = rows.len() / n1;
    let b1_values: Vec<f64> = rows[..n1].iter().map(|(b1, _, _)| *b1).collect();
    let mut b2_values = Vec::with_capacity(n2);
    let mut cells = vec![
        StabilityClass {
            verdict: Verdict::Unstable,
            boundary: false,
        };
        n1 * n2
    ];
    for (k, (b1, b2, class)) in rows.iter().enumerate() {
        let r = k / n1;
        let i1 = k % n1;
        let i2 = n2 - 1 - r;
        if i1 == 0 {
            b2_values.push(*b2);
        }
        if *b1 != b1_values[i1] {
            return Err(bad(format!("beta1 mismatch in row {}", k + 2)));
        }
        cells[i2 * n1 + i1] = *class;
    }
    b2_values.reverse();
    SweepResult::new(b1_values, b2_values, cells)
}

/// Trajectory CSV: header `t,x1,...,x6,u1,u2,u3,V`, one row per sample,
/// 17 significant digits so values round-trip exactly, LF line endings.
pub fn trajectory_to_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,x1,x2,x3,x4,x5,x6,u1,u2,u3,V\n");
    for k in 0..traj.len() {
        let mut fields: Vec<String> = Vec::with_capacity(11);
        fields.push(format!("{:.16e}", traj.times[k]));
        for v in traj.states[k] {
            fields.push(format!("{v:.16e}"));
        }
        for v in traj.controls[k] {
            fields.push(format!("{v:.16e}"));
        }
        fields.push(format!("{:.16e}", traj.energies[k]));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Parses a trajectory CSV back into a [`Trajectory`].
pub fn parse_trajectory_csv(text: &str) -> Result<Trajectory> {
    let bad = |msg: String| Error::Domain(format!("malformed trajectory CSV: {msg}"));
    let mut lines = text.lines();
    match lines.next() {
        Some("t,x1,x2,x3,x4,x5,x6,u1,u2,u3,V") => {}
        other => return Err(bad(format!("unexpected header {other:?}"))),
    }
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        controls: Vec::new(),
        energies: Vec::new(),
    };
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad(format!("bad number in row {}", idx + 2)))?;
        if vals.len() != 11 {
            return Err(bad(format!("row {} has {} fields", idx + 2, vals.len())));
        }
        traj.times.push(vals[0]);
        traj.states.push(vals[1..7].try_into().unwrap());
        traj.controls.push(vals[7..10].try_into().unwrap());
        traj.energies.push(vals[10]);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_sweep() -> SweepResult {
        let classes = [
            Verdict::Unstable,
            Verdict::PolynomiallyStableOnly,
            Verdict::LyapunovStable,
            Verdict::LyapunovStable,
            Verdict::Unstable,
            Verdict::PolynomiallyStableOnly,
        ];
        SweepResult::new(
            vec![0.5, 1.0, 1.5],
            vec![0.8, 1.2],
            classes
                .iter()
                .enumerate()
                .map(|(i, &verdict)| StabilityClass {
                    verdict,
                    boundary: i % 2 == 0,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn pgm_round_trip() {
        let sweep = tiny_sweep();
        let bytes = sweep_to_pgm(&sweep);
        assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
        let (w, h, raster) = parse_pgm(&bytes).unwrap();
        assert_eq!((w, h), (3, 2));
        // top row = max beta2 = index 1
        assert_eq!(raster[0], 255);
        assert_eq!(raster[3], 0);
        assert_eq!(raster.len(), 6);
    }

    #[test]
    fn pgm_rejects_garbage() {
        assert!(parse_pgm(b"P6\n1 1\n255\nx").is_err());
        assert!(parse_pgm(b"P5\n2 2\n255\nab").is_err());
        assert!(parse_pgm(b"P5\n1 1\n255\n\x07").is_err());
    }

    #[test]
    fn sweep_csv_round_trip() {
        let sweep = tiny_sweep();
        let text = sweep_to_csv(&sweep);
        let back = parse_sweep_csv(&text).unwrap();
        assert_eq!(back, sweep);
    }

    #[test]
    fn trajectory_csv_round_trip_is_lossless() {
        let traj = Trajectory {
            times: vec![0.0, 0.1],
            states: vec![[0.1, -0.2, 0.3, 1e-17, 2.0 / 3.0, 6.0], [7.0; 6]],
            controls: vec![[0.01, -0.02, 0.03], [0.0; 3]],
            energies: vec![1.2345678901234567, 0.9999999999999999],
        };
        let text = trajectory_to_csv(&traj);
        assert!(text.starts_with("t,x1,x2,x3,x4,x5,x6,u1,u2,u3,V\n"));
        assert!(!text.contains('\r'));
        let back = parse_trajectory_csv(&text).unwrap();
        assert_eq!(back.times, traj.times);
        assert_eq!(back.states, traj.states);
        assert_eq!(back.controls, traj.controls);
        assert_eq!(back.energies, traj.energies);
    }
}
