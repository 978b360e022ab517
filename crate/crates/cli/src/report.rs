use std::fmt::Write as _;

/// Version tag of the CSV column layout.
pub const CSV_SCHEMA: &str = "# graphinterp report v1";
pub const CSV_HEADER: &str = "file,method,blocks,psnr,ssim,seconds";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub file: String,
    pub method: String,
    /// Number of stacked blocks; 0 for the classical baselines.
    pub blocks: usize,
    /// CPSNR for color demosaicking, Y-PSNR for 2× interpolation.
    pub psnr: f64,
    /// Mean of the per-channel PSNR values.
    pub psnr_channel_mean: f64,
    pub ssim: f64,
    pub seconds: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub rows: Vec<Row>,
    pub skipped: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub method: String,
    pub blocks: usize,
    pub images: usize,
    pub mean_psnr: f64,
    pub mean_psnr_channel_mean: f64,
    pub mean_ssim: f64,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn metric(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.4}")
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

impl RunReport {
    /// Per `(method, blocks)` means, in order of first appearance.
    pub fn aggregates(&self) -> Vec<Aggregate> {
        let mut keys: Vec<(String, usize)> = Vec::new();
        for r in &self.rows {
            let key = (r.method.clone(), r.blocks);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        keys.into_iter()
            .map(|(method, blocks)| {
                let rows: Vec<&Row> = self
                    .rows
                    .iter()
                    .filter(|r| r.method == method && r.blocks == blocks)
                    .collect();
                Aggregate {
                    images: rows.len(),
                    mean_psnr: mean(rows.iter().map(|r| r.psnr)),
                    mean_psnr_channel_mean: mean(rows.iter().map(|r| r.psnr_channel_mean)),
                    mean_ssim: mean(rows.iter().map(|r| r.ssim)),
                    method,
                    blocks,
                }
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_SCHEMA}\n{CSV_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.4}",
                csv_field(&r.file),
                csv_field(&r.method),
                r.blocks,
                metric(r.psnr),
                metric(r.ssim),
                r.seconds
            );
        }
        for (file, reason) in &self.skipped {
            let _ = writeln!(out, "# skipped {}: {}", file, reason.replace(['\n', '\r'], " "));
        }
        out
    }

    pub fn to_markdown(&self, title: &str) -> String {
        let mut out = format!("# {title}\n\n");
        out.push_str("| Method | Blocks | Images | PSNR (dB) | PSNR, channel mean (dB) | SSIM |\n");
        out.push_str("|---|---:|---:|---:|---:|---:|\n");
        for a in self.aggregates() {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} |",
                a.method,
                a.blocks,
                a.images,
                metric(a.mean_psnr),
                metric(a.mean_psnr_channel_mean),
                metric(a.mean_ssim)
            );
        }
        out.push_str("\n| File | Method | Blocks | PSNR (dB) | PSNR, channel mean (dB) | SSIM | Inner iterations | Seconds |\n");
        out.push_str("|---|---|---:|---:|---:|---:|---:|---:|\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} | {:.4} |",
                r.file.replace('|', "\\|"),
                r.method,
                r.blocks,
                metric(r.psnr),
                metric(r.psnr_channel_mean),
                metric(r.ssim),
                r.iterations,
                r.seconds
            );
        }
        if !self.skipped.is_empty() {
            out.push_str("\nSkipped:\n\n");
            for (file, reason) in &self.skipped {
                let _ = writeln!(out, "- {file}: {reason}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(file: &str, method: &str, blocks: usize, psnr: f64, ssim: f64) -> Row {
        Row {
            file: file.into(),
            method: method.into(),
            blocks,
            psnr,
            psnr_channel_mean: psnr,
            ssim,
            seconds: 0.0,
            iterations: 0,
        }
    }

    #[test]
    fn aggregates_are_row_means() {
        let rep = RunReport {
            rows: vec![
                row("a", "igtv", 5, 30.0, 0.9),
                row("b", "igtv", 5, 31.0, 0.8),
                row("a", "igtv", 1, 29.0, 0.7),
            ],
            skipped: vec![],
        };
        let agg = rep.aggregates();
        assert_eq!(agg.len(), 2);
        assert!((agg[0].mean_psnr - 30.5).abs() < 1e-9);
        assert!((agg[0].mean_ssim - 0.85).abs() < 1e-9);
        assert_eq!(agg[1].images, 1);
    }

    #[test]
    fn csv_quoting_and_infinity() {
        let rep = RunReport {
            rows: vec![row("x,\"y\".ppm", "bilinear", 0, f64::INFINITY, 1.0)],
            skipped: vec![("bad.ppm".into(), "truncated".into())],
        };
        let csv = rep.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_SCHEMA);
        assert_eq!(lines[1], CSV_HEADER);
        assert_eq!(lines[2], "\"x,\"\"y\"\".ppm\",bilinear,0,inf,1.0000,0.0000");
        assert_eq!(lines[3], "# skipped bad.ppm: truncated");
    }

    #[test]
    fn markdown_has_table() {
        let rep = RunReport {
            rows: vec![row("a", "bicubic", 0, 28.12346, 0.5)],
            skipped: vec![],
        };
        let md = rep.to_markdown("t");
        assert!(md.contains("| bicubic | 0 | 1 | 28.1235 | 28.1235 | 0.5000 |"));
    }
}
