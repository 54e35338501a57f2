//! Text rendering for MOS tables: one row per speaker, `mean ± halfwidth`
//! cells, mirroring the usual report layout.

use zaonhe_core::mos::{MosTable, SPEAKERS};

/// Render an aligned text table. Missing cells print as `—`.
pub fn render_table(table: &MosTable, title: &str) -> String {
    let mut header: Vec<String> = vec!["Speaker".to_string()];
    header.extend(table.columns.iter().map(|c| capitalize(c)));

    let mut rows: Vec<Vec<String>> = Vec::new();
    for speaker in SPEAKERS {
        let mut row = vec![speaker.to_string()];
        for col in 0..table.columns.len() {
            row.push(match table.cells.get(&(speaker, col)) {
                Some(cell) => format!("{:.2} ± {:.2}", cell.mean, cell.ci_halfwidth),
                None => "—".to_string(),
            });
        }
        rows.push(row);
    }

    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let render_row = |cells: &[String]| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };

    let mut out = String::new();
    out.push_str(title);
    out.push('\n');
    out.push_str(&render_row(&header));
    out.push('\n');
    for row in &rows {
        out.push_str(&render_row(row));
        out.push('\n');
    }
    out
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use zaonhe_core::mos::{mos, parse_ratings_csv, Grouping};

    #[test]
    fn renders_three_rows() {
        let mut csv = String::from("participant,speaker,sentence,metric,score\n");
        for p in 0..2 {
            for spk in 1..=3 {
                for sent in 1..=5 {
                    for m in ["comprehensibility", "naturalness", "accuracy", "intelligibility"] {
                        csv.push_str(&format!("p{p},{spk},{sent},{m},4\n"));
                    }
                }
            }
        }
        let load = parse_ratings_csv(&csv).unwrap();
        let table = mos(&load.records, Grouping::Speaker);
        let text = render_table(&table, "Overall MOS (95% CI)");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("1"));
        assert!(lines[2].contains("4.00 ± 0.00"));
    }
}
