//! Rendering compensation reports as CSV or as an aligned text table.

use std::fmt::Write;

use airoyalties_core::schemes::{CompensationReport, ScenarioConfig};

/// Long-form CSV: one line per holder and component, then the holder total.
/// Amounts are whole dollars per year.
pub fn reports_csv(runs: &[(ScenarioConfig, CompensationReport)]) -> String {
    let mut out = String::from("scenario,scheme,holder_id,component,dollars_per_year\n");
    for (cfg, report) in runs {
        for p in &report.payouts {
            let row = |out: &mut String, component: &str, dollars: i64| {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    csv_field(&cfg.label),
                    report.scheme,
                    csv_field(&p.holder_id),
                    component,
                    dollars
                );
            };
            for (component, amount) in &p.components {
                row(&mut out, component.as_str(), amount.whole_dollars());
            }
            row(&mut out, "total", p.total.whole_dollars());
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per scenario, one column per holder, `$N/yr` cells. Holders are
/// taken from the first scenario; scenarios missing a holder show `-`.
pub fn reports_table(runs: &[(ScenarioConfig, CompensationReport)]) -> String {
    let Some((_, first)) = runs.first() else {
        return String::new();
    };
    let holders: Vec<&str> = first.payouts.iter().map(|p| p.holder_id.as_str()).collect();
    let mut rows: Vec<Vec<String>> = vec![std::iter::once("scheme".to_string())
        .chain(holders.iter().map(|h| h.to_string()))
        .collect()];
    for (cfg, report) in runs {
        let mut row = vec![cfg.label.clone()];
        row.extend(holders.iter().map(|h| {
            report
                .per_holder(h)
                .map_or_else(|| "-".to_string(), |c| format!("{c}/yr"))
        }));
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                if c == 0 {
                    format!("{cell:<w$}", w = widths[c])
                } else {
                    format!("{cell:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            let rule: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
            out.push_str(&"-".repeat(rule));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use airoyalties_core::money::Cents;
    use airoyalties_core::schemes::{pay_to_train, PayToTrainParams, Rightsholder, SchemeKind};
    use airoyalties_core::Fraction;

    fn run() -> (ScenarioConfig, CompensationReport) {
        let params = PayToTrainParams {
            total_revenue: Cents::from_dollars(1_000_000_000),
            ai_revenue_fraction: Fraction::from_f64(0.9).unwrap(),
            d_c: Fraction::from_f64(0.55).unwrap(),
            dataset_size: 1_000_000_000,
        };
        let holders = vec![
            Rightsholder::new("stock, median", 2_112, 0.0),
            Rightsholder::new("monet", 2_000, 0.0),
        ];
        let report = pay_to_train(&params, &holders).unwrap();
        let cfg = ScenarioConfig {
            label: "Compensate-to-train".into(),
            scheme: SchemeKind::PayToTrain,
            holders,
            windfall: None,
            pay_to_train: Some(params),
            inspire: None,
            ai_royalties: None,
        };
        (cfg, report)
    }

    #[test]
    fn csv_rows_and_quoting() {
        let csv = reports_csv(&[run()]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "scenario,scheme,holder_id,component,dollars_per_year"
        );
        assert_eq!(
            lines[1],
            "Compensate-to-train,pay_to_train,\"stock, median\",training,1045"
        );
        assert_eq!(
            lines[2],
            "Compensate-to-train,pay_to_train,\"stock, median\",total,1045"
        );
        assert_eq!(lines[4], "Compensate-to-train,pay_to_train,monet,total,990");
    }

    #[test]
    fn table_layout() {
        let table = reports_table(&[run()]);
        let lines: Vec<&str> = table.lines().collect();
        assert!(lines[0].starts_with("scheme"));
        assert!(lines[1].chars().all(|c| c == '-'));
        assert!(lines[2].contains("$1,045/yr") && lines[2].ends_with("$990/yr"));
        assert_eq!(reports_table(&[]), "");
    }
}
