//! gnuplot scripts with the data inlined as datablocks.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> CliResult<Table> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let columns: Vec<String> = r.headers()?.iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.map(|r| r.iter().map(String::from).collect())).collect::<Result<Vec<Vec<String>>, _>>()?;
    Ok(Table { columns, rows })
}

fn col(t: &Table, name: &str) -> Option<usize> {
    t.columns.iter().position(|c| c == name)
}

/// Builds the script text for a dataset.
pub fn plot_script(path: &Path) -> CliResult<String> {
    let t = read_table(path)?;
    if t.rows.is_empty() {
        return Err(CliError::Validation(format!("{} has no data rows", path.display())));
    }
    let need = |name: &str| col(&t, name).ok_or_else(|| CliError::Validation(format!("{} lacks a `{name}` column", path.display())));
    let (e1, total, fin, flag) = (need("E1")?, need("absM2")?, need("final")?, need("flag")?);
    let mut curves = vec![(total, "|M|^2".to_string())];
    curves.extend(t.columns.iter().enumerate().filter_map(|(k, c)| c.strip_prefix("absM2_n").map(|n| (k, format!("order {n}")))));
    if let Some(k) = col(&t, "oracle_absM2") {
        curves.push((k, "oracle".into()));
    }
    let mut finals: Vec<&str> = Vec::new();
    for r in &t.rows {
        if !finals.contains(&r[fin].as_str()) {
            finals.push(&r[fin]);
        }
    }

    let mut s = String::new();
    writeln!(s, "# generated from {}", path.display()).unwrap();
    writeln!(s, "set xlabel 'E_1'").unwrap();
    writeln!(s, "set ylabel '|M|^2'").unwrap();
    writeln!(s, "set key outside right").unwrap();
    for (b, f) in finals.iter().enumerate() {
        writeln!(s, "$final{b} << EOD").unwrap();
        for r in t.rows.iter().filter(|r| r[fin] == *f) {
            let vals: Vec<&str> = std::iter::once(r[e1].as_str()).chain(curves.iter().map(|(k, _)| r[*k].as_str())).collect();
            writeln!(s, "{}", vals.join(" ")).unwrap();
        }
        writeln!(s, "EOD").unwrap();
    }
    let mut poles: Vec<&str> = t.rows.iter().filter(|r| r[flag] == "resonance").map(|r| r[e1].as_str()).collect();
    poles.dedup();
    for p in poles {
        writeln!(s, "set arrow from {p}, graph 0 to {p}, graph 1 nohead dashtype 2 linecolor 'gray'").unwrap();
    }
    let mut plots = Vec::new();
    for (b, f) in finals.iter().enumerate() {
        for (c, (_, title)) in curves.iter().enumerate() {
            let title = if finals.len() > 1 { format!("{title}, final {f}") } else { title.clone() };
            let style = if c == 0 { "lines linewidth 2" } else { "lines dashtype 3" };
            plots.push(format!("$final{b} using 1:{} with {style} title '{title}'", c + 2));
        }
    }
    writeln!(s, "plot {}", plots.join(", \\\n     ")).unwrap();
    Ok(s)
}

/// Writes the script next to the dataset (`<dataset>.gp`) unless `out` is given.
pub fn emit_plot_script(dataset: &Path, out: Option<&Path>) -> CliResult<PathBuf> {
    if !dataset.is_file() {
        return Err(CliError::Validation(format!("dataset {} does not exist", dataset.display())));
    }
    let script = plot_script(dataset)?;
    let target = out.map(Path::to_path_buf).unwrap_or_else(|| {
        let mut p = dataset.as_os_str().to_owned();
        p.push(".gp");
        PathBuf::from(p)
    });
    std::fs::write(&target, script)?;
    Ok(target)
}
