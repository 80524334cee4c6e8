//! Plain-text artifacts. Numbers use a fixed `{:.12e}` format so identical runs
//! produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dap_core::{ProblemSpec, Solution};

use crate::commands::RunReport;

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "none".into())
}

fn index_text(s: &Solution) -> String {
    s.index.map(|i| format!("{i:+}")).unwrap_or_else(|| "na".into())
}

pub fn solutions_table(report: &RunReport) -> String {
    let mut out = String::from("t\tposition\tmethod\titerations\tresidual_norm\tdefect\tindex\tu_min\tu_max\tu_mean\n");
    let mut rows: Vec<(f64, usize, &Solution)> = Vec::new();
    if report.sweep.is_empty() {
        rows.extend(report.solutions.iter().enumerate().map(|(k, s)| (s.t, k, s)));
    } else {
        for row in &report.sweep {
            rows.extend(row.solutions.iter().enumerate().map(|(k, s)| (row.t, k, s)));
        }
    }
    for (t, k, s) in rows {
        let mean = s.u.iter().sum::<f64>() / s.u.len() as f64;
        let _ = writeln!(
            out,
            "{}\t{k}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            num(t),
            s.method,
            s.iterations,
            num(s.residual_norm),
            num(s.compatibility_defect),
            index_text(s),
            num(s.min()),
            num(s.max()),
            num(mean)
        );
    }
    out
}

/// One column per solution, one row per node.
pub fn profiles_table(nodes: &[f64], sols: &[Solution]) -> String {
    let mut out = String::from("x");
    for k in 0..sols.len() {
        let _ = write!(out, "\tu{k}");
    }
    out.push('\n');
    for (i, &x) in nodes.iter().enumerate() {
        out.push_str(&num(x));
        for s in sols {
            out.push('\t');
            out.push_str(&num(s.u[i]));
        }
        out.push('\n');
    }
    out
}

pub fn sweep_table(report: &RunReport) -> String {
    let mut out = String::from("t\tcount\tindices\tmax_sup_norm\tmonotone\n");
    for row in &report.sweep {
        let idx: Vec<String> = row.solutions.iter().map(index_text).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            num(row.t),
            row.count(),
            if idx.is_empty() { "-".into() } else { idx.join(",") },
            num(row.max_sup()),
            row.monotone
        );
    }
    out
}

pub fn branch_table(report: &RunReport) -> Option<String> {
    let branch = report.branch.as_ref()?;
    let mut out = String::from("arclength\tt\tu_mean\tu_min\tu_max\tindex\ttangent_dt\tresidual_norm\n");
    for p in &branch.points {
        let mean = p.u.iter().sum::<f64>() / p.u.len() as f64;
        let min = p.u.iter().copied().fold(f64::INFINITY, f64::min);
        let max = p.u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{:+}\t{}\t{}",
            num(p.arclength),
            num(p.t),
            num(mean),
            num(min),
            num(max),
            p.index,
            num(p.tangent_dt),
            num(p.residual_norm)
        );
    }
    Some(out)
}

pub fn summary(report: &RunReport) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("command", report.command.clone());
    kv("necessary_bound", num(report.necessary_bound));
    kv("solutions", report.solutions.len().to_string());
    kv(
        "max_sup_norm",
        num(report.solutions.iter().map(Solution::sup_norm).fold(0.0, f64::max)),
    );
    for row in &report.sweep {
        kv(&format!("count[{}]", num(row.t)), row.count().to_string());
        kv(&format!("max_sup_norm[{}]", num(row.t)), num(row.max_sup()));
    }
    if !report.sweep.is_empty() {
        kv("t_lower_star_estimate", opt_num(report.t_lower_star));
    }
    if report.branch.is_some() || report.t_star_bracket.is_some() {
        kv("t_star_fold", opt_num(report.t_star_fold));
    }
    if let Some(b) = &report.branch {
        kv("branch_points", b.points.len().to_string());
        kv("branch_termination", format!("{:?}", b.termination));
    }
    if let Some((lo, hi)) = report.t_star_bracket {
        kv("t_star_bracket_lo", num(lo));
        kv("t_star_bracket_hi", num(hi));
    }
    if let Some(mu) = report.mu1 {
        kv("mu1", num(mu));
    }
    if let Some(d) = &report.degree {
        kv("degree_G", d.g.degree.to_string());
        kv("degree_ball", d.ball.degree.to_string());
        kv("degree_ball_minus_G", d.ball_minus_g.degree.to_string());
        kv("degree_caveat", d.g.caveat.to_string());
    }
    for m in &report.mms {
        let rates: Vec<String> = m.rates.iter().map(|r| format!("{r:.6}")).collect();
        kv(&format!("mms_rates[alpha={}]", m.alpha), rates.join(","));
    }
    for c in &report.checks {
        kv(
            &format!("check.{}", c.name),
            format!("{} ({})", if c.passed { "PASS" } else { "FAIL" }, c.detail),
        );
    }
    for n in &report.notes {
        kv("note", n.clone());
    }
    kv("elapsed_seconds", format!("{:.3}", report.elapsed.as_secs_f64()));
    out
}

pub fn plot_script(report: &RunReport) -> String {
    let mut out = String::from("set terminal pngcairo size 900,600\n");
    if report.branch.is_some() {
        out.push_str("set output 'branch.png'\nset xlabel 't'\nset ylabel 'mean u'\n");
        if let Some(t) = report.t_star_fold {
            let _ = writeln!(out, "set arrow from {t},graph 0 to {t},graph 1 nohead dt 2");
        }
        out.push_str("plot 'branch.tsv' using 2:3 with linespoints title 'branch'\n");
    } else if report.sweep.len() > 1 {
        out.push_str("set output 'sweep.png'\nset xlabel 't'\nset ylabel 'solutions'\n");
        out.push_str("plot 'sweep.tsv' using 1:2 with steps title 'count'\n");
    } else {
        let n = report.solutions.len();
        out.push_str("set output 'profiles.png'\nset xlabel 'x'\nset ylabel 'u'\n");
        if n == 0 {
            out.push_str("# no solutions to plot\n");
        } else {
            let parts: Vec<String> = (0..n)
                .map(|k| format!("'profiles.tsv' using 1:{} with lines title 'u{k}'", k + 2))
                .collect();
            let _ = writeln!(out, "plot {}", parts.join(", "));
        }
    }
    out
}

pub fn trace_table(sols: &[Solution]) -> String {
    let mut out = String::from("solution\tmethod\titeration\tresidual\tstep\n");
    for (k, s) in sols.iter().enumerate() {
        for r in &s.trace {
            let _ = writeln!(out, "{k}\t{}\t{}\t{}\t{}", r.method, r.iteration, num(r.residual), num(r.step));
        }
    }
    out
}

/// Writes every artifact of `report` into `dir` and returns the written paths.
pub fn write_report(report: &RunReport, dir: &Path, spec: Option<&ProblemSpec>) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files: Vec<(&str, String)> = vec![
        ("config.echo", report.config_echo.clone()),
        ("summary.kv", summary(report)),
        ("plot.gp", plot_script(report)),
    ];
    if !report.solutions.is_empty() || !report.sweep.is_empty() {
        files.push(("solutions.tsv", solutions_table(report)));
        files.push(("profiles.tsv", profiles_table(&report.nodes, &report.solutions)));
    }
    if !report.sweep.is_empty() {
        files.push(("sweep.tsv", sweep_table(report)));
    }
    if let Some(b) = branch_table(report) {
        files.push(("branch.tsv", b));
    }
    if let Some(spec) = spec {
        files.push(("mesh.tsv", spec.operator().mesh().to_table()));
        files.push(("stiffness.coo", spec.operator().stiffness().to_coordinate_text()));
        files.push(("trace.tsv", trace_table(&report.solutions)));
    }
    let mut written = Vec::with_capacity(files.len());
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}
