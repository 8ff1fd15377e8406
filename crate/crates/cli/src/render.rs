use std::fmt::Write;

use crate::files::{LocalTable, Pairing, ReportFile, SelmerSection};

fn grid(out: &mut String, header: &[String], rows: &[(String, Vec<String>)]) {
    let label_w = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r.1[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap()
        })
        .collect();
    let line = |out: &mut String, label: &str, cells: &[String]| {
        let _ = write!(out, "  {label:<label_w$}");
        for (c, w) in cells.iter().zip(&widths) {
            let _ = write!(out, " | {c:<w$}");
        }
        out.push('\n');
    };
    line(out, "", header);
    for (label, cells) in rows {
        line(out, label, cells);
    }
}

fn selmer(out: &mut String, name: &str, s: &SelmerSection) {
    let _ = writeln!(out, "Sel^{name}: dimension {} ({:?})", s.dim, s.status);
    for t in &s.basis {
        let _ = writeln!(out, "  {t}");
    }
}

fn local_table(out: &mut String, t: &LocalTable) {
    let _ = writeln!(out, "\na = {}, lift {}", t.a, t.global_lift);
    let header: Vec<String> = t.columns.iter().map(|c| c.place.clone()).collect();
    let row = |name: &str, f: fn(&crate::files::LocalColumn) -> &String| {
        (name.to_string(), t.columns.iter().map(|c| f(c).clone()).collect())
    };
    let rows = vec![
        row("P_v", |c| &c.point),
        row("delta_2(P_v)", |c| &c.delta2),
        row("a_1,v", |c| &c.lift),
        row("difference", |c| &c.difference),
        row("rho_v", |c| &c.rho),
    ];
    grid(out, &header, &rows);
}

fn matrix(out: &mut String, p: &Pairing) {
    let _ = writeln!(out, "\npairing matrix on {} (1 means -1):", p.places.join(", "));
    let header: Vec<String> = (1..=p.basis.len()).map(|k| k.to_string()).collect();
    let rows: Vec<(String, Vec<String>)> = p
        .basis
        .iter()
        .zip(&p.entries)
        .enumerate()
        .map(|(k, (b, row))| (format!("{} {b}", k + 1), row.iter().map(|x| x.to_string()).collect()))
        .collect();
    grid(out, &header, &rows);
    for pe in p.per_place.iter().filter(|pe| pe.entries.iter().flatten().any(|&x| x == 1)) {
        let _ = writeln!(out, "  contribution at {}:", pe.place);
        for row in &pe.entries {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "    {}", cells.join(" "));
        }
    }
    let _ = writeln!(
        out,
        "radical: dimension {}{}",
        p.radical_dim,
        if p.symmetric { "" } else { " (matrix not symmetric)" }
    );
    for t in &p.radical {
        let _ = writeln!(out, "  {t}");
    }
}

pub fn text(r: &ReportFile) -> String {
    let mut out = String::new();
    if let Some(label) = &r.curve.label {
        let _ = writeln!(out, "{label}");
    }
    let n = &r.normalized;
    let _ = writeln!(out, "C: y^2 = ({})({})({})", n.g[0], n.g[1], n.g[2]);
    if let Some(m) = &n.moved_root {
        let _ = writeln!(out, "  (root {m} of G1 sent to infinity)");
    }
    let c = &r.codomain;
    let _ = writeln!(out, "Delta = {}", c.delta);
    for (i, l) in c.l.iter().enumerate() {
        let _ = writeln!(out, "L{} = {l}", i + 1);
    }
    let _ = writeln!(out, "kernel: {}", c.kernel.join(", "));
    let _ = writeln!(out, "S = {{{}}}", r.places.join(", "));
    if let Some(s) = &r.selmer {
        if let Some(h) = &s.phihat {
            selmer(&mut out, "phihat", h);
        }
        if let Some(p) = &s.phi {
            selmer(&mut out, "phi", p);
        }
    }
    if let Some(p) = &r.pairing {
        for t in &p.tables {
            local_table(&mut out, t);
        }
        matrix(&mut out, p);
    }
    if let Some(d) = &r.descent {
        let _ = writeln!(out, "rank bound: {} -> {} (derived bookkeeping)", d.bound_before, d.bound_after);
        let _ = writeln!(out, "inferred dim Sel^2 <= {}", d.inferred_sel2);
        let _ = writeln!(
            out,
            "exact sequence dims {:?}, alternating sum {}",
            d.exact_sequence, d.alternating_sum
        );
    }
    let _ = writeln!(
        out,
        "status: {}{}",
        if r.status.certified { "certified" } else { "heuristic" },
        if r.status.partial { ", partial" } else { "" }
    );
    for w in &r.status.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}
