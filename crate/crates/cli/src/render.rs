//! JSON documents and plain-text tables for the subcommands.

use m24_core::borcherds_lifts::HumbertEntry;
use m24_core::exact_algebra::rational::fmt_q;
use m24_core::twisted_genera::GenusFamily;
use m24_core::weil_lift::{principal_part, VVForm};
use m24_core::ClassRecord;
use serde_json::{json, Value};
use std::fmt::Write as _;

pub fn class_json(rec: &ClassRecord) -> Value {
    json!({
        "name": rec.name,
        "shape": rec.shape_string(),
        "order": rec.order,
        "level": rec.level,
        "weight": fmt_q(&rec.weight()),
        "chi": rec.chi(),
    })
}

pub fn classes_text(table: &[ClassRecord]) -> String {
    let mut out = format!("{:<6}{:<22}{:>6}{:>7}{:>8}{:>5}\n", "class", "shape", "order", "level", "weight", "χ");
    for r in table {
        let _ = writeln!(
            out,
            "{:<6}{:<22}{:>6}{:>7}{:>8}{:>5}",
            r.name,
            r.shape_string(),
            r.order,
            r.level,
            fmt_q(&r.weight()),
            r.chi()
        );
    }
    out
}

pub fn genus_json(fam: &GenusFamily) -> Value {
    let members: Vec<Value> = fam
        .members
        .iter()
        .map(|(d, (name, phi))| json!({ "d": d, "class": name, "series": phi.to_json() }))
        .collect();
    json!({ "class": fam.class.name, "level": fam.class.level, "family": members })
}

pub fn genus_text(fam: &GenusFamily) -> String {
    let mut out = format!("φ_{}:\n{}\n\nfamily:", fam.class.name, fam.member(1));
    for (d, (name, _)) in &fam.members {
        let _ = write!(out, " φ_{d} = φ_{name};");
    }
    out.pop();
    out.push('\n');
    out
}

pub fn jmap_json(rec: &ClassRecord, f: &VVForm) -> Value {
    let pp = principal_part(f);
    let orbits: Vec<Value> = pp
        .orbits()
        .into_iter()
        .map(|(c, e, g, size)| {
            json!({
                "coeff": fmt_q(&c),
                "exp": fmt_q(&e),
                "representative": g.label(f.n, f.t),
                "orbit_size": size,
            })
        })
        .collect();
    let components: Vec<Value> = f
        .components
        .iter()
        .map(|(g, s)| json!({ "label": g.label(f.n, f.t), "series": s.to_json() }))
        .collect();
    json!({
        "class": rec.name,
        "level": f.n,
        "weight": fmt_q(&f.weight),
        "trunc": fmt_q(&f.trunc),
        "constant": fmt_q(&pp.constant),
        "integral": pp.all_integral(),
        "principal_part": orbits,
        "components": components,
    })
}

pub fn jmap_text(j: &Value) -> String {
    let mut out = format!(
        "Ĵ for {} on U({})⊕U⊕A₁, known below q^{}\nconstant term {}\n",
        j["class"].as_str().unwrap_or("?"),
        j["level"],
        j["trunc"].as_str().unwrap_or("?"),
        j["constant"].as_str().unwrap_or("?")
    );
    for o in j["principal_part"].as_array().into_iter().flatten() {
        let size = o["orbit_size"].as_u64().unwrap_or(1);
        let sum = if size > 1 { format!(" Σ over {size}") } else { String::new() };
        let _ = writeln!(
            out,
            "{:>4} q^{:<8}{} 𝔢{}",
            o["coeff"].as_str().unwrap_or("?"),
            o["exp"].as_str().unwrap_or("?"),
            sum,
            o["representative"].as_str().unwrap_or("?")
        );
    }
    let _ = writeln!(out, "integral: {}", j["integral"]);
    out
}

/// Text form of an FJExpansion document: one line per (n, m) cell.
pub fn expansion_text(title: &str, j: &Value, show_weyl: bool) -> String {
    let mut out = format!("{title}: weight {}", j["weight"].as_str().unwrap_or("?"));
    if show_weyl {
        let w: Vec<&str> = j["weyl_vector"].as_array().into_iter().flatten().filter_map(|x| x.as_str()).collect();
        let _ = write!(out, ", Weyl vector ({})", w.join(", "));
    }
    let _ = writeln!(out, ", through q^{} s^{}", j["q_max"], j["s_max"]);
    let mut cells: std::collections::BTreeMap<(i64, i64), Vec<String>> = Default::default();
    for c in j["coefficients"].as_array().into_iter().flatten() {
        let (n, r, m) = (c[0].as_i64().unwrap_or(0), c[1].as_i64().unwrap_or(0), c[2].as_i64().unwrap_or(0));
        cells.entry((m, n)).or_default().push(format!("{}ζ^{r}", c[3].as_str().unwrap_or("?")));
    }
    for ((m, n), terms) in cells {
        let _ = writeln!(out, "s^{m} q^{n}: {}", terms.join(" + ").replace("+ -", "- "));
    }
    out
}

pub fn divisors_text(rec: &ClassRecord, entries: &[HumbertEntry]) -> String {
    let mut out = format!("divisors of Φ_{} (class in the discriminant group, discriminant, multiplicity)\n", rec.name);
    for e in entries {
        let (a, n, r, m, b) = e.data;
        let _ = writeln!(
            out,
            "H({a}, {n}, {r}, {m}, {b})  {}  δ = {}  mult {}",
            e.class.label(rec.level, 1),
            fmt_q(&e.discriminant),
            fmt_q(&e.multiplicity)
        );
    }
    if entries.is_empty() {
        out.push_str("none in range\n");
    }
    out
}
