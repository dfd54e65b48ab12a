use std::io::Write;

use super::TriMesh6;

/// Plain-text mesh dump: nodes, elements and classified edges.
///
/// ```text
/// # tdc-plates mesh v1
/// nodes <count>
/// <id> <x> <y> <z>
/// elements <count>
/// <id> <patch> <n0> .. <n5> <nx> <ny> <nz>
/// edges <count>
/// <id> <a> <b> <mid> <kind> <length> <sides> [<element> <νx> <νy> <νz>]...
/// ```
pub fn write_mesh_dump<W: Write>(mesh: &TriMesh6, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# tdc-plates mesh v1")?;
    writeln!(out, "nodes {}", mesh.nodes.len())?;
    for (i, p) in mesh.nodes.iter().enumerate() {
        writeln!(out, "{i} {} {} {}", fmt(p.x), fmt(p.y), fmt(p.z))?;
    }
    writeln!(out, "elements {}", mesh.elements.len())?;
    for (i, el) in mesh.elements.iter().enumerate() {
        let ids: Vec<String> = el.nodes.iter().map(|n| n.to_string()).collect();
        writeln!(
            out,
            "{i} {} {} {} {} {}",
            el.patch,
            ids.join(" "),
            fmt(el.normal.x),
            fmt(el.normal.y),
            fmt(el.normal.z)
        )?;
    }
    writeln!(out, "edges {}", mesh.edges.len())?;
    for (i, e) in mesh.edges.iter().enumerate() {
        write!(
            out,
            "{i} {} {} {} {} {} {}",
            e.nodes[0],
            e.nodes[1],
            e.nodes[2],
            e.kind.as_str(),
            fmt(e.length),
            e.sides.len()
        )?;
        for s in &e.sides {
            write!(
                out,
                " {} {} {} {}",
                s.element,
                fmt(s.conormal.x),
                fmt(s.conormal.y),
                fmt(s.conormal.z)
            )?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Fixed-precision float with negative zero folded to zero.
fn fmt(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.12e}")
}
